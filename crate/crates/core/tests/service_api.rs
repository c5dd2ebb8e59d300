//! HTTP API integration tests over a real socket.

use std::sync::Arc;

use serde_json::{json, Value};

use wxlate_core::geo::{CwaStats, LanguageCount, PriorityLanguage};
use wxlate_core::pipeline::{DictionaryEngine, ExternalEngine};
use wxlate_core::service::{serve, AppState, GeoData, Store};

const TWO_EN: &str = "Tropical Weather Outlook";
const TWO_ES_MT: &str = "Perspectiva sobre las Condiciones del Tiempo en el Trópico";
const TWO_BACK: &str = "Perspective on Weather Conditions in the Tropics";

fn table3_state(store: Arc<Store>) -> AppState {
    let forward = DictionaryEngine::new("table3-fwd").with_sentence(TWO_EN, TWO_ES_MT);
    let reverse = DictionaryEngine::new("table3-rev").with_sentence(TWO_ES_MT, TWO_BACK);
    AppState {
        engine: Arc::new(forward),
        reverse_engine: Some(Arc::new(reverse)),
        ..AppState::minimal(store)
    }
}

async fn spawn_server(state: AppState) -> (String, tokio::task::JoinHandle<()>) {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let handle = tokio::spawn(async move {
        let _ = serve(Arc::new(state), listener).await;
    });
    (format!("http://{addr}"), handle)
}

fn job_request(body: &str) -> Value {
    json!({
        "product_type": "TWO",
        "office": "NHC",
        "language": "en",
        "issued_at": 1_700_000_000,
        "body": body,
        "target_language": "es",
        "file_name": "TWO-NHC-001.txt",
    })
}

#[tokio::test]
async fn submit_job_happy_path() {
    let (base, server) = spawn_server(table3_state(Arc::new(Store::in_memory()))).await;
    let client = reqwest::Client::new();
    let response = client
        .post(format!("{base}/v1/jobs"))
        .json(&job_request(TWO_EN))
        .send()
        .await
        .unwrap();
    assert_eq!(response.status(), 202);
    let accepted: Value = response.json().await.unwrap();
    let job_id = accepted["job_id"].as_str().unwrap().to_string();
    assert!(accepted["scored"].as_bool().unwrap());

    let job: Value = client
        .get(format!("{base}/v1/jobs/{job_id}"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(job["product_type"], "TWO");
    assert_eq!(job["segments"][0]["translated"], TWO_ES_MT);

    let missing = client
        .get(format!("{base}/v1/jobs/nope"))
        .send()
        .await
        .unwrap();
    assert_eq!(missing.status(), 404);

    let product: Value = client
        .get(format!("{base}/v1/products/TWO-NHC-001.txt"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(product["language"], "es");
    assert!(product["body"].as_str().unwrap().contains(TWO_ES_MT));
    server.abort();
}

#[tokio::test]
async fn report_card_over_table3_fixture() {
    let (base, server) = spawn_server(table3_state(Arc::new(Store::in_memory()))).await;
    let client = reqwest::Client::new();
    client
        .post(format!("{base}/v1/jobs"))
        .json(&job_request(TWO_EN))
        .send()
        .await
        .unwrap();
    let card: Value = client
        .get(format!("{base}/v1/reportcard?type=TWO&lang=en-es"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(card["count"], 1);
    let chrf_mean = card["chrf_pp"]["mean"].as_f64().unwrap();
    assert!((chrf_mean - 29.626).abs() < 0.5, "chrf mean {chrf_mean}");
    let ter_mean = card["ter"]["mean"].as_f64().unwrap();
    assert!((ter_mean - 200.0).abs() < 0.01);
    assert_eq!(card["fuzz"]["mean"].as_f64().unwrap(), 42.0);
    // mismatched filter selects nothing
    let empty: Value = client
        .get(format!("{base}/v1/reportcard?type=ZFP"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(empty["count"], 0);
    server.abort();
}

#[tokio::test]
async fn unknown_product_type_is_400_and_engine_failure_503() {
    let (base, server) = spawn_server(table3_state(Arc::new(Store::in_memory()))).await;
    let client = reqwest::Client::new();
    let mut bad = job_request(TWO_EN);
    bad["product_type"] = json!("NOPE");
    let response = client
        .post(format!("{base}/v1/jobs"))
        .json(&bad)
        .send()
        .await
        .unwrap();
    assert_eq!(response.status(), 400);
    server.abort();

    // an external engine pointing nowhere fails with 503
    let state = AppState {
        engine: Arc::new(ExternalEngine::http("dead", "http://127.0.0.1:1/translate")),
        ..AppState::minimal(Arc::new(Store::in_memory()))
    };
    let (base, server) = spawn_server(state).await;
    let response = client
        .post(format!("{base}/v1/jobs"))
        .json(&job_request(TWO_EN))
        .send()
        .await
        .unwrap();
    assert_eq!(response.status(), 503);
    server.abort();
}

#[tokio::test]
async fn feedback_dedup_and_review_flow() {
    let (base, server) = spawn_server(table3_state(Arc::new(Store::in_memory()))).await;
    let client = reqwest::Client::new();
    client
        .post(format!("{base}/v1/jobs"))
        .json(&job_request(TWO_EN))
        .send()
        .await
        .unwrap();
    let event = json!({
        "file_name": "TWO-NHC-001.txt",
        "message_type": "TWO",
        "language": "es",
        "timestamp": 1_700_000_100,
        "rating": "down",
        "nonce": "abc-1",
    });
    let first: Value = client
        .post(format!("{base}/v1/feedback"))
        .json(&event)
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(first["tally"]["down"], 1);
    assert_eq!(first["duplicate"], false);
    assert_eq!(first["tally"]["orphan"], false);
    let item_id = first["review_item"]["id"].as_str().unwrap().to_string();

    let dup_response = client
        .post(format!("{base}/v1/feedback"))
        .json(&event)
        .send()
        .await
        .unwrap();
    assert_eq!(dup_response.status(), 200);
    let dup: Value = dup_response.json().await.unwrap();
    assert_eq!(dup["duplicate"], true);
    assert_eq!(dup["tally"]["down"], 1);

    let next: Value = client
        .get(format!("{base}/v1/review/next"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(next["id"], item_id.as_str());

    let resolved = client
        .post(format!("{base}/v1/review/{item_id}"))
        .json(&json!({"state": "corrected"}))
        .send()
        .await
        .unwrap();
    assert_eq!(resolved.status(), 200);
    let again = client
        .post(format!("{base}/v1/review/{item_id}"))
        .json(&json!({"state": "dismissed"}))
        .send()
        .await
        .unwrap();
    assert_eq!(again.status(), 409);
    let empty = client
        .get(format!("{base}/v1/review/next"))
        .send()
        .await
        .unwrap();
    assert_eq!(empty.status(), 204);
    server.abort();
}

#[tokio::test]
async fn auth_token_guards_mutations() {
    let state = AppState {
        auth_token: Some("sekrit".into()),
        ..table3_state(Arc::new(Store::in_memory()))
    };
    let (base, server) = spawn_server(state).await;
    let client = reqwest::Client::new();
    let denied = client
        .post(format!("{base}/v1/jobs"))
        .json(&job_request(TWO_EN))
        .send()
        .await
        .unwrap();
    assert_eq!(denied.status(), 401);
    let allowed = client
        .post(format!("{base}/v1/jobs"))
        .header("authorization", "Bearer sekrit")
        .json(&job_request(TWO_EN))
        .send()
        .await
        .unwrap();
    assert_eq!(allowed.status(), 202);
    // reads stay open
    let read = client
        .get(format!("{base}/v1/reportcard"))
        .send()
        .await
        .unwrap();
    assert_eq!(read.status(), 200);
    server.abort();
}

#[tokio::test]
async fn lep_endpoints_serve_configured_data() {
    let mut stats = CwaStats {
        cwa_id: "SJU".into(),
        area_sq_km: Some(100.0),
        ..CwaStats::default()
    };
    stats
        .languages
        .insert("Spanish".into(), LanguageCount { total: 900, lep: 600 });
    let state = AppState {
        geo: Some(GeoData {
            priority: vec![PriorityLanguage {
                language: "Spanish".into(),
                total_speakers: 1_000_000,
                lep_speakers: 400_000,
                ratio: 0.4,
            }],
            stats: vec![stats],
        }),
        ..AppState::minimal(Arc::new(Store::in_memory()))
    };
    let (base, server) = spawn_server(state).await;
    let client = reqwest::Client::new();
    let priority: Value = client
        .get(format!("{base}/v1/lep/priority"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(priority[0]["language"], "Spanish");
    let cwa: Value = client
        .get(format!("{base}/v1/lep/cwa/SJU"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(cwa["languages"]["Spanish"]["lep"], 600);
    let missing = client
        .get(format!("{base}/v1/lep/cwa/XXX"))
        .send()
        .await
        .unwrap();
    assert_eq!(missing.status(), 404);
    server.abort();
}

#[tokio::test]
async fn restart_recovers_jobs_scores_tallies_and_reviews() {
    let dir = tempfile::tempdir().unwrap();
    let store_path = dir.path().join("store.jsonl");
    let job_id;
    {
        let store = Arc::new(Store::open(&store_path).unwrap());
        let (base, server) = spawn_server(table3_state(store)).await;
        let client = reqwest::Client::new();
        let accepted: Value = client
            .post(format!("{base}/v1/jobs"))
            .json(&job_request(TWO_EN))
            .send()
            .await
            .unwrap()
            .json()
            .await
            .unwrap();
        job_id = accepted["job_id"].as_str().unwrap().to_string();
        client
            .post(format!("{base}/v1/feedback"))
            .json(&json!({
                "file_name": "TWO-NHC-001.txt",
                "message_type": "TWO",
                "language": "es",
                "timestamp": 1,
                "rating": "down",
                "nonce": "n-restart",
            }))
            .send()
            .await
            .unwrap();
        server.abort();
    }
    // a brand-new process over the same store file
    let store = Arc::new(Store::open(&store_path).unwrap());
    let (base, server) = spawn_server(table3_state(store)).await;
    let client = reqwest::Client::new();
    let job = client
        .get(format!("{base}/v1/jobs/{job_id}"))
        .send()
        .await
        .unwrap();
    assert_eq!(job.status(), 200);
    let card: Value = client
        .get(format!("{base}/v1/reportcard"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(card["count"], 1);
    let tally: Value = client
        .get(format!("{base}/v1/feedback/tally?file=TWO-NHC-001.txt&lang=es"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    assert_eq!(tally["down"], 1);
    let review = client
        .get(format!("{base}/v1/review/next"))
        .send()
        .await
        .unwrap();
    assert_eq!(review.status(), 200);
    server.abort();
}

#[tokio::test]
async fn concurrent_feedback_counts_distinct_nonces() {
    let (base, server) = spawn_server(table3_state(Arc::new(Store::in_memory()))).await;
    let client = reqwest::Client::new();
    let mut handles = Vec::new();
    for i in 0..100 {
        let client = client.clone();
        let base = base.clone();
        handles.push(tokio::spawn(async move {
            let event = json!({
                "file_name": "TWO-NHC-001.txt",
                "message_type": "TWO",
                "language": "es",
                "timestamp": 1000 + i,
                "rating": if i % 2 == 0 { "up" } else { "down" },
                "nonce": format!("nonce-{}", i % 40),
            });
            client
                .post(format!("{base}/v1/feedback"))
                .json(&event)
                .send()
                .await
                .unwrap()
                .status()
        }));
    }
    for handle in handles {
        assert_eq!(handle.await.unwrap(), 200);
    }
    let tally: Value = client
        .get(format!("{base}/v1/feedback/tally?file=TWO-NHC-001.txt&lang=es"))
        .send()
        .await
        .unwrap()
        .json()
        .await
        .unwrap();
    let up = tally["up"].as_u64().unwrap();
    let down = tally["down"].as_u64().unwrap();
    assert_eq!(up + down, 40, "tallies must equal distinct nonces");
    server.abort();
}

#[tokio::test]
async fn lep_unconfigured_is_404() {
    let (base, server) = spawn_server(AppState::minimal(Arc::new(Store::in_memory()))).await;
    let response = reqwest::get(format!("{base}/v1/lep/priority")).await.unwrap();
    assert_eq!(response.status(), 404);
    server.abort();
}
