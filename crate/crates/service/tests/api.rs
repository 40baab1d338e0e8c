//! Service API driven by a scripted HTTP/WebSocket client.

mod common;

use common::*;
use equivalence_core::RgbaImage;
use equivalence_service::events::{ConfigChanged, PanelFailed, PanelReady, UtteranceReceived};
use equivalence_service::{spawn, EngineConfig, EventKind};
use serde_json::json;
use std::time::Duration;

async fn start(cfg: EngineConfig) -> Client {
    let (addr, _app) = spawn(cfg).await.unwrap();
    Client::new(addr)
}

#[tokio::test]
async fn utterance_runs_through_pipeline() {
    let tmp = tempfile::tempdir().unwrap();
    let client = start(small_config(tmp.path())).await;
    let sid = client.create_session().await;
    let mut stream = client.stream(&sid, 0).await;

    let (status, ack) = client.submit(&sid, "Rain falls on the quiet harbor.").await;
    assert_eq!(status, 202);
    let utterance_id = ack["utterance_id"].as_str().unwrap().to_string();

    let events = stream.until_terminal(1).await;
    let kinds: Vec<EventKind> = events.iter().map(|e| e.kind).collect();
    assert_eq!(
        kinds,
        [EventKind::UtteranceReceived, EventKind::FeaturesReady, EventKind::PanelReady]
    );
    assert_contiguous(&events, 1);
    let received: UtteranceReceived = events[0].payload_as().unwrap();
    assert_eq!(received.utterance_id, utterance_id);
    assert_eq!(received.ordinal, 0);
    let ready: PanelReady = events[2].payload_as().unwrap();
    assert_eq!(ready.index, 0);
    assert_eq!(ready.backend_id, "fallback");
    assert!(!ready.regenerated);

    let (status, png) = client.get(&ready.result_url).await;
    assert_eq!(status, 200);
    let img = RgbaImage::from_png(&png).unwrap();
    assert_eq!((img.width(), img.height()), (64, 96));

    // Files follow the documented layout.
    let dir = tmp.path().join("sessions").join(&sid);
    assert!(dir.join("events.jsonl").exists());
    assert_eq!(std::fs::read(dir.join("panels/0.png")).unwrap(), png);
    assert!(dir.join("panels/0.base.png").exists());

    let summary = client.summary(&sid).await;
    assert_eq!(summary["last_seq"], 3);
    assert_eq!(summary["panels"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn rejected_input_emits_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let client = start(small_config(tmp.path())).await;
    let sid = client.create_session().await;

    let (status, body) = client.submit(&sid, "  \n\t ").await;
    assert_eq!((status, body["error"].as_str()), (400, Some("EmptyInput")));
    let (status, body) = client.submit(&sid, &"a".repeat(2001)).await;
    assert_eq!((status, body["error"].as_str()), (400, Some("TextTooLong")));
    let (status, _) = client
        .post_json(&format!("/v1/sessions/{sid}/utterances"), json!({ "txt": "hi" }))
        .await;
    assert_eq!(status, 400);
    assert_eq!(client.summary(&sid).await["last_seq"], 0);

    let (status, _) = client.submit(&sid, &"a".repeat(2000)).await;
    assert_eq!(status, 202);
}

#[tokio::test]
async fn unknown_session_and_panel() {
    let tmp = tempfile::tempdir().unwrap();
    let client = start(small_config(tmp.path())).await;
    let (status, body) = client.submit("nope", "hello").await;
    assert_eq!((status, body["error"].as_str()), (404, Some("UnknownSession")));
    assert_eq!(client.viewport("nope", "").await.0, 404);
    assert_eq!(client.get("/v1/sessions/nope").await.0, 404);
    let ws = tokio_tungstenite::connect_async(format!("ws://{}/v1/sessions/nope/stream", client.addr)).await;
    assert!(ws.is_err());

    let sid = client.create_session().await;
    let (status, body) = client
        .post_json(&format!("/v1/sessions/{sid}/panels/7/regenerate"), json!({}))
        .await;
    assert_eq!((status, body["error"].as_str()), (404, Some("UnknownPanel")));
    assert_eq!(client.get(&format!("/v1/sessions/{sid}/panels/7")).await.0, 404);
    let (status, _) = client
        .post_json(&format!("/v1/sessions/{sid}/panels/7/curation"), json!({ "curated": false }))
        .await;
    assert_eq!(status, 404);
}

#[tokio::test]
async fn unreachable_backend_fails_panel() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small_config(tmp.path());
    let dead = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    cfg.backend.kind = equivalence_core::synthesis::BackendKind::Remote;
    cfg.backend.base_url = format!("http://{}", dead.local_addr().unwrap());
    cfg.backend.retry_delays_ms = vec![10, 20];
    drop(dead);
    let client = start(cfg).await;
    let sid = client.create_session().await;
    let mut stream = client.stream(&sid, 0).await;
    client.submit(&sid, "Lanterns drift downstream.").await;
    let events = stream.until_terminal(1).await;
    let last = events.last().unwrap();
    assert_eq!(last.kind, EventKind::PanelFailed);
    let failed: PanelFailed = last.payload_as().unwrap();
    assert_eq!(failed.error, "BackendUnreachable");
    assert!(failed.message.contains("3 attempt"), "{}", failed.message);
    let summary = client.summary(&sid).await;
    assert!(summary["panels"].as_array().unwrap().is_empty());
    assert_eq!(summary["total_width"], 64);
}

fn differing_fraction(a: &[u8], b: &[u8]) -> f64 {
    let (a, b) = (RgbaImage::from_png(a).unwrap(), RgbaImage::from_png(b).unwrap());
    let px = |img: &RgbaImage| img.as_raw().chunks(4).map(|c| c.to_vec()).collect::<Vec<_>>();
    let (pa, pb) = (px(&a), px(&b));
    pa.iter().zip(&pb).filter(|(x, y)| x != y).count() as f64 / pa.len() as f64
}

#[tokio::test]
async fn regenerate_same_and_different_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let client = start(small_config(tmp.path())).await;
    let sid = client.create_session().await;
    let mut stream = client.stream(&sid, 0).await;
    client.submit(&sid, "The mountain holds its breath.").await;
    let first: PanelReady = stream.until_terminal(1).await.last().unwrap().payload_as().unwrap();
    let (_, original) = client.get(&first.result_url).await;

    let regen = format!("/v1/sessions/{sid}/panels/0/regenerate");
    let (status, ack) = client.post_json(&regen, json!({ "seed": first.prompt.seed })).await;
    assert_eq!(status, 202);
    assert_eq!(ack["seed"], first.prompt.seed);
    let ev = stream.next().await;
    assert_eq!(ev.kind, EventKind::PanelReady);
    let same: PanelReady = ev.payload_as().unwrap();
    assert_eq!((same.index, same.regenerated), (0, true));
    assert_eq!(same.result_sha256, first.result_sha256);
    assert_eq!(client.get(&first.result_url).await.1, original);

    client.post_json(&regen, json!({ "seed": first.prompt.seed ^ 0xdead_beef })).await;
    let other: PanelReady = stream.next().await.payload_as().unwrap();
    assert_ne!(other.result_sha256, first.result_sha256);
    let (_, changed) = client.get(&first.result_url).await;
    assert!(differing_fraction(&original, &changed) >= 0.01);

    // No seed given: a fresh one is drawn and reported.
    let resp = client.http.post(format!("{}{regen}", client.base)).send().await.unwrap();
    assert_eq!(resp.status(), 202);
    let ack: serde_json::Value = resp.json().await.unwrap();
    let ev: PanelReady = stream.next().await.payload_as().unwrap();
    assert_eq!(Some(ev.prompt.seed), ack["seed"].as_u64());
    assert_eq!(client.summary(&sid).await["panels"].as_array().unwrap().len(), 1);
}

#[tokio::test]
async fn replay_then_live_tail_and_resume() {
    let tmp = tempfile::tempdir().unwrap();
    let client = start(small_config(tmp.path())).await;
    let sid = client.create_session().await;
    let mut live = client.stream(&sid, 0).await;
    client.submit(&sid, "Snow settles.").await;
    live.until_terminal(1).await;
    live.close().await;

    // Exactly the three logged events, then whatever comes next.
    let mut replay = client.stream(&sid, 0).await;
    let logged: Vec<_> = [replay.next().await, replay.next().await, replay.next().await].into();
    assert_contiguous(&logged, 1);
    assert!(replay.next_within(Duration::from_millis(200)).await.is_none());
    client.submit(&sid, "Birds return.").await;
    let tail = replay.until_terminal(1).await;
    assert_contiguous(&tail, 4);

    // Resuming after the last seen seq repeats nothing.
    let last_seen = 5;
    let mut resumed = client.stream(&sid, last_seen + 1).await;
    let rest = resumed.until_terminal(1).await;
    assert_eq!(rest[0].seq, 6);
    assert_contiguous(&rest, 6);
    assert!(resumed.next_within(Duration::from_millis(200)).await.is_none());

    // A from_seq past the end waits for new events.
    let mut ahead = client.stream(&sid, 100).await;
    assert!(ahead.next_within(Duration::from_millis(200)).await.is_none());
}

#[tokio::test]
async fn concurrent_subscribers_see_identical_order() {
    let tmp = tempfile::tempdir().unwrap();
    let client = start(small_config(tmp.path())).await;
    let sid = client.create_session().await;
    let mut a = client.stream(&sid, 0).await;
    let mut b = client.stream(&sid, 0).await;

    let mut submits = Vec::new();
    for i in 0..6 {
        let c = Client::new(client.addr);
        let sid = sid.clone();
        submits.push(tokio::spawn(async move {
            let text = format!("Wave number {i} breaks on stone.");
            assert_eq!(c.submit(&sid, &text).await.0, 202);
        }));
    }
    for s in submits {
        s.await.unwrap();
    }
    let ea = a.until_terminal(6).await;
    let eb = b.until_terminal(6).await;
    assert_eq!(ea, eb);
    assert_contiguous(&ea, 1);
    assert_eq!(ea.len(), 18);

    // Per-session pipeline is FIFO: panels follow submission order.
    let received: Vec<String> = ea
        .iter()
        .filter(|e| e.kind == EventKind::UtteranceReceived)
        .map(|e| e.payload_as::<UtteranceReceived>().unwrap().utterance_id)
        .collect();
    let ready: Vec<String> = ea
        .iter()
        .filter(|e| e.kind == EventKind::PanelReady)
        .map(|e| e.payload_as::<PanelReady>().unwrap().utterance_id)
        .collect();
    assert_eq!(received, ready);
}

#[tokio::test]
async fn viewport_cases() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = small_config(tmp.path());
    cfg.mapping.panel_width_px = 512;
    cfg.mapping.panel_height_px = 768;
    cfg.scroll.overlap_px = 64;
    let client = start(cfg).await;
    let sid = client.create_session().await;

    let (status, png) = client.viewport(&sid, "?offset=0&width=300").await;
    assert_eq!(status, 200);
    let img = RgbaImage::from_png(&png).unwrap();
    assert_eq!((img.width(), img.height()), (300, 768));
    assert_eq!(img, equivalence_core::Scroll::placeholder(300, 768));

    let (status, body) = client.get_json(&format!("/v1/sessions/{sid}/scroll?width=0")).await;
    assert_eq!((status, body["error"].as_str()), (400, Some("OutOfRange")));

    let mut stream = client.stream(&sid, 0).await;
    client.submit(&sid, "Two cranes fly.").await;
    client.submit(&sid, "Ink spreads slowly.").await;
    stream.until_terminal(2).await;

    let (status, png) = client.viewport(&sid, "").await;
    assert_eq!(status, 200);
    let full = RgbaImage::from_png(&png).unwrap();
    assert_eq!(full.width(), 512 * 2 - 64);
    assert_eq!(client.summary(&sid).await["total_width"], 960);

    let (status, png) = client.viewport(&sid, "?offset=100&width=200").await;
    assert_eq!(status, 200);
    let crop = RgbaImage::from_png(&png).unwrap();
    for y in [0, 400, 767] {
        assert_eq!(crop.row(y), &full.row(y)[400..1200]);
    }
    assert_eq!(client.viewport(&sid, "?offset=900&width=100").await.0, 400);
    assert_eq!(client.viewport(&sid, "?offset=2000").await.0, 400);
    assert_eq!(client.viewport(&sid, "?offset=abc").await.0, 400);
}

#[tokio::test]
async fn curation_changes_width_and_is_logged() {
    let tmp = tempfile::tempdir().unwrap();
    let client = start(small_config(tmp.path())).await;
    let sid = client.create_session().await;
    let mut stream = client.stream(&sid, 0).await;
    for text in ["One stone.", "Two stones.", "Three stones."] {
        client.submit(&sid, text).await;
    }
    stream.until_terminal(3).await;
    assert_eq!(client.summary(&sid).await["total_width"], 64 * 3 - 16 * 2);

    let path = format!("/v1/sessions/{sid}/panels/1/curation");
    let (status, body) = client.post_json(&path, json!({ "curated": false })).await;
    assert_eq!(status, 200);
    assert_eq!(body["total_width"], 64 * 2 - 16);
    let ev = stream.next().await;
    assert_eq!(ev.kind, EventKind::PanelCurated);
    let (_, body) = client.post_json(&path, json!({ "curated": true })).await;
    assert_eq!(body["total_width"], 64 * 3 - 16 * 2);
}

#[tokio::test]
async fn config_get_put() {
    let tmp = tempfile::tempdir().unwrap();
    let client = start(small_config(tmp.path())).await;
    let sid = client.create_session().await;
    let mut stream = client.stream(&sid, 0).await;

    let (status, current) = client.get_json("/v1/config").await;
    assert_eq!(status, 200);
    let mut cfg: EngineConfig = serde_json::from_value(current).unwrap();
    cfg.prompt.steps = 12;
    cfg.mapping.style_base_prompt = "sumi-e, sparse brushwork".into();

    let resp = client
        .http
        .put(format!("{}/v1/config", client.base))
        .json(&cfg)
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), 200);
    let hash = resp.json::<serde_json::Value>().await.unwrap()["hash"].as_str().unwrap().to_string();
    assert_eq!(hash, cfg.hash());
    let ev = stream.next().await;
    assert_eq!(ev.kind, EventKind::ConfigChanged);
    assert_eq!(ev.payload_as::<ConfigChanged>().unwrap().hash, hash);

    // Future panels use the new settings.
    client.submit(&sid, "Pines in fog.").await;
    let ready: PanelReady = stream.until_terminal(1).await.last().unwrap().payload_as().unwrap();
    assert_eq!(ready.prompt.steps, 12);
    assert!(ready.prompt.positive.starts_with("sumi-e, sparse brushwork"));

    let mut restart_only = cfg.clone();
    restart_only.scroll.overlap_px = 8;
    let resp = client
        .http
        .put(format!("{}/v1/config", client.base))
        .json(&restart_only)
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), 409);

    let resp = client
        .http
        .put(format!("{}/v1/config", client.base))
        .body(r#"{"prompt": {"steps": 0}}"#)
        .send()
        .await
        .unwrap();
    assert_eq!(resp.status(), 400);
    assert_eq!(client.get_json("/v1/config").await.1["prompt"]["steps"], 12);
}
