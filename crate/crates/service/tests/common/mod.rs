//! Scripted HTTP and WebSocket client used by the service tests.
#![allow(dead_code)]

use std::io::{BufRead, BufReader};
use std::net::SocketAddr;
use std::path::Path;
use std::process::{Child, Command, Stdio};
use std::time::Duration;

use equivalence_service::{EngineConfig, SessionEvent};
use futures::StreamExt;
use serde_json::{json, Value};
use tokio::net::TcpStream;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{MaybeTlsStream, WebSocketStream};

pub const WAIT: Duration = Duration::from_secs(30);

/// Small panels keep the debug-build pipeline fast.
pub fn small_config(data_dir: &Path) -> EngineConfig {
    let mut cfg = EngineConfig::default();
    cfg.mapping.panel_width_px = 64;
    cfg.mapping.panel_height_px = 96;
    cfg.scroll.overlap_px = 16;
    cfg.service.bind = SocketAddr::from(([127, 0, 0, 1], 0));
    cfg.service.data_dir = data_dir.to_path_buf();
    cfg
}

pub struct Client {
    pub base: String,
    pub addr: SocketAddr,
    pub http: reqwest::Client,
}

impl Client {
    pub fn new(addr: SocketAddr) -> Self {
        Client {
            base: format!("http://{addr}"),
            addr,
            http: reqwest::Client::new(),
        }
    }

    pub async fn create_session(&self) -> String {
        let resp = self.http.post(format!("{}/v1/sessions", self.base)).send().await.unwrap();
        assert_eq!(resp.status(), 201);
        let body: Value = resp.json().await.unwrap();
        body["session_id"].as_str().unwrap().to_string()
    }

    pub async fn post_json(&self, path: &str, body: Value) -> (u16, Value) {
        let resp = self.http.post(format!("{}{path}", self.base)).json(&body).send().await.unwrap();
        let status = resp.status().as_u16();
        (status, resp.json().await.unwrap_or(Value::Null))
    }

    pub async fn submit(&self, session: &str, text: &str) -> (u16, Value) {
        self.post_json(&format!("/v1/sessions/{session}/utterances"), json!({ "text": text }))
            .await
    }

    pub async fn get(&self, path: &str) -> (u16, Vec<u8>) {
        let resp = self.http.get(format!("{}{path}", self.base)).send().await.unwrap();
        let status = resp.status().as_u16();
        (status, resp.bytes().await.unwrap().to_vec())
    }

    pub async fn get_json(&self, path: &str) -> (u16, Value) {
        let (status, bytes) = self.get(path).await;
        (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
    }

    pub async fn summary(&self, session: &str) -> Value {
        let (status, body) = self.get_json(&format!("/v1/sessions/{session}")).await;
        assert_eq!(status, 200, "{body}");
        body
    }

    pub async fn viewport(&self, session: &str, query: &str) -> (u16, Vec<u8>) {
        self.get(&format!("/v1/sessions/{session}/scroll{query}")).await
    }

    pub async fn stream(&self, session: &str, from_seq: u64) -> EventStream {
        let url = format!("ws://{}/v1/sessions/{session}/stream?from_seq={from_seq}", self.addr);
        let (ws, _) = tokio_tungstenite::connect_async(url).await.unwrap();
        EventStream { ws }
    }
}

pub struct EventStream {
    pub ws: WebSocketStream<MaybeTlsStream<TcpStream>>,
}

impl EventStream {
    /// Next event, or `None` if nothing arrives within `timeout`.
    pub async fn next_within(&mut self, timeout: Duration) -> Option<SessionEvent> {
        loop {
            let msg = tokio::time::timeout(timeout, self.ws.next()).await.ok()??.ok()?;
            match msg {
                Message::Text(text) => return Some(serde_json::from_str(&text).unwrap()),
                Message::Close(_) => return None,
                _ => continue,
            }
        }
    }

    pub async fn next(&mut self) -> SessionEvent {
        self.next_within(WAIT).await.expect("event stream ended or timed out")
    }

    /// Read events until `done` holds for the latest one; returns all read.
    pub async fn until(&mut self, mut done: impl FnMut(&SessionEvent) -> bool) -> Vec<SessionEvent> {
        let mut out = Vec::new();
        loop {
            let ev = self.next().await;
            let stop = done(&ev);
            out.push(ev);
            if stop {
                return out;
            }
        }
    }

    /// Read until `n` terminal panel events (ready or failed) have arrived.
    pub async fn until_terminal(&mut self, n: usize) -> Vec<SessionEvent> {
        let mut seen = 0;
        self.until(|ev| {
            if is_terminal(ev) {
                seen += 1;
            }
            seen == n
        })
        .await
    }

    pub async fn close(mut self) {
        let _ = self.ws.close(None).await;
    }
}

pub fn is_terminal(ev: &SessionEvent) -> bool {
    matches!(
        ev.kind,
        equivalence_service::EventKind::PanelReady | equivalence_service::EventKind::PanelFailed
    )
}

pub fn assert_contiguous(events: &[SessionEvent], first: u64) {
    for (i, ev) in events.iter().enumerate() {
        assert_eq!(ev.seq, first + i as u64, "seq gap or duplicate at position {i}");
    }
}

/// The server binary, started as a child process so it can be killed.
pub struct ServerProcess {
    pub child: Child,
    pub addr: SocketAddr,
}

impl ServerProcess {
    pub fn start(config_path: &Path) -> Self {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_equivalence-server"));
        cmd.arg("--config").arg(config_path);
        Self::launch(cmd)
    }

    /// Config path passed through `EQUIV_CONFIG` instead of a flag.
    pub fn start_env(config_path: &Path) -> Self {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_equivalence-server"));
        cmd.env("EQUIV_CONFIG", config_path);
        Self::launch(cmd)
    }

    fn launch(mut cmd: Command) -> Self {
        let mut child = cmd
            .arg("--bind")
            .arg("127.0.0.1:0")
            .env("RUST_LOG", "warn")
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .expect("server binary starts");
        let stdout = child.stdout.take().unwrap();
        let mut line = String::new();
        BufReader::new(stdout).read_line(&mut line).unwrap();
        let addr = line
            .trim()
            .strip_prefix("listening on ")
            .unwrap_or_else(|| panic!("unexpected server output {line:?}"))
            .parse()
            .unwrap();
        ServerProcess { child, addr }
    }

    /// SIGKILL: no shutdown hooks run.
    pub fn kill(mut self) {
        self.child.kill().unwrap();
        self.child.wait().unwrap();
    }
}

pub fn write_config(dir: &Path, cfg: &EngineConfig) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_vec_pretty(cfg).unwrap()).unwrap();
    path
}

impl Drop for ServerProcess {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// An img2img endpoint that echoes the base image after `delay`.
pub async fn slow_echo_backend(delay: Duration) -> (String, std::sync::Arc<std::sync::atomic::AtomicUsize>) {
    use axum::routing::post;
    use axum::Json;
    use equivalence_core::synthesis::wire::{WireRequest, WireResponse};
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Arc;

    let hits = Arc::new(AtomicUsize::new(0));
    let counter = hits.clone();
    let app = axum::Router::new().route(
        "/v1/img2img",
        post(move |Json(req): Json<WireRequest>| {
            let counter = counter.clone();
            async move {
                counter.fetch_add(1, Ordering::SeqCst);
                tokio::time::sleep(delay).await;
                Json(WireResponse {
                    image: req.base_image,
                    seed_used: req.seed,
                    duration_ms: delay.as_millis() as u64,
                })
            }
        }),
    );
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let url = format!("http://{}", listener.local_addr().unwrap());
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    (url, hits)
}
