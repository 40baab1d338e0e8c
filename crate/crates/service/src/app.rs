//! Session registry, live configuration and the per-session pipeline.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock, Weak};

use equivalence_core::lang::Lexicons;
use equivalence_core::pipeline::{compose, request_for, PipelineError};
use equivalence_core::scroll::{Panel, Scroll};
use equivalence_core::synthesis::Synthesizer;
use equivalence_core::Analyzer;
use tokio::sync::mpsc;

use crate::config::EngineConfig;
use crate::error::ServiceError;
use crate::events::{now_ms, ConfigChanged, FeaturesReady, PanelFailed, PanelReady};
use crate::session::{replay, sha256_hex, Job, Session};
use crate::store::{list_sessions, SessionDir};

/// Everything derived from one configuration. Jobs take a snapshot when
/// they start, so a reload only affects jobs started after it.
pub struct Runtime {
    pub config: EngineConfig,
    pub hash: String,
    pub analyzer: Analyzer,
    pub synthesizer: Synthesizer,
}

impl Runtime {
    pub fn build(config: EngineConfig) -> Result<Self, ServiceError> {
        config.validate()?;
        let lexicons = Lexicons::load(&config.lexicons).map_err(|e| ServiceError::InvalidConfig(e.to_string()))?;
        let synthesizer =
            Synthesizer::from_config(&config.backend).map_err(|e| ServiceError::InvalidConfig(e.to_string()))?;
        Ok(Runtime {
            hash: config.hash(),
            analyzer: Analyzer::new(lexicons),
            synthesizer,
            config,
        })
    }

    /// Reuse the old synthesizer when the backend section is unchanged so
    /// its in-flight limit stays shared.
    fn rebuild(&self, config: EngineConfig) -> Result<Self, ServiceError> {
        config.validate()?;
        let lexicons = Lexicons::load(&config.lexicons).map_err(|e| ServiceError::InvalidConfig(e.to_string()))?;
        let synthesizer = if config.backend == self.config.backend {
            self.synthesizer.clone()
        } else {
            Synthesizer::from_config(&config.backend).map_err(|e| ServiceError::InvalidConfig(e.to_string()))?
        };
        Ok(Runtime {
            hash: config.hash(),
            analyzer: Analyzer::new(lexicons),
            synthesizer,
            config,
        })
    }
}

pub struct App {
    runtime: RwLock<Arc<Runtime>>,
    sessions: RwLock<HashMap<String, Arc<Session>>>,
    data_dir: PathBuf,
    me: Weak<App>,
}

impl App {
    /// Load the configuration, rebuild every session found under the data
    /// directory and resume their unfinished utterances.
    pub fn start(config: EngineConfig) -> Result<Arc<App>, ServiceError> {
        let runtime = Runtime::build(config)?;
        let data_dir = runtime.config.service.data_dir.clone();
        std::fs::create_dir_all(crate::store::sessions_dir(&data_dir))?;
        let app = Arc::new_cyclic(|me| App {
            runtime: RwLock::new(Arc::new(runtime)),
            sessions: RwLock::new(HashMap::new()),
            data_dir,
            me: me.clone(),
        });
        for id in list_sessions(&app.data_dir)? {
            if let Err(e) = app.restore(&id) {
                tracing::error!(session = %id, error = %e, "session not restored");
            }
        }
        Ok(app)
    }

    pub fn runtime(&self) -> Arc<Runtime> {
        self.runtime.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    pub fn data_dir(&self) -> &std::path::Path {
        &self.data_dir
    }

    fn new_scroll(&self) -> Result<Scroll, ServiceError> {
        let cfg = &self.runtime().config;
        Ok(Scroll::new(cfg.mapping.panel_width_px, cfg.mapping.panel_height_px, cfg.scroll)?)
    }

    fn restore(&self, id: &str) -> Result<(), ServiceError> {
        let dir = SessionDir::new(&self.data_dir, id);
        let log = dir.read_log()?;
        let cfg = self.runtime().config.clone();
        let replayed = replay(&log, &dir, cfg.mapping.panel_width_px, cfg.mapping.panel_height_px, cfg.scroll)?;
        let (session, rx) = Session::new(
            id.to_string(),
            dir,
            log,
            replayed.scroll,
            replayed.utterances,
            cfg.service.event_buffer,
        )?;
        for job in replayed.pending {
            session.enqueue(job)?;
        }
        tracing::info!(session = %id, last_seq = session.lock().last_seq(), "session restored");
        self.register(session, rx);
        Ok(())
    }

    fn register(&self, session: Session, rx: mpsc::UnboundedReceiver<Job>) -> Arc<Session> {
        let session = Arc::new(session);
        self.sessions
            .write()
            .unwrap_or_else(|e| e.into_inner())
            .insert(session.id.clone(), session.clone());
        tokio::spawn(worker(self.me.clone(), session.clone(), rx));
        session
    }

    pub fn create_session(&self) -> Result<Arc<Session>, ServiceError> {
        let id = uuid::Uuid::new_v4().to_string();
        let dir = SessionDir::new(&self.data_dir, &id);
        dir.create()?;
        let (session, rx) = Session::new(
            id,
            dir,
            Vec::new(),
            self.new_scroll()?,
            0,
            self.runtime().config.service.event_buffer,
        )?;
        Ok(self.register(session, rx))
    }

    pub fn session(&self, id: &str) -> Result<Arc<Session>, ServiceError> {
        self.sessions
            .read()
            .unwrap_or_else(|e| e.into_inner())
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    pub fn session_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.read().unwrap_or_else(|e| e.into_inner()).keys().cloned().collect();
        ids.sort();
        ids
    }

    pub fn submit_utterance(&self, session_id: &str, text: String, seed: Option<u64>) -> Result<String, ServiceError> {
        let session = self.session(session_id)?;
        if text.trim().is_empty() {
            return Err(ServiceError::EmptyInput);
        }
        let max = self.runtime().config.service.max_text_chars;
        let len = text.chars().count();
        if len > max {
            return Err(ServiceError::TextTooLong { len, max });
        }
        let utterance_id = uuid::Uuid::new_v4().to_string();
        session.submit(utterance_id.clone(), text, seed)?;
        Ok(utterance_id)
    }

    pub fn regenerate(&self, session_id: &str, index: u64, seed: Option<u64>) -> Result<u64, ServiceError> {
        let session = self.session(session_id)?;
        {
            let state = session.lock();
            let panel = state.scroll.get(index).ok_or(ServiceError::UnknownPanel(index))?;
            if panel.is_missing() {
                return Err(ServiceError::PanelUnavailable(index));
            }
        }
        let seed = seed.unwrap_or_else(rand::random);
        session.enqueue(Job::Regenerate { index, seed })?;
        Ok(seed)
    }

    /// Swap in a new configuration for future jobs and record its hash in
    /// every session.
    pub fn update_config(&self, config: EngineConfig) -> Result<String, ServiceError> {
        let current = self.runtime();
        if let Some(section) = current.config.restart_only_diff(&config) {
            return Err(ServiceError::RestartRequired(section));
        }
        let next = Arc::new(current.rebuild(config)?);
        let hash = next.hash.clone();
        *self.runtime.write().unwrap_or_else(|e| e.into_inner()) = next;
        let sessions: Vec<Arc<Session>> =
            self.sessions.read().unwrap_or_else(|e| e.into_inner()).values().cloned().collect();
        for session in sessions {
            if let Err(e) = session.emit(&ConfigChanged { hash: hash.clone() }) {
                tracing::error!(session = %session.id, error = %e, "config_changed not recorded");
            }
        }
        tracing::info!(%hash, "configuration updated");
        Ok(hash)
    }
}

/// Runs one session's jobs strictly in order. Exits when the session is
/// dropped or the app is gone.
async fn worker(app: Weak<App>, session: Arc<Session>, mut rx: mpsc::UnboundedReceiver<Job>) {
    while let Some(job) = rx.recv().await {
        let Some(app) = app.upgrade() else { return };
        let runtime = app.runtime();
        drop(app);
        let outcome = match job {
            Job::Utterance {
                utterance_id,
                text,
                seed,
                features_logged,
            } => run_utterance(&runtime, &session, &utterance_id, &text, seed, features_logged).await,
            Job::Regenerate { index, seed } => run_regenerate(&runtime, &session, index, seed).await,
        };
        if let Err(e) = outcome {
            tracing::error!(session = %session.id, error = %e, "job could not be recorded");
        }
    }
}

fn result_url(session_id: &str, index: u64) -> String {
    format!("/v1/sessions/{session_id}/panels/{index}")
}

async fn run_utterance(
    runtime: &Runtime,
    session: &Session,
    utterance_id: &str,
    text: &str,
    seed: u64,
    features_logged: bool,
) -> Result<(), ServiceError> {
    let failed = |e: PipelineError| PanelFailed {
        utterance_id: Some(utterance_id.to_string()),
        index: None,
        error: e.kind().to_string(),
        message: e.to_string(),
    };

    let analysis = match runtime.analyzer.analyze(text) {
        Ok(a) => a,
        Err(e) => return session.emit(&failed(e.into())).map(drop),
    };
    if !features_logged {
        session.emit(&FeaturesReady {
            utterance_id: utterance_id.to_string(),
            features: analysis.features.clone(),
        })?;
    }

    let (mapping, prompt_cfg) = (runtime.config.mapping.clone(), runtime.config.prompt.clone());
    let composed = tokio::task::spawn_blocking(move || compose(&analysis, &mapping, &prompt_cfg, seed))
        .await
        .map_err(|e| ServiceError::Internal(e.to_string()))?;
    let composition = match composed {
        Ok(c) => c,
        Err(e) => return session.emit(&failed(e)).map(drop),
    };
    let result = match runtime.synthesizer.synthesize(&composition.request()).await {
        Ok(r) => r,
        Err(e) => return session.emit(&failed(e.into())).map(drop),
    };

    // The worker is the only writer of new panels, so the index read here
    // is still free when the panel is appended below.
    let index = session.lock().scroll.next_index();
    session.dir.write_base(index, &composition.base_png)?;
    session.dir.write_result(index, &result.image)?;
    let payload = PanelReady {
        utterance_id: utterance_id.to_string(),
        index,
        result_url: result_url(&session.id, index),
        result_sha256: sha256_hex(&result.image),
        prompt: composition.prompt.clone(),
        seed_used: result.seed_used,
        backend_id: result.backend_id.clone(),
        duration_ms: result.duration_ms,
        regenerated: false,
    };
    let panel = Panel::new(
        index,
        utterance_id,
        composition.base_png,
        composition.prompt,
        result.image,
        now_ms(),
    )?;
    let mut state = session.lock();
    state.scroll.append_panel(panel)?;
    session.emit_locked(&mut state, &payload)?;
    Ok(())
}

async fn run_regenerate(runtime: &Runtime, session: &Session, index: u64, seed: u64) -> Result<(), ServiceError> {
    let snapshot = {
        let state = session.lock();
        state
            .scroll
            .get(index)
            .filter(|p| !p.is_missing())
            .map(|p| (p.utterance_id.clone(), p.base_png.clone(), p.prompt.clone()))
    };
    let Some((utterance_id, base_png, mut prompt)) = snapshot else {
        return session
            .emit(&PanelFailed {
                utterance_id: None,
                index: Some(index),
                error: "UnknownPanel".into(),
                message: format!("panel {index} is no longer on the scroll"),
            })
            .map(drop);
    };
    prompt.seed = seed;
    let (w, h) = {
        let state = session.lock();
        (state.scroll.panel_width(), state.scroll.panel_height())
    };
    let result = match runtime.synthesizer.synthesize(&request_for(&base_png, &prompt, w, h)).await {
        Ok(r) => r,
        Err(e) => {
            return session
                .emit(&PanelFailed {
                    utterance_id: Some(utterance_id),
                    index: Some(index),
                    error: e.kind().to_string(),
                    message: e.to_string(),
                })
                .map(drop)
        }
    };
    session.dir.write_result(index, &result.image)?;
    let payload = PanelReady {
        utterance_id,
        index,
        result_url: result_url(&session.id, index),
        result_sha256: sha256_hex(&result.image),
        prompt: prompt.clone(),
        seed_used: result.seed_used,
        backend_id: result.backend_id.clone(),
        duration_ms: result.duration_ms,
        regenerated: true,
    };
    let mut state = session.lock();
    state.scroll.replace_result(index, result.image, prompt)?;
    session.emit_locked(&mut state, &payload)?;
    Ok(())
}
