//! In-memory session state and its reconstruction from the event log.

use std::collections::HashMap;
use std::sync::{Mutex, MutexGuard};

use equivalence_core::scroll::{Panel, Scroll, ScrollConfig};
use equivalence_core::PromptSpec;
use serde::Serialize;
use sha2::{Digest, Sha256};
use tokio::sync::{broadcast, mpsc};

use crate::error::ServiceError;
use crate::events::{
    now_ms, EventKind, PanelCurated, PanelFailed, PanelReady, Payload, SessionEvent, UtteranceReceived,
};
use crate::store::{EventWriter, SessionDir};

/// Work for the session's pipeline worker.
#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Utterance {
        utterance_id: String,
        text: String,
        seed: u64,
        /// `features_ready` was already logged before a restart.
        features_logged: bool,
    },
    Regenerate { index: u64, seed: u64 },
}

pub struct Session {
    pub id: String,
    pub dir: SessionDir,
    state: Mutex<SessionState>,
    events: broadcast::Sender<SessionEvent>,
    jobs: mpsc::UnboundedSender<Job>,
}

pub struct SessionState {
    log: Vec<SessionEvent>,
    writer: EventWriter,
    pub scroll: Scroll,
    utterances: u64,
}

impl SessionState {
    pub fn last_seq(&self) -> u64 {
        self.log.len() as u64
    }

    pub fn utterance_count(&self) -> u64 {
        self.utterances
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelSummary {
    pub index: u64,
    pub utterance_id: String,
    pub curated: bool,
    pub missing: bool,
    pub seed: u64,
    pub result_sha256: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionSummary {
    pub session_id: String,
    pub last_seq: u64,
    pub total_width: u64,
    pub panel_width: u32,
    pub panel_height: u32,
    pub overlap_px: u32,
    pub panels: Vec<PanelSummary>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Session {
    pub fn new(
        id: String,
        dir: SessionDir,
        log: Vec<SessionEvent>,
        scroll: Scroll,
        utterances: u64,
        event_buffer: usize,
    ) -> Result<(Self, mpsc::UnboundedReceiver<Job>), ServiceError> {
        let writer = dir.open_log()?;
        let (events, _) = broadcast::channel(event_buffer);
        let (jobs, rx) = mpsc::unbounded_channel();
        let session = Session {
            id,
            dir,
            state: Mutex::new(SessionState {
                log,
                writer,
                scroll,
                utterances,
            }),
            events,
            jobs,
        };
        Ok((session, rx))
    }

    pub fn lock(&self) -> MutexGuard<'_, SessionState> {
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Append to the log, then broadcast. Holding the state lock across
    /// both keeps subscribers in seq order.
    pub fn emit_locked<P: Payload>(&self, state: &mut SessionState, payload: &P) -> Result<SessionEvent, ServiceError> {
        let event = SessionEvent {
            seq: state.last_seq() + 1,
            kind: P::KIND,
            payload: payload.to_value(),
            at: now_ms(),
        };
        state.writer.append(&event)?;
        state.log.push(event.clone());
        // No receivers is fine; lagging receivers find out on their side.
        let _ = self.events.send(event.clone());
        Ok(event)
    }

    pub fn emit<P: Payload>(&self, payload: &P) -> Result<SessionEvent, ServiceError> {
        let mut state = self.lock();
        self.emit_locked(&mut state, payload)
    }

    pub fn enqueue(&self, job: Job) -> Result<(), ServiceError> {
        self.jobs
            .send(job)
            .map_err(|_| ServiceError::Internal("session worker stopped".into()))
    }

    /// Logged events with `seq >= from_seq` plus a receiver for everything
    /// after them, taken atomically.
    pub fn subscribe(&self, from_seq: u64) -> (Vec<SessionEvent>, broadcast::Receiver<SessionEvent>) {
        let state = self.lock();
        let rx = self.events.subscribe();
        let start = from_seq.saturating_sub(1).min(state.log.len() as u64) as usize;
        (state.log[start..].to_vec(), rx)
    }

    pub fn events_since(&self, from_seq: u64) -> Vec<SessionEvent> {
        self.subscribe(from_seq).0
    }

    /// Record an utterance and queue it, assigning the default seed from
    /// its ordinal when none is given.
    pub fn submit(&self, utterance_id: String, text: String, seed: Option<u64>) -> Result<SessionEvent, ServiceError> {
        let mut state = self.lock();
        let ordinal = state.utterances;
        let seed = seed.unwrap_or_else(|| equivalence_core::pipeline::utterance_seed(&text, ordinal));
        let payload = UtteranceReceived {
            utterance_id: utterance_id.clone(),
            text: text.clone(),
            seed,
            ordinal,
        };
        let event = self.emit_locked(&mut state, &payload)?;
        state.utterances += 1;
        self.enqueue(Job::Utterance {
            utterance_id,
            text,
            seed,
            features_logged: false,
        })?;
        Ok(event)
    }

    pub fn set_curated(&self, index: u64, curated: bool) -> Result<(bool, u64), ServiceError> {
        let mut state = self.lock();
        state.scroll.set_curated(index, curated)?;
        let effective = state.scroll.get(index).map(|p| p.curated).unwrap_or(false);
        self.emit_locked(
            &mut state,
            &PanelCurated {
                index,
                curated: effective,
            },
        )?;
        Ok((effective, state.scroll.total_width()))
    }

    pub fn summary(&self) -> SessionSummary {
        let state = self.lock();
        let scroll = &state.scroll;
        SessionSummary {
            session_id: self.id.clone(),
            last_seq: state.last_seq(),
            total_width: scroll.total_width(),
            panel_width: scroll.panel_width(),
            panel_height: scroll.panel_height(),
            overlap_px: scroll.overlap_px(),
            panels: scroll
                .panels()
                .map(|p| PanelSummary {
                    index: p.index,
                    utterance_id: p.utterance_id.clone(),
                    curated: p.curated,
                    missing: p.is_missing(),
                    seed: p.prompt.seed,
                    result_sha256: (!p.is_missing()).then(|| sha256_hex(&p.result_png)),
                })
                .collect(),
        }
    }
}

/// What replaying a log yields.
#[derive(Debug)]
pub struct Replayed {
    pub scroll: Scroll,
    pub utterances: u64,
    /// Utterances with no `panel_ready` or `panel_failed`, in log order.
    pub pending: Vec<Job>,
}

struct PanelRecord {
    utterance_id: String,
    prompt: PromptSpec,
    created_at: u64,
    curated: bool,
}

/// Rebuild the scroll from a log and the panel files beside it.
///
/// Panels are appended in log order through the same ring as live
/// operation, so eviction replays identically. A panel whose image file is
/// missing or unreadable is kept as an excluded placeholder.
pub fn replay(
    events: &[SessionEvent],
    dir: &SessionDir,
    panel_width: u32,
    panel_height: u32,
    scroll_config: ScrollConfig,
) -> Result<Replayed, ServiceError> {
    let bad = |ev: &SessionEvent, e: serde_json::Error| ServiceError::CorruptLog {
        path: dir.events_path().display().to_string(),
        message: format!("seq {}: {e}", ev.seq),
    };

    let mut order: Vec<u64> = Vec::new();
    let mut panels: HashMap<u64, PanelRecord> = HashMap::new();
    let mut open: Vec<(String, String, u64, bool)> = Vec::new();
    let mut utterances = 0u64;

    for ev in events {
        match ev.kind {
            EventKind::UtteranceReceived => {
                let p: UtteranceReceived = ev.payload_as().map_err(|e| bad(ev, e))?;
                utterances += 1;
                open.push((p.utterance_id, p.text, p.seed, false));
            }
            EventKind::FeaturesReady => {
                let id = ev.payload.get("utterance_id").and_then(|v| v.as_str()).unwrap_or_default();
                if let Some(entry) = open.iter_mut().find(|o| o.0 == id) {
                    entry.3 = true;
                }
            }
            EventKind::PanelReady => {
                let p: PanelReady = ev.payload_as().map_err(|e| bad(ev, e))?;
                if p.regenerated {
                    if let Some(rec) = panels.get_mut(&p.index) {
                        rec.prompt = p.prompt;
                    }
                } else {
                    open.retain(|o| o.0 != p.utterance_id);
                    order.push(p.index);
                    panels.insert(
                        p.index,
                        PanelRecord {
                            utterance_id: p.utterance_id,
                            prompt: p.prompt,
                            created_at: ev.at,
                            curated: true,
                        },
                    );
                }
            }
            EventKind::PanelFailed => {
                let p: PanelFailed = ev.payload_as().map_err(|e| bad(ev, e))?;
                if p.index.is_none() {
                    if let Some(id) = p.utterance_id {
                        open.retain(|o| o.0 != id);
                    }
                }
            }
            EventKind::PanelCurated => {
                let p: PanelCurated = ev.payload_as().map_err(|e| bad(ev, e))?;
                if let Some(rec) = panels.get_mut(&p.index) {
                    rec.curated = p.curated;
                }
            }
            EventKind::ConfigChanged => {}
        }
    }

    let mut scroll = Scroll::new(panel_width, panel_height, scroll_config)?;
    // Only the last `max_panels` survive the ring; skip reading the rest.
    let keep_from = order.len().saturating_sub(scroll_config.max_panels);
    for &index in &order[keep_from..] {
        let rec = panels.remove(&index).expect("recorded above");
        let panel = match (std::fs::read(dir.result_path(index)), std::fs::read(dir.base_path(index))) {
            (Ok(result), Ok(base)) => Panel::new(index, &rec.utterance_id, base, rec.prompt.clone(), result, rec.created_at)
                .ok()
                .filter(|p| (p.result.width(), p.result.height()) == (panel_width, panel_height)),
            _ => None,
        };
        let panel = match panel {
            Some(mut p) => {
                p.curated = rec.curated;
                p
            }
            None => {
                tracing::warn!(index, dir = %dir.root().display(), "panel image missing, marking excluded");
                Panel::missing(index, rec.utterance_id, rec.prompt, rec.created_at)
            }
        };
        scroll.append_panel(panel)?;
    }

    let pending = open
        .into_iter()
        .map(|(utterance_id, text, seed, features_logged)| Job::Utterance {
            utterance_id,
            text,
            seed,
            features_logged,
        })
        .collect();
    Ok(Replayed {
        scroll,
        utterances,
        pending,
    })
}
