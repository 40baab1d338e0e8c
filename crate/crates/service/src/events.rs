//! Session events and their payloads.
//!
//! Every event a session emits is appended to its log before it is
//! broadcast, so the log alone is enough to rebuild the session.

use equivalence_core::{LanguageFeatures, PromptSpec};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    UtteranceReceived,
    FeaturesReady,
    PanelReady,
    PanelFailed,
    ConfigChanged,
    PanelCurated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionEvent {
    /// Starts at 1 and increases by exactly 1 per event.
    pub seq: u64,
    pub kind: EventKind,
    pub payload: Value,
    /// Milliseconds since the Unix epoch.
    pub at: u64,
}

impl SessionEvent {
    pub fn payload_as<T: DeserializeOwned>(&self) -> Result<T, serde_json::Error> {
        serde_json::from_value(self.payload.clone())
    }
}

pub trait Payload: Serialize {
    const KIND: EventKind;

    fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("payload serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtteranceReceived {
    pub utterance_id: String,
    pub text: String,
    pub seed: u64,
    /// Position of this utterance within the session, from 0.
    pub ordinal: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturesReady {
    pub utterance_id: String,
    pub features: LanguageFeatures,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelReady {
    pub utterance_id: String,
    pub index: u64,
    /// API path of the stylized panel image.
    pub result_url: String,
    pub result_sha256: String,
    pub prompt: PromptSpec,
    pub seed_used: u64,
    pub backend_id: String,
    pub duration_ms: u64,
    /// True when this replaces the result of an existing panel.
    pub regenerated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelFailed {
    pub utterance_id: Option<String>,
    /// Set when a regeneration failed.
    pub index: Option<u64>,
    pub error: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigChanged {
    pub hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelCurated {
    pub index: u64,
    pub curated: bool,
}

impl Payload for UtteranceReceived {
    const KIND: EventKind = EventKind::UtteranceReceived;
}
impl Payload for FeaturesReady {
    const KIND: EventKind = EventKind::FeaturesReady;
}
impl Payload for PanelReady {
    const KIND: EventKind = EventKind::PanelReady;
}
impl Payload for PanelFailed {
    const KIND: EventKind = EventKind::PanelFailed;
}
impl Payload for ConfigChanged {
    const KIND: EventKind = EventKind::ConfigChanged;
}
impl Payload for PanelCurated {
    const KIND: EventKind = EventKind::PanelCurated;
}

pub fn now_ms() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .unwrap_or_default()
        .as_millis() as u64
}
