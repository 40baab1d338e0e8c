//! Engine configuration as loaded from JSON.

use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use equivalence_core::lang::LexiconPaths;
use equivalence_core::scroll::ScrollConfig;
use equivalence_core::synthesis::BackendConfig;
use equivalence_core::{MappingConfig, PromptConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::ServiceError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub bind: SocketAddr,
    pub data_dir: PathBuf,
    /// Events buffered per subscriber before it is disconnected.
    pub event_buffer: usize,
    pub max_text_chars: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            bind: SocketAddr::from(([127, 0, 0, 1], 8080)),
            data_dir: PathBuf::from("data"),
            event_buffer: 1024,
            max_text_chars: 2000,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub mapping: MappingConfig,
    pub prompt: PromptConfig,
    pub backend: BackendConfig,
    pub scroll: ScrollConfig,
    pub service: ServiceConfig,
    pub lexicons: LexiconPaths,
}

impl EngineConfig {
    pub fn from_json(text: &str) -> Result<Self, ServiceError> {
        let config: EngineConfig =
            serde_json::from_str(text).map_err(|e| ServiceError::InvalidConfig(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ServiceError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ServiceError::InvalidConfig(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Check every section, including that the scroll can hold panels of
    /// the configured size.
    pub fn validate(&self) -> Result<(), ServiceError> {
        let invalid = |e: equivalence_core::config::ConfigError| ServiceError::InvalidConfig(e.0);
        self.mapping.validate().map_err(invalid)?;
        self.prompt.validate().map_err(invalid)?;
        self.backend.validate().map_err(invalid)?;
        equivalence_core::scroll::Scroll::new(self.mapping.panel_width_px, self.mapping.panel_height_px, self.scroll)
            .map_err(|e| ServiceError::InvalidConfig(e.to_string()))?;
        if self.service.event_buffer == 0 {
            return Err(ServiceError::InvalidConfig("service.event_buffer must be at least 1".into()));
        }
        if self.service.max_text_chars == 0 {
            return Err(ServiceError::InvalidConfig("service.max_text_chars must be at least 1".into()));
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(bytes))
    }

    /// Sections that only take effect at startup.
    pub fn restart_only_diff(&self, other: &EngineConfig) -> Option<&'static str> {
        if self.mapping.panel_width_px != other.mapping.panel_width_px
            || self.mapping.panel_height_px != other.mapping.panel_height_px
        {
            Some("mapping.panel_width_px/panel_height_px")
        } else if self.scroll != other.scroll {
            Some("scroll")
        } else if self.service != other.service {
            Some("service")
        } else {
            None
        }
    }
}
