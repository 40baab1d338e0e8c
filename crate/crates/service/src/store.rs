//! On-disk layout of a session.
//!
//! ```text
//! {data_dir}/sessions/{session_id}/events.jsonl
//! {data_dir}/sessions/{session_id}/panels/{index}.png
//! {data_dir}/sessions/{session_id}/panels/{index}.base.png
//! ```

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::ServiceError;
use crate::events::SessionEvent;

pub const EVENTS_FILE: &str = "events.jsonl";

pub fn sessions_dir(data_dir: &Path) -> PathBuf {
    data_dir.join("sessions")
}

#[derive(Debug, Clone)]
pub struct SessionDir {
    root: PathBuf,
}

impl SessionDir {
    pub fn new(data_dir: &Path, session_id: &str) -> Self {
        SessionDir {
            root: sessions_dir(data_dir).join(session_id),
        }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn events_path(&self) -> PathBuf {
        self.root.join(EVENTS_FILE)
    }

    pub fn result_path(&self, index: u64) -> PathBuf {
        self.root.join("panels").join(format!("{index}.png"))
    }

    pub fn base_path(&self, index: u64) -> PathBuf {
        self.root.join("panels").join(format!("{index}.base.png"))
    }

    /// Create the directories and an empty log.
    pub fn create(&self) -> io::Result<()> {
        fs::create_dir_all(self.root.join("panels"))?;
        OpenOptions::new().create(true).append(true).open(self.events_path())?;
        Ok(())
    }

    pub fn open_log(&self) -> io::Result<EventWriter> {
        let file = OpenOptions::new().create(true).append(true).open(self.events_path())?;
        Ok(EventWriter { file })
    }

    pub fn write_result(&self, index: u64, png: &[u8]) -> io::Result<()> {
        write_atomic(&self.result_path(index), png)
    }

    pub fn write_base(&self, index: u64, png: &[u8]) -> io::Result<()> {
        write_atomic(&self.base_path(index), png)
    }

    /// Read the log back.
    ///
    /// A final line without its newline is what a crash mid-append leaves
    /// behind; it is dropped and the file is cut back to the last complete
    /// event so later appends start on a fresh line. Any other unreadable
    /// line, or a break in the seq numbering, is an error.
    pub fn read_log(&self) -> Result<Vec<SessionEvent>, ServiceError> {
        let path = self.events_path();
        let corrupt = |message: String| ServiceError::CorruptLog {
            path: path.display().to_string(),
            message,
        };
        let mut reader = BufReader::new(File::open(&path)?);
        let mut events = Vec::new();
        let mut good_len: u64 = 0;
        let mut line = String::new();
        let mut torn = false;
        loop {
            line.clear();
            let n = reader.read_line(&mut line)?;
            if n == 0 {
                break;
            }
            let complete = line.ends_with('\n');
            if line.trim().is_empty() && complete {
                good_len += n as u64;
                continue;
            }
            match serde_json::from_str::<SessionEvent>(line.trim_end()) {
                Ok(ev) if complete => {
                    let want = events.len() as u64 + 1;
                    if ev.seq != want {
                        return Err(corrupt(format!("expected seq {want}, found {}", ev.seq)));
                    }
                    events.push(ev);
                    good_len += n as u64;
                }
                // An incomplete final line is dropped even if it happens to parse:
                // the writer had not finished it.
                _ if !complete => {
                    torn = true;
                    break;
                }
                Err(e) => return Err(corrupt(format!("line {}: {e}", events.len() + 1))),
                Ok(_) => unreachable!(),
            }
        }
        if torn {
            tracing::warn!(path = %path.display(), "dropping torn final log line");
            OpenOptions::new().write(true).open(&path)?.set_len(good_len)?;
        }
        Ok(events)
    }
}

pub struct EventWriter {
    file: File,
}

impl EventWriter {
    /// Write one event as a single line with a single `write` call.
    pub fn append(&mut self, event: &SessionEvent) -> io::Result<()> {
        let mut line = serde_json::to_vec(event).map_err(io::Error::other)?;
        line.push(b'\n');
        self.file.write_all(&line)?;
        self.file.flush()
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

/// Session ids found under `data_dir`, sorted.
pub fn list_sessions(data_dir: &Path) -> io::Result<Vec<String>> {
    let dir = sessions_dir(data_dir);
    if !dir.exists() {
        return Ok(Vec::new());
    }
    let mut ids = Vec::new();
    for entry in fs::read_dir(dir)? {
        let entry = entry?;
        if entry.file_type()?.is_dir() && entry.path().join(EVENTS_FILE).exists() {
            if let Some(name) = entry.file_name().to_str() {
                ids.push(name.to_string());
            }
        }
    }
    ids.sort();
    Ok(ids)
}
