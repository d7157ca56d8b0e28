use std::fs::{self, File, OpenOptions};
use std::io::{Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use super::ServiceError;
use crate::eval::{effective_events, fuse_votes, read_feedback_log, FeedbackEvent, QrelSet};

/// Append-only JSON-lines feedback log with an in-memory copy. Writes are
/// serialized, flushed and synced before they are acknowledged.
#[derive(Debug)]
pub struct FeedbackStore {
    path: PathBuf,
    inner: Mutex<Inner>,
}

#[derive(Debug)]
struct Inner {
    file: File,
    events: Vec<FeedbackEvent>,
    last_timestamp: i64,
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> ServiceError + '_ {
    move |source| ServiceError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn now_millis() -> i64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as i64)
}

impl FeedbackStore {
    /// Opens or creates the log and replays it. A torn final line left by an
    /// interrupted write is cut off.
    pub fn open(path: &Path) -> Result<Self, ServiceError> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent).map_err(io(path))?;
        }
        let bytes = match fs::read(path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(io(path)(e)),
        };
        let complete = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        let events = read_feedback_log(&bytes[..complete])
            .map_err(|e| ServiceError::Feedback(format!("{}: {e}", path.display())))?;
        let mut file = OpenOptions::new()
            .create(true)
            .read(true)
            .write(true)
            .truncate(false)
            .open(path)
            .map_err(io(path))?;
        if complete < bytes.len() {
            tracing::warn!(path = %path.display(), "dropping torn final line of feedback log");
            file.set_len(complete as u64).map_err(io(path))?;
        }
        file.seek(SeekFrom::End(0)).map_err(io(path))?;
        let last_timestamp = events.iter().map(|e| e.timestamp).max().unwrap_or(0);
        Ok(Self {
            path: path.to_path_buf(),
            inner: Mutex::new(Inner {
                file,
                events,
                last_timestamp,
            }),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Stamps `event` with a strictly increasing server time and appends it.
    pub fn append(&self, mut event: FeedbackEvent) -> Result<FeedbackEvent, ServiceError> {
        let mut inner = self.inner.lock().expect("feedback lock poisoned");
        event.timestamp = now_millis().max(inner.last_timestamp + 1);
        let mut line = serde_json::to_string(&event).expect("event serializes");
        line.push('\n');
        let path = self.path.as_path();
        inner.file.write_all(line.as_bytes()).map_err(io(path))?;
        inner.file.flush().map_err(io(path))?;
        inner.file.sync_data().map_err(io(path))?;
        inner.last_timestamp = event.timestamp;
        inner.events.push(event.clone());
        Ok(event)
    }

    pub fn events(&self) -> Vec<FeedbackEvent> {
        self.inner.lock().expect("feedback lock poisoned").events.clone()
    }

    /// Latest vote per (assessor, query, record, level).
    pub fn effective(&self) -> Vec<FeedbackEvent> {
        effective_events(&self.inner.lock().expect("feedback lock poisoned").events)
    }

    pub fn qrels(&self) -> QrelSet {
        fuse_votes(&self.inner.lock().expect("feedback lock poisoned").events)
    }

    pub fn sync(&self) -> Result<(), ServiceError> {
        let inner = self.inner.lock().expect("feedback lock poisoned");
        inner.file.sync_all().map_err(io(&self.path))
    }
}
