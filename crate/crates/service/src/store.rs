//! Session registry with one transcript file per session.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use tokio::sync::broadcast;
use uuid::Uuid;

use cliquefactor::Transcript;

use crate::session::{ChoiceRequest, Progress, Session, SessionConfig, SessionView};
use crate::ServiceError;

const META_SUFFIX: &str = ".session.json";
const TRANSCRIPT_SUFFIX: &str = ".transcript.json";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SessionMeta {
    id: String,
    config: SessionConfig,
    created: u64,
}

pub struct Slot {
    session: Mutex<Session>,
    events: broadcast::Sender<Progress>,
}

impl Slot {
    fn new(session: Session) -> Arc<Self> {
        let (events, _) = broadcast::channel(64);
        Arc::new(Slot {
            session: Mutex::new(session),
            events,
        })
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Session> {
        self.session.lock().unwrap_or_else(|p| p.into_inner())
    }

    /// Subscribes to future events and returns the current progress, taken
    /// under the session lock so no event is missed in between.
    pub fn subscribe(&self) -> (Progress, broadcast::Receiver<Progress>) {
        let s = self.lock();
        (s.progress(), self.events.subscribe())
    }
}

/// A session that could not be reloaded from disk.
#[derive(Debug, Clone)]
pub struct LoadIssue {
    pub path: PathBuf,
    pub reason: String,
}

pub struct SessionStore {
    dir: Option<PathBuf>,
    sessions: RwLock<HashMap<String, Arc<Slot>>>,
    issues: Vec<LoadIssue>,
}

fn now_secs() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn write_atomic(path: &Path, text: &str) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

fn valid_id(id: &str) -> bool {
    Uuid::parse_str(id).is_ok()
}

impl SessionStore {
    /// A store that keeps nothing on disk.
    pub fn in_memory() -> Self {
        SessionStore {
            dir: None,
            sessions: RwLock::new(HashMap::new()),
            issues: Vec::new(),
        }
    }

    /// Opens `dir`, creating it if needed, and replays every stored session.
    /// Sessions that fail to replay are skipped and listed in [`issues`].
    ///
    /// [`issues`]: SessionStore::issues
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, ServiceError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let mut sessions = HashMap::new();
        let mut issues = Vec::new();
        let mut entries: Vec<PathBuf> = fs::read_dir(&dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.ends_with(META_SUFFIX))
            })
            .collect();
        entries.sort();
        for path in entries {
            match load_one(&dir, &path) {
                Ok(s) => {
                    sessions.insert(s.id().to_string(), Slot::new(s));
                }
                Err(e) => issues.push(LoadIssue {
                    path,
                    reason: e.to_string(),
                }),
            }
        }
        Ok(SessionStore {
            dir: Some(dir),
            sessions: RwLock::new(sessions),
            issues,
        })
    }

    pub fn issues(&self) -> &[LoadIssue] {
        &self.issues
    }

    pub fn len(&self) -> usize {
        self.sessions.read().unwrap_or_else(|p| p.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self
            .sessions
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .keys()
            .cloned()
            .collect();
        ids.sort();
        ids
    }

    pub fn slot(&self, id: &str) -> Result<Arc<Slot>, ServiceError> {
        self.sessions
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::NotFound(id.to_string()))
    }

    fn transcript_path(&self, id: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{id}{TRANSCRIPT_SUFFIX}")))
    }

    pub fn create(&self, config: SessionConfig) -> Result<(String, Progress), ServiceError> {
        let uuid = Uuid::new_v4();
        let id = uuid.to_string();
        let fallback_seed = uuid.as_u64_pair().1;
        let created = now_secs();
        let session = Session::start(id.clone(), config.clone(), fallback_seed, created)?;
        if let Some(dir) = &self.dir {
            let meta = SessionMeta {
                id: id.clone(),
                config,
                created,
            };
            let text = serde_json::to_string(&meta).expect("meta serializes") + "\n";
            write_atomic(
                self.transcript_path(&id).as_deref().expect("dir is set"),
                &session.transcript().to_text(),
            )?;
            write_atomic(&dir.join(format!("{id}{META_SUFFIX}")), &text)?;
        }
        let progress = session.progress();
        self.sessions
            .write()
            .unwrap_or_else(|p| p.into_inner())
            .insert(id.clone(), Slot::new(session));
        Ok((id, progress))
    }

    pub fn view(&self, id: &str) -> Result<SessionView, ServiceError> {
        Ok(self.slot(id)?.lock().view())
    }

    pub fn transcript(&self, id: &str) -> Result<Transcript, ServiceError> {
        Ok(self.slot(id)?.lock().transcript().clone())
    }

    /// Applies one choice. The transcript file is rewritten before the
    /// in-memory session moves, so a failed write leaves both unchanged.
    pub fn submit(&self, id: &str, req: &ChoiceRequest) -> Result<Progress, ServiceError> {
        let slot = self.slot(id)?;
        let mut s = slot.lock();
        let (offer, edge) = s.check_choice(req)?;
        if let Some(path) = self.transcript_path(id) {
            write_atomic(&path, &s.transcript_with(offer, edge).to_text())?;
        }
        let progress = s.apply(edge)?;
        // No receivers is fine.
        let _ = slot.events.send(progress.clone());
        Ok(progress)
    }
}

fn load_one(dir: &Path, meta_path: &Path) -> Result<Session, ServiceError> {
    let meta: SessionMeta =
        serde_json::from_str(&fs::read_to_string(meta_path)?).map_err(|e| ServiceError::Corrupt {
            id: meta_path.display().to_string(),
            reason: e.to_string(),
        })?;
    let corrupt = |reason: String| ServiceError::Corrupt {
        id: meta.id.clone(),
        reason,
    };
    if !valid_id(&meta.id) {
        return Err(corrupt("bad session id".into()));
    }
    let text = fs::read_to_string(dir.join(format!("{}{TRANSCRIPT_SUFFIX}", meta.id)))?;
    let transcript = Transcript::parse(&text).map_err(|e| corrupt(e.to_string()))?;
    Session::restore(meta.id.clone(), meta.config, meta.created, &transcript)
}
