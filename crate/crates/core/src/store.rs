//! Single-file persistent store for users and portfolios.
//!
//! The whole state lives in one JSON document. Every mutation rewrites it
//! to a temporary sibling and renames it into place, so a crash leaves
//! either the old or the new file. Maps are ordered, which makes the
//! encoding a pure function of the state: reload then save reproduces the
//! file byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::portfolio::Portfolio;

pub const STORE_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StoreError {
    #[error("store I/O on {path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("store file is corrupt: {0}")]
    Corrupt(String),
    #[error("username already taken")]
    UsernameTaken,
    #[error("unknown user {0}")]
    UnknownUser(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UserRecord {
    pub user_id: String,
    pub username: String,
    /// PHC-format salted hash. `None` for local users that cannot log in
    /// over HTTP (created by the REPL).
    pub password_hash: Option<String>,
    pub created_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct StoreData {
    pub version: u32,
    pub users: BTreeMap<String, UserRecord>,
    pub portfolios: BTreeMap<String, Portfolio>,
}

impl Default for StoreData {
    fn default() -> Self {
        Self {
            version: STORE_VERSION,
            users: BTreeMap::new(),
            portfolios: BTreeMap::new(),
        }
    }
}

impl StoreData {
    pub fn decode(bytes: &[u8]) -> Result<Self, StoreError> {
        let data: StoreData = serde_json::from_slice(bytes).map_err(|e| StoreError::Corrupt(e.to_string()))?;
        if data.version != STORE_VERSION {
            return Err(StoreError::Corrupt(format!(
                "unsupported store version {}",
                data.version
            )));
        }
        for (id, user) in &data.users {
            if id != &user.user_id {
                return Err(StoreError::Corrupt(format!("user key {id} does not match record")));
            }
        }
        for (id, portfolio) in &data.portfolios {
            if !data.users.contains_key(id) || &portfolio.user_id != id {
                return Err(StoreError::Corrupt(format!("portfolio {id} has no matching user")));
            }
            portfolio.validate().map_err(StoreError::Corrupt)?;
        }
        Ok(data)
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("store state always serialises");
        bytes.push(b'\n');
        bytes
    }
}

#[derive(Debug)]
pub struct Store {
    path: Option<PathBuf>,
    data: Mutex<StoreData>,
}

impl Store {
    /// Opens the store at `path`, creating an empty one if the file is
    /// missing.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, StoreError> {
        let path = path.as_ref().to_path_buf();
        let data = match fs::read(&path) {
            Ok(bytes) => StoreData::decode(&bytes)?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                let data = StoreData::default();
                write_atomically(&path, &data.encode())?;
                data
            }
            Err(e) => {
                return Err(StoreError::Io {
                    path,
                    message: e.to_string(),
                })
            }
        };
        Ok(Self {
            path: Some(path),
            data: Mutex::new(data),
        })
    }

    /// A store that never touches disk.
    pub fn in_memory() -> Self {
        Self {
            path: None,
            data: Mutex::new(StoreData::default()),
        }
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn snapshot(&self) -> StoreData {
        self.data.lock().unwrap().clone()
    }

    /// Applies `f` to the state and persists the result. On any error the
    /// in-memory state is left untouched.
    fn mutate<T, E: From<StoreError>>(&self, f: impl FnOnce(&mut StoreData) -> Result<T, E>) -> Result<T, E> {
        let mut guard = self.data.lock().unwrap();
        let mut next = guard.clone();
        let out = f(&mut next)?;
        if let Some(path) = &self.path {
            write_atomically(path, &next.encode())?;
        }
        *guard = next;
        Ok(out)
    }

    /// Registers a user with an empty portfolio. Usernames are compared
    /// case-insensitively.
    pub fn create_user(
        &self,
        username: &str,
        password_hash: Option<String>,
        now: DateTime<Utc>,
    ) -> Result<UserRecord, StoreError> {
        let username = username.trim().to_string();
        self.mutate(|data| {
            if data.users.values().any(|u| u.username.eq_ignore_ascii_case(&username)) {
                return Err(StoreError::UsernameTaken);
            }
            let user = UserRecord {
                user_id: uuid::Uuid::new_v4().to_string(),
                username,
                password_hash,
                created_at: now,
            };
            data.users.insert(user.user_id.clone(), user.clone());
            data.portfolios
                .insert(user.user_id.clone(), Portfolio::empty(&user.user_id, now));
            Ok(user)
        })
    }

    pub fn user_by_name(&self, username: &str) -> Option<UserRecord> {
        let username = username.trim();
        self.data
            .lock()
            .unwrap()
            .users
            .values()
            .find(|u| u.username.eq_ignore_ascii_case(username))
            .cloned()
    }

    pub fn user(&self, user_id: &str) -> Option<UserRecord> {
        self.data.lock().unwrap().users.get(user_id).cloned()
    }

    pub fn portfolio(&self, user_id: &str) -> Result<Portfolio, StoreError> {
        self.data
            .lock()
            .unwrap()
            .portfolios
            .get(user_id)
            .cloned()
            .ok_or_else(|| StoreError::UnknownUser(user_id.to_string()))
    }

    /// Runs `f` on the user's portfolio under the store lock and persists it
    /// if `f` succeeds.
    pub fn update_portfolio<T, E: From<StoreError>>(
        &self,
        user_id: &str,
        f: impl FnOnce(&mut Portfolio) -> Result<T, E>,
    ) -> Result<T, E> {
        self.mutate(|data| {
            let portfolio = data
                .portfolios
                .get_mut(user_id)
                .ok_or_else(|| StoreError::UnknownUser(user_id.to_string()))?;
            f(portfolio)
        })
    }
}

fn write_atomically(path: &Path, bytes: &[u8]) -> Result<(), StoreError> {
    let io = |e: std::io::Error| StoreError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let mut tmp_name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    {
        let mut file = fs::File::create(&tmp).map_err(io)?;
        file.write_all(bytes).map_err(io)?;
        file.sync_all().map_err(io)?;
    }
    fs::rename(&tmp, path).map_err(io)
}
