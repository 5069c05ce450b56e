use chrono::{DateTime, Utc};
use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::RwLock;
use std::time::SystemTime;

/// A saved, ordered list of document ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Library {
    pub name: String,
    pub doc_ids: Vec<String>,
    pub created: DateTime<Utc>,
}

#[derive(Debug, thiserror::Error)]
pub enum LibraryError {
    #[error("library not found: {0}")]
    NotFound(String),
    #[error("invalid library name {0:?}")]
    InvalidName(String),
    #[error("library {name}: {source}")]
    Io {
        name: String,
        #[source]
        source: io::Error,
    },
}

/// Names are limited to `[A-Za-z0-9_.-]`, must not start with a dot and are
/// at most 128 bytes, so they are always a single safe path component.
pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && name.len() <= 128
        && !name.starts_with('.')
        && name
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'-' | b'.'))
}

/// Decodes a library file body: one id per line, blank lines ignored,
/// duplicates dropped keeping the first occurrence.
pub fn parse_library_file(text: &str) -> Vec<String> {
    dedup(text.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from))
}

fn dedup(ids: impl IntoIterator<Item = String>) -> Vec<String> {
    let mut seen = HashSet::new();
    ids.into_iter().filter(|id| seen.insert(id.clone())).collect()
}

#[derive(Debug)]
enum Backend {
    Dir(PathBuf),
    Memory(RwLock<BTreeMap<String, Library>>),
}

/// Library persistence, either under `<data-dir>/libraries/` or in memory.
#[derive(Debug)]
pub struct LibraryStore {
    backend: Backend,
    /// Session-only lists, consulted before the backend and never persisted.
    scratch: RwLock<BTreeMap<String, Library>>,
}

impl Default for LibraryStore {
    fn default() -> Self {
        Self::in_memory()
    }
}

impl LibraryStore {
    pub fn in_memory() -> Self {
        LibraryStore {
            backend: Backend::Memory(RwLock::new(BTreeMap::new())),
            scratch: RwLock::default(),
        }
    }

    pub fn in_dir(data_dir: &Path) -> Self {
        LibraryStore {
            backend: Backend::Dir(data_dir.join("libraries")),
            scratch: RwLock::default(),
        }
    }

    /// Makes `ids` loadable as `name` for the lifetime of this store only.
    pub fn set_scratch(&self, name: &str, ids: &[String]) -> Result<(), LibraryError> {
        if !is_valid_name(name) {
            return Err(LibraryError::InvalidName(name.to_string()));
        }
        let lib = Library {
            name: name.to_string(),
            doc_ids: dedup(ids.iter().cloned()),
            created: Utc::now(),
        };
        self.scratch
            .write()
            .expect("library lock")
            .insert(name.to_string(), lib);
        Ok(())
    }

    pub fn save(&self, name: &str, ids: &[String]) -> Result<Library, LibraryError> {
        if !is_valid_name(name) {
            return Err(LibraryError::InvalidName(name.to_string()));
        }
        let doc_ids = dedup(ids.iter().cloned());
        self.scratch.write().expect("library lock").remove(name);
        match &self.backend {
            Backend::Dir(dir) => {
                let io_err = |source| LibraryError::Io {
                    name: name.to_string(),
                    source,
                };
                fs::create_dir_all(dir).map_err(io_err)?;
                let mut body = String::new();
                for id in &doc_ids {
                    body.push_str(id);
                    body.push('\n');
                }
                fs::write(dir.join(name), body).map_err(io_err)?;
                self.load(name)
            }
            Backend::Memory(map) => {
                let lib = Library {
                    name: name.to_string(),
                    doc_ids,
                    created: Utc::now(),
                };
                map.write().expect("library lock").insert(name.to_string(), lib.clone());
                Ok(lib)
            }
        }
    }

    pub fn load(&self, name: &str) -> Result<Library, LibraryError> {
        if !is_valid_name(name) {
            return Err(LibraryError::InvalidName(name.to_string()));
        }
        if let Some(lib) = self.scratch.read().expect("library lock").get(name) {
            return Ok(lib.clone());
        }
        match &self.backend {
            Backend::Dir(dir) => {
                let path = dir.join(name);
                let text = match fs::read_to_string(&path) {
                    Ok(t) => t,
                    Err(e) if e.kind() == io::ErrorKind::NotFound => {
                        return Err(LibraryError::NotFound(name.to_string()))
                    }
                    Err(source) => {
                        return Err(LibraryError::Io {
                            name: name.to_string(),
                            source,
                        })
                    }
                };
                let created = fs::metadata(&path)
                    .and_then(|m| m.modified())
                    .unwrap_or(SystemTime::UNIX_EPOCH);
                Ok(Library {
                    name: name.to_string(),
                    doc_ids: parse_library_file(&text),
                    created: created.into(),
                })
            }
            Backend::Memory(map) => map
                .read()
                .expect("library lock")
                .get(name)
                .cloned()
                .ok_or_else(|| LibraryError::NotFound(name.to_string())),
        }
    }

    pub fn list(&self) -> Result<Vec<String>, LibraryError> {
        match &self.backend {
            Backend::Dir(dir) => {
                let entries = match fs::read_dir(dir) {
                    Ok(e) => e,
                    Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(Vec::new()),
                    Err(source) => {
                        return Err(LibraryError::Io {
                            name: String::new(),
                            source,
                        })
                    }
                };
                let mut names: Vec<String> = entries
                    .filter_map(Result::ok)
                    .filter_map(|e| e.file_name().into_string().ok())
                    .filter(|n| is_valid_name(n))
                    .collect();
                names.sort();
                Ok(names)
            }
            Backend::Memory(map) => Ok(map.read().expect("library lock").keys().cloned().collect()),
        }
    }
}
