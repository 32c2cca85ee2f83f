//! On-disk cache of Kazhdan–Lusztig tables, one versioned JSON file per rank.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use quasicell_core::kl::{KlTable, EXTENDED_MAX_RANK};
use quasicell_core::{LaurentPoly, Perm};
use serde::{Deserialize, Serialize};

/// Bumped whenever the file layout or the table conventions change; files
/// with another version are ignored and rewritten.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    v: u32,
    n: usize,
    /// `[x, y, h_{x,y}]`, nonzero entries only.
    entries: Vec<(String, String, String)>,
}

#[derive(Clone, Debug)]
pub struct KlCache {
    dir: Option<PathBuf>,
}

impl KlCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { dir }
    }

    pub fn path(&self, n: usize) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("kl-{n}.json")))
    }

    /// Loads the table for rank `n`, computing and storing it on a miss.
    pub fn get(&self, n: usize) -> Result<Arc<KlTable>> {
        if let Some(path) = self.path(n) {
            if path.exists() {
                if let Some(t) = load(&path, n)? {
                    return Ok(Arc::new(t));
                }
            }
        }
        let table = KlTable::compute(n, EXTENDED_MAX_RANK)?;
        if let Some(path) = self.path(n) {
            save(&path, &table)?;
        }
        Ok(Arc::new(table))
    }
}

/// `Ok(None)` for a stale schema version; errors for unreadable files.
pub fn load(path: &Path, n: usize) -> Result<Option<KlTable>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file: CacheFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    if file.v != SCHEMA_VERSION {
        return Ok(None);
    }
    if file.n != n {
        bail!("{} holds rank {}, expected {n}", path.display(), file.n);
    }
    let mut entries = Vec::with_capacity(file.entries.len());
    for (x, y, p) in file.entries {
        entries.push((x.parse::<Perm>()?, y.parse::<Perm>()?, p.parse::<LaurentPoly>()?));
    }
    Ok(Some(KlTable::from_entries(n, EXTENDED_MAX_RANK, entries)?))
}

pub fn save(path: &Path, table: &KlTable) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let file = CacheFile {
        v: SCHEMA_VERSION,
        n: table.rank(),
        entries: table.entries().map(|(x, y, p)| (x.to_string(), y.to_string(), p.to_string())).collect(),
    };
    // write then rename so a concurrent reader never sees a partial file
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_string(&file)?).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path)?;
    Ok(())
}
