//! Calibrated constants cached on disk, keyed by the reaction and grid.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::config::{Constants, Resolved};
use rdlab::manifest::fmt_f64;
use rdlab::{Error, Result};

/// Hex SHA-256 of the reaction spec, case, domain and spacing.
pub fn cache_key(r: &Resolved) -> String {
    let text = format!(
        "{}|{}|{}|{}|{}|{:?}|{:?}",
        r.f.spec(),
        crate::config::case_name(r.case),
        fmt_f64(r.halfwidth),
        fmt_f64(r.dx),
        r.dt.map(fmt_f64).unwrap_or_default(),
        r.scheme,
        r.n_list.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>(),
    );
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub struct ConstantCache {
    dir: PathBuf,
}

impl ConstantCache {
    pub fn new(root: &Path) -> Self {
        Self { dir: root.join("cache") }
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.toml"))
    }

    pub fn load(&self, key: &str) -> Result<Option<Constants>> {
        let p = self.path(key);
        if !p.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&p)?;
        toml::from_str(&text)
            .map(Some)
            .map_err(|e| Error::Config(format!("{}: {e}", p.display())))
    }

    pub fn store(&self, key: &str, c: &Constants) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let text = toml::to_string(c).map_err(|e| Error::Config(e.to_string()))?;
        fs::write(self.path(key), text)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{resolve, Purpose, RunConfig};

    #[test]
    fn key_depends_on_grid_and_reaction() {
        let mut c = RunConfig::default();
        c.reaction = Some("cubic:0.3".into());
        let a = cache_key(&resolve(&c, Purpose::Entire).unwrap());
        assert_eq!(a, cache_key(&resolve(&c, Purpose::Entire).unwrap()));
        c.grid.dx = Some(0.1);
        let b = cache_key(&resolve(&c, Purpose::Entire).unwrap());
        c.reaction = Some("cubic:0.2".into());
        let d = cache_key(&resolve(&c, Purpose::Entire).unwrap());
        assert!(a != b && b != d);
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn store_and_load() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ConstantCache::new(dir.path());
        assert!(cache.load("k").unwrap().is_none());
        let c = Constants { m7: Some(1.25), b: Some(0.1 + 0.2), ..Default::default() };
        cache.store("k", &c).unwrap();
        assert_eq!(cache.load("k").unwrap(), Some(c));
    }
}
