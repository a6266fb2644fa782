use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::residue::{Character, Modulus};

/// Environment variable that overrides the cache directory.
pub const CACHE_DIR_ENV: &str = "HECKE_CACHE_DIR";

#[derive(Serialize, Deserialize)]
struct CacheFile {
    q: [i64; 2],
    characters: Vec<CacheEntry>,
}

#[derive(Serialize, Deserialize)]
struct CacheEntry {
    exponents: Vec<u32>,
    gauss_sum: [f64; 2],
}

/// On-disk Gauss sums, one JSON document per modulus.
///
/// A file that fails to parse or does not match the requested family is
/// treated as a miss and rewritten.
#[derive(Debug)]
pub struct GaussCache {
    dir: PathBuf,
    writer: Mutex<()>,
}

impl GaussCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        GaussCache {
            dir: dir.into(),
            writer: Mutex::new(()),
        }
    }

    /// Directory from [`CACHE_DIR_ENV`], falling back to `default`.
    pub fn from_env_or(default: impl Into<PathBuf>) -> Self {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(d) if !d.is_empty() => Self::new(PathBuf::from(d)),
            _ => Self::new(default),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, modulus: &Modulus) -> PathBuf {
        let q = modulus.q();
        self.dir.join(format!("gauss_{}_{}.json", q.re, q.im))
    }

    /// Cached Gauss sums for `chars` (all mod the same `q`), or the result of
    /// `compute`, which is then stored.
    pub fn get_or_compute(
        &self,
        modulus: &Modulus,
        chars: &[Character],
        compute: impl FnOnce() -> Vec<Complex64>,
    ) -> Result<Vec<Complex64>> {
        let path = self.path_for(modulus);
        if let Some(hit) = self.load(&path, modulus, chars) {
            return Ok(hit);
        }
        let sums = compute();
        self.store(&path, modulus, chars, &sums)?;
        Ok(sums)
    }

    fn load(&self, path: &Path, modulus: &Modulus, chars: &[Character]) -> Option<Vec<Complex64>> {
        let text = fs::read_to_string(path).ok()?;
        let file: CacheFile = serde_json::from_str(&text).ok()?;
        let q = modulus.q();
        if file.q != [q.re, q.im] || file.characters.len() != chars.len() {
            return None;
        }
        let n8 = 8.0 * modulus.norm() as f64;
        let mut out = Vec::with_capacity(chars.len());
        for (entry, chi) in file.characters.iter().zip(chars) {
            let g = Complex64::new(entry.gauss_sum[0], entry.gauss_sum[1]);
            let valid = entry.exponents == chi.exponents()
                && g.re.is_finite()
                && g.im.is_finite()
                && (g.norm_sqr() / n8 - 1.0).abs() <= 1e-9;
            if !valid {
                return None;
            }
            out.push(g);
        }
        Some(out)
    }

    fn store(
        &self,
        path: &Path,
        modulus: &Modulus,
        chars: &[Character],
        sums: &[Complex64],
    ) -> Result<()> {
        let q = modulus.q();
        let file = CacheFile {
            q: [q.re, q.im],
            characters: chars
                .iter()
                .zip(sums)
                .map(|(c, g)| CacheEntry {
                    exponents: c.exponents().to_vec(),
                    gauss_sum: [g.re, g.im],
                })
                .collect(),
        };
        let text = serde_json::to_string(&file).map_err(|e| Error::Cache(e.to_string()))?;
        let _guard = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
        fs::create_dir_all(&self.dir).map_err(io)?;
        let tmp = path.with_extension(format!("json.tmp{}", std::process::id()));
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(text.as_bytes()).map_err(io)?;
        f.sync_all().map_err(io)?;
        fs::rename(&tmp, path).map_err(io)?;
        Ok(())
    }
}
