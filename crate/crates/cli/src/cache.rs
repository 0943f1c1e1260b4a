//! On-disk cache of polygonal value sets, keyed by `(m, bound)`.
//!
//! File layout (little endian): the magic `PGNL1`, an entry count, then per
//! entry `m`, `bound`, the word count and the bitset words. Writes go to a
//! temporary file that is renamed into place while holding a lock file, so
//! concurrent runs never observe a torn cache; a run that finds the lock
//! held simply skips writing.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use pgnl::bitset::Bitset;
use pgnl::polygonal::values_up_to;
use pgnl::{PolygonalSum, Result};

pub const MAGIC: &[u8; 5] = b"PGNL1";
pub const FILE_NAME: &str = "values.pgnl";

pub struct ValueCache {
    dir: Option<PathBuf>,
    entries: RefCell<BTreeMap<(u64, u64), Bitset>>,
    dirty: RefCell<bool>,
}

impl ValueCache {
    /// `explicit` wins over `PGNL_CACHE_DIR`; with neither, caching is off.
    pub fn from_env(explicit: Option<PathBuf>) -> Self {
        let dir = explicit.or_else(|| std::env::var_os("PGNL_CACHE_DIR").map(PathBuf::from));
        let entries = match &dir {
            Some(d) => match load(&d.join(FILE_NAME)) {
                Ok(e) => e,
                Err(e) if e.kind() == io::ErrorKind::NotFound => BTreeMap::new(),
                Err(e) => {
                    eprintln!("pgnl: ignoring unreadable cache: {e}");
                    BTreeMap::new()
                }
            },
            None => BTreeMap::new(),
        };
        ValueCache { dir, entries: RefCell::new(entries), dirty: RefCell::new(false) }
    }

    /// `{ P_m(x) } ∩ [0, bound]` as a bitset.
    pub fn values(&self, m: u64, bound: u64) -> Result<Bitset> {
        if let Some(b) = self.entries.borrow().get(&(m, bound)) {
            return Ok(b.clone());
        }
        let mut set = Bitset::new(bound as usize + 1);
        for v in values_up_to(m, bound)? {
            set.set(v as usize);
        }
        if self.dir.is_some() {
            self.entries.borrow_mut().insert((m, bound), set.clone());
            *self.dirty.borrow_mut() = true;
        }
        Ok(set)
    }

    /// Represented set of `sum` in `[0, cap]`, built from cached value sets.
    pub fn represented_set(&self, sum: &PolygonalSum, cap: u64) -> Result<Bitset> {
        let mut set = Bitset::new(cap as usize + 1);
        set.set(0);
        for t in sum.terms() {
            let vals = self.values(t.polygon, cap / t.coeff)?;
            let shifts: Vec<usize> = vals.iter_ones().map(|v| v * t.coeff as usize).collect();
            set = set.sumset(&shifts);
        }
        Ok(set)
    }

    pub fn flush(&self) -> io::Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        if !*self.dirty.borrow() {
            return Ok(());
        }
        fs::create_dir_all(dir)?;
        let lock = dir.join(format!("{FILE_NAME}.lock"));
        let _guard = match OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(_) => LockGuard(lock),
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => return Ok(()),
            Err(e) => return Err(e),
        };
        // merge with whatever another run wrote since we loaded
        let path = dir.join(FILE_NAME);
        let mut merged = load(&path).unwrap_or_default();
        merged.extend(self.entries.borrow().iter().map(|(k, v)| (*k, v.clone())));
        let tmp = dir.join(format!("{FILE_NAME}.tmp"));
        store(&tmp, &merged)?;
        fs::rename(&tmp, &path)?;
        *self.dirty.borrow_mut() = false;
        Ok(())
    }
}

struct LockGuard(PathBuf);

impl Drop for LockGuard {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

fn read_u64(r: &mut impl Read) -> io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn bad(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
}

pub fn load(path: &Path) -> io::Result<BTreeMap<(u64, u64), Bitset>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 5];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(bad("bad cache magic"));
    }
    let count = read_u64(&mut r)?;
    let mut out = BTreeMap::new();
    for _ in 0..count {
        let m = read_u64(&mut r)?;
        let bound = read_u64(&mut r)?;
        let nwords = read_u64(&mut r)? as usize;
        if nwords != (bound as usize + 1).div_ceil(64) {
            return Err(bad("cache entry length mismatch"));
        }
        let words = (0..nwords).map(|_| read_u64(&mut r)).collect::<io::Result<Vec<_>>>()?;
        let set = Bitset::from_words(words, bound as usize + 1).ok_or_else(|| bad("bad cache entry"))?;
        out.insert((m, bound), set);
    }
    Ok(out)
}

fn store(path: &Path, entries: &BTreeMap<(u64, u64), Bitset>) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(entries.len() as u64).to_le_bytes())?;
    for ((m, bound), set) in entries {
        w.write_all(&m.to_le_bytes())?;
        w.write_all(&bound.to_le_bytes())?;
        w.write_all(&(set.words().len() as u64).to_le_bytes())?;
        for word in set.words() {
            w.write_all(&word.to_le_bytes())?;
        }
    }
    w.into_inner().map_err(|e| e.into_error())?.sync_all()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_agreement() {
        let dir = tempfile::tempdir().unwrap();
        let sum: PolygonalSum = "P3+2*P5+P7".parse().unwrap();
        let cache = ValueCache::from_env(Some(dir.path().to_path_buf()));
        let a = cache.represented_set(&sum, 500).unwrap();
        assert_eq!(a, pgnl::polygonal::represented_set(&sum, 500));
        cache.flush().unwrap();
        let bytes = fs::read(dir.path().join(FILE_NAME)).unwrap();
        assert_eq!(&bytes[..5], MAGIC);
        let loaded = load(&dir.path().join(FILE_NAME)).unwrap();
        assert_eq!(loaded.len(), 3);
        let again = ValueCache::from_env(Some(dir.path().to_path_buf()));
        assert_eq!(again.represented_set(&sum, 500).unwrap(), a);
        assert!(!*again.dirty.borrow());
    }

    #[test]
    fn corrupt_cache_is_ignored() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join(FILE_NAME), b"NOPE!garbage").unwrap();
        let cache = ValueCache::from_env(Some(dir.path().to_path_buf()));
        assert!(cache.values(5, 100).unwrap().get(2));
        cache.flush().unwrap();
        assert!(load(&dir.path().join(FILE_NAME)).is_ok());
    }
}
