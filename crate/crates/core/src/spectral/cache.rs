//! On-disk memoization of sweep results.
//!
//! File layout (all integers and floats little-endian):
//!
//! ```text
//! magic      8 bytes  "MMSWEEP\0"
//! version    u32
//! gamma, ej_over_ec, ej_freq, f_s          f64 ×4
//! n_p, n_q                                 u64 ×2
//! sector                                   u8   (0 full, 1 even, 2 odd)
//! k, points                                u64 ×2
//! axis                                     f64 × points
//! levels                                   f64 × points·k (point-major)
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::{SweepResult, SweepSpec};
use crate::circuit::{BoundarySector, CircuitParams, PhaseGrid};
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"MMSWEEP\0";
const VERSION: u32 = 1;

/// Content hash of everything a sweep depends on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SweepKey(String);

impl SweepKey {
    pub(super) fn new(spec: &SweepSpec, axis: &[f64]) -> Self {
        let mut h = Sha256::new();
        h.update(MAGIC);
        h.update(VERSION.to_le_bytes());
        let t = &spec.template;
        for v in [t.gamma, t.ej_over_ec, t.ej_freq, spec.f_s] {
            h.update(v.to_bits().to_le_bytes());
        }
        for v in [spec.grid.n_p(), spec.grid.n_q(), spec.k] {
            h.update((v as u64).to_le_bytes());
        }
        h.update([sector_code(spec.sector)]);
        let o = &spec.options;
        for v in [o.dense_threshold, o.max_krylov] {
            h.update((v as u64).to_le_bytes());
        }
        h.update(o.seed.to_le_bytes());
        h.update(o.rel_tol.to_bits().to_le_bytes());
        h.update(o.abs_tol.to_bits().to_le_bytes());
        h.update([match o.verify_multiplicity {
            None => 0u8,
            Some(false) => 1,
            Some(true) => 2,
        }]);
        h.update((axis.len() as u64).to_le_bytes());
        for f in axis {
            h.update(f.to_bits().to_le_bytes());
        }
        let digest = h.finalize();
        Self(digest.iter().take(12).map(|b| format!("{b:02x}")).collect())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

fn sector_code(s: BoundarySector) -> u8 {
    match s {
        BoundarySector::Full => 0,
        BoundarySector::Even => 1,
        BoundarySector::Odd => 2,
    }
}

fn sector_from(code: u8) -> Result<BoundarySector> {
    match code {
        0 => Ok(BoundarySector::Full),
        1 => Ok(BoundarySector::Even),
        2 => Ok(BoundarySector::Odd),
        c => Err(Error::Cache(format!("unknown sector code {c}"))),
    }
}

/// Serializes the levels and header of a sweep.
pub fn encode(result: &SweepResult) -> Vec<u8> {
    let spec = &result.spec;
    let mut out = Vec::with_capacity(64 + 8 * result.axis.len() * (1 + spec.k));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    let t = &spec.template;
    for v in [t.gamma, t.ej_over_ec, t.ej_freq, spec.f_s] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&(spec.grid.n_p() as u64).to_le_bytes());
    out.extend_from_slice(&(spec.grid.n_q() as u64).to_le_bytes());
    out.push(sector_code(spec.sector));
    out.extend_from_slice(&(spec.k as u64).to_le_bytes());
    out.extend_from_slice(&(result.axis.len() as u64).to_le_bytes());
    for f in &result.axis {
        out.extend_from_slice(&f.to_le_bytes());
    }
    for row in &result.levels {
        for e in row {
            out.extend_from_slice(&e.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Cache("truncated file".into()))?;
        self.pos = end;
        Ok(slice)
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Restores the header and levels; `options` are not stored and are taken
/// from `spec_options`.
pub fn decode(bytes: &[u8], spec_options: super::EigenOptions) -> Result<SweepResult> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let version = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
    if version != VERSION {
        return Err(Error::Cache(format!("unsupported version {version}")));
    }
    let gamma = r.f64()?;
    let ej_over_ec = r.f64()?;
    let ej_freq = r.f64()?;
    let f_s = r.f64()?;
    let n_p = r.u64()? as usize;
    let n_q = r.u64()? as usize;
    let sector = sector_from(r.take(1)?[0])?;
    let k = r.u64()? as usize;
    let points = r.u64()? as usize;
    let axis = (0..points).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    let levels = (0..points)
        .map(|_| (0..k).map(|_| r.f64()).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    if r.pos != bytes.len() {
        return Err(Error::Cache("trailing bytes".into()));
    }
    let template = CircuitParams {
        gamma,
        ej_over_ec,
        f: 0.0,
        f_s,
        ej_freq,
    };
    let spec = SweepSpec {
        template,
        f_s,
        grid: PhaseGrid::new(n_p, n_q)?,
        sector,
        k,
        options: spec_options,
    };
    let key = spec.key(&axis);
    Ok(SweepResult {
        spec,
        axis,
        levels,
        key,
    })
}

/// Directory of `<key>.sweep` files.
#[derive(Debug, Clone)]
pub struct SweepCache {
    dir: PathBuf,
}

impl SweepCache {
    pub fn new(dir: impl AsRef<Path>) -> Self {
        Self {
            dir: dir.as_ref().to_path_buf(),
        }
    }

    fn path(&self, key: &SweepKey) -> PathBuf {
        self.dir.join(format!("{}.sweep", key.as_str()))
    }

    pub fn load(&self, spec: &SweepSpec, axis: &[f64]) -> Result<Option<SweepResult>> {
        let key = spec.key(axis);
        let path = self.path(&key);
        match fs::read(&path) {
            Ok(bytes) => {
                let mut result = decode(&bytes, spec.options)?;
                // The stored template does not carry `f`; keep the caller's.
                result.spec.template = spec.template;
                if result.key != key {
                    return Ok(None);
                }
                Ok(Some(result))
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(Error::Cache(format!("{}: {e}", path.display()))),
        }
    }

    pub fn store(&self, result: &SweepResult) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir).map_err(|e| Error::Cache(e.to_string()))?;
        let path = self.path(&result.key);
        fs::write(&path, encode(result)).map_err(|e| Error::Cache(e.to_string()))?;
        Ok(path)
    }

    /// Cached sweep, computing and storing it on a miss.
    pub fn get_or_compute(&self, spec: &SweepSpec, axis: &[f64]) -> Result<SweepResult> {
        if let Some(hit) = self.load(spec, axis)? {
            return Ok(hit);
        }
        let result = super::sweep_spectrum(spec, axis)?;
        self.store(&result)?;
        Ok(result)
    }
}
