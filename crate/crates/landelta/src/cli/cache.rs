//! Content-addressed matrix cache: raw little-endian complex128 arrays with a
//! JSON sidecar, written atomically (temp file then rename).

use crate::bie::{BieGrid, BoundaryKind, BoundaryMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// FNV-1a, stable across processes.
pub fn fnv64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CacheSidecar {
    pub kind: String,
    pub lambda: Option<[f64; 2]>,
    pub b: Option<f64>,
    pub curve_hash: String,
    pub n: usize,
}

pub struct MatrixCache {
    dir: PathBuf,
    pub enabled: bool,
}

impl MatrixCache {
    pub fn new(out_dir: &Path, enabled: bool) -> Self {
        MatrixCache {
            dir: out_dir.join("cache"),
            enabled,
        }
    }

    pub fn key(
        kind: BoundaryKind,
        lambda: Option<Complex64>,
        b: Option<f64>,
        curve_json: &str,
    ) -> u64 {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(match kind {
            BoundaryKind::Weyl => b"weyl",
            BoundaryKind::SingleLayer => b"slay",
            BoundaryKind::Perturbation => b"pert",
        });
        if let Some(l) = lambda {
            bytes.extend_from_slice(&l.re.to_le_bytes());
            bytes.extend_from_slice(&l.im.to_le_bytes());
        }
        if let Some(bv) = b {
            bytes.extend_from_slice(&bv.to_le_bytes());
        }
        bytes.extend_from_slice(curve_json.as_bytes());
        fnv64(&bytes)
    }

    pub fn load(
        &self,
        key: u64,
        kind: BoundaryKind,
        lambda: Option<Complex64>,
        b: Option<f64>,
        grid: &BieGrid,
    ) -> Option<BoundaryMatrix> {
        if !self.enabled {
            return None;
        }
        let bin = self.dir.join(format!("{key:016x}.bin"));
        let side = self.dir.join(format!("{key:016x}.json"));
        let bytes = std::fs::read(bin).ok()?;
        let sidecar: CacheSidecar = serde_json::from_str(&std::fs::read_to_string(side).ok()?).ok()?;
        if sidecar.n != grid.n() {
            return None;
        }
        BoundaryMatrix::from_raw_bytes(kind, lambda, b, grid.clone(), &bytes)
    }

    pub fn store(&self, key: u64, matrix: &BoundaryMatrix, curve_hash: u64) -> std::io::Result<()> {
        if !self.enabled {
            return Ok(());
        }
        std::fs::create_dir_all(&self.dir)?;
        let bin = self.dir.join(format!("{key:016x}.bin"));
        let side = self.dir.join(format!("{key:016x}.json"));
        let tmp_bin = self.dir.join(format!("{key:016x}.bin.tmp"));
        let tmp_side = self.dir.join(format!("{key:016x}.json.tmp"));
        std::fs::write(&tmp_bin, matrix.to_raw_bytes())?;
        let sidecar = CacheSidecar {
            kind: format!("{:?}", matrix.kind),
            lambda: matrix.lambda.map(|l| [l.re, l.im]),
            b: matrix.b,
            curve_hash: format!("{curve_hash:016x}"),
            n: matrix.n(),
        };
        std::fs::write(&tmp_side, serde_json::to_string_pretty(&sidecar)?)?;
        std::fs::rename(tmp_bin, bin)?;
        std::fs::rename(tmp_side, side)?;
        Ok(())
    }
}
