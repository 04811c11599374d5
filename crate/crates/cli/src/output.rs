//! CSV, PGM and manifest serialization, written atomically.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use dirac2c::{DensityComparison, DensityRecord};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// Shortest decimal string that parses back to the same `f64`.
pub fn fmt_num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn density_csv(record: &DensityRecord) -> String {
    let mut s = String::from("t,x,q_density,p_density\n");
    for (k, &t) in record.times.iter().enumerate() {
        let t = fmt_num(t);
        for (i, &x) in record.positions.iter().enumerate() {
            let _ = writeln!(
                s,
                "{t},{},{},{}",
                fmt_num(x),
                fmt_num(record.q_density[k][i]),
                fmt_num(record.p_density[k][i])
            );
        }
    }
    s
}

pub fn norms_csv(record: &DensityRecord) -> String {
    let mut s = String::from("t,p_norm,q_norm,leakage\n");
    for k in 0..record.len() {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_num(record.times[k]),
            fmt_num(record.p_norm[k]),
            fmt_num(record.q_norm[k]),
            fmt_num(dirac2c::total_leakage(record, k))
        );
    }
    s
}

/// Lower density as a matrix: one row per time, one column per position.
pub fn heatmap_csv(record: &DensityRecord) -> String {
    let mut s = String::from("t");
    for &x in &record.positions {
        s.push(',');
        s.push_str(&fmt_num(x));
    }
    s.push('\n');
    for (t, row) in record.times.iter().zip(&record.q_density) {
        s.push_str(&fmt_num(*t));
        for &v in row {
            s.push(',');
            s.push_str(&fmt_num(v));
        }
        s.push('\n');
    }
    s
}

/// Binary 8-bit PGM of the lower density, `value/scale` mapped linearly onto
/// 0..=255. The first row is the first snapshot.
pub fn heatmap_pgm(record: &DensityRecord, scale: f64) -> Vec<u8> {
    let width = record.positions.len();
    let height = record.len();
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.reserve(width * height);
    for row in &record.q_density {
        for &v in row {
            let level = if scale > 0.0 { (v / scale * 255.0).round().clamp(0.0, 255.0) } else { 0.0 };
            out.push(level as u8);
        }
    }
    out
}

pub fn metrics_csv(m: &DensityComparison) -> String {
    format!(
        "metric,value\nnormalized_l2,{}\nmax_abs_diff,{}\n",
        fmt_num(m.normalized_l2),
        fmt_num(m.max_abs_diff)
    )
}

pub fn per_time_csv(times: &[f64], m: &DensityComparison) -> String {
    let mut s = String::from("t,l2_diff\n");
    for (t, d) in times.iter().zip(&m.per_time) {
        let _ = writeln!(s, "{},{}", fmt_num(*t), fmt_num(*d));
    }
    s
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes to a hidden sibling and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Config(format!("{} is not a file path", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes).map_err(|e| CliError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Writes files into one directory and remembers their checksums.
#[derive(Debug)]
pub struct Emitter {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl Emitter {
    pub fn new(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn emit(&mut self, name: &str, bytes: &[u8]) -> CliResult<()> {
        write_atomic(&self.dir.join(name), bytes)?;
        self.files.push(FileEntry {
            name: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len(),
        });
        Ok(())
    }

    /// Serializes `manifest` next to the data files. The manifest itself is
    /// not listed.
    pub fn finish<M: Serialize>(self, name: &str, manifest: &M) -> CliResult<Vec<FileEntry>> {
        let mut text = serde_json::to_string_pretty(manifest).map_err(|e| CliError::Config(e.to_string()))?;
        text.push('\n');
        write_atomic(&self.dir.join(name), text.as_bytes())?;
        Ok(self.files)
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dirac2c::{make_grid, UpperField};

    #[test]
    fn numbers_round_trip() {
        for v in [0.0, 1.0, -2.5, 0.1, 1e-5, 9.99e-6, 3.2e-300, 1e16, 123456.789, f64::MIN_POSITIVE, -0.0] {
            let s = fmt_num(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(fmt_num(0.25), "0.25");
        assert_eq!(fmt_num(2.5e-7), "2.5e-7");
        assert_eq!(fmt_num(10.0), "10");
    }

    fn record() -> DensityRecord {
        let g = make_grid(8, -1.0, 1.0).unwrap();
        let u = UpperField::from_fn(&g, |x| dirac2c::Complex64::new(x, 0.0));
        let mut r = DensityRecord::new(&g);
        r.push(0.0, &u, &UpperField::zeros(&g)).unwrap();
        r.push(0.5, &u, &u).unwrap();
        r
    }

    #[test]
    fn csv_layouts() {
        let r = record();
        let d = density_csv(&r);
        assert!(d.starts_with("t,x,q_density,p_density\n0,-1,0,1\n"));
        assert_eq!(d.lines().count(), 17);
        assert!(!d.contains('\r'));
        let n = norms_csv(&r);
        assert_eq!(n.lines().next(), Some("t,p_norm,q_norm,leakage"));
        assert_eq!(n.lines().count(), 3);
        let h = heatmap_csv(&r);
        assert_eq!(h.lines().count(), 3);
        assert_eq!(h.lines().nth(2).unwrap().split(',').count(), 9);
    }

    #[test]
    fn pgm_header_and_scaling() {
        let r = record();
        let img = heatmap_pgm(&r, r.q_max());
        let header = b"P5\n8 2\n255\n";
        assert_eq!(&img[..header.len()], header);
        let pixels = &img[header.len()..];
        assert_eq!(pixels.len(), 16);
        assert!(pixels[..8].iter().all(|&p| p == 0));
        assert_eq!(pixels[8], 255);
        assert!(heatmap_pgm(&r, 0.0)[header.len()..].iter().all(|&p| p == 0));
    }

    #[test]
    fn emitter_records_checksums() {
        let dir = tempfile::tempdir().unwrap();
        let mut em = Emitter::new(&dir.path().join("sub")).unwrap();
        em.emit("a.csv", b"x\n1\n").unwrap();
        let files = em.finish("manifest.json", &serde_json::json!({"ok": true})).unwrap();
        assert_eq!(files.len(), 1);
        let on_disk = fs::read(dir.path().join("sub/a.csv")).unwrap();
        assert_eq!(files[0].sha256, sha256_hex(&on_disk));
        let names: Vec<_> = fs::read_dir(dir.path().join("sub")).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 2);
    }
}
