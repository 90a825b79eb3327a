//! Trajectory and dataset files.
//!
//! Trajectory CSV: header `t,x0,...,x{n-1}`, one row per sample. Paired
//! dataset: a directory with `x_t.csv` and `x_tdt.csv` (header
//! `x0,...,x{n-1}`, one row per pair) plus a `dataset.json` sidecar with
//! version `kdla-data/1` and full provenance. All floats are written with
//! 17 significant digits, which round-trips f64 exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use kdla_num::Mat;

use crate::error::SystemsError;
use crate::trajectory::{Provenance, SnapshotDataset, Trajectory};

pub const DATA_FORMAT_VERSION: &str = "kdla-data/1";

/// 17-significant-digit scientific notation (f64 round-trip).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trajectory_csv(path: &Path, tr: &Trajectory) -> Result<(), SystemsError> {
    let mut out = String::new();
    out.push('t');
    for i in 0..tr.dim() {
        out.push_str(&format!(",x{i}"));
    }
    out.push('\n');
    for j in 0..tr.len() {
        out.push_str(&fmt_f64(tr.time(j)));
        for i in 0..tr.dim() {
            out.push(',');
            out.push_str(&fmt_f64(tr.states[(i, j)]));
        }
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

pub fn read_trajectory_csv(path: &Path) -> Result<Trajectory, SystemsError> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| SystemsError::io(&name, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| SystemsError::Parse {
        file: name.clone(),
        line: 1,
        msg: "empty file".into(),
    })?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.is_empty() || cols[0].trim() != "t" {
        return Err(SystemsError::Parse {
            file: name,
            line: 1,
            msg: format!("expected header starting with 't', got '{header}'"),
        });
    }
    let n = cols.len() - 1;
    let mut times = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != n + 1 {
            return Err(SystemsError::Parse {
                file: name,
                line: idx + 1,
                msg: format!("expected {} fields, got {}", n + 1, parts.len()),
            });
        }
        let mut row = Vec::with_capacity(n + 1);
        for p in &parts {
            row.push(p.trim().parse::<f64>().map_err(|e| SystemsError::Parse {
                file: name.clone(),
                line: idx + 1,
                msg: format!("bad float '{p}': {e}"),
            })?);
        }
        times.push(row[0]);
        rows.push(row[1..].to_vec());
    }
    if rows.len() < 2 {
        return Err(SystemsError::Parse {
            file: name,
            line: 1,
            msg: "trajectory needs at least two samples".into(),
        });
    }
    let dt = times[1] - times[0];
    for (i, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt.abs().max(1.0) {
            return Err(SystemsError::Parse {
                file: name,
                line: i + 3,
                msg: "non-uniform time steps".into(),
            });
        }
    }
    let m = rows.len();
    let states = Mat::from_fn(n, m, |i, j| rows[j][i]);
    Ok(Trajectory::new(states, dt, times[0]))
}

#[derive(Debug, Serialize, Deserialize)]
struct DatasetSidecar {
    version: String,
    n: usize,
    m: usize,
    dt: f64,
    provenance: Option<Provenance>,
}

fn write_matrix_csv(path: &Path, m: &Mat) -> Result<(), SystemsError> {
    let mut out = String::new();
    for i in 0..m.rows() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("x{i}"));
    }
    out.push('\n');
    for j in 0..m.cols() {
        for i in 0..m.rows() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&fmt_f64(m[(i, j)]));
        }
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

fn read_matrix_csv(path: &Path) -> Result<Mat, SystemsError> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| SystemsError::io(&name, e))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| SystemsError::Parse {
        file: name.clone(),
        line: 1,
        msg: "empty file".into(),
    })?;
    let n = header.split(',').count();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != n {
            return Err(SystemsError::Parse {
                file: name,
                line: idx + 1,
                msg: format!("expected {n} fields, got {}", parts.len()),
            });
        }
        let mut row = Vec::with_capacity(n);
        for p in &parts {
            row.push(p.trim().parse::<f64>().map_err(|e| SystemsError::Parse {
                file: name.clone(),
                line: idx + 1,
                msg: format!("bad float '{p}': {e}"),
            })?);
        }
        rows.push(row);
    }
    let m = rows.len();
    Ok(Mat::from_fn(n, m, |i, j| rows[j][i]))
}

/// Write `x_t.csv`, `x_tdt.csv` and `dataset.json` into `dir`.
pub fn write_dataset(dir: &Path, ds: &SnapshotDataset) -> Result<(), SystemsError> {
    fs::create_dir_all(dir).map_err(|e| SystemsError::io(dir.display().to_string(), e))?;
    write_matrix_csv(&dir.join("x_t.csv"), &ds.x_t)?;
    write_matrix_csv(&dir.join("x_tdt.csv"), &ds.x_tdt)?;
    let sidecar = DatasetSidecar {
        version: DATA_FORMAT_VERSION.to_string(),
        n: ds.dim(),
        m: ds.len(),
        dt: ds.dt,
        provenance: ds.provenance.clone(),
    };
    let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    write_atomic(&dir.join("dataset.json"), json.as_bytes())
}

pub fn read_dataset(dir: &Path) -> Result<SnapshotDataset, SystemsError> {
    let sidecar_path = dir.join("dataset.json");
    let name = sidecar_path.display().to_string();
    let text = fs::read_to_string(&sidecar_path).map_err(|e| SystemsError::io(&name, e))?;
    let sidecar: DatasetSidecar = serde_json::from_str(&text).map_err(|e| SystemsError::Parse {
        file: name.clone(),
        line: e.line(),
        msg: e.to_string(),
    })?;
    if sidecar.version != DATA_FORMAT_VERSION {
        return Err(SystemsError::Config(format!(
            "unsupported dataset version '{}' (expected {DATA_FORMAT_VERSION})",
            sidecar.version
        )));
    }
    let x_t = read_matrix_csv(&dir.join("x_t.csv"))?;
    let x_tdt = read_matrix_csv(&dir.join("x_tdt.csv"))?;
    if x_t.rows() != sidecar.n
        || x_t.cols() != sidecar.m
        || x_tdt.rows() != sidecar.n
        || x_tdt.cols() != sidecar.m
    {
        return Err(SystemsError::Config(format!(
            "dataset shape mismatch: sidecar says {}x{}, files are {}x{} and {}x{}",
            sidecar.n,
            sidecar.m,
            x_t.rows(),
            x_t.cols(),
            x_tdt.rows(),
            x_tdt.cols()
        )));
    }
    Ok(SnapshotDataset {
        x_t,
        x_tdt,
        dt: sidecar.dt,
        provenance: sidecar.provenance,
    })
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), SystemsError> {
    let name = path.display().to_string();
    let mut f = fs::File::create(path).map_err(|e| SystemsError::io(&name, e))?;
    f.write_all(bytes).map_err(|e| SystemsError::io(&name, e))
}
