use crate::config::{Experiment, ExperimentConfig};
use crate::experiments::{columns, plot_columns, Table};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize)]
pub struct Sidecar {
    pub experiment: &'static str,
    pub config_sha256: String,
    pub master_seed: u64,
    pub gpslab_version: &'static str,
    pub cli_version: &'static str,
    pub workers: usize,
    pub wall_time_s: f64,
    pub data_file: String,
    pub plot_file: String,
    pub columns: Vec<&'static str>,
    pub rows: usize,
    pub summary: serde_json::Value,
    pub config: ExperimentConfig,
}

/// SHA-256 of the canonical JSON form, so whitespace and key order in the
/// input file do not change the hash.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    let canonical = serde_json::to_vec(cfg).expect("config serializes");
    hex::encode(Sha256::digest(&canonical))
}

pub struct Written {
    pub data: PathBuf,
    pub sidecar: PathBuf,
    pub plot: PathBuf,
    pub manifest: PathBuf,
}

pub fn write_all(dir: &Path, cfg: &ExperimentConfig, table: &Table, workers: usize, wall: f64) -> std::io::Result<Written> {
    std::fs::create_dir_all(dir)?;
    let stem = cfg.output.path.clone().unwrap_or_else(|| cfg.experiment.name().to_string());
    let data = dir.join(format!("{stem}.{}", cfg.output.format.extension()));
    if let Some(parent) = data.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let mut w = csv::WriterBuilder::new()
        .delimiter(cfg.output.format.delimiter())
        .from_path(&data)?;
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;

    let plot = dir.join(format!("{stem}.dat"));
    std::fs::write(&plot, plot_data(cfg.experiment, table))?;

    let sidecar = dir.join(format!("{stem}.json"));
    let meta = Sidecar {
        experiment: cfg.experiment.name(),
        config_sha256: config_hash(cfg),
        master_seed: cfg.master_seed,
        gpslab_version: gpslab::VERSION,
        cli_version: env!("CARGO_PKG_VERSION"),
        workers,
        wall_time_s: wall,
        data_file: file_name(&data),
        plot_file: file_name(&plot),
        columns: table.columns.clone(),
        rows: table.rows.len(),
        summary: table.summary.clone(),
        config: cfg.clone(),
    };
    let mut f = std::fs::File::create(&sidecar)?;
    serde_json::to_writer_pretty(&mut f, &meta)?;
    writeln!(f)?;

    let manifest = dir.join("MANIFEST.md");
    std::fs::write(&manifest, manifest_text())?;
    Ok(Written {
        data,
        sidecar,
        plot,
        manifest,
    })
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Whitespace-separated `x y [err]` blocks, one per series, separated by two
/// blank lines so gnuplot can address them with `index`.
pub fn plot_data(exp: Experiment, table: &Table) -> String {
    let (x, y, err, series) = plot_columns(exp);
    let col = |name: &str| table.columns.iter().position(|c| *c == name).expect("plot column exists");
    let (xi, yi) = (col(x), col(y));
    let ei = err.map(col);
    let si = series.map(col);
    let mut out = String::new();
    let mut current: Option<&str> = None;
    for row in &table.rows {
        if let Some(s) = si {
            if current != Some(row[s].as_str()) {
                if current.is_some() {
                    out.push_str("\n\n");
                }
                out.push_str(&format!("# {} = {}\n", series.unwrap(), row[s]));
                out.push_str(&header(x, y, err));
                current = Some(row[s].as_str());
            }
        } else if current.is_none() {
            out.push_str(&header(x, y, err));
            current = Some("");
        }
        out.push_str(&row[xi]);
        out.push(' ');
        out.push_str(&row[yi]);
        if let Some(e) = ei {
            out.push(' ');
            out.push_str(&row[e]);
        }
        out.push('\n');
    }
    out
}

fn header(x: &str, y: &str, err: Option<&str>) -> String {
    match err {
        Some(e) => format!("# {x} {y} {e}\n"),
        None => format!("# {x} {y}\n"),
    }
}

pub fn manifest_text() -> String {
    let mut s = String::from("# Output columns\n\nEvery experiment writes `<stem>.csv` (or `.tsv`), a JSON sidecar `<stem>.json` and gnuplot data `<stem>.dat`.\n");
    for exp in Experiment::ALL {
        s.push_str(&format!("\n## {}\n\n| column | meaning |\n|---|---|\n", exp.name()));
        for (c, d) in columns(exp) {
            s.push_str(&format!("| {c} | {d} |\n"));
        }
    }
    s
}
