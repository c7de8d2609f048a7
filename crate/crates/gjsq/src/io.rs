//! Reading configurations and writing CSV / JSON output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use gjsq_core::ctmc::JointDistribution;
use gjsq_core::{RateProfile, SystemConfig};
use serde::{Deserialize, Serialize};

pub fn load_config(path: &Path) -> Result<SystemConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let cfg: SystemConfig = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Output sink: a file, or standard output when no path is given.
pub fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn write_csv<T: Serialize>(out: &mut dyn Write, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// One point of a conditional-rate series. `server` is 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub source: String,
    pub server: usize,
    pub n: usize,
    pub value: Option<f64>,
    pub stderr: Option<f64>,
}

/// Rows for `n = 0..n_max` of each server's profile.
pub fn rate_rows(profiles: &[RateProfile], n_max: usize) -> Vec<RateRow> {
    profiles
        .iter()
        .enumerate()
        .flat_map(|(i, p)| {
            (0..n_max).map(move |n| RateRow {
                source: p.provenance.as_str().to_string(),
                server: i + 1,
                n,
                value: p.rate(n),
                stderr: p.stderr(n),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointRow {
    pub q1: usize,
    pub q2: usize,
    pub prob: f64,
}

pub fn joint_rows(dist: &JointDistribution) -> Vec<JointRow> {
    dist.iter().map(|(q1, q2, prob)| JointRow { q1, q2, prob }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use gjsq_core::{Provenance, Tail};

    #[test]
    fn rate_rows_roundtrip_through_csv() {
        let mut p = RateProfile::new(Provenance::Simulation, vec![Some(0.5), None], Tail::Unknown);
        p.stderr = Some(vec![Some(0.01), None]);
        let rows = rate_rows(&[p], 3);
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("source,server,n,value,stderr\nsimulation,1,0,0.5,0.01\nsimulation,1,1,,\n"));
        let back: Vec<RateRow> = csv::Reader::from_reader(&buf[..])
            .deserialize()
            .collect::<Result<_, _>>()
            .unwrap();
        assert_eq!(back, rows);
    }
}
