//! Deterministic CSV and JSON output.
//!
//! Every number is rounded to 12 significant digits before it is written, so
//! a JSON file parses back to exactly the rounded values.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scattering::{Resonance, ScanPoint, ScanResult};

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Column header of the scan CSV.
pub const SCAN_CSV_HEADER: &str = "E,reT,imT,T2,RLR2,RRL2,gainLR,gainRL,pole";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Shortest decimal text of `round_sig(x)`.
pub fn fmt_sig(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        return "0".into();
    }
    if !r.is_finite() {
        return format!("{r}");
    }
    let a = r.abs();
    if (1e-5..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub e_min: f64,
    pub e_max: f64,
    pub n: usize,
    pub exclusion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanMeta {
    pub v0: f64,
    pub v1: f64,
    pub b: f64,
    pub q: f64,
    pub m: f64,
    pub grid: GridMeta,
}

/// One scan row. Magnitudes are absent at transmission poles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct ScanRow {
    pub E: f64,
    pub reT: Option<f64>,
    pub imT: Option<f64>,
    pub T2: Option<f64>,
    pub RLR2: Option<f64>,
    pub RRL2: Option<f64>,
    pub gainLR: Option<f64>,
    pub gainRL: Option<f64>,
    pub pole: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceRow {
    pub energy: f64,
    pub t2_peak: f64,
    pub half_width: Option<f64>,
}

impl From<&Resonance> for ResonanceRow {
    fn from(r: &Resonance) -> Self {
        Self {
            energy: round_sig(r.energy),
            t2_peak: round_sig(r.t2_peak),
            half_width: r.half_width.map(round_sig),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanDocument {
    pub meta: ScanMeta,
    pub rows: Vec<ScanRow>,
    pub resonances: Vec<ResonanceRow>,
}

impl ScanDocument {
    pub fn from_scan(scan: &ScanResult) -> Self {
        let s = &scan.spec;
        let meta = ScanMeta {
            v0: round_sig(s.v0),
            v1: round_sig(s.v1),
            b: round_sig(s.b),
            q: s.q,
            m: round_sig(s.m),
            grid: GridMeta {
                e_min: round_sig(scan.e_min),
                e_max: round_sig(scan.e_max),
                n: scan.n,
                exclusion: round_sig(scan.exclusion_half_width),
            },
        };
        let rows = scan.points.iter().map(scan_row).collect();
        let resonances = scan.resonances.iter().map(ResonanceRow::from).collect();
        Self { meta, rows, resonances }
    }
}

fn scan_row(p: &ScanPoint) -> ScanRow {
    match p {
        ScanPoint::Regular(o) => ScanRow {
            E: round_sig(o.energy),
            reT: Some(round_sig(o.t_lr.re)),
            imT: Some(round_sig(o.t_lr.im)),
            T2: Some(round_sig(o.t2())),
            RLR2: Some(round_sig(o.r_lr2())),
            RRL2: Some(round_sig(o.r_rl2())),
            gainLR: Some(round_sig(o.flux_gain_lr)),
            gainRL: Some(round_sig(o.flux_gain_rl)),
            pole: false,
        },
        ScanPoint::Pole { energy, .. } => ScanRow {
            E: round_sig(*energy),
            reT: None,
            imT: None,
            T2: None,
            RLR2: None,
            RRL2: None,
            gainLR: None,
            gainRL: None,
            pole: true,
        },
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

/// Writes `rows` as LF-terminated CSV lines under `header`.
pub fn write_csv<W: Write>(out: &mut W, header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    out.write_all(header.as_bytes())?;
    out.write_all(b"\n")?;
    for row in rows {
        out.write_all(row.join(",").as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn write_json<W: Write, T: Serialize>(out: &mut W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| crate::Error::Io(e.to_string()))?;
    out.write_all(b"\n")?;
    Ok(())
}

pub fn serialize_scan<W: Write>(scan: &ScanResult, format: Format, out: &mut W) -> Result<()> {
    let doc = ScanDocument::from_scan(scan);
    match format {
        Format::Csv => write_csv(
            out,
            SCAN_CSV_HEADER,
            doc.rows.iter().map(|r| {
                vec![
                    fmt_sig(r.E),
                    opt(r.reT),
                    opt(r.imT),
                    opt(r.T2),
                    opt(r.RLR2),
                    opt(r.RRL2),
                    opt(r.gainLR),
                    opt(r.gainRL),
                    if r.pole { "1" } else { "0" }.to_string(),
                ]
            }),
        ),
        Format::Json => write_json(out, &doc),
    }
}

pub fn parse_scan_json(text: &str) -> Result<ScanDocument> {
    serde_json::from_str(text).map_err(|e| crate::Error::Io(e.to_string()))
}
