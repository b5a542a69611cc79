//! Command-line front end.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{fmt_sig, serialize_scan, write_csv, write_json, Format, ResonanceRow};
use crate::limits::space_component_case;
use crate::potential::PotentialSpec;
use crate::scattering::{energy_scan, find_transmission_resonances, scan_grid};
use crate::spectrum::{complex_m22_zeros, critical_v1, real_bound_states, SearchBox};
use crate::verify::{run_verification, VerifyConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Scattering observables on an energy grid.
    Scan,
    /// Real bound states, plus complex zeros of M22 with --complex.
    BoundStates,
    /// First V1 at which the real bound-state count changes.
    CriticalV1,
    /// Transmission resonances in a window.
    Resonances,
    /// Run the oracle suite.
    Verify,
    /// Well in the space component of the vector potential.
    SpaceComponent,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "ptdirac", version, about = "Dirac particle in a PT-symmetric square well")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    #[arg(long, default_value_t = 3.0)]
    pub v0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub v1: f64,
    #[arg(long, default_value_t = 5.0)]
    pub b: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub q: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = -8.0, allow_hyphen_values = true)]
    pub emin: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    pub emax: f64,
    #[arg(long, default_value_t = 4001)]
    pub n: usize,
    /// Half-width of the band-edge exclusion zone.
    #[arg(long, default_value_t = 1e-6)]
    pub exclusion: f64,
    /// Resonance window, default [-2m, -m].
    #[arg(long, allow_hyphen_values = true)]
    pub window_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub window_max: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub v1max: f64,
    /// Bisection tolerance for critical-v1.
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value_t = crate::spectrum::DEFAULT_GRID_N)]
    pub grid_n: usize,
    /// Also search for complex zeros of M22 (analytic continuation, extension grade).
    #[arg(long)]
    pub complex: bool,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub draws: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file, stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn spec(&self) -> Result<PotentialSpec> {
        PotentialSpec::new(self.v0, self.v1, self.b, self.q, self.mass)
    }

    fn window(&self) -> (f64, f64) {
        (
            self.window_min.unwrap_or(-2.0 * self.mass),
            self.window_max.unwrap_or(-self.mass),
        )
    }
}

/// Process exit status for an error: 2 for invalid input, 3 for numerical
/// failures, 1 for I/O.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter(_) | Error::ScaleViolation(_) | Error::EmptyGrid => 2,
        Error::Io(_) => 1,
        _ => 3,
    }
}

#[derive(Serialize)]
struct BoundStatesDoc {
    spec: PotentialSpec,
    real_energies: Vec<f64>,
    negative_count: usize,
    positive_count: usize,
    complex_zeros: Option<Vec<[f64; 2]>>,
}

/// Runs one command and writes its output. Returns `Ok(false)` when
/// `verify` completed with failing checks.
pub fn run(config: &RunConfig) -> Result<bool> {
    let mut out: Box<dyn Write> = match &config.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    let ok = run_to(config, &mut out)?;
    out.flush()?;
    Ok(ok)
}

pub fn run_to<W: Write>(config: &RunConfig, out: &mut W) -> Result<bool> {
    let spec = config.spec()?;
    let r = crate::io::round_sig;
    match config.command {
        Command::Scan => {
            let scan = energy_scan(&spec, config.emin, config.emax, config.n, config.exclusion)?;
            serialize_scan(&scan, config.format, out)?;
        }
        Command::BoundStates => {
            let spectrum = real_bound_states(&spec, config.grid_n)?;
            let complex = if config.complex {
                let m = spec.m;
                let search = SearchBox {
                    re_min: -m + 1e-6 * m,
                    re_max: m - 1e-6 * m,
                    im_min: -0.5 * m,
                    im_max: 0.5 * m,
                };
                let zeros = complex_m22_zeros(&spec, search, 2000)?;
                Some(
                    zeros
                        .zeros
                        .iter()
                        .filter(|z| z.im.abs() > 1e-8 * m)
                        .map(|z| [r(z.re), r(z.im)])
                        .collect::<Vec<_>>(),
                )
            } else {
                None
            };
            match config.format {
                Format::Csv => {
                    let mut rows: Vec<Vec<String>> = spectrum
                        .real_energies
                        .iter()
                        .map(|&e| vec![fmt_sig(e), "0".into()])
                        .collect();
                    for z in complex.iter().flatten() {
                        rows.push(vec![fmt_sig(z[0]), fmt_sig(z[1])]);
                    }
                    write_csv(out, "reE,imE", rows)?;
                }
                Format::Json => write_json(
                    out,
                    &BoundStatesDoc {
                        spec,
                        real_energies: spectrum.real_energies.iter().map(|&e| r(e)).collect(),
                        negative_count: spectrum.negative_count,
                        positive_count: spectrum.positive_count,
                        complex_zeros: complex,
                    },
                )?,
            }
        }
        Command::CriticalV1 => {
            let mut c = critical_v1(&spec, config.v1max, config.tol, config.grid_n)?;
            c.v1_crit = r(c.v1_crit);
            c.merge_energy = r(c.merge_energy);
            c.vanishing_levels.iter_mut().for_each(|e| *e = r(*e));
            match config.format {
                Format::Csv => write_csv(
                    out,
                    "v1_crit,merge_energy,count_below,count_above",
                    [vec![
                        fmt_sig(c.v1_crit),
                        fmt_sig(c.merge_energy),
                        c.count_below.to_string(),
                        c.count_above.to_string(),
                    ]],
                )?,
                Format::Json => write_json(out, &c)?,
            }
        }
        Command::Resonances => {
            let scan = energy_scan(&spec, config.emin, config.emax, config.n, config.exclusion)?;
            let rows: Vec<ResonanceRow> = find_transmission_resonances(&scan, config.window())
                .iter()
                .map(ResonanceRow::from)
                .collect();
            match config.format {
                Format::Csv => write_csv(
                    out,
                    "E,T2,halfWidth",
                    rows.iter().map(|x| {
                        vec![
                            fmt_sig(x.energy),
                            fmt_sig(x.t2_peak),
                            x.half_width.map(fmt_sig).unwrap_or_default(),
                        ]
                    }),
                )?,
                Format::Json => write_json(out, &rows)?,
            }
        }
        Command::Verify => {
            let vc = VerifyConfig {
                seed: config.seed,
                draws: config.draws,
                m: spec.m,
                ..VerifyConfig::default()
            };
            let report = run_verification(&vc)?;
            match config.format {
                Format::Csv => write_csv(
                    out,
                    "check,value,tolerance,pass",
                    report.checks.iter().map(|c| {
                        vec![
                            c.name.clone(),
                            fmt_sig(c.value),
                            fmt_sig(c.tolerance),
                            if c.pass { "PASS" } else { "FAIL" }.into(),
                        ]
                    }),
                )?,
                Format::Json => write_json(out, &report)?,
            }
            return Ok(report.all_pass());
        }
        Command::SpaceComponent => {
            let grid = scan_grid(&spec, config.emin, config.emax, config.n, config.exclusion);
            if grid.is_empty() {
                return Err(Error::EmptyGrid);
            }
            let rows = grid
                .iter()
                .map(|&e| space_component_case(&spec, e))
                .collect::<Result<Vec<_>>>()?;
            let table = rows.iter().map(|o| {
                vec![
                    fmt_sig(o.energy),
                    fmt_sig(o.t_lr.re),
                    fmt_sig(o.t_lr.im),
                    fmt_sig(o.t_rl.re),
                    fmt_sig(o.t_rl.im),
                    fmt_sig(o.r_lr2()),
                    fmt_sig(o.r_rl2()),
                ]
            });
            match config.format {
                Format::Csv => write_csv(out, "E,reTLR,imTLR,reTRL,imTRL,RLR2,RRL2", table)?,
                Format::Json => {
                    let keys = ["E", "reTLR", "imTLR", "reTRL", "imTRL", "RLR2", "RRL2"];
                    let objs: Vec<serde_json::Map<String, serde_json::Value>> = rows
                        .iter()
                        .map(|o| {
                            let vals = [
                                o.energy,
                                o.t_lr.re,
                                o.t_lr.im,
                                o.t_rl.re,
                                o.t_rl.im,
                                o.r_lr2(),
                                o.r_rl2(),
                            ];
                            keys.iter()
                                .zip(vals)
                                .map(|(k, v)| (k.to_string(), serde_json::json!(r(v))))
                                .collect()
                        })
                        .collect();
                    write_json(out, &objs)?;
                }
            }
        }
    }
    Ok(true)
}
