//! Transmission and reflection amplitudes, the S matrix and energy scans.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{matching_matrix_closed_form, Mat2, MatchingMatrix};
use crate::potential::PotentialSpec;

/// `|M22|` below this value on the scattering axis is reported as a pole.
pub const POLE_THRESHOLD: f64 = 1e-13;

/// Flux gains with magnitude below this are treated as exactly zero.
pub const ZERO_GAIN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringObservables {
    pub energy: f64,
    pub t_lr: Complex64,
    pub t_rl: Complex64,
    pub r_lr: Complex64,
    pub r_rl: Complex64,
    /// `[[T_LR, R_RL], [R_LR, T_RL]]`
    pub s_matrix: Mat2,
    /// `|T|^2 + |R_LR|^2 - 1`
    pub flux_gain_lr: f64,
    /// `|T|^2 + |R_RL|^2 - 1`
    pub flux_gain_rl: f64,
}

impl ScatteringObservables {
    pub fn from_amplitudes(energy: f64, t_lr: Complex64, t_rl: Complex64, r_lr: Complex64, r_rl: Complex64) -> Self {
        Self {
            energy,
            t_lr,
            t_rl,
            r_lr,
            r_rl,
            s_matrix: Mat2::new(t_lr, r_rl, r_lr, t_rl),
            flux_gain_lr: t_lr.norm_sqr() + r_lr.norm_sqr() - 1.0,
            flux_gain_rl: t_rl.norm_sqr() + r_rl.norm_sqr() - 1.0,
        }
    }

    /// Observables from a matching matrix.
    pub fn from_matching(m: &MatchingMatrix) -> Result<Self> {
        let m22 = m.m22();
        if !m.is_scaled() && m22.norm() < POLE_THRESHOLD {
            return Err(Error::TransmissionPole {
                energy: m.energy,
                m22_abs: m22.norm(),
            });
        }
        let t = (-m.log_scale).exp() / m22;
        let r_lr = -m.m21() / m22;
        let r_rl = m.m12() / m22;
        Ok(Self::from_amplitudes(m.energy, t, t, r_lr, r_rl))
    }

    pub fn t2(&self) -> f64 {
        self.t_lr.norm_sqr()
    }
    pub fn r_lr2(&self) -> f64 {
        self.r_lr.norm_sqr()
    }
    pub fn r_rl2(&self) -> f64 {
        self.r_rl.norm_sqr()
    }
    pub fn det_s(&self) -> Complex64 {
        self.s_matrix.det()
    }
}

/// Observables at one scattering energy, `|E| > m`.
pub fn scattering_observables(spec: &PotentialSpec, e: f64) -> Result<ScatteringObservables> {
    let m = matching_matrix_closed_form(spec, e)?;
    ScatteringObservables::from_matching(&m)
}

/// One grid point of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScanPoint {
    Regular(ScatteringObservables),
    Pole { energy: f64, m22_abs: f64 },
}

impl ScanPoint {
    pub fn energy(&self) -> f64 {
        match self {
            ScanPoint::Regular(o) => o.energy,
            ScanPoint::Pole { energy, .. } => *energy,
        }
    }

    pub fn observables(&self) -> Option<&ScatteringObservables> {
        match self {
            ScanPoint::Regular(o) => Some(o),
            ScanPoint::Pole { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub energy: f64,
    pub t2_peak: f64,
    /// Half width at half maximum, when both crossings lie inside the scan.
    pub half_width: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub spec: PotentialSpec,
    pub e_min: f64,
    pub e_max: f64,
    pub n: usize,
    pub exclusion_half_width: f64,
    pub points: Vec<ScanPoint>,
    /// Transmission resonances in the default window `[-2m, -m]`.
    pub resonances: Vec<Resonance>,
}

impl ScanResult {
    pub fn grid(&self) -> Vec<f64> {
        self.points.iter().map(ScanPoint::energy).collect()
    }

    pub fn observables(&self) -> impl Iterator<Item = &ScatteringObservables> {
        self.points.iter().filter_map(ScanPoint::observables)
    }
}

/// Uniform grid of `n` energies on `[e_min, e_max]`, without the points
/// within `exclusion` of a band edge or inside the gap `(-m, m)`.
pub fn scan_grid(spec: &PotentialSpec, e_min: f64, e_max: f64, n: usize, exclusion: f64) -> Vec<f64> {
    let edges = spec.band_edges();
    let step = if n > 1 { (e_max - e_min) / (n - 1) as f64 } else { 0.0 };
    (0..n)
        .map(|i| if i + 1 == n { e_max } else { e_min + step * i as f64 })
        .filter(|e| e.abs() > spec.m)
        .filter(|e| {
            edges
                .iter()
                .all(|edge| (e - edge).abs() > exclusion.max(crate::potential::BAND_EDGE_TOL * spec.m))
        })
        .collect()
}

/// Scattering observables on a uniform energy grid.
///
/// Points are evaluated in parallel; the output order is the grid order.
pub fn energy_scan(spec: &PotentialSpec, e_min: f64, e_max: f64, n: usize, exclusion: f64) -> Result<ScanResult> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("scan needs n >= 2, got {n}")));
    }
    if !(e_min < e_max) || !e_min.is_finite() || !e_max.is_finite() {
        return Err(Error::InvalidParameter(format!("bad energy range [{e_min}, {e_max}]")));
    }
    if !(exclusion >= 0.0) {
        return Err(Error::InvalidParameter(format!("exclusion half-width {exclusion} < 0")));
    }
    let grid = scan_grid(spec, e_min, e_max, n, exclusion);
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let points = grid
        .par_iter()
        .map(|&e| match scattering_observables(spec, e) {
            Ok(o) => Ok(ScanPoint::Regular(o)),
            Err(Error::TransmissionPole { energy, m22_abs }) => Ok(ScanPoint::Pole { energy, m22_abs }),
            Err(other) => Err(other),
        })
        .collect::<Result<Vec<_>>>()?;
    let mut scan = ScanResult {
        spec: *spec,
        e_min,
        e_max,
        n,
        exclusion_half_width: exclusion,
        points,
        resonances: Vec::new(),
    };
    scan.resonances = find_transmission_resonances(&scan, (-2.0 * spec.m, -spec.m));
    Ok(scan)
}

/// Local maxima of `|T|^2` inside `window`, refined by a three-point parabola
/// through `ln |T|^2`. Sorted by energy.
pub fn find_transmission_resonances(scan: &ScanResult, window: (f64, f64)) -> Vec<Resonance> {
    let (lo, hi) = window;
    // maximal runs of consecutive regular points
    let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
    for p in &scan.points {
        match p.observables() {
            Some(o) => runs.last_mut().unwrap().push((o.energy, o.t2())),
            None => runs.push(Vec::new()),
        }
    }

    let mut out = Vec::new();
    for run in runs.iter().filter(|r| r.len() >= 3) {
        for i in 1..run.len() - 1 {
            let (e, t) = run[i];
            if e < lo || e > hi || !(t > run[i - 1].1 && t >= run[i + 1].1) || t <= 0.0 {
                continue;
            }
            let (energy, t2_peak) = parabolic_peak(run[i - 1], run[i], run[i + 1]);
            out.push(Resonance {
                energy,
                t2_peak,
                half_width: half_width(run, i, t2_peak),
            });
        }
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    out
}

fn parabolic_peak(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> (f64, f64) {
    let (x0, x1, x2) = (a.0, b.0, c.0);
    let (y0, y1, y2) = (a.1.ln(), b.1.ln(), c.1.ln());
    if !(y0.is_finite() && y2.is_finite()) {
        return b;
    }
    // Newton form of the interpolating parabola
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let curv = (d12 - d01) / (x2 - x0);
    if !(curv < 0.0) {
        return b;
    }
    let x = 0.5 * (x0 + x1) - d01 / (2.0 * curv);
    let x = x.clamp(x0, x2);
    let y = y0 + d01 * (x - x0) + curv * (x - x0) * (x - x1);
    (x, y.exp())
}

fn half_width(run: &[(f64, f64)], peak: usize, t2_peak: f64) -> Option<f64> {
    let half = 0.5 * t2_peak;
    let crossing = |i: usize, j: usize| {
        let (ea, ta) = run[i];
        let (eb, tb) = run[j];
        ea + (half - ta) * (eb - ea) / (tb - ta)
    };
    let left = (1..=peak)
        .rev()
        .find(|&i| run[i - 1].1 < half)
        .map(|i| crossing(i - 1, i))?;
    let right = (peak..run.len() - 1)
        .find(|&i| run[i + 1].1 < half)
        .map(|i| crossing(i, i + 1))?;
    Some(0.5 * (right - left))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FluxBehaviour {
    /// `|T|^2 + |R|^2 < 1` everywhere, both directions.
    Absorptive,
    /// `|T|^2 + |R|^2 > 1` everywhere, both directions.
    Generative,
    Intermediate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FluxClassification {
    pub behaviour: FluxBehaviour,
    /// Every gain vanished to within [`ZERO_GAIN_TOL`] (unitary scattering).
    pub zero_gain: bool,
}

pub fn flux_gain_classification(scan: &ScanResult) -> Result<FluxClassification> {
    let gains: Vec<f64> = scan
        .observables()
        .flat_map(|o| [o.flux_gain_lr, o.flux_gain_rl])
        .collect();
    if gains.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if gains.iter().all(|g| g.abs() <= ZERO_GAIN_TOL) {
        return Ok(FluxClassification {
            behaviour: FluxBehaviour::Intermediate,
            zero_gain: true,
        });
    }
    let behaviour = if gains.iter().all(|&g| g < 0.0) {
        FluxBehaviour::Absorptive
    } else if gains.iter().all(|&g| g > 0.0) {
        FluxBehaviour::Generative
    } else {
        FluxBehaviour::Intermediate
    };
    Ok(FluxClassification {
        behaviour,
        zero_gain: false,
    })
}
