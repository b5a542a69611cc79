//! Oracle suite: independent constructions of the matching matrix and the
//! analytic limits, evaluated on seeded random draws and fixed grids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::limits::{nonrelativistic_family, nonrelativistic_limit_check, real_well_limit_check, space_component_case};
use crate::matching::ode::matching_matrix_ode;
use crate::matching::{matching_matrix_closed_form, matching_matrix_product};
use crate::potential::PotentialSpec;
use crate::scattering::{energy_scan, flux_gain_classification};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub draws: usize,
    pub ode_draws: usize,
    pub ode_tol: f64,
    pub m: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            draws: 10_000,
            ode_draws: 100,
            ode_tol: 1e-8,
            m: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Worst value observed.
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tolerance,
            pass: value < tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: VerifyConfig,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// A random well and scattering energy: `V0 in (0, 5]`, `V1 in [0, 1]`,
/// `b in (0, 10]` (in units of `m`) and `|E| in (m, 10m]` with random sign.
pub fn sample_admissible<R: Rng>(rng: &mut R, m: f64) -> (PotentialSpec, f64) {
    loop {
        let v0 = m * (5.0 - rng.gen_range(0.0..5.0));
        let v1 = m * rng.gen_range(0.0..=1.0);
        let b = (10.0 - rng.gen_range(0.0..10.0)) / m;
        let mag = m * (10.0 - rng.gen_range(0.0..9.0));
        let e = if rng.gen_bool(0.5) { mag } else { -mag };
        let Ok(spec) = PotentialSpec::new(v0, v1, b, -1.0, m) else {
            continue;
        };
        if e.abs() > m && matching_matrix_closed_form(&spec, e).is_ok() {
            return (spec, e);
        }
    }
}

/// Worst-case residuals of the matching-matrix identities over random draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityResiduals {
    pub det: f64,
    pub conjugacy: f64,
    pub closed_vs_product: f64,
    pub closed_vs_ode: f64,
}

pub fn identity_residuals(config: &VerifyConfig) -> Result<IdentityResiduals> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut worst = IdentityResiduals {
        det: 0.0,
        conjugacy: 0.0,
        closed_vs_product: 0.0,
        closed_vs_ode: 0.0,
    };
    for i in 0..config.draws {
        let (spec, e) = sample_admissible(&mut rng, config.m);
        let closed = matching_matrix_closed_form(&spec, e)?;
        worst.det = worst.det.max(closed.det_residual());
        worst.conjugacy = worst.conjugacy.max(closed.conjugacy_residual());
        if closed.is_scaled() {
            continue;
        }
        let product = matching_matrix_product(&spec, e)?;
        worst.closed_vs_product = worst.closed_vs_product.max(closed.entries.rel_diff(&product.entries));
        if i < config.ode_draws {
            let ode = matching_matrix_ode(&spec, e, config.ode_tol)?;
            worst.closed_vs_ode = worst.closed_vs_ode.max(closed.entries.rel_diff(&ode.entries));
        }
    }
    Ok(worst)
}

/// Worst deviation from the textbook real well over `n` energies with
/// `|E| in (m, 8m]`.
pub fn real_well_sweep(v0: f64, b: f64, m: f64, n: usize) -> Result<f64> {
    let spec = PotentialSpec::new(v0, 0.0, b, -1.0, m)?;
    let mut worst = 0.0f64;
    for i in 1..=n {
        let mag = m + 7.0 * m * i as f64 / n as f64;
        for e in [mag, -mag] {
            match real_well_limit_check(&spec, e) {
                Ok(r) => worst = worst.max(r.deviation),
                Err(crate::Error::BandEdgeDegeneracy { .. }) => {}
                Err(other) => return Err(other),
            }
        }
    }
    Ok(worst)
}

pub fn run_verification(config: &VerifyConfig) -> Result<VerificationReport> {
    let m = config.m;
    let ids = identity_residuals(config)?;
    let mut checks = vec![
        Check::new("det_m_equals_one", ids.det, 1e-10),
        Check::new("m22_equals_conj_m11", ids.conjugacy, 1e-10),
        Check::new("closed_form_vs_product", ids.closed_vs_product, 1e-10),
        Check::new("closed_form_vs_ode", ids.closed_vs_ode, 1e-6),
        Check::new("real_well_limit", real_well_sweep(3.0 * m, 5.0 / m, m, 4001)?, 1e-10),
    ];

    let real = PotentialSpec::new(3.0 * m, 0.0, 5.0 / m, -1.0, m)?;
    let scan = energy_scan(&real, -8.0 * m, 8.0 * m, 4001, 1e-6 * m)?;
    let gain = scan
        .observables()
        .map(|o| o.flux_gain_lr.abs().max(o.flux_gain_rl.abs()))
        .fold(0.0, f64::max);
    checks.push(Check::new("real_well_unitarity", gain, 1e-10));
    let unitary = flux_gain_classification(&scan)?.zero_gain;
    checks.push(Check::new("real_well_zero_gain", if unitary { 0.0 } else { 1.0 }, 0.5));

    let mut nr = 0.0f64;
    for eps in [1e-4 * m, 1e-5 * m] {
        let (v0, v1, b) = nonrelativistic_family(eps, m);
        let r = nonrelativistic_limit_check(v0, v1, b, eps, -1.0, m)?;
        nr = nr.max(r.deviation.max(r.identity_residual) / r.tolerance);
    }
    checks.push(Check::new("nonrelativistic_limit_ratio", nr, 1.0));

    let pt = PotentialSpec::new(3.0 * m, 0.25 * m, 5.0 / m, -1.0, m)?;
    let mut sc = 0.0f64;
    for e in [1.5 * m, -2.5 * m, 6.0 * m] {
        let o = space_component_case(&pt, e)?;
        sc = sc
            .max((o.t2() - 1.0).abs())
            .max(o.r_lr.norm())
            .max(o.r_rl.norm())
            .max((o.det_s().norm() - 1.0).abs());
    }
    checks.push(Check::new("space_component_reflectionless", sc, 1e-12));

    Ok(VerificationReport {
        config: *config,
        checks,
    })
}
