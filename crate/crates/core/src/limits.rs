//! Analytic limits used to validate the matching matrix: the real well, the
//! nonrelativistic (Schrodinger) limit and the reflectionless case of a well
//! in the space component of the vector potential.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{matching_matrix_closed_form, matching_matrix_product, Mat2};
use crate::potential::PotentialSpec;
use crate::scattering::ScatteringObservables;
use crate::spectrum::brent;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl LimitReport {
    fn new(deviation: f64, tolerance: f64) -> Self {
        Self {
            deviation,
            tolerance,
            pass: deviation < tolerance,
        }
    }
}

/// Matching matrix of a real well occupying `[0, L]`, from the standard
/// plane-wave continuity formulas.
pub fn textbook_real_well(spec: &PotentialSpec, e: f64) -> Mat2 {
    let m = spec.m;
    let len = 2.0 * spec.b;
    let k = Complex64::new((e * e - m * m).sqrt(), 0.0);
    let lam = k / (e + m);
    let d = Complex64::new(e - spec.q * spec.v0, 0.0);
    let kw = (d * d - m * m).sqrt();
    let lw = kw / (d + m);
    let (c, s) = ((kw * len).cos(), (kw * len).sin());
    let i = Complex64::i();
    let ph = (-i * k * len).exp();
    let denom = 2.0 * lam * lw;
    Mat2::new(
        ph * (c + i * s * (lam * lam + lw * lw) / denom),
        ph * i * s * (lw * lw - lam * lam) / denom,
        i * s * (lam * lam - lw * lw) / denom / ph,
        (c - i * s * (lam * lam + lw * lw) / denom) / ph,
    )
}

/// Compares the closed form at `V1 = 0` with the textbook matrix moved to a
/// well centred on the origin (`M12 = e^{2ikb} N12`, `M21 = e^{-2ikb} N21`).
pub fn real_well_limit_check(spec: &PotentialSpec, e: f64) -> Result<LimitReport> {
    if spec.v1 != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "real-well check needs v1 = 0, got {}",
            spec.v1
        )));
    }
    if e.abs() <= spec.m {
        return Err(Error::InvalidParameter(format!(
            "real-well check needs |E| > m, got {e}"
        )));
    }
    let closed = matching_matrix_closed_form(spec, e)?;
    let n = textbook_real_well(spec, e).0;
    let k = (e * e - spec.m * spec.m).sqrt();
    let shift = Complex64::from_polar(1.0, 2.0 * k * spec.b);
    let centred = Mat2::new(n[0][0], shift * n[0][1], n[1][0] / shift, n[1][1]);
    Ok(LimitReport::new(closed.entries.rel_diff(&centred), 1e-10))
}

/// Textbook quantization condition of the real well, `2 l' L cos(KL) = (L^2 - l'^2) sin(KL)`
/// with `L` the inner spinor ratio, written as a real function of `E`.
pub fn real_well_bound_condition(spec: &PotentialSpec, e: f64) -> f64 {
    let m = spec.m;
    let len = 2.0 * spec.b;
    let lp = (m * m - e * e).sqrt() / (m + e);
    let d = Complex64::new(e - spec.q * spec.v0, 0.0);
    let kw = (d * d - m * m).sqrt();
    let lw = kw / (d + m);
    let g = 2.0 * lp * lw * (kw * len).cos() - (lw * lw - lp * lp) * (kw * len).sin();
    // for an evanescent interior the whole expression is imaginary
    if (d * d - m * m).re >= 0.0 {
        g.re
    } else {
        g.im
    }
}

/// Roots of [`real_well_bound_condition`] on `(-m, m)`.
pub fn real_well_bound_states(spec: &PotentialSpec, grid_n: usize) -> Vec<f64> {
    let m = spec.m;
    let (lo, hi) = (-m + 1e-6 * m, m - 1e-6 * m);
    let f = |e: f64| real_well_bound_condition(spec, e);
    let xs: Vec<f64> = (0..grid_n)
        .map(|i| lo + (hi - lo) * i as f64 / (grid_n - 1) as f64)
        .collect();
    xs.windows(2)
        .filter(|w| f(w[0]).signum() != f(w[1]).signum())
        .filter_map(|w| brent(f, w[0], w[1], 1e-12 * m, 200))
        .collect()
}

/// Nonrelativistic matching matrix in units `2m = 1`, mapping region IV
/// coefficients onto region I coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchrodingerMatchingMatrix {
    pub entries: Mat2,
}

impl SchrodingerMatchingMatrix {
    /// Kinetic energy `eps`, potential `u_left` on `[-b, 0]` and `u_right`
    /// on `(0, b]`, all in units `2m = 1`.
    pub fn new(eps: f64, u_left: Complex64, u_right: Complex64, b: f64) -> Result<Self> {
        // columns e^{ikx} (1, k) and e^{-ikx} (1, -k): wavefunction and -i d/dx
        let omega = |k: Complex64, x: f64| {
            let ph = (Complex64::i() * k * x).exp();
            Mat2::new(ph, 1.0 / ph, k * ph, -k / ph)
        };
        let inv = |m: Mat2| m.inverse().ok_or(Error::SingularOmega { det: 0.0 });
        let k = Complex64::new(eps, 0.0).sqrt();
        let k2 = (eps - u_left).sqrt();
        let k3 = (eps - u_right).sqrt();
        let forward = inv(omega(k, b))?
            * omega(k3, b)
            * inv(omega(k3, 0.0))?
            * omega(k2, 0.0)
            * inv(omega(k2, -b))?
            * omega(k, -b);
        Ok(Self { entries: inv(forward)? })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonrelativisticReport {
    pub epsilon: f64,
    /// Entrywise deviation of `M^D` from the inverse Schrodinger matrix.
    pub deviation: f64,
    /// `|M_schr M^D - 1|`.
    pub identity_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Builds `M^D` at `E = m + epsilon` and the Schrodinger matrix of the same
/// well (lengths rescaled by `sqrt(2m)` for units `2m = 1`) and compares
/// `M^D` with the inverse of the latter.
pub fn nonrelativistic_limit_check(
    v0_hat: f64,
    v1_hat: f64,
    b_hat: f64,
    epsilon: f64,
    q: f64,
    m: f64,
) -> Result<NonrelativisticReport> {
    let small = 1e-3 * m;
    for (name, v) in [("epsilon", epsilon), ("v0", v0_hat), ("v1", v1_hat)] {
        if !(v.abs() <= small) {
            return Err(Error::ScaleViolation(format!("{name} = {v} exceeds 1e-3 m")));
        }
    }
    if !(epsilon > 0.0) {
        return Err(Error::ScaleViolation(format!("epsilon = {epsilon} must be > 0")));
    }
    let spec = PotentialSpec::new(v0_hat, v1_hat, b_hat, q, m)?;
    let dirac = matching_matrix_product(&spec, m + epsilon)?.entries;
    let schr = SchrodingerMatchingMatrix::new(
        epsilon,
        q * Complex64::new(v0_hat, -v1_hat),
        q * Complex64::new(v0_hat, v1_hat),
        (2.0 * m).sqrt() * b_hat,
    )?;
    let limit = schr.entries.inverse().ok_or(Error::SingularOmega { det: 0.0 })?;
    let deviation = dirac.rel_diff(&limit);
    let identity_residual = (schr.entries * dirac).max_abs_diff(&Mat2::identity());
    let tolerance = 50.0 * epsilon / m;
    Ok(NonrelativisticReport {
        epsilon,
        deviation,
        identity_residual,
        tolerance,
        pass: deviation < tolerance && identity_residual < tolerance,
    })
}

/// Well parameters of a fixed nonrelativistic problem approached as
/// `epsilon -> 0`.
///
/// Returns `(v0, v1, b)` with `v0 = 0.5 eps`, `v1 = 0.1 eps` and
/// `b sqrt(eps) = 0.05 / sqrt(m)`, so the Schrodinger matrix is independent
/// of `epsilon` and the relativistic corrections scale like `epsilon / m`.
pub fn nonrelativistic_family(epsilon: f64, m: f64) -> (f64, f64, f64) {
    (0.5 * epsilon, 0.1 * epsilon, 0.05 / (epsilon * m).sqrt())
}

/// Scattering for a square well in the space component of the vector
/// potential: `(A_IV, B_IV) = e^{-2 i q V0 b} (A_I, B_I)`. Reflectionless,
/// and the imaginary depth drops out.
pub fn space_component_case(spec: &PotentialSpec, e: f64) -> Result<ScatteringObservables> {
    if e.abs() <= spec.m {
        return Err(Error::InvalidParameter(format!(
            "space-component case needs |E| > m, got {e}"
        )));
    }
    let phase = 2.0 * spec.q * spec.v0 * spec.b;
    let zero = Complex64::new(0.0, 0.0);
    Ok(ScatteringObservables::from_amplitudes(
        e,
        Complex64::from_polar(1.0, -phase),
        Complex64::from_polar(1.0, phase),
        zero,
        zero,
    ))
}
