//! Dirac matching matrix of the square well.
//!
//! `M` maps the plane-wave coefficients on the far left onto those on the far
//! right, `(A_IV, B_IV) = M (A_I, B_I)`. Three constructions are provided:
//! the closed form used in production, the explicit product of Omega
//! matrices, and direct integration of the Dirac equation ([`ode`]).

mod mat2;
pub mod ode;

pub use mat2::Mat2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{
    analytic_kinematics, outer_bound_kinematics, region_kinematics, well_parameterization, PotentialSpec, Region,
};

/// Above this value of `2 b |Im K|` the hyperbolic terms are evaluated with
/// the growing exponential factored out.
pub const OVERFLOW_EXPONENT: f64 = 700.0;

/// Omega matrix of one region evaluated at a coordinate.
///
/// Its columns are the spinors `e^{ikx} (1, lambda)` and `e^{-ikx} (1, -lambda)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmegaMatrix {
    pub region: Region,
    pub x: f64,
    pub entries: Mat2,
}

impl OmegaMatrix {
    pub fn det(&self) -> Complex64 {
        self.entries.det()
    }
}

pub fn omega(k: Complex64, lambda: Complex64, x: f64) -> Mat2 {
    let ph = (Complex64::i() * k * x).exp();
    let phm = (-Complex64::i() * k * x).exp();
    Mat2::new(ph, phm, lambda * ph, -lambda * phm)
}

pub fn omega_matrix(spec: &PotentialSpec, e: f64, region: Region, x: f64) -> Result<OmegaMatrix> {
    let kin = region_kinematics(spec, e, region)?;
    Ok(OmegaMatrix {
        region,
        x,
        entries: omega(kin.kj, kin.lambdaj, x),
    })
}

/// The matching matrix at one energy.
///
/// When `log_scale > 0` the stored entries are the true entries multiplied
/// by `exp(-log_scale)`; this only happens deep inside evanescent regions
/// where the true entries overflow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchingMatrix {
    pub entries: Mat2,
    pub energy: f64,
    pub spec: PotentialSpec,
    pub log_scale: f64,
}

impl MatchingMatrix {
    pub fn m11(&self) -> Complex64 {
        self.entries.0[0][0]
    }
    pub fn m12(&self) -> Complex64 {
        self.entries.0[0][1]
    }
    pub fn m21(&self) -> Complex64 {
        self.entries.0[1][0]
    }
    pub fn m22(&self) -> Complex64 {
        self.entries.0[1][1]
    }

    pub fn is_scaled(&self) -> bool {
        self.log_scale > 0.0
    }

    /// `|det M - 1|` measured against the size of the two products that
    /// cancel in the determinant.
    pub fn det_residual(&self) -> f64 {
        let m = &self.entries.0;
        let scale = (m[0][0] * m[1][1]).norm() + (m[0][1] * m[1][0]).norm();
        let target = (-2.0 * self.log_scale).exp();
        let floor = if self.is_scaled() { f64::MIN_POSITIVE } else { 1.0 };
        (self.entries.det() - target).norm() / scale.max(target).max(floor)
    }

    /// `|M22 - conj(M11)|` relative to `max(1, |M11|)`.
    pub fn conjugacy_residual(&self) -> f64 {
        (self.m22() - self.m11().conj()).norm() / self.m11().norm().max(1.0)
    }

    /// Largest real part of the off-diagonal entries relative to the matrix size.
    pub fn offdiag_real_residual(&self) -> f64 {
        self.m12().re.abs().max(self.m21().re.abs()) / self.entries.max_abs().max(1.0)
    }
}

/// Trigonometric and hyperbolic factors of the well, possibly scaled by
/// `exp(-log_scale)`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct WellTrig {
    pub ch: f64,
    pub sh: f64,
    /// `exp(2b Im K)` and `exp(-2b Im K)`.
    pub ep: f64,
    pub em: f64,
    pub c: f64,
    pub s: f64,
    pub log_scale: f64,
}

impl WellTrig {
    pub fn new(b: f64, k: Complex64) -> Self {
        let x = 2.0 * b * k.im;
        let y = 2.0 * b * k.re;
        if x.abs() <= OVERFLOW_EXPONENT {
            WellTrig {
                ch: x.cosh(),
                sh: x.sinh(),
                ep: x.exp(),
                em: (-x).exp(),
                c: y.cos(),
                s: y.sin(),
                log_scale: 0.0,
            }
        } else {
            let ax = x.abs();
            let tail = (-2.0 * ax).exp();
            let damp = (-ax).exp();
            let (ep, em) = if x > 0.0 { (1.0, tail) } else { (tail, 1.0) };
            WellTrig {
                ch: 0.5 * (1.0 + tail),
                sh: x.signum() * 0.5 * (1.0 - tail),
                ep,
                em,
                c: y.cos() * damp,
                s: y.sin() * damp,
                log_scale: ax,
            }
        }
    }
}

/// Closed form in terms of the outer `(k, lambda)` and the inner `(K, Lambda)`
/// of region II; `k` and `lambda` are real on the scattering axis.
pub(crate) fn closed_form_entries(
    k: f64,
    lambda: f64,
    well_k: Complex64,
    well_lambda: Complex64,
    b: f64,
) -> (Mat2, f64) {
    let t = WellTrig::new(b, well_k);
    let (re_l, im_l) = (well_lambda.re, well_lambda.im);
    let a2 = well_lambda.norm_sqr();
    let abs_l = well_lambda.norm();
    let f_minus = (lambda - abs_l) * (lambda + abs_l) / (2.0 * lambda * a2);
    let f_plus = (lambda * lambda + a2) / (2.0 * lambda * a2);
    // |lambda + Lambda|^2 and |lambda - Lambda|^2
    let p = (well_lambda + lambda).norm_sqr();
    let q = (well_lambda - lambda).norm_sqr();
    let d = 4.0 * lambda * a2;

    let diag = Complex64::new(
        im_l * im_l / a2 * t.ch + re_l * re_l / a2 * t.c,
        im_l * t.sh * f_minus + re_l * t.s * f_plus,
    );
    let m11 = Complex64::from_polar(1.0, -2.0 * k * b) * diag;
    let even = re_l * im_l / a2 * t.c;
    let osc = re_l * t.s * f_minus;
    let m12 = Complex64::new(0.0, even - osc - im_l * (t.ep * p - t.em * q) / d);
    let m21 = Complex64::new(0.0, even + osc + im_l * (t.ep * q - t.em * p) / d);
    (Mat2::new(m11, m12, m21, m11.conj()), t.log_scale)
}

/// Production path: explicit formulas for the four entries.
pub fn matching_matrix_closed_form(spec: &PotentialSpec, e: f64) -> Result<MatchingMatrix> {
    let outer = region_kinematics(spec, e, Region::I)?;
    if e.abs() <= spec.m {
        return Err(Error::InvalidParameter(format!(
            "closed form needs scattering kinematics |E| > m, got E = {e}"
        )));
    }
    // band-edge checks for the well regions
    region_kinematics(spec, e, Region::II)?;
    let w = well_parameterization(spec, e)?;
    let (entries, log_scale) = closed_form_entries(outer.kj.re, outer.lambdaj.re, w.k, w.lambda, spec.b);
    Ok(MatchingMatrix {
        entries,
        energy: e,
        spec: *spec,
        log_scale,
    })
}

fn checked_inverse(m: &Mat2) -> Result<Mat2> {
    let det = m.det().norm();
    if det < 1e-14 {
        return Err(Error::SingularOmega { det });
    }
    m.inverse().ok_or(Error::SingularOmega { det })
}

/// The three boundary maps `Omega_{J+1}^{-1}(x_b) Omega_J(x_b)` at
/// `x = -b, 0, +b`.
fn boundary_maps(spec: &PotentialSpec, e: f64) -> Result<[Mat2; 3]> {
    let kin = |r| region_kinematics(spec, e, r);
    let (k1, k2, k3, k4) = (kin(Region::I)?, kin(Region::II)?, kin(Region::III)?, kin(Region::IV)?);
    let b = spec.b;
    let step = |from: &crate::potential::RegionKinematics, to: &crate::potential::RegionKinematics, x: f64| {
        Ok::<_, Error>(checked_inverse(&omega(to.kj, to.lambdaj, x))? * omega(from.kj, from.lambdaj, x))
    };
    Ok([step(&k1, &k2, -b)?, step(&k2, &k3, 0.0)?, step(&k3, &k4, b)?])
}

/// Oracle: the six-factor product of Omega matrices.
///
/// Valid for any admissible real energy; for `|E| < m` the outer regions use
/// the bound-state branch `k = i k'`.
pub fn matching_matrix_product(spec: &PotentialSpec, e: f64) -> Result<MatchingMatrix> {
    let [a, b, c] = boundary_maps(spec, e)?;
    Ok(MatchingMatrix {
        entries: c * b * a,
        energy: e,
        spec: *spec,
        log_scale: 0.0,
    })
}

/// Six-factor product at a complex energy, with every momentum an analytic
/// function of `E` and the outer regions on the bound-state sheet.
pub fn matching_product_complex(spec: &PotentialSpec, e: Complex64) -> Mat2 {
    let m = spec.m;
    let (k, l) = outer_bound_kinematics(e, m);
    let (k2, l2) = analytic_kinematics(e, spec.region_value(Region::II), m);
    let (k3, l3) = analytic_kinematics(e, spec.region_value(Region::III), m);
    let b = spec.b;
    let inv = |x: Mat2| {
        x.inverse()
            .unwrap_or_else(|| Mat2::diag(f64::NAN.into(), f64::NAN.into()))
    };
    inv(omega(k, l, b))
        * omega(k3, l3, b)
        * inv(omega(k3, l3, 0.0))
        * omega(k2, l2, 0.0)
        * inv(omega(k2, l2, -b))
        * omega(k, l, -b)
}

/// Right- and left-moving amplitudes `(A_J, B_J)` of one region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionCoefficients {
    pub a: Complex64,
    pub b: Complex64,
}

impl SolutionCoefficients {
    pub fn new(a: Complex64, b: Complex64) -> Self {
        Self { a, b }
    }

    fn as_array(&self) -> [Complex64; 2] {
        [self.a, self.b]
    }
}

/// Coefficients in regions I..IV obtained by imposing continuity at each
/// boundary, starting from the region I amplitudes.
pub fn propagate_coefficients(
    spec: &PotentialSpec,
    e: f64,
    coeffs_i: SolutionCoefficients,
) -> Result<[SolutionCoefficients; 4]> {
    let maps = boundary_maps(spec, e)?;
    let mut out = [coeffs_i; 4];
    for (i, map) in maps.iter().enumerate() {
        let [a, b] = map.apply(out[i].as_array());
        out[i + 1] = SolutionCoefficients::new(a, b);
    }
    Ok(out)
}
