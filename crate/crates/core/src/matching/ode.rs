//! Matching matrix by direct integration of the stationary Dirac equation.
//!
//! With `alpha_x = sigma_x`, `beta = sigma_z` the equation
//! `E psi = V psi - i sigma_x psi' + m sigma_z psi` becomes
//!
//! ```text
//!   psi' = i sigma_x (E - V - m sigma_z) psi
//!        = i [[0, E - V + m], [E - V - m, 0]] psi
//! ```
//!
//! The fundamental matrix is carried from `-b` to `+b` (restarting at the
//! discontinuity `x = 0`) and converted to plane-wave coefficients with the
//! outer Omega matrices.

use num_complex::Complex64;

use super::{omega, Mat2, MatchingMatrix};
use crate::error::{Error, Result};
use crate::potential::{region_kinematics, PotentialSpec, Region};

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive Dormand-Prince integration of `y' = f(x, y)` over `[x0, x1]`
/// with mixed absolute/relative tolerance `tol`.
///
/// The local error is controlled per unit step (against `tol |h| / |x1 - x0|`),
/// so the accumulated error over the interval stays near `tol`.
pub fn dopri5<const N: usize, F>(f: F, x0: f64, x1: f64, y0: [Complex64; N], tol: f64) -> Result<[Complex64; N]>
where
    F: Fn(f64, &[Complex64; N]) -> [Complex64; N],
{
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut x = x0;
    let mut y = y0;
    let mut h = dir * (span.abs() / 100.0).min(0.1);
    let h_min = 1e-14 * span.abs().max(1.0);
    let zero = Complex64::new(0.0, 0.0);

    while dir * (x1 - x) > 0.0 {
        if dir * (x + h - x1) > 0.0 {
            h = x1 - x;
        }
        let mut k = [[zero; N]; 7];
        for s in 0..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k[s] = f(x + C[s] * h, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for i in 0..N {
            let mut d5 = zero;
            let mut d4 = zero;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += h * d5;
            let sc = (tol + tol * y[i].norm().max(y5[i].norm())) * (h.abs() / span.abs());
            err = err.max((h * (d5 - d4)).norm() / sc);
        }
        if err <= 1.0 {
            x += h;
            y = y5;
        }
        let factor = if err == 0.0 {
            5.0
        } else if err.is_finite() {
            (0.9 * err.powf(-0.25)).clamp(0.2, 5.0)
        } else {
            0.2
        };
        h *= factor;
        if h.abs() < h_min && dir * (x1 - x) > h_min {
            return Err(Error::IntegrationFailure { x });
        }
    }
    Ok(y)
}

fn dirac_rhs(e: f64, v: Complex64, m: f64) -> impl Fn(f64, &[Complex64; 4]) -> [Complex64; 4] {
    let i = Complex64::i();
    let upper = i * (e - v + m);
    let lower = i * (e - v - m);
    // state is the row-major fundamental matrix; derivative acts on rows
    move |_x, y| [upper * y[2], upper * y[3], lower * y[0], lower * y[1]]
}

/// Transfer matrix of the spinor from `-b` to `+b`.
pub fn spinor_transfer(spec: &PotentialSpec, e: f64, tol: f64) -> Result<Mat2> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let start = [one, zero, zero, one];
    let left = dopri5(
        dirac_rhs(e, spec.region_value(Region::II), spec.m),
        -spec.b,
        0.0,
        start,
        tol,
    )?;
    let full = dopri5(
        dirac_rhs(e, spec.region_value(Region::III), spec.m),
        0.0,
        spec.b,
        left,
        tol,
    )?;
    Ok(Mat2::new(full[0], full[1], full[2], full[3]))
}

/// Oracle: matching matrix from numerical integration.
pub fn matching_matrix_ode(spec: &PotentialSpec, e: f64, tol: f64) -> Result<MatchingMatrix> {
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::InvalidParameter(format!(
            "ODE tolerance {tol} outside [1e-12, 1e-4]"
        )));
    }
    let outer = region_kinematics(spec, e, Region::I)?;
    let transfer = spinor_transfer(spec, e, tol)?;
    let right = omega(outer.kj, outer.lambdaj, spec.b);
    let left = omega(outer.kj, outer.lambdaj, -spec.b);
    let inv = right.inverse().ok_or(Error::SingularOmega {
        det: right.det().norm(),
    })?;
    Ok(MatchingMatrix {
        entries: inv * transfer * left,
        energy: e,
        spec: *spec,
        log_scale: 0.0,
    })
}
