//! The PT-symmetric square well and the plane-wave kinematics in each of its
//! four regions.
//!
//! Units are natural (hbar = c = 1): energies and depths are measured in the
//! same unit as the mass `m`, lengths in `1/m`.
//!
//! ```text
//!   V(x) = 0              x < -b        (I)
//!          q (V0 - i V1)  -b <= x <= 0  (II)
//!          q (V0 + i V1)  0 < x <= b    (III)
//!          0              x > b         (IV)
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative distance to a band edge below which an energy is rejected.
pub const BAND_EDGE_TOL: f64 = 1e-12;

/// Parameters of the square well.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    /// Real depth.
    pub v0: f64,
    /// Imaginary depth.
    pub v1: f64,
    /// Half-width.
    pub b: f64,
    /// Charge, -1 for particles.
    pub q: f64,
    /// Particle mass.
    pub m: f64,
}

impl PotentialSpec {
    /// Validated constructor.
    ///
    /// `v0 = 0` and `b = 0` are accepted so that the free problem can be
    /// expressed with the same type.
    pub fn new(v0: f64, v1: f64, b: f64, q: f64, m: f64) -> Result<Self> {
        let spec = Self { v0, v1, b, q, m };
        spec.validate()?;
        Ok(spec)
    }

    /// Well with the default charge `q = -1` and unit mass.
    pub fn particle(v0: f64, v1: f64, b: f64) -> Result<Self> {
        Self::new(v0, v1, b, -1.0, 1.0)
    }

    /// Zero potential.
    pub fn free(m: f64) -> Self {
        Self {
            v0: 0.0,
            v1: 0.0,
            b: 0.0,
            q: -1.0,
            m,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.v0, self.v1, self.b, self.q, self.m].iter().all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("non-finite well parameter".into()));
        }
        if self.v0 < 0.0 {
            return Err(Error::InvalidParameter(format!("v0 = {} must be >= 0", self.v0)));
        }
        if self.v1 < 0.0 {
            return Err(Error::InvalidParameter(format!("v1 = {} must be >= 0", self.v1)));
        }
        if self.b < 0.0 {
            return Err(Error::InvalidParameter(format!("b = {} must be >= 0", self.b)));
        }
        if self.m <= 0.0 {
            return Err(Error::InvalidParameter(format!("m = {} must be > 0", self.m)));
        }
        if self.q != 1.0 && self.q != -1.0 {
            return Err(Error::InvalidParameter(format!("q = {} must be +1 or -1", self.q)));
        }
        Ok(())
    }

    pub fn with_v1(&self, v1: f64) -> Result<Self> {
        Self::new(self.v0, v1, self.b, self.q, self.m)
    }

    /// Constant potential value in `region`.
    pub fn region_value(&self, region: Region) -> Complex64 {
        match region {
            Region::I | Region::IV => Complex64::new(0.0, 0.0),
            Region::II => self.q * Complex64::new(self.v0, -self.v1),
            Region::III => self.q * Complex64::new(self.v0, self.v1),
        }
    }

    /// Energies at which some region has `E - V = +-m` on the real axis.
    ///
    /// The outer edges `+-m` are always present; the shifted edges inside the
    /// well only exist when the well is real.
    pub fn band_edges(&self) -> Vec<f64> {
        let mut edges = vec![-self.m, self.m];
        if self.v1 == 0.0 && self.v0 != 0.0 && self.b > 0.0 {
            edges.push(self.q * self.v0 - self.m);
            edges.push(self.q * self.v0 + self.m);
        }
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        edges
    }
}

/// The four regions of the x axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    I,
    II,
    III,
    IV,
}

impl Region {
    pub const ALL: [Region; 4] = [Region::I, Region::II, Region::III, Region::IV];
}

/// Complex potential at coordinate `x`. The point `x = 0` belongs to region II.
pub fn potential_at(spec: &PotentialSpec, x: f64) -> Complex64 {
    spec.region_value(region_of(spec, x))
}

pub fn region_of(spec: &PotentialSpec, x: f64) -> Region {
    if x < -spec.b {
        Region::I
    } else if x <= 0.0 {
        Region::II
    } else if x <= spec.b {
        Region::III
    } else {
        Region::IV
    }
}

/// Checks `V(x) = conj(V(-x))` for the square well on `grid`.
pub fn pt_conjugate_check(spec: &PotentialSpec, grid: &[f64]) -> bool {
    pt_conjugate_check_with(|x| potential_at(spec, x), grid)
}

/// Checks `V(x) = conj(V(-x))` for an arbitrary potential.
///
/// The origin is skipped: a step potential takes its two one-sided values
/// there and no single value can satisfy the condition.
pub fn pt_conjugate_check_with<F>(potential: F, grid: &[f64]) -> bool
where
    F: Fn(f64) -> Complex64,
{
    grid.iter().filter(|&&x| x != 0.0).all(|&x| {
        let v = potential(x);
        let mirrored = potential(-x).conj();
        (v - mirrored).norm() <= 1e-15 * v.norm().max(1.0)
    })
}

/// Momentum and spinor ratio of the plane waves in one region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionKinematics {
    pub region: Region,
    pub vj: Complex64,
    pub kj: Complex64,
    pub lambdaj: Complex64,
}

/// Per-region kinematics at real energy `e`.
///
/// Outside the well the scattering branch `k = sqrt(E^2 - m^2) > 0` is used
/// for `|E| > m` and the bound-state branch `k = i sqrt(m^2 - E^2)` for
/// `|E| < m`. Inside the well the momentum follows the two-argument
/// parameterization of [`well_parameterization`]; region III is the exact
/// conjugate of region II.
pub fn region_kinematics(spec: &PotentialSpec, e: f64, region: Region) -> Result<RegionKinematics> {
    let m = spec.m;
    match region {
        Region::I | Region::IV => {
            check_edge(e, m, m)?;
            check_edge(e, -m, m)?;
            let (kj, lambdaj) = if e.abs() > m {
                let k = (e * e - m * m).sqrt();
                (Complex64::new(k, 0.0), Complex64::new(k / (e + m), 0.0))
            } else {
                let kp = (m * m - e * e).sqrt();
                (Complex64::new(0.0, kp), Complex64::new(0.0, kp / (m + e)))
            };
            Ok(RegionKinematics {
                region,
                vj: Complex64::new(0.0, 0.0),
                kj,
                lambdaj,
            })
        }
        Region::II => {
            if spec.v1 == 0.0 {
                check_edge(e, spec.q * spec.v0 + m, m)?;
                check_edge(e, spec.q * spec.v0 - m, m)?;
            }
            let w = well_parameterization(spec, e).map_err(|_| Error::BandEdgeDegeneracy {
                energy: e,
                edge: spec.q * spec.v0,
            })?;
            Ok(RegionKinematics {
                region,
                vj: spec.region_value(Region::II),
                kj: w.k,
                lambdaj: w.lambda,
            })
        }
        Region::III => {
            let ii = region_kinematics(spec, e, Region::II)?;
            Ok(RegionKinematics {
                region,
                vj: ii.vj.conj(),
                kj: ii.kj.conj(),
                lambdaj: ii.lambdaj.conj(),
            })
        }
    }
}

fn check_edge(e: f64, edge: f64, m: f64) -> Result<()> {
    if (e - edge).abs() <= BAND_EDGE_TOL * m.max(edge.abs()) {
        Err(Error::BandEdgeDegeneracy { energy: e, edge })
    } else {
        Ok(())
    }
}

/// Polar parameterization of the momentum and spinor ratio inside the well.
///
/// With `alpha_pm * exp(i phi_pm) = E - q V0 +- m + i q V1`:
///
/// ```text
///   K      = sqrt(alpha_+ alpha_-) exp(i (phi_+ + phi_-) / 2)
///   Lambda = sqrt(alpha_- / alpha_+) exp(i (phi_- - phi_+) / 2)  = K / (E - V_II + m)
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellParameterization {
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub phi_plus: f64,
    pub phi_minus: f64,
    pub k: Complex64,
    pub lambda: Complex64,
}

pub fn well_parameterization(spec: &PotentialSpec, e: f64) -> Result<WellParameterization> {
    let shifted = e - spec.q * spec.v0;
    let im = spec.q * spec.v1;
    let alpha_plus = (shifted + spec.m).hypot(im);
    let alpha_minus = (shifted - spec.m).hypot(im);
    if alpha_minus == 0.0 || alpha_plus == 0.0 {
        return Err(Error::DegenerateParameterization { energy: e });
    }
    let phi_plus = im.atan2(shifted + spec.m);
    let phi_minus = im.atan2(shifted - spec.m);
    let k = Complex64::from_polar((alpha_plus * alpha_minus).sqrt(), 0.5 * (phi_plus + phi_minus));
    let lambda = Complex64::from_polar((alpha_minus / alpha_plus).sqrt(), 0.5 * (phi_minus - phi_plus));
    Ok(WellParameterization {
        alpha_plus,
        alpha_minus,
        phi_plus,
        phi_minus,
        k,
        lambda,
    })
}

/// Momentum and spinor ratio for a complex energy, as analytic functions of
/// `E` (principal square root). Used for continuation off the real axis.
pub fn analytic_kinematics(e: Complex64, v: Complex64, m: f64) -> (Complex64, Complex64) {
    let d = e - v;
    let k = (d * d - m * m).sqrt();
    (k, k / (d + m))
}

/// Bound-state branch of the outer momentum for a complex energy:
/// `k = i k'`, `k' = sqrt(m^2 - E^2)` with `Re k' >= 0`.
pub fn outer_bound_kinematics(e: Complex64, m: f64) -> (Complex64, Complex64) {
    let kp = (m * m - e * e).sqrt();
    let k = Complex64::i() * kp;
    (k, k / (e + m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_well(v1: f64) -> PotentialSpec {
        PotentialSpec::particle(3.0, v1, 5.0).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn potential_values_per_region() {
        let s = reference_well(0.25);
        assert_eq!(potential_at(&s, -2.0), Complex64::new(-3.0, 0.25));
        assert_eq!(potential_at(&s, 50.0), Complex64::new(0.0, 0.0));
        assert_eq!(potential_at(&s, -50.0), Complex64::new(0.0, 0.0));
        assert_eq!(potential_at(&reference_well(0.5), 2.0), Complex64::new(-3.0, -0.5));
        // origin and edges
        assert_eq!(potential_at(&s, 0.0), s.region_value(Region::II));
        assert_eq!(potential_at(&s, -5.0), s.region_value(Region::II));
        assert_eq!(potential_at(&s, 5.0), s.region_value(Region::III));
    }

    #[test]
    fn pt_condition() {
        let grid: Vec<f64> = (0..101).map(|i| -10.0 + 0.2 * i as f64).collect();
        assert!(pt_conjugate_check(&reference_well(0.25), &grid));
        assert!(pt_conjugate_check(&reference_well(0.0), &grid));
        let asym = |x: f64| {
            if x.abs() <= 5.0 {
                Complex64::new(-3.0, 0.25)
            } else {
                Complex64::new(0.0, 0.0)
            }
        };
        assert!(!pt_conjugate_check_with(asym, &grid));
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(PotentialSpec::new(3.0, -0.1, 5.0, -1.0, 1.0).is_err());
        assert!(PotentialSpec::new(3.0, 0.1, 5.0, 0.5, 1.0).is_err());
        assert!(PotentialSpec::new(3.0, 0.1, 5.0, -1.0, 0.0).is_err());
        assert!(PotentialSpec::new(f64::NAN, 0.1, 5.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn outer_kinematics() {
        let s = reference_well(0.0);
        let r = region_kinematics(&s, 2.0, Region::I).unwrap();
        assert!((r.kj.re - 3f64.sqrt()).abs() < 1e-15 && r.kj.im == 0.0);
        assert!((r.lambdaj.re - 3f64.sqrt() / 3.0).abs() < 1e-15);
        let r = region_kinematics(&s, -2.0, Region::IV).unwrap();
        assert!((r.kj.re - 3f64.sqrt()).abs() < 1e-15);
        assert!((r.lambdaj.re + 3f64.sqrt()).abs() < 1e-14);
        let r = region_kinematics(&s, 0.6, Region::I).unwrap();
        assert!(r.kj.re == 0.0 && (r.kj.im - 0.8).abs() < 1e-15);
        assert!((r.lambdaj.im - 0.5).abs() < 1e-15);
    }

    #[test]
    fn band_edges_are_errors() {
        let s = reference_well(0.0);
        for e in [1.0, -1.0, -2.0, -4.0] {
            let err = Region::ALL.iter().find_map(|&r| region_kinematics(&s, e, r).err());
            assert!(matches!(err, Some(Error::BandEdgeDegeneracy { .. })), "E = {e}");
        }
        // the shifted edges are regular once the well is complex
        assert!(region_kinematics(&reference_well(0.25), -2.0, Region::II).is_ok());
        assert!(region_kinematics(&s, 1.0 + 1e-9, Region::I).is_ok());
        assert_eq!(s.band_edges(), vec![-4.0, -2.0, -1.0, 1.0]);
        assert_eq!(reference_well(0.25).band_edges(), vec![-1.0, 1.0]);
    }

    #[test]
    fn well_kinematics_satisfy_dispersion() {
        // K^2 = (E - V_II)^2 - m^2 recomputed by direct complex arithmetic
        let s = reference_well(0.25);
        for e in [0.5, 1.5, -1.5, -3.2, -5.5, 7.0] {
            let ii = region_kinematics(&s, e, Region::II).unwrap();
            let d = Complex64::new(e, 0.0) - Complex64::new(-3.0, 0.25);
            assert!(close(ii.kj * ii.kj, d * d - 1.0, 1e-12), "E = {e}");
            assert!(close(ii.lambdaj, ii.kj / (d + 1.0), 1e-12));
            let iii = region_kinematics(&s, e, Region::III).unwrap();
            assert_eq!(iii.kj, ii.kj.conj());
            assert_eq!(iii.lambdaj, ii.lambdaj.conj());
            let (k3, l3) = analytic_kinematics(e.into(), s.region_value(Region::III), 1.0);
            // up to the overall branch sign
            let sgn = if (k3 - iii.kj).norm() < (k3 + iii.kj).norm() {
                1.0
            } else {
                -1.0
            };
            assert!(close(k3, sgn * iii.kj, 1e-14));
            assert!(close(l3, sgn * iii.lambdaj, 1e-14));
        }
    }

    #[test]
    fn parameterization_real_well() {
        let s = reference_well(0.0);
        let w = well_parameterization(&s, 2.5).unwrap();
        assert_eq!((w.phi_plus, w.phi_minus), (0.0, 0.0));
        assert_eq!(w.k.im, 0.0);
        assert_eq!(w.lambda.im, 0.0);
        // gap inside the well: |E - qV0| < m gives a purely imaginary K
        let w = well_parameterization(&s, -3.4).unwrap();
        assert!(w.k.re.abs() < 1e-12 && w.k.im.abs() > 0.1);
        let d = Complex64::new(-0.4, 0.0);
        let k = (d * d - 1.0).sqrt();
        assert!(k.re.abs() < 1e-12);
        assert!((k.im.abs() - w.k.im.abs()).abs() < 1e-12);
    }

    #[test]
    fn parameterization_matches_principal_values() {
        // whenever E - qV0 +- m > 0 the two-argument angle is the plain arctan
        let s = reference_well(0.25);
        let e = 1.5;
        let w = well_parameterization(&s, e).unwrap();
        let base = e + 3.0;
        assert!((w.phi_plus - (-0.25f64 / (base + 1.0)).atan()).abs() < 1e-15);
        assert!((w.phi_minus - (-0.25f64 / (base - 1.0)).atan()).abs() < 1e-15);
        assert!((w.alpha_plus - ((base + 1.0).powi(2) + 0.0625).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn degenerate_parameterization() {
        let s = reference_well(0.0);
        assert!(matches!(
            well_parameterization(&s, -2.0),
            Err(Error::DegenerateParameterization { .. })
        ));
    }
}
