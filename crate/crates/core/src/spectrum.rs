//! Discrete spectrum: real bound states, the threshold where they start to
//! disappear, and complex zeros of `M22` once they have.
//!
//! Bound states are zeros of `M22` continued to `|E| < m` with `k = i k'`,
//! `k' = sqrt(m^2 - E^2)`. On the real axis this continuation is a real
//! function of `E`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{matching_product_complex, WellTrig};
use crate::potential::{well_parameterization, PotentialSpec};

/// Default number of bracketing samples on `(-m, m)`.
pub const DEFAULT_GRID_N: usize = 2001;

/// Distance from `+-m` (in units of `m`) kept clear by the root search.
const EDGE_OFFSET: f64 = 1e-6;

/// Evaluates the continued `M22` on the real axis inside the gap.
///
/// The result carries the factor `exp(-2 b k')`. When `2 b |Im K|` exceeds
/// the overflow threshold the value is additionally scaled by
/// `exp(-2 b |Im K|)`, which preserves its sign.
pub fn bound_state_function(spec: &PotentialSpec, e: f64) -> Result<f64> {
    let m = spec.m;
    if e.abs() >= m - 1e-9 * m {
        let edge = if e > 0.0 { m } else { -m };
        return Err(Error::BandEdgeDegeneracy { energy: e, edge });
    }
    let kp = (m * m - e * e).sqrt();
    let lp = kp / (m + e);
    let w = well_parameterization(spec, e)?;
    let t = WellTrig::new(spec.b, w.k);

    // M22 = e^{2ikb} { A - i [Im L sh (l^2 - |L|^2) + Re L s (l^2 + |L|^2)] / (2 l |L|^2) }
    // with k = i k', l = i l'.
    let lam = Complex64::new(0.0, lp);
    let (re_l, im_l) = (w.lambda.re, w.lambda.im);
    let a2 = w.lambda.norm_sqr();
    let f_minus = (lam * lam - a2) / (2.0 * lam * a2);
    let f_plus = (lam * lam + a2) / (2.0 * lam * a2);
    let diag = im_l * im_l / a2 * t.ch + re_l * re_l / a2 * t.c;
    let odd = im_l * t.sh * f_minus + re_l * t.s * f_plus;
    let value = (-2.0 * spec.b * kp).exp() * (diag - Complex64::i() * odd);

    let scale = (-2.0 * spec.b * kp).exp() * (diag.abs() + odd.norm());
    debug_assert!(
        value.im.abs() <= 1e-13 * scale.max(f64::MIN_POSITIVE),
        "imaginary residue {} at E = {e}",
        value.im
    );
    Ok(value.re)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub spec: PotentialSpec,
    /// Sorted real bound-state energies in `(-m, m)`.
    pub real_energies: Vec<f64>,
    pub negative_count: usize,
    pub positive_count: usize,
    /// Complex zeros of `M22` paired with their conjugates, `Im > 0` first.
    pub complex_pairs: Vec<(Complex64, Complex64)>,
}

impl Spectrum {
    fn from_real(spec: PotentialSpec, mut real_energies: Vec<f64>) -> Self {
        real_energies.sort_by(f64::total_cmp);
        let negative_count = real_energies.iter().filter(|&&e| e < 0.0).count();
        Spectrum {
            spec,
            negative_count,
            positive_count: real_energies.len() - negative_count,
            real_energies,
            complex_pairs: Vec::new(),
        }
    }
}

/// Brent's method on a bracket with `f(a) f(b) <= 0`.
pub fn brent<F>(f: F, mut a: f64, mut b: f64, xtol: f64, max_iter: usize) -> Option<f64>
where
    F: Fn(f64) -> f64,
{
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let half = 0.5 * (c - b);
        if half.abs() <= tol || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * half * s, 1.0 - s)
            } else {
                let q = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * half * q * (q - r) - (b - a) * (r - 1.0)),
                    (q - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * half * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = half;
                e = d;
            }
        } else {
            d = half;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(half) };
        fb = f(b);
    }
    Some(b)
}

/// Real bound-state energies from sign changes of [`bound_state_function`]
/// on `grid_n` points, each refined by Brent's method.
pub fn real_bound_states(spec: &PotentialSpec, grid_n: usize) -> Result<Spectrum> {
    if grid_n < 500 {
        return Err(Error::InvalidParameter(format!("grid_n = {grid_n} must be >= 500")));
    }
    let m = spec.m;
    let lo = -m + EDGE_OFFSET * m;
    let hi = m - EDGE_OFFSET * m;
    let step = (hi - lo) / (grid_n - 1) as f64;
    let xs: Vec<f64> = (0..grid_n).map(|i| lo + step * i as f64).collect();
    let fs = xs
        .par_iter()
        .map(|&x| bound_state_function(spec, x))
        .collect::<Result<Vec<_>>>()?;

    let f = |x: f64| bound_state_function(spec, x).unwrap_or(f64::NAN);
    let mut roots: Vec<f64> = Vec::new();
    for i in 0..grid_n - 1 {
        let (fa, fb) = (fs[i], fs[i + 1]);
        let root = if fa == 0.0 {
            Some(xs[i])
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            brent(f, xs[i], xs[i + 1], 1e-10 * m, 200)
        } else if i + 2 == grid_n && fb == 0.0 {
            Some(xs[i + 1])
        } else {
            None
        };
        if let Some(r) = root {
            if roots.last().is_none_or(|&last| (r - last).abs() > 1e-8 * m) {
                roots.push(r);
            }
        }
    }
    Ok(Spectrum::from_real(*spec, roots))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalV1 {
    pub v1_crit: f64,
    /// Energy where the first real level(s) leave the spectrum: the midpoint
    /// of a merging pair, or the last position of a single level.
    pub merge_energy: f64,
    /// Levels present just below the threshold that are gone just above it.
    pub vanishing_levels: Vec<f64>,
    pub count_below: usize,
    pub count_above: usize,
    pub iterations: usize,
}

/// Bisection on `V1` for the first change in the real bound-state count.
///
/// `spec.v1` is ignored; the search runs over `[0, v1_max]`.
pub fn critical_v1(spec: &PotentialSpec, v1_max: f64, tol: f64, grid_n: usize) -> Result<CriticalV1> {
    let m = spec.m;
    if !(tol >= 1e-6 * m) {
        return Err(Error::InvalidParameter(format!("tol = {tol} must be >= 1e-6 m")));
    }
    if !(v1_max > 0.0) {
        return Err(Error::InvalidParameter(format!("v1_max = {v1_max} must be > 0")));
    }
    let states = |v1: f64| -> Result<Spectrum> { real_bound_states(&spec.with_v1(v1)?, grid_n) };
    let mut below = states(0.0)?;
    let mut above = states(v1_max)?;
    let n0 = below.real_energies.len();
    if above.real_energies.len() == n0 {
        return Err(Error::NoBreakingDetected { count: n0 });
    }
    let (mut lo, mut hi) = (0.0, v1_max);
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let s = states(mid)?;
        if s.real_energies.len() == n0 {
            lo = mid;
            below = s;
        } else {
            hi = mid;
            above = s;
        }
        iterations += 1;
    }
    let vanishing = unmatched_levels(&below.real_energies, &above.real_energies);
    let merge_energy = match vanishing.as_slice() {
        [] => f64::NAN,
        [single] => *single,
        [a, b, ..] => 0.5 * (a + b),
    };
    Ok(CriticalV1 {
        v1_crit: 0.5 * (lo + hi),
        merge_energy,
        vanishing_levels: vanishing,
        count_below: below.real_energies.len(),
        count_above: above.real_energies.len(),
        iterations,
    })
}

/// Levels of `before` with no partner in `after`, pairing greedily by
/// distance.
fn unmatched_levels(before: &[f64], after: &[f64]) -> Vec<f64> {
    let mut left: Vec<f64> = before.to_vec();
    for &a in after {
        if let Some((idx, _)) = left
            .iter()
            .enumerate()
            .min_by(|x, y| (x.1 - a).abs().total_cmp(&(y.1 - a).abs()))
        {
            left.remove(idx);
        }
    }
    left
}

/// Rectangle in the complex energy plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchBox {
    pub fn contains(&self, z: Complex64) -> bool {
        (self.re_min..=self.re_max).contains(&z.re) && (self.im_min..=self.im_max).contains(&z.im)
    }

    pub fn is_empty(&self) -> bool {
        !(self.re_min < self.re_max && self.im_min < self.im_max)
    }

    /// Up to `count` seeds on a cell-centred lattice with roughly square cells.
    pub fn seeds(&self, count: usize) -> Vec<Complex64> {
        if count == 0 || self.is_empty() {
            return Vec::new();
        }
        let (w, h) = (self.re_max - self.re_min, self.im_max - self.im_min);
        let n_re = ((count as f64 * w / h).sqrt().ceil() as usize).clamp(1, count);
        let n_im = count.div_ceil(n_re);
        let mut out = Vec::with_capacity(n_re * n_im);
        for j in 0..n_im {
            for i in 0..n_re {
                out.push(Complex64::new(
                    self.re_min + w * (i as f64 + 0.5) / n_re as f64,
                    self.im_min + h * (j as f64 + 0.5) / n_im as f64,
                ));
            }
        }
        out.truncate(count);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexZeros {
    /// Distinct zeros inside the box, sorted by real then imaginary part.
    pub zeros: Vec<Complex64>,
    /// Seeds whose Newton iteration did not converge inside the box.
    pub failed_seeds: usize,
}

impl ComplexZeros {
    /// Zeros with `|Im E|` above `tol`, paired with their conjugate partner
    /// (`Im > 0` first). Unpaired zeros are skipped.
    pub fn conjugate_pairs(&self, tol: f64) -> Vec<(Complex64, Complex64)> {
        self.zeros
            .iter()
            .filter(|z| z.im > tol)
            .filter_map(|&z| {
                self.zeros
                    .iter()
                    .find(|w| (**w - z.conj()).norm() <= 1e-8 * z.norm().max(1.0))
                    .map(|&w| (z, w))
            })
            .collect()
    }

    /// Largest distance from a complex zero to the conjugate of its nearest
    /// partner.
    pub fn pairing_residual(&self, tol: f64) -> f64 {
        self.zeros
            .iter()
            .filter(|z| z.im.abs() > tol)
            .map(|z| {
                self.zeros
                    .iter()
                    .map(|w| (*w - z.conj()).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    pub fn real_zeros(&self, tol: f64) -> Vec<f64> {
        self.zeros.iter().filter(|z| z.im.abs() <= tol).map(|z| z.re).collect()
    }
}

/// The continued `M22` at complex energy (bound-state sheet).
pub fn secular_function(spec: &PotentialSpec, e: Complex64) -> Complex64 {
    matching_product_complex(spec, e).0[1][1]
}

fn damped_newton(spec: &PotentialSpec, start: Complex64, bounds: &SearchBox) -> Option<Complex64> {
    let m = spec.m;
    let h = 1e-6 * m;
    let f = |z: Complex64| secular_function(spec, z);
    let mut z = start;
    let mut fz = f(z);
    for _ in 0..100 {
        if !fz.is_finite() {
            return None;
        }
        let d = (f(z + h) - f(z - h)) / (2.0 * h);
        if d.norm() == 0.0 || !d.is_finite() {
            return None;
        }
        let step = fz / d;
        let mut damping = 1.0;
        let (mut next, mut fnext) = (z - step, f(z - step));
        for _ in 0..12 {
            if fnext.norm() < fz.norm() {
                break;
            }
            damping *= 0.5;
            next = z - step * damping;
            fnext = f(next);
        }
        let moved = (next - z).norm();
        z = next;
        fz = fnext;
        if z.re.abs() >= m || z.im.abs() > 2.0 * m {
            return None;
        }
        if moved < 1e-13 * m {
            break;
        }
    }
    // final acceptance: a genuine zero, not a stalled iterate
    let d = (f(z + h) - f(z - h)) / (2.0 * h);
    let converged = (fz / d).norm() < 1e-10 * m;
    (converged && bounds.contains(z)).then_some(z)
}

/// Multi-seed damped Newton search for zeros of the continued `M22` in a box
/// inside the strip `|Re E| < m`.
pub fn complex_m22_zeros(spec: &PotentialSpec, search_box: SearchBox, seeds: usize) -> Result<ComplexZeros> {
    let m = spec.m;
    if !search_box.is_empty() && (search_box.re_min <= -m || search_box.re_max >= m) {
        return Err(Error::InvalidParameter(format!(
            "search box real range [{}, {}] leaves the strip |Re E| < m",
            search_box.re_min, search_box.re_max
        )));
    }
    let starts = search_box.seeds(seeds);
    let found: Vec<Option<Complex64>> = starts
        .par_iter()
        .map(|&z0| damped_newton(spec, z0, &search_box))
        .collect();
    let failed_seeds = found.iter().filter(|z| z.is_none()).count();

    let dedup_tol = 1e-8 * m;
    let mut zeros: Vec<Complex64> = Vec::new();
    let push = |z: Complex64, zeros: &mut Vec<Complex64>| {
        if !zeros.iter().any(|w| (*w - z).norm() <= dedup_tol) {
            zeros.push(z);
        }
    };
    for z in found.into_iter().flatten() {
        push(z, &mut zeros);
    }
    // complete conjugate pairs whose partner was missed by the seeds
    let snapshot = zeros.clone();
    for z in snapshot.into_iter().filter(|z| z.im.abs() > dedup_tol) {
        if let Some(w) = damped_newton(spec, z.conj(), &search_box) {
            push(w, &mut zeros);
        }
    }
    zeros.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ComplexZeros { zeros, failed_seeds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::matching_matrix_product;

    fn reference_well(v1: f64) -> PotentialSpec {
        PotentialSpec::particle(3.0, v1, 5.0).unwrap()
    }

    /// The bound-state condition written out term by term in real arithmetic.
    fn literal_condition(spec: &PotentialSpec, e: f64) -> f64 {
        let m = spec.m;
        let kp = (m * m - e * e).sqrt();
        let lp = kp / (m + e);
        let d = Complex64::new(e - spec.q * spec.v0, spec.q * spec.v1);
        let k = (d * d - m * m).sqrt();
        let l = k / (d + m);
        let a2 = l.norm_sqr();
        let (ch, sh) = ((2.0 * spec.b * k.im).cosh(), (2.0 * spec.b * k.im).sinh());
        let (c, s) = ((2.0 * spec.b * k.re).cos(), (2.0 * spec.b * k.re).sin());
        (-2.0 * spec.b * kp).exp()
            * (l.im * l.im / a2 * ch
                + l.re * l.re / a2 * c
                + l.im * sh * (lp * lp + a2) / (2.0 * lp * a2)
                + l.re * s * (lp * lp - a2) / (2.0 * lp * a2))
    }

    #[test]
    fn function_matches_literal_and_product_forms() {
        for v1 in [0.0, 0.25, 0.5] {
            let s = reference_well(v1);
            for e in [-0.9, -0.3, 0.0, 0.31, 0.77] {
                let f = bound_state_function(&s, e).unwrap();
                let lit = literal_condition(&s, e);
                let prod = matching_matrix_product(&s, e).unwrap().m22();
                let scale = f.abs().max(1e-3);
                assert!((f - lit).abs() < 1e-10 * scale, "V1 = {v1}, E = {e}");
                assert!((f - prod.re).abs() < 1e-9 * scale && prod.im.abs() < 1e-9 * scale);
            }
        }
        assert!(bound_state_function(&reference_well(0.0), 0.0).unwrap().is_finite());
        assert!(bound_state_function(&reference_well(0.0), 1.0).is_err());
    }

    #[test]
    fn brent_solves_cubic() {
        let r = brent(|x| x * x * x - 2.0 * x - 5.0, 2.0, 3.0, 1e-14, 100).unwrap();
        assert!((r - 2.094_551_481_542_327).abs() < 1e-12);
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 50).is_none());
    }

    #[test]
    fn counts_for_reference_wells() {
        let s0 = real_bound_states(&reference_well(0.0), DEFAULT_GRID_N).unwrap();
        assert_eq!((s0.negative_count, s0.positive_count), (4, 4));
        for e in &s0.real_energies {
            let f = bound_state_function(&reference_well(0.0), *e).unwrap();
            assert!(f.abs() < 1e-9);
            // the level is a zero of M22
            assert!(matching_matrix_product(&reference_well(0.0), *e).unwrap().m22().norm() < 1e-8);
        }
        assert_eq!(
            real_bound_states(&reference_well(0.25), DEFAULT_GRID_N)
                .unwrap()
                .real_energies
                .len(),
            8
        );
        assert!(real_bound_states(&reference_well(0.5), DEFAULT_GRID_N)
            .unwrap()
            .real_energies
            .is_empty());
        assert!(real_bound_states(&reference_well(0.5), 100).is_err());
    }

    #[test]
    fn count_is_monotone_in_v1() {
        let counts: Vec<usize> = (0..=20)
            .map(|i| {
                real_bound_states(&reference_well(0.025 * i as f64), DEFAULT_GRID_N)
                    .unwrap()
                    .real_energies
                    .len()
            })
            .collect();
        assert!(counts.windows(2).all(|w| w[1] <= w[0]), "{counts:?}");
    }

    #[test]
    fn critical_value_and_bisection_budget() {
        let c = critical_v1(&reference_well(0.0), 0.5, 1e-4, DEFAULT_GRID_N).unwrap();
        assert!((c.v1_crit - 0.272).abs() < 0.005, "{c:?}");
        assert_eq!(c.count_below, 8);
        assert!(c.iterations <= (0.5f64 / 1e-4).log2().ceil() as usize);
        assert!(matches!(
            critical_v1(&reference_well(0.0), 0.1, 1e-4, DEFAULT_GRID_N),
            Err(Error::NoBreakingDetected { count: 8 })
        ));
        let c = critical_v1(&reference_well(0.0), 0.5, 1e-6, DEFAULT_GRID_N).unwrap();
        assert!(c.iterations <= (0.5f64 / 1e-6).log2().ceil() as usize);
    }

    #[test]
    fn seeds_fill_the_box() {
        let b = SearchBox {
            re_min: -0.9,
            re_max: 0.9,
            im_min: -0.3,
            im_max: 0.3,
        };
        let s = b.seeds(60);
        assert_eq!(s.len(), 60);
        assert!(s.iter().all(|z| b.contains(*z)));
        assert!(b.seeds(0).is_empty());
        let empty = SearchBox {
            re_min: 0.1,
            re_max: 0.1,
            im_min: -0.3,
            im_max: 0.3,
        };
        assert!(empty.seeds(10).is_empty());
        assert!(complex_m22_zeros(&reference_well(0.3), empty, 10)
            .unwrap()
            .zeros
            .is_empty());
    }

    #[test]
    fn sub_critical_zeros_are_real() {
        let s = reference_well(0.25);
        let b = SearchBox {
            re_min: -0.99,
            re_max: 0.99,
            im_min: -0.3,
            im_max: 0.3,
        };
        let z = complex_m22_zeros(&s, b, 120).unwrap();
        let real = real_bound_states(&s, DEFAULT_GRID_N).unwrap().real_energies;
        assert!(!z.zeros.is_empty());
        for root in &z.zeros {
            assert!(root.im.abs() < 1e-8);
            assert!(real.iter().any(|r| (r - root.re).abs() < 1e-8));
        }
    }

    #[test]
    fn broken_phase_zeros_pair_up() {
        let s = reference_well(0.5);
        let b = SearchBox {
            re_min: -0.99,
            re_max: 0.99,
            im_min: -0.5,
            im_max: 0.5,
        };
        let z = complex_m22_zeros(&s, b, 120).unwrap();
        let pairs = z.conjugate_pairs(1e-6);
        assert!(!pairs.is_empty());
        assert!(z.pairing_residual(1e-8) < 1e-8);
        for (a, _) in pairs {
            assert!(secular_function(&s, a).norm() < 1e-8);
        }
    }

    #[test]
    fn box_must_stay_in_strip() {
        let b = SearchBox {
            re_min: -1.5,
            re_max: 0.5,
            im_min: -0.1,
            im_max: 0.1,
        };
        assert!(complex_m22_zeros(&reference_well(0.3), b, 4).is_err());
    }
}
