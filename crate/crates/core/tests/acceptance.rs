use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ptdirac::limits::{
    nonrelativistic_family, nonrelativistic_limit_check, real_well_limit_check, space_component_case,
};
use ptdirac::matching::ode::matching_matrix_ode;
use ptdirac::matching::{matching_matrix_closed_form, matching_matrix_product};
use ptdirac::scattering::{
    energy_scan, find_transmission_resonances, flux_gain_classification, FluxBehaviour, ScanResult,
};
use ptdirac::spectrum::{complex_m22_zeros, critical_v1, real_bound_states, SearchBox, DEFAULT_GRID_N};
use ptdirac::verify::sample_admissible;
use ptdirac::PotentialSpec;

const M: f64 = 1.0;
const DRAWS: usize = 10_000;
const ODE_DRAWS: usize = 100;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn reference_well(v1: f64) -> PotentialSpec {
    PotentialSpec::new(3.0 * M, v1 * M, 5.0 / M, -1.0, M).unwrap()
}

fn full_scan(v1: f64) -> ScanResult {
    energy_scan(&reference_well(v1), -8.0 * M, 8.0 * M, 4001, 1e-6 * M).unwrap()
}

fn matching_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let (mut det, mut conj, mut prod, mut ode) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..DRAWS {
        let (spec, e) = sample_admissible(&mut rng, M);
        let closed = matching_matrix_closed_form(&spec, e).unwrap();
        det = det.max(closed.det_residual());
        conj = conj.max(closed.conjugacy_residual());
        let mut c = closed.entries;
        if closed.is_scaled() {
            c = c.scale(Complex64::new(closed.log_scale.exp(), 0.0));
        }
        let p = matching_matrix_product(&spec, e).unwrap();
        prod = prod.max(c.rel_diff(&p.entries));
        if i < ODE_DRAWS {
            let o = matching_matrix_ode(&spec, e, 1e-8).unwrap();
            ode = ode.max(c.rel_diff(&o.entries));
        }
    }
    (
        det < 1e-10 && conj < 1e-10 && prod < 1e-10 && ode < 1e-6,
        format!("{DRAWS} draws: det {det:.2e}, conj {conj:.2e}, product {prod:.2e}; {ODE_DRAWS} ODE draws {ode:.2e}"),
    )
}

fn hermitian_limit() -> Outcome {
    let spec = reference_well(0.0);
    let (mut flux, mut asym) = (0.0f64, 0.0f64);
    let n = 4001;
    let mut count = 0;
    for i in 1..=n {
        let mag = M + 7.0 * M * i as f64 / n as f64;
        for e in [mag, -mag] {
            if spec.band_edges().iter().any(|edge| (e - edge).abs() < 1e-6 * M) {
                continue;
            }
            let o = ptdirac::scattering::scattering_observables(&spec, e).unwrap();
            flux = flux.max(o.flux_gain_lr.abs()).max(o.flux_gain_rl.abs());
            asym = asym.max((o.r_lr2() - o.r_rl2()).abs());
            count += 1;
        }
    }
    (
        flux < 1e-10 && asym < 1e-10,
        format!("{count} energies: |T|^2+|R|^2-1 {flux:.2e}, |R_LR|^2-|R_RL|^2 {asym:.2e}"),
    )
}

fn bound_state_counts() -> Outcome {
    let count = |v1: f64| real_bound_states(&reference_well(v1), DEFAULT_GRID_N).unwrap();
    let (a, b, c) = (count(0.0), count(0.25), count(0.5));
    let ok = a.real_energies.len() == 8
        && a.negative_count == 4
        && a.positive_count == 4
        && b.real_energies.len() == 8
        && c.real_energies.is_empty();
    (
        ok,
        format!(
            "V1=0: {} ({}-/{}+), V1=0.25: {}, V1=0.5: {}",
            a.real_energies.len(),
            a.negative_count,
            a.positive_count,
            b.real_energies.len(),
            c.real_energies.len()
        ),
    )
}

fn critical_value() -> Outcome {
    let c = critical_v1(&reference_well(0.0), 0.5 * M, 1e-4 * M, DEFAULT_GRID_N).unwrap();
    (
        (c.v1_crit - 0.272 * M).abs() <= 0.005 * M,
        format!(
            "V1crit = {:.5}, count {} -> {}",
            c.v1_crit, c.count_below, c.count_above
        ),
    )
}

fn max_reflection(scan: &ScanResult) -> ((f64, f64), (f64, f64)) {
    let mut lr = (0.0, 0.0);
    let mut rl = (0.0, 0.0);
    for o in scan.observables() {
        if o.r_lr2() > lr.0 {
            lr = (o.r_lr2(), o.energy);
        }
        if o.r_rl2() > rl.0 {
            rl = (o.r_rl2(), o.energy);
        }
    }
    (lr, rl)
}

fn reflection_asymmetry() -> Outcome {
    let (lr, rl) = max_reflection(&full_scan(0.25));
    let ratio = lr.0.max(rl.0) / lr.0.min(rl.0);
    let (lr5, rl5) = max_reflection(&full_scan(0.5));
    let opposite = lr5.1.signum() != rl5.1.signum();
    (
        ratio > 10.0 && opposite,
        format!(
            "V1=0.25 max ratio {ratio:.1}; V1=0.5 max |R_LR|^2 at E={:.3}, max |R_RL|^2 at E={:.3}",
            lr5.1, rl5.1
        ),
    )
}

fn overcriticality() -> Outcome {
    let window = (-2.0 * M, -M);
    let hermitian = find_transmission_resonances(&full_scan(0.0), window);
    let peaks: Vec<f64> = hermitian.iter().map(|r| r.t2_peak).filter(|&t| t > 0.999).collect();
    let broken = find_transmission_resonances(&full_scan(0.5), window);
    let lowest = peaks.iter().copied().fold(f64::INFINITY, f64::min);
    let ok = !peaks.is_empty() && !broken.is_empty() && broken.iter().all(|r| r.t2_peak > 0.0 && r.t2_peak < lowest);
    let highest = broken.iter().map(|r| r.t2_peak).fold(0.0, f64::max);
    (
        ok,
        format!(
            "V1=0: {} peaks above 0.999; V1=0.5: {} maxima, highest {highest:.3e}",
            peaks.len(),
            broken.len()
        ),
    )
}

fn scattering_identities() -> Outcome {
    let (mut t, mut d, mut n) = (0.0f64, 0.0f64, 0);
    for v1 in [0.0, 0.25, 0.5] {
        let scan = full_scan(v1);
        for o in scan.observables() {
            let m22 = matching_matrix_closed_form(&scan.spec, o.energy).unwrap().m22();
            if o.t_lr != o.t_rl {
                t = f64::INFINITY;
            }
            t = t.max((m22 * o.t_lr - 1.0).norm());
            d = d.max((o.det_s().norm() - 1.0).abs());
            n += 1;
        }
    }
    (
        t < 1e-12 && d < 1e-10,
        format!("{n} energies: T_LR == T_RL, |M22 T - 1| {t:.2e}, ||det S|-1| {d:.2e}"),
    )
}

fn limits() -> Outcome {
    let mut real = 0.0f64;
    let spec = reference_well(0.0);
    for i in 1..=4001 {
        let mag = M + 7.0 * M * i as f64 / 4001.0;
        for e in [mag, -mag] {
            if let Ok(r) = real_well_limit_check(&spec, e) {
                real = real.max(r.deviation);
            }
        }
    }
    let eps = [1e-3 * M, 1e-4 * M, 1e-5 * M];
    let devs: Vec<f64> = eps
        .iter()
        .map(|&e| {
            let (v0, v1, b) = nonrelativistic_family(e, M);
            let r = nonrelativistic_limit_check(v0, v1, b, e, -1.0, M).unwrap();
            r.deviation
        })
        .collect();
    let bounded = devs.iter().zip(eps).all(|(d, e)| *d < 50.0 * e / M);
    let orders: Vec<f64> = devs.windows(2).map(|w| (w[0] / w[1]).log10()).collect();
    let first_order = orders.iter().all(|p| (0.8..=1.2).contains(p));

    let pt = reference_well(0.25);
    let phase = -2.0 * pt.q * pt.v0 * pt.b;
    let mut sc = 0.0f64;
    for e in [1.5 * M, -2.5 * M, 6.0 * M] {
        let o = space_component_case(&pt, e).unwrap();
        let expected = Complex64::from_polar(1.0, phase);
        sc = sc
            .max((o.t_lr.norm() - 1.0).abs())
            .max(o.r_lr.norm())
            .max(o.r_rl.norm())
            .max((o.t_lr - expected).norm());
    }
    (
        real < 1e-10 && bounded && first_order && sc < 1e-12,
        format!(
            "real well {real:.2e}; NR deviations {:.2e}/{:.2e}/{:.2e}, orders {:.2}/{:.2}; space component {sc:.2e}",
            devs[0], devs[1], devs[2], orders[0], orders[1]
        ),
    )
}

fn flux_classification() -> Outcome {
    let a = flux_gain_classification(&full_scan(0.25)).unwrap();
    let b = flux_gain_classification(&full_scan(0.5)).unwrap();
    (
        a.behaviour == FluxBehaviour::Intermediate
            && b.behaviour == FluxBehaviour::Intermediate
            && !a.zero_gain
            && !b.zero_gain,
        format!("V1=0.25 {:?}, V1=0.5 {:?}", a.behaviour, b.behaviour),
    )
}

fn post_breaking_spectrum() -> Outcome {
    let search = SearchBox {
        re_min: -M + 1e-6 * M,
        re_max: M - 1e-6 * M,
        im_min: -0.5 * M,
        im_max: 0.5 * M,
    };
    let broken = complex_m22_zeros(&reference_well(0.28), search, 2000).unwrap();
    let pairs = broken
        .conjugate_pairs(1e-8 * M)
        .into_iter()
        .filter(|(z, _)| z.im.abs() > 1e-6 * M)
        .count();

    let unbroken = complex_m22_zeros(&reference_well(0.25), search, 2000).unwrap();
    let all_real = unbroken.zeros.iter().all(|z| z.im.abs() < 1e-8 * M);
    let mut found: Vec<f64> = unbroken.real_zeros(1e-8 * M);
    found.sort_by(f64::total_cmp);
    let reference = real_bound_states(&reference_well(0.25), DEFAULT_GRID_N)
        .unwrap()
        .real_energies;
    let matches = found.len() == reference.len() && found.iter().zip(&reference).all(|(a, b)| (a - b).abs() < 1e-8 * M);
    (
        pairs >= 1 && all_real && matches,
        format!(
            "V1=0.28: {pairs} conjugate pairs among {} zeros; V1=0.25: {} zeros, all real {all_real}, match real roots {matches}",
            broken.zeros.len(),
            unbroken.zeros.len()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("matching-matrix identities", matching_identities),
        ("hermitian limit", hermitian_limit),
        ("bound-state counts", bound_state_counts),
        ("critical V1", critical_value),
        ("reflection asymmetry", reflection_asymmetry),
        ("overcriticality signature", overcriticality),
        ("scattering identities", scattering_identities),
        ("limits", limits),
        ("flux-gain classification", flux_classification),
        ("post-breaking spectrum", post_breaking_spectrum),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (pass, detail) = check();
        if !pass {
            failed += 1;
        }
        println!(
            "{} criterion {}: {name}: {detail}",
            if pass { "PASS" } else { "FAIL" },
            i + 1
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
