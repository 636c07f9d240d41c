//! Computed values checked against independent brute-force or numerical oracles.

use levy_reorder::coupling::rank_permutation;
use levy_reorder::levy::{cpp_atoms_preset, model_moments, parse_preset, stable_preset};
use levy_reorder::metrics::wasserstein2_empirical;
use levy_reorder::mlmc::{decompose_level, truncation, MlmcBase};
use levy_reorder::rng::{domain, stream};
use levy_reorder::special::{normal_cdf, normal_quantile};
use rand::Rng;

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Composite Simpson rule on `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// `∫_lo^hi x^p c x^{-1-α} dx` by Simpson in log coordinates.
fn power_moment(alpha: f64, p: f64, lo: f64, hi: f64) -> f64 {
    simpson(|u| u.exp().powf(p - alpha), lo.ln(), hi.ln(), 20_000)
}

/// Maclaurin series of erf, accurate to ~1e-15 for |x| < 3.
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    for n in 1..200 {
        term *= -x * x / n as f64;
        let add = term / (2 * n + 1) as f64;
        sum += add;
        if add.abs() < 1e-17 {
            break;
        }
    }
    sum * 2.0 / std::f64::consts::PI.sqrt()
}

#[test]
fn rank_permutation_matches_exhaustive_search() {
    let mut rng = stream(1, domain::AUXILIARY, 0);
    let all: Vec<Vec<Vec<usize>>> = (0..=6).map(permutations).collect();
    for _ in 0..3000 {
        let k = rng.random_range(1..=6);
        let dx: Vec<f64> = (0..k).map(|_| f64::from(rng.random_range(0..3)) + rng.random::<f64>() * 0.1).collect();
        let ties: Vec<f64> = (0..k).map(|_| rng.random()).collect();
        let dw: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
        // by the rearrangement inequality the order-matching assignment
        // uniquely maximizes Σ dx_i dw_π(i) when values are distinct
        let best = all[k]
            .iter()
            .max_by(|a, b| {
                let s = |p: &Vec<usize>| (0..k).map(|i| dx[i] * dw[p[i]]).sum::<f64>();
                s(a).total_cmp(&s(b))
            })
            .unwrap();
        assert_eq!(rank_permutation(&dx, &ties, &dw).unwrap().as_slice(), best.as_slice());
    }
}

#[test]
fn rank_permutation_breaks_ties_with_uniforms() {
    let all = permutations(5);
    let mut rng = stream(2, domain::AUXILIARY, 0);
    for _ in 0..500 {
        let dx: Vec<f64> = (0..5).map(|_| f64::from(rng.random_range(0..2))).collect();
        let ties: Vec<f64> = (0..5).map(|_| rng.random()).collect();
        let dw: Vec<f64> = (0..5).map(|_| rng.random::<f64>()).collect();
        let key = |i: usize| (dx[i], ties[i]);
        let matching: Vec<&Vec<usize>> = all
            .iter()
            .filter(|p| (0..5).all(|i| (0..5).all(|j| (key(i) < key(j)) == (dw[p[i]] < dw[p[j]]))))
            .collect();
        assert_eq!(matching.len(), 1);
        assert_eq!(rank_permutation(&dx, &ties, &dw).unwrap().as_slice(), matching[0].as_slice());
    }
}

#[test]
fn sorted_matching_is_the_optimal_assignment() {
    let mut rng = stream(3, domain::AUXILIARY, 0);
    for n in 1..=6 {
        let perms = permutations(n);
        for _ in 0..100 {
            let a: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 6.0 - 3.0).collect();
            let b: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(-3..3))).collect();
            let best = perms
                .iter()
                .map(|p| (0..n).map(|i| (a[i] - b[p[i]]).powi(2)).sum::<f64>() / n as f64)
                .fold(f64::INFINITY, f64::min)
                .sqrt();
            assert!((wasserstein2_empirical(&a, &b).unwrap() - best).abs() <= 1e-12);
        }
    }
}

#[test]
fn normal_quantile_matches_bisection_on_series_erf() {
    let phi = |x: f64| 0.5 * (1.0 + erf_series(x / std::f64::consts::SQRT_2));
    for p in [0.2, 0.025, 0.5, 0.7, 0.975] {
        let (mut lo, mut hi) = (-6.0, 6.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if phi(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let want = 0.5 * (lo + hi);
        assert!((normal_quantile(p) - want).abs() < 1e-12, "p={p}: {} vs {want}", normal_quantile(p));
        assert!((normal_cdf(want) - p).abs() < 1e-12, "p={p}: {}", normal_cdf(want) - p);
    }
    assert!((normal_quantile(0.2) + 0.8416).abs() < 5e-5);
}

#[test]
fn stable_fourth_moment_matches_quadrature() {
    for (hi, lo) in [(0.1, 0.03), (1.0, 0.01), (0.25, 0.125)] {
        let m = model_moments(&stable_preset(hi, lo)).unwrap();
        // weights cancel in the standardized ratio
        let want = power_moment(1.5, 4.0, lo, hi) / power_moment(1.5, 2.0, lo, hi).powi(2);
        assert!((m.mu4 / want - 1.0).abs() < 1e-9, "({hi},{lo}): {} vs {want}", m.mu4);
    }
}

#[test]
fn gamma_and_atom_fourth_moments_match_closed_forms() {
    for (shape, rate) in [(1.0, 1.0), (2.0, 3.0), (0.5, 7.0)] {
        let m = model_moments(&parse_preset(&format!("fig1-gamma({shape},{rate})")).unwrap()).unwrap();
        assert!((m.mu4 - 6.0 / shape).abs() < 1e-12 * (6.0 / shape));
        // a ∫ x³ e^{-bx} dx / (a ∫ x e^{-bx} dx)²
        let num = shape * simpson(|x| x.powi(3) * (-rate * x).exp(), 0.0, 60.0 / rate, 20_000);
        let den = shape * simpson(|x| x * (-rate * x).exp(), 0.0, 60.0 / rate, 20_000);
        assert!((m.mu4 - num / (den * den)).abs() < 1e-8 * m.mu4);
    }
    // rate 20, jumps -1 or 2 with equal odds
    let m = model_moments(&cpp_atoms_preset()).unwrap();
    let (e2, e4): (f64, f64) = (0.5 * 1.0 + 0.5 * 4.0, 0.5 * 1.0 + 0.5 * 16.0);
    assert!((m.mu4 - 20.0 * e4 / (20.0 * e2).powi(2)).abs() < 1e-14);
}

#[test]
fn annulus_variance_matches_quadrature() {
    let base = MlmcBase::stable_preset();
    for n in 0..8 {
        let s = decompose_level(&base, n, 1.5).unwrap().spec;
        let want = (base.c_neg + base.c_pos) * power_moment(1.5, 2.0, truncation(n + 1), truncation(n));
        assert!((s.sigma_prime_sq / want - 1.0).abs() < 1e-10, "n={n}");
    }
}
