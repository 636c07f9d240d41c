//! Monte Carlo checks of distributional claims, at fixed seeds.

use levy_reorder::coupling::{exact_law, reorder_coupling, EmpiricalCdf};
use levy_reorder::levy::{parse_preset, sample_endpoint, sample_fine_path};
use levy_reorder::mlmc::{
    decompose_level, estimate_level_stats, grid_cells, mlmc_run, sample_level_batch, CouplingMode, Functional,
    MlmcBase, MlmcConfig,
};
use levy_reorder::rng::{domain, stream};
use levy_reorder::special::normal_cdf;
use levy_reorder::stats::{ks_one_sample, ks_two_sample, mean_var, EstimateWithError};

const PRESETS: [&str; 6] =
    ["exp-stable(0.1,0.03)", "exp-stable(1,0.01)", "fig1-gamma", "cpp-atoms", "perturbed(0.5)", "annulus(3)"];

#[test]
fn presets_have_zero_mean_and_unit_variance() {
    let n = 40_000;
    for (i, name) in PRESETS.iter().enumerate() {
        let model = parse_preset(name).unwrap().compile().unwrap();
        let mut rng = stream(10, domain::AUXILIARY, i as u64);
        let xs: Vec<f64> = (0..n).map(|_| sample_endpoint::<f64, _>(&model, &mut rng).unwrap()).collect();
        let (mean, var) = mean_var(&xs);
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let var_se = EstimateWithError::from_samples(&sq).unwrap().std_error;
        assert!(mean.abs() < 5.0 / (n as f64).sqrt(), "{name}: mean {mean}");
        assert!((var - 1.0).abs() < 5.0 * var_se, "{name}: var {var} ± {var_se}");
    }
}

#[test]
fn endpoint_sampler_agrees_with_path_endpoint() {
    for (i, name) in PRESETS.iter().enumerate() {
        let model = parse_preset(name).unwrap().compile().unwrap();
        let mut rng = stream(11, domain::AUXILIARY, i as u64);
        let direct: Vec<f64> = (0..3000).map(|_| sample_endpoint::<f64, _>(&model, &mut rng).unwrap()).collect();
        let paths: Vec<f64> =
            (0..3000).map(|_| sample_fine_path::<f64, _>(&model, 6, &mut rng).unwrap().endpoint()).collect();
        let ks = ks_two_sample(&direct, &paths).unwrap();
        assert!(ks.p_value > 0.001, "{name}: p = {}", ks.p_value);
    }
}

#[test]
fn coupled_brownian_motion_has_brownian_marginals() {
    let spec = parse_preset("fig1-gamma").unwrap();
    let model = spec.compile().unwrap();
    let law = exact_law(&spec, 1.0).unwrap();
    let (mut end, mut quarter) = (Vec::new(), Vec::new());
    for i in 0..2000 {
        let mut rng = stream(12, domain::REPLICATION, i);
        let c = reorder_coupling::<f64, _>(&model, 32, 8, law.as_ref(), &mut rng).unwrap();
        end.push(c.w.endpoint());
        quarter.push(c.w.at(64));
    }
    assert!(ks_one_sample(&end, normal_cdf).unwrap().p_value > 0.01);
    assert!(ks_one_sample(&quarter, |x| normal_cdf(2.0 * x)).unwrap().p_value > 0.01);
}

fn level(n: u32, mode: CouplingMode) -> levy_reorder::mlmc::MlmcLevel {
    let lv = decompose_level(&MlmcBase::stable_preset(), n, 1.5).unwrap();
    match mode {
        CouplingMode::Reordering => lv.with_endpoint_cache(30_000, &mut stream(13, domain::MLMC_CACHE, 0)).unwrap(),
        CouplingMode::Independent => lv,
    }
}

#[test]
fn independent_terminal_difference_has_twice_the_annulus_variance() {
    for n in [1, 3] {
        let lv = level(n, CouplingMode::Independent);
        let s = estimate_level_stats::<f64>(&lv, CouplingMode::Independent, Functional::Terminal, 20_000, 14).unwrap();
        let want = 2.0 * lv.spec.sigma_prime_sq;
        assert!((s.var_diff - want).abs() < 5.0 * s.var_std_error, "n={n}: {} vs {want}", s.var_diff);
    }
}

#[test]
fn reordering_beats_independent_on_the_terminal_value() {
    for n in [1, 3] {
        let ind = estimate_level_stats::<f64>(
            &level(n, CouplingMode::Independent),
            CouplingMode::Independent,
            Functional::Terminal,
            5000,
            15,
        )
        .unwrap();
        let reo = estimate_level_stats::<f64>(
            &level(n, CouplingMode::Reordering),
            CouplingMode::Reordering,
            Functional::Terminal,
            5000,
            15,
        )
        .unwrap();
        let gap = ind.var_diff - reo.var_diff;
        assert!(gap > 3.0 * ind.var_std_error.hypot(reo.var_std_error), "n={n}");
    }
}

#[test]
fn level_means_telescope_to_the_finest_approximation() {
    let base = MlmcBase::stable_preset();
    let (levels, p, n) = (3u32, 1.5, 20_000);
    let g = Functional::Supremum;
    let x0 = base.truncated_approximation(0).unwrap();
    let m0 = grid_cells(0, p);
    let mut rng = stream(16, domain::AUXILIARY, 0);
    let g0: Vec<f64> =
        (0..n).map(|_| g.eval(x0.sample_levy_path::<f64, _>(m0, &mut rng).unwrap().path().values())).collect();
    let g0 = EstimateWithError::from_samples(&g0).unwrap();
    let (mut total, mut var) = (g0.mean, g0.std_error.powi(2));
    for l in 0..levels {
        let s = estimate_level_stats::<f64>(&level(l, CouplingMode::Reordering), CouplingMode::Reordering, g, n, 17)
            .unwrap();
        total += s.mean_diff;
        var += s.var_diff / n as f64;
    }
    let xl = base.truncated_approximation(levels).unwrap();
    let ml = grid_cells(levels, p);
    let mut rng = stream(16, domain::AUXILIARY, 1);
    let direct: Vec<f64> =
        (0..n).map(|_| g.eval(xl.sample_levy_path::<f64, _>(ml, &mut rng).unwrap().path().values())).collect();
    let direct = EstimateWithError::from_samples(&direct).unwrap();
    let se = (var + direct.std_error.powi(2)).sqrt();
    assert!((total - direct.mean).abs() < 4.0 * se, "{total} vs {} ± {se}", direct.mean);
}

#[test]
fn coarse_path_inside_a_pair_has_the_standalone_law() {
    let base = MlmcBase::stable_preset();
    let n = 2;
    let g = Functional::Supremum;
    for mode in [CouplingMode::Independent, CouplingMode::Reordering] {
        let lv = level(n, mode);
        let coarse: Vec<f64> =
            sample_level_batch::<f64>(&lv, mode, g, 18, 0, 3000).unwrap().iter().map(|s| s.g_coarse).collect();
        let xn = base.truncated_approximation(n).unwrap();
        let mut rng = stream(19, domain::AUXILIARY, 0);
        let alone: Vec<f64> = (0..3000)
            .map(|_| g.eval(xn.sample_levy_path::<f64, _>(grid_cells(n, 1.5), &mut rng).unwrap().path().values()))
            .collect();
        let ks = ks_two_sample(&coarse, &alone).unwrap();
        assert!(ks.p_value > 0.01, "{}: p = {}", mode.name(), ks.p_value);
    }
}

#[test]
fn empirical_endpoint_law_tracks_the_exact_one() {
    let spec = parse_preset("fig1-gamma(2,2)").unwrap();
    let model = spec.compile().unwrap();
    let exact = exact_law(&spec, 1.0).unwrap();
    let ecdf = EmpiricalCdf::from_model(&model, 1.0, 20_000, &mut stream(20, domain::ENDPOINT_CDF, 0)).unwrap();
    let ks = ks_one_sample(ecdf.sorted_samples(), |x| exact.cdf_left(x)).unwrap();
    assert!(ks.p_value > 0.01, "p = {}", ks.p_value);
}

#[test]
fn multilevel_terminal_value_matches_direct_simulation() {
    // finite activity: levels past the inner truncation are degenerate
    let base = MlmcBase { inner: 0.2, ..MlmcBase::stable_preset() };
    let cfg = MlmcConfig { min_levels: 4, ..MlmcConfig::new(21) };
    let r = mlmc_run::<f64>(&base, Functional::Terminal, CouplingMode::Reordering, 0.01, &cfg).unwrap();
    let exact = base.truncated_approximation(10).unwrap();
    let mut rng = stream(22, domain::AUXILIARY, 0);
    let direct: Vec<f64> = (0..1_000_000).map(|_| sample_endpoint::<f64, _>(&exact, &mut rng).unwrap()).collect();
    let direct = EstimateWithError::from_samples(&direct).unwrap();
    assert!(r.converged);
    assert!((r.estimate - direct.mean).abs() < 4.0 * r.std_error.hypot(direct.std_error));
}

#[test]
fn reordering_needs_less_work_for_the_same_target() {
    let base = MlmcBase::stable_preset();
    let cfg = MlmcConfig::new(23);
    let run = |mode| mlmc_run::<f64>(&base, Functional::Supremum, mode, 0.03, &cfg).unwrap();
    let (ind, reo) = (run(CouplingMode::Independent), run(CouplingMode::Reordering));
    assert!(reo.levels.len() >= 4 && ind.levels.len() >= 4);
    assert!(reo.total_cost <= ind.total_cost, "{} vs {}", reo.total_cost, ind.total_cost);
}
