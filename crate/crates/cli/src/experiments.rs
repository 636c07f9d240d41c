//! The experiments behind each subcommand. Every function writes its CSV
//! files under `cfg.out` and returns the numbers it wrote.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use levy_reorder::coupling::EmpiricalCdf;
use levy_reorder::levy::{annulus_preset, model_moments, parse_preset, LevyModel};
use levy_reorder::metrics::{
    coupled_replication, endpoint_rmse_from_replications, msmd_from_replications, replicate, CouplingConfig,
    MsmdEstimate, Replication,
};
use levy_reorder::mlmc::{
    decompose_level, estimate_level_stats, mlmc_run, CouplingMode, LevelStats, MlmcBase, MlmcConfig, MlmcResult,
};
use levy_reorder::rng::{domain, stream};
use levy_reorder::stats::{regression_slope, EstimateWithError};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

/// Truncation pairs `(eps1, eps2)` of the default k sweep. The first is the
/// default model, so its rows agree with `msmd` on the same seed.
pub const SWEEP_TRUNCATIONS: [(f64, f64); 4] = [(0.1, 0.03), (0.1, 0.01), (1.0, 0.03), (1.0, 0.01)];

pub const SHOWCASE_QUANTILES: [f64; 3] = [0.05, 0.5, 0.95];

const HISTOGRAM_BINS: usize = 40;

fn num(x: f64) -> String {
    format!("{x}")
}

fn ks_label(ks: &[usize]) -> String {
    ks.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
}

struct Table {
    path: PathBuf,
    writer: csv::Writer<BufWriter<File>>,
}

impl Table {
    fn create(cfg: &ExperimentConfig, name: &str, units: &str, header: &[&str]) -> CliResult<Self> {
        let path = cfg.out.join(name);
        let io_err = |source| CliError::Output { path: path.clone(), source };
        fs::create_dir_all(&cfg.out).map_err(|source| CliError::Output { path: cfg.out.clone(), source })?;
        let mut file = BufWriter::new(File::create(&path).map_err(io_err)?);
        writeln!(file, "# config: {}", cfg.echo()).map_err(io_err)?;
        writeln!(file, "# units: {units}").map_err(io_err)?;
        let mut writer = csv::Writer::from_writer(file);
        writer.write_record(header)?;
        Ok(Self { path, writer })
    }

    fn row(&mut self, fields: &[String]) -> CliResult<()> {
        Ok(self.writer.write_record(fields)?)
    }

    fn finish(mut self) -> CliResult<PathBuf> {
        self.writer.flush().map_err(|source| CliError::Output { path: self.path.clone(), source })?;
        Ok(self.path)
    }
}

/// Empirical law of `X(1)` from `endpoint_samples` draws of stream `index`.
pub fn endpoint_law(model: &LevyModel, cfg: &ExperimentConfig, index: u64) -> CliResult<EmpiricalCdf> {
    let mut rng = stream(cfg.seed, domain::ENDPOINT_CDF, index);
    Ok(EmpiricalCdf::from_model(model, 1.0, cfg.endpoint_samples, &mut rng)?)
}

fn run_reps(
    model: &LevyModel,
    law: &EmpiricalCdf,
    ks: &[usize],
    cfg: &ExperimentConfig,
) -> CliResult<Vec<Replication>> {
    let c = CouplingConfig { ks, q: cfg.q, endpoint: law };
    Ok(replicate::<f64>(model, c, cfg.reps, cfg.seed)?)
}

#[derive(Debug, Clone)]
pub struct CoupleReport {
    pub files: Vec<PathBuf>,
    pub sup: f64,
    pub endpoint_error: f64,
}

/// One coupled pair of paths on the fine grid.
pub fn couple(cfg: &ExperimentConfig) -> CliResult<CoupleReport> {
    let model = cfg.model_spec()?.compile()?;
    let law = endpoint_law(&model, cfg, 0)?;
    let c = coupled_replication::<f64>(&model, CouplingConfig { ks: &cfg.ks, q: cfg.q, endpoint: &law }, cfg.seed, 0)?;
    let mut t = Table::create(cfg, "couple.csv", "t in [0,1]; path values", &["t", "x", "w", "w_prime"])?;
    for j in 0..=c.x.cells() {
        t.row(&[num(c.x.time(j)), num(c.x.at(j)), num(c.w.at(j)), num(c.w_prime.at(j))])?;
    }
    Ok(CoupleReport {
        files: vec![t.finish()?],
        sup: levy_reorder::metrics::sup_distance(&c.x, &c.w)?,
        endpoint_error: c.w.endpoint() - c.x.endpoint(),
    })
}

#[derive(Debug, Clone)]
pub struct MsmdReport {
    pub files: Vec<PathBuf>,
    pub msmd: MsmdEstimate,
    pub endpoint_rmse: EstimateWithError,
}

/// Root mean squared maximal distance for `cfg.ks`.
pub fn msmd(cfg: &ExperimentConfig) -> CliResult<MsmdReport> {
    let model = cfg.model_spec()?.compile()?;
    let law = endpoint_law(&model, cfg, 0)?;
    let reps = run_reps(&model, &law, &cfg.ks, cfg)?;
    let m = msmd_from_replications(&reps)?;
    let e = endpoint_rmse_from_replications(&reps)?;
    let mut t = Table::create(
        cfg,
        "msmd.csv",
        "distances in path units; *_se are standard errors",
        &["model", "ks", "q", "reps", "mean_sq", "mean_sq_se", "rms", "rms_se", "endpoint_rmse", "endpoint_rmse_se"],
    )?;
    t.row(&[
        cfg.model_text().to_string(),
        ks_label(&cfg.ks),
        cfg.q.to_string(),
        cfg.reps.to_string(),
        num(m.mean_square.mean),
        num(m.mean_square.std_error),
        num(m.rms.mean),
        num(m.rms.std_error),
        num(e.mean),
        num(e.std_error),
    ])?;
    Ok(MsmdReport { files: vec![t.finish()?], msmd: m, endpoint_rmse: e })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub model: String,
    pub ks: Vec<usize>,
    pub rms: EstimateWithError,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub files: Vec<PathBuf>,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// Row with the smallest RMS among those of `model`.
    pub fn best(&self, model: &str) -> Option<&SweepRow> {
        self.rows
            .iter()
            .filter(|r| r.model == model)
            .min_by(|a, b| a.rms.mean.total_cmp(&b.rms.mean))
    }
}

fn sweep_models(cfg: &ExperimentConfig) -> Vec<String> {
    match &cfg.model {
        Some(m) => vec![m.clone()],
        None => SWEEP_TRUNCATIONS.iter().map(|(a, b)| format!("exp-stable({a},{b})")).collect(),
    }
}

/// RMS maximal distance against a single-level `k`.
pub fn sweep_k(cfg: &ExperimentConfig) -> CliResult<SweepReport> {
    let mut t = Table::create(cfg, "sweep_k.csv", "rms in path units", &["model", "k", "rms", "rms_se"])?;
    let mut rows = Vec::new();
    for (i, name) in sweep_models(cfg).into_iter().enumerate() {
        let model = parse_preset(&name)?.compile()?;
        let law = endpoint_law(&model, cfg, i as u64)?;
        for &k in &cfg.sweep {
            let rms = msmd_from_replications(&run_reps(&model, &law, &[k], cfg)?)?.rms;
            log::info!("sweep-k {name} k={k} rms={:.4}", rms.mean);
            t.row(&[name.clone(), k.to_string(), num(rms.mean), num(rms.std_error)])?;
            rows.push(SweepRow { model: name.clone(), ks: vec![k], rms });
        }
    }
    Ok(SweepReport { files: vec![t.finish()?], rows })
}

/// RMS maximal distance of the two-level coupling `[k, k2]`.
pub fn two_level(cfg: &ExperimentConfig) -> CliResult<SweepReport> {
    let name = cfg.model_text().to_string();
    let model = cfg.model_spec()?.compile()?;
    let law = endpoint_law(&model, cfg, 0)?;
    let cells = 1usize << cfg.q;
    let mut t = Table::create(cfg, "two_level.csv", "rms in path units", &["model", "k", "k2", "rms", "rms_se"])?;
    let mut rows = Vec::new();
    for &k2 in &cfg.k2s {
        for &k in cfg.sweep.iter().filter(|&&k| k * k2 <= cells) {
            let ks = if k2 == 1 { vec![k] } else { vec![k, k2] };
            let rms = msmd_from_replications(&run_reps(&model, &law, &ks, cfg)?)?.rms;
            log::info!("two-level k={k} k2={k2} rms={:.4}", rms.mean);
            t.row(&[name.clone(), k.to_string(), k2.to_string(), num(rms.mean), num(rms.std_error)])?;
            rows.push(SweepRow { model: name.clone(), ks, rms });
        }
    }
    Ok(SweepReport { files: vec![t.finish()?], rows })
}

#[derive(Debug, Clone)]
pub struct ShowcaseReport {
    pub files: Vec<PathBuf>,
    pub msmd: MsmdEstimate,
    pub endpoint_rmse: EstimateWithError,
    /// Replication indices shown at each of [`SHOWCASE_QUANTILES`].
    pub quantile_reps: Vec<u64>,
}

/// Distribution of maximal distances at `cfg.ks` plus three example pairs.
pub fn showcase(cfg: &ExperimentConfig) -> CliResult<ShowcaseReport> {
    let model = cfg.model_spec()?.compile()?;
    let law = endpoint_law(&model, cfg, 0)?;
    let reps = run_reps(&model, &law, &cfg.ks, cfg)?;
    let m = msmd_from_replications(&reps)?;
    let e = endpoint_rmse_from_replications(&reps)?;
    let mut files = Vec::new();

    let mut t = Table::create(cfg, "showcase_distances.csv", "path units", &["rep", "sup_distance", "endpoint_error"])?;
    for (i, r) in reps.iter().enumerate() {
        t.row(&[i.to_string(), num(r.sup), num(r.endpoint_error)])?;
    }
    files.push(t.finish()?);

    let top = reps.iter().map(|r| r.sup).fold(0.0, f64::max);
    let width = if top > 0.0 { top / HISTOGRAM_BINS as f64 } else { 1.0 };
    let mut counts = [0usize; HISTOGRAM_BINS];
    for r in &reps {
        counts[((r.sup / width) as usize).min(HISTOGRAM_BINS - 1)] += 1;
    }
    let mut t = Table::create(cfg, "showcase_histogram.csv", "bin edges in path units", &["lo", "hi", "count"])?;
    for (b, c) in counts.iter().enumerate() {
        t.row(&[num(b as f64 * width), num((b + 1) as f64 * width), c.to_string()])?;
    }
    files.push(t.finish()?);

    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.sort_by(|&a, &b| reps[a].sup.total_cmp(&reps[b].sup).then(a.cmp(&b)));
    let quantile_reps: Vec<u64> = SHOWCASE_QUANTILES
        .iter()
        .map(|&p| order[(p * (reps.len() - 1) as f64).round() as usize] as u64)
        .collect();
    let mut t = Table::create(
        cfg,
        "showcase_paths.csv",
        "t in [0,1]; path values",
        &["quantile", "rep", "t", "x", "w"],
    )?;
    let c = CouplingConfig { ks: &cfg.ks, q: cfg.q, endpoint: &law };
    for (&p, &i) in SHOWCASE_QUANTILES.iter().zip(&quantile_reps) {
        let pair = coupled_replication::<f64>(&model, c, cfg.seed, i)?;
        for j in 0..=pair.x.cells() {
            t.row(&[num(p), i.to_string(), num(pair.x.time(j)), num(pair.x.at(j)), num(pair.w.at(j))])?;
        }
    }
    files.push(t.finish()?);

    let mut t = Table::create(
        cfg,
        "showcase_summary.csv",
        "path units; *_se are standard errors",
        &["ks", "reps", "rms", "rms_se", "endpoint_rmse", "endpoint_rmse_se"],
    )?;
    t.row(&[
        ks_label(&cfg.ks),
        cfg.reps.to_string(),
        num(m.rms.mean),
        num(m.rms.std_error),
        num(e.mean),
        num(e.std_error),
    ])?;
    files.push(t.finish()?);
    Ok(ShowcaseReport { files, msmd: m, endpoint_rmse: e, quantile_reps })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitRow {
    pub n: u32,
    pub mu4: f64,
    pub d_star: EstimateWithError,
    pub k_star: usize,
    /// `ln(μ4 |ln μ4|) / 4`.
    pub theory_log_d: f64,
    /// `ln(|ln μ4| / μ4) / 2`.
    pub theory_log_k: f64,
}

#[derive(Debug, Clone)]
pub struct LimitReport {
    pub files: Vec<PathBuf>,
    pub rows: Vec<LimitRow>,
}

impl LimitReport {
    /// Slopes against `n` of (empirical ln d*, theory, empirical ln k*, theory)
    /// over rows with `n` in `lo..=hi`.
    pub fn slopes(&self, lo: u32, hi: u32) -> CliResult<[f64; 4]> {
        let rows: Vec<&LimitRow> = self.rows.iter().filter(|r| (lo..=hi).contains(&r.n)).collect();
        let n: Vec<f64> = rows.iter().map(|r| f64::from(r.n)).collect();
        let slope = |f: &dyn Fn(&LimitRow) -> f64| -> CliResult<f64> {
            let y: Vec<f64> = rows.iter().map(|r| f(r)).collect();
            Ok(regression_slope(&n, &y)?)
        };
        Ok([
            slope(&|r| r.d_star.mean.ln())?,
            slope(&|r| r.theory_log_d)?,
            slope(&|r| (r.k_star as f64).ln())?,
            slope(&|r| r.theory_log_k)?,
        ])
    }
}

/// Best k and distance for the annulus models `annulus(n)`.
pub fn limit_regime(cfg: &ExperimentConfig) -> CliResult<LimitReport> {
    let mut sweep = Table::create(cfg, "limit_regime_sweep.csv", "rms in path units", &["n", "k", "rms", "rms_se"])?;
    let mut rows = Vec::new();
    for n in cfg.level_min..=cfg.level_max {
        let spec = annulus_preset(n);
        let mu4 = model_moments(&spec)?.mu4;
        let model = spec.compile()?;
        let law = endpoint_law(&model, cfg, u64::from(n))?;
        let mut best: Option<(usize, EstimateWithError)> = None;
        for &k in &cfg.sweep {
            let rms = msmd_from_replications(&run_reps(&model, &law, &[k], cfg)?)?.rms;
            sweep.row(&[n.to_string(), k.to_string(), num(rms.mean), num(rms.std_error)])?;
            if best.is_none_or(|(_, b)| rms.mean < b.mean) {
                best = Some((k, rms));
            }
        }
        let (k_star, d_star) = best.expect("sweep is non-empty");
        log::info!("limit-regime n={n} mu4={mu4:.3e} k*={k_star} d*={:.4}", d_star.mean);
        let l = mu4.ln().abs();
        rows.push(LimitRow {
            n,
            mu4,
            d_star,
            k_star,
            theory_log_d: (mu4 * l).ln() / 4.0,
            theory_log_k: (l / mu4).ln() / 2.0,
        });
    }
    let mut t = Table::create(
        cfg,
        "limit_regime.csv",
        "natural logs; d_star in path units",
        &["n", "mu4", "d_star", "d_star_se", "k_star", "log_d_star", "log_k_star", "theory_log_d", "theory_log_k"],
    )?;
    for r in &rows {
        t.row(&[
            r.n.to_string(),
            num(r.mu4),
            num(r.d_star.mean),
            num(r.d_star.std_error),
            r.k_star.to_string(),
            num(r.d_star.mean.ln()),
            num((r.k_star as f64).ln()),
            num(r.theory_log_d),
            num(r.theory_log_k),
        ])?;
    }
    Ok(LimitReport { files: vec![sweep.finish()?, t.finish()?], rows })
}

pub const MODES: [CouplingMode; 2] = [CouplingMode::Independent, CouplingMode::Reordering];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub mode: CouplingMode,
    pub n: u32,
    pub eps: f64,
    pub k_prime: usize,
    pub m_n: usize,
    pub sigma_prime_sq: f64,
    pub stats: LevelStats,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub files: Vec<PathBuf>,
    pub levels: Vec<BenchRow>,
    pub runs: Vec<(CouplingMode, f64, MlmcResult)>,
}

impl BenchReport {
    /// Slope of `log2 var_diff` against the level index for `mode`.
    pub fn variance_slope(&self, mode: CouplingMode) -> CliResult<f64> {
        let rows: Vec<&BenchRow> = self.levels.iter().filter(|r| r.mode == mode).collect();
        let x: Vec<f64> = rows.iter().map(|r| f64::from(r.n)).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.stats.var_diff.log2()).collect();
        Ok(regression_slope(&x, &y)?)
    }
}

fn mlmc_base(cfg: &ExperimentConfig) -> CliResult<MlmcBase> {
    match &cfg.model {
        Some(m) => Ok(MlmcBase::from_spec(&parse_preset(m)?)?),
        None => Ok(MlmcBase::stable_preset()),
    }
}

/// Level variances of both couplings and, for each target error, a full
/// multilevel run in both modes.
pub fn mlmc_bench(cfg: &ExperimentConfig) -> CliResult<BenchReport> {
    let base = mlmc_base(cfg)?;
    let g = cfg.functional;
    let mut t = Table::create(
        cfg,
        "mlmc_levels.csv",
        "n indexes the pair (X_n, X_n+1); eps = 2^-n; cost in work units per sample",
        &[
            "mode", "n", "eps", "k_prime", "m_n", "sigma_prime_sq", "mean_diff", "var_diff", "var_diff_se", "cost",
            "n_samples",
        ],
    )?;
    let mut levels = Vec::new();
    for n in cfg.level_min..=cfg.level_max {
        for mode in MODES {
            let mut level = decompose_level(&base, n, cfg.p)?;
            if mode == CouplingMode::Reordering {
                let mut rng = stream(cfg.seed, domain::MLMC_CACHE, u64::from(n) + 1);
                level = level.with_endpoint_cache(cfg.endpoint_samples, &mut rng)?;
            }
            let stats = estimate_level_stats::<f64>(&level, mode, g, cfg.samples, cfg.seed)?;
            let s = &level.spec;
            log::info!("mlmc-bench {} n={n} var={:.3e}", mode.name(), stats.var_diff);
            t.row(&[
                mode.name().to_string(),
                n.to_string(),
                num(s.eps_n),
                s.k_prime.to_string(),
                s.m_n.to_string(),
                num(s.sigma_prime_sq),
                num(stats.mean_diff),
                num(stats.var_diff),
                num(stats.var_std_error),
                num(stats.cost),
                stats.n_samples.to_string(),
            ])?;
            levels.push(BenchRow {
                mode,
                n,
                eps: s.eps_n,
                k_prime: s.k_prime,
                m_n: s.m_n,
                sigma_prime_sq: s.sigma_prime_sq,
                stats,
            });
        }
    }
    let mut files = vec![t.finish()?];

    let mut runs = Vec::new();
    if !cfg.deltas.is_empty() {
        let mc = MlmcConfig {
            p: cfg.p,
            max_level: cfg.max_level,
            cache_size: cfg.endpoint_samples,
            ..MlmcConfig::new(cfg.seed)
        };
        let mut summary = Table::create(
            cfg,
            "mlmc_runs.csv",
            "delta is the target RMS error; total_cost in work units",
            &["mode", "delta", "estimate", "std_error", "bias_estimate", "total_cost", "levels", "converged"],
        )?;
        let mut per_level = Table::create(
            cfg,
            "mlmc_run_levels.csv",
            "level 0 is g(X_0); eps and m_n belong to the finer path; cost in work units per sample",
            &["mode", "delta", "level", "eps", "k_prime", "m_n", "mean_diff", "var_diff", "cost", "n_samples"],
        )?;
        for &delta in &cfg.deltas {
            for mode in MODES {
                let r = mlmc_run::<f64>(&base, g, mode, delta, &mc)?;
                log::info!("mlmc {} delta={delta} cost={:.3e}", mode.name(), r.total_cost);
                summary.row(&[
                    mode.name().to_string(),
                    num(delta),
                    num(r.estimate),
                    num(r.std_error),
                    num(r.bias_estimate),
                    num(r.total_cost),
                    r.levels.len().to_string(),
                    r.converged.to_string(),
                ])?;
                for l in &r.levels {
                    per_level.row(&[
                        mode.name().to_string(),
                        num(delta),
                        l.level.to_string(),
                        num(l.eps),
                        l.k_prime.to_string(),
                        l.m_n.to_string(),
                        num(l.stats.mean_diff),
                        num(l.stats.var_diff),
                        num(l.stats.cost),
                        l.stats.n_samples.to_string(),
                    ])?;
                }
                runs.push((mode, delta, r));
            }
        }
        files.push(summary.finish()?);
        files.push(per_level.finish()?);
    }
    Ok(BenchReport { files, levels, runs })
}
