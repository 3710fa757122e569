//! Expected value of perfect information for validation.
//!
//! With `(NB_model, NB_all)` uncertain, the expected NB of deciding now is
//! `max{0, E NB_model, E NB_all}` while knowing the truth would yield
//! `E max{0, NB_model, NB_all}`. The EVPI is the gap between the two. The
//! expectation is taken either over bootstrap draws or over a bivariate normal
//! fitted by plug-in moments.

use alloc::vec::Vec;

use crate::exec::{Executor, Sequential};
use crate::kernels::{e_max_zero_bvn, p_first_is_positive_max, BvnParams};
use crate::net_benefit::{nb_all, nb_model, Threshold, ValidationSample};
use crate::resample::{bootstrap_grid_draws_with, NbDrawMatrix, ResampleMethod};
use crate::{Error, Result};

/// How the distribution of true NBs is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    BayesianBootstrap,
    OrdinaryBootstrap,
    Asymptotic,
}

impl Method {
    pub const ALL: [Method; 3] = [
        Method::BayesianBootstrap,
        Method::OrdinaryBootstrap,
        Method::Asymptotic,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::BayesianBootstrap => "bayes",
            Method::OrdinaryBootstrap => "ordinary",
            Method::Asymptotic => "asymptotic",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.label() == label)
    }

    pub fn resampler(self) -> Option<ResampleMethod> {
        match self {
            Method::BayesianBootstrap => Some(ResampleMethod::Bayesian),
            Method::OrdinaryBootstrap => Some(ResampleMethod::Ordinary),
            Method::Asymptotic => None,
        }
    }
}

impl From<ResampleMethod> for Method {
    fn from(m: ResampleMethod) -> Self {
        match m {
            ResampleMethod::Bayesian => Method::BayesianBootstrap,
            ResampleMethod::Ordinary => Method::OrdinaryBootstrap,
        }
    }
}

/// A decision option. `Model(i)` is the `i`-th candidate model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Strategy {
    Model(usize),
    TreatAll,
    TreatNone,
}

impl Strategy {
    /// Best option among expected NBs. Ties go to the simpler default: a
    /// model must strictly beat both defaults, treat-all must strictly beat
    /// zero.
    fn best(model_means: &[f64], mean_all: f64) -> Self {
        let (best_idx, best_model) = model_means
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
        if best_model > mean_all.max(0.0) {
            Strategy::Model(best_idx)
        } else if mean_all > 0.0 {
            Strategy::TreatAll
        } else {
            Strategy::TreatNone
        }
    }
}

/// Plug-in moments of `(NB_model, NB_all)` for the normal approximation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MomentSet {
    pub mean_model: f64,
    pub mean_all: f64,
    pub var_model: f64,
    pub var_all: f64,
    pub cov: f64,
    pub n: usize,
    pub p0: f64,
    pub p_tp: f64,
    pub p_fp: f64,
    pub threshold: Threshold,
}

/// Sample moments of the NB estimators at `t`.
///
/// With `c = z/(1−z)`, each observation contributes `T = I(π≥z)(Y − (1−Y)c)`
/// to NB_model and `A = Y − (1−Y)c` to NB_all, so
///
/// ```text
/// var_model = [P_TP(1−P_TP) + c²·P_FP(1−P_FP) + 2c·P_TP·P_FP] / n
/// var_all   = P0(1−P0) / (n(1−z)²)
/// cov       = [(1−P0)·P_TP + c·P0·P_FP] / (n(1−z))
/// ```
pub fn moments(sample: &ValidationSample, t: Threshold) -> Result<MomentSet> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    let (tp, fp) = sample.confusion(t);
    let nf = n as f64;
    let (p_tp, p_fp, p0) = (tp as f64 / nf, fp as f64 / nf, sample.prevalence());
    let c = t.harm_weight();
    let z = t.value();
    let var_model =
        (p_tp * (1.0 - p_tp) + c * c * p_fp * (1.0 - p_fp) + 2.0 * c * p_tp * p_fp) / nf;
    let var_all = p0 * (1.0 - p0) / ((1.0 - z) * (1.0 - z)) / nf;
    let cov = ((1.0 - p0) * p_tp + c * p0 * p_fp) / ((1.0 - z) * nf);
    Ok(MomentSet {
        mean_model: nb_model(sample, t),
        mean_all: nb_all(sample, t),
        var_model,
        var_all,
        cov,
        n,
        p0,
        p_tp,
        p_fp,
        threshold: t,
    })
}

impl MomentSet {
    /// `(var_model, var_all, cov)` floored to the nearest PSD matrix when the
    /// violation is within `1e-10`; larger violations are an error.
    pub fn repaired_covariance(&self) -> Result<(f64, f64, f64)> {
        const TOL: f64 = 1e-10;
        let (a, b, c) = (self.var_model, self.var_all, self.cov);
        if ![a, b, c].iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("moment covariance"));
        }
        let half_trace = 0.5 * (a + b);
        let radius = libm::sqrt(0.25 * (a - b) * (a - b) + c * c);
        let (hi, lo) = (half_trace + radius, half_trace - radius);
        if lo >= 0.0 {
            return Ok((a, b, c));
        }
        if lo < -TOL {
            return Err(Error::NotPositiveSemiDefinite { min_eigenvalue: lo });
        }
        if hi <= 0.0 {
            return Ok((0.0, 0.0, 0.0));
        }
        // keep the leading eigenpair only
        let (vx, vy) = if c != 0.0 {
            (hi - b, c)
        } else if a >= b {
            (1.0, 0.0)
        } else {
            (0.0, 1.0)
        };
        let norm = vx * vx + vy * vy;
        Ok((hi * vx * vx / norm, hi * vy * vy / norm, hi * vx * vy / norm))
    }
}

/// EVPI and companions for one threshold and one method.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VoiResult {
    pub method: Method,
    pub threshold: Threshold,
    /// `enb_perfect − enb_current`, clamped at 0.
    pub evpi: f64,
    /// The difference before clamping.
    pub evpi_unclamped: f64,
    /// `max{0, ENB_model, ENB_all}`
    pub enb_current: f64,
    /// `E max{0, NB_model, NB_all}`
    pub enb_perfect: f64,
    /// Expected NB of the best model under current information.
    pub enb_model: f64,
    pub enb_all: f64,
    pub p_useful: f64,
    pub best_strategy: Strategy,
    pub r_evpi: Option<f64>,
    /// Monte Carlo standard error of `enb_perfect` (bootstrap methods only).
    pub mc_se: Option<f64>,
    pub n_reps: Option<usize>,
    pub seed: Option<u64>,
}

/// Share of draws in which each option is the best.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyShares {
    pub model: f64,
    pub treat_all: f64,
    pub treat_none: f64,
}

/// Partition of the draws by winning option, with the same tie rule as the
/// expected-NB decision: a model must strictly beat `max(0, NB_all)`, treat-all
/// must strictly beat 0.
pub fn strategy_shares(draws: &NbDrawMatrix) -> StrategyShares {
    let all = draws.all_column();
    let (mut model, mut treat_all, mut treat_none) = (0usize, 0usize, 0usize);
    for row in draws.rows() {
        match Strategy::best(&row[..all], row[all]) {
            Strategy::Model(_) => model += 1,
            Strategy::TreatAll => treat_all += 1,
            Strategy::TreatNone => treat_none += 1,
        }
    }
    let n = draws.n_rows() as f64;
    StrategyShares {
        model: model as f64 / n,
        treat_all: treat_all as f64 / n,
        treat_none: treat_none as f64 / n,
    }
}

/// Fraction of draws where a model strictly beats both default strategies.
pub fn p_useful(draws: &NbDrawMatrix) -> f64 {
    strategy_shares(draws).model
}

/// `(E max{0,NB} − max{0, ENB_all}) / (max{0, ENB_model, ENB_all} − max{0, ENB_all})`,
/// defined only when the model is the current best.
pub fn relative_evpi(enb_perfect: f64, mean_model: f64, mean_all: f64) -> Option<f64> {
    let baseline = mean_all.max(0.0);
    let gain = mean_model.max(baseline) - baseline;
    (mean_model > baseline && gain > 0.0).then(|| (enb_perfect - baseline) / gain)
}

/// EVPI from bootstrap draws.
///
/// Expected NBs under current information are the column means of the draws
/// rather than the original-sample estimates, which keeps the estimate
/// nonnegative up to rounding.
pub fn evpi_bootstrap(draws: &NbDrawMatrix) -> Result<VoiResult> {
    let n = draws.n_rows();
    if n < 2 {
        return Err(Error::TooFewReplicates { needed: 2, got: n });
    }
    let means = draws.column_means();
    let all = draws.all_column();

    let row_max: Vec<f64> = draws
        .rows()
        .map(|r| r.iter().copied().fold(0.0_f64, f64::max))
        .collect();
    let enb_perfect = row_max.iter().sum::<f64>() / n as f64;
    let ss: f64 = row_max.iter().map(|v| (v - enb_perfect) * (v - enb_perfect)).sum();
    let mc_se = libm::sqrt(ss / (n - 1) as f64 / n as f64);

    let enb_current = means.iter().copied().fold(0.0_f64, f64::max);
    let enb_model = means[..all].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let evpi_unclamped = enb_perfect - enb_current;
    Ok(VoiResult {
        method: draws.method.into(),
        threshold: draws.threshold,
        evpi: evpi_unclamped.max(0.0),
        evpi_unclamped,
        enb_current,
        enb_perfect,
        enb_model,
        enb_all: means[all],
        p_useful: p_useful(draws),
        best_strategy: Strategy::best(&means[..all], means[all]),
        r_evpi: relative_evpi(enb_perfect, enb_model, means[all]),
        mc_se: Some(mc_se),
        n_reps: Some(n),
        seed: Some(draws.seed),
    })
}

/// EVPI under `(NB_model, NB_all) ~ BVN(means, Σ)` using the closed-form
/// expectation of the positive maximum.
pub fn evpi_asymptotic(m: &MomentSet) -> Result<VoiResult> {
    let (var_model, var_all, cov) = m.repaired_covariance()?;
    let params = BvnParams::from_moments(m.mean_model, m.mean_all, var_model, var_all, cov)?;
    let enb_perfect = e_max_zero_bvn(&params);
    if !enb_perfect.is_finite() {
        return Err(Error::NonFinite("asymptotic expected maximum"));
    }
    let enb_current = 0.0_f64.max(m.mean_model).max(m.mean_all);
    let evpi_unclamped = enb_perfect - enb_current;
    Ok(VoiResult {
        method: Method::Asymptotic,
        threshold: m.threshold,
        evpi: evpi_unclamped.max(0.0),
        evpi_unclamped,
        enb_current,
        enb_perfect,
        enb_model: m.mean_model,
        enb_all: m.mean_all,
        p_useful: p_first_is_positive_max(&params),
        best_strategy: Strategy::best(&[m.mean_model], m.mean_all),
        r_evpi: relative_evpi(enb_perfect, m.mean_model, m.mean_all),
        mc_se: None,
        n_reps: None,
        seed: None,
    })
}

/// What to compute in a threshold sweep.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepSettings {
    pub methods: Vec<Method>,
    pub n_reps: usize,
    pub seed: u64,
    /// Keep the bootstrap draw matrices in the output.
    pub keep_draws: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub threshold: Threshold,
    /// One entry per requested method, in request order.
    pub results: Vec<VoiResult>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ThresholdSweep {
    pub points: Vec<SweepPoint>,
    /// Per bootstrap method, one draw matrix per threshold (when kept).
    pub draws: Vec<(Method, Vec<NbDrawMatrix>)>,
}

/// EVPI for every threshold in `grid` and every requested method. Bootstrap
/// methods draw one weight vector per replicate and reuse it across the grid.
pub fn evpi_threshold_sweep(
    sample: &ValidationSample,
    grid: &[Threshold],
    settings: &SweepSettings,
) -> Result<ThresholdSweep> {
    evpi_threshold_sweep_with(&Sequential, sample, grid, settings)
}

pub fn evpi_threshold_sweep_with<E: Executor>(
    exec: &E,
    sample: &ValidationSample,
    grid: &[Threshold],
    settings: &SweepSettings,
) -> Result<ThresholdSweep> {
    crate::net_benefit::check_grid(grid)?;
    if settings.methods.is_empty() {
        return Err(Error::invalid("no EVPI method requested"));
    }
    let mut per_method: Vec<Vec<VoiResult>> = Vec::with_capacity(settings.methods.len());
    let mut kept = Vec::new();
    for &method in &settings.methods {
        let results = match method.resampler() {
            Some(resampler) => {
                let draws = bootstrap_grid_draws_with(
                    exec,
                    &[sample],
                    grid,
                    settings.n_reps,
                    resampler,
                    settings.seed,
                )?;
                let results = draws.iter().map(evpi_bootstrap).collect::<Result<Vec<_>>>()?;
                if settings.keep_draws {
                    kept.push((method, draws));
                }
                results
            }
            None => grid
                .iter()
                .map(|&t| evpi_asymptotic(&moments(sample, t)?))
                .collect::<Result<Vec<_>>>()?,
        };
        per_method.push(results);
    }
    let points = grid
        .iter()
        .enumerate()
        .map(|(j, &threshold)| SweepPoint {
            threshold,
            results: per_method.iter().map(|r| r[j].clone()).collect(),
        })
        .collect();
    Ok(ThresholdSweep {
        points,
        draws: kept,
    })
}
