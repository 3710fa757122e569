//! Simulation lab: synthetic logistic data, sanity metrics and sample-size
//! sweeps of the validation EVPI.
//!
//! Every sweep cell `(size, sim)` owns two random streams derived from the
//! base seed, one for drawing the sample and one for its bootstraps, so a
//! sweep gives the same numbers whichever executor runs it.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::exec::{Executor, Sequential};
use crate::kernels::rng::{self, categorical, standard_normal_pair, uniform};
use crate::net_benefit::{check_grid, Threshold, ValidationSample};
use crate::voi::{evpi_threshold_sweep, Method, SweepSettings};
use crate::{Error, Result};

/// Below this many observations on either side of a threshold the EVPI
/// estimate is driven by a handful of rows.
pub const SPARSE_SIDE: usize = 20;

/// Numerically stable inverse logit.
#[inline]
pub fn inv_logit(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + libm::exp(-x))
    } else {
        let e = libm::exp(x);
        e / (1.0 + e)
    }
}

/// `logit P(Y=1|X) = intercept + slopes·X` with i.i.d. standard normal `X`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogisticDgm {
    intercept: f64,
    slopes: Vec<f64>,
}

impl LogisticDgm {
    pub fn new(intercept: f64, slopes: Vec<f64>) -> Result<Self> {
        if slopes.is_empty() {
            return Err(Error::invalid("data-generating model needs at least one slope"));
        }
        if !intercept.is_finite() || slopes.iter().any(|b| !b.is_finite()) {
            return Err(Error::invalid("data-generating model coefficients must be finite"));
        }
        Ok(Self { intercept, slopes })
    }

    /// One covariate: prevalence about 20%, c-statistic about 0.70.
    pub fn reference() -> Self {
        Self {
            intercept: -1.55,
            slopes: vec![0.77],
        }
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Draws one covariate row and returns its true risk.
    fn draw_risk<R: RngCore + ?Sized>(&self, normals: &mut NormalSource<'_, R>) -> f64 {
        let eta = self
            .slopes
            .iter()
            .fold(self.intercept, |acc, b| acc + b * normals.next());
        inv_logit(eta)
    }
}

struct NormalSource<'a, R: ?Sized> {
    rng: &'a mut R,
    spare: Option<f64>,
}

impl<'a, R: RngCore + ?Sized> NormalSource<'a, R> {
    fn new(rng: &'a mut R) -> Self {
        Self { rng, spare: None }
    }

    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let (a, b) = standard_normal_pair(self.rng);
        self.spare = Some(b);
        a
    }

    fn uniform(&mut self) -> f64 {
        uniform(self.rng)
    }
}

/// `n` rows from the model. The returned risks are the true risks, i.e. the
/// prediction model coincides with the data-generating one.
pub fn generate_synthetic<R: RngCore + ?Sized>(
    dgm: &LogisticDgm,
    n: usize,
    rng: &mut R,
) -> Result<ValidationSample> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mut risks = Vec::with_capacity(n);
    let mut outcomes = Vec::with_capacity(n);
    let mut source = NormalSource::new(rng);
    for _ in 0..n {
        let p = dgm.draw_risk(&mut source);
        outcomes.push(source.uniform() < p);
        risks.push(p);
    }
    ValidationSample::new(outcomes, risks)
}

/// Probability that a random event row has a higher risk than a random
/// non-event row, ties counting one half.
pub fn c_statistic(sample: &ValidationSample) -> Result<f64> {
    let events = sample.events();
    let nonevents = sample.len() - events;
    if events == 0 || nonevents == 0 {
        return Err(Error::SingleClass);
    }
    let pairs = events as f64 * nonevents as f64;
    if sample.len() <= 10_000 {
        let (pos, neg): (Vec<_>, Vec<_>) = sample
            .outcomes()
            .iter()
            .copied()
            .zip(sample.risks().iter().copied())
            .partition(|(y, _)| *y);
        let mut twice = 0u64;
        for &(_, a) in &pos {
            for &(_, b) in &neg {
                twice += match a.partial_cmp(&b) {
                    Some(core::cmp::Ordering::Greater) => 2,
                    Some(core::cmp::Ordering::Equal) => 1,
                    _ => 0,
                };
            }
        }
        return Ok(twice as f64 / 2.0 / pairs);
    }

    let mut order: Vec<usize> = (0..sample.len()).collect();
    let risks = sample.risks();
    order.sort_unstable_by(|&a, &b| risks[a].total_cmp(&risks[b]));
    // midranks, 1-based; twice the rank keeps everything integral
    let mut rank_sum_twice = 0u128;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && risks[order[end]] == risks[order[start]] {
            end += 1;
        }
        let twice_mid = (start + 1 + end) as u128;
        let tied_events = order[start..end]
            .iter()
            .filter(|&&i| sample.outcomes()[i])
            .count() as u128;
        rank_sum_twice += twice_mid * tied_events;
        start = end;
    }
    let e = events as u128;
    let u_twice = rank_sum_twice - e * (e + 1);
    Ok(u_twice as f64 / 2.0 / pairs)
}

/// Population quantities of a data-generating model, by Monte Carlo.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DgmTruth {
    pub prevalence: f64,
    pub thresholds: Vec<Threshold>,
    /// NB of the true model at each threshold.
    pub nb_model: Vec<f64>,
    pub nb_all: Vec<f64>,
}

/// Population NB of the true model and of treat-all over a set of thresholds.
///
/// Outcomes are integrated out analytically: each covariate draw contributes
/// `I(p ≥ z)·(p − (1−p)·c)` with `p` its true risk, which has smaller variance
/// than drawing `Y`.
pub fn dgm_truth<R: RngCore + ?Sized>(
    dgm: &LogisticDgm,
    thresholds: &[Threshold],
    n_mc: usize,
    rng: &mut R,
) -> Result<DgmTruth> {
    if n_mc == 0 {
        return Err(Error::invalid("n_mc must be positive"));
    }
    let mut normals = NormalSource::new(rng);
    let mut prevalence = 0.0;
    let mut nb_model = vec![0.0; thresholds.len()];
    for _ in 0..n_mc {
        let p = dgm.draw_risk(&mut normals);
        prevalence += p;
        for (acc, t) in nb_model.iter_mut().zip(thresholds) {
            if p >= t.value() {
                *acc += p - (1.0 - p) * t.harm_weight();
            }
        }
    }
    let n = n_mc as f64;
    prevalence /= n;
    nb_model.iter_mut().for_each(|v| *v /= n);
    let nb_all = thresholds
        .iter()
        .map(|t| prevalence - (1.0 - prevalence) * t.harm_weight())
        .collect();
    Ok(DgmTruth {
        prevalence,
        thresholds: thresholds.to_vec(),
        nb_model,
        nb_all,
    })
}

/// Population NB of the true model at one threshold.
pub fn true_nb_of_dgm<R: RngCore + ?Sized>(
    dgm: &LogisticDgm,
    t: Threshold,
    n_mc: usize,
    rng: &mut R,
) -> Result<f64> {
    Ok(dgm_truth(dgm, &[t], n_mc, rng)?.nb_model[0])
}

/// Protocol of a sample-size sweep.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepConfig {
    pub sizes: Vec<usize>,
    pub thresholds: Vec<Threshold>,
    pub n_sims: usize,
    pub n_reps: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
}

impl SweepConfig {
    /// Sizes doubling from 250 while they fit in `max`, ending at `max`.
    pub fn doubling_sizes(max: usize) -> Vec<usize> {
        let mut sizes: Vec<usize> = core::iter::successors(Some(250usize), |s| s.checked_mul(2))
            .take_while(|&s| s < max)
            .collect();
        sizes.push(max);
        sizes
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sweep sizes must be non-empty and strictly increasing"));
        }
        if self.sizes[0] < 2 {
            return Err(Error::TooFewRows {
                needed: 2,
                got: self.sizes[0],
            });
        }
        if self.n_sims == 0 {
            return Err(Error::invalid("n_sims must be at least 1"));
        }
        if self.n_reps == 0 {
            return Err(Error::invalid("n_reps must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("no EVPI method requested"));
        }
        if self.thresholds.is_empty() {
            return Err(Error::UnorderedGrid);
        }
        Ok(())
    }

    fn sorted_grid(&self) -> Result<Vec<Threshold>> {
        let mut grid = self.thresholds.clone();
        grid.sort_by(|a, b| a.value().total_cmp(&b.value()));
        grid.dedup();
        check_grid(&grid)?;
        Ok(grid)
    }
}

/// Mean EVPI over the simulations of one `(size, threshold, method)` cell.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepRow {
    pub size: usize,
    pub threshold: Threshold,
    pub method: Method,
    pub mean_evpi: f64,
    /// Standard error of `mean_evpi` across simulations (0 for one sim).
    pub mc_se: f64,
    pub n_sims: usize,
}

/// Simulations in which few rows fell on one side of a threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SparseSideWarning {
    pub size: usize,
    pub threshold: Threshold,
    pub sims_affected: usize,
    /// Smallest side count seen over the affected simulations.
    pub min_side: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepResult {
    /// Ordered by size, then threshold, then method in request order.
    pub rows: Vec<SweepRow>,
    pub warnings: Vec<SparseSideWarning>,
}

impl SweepResult {
    pub fn get(&self, size: usize, z: f64, method: Method) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.size == size && r.threshold.value() == z && r.method == method)
    }
}

/// EVPI of one sample for every threshold and method, threshold-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOutcome {
    pub evpi: Vec<f64>,
    /// `min(#below, #at-or-above)` per threshold.
    pub min_side: Vec<usize>,
}

/// EVPI for one sample over a sorted grid.
pub fn evaluate_sample(
    sample: &ValidationSample,
    grid: &[Threshold],
    methods: &[Method],
    n_reps: usize,
    seed: u64,
) -> Result<CellOutcome> {
    let settings = SweepSettings {
        methods: methods.to_vec(),
        n_reps,
        seed,
        keep_draws: false,
    };
    let sweep = evpi_threshold_sweep(sample, grid, &settings)?;
    let evpi = sweep
        .points
        .iter()
        .flat_map(|p| p.results.iter().map(|r| r.evpi))
        .collect();
    let min_side = grid
        .iter()
        .map(|t| {
            let above = sample.risks().iter().filter(|&&p| p >= t.value()).count();
            above.min(sample.len() - above)
        })
        .collect();
    Ok(CellOutcome { evpi, min_side })
}

/// EVPI versus sample size on fresh synthetic samples.
pub fn synthetic_sweep(dgm: &LogisticDgm, cfg: &SweepConfig) -> Result<SweepResult> {
    synthetic_sweep_with(&Sequential, dgm, cfg)
}

pub fn synthetic_sweep_with<E: Executor>(
    exec: &E,
    dgm: &LogisticDgm,
    cfg: &SweepConfig,
) -> Result<SweepResult> {
    run_sweep(exec, cfg, |size, rng| generate_synthetic(dgm, size, rng))
}

/// EVPI versus sample size on subsets drawn without replacement from
/// `dataset`. A size equal to the dataset size uses the dataset itself.
pub fn subsample_sweep(dataset: &ValidationSample, cfg: &SweepConfig) -> Result<SweepResult> {
    subsample_sweep_with(&Sequential, dataset, cfg)
}

pub fn subsample_sweep_with<E: Executor>(
    exec: &E,
    dataset: &ValidationSample,
    cfg: &SweepConfig,
) -> Result<SweepResult> {
    if let Some(&max) = cfg.sizes.last() {
        if max > dataset.len() {
            return Err(Error::SubsampleTooLarge {
                size: max,
                available: dataset.len(),
            });
        }
    }
    run_sweep(exec, cfg, |size, rng| {
        dataset.select(&subsample_indices(dataset.len(), size, rng))
    })
}

/// `size` distinct indices from `0..n`, ascending. `size == n` consumes no
/// randomness.
pub fn subsample_indices<R: RngCore + ?Sized>(n: usize, size: usize, rng: &mut R) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    if size < n {
        // partial Fisher-Yates
        for i in 0..size {
            let j = i + categorical(n - i, rng);
            idx.swap(i, j);
        }
        idx.truncate(size);
        idx.sort_unstable();
    }
    idx
}

fn run_sweep<E, F>(exec: &E, cfg: &SweepConfig, draw: F) -> Result<SweepResult>
where
    E: Executor,
    F: Fn(usize, &mut rng::StreamRng) -> Result<ValidationSample> + Sync + Send,
{
    cfg.validate()?;
    let grid = cfg.sorted_grid()?;
    let n_sims = cfg.n_sims;
    let cells = exec.map(cfg.sizes.len() * n_sims, |cell| {
        let size = cfg.sizes[cell / n_sims];
        let sim = (cell % n_sims) as u64;
        let mut sample_rng = rng::stream(cfg.seed, &[size as u64, sim, 0]);
        let sample = draw(size, &mut sample_rng)?;
        let boot_seed = rng::derive_seed(cfg.seed, &[size as u64, sim, 1]);
        evaluate_sample(&sample, &grid, &cfg.methods, cfg.n_reps, boot_seed)
    });
    let cells = cells.into_iter().collect::<Result<Vec<_>>>()?;

    let n_methods = cfg.methods.len();
    let mut result = SweepResult::default();
    for (s, &size) in cfg.sizes.iter().enumerate() {
        let sims = &cells[s * n_sims..(s + 1) * n_sims];
        for (j, &threshold) in grid.iter().enumerate() {
            for (k, &method) in cfg.methods.iter().enumerate() {
                let values = sims.iter().map(|c| c.evpi[j * n_methods + k]);
                let (mean_evpi, mc_se) = mean_and_se(values, n_sims);
                result.rows.push(SweepRow {
                    size,
                    threshold,
                    method,
                    mean_evpi,
                    mc_se,
                    n_sims,
                });
            }
            let sparse: Vec<usize> = sims
                .iter()
                .map(|c| c.min_side[j])
                .filter(|&m| m < SPARSE_SIDE)
                .collect();
            if let Some(&min_side) = sparse.iter().min() {
                result.warnings.push(SparseSideWarning {
                    size,
                    threshold,
                    sims_affected: sparse.len(),
                    min_side,
                });
            }
        }
    }
    Ok(result)
}

fn mean_and_se(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = values.clone().sum::<f64>() / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, libm::sqrt(ss / (nf - 1.0) / nf))
}
