//! Ordinary and Bayesian bootstrap weights, and per-replicate NB draws.
//!
//! A replicate is a weight vector over the validation rows: scaled
//! multinomial counts for the ordinary bootstrap, a flat Dirichlet draw for
//! the Bayesian bootstrap. Replicate `l` under base seed `s` always uses the
//! stream `(s, [method, l])`, so a draw matrix depends only on its inputs and
//! seed, not on how replicates were scheduled.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::exec::{Executor, Sequential};
use crate::kernels::rng::{categorical, stream, unit_exponential};
use crate::net_benefit::{check_grid, nb_from_mass, Threshold, ValidationSample};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ResampleMethod {
    /// Flat Dirichlet weights.
    Bayesian,
    /// Multinomial counts, i.e. rows drawn with replacement.
    Ordinary,
}

impl ResampleMethod {
    fn stream_tag(self) -> u64 {
        match self {
            ResampleMethod::Bayesian => 1,
            ResampleMethod::Ordinary => 2,
        }
    }

    pub fn draw<R: RngCore + ?Sized>(self, n: usize, rng: &mut R) -> Result<WeightVector> {
        match self {
            ResampleMethod::Bayesian => dirichlet_weights(n, rng),
            ResampleMethod::Ordinary => multinomial_weights(n, rng),
        }
    }
}

/// Observation weights for one bootstrap replicate.
///
/// Multinomial replicates keep their integer counts so that NB sums over them
/// are exact and match the materialized resampled dataset bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightVector {
    /// Nonnegative weights summing to 1.
    Dirichlet(Vec<f64>),
    /// Resampling counts `k_i` summing to `n`; the weight of row `i` is `k_i/n`.
    Multinomial(Vec<u32>),
}

impl WeightVector {
    pub fn len(&self) -> usize {
        match self {
            WeightVector::Dirichlet(w) => w.len(),
            WeightVector::Multinomial(k) => k.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weight(&self, i: usize) -> f64 {
        match self {
            WeightVector::Dirichlet(w) => w[i],
            WeightVector::Multinomial(k) => f64::from(k[i]) / k.len() as f64,
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    /// Unnormalized mass of row `i`; divide sums by [`Self::total_mass`].
    #[inline]
    pub(crate) fn mass(&self, i: usize) -> f64 {
        match self {
            WeightVector::Dirichlet(w) => w[i],
            WeightVector::Multinomial(k) => f64::from(k[i]),
        }
    }

    #[inline]
    pub(crate) fn total_mass(&self) -> f64 {
        match self {
            WeightVector::Dirichlet(_) => 1.0,
            WeightVector::Multinomial(k) => k.len() as f64,
        }
    }
}

/// Flat Dirichlet draw as normalized unit exponentials.
pub fn dirichlet_weights<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Result<WeightVector> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mut w: Vec<f64> = (0..n).map(|_| unit_exponential(rng)).collect();
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        w.iter_mut().for_each(|v| *v /= total);
    } else {
        // every exponential underflowed to zero; probability ~ 0
        w.iter_mut().for_each(|v| *v = 1.0 / n as f64);
    }
    Ok(WeightVector::Dirichlet(w))
}

/// Counts of `n` equiprobable draws over `n` cells.
pub fn multinomial_weights<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Result<WeightVector> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let mut counts = vec![0u32; n];
    for _ in 0..n {
        counts[categorical(n, rng)] += 1;
    }
    Ok(WeightVector::Multinomial(counts))
}

/// Weight vector used for replicate `replicate` under `seed`.
pub fn replicate_weights(
    method: ResampleMethod,
    n: usize,
    seed: u64,
    replicate: usize,
) -> Result<WeightVector> {
    let mut rng = stream(seed, &[method.stream_tag(), replicate as u64]);
    method.draw(n, &mut rng)
}

/// Per-replicate NB draws at one threshold.
///
/// Columns are `[model_0, …, model_{M-1}, treat_all]`; treat-none is the
/// implicit zero column.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NbDrawMatrix {
    values: Vec<f64>,
    n_cols: usize,
    pub method: ResampleMethod,
    pub seed: u64,
    pub threshold: Threshold,
}

impl NbDrawMatrix {
    /// Builds a matrix from row-major values.
    pub fn from_rows(
        values: Vec<f64>,
        n_cols: usize,
        method: ResampleMethod,
        seed: u64,
        threshold: Threshold,
    ) -> Result<Self> {
        if n_cols < 2 {
            return Err(Error::invalid("draw matrix needs a model and a treat-all column"));
        }
        if values.is_empty() || values.len() % n_cols != 0 {
            return Err(Error::invalid("draw matrix values do not fill whole rows"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("net benefit draws"));
        }
        Ok(Self {
            values,
            n_cols,
            method,
            seed,
            threshold,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.values.len() / self.n_cols
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_models(&self) -> usize {
        self.n_cols - 1
    }

    pub fn row(&self, l: usize) -> &[f64] {
        &self.values[l * self.n_cols..(l + 1) * self.n_cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.n_cols)
    }

    pub fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.rows().map(move |r| r[j])
    }

    /// Index of the treat-all column.
    pub fn all_column(&self) -> usize {
        self.n_cols - 1
    }

    /// Column means in column order.
    pub fn column_means(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n_cols];
        for row in self.rows() {
            for (s, v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        let n = self.n_rows() as f64;
        sums.into_iter().map(|s| s / n).collect()
    }
}

/// Evaluates weighted NBs of one or more models on a fixed threshold grid.
///
/// Rows are sorted once by descending risk per model, and the number of rows
/// at or above each threshold is precomputed; a replicate then costs one pass
/// over the rows plus one step per threshold.
pub(crate) struct GridEvaluator<'a> {
    outcomes: &'a [bool],
    grid: &'a [Threshold],
    models: Vec<ModelIndex>,
}

struct ModelIndex {
    order: Vec<usize>,
    /// rows with risk ≥ z, per grid point
    positives: Vec<usize>,
}

impl<'a> GridEvaluator<'a> {
    pub(crate) fn new(samples: &[&'a ValidationSample], grid: &'a [Threshold]) -> Result<Self> {
        check_grid(grid)?;
        let first = samples
            .first()
            .ok_or_else(|| Error::invalid("at least one model is required"))?;
        if samples.iter().any(|s| s.outcomes() != first.outcomes()) {
            return Err(Error::invalid("all models must be scored on the same outcomes"));
        }
        let models = samples
            .iter()
            .map(|s| {
                let risks = s.risks();
                let mut order: Vec<usize> = (0..risks.len()).collect();
                order.sort_by(|&a, &b| risks[b].total_cmp(&risks[a]));
                let positives = grid
                    .iter()
                    .map(|t| order.partition_point(|&i| risks[i] >= t.value()))
                    .collect();
                ModelIndex { order, positives }
            })
            .collect();
        Ok(Self {
            outcomes: first.outcomes(),
            grid,
            models,
        })
    }

    pub(crate) fn n_cols(&self) -> usize {
        self.models.len() + 1
    }

    /// Writes `grid.len() × n_cols` values, threshold-major.
    pub(crate) fn evaluate(&self, w: &WeightVector, out: &mut [f64]) {
        let cols = self.n_cols();
        let total = w.total_mass();
        let (mut pos, mut neg) = (0.0, 0.0);
        for (i, &y) in self.outcomes.iter().enumerate() {
            if y {
                pos += w.mass(i);
            } else {
                neg += w.mass(i);
            }
        }
        for (j, t) in self.grid.iter().enumerate() {
            out[j * cols + cols - 1] = nb_from_mass(pos, neg, t.harm_weight(), total);
        }
        for (m, model) in self.models.iter().enumerate() {
            let (mut tp, mut fp, mut k) = (0.0, 0.0, 0usize);
            // grid ascending ⇒ positive sets shrink; walk from the top
            for j in (0..self.grid.len()).rev() {
                while k < model.positives[j] {
                    let i = model.order[k];
                    if self.outcomes[i] {
                        tp += w.mass(i);
                    } else {
                        fp += w.mass(i);
                    }
                    k += 1;
                }
                out[j * cols + m] = nb_from_mass(tp, fp, self.grid[j].harm_weight(), total);
            }
        }
    }
}

/// `n_reps` bootstrap draws of `(nb_model, nb_all)` at one threshold.
pub fn bootstrap_nb_draws(
    sample: &ValidationSample,
    t: Threshold,
    n_reps: usize,
    method: ResampleMethod,
    seed: u64,
) -> Result<NbDrawMatrix> {
    let grid = [t];
    let mut draws = bootstrap_grid_draws_with(&Sequential, &[sample], &grid, n_reps, method, seed)?;
    Ok(draws.remove(0))
}

/// Draw matrices for every threshold of `grid`, one per threshold. Each
/// replicate's weights are drawn once and evaluated at all thresholds and for
/// all models.
pub fn bootstrap_grid_draws_with<E: Executor>(
    exec: &E,
    samples: &[&ValidationSample],
    grid: &[Threshold],
    n_reps: usize,
    method: ResampleMethod,
    seed: u64,
) -> Result<Vec<NbDrawMatrix>> {
    if n_reps == 0 {
        return Err(Error::TooFewReplicates { needed: 1, got: 0 });
    }
    let evaluator = GridEvaluator::new(samples, grid)?;
    let n = samples[0].len();
    let cols = evaluator.n_cols();
    let width = grid.len() * cols;
    let replicates = exec.map(n_reps, |l| {
        let mut out = vec![0.0; width];
        let w = replicate_weights(method, n, seed, l)?;
        evaluator.evaluate(&w, &mut out);
        Ok(out)
    });

    let mut per_threshold: Vec<Vec<f64>> =
        (0..grid.len()).map(|_| Vec::with_capacity(n_reps * cols)).collect();
    for rep in replicates {
        let rep: Vec<f64> = rep?;
        for (j, chunk) in rep.chunks_exact(cols).enumerate() {
            per_threshold[j].extend_from_slice(chunk);
        }
    }
    per_threshold
        .into_iter()
        .zip(grid)
        .map(|(values, &t)| NbDrawMatrix::from_rows(values, cols, method, seed, t))
        .collect()
}
