//! Net-benefit estimators and decision curves.
//!
//! At threshold `z` a positive classification (`π ≥ z`, inclusive) earns 1 for
//! an event and costs `z/(1−z)` for a non-event. The model strategy treats the
//! positives, treat-all treats everyone, treat-none has NB 0 by definition.

use alloc::vec::Vec;

use crate::exec::{Executor, Sequential};
use crate::resample::{bootstrap_grid_draws_with, ResampleMethod, WeightVector};
use crate::{Error, Result};

/// Paired binary outcomes and predicted risks.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ValidationSample {
    outcomes: Vec<bool>,
    risks: Vec<f64>,
}

impl ValidationSample {
    pub fn new(outcomes: Vec<bool>, risks: Vec<f64>) -> Result<Self> {
        if outcomes.len() != risks.len() {
            return Err(Error::LengthMismatch {
                outcomes: outcomes.len(),
                risks: risks.len(),
            });
        }
        if outcomes.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some((row, &value)) = risks
            .iter()
            .enumerate()
            .find(|(_, r)| !(0.0..=1.0).contains(*r))
        {
            return Err(Error::RiskOutOfRange { row, value });
        }
        Ok(Self { outcomes, risks })
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[bool] {
        &self.outcomes
    }

    pub fn risks(&self) -> &[f64] {
        &self.risks
    }

    pub fn events(&self) -> usize {
        self.outcomes.iter().filter(|&&y| y).count()
    }

    /// Sample event rate.
    pub fn prevalence(&self) -> f64 {
        self.events() as f64 / self.len() as f64
    }

    /// Rows at `indices`, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let outcomes = indices.iter().map(|&i| self.outcomes[i]).collect();
        let risks = indices.iter().map(|&i| self.risks[i]).collect();
        Self::new(outcomes, risks)
    }

    /// Same outcomes with every risk replaced.
    pub fn with_risks(&self, risks: Vec<f64>) -> Result<Self> {
        Self::new(self.outcomes.clone(), risks)
    }

    /// `(true positives, false positives)` at `t`.
    pub(crate) fn confusion(&self, t: Threshold) -> (usize, usize) {
        let z = t.value();
        self.outcomes
            .iter()
            .zip(&self.risks)
            .filter(|(_, &r)| r >= z)
            .fold((0, 0), |(tp, fp), (&y, _)| if y { (tp + 1, fp) } else { (tp, fp + 1) })
    }
}

/// Decision threshold `z ∈ (0, cap)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Threshold(f64);

impl Threshold {
    /// Thresholds at or above this are rejected unless a higher cap is given.
    pub const DEFAULT_CAP: f64 = 0.99;

    pub fn new(z: f64) -> Result<Self> {
        Self::with_cap(z, Self::DEFAULT_CAP)
    }

    /// Accepts `0 < z < cap` with `cap ≤ 1`.
    pub fn with_cap(z: f64, cap: f64) -> Result<Self> {
        let cap = cap.min(1.0);
        if z > 0.0 && z < cap {
            Ok(Self(z))
        } else {
            Err(Error::ThresholdOutOfRange { value: z, cap })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Exchange rate `z/(1−z)` of a false positive against a true positive.
    pub fn harm_weight(self) -> f64 {
        self.0 / (1.0 - self.0)
    }

    /// `(1−z)/z`: false positives that cost as much as one true positive.
    pub fn odds_against(self) -> f64 {
        (1.0 - self.0) / self.0
    }

    /// `0.001, 0.002, …, 0.200`.
    pub fn default_grid() -> Vec<Threshold> {
        (1..=200).map(|k| Threshold(k as f64 / 1000.0)).collect()
    }
}

pub(crate) fn check_grid(grid: &[Threshold]) -> Result<()> {
    if grid.is_empty() || grid.windows(2).any(|w| w[0].value() >= w[1].value()) {
        return Err(Error::UnorderedGrid);
    }
    Ok(())
}

#[inline]
pub(crate) fn nb_from_mass(positive: f64, negative: f64, harm: f64, total: f64) -> f64 {
    (positive - harm * negative) / total
}

/// `(1/n) Σ I(π ≥ z)·[Y − (1−Y)·z/(1−z)]`
pub fn nb_model(sample: &ValidationSample, t: Threshold) -> f64 {
    let (tp, fp) = sample.confusion(t);
    nb_from_mass(tp as f64, fp as f64, t.harm_weight(), sample.len() as f64)
}

/// `P0 − (1−P0)·z/(1−z)` with `P0` the sample event rate.
pub fn nb_all(sample: &ValidationSample, t: Threshold) -> f64 {
    let events = sample.events();
    let non_events = sample.len() - events;
    nb_from_mass(events as f64, non_events as f64, t.harm_weight(), sample.len() as f64)
}

/// `(nb_model, nb_all)` with observation `i` carrying weight `w_i`.
pub fn weighted_nb(
    sample: &ValidationSample,
    weights: &WeightVector,
    t: Threshold,
) -> Result<(f64, f64)> {
    if weights.len() != sample.len() {
        return Err(Error::WeightLength {
            expected: sample.len(),
            got: weights.len(),
        });
    }
    let z = t.value();
    let (mut tp, mut fp, mut pos, mut neg) = (0.0, 0.0, 0.0, 0.0);
    for (i, (&y, &r)) in sample.outcomes.iter().zip(&sample.risks).enumerate() {
        let m = weights.mass(i);
        match (y, r >= z) {
            (true, true) => {
                tp += m;
                pos += m;
            }
            (true, false) => pos += m,
            (false, true) => {
                fp += m;
                neg += m;
            }
            (false, false) => neg += m,
        }
    }
    let harm = t.harm_weight();
    let total = weights.total_mass();
    Ok((nb_from_mass(tp, fp, harm, total), nb_from_mass(pos, neg, harm, total)))
}

/// Point estimates for the three strategies at one threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NbEstimate {
    pub threshold: Threshold,
    pub nb_model: f64,
    pub nb_all: f64,
    pub nb_none: f64,
}

impl NbEstimate {
    pub fn compute(sample: &ValidationSample, t: Threshold) -> Self {
        Self {
            threshold: t,
            nb_model: nb_model(sample, t),
            nb_all: nb_all(sample, t),
            nb_none: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CurveRow {
    pub estimate: NbEstimate,
    pub model_ci: Option<Interval>,
    pub all_ci: Option<Interval>,
    /// Every bootstrap replicate gave the same model NB (typically no risk
    /// reaches the threshold), so the model interval has zero width.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecisionCurve {
    pub rows: Vec<CurveRow>,
    pub ci_level: f64,
    pub n_boot: usize,
    pub method: ResampleMethod,
    pub seed: u64,
}

/// Decision curve over `grid` with percentile bootstrap bands.
///
/// One set of bootstrap weights is drawn per replicate and evaluated at every
/// threshold, so the bands are coherent across the grid. `n_boot == 0` skips
/// the bands.
pub fn decision_curve(
    sample: &ValidationSample,
    grid: &[Threshold],
    n_boot: usize,
    ci_level: f64,
    method: ResampleMethod,
    seed: u64,
) -> Result<DecisionCurve> {
    decision_curve_with(&Sequential, sample, grid, n_boot, ci_level, method, seed)
}

pub fn decision_curve_with<E: Executor>(
    exec: &E,
    sample: &ValidationSample,
    grid: &[Threshold],
    n_boot: usize,
    ci_level: f64,
    method: ResampleMethod,
    seed: u64,
) -> Result<DecisionCurve> {
    check_grid(grid)?;
    if !(ci_level > 0.0 && ci_level < 1.0) {
        return Err(Error::invalid("ci_level must lie in (0, 1)"));
    }
    let draws = if n_boot > 0 {
        Some(bootstrap_grid_draws_with(exec, &[sample], grid, n_boot, method, seed)?)
    } else {
        None
    };
    let tail = (1.0 - ci_level) / 2.0;
    let rows = grid
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let estimate = NbEstimate::compute(sample, t);
            let Some(draws) = draws.as_ref() else {
                return CurveRow {
                    estimate,
                    model_ci: None,
                    all_ci: None,
                    degenerate: false,
                };
            };
            let mut model: Vec<f64> = draws[j].column(0).collect();
            let mut all: Vec<f64> = draws[j].column(1).collect();
            model.sort_by(f64::total_cmp);
            all.sort_by(f64::total_cmp);
            let model_ci = percentile_interval(&model, tail);
            CurveRow {
                estimate,
                degenerate: model[0] == model[model.len() - 1],
                model_ci: Some(model_ci),
                all_ci: Some(percentile_interval(&all, tail)),
            }
        })
        .collect();
    Ok(DecisionCurve {
        rows,
        ci_level,
        n_boot,
        method,
        seed,
    })
}

fn percentile_interval(sorted: &[f64], tail: f64) -> Interval {
    Interval {
        lower: quantile_sorted(sorted, tail),
        upper: quantile_sorted(sorted, 1.0 - tail),
    }
}

/// Linear-interpolation quantile of sorted data (Hyndman–Fan type 7).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = libm::floor(h) as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn t(z: f64) -> Threshold {
        Threshold::new(z).unwrap()
    }

    fn sample(y: &[u8], p: &[f64]) -> ValidationSample {
        ValidationSample::new(y.iter().map(|&v| v == 1).collect(), p.to_vec()).unwrap()
    }

    fn five() -> ValidationSample {
        sample(&[1, 0, 1, 0, 0], &[0.9, 0.8, 0.1, 0.05, 0.5])
    }

    #[test]
    fn model_nb_hand_examples() {
        // 1 TP, 2 FP, weight 0.25: (1 - 0.5)/5
        assert!((nb_model(&five(), t(0.2)) - 0.1).abs() < 1e-15);
        assert_eq!(nb_model(&five(), t(0.95)), 0.0);
        let perfect = sample(&[1, 0, 0, 1], &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(nb_model(&perfect, t(0.5)), 0.5);
    }

    #[test]
    fn threshold_tie_counts_as_positive() {
        let s = sample(&[1, 0], &[0.3, 0.3]);
        let z = t(0.3);
        let (tp, fp) = s.confusion(z);
        assert_eq!((tp, fp), (1, 1));
        assert!((nb_model(&s, z) - (1.0 - z.harm_weight()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn treat_all_hand_examples() {
        assert!((nb_all(&five(), t(0.2)) - 0.25).abs() < 1e-15);
        let events = sample(&[1, 1, 1], &[0.2, 0.5, 0.1]);
        for z in [0.01, 0.3, 0.9] {
            assert_eq!(nb_all(&events, t(z)), 1.0);
        }
        // z at the prevalence: benefit and harm cancel
        let s = sample(&[1, 0, 0, 0], &[0.5; 4]);
        assert!(nb_all(&s, t(0.25)).abs() < 1e-15);
    }

    #[test]
    fn treat_all_is_model_flagging_everyone() {
        let s = five();
        let everyone = s.with_risks(vec![1.0; s.len()]).unwrap();
        for z in [0.01, 0.2, 0.5, 0.9] {
            assert_eq!(nb_all(&s, t(z)), nb_model(&everyone, t(z)));
        }
    }

    #[test]
    fn weighted_examples() {
        let s = five();
        let n = s.len();
        let uniform = WeightVector::Dirichlet(vec![1.0 / n as f64; n]);
        let (m, a) = weighted_nb(&s, &uniform, t(0.2)).unwrap();
        assert!((m - nb_model(&s, t(0.2))).abs() < 1e-15);
        assert!((a - nb_all(&s, t(0.2))).abs() < 1e-15);

        let point = WeightVector::Dirichlet(vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(weighted_nb(&s, &point, t(0.2)).unwrap(), (1.0, 1.0));

        let two = sample(&[1, 0], &[0.9, 0.9]);
        let w = WeightVector::Dirichlet(vec![0.75, 0.25]);
        let (m, a) = weighted_nb(&two, &w, t(0.5)).unwrap();
        assert!((m - 0.5).abs() < 1e-15 && (a - 0.5).abs() < 1e-15);

        let short = WeightVector::Dirichlet(vec![0.5, 0.5]);
        assert_eq!(
            weighted_nb(&s, &short, t(0.2)),
            Err(Error::WeightLength { expected: 5, got: 2 })
        );
    }

    #[test]
    fn sample_validation() {
        assert_eq!(ValidationSample::new(vec![], vec![]), Err(Error::EmptySample));
        assert!(matches!(
            ValidationSample::new(vec![true], vec![0.1, 0.2]),
            Err(Error::LengthMismatch { .. })
        ));
        assert_eq!(
            ValidationSample::new(vec![true, false], vec![0.5, 1.2]),
            Err(Error::RiskOutOfRange { row: 1, value: 1.2 })
        );
        assert!(ValidationSample::new(vec![true], vec![f64::NAN]).is_err());
        // degenerate outcome classes are legal
        let none = sample(&[0, 0], &[0.4, 0.6]);
        assert!((nb_model(&none, t(0.5)) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn threshold_bounds() {
        assert!(Threshold::new(0.0).is_err());
        assert!(Threshold::new(0.99).is_err());
        assert!(Threshold::new(1.0).is_err());
        assert!(Threshold::new(-0.1).is_err());
        assert!(Threshold::new(0.989).is_ok());
        assert!(Threshold::with_cap(0.995, 1.0).is_ok());
        assert!((t(0.2).harm_weight() - 0.25).abs() < 1e-16);
        assert!((t(0.02).odds_against() - 49.0).abs() < 1e-12);
        let grid = Threshold::default_grid();
        assert_eq!(grid.len(), 200);
        assert_eq!(grid[0].value(), 0.001);
        assert_eq!(grid[199].value(), 0.2);
        assert!(check_grid(&grid).is_ok());
        assert!(check_grid(&[t(0.2), t(0.1)]).is_err());
        assert!(check_grid(&[]).is_err());
    }

    #[test]
    fn curve_without_bootstrap_has_point_estimates_only() {
        let s = five();
        let curve = decision_curve(&s, &[t(0.1), t(0.2)], 0, 0.95, ResampleMethod::Ordinary, 1)
            .unwrap();
        assert_eq!(curve.rows.len(), 2);
        assert!(curve.rows.iter().all(|r| r.model_ci.is_none() && r.all_ci.is_none()));
        assert_eq!(curve.rows[1].estimate, NbEstimate::compute(&s, t(0.2)));
    }

    #[test]
    fn curve_for_perfect_predictions_tracks_prevalence() {
        let s = sample(&[1, 0, 0, 1, 0, 1], &[0.8, 0.0, 0.0, 0.9, 0.0, 0.85]);
        let grid: Vec<_> = (1..80).map(|k| t(k as f64 / 100.0)).collect();
        let curve = decision_curve(&s, &grid, 0, 0.95, ResampleMethod::Ordinary, 0).unwrap();
        for row in &curve.rows {
            assert_eq!(row.estimate.nb_model, 0.5);
        }
    }

    #[test]
    fn curve_is_deterministic_and_ordered() {
        let s = five();
        let grid = [t(0.05), t(0.2), t(0.6), t(0.95)];
        for method in [ResampleMethod::Ordinary, ResampleMethod::Bayesian] {
            let a = decision_curve(&s, &grid, 300, 0.9, method, 42).unwrap();
            let b = decision_curve(&s, &grid, 300, 0.9, method, 42).unwrap();
            assert_eq!(a, b);
            for row in &a.rows {
                let m = row.model_ci.unwrap();
                let al = row.all_ci.unwrap();
                assert!(m.lower <= m.upper && al.lower <= al.upper);
            }
            // no risk reaches 0.95
            assert!(a.rows[3].degenerate);
            assert_eq!(a.rows[3].model_ci.unwrap().width(), 0.0);
        }
    }

    #[test]
    fn curve_rejects_bad_inputs() {
        let s = five();
        let m = ResampleMethod::Ordinary;
        assert!(decision_curve(&s, &[t(0.3), t(0.2)], 10, 0.95, m, 0).is_err());
        assert!(decision_curve(&s, &[], 10, 0.95, m, 0).is_err());
        assert!(decision_curve(&s, &[t(0.3)], 10, 1.0, m, 0).is_err());
    }

    #[test]
    fn quantile_type7() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.0), 1.0);
        assert_eq!(quantile_sorted(&v, 1.0), 4.0);
        assert_eq!(quantile_sorted(&v, 0.5), 2.5);
        assert!((quantile_sorted(&v, 0.25) - 1.75).abs() < 1e-15);
        assert_eq!(quantile_sorted(&[7.0], 0.3), 7.0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_sample() -> impl Strategy<Value = ValidationSample> {
            prop::collection::vec((any::<bool>(), 0.0..=1.0f64), 1..40).prop_map(|rows| {
                let (y, p) = rows.into_iter().unzip();
                ValidationSample::new(y, p).unwrap()
            })
        }

        proptest! {
            #[test]
            fn permutation_invariant(s in arb_sample(), z in 0.01..0.98f64, rot in 0usize..40) {
                let n = s.len();
                let idx: Vec<usize> = (0..n).map(|i| (i + rot) % n).rev().collect();
                let p = s.select(&idx).unwrap();
                let z = t(z);
                prop_assert!((nb_model(&s, z) - nb_model(&p, z)).abs() < 1e-15);
            }

            #[test]
            fn treat_all_decreasing(s in arb_sample(), a in 0.01..0.98f64, b in 0.01..0.98f64) {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                prop_assert!(nb_all(&s, t(lo)) >= nb_all(&s, t(hi)));
            }

            #[test]
            fn model_bounded_by_event_share(s in arb_sample(), z in 0.01..0.98f64) {
                prop_assert!(nb_model(&s, t(z)) <= s.prevalence() + 1e-15);
            }
        }
    }
}
