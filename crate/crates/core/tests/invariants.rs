use nbvoi_core::kernels::rng::stream;
use nbvoi_core::resample::{bootstrap_grid_draws_with, replicate_weights};
use nbvoi_core::simlab::{c_statistic, generate_synthetic, LogisticDgm};
use nbvoi_core::voi::{strategy_shares, Method, SweepSettings};
use nbvoi_core::{
    decision_curve, evpi_bootstrap, evpi_threshold_sweep, nb_all, nb_model, weighted_nb,
    ResampleMethod, Sequential, Threshold, ValidationSample, WeightVector,
};
use proptest::prelude::*;

fn arb_sample(max_n: usize) -> impl Strategy<Value = ValidationSample> {
    prop::collection::vec((any::<bool>(), 0u8..=20), 1..=max_n).prop_map(|rows| {
        let (y, p): (Vec<bool>, Vec<f64>) =
            rows.into_iter().map(|(y, k)| (y, f64::from(k) / 20.0)).unzip();
        ValidationSample::new(y, p).unwrap()
    })
}

fn arb_threshold() -> impl Strategy<Value = Threshold> {
    (1u32..99).prop_map(|k| Threshold::new(f64::from(k) / 100.0).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn treat_all_is_the_model_that_flags_everyone(s in arb_sample(40), t in arb_threshold()) {
        let flagged = s.with_risks(vec![1.0; s.len()]).unwrap();
        prop_assert_eq!(nb_all(&s, t), nb_model(&flagged, t));
    }

    #[test]
    fn multinomial_weights_match_materialized_resample(
        s in arb_sample(8),
        t in arb_threshold(),
        seed in any::<u64>(),
    ) {
        let n = s.len();
        let mut rng = stream(seed, &[]);
        let WeightVector::Multinomial(counts) = ResampleMethod::Ordinary.draw(n, &mut rng).unwrap() else {
            unreachable!()
        };
        let rows: Vec<usize> = counts
            .iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat(i).take(k as usize))
            .collect();
        let materialized = s.select(&rows).unwrap();
        let got = weighted_nb(&s, &WeightVector::Multinomial(counts), t).unwrap();
        prop_assert_eq!(got, (nb_model(&materialized, t), nb_all(&materialized, t)));
    }

    #[test]
    fn uniform_dirichlet_weights_reproduce_point_estimates(s in arb_sample(40), t in arb_threshold()) {
        let w = WeightVector::Dirichlet(vec![1.0 / s.len() as f64; s.len()]);
        let (m, a) = weighted_nb(&s, &w, t).unwrap();
        prop_assert!((m - nb_model(&s, t)).abs() < 1e-12);
        prop_assert!((a - nb_all(&s, t)).abs() < 1e-12);
    }

    #[test]
    fn curve_intervals_are_ordered(s in arb_sample(30), seed in any::<u64>()) {
        let grid: Vec<Threshold> = [0.05, 0.2, 0.5].iter().map(|&z| Threshold::new(z).unwrap()).collect();
        let curve = decision_curve(&s, &grid, 50, 0.9, ResampleMethod::Bayesian, seed).unwrap();
        for row in &curve.rows {
            let m = row.model_ci.unwrap();
            let a = row.all_ci.unwrap();
            prop_assert!(m.lower <= m.upper && a.lower <= a.upper);
            prop_assert_eq!(row.estimate.nb_none, 0.0);
        }
    }

    #[test]
    fn bootstrap_evpi_partition_and_bounds(s in arb_sample(30), t in arb_threshold(), seed in any::<u64>()) {
        let draws = bootstrap_grid_draws_with(&Sequential, &[&s], &[t], 40, ResampleMethod::Bayesian, seed).unwrap();
        let r = evpi_bootstrap(&draws[0]).unwrap();
        let shares = strategy_shares(&draws[0]);
        prop_assert!((shares.model + shares.treat_all + shares.treat_none - 1.0).abs() < 1e-12);
        prop_assert!(r.evpi >= 0.0);
        prop_assert!(r.evpi_unclamped >= -1e-12 - r.mc_se.unwrap());
        prop_assert!((0.0..=1.0).contains(&r.p_useful));
        prop_assert_eq!(r.r_evpi.is_some(), matches!(r.best_strategy, nbvoi_core::Strategy::Model(_)));
    }

    #[test]
    fn c_statistic_ignores_monotone_rescaling(seed in any::<u64>(), k in 0.1f64..5.0) {
        let s = generate_synthetic(&LogisticDgm::reference(), 300, &mut stream(seed, &[])).unwrap();
        prop_assume!(s.events() > 0 && s.events() < s.len());
        let bent: Vec<f64> = s.risks().iter().map(|p| p.powf(k)).collect();
        prop_assert_eq!(c_statistic(&s).unwrap(), c_statistic(&s.with_risks(bent).unwrap()).unwrap());
    }
}

#[test]
fn replicate_weights_depend_only_on_seed_and_index() {
    let a = replicate_weights(ResampleMethod::Bayesian, 10, 42, 7).unwrap();
    let b = replicate_weights(ResampleMethod::Bayesian, 10, 42, 7).unwrap();
    let c = replicate_weights(ResampleMethod::Bayesian, 10, 42, 8).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn sweep_determinism() {
    let s = generate_synthetic(&LogisticDgm::reference(), 500, &mut stream(1, &[])).unwrap();
    let grid: Vec<Threshold> = [0.1, 0.2].iter().map(|&z| Threshold::new(z).unwrap()).collect();
    let settings = SweepSettings {
        methods: Method::ALL.to_vec(),
        n_reps: 300,
        seed: 5,
        keep_draws: true,
    };
    let a = evpi_threshold_sweep(&s, &grid, &settings).unwrap();
    let b = evpi_threshold_sweep(&s, &grid, &settings).unwrap();
    assert_eq!(a, b);
    let c = decision_curve(&s, &grid, 200, 0.95, ResampleMethod::Ordinary, 5).unwrap();
    assert_eq!(c, decision_curve(&s, &grid, 200, 0.95, ResampleMethod::Ordinary, 5).unwrap());
}

#[test]
fn zero_boot_curve_has_no_intervals() {
    let s = ValidationSample::new(vec![true, false, false, true], vec![1.0, 0.0, 0.0, 1.0]).unwrap();
    let grid: Vec<Threshold> = [0.2, 0.5, 0.8].iter().map(|&z| Threshold::new(z).unwrap()).collect();
    let curve = decision_curve(&s, &grid, 0, 0.95, ResampleMethod::Ordinary, 0).unwrap();
    for row in &curve.rows {
        assert!(row.model_ci.is_none() && row.all_ci.is_none());
        // perfect predictions: NB equals prevalence below the smallest event risk
        assert_eq!(row.estimate.nb_model, 0.5);
    }
}
