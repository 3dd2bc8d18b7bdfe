use proptest::prelude::*;

use qbuffer::channels::{amplitude_damping_kraus, damp_werner, pmd_operator, AmplitudeDampingParams, PmdPhases};
use qbuffer::crossing::solve_level_crossing;
use qbuffer::dynamics::{markovian_exponential, p3, CavityModelParams};
use qbuffer::fitting::{fit_exponential, fit_p3, initial_p3, linspace, Bounds, DataPoint, DataSeries};
use qbuffer::measures::{classical_correlation, concurrence, discord, total_correlation};
use qbuffer::state::validate;

proptest! {
    #[test]
    fn symmetric_pmd_is_unitary(phi in -10.0f64..10.0) {
        prop_assert!(pmd_operator(PmdPhases::symmetric(phi)).unitarity_residual() < 1e-12);
    }

    #[test]
    fn kraus_pair_is_complete(xi in 0.0f64..=1.0) {
        let (g0, g1) = amplitude_damping_kraus(AmplitudeDampingParams::new(xi).unwrap());
        let (a, b) = (g0.lift(), g1.lift());
        let sum = a.adjoint() * a + b.adjoint() * b;
        let err = (sum - nalgebra::Matrix4::identity()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn damped_werner_is_a_state(p in 0.0f64..=1.0, xi in 0.0f64..=1.0) {
        prop_assert!(validate(&damp_werner(p, xi).unwrap()).passed);
    }

    #[test]
    fn measures_are_consistent(p in 0.0f64..=1.0) {
        let total = total_correlation(p).unwrap();
        let classical = classical_correlation(p).unwrap();
        let q = discord(p).unwrap();
        prop_assert!((total - classical - q).abs() < 1e-12);
        prop_assert!(classical >= -1e-15 && q >= -1e-15 && total <= 2.0 + 1e-12);
        prop_assert_eq!(concurrence(p).unwrap(), ((3.0 * p - 1.0) / 2.0).max(0.0));
    }

    #[test]
    fn exponential_fit_matches_closed_form(p0 in 0.1f64..1.0, rate in 10.0f64..5000.0) {
        let times = linspace(0.0, 1e-3, 20);
        let data = DataSeries::from_model(&times, |t| markovian_exponential(t, p0, rate), |_| 0.01).unwrap();
        let fit = fit_exponential(&data).unwrap();
        let e = fit.exponential().unwrap();
        prop_assert!((e.rate_per_s - rate).abs() <= 1e-9 * rate);
        prop_assert!((e.p0 - p0).abs() <= 1e-12);
    }

    #[test]
    fn crossing_matches_inverse(rate in 100.0f64..10000.0, level in 0.05f64..0.95) {
        let t = solve_level_crossing(|t| markovian_exponential(t, 1.0, rate), level, (0.0, 0.1)).unwrap();
        let exact = -level.ln() / rate;
        prop_assert!((t - exact).abs() <= 1e-9 * exact.max(1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn p3_fit_descends_within_bounds(
        k1 in 500.0f64..1000.0,
        k2 in 3000.0f64..4000.0,
        g in 12000.0f64..20000.0,
        seed in any::<u64>(),
    ) {
        use rand::SeedableRng;
        use rand_distr::{Distribution, Normal};
        let truth = CavityModelParams { kappa1: k1, kappa2: k2, gamma0: g, ..CavityModelParams::published() };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 0.01).unwrap();
        let points = linspace(0.0, 1.5e-3, 40)
            .into_iter()
            .map(|t| DataPoint { t, p: p3(t, &truth) + normal.sample(&mut rng), sigma: 0.01 })
            .collect();
        let data = DataSeries::new(points).unwrap();
        let init = initial_p3(&data, &CavityModelParams::published()).unwrap();
        let bounds = Bounds::default();
        let fit = fit_p3(&data, &init, &bounds).unwrap();
        prop_assert!(fit.objective_history.windows(2).all(|w| w[1] <= w[0]));
        let c = fit.cavity().unwrap();
        let values = [c.kappa1, c.kappa2, c.gamma0, c.w1, c.w2];
        for (i, v) in values.iter().enumerate() {
            prop_assert!(v.is_finite());
            prop_assert!(*v >= bounds.lower[i] && *v <= bounds.upper[i]);
        }
        prop_assert!(fit.residual_norm.is_finite());
    }
}
