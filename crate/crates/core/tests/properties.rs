use proptest::prelude::*;
use tlfdeco_core::grid::{GridSpec, Refinement};
use tlfdeco_core::numerics::{
    linear_cosine_integral, linear_cosine_sweep, principal_value, principal_value_excision, principal_value_with_breaks,
    QuadratureSpec,
};
use tlfdeco_core::poles::{classify_regime, gamma_a_markov, pole_weights, Regime};
use tlfdeco_core::spectral::{LorentzianDensity, SpectralDensity, SpectralDensityParams};
use tlfdeco_core::tlfgreen::split_g;
use tlfdeco_core::{SystemParams, Temperature};

fn temperature() -> impl Strategy<Value = Temperature> {
    prop_oneof![Just(Temperature::Zero), (1e-3f64..1.0).prop_map(|t| Temperature::new(t).unwrap())]
}

proptest! {
    #[test]
    fn split_is_additive_and_balanced(w in -2.0f64..2.0, g in 1e-6f64..10.0, t in temperature()) {
        let (g1, g2) = split_g(w, g, t);
        prop_assert!(g1 >= 0.0 && g2 >= 0.0);
        prop_assert!((g1 + g2 - g).abs() <= 1e-14 * g);
        if let Some(beta) = t.beta() {
            let x = beta * w;
            if x.abs() < 600.0 && g1 > 1e-290 {
                prop_assert!((g1 - x.exp() * g2).abs() <= 1e-12 * g1, "{} {}", g1, g2);
            }
        }
    }

    #[test]
    fn upper_fractions_are_complementary(w in -5.0f64..5.0, t in temperature()) {
        let (a, b) = (t.upper_fraction(w), t.upper_fraction(-w));
        prop_assert!((a + b - 1.0).abs() < 1e-15);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn coth_half_exceeds_one(w in 1e-4f64..5.0, t in temperature()) {
        prop_assert!(t.coth_half(w) >= 1.0);
    }

    #[test]
    fn pole_weights_are_a_partition(lo in 0.01f64..1.0, gap in 1e-4f64..0.5, u in 0.0f64..1.0) {
        let hi = lo + gap;
        let (am, ap) = pole_weights(lo, hi, lo + u * gap).unwrap();
        prop_assert!((am + ap - 1.0).abs() < 1e-12);
        prop_assert!(am >= -1e-12 && ap >= -1e-12);
    }

    #[test]
    fn markov_rate_is_bounded_by_half_g0(g0 in 1e-5f64..0.1, gamma in 1e-6f64..1.0) {
        let r = gamma_a_markov(g0, gamma).unwrap();
        prop_assert!(r > 0.0 && r <= 0.5 * g0 * (1.0 + 1e-12));
        prop_assert!(r <= gamma * (1.0 + 1e-12));
    }

    #[test]
    fn regimes_follow_the_margin(g0 in 1e-4f64..0.1, alpha in 1e-3f64..1.0, da in 0.01f64..0.5) {
        let p = SystemParams::new(da, 0.1, g0, Temperature::Zero).unwrap();
        let b = SpectralDensityParams::new(alpha, 0.05).unwrap();
        let (r, _) = classify_regime(&p, &b);
        let x = g0 / (alpha * da);
        let want = if x < 1.0 / 3.0 {
            Regime::MarkovReduction
        } else if x > 3.0 {
            Regime::NonMarkovEnhancement
        } else {
            Regime::Crossover
        };
        prop_assert_eq!(r, want);
    }

    #[test]
    fn graded_grids_are_increasing_and_cover_patches(
        c in 0.05f64..0.9,
        width in 1e-5f64..1e-2,
        coarse in 11usize..200,
    ) {
        let g = GridSpec::new(0.0, 1.0, coarse)
            .refine(Refinement::around(c, width, 5.0, 10.0))
            .build()
            .unwrap();
        prop_assert_eq!(g[0], 0.0);
        prop_assert_eq!(*g.last().unwrap(), 1.0);
        prop_assert!(g.windows(2).all(|w| w[1] > w[0]));
        let near = g.iter().filter(|&&x| (x - c).abs() <= 5.0 * width).count();
        prop_assert!(near >= 80, "{} nodes in the patch", near);
    }

    #[test]
    fn filon_rule_is_exact_for_linear_data(
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
        t in 0.1f64..50.0,
        n in 2usize..40,
    ) {
        let x: Vec<f64> = (0..n).map(|i| 0.3 + 1.7 * i as f64 / (n - 1) as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| a + b * v).collect();
        let anti = |v: f64| (a + b * v) * (t * v).sin() / t + b * (t * v).cos() / (t * t);
        let want = anti(x[n - 1]) - anti(x[0]);
        let got = linear_cosine_integral(&x, &y, t);
        prop_assert!((got - want).abs() < 1e-11 * (1.0 + want.abs()), "{} vs {}", got, want);
    }

    #[test]
    fn filon_sweep_matches_pointwise_rule(seed in proptest::collection::vec(-1.0f64..1.0, 5..30), dt in 0.05f64..3.0) {
        let x: Vec<f64> = (0..seed.len()).map(|i| 0.1 * i as f64 + 0.01 * (i * i) as f64).collect();
        let sweep = linear_cosine_sweep(&x, &seed, dt, 25);
        for (k, s) in sweep.iter().enumerate() {
            let p = linear_cosine_integral(&x, &seed, k as f64 * dt);
            prop_assert!((s - p).abs() < 1e-10 * (1.0 + p.abs()), "k={}: {} vs {}", k, s, p);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lorentzian_pair_matches_quadrature(
        amp in 0.1f64..2.0,
        center in 0.2f64..3.0,
        width in 1e-3f64..0.5,
        u in 0.01f64..0.99,
    ) {
        let l = LorentzianDensity::new(amp, center, width).unwrap();
        let w = 5.0 * u;
        let spec = QuadratureSpec::default().with_tolerances(1e-14, 1e-12);
        let got = -principal_value_with_breaks(|x| l.eval(x), w, 0.0, 5.0, &[center], &spec).unwrap();
        let want = l.hilbert(w, 0.0, 5.0);
        prop_assert!((got - want).abs() < 1e-8 * want.abs().max(1.0), "{} vs {}", got, want);
    }

    #[test]
    fn pv_schemes_agree_on_smooth_integrands(
        c0 in -1.0f64..1.0,
        c1 in -1.0f64..1.0,
        k in 0.1f64..3.0,
        u in 0.2f64..0.8,
    ) {
        let f = |x: f64| c0 + c1 * x + (k * x).sin();
        let x0 = 2.0 * u;
        let spec = QuadratureSpec::default().with_tolerances(1e-13, 1e-12);
        let a = principal_value(f, x0, 0.0, 2.0, &spec).unwrap();
        let b = principal_value_excision(f, x0, 0.0, 2.0, 0.05, &spec).unwrap();
        prop_assert!((a - b).abs() < 1e-6 * a.abs().max(1.0), "{} vs {}", a, b);
    }
}
