use approx::assert_abs_diff_eq;
use jscc::ensemble::*;
use jscc::info::{binary_convolution, compose, entropy, mutual_information};
use proptest::prelude::*;

fn prob_vec(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05..1.0f64, k).prop_map(|v| {
        let s: f64 = v.iter().sum();
        v.into_iter().map(|x| x / s).collect()
    })
}

/// Random binary or ternary system with finite channel energies.
fn system() -> impl Strategy<Value = SystemSpec> {
    (2..=3usize, 2..=3usize, 2..=3usize, 0.3..3.0f64, 1..=2u32)
        .prop_flat_map(|(ks, kx, ky, beta, lambda)| {
            (
                prop::collection::vec(0.0..2.0f64, ks),
                prop::collection::vec(prop::collection::vec(0.0..3.0f64, ky), kx),
                prob_vec(kx),
                Just(beta),
                Just(lambda),
            )
        })
        .prop_map(|(src, ch, m, beta, lambda)| {
            SystemSpec::new(
                SourceSpec::new(src, beta).unwrap(),
                ChannelSpec::new(ch, beta).unwrap(),
                EnsembleSpec::new(m).unwrap(),
                Lambda::integer(lambda),
            )
            .unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parameter_mappings_round_trip(p in 1e-3..0.999f64, q in 1e-3..0.999f64, kt in 0.1..10.0f64) {
        let p_back = crossover_from_energy(energy_from_crossover(p, kt).unwrap(), kt).unwrap();
        let q_back = bias_from_field(field_from_bias(q, kt).unwrap(), kt).unwrap();
        prop_assert!((p_back - p).abs() <= 1e-12);
        prop_assert!((q_back - q).abs() <= 1e-12);
    }

    #[test]
    fn zeta_is_convex_and_phi_nonpositive(sys in system()) {
        let ts: Vec<f64> = (-40..=40).map(|i| i as f64 * 0.1).collect();
        let z: Vec<f64> = ts.iter().map(|&t| zeta(&sys, t).unwrap()).collect();
        let scale = z.iter().fold(1.0f64, |a, v| a.max(v.abs()));
        for w in z.windows(3) {
            prop_assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-12 * scale);
        }
        prop_assert!(zeta(&sys, 0.0).unwrap().abs() <= 1e-12);
        let mgf = sys.channel_log_mgf().unwrap();
        let (lo, hi) = mgf.energy_range();
        for k in 0..=20 {
            let e = lo + (hi - lo) * k as f64 / 20.0;
            prop_assert!(channel_phi_at(&sys, e).unwrap() <= 1e-12);
        }
        let mean = zeta_prime_neg(&sys, 0.0).unwrap();
        prop_assert!(channel_phi_at(&sys, mean).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn dominant_channel_energy_is_the_true_mean(sys in system()) {
        // with energies -(1/beta) ln W shifted to a zero ground state, the
        // posterior over inputs given y is the true one
        let w = sys.channel().transition();
        let energies = sys.channel().effective_energies();
        let m = sys.ensemble().probabilities();
        let mut mean = 0.0;
        for x in 0..m.len() {
            for y in 0..w[x].len() {
                mean += m[x] * w[x][y] * energies[x][y];
            }
        }
        let got = zeta_prime_neg(&sys, sys.beta()).unwrap();
        prop_assert!((got - mean).abs() <= 1e-10 * (1.0 + mean.abs()), "{got} vs {mean}");
    }

    #[test]
    fn binary_convolution_algebra(a in 0.0..1.0f64, b in 0.0..1.0f64, c in 0.0..1.0f64) {
        let ab = binary_convolution(a, b);
        prop_assert!((ab - binary_convolution(b, a)).abs() <= 1e-15);
        prop_assert!(
            (binary_convolution(ab, c) - binary_convolution(a, binary_convolution(b, c))).abs()
                <= 1e-14
        );
        prop_assert!((binary_convolution(a, 0.0) - a).abs() <= 1e-15);
        prop_assert!((binary_convolution(a, 0.5) - 0.5).abs() <= 1e-15);
        prop_assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn cascaded_bscs_compose_by_convolution(a in 0.01..0.99f64, b in 0.01..0.99f64) {
        let w = compose(
            &ChannelSpec::bsc(a).unwrap().transition(),
            &ChannelSpec::bsc(b).unwrap().transition(),
        );
        let c = ChannelSpec::bsc(binary_convolution(a, b)).unwrap().transition();
        for (r, s) in w.iter().zip(&c) {
            for (u, v) in r.iter().zip(s) {
                prop_assert!((u - v).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn mutual_information_bounds(p in prob_vec(3), rows in prop::collection::vec(prob_vec(4), 3)) {
        let i = mutual_information(&p, &rows);
        prop_assert!(i >= 0.0);
        prop_assert!(i <= entropy(&p) + 1e-12);
        prop_assert!(i <= (4f64).ln() + 1e-12);
    }
}

#[test]
fn transition_round_trip() {
    let w = vec![vec![0.7, 0.2, 0.1], vec![0.0, 0.5, 0.5]];
    let ch = ChannelSpec::from_transition(&w, 2.0).unwrap();
    for (r, s) in ch.transition().iter().zip(&w) {
        for (u, v) in r.iter().zip(s) {
            assert_abs_diff_eq!(u, v, epsilon = 1e-15);
        }
    }
    assert!(ch.hamiltonian()[1][0].is_infinite());
}
