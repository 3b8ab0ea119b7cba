use approx::assert_abs_diff_eq;
use jscc::info::binary_entropy;
use jscc::thermo::*;
use proptest::prelude::*;

fn h2(grid: usize) -> ConcaveFunction {
    ConcaveFunction::new(TabulatedFunction::from_fn(0.0, 1.0, grid, binary_entropy).unwrap())
        .unwrap()
}

/// Paramagnet of spins in field `b`: energy `-b s` per spin, entropy
/// `h2((1 - e/b)/2)` on `[-b, b]`.
fn spin_entropy(b: f64, grid: usize) -> ConcaveFunction {
    let f = TabulatedFunction::from_fn(-b, b, grid, |e| binary_entropy((1.0 - e / b) / 2.0));
    ConcaveFunction::new(f.unwrap()).unwrap()
}

/// Two-level particles with gap `e0`: entropy `h2(e/e0)` on `[0, e0]`.
fn two_level_entropy(e0: f64, grid: usize) -> ConcaveFunction {
    let f = TabulatedFunction::from_fn(0.0, e0, grid, |e| binary_entropy(e / e0));
    ConcaveFunction::new(f.unwrap()).unwrap()
}

#[test]
fn spin_two_level_equilibrium() {
    let kt = 1.0;
    for b in [0.25, 1.0, 2.0] {
        for e0 in [0.5, 1.5] {
            for lambda in [0.5, 1.0, 2.0] {
                let eps_spin = -spin_dominant_energy(b, kt).unwrap();
                let eps_two = two_level_dominant_energy(e0, kt).unwrap();
                let total = (eps_spin + lambda * eps_two) / (1.0 + lambda);
                let sol = solve_equilibrium(
                    &spin_entropy(b, DEFAULT_GRID),
                    &two_level_entropy(e0, DEFAULT_GRID),
                    lambda,
                    total,
                )
                .unwrap();
                assert_abs_diff_eq!(sol.epsilon_star, eps_spin, epsilon = 1e-5);
                assert_abs_diff_eq!(sol.epsilon_channel, eps_two, epsilon = 1e-5);
                assert_abs_diff_eq!(sol.beta, 1.0 / kt, epsilon = 1e-4);
            }
        }
    }
}

#[test]
fn legendre_round_trip_on_h2() {
    let f = h2(DEFAULT_GRID);
    let psi = sample_legendre(&f, -DEFAULT_BETA_MAX, DEFAULT_BETA_MAX, 20_001).unwrap();
    let h = f.base().step();
    for k in 1..=90 {
        let e = 0.05 + 0.01 * k as f64 * 0.999;
        let back = legendre_inf(&psi, e).value;
        // slope-resolution error of two grid steps
        let slope = (binary_entropy(e + h) - binary_entropy(e - h)).abs() / (2.0 * h);
        assert!(
            (back - binary_entropy(e)).abs() <= 2.0 * h * (1.0 + slope),
            "e = {e}: {back} vs {}",
            binary_entropy(e)
        );
    }
}

#[test]
fn derivative_duality() {
    let f = h2(DEFAULT_GRID);
    let psi = sample_legendre(&f, -10.0, 10.0, 8001).unwrap();
    let h = f.base().step();
    for e in [0.1, 0.3, 0.5, 0.7, 0.85] {
        let beta = derivative(f.base(), e).unwrap();
        let back = -derivative(&psi, beta).unwrap();
        assert!((back - e).abs() <= 3.0 * h, "{e} -> {beta} -> {back}");
    }
}

#[test]
fn convolution_against_finer_brute_force() {
    let g = 2049;
    let a = h2(g);
    let b = ConcaveFunction::new(
        TabulatedFunction::from_fn(0.0, 1.0, g, |x| binary_entropy(x) - 0.5).unwrap(),
    )
    .unwrap();
    for (lambda, eps) in [(1.0, 0.3), (2.0, 0.45), (0.5, 0.6)] {
        let r = weighted_sup_convolution(&a, &b, lambda, eps);
        let fine = 10 * (g - 1);
        let brute = (0..=fine)
            .map(|k| {
                let e1 = k as f64 / fine as f64;
                let e2 = ((1.0 + lambda) * eps - e1) / lambda;
                if (0.0..=1.0).contains(&e2) {
                    (binary_entropy(e1) + lambda * (binary_entropy(e2) - 0.5)) / (1.0 + lambda)
                } else {
                    NEG_INF
                }
            })
            .fold(NEG_INF, f64::max);
        assert_abs_diff_eq!(r.value, brute, epsilon = 1e-6);
    }
}

fn concave_strategy() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    // a + b x - c x^2 - d (x ln x + (1-x) ln(1-x)), concave for c, d >= 0
    (-1.0..1.0f64, -2.0..2.0f64, 0.0..3.0f64, 0.05..1.0f64)
}

fn build(p: (f64, f64, f64, f64), grid: usize) -> (ConcaveFunction, impl Fn(f64) -> f64) {
    let (a, b, c, d) = p;
    let f = move |x: f64| a + b * x - c * x * x + d * binary_entropy(x);
    (
        ConcaveFunction::new(TabulatedFunction::from_fn(0.0, 1.0, grid, f).unwrap()).unwrap(),
        f,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn round_trip_for_random_concave(p in concave_strategy()) {
        let (f, exact) = build(p, 1025);
        let psi = sample_legendre(&f, -60.0, 60.0, 12_001).unwrap();
        let h = f.base().step();
        for k in 0..=18 {
            let e = 0.05 + 0.05 * k as f64;
            let slope = ((exact(e + h) - exact(e - h)) / (2.0 * h)).abs();
            let back = legendre_inf(&psi, e).value;
            prop_assert!((back - exact(e)).abs() <= 2.0 * h * (1.0 + slope));
        }
    }

    #[test]
    fn legendre_sup_is_nonincreasing_and_convex(p in concave_strategy()) {
        let (f, _) = build(p, 513);
        // energies are nonnegative, so psi is nonincreasing in beta
        let psi: Vec<f64> = (0..=200).map(|k| legendre_sup(&f, 0.1 * k as f64).value).collect();
        for w in psi.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
        for w in psi.windows(3) {
            prop_assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-12);
        }
    }

    #[test]
    fn envelope_dominates_and_is_concave(vals in prop::collection::vec(-1.0..1.0f64, 3..60)) {
        let n = vals.len();
        let f = TabulatedFunction::new(0.0, 1.0, vals.clone()).unwrap();
        let env = concave_envelope(&f).unwrap();
        for i in 0..n {
            prop_assert!(env.base().value_at(i) >= vals[i] - 1e-12);
        }
        let again = ConcaveFunction::new(env.base().clone());
        prop_assert!(again.is_ok());
        let twice = concave_envelope(env.base()).unwrap();
        for i in 0..n {
            prop_assert!((twice.base().value_at(i) - env.base().value_at(i)).abs() <= 1e-14);
        }
    }

    #[test]
    fn equilibrium_slopes_agree(p in concave_strategy(), q in concave_strategy(),
                                lambda in 0.3..3.0f64, t in 0.2..0.8f64) {
        let (f, _) = build(p, 2049);
        let (g, _) = build(q, 2049);
        match solve_equilibrium(&f, &g, lambda, t) {
            Ok(sol) => {
                let d1 = derivative(f.base(), sol.epsilon_star).unwrap();
                let d2 = derivative(g.base(), sol.epsilon_channel).unwrap();
                prop_assert!((d1 - d2).abs() <= 1e-6);
                prop_assert!(
                    (sol.epsilon_star + lambda * sol.epsilon_channel - (1.0 + lambda) * t).abs() < 1e-12
                );
            }
            Err(jscc::Error::BoundarySolution { .. }) | Err(jscc::Error::NoFeasibleSplit { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}
