//! Thermal equilibrium between two subsystems sharing a total energy.

use super::tabulated::ConcaveFunction;
use super::transform::derivative;
use crate::error::{Endpoint, Error, Result};

/// Absolute tolerance on the slope difference at the equilibrium point.
pub const TOL_ROOT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumSolution {
    /// Per-particle energy of the first subsystem.
    pub epsilon_star: f64,
    /// Per-particle energy of the second subsystem, `((1 + lambda) e0 - e*) / lambda`.
    pub epsilon_channel: f64,
    /// Common slope of the two entropy functions.
    pub beta: f64,
}

/// Solves `sigma1'(e) = sigma2'(((1 + lambda) epsilon0 - e) / lambda)` by
/// bisection on the slope difference.
pub fn solve_equilibrium(
    sigma1: &ConcaveFunction,
    sigma2: &ConcaveFunction,
    lambda: f64,
    epsilon0: f64,
) -> Result<EquilibriumSolution> {
    if !(lambda > 0.0) {
        return Err(Error::OutOfRange {
            name: "lambda",
            value: lambda,
        });
    }
    let total = (1.0 + lambda) * epsilon0;
    let share = |e: f64| (total - e) / lambda;
    let interior = |f: &ConcaveFunction| {
        let b = f.base();
        b.finite_support()
            .filter(|(a, z)| z >= a && z - a >= 2)
            .map(|(a, z)| (b.x_at(a) + b.step(), b.x_at(z) - b.step()))
    };
    let none = Error::NoFeasibleSplit { epsilon0 };
    let (l1, h1) = interior(sigma1).ok_or(none.clone())?;
    let (l2, h2) = interior(sigma2).ok_or(none.clone())?;
    // second argument inside [l2, h2] means e in [total - lambda h2, total - lambda l2]
    let a = l1.max(total - lambda * h2);
    let b = h1.min(total - lambda * l2);
    if a > b {
        return Err(none);
    }

    let g = |e: f64| -> Result<f64> {
        Ok(derivative(sigma1.base(), e)? - derivative(sigma2.base(), share(e).clamp(l2, h2))?)
    };
    let (ga, gb) = (g(a)?, g(b)?);
    if ga < -TOL_ROOT {
        return Err(Error::BoundarySolution {
            endpoint: Endpoint::Lower,
        });
    }
    if gb > TOL_ROOT {
        return Err(Error::BoundarySolution {
            endpoint: Endpoint::Upper,
        });
    }
    let (mut lo, mut hi) = (a, b);
    let mut e = if ga.abs() <= gb.abs() { a } else { b };
    if ga.abs().min(gb.abs()) > TOL_ROOT {
        loop {
            e = 0.5 * (lo + hi);
            let ge = g(e)?;
            if ge.abs() <= TOL_ROOT || hi - lo <= 1e-15 * (1.0 + e.abs()) {
                break;
            }
            if ge > 0.0 {
                lo = e;
            } else {
                hi = e;
            }
        }
    }
    Ok(EquilibriumSolution {
        epsilon_star: e,
        epsilon_channel: share(e),
        beta: derivative(sigma1.base(), e)?,
    })
}

fn check_temperature(kt: f64) -> Result<()> {
    if kt > 0.0 && kt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTemperature(kt))
    }
}

/// Per-spin dominant field energy `B tanh(B / kT)` of a paramagnet.
pub fn spin_dominant_energy(b: f64, kt: f64) -> Result<f64> {
    check_temperature(kt)?;
    Ok(b * (b / kt).tanh())
}

/// Per-particle dominant energy `e0 exp(-e0/kT) / (1 + exp(-e0/kT))` of a
/// two-level system.
pub fn two_level_dominant_energy(e0: f64, kt: f64) -> Result<f64> {
    check_temperature(kt)?;
    let w = (-e0 / kt).exp();
    Ok(e0 * w / (1.0 + w))
}
