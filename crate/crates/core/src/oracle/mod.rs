//! Finite-block ground truth: concrete random codebooks, exact posteriors
//! and mutual information by enumeration, and a Monte Carlo fallback.

mod code;
mod exact;
mod mc;
pub(crate) mod rng;
mod stats;

use serde::Serialize;

pub(crate) use code::{check_budget, checked_pow, draw_letters};
pub use code::{draw_code, draw_code_with_budget, CodeInstance, DEFAULT_BUDGET};
pub use exact::{
    exact_mi, exact_mi_with_budget, log_normalizer, partition_split, posterior,
    posterior_energy_split,
};
pub use mc::{mc_mi, MIN_TRIALS};
pub use stats::{ensemble_stats, ensemble_stats_with_budget, EnsembleStats, Moments};

use crate::ensemble::SystemSpec;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    MonteCarlo,
}

/// Information and energy measurements on one codebook, per source symbol
/// (entropies) or per particle (energies).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub mode: Mode,
    pub n_source: usize,
    pub n_channel: usize,
    pub seed: u64,
    /// Monte Carlo trials; zero for exact enumeration.
    pub trials: usize,
    pub h_s: f64,
    pub h_s_given_y: f64,
    /// `h_s - h_s_given_y`.
    pub mi_per_symbol: f64,
    /// `(H(Y) - H(Y|S)) / N`, an independent evaluation of the same quantity.
    pub mi_via_outputs: f64,
    pub stderr: f64,
    /// `P(y)`-averaged posterior mean of `E_S(S) / N`.
    pub energy_split_source: f64,
    /// `P(y)`-averaged posterior mean of `E_C(x(S), y) / n`.
    pub energy_split_channel: f64,
    /// `P(y)`-averaged distance of the posterior source energy from `epsilon_S(beta)`.
    pub energy_gap_source: f64,
    /// `P(y)`-averaged distance of the posterior channel energy from `-zeta'(beta)`.
    pub energy_gap_channel: f64,
    /// Mean posterior weight of the transmitted message, `E[Z_c / Z]`.
    pub z_c_fraction: f64,
}

/// Asymptotic per-particle energies `(epsilon_S(beta), -zeta'(beta))` that
/// posterior averages concentrate on.
pub fn energy_targets(system: &SystemSpec) -> Result<(f64, f64)> {
    let beta = system.beta();
    Ok((
        system.source_log_mgf().mean(beta),
        system.channel_log_mgf()?.mean(beta),
    ))
}
