//! Monte Carlo estimate of the conditional entropy for block lengths whose
//! output space is too large to enumerate.

use rayon::prelude::*;

use super::exact::{posterior_stats, Tables};
use super::rng::{categorical, stream, TAG_MONTE_CARLO};
use super::{CodeInstance, Mode, OracleReport};
use crate::ensemble::source_shannon_entropy;
use crate::error::{Error, Result};

/// Smallest accepted number of trials.
pub const MIN_TRIALS: usize = 100;

struct Trial {
    surprisal: f64,
    source_energy: f64,
    channel_energy: f64,
    z_c: f64,
}

/// Estimates `H(S|Y)` by averaging `-ln P(s0|y)` over `trials` draws of the
/// transmitted message `s0` and the channel output `y`. Trial `i` uses its own
/// ChaCha20 stream, so the result does not depend on scheduling.
pub fn mc_mi(code: &CodeInstance, trials: usize, seed: u64) -> Result<OracleReport> {
    if trials < MIN_TRIALS {
        return Err(Error::spec(
            "trials",
            format!("need at least {MIN_TRIALS}, got {trials}"),
        ));
    }
    let sys = code.system();
    let t = Tables::new(code);
    let p_src = sys.source().probabilities();
    let w = sys.channel().transition();
    let (nf, kf) = (code.n_source() as f64, code.n_channel().max(1) as f64);

    let results: Vec<Result<Trial>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, TAG_MONTE_CARLO, i as u64);
            let symbols: Vec<usize> = (0..code.n_source())
                .map(|_| categorical(&mut rng, &p_src))
                .collect();
            let s0 = code.message_index(&symbols);
            let y: Vec<usize> = code
                .codeword(s0)
                .iter()
                .map(|&x| categorical(&mut rng, &w[x as usize]))
                .collect();
            let ec = t.channel_energies(&y);
            let stats = posterior_stats(&t, &ec).ok_or(Error::ImpossibleOutput)?;
            let log_post = t.shifted_log_joint(t.log_prior[s0], ec[s0]) - stats.log_norm;
            Ok(Trial {
                surprisal: (-log_post).max(0.0) / nf,
                source_energy: stats.mean_source_energy / nf,
                channel_energy: stats.mean_channel_energy / kf,
                z_c: log_post.exp(),
            })
        })
        .collect();
    let trials_v: Vec<Trial> = results.into_iter().collect::<Result<_>>()?;

    let (target_s, target_c) = super::energy_targets(sys)?;
    let count = trials as f64;
    let mean = |f: &dyn Fn(&Trial) -> f64| trials_v.iter().map(f).sum::<f64>() / count;
    let h = mean(&|t| t.surprisal);
    let var = trials_v
        .iter()
        .map(|t| (t.surprisal - h).powi(2))
        .sum::<f64>()
        / (count - 1.0);
    let h_s = source_shannon_entropy(sys.source());
    Ok(OracleReport {
        mode: Mode::MonteCarlo,
        n_source: code.n_source(),
        n_channel: code.n_channel(),
        seed: code.seed(),
        trials,
        h_s,
        h_s_given_y: h,
        mi_per_symbol: h_s - h,
        mi_via_outputs: h_s - h,
        stderr: (var / count).sqrt(),
        energy_split_source: mean(&|t| t.source_energy),
        energy_split_channel: mean(&|t| t.channel_energy),
        energy_gap_source: mean(&|t| (t.source_energy - target_s).abs()),
        energy_gap_channel: mean(&|t| (t.channel_energy - target_c).abs()),
        z_c_fraction: mean(&|t| t.z_c).clamp(0.0, 1.0),
    })
}
