//! Exhaustive enumeration over messages and channel outputs.

use super::code::{check_budget, checked_pow, CodeInstance, DEFAULT_BUDGET};
use super::OracleReport;
use crate::ensemble::source_shannon_entropy;
use crate::error::{Error, Result};
use crate::thermo::NEG_INF;

/// Per-code quantities shared by the enumeration routines.
pub(crate) struct Tables {
    pub log_prior: Vec<f64>,
    pub source_energy: Vec<f64>,
    /// Canonical channel energies `E[x][y]`, `+inf` for impossible pairs.
    pub energy: Vec<Vec<f64>>,
    /// `ln W_max`, so that `ln W(y|x) = ln W_max - beta E[x][y]`.
    pub log_w_max: f64,
    pub beta: f64,
    /// Codeword letters by position: `columns[i][m] = x_i(m)`.
    pub columns: Vec<Vec<u32>>,
}

impl Tables {
    pub fn new(code: &CodeInstance) -> Self {
        let (log_prior, source_energy) = code.message_tables();
        let ch = code.system().channel();
        let log_w_max = ch
            .log_transition()
            .iter()
            .flatten()
            .copied()
            .fold(NEG_INF, f64::max);
        let k = code.num_messages();
        let columns = (0..code.n_channel())
            .map(|i| (0..k).map(|m| code.codeword(m)[i]).collect())
            .collect();
        Tables {
            log_prior,
            source_energy,
            energy: ch.hamiltonian().to_vec(),
            log_w_max,
            beta: ch.beta(),
            columns,
        }
    }

    /// Channel energy of every codeword against the output string `y`.
    pub fn channel_energies(&self, y: &[usize]) -> Vec<f64> {
        let mut acc = vec![0.0; self.log_prior.len()];
        for (col, &yi) in self.columns.iter().zip(y) {
            for (a, &x) in acc.iter_mut().zip(col) {
                *a += self.energy[x as usize][yi];
            }
        }
        acc
    }

    /// `ln P(s) + ln W(y|x(s))` minus the constant `n ln W_max`.
    pub fn shifted_log_joint(&self, lp: f64, ec: f64) -> f64 {
        if ec.is_finite() {
            lp - self.beta * ec
        } else {
            NEG_INF
        }
    }
}

/// Posterior statistics for one output string.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PosteriorStats {
    /// `ln sum_s P(s) W(y|x(s))` minus `n ln W_max`.
    pub log_norm: f64,
    pub entropy: f64,
    pub mean_source_energy: f64,
    pub mean_channel_energy: f64,
    pub sum_sq: f64,
}

pub(crate) fn posterior_stats(t: &Tables, ec: &[f64]) -> Option<PosteriorStats> {
    let mut top = NEG_INF;
    for (lp, e) in t.log_prior.iter().zip(ec) {
        top = top.max(t.shifted_log_joint(*lp, *e));
    }
    if top == NEG_INF {
        return None;
    }
    let (mut z, mut a, mut q, mut es, mut ecm) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((lp, e), s_e) in t.log_prior.iter().zip(ec).zip(&t.source_energy) {
        let l = t.shifted_log_joint(*lp, *e);
        if l == NEG_INF {
            continue;
        }
        let w = (l - top).exp();
        z += w;
        a += w * (l - top);
        q += w * w;
        es += w * s_e;
        ecm += w * e;
    }
    Some(PosteriorStats {
        log_norm: top + z.ln(),
        // H = ln Z - E[l - top] with weights normalised by z
        entropy: (z.ln() - a / z).max(0.0),
        mean_source_energy: es / z,
        mean_channel_energy: ecm / z,
        sum_sq: q / (z * z),
    })
}

/// Normalised posterior `P(s|y)` over message indices.
pub fn posterior(code: &CodeInstance, y: &[usize]) -> Result<Vec<f64>> {
    check_output(code, y)?;
    let t = Tables::new(code);
    let ec = t.channel_energies(y);
    let stats = posterior_stats(&t, &ec).ok_or(Error::ImpossibleOutput)?;
    Ok(t.log_prior
        .iter()
        .zip(&ec)
        .map(|(lp, e)| (t.shifted_log_joint(*lp, *e) - stats.log_norm).exp())
        .collect())
}

/// `(ln Z_c, ln Z_e)`: the Boltzmann weight `-beta [E_S(s0) + E_C(x(s0), y)]`
/// of the true message and the log-sum of all other messages' weights.
pub fn partition_split(code: &CodeInstance, s0: usize, y: &[usize]) -> Result<(f64, f64)> {
    check_output(code, y)?;
    if s0 >= code.num_messages() {
        return Err(Error::spec("s0", "message index out of range"));
    }
    let t = Tables::new(code);
    let ec = t.channel_energies(y);
    let weight = |m: usize| {
        if ec[m].is_finite() {
            -t.beta * (t.source_energy[m] + ec[m])
        } else {
            NEG_INF
        }
    };
    let others: Vec<f64> = (0..code.num_messages())
        .filter(|&m| m != s0)
        .map(weight)
        .collect();
    Ok((weight(s0), log_sum_exp(&others)))
}

/// `ln sum_s exp(-beta [E_S(s) + E_C(x(s), y)])`.
pub fn log_normalizer(code: &CodeInstance, y: &[usize]) -> Result<f64> {
    check_output(code, y)?;
    let t = Tables::new(code);
    let ec = t.channel_energies(y);
    let w: Vec<f64> = (0..code.num_messages())
        .map(|m| {
            if ec[m].is_finite() {
                -t.beta * (t.source_energy[m] + ec[m])
            } else {
                NEG_INF
            }
        })
        .collect();
    Ok(log_sum_exp(&w))
}

/// Posterior means of the per-symbol source energy and per-use channel
/// energy given `y`.
pub fn posterior_energy_split(code: &CodeInstance, y: &[usize]) -> Result<(f64, f64)> {
    check_output(code, y)?;
    let t = Tables::new(code);
    let ec = t.channel_energies(y);
    let s = posterior_stats(&t, &ec).ok_or(Error::ImpossibleOutput)?;
    Ok((
        s.mean_source_energy / code.n_source() as f64,
        s.mean_channel_energy / code.n_channel().max(1) as f64,
    ))
}

fn check_output(code: &CodeInstance, y: &[usize]) -> Result<()> {
    let out = code.system().channel().out_size();
    if y.len() != code.n_channel() || y.iter().any(|&v| v >= out) {
        return Err(Error::spec(
            "y",
            format!("need {} letters below {out}", code.n_channel()),
        ));
    }
    Ok(())
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let top = xs.iter().copied().fold(NEG_INF, f64::max);
    if top == NEG_INF {
        return NEG_INF;
    }
    top + xs.iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

/// Running sums over output strings, each weighted by `P(y)`.
#[derive(Debug, Default, Clone, Copy)]
struct OutputSums {
    prob: f64,
    h_s_given_y: f64,
    h_y: f64,
    source_energy: f64,
    channel_energy: f64,
    source_gap: f64,
    channel_gap: f64,
    z_c: f64,
}

/// Exact mutual information of one codebook by enumerating every message and
/// output string within [`DEFAULT_BUDGET`].
pub fn exact_mi(code: &CodeInstance) -> Result<OracleReport> {
    exact_mi_with_budget(code, DEFAULT_BUDGET)
}

/// As [`exact_mi`], with the budget bounding `|S|^N |Y|^n`.
pub fn exact_mi_with_budget(code: &CodeInstance, budget: u64) -> Result<OracleReport> {
    let sys = code.system();
    let n = code.n_channel();
    let ny = sys.channel().out_size();
    let outputs = checked_pow(ny, n);
    check_budget(
        outputs.and_then(|o| o.checked_mul(code.num_messages() as u128)),
        budget,
    )?;
    let t = Tables::new(code);
    let (target_s, target_c) = super::energy_targets(sys)?;
    let (nf, kf) = (code.n_source() as f64, n.max(1) as f64);
    let k = code.num_messages();

    // depth-first over output strings: level d holds the channel energies of
    // every codeword against the first d output letters
    let mut levels = vec![vec![0.0; k]; n + 1];
    let mut digits = vec![0usize; n];
    let mut start = 0;
    let mut sums = OutputSums::default();
    loop {
        for d in start..n {
            let (lo, hi) = levels.split_at_mut(d + 1);
            let (prev, next) = (&lo[d], &mut hi[0]);
            let col = &t.columns[d];
            for m in 0..k {
                next[m] = prev[m] + t.energy[col[m] as usize][digits[d]];
            }
        }
        if let Some(s) = posterior_stats(&t, &levels[n]) {
            let log_py = s.log_norm + n as f64 * t.log_w_max;
            let py = log_py.exp();
            sums.prob += py;
            sums.h_s_given_y += py * s.entropy;
            sums.h_y -= py * log_py;
            let (ps, pc) = (s.mean_source_energy / nf, s.mean_channel_energy / kf);
            sums.source_energy += py * ps;
            sums.channel_energy += py * pc;
            sums.source_gap += py * (ps - target_s).abs();
            sums.channel_gap += py * (pc - target_c).abs();
            sums.z_c += py * s.sum_sq;
        }
        // advance the odometer, last position fastest
        let mut d = n;
        loop {
            if d == 0 {
                return Ok(finish(code, &t, sums));
            }
            d -= 1;
            digits[d] += 1;
            if digits[d] < ny {
                break;
            }
            digits[d] = 0;
        }
        start = d;
    }
}

fn finish(code: &CodeInstance, t: &Tables, s: OutputSums) -> OracleReport {
    let sys = code.system();
    let nf = code.n_source() as f64;
    let h_s = source_shannon_entropy(sys.source());
    let h_s_given_y = s.h_s_given_y / nf;
    // H(Y|S) = sum_s P(s) sum_i H(W(.|x_i(s)))
    let row_entropy: Vec<f64> = sys
        .channel()
        .log_transition()
        .iter()
        .map(|row| {
            row.iter()
                .filter(|l| l.is_finite())
                .map(|&l| -l.exp() * l)
                .sum()
        })
        .collect();
    let h_y_given_s: f64 = (0..code.num_messages())
        .map(|m| {
            let h: f64 = code
                .codeword(m)
                .iter()
                .map(|&x| row_entropy[x as usize])
                .sum();
            t.log_prior[m].exp() * h
        })
        .sum();
    OracleReport {
        mode: super::Mode::Exact,
        n_source: code.n_source(),
        n_channel: code.n_channel(),
        seed: code.seed(),
        trials: 0,
        h_s,
        h_s_given_y,
        mi_per_symbol: h_s - h_s_given_y,
        mi_via_outputs: (s.h_y - h_y_given_s) / nf,
        stderr: 0.0,
        energy_split_source: s.source_energy,
        energy_split_channel: s.channel_energy,
        energy_gap_source: s.source_gap,
        energy_gap_channel: s.channel_gap,
        z_c_fraction: s.z_c.clamp(0.0, 1.0),
    }
}
