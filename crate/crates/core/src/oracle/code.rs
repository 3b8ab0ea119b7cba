use super::rng::{categorical, stream, TAG_CODEBOOK};
use crate::ensemble::SystemSpec;
use crate::error::{Error, Result};

/// Default enumeration budget, in elementary steps.
pub const DEFAULT_BUDGET: u64 = 1 << 26;

/// A concrete codebook `s -> x(s)` for block length `N`.
///
/// Messages are indexed by their base-`|S|` digits, least significant symbol
/// first; codeword `m` holds `n = lambda N` channel input letters.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeInstance {
    n_source: usize,
    n_channel: usize,
    codebook: Vec<u32>,
    seed: u64,
    system: SystemSpec,
}

/// `base^exp` if it fits in a `u128`.
pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<u128> {
    (0..exp).try_fold(1u128, |acc, _| acc.checked_mul(base as u128))
}

pub(crate) fn check_budget(required: Option<u128>, budget: u64) -> Result<u128> {
    match required {
        Some(r) if r <= budget as u128 => Ok(r),
        r => Err(Error::TooLarge {
            required: r.unwrap_or(u128::MAX),
            budget,
        }),
    }
}

pub(crate) fn channel_len(system: &SystemSpec, n_source: usize) -> Result<usize> {
    if n_source == 0 {
        return Err(Error::spec("block_length", "must be positive"));
    }
    let l = system.lambda();
    l.channel_len(n_source).ok_or_else(|| {
        Error::spec(
            "block_length",
            format!(
                "lambda N = {}/{} * {n_source} is not an integer",
                l.num, l.den
            ),
        )
    })
}

impl CodeInstance {
    /// Wraps an explicit codebook, one codeword per message index.
    pub fn from_codebook(
        system: &SystemSpec,
        n_source: usize,
        codewords: &[Vec<usize>],
        seed: u64,
    ) -> Result<Self> {
        let n_channel = channel_len(system, n_source)?;
        let k = checked_pow(system.source().alphabet_size(), n_source).ok_or(Error::TooLarge {
            required: u128::MAX,
            budget: u64::MAX,
        })?;
        if codewords.len() as u128 != k {
            return Err(Error::spec(
                "codebook",
                format!("expected {k} codewords, got {}", codewords.len()),
            ));
        }
        let inputs = system.channel().in_size();
        let mut codebook = Vec::with_capacity(codewords.len() * n_channel);
        for (m, w) in codewords.iter().enumerate() {
            if w.len() != n_channel || w.iter().any(|&x| x >= inputs) {
                return Err(Error::spec(
                    format!("codebook[{m}]"),
                    format!("need {n_channel} letters below {inputs}"),
                ));
            }
            codebook.extend(w.iter().map(|&x| x as u32));
        }
        Ok(CodeInstance {
            n_source,
            n_channel,
            codebook,
            seed,
            system: system.clone(),
        })
    }

    pub fn n_source(&self) -> usize {
        self.n_source
    }

    pub fn n_channel(&self) -> usize {
        self.n_channel
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn system(&self) -> &SystemSpec {
        &self.system
    }

    pub fn num_messages(&self) -> usize {
        self.codebook.len() / self.n_channel.max(1)
    }

    pub fn codeword(&self, m: usize) -> &[u32] {
        &self.codebook[m * self.n_channel..(m + 1) * self.n_channel]
    }

    /// Source symbols of message `m`, first symbol first.
    pub fn message(&self, m: usize) -> Vec<usize> {
        let a = self.system.source().alphabet_size();
        let mut rest = m;
        (0..self.n_source)
            .map(|_| {
                let d = rest % a;
                rest /= a;
                d
            })
            .collect()
    }

    /// Message index of a symbol string (inverse of [`Self::message`]).
    pub fn message_index(&self, symbols: &[usize]) -> usize {
        let a = self.system.source().alphabet_size();
        symbols.iter().rev().fold(0, |acc, &s| acc * a + s)
    }

    /// `ln P(s)` and the canonical source energy `E_S(s)` of every message.
    pub(crate) fn message_tables(&self) -> (Vec<f64>, Vec<f64>) {
        let lp1 = self.system.source().log_probabilities();
        let e1 = self.system.source().hamiltonian().to_vec();
        let a = lp1.len();
        let mut lp = vec![0.0];
        let mut es = vec![0.0];
        // message digits are least significant first, so each new symbol
        // multiplies the table size by |S|
        for _ in 0..self.n_source {
            let (olp, oes) = (lp, es);
            lp = Vec::with_capacity(olp.len() * a);
            es = Vec::with_capacity(oes.len() * a);
            for s in 0..a {
                for (l, e) in olp.iter().zip(&oes) {
                    lp.push(l + lp1[s]);
                    es.push(e + e1[s]);
                }
            }
        }
        (lp, es)
    }
}

/// Draws an i.i.d. codebook under the ensemble's `M` within [`DEFAULT_BUDGET`].
pub fn draw_code(system: &SystemSpec, n_source: usize, seed: u64) -> Result<CodeInstance> {
    draw_code_with_budget(system, n_source, seed, DEFAULT_BUDGET)
}

/// Draws an i.i.d. codebook; codeword `m` comes from ChaCha20 stream `m` of
/// the key derived from `seed`. The budget bounds `|S|^N n`.
pub fn draw_code_with_budget(
    system: &SystemSpec,
    n_source: usize,
    seed: u64,
    budget: u64,
) -> Result<CodeInstance> {
    draw_tagged(system, n_source, seed, budget, TAG_CODEBOOK)
}

/// `k` codewords of `n` letters from `m`, codeword `i` on stream `i`.
pub(crate) fn draw_letters(seed: u64, tag: u64, k: usize, n: usize, m: &[f64]) -> Vec<u32> {
    let mut codebook = Vec::with_capacity(k * n);
    for msg in 0..k {
        let mut rng = stream(seed, tag, msg as u64);
        codebook.extend((0..n).map(|_| categorical(&mut rng, m) as u32));
    }
    codebook
}

fn draw_tagged(
    system: &SystemSpec,
    n_source: usize,
    seed: u64,
    budget: u64,
    tag: u64,
) -> Result<CodeInstance> {
    let n_channel = channel_len(system, n_source)?;
    let k = checked_pow(system.source().alphabet_size(), n_source);
    check_budget(k.and_then(|k| k.checked_mul(n_channel as u128)), budget)?;
    let k = k.expect("checked above") as usize;
    let codebook = draw_letters(seed, tag, k, n_channel, system.ensemble().probabilities());
    Ok(CodeInstance {
        n_source,
        n_channel,
        codebook,
        seed,
        system: system.clone(),
    })
}
