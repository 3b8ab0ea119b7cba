//! Two-user multiple-access channel: the conditional rate function
//! `phi(e|S)`, the per-user mutual-information rate
//! `lambda [phi(e_C*|S) - phi(e_C*)]`, and an exact two-codebook oracle.

use serde::Serialize;

use crate::ensemble::{
    energy_from_crossover, source_shannon_entropy, ChannelSpec, EnsembleSpec, Lambda, SourceSpec,
    SystemSpec,
};
use crate::error::{Error, Result};
use crate::oracle::rng::{TAG_CODEBOOK, TAG_CODEBOOK_T};
use crate::oracle::{check_budget, checked_pow, draw_letters, DEFAULT_BUDGET};
use crate::phase::{classify_phase, Phase, TOL_ORDER};
use crate::thermo::{ConcaveFunction, MixtureLogMgf, NEG_INF};

/// Two independent sources, two independent i.i.d. codebooks and a channel
/// `W(y|x_S, x_T) ∝ exp(-beta E_C(x_S, x_T, y))`.
///
/// Energies are held in canonical form as for [`SystemSpec`]: sources
/// rescaled to the channel's `beta` and measured from their ground states,
/// the channel as `-(1/beta) ln W` shifted to a zero minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct MacSpec {
    source_s: SourceSpec,
    source_t: SourceSpec,
    ensemble_s: EnsembleSpec,
    ensemble_t: EnsembleSpec,
    /// `hamiltonian[x_s][x_t][y]`.
    hamiltonian: Vec<Vec<Vec<f64>>>,
    beta: f64,
    lambda: Lambda,
    grid: usize,
}

impl MacSpec {
    pub fn new(
        source_s: SourceSpec,
        source_t: SourceSpec,
        ensemble_s: EnsembleSpec,
        ensemble_t: EnsembleSpec,
        hamiltonian: Vec<Vec<Vec<f64>>>,
        beta: f64,
        lambda: Lambda,
    ) -> Result<Self> {
        let ns = ensemble_s.probabilities().len();
        let nt = ensemble_t.probabilities().len();
        if hamiltonian.len() != ns {
            return Err(Error::spec(
                "mac.channel3",
                format!(
                    "has {} rows but ensemble_s has {ns} letters",
                    hamiltonian.len()
                ),
            ));
        }
        if let Some(xs) = hamiltonian.iter().position(|r| r.len() != nt) {
            return Err(Error::spec(
                format!("mac.channel3[{xs}]"),
                format!("expected {nt} entries, one per letter of ensemble_t"),
            ));
        }
        // validate and canonicalise through the equivalent single-input channel
        let flat = ChannelSpec::new(hamiltonian.concat(), beta)?.effective_energies();
        let hamiltonian = flat.chunks(nt).map(<[_]>::to_vec).collect();
        let rescale = |s: &SourceSpec| {
            SourceSpec::new(
                s.normalized_energies()
                    .iter()
                    .map(|e| e * s.beta() / beta)
                    .collect(),
                beta,
            )
        };
        Ok(MacSpec {
            source_s: rescale(&source_s)?,
            source_t: rescale(&source_t)?,
            ensemble_s,
            ensemble_t,
            hamiltonian,
            beta,
            lambda,
            grid: crate::thermo::DEFAULT_GRID,
        })
    }

    /// `Y = X_S xor X_T xor V` with `V ~ Bernoulli(p)`, uniform binary
    /// sources and codebook letters Bernoulli(`m_s`), Bernoulli(`m_t`).
    pub fn binary_additive(m_s: f64, m_t: f64, p: f64, lambda: Lambda) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange {
                name: "p",
                value: p,
            });
        }
        let (hit, miss) = match p {
            0.0 => (0.0, f64::INFINITY),
            1.0 => (f64::INFINITY, 0.0),
            _ => (0.0, energy_from_crossover(p, 1.0)?),
        };
        let h = (0..2)
            .map(|xs| {
                (0..2)
                    .map(|xt| {
                        (0..2)
                            .map(|y| if y == xs ^ xt { hit } else { miss })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        MacSpec::new(
            SourceSpec::uniform(2)?,
            SourceSpec::uniform(2)?,
            EnsembleSpec::bernoulli(m_s)?,
            EnsembleSpec::bernoulli(m_t)?,
            h,
            1.0,
            lambda,
        )
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid.max(3);
        self
    }

    /// The same system with the roles of the two users exchanged.
    pub fn swapped(&self) -> Self {
        let (ns, nt) = (self.in_sizes().0, self.in_sizes().1);
        let hamiltonian = (0..nt)
            .map(|xt| (0..ns).map(|xs| self.hamiltonian[xs][xt].clone()).collect())
            .collect();
        MacSpec {
            source_s: self.source_t.clone(),
            source_t: self.source_s.clone(),
            ensemble_s: self.ensemble_t.clone(),
            ensemble_t: self.ensemble_s.clone(),
            hamiltonian,
            ..self.clone()
        }
    }

    pub fn source_s(&self) -> &SourceSpec {
        &self.source_s
    }

    pub fn source_t(&self) -> &SourceSpec {
        &self.source_t
    }

    pub fn ensemble_s(&self) -> &EnsembleSpec {
        &self.ensemble_s
    }

    pub fn ensemble_t(&self) -> &EnsembleSpec {
        &self.ensemble_t
    }

    pub fn hamiltonian(&self) -> &[Vec<Vec<f64>>] {
        &self.hamiltonian
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn lambda(&self) -> Lambda {
        self.lambda
    }

    /// `(|X_S|, |X_T|)`.
    pub fn in_sizes(&self) -> (usize, usize) {
        (self.hamiltonian.len(), self.hamiltonian[0].len())
    }

    pub fn out_size(&self) -> usize {
        self.hamiltonian[0][0].len()
    }

    /// `W(y|x_S, x_T)`.
    pub fn transition(&self) -> Vec<Vec<Vec<f64>>> {
        self.flat_channel()
            .expect("validated at construction")
            .transition()
            .chunks(self.in_sizes().1)
            .map(<[_]>::to_vec)
            .collect()
    }

    fn flat_channel(&self) -> Result<ChannelSpec> {
        ChannelSpec::new(self.hamiltonian.concat(), self.beta)
    }

    /// The pair `(S, T)` as one user: source letters `s |T| + t`, inputs
    /// `x_S |X_T| + x_T` drawn from `M_S x M_T`.
    pub fn combined_system(&self) -> Result<SystemSpec> {
        let (es, et) = (self.source_s.hamiltonian(), self.source_t.hamiltonian());
        let energies = es
            .iter()
            .flat_map(|a| et.iter().map(move |b| a + b))
            .collect();
        let (ms, mt) = (
            self.ensemble_s.probabilities(),
            self.ensemble_t.probabilities(),
        );
        let m = ms
            .iter()
            .flat_map(|a| mt.iter().map(move |b| a * b))
            .collect();
        Ok(SystemSpec::new(
            SourceSpec::new(energies, self.beta)?,
            self.flat_channel()?,
            EnsembleSpec::new(m)?,
            self.lambda,
        )?
        .with_grid(self.grid))
    }

    /// `zeta(t|S) = sum_{x_S, y} P(x_S, y) ln sum_{x_T} M_T(x_T) exp(-t E_C)`
    /// with `P(x_S, y)` the true transmission law.
    pub fn conditional_log_mgf(&self) -> Result<MixtureLogMgf> {
        let w = self.transition();
        let (ms, mt) = (
            self.ensemble_s.probabilities(),
            self.ensemble_t.probabilities(),
        );
        let mut groups = Vec::new();
        for (xs, &pxs) in ms.iter().enumerate() {
            for y in 0..self.out_size() {
                let weight: f64 = pxs
                    * mt.iter()
                        .zip(&w[xs])
                        .map(|(m, row)| m * row[y])
                        .sum::<f64>();
                let terms = mt
                    .iter()
                    .zip(&self.hamiltonian[xs])
                    .filter(|(m, _)| **m > 0.0)
                    .map(|(m, e)| (m.ln(), e[y]))
                    .collect();
                groups.push((weight, terms));
            }
        }
        MixtureLogMgf::new(groups).ok_or(Error::IncompatibleSupport { output: 0 })
    }

    /// Mean channel energy per use under the true transmission,
    /// `sum M_S M_T W E_C`.
    pub fn dominant_channel_energy(&self) -> f64 {
        let w = self.transition();
        let (ms, mt) = (
            self.ensemble_s.probabilities(),
            self.ensemble_t.probabilities(),
        );
        let mut e = 0.0;
        for (xs, &a) in ms.iter().enumerate() {
            for (xt, &b) in mt.iter().enumerate() {
                for (y, &wy) in w[xs][xt].iter().enumerate() {
                    if wy > 0.0 {
                        e += a * b * wy * self.hamiltonian[xs][xt][y];
                    }
                }
            }
        }
        e
    }
}

/// Tabulated `phi(e|S)`.
pub fn mac_phi_conditional(spec: &MacSpec) -> Result<ConcaveFunction> {
    spec.conditional_log_mgf()?.tabulate_conjugate(spec.grid)
}

/// Tabulated rate function of the combined user.
pub fn mac_phi(spec: &MacSpec) -> Result<ConcaveFunction> {
    spec.combined_system()?
        .channel_log_mgf()?
        .tabulate_conjugate(spec.grid)
}

/// Rate-function values at the dominant channel energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MacRates {
    pub epsilon_c: f64,
    pub phi: f64,
    pub phi_conditional: f64,
    /// `-lambda phi(e_C*)`: the sum rate `I(S,T;Y) / N`.
    pub sum_rate: f64,
    /// `-lambda phi(e_C*|S)`: `I(T;Y|S) / N`.
    pub conditional_rate: f64,
    /// `lambda [phi(e_C*|S) - phi(e_C*)]`: `I(S;Y) / N`.
    pub user_rate: f64,
}

/// Exact rate-function values, with no phase check.
pub fn mac_rates(spec: &MacSpec) -> Result<MacRates> {
    let lambda = spec.lambda.value();
    let e = spec.dominant_channel_energy();
    let phi = spec
        .combined_system()?
        .channel_log_mgf()?
        .conjugate(e)
        .value;
    let phi_conditional = spec.conditional_log_mgf()?.conjugate(e).value;
    Ok(MacRates {
        epsilon_c: e,
        phi,
        phi_conditional,
        sum_rate: -lambda * phi,
        conditional_rate: -lambda * phi_conditional,
        user_rate: lambda * (phi_conditional - phi),
    })
}

/// `I(S;Y) / N` in the paramagnetic regime: both the pair `(S, T)` and, given
/// `S`, the user `T` alone must carry more entropy than the channel conveys.
pub fn mac_mi_user(spec: &MacSpec) -> Result<f64> {
    let phase = classify_phase(&spec.combined_system()?, spec.beta)?;
    if phase != Phase::Paramagnetic {
        return Err(Error::PhaseMismatch {
            expected: Phase::Paramagnetic.as_str(),
            found: phase.as_str(),
        });
    }
    let r = mac_rates(spec)?;
    if source_shannon_entropy(&spec.source_t) <= r.conditional_rate + TOL_ORDER {
        return Err(Error::PhaseMismatch {
            expected: Phase::Paramagnetic.as_str(),
            found: Phase::Ordered.as_str(),
        });
    }
    Ok(r.user_rate)
}

/// Exact per-symbol information quantities of one pair of codebooks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MacOracleReport {
    pub n_source: usize,
    pub n_channel: usize,
    pub seed: u64,
    pub h_s: f64,
    pub h_t: f64,
    /// `(H(S) - H(S|Y)) / N`.
    pub mi_s: f64,
    /// `(H(Y|S) - H(Y|S,T)) / N`.
    pub mi_t_given_s: f64,
    /// `(H(S,T) - H(S,T|Y)) / N`.
    pub mi_joint: f64,
}

pub fn mac_oracle(spec: &MacSpec, n_source: usize, seed: u64) -> Result<MacOracleReport> {
    mac_oracle_with_budget(spec, n_source, seed, DEFAULT_BUDGET)
}

/// Draws both codebooks (the `S` codebook from the same streams as
/// [`crate::oracle::draw_code`]) and enumerates every message pair and output
/// string; the budget bounds `|S|^N |T|^N |Y|^n`.
pub fn mac_oracle_with_budget(
    spec: &MacSpec,
    n_source: usize,
    seed: u64,
    budget: u64,
) -> Result<MacOracleReport> {
    if n_source == 0 {
        return Err(Error::spec("block_length", "must be positive"));
    }
    let n = spec
        .lambda
        .channel_len(n_source)
        .ok_or_else(|| Error::spec("block_length", "lambda N is not an integer"))?;
    let ny = spec.out_size();
    let (ks, kt) = (
        checked_pow(spec.source_s.alphabet_size(), n_source),
        checked_pow(spec.source_t.alphabet_size(), n_source),
    );
    let required = ks
        .zip(kt)
        .and_then(|(a, b)| a.checked_mul(b))
        .and_then(|k| checked_pow(ny, n).and_then(|o| o.checked_mul(k)));
    check_budget(required, budget)?;
    let (ks, kt) = (ks.unwrap() as usize, kt.unwrap() as usize);
    let code_s = draw_letters(seed, TAG_CODEBOOK, ks, n, spec.ensemble_s.probabilities());
    let code_t = draw_letters(seed, TAG_CODEBOOK_T, kt, n, spec.ensemble_t.probabilities());
    let lp_s = block_log_probs(&spec.source_s, n_source);
    let lp_t = block_log_probs(&spec.source_t, n_source);

    let log_w = spec.flat_channel()?.log_transition();
    let nxt = spec.in_sizes().1;
    let log_w_max = log_w.iter().flatten().copied().fold(NEG_INF, f64::max);
    // ln W(y|x) - ln W_max <= 0, so partial sums stay finite or -inf
    let rel: Vec<Vec<f64>> = log_w
        .iter()
        .map(|r| r.iter().map(|l| l - log_w_max).collect())
        .collect();
    let k = ks * kt;
    let pair_letter = |i: usize, pair: usize| {
        let (s, t) = (pair / kt, pair % kt);
        code_s[s * n + i] as usize * nxt + code_t[t * n + i] as usize
    };

    let mut levels = vec![vec![0.0; k]; n + 1];
    let mut digits = vec![0usize; n];
    let mut start = 0;
    let (mut h_st_y, mut h_s_y, mut h_y_s) = (0.0, 0.0, 0.0);
    let mut ws = vec![0.0; ks];
    loop {
        for d in start..n {
            let (lo, hi) = levels.split_at_mut(d + 1);
            for (pair, v) in hi[0].iter_mut().enumerate() {
                *v = lo[d][pair] + rel[pair_letter(d, pair)][digits[d]];
            }
        }
        let l: Vec<f64> = (0..k)
            .map(|p| lp_s[p / kt] + lp_t[p % kt] + levels[n][p])
            .collect();
        let top = l.iter().copied().fold(NEG_INF, f64::max);
        if top > NEG_INF {
            let shift = top + n as f64 * log_w_max;
            let (mut z, mut a) = (0.0, 0.0);
            ws.fill(0.0);
            for (p, &lv) in l.iter().enumerate() {
                if lv == NEG_INF {
                    continue;
                }
                let w = (lv - top).exp();
                z += w;
                a += w * (lv - top);
                ws[p / kt] += w;
            }
            let py = (shift + z.ln()).exp();
            h_st_y += py * (z.ln() - a / z);
            let mut hs = 0.0;
            for (s, &w) in ws.iter().enumerate() {
                if w > 0.0 {
                    hs -= w / z * (w / z).ln();
                    // P(y, s) ln P(y|s)
                    h_y_s -= w * shift.exp() * (w.ln() + shift - lp_s[s]);
                }
            }
            h_s_y += py * hs;
        }
        let mut d = n;
        loop {
            if d == 0 {
                let nf = n_source as f64;
                let (h_s, h_t) = (
                    source_shannon_entropy(&spec.source_s),
                    source_shannon_entropy(&spec.source_t),
                );
                let h_y_st =
                    conditional_output_entropy(&log_w, k, n, &pair_letter, &lp_s, &lp_t, kt);
                return Ok(MacOracleReport {
                    n_source,
                    n_channel: n,
                    seed,
                    h_s,
                    h_t,
                    mi_s: h_s - h_s_y / nf,
                    mi_t_given_s: (h_y_s - h_y_st) / nf,
                    mi_joint: h_s + h_t - h_st_y / nf,
                });
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

/// `H(Y|S,T) = sum_{s,t} P(s) P(t) sum_i H(W(.|x_S,i(s), x_T,i(t)))`.
fn conditional_output_entropy(
    log_w: &[Vec<f64>],
    k: usize,
    n: usize,
    pair_letter: &dyn Fn(usize, usize) -> usize,
    lp_s: &[f64],
    lp_t: &[f64],
    kt: usize,
) -> f64 {
    let row: Vec<f64> = log_w
        .iter()
        .map(|r| {
            r.iter()
                .filter(|l| l.is_finite())
                .map(|&l| -l.exp() * l)
                .sum()
        })
        .collect();
    (0..k)
        .map(|p| {
            let h: f64 = (0..n).map(|i| row[pair_letter(i, p)]).sum();
            (lp_s[p / kt] + lp_t[p % kt]).exp() * h
        })
        .sum()
}

/// `ln P(s)` for every block, digits least significant first.
fn block_log_probs(source: &SourceSpec, n: usize) -> Vec<f64> {
    let lp1 = source.log_probabilities();
    let mut lp = vec![0.0];
    for _ in 0..n {
        lp = lp1
            .iter()
            .flat_map(|a| lp.iter().map(move |b| a + b))
            .collect();
    }
    lp
}
