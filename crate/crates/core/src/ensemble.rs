//! Memoryless sources, discrete memoryless channels and i.i.d. random-coding
//! ensembles, with their per-letter thermodynamic functions.
//!
//! A [`SystemSpec`] stores its source and channel in canonical form at a
//! single inverse temperature `beta` (the channel's): source energies are
//! rescaled to that `beta` and measured from the ground state, and channel
//! energies are replaced by `-(1/beta) ln W(y|x)` shifted so the smallest
//! finite value is zero. Both changes leave `P(s)` and `W(y|x)` untouched.

use crate::error::{Error, Result};
use crate::info;
use crate::thermo::{ConcaveFunction, MixtureLogMgf, DEFAULT_GRID, NEG_INF};

pub use crate::info::binary_convolution;

fn log_sum_exp(xs: impl IntoIterator<Item = f64> + Clone) -> f64 {
    let top = xs.clone().into_iter().fold(NEG_INF, f64::max);
    if top == NEG_INF {
        return NEG_INF;
    }
    top + xs.into_iter().map(|x| (x - top).exp()).sum::<f64>().ln()
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "beta",
            value: beta,
        })
    }
}

fn check_temperature(kt: f64) -> Result<()> {
    if kt > 0.0 && kt.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTemperature(kt))
    }
}

fn check_open_unit(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value })
    }
}

/// Crossover probability `p = 1 / (1 + exp(e0/kT))` of a two-level energy gap.
pub fn crossover_from_energy(e0: f64, kt: f64) -> Result<f64> {
    check_temperature(kt)?;
    Ok(1.0 / (1.0 + (e0 / kt).exp()))
}

/// Bias `q = 1 / (1 + exp(-2B/kT))` of a spin in field `B`.
pub fn bias_from_field(b: f64, kt: f64) -> Result<f64> {
    check_temperature(kt)?;
    Ok(1.0 / (1.0 + (-2.0 * b / kt).exp()))
}

/// Energy gap `e0 = kT ln((1 - p)/p)`.
pub fn energy_from_crossover(p: f64, kt: f64) -> Result<f64> {
    check_temperature(kt)?;
    check_open_unit("p", p)?;
    Ok(kt * ((1.0 - p) / p).ln())
}

/// Field `B = (kT/2) ln(q/(1 - q))`.
pub fn field_from_bias(q: f64, kt: f64) -> Result<f64> {
    check_temperature(kt)?;
    check_open_unit("q", q)?;
    Ok(0.5 * kt * (q / (1.0 - q)).ln())
}

/// Channel uses per source symbol, `lambda = num / den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lambda {
    pub num: u32,
    pub den: u32,
}

impl Lambda {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(Error::spec(
                "lambda",
                "numerator and denominator must be positive",
            ));
        }
        let g = gcd(num, den);
        Ok(Lambda {
            num: num / g,
            den: den / g,
        })
    }

    pub fn integer(n: u32) -> Self {
        Lambda {
            num: n.max(1),
            den: 1,
        }
    }

    /// Nearest fraction with denominator 1000.
    pub fn approximate(x: f64) -> Result<Self> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::OutOfRange {
                name: "lambda",
                value: x,
            });
        }
        let num = (x * 1000.0).round().max(1.0) as u32;
        Lambda::new(num, 1000)
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `n = lambda N` when it is an integer.
    pub fn channel_len(&self, n_source: usize) -> Option<usize> {
        let total = n_source as u64 * self.num as u64;
        total.is_multiple_of(self.den as u64).then(|| (total / self.den as u64) as usize)
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Memoryless source with `P(s) ∝ exp(-beta E_S(s))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceSpec {
    hamiltonian: Vec<f64>,
    beta: f64,
}

impl SourceSpec {
    pub fn new(hamiltonian: Vec<f64>, beta: f64) -> Result<Self> {
        if hamiltonian.len() < 2 {
            return Err(Error::spec("source.hamiltonian", "need at least 2 symbols"));
        }
        if let Some(i) = hamiltonian.iter().position(|e| !e.is_finite()) {
            return Err(Error::spec(
                format!("source.hamiltonian[{i}]"),
                "source energies must be finite",
            ));
        }
        check_beta(beta)?;
        Ok(SourceSpec { hamiltonian, beta })
    }

    /// Binary spin source with `P(+1) = q`: energies `[+B, -B]` for the
    /// symbols `[-1, +1]` at `beta = 1`.
    pub fn binary(q: f64) -> Result<Self> {
        let b = field_from_bias(q, 1.0)?;
        SourceSpec::new(vec![b, -b], 1.0)
    }

    /// Uniform source over `k` symbols.
    pub fn uniform(k: usize) -> Result<Self> {
        SourceSpec::new(vec![0.0; k], 1.0)
    }

    pub fn hamiltonian(&self) -> &[f64] {
        &self.hamiltonian
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alphabet_size(&self) -> usize {
        self.hamiltonian.len()
    }

    /// Energies measured from the ground state.
    pub fn normalized_energies(&self) -> Vec<f64> {
        let min = self
            .hamiltonian
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        self.hamiltonian.iter().map(|e| e - min).collect()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let e = self.normalized_energies();
        let lz = log_sum_exp(e.iter().map(|x| -self.beta * x));
        e.iter().map(|x| (-self.beta * x - lz).exp()).collect()
    }

    pub fn log_probabilities(&self) -> Vec<f64> {
        let e = self.normalized_energies();
        let lz = log_sum_exp(e.iter().map(|x| -self.beta * x));
        e.iter().map(|x| -self.beta * x - lz).collect()
    }

    fn log_mgf(&self) -> MixtureLogMgf {
        let terms = self
            .normalized_energies()
            .into_iter()
            .map(|e| (0.0, e))
            .collect();
        MixtureLogMgf::new([(1.0, terms)]).expect("source energies are finite")
    }
}

/// `psi_S(beta) = ln sum_s exp(-beta E_S(s))` with the energies as supplied.
pub fn source_log_partition(source: &SourceSpec, beta: f64) -> f64 {
    log_sum_exp(source.hamiltonian.iter().map(|e| -beta * e))
}

/// Microcanonical entropy `Sigma_S(e)` over the ground-state-relative energy
/// range `[0, max E_S - min E_S]`.
pub fn source_entropy_function(source: &SourceSpec) -> Result<ConcaveFunction> {
    source_entropy_function_on(source, DEFAULT_GRID)
}

pub fn source_entropy_function_on(source: &SourceSpec, grid: usize) -> Result<ConcaveFunction> {
    source.log_mgf().tabulate_conjugate(grid)
}

/// `H(S) = -sum P ln P` per symbol.
pub fn source_shannon_entropy(source: &SourceSpec) -> f64 {
    source
        .log_probabilities()
        .iter()
        .filter(|l| l.is_finite())
        .map(|&l| -l.exp() * l)
        .sum()
}

/// Mean ground-state-relative energy `-psi_S'(beta)` under `P_beta`.
pub fn source_mean_energy(source: &SourceSpec, beta: f64) -> f64 {
    source.log_mgf().mean(beta)
}

/// Discrete memoryless channel with `W(y|x) ∝ exp(-beta E_C(x,y))`;
/// `+inf` energies mark impossible transitions.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    hamiltonian: Vec<Vec<f64>>,
    beta: f64,
}

impl ChannelSpec {
    pub fn new(hamiltonian: Vec<Vec<f64>>, beta: f64) -> Result<Self> {
        let out = hamiltonian.first().map_or(0, Vec::len);
        if hamiltonian.is_empty() || out == 0 {
            return Err(Error::spec("channel.hamiltonian", "empty matrix"));
        }
        for (x, row) in hamiltonian.iter().enumerate() {
            if row.len() != out {
                return Err(Error::spec(
                    format!("channel.hamiltonian[{x}]"),
                    format!("row has {} entries, expected {out}", row.len()),
                ));
            }
            if row.iter().any(|e| e.is_nan() || *e == NEG_INF) {
                return Err(Error::spec(
                    format!("channel.hamiltonian[{x}]"),
                    "energies must be finite or +inf",
                ));
            }
            if row.iter().all(|e| e.is_infinite()) {
                return Err(Error::spec(
                    format!("channel.hamiltonian[{x}]"),
                    "every input needs at least one reachable output",
                ));
            }
        }
        check_beta(beta)?;
        Ok(ChannelSpec { hamiltonian, beta })
    }

    /// Binary symmetric channel with crossover `p`: Hamming energies scaled by
    /// `e0 = ln((1 - p)/p)` at `beta = 1`. The endpoints `p = 0, 1` give the
    /// deterministic identity and flip.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::OutOfRange {
                name: "p",
                value: p,
            });
        }
        let inf = f64::INFINITY;
        let h = if p == 0.0 {
            vec![vec![0.0, inf], vec![inf, 0.0]]
        } else if p == 1.0 {
            vec![vec![inf, 0.0], vec![0.0, inf]]
        } else {
            let e0 = energy_from_crossover(p, 1.0)?;
            vec![vec![0.0, e0], vec![e0, 0.0]]
        };
        ChannelSpec::new(h, 1.0)
    }

    /// Noiseless channel on `k` letters.
    pub fn identity(k: usize) -> Result<Self> {
        let h = (0..k)
            .map(|x| {
                (0..k)
                    .map(|y| if x == y { 0.0 } else { f64::INFINITY })
                    .collect()
            })
            .collect();
        ChannelSpec::new(h, 1.0)
    }

    /// Channel with the given transition matrix, energies `-(1/beta) ln W`.
    pub fn from_transition(w: &[Vec<f64>], beta: f64) -> Result<Self> {
        check_beta(beta)?;
        for (x, row) in w.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if row.iter().any(|v| !(*v >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
                return Err(Error::spec(
                    format!("transition[{x}]"),
                    "rows must be probability vectors",
                ));
            }
        }
        let h = w
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&v| {
                        if v > 0.0 {
                            -v.ln() / beta
                        } else {
                            f64::INFINITY
                        }
                    })
                    .collect()
            })
            .collect();
        ChannelSpec::new(h, beta)
    }

    pub fn hamiltonian(&self) -> &[Vec<f64>] {
        &self.hamiltonian
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn in_size(&self) -> usize {
        self.hamiltonian.len()
    }

    pub fn out_size(&self) -> usize {
        self.hamiltonian[0].len()
    }

    pub fn log_transition(&self) -> Vec<Vec<f64>> {
        self.hamiltonian
            .iter()
            .map(|row| {
                let lz = log_sum_exp(row.iter().map(|e| -self.beta * e));
                row.iter().map(|e| -self.beta * e - lz).collect()
            })
            .collect()
    }

    pub fn transition(&self) -> Vec<Vec<f64>> {
        self.log_transition()
            .into_iter()
            .map(|row| row.into_iter().map(f64::exp).collect())
            .collect()
    }

    /// `-(1/beta) ln W(y|x)` shifted so that the smallest finite entry is 0.
    pub fn effective_energies(&self) -> Vec<Vec<f64>> {
        let lw = self.log_transition();
        let max_lw = lw.iter().flatten().copied().fold(NEG_INF, f64::max);
        lw.iter()
            .map(|row| {
                row.iter()
                    .map(|&l| {
                        if l == NEG_INF {
                            f64::INFINITY
                        } else {
                            (max_lw - l) / self.beta
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// I.i.d. random-coding distribution `M(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSpec {
    m: Vec<f64>,
}

impl EnsembleSpec {
    /// Accepts a probability vector (sum within `1e-9` of one), renormalised.
    pub fn new(m: Vec<f64>) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::spec("ensemble.m", "empty distribution"));
        }
        if let Some(i) = m.iter().position(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::spec(
                format!("ensemble.m[{i}]"),
                "must be a nonnegative number",
            ));
        }
        let sum: f64 = m.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::spec(
                "ensemble.m",
                format!("sums to {sum}, expected 1"),
            ));
        }
        Ok(EnsembleSpec {
            m: m.iter().map(|v| v / sum).collect(),
        })
    }

    /// `M = (1 - m, m)` on a binary input alphabet.
    pub fn bernoulli(m: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&m) {
            return Err(Error::OutOfRange {
                name: "m",
                value: m,
            });
        }
        Ok(EnsembleSpec {
            m: vec![1.0 - m, m],
        })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        EnsembleSpec::new(vec![1.0 / k as f64; k])
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.m
    }
}

/// Source, channel, ensemble and bandwidth expansion, in canonical form.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    source: SourceSpec,
    channel: ChannelSpec,
    ensemble: EnsembleSpec,
    lambda: Lambda,
    grid: usize,
}

impl SystemSpec {
    pub fn new(
        source: SourceSpec,
        channel: ChannelSpec,
        ensemble: EnsembleSpec,
        lambda: Lambda,
    ) -> Result<Self> {
        if ensemble.m.len() != channel.in_size() {
            return Err(Error::spec(
                "ensemble.m",
                format!(
                    "has {} entries but the channel has {} inputs",
                    ensemble.m.len(),
                    channel.in_size()
                ),
            ));
        }
        let beta = channel.beta;
        let scale = source.beta / beta;
        let source = SourceSpec {
            hamiltonian: source
                .normalized_energies()
                .iter()
                .map(|e| e * scale)
                .collect(),
            beta,
        };
        let channel = ChannelSpec {
            hamiltonian: channel.effective_energies(),
            beta,
        };
        Ok(SystemSpec {
            source,
            channel,
            ensemble,
            lambda,
            grid: DEFAULT_GRID,
        })
    }

    /// The same Hamiltonians at inverse temperature `beta`.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        check_beta(beta)?;
        let mut s = SystemSpec::new(
            SourceSpec::new(self.source.hamiltonian.clone(), beta)?,
            ChannelSpec::new(self.channel.hamiltonian.clone(), beta)?,
            self.ensemble.clone(),
            self.lambda,
        )?;
        s.grid = self.grid;
        Ok(s)
    }

    /// Number of grid points used for every tabulated function.
    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid.max(3);
        self
    }

    pub fn with_lambda(mut self, lambda: Lambda) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn source(&self) -> &SourceSpec {
        &self.source
    }

    pub fn channel(&self) -> &ChannelSpec {
        &self.channel
    }

    pub fn ensemble(&self) -> &EnsembleSpec {
        &self.ensemble
    }

    pub fn lambda(&self) -> Lambda {
        self.lambda
    }

    pub fn beta(&self) -> f64 {
        self.channel.beta
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    /// Quenched log-MGF of the channel energy: one group per output letter,
    /// weighted by its marginal probability.
    pub fn channel_log_mgf(&self) -> Result<MixtureLogMgf> {
        let q = output_marginal(&self.ensemble, &self.channel);
        let m = &self.ensemble.m;
        let e = &self.channel.hamiltonian;
        let groups: Vec<(f64, Vec<(f64, f64)>)> = q
            .iter()
            .enumerate()
            .map(|(y, &qy)| {
                let terms = m
                    .iter()
                    .zip(e)
                    .filter(|(mx, _)| **mx > 0.0)
                    .map(|(mx, row)| (mx.ln(), row[y]))
                    .collect();
                (qy, terms)
            })
            .collect();
        for (y, (qy, terms)) in groups.iter().enumerate() {
            let live = terms.iter().any(|t: &(f64, f64)| t.1.is_finite());
            if *qy > 0.0 && !live {
                return Err(Error::IncompatibleSupport { output: y });
            }
        }
        MixtureLogMgf::new(groups).ok_or(Error::IncompatibleSupport { output: 0 })
    }

    pub(crate) fn source_log_mgf(&self) -> MixtureLogMgf {
        self.source.log_mgf()
    }
}

/// `Q(y) = sum_x M(x) W(y|x)`.
pub fn output_marginal(ensemble: &EnsembleSpec, channel: &ChannelSpec) -> Vec<f64> {
    info::output_law(&ensemble.m, &channel.transition())
}

/// `zeta(t) = sum_y Q(y) ln sum_x M(x) exp(-t E_C(x,y))`.
pub fn zeta(system: &SystemSpec, t: f64) -> Result<f64> {
    Ok(system.channel_log_mgf()?.value(t))
}

/// `-zeta'(beta)`, the dominant per-letter channel energy.
pub fn zeta_prime_neg(system: &SystemSpec, beta: f64) -> Result<f64> {
    Ok(system.channel_log_mgf()?.mean(beta))
}

/// Rate function `phi(e) = inf_t [zeta(t) + e t]`, `NEG_INF` outside the
/// reachable energy range.
pub fn channel_phi(system: &SystemSpec) -> Result<ConcaveFunction> {
    system.channel_log_mgf()?.tabulate_conjugate(system.grid)
}

/// Exact (untabulated) value of the channel rate function.
pub fn channel_phi_at(system: &SystemSpec, e: f64) -> Result<f64> {
    Ok(system.channel_log_mgf()?.conjugate(e).value)
}

/// Exact value of the source entropy function at a ground-state-relative
/// energy.
pub fn source_entropy_at(source: &SourceSpec, e: f64) -> f64 {
    source.log_mgf().conjugate(e).value
}
