//! Total entropy of the posterior's erroneous configurations, phase
//! classification and the asymptotic mutual-information rate.

use serde::{Deserialize, Serialize};

use crate::ensemble::{source_shannon_entropy, SystemSpec};
use crate::error::{Error, Result};
use crate::thermo::{
    clip_nonnegative, concave_envelope, sup_convolution_table, ConcaveFunction, MixtureLogMgf,
    TabulatedFunction, NEG_INF,
};

/// Clip-boundary tolerance for the glassy test, in nats.
pub const TOL_ZERO: f64 = 1e-6;
/// Slack when comparing the correct-codeword exponent with `psi(beta)`.
pub const TOL_ORDER: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Ordered,
    Paramagnetic,
    Glassy,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Ordered => "Ordered",
            Phase::Paramagnetic => "Paramagnetic",
            Phase::Glassy => "Glassy",
        }
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseReport {
    pub phase: Phase,
    /// Dominant total per-particle energy.
    pub epsilon0: f64,
    /// Source share `epsilon_S(beta)`.
    pub epsilon_star: f64,
    /// `((1 + lambda) epsilon0 - epsilon_star) / lambda`.
    pub channel_share: f64,
    /// Nats per source symbol.
    pub mi_rate: f64,
    pub source_entropy: f64,
    /// `Sigma(epsilon0)`; `NEG_INF` when `epsilon0` lies in the clipped region.
    pub sigma_at_eps0: f64,
}

/// Every tabulated and exact ingredient of the analysis at one temperature.
#[derive(Debug, Clone)]
pub struct Analysis {
    system: SystemSpec,
    source_mgf: MixtureLogMgf,
    channel_mgf: MixtureLogMgf,
    sigma_s: ConcaveFunction,
    phi: ConcaveFunction,
    sigma0: ConcaveFunction,
    sigma: TabulatedFunction,
}

impl Analysis {
    /// Builds the analysis of `system` at inverse temperature `beta`.
    pub fn new(system: &SystemSpec, beta: f64) -> Result<Self> {
        let system = if beta == system.beta() {
            system.clone()
        } else {
            system.with_beta(beta)?
        };
        let source_mgf = system.source_log_mgf();
        let channel_mgf = system.channel_log_mgf()?;
        let grid = system.grid();
        let sigma_s = source_mgf.tabulate_conjugate(grid)?;
        let phi = channel_mgf.tabulate_conjugate(grid)?;
        let raw = sup_convolution_table(&sigma_s, &phi, system.lambda().value(), grid)?;
        let sigma0 = if raw.finite_count() >= 3 {
            concave_envelope(&raw)?
        } else {
            ConcaveFunction::new(raw)?
        };
        let sigma = clip_nonnegative(&sigma0);
        Ok(Analysis {
            system,
            source_mgf,
            channel_mgf,
            sigma_s,
            phi,
            sigma0,
            sigma,
        })
    }

    pub fn system(&self) -> &SystemSpec {
        &self.system
    }

    pub fn beta(&self) -> f64 {
        self.system.beta()
    }

    fn lambda(&self) -> f64 {
        self.system.lambda().value()
    }

    pub fn source_entropy_function(&self) -> &ConcaveFunction {
        &self.sigma_s
    }

    pub fn channel_phi(&self) -> &ConcaveFunction {
        &self.phi
    }

    /// Weighted supremal convolution before clipping.
    pub fn sigma0(&self) -> &ConcaveFunction {
        &self.sigma0
    }

    /// Total entropy after clipping negative values.
    pub fn total_entropy(&self) -> &TabulatedFunction {
        &self.sigma
    }

    /// `epsilon_S(beta)`, the mean ground-state-relative source energy.
    pub fn source_energy(&self) -> f64 {
        self.source_mgf.mean(self.beta())
    }

    /// `-zeta'(beta)`.
    pub fn channel_energy(&self) -> f64 {
        self.channel_mgf.mean(self.beta())
    }

    /// `psi_S(beta)` for the ground-state-relative energies.
    pub fn source_log_partition(&self) -> f64 {
        self.source_mgf.value(self.beta())
    }

    /// Exact `Sigma_S(e)`.
    pub fn sigma_s_at(&self, e: f64) -> f64 {
        self.source_mgf.conjugate(e).value
    }

    /// Exact `phi(e)`.
    pub fn phi_at(&self, e: f64) -> f64 {
        self.channel_mgf.conjugate(e).value
    }

    /// Grid argmax of `Sigma(e) - beta e` and its value `psi(beta)`, or
    /// `None` when the clipped entropy is empty.
    pub fn dominant(&self) -> Option<(f64, f64)> {
        let beta = self.beta();
        let mut best: Option<(f64, f64)> = None;
        for (_, x, v) in self.sigma.finite_points() {
            let s = v - beta * x;
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((x, s));
            }
        }
        best
    }

    /// Whether the grid argmax sits on the last finite point before a
    /// clipped region.
    fn at_clip_edge(&self, eps0: f64) -> bool {
        let Some((first, last)) = self.sigma.finite_support() else {
            return false;
        };
        let base = self.sigma0.base();
        let clipped = |i: Option<usize>| {
            i.is_some_and(|i| i < base.grid_size() && base.value_at(i) > NEG_INF)
        };
        let h = self.sigma.step();
        ((eps0 - self.sigma.x_at(first)).abs() < 0.5 * h && clipped(first.checked_sub(1)))
            || ((eps0 - self.sigma.x_at(last)).abs() < 0.5 * h && clipped(Some(last + 1)))
    }

    pub fn phase(&self) -> Phase {
        let Some((eps0, psi)) = self.dominant() else {
            return Phase::Ordered;
        };
        let lambda = self.lambda();
        let analytic = (self.source_energy() + lambda * self.channel_energy()) / (1.0 + lambda);
        if -self.beta() * analytic >= psi - TOL_ORDER {
            return Phase::Ordered;
        }
        if self.sigma.eval(eps0) <= TOL_ZERO || self.at_clip_edge(eps0) {
            return Phase::Glassy;
        }
        Phase::Paramagnetic
    }

    fn paramagnetic_mi(&self) -> f64 {
        -self.lambda() * self.phi_at(self.channel_energy())
    }

    pub fn report(&self) -> PhaseReport {
        let phase = self.phase();
        let lambda = self.lambda();
        let h = source_shannon_entropy(self.system.source());
        let eps_s = self.source_energy();
        let epsilon0 = match (phase, self.dominant()) {
            (Phase::Ordered, _) | (_, None) => {
                (eps_s + lambda * self.channel_energy()) / (1.0 + lambda)
            }
            (_, Some((e, _))) => e,
        };
        let mi_rate = match phase {
            Phase::Paramagnetic => self.paramagnetic_mi().clamp(0.0, h),
            _ => h,
        };
        PhaseReport {
            phase,
            epsilon0,
            epsilon_star: eps_s,
            channel_share: ((1.0 + lambda) * epsilon0 - eps_s) / lambda,
            mi_rate,
            source_entropy: h,
            sigma_at_eps0: self.sigma.eval(epsilon0),
        }
    }

    fn require_paramagnetic(&self) -> Result<(f64, f64)> {
        let phase = self.phase();
        if phase != Phase::Paramagnetic {
            return Err(Error::PhaseMismatch {
                expected: Phase::Paramagnetic.as_str(),
                found: phase.as_str(),
            });
        }
        Ok(self
            .dominant()
            .expect("paramagnetic systems have a dominant energy"))
    }

    /// `(epsilon*, -zeta'(beta))`, checked against the grid dominant energy.
    pub fn energy_split(&self) -> Result<(f64, f64)> {
        let (eps0, _) = self.require_paramagnetic()?;
        let lambda = self.lambda();
        let (eps_s, eps_c) = (self.source_energy(), self.channel_energy());
        let tol = 3.0 * self.sigma.step() * (1.0 + lambda);
        let defect = ((1.0 + lambda) * eps0 - eps_s - lambda * eps_c).abs();
        if defect > tol {
            return Err(Error::Numerical(format!(
                "energy balance off by {defect:e} (tolerance {tol:e})"
            )));
        }
        Ok((eps_s, eps_c))
    }

    /// `beta e* + psi_S - Sigma_S(e*) - lambda phi(((1 + lambda) e0 - e*) / lambda)`
    /// with `e0` the grid dominant energy.
    pub fn mi_rate_alternative(&self) -> Result<f64> {
        let (eps0, _) = self.require_paramagnetic()?;
        let lambda = self.lambda();
        let eps_s = self.source_energy();
        let share = ((1.0 + lambda) * eps0 - eps_s) / lambda;
        Ok(self.beta() * eps_s + self.source_log_partition()
            - self.sigma_s_at(eps_s)
            - lambda * self.phi_at(share))
    }
}

/// Clipped total entropy `Sigma(e)` at the system's own temperature.
pub fn total_entropy(system: &SystemSpec) -> Result<TabulatedFunction> {
    Ok(Analysis::new(system, system.beta())?.sigma)
}

/// `(epsilon0, psi(beta))` from the grid argmax of `Sigma(e) - beta e`.
pub fn dominant_energy(system: &SystemSpec, beta: f64) -> Result<(f64, f64)> {
    Analysis::new(system, beta)?
        .dominant()
        .ok_or(Error::DegenerateFunction { finite: 0 })
}

pub fn classify_phase(system: &SystemSpec, beta: f64) -> Result<Phase> {
    Ok(Analysis::new(system, beta)?.phase())
}

/// Asymptotic mutual information per source symbol: `-lambda phi(-zeta'(beta))`
/// in the paramagnetic phase and `H(S)` otherwise.
pub fn mutual_information_rate(system: &SystemSpec, beta: f64) -> Result<f64> {
    Ok(Analysis::new(system, beta)?.report().mi_rate)
}

pub fn energy_split(system: &SystemSpec, beta: f64) -> Result<(f64, f64)> {
    Analysis::new(system, beta)?.energy_split()
}

pub fn mi_rate_alternative(system: &SystemSpec, beta: f64) -> Result<f64> {
    Analysis::new(system, beta)?.mi_rate_alternative()
}

/// Full report at the system's own temperature.
pub fn analyze(system: &SystemSpec) -> Result<PhaseReport> {
    Ok(Analysis::new(system, system.beta())?.report())
}
