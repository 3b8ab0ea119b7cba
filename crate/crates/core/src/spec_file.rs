//! JSON system descriptions, as read by the command-line tool.
//!
//! ```json
//! {
//!   "binary_source": {"q": 0.5},
//!   "bsc": {"p": 0.1},
//!   "ensemble": {"m": [0.5, 0.5]},
//!   "lambda": {"num": 1, "den": 1}
//! }
//! ```
//!
//! Exactly one of `source` / `binary_source` / `uniform_source` and, unless a
//! `mac` block replaces it, one of `channel` / `bsc` / `transition` must be
//! given. Infinite channel energies are written as `null`.

use serde::{Deserialize, Serialize};

use crate::apps::{MacSpec, WiretapSpec};
use crate::ensemble::{
    source_shannon_entropy, ChannelSpec, EnsembleSpec, Lambda, SourceSpec, SystemSpec,
};
use crate::error::{Error, Result};

/// Sweepable fields, by their dotted names.
pub const AXES: [&str; 5] = ["bsc.p", "binary_source.q", "ensemble.m", "lambda", "beta"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceJson {
    pub hamiltonian: Vec<f64>,
    #[serde(default = "one")]
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelJson {
    pub hamiltonian: Vec<Vec<Option<f64>>>,
    #[serde(default = "one")]
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinarySourceJson {
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformSourceJson {
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BscJson {
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleJson {
    pub m: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaJson {
    pub num: u32,
    #[serde(default = "one_u32")]
    pub den: u32,
}

/// Any of the three ways of writing a channel, for the wiretap block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnyChannelJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bsc: Option<BscJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WiretapJson {
    pub main: AnyChannelJson,
    pub tap: AnyChannelJson,
    /// Defaults to the Shannon entropy of the file's source.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_entropy: Option<f64>,
    /// Code rate in nats per channel use for the equivocation bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinaryAdditiveJson {
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacJson {
    pub source_t: SourceJson,
    pub ensemble_t: EnsembleJson,
    /// `channel3[x_s][x_t][y]`, `null` for impossible outputs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel3: Option<Vec<Vec<Vec<Option<f64>>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binary_additive: Option<BinaryAdditiveJson>,
    #[serde(default = "one")]
    pub beta: f64,
}

/// A parsed system file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binary_source: Option<BinarySourceJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform_source: Option<UniformSourceJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bsc: Option<BscJson>,
    /// Transition matrix `W[x][y]`, read at `beta = 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transition: Option<Vec<Vec<f64>>>,
    pub ensemble: EnsembleJson,
    pub lambda: LambdaJson,
    /// Re-evaluates the whole system at this inverse temperature.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wiretap: Option<WiretapJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mac: Option<MacJson>,
}

fn one() -> f64 {
    1.0
}

fn one_u32() -> u32 {
    1
}

fn energies(rows: &[Vec<Option<f64>>]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| r.iter().map(|e| e.unwrap_or(f64::INFINITY)).collect())
        .collect()
}

fn channel_from(
    field: &str,
    channel: &Option<ChannelJson>,
    bsc: &Option<BscJson>,
    transition: &Option<Vec<Vec<f64>>>,
) -> Result<ChannelSpec> {
    match (channel, bsc, transition) {
        (Some(c), None, None) => ChannelSpec::new(energies(&c.hamiltonian), c.beta),
        (None, Some(b), None) => ChannelSpec::bsc(b.p),
        (None, None, Some(w)) => ChannelSpec::from_transition(w, 1.0),
        (None, None, None) => Err(Error::spec(
            field,
            "missing: give one of channel, bsc or transition",
        )),
        _ => Err(Error::spec(
            field,
            "give only one of channel, bsc or transition",
        )),
    }
}

impl SpecFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let field = msg
                .split('`')
                .nth(1)
                .filter(|_| msg.starts_with("missing field") || msg.starts_with("unknown field"))
                .unwrap_or("json")
                .to_string();
            Error::Spec {
                field,
                message: msg,
            }
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serialises")
    }

    pub fn source_spec(&self) -> Result<SourceSpec> {
        match (&self.source, &self.binary_source, &self.uniform_source) {
            (Some(s), None, None) => SourceSpec::new(s.hamiltonian.clone(), s.beta),
            (None, Some(b), None) => SourceSpec::binary(b.q),
            (None, None, Some(u)) => SourceSpec::uniform(u.k),
            (None, None, None) => Err(Error::spec(
                "source",
                "missing: give one of source, binary_source or uniform_source",
            )),
            _ => Err(Error::spec(
                "source",
                "give only one of source, binary_source or uniform_source",
            )),
        }
    }

    pub fn channel_spec(&self) -> Result<ChannelSpec> {
        channel_from("channel", &self.channel, &self.bsc, &self.transition)
    }

    pub fn ensemble_spec(&self) -> Result<EnsembleSpec> {
        EnsembleSpec::new(self.ensemble.m.clone())
    }

    pub fn lambda_value(&self) -> Result<Lambda> {
        Lambda::new(self.lambda.num, self.lambda.den)
    }

    pub fn system(&self) -> Result<SystemSpec> {
        let mut sys = SystemSpec::new(
            self.source_spec()?,
            self.channel_spec()?,
            self.ensemble_spec()?,
            self.lambda_value()?,
        )?;
        if let Some(b) = self.beta {
            sys = sys.with_beta(b)?;
        }
        if let Some(g) = self.grid {
            sys = sys.with_grid(g);
        }
        Ok(sys)
    }

    /// The wiretap block and its optional code rate.
    pub fn wiretap(&self) -> Result<(WiretapSpec, Option<f64>)> {
        let w = self
            .wiretap
            .as_ref()
            .ok_or_else(|| Error::spec("wiretap", "missing"))?;
        let main = channel_from("wiretap.main", &w.main.channel, &w.main.bsc, &w.main.transition)?;
        let tap = channel_from("wiretap.tap", &w.tap.channel, &w.tap.bsc, &w.tap.transition)?;
        let h = match w.source_entropy {
            Some(h) => h,
            None => source_shannon_entropy(&self.source_spec()?),
        };
        Ok((WiretapSpec::new(main, tap, self.lambda_value()?, h)?, w.code_rate))
    }

    pub fn mac(&self) -> Result<MacSpec> {
        let m = self
            .mac
            .as_ref()
            .ok_or_else(|| Error::spec("mac", "missing"))?;
        let source_s = self.source_spec()?;
        let source_t = SourceSpec::new(m.source_t.hamiltonian.clone(), m.source_t.beta)?;
        let ensemble_t = EnsembleSpec::new(m.ensemble_t.m.clone())?;
        let lambda = self.lambda_value()?;
        let spec = match (&m.channel3, &m.binary_additive) {
            (Some(h), None) => MacSpec::new(
                source_s,
                source_t,
                self.ensemble_spec()?,
                ensemble_t,
                h.iter().map(|plane| energies(plane)).collect(),
                m.beta,
                lambda,
            )?,
            (None, Some(b)) => {
                let base = MacSpec::binary_additive(0.5, 0.5, b.p, lambda)?;
                MacSpec::new(
                    source_s,
                    source_t,
                    self.ensemble_spec()?,
                    ensemble_t,
                    base.hamiltonian().to_vec(),
                    base.beta(),
                    lambda,
                )?
            }
            (None, None) => {
                return Err(Error::spec(
                    "mac",
                    "missing: give one of channel3 or binary_additive",
                ))
            }
            _ => {
                return Err(Error::spec(
                    "mac",
                    "give only one of channel3 or binary_additive",
                ))
            }
        };
        Ok(match self.grid {
            Some(g) => spec.with_grid(g),
            None => spec,
        })
    }

    /// A copy with the named field set to `value`.
    pub fn with_axis(&self, axis: &str, value: f64) -> Result<Self> {
        let mut s = self.clone();
        let needs = |what: &str| Error::spec("axis", format!("{axis} needs a {what} block"));
        match axis {
            "bsc.p" => s.bsc.as_mut().ok_or_else(|| needs("bsc"))?.p = value,
            "binary_source.q" => {
                s.binary_source
                    .as_mut()
                    .ok_or_else(|| needs("binary_source"))?
                    .q = value
            }
            "ensemble.m" => {
                if s.ensemble.m.len() != 2 {
                    return Err(Error::spec("axis", "ensemble.m needs a binary ensemble"));
                }
                s.ensemble.m = vec![1.0 - value, value];
            }
            "lambda" => {
                let l = Lambda::approximate(value)?;
                s.lambda = LambdaJson {
                    num: l.num,
                    den: l.den,
                };
            }
            "beta" => s.beta = Some(value),
            _ => {
                return Err(Error::spec(
                    "axis",
                    format!("unknown axis {axis}; expected one of {}", AXES.join(", ")),
                ))
            }
        }
        Ok(s)
    }
}
