//! Degraded wiretap channel: the rate/leakage tradeoff `Gamma(R)`, secrecy
//! capacity and the eavesdropper's equivocation under a random code.

use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{ChannelSpec, EnsembleSpec, Lambda, SourceSpec, SystemSpec};
use crate::error::{Error, Result};
use crate::info::{compose, entropy, mutual_information};
use crate::oracle::rng::{stream, unit, TAG_SIMPLEX};
use crate::phase::mutual_information_rate;

/// Default simplex grid resolution `K` (points `i / K`).
pub const DEFAULT_RESOLUTION: usize = 1000;
/// Bracket width at which the secrecy-capacity bisection stops.
pub const TOL_CAPACITY: f64 = 1e-12;

const RANDOM_STARTS: u64 = 4096;
const ASCENT_STARTS: usize = 8;

/// Main channel `W(y|x)` followed by the tap channel `W(z|y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WiretapSpec {
    main: ChannelSpec,
    tap: ChannelSpec,
    lambda: Lambda,
    source_entropy: f64,
}

impl WiretapSpec {
    pub fn new(
        main: ChannelSpec,
        tap: ChannelSpec,
        lambda: Lambda,
        source_entropy: f64,
    ) -> Result<Self> {
        if main.out_size() != tap.in_size() {
            return Err(Error::spec(
                "wiretap.tap",
                format!(
                    "has {} inputs but the main channel has {} outputs",
                    tap.in_size(),
                    main.out_size()
                ),
            ));
        }
        if !(source_entropy >= 0.0 && source_entropy.is_finite()) {
            return Err(Error::OutOfRange {
                name: "source_entropy",
                value: source_entropy,
            });
        }
        Ok(WiretapSpec {
            main,
            tap,
            lambda,
            source_entropy,
        })
    }

    pub fn main(&self) -> &ChannelSpec {
        &self.main
    }

    pub fn tap(&self) -> &ChannelSpec {
        &self.tap
    }

    pub fn lambda(&self) -> Lambda {
        self.lambda
    }

    pub fn source_entropy(&self) -> f64 {
        self.source_entropy
    }

    pub fn input_size(&self) -> usize {
        self.main.in_size()
    }

    /// `W(z|x) = sum_y W(y|x) W(z|y)`.
    pub fn cascade(&self) -> Vec<Vec<f64>> {
        compose(&self.main.transition(), &self.tap.transition())
    }
}

/// A maximiser of `I(X;Y) - I(X;Z)` under the rate constraint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaPoint {
    pub value: f64,
    pub input: Vec<f64>,
    pub mi_main: f64,
    pub mi_tap: f64,
    /// False when the input alphabet was too large for the exhaustive grid
    /// and the optimum comes from a local search.
    pub certified: bool,
}

#[derive(Debug, Clone)]
struct Candidate {
    input: Vec<f64>,
    mi_main: f64,
    mi_tap: f64,
}

impl Candidate {
    fn diff(&self) -> f64 {
        (self.mi_main - self.mi_tap).max(0.0)
    }
}

/// Precomputed candidate input laws, sorted by `I(X;Y)`, answering `Gamma(R)`
/// for any `R` by a binary search and a prefix maximum.
#[derive(Debug, Clone)]
pub struct GammaSolver {
    candidates: Vec<Candidate>,
    /// `best[i]` indexes the maximiser among `candidates[..=i]`.
    best: Vec<usize>,
    certified: bool,
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    a.partial_cmp(b) == Some(std::cmp::Ordering::Less)
}

impl GammaSolver {
    /// Exhaustive grid `i / resolution` on the simplex for up to three inputs,
    /// multi-start local ascent otherwise.
    pub fn new(spec: &WiretapSpec, resolution: usize) -> Result<Self> {
        if resolution == 0 {
            return Err(Error::spec("resolution", "must be positive"));
        }
        let w_main = spec.main.transition();
        let w_tap = spec.cascade();
        let eval = |input: Vec<f64>| Candidate {
            mi_main: mutual_information(&input, &w_main),
            mi_tap: mutual_information(&input, &w_tap),
            input,
        };
        let k = spec.input_size();
        let certified = k <= 3;
        let mut candidates: Vec<Candidate> = if certified {
            simplex_grid(k, resolution)
                .into_par_iter()
                .map(eval)
                .collect()
        } else {
            local_search(k, &eval)
        };
        candidates.sort_by(|a, b| {
            b.mi_main.total_cmp(&a.mi_main).then_with(|| {
                a.input
                    .partial_cmp(&b.input)
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        });
        let mut best = Vec::with_capacity(candidates.len());
        let mut top = 0;
        for (i, c) in candidates.iter().enumerate() {
            let b = &candidates[top];
            if c.diff() > b.diff() || (c.diff() == b.diff() && lex_less(&c.input, &b.input)) {
                top = i;
            }
            best.push(top);
        }
        Ok(GammaSolver {
            candidates,
            best,
            certified,
        })
    }

    /// Largest `I(X;Y)` among the candidates.
    pub fn max_rate(&self) -> f64 {
        self.candidates[0].mi_main
    }

    pub fn certified(&self) -> bool {
        self.certified
    }

    pub fn gamma(&self, rate: f64) -> Result<GammaPoint> {
        if !(rate >= 0.0) {
            return Err(Error::OutOfRange {
                name: "rate",
                value: rate,
            });
        }
        let feasible = self.candidates.partition_point(|c| c.mi_main >= rate);
        if feasible == 0 {
            return Err(Error::InfeasibleRate {
                rate,
                max: self.max_rate(),
            });
        }
        let c = &self.candidates[self.best[feasible - 1]];
        Ok(GammaPoint {
            value: c.diff(),
            input: c.input.clone(),
            mi_main: c.mi_main,
            mi_tap: c.mi_tap,
            certified: self.certified,
        })
    }

    /// Solution of `R = Gamma(R)` by bisection; zero when `Gamma(0) = 0`.
    ///
    /// `Gamma` is a step function of `R` on a finite candidate set; if the
    /// crossing falls on a jump the result is the jump location.
    pub fn secrecy_capacity(&self) -> f64 {
        let g = |r: f64| self.gamma(r).map_or(0.0, |p| p.value);
        if g(0.0) <= 0.0 {
            return 0.0;
        }
        let mut hi = self.max_rate();
        if g(hi) >= hi {
            return hi;
        }
        let mut lo = 0.0;
        while hi - lo > TOL_CAPACITY {
            let mid = 0.5 * (lo + hi);
            if g(mid) >= mid {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }
}

/// All points `c / resolution` of the `k`-simplex, lexicographic in `c`.
fn simplex_grid(k: usize, resolution: usize) -> Vec<Vec<f64>> {
    let r = resolution as f64;
    match k {
        1 => vec![vec![1.0]],
        2 => (0..=resolution)
            .map(|i| vec![i as f64 / r, (resolution - i) as f64 / r])
            .collect(),
        _ => (0..=resolution)
            .flat_map(|i| {
                (0..=resolution - i)
                    .map(move |j| vec![i as f64 / r, j as f64 / r, (resolution - i - j) as f64 / r])
            })
            .collect(),
    }
}

/// Vertices, the centre, pairwise midpoints, flat-Dirichlet draws and the
/// paths of pairwise mass-transfer ascents on `I(X;Y) - I(X;Z)` and `I(X;Y)`.
fn local_search(k: usize, eval: &(dyn Fn(Vec<f64>) -> Candidate + Sync)) -> Vec<Candidate> {
    let mut starts: Vec<Vec<f64>> = Vec::new();
    for i in 0..k {
        let mut v = vec![0.0; k];
        v[i] = 1.0;
        starts.push(v);
        for j in i + 1..k {
            let mut v = vec![0.0; k];
            v[i] = 0.5;
            v[j] = 0.5;
            starts.push(v);
        }
    }
    starts.push(vec![1.0 / k as f64; k]);
    starts.extend((0..RANDOM_STARTS).map(|i| {
        let mut rng = stream(0, TAG_SIMPLEX, i);
        let g: Vec<f64> = (0..k).map(|_| -(1.0 - unit(&mut rng)).ln()).collect();
        let s: f64 = g.iter().sum();
        g.into_iter().map(|x| x / s).collect()
    }));
    let mut cands: Vec<Candidate> = starts.into_par_iter().map(eval).collect();

    let objectives: [fn(&Candidate) -> f64; 2] = [Candidate::diff, |c| c.mi_main];
    let mut paths = Vec::new();
    for f in objectives {
        let mut order: Vec<usize> = (0..cands.len()).collect();
        order.sort_by(|&a, &b| f(&cands[b]).total_cmp(&f(&cands[a])).then(a.cmp(&b)));
        for &i in order.iter().take(ASCENT_STARTS) {
            paths.extend(ascend(cands[i].clone(), f, eval));
        }
    }
    cands.extend(paths);
    cands
}

fn ascend(
    mut cur: Candidate,
    f: fn(&Candidate) -> f64,
    eval: &(dyn Fn(Vec<f64>) -> Candidate + Sync),
) -> Vec<Candidate> {
    let k = cur.input.len();
    let mut path = Vec::new();
    let mut step: f64 = 0.1;
    while step > 1e-7 {
        let mut improved = false;
        for i in 0..k {
            for j in 0..k {
                if i == j || cur.input[j] <= 0.0 {
                    continue;
                }
                let d = step.min(cur.input[j]);
                let mut next = cur.input.clone();
                next[i] += d;
                next[j] -= d;
                let c = eval(next);
                if f(&c) > f(&cur) {
                    path.push(c.clone());
                    cur = c;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    path
}

/// `Gamma(R)` on a fresh solver.
pub fn gamma(spec: &WiretapSpec, rate: f64, resolution: usize) -> Result<GammaPoint> {
    GammaSolver::new(spec, resolution)?.gamma(rate)
}

/// Secrecy capacity at [`DEFAULT_RESOLUTION`].
pub fn secrecy_capacity(spec: &WiretapSpec) -> Result<f64> {
    Ok(GammaSolver::new(spec, DEFAULT_RESOLUTION)?.secrecy_capacity())
}

/// Total code rate per channel use at which the binned scheme gives the
/// eavesdropper nothing: `H(S) / lambda + I(X*;Z*)`.
pub fn full_secrecy_rate(spec: &WiretapSpec, x_star: &GammaPoint) -> f64 {
    spec.source_entropy / spec.lambda.value() + x_star.mi_tap
}

/// The eavesdropper's view of a random code of rate `code_rate` nats per
/// channel use drawn from `ensemble`: a message source with entropy
/// `lambda * code_rate` per source symbol sent over the cascade.
pub fn eavesdropper_system(
    spec: &WiretapSpec,
    ensemble: &EnsembleSpec,
    code_rate: f64,
) -> Result<SystemSpec> {
    let channel = ChannelSpec::from_transition(&spec.cascade(), 1.0)?;
    let source = source_with_entropy(spec.lambda.value() * code_rate)?;
    SystemSpec::new(source, channel, ensemble.clone(), spec.lambda)
}

/// Geometric source `P(i) ∝ exp(-b i)` on enough letters to reach entropy `h`.
fn source_with_entropy(h: f64) -> Result<SourceSpec> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::OutOfRange {
            name: "code_rate",
            value: h,
        });
    }
    let k = (h.exp().ceil() as usize + 1).max(2);
    let energies: Vec<f64> = (0..k).map(|i| i as f64).collect();
    let ent = |b: f64| {
        let w: Vec<f64> = energies.iter().map(|e| (-b * e).exp()).collect();
        let z: f64 = w.iter().sum();
        entropy(&w.iter().map(|x| x / z).collect::<Vec<_>>())
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while ent(hi) > h {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ent(mid) > h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let b = 0.5 * (lo + hi);
    if b == 0.0 {
        // uniform on k letters has entropy exactly ln k = h
        return SourceSpec::uniform(k);
    }
    SourceSpec::new(energies, b)
}

/// Lower bound `H(X) - I(X;Z)` on the per-symbol equivocation of a random code
/// of rate `code_rate` nats per channel use, with `I(X;Z)` the asymptotic rate
/// of `eavesdropper`; clamped to `[0, H(S)]`.
pub fn equivocation_bound(
    spec: &WiretapSpec,
    eavesdropper: &SystemSpec,
    code_rate: f64,
) -> Result<f64> {
    let cascade = spec.cascade();
    let w = eavesdropper.channel().transition();
    let same = w.len() == cascade.len()
        && w.iter().zip(&cascade).all(|(a, b)| {
            a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-9)
        });
    if !same {
        return Err(Error::spec(
            "eavesdropper.channel",
            "must be the cascade of the main and tap channels",
        ));
    }
    if eavesdropper.lambda() != spec.lambda {
        return Err(Error::spec(
            "eavesdropper.lambda",
            "must match the wiretap lambda",
        ));
    }
    let mgf = eavesdropper.channel_log_mgf()?;
    let capacity = -mgf.conjugate(mgf.mean(eavesdropper.beta())).value;
    if !(code_rate > capacity) {
        return Err(Error::NotAboveCapacity {
            rate: code_rate,
            capacity,
        });
    }
    let leaked = mutual_information_rate(eavesdropper, eavesdropper.beta())?;
    Ok((spec.lambda.value() * code_rate - leaked).clamp(0.0, spec.source_entropy))
}
