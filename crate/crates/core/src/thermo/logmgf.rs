//! Mixtures of finite log-moment generating functions and their exact
//! Legendre conjugates.
//!
//! A [`MixtureLogMgf`] is `L(t) = sum_g w_g ln sum_k a_gk exp(-t E_gk)`. The
//! source log-partition function is the one-group case with unit weights; the
//! channel's quenched log-MGF averages one group per output letter. Both
//! entropy functions are then `inf_t [t e + L(t)]`, which this module solves
//! by a safeguarded Newton iteration instead of a grid search.

use super::tabulated::{ConcaveFunction, TabulatedFunction, NEG_INF};
use crate::error::Result;

#[derive(Debug, Clone)]
struct Group {
    weight: f64,
    /// `(ln a, E)` pairs with finite energies and positive weights.
    terms: Vec<(f64, f64)>,
    min_e: f64,
    max_e: f64,
}

impl Group {
    /// Returns `(ln sum_k a_k exp(-t (E_k - c)), mean, second moment)` with the
    /// shift `c` chosen on the dominant side.
    fn moments(&self, t: f64) -> (f64, f64, f64) {
        let c = if t >= 0.0 { self.min_e } else { self.max_e };
        let mut top = NEG_INF;
        for &(la, e) in &self.terms {
            top = top.max(la - t * (e - c));
        }
        let (mut z, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for &(la, e) in &self.terms {
            let w = (la - t * (e - c) - top).exp();
            z += w;
            m1 += w * e;
            m2 += w * e * e;
        }
        (top + z.ln(), m1 / z, m2 / z)
    }
}

/// Weighted sum of finite log-MGFs.
#[derive(Debug, Clone)]
pub struct MixtureLogMgf {
    groups: Vec<Group>,
}

/// Result of the conjugate `inf_t [t e + L(t)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conjugate {
    pub value: f64,
    /// Minimising `t`; infinite at the edges of the energy range.
    pub slope: f64,
}

impl MixtureLogMgf {
    /// `groups` holds `(weight, [(ln a, E)])`. Terms with `ln a = -inf` or
    /// infinite energy are dropped; groups with zero weight are dropped.
    /// Returns `None` when a positively weighted group has no terms left.
    pub fn new(groups: impl IntoIterator<Item = (f64, Vec<(f64, f64)>)>) -> Option<Self> {
        let mut out = Vec::new();
        for (weight, terms) in groups {
            if weight <= 0.0 {
                continue;
            }
            let terms: Vec<(f64, f64)> = terms
                .into_iter()
                .filter(|&(la, e)| la > NEG_INF && e.is_finite())
                .collect();
            if terms.is_empty() {
                return None;
            }
            let min_e = terms.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
            let max_e = terms.iter().map(|t| t.1).fold(NEG_INF, f64::max);
            out.push(Group {
                weight,
                terms,
                min_e,
                max_e,
            });
        }
        Some(MixtureLogMgf { groups: out })
    }

    pub fn value(&self, t: f64) -> f64 {
        self.groups
            .iter()
            .map(|g| {
                let c = if t >= 0.0 { g.min_e } else { g.max_e };
                g.weight * (g.moments(t).0 - t * c)
            })
            .sum()
    }

    /// Tilted mean energy `-L'(t)`.
    pub fn mean(&self, t: f64) -> f64 {
        self.groups.iter().map(|g| g.weight * g.moments(t).1).sum()
    }

    /// `L''(t)`, the weighted tilted variance.
    pub fn variance(&self, t: f64) -> f64 {
        self.groups
            .iter()
            .map(|g| {
                let (_, m1, m2) = g.moments(t);
                g.weight * (m2 - m1 * m1).max(0.0)
            })
            .sum()
    }

    /// Range of reachable mean energies, the closure of `{mean(t)}`.
    pub fn energy_range(&self) -> (f64, f64) {
        let lo = self.groups.iter().map(|g| g.weight * g.min_e).sum();
        let hi = self.groups.iter().map(|g| g.weight * g.max_e).sum();
        (lo, hi)
    }

    fn edge_value(&self, upper: bool) -> f64 {
        self.groups
            .iter()
            .map(|g| {
                let target = if upper { g.max_e } else { g.min_e };
                let top = g
                    .terms
                    .iter()
                    .filter(|t| t.1 == target)
                    .map(|t| t.0)
                    .fold(NEG_INF, f64::max);
                let s: f64 = g
                    .terms
                    .iter()
                    .filter(|t| t.1 == target)
                    .map(|t| (t.0 - top).exp())
                    .sum();
                g.weight * (top + s.ln())
            })
            .sum()
    }

    /// `t e + L(t)` in a form that stays finite for large `|t|`.
    fn objective(&self, t: f64, e: f64) -> f64 {
        let mut acc = 0.0;
        let mut shift = 0.0;
        for g in &self.groups {
            let c = if t >= 0.0 { g.min_e } else { g.max_e };
            acc += g.weight * g.moments(t).0;
            shift += g.weight * c;
        }
        acc + t * (e - shift)
    }

    /// `inf_t [t e + L(t)]`; `NEG_INF` outside the energy range.
    pub fn conjugate(&self, e: f64) -> Conjugate {
        let (lo, hi) = self.energy_range();
        let tol = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        if e < lo - tol || e > hi + tol {
            return Conjugate {
                value: NEG_INF,
                slope: f64::NAN,
            };
        }
        if hi - lo <= tol {
            return Conjugate {
                value: self.edge_value(false),
                slope: 0.0,
            };
        }
        if e <= lo + tol {
            return Conjugate {
                value: self.edge_value(false),
                slope: f64::INFINITY,
            };
        }
        if e >= hi - tol {
            return Conjugate {
                value: self.edge_value(true),
                slope: f64::NEG_INFINITY,
            };
        }
        let t = self.solve_mean(e);
        Conjugate {
            value: self.objective(t, e),
            slope: t,
        }
    }

    /// Solves `mean(t) = e` for `e` strictly inside the energy range.
    fn solve_mean(&self, e: f64) -> f64 {
        // mean is nonincreasing in t
        let (mut a, mut b) = (-1.0, 1.0);
        while self.mean(a) < e && a > -1e12 {
            b = a;
            a *= 2.0;
        }
        while self.mean(b) > e && b < 1e12 {
            a = b;
            b *= 2.0;
        }
        let mut t = 0.5 * (a + b);
        for _ in 0..200 {
            let f = self.mean(t) - e;
            if f == 0.0 {
                return t;
            }
            if f > 0.0 {
                a = t;
            } else {
                b = t;
            }
            let v = self.variance(t);
            let newton = t + f / v;
            let next = if v > 0.0 && newton > a && newton < b {
                newton
            } else {
                0.5 * (a + b)
            };
            if (next - t).abs() <= 1e-15 * (1.0 + t.abs()) || b - a <= 1e-15 * (1.0 + t.abs()) {
                return next;
            }
            t = next;
        }
        t
    }

    /// Tabulates the conjugate over the energy range. A single reachable
    /// energy yields a table finite only at its centre point.
    pub fn tabulate_conjugate(&self, grid: usize) -> Result<ConcaveFunction> {
        let (lo, hi) = self.energy_range();
        let base = if hi - lo <= 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
            point_table(lo, self.edge_value(false), grid)?
        } else {
            TabulatedFunction::from_fn(lo, hi, grid, |e| self.conjugate(e).value)?
        };
        Ok(ConcaveFunction::new_unchecked(base))
    }
}

/// Table on `[x - 1, x + 1]` (odd grid forced) finite only at `x`.
pub(crate) fn point_table(x: f64, value: f64, grid: usize) -> Result<TabulatedFunction> {
    let grid = grid.max(3) | 1;
    let mut values = vec![NEG_INF; grid];
    values[grid / 2] = value;
    TabulatedFunction::new(x - 1.0, x + 1.0, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::info::binary_entropy;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::LN_2;

    fn coin() -> MixtureLogMgf {
        MixtureLogMgf::new([(1.0, vec![(0.0, 0.0), (0.0, 1.0)])]).unwrap()
    }

    #[test]
    fn binary_conjugate_is_binary_entropy() {
        let f = coin();
        for e in [0.01, 0.2, 0.5, 0.77, 0.999] {
            assert_abs_diff_eq!(f.conjugate(e).value, binary_entropy(e), epsilon = 1e-13);
        }
        assert_eq!(f.conjugate(0.0).value, 0.0);
        assert_eq!(f.conjugate(1.0).value, 0.0);
        assert_eq!(f.conjugate(1.1).value, NEG_INF);
        assert_abs_diff_eq!(f.conjugate(0.25).slope, 3f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn mixture_of_groups() {
        // two identical groups with half weight each behave as one
        let half = MixtureLogMgf::new([
            (0.5, vec![(-LN_2, 0.0), (-LN_2, 1.0)]),
            (0.5, vec![(-LN_2, 0.0), (-LN_2, 1.0)]),
        ])
        .unwrap();
        assert_abs_diff_eq!(
            half.value(0.7),
            ((1.0 + (-0.7f64).exp()) / 2.0).ln(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            half.conjugate(0.3).value,
            binary_entropy(0.3) - LN_2,
            epsilon = 1e-13
        );
    }

    #[test]
    fn degenerate_and_empty_groups() {
        let point = MixtureLogMgf::new([(1.0, vec![(0.0, 2.0), (NEG_INF, 5.0)])]).unwrap();
        assert_eq!(point.energy_range(), (2.0, 2.0));
        assert_eq!(point.conjugate(2.0).value, 0.0);
        assert_eq!(point.conjugate(2.5).value, NEG_INF);
        let t = point.tabulate_conjugate(9).unwrap();
        assert_eq!(t.eval(2.0), 0.0);
        assert_eq!(t.base().finite_count(), 1);
        assert!(MixtureLogMgf::new([(0.3, vec![(NEG_INF, 0.0)])]).is_none());
    }

    #[test]
    fn large_slopes_stay_finite() {
        let f = coin();
        let c = f.conjugate(1e-9);
        assert!(c.value.is_finite());
        assert_abs_diff_eq!(c.value, binary_entropy(1e-9), epsilon = 1e-15);
    }
}
