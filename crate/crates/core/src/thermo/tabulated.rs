//! Functions sampled on a uniform grid.
//!
//! Values are either finite or the [`NEG_INF`] sentinel, which marks energies
//! that are unreachable (zero configurations, zero probability). The sentinel
//! only ever enters a table explicitly; construction rejects NaN and `+inf`.

use crate::error::{Error, Result};

/// Sentinel for "no configurations here".
pub const NEG_INF: f64 = f64::NEG_INFINITY;

/// Default number of grid points per tabulated function.
pub const DEFAULT_GRID: usize = 4097;

/// Fractional offsets closer than this to a grid node are snapped onto the
/// node when the other neighbour is `NEG_INF`, so support edges stay reachable
/// under rounding.
const SNAP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedFunction {
    x_min: f64,
    x_max: f64,
    values: Vec<f64>,
}

impl TabulatedFunction {
    pub fn new(x_min: f64, x_max: f64, values: Vec<f64>) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(Error::InvalidGrid(format!(
                "need finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if values.len() < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 grid points, got {}",
                values.len()
            )));
        }
        if let Some(i) = values
            .iter()
            .position(|v| v.is_nan() || *v == f64::INFINITY)
        {
            return Err(Error::InvalidGrid(format!(
                "value at index {i} is {}",
                values[i]
            )));
        }
        Ok(TabulatedFunction {
            x_min,
            x_max,
            values,
        })
    }

    /// Samples `f` at `grid` uniformly spaced points of `[x_min, x_max]`.
    pub fn from_fn(x_min: f64, x_max: f64, grid: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if grid < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 grid points, got {grid}"
            )));
        }
        let h = (x_max - x_min) / (grid - 1) as f64;
        let values = (0..grid).map(|i| f(x_min + i as f64 * h)).collect();
        Self::new(x_min, x_max, values)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn step(&self) -> f64 {
        (self.x_max - self.x_min) / (self.values.len() - 1) as f64
    }

    pub fn x_at(&self, i: usize) -> f64 {
        if i + 1 == self.values.len() {
            self.x_max
        } else {
            self.x_min + i as f64 * self.step()
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, i: usize) -> f64 {
        self.values[i]
    }

    /// Iterates `(x, value)` over the finite grid points.
    pub fn finite_points(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(i, &v)| (i, self.x_at(i), v))
    }

    /// First and last grid index holding a finite value.
    pub fn finite_support(&self) -> Option<(usize, usize)> {
        let first = self.values.iter().position(|v| v.is_finite())?;
        let last = self.values.iter().rposition(|v| v.is_finite())?;
        Some((first, last))
    }

    pub fn finite_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_finite()).count()
    }

    /// Linear interpolation; `NEG_INF` outside the grid or next to a
    /// `NEG_INF` neighbour that carries weight.
    pub fn eval(&self, x: f64) -> f64 {
        if x.is_nan() {
            return NEG_INF;
        }
        let g = self.values.len();
        let h = self.step();
        let mut t = (x - self.x_min) / h;
        let top = (g - 1) as f64;
        if t < 0.0 {
            if t > -SNAP {
                t = 0.0;
            } else {
                return NEG_INF;
            }
        }
        if t > top {
            if t < top + SNAP {
                t = top;
            } else {
                return NEG_INF;
            }
        }
        let i = (t.floor() as usize).min(g - 1);
        let frac = t - i as f64;
        if frac == 0.0 || i + 1 == g {
            return self.values[i];
        }
        let (lo, hi) = (self.values[i], self.values[i + 1]);
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => lo + frac * (hi - lo),
            (true, false) if frac < SNAP => lo,
            (false, true) if frac > 1.0 - SNAP => hi,
            _ => NEG_INF,
        }
    }

    /// Largest finite value, or `None` when nothing is finite.
    pub fn max_finite(&self) -> Option<f64> {
        self.values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.max(v))))
    }
}

/// A tabulated function whose finite part is concave on a contiguous run of
/// grid indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcaveFunction {
    base: TabulatedFunction,
}

impl ConcaveFunction {
    /// Validates concavity: second differences must not exceed `1e-9` times
    /// the range of the finite values.
    pub fn new(base: TabulatedFunction) -> Result<Self> {
        let Some((first, last)) = base.finite_support() else {
            return Err(Error::DegenerateFunction { finite: 0 });
        };
        let vals = &base.values[first..=last];
        if let Some(k) = vals.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "finite support is not contiguous: NEG_INF at index {}",
                first + k
            )));
        }
        let (lo, hi) = vals
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        let tol = 1e-9 * (hi - lo).max(f64::MIN_POSITIVE);
        for (k, w) in vals.windows(3).enumerate() {
            let second = w[0] - 2.0 * w[1] + w[2];
            if second > tol {
                return Err(Error::NotConcave {
                    index: first + k + 1,
                    excess: second,
                });
            }
        }
        Ok(ConcaveFunction { base })
    }

    pub(crate) fn new_unchecked(base: TabulatedFunction) -> Self {
        ConcaveFunction { base }
    }

    pub fn base(&self) -> &TabulatedFunction {
        &self.base
    }

    pub fn into_base(self) -> TabulatedFunction {
        self.base
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.base.eval(x)
    }
}

impl AsRef<TabulatedFunction> for ConcaveFunction {
    fn as_ref(&self) -> &TabulatedFunction {
        &self.base
    }
}
