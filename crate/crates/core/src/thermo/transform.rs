//! Grid Legendre transforms, concave hulls and the weighted supremal
//! convolution of two entropy functions.

use rayon::prelude::*;

use super::tabulated::{ConcaveFunction, TabulatedFunction, NEG_INF};
use crate::error::{Error, Result};

/// Default upper end of the inverse-temperature grid used for inverse
/// transforms.
pub const DEFAULT_BETA_MAX: f64 = 50.0;

/// Value and maximiser of a grid optimisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub arg: f64,
}

/// Upper concave hull of the finite points of `points`, resampled on the same
/// grid. Grid points outside the hull's x-range stay `NEG_INF`.
pub fn concave_envelope(points: &TabulatedFunction) -> Result<ConcaveFunction> {
    let finite = points.finite_count();
    if finite < 3 {
        return Err(Error::DegenerateFunction { finite });
    }
    let pts: Vec<(usize, f64, f64)> = points.finite_points().collect();
    let mut hull: Vec<(usize, f64, f64)> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            // b strictly below the chord a-p is not on the upper hull
            if (b.2 - a.2) * (p.1 - a.1) < (p.2 - a.2) * (b.1 - a.1) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }

    let mut values = vec![NEG_INF; points.grid_size()];
    for seg in hull.windows(2) {
        let (ia, xa, va) = seg[0];
        let (ib, xb, vb) = seg[1];
        values[ia] = va;
        for (i, v) in values.iter_mut().enumerate().take(ib).skip(ia + 1) {
            let x = points.x_at(i);
            *v = va + (vb - va) * (x - xa) / (xb - xa);
        }
    }
    let &(il, _, vl) = hull.last().expect("hull is nonempty");
    values[il] = vl;

    let base = TabulatedFunction::new(points.x_min(), points.x_max(), values)?;
    Ok(ConcaveFunction::new_unchecked(base))
}

/// `sup_x [f(x) - beta * x]` over the grid, ties toward the smallest `x`.
pub fn legendre_sup(f: &ConcaveFunction, beta: f64) -> Extremum {
    grid_argmax(f.base(), |x, v| v - beta * x)
        .expect("concave functions have a nonempty finite support")
}

/// `inf_beta [beta * epsilon + psi(beta)]` over the grid on which `psi` is
/// sampled.
pub fn legendre_inf(psi: &TabulatedFunction, epsilon: f64) -> Extremum {
    let mut best = Extremum {
        value: f64::INFINITY,
        arg: f64::NAN,
    };
    for (_, b, v) in psi.finite_points() {
        let val = b * epsilon + v;
        if val < best.value {
            best = Extremum { value: val, arg: b };
        }
    }
    best
}

/// Tabulates `psi(beta) = sup_x [f(x) - beta x]` on `grid` points of
/// `[beta_min, beta_max]`.
pub fn sample_legendre(
    f: &ConcaveFunction,
    beta_min: f64,
    beta_max: f64,
    grid: usize,
) -> Result<TabulatedFunction> {
    TabulatedFunction::from_fn(beta_min, beta_max, grid, |b| legendre_sup(f, b).value)
}

/// Central finite difference on the grid. Refused within one grid step of
/// the finite support's edges.
pub fn derivative(f: &TabulatedFunction, x: f64) -> Result<f64> {
    let h = f.step();
    let (first, last) = f.finite_support().ok_or(Error::EdgeDerivative { x })?;
    let (lo, hi) = (f.x_at(first), f.x_at(last));
    let slack = 1e-9 * h;
    if !(x - h >= lo - slack && x + h <= hi + slack) {
        return Err(Error::EdgeDerivative { x });
    }
    let (a, b) = (f.eval(x - h), f.eval(x + h));
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::EdgeDerivative { x });
    }
    Ok((b - a) / (2.0 * h))
}

/// One point of the weighted supremal convolution
///
/// `max_e' [ sigma_s(e') / (1 + lambda) + lambda / (1 + lambda) * phi(((1 + lambda) e - e') / lambda) ]`.
///
/// Candidates are the grid points of both operands (each mapped through the
/// energy balance), so either operand may be supported on a single point.
/// The objective is concave along either candidate set, so each set is
/// searched by bisection on its forward differences. Returns `NEG_INF` with a
/// `NaN` argument when nothing is feasible.
pub fn weighted_sup_convolution(
    sigma_s: &ConcaveFunction,
    phi: &ConcaveFunction,
    lambda: f64,
    epsilon: f64,
) -> Extremum {
    debug_assert!(lambda > 0.0);
    let (ws, wc) = (1.0 / (1.0 + lambda), lambda / (1.0 + lambda));
    let total = (1.0 + lambda) * epsilon;
    let s = sigma_s.base();
    let c = phi.base();
    let mut best = Extremum {
        value: NEG_INF,
        arg: f64::NAN,
    };
    let (Some((s0, s1)), Some((c0, c1))) = (s.finite_support(), c.finite_support()) else {
        return best;
    };
    let mut offer = |src: f64, val: f64| {
        if val > best.value || (val == best.value && val.is_finite() && src < best.arg) {
            best = Extremum {
                value: val,
                arg: src,
            };
        }
    };

    // source grid points: e' = x, channel argument (total - x) / lambda
    let by_source = |i: usize| {
        let x = s.x_at(i);
        ws * s.value_at(i) + wc * c.eval((total - x) / lambda)
    };
    // e' range keeping the channel argument inside phi's support
    let (src_lo, src_hi) = (total - lambda * c.x_at(c1), total - lambda * c.x_at(c0));
    if let Some(i) = concave_argmax(index_range(s, s0, s1, src_lo, src_hi), by_source) {
        offer(s.x_at(i), by_source(i));
    }

    // channel grid points: e' = total - lambda y
    let by_channel = |j: usize| {
        let x = total - lambda * c.x_at(j);
        wc * c.value_at(j) + ws * s.eval(x)
    };
    let (y_lo, y_hi) = ((total - s.x_at(s1)) / lambda, (total - s.x_at(s0)) / lambda);
    if let Some(j) = concave_argmax(index_range(c, c0, c1, y_lo, y_hi), by_channel) {
        offer(total - lambda * c.x_at(j), by_channel(j));
    }
    best
}

/// Grid indices within `[first, last]` whose abscissa lies in `[lo, hi]`,
/// padded by one step on each side.
fn index_range(
    f: &TabulatedFunction,
    first: usize,
    last: usize,
    lo: f64,
    hi: f64,
) -> (usize, usize) {
    let h = f.step();
    let a = ((lo - f.x_min()) / h).floor() - 1.0;
    let b = ((hi - f.x_min()) / h).ceil() + 1.0;
    let a = if a <= first as f64 {
        first
    } else {
        (a as usize).min(last + 1)
    };
    let b = if b >= last as f64 {
        last
    } else if b < 0.0 {
        0
    } else {
        b as usize
    };
    (a, b)
}

/// Smallest maximiser of a concave sequence on `[a, b]`, after trimming
/// non-finite ends.
fn concave_argmax(range: (usize, usize), g: impl Fn(usize) -> f64) -> Option<usize> {
    let (mut a, mut b) = range;
    while a <= b && !g(a).is_finite() {
        a += 1;
    }
    while b > a && !g(b).is_finite() {
        b -= 1;
    }
    if a > b || !g(a).is_finite() {
        return None;
    }
    while a < b {
        let mid = a + (b - a) / 2;
        if g(mid) < g(mid + 1) {
            a = mid + 1;
        } else {
            b = mid;
        }
    }
    Some(a)
}

/// Tabulates the weighted supremal convolution on `grid` points of the
/// total-energy range reachable from the two operands' supports.
pub fn sup_convolution_table(
    sigma_s: &ConcaveFunction,
    phi: &ConcaveFunction,
    lambda: f64,
    grid: usize,
) -> Result<TabulatedFunction> {
    let support = |f: &TabulatedFunction| {
        f.finite_support()
            .map(|(a, b)| (f.x_at(a), f.x_at(b)))
            .ok_or(Error::DegenerateFunction { finite: 0 })
    };
    let (sl, sh) = support(sigma_s.base())?;
    let (cl, ch) = support(phi.base())?;
    let mut lo = (sl + lambda * cl) / (1.0 + lambda);
    let mut hi = (sh + lambda * ch) / (1.0 + lambda);
    if hi - lo < 1e-12 * (1.0 + lo.abs()) {
        // single reachable energy: centre it on the grid
        let mid = 0.5 * (lo + hi);
        lo = mid - 0.5;
        hi = mid + 0.5;
        let h = (hi - lo) / (grid - 1) as f64;
        let centre = (grid - 1) / 2;
        lo = mid - centre as f64 * h;
        hi = lo + (grid - 1) as f64 * h;
    }
    let h = (hi - lo) / (grid - 1) as f64;
    let values: Vec<f64> = (0..grid)
        .into_par_iter()
        .map(|i| {
            let e = if i + 1 == grid { hi } else { lo + i as f64 * h };
            weighted_sup_convolution(sigma_s, phi, lambda, e).value
        })
        .collect();
    TabulatedFunction::new(lo, hi, values)
}

/// Replaces negative values by `NEG_INF`.
pub fn clip_nonnegative(sigma0: &ConcaveFunction) -> TabulatedFunction {
    let base = sigma0.base();
    let values = base
        .values()
        .iter()
        .map(|&v| if v >= 0.0 { v } else { NEG_INF })
        .collect();
    TabulatedFunction::new(base.x_min(), base.x_max(), values)
        .expect("clipping preserves grid validity")
}

/// Grid argmax of `score(x, f(x))` over finite values; smallest `x` wins ties.
pub(crate) fn grid_argmax(
    f: &TabulatedFunction,
    score: impl Fn(f64, f64) -> f64,
) -> Option<Extremum> {
    let mut best: Option<Extremum> = None;
    for (_, x, v) in f.finite_points() {
        let s = score(x, v);
        if best.is_none_or(|b| s > b.value) {
            best = Some(Extremum { value: s, arg: x });
        }
    }
    best
}
