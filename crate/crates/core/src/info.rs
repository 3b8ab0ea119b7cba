//! Discrete entropy and mutual-information helpers, in nats.

/// Binary entropy `h2(x)`, with `h2(0) = h2(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.ln() - (1.0 - x) * (1.0 - x).ln()
}

/// Binary convolution `m * p = m (1 - p) + p (1 - m)`.
pub fn binary_convolution(m: f64, p: f64) -> f64 {
    m * (1.0 - p) + p * (1.0 - m)
}

/// Shannon entropy of a probability vector.
pub fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// Output law `q(y) = sum_x p(x) w[x][y]`.
pub fn output_law(p: &[f64], w: &[Vec<f64>]) -> Vec<f64> {
    let ny = w.first().map_or(0, Vec::len);
    let mut q = vec![0.0; ny];
    for (px, row) in p.iter().zip(w) {
        for (qy, wy) in q.iter_mut().zip(row) {
            *qy += px * wy;
        }
    }
    q
}

/// `I(X;Y)` for input law `p` and transition matrix `w[x][y]`.
pub fn mutual_information(p: &[f64], w: &[Vec<f64>]) -> f64 {
    let q = output_law(p, w);
    let cond: f64 = p.iter().zip(w).map(|(px, row)| px * entropy(row)).sum();
    (entropy(&q) - cond).max(0.0)
}

/// Composition `(a then b)[x][z] = sum_y a[x][y] b[y][z]`.
pub fn compose(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    a.iter().map(|row| output_law(row, b)).collect()
}
