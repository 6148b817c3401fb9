//! Not-a-knot cubic spline interpolation on a strictly increasing grid.

/// Cubic spline through `(x_i, y_i)` with the not-a-knot end condition
/// (third derivative continuous across the second and penultimate knots).
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    /// Builds the spline. Requires at least five knots and strictly
    /// increasing `x`.
    pub fn not_a_knot(x: &[f64], y: &[f64]) -> Self {
        assert_eq!(x.len(), y.len(), "knot and value counts differ");
        let n = x.len() - 1;
        assert!(n >= 4, "not-a-knot spline needs at least five knots");
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        debug_assert!(h.iter().all(|&d| d > 0.0), "knots must increase");
        let slope: Vec<f64> = (0..n).map(|i| (y[i + 1] - y[i]) / h[i]).collect();

        // Unknowns M_1..M_{n-1}; M_0 and M_n are eliminated with the
        // not-a-knot relations, leaving a tridiagonal system.
        let k = n - 1;
        let mut sub = vec![0.0; k];
        let mut diag = vec![0.0; k];
        let mut sup = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for row in 0..k {
            let i = row + 1;
            sub[row] = h[i - 1];
            diag[row] = 2.0 * (h[i - 1] + h[i]);
            sup[row] = h[i];
            rhs[row] = 6.0 * (slope[i] - slope[i - 1]);
        }
        let (h0, h1) = (h[0], h[1]);
        diag[0] = (h0 + h1) * (h0 + 2.0 * h1) / h1;
        sup[0] = (h1 * h1 - h0 * h0) / h1;
        let (ha, hb) = (h[n - 2], h[n - 1]);
        sub[k - 1] = (ha * ha - hb * hb) / ha;
        diag[k - 1] = (ha + hb) * (hb + 2.0 * ha) / ha;

        let interior = solve_tridiagonal(&sub, &diag, &sup, &rhs);
        let mut m = vec![0.0; n + 1];
        m[1..n].copy_from_slice(&interior);
        m[0] = ((h0 + h1) * m[1] - h0 * m[2]) / h1;
        m[n] = ((ha + hb) * m[n - 1] - hb * m[n - 2]) / ha;
        CubicSpline { x: x.to_vec(), y: y.to_vec(), m }
    }

    /// Index of the interval containing `t` (clamped to the grid).
    pub fn interval(&self, t: f64) -> usize {
        let n = self.x.len() - 1;
        match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            p if p > n => n - 1,
            p => (p - 1).min(n - 1),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_in(self.interval(t), t)
    }

    /// Evaluates on a known interval `i` (`x_i ≤ t ≤ x_{i+1}`).
    pub fn eval_in(&self, i: usize, t: f64) -> f64 {
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    /// First derivative on interval `i`.
    pub fn deriv_in(&self, i: usize, t: f64) -> f64 {
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h
            + ((1.0 - 3.0 * a * a) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1]) * h / 6.0
    }

    pub fn deriv(&self, t: f64) -> f64 {
        self.deriv_in(self.interval(t), t)
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }
}

/// Thomas algorithm. `sub[0]` and `sup[last]` are ignored.
fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut out = vec![0.0; n];
    out[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = d[i] - c[i] * out[i + 1];
    }
    out
}
