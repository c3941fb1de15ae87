//! Numeric plumbing: compensated summation, Gauss–Legendre quadrature, root
//! bracketing and number formatting.

use std::sync::OnceLock;

/// Kahan–Babuška (Neumaier) compensated sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &NeumaierSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Format with `sig` significant digits in plain decimal notation.
pub fn fmt_sig(v: f64, sig: usize) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let e = v.abs().log10().floor() as i64;
    let decimals = (sig as i64 - 1 - e).max(0) as usize;
    format!("{v:.decimals$}")
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn gl32() -> &'static (Vec<f64>, Vec<f64>) {
    static GL: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    GL.get_or_init(|| gauss_legendre(32))
}

/// Composite 32-point Gauss–Legendre over `[a, b]` with panels no wider than
/// `max_width`. `f` receives each node and its weight already scaled.
pub fn composite_gl<F: FnMut(f64, f64)>(a: f64, b: f64, max_width: f64, mut f: F) {
    if b <= a {
        return;
    }
    let (nodes, weights) = gl32();
    let panels = ((b - a) / max_width).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let mid = lo + 0.5 * h;
        for (x, w) in nodes.iter().zip(weights) {
            f(mid + 0.5 * h * x, 0.5 * h * w);
        }
    }
}

/// `∫_a^b f` by composite 32-point Gauss–Legendre.
pub fn integrate<F: FnMut(f64) -> f64>(a: f64, b: f64, max_width: f64, mut f: F) -> f64 {
    let mut s = NeumaierSum::default();
    composite_gl(a, b, max_width, |x, w| s.add(w * f(x)));
    s.value()
}

/// Bisection for a sign change of `f` in `[a, b]` until the bracket is below `tol`.
pub fn bisect<F: FnMut(f64) -> f64>(mut a: f64, mut b: f64, mut fa: f64, tol: f64, mut f: F) -> f64 {
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
