//! Gauss-Legendre panel quadrature primitives.

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Build the n-point rule by Newton iteration on the Legendre recurrence.
    ///
    /// Accurate to machine precision for the orders used here (n <= 128).
    pub fn legendre(n: usize) -> GaussRule {
        assert!(n >= 1, "rule order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess for the i-th positive root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_eval(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                    let (p2, d2) = legendre_eval(n, x);
                    dp = d2;
                    x -= p2 / d2;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    /// Map the rule onto [a, b]: returns (node, weight) pairs.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(self.weights.iter())
            .map(move |(&t, &w)| (mid + half * t, half * w))
    }
}

/// P_n(x) and P_n'(x) via the three-term recurrence.
fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let deriv = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, deriv)
}

/// Sum by pairwise reduction: deterministic and insensitive to chunk order.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
        }
    }
}

/// Panel edges on [a, b], widths growing geometrically away from `a`.
pub(crate) fn graded_edges(a: f64, b: f64, panels: usize, growth: f64) -> Vec<f64> {
    assert!(b > a && panels >= 1);
    let total = growth.powi(panels as i32) - 1.0;
    let mut edges = Vec::with_capacity(panels + 1);
    edges.push(a);
    for i in 1..panels {
        let frac = (growth.powi(i as i32) - 1.0) / total;
        edges.push(a + (b - a) * frac);
    }
    edges.push(b);
    edges
}
