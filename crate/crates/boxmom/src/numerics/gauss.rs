//! Gauss–Legendre quadrature nodes and composite rules.

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
///
/// Computed by Newton iteration on the Legendre polynomial; accurate to
/// machine precision for the orders used here (n ≤ 64).
pub fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi-style initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_eval(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
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
        let (_, d) = legendre_eval(n, 0.0);
        nodes[n / 2] = 0.0;
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_eval(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A reusable 1D quadrature rule on an arbitrary interval.
#[derive(Debug, Clone)]
pub struct Quad1 {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quad1 {
    /// Composite Gauss–Legendre rule: `panels` panels of `order` points on [a, b].
    pub fn gauss(a: f64, b: f64, order: usize, panels: usize) -> Self {
        let (xs, ws) = legendre_rule(order);
        let mut nodes = Vec::with_capacity(order * panels);
        let mut weights = Vec::with_capacity(order * panels);
        let hp = (b - a) / panels as f64;
        for p in 0..panels {
            let x0 = a + p as f64 * hp;
            for (x, w) in xs.iter().zip(&ws) {
                nodes.push(x0 + 0.5 * hp * (x + 1.0));
                weights.push(0.5 * hp * w);
            }
        }
        Quad1 { nodes, weights }
    }

    /// Composite rule with panel boundaries at the given sorted breakpoints.
    pub fn gauss_broken(breaks: &[f64], order: usize, panels_per_piece: usize) -> Self {
        assert!(breaks.len() >= 2);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in breaks.windows(2) {
            if w[1] - w[0] <= 0.0 {
                continue;
            }
            let q = Quad1::gauss(w[0], w[1], order, panels_per_piece);
            nodes.extend(q.nodes);
            weights.extend(q.weights);
        }
        Quad1 { nodes, weights }
    }

    /// Midpoint rule with n equal cells: kept as an alternative transverse rule.
    pub fn midpoint(a: f64, b: f64, n: usize) -> Self {
        let h = (b - a) / n as f64;
        let nodes = (0..n).map(|i| a + (i as f64 + 0.5) * h).collect();
        let weights = vec![h; n];
        Quad1 { nodes, weights }
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}
