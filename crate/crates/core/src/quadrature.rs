//! One-dimensional rules used by the product quadratures on `S^3` and `T^3`.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on the three-term Legendre recurrence,
    /// started from the Tricomi asymptotic guesses.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
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
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped affinely onto `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        self.on_interval(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = if n == 0 {
        0.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p, d)
}

/// Composite Gauss–Legendre: `panels` equal panels with `order` nodes each.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub panel_edges: Vec<f64>,
    pub rule: GaussLegendre,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let panel_edges = (0..=panels).map(|i| a + h * i as f64).collect();
        Self {
            panel_edges,
            rule: GaussLegendre::new(order),
        }
    }

    /// All `(node, weight)` pairs in increasing node order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.panel_edges
            .windows(2)
            .flat_map(|w| self.rule.on_interval(w[0], w[1]).collect::<Vec<_>>())
            .collect()
    }
}

/// Equispaced periodic nodes `2 pi j / n`; with equal weights this is the
/// trapezoid rule, spectrally accurate for smooth periodic integrands.
pub fn periodic_nodes(n: usize) -> impl Iterator<Item = f64> + Clone {
    let h = 2.0 * PI / n as f64;
    (0..n).map(move |j| h * j as f64)
}
