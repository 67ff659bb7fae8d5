//! Gauss-Legendre nodes and weights.
//!
//! Nodes are the roots of the Legendre polynomial P_n, found by Newton
//! iteration from the Chebyshev-like initial guess cos(pi*(i - 1/4)/(n + 1/2)).
//! Weights follow as 2 / ((1 - x^2) * P_n'(x)^2). An order-n rule integrates
//! polynomials up to degree 2n - 1 exactly; for smooth oscillatory integrands
//! the error falls super-exponentially once the panel is shorter than a
//! wavelength or two.

/// Quadrature rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "quadrature order must be at least 1");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            // Newton refinement; quartic-ish convergence, a handful of steps.
            for _ in 0..64 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        // Ascending node order keeps panel sweeps monotone in time.
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| nodes[a].partial_cmp(&nodes[b]).unwrap());
        GaussLegendre {
            nodes: idx.iter().map(|&i| nodes[i]).collect(),
            weights: idx.iter().map(|&i| weights[i]).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped onto [a, b], in ascending node order.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    /// Integral of `f` over [a, b] with a single panel.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Integral of `f` over [a, b] split into `panels` equal panels.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        mut f: F,
    ) -> f64 {
        let panels = panels.max(1);
        let h = (b - a) / panels as f64;
        let mut acc = 0.0;
        for k in 0..panels {
            let lo = a + k as f64 * h;
            acc += self.integrate(lo, lo + h, &mut f);
        }
        acc
    }
}

/// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_two_matches_known_nodes() {
        let gl = GaussLegendre::new(2);
        let expect = 1.0 / 3.0f64.sqrt();
        assert!((gl.nodes[0] + expect).abs() < 1e-15);
        assert!((gl.nodes[1] - expect).abs() < 1e-15);
        assert!((gl.weights[0] - 1.0).abs() < 1e-15);
        assert!((gl.weights[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for order in [1, 2, 3, 5, 8, 16, 32] {
            let gl = GaussLegendre::new(order);
            let total: f64 = gl.weights.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "order {order}: {total}");
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let gl = GaussLegendre::new(5);
        // x^9 over [0, 1] = 1/10.
        let got = gl.integrate(0.0, 1.0, |x| x.powi(9));
        assert!((got - 0.1).abs() < 1e-15, "{got}");
    }

    #[test]
    fn oscillatory_integral_converges_with_panels() {
        // int_0^10 cos(7 t) dt = sin(70)/7
        let gl = GaussLegendre::new(16);
        let got = gl.integrate_panels(0.0, 10.0, 8, |t| (7.0 * t).cos());
        let exact = (70.0f64).sin() / 7.0;
        assert!((got - exact).abs() < 1e-13, "{got} vs {exact}");
    }
}
