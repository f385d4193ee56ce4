//! Quadrature rules: fixed-order Gauss–Legendre (also composite) and an
//! adaptive double-exponential (tanh-sinh) rule for endpoint singularities.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let mut nodes = vec![0.0; order];
        let mut weights = vec![0.0; order];
        let n = order as f64;
        for i in 0..order.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = ((i as f64 + 0.75) / (n + 0.5) * PI).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(order, x);
                dp = d;
                let step = p / d;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(order, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[order - 1 - i] = x;
            weights[order - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Map the rule to `[a, b]`, returning `(points, weights)`.
    pub fn on(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        self.on(a, b).map(|(x, w)| w * f(x)).sum()
    }

    /// Composite rule with `panels` equal subintervals.
    pub fn composite<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|k| {
                let lo = a + h * k as f64;
                self.integrate(&mut f, lo, lo + h)
            })
            .sum()
    }

    /// Nodes and weights of the composite rule, for callers that cache
    /// integrand values.
    pub fn composite_nodes(&self, a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
        let h = (b - a) / panels as f64;
        let mut xs = Vec::with_capacity(panels * self.nodes.len());
        let mut ws = Vec::with_capacity(panels * self.nodes.len());
        for k in 0..panels {
            let lo = a + h * k as f64;
            for (x, w) in self.on(lo, lo + h) {
                xs.push(x);
                ws.push(w);
            }
        }
        (xs, ws)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Result of an adaptive rule: value and an error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Tanh-sinh quadrature on `[a, b]`, halving the step until two successive
/// levels agree to `tol` (absolute). The integrand receives `(x, dist)` where
/// `dist` is the distance from `x` to the nearer endpoint, computed without
/// cancellation so that endpoint singularities can be evaluated accurately.
pub fn tanh_sinh<F: FnMut(f64, f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Estimate {
    let half = 0.5 * (b - a);
    // Far enough that weak endpoint singularities lose nothing at 1e-12.
    let tmax = 4.5;
    let mut eval = |t: f64| -> f64 {
        let s = 0.5 * PI * t.sinh();
        let c = s.cosh();
        // 1 - tanh(s) = 2 / (1 + e^{2s}) avoids cancellation for large s.
        let comp = 2.0 / (1.0 + (2.0 * s.abs()).exp());
        let weight = 0.5 * PI * t.cosh() / (c * c);
        let dist = half * comp;
        if dist <= 0.0 {
            return 0.0;
        }
        let x = if t >= 0.0 { b - dist } else { a + dist };
        let y = f(x, dist);
        if y.is_finite() {
            half * weight * y
        } else {
            0.0
        }
    };
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        if t > tmax {
            break;
        }
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut value = sum * h;
    let mut error = f64::INFINITY;
    for _level in 0..9 {
        h *= 0.5;
        let mut k = 1;
        loop {
            let t = k as f64 * h;
            if t > tmax {
                break;
            }
            sum += eval(t) + eval(-t);
            k += 2;
        }
        let next = sum * h;
        error = (next - value).abs();
        value = next;
        if error <= tol {
            break;
        }
    }
    Estimate { value, error }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let gl = GaussLegendre::new(8);
        let v = gl.integrate(|x| x.powi(15) + 3.0 * x.powi(14), -1.0, 1.0);
        assert!((v - 6.0 / 15.0).abs() < 1e-14);
        let s: f64 = gl.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn composite_handles_oscillation() {
        let gl = GaussLegendre::new(16);
        let v = gl.composite(|x| (40.0 * x).cos(), 0.0, 3.0, 30);
        assert!((v - (120.0f64).sin() / 40.0).abs() < 1e-13);
    }

    #[test]
    fn tanh_sinh_handles_inverse_sqrt_endpoint() {
        // integral of 1/sqrt(1-x) over [0,1] is 2, singular at the right end.
        let e = tanh_sinh(|x, d| if x > 0.5 { 1.0 / d.sqrt() } else { 1.0 / (1.0 - x).sqrt() }, 0.0, 1.0, 1e-12);
        assert!((e.value - 2.0).abs() < 1e-10, "{e:?}");
    }
}
