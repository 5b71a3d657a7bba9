//! One-dimensional quadrature: Gauss-Legendre rules, composite panels and
//! an adaptive bisecting integrator for integrands with edge behavior.

use crate::error::{Error, Result};

/// A Gauss-Legendre rule on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node/weight pairs mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

/// Legendre P_n and its derivative at x by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
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

/// Composite Gauss-Legendre over uniform panels.
pub fn composite<F: FnMut(f64) -> f64>(
    rule: &GaussLegendre,
    a: f64,
    b: f64,
    panels: usize,
    mut f: F,
) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * h;
        total += rule.integrate(lo, lo + h, &mut f);
    }
    total
}

/// Nodes and weights of a composite rule, in ascending order.
pub fn composite_nodes(rule: &GaussLegendre, a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * rule.len());
    for i in 0..panels {
        let lo = a + i as f64 * h;
        out.extend(rule.mapped(lo, lo + h));
    }
    out
}

/// Adaptive Gauss-Legendre panels: a panel is accepted when bisecting it
/// changes the estimate by less than its share of the tolerance.
#[derive(Debug, Clone)]
pub struct Adaptive {
    pub rel_tol: f64,
    /// Absolute scale against which the relative tolerance is also applied;
    /// prevents endless refinement when the true integral is (near) zero.
    pub abs_scale: f64,
    pub max_depth: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_scale: 1.0,
            max_depth: 48,
        }
    }
}

impl Adaptive {
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> Result<f64> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidInput("non-finite integration bounds".into()));
        }
        if a == b {
            return Ok(0.0);
        }
        let rule = GaussLegendre::new(8);
        let whole = rule.integrate(a, b, &mut f);
        let tol = self.rel_tol * whole.abs().max(self.abs_scale);
        let mut unresolved = 0.0f64;
        let value = self.refine(&rule, a, b, whole, tol, 0, &mut f, &mut unresolved);
        if unresolved > 0.0 {
            // Depth cap hit somewhere: report the best achieved estimate.
            return Err(Error::QuadratureFailed {
                achieved: value,
                error: unresolved,
                tol,
            });
        }
        Ok(value)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine<F: FnMut(f64) -> f64>(
        &self,
        rule: &GaussLegendre,
        a: f64,
        b: f64,
        coarse: f64,
        tol: f64,
        depth: usize,
        f: &mut F,
        unresolved: &mut f64,
    ) -> f64 {
        let mid = 0.5 * (a + b);
        let left = rule.integrate(a, mid, &mut *f);
        let right = rule.integrate(mid, b, &mut *f);
        let fine = left + right;
        let err = (fine - coarse).abs();
        if err <= tol || (b - a).abs() < 1e-15 * self.abs_scale.max(1.0) {
            return fine;
        }
        if depth >= self.max_depth {
            *unresolved += err;
            return fine;
        }
        let lo = self.refine(rule, a, mid, left, 0.5 * tol, depth + 1, f, unresolved);
        let hi = self.refine(rule, mid, b, right, 0.5 * tol, depth + 1, f, unresolved);
        lo + hi
    }
}
