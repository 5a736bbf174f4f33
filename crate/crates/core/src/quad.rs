//! Gauss-Legendre building blocks: fixed composite panels and an adaptive
//! bisection integrator.

use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

/// Nodes per Gauss-Legendre panel.
pub const PANEL_ORDER: usize = 16;

/// Reference nodes and weights on `[-1, 1]`.
pub fn reference_rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut pairs = GaussLegendre::new(PANEL_ORDER)
            .expect("order >= 2")
            .into_node_weight_pairs();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    })
}

/// One Gauss-Legendre panel on `[a, b]`.
pub fn panel<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    reference_rule()
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Composite rule with `panels` equal panels on `[a, b]`.
pub fn composite<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + h * i as f64;
            panel(lo, lo + h, &mut f)
        })
        .sum()
}

/// Nodes and weights of the composite rule, in ascending node order.
pub fn composite_nodes(a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * PANEL_ORDER);
    let mut weights = Vec::with_capacity(panels * PANEL_ORDER);
    for i in 0..panels {
        let lo = a + h * i as f64;
        let mid = lo + 0.5 * h;
        for &(x, w) in reference_rule() {
            nodes.push(mid + 0.5 * h * x);
            weights.push(0.5 * h * w);
        }
    }
    (nodes, weights)
}

/// Adaptive integration by panel bisection.
///
/// `tol` is an absolute tolerance on the whole interval. The interval is
/// first split into `initial_panels` pieces so that oscillatory integrands
/// are not under-sampled at the top level.
pub fn adaptive<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: f64, initial_panels: usize, mut f: F) -> f64 {
    if a == b {
        return 0.0;
    }
    let n = initial_panels.max(1);
    let h = (b - a) / n as f64;
    let per = tol / n as f64;
    (0..n)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == n { b } else { lo + h };
            let whole = panel(lo, hi, &mut f);
            refine(lo, hi, whole, per, 0, &mut f)
        })
        .sum()
}

fn refine<F: FnMut(f64) -> f64>(a: f64, b: f64, whole: f64, tol: f64, depth: u32, f: &mut F) -> f64 {
    let mid = 0.5 * (a + b);
    let left = panel(a, mid, &mut *f);
    let right = panel(mid, b, &mut *f);
    let split = left + right;
    let floor = 8.0 * f64::EPSILON * (left.abs() + right.abs());
    if !split.is_finite() || (split - whole).abs() <= tol.max(floor).max(1e-300) || depth >= 40 {
        return split;
    }
    refine(a, mid, left, 0.5 * tol, depth + 1, f) + refine(mid, b, right, 0.5 * tol, depth + 1, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_rule_is_exact_for_high_degree_polynomials() {
        let got = panel(-1.0, 1.0, |x| x.powi(30));
        assert!((got - 2.0 / 31.0).abs() < 1e-15);
    }

    #[test]
    fn composite_oscillatory() {
        let got = composite(0.0, 20.0, 40, |x| (7.0 * x).cos());
        assert!((got - (140.0f64).sin() / 7.0).abs() < 1e-13);
    }

    #[test]
    fn adaptive_handles_sharp_peak() {
        let got = adaptive(-1.0, 1.0, 1e-12, 1, |x| 1.0 / (1e-4 + x * x));
        let exact = 2.0 * (1.0 / 1e-2f64) * (1.0 / 1e-2f64).atan();
        assert!((got - exact).abs() < 1e-8, "{got} {exact}");
    }

    #[test]
    fn composite_nodes_match_composite() {
        let (x, w) = composite_nodes(-2.0, 3.0, 7);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.exp()).sum();
        assert!((s - composite(-2.0, 3.0, 7, f64::exp)).abs() < 1e-13);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
    }
}
