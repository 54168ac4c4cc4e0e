//! Gauss–Chebyshev rules of both kinds on `[-1, 1]` and the periodic
//! trapezoid rule on `[-π, π)`.
//!
//! Nodes are stored in ascending order. Weights absorb the Chebyshev weight
//! function of the rule, so `Σ w_k f(x_k)` approximates
//! `∫ f(x) (1-x²)^{∓1/2} dx` (or `∫ f(φ) dφ` for the trapezoid rule).

use std::f64::consts::PI;

use crate::{Error, Result};

const MODULE: &str = "quadrature";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleFamily {
    /// Weight `(1-x²)^{-1/2}` on `[-1, 1]`.
    GaussChebyshevFirst,
    /// Weight `(1-x²)^{1/2}` on `[-1, 1]`.
    GaussChebyshevSecond,
    /// Uniform weight on one period `[-π, π)`.
    PeriodicTrapezoid,
}

impl RuleFamily {
    pub fn name(self) -> &'static str {
        match self {
            RuleFamily::GaussChebyshevFirst => "gauss-chebyshev-first",
            RuleFamily::GaussChebyshevSecond => "gauss-chebyshev-second",
            RuleFamily::PeriodicTrapezoid => "periodic-trapezoid",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    family: RuleFamily,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn family(&self) -> RuleFamily {
        self.family
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Rules of the same family and size have identical nodes, so this
    /// rebuilds the rule rather than comparing floats.
    pub fn rebuild(family: RuleFamily, m: usize) -> Result<Self> {
        match family {
            RuleFamily::GaussChebyshevFirst => gauss_chebyshev_first(m),
            RuleFamily::GaussChebyshevSecond => gauss_chebyshev_second(m),
            RuleFamily::PeriodicTrapezoid => periodic_trapezoid(m),
        }
    }

    /// `Σ w_k values[k]` in node order.
    pub fn integrate(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.len() {
            return Err(Error::grid(
                MODULE,
                format!("{} values for a {}-node rule", values.len(), self.len()),
            ));
        }
        Ok(self.weights.iter().zip(values).map(|(w, v)| w * v).sum())
    }

    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Checks caller-supplied nodes against this rule to absolute `tol`.
    pub fn check_nodes(&self, nodes: &[f64], tol: f64) -> Result<()> {
        if nodes.len() != self.len() {
            return Err(Error::grid(
                MODULE,
                format!(
                    "expected {} {} nodes, found {}",
                    self.len(),
                    self.family.name(),
                    nodes.len()
                ),
            ));
        }
        for (k, (&have, &want)) in nodes.iter().zip(&self.nodes).enumerate() {
            if (have - want).abs() > tol {
                return Err(Error::grid(
                    MODULE,
                    format!(
                        "node {k} is {have}, the {} rule has {want}",
                        self.family.name()
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// Nodes `cos((2k+1)π/(2M))`, weights `π/M`.
pub fn gauss_chebyshev_first(m: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::invalid(MODULE, "first-kind rule needs M >= 1"));
    }
    let mf = m as f64;
    // k runs backwards so the nodes come out ascending.
    let nodes = (0..m)
        .rev()
        .map(|k| {
            let node = ((2 * k + 1) as f64 * PI / (2.0 * mf)).cos();
            if 2 * k + 1 == m { 0.0 } else { node }
        })
        .collect();
    Ok(QuadratureRule {
        family: RuleFamily::GaussChebyshevFirst,
        nodes,
        weights: vec![PI / mf; m],
    })
}

/// Nodes `cos(kπ/(M+1))`, weights `π/(M+1) · sin²(kπ/(M+1))`, `k = 1..M`.
pub fn gauss_chebyshev_second(m: usize) -> Result<QuadratureRule> {
    if m == 0 {
        return Err(Error::invalid(MODULE, "second-kind rule needs M >= 1"));
    }
    let h = PI / (m + 1) as f64;
    let (nodes, weights) = (1..=m)
        .rev()
        .map(|k| {
            let t = k as f64 * h;
            let node = if 2 * k == m + 1 { 0.0 } else { t.cos() };
            (node, h * t.sin().powi(2))
        })
        .unzip();
    Ok(QuadratureRule {
        family: RuleFamily::GaussChebyshevSecond,
        nodes,
        weights,
    })
}

/// Nodes `-π + 2πj/M`, weights `2π/M`, `j = 0..M-1`.
pub fn periodic_trapezoid(m: usize) -> Result<QuadratureRule> {
    if m < 2 {
        return Err(Error::invalid(MODULE, "periodic trapezoid rule needs M >= 2"));
    }
    let h = 2.0 * PI / m as f64;
    Ok(QuadratureRule {
        family: RuleFamily::PeriodicTrapezoid,
        nodes: (0..m).map(|j| -PI + j as f64 * h).collect(),
        weights: vec![h; m],
    })
}

/// Function values aligned with the nodes of a quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    rule: QuadratureRule,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(rule: QuadratureRule, values: Vec<f64>) -> Result<Self> {
        if values.len() != rule.len() {
            return Err(Error::grid(
                MODULE,
                format!("{} values for a {}-node rule", values.len(), rule.len()),
            ));
        }
        Ok(Self { rule, values })
    }

    /// Samples `f` at every node. For the trapezoid rule the node is the
    /// angle `φ`, so callers sample `φ ↦ g(cos φ)`.
    pub fn from_fn(rule: &QuadratureRule, f: impl Fn(f64) -> f64) -> Self {
        let values = rule.nodes.iter().map(|&x| f(x)).collect();
        Self {
            rule: rule.clone(),
            values,
        }
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nodes(&self) -> &[f64] {
        self.rule.nodes()
    }

    pub fn integrate(&self) -> f64 {
        self.rule
            .weights
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v)
            .sum()
    }

    pub(crate) fn require_family(&self, module: &'static str, family: RuleFamily) -> Result<()> {
        if self.rule.family != family {
            return Err(Error::grid(
                module,
                format!(
                    "samples are on a {} grid, expected {}",
                    self.rule.family.name(),
                    family.name()
                ),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn first_kind_small_rules() {
        let r = gauss_chebyshev_first(1).unwrap();
        assert_eq!(r.nodes(), &[0.0]);
        assert!(close(r.weights()[0], PI, 1e-15));

        let r = gauss_chebyshev_first(2).unwrap();
        let h = 2f64.sqrt() / 2.0;
        assert!(close(r.nodes()[0], -h, 1e-15) && close(r.nodes()[1], h, 1e-15));
        assert!(r.weights().iter().all(|&w| close(w, PI / 2.0, 1e-15)));
    }

    #[test]
    fn first_kind_integrates_x_squared() {
        let r = gauss_chebyshev_first(4).unwrap();
        assert!(close(r.integrate_fn(|x| x * x), PI / 2.0, 1e-14));
    }

    #[test]
    fn second_kind_small_rules() {
        let r = gauss_chebyshev_second(1).unwrap();
        assert_eq!(r.nodes(), &[0.0]);
        assert!(close(r.weights()[0], PI / 2.0, 1e-15));

        let r = gauss_chebyshev_second(3).unwrap();
        assert!(close(r.integrate_fn(|_| 1.0), PI / 2.0, 1e-14));

        let r = gauss_chebyshev_second(4).unwrap();
        assert!(close(r.integrate_fn(|y| (2.0 * y).powi(2)), PI / 2.0, 1e-14));
    }

    #[test]
    fn trapezoid_low_harmonics() {
        let r = periodic_trapezoid(8).unwrap();
        assert!(close(r.integrate_fn(|p| p.sin().powi(2)), PI, 1e-14));
        assert!(close(r.integrate_fn(|p| (3.0 * p).cos()), 0.0, 1e-14));
    }

    #[test]
    fn trapezoid_exp_cos_against_bessel_series() {
        // 2π I₀(1) with I₀(1) = Σ 1/(4^k (k!)²)
        let mut i0 = 0.0;
        let mut term = 1.0;
        for k in 0..30 {
            if k > 0 {
                term /= 4.0 * (k * k) as f64;
            }
            i0 += term;
        }
        let r = periodic_trapezoid(32).unwrap();
        let v = r.integrate_fn(|p| p.cos().exp());
        assert!(close(v, 2.0 * PI * i0, 1e-12));
        assert!(close(v, 7.95492652, 1e-8));
    }

    #[test]
    fn invariants_hold_for_many_sizes() {
        for m in 2..60 {
            for (rule, total) in [
                (gauss_chebyshev_first(m).unwrap(), PI),
                (gauss_chebyshev_second(m).unwrap(), PI / 2.0),
                (periodic_trapezoid(m).unwrap(), 2.0 * PI),
            ] {
                assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]), "{m} {:?}", rule.family());
                assert!(rule.weights().iter().all(|&w| w > 0.0));
                let sum: f64 = rule.weights().iter().sum();
                assert!(close(sum, total, 1e-13), "{m} {:?}", rule.family());
            }
            let first = gauss_chebyshev_first(m).unwrap();
            assert!(first.nodes().iter().all(|&x| x > -1.0 && x < 1.0));
            for j in 0..2 * m {
                // ∫ x^j (1-x²)^{-1/2} dx = π (j-1)!!/j!! for even j, 0 for odd j
                let exact = if j % 2 == 1 {
                    0.0
                } else {
                    (1..=j / 2).fold(PI, |acc, i| acc * (2 * i - 1) as f64 / (2 * i) as f64)
                };
                let v = first.integrate_fn(|x| x.powi(j as i32));
                assert!(close(v, exact, 1e-13), "M={m} j={j}: {v} vs {exact}");
            }
        }
    }

    #[test]
    fn trapezoid_exact_on_trig_polynomials() {
        let m = 16;
        let r = periodic_trapezoid(m).unwrap();
        for k in 1..m {
            assert!(close(r.integrate_fn(|p| (k as f64 * p).cos()), 0.0, 1e-13), "{k}");
            assert!(close(r.integrate_fn(|p| (k as f64 * p).sin()), 0.0, 1e-13), "{k}");
        }
    }

    #[test]
    fn size_preconditions() {
        assert!(gauss_chebyshev_first(0).is_err());
        assert!(gauss_chebyshev_second(0).is_err());
        assert!(periodic_trapezoid(1).is_err());
    }

    #[test]
    fn sampled_function_length_and_nodes() {
        let r = gauss_chebyshev_first(5).unwrap();
        assert!(SampledFunction::new(r.clone(), vec![0.0; 4]).is_err());
        let s = SampledFunction::from_fn(&r, |x| x * x);
        assert!(close(s.integrate(), PI / 2.0, 1e-14));
        assert!(r.check_nodes(r.nodes(), 1e-12).is_ok());
        let mut shifted = r.nodes().to_vec();
        shifted[2] += 1e-9;
        assert!(matches!(r.check_nodes(&shifted, 1e-12), Err(Error::GridMismatch { .. })));
    }
}
