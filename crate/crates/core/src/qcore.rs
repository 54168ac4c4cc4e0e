//! Validated base `q` and q-shifted factorials (q-Pochhammer symbols).
//!
//! The product convention is the standard one,
//! `(a; q)_n = (1 - a)(1 - aq)···(1 - aq^{n-1})`, with the empty product
//! `(a; q)_0 = 1`. Infinite products are truncated once the remaining
//! factors are within `rel_eps` of 1.

use std::ops::{Mul, Sub};

use log::warn;
use num_complex::Complex64;
use num_traits::One;

use crate::{Error, Result};

const MODULE: &str = "qcore";

/// Above this value the number of terms in every q-series grows like
/// `1/(1-q)` and construction emits a warning.
pub const Q_NEAR_ONE: f64 = 0.999;

/// Real base `q` restricted to the open interval `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QParameter {
    q: f64,
    sqrt_q: f64,
}

impl QParameter {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::invalid(
                MODULE,
                format!("q must lie in the open interval (0, 1), got {q}"),
            ));
        }
        if q > Q_NEAR_ONE {
            warn!("q = {q} is close to 1; series term counts scale like 1/(1-q)");
        }
        Ok(Self { q, sqrt_q: q.sqrt() })
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.q
    }

    /// `q^{1/2}`
    #[inline]
    pub fn sqrt(&self) -> f64 {
        self.sqrt_q
    }

    /// `q^{-1/2}`
    #[inline]
    pub fn inv_sqrt(&self) -> f64 {
        1.0 / self.sqrt_q
    }

    /// `q^{k/2}` for any integer `k`.
    #[inline]
    pub fn half_power(&self, k: i32) -> f64 {
        self.sqrt_q.powi(k)
    }

    /// The parameter `q^{1/2}`, used as the nome of the theta kernel.
    pub fn sqrt_parameter(&self) -> QParameter {
        QParameter {
            q: self.sqrt_q,
            sqrt_q: self.sqrt_q.sqrt(),
        }
    }
}

/// Truncation policy for infinite series and products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel_eps: f64,
    pub max_terms: usize,
}

impl Tolerance {
    pub fn new(rel_eps: f64, max_terms: usize) -> Result<Self> {
        if !(rel_eps > 0.0) || !rel_eps.is_finite() {
            return Err(Error::invalid(MODULE, format!("rel_eps must be positive, got {rel_eps}")));
        }
        if max_terms == 0 {
            return Err(Error::invalid(MODULE, "max_terms must be at least 1"));
        }
        Ok(Self { rel_eps, max_terms })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel_eps: 1e-15,
            max_terms: 1_000_000,
        }
    }
}

/// Length of a q-shifted factorial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Finite(usize),
    Infinite,
}

/// Scalars accepted by the q-Pochhammer routines.
pub trait QScalar: Copy + One + Mul<Output = Self> + Sub<Output = Self> {
    fn modulus(self) -> f64;
    fn scale(self, factor: f64) -> Self;
    fn to_complex(self) -> Complex64;
}

impl QScalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn scale(self, factor: f64) -> Self {
        self * factor
    }
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
}

impl QScalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn scale(self, factor: f64) -> Self {
        self * factor
    }
    fn to_complex(self) -> Complex64 {
        self
    }
}

/// `(a; q)_n`, or `(a; q)_∞` truncated once `|a q^j| < rel_eps (1 - q)`,
/// which bounds the neglected tail by `rel_eps`.
pub fn qpochhammer<S: QScalar>(a: S, q: QParameter, n: Order, tol: Tolerance) -> Result<S> {
    let qv = q.value();
    match n {
        Order::Finite(n) => {
            let mut prod = S::one();
            let mut aq = a;
            for _ in 0..n {
                prod = prod * (S::one() - aq);
                aq = aq.scale(qv);
            }
            Ok(prod)
        }
        Order::Infinite => {
            let threshold = tol.rel_eps * (1.0 - qv);
            let mut prod = S::one();
            let mut aq = a;
            for _ in 0..tol.max_terms {
                if aq.modulus() < threshold {
                    return Ok(prod);
                }
                prod = prod * (S::one() - aq);
                aq = aq.scale(qv);
            }
            if aq.modulus() < threshold {
                return Ok(prod);
            }
            Err(Error::Truncation {
                module: MODULE,
                terms: tol.max_terms,
                partial: prod.to_complex(),
            })
        }
    }
}

/// `(a_1, ..., a_m; q)_n`, the product of the single-parameter symbols.
pub fn qpochhammer_multi<S: QScalar>(
    a_list: &[S],
    q: QParameter,
    n: Order,
    tol: Tolerance,
) -> Result<S> {
    if a_list.is_empty() {
        return Err(Error::invalid(MODULE, "parameter list must be nonempty"));
    }
    a_list
        .iter()
        .try_fold(S::one(), |acc, &a| Ok(acc * qpochhammer(a, q, n, tol)?))
}

/// `(q; q)_n`
pub fn q_factorial(q: QParameter, n: usize) -> f64 {
    // Finite products cannot fail.
    qpochhammer(q.value(), q, Order::Finite(n), Tolerance::default()).unwrap_or(f64::NAN)
}

/// `(q; q)_∞`
pub fn q_factorial_infinite(q: QParameter, tol: Tolerance) -> Result<f64> {
    qpochhammer(q.value(), q, Order::Infinite, tol)
}

/// `(s e^{iα}, s e^{-iα}; q)_∞ = ∏_j (1 - 2 s q^j cos α + s² q^{2j})` for
/// real `s`, computed as a real product of conjugate-pair factors.
pub fn qpochhammer_conjugate_pair(s: f64, cos_alpha: f64, q: QParameter, tol: Tolerance) -> Result<f64> {
    let qv = q.value();
    let threshold = tol.rel_eps * (1.0 - qv);
    let mut prod = 1.0;
    let mut sq = s;
    for _ in 0..tol.max_terms {
        if sq.abs() < threshold {
            return Ok(prod);
        }
        prod *= 1.0 - 2.0 * sq * cos_alpha + sq * sq;
        sq *= qv;
    }
    Err(Error::Truncation {
        module: MODULE,
        terms: tol.max_terms,
        partial: Complex64::new(prod, 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn qp(q: f64) -> QParameter {
        QParameter::new(q).unwrap()
    }

    #[test]
    fn rejects_q_outside_unit_interval() {
        for bad in [0.0, 1.0, -0.5, 1.5, f64::NAN] {
            assert!(QParameter::new(bad).is_err(), "{bad}");
        }
        let q = qp(0.3);
        assert!((q.sqrt() * q.sqrt() - 0.3).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::new(0.0, 10).is_err());
        assert!(Tolerance::new(1e-12, 0).is_err());
        assert!(Tolerance::new(1e-12, 1).is_ok());
    }

    #[test]
    fn empty_product_is_one() {
        let tol = Tolerance::default();
        for a in [0.0, 0.3, -2.0, 17.0] {
            assert_eq!(qpochhammer(a, qp(0.4), Order::Finite(0), tol).unwrap(), 1.0);
        }
    }

    #[test]
    fn single_factor_convention() {
        let q = qp(0.5);
        let v = qpochhammer(0.5, q, Order::Finite(1), Tolerance::default()).unwrap();
        assert_eq!(v, 0.5);
        assert_eq!(q_factorial(q, 2), 0.5 * 0.75);
    }

    #[test]
    fn infinite_product_at_half() {
        // Direct product with its own stopping rule |a q^j| < 1e-16.
        let mut oracle = 1.0;
        let mut aq = 0.5f64;
        while aq >= 1e-16 {
            oracle *= 1.0 - aq;
            aq *= 0.5;
        }
        let v = qpochhammer(0.5, qp(0.5), Order::Infinite, Tolerance::default()).unwrap();
        assert!((v - oracle).abs() < 1e-15);
        assert!((v - 0.288788095).abs() < 1e-9);
    }

    #[test]
    fn multi_parameter() {
        let tol = Tolerance::default();
        let q = qp(0.5);
        let single = qpochhammer(0.3, q, Order::Finite(4), tol).unwrap();
        assert_eq!(qpochhammer_multi(&[0.3], q, Order::Finite(4), tol).unwrap(), single);
        assert_eq!(qpochhammer_multi(&[0.0, 0.0], q, Order::Finite(5), tol).unwrap(), 1.0);
        let v = qpochhammer_multi(&[0.3, 0.7], q, Order::Finite(2), tol).unwrap();
        let expected = 0.7 * 0.85 * 0.3 * 0.65;
        assert!((v - expected).abs() < 1e-15);
        assert!(qpochhammer_multi::<f64>(&[], q, Order::Finite(2), tol).is_err());
    }

    #[test]
    fn truncation_failure_carries_partial_value() {
        let tol = Tolerance::new(1e-15, 5).unwrap();
        match qpochhammer(0.5, qp(0.9), Order::Infinite, tol) {
            Err(Error::Truncation { terms, partial, .. }) => {
                assert_eq!(terms, 5);
                let direct = qpochhammer(0.5, qp(0.9), Order::Finite(5), tol).unwrap();
                assert!((partial.re - direct).abs() < 1e-15);
            }
            other => panic!("expected truncation failure, got {other:?}"),
        }
    }

    #[test]
    fn complex_argument_matches_conjugate_pair() {
        let tol = Tolerance::default();
        let q = qp(0.6);
        let (s, alpha) = (0.7, 1.3f64);
        let a = Complex64::from_polar(s, alpha);
        let prod = qpochhammer_multi(&[a, a.conj()], q, Order::Infinite, tol).unwrap();
        let real = qpochhammer_conjugate_pair(s, alpha.cos(), q, tol).unwrap();
        assert!(prod.im.abs() < 1e-14);
        assert!((prod.re - real).abs() < 1e-13 * real.abs());
    }

    #[test]
    fn monotone_in_n_for_unit_interval_arguments() {
        let tol = Tolerance::default();
        for &(a, q) in &[(0.2, 0.3), (0.5, 0.5), (0.9, 0.95)] {
            let mut prev = 1.0;
            for n in 0..=20 {
                let v = qpochhammer(a, qp(q), Order::Finite(n), tol).unwrap();
                assert!(v > 0.0 && v <= 1.0);
                assert!(v <= prev);
                prev = v;
            }
        }
    }

    proptest! {
        #[test]
        fn recurrence_in_n(a in -2.0f64..2.0, q in 0.01f64..0.99, n in 0usize..=20) {
            let tol = Tolerance::default();
            let q = qp(q);
            let lhs = qpochhammer(a, q, Order::Finite(n + 1), tol).unwrap();
            let rhs = qpochhammer(a, q, Order::Finite(n), tol).unwrap() * (1.0 - a * q.value().powi(n as i32));
            prop_assert!((lhs - rhs).abs() <= 1e-13 * (1.0 + rhs.abs()));
        }

        #[test]
        fn infinite_product_splits(a in -0.95f64..0.95, q in 0.05f64..0.95, m in 0usize..=10) {
            let tol = Tolerance::default();
            let qq = qp(q);
            let whole = qpochhammer(a, qq, Order::Infinite, tol).unwrap();
            let head = qpochhammer(a, qq, Order::Finite(m), tol).unwrap();
            let tail = qpochhammer(a * q.powi(m as i32), qq, Order::Infinite, tol).unwrap();
            prop_assert!((whole - head * tail).abs() <= 10.0 * tol.rel_eps * whole.abs());
        }
    }
}
