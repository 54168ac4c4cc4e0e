//! Chebyshev polynomials of both kinds, series in either basis, and the
//! quadrature transforms between samples and coefficients.
//!
//! A [`ChebyshevSeriesU`] stores `g_n` as the coefficient of `U_{n-1}`, so
//! slot 0 is unused and always zero. This keeps the index `n` the same on
//! both sides of the spectral maps in [`crate::awoperator`].

use std::f64::consts::PI;

use num_traits::Num;

use crate::quadrature::{RuleFamily, SampledFunction};
use crate::{Error, Result};

const MODULE: &str = "chebyshev";

/// `T_n(x)` by the forward three-term recurrence. Works for complex `x`.
pub fn eval_t<S: Num + Copy + From<f64>>(n: usize, x: S) -> S {
    let two_x = S::from(2.0) * x;
    let (mut prev, mut cur) = (S::one(), x);
    match n {
        0 => prev,
        _ => {
            for _ in 1..n {
                let next = two_x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `U_n(x)` by the forward three-term recurrence. Works for complex `x`.
pub fn eval_u<S: Num + Copy + From<f64>>(n: usize, x: S) -> S {
    let two_x = S::from(2.0) * x;
    let (mut prev, mut cur) = (S::one(), two_x);
    match n {
        0 => prev,
        _ => {
            for _ in 1..n {
                let next = two_x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Clenshaw summation of `Σ c[k] P_k(x)` for any family with recurrence
/// `P_{k+1} = 2x P_k - P_{k-1}`. Returns `(b_0, b_1)`.
fn clenshaw<S: Num + Copy + From<f64>>(coeffs: &[f64], x: S) -> (S, S) {
    let two_x = S::from(2.0) * x;
    let (mut b1, mut b2) = (S::zero(), S::zero());
    for &c in coeffs.iter().rev() {
        let b0 = S::from(c) + two_x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    (b1, b2)
}

fn trim(coeffs: &mut Vec<f64>, keep: usize) {
    while coeffs.len() > keep && coeffs.last() == Some(&0.0) {
        coeffs.pop();
    }
}

/// `f(x) ~ Σ_{n≥0} f_n T_n(x)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ChebyshevSeriesT {
    coeffs: Vec<f64>,
}

impl ChebyshevSeriesT {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    /// A single basis function `T_n`.
    pub fn basis(n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// `f_n`, zero past the stored length.
    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs.get(n).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Trailing zeros removed.
    pub fn canonical(mut self) -> Self {
        trim(&mut self.coeffs, 0);
        self
    }

    pub fn synthesize<S: Num + Copy + From<f64>>(&self, x: S) -> S {
        if self.coeffs.is_empty() {
            return S::zero();
        }
        let (b1, b2) = clenshaw(&self.coeffs[1..], x);
        S::from(self.coeffs[0]) + x * b1 - b2
    }
}

/// `g(x) ~ Σ_{n≥1} g_n U_{n-1}(x)`; slot 0 of the coefficient vector is
/// unused and fixed at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevSeriesU {
    coeffs: Vec<f64>,
}

impl Default for ChebyshevSeriesU {
    fn default() -> Self {
        Self { coeffs: vec![0.0] }
    }
}

impl ChebyshevSeriesU {
    /// Takes the vector with the unused slot 0 included; the slot must be 0.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        match coeffs.first() {
            None => Ok(Self::default()),
            Some(0.0) => Ok(Self { coeffs }),
            Some(&c) => Err(Error::invalid(
                MODULE,
                format!("U-series slot 0 is unused and must be 0, got {c}"),
            )),
        }
    }

    /// From coefficients `c[m]` of `U_m`, `m = 0, 1, ...`.
    pub fn from_u_basis(c: &[f64]) -> Self {
        let mut coeffs = Vec::with_capacity(c.len() + 1);
        coeffs.push(0.0);
        coeffs.extend_from_slice(c);
        Self { coeffs }
    }

    /// A single basis function `U_m` (stored at index `m + 1`).
    pub fn basis(m: usize) -> Self {
        let mut coeffs = vec![0.0; m + 2];
        coeffs[m + 1] = 1.0;
        Self { coeffs }
    }

    /// Full vector including the zero in slot 0.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// `g_n` (coefficient of `U_{n-1}`), zero past the stored length.
    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs.get(n).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn canonical(mut self) -> Self {
        trim(&mut self.coeffs, 1);
        self
    }

    pub fn synthesize<S: Num + Copy + From<f64>>(&self, x: S) -> S {
        if self.coeffs.len() <= 1 {
            return S::zero();
        }
        clenshaw(&self.coeffs[1..], x).0
    }
}

/// `f_n = (2 - δ_{n0})/π · Σ_k w_k f(x_k) T_n(x_k)` for `n = 0..=degree`,
/// from samples on Gauss–Chebyshev first-kind nodes.
pub fn analyze_t(f: &SampledFunction, degree: usize) -> Result<ChebyshevSeriesT> {
    f.require_family(MODULE, RuleFamily::GaussChebyshevFirst)?;
    let m = f.rule().len();
    if m < degree + 1 {
        return Err(Error::invalid(
            MODULE,
            format!("degree {degree} needs at least {} nodes, have {m}", degree + 1),
        ));
    }
    let mut coeffs = vec![0.0; degree + 1];
    for ((&x, &w), &v) in f.nodes().iter().zip(f.rule().weights()).zip(f.values()) {
        let wv = w * v;
        let (mut prev, mut cur) = (1.0, x);
        coeffs[0] += wv;
        for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
            if n > 1 {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            *c += wv * cur;
        }
    }
    coeffs[0] /= PI;
    for c in &mut coeffs[1..] {
        *c *= 2.0 / PI;
    }
    Ok(ChebyshevSeriesT::new(coeffs))
}

/// `g_n = (2/π) Σ_k w_k g(y_k) U_{n-1}(y_k)` for `n = 1..=degree`, from
/// samples on Gauss–Chebyshev second-kind nodes.
pub fn analyze_u(g: &SampledFunction, degree: usize) -> Result<ChebyshevSeriesU> {
    g.require_family(MODULE, RuleFamily::GaussChebyshevSecond)?;
    let m = g.rule().len();
    if m < degree {
        return Err(Error::invalid(
            MODULE,
            format!("degree {degree} needs at least {degree} nodes, have {m}"),
        ));
    }
    let mut coeffs = vec![0.0; degree + 1];
    for ((&y, &w), &v) in g.nodes().iter().zip(g.rule().weights()).zip(g.values()) {
        let wv = w * v;
        let (mut prev, mut cur) = (0.0, 1.0);
        for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
            if n > 1 {
                let next = 2.0 * y * cur - prev;
                prev = cur;
                cur = next;
            }
            *c += wv * cur;
        }
    }
    for c in &mut coeffs[1..] {
        *c *= 2.0 / PI;
    }
    Ok(ChebyshevSeriesU { coeffs })
}

/// U-analysis from samples `φ ↦ g(cos φ)` on the periodic trapezoid grid,
/// using `g(cos φ) sin φ = Σ g_n sin nφ`. Requires `degree < M/2`.
pub fn analyze_u_periodic(g: &SampledFunction, degree: usize) -> Result<ChebyshevSeriesU> {
    g.require_family(MODULE, RuleFamily::PeriodicTrapezoid)?;
    let m = g.rule().len();
    if 2 * degree >= m {
        return Err(Error::invalid(
            MODULE,
            format!("degree {degree} is not resolved by {m} trapezoid nodes"),
        ));
    }
    let mut coeffs = vec![0.0; degree + 1];
    for ((&phi, &w), &v) in g.nodes().iter().zip(g.rule().weights()).zip(g.values()) {
        let wv = w * v * phi.sin();
        for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
            *c += wv * (n as f64 * phi).sin();
        }
    }
    for c in &mut coeffs[1..] {
        *c /= PI;
    }
    Ok(ChebyshevSeriesU { coeffs })
}
