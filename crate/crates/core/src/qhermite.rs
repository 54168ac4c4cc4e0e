//! Continuous q-Hermite polynomials of Rogers,
//!
//! ```text
//! H_n(cos θ | q) = Σ_{k=0}^{n} [n k]_q e^{i(n-2k)θ},
//! ```
//!
//! their weight, generating function and Poisson kernel, and the
//! Askey-Wilson operator on `L²[w]` in the `H_n` basis.
//!
//! `D_q H_n = 2 q^{(1-n)/2} (1-qⁿ)/(1-q) · H_{n-1}`, so the right inverse
//! divides by that factor. In integral form the inverse is
//!
//! ```text
//! f(x) = c ∫ H(x, t, √q) g(t) w(t) dt,  H(x, t, r) = Σ_{n≥1} rⁿ H_n(x) H_{n-1}(t)/(q;q)_n,
//! ```
//!
//! with `c = (1-q)(q;q)_∞/(4π√q)`. The factor `(q;q)_∞` comes from the
//! orthogonality norm `2π(q;q)_n/(q;q)_∞`.
//!
//! `H(x, t, r)` has a closed form obtained by telescoping `H(s) - H(sq)`:
//!
//! ```text
//! H(θ, φ, r) = Σ_{k≥0} 2rq^k (cos θ - rq^k cos φ) (r²q^{2k+1}; q)_∞ / Den(rq^k),
//! Den(s) = (s e^{±i(θ+φ)}, s e^{±i(θ-φ)}; q)_∞.
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::dd::Dd;
use crate::qcore::{q_factorial, q_factorial_infinite, qpochhammer, qpochhammer_conjugate_pair, qpochhammer_multi};
use crate::quadrature::{gauss_chebyshev_first, QuadratureRule, RuleFamily, SampledFunction};
use crate::{Error, Order, QParameter, Result, Tolerance};

const MODULE: &str = "qhermite";

/// Relative agreement demanded of the two product forms of the weight.
pub const WEIGHT_AGREEMENT: f64 = 1e-9;

/// A finite expansion `Σ c_n H_n(x | q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QHermiteSeries {
    q: QParameter,
    coeffs: Vec<f64>,
}

impl QHermiteSeries {
    pub fn new(q: QParameter, coeffs: Vec<f64>) -> Self {
        Self { q, coeffs }
    }

    pub fn basis(q: QParameter, n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        Self { q, coeffs }
    }

    pub fn q(&self) -> QParameter {
        self.q
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> f64 {
        self.coeffs.get(n).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Clenshaw summation for the recurrence `H_{k+1} = 2xH_k - (1-q^k)H_{k-1}`.
    pub fn evaluate(&self, x: f64) -> f64 {
        let qv = self.q.value();
        let (mut b1, mut b2) = (0.0, 0.0);
        for (k, &c) in self.coeffs.iter().enumerate().rev() {
            let b = c + 2.0 * x * b1 - (1.0 - qv.powi(k as i32 + 1)) * b2;
            b2 = b1;
            b1 = b;
        }
        b1
    }
}

/// `r` and `q` of the generating and Poisson kernels, `|r| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteKernelParams {
    pub r: f64,
    pub q: QParameter,
}

impl HermiteKernelParams {
    pub fn new(r: f64, q: QParameter) -> Result<Self> {
        if !(r.abs() < 1.0) {
            return Err(Error::invalid(MODULE, format!("|r| = {} must be < 1", r.abs())));
        }
        Ok(Self { r, q })
    }

    /// `r = √q`, the kernel parameter of the inverse operator.
    pub fn for_inverse(q: QParameter) -> Self {
        Self { r: q.sqrt(), q }
    }
}

/// The Gaussian binomial `(q;q)_n / ((q;q)_k (q;q)_{n-k})`.
pub fn gaussian_binomial(n: usize, k: usize, q: QParameter) -> f64 {
    if k > n {
        return 0.0;
    }
    q_factorial(q, n) / (q_factorial(q, k) * q_factorial(q, n - k))
}

/// `H_n(cos θ | q)` from the defining sum, folded to cosines.
pub fn qhermite_direct(n: usize, theta: f64, q: QParameter) -> f64 {
    (0..=n)
        .map(|k| gaussian_binomial(n, k, q) * ((n as f64 - 2.0 * k as f64) * theta).cos())
        .sum()
}

/// `H_n(x | q)` by the three-term recurrence.
pub fn qhermite_eval(n: usize, x: f64, q: QParameter) -> f64 {
    let qv = q.value();
    let (mut prev, mut cur) = (1.0, 2.0 * x);
    if n == 0 {
        return prev;
    }
    let mut qk = qv;
    for _ in 1..n {
        let next = 2.0 * x * cur - (1.0 - qk) * prev;
        prev = cur;
        cur = next;
        qk *= qv;
    }
    cur
}

/// `H_0(x), ..., H_{n_max}(x)`.
pub fn qhermite_all(n_max: usize, x: f64, q: QParameter) -> Vec<f64> {
    let qv = q.value();
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max == 0 {
        return out;
    }
    out.push(2.0 * x);
    let mut qk = qv;
    for k in 1..n_max {
        out.push(2.0 * x * out[k] - (1.0 - qk) * out[k - 1]);
        qk *= qv;
    }
    out
}

fn check_open_interval(x: f64) -> Result<()> {
    if !(x.abs() < 1.0) {
        return Err(Error::domain(MODULE, format!("x = {x} must lie in (-1, 1)")));
    }
    Ok(())
}

/// `w(x) √(1-x²) = ∏_{n≥0} (1 - 2(2x²-1)qⁿ + q^{2n})`: the weight with the
/// Chebyshev factor removed, smooth up to the endpoints.
pub fn weight_w_reduced(x: f64, q: QParameter, tol: Tolerance) -> Result<f64> {
    qpochhammer_conjugate_pair(1.0, 2.0 * x * x - 1.0, q, tol)
}

/// `w(x) = (e^{2iθ}, e^{-2iθ}; q)_∞ / sin θ`, `x = cos θ`.
///
/// Computed both as the real product over `(1-x²)^{1/2}` and as the
/// complex q-Pochhammer pair; a relative disagreement above
/// [`WEIGHT_AGREEMENT`] is reported as an error.
pub fn weight_w(x: f64, q: QParameter, tol: Tolerance) -> Result<f64> {
    check_open_interval(x)?;
    let sin_theta = (1.0 - x * x).sqrt();
    let real = weight_w_reduced(x, q, tol)? / sin_theta;

    let theta = x.acos();
    let e = Complex64::from_polar(1.0, 2.0 * theta);
    let complex = qpochhammer_multi(&[e, e.conj()], q, Order::Infinite, tol)? / theta.sin();
    let residual = ((complex.re - real).abs() + complex.im.abs()) / real.abs();
    if residual > WEIGHT_AGREEMENT {
        return Err(Error::Disagreement {
            module: MODULE,
            residual,
        });
    }
    Ok(real)
}

/// `Σ_n H_n(x|q) rⁿ/(q;q)_n = 1 / (re^{iθ}, re^{-iθ}; q)_∞`.
pub fn generating_function(x: f64, r: f64, q: QParameter, tol: Tolerance) -> Result<f64> {
    HermiteKernelParams::new(r, q)?;
    Ok(1.0 / qpochhammer_conjugate_pair(r, x, q, tol)?)
}

/// `Den(s) = (s e^{±i(θ+φ)}, s e^{±i(θ-φ)}; q)_∞` as a real product.
fn den(theta: f64, phi: f64, s: f64, q: QParameter, tol: Tolerance) -> Result<f64> {
    Ok(qpochhammer_conjugate_pair(s, (theta + phi).cos(), q, tol)?
        * qpochhammer_conjugate_pair(s, (theta - phi).cos(), q, tol)?)
}

/// `Σ_n H_n(cos θ|q) H_n(cos φ|q) rⁿ/(q;q)_n = (r²;q)_∞ / Den(r)`.
pub fn poisson_kernel(theta: f64, phi: f64, r: f64, q: QParameter, tol: Tolerance) -> Result<f64> {
    HermiteKernelParams::new(r, q)?;
    Ok(qpochhammer(r * r, q, Order::Infinite, tol)? / den(theta, phi, r, q, tol)?)
}

/// The Poisson kernel as an analytic function of `w = e^{iφ}` with `θ`
/// fixed, for applying the divided-difference `D_q` in `φ`.
pub fn poisson_kernel_breve(theta: f64, w: Complex64, r: f64, q: QParameter, tol: Tolerance) -> Result<Complex64> {
    HermiteKernelParams::new(r, q)?;
    let u = Complex64::from_polar(1.0, theta);
    let a = [r * u * w, r / (u * w), r * u / w, r * w / u];
    Ok(qpochhammer(r * r, q, Order::Infinite, tol)? / qpochhammer_multi(&a, q, Order::Infinite, tol)?)
}

/// `D_q` in `φ` of the Poisson kernel:
/// `4r(r²;q)_∞ (cos θ - rq^{-1/2} cos φ) / ((1-q) Den(rq^{-1/2}))`.
pub fn poisson_kernel_dq_phi(theta: f64, phi: f64, r: f64, q: QParameter, tol: Tolerance) -> Result<f64> {
    HermiteKernelParams::new(r, q)?;
    let s = r * q.inv_sqrt();
    Ok(4.0 * r * qpochhammer(r * r, q, Order::Infinite, tol)? * (theta.cos() - s * phi.cos())
        / ((1.0 - q.value()) * den(theta, phi, s, q, tol)?))
}

/// `H(θ, φ, rq^{-1/2}) - H(θ, φ, rq^{1/2}) = 2s(qs²;q)_∞(cos θ - s cos φ)/Den(s)`,
/// `s = rq^{-1/2}`.
pub fn telescoping_rhs(theta: f64, phi: f64, r: f64, q: QParameter, tol: Tolerance) -> Result<f64> {
    let s = r * q.inv_sqrt();
    Ok(2.0 * s * qpochhammer(q.value() * s * s, q, Order::Infinite, tol)? * (theta.cos() - s * phi.cos())
        / den(theta, phi, s, q, tol)?)
}

/// `Σ_{n=1}^{N} rⁿ H_n(cos θ|q) H_{n-1}(cos φ|q) / (q;q)_n`, summed in
/// double-double: for q near 1 the terms grow far past the sum before they
/// decay, and an f64 sum loses up to ~8 digits.
pub fn kernel_h_series(theta: f64, phi: f64, r: f64, q: QParameter, n_terms: usize) -> Result<f64> {
    HermiteKernelParams::new(r, q)?;
    let (x, t) = (Dd::from(theta.cos()), Dd::from(phi.cos()));
    let qv = q.value();
    let (mut hx_prev, mut hx) = (Dd::ONE, x.scale(2.0));
    let (mut ht_prev, mut ht) = (Dd::ZERO, Dd::ONE);
    let mut coef = Dd::from(r) / Dd::from(1.0 - qv);
    // q^n, and q^{n-1} for the H(t) recurrence
    let (mut qn, mut qn1) = (Dd::from(qv), Dd::ONE);
    let mut sum = Dd::ZERO;
    for n in 1..=n_terms {
        sum += coef * hx * ht;
        // advance H_n(x) -> H_{n+1}(x), H_{n-1}(t) -> H_n(t)
        let hx_next = x.scale(2.0) * hx - (Dd::ONE - qn) * hx_prev;
        let ht_next = if n == 1 { t.scale(2.0) } else { t.scale(2.0) * ht - (Dd::ONE - qn1) * ht_prev };
        hx_prev = hx;
        hx = hx_next;
        ht_prev = ht;
        ht = ht_next;
        qn1 = qn;
        qn = qn.scale(qv);
        coef = coef.scale(r) / (Dd::ONE - qn);
    }
    Ok(sum.to_f64())
}

/// `H(θ, φ, r)` by the telescoped closed form (module docs). The ratio
/// `(r²q^{2k+1};q)_∞ / Den(rq^k)` is advanced in `k` by one pair of factors
/// at a time; the sum stops once `|r|q^k < rel_eps (1-q)`.
pub fn kernel_h_closed(theta: f64, phi: f64, r: f64, q: QParameter, tol: Tolerance) -> Result<f64> {
    HermiteKernelParams::new(r, q)?;
    if r == 0.0 {
        return Ok(0.0);
    }
    let qv = q.value();
    let (x, t) = (theta.cos(), phi.cos());
    let (c_plus, c_minus) = ((theta + phi).cos(), (theta - phi).cos());
    let threshold = tol.rel_eps * (1.0 - qv);

    let mut ratio = qpochhammer(r * r * qv, q, Order::Infinite, tol)? / den(theta, phi, r, q, tol)?;
    let mut s = r;
    let mut sum = 0.0;
    for _ in 0..tol.max_terms {
        if s.abs() < threshold {
            return Ok(sum);
        }
        sum += 2.0 * s * (x - s * t) * ratio;
        let dfac = (1.0 - 2.0 * s * c_plus + s * s) * (1.0 - 2.0 * s * c_minus + s * s);
        let pfac = (1.0 - s * s * qv) * (1.0 - s * s * qv * qv);
        ratio *= dfac / pfac;
        s *= qv;
    }
    Err(Error::Truncation {
        module: MODULE,
        terms: tol.max_terms,
        partial: sum.into(),
    })
}

/// `D_q H_n = 2q^{(1-n)/2}(1-qⁿ)/(1-q) · H_{n-1}`.
pub fn hermite_multiplier(n: usize, q: QParameter) -> f64 {
    if n == 0 {
        return 0.0;
    }
    2.0 * q.half_power(1 - n as i32) * (1.0 - q.value().powi(n as i32)) / (1.0 - q.value())
}

pub fn dq_hermite_spectral(f: &QHermiteSeries) -> QHermiteSeries {
    let q = f.q;
    let coeffs = if f.len() <= 1 {
        vec![0.0]
    } else {
        (1..f.len()).map(|n| hermite_multiplier(n, q) * f.coeffs[n]).collect()
    };
    QHermiteSeries { q, coeffs }
}

/// Right inverse with the `H_0` component of the result fixed at zero.
pub fn dq_inverse_hermite_spectral(g: &QHermiteSeries) -> QHermiteSeries {
    let q = g.q;
    let mut coeffs = vec![0.0; g.len() + 1];
    for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
        *c = g.coeff(n - 1) / hermite_multiplier(n, q);
    }
    QHermiteSeries { q, coeffs }
}

/// `∫ H_n² w dx = 2π(q;q)_n/(q;q)_∞`.
pub fn orthogonality_norm(n: usize, q: QParameter, tol: Tolerance) -> Result<f64> {
    Ok(2.0 * PI * q_factorial(q, n) / q_factorial_infinite(q, tol)?)
}

/// `∫_{-1}^{1} H_m H_n w dx` by first-kind Gauss-Chebyshev quadrature on
/// `m_nodes` nodes, which absorbs the `(1-x²)^{-1/2}` of the weight.
pub fn orthogonality_check(m: usize, n: usize, q: QParameter, m_nodes: usize, tol: Tolerance) -> Result<f64> {
    let rule = gauss_chebyshev_first(m_nodes)?;
    let values = rule
        .nodes()
        .iter()
        .map(|&x| Ok(qhermite_eval(m, x, q) * qhermite_eval(n, x, q) * weight_w_reduced(x, q, tol)?))
        .collect::<Result<Vec<_>>>()?;
    rule.integrate(&values)
}

/// Coefficients `c_n = ∫ f H_n w dx / ‖H_n‖²` for `n = 0..=degree`, from
/// samples on first-kind Gauss-Chebyshev nodes.
pub fn analyze_qhermite(f: &SampledFunction, q: QParameter, degree: usize, tol: Tolerance) -> Result<QHermiteSeries> {
    f.require_family(MODULE, RuleFamily::GaussChebyshevFirst)?;
    let rule = f.rule();
    let reduced = rule
        .nodes()
        .iter()
        .map(|&x| weight_w_reduced(x, q, tol))
        .collect::<Result<Vec<_>>>()?;
    let mut sums = vec![0.0; degree + 1];
    for (k, (&x, &w)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
        let factor = w * f.values()[k] * reduced[k];
        for (s, h) in sums.iter_mut().zip(qhermite_all(degree, x, q)) {
            *s += factor * h;
        }
    }
    let coeffs = sums
        .into_iter()
        .enumerate()
        .map(|(n, s)| Ok(s / orthogonality_norm(n, q, tol)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(QHermiteSeries::new(q, coeffs))
}

/// Normalization constant of the integral inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HermiteNormalization {
    /// `(1-q)(q;q)_∞/(4π√q)`: agrees with [`dq_inverse_hermite_spectral`].
    #[default]
    Calibrated,
    /// `(1-q)/(4π√q)`, without the `(q;q)_∞` of the norm.
    AsPrinted,
}

pub fn hermite_inverse_constant(q: QParameter, normalization: HermiteNormalization, tol: Tolerance) -> Result<f64> {
    let base = (1.0 - q.value()) / (4.0 * PI * q.sqrt());
    Ok(match normalization {
        HermiteNormalization::Calibrated => base * q_factorial_infinite(q, tol)?,
        HermiteNormalization::AsPrinted => base,
    })
}

/// `c ∫ H(x, t, √q) g(t) w(t) dt` at the points `xs`, with `g` sampled on
/// first-kind Gauss-Chebyshev nodes.
pub fn dq_inverse_hermite_integral_at(
    g: &SampledFunction,
    q: QParameter,
    tol: Tolerance,
    xs: &[f64],
    normalization: HermiteNormalization,
) -> Result<Vec<f64>> {
    g.require_family(MODULE, RuleFamily::GaussChebyshevFirst)?;
    let c = hermite_inverse_constant(q, normalization, tol)?;
    let rule = g.rule();
    let r = HermiteKernelParams::for_inverse(q).r;
    let weighted = rule
        .nodes()
        .iter()
        .zip(rule.weights())
        .zip(g.values())
        .map(|((&t, &w), &v)| Ok((t.acos(), w * v * weight_w_reduced(t, q, tol)?)))
        .collect::<Result<Vec<_>>>()?;
    xs.iter()
        .map(|&x| {
            if !(-1.0..=1.0).contains(&x) {
                return Err(Error::domain(MODULE, format!("x = {x} is outside [-1, 1]")));
            }
            let theta = x.acos();
            let mut sum = 0.0;
            for &(phi, wv) in &weighted {
                sum += kernel_h_closed(theta, phi, r, q, tol)? * wv;
            }
            Ok(c * sum)
        })
        .collect()
}

/// The integral inverse on the nodes of `out`.
pub fn dq_inverse_hermite_integral(
    g: &SampledFunction,
    q: QParameter,
    tol: Tolerance,
    out: &QuadratureRule,
) -> Result<SampledFunction> {
    if out.family() == RuleFamily::PeriodicTrapezoid {
        return Err(Error::grid(MODULE, "output grid must be a rule on [-1, 1]"));
    }
    let values = dq_inverse_hermite_integral_at(g, q, tol, out.nodes(), HermiteNormalization::Calibrated)?;
    SampledFunction::new(out.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::awoperator::dq_pointwise;
    use crate::chebyshev::eval_u;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn qp(q: f64) -> QParameter {
        QParameter::new(q).unwrap()
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn low_degree_values() {
        let q = qp(0.5);
        for theta in [0.0, 0.4, 2.2] {
            assert_eq!(qhermite_direct(0, theta, q), 1.0);
            assert!((qhermite_direct(1, theta, q) - 2.0 * f64::cos(theta)).abs() < 1e-15);
        }
        assert!((qhermite_direct(2, 0.0, q) - 3.5).abs() < 1e-14);
        for x in [-0.7, 0.1, 0.9] {
            assert!((qhermite_eval(2, x, qp(0.3)) - (4.0 * x * x - 1.0 + 0.3)).abs() < 1e-15);
        }
        for n in 0..=8 {
            assert_eq!(qhermite_direct(n, 0.7, q), qhermite_direct(n, -0.7, q));
        }
    }

    #[test]
    fn small_q_collapses_to_chebyshev_u() {
        let q = qp(1e-14);
        for n in 0..10 {
            for x in [-0.9, -0.2, 0.5] {
                assert!((qhermite_eval(n, x, q) - eval_u(n, x)).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn recurrence_matches_defining_sum() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(4);
        for _ in 0..20 {
            let x: f64 = rng.random_range(-1.0..1.0);
            let q = qp(rng.random_range(0.01..0.99));
            let all = qhermite_all(12, x, q);
            for (n, &h) in all.iter().enumerate() {
                let d = qhermite_direct(n, x.acos(), q);
                assert!((qhermite_eval(n, x, q) - d).abs() <= 1e-11 * d.abs().max(1.0));
                assert_eq!(h, qhermite_eval(n, x, q));
            }
        }
    }

    #[test]
    fn series_clenshaw_matches_termwise_sum() {
        let q = qp(0.6);
        let s = QHermiteSeries::new(q, vec![0.3, -1.0, 0.25, 2.0, 0.0, -0.5]);
        for x in [-0.95, -0.3, 0.0, 0.8] {
            let direct: f64 = s.coeffs().iter().enumerate().map(|(n, c)| c * qhermite_eval(n, x, q)).sum();
            assert!((s.evaluate(x) - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn weight_examples() {
        let q = qp(0.5);
        let m1 = qpochhammer(-1.0, q, Order::Infinite, tol()).unwrap();
        assert!((weight_w(0.0, q, tol()).unwrap() - m1 * m1).abs() < 1e-13 * m1 * m1);
        let tiny = qp(1e-15);
        for x in [-0.6, 0.2, 0.9] {
            let v = weight_w(x, tiny, tol()).unwrap();
            assert!((v - 4.0 * (1.0 - x * x).sqrt()).abs() < 1e-12);
        }
        let w = weight_w(0.4, qp(0.6), tol()).unwrap();
        let reduced = weight_w_reduced(0.4, qp(0.6), tol()).unwrap() / (1.0f64 - 0.16).sqrt();
        assert!((w - reduced).abs() <= 1e-12 * w);
        assert!(matches!(weight_w(1.0, q, tol()), Err(Error::Domain { .. })));
        assert!(matches!(weight_w(-1.0, q, tol()), Err(Error::Domain { .. })));
    }

    #[test]
    fn generating_function_examples() {
        let q = qp(0.5);
        assert_eq!(generating_function(0.3, 0.0, q, tol()).unwrap(), 1.0);
        let x = 0.35;
        let h = 1e-6;
        let fd = (generating_function(x, h, q, tol()).unwrap() - generating_function(x, -h, q, tol()).unwrap()) / (2.0 * h);
        assert!((fd - 2.0 * x / (1.0 - 0.5)).abs() < 1e-8);
        let r: f64 = 0.3;
        let series: f64 = (0..=60).map(|n| qhermite_eval(n, x, q) * r.powi(n as i32) / q_factorial(q, n)).sum();
        assert!((generating_function(x, r, q, tol()).unwrap() - series).abs() < 1e-10);
        assert!(generating_function(x, 1.0, q, tol()).is_err());
    }

    #[test]
    fn orthogonality_examples() {
        let q = qp(0.5);
        let qinf = q_factorial_infinite(q, tol()).unwrap();
        assert!((qinf - 0.288788).abs() < 1e-6);
        let v00 = orthogonality_check(0, 0, q, 64, tol()).unwrap();
        assert!((v00 - 2.0 * PI / qinf).abs() < 1e-11 && (v00 - 21.7563).abs() < 1e-3);
        assert!(orthogonality_check(0, 1, q, 64, tol()).unwrap().abs() < 1e-10);
        let v22 = orthogonality_check(2, 2, q, 64, tol()).unwrap();
        assert!((v22 - 2.0 * PI * 0.375 / qinf).abs() < 1e-11);
    }

    #[test]
    fn gram_matrix_is_diagonal_with_the_norms() {
        for qv in [0.2, 0.5, 0.8] {
            let q = qp(qv);
            for m in 0..=6 {
                for n in 0..=6 {
                    let v = orthogonality_check(m, n, q, 128, tol()).unwrap();
                    let norm = orthogonality_norm(n, q, tol()).unwrap();
                    let expected = if m == n { norm } else { 0.0 };
                    assert!((v - expected).abs() <= 1e-8 * norm, "q={qv} ({m},{n}) {v}");
                }
            }
        }
    }

    #[test]
    fn poisson_kernel_examples() {
        let q = qp(0.5);
        assert_eq!(poisson_kernel(0.4, 1.3, 0.0, q, tol()).unwrap(), 1.0);
        let p = |t, f| poisson_kernel(t, f, 0.3, q, tol()).unwrap();
        assert!((p(0.7, 1.1) - p(1.1, 0.7)).abs() < 1e-15);
        assert!((p(0.7, 1.1) - p(-0.7, 1.1)).abs() < 1e-15);
        let (theta, phi, r): (f64, f64, f64) = (0.7, 1.1, 0.3);
        let series: f64 = (0..=80)
            .map(|n| {
                qhermite_eval(n, theta.cos(), q) * qhermite_eval(n, phi.cos(), q) * r.powi(n as i32) / q_factorial(q, n)
            })
            .sum();
        assert!((p(theta, phi) - series).abs() < 1e-10);
        let w = Complex64::from_polar(1.0, phi);
        let breve = poisson_kernel_breve(theta, w, r, q, tol()).unwrap();
        assert!((breve.re - p(theta, phi)).abs() < 1e-14 && breve.im.abs() < 1e-14);
    }

    #[test]
    fn spectral_operator_examples() {
        let q = qp(0.3);
        assert_eq!(dq_hermite_spectral(&QHermiteSeries::basis(q, 1)).coeffs(), &[2.0]);
        assert!(dq_hermite_spectral(&QHermiteSeries::basis(q, 0)).coeffs().iter().all(|&c| c == 0.0));
        let q = qp(0.25);
        let g = dq_hermite_spectral(&QHermiteSeries::basis(q, 2));
        assert!((g.coeff(1) - 5.0).abs() < 1e-14 && g.coeff(0) == 0.0);
        // Cross-check against the divided difference on 4x² - 1 + q.
        let fbreve = |w: Complex64| {
            let x = (w + w.inv()) * 0.5;
            x * x * 4.0 - 1.0 + 0.25
        };
        for x in [-0.5, 0.2, 0.7] {
            let v = dq_pointwise(fbreve, x, q).unwrap();
            assert!((v - 5.0 * 2.0 * x).abs() < 1e-12);
        }
        let f = dq_inverse_hermite_spectral(&QHermiteSeries::basis(q, 0));
        assert_eq!(f.coeffs(), &[0.0, 0.5]);
        let z = dq_inverse_hermite_spectral(&QHermiteSeries::new(q, vec![0.0]));
        assert!(z.coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn kernel_h_series_examples() {
        let q = qp(0.5);
        assert_eq!(kernel_h_series(0.3, 0.5, 0.0, q, 40).unwrap(), 0.0);
        let one = kernel_h_series(0.3, 0.5, 0.2, q, 1).unwrap();
        assert!((one - 0.2 * 2.0 * f64::cos(0.3) / 0.5).abs() < 1e-15);
        let a = kernel_h_series(0.3, 0.5, 0.2, q, 60).unwrap();
        let b = kernel_h_series(0.3, 0.5, 0.2, q, 80).unwrap();
        assert!((a - b).abs() < 1e-12);
        // term-by-term against the recurrence evaluator
        let (x, t) = (f64::cos(0.3), f64::cos(0.5));
        let direct: f64 = (1..=30)
            .map(|n| 0.2f64.powi(n as i32) * qhermite_eval(n, x, q) * qhermite_eval(n - 1, t, q) / q_factorial(q, n))
            .sum();
        assert!((kernel_h_series(0.3, 0.5, 0.2, q, 30).unwrap() - direct).abs() < 1e-15);
    }

    #[test]
    fn closed_kernel_matches_series() {
        let q = qp(0.5);
        assert_eq!(kernel_h_closed(0.3, 0.5, 0.0, q, tol()).unwrap(), 0.0);
        let c = kernel_h_closed(0.3, 0.5, 0.2, q, tol()).unwrap();
        let s = kernel_h_series(0.3, 0.5, 0.2, q, 80).unwrap();
        assert!((c - s).abs() < 1e-10, "{c} {s}");
        let mut rng = rand::rngs::StdRng::seed_from_u64(9);
        for _ in 0..50 {
            let theta = rng.random_range(-PI..PI);
            let phi = rng.random_range(-PI..PI);
            let r = rng.random_range(-0.5..0.5);
            let q = qp(rng.random_range(0.05..0.95));
            let c = kernel_h_closed(theta, phi, r, q, tol()).unwrap();
            let s = kernel_h_series(theta, phi, r, q, 120).unwrap();
            // Near θ ± φ ≡ 0 with q close to 1 the kernel reaches ~10⁷.
            assert!((c - s).abs() < 1e-10 * s.abs().max(1.0), "{theta} {phi} {r} {} {c} {s}", q.value());
        }
    }

    #[test]
    fn printed_closed_form_does_not_match() {
        // Summand rq^k(-cos θ + rq^k cos φ)(...) is -1/2 of the telescoped one.
        let q = qp(0.5);
        let (theta, phi, r) = (0.3f64, 0.5f64, 0.2f64);
        let printed = -0.5 * kernel_h_closed(theta, phi, r, q, tol()).unwrap();
        let s = kernel_h_series(theta, phi, r, q, 80).unwrap();
        assert!((printed - s).abs() > 1e-2);
    }

    #[test]
    fn telescoping_identity() {
        let q = qp(0.5);
        let (theta, phi, r) = (0.9, 0.4, 0.25);
        let lhs = kernel_h_closed(theta, phi, r * q.inv_sqrt(), q, tol()).unwrap()
            - kernel_h_closed(theta, phi, r * q.sqrt(), q, tol()).unwrap();
        let lhs_series = kernel_h_series(theta, phi, r * q.inv_sqrt(), q, 120).unwrap()
            - kernel_h_series(theta, phi, r * q.sqrt(), q, 120).unwrap();
        let rhs = telescoping_rhs(theta, phi, r, q, tol()).unwrap();
        assert!((lhs - rhs).abs() < 1e-10 && (lhs_series - rhs).abs() < 1e-10);
    }

    #[test]
    fn dq_of_poisson_kernel_in_phi() {
        let q = qp(0.5);
        for (theta, phi, r) in [(0.9, 0.4, 0.25), (2.0, 1.3, -0.3), (0.2, 2.7, 0.4)] {
            let fbreve = |w: Complex64| poisson_kernel_breve(theta, w, r, q, tol()).unwrap();
            let v = dq_pointwise(fbreve, f64::cos(phi), q).unwrap();
            let closed = poisson_kernel_dq_phi(theta, phi, r, q, tol()).unwrap();
            let via_h = 2.0 * q.sqrt() / (1.0 - q.value()) * telescoping_rhs(theta, phi, r, q, tol()).unwrap();
            assert!((v - closed).abs() < 1e-9 && (closed - via_h).abs() < 1e-12, "{v} {closed}");
        }
    }

    fn gauss_samples(m: usize, f: impl Fn(f64) -> f64) -> SampledFunction {
        SampledFunction::from_fn(&gauss_chebyshev_first(m).unwrap(), f)
    }

    #[test]
    fn integral_inverse_examples() {
        let q = qp(0.5);
        let out = gauss_chebyshev_first(32).unwrap();
        let f = dq_inverse_hermite_integral(&gauss_samples(128, |_| 1.0), q, tol(), &out).unwrap();
        for (&x, &v) in f.nodes().iter().zip(f.values()) {
            assert!((v - x).abs() <= 1e-8);
        }
        let f = dq_inverse_hermite_integral(&gauss_samples(128, |x| 2.0 * x), q, tol(), &out).unwrap();
        let c = (1.0 - 0.5) * q.sqrt() / (2.0 * (1.0 - 0.25));
        for (&x, &v) in f.nodes().iter().zip(f.values()) {
            assert!((v - c * qhermite_eval(2, x, q)).abs() <= 1e-8);
        }
        let f = dq_inverse_hermite_integral(&gauss_samples(128, |_| 0.0), q, tol(), &out).unwrap();
        assert!(f.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn calibrated_constant_is_required() {
        let q = qp(0.5);
        let g = gauss_samples(128, |_| 1.0);
        let xs = [0.3];
        let good = dq_inverse_hermite_integral_at(&g, q, tol(), &xs, HermiteNormalization::Calibrated).unwrap()[0];
        let printed = dq_inverse_hermite_integral_at(&g, q, tol(), &xs, HermiteNormalization::AsPrinted).unwrap()[0];
        assert!((good - 0.3).abs() < 1e-10);
        assert!((printed - 0.3).abs() > 0.1);
        let measured = printed / 0.3;
        assert!((measured - 1.0 / q_factorial_infinite(q, tol()).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn integral_roundtrip_on_low_span() {
        for qv in [0.2, 0.5, 0.8] {
            let q = qp(qv);
            let out = gauss_chebyshev_first(128).unwrap();
            for k in 0..=6 {
                let g = gauss_samples(128, |x| qhermite_eval(k, x, q));
                let f = dq_inverse_hermite_integral(&g, q, tol(), &out).unwrap();
                let back = dq_hermite_spectral(&analyze_qhermite(&f, q, 10, tol()).unwrap());
                for n in 0..=9 {
                    let expected = if n == k { 1.0 } else { 0.0 };
                    assert!((back.coeff(n) - expected).abs() <= 1e-7, "q={qv} k={k} n={n}");
                }
            }
        }
    }

    #[test]
    fn grid_family_is_enforced() {
        let g = SampledFunction::from_fn(&crate::quadrature::gauss_chebyshev_second(16).unwrap(), |x| x);
        let out = gauss_chebyshev_first(8).unwrap();
        assert!(matches!(
            dq_inverse_hermite_integral(&g, qp(0.5), tol(), &out),
            Err(Error::GridMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn spectral_roundtrip(c in proptest::collection::vec(-1.0f64..1.0, 20), qv in 0.05f64..0.95) {
            let q = qp(qv);
            let g = QHermiteSeries::new(q, c.clone());
            let back = dq_hermite_spectral(&dq_inverse_hermite_spectral(&g));
            for (n, &cn) in c.iter().enumerate() {
                prop_assert!((back.coeff(n) - cn).abs() <= 1e-13);
            }
        }

        #[test]
        fn generating_function_reexpands(x in -1.0f64..1.0, r in -0.5f64..0.5, qv in 0.05f64..0.9) {
            let q = qp(qv);
            let series: f64 = qhermite_all(80, x, q)
                .iter()
                .enumerate()
                .map(|(n, h)| h * r.powi(n as i32) / q_factorial(q, n))
                .sum();
            let v = generating_function(x, r, q, tol()).unwrap();
            prop_assert!((v - series).abs() <= 1e-10 * v.abs().max(1.0));
        }

        #[test]
        fn weight_forms_agree(x in -0.999f64..0.999, qv in 0.05f64..0.95) {
            prop_assert!(weight_w(x, qp(qv), tol()).is_ok());
        }
    }
}
