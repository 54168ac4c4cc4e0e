//! The Askey-Wilson operator `D_q` and its right inverse `D_q^{-1}`.
//!
//! On Chebyshev coefficients `D_q` is diagonal: `f = Σ f_n T_n` maps to
//! `Σ μ_n f_n U_{n-1}` with
//!
//! ```text
//! μ_n = (q^{n/2} - q^{-n/2}) / (q^{1/2} - q^{-1/2}) = q^{-(n-1)/2} (1 - qⁿ)/(1 - q).
//! ```
//!
//! The right inverse divides by `μ_n` and fixes the constant term at zero.
//! It is also available as an integral operator over `φ ∈ [-π, π)` whose
//! kernel is `ϑ₄'/ϑ₄` at nome `q^{1/2}`, and as an integral against the
//! Chebyshev-series kernel `F(x, y)`. All three agree; the tests pin them
//! against each other.
//!
//! Orientation of the theta kernel: with the kernel argument `(θ - φ)/2`
//! the integral returns the *negative* of the spectral inverse, because only
//! the `-cos nθ sin nφ` part of `sin n(θ - φ)` survives against the odd
//! function `g(cos φ) sin φ`. The operator here uses `(φ - θ)/2`;
//! [`KernelOrientation::AsPrinted`] keeps the other orientation reachable
//! for the calibration test.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::chebyshev::{self, ChebyshevSeriesT, ChebyshevSeriesU};
use crate::conformal::joukowski_exterior;
use crate::quadrature::{gauss_chebyshev_second, QuadratureRule, RuleFamily, SampledFunction};
use crate::theta::{theta4_logderiv, ThetaMethod};
use crate::{Error, QParameter, Result, Tolerance};

const MODULE: &str = "awoperator";

/// Imaginary parts of `dq_pointwise` below this are rounding noise.
pub const IMAGINARY_RESIDUE: f64 = 1e-10;

/// `|sin θ|` below this is treated as the endpoint singularity.
pub const ENDPOINT_GUARD: f64 = 1e-10;

/// `μ_n`, with `μ_0 = 0` so a constant is annihilated.
pub fn multiplier(n: usize, q: QParameter) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let qv = q.value();
    // q^{-(n-1)/2}(1-q^n)/(1-q); exact 1 at n = 1.
    q.half_power(1 - n as i32) * (1.0 - qv.powi(n as i32)) / (1.0 - qv)
}

/// The multipliers `μ_0..=μ_N` of the spectral `D_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct AWCoefficientMap {
    q: QParameter,
    mu: Vec<f64>,
}

impl AWCoefficientMap {
    pub fn new(q: QParameter, degree: usize) -> Self {
        Self {
            q,
            mu: (0..=degree).map(|n| multiplier(n, q)).collect(),
        }
    }

    pub fn q(&self) -> QParameter {
        self.q
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn get(&self, n: usize) -> f64 {
        self.mu.get(n).copied().unwrap_or_else(|| multiplier(n, self.q))
    }
}

/// The ellipse `|z + √(z²-1)| = q^{-1/2}`, with foci `±1`, inside which
/// `D_q^{-1} g` extends analytically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseOfAnalyticity {
    pub q: QParameter,
    pub semi_major: f64,
    pub semi_minor: f64,
}

impl EllipseOfAnalyticity {
    pub fn new(q: QParameter) -> Self {
        Self {
            q,
            semi_major: 0.5 * (q.inv_sqrt() + q.sqrt()),
            semi_minor: 0.5 * (q.inv_sqrt() - q.sqrt()),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        joukowski_exterior(z).norm() < self.q.inv_sqrt()
    }
}

/// `g_n = μ_n f_n`; the `T_0` component is annihilated.
pub fn dq_spectral(f: &ChebyshevSeriesT, q: QParameter) -> ChebyshevSeriesU {
    let mut coeffs = vec![0.0; f.len().max(1)];
    for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
        *c = multiplier(n, q) * f.coeff(n);
    }
    ChebyshevSeriesU::new(coeffs).expect("slot 0 is zero by construction")
}

/// `f_n = g_n / μ_n` for `n ≥ 1`, `f_0 = 0`.
pub fn dq_inverse_spectral(g: &ChebyshevSeriesU, q: QParameter) -> ChebyshevSeriesT {
    let mut coeffs = vec![0.0; g.len().max(1)];
    for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
        *c = g.coeff(n) / multiplier(n, q);
    }
    ChebyshevSeriesT::new(coeffs)
}

/// The divided difference
/// `[f̆(q^{1/2}e^{iθ}) - f̆(q^{-1/2}e^{iθ})] / [i(q^{1/2}-q^{-1/2}) sin θ]`,
/// `x = cos θ`, where `fbreve(w)` is the caller's analytic extension of
/// `f((w + 1/w)/2)`.
pub fn dq_pointwise(
    fbreve: impl Fn(Complex64) -> Complex64,
    x: f64,
    q: QParameter,
) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::domain(MODULE, format!("x = {x} is outside [-1, 1]")));
    }
    let sin_theta = (1.0 - x * x).max(0.0).sqrt();
    if sin_theta < ENDPOINT_GUARD {
        return Err(Error::domain(
            MODULE,
            format!("x = {x} is at the endpoint singularity of the divided difference"),
        ));
    }
    let e = Complex64::new(x, sin_theta);
    let numerator = fbreve(e * q.sqrt()) - fbreve(e * q.inv_sqrt());
    let denominator = Complex64::new(0.0, (q.sqrt() - q.inv_sqrt()) * sin_theta);
    let v = numerator / denominator;
    if v.im.abs() > IMAGINARY_RESIDUE * v.re.abs().max(1.0) {
        return Err(Error::NonReal {
            module: MODULE,
            residue: v.im,
        });
    }
    Ok(v.re)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailClass {
    Converging,
    Diverging,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DifferentiabilityReport {
    /// `Σ_{n≤k} |(1-qⁿ) q^{-n/2} f_n|²` for `k = 0..=horizon`.
    pub partial_sums: Vec<f64>,
    /// Per-term ratio fitted over the second half of the horizon.
    pub geometric_ratio: f64,
    /// Exponent `p` of a fitted `n^{-p}` decay over the same window.
    pub power_exponent: f64,
    pub class: TailClass,
}

/// Tests the q-differentiability condition `Σ |(1-qⁿ) q^{-n/2} f_n|² < ∞`
/// from the coefficients up to `horizon`. The tail is classified by the
/// decay exponent of the terms over the second half of the horizon, as in
/// the integral test: `p > 1` converges, `p < 1` diverges.
pub fn check_q_differentiable(
    coeff: impl Fn(usize) -> f64,
    q: QParameter,
    horizon: usize,
) -> DifferentiabilityReport {
    let horizon = horizon.max(4);
    let qv = q.value();
    let terms: Vec<f64> = (0..=horizon)
        .map(|n| {
            let t = (1.0 - qv.powi(n as i32)) * q.half_power(-(n as i32)) * coeff(n);
            t * t
        })
        .collect();
    let partial_sums = terms
        .iter()
        .scan(0.0, |acc, &t| {
            *acc += t;
            Some(*acc)
        })
        .collect();

    let lo = horizon / 2;
    let (t_lo, t_hi) = (terms[lo], terms[horizon]);
    let (geometric_ratio, power_exponent, class) = if terms[lo..].iter().all(|&t| t == 0.0) {
        (0.0, f64::INFINITY, TailClass::Converging)
    } else if t_lo == 0.0 || t_hi == 0.0 || !t_lo.is_finite() || !t_hi.is_finite() {
        let class = if terms.iter().any(|t| t.is_infinite()) {
            TailClass::Diverging
        } else {
            TailClass::Inconclusive
        };
        (f64::NAN, f64::NAN, class)
    } else {
        let log_ratio = (t_hi / t_lo).ln();
        let ratio = (log_ratio / (horizon - lo) as f64).exp();
        let p = -log_ratio / (horizon as f64 / lo as f64).ln();
        let class = if p > 1.1 {
            TailClass::Converging
        } else if p < 0.9 {
            TailClass::Diverging
        } else {
            TailClass::Inconclusive
        };
        (ratio, p, class)
    };
    DifferentiabilityReport {
        partial_sums,
        geometric_ratio,
        power_exponent,
        class,
    }
}

/// A finite series always satisfies the condition; the report carries its
/// weighted energy in `partial_sums`.
pub fn check_q_differentiable_series(f: &ChebyshevSeriesT, q: QParameter) -> DifferentiabilityReport {
    check_q_differentiable(|n| f.coeff(n), q, 2 * f.len().max(2))
}

/// Orientation of the theta kernel argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelOrientation {
    /// `(φ - θ)/2`: agrees with [`dq_inverse_spectral`].
    #[default]
    Calibrated,
    /// `(θ - φ)/2`: the negative of the spectral inverse.
    AsPrinted,
}

/// `(1 - q) / (4π q^{1/2})`
pub fn theta_kernel_prefactor(q: QParameter) -> f64 {
    (1.0 - q.value()) / (4.0 * PI * q.sqrt())
}

/// `D_q^{-1}` as a quadrature matrix against samples `g(cos φ_j)` on the
/// periodic trapezoid grid:
///
/// `f(cos θ) = (1-q)/(4π√q) Σ_j w_j K((φ_j - θ)/2) g(cos φ_j) sin φ_j`,
///
/// `K = ϑ₄'/ϑ₄` at nome `q^{1/2}`, evaluated by its Fourier series.
#[derive(Debug, Clone)]
pub struct ThetaKernelOperator {
    grid: QuadratureRule,
    thetas: Vec<f64>,
    matrix: Vec<f64>,
}

impl ThetaKernelOperator {
    pub fn new(
        q: QParameter,
        tol: Tolerance,
        grid: &QuadratureRule,
        thetas: &[f64],
        orientation: KernelOrientation,
    ) -> Result<Self> {
        if grid.family() != RuleFamily::PeriodicTrapezoid {
            return Err(Error::grid(
                MODULE,
                format!("theta-kernel operator integrates over a periodic grid, got {}", grid.family().name()),
            ));
        }
        let nome = q.sqrt_parameter();
        let prefactor = theta_kernel_prefactor(q);
        let m = grid.len();
        let mut matrix = Vec::with_capacity(thetas.len() * m);
        for &theta in thetas {
            for (&phi, &w) in grid.nodes().iter().zip(grid.weights()) {
                let arg = match orientation {
                    KernelOrientation::Calibrated => 0.5 * (phi - theta),
                    KernelOrientation::AsPrinted => 0.5 * (theta - phi),
                };
                let k = theta4_logderiv(arg, nome, tol, ThetaMethod::FourierSeries)?.value;
                matrix.push(prefactor * w * k * phi.sin());
            }
        }
        Ok(Self {
            grid: grid.clone(),
            thetas: thetas.to_vec(),
            matrix,
        })
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Values `f(cos θ_i)` at the operator's output angles.
    pub fn apply(&self, g: &SampledFunction) -> Result<Vec<f64>> {
        apply_matrix(&self.grid, &self.matrix, g)
    }
}

/// `D_q^{-1}` through the Chebyshev-series kernel `F(x, y)`, on the same
/// trapezoid samples. The integrand `F(cos θ, cos φ) g(cos φ) sin²φ` is even
/// in `φ`, so the integral over `[0, π]` is half the full-period sum.
#[derive(Debug, Clone)]
pub struct SeriesKernelOperator {
    grid: QuadratureRule,
    thetas: Vec<f64>,
    matrix: Vec<f64>,
}

impl SeriesKernelOperator {
    pub fn new(q: QParameter, tol: Tolerance, grid: &QuadratureRule, thetas: &[f64]) -> Result<Self> {
        if grid.family() != RuleFamily::PeriodicTrapezoid {
            return Err(Error::grid(
                MODULE,
                format!("series-kernel operator integrates over a periodic grid, got {}", grid.family().name()),
            ));
        }
        let mut matrix = Vec::with_capacity(thetas.len() * grid.len());
        for &theta in thetas {
            let x = theta.cos();
            for (&phi, &w) in grid.nodes().iter().zip(grid.weights()) {
                let s = phi.sin();
                matrix.push(0.5 * w * kernel_f(x, phi.cos(), q, tol)? * s * s);
            }
        }
        Ok(Self {
            grid: grid.clone(),
            thetas: thetas.to_vec(),
            matrix,
        })
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn apply(&self, g: &SampledFunction) -> Result<Vec<f64>> {
        apply_matrix(&self.grid, &self.matrix, g)
    }
}

fn apply_matrix(grid: &QuadratureRule, matrix: &[f64], g: &SampledFunction) -> Result<Vec<f64>> {
    g.require_family(MODULE, RuleFamily::PeriodicTrapezoid)?;
    if g.rule().len() != grid.len() {
        return Err(Error::grid(
            MODULE,
            format!("operator built for {} nodes, samples have {}", grid.len(), g.rule().len()),
        ));
    }
    let m = grid.len();
    Ok(matrix
        .chunks_exact(m)
        .map(|row| row.iter().zip(g.values()).map(|(a, v)| a * v).sum())
        .collect())
}

/// Output angles for an evaluation grid: the nodes themselves for the
/// trapezoid rule, `arccos x` for the Chebyshev rules.
pub fn output_angles(out: &QuadratureRule) -> Vec<f64> {
    match out.family() {
        RuleFamily::PeriodicTrapezoid => out.nodes().to_vec(),
        _ => out.nodes().iter().map(|x| x.acos()).collect(),
    }
}

/// `D_q^{-1} g` by the theta-kernel integral, evaluated on the grid `out`.
pub fn dq_inverse_integral(
    g: &SampledFunction,
    q: QParameter,
    tol: Tolerance,
    out: &QuadratureRule,
) -> Result<SampledFunction> {
    g.require_family(MODULE, RuleFamily::PeriodicTrapezoid)?;
    let op = ThetaKernelOperator::new(q, tol, g.rule(), &output_angles(out), KernelOrientation::Calibrated)?;
    SampledFunction::new(out.clone(), op.apply(g)?)
}

/// `D_q^{-1} g` by the theta-kernel integral at arbitrary angles.
pub fn dq_inverse_integral_at(
    g: &SampledFunction,
    q: QParameter,
    tol: Tolerance,
    thetas: &[f64],
    orientation: KernelOrientation,
) -> Result<Vec<f64>> {
    ThetaKernelOperator::new(q, tol, g.rule(), thetas, orientation)?.apply(g)
}

/// `F(x, y) = 2(1-q)/(π√q) Σ_{n≥1} T_n(x) U_{n-1}(y) q^{n/2}/(1-qⁿ)`,
/// truncated once `n q^{n/2} < rel_eps (1-q)`.
pub fn kernel_f(x: f64, y: f64, q: QParameter, tol: Tolerance) -> Result<f64> {
    let qv = q.value();
    let threshold = tol.rel_eps * (1.0 - qv);
    let (mut t_prev, mut t) = (1.0, x);
    let (mut u_prev, mut u) = (0.0, 1.0);
    let mut qh = q.sqrt();
    let mut sum = 0.0;
    for n in 1..=tol.max_terms {
        sum += t * u * qh / (1.0 - qh * qh);
        qh *= q.sqrt();
        if qh * (n + 1) as f64 <= threshold {
            return Ok(2.0 * (1.0 - qv) / (PI * q.sqrt()) * sum);
        }
        let t_next = 2.0 * x * t - t_prev;
        t_prev = t;
        t = t_next;
        let u_next = 2.0 * y * u - u_prev;
        u_prev = u;
        u = u_next;
    }
    Err(Error::Truncation {
        module: MODULE,
        terms: tol.max_terms,
        partial: sum.into(),
    })
}

/// `G(cos θ, cos φ) = (1-q)/(π√q) Σ_{n≥1} q^{n/2}/(1-qⁿ) sin n(θ+φ)`.
/// Its odd part in `φ` is the `φ`-form of `F`:
/// `F(cos θ, cos φ) sin φ = G(θ, φ) - G(θ, -φ)`.
pub fn kernel_g(theta: f64, phi: f64, q: QParameter, tol: Tolerance) -> Result<f64> {
    let qv = q.value();
    let threshold = tol.rel_eps * (1.0 - qv);
    let mut qh = 1.0;
    let mut sum = 0.0;
    for n in 1..=tol.max_terms {
        qh *= q.sqrt();
        if qh < threshold {
            return Ok((1.0 - qv) / (PI * q.sqrt()) * sum);
        }
        sum += qh / (1.0 - qh * qh) * (n as f64 * (theta + phi)).sin();
    }
    Err(Error::Truncation {
        module: MODULE,
        terms: tol.max_terms,
        partial: sum.into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitOptions {
    /// Degree of the U-analysis of `g`.
    pub degree: usize,
    /// Second-kind Gauss nodes used for that analysis.
    pub analysis_nodes: usize,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self {
            degree: 128,
            analysis_nodes: 2048,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitRow {
    pub p: f64,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitTable {
    pub x: f64,
    pub target: f64,
    pub rows: Vec<LimitRow>,
}

impl LimitTable {
    pub fn initial_error(&self) -> f64 {
        self.rows.first().map_or(0.0, |r| r.error)
    }

    pub fn final_error(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.error)
    }

    /// Errors over the second half of the table never increase.
    pub fn is_eventually_decreasing(&self) -> bool {
        let start = self.rows.len() / 2;
        self.rows[start..].windows(2).all(|w| w[1].error <= w[0].error)
    }
}

/// `μ_n(p)/μ_n(q) = (q/p)^{(n-1)/2} (1-pⁿ)(1-q) / ((1-qⁿ)(1-p))`, without
/// forming either multiplier (both overflow for large `n`).
pub fn multiplier_ratio(n: usize, p: QParameter, q: QParameter) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let (pv, qv) = (p.value(), q.value());
    let n_i = n as i32;
    (0.5 * (n as f64 - 1.0) * (qv / pv).ln()).exp() * (1.0 - pv.powi(n_i)) * (1.0 - qv)
        / ((1.0 - qv.powi(n_i)) * (1.0 - pv))
}

fn check_limit_inputs(q: QParameter, x: f64, p_sequence: &[f64]) -> Result<()> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::domain(MODULE, format!("x = {x} is outside [-1, 1]")));
    }
    for (k, &p) in p_sequence.iter().enumerate() {
        if !(p > q.value() && p < 1.0) {
            return Err(Error::invalid(
                MODULE,
                format!("p = {p} must lie in (q, 1) = ({}, 1)", q.value()),
            ));
        }
        if k > 0 && p >= p_sequence[k - 1] {
            return Err(Error::invalid(MODULE, "p sequence must be strictly decreasing"));
        }
    }
    Ok(())
}

/// `(D_p D_q^{-1} g)(x)` for each `p` of a sequence decreasing towards `q`,
/// with `D_p` applied spectrally to the degree-`N` U-analysis of `g`.
pub fn theorem_2_2_limit(
    g: impl Fn(f64) -> f64,
    q: QParameter,
    x: f64,
    p_sequence: &[f64],
    opts: LimitOptions,
) -> Result<LimitTable> {
    check_limit_inputs(q, x, p_sequence)?;
    let rule = gauss_chebyshev_second(opts.analysis_nodes.max(opts.degree))?;
    let g_series = chebyshev::analyze_u(&SampledFunction::from_fn(&rule, &g), opts.degree)?;
    theorem_2_2_limit_series(&g_series, g(x), q, x, p_sequence)
}

/// As [`theorem_2_2_limit`] for a `g` given by its U-coefficients, compared
/// against `target`. `D_p D_q^{-1}` scales `g_n` by [`multiplier_ratio`],
/// which decays like `(q/p)^{n/2}`; when `p` is close to `q` the series must
/// be long enough for that factor to cut it off.
pub fn theorem_2_2_limit_series(
    g: &ChebyshevSeriesU,
    target: f64,
    q: QParameter,
    x: f64,
    p_sequence: &[f64],
) -> Result<LimitTable> {
    check_limit_inputs(q, x, p_sequence)?;
    let rows = p_sequence
        .iter()
        .map(|&p| {
            let p_param = QParameter::new(p)?;
            let mut coeffs = g.coeffs().to_vec();
            for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
                *c *= multiplier_ratio(n, p_param, q);
            }
            let value = ChebyshevSeriesU::new(coeffs)?.synthesize(x);
            Ok(LimitRow {
                p,
                value,
                error: (value - target).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LimitTable { x, target, rows })
}

/// Length at which `(q/p)^{n/2}` drops below `rel_eps`, i.e. where the
/// series passed to [`theorem_2_2_limit_series`] may be cut for the
/// smallest `p` of a sequence.
pub fn limit_series_degree(q: QParameter, p_min: f64, tol: Tolerance) -> Result<usize> {
    if !(p_min > q.value() && p_min < 1.0) {
        return Err(Error::invalid(MODULE, format!("p = {p_min} must lie in (q, 1)")));
    }
    let n = (2.0 * tol.rel_eps.ln().abs() / (p_min / q.value()).ln()).ceil() as usize + 2;
    if n > tol.max_terms {
        return Err(Error::Truncation {
            module: MODULE,
            terms: tol.max_terms,
            partial: Complex64::new(0.0, 0.0),
        });
    }
    Ok(n)
}

/// U-coefficients of `sign(x)` through `U_{degree-1}`:
/// `g_n = (4n/π) sin((n-1)π/2) / (n² - 1)` for even `n`, zero for odd `n`.
pub fn sign_function_series(degree: usize) -> ChebyshevSeriesU {
    let mut coeffs = vec![0.0; degree + 1];
    for (n, c) in coeffs.iter_mut().enumerate().skip(2).step_by(2) {
        let s = if (n / 2) % 2 == 1 { 1.0 } else { -1.0 };
        let nf = n as f64;
        *c = 4.0 * nf / PI * s / (nf * nf - 1.0);
    }
    ChebyshevSeriesU::new(coeffs).expect("slot 0 is zero")
}

/// `p_k = q + 2^{-k}(1-q)/2`, `k = 1..=count`.
pub fn halving_sequence(q: QParameter, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|k| q.value() + 0.5f64.powi(k as i32) * (1.0 - q.value()) / 2.0)
        .collect()
}
