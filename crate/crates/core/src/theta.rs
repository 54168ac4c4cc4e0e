//! The Jacobi theta function `ϑ₄(z, q) = Σ_{n∈ℤ} (-1)^n q^{n²} e^{2inz}` and
//! its logarithmic derivative.
//!
//! The log-derivative is available two ways:
//!
//! - [`ThetaMethod::FourierSeries`]: `4 Σ_{n≥1} qⁿ/(1-q²ⁿ) sin 2nz`, the
//!   default kernel path;
//! - [`ThetaMethod::DefiningSeries`]: the ratio `ϑ₄'/ϑ₄` of the defining
//!   series and its termwise derivative.
//!
//! For nomes near 1, `ϑ₄(z, q)` is many orders of magnitude smaller than its
//! largest terms (about `7·10⁻¹⁰` at `z = 0`, `q = 0.9`), so the defining
//! series is summed in double-double arithmetic. The rotation `e^{2iz}` is
//! normalized to unit modulus in the same precision; rounding it to a
//! nearby angle only perturbs `z`, which the function tolerates well.

use crate::dd::Dd;
use crate::{Error, QParameter, Result, Tolerance};

const MODULE: &str = "theta";

/// Below this magnitude of `ϑ₄` the defining-series ratio is refused.
pub const DIVISION_HAZARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaMethod {
    DefiningSeries,
    FourierSeries,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaEvaluation {
    pub value: f64,
    pub terms_used: usize,
    pub method: ThetaMethod,
}

struct DefiningSums {
    theta: Dd,
    derivative: Dd,
    terms: usize,
}

/// `ϑ₄(z)` and `ϑ₄'(z)` from the folded defining series
/// `1 + 2 Σ (-1)^n q^{n²} cos 2nz` and `-4 Σ (-1)^n n q^{n²} sin 2nz`.
///
/// Stops once `n q^{n²}` drops below `rel_eps²`: the sum can be as small as
/// `rel_eps` times its leading terms, so the threshold has to clear that.
fn defining_sums(z: f64, nome: QParameter, tol: Tolerance) -> Result<DefiningSums> {
    let q = Dd::from(nome.value());
    let q2 = q * q;
    let threshold = tol.rel_eps * tol.rel_eps;

    let (s1, c1) = (2.0 * z).sin_cos();
    let (c1, s1) = (Dd::from(c1), Dd::from(s1));
    let norm = (c1 * c1 + s1 * s1).sqrt();
    let (c1, s1) = (c1 / norm, s1 / norm);

    let one = Dd::ONE;
    let mut theta = one;
    let mut derivative = Dd::ZERO;
    let (mut cos_n, mut sin_n) = (one, Dd::ZERO);
    // q^{n²} and q^{2n+1}
    let mut qn2 = one;
    let mut step = q;
    for n in 1..=tol.max_terms {
        qn2 = qn2 * step;
        step = step * q2;
        let next_cos = cos_n * c1 - sin_n * s1;
        sin_n = sin_n * c1 + cos_n * s1;
        cos_n = next_cos;

        let signed = if n % 2 == 0 { qn2 } else { -qn2 };
        theta += (signed * cos_n).scale(2.0);
        derivative -= (signed * sin_n).scale(4.0 * n as f64);

        if qn2.to_f64() * n as f64 <= threshold {
            return Ok(DefiningSums {
                theta,
                derivative,
                terms: n + 1,
            });
        }
    }
    Err(Error::Truncation {
        module: MODULE,
        terms: tol.max_terms,
        partial: theta.to_f64().into(),
    })
}

/// `ϑ₄(z, q)` for real `z`, with `q` the nome.
pub fn theta4(z: f64, nome: QParameter, tol: Tolerance) -> Result<ThetaEvaluation> {
    let sums = defining_sums(z, nome, tol)?;
    Ok(ThetaEvaluation {
        value: sums.theta.to_f64(),
        terms_used: sums.terms,
        method: ThetaMethod::DefiningSeries,
    })
}

/// `ϑ₄'(z, q) / ϑ₄(z, q)`.
pub fn theta4_logderiv(
    z: f64,
    nome: QParameter,
    tol: Tolerance,
    method: ThetaMethod,
) -> Result<ThetaEvaluation> {
    match method {
        ThetaMethod::FourierSeries => logderiv_fourier(z, nome, tol),
        ThetaMethod::DefiningSeries => {
            let sums = defining_sums(z, nome, tol)?;
            let magnitude = sums.theta.to_f64().abs();
            if magnitude < DIVISION_HAZARD {
                return Err(Error::DivisionHazard {
                    module: MODULE,
                    magnitude,
                });
            }
            Ok(ThetaEvaluation {
                value: (sums.derivative / sums.theta).to_f64(),
                terms_used: sums.terms,
                method,
            })
        }
    }
}

/// `4 Σ_{n≥1} qⁿ/(1-q²ⁿ) sin 2nz` truncated once `qⁿ < rel_eps (1-q)`.
fn logderiv_fourier(z: f64, nome: QParameter, tol: Tolerance) -> Result<ThetaEvaluation> {
    let q = nome.value();
    let threshold = tol.rel_eps * (1.0 - q);
    let mut sum = 0.0;
    let mut qn = 1.0;
    for n in 1..=tol.max_terms {
        qn *= q;
        if qn < threshold {
            return Ok(ThetaEvaluation {
                value: 4.0 * sum,
                terms_used: n - 1,
                method: ThetaMethod::FourierSeries,
            });
        }
        sum += qn / (1.0 - qn * qn) * (2.0 * n as f64 * z).sin();
    }
    Err(Error::Truncation {
        module: MODULE,
        terms: tol.max_terms,
        partial: (4.0 * sum).into(),
    })
}

/// `4 Σ_{n≥1} qⁿ/(1-q²ⁿ)`, the sup-norm bound of the Fourier form over real
/// `z`.
pub fn logderiv_bound(nome: QParameter, tol: Tolerance) -> f64 {
    let q = nome.value();
    let threshold = tol.rel_eps * (1.0 - q);
    let mut sum = 0.0;
    let mut qn = q;
    for _ in 0..tol.max_terms {
        if qn < threshold {
            break;
        }
        sum += qn / (1.0 - qn * qn);
        qn *= q;
    }
    4.0 * sum
}
