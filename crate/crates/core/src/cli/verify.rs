//! Named verification suites behind `awq verify`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::awoperator::{
    dq_inverse_integral_at, dq_inverse_spectral, dq_spectral, halving_sequence, limit_series_degree, multiplier,
    sign_function_series, theorem_2_2_limit, theorem_2_2_limit_series, KernelOrientation, LimitOptions,
};
use crate::chebyshev::{eval_t, eval_u, ChebyshevSeriesU};
use crate::conformal::{ellipse_from_b, riemann_map, riemann_map_derivative};
use crate::qcore::q_factorial;
use crate::qhermite::{
    dq_inverse_hermite_integral_at, hermite_inverse_constant, kernel_h_closed, kernel_h_series, orthogonality_check, orthogonality_norm,
    poisson_kernel, qhermite_all, telescoping_rhs, HermiteNormalization,
};
use crate::quadrature::{gauss_chebyshev_first, periodic_trapezoid, SampledFunction};
use crate::theta::{theta4_logderiv, ThetaMethod};
use crate::{QParameter, Result, Tolerance};

pub const SUITES: [&str; 9] = [
    "theorem_2_1_roundtrip",
    "theta_dual_eval",
    "poisson_series_product",
    "kernel_H_closed_vs_series",
    "orthogonality_gram",
    "conformal_boundary",
    "theorem_2_2_limit",
    "sign_calibration_2_9",
    "constant_calibration_4_8",
];

pub const DEFAULT_QS: [f64; 3] = [0.2, 0.5, 0.8];

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub note: String,
}

impl SuiteOutcome {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{status} {:<26} residual={:.3e} tolerance={:.3e}",
            self.name, self.residual, self.tolerance
        );
        if !self.note.is_empty() {
            s.push_str("  ");
            s.push_str(&self.note);
        }
        s
    }
}

/// Residual, default tolerance, extra condition, note.
struct Measured {
    residual: f64,
    tolerance: f64,
    condition: bool,
    note: String,
}

impl Measured {
    fn plain(residual: f64, tolerance: f64) -> Self {
        Self {
            residual,
            tolerance,
            condition: true,
            note: String::new(),
        }
    }
}

pub fn run_suite(name: &str, qs: &[QParameter], tol: Tolerance, forced: Option<f64>) -> Option<SuiteOutcome> {
    let name = *SUITES.iter().find(|s| **s == name)?;
    let measured = match name {
        "theorem_2_1_roundtrip" => spectral_roundtrip(qs),
        "theta_dual_eval" => theta_dual(qs, tol),
        "poisson_series_product" => poisson(qs, tol),
        "kernel_H_closed_vs_series" => kernel_h(qs, tol),
        "orthogonality_gram" => gram(qs, tol),
        "conformal_boundary" => conformal_boundary(tol),
        "theorem_2_2_limit" => limit(qs, tol),
        "sign_calibration_2_9" => sign_calibration(qs, tol),
        "constant_calibration_4_8" => constant_calibration(qs, tol),
        _ => unreachable!("listed in SUITES"),
    };
    Some(match measured {
        Ok(m) => {
            let tolerance = forced.unwrap_or(m.tolerance);
            SuiteOutcome {
                name,
                residual: m.residual,
                tolerance,
                passed: m.condition && m.residual <= tolerance,
                note: m.note,
            }
        }
        Err(e) => SuiteOutcome {
            name,
            residual: f64::NAN,
            tolerance: forced.unwrap_or(f64::NAN),
            passed: false,
            note: e.to_string(),
        },
    })
}

fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn spectral_roundtrip(qs: &[QParameter]) -> Result<Measured> {
    let mut rng = rng(1);
    let mut worst = 0.0f64;
    for &q in qs {
        for _ in 0..100 {
            let len = rng.random_range(1..=65);
            let c: Vec<f64> = (0..len).map(|_| rng.random_range(-1.0..=1.0)).collect();
            let g = ChebyshevSeriesU::from_u_basis(&c);
            let back = dq_spectral(&dq_inverse_spectral(&g, q), q);
            for n in 1..g.len() {
                worst = worst.max((back.coeff(n) - g.coeff(n)).abs());
            }
        }
    }
    Ok(Measured::plain(worst, 1e-12))
}

fn theta_dual(qs: &[QParameter], tol: Tolerance) -> Result<Measured> {
    let mut worst = 0.0f64;
    for &q in qs {
        for j in 0..200 {
            let z = -PI + 2.0 * PI * (j as f64 + 0.5) / 200.0;
            let a = theta4_logderiv(z, q, tol, ThetaMethod::FourierSeries)?.value;
            let b = theta4_logderiv(z, q, tol, ThetaMethod::DefiningSeries)?.value;
            worst = worst.max((a - b).abs());
        }
    }
    Ok(Measured::plain(worst, 1e-11))
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn poisson(qs: &[QParameter], tol: Tolerance) -> Result<Measured> {
    let mut rng = rng(2);
    let mut worst = 0.0f64;
    for &q in qs {
        for _ in 0..50 {
            let theta = rng.random_range(-PI..PI);
            let phi = rng.random_range(-PI..PI);
            let r: f64 = rng.random_range(-0.5..=0.5);
            let hx = qhermite_all(80, f64::cos(theta), q);
            let ht = qhermite_all(80, f64::cos(phi), q);
            let series: f64 = (0..=80).map(|n| hx[n] * ht[n] * r.powi(n as i32) / q_factorial(q, n)).sum();
            worst = worst.max(relative(series, poisson_kernel(theta, phi, r, q, tol)?));
        }
    }
    Ok(Measured::plain(worst, 1e-10))
}

fn kernel_h(qs: &[QParameter], tol: Tolerance) -> Result<Measured> {
    let mut rng = rng(3);
    let mut worst = 0.0f64;
    for &q in qs {
        for _ in 0..50 {
            let theta = rng.random_range(-PI..PI);
            let phi = rng.random_range(-PI..PI);
            let r = rng.random_range(-0.5..=0.5);
            let s = kernel_h_series(theta, phi, r, q, 120)?;
            worst = worst.max(relative(kernel_h_closed(theta, phi, r, q, tol)?, s));

            // telescoping needs |r q^{-1/2}| < 1
            let r = r * q.sqrt();
            let lhs = kernel_h_closed(theta, phi, r * q.inv_sqrt(), q, tol)?
                - kernel_h_closed(theta, phi, r * q.sqrt(), q, tol)?;
            worst = worst.max(relative(lhs, telescoping_rhs(theta, phi, r, q, tol)?));
        }
    }
    Ok(Measured::plain(worst, 1e-10))
}

fn gram(qs: &[QParameter], tol: Tolerance) -> Result<Measured> {
    let mut worst = 0.0f64;
    for &q in qs {
        for m in 0..=6 {
            for n in 0..=6 {
                let v = orthogonality_check(m, n, q, 128, tol)?;
                let norm = orthogonality_norm(n, q, tol)?;
                let expected = if m == n { norm } else { 0.0 };
                worst = worst.max((v - expected).abs() / norm);
            }
        }
    }
    Ok(Measured::plain(worst, 1e-8))
}

fn conformal_boundary(tol: Tolerance) -> Result<Measured> {
    let geom = ellipse_from_b(0.75)?;
    let zeta = Complex64::new(0.2, 0.0);
    let sweep = |shrink: f64| -> Result<f64> {
        let mut worst = 0.0f64;
        for k in 0..64 {
            let z = geom.boundary_point(2.0 * PI * k as f64 / 64.0) * shrink;
            worst = worst.max((riemann_map(z, zeta, &geom, tol)?.norm() - 1.0).abs());
        }
        Ok(worst)
    };
    let (coarse, fine) = (sweep(0.999)?, sweep(0.9999)?);
    let at_zeta = riemann_map(zeta, zeta, &geom, tol)?;
    let derivative = riemann_map_derivative(zeta, zeta, &geom, tol)?;
    Ok(Measured {
        residual: fine,
        tolerance: 1e-3,
        condition: coarse <= 1e-2 && at_zeta.norm() == 0.0 && derivative.re > 0.0,
        note: format!("shrink 0.999: {coarse:.3e}; f'(zeta) = {:.6}", derivative.re),
    })
}

fn sign_fn(y: f64) -> f64 {
    if y > 0.0 {
        1.0
    } else if y < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn limit(qs: &[QParameter], tol: Tolerance) -> Result<Measured> {
    let mut worst_ratio = 0.0f64;
    let mut decreasing = true;
    for &q in qs {
        let ps = halving_sequence(q, 10);
        let n = limit_series_degree(q, ps[9], tol)?;
        let t = theorem_2_2_limit_series(&sign_function_series(n), sign_fn(0.5), q, 0.5, &ps)?;
        decreasing &= t.is_eventually_decreasing();
        worst_ratio = worst_ratio.max(t.final_error() / t.initial_error());
    }
    // The continuous case is only within 1e-6 for q close to 1: the error is
    // first order in p - q.
    let q = QParameter::new(0.9)?;
    let smooth = theorem_2_2_limit(f64::exp, q, 0.5, &halving_sequence(q, 10), LimitOptions::default())?;
    let smooth_error = smooth.final_error();
    Ok(Measured {
        residual: worst_ratio,
        tolerance: 0.5,
        condition: decreasing && smooth_error <= 1e-6,
        note: format!(
            "jump: final/initial error; eventually decreasing: {decreasing}; exp at q=0.9: {smooth_error:.3e} (bound 1e-6)"
        ),
    })
}

fn sign_calibration(qs: &[QParameter], tol: Tolerance) -> Result<Measured> {
    let thetas: Vec<f64> = (0..16).map(|k| 0.1 + 0.19 * k as f64).collect();
    let (mut calibrated, mut printed) = (0.0f64, f64::INFINITY);
    for &q in qs {
        let m = if q.value() > 0.75 { 512 } else { 256 };
        let grid = periodic_trapezoid(m)?;
        let g = SampledFunction::from_fn(&grid, |p| eval_u(2, p.cos()));
        let good = dq_inverse_integral_at(&g, q, tol, &thetas, KernelOrientation::Calibrated)?;
        let bad = dq_inverse_integral_at(&g, q, tol, &thetas, KernelOrientation::AsPrinted)?;
        let mut printed_q = 0.0f64;
        for ((&t, a), b) in thetas.iter().zip(good).zip(bad) {
            let spectral = eval_t(3, t.cos()) / multiplier(3, q);
            calibrated = calibrated.max((a - spectral).abs());
            printed_q = printed_q.max((b - spectral).abs());
        }
        printed = printed.min(printed_q);
    }
    Ok(Measured {
        residual: calibrated,
        tolerance: 1e-9,
        condition: printed > 1e-3,
        note: format!("printed orientation deviates by {printed:.3e}"),
    })
}

fn constant_calibration(qs: &[QParameter], tol: Tolerance) -> Result<Measured> {
    let xs: Vec<f64> = (0..16).map(|k| -0.9 + 0.12 * k as f64).collect();
    let (mut calibrated, mut ratio_error) = (0.0f64, 0.0f64);
    let mut measured = Vec::new();
    for &q in qs {
        let g = SampledFunction::from_fn(&gauss_chebyshev_first(128)?, |_| 1.0);
        let good = dq_inverse_hermite_integral_at(&g, q, tol, &xs, HermiteNormalization::Calibrated)?;
        let bad = dq_inverse_hermite_integral_at(&g, q, tol, &xs, HermiteNormalization::AsPrinted)?;
        for (&x, v) in xs.iter().zip(good) {
            calibrated = calibrated.max((v - x).abs());
        }
        // The constant that makes the printed-normalization result equal x.
        let printed_c = hermite_inverse_constant(q, HermiteNormalization::AsPrinted, tol)?;
        let c = printed_c * xs[15] / bad[15];
        let shipped = hermite_inverse_constant(q, HermiteNormalization::Calibrated, tol)?;
        ratio_error = ratio_error.max((c / shipped - 1.0).abs());
        measured.push(format!("q={}: {c:.10e} vs printed {printed_c:.10e}", q.value()));
    }
    Ok(Measured {
        residual: calibrated,
        tolerance: 1e-8,
        condition: ratio_error < 1e-8,
        note: format!("measured constant {}", measured.join(", ")),
    })
}
