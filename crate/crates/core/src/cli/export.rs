//! Plot grids for `awq export-grid`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde_json::json;

use super::io::Table;
use crate::awoperator::kernel_f;
use crate::conformal::{ellipse_from_b, riemann_map};
use crate::qhermite::{kernel_h_closed, weight_w};
use crate::theta::{theta4_logderiv, ThetaMethod};
use crate::{QParameter, Result, Tolerance};

/// Distance from `±1` at which the weight export stops.
pub const WEIGHT_CLIP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Target {
    /// ϑ₄'/ϑ₄ at nome q over z ∈ [-π/2, π/2]
    ThetaLogderiv,
    /// the Chebyshev-series kernel F(x, y) on [-1, 1]²
    #[value(name = "kernel-F", alias = "kernel-f")]
    KernelF,
    /// the q-Hermite kernel H(x, y, √q) on [-1, 1]²
    #[value(name = "kernel-H", alias = "kernel-h")]
    KernelH,
    /// the q-Hermite weight w(x), clipped near ±1
    WeightW,
    /// |f(z, ζ)| of the ellipse map on a polar grid z = s·(a cos t + i b sin t)
    ConformalModulus,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::ThetaLogderiv => "theta-logderiv",
            Target::KernelF => "kernel-F",
            Target::KernelH => "kernel-H",
            Target::WeightW => "weight-w",
            Target::ConformalModulus => "conformal-modulus",
        }
    }

    pub fn needs_q(self) -> bool {
        self != Target::ConformalModulus
    }

    pub fn default_points(self) -> usize {
        match self {
            Target::ThetaLogderiv | Target::WeightW => 100,
            _ => 50,
        }
    }
}

/// `n` equispaced points on `[lo, hi]`, endpoints included.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

pub struct ConformalSettings {
    pub b: f64,
    pub zeta: Complex64,
}

pub fn export(
    target: Target,
    q: Option<QParameter>,
    n: usize,
    tol: Tolerance,
    conformal: &ConformalSettings,
) -> Result<Table> {
    let mut table = match target {
        Target::ThetaLogderiv => {
            let q = q.expect("checked by caller");
            let z = linspace(-PI / 2.0, PI / 2.0, n);
            let mut t = Table::new(vec![("z".into(), z.clone())], &["value"]);
            for &zi in &z {
                t.rows.push(vec![theta4_logderiv(zi, q, tol, ThetaMethod::FourierSeries)?.value]);
            }
            t
        }
        Target::KernelF | Target::KernelH => {
            let q = q.expect("checked by caller");
            let x = linspace(-1.0, 1.0, n);
            let mut t = Table::new(vec![("x".into(), x.clone()), ("y".into(), x.clone())], &["value"]);
            for &xi in &x {
                for &yi in &x {
                    let v = if target == Target::KernelF {
                        kernel_f(xi, yi, q, tol)?
                    } else {
                        kernel_h_closed(xi.acos(), yi.acos(), q.sqrt(), q, tol)?
                    };
                    t.rows.push(vec![v]);
                }
            }
            t
        }
        Target::WeightW => {
            let q = q.expect("checked by caller");
            let x = linspace(-1.0 + WEIGHT_CLIP, 1.0 - WEIGHT_CLIP, n);
            let mut t = Table::new(vec![("x".into(), x.clone())], &["value"]);
            for &xi in &x {
                t.rows.push(vec![weight_w(xi, q, tol)?]);
            }
            t.meta.insert("clip".into(), json!(1.0 - WEIGHT_CLIP));
            t
        }
        Target::ConformalModulus => {
            let geom = ellipse_from_b(conformal.b)?;
            let s = linspace(0.0, 0.999, n);
            let angles: Vec<f64> = (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect();
            let mut t = Table::new(vec![("s".into(), s.clone()), ("t".into(), angles.clone())], &["value"]);
            for &si in &s {
                for &ti in &angles {
                    let z = geom.boundary_point(ti) * si;
                    t.rows.push(vec![riemann_map(z, conformal.zeta, &geom, tol)?.norm()]);
                }
            }
            t.meta.insert("b".into(), json!(conformal.b));
            t.meta.insert("zeta".into(), json!([conformal.zeta.re, conformal.zeta.im]));
            t
        }
    };
    table.meta.insert("command".into(), json!("export-grid"));
    table.meta.insert("target".into(), json!(target.name()));
    if let Some(q) = q.filter(|_| target.needs_q()) {
        table.meta.insert("q".into(), json!(q.value()));
    }
    Ok(table)
}
