//! Riemann map of the interior of the ellipse with foci `±1` and semi-minor
//! axis `b` onto the unit disc, through its Bergman kernel
//!
//! ```text
//! K(z, ζ) = (4/π) Σ_{n≥0} (n+1) U_n(z) conj(U_n(ζ)) / (ρ^{n+1} - ρ^{-n-1}),  ρ = (a+b)².
//! ```
//!
//! The normalized map is `f(z, ζ) = g(z, ζ) - g(ζ, ζ)` with
//! `f'(z, ζ) = √(π/K(ζ,ζ)) K(z, ζ)`. Integrating termwise (`∫U_{n-1} = T_n/n`)
//! gives
//!
//! ```text
//! g(z, ζ) = √(π/K(ζ,ζ)) (4/π) Σ_{n≥1} T_n(z) conj(U_{n-1}(ζ)) / (ρⁿ - ρ⁻ⁿ).
//! ```
//!
//! With `q = ρ^{-2}`, `1/(ρⁿ - ρ⁻ⁿ) = q^{n/2}/(1-qⁿ)`, so on the real segment
//! the series of `g` is `2√q/(1-q)` times the kernel `F` of
//! [`crate::awoperator::kernel_f`].
//!
//! Truncation is certified with the envelopes `|T_n(z)| ≤ |w|ⁿ` and
//! `|U_n(z)| ≤ (n+1)|w|ⁿ`, where `w = z + √(z²-1)` is the root outside
//! the unit circle.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result, Tolerance};

const MODULE: &str = "conformal";

/// Points within this distance (in `|w|`) of the boundary are rejected.
pub const INTERIOR_MARGIN: f64 = 1e-9;

/// `w = z + √(z-1)√(z+1)`, the root of `z = (w + 1/w)/2` with `|w| ≥ 1`.
pub fn joukowski_exterior(z: Complex64) -> Complex64 {
    z + (z - 1.0).sqrt() * (z + 1.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseGeometry {
    pub b: f64,
    pub a: f64,
    pub rho: f64,
    pub q: f64,
    /// `arcsinh b`, so that `a + b = e^u` and `q = e^{-4u}`.
    pub u: f64,
}

pub fn ellipse_from_b(b: f64) -> Result<EllipseGeometry> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::invalid(MODULE, format!("semi-minor axis b = {b} must be positive")));
    }
    let a = (b * b + 1.0).sqrt();
    let s = a + b;
    Ok(EllipseGeometry {
        b,
        a,
        rho: s * s,
        q: s.powi(-4),
        u: b.asinh(),
    })
}

impl EllipseGeometry {
    /// `a + b = ρ^{1/2}`, the `|w|` of the boundary.
    pub fn radius(&self) -> f64 {
        self.a + self.b
    }

    pub fn contains(&self, z: Complex64) -> bool {
        joukowski_exterior(z).norm() < self.radius() - INTERIOR_MARGIN
    }

    /// The boundary point `a cos t + i b sin t`.
    pub fn boundary_point(&self, t: f64) -> Complex64 {
        Complex64::new(self.a * t.cos(), self.b * t.sin())
    }

    fn require_interior(&self, z: Complex64) -> Result<f64> {
        let w = joukowski_exterior(z).norm();
        if !(w < self.radius() - INTERIOR_MARGIN) {
            return Err(Error::domain(
                MODULE,
                format!("z = {z} is not strictly inside the ellipse (|w| = {w}, boundary {})", self.radius()),
            ));
        }
        Ok(w)
    }
}

/// Sums `Σ_{n≥start} term(n)` given `|term(n)| ≤ envelope(n)`, where the
/// envelope is a polynomial times a geometric factor, so its ratio decreases
/// in `n`. Stops once the envelope tail is below `rel_eps · |sum|`.
fn envelope_sum(
    start: usize,
    tol: Tolerance,
    envelope: impl Fn(usize) -> f64,
    mut term: impl FnMut(usize) -> Complex64,
) -> Result<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    for n in start..start + tol.max_terms {
        sum += term(n);
        let next = envelope(n + 1);
        let ratio = envelope(n + 2) / next;
        if ratio < 1.0 {
            let tail = next / (1.0 - ratio);
            if tail <= tol.rel_eps * sum.norm() || tail < f64::MIN_POSITIVE {
                return Ok(sum);
            }
        }
    }
    Err(Error::Truncation {
        module: MODULE,
        terms: tol.max_terms,
        partial: sum,
    })
}

/// `T_n(z)` and `U_n(z)` by forward recurrence.
struct ChebyshevPair {
    x: Complex64,
    t: [Complex64; 2],
    u: [Complex64; 2],
}

impl ChebyshevPair {
    fn new(x: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        Self {
            x,
            t: [one, x],
            u: [one, x * 2.0],
        }
    }

    /// Returns `(T_n, U_n)` and advances to `n + 1`.
    fn next(&mut self) -> (Complex64, Complex64) {
        let out = (self.t[0], self.u[0]);
        let two_x = self.x * 2.0;
        self.t = [self.t[1], two_x * self.t[1] - self.t[0]];
        self.u = [self.u[1], two_x * self.u[1] - self.u[0]];
        out
    }
}

pub fn bergman_kernel(z: Complex64, zeta: Complex64, geom: &EllipseGeometry, tol: Tolerance) -> Result<Complex64> {
    let (wz, wzeta) = (geom.require_interior(z)?, geom.require_interior(zeta)?);
    let r = wz * wzeta / geom.rho;
    // (n+1)³ |w_z|ⁿ |w_ζ|ⁿ / (ρ^{n+1} - ρ^{-n-1})
    let scale = 1.0 / (geom.rho - 1.0 / geom.rho);
    let envelope = |n: usize| scale * ((n + 1) as f64).powi(3) * r.powi(n as i32);
    let (mut pz, mut pzeta) = (ChebyshevPair::new(z), ChebyshevPair::new(zeta));
    let sum = envelope_sum(0, tol, envelope, |n| {
        let (_, uz) = pz.next();
        let (_, uzeta) = pzeta.next();
        let e = (n + 1) as f64;
        uz * uzeta.conj() * (e / (geom.rho.powf(e) - geom.rho.powf(-e)))
    })?;
    Ok(sum * (4.0 / PI))
}

/// `g(z, ζ)`; see the module docs.
pub fn mapping_g(z: Complex64, zeta: Complex64, geom: &EllipseGeometry, tol: Tolerance) -> Result<Complex64> {
    let k = bergman_kernel(zeta, zeta, geom, tol)?.re;
    Ok(mapping_series(z, zeta, geom, tol)? * (PI / k).sqrt())
}

/// `(4/π) Σ_{n≥1} T_n(z) conj(U_{n-1}(ζ)) / (ρⁿ - ρ⁻ⁿ)`, the series of `g`
/// without its normalization.
pub fn mapping_series(z: Complex64, zeta: Complex64, geom: &EllipseGeometry, tol: Tolerance) -> Result<Complex64> {
    let (wz, wzeta) = (geom.require_interior(z)?, geom.require_interior(zeta)?);
    let r = wz * wzeta / geom.rho;
    // n |w_z|ⁿ |w_ζ|^{n-1} / (ρⁿ - ρ⁻ⁿ)
    let scale = 1.0 / (wzeta * (1.0 - geom.rho.powi(-2)));
    let envelope = |n: usize| scale * n as f64 * r.powi(n as i32);
    let mut pz = ChebyshevPair::new(z);
    let mut pzeta = ChebyshevPair::new(zeta);
    pz.next();
    let sum = envelope_sum(1, tol, envelope, |n| {
        let (tz, _) = pz.next();
        let (_, uzeta) = pzeta.next();
        let e = n as f64;
        tz * uzeta.conj() / (geom.rho.powf(e) - geom.rho.powf(-e))
    })?;
    Ok(sum * (4.0 / PI))
}

/// `f(z, ζ) = g(z, ζ) - g(ζ, ζ)`, zero at `z = ζ`.
pub fn riemann_map(z: Complex64, zeta: Complex64, geom: &EllipseGeometry, tol: Tolerance) -> Result<Complex64> {
    Ok(mapping_g(z, zeta, geom, tol)? - mapping_g(zeta, zeta, geom, tol)?)
}

/// `f'(z, ζ) = √(π/K(ζ,ζ)) K(z, ζ)`.
pub fn riemann_map_derivative(z: Complex64, zeta: Complex64, geom: &EllipseGeometry, tol: Tolerance) -> Result<Complex64> {
    let k = bergman_kernel(zeta, zeta, geom, tol)?.re;
    Ok(bergman_kernel(z, zeta, geom, tol)? * (PI / k).sqrt())
}
