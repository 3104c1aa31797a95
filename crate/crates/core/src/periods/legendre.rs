//! Periods and elliptic logarithms of the Legendre curve
//! `y² = x(x − 1)(x − λ)` with respect to the differential `dx/y`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::carlson::rf;
use crate::error::{Error, Result};

pub type C = Complex64;

/// Abscissae closer than this (relative) to a root are refused by the
/// logarithm; the value there is a half period and the branch is degenerate.
const TORSION_GUARD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodPair {
    pub omega1: C,
    pub omega2: C,
}

impl PeriodPair {
    pub fn tau(&self) -> C {
        self.omega2 / self.omega1
    }

    /// Real coordinates `(a, b)` with `z = a·ω₁ + b·ω₂`.
    pub fn coords(&self, z: C) -> [f64; 2] {
        let (p, q) = (self.omega1, self.omega2);
        let det = p.re * q.im - q.re * p.im;
        [
            (z.re * q.im - q.re * z.im) / det,
            (p.re * z.im - z.re * p.im) / det,
        ]
    }

    pub fn point(&self, a: f64, b: f64) -> C {
        self.omega1 * a + self.omega2 * b
    }

    /// Length of a shortest nonzero lattice vector (Lagrange–Gauss reduction).
    pub fn min_norm(&self) -> f64 {
        let (mut u, mut v) = (self.omega1, self.omega2);
        if u.norm() > v.norm() {
            std::mem::swap(&mut u, &mut v);
        }
        for _ in 0..64 {
            let m = ((v * u.conj()).re / u.norm_sqr()).round();
            v -= u * m;
            if v.norm() >= u.norm() {
                break;
            }
            std::mem::swap(&mut u, &mut v);
        }
        u.norm().min(v.norm())
    }

    /// Distance from `z` to the nearest lattice point, in units of the
    /// shortest lattice vector.
    pub fn lattice_defect(&self, z: C) -> f64 {
        let [a, b] = self.coords(z);
        let near = self.point(a.round(), b.round());
        let mut best = (z - near).norm();
        for da in -1..=1 {
            for db in -1..=1 {
                let cand = self.point(a.round() + da as f64, b.round() + db as f64);
                best = best.min((z - cand).norm());
            }
        }
        best / self.min_norm()
    }
}

fn check_clear(lambda: C, clearance: f64) -> Result<()> {
    for s in [0.0, 1.0] {
        if (lambda - s).norm() < clearance {
            return Err(Error::NearSingular {
                point: format!("{lambda}"),
                singular: format!("{s}"),
                clearance,
            });
        }
    }
    if !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::Input("non-finite λ".into()));
    }
    Ok(())
}

/// Principal periods at `lambda`:
/// `ω₁ = 4·R_F(0, 1 − λ, 1) = 4K(λ)` and `ω₂ = 4i·R_F(0, λ, 1) = 4iK(1 − λ)`.
///
/// Both are analytic off the real rays `(−∞, 0]` and `[1, ∞)`, and
/// `Im(ω₂/ω₁) > 0` throughout the cut plane.
pub fn periods_at(lambda: C, clearance: f64) -> Result<PeriodPair> {
    check_clear(lambda, clearance.max(1e-12))?;
    let zero = C::new(0.0, 0.0);
    let one = C::new(1.0, 0.0);
    let omega1 = rf(zero, one - lambda, one) * 4.0;
    let omega2 = rf(zero, lambda, one) * C::new(0.0, 4.0);
    Ok(PeriodPair { omega1, omega2 })
}

/// `√x·√(x−1)·√(x−λ)` with principal roots; the branch of `y` that the
/// logarithm formula integrates along.
pub fn principal_y(lambda: C, x: C) -> C {
    x.sqrt() * (x - 1.0).sqrt() * (x - lambda).sqrt()
}

/// Elliptic logarithm `∫_O^P dx/y` of `P = (x, branch·principal_y(λ, x))`
/// modulo the period lattice, computed as `−branch·2·R_F(x, x−1, x−λ)`.
pub fn elliptic_log_at(lambda: C, x: C, branch: i8) -> Result<C> {
    let scale = 1.0 + x.norm();
    for (root, name) in [(C::new(0.0, 0.0), "0"), (C::new(1.0, 0.0), "1"), (lambda, "λ")] {
        if (x - root).norm() < TORSION_GUARD * scale {
            return Err(Error::NearSingular {
                point: format!("x = {x}"),
                singular: format!("2-torsion abscissa {name}"),
                clearance: TORSION_GUARD,
            });
        }
    }
    if branch != 1 && branch != -1 {
        return Err(Error::Input(format!("branch must be ±1, got {branch}")));
    }
    let v = rf(x, x - 1.0, x - lambda) * 2.0;
    Ok(-v * branch as f64)
}

/// Doubles `(x, y)` on `y² = x³ − (1+λ)x² + λx`.
pub fn double_point(lambda: C, x: C, y: C) -> (C, C) {
    let a2 = -(lambda + 1.0);
    let a4 = lambda;
    let m = (x * x * 3.0 + a2 * x * 2.0 + a4) / (y * 2.0);
    let x3 = m * m - a2 - x * 2.0;
    let y3 = -(y + m * (x3 - x));
    (x3, y3)
}
