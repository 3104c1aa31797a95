//! Closed polygonal loops in the λ-plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C = Complex64;

/// Closed polygon starting and ending at `base_point`.
///
/// Concatenation reads left to right: `a.then(&b)` walks `a` first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoopPath {
    pub name: String,
    pub base_point: C,
    pub vertices: Vec<C>,
}

impl LoopPath {
    pub fn new(name: impl Into<String>, vertices: Vec<C>) -> Result<Self> {
        let name = name.into();
        let (Some(&first), Some(&last)) = (vertices.first(), vertices.last()) else {
            return Err(Error::Input(format!("loop `{name}` has no vertices")));
        };
        if vertices.len() < 2 || (first - last).norm() > 1e-12 {
            return Err(Error::Input(format!("loop `{name}` is not closed")));
        }
        Ok(LoopPath {
            name,
            base_point: first,
            vertices,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let again = LoopPath::new(self.name.clone(), self.vertices.clone())?;
        if (again.base_point - self.base_point).norm() > 1e-12 {
            return Err(Error::Input(format!(
                "loop `{}` does not start at its base point",
                self.name
            )));
        }
        Ok(())
    }

    /// The constant loop at `base`.
    pub fn constant(name: impl Into<String>, base: C) -> Self {
        LoopPath {
            name: name.into(),
            base_point: base,
            vertices: vec![base, base],
        }
    }

    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    pub fn then(&self, other: &LoopPath) -> Result<LoopPath> {
        if (self.base_point - other.base_point).norm() > 1e-12 {
            return Err(Error::Input(format!(
                "loops `{}` and `{}` have different base points",
                self.name, other.name
            )));
        }
        let mut v = self.vertices.clone();
        v.extend_from_slice(&other.vertices[1..]);
        Ok(LoopPath {
            name: format!("{}*{}", self.name, other.name),
            base_point: self.base_point,
            vertices: v,
        })
    }

    pub fn reversed(&self) -> LoopPath {
        let mut v = self.vertices.clone();
        v.reverse();
        LoopPath {
            name: format!("{}^-1", self.name),
            base_point: self.base_point,
            vertices: v,
        }
    }

    /// Concatenation of `basic[i]` (or its reverse for negative entries),
    /// indices 1-based and signed.
    pub fn from_word(name: impl Into<String>, basic: &[LoopPath], word: &[i32]) -> Result<LoopPath> {
        let base = basic
            .first()
            .map(|l| l.base_point)
            .ok_or_else(|| Error::Input("no basic loops".into()))?;
        let mut out = LoopPath::constant("", base);
        for &letter in word {
            let idx = letter.unsigned_abs() as usize;
            let l = basic
                .get(idx.wrapping_sub(1))
                .ok_or_else(|| Error::Input(format!("letter {letter} out of range")))?;
            let piece = if letter > 0 { l.clone() } else { l.reversed() };
            out = out.then(&piece)?;
        }
        out.name = name.into();
        out.vertices.dedup_by(|a, b| (*a - *b).norm() < 1e-15);
        if out.vertices.len() < 2 {
            out.vertices = vec![base, base];
        }
        Ok(out)
    }

    /// Smallest distance from the polygon to any of `points`.
    pub fn clearance_to(&self, points: &[C]) -> f64 {
        let mut best = f64::INFINITY;
        for w in self.vertices.windows(2) {
            for &p in points {
                best = best.min(segment_distance(w[0], w[1], p));
            }
        }
        if self.vertices.len() == 1 {
            for &p in points {
                best = best.min((self.vertices[0] - p).norm());
            }
        }
        best
    }

    pub fn check_clearance(&self, points: &[C], clearance: f64) -> Result<()> {
        let d = self.clearance_to(points);
        if d < clearance {
            return Err(Error::Input(format!(
                "loop `{}` passes within {d:.4} of a singular point (clearance {clearance})",
                self.name
            )));
        }
        Ok(())
    }
}

pub fn segment_distance(a: C, b: C, p: C) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (a + d * t - p).norm()
}

/// Straight route from `from` to `to`, with detours around any obstacle
/// closer than `avoid` to the segment.
fn route(from: C, to: C, obstacles: &[C], avoid: f64, depth: usize) -> Vec<C> {
    if depth > 8 {
        return vec![to];
    }
    let blocking = obstacles
        .iter()
        .copied()
        .filter(|&q| segment_distance(from, to, q) < avoid)
        .min_by(|a, b| (a - from).norm().total_cmp(&(b - from).norm()));
    let Some(q) = blocking else {
        return vec![to];
    };
    let d = to - from;
    let t = (((q - from) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
    let foot = from + d * t;
    let mut n = foot - q;
    if n.norm() < 1e-12 {
        n = d * C::new(0.0, 1.0);
    }
    let waypoint = q + n / n.norm() * (2.0 * avoid);
    let mut out = route(from, waypoint, obstacles, avoid, depth + 1);
    out.extend(route(waypoint, to, obstacles, avoid, depth + 1));
    out
}

/// One counterclockwise circle of radius `2·clearance` around each point,
/// reached by a straight spoke from `base` (with detours around other points
/// so that the spoke keeps its clearance).
pub fn auto_loops(points: &[C], base: C, clearance: f64, circle_vertices: usize) -> Result<Vec<LoopPath>> {
    if points.iter().any(|&p| (p - base).norm() < 3.0 * clearance) {
        return Err(Error::Input(format!("base point {base} is too close to a singular point")));
    }
    let mut loops = Vec::with_capacity(points.len());
    for (i, &p) in points.iter().enumerate() {
        let others: Vec<C> = points.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &q)| q).collect();
        let nearest = others.iter().map(|q| (q - p).norm()).fold(f64::INFINITY, f64::min);
        let radius = (2.0 * clearance).min(0.4 * nearest);
        if radius < clearance {
            return Err(Error::Input(format!(
                "singular points near {p} are closer than the clearance allows"
            )));
        }
        let u = (base - p) / (base - p).norm();
        let entry = p + u * radius;
        let mut spoke = vec![base];
        spoke.extend(route(base, entry, &others, 1.5 * clearance, 0));
        let mut vertices = spoke.clone();
        for j in 1..=circle_vertices {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / circle_vertices as f64;
            vertices.push(p + u * radius * C::from_polar(1.0, theta));
        }
        *vertices.last_mut().expect("nonempty") = entry;
        vertices.extend(spoke.iter().rev().skip(1));
        loops.push(LoopPath::new(loop_name(p), vertices)?);
    }
    Ok(loops)
}

pub fn loop_name(p: C) -> String {
    let fmt = |x: f64| {
        let r = (x * 1e6).round() / 1e6;
        if r == r.trunc() {
            format!("{}", r as i64)
        } else {
            format!("{r}")
        }
    };
    if p.im.abs() < 1e-12 {
        format!("around({})", fmt(p.re))
    } else {
        format!("around({}{:+}i)", fmt(p.re), fmt(p.im))
    }
}
