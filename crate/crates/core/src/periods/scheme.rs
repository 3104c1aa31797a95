//! Description of a fibred product of Legendre schemes with a section.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

type C = Complex64;

/// Polynomial in λ, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn eval(&self, z: C) -> C {
        self.0.iter().rev().fold(C::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|&c| c != 0.0)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly((0..n)
            .map(|i| self.0.get(i).copied().unwrap_or(0.0) - other.0.get(i).copied().unwrap_or(0.0))
            .collect())
    }

    /// Complex roots with multiplicity.
    pub fn roots(&self) -> Vec<C> {
        let Some(deg) = self.degree() else {
            return Vec::new();
        };
        let lead = self.0[deg];
        let monic: Vec<f64> = self.0[..=deg].iter().map(|c| c / lead).collect();
        match deg {
            0 => Vec::new(),
            1 => vec![C::new(-monic[0], 0.0)],
            2 => {
                let (b, c) = (C::new(monic[1], 0.0), C::new(monic[0], 0.0));
                let disc = (b * b - c * 4.0).sqrt();
                // stable form avoiding cancellation
                let q = if (b.conj() * disc).re >= 0.0 { -(b + disc) / 2.0 } else { -(b - disc) / 2.0 };
                if q.norm() == 0.0 {
                    vec![C::new(0.0, 0.0); 2]
                } else {
                    vec![q, c / q]
                }
            }
            _ => durand_kerner(&monic),
        }
    }
}

fn durand_kerner(monic: &[f64]) -> Vec<C> {
    let deg = monic.len() - 1;
    let p = Poly(monic.to_vec());
    let seed = C::new(0.4, 0.9);
    let mut z: Vec<C> = (0..deg).map(|i| seed.powu(i as u32)).collect();
    for _ in 0..1000 {
        let mut delta = 0.0f64;
        for i in 0..deg {
            let denom = (0..deg).filter(|&j| j != i).fold(C::new(1.0, 0.0), |acc, j| acc * (z[i] - z[j]));
            let step = p.eval(z[i]) / denom;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

/// `num(λ) / den(λ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalFunction {
    pub num: Poly,
    #[serde(default = "one_poly", skip_serializing_if = "is_one_poly")]
    pub den: Poly,
}

fn one_poly() -> Poly {
    Poly(vec![1.0])
}

fn is_one_poly(p: &Poly) -> bool {
    p.0 == [1.0]
}

impl RationalFunction {
    pub fn poly(coeffs: &[f64]) -> Self {
        RationalFunction {
            num: Poly(coeffs.to_vec()),
            den: one_poly(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::poly(&[c])
    }

    pub fn identity() -> Self {
        Self::poly(&[0.0, 1.0])
    }

    pub fn eval(&self, z: C) -> C {
        self.num.eval(z) / self.den.eval(z)
    }

    pub fn is_constant(&self) -> bool {
        self.num.degree().unwrap_or(0) == 0 && self.den.degree().unwrap_or(0) == 0
    }

    pub fn zeros(&self) -> Vec<C> {
        self.num.roots()
    }

    pub fn poles(&self) -> Vec<C> {
        self.den.roots()
    }

    /// Finite points where the function takes the value `c`.
    pub fn preimage(&self, c: f64) -> Vec<C> {
        let scaled = Poly(self.den.0.iter().map(|x| x * c).collect());
        self.num.sub(&scaled).roots()
    }
}

/// A section `(x(λ), y(λ))` with `y = prefactor(λ)·Π √(rⱼ(λ))`; each square
/// root carries a branch sign that is tracked along paths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionSpec {
    pub x: RationalFunction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_prefactor: Option<RationalFunction>,
    pub sqrt: Vec<RationalFunction>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorSpec {
    /// Legendre parameter of this factor as a function of the base coordinate.
    pub parameter: RationalFunction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section: Option<SectionSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeSpec {
    #[serde(default)]
    pub name: String,
    pub factors: Vec<FactorSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularKind {
    /// Bad reduction of some factor (periods are singular).
    Puncture,
    /// Ramification of a tracked square root, or a pole of a section.
    SectionBranch,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularPoint {
    pub point: C,
    pub kind: SingularKind,
}

const DEDUP_EPS: f64 = 1e-8;

impl SchemeSpec {
    pub fn k(&self) -> usize {
        self.factors.len()
    }

    /// Number of tracked square roots over all sections.
    pub fn sqrt_count(&self) -> usize {
        self.factors
            .iter()
            .filter_map(|f| f.section.as_ref())
            .map(|s| s.sqrt.len())
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.factors.is_empty() {
            return Err(Error::Input("a scheme needs at least one factor".into()));
        }
        let probes = [C::new(0.31, 0.47), C::new(-1.7, 0.23), C::new(2.9, -1.1)];
        for (i, f) in self.factors.iter().enumerate() {
            if f.parameter.is_constant() {
                return Err(Error::Input(format!("factor {} has a constant (isotrivial) parameter", i + 1)));
            }
            let Some(sec) = &f.section else { continue };
            for &lam in &probes {
                let li = f.parameter.eval(lam);
                let x = sec.x.eval(lam);
                let rhs = x * (x - 1.0) * (x - li);
                let y = section_y(sec, lam, &vec![1; sec.sqrt.len()]);
                let scale = 1.0 + rhs.norm();
                if (y * y - rhs).norm() > 1e-9 * scale {
                    return Err(Error::Input(format!(
                        "section of factor {} does not lie on y² = x(x−1)(x−λ): y² − rhs = {:e} at λ = {lam}",
                        i + 1,
                        (y * y - rhs).norm()
                    )));
                }
            }
            // agreement at every probe means agreement identically
            let ident = |target: &dyn Fn(C) -> C| probes.iter().all(|&l| (sec.x.eval(l) - target(l)).norm() < 1e-12);
            if ident(&|_| C::new(0.0, 0.0)) || ident(&|_| C::new(1.0, 0.0)) || ident(&|l| f.parameter.eval(l)) {
                return Err(Error::Input(format!(
                    "section of factor {} is identically a 2-torsion point",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Punctures and section ramification points in the finite λ-plane,
    /// sorted by real then imaginary part.
    pub fn singular_points(&self) -> Vec<SingularPoint> {
        let mut pts: Vec<SingularPoint> = Vec::new();
        let mut add = |p: C, kind: SingularKind| {
            if let Some(existing) = pts.iter_mut().find(|s| (s.point - p).norm() < DEDUP_EPS) {
                if kind == SingularKind::Puncture {
                    existing.kind = kind;
                }
            } else {
                pts.push(SingularPoint { point: p, kind });
            }
        };
        add(C::new(0.0, 0.0), SingularKind::Puncture);
        add(C::new(1.0, 0.0), SingularKind::Puncture);
        for f in &self.factors {
            for p in f
                .parameter
                .preimage(0.0)
                .into_iter()
                .chain(f.parameter.preimage(1.0))
                .chain(f.parameter.poles())
            {
                add(p, SingularKind::Puncture);
            }
        }
        for f in &self.factors {
            let Some(sec) = &f.section else { continue };
            for r in &sec.sqrt {
                for p in r.zeros().into_iter().chain(r.poles()) {
                    add(p, SingularKind::SectionBranch);
                }
            }
            for p in sec.x.poles().into_iter().chain(sec.y_prefactor.iter().flat_map(|y| y.poles())) {
                add(p, SingularKind::SectionBranch);
            }
        }
        let mut snapped: Vec<SingularPoint> = pts
            .into_iter()
            .map(|mut s| {
                // roots of real polynomials come back with tiny imaginary noise
                if s.point.im.abs() < 1e-12 {
                    s.point.im = 0.0;
                }
                s
            })
            .collect();
        snapped.sort_by(|a, b| {
            a.point
                .re
                .total_cmp(&b.point.re)
                .then(a.point.im.total_cmp(&b.point.im))
        });
        snapped
    }

    pub fn branch_points(&self) -> Vec<C> {
        self.singular_points().into_iter().map(|s| s.point).collect()
    }
}

/// `y` of a section for a given vector of square-root branch signs.
pub fn section_y(sec: &SectionSpec, lambda: C, signs: &[i8]) -> C {
    let pre = sec.y_prefactor.as_ref().map_or(C::new(1.0, 0.0), |p| p.eval(lambda));
    sec.sqrt
        .iter()
        .zip(signs)
        .fold(pre, |acc, (r, &s)| acc * r.eval(lambda).sqrt() * s as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iso_sections() -> SchemeSpec {
        let f1 = FactorSpec {
            parameter: RationalFunction::identity(),
            section: Some(SectionSpec {
                x: RationalFunction::constant(2.0),
                y_prefactor: None,
                sqrt: vec![RationalFunction::poly(&[4.0, -2.0])],
            }),
        };
        let f2 = FactorSpec {
            parameter: RationalFunction::identity(),
            section: Some(SectionSpec {
                x: RationalFunction::poly(&[1.0, 1.0]),
                y_prefactor: None,
                sqrt: vec![RationalFunction::poly(&[0.0, 1.0, 1.0])],
            }),
        };
        SchemeSpec {
            name: "iso".into(),
            factors: vec![f1, f2],
        }
    }

    #[test]
    fn roots_of_small_polynomials() {
        let r = Poly(vec![0.0, 1.0, 1.0]).roots();
        let mut re: Vec<f64> = r.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        assert!((re[0] + 1.0).abs() < 1e-14 && re[1].abs() < 1e-14);
        let cubic = Poly(vec![-6.0, 11.0, -6.0, 1.0]).roots();
        for want in [1.0, 2.0, 3.0] {
            assert!(cubic.iter().any(|z| (z - want).norm() < 1e-10));
        }
    }

    #[test]
    fn branch_points_of_the_sections() {
        let s = iso_sections();
        s.validate().unwrap();
        let pts = s.branch_points();
        let want = [-1.0, 0.0, 1.0, 2.0];
        assert_eq!(pts.len(), 4);
        for (p, w) in pts.iter().zip(want) {
            assert!((p - w).norm() < 1e-12, "{p} vs {w}");
        }
    }

    #[test]
    fn no_sections_gives_parameter_preimages() {
        let s = SchemeSpec {
            name: String::new(),
            factors: vec![
                FactorSpec { parameter: RationalFunction::identity(), section: None },
                FactorSpec { parameter: RationalFunction::poly(&[2.0, -1.0]), section: None },
            ],
        };
        let pts = s.branch_points();
        assert_eq!(pts.len(), 3);
        assert!(s.singular_points().iter().all(|p| p.kind == SingularKind::Puncture));
    }

    #[test]
    fn rejects_points_off_the_curve() {
        let mut s = iso_sections();
        s.factors[0].section.as_mut().unwrap().sqrt[0] = RationalFunction::poly(&[2.0, -1.0]);
        assert!(s.validate().is_err());
    }

    #[test]
    fn rejects_isotrivial_factor() {
        let mut s = iso_sections();
        s.factors[0].parameter = RationalFunction::constant(0.5);
        assert!(s.validate().is_err());
    }

    #[test]
    fn json_grammar() {
        let s = iso_sections();
        let j = serde_json::to_string(&s).unwrap();
        assert!(j.contains(r#""parameter":{"num":[0.0,1.0]}"#));
        let back: SchemeSpec = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }
}
