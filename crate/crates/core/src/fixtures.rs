//! Named example schemes and presentations.

use crate::affine::{a0, b0, AffineElement, Presentation};
use crate::error::{Error, Result};
use crate::lattice::IntVector;
use crate::periods::{FactorSpec, RationalFunction, SchemeSpec, SectionSpec};

pub const ISO_EXAMPLE: &str = "ISO-EXAMPLE";
pub const NONISO_EXAMPLE: &str = "NONISO-EXAMPLE";
pub const REMARK_FIXTURE: &str = "REMARK-FIXTURE";

pub const FIXTURE_NAMES: [&str; 3] = [ISO_EXAMPLE, NONISO_EXAMPLE, REMARK_FIXTURE];

/// `(2, √(4 − 2λ))` on `y² = x(x − 1)(x − λ)`, ramified at `λ = 2`.
fn section_at_two() -> SectionSpec {
    SectionSpec {
        x: RationalFunction::constant(2.0),
        y_prefactor: None,
        sqrt: vec![RationalFunction::poly(&[4.0, -2.0])],
    }
}

/// Two copies of the Legendre family with the sections `(2, √(4 − 2λ))` and
/// `(λ + 1, √(λ² + λ))`, ramified at `λ = 2` and `λ = −1`.
pub fn iso_example() -> SchemeSpec {
    SchemeSpec {
        name: ISO_EXAMPLE.into(),
        factors: vec![
            FactorSpec {
                parameter: RationalFunction::identity(),
                section: Some(section_at_two()),
            },
            FactorSpec {
                parameter: RationalFunction::identity(),
                section: Some(SectionSpec {
                    x: RationalFunction::poly(&[1.0, 1.0]),
                    y_prefactor: None,
                    sqrt: vec![RationalFunction::poly(&[0.0, 1.0, 1.0])],
                }),
            },
        ],
    }
}

/// The Legendre families at `λ` and at `2 − λ`, with the sections
/// `(2, √(4 − 2λ))` and `(2, √(2λ))`. The second factor has bad fibres at
/// `λ = 1, 2`, so the factors are not isogenous.
pub fn noniso_example() -> SchemeSpec {
    SchemeSpec {
        name: NONISO_EXAMPLE.into(),
        factors: vec![
            FactorSpec {
                parameter: RationalFunction::identity(),
                section: Some(section_at_two()),
            },
            FactorSpec {
                parameter: RationalFunction::poly(&[2.0, -1.0]),
                section: Some(SectionSpec {
                    x: RationalFunction::constant(2.0),
                    y_prefactor: None,
                    sqrt: vec![RationalFunction::poly(&[0.0, 2.0])],
                }),
            },
        ],
    }
}

/// `A = (A₀; (1, 0))`, `B = (B₀; (0, 1))` for one factor.
pub fn remark_presentation() -> Presentation {
    let a = AffineElement::new(vec![a0()], IntVector::from_i64s(&[1, 0])).expect("valid");
    let b = AffineElement::new(vec![b0()], IntVector::from_i64s(&[0, 1])).expect("valid");
    Presentation::new(1)
        .with("A", a, "unipotent generator A0 with translation (1,0)")
        .and_then(|p| p.with("B", b, "unipotent generator B0 with translation (0,1)"))
        .expect("distinct names")
}

/// A named fixture: either a scheme that needs numeric continuation or a
/// ready-made presentation.
#[derive(Clone, Debug, PartialEq)]
pub enum Fixture {
    Scheme(SchemeSpec),
    Synthetic(Presentation),
}

pub fn fixture(name: &str) -> Result<Fixture> {
    match name {
        ISO_EXAMPLE => Ok(Fixture::Scheme(iso_example())),
        NONISO_EXAMPLE => Ok(Fixture::Scheme(noniso_example())),
        REMARK_FIXTURE => Ok(Fixture::Synthetic(remark_presentation())),
        other => Err(Error::Input(format!(
            "unknown fixture `{other}` (known: {})",
            FIXTURE_NAMES.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schemes_validate() {
        iso_example().validate().unwrap();
        noniso_example().validate().unwrap();
    }

    #[test]
    fn singular_points() {
        let pts: Vec<f64> = iso_example().branch_points().iter().map(|p| p.re).collect();
        assert_eq!(pts, vec![-1.0, 0.0, 1.0, 2.0]);
        let pts: Vec<f64> = noniso_example().branch_points().iter().map(|p| p.re).collect();
        assert_eq!(pts, vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn lookup() {
        assert!(matches!(fixture(REMARK_FIXTURE), Ok(Fixture::Synthetic(p)) if p.len() == 2));
        assert!(fixture("nope").is_err());
    }
}
