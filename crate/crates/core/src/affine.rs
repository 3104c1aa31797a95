//! The affine group SL₂(ℤ)ᵏ ⋉ ℤ²ᵏ in which the simultaneous monodromy of
//! periods and logarithms lives.
//!
//! An element `(T, w)` records a block-diagonal period monodromy `T` (one
//! unimodular 2×2 block per elliptic factor) and the integer translation `w`
//! of the logarithm coordinates. Composition follows the cocycle law
//! `w_{gh} = w_g + T_g·w_h`. This is the same group as the unipotent-corner
//! matrices `[[T, w], [0, 1]]`, stored without materialising them.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::int::Int;
use crate::lattice::{IntMat2, IntVector, Rational, RationalMatrix};

/// 2×2 integer matrix of determinant one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UniMat2 {
    a: Int,
    b: Int,
    c: Int,
    d: Int,
}

impl UniMat2 {
    pub fn new(a: Int, b: Int, c: Int, d: Int) -> Result<Self> {
        let det = &(&a * &d) - &(&b * &c);
        if !det.is_one() {
            return Err(Error::Input(format!(
                "matrix [[{a}, {b}], [{c}, {d}]] has determinant {det}, expected 1"
            )));
        }
        Ok(UniMat2 { a, b, c, d })
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        UniMat2 {
            a: Int::ONE,
            b: Int::ZERO,
            c: Int::ZERO,
            d: Int::ONE,
        }
    }

    pub fn entries(&self) -> [&Int; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn to_mat(&self) -> IntMat2 {
        [[self.a.clone(), self.b.clone()], [self.c.clone(), self.d.clone()]]
    }

    pub fn from_mat(m: &IntMat2) -> Result<Self> {
        Self::new(m[0][0].clone(), m[0][1].clone(), m[1][0].clone(), m[1][1].clone())
    }

    pub fn to_rational(&self) -> RationalMatrix {
        RationalMatrix::from_ints(&[vec![self.a.clone(), self.b.clone()], vec![self.c.clone(), self.d.clone()]])
            .expect("2x2")
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_one() && self.b.is_zero() && self.c.is_zero() && self.d.is_one()
    }

    pub fn mul(&self, o: &UniMat2) -> UniMat2 {
        UniMat2 {
            a: &(&self.a * &o.a) + &(&self.b * &o.c),
            b: &(&self.a * &o.b) + &(&self.b * &o.d),
            c: &(&self.c * &o.a) + &(&self.d * &o.c),
            d: &(&self.c * &o.b) + &(&self.d * &o.d),
        }
    }

    /// Adjugate, which is the inverse because the determinant is one.
    pub fn inverse(&self) -> UniMat2 {
        UniMat2 {
            a: self.d.clone(),
            b: -&self.b,
            c: -&self.c,
            d: self.a.clone(),
        }
    }

    pub fn transpose(&self) -> UniMat2 {
        UniMat2 {
            a: self.a.clone(),
            b: self.c.clone(),
            c: self.b.clone(),
            d: self.d.clone(),
        }
    }

    pub fn apply(&self, v: [&Int; 2]) -> [Int; 2] {
        [
            &(&self.a * v[0]) + &(&self.b * v[1]),
            &(&self.c * v[0]) + &(&self.d * v[1]),
        ]
    }

    /// `T ≡ I (mod n)`.
    pub fn is_identity_mod(&self, n: u64) -> bool {
        self.a.rem_euclid_u64(n) == 1 % n
            && self.b.rem_euclid_u64(n) == 0
            && self.c.rem_euclid_u64(n) == 0
            && self.d.rem_euclid_u64(n) == 1 % n
    }

    pub fn trace(&self) -> Int {
        &self.a + &self.d
    }
}

impl fmt::Debug for UniMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Display for UniMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for UniMat2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [&self.a, &self.b, &self.c, &self.d].serialize(s)
    }
}

impl<'de> Deserialize<'de> for UniMat2 {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [a, b, c, dd]: [Int; 4] = Deserialize::deserialize(d)?;
        UniMat2::new(a, b, c, dd).map_err(serde::de::Error::custom)
    }
}

/// `[[1,2],[0,1]]`, the first standard unipotent generator of Γ(2).
pub fn a0() -> UniMat2 {
    UniMat2::from_i64(1, 2, 0, 1).expect("unimodular")
}

/// `[[1,0],[2,1]]`, the second standard unipotent generator of Γ(2).
pub fn b0() -> UniMat2 {
    UniMat2::from_i64(1, 0, 2, 1).expect("unimodular")
}

/// One element `(T, w)` of SL₂(ℤ)ᵏ ⋉ ℤ²ᵏ.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AffineElement {
    blocks: Vec<UniMat2>,
    translation: IntVector,
}

impl<'de> Deserialize<'de> for AffineElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            blocks: Vec<UniMat2>,
            translation: IntVector,
        }
        let raw = Raw::deserialize(d)?;
        AffineElement::new(raw.blocks, raw.translation).map_err(serde::de::Error::custom)
    }
}

impl AffineElement {
    pub fn new(blocks: Vec<UniMat2>, translation: IntVector) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Input("an affine element needs at least one factor".into()));
        }
        if translation.len() != 2 * blocks.len() {
            return Err(Error::Input(format!(
                "{} factors need a translation of length {}, got {}",
                blocks.len(),
                2 * blocks.len(),
                translation.len()
            )));
        }
        Ok(AffineElement { blocks, translation })
    }

    pub fn identity(k: usize) -> Self {
        AffineElement {
            blocks: vec![UniMat2::identity(); k],
            translation: IntVector::zeros(2 * k),
        }
    }

    /// Pure translation `(I, …, I; w)`.
    pub fn translation_only(w: IntVector) -> Result<Self> {
        if w.is_empty() || !w.len().is_multiple_of(2) {
            return Err(Error::Input("translation length must be a positive even number".into()));
        }
        let k = w.len() / 2;
        Self::new(vec![UniMat2::identity(); k], w)
    }

    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[UniMat2] {
        &self.blocks
    }

    pub fn translation(&self) -> &IntVector {
        &self.translation
    }

    fn check_k(&self, other: &AffineElement) -> Result<()> {
        if self.k() != other.k() {
            return Err(Error::Input(format!(
                "factor count mismatch: {} vs {}",
                self.k(),
                other.k()
            )));
        }
        Ok(())
    }

    /// blockdiag(T)·v for a translation-shaped vector.
    fn act(&self, v: &IntVector) -> IntVector {
        let mut out = Vec::with_capacity(v.len());
        for (i, t) in self.blocks.iter().enumerate() {
            let [x, y] = t.apply([&v.0[2 * i], &v.0[2 * i + 1]]);
            out.push(x);
            out.push(y);
        }
        IntVector(out)
    }

    /// `x ∘ y = (T_x T_y, w_x + T_x w_y)`.
    pub fn compose(&self, y: &AffineElement) -> Result<AffineElement> {
        self.check_k(y)?;
        Ok(self.compose_unchecked(y))
    }

    pub(crate) fn compose_unchecked(&self, y: &AffineElement) -> AffineElement {
        let blocks = self.blocks.iter().zip(&y.blocks).map(|(a, b)| a.mul(b)).collect();
        let translation = self.translation.add(&self.act(&y.translation));
        AffineElement { blocks, translation }
    }

    /// `(T⁻¹, −T⁻¹ w)`.
    pub fn inverse(&self) -> AffineElement {
        let blocks: Vec<UniMat2> = self.blocks.iter().map(UniMat2::inverse).collect();
        let inv = AffineElement {
            blocks,
            translation: IntVector::zeros(self.translation.len()),
        };
        let translation = inv.act(&self.translation).neg();
        AffineElement {
            translation,
            ..inv
        }
    }

    /// `x y x⁻¹ y⁻¹`.
    pub fn commutator(&self, y: &AffineElement) -> Result<AffineElement> {
        self.check_k(y)?;
        Ok(self
            .compose_unchecked(y)
            .compose_unchecked(&self.inverse())
            .compose_unchecked(&y.inverse()))
    }

    pub fn pow(&self, n: i64) -> AffineElement {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = AffineElement::identity(self.k());
        for _ in 0..n.unsigned_abs() {
            acc = acc.compose_unchecked(&base);
        }
        acc
    }

    /// Concatenates factors: `(T₁ ⊕ T₂; w₁ ⊕ w₂)`.
    pub fn direct_sum(&self, other: &AffineElement) -> AffineElement {
        let mut blocks = self.blocks.clone();
        blocks.extend(other.blocks.iter().cloned());
        let mut t = self.translation.0.clone();
        t.extend(other.translation.0.iter().cloned());
        AffineElement {
            blocks,
            translation: IntVector(t),
        }
    }

    /// The `i`-th factor (1-based) as a single-factor element.
    pub fn project_factor(&self, i: usize) -> Result<AffineElement> {
        if i == 0 || i > self.k() {
            return Err(Error::Input(format!(
                "factor index {i} out of range 1..={}",
                self.k()
            )));
        }
        Ok(AffineElement {
            blocks: vec![self.blocks[i - 1].clone()],
            translation: self.translation.slice(2 * (i - 1)..2 * i),
        })
    }

    /// True when every period block is the identity, i.e. the element lies in
    /// the kernel of the period representation.
    pub fn is_period_trivial(&self) -> bool {
        self.blocks.iter().all(UniMat2::is_identity)
    }

    pub fn is_identity(&self) -> bool {
        self.is_period_trivial() && self.translation.is_zero()
    }

    /// The translation pair of factor `i` (1-based).
    pub fn factor_translation(&self, i: usize) -> IntVector {
        self.translation.slice(2 * (i - 1)..2 * i)
    }

    pub fn max_bits(&self) -> u64 {
        self.blocks
            .iter()
            .flat_map(|b| b.entries())
            .chain(self.translation.0.iter())
            .map(Int::bits)
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Debug for AffineElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b:?}")?;
        }
        write!(f, "; {})", self.translation)
    }
}

impl fmt::Display for AffineElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Affine element with rational entries, as produced by an isogeny transform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalAffine {
    pub blocks: Vec<RationalMatrix>,
    pub translation: Vec<Rational>,
}

impl RationalAffine {
    pub fn compose(&self, y: &RationalAffine) -> Result<RationalAffine> {
        if self.blocks.len() != y.blocks.len() {
            return Err(Error::Input("factor count mismatch".into()));
        }
        let mut translation = self.translation.clone();
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (i, (a, b)) in self.blocks.iter().zip(&y.blocks).enumerate() {
            blocks.push(a.mul(b)?);
            let tw = a.apply(&y.translation[2 * i..2 * i + 2])?;
            translation[2 * i] += &tw[0];
            translation[2 * i + 1] += &tw[1];
        }
        Ok(RationalAffine { blocks, translation })
    }

    pub fn from_integral(x: &AffineElement) -> Self {
        RationalAffine {
            blocks: x.blocks.iter().map(UniMat2::to_rational).collect(),
            translation: x
                .translation
                .0
                .iter()
                .map(|v| Rational::from_integer(v.to_bigint()))
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum IsogenyDirection {
    /// Transport from the source scheme to the target using ζ.
    #[default]
    Forward,
    /// Transport back using ζ⁻¹.
    Backward,
}

/// Rational matrix ζ relating period bases across an isogeny.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsogenyData {
    pub zeta: RationalMatrix,
    #[serde(default)]
    pub direction: IsogenyDirection,
}

impl IsogenyData {
    pub fn new(zeta: RationalMatrix, direction: IsogenyDirection) -> Result<Self> {
        if zeta.nrows() != 2 || zeta.ncols() != 2 {
            return Err(Error::Dimension("ζ must be 2x2 per factor".into()));
        }
        if !zeta.is_invertible() {
            return Err(Error::Input("ζ is singular".into()));
        }
        Ok(IsogenyData { zeta, direction })
    }

    fn effective(&self) -> Result<RationalMatrix> {
        match self.direction {
            IsogenyDirection::Forward => Ok(self.zeta.clone()),
            IsogenyDirection::Backward => self.zeta.inverse(),
        }
    }
}

/// Conjugates every block by ζᵀ and maps the translation by ζᵀ:
/// `T ↦ ζᵀ T (ζᵀ)⁻¹`, `w ↦ ζᵀ w`. The same ζ is applied to every factor.
pub fn isogeny_transform(x: &AffineElement, iso: &IsogenyData) -> Result<RationalAffine> {
    let z = iso.effective()?;
    if !z.is_invertible() {
        return Err(Error::Input("ζ is singular".into()));
    }
    let zt = z.transpose();
    let zt_inv = zt.inverse()?;
    let mut blocks = Vec::with_capacity(x.k());
    let mut translation = Vec::with_capacity(2 * x.k());
    for (i, b) in x.blocks.iter().enumerate() {
        blocks.push(zt.mul(&b.to_rational())?.mul(&zt_inv)?);
        let w: Vec<Rational> = x.translation.0[2 * i..2 * i + 2]
            .iter()
            .map(|v| Rational::from_integer(v.to_bigint()))
            .collect();
        translation.extend(zt.apply(&w)?);
    }
    Ok(RationalAffine { blocks, translation })
}

/// Integral model of a transformed family: translations are multiplied by
/// the common denominator `scale`; blocks must already be integral.
///
/// Scaling every translation by the same factor is an automorphism of the
/// cocycle structure, so kernel membership and lattice ranks are preserved.
pub fn saturate(elements: &[RationalAffine]) -> Result<(Vec<AffineElement>, BigInt)> {
    let all: Vec<Rational> = elements.iter().flat_map(|e| e.translation.iter().cloned()).collect();
    let scale = crate::lattice::common_denominator(&all);
    let factor = Rational::from_integer(scale.clone());
    let mut out = Vec::with_capacity(elements.len());
    for e in elements {
        let mut blocks = Vec::with_capacity(e.blocks.len());
        for b in &e.blocks {
            let rows = b.to_integer_rows().ok_or_else(|| {
                Error::Input(format!("transformed block {b} is not integral"))
            })?;
            blocks.push(UniMat2::new(
                rows[0][0].clone(),
                rows[0][1].clone(),
                rows[1][0].clone(),
                rows[1][1].clone(),
            )?);
        }
        let translation = e
            .translation
            .iter()
            .map(|t| {
                let v = t * &factor;
                debug_assert!(v.is_integer());
                Int::from(v.to_integer())
            })
            .collect();
        out.push(AffineElement::new(blocks, IntVector(translation))?);
    }
    Ok((out, if scale.is_zero() { BigInt::one() } else { scale }))
}

/// A generator of the monodromy image together with where it came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub name: String,
    pub element: AffineElement,
    pub provenance: String,
}

/// Ordered, named generating set of a subgroup of SL₂(ℤ)ᵏ ⋉ ℤ²ᵏ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Presentation {
    k: usize,
    generators: Vec<Generator>,
}

impl<'de> Deserialize<'de> for Presentation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            k: usize,
            generators: Vec<Generator>,
        }
        let raw = Raw::deserialize(d)?;
        let mut p = Presentation::new(raw.k);
        for g in raw.generators {
            p.push(g.name, g.element, g.provenance).map_err(serde::de::Error::custom)?;
        }
        Ok(p)
    }
}

impl Presentation {
    pub fn new(k: usize) -> Self {
        Presentation {
            k,
            generators: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, element: AffineElement, provenance: impl Into<String>) -> Result<()> {
        let name = name.into();
        if element.k() != self.k {
            return Err(Error::Input(format!(
                "generator `{name}` has {} factors, presentation has {}",
                element.k(),
                self.k
            )));
        }
        if self.generators.iter().any(|g| g.name == name) {
            return Err(Error::Input(format!("duplicate generator name `{name}`")));
        }
        self.generators.push(Generator {
            name,
            element,
            provenance: provenance.into(),
        });
        Ok(())
    }

    pub fn with(mut self, name: &str, element: AffineElement, provenance: &str) -> Result<Self> {
        self.push(name, element, provenance)?;
        Ok(self)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn elements(&self) -> Vec<AffineElement> {
        self.generators.iter().map(|g| g.element.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&AffineElement> {
        self.generators.iter().find(|g| g.name == name).map(|g| &g.element)
    }

    /// Period blocks of every generator, as matrices for the mod-p and
    /// intertwining solvers.
    pub fn block_tuples(&self) -> Vec<Vec<IntMat2>> {
        self.generators
            .iter()
            .map(|g| g.element.blocks().iter().map(UniMat2::to_mat).collect())
            .collect()
    }

    /// Applies an isogeny transform to every generator and rescales to an
    /// integral model. Returns the new presentation and the scale used.
    pub fn transform(&self, iso: &IsogenyData) -> Result<(Presentation, BigInt)> {
        let transformed = self
            .generators
            .iter()
            .map(|g| isogeny_transform(&g.element, iso))
            .collect::<Result<Vec<_>>>()?;
        let (elements, scale) = saturate(&transformed)?;
        let mut out = Presentation::new(self.k);
        for (g, e) in self.generators.iter().zip(elements) {
            out.push(g.name.clone(), e, format!("{} (isogeny transform)", g.provenance))?;
        }
        Ok((out, scale))
    }

    /// Canonical JSON: stable field order, integers as decimal strings.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("presentation serializes")
    }
}
