//! Ranks of the harvested translation lattice, conjugators between the
//! factor representations, the intertwiner `M`, and the verdict.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{commutators_with_deadline, harvest_with_deadline, push_unique, HarvestRecord, SearchConfig};
use crate::affine::Presentation;
use crate::error::{Error, Result};
use crate::int::Int;
use crate::lattice::{
    mod_p_closure, normalize_direction, rational_rank, sl2_order, sylvester_nullspace, ClosureResult, IntVector,
    Rational, RationalMatrix, TranslationLattice, MAX_AMBIENT_ORDER,
};

/// Lattice spanned by the translations of the kernel-flagged records.
pub fn relative_rank(records: &[HarvestRecord], k: usize) -> Result<TranslationLattice> {
    let gens: Vec<IntVector> = records
        .iter()
        .filter(|r| r.kernel_flag && r.element.is_period_trivial())
        .map(|r| r.element.translation().clone())
        .collect();
    TranslationLattice::new(2 * k, gens)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupRanks {
    /// First-factor parts `u` of the kernel translations.
    #[serde(rename = "rank_K1")]
    pub k1: usize,
    /// Second-factor parts `v`.
    #[serde(rename = "rank_K2")]
    pub k2: usize,
    /// `v`-parts of lattice vectors with `u = 0`.
    #[serde(rename = "rank_H1")]
    pub h1: usize,
    /// `u`-parts of lattice vectors with `v = 0`.
    #[serde(rename = "rank_H2")]
    pub h2: usize,
}

/// Ranks of the projections and sections of the lattice generated by the
/// records. Sections are taken in the generated lattice, not only among the
/// records themselves.
pub fn subgroup_ranks(records: &[HarvestRecord]) -> Result<SubgroupRanks> {
    let lat = relative_rank(records, 2)?;
    Ok(SubgroupRanks {
        k1: lat.project(0..2)?.rank,
        k2: lat.project(2..4)?.rank,
        h1: lat.section(0..2, 2..4)?.rank,
        h2: lat.section(2..4, 0..2)?.rank,
    })
}

/// True iff no kernel record moves the `i`-th (1-based) logarithm.
pub fn torsion_test(records: &[HarvestRecord], i: usize) -> Result<bool> {
    if i == 0 {
        return Err(Error::Input("factor index is 1-based".into()));
    }
    for r in records.iter().filter(|r| r.kernel_flag) {
        if i > r.element.k() {
            return Err(Error::Input(format!("factor {i} out of range for k = {}", r.element.k())));
        }
        if !r.element.factor_translation(i).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugatorSearch {
    /// Invertible `ζ` with `ρ₁(g)·ζ = ζ·ρ₂(g)` for every generator.
    pub conjugator: Option<RationalMatrix>,
    /// Mod-p image of the pair of block representations, when computed.
    pub density: Option<ClosureResult>,
}

/// Looks for a rational `ζ` conjugating the second block representation to
/// the first. A full mod-p image of the pair rules conjugacy out.
pub fn detect_conjugator(pres: &Presentation, density_prime: u64, parallel: bool) -> Result<ConjugatorSearch> {
    if pres.k() != 2 {
        return Err(Error::Input(format!("conjugator search needs two factors, got {}", pres.k())));
    }
    let tuples = pres.block_tuples();
    let ambient = sl2_order(density_prime).saturating_pow(2);
    let density = if ambient <= MAX_AMBIENT_ORDER && !tuples.is_empty() {
        Some(mod_p_closure(&tuples, density_prime, parallel)?)
    } else {
        None
    };
    if density.as_ref().is_some_and(|d| d.full) {
        return Ok(ConjugatorSearch {
            conjugator: None,
            density,
        });
    }
    let pairs: Vec<_> = tuples.iter().map(|t| (t[1].clone(), t[0].clone())).collect();
    let basis = sylvester_nullspace(&pairs);
    let conjugator = invertible_combination(&basis);
    Ok(ConjugatorSearch { conjugator, density })
}

/// First invertible element among the basis vectors, then among small
/// integer combinations with coefficients in `−2..=2`.
fn invertible_combination(basis: &[RationalMatrix]) -> Option<RationalMatrix> {
    if let Some(b) = basis.iter().find(|b| b.is_invertible()) {
        return Some(normalize_direction(b.clone()));
    }
    let r = basis.len();
    if r < 2 {
        return None;
    }
    let total = 5usize.pow(r as u32);
    for code in 0..total {
        let mut c = code;
        let mut m = RationalMatrix::zeros(2, 2);
        for b in basis {
            let coef = (c % 5) as i64 - 2;
            c /= 5;
            m = m.sub(&b.scale(&Rational::from_integer((-coef).into()))).ok()?;
        }
        if m.is_invertible() {
            return Some(normalize_direction(m));
        }
    }
    None
}

fn uv(r: &HarvestRecord) -> ([Rational; 2], [Rational; 2]) {
    let t = &r.element.translation().0;
    let q = |x: &Int| Rational::from_integer(x.to_bigint());
    ([q(&t[0]), q(&t[1])], [q(&t[2]), q(&t[3])])
}

/// `M` with `M·u = v` for every kernel record `(u, v)`, solved on the first
/// two records with ℚ-independent `u` and then checked on all of them.
pub fn extract_m(records: &[HarvestRecord]) -> Option<RationalMatrix> {
    let kernel: Vec<&HarvestRecord> = records
        .iter()
        .filter(|r| r.kernel_flag && r.element.k() == 2 && r.element.is_period_trivial())
        .collect();
    let mut chosen: Vec<([Rational; 2], [Rational; 2])> = Vec::new();
    for r in &kernel {
        let (u, v) = uv(r);
        if u.iter().all(Zero::is_zero) {
            continue;
        }
        if chosen.len() == 1 {
            let (u0, _) = &chosen[0];
            if (&u0[0] * &u[1] - &u0[1] * &u[0]).is_zero() {
                continue;
            }
        }
        chosen.push((u, v));
        if chosen.len() == 2 {
            break;
        }
    }
    if chosen.len() < 2 {
        return None;
    }
    let ucols = RationalMatrix::from_rows(vec![
        vec![chosen[0].0[0].clone(), chosen[1].0[0].clone()],
        vec![chosen[0].0[1].clone(), chosen[1].0[1].clone()],
    ])
    .ok()?;
    let vcols = RationalMatrix::from_rows(vec![
        vec![chosen[0].1[0].clone(), chosen[1].1[0].clone()],
        vec![chosen[0].1[1].clone(), chosen[1].1[1].clone()],
    ])
    .ok()?;
    let m = vcols.mul(&ucols.inverse().ok()?).ok()?;
    for r in &kernel {
        let (u, v) = uv(r);
        if m.apply(&u).ok()? != v {
            return None;
        }
    }
    Some(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntertwinerMode {
    /// `M·ρ₁(g) − ρ₁(g)·M`.
    SameRep,
    /// `M·ρ₁(g) − ρ₂(g)·M`.
    CrossRep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntertwinerVerdict {
    Scalar,
    Zero,
    Other,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntertwinerReport {
    pub m: RationalMatrix,
    pub mode: IntertwinerMode,
    /// Largest absolute entry over all generator residuals.
    #[serde(with = "crate::lattice::rational_string")]
    pub max_residual: Rational,
    pub residuals_vanish: bool,
    pub verdict: IntertwinerVerdict,
}

pub fn check_intertwiner(m: &RationalMatrix, pres: &Presentation, mode: IntertwinerMode) -> Result<IntertwinerReport> {
    if m.nrows() != 2 || m.ncols() != 2 {
        return Err(Error::Dimension(format!("M must be 2×2, got {}×{}", m.nrows(), m.ncols())));
    }
    let other = match mode {
        IntertwinerMode::SameRep => 0,
        IntertwinerMode::CrossRep => 1,
    };
    if pres.k() <= other {
        return Err(Error::Input("cross-rep check needs two factors".into()));
    }
    let mut max_residual = Rational::zero();
    for g in pres.generators() {
        let r1 = g.element.blocks()[0].to_rational();
        let r = g.element.blocks()[other].to_rational();
        let res = m.mul(&r1)?.sub(&r.mul(m)?)?;
        for i in 0..2 {
            for j in 0..2 {
                let a = res[(i, j)].abs();
                if a > max_residual {
                    max_residual = a;
                }
            }
        }
    }
    let residuals_vanish = max_residual.is_zero();
    let verdict = if m.is_zero() {
        IntertwinerVerdict::Zero
    } else if residuals_vanish && m.as_scalar().is_some() {
        IntertwinerVerdict::Scalar
    } else {
        IntertwinerVerdict::Other
    };
    Ok(IntertwinerReport {
        m: m.clone(),
        mode,
        max_residual,
        residuals_vanish,
        verdict,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    TorsionLike,
    Rank2Dependent,
    Rank4Independent,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::TorsionLike => "TORSION_LIKE",
            Verdict::Rank2Dependent => "RANK2_DEPENDENT",
            Verdict::Rank4Independent => "RANK4_INDEPENDENT",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

const SAMPLE_RECORDS: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub k: usize,
    pub verdict: Verdict,
    /// The case of the classification that the evidence matches.
    pub citation: String,
    #[serde(rename = "rank_K")]
    pub rank_k: usize,
    #[serde(flatten)]
    pub subgroups: SubgroupRanks,
    /// Subgroups observed with rank one, which cannot persist in the limit.
    pub search_incomplete: Vec<String>,
    pub conjugator: Option<RationalMatrix>,
    pub density: Option<ClosureResult>,
    pub intertwiner: Option<IntertwinerReport>,
    /// Per factor: no kernel record moves its logarithm.
    pub torsion_evidence: Vec<bool>,
    pub lattice_basis: Vec<IntVector>,
    pub depth_used: usize,
    pub elements_found: usize,
    pub nodes_visited: usize,
    pub partial: bool,
    pub caveats: Vec<String>,
    pub records_sample: Vec<HarvestRecord>,
}

fn depth_schedule(max: usize) -> Vec<usize> {
    let mut d: Vec<usize> = (1..=max / 2).map(|h| 2 * h).collect();
    if d.last() != Some(&max) {
        d.push(max);
    }
    d
}

/// Harvest, rank and classify. Depth is increased in steps of two until the
/// translation lattice has full rank or `max_depth` is reached; ranks are
/// lower bounds at `depth_used`.
pub fn classify(pres: &Presentation, cfg: &SearchConfig) -> Result<ClassificationReport> {
    cfg.validate()?;
    let k = pres.k();
    if !(1..=2).contains(&k) {
        return Err(Error::Input(format!("classification covers one or two factors, got {k}")));
    }
    if pres.is_empty() {
        return Err(Error::Input("presentation has no generators".into()));
    }
    let start = Instant::now();
    let deadline = cfg.deadline(start);
    let conj = if k == 2 {
        Some(detect_conjugator(pres, cfg.density_prime, cfg.parallel)?)
    } else {
        None
    };

    let full_rank = 2 * k;
    let mut records: Vec<HarvestRecord> = Vec::new();
    let mut depth_used = 0;
    let mut partial = false;
    let mut nodes = 0;
    let mut lattice = TranslationLattice::zero(2 * k);
    for depth in depth_schedule(cfg.max_depth) {
        let step = SearchConfig {
            max_depth: depth,
            ..cfg.clone()
        };
        let mut found = harvest_with_deadline(pres, &step, deadline)?;
        if k == 2 {
            let c = commutators_with_deadline(pres, &step, deadline)?;
            found.partial |= c.partial;
            found.nodes += c.nodes;
            let mut seen: HashSet<_> = found.records.iter().map(|r| r.element.clone()).collect();
            for r in c.records {
                push_unique(&mut found.records, &mut seen, r);
            }
        }
        records = found.records;
        partial = found.partial;
        nodes = found.nodes;
        depth_used = depth;
        // upstream numerics can poison records, so flags are rechecked
        records.retain(|r| r.kernel_flag && r.element.is_period_trivial());
        lattice = relative_rank(&records, k)?;
        if lattice.rank == full_rank || partial {
            break;
        }
    }

    let rank_k = lattice.rank;
    let subgroups = if k == 2 {
        subgroup_ranks(&records)?
    } else {
        SubgroupRanks {
            k1: rank_k,
            k2: 0,
            h1: 0,
            h2: rank_k,
        }
    };
    let torsion_evidence = (1..=k).map(|i| torsion_test(&records, i)).collect::<Result<Vec<_>>>()?;
    let mut search_incomplete = Vec::new();
    for (name, r) in [("K1", subgroups.k1), ("K2", subgroups.k2), ("H1", subgroups.h1), ("H2", subgroups.h2)] {
        if r == 1 {
            search_incomplete.push(name.to_string());
        }
    }
    let conjugator = conj.as_ref().and_then(|c| c.conjugator.clone());
    let density = conj.and_then(|c| c.density);
    let isogenous = conjugator.is_some();
    let mut caveats = vec![format!(
        "ranks are lower bounds from words of length at most {depth_used}"
    )];
    if partial {
        caveats.push("search budget exhausted before the full depth was explored".into());
    }

    let mut intertwiner = None;
    let (verdict, citation) = if !search_incomplete.is_empty() {
        caveats.push(format!(
            "rank-one subgroup ({}) observed; such subgroups are excluded in the limit, so the search is incomplete",
            search_incomplete.join(", ")
        ));
        (Verdict::Inconclusive, "no case matched: rank-one subgroup".to_string())
    } else if rank_k == full_rank {
        let c = match (k, isogenous) {
            (1, _) => "single factor: non-torsion section, Galois group Z^2",
            (_, true) => "isogenous factors, case (2): sections independent up to isogeny, Galois group Z^4",
            (_, false) => "non-isogenous factors, case (2): both sections non-torsion, Galois group Z^4",
        };
        let v = if k == 1 {
            Verdict::Rank2Dependent
        } else {
            Verdict::Rank4Independent
        };
        (v, c.to_string())
    } else if partial {
        (Verdict::Inconclusive, "no case matched: search budget exhausted".to_string())
    } else if rank_k == 0 {
        caveats.push("kernel search found nothing; consistent with trivial kernel".into());
        (
            Verdict::TorsionLike,
            "trivial relative monodromy: consistent with torsion sections".to_string(),
        )
    } else if k == 2 && rank_k == 2 {
        if subgroups.k1 == 2 {
            match extract_m(&records) {
                None => {
                    caveats.push("no single M maps every first-factor translation to its partner".into());
                    (Verdict::Inconclusive, "no case matched: contradictory M".to_string())
                }
                Some(m) => {
                    let report = match &conjugator {
                        Some(z) => check_intertwiner(&z.mul(&m)?, pres, IntertwinerMode::SameRep)?,
                        None => check_intertwiner(&m, pres, IntertwinerMode::CrossRep)?,
                    };
                    let out = match (report.verdict, isogenous) {
                        (IntertwinerVerdict::Scalar, true) => (
                            Verdict::Rank2Dependent,
                            "isogenous factors, case (1): sections dependent up to isogeny, intertwiner scalar".to_string(),
                        ),
                        (IntertwinerVerdict::Zero, _) => (
                            Verdict::Rank2Dependent,
                            "one section torsion: Galois group Z^2 carried by the other factor".to_string(),
                        ),
                        _ => {
                            caveats.push(format!(
                                "intertwiner check gave {:?} in {:?} mode",
                                report.verdict, report.mode
                            ));
                            (Verdict::Inconclusive, "no case matched: intertwiner not scalar".to_string())
                        }
                    };
                    intertwiner = Some(report);
                    out
                }
            }
        } else {
            (
                Verdict::Rank2Dependent,
                "one section torsion: Galois group Z^2 carried by the other factor".to_string(),
            )
        }
    } else {
        (Verdict::Inconclusive, format!("no case matched: odd rank {rank_k}"))
    };

    Ok(ClassificationReport {
        k,
        verdict,
        citation,
        rank_k,
        subgroups,
        search_incomplete,
        conjugator,
        density,
        intertwiner,
        torsion_evidence,
        lattice_basis: lattice.hnf_basis.clone(),
        depth_used,
        elements_found: records.len(),
        nodes_visited: nodes,
        partial,
        caveats,
        records_sample: records.iter().take(SAMPLE_RECORDS).cloned().collect(),
    })
}

fn matrix_text(m: &RationalMatrix) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| format!("[{}]", m.row(i).iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

impl ClassificationReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "verdict: {}", self.verdict);
        let _ = writeln!(s, "case: {}", self.citation);
        let _ = writeln!(
            s,
            "ranks (lower bounds): K={} K1={} K2={} H1={} H2={}",
            self.rank_k, self.subgroups.k1, self.subgroups.k2, self.subgroups.h1, self.subgroups.h2
        );
        let _ = writeln!(
            s,
            "search: depth {}, {} kernel elements, {} words visited{}",
            self.depth_used,
            self.elements_found,
            self.nodes_visited,
            if self.partial { ", partial" } else { "" }
        );
        if let Some(d) = &self.density {
            let _ = writeln!(
                s,
                "mod-{} image of blocks: order {} of {}{}",
                d.p,
                d.order,
                d.ambient_order,
                if d.full { " (full)" } else { "" }
            );
        }
        if self.k == 2 {
            match &self.conjugator {
                Some(z) => {
                    let _ = writeln!(s, "conjugator: {}", matrix_text(z));
                }
                None => {
                    let _ = writeln!(s, "conjugator: none");
                }
            }
        }
        if let Some(i) = &self.intertwiner {
            let _ = writeln!(
                s,
                "intertwiner M = {} ({:?}, max residual {}): {:?}",
                matrix_text(&i.m),
                i.mode,
                i.max_residual,
                i.verdict
            );
        }
        for (i, t) in self.torsion_evidence.iter().enumerate() {
            let _ = writeln!(
                s,
                "factor {}: {}",
                i + 1,
                if *t { "no non-torsion evidence" } else { "logarithm moves under the kernel" }
            );
        }
        if !self.lattice_basis.is_empty() {
            let rows: Vec<String> = self.lattice_basis.iter().map(ToString::to_string).collect();
            let _ = writeln!(s, "lattice basis: {}", rows.join(" "));
        }
        for c in &self.caveats {
            let _ = writeln!(s, "note: {c}");
        }
        s
    }
}

/// Rank over ℚ of the kernel translations, an independent check of the
/// integer lattice rank.
pub fn rational_translation_rank(records: &[HarvestRecord]) -> usize {
    let rows: Vec<Vec<BigInt>> = records
        .iter()
        .filter(|r| r.kernel_flag)
        .map(|r| r.element.translation().to_bigints())
        .collect();
    rational_rank(&rows)
}
