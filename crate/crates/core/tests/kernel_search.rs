mod common;

use num_bigint::BigInt;
use proptest::prelude::*;

use relmon_core::affine::{a0, b0, AffineElement, Presentation, UniMat2};
use relmon_core::fixtures::{iso_example, noniso_example, remark_presentation};
use relmon_core::lattice::{hnf_big, q, IntVector, RationalMatrix};
use relmon_core::periods::{presentation_for_scheme, EngineConfig};
use relmon_core::search::{
    check_intertwiner, classify, evaluate_word, extract_m, harvest_kernel, relative_rank, subgroup_ranks,
    targeted_commutators, HarvestOutcome, IntertwinerMode, IntertwinerVerdict, SearchConfig, Verdict,
};

fn iso() -> Presentation {
    presentation_for_scheme(&iso_example(), &EngineConfig::default(), true).unwrap().0
}

fn noniso() -> Presentation {
    presentation_for_scheme(&noniso_example(), &EngineConfig::default(), true).unwrap().0
}

fn cfg(depth: usize, parallel: bool) -> SearchConfig {
    SearchConfig {
        parallel,
        ..SearchConfig::with_depth(depth)
    }
}

/// Translations of every period-trivial reduced word of length ≤ `depth`,
/// found by plain enumeration.
fn brute_force_kernel(p: &Presentation, depth: usize) -> Vec<Vec<BigInt>> {
    let gens = p.elements();
    let letters: Vec<(i32, AffineElement)> = gens
        .iter()
        .enumerate()
        .flat_map(|(i, g)| [(i as i32 + 1, g.clone()), (-(i as i32) - 1, g.inverse())])
        .collect();
    let mut out = Vec::new();
    let mut frontier: Vec<(i32, AffineElement)> = vec![(0, AffineElement::identity(p.k()))];
    for _ in 0..depth {
        let mut next = Vec::new();
        for (last, x) in &frontier {
            for (l, g) in &letters {
                if *l == -*last {
                    continue;
                }
                let y = x.compose(g).unwrap();
                if y.is_period_trivial() && !y.translation().is_zero() {
                    out.push(y.translation().to_bigints());
                }
                next.push((*l, y));
            }
        }
        frontier = next;
    }
    out
}

fn lattice_of(h: &HarvestOutcome) -> Vec<Vec<BigInt>> {
    let rows: Vec<Vec<BigInt>> = h.records.iter().map(|r| r.element.translation().to_bigints()).collect();
    hnf_big(&rows).unwrap().0
}

#[test]
fn harvest_spans_the_brute_force_lattice() {
    for (p, depth) in [(iso(), 3), (noniso(), 4), (remark_presentation(), 8)] {
        let h = harvest_kernel(&p, &cfg(depth, true)).unwrap();
        assert!(!h.partial);
        let brute = brute_force_kernel(&p, depth);
        let expect = if brute.is_empty() { Vec::new() } else { hnf_big(&brute).unwrap().0 };
        assert_eq!(lattice_of(&h), expect, "depth {depth}");
    }
}

#[test]
fn records_verify_and_are_reduced() {
    let p = iso();
    let h = harvest_kernel(&p, &cfg(4, true)).unwrap();
    assert!(!h.records.is_empty());
    for r in &h.records {
        assert!(r.verify(&p));
        assert!(r.kernel_flag && r.element.is_period_trivial());
        assert!(r.word.windows(2).all(|w| w[0] != -w[1]));
        assert_eq!(evaluate_word(&p, &r.word).unwrap(), r.element);
    }
}

#[test]
fn parallel_and_sequential_harvests_agree() {
    for p in [iso(), noniso()] {
        let a = harvest_kernel(&p, &cfg(4, true)).unwrap();
        let b = harvest_kernel(&p, &cfg(4, false)).unwrap();
        assert_eq!(a.records, b.records);
        assert_eq!(a.nodes, b.nodes);
        let a = classify(&p, &cfg(4, true)).unwrap();
        let b = classify(&p, &cfg(4, false)).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn ranks_are_monotone_in_depth() {
    for p in [iso(), noniso()] {
        let mut last = 0;
        for depth in 1..=5 {
            let h = harvest_kernel(&p, &cfg(depth, true)).unwrap();
            let rank = relative_rank(&h.records, 2).unwrap().rank;
            assert!(rank >= last, "rank dropped from {last} to {rank} at depth {depth}");
            last = rank;
        }
        assert_eq!(last, 4);
    }
}

#[test]
fn commutators_are_period_trivial() {
    let p = noniso();
    let h = targeted_commutators(&p, &cfg(6, true)).unwrap();
    assert!(!h.records.is_empty());
    for r in &h.records {
        assert!(r.kernel_flag && r.verify(&p));
    }
}

fn shared_block_pair(m: [[i64; 2]; 2]) -> Presentation {
    // second translation is M times the first
    let gens = [(a0(), [1, 0]), (b0(), [0, 1]), (a0(), [1, 2])];
    let mut p = Presentation::new(2);
    for (i, (t, u)) in gens.into_iter().enumerate() {
        let v = [m[0][0] * u[0] + m[0][1] * u[1], m[1][0] * u[0] + m[1][1] * u[1]];
        let e = AffineElement::new(vec![t.clone(), t], IntVector::from_i64s(&[u[0], u[1], v[0], v[1]])).unwrap();
        p.push(format!("g{i}"), e, "").unwrap();
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extracted_m_maps_first_parts_to_second(c in -4i64..=4) {
        prop_assume!(c != 0);
        let p = shared_block_pair([[c, 0], [0, c]]);
        let h = harvest_kernel(&p, &cfg(6, true)).unwrap();
        let m = extract_m(&h.records).expect("two independent first parts");
        prop_assert_eq!(&m, &RationalMatrix::scalar(2, q(c)));
        for r in &h.records {
            let t = r.element.translation().to_bigints();
            let u: Vec<_> = t[..2].iter().map(|x| num_rational::BigRational::from_integer(x.clone())).collect();
            let v: Vec<_> = t[2..].iter().map(|x| num_rational::BigRational::from_integer(x.clone())).collect();
            prop_assert_eq!(m.apply(&u).unwrap(), v);
        }
        let rep = check_intertwiner(&m, &p, IntertwinerMode::SameRep).unwrap();
        prop_assert_eq!(rep.verdict, IntertwinerVerdict::Scalar);
        let report = classify(&p, &cfg(6, true)).unwrap();
        prop_assert_eq!(report.verdict, Verdict::Rank2Dependent);
    }
}

#[test]
fn non_scalar_m_is_not_an_intertwiner() {
    let p = shared_block_pair([[1, 1], [0, 1]]);
    let rep = check_intertwiner(&RationalMatrix::from_i64(&[&[1, 1], &[0, 1]]), &p, IntertwinerMode::SameRep).unwrap();
    assert!(!rep.residuals_vanish);
    assert_eq!(rep.verdict, IntertwinerVerdict::Other);
}

#[test]
fn unipotent_fixture_has_only_torsion() {
    let p = remark_presentation();
    let h = harvest_kernel(&p, &cfg(10, true)).unwrap();
    assert!(h.records.iter().all(|r| r.element.translation().is_zero()));
    assert_eq!(classify(&p, &cfg(10, true)).unwrap().verdict, Verdict::TorsionLike);
}

#[test]
fn subgroup_ranks_of_the_examples() {
    for p in [iso(), noniso()] {
        let h = harvest_kernel(&p, &cfg(6, true)).unwrap();
        let s = subgroup_ranks(&h.records).unwrap();
        assert_eq!((s.k1, s.k2, s.h1, s.h2), (2, 2, 2, 2));
    }
    let t = UniMat2::identity();
    let mut p = Presentation::new(2);
    p.push("e", AffineElement::new(vec![t.clone(), t], IntVector::from_i64s(&[1, 0, 0, 0])).unwrap(), "").unwrap();
    let h = harvest_kernel(&p, &cfg(2, true)).unwrap();
    let s = subgroup_ranks(&h.records).unwrap();
    assert_eq!((s.k1, s.k2, s.h1, s.h2), (1, 0, 0, 1));
    // a rank-one H never yields a verdict
    assert_eq!(classify(&p, &cfg(2, true)).unwrap().verdict, Verdict::Inconclusive);
}
