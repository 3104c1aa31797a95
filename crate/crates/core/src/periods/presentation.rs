//! Loops that close on the section cover, and the monodromy presentation
//! computed from them.

use std::collections::HashMap;

use super::continuation::{loop_action, loop_monodromy, ContinuationResult, EngineConfig, LoopAction};
use super::path::{auto_loops, LoopPath};
use super::scheme::{SchemeSpec, SingularKind};
use crate::affine::Presentation;
use crate::error::{Error, Result};
use crate::par;

/// Cancels adjacent inverse letters.
pub fn free_reduce(word: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(word.len());
    for &l in word {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn invert_word(word: &[i32]) -> Vec<i32> {
    word.iter().rev().map(|l| -l).collect()
}

/// Human-readable word over named basic loops.
pub fn word_label(word: &[i32], basic: &[LoopPath]) -> String {
    if word.is_empty() {
        return "1".into();
    }
    word.iter()
        .map(|&l| {
            let name = &basic[l.unsigned_abs() as usize - 1].name;
            if l > 0 {
                name.clone()
            } else {
                format!("{name}^-1")
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

/// A loop that closes on the cover, as a word in the basic loops.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverLoop {
    pub path: LoopPath,
    pub word: Vec<i32>,
}

/// Schreier generators of the subgroup of loops that return every tracked
/// square root to its starting branch.
///
/// The sign action factors through `(ℤ/2)^m`, so the subgroup is normal of
/// index `2^r`. Coset representatives are found breadth-first, trying loops
/// that leave the periods unchanged first so that as many generators as
/// possible are conjugates of pure period loops by sheet swaps.
pub fn cover_loops(basic: &[LoopPath], actions: &[LoopAction]) -> Result<Vec<CoverLoop>> {
    if basic.len() != actions.len() {
        return Err(Error::Dimension(format!(
            "{} loops but {} actions",
            basic.len(),
            actions.len()
        )));
    }
    let mask = |a: &LoopAction| a.sign_flips.iter().enumerate().fold(0u64, |m, (i, &f)| m | ((f as u64) << i));
    let masks: Vec<u64> = actions.iter().map(mask).collect();
    let mut order: Vec<usize> = (0..basic.len()).collect();
    order.sort_by_key(|&i| !actions[i].blocks.iter().all(|b| b.is_identity()));

    let mut reps: Vec<(u64, Vec<i32>)> = vec![(0, Vec::new())];
    let mut index: HashMap<u64, usize> = HashMap::from([(0, 0)]);
    let mut head = 0;
    while head < reps.len() {
        let (m, w) = reps[head].clone();
        for &i in &order {
            let next = m ^ masks[i];
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(next) {
                e.insert(reps.len());
                let mut nw = w.clone();
                nw.push(i as i32 + 1);
                reps.push((next, nw));
            }
        }
        head += 1;
    }

    let mut out: Vec<CoverLoop> = Vec::new();
    for (m, t) in &reps {
        for (i, &mi) in masks.iter().enumerate() {
            let target = &reps[index[&(m ^ mi)]].1;
            let mut word = t.clone();
            word.push(i as i32 + 1);
            word.extend(invert_word(target));
            let word = free_reduce(&word);
            if word.is_empty() || out.iter().any(|c| c.word == word) {
                continue;
            }
            let name = format!("g{}", out.len() + 1);
            let path = LoopPath::from_word(name, basic, &word)?;
            out.push(CoverLoop { path, word });
        }
    }
    Ok(out)
}

/// Basic loops around every singular point of `scheme`, from the configured
/// base point.
pub fn basic_loops(scheme: &SchemeSpec, cfg: &EngineConfig) -> Result<Vec<LoopPath>> {
    auto_loops(&scheme.branch_points(), cfg.base_point, cfg.clearance, cfg.circle_vertices)
}

/// Basic loops, their actions and the cover loops built from them.
pub struct CoverData {
    pub basic: Vec<LoopPath>,
    pub kinds: Vec<SingularKind>,
    pub actions: Vec<LoopAction>,
    pub loops: Vec<CoverLoop>,
}

pub fn cover_data(scheme: &SchemeSpec, cfg: &EngineConfig, parallel: bool) -> Result<CoverData> {
    scheme.validate()?;
    let basic = basic_loops(scheme, cfg)?;
    let kinds = scheme.singular_points().into_iter().map(|s| s.kind).collect();
    let actions = par::map_ordered_coarse(&basic, parallel, |l| loop_action(l, scheme, cfg))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let loops = cover_loops(&basic, &actions)?;
    Ok(CoverData {
        basic,
        kinds,
        actions,
        loops,
    })
}

/// Computes the monodromy of every loop with `extract` and collects the
/// results into a presentation; loop names become generator names.
pub fn build_presentation_with<F>(scheme: &SchemeSpec, loops: &[LoopPath], parallel: bool, extract: F) -> Result<Presentation>
where
    F: Fn(&LoopPath) -> Result<ContinuationResult> + Sync,
{
    scheme.validate()?;
    if loops.is_empty() {
        return Err(Error::Input("no loops to continue along".into()));
    }
    let base = loops[0].base_point;
    if let Some(l) = loops.iter().find(|l| (l.base_point - base).norm() > 1e-12) {
        return Err(Error::Input(format!("loop `{}` has a different base point", l.name)));
    }
    let results = par::map_ordered_coarse(loops, parallel, |l| extract(l));
    let mut p = Presentation::new(scheme.k());
    for (l, r) in loops.iter().zip(results) {
        let r = r?;
        p.push(
            l.name.clone(),
            r.element,
            format!("continuation, residual {:.1e}, {} samples", r.residual, r.frames_sampled),
        )?;
    }
    Ok(p)
}

pub fn build_presentation(scheme: &SchemeSpec, loops: &[LoopPath], cfg: &EngineConfig, parallel: bool) -> Result<Presentation> {
    build_presentation_with(scheme, loops, parallel, |l| loop_monodromy(l, scheme, cfg))
}

/// Presentation of the monodromy on the cover, from automatically generated
/// loops. Generator provenance records the word in the basic loops.
pub fn presentation_for_scheme(scheme: &SchemeSpec, cfg: &EngineConfig, parallel: bool) -> Result<(Presentation, CoverData)> {
    let data = cover_data(scheme, cfg, parallel)?;
    let paths: Vec<LoopPath> = data.loops.iter().map(|c| c.path.clone()).collect();
    let raw = build_presentation(scheme, &paths, cfg, parallel)?;
    let mut p = Presentation::new(scheme.k());
    for (g, c) in raw.generators().iter().zip(&data.loops) {
        p.push(
            g.name.clone(),
            g.element.clone(),
            format!("{} ({})", word_label(&c.word, &data.basic), g.provenance),
        )?;
    }
    Ok((p, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::UniMat2;

    fn action(flips: &[bool], trivial: bool) -> LoopAction {
        let b = if trivial {
            UniMat2::identity()
        } else {
            UniMat2::from_i64(1, 2, 0, 1).unwrap()
        };
        LoopAction {
            sign_flips: flips.to_vec(),
            blocks: vec![b],
            log_signs: vec![None],
            residual: 0.0,
            frames_sampled: 0,
        }
    }

    #[test]
    fn reduction() {
        assert_eq!(free_reduce(&[1, 2, -2, -1, 3]), vec![3]);
        assert_eq!(free_reduce(&[1, -1]), Vec::<i32>::new());
        assert_eq!(invert_word(&[1, -2]), vec![2, -1]);
    }

    #[test]
    fn schreier_count_matches_index_formula() {
        // free group of rank n, normal subgroup of index d: rank d(n−1)+1
        let base = num_complex::Complex64::new(0.25, 0.25);
        let basic = auto_loops(
            &[
                num_complex::Complex64::new(-1.0, 0.0),
                num_complex::Complex64::new(0.0, 0.0),
                num_complex::Complex64::new(1.0, 0.0),
                num_complex::Complex64::new(2.0, 0.0),
            ],
            base,
            0.05,
            8,
        )
        .unwrap();
        let acts = [
            action(&[true, false], true),
            action(&[false, false], false),
            action(&[false, false], false),
            action(&[false, true], true),
        ];
        let loops = cover_loops(&basic, &acts).unwrap();
        assert_eq!(loops.len(), 4 * 3 + 1);
        let acts2 = [
            action(&[true], true),
            action(&[false], false),
            action(&[false], false),
            action(&[true], true),
        ];
        assert_eq!(cover_loops(&basic, &acts2).unwrap().len(), 2 * 3 + 1);
    }
}
