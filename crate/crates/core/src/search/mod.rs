//! Finite search for elements of the kernel of the period representation,
//! and the classification built on the translations they carry.
//!
//! Kernel elements of word length at most `max_depth` are found by meeting in
//! the middle: the ball of radius `⌈max_depth/2⌉` is enumerated breadth-first
//! with dedup on the full element, and two words with equal period blocks
//! give the kernel element `x·y⁻¹`. Pairing every ball element with the first
//! element of its block class generates the same translation lattice as all
//! pairs, since `xᵢ·xⱼ⁻¹ = (xᵢ·x₁⁻¹)(x₁·xⱼ⁻¹)`.

mod classify;

use std::collections::{HashMap, HashSet};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use classify::{
    check_intertwiner, classify, detect_conjugator, extract_m, rational_translation_rank, relative_rank, subgroup_ranks,
    torsion_test, ConjugatorSearch,
    ClassificationReport, IntertwinerMode, IntertwinerReport, IntertwinerVerdict, SubgroupRanks, Verdict,
};

use crate::affine::{AffineElement, Presentation, UniMat2};
use crate::error::{Error, Result};
use crate::par;
use crate::periods::presentation::{free_reduce, invert_word};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Word length bound for kernel elements.
    pub max_depth: usize,
    /// Cap on stored kernel records.
    pub max_harvest: usize,
    /// Cap on enumerated ball elements.
    pub max_nodes: usize,
    /// Odd prime for the density check.
    pub density_prime: u64,
    /// Wall-clock budget in seconds.
    pub time_budget: f64,
    pub parallel: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_depth: 8,
            max_harvest: 20_000,
            max_nodes: 250_000,
            density_prime: 5,
            time_budget: 600.0,
            parallel: true,
        }
    }
}

impl SearchConfig {
    pub fn with_depth(depth: usize) -> Self {
        SearchConfig {
            max_depth: depth,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_depth < 1 {
            return Err(Error::Input("max_depth must be at least 1".into()));
        }
        let p = self.density_prime;
        if p < 3 || (2..p).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(Error::Input(format!("density_prime must be an odd prime, got {p}")));
        }
        if self.time_budget.is_nan() || self.time_budget <= 0.0 {
            return Err(Error::Input("time_budget must be positive".into()));
        }
        Ok(())
    }

    fn deadline(&self, start: Instant) -> Instant {
        start + Duration::from_secs_f64(self.time_budget.min(1e9))
    }
}

/// A word in the generators (signed, 1-based) and its value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarvestRecord {
    pub word: Vec<i32>,
    pub element: AffineElement,
    pub kernel_flag: bool,
}

impl HarvestRecord {
    pub fn new(word: Vec<i32>, element: AffineElement) -> Self {
        let kernel_flag = element.is_period_trivial();
        HarvestRecord {
            word,
            element,
            kernel_flag,
        }
    }

    /// Whether folding the word through `compose` reproduces the element and
    /// the flag matches it.
    pub fn verify(&self, pres: &Presentation) -> bool {
        match evaluate_word(pres, &self.word) {
            Ok(e) => e == self.element && self.kernel_flag == e.is_period_trivial(),
            Err(_) => false,
        }
    }
}

/// Left-to-right product of the letters of `word`.
pub fn evaluate_word(pres: &Presentation, word: &[i32]) -> Result<AffineElement> {
    let gens = pres.generators();
    let mut acc = AffineElement::identity(pres.k());
    for &l in word {
        let g = gens
            .get((l.unsigned_abs() as usize).wrapping_sub(1))
            .ok_or_else(|| Error::Input(format!("letter {l} out of range")))?;
        let e = if l > 0 { g.element.clone() } else { g.element.inverse() };
        acc = acc.compose(&e)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarvestOutcome {
    pub records: Vec<HarvestRecord>,
    /// A node, record or time budget ran out before the search finished.
    pub partial: bool,
    pub depth: usize,
    pub nodes: usize,
}

pub(crate) struct Node {
    pub element: AffineElement,
    pub word: Vec<i32>,
}

pub(crate) struct Ball {
    pub nodes: Vec<Node>,
    /// `levels[d]` is the index of the first node of word length `d`.
    pub levels: Vec<usize>,
    pub partial: bool,
}

impl Ball {
    pub fn depth_of(&self, idx: usize) -> usize {
        self.levels.iter().rposition(|&start| start <= idx).unwrap_or(0)
    }
}

fn letters(pres: &Presentation) -> Vec<(i32, AffineElement)> {
    let mut out = Vec::with_capacity(2 * pres.len());
    for (i, g) in pres.generators().iter().enumerate() {
        out.push((i as i32 + 1, g.element.clone()));
        out.push((-(i as i32 + 1), g.element.inverse()));
    }
    out
}

/// Breadth-first enumeration of distinct elements of word length at most
/// `radius`. Children are generated per frontier node (in parallel when
/// enabled) and merged in frontier order, so the result does not depend on
/// the mode.
pub(crate) fn ball(pres: &Presentation, radius: usize, cfg: &SearchConfig, deadline: Instant) -> Ball {
    let letters = letters(pres);
    let identity = AffineElement::identity(pres.k());
    let mut seen: HashSet<AffineElement> = HashSet::from([identity.clone()]);
    let mut nodes = vec![Node {
        element: identity,
        word: Vec::new(),
    }];
    let mut levels = vec![0];
    let mut partial = false;
    let mut frontier: Vec<usize> = vec![0];
    'outer: for _ in 0..radius {
        let children = par::map_ordered(&frontier, cfg.parallel, |&idx| {
            let node = &nodes[idx];
            letters
                .iter()
                .filter(|(l, _)| node.word.last() != Some(&-l))
                .map(|(l, e)| {
                    let mut w = node.word.clone();
                    w.push(*l);
                    (node.element.compose_unchecked(e), w)
                })
                .collect::<Vec<_>>()
        });
        levels.push(nodes.len());
        let mut next = Vec::new();
        for batch in children {
            for (element, word) in batch {
                if seen.contains(&element) {
                    continue;
                }
                if nodes.len() >= cfg.max_nodes {
                    partial = true;
                    break 'outer;
                }
                seen.insert(element.clone());
                next.push(nodes.len());
                nodes.push(Node { element, word });
            }
        }
        if Instant::now() > deadline {
            partial = true;
            break;
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    Ball { nodes, levels, partial }
}

/// Appends `rec` unless its element is already present.
pub(crate) fn push_unique(records: &mut Vec<HarvestRecord>, seen: &mut HashSet<AffineElement>, rec: HarvestRecord) {
    if seen.insert(rec.element.clone()) {
        records.push(rec);
    }
}

/// Period-trivial elements of word length at most `max_depth`, starting with
/// the identity.
pub fn harvest_kernel(pres: &Presentation, cfg: &SearchConfig) -> Result<HarvestOutcome> {
    harvest_with_deadline(pres, cfg, cfg.deadline(Instant::now()))
}

pub(crate) fn harvest_with_deadline(pres: &Presentation, cfg: &SearchConfig, deadline: Instant) -> Result<HarvestOutcome> {
    cfg.validate()?;
    if pres.is_empty() {
        return Err(Error::Input("presentation has no generators".into()));
    }
    let radius = cfg.max_depth.div_ceil(2);
    let b = ball(pres, radius, cfg, deadline);
    let mut partial = b.partial;
    let mut first: HashMap<&[UniMat2], usize> = HashMap::new();
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (j, node) in b.nodes.iter().enumerate() {
        let f = *first.entry(node.element.blocks()).or_insert(j);
        if f == j && j != 0 {
            continue;
        }
        if b.depth_of(f) + b.depth_of(j) > cfg.max_depth {
            continue;
        }
        let m1 = &b.nodes[f];
        let forward = node.element.compose_unchecked(&m1.element.inverse());
        let mut w = node.word.clone();
        w.extend(invert_word(&m1.word));
        push_unique(&mut records, &mut seen, HarvestRecord::new(free_reduce(&w), forward));
        let backward = m1.element.compose_unchecked(&node.element.inverse());
        let mut w = m1.word.clone();
        w.extend(invert_word(&node.word));
        push_unique(&mut records, &mut seen, HarvestRecord::new(free_reduce(&w), backward));
        if records.len() >= cfg.max_harvest {
            partial = true;
            break;
        }
    }
    Ok(HarvestOutcome {
        records,
        partial,
        depth: cfg.max_depth,
        nodes: b.nodes.len(),
    })
}

/// Commutators `[g₁, g₂]` where `g₁` has identity block in the first factor
/// and `g₂` identity block in the second, each of word length at most
/// `⌈max_depth/2⌉`. Every output is period-trivial.
pub fn targeted_commutators(pres: &Presentation, cfg: &SearchConfig) -> Result<HarvestOutcome> {
    commutators_with_deadline(pres, cfg, cfg.deadline(Instant::now()))
}

/// Candidates per side kept for pairing; the commutator count is its square.
const COMMUTATOR_SIDE: usize = 96;

pub(crate) fn commutators_with_deadline(pres: &Presentation, cfg: &SearchConfig, deadline: Instant) -> Result<HarvestOutcome> {
    cfg.validate()?;
    if pres.is_empty() {
        return Err(Error::Input("presentation has no generators".into()));
    }
    if pres.k() != 2 {
        return Err(Error::Input(format!("targeted commutators need two factors, got {}", pres.k())));
    }
    let half = cfg.max_depth.div_ceil(2);
    let b = ball(pres, half.div_ceil(2), cfg, deadline);
    let mut partial = b.partial;

    // words with identity block in factor `i`, as x·y⁻¹ within the ball
    let side = |i: usize| -> Vec<(Vec<i32>, AffineElement)> {
        let mut first: HashMap<&UniMat2, usize> = HashMap::new();
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for (j, node) in b.nodes.iter().enumerate() {
            let f = *first.entry(&node.element.blocks()[i]).or_insert(j);
            if f == j || b.depth_of(f) + b.depth_of(j) > half {
                continue;
            }
            let m1 = &b.nodes[f];
            let e = node.element.compose_unchecked(&m1.element.inverse());
            if e.is_period_trivial() && e.translation().is_zero() {
                continue;
            }
            if seen.insert(e.clone()) {
                let mut w = node.word.clone();
                w.extend(invert_word(&m1.word));
                out.push((free_reduce(&w), e));
            }
            if out.len() >= COMMUTATOR_SIDE {
                break;
            }
        }
        // generators that already qualify
        for (gi, g) in pres.generators().iter().enumerate() {
            if g.element.blocks()[i].is_identity() && out.len() < COMMUTATOR_SIDE && seen.insert(g.element.clone()) {
                out.push((vec![gi as i32 + 1], g.element.clone()));
            }
        }
        out
    };
    let g1s = side(0);
    let g2s = side(1);
    let pairs: Vec<(usize, usize)> = (0..g1s.len()).flat_map(|a| (0..g2s.len()).map(move |c| (a, c))).collect();
    let comms = par::map_ordered(&pairs, cfg.parallel, |&(a, c)| {
        let (wx, x) = &g1s[a];
        let (wy, y) = &g2s[c];
        let e = x
            .compose_unchecked(y)
            .compose_unchecked(&x.inverse())
            .compose_unchecked(&y.inverse());
        let mut w = wx.clone();
        w.extend_from_slice(wy);
        w.extend(invert_word(wx));
        w.extend(invert_word(wy));
        HarvestRecord::new(free_reduce(&w), e)
    });
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for r in comms {
        if r.element.translation().is_zero() {
            continue;
        }
        push_unique(&mut records, &mut seen, r);
        if records.len() >= cfg.max_harvest {
            partial = true;
            break;
        }
    }
    Ok(HarvestOutcome {
        records,
        partial,
        depth: cfg.max_depth,
        nodes: b.nodes.len(),
    })
}
