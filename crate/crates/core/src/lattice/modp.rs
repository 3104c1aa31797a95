//! Breadth-first closure of a finitely generated subgroup of SL₂(𝔽_p)ᵏ.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::rational::IntMat2;
use crate::error::{Error, Result};
use crate::par;

/// Largest group order `(p(p²−1))ᵏ` the closure will attempt. Admits every
/// p ≤ 97 for one factor and p ≤ 13 for two.
pub const MAX_AMBIENT_ORDER: u64 = 5_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureResult {
    pub p: u64,
    pub k: usize,
    pub order: u64,
    pub ambient_order: u64,
    pub full: bool,
}

pub fn sl2_order(p: u64) -> u64 {
    p * (p * p - 1)
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

type Residue = [u8; 4];

fn reduce(m: &IntMat2, p: u64) -> Residue {
    [
        m[0][0].rem_euclid_u64(p) as u8,
        m[0][1].rem_euclid_u64(p) as u8,
        m[1][0].rem_euclid_u64(p) as u8,
        m[1][1].rem_euclid_u64(p) as u8,
    ]
}

fn mul(a: &Residue, b: &Residue, p: u64) -> Residue {
    let f = |x: u8, y: u8, z: u8, w: u8| ((x as u64 * y as u64 + z as u64 * w as u64) % p) as u8;
    [
        f(a[0], b[0], a[1], b[2]),
        f(a[0], b[1], a[1], b[3]),
        f(a[2], b[0], a[3], b[2]),
        f(a[2], b[1], a[3], b[3]),
    ]
}

fn pack(tuple: &[Residue]) -> u128 {
    tuple
        .iter()
        .flat_map(|r| r.iter())
        .fold(0u128, |acc, &x| (acc << 8) | x as u128)
}

/// Order of the subgroup of SL₂(𝔽_p)ᵏ generated by `gens`, each a k-tuple of
/// integer 2×2 matrices, and whether it is the whole product group.
pub fn mod_p_closure(gens: &[Vec<IntMat2>], p: u64, parallel: bool) -> Result<ClosureResult> {
    if p < 3 || !is_prime(p) {
        return Err(Error::Input(format!("closure prime must be an odd prime, got {p}")));
    }
    let k = gens.first().map_or(1, Vec::len);
    if k == 0 || k > 4 {
        return Err(Error::Input(format!("closure supports 1 to 4 factors, got {k}")));
    }
    if gens.iter().any(|g| g.len() != k) {
        return Err(Error::Input("generators have differing factor counts".into()));
    }
    let ambient = (0..k).try_fold(1u64, |acc, _| acc.checked_mul(sl2_order(p)));
    let ambient = match ambient {
        Some(a) if a <= MAX_AMBIENT_ORDER => a,
        _ => {
            return Err(Error::Input(format!(
                "SL2(F_{p})^{k} exceeds the closure cap of {MAX_AMBIENT_ORDER} elements"
            )))
        }
    };

    let mut reduced: Vec<Vec<Residue>> = Vec::with_capacity(gens.len());
    for (gi, g) in gens.iter().enumerate() {
        let tuple: Vec<Residue> = g.iter().map(|m| reduce(m, p)).collect();
        for (fi, r) in tuple.iter().enumerate() {
            let det = (r[0] as u64 * r[3] as u64 + p * p - (r[1] as u64 * r[2] as u64) % p) % p;
            if det != 1 {
                return Err(Error::Input(format!(
                    "generator {gi}, factor {fi} has determinant {det} mod {p}"
                )));
            }
        }
        reduced.push(tuple);
    }

    let identity: Vec<Residue> = vec![[1, 0, 0, 1]; k];
    let mut seen: HashSet<u128> = HashSet::new();
    seen.insert(pack(&identity));
    let mut frontier = vec![identity];
    while !frontier.is_empty() {
        let children = par::map_ordered(&frontier, parallel, |x| {
            reduced
                .iter()
                .map(|g| {
                    x.iter()
                        .zip(g)
                        .map(|(a, b)| mul(a, b, p))
                        .collect::<Vec<Residue>>()
                })
                .collect::<Vec<_>>()
        });
        let mut next = Vec::new();
        for child in children.into_iter().flatten() {
            if seen.insert(pack(&child)) {
                next.push(child);
            }
        }
        frontier = next;
    }
    let order = seen.len() as u64;
    Ok(ClosureResult {
        p,
        k,
        order,
        ambient_order: ambient,
        full: order == ambient,
    })
}
