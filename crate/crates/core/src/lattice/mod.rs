//! Exact integer and rational linear algebra.

mod hnf;
mod modp;
mod rational;

pub use hnf::{
    express_in_basis, hnf, hnf_big, hnf_with_certificate, lattice_rank, rational_rank, HnfCertificate,
    IntVector,
};
pub use modp::{mod_p_closure, sl2_order, ClosureResult, MAX_AMBIENT_ORDER};
pub use rational::{
    common_denominator, normalize_direction, rational_string, nullspace, parse_rational, q, q_frac, solve_rational,
    sylvester_nullspace, IntMat2, Rational, RationalMatrix, RationalSolution,
};

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Sublattice of ℤⁿ given by generators, with its HNF basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationLattice {
    pub dim: usize,
    pub generators: Vec<IntVector>,
    pub hnf_basis: Vec<IntVector>,
    pub rank: usize,
}

impl TranslationLattice {
    pub fn new(dim: usize, generators: Vec<IntVector>) -> Result<Self> {
        let (hnf_basis, rank) = hnf(&generators)?;
        if let Some(g) = generators.iter().find(|g| g.len() != dim) {
            return Err(crate::Error::Input(format!(
                "generator of length {} in a lattice of dimension {dim}",
                g.len()
            )));
        }
        Ok(TranslationLattice {
            dim,
            generators,
            hnf_basis,
            rank,
        })
    }

    pub fn zero(dim: usize) -> Self {
        TranslationLattice {
            dim,
            generators: Vec::new(),
            hnf_basis: Vec::new(),
            rank: 0,
        }
    }

    pub fn contains(&self, v: &IntVector) -> bool {
        let basis: Vec<_> = self.hnf_basis.iter().map(IntVector::to_bigints).collect();
        v.len() == self.dim && express_in_basis(&basis, &v.to_bigints()).is_some()
    }

    /// Image under the coordinate projection onto `range`.
    pub fn project(&self, range: std::ops::Range<usize>) -> Result<Self> {
        let gens = self.hnf_basis.iter().map(|b| b.slice(range.clone())).collect();
        TranslationLattice::new(range.len(), gens)
    }

    /// `{x ∈ L : x_i = 0 for i ∈ zeroed}`, projected onto `keep`.
    ///
    /// Computed by an HNF with the `zeroed` coordinates moved first: the rows
    /// below the last pivot in those columns generate the intersection.
    pub fn section(&self, zeroed: std::ops::Range<usize>, keep: std::ops::Range<usize>) -> Result<Self> {
        let order: Vec<usize> = zeroed.clone().chain((0..self.dim).filter(|i| !zeroed.contains(i))).collect();
        let permuted: Vec<IntVector> = self
            .hnf_basis
            .iter()
            .map(|b| IntVector(order.iter().map(|&i| b.0[i].clone()).collect()))
            .collect();
        let (basis, _) = hnf(&permuted)?;
        let nz = zeroed.len();
        let gens = basis
            .into_iter()
            .filter(|row| row.0[..nz].iter().all(|x| x.is_zero()))
            .map(|row| {
                // undo the permutation, then keep the requested coordinates
                let mut full = vec![crate::Int::ZERO; self.dim];
                for (pos, &orig) in order.iter().enumerate() {
                    full[orig] = row.0[pos].clone();
                }
                IntVector(full[keep.clone()].to_vec())
            })
            .collect();
        TranslationLattice::new(keep.len(), gens)
    }
}
