//! Symmetric sparse matrices assembled from element blocks and solved by
//! sparse Cholesky.

use faer::prelude::*;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{Argsort, Pair, SparseColMat, SymbolicSparseColMat};
use faer::Side;

use crate::error::{Error, Result};

/// Sparsity pattern of a symmetric matrix assembled from dense element
/// blocks, with a reusable symbolic Cholesky factorisation.
///
/// Only the lower triangle is stored. Values are supplied in the order of
/// the element blocks given at construction, so repeated assembly with the
/// same blocks is deterministic.
#[derive(Debug, Clone)]
pub struct SymmetricPattern {
    n: usize,
    /// For each block, the global indices of its rows (`None` = eliminated).
    blocks: Vec<Vec<Option<usize>>>,
    symbolic: SymbolicSparseColMat<usize>,
    argsort: Argsort<usize>,
    llt: SymbolicLlt<usize>,
    n_entries: usize,
}

impl SymmetricPattern {
    pub fn new(n: usize, blocks: Vec<Vec<Option<usize>>>) -> Result<Self> {
        let mut pairs = Vec::new();
        for dofs in &blocks {
            for_each_lower(dofs, |_, _, row, col| pairs.push(Pair { row, col }));
        }
        // make sure every diagonal entry exists
        for i in 0..n {
            pairs.push(Pair { row: i, col: i });
        }
        let n_entries = pairs.len();
        let (symbolic, argsort) = SymbolicSparseColMat::try_new_from_indices(n, n, &pairs)
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let llt = SymbolicLlt::try_new(symbolic.as_ref(), Side::Lower)
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        Ok(Self { n, blocks, symbolic, argsort, llt, n_entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Assembles the matrix from one dense symmetric block per element
    /// (row-major, `len x len`) plus a diagonal shift.
    pub fn assemble(&self, local: &[Vec<f64>], diagonal: &[f64]) -> Result<SparseColMat<usize, f64>> {
        assert_eq!(local.len(), self.blocks.len());
        let mut values = Vec::with_capacity(self.n_entries);
        for (dofs, block) in self.blocks.iter().zip(local) {
            let len = dofs.len();
            for_each_lower(dofs, |i, j, _, _| values.push(block[i * len + j]));
        }
        values.extend_from_slice(diagonal);
        SparseColMat::new_from_argsort(self.symbolic.clone(), &self.argsort, &values)
            .map_err(|e| Error::Factorization(format!("{e:?}")))
    }

    /// Solves `A x = b` by sparse Cholesky; fails if `A` is not numerically
    /// positive definite.
    pub fn solve(&self, a: &SparseColMat<usize, f64>, b: &[f64]) -> Result<Vec<f64>> {
        let llt = Llt::try_new_with_symbolic(self.llt.clone(), a.as_ref(), Side::Lower)
            .map_err(|e| Error::Factorization(format!("{e:?}")))?;
        let mut x = Col::<f64>::from_fn(self.n, |i| b[i]);
        llt.solve_in_place(x.as_mat_mut());
        let out: Vec<f64> = (0..self.n).map(|i| x[i]).collect();
        if out.iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(Error::Factorization("non-finite solution".into()))
        }
    }
}

/// Visits the lower-triangle entries `(global row >= global col)` of a block.
fn for_each_lower(dofs: &[Option<usize>], mut f: impl FnMut(usize, usize, usize, usize)) {
    for (i, gi) in dofs.iter().enumerate() {
        let Some(gi) = *gi else { continue };
        for (j, gj) in dofs.iter().enumerate() {
            let Some(gj) = *gj else { continue };
            if gi >= gj {
                f(i, j, gi, gj);
            }
        }
    }
}

/// Multiplies a symmetric matrix stored as lower triangle by a vector.
pub fn sym_lower_mul(a: &SparseColMat<usize, f64>, x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut y = vec![0.0; n];
    let a = a.as_ref();
    for j in 0..n {
        for (i, v) in a.row_idx_of_col(j).zip(a.val_of_col(j)) {
            y[i] += v * x[j];
            if i != j {
                y[j] += v * x[i];
            }
        }
    }
    y
}
