//! Coordinate-format accumulation and the sparse LU backend.

use faer::prelude::Solve;
use faer::sparse::linalg::solvers::{Lu, SymbolicLu};
use faer::sparse::{Pair, SparseColMat, SymbolicSparseColMat};
use faer::sparse::Argsort;
use faer::Mat;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinearSolveError {
    #[error("tangent matrix is singular: {0}")]
    Singular(String),
    #[error("sparse backend failure: {0}")]
    Backend(String),
}

/// Square sparse matrix in coordinate form; duplicate entries are summed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Triplets {
    pub n: usize,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Triplets {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ..Default::default()
        }
    }

    pub fn with_capacity(n: usize, nnz: usize) -> Self {
        Self {
            n,
            rows: Vec::with_capacity(nnz),
            cols: Vec::with_capacity(nnz),
            vals: Vec::with_capacity(nnz),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, val: f64) {
        self.rows.push(row);
        self.cols.push(col);
        self.vals.push(val);
    }

    pub fn len(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    /// Scatter a dense row-major block addressed by `dofs`.
    pub fn add_block(&mut self, dofs: &[usize], block: &[f64], factor: f64) {
        let m = dofs.len();
        for (i, &r) in dofs.iter().enumerate() {
            for (j, &c) in dofs.iter().enumerate() {
                self.push(r, c, factor * block[i * m + j]);
            }
        }
    }

    /// `y = A x`
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for k in 0..self.vals.len() {
            y[self.rows[k]] += self.vals[k] * x[self.cols[k]];
        }
        y
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        for k in 0..self.vals.len() {
            d[self.rows[k]][self.cols[k]] += self.vals[k];
        }
        d
    }
}

/// Sparse LU solver that reuses the symbolic analysis while the sparsity
/// pattern is unchanged.
#[derive(Default)]
pub struct SparseLuSolver {
    cache: Option<PatternCache>,
}

struct PatternCache {
    rows: Vec<usize>,
    cols: Vec<usize>,
    n: usize,
    symbolic: SymbolicSparseColMat<usize>,
    argsort: Argsort<usize>,
    lu: SymbolicLu<usize>,
}

impl SparseLuSolver {
    pub fn new() -> Self {
        Self::default()
    }

    /// Solve `A x = b`. Fails on structural or numerical singularity.
    pub fn solve(&mut self, a: &Triplets, b: &[f64]) -> Result<Vec<f64>, LinearSolveError> {
        let n = a.n;
        if n == 0 {
            return Ok(Vec::new());
        }
        let reuse = matches!(&self.cache, Some(c) if c.n == n && c.rows == a.rows && c.cols == a.cols);
        if !reuse {
            let pairs: Vec<Pair<usize, usize>> = a
                .rows
                .iter()
                .zip(&a.cols)
                .map(|(&row, &col)| Pair { row, col })
                .collect();
            let (symbolic, argsort) = SymbolicSparseColMat::try_new_from_indices(n, n, &pairs)
                .map_err(|e| LinearSolveError::Backend(format!("{e:?}")))?;
            let lu = SymbolicLu::try_new(symbolic.as_ref())
                .map_err(|e| LinearSolveError::Backend(format!("{e:?}")))?;
            self.cache = Some(PatternCache {
                rows: a.rows.clone(),
                cols: a.cols.clone(),
                n,
                symbolic,
                argsort,
                lu,
            });
        }
        let cache = self.cache.as_ref().expect("pattern cache populated above");
        let mat = SparseColMat::new_from_argsort(cache.symbolic.clone(), &cache.argsort, &a.vals)
            .map_err(|e| LinearSolveError::Backend(format!("{e:?}")))?;
        let lu = Lu::try_new_with_symbolic(cache.lu.clone(), mat.as_ref())
            .map_err(|e| LinearSolveError::Singular(format!("{e:?}")))?;
        let rhs = Mat::from_fn(n, 1, |i, _| b[i]);
        let x = lu.solve(&rhs);
        let x: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
        if x.iter().any(|v| !v.is_finite()) {
            return Err(LinearSolveError::Singular("non-finite solution".into()));
        }
        // a zero pivot can slip through as huge-but-finite entries
        let r = a.matvec(&x);
        let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let r_norm = r.iter().zip(b).map(|(ri, bi)| (ri - bi).powi(2)).sum::<f64>().sqrt();
        if r_norm > 1e-6 * b_norm.max(f64::MIN_POSITIVE) && r_norm > 1e-300 {
            return Err(LinearSolveError::Singular(format!(
                "linear residual {r_norm:e} relative to rhs {b_norm:e}"
            )));
        }
        Ok(x)
    }
}
