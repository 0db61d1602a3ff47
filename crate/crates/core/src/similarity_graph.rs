//! Sparse-coding similarity graphs over all shots of all views.
//!
//! Intra-view similarities come from zero-diagonal self-expression of a
//! view's descriptors, inter-view similarities from coding one view over
//! another. The absolute, transposed codes fill the diagonal and
//! off-diagonal blocks of an N×N matrix that is symmetrized, scaled row-wise
//! to unit maximum, re-symmetrized and turned into a graph Laplacian.

use alloc::format;
use alloc::vec::Vec;

use crate::dataset::MultiViewDataset;
use crate::linalg::sqrt;
use crate::sparse_solvers::{solve_l1_columns, SolverConfig};
use crate::{Error, Matrix, Result};

/// Maps flat shot indices to `(view, shot)` pairs (both 1-based) and back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockIndex {
    offsets: Vec<usize>,
}

impl BlockIndex {
    pub fn new(sizes: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        offsets.push(0);
        for s in sizes {
            offsets.push(offsets.last().unwrap() + s);
        }
        BlockIndex { offsets }
    }

    pub fn num_views(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    /// Number of shots in view `k` (1-based).
    pub fn view_len(&self, view: usize) -> usize {
        self.offsets[view] - self.offsets[view - 1]
    }

    /// Flat range covered by view `k` (1-based).
    pub fn view_range(&self, view: usize) -> core::ops::Range<usize> {
        self.offsets[view - 1]..self.offsets[view]
    }

    pub fn flat(&self, view: usize, shot: usize) -> usize {
        debug_assert!(shot >= 1 && shot <= self.view_len(view));
        self.offsets[view - 1] + shot - 1
    }

    pub fn locate(&self, flat: usize) -> (usize, usize) {
        let k = self.offsets.partition_point(|&o| o <= flat);
        (k, flat - self.offsets[k - 1] + 1)
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LaplacianKind {
    /// `L = D - W`.
    #[default]
    Unnormalized,
    /// `L = I - D^{-1/2} W D^{-1/2}`; isolated nodes get a zero row.
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphConfig {
    pub solver: SolverConfig,
    /// Each coding problem uses `lambda = lambda0 / rho`, where `lambda0` is
    /// the smallest penalty giving an all-zero code for that target.
    pub rho: f64,
    pub laplacian: LaplacianKind,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            solver: SolverConfig::default(),
            rho: 10.0,
            laplacian: LaplacianKind::Unnormalized,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph {
    pub c_total: Matrix,
    pub w: Matrix,
    pub laplacian: Matrix,
    pub block_index: BlockIndex,
}

/// Per-target penalties `max_j 2 |d_j^T t| / rho`, skipping the target's own
/// atom when self-representation is excluded.
fn column_lambdas(dictionary: &Matrix, targets: &Matrix, zero_diagonal: bool, rho: f64) -> Vec<f64> {
    let corr = dictionary.transpose() * targets;
    (0..targets.ncols())
        .map(|j| {
            let lambda0 = corr
                .column(j)
                .iter()
                .enumerate()
                .filter(|(i, _)| !(zero_diagonal && *i == j))
                .fold(0.0_f64, |m, (_, v)| m.max(v.abs()))
                * 2.0;
            lambda0 / rho
        })
        .collect()
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidArgument(format!("rho must be positive, got {rho}")));
    }
    Ok(())
}

/// `|C|^T` where column `j` of `C` codes shot `j` over the other shots of the
/// same view. Row `i` of the result holds the similarities of shot `i`.
/// A single-shot view yields a 1×1 zero matrix.
pub fn intra_view_similarity(x: &Matrix, cfg: &GraphConfig) -> Result<Matrix> {
    check_rho(cfg.rho)?;
    if x.ncols() < 2 {
        return Ok(Matrix::zeros(x.ncols(), x.ncols()));
    }
    let lambdas = column_lambdas(x, x, true, cfg.rho);
    let c = solve_l1_columns(x, x, &lambdas, true, &cfg.solver)?;
    Ok(c.abs().transpose())
}

/// `|C|^T` where column `i` of `C` codes shot `i` of view `m` over the shots
/// of view `n`. Row `i` of the result (N_m × N_n) holds the similarities of
/// shot `i` of view `m` to every shot of view `n`.
pub fn inter_view_similarity(x_m: &Matrix, x_n: &Matrix, cfg: &GraphConfig) -> Result<Matrix> {
    check_rho(cfg.rho)?;
    let lambdas = column_lambdas(x_n, x_m, false, cfg.rho);
    let c = solve_l1_columns(x_n, x_m, &lambdas, false, &cfg.solver)?;
    Ok(c.abs().transpose())
}

/// Places a K×K grid of blocks into one N×N matrix. Block `(m, n)` must be
/// `N_m × N_n`, where `N_k` is read off the diagonal blocks.
pub fn assemble_total(blocks: &[Vec<Matrix>]) -> Result<(Matrix, BlockIndex)> {
    let k = blocks.len();
    if k == 0 || blocks.iter().any(|row| row.len() != k) {
        return Err(Error::ShapeMismatch("block grid must be square and non-empty".into()));
    }
    let sizes: Vec<usize> = (0..k).map(|i| blocks[i][i].nrows()).collect();
    let index = BlockIndex::new(&sizes);
    let mut total = Matrix::zeros(index.total(), index.total());
    for (m, row) in blocks.iter().enumerate() {
        for (n, block) in row.iter().enumerate() {
            if block.shape() != (sizes[m], sizes[n]) {
                return Err(Error::ShapeMismatch(format!(
                    "block ({}, {}) is {}x{}, expected {}x{}",
                    m + 1,
                    n + 1,
                    block.nrows(),
                    block.ncols(),
                    sizes[m],
                    sizes[n]
                )));
            }
            total
                .view_mut((index.offsets[m], index.offsets[n]), (sizes[m], sizes[n]))
                .copy_from(block);
        }
    }
    Ok((total, index))
}

/// `W0 = C + C^T`, rows scaled to unit maximum (zero rows stay zero), then
/// averaged with its transpose so the result is exactly symmetric.
pub fn symmetrize_normalize(c_total: &Matrix) -> Result<Matrix> {
    if !c_total.is_square() {
        return Err(Error::ShapeMismatch("similarity matrix must be square".into()));
    }
    if c_total.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(Error::InvalidArgument("similarities must be finite and nonnegative".into()));
    }
    let mut w = c_total + c_total.transpose();
    for mut row in w.row_iter_mut() {
        let max = row.amax();
        if max > 0.0 {
            row /= max;
        }
    }
    let n = w.nrows();
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = 0.5 * (w[(i, j)] + w[(j, i)]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

pub fn laplacian(w: &Matrix, kind: LaplacianKind) -> Result<Matrix> {
    if !w.is_square() {
        return Err(Error::ShapeMismatch("affinity matrix must be square".into()));
    }
    let n = w.nrows();
    let degrees: Vec<f64> = w.row_iter().map(|r| r.sum()).collect();
    let l = match kind {
        LaplacianKind::Unnormalized => Matrix::from_fn(n, n, |i, j| {
            if i == j {
                degrees[i] - w[(i, i)]
            } else {
                -w[(i, j)]
            }
        }),
        LaplacianKind::Normalized => {
            let inv_sqrt: Vec<f64> = degrees.iter().map(|&d| if d > 0.0 { 1.0 / sqrt(d) } else { 0.0 }).collect();
            Matrix::from_fn(n, n, |i, j| {
                let scaled = w[(i, j)] * inv_sqrt[i] * inv_sqrt[j];
                if i == j {
                    if degrees[i] > 0.0 {
                        1.0 - scaled
                    } else {
                        0.0
                    }
                } else {
                    -scaled
                }
            })
        }
    };
    Ok(l)
}

/// Runs every intra- and inter-view coding problem on `dataset` and forms
/// the normalized affinity and its Laplacian.
pub fn build_graph(dataset: &MultiViewDataset, cfg: &GraphConfig) -> Result<SimilarityGraph> {
    let k = dataset.num_views();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|m| (0..k).map(move |n| (m, n))).collect();
    let solve = |&(m, n): &(usize, usize)| -> Result<Matrix> {
        let views = dataset.views();
        if m == n {
            intra_view_similarity(&views[m], cfg)
        } else {
            inter_view_similarity(&views[m], &views[n], cfg)
        }
    };

    #[cfg(feature = "parallel")]
    let solved: Vec<Result<Matrix>> = {
        use rayon::prelude::*;
        pairs.par_iter().map(solve).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let solved: Vec<Result<Matrix>> = pairs.iter().map(solve).collect();

    let mut blocks: Vec<Vec<Matrix>> = (0..k).map(|_| Vec::with_capacity(k)).collect();
    for ((m, _), block) in pairs.iter().zip(solved) {
        blocks[*m].push(block?);
    }
    let (c_total, block_index) = assemble_total(&blocks)?;
    let w = symmetrize_normalize(&c_total)?;
    let l = laplacian(&w, cfg.laplacian)?;
    Ok(SimilarityGraph {
        c_total,
        w,
        laplacian: l,
        block_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn block_index_roundtrip() {
        let idx = BlockIndex::new(&[3, 1, 4]);
        assert_eq!(idx.total(), 8);
        for flat in 0..8 {
            let (v, s) = idx.locate(flat);
            assert_eq!(idx.flat(v, s), flat);
        }
        assert_eq!(idx.locate(3), (2, 1));
        assert_eq!(idx.view_range(3), 4..8);
    }

    #[test]
    fn two_single_shot_views() {
        let blocks = vec![
            vec![Matrix::zeros(1, 1), Matrix::from_element(1, 1, 0.3)],
            vec![Matrix::from_element(1, 1, 0.7), Matrix::zeros(1, 1)],
        ];
        let (c, _) = assemble_total(&blocks).unwrap();
        assert_eq!(c, Matrix::from_row_slice(2, 2, &[0.0, 0.3, 0.7, 0.0]));
    }

    #[test]
    fn zero_inter_blocks_give_block_diagonal() {
        let sizes = [2, 1, 3];
        let blocks: Vec<Vec<Matrix>> = (0..3)
            .map(|m| {
                (0..3)
                    .map(|n| {
                        if m == n {
                            Matrix::from_element(sizes[m], sizes[n], 1.0)
                        } else {
                            Matrix::zeros(sizes[m], sizes[n])
                        }
                    })
                    .collect()
            })
            .collect();
        let (c, idx) = assemble_total(&blocks).unwrap();
        for i in 0..6 {
            for j in 0..6 {
                let same = idx.locate(i).0 == idx.locate(j).0;
                assert_eq!(c[(i, j)], if same { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn assemble_rejects_bad_shapes() {
        let blocks = vec![
            vec![Matrix::zeros(2, 2), Matrix::zeros(2, 3)],
            vec![Matrix::zeros(1, 2), Matrix::zeros(1, 1)],
        ];
        assert!(matches!(assemble_total(&blocks), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn normalize_two_by_two() {
        let c = Matrix::from_row_slice(2, 2, &[0.0, 0.2, 0.6, 0.0]);
        let w = symmetrize_normalize(&c).unwrap();
        assert_eq!(w, Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    }

    #[test]
    fn normalize_symmetric_unit_maxima() {
        let c = Matrix::from_row_slice(3, 3, &[0.0, 1.0, 0.5, 1.0, 0.0, 0.25, 0.5, 0.25, 0.0]);
        // W0 = 2C; rows of 2C have maxima 2, 2, 1.
        let expected_rows = Matrix::from_row_slice(3, 3, &[0.0, 1.0, 0.5, 1.0, 0.0, 0.25, 1.0, 0.5, 0.0]);
        let expected = (&expected_rows + expected_rows.transpose()) * 0.5;
        let w = symmetrize_normalize(&c).unwrap();
        assert_abs_diff_eq!(w, expected, epsilon = 1e-15);
        assert!(w.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn normalize_zero_matrix() {
        let z = Matrix::zeros(3, 3);
        assert_eq!(symmetrize_normalize(&z).unwrap(), z);
    }

    #[test]
    fn laplacian_of_single_edge() {
        let w = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let l = laplacian(&w, LaplacianKind::Unnormalized).unwrap();
        assert_eq!(l, Matrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn quadratic_form_identity() {
        let raw = Matrix::from_fn(5, 5, |i, j| if i == j { 0.0 } else { libm::fabs(libm::sin((i * 7 + j * 3) as f64)) });
        let w = (&raw + raw.transpose()) * 0.5;
        let l = laplacian(&w, LaplacianKind::Unnormalized).unwrap();
        let x = crate::Vector::from_fn(5, |i, _| libm::cos(i as f64 * 1.7));
        let lhs = x.dot(&(&l * &x));
        let mut rhs = 0.0;
        for i in 0..5 {
            for j in 0..5 {
                rhs += 0.5 * w[(i, j)] * (x[i] - x[j]).powi(2);
            }
        }
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
        for r in l.row_iter() {
            assert_abs_diff_eq!(r.sum(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn normalized_laplacian_spectrum_in_range() {
        let w = Matrix::from_row_slice(3, 3, &[0.0, 1.0, 0.5, 1.0, 0.0, 0.0, 0.5, 0.0, 0.0]);
        let l = laplacian(&w, LaplacianKind::Normalized).unwrap();
        let (vals, _) = crate::linalg::sym_eigen_ascending(&l).unwrap();
        assert!(vals[0].abs() < 1e-12);
        assert!(vals.iter().all(|v| *v > -1e-12 && *v < 2.0 + 1e-12));
    }
}
