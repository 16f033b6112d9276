//! Dense linear algebra kernel shared by every other module: rank detection
//! through Householder QR with column pivoting, an unnormalized Gram-Schmidt
//! sweep, coefficient recovery against a fixed basis, and the
//! equality-constrained least-distance solve that the active-set loop calls
//! repeatedly.
//!
//! Matrices stay small here (rows and columns in the tens), so the routines
//! favor clarity and determinism over blocking, sparsity, or iterative
//! methods. All rank decisions are made on pivot magnitudes; callers that
//! want scale-free answers go through [`rank_scaled`], which normalizes rows
//! to unit max-norm first and applies the shared absolute tolerance
//! [`TAU_RANK`].

use crate::{Error, Result};

/// Absolute tolerance on pivot magnitudes for independence decisions made on
/// rows scaled to unit max-norm.
pub const TAU_RANK: f64 = 1e-8;

/// Strict positivity threshold for combination coefficients.
pub const TAU_POS: f64 = 1e-12;

/// Relative residual bound accepted by [`solve_equality_kkt`].
const KKT_RESIDUAL: f64 = 1e-9;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `a + t * b`, leaving the inputs untouched.
pub fn add_scaled(a: &[f64], t: f64, b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + t * y).collect()
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Dense row-major matrix of `f64` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Builds a matrix from row slices. `cols` disambiguates the empty case.
    pub fn from_rows(cols: usize, rows: &[&[f64]]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "row length mismatch");
            data.extend_from_slice(r);
        }
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_vec_rows(cols: usize, rows: &[Vec<f64>]) -> Matrix {
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        Matrix::from_rows(cols, &refs)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.cols.max(1)).take(self.rows)
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        self.row_iter().map(|r| dot(r, x)).collect()
    }

    /// `A^T y`.
    pub fn t_mul_vec(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, r) in self.row_iter().enumerate() {
            for (o, v) in out.iter_mut().zip(r) {
                *o += y[i] * v;
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.data)
    }

    /// Copy of the matrix with one extra column appended on the right.
    fn with_column(&self, col: &[f64]) -> Matrix {
        assert_eq!(col.len(), self.rows);
        let mut out = Matrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            out.set(i, self.cols, col[i]);
        }
        out
    }
}

/// Outcome of a rank computation: the decision, the pivot magnitudes that
/// produced it, and the tolerance that was actually applied.
#[derive(Clone, Debug, PartialEq)]
pub struct RankResult {
    pub rank: usize,
    pub pivot_magnitudes: Vec<f64>,
    pub tolerance: f64,
}

/// Householder QR with column pivoting; returns the pivot magnitudes
/// `|R_kk|`, which with pivoting come out in (numerically) non-increasing
/// order.
fn qr_pivot_magnitudes(a: &Matrix) -> Vec<f64> {
    let m = a.rows();
    let n = a.cols();
    let k = m.min(n);
    if k == 0 {
        return Vec::new();
    }
    // Column-major work copy so column operations stay contiguous.
    let mut w: Vec<Vec<f64>> = (0..n).map(|j| (0..m).map(|i| a.get(i, j)).collect()).collect();
    let mut mags = Vec::with_capacity(k);
    for step in 0..k {
        let tail_norm = |c: &[f64]| norm(&c[step..]);
        let mut best = step;
        let mut best_norm = tail_norm(&w[step]);
        for (j, col) in w.iter().enumerate().skip(step + 1) {
            let nj = tail_norm(col);
            if nj > best_norm {
                best = j;
                best_norm = nj;
            }
        }
        w.swap(step, best);
        mags.push(best_norm);
        if best_norm == 0.0 {
            // Every remaining column is zero below the current row.
            for _ in step + 1..k {
                mags.push(0.0);
            }
            break;
        }
        // Householder reflector for the pivot column tail.
        let alpha = if w[step][step] >= 0.0 { -best_norm } else { best_norm };
        let mut v: Vec<f64> = w[step][step..].to_vec();
        v[0] -= alpha;
        let vnorm2 = dot(&v, &v);
        if vnorm2 > 0.0 {
            let beta = 2.0 / vnorm2;
            for col in w.iter_mut().skip(step + 1) {
                let c = beta * dot(&v, &col[step..]);
                for (ve, ce) in v.iter().zip(col[step..].iter_mut()) {
                    *ce -= c * ve;
                }
            }
        }
        w[step][step] = alpha;
        for e in w[step][step + 1..].iter_mut() {
            *e = 0.0;
        }
    }
    mags
}

/// Numerical rank from pivot magnitudes. With `tol = None` the cutoff is the
/// usual automatic rule `max(rows, cols) * eps * largest pivot`.
pub fn rank_with_tolerance(a: &Matrix, tol: Option<f64>) -> Result<RankResult> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let mags = qr_pivot_magnitudes(a);
    let largest = mags.first().copied().unwrap_or(0.0);
    let tolerance = match tol {
        Some(t) => {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::InvalidInput("rank tolerance must be finite and >= 0".into()));
            }
            t
        }
        None => a.rows().max(a.cols()) as f64 * f64::EPSILON * largest,
    };
    let rank = mags.iter().filter(|m| **m > tolerance).count();
    Ok(RankResult {
        rank,
        pivot_magnitudes: mags,
        tolerance,
    })
}

/// Rank decision with rows scaled to unit max-norm and the shared absolute
/// tolerance [`TAU_RANK`]. Zero rows stay zero and never count.
pub fn rank_scaled(a: &Matrix) -> Result<RankResult> {
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let mut scaled = a.clone();
    for i in 0..scaled.rows() {
        let mx = scaled.row(i).iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if mx > 0.0 {
            for j in 0..scaled.cols() {
                scaled.set(i, j, scaled.get(i, j) / mx);
            }
        }
    }
    rank_with_tolerance(&scaled, Some(TAU_RANK))
}

/// Convenience wrapper for slices of row vectors.
pub fn rank_scaled_rows(cols: usize, rows: &[&[f64]]) -> Result<usize> {
    Ok(rank_scaled(&Matrix::from_rows(cols, rows))?.rank)
}

/// Greedy maximal independent subset of the given rows, scanning in index
/// order so the smallest indices win. Independence is judged by
/// [`rank_scaled`].
pub fn greedy_independent_rows(cols: usize, rows: &[&[f64]]) -> Result<Vec<usize>> {
    let mut kept_idx: Vec<usize> = Vec::new();
    let mut kept: Vec<&[f64]> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        kept.push(r);
        if rank_scaled_rows(cols, &kept)? == kept.len() {
            kept_idx.push(i);
        } else {
            kept.pop();
        }
    }
    Ok(kept_idx)
}

/// Unnormalized Gram-Schmidt sweep:
///
/// ```text
/// e_1 = u_1,    e_k = u_k - sum_{i<k} (<u_k, e_i> / <e_i, e_i>) e_i
/// ```
///
/// applied in the modified (one projection at a time) update order, which
/// produces the same vectors with better floating-point orthogonality. The
/// outputs are not normalized on purpose: coefficient recovery against them
/// divides by `<e_i, e_i>` again.
pub fn gram_schmidt(vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if vectors.is_empty() {
        return Ok(Vec::new());
    }
    let n = vectors[0].len();
    for v in vectors {
        if v.len() != n {
            return Err(Error::InvalidInput("vectors differ in length".into()));
        }
        if !all_finite(v) {
            return Err(Error::NonFinite);
        }
    }
    if rank_scaled(&Matrix::from_vec_rows(n, vectors))?.rank != vectors.len() {
        return Err(Error::DependentInput);
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for u in vectors {
        let mut e = u.clone();
        for prev in &basis {
            let c = dot(&e, prev) / dot(prev, prev);
            for (ek, pk) in e.iter_mut().zip(prev) {
                *ek -= c * pk;
            }
        }
        basis.push(e);
    }
    Ok(basis)
}

/// Householder QR of the column matrix `cols` (each entry one column), run in
/// tandem on `rhs` when given. Returns the upper triangle `R` and the
/// transformed right-hand side. Returns `None` when a pivot vanishes.
fn qr_columns(columns: &[Vec<f64>], rhs: Option<&[f64]>) -> Option<(Matrix, Option<Vec<f64>>)> {
    let k = columns.len();
    if k == 0 {
        return Some((Matrix::zeros(0, 0), rhs.map(|b| b.to_vec())));
    }
    let m = columns[0].len();
    let mut w: Vec<Vec<f64>> = columns.to_vec();
    let mut b = rhs.map(|b| b.to_vec());
    for step in 0..k {
        let tail = &w[step][step..];
        let tn = norm(tail);
        if tn == 0.0 {
            return None;
        }
        let alpha = if w[step][step] >= 0.0 { -tn } else { tn };
        let mut v: Vec<f64> = w[step][step..].to_vec();
        v[0] -= alpha;
        let vnorm2 = dot(&v, &v);
        if vnorm2 > 0.0 {
            let beta = 2.0 / vnorm2;
            for col in w.iter_mut().skip(step + 1) {
                let c = beta * dot(&v, &col[step..]);
                for (ve, ce) in v.iter().zip(col[step..].iter_mut()) {
                    *ce -= c * ve;
                }
            }
            if let Some(b) = b.as_mut() {
                let c = beta * dot(&v, &b[step..]);
                for (ve, be) in v.iter().zip(b[step..].iter_mut()) {
                    *be -= c * ve;
                }
            }
        }
        w[step][step] = alpha;
        for e in w[step][step + 1..].iter_mut() {
            *e = 0.0;
        }
        let _ = m;
    }
    let mut r = Matrix::zeros(k, k);
    for j in 0..k {
        for i in 0..=j {
            r.set(i, j, w[j][i]);
        }
    }
    Some((r, b))
}

fn back_substitute(r: &Matrix, y: &[f64]) -> Option<Vec<f64>> {
    let k = r.rows();
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = y[i];
        for j in i + 1..k {
            s -= r.get(i, j) * x[j];
        }
        if r.get(i, i) == 0.0 {
            return None;
        }
        x[i] = s / r.get(i, i);
    }
    Some(x)
}

fn forward_substitute_transposed(r: &Matrix, y: &[f64]) -> Option<Vec<f64>> {
    // Solves R^T x = y with R upper triangular.
    let k = r.rows();
    let mut x = vec![0.0; k];
    for i in 0..k {
        let mut s = y[i];
        for j in 0..i {
            s -= r.get(j, i) * x[j];
        }
        if r.get(i, i) == 0.0 {
            return None;
        }
        x[i] = s / r.get(i, i);
    }
    Some(x)
}

/// Least-squares coefficients of `target` against the given basis vectors.
/// The basis must be linearly independent at `tol` (rows scaled to unit
/// max-norm), and the residual of the reconstruction must stay below
/// `tol * (1 + |target|)`, otherwise the target is declared outside the span.
pub fn recover_coefficients(basis: &[Vec<f64>], target: &[f64], tol: f64) -> Result<Vec<f64>> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be finite and positive".into()));
    }
    if !all_finite(target) {
        return Err(Error::NonFinite);
    }
    let n = target.len();
    if basis.is_empty() {
        return if norm(target) <= tol {
            Ok(Vec::new())
        } else {
            Err(Error::NotInSpan)
        };
    }
    for v in basis {
        if v.len() != n {
            return Err(Error::InvalidInput("basis vector length mismatch".into()));
        }
        if !all_finite(v) {
            return Err(Error::NonFinite);
        }
    }
    let mut scaled = Matrix::from_vec_rows(n, basis);
    for i in 0..scaled.rows() {
        let mx = scaled.row(i).iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        if mx > 0.0 {
            for j in 0..n {
                scaled.set(i, j, scaled.get(i, j) / mx);
            }
        }
    }
    if rank_with_tolerance(&scaled, Some(tol))?.rank != basis.len() {
        return Err(Error::DependentInput);
    }
    let (r, qtb) = qr_columns(basis, Some(target)).ok_or(Error::DependentInput)?;
    let qtb = qtb.expect("rhs was provided");
    let coeffs = back_substitute(&r, &qtb[..basis.len()]).ok_or(Error::DependentInput)?;
    // Residual recomputed explicitly against the original data.
    let mut recon = vec![0.0; n];
    for (c, v) in coeffs.iter().zip(basis) {
        for (re, ve) in recon.iter_mut().zip(v) {
            *re += c * ve;
        }
    }
    if dist(&recon, target) > tol * (1.0 + norm(target)) {
        return Err(Error::NotInSpan);
    }
    Ok(coeffs)
}

/// Solution of the equality-constrained least-distance problem.
#[derive(Clone, Debug)]
pub struct KktSolution {
    /// Minimizer of `|x - v|` subject to `E x = d`.
    pub x: Vec<f64>,
    /// Multipliers, one per row, with the sign convention `v - x = E^T mu`.
    pub multipliers: Vec<f64>,
}

/// Projects `v` onto the affine set `{ x : E x = d }`. Rows must be linearly
/// independent; dependent rows raise [`Error::DependentRows`] when the system
/// is still consistent and [`Error::Inconsistent`] when it is not.
pub fn solve_equality_kkt(e: &Matrix, d: &[f64], v: &[f64]) -> Result<KktSolution> {
    let q = e.rows();
    let n = e.cols();
    if d.len() != q || v.len() != n {
        return Err(Error::InvalidInput("dimension mismatch in equality solve".into()));
    }
    if !e.is_finite() || !all_finite(d) || !all_finite(v) {
        return Err(Error::NonFinite);
    }
    if q == 0 {
        return Ok(KktSolution {
            x: v.to_vec(),
            multipliers: Vec::new(),
        });
    }
    if rank_scaled(e)?.rank < q {
        let aug = e.with_column(d);
        return if rank_scaled(&aug)?.rank == rank_scaled(e)?.rank {
            Err(Error::DependentRows)
        } else {
            Err(Error::Inconsistent)
        };
    }
    // QR of E^T gives E E^T = R^T R; two triangular solves produce the
    // multipliers, and x = v - E^T mu.
    let columns: Vec<Vec<f64>> = (0..q).map(|i| e.row(i).to_vec()).collect();
    let (r, _) = qr_columns(&columns, None).ok_or(Error::DependentRows)?;
    let mut rhs = e.mul_vec(v);
    for (re, de) in rhs.iter_mut().zip(d) {
        *re -= de;
    }
    let y = forward_substitute_transposed(&r, &rhs).ok_or(Error::DependentRows)?;
    let mu = back_substitute(&r, &y).ok_or(Error::DependentRows)?;
    let x = sub(v, &e.t_mul_vec(&mu));
    let residual = dist(&e.mul_vec(&x), d);
    if residual > KKT_RESIDUAL * (1.0 + norm(v)) {
        return Err(Error::Numeric(format!(
            "equality solve residual {residual:.3e} exceeds tolerance"
        )));
    }
    Ok(KktSolution { x, multipliers: mu })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_single_scaled_row() {
        let m = Matrix::from_rows(2, &[&[0.0, 1e-3]]);
        let r = rank_with_tolerance(&m, Some(1e-6)).unwrap();
        assert_eq!(r.rank, 1);
        assert!((r.pivot_magnitudes[0] - 1e-3).abs() < 1e-15);

        let z = Matrix::from_rows(2, &[&[0.0, 0.0]]);
        assert_eq!(rank_with_tolerance(&z, Some(1e-6)).unwrap().rank, 0);
    }

    #[test]
    fn rank_auto_tolerance() {
        let m = Matrix::from_rows(2, &[&[1.0, 0.0], &[2.0, 0.0]]);
        let r = rank_with_tolerance(&m, None).unwrap();
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn rank_rejects_non_finite() {
        let m = Matrix::from_rows(2, &[&[f64::NAN, 0.0]]);
        assert_eq!(rank_with_tolerance(&m, None), Err(Error::NonFinite));
    }

    #[test]
    fn rank_scaled_sees_tiny_rows() {
        // A row of magnitude 1e-12 is far below TAU_RANK raw, but scaling
        // restores it to unit size.
        let m = Matrix::from_rows(2, &[&[1e-12, 0.0], &[0.0, 1.0]]);
        assert_eq!(rank_scaled(&m).unwrap().rank, 2);
    }

    #[test]
    fn greedy_subset_keeps_smallest_indices() {
        let rows: Vec<&[f64]> = vec![&[1.0, 0.0], &[2.0, 0.0], &[0.0, 1.0]];
        assert_eq!(greedy_independent_rows(2, &rows).unwrap(), vec![0, 2]);
    }

    #[test]
    fn gram_schmidt_small_example() {
        let e = gram_schmidt(&[vec![1.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(e[0], vec![1.0, 0.0]);
        assert!(dist(&e[1], &[0.0, 1.0]) < 1e-15);
    }

    #[test]
    fn gram_schmidt_rejects_dependent_input() {
        assert_eq!(
            gram_schmidt(&[vec![1.0, 0.0], vec![2.0, 0.0]]),
            Err(Error::DependentInput)
        );
    }

    #[test]
    fn gram_schmidt_orthogonality_residual() {
        // A mildly skewed deterministic basis in R^5.
        let u: Vec<Vec<f64>> = (0..4)
            .map(|k| {
                (0..5)
                    .map(|j| ((k * 5 + j + 1) as f64 * 0.37).sin() + if j == k { 2.0 } else { 0.0 })
                    .collect()
            })
            .collect();
        let e = gram_schmidt(&u).unwrap();
        for i in 0..e.len() {
            for j in 0..i {
                let bound = 1e-10 * norm(&e[i]) * norm(&e[j]);
                assert!(dot(&e[i], &e[j]).abs() <= bound);
            }
        }
    }

    #[test]
    fn recover_simple_coefficients() {
        let basis = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let c = recover_coefficients(&basis, &[3.0, 4.0, 0.0], 1e-9).unwrap();
        assert!(dist(&c, &[3.0, 4.0]) < 1e-12);
        assert_eq!(
            recover_coefficients(&basis, &[0.0, 0.0, 1.0], 1e-9),
            Err(Error::NotInSpan)
        );
    }

    #[test]
    fn recover_rejects_near_dependent_basis() {
        let basis = vec![vec![1.0, 0.0], vec![1.0, 1e-9]];
        assert_eq!(
            recover_coefficients(&basis, &[1.0, 0.0], 1e-8),
            Err(Error::DependentInput)
        );
    }

    #[test]
    fn kkt_single_row() {
        let e = Matrix::from_rows(2, &[&[1.0, 0.0]]);
        let s = solve_equality_kkt(&e, &[2.0], &[0.0, 0.0]).unwrap();
        assert!(dist(&s.x, &[2.0, 0.0]) < 1e-12);
        assert!((s.multipliers[0] - (-2.0)).abs() < 1e-12);
    }

    #[test]
    fn kkt_detects_inconsistency() {
        let e = Matrix::from_rows(2, &[&[1.0, 0.0], &[1.0, 0.0]]);
        assert_eq!(
            solve_equality_kkt(&e, &[0.0, 1.0], &[0.0, 0.0]).unwrap_err(),
            Error::Inconsistent
        );
        assert_eq!(
            solve_equality_kkt(&e, &[1.0, 1.0], &[0.0, 0.0]).unwrap_err(),
            Error::DependentRows
        );
    }

    #[test]
    fn kkt_residual_orthogonal_to_nullspace() {
        let e = Matrix::from_rows(4, &[&[1.0, 2.0, -1.0, 0.5], &[0.0, 1.0, 1.0, -1.0]]);
        let v = vec![0.3, -1.2, 2.0, 0.7];
        let s = solve_equality_kkt(&e, &[0.4, -0.2], &v).unwrap();
        // Project a probe vector onto the nullspace of E and test
        // orthogonality of v - x against it.
        let probe = vec![1.0, -0.5, 0.25, 2.0];
        let z = solve_equality_kkt(&e, &[0.0, 0.0], &probe).unwrap().x;
        let vs = sub(&v, &s.x);
        assert!(dot(&vs, &z).abs() <= 1e-9 * (1.0 + norm(&v)));
    }

    #[test]
    fn coefficient_recovery_converges_linearly_in_perturbation() {
        // Perturbed-basis recovery against a fixed target: the error decays
        // like the perturbation size 1/n.
        let u = vec![
            vec![2.0, 0.3, -0.5],
            vec![-0.4, 1.5, 0.8],
            vec![0.7, -0.2, 1.9],
        ];
        let w = vec![
            vec![0.9, -1.1, 0.4],
            vec![0.2, 0.8, -0.7],
            vec![-1.3, 0.5, 0.6],
        ];
        let lam = [1.0, 2.0, 0.5];
        let target: Vec<f64> = (0..3)
            .map(|j| (0..3).map(|i| lam[i] * u[i][j]).sum())
            .collect();
        let mut errs = Vec::new();
        for n in [10.0, 100.0] {
            let basis: Vec<Vec<f64>> = u
                .iter()
                .zip(&w)
                .map(|(ui, wi)| add_scaled(ui, 1.0 / n, wi))
                .collect();
            let c = recover_coefficients(&basis, &target, 1e-6).unwrap();
            let err = c
                .iter()
                .zip(&lam)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            errs.push(err);
        }
        assert!(errs[0] / errs[1] > 5.0);
    }
}
