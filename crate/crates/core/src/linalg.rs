//! Dense complex matrix kernel sized for antenna-array work.
//!
//! Everything here targets small matrices (a handful of rows/columns), so the
//! algorithms favor determinism and accuracy over asymptotics: one-sided
//! Jacobi for the SVD, Householder reflections for QR, Cholesky for Hermitian
//! solves. Bit-identical output for identical input bytes is part of the
//! contract; no randomized pivoting, no thread-dependent reductions.
//!
//! Uniqueness conventions, applied everywhere they matter so downstream
//! feedback computations are reproducible:
//! * singular values are sorted descending, ties keep their pre-sort order;
//! * each right singular vector is scaled so its largest-modulus entry is real
//!   non-negative (ties broken toward the lowest row index), with the paired
//!   left vector absorbing the conjugate phase;
//! * QR makes the diagonal of R real non-negative;
//! * orthonormal complements scale each column by the same largest-entry rule.

use num_complex::Complex64;

use crate::{invalid, numerical, Result};

/// Residual tolerance for decomposition self-checks (relative).
pub const DECOMP_TOL: f64 = 1e-10;
/// Tolerance for validating caller-supplied inputs (orthonormality, symmetry).
pub const INPUT_TOL: f64 = 1e-8;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds from nested rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(invalid("matrix must have at least one row and column"));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(invalid("ragged rows in matrix literal"));
        }
        let mut m = CMat::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        Ok(m)
    }

    pub fn from_real_diag(d: &[f64]) -> Self {
        let mut m = CMat::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Conjugate transpose.
    pub fn h(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "matrix product dimension mismatch");
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, x.len(), "matrix-vector dimension mismatch");
        let mut y = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * x[j];
            }
            y[i] = acc;
        }
        y
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> CMat {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= s;
        }
        out
    }

    pub fn scale_real(&self, s: f64) -> CMat {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[Complex64]) {
        assert_eq!(v.len(), self.rows);
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    /// New matrix keeping the listed columns, in the listed order.
    pub fn select_cols(&self, idx: &[usize]) -> CMat {
        let mut out = CMat::zeros(self.rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            assert!(j < self.cols);
            for i in 0..self.rows {
                out[(i, jj)] = self[(i, j)];
            }
        }
        out
    }

    /// Horizontal concatenation [self other].
    pub fn hcat(&self, other: &CMat) -> CMat {
        assert_eq!(self.rows, other.rows);
        let mut out = CMat::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
            for j in 0..other.cols {
                out[(i, self.cols + j)] = other[(i, j)];
            }
        }
        out
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Inner product conj(a).b with the conjugate on the first argument.
pub fn vec_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

/// Full singular value decomposition `a = u * diag(sigma) * v^H`.
///
/// `u` is rows x rows unitary, `v` is cols x cols unitary, `sigma` holds the
/// cols singular values in descending order (callers keep rows >= cols).
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: CMat,
    pub sigma: Vec<f64>,
    pub v: CMat,
}

const MAX_JACOBI_SWEEPS: usize = 64;

/// One-sided Jacobi SVD for a tall-or-square matrix (rows >= cols >= 1).
///
/// Works on column pairs: each rotation zeroes the inner product of two
/// columns of the working copy while accumulating the same rotation into V,
/// preserving `work = a * v` throughout. After convergence the column norms
/// are the singular values and the normalized columns are the left vectors;
/// zero-norm slots and the rows-cols remainder of U come from a deterministic
/// orthonormal completion.
pub fn svd(a: &CMat) -> Result<SvdResult> {
    let (m, n) = (a.rows(), a.cols());
    if n == 0 || m < n {
        return Err(invalid(format!("svd expects rows >= cols >= 1, got {m}x{n}")));
    }
    if !a.is_finite() {
        return Err(invalid("svd input has non-finite entries"));
    }

    let mut work = a.clone();
    let mut v = CMat::identity(n);
    let tol = 8.0 * f64::EPSILON;

    let mut converged = false;
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        worst_ratio = 0.0;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let wp = work.col(p);
                let wq = work.col(q);
                let alpha = vec_norm_sqr(&wp);
                let beta = vec_norm_sqr(&wq);
                let c = vec_dot(&wp, &wq);
                let cmag = c.norm();
                if alpha == 0.0 || beta == 0.0 || cmag == 0.0 {
                    continue;
                }
                let ratio = cmag / (alpha * beta).sqrt();
                worst_ratio = worst_ratio.max(ratio);
                if ratio <= tol {
                    continue;
                }
                rotated = true;
                // Real 2x2 Jacobi angle on the phase-aligned pair.
                let phase = c / cmag;
                let zeta = (beta - alpha) / (2.0 * cmag);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                let ph = phase.conj();
                // Column rotation [wp wq] <- [wp wq] * J with
                // J = [[cs, sn], [-sn*conj(phase), cs*conj(phase)]].
                let rotate = |xp: &[Complex64], xq: &[Complex64]| {
                    let mut np = Vec::with_capacity(xp.len());
                    let mut nq = Vec::with_capacity(xp.len());
                    for i in 0..xp.len() {
                        np.push(xp[i] * cs - xq[i] * ph * sn);
                        nq.push(xp[i] * sn + xq[i] * ph * cs);
                    }
                    (np, nq)
                };
                let (np, nq) = rotate(&wp, &wq);
                work.set_col(p, &np);
                work.set_col(q, &nq);
                let (vp, vq) = rotate(&v.col(p), &v.col(q));
                v.set_col(p, &vp);
                v.set_col(q, &vq);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(numerical(format!(
            "jacobi svd failed to converge in {MAX_JACOBI_SWEEPS} sweeps \
             (worst off-diagonal ratio {worst_ratio:.3e}, size {m}x{n})"
        )));
    }

    // Sort by descending column norm; stable so tied values keep their order.
    let mut norms: Vec<f64> = (0..n).map(|j| vec_norm_sqr(&work.col(j)).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());
    work = work.select_cols(&order);
    v = v.select_cols(&order);
    norms = order.iter().map(|&j| norms[j]).collect::<Vec<_>>();

    let sigma_max = norms[0];
    let rank_tol = sigma_max * (m.max(n) as f64) * f64::EPSILON * 16.0;

    let mut u = CMat::zeros(m, m);
    let mut filled: Vec<usize> = Vec::new();
    for j in 0..n {
        if norms[j] > rank_tol && norms[j] > 0.0 {
            let col: Vec<Complex64> = work.col(j).iter().map(|z| z / norms[j]).collect();
            u.set_col(j, &col);
            filled.push(j);
        }
    }
    // Complete the left basis for rank-deficient slots and the m-n remainder.
    if filled.len() < m {
        let partial = u.select_cols(&filled);
        let extra = complete_basis(&partial, m);
        let mut next = 0usize;
        for j in 0..m {
            if !filled.contains(&j) {
                u.set_col(j, &extra.col(next));
                next += 1;
            }
        }
    }

    // Phase convention: largest-modulus entry of each right vector made real
    // non-negative, the paired left vector absorbs the conjugate phase.
    for j in 0..n {
        let col = v.col(j);
        let p = argmax_modulus(&col);
        let mag = col[p].norm();
        if mag > 0.0 {
            let ph = (col[p] / mag).conj();
            scale_col(&mut v, j, ph);
            scale_col(&mut u, j, ph);
        }
    }
    for j in n..m {
        let col = u.col(j);
        let p = argmax_modulus(&col);
        let mag = col[p].norm();
        if mag > 0.0 {
            let ph = (col[p] / mag).conj();
            scale_col(&mut u, j, ph);
        }
    }

    let result = SvdResult { u, sigma: norms, v };

    // Self-check: reconstruction and unitarity within DECOMP_TOL.
    let scale = a.fro_norm().max(1.0);
    let recon = reconstruct(&result, m, n);
    let resid = recon.sub(a).fro_norm() / scale;
    if resid > DECOMP_TOL {
        return Err(numerical(format!(
            "svd reconstruction residual {resid:.3e} exceeds {DECOMP_TOL:.1e} \
             (sigma_max {sigma_max:.3e}, sigma_min {:.3e})",
            result.sigma[n - 1]
        )));
    }
    Ok(result)
}

fn reconstruct(svd: &SvdResult, m: usize, n: usize) -> CMat {
    let mut lam = CMat::zeros(m, n);
    for (i, &s) in svd.sigma.iter().enumerate() {
        lam[(i, i)] = Complex64::new(s, 0.0);
    }
    svd.u.mul(&lam).mul(&svd.v.h())
}

fn argmax_modulus(col: &[Complex64]) -> usize {
    let mut best = 0usize;
    let mut best_mag = -1.0f64;
    for (i, z) in col.iter().enumerate() {
        let mag = z.norm();
        if mag > best_mag {
            best_mag = mag;
            best = i;
        }
    }
    best
}

fn scale_col(m: &mut CMat, j: usize, s: Complex64) {
    for i in 0..m.rows() {
        m[(i, j)] *= s;
    }
}

/// QR factorization `a = q * r` with orthonormal `q` (thin: rows x cols) and
/// upper-triangular `r` whose diagonal is real non-negative.
#[derive(Debug, Clone)]
pub struct QrResult {
    pub q: CMat,
    pub r: CMat,
}

pub fn qr(a: &CMat) -> Result<QrResult> {
    let (m, n) = (a.rows(), a.cols());
    if m < n || n == 0 {
        return Err(invalid(format!("qr expects rows >= cols >= 1, got {m}x{n}")));
    }
    if !a.is_finite() {
        return Err(invalid("qr input has non-finite entries"));
    }
    let (q_full, r_full) = householder_qr(a);
    let q = q_full.select_cols(&(0..n).collect::<Vec<_>>());
    let mut r = CMat::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            r[(i, j)] = r_full[(i, j)];
        }
    }
    // Self-check on the factors.
    let scale = a.fro_norm().max(1.0);
    let resid = q.mul(&r).sub(a).fro_norm() / scale;
    if resid > DECOMP_TOL {
        return Err(numerical(format!(
            "qr reconstruction residual {resid:.3e} exceeds {DECOMP_TOL:.1e}"
        )));
    }
    Ok(QrResult { q, r })
}

/// Householder QR returning the full m x m Q and the m x n upper trapezoid R,
/// with the R diagonal rotated real non-negative.
fn householder_qr(a: &CMat) -> (CMat, CMat) {
    let (m, n) = (a.rows(), a.cols());
    let mut r = a.clone();
    let mut q = CMat::identity(m);

    for k in 0..n.min(m) {
        // Householder vector for column k below the diagonal.
        let x: Vec<Complex64> = (k..m).map(|i| r[(i, k)]).collect();
        let normx = vec_norm_sqr(&x).sqrt();
        if normx == 0.0 {
            continue;
        }
        let x0 = x[0];
        let beta =
            if x0.norm() > 0.0 { -(x0 / x0.norm()) * normx } else { Complex64::new(-normx, 0.0) };
        let mut vvec = x.clone();
        vvec[0] -= beta;
        let vnorm2 = vec_norm_sqr(&vvec);
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;

        // r[k.., k..] <- H r[k.., k..] with H = I - tau v v^H.
        for j in k..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for i in k..m {
                dot += vvec[i - k].conj() * r[(i, j)];
            }
            let f = dot * tau;
            for i in k..m {
                let dv = vvec[i - k] * f;
                r[(i, j)] -= dv;
            }
        }
        // q[.., k..] <- q[.., k..] H (accumulates the product of reflectors).
        for i in 0..m {
            let mut dot = Complex64::new(0.0, 0.0);
            for j in k..m {
                dot += q[(i, j)] * vvec[j - k];
            }
            let f = dot * tau;
            for j in k..m {
                let dv = vvec[j - k].conj() * f;
                q[(i, j)] -= dv;
            }
        }
    }
    // Force exact zeros below the diagonal, then rotate diagonal phases into Q
    // so diag(R) is real non-negative.
    for j in 0..n {
        for i in (j + 1)..m {
            r[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    for k in 0..n.min(m) {
        let d = r[(k, k)];
        let mag = d.norm();
        if mag > 0.0 {
            let ph = (d / mag).conj();
            for j in k..n {
                r[(k, j)] *= ph;
            }
            scale_col(&mut q, k, ph.conj());
        }
    }
    (q, r)
}

/// Orthonormal basis of the orthogonal complement of the span of `vk`
/// (rows x k with orthonormal columns, 1 <= k < rows). Returns rows x (rows-k)
/// with orthonormal columns spanning the nullspace of `vk^H`.
///
/// Construction: trailing columns of the full Householder QR of `vk`, each
/// scaled so its largest-modulus entry is real non-negative. A deterministic
/// rule shared by transmitter and receiver models so both sides derive the
/// same matrix from the same feedback.
pub fn orthonormal_complement(vk: &CMat) -> Result<CMat> {
    let (m, k) = (vk.rows(), vk.cols());
    if k == 0 || k >= m {
        return Err(invalid(format!("complement needs 1 <= cols < rows, got {m}x{k}")));
    }
    if !vk.is_finite() {
        return Err(invalid("complement input has non-finite entries"));
    }
    let gram = vk.h().mul(vk);
    let dev = gram.sub(&CMat::identity(k)).max_abs();
    if dev > INPUT_TOL {
        return Err(invalid(format!(
            "complement input columns not orthonormal (gram deviation {dev:.3e})"
        )));
    }
    let comp = complete_basis(vk, m);
    // Paranoia: the product must vanish to decomposition precision.
    let cross = comp.h().mul(vk).max_abs();
    if cross > DECOMP_TOL {
        return Err(numerical(format!("complement failed orthogonality check ({cross:.3e})")));
    }
    Ok(comp)
}

/// Extends `partial` (m x k, orthonormal columns, possibly k = 0) to a full
/// basis and returns only the m-k new columns, phase-normalized.
fn complete_basis(partial: &CMat, m: usize) -> CMat {
    let k = partial.cols();
    debug_assert!(k < m);
    let mut extra = if k == 0 {
        CMat::identity(m)
    } else {
        let (q_full, _) = householder_qr(partial);
        q_full.select_cols(&(k..m).collect::<Vec<_>>())
    };
    for j in 0..extra.cols() {
        let col = extra.col(j);
        let p = argmax_modulus(&col);
        let mag = col[p].norm();
        if mag > 0.0 {
            let ph = (col[p] / mag).conj();
            scale_col(&mut extra, j, ph);
        }
    }
    extra
}

/// Solves `m x = b` for Hermitian positive-definite `m` via Cholesky.
pub fn hermitian_solve(m: &CMat, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = m.rows();
    if m.cols() != n || n == 0 {
        return Err(invalid(format!(
            "hermitian_solve needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if b.len() != n {
        return Err(invalid(format!(
            "hermitian_solve rhs length {} does not match size {n}",
            b.len()
        )));
    }
    if !m.is_finite() || b.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(invalid("hermitian_solve input has non-finite entries"));
    }
    let scale = m.max_abs().max(1.0);
    let herm_dev = m.sub(&m.h()).max_abs();
    if herm_dev > INPUT_TOL * scale {
        return Err(invalid(format!("matrix not Hermitian (deviation {herm_dev:.3e})")));
    }

    let l = cholesky(m)?;
    // Forward substitution L y = b.
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let mut acc = b[i];
        for j in 0..i {
            acc -= l[(i, j)] * y[j];
        }
        y[i] = acc / l[(i, i)];
    }
    // Back substitution L^H x = y.
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        for j in (i + 1)..n {
            acc -= l[(j, i)].conj() * x[j];
        }
        x[i] = acc / l[(i, i)];
    }
    Ok(x)
}

/// Lower Cholesky factor of a Hermitian positive-definite matrix.
fn cholesky(m: &CMat) -> Result<CMat> {
    let n = m.rows();
    let mut l = CMat::zeros(n, n);
    let mut smallest_pivot = f64::INFINITY;
    for j in 0..n {
        let mut d = m[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        smallest_pivot = smallest_pivot.min(d);
        if !(d > 0.0) || !d.is_finite() {
            return Err(numerical(format!(
                "matrix not positive definite (smallest pivot {smallest_pivot:.3e} at column {j})"
            )));
        }
        let dj = d.sqrt();
        l[(j, j)] = Complex64::new(dj, 0.0);
        for i in (j + 1)..n {
            let mut acc = m[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / dj;
        }
    }
    Ok(l)
}
