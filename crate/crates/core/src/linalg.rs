//! Dense and banded complex linear algebra.
//!
//! Everything here is hand-rolled on `Vec<Complex64>` storage: partial-pivot
//! LU for dense and banded systems, Householder reduction plus shifted QR for
//! small nonsymmetric eigenproblems, and a shift-invert Arnoldi driver.  The
//! problem sizes in this crate (≤ a few thousand dense, a few hundred
//! thousand banded) do not justify an external LAPACK binding.

use crate::{C64, Error, Result};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    nrows: usize,
    ncols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            data: vec![C64::new(0.0, 0.0); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let nrows = rows.len();
        let ncols = if nrows > 0 { rows[0].len() } else { 0 };
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self { nrows, ncols, data }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [C64] {
        &mut self.data[i * self.ncols..(i + 1) * self.ncols]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![C64::new(0.0, 0.0); self.nrows];
        for i in 0..self.nrows {
            let row = self.row(i);
            let mut acc = C64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(x.iter()) {
                acc += a * b;
            }
            y[i] = acc;
        }
        y
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.ncols, other.nrows);
        let mut out = CMat::zeros(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let src = other.row(k);
                let dst = out.row_mut(i);
                for j in 0..src.len() {
                    dst[j] += a * src[j];
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> CMat {
        let mut t = CMat::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn conj_transpose(&self) -> CMat {
        let mut t = CMat::zeros(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for j in 0..self.ncols {
                t[(j, i)] = self[(i, j)].conj();
            }
        }
        t
    }

    /// Largest entry magnitude.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&mut self, s: C64) {
        for z in &mut self.data {
            *z *= s;
        }
    }

    pub fn add_assign(&mut self, other: &CMat) {
        assert_eq!(self.nrows, other.nrows);
        assert_eq!(self.ncols, other.ncols);
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.ncols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.ncols + j]
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Conjugated inner product `⟨x, y⟩ = Σ conj(x_i) y_i`.
pub fn dot_conj(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// Plain bilinear product `Σ x_i y_i` (no conjugation); the natural pairing
/// for complex-symmetric matrices.
pub fn dot_bilinear(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

// ---------------------------------------------------------------------------
// Dense LU with partial pivoting
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: CMat,
    pivots: Vec<usize>,
}

impl LuFactors {
    pub fn factor(a: &CMat) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::Linalg(format!(
                "LU needs a square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let n = a.nrows();
        let mut lu = a.clone();
        let mut pivots = vec![0usize; n];
        for col in 0..n {
            let mut pivot_row = col;
            let mut best = lu[(col, col)].norm();
            for r in col + 1..n {
                let v = lu[(r, col)].norm();
                if v > best {
                    best = v;
                    pivot_row = r;
                }
            }
            if best == 0.0 {
                return Err(Error::Linalg(format!("singular pivot at column {col}")));
            }
            pivots[col] = pivot_row;
            if pivot_row != col {
                for j in 0..n {
                    let tmp = lu[(col, j)];
                    lu[(col, j)] = lu[(pivot_row, j)];
                    lu[(pivot_row, j)] = tmp;
                }
            }
            let inv_piv = C64::new(1.0, 0.0) / lu[(col, col)];
            for r in col + 1..n {
                let m = lu[(r, col)] * inv_piv;
                lu[(r, col)] = m;
                if m.norm_sqr() == 0.0 {
                    continue;
                }
                // row update split to appease the borrow checker
                let (top, bottom) = lu.data.split_at_mut(r * n);
                let src = &top[col * n..(col + 1) * n];
                let dst = &mut bottom[..n];
                for j in col + 1..n {
                    dst[j] -= m * src[j];
                }
            }
        }
        Ok(Self { lu, pivots })
    }

    pub fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        let n = self.lu.nrows();
        assert_eq!(rhs.len(), n);
        let mut x = rhs.to_vec();
        for i in 0..n {
            x.swap(i, self.pivots[i]);
            let xi = x[i];
            if xi.norm_sqr() != 0.0 {
                // nothing: forward elimination below
            }
            for r in i + 1..n {
                let m = self.lu[(r, i)];
                if m.norm_sqr() != 0.0 {
                    x[r] -= m * xi;
                }
            }
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[(i, j)] * x[j];
            }
            x[i] = acc / self.lu[(i, i)];
        }
        x
    }
}

// ---------------------------------------------------------------------------
// Banded storage and LU (LAPACK gbtrf-style layout)
// ---------------------------------------------------------------------------

/// Complex banded matrix with `kl` sub- and `ku` super-diagonals.
///
/// Entry `(i, j)` with `|i - j|` inside the band is stored at
/// `data[ku + i - j][j]` (diagonal-major).
#[derive(Debug, Clone)]
pub struct BandMat {
    pub n: usize,
    pub kl: usize,
    pub ku: usize,
    data: Vec<C64>,
}

impl BandMat {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        Self {
            n,
            kl,
            ku,
            data: vec![C64::new(0.0, 0.0); (kl + ku + 1) * n],
        }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        if i + self.ku < j || j + self.kl < i {
            C64::new(0.0, 0.0)
        } else {
            self.data[(self.ku + i - j) * self.n + j]
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        assert!(
            i + self.ku >= j && j + self.kl >= i,
            "({i},{j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        self.data[(self.ku + i - j) * self.n + j] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        assert!(i + self.ku >= j && j + self.kl >= i);
        self.data[(self.ku + i - j) * self.n + j] += v;
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![C64::new(0.0, 0.0); self.n];
        for i in 0..self.n {
            let jlo = i.saturating_sub(self.kl);
            let jhi = (i + self.ku).min(self.n - 1);
            let mut acc = C64::new(0.0, 0.0);
            for j in jlo..=jhi {
                acc += self.data[(self.ku + i - j) * self.n + j] * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// Dense copy, for small-size tests.
    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.n, self.n);
        for i in 0..self.n {
            for j in i.saturating_sub(self.kl)..=(i + self.ku).min(self.n - 1) {
                m[(i, j)] = self.get(i, j);
            }
        }
        m
    }

    /// Iterate over stored entries as (row, col, value).
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.n).flat_map(move |i| {
            let jlo = i.saturating_sub(self.kl);
            let jhi = (i + self.ku).min(self.n - 1);
            (jlo..=jhi).map(move |j| (i, j, self.get(i, j)))
        })
    }
}

/// LU factorization of a banded matrix with partial pivoting.
///
/// Fill widens the upper bandwidth to `ku + kl`; storage follows the usual
/// `(2kl + ku + 1) × n` working layout with multipliers kept below the
/// diagonal.
pub struct BandLu {
    n: usize,
    kl: usize,
    kuw: usize, // working upper bandwidth = ku + kl
    data: Vec<C64>,
    pivots: Vec<usize>,
}

impl BandLu {
    pub fn factor(a: &BandMat) -> Result<Self> {
        let n = a.n;
        let kl = a.kl;
        let kuw = a.ku + a.kl;
        let ld = kl + kuw + 1;
        // working[r][j] holds matrix entry (j + r - kuw, j)
        let mut w = vec![C64::new(0.0, 0.0); ld * n];
        for j in 0..n {
            let ilo = j.saturating_sub(a.ku);
            let ihi = (j + kl).min(n - 1);
            for i in ilo..=ihi {
                w[(kuw + i - j) * n + j] = a.get(i, j);
            }
        }
        let mut pivots = vec![0usize; n];
        let entry = |w: &Vec<C64>, i: usize, j: usize| -> C64 { w[(kuw + i - j) * n + j] };
        for col in 0..n {
            let imax = (col + kl).min(n - 1);
            let mut pivot_row = col;
            let mut best = entry(&w, col, col).norm();
            for i in col + 1..=imax {
                let v = entry(&w, i, col).norm();
                if v > best {
                    best = v;
                    pivot_row = i;
                }
            }
            if best == 0.0 {
                return Err(Error::Linalg(format!(
                    "banded LU: singular pivot at column {col}"
                )));
            }
            pivots[col] = pivot_row;
            let jhi = (col + kuw).min(n - 1);
            if pivot_row != col {
                for j in col..=jhi {
                    let a_idx = (kuw + col - j) * n + j;
                    let b_idx = (kuw + pivot_row - j) * n + j;
                    w.swap(a_idx, b_idx);
                }
            }
            let inv_piv = C64::new(1.0, 0.0) / entry(&w, col, col);
            for i in col + 1..=imax {
                let m = entry(&w, i, col) * inv_piv;
                w[(kuw + i - col) * n + col] = m;
                if m.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col + 1..=jhi {
                    let upd = m * w[(kuw + col - j) * n + j];
                    w[(kuw + i - j) * n + j] -= upd;
                }
            }
        }
        Ok(Self {
            n,
            kl,
            kuw,
            data: w,
            pivots,
        })
    }

    pub fn solve(&self, rhs: &[C64]) -> Vec<C64> {
        let n = self.n;
        assert_eq!(rhs.len(), n);
        let mut x = rhs.to_vec();
        for i in 0..n {
            x.swap(i, self.pivots[i]);
            let xi = x[i];
            if xi.norm_sqr() == 0.0 {
                continue;
            }
            let rmax = (i + self.kl).min(n - 1);
            for r in i + 1..=rmax {
                let m = self.data[(self.kuw + r - i) * n + i];
                x[r] -= m * xi;
            }
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            let jhi = (i + self.kuw).min(n - 1);
            for j in i + 1..=jhi {
                acc -= self.data[(self.kuw + i - j) * n + j] * x[j];
            }
            x[i] = acc / self.data[self.kuw * n + i];
        }
        x
    }

    /// Smallest pivot magnitude; a cheap near-singularity indicator.
    pub fn min_pivot(&self) -> f64 {
        (0..self.n)
            .map(|i| self.data[self.kuw * self.n + i].norm())
            .fold(f64::INFINITY, f64::min)
    }
}

// ---------------------------------------------------------------------------
// Dense nonsymmetric eigensolver: Householder -> Hessenberg -> shifted QR
// ---------------------------------------------------------------------------

fn givens(a: C64, b: C64) -> (f64, C64) {
    // returns (c, s) with [c, s; -conj(s), c] * [a; b] = [r; 0], c real
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, C64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let t = (an * an + bn * bn).sqrt();
    let c = an / t;
    let s = (a / an) * b.conj() / t;
    (c, s)
}

/// Reduce a dense matrix to upper Hessenberg form, accumulating the
/// orthogonal transform: `a = q h q^H`.
fn to_hessenberg(a: &CMat) -> (CMat, CMat) {
    let n = a.nrows();
    let mut h = a.clone();
    let mut q = CMat::identity(n);
    for col in 0..n.saturating_sub(2) {
        // Householder vector annihilating h[col+2.., col]
        let mut v = vec![C64::new(0.0, 0.0); n];
        let mut norm2 = 0.0;
        for i in col + 1..n {
            norm2 += h[(i, col)].norm_sqr();
        }
        let x0 = h[(col + 1, col)];
        let alpha = norm2.sqrt();
        if alpha == 0.0 {
            continue;
        }
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let w0 = x0 + phase * alpha;
        v[col + 1] = w0;
        for i in col + 2..n {
            v[i] = h[(i, col)];
        }
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // h <- (I - beta v v^H) h
        for j in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for i in col + 1..n {
                dot += v[i].conj() * h[(i, j)];
            }
            dot *= beta;
            for i in col + 1..n {
                let upd = v[i] * dot;
                h[(i, j)] -= upd;
            }
        }
        // h <- h (I - beta v v^H)
        for i in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for j in col + 1..n {
                dot += h[(i, j)] * v[j];
            }
            dot *= beta;
            for j in col + 1..n {
                let upd = dot * v[j].conj();
                h[(i, j)] -= upd;
            }
        }
        // q <- q (I - beta v v^H)
        for i in 0..n {
            let mut dot = C64::new(0.0, 0.0);
            for j in col + 1..n {
                dot += q[(i, j)] * v[j];
            }
            dot *= beta;
            for j in col + 1..n {
                let upd = dot * v[j].conj();
                q[(i, j)] -= upd;
            }
        }
    }
    // clean below first subdiagonal
    for i in 0..n {
        for j in 0..i.saturating_sub(1) {
            h[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    (h, q)
}

/// Schur decomposition of an upper Hessenberg matrix by explicit
/// single-shift QR with Wilkinson shifts: `h = z t z^H` with t upper
/// triangular.  `z0` seeds the accumulated transform.
fn hessenberg_schur(h0: &CMat, z0: CMat) -> Result<(CMat, CMat)> {
    let n = h0.nrows();
    let mut t = h0.clone();
    let mut z = z0;
    if n == 0 {
        return Ok((t, z));
    }
    let eps = f64::EPSILON;
    let mut hi = n - 1; // active window is [0, hi]
    let mut iters_at_window = 0usize;
    let max_total = 60 * n.max(1);
    let mut total = 0usize;
    while total < max_total {
        total += 1;
        // deflate converged subdiagonals
        while hi > 0 {
            let sub = t[(hi, hi - 1)].norm();
            let scale = t[(hi - 1, hi - 1)].norm() + t[(hi, hi)].norm();
            if sub <= eps * scale.max(1e-300) {
                t[(hi, hi - 1)] = C64::new(0.0, 0.0);
                hi -= 1;
                iters_at_window = 0;
            } else {
                break;
            }
        }
        if hi == 0 {
            return Ok((t, z));
        }
        // find the start of the unreduced block ending at hi
        let mut lo = hi;
        while lo > 0 {
            let sub = t[(lo, lo - 1)].norm();
            let scale = t[(lo - 1, lo - 1)].norm() + t[(lo, lo)].norm();
            if sub <= eps * scale.max(1e-300) {
                t[(lo, lo - 1)] = C64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        iters_at_window += 1;
        // Wilkinson shift from trailing 2x2, exceptional shift now and then
        let shift = if iters_at_window % 17 == 16 {
            t[(hi, hi - 1)] * C64::new(1.5, 0.0) + t[(hi, hi)]
        } else {
            let a = t[(hi - 1, hi - 1)];
            let b = t[(hi - 1, hi)];
            let c = t[(hi, hi - 1)];
            let d = t[(hi, hi)];
            let tr = a + d;
            let det = a * d - b * c;
            let disc = (tr * tr - det * 4.0).sqrt();
            let l1 = (tr + disc) * 0.5;
            let l2 = (tr - disc) * 0.5;
            if (l1 - d).norm() < (l2 - d).norm() {
                l1
            } else {
                l2
            }
        };
        // explicit single-shift QR step on [lo, hi]
        for i in lo..=hi {
            t[(i, i)] -= shift;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let (c, s) = givens(t[(i, i)], t[(i + 1, i)]);
            rots.push((c, s));
            for j in i..n {
                let a = t[(i, j)];
                let b = t[(i + 1, j)];
                t[(i, j)] = a * c + b * s;
                t[(i + 1, j)] = -a * s.conj() + b * c;
            }
        }
        for (idx, (c, s)) in rots.iter().enumerate() {
            let i = lo + idx;
            let rmax = (i + 1).min(hi);
            for r in 0..=rmax {
                let a = t[(r, i)];
                let b = t[(r, i + 1)];
                t[(r, i)] = a * *c + b * s.conj();
                t[(r, i + 1)] = -a * *s + b * *c;
            }
            for r in 0..n {
                let a = z[(r, i)];
                let b = z[(r, i + 1)];
                z[(r, i)] = a * *c + b * s.conj();
                z[(r, i + 1)] = -a * *s + b * *c;
            }
        }
        for i in lo..=hi {
            t[(i, i)] += shift;
        }
    }
    Err(Error::ConvergenceFailure(format!(
        "QR iteration did not deflate within {max_total} sweeps (n = {n})"
    )))
}

/// Eigenvalues and right eigenvectors of a dense complex matrix.
///
/// Returns pairs sorted by descending magnitude of the eigenvalue.  Intended
/// for the small dense problems in this crate (Ritz blocks, transverse
/// blocks); cost is O(n³) with a modest constant.
pub fn dense_eigen(a: &CMat) -> Result<Vec<(C64, Vec<C64>)>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(vec![]);
    }
    let (h, q) = to_hessenberg(a);
    let (t, z) = hessenberg_schur(&h, q)?;
    let tnorm = t.max_norm().max(1e-300);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let lambda = t[(k, k)];
        // solve (T - lambda) y = 0 with y[k] = 1 by back substitution
        let mut y = vec![C64::new(0.0, 0.0); n];
        y[k] = C64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut acc = C64::new(0.0, 0.0);
            for j in i + 1..=k {
                acc += t[(i, j)] * y[j];
            }
            let mut den = t[(i, i)] - lambda;
            if den.norm() < 1e-14 * tnorm {
                den = C64::new(1e-14 * tnorm, 0.0);
            }
            y[i] = -acc / den;
        }
        let mut v = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..=k {
                acc += z[(i, j)] * y[j];
            }
            v[i] = acc;
        }
        let nrm = vec_norm(&v);
        if nrm > 0.0 {
            for vi in &mut v {
                *vi /= nrm;
            }
        }
        out.push((lambda, v));
    }
    out.sort_by(|a, b| b.0.norm().partial_cmp(&a.0.norm()).unwrap());
    Ok(out)
}

// ---------------------------------------------------------------------------
// Arnoldi iteration
// ---------------------------------------------------------------------------

/// Result of an Arnoldi run: the Krylov basis (columns) and the small
/// Hessenberg matrix it projects the operator onto.
pub struct ArnoldiResult {
    pub basis: Vec<Vec<C64>>,
    pub hess: CMat,
    pub steps: usize,
}

/// Build an m-step Arnoldi decomposition of the operator given by `apply`,
/// with one full reorthogonalization pass per step.
pub fn arnoldi(
    apply: &mut dyn FnMut(&[C64]) -> Vec<C64>,
    v0: &[C64],
    m: usize,
) -> ArnoldiResult {
    let n = v0.len();
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
    let mut hess = CMat::zeros(m + 1, m);
    let nrm = vec_norm(v0);
    basis.push(v0.iter().map(|z| z / nrm).collect());
    let mut steps = 0;
    for j in 0..m {
        let mut w = apply(&basis[j]);
        for _pass in 0..2 {
            for (i, vi) in basis.iter().enumerate() {
                let c = dot_conj(vi, &w);
                for (wk, vk) in w.iter_mut().zip(vi.iter()) {
                    *wk -= c * vk;
                }
                hess[(i, j)] += c;
            }
        }
        let h = vec_norm(&w);
        hess[(j + 1, j)] = C64::new(h, 0.0);
        steps = j + 1;
        if h < 1e-14 {
            break;
        }
        basis.push(w.iter().map(|z| z / h).collect());
        let _ = n;
    }
    ArnoldiResult { basis, hess, steps }
}

/// Dominant eigenpair by power iteration with a deterministic start vector.
///
/// Returns `(eigenvalue, vector, residual)` where the eigenvalue is the
/// two-sided Rayleigh-like quotient `⟨v, Av⟩ / ⟨v, v⟩`.
pub fn power_iteration(
    apply: &mut dyn FnMut(&[C64]) -> Vec<C64>,
    n: usize,
    max_iter: usize,
    tol: f64,
) -> (C64, Vec<C64>, f64) {
    let mut v: Vec<C64> = (0..n)
        .map(|i| {
            // fixed pseudo-random start, full support
            let t = (i as f64 * 0.7390851332151607).fract();
            C64::new(1.0 + t, 0.5 - t * t)
        })
        .collect();
    let nrm = vec_norm(&v);
    for z in &mut v {
        *z /= nrm;
    }
    let mut lambda = C64::new(0.0, 0.0);
    let mut resid = f64::INFINITY;
    for _ in 0..max_iter {
        let w = apply(&v);
        lambda = dot_conj(&v, &w);
        let mut r = 0.0;
        for (wi, vi) in w.iter().zip(v.iter()) {
            r += (wi - lambda * vi).norm_sqr();
        }
        resid = r.sqrt();
        let wn = vec_norm(&w);
        if wn == 0.0 {
            return (C64::new(0.0, 0.0), v, 0.0);
        }
        v = w.iter().map(|z| z / wn).collect();
        if resid < tol * lambda.norm().max(1e-300) {
            break;
        }
    }
    (lambda, v, resid)
}
