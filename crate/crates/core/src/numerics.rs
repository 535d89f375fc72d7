//! Small dense complex linear algebra: Hermitian eigensystems, Takagi
//! factorization, partial transposes and Haar-random unitaries.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::states::DensityMatrix;

pub type ComplexMatrix = DMatrix<Complex64>;
pub type Ket = DVector<Complex64>;

/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Kronecker deltas in closed-form expressions fire below this magnitude.
pub const DELTA_TOL: f64 = 1e-12;

const HERMITIAN_TOL: f64 = 1e-10;
const SYMMETRIC_TOL: f64 = 1e-10;
const REAL_ROUTE_TOL: f64 = 1e-12;

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn delta(x: f64) -> f64 {
    if x.abs() <= DELTA_TOL {
        1.0
    } else {
        0.0
    }
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_error(a: &ComplexMatrix) -> f64 {
    max_abs(&(a - a.adjoint()))
}

pub fn unitarity_error(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - ComplexMatrix::identity(n, n)))
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_row_iterator(rows, cols, data.iter().map(|&x| c64(x, 0.0)))
}

pub fn diag_real(values: &[f64]) -> ComplexMatrix {
    let n = values.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (k, &v) in values.iter().enumerate() {
        m[(k, k)] = c64(v, 0.0);
    }
    m
}

pub fn outer(a: &Ket, b: &Ket) -> ComplexMatrix {
    a * b.adjoint()
}

/// Computational basis ket |k⟩ with a 0-based index.
pub fn basis_ket(dim: usize, k: usize) -> Ket {
    let mut v = Ket::zeros(dim);
    v[k] = c64(1.0, 0.0);
    v
}

/// Flip the sign of `v` so its largest-magnitude entry has nonnegative real part.
/// Sign flips keep bilinear quantities like vᵀSv unchanged.
pub fn sign_normalize(v: &mut Ket) {
    if let Some(k) = dominant_index(v) {
        if v[k].re < 0.0 {
            v.neg_mut();
        }
    }
}

/// Rotate the global phase of `v` so its largest-magnitude entry is real and positive.
pub fn phase_normalize(v: &mut Ket) {
    if let Some(k) = dominant_index(v) {
        let z = v[k];
        let ph = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= ph;
        }
    }
}

// Largest-magnitude entry; near-ties (1e-9) go to the lowest index.
fn dominant_index(v: &Ket) -> Option<usize> {
    let m = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if m == 0.0 {
        return None;
    }
    v.iter().position(|z| z.norm() >= m - 1e-9)
}

// Complex Jacobi rotation G on the (p, q) plane with columns
// (c, −s e^{−iφ}) and (s, c e^{−iφ}); applied as M ← M G.
#[derive(Clone, Copy)]
struct Rotation {
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    ph: Complex64,
}

impl Rotation {
    // Annihilates the (p, q) entry of the Hermitian Gram-type matrix with
    // diagonal entries app, aqq and off-diagonal apq.
    fn for_pair(p: usize, q: usize, app: f64, aqq: f64, apq: Complex64) -> Self {
        let r = apq.norm();
        let tau = (aqq - app) / (2.0 * r);
        let t = if tau == 0.0 {
            1.0
        } else {
            tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        Rotation { p, q, c, s: t * c, ph: (apq / r).conj() }
    }

    fn apply_cols(&self, m: &mut ComplexMatrix) {
        for k in 0..m.nrows() {
            let (a, b) = (m[(k, self.p)], m[(k, self.q)]);
            m[(k, self.p)] = a * self.c - b * self.ph * self.s;
            m[(k, self.q)] = a * self.s + b * self.ph * self.c;
        }
    }

    fn apply_rows_adjoint(&self, m: &mut ComplexMatrix) {
        let ph = self.ph.conj();
        for k in 0..m.ncols() {
            let (a, b) = (m[(self.p, k)], m[(self.q, k)]);
            m[(self.p, k)] = a * self.c - b * ph * self.s;
            m[(self.q, k)] = a * self.s + b * ph * self.c;
        }
    }
}

const JACOBI_SWEEPS: usize = 60;

// Cyclic Jacobi on a Hermitian matrix; eigenvalues are returned unsorted.
// nalgebra's symmetric_eigen returned wrong eigenvectors on block-sparse
// inputs, and Jacobi is also more accurate on tiny eigenvalues.
fn jacobi_eigh(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = h.nrows();
    let mut a = h.clone();
    let mut v = ComplexMatrix::identity(n, n);
    let scale = max_abs(h);
    for _ in 0..JACOBI_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= f64::EPSILON * 1e-3 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].norm() <= f64::MIN_POSITIVE {
                    continue;
                }
                let g = Rotation::for_pair(p, q, a[(p, p)].re, a[(q, q)].re, a[(p, q)]);
                g.apply_cols(&mut a);
                g.apply_rows_adjoint(&mut a);
                g.apply_cols(&mut v);
                a[(p, q)] = c64(0.0, 0.0);
                a[(q, p)] = c64(0.0, 0.0);
                a[(p, p)].im = 0.0;
                a[(q, q)].im = 0.0;
            }
        }
    }
    ((0..n).map(|k| a[(k, k)].re).collect(), v)
}

/// Thin singular value decomposition A = U Σ V† with descending values.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub values: Vec<f64>,
    pub v: ComplexMatrix,
}

/// One-sided (Hestenes) Jacobi SVD of a square matrix. Columns of U for zero
/// singular values are completed to an orthonormal basis.
pub fn svd(m: &ComplexMatrix) -> Svd {
    let n = m.ncols();
    let mut a = m.clone();
    let mut v = ComplexMatrix::identity(n, n);
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                if gamma.norm() <= 1e-15 * (alpha * beta).sqrt() || gamma.norm() == 0.0 {
                    continue;
                }
                rotated = true;
                let g = Rotation::for_pair(p, q, alpha, beta, gamma);
                g.apply_cols(&mut a);
                g.apply_cols(&mut v);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|k| a.column(k).norm()).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let rows = m.nrows();
    let mut u = ComplexMatrix::zeros(rows, n);
    let mut vs = ComplexMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    let top = norms.iter().fold(0.0f64, |x, &y| x.max(y));
    let mut basis: Vec<Ket> = Vec::new();
    let mut pending = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        vs.set_column(dst, &v.column(src));
        values.push(norms[src]);
        if norms[src] > 1e-14 * top && norms[src] > 0.0 {
            let col: Ket = a.column(src).unscale(norms[src]);
            u.set_column(dst, &col);
            basis.push(col);
        } else {
            pending.push(dst);
        }
    }
    let mut e = 0;
    for dst in pending {
        while e < rows {
            let mut w = basis_ket(rows, e);
            e += 1;
            for b in &basis {
                let ov = b.dotc(&w);
                w -= b * ov;
            }
            let nw = w.norm();
            if nw > 1e-6 {
                let w = w.unscale(nw);
                u.set_column(dst, &w);
                basis.push(w);
                break;
            }
        }
    }
    Svd { u, values, v: vs }
}

#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn vector(&self, k: usize) -> Ket {
        self.vectors.column(k).into_owned()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        &self.vectors * diag_real(&self.values) * self.vectors.adjoint()
    }
}

/// Eigendecomposition of a Hermitian matrix with descending eigenvalues.
///
/// Within a degenerate cluster the basis is rebuilt from the cluster projector by
/// pivoted Gram-Schmidt over computational basis vectors, so the result depends
/// only on the eigenspace and not on the solver's internal choices. Every vector
/// has its dominant entry made real and positive.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEig> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotHermitian(f64::INFINITY));
    }
    let dev = hermiticity_error(a);
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let n = a.nrows();
    let h = (a + a.adjoint()).scale(0.5);
    let (raw, vecs) = jacobi_eigh(&h);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| raw[j].total_cmp(&raw[i]));
    let values: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &vecs.column(src));
    }

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end - 1] - values[end] <= DEGENERACY_TOL {
            end += 1;
        }
        if end - start > 1 {
            let block = vectors.columns(start, end - start).into_owned();
            let canon = canonical_basis(&block);
            vectors.columns_mut(start, end - start).copy_from(&canon);
        }
        start = end;
    }

    for k in 0..n {
        let mut v = vectors.column(k).into_owned();
        phase_normalize(&mut v);
        vectors.set_column(k, &v);
    }
    Ok(HermitianEig { values, vectors })
}

// Canonical orthonormal basis of span(block): project e_0, e_1, ... and keep
// the largest residual at each step.
fn canonical_basis(block: &ComplexMatrix) -> ComplexMatrix {
    let (n, m) = block.shape();
    let proj = block * block.adjoint();
    let mut chosen: Vec<Ket> = Vec::with_capacity(m);
    let mut used = vec![false; n];
    for _ in 0..m {
        let mut best: Option<(usize, Ket, f64)> = None;
        for j in (0..n).filter(|&j| !used[j]) {
            let mut r: Ket = proj.column(j).into_owned();
            for q in &chosen {
                let ov = q.dotc(&r);
                r -= q * ov;
            }
            let nr = r.norm();
            if best.as_ref().is_none_or(|b| nr > b.2 + 1e-12) {
                best = Some((j, r, nr));
            }
        }
        let (j, r, nr) = best.expect("cluster larger than the space");
        used[j] = true;
        chosen.push(r.unscale(nr));
    }
    chosen.sort_by(|a, b| {
        let fa = first_significant(a);
        let fb = first_significant(b);
        fa.0.cmp(&fb.0).then(fb.1.total_cmp(&fa.1))
    });
    let mut out = ComplexMatrix::zeros(n, m);
    for (k, v) in chosen.iter().enumerate() {
        out.set_column(k, v);
    }
    out
}

fn first_significant(v: &Ket) -> (usize, f64) {
    v.iter()
        .enumerate()
        .find(|(_, z)| z.norm() > 1e-8)
        .map(|(i, z)| (i, z.norm()))
        .unwrap_or((v.len(), 0.0))
}

#[derive(Debug, Clone)]
pub struct TakagiFactorization {
    pub unitary: ComplexMatrix,
    pub values: Vec<f64>,
}

impl TakagiFactorization {
    pub fn reconstruct(&self) -> ComplexMatrix {
        &self.unitary * diag_real(&self.values) * self.unitary.transpose()
    }
}

/// Takagi factorization T = U diag(d) Uᵀ of a complex symmetric matrix,
/// with d sorted in descending order.
pub fn takagi_symmetric(t: &ComplexMatrix) -> Result<TakagiFactorization> {
    if t.nrows() != t.ncols() {
        return Err(Error::NotSymmetric(f64::INFINITY));
    }
    let dev = max_abs(&(t - t.transpose()));
    if dev > SYMMETRIC_TOL {
        return Err(Error::NotSymmetric(dev));
    }
    let s = (t + t.transpose()).scale(0.5);
    let im_max = s.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if im_max <= REAL_ROUTE_TOL {
        Ok(takagi_real(&s.map(|z| z.re)))
    } else {
        Ok(takagi_complex(&s))
    }
}

// Real symmetric eigensystem through the complex solver; real input keeps
// every rotation phase at ±1, so the vectors stay real.
struct RealEig {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

fn real_symmetric_eig(a: &DMatrix<f64>) -> RealEig {
    let (eigenvalues, v) = jacobi_eigh(&a.map(|x| c64(x, 0.0)));
    RealEig { eigenvalues, eigenvectors: v.map(|z| z.re) }
}

// Real symmetric input: eigendecompose and absorb negative signs as phases i.
fn takagi_real(a: &DMatrix<f64>) -> TakagiFactorization {
    let n = a.nrows();
    let eig = real_symmetric_eig(a);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].abs().total_cmp(&eig.eigenvalues[i].abs()));
    let mut unitary = ComplexMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let d = eig.eigenvalues[src];
        let phase = if d < 0.0 { c64(0.0, 1.0) } else { c64(1.0, 0.0) };
        for r in 0..n {
            unitary[(r, dst)] = phase * eig.eigenvectors[(r, src)];
        }
        values.push(d.abs());
    }
    TakagiFactorization { unitary, values }
}

// General input: the real embedding M = [[Re T, Im T], [Im T, -Re T]] has
// eigenpairs ±σ; a +σ eigenvector (x; y) gives a Takagi column u = x + iy
// with T ū = σ u. Null directions are completed by complex Gram-Schmidt.
fn takagi_complex(t: &ComplexMatrix) -> TakagiFactorization {
    let n = t.nrows();
    let mut m = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = t[(i, j)];
            m[(i, j)] = z.re;
            m[(i, n + j)] = z.im;
            m[(n + i, j)] = z.im;
            m[(n + i, n + j)] = -z.re;
        }
    }
    let eig = real_symmetric_eig(&m);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let scale = eig.eigenvalues.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
    let tol = 1e-13 * scale;

    let to_ket = |k: usize| -> Ket {
        Ket::from_iterator(
            n,
            (0..n).map(|r| c64(eig.eigenvectors[(r, k)], eig.eigenvectors[(n + r, k)])),
        )
    };

    let mut cols: Vec<Ket> = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for &k in order.iter().take(n) {
        if eig.eigenvalues[k] <= tol {
            break;
        }
        cols.push(to_ket(k));
        values.push(eig.eigenvalues[k]);
    }
    // remaining candidates, smallest |eigenvalue| first
    let mut rest: Vec<usize> = order[cols.len()..].to_vec();
    rest.sort_by(|&i, &j| eig.eigenvalues[i].abs().total_cmp(&eig.eigenvalues[j].abs()));
    for k in rest {
        if cols.len() == n {
            break;
        }
        let mut v = to_ket(k);
        for q in &cols {
            let ov = q.dotc(&v);
            v -= q * ov;
        }
        let nv = v.norm();
        if nv > 1e-6 {
            cols.push(v.unscale(nv));
            values.push(0.0);
        }
    }
    let mut unitary = ComplexMatrix::zeros(n, n);
    for (k, v) in cols.iter().enumerate() {
        unitary.set_column(k, v);
    }
    TakagiFactorization { unitary, values }
}

/// Partial transpose on the first mode for a bipartite matrix with mode dims (n1, n2).
pub fn partial_transpose(m: &ComplexMatrix, dims: (usize, usize)) -> ComplexMatrix {
    let (n1, n2) = dims;
    let mut out = ComplexMatrix::zeros(n1 * n2, n1 * n2);
    for a in 0..n1 {
        for b in 0..n2 {
            for c in 0..n1 {
                for d in 0..n2 {
                    out[(a * n2 + b, c * n2 + d)] = m[(c * n2 + b, a * n2 + d)];
                }
            }
        }
    }
    out
}

/// Sum of |negative eigenvalues| of the first-mode partial transpose of a
/// (possibly subnormalized) Hermitian matrix.
pub fn negativity_of(m: &ComplexMatrix, dims: (usize, usize)) -> f64 {
    let pt = partial_transpose(m, dims);
    let h = (&pt + pt.adjoint()).scale(0.5);
    jacobi_eigh(&h)
        .0
        .iter()
        .filter(|&&x| x < 0.0)
        .fold(0.0, |acc, x| acc - x)
}

pub fn partial_transpose_negativity(rho: &DensityMatrix) -> f64 {
    negativity_of(rho.matrix(), rho.mode_dims())
}

/// Haar-distributed unitary from the QR factorization of a complex Ginibre
/// matrix, with the phases of R's diagonal moved into Q.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let z = ComplexMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = z.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Haar-random unit ket (first column of a Haar unitary).
pub fn random_ket<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Ket {
    let v = Ket::from_fn(dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re, im)
    });
    let n = v.norm();
    v.unscale(n)
}

pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    svd(m).values
}

pub fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
