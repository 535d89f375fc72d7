//! State families of the 2×3 system and their structural classification.
//!
//! Levels are numbered 1..6 in the public API with
//! {|1⟩,…,|6⟩} = {|11⟩,|12⟩,|13⟩,|21⟩,|22⟩,|23⟩}; matrices are indexed from 0.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use rand::Rng;
use rand_distr::Exp1;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{
    c64, delta, diag_real, hermitian_eig, max_abs, outer, svd, ComplexMatrix, Ket, DEGENERACY_TOL,
};

const STATE_TOL: f64 = 1e-10;
const TEMPLATE_TOL: f64 = 1e-10;
const SPECTRUM_SUM_TOL: f64 = 1e-12;
const RANGE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    mode_dims: (usize, usize),
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (all to 1e-10) and
    /// stores the Hermitian part.
    pub fn new(matrix: ComplexMatrix, mode_dims: (usize, usize)) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::InvalidState(format!("matrix is {}x{}", n, matrix.ncols())));
        }
        if !matches!(mode_dims, (2, 2) | (2, 3)) || mode_dims.0 * mode_dims.1 != n {
            return Err(Error::InvalidState(format!(
                "mode dims {:?} do not fit dimension {}",
                mode_dims, n
            )));
        }
        let h = (&matrix + matrix.adjoint()).scale(0.5);
        let herm = max_abs(&(&matrix - &h));
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {:e})", herm)));
        }
        let tr = h.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {} is not 1", tr)));
        }
        let min = hermitian_eig(&h)?.values.last().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {:e}", min)));
        }
        Ok(Self { matrix: h, mode_dims })
    }

    pub fn from_ket(psi: &Ket, mode_dims: (usize, usize)) -> Result<Self> {
        let n = psi.norm();
        if (n - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized(n));
        }
        Self::new(outer(psi, psi), mode_dims)
    }

    pub fn maximally_mixed(mode_dims: (usize, usize)) -> Self {
        let n = mode_dims.0 * mode_dims.1;
        Self { matrix: ComplexMatrix::identity(n, n).unscale(n as f64), mode_dims }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn mode_dims(&self) -> (usize, usize) {
        self.mode_dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// 1-based entry ρ_{i,j}.
    pub fn at(&self, i: usize, j: usize) -> num_complex::Complex64 {
        self.matrix[(i - 1, j - 1)]
    }

    pub(crate) fn d(&self, i: usize) -> f64 {
        self.matrix[(i - 1, i - 1)].re
    }

    pub(crate) fn abs(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i - 1, j - 1)].norm()
    }

    /// Descending eigenvalues, negative round-off clamped to zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig(&self.matrix)
            .expect("stored matrix is Hermitian")
            .values
            .into_iter()
            .map(|x| x.max(0.0))
            .collect()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// U ρ U†.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(u * &self.matrix * u.adjoint(), self.mode_dims)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    /// Requires a descending, nonnegative list summing to 1 (to 1e-12).
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSpectrum("empty".into()));
        }
        if let Some(x) = values.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidSpectrum(format!("entry {} is negative or not finite", x)));
        }
        if values.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidSpectrum("not in descending order".into()));
        }
        let s: f64 = values.iter().sum();
        if (s - 1.0).abs() > SPECTRUM_SUM_TOL {
            return Err(Error::InvalidSpectrum(format!("sum {} is not 1", s)));
        }
        Ok(Self(values))
    }

    /// Sorts into descending order first; the flag reports whether the input was reordered.
    pub fn sorted(mut values: Vec<f64>) -> Result<(Self, bool)> {
        let was_sorted = values.windows(2).all(|w| w[0] >= w[1]);
        values.sort_by(|a, b| b.total_cmp(a));
        Ok((Self::new(values)?, !was_sorted))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 1-based λ_k.
    pub fn l(&self, k: usize) -> f64 {
        self.0[k - 1]
    }

    fn require_len(&self, n: usize) -> Result<()> {
        if self.0.len() != n {
            return Err(Error::InvalidSpectrum(format!(
                "expected {} eigenvalues, got {}",
                n,
                self.0.len()
            )));
        }
        Ok(())
    }
}

/// Random spectrum of the given rank, uniform on the probability simplex.
pub fn random_spectrum<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Spectrum {
    let mut v: Vec<f64> = (0..rank).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v.resize(n, 0.0);
    v.sort_by(|a, b| b.total_cmp(a));
    // push the summation error into λ₁ so the sum is exact to round-off
    let err = 1.0 - v.iter().sum::<f64>();
    v[0] += err;
    Spectrum(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Quartet([usize; 4]);

const QUARTETS: [[usize; 4]; 3] = [[1, 2, 4, 5], [1, 3, 4, 6], [2, 3, 5, 6]];
const COMPLEMENTS: [[usize; 2]; 3] = [[3, 6], [2, 5], [1, 4]];

impl Quartet {
    pub fn new(indices: [usize; 4]) -> Result<Self> {
        if QUARTETS.contains(&indices) {
            Ok(Self(indices))
        } else {
            Err(Error::InvalidQuartet(indices.to_vec()))
        }
    }

    pub fn indices(&self) -> [usize; 4] {
        self.0
    }

    /// Position in `quartets()`.
    pub fn position(&self) -> usize {
        QUARTETS.iter().position(|q| *q == self.0).expect("validated quartet")
    }

    /// The pair {a,d}.
    pub fn outer(&self) -> (usize, usize) {
        (self.0[0], self.0[3])
    }

    /// The pair {b,c}.
    pub fn inner(&self) -> (usize, usize) {
        (self.0[1], self.0[2])
    }

    /// The two levels outside the quartet.
    pub fn complement(&self) -> [usize; 2] {
        COMPLEMENTS[self.position()]
    }

    pub fn contains(&self, level: usize) -> bool {
        self.0.contains(&level)
    }
}

pub fn quartets() -> [Quartet; 3] {
    QUARTETS.map(Quartet)
}

fn extract(m: &ComplexMatrix, levels: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(levels.len(), levels.len(), |a, b| m[(levels[a] - 1, levels[b] - 1)])
}

/// The block ρ^{v} on 1-based `levels`, not renormalized.
pub fn subspace_extract(rho: &DensityMatrix, levels: &[usize]) -> Result<ComplexMatrix> {
    let n = rho.dim();
    if levels.is_empty() || levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::IndexOutOfRange(format!("{:?} is not strictly increasing", levels)));
    }
    if levels[0] < 1 || levels[levels.len() - 1] > n {
        return Err(Error::IndexOutOfRange(format!("{:?} not within 1..{}", levels, n)));
    }
    Ok(extract(rho.matrix(), levels))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct StateClass {
    pub is_x: bool,
    pub is_tgx: bool,
    pub is_min_tgx: bool,
    pub is_min_sgx: bool,
    pub is_epu_min_tgx: bool,
    pub is_mems_form: bool,
    pub is_diagonal: bool,
}

/// ME TGX tuples; each is the coherence pair of one quartet's outer or inner qubit.
pub const ME_TGX_TUPLES: [(usize, usize); 6] = [(1, 5), (1, 6), (2, 4), (2, 6), (3, 4), (3, 5)];
const MIN_TGX_PAIRS: [[(usize, usize); 2]; 3] = [[(1, 5), (2, 4)], [(1, 6), (3, 4)], [(2, 6), (3, 5)]];

// All off-diagonal entries outside `allowed` (1-based, unordered pairs) vanish.
fn matches_template(m: &ComplexMatrix, allowed: impl Fn(usize, usize) -> bool) -> bool {
    let n = m.nrows();
    for i in 1..=n {
        for j in (i + 1)..=n {
            if !allowed(i, j) && m[(i - 1, j - 1)].norm() > TEMPLATE_TOL {
                return false;
            }
        }
    }
    true
}

fn in_pairs(pairs: &[(usize, usize)], i: usize, j: usize) -> bool {
    pairs.contains(&(i.min(j), i.max(j)))
}

pub(crate) fn matches_min_tgx(m: &ComplexMatrix, variant: usize) -> bool {
    matches_template(m, |i, j| in_pairs(&MIN_TGX_PAIRS[variant], i, j))
}

/// Dense quartet block plus the complementary pair, for quartet `variant`.
pub(crate) fn matches_min_sgx(m: &ComplexMatrix, variant: usize) -> bool {
    let q = QUARTETS[variant];
    let c = COMPLEMENTS[variant];
    matches_template(m, |i, j| {
        (q.contains(&i) && q.contains(&j)) || (c.contains(&i) && c.contains(&j))
    })
}

pub fn classify(rho: &DensityMatrix) -> StateClass {
    let m = rho.matrix();
    let is_diagonal = matches_template(m, |_, _| false);
    if rho.dim() == 4 {
        return StateClass {
            is_x: matches_template(m, |i, j| i + j == 5),
            is_diagonal,
            ..Default::default()
        };
    }
    StateClass {
        is_x: matches_template(m, |i, j| i + j == 7),
        is_tgx: matches_template(m, |i, j| in_pairs(&ME_TGX_TUPLES, i, j)),
        is_min_tgx: (0..3).any(|v| matches_min_tgx(m, v)),
        is_min_sgx: (0..3).any(|v| matches_min_sgx(m, v)),
        is_epu_min_tgx: ME_TGX_TUPLES
            .iter()
            .any(|&t| matches_template(m, |i, j| (i.min(j), i.max(j)) == t)),
        is_mems_form: matches_template(m, |i, j| (i.min(j), i.max(j)) == (1, 6)),
        is_diagonal,
    }
}

fn perm_matrix(p: &[usize]) -> ComplexMatrix {
    let n = p.len();
    let mut m = ComplexMatrix::zeros(n, n);
    for (j, &i) in p.iter().enumerate() {
        m[(i, j)] = c64(1.0, 0.0);
    }
    m
}

/// All 12 local permutation unitaries Π⁽¹⁾⊗Π⁽²⁾.
pub fn enumerate_lpus() -> Vec<ComplexMatrix> {
    let p2 = [[0, 1], [1, 0]];
    let p3 = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut out = Vec::with_capacity(12);
    for a in &p2 {
        for b in &p3 {
            out.push(perm_matrix(a).kronecker(&perm_matrix(b)));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct MeTgxKet {
    /// 1-based support pair {a,b}.
    pub levels: (usize, usize),
    pub plus: bool,
    pub ket: Ket,
}

/// The twelve |Φ±_{a,b}⟩ = (|a⟩ ± |b⟩)/√2. The first six (pairs {1,5},{2,6},{3,4})
/// and the last six (pairs {1,6},{2,4},{3,5}) are each a maximally entangled basis.
pub fn me_tgx_states() -> Vec<MeTgxKet> {
    let columns = [[(1, 5), (2, 6), (3, 4)], [(1, 6), (2, 4), (3, 5)]];
    let mut out = Vec::with_capacity(12);
    for col in &columns {
        for &(a, b) in col {
            for plus in [true, false] {
                let mut ket = Ket::zeros(6);
                ket[a - 1] = c64(FRAC_1_SQRT_2, 0.0);
                ket[b - 1] = c64(if plus { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 }, 0.0);
                out.push(MeTgxKet { levels: (a, b), plus, ket });
            }
        }
    }
    out
}

/// λ₁ − λ₅ − 2√(λ₄λ₆); may be negative.
pub fn e_mems(spectrum: &Spectrum) -> f64 {
    let l = |k| spectrum.l(k);
    l(1) - l(5) - 2.0 * (l(4) * l(6)).sqrt()
}

pub fn physical_entanglement(spectrum: &Spectrum, eta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::EtaOutOfRange(eta));
    }
    spectrum.require_len(6)?;
    Ok(eta * e_mems(spectrum).max(0.0))
}

// Accepts E in [0, max] with round-off slack and clamps into the closed range.
fn check_range(value: f64, max: f64) -> Result<f64> {
    let max = max.max(0.0);
    if !value.is_finite() || value < -RANGE_SLACK || value > max + RANGE_SLACK {
        return Err(Error::UnphysicalEntanglement { value, max });
    }
    Ok(value.clamp(0.0, max))
}

pub(crate) fn check_physical(spectrum: &Spectrum, e: f64) -> Result<f64> {
    spectrum.require_len(6)?;
    check_range(e, e_mems(spectrum))
}

pub fn build_mems(spectrum: &Spectrum) -> Result<DensityMatrix> {
    spectrum.require_len(6)?;
    let l = |k| spectrum.l(k);
    let mut m = diag_real(&[
        (l(1) + l(5)) / 2.0,
        l(2),
        l(4),
        l(6),
        l(3),
        (l(1) + l(5)) / 2.0,
    ]);
    m[(0, 5)] = c64((l(1) - l(5)) / 2.0, 0.0);
    m[(5, 0)] = m[(0, 5)];
    DensityMatrix::new(m, (2, 3))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpuParams {
    pub q: f64,
    pub omega: f64,
    pub delta: f64,
}

impl EpuParams {
    pub fn new(spectrum: &Spectrum, e: f64) -> Self {
        let l = |k| spectrum.l(k);
        let d15 = l(1) - l(5);
        let s46 = 2.0 * (l(4) * l(6)).sqrt();
        // (λ₁−λ₅)² − (E+2√(λ₄λ₆))² in factored form, exactly 0 at E = e_MEMS
        let q = (d15 - s46 - e) * (d15 + s46 + e);
        EpuParams { q, omega: q.max(0.0), delta: d15 + delta(d15) }
    }
}

/// The EPU-minimal TGX state with spectrum λ and minimal-TGX I-concurrence E.
pub fn build_epu_min_tgx(spectrum: &Spectrum, e: f64) -> Result<(DensityMatrix, EpuParams)> {
    let e = check_physical(spectrum, e)?;
    let p = EpuParams::new(spectrum, e);
    let l = |k| spectrum.l(k);
    let so = p.omega.sqrt();
    let d15 = l(1) - l(5);
    let mut m = diag_real(&[
        (l(1) + l(5) + so) / 2.0,
        l(2),
        l(4),
        l(6),
        l(3),
        (l(1) + l(5) - so) / 2.0,
    ]);
    m[(0, 5)] = c64((d15 * d15 - p.omega).max(0.0).sqrt() / 2.0, 0.0);
    m[(5, 0)] = m[(0, 5)];
    Ok((DensityMatrix::new(m, (2, 3))?, p))
}

/// λ₁ − λ₃ − 2√(λ₂λ₄) for a 2×2 spectrum.
pub fn c_mems_2x2(spectrum: &Spectrum) -> f64 {
    let l = |k| spectrum.l(k);
    l(1) - l(3) - 2.0 * (l(2) * l(4)).sqrt()
}

/// The 2×2 EPU X state with spectrum λ and concurrence C.
pub fn build_epu_x_2x2(spectrum: &Spectrum, c: f64) -> Result<DensityMatrix> {
    spectrum.require_len(4)?;
    let c = check_range(c, c_mems_2x2(spectrum))?;
    let l = |k| spectrum.l(k);
    let d13 = l(1) - l(3);
    let q = d13 * d13 - (c + 2.0 * (l(2) * l(4)).sqrt()).powi(2);
    let omega = q.max(0.0);
    let so = omega.sqrt();
    let mut m = diag_real(&[(l(1) + l(3) + so) / 2.0, l(2), l(4), (l(1) + l(3) - so) / 2.0]);
    m[(0, 3)] = c64((d13 * d13 - omega).max(0.0).sqrt() / 2.0, 0.0);
    m[(3, 0)] = m[(0, 3)];
    DensityMatrix::new(m, (2, 2))
}

pub(crate) fn check_angle(x: f64) -> Result<f64> {
    if !x.is_finite() || !(-RANGE_SLACK..=FRAC_PI_2 + RANGE_SLACK).contains(&x) {
        return Err(Error::AngleOutOfRange(x));
    }
    Ok(x.clamp(0.0, FRAC_PI_2))
}

/// Eigenvectors ε₁ = cα|1⟩+sα|6⟩, ε₂ = |2⟩, ε₃ = |5⟩, ε₄ = cβ|3⟩+sβ|4⟩,
/// ε₅ = sα|1⟩−cα|6⟩, ε₆ = −sβ|3⟩+cβ|4⟩ weighted by λ₁..λ₆.
pub fn build_alpha_beta(spectrum: &Spectrum, alpha: f64, beta: f64) -> Result<DensityMatrix> {
    spectrum.require_len(6)?;
    let alpha = check_angle(alpha)?;
    let beta = check_angle(beta)?;
    let l = |k| spectrum.l(k);
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let mut m = diag_real(&[
        l(1) * ca * ca + l(5) * sa * sa,
        l(2),
        l(4) * cb * cb + l(6) * sb * sb,
        l(4) * sb * sb + l(6) * cb * cb,
        l(3),
        l(1) * sa * sa + l(5) * ca * ca,
    ]);
    let r16 = (l(1) - l(5)) / 2.0 * (2.0 * alpha).sin();
    let r34 = (l(4) - l(6)) / 2.0 * (2.0 * beta).sin();
    m[(0, 5)] = c64(r16, 0.0);
    m[(5, 0)] = c64(r16, 0.0);
    m[(2, 3)] = c64(r34, 0.0);
    m[(3, 2)] = c64(r34, 0.0);
    DensityMatrix::new(m, (2, 3))
}

/// A unitary U with U ρ U† = target, built from the two eigenbases with
/// degenerate clusters aligned by polar decomposition of their overlap.
pub fn epu_unitary(rho: &DensityMatrix, target: &DensityMatrix) -> Result<ComplexMatrix> {
    if rho.dim() != target.dim() {
        return Err(Error::SpectrumMismatch(f64::INFINITY));
    }
    let es = hermitian_eig(rho.matrix())?;
    let et = hermitian_eig(target.matrix())?;
    let gap = es
        .values
        .iter()
        .zip(&et.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if gap > 1e-9 {
        return Err(Error::SpectrumMismatch(gap));
    }
    let n = rho.dim();
    let mut src = es.vectors.clone();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && et.values[end - 1] - et.values[end] <= DEGENERACY_TOL {
            end += 1;
        }
        let k = end - start;
        let s = es.vectors.columns(start, k).into_owned();
        let t = et.vectors.columns(start, k).into_owned();
        let overlap = s.adjoint() * &t;
        let f = svd(&overlap);
        let w = f.u * f.v.adjoint();
        src.columns_mut(start, k).copy_from(&(s * w));
        start = end;
    }
    Ok(&et.vectors * src.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{haar_unitary, seeded_rng, unitarity_error};

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec()).unwrap()
    }

    fn uniform6() -> Spectrum {
        spec(&[1.0 / 6.0; 6])
    }

    #[test]
    fn quartets_in_order() {
        let q: Vec<[usize; 4]> = quartets().iter().map(|q| q.indices()).collect();
        assert_eq!(q, vec![[1, 2, 4, 5], [1, 3, 4, 6], [2, 3, 5, 6]]);
        assert!(Quartet::new([1, 2, 3, 6]).is_err());
    }

    #[test]
    fn quartet_pairs_differ_in_both_modes() {
        // level k ↔ (mode-1 label, mode-2 label)
        let labels = |k: usize| ((k - 1) / 3, (k - 1) % 3);
        for q in quartets() {
            for (a, b) in [q.outer(), q.inner()] {
                let (la, lb) = (labels(a), labels(b));
                assert!(la.0 != lb.0 && la.1 != lb.1, "{:?}", q);
            }
        }
    }

    #[test]
    fn spectrum_validation() {
        assert!(Spectrum::new(vec![0.3, 0.7]).is_err());
        assert!(Spectrum::new(vec![0.7, 0.4]).is_err());
        assert!(Spectrum::new(vec![1.1, -0.1]).is_err());
        let (s, moved) = Spectrum::sorted(vec![0.3, 0.7]).unwrap();
        assert_eq!(s.values(), &[0.7, 0.3]);
        assert!(moved);
    }

    #[test]
    fn extract_blocks() {
        let mm = DensityMatrix::maximally_mixed((2, 3));
        let b = subspace_extract(&mm, &[2, 5]).unwrap();
        assert!(max_abs(&(b - diag_real(&[1.0 / 6.0; 2]))) < 1e-16);
        let full = subspace_extract(&mm, &[1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(&full, mm.matrix());
        assert!(subspace_extract(&mm, &[5, 2]).is_err());
        assert!(subspace_extract(&mm, &[1, 7]).is_err());

        let (rho, _) = build_epu_min_tgx(&spec(&[0.7, 0.3, 0.0, 0.0, 0.0, 0.0]), 0.693).unwrap();
        let b = subspace_extract(&rho, &[1, 3, 4, 6]).unwrap();
        assert_eq!(b[(0, 3)], rho.at(1, 6));
        assert_eq!(b[(1, 2)], rho.at(3, 4));
    }

    #[test]
    fn classify_diagonal_and_epu() {
        let d = DensityMatrix::new(diag_real(&[0.4, 0.3, 0.1, 0.1, 0.05, 0.05]), (2, 3)).unwrap();
        let c = classify(&d);
        assert!(c.is_x && c.is_tgx && c.is_min_tgx && c.is_min_sgx);
        assert!(c.is_epu_min_tgx && c.is_mems_form && c.is_diagonal);

        let (rho, _) = build_epu_min_tgx(&spec(&[0.5, 0.2, 0.1, 0.1, 0.1, 0.0]), 0.2).unwrap();
        let c = classify(&rho);
        assert!(c.is_epu_min_tgx && c.is_min_tgx && c.is_tgx && c.is_min_sgx);
        assert!(!c.is_diagonal);
    }

    #[test]
    fn classify_dense_random() {
        let mut rng = seeded_rng(2);
        let u = haar_unitary(6, &mut rng);
        let rho = DensityMatrix::new(
            &u * diag_real(&[0.4, 0.2, 0.15, 0.1, 0.1, 0.05]) * u.adjoint(),
            (2, 3),
        )
        .unwrap();
        assert_eq!(classify(&rho), StateClass::default());
    }

    #[test]
    fn lpus() {
        let l = enumerate_lpus();
        assert_eq!(l.len(), 12);
        assert!(l.contains(&ComplexMatrix::identity(6, 6)));
        let mut swap13 = ComplexMatrix::zeros(3, 3);
        swap13[(2, 0)] = c64(1.0, 0.0);
        swap13[(1, 1)] = c64(1.0, 0.0);
        swap13[(0, 2)] = c64(1.0, 0.0);
        assert!(l.contains(&ComplexMatrix::identity(2, 2).kronecker(&swap13)));
        for i in 0..12 {
            assert!(unitarity_error(&l[i]) == 0.0);
            for j in 0..i {
                assert_ne!(l[i], l[j]);
            }
        }
    }

    #[test]
    fn lpu_closure_of_min_tgx() {
        let rho = build_alpha_beta(&spec(&[0.4, 0.2, 0.15, 0.1, 0.1, 0.05]), 0.6, 0.4).unwrap();
        for u in enumerate_lpus() {
            assert!(classify(&rho.conjugate(&u).unwrap()).is_min_tgx);
        }
    }

    #[test]
    fn me_tgx_bases() {
        let s = me_tgx_states();
        assert_eq!(s.len(), 12);
        let mut supports: Vec<(usize, usize)> = s.iter().map(|k| k.levels).collect();
        supports.sort();
        supports.dedup();
        assert_eq!(supports, ME_TGX_TUPLES.to_vec());
        assert_eq!(s[0].levels, (1, 5));
        assert!((s[0].ket[0].re - FRAC_1_SQRT_2).abs() < 1e-16);
        for col in [&s[..6], &s[6..]] {
            for (i, a) in col.iter().enumerate() {
                for (j, b) in col.iter().enumerate() {
                    let ov = a.ket.dotc(&b.ket).norm();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ov - want).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn mems_examples() {
        let pure = build_mems(&spec(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0])).unwrap();
        let mut phi = Ket::zeros(6);
        phi[0] = c64(FRAC_1_SQRT_2, 0.0);
        phi[5] = c64(FRAC_1_SQRT_2, 0.0);
        assert!(max_abs(&(pure.matrix() - outer(&phi, &phi))) < 1e-15);

        let mixed = build_mems(&uniform6()).unwrap();
        assert!(max_abs(&(mixed.matrix() - ComplexMatrix::identity(6, 6).unscale(6.0))) < 1e-16);

        let s = spec(&[0.5, 0.3, 0.1, 0.1, 0.0, 0.0]);
        let m = build_mems(&s).unwrap();
        assert!((m.at(1, 6).re - 0.25).abs() < 1e-16);
        assert!((m.d(1) - 0.25).abs() < 1e-16 && (m.d(3) - 0.1).abs() < 1e-16);
        for (a, b) in m.eigenvalues().iter().zip(s.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mems_eigenvalues_degenerate() {
        let m = build_mems(&spec(&[0.5, 0.5, 0.0, 0.0, 0.0, 0.0])).unwrap();
        let v = m.eigenvalues();
        assert!((v[0] - 0.5).abs() < 1e-12 && (v[1] - 0.5).abs() < 1e-12);
        assert!(v[2..].iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn epu_examples() {
        let s = spec(&[0.7, 0.3, 0.0, 0.0, 0.0, 0.0]);
        let (rho, p) = build_epu_min_tgx(&s, 0.693).unwrap();
        let v = rho.eigenvalues();
        assert!((v[0] - 0.7).abs() < 1e-12 && (v[1] - 0.3).abs() < 1e-12);
        assert!(p.q > 0.0);

        let (rho, p) = build_epu_min_tgx(&spec(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]), 0.0).unwrap();
        assert_eq!((p.q, p.omega), (1.0, 1.0));
        assert!(max_abs(&(rho.matrix() - diag_real(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]))) < 1e-16);

        let (rho, p) = build_epu_min_tgx(&uniform6(), 0.0).unwrap();
        assert!((p.q + 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(p.omega, 0.0);
        assert!(max_abs(&(rho.matrix() - ComplexMatrix::identity(6, 6).unscale(6.0))) < 1e-16);
    }

    #[test]
    fn epu_range_checks() {
        let s = spec(&[0.7, 0.3, 0.0, 0.0, 0.0, 0.0]);
        assert!(build_epu_min_tgx(&s, 0.7).is_ok());
        assert!(matches!(
            build_epu_min_tgx(&s, 0.71),
            Err(Error::UnphysicalEntanglement { .. })
        ));
        assert!(build_epu_min_tgx(&s, -0.01).is_err());
        assert!(build_epu_min_tgx(&uniform6(), 0.01).is_err());
    }

    #[test]
    fn epu_x_2x2_examples() {
        let bell = build_epu_x_2x2(&spec(&[1.0, 0.0, 0.0, 0.0]), 1.0).unwrap();
        let want = from_bell();
        assert!(max_abs(&(bell.matrix() - want)) < 1e-15);

        let m = build_epu_x_2x2(&spec(&[0.5, 0.5, 0.0, 0.0]), 0.5).unwrap();
        assert!((m.at(1, 4).re - 0.25).abs() < 1e-16);
        assert!((m.d(1) - m.d(4)).abs() < 1e-16);

        let m = build_epu_x_2x2(&spec(&[0.25; 4]), 0.0).unwrap();
        assert!(classify(&m).is_diagonal);
        assert!(build_epu_x_2x2(&spec(&[0.25; 4]), 0.1).is_err());
    }

    fn from_bell() -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            m[(i, j)] = c64(0.5, 0.0);
        }
        m
    }

    #[test]
    fn alpha_beta_special_angles() {
        let s = spec(&[0.4, 0.2, 0.15, 0.1, 0.1, 0.05]);
        let ab = build_alpha_beta(&s, std::f64::consts::FRAC_PI_4, 0.0).unwrap();
        let mems = build_mems(&s).unwrap();
        assert!(max_abs(&(ab.matrix() - mems.matrix())) < 1e-12);

        let z = build_alpha_beta(&s, 0.0, 0.0).unwrap();
        assert!(max_abs(&(z.matrix() - diag_real(&[0.4, 0.2, 0.1, 0.05, 0.15, 0.1]))) < 1e-16);
        assert!(matches!(build_alpha_beta(&s, 2.0, 0.0), Err(Error::AngleOutOfRange(_))));

        let v = build_alpha_beta(&s, 0.3, 1.1).unwrap().eigenvalues();
        for (a, b) in v.iter().zip(s.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn epu_unitary_cases() {
        let s = spec(&[0.4, 0.25, 0.15, 0.1, 0.07, 0.03]);
        let (target, _) = build_epu_min_tgx(&s, 0.1).unwrap();
        let u = epu_unitary(&target, &target).unwrap();
        assert!(max_abs(&(&u - ComplexMatrix::identity(6, 6))) < 1e-10);

        let mut rng = seeded_rng(8);
        let h = haar_unitary(6, &mut rng);
        let rot = target.conjugate(&h).unwrap();
        let u = epu_unitary(&rot, &target).unwrap();
        assert!(unitarity_error(&u) < 1e-10);
        assert!(max_abs(&(&u * rot.matrix() * u.adjoint() - target.matrix())) <= 1e-8);

        let s2 = spec(&[0.6, 0.2, 0.1, 0.1, 0.0, 0.0]);
        let mems = build_mems(&s2).unwrap();
        let (t2, _) = build_epu_min_tgx(&s2, e_mems(&s2)).unwrap();
        let u = epu_unitary(&mems, &t2).unwrap();
        assert!(max_abs(&(&u * mems.matrix() * u.adjoint() - t2.matrix())) <= 1e-8);

        let other = build_mems(&spec(&[0.5, 0.5, 0.0, 0.0, 0.0, 0.0])).unwrap();
        assert!(matches!(epu_unitary(&other, &t2), Err(Error::SpectrumMismatch(_))));
    }

    #[test]
    fn epu_unitary_degenerate() {
        let s = spec(&[0.3, 0.3, 0.2, 0.2, 0.0, 0.0]);
        let (target, _) = build_epu_min_tgx(&s, 0.1).unwrap();
        let mut rng = seeded_rng(15);
        let rot = target.conjugate(&haar_unitary(6, &mut rng)).unwrap();
        let u = epu_unitary(&rot, &target).unwrap();
        assert!(max_abs(&(&u * rot.matrix() * u.adjoint() - target.matrix())) <= 1e-8);
    }

    #[test]
    fn e_mems_and_physical() {
        assert_eq!(e_mems(&spec(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0])), 1.0);
        assert!((e_mems(&uniform6()) + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(e_mems(&spec(&[0.5, 0.5, 0.0, 0.0, 0.0, 0.0])), 0.5);
        let s = spec(&[0.7, 0.3, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(physical_entanglement(&s, 0.0).unwrap(), 0.0);
        assert!((physical_entanglement(&s, 0.99).unwrap() - 0.693).abs() < 1e-15);
        assert_eq!(
            physical_entanglement(&spec(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]), 1.0).unwrap(),
            1.0
        );
        assert!(matches!(physical_entanglement(&s, 1.5), Err(Error::EtaOutOfRange(_))));
    }

    #[test]
    fn random_spectrum_is_valid() {
        let mut rng = seeded_rng(0);
        for rank in 1..=6 {
            let s = random_spectrum(6, rank, &mut rng);
            assert!(Spectrum::new(s.values().to_vec()).is_ok());
            assert_eq!(s.values().iter().filter(|&&x| x > 0.0).count(), rank);
        }
    }
}
