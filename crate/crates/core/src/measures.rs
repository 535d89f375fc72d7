//! Entanglement functionals for 2×2 and 2×3 states.

use std::f64::consts::FRAC_PI_4;

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{
    diag_real, from_real, haar_unitary, hermitian_eig, singular_values, ComplexMatrix, Ket,
    DELTA_TOL,
};
use crate::states::{
    check_angle, check_physical, classify, quartets, subspace_extract, DensityMatrix, Quartet,
    Spectrum,
};

const NORM_TOL: f64 = 1e-10;

/// σ₂⊗σ₂ in the computational basis.
pub fn sigma_yy() -> ComplexMatrix {
    from_real(
        4,
        4,
        &[
            0.0, 0.0, 0.0, -1.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0,
        ],
    )
}

/// Descending ξ of a 4×4 positive block, i.e. the square roots of the eigenvalues
/// of ρρ̃, obtained as the singular values of AᵀSA with ρ = AA†.
pub fn spin_flip_xi(block: &ComplexMatrix) -> [f64; 4] {
    let eig = hermitian_eig(&((block + block.adjoint()).scale(0.5))).expect("Hermitian block");
    let mut a = eig.vectors.clone();
    for (k, &v) in eig.values.iter().enumerate() {
        let s = v.max(0.0).sqrt();
        for r in 0..4 {
            a[(r, k)] *= s;
        }
    }
    let tau = a.transpose() * sigma_yy() * &a;
    let s = singular_values(&tau);
    [s[0], s[1], s[2], s[3]]
}

/// Concurrence max{0, ξ₁−ξ₂−ξ₃−ξ₄} of a possibly subnormalized 4×4 block.
pub fn block_concurrence(block: &ComplexMatrix) -> f64 {
    if block.trace().re.abs() <= DELTA_TOL {
        return 0.0;
    }
    let x = spin_flip_xi(block);
    (x[0] - x[1] - x[2] - x[3]).max(0.0)
}

pub fn concurrence_2x2(rho: &DensityMatrix) -> Result<f64> {
    if rho.mode_dims() != (2, 2) {
        return Err(Error::InvalidState("expected a 2x2 system".into()));
    }
    Ok(block_concurrence(rho.matrix()))
}

pub fn x_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.mode_dims() != (2, 2) || !classify(rho).is_x {
        return Err(Error::NotXForm);
    }
    Ok(x_formula(rho, [1, 2, 3, 4]))
}

// 2max{0, |ρ_ad| − √(ρ_bb ρ_cc), |ρ_bc| − √(ρ_aa ρ_dd)} on parent indices.
fn x_formula(rho: &DensityMatrix, [a, b, c, d]: [usize; 4]) -> f64 {
    let t1 = rho.abs(a, d) - (rho.d(b) * rho.d(c)).max(0.0).sqrt();
    let t2 = rho.abs(b, c) - (rho.d(a) * rho.d(d)).max(0.0).sqrt();
    2.0 * t1.max(t2).max(0.0)
}

pub fn quartet_x_concurrence(rho: &DensityMatrix, q: &Quartet) -> Result<f64> {
    if rho.mode_dims() != (2, 3) || !classify(rho).is_tgx {
        return Err(Error::NotTgxForm);
    }
    Ok(x_formula(rho, q.indices()))
}

fn require_2x3(rho: &DensityMatrix) -> Result<()> {
    if rho.mode_dims() != (2, 3) {
        return Err(Error::InvalidState("expected a 2x3 system".into()));
    }
    Ok(())
}

/// Concurrences of the three unnormalized quartet blocks, in `quartets()` order.
pub fn subspace_concurrence_vector(rho: &DensityMatrix) -> Result<[f64; 3]> {
    require_2x3(rho)?;
    let mut out = [0.0; 3];
    for (k, q) in quartets().iter().enumerate() {
        out[k] = block_concurrence(&subspace_extract(rho, &q.indices())?);
    }
    Ok(out)
}

fn require_unit(psi: &Ket) -> Result<()> {
    let n = psi.norm();
    if psi.len() != 6 || (n - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(n));
    }
    Ok(())
}

/// 2√(|a₁a₅−a₂a₄|² + |a₁a₆−a₃a₄|² + |a₂a₆−a₃a₅|²) for a unit 2×3 ket.
pub fn pure_i_concurrence(psi: &Ket) -> Result<f64> {
    require_unit(psi)?;
    Ok(pure_i_unchecked(psi))
}

pub(crate) fn pure_i_unchecked(a: &Ket) -> f64 {
    let m = |i: usize, j: usize, k: usize, l: usize| (a[i] * a[j] - a[k] * a[l]).norm_sqr();
    2.0 * (m(0, 4, 1, 3) + m(0, 5, 2, 3) + m(1, 5, 2, 4)).sqrt()
}

/// Tr ρ_A² of the qubit reduction of a unit 2×3 ket.
pub fn reduction_purity(psi: &Ket) -> Result<f64> {
    require_unit(psi)?;
    let mut r = [[num_complex::Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in r.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            for k in 0..3 {
                *x += psi[3 * i + k] * psi[3 * j + k].conj();
            }
        }
    }
    Ok(r.iter().flatten().map(|z| z.norm_sqr()).sum())
}

pub fn min_tgx_i_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.mode_dims() != (2, 3) || !classify(rho).is_min_tgx {
        return Err(Error::NotMinimalTgx);
    }
    let t = |i, j, k, l| rho.abs(i, j) - (rho.d(k) * rho.d(l)).max(0.0).sqrt();
    let terms = [
        t(1, 5, 2, 4),
        t(2, 4, 1, 5),
        t(1, 6, 3, 4),
        t(3, 4, 1, 6),
        t(2, 6, 3, 5),
        t(3, 5, 2, 6),
    ];
    Ok(2.0 * terms.iter().fold(0.0f64, |a, &b| a.max(b)))
}

pub fn min_sgx_i_concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.mode_dims() != (2, 3) || !classify(rho).is_min_sgx {
        return Err(Error::NotMinimalSgx);
    }
    Ok(subspace_concurrence_vector(rho)?.iter().fold(0.0, |a, &b| a.max(b)))
}

pub fn mems_entanglement(spectrum: &Spectrum) -> f64 {
    crate::states::e_mems(spectrum).max(0.0)
}

/// 2max{0, (λ₁−λ₅)/2·s₂α − √(ρ₃₃ρ₄₄), (λ₄−λ₆)/2·s₂β − √(ρ₁₁ρ₆₆)} for the α,β family.
pub fn e_alpha_beta(spectrum: &Spectrum, alpha: f64, beta: f64) -> Result<f64> {
    if spectrum.len() != 6 {
        return Err(Error::InvalidSpectrum("expected 6 eigenvalues".into()));
    }
    let alpha = check_angle(alpha)?;
    let beta = check_angle(beta)?;
    let l = |k| spectrum.l(k);
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let r11 = l(1) * ca * ca + l(5) * sa * sa;
    let r66 = l(1) * sa * sa + l(5) * ca * ca;
    let r33 = l(4) * cb * cb + l(6) * sb * sb;
    let r44 = l(4) * sb * sb + l(6) * cb * cb;
    let t1 = (l(1) - l(5)) / 2.0 * (2.0 * alpha).sin() - (r33 * r44).max(0.0).sqrt();
    let t2 = (l(4) - l(6)) / 2.0 * (2.0 * beta).sin() - (r11 * r66).max(0.0).sqrt();
    Ok(2.0 * t1.max(t2).max(0.0))
}

/// The α with e_alpha_beta(λ, α, 0) = E.
pub fn alpha_solve(spectrum: &Spectrum, e: f64) -> Result<f64> {
    let e = check_physical(spectrum, e)?;
    let l = |k| spectrum.l(k);
    let d15 = l(1) - l(5);
    if d15.abs() <= DELTA_TOL {
        return Ok(FRAC_PI_4);
    }
    let arg = (e + 2.0 * (l(4) * l(6)).sqrt()) / d15;
    // With e_MEMS < 0 only E = 0 is physical and every α attains it; the clamp picks π/4.
    if arg > 1.0 + DELTA_TOL && e > DELTA_TOL {
        return Err(Error::UnphysicalEntanglement { value: e, max: mems_entanglement(spectrum) });
    }
    Ok(0.5 * arg.clamp(0.0, 1.0).asin())
}

/// max{0, λ₁−λ₄−2√(λ₂λ₆)−2√(λ₃λ₅)}.
pub fn gen_concurrence_max(spectrum: &Spectrum) -> f64 {
    let l = |k| spectrum.l(k);
    (l(1) - l(4) - 2.0 * (l(2) * l(6)).sqrt() - 2.0 * (l(3) * l(5)).sqrt()).max(0.0)
}

/// σ₁ − Σ_{l≥2} σ_l of √Λ V √Λ for one unitary V.
pub fn gen_preconcurrence(spectrum: &Spectrum, v: &ComplexMatrix) -> f64 {
    let sq: Vec<f64> = spectrum.values().iter().map(|x| x.sqrt()).collect();
    let d = diag_real(&sq);
    let s = singular_values(&(&d * v * &d));
    s[0] - s[1..].iter().sum::<f64>()
}

/// Largest generalized pre-concurrence over `samples` Haar-random V.
pub fn sampled_gen_preconcurrence<R: Rng + ?Sized>(
    spectrum: &Spectrum,
    samples: usize,
    rng: &mut R,
) -> f64 {
    let n = spectrum.len();
    (0..samples.max(1))
        .map(|_| gen_preconcurrence(spectrum, &haar_unitary(n, rng)))
        .fold(f64::NEG_INFINITY, f64::max)
}
