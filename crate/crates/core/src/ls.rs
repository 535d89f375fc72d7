//! Lewenstein-Sanpera decompositions ρ = p_E ρ_E + (1 − p_E) ρ_S with pure ρ_E and
//! separable ρ_S: a closed form for the EPU-minimal TGX family and a numeric
//! route through the Takagi factorization of τ for any minimal SGX state.

use crate::error::{Error, Result};
use crate::measures::{block_concurrence, pure_i_unchecked, sigma_yy};
use crate::numerics::{
    basis_ket, c64, delta, hermitian_eig, negativity_of, outer, sign_normalize,
    takagi_symmetric, ComplexMatrix, Ket,
};
use crate::states::{
    build_epu_min_tgx, check_physical, classify, matches_min_sgx, quartets, subspace_extract,
    DensityMatrix, Quartet, Spectrum,
};

/// σ₂⊗σ₂ embedded in a quartet of the 2×3 level set, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinFlip {
    pub matrix: ComplexMatrix,
}

impl SpinFlip {
    pub fn for_quartet(q: &Quartet) -> Self {
        let yy = sigma_yy();
        let idx = q.indices();
        let mut m = ComplexMatrix::zeros(6, 6);
        for a in 0..4 {
            for b in 0..4 {
                m[(idx[a] - 1, idx[b] - 1)] = yy[(a, b)];
            }
        }
        Self { matrix: m }
    }

    /// The {1,3,4,6} embedding used by the EPU-minimal TGX family.
    pub fn standard() -> Self {
        Self::for_quartet(&quartets()[1])
    }

    /// ⟨a|S|b*⟩.
    pub fn tilde_overlap(&self, a: &Ket, b: &Ket) -> num_complex::Complex64 {
        a.dotc(&(&self.matrix * b.conjugate()))
    }
}

#[derive(Debug, Clone)]
pub struct LSDecomposition {
    pub p_e: f64,
    pub rho_e: DensityMatrix,
    /// Separable part; the zero matrix when p_E = 1 since it then carries no weight.
    pub rho_s: ComplexMatrix,
    /// ξ₁ is the largest; the order of the other three is unspecified.
    pub xi: [f64; 4],
    /// Subnormalized Wootters kets with Σ|x_a⟩⟨x_a| equal to the quartet block.
    pub x_kets: Vec<Ket>,
    /// (N₁, N₂) of the closed form; absent on the numeric route.
    pub norms: Option<(f64, f64)>,
    /// Entanglement quartet; absent for 2×2 input.
    pub quartet: Option<Quartet>,
    mode_dims: (usize, usize),
}

impl LSDecomposition {
    /// max{0, ξ₁−ξ₂−ξ₃−ξ₄}.
    pub fn concurrence(&self) -> f64 {
        (self.xi[0] - self.xi[1] - self.xi[2] - self.xi[3]).max(0.0)
    }

    /// Entanglement of the pure part ρ_E.
    pub fn entangled_part_entanglement(&self) -> f64 {
        let x = &self.x_kets[0];
        let n = x.norm();
        if n == 0.0 {
            return 0.0;
        }
        if self.mode_dims == (2, 3) {
            pure_i_unchecked(&x.unscale(n))
        } else {
            block_concurrence(self.rho_e.matrix())
        }
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.rho_e.matrix().scale(self.p_e) + self.rho_s.scale(1.0 - self.p_e)
    }

    pub fn separable_negativity(&self) -> f64 {
        negativity_of(&self.rho_s, self.mode_dims)
    }

    pub fn rho_s_state(&self) -> Option<DensityMatrix> {
        DensityMatrix::new(self.rho_s.clone(), self.mode_dims).ok()
    }

    pub fn mode_dims(&self) -> (usize, usize) {
        self.mode_dims
    }
}

/// Closed-form ξ for the EPU-minimal TGX state of (λ, E).
pub fn xi_explicit(spectrum: &Spectrum, e: f64) -> Result<[f64; 4]> {
    let e = check_physical(spectrum, e)?;
    let k = Closed::new(spectrum, e);
    let x3 = (spectrum.l(4) * spectrum.l(6)).sqrt();
    Ok([k.xi1, k.xi2, x3, x3])
}

// Shared closed-form quantities. With s = √(Δ²−Ω)/Δ and R = √(4λ₁λ₅ + (λ₁−λ₅)²s²):
// ξ₁ = (R + (λ₁−λ₅)s)/2, ξ₂ = 2λ₁λ₅/(R + (λ₁−λ₅)s), and B₁ = B₂ = (R − (λ₁+λ₅)s)/2
// rewritten as 2λ₁λ₅Ω/(Δ²(R + (λ₁+λ₅)s)) to avoid cancellation near Ω = 0.
struct Closed {
    omega: f64,
    delta: f64,
    xi1: f64,
    xi2: f64,
    b: f64,
    a: f64,
    t: f64,
}

impl Closed {
    fn new(spectrum: &Spectrum, e: f64) -> Self {
        let p = crate::states::EpuParams::new(spectrum, e);
        let (l1, l5) = (spectrum.l(1), spectrum.l(5));
        let dd = p.delta;
        let s = (dd * dd - p.omega).max(0.0).sqrt() / dd;
        let r = (4.0 * l1 * l5 + (l1 - l5).powi(2) * s * s).sqrt();
        let xi1 = (r + (l1 - l5) * s) / 2.0;
        let xi2 = 2.0 * l1 * l5 / (r + (l1 - l5) * s);
        let b = 2.0 * l1 * l5 * p.omega / (dd * dd * (r + (l1 + l5) * s));
        let a = ((l1 * l5 * p.omega).sqrt() + delta(l5 * p.omega) * dd) / dd;
        // B/A, finite and tending to 0 as λ₅Ω → 0, so no delta guard is needed
        let t = 2.0 * (l1 * l5 * p.omega).sqrt() / (dd * (r + (l1 + l5) * s));
        Closed { omega: p.omega, delta: dd, xi1, xi2, b, a, t }
    }

    // (cos, sin) mixing u₁ and u₃ in x₁ ∝ i(cos u₁ − sin u₃), x₂ ∝ sin u₁ + cos u₃.
    fn mixing(&self) -> (f64, f64) {
        let n = (1.0 + self.t * self.t).sqrt();
        (1.0 / n, self.t / n)
    }
}

/// Closed-form Wootters kets x₁..x₄ and (N₁, N₂) for the EPU-minimal TGX state of (λ, E).
pub fn wootters_xkets_explicit(spectrum: &Spectrum, e: f64) -> Result<(Vec<Ket>, f64, f64)> {
    let e = check_physical(spectrum, e)?;
    let k = Closed::new(spectrum, e);
    let l = |i| spectrum.l(i);
    let so = k.omega.sqrt();
    let dd = k.delta;
    let cp = ((dd + so) / (2.0 * dd)).max(0.0).sqrt();
    let cm = ((dd - so) / (2.0 * dd)).max(0.0).sqrt();

    let mut u1 = Ket::zeros(6);
    u1[0] = c64(l(1).sqrt() * cp, 0.0);
    u1[5] = c64(l(1).sqrt() * cm, 0.0);
    let mut u3 = Ket::zeros(6);
    u3[0] = c64(l(5).sqrt() * cm, 0.0);
    u3[5] = c64(-l(5).sqrt() * cp, 0.0);
    let u2 = basis_ket(6, 2) * c64(l(4).sqrt(), 0.0);
    let u4 = basis_ket(6, 3) * c64(l(6).sqrt(), 0.0);

    let (ca, sa) = k.mixing();
    let i = c64(0.0, 1.0);
    let r2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut kets = vec![
        (&u1 * c64(ca, 0.0) - &u3 * c64(sa, 0.0)) * i,
        &u1 * c64(sa, 0.0) + &u3 * c64(ca, 0.0),
        (&u2 + &u4) * c64(r2, 0.0),
        (&u2 - &u4) * c64(0.0, r2),
    ];
    kets.iter_mut().for_each(sign_normalize);
    let n = (k.b * k.b + k.a * k.a).sqrt();
    Ok((kets, n, n))
}

/// Closed-form LS decomposition of the EPU-minimal TGX state of (λ, E).
pub fn ls_explicit(spectrum: &Spectrum, e: f64) -> Result<LSDecomposition> {
    let e = check_physical(spectrum, e)?;
    let xi = xi_explicit(spectrum, e)?;
    let (kets, n1, n2) = wootters_xkets_explicit(spectrum, e)?;
    let c = (xi[0] - xi[1] - xi[2] - xi[3]).max(0.0);
    let d1 = delta(xi[0]);
    let x1n = kets[0].norm_squared();
    let p_e = c * x1n / (xi[0] + d1);
    let rho_e = DensityMatrix::new(outer(&kets[0], &kets[0]).unscale(x1n), (2, 3))?;

    let l = |i| spectrum.l(i);
    let mut bracket = outer(&basis_ket(6, 1), &basis_ket(6, 1)).scale(l(2))
        + outer(&basis_ket(6, 4), &basis_ket(6, 4)).scale(l(3))
        + outer(&kets[0], &kets[0]).scale((xi[0].min(xi[1] + xi[2] + xi[3]) + d1) / (xi[0] + d1));
    for x in &kets[1..] {
        bracket += outer(x, x);
    }
    let rho_s = bracket.unscale(1.0 - p_e + delta(1.0 - p_e));
    Ok(LSDecomposition {
        p_e,
        rho_e,
        rho_s,
        xi,
        x_kets: kets,
        norms: Some((n1, n2)),
        quartet: Some(quartets()[1]),
        mode_dims: (2, 3),
    })
}

// Subnormalized eigenvectors of a 4×4 block as the columns of A, descending.
fn subnormalized_eigvecs(block: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(block)?;
    let mut a = eig.vectors.clone();
    for (k, &v) in eig.values.iter().enumerate() {
        let s = v.max(0.0).sqrt();
        a.column_mut(k).scale_mut(s);
    }
    Ok(a)
}

fn tau_of_block(a: &ComplexMatrix) -> ComplexMatrix {
    let t = a.adjoint() * sigma_yy() * a.conjugate();
    (&t + t.transpose()).scale(0.5)
}

fn form_error(rho: &DensityMatrix) -> Error {
    if classify(rho).is_tgx {
        Error::AmbiguousQuartet
    } else {
        Error::NotMinimalSgx
    }
}

/// τ_{k,l} = ⟨u_k|S|u_l*⟩ over the subnormalized eigenvectors of the quartet block of ρ.
pub fn tau_matrix(rho: &DensityMatrix, e: &Quartet) -> Result<ComplexMatrix> {
    if rho.mode_dims() != (2, 3) || !classify(rho).is_min_sgx {
        return Err(form_error(rho));
    }
    if !matches_min_sgx(rho.matrix(), e.position()) {
        return Err(Error::AmbiguousQuartet);
    }
    let block = subspace_extract(rho, &e.indices())?;
    Ok(tau_of_block(&subnormalized_eigvecs(&block)?))
}

/// The quartet hosting the coherence of a minimal SGX state. When several
/// templates match, the larger block concurrence wins, then the larger
/// off-diagonal weight, then the order {1,3,4,6}, {1,2,4,5}, {2,3,5,6}.
pub fn entanglement_quartet(rho: &DensityMatrix) -> Result<Quartet> {
    if rho.mode_dims() != (2, 3) || !classify(rho).is_min_sgx {
        return Err(form_error(rho));
    }
    let qs = quartets();
    let mut best: Option<(f64, f64, Quartet)> = None;
    for v in [1, 0, 2] {
        if !matches_min_sgx(rho.matrix(), v) {
            continue;
        }
        let block = subspace_extract(rho, &qs[v].indices())?;
        let conc = block_concurrence(&block);
        let coh: f64 = (0..4)
            .flat_map(|i| (0..4).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| block[(i, j)].norm())
            .sum();
        let better = match best {
            None => true,
            Some((bc, bh, _)) => conc > bc + 1e-12 || ((conc - bc).abs() <= 1e-12 && coh > bh + 1e-12),
        };
        if better {
            best = Some((conc, coh, qs[v]));
        }
    }
    Ok(best.expect("min SGX matches some template").2)
}

/// Numeric LS decomposition of a minimal SGX state, or of any 2×2 state.
pub fn ls_numeric(rho: &DensityMatrix) -> Result<LSDecomposition> {
    match rho.mode_dims() {
        (2, 2) => ls_on_block(rho, None),
        _ => {
            let q = entanglement_quartet(rho)?;
            ls_on_block(rho, Some(q))
        }
    }
}

fn ls_on_block(rho: &DensityMatrix, q: Option<Quartet>) -> Result<LSDecomposition> {
    let n = rho.dim();
    let levels: Vec<usize> = match q {
        Some(q) => q.indices().to_vec(),
        None => (1..=4).collect(),
    };
    let block = subspace_extract(rho, &levels)?;
    let a = subnormalized_eigvecs(&block)?;
    let tak = takagi_symmetric(&tau_of_block(&a))?;
    let x4 = &a * &tak.unitary;

    let embed = |col: usize| -> Ket {
        let mut k = Ket::zeros(n);
        for (r, &lvl) in levels.iter().enumerate() {
            k[lvl - 1] = x4[(r, col)];
        }
        sign_normalize(&mut k);
        k
    };
    let x_kets: Vec<Ket> = (0..4).map(embed).collect();
    let xi = [tak.values[0], tak.values[1], tak.values[2], tak.values[3]];
    let c = (xi[0] - xi[1] - xi[2] - xi[3]).max(0.0);
    let x1n = x_kets[0].norm_squared();
    let p_e = c * x1n / (xi[0] + delta(xi[0]));
    let rho_e = if x1n > 1e-14 {
        outer(&x_kets[0], &x_kets[0]).unscale(x1n)
    } else {
        let e = basis_ket(n, levels[0] - 1);
        outer(&e, &e)
    };
    let rho_s = (rho.matrix() - rho_e.scale(p_e)).unscale(1.0 - p_e + delta(1.0 - p_e));
    Ok(LSDecomposition {
        p_e,
        rho_e: DensityMatrix::new(rho_e, rho.mode_dims())?,
        rho_s,
        xi,
        x_kets,
        norms: None,
        quartet: q,
        mode_dims: rho.mode_dims(),
    })
}

/// Residuals of an LS decomposition: reconstruction, p_E·E(ρ_E) against
/// max{0, ξ₁−ξ₂−ξ₃−ξ₄}, and negativity of ρ_S.
pub fn ls_residuals(rho: &DensityMatrix, ls: &LSDecomposition) -> [f64; 3] {
    let rec = crate::numerics::max_abs(&(ls.reconstruct() - rho.matrix()));
    let ident = (ls.p_e * ls.entangled_part_entanglement() - ls.concurrence()).abs();
    [rec, ident, ls.separable_negativity()]
}

/// The EPU-minimal TGX state the explicit route decomposes, for a given (λ, E).
pub fn explicit_state(spectrum: &Spectrum, e: f64) -> Result<DensityMatrix> {
    Ok(build_epu_min_tgx(spectrum, e)?.0)
}
