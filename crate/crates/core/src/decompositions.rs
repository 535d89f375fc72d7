//! Pure-state decompositions generated by unitary mixing of the eigenensemble,
//! and the minimum-average search used to probe convex-roof values.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{
    c64, haar_unitary, hermitian_eig, seeded_rng, unitarity_error, ComplexMatrix, Ket,
};
use crate::measures::pure_i_unchecked;
use crate::states::DensityMatrix;

const RANK_TOL: f64 = 1e-12;
const ZERO_WEIGHT: f64 = 1e-14;

#[derive(Debug, Clone)]
pub struct PureDecomposition {
    pub weights: Vec<f64>,
    /// Unit kets; members with weight ≤ 1e-14 carry a zero ket.
    pub kets: Vec<Ket>,
}

impl PureDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.kets.first().map_or(0, |k| k.len());
        let mut m = ComplexMatrix::zeros(n, n);
        for (p, k) in self.weights.iter().zip(&self.kets) {
            m += (k * k.adjoint()).scale(*p);
        }
        m
    }
}

pub fn rank(rho: &DensityMatrix) -> usize {
    rho.eigenvalues().iter().filter(|&&x| x > RANK_TOL).count()
}

/// |w_j⟩ ∝ Σ_k U_{j,k} √λ_k |e_k⟩ over the r nonzero eigenpairs, p_j = Σ_k |U_{j,k}|² λ_k.
/// Only the first r columns of the D×D unitary enter.
pub fn decompose(rho: &DensityMatrix, u: &ComplexMatrix) -> Result<PureDecomposition> {
    let dev = if u.is_square() { unitarity_error(u) } else { f64::INFINITY };
    if dev > 1e-10 {
        return Err(Error::NotUnitary(dev));
    }
    let eig = hermitian_eig(rho.matrix())?;
    let r = eig.values.iter().filter(|&&x| x > RANK_TOL).count();
    let d = u.nrows();
    if d < r {
        return Err(Error::DTooSmall { d, rank: r });
    }
    let n = rho.dim();
    let mut weights = Vec::with_capacity(d);
    let mut kets = Vec::with_capacity(d);
    for j in 0..d {
        let mut w = Ket::zeros(n);
        for k in 0..r {
            w += eig.vector(k) * (u[(j, k)] * eig.values[k].sqrt());
        }
        let p = w.norm_squared();
        if p > ZERO_WEIGHT {
            kets.push(w.unscale(p.sqrt()));
        } else {
            kets.push(Ket::zeros(n));
        }
        weights.push(p);
    }
    Ok(PureDecomposition { weights, kets })
}

/// [[cθ, sθe^{iφ}], [−sθe^{−iφ}, cθ]].
pub fn mixer_2(theta: f64, phi: f64) -> Result<ComplexMatrix> {
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::AngleOutOfRange(theta));
    }
    if !(0.0..2.0 * PI).contains(&phi) {
        return Err(Error::AngleOutOfRange(phi));
    }
    let (s, c) = theta.sin_cos();
    let e = c64(0.0, phi).exp();
    Ok(ComplexMatrix::from_row_slice(
        2,
        2,
        &[c64(c, 0.0), e * s, -e.conj() * s, c64(c, 0.0)],
    ))
}

/// Σ_j p_j E(|w_j⟩); zero-weight members contribute nothing.
pub fn average_entanglement(dec: &PureDecomposition) -> f64 {
    dec.weights
        .iter()
        .zip(&dec.kets)
        .filter(|(p, _)| **p > ZERO_WEIGHT)
        .map(|(p, k)| p * pure_i_unchecked(k))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MixerParams {
    /// Only D = 1, for pure input.
    Trivial,
    Angles { theta: f64, phi: f64 },
    Haar { d: usize, seed: u64 },
}

impl MixerParams {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            MixerParams::Trivial => vec![],
            MixerParams::Angles { theta, phi } => vec![theta, phi],
            MixerParams::Haar { seed, .. } => vec![seed as f64],
        }
    }

    pub fn unitary(&self) -> ComplexMatrix {
        match *self {
            MixerParams::Trivial => ComplexMatrix::identity(1, 1),
            MixerParams::Angles { theta, phi } => mixer_2(theta, phi).expect("grid angles in range"),
            MixerParams::Haar { d, seed } => haar_unitary(d, &mut seeded_rng(seed)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchSample {
    pub params: MixerParams,
    pub average: f64,
}

/// The (θ, φ) lattice used for D = 2: θ spans [0, π/2] inclusive and φ spans [0, 2π)
/// so that φ and 2π − φ are both on the grid. A square budget n² gives an n×n lattice.
pub fn mixer_grid(budget: usize) -> Vec<(f64, f64)> {
    let budget = budget.max(1);
    let n_theta = ((budget as f64).sqrt().floor() as usize).max(1);
    let n_phi = budget.div_ceil(n_theta);
    let mut out = Vec::with_capacity(budget);
    for i in 0..n_theta {
        let theta = if n_theta == 1 { 0.0 } else { FRAC_PI_2 * i as f64 / (n_theta - 1) as f64 };
        for j in 0..n_phi {
            if out.len() == budget {
                return out;
            }
            out.push((theta, 2.0 * PI * j as f64 / n_phi as f64));
        }
    }
    out
}

fn check_d(rho: &DensityMatrix, d: usize) -> Result<usize> {
    let r = rank(rho);
    if d < r {
        return Err(Error::DTooSmall { d, rank: r });
    }
    if r > 1 && d > r * r {
        return Err(Error::DTooLarge { d, max: r * r });
    }
    Ok(r)
}

/// Every sampled decomposition and its average, in trial order. D = 2 sweeps the
/// lattice of `mixer_grid`; D ≥ 3 draws Haar unitaries from per-trial seeds seed ⊕ index.
pub fn search_trace(
    rho: &DensityMatrix,
    d: usize,
    budget: usize,
    seed: u64,
) -> Result<Vec<SearchSample>> {
    check_d(rho, d)?;
    let params: Vec<MixerParams> = match d {
        1 => vec![MixerParams::Trivial],
        2 => mixer_grid(budget)
            .into_iter()
            .map(|(theta, phi)| MixerParams::Angles { theta, phi })
            .collect(),
        _ => (0..budget.max(1) as u64)
            .map(|i| MixerParams::Haar { d, seed: seed ^ i })
            .collect(),
    };
    params
        .into_iter()
        .map(|p| {
            let dec = decompose(rho, &p.unitary())?;
            Ok(SearchSample { params: p, average: average_entanglement(&dec) })
        })
        .collect()
}

/// Smallest sampled average entanglement and the mixer that produced it.
pub fn min_average_search(
    rho: &DensityMatrix,
    d: usize,
    budget: usize,
    seed: u64,
) -> Result<(f64, MixerParams)> {
    let trace = search_trace(rho, d, budget, seed)?;
    let best = trace
        .iter()
        .min_by(|a, b| a.average.total_cmp(&b.average))
        .expect("at least one sample");
    Ok((best.average, best.params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{min_tgx_i_concurrence, pure_i_concurrence};
    use crate::numerics::{diag_real, max_abs, outer, random_ket};
    use crate::states::{build_epu_min_tgx, random_spectrum, Spectrum};

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec()).unwrap()
    }

    #[test]
    fn identity_mixer_gives_eigenensemble() {
        let s = spec(&[0.5, 0.3, 0.2, 0.0, 0.0, 0.0]);
        let (rho, _) = build_epu_min_tgx(&s, 0.1).unwrap();
        let dec = decompose(&rho, &ComplexMatrix::identity(3, 3)).unwrap();
        for (a, b) in dec.weights.iter().zip(s.values()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(max_abs(&(dec.reconstruct() - rho.matrix())) < 1e-12);
    }

    #[test]
    fn equal_weights_at_quarter_pi() {
        let rho = DensityMatrix::new(diag_real(&[0.5, 0.5, 0.0, 0.0, 0.0, 0.0]), (2, 3)).unwrap();
        let u = mixer_2(std::f64::consts::FRAC_PI_4, 0.0).unwrap();
        let dec = decompose(&rho, &u).unwrap();
        assert!((dec.weights[0] - 0.5).abs() < 1e-15 && (dec.weights[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn weights_sum_and_reconstruction() {
        let mut rng = seeded_rng(6);
        for _ in 0..20 {
            let s = random_spectrum(6, 3, &mut rng);
            let (rho, _) = build_epu_min_tgx(&s, 0.0).unwrap();
            let u = haar_unitary(5, &mut rng);
            let dec = decompose(&rho, &u).unwrap();
            assert!((dec.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(max_abs(&(dec.reconstruct() - rho.matrix())) < 1e-9);
        }
    }

    #[test]
    fn decompose_errors() {
        let rho = DensityMatrix::maximally_mixed((2, 3));
        assert!(matches!(
            decompose(&rho, &ComplexMatrix::identity(3, 3)),
            Err(Error::DTooSmall { .. })
        ));
        let bad = diag_real(&[1.0, 2.0]);
        assert!(matches!(decompose(&rho, &bad), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn mixer_examples() {
        assert_eq!(mixer_2(0.0, 0.0).unwrap(), ComplexMatrix::identity(2, 2));
        let m = mixer_2(FRAC_PI_2, 0.0).unwrap();
        let want = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c64(0.0, 0.0), c64(1.0, 0.0), c64(-1.0, 0.0), c64(0.0, 0.0)],
        );
        assert!(max_abs(&(m - want)) < 1e-15);
        for (t, p) in [(0.3, 1.0), (1.2, 5.9), (0.0, 3.0)] {
            assert!(unitarity_error(&mixer_2(t, p).unwrap()) <= 1e-15);
        }
        assert!(mixer_2(2.0, 0.0).is_err());
        assert!(mixer_2(0.5, 2.0 * PI).is_err());
    }

    #[test]
    fn grid_shape() {
        let g = mixer_grid(900);
        assert_eq!(g.len(), 900);
        assert_eq!(g[0], (0.0, 0.0));
        assert_eq!(g[899].0, FRAC_PI_2);
        assert_eq!(mixer_grid(10).len(), 10);
    }

    #[test]
    fn separable_average_is_zero() {
        let rho = DensityMatrix::new(diag_real(&[0.4, 0.3, 0.1, 0.1, 0.1, 0.0]), (2, 3)).unwrap();
        let dec = decompose(&rho, &ComplexMatrix::identity(5, 5)).unwrap();
        assert_eq!(average_entanglement(&dec), 0.0);
    }

    #[test]
    fn pure_input_any_d() {
        let mut rng = seeded_rng(17);
        let psi = random_ket(6, &mut rng);
        let rho = DensityMatrix::new(outer(&psi, &psi), (2, 3)).unwrap();
        let want = pure_i_concurrence(&psi).unwrap();
        for d in 1..=4 {
            let (v, _) = min_average_search(&rho, d, 50, 3).unwrap();
            assert!((v - want).abs() < 1e-12, "D={} {} {}", d, v, want);
        }
    }

    #[test]
    fn search_d_bounds() {
        let (rho, _) = build_epu_min_tgx(&spec(&[0.7, 0.3, 0.0, 0.0, 0.0, 0.0]), 0.693).unwrap();
        assert!(matches!(min_average_search(&rho, 1, 10, 0), Err(Error::DTooSmall { .. })));
        assert!(matches!(min_average_search(&rho, 5, 10, 0), Err(Error::DTooLarge { .. })));
    }

    #[test]
    fn epu_grid_minimum() {
        let (rho, _) = build_epu_min_tgx(&spec(&[0.7, 0.3, 0.0, 0.0, 0.0, 0.0]), 0.693).unwrap();
        let trace = search_trace(&rho, 2, 900, 0).unwrap();
        let min = trace.iter().map(|s| s.average).fold(f64::INFINITY, f64::min);
        let formula = min_tgx_i_concurrence(&rho).unwrap();
        assert!(trace.iter().all(|s| s.average >= formula - 1e-9));
        assert!((min - formula).abs() <= 2e-3);
    }

    #[test]
    fn grid_conjugation_symmetry() {
        let mut rng = seeded_rng(29);
        for _ in 0..50 {
            let s = random_spectrum(6, 2, &mut rng);
            let e = rng_eta(&mut rng) * crate::states::e_mems(&s).max(0.0);
            let (rho, _) = build_epu_min_tgx(&s, e).unwrap();
            for (theta, phi) in [(0.4, 1.0), (1.1, 2.5), (0.7, 0.3)] {
                let a = average_entanglement(&decompose(&rho, &mixer_2(theta, phi).unwrap()).unwrap());
                let b = average_entanglement(
                    &decompose(&rho, &mixer_2(theta, 2.0 * PI - phi).unwrap()).unwrap(),
                );
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    fn rng_eta<R: rand::Rng>(rng: &mut R) -> f64 {
        rng.gen::<f64>()
    }
}
