use proptest::prelude::*;

use qqent::decompositions::{average_entanglement, decompose};
use qqent::ls::{ls_explicit, ls_numeric, ls_residuals};
use qqent::measures::{
    min_tgx_i_concurrence, pure_i_concurrence, reduction_purity, subspace_concurrence_vector,
};
use qqent::numerics::{
    c64, haar_unitary, hermitian_eig, max_abs, partial_transpose_negativity, random_ket,
    seeded_rng, takagi_symmetric, unitarity_error, ComplexMatrix,
};
use qqent::states::{build_alpha_beta, build_epu_min_tgx, e_mems, DensityMatrix, Spectrum};

// Descending spectrum of length 6 from raw weights; zeroed weights lower the rank.
fn spectrum() -> impl Strategy<Value = Spectrum> {
    (prop::collection::vec(0.0f64..1.0, 6), 1usize..=6).prop_map(|(w, rank)| {
        let mut v: Vec<f64> = w.iter().take(rank).map(|x| x + 1e-3).collect();
        v.resize(6, 0.0);
        let s: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= s);
        v.sort_by(|a, b| b.total_cmp(a));
        let err = 1.0 - v.iter().sum::<f64>();
        v[0] += err;
        Spectrum::new(v).unwrap()
    })
}

fn complex_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
        .prop_map(move |v| ComplexMatrix::from_iterator(n, n, v.into_iter().map(|(a, b)| c64(a, b))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn epu_state_keeps_spectrum_and_entanglement(s in spectrum(), eta in 0.0f64..=1.0) {
        let e = eta * e_mems(&s).max(0.0);
        let (rho, p) = build_epu_min_tgx(&s, e).unwrap();
        for (a, b) in rho.eigenvalues().iter().zip(s.values()) {
            prop_assert!((a - b).abs() < 1e-9);
        }
        let want = if p.q >= 0.0 { e } else { 0.0 };
        prop_assert!((min_tgx_i_concurrence(&rho).unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn ls_explicit_identities(s in spectrum(), eta in 0.0f64..=1.0) {
        let e = eta * e_mems(&s).max(0.0);
        let (rho, _) = build_epu_min_tgx(&s, e).unwrap();
        let ls = ls_explicit(&s, e).unwrap();
        let [rec, ident, neg] = ls_residuals(&rho, &ls);
        prop_assert!(rec <= 1e-9 && ident <= 1e-9 && neg <= 1e-8);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ls.p_e));
        let nu = ls_numeric(&rho).unwrap();
        prop_assert!((nu.p_e - ls.p_e).abs() < 1e-8);
    }

    #[test]
    fn hermitian_eig_reconstructs(a in complex_matrix(6)) {
        let h = (&a + a.adjoint()).scale(0.5);
        let e = hermitian_eig(&h).unwrap();
        prop_assert!(max_abs(&(e.reconstruct() - &h)) < 1e-12);
        prop_assert!(unitarity_error(&e.vectors) < 1e-12);
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn takagi_reconstructs(a in complex_matrix(4)) {
        let t = (&a + a.transpose()).scale(0.5);
        let f = takagi_symmetric(&t).unwrap();
        prop_assert!(max_abs(&(f.reconstruct() - &t)) < 1e-10);
        prop_assert!(unitarity_error(&f.unitary) < 1e-10);
        prop_assert!(f.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn pure_concurrence_norm_identity(seed in any::<u64>()) {
        let k = random_ket(6, &mut seeded_rng(seed));
        let rho = DensityMatrix::from_ket(&k, (2, 3)).unwrap();
        let c = subspace_concurrence_vector(&rho).unwrap();
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        let want = (2.0 * (1.0 - reduction_purity(&k).unwrap())).sqrt();
        prop_assert!((norm - want).abs() < 1e-10);
        prop_assert!((pure_i_concurrence(&k).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn local_unitaries_preserve_pure_entanglement(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let k = random_ket(6, &mut rng);
        let u = haar_unitary(2, &mut rng).kronecker(&haar_unitary(3, &mut rng));
        let a = pure_i_concurrence(&k).unwrap();
        let b = pure_i_concurrence(&(&u * &k)).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
        let rho = DensityMatrix::from_ket(&k, (2, 3)).unwrap();
        let rot = rho.conjugate(&u).unwrap();
        prop_assert!((partial_transpose_negativity(&rho) - partial_transpose_negativity(&rot)).abs() < 1e-10);
    }

    #[test]
    fn decompositions_reconstruct_and_bound(s in spectrum(), alpha in 0.0f64..=std::f64::consts::FRAC_PI_2, seed in any::<u64>()) {
        let rho = build_alpha_beta(&s, alpha, 0.0).unwrap();
        let r = s.values().iter().filter(|&&x| x > 1e-10).count();
        let d = r + (seed % 3) as usize;
        let u = haar_unitary(d, &mut seeded_rng(seed));
        let dec = decompose(&rho, &u).unwrap();
        prop_assert!(max_abs(&(dec.reconstruct() - rho.matrix())) < 1e-10);
        prop_assert!((dec.weights.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        // the convex roof lies below every decomposition
        let formula = min_tgx_i_concurrence(&rho).unwrap();
        prop_assert!(average_entanglement(&dec) >= formula - 1e-9);
    }
}
