use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hdx_core::cochain::check_localization_identities;
use hdx_core::complex::validate;
use hdx_core::decomposition::{Decomposer, PsiSolver};
use hdx_core::generators::combinations;
use hdx_core::io::{parse_cochain, parse_complex, to_json, CochainFile, ComplexFile};
use hdx_core::mixing::{local_thinness, FaceSet};
use hdx_core::operators::{assemble_lower_walk, assemble_nonlazy_upper, assemble_upper_walk};
use hdx_core::spectra::{garland_terms, profile};
use hdx_core::{Cochain, Simplex, WeightedComplex};

/// Pure complexes on up to 7 vertices with random positive top weights.
fn weighted_complex() -> impl Strategy<Value = WeightedComplex> {
    (4usize..=7, 1usize..=3)
        .prop_filter("room for the dimension", |(m, n)| n + 2 <= *m)
        .prop_flat_map(|(m, n)| {
            let all = combinations(m, n + 1);
            let len = all.len();
            (
                Just(all),
                proptest::sample::subsequence((0..len).collect::<Vec<_>>(), 1..=len),
                proptest::collection::vec(0.1f64..10.0, len),
            )
        })
        .prop_map(|(all, picked, weights)| {
            let top: Vec<(Vec<usize>, f64)> = picked.into_iter().map(|i| (all[i].clone(), weights[i])).collect();
            WeightedComplex::from_top_faces(&top).unwrap()
        })
}

fn random_cochain(wc: &WeightedComplex, k: usize, seed: u64) -> Cochain {
    Cochain::random(wc, k as isize, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn weights_satisfy_recursion(wc in weighted_complex()) {
        let r = validate(wc.complex(), wc.weights());
        prop_assert!(r.ok, "{r:?}");
    }

    #[test]
    fn walks_are_stochastic_and_self_adjoint(wc in weighted_complex()) {
        for k in 0..=wc.dim() {
            let mut ops = vec![assemble_lower_walk(&wc, k).unwrap()];
            if k < wc.dim() {
                ops.push(assemble_upper_walk(&wc, k).unwrap());
                ops.push(assemble_nonlazy_upper(&wc, k).unwrap());
            }
            for op in ops {
                prop_assert!(op.row_sum_residual() <= 1e-12);
                prop_assert!(op.self_adjointness_residual(&wc) <= 1e-12);
                if op.kind() != hdx_core::operators::OperatorKind::NonlazyUpper {
                    prop_assert!(op.matrix().iter().all(|&x| x >= 0.0));
                }
            }
        }
    }

    #[test]
    fn garland_identities(wc in weighted_complex(), seed in any::<u64>()) {
        let p = profile(&wc).unwrap();
        for k in 0..wc.dim() {
            let phi = random_cochain(&wc, k, seed);
            for j in -1..k as isize {
                prop_assert!(check_localization_identities(&wc, &phi, j).unwrap().max() <= 1e-10);
            }
            let g = garland_terms(&wc, &phi, &p).unwrap();
            prop_assert!(g.identity_residual <= 1e-10);
            prop_assert!(g.bounds_hold, "{g:?}");
        }
    }

    #[test]
    fn ladder_conserves_energy(wc in weighted_complex(), seed in any::<u64>()) {
        let p = profile(&wc).unwrap();
        for k in 0..wc.dim() {
            let phi = wc.project_c0(&random_cochain(&wc, k, seed)).unwrap();
            if wc.norm_sq(&phi).unwrap() < 1e-12 {
                continue;
            }
            let dec = Decomposer::new(&wc, k, PsiSolver::MinimumNorm).unwrap();
            let r = dec.decompose(&phi).unwrap();
            let total: f64 = r.energies.iter().sum();
            let norm = wc.norm_sq(&phi).unwrap();
            prop_assert!((total - norm).abs() <= 1e-8 * norm, "{total} vs {norm}: {:?}", wc.top_faces());
            let rep = dec.verify(&r, &p).unwrap();
            prop_assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn spectra_are_relabel_invariant(wc in weighted_complex(), shift in 1usize..50) {
        // a bijection onto a different vertex set, reversing the order
        let relabeled = wc.relabel(|v| shift + 10 - v).unwrap();
        let a = profile(&wc).unwrap();
        let b = profile(&relabeled).unwrap();
        prop_assert!((a.lambda_one_sided - b.lambda_one_sided).abs() <= 1e-10);
        prop_assert!((a.lambda_two_sided - b.lambda_two_sided).abs() <= 1e-10);
        for (x, y) in a.levels.iter().zip(&b.levels) {
            prop_assert!((x.mu_k - y.mu_k).abs() <= 1e-10);
            prop_assert!((x.nu_k - y.nu_k).abs() <= 1e-10);
        }
        for k in 0..=wc.dim() {
            prop_assert!((wc.weights().total(k as isize) - relabeled.weights().total(k as isize)).abs() <= 1e-9);
        }
    }

    #[test]
    fn thinness_is_monotone_under_inclusion(wc in weighted_complex(), picks in proptest::collection::vec(any::<bool>(), 64)) {
        let n = wc.dim() as isize;
        let k = if n >= 2 { 1 } else { 0 };
        let faces: Vec<Simplex> = wc.complex().faces(k).to_vec();
        let mut b: Vec<Simplex> = faces.iter().zip(picks.iter().cycle()).filter(|(_, p)| **p).map(|(f, _)| f.clone()).collect();
        if b.is_empty() {
            b.push(faces[0].clone());
        }
        let a: Vec<Simplex> = b.iter().step_by(2).cloned().collect();
        let fa = local_thinness(&wc, &FaceSet::new(k, a).unwrap()).unwrap();
        let fb = local_thinness(&wc, &FaceSet::new(k, b).unwrap()).unwrap();
        prop_assert!(fa <= fb + 1e-12);
        prop_assert!(fb <= 1.0 + 1e-12);
    }

    #[test]
    fn c0_projection_is_orthogonal_and_idempotent(wc in weighted_complex(), seed in any::<u64>()) {
        for k in 0..=wc.dim() {
            let phi = random_cochain(&wc, k, seed);
            let p = wc.project_c0(&phi).unwrap();
            let pp = wc.project_c0(&p).unwrap();
            prop_assert!(p.max_abs_diff(&pp) <= 1e-12);
            let dot = wc.inner_product(&p, &wc.one(k as isize)).unwrap();
            prop_assert!(dot.abs() <= 1e-10 * wc.norm(&phi).unwrap().max(1.0) * wc.norm(&wc.one(k as isize)).unwrap());
        }
    }

    #[test]
    fn files_roundtrip(wc in weighted_complex(), seed in any::<u64>()) {
        let text = to_json(&ComplexFile::from_complex(&wc, None)).unwrap();
        let back = parse_complex(&text).unwrap();
        prop_assert_eq!(&back, &wc);
        let phi = random_cochain(&wc, 0, seed);
        let text = to_json(&CochainFile::from_cochain(&wc, &phi)).unwrap();
        prop_assert_eq!(parse_cochain(&text, &wc).unwrap(), phi);
    }
}
