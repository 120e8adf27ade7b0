use fewnomial::bounds::{
    a_k, bracket_sum, bs07_positive_bound, bbs_real_bound, mixed_bound, multinomial,
    positive_compositions, Variant,
};
use fewnomial::gale::{build_gale_system, evaluate_master, normalize_to_z, push_solution};
use fewnomial::jacobian::{
    det_bareiss, det_laplace, jacobian_numerator, minor_numerator, random_blocked_polynomial,
    BlockedPolynomial,
};
use fewnomial::gale::MasterFunctionSystem;
use fewnomial::lattice::{
    elementary_divisors, kernel_basis, lattice_index, rank, ExponentMatrix, IntMatrix,
};
use fewnomial::samples::{sample_systems, SampleSpec};
use fewnomial::solver::{solve_real, SolveOptions};
use fewnomial::sparse_system::{
    detect_mixed_structure, normalize_constant_terms, ExponentVector, FewnomialSystem,
    LaurentPolynomial,
};
use fewnomial::{BigInt, BigRational};
use num_traits::{One, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rational() -> impl Strategy<Value = BigRational> {
    (-50i64..=50, 1i64..=20)
        .prop_filter("nonzero", |(p, _)| *p != 0)
        .prop_map(|(p, q)| BigRational::new(p.into(), q.into()))
}

fn polynomial(n: usize) -> impl Strategy<Value = LaurentPolynomial> {
    prop::collection::btree_map(prop::collection::vec(-4i64..=4, n), rational(), 1..5).prop_map(
        move |m| {
            LaurentPolynomial::from_terms(
                n,
                0,
                m.into_iter().map(|(e, c)| (ExponentVector::new(e), c)),
            )
            .unwrap()
        },
    )
}

fn system() -> impl Strategy<Value = FewnomialSystem> {
    (1usize..=3).prop_flat_map(|n| {
        prop::collection::vec(polynomial(n), n)
            .prop_map(|ps| FewnomialSystem::new(ps).unwrap())
    })
}

fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> IntMatrix {
    let mut u: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as i64).collect())
        .collect();
    for _ in 0..3 * n {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a == b {
            continue;
        }
        let k = rng.gen_range(-2..=2);
        for row in u.iter_mut() {
            row[a] += k * row[b];
        }
    }
    IntMatrix::from_i64_rows(&u, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn json_round_trip(sys in system()) {
        let again = FewnomialSystem::from_json(&sys.to_json()).unwrap();
        prop_assert_eq!(again, sys);
    }

    #[test]
    fn normalization_keeps_torus_zeros(sys in system(), pts in prop::collection::vec(prop::collection::vec(0.2f64..3.0, 3), 4)) {
        let norm = normalize_constant_terms(&sys).unwrap();
        for p in pts {
            let x = &p[..sys.n()];
            for (a, b) in sys.polys().iter().zip(norm.polys()) {
                // same polynomial up to a monomial factor
                let ratio = a.eval(x) / b.eval(x);
                if b.eval(x).abs() > 1e-9 {
                    prop_assert!(ratio.is_finite() && ratio != 0.0);
                }
                prop_assert_eq!(a.num_terms(), b.num_terms());
            }
        }
        for p in norm.polys() {
            prop_assert!(p.has_constant());
        }
    }

    #[test]
    fn mixed_structure_has_l_plus_n_distinct_monomials(seed in any::<u64>(), blocks in prop::collection::vec(1usize..=2, 1..=3)) {
        let ms = &sample_systems(&SampleSpec::new(&blocks), 1, seed).unwrap()[0];
        let exps = ms.nonconstant_exponents();
        let mut uniq: Vec<_> = exps.iter().map(|e| e.entries().to_vec()).collect();
        uniq.sort();
        uniq.dedup();
        prop_assert_eq!(uniq.len(), ms.l() + ms.n());
        let again = detect_mixed_structure(&ms.to_system()).unwrap();
        prop_assert_eq!(again.block_sizes(), ms.block_sizes());
    }

    #[test]
    fn kernel_is_saturated(rows in 2usize..=6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..rows);
        let w: Vec<Vec<i64>> = (0..rows).map(|_| (0..n).map(|_| rng.gen_range(-5..=5)).collect()).collect();
        let em = ExponentMatrix::from_rows(&w, n);
        if rank(&em.matrix) < n {
            return Ok(());
        }
        let rb = kernel_basis(&em).unwrap();
        prop_assert!(rb.alphas.mul(&em.matrix).is_zero());
        prop_assert_eq!(rb.len(), rows - n);
        prop_assert_eq!(rank(&rb.alphas), rows - n);
        prop_assert!(elementary_divisors(&rb.alphas).iter().all(One::is_one));
    }

    #[test]
    fn index_invariant_under_unimodular_maps(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = n + rng.gen_range(1..=3);
        let w: Vec<Vec<i64>> = (0..rows).map(|_| (0..n).map(|_| rng.gen_range(-6..=6)).collect()).collect();
        let em = ExponentMatrix::from_rows(&w, n);
        let Ok(idx) = lattice_index(&em) else { return Ok(()) };
        let u = random_unimodular(n, &mut rng);
        let mut permuted = em.matrix.mul(&u).to_i64_rows().unwrap();
        let k = rng.gen_range(0..rows);
        permuted.rotate_left(k);
        permuted.swap(0, rows - 1);
        prop_assert_eq!(lattice_index(&ExponentMatrix::from_rows(&permuted, n)).unwrap(), idx);
    }

    #[test]
    fn mixed_bounds_strictly_below_unmixed(blocks in prop::collection::vec(1u64..=4, 2..=4)) {
        let n = blocks.len() as u64;
        let l: u64 = blocks.iter().sum();
        prop_assert!(multinomial(l, &blocks).unwrap() < num_traits::pow(BigInt::from(n), l as usize));
        let mp = mixed_bound(&blocks, Variant::Positive).unwrap();
        let mr = mixed_bound(&blocks, Variant::Real).unwrap();
        prop_assert!(mp.enclosure(60).1 < bs07_positive_bound(n, l).unwrap().enclosure(60).0);
        prop_assert!(mr.enclosure(60).1 < bbs_real_bound(n, l).unwrap().enclosure(60).0);
        prop_assert!(mp.integer_bound <= bs07_positive_bound(n, l).unwrap().integer_bound);
    }

    #[test]
    fn estimation_chain(blocks in prop::collection::vec(1u64..=3, 2..=4)) {
        let l: u64 = blocks.iter().sum();
        prop_assume!(l >= 3);
        let a0 = BigRational::from_integer(a_k(&blocks, 0).unwrap());
        for (variant, chamber) in [(Variant::Real, false), (Variant::Positive, true)] {
            let half = BigRational::new(bracket_sum(&blocks, chamber).unwrap(), BigInt::from(2));
            let (lo, _) = mixed_bound(&blocks, variant).unwrap().enclosure(80);
            prop_assert!(half + &a0 <= lo);
        }
        for k in 0..=l {
            prop_assert!(a_k(&blocks, k).unwrap().is_positive());
        }
    }

    #[test]
    fn integer_bounds_stable_under_refinement(blocks in prop::collection::vec(1u64..=4, 2..=4)) {
        for v in [Variant::Positive, Variant::Real] {
            let b = mixed_bound(&blocks, v).unwrap();
            for terms in [80, 160, 320] {
                let (lo, hi) = b.enclosure(terms);
                prop_assert_eq!(lo.floor().to_integer(), b.integer_bound.clone());
                prop_assert_eq!(hi.floor().to_integer(), b.integer_bound.clone());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gale_residuals_vanish_at_pushed_solutions(seed in any::<u64>()) {
        let ms = &sample_systems(&SampleSpec::new(&[1, 1]), 1, seed).unwrap()[0];
        let w = ExponentMatrix::from_structure(ms);
        let gs = build_gale_system(ms, &kernel_basis(&w).unwrap()).unwrap();
        let sols = solve_real(&ms.to_system(), &SolveOptions::default()).unwrap();
        for p in sols.counted() {
            let y = push_solution(ms, &p.x).unwrap();
            for r in gs.residuals(&y).unwrap() {
                prop_assert!(r.abs() < 1e-7, "residual {r}");
            }
        }
    }

    #[test]
    fn z_map_round_trip_is_exact(seed in any::<u64>(), blocks in prop::collection::vec(1usize..=2, 2..=3)) {
        let ms = &sample_systems(&SampleSpec::new(&blocks), 1, seed).unwrap()[0];
        let w = ExponentMatrix::from_structure(ms);
        let gs = build_gale_system(ms, &kernel_basis(&w).unwrap()).unwrap();
        let (mfs, map) = normalize_to_z(&gs).unwrap();
        let y: Vec<BigRational> = (0..ms.l() as i64).map(|i| BigRational::new((3 * i - 4).into(), 7.into())).collect();
        prop_assert_eq!(map.z_to_y(&map.y_to_z(&y)), y);
        prop_assert!(mfs.d().iter().all(Signed::is_positive));
        let z: Vec<f64> = (0..ms.l()).map(|i| 0.3 + i as f64).collect();
        for k in 0..mfs.l() {
            prop_assert!(evaluate_master(&mfs, k, &z).unwrap().f > 0.0);
        }
    }

    #[test]
    fn jacobian_numerators_are_polynomial(seed in any::<u64>(), blocks in prop::sample::select(vec![vec![1usize], vec![1, 1], vec![2], vec![2, 1], vec![1, 1, 1]])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l: usize = blocks.iter().sum();
        let n = blocks.len();
        let alpha: Vec<Vec<i64>> = (0..l).map(|_| (0..n + l).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let mfs = MasterFunctionSystem::new(blocks.clone(), alpha, vec![BigRational::one(); n]).unwrap();
        let k = rng.gen_range(0..=l);
        let fs: Vec<BlockedPolynomial> = (k..l).map(|_| random_blocked_polynomial(&blocks, 2, &mut rng)).collect();
        match jacobian_numerator(&mfs, k, &fs) {
            Ok(num) => {
                if let Some(d) = num.multidegree() {
                    let bound = 1 + 2 * (l - k) as u32;
                    prop_assert!(d.iter().all(|&v| v <= bound));
                }
            }
            Err(fewnomial::Error::SingularAlpha(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
        let s = rng.gen_range(0..=l);
        let rows: Vec<usize> = (0..s).collect();
        let cols: Vec<usize> = (l - s..l).collect();
        let minor = minor_numerator(&mfs, &rows, &cols).unwrap();
        prop_assert!(minor.multidegree().is_none_or(|d| d.iter().all(|&v| v <= 1)));
    }

    #[test]
    fn determinant_paths_agree(seed in any::<u64>(), size in 1usize..=4) {
        let bs = [1, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m: Vec<Vec<BlockedPolynomial>> = (0..size)
            .map(|_| (0..size).map(|_| {
                if rng.gen_bool(0.2) { BlockedPolynomial::zero(&bs) } else { random_blocked_polynomial(&bs, 1, &mut rng) }
            }).collect())
            .collect();
        prop_assert_eq!(det_laplace(&m, &bs), det_bareiss(&m, &bs).unwrap());
    }
}

#[test]
fn solver_is_deterministic() {
    let ms = &sample_systems(&SampleSpec::new(&[2, 1]), 3, 11).unwrap()[2];
    let opts = SolveOptions::default();
    let a = solve_real(&ms.to_system(), &opts).unwrap();
    let b = solve_real(&ms.to_system(), &opts).unwrap();
    assert_eq!(a, b);
}

#[test]
fn every_composition_of_small_l_is_dominated() {
    for l in 2..=8u64 {
        for n in 2..=l as usize {
            for blocks in positive_compositions(l, n) {
                let m = multinomial(l, &blocks).unwrap();
                assert!(m < num_traits::pow(BigInt::from(n as u64), l as usize));
                assert!(m.to_f64().unwrap() > 0.0 && !m.is_zero());
            }
        }
    }
}
