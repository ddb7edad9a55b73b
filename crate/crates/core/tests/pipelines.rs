use num_complex::Complex64;
use proptest::prelude::*;

use qetkit::approx::PolyMV;
use qetkit::blockenc::{BlockEncoding, CostLedger};
use qetkit::decomp;
use qetkit::fixtures;
use qetkit::matrices::{self, ComplexMatrix, StateVector};
use qetkit::ntca::{self, PrepareOracle};
use qetkit::qet;
use qetkit::Tolerances;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn tol() -> Tolerances {
    Tolerances::default()
}

fn exact(m: &ComplexMatrix) -> BlockEncoding {
    BlockEncoding::dilate(m, 1.0, &tol()).unwrap()
}

fn apply(m: &ComplexMatrix, v: &StateVector) -> StateVector {
    v.apply(m)
}

#[test]
fn qet_state_matches_direct_function_application() {
    let mut rng = fixtures::rng(201);
    let (m, u, lambda) = fixtures::random_normal(4, &mut rng);
    let g = fixtures::random_unit_sup_poly(&[3, 3], &mut rng);
    let res = qet::qet_normal(&exact(&m), &g, 3, &tol()).unwrap();
    let v = StateVector::uniform(4);
    let (out, p) = qet::run_on_state(&res, &v, &tol()).unwrap();
    let values: Vec<Complex64> = lambda.iter().map(|z| g.eval(&[z.re, z.im])).collect();
    let gm = matrices::reconstruct(&u, &values);
    let direct = apply(&gm, &v);
    assert!((out.overlap(&direct.normalized().unwrap()) - 1.0).abs() < 1e-9);
    let expected_p = direct.norm().powi(2) / res.be.alpha().powi(2);
    assert!((p - expected_p).abs() < 1e-10);
}

#[test]
fn block_encoding_json_round_trip_after_pipeline() {
    let mut rng = fixtures::rng(202);
    let (m, _, _) = fixtures::random_normal(2, &mut rng);
    let res = qet::exp_normal(&exact(&m), 0.5, 12, &tol()).unwrap();
    let json = res.be.to_json().unwrap();
    let text = serde_json::to_string(&json).unwrap();
    let back = BlockEncoding::from_json(&serde_json::from_str(&text).unwrap(), &tol()).unwrap();
    assert_eq!(back.alpha(), res.be.alpha());
    assert_eq!(back.ancillas(), res.be.ancillas());
    assert!((back.extract_block() - res.be.extract_block()).norm() < 1e-12);
}

#[test]
fn ntca_sextic_octic_example_on_two_qubits() {
    let mut rng = fixtures::rng(203);
    let u = PrepareOracle::new(fixtures::random_unitary(4, &mut rng), &tol()).unwrap();
    let f = PolyMV::from_terms(vec![7, 9], &[(vec![6, 4], c(5.0 / 22.0, 0.0)), (vec![1, 8], c(17.0 / 22.0, 0.0))])
        .unwrap();
    let res = ntca::ntca_transform(&u, &f, 9, &tol()).unwrap();
    let raw: Vec<Complex64> = u
        .amplitudes()
        .iter()
        .map(|z| c((5.0 * z.re.powi(6) * z.im.powi(4) + 17.0 * z.re * z.im.powi(8)) / 22.0, 0.0))
        .collect();
    let expect = StateVector::new(raw).normalized().unwrap();
    assert!((res.state.overlap(&expect) - 1.0).abs() < 1e-9);
    // 2 inputs × (n + 3) ancillas after the polynomial stage, 4 select bits for 9 slots
    assert_eq!(res.report.ancillas, 2 * (2 + 3) + 4);
    assert_eq!(res.report.instances["U"] % ntca::ORACLE_USES_PER_AMPLITUDE_BE, 0);
}

#[test]
fn mqet_matches_qet_on_split_normal_input() {
    let mut rng = fixtures::rng(204);
    let (m, _, _) = fixtures::random_normal(4, &mut rng);
    let g = fixtures::random_unit_sup_poly(&[3, 3], &mut rng);
    let a = matrices::hermitian_part(&m);
    let b = matrices::antihermitian_part(&m);
    let via_mqet = qet::mqet(&[exact(&a), exact(&b)], &g, 3, &tol()).unwrap();
    let via_qet = qet::qet_normal(&exact(&m), &g, 3, &tol()).unwrap();
    assert!((via_mqet.be.extract_block() - via_qet.be.extract_block()).norm() < 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn product_and_lcu_blocks(seed in any::<u64>(), re in -1.0..1.0f64, im in -1.0..1.0f64) {
        let mut rng = fixtures::rng(seed);
        let a = fixtures::random_contraction(4, &mut rng);
        let b = fixtures::random_contraction(4, &mut rng);
        let (x, y) = (exact(&a), exact(&b));
        let p = x.product(&y).unwrap();
        prop_assert!((p.extract_block() - &a * &b).norm() < 1e-10);
        let coeff = c(re, im);
        let l = BlockEncoding::lcu(&[x, y], &[c(1.0, 0.0), coeff]).unwrap();
        prop_assert!((l.extract_block() - (&a + &b * coeff)).norm() < 1e-10);
        prop_assert_eq!(l.alpha(), 1.0 + coeff.norm());
    }

    #[test]
    fn ledger_merge_is_associative(a in 0u64..20, b in 0u64..20, k in 0u64..20) {
        let x = CostLedger::oracle("U").repeated(a);
        let y = CostLedger::oracle("V").repeated(b);
        let z = CostLedger::oracle("U").repeated(k);
        prop_assert_eq!(x.merge(&y).merge(&z), x.merge(&y.merge(&z)));
        prop_assert_eq!(x.merge(&y).total(), a + b);
    }

    #[test]
    fn normalized_decomposition_reconstructs(seed in any::<u64>(), d in 2usize..7) {
        let mut rng = fixtures::rng(seed);
        let g = fixtures::random_unit_sup_poly(&[d, d], &mut rng);
        let dec = decomp::normalize(&decomp::decompose_bivariate(&g, d, &tol()).unwrap());
        prop_assert!(dec.beta_l1() <= decomp::bivariate_beta_bound(d) + 1e-6);
        for x in [-1.0, -0.3, 0.2, 0.9] {
            for y in [-0.8, 0.0, 0.5, 1.0] {
                prop_assert!((dec.eval(&[x, y]) - g.eval(&[x, y])).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn qet_claims_hold_on_random_inputs(seed in any::<u64>(), d in 1usize..5) {
        let mut rng = fixtures::rng(seed);
        let (m, _, _) = fixtures::random_normal(4, &mut rng);
        let g = fixtures::random_unit_sup_poly(&[d, d], &mut rng);
        let res = qet::qet_normal(&exact(&m), &g, d, &tol()).unwrap();
        prop_assert!(res.all_enforced_hold(), "{:?}", res.claims);
        prop_assert!(res.report.eps_measured < 1e-8);
    }

    #[test]
    fn exp_composes_over_time(seed in any::<u64>(), t in 0.05..0.6f64) {
        let mut rng = fixtures::rng(seed);
        let (m, _, _) = fixtures::random_normal(2, &mut rng);
        let be = exact(&m);
        let half = qet::exp_normal(&be, t, 16, &tol()).unwrap().be.extract_block();
        let full = qet::exp_normal(&be, 2.0 * t, 16, &tol()).unwrap().be.extract_block();
        prop_assert!((&half * &half - full).norm() < 1e-8);
    }
}
