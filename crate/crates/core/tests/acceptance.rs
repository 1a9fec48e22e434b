//! End-to-end acceptance gate: nine certificate- and property-based
//! criteria, each printing a single pass/fail line. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use std::process::Command;
use std::time::Instant;

use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use lndcert::certify::{build_model_pair, certify_non_algebraic, certify_not_locally_finite,
    kernel_lift};
use lndcert::derivation::{equivalent, krylov, parse_derivation, Derivation,
    EquivalenceStatus, FinitenessStatus, NilpotencyStatus};
use lndcert::endo::{compose, exp_derivation, group_commutator, h_operator};
use lndcert::grading::{check_vertex_lnd, decompose_poly, Grading};
use lndcert::linalg::{jordan_chevalley, QMatrix};
use lndcert::parse::parse_poly;
use lndcert::poly::{Monomial, MultiPoly, Scalar, TruncContext};

fn p(s: &str, n: usize) -> MultiPoly {
    parse_poly(s, n).unwrap()
}

fn d(s: &str, n: usize) -> Derivation {
    parse_derivation(s, n).unwrap()
}

fn pass(n: usize, what: &str) {
    println!("[PASS] criterion {n}: {what}");
}

#[test]
fn criterion_1_degree_ladder() {
    let started = Instant::now();
    let model = build_model_pair(2).unwrap();
    let seed = p("x1 + x2", 2);
    let report = certify_not_locally_finite(&model.del, &seed, 8).unwrap();
    assert!(report.verified, "ladder not verified: {report:?}");
    let ords: Vec<_> = report.rungs.iter().map(|r| r.ord.unwrap()).collect();
    assert_eq!(ords, vec![1, 2, 3, 4, 5, 6, 7, 8]);
    assert!(report.rungs.iter().all(|r| r.lhc_ok));
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    pass(1, "order ladder 1..8 with non-negative integer lowest coefficients");
}

#[test]
fn criterion_2_non_algebraicity() {
    let started = Instant::now();
    for d in [2usize, 3] {
        let report = certify_non_algebraic(d, 5, 14).unwrap();
        assert!(report.verified, "d={d} not verified: {report:?}");
        let expect: Vec<_> = (0..=5).map(|i| Some(1 + i * (d - 1))).collect();
        assert_eq!(report.probe.lhc_degrees, expect, "d={d}");
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    pass(2, "lowest-degree law 1+i(d-1) for d in {2,3}, budget 5, cap 14");
}

#[test]
fn criterion_3_monomial_lowest_component_law() {
    let mut checks = 0;
    for deg in [2usize, 3] {
        let model = build_model_pair(deg).unwrap();
        let one = Scalar::one();
        let a = exp_derivation(&model.d1.mul_poly(&model.f1).unwrap(), &one, None).unwrap();
        let b = exp_derivation(&model.d2.mul_poly(&model.f2).unwrap(), &one, None).unwrap();
        let g = compose(&a, &b).unwrap();
        for a1 in 0..=3u32 {
            for a2 in 0..=3u32 {
                if a1 + a2 == 0 {
                    continue;
                }
                let mono = MultiPoly::from_terms(
                    [(Monomial(vec![a1, a2]), Scalar::one())],
                    2,
                );
                let image = h_operator(&g, &mono).unwrap();
                // a1 x1^(a1-1) x2^(d+a2) + a2 x1^(d+a1) x2^(a2-1),
                // terms with a negative exponent dropped
                let mut expect = MultiPoly::zero(2);
                if a1 >= 1 {
                    expect = expect
                        .add(
                            &MultiPoly::from_terms(
                                [(
                                    Monomial(vec![a1 - 1, deg as u32 + a2]),
                                    Scalar::from_integer((a1 as i64).into()),
                                )],
                                2,
                            ),
                            None,
                        )
                        .unwrap();
                }
                if a2 >= 1 {
                    expect = expect
                        .add(
                            &MultiPoly::from_terms(
                                [(
                                    Monomial(vec![deg as u32 + a1, a2 - 1]),
                                    Scalar::from_integer((a2 as i64).into()),
                                )],
                                2,
                            ),
                            None,
                        )
                        .unwrap();
                }
                assert_eq!(
                    image.lhc().unwrap(),
                    expect,
                    "d={deg}, a1={a1}, a2={a2}"
                );
                checks += 1;
            }
        }
    }
    assert_eq!(checks, 30);
    pass(3, "lowest component of h on 30 monomials matches the closed form");
}

fn random_x1_free(rng: &mut StdRng) -> MultiPoly {
    let mut poly = MultiPoly::zero(2);
    for _ in 0..rng.gen_range(1..=4) {
        let e = rng.gen_range(0..=6u32);
        let c = rng.gen_range(-3..=3i64);
        if c == 0 {
            continue;
        }
        let term = MultiPoly::from_terms(
            [(Monomial(vec![0, e]), Scalar::from_integer(c.into()))],
            2,
        );
        poly = poly.add(&term, None).unwrap();
    }
    poly
}

#[test]
fn criterion_4_kernel_lift_randomized() {
    let started = Instant::now();
    let cap = 10;
    let ctx = TruncContext::new(cap);
    let mut rng = StdRng::seed_from_u64(0x6b65726e);
    let restrict = [MultiPoly::zero(2), MultiPoly::var(1, 2)];
    for del in [d("[1, x1]", 2), d("[1, x1 + x1*x2]", 2)] {
        for _ in 0..50 {
            let g0 = random_x1_free(&mut rng);
            let lift = kernel_lift(&del, &g0, cap).unwrap();
            // independent re-expansion of the image
            let image = del.apply(&lift, None).unwrap().truncate(ctx);
            assert!(image.is_zero(), "residue {image} for g0 {g0}");
            let at_x1_zero = lift.substitute(&restrict, None).unwrap();
            assert_eq!(at_x1_zero, g0);
            // multiplicativity against an independent second input
            let h0 = random_x1_free(&mut rng);
            let lift_h = kernel_lift(&del, &h0, cap).unwrap();
            let prod = g0.mul(&h0, None).unwrap();
            let lift_prod = kernel_lift(&del, &prod, cap).unwrap();
            let pointwise = lift.mul(&lift_h, Some(ctx)).unwrap();
            assert_eq!(lift_prod.truncate(ctx), pointwise);
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    pass(4, "100 randomized kernel lifts: residue zero, restriction, multiplicativity");
}

/// Coefficients of (x - lambda)^k, ascending, as exact scalars.
fn shifted_power(lambda: i64, k: usize) -> Vec<Scalar> {
    let mut coeffs = vec![Scalar::one()];
    for _ in 0..k {
        let mut next = vec![Scalar::zero(); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = &next[i + 1] + c;
            next[i] = &next[i] - c * Scalar::from_integer(lambda.into());
        }
        coeffs = next;
    }
    coeffs
}

fn companion_blocks(rng: &mut StdRng, dim: usize) -> QMatrix {
    let mut m = QMatrix::zero(dim, dim);
    let mut at = 0;
    while at < dim {
        let k = rng.gen_range(1..=(dim - at));
        let lambda = rng.gen_range(-2..=2i64);
        let coeffs = shifted_power(lambda, k);
        for i in 0..k {
            m.rows[at + i][at + k - 1] = -coeffs[i].clone();
            if i + 1 < k {
                m.rows[at + i + 1][at + i] = Scalar::one();
            }
        }
        at += k;
    }
    m
}

fn random_unitriangular(rng: &mut StdRng, dim: usize) -> QMatrix {
    let mut l = QMatrix::identity(dim);
    let mut u = QMatrix::identity(dim);
    for i in 0..dim {
        for j in 0..i {
            l.rows[i][j] = Scalar::from_integer(rng.gen_range(-2..=2i64).into());
            u.rows[j][i] = Scalar::from_integer(rng.gen_range(-2..=2i64).into());
        }
    }
    l.mul(&u)
}

fn random_poly(rng: &mut StdRng, nvars: usize, max_exp: u32) -> MultiPoly {
    let mut poly = MultiPoly::zero(nvars);
    for _ in 0..rng.gen_range(1..=3) {
        let exps: Vec<u32> = (0..nvars).map(|_| rng.gen_range(0..=max_exp)).collect();
        let c = rng.gen_range(-5..=5i64);
        if c == 0 {
            continue;
        }
        let term =
            MultiPoly::from_terms([(Monomial(exps), Scalar::from_integer(c.into()))], nvars);
        poly = poly.add(&term, None).unwrap();
    }
    poly
}

#[test]
fn criterion_5_jordan_suite() {
    let mut rng = StdRng::seed_from_u64(0x6a6f7264);
    for case in 0..50 {
        let dim = rng.gen_range(2..=6);
        let base = companion_blocks(&mut rng, dim);
        let t = random_unitriangular(&mut rng, dim);
        let m = t.mul(&base).mul(&t.inverse().unwrap());
        let (s, n) = jordan_chevalley(&m);
        assert_eq!(s.add(&n), m, "case {case}: S + N != M");
        assert_eq!(s.mul(&n), n.mul(&s), "case {case}: SN != NS");
        let mut nk = QMatrix::identity(dim);
        for _ in 0..dim {
            nk = nk.mul(&n);
        }
        assert!(nk.is_zero(), "case {case}: N^dim != 0");
        assert!(s.min_poly().is_squarefree(), "case {case}: minpoly(S)");

        // lift the matrix to a linear derivation and split it
        let images: Vec<MultiPoly> = (0..dim)
            .map(|i| {
                (0..dim).fold(MultiPoly::zero(dim), |acc, k| {
                    acc.add(&MultiPoly::var(k, dim).scale(&m.rows[k][i]), None)
                        .unwrap()
                })
            })
            .collect();
        let delta = Derivation::new(images);
        let pair = lndcert::jordan::jordan_decompose(&delta, 2 * dim + 2).unwrap();
        for _ in 0..20 {
            let a = random_poly(&mut rng, dim, 2);
            let b = random_poly(&mut rng, dim, 2);
            for part in [&pair.semisimple, &pair.nilpotent] {
                let lhs = part.apply(&a.mul(&b, None).unwrap(), None).unwrap();
                let rhs = part
                    .apply(&a, None)
                    .unwrap()
                    .mul(&b, None)
                    .unwrap()
                    .add(&a.mul(&part.apply(&b, None).unwrap(), None).unwrap(), None)
                    .unwrap();
                assert_eq!(lhs, rhs, "case {case}: Leibniz");
            }
        }
    }
    pass(5, "50 exact Jordan splits plus Leibniz spot-checks on lifted parts");
}

#[test]
fn criterion_6_vertex_corpus() {
    // ten locally finite derivations with rank-1 and rank-2 gradings
    let corpus: Vec<(usize, Vec<Vec<i64>>, &str)> = vec![
        (2, vec![vec![1, 1]], "[1, 0]"),
        (2, vec![vec![1, 1]], "[x1, 0]"),
        (2, vec![vec![1, 2]], "[x2, 0]"),
        (2, vec![vec![1, 2]], "[2*x1, x1 + 2*x2]"),
        (2, vec![vec![0, 1]], "[x1 + x2, x2]"),
        (3, vec![vec![1, 2, 3]], "[x2, x3, 0]"),
        (2, vec![vec![1, -1], vec![0, 0]], "[x2, x1]"),
        (3, vec![vec![1, 0, 1], vec![0, 1, 1]], "[x2*x3, 0, 0]"),
        (2, vec![vec![0, 1]], "[x1 + x2^2, x2]"),
        (3, vec![vec![1, 0, 0], vec![0, 1, 0]], "[x2, x1, x3]"),
    ];
    assert_eq!(corpus.len(), 10);
    for (idx, (nvars, weights, deriv)) in corpus.iter().enumerate() {
        let z = d(deriv, *nvars);
        // corpus admission: Krylov stabilizes on every generator
        for i in 0..*nvars {
            let report = krylov(&z, &MultiPoly::var(i, *nvars), 12, None).unwrap();
            assert_eq!(
                report.status,
                FinitenessStatus::LocallyFiniteOnSeed,
                "corpus {idx}: generator {}",
                i + 1
            );
        }
        let g = Grading::new(weights.clone(), *nvars).unwrap();
        let report = check_vertex_lnd(&g, &z, 12).unwrap();
        assert!(report.all_proved, "corpus {idx}: {:?}", report.verdicts);
        for (w, verdict) in &report.verdicts {
            assert_eq!(
                verdict.status,
                NilpotencyStatus::ProvedLnd,
                "corpus {idx}: vertex {w:?}"
            );
        }
    }
    pass(6, "all nonzero-vertex components of the 10-derivation corpus proved LND");
}

#[test]
fn criterion_7_commutator_probe() {
    let pairs = [
        ("[1, 0]", "[2, 0]"),
        ("[1, 0]", "[x2, 0]"),
        ("[1, 0]", "[x2^2, 0]"),
        ("[x2, 0]", "[x2^3, 0]"),
        ("[x2^2, 0]", "[x2^2 + x2^4, 0]"),
    ];
    let one = Scalar::one();
    for (a, b) in pairs {
        let da = d(a, 2);
        let db = d(b, 2);
        let verdict = equivalent(&da, &db, 16).unwrap();
        assert_eq!(verdict.status, EquivalenceStatus::Equivalent, "{a} vs {b}");
        let ea = exp_derivation(&da, &one, None).unwrap();
        let eb = exp_derivation(&db, &one, None).unwrap();
        let c = group_commutator(&ea, &eb).unwrap();
        assert!(c.is_identity(), "commutator of {a}, {b}: {c}");
    }
    let ea = exp_derivation(&d("[0, 1]", 2), &one, None).unwrap();
    let eb = exp_derivation(&d("[x2, 0]", 2), &one, None).unwrap();
    let c = group_commutator(&ea, &eb).unwrap();
    assert!(!c.is_identity());
    pass(7, "equivalent exponentials commute; the shear pair does not");
}

fn random_derivation(rng: &mut StdRng, nvars: usize) -> Derivation {
    Derivation::new((0..nvars).map(|_| random_poly(rng, nvars, 2)).collect())
}

#[test]
fn criterion_8_algebra_axioms() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x6c617773);
    let nvars = 2;
    let grading = Grading::new(vec![vec![1, 2]], nvars).unwrap();
    let mut cases = 0;
    for _ in 0..200 {
        let a = random_poly(&mut rng, nvars, 3);
        let b = random_poly(&mut rng, nvars, 3);
        let c = random_poly(&mut rng, nvars, 3);

        // ring laws: distributivity, commutativity, associativity
        let ab = a.mul(&b, None).unwrap();
        assert_eq!(
            a.add(&b, None).unwrap().mul(&c, None).unwrap(),
            a.mul(&c, None)
                .unwrap()
                .add(&b.mul(&c, None).unwrap(), None)
                .unwrap()
        );
        assert_eq!(ab, b.mul(&a, None).unwrap());
        assert_eq!(
            ab.mul(&c, None).unwrap(),
            a.mul(&b.mul(&c, None).unwrap(), None).unwrap()
        );
        cases += 1;

        // Leibniz
        let da = random_derivation(&mut rng, nvars);
        let lhs = da.apply(&ab, None).unwrap();
        let rhs = da
            .apply(&a, None)
            .unwrap()
            .mul(&b, None)
            .unwrap()
            .add(&a.mul(&da.apply(&b, None).unwrap(), None).unwrap(), None)
            .unwrap();
        assert_eq!(lhs, rhs);
        cases += 1;

        // bracket antisymmetry
        let db = random_derivation(&mut rng, nvars);
        let dc = random_derivation(&mut rng, nvars);
        assert_eq!(
            da.lie_bracket(&db).unwrap(),
            db.lie_bracket(&da).unwrap().scale(&-Scalar::one())
        );
        cases += 1;

        // Jacobi
        let jac = da
            .lie_bracket(&db.lie_bracket(&dc).unwrap())
            .unwrap()
            .add(&db.lie_bracket(&dc.lie_bracket(&da).unwrap()).unwrap())
            .unwrap()
            .add(&dc.lie_bracket(&da.lie_bracket(&db).unwrap()).unwrap())
            .unwrap();
        assert!(jac.is_zero());
        cases += 1;

        // grading reassembly and print/parse round trip
        let parts = decompose_poly(&grading, &a);
        let sum = parts
            .values()
            .fold(MultiPoly::zero(nvars), |acc, q| acc.add(q, None).unwrap());
        assert_eq!(sum, a);
        assert_eq!(parse_poly(&a.to_string(), nvars).unwrap(), a);
        cases += 1;
    }
    assert_eq!(cases, 1000);
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    pass(8, "1000 randomized algebra-law cases with zero failures");
}

#[test]
fn criterion_9_report_determinism() {
    let scenario = concat!(env!("CARGO_MANIFEST_DIR"), "/scenarios/model_d2.json");
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_lndcert"))
            .args(["run", scenario])
            .output()
            .expect("binary runs");
        assert!(out.status.success(), "exit: {:?}", out.status);
        out.stdout
    };
    let first = run();
    let second = run();
    assert!(!first.is_empty());
    assert_eq!(first, second, "reports differ between runs");
    let parsed: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(parsed["status"], "ALL_VERIFIED");
    pass(9, "repeated scenario runs emit byte-identical JSON reports");
}
