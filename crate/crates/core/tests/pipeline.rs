use std::collections::BTreeSet;

use dimgroup::arith::int;
use dimgroup::corpus;
use dimgroup::decide::{
    cc_set, cc_set_brute_force, decide_pair, elementary_shift_factorizations, lambda_det_decide, verify_pair, Config,
    Mode, Verdict,
};
use dimgroup::exactmat::IntMatrix;
use num_integer::Integer;
use num_traits::One;

fn m(rows: &[&[i64]]) -> IntMatrix {
    IntMatrix::from_rows(rows)
}

#[test]
fn corpus_expectations_hold() {
    for out in corpus::run(&Config::default()) {
        assert!(out.passed, "{}: {:?}", out.example.name, out.verdict.as_ref().map(|v| v.name()));
    }
}

#[test]
fn witnesses_verify_and_certificates_separate() {
    let cfg = Config::default();
    for e in corpus::examples() {
        match decide_pair(&e.a, &e.b, e.mode, &cfg).unwrap() {
            Verdict::Equivalent(w) => {
                if w.j.rows() > 0 {
                    assert!(verify_pair(&e.a, &e.b, &w.j, e.mode, &cfg).unwrap().is_verified(), "{}", e.name);
                }
            }
            Verdict::NotEquivalent(c) => assert_ne!(c.value_a, c.value_b, "{}", e.name),
            Verdict::Unknown(_) => {}
        }
    }
}

#[test]
fn squares_keep_equivalence() {
    let cfg = Config::default();
    for e in corpus::examples() {
        if e.a.rows() != 2 || !decide_pair(&e.a, &e.b, e.mode, &cfg).unwrap().is_equivalent() {
            continue;
        }
        let sq = decide_pair(&e.a.pow(2), &e.b.pow(2), e.mode, &cfg).unwrap();
        assert!(!sq.is_not_equivalent(), "{}: squares {}", e.name, sq.name());
    }
}

#[test]
fn elementary_factorization_implies_equivalence() {
    let cfg = Config::default();
    let mats = [m(&[&[1, 1], &[2, 0]]), m(&[&[2, 1], &[1, 1]]), m(&[&[3, 1], &[1, 1]]), m(&[&[1, 2], &[1, 1]])];
    let mut pairs = 0;
    for a in &mats {
        for b in &mats {
            if !elementary_shift_factorizations(a, b).unwrap().is_empty() {
                pairs += 1;
                assert!(decide_pair(a, b, Mode::Ordered, &cfg).unwrap().is_equivalent(), "{} {}", a, b);
            }
        }
    }
    assert!(pairs >= mats.len());
}

#[test]
fn determinant_eigenvalue_screen() {
    let cfg = Config::default();
    let x = m(&[&[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]);
    let y = m(&[&[1, 1, 0], &[0, 1, 2], &[1, 0, 0]]);
    assert!(decide_pair(&x, &y, Mode::Ordered, &cfg).unwrap().is_not_equivalent());
    let p = m(&[&[0, 1, 0], &[0, 0, 1], &[1, 0, 0]]);
    let conj = p.mul(&y).mul(&p.transpose());
    let v = lambda_det_decide(&y, &conj, &cfg).unwrap().expect("screen applies");
    assert!(v.is_equivalent());
}

#[test]
fn cc_grid_matches_oracle() {
    for n in 1usize..=2 {
        for m1 in 2i64..=7 {
            for m2 in 2i64..=3 {
                for f in 1i64..=4 {
                    if !int(m1).gcd(&int(m2)).is_one() || !int(m1).gcd(&int(f)).is_one() {
                        continue;
                    }
                    let fast = cc_set(&int(m1), &int(m2), &int(f), n).unwrap();
                    let r = if n == 1 { 3 * m1 } else { m1 + 2 };
                    // enough powers of 1/m2 to reach every determinant class
                    let slow = cc_set_brute_force(&int(m1), &int(m2), &int(f), n, r, 6).unwrap();
                    assert_eq!(fast, slow, "n={n} m1={m1} m2={m2} f={f}");
                }
            }
        }
    }
}

#[test]
fn cc_without_denominators_needs_wider_lifts() {
    // m2 = 1: only determinant ±f; [[0,2],[2,0]] mod 5 first lifts with an entry of 12
    let fast = cc_set(&int(5), &int(1), &int(1), 2).unwrap();
    let narrow = cc_set_brute_force(&int(5), &int(1), &int(1), 2, 6, 0).unwrap();
    assert!(narrow.is_subset(&fast) && !narrow.contains(&vec![0, 2, 2, 0]));
    let slow = cc_set_brute_force(&int(5), &int(1), &int(1), 2, 12, 0).unwrap();
    assert_eq!(fast, slow);
    let dets: BTreeSet<u64> = fast.iter().map(|x| (x[0] * x[3] + 5 * 5 - x[1] * x[2] % 5) % 5).collect();
    assert_eq!(dets, BTreeSet::from([1, 4]));
}
