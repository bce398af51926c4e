//! Elementary shift equivalence: nonnegative integer K, J with A = KJ and B = JK.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{invalid, unsupported, Result};
use crate::exactmat::IntMatrix;

fn to_small(a: &IntMatrix) -> Result<Vec<i128>> {
    a.entries()
        .iter()
        .map(|x| x.to_i128().filter(|v| v.abs() < (1i128 << 40)))
        .collect::<Option<Vec<_>>>()
        .map_or_else(|| unsupported("entries too large for factorization search"), Ok)
}

fn from_small(n: usize, v: &[i128]) -> IntMatrix {
    IntMatrix::new(n, n, v.iter().map(|&x| BigInt::from(x)).collect())
}

fn mul(n: usize, x: &[i128], y: &[i128]) -> Vec<i128> {
    let mut out = vec![0i128; n * n];
    for i in 0..n {
        for k in 0..n {
            let a = x[i * n + k];
            if a == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += a * y[k * n + j];
            }
        }
    }
    out
}

/// K = A·J⁻¹ for 2×2 J, if it is a nonnegative integer matrix.
fn quotient_2x2(a: &[i128], j: &[i128]) -> Option<Vec<i128>> {
    let det = j[0] * j[3] - j[1] * j[2];
    if det == 0 {
        return None;
    }
    let adj = [j[3], -j[1], -j[2], j[0]];
    let num = mul(2, a, &adj);
    let mut k = Vec::with_capacity(4);
    for x in num {
        if x % det != 0 || x / det < 0 {
            return None;
        }
        k.push(x / det);
    }
    Some(k)
}

fn check_inputs(a: &IntMatrix, target: &IntMatrix) -> Result<()> {
    if !a.is_square() || !target.is_square() || a.rows() != target.rows() {
        return invalid("factorization needs square matrices of equal size");
    }
    if !a.is_nonnegative() || !target.is_nonnegative() {
        return invalid("factorization needs nonnegative matrices");
    }
    Ok(())
}

/// Every nonnegative (K, J) with A = KJ and target = JK, for 2×2 nonsingular A.
///
/// K is nonsingular, so each column of J meets a row of K with a positive
/// entry, and J_kl ≤ K_ik·J_kl ≤ A_il. Entries of J are therefore at most max A.
pub fn elementary_shift_factorizations(a: &IntMatrix, target: &IntMatrix) -> Result<Vec<(IntMatrix, IntMatrix)>> {
    check_inputs(a, target)?;
    if a.rows() != 2 {
        return unsupported("complete factorization search is for 2×2 matrices");
    }
    if a.det() == BigInt::from(0) {
        return unsupported("complete factorization search needs det A ≠ 0");
    }
    let av = to_small(a)?;
    let tv = to_small(target)?;
    let bound = *av.iter().max().unwrap();
    let mut out = Vec::new();
    let mut j = [0i128; 4];
    loop {
        if let Some(k) = quotient_2x2(&av, &j) {
            if mul(2, &j, &k) == tv {
                out.push((from_small(2, &k), from_small(2, &j)));
            }
        }
        let mut i = 0;
        while i < 4 {
            if j[i] < bound {
                j[i] += 1;
                break;
            }
            j[i] = 0;
            i += 1;
        }
        if i == 4 {
            break;
        }
    }
    Ok(out)
}

/// Heuristic search for any size: J entries in [0, bound], K = A·J⁻¹.
pub fn shift_factorizations_bounded(
    a: &IntMatrix,
    target: &IntMatrix,
    bound: u32,
    cap: usize,
) -> Result<Vec<(IntMatrix, IntMatrix)>> {
    check_inputs(a, target)?;
    let n = a.rows();
    let tv = to_small(target)?;
    let cells = n * n;
    let base = bound as u128 + 1;
    if base.checked_pow(cells as u32).map_or(true, |t| t > cap as u128) {
        return unsupported("factorization search space exceeds the candidate cap");
    }
    let ar = a.to_rat();
    let mut out = Vec::new();
    let mut j = vec![0i128; cells];
    loop {
        let jm = from_small(n, &j);
        if let Some(inv) = jm.to_rat().inverse() {
            if let Some(k) = ar.mul(&inv).to_int() {
                if k.is_nonnegative() && jm.mul(&k).entries() == from_small(n, &tv).entries() {
                    out.push((k, jm));
                }
            }
        }
        let mut i = 0;
        while i < cells {
            if j[i] < bound as i128 {
                j[i] += 1;
                break;
            }
            j[i] = 0;
            i += 1;
        }
        if i == cells {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    #[test]
    fn transpose_factorization() {
        let a = m(&[&[1, 1], &[2, 0]]);
        let found = elementary_shift_factorizations(&a, &a.transpose()).unwrap();
        let k = m(&[&[1, 0], &[0, 2]]);
        let j = m(&[&[1, 1], &[1, 0]]);
        assert!(found.contains(&(k, j)));
        for (k, j) in &found {
            assert_eq!(k.mul(j), a);
            assert_eq!(j.mul(k), a.transpose());
        }
    }

    #[test]
    fn no_direct_factorization_between_conjugates() {
        let a1 = m(&[&[4, 1], &[1, 2]]);
        let a2 = m(&[&[3, 1], &[2, 3]]);
        assert!(elementary_shift_factorizations(&a1, &a2).unwrap().is_empty());
        let sq = elementary_shift_factorizations(&a1.pow(2), &a2.pow(2)).unwrap();
        assert!(!sq.is_empty());
        for (k, j) in &sq {
            assert_eq!(k.mul(j), a1.pow(2));
            assert_eq!(j.mul(k), a2.pow(2));
        }
    }

    #[test]
    fn bounded_search_agrees_on_2x2() {
        let a = m(&[&[1, 1], &[2, 0]]);
        let x = elementary_shift_factorizations(&a, &a.transpose()).unwrap();
        let y = shift_factorizations_bounded(&a, &a.transpose(), 2, 1000).unwrap();
        assert_eq!(x.len(), y.len());
        assert!(shift_factorizations_bounded(&m(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]), &IntMatrix::identity(3), 9, 10).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(elementary_shift_factorizations(&m(&[&[1, -1], &[1, 0]]), &m(&[&[1, 1], &[1, 0]])).is_err());
        assert!(elementary_shift_factorizations(&m(&[&[1, 1], &[1, 1]]), &m(&[&[2, 0], &[0, 0]])).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // planted factorizations are always found
        #[test]
        fn planted_pair_found(k in proptest::collection::vec(0i64..4, 4), j in proptest::collection::vec(0i64..4, 4)) {
            let km = IntMatrix::new(2, 2, k.into_iter().map(BigInt::from).collect());
            let jm = IntMatrix::new(2, 2, j.into_iter().map(BigInt::from).collect());
            let a = km.mul(&jm);
            prop_assume!(a.det() != BigInt::from(0));
            let found = elementary_shift_factorizations(&a, &jm.mul(&km)).unwrap();
            prop_assert!(found.contains(&(km, jm)));
        }
    }
}
