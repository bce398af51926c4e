//! Strong local isomorphism at a prime p.
//!
//! The p-adic eventual row space is spanned by left eigenvectors of the
//! p-adic unit eigenvalues. It is defined over ℚ exactly when the set of unit
//! roots is Galois stable; an irreducible quadratic factor with one unit root
//! and one non-unit root forces the field ℚ(√d). A rational J carries one row
//! space onto the other, so these minimal fields must agree.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::squarefree_decompose;
use crate::error::{invalid, Result};
use crate::exactmat::{char_poly, IntMatrix};
use crate::padic::newton_polygon;
use crate::reduction::eventual_range_reduce;
use crate::spectral::{factor_char_poly, Factor, Factorization};

use super::Config;

/// Minimal fields for A and B, one entry per split factor (empty means ℚ).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldPair {
    pub a: String,
    pub b: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalIso {
    Yes(String),
    No(FieldPair),
    Unsupported(String),
}

/// Squarefree d for each quadratic factor with exactly one p-adic unit root,
/// repeated by multiplicity, sorted; `None` if the factorization is incomplete.
fn split_signature(c: &IntMatrix, p: &BigInt) -> Option<(Vec<BigInt>, usize)> {
    let Factorization::Complete(factors) = factor_char_poly(&char_poly(c)) else {
        return None;
    };
    let mut sig = Vec::new();
    let mut unit_rank = 0usize;
    for (f, e) in &factors {
        match f {
            Factor::Linear(r) => {
                if !(r % p).is_zero() {
                    unit_rank += *e as usize;
                }
            }
            Factor::Quadratic(..) => {
                let units = newton_polygon(&f.poly(), p).unit_root_count;
                unit_rank += units * *e as usize;
                if units == 1 {
                    let d = squarefree_decompose(&f.discriminant().unwrap()).1;
                    for _ in 0..*e {
                        sig.push(d.clone());
                    }
                }
            }
        }
    }
    sig.sort();
    Some((sig, unit_rank))
}

fn describe(sig: &[BigInt]) -> String {
    if sig.is_empty() {
        return "Q".into();
    }
    let parts: Vec<String> = sig.iter().map(|d| format!("Q(sqrt({}))", d)).collect();
    parts.join(" + ")
}

/// Compare the minimal fields of definition of the eventual row spaces at p.
pub fn strong_local_iso(a: &IntMatrix, b: &IntMatrix, p: &BigInt, _cfg: &Config) -> Result<LocalIso> {
    if !a.is_square() || !b.is_square() {
        return invalid("local isomorphism needs square matrices");
    }
    let ca = eventual_range_reduce(a)?.c;
    let cb = eventual_range_reduce(b)?.c;
    if ca.rows() != cb.rows() || ca.rows() == 0 {
        return invalid("cores must have equal positive size");
    }
    if !(ca.det() % p).is_zero() {
        return invalid("p must divide det A");
    }
    if ca == cb {
        return Ok(LocalIso::Yes("identical cores".into()));
    }
    let (Some((sa, ra)), Some((sb, rb))) = (split_signature(&ca, p), split_signature(&cb, p)) else {
        return Ok(LocalIso::Unsupported("characteristic polynomial has a factor of degree > 2".into()));
    };
    if sa != sb {
        return Ok(LocalIso::No(FieldPair { a: describe(&sa), b: describe(&sb) }));
    }
    if ra != rb {
        return Ok(LocalIso::No(FieldPair {
            a: format!("{} (row-space rank {})", describe(&sa), ra),
            b: format!("{} (row-space rank {})", describe(&sb), rb),
        }));
    }
    if ra > 2 {
        return Ok(LocalIso::Unsupported(format!("eventual row space has rank {}", ra)));
    }
    if sa.is_empty() {
        return Ok(LocalIso::Yes("both eventual row spaces are defined over Q".into()));
    }
    if sa.len() == 1 && ca.rows() == 2 {
        // one irreducible factor with one unit root: both row spaces are the
        // eigenline of the same unit root, swapped by a Galois-equivariant map
        return Ok(LocalIso::Yes(format!("both minimal fields are {}", describe(&sa))));
    }
    Ok(LocalIso::Unsupported("several split factors".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    #[test]
    fn rational_against_quadratic_row_space() {
        let a = m(&[&[4, 1], &[1, 2]]);
        let b = m(&[&[7, 0], &[0, 1]]);
        let r = strong_local_iso(&a, &b, &int(7), &Config::default()).unwrap();
        let LocalIso::No(f) = r else { panic!("{:?}", r) };
        assert_eq!(f.a, "Q(sqrt(2))");
        assert_eq!(f.b, "Q");
    }

    #[test]
    fn transpose_pair_at_seven() {
        let a = m(&[&[3, 1], &[2, 3]]);
        let r = strong_local_iso(&a, &a.transpose(), &int(7), &Config::default()).unwrap();
        assert!(matches!(r, LocalIso::Yes(_)));
    }

    #[test]
    fn identical_and_bad_prime() {
        let a = m(&[&[1, 1], &[2, 0]]);
        assert!(matches!(strong_local_iso(&a, &a, &int(2), &Config::default()).unwrap(), LocalIso::Yes(_)));
        assert!(strong_local_iso(&a, &a, &int(3), &Config::default()).is_err());
    }
}
