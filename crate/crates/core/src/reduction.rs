//! Passing from a singular matrix to the nonsingular action on its eventual
//! range, Drazin inverses, and unimodular bases with a prescribed interior vector.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::arith::Rat;
use crate::error::{invalid, Result};
use crate::exactmat::{complete_to_unimodular, saturate, IntMatrix, RatMatrix};

/// Shift equivalence data A ~ C: AR = RC, SA = CS, SR = C^N, RS = A^N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionResult {
    pub c: IntMatrix,
    pub r: IntMatrix,
    pub s: IntMatrix,
    pub original_rank_deficit: usize,
    /// A is nilpotent and C is the empty matrix.
    pub nilpotent: bool,
    /// The lag ℓ in SR = C^ℓ, RS = A^ℓ (0 for the nonsingular shortcut).
    pub lag: u32,
}

impl ReductionResult {
    pub fn is_trivial(&self) -> bool {
        self.original_rank_deficit == 0
    }

    /// Check the four identities exactly.
    pub fn verify(&self, a: &IntMatrix) -> bool {
        let n = self.lag;
        a.mul(&self.r) == self.r.mul(&self.c)
            && self.s.mul(a) == self.c.mul(&self.s)
            && self.s.mul(&self.r) == self.c.pow(n)
            && self.r.mul(&self.s) == a.pow(n)
    }
}

/// Restrict A to 𝒲₀ = A^N ℚ^N ∩ ℤ^N, using the HNF basis of that lattice.
pub fn eventual_range_reduce(a: &IntMatrix) -> Result<ReductionResult> {
    if !a.is_square() {
        return invalid("reduction needs a square matrix");
    }
    let n = a.rows();
    if !a.det().is_zero() {
        return Ok(ReductionResult {
            c: a.clone(),
            r: IntMatrix::identity(n),
            s: IntMatrix::identity(n),
            original_rank_deficit: 0,
            nilpotent: false,
            lag: 0,
        });
    }
    let an = a.pow(n as u32);
    let lattice = saturate(&an);
    let r = lattice.basis().clone();
    let m = lattice.rank();
    let coords = |x: &IntMatrix| -> IntMatrix {
        let cols: Vec<Vec<BigInt>> = (0..x.cols())
            .map(|j| lattice.coordinates(&x.col(j)).expect("column lies in the eventual range"))
            .collect();
        IntMatrix::from_columns(m, &cols)
    };
    let c = if m == 0 { IntMatrix::zeros(0, 0) } else { coords(&a.mul(&r)) };
    let s = if m == 0 { IntMatrix::zeros(0, n) } else { coords(&an) };
    let out = ReductionResult { c, r, s, original_rank_deficit: n - m, nilpotent: m == 0, lag: n as u32 };
    debug_assert!(m == 0 || out.verify(a));
    Ok(out)
}

/// Drazin inverse through the core-nilpotent splitting ℚ^N = 𝒲(M) ⊕ ker M^N.
pub fn drazin_inverse(m: &IntMatrix) -> Result<RatMatrix> {
    if !m.is_square() {
        return invalid("Drazin inverse needs a square matrix");
    }
    let n = m.rows();
    let mr = m.to_rat();
    if let Some(inv) = mr.inverse() {
        return Ok(inv);
    }
    let red = eventual_range_reduce(m)?;
    if red.nilpotent {
        return Ok(RatMatrix::zeros(n, n));
    }
    let kernel = m.pow(n as u32).to_rat().kernel();
    let rank = red.r.cols();
    let mut p = RatMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..rank {
            p[(i, j)] = red.r[(i, j)].clone().into();
        }
        for (k, v) in kernel.iter().enumerate() {
            p[(i, rank + k)] = v[i].clone();
        }
    }
    let c_inv = red.c.to_rat().inverse().expect("reduced matrix is nonsingular");
    let mut d = RatMatrix::zeros(n, n);
    for i in 0..rank {
        for j in 0..rank {
            d[(i, j)] = c_inv[(i, j)].clone();
        }
    }
    let p_inv = p.inverse().expect("core and nilpotent parts span");
    Ok(p.mul(&d).mul(&p_inv))
}

/// A unimodular W whose columns have u strictly inside their positive cone.
pub fn positive_cone_basis(u: &[BigInt]) -> Result<IntMatrix> {
    let r = u.len();
    if r == 0 || u.iter().all(Zero::is_zero) {
        return invalid("positive cone basis needs a nonzero vector");
    }
    if u.iter().all(Signed::is_positive) {
        return Ok(IntMatrix::identity(r));
    }
    if r == 1 {
        return Ok(IntMatrix::new(1, 1, vec![u[0].signum()]));
    }
    let g = u.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let u0: Vec<BigInt> = u.iter().map(|x| x / &g).collect();
    let mut w = complete_to_unimodular(&u0);
    // u0 = w1 + w2 + ... + wr with w1 = u0 − (c2 + ... + cr)
    for i in 0..r {
        let mut x = w[(i, 0)].clone();
        for j in 1..r {
            x -= &w[(i, j)];
        }
        w[(i, 0)] = x;
    }
    Ok(w)
}

/// Coordinates of u in the columns of W.
pub fn cone_coordinates(w: &IntMatrix, u: &[BigInt]) -> Option<Vec<Rat>> {
    let inv = w.to_rat().inverse()?;
    let ur: Vec<Rat> = u.iter().map(|x| Rat::from_integer(x.clone())).collect();
    Some(inv.mul_vec(&ur))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use num_traits::One;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    #[test]
    fn nonsingular_shortcut() {
        let a = m(&[&[1, 1], &[2, 0]]);
        let red = eventual_range_reduce(&a).unwrap();
        assert_eq!(red.c, a);
        assert_eq!(red.r, IntMatrix::identity(2));
        assert_eq!(red.s, IntMatrix::identity(2));
    }

    #[test]
    fn singular_three_by_three() {
        let a = m(&[&[1, 1, 1], &[0, 1, 2], &[2, 1, 0]]);
        assert!(a.det().is_zero());
        let red = eventual_range_reduce(&a).unwrap();
        assert_eq!(red.c.rows(), 2);
        assert!(!red.c.det().is_zero());
        assert!(red.verify(&a));
        // oracle: rational column rank of A³ is 2 and C has the nonzero eigenvalues of A
        assert_eq!(a.pow(3).to_rat().rank(), 2);
        let cp = crate::exactmat::char_poly(&a);
        let cc = crate::exactmat::char_poly(&red.c);
        assert_eq!(cp[..3], cc[..]);
    }

    #[test]
    fn nilpotent_input() {
        let red = eventual_range_reduce(&m(&[&[0, 1], &[0, 0]])).unwrap();
        assert!(red.nilpotent);
        assert_eq!(red.c.rows(), 0);
    }

    #[test]
    fn drazin_examples() {
        let a = m(&[&[1, 1], &[2, 0]]);
        assert_eq!(drazin_inverse(&a).unwrap(), a.to_rat().inverse().unwrap());
        assert!(drazin_inverse(&m(&[&[0, 1], &[0, 0]])).unwrap().is_zero());
        let d = drazin_inverse(&IntMatrix::diag(&[2, 0])).unwrap();
        assert_eq!(d[(0, 0)], rat(1, 2));
        assert!(d[(1, 1)].is_zero() && d[(0, 1)].is_zero() && d[(1, 0)].is_zero());
    }

    fn check_cone(u: &[BigInt]) {
        let w = positive_cone_basis(u).unwrap();
        assert!(w.det().abs().is_one());
        let c = cone_coordinates(&w, u).unwrap();
        assert!(c.iter().all(|x| x.is_positive()), "coordinates {:?}", c);
    }

    #[test]
    fn cone_examples() {
        assert_eq!(positive_cone_basis(&[int(1), int(1)]).unwrap(), IntMatrix::identity(2));
        check_cone(&[int(1), int(-1)]);
        check_cone(&[int(0), int(1)]);
        check_cone(&[int(-4)]);
        assert!(positive_cone_basis(&[int(0), int(0)]).is_err());
    }

    fn singular_4x4() -> impl Strategy<Value = IntMatrix> {
        (2usize..4).prop_flat_map(|k| {
            (
                proptest::collection::vec(-3i64..4, 4 * k),
                proptest::collection::vec(-3i64..4, k * 4),
            )
                .prop_map(move |(x, y)| {
                    let left = IntMatrix::new(4, k, x.into_iter().map(BigInt::from).collect());
                    let right = IntMatrix::new(k, 4, y.into_iter().map(BigInt::from).collect());
                    left.mul(&right)
                })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reduction_identities(a in singular_4x4()) {
            let red = eventual_range_reduce(&a).unwrap();
            prop_assert!(red.nilpotent || red.verify(&a));
            prop_assert!(red.nilpotent || !red.c.det().is_zero());
        }

        #[test]
        fn drazin_matches_block_construction(
            d in proptest::collection::vec(-4i64..5, 4),
            nil in -3i64..4,
            lo in proptest::collection::vec(-2i64..3, 6),
            up in proptest::collection::vec(-2i64..3, 6),
        ) {
            let dm = IntMatrix::new(2, 2, d.into_iter().map(BigInt::from).collect());
            prop_assume!(!dm.det().is_zero());
            // P = L·U with unit triangular factors, hence unimodular
            let mut l = IntMatrix::identity(4);
            let mut u = IntMatrix::identity(4);
            let mut k = 0;
            for i in 0..4 { for j in 0..i { l[(i, j)] = BigInt::from(lo[k]); u[(j, i)] = BigInt::from(up[k]); k += 1; } }
            let p = l.mul(&u);
            // M = P diag(D, [[0, nil], [0, 0]]) P⁻¹
            let mut blk = IntMatrix::zeros(4, 4);
            for i in 0..2 { for j in 0..2 { blk[(i, j)] = dm[(i, j)].clone(); } }
            blk[(2, 3)] = BigInt::from(nil);
            let p_inv = p.to_rat().inverse().unwrap().to_int().unwrap();
            let mm = p.mul(&blk).mul(&p_inv);
            let mut expect = RatMatrix::zeros(4, 4);
            let di = dm.to_rat().inverse().unwrap();
            for i in 0..2 { for j in 0..2 { expect[(i, j)] = di[(i, j)].clone(); } }
            let expect = p.to_rat().mul(&expect).mul(&p_inv.to_rat());
            let x = drazin_inverse(&mm).unwrap();
            prop_assert_eq!(&x, &expect);
            let mr = mm.to_rat();
            prop_assert_eq!(mr.mul(&x), x.mul(&mr));
            prop_assert_eq!(x.mul(&mr).mul(&x), x.clone());
            prop_assert_eq!(mr.pow(5).mul(&x), mr.pow(4));
        }

        #[test]
        fn cone_basis_is_unimodular(u in proptest::collection::vec(-20i64..21, 1..6)) {
            prop_assume!(u.iter().any(|&x| x != 0));
            let u: Vec<BigInt> = u.into_iter().map(BigInt::from).collect();
            let w = positive_cone_basis(&u).unwrap();
            prop_assert!(w.det().abs().is_one());
            let c = cone_coordinates(&w, &u).unwrap();
            prop_assert!(c.iter().all(|x| x.is_positive()));
        }
    }
}
