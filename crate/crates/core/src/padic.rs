//! Truncated p-adic linear algebra: idempotent limits of matrix powers,
//! eventual row spaces, Hensel square roots and Newton polygons.
//!
//! Everything works modulo p^m. Results are exact statements about
//! residues at that precision; the caller chooses m.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{is_probable_prime, mod_inverse, pow_mod, valuation, Rat};
use crate::error::{invalid, unsupported, Result};
use crate::exactmat::{elementary_divisors, IntMatrix, RatMatrix};

/// Largest power table kept during cycle detection before switching to the
/// closed-form exponent.
const CYCLE_TABLE_CAP: usize = 1 << 14;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PadicInt {
    pub p: BigInt,
    pub m: u32,
    pub value: BigInt,
}

impl PadicInt {
    pub fn new(value: &BigInt, p: &BigInt, m: u32) -> Self {
        let q = p.pow(m);
        PadicInt { p: p.clone(), m, value: value.mod_floor(&q) }
    }

    /// Base-p digits, least significant first, exactly m of them.
    pub fn digits(&self) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(self.m as usize);
        let mut x = self.value.clone();
        for _ in 0..self.m {
            let (q, r) = x.div_mod_floor(&self.p);
            out.push(r);
            x = q;
        }
        out
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.value, self.p, self.m)
    }
}

/// A square matrix of residues modulo p^m.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PadicMatrix {
    pub p: BigInt,
    pub m: u32,
    pub entries: IntMatrix,
}

impl PadicMatrix {
    pub fn new(a: &IntMatrix, p: &BigInt, m: u32) -> Self {
        let q = p.pow(m);
        PadicMatrix { p: p.clone(), m, entries: reduce(a, &q) }
    }

    pub fn modulus(&self) -> BigInt {
        self.p.pow(self.m)
    }

    pub fn mul(&self, other: &PadicMatrix) -> PadicMatrix {
        assert_eq!((&self.p, self.m), (&other.p, other.m));
        let q = self.modulus();
        PadicMatrix { p: self.p.clone(), m: self.m, entries: reduce(&self.entries.mul(&other.entries), &q) }
    }

    pub fn pow(&self, e: &BigInt) -> PadicMatrix {
        let q = self.modulus();
        let n = self.entries.rows();
        let mut result = reduce(&IntMatrix::identity(n), &q);
        let mut base = self.entries.clone();
        let mut e = e.clone();
        let two = BigInt::from(2);
        while e.is_positive() {
            if e.is_odd() {
                result = reduce(&result.mul(&base), &q);
            }
            e /= &two;
            if e.is_positive() {
                base = reduce(&base.mul(&base), &q);
            }
        }
        PadicMatrix { p: self.p.clone(), m: self.m, entries: result }
    }

    pub fn is_idempotent(&self) -> bool {
        self.mul(self) == *self
    }

    /// Reduce to a lower precision.
    pub fn truncate(&self, m: u32) -> PadicMatrix {
        assert!(m <= self.m);
        PadicMatrix::new(&self.entries, &self.p, m)
    }

    pub fn row_module(&self) -> RowModule {
        RowModule::from_rows(&self.entries.to_rows(), &self.p, self.m)
    }

    /// Column module of I − E, the kernel of an idempotent E.
    pub fn complement_columns(&self) -> RowModule {
        let n = self.entries.rows();
        let c = IntMatrix::identity(n).sub(&self.entries);
        RowModule::from_rows(&c.transpose().to_rows(), &self.p, self.m)
    }
}

fn reduce(a: &IntMatrix, q: &BigInt) -> IntMatrix {
    IntMatrix::new(a.rows(), a.cols(), a.entries().iter().map(|x| x.mod_floor(q)).collect())
}

/// How the idempotent exponent was found.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum IdempotentMethod {
    CycleDetection,
    ClosedForm,
}

fn check_prime(p: &BigInt) -> Result<()> {
    if !is_probable_prime(p) {
        return invalid(format!("{} is not prime", p));
    }
    Ok(())
}

/// The idempotent power E ≡ A^e (mod p^m) with its exponent.
///
/// Powers are tabulated until one repeats (tail r, period t) and e is the
/// least multiple of t that is ≥ r. If the table outgrows its cap, e falls
/// back to lcm{p^f − 1 : f ≤ N} · p^(m+N): that kills the nilpotent Fitting
/// part and is a multiple of the exponent of GL_N(ℤ/p^m).
pub fn matrix_idempotent(a: &IntMatrix, p: &BigInt, m: u32) -> Result<(PadicMatrix, BigInt)> {
    let (e, exp, _) = matrix_idempotent_with(a, p, m, CYCLE_TABLE_CAP)?;
    Ok((e, exp))
}

pub fn matrix_idempotent_with(a: &IntMatrix, p: &BigInt, m: u32, cap: usize) -> Result<(PadicMatrix, BigInt, IdempotentMethod)> {
    if !a.is_square() {
        return invalid("idempotent needs a square matrix");
    }
    if m == 0 {
        return invalid("precision must be at least 1");
    }
    check_prime(p)?;
    let base = PadicMatrix::new(a, p, m);
    if let Some(e) = cycle_exponent(&base, cap) {
        let ep = base.pow(&e);
        debug_assert!(ep.is_idempotent());
        return Ok((ep, e, IdempotentMethod::CycleDetection));
    }
    let e = closed_form_exponent(p, m, a.rows());
    let ep = base.pow(&e);
    assert!(ep.is_idempotent(), "closed-form exponent did not give an idempotent");
    Ok((ep, e, IdempotentMethod::ClosedForm))
}

fn cycle_exponent(base: &PadicMatrix, cap: usize) -> Option<BigInt> {
    let mut seen: HashMap<IntMatrix, u64> = HashMap::new();
    let mut cur = base.clone();
    let mut k: u64 = 1;
    loop {
        if let Some(&r) = seen.get(&cur.entries) {
            let t = k - r;
            let e = t * r.div_ceil(t);
            return Some(BigInt::from(e));
        }
        if seen.len() >= cap {
            return None;
        }
        seen.insert(cur.entries.clone(), k);
        cur = cur.mul(base);
        k += 1;
    }
}

pub fn closed_form_exponent(p: &BigInt, m: u32, n: usize) -> BigInt {
    let mut l = BigInt::one();
    for f in 1..=n as u32 {
        l = l.lcm(&(p.pow(f) - 1u32));
    }
    l * p.pow(m + n as u32)
}

/// Row span of E_(p)(A) modulo p^m.
pub fn eventual_row_space(a: &IntMatrix, p: &BigInt, m: u32) -> Result<RowModule> {
    Ok(matrix_idempotent(a, p, m)?.0.row_module())
}

/// A submodule of (ℤ/p^m)^N in Howell form: echelon rows whose pivots are
/// powers of p, entries above a pivot reduced below it, and closed under the
/// p^(m−k) multiples that clear a pivot p^k. Equal modules have equal forms.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RowModule {
    pub p: BigInt,
    pub m: u32,
    pub dim: usize,
    pub rows: Vec<Vec<BigInt>>,
    /// (pivot column, p-valuation of the pivot)
    pub pivots: Vec<(usize, u32)>,
}

impl RowModule {
    pub fn from_rows(rows: &[Vec<BigInt>], p: &BigInt, m: u32) -> RowModule {
        let dim = rows.first().map_or(0, |r| r.len());
        let q = p.pow(m);
        let mut pending: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|x| x.mod_floor(&q)).collect()).collect();
        let mut done: Vec<Vec<BigInt>> = Vec::new();
        let mut pivots = Vec::new();
        for c in 0..dim {
            let best = pending
                .iter()
                .enumerate()
                .filter(|(_, r)| !r[c].is_zero())
                .map(|(i, r)| (valuation(&r[c], p).unwrap(), i))
                .min();
            let Some((k, idx)) = best else { continue };
            let mut row = pending.swap_remove(idx);
            let pk = p.pow(k);
            let unit = &row[c] / &pk;
            let inv = mod_inverse(&unit, &q).expect("unit part is invertible");
            for x in row.iter_mut() {
                *x = (&*x * &inv).mod_floor(&q);
            }
            for r in pending.iter_mut() {
                if r[c].is_zero() {
                    continue;
                }
                let f = &r[c] / &pk;
                for j in 0..dim {
                    r[j] = (&r[j] - &f * &row[j]).mod_floor(&q);
                }
            }
            for r in done.iter_mut() {
                let f = r[c].div_floor(&pk);
                if !f.is_zero() {
                    for j in 0..dim {
                        r[j] = (&r[j] - &f * &row[j]).mod_floor(&q);
                    }
                }
            }
            if k > 0 {
                let mult = p.pow(m - k);
                let extra: Vec<BigInt> = row.iter().map(|x| (x * &mult).mod_floor(&q)).collect();
                if extra.iter().any(|x| !x.is_zero()) {
                    pending.push(extra);
                }
            }
            pending.retain(|r| r.iter().any(|x| !x.is_zero()));
            done.push(row);
            pivots.push((c, k));
        }
        RowModule { p: p.clone(), m, dim, rows: done, pivots }
    }

    pub fn modulus(&self) -> BigInt {
        self.p.pow(self.m)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Invariant factor valuations: M ≅ ⊕ ℤ/p^(m−k) over the returned k < m.
    pub fn invariant_valuations(&self) -> Vec<u32> {
        if self.rows.is_empty() {
            return vec![];
        }
        let q = self.modulus();
        let mut stacked: Vec<Vec<BigInt>> = self.rows.clone();
        for i in 0..self.dim {
            let mut r = vec![BigInt::zero(); self.dim];
            r[i] = q.clone();
            stacked.push(r);
        }
        elementary_divisors(&IntMatrix::from_big_rows(stacked))
            .iter()
            .filter(|d| **d != q)
            .map(|d| valuation(d, &self.p).unwrap())
            .collect()
    }

    /// Rank of the free part: invariant factors that are units.
    pub fn free_rank(&self) -> usize {
        self.invariant_valuations().iter().filter(|&&k| k == 0).count()
    }

    /// Minimal number of generators.
    pub fn generator_count(&self) -> usize {
        self.invariant_valuations().len()
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        let q = self.modulus();
        let mut rest: Vec<BigInt> = v.iter().map(|x| x.mod_floor(&q)).collect();
        for (row, &(c, k)) in self.rows.iter().zip(&self.pivots) {
            let pk = self.p.pow(k);
            let (f, r) = rest[c].div_rem(&pk);
            if !r.is_zero() {
                return false;
            }
            for j in 0..self.dim {
                rest[j] = (&rest[j] - &f * &row[j]).mod_floor(&q);
            }
        }
        rest.iter().all(Zero::is_zero)
    }

    /// Membership for a vector with p-integral rational entries.
    pub fn contains_rat(&self, v: &[Rat]) -> bool {
        let q = self.modulus();
        let mut ints = Vec::with_capacity(v.len());
        for x in v {
            match crate::arith::rat_mod(x, &q) {
                Some(r) => ints.push(r),
                None => return false,
            }
        }
        self.contains(&ints)
    }

    /// Image under right multiplication by an integer matrix.
    pub fn image(&self, j: &IntMatrix) -> RowModule {
        let rows: Vec<Vec<BigInt>> = self.rows.iter().map(|r| j.vec_mul(r)).collect();
        if rows.is_empty() {
            return RowModule { p: self.p.clone(), m: self.m, dim: j.cols(), rows: vec![], pivots: vec![] };
        }
        RowModule::from_rows(&rows, &self.p, self.m)
    }
}

/// rowspan(E_(p)(B)·J) = rowspan(E_(p)(A)) modulo p^m.
pub fn check_witness_padic(a: &IntMatrix, b: &IntMatrix, j: &IntMatrix, p: &BigInt, m: u32) -> Result<bool> {
    let ga = eventual_row_space(a, p, m)?;
    let gb = eventual_row_space(b, p, m)?;
    Ok(gb.image(j) == ga)
}

/// Same condition for a witness with p-integral rational entries.
pub fn check_witness_padic_rat(a: &IntMatrix, b: &IntMatrix, j: &RatMatrix, p: &BigInt, m: u32) -> Result<bool> {
    let q = p.pow(m);
    let mut entries = Vec::with_capacity(j.entries().len());
    for x in j.entries() {
        match crate::arith::rat_mod(x, &q) {
            Some(r) => entries.push(r),
            None => return Ok(false),
        }
    }
    let ji = IntMatrix::new(j.rows(), j.cols(), entries);
    check_witness_padic(a, b, &ji, p, m)
}

/// A square root of a modulo an odd prime p.
pub fn sqrt_mod_prime(a: &BigInt, p: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(p);
    if a.is_zero() {
        return Some(BigInt::zero());
    }
    let one = BigInt::one();
    let pm1 = p - &one;
    if pow_mod(&a, &(&pm1 / 2), p) != one {
        return None;
    }
    // Tonelli–Shanks
    let mut q = pm1.clone();
    let mut s = 0u32;
    while q.is_even() {
        q /= 2;
        s += 1;
    }
    let mut z = BigInt::from(2);
    while pow_mod(&z, &(&pm1 / 2), p) == one {
        z += 1;
    }
    let mut mm = s;
    let mut c = pow_mod(&z, &q, p);
    let mut t = pow_mod(&a, &q, p);
    let mut r = pow_mod(&a, &((&q + 1) / 2), p);
    while t != one {
        let mut i = 0u32;
        let mut tt = t.clone();
        while tt != one {
            tt = (&tt * &tt).mod_floor(p);
            i += 1;
        }
        let b = pow_mod(&c, &BigInt::from(2).pow(mm - i - 1), p);
        mm = i;
        c = (&b * &b).mod_floor(p);
        t = (&t * &c).mod_floor(p);
        r = (&r * &b).mod_floor(p);
    }
    Some(r)
}

/// Square root of a in ℤ/p^m lifting the smaller square root modulo p.
pub fn hensel_sqrt(a: &BigInt, p: &BigInt, m: u32) -> Result<Option<PadicInt>> {
    check_prime(p)?;
    if *p == BigInt::from(2) {
        return unsupported("square roots at p = 2");
    }
    if (a % p).is_zero() {
        return unsupported("square root of a non-unit");
    }
    let Some(r0) = sqrt_mod_prime(a, p) else { return Ok(None) };
    let r0 = std::cmp::min(r0.clone(), p - &r0);
    let mut x = r0;
    let mut prec = 1u32;
    while prec < m {
        prec = std::cmp::min(2 * prec, m);
        let q = p.pow(prec);
        let fx = (&x * &x - a).mod_floor(&q);
        let inv = mod_inverse(&(&x * 2), &q).expect("2x is a unit");
        x = (&x - fx * inv).mod_floor(&q);
    }
    Ok(Some(PadicInt::new(&x, p, m)))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NewtonPolygon {
    /// (slope, horizontal length); the slope is the valuation of that many roots
    pub segments: Vec<(Rat, usize)>,
    pub unit_root_count: usize,
    /// Roots equal to zero (trailing zero coefficients).
    pub zero_roots: usize,
}

/// Lower convex hull of the points (i, v_p(c_i)) of a monic polynomial
/// written as x^N + c_1 x^(N−1) + … + c_N.
pub fn newton_polygon(coeffs: &[BigInt], p: &BigInt) -> NewtonPolygon {
    let n = coeffs.len() - 1;
    let mut last = n;
    while last > 0 && coeffs[last].is_zero() {
        last -= 1;
    }
    let zero_roots = n - last;
    let pts: Vec<(i64, i64)> = (0..=last)
        .filter(|&i| !coeffs[i].is_zero())
        .map(|i| (i as i64, valuation(&coeffs[i], p).unwrap() as i64))
        .collect();
    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop the middle point unless it lies strictly below the chord
            if (y2 - y1) * (pt.0 - x1) >= (pt.1 - y1) * (x2 - x1) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let segments: Vec<(Rat, usize)> = hull
        .windows(2)
        .map(|w| {
            let dx = w[1].0 - w[0].0;
            (Rat::new(BigInt::from(w[1].1 - w[0].1), BigInt::from(dx)), dx as usize)
        })
        .collect();
    let unit_root_count = (0..=n).filter(|&j| !(&coeffs[j] % p).is_zero()).max().unwrap_or(0);
    NewtonPolygon { segments, unit_root_count, zero_roots }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn two_adic_row_spaces() {
        let a = m(&[&[1, 1], &[2, 0]]);
        let b = m(&[&[0, 1], &[2, 1]]);
        let ga = eventual_row_space(&a, &int(2), 10).unwrap();
        let gb = eventual_row_space(&b, &int(2), 10).unwrap();
        assert_eq!(ga.free_rank(), 1);
        assert!(ga.contains(&ints(&[-1, 1])));
        assert!(gb.contains(&ints(&[-2, 1])));
        assert!(!gb.contains(&ints(&[-1, 1])));
        let j = m(&[&[1, 0], &[1, 1]]);
        assert_eq!(j.vec_mul(&ints(&[-2, 1])), ints(&[-1, 1]));
        assert!(check_witness_padic(&a, &b, &j, &int(2), 10).unwrap());
        assert!(!check_witness_padic(&a, &b, &IntMatrix::identity(2), &int(2), 10).unwrap());
    }

    #[test]
    fn trivial_idempotents() {
        let (e, _) = matrix_idempotent(&m(&[&[2, 1], &[1, 1]]), &int(3), 4).unwrap();
        assert_eq!(e.entries, IntMatrix::identity(2));
        let (e, _) = matrix_idempotent(&m(&[&[5]]), &int(5), 3).unwrap();
        assert!(e.entries.is_zero());
    }

    #[test]
    fn seven_adic_rank_one() {
        let a = m(&[&[3, 1], &[2, 3]]);
        let g = eventual_row_space(&a, &int(7), 6).unwrap();
        assert_eq!((g.free_rank(), g.generator_count()), (1, 1));
        let rho = hensel_sqrt(&int(2), &int(7), 6).unwrap().unwrap();
        // one of ±ρ gives the row (ρ, 1)
        let q = int(7).pow(6);
        let hit = [rho.value.clone(), (&q - &rho.value) % &q].iter().any(|r| g.contains(&[r.clone(), int(1)]));
        assert!(hit);
    }

    #[test]
    fn witness_fails_across_fields() {
        let a = m(&[&[4, 1], &[1, 2]]);
        let b = m(&[&[7, 0], &[0, 1]]);
        assert!(!check_witness_padic(&a, &b, &IntMatrix::identity(2), &int(7), 8).unwrap());
        assert!(check_witness_padic(&a, &a, &IntMatrix::identity(2), &int(7), 8).unwrap());
    }

    #[test]
    fn hensel_digits() {
        let r = hensel_sqrt(&int(2), &int(7), 6).unwrap().unwrap();
        assert_eq!(r.digits(), ints(&[3, 1, 2, 6, 1, 2]));
        assert_eq!(hensel_sqrt(&int(2), &int(5), 4).unwrap(), None);
        assert_eq!(hensel_sqrt(&int(1), &int(7), 3).unwrap().unwrap().value, int(1));
        assert!(hensel_sqrt(&int(3), &int(2), 3).is_err());
        assert!(hensel_sqrt(&int(14), &int(7), 3).is_err());
    }

    #[test]
    fn newton_polygons() {
        let np = newton_polygon(&ints(&[1, -6, 7]), &int(7));
        assert_eq!(np.unit_root_count, 1);
        assert_eq!(np.segments, vec![(Rat::zero(), 1), (Rat::one(), 1)]);
        assert_eq!(newton_polygon(&ints(&[1, -1, -2]), &int(2)).unit_root_count, 1);
        assert_eq!(newton_polygon(&ints(&[1, -2, 1]), &int(3)).unit_root_count, 2);
    }

    #[test]
    fn howell_form_is_canonical() {
        let p = int(3);
        let a = RowModule::from_rows(&[ints(&[3, 1]), ints(&[0, 9])], &p, 3);
        let b = RowModule::from_rows(&[ints(&[6, 2]), ints(&[3, 10])], &p, 3);
        assert_eq!(a, b);
        let c = RowModule::from_rows(&[ints(&[3, 0])], &p, 2);
        assert!(c.contains(&ints(&[6, 0])));
        assert!(!c.contains(&ints(&[1, 0])));
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = IntMatrix> {
        proptest::collection::vec(-6i64..7, n * n)
            .prop_map(move |v| IntMatrix::new(n, n, v.into_iter().map(BigInt::from).collect()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn idempotent_is_unique(a in small_matrix(3), pi in 0usize..3, m in 1u32..4) {
            let p = int([2, 3, 5][pi]);
            let (e1, _, how) = matrix_idempotent_with(&a, &p, m, CYCLE_TABLE_CAP).unwrap();
            let (e2, _, _) = matrix_idempotent_with(&a, &p, m, 0).unwrap();
            prop_assert_eq!(how, IdempotentMethod::CycleDetection);
            prop_assert_eq!(e1.clone(), e2);
            prop_assert!(e1.is_idempotent());
            // E commutes with A and absorbs it on its row space
            let ap = PadicMatrix::new(&a, &p, m);
            prop_assert_eq!(e1.mul(&ap), ap.mul(&e1));
            prop_assert_eq!(e1.mul(&ap).row_module(), e1.row_module());
        }

        #[test]
        fn precision_coherence(a in small_matrix(3), pi in 0usize..3, m in 2u32..5) {
            let p = int([2, 3, 7][pi]);
            let (hi, _) = matrix_idempotent(&a, &p, m).unwrap();
            let (lo, _) = matrix_idempotent(&a, &p, m - 1).unwrap();
            prop_assert_eq!(hi.truncate(m - 1), lo);
        }

        #[test]
        fn row_space_rank_matches_newton_polygon(a in small_matrix(3), pi in 0usize..3) {
            let p = int([2, 3, 5][pi]);
            let g = eventual_row_space(&a, &p, 6).unwrap();
            let np = newton_polygon(&crate::exactmat::char_poly(&a), &p);
            prop_assert_eq!(g.free_rank(), np.unit_root_count);
            prop_assert_eq!(g.generator_count(), g.free_rank());
        }

        #[test]
        fn hensel_roots_square_back(x in 1i64..10_000, pi in 0usize..4, m in 1u32..8) {
            let p = int([3, 5, 7, 11][pi]);
            prop_assume!(x % [3, 5, 7, 11][pi] != 0);
            let a = int(x * x);
            let r = hensel_sqrt(&a, &p, m).unwrap().unwrap();
            let q = p.pow(m);
            prop_assert_eq!((&r.value * &r.value - &a).mod_floor(&q), BigInt::zero());
            let longer = hensel_sqrt(&a, &p, m + 2).unwrap().unwrap();
            prop_assert_eq!(&longer.digits()[..m as usize], &r.digits()[..]);
        }
    }
}
