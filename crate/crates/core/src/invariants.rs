//! The invariant battery: prime sets of the determinant, Ulm numbers of the
//! torsion quotient, trace-range modules and extension-class matrices.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{prime_divisors, valuation};
use crate::error::{invalid, unsupported, Result};
use crate::exactmat::{char_poly, elementary_divisors, is_primitive, IntMatrix};
use crate::padic::{matrix_idempotent, PadicMatrix};
use crate::quadmod::{lambda_prime_ideals, PrimeIdeal, QuadModule};
use crate::reduction::eventual_range_reduce;
use crate::spectral::{
    dominant_data, inner_product_of, perron_data, AlgebraicNumber, FieldTag, InnerProduct, PerronData, QuadOrder,
};

/// Prime divisors of |n|, ascending.
pub fn prim_set(n: &BigInt) -> Result<Vec<BigInt>> {
    if n.is_zero() {
        return invalid("prime set of zero");
    }
    Ok(prime_divisors(n))
}

/// N − max{j : p ∤ c_j} for p | det A, with c₀ = 1.
pub fn ulm_number(coeffs: &[BigInt], p: &BigInt) -> u32 {
    let n = coeffs.len() - 1;
    let j = (0..=n).rev().find(|&j| !(&coeffs[j] % p).is_zero()).unwrap_or(0);
    (n - j) as u32
}

/// Ulm numbers n(p) at the primes of det A; singular input is reduced first.
pub fn ulm_numbers(a: &IntMatrix) -> Result<BTreeMap<BigInt, u32>> {
    if !a.is_square() {
        return invalid("Ulm numbers need a square matrix");
    }
    let c = core_matrix(a)?;
    let coeffs = char_poly(&c);
    let mut out = BTreeMap::new();
    if c.rows() == 0 {
        return Ok(out);
    }
    for p in prim_set(&c.det())? {
        let k = ulm_number(&coeffs, &p);
        out.insert(p, k);
    }
    Ok(out)
}

/// Elementary divisors of ℤᴺ / A^k ℤᴺ.
pub fn torsion_quotient_oracle(a: &IntMatrix, k: u32) -> Result<Vec<BigInt>> {
    if !a.is_square() || a.det().is_zero() {
        return invalid("torsion quotient needs a nonsingular square matrix");
    }
    if k == 0 {
        return invalid("exponent must be at least 1");
    }
    Ok(elementary_divisors(&a.pow(k)))
}

/// The nonsingular matrix carrying the dimension group.
fn core_matrix(a: &IntMatrix) -> Result<IntMatrix> {
    if a.det().is_zero() {
        Ok(eventual_range_reduce(a)?.c)
    } else {
        Ok(a.clone())
    }
}

/// Image of the trace functional, up to isomorphism of ℤ[1/λ]-modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceModule {
    /// content · ℤ[1/λ]; content is 1 for a primitive eigenvector.
    Rational { lambda: BigInt, content: BigInt },
    /// A ℤ[λ]-stable lattice in ℚ(√d).
    Quadratic { module: QuadModule, lambda: AlgebraicNumber },
}

impl fmt::Display for TraceModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceModule::Rational { lambda, content } if content.is_one() => write!(f, "Z[1/{}]", lambda),
            TraceModule::Rational { lambda, content } => write!(f, "{}*Z[1/{}]", content, lambda),
            TraceModule::Quadratic { module, .. } => {
                let (a, b) = module.basis();
                write!(
                    f,
                    "{}Z+({})Z",
                    crate::quadmod::omega_string(&a, &module.d),
                    crate::quadmod::omega_string(&b, &module.d)
                )
            }
        }
    }
}

/// Perron data for primitive input, dominant-eigenvalue data otherwise.
pub fn spectral_data(a: &IntMatrix) -> Result<PerronData> {
    if a.is_nonnegative() && a.rows() > 0 && is_primitive(a)? {
        perron_data(a)
    } else {
        dominant_data(a)
    }
}

pub fn trace_range_module(a: &IntMatrix) -> Result<TraceModule> {
    let pd = spectral_data(a)?;
    trace_module_of(&pd)
}

pub fn trace_module_of(pd: &PerronData) -> Result<TraceModule> {
    match &pd.field {
        FieldTag::Rational => {
            let lambda = pd.lambda.to_rat().expect("rational eigenvalue").to_integer();
            let g = pd
                .v_row
                .iter()
                .fold(BigInt::zero(), |acc, x| acc.gcd(&x.to_rat().expect("rational vector").to_integer()));
            let content = crate::arith::strip_primes(&g, &prime_divisors(&lambda));
            Ok(TraceModule::Rational { lambda, content })
        }
        FieldTag::Quadratic(d) => {
            let entries: Vec<AlgebraicNumber> = pd.v_row.iter().filter(|x| !x.is_zero()).cloned().collect();
            let base = if entries.len() == 2 {
                QuadModule::new(d, entries[0].clone(), entries[1].clone())
            } else {
                QuadModule::from_generators(d, &entries)
            };
            let base = match base {
                Ok(m) => m,
                Err(_) => return unsupported("eigenvector entries do not span a rank-2 module"),
            };
            let module = base.closure_under(&pd.lambda);
            Ok(TraceModule::Quadratic { module, lambda: pd.lambda.clone() })
        }
    }
}

/// The order ℤ[λ] for a quadratic algebraic integer λ = a + bω: conductor |b|.
pub fn lambda_order(lambda: &AlgebraicNumber) -> Option<QuadOrder> {
    let d = lambda.field()?.clone();
    let (_, b) = lambda.omega_coords(&d);
    if !b.is_integer() {
        return None;
    }
    Some(QuadOrder::new(&d, &b.to_integer().abs()))
}

/// A prime (rational or of ℤ[λ]) dividing λ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LambdaPrime {
    Rational(BigInt),
    Ideal(PrimeIdeal),
}

impl fmt::Display for LambdaPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LambdaPrime::Rational(p) => write!(f, "{}", p),
            LambdaPrime::Ideal(i) => write!(f, "{}", i),
        }
    }
}

pub fn lambda_primes(lambda: &AlgebraicNumber) -> Vec<LambdaPrime> {
    match lambda.to_rat() {
        Some(q) => {
            let n = q.to_integer();
            if n.is_zero() {
                vec![]
            } else {
                prime_divisors(&n).into_iter().map(LambdaPrime::Rational).collect()
            }
        }
        None => {
            let order = lambda_order(lambda).expect("λ is an algebraic integer");
            lambda_prime_ideals(&order, lambda).into_iter().map(LambdaPrime::Ideal).collect()
        }
    }
}

/// Columns spanning the kernel of E_(p)(A) mod p^m, one per p-divisible eigenvalue.
pub fn extension_matrix(a: &IntMatrix, p: &BigInt, m: u32) -> Result<PadicMatrix> {
    if !a.is_square() {
        return invalid("extension matrix needs a square matrix");
    }
    let n = a.rows();
    if !(a.det() % p).is_zero() {
        return Ok(PadicMatrix { p: p.clone(), m, entries: IntMatrix::zeros(n, 0) });
    }
    let (e, _) = matrix_idempotent(a, p, m)?;
    // I − E is idempotent, so its image is free; columns independent mod p are a basis
    let q = e.modulus();
    let c = IntMatrix::identity(n).sub(&e.entries);
    let mut echelon: Vec<Vec<BigInt>> = Vec::new();
    let mut keep = Vec::new();
    for j in 0..n {
        let col: Vec<BigInt> = c.col(j).iter().map(|x| x.mod_floor(&q)).collect();
        if reduce_mod_p(&mut echelon, col.iter().map(|x| x.mod_floor(p)).collect(), p) {
            keep.push(col);
        }
    }
    Ok(PadicMatrix { p: p.clone(), m, entries: IntMatrix::from_columns(n, &keep) })
}

/// Add v to a row echelon basis over 𝔽_p; false if v was already in the span.
fn reduce_mod_p(echelon: &mut Vec<Vec<BigInt>>, mut v: Vec<BigInt>, p: &BigInt) -> bool {
    for row in echelon.iter() {
        let piv = row.iter().position(|x| !x.is_zero()).unwrap();
        if !v[piv].is_zero() {
            let f = &v[piv] * crate::arith::mod_inverse(&row[piv], p).unwrap();
            for (x, y) in v.iter_mut().zip(row) {
                *x = (&*x - &f * y).mod_floor(p);
            }
        }
    }
    if v.iter().all(Zero::is_zero) {
        return false;
    }
    echelon.push(v);
    true
}

/// Default p-adic precision: 8(1 + v_p(det A)).
pub fn default_precision(p: &BigInt, det: &BigInt) -> u32 {
    let v = if det.is_zero() { 0 } else { valuation(det, p).unwrap_or(0) };
    8 * (1 + v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantReport {
    pub dimension: usize,
    /// Size of the nonsingular core after reduction.
    pub core_dimension: usize,
    pub det: BigInt,
    pub prim_det: Vec<BigInt>,
    pub ulm: BTreeMap<BigInt, u32>,
    pub lambda: Option<AlgebraicNumber>,
    pub field_tag: Option<FieldTag>,
    pub lambda_primes: Vec<LambdaPrime>,
    pub trace_module: Option<TraceModule>,
    pub inner_product: Option<InnerProduct>,
    /// Report only.
    pub extension_columns: BTreeMap<BigInt, PadicMatrix>,
    /// Why the spectral fields are absent, if they are.
    pub spectral_note: Option<String>,
}

/// Compute every invariant of A. `precision` overrides the per-prime default.
pub fn analyze(a: &IntMatrix, precision: Option<u32>) -> Result<InvariantReport> {
    if !a.is_square() || a.rows() == 0 {
        return invalid("analysis needs a nonempty square matrix");
    }
    let c = core_matrix(a)?;
    let det = if c.rows() == 0 { BigInt::zero() } else { c.det() };
    let prim_det = if det.is_zero() { vec![] } else { prim_set(&det)? };
    let ulm = ulm_numbers(&c)?;
    let mut extension_columns = BTreeMap::new();
    for p in &prim_det {
        let m = precision.unwrap_or_else(|| default_precision(p, &det));
        extension_columns.insert(p.clone(), extension_matrix(&c, p, m)?);
    }
    let mut report = InvariantReport {
        dimension: a.rows(),
        core_dimension: c.rows(),
        det,
        prim_det,
        ulm,
        lambda: None,
        field_tag: None,
        lambda_primes: vec![],
        trace_module: None,
        inner_product: None,
        extension_columns,
        spectral_note: None,
    };
    let pd = if c.rows() == a.rows() { spectral_data(a) } else if c.rows() == 0 { unsupported("nilpotent matrix") } else { dominant_data(&c) };
    match pd {
        Ok(pd) => {
            report.lambda = Some(pd.lambda.clone());
            report.field_tag = Some(pd.field.clone());
            report.lambda_primes = lambda_primes(&pd.lambda);
            match trace_module_of(&pd) {
                Ok(t) => report.trace_module = Some(t),
                Err(e) => report.spectral_note = Some(e.to_string()),
            }
            report.inner_product = Some(inner_product_of(&pd));
        }
        Err(e) => report.spectral_note = Some(e.to_string()),
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::exactmat::snf;
    use crate::padic::eventual_row_space;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn prime_sets() {
        assert_eq!(prim_set(&int(-2)).unwrap(), ints(&[2]));
        assert!(prim_set(&int(1)).unwrap().is_empty());
        assert_eq!(prim_set(&int(12)).unwrap(), ints(&[2, 3]));
        assert!(prim_set(&int(0)).is_err());
        assert_eq!(prim_set(&m(&[&[1, 1], &[2, 0]]).det()).unwrap(), ints(&[2]));
    }

    #[test]
    fn ulm_examples() {
        // x² − 6x + 7 at p = 7
        assert_eq!(ulm_number(&ints(&[1, -6, 7]), &int(7)), 1);
        let u = ulm_numbers(&m(&[&[4, 1], &[1, 2]])).unwrap();
        assert_eq!(u[&int(7)], 1);
        let u = ulm_numbers(&IntMatrix::diag(&[2, 2, 3])).unwrap();
        assert_eq!(u[&int(2)], 2);
        assert_eq!(u[&int(3)], 1);
        // x² − x − 2 at p = 2
        assert_eq!(ulm_number(&ints(&[1, -1, -2]), &int(2)), 1);
    }

    #[test]
    fn torsion_oracle_examples() {
        assert_eq!(torsion_quotient_oracle(&IntMatrix::diag(&[2, 3]), 2).unwrap(), ints(&[1, 36]));
        assert_eq!(torsion_quotient_oracle(&IntMatrix::identity(3), 5).unwrap(), ints(&[1, 1, 1]));
        let ed = torsion_quotient_oracle(&m(&[&[1, 1], &[2, 0]]), 3).unwrap();
        let vals: u32 = ed.iter().map(|x| valuation(x, &int(2)).unwrap()).sum();
        assert_eq!(vals, 3);
        assert_eq!(ed.iter().filter(|x| valuation(x, &int(2)).unwrap() > 0).count(), 1);
        // SNF cross-check
        let (s, _, _) = snf(&IntMatrix::diag(&[4, 9]));
        assert_eq!(s[(1, 1)], int(36));
    }

    fn omega101(x: i64, y: i64) -> AlgebraicNumber {
        AlgebraicNumber::from_omega_coords(&rat(x, 1), &rat(y, 1), &int(101))
    }

    #[test]
    fn trace_modules() {
        let a = m(&[&[19, 5], &[4, 1]]);
        let TraceModule::Quadratic { module, .. } = trace_range_module(&a).unwrap() else { panic!() };
        let expect = QuadModule::new(&int(101), AlgebraicNumber::from(2), omega101(-5, 1)).unwrap();
        assert_eq!(module, expect);
        assert_eq!(module.basis(), expect.basis());
        let TraceModule::Quadratic { module, .. } = trace_range_module(&a.transpose()).unwrap() else { panic!() };
        assert_eq!(module, QuadModule::new(&int(101), AlgebraicNumber::from(2), omega101(4, 1)).unwrap());
        let t = trace_range_module(&m(&[&[1, 5], &[3, 3]])).unwrap();
        assert_eq!(t, TraceModule::Rational { lambda: int(6), content: int(1) });
        assert_eq!(t.to_string(), "Z[1/6]");
    }

    #[test]
    fn extension_examples() {
        let e = extension_matrix(&m(&[&[1, 1], &[2, 0]]), &int(2), 8).unwrap();
        assert_eq!(e.entries.cols(), 1);
        let col = e.entries.col(0);
        let q = int(2).pow(8);
        // proportional to (1, 1) modulo 2^8
        assert!(((&col[0] - &col[1]) % &q).is_zero() && (&col[0] % BigInt::from(2)).is_one());
        let e = extension_matrix(&IntMatrix::diag(&[2, 3]), &int(5), 4).unwrap();
        assert_eq!(e.entries.cols(), 0);
        let e = extension_matrix(&IntMatrix::diag(&[2, 3]), &int(3), 4).unwrap();
        assert_eq!(e.entries.col(0), ints(&[0, 1]));
    }

    #[test]
    fn report_for_singular_input() {
        let a = m(&[&[1, 1, 1], &[0, 1, 2], &[2, 1, 0]]);
        let r = analyze(&a, None).unwrap();
        assert_eq!(r.core_dimension, 2);
        assert!(r.ulm.keys().all(|p| r.prim_det.contains(p)));
        assert!(r.lambda.is_some());
    }

    #[test]
    fn lambda_prime_ideals_of_quadratic_lambda() {
        // λ = 2 + √3 is a unit
        let l = AlgebraicNumber::quadratic(rat(2, 1), rat(1, 1), int(3));
        assert!(lambda_primes(&l).is_empty());
        let l = AlgebraicNumber::quadratic(rat(3, 1), rat(1, 1), int(2));
        assert_eq!(lambda_primes(&l).len(), 1);
        assert_eq!(lambda_primes(&AlgebraicNumber::from(12)).len(), 2);
    }

    fn nonsingular_3x3() -> impl Strategy<Value = IntMatrix> {
        proptest::collection::vec(-4i64..5, 9)
            .prop_map(|v| IntMatrix::new(3, 3, v.into_iter().map(BigInt::from).collect()))
            .prop_filter("nonsingular", |a| !a.det().is_zero())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn ulm_cross_validation(a in nonsingular_3x3()) {
            let det = a.det();
            let ulm = ulm_numbers(&a).unwrap();
            for p in prim_set(&det).unwrap() {
                let vp = valuation(&det, &p).unwrap();
                let n = ulm[&p] as usize;
                let mut prev: Option<Vec<u32>> = None;
                for k in 1..=6u32 {
                    let mut vals: Vec<u32> = torsion_quotient_oracle(&a, k).unwrap().iter().map(|x| valuation(x, &p).unwrap()).collect();
                    vals.sort();
                    prop_assert_eq!(vals.iter().sum::<u32>(), k * vp);
                    if k >= 3 {
                        // the unit part stays at valuation 0; the n(p) others grow
                        prop_assert_eq!(vals.iter().filter(|&&v| v > 0).count(), n);
                        if let Some(pv) = &prev {
                            let grown = vals.iter().zip(pv).filter(|(x, y)| x > y).count();
                            prop_assert!(grown >= 1 || n == 0);
                        }
                    }
                    if k == 6 {
                        prop_assert!(vals.iter().filter(|&&v| v > 0).all(|&v| v >= 2));
                    }
                    prev = Some(vals);
                }
            }
        }

        #[test]
        fn transpose_invariance(a in nonsingular_3x3()) {
            prop_assert_eq!(prim_set(&a.det()).unwrap(), prim_set(&a.transpose().det()).unwrap());
            prop_assert_eq!(ulm_numbers(&a).unwrap(), ulm_numbers(&a.transpose()).unwrap());
        }

        #[test]
        fn extension_and_row_space_ranks(a in nonsingular_3x3()) {
            for p in prim_set(&a.det()).unwrap() {
                if p > BigInt::from(50) { continue; }
                let ext = extension_matrix(&a, &p, 6).unwrap();
                let row = eventual_row_space(&a, &p, 6).unwrap();
                prop_assert_eq!(ext.entries.cols() + row.free_rank(), 3);
            }
        }
    }

    #[test]
    fn trace_module_stable_under_squaring() {
        for a in [m(&[&[19, 5], &[4, 1]]), m(&[&[2, 1], &[1, 1]]), m(&[&[3, 2], &[1, 1]])] {
            let (TraceModule::Quadratic { module: m1, lambda }, TraceModule::Quadratic { module: m2, .. }) =
                (trace_range_module(&a).unwrap(), trace_range_module(&a.pow(2)).unwrap())
            else {
                panic!()
            };
            // A² has the same eigenvectors; the module may only grow to its ℤ[λ²]-closure
            assert!(m2.is_closed_under(&lambda.pow(2)));
            let v = crate::quadmod::modules_equivalent(&m1.closure_under(&lambda), &m2.closure_under(&lambda), &lambda).unwrap();
            assert!(matches!(v, crate::quadmod::ModuleVerdict::Equivalent { .. }), "{:?}", v);
        }
    }
}
