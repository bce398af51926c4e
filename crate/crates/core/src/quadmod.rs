//! Rank-2 ℤ-modules in a real quadratic field, their norm forms, and the
//! isomorphism test between them.
//!
//! A module with oriented basis (α, β) corresponds to the integral form
//! Nm(xα + yβ)/n, n the positive content. Two modules with the same
//! multiplier ring are homothetic by some f with Nm f > 0 exactly when their
//! forms are properly equivalent; Nm f < 0 swaps the basis and negates.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{is_square, isqrt, prime_divisors, valuation, Rat};
use crate::error::{invalid, unsupported, Result};
use crate::exactmat::{hnf, IntMatrix};
use crate::padic::sqrt_mod_prime;
use crate::spectral::{field_discriminant, AlgebraicNumber, QuadOrder};

/// Integer 2×2 matrix [[p, q], [r, s]].
pub type Mat2 = [[BigInt; 2]; 2];

fn mat2_id() -> Mat2 {
    [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]]
}

fn mat2_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

/// Inverse of a determinant-one matrix.
fn mat2_inv(x: &Mat2) -> Mat2 {
    [[x[1][1].clone(), -&x[0][1]], [-&x[1][0], x[0][0].clone()]]
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BinaryForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl BinaryForm {
    pub fn new(a: BigInt, b: BigInt, c: BigInt) -> Self {
        BinaryForm { a, b, c }
    }

    pub fn from_i64(a: i64, b: i64, c: i64) -> Self {
        BinaryForm { a: a.into(), b: b.into(), c: c.into() }
    }

    pub fn disc(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn content(&self) -> BigInt {
        self.a.gcd(&self.b).gcd(&self.c)
    }

    pub fn neg(&self) -> Self {
        BinaryForm { a: -&self.a, b: -&self.b, c: -&self.c }
    }

    /// F(y, x).
    pub fn swapped(&self) -> Self {
        BinaryForm { a: self.c.clone(), b: self.b.clone(), c: self.a.clone() }
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        &self.a * x * x + &self.b * x * y + &self.c * y * y
    }

    /// F ∘ T, i.e. (x, y) ↦ F(px + qy, rx + sy).
    pub fn compose(&self, t: &Mat2) -> Self {
        let (p, q, r, s) = (&t[0][0], &t[0][1], &t[1][0], &t[1][1]);
        let a = self.eval(p, r);
        let c = self.eval(q, s);
        let b = BigInt::from(2) * &self.a * p * q + &self.b * (p * s + q * r) + BigInt::from(2) * &self.c * r * s;
        BinaryForm { a, b, c }
    }

    fn check_indefinite(&self) -> Result<()> {
        let d = self.disc();
        if !d.is_positive() {
            return unsupported("definite binary forms");
        }
        if is_square(&d) {
            return unsupported("forms with square discriminant");
        }
        Ok(())
    }

    /// |√D − 2|a|| < b < √D
    pub fn is_reduced(&self) -> bool {
        let d = self.disc();
        let two_a = BigInt::from(2) * self.a.abs();
        lt_sqrt(&self.b, &d) && gt_sqrt(&(&self.b + &two_a), &d) && lt_sqrt(&(&two_a - &self.b), &d)
    }

    /// One reduction step (c, r, (r² − D)/4c) together with its SL2 matrix.
    fn rho(&self) -> (BinaryForm, Mat2) {
        let d = self.disc();
        let c_abs = self.c.abs();
        let two_c = BigInt::from(2) * &c_abs;
        let r = if gt_sqrt(&c_abs, &d) {
            let r0 = (-&self.b).mod_floor(&two_c);
            if r0 > c_abs {
                r0 - &two_c
            } else {
                r0
            }
        } else {
            let s = isqrt(&d);
            &s - (&s + &self.b).mod_floor(&two_c)
        };
        let t = (&r + &self.b) / (BigInt::from(2) * &self.c);
        let next = BinaryForm { a: self.c.clone(), b: r.clone(), c: (&r * &r - &d) / (BigInt::from(4) * &self.c) };
        let m = [[BigInt::zero(), -BigInt::one()], [BigInt::one(), t]];
        debug_assert_eq!(self.compose(&m), next);
        (next, m)
    }

    /// A reduced form R = F ∘ T with its transform.
    pub fn reduce(&self) -> Result<(BinaryForm, Mat2)> {
        self.check_indefinite()?;
        let mut f = self.clone();
        let mut t = mat2_id();
        while !f.is_reduced() {
            let (g, m) = f.rho();
            f = g;
            t = mat2_mul(&t, &m);
        }
        Ok((f, t))
    }

    /// The ρ-cycle of a reduced form, each entry paired with U such that entry = self ∘ U.
    pub fn cycle(&self) -> Vec<(BinaryForm, Mat2)> {
        assert!(self.is_reduced());
        let mut out = vec![(self.clone(), mat2_id())];
        let mut f = self.clone();
        let mut t = mat2_id();
        loop {
            let (g, m) = f.rho();
            t = mat2_mul(&t, &m);
            if g == *self {
                break;
            }
            out.push((g.clone(), t.clone()));
            f = g;
        }
        out
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// x < √D for non-square D > 0
fn lt_sqrt(x: &BigInt, d: &BigInt) -> bool {
    x.is_negative() || x * x < *d
}

/// x > √D for non-square D > 0
fn gt_sqrt(x: &BigInt, d: &BigInt) -> bool {
    x.is_positive() && x * x > *d
}

/// T ∈ SL2(ℤ) with F2 = F1 ∘ T, if one exists.
pub fn proper_equivalence(f1: &BinaryForm, f2: &BinaryForm) -> Result<Option<Mat2>> {
    f1.check_indefinite()?;
    f2.check_indefinite()?;
    if f1.disc() != f2.disc() {
        return Ok(None);
    }
    let (r1, t1) = f1.reduce()?;
    let (r2, t2) = f2.reduce()?;
    let targets: HashMap<BinaryForm, Mat2> = r2.cycle().into_iter().collect();
    for (g, v) in r1.cycle() {
        if let Some(u) = targets.get(&g) {
            // F1 T1 V = F2 T2 U
            let t = mat2_mul(&mat2_mul(&t1, &v), &mat2_inv(&mat2_mul(&t2, u)));
            debug_assert_eq!(f1.compose(&t), *f2);
            return Ok(Some(t));
        }
    }
    Ok(None)
}

pub fn forms_properly_equivalent(f1: &BinaryForm, f2: &BinaryForm) -> Result<bool> {
    Ok(proper_equivalence(f1, f2)?.is_some())
}

/// A rank-2 ℤ-module in ℚ(√d) with an oriented basis.
#[derive(Clone, Debug)]
pub struct QuadModule {
    pub d: BigInt,
    pub alpha: AlgebraicNumber,
    pub beta: AlgebraicNumber,
    /// Canonical basis a, b + cω: a > 0, c > 0, 0 ≤ b < a.
    hnf: (Rat, Rat, Rat),
}

impl PartialEq for QuadModule {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.hnf == other.hnf
    }
}

impl Eq for QuadModule {}

/// Sign of (β·σα − α·σβ)/√d.
pub fn orientation(alpha: &AlgebraicNumber, beta: &AlgebraicNumber) -> i32 {
    let x = &(beta * &alpha.conj()) - &(alpha * &beta.conj());
    let (_, b) = x.parts();
    if b.is_positive() {
        1
    } else if b.is_negative() {
        -1
    } else {
        0
    }
}

fn module_hnf(d: &BigInt, gens: &[AlgebraicNumber]) -> Result<(Rat, Rat, Rat)> {
    let coords: Vec<(Rat, Rat)> = gens.iter().map(|g| g.omega_coords(d)).collect();
    let den = coords.iter().fold(BigInt::one(), |acc, (x, y)| acc.lcm(x.denom()).lcm(y.denom()));
    let dr = Rat::from_integer(den.clone());
    let mut m = IntMatrix::zeros(2, gens.len());
    for (j, (x, y)) in coords.iter().enumerate() {
        m[(0, j)] = (y * &dr).to_integer();
        m[(1, j)] = (x * &dr).to_integer();
    }
    let (h, _) = hnf(&m);
    if gens.len() < 2 || h[(0, 0)].is_zero() || h[(1, 1)].is_zero() {
        return invalid("module generators do not span a rank-2 lattice");
    }
    let q = |x: &BigInt| Rat::new(x.clone(), den.clone());
    Ok((q(&h[(1, 1)]), q(&h[(1, 0)]), q(&h[(0, 0)])))
}

impl QuadModule {
    /// Module with the given basis, swapped if needed to make the orientation positive.
    pub fn new(d: &BigInt, alpha: AlgebraicNumber, beta: AlgebraicNumber) -> Result<Self> {
        for x in [&alpha, &beta] {
            if let Some(e) = x.field() {
                if e != d {
                    return invalid("basis element from a different field");
                }
            }
        }
        let o = orientation(&alpha, &beta);
        if o == 0 {
            return invalid("basis elements are linearly dependent over ℚ");
        }
        let hnf = module_hnf(d, &[alpha.clone(), beta.clone()])?;
        let (alpha, beta) = if o > 0 { (alpha, beta) } else { (beta, alpha) };
        Ok(QuadModule { d: d.clone(), alpha, beta, hnf })
    }

    /// ℤ-span of arbitrarily many generators, with the HNF basis.
    pub fn from_generators(d: &BigInt, gens: &[AlgebraicNumber]) -> Result<Self> {
        let (a, b, c) = module_hnf(d, gens)?;
        let alpha = AlgebraicNumber::from(a);
        let beta = AlgebraicNumber::from_omega_coords(&b, &c, d);
        Self::new(d, alpha, beta)
    }

    /// The order O_f = ℤ + fωℤ as a module.
    pub fn order(o: &QuadOrder) -> Self {
        let f = Rat::from_integer(o.conductor.clone());
        Self::new(&o.d, AlgebraicNumber::one(), AlgebraicNumber::from_omega_coords(&Rat::zero(), &f, &o.d)).unwrap()
    }

    pub fn hnf_form(&self) -> (Rat, Rat, Rat) {
        self.hnf.clone()
    }

    pub fn basis(&self) -> (AlgebraicNumber, AlgebraicNumber) {
        (self.alpha.clone(), self.beta.clone())
    }

    pub fn contains(&self, x: &AlgebraicNumber) -> bool {
        let (a, b, c) = &self.hnf;
        let (x0, y0) = x.omega_coords(&self.d);
        let k = &y0 / c;
        if !k.is_integer() {
            return false;
        }
        let rest = x0 - &k * b;
        (rest / a).is_integer()
    }

    pub fn contains_module(&self, other: &QuadModule) -> bool {
        self.contains(&other.alpha) && self.contains(&other.beta)
    }

    pub fn scale(&self, f: &AlgebraicNumber) -> QuadModule {
        QuadModule::new(&self.d, f * &self.alpha, f * &self.beta).expect("nonzero multiplier")
    }

    pub fn mul(&self, other: &QuadModule) -> QuadModule {
        let gens = [
            &self.alpha * &other.alpha,
            &self.alpha * &other.beta,
            &self.beta * &other.alpha,
            &self.beta * &other.beta,
        ];
        QuadModule::from_generators(&self.d, &gens).expect("product of rank-2 modules")
    }

    pub fn pow(&self, e: u32) -> QuadModule {
        let mut r = self.clone();
        for _ in 1..e {
            r = r.mul(self);
        }
        r
    }

    pub fn is_closed_under(&self, x: &AlgebraicNumber) -> bool {
        self.contains(&(x * &self.alpha)) && self.contains(&(x * &self.beta))
    }

    /// Smallest module containing this one and stable under multiplication by x.
    pub fn closure_under(&self, x: &AlgebraicNumber) -> QuadModule {
        let mut cur = self.clone();
        while !cur.is_closed_under(x) {
            let gens = [cur.alpha.clone(), cur.beta.clone(), x * &cur.alpha, x * &cur.beta];
            cur = QuadModule::from_generators(&self.d, &gens).expect("rank-2 lattice");
        }
        cur
    }

    /// Index of this module in the maximal order's coordinates ℤ+ℤω, as a rational.
    pub fn covolume(&self) -> Rat {
        &self.hnf.0 * &self.hnf.2
    }
}

impl fmt::Display for QuadModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.alpha, self.beta)
    }
}

/// ω written in the module's own display style: a + bω with exact coefficients.
pub fn omega_string(x: &AlgebraicNumber, d: &BigInt) -> String {
    let (a, b) = x.omega_coords(d);
    match (a.is_zero(), b.is_zero()) {
        (_, true) => format!("{}", a),
        (true, false) => format!("{}ω", coeff(&b)),
        (false, false) => {
            if b.is_negative() {
                format!("{}-{}ω", a, coeff(&-b))
            } else {
                format!("{}+{}ω", a, coeff(&b))
            }
        }
    }
}

fn coeff(b: &Rat) -> String {
    if b.is_one() {
        String::new()
    } else if *b == -Rat::one() {
        "-".into()
    } else {
        format!("{}", b)
    }
}

/// {x : x·I ⊆ I}, returned through its conductor.
pub fn multiplier_ring(i: &QuadModule) -> QuadOrder {
    let f = module_to_form(i);
    let dk = field_discriminant(&i.d);
    let ratio = f.disc() / &dk;
    let cond = isqrt(&ratio);
    debug_assert_eq!(&cond * &cond * &dk, f.disc());
    QuadOrder::new(&i.d, &cond)
}

/// Nm(xα + yβ) divided by its positive content, for the oriented basis.
pub fn module_to_form(i: &QuadModule) -> BinaryForm {
    let na = i.alpha.norm();
    let nb = i.beta.norm();
    let cross = (&i.alpha * &i.beta.conj()).trace();
    let den = na.denom().lcm(nb.denom()).lcm(cross.denom());
    let dr = Rat::from_integer(den);
    let a = (na * &dr).to_integer();
    let b = (cross * &dr).to_integer();
    let c = (nb * &dr).to_integer();
    let g = a.gcd(&b).gcd(&c);
    BinaryForm { a: a / &g, b: b / &g, c: c / &g }
}

/// A prime of an order O = ℤ[θ], θ = fω, lying over a prime p ∤ f.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeIdeal {
    /// pℤ + (θ − r)ℤ
    Split { p: BigInt, r: BigInt, ramified: bool },
    /// pO
    Inert { p: BigInt },
}

impl PrimeIdeal {
    pub fn p(&self) -> &BigInt {
        match self {
            PrimeIdeal::Split { p, .. } | PrimeIdeal::Inert { p } => p,
        }
    }

    pub fn as_module(&self, order: &QuadOrder) -> QuadModule {
        let theta = order_generator(order);
        match self {
            PrimeIdeal::Split { p, r, .. } => QuadModule::from_generators(
                &order.d,
                &[AlgebraicNumber::from_int(p), &theta - &AlgebraicNumber::from_int(r)],
            )
            .unwrap(),
            PrimeIdeal::Inert { p } => QuadModule::from_generators(
                &order.d,
                &[AlgebraicNumber::from_int(p), &theta * &AlgebraicNumber::from_int(p)],
            )
            .unwrap(),
        }
    }

    /// Whether x = u + vθ ∈ O lies in the prime.
    pub fn contains(&self, order: &QuadOrder, x: &AlgebraicNumber) -> bool {
        let (u, v) = order_coords(order, x);
        match self {
            PrimeIdeal::Split { p, r, .. } => (u + v * Rat::from_integer(r.clone())).to_integer().mod_floor(p).is_zero(),
            PrimeIdeal::Inert { p } => u.to_integer().mod_floor(p).is_zero() && v.to_integer().mod_floor(p).is_zero(),
        }
    }
}

impl fmt::Display for PrimeIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeIdeal::Split { p, r, .. } => write!(f, "({}, theta-{})", p, r),
            PrimeIdeal::Inert { p } => write!(f, "({})", p),
        }
    }
}

/// θ = fω.
pub fn order_generator(order: &QuadOrder) -> AlgebraicNumber {
    AlgebraicNumber::omega(&order.d).scale(&Rat::from_integer(order.conductor.clone()))
}

/// (u, v) with x = u + vθ.
pub fn order_coords(order: &QuadOrder, x: &AlgebraicNumber) -> (Rat, Rat) {
    let (a, b) = x.omega_coords(&order.d);
    (a, b / Rat::from_integer(order.conductor.clone()))
}

/// Primes of O above the rational prime p (p not dividing the conductor).
pub fn primes_above(order: &QuadOrder, p: &BigInt) -> Vec<PrimeIdeal> {
    let theta = order_generator(order);
    let t = theta.trace().to_integer();
    let n = theta.norm().to_integer();
    // roots of x² − t x + n mod p
    let roots: Vec<BigInt> = if *p < BigInt::from(1000) || *p == BigInt::from(2) {
        let mut v = Vec::new();
        let mut r = BigInt::zero();
        while r < *p {
            if (&r * &r - &t * &r + &n).mod_floor(p).is_zero() {
                v.push(r.clone());
            }
            r += 1;
        }
        v
    } else {
        let disc = (&t * &t - BigInt::from(4) * &n).mod_floor(p);
        match sqrt_mod_prime(&disc, p) {
            None => vec![],
            Some(s) => {
                let inv2 = crate::arith::mod_inverse(&BigInt::from(2), p).unwrap();
                let mut v = vec![((&t + &s) * &inv2).mod_floor(p), ((&t - &s) * &inv2).mod_floor(p)];
                v.sort();
                v.dedup();
                v
            }
        }
    };
    match roots.len() {
        0 => vec![PrimeIdeal::Inert { p: p.clone() }],
        1 => vec![PrimeIdeal::Split { p: p.clone(), r: roots[0].clone(), ramified: true }],
        _ => roots.into_iter().map(|r| PrimeIdeal::Split { p: p.clone(), r, ramified: false }).collect(),
    }
}

/// Primes of the order containing the algebraic integer λ.
pub fn lambda_prime_ideals(order: &QuadOrder, lambda: &AlgebraicNumber) -> Vec<PrimeIdeal> {
    let n = lambda.norm().to_integer();
    if n.is_zero() {
        return vec![];
    }
    let mut out = Vec::new();
    for p in prime_divisors(&n) {
        for pr in primes_above(order, &p) {
            if pr.contains(order, lambda) {
                out.push(pr);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleVerdict {
    /// f·𝔞·I_A = I_B with 𝔞 a product of primes dividing λ (empty for a plain homothety).
    Equivalent { multiplier: AlgebraicNumber, twist: Vec<(PrimeIdeal, u32)> },
    NotEquivalent { certificate: String },
    Unsupported(String),
}

/// Some f with f·I = J, if the two modules are homothetic.
pub fn homothety(i: &QuadModule, j: &QuadModule) -> Result<Option<AlgebraicNumber>> {
    if i.d != j.d {
        return Ok(None);
    }
    if i == j {
        return Ok(Some(AlgebraicNumber::one()));
    }
    let fj = module_to_form(j);
    // (basis, sign): Nm f > 0 keeps (α, β); Nm f < 0 pairs with (β, α) and a negated form
    let candidates = [((i.alpha.clone(), i.beta.clone()), 1), ((i.beta.clone(), i.alpha.clone()), -1)];
    for ((a0, b0), sign) in candidates {
        let raw = raw_form(&a0, &b0);
        let g = if sign > 0 { raw } else { raw.neg() };
        let Some(t) = proper_equivalence(&g, &fj)? else { continue };
        // new basis (a0, b0)·T
        let a1 = &a0.scale(&Rat::from_integer(t[0][0].clone())) + &b0.scale(&Rat::from_integer(t[1][0].clone()));
        let f = &j.alpha / &a1;
        if f.scale(&Rat::one()).is_zero() {
            continue;
        }
        if i.scale(&f) == *j {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

fn raw_form(alpha: &AlgebraicNumber, beta: &AlgebraicNumber) -> BinaryForm {
    let na = alpha.norm();
    let nb = beta.norm();
    let cross = (alpha * &beta.conj()).trace();
    let den = na.denom().lcm(nb.denom()).lcm(cross.denom());
    let dr = Rat::from_integer(den);
    let a = (na * &dr).to_integer();
    let b = (cross * &dr).to_integer();
    let c = (nb * &dr).to_integer();
    let g = a.gcd(&b).gcd(&c);
    BinaryForm { a: a / &g, b: b / &g, c: c / &g }
}

/// Cap on the class order searched for a prime above λ.
const CLASS_ORDER_CAP: u32 = 24;

/// Decide whether I_A ⊗ ℤ[1/λ] ≅ I_B ⊗ ℤ[1/λ] as modules, λ an algebraic integer
/// with both modules stable under λ.
pub fn modules_equivalent(ia: &QuadModule, ib: &QuadModule, lambda: &AlgebraicNumber) -> Result<ModuleVerdict> {
    if ia.d != ib.d {
        return Ok(ModuleVerdict::NotEquivalent { certificate: "modules lie in different fields".into() });
    }
    if let Some(e) = lambda.field() {
        if *e != ia.d {
            return invalid("λ lies in a different field");
        }
    }
    if !ia.is_closed_under(lambda) || !ib.is_closed_under(lambda) {
        return invalid("modules are not stable under λ");
    }
    if ia == ib {
        return Ok(ModuleVerdict::Equivalent { multiplier: AlgebraicNumber::one(), twist: vec![] });
    }
    let oa = multiplier_ring(ia);
    let ob = multiplier_ring(ib);
    let nm = lambda.norm().to_integer();
    let lambda_primes = if nm.is_zero() { vec![] } else { prime_divisors(&nm) };
    if oa != ob {
        let differing: Vec<BigInt> = prime_divisors(&(&oa.conductor * &ob.conductor))
            .into_iter()
            .filter(|p| valuation(&oa.conductor, p) != valuation(&ob.conductor, p))
            .collect();
        if differing.iter().any(|p| lambda_primes.contains(p)) {
            return Ok(ModuleVerdict::Unsupported(
                "multiplier rings differ at a prime dividing λ".into(),
            ));
        }
        return Ok(ModuleVerdict::NotEquivalent {
            certificate: format!("multiplier rings differ: conductor {} vs {}", oa.conductor, ob.conductor),
        });
    }
    if let Some(f) = homothety(ia, ib)? {
        return Ok(ModuleVerdict::Equivalent { multiplier: f, twist: vec![] });
    }
    let fa = module_to_form(ia);
    let fb = module_to_form(ib);
    if nm.abs().is_one() {
        return Ok(ModuleVerdict::NotEquivalent {
            certificate: format!(
                "norm forms {} and {} are not properly equivalent in either orientation and λ is a unit",
                fa, fb
            ),
        });
    }
    // twist by primes above λ that are invertible in the order
    let order = oa.clone();
    let mut gens: Vec<(PrimeIdeal, QuadModule, u32)> = Vec::new();
    let mut skipped = false;
    for pr in lambda_prime_ideals(&order, lambda) {
        if (&order.conductor % pr.p()).is_zero() {
            skipped = true;
            continue;
        }
        let m = pr.as_module(&order);
        let Some(k) = class_order(&m, &order)? else {
            return Ok(ModuleVerdict::Unsupported(format!("class order of {} exceeds the search cap", pr)));
        };
        gens.push((pr, m, k));
    }
    let mut exps = vec![0u32; gens.len()];
    loop {
        // advance the mixed-radix counter; the all-zero twist was tried above
        let mut i = 0;
        while i < exps.len() {
            exps[i] += 1;
            if exps[i] < gens[i].2 {
                break;
            }
            exps[i] = 0;
            i += 1;
        }
        if i == exps.len() {
            break;
        }
        let mut twisted = ia.clone();
        for (g, &e) in gens.iter().zip(&exps) {
            if e > 0 {
                twisted = twisted.mul(&g.1.pow(e));
            }
        }
        if let Some(f) = homothety(&twisted, ib)? {
            let twist = gens.iter().zip(&exps).filter(|(_, &e)| e > 0).map(|(g, &e)| (g.0.clone(), e)).collect();
            return Ok(ModuleVerdict::Equivalent { multiplier: f, twist });
        }
    }
    if skipped {
        return Ok(ModuleVerdict::Unsupported("a prime above λ divides the conductor".into()));
    }
    Ok(ModuleVerdict::NotEquivalent {
        certificate: format!(
            "norm forms {} and {} are not equivalent modulo the classes of the primes above λ",
            fa, fb
        ),
    })
}

/// Order of the class of an invertible ideal in Pic(O), if at most the cap.
fn class_order(m: &QuadModule, order: &QuadOrder) -> Result<Option<u32>> {
    let o = QuadModule::order(order);
    let mut cur = m.clone();
    for k in 1..=CLASS_ORDER_CAP {
        if homothety(&cur, &o)?.is_some() {
            return Ok(Some(k));
        }
        cur = cur.mul(m);
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::spectral::fundamental_unit;
    use proptest::prelude::*;

    fn w(x: i64, y: i64, d: i64) -> AlgebraicNumber {
        AlgebraicNumber::from_omega_coords(&rat(x, 1), &rat(y, 1), &int(d))
    }

    fn unit_determinant_pair() -> (QuadModule, QuadModule) {
        let d = int(101);
        let i1 = QuadModule::new(&d, AlgebraicNumber::from(2), w(-5, 1, 101)).unwrap();
        let i2 = QuadModule::new(&d, AlgebraicNumber::from(2), w(4, 1, 101)).unwrap();
        (i1, i2)
    }

    #[test]
    fn forms_of_the_worked_modules() {
        let (i1, i2) = unit_determinant_pair();
        assert_eq!(module_to_form(&i1), BinaryForm::from_i64(4, -18, -5));
        assert_eq!(module_to_form(&i2), BinaryForm::from_i64(4, 18, -5));
        let d2 = int(2);
        let z = QuadModule::new(&d2, AlgebraicNumber::one(), AlgebraicNumber::sqrt_of(&d2)).unwrap();
        assert_eq!(module_to_form(&z), BinaryForm::from_i64(1, 0, -2));
    }

    #[test]
    fn multiplier_rings() {
        let (i1, i2) = unit_determinant_pair();
        assert_eq!(multiplier_ring(&i1).conductor, int(2));
        assert_eq!(multiplier_ring(&i2).conductor, int(2));
        let d = int(101);
        let max = QuadModule::new(&d, AlgebraicNumber::one(), AlgebraicNumber::omega(&d)).unwrap();
        assert_eq!(multiplier_ring(&max).conductor, int(1));
        // oracle: direct closure checks
        assert!(i1.is_closed_under(&AlgebraicNumber::sqrt_of(&d)));
        assert!(!i1.is_closed_under(&AlgebraicNumber::omega(&d)));
    }

    #[test]
    fn proper_equivalence_examples() {
        let f = BinaryForm::from_i64(1, 0, -2);
        assert!(forms_properly_equivalent(&f, &f).unwrap());
        assert!(forms_properly_equivalent(&f, &BinaryForm::from_i64(-1, 0, 2)).unwrap());
        let a = BinaryForm::from_i64(4, -18, -5);
        let b = BinaryForm::from_i64(4, 18, -5);
        assert!(!forms_properly_equivalent(&a, &b).unwrap());
        // b is the opposite of a; the norm −1 unit ε sends F to −F(y, x), so a ~ −b
        assert!(!forms_properly_equivalent(&a, &a.neg()).unwrap());
        assert!(forms_properly_equivalent(&a, &b.neg()).unwrap());
        assert!(forms_properly_equivalent(&a, &a.swapped().neg()).unwrap());
        // negative-norm multipliers pair F with −F(y, x)
        assert!(!forms_properly_equivalent(&b.swapped().neg(), &a).unwrap());
        assert!(forms_properly_equivalent(&BinaryForm::from_i64(1, 0, 1), &f).is_err());
    }

    #[test]
    fn worked_modules_are_not_equivalent() {
        let (i1, i2) = unit_determinant_pair();
        let lambda = AlgebraicNumber::quadratic(rat(10, 1), rat(1, 1), int(101));
        let v = modules_equivalent(&i1, &i2, &lambda).unwrap();
        assert!(matches!(v, ModuleVerdict::NotEquivalent { .. }), "{:?}", v);
        let v = modules_equivalent(&i1, &i1.scale(&lambda), &lambda).unwrap();
        assert!(matches!(v, ModuleVerdict::Equivalent { .. }));
        let v = modules_equivalent(&i1, &i1, &lambda).unwrap();
        assert_eq!(v, ModuleVerdict::Equivalent { multiplier: AlgebraicNumber::one(), twist: vec![] });
    }

    #[test]
    fn parity_oracle_for_worked_pair() {
        // independent description: I₁ = {a + bω : a ≡ b mod 2}, I₂ = {a + bω : a even}
        let (i1, i2) = unit_determinant_pair();
        for a in -6i64..7 {
            for b in -6i64..7 {
                let x = w(a, b, 101);
                assert_eq!(i1.contains(&x), (a - b).rem_euclid(2) == 0);
                assert_eq!(i2.contains(&x), a.rem_euclid(2) == 0);
            }
        }
        // the fundamental unit is ≡ 1 mod 2 in ℤ[ω], so ±λ^k fixes both parity classes
        let lambda = fundamental_unit(&QuadOrder::maximal(&int(101))).unwrap();
        let (x, y) = lambda.omega_coords(&int(101));
        assert_eq!((x, y), (rat(9, 1), rat(2, 1)));
        for k in 0..4u32 {
            for s in [1i64, -1] {
                let u = lambda.pow(k).scale(&rat(s, 1));
                assert_eq!(i1.scale(&u), i1);
                assert_ne!(i1.scale(&u), i2);
            }
        }
    }

    #[test]
    fn hnf_canonical() {
        let (i1, _) = unit_determinant_pair();
        let j = QuadModule::from_generators(&int(101), &[AlgebraicNumber::from(2), w(-5, 1, 101), w(-3, 1, 101)]).unwrap();
        assert_eq!(i1, j);
        assert_eq!(i1.hnf_form(), (rat(2, 1), rat(1, 1), rat(1, 1)));
    }

    #[test]
    fn prime_ideals_above_lambda() {
        // λ = 3 + √2 has norm 7
        let o = QuadOrder::maximal(&int(2));
        let lambda = AlgebraicNumber::quadratic(rat(3, 1), rat(1, 1), int(2));
        let ps = lambda_prime_ideals(&o, &lambda);
        assert_eq!(ps.len(), 1);
        assert!(ps[0].as_module(&o).contains(&lambda));
        let conj = lambda.conj();
        assert!(!ps[0].contains(&o, &conj));
    }

    #[test]
    fn twisting_by_a_nonprincipal_prime() {
        // ℚ(√10): class number 2, the prime above 3 is not principal; λ = 1 + √10 has norm −9
        let d = int(10);
        let o = QuadOrder::maximal(&d);
        let lambda = AlgebraicNumber::quadratic(rat(1, 1), rat(1, 1), d.clone());
        let ps = lambda_prime_ideals(&o, &lambda);
        let p = ps[0].as_module(&o);
        let om = QuadModule::order(&o);
        assert!(homothety(&p, &om).unwrap().is_none());
        let v = modules_equivalent(&om, &p, &lambda).unwrap();
        assert!(matches!(v, ModuleVerdict::Equivalent { ref twist, .. } if !twist.is_empty()), "{:?}", v);
        // with a unit λ the same pair is not equivalent
        let unit = AlgebraicNumber::quadratic(rat(3, 1), rat(1, 1), d.clone());
        let v = modules_equivalent(&om, &p, &unit).unwrap();
        assert!(matches!(v, ModuleVerdict::NotEquivalent { .. }));
    }

    fn field_element() -> impl Strategy<Value = AlgebraicNumber> {
        (-9i64..10, -9i64..10, 1i64..4).prop_filter_map("nonzero", |(x, y, den)| {
            let v = AlgebraicNumber::from_omega_coords(&rat(x, den), &rat(y, den), &int(101));
            if v.is_zero() { None } else { Some(v) }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn form_class_under_multipliers(f in field_element()) {
            let (i1, _) = unit_determinant_pair();
            let scaled = i1.scale(&f);
            let base = module_to_form(&i1);
            let g = module_to_form(&scaled);
            let expect = if f.norm().is_positive() { base.clone() } else { base.swapped().neg() };
            prop_assert!(forms_properly_equivalent(&expect, &g).unwrap());
            prop_assert_eq!(multiplier_ring(&scaled), multiplier_ring(&i1));
            prop_assert_eq!(homothety(&i1, &scaled).unwrap().map(|h| i1.scale(&h)), Some(scaled.clone()));
        }

        #[test]
        fn equivalence_is_symmetric_and_transitive(f in field_element(), g in field_element()) {
            let (i1, i2) = unit_determinant_pair();
            let lambda = AlgebraicNumber::quadratic(rat(10, 1), rat(1, 1), int(101));
            let a = i1.scale(&f);
            let b = i1.scale(&g);
            let eq = |x: &QuadModule, y: &QuadModule| matches!(modules_equivalent(x, y, &lambda).unwrap(), ModuleVerdict::Equivalent { .. });
            prop_assert!(eq(&a, &b) && eq(&b, &a));
            prop_assert!(!eq(&a, &i2.scale(&g)) && !eq(&i2.scale(&g), &a));
        }

        #[test]
        fn reduction_cycles_close(a in 1i64..20, b in -30i64..31, c in -20i64..0) {
            let f = BinaryForm::from_i64(a, b, c);
            prop_assume!(!is_square(&f.disc()));
            let (r, t) = f.reduce().unwrap();
            prop_assert_eq!(f.compose(&t), r.clone());
            let cyc = r.cycle();
            prop_assert!(cyc.iter().all(|(g, _)| g.is_reduced()));
            prop_assert!(BigInt::from(cyc.len()) <= f.disc());
            let (last, u) = cyc.last().unwrap();
            prop_assert_eq!(r.compose(u), last.clone());
            prop_assert_eq!(last.rho().0, r);
        }
    }
}
