//! Monic integer polynomials (descending coefficients) and their splitting
//! into linear and quadratic factors.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::number::AlgebraicNumber;
use crate::arith::{divisors, squarefree_decompose, Rat};

pub type Poly = Vec<BigInt>;

pub fn degree(p: &[BigInt]) -> usize {
    p.len() - 1
}

pub fn eval(p: &[BigInt], x: &BigInt) -> BigInt {
    p.iter().fold(BigInt::zero(), |acc, c| acc * x + c)
}

pub fn eval_alg(p: &[BigInt], x: &AlgebraicNumber) -> AlgebraicNumber {
    p.iter()
        .fold(AlgebraicNumber::zero(), |acc, c| &(&acc * x) + &AlgebraicNumber::from_int(c))
}

/// Exact division by a monic divisor; `None` if there is a remainder.
pub fn div_exact(p: &[BigInt], m: &[BigInt]) -> Option<Poly> {
    let dm = degree(m);
    if p.len() < m.len() {
        return None;
    }
    let mut rem = p.to_vec();
    let mut quot = Vec::with_capacity(p.len() - dm);
    for i in 0..=(p.len() - m.len()) {
        let c = rem[i].clone();
        for (j, mj) in m.iter().enumerate() {
            rem[i + j] -= &c * mj;
        }
        quot.push(c);
    }
    if rem[rem.len() - dm..].iter().all(Zero::is_zero) {
        Some(quot)
    } else {
        None
    }
}

pub fn mul(p: &[BigInt], q: &[BigInt]) -> Poly {
    let mut out = vec![BigInt::zero(); p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// An irreducible factor over ℚ of degree at most two.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Factor {
    /// x − r
    Linear(BigInt),
    /// x² + p x + q without rational roots
    Quadratic(BigInt, BigInt),
}

impl Factor {
    pub fn poly(&self) -> Poly {
        match self {
            Factor::Linear(r) => vec![BigInt::one(), -r],
            Factor::Quadratic(p, q) => vec![BigInt::one(), p.clone(), q.clone()],
        }
    }

    pub fn discriminant(&self) -> Option<BigInt> {
        match self {
            Factor::Linear(_) => None,
            Factor::Quadratic(p, q) => Some(p * p - q * 4),
        }
    }

    pub fn is_real(&self) -> bool {
        self.discriminant().map_or(true, |d| d.is_positive())
    }

    /// Real roots in increasing order; empty for complex pairs.
    pub fn real_roots(&self) -> Vec<AlgebraicNumber> {
        match self {
            Factor::Linear(r) => vec![AlgebraicNumber::from_int(r)],
            Factor::Quadratic(p, _) => {
                let disc = self.discriminant().unwrap();
                if !disc.is_positive() {
                    return vec![];
                }
                let half = Rat::new(BigInt::one(), BigInt::from(2));
                let a = -Rat::from_integer(p.clone()) * &half;
                let lo = AlgebraicNumber::with_sqrt(a.clone(), -half.clone(), &disc);
                let hi = AlgebraicNumber::with_sqrt(a, half, &disc);
                vec![lo, hi]
            }
        }
    }

    /// Squarefree d with the roots in ℚ(√d), if irrational and real.
    pub fn field(&self) -> Option<BigInt> {
        let disc = self.discriminant()?;
        if !disc.is_positive() {
            return None;
        }
        Some(squarefree_decompose(&disc).1)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Factorization {
    Complete(Vec<(Factor, u32)>),
    /// Linear and quadratic factors found, plus a cofactor with no such factors.
    Unsupported { split: Vec<(Factor, u32)>, cofactor: Poly },
}

impl Factorization {
    pub fn factors(&self) -> &[(Factor, u32)] {
        match self {
            Factorization::Complete(f) => f,
            Factorization::Unsupported { split, .. } => split,
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self, Factorization::Complete(_))
    }
}

fn push_factor(out: &mut Vec<(Factor, u32)>, f: Factor) {
    if let Some(e) = out.iter_mut().find(|(g, _)| *g == f) {
        e.1 += 1;
    } else {
        out.push((f, 1));
    }
}

/// Split a monic integer polynomial into rational roots and integer quadratic factors.
pub fn factor_poly(coeffs: &[BigInt]) -> Factorization {
    assert!(!coeffs.is_empty() && coeffs[0].is_one(), "polynomial must be monic");
    let mut rest: Poly = coeffs.to_vec();
    let mut found = Vec::new();
    // zero roots
    while degree(&rest) > 0 && rest.last().unwrap().is_zero() {
        rest.pop();
        push_factor(&mut found, Factor::Linear(BigInt::zero()));
    }
    // rational roots are integer divisors of the constant term
    if degree(&rest) > 0 {
        let c0 = rest.last().unwrap().clone();
        for dv in divisors(&c0) {
            for r in [dv.clone(), -dv] {
                while degree(&rest) > 0 && eval(&rest, &r).is_zero() {
                    rest = div_exact(&rest, &[BigInt::one(), -r.clone()]).unwrap();
                    push_factor(&mut found, Factor::Linear(r.clone()));
                }
            }
        }
    }
    // quadratic factors x² + a x + b: b | g(0), (1 + a + b) | g(1), (1 − a + b) | g(−1)
    while degree(&rest) >= 3 {
        match find_quadratic_factor(&rest) {
            Some((a, b)) => {
                let q = vec![BigInt::one(), a.clone(), b.clone()];
                while let Some(next) = div_exact(&rest, &q) {
                    rest = next;
                    push_factor(&mut found, Factor::Quadratic(a.clone(), b.clone()));
                }
            }
            None => break,
        }
    }
    if degree(&rest) == 2 {
        push_factor(&mut found, Factor::Quadratic(rest[1].clone(), rest[2].clone()));
        rest = vec![BigInt::one()];
    }
    found.sort_by(|x, y| factor_key(&x.0).cmp(&factor_key(&y.0)));
    if degree(&rest) == 0 {
        Factorization::Complete(found)
    } else {
        Factorization::Unsupported { split: found, cofactor: rest }
    }
}

fn factor_key(f: &Factor) -> (u8, BigInt, BigInt) {
    match f {
        Factor::Linear(r) => (0, r.clone(), BigInt::zero()),
        Factor::Quadratic(p, q) => (1, p.clone(), q.clone()),
    }
}

fn find_quadratic_factor(g: &[BigInt]) -> Option<(BigInt, BigInt)> {
    let g0 = g.last().unwrap();
    let g1 = eval(g, &BigInt::one());
    let gm1 = eval(g, &-BigInt::one());
    // no rational roots remain, so g(0), g(1), g(−1) are all nonzero
    let d1 = divisors(&g1);
    let dm1 = divisors(&gm1);
    for bd in divisors(g0) {
        for b in [bd.clone(), -bd] {
            for t in d1.iter().flat_map(|x| [x.clone(), -x.clone()]) {
                // 1 + a + b = t
                let a: BigInt = &t - 1 - &b;
                let s: BigInt = BigInt::one() - &a + &b;
                if s.is_zero() || !(&gm1 % &s).is_zero() {
                    continue;
                }
                if !dm1.iter().any(|x| *x == s.abs()) {
                    continue;
                }
                let q = vec![BigInt::one(), a.clone(), b.clone()];
                if div_exact(g, &q).is_some() {
                    return Some((a, b));
                }
            }
        }
    }
    None
}

/// Expand a list of factors back to a polynomial.
pub fn expand(factors: &[(Factor, u32)]) -> Poly {
    let mut p = vec![BigInt::one()];
    for (f, e) in factors {
        for _ in 0..*e {
            p = mul(&p, &f.poly());
        }
    }
    p
}

/// Cauchy bound on the absolute value of the roots.
pub fn root_bound(p: &[BigInt]) -> BigInt {
    p.iter().skip(1).map(|c| c.abs()).max().unwrap_or_else(BigInt::zero) + 1
}
