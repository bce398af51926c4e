//! Real quadratic orders and their fundamental units.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::number::{d_is_one_mod_four, AlgebraicNumber};
use crate::arith::{is_square, isqrt, squarefree_decompose, Rat};
use crate::error::{invalid, Result};

/// The order of discriminant `disc = f² · D_K` in ℚ(√d).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadOrder {
    pub d: BigInt,
    pub conductor: BigInt,
}

impl QuadOrder {
    pub fn maximal(d: &BigInt) -> Self {
        QuadOrder { d: d.clone(), conductor: BigInt::one() }
    }

    pub fn new(d: &BigInt, conductor: &BigInt) -> Self {
        QuadOrder { d: d.clone(), conductor: conductor.clone() }
    }

    /// ℤ[√n] for a positive non-square n.
    pub fn z_sqrt(n: &BigInt) -> Result<Self> {
        if !n.is_positive() || is_square(n) {
            return invalid("ℤ[√n] needs n positive and not a square");
        }
        Self::from_discriminant(&(n * 4))
    }

    pub fn from_discriminant(disc: &BigInt) -> Result<Self> {
        if !disc.is_positive() || is_square(disc) {
            return invalid(format!("discriminant {} is not real quadratic", disc));
        }
        let r = disc.mod_floor(&BigInt::from(4));
        if !(r.is_zero() || r.is_one()) {
            return invalid(format!("{} is not a discriminant", disc));
        }
        let (s, d) = squarefree_decompose(disc);
        let dk = field_discriminant(&d);
        // disc = f² dk
        let f = if d_is_one_mod_four(&d) { s } else { s / 2 };
        debug_assert_eq!(&f * &f * &dk, *disc);
        Ok(QuadOrder { d, conductor: f })
    }

    pub fn discriminant(&self) -> BigInt {
        &self.conductor * &self.conductor * field_discriminant(&self.d)
    }

    /// Generator θ = (s + √D)/2 with s ≡ D (mod 2); the order is ℤ[θ].
    pub fn theta(&self) -> AlgebraicNumber {
        let disc = self.discriminant();
        let s = if disc.is_odd() { BigInt::one() } else { BigInt::zero() };
        let half = Rat::new(BigInt::one(), BigInt::from(2));
        AlgebraicNumber::with_sqrt(Rat::from_integer(s) * &half, half, &disc)
    }

    pub fn contains(&self, x: &AlgebraicNumber) -> bool {
        let (a, b) = x.omega_coords(&self.d);
        a.is_integer() && (b / Rat::from_integer(self.conductor.clone())).is_integer()
    }
}

pub fn field_discriminant(d: &BigInt) -> BigInt {
    if d_is_one_mod_four(d) {
        d.clone()
    } else {
        d * 4
    }
}

/// Largest integer a with a ≤ (P + √D)/Q, D not a square.
fn floor_quad(p: &BigInt, q: &BigInt, disc: &BigInt) -> BigInt {
    let r = isqrt(disc);
    let le = |a: &BigInt| -> bool {
        // a ≤ (p + √D)/q
        let t = a * q - p;
        if q.is_positive() {
            t.is_negative() || &t * &t < *disc
        } else {
            !t.is_negative() && &t * &t > *disc
        }
    };
    let mut a = (p + &r).div_floor(q);
    while !le(&a) {
        a -= 1;
    }
    while le(&(&a + 1)) {
        a += 1;
    }
    a
}

/// Fundamental unit ε > 1 of a real quadratic order.
///
/// Walks the continued fraction of φ = (√D − s)/2 and returns the first
/// convergent p/q with Nm(p + qθ) = ±1.
pub fn fundamental_unit(order: &QuadOrder) -> Result<AlgebraicNumber> {
    let disc = order.discriminant();
    if !disc.is_positive() {
        return invalid("imaginary order has no fundamental unit");
    }
    let s = if disc.is_odd() { BigInt::one() } else { BigInt::zero() };
    let c = (&s * &s - &disc) / 4;
    let norm = |x: &BigInt, y: &BigInt| -> BigInt { x * x + &s * x * y + &c * y * y };
    let (mut p_prev, mut p) = (BigInt::zero(), BigInt::one());
    let (mut q_prev, mut q) = (BigInt::one(), BigInt::zero());
    let mut pp = -s.clone();
    let mut qq = BigInt::from(2);
    loop {
        let a = floor_quad(&pp, &qq, &disc);
        let pn = &a * &p + &p_prev;
        let qn = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, pn);
        q_prev = std::mem::replace(&mut q, qn);
        if q.is_positive() && norm(&p, &q).abs().is_one() {
            break;
        }
        let pnext = &a * &qq - &pp;
        let qnext = (&disc - &pnext * &pnext) / &qq;
        pp = pnext;
        qq = qnext;
    }
    let theta = order.theta();
    let eps = &AlgebraicNumber::from_int(&p) + &(&theta * &AlgebraicNumber::from_int(&q));
    debug_assert!(eps.is_positive());
    Ok(eps)
}
