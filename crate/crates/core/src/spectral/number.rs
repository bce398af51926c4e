//! Exact numbers in ℚ or a real quadratic field ℚ(√d).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{squarefree_decompose, Rat};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum AlgebraicNumber {
    Rational(Rat),
    /// a + b√d, d squarefree and > 1, b ≠ 0
    Quadratic { a: Rat, b: Rat, d: BigInt },
}

use AlgebraicNumber::{Quadratic, Rational};

impl AlgebraicNumber {
    pub fn rational(q: Rat) -> Self {
        Rational(q)
    }

    pub fn from_int(n: &BigInt) -> Self {
        Rational(Rat::from_integer(n.clone()))
    }

    pub fn zero() -> Self {
        Rational(Rat::zero())
    }

    pub fn one() -> Self {
        Rational(Rat::one())
    }

    /// a + b√d with d squarefree > 1; collapses to Rational when b = 0.
    pub fn quadratic(a: Rat, b: Rat, d: BigInt) -> Self {
        assert!(d > BigInt::one(), "quadratic part needs d > 1");
        if b.is_zero() {
            Rational(a)
        } else {
            Quadratic { a, b, d }
        }
    }

    /// a + b√n for an arbitrary positive n, pulling squares out of n.
    pub fn with_sqrt(a: Rat, b: Rat, n: &BigInt) -> Self {
        assert!(n.is_positive(), "square root of a non-positive number");
        let (s, d) = squarefree_decompose(n);
        if d.is_one() {
            return Rational(a + b * Rat::from_integer(s));
        }
        Self::quadratic(a, b * Rat::from_integer(s), d)
    }

    /// √n as an exact number.
    pub fn sqrt_of(n: &BigInt) -> Self {
        Self::with_sqrt(Rat::zero(), Rat::one(), n)
    }

    pub fn parts(&self) -> (Rat, Rat) {
        match self {
            Rational(q) => (q.clone(), Rat::zero()),
            Quadratic { a, b, .. } => (a.clone(), b.clone()),
        }
    }

    pub fn field(&self) -> Option<&BigInt> {
        match self {
            Rational(_) => None,
            Quadratic { d, .. } => Some(d),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Rational(_))
    }

    pub fn to_rat(&self) -> Option<Rat> {
        match self {
            Rational(q) => Some(q.clone()),
            Quadratic { .. } => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rational(q) if q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Rational(q) if q.is_one())
    }

    pub fn conj(&self) -> Self {
        match self {
            Rational(_) => self.clone(),
            Quadratic { a, b, d } => Quadratic { a: a.clone(), b: -b, d: d.clone() },
        }
    }

    pub fn norm(&self) -> Rat {
        match self {
            Rational(q) => q * q,
            Quadratic { a, b, d } => a * a - b * b * Rat::from_integer(d.clone()),
        }
    }

    pub fn trace(&self) -> Rat {
        match self {
            Rational(q) => q * Rat::from_integer(BigInt::from(2)),
            Quadratic { a, .. } => a * Rat::from_integer(BigInt::from(2)),
        }
    }

    pub fn is_algebraic_integer(&self) -> bool {
        match self {
            Rational(q) => q.is_integer(),
            Quadratic { .. } => self.trace().is_integer() && self.norm().is_integer(),
        }
    }

    pub fn scale(&self, k: &Rat) -> Self {
        match self {
            Rational(q) => Rational(q * k),
            Quadratic { a, b, d } => Self::quadratic(a * k, b * k, d.clone()),
        }
    }

    /// Exact sign as a real number.
    pub fn signum(&self) -> i32 {
        match self {
            Rational(q) => sign_rat(q),
            Quadratic { a, b, d } => sign_sum(a, b, d),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Self {
        match self {
            Rational(q) => Rational(q.recip()),
            Quadratic { .. } => {
                let n = self.norm();
                self.conj().scale(&n.recip())
            }
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// Real comparison, also across different quadratic fields.
    pub fn cmp_real(&self, other: &Self) -> Ordering {
        let s = match (self, other) {
            (Quadratic { d: d1, .. }, Quadratic { d: d2, .. }) if d1 != d2 => {
                let (a1, b1) = self.parts();
                let (a2, b2) = other.parts();
                sign_two_roots(&(a1 - a2), &b1, d1, &b2, d2)
            }
            _ => (self - other).signum(),
        };
        s.cmp(&0)
    }

    /// Coordinates (x, y) with self = x + yω in the maximal order basis of ℚ(√d).
    pub fn omega_coords(&self, d: &BigInt) -> (Rat, Rat) {
        let (a, b) = self.parts();
        if let Some(e) = self.field() {
            assert_eq!(e, d, "element of a different field");
        }
        if d_is_one_mod_four(d) {
            (a - &b, b * Rat::from_integer(BigInt::from(2)))
        } else {
            (a, b)
        }
    }

    pub fn from_omega_coords(x: &Rat, y: &Rat, d: &BigInt) -> Self {
        if d_is_one_mod_four(d) {
            let half = Rat::new(BigInt::one(), BigInt::from(2));
            Self::quadratic(x + y * &half, y * half, d.clone())
        } else {
            Self::quadratic(x.clone(), y.clone(), d.clone())
        }
    }

    /// The generator ω of the maximal order of ℚ(√d).
    pub fn omega(d: &BigInt) -> Self {
        Self::from_omega_coords(&Rat::zero(), &Rat::one(), d)
    }
}

pub fn d_is_one_mod_four(d: &BigInt) -> bool {
    d.mod_floor(&BigInt::from(4)).is_one()
}

fn sign_rat(q: &Rat) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

/// Sign of a + b√d.
fn sign_sum(a: &Rat, b: &Rat, d: &BigInt) -> i32 {
    let sa = sign_rat(a);
    let sb = sign_rat(b);
    if sb == 0 {
        return sa;
    }
    if sa == 0 || sa == sb {
        return sb;
    }
    // opposite signs: compare a² with b²d
    let lhs = a * a;
    let rhs = b * b * Rat::from_integer(d.clone());
    match lhs.cmp(&rhs) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => 0,
    }
}

/// Sign of a + b√d1 − c√d2 for distinct squarefree d1, d2.
fn sign_two_roots(a: &Rat, b: &Rat, d1: &BigInt, c: &Rat, d2: &BigInt) -> i32 {
    let su = sign_sum(a, b, d1);
    let sv = sign_rat(c);
    if su != sv {
        return if su > sv { 1 } else { -1 };
    }
    if su == 0 {
        return 0;
    }
    // same sign: compare u² and c²d2, then flip for negatives
    let two = Rat::from_integer(BigInt::from(2));
    let d1r = Rat::from_integer(d1.clone());
    let d2r = Rat::from_integer(d2.clone());
    let x = a * a + b * b * &d1r - c * c * d2r;
    let y = two * a * b;
    sign_sum(&x, &y, d1) * su
}

fn same_field(x: &AlgebraicNumber, y: &AlgebraicNumber) -> Option<BigInt> {
    match (x.field(), y.field()) {
        (Some(d1), Some(d2)) => {
            assert_eq!(d1, d2, "arithmetic across different quadratic fields");
            Some(d1.clone())
        }
        (Some(d), None) | (None, Some(d)) => Some(d.clone()),
        (None, None) => None,
    }
}

impl Add for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn add(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        let (a1, b1) = self.parts();
        let (a2, b2) = rhs.parts();
        match same_field(self, rhs) {
            None => Rational(a1 + a2),
            Some(d) => AlgebraicNumber::quadratic(a1 + a2, b1 + b2, d),
        }
    }
}

impl Sub for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn sub(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        self + &(-rhs)
    }
}

impl Neg for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        match self {
            Rational(q) => Rational(-q),
            Quadratic { a, b, d } => Quadratic { a: -a, b: -b, d: d.clone() },
        }
    }
}

impl Neg for AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn neg(self) -> AlgebraicNumber {
        -&self
    }
}

impl Mul for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn mul(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        let (a1, b1) = self.parts();
        let (a2, b2) = rhs.parts();
        match same_field(self, rhs) {
            None => Rational(a1 * a2),
            Some(d) => {
                let dr = Rat::from_integer(d.clone());
                let a = &a1 * &a2 + &b1 * &b2 * dr;
                let b = a1 * b2 + b1 * a2;
                AlgebraicNumber::quadratic(a, b, d)
            }
        }
    }
}

impl Div for &AlgebraicNumber {
    type Output = AlgebraicNumber;
    fn div(self, rhs: &AlgebraicNumber) -> AlgebraicNumber {
        assert!(!rhs.is_zero(), "division by zero");
        self * &rhs.recip()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for AlgebraicNumber {
            type Output = AlgebraicNumber;
            fn $f(self, rhs: AlgebraicNumber) -> AlgebraicNumber {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl From<Rat> for AlgebraicNumber {
    fn from(q: Rat) -> Self {
        Rational(q)
    }
}

impl From<i64> for AlgebraicNumber {
    fn from(n: i64) -> Self {
        Rational(Rat::from_integer(BigInt::from(n)))
    }
}

/// "3/2", "-4", "10+1*sqrt(101)", "1/2-3/2*sqrt(5)".
impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rational(q) => write!(f, "{}", q),
            Quadratic { a, b, d } => {
                if b.is_negative() {
                    write!(f, "{}-{}*sqrt({})", a, -b, d)
                } else {
                    write!(f, "{}+{}*sqrt({})", a, b, d)
                }
            }
        }
    }
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
