//! Integer and rational helpers shared by every module: factorization,
//! valuations, square roots, modular inverses.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: &BigInt) -> Rat {
    Rat::from_integer(n.clone())
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(!n.is_negative(), "isqrt of negative number");
    n.sqrt()
}

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = isqrt(n);
    &r * &r == *n
}

/// p-adic valuation of a nonzero integer. Returns `None` for zero.
pub fn valuation(n: &BigInt, p: &BigInt) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let mut v = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return Some(v);
        }
        m = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn valuation_rat(x: &Rat, p: &BigInt) -> Option<i64> {
    let a = valuation(x.numer(), p)? as i64;
    let b = valuation(x.denom(), p).unwrap_or(0) as i64;
    Some(a - b)
}

pub fn mod_floor(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let e = a.mod_floor(m).extended_gcd(m);
    if e.gcd.is_one() {
        Some(e.x.mod_floor(m))
    } else {
        None
    }
}

/// Reduce a rational with denominator prime to `m` into `[0, m)`.
pub fn rat_mod(x: &Rat, m: &BigInt) -> Option<BigInt> {
    let inv = mod_inverse(x.denom(), m)?;
    Some((x.numer() * inv).mod_floor(m))
}

pub fn pow_mod(base: &BigInt, exp: &BigInt, m: &BigInt) -> BigInt {
    base.mod_floor(m).modpow(exp, m)
}

fn small_primes() -> &'static [u64] {
    &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
}

/// Deterministic for n < 3.3e24, probabilistic-strong beyond.
pub fn is_probable_prime(n: &BigInt) -> bool {
    if *n < int(2) {
        return false;
    }
    for &p in small_primes() {
        let bp = BigInt::from(p);
        if *n == bp {
            return true;
        }
        if (n % &bp).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in small_primes() {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigInt) -> BigInt {
    if n.is_even() {
        return int(2);
    }
    let mut c = BigInt::one();
    loop {
        let f = |x: &BigInt| (x * x + &c) % n;
        let mut x = int(2);
        let mut y = int(2);
        let mut d = BigInt::one();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            d = (&x - &y).abs().gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1;
    }
}

/// Prime factorization of |n| as sorted (prime, exponent) pairs. `n` must be nonzero.
pub fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    assert!(!n.is_zero(), "factorize(0)");
    let mut m = n.abs();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let push = |p: BigInt, out: &mut Vec<(BigInt, u32)>| {
        if let Some(e) = out.iter_mut().find(|(q, _)| *q == p) {
            e.1 += 1;
        } else {
            out.push((p, 1));
        }
    };
    let mut p = 2u64;
    while p < 10_000 {
        let bp = BigInt::from(p);
        if &bp * &bp > m {
            break;
        }
        while (&m % &bp).is_zero() {
            m /= &bp;
            push(bp.clone(), &mut out);
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let mut stack = vec![m];
    while let Some(x) = stack.pop() {
        if x.is_one() {
            continue;
        }
        if is_probable_prime(&x) {
            push(x, &mut out);
            continue;
        }
        let d = pollard_rho(&x);
        stack.push(&x / &d);
        stack.push(d);
    }
    out.sort();
    out
}

/// Distinct prime divisors of |n|.
pub fn prime_divisors(n: &BigInt) -> Vec<BigInt> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// Write n = s^2 * d with d squarefree (sign carried by d).
pub fn squarefree_decompose(n: &BigInt) -> (BigInt, BigInt) {
    assert!(!n.is_zero());
    let mut s = BigInt::one();
    let mut d = if n.is_negative() { -BigInt::one() } else { BigInt::one() };
    for (p, e) in factorize(n) {
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            d *= &p;
        }
    }
    (s, d)
}

/// All positive divisors of |n| (n nonzero), ascending.
pub fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut divs = vec![BigInt::one()];
    for (p, e) in factorize(n) {
        let mut next = Vec::new();
        for d in &divs {
            let mut q = d.clone();
            for _ in 0..=e {
                next.push(q.clone());
                q *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

/// Strip every prime in `primes` from |n|.
pub fn strip_primes(n: &BigInt, primes: &[BigInt]) -> BigInt {
    let mut m = n.abs();
    for p in primes {
        if m.is_zero() {
            break;
        }
        while (&m % p).is_zero() {
            m /= p;
        }
    }
    m
}

/// True when every prime factor of the nonzero integer `n` lies in `primes`.
pub fn is_smooth_over(n: &BigInt, primes: &[BigInt]) -> bool {
    !n.is_zero() && strip_primes(n, primes).is_one()
}

/// Rational gcd of a list: gcd of numerators over lcm of denominators.
pub fn rat_content(xs: &[Rat]) -> Rat {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for x in xs {
        num = num.gcd(x.numer());
        den = den.lcm(x.denom());
    }
    if num.is_zero() {
        return Rat::zero();
    }
    Rat::new(num, den)
}

pub fn sign_of(n: &BigInt) -> i32 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Multiplicative order of `a` modulo `m` (gcd(a, m) = 1). Returns 1 when m = 1.
pub fn mult_order(a: &BigInt, m: &BigInt) -> BigInt {
    if m.is_one() {
        return BigInt::one();
    }
    // Carmichael-free approach: order divides phi(m); reduce phi by its prime factors.
    let mut phi = BigInt::one();
    for (p, e) in factorize(m) {
        phi *= (&p - 1u32) * p.pow(e - 1);
    }
    let mut ord = phi.clone();
    for (q, _) in factorize(&phi) {
        while (&ord % &q).is_zero() && pow_mod(a, &(&ord / &q), m).is_one() {
            ord /= &q;
        }
    }
    ord
}

pub fn to_i64(n: &BigInt) -> Option<i64> {
    n.to_i64()
}
