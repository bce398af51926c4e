//! Residues mod m1 of matrices over ℤ[1/m2] whose determinant is f times a
//! signed product of primes dividing m2.

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{mod_inverse, prime_divisors, strip_primes};
use crate::error::{invalid, unsupported, Result};

/// Row-major entries in [0, m1).
pub type ResidueMatrix = Vec<u64>;

const SIZE_CAP: u128 = 20_000_000;

fn mat_mul(n: usize, x: &[u64], y: &[u64], m: u64) -> ResidueMatrix {
    let mut out = vec![0u64; n * n];
    for i in 0..n {
        for k in 0..n {
            let a = x[i * n + k];
            if a == 0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] = (out[i * n + j] + a * y[k * n + j]) % m;
            }
        }
    }
    out
}

fn small(x: &BigInt, what: &str) -> Result<u64> {
    x.to_u64().filter(|&v| v > 0 && v < 1 << 20).map_or_else(|| invalid(format!("{} out of range", what)), Ok)
}

fn validate(m1: &BigInt, m2: &BigInt, f: &BigInt, n: usize) -> Result<u64> {
    if n == 0 {
        return invalid("dimension must be positive");
    }
    if !m2.is_positive() || f.is_zero() {
        return invalid("m2 must be positive and f nonzero");
    }
    let m = small(m1, "m1")?;
    if !m1.gcd(m2).is_one() {
        return invalid("gcd(m1, m2) must be 1");
    }
    if !m1.gcd(f).is_one() {
        return invalid("gcd(f, m1) must be 1");
    }
    if (m as u128).checked_pow((n * n) as u32).map_or(true, |s| s > SIZE_CAP) {
        return unsupported("residue space too large to enumerate");
    }
    Ok(m)
}

/// Residues of the admissible determinant values f·(±∏ p^k) mod m1.
fn det_residues(m: u64, m2: &BigInt, f: &BigInt) -> BTreeSet<u64> {
    let mb = BigInt::from(m);
    let mut gens: Vec<u64> = prime_divisors(m2).iter().map(|p| p.mod_floor(&mb).to_u64().unwrap()).collect();
    gens.push(m - 1);
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    let one = 1 % m;
    seen.insert(one);
    queue.push_back(one);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = x * g % m;
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    let fr = f.mod_floor(&mb).to_u64().unwrap();
    seen.into_iter().map(|u| u * fr % m).collect()
}

/// The closure of the elementary matrices mod m under multiplication.
fn elementary_closure(n: usize, m: u64) -> Vec<ResidueMatrix> {
    let id: ResidueMatrix = (0..n * n).map(|k| if k % (n + 1) == 0 { 1 % m } else { 0 }).collect();
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                let mut e = id.clone();
                e[i * n + j] = 1 % m;
                gens.push(e);
            }
        }
    }
    let mut seen: HashSet<ResidueMatrix> = HashSet::new();
    seen.insert(id.clone());
    let mut queue = VecDeque::from([id]);
    let mut out = Vec::new();
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = mat_mul(n, &x, g, m);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
        out.push(x);
    }
    out
}

/// G·D·G with G the elementary closure and D the diagonals diag(f·u, 1, …, 1).
pub fn cc_set(m1: &BigInt, m2: &BigInt, f: &BigInt, n: usize) -> Result<BTreeSet<ResidueMatrix>> {
    let m = validate(m1, m2, f, n)?;
    let g = elementary_closure(n, m);
    let mut out = BTreeSet::new();
    for u in det_residues(m, m2, f) {
        let mut d: ResidueMatrix = (0..n * n).map(|k| if k % (n + 1) == 0 { 1 % m } else { 0 }).collect();
        d[0] = u;
        let gd: HashSet<ResidueMatrix> = g.iter().map(|x| mat_mul(n, x, &d, m)).collect();
        for x in &gd {
            for y in &g {
                out.insert(mat_mul(n, x, y, m));
            }
        }
    }
    Ok(out)
}

fn det_i128(n: usize, x: &[i128]) -> i128 {
    match n {
        1 => x[0],
        2 => x[0] * x[3] - x[1] * x[2],
        _ => {
            let mut total = 0i128;
            for c in 0..n {
                let minor: Vec<i128> = (1..n)
                    .flat_map(|r| (0..n).filter(move |&k| k != c).map(move |k| (r, k)))
                    .map(|(r, k)| x[r * n + k])
                    .collect();
                let s = if c % 2 == 0 { 1 } else { -1 };
                total += s * x[c] * det_i128(n - 1, &minor);
            }
            total
        }
    }
}

/// Oracle: integer matrices with entries in [−r, r], divided by m2^e for
/// e ≤ e_max, whose determinant is exactly ±f·(primes of m2)^k.
pub fn cc_set_brute_force(
    m1: &BigInt,
    m2: &BigInt,
    f: &BigInt,
    n: usize,
    r: i64,
    e_max: u32,
) -> Result<BTreeSet<ResidueMatrix>> {
    let m = validate(m1, m2, f, n)?;
    let primes = prime_divisors(m2);
    let target = strip_primes(&f.abs(), &primes);
    let inv = mod_inverse(m2, &BigInt::from(m)).unwrap().to_u64().unwrap();
    let cells = n * n;
    let side = (2 * r + 1) as u128;
    if side.checked_pow(cells as u32).map_or(true, |s| s > SIZE_CAP) {
        return unsupported("oracle space too large");
    }
    let mut out = BTreeSet::new();
    let mut x = vec![-r as i128; cells];
    loop {
        let d = det_i128(n, &x);
        if d != 0 && strip_primes(&BigInt::from(d).abs(), &primes) == target {
            let base: Vec<u64> = x.iter().map(|&v| v.rem_euclid(m as i128) as u64).collect();
            let mut scale = 1u64 % m;
            for _ in 0..=e_max {
                out.insert(base.iter().map(|&v| v * scale % m).collect());
                scale = scale * inv % m;
            }
        }
        let mut i = 0;
        while i < cells {
            if x[i] < r as i128 {
                x[i] += 1;
                break;
            }
            x[i] = -r as i128;
            i += 1;
        }
        if i == cells {
            break;
        }
    }
    Ok(out)
}
