//! Witness verification and bounded witness search.
//!
//! A rational matrix J induces an isomorphism G(A) → G(B) exactly when J and
//! J⁻¹ have entries in ℤ[1/det A] and, at each p | det A, the p-adic eventual
//! row spaces satisfy rowspan(E_B)·J = rowspan(E_A). The order is preserved
//! when v(B)·J = μ·v(A) with μ > 0.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{is_smooth_over, rat_mod, valuation, valuation_rat};
use crate::exactmat::{intertwiner_lattice, IntMatrix, RatMatrix};
use crate::invariants::default_precision;
use crate::padic::{eventual_row_space, RowModule};
use crate::spectral::{k_vec_mul, AlgebraicNumber, KVector};
use crate::error::Result;

use super::{Config, Schedule, WitnessReport};

/// Eventual row spaces of both matrices at one prime.
#[derive(Clone, Debug)]
pub struct LocalData {
    pub p: BigInt,
    pub m: u32,
    pub ra: RowModule,
    pub rb: RowModule,
}

/// Everything about a pair of nonsingular cores that witness checks reuse.
#[derive(Clone, Debug)]
pub struct PairContext {
    pub a: IntMatrix,
    pub b: IntMatrix,
    pub primes: Vec<BigInt>,
    pub locals: Vec<LocalData>,
    /// Row eigenvectors used for the order condition (ordered mode only).
    pub va: Option<KVector>,
    pub vb: Option<KVector>,
}

impl PairContext {
    pub fn new(a: &IntMatrix, b: &IntMatrix, order: Option<(KVector, KVector)>, cfg: &Config) -> Result<Self> {
        let det = a.det();
        let primes = if det.is_zero() { vec![] } else { crate::arith::prime_divisors(&det) };
        let mut locals = Vec::new();
        for p in &primes {
            let m = cfg.precision.unwrap_or_else(|| default_precision(p, &det));
            locals.push(LocalData { p: p.clone(), m, ra: eventual_row_space(a, p, m)?, rb: eventual_row_space(b, p, m)? });
        }
        let (va, vb) = match order {
            Some((x, y)) => (Some(x), Some(y)),
            None => (None, None),
        };
        Ok(PairContext { a: a.clone(), b: b.clone(), primes, locals, va, vb })
    }

    pub fn ordered(&self) -> bool {
        self.va.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VerifyOutcome {
    Verified(WitnessReport),
    Refuted(String),
    /// The exact and p-adic checks passed but a bounded check did not conclude.
    Inconclusive(String),
}

impl VerifyOutcome {
    pub fn is_verified(&self) -> bool {
        matches!(self, VerifyOutcome::Verified(_))
    }
}

fn denominators_smooth(j: &RatMatrix, primes: &[BigInt]) -> bool {
    j.entries().iter().all(|x| is_smooth_over(x.denom(), primes))
}

/// μ with v(B)·J = μ·v(A), if the two vectors are proportional.
pub fn order_multiplier(va: &[AlgebraicNumber], vb: &[AlgebraicNumber], j: &RatMatrix) -> Option<AlgebraicNumber> {
    let n = j.rows();
    let image: KVector = (0..j.cols())
        .map(|c| {
            (0..n).fold(AlgebraicNumber::zero(), |acc, r| &acc + &vb[r].scale(&j[(r, c)]))
        })
        .collect();
    let k = va.iter().position(|x| !x.is_zero())?;
    let mu = &image[k] / &va[k];
    let ok = image.iter().zip(va).all(|(x, y)| *x == &mu * y);
    if ok { Some(mu) } else { None }
}

/// Smallest k ≤ cap with B^k·J p-integral.
fn integral_shift(b: &IntMatrix, j: &RatMatrix, p: &BigInt, cap: u32) -> Option<(u32, RatMatrix)> {
    let br = b.to_rat();
    let mut cur = j.clone();
    for k in 0..=cap {
        if cur.entries().iter().all(|x| valuation_rat(x, p).map_or(true, |v| v >= 0)) {
            return Some((k, cur));
        }
        cur = br.mul(&cur);
    }
    None
}

fn max_p_denominator(j: &RatMatrix, p: &BigInt) -> u32 {
    j.entries().iter().map(|x| valuation(x.denom(), p).unwrap_or(0)).max().unwrap_or(0)
}

/// Check J as a witness for G(A) ≅ G(B), ordered if the context carries eigenvectors.
pub fn verify_witness(ctx: &PairContext, j: &RatMatrix, cfg: &Config) -> VerifyOutcome {
    let n = ctx.a.rows();
    if j.rows() != n || j.cols() != ctx.b.rows() || ctx.b.rows() != n {
        return VerifyOutcome::Refuted("dimension mismatch".into());
    }
    let Some(j_inv) = j.inverse() else {
        return VerifyOutcome::Refuted("singular".into());
    };
    if !denominators_smooth(j, &ctx.primes) || !denominators_smooth(&j_inv, &ctx.primes) {
        return VerifyOutcome::Refuted("entries of J or J⁻¹ are not in ℤ[1/det A]".into());
    }
    let mu = match (&ctx.va, &ctx.vb) {
        (Some(va), Some(vb)) => match order_multiplier(va, vb, j) {
            None => return VerifyOutcome::Refuted("eigenvector condition v(B)·J = μ·v(A) fails".into()),
            Some(mu) if !mu.is_positive() => {
                return VerifyOutcome::Refuted(format!("order multiplier μ = {} is not positive", mu))
            }
            Some(mu) => Some(mu),
        },
        _ => None,
    };
    let mut padic_checks = BTreeMap::new();
    for loc in &ctx.locals {
        let p = &loc.p;
        let cap = (n as u32) * (max_p_denominator(j, p) + 1) + n as u32;
        let Some((_, shifted)) = integral_shift(&ctx.b, j, p, cap) else {
            return VerifyOutcome::Refuted(format!("B^k·J never becomes {}-integral", p));
        };
        let q = p.pow(loc.m);
        let entries: Vec<BigInt> = shifted.entries().iter().map(|x| rat_mod(x, &q).expect("p-integral")).collect();
        let jm = IntMatrix::new(n, n, entries);
        let det_val = valuation_rat(&shifted.det(), p).unwrap_or(0);
        let ok = loc.rb.image(&jm) == loc.ra;
        padic_checks.insert(p.clone(), (ok, loc.m));
        if !ok {
            return VerifyOutcome::Refuted(format!("{}-adic eventual row spaces differ at precision {}", p, loc.m));
        }
        if det_val >= loc.m as i64 {
            return VerifyOutcome::Inconclusive(format!(
                "precision {} at p = {} does not exceed the valuation of det J",
                loc.m, p
            ));
        }
    }
    let Some(schedule) = growth_schedule(ctx, j, &j_inv, cfg) else {
        return VerifyOutcome::Inconclusive(format!(
            "no linear schedule k ≤ {}, l ≤ {} makes the grid integral up to n = {}",
            cfg.k_max, cfg.l_max, cfg.n_max
        ));
    };
    VerifyOutcome::Verified(WitnessReport { j: j.clone(), mu, padic_checks, schedule: Some(schedule), source: String::new(), cores: None })
}

/// Find (k, l) with B^(kn+l)·J·A^(−n) and A^(kn+l)·J⁻¹·B^(−n) integral for n ≤ n_max.
fn growth_schedule(ctx: &PairContext, j: &RatMatrix, j_inv: &RatMatrix, cfg: &Config) -> Option<Schedule> {
    let a = ctx.a.to_rat();
    let b = ctx.b.to_rat();
    let a_inv = a.inverse()?;
    let b_inv = b.inverse()?;
    let nmax = cfg.n_max;
    // left[n] = J·A^(−n), right[n] = J⁻¹·B^(−n)
    let mut left = vec![j.clone()];
    let mut right = vec![j_inv.clone()];
    for t in 1..=nmax as usize {
        left.push(left[t - 1].mul(&a_inv));
        right.push(right[t - 1].mul(&b_inv));
    }
    let top = cfg.k_max * nmax + cfg.l_max;
    let mut bp = vec![RatMatrix::identity(ctx.a.rows())];
    let mut ap = vec![RatMatrix::identity(ctx.a.rows())];
    for t in 1..=top as usize {
        bp.push(bp[t - 1].mul(&b));
        ap.push(ap[t - 1].mul(&a));
    }
    for k in 1..=cfg.k_max {
        for l in 0..=cfg.l_max {
            let ok = (0..=nmax).all(|n| {
                let e = (k * n + l) as usize;
                bp[e].mul(&left[n as usize]).is_integral() && ap[e].mul(&right[n as usize]).is_integral()
            });
            if ok {
                return Some(Schedule { k, l, n_max: nmax });
            }
        }
    }
    None
}

/// Cheap necessary conditions for an integer candidate.
fn prefilter(ctx: &PairContext, j: &IntMatrix) -> bool {
    let d = j.det();
    if d.is_zero() || !is_smooth_over(&d, &ctx.primes) {
        return false;
    }
    match (&ctx.va, &ctx.vb) {
        (Some(va), Some(vb)) => {
            let img = k_vec_mul(vb, j);
            let Some(k) = va.iter().position(|x| !x.is_zero()) else { return false };
            let mu = &img[k] / &va[k];
            mu.is_positive() && img.iter().zip(va).all(|(x, y)| *x == &mu * y)
        }
        _ => true,
    }
}

/// Integer coefficient vectors with max-norm exactly h.
fn shell(r: usize, h: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = vec![-h; r];
    loop {
        if cur.iter().any(|x| x.abs() == h) {
            out.push(cur.clone());
        }
        let mut i = 0;
        while i < r {
            if cur[i] < h {
                cur[i] += 1;
                break;
            }
            cur[i] = -h;
            i += 1;
        }
        if i == r {
            break;
        }
    }
    out
}

/// Bounded search for a verified witness: the identity, the intertwiner lattice
/// {J : BJ = JA} in max-norm shells up to the height bound, then small entries.
pub fn search_witness(ctx: &PairContext, cfg: &Config) -> Option<WitnessReport> {
    let n = ctx.a.rows();
    if ctx.b.rows() != n {
        return None;
    }
    let mut tried = 0usize;
    let attempt = |j: &IntMatrix, source: &str, tried: &mut usize| -> Option<WitnessReport> {
        *tried += 1;
        if !prefilter(ctx, j) {
            return None;
        }
        match verify_witness(ctx, &j.to_rat(), cfg) {
            VerifyOutcome::Verified(mut w) => {
                w.source = source.into();
                Some(w)
            }
            _ => None,
        }
    };
    if let Some(w) = attempt(&IntMatrix::identity(n), "identity", &mut tried) {
        return Some(w);
    }
    let basis = intertwiner_lattice(&ctx.a, &ctx.b);
    if !basis.is_empty() {
        for h in 1..=cfg.height as i64 {
            for c in shell(basis.len(), h) {
                if tried >= cfg.candidate_cap {
                    return None;
                }
                let mut j = IntMatrix::zeros(n, n);
                for (x, k) in basis.iter().zip(&c) {
                    if *k != 0 {
                        j = j.add(&x.scale(&BigInt::from(*k)));
                    }
                }
                if let Some(w) = attempt(&j, "intertwiner lattice search", &mut tried) {
                    return Some(w);
                }
            }
        }
    }
    if n <= 3 {
        let cells = n * n;
        let total = 3usize.pow(cells as u32);
        for code in 0..total {
            if tried >= cfg.candidate_cap {
                return None;
            }
            let mut c = code;
            let mut data = Vec::with_capacity(cells);
            for _ in 0..cells {
                data.push(BigInt::from((c % 3) as i64 - 1));
                c /= 3;
            }
            let j = IntMatrix::new(n, n, data);
            if let Some(w) = attempt(&j, "small-entry sweep", &mut tried) {
                return Some(w);
            }
        }
    }
    None
}

/// Rescale a rational witness by powers of B until it is integral.
pub fn integral_witness(b: &IntMatrix, j: &RatMatrix, cap: u32) -> Option<IntMatrix> {
    let br = b.to_rat();
    let mut cur = j.clone();
    for _ in 0..=cap {
        if let Some(x) = cur.to_int() {
            return Some(x);
        }
        cur = br.mul(&cur);
    }
    None
}
