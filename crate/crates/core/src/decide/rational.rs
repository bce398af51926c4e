//! Pairs whose eigenvalues are distinct integers, each divisible by a prime
//! that divides no other eigenvalue.
//!
//! For such A the subgroup of infinitely p-divisible elements spans the
//! eigenlines whose eigenvalue p divides. A private prime therefore pins each
//! eigenline, and any isomorphism is J = E_b·D·E_a⁻¹ with D diagonal, where
//! E_a, E_b hold integer eigenvectors as columns (E_b permuted to match).
//!
//! Whether J is an isomorphism is a conjunction of local conditions. Write
//! U_q for the coordinates whose eigenvalue q does not divide and
//! L_A(q) = {c ∈ ℚ^U : c·E_a⁻¹[U] is q-integral}. Then J is an isomorphism
//! iff L_B(q)·D_U = L_A(q) for every prime q. When q divides neither det E_a
//! nor det E_b this says the entries of D on U_q are q-units. For the finitely
//! many remaining q, q^δ_a·ℤ^U ⊆ L_A ⊆ ℤ^U with δ_a the largest q-power in a
//! denominator of E_a⁻¹, so the valuation of d_i lies in [−δ_b, δ_a] and only
//! its unit part modulo q^δ_a matters. The q-valuations of d_i for q | λ_i are
//! unconstrained; their generators act on the unit parts through a finite
//! group. Enumerating that group together with the valuation windows is
//! exhaustive, so finding no admissible D proves non-isomorphism.

use std::collections::{BTreeMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{prime_divisors, valuation, valuation_rat, Rat};
use crate::error::Result;
use crate::exactmat::{integer_kernel, IntMatrix, RatMatrix};
use crate::spectral::{k_vec_mul, rational_eigenvector_matrix};

use super::verify::{integral_witness, verify_witness, PairContext, VerifyOutcome};
use super::{Certificate, Config, Mode, UnknownReport, Verdict};

pub(crate) enum Outcome {
    NotApplicable(String),
    Verdict(Verdict),
}

pub(crate) const SEARCH_NAME: &str = "rational-case D-search";

struct Side {
    values: Vec<BigInt>,
    e: IntMatrix,
    f: RatMatrix,
}

fn side(c: &IntMatrix) -> Option<Side> {
    let (values, e) = rational_eigenvector_matrix(c).ok()?;
    let f = e.to_rat().inverse()?;
    Some(Side { values, e, f })
}

fn private_prime(values: &[BigInt], i: usize) -> Option<BigInt> {
    prime_divisors(&values[i])
        .into_iter()
        .find(|p| values.iter().enumerate().all(|(j, v)| j == i || !(v % p).is_zero()))
}

fn denominator_exponent(f: &RatMatrix, q: &BigInt) -> u32 {
    f.entries().iter().map(|x| valuation(x.denom(), q).unwrap_or(0)).max().unwrap_or(0)
}

/// Rows: a basis of {c ∈ ℤ^U : c·F[U] ∈ ℤ^N}, as y·E[:, U] with y·E[:, V] = 0.
fn local_lattice(e: &IntMatrix, u: &[usize], v: &[usize]) -> IntMatrix {
    let n = e.rows();
    let y = if v.is_empty() {
        IntMatrix::identity(n)
    } else {
        integer_kernel(&e.select_columns(v).transpose())
    };
    y.transpose().mul(&e.select_columns(u))
}

struct PrimeTest {
    q: BigInt,
    u: Vec<usize>,
    kb: RatMatrix,
    ka_inv: RatMatrix,
}

impl PrimeTest {
    fn passes(&self, d: &[Rat]) -> bool {
        let mut x = self.kb.clone();
        for (c, &i) in self.u.iter().enumerate() {
            for r in 0..x.rows() {
                x[(r, c)] = &x[(r, c)] * &d[i];
            }
        }
        let x = x.mul(&self.ka_inv);
        let integral = x.entries().iter().all(|y| valuation_rat(y, &self.q).map_or(true, |v| v >= 0));
        integral && valuation_rat(&x.det(), &self.q) == Some(0)
    }
}

/// Positive products of the generators, one per element of the subgroup they
/// generate in (ℤ/M)^*, plus −1 when allowed.
fn unit_representatives(gens: &[BigInt], modulus: &BigInt, with_sign: bool, cap: usize) -> Option<Vec<BigInt>> {
    let mut seen: HashSet<BigInt> = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    let one = BigInt::one();
    seen.insert(one.mod_floor(modulus));
    queue.push_back(one);
    let mut all_gens: Vec<BigInt> = gens.to_vec();
    if with_sign {
        all_gens.push(BigInt::from(-1));
    }
    while let Some(x) = queue.pop_front() {
        out.push(x.clone());
        if out.len() > cap {
            return None;
        }
        for g in &all_gens {
            let y = &x * g;
            if seen.insert(y.mod_floor(modulus)) {
                queue.push_back(y);
            }
        }
    }
    Some(out)
}

pub(crate) fn decide(ctx: &PairContext, cfg: &Config) -> Result<Outcome> {
    let n = ctx.a.rows();
    let (Some(sa), Some(sb)) = (side(&ctx.a), side(&ctx.b)) else {
        return Ok(Outcome::NotApplicable("eigenvalues are not distinct integers".into()));
    };
    let mut private = Vec::with_capacity(n);
    for i in 0..n {
        let (Some(p), Some(_)) = (private_prime(&sa.values, i), private_prime(&sb.values, i)) else {
            return Ok(Outcome::NotApplicable("an eigenvalue has no private prime".into()));
        };
        private.push(p);
    }
    let pattern = |vals: &[BigInt]| -> Vec<Vec<BigInt>> { vals.iter().map(prime_divisors).collect() };
    let (pat_a, pat_b) = (pattern(&sa.values), pattern(&sb.values));
    // σ(i): the B-eigenvalue divisible by A's private prime for i
    let mut sigma = Vec::with_capacity(n);
    for i in 0..n {
        let hits: Vec<usize> = (0..n).filter(|&j| (&sb.values[j] % &private[i]).is_zero()).collect();
        if hits.len() != 1 || pat_b[hits[0]] != pat_a[i] || sigma.contains(&hits[0]) {
            return Ok(Outcome::Verdict(Verdict::NotEquivalent(Certificate::new(
                "prime divisors of each eigenvalue",
                format!("{:?}", pat_a),
                format!("{:?}", pat_b),
                "infinitely p-divisible subgroups",
            ))));
        }
        sigma.push(hits[0]);
    }
    let eb = sb.e.select_columns(&sigma);
    let fb = eb.to_rat().inverse().expect("eigenvector matrix is invertible");
    let fa = &sa.f;

    // ordered mode: the Perron coordinate's sign is fixed by μ > 0
    let mut forced_sign: Option<(usize, i32)> = None;
    if let (Some(va), Some(vb)) = (&ctx.va, &ctx.vb) {
        let ca = k_vec_mul(va, &sa.e);
        let cb = k_vec_mul(vb, &eb);
        let Some(p) = ca.iter().position(|x| !x.is_zero()) else {
            return Ok(Outcome::NotApplicable("Perron vector vanishes on the eigenbasis".into()));
        };
        if cb[p].is_zero() {
            return Ok(Outcome::Verdict(Verdict::NotEquivalent(Certificate::new(
                "prime divisors of the Perron eigenvalue",
                &sa.values[p],
                &sb.values[sigma[p]],
                "Perron eigenline is fixed by order isomorphisms",
            ))));
        }
        let s = (&ca[p] / &cb[p]).signum();
        forced_sign = Some((p, s));
    }

    let mut t_primes: Vec<BigInt> = prime_divisors(&sa.e.det().abs());
    for q in prime_divisors(&eb.det().abs()) {
        if !t_primes.contains(&q) {
            t_primes.push(q);
        }
    }
    t_primes.sort();
    let mut incomplete = Vec::new();
    let mut delta: BTreeMap<BigInt, (u32, u32)> = BTreeMap::new();
    for q in &t_primes {
        let (da, db) = (denominator_exponent(fa, q), denominator_exponent(&fb, q));
        if let Some(e) = cfg.exp_bound {
            if e < da.max(db) {
                incomplete.push(format!("exponent bound {} is below the denominator exponent at {}", e, q));
            }
        }
        delta.insert(q.clone(), (da, db));
    }
    let window = |d: u32| cfg.exp_bound.map_or(d, |e| d.min(e)) as i64;

    let mut tests = Vec::new();
    for q in &t_primes {
        let u: Vec<usize> = (0..n).filter(|&i| !(&sa.values[i] % q).is_zero()).collect();
        if u.is_empty() {
            continue;
        }
        let v: Vec<usize> = (0..n).filter(|i| !u.contains(i)).collect();
        let ka = local_lattice(&sa.e, &u, &v);
        let kb = local_lattice(&eb, &u, &v);
        tests.push(PrimeTest {
            q: q.clone(),
            u,
            kb: kb.to_rat(),
            ka_inv: ka.to_rat().inverse().expect("local lattice has full rank"),
        });
    }

    // candidate diagonal entries per coordinate
    let mut choices: Vec<Vec<Rat>> = Vec::with_capacity(n);
    for i in 0..n {
        let ti: Vec<&BigInt> = t_primes.iter().filter(|q| !(&sa.values[i] % *q).is_zero()).collect();
        let modulus = ti.iter().fold(BigInt::one(), |acc, q| acc * q.pow(delta[*q].0));
        let (with_sign, sign) = match forced_sign {
            Some((p, s)) if p == i => (false, s),
            None if i == 0 => (false, 1),
            _ => (true, 1),
        };
        let Some(reps) = unit_representatives(&pat_a[i], &modulus, with_sign, cfg.candidate_cap) else {
            incomplete.push(format!("unit group for coordinate {} exceeds the candidate cap", i));
            choices.push(vec![]);
            continue;
        };
        let mut scales = vec![Rat::one()];
        for q in &ti {
            let (da, db) = delta[*q];
            let mut next = Vec::new();
            for s in &scales {
                for e in -window(db)..=window(da) {
                    let qe = Rat::from_integer((*q).clone()).pow(e as i32);
                    next.push(s * &qe);
                }
            }
            scales = next;
        }
        let mut list = Vec::new();
        for s in &scales {
            for r in &reps {
                list.push(s * Rat::from_integer(r * sign));
            }
        }
        choices.push(list);
    }
    let total: u128 = choices.iter().map(|c| c.len() as u128).product();
    if total > cfg.candidate_cap as u128 {
        incomplete.push(format!("{} diagonal candidates exceed the cap {}", total, cfg.candidate_cap));
    }
    if !incomplete.is_empty() {
        return Ok(Outcome::Verdict(Verdict::Unknown(UnknownReport {
            checks_passed: vec![],
            unsupported: incomplete,
            bounds: vec![format!("candidate cap {}", cfg.candidate_cap)],
        })));
    }

    let mut idx = vec![0usize; n];
    let mut found: Option<Vec<Rat>> = None;
    'outer: loop {
        let d: Vec<Rat> = (0..n).map(|i| choices[i][idx[i]].clone()).collect();
        if tests.iter().all(|t| t.passes(&d)) {
            found = Some(d);
            break 'outer;
        }
        let mut k = 0;
        loop {
            if k == n {
                break 'outer;
            }
            idx[k] += 1;
            if idx[k] < choices[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }

    let describe = |values: &[BigInt], e: &IntMatrix, deltas: Vec<(BigInt, u32)>| {
        let parts: Vec<String> = deltas.iter().map(|(q, d)| format!("{}: {}", q, d)).collect();
        let vals: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        format!(
            "eigenvalues [{}], eigenvectors {}, inverse denominator exponents {{{}}}",
            vals.join(", "),
            e,
            parts.join(", ")
        )
    };
    let Some(d) = found else {
        return Ok(Outcome::Verdict(Verdict::NotEquivalent(Certificate::new(
            format!("{} ({} diagonal candidates, none admissible)", SEARCH_NAME, total),
            describe(&sa.values, &sa.e, delta.iter().map(|(q, x)| (q.clone(), x.0)).collect()),
            describe(&sb.values, &eb, delta.iter().map(|(q, x)| (q.clone(), x.1)).collect()),
            "isomorphisms are diagonal in the eigenbases",
        ))));
    };
    let mut dm = RatMatrix::zeros(n, n);
    for (i, x) in d.into_iter().enumerate() {
        dm[(i, i)] = x;
    }
    let j = eb.to_rat().mul(&dm).mul(fa);
    let j = integral_witness(&ctx.b, &j, 8 * n as u32).map(|x| x.to_rat()).unwrap_or(j);
    Ok(Outcome::Verdict(match verify_witness(ctx, &j, cfg) {
        VerifyOutcome::Verified(mut w) => {
            w.source = SEARCH_NAME.into();
            Verdict::Equivalent(w)
        }
        VerifyOutcome::Refuted(why) | VerifyOutcome::Inconclusive(why) => Verdict::Unknown(UnknownReport {
            checks_passed: vec![format!("{} found an admissible diagonal", SEARCH_NAME)],
            unsupported: vec![format!("witness check did not conclude: {}", why)],
            bounds: vec![],
        }),
    }))
}

/// The rational-case decider on its own, for nonsingular inputs.
/// `None` when its hypotheses fail.
pub fn decide_rational_case(a: &IntMatrix, b: &IntMatrix, mode: Mode, cfg: &Config) -> Result<Option<Verdict>> {
    let order = if mode == Mode::Ordered {
        Some((super::core_row_vector(a)?, super::core_row_vector(b)?))
    } else {
        None
    };
    if a.rows() != b.rows() || a.det().is_zero() || b.det().is_zero() {
        return Ok(None);
    }
    let ctx = PairContext::new(a, b, order, cfg)?;
    Ok(match decide(&ctx, cfg)? {
        Outcome::NotApplicable(_) => None,
        Outcome::Verdict(v) => Some(v),
    })
}
