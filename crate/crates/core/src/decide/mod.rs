//! Deciding whether two integer matrices have isomorphic dimension groups.
//!
//! `decide_pair` screens with cheap invariants, routes to a subcase decider
//! when one applies, and falls back to a bounded witness search. Every
//! Equivalent verdict carries a witness that `verify_witness` accepts.

mod cc;
mod local;
mod rational;
mod shift;
mod verify;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::arith::{prime_divisors, strip_primes};
use crate::error::{invalid, Result};
use crate::exactmat::{char_poly, is_primitive, IntMatrix, RatMatrix};
use crate::invariants::{lambda_order, prim_set, trace_module_of, ulm_numbers, TraceModule};
use crate::quadmod::{lambda_prime_ideals, modules_equivalent, ModuleVerdict, PrimeIdeal};
use crate::reduction::{eventual_range_reduce, ReductionResult};
use crate::spectral::{
    dot, factor_char_poly, k_mat_vec, k_vec_mul, perron_data, AlgebraicNumber, KVector, PerronData,
    QuadOrder,
};

pub use cc::{cc_set, cc_set_brute_force, ResidueMatrix};
pub use local::{strong_local_iso, LocalIso};
pub use rational::decide_rational_case;
pub use shift::{elementary_shift_factorizations, shift_factorizations_bounded};
pub use verify::{order_multiplier, search_witness, verify_witness, LocalData, PairContext, VerifyOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Order isomorphism; inputs must be primitive.
    Ordered,
    /// Group isomorphism only.
    Unordered,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Ordered => write!(f, "ordered"),
            Mode::Unordered => write!(f, "unordered"),
        }
    }
}

/// Bounds for the searches. Every bound is at least 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    /// Max-norm of coefficients in the intertwiner-lattice search.
    pub height: u32,
    /// p-adic precision; `None` means 8(1 + v_p(det)) per prime.
    pub precision: Option<u32>,
    /// Cap on diagonal exponents in the rational case; `None` derives it from denominators.
    pub exp_bound: Option<u32>,
    pub k_max: u32,
    pub l_max: u32,
    pub n_max: u32,
    /// Entry bound for factorization searches beyond 2×2.
    pub factorization_entry_bound: Option<u32>,
    /// Maximum number of candidates any single search may examine.
    pub candidate_cap: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            height: 10,
            precision: None,
            exp_bound: None,
            k_max: 4,
            l_max: 8,
            n_max: 6,
            factorization_entry_bound: None,
            candidate_cap: 50_000,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<()> {
        let bounds = [self.height, self.k_max, self.l_max, self.n_max];
        if bounds.iter().any(|&b| b == 0)
            || self.precision == Some(0)
            || self.exp_bound == Some(0)
            || self.factorization_entry_bound == Some(0)
            || self.candidate_cap == 0
        {
            return invalid("all configuration bounds must be at least 1");
        }
        Ok(())
    }
}

/// Linear growth schedule m = k·n + l, checked for n ≤ n_max.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub k: u32,
    pub l: u32,
    pub n_max: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessReport {
    /// Acts on the nonsingular cores when either input was singular.
    pub j: RatMatrix,
    /// v(B)·J = μ·v(A) in ordered mode.
    pub mu: Option<AlgebraicNumber>,
    /// p → (row spaces agree, precision).
    pub padic_checks: BTreeMap<BigInt, (bool, u32)>,
    pub schedule: Option<Schedule>,
    /// Which step produced J.
    pub source: String,
    /// The cores J acts on, if reduction changed either matrix.
    pub cores: Option<(IntMatrix, IntMatrix)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub invariant: String,
    pub value_a: String,
    pub value_b: String,
    /// The result that makes the invariant an isomorphism invariant.
    pub anchor: String,
}

impl Certificate {
    fn new(invariant: impl Into<String>, a: impl fmt::Display, b: impl fmt::Display, anchor: &str) -> Self {
        Certificate { invariant: invariant.into(), value_a: a.to_string(), value_b: b.to_string(), anchor: anchor.into() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UnknownReport {
    pub checks_passed: Vec<String>,
    pub unsupported: Vec<String>,
    pub bounds: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Equivalent(WitnessReport),
    NotEquivalent(Certificate),
    Unknown(UnknownReport),
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Equivalent(_) => "equivalent",
            Verdict::NotEquivalent(_) => "not_equivalent",
            Verdict::Unknown(_) => "unknown",
        }
    }

    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent(_))
    }

    pub fn is_not_equivalent(&self) -> bool {
        matches!(self, Verdict::NotEquivalent(_))
    }

    pub fn is_decided(&self) -> bool {
        !matches!(self, Verdict::Unknown(_))
    }
}

fn check_square(a: &IntMatrix) -> Result<()> {
    if !a.is_square() || a.rows() == 0 {
        return invalid("matrices must be square and nonempty");
    }
    Ok(())
}

fn check_ordered_input(a: &IntMatrix) -> Result<()> {
    if !a.is_nonnegative() {
        return invalid("ordered mode needs nonnegative entries");
    }
    if !is_primitive(a)? {
        return invalid("ordered mode needs a primitive matrix");
    }
    Ok(())
}

/// Perron eigenvectors transported to the core: v·R and S·w.
fn core_perron(a: &IntMatrix, red: &ReductionResult) -> Result<PerronData> {
    let mut pd = perron_data(a)?;
    if !red.is_trivial() {
        pd.v_row = k_vec_mul(&pd.v_row, &red.r);
        pd.w_col = k_mat_vec(&red.s, &pd.w_col);
        pd.v_basis = vec![];
    }
    Ok(pd)
}

fn sorted_ideals(mut v: Vec<PrimeIdeal>) -> Vec<String> {
    let mut s: Vec<String> = v.drain(..).map(|i| i.to_string()).collect();
    s.sort();
    s
}

fn lambda_prime_signature(lambda: &AlgebraicNumber) -> Vec<String> {
    match lambda.field() {
        None => prime_divisors(&lambda.to_rat().unwrap().to_integer()).iter().map(|p| p.to_string()).collect(),
        Some(d) => sorted_ideals(lambda_prime_ideals(&QuadOrder::maximal(d), lambda)),
    }
}

fn fmt_list<T: fmt::Display>(xs: &[T]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

fn fmt_map(m: &BTreeMap<BigInt, u32>) -> String {
    let parts: Vec<String> = m.iter().map(|(p, n)| format!("{}: {}", p, n)).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Decide G(A) ≅ G(B), as ordered groups in ordered mode.
pub fn decide_pair(a: &IntMatrix, b: &IntMatrix, mode: Mode, cfg: &Config) -> Result<Verdict> {
    check_square(a)?;
    check_square(b)?;
    cfg.validate()?;
    if mode == Mode::Ordered {
        check_ordered_input(a)?;
        check_ordered_input(b)?;
    }
    let red_a = eventual_range_reduce(a)?;
    let red_b = eventual_range_reduce(b)?;
    let (ca, cb) = (&red_a.c, &red_b.c);
    let mut report = UnknownReport::default();
    if ca.rows() != cb.rows() {
        return Ok(Verdict::NotEquivalent(Certificate::new(
            "rank of the eventual range",
            ca.rows(),
            cb.rows(),
            "rational rank of the dimension group",
        )));
    }
    let cores = if red_a.is_trivial() && red_b.is_trivial() { None } else { Some((ca.clone(), cb.clone())) };
    if red_a.nilpotent && red_b.nilpotent {
        return Ok(Verdict::Equivalent(WitnessReport {
            j: RatMatrix::zeros(0, 0),
            mu: None,
            padic_checks: BTreeMap::new(),
            schedule: None,
            source: "both groups are zero".into(),
            cores,
        }));
    }
    report.checks_passed.push(format!("eventual ranks agree ({})", ca.rows()));

    let (da, db) = (ca.det(), cb.det());
    let (pa, pb) = (prim_set(&da)?, prim_set(&db)?);
    if pa != pb {
        return Ok(Verdict::NotEquivalent(Certificate::new(
            "prime divisors of the determinant",
            fmt_list(&pa),
            fmt_list(&pb),
            "primes p with G(A) p-divisible",
        )));
    }
    report.checks_passed.push(format!("determinant prime sets agree {}", fmt_list(&pa)));

    let (ua, ub) = (ulm_numbers(ca)?, ulm_numbers(cb)?);
    if ua != ub {
        return Ok(Verdict::NotEquivalent(Certificate::new(
            "Ulm numbers of the torsion quotient",
            fmt_map(&ua),
            fmt_map(&ub),
            "torsion quotient is a direct sum of Prüfer groups",
        )));
    }
    report.checks_passed.push(format!("Ulm numbers agree {}", fmt_map(&ua)));

    let perron = if mode == Mode::Ordered {
        let pda = core_perron(a, &red_a)?;
        let pdb = core_perron(b, &red_b)?;
        if pda.field != pdb.field {
            return Ok(Verdict::NotEquivalent(Certificate::new(
                "field generated by the Perron eigenvalue",
                &pda.field,
                &pdb.field,
                "trace ranges span the Perron field",
            )));
        }
        let (la, lb) = (lambda_prime_signature(&pda.lambda), lambda_prime_signature(&pdb.lambda));
        if la != lb {
            return Ok(Verdict::NotEquivalent(Certificate::new(
                "primes dividing the Perron eigenvalue",
                fmt_list(&la),
                fmt_list(&lb),
                "trace ranges are modules over ℤ[1/λ]",
            )));
        }
        report.checks_passed.push(format!("Perron fields agree ({}) with λ-primes {}", pda.field, fmt_list(&la)));
        Some((pda, pdb))
    } else {
        None
    };

    for p in &pa {
        match strong_local_iso(ca, cb, p, cfg)? {
            LocalIso::No(reason) => {
                return Ok(Verdict::NotEquivalent(Certificate::new(
                    format!("minimal field of the {}-adic eventual row space", p),
                    reason.a,
                    reason.b,
                    "local isomorphism at p",
                )))
            }
            LocalIso::Yes(_) => report.checks_passed.push(format!("strongly locally isomorphic at {}", p)),
            LocalIso::Unsupported(why) => report.unsupported.push(format!("local test at {}: {}", p, why)),
        }
    }

    let order = perron.as_ref().map(|(x, y)| (x.v_row.clone(), y.v_row.clone()));
    let ctx = PairContext::new(ca, cb, order, cfg)?;
    let finish = |mut w: WitnessReport| {
        w.cores = cores.clone();
        Verdict::Equivalent(w)
    };

    // subcase deciders
    let mut decided_equivalent = false;
    match rational::decide(&ctx, cfg)? {
        rational::Outcome::NotApplicable(why) => report.unsupported.push(format!("rational case: {}", why)),
        rational::Outcome::Verdict(Verdict::Equivalent(w)) => return Ok(finish(w)),
        rational::Outcome::Verdict(v @ Verdict::NotEquivalent(_)) => return Ok(v),
        rational::Outcome::Verdict(Verdict::Unknown(r)) => merge(&mut report, r),
    }
    if let Some((pda, pdb)) = &perron {
        match irreducible(&pda, &pdb, ca, cb)? {
            Some(Verdict::NotEquivalent(c)) => return Ok(Verdict::NotEquivalent(c)),
            Some(Verdict::Equivalent(_)) => {
                decided_equivalent = true;
                report.checks_passed.push("trace-range modules are equivalent".into());
            }
            Some(Verdict::Unknown(r)) => merge(&mut report, r),
            None => {}
        }
        match lambda_det_screen(pda, pdb, ca, cb) {
            Some(Verdict::NotEquivalent(c)) => return Ok(Verdict::NotEquivalent(c)),
            Some(Verdict::Equivalent(_)) => {
                decided_equivalent = true;
                report.checks_passed.push("normalized Perron inner products agree".into());
            }
            _ => {}
        }
    }

    if let Some(w) = search_witness(&ctx, cfg) {
        return Ok(finish(w));
    }
    report.bounds.push(format!(
        "witness search: height {}, schedule k ≤ {}, l ≤ {}, n ≤ {}, candidate cap {}",
        cfg.height, cfg.k_max, cfg.l_max, cfg.n_max, cfg.candidate_cap
    ));
    if decided_equivalent {
        report.unsupported.push("a decider reports equivalence but no explicit witness was found".into());
    }
    Ok(Verdict::Unknown(report))
}

fn merge(into: &mut UnknownReport, from: UnknownReport) {
    into.checks_passed.extend(from.checks_passed);
    into.unsupported.extend(from.unsupported);
    into.bounds.extend(from.bounds);
}

fn is_irreducible_quadratic(a: &IntMatrix) -> bool {
    a.rows() == 2 && matches!(factor_char_poly(&char_poly(a)).factors(), [(crate::spectral::Factor::Quadratic(..), 1)])
}

/// Irreducible 2×2 case, ordered: compare the trace-range modules.
/// Equivalent here carries no witness; callers must still produce one.
fn irreducible(pda: &PerronData, pdb: &PerronData, ca: &IntMatrix, cb: &IntMatrix) -> Result<Option<Verdict>> {
    if !is_irreducible_quadratic(ca) || !is_irreducible_quadratic(cb) {
        return Ok(None);
    }
    let unsupported = |why: String| {
        Ok(Some(Verdict::Unknown(UnknownReport { unsupported: vec![why], ..Default::default() })))
    };
    if lambda_order(&pda.lambda) != lambda_order(&pdb.lambda) || pda.lambda != pdb.lambda {
        return unsupported("trace-module comparison needs equal Perron eigenvalues".into());
    }
    let (TraceModule::Quadratic { module: ia, .. }, TraceModule::Quadratic { module: ib, .. }) =
        (trace_module_of(pda)?, trace_module_of(pdb)?)
    else {
        return Ok(None);
    };
    match modules_equivalent(&ia, &ib, &pda.lambda)? {
        ModuleVerdict::NotEquivalent { certificate } => Ok(Some(Verdict::NotEquivalent(Certificate::new(
            format!("trace-range module up to multipliers and λ-powers ({})", certificate),
            TraceModule::Quadratic { module: ia, lambda: pda.lambda.clone() },
            TraceModule::Quadratic { module: ib, lambda: pdb.lambda.clone() },
            "module classes of the trace range",
        )))),
        ModuleVerdict::Equivalent { .. } => Ok(Some(Verdict::Equivalent(WitnessReport {
            j: RatMatrix::zeros(0, 0),
            mu: None,
            padic_checks: BTreeMap::new(),
            schedule: None,
            source: "trace-range modules".into(),
            cores: None,
        }))),
        ModuleVerdict::Unsupported(why) => unsupported(format!("trace modules: {}", why)),
    }
}

/// |⟨v, w⟩| with the primes of λ removed, for integer eigenvectors.
fn stripped_inner_product(pd: &PerronData) -> Option<BigInt> {
    let lambda = pd.lambda.to_rat()?.to_integer();
    let ip = dot(&pd.v_row, &pd.w_col).to_rat()?;
    if !ip.is_integer() || ip.is_zero() {
        return None;
    }
    Some(strip_primes(&ip.to_integer().abs(), &prime_divisors(&lambda)))
}

/// λ = |det| for both, N ≥ 3: the normalized inner product decides.
fn lambda_det_screen(pda: &PerronData, pdb: &PerronData, ca: &IntMatrix, cb: &IntMatrix) -> Option<Verdict> {
    if ca.rows() < 3 || cb.rows() != ca.rows() {
        return None;
    }
    for (pd, c) in [(pda, ca), (pdb, cb)] {
        let l = pd.lambda.to_rat()?;
        if !l.is_integer() || l.to_integer() != c.det().abs() {
            return None;
        }
    }
    let (x, y) = (stripped_inner_product(pda)?, stripped_inner_product(pdb)?);
    if x != y {
        return Some(Verdict::NotEquivalent(Certificate::new(
            "normalized Perron inner product ⟨v, w⟩ up to λ-primes",
            x,
            y,
            "inner product is an invariant up to units",
        )));
    }
    Some(Verdict::Equivalent(WitnessReport {
        j: RatMatrix::zeros(0, 0),
        mu: None,
        padic_checks: BTreeMap::new(),
        schedule: None,
        source: "normalized inner product".into(),
        cores: None,
    }))
}

/// The λ = |det| decider on its own: `None` when its hypotheses fail.
pub fn lambda_det_decide(a: &IntMatrix, b: &IntMatrix, cfg: &Config) -> Result<Option<Verdict>> {
    check_ordered_input(a)?;
    check_ordered_input(b)?;
    if a.det().is_zero() || b.det().is_zero() {
        return Ok(None);
    }
    let (pda, pdb) = (perron_data(a)?, perron_data(b)?);
    if lambda_prime_signature(&pda.lambda) != lambda_prime_signature(&pdb.lambda) {
        return Ok(None);
    }
    match lambda_det_screen(&pda, &pdb, a, b) {
        None => Ok(None),
        Some(Verdict::Equivalent(_)) => {
            let ctx = PairContext::new(a, b, Some((pda.v_row, pdb.v_row)), cfg)?;
            Ok(Some(match search_witness(&ctx, cfg) {
                Some(w) => Verdict::Equivalent(w),
                None => Verdict::Unknown(UnknownReport {
                    checks_passed: vec!["normalized Perron inner products agree".into()],
                    unsupported: vec!["no explicit witness within the search bounds".into()],
                    bounds: vec![format!("height {}", cfg.height)],
                }),
            }))
        }
        v => Ok(v),
    }
}

/// The irreducible quadratic decider on its own: `None` when its hypotheses fail.
pub fn decide_irreducible_case(a: &IntMatrix, b: &IntMatrix, cfg: &Config) -> Result<Option<Verdict>> {
    check_ordered_input(a)?;
    check_ordered_input(b)?;
    let (pda, pdb) = (perron_data(a)?, perron_data(b)?);
    if pda.field != pdb.field {
        return Ok(Some(Verdict::NotEquivalent(Certificate::new(
            "field generated by the Perron eigenvalue",
            &pda.field,
            &pdb.field,
            "trace ranges span the Perron field",
        ))));
    }
    let (la, lb) = (lambda_prime_signature(&pda.lambda), lambda_prime_signature(&pdb.lambda));
    if la != lb {
        return Ok(Some(Verdict::NotEquivalent(Certificate::new(
            "primes dividing the Perron eigenvalue",
            fmt_list(&la),
            fmt_list(&lb),
            "trace ranges are modules over ℤ[1/λ]",
        ))));
    }
    match irreducible(&pda, &pdb, a, b)? {
        Some(Verdict::Equivalent(_)) => {
            let ctx = PairContext::new(a, b, Some((pda.v_row, pdb.v_row)), cfg)?;
            Ok(Some(match search_witness(&ctx, cfg) {
                Some(w) => Verdict::Equivalent(w),
                None => Verdict::Unknown(UnknownReport {
                    checks_passed: vec!["trace-range modules are equivalent".into()],
                    unsupported: vec!["no explicit witness within the search bounds".into()],
                    bounds: vec![format!("height {}", cfg.height)],
                }),
            }))
        }
        v => Ok(v),
    }
}

/// Reduce both matrices and check J against their cores.
pub fn verify_pair(a: &IntMatrix, b: &IntMatrix, j: &RatMatrix, mode: Mode, cfg: &Config) -> Result<VerifyOutcome> {
    check_square(a)?;
    check_square(b)?;
    cfg.validate()?;
    if mode == Mode::Ordered {
        check_ordered_input(a)?;
        check_ordered_input(b)?;
    }
    let red_a = eventual_range_reduce(a)?;
    let red_b = eventual_range_reduce(b)?;
    if red_a.c.rows() != red_b.c.rows() {
        return Ok(VerifyOutcome::Refuted("eventual ranks differ".into()));
    }
    if j.rows() != red_a.c.rows() || j.cols() != red_a.c.rows() {
        return invalid("J must be square of the core dimension");
    }
    let order = if mode == Mode::Ordered {
        Some((core_perron(a, &red_a)?.v_row, core_perron(b, &red_b)?.v_row))
    } else {
        None
    };
    let ctx = PairContext::new(&red_a.c, &red_b.c, order, cfg)?;
    Ok(verify_witness(&ctx, j, cfg))
}

/// Ordered-mode Perron row vector of the core (v(A)·R).
pub fn core_row_vector(a: &IntMatrix) -> Result<KVector> {
    let red = eventual_range_reduce(a)?;
    Ok(core_perron(a, &red)?.v_row)
}
