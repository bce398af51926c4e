//! Exact spectral data over ℚ and real quadratic fields.

mod number;
pub mod poly;
mod units;

pub use number::{d_is_one_mod_four, AlgebraicNumber};
pub use poly::{factor_poly as factor_char_poly, Factor, Factorization, Poly};
pub use units::{field_discriminant, fundamental_unit, QuadOrder};

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{prime_divisors, Rat};
use crate::error::{invalid, unsupported, Result};
use crate::exactmat::{char_poly, elementary_divisors, is_primitive, saturate, IntMatrix, RatMatrix};

pub type KVector = Vec<AlgebraicNumber>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum FieldTag {
    Rational,
    Quadratic(BigInt),
}

impl FieldTag {
    pub fn of(x: &AlgebraicNumber) -> FieldTag {
        match x.field() {
            None => FieldTag::Rational,
            Some(d) => FieldTag::Quadratic(d.clone()),
        }
    }

    pub fn d(&self) -> Option<&BigInt> {
        match self {
            FieldTag::Rational => None,
            FieldTag::Quadratic(d) => Some(d),
        }
    }
}

impl std::fmt::Display for FieldTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FieldTag::Rational => write!(f, "Q"),
            FieldTag::Quadratic(d) => write!(f, "Q(sqrt({}))", d),
        }
    }
}

pub fn dot(x: &[AlgebraicNumber], y: &[AlgebraicNumber]) -> AlgebraicNumber {
    x.iter().zip(y).fold(AlgebraicNumber::zero(), |acc, (a, b)| &acc + &(a * b))
}

pub fn int_vec_to_k(v: &[BigInt]) -> KVector {
    v.iter().map(AlgebraicNumber::from_int).collect()
}

pub fn rat_vec_to_k(v: &[Rat]) -> KVector {
    v.iter().map(|q| AlgebraicNumber::from(q.clone())).collect()
}

/// Row vector times integer matrix.
pub fn k_vec_mul(v: &[AlgebraicNumber], m: &IntMatrix) -> KVector {
    (0..m.cols())
        .map(|j| (0..m.rows()).fold(AlgebraicNumber::zero(), |acc, i| &acc + &(&v[i] * &AlgebraicNumber::from_int(&m[(i, j)]))))
        .collect()
}

pub fn k_mat_vec(m: &IntMatrix, v: &[AlgebraicNumber]) -> KVector {
    (0..m.rows())
        .map(|i| (0..m.cols()).fold(AlgebraicNumber::zero(), |acc, j| &acc + &(&AlgebraicNumber::from_int(&m[(i, j)]) * &v[j])))
        .collect()
}

pub fn k_scale(v: &[AlgebraicNumber], c: &AlgebraicNumber) -> KVector {
    v.iter().map(|x| x * c).collect()
}

/// Right kernel of a matrix over ℚ or ℚ(√d), one vector per free column.
pub fn k_kernel(rows: &[KVector], ncols: usize) -> Vec<KVector> {
    let mut m: Vec<KVector> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(p, r);
        let inv = m[r][c].recip();
        m[r] = k_scale(&m[r], &inv);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let sub: KVector = m[r].iter().map(|x| x * &f).collect();
                for (x, s) in m[i].iter_mut().zip(sub) {
                    *x = &*x - &s;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![AlgebraicNumber::zero(); ncols];
            v[f] = AlgebraicNumber::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -&m[row][f];
            }
            v
        })
        .collect()
}

/// (A − μI)^k as rows over the field of μ.
fn shifted_power(a: &IntMatrix, mu: &AlgebraicNumber, k: u32) -> Vec<KVector> {
    let n = a.rows();
    let base: Vec<KVector> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let x = AlgebraicNumber::from_int(&a[(i, j)]);
                    if i == j {
                        &x - mu
                    } else {
                        x
                    }
                })
                .collect()
        })
        .collect();
    let mut out: Vec<KVector> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { AlgebraicNumber::one() } else { AlgebraicNumber::zero() }).collect())
        .collect();
    for _ in 0..k {
        out = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).fold(AlgebraicNumber::zero(), |acc, t| &acc + &(&out[i][t] * &base[t][j])))
                    .collect()
            })
            .collect();
    }
    out
}

fn rat_scale_to_primitive(xs: &[Rat]) -> Vec<BigInt> {
    let den = xs.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = xs.iter().map(|x| (x * Rat::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Content normalization of a vector over ℚ or ℚ(√d).
///
/// Rational vectors become primitive integer vectors. Quadratic vectors are
/// scaled by v_j⁻¹ for each nonzero coordinate j, then by the positive rational
/// making the ℤ+ℤω coordinates integral of content 1; the choice whose entries
/// span the smallest-index sublattice of ℤ+ℤω wins, ties going to the later j.
/// Sign is left to the caller.
pub fn normalize_vector(v: &[AlgebraicNumber], field: &FieldTag) -> KVector {
    match field {
        FieldTag::Rational => {
            let qs: Vec<Rat> = v.iter().map(|x| x.to_rat().expect("rational vector")).collect();
            rat_scale_to_primitive(&qs).iter().map(AlgebraicNumber::from_int).collect()
        }
        FieldTag::Quadratic(d) => {
            let mut best: Option<((usize, BigInt), KVector)> = None;
            for j in 0..v.len() {
                if v[j].is_zero() {
                    continue;
                }
                let inv = v[j].recip();
                let u: KVector = v.iter().map(|x| x * &inv).collect();
                let coords: Vec<Rat> = u
                    .iter()
                    .flat_map(|x| {
                        let (a, b) = x.omega_coords(d);
                        [a, b]
                    })
                    .collect();
                let ints = rat_scale_to_primitive(&coords);
                let n = v.len();
                let mut m = IntMatrix::zeros(2, n);
                for i in 0..n {
                    m[(0, i)] = ints[2 * i].clone();
                    m[(1, i)] = ints[2 * i + 1].clone();
                }
                let ed = elementary_divisors(&m);
                let rank = ed.iter().filter(|x| !x.is_zero()).count();
                let index: BigInt = if rank == 2 { &ed[0] * &ed[1] } else { BigInt::zero() };
                let key = (2 - rank, index);
                let vec: KVector = (0..n)
                    .map(|i| {
                        AlgebraicNumber::from_omega_coords(
                            &Rat::from_integer(ints[2 * i].clone()),
                            &Rat::from_integer(ints[2 * i + 1].clone()),
                            d,
                        )
                    })
                    .collect();
                let better = match &best {
                    None => true,
                    Some((k, _)) => key <= *k,
                };
                if better {
                    best = Some((key, vec));
                }
            }
            best.map(|(_, v)| v).unwrap_or_else(|| v.to_vec())
        }
    }
}

fn last_nonzero_positive(mut v: KVector) -> KVector {
    if let Some(x) = v.iter().rev().find(|x| !x.is_zero()) {
        if x.is_negative() {
            v = v.iter().map(|x| -x).collect();
        }
    }
    v
}

fn first_nonzero_positive(mut v: KVector) -> KVector {
    if let Some(x) = v.iter().find(|x| !x.is_zero()) {
        if x.is_negative() {
            v = v.iter().map(|x| -x).collect();
        }
    }
    v
}

/// A generalized eigenspace: all vectors killed by (A − μ)^k, k the multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eigenspace {
    pub value: AlgebraicNumber,
    pub multiplicity: u32,
    pub basis: Vec<KVector>,
}

fn real_spectrum(a: &IntMatrix) -> Result<Vec<(AlgebraicNumber, u32)>> {
    let fac = factor_char_poly(&char_poly(a));
    let Factorization::Complete(factors) = fac else {
        return unsupported("characteristic polynomial has an irreducible factor of degree > 2");
    };
    let mut roots = Vec::new();
    for (f, e) in &factors {
        if !f.is_real() {
            return unsupported("complex eigenvalues");
        }
        for r in f.real_roots() {
            roots.push((r, *e));
        }
    }
    roots.sort_by(|x, y| x.0.cmp_real(&y.0));
    Ok(roots)
}

fn eigenspaces_of(a: &IntMatrix) -> Result<Vec<Eigenspace>> {
    let n = a.rows();
    let mut out = Vec::new();
    for (mu, e) in real_spectrum(a)? {
        let field = FieldTag::of(&mu);
        let kernel = k_kernel(&shifted_power(a, &mu, e), n);
        let basis = match field {
            FieldTag::Rational => {
                let cols: Vec<Vec<BigInt>> = kernel
                    .iter()
                    .map(|v| rat_scale_to_primitive(&v.iter().map(|x| x.to_rat().unwrap()).collect::<Vec<_>>()))
                    .collect();
                let m = IntMatrix::from_columns(n, &cols);
                saturate(&m).basis_vectors().iter().map(|c| last_nonzero_positive(int_vec_to_k(c))).collect()
            }
            FieldTag::Quadratic(_) => kernel.iter().map(|v| last_nonzero_positive(normalize_vector(v, &field))).collect(),
        };
        out.push(Eigenspace { value: mu, multiplicity: e, basis });
    }
    Ok(out)
}

/// Column generalized eigenspaces, eigenvalues in increasing order.
pub fn generalized_eigenspaces(a: &IntMatrix) -> Result<Vec<Eigenspace>> {
    if !a.is_square() {
        return invalid("eigenspaces need a square matrix");
    }
    eigenspaces_of(a)
}

/// Row generalized eigenspaces: x (A − μ)^k = 0.
pub fn generalized_row_eigenspaces(a: &IntMatrix) -> Result<Vec<Eigenspace>> {
    generalized_eigenspaces(&a.transpose())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerronData {
    pub lambda: AlgebraicNumber,
    pub lambda_factor: Factor,
    /// Left eigenvector v with vA = λv.
    pub v_row: KVector,
    /// Right eigenvector w with Aw = λw.
    pub w_col: KVector,
    /// Basis of {x : ⟨v, x⟩ = 0} over the Perron field.
    pub v_basis: Vec<KVector>,
    pub field: FieldTag,
}

impl PerronData {
    pub fn negate_v(&mut self) {
        self.v_row = self.v_row.iter().map(|x| -x).collect();
    }
}

/// The simple real eigenvalue strictly dominating every other root in absolute value.
pub fn dominant_eigenvalue(coeffs: &[BigInt]) -> Result<(AlgebraicNumber, Factor)> {
    let fac = factor_char_poly(coeffs);
    let Factorization::Complete(factors) = fac else {
        return unsupported("characteristic polynomial has an irreducible factor of degree > 2");
    };
    let mut best: Option<(AlgebraicNumber, Factor, u32)> = None;
    for (f, e) in &factors {
        for r in f.real_roots() {
            if best.as_ref().map_or(true, |(b, _, _)| r.cmp_real(b) == Ordering::Greater) {
                best = Some((r, f.clone(), *e));
            }
        }
    }
    let Some((lambda, lf, mult)) = best else {
        return unsupported("no real eigenvalue");
    };
    if mult != 1 || !lambda.is_positive() {
        return unsupported("largest real eigenvalue is not simple and positive");
    }
    let lambda_sq = &lambda * &lambda;
    for (f, _) in &factors {
        match f {
            Factor::Quadratic(_, q) if !f.is_real() => {
                if lambda_sq.cmp_real(&AlgebraicNumber::from_int(q)) != Ordering::Greater {
                    return unsupported("complex eigenvalue of maximal modulus");
                }
            }
            _ => {
                for r in f.real_roots() {
                    if r == lambda {
                        continue;
                    }
                    if lambda.cmp_real(&r.abs()) != Ordering::Greater {
                        return unsupported("dominant eigenvalue is not strictly dominant");
                    }
                }
            }
        }
    }
    Ok((lambda, lf))
}

/// Perron-type data for any square integer matrix with a simple strictly
/// dominant real eigenvalue. Eigenvectors are content-normalized and
/// oriented so the first nonzero entry is positive.
pub fn dominant_data(a: &IntMatrix) -> Result<PerronData> {
    if !a.is_square() || a.rows() == 0 {
        return invalid("Perron data needs a nonempty square matrix");
    }
    let n = a.rows();
    let (lambda, lf) = dominant_eigenvalue(&char_poly(a))?;
    let field = FieldTag::of(&lambda);
    let right = k_kernel(&shifted_power(a, &lambda, 1), n);
    let left = k_kernel(&shifted_power(&a.transpose(), &lambda, 1), n);
    assert!(right.len() == 1 && left.len() == 1, "simple eigenvalue has a one-dimensional eigenspace");
    let w_col = first_nonzero_positive(normalize_vector(&right[0], &field));
    let v_row = first_nonzero_positive(normalize_vector(&left[0], &field));
    let v_basis = orthogonal_complement(&v_row);
    Ok(PerronData { lambda, lambda_factor: lf, v_row, w_col, v_basis, field })
}

/// Perron-Frobenius data of a primitive matrix.
pub fn perron_data(a: &IntMatrix) -> Result<PerronData> {
    if !is_primitive(a)? {
        return invalid("matrix is not primitive");
    }
    let pd = dominant_data(a)?;
    debug_assert!(pd.v_row.iter().chain(&pd.w_col).all(AlgebraicNumber::is_positive));
    Ok(pd)
}

fn orthogonal_complement(v: &[AlgebraicNumber]) -> Vec<KVector> {
    k_kernel(&[v.to_vec()], v.len())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerProduct {
    pub value: AlgebraicNumber,
    /// Rational primes below the primes dividing λ; the value is defined up to these and units.
    pub lambda_primes: Vec<BigInt>,
}

pub fn inner_product_invariant(a: &IntMatrix) -> Result<InnerProduct> {
    let pd = perron_data(a)?;
    Ok(inner_product_of(&pd))
}

pub fn inner_product_of(pd: &PerronData) -> InnerProduct {
    let value = dot(&pd.v_row, &pd.w_col);
    InnerProduct { value, lambda_primes: lambda_rational_primes(&pd.lambda) }
}

/// Rational primes dividing the norm of an algebraic integer λ.
pub fn lambda_rational_primes(lambda: &AlgebraicNumber) -> Vec<BigInt> {
    let n = match lambda.to_rat() {
        Some(q) => q.to_integer(),
        None => lambda.norm().to_integer(),
    };
    if n.is_zero() {
        return vec![];
    }
    prime_divisors(&n)
}

/// Rational eigenvector matrix: columns are eigenvectors in increasing eigenvalue order.
pub fn rational_eigenvector_matrix(a: &IntMatrix) -> Result<(Vec<BigInt>, IntMatrix)> {
    let spaces = generalized_eigenspaces(a)?;
    let mut values = Vec::new();
    let mut cols = Vec::new();
    for s in spaces {
        let Some(q) = s.value.to_rat() else {
            return unsupported("irrational eigenvalue");
        };
        if s.multiplicity != 1 {
            return unsupported("repeated eigenvalue");
        }
        values.push(q.to_integer());
        cols.push(s.basis[0].iter().map(|x| x.to_rat().unwrap().to_integer()).collect::<Vec<_>>());
    }
    Ok((values, IntMatrix::from_columns(a.rows(), &cols)))
}

/// Helper for callers that need the rational inverse of an eigenvector matrix.
pub fn rat_inverse(m: &IntMatrix) -> Option<RatMatrix> {
    m.to_rat().inverse()
}
