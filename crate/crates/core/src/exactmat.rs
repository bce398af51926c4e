//! Dense exact matrices over the integers and the rationals, with the
//! normal forms and lattice operations the rest of the crate is built on.
//!
//! Hermite normal forms are column-style: `M * U = H` with `H` lower
//! echelon, positive pivots, and every entry to the left of a pivot reduced
//! into `[0, pivot)`. Two lattices are equal exactly when their HNF bases are.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::Rat;
use crate::error::{invalid, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Self {
        assert_eq!(data.len(), rows * cols, "entry count does not match shape");
        IntMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.as_ref().len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.as_ref().len(), c, "ragged rows");
            data.extend(row.as_ref().iter().map(|&v| BigInt::from(v)));
        }
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn from_big_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn diag(entries: &[i64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = BigInt::from(e);
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(dim: usize, cols: &[Vec<BigInt>]) -> Self {
        let mut m = Self::zeros(dim, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), dim);
            for i in 0..dim {
                m[(i, j)] = c[i].clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v[j]).sum())
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.rows, v.len());
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| &v[i] * &self[(i, j)]).sum())
            .collect()
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        IntMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, k: &BigInt) -> IntMatrix {
        IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * k).collect() }
    }

    pub fn pow(&self, e: u32) -> IntMatrix {
        assert!(self.is_square());
        let mut result = Self::identity(self.rows);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.data.iter().all(|x| !x.is_negative())
    }

    pub fn is_positive(&self) -> bool {
        self.data.iter().all(|x| x.is_positive())
    }

    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
    }

    pub fn trace(&self) -> BigInt {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).sum()
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> BigInt {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.data.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k * n + k].is_zero() {
                let Some(swap) = (k + 1..n).find(|&i| !m[i * n + k].is_zero()) else {
                    return BigInt::zero();
                };
                for j in 0..n {
                    m.swap(k * n + j, swap * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &m[i * n + j] * &m[k * n + k] - &m[i * n + k] * &m[k * n + j];
                    m[i * n + j] = v / &prev;
                }
            }
            prev = m[k * n + k].clone();
        }
        sign * &m[n * n - 1]
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| Rat::from_integer(x.clone())).collect(),
        }
    }

    pub fn select_columns(&self, idx: &[usize]) -> IntMatrix {
        let mut m = Self::zeros(self.rows, idx.len());
        for (jj, &j) in idx.iter().enumerate() {
            for i in 0..self.rows {
                m[(i, jj)] = self[(i, j)].clone();
            }
        }
        m
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// col[dst] += k * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * k;
            self[(i, dst)] += v;
        }
    }

    /// row[dst] += k * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * k;
            self[(dst, j)] += v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    /// Replace columns (a, b) by (x*a + y*b, u*a + v*b).
    fn combine_cols(&mut self, a: usize, b: usize, x: &BigInt, y: &BigInt, u: &BigInt, v: &BigInt) {
        for i in 0..self.rows {
            let ca = self[(i, a)].clone();
            let cb = self[(i, b)].clone();
            self[(i, a)] = x * &ca + y * &cb;
            self[(i, b)] = u * &ca + v * &cb;
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

fn fmt_rows<T: fmt::Display>(f: &mut fmt::Formatter<'_>, rows: usize, cols: usize, data: &[T]) -> fmt::Result {
    write!(f, "[")?;
    for i in 0..rows {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "[")?;
        for j in 0..cols {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", data[i * cols + j])?;
        }
        write!(f, "]")?;
    }
    write!(f, "]")
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rows(f, self.rows, self.cols, &self.data)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rat>) -> Self {
        assert_eq!(data.len(), rows * cols);
        RatMatrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Rat] {
        &self.data
    }

    pub fn row(&self, i: usize) -> Vec<Rat> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn vec_mul(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.rows, v.len());
        (0..self.cols)
            .map(|j| (0..self.rows).fold(Rat::zero(), |acc, i| acc + &v[i] * &self[(i, j)]))
            .collect()
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).fold(Rat::zero(), |acc, j| acc + &self[(i, j)] * &v[j]))
            .collect()
    }

    pub fn add(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        RatMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        RatMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, k: &Rat) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * k).collect() }
    }

    pub fn pow(&self, e: u32) -> RatMatrix {
        let mut result = Self::identity(self.rows);
        for _ in 0..e {
            result = result.mul(self);
        }
        result
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn to_int(&self) -> Option<IntMatrix> {
        if !self.is_integral() {
            return None;
        }
        Some(IntMatrix::new(self.rows, self.cols, self.data.iter().map(|x| x.to_integer()).collect()))
    }

    /// Least common multiple of all entry denominators.
    pub fn common_denominator(&self) -> BigInt {
        self.data.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// Scale by the common denominator, giving an integer matrix.
    pub fn clear_denominators(&self) -> (IntMatrix, BigInt) {
        let d = self.common_denominator();
        let m = self.scale(&Rat::from_integer(d.clone()));
        (m.to_int().expect("integral after scaling"), d)
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = m[(r, c)].recip();
            for j in 0..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in 0..m.cols {
                        let v = &m[(r, j)] * &f;
                        m[(i, j)] -= v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space, one column vector per free variable.
    pub fn kernel(&self) -> Vec<Vec<Rat>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rat::zero(); self.cols];
                v[f] = Rat::one();
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else { return Rat::zero() };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det *= &piv;
            for i in c + 1..n {
                if m[(i, c)].is_zero() {
                    continue;
                }
                let f = &m[(i, c)] / &piv;
                for j in c..n {
                    let v = &m[(c, j)] * &f;
                    m[(i, j)] -= v;
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rat::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Integer power, negative exponents through the inverse.
    pub fn pow_signed(&self, e: i64) -> Option<RatMatrix> {
        if e >= 0 {
            Some(self.pow(e as u32))
        } else {
            Some(self.inverse()?.pow((-e) as u32))
        }
    }
}

impl Index<(usize, usize)> for RatMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_rows(f, self.rows, self.cols, &self.data)
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Column Hermite normal form: returns `(H, U)` with `M * U = H`, `U` unimodular.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.cols);
    let mut pc = 0;
    for i in 0..m.rows {
        if pc == m.cols {
            break;
        }
        for j in pc + 1..m.cols {
            if h[(i, j)].is_zero() {
                continue;
            }
            let a = h[(i, pc)].clone();
            let b = h[(i, j)].clone();
            let e = a.extended_gcd(&b);
            let (x, y) = (e.x, e.y);
            let u2 = -(&b / &e.gcd);
            let v2 = &a / &e.gcd;
            h.combine_cols(pc, j, &x, &y, &u2, &v2);
            u.combine_cols(pc, j, &x, &y, &u2, &v2);
        }
        if h[(i, pc)].is_zero() {
            continue;
        }
        if h[(i, pc)].is_negative() {
            h.negate_col(pc);
            u.negate_col(pc);
        }
        let piv = h[(i, pc)].clone();
        for k in 0..pc {
            let q = h[(i, k)].div_floor(&piv);
            if !q.is_zero() {
                let nq = -q;
                h.add_col_multiple(k, pc, &nq);
                u.add_col_multiple(k, pc, &nq);
            }
        }
        pc += 1;
    }
    (h, u)
}

/// Smith normal form: returns `(S, U, V)` with `S = U * M * V` diagonal,
/// nonnegative, and each diagonal entry dividing the next.
pub fn snf(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut s = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let n = m.rows.min(m.cols);
    for t in 0..n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..s.rows {
                for j in t..s.cols {
                    if !s[(i, j)].is_zero() && best.map_or(true, |(bi, bj)| s[(i, j)].abs() < s[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { return (s, u, v) };
            s.swap_rows(t, bi);
            u.swap_rows(t, bi);
            s.swap_cols(t, bj);
            v.swap_cols(t, bj);
            let mut clean = true;
            for i in t + 1..s.rows {
                let q = s[(i, t)].div_floor(&s[(t, t)]);
                if !q.is_zero() {
                    let nq = -q;
                    s.add_row_multiple(i, t, &nq);
                    u.add_row_multiple(i, t, &nq);
                }
                if !s[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..s.cols {
                let q = s[(t, j)].div_floor(&s[(t, t)]);
                if !q.is_zero() {
                    let nq = -q;
                    s.add_col_multiple(j, t, &nq);
                    v.add_col_multiple(j, t, &nq);
                }
                if !s[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let piv = s[(t, t)].clone();
            let bad = (t + 1..s.rows).find(|&i| (t + 1..s.cols).any(|j| !(&s[(i, j)] % &piv).is_zero()));
            if let Some(i) = bad {
                let one = BigInt::one();
                s.add_row_multiple(t, i, &one);
                u.add_row_multiple(t, i, &one);
                continue;
            }
            break;
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    (s, u, v)
}

/// Diagonal of the Smith form.
pub fn elementary_divisors(m: &IntMatrix) -> Vec<BigInt> {
    let (s, _, _) = snf(m);
    (0..m.rows.min(m.cols)).map(|i| s[(i, i)].clone()).collect()
}

/// Coefficients `[1, c1, ..., cN]` of `det(xI - A)`, by the Faddeev-LeVerrier recursion.
pub fn char_poly(a: &IntMatrix) -> Vec<BigInt> {
    assert!(a.is_square(), "characteristic polynomial of non-square matrix");
    let n = a.rows;
    let mut coeffs = vec![BigInt::one()];
    let mut m = IntMatrix::zeros(n, n);
    for k in 1..=n {
        let mut next = a.mul(&m);
        let c_prev = coeffs[k - 1].clone();
        for i in 0..n {
            next[(i, i)] += &c_prev;
        }
        m = next;
        let t = a.mul(&m).trace();
        coeffs.push(-(t / BigInt::from(k)));
    }
    coeffs
}

/// Primitivity test through the Wielandt exponent `(N-1)^2 + 1`.
pub fn is_primitive(a: &IntMatrix) -> Result<bool> {
    if !a.is_square() {
        return invalid("primitivity needs a square matrix");
    }
    if !a.is_nonnegative() {
        return invalid("primitivity is defined for nonnegative matrices");
    }
    let n = a.rows;
    if n == 0 {
        return Ok(false);
    }
    let pattern: Vec<bool> = a.data.iter().map(|x| x.is_positive()).collect();
    let exp = (n - 1) * (n - 1) + 1;
    let p = bool_pow(&pattern, n, exp);
    Ok(p.iter().all(|&b| b))
}

fn bool_mul(a: &[bool], b: &[bool], n: usize) -> Vec<bool> {
    let mut out = vec![false; n * n];
    for i in 0..n {
        for k in 0..n {
            if a[i * n + k] {
                for j in 0..n {
                    out[i * n + j] |= b[k * n + j];
                }
            }
        }
    }
    out
}

fn bool_pow(a: &[bool], n: usize, mut e: usize) -> Vec<bool> {
    let mut result: Vec<bool> = (0..n * n).map(|k| k / n == k % n).collect();
    let mut base = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            result = bool_mul(&result, &base, n);
        }
        e >>= 1;
        if e > 0 {
            base = bool_mul(&base, &base, n);
        }
    }
    result
}

/// A sublattice of `Z^N` stored through its column HNF basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Lattice {
    dim: usize,
    basis: IntMatrix,
}

impl Lattice {
    pub fn from_generators(gens: &IntMatrix) -> Lattice {
        let (h, _) = hnf(gens);
        let keep: Vec<usize> = (0..h.cols).filter(|&j| (0..h.rows).any(|i| !h[(i, j)].is_zero())).collect();
        Lattice { dim: gens.rows, basis: h.select_columns(&keep) }
    }

    pub fn full(dim: usize) -> Lattice {
        Lattice { dim, basis: IntMatrix::identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.cols
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<BigInt>> {
        (0..self.rank()).map(|j| self.basis.col(j)).collect()
    }

    /// Integer coordinates of `x` in the basis, if `x` lies in the lattice.
    pub fn coordinates(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        assert_eq!(x.len(), self.dim);
        let mut rest = x.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        let mut row = 0;
        for j in 0..self.rank() {
            while self.basis[(row, j)].is_zero() {
                if !rest[row].is_zero() {
                    return None;
                }
                row += 1;
            }
            let piv = &self.basis[(row, j)];
            let (q, r) = rest[row].div_rem(piv);
            if !r.is_zero() {
                return None;
            }
            for i in 0..self.dim {
                let v = &self.basis[(i, j)] * &q;
                rest[i] -= v;
            }
            coords.push(q);
            row += 1;
        }
        if rest.iter().all(Zero::is_zero) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.coordinates(x).is_some()
    }
}

/// Z-basis (columns) of the integer solutions of `K x = 0`.
pub fn integer_kernel(k: &IntMatrix) -> IntMatrix {
    if k.rows == 0 {
        return IntMatrix::identity(k.cols);
    }
    let (h, u) = hnf(k);
    let zero_cols: Vec<usize> = (0..h.cols).filter(|&j| (0..h.rows).all(|i| h[(i, j)].is_zero())).collect();
    let basis = u.select_columns(&zero_cols);
    Lattice::from_generators(&basis).basis
}

/// Integer vectors in the rational column span of `m`.
pub fn saturate(m: &IntMatrix) -> Lattice {
    let n = m.rows;
    let left_null = m.to_rat().transpose().kernel();
    if left_null.is_empty() {
        return Lattice::full(n);
    }
    let mut k = RatMatrix::zeros(left_null.len(), n);
    for (i, y) in left_null.iter().enumerate() {
        for j in 0..n {
            k[(i, j)] = y[j].clone();
        }
    }
    let (k_int, _) = k.clear_denominators();
    let basis = integer_kernel(&k_int);
    Lattice { dim: n, basis }
}

/// Z-basis of `{J : left * J = J * right}` for rational square matrices.
pub fn intertwiner_lattice_general(left: &RatMatrix, right: &RatMatrix) -> Vec<IntMatrix> {
    let n = right.rows;
    let m = left.rows;
    assert_eq!(left.cols, m);
    assert_eq!(right.cols, n);
    // J is m x n, unknown index i*n + j.
    let mut sys = RatMatrix::zeros(m * n, m * n);
    for i in 0..m {
        for j in 0..n {
            let r = i * n + j;
            for k in 0..m {
                sys[(r, k * n + j)] += &left[(i, k)];
            }
            for k in 0..n {
                sys[(r, i * n + k)] -= &right[(k, j)];
            }
        }
    }
    let mut rows = Vec::new();
    for r in 0..sys.rows {
        let row = sys.row(r);
        if row.iter().all(Zero::is_zero) {
            continue;
        }
        let d = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        rows.push(row.iter().map(|x| (x * Rat::from_integer(d.clone())).to_integer()).collect::<Vec<_>>());
    }
    let k = if rows.is_empty() { IntMatrix::zeros(0, m * n) } else { IntMatrix::from_big_rows(rows) };
    let basis = integer_kernel(&k);
    (0..basis.cols)
        .map(|c| IntMatrix::new(m, n, basis.col(c)))
        .collect()
}

/// Z-basis of the integer matrices `J` with `B J = J A`.
pub fn intertwiner_lattice(a: &IntMatrix, b: &IntMatrix) -> Vec<IntMatrix> {
    assert!(a.is_square() && b.is_square() && a.rows == b.rows, "intertwiners need equal square shapes");
    intertwiner_lattice_general(&b.to_rat(), &a.to_rat())
}

/// Some unimodular matrix whose first column is the primitive vector `u`.
pub fn complete_to_unimodular(u: &[BigInt]) -> IntMatrix {
    let n = u.len();
    let row = IntMatrix::new(1, n, u.to_vec());
    let (h, v) = hnf(&row);
    assert!(h[(0, 0)].is_one(), "vector is not primitive");
    // u^T V = e1^T, hence u = (V^T)^{-1} e1.
    let vt_inv = v.transpose().to_rat().inverse().expect("unimodular");
    vt_inv.to_int().expect("unimodular inverse is integral")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use proptest::prelude::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(rows)
    }

    #[test]
    fn hnf_identity_and_diagonal() {
        let (h, u) = hnf(&IntMatrix::identity(2));
        assert_eq!(h, IntMatrix::identity(2));
        assert_eq!(u, IntMatrix::identity(2));
        let d = m(&[&[2, 0], &[0, 3]]);
        let (h, u) = hnf(&d);
        assert_eq!(h, d);
        assert_eq!(u, IntMatrix::identity(2));
    }

    #[test]
    fn hnf_unimodular_goes_to_identity() {
        let a = m(&[&[2, 3, 1], &[1, 2, 1], &[1, 1, 1]]);
        assert_eq!(a.det().abs(), int(1));
        let (h, u) = hnf(&a);
        assert_eq!(h, IntMatrix::identity(3));
        assert_eq!(a.mul(&u), h);
        // oracle: the rational inverse of A is integral and equals U
        assert_eq!(a.to_rat().inverse().unwrap().to_int().unwrap(), u);
    }

    #[test]
    fn snf_examples() {
        let (s, u, v) = snf(&IntMatrix::diag(&[4, 9]));
        assert_eq!(s, IntMatrix::diag(&[1, 36]));
        assert_eq!(u.mul(&IntMatrix::diag(&[4, 9])).mul(&v), s);
        assert_eq!(elementary_divisors(&m(&[&[2, 4], &[6, 8]])), vec![int(2), int(4)]);
        assert_eq!(elementary_divisors(&IntMatrix::identity(3)), vec![int(1); 3]);
    }

    #[test]
    fn char_poly_examples() {
        let cp = |a: IntMatrix| char_poly(&a).into_iter().map(|c| c.try_into().unwrap()).collect::<Vec<i64>>();
        assert_eq!(cp(m(&[&[1, 1], &[2, 0]])), vec![1, -1, -2]);
        assert_eq!(cp(m(&[&[4, 1], &[1, 2]])), vec![1, -6, 7]);
        assert_eq!(cp(IntMatrix::identity(2)), vec![1, -2, 1]);
        assert_eq!(cp(IntMatrix::diag(&[2, 2, 3])), vec![1, -7, 16, -12]);
    }

    #[test]
    fn primitivity() {
        assert!(is_primitive(&m(&[&[1, 1], &[2, 0]])).unwrap());
        assert!(!is_primitive(&m(&[&[0, 1], &[1, 0]])).unwrap());
        assert!(!is_primitive(&m(&[&[1, 0], &[0, 2]])).unwrap());
        assert!(is_primitive(&m(&[&[1, -1], &[0, 1]])).is_err());
    }

    #[test]
    fn saturation_examples() {
        assert_eq!(saturate(&m(&[&[2, 0], &[0, 2]])), Lattice::full(2));
        let line = saturate(&m(&[&[2], &[4]]));
        assert_eq!(line.basis(), &m(&[&[1], &[2]]));
        assert_eq!(saturate(&IntMatrix::zeros(2, 2)).rank(), 0);
    }

    #[test]
    fn lattice_membership() {
        let l = Lattice::from_generators(&m(&[&[2, 0], &[1, 3]]));
        assert!(l.contains(&[int(2), int(1)]));
        assert!(l.contains(&[int(0), int(3)]));
        assert!(!l.contains(&[int(1), int(0)]));
        assert!(!l.contains(&[int(0), int(1)]));
    }

    #[test]
    fn intertwiners() {
        let basis = intertwiner_lattice(&IntMatrix::identity(2), &IntMatrix::identity(2));
        assert_eq!(basis.len(), 4);
        let a = m(&[&[1, 5], &[3, 3]]);
        let basis = intertwiner_lattice(&a, &a.transpose());
        let target = m(&[&[1, 2], &[2, 3]]);
        let gens: Vec<Vec<BigInt>> = basis.iter().map(|j| j.entries().to_vec()).collect();
        let l = Lattice::from_generators(&IntMatrix::from_columns(4, &gens));
        assert!(l.contains(target.entries()));
        let a1 = m(&[&[4, 1], &[1, 2]]);
        let a2 = m(&[&[3, 1], &[2, 3]]);
        let basis = intertwiner_lattice(&a1, &a2);
        let gens: Vec<Vec<BigInt>> = basis.iter().map(|j| j.entries().to_vec()).collect();
        let l = Lattice::from_generators(&IntMatrix::from_columns(4, &gens));
        assert!(l.contains(m(&[&[1, 0], &[1, 1]]).entries()));
    }

    #[test]
    fn unimodular_completion() {
        let u = vec![int(3), int(5), int(7)];
        let w = complete_to_unimodular(&u);
        assert_eq!(w.det().abs(), int(1));
        assert_eq!(w.col(0), u);
    }

    #[test]
    fn rational_inverse_and_kernel() {
        let a = m(&[&[1, 1], &[2, 0]]).to_rat();
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), RatMatrix::identity(2));
        let s = m(&[&[1, 2], &[2, 4]]).to_rat();
        assert!(s.inverse().is_none());
        assert_eq!(s.kernel().len(), 1);
        assert_eq!(s.det(), Rat::zero());
    }

    fn int_matrix(rows: usize, cols: usize, range: std::ops::Range<i64>) -> impl Strategy<Value = IntMatrix> {
        proptest::collection::vec(range, rows * cols)
            .prop_map(move |v| IntMatrix::new(rows, cols, v.into_iter().map(BigInt::from).collect()))
    }

    fn any_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..5, 1usize..5).prop_flat_map(|(r, c)| int_matrix(r, c, -9..10))
    }

    fn square(range: std::ops::Range<usize>, entries: std::ops::Range<i64>) -> impl Strategy<Value = IntMatrix> {
        range.prop_flat_map(move |n| int_matrix(n, n, entries.clone()))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn hnf_staircase(a in any_matrix()) {
            let (h, u) = hnf(&a);
            prop_assert_eq!(a.mul(&u), h.clone());
            prop_assert!(u.det().abs().is_one());
            // pivot rows strictly increase with the column; entries right of a pivot in its row vanish
            let mut last: Option<usize> = None;
            let mut zero_tail = false;
            for j in 0..h.cols() {
                let piv = (0..h.rows()).find(|&i| !h[(i, j)].is_zero());
                match piv {
                    None => zero_tail = true,
                    Some(i) => {
                        prop_assert!(!zero_tail);
                        prop_assert!(last.map_or(true, |l| i > l));
                        prop_assert!(h[(i, j)].is_positive());
                        for k in 0..j {
                            prop_assert!(!h[(i, k)].is_negative() && h[(i, k)] < h[(i, j)]);
                        }
                        last = Some(i);
                    }
                }
            }
        }

        #[test]
        fn snf_chain(a in any_matrix()) {
            let (s, u, v) = snf(&a);
            prop_assert_eq!(u.mul(&a).mul(&v), s.clone());
            prop_assert!(u.det().abs().is_one() && v.det().abs().is_one());
            let r = a.rows().min(a.cols());
            for i in 0..s.rows() {
                for j in 0..s.cols() {
                    prop_assert!(i == j || s[(i, j)].is_zero());
                }
            }
            for i in 1..r {
                let (x, y) = (&s[(i - 1, i - 1)], &s[(i, i)]);
                prop_assert!(!x.is_negative());
                let divides = if x.is_zero() { y.is_zero() } else { (y % x).is_zero() };
                prop_assert!(divides);
            }
            if a.is_square() && !a.det().is_zero() {
                let prod = (0..r).fold(BigInt::one(), |acc, i| acc * &s[(i, i)]);
                prop_assert_eq!(prod, a.det().abs());
            }
        }

        #[test]
        fn cayley_hamilton(a in square(1..6, -5..6)) {
            let c = char_poly(&a);
            let n = a.rows();
            let mut acc = IntMatrix::zeros(n, n);
            for (k, ck) in c.iter().enumerate() {
                acc = acc.add(&a.pow((n - k) as u32).scale(ck));
            }
            prop_assert!(acc.is_zero());
            prop_assert_eq!(&c[n] * if n % 2 == 0 { 1 } else { -1 }, a.det());
        }

        #[test]
        fn primitivity_brute_force(a in square(1..5, 0..2)) {
            let n = a.rows() as u32;
            let bound = (n - 1) * (n - 1) + 1;
            let pattern = IntMatrix::new(a.rows(), a.cols(), a.entries().iter().map(|x| if x.is_zero() { BigInt::zero() } else { BigInt::one() }).collect());
            let mut p = pattern.clone();
            let mut found = p.is_positive();
            for _ in 1..bound.max(1) {
                if found { break; }
                p = p.mul(&pattern);
                found = p.is_positive();
            }
            prop_assert_eq!(is_primitive(&a).unwrap(), found);
        }

        #[test]
        fn intertwiner_property(a in square(2..4, -3..4), b in square(2..4, -3..4), coeffs in proptest::collection::vec(-3i64..4, 9)) {
            prop_assume!(a.rows() == b.rows());
            let basis = intertwiner_lattice(&a, &b);
            let mut j = IntMatrix::zeros(a.rows(), a.rows());
            for (x, k) in basis.iter().zip(&coeffs) {
                prop_assert_eq!(b.mul(x), x.mul(&a));
                j = j.add(&x.scale(&BigInt::from(*k)));
            }
            prop_assert_eq!(b.mul(&j), j.mul(&a));
        }
    }
}
