//! Degree-2 truncated Taylor arithmetic in three variables around `(1, 1, 1)`.
//!
//! A [`Jet2`] stores the coefficients of
//! `c0 + cu u + cv v + cw w + cuu u^2 + cuv uv + cuw uw + cvv v^2 + cvw vw + cww w^2`
//! with `u = x - 1`, `v = y - 1`, `w = z - 1`; products drop every monomial of
//! total degree three or more. Partial derivatives at `(1, 1, 1)` are read off
//! directly: `f_x = cu`, `f_xx = 2 cuu`, `f_xy = cuv`, and so on.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    fn linear(self) -> usize {
        match self {
            Var::X => U,
            Var::Y => V,
            Var::Z => W,
        }
    }
}

const C0: usize = 0;
const U: usize = 1;
const V: usize = 2;
const W: usize = 3;
const UU: usize = 4;
const UV: usize = 5;
const UW: usize = 6;
const VV: usize = 7;
const VW: usize = 8;
const WW: usize = 9;

/// Index of the quadratic monomial `a * b` (linear indices `U..=W`).
fn quad(a: usize, b: usize) -> usize {
    match (a.min(b), a.max(b)) {
        (U, U) => UU,
        (U, V) => UV,
        (U, W) => UW,
        (V, V) => VV,
        (V, W) => VW,
        (W, W) => WW,
        _ => unreachable!("not a linear index"),
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Jet2 {
    c: [Rational; 10],
}

impl Jet2 {
    pub fn zero() -> Self {
        Jet2 { c: Default::default() }
    }

    pub fn one() -> Self {
        Jet2::constant(Rational::one())
    }

    pub fn constant(value: Rational) -> Self {
        let mut j = Jet2::zero();
        j.c[C0] = value;
        j
    }

    /// The coordinate function itself, `1 + u` (or `1 + v`, `1 + w`).
    pub fn variable(var: Var) -> Self {
        let mut j = Jet2::one();
        j.c[var.linear()] = Rational::one();
        j
    }

    /// `var^exponent` for any rational exponent, via the binomial series
    /// `(1 + u)^e = 1 + e u + e (e - 1) / 2 u^2 + ...`.
    pub fn power(var: Var, exponent: &Rational) -> Self {
        let i = var.linear();
        let mut j = Jet2::one();
        j.c[i] = exponent.clone();
        j.c[quad(i, i)] = exponent * (exponent - Rational::one()) / rational::int(2);
        j
    }

    /// Build from the ten coefficients in the order
    /// `c0, cu, cv, cw, cuu, cuv, cuw, cvv, cvw, cww`.
    pub fn from_coefficients(c: [Rational; 10]) -> Self {
        Jet2 { c }
    }

    pub fn coefficients(&self) -> &[Rational; 10] {
        &self.c
    }

    /// Function value at `(1, 1, 1)`.
    pub fn value(&self) -> &Rational {
        &self.c[C0]
    }

    /// First partial derivative at `(1, 1, 1)`.
    pub fn d(&self, var: Var) -> Rational {
        self.c[var.linear()].clone()
    }

    /// Second partial derivative at `(1, 1, 1)`.
    pub fn d2(&self, a: Var, b: Var) -> Rational {
        let coefficient = &self.c[quad(a.linear(), b.linear())];
        if a == b {
            coefficient * rational::int(2)
        } else {
            coefficient.clone()
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Jet2 {
            c: std::array::from_fn(|i| &self.c[i] * factor),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 10] = ["", "u", "v", "w", "u^2", "uv", "uw", "v^2", "vw", "w^2"];
        let mut first = true;
        for (c, name) in self.c.iter().zip(NAMES) {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if name.is_empty() {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c}){name}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Add<&Jet2> for &Jet2 {
    type Output = Jet2;
    fn add(self, rhs: &Jet2) -> Jet2 {
        Jet2 {
            c: std::array::from_fn(|i| &self.c[i] + &rhs.c[i]),
        }
    }
}

impl Sub<&Jet2> for &Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: &Jet2) -> Jet2 {
        Jet2 {
            c: std::array::from_fn(|i| &self.c[i] - &rhs.c[i]),
        }
    }
}

impl Mul<&Jet2> for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: &Jet2) -> Jet2 {
        let (a, b) = (&self.c, &rhs.c);
        let mut c: [Rational; 10] = Default::default();
        c[C0] = &a[C0] * &b[C0];
        for i in U..=W {
            c[i] = &a[C0] * &b[i] + &a[i] * &b[C0];
        }
        for i in U..=W {
            for j in i..=W {
                let q = quad(i, j);
                let mut term = &a[C0] * &b[q] + &a[q] * &b[C0] + &a[i] * &b[j];
                if i != j {
                    term += &a[j] * &b[i];
                }
                c[q] = term;
            }
        }
        Jet2 { c }
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 {
            c: std::array::from_fn(|i| -&self.c[i]),
        }
    }
}

macro_rules! forward_owned {
    ($($trait:ident $method:ident),*) => {$(
        impl $trait for Jet2 {
            type Output = Jet2;
            fn $method(self, rhs: Jet2) -> Jet2 {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Jet2> for Jet2 {
            type Output = Jet2;
            fn $method(self, rhs: &Jet2) -> Jet2 {
                (&self).$method(rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        -&self
    }
}

impl AddAssign<&Jet2> for Jet2 {
    fn add_assign(&mut self, rhs: &Jet2) {
        for (a, b) in self.c.iter_mut().zip(&rhs.c) {
            *a += b;
        }
    }
}

impl SubAssign<&Jet2> for Jet2 {
    fn sub_assign(&mut self, rhs: &Jet2) {
        for (a, b) in self.c.iter_mut().zip(&rhs.c) {
            *a -= b;
        }
    }
}

/// Truncated jet of the transition weight `(1/K) x^eps y^delta z`.
pub fn jet_from_edge(input: &Rational, output: &Rational, k: usize) -> Jet2 {
    let weight = &Jet2::power(Var::X, input) * &Jet2::power(Var::Y, output);
    (weight * Jet2::variable(Var::Z)).scale(&Rational::new(1.into(), k.into()))
}

/// Commutative ring operations needed by the division-free determinant.
pub trait Ring: Clone {
    fn ring_zero() -> Self;
    fn ring_one() -> Self;
    fn ring_add(&self, other: &Self) -> Self;
    fn ring_mul(&self, other: &Self) -> Self;
    fn ring_neg(&self) -> Self;
}

impl Ring for Jet2 {
    fn ring_zero() -> Self {
        Jet2::zero()
    }
    fn ring_one() -> Self {
        Jet2::one()
    }
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn ring_neg(&self) -> Self {
        -self
    }
}

impl Ring for Rational {
    fn ring_zero() -> Self {
        Rational::zero()
    }
    fn ring_one() -> Self {
        Rational::one()
    }
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn ring_neg(&self) -> Self {
        -self
    }
}

/// Square matrix over a commutative ring, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<R> {
    n: usize,
    entries: Vec<R>,
}

pub type JetMatrix = Matrix<Jet2>;

impl<R: Ring> Matrix<R> {
    pub fn zeros(n: usize) -> Self {
        Matrix {
            n,
            entries: vec![R::ring_zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = R::ring_one();
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let entries = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Matrix { n, entries }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> &R {
        &self.entries[row * self.n + col]
    }

    pub fn get_mut(&mut self, row: usize, col: usize) -> &mut R {
        &mut self.entries[row * self.n + col]
    }

    /// Determinant by the Samuelson-Berkowitz algorithm: no divisions, so it
    /// is exact over rings with zero divisors such as the jet ring.
    pub fn det(&self) -> R {
        let n = self.n;
        if n == 0 {
            return R::ring_one();
        }
        // Characteristic polynomial det(t I - B) of the trailing principal
        // submatrix B, coefficients in decreasing powers of t.
        let last = self.get(n - 1, n - 1);
        let mut poly = vec![R::ring_one(), last.ring_neg()];
        for k in (0..n - 1).rev() {
            let m = n - 1 - k;
            // Toeplitz column: 1, -a, -R C, -R B C, ..., -R B^(m-1) C
            let mut column = Vec::with_capacity(m + 2);
            column.push(R::ring_one());
            column.push(self.get(k, k).ring_neg());
            let mut vector: Vec<R> = (k + 1..n).map(|i| self.get(i, k).clone()).collect();
            for step in 0..m {
                let dot = (k + 1..n)
                    .zip(&vector)
                    .fold(R::ring_zero(), |acc, (j, x)| acc.ring_add(&self.get(k, j).ring_mul(x)));
                column.push(dot.ring_neg());
                if step + 1 < m {
                    vector = (k + 1..n)
                        .map(|i| {
                            (k + 1..n)
                                .zip(&vector)
                                .fold(R::ring_zero(), |acc, (j, x)| acc.ring_add(&self.get(i, j).ring_mul(x)))
                        })
                        .collect();
                }
            }
            poly = (0..m + 2)
                .map(|i| (0..=i.min(m)).fold(R::ring_zero(), |acc, j| acc.ring_add(&column[i - j].ring_mul(&poly[j]))))
                .collect();
        }
        let constant = poly.pop().expect("degree n polynomial");
        if n.is_multiple_of(2) {
            constant
        } else {
            constant.ring_neg()
        }
    }
}

pub fn jet_det(m: &JetMatrix) -> Jet2 {
    m.det()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};
    use proptest::prelude::*;

    fn jet(c: [i64; 10]) -> Jet2 {
        Jet2::from_coefficients(c.map(int))
    }

    /// Leibniz expansion over all permutations.
    fn leibniz<R: Ring>(m: &Matrix<R>) -> R {
        fn permute<R: Ring>(m: &Matrix<R>, perm: &mut Vec<usize>, used: &mut Vec<bool>, acc: &mut R) {
            let n = m.size();
            if perm.len() == n {
                let inversions = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| perm[i] > perm[j])
                    .count();
                let term = perm
                    .iter()
                    .enumerate()
                    .fold(R::ring_one(), |p, (row, &col)| p.ring_mul(m.get(row, col)));
                let signed = if inversions % 2 == 0 { term } else { term.ring_neg() };
                *acc = acc.ring_add(&signed);
                return;
            }
            for col in 0..n {
                if !used[col] {
                    used[col] = true;
                    perm.push(col);
                    permute(m, perm, used, acc);
                    perm.pop();
                    used[col] = false;
                }
            }
        }
        let mut acc = R::ring_zero();
        permute(m, &mut Vec::new(), &mut vec![false; m.size()], &mut acc);
        acc
    }

    #[test]
    fn edge_jets() {
        // (1/2)(1+u)(1+v)(1+w)
        let e = jet_from_edge(&int(1), &int(1), 2);
        let h = frac(1, 2);
        let z = int(0);
        assert_eq!(
            e,
            Jet2::from_coefficients([
                h.clone(),
                h.clone(),
                h.clone(),
                h.clone(),
                z.clone(),
                h.clone(),
                h.clone(),
                z.clone(),
                h.clone(),
                z
            ])
        );
        // (1/2)(1+w)
        assert_eq!(jet_from_edge(&int(0), &int(0), 2), Jet2::variable(Var::Z).scale(&h));
        // (1/2)(1+u)^(1/2)(1+w) = 1/2 + u/4 + w/2 - u^2/16 + uw/4
        let e = jet_from_edge(&frac(1, 2), &int(0), 2);
        let mut want: [Rational; 10] = Default::default();
        want[C0] = frac(1, 2);
        want[U] = frac(1, 4);
        want[W] = frac(1, 2);
        want[UU] = frac(-1, 16);
        want[UW] = frac(1, 4);
        assert_eq!(e, Jet2::from_coefficients(want));
    }

    #[test]
    fn products_truncate() {
        let u = &Jet2::variable(Var::X) - &Jet2::one();
        let v = &Jet2::variable(Var::Y) - &Jet2::one();
        let one = Jet2::one();
        // (1+u)(1+v) = 1 + u + v + uv
        assert_eq!((&one + &u) * (&one + &v), jet([1, 1, 1, 0, 0, 1, 0, 0, 0, 0]));
        // u * uv = 0
        assert!((&u * &(&u * &v)).is_zero());
        // (1+u+v)^2
        let s = &(&one + &u) + &v;
        assert_eq!(&s * &s, jet([1, 2, 2, 0, 1, 2, 0, 1, 0, 0]));
    }

    #[test]
    fn partials_read_off_coefficients() {
        let j = jet([1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
        assert_eq!(j.d(Var::X), int(2));
        assert_eq!(j.d2(Var::X, Var::X), int(10));
        assert_eq!(j.d2(Var::Y, Var::X), int(6));
        assert_eq!(j.d2(Var::Z, Var::Z), int(20));
        assert_eq!(j.d2(Var::Y, Var::Z), int(9));
    }

    #[test]
    fn determinant_examples() {
        for n in 0..5 {
            assert_eq!(JetMatrix::identity(n).det(), Jet2::one());
        }
        // [[1+u, v], [w, 1]] -> 1 + u - vw
        let one = Jet2::one();
        let u = &Jet2::variable(Var::X) - &one;
        let v = &Jet2::variable(Var::Y) - &one;
        let w = &Jet2::variable(Var::Z) - &one;
        let m = JetMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => &one + &u,
            (0, 1) => v.clone(),
            (1, 0) => w.clone(),
            _ => one.clone(),
        });
        assert_eq!(m.det(), &(&one + &u) - &(&v * &w));
    }

    #[test]
    fn rational_determinants() {
        let m = Matrix::from_fn(3, |i, j| int([[2, -1, 0], [-1, 2, -1], [0, -1, 2]][i][j]));
        assert_eq!(m.det(), int(4));
        let singular = Matrix::from_fn(3, |i, j| int((i * 3 + j) as i64));
        assert_eq!(singular.det(), int(0));
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-4i64..=4, 1i64..=3).prop_map(|(p, q)| frac(p, q))
    }

    fn any_jet() -> impl Strategy<Value = Jet2> {
        proptest::array::uniform10(small_rational()).prop_map(Jet2::from_coefficients)
    }

    fn jet_matrix(n: usize) -> impl Strategy<Value = JetMatrix> {
        proptest::collection::vec(any_jet(), n * n).prop_map(move |entries| Matrix { n, entries })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn multiplication_is_commutative_and_associative(a in any_jet(), b in any_jet(), c in any_jet()) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }

        #[test]
        fn berkowitz_matches_leibniz(m in (1usize..=4).prop_flat_map(jet_matrix)) {
            prop_assert_eq!(m.det(), leibniz(&m));
        }

        #[test]
        fn determinant_is_multiplicative_on_blocks(a in (1usize..=2).prop_flat_map(jet_matrix),
                                                   b in (1usize..=2).prop_flat_map(jet_matrix)) {
            let (p, q) = (a.size(), b.size());
            let block = JetMatrix::from_fn(p + q, |i, j| {
                if i < p && j < p {
                    a.get(i, j).clone()
                } else if i >= p && j >= p {
                    b.get(i - p, j - p).clone()
                } else {
                    Jet2::zero()
                }
            });
            prop_assert_eq!(block.det(), &a.det() * &b.det());
        }
    }
}
