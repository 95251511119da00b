//! Truncated power series with exact rational coefficients.
//!
//! [`Series1`] keeps the coefficients of `x^0 ..= x^order`; [`Series2`] keeps
//! the monomials `x^s y^t` with `s + t <= order`. Binary operations truncate
//! to the smaller of the two operand orders.
//!
//! The generating functions of `N(s,t)` are provided twice: once summed
//! term by term from [`nq`](crate::combinatorics::nq) and once expanded from
//! their closed forms, so the two can be compared coefficient by coefficient.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::combinatorics::nq;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("series has zero constant term and cannot be inverted")]
    ZeroConstantTerm,
    #[error("inverse square root needs constant term 1, got {0}")]
    NonUnitConstantTerm(BigRational),
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series1 {
    coeffs: Vec<BigRational>,
}

impl Series1 {
    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![BigRational::zero(); order + 1],
        }
    }

    pub fn constant(value: BigRational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = value;
        s
    }

    pub fn one(order: usize) -> Self {
        Self::constant(BigRational::one(), order)
    }

    /// The formal variable `x`.
    pub fn x(order: usize) -> Self {
        Self::monomial(BigRational::one(), 1, order)
    }

    pub fn monomial(coeff: BigRational, degree: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if degree <= order {
            s.coeffs[degree] = coeff;
        }
        s
    }

    /// Builds a series from leading coefficients; missing ones are zero,
    /// extra ones are dropped.
    pub fn from_coeffs(coeffs: impl IntoIterator<Item = BigRational>, order: usize) -> Self {
        let mut s = Self::zero(order);
        for (slot, c) in s.coeffs.iter_mut().zip(coeffs) {
            *slot = c;
        }
        s
    }

    /// Small-integer convenience: `from_ints(&[1, 0, -1], order)` is `1 - x^2`.
    pub fn from_ints(coeffs: &[i64], order: usize) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| int(c)), order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `x^k`; zero beyond the truncation order.
    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self::from_coeffs(self.coeffs.iter().cloned(), order.min(self.order()))
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// `f(c x)`.
    pub fn substitute_scaled(&self, factor: &BigRational) -> Self {
        let mut power = BigRational::one();
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            out.push(c * &power);
            power *= factor;
        }
        Self { coeffs: out }
    }

    /// `1 / f`, by the triangular recurrence on coefficients.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let inv0 = a0.recip();
        let mut out: Vec<BigRational> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for k in 1..self.coeffs.len() {
            let mut acc = BigRational::zero();
            for j in 1..=k {
                if !self.coeffs[j].is_zero() {
                    acc += &self.coeffs[j] * &out[k - j];
                }
            }
            out.push(-acc * &inv0);
        }
        Ok(Self { coeffs: out })
    }

    /// `f^{-1/2}` for `f(0) = 1`, from `2 f r' = -f' r` solved term by term.
    pub fn inv_sqrt(&self) -> Result<Self, SeriesError> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::NonUnitConstantTerm(self.coeffs[0].clone()));
        }
        let n = self.coeffs.len();
        // x^{k-1} coefficient of 2 f r' + f' r = 0:
        // 2k r_k = -sum_{j=1}^{k} (2(k-j) + j) a_j r_{k-j}
        let mut r: Vec<BigRational> = Vec::with_capacity(n);
        r.push(BigRational::one());
        for k in 1..n {
            let mut acc = BigRational::zero();
            for j in 1..=k {
                if self.coeffs[j].is_zero() {
                    continue;
                }
                let weight = int((2 * (k - j) + j) as i64);
                acc += weight * &self.coeffs[j] * &r[k - j];
            }
            r.push(-acc / int(2 * k as i64));
        }
        Ok(Self { coeffs: r })
    }

    pub fn pow(&self, exponent: u32) -> Self {
        let mut acc = Self::one(self.order());
        for _ in 0..exponent {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &Series1 {
    type Output = Series1;
    fn add(self, rhs: &Series1) -> Series1 {
        let order = self.order().min(rhs.order());
        Series1 {
            coeffs: (0..=order).map(|k| &self.coeffs[k] + &rhs.coeffs[k]).collect(),
        }
    }
}

impl Sub for &Series1 {
    type Output = Series1;
    fn sub(self, rhs: &Series1) -> Series1 {
        let order = self.order().min(rhs.order());
        Series1 {
            coeffs: (0..=order).map(|k| &self.coeffs[k] - &rhs.coeffs[k]).collect(),
        }
    }
}

impl Mul for &Series1 {
    type Output = Series1;
    fn mul(self, rhs: &Series1) -> Series1 {
        let order = self.order().min(rhs.order());
        let mut out = vec![BigRational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        Series1 { coeffs: out }
    }
}

impl Neg for &Series1 {
    type Output = Series1;
    fn neg(self) -> Series1 {
        Series1 {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

/// Bivariate series truncated by total degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series2 {
    order: usize,
    /// `rows[s][t]` is the coefficient of `x^s y^t`, `t <= order - s`.
    rows: Vec<Vec<BigRational>>,
}

impl Series2 {
    pub fn zero(order: usize) -> Self {
        Self {
            order,
            rows: (0..=order)
                .map(|s| vec![BigRational::zero(); order - s + 1])
                .collect(),
        }
    }

    pub fn one(order: usize) -> Self {
        let mut z = Self::zero(order);
        z.rows[0][0] = BigRational::one();
        z
    }

    /// Builds `sum c x^s y^t` from `(s, t, c)` triples; terms past the order
    /// are dropped.
    pub fn from_terms(terms: &[(usize, usize, i64)], order: usize) -> Self {
        let mut z = Self::zero(order);
        for &(s, t, c) in terms {
            if s + t <= order {
                z.rows[s][t] += int(c);
            }
        }
        z
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, s: usize, t: usize) -> BigRational {
        if s + t > self.order {
            return BigRational::zero();
        }
        self.rows[s][t].clone()
    }

    fn set(&mut self, s: usize, t: usize, value: BigRational) {
        self.rows[s][t] = value;
    }

    /// Iterates `(s, t, coefficient)` over the stored triangle.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &BigRational)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(s, row)| row.iter().enumerate().map(move |(t, c)| (s, t, c)))
    }

    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let a0 = &self.rows[0][0];
        if a0.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let inv0 = a0.recip();
        let mut out = Self::zero(self.order);
        for total in 0..=self.order {
            for s in 0..=total {
                let t = total - s;
                if total == 0 {
                    out.set(0, 0, inv0.clone());
                    continue;
                }
                let mut acc = BigRational::zero();
                for i in 0..=s {
                    for j in 0..=t {
                        if i + j == 0 || self.rows[i][j].is_zero() {
                            continue;
                        }
                        acc += &self.rows[i][j] * &out.rows[s - i][t - j];
                    }
                }
                out.set(s, t, -acc * &inv0);
            }
        }
        Ok(out)
    }
}

impl Mul for &Series2 {
    type Output = Series2;
    fn mul(self, rhs: &Series2) -> Series2 {
        let order = self.order.min(rhs.order);
        let mut out = Series2::zero(order);
        for (s1, t1, a) in self.terms() {
            if a.is_zero() || s1 + t1 > order {
                continue;
            }
            for (s2, t2, b) in rhs.terms() {
                if s1 + t1 + s2 + t2 > order || b.is_zero() {
                    continue;
                }
                out.rows[s1 + s2][t1 + t2] += a * b;
            }
        }
        out
    }
}

fn nq_rat(s: i64, t: i64) -> BigRational {
    BigRational::from_integer(nq(s, t).expect("s, t >= 1"))
}

/// `sum_{s,t>=1} N(s,t)^2 x^{s+t}` through `x^order`.
pub fn g1_po(order: usize) -> Series1 {
    let mut out = Series1::zero(order);
    for total in 2..=order as i64 {
        let c: BigRational = (1..total)
            .map(|s| {
                let v = nq_rat(s, total - s);
                &v * &v
            })
            .sum();
        out.coeffs[total as usize] = c;
    }
    out
}

/// `x/(2x-1) [ (4x^2+1)^{-1/2} - 1/(1-x) ]`.
pub fn g1_closed(order: usize) -> Series1 {
    let one_plus_4x2 = Series1::from_ints(&[1, 0, 4], order);
    let inv_sqrt = one_plus_4x2.inv_sqrt().expect("constant term 1");
    let geometric = Series1::from_ints(&[1, -1], order)
        .reciprocal()
        .expect("constant term 1");
    let prefactor = &Series1::x(order)
        * &Series1::from_ints(&[-1, 2], order)
            .reciprocal()
            .expect("constant term -1");
    &prefactor * &(&inv_sqrt - &geometric)
}

/// `sum_{s,t>=1} N(s,t) N(t,s) x^{s+t}`.
pub fn g2_po(order: usize) -> Series1 {
    let mut out = Series1::zero(order);
    for total in 2..=order as i64 {
        let c: BigRational = (1..total)
            .map(|s| nq_rat(s, total - s) * nq_rat(total - s, s))
            .sum();
        out.coeffs[total as usize] = c;
    }
    out
}

/// `(1/2)(4x^2+2x+1) / [(2x+1) (4x^2+1)^{1/2}] - 1/2`.
pub fn g2_closed(order: usize) -> Series1 {
    let numerator = Series1::from_ints(&[1, 2, 4], order);
    let inv_linear = Series1::from_ints(&[1, 2], order)
        .reciprocal()
        .expect("constant term 1");
    let inv_sqrt = Series1::from_ints(&[1, 0, 4], order)
        .inv_sqrt()
        .expect("constant term 1");
    let half = frac(1, 2);
    let body = (&(&numerator * &inv_linear) * &inv_sqrt).scale(&half);
    &body - &Series1::constant(half, order)
}

/// `sum_{s,t>=1} N(s,t) x^s y^t`, truncated at total degree `order`.
pub fn g_bivariate_po(order: usize) -> Series2 {
    let mut out = Series2::zero(order);
    for s in 1..order {
        for t in 1..=(order - s) {
            out.set(s, t, nq_rat(s as i64, t as i64));
        }
    }
    out
}

/// `xy / [(1+y)(1 - x + y - 2xy)]`.
pub fn g_bivariate_closed(order: usize) -> Series2 {
    let denominator = &Series2::from_terms(&[(0, 0, 1), (0, 1, 1)], order)
        * &Series2::from_terms(&[(0, 0, 1), (1, 0, -1), (0, 1, 1), (1, 1, -2)], order);
    let inv = denominator.reciprocal().expect("constant term 1");
    &Series2::from_terms(&[(1, 1, 1)], order) * &inv
}

/// `(1/2)(1-2x)/sqrt(1+4x^2) - (1/2)(1-6x)/(1-2x)`: the generating function
/// `sum_n K(n; pi/4) (2x)^n` from the spectral side.
pub fn big_g_spectral(order: usize) -> Series1 {
    let half = frac(1, 2);
    let inv_sqrt = Series1::from_ints(&[1, 0, 4], order)
        .inv_sqrt()
        .expect("constant term 1");
    let first = (&Series1::from_ints(&[1, -2], order) * &inv_sqrt).scale(&half);
    let second = (&Series1::from_ints(&[1, -6], order)
        * &Series1::from_ints(&[1, -2], order)
            .reciprocal()
            .expect("constant term 1"))
        .scale(&half);
    &first - &second
}

/// `x/(1-x) + G1(x) + G2(-x)`, assembled from the term-by-term sums of
/// `N(s,t)` (the periodic-orbit side).
pub fn big_g_po(order: usize) -> Series1 {
    let geometric = &Series1::x(order)
        * &Series1::from_ints(&[1, -1], order)
            .reciprocal()
            .expect("constant term 1");
    let g2_neg = g2_po(order).substitute_scaled(&int(-1));
    &(&geometric + &g1_po(order)) + &g2_neg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_arithmetic_examples() {
        let order = 6;
        let p = Series1::from_ints(&[1, 1], order);
        let m = Series1::from_ints(&[1, -1], order);
        assert_eq!(&p * &m, Series1::from_ints(&[1, 0, -1], order));
        assert_eq!(&p * &Series1::one(order), p);
        assert_eq!(&Series1::x(order) * &Series1::x(order), Series1::monomial(int(1), 2, order));
        assert_eq!(&p + &m, Series1::constant(int(2), order));
        assert_eq!(&p - &m, Series1::from_ints(&[0, 2], order));
        assert_eq!(-&p, Series1::from_ints(&[-1, -1], order));
    }

    #[test]
    fn orders_take_minimum() {
        let a = Series1::from_ints(&[1, 1, 1, 1], 3);
        let b = Series1::from_ints(&[1, 1], 5);
        assert_eq!((&a * &b).order(), 3);
        assert_eq!((&b + &a).order(), 3);
        assert_eq!(Series1::monomial(int(1), 9, 3), Series1::zero(3));
    }

    #[test]
    fn reciprocal_examples() {
        let order = 10;
        let geo = Series1::from_ints(&[1, -1], order).reciprocal().unwrap();
        assert!(geo.coeffs().iter().all(|c| c.is_one()));
        let geo2 = Series1::from_ints(&[1, -2], order).reciprocal().unwrap();
        for (k, c) in geo2.coeffs().iter().enumerate() {
            assert_eq!(*c, int(1 << k));
        }
        let half = Series1::constant(int(2), order).reciprocal().unwrap();
        assert_eq!(half, Series1::constant(frac(1, 2), order));
        assert_eq!(Series1::x(order).reciprocal(), Err(SeriesError::ZeroConstantTerm));
    }

    #[test]
    fn inv_sqrt_examples() {
        let order = 12;
        let r = Series1::from_ints(&[1, 0, 4], order).inv_sqrt().unwrap();
        // sum C(2k,k) (-1)^k x^{2k}
        let expected = [1, 0, -2, 0, 6, 0, -20, 0, 70, 0, -252, 0, 924];
        assert_eq!(r, Series1::from_ints(&expected, order));
        assert_eq!(Series1::one(order).inv_sqrt().unwrap(), Series1::one(order));
        let base = Series1::from_ints(&[1, 0, 4], order);
        assert_eq!(&(&r * &r) * &base, Series1::one(order));
        assert!(matches!(
            Series1::constant(int(4), order).inv_sqrt(),
            Err(SeriesError::NonUnitConstantTerm(_))
        ));
    }

    #[test]
    fn generating_function_low_coefficients() {
        let order = 8;
        for s in [g1_po(order), g1_closed(order)] {
            assert_eq!(s.coeff(1), int(0));
            assert_eq!(s.coeff(2), int(1));
            assert_eq!(s.coeff(3), int(5));
        }
        for s in [g2_po(order), g2_closed(order)] {
            assert_eq!(s.coeff(0), int(0));
            assert_eq!(s.coeff(2), int(1));
            assert_eq!(s.coeff(3), int(-4));
        }
        for g in [g_bivariate_po(order), g_bivariate_closed(order)] {
            assert_eq!(g.coeff(1, 1), int(1));
            assert_eq!(g.coeff(1, 2), int(-2));
            assert_eq!(g.coeff(2, 1), int(1));
        }
        for g in [big_g_spectral(order), big_g_po(order)] {
            assert_eq!(g.coeff(0), int(0));
            assert_eq!(g.coeff(1), int(1));
            assert_eq!(g.coeff(2), int(3));
            assert_eq!(g.coeff(3), int(10));
        }
    }

    #[test]
    fn bivariate_reciprocal_round_trip() {
        let order = 8;
        let d = Series2::from_terms(&[(0, 0, 1), (1, 0, -1), (0, 1, 1), (1, 1, -2)], order);
        assert_eq!(&d * &d.reciprocal().unwrap(), Series2::one(order));
        assert_eq!(Series2::zero(order).reciprocal(), Err(SeriesError::ZeroConstantTerm));
    }
}
