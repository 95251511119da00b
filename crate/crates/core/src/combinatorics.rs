//! Exact binomial sums behind the ring-graph identities.
//!
//! Everything here is computed with arbitrary-precision integers and
//! rationals. Kravtchouk polynomials carry an irrational normalisation
//! `[C(N,k) (uv)^k]^{-1/2}`, so they are represented by their exact square
//! together with the sign of the underlying alternating sum.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombinatoricsError {
    #[error("N(s,t) needs s >= 1 and t >= 1, got ({s}, {t})")]
    NonPositiveArgument { s: i64, t: i64 },
    #[error("invalid Kravtchouk parameters: {0}")]
    InvalidKravtchouk(&'static str),
    #[error("q = {q} outside 1..n-1 for n = {n}")]
    QOutOfRange { n: i64, q: i64 },
    #[error("index nu = {0} must be at least 1")]
    NonPositiveIndex(i64),
}

/// `C(n, k)`, extended by zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Row-major Pascal triangle for the sweeps that evaluate many binomials
/// with a common bound.
#[derive(Debug, Clone)]
pub(crate) struct Pascal {
    rows: Vec<Vec<BigInt>>,
    zero: BigInt,
}

impl Pascal {
    pub(crate) fn new(max_n: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(max_n + 1);
        for n in 0..=max_n {
            let mut row = vec![BigInt::one(); n + 1];
            for k in 1..n {
                row[k] = &rows[n - 1][k - 1] + &rows[n - 1][k];
            }
            rows.push(row);
        }
        Self {
            rows,
            zero: BigInt::zero(),
        }
    }

    pub(crate) fn get(&self, n: i64, k: i64) -> &BigInt {
        if n < 0 || k < 0 || k > n {
            return &self.zero;
        }
        let (n, k) = (n as usize, k as usize);
        assert!(n < self.rows.len(), "Pascal table too small for n = {n}");
        &self.rows[n][k]
    }
}

fn sign_power(exponent: i64) -> i64 {
    if exponent.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn rat(value: BigInt) -> BigRational {
    BigRational::from_integer(value)
}

fn rat_pow(base: &BigRational, exponent: i64) -> BigRational {
    num_traits::pow(base.clone(), exponent as usize)
}

/// `N(s,t) = sum_{nu=1}^{min(s,t)} (-1)^{t-nu} C(t,nu) C(s-1,nu-1)`.
pub fn nq(s: i64, t: i64) -> Result<BigInt, CombinatoricsError> {
    if s < 1 || t < 1 {
        return Err(CombinatoricsError::NonPositiveArgument { s, t });
    }
    let mut acc = BigInt::zero();
    for nu in 1..=s.min(t) {
        let term = binomial(t, nu) * binomial(s - 1, nu - 1);
        if sign_power(t - nu) > 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// Parameters of `P_{N,k}^{(u,v)}(x)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KravtchoukSpec {
    pub degree_bound: i64,
    pub k: i64,
    pub x: i64,
    pub u: BigRational,
    pub v: BigRational,
}

impl KravtchoukSpec {
    pub fn new(
        degree_bound: i64,
        k: i64,
        x: i64,
        u: BigRational,
        v: BigRational,
    ) -> Result<Self, CombinatoricsError> {
        let spec = Self {
            degree_bound,
            k,
            x,
            u,
            v,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The symmetric weights `u = v = 1/2`.
    pub fn symmetric(degree_bound: i64, k: i64, x: i64) -> Result<Self, CombinatoricsError> {
        let half = BigRational::new(1.into(), 2.into());
        Self::new(degree_bound, k, x, half.clone(), half)
    }

    fn validate(&self) -> Result<(), CombinatoricsError> {
        if self.degree_bound < 0 {
            return Err(CombinatoricsError::InvalidKravtchouk("N must be non-negative"));
        }
        if self.k < 0 || self.k > self.degree_bound {
            return Err(CombinatoricsError::InvalidKravtchouk("k must satisfy 0 <= k <= N"));
        }
        if self.x < 0 || self.x > self.degree_bound {
            return Err(CombinatoricsError::InvalidKravtchouk("x must satisfy 0 <= x <= N"));
        }
        if &self.u + &self.v != BigRational::one() {
            return Err(CombinatoricsError::InvalidKravtchouk("u + v must equal 1"));
        }
        if !self.u.is_positive() || self.u >= BigRational::one() {
            return Err(CombinatoricsError::InvalidKravtchouk("u must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// A Kravtchouk value stored as its exact square and the sign of the
/// alternating sum (the normalisation prefactor is positive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KravtchoukSquare {
    pub square: BigRational,
    pub sign: Sign,
}

impl KravtchoukSquare {
    pub fn to_f64(&self) -> f64 {
        let magnitude = crate::to_f64(&self.square).sqrt();
        match self.sign {
            Sign::Minus => -magnitude,
            Sign::NoSign => 0.0,
            Sign::Plus => magnitude,
        }
    }
}

/// Alternating sum `sum_nu (-1)^{k-nu} C(x,nu) C(N-x,k-nu) u^{k-nu} v^nu`.
fn kravtchouk_sum(spec: &KravtchoukSpec) -> BigRational {
    let mut acc = BigRational::zero();
    for nu in 0..=spec.k {
        let count = binomial(spec.x, nu) * binomial(spec.degree_bound - spec.x, spec.k - nu);
        if count.is_zero() {
            continue;
        }
        let term = rat(count) * rat_pow(&spec.u, spec.k - nu) * rat_pow(&spec.v, nu);
        if sign_power(spec.k - nu) > 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// `P_{N,k}^{(u,v)}(x)^2` exactly, plus the sign of `P`.
pub fn kravtchouk_square(spec: &KravtchoukSpec) -> Result<KravtchoukSquare, CombinatoricsError> {
    spec.validate()?;
    let sum = kravtchouk_sum(spec);
    let norm = rat(binomial(spec.degree_bound, spec.k)) * rat_pow(&(&spec.u * &spec.v), spec.k);
    Ok(KravtchoukSquare {
        square: &sum * &sum / norm,
        sign: sum.numer().sign(),
    })
}

/// Checks `N(s,t) = (-1)^{s+t} C(s+t-1,s)^{1/2} P_{s+t-1,s}(t)` by comparing
/// squares and signs.
pub fn check_nq_kravtchouk(s: i64, t: i64) -> bool {
    let Ok(value) = nq(s, t) else {
        return false;
    };
    let Ok(spec) = KravtchoukSpec::symmetric(s + t - 1, s, t) else {
        return false;
    };
    let Ok(kr) = kravtchouk_square(&spec) else {
        return false;
    };
    let lhs = rat(&value * &value);
    let rhs = rat(binomial(s + t - 1, s)) * kr.square;
    let expected_sign = if sign_power(s + t) > 0 { kr.sign } else { -kr.sign };
    lhs == rhs && value.sign() == expected_sign
}

/// Both sides of `sum_{q=1}^{n-1} C(q-1,nu-1) C(n-q-1,nu-1) = C(n-1,2nu-1) = (2nu/n) C(n,2nu)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ci1Check {
    pub sum: BigInt,
    pub closed: BigInt,
    pub scaled: BigRational,
    pub holds: bool,
}

pub fn ci1_evaluate(n: i64, nu: i64) -> Ci1Check {
    let sum = (1..n)
        .map(|q| binomial(q - 1, nu - 1) * binomial(n - q - 1, nu - 1))
        .sum::<BigInt>();
    let closed = binomial(n - 1, 2 * nu - 1);
    let scaled = if n == 0 {
        BigRational::zero()
    } else {
        BigRational::new(BigInt::from(2 * nu), BigInt::from(n)) * rat(binomial(n, 2 * nu))
    };
    let holds = sum == closed && rat(closed.clone()) == scaled;
    Ci1Check {
        sum,
        closed,
        scaled,
        holds,
    }
}

pub fn ci1_check(n: i64, nu: i64) -> bool {
    n >= 2 && nu >= 1 && ci1_evaluate(n, nu).holds
}

fn f_term_with(pascal: &Pascal, n: i64, q: i64, nu: i64, nu2: i64) -> BigRational {
    let product = pascal.get(q - 1, nu - 1)
        * pascal.get(q - 1, nu2 - 1)
        * pascal.get(n - q - 1, nu - 1)
        * pascal.get(n - q - 1, nu2 - 1);
    if product.is_zero() {
        return BigRational::zero();
    }
    // Nonzero product forces nu + nu2 <= n, so the inverse binomial exists.
    let numer = BigInt::from(sign_power(nu + nu2) * (n - 1) * n) * product;
    let denom = BigInt::from(2 * nu * nu2) * pascal.get(n, nu + nu2);
    BigRational::new(numer, denom)
}

/// `F_{nu,nu'}(n,q)` evaluated for any integers; vanishes wherever one of the
/// four lower binomials does.
pub(crate) fn f_term_raw(n: i64, q: i64, nu: i64, nu2: i64) -> BigRational {
    if nu < 1 || nu2 < 1 || n < 1 {
        return BigRational::zero();
    }
    let pascal = Pascal::new(n.max(q).max(1) as usize);
    f_term_with(&pascal, n, q, nu, nu2)
}

/// `F_{nu,nu'}(n,q)` for `1 <= q < n`.
pub fn f_term(n: i64, q: i64, nu: i64, nu2: i64) -> Result<BigRational, CombinatoricsError> {
    if q < 1 || q >= n {
        return Err(CombinatoricsError::QOutOfRange { n, q });
    }
    if nu < 1 {
        return Err(CombinatoricsError::NonPositiveIndex(nu));
    }
    if nu2 < 1 {
        return Err(CombinatoricsError::NonPositiveIndex(nu2));
    }
    Ok(f_term_raw(n, q, nu, nu2))
}

/// `S(n,q) = sum_{nu,nu'=1}^{min(q,n-q)} F_{nu,nu'}(n,q)`.
pub fn s_sum(n: i64, q: i64) -> Result<BigRational, CombinatoricsError> {
    if q < 1 || q >= n {
        return Err(CombinatoricsError::QOutOfRange { n, q });
    }
    let pascal = Pascal::new(n as usize);
    let top = q.min(n - q);
    let mut acc = BigRational::zero();
    for nu in 1..=top {
        for nu2 in 1..=top {
            acc += f_term_with(&pascal, n, q, nu, nu2);
        }
    }
    Ok(acc)
}

/// `q^2 F(n,q) - (n-q-1)^2 F(n,q+1) + (n-1)(n-2q-1) F(n+1,q+1)`, which vanishes
/// identically.
pub fn recursion_residual(n: i64, q: i64, nu: i64, nu2: i64) -> BigRational {
    let pascal = Pascal::new((n + 1).max(1) as usize);
    recursion_residual_with(&pascal, n, q, nu, nu2)
}

pub(crate) fn recursion_residual_with(
    pascal: &Pascal,
    n: i64,
    q: i64,
    nu: i64,
    nu2: i64,
) -> BigRational {
    if nu < 1 || nu2 < 1 {
        return BigRational::zero();
    }
    let a = f_term_with(pascal, n, q, nu, nu2) * rat(BigInt::from(q * q));
    let b = f_term_with(pascal, n, q + 1, nu, nu2) * rat(BigInt::from((n - q - 1) * (n - q - 1)));
    let c = f_term_with(pascal, n + 1, q + 1, nu, nu2) * rat(BigInt::from((n - 1) * (n - 2 * q - 1)));
    a - b + c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    /// `n = 2m`
    Even,
    /// `n = 2m + 1`
    Odd,
}

impl Parity {
    pub fn length(self, m: i64) -> i64 {
        match self {
            Parity::Even => 2 * m,
            Parity::Odd => 2 * m + 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ci2Check {
    /// `n^2 sum_q (N(n-q,q)/q)^2`, from the integer sums.
    pub lhs: BigRational,
    /// The same quantity assembled from Kravtchouk squares.
    pub lhs_kravtchouk: BigRational,
    pub rhs: BigInt,
    pub equal: bool,
}

/// Both sides of the even (`n = 2m`) or odd (`n = 2m + 1`) sum rule for
/// `N(n-q,q)`.
pub fn ci2_check(m: i64, parity: Parity) -> Ci2Check {
    let n = parity.length(m);
    let mut lhs = BigRational::zero();
    let mut lhs_kravtchouk = BigRational::zero();
    for q in 1..n {
        let ratio = BigRational::new(BigInt::from(n), BigInt::from(q));
        let ratio_sq = &ratio * &ratio;
        if let Ok(value) = nq(n - q, q) {
            lhs += &ratio_sq * rat(&value * &value);
        }
        if let Ok(spec) = KravtchoukSpec::symmetric(n - 1, n - q, q) {
            let kr = kravtchouk_square(&spec).expect("validated spec");
            lhs_kravtchouk += rat(binomial(n - 1, n - q)) * ratio_sq * kr.square;
        }
    }
    let central = binomial(2 * m, m) * sign_power(m);
    let two_pow = BigInt::one() << (2 * m + 1) as usize;
    let rhs = match parity {
        Parity::Even => two_pow + central - 2,
        Parity::Odd => (two_pow << 1usize) - central * 2 - 2,
    };
    let equal = lhs.is_integer() && lhs == lhs_kravtchouk && *lhs.numer() == rhs;
    Ci2Check {
        lhs,
        lhs_kravtchouk,
        rhs,
        equal,
    }
}

/// `N(s,t)` reading of the sum rule, used to detect the `N(n-q,q)` vs
/// `N(q,n-q)` ambiguity: returns `n^2 sum_q (N(q,n-q)/q)^2`.
pub fn ci2_swapped_lhs(m: i64, parity: Parity) -> BigRational {
    let n = parity.length(m);
    (1..n)
        .map(|q| {
            let value = nq(q, n - q).expect("positive arguments");
            BigRational::new(BigInt::from(n * n), BigInt::from(q * q)) * rat(&value * &value)
        })
        .sum()
}

pub(crate) fn is_even(n: i64) -> bool {
    n.is_even()
}
