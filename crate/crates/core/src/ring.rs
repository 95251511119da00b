//! The ring graph: one vertex on a loop, two directed bonds.
//!
//! The vertex mixes the two directions with
//!
//! ```text
//! sigma(eta) = [[cos eta, i sin eta], [i sin eta, cos eta]],   0 <= eta <= pi/2
//! ```
//!
//! and the bond-scattering matrix is `S = diag(e^{i phi1}, e^{i phi2}) sigma`.
//! At `eta = pi/4` the form factor is known in closed form and also as a sum
//! over periodic-orbit families, which is where most of the exact identities
//! in [`combinatorics`](crate::combinatorics) come from.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::Matrix2;
use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::combinatorics::{self, binomial, is_even, nq, KravtchoukSpec, Pascal};
use crate::quadrature::{self, QuadratureError};
use crate::to_f64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RingError {
    #[error("eta = {0} outside [0, pi/2]")]
    EtaOutOfRange(f64),
    #[error("non-finite phase {0}")]
    NonFinitePhase(f64),
    #[error("r = {0} outside [0, 2]")]
    ROutOfRange(f64),
    #[error("trace identity needs 0 <= kappa <= nu and epsilon > 0 (nu = {nu}, kappa = {kappa}, epsilon = {epsilon})")]
    InvalidTraceParameters { nu: i64, kappa: i64, epsilon: f64 },
    #[error("horizon n_max = {horizon} leaves a tail bound {tail_bound:e} above {tolerance:e}")]
    HorizonTooSmall {
        horizon: i64,
        tail_bound: f64,
        tolerance: f64,
    },
    #[error("amplitude A({n},{q}) disagrees with its Kravtchouk form")]
    AmplitudeMismatch { n: u32, q: u32 },
    #[error("the Fourier route needs 0 < eta < pi/2, got {0}")]
    EtaOutsideFourierRange(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Vertex mixing angle and the two directed-bond phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingParams {
    eta: f64,
    phi1: f64,
    phi2: f64,
}

/// Reduces an angle to `[-pi, pi)`.
pub fn reduce_phase(phi: f64) -> f64 {
    let r = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if r >= PI {
        -PI
    } else {
        r
    }
}

impl RingParams {
    pub fn new(eta: f64, phi1: f64, phi2: f64) -> Result<Self, RingError> {
        if !(0.0..=FRAC_PI_2).contains(&eta) {
            return Err(RingError::EtaOutOfRange(eta));
        }
        for phi in [phi1, phi2] {
            if !phi.is_finite() {
                return Err(RingError::NonFinitePhase(phi));
            }
        }
        Ok(Self {
            eta,
            phi1: reduce_phase(phi1),
            phi2: reduce_phase(phi2),
        })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn phi1(&self) -> f64 {
        self.phi1
    }

    pub fn phi2(&self) -> f64 {
        self.phi2
    }
}

/// `sigma(eta)`, the vertex-scattering matrix.
pub fn vertex_matrix(eta: f64) -> Matrix2<Complex64> {
    let c = Complex64::new(eta.cos(), 0.0);
    let s = Complex64::new(0.0, eta.sin());
    Matrix2::new(c, s, s, c)
}

pub fn ring_s_matrix(p: &RingParams) -> Matrix2<Complex64> {
    let phases = Matrix2::from_diagonal(&nalgebra::Vector2::new(
        Complex64::from_polar(1.0, p.phi1),
        Complex64::from_polar(1.0, p.phi2),
    ));
    phases * vertex_matrix(p.eta)
}

/// `lambda = 2 arccos[cos eta cos((phi1 - phi2)/2)]`.
pub fn eigenphase_gap(p: &RingParams) -> f64 {
    let c = (p.eta.cos() * ((p.phi1 - p.phi2) / 2.0).cos()).clamp(-1.0, 1.0);
    2.0 * c.acos()
}

/// The same gap read off the numerically computed eigenvalues of
/// [`ring_s_matrix`], measured relative to `e^{i(phi1+phi2)/2}`.
pub fn eigenphase_gap_numeric(p: &RingParams) -> f64 {
    let s = ring_s_matrix(p);
    let trace = s[(0, 0)] + s[(1, 1)];
    let det = s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)];
    let disc = (trace * trace - 4.0 * det).sqrt();
    let z = (trace + disc) / 2.0;
    let w = z * Complex64::from_polar(1.0, -(p.phi1 + p.phi2) / 2.0);
    2.0 * w.im.abs().atan2(w.re)
}

/// Smooth part of the two-point correlator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum R2Value {
    Finite(f64),
    /// Exactly on the inverse square-root edge `cos^2(pi r/2) = cos^2 eta`.
    Singular,
}

/// `-1/pi + sin|pi r/2| / (2 pi) * Theta(D) / sqrt(D)`,
/// `D = cos^2 eta - cos^2(pi r/2)`. The periodic delta at `r = 0, 2` is not
/// included.
pub fn r2(r: f64, eta: f64) -> Result<R2Value, RingError> {
    if !(0.0..=2.0).contains(&r) {
        return Err(RingError::ROutOfRange(r));
    }
    if !(0.0..=FRAC_PI_2).contains(&eta) {
        return Err(RingError::EtaOutOfRange(eta));
    }
    let half = PI * r / 2.0;
    // cos^2 a - cos^2 b = sin(b - a) sin(b + a)
    let d = (half - eta).sin() * (half + eta).sin();
    let base = -1.0 / PI;
    if d < 0.0 || (d == 0.0 && half.cos().abs() > eta.cos()) {
        return Ok(R2Value::Finite(base));
    }
    if d == 0.0 {
        return Ok(R2Value::Singular);
    }
    Ok(R2Value::Finite(base + half.sin().abs() / (2.0 * PI) / d.sqrt()))
}

/// Correlator after averaging over `d mu(eta) = 2 |cos eta sin eta| d eta`,
/// smooth part.
pub fn r2_average(r: f64) -> f64 {
    let s = (PI * r / 2.0).sin();
    -1.0 / PI + s * s / PI
}

/// Closed-form `K(n; pi/4) = 1 + (-1)^{m+n} C(2m,m) / 2^{2m+1} - (3/2) delta_{n,0}`, `m = floor(n/2)`.
pub fn k_exact(n: u32) -> BigRational {
    let n = n as i64;
    let m = n / 2;
    let sign = if is_even(m + n) { 1 } else { -1 };
    let mut value = BigRational::one()
        + BigRational::new(binomial(2 * m, m) * sign, BigInt::one() << (2 * m + 1) as usize);
    if n == 0 {
        value -= BigRational::new(3.into(), 2.into());
    }
    value
}

/// The large-`n` curve `1 + (-1)^{m+n} / (2 sqrt(pi n))` plotted against
/// [`k_exact`]. Its oscillating term is `1/sqrt(2)` times the true asymptote
/// of `k_exact`, whose correction behaves as `1 / (2 sqrt(pi m))`.
pub fn k_approx(n: u32) -> f64 {
    let m = n / 2;
    let sign = if (m + n).is_multiple_of(2) { 1.0 } else { -1.0 };
    1.0 + sign / (2.0 * (PI * n as f64).sqrt())
}

fn pow2_rat(exponent: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << exponent as usize)
}

/// `K(n; pi/4) = 2^{-n} + 2^{-n-1} sum_q [(n/q) N(n-q,q)]^2`, the
/// periodic-orbit family sum.
pub fn k_po_quarter(n: u32) -> BigRational {
    let nn = n as i64;
    let sum: BigRational = (1..nn)
        .map(|q| {
            let v = BigRational::new(nn * nq(nn - q, q).expect("positive"), q.into());
            &v * &v
        })
        .sum();
    pow2_rat(n).recip() + sum / pow2_rat(n + 1)
}

/// Second family-sum form, `[N(q,n-q) + (-1)^n N(n-q,q)]^2` in the summand.
pub fn k_po_quarter_symmetric(n: u32) -> BigRational {
    let nn = n as i64;
    let sign = if is_even(nn) { 1 } else { -1 };
    let sum: BigInt = (1..nn)
        .map(|q| {
            let v = nq(q, nn - q).expect("positive") + nq(nn - q, q).expect("positive") * sign;
            &v * &v
        })
        .sum();
    pow2_rat(n).recip() + BigRational::from_integer(sum) / pow2_rat(n + 1)
}

/// Kravtchouk form `2^{-n} + 2^{-n-1} sum_q C(n-1,n-q) [(n/q) P_{n-1,n-q}(q)]^2`.
pub fn k_po_quarter_kravtchouk(n: u32) -> BigRational {
    let nn = n as i64;
    let sum: BigRational = (1..nn)
        .map(|q| {
            let spec = KravtchoukSpec::symmetric(nn - 1, nn - q, q).expect("valid spec");
            let p2 = combinatorics::kravtchouk_square(&spec).expect("valid spec").square;
            let ratio = BigRational::new(nn.into(), q.into());
            BigRational::from_integer(binomial(nn - 1, nn - q)) * &ratio * &ratio * p2
        })
        .sum();
    pow2_rat(n).recip() + sum / pow2_rat(n + 1)
}

/// Family sum at general `eta`:
/// `cos^{2n} eta + (n^2/2) sum_q [sum_nu ((-1)^nu / nu) C(q-1,nu-1) C(n-q-1,nu-1) sin^{2nu} eta cos^{n-2nu} eta]^2`.
pub fn k_po_eta(n: u32, eta: f64) -> f64 {
    let nn = n as i64;
    let (c, s) = (eta.cos(), eta.sin());
    let mut total = c.powi(2 * n as i32);
    for q in 1..nn {
        let mut inner = 0.0;
        for nu in 1..=q.min(nn - q) {
            let count = to_f64(&BigRational::from_integer(
                binomial(q - 1, nu - 1) * binomial(nn - q - 1, nu - 1),
            ));
            let sign = if is_even(nu) { 1.0 } else { -1.0 };
            inner += sign / nu as f64 * count * s.powi(2 * nu as i32) * c.powi((nn - 2 * nu) as i32);
        }
        total += (nn * nn) as f64 / 2.0 * inner * inner;
    }
    total
}

/// Circular unitary ensemble form factor for `2x2` matrices.
pub fn k_cue(n: u32) -> BigRational {
    match n {
        0 => BigRational::from_integer(2.into()),
        1 => BigRational::new(1.into(), 2.into()),
        _ => BigRational::one(),
    }
}

/// The `eta`-averaged family sum, with the Beta integral
/// `int sin^{2k+1} cos^{2(n-k)+1} = C(n,k)^{-1} / (2(n+1))` done exactly.
///
/// Averaging `(n^2/2) [..]^2` against `d mu = 2 cos sin d eta` leaves the
/// prefactor `n^2 / (2(n+1))` on the double sum.
pub fn k_avg_po(n: u32) -> BigRational {
    let nn = n as i64;
    let pascal = Pascal::new(nn.max(1) as usize);
    let mut double_sum = BigRational::zero();
    for q in 1..nn {
        let top = q.min(nn - q);
        for nu in 1..=top {
            for nu2 in 1..=top {
                let product = pascal.get(q - 1, nu - 1)
                    * pascal.get(nn - q - 1, nu - 1)
                    * pascal.get(q - 1, nu2 - 1)
                    * pascal.get(nn - q - 1, nu2 - 1);
                if product.is_zero() {
                    continue;
                }
                let sign = if is_even(nu + nu2) { 1 } else { -1 };
                double_sum += BigRational::new(
                    product * sign,
                    BigInt::from(nu * nu2) * pascal.get(nn, nu + nu2),
                );
            }
        }
    }
    BigRational::new(1.into(), (nn + 1).into())
        + double_sum * BigRational::new((nn * nn).into(), (2 * (nn + 1)).into())
}

/// Coherent orbit amplitude `A(n,q) = numerator * 2^{-n/2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amplitude {
    pub numerator: BigInt,
    pub n: u32,
}

impl Amplitude {
    /// `A(n,q)^2 = numerator^2 / 2^n`.
    pub fn square(&self) -> BigRational {
        BigRational::new(&self.numerator * &self.numerator, BigInt::one() << self.n as usize)
    }

    pub fn sign(&self) -> Sign {
        self.numerator.sign()
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&BigRational::from_integer(self.numerator.clone())) * 2f64.powf(-(self.n as f64) / 2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmplitudeTable {
    pub n: u32,
    /// `A(n, 0..=n)`.
    pub values: Vec<Amplitude>,
}

impl AmplitudeTable {
    pub fn get(&self, q: u32) -> Option<&Amplitude> {
        self.values.get(q as usize)
    }

    /// `sum_q A(n,q)^2`.
    pub fn sum_of_squares(&self) -> BigRational {
        self.values.iter().map(Amplitude::square).sum()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(Amplitude::to_f64).collect()
    }
}

/// `A(n,q)` for `0 <= q <= n`, cross-checked against
/// `(-1)^{n+q} (n/q) C(n-1,n-q)^{1/2} P_{n-1,n-q}(q)`.
pub fn amplitude_table(n: u32) -> Result<AmplitudeTable, RingError> {
    let nn = n as i64;
    let mut values = Vec::with_capacity(n as usize + 1);
    for q in 0..=nn {
        if q == 0 || q == nn {
            values.push(Amplitude {
                numerator: BigInt::one(),
                n,
            });
            continue;
        }
        let raw = BigRational::new(nn * nq(nn - q, q).expect("positive"), q.into());
        let signed = if is_even(q) { raw } else { -raw };
        if !signed.is_integer() {
            return Err(RingError::AmplitudeMismatch { n, q: q as u32 });
        }
        let amp = Amplitude {
            numerator: signed.to_integer(),
            n,
        };
        let spec = KravtchoukSpec::symmetric(nn - 1, nn - q, q).expect("valid spec");
        let kr = combinatorics::kravtchouk_square(&spec).expect("valid spec");
        let ratio = BigRational::new(nn.into(), q.into());
        let alt_square = BigRational::from_integer(binomial(nn - 1, nn - q)) * &ratio * &ratio * kr.square;
        let alt_sign = if is_even(nn + q) { kr.sign } else { -kr.sign };
        if alt_square != BigRational::from_integer(&amp.numerator * &amp.numerator) || alt_sign != amp.sign() {
            return Err(RingError::AmplitudeMismatch { n, q: q as u32 });
        }
        values.push(amp);
    }
    Ok(AmplitudeTable { n, values })
}

/// `s_n = sum_q A(n,q) e^{i(q phi1 + (n-q) phi2)}`.
pub fn s_n_from_families(n: u32, phi1: f64, phi2: f64) -> Result<Complex64, RingError> {
    let table = amplitude_table(n)?;
    Ok(table
        .to_f64()
        .into_iter()
        .enumerate()
        .map(|(q, a)| Complex64::from_polar(a, q as f64 * phi1 + (n as f64 - q as f64) * phi2))
        .sum())
}

/// `tr S^n` by direct matrix powers.
pub fn ring_trace(n: u32, p: &RingParams) -> Complex64 {
    ring_s_matrix(p).pow(n).trace()
}

/// Floating-point amplitudes `A(n,q)` for `0 <= n <= max_n`, propagated with
/// the `2x2` transfer recurrence. Each step only combines entries with
/// weights `cos eta`, `sin eta`, so no cancellation builds up; this is how
/// rows with thousands of entries are produced for the trace-identity sums.
pub fn amplitude_rows(max_n: usize, eta: f64) -> Vec<Vec<f64>> {
    let sigma = vertex_matrix(eta);
    let mut rows = Vec::with_capacity(max_n + 1);
    rows.push(vec![2.0]);
    // coefficient matrices of e^{i(q phi1 + (n-q) phi2)} in S^n
    let mut current: Vec<Matrix2<Complex64>> = vec![Matrix2::identity()];
    let top = Matrix2::new(sigma[(0, 0)], sigma[(0, 1)], Complex64::zero(), Complex64::zero());
    let bottom = Matrix2::new(Complex64::zero(), Complex64::zero(), sigma[(1, 0)], sigma[(1, 1)]);
    for n in 1..=max_n {
        let mut next = vec![Matrix2::<Complex64>::zeros(); n + 1];
        for (q, m) in current.iter().enumerate() {
            next[q + 1] += top * m;
            next[q] += bottom * m;
        }
        rows.push(next.iter().map(|m| m.trace().re).collect());
        current = next;
    }
    // A(0,0) = 1 by convention; the trace of S^0 would give 2.
    rows[0][0] = 1.0;
    rows
}

/// Default truncation horizon `ceil(40 / epsilon)`.
pub fn default_horizon(epsilon: f64) -> i64 {
    (40.0 / epsilon).ceil() as i64
}

/// Bound on `|sum_q A(n+nu,q+kappa) A(n,q)|` at `eta = pi/4`, from
/// Cauchy–Schwarz and `sum_q A(n,q)^2 = 2 K(n) <= 2.1`.
pub const AMPLITUDE_PAIR_BOUND: f64 = 2.1;

/// Precomputed `A(n,q)` rows for repeated trace-identity sums.
#[derive(Debug, Clone)]
pub struct TraceLadder {
    rows: Vec<Vec<f64>>,
}

impl TraceLadder {
    pub fn new(max_n: usize) -> Self {
        Self {
            rows: amplitude_rows(max_n, PI / 4.0),
        }
    }

    pub fn amplitude(&self, n: i64, q: i64) -> f64 {
        if n < 0 || q < 0 || q > n {
            return 0.0;
        }
        self.rows[n as usize][q as usize]
    }

    /// `epsilon sum_{n=n0}^{n_max} e^{-n epsilon} sum_q A(n+nu,q+kappa) A(n,q)`.
    pub fn sum(&self, nu: i64, kappa: i64, epsilon: f64, n0: i64, horizon: i64) -> Result<f64, RingError> {
        if nu < 0 || kappa < 0 || kappa > nu || !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(RingError::InvalidTraceParameters { nu, kappa, epsilon });
        }
        const TAIL_TOLERANCE: f64 = 1e-9;
        let tail_bound =
            AMPLITUDE_PAIR_BOUND * epsilon * (-(horizon as f64 + 1.0) * epsilon).exp() / (1.0 - (-epsilon).exp());
        if tail_bound > TAIL_TOLERANCE {
            return Err(RingError::HorizonTooSmall {
                horizon,
                tail_bound,
                tolerance: TAIL_TOLERANCE,
            });
        }
        assert!(
            ((horizon + nu) as usize) < self.rows.len(),
            "ladder built for n <= {}, needs {}",
            self.rows.len() - 1,
            horizon + nu
        );
        let mut total = 0.0;
        for n in n0.max(0)..=horizon {
            let upper = &self.rows[(n + nu) as usize];
            let lower = &self.rows[n as usize];
            let pair: f64 = lower
                .iter()
                .enumerate()
                .filter_map(|(q, a)| upper.get(q + kappa as usize).map(|b| a * b))
                .sum();
            total += (-(n as f64) * epsilon).exp() * pair;
        }
        Ok(epsilon * total)
    }
}

/// Abel-regularised trace sum with the default horizon `ceil(40/epsilon)`.
pub fn trace_identity_sum(nu: i64, kappa: i64, epsilon: f64, n0: i64) -> Result<f64, RingError> {
    if nu < 0 || kappa < 0 || kappa > nu || !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(RingError::InvalidTraceParameters { nu, kappa, epsilon });
    }
    trace_identity_sum_with_horizon(nu, kappa, epsilon, n0, default_horizon(epsilon))
}

pub fn trace_identity_sum_with_horizon(
    nu: i64,
    kappa: i64,
    epsilon: f64,
    n0: i64,
    horizon: i64,
) -> Result<f64, RingError> {
    if nu < 0 || kappa < 0 || kappa > nu || !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(RingError::InvalidTraceParameters { nu, kappa, epsilon });
    }
    let ladder = TraceLadder::new((horizon.max(0) + nu) as usize);
    ladder.sum(nu, kappa, epsilon, n0, horizon)
}

/// Linear extrapolation to `epsilon = 0` through two ladder points.
pub fn extrapolate_to_zero(eps_a: f64, value_a: f64, eps_b: f64, value_b: f64) -> f64 {
    (eps_a * value_b - eps_b * value_a) / (eps_a - eps_b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassicalMethod {
    /// `1 + cos^n(2 eta)` from the spectrum `{1, cos 2eta}` of `U`.
    Exact,
    /// Family-grouped sum over binary code words.
    PeriodicOrbit,
}

/// `u_n = tr U^n` for the ring's classical operator.
pub fn classical_u(n: u32, eta: f64, method: ClassicalMethod) -> f64 {
    match method {
        ClassicalMethod::Exact => 1.0 + (2.0 * eta).cos().powi(n as i32),
        ClassicalMethod::PeriodicOrbit => {
            let nn = n as i64;
            let (c2, s2) = (eta.cos().powi(2), eta.sin().powi(2));
            let mut total = 2.0 * c2.powi(n as i32);
            for q in 1..nn {
                for nu in 1..=q.min(nn - q) {
                    let count = to_f64(&BigRational::new(
                        binomial(q - 1, nu - 1) * binomial(nn - q - 1, nu - 1) * nn,
                        nu.into(),
                    ));
                    total += count * s2.powi(2 * nu as i32) * c2.powi((nn - 2 * nu) as i32);
                }
            }
            total
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierCheck {
    pub value: f64,
    pub error_estimate: f64,
}

/// Quadrature target for [`fourier_consistency`].
pub const FOURIER_TOLERANCE: f64 = 1e-8;

/// `K(n; eta) = pi int_0^2 cos(n pi r) R2(r, eta) dr`, with the periodic delta
/// and the constant `-1/pi` transformed analytically and the smooth part
/// integrated numerically.
///
/// The smooth part lives on `r0 < r < 2 - r0`, `r0 = 2 eta / pi`, is symmetric
/// about `r = 1` and has inverse square-root edges; `r = r0 + u^2` removes
/// them.
pub fn fourier_consistency(n: u32, eta: f64) -> Result<FourierCheck, RingError> {
    if !(eta > 0.0 && eta < FRAC_PI_2) {
        return Err(RingError::EtaOutsideFourierRange(eta));
    }
    let r0 = 2.0 * eta / PI;
    let nf = n as f64;
    let integrand = |u: f64| {
        let r = r0 + u * u;
        let half = PI * r / 2.0;
        let tail = (half + eta).sin();
        // 2u / sqrt(sin(pi u^2 / 2) * tail), continuous at u = 0
        let jacobian = if u == 0.0 {
            2.0 / (FRAC_PI_2 * tail).sqrt()
        } else {
            2.0 * u / ((FRAC_PI_2 * u * u).sin() * tail).sqrt()
        };
        // 2 pi (symmetry) * cos(n pi r) * sin(pi r/2) / (2 pi)
        (nf * PI * r).cos() * half.sin() * jacobian
    };
    let smooth = quadrature::integrate(integrand, 0.0, (1.0 - r0).sqrt(), FOURIER_TOLERANCE)?;
    let analytic = if n == 0 { -1.0 } else { 1.0 };
    Ok(FourierCheck {
        value: analytic + smooth.value,
        error_estimate: smooth.error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Po,
    Approx,
    Cue,
    Mc,
    Quadrature,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Po => "po",
            Method::Approx => "approx",
            Method::Cue => "cue",
            Method::Mc => "mc",
            Method::Quadrature => "quadrature",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FormValue {
    Exact(BigRational),
    Real(f64),
}

impl FormValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            FormValue::Exact(r) => to_f64(r),
            FormValue::Real(x) => *x,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormFactorRow {
    pub n: u32,
    pub value: FormValue,
    pub method: Method,
    /// Present for Monte Carlo rows only.
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FormFactorTable {
    pub rows: Vec<FormFactorRow>,
}

impl FormFactorTable {
    /// Exact, family-sum, asymptotic and CUE rows for every `n` in `ns`.
    pub fn ring_quarter(ns: impl IntoIterator<Item = u32>) -> Self {
        let mut rows = Vec::new();
        for n in ns {
            rows.push(FormFactorRow {
                n,
                value: FormValue::Exact(k_exact(n)),
                method: Method::Exact,
                stderr: None,
            });
            rows.push(FormFactorRow {
                n,
                value: FormValue::Exact(k_po_quarter(n)),
                method: Method::Po,
                stderr: None,
            });
            rows.push(FormFactorRow {
                n,
                value: FormValue::Real(k_approx(n)),
                method: Method::Approx,
                stderr: None,
            });
            rows.push(FormFactorRow {
                n,
                value: FormValue::Exact(k_cue(n)),
                method: Method::Cue,
                stderr: None,
            });
        }
        Self { rows }
    }

    pub fn push(&mut self, row: FormFactorRow) {
        self.rows.push(row);
    }

    pub fn get(&self, n: u32, method: Method) -> Option<&FormFactorRow> {
        self.rows.iter().find(|r| r.n == n && r.method == method)
    }

    /// Exact and family-sum rows agree wherever both exist.
    pub fn exact_matches_po(&self) -> bool {
        self.rows.iter().filter(|r| r.method == Method::Exact).all(|e| {
            match (self.get(e.n, Method::Po), &e.value) {
                (Some(po), FormValue::Exact(a)) => matches!(&po.value, FormValue::Exact(b) if a == b),
                (None, _) => true,
                _ => false,
            }
        })
    }
}
