//! Batch verification of the exact identities.
//!
//! Each check walks its full parameter range and stops at the first
//! counterexample, which is kept in the report.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::combinatorics::{self, Parity, Pascal};
use crate::ring::{self, TraceLadder};
use crate::series;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    pub max_n: u32,
    pub order: usize,
    pub m_max: u32,
    /// Test hook: replaces the right-hand side of the `S(n,q) = 1` check so
    /// the failure path can be exercised.
    pub corrupt_rhs: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            max_n: 40,
            order: 30,
            m_max: 20,
            corrupt_rhs: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub name: &'static str,
    pub cases: u64,
    pub counterexample: Option<String>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.counterexample {
            None => write!(f, "PASS {} ({} cases)", self.name, self.cases),
            Some(c) => write!(f, "FAIL {} after {} cases: {}", self.name, self.cases, c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub identities: Vec<IdentityReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.identities.iter().all(IdentityReport::passed)
    }
}

struct Check {
    name: &'static str,
    cases: u64,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Self { name, cases: 0 }
    }

    fn pass(&mut self) {
        self.cases += 1;
    }

    fn fail(self, counterexample: String) -> IdentityReport {
        IdentityReport {
            name: self.name,
            cases: self.cases,
            counterexample: Some(counterexample),
        }
    }

    fn done(self) -> IdentityReport {
        IdentityReport {
            name: self.name,
            cases: self.cases,
            counterexample: None,
        }
    }
}

pub fn run(config: &SuiteConfig) -> SuiteReport {
    let n = config.max_n as i64;
    let pascal = Pascal::new((n + 2) as usize);
    SuiteReport {
        identities: vec![
            s_sum(n, config.corrupt_rhs),
            recursion(&pascal, n),
            nq_kravtchouk(n),
            ci1(n),
            ci2(config.m_max as i64),
            series_identities(config.order),
            ring_form_factor(config.max_n),
            trace_identity(),
        ],
    }
}

pub fn s_sum(max_n: i64, corrupt_rhs: bool) -> IdentityReport {
    let mut check = Check::new("S(n,q) = 1");
    let rhs = if corrupt_rhs {
        BigRational::from_integer(2.into())
    } else {
        BigRational::one()
    };
    for n in 2..=max_n {
        for q in 1..n {
            let value = combinatorics::s_sum(n, q).expect("1 <= q < n");
            if value != rhs {
                return check.fail(format!("(n={n}, q={q}): S = {value}, expected {rhs}"));
            }
            check.pass();
        }
    }
    check.done()
}

fn recursion(pascal: &Pascal, max_n: i64) -> IdentityReport {
    let mut check = Check::new("F-term recursion");
    for n in 2..=max_n {
        // F vanishes once nu exceeds (n+1)/2 for every term of the residual
        let nu_max = (n + 1) / 2 + 1;
        for q in 1..=n - 2 {
            for nu in 1..=nu_max {
                for nu2 in 1..=nu_max {
                    let r = combinatorics::recursion_residual_with(pascal, n, q, nu, nu2);
                    if !r.is_zero() {
                        return check.fail(format!("(n={n}, q={q}, nu={nu}, nu'={nu2}): residual {r}"));
                    }
                    check.pass();
                }
            }
        }
    }
    check.done()
}

fn nq_kravtchouk(max_n: i64) -> IdentityReport {
    let mut check = Check::new("N(s,t) as Kravtchouk value");
    for s in 1..max_n {
        for t in 1..=max_n - s {
            if !combinatorics::check_nq_kravtchouk(s, t) {
                return check.fail(format!("(s={s}, t={t})"));
            }
            check.pass();
        }
    }
    check.done()
}

fn ci1(max_n: i64) -> IdentityReport {
    let mut check = Check::new("binomial convolution");
    for n in 2..=max_n {
        for nu in 1..=n / 2 + 1 {
            if !combinatorics::ci1_check(n, nu) {
                let c = combinatorics::ci1_evaluate(n, nu);
                return check.fail(format!(
                    "(n={n}, nu={nu}): sum {} closed {} scaled {}",
                    c.sum, c.closed, c.scaled
                ));
            }
            check.pass();
        }
    }
    check.done()
}

fn ci2(m_max: i64) -> IdentityReport {
    let mut check = Check::new("squared N(n-q,q) sums");
    for m in 1..=m_max {
        for parity in [Parity::Even, Parity::Odd] {
            let c = combinatorics::ci2_check(m, parity);
            if !c.equal {
                return check.fail(format!("(m={m}, {parity:?}): lhs {} rhs {}", c.lhs, c.rhs));
            }
            check.pass();
        }
    }
    check.done()
}

fn series_identities(order: usize) -> IdentityReport {
    let mut check = Check::new("generating functions");
    let pairs = [
        ("g1", series::g1_po(order), series::g1_closed(order)),
        ("g2", series::g2_po(order), series::g2_closed(order)),
        ("G", series::big_g_po(order), series::big_g_spectral(order)),
    ];
    for (name, po, closed) in pairs {
        for k in 0..=order {
            if po.coeff(k) != closed.coeff(k) {
                return check.fail(format!(
                    "{name} coefficient x^{k}: {} vs {}",
                    po.coeff(k),
                    closed.coeff(k)
                ));
            }
            check.pass();
        }
    }
    let po = series::g_bivariate_po(order);
    let closed = series::g_bivariate_closed(order);
    for total in 0..=order {
        for s in 0..=total {
            let t = total - s;
            if po.coeff(s, t) != closed.coeff(s, t) {
                return check.fail(format!(
                    "g coefficient x^{s} y^{t}: {} vs {}",
                    po.coeff(s, t),
                    closed.coeff(s, t)
                ));
            }
            check.pass();
        }
    }
    check.done()
}

fn ring_form_factor(max_n: u32) -> IdentityReport {
    let mut check = Check::new("ring form factor equals family sum");
    let two = BigRational::from_integer(2.into());
    for n in 1..=max_n {
        let exact = ring::k_exact(n);
        let po = ring::k_po_quarter(n);
        if exact != po {
            return check.fail(format!("n={n}: exact {exact}, periodic orbits {po}"));
        }
        let squares = match ring::amplitude_table(n) {
            Ok(table) => table.sum_of_squares(),
            Err(e) => return check.fail(format!("n={n}: {e}")),
        };
        if squares != &two * &exact {
            return check.fail(format!("n={n}: sum of A^2 = {squares}, 2K = {}", &two * &exact));
        }
        check.pass();
    }
    check.done()
}

/// Epsilon ladder for the Abel-regularised trace sums.
pub const EPSILON_LADDER: [f64; 4] = [0.2, 0.1, 0.05, 0.02];
/// Allowed error at the smallest ladder epsilon.
pub const TRACE_TOLERANCE: f64 = 0.05;

/// Ladder errors `|sum - A(nu,kappa)|` along [`EPSILON_LADDER`].
pub fn trace_ladder_errors(ladder: &TraceLadder, nu: i64, kappa: i64, n0: i64) -> Vec<f64> {
    let target = ladder.amplitude(nu, kappa);
    EPSILON_LADDER
        .iter()
        .map(|&eps| {
            let sum = ladder
                .sum(nu, kappa, eps, n0, ring::default_horizon(eps))
                .expect("default horizon meets the tail bound");
            (sum - target).abs()
        })
        .collect()
}

/// Ladder large enough for every [`EPSILON_LADDER`] horizon with `nu <= max_nu`.
pub fn trace_ladder(max_nu: i64) -> TraceLadder {
    TraceLadder::new((ring::default_horizon(EPSILON_LADDER[3]) + max_nu) as usize)
}

fn trace_identity() -> IdentityReport {
    let mut check = Check::new("trace identity (1 <= nu <= 4)");
    let ladder = trace_ladder(4);
    for nu in 1..=4 {
        for kappa in 0..=nu {
            let errors = trace_ladder_errors(&ladder, nu, kappa, 0);
            let monotone = errors.windows(2).all(|w| w[1] < w[0]);
            let last = errors[errors.len() - 1];
            if !monotone || last >= TRACE_TOLERANCE {
                return check.fail(format!("(nu={nu}, kappa={kappa}): errors {errors:?}"));
            }
            check.pass();
        }
    }
    check.done()
}
