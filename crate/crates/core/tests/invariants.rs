use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

use qgraph_core::combinatorics;
use qgraph_core::graph::{self, Beta, Graph, ScatteringSystem};
use qgraph_core::ring::{self, RingParams};
use qgraph_core::series::Series1;

fn phases(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-PI..PI, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn s_sum_is_one(n in 2i64..90, q_frac in 0.0f64..1.0) {
        let q = 1 + ((n - 1) as f64 * q_frac) as i64;
        let q = q.min(n - 1);
        prop_assert_eq!(combinatorics::s_sum(n, q).unwrap(), BigRational::one());
    }

    #[test]
    fn nq_matches_kravtchouk(s in 1i64..40, t in 1i64..40) {
        prop_assert!(combinatorics::check_nq_kravtchouk(s, t));
    }

    #[test]
    fn binomial_convolution(n in 2i64..80, nu in 1i64..40) {
        prop_assert!(combinatorics::ci1_check(n, nu));
    }

    #[test]
    fn reciprocal_inverts(coeffs in prop::collection::vec(-20i64..20, 1..12)) {
        let mut c = coeffs.clone();
        c[0] = 1;
        let s = Series1::from_ints(&c, 15);
        let product = &s * &s.reciprocal().unwrap();
        prop_assert_eq!(product, Series1::one(15));
    }

    #[test]
    fn inv_sqrt_squares_to_reciprocal(coeffs in prop::collection::vec(-9i64..9, 1..8)) {
        let mut c = coeffs.clone();
        c[0] = 1;
        let s = Series1::from_ints(&c, 12);
        let r = s.inv_sqrt().unwrap();
        prop_assert_eq!(&(&r * &r) * &s, Series1::one(12));
    }

    #[test]
    fn ring_gap_closed_form_matches_eigenvalues(eta in 0.0f64..PI / 2.0, p1 in -PI..PI, p2 in -PI..PI) {
        let p = RingParams::new(eta, p1, p2).unwrap();
        prop_assert!((ring::eigenphase_gap(&p) - ring::eigenphase_gap_numeric(&p)).abs() < 1e-9);
    }

    #[test]
    fn ring_trace_equals_family_expansion(n in 1u32..30, p1 in -PI..PI, p2 in -PI..PI) {
        let direct = ring::ring_trace(n, &RingParams::new(PI / 4.0, p1, p2).unwrap());
        let families = ring::s_n_from_families(n, p1, p2).unwrap();
        prop_assert!((direct - families).norm() < 1e-9);
    }

    #[test]
    fn neumann_s_is_unitary(v in 2usize..6, k in 0.0f64..10.0) {
        let g = Graph::complete(v).unwrap();
        let s = graph::assemble_s(&g, &graph::phase_from_geometry(&g, k), &graph::neumann_vertex_matrices(&g)).unwrap();
        prop_assert!(s.unitarity_defect() < 1e-12);
        let u = graph::classical_operator(&s);
        for i in 0..u.nrows() {
            prop_assert!((u.row(i).sum() - 1.0).abs() < 1e-12);
            prop_assert!((u.column(i).sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_bounded_by_dimension(ph in phases(12), n in 1u32..25) {
        let system = ScatteringSystem::neumann(&Graph::complete(4).unwrap());
        let s = system.s_matrix(&ph).unwrap();
        prop_assert!(graph::quantum_trace(&s, n).norm() <= 12.0 + 1e-9);
    }

    #[test]
    fn family_amplitudes_rebuild_trace(ph in phases(6), n in 1u32..8) {
        // s_n = sum over families of A_L e^{i sum_d n_d phi_d}
        let system = ScatteringSystem::neumann(&Graph::complete(3).unwrap());
        let table = graph::enumerate_families(&system, Beta::Unitary, n).unwrap();
        let rebuilt: Complex64 = table
            .families
            .iter()
            .map(|(key, e)| {
                let phase: f64 = key.counts.iter().zip(&ph).map(|(&c, &p)| c as f64 * p).sum();
                e.amplitude * Complex64::from_polar(1.0, phase)
            })
            .sum();
        let direct = graph::quantum_trace(&system.s_matrix(&ph).unwrap(), n);
        prop_assert!((rebuilt - direct).norm() < 1e-10);
        prop_assert!(table.families.keys().all(|k| graph::family_feasibility(&system, k)));
    }

    #[test]
    fn famsum_equals_quadrature_on_any_ring(eta in 0.05f64..1.5, n in 1u32..10) {
        let system = ScatteringSystem::ring(eta).unwrap();
        let fam = graph::famsum_form_factor(&graph::enumerate_families(&system, Beta::Unitary, n).unwrap());
        let quad = graph::quadrature_form_factor(&system, Beta::Unitary, n).unwrap();
        prop_assert!((fam - quad).abs() < 1e-10);
        prop_assert!((quad - ring::k_po_eta(n, eta)).abs() < 1e-10);
    }

    #[test]
    fn orthogonal_famsum_equals_quadrature(n in 1u32..8) {
        let path = ScatteringSystem::neumann(&Graph::path(3).unwrap());
        let fam = graph::famsum_form_factor(&graph::enumerate_families(&path, Beta::Orthogonal, n).unwrap());
        let quad = graph::quadrature_form_factor(&path, Beta::Orthogonal, n).unwrap();
        prop_assert!((fam - quad).abs() < 1e-10);
    }

    #[test]
    fn rmt_reference_is_bounded(tau in 0.0f64..20.0) {
        for beta in [Beta::Orthogonal, Beta::Unitary] {
            let k = graph::rmt_reference(tau, beta);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&k));
        }
    }
}

#[test]
fn orbit_count_equals_closed_walk_count() {
    let system = ScatteringSystem::neumann(&Graph::complete(4).unwrap());
    let adjacency = system.structure().map(|z| if z.norm() > 0.0 { 1.0 } else { 0.0 });
    let mut power = adjacency.clone();
    for n in 1..=6u32 {
        if n > 1 {
            power = &power * &adjacency;
        }
        let table = graph::enumerate_families(&system, Beta::Unitary, n).unwrap();
        assert_eq!(table.orbit_count() as f64, power.trace());
    }
}

#[test]
fn monte_carlo_is_reproducible_and_seed_sensitive() {
    let system = ScatteringSystem::neumann(&Graph::complete(4).unwrap());
    let a = graph::mc_form_factor_range(&system, Beta::Orthogonal, 6, 3000, 5).unwrap();
    let b = graph::mc_form_factor_range(&system, Beta::Orthogonal, 6, 3000, 5).unwrap();
    let c = graph::mc_form_factor_range(&system, Beta::Orthogonal, 6, 3000, 6).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    let single = graph::mc_form_factor(&system, Beta::Orthogonal, 6, 3000, 5).unwrap();
    assert_eq!(single, a[5]);
}

#[test]
fn monte_carlo_agrees_with_quadrature_on_single_bond() {
    let system = ScatteringSystem::neumann(&Graph::complete(2).unwrap());
    let mc = graph::mc_form_factor_range(&system, Beta::Unitary, 6, 4000, 1).unwrap();
    for n in 1..=6 {
        let exact = graph::quadrature_form_factor(&system, Beta::Unitary, n).unwrap();
        let e = mc[n as usize - 1];
        assert!((e.estimate - exact).abs() <= 4.0 * e.stderr + 1e-12, "n={n}: {e:?} vs {exact}");
    }
}
