use nalgebra::DMatrix;
use proptest::prelude::*;

use nnflock::lattice::{assemble, AgentCoupling, Boundary, CouplingField, FlockConfig};
use nnflock::simulate::{integrate, Scenario, State};
use nnflock::spectral::{char_poly, dense_eigenvalues, match_multisets, mode_phase, spectrum, tridiag_det, C64};
use nnflock::stability::{classify, necessary_condition, Verdict, DEFAULT_TOL};

fn agents(p: usize) -> impl Strategy<Value = Vec<AgentCoupling>> {
    prop::collection::vec((0.3f64..8.0, 0.1f64..4.0), p)
        .prop_map(|w| w.into_iter().map(|(x, v)| AgentCoupling::symmetric(x, v)).collect())
}

fn ring() -> impl Strategy<Value = FlockConfig> {
    (1usize..=3, 1usize..=4).prop_flat_map(|(p, q)| {
        agents(p).prop_map(move |a| FlockConfig::from_agents(a, q, Boundary::Periodic, 0.0, 0).unwrap())
    })
}

fn line() -> impl Strategy<Value = FlockConfig> {
    (3usize..=12).prop_flat_map(|n| {
        agents(n).prop_map(|a| FlockConfig::from_agents(a, 1, Boundary::OpenLine, 1.5, 0).unwrap())
    })
}

/// `det(nu I - A)` by complex LU.
fn dense_charpoly(a: &DMatrix<f64>, nu: C64) -> C64 {
    let n = a.nrows();
    let m = DMatrix::from_fn(n, n, |i, j| {
        let x = C64::new(-a[(i, j)], 0.0);
        if i == j { x + nu } else { x }
    });
    m.lu().determinant()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn laplacian_rows_sum_to_zero(config in prop_oneof![ring(), line()], flip in -0.9f64..0.9) {
        let k = config.p / 2;
        let config = config.perturbed(k, CouplingField::RhoXPlus, flip).unwrap();
        let m = assemble(&config).unwrap();
        for i in 0..config.n() {
            prop_assert!(m.l_x.row(i).sum().abs() <= 1e-12);
            prop_assert!(m.l_v.row(i).sum().abs() <= 1e-12);
        }
    }

    #[test]
    fn symmetric_ring_laplacians_are_symmetric(config in ring()) {
        let m = assemble(&config).unwrap();
        prop_assert_eq!(&m.l_x, &m.l_x.transpose());
        prop_assert_eq!(&m.l_v, &m.l_v.transpose());
    }

    #[test]
    fn tridiagonal_formula_matches_lu(cd in (1usize..=6).prop_flat_map(|n| (
        prop::collection::vec(-3.0f64..3.0, n),
        prop::collection::vec(-3.0f64..3.0, n),
    ))) {
        let (c, d) = cd;
        let n = c.len();
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j { c[i] + d[i] } else if j == i + 1 { -c[i] } else if i == j + 1 { -d[i] } else { 0.0 }
        });
        let lu = m.lu().determinant();
        let f = tridiag_det(&c, &d);
        // Cancellation-aware scale: the sum of the magnitudes of the terms.
        let scale: f64 = (0..=n)
            .map(|k| d[..k].iter().chain(&c[k..]).map(|x| x.abs()).product::<f64>())
            .sum();
        prop_assert!((f - lu).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE), "formula {f} vs LU {lu}");
    }

    #[test]
    fn mode_polynomials_multiply_to_dense_charpoly(config in ring(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let a = assemble(&config).unwrap().a;
        let product = |nu: C64| {
            (0..config.q)
                .map(|m| char_poly(&config, mode_phase(m, config.q)).unwrap().eval(nu))
                .fold(C64::new(1.0, 0.0), |acc, x| acc * x)
        };
        let nu1 = C64::new(re, im);
        let nu2 = C64::new(0.7 * im - 0.3, 1.1 * re + 0.2);
        let r1 = product(nu1) / dense_charpoly(&a, nu1);
        let r2 = product(nu2) / dense_charpoly(&a, nu2);
        prop_assert!((r1 - r2).norm() <= 1e-8 * r1.norm(), "{r1} vs {r2}");
    }

    #[test]
    fn merged_spectrum_matches_dense(config in ring()) {
        let s = spectrum(&config).unwrap();
        let dense = dense_eigenvalues(&assemble(&config).unwrap().a).unwrap();
        let radius = dense.iter().map(|z| z.norm()).fold(1.0, f64::max);
        prop_assert!(match_multisets(&s.merged, &dense).unwrap() <= 1e-6 * radius);
    }

    #[test]
    fn opposite_modes_are_conjugate(config in ring()) {
        let s = spectrum(&config).unwrap();
        let q = config.q;
        for m in 1..q {
            let conj: Vec<C64> = s.modes[q - m].roots.iter().map(|z| z.conj()).collect();
            prop_assert!(match_multisets(&s.modes[m].roots, &conj).unwrap() <= 1e-8);
        }
    }

    #[test]
    fn proportional_damping_is_stable(config in ring(), alpha in 0.1f64..20.0) {
        let config = config.with_proportional_damping(alpha);
        let r = classify(&config, DEFAULT_TOL).unwrap();
        prop_assert!(r.symmetric_guarantee_applies);
        prop_assert_eq!(r.numeric_verdict, Some(Verdict::Stable));
        prop_assert_eq!(r.zero_multiplicity, Some(2));
    }

    #[test]
    fn swapping_rho_pairs_keeps_products_equal(config in ring(), a in -0.9f64..-0.1) {
        // Agent 0 gets (a, -1-a), agent p-1 gets (-1-a, a): products agree.
        let mut c = config.perturbed(0, CouplingField::RhoXPlus, a).unwrap();
        if c.p > 1 {
            c = c.perturbed(c.p - 1, CouplingField::RhoXPlus, -1.0 - a).unwrap();
            prop_assert!(necessary_condition(&c).0);
        } else if (a + 0.5).abs() > 1e-3 {
            prop_assert!(!necessary_condition(&c).0);
        }
    }

    #[test]
    fn simulation_is_deterministic_and_translation_invariant(config in line(), shift in -5.0f64..5.0) {
        let scenario = Scenario::velocity_step(&config, 1.0, 3.0).with_stride(5);
        let a = integrate(&config, &scenario, None).unwrap();
        let b = integrate(&config, &scenario, None).unwrap();
        prop_assert_eq!(&a.positions, &b.positions);
        prop_assert_eq!(&a.leader_tail_gap, &b.leader_tail_gap);

        // A uniform offset of the followers relaxes back; an offset of
        // everyone including the leader's path is carried along exactly.
        let n = config.n();
        let shifted = State { z: vec![shift; n], v: vec![0.0; n] };
        let still = Scenario { kind: nnflock::simulate::LeaderMotion::PositionStep { dz: shift }, ..scenario.clone() };
        let c = integrate(&config, &still, Some(&shifted)).unwrap();
        for row in &c.positions {
            for z in row {
                prop_assert!((z - shift).abs() <= 1e-12 * shift.abs().max(1.0));
            }
        }
    }

    #[test]
    fn peaks_are_time_ordered(config in line()) {
        let t = 40.0;
        let sim = integrate(&config, &Scenario::velocity_step(&config, 1.0, t), None).unwrap();
        prop_assert!(sim.peaks.windows(2).all(|w| w[0].t < w[1].t));
        prop_assert_eq!(sim.t1_measured, sim.peaks.first().map(|p| p.t));
    }
}
