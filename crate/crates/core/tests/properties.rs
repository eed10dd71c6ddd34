use micromaser::circuit::{
    potential, BoundarySector, CircuitParams, HamiltonianOperator, PhaseGrid, PotentialModel, SymmetricOperator,
};
use micromaser::device::{coupling_rate, photon_lifetime, vacuum_flux_ratio, CavityParams};
use micromaser::lindblad::{dissipator, gain_map, DensityMatrix};
use micromaser::maser::{steady_state_atomic, steady_state_sqc, thermal_distribution, MaserConfig};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn params(f: f64, f_s: f64, gamma: f64) -> CircuitParams {
    CircuitParams {
        gamma,
        ..CircuitParams::reference(f, f_s)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #[test]
    fn potential_symmetries(p in -PI..PI, q in -2.0 * PI..2.0 * PI, f in -1.0f64..1.0, f_s in -1.0f64..1.0, gamma in 0.1f64..1.0) {
        let u = potential(p, q, &params(f, f_s, gamma));
        // f → f + 1 is undone by φ_p → φ_p + π.
        prop_assert!((u - potential(p + PI, q, &params(f + 1.0, f_s, gamma))).abs() < 1e-12);
        prop_assert_eq!(u, potential(p, q, &params(f, -f_s, gamma)));
        prop_assert!(u >= -4.0 * gamma - 1e-12);
        if (0.0..=0.5).contains(&f_s) {
            prop_assert!(u >= -1e-12);
        }
    }

    #[test]
    fn operator_is_symmetric(seed in any::<u64>(), f in 0.0f64..1.0, f_s in 0.0f64..0.5, sector in 0usize..3) {
        use rand::{Rng, SeedableRng};
        let sector = [BoundarySector::Full, BoundarySector::Even, BoundarySector::Odd][sector];
        let grid = PhaseGrid::new(16, 32).unwrap();
        let op = HamiltonianOperator::new(&CircuitParams::reference(f, f_s), &grid, sector, PotentialModel::Josephson).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<f64> = (0..op.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let v: Vec<f64> = (0..op.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (mut hu, mut hv) = (vec![0.0; op.dim()], vec![0.0; op.dim()]);
        op.apply(&u, &mut hu);
        op.apply(&v, &mut hv);
        let (a, b) = (dot(&u, &hv), dot(&hu, &v));
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()));
    }

    #[test]
    fn distributions_are_normalized(n_th in 0.0f64..2.0, n_t in 0.5f64..50.0, tau in 0.1f64..12.0) {
        let cfg = MaserConfig::from_pump(n_th, n_t, tau * PI, 256).unwrap();
        for d in [steady_state_sqc(&cfg).unwrap(), steady_state_atomic(&cfg).unwrap()] {
            let total: f64 = d.probs.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            prop_assert_eq!(d.probs.len(), 257);
        }
        let atomic = steady_state_atomic(&cfg).unwrap();
        prop_assert!(atomic.probs.iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn zero_rabi_phase_is_thermal(n_th in 0.0f64..3.0, n_t in 0.1f64..100.0) {
        let cfg = MaserConfig::new(n_th, n_t, 0.0, 400).unwrap();
        let exact = thermal_distribution(n_th, 400);
        for d in [steady_state_sqc(&cfg).unwrap(), steady_state_atomic(&cfg).unwrap()] {
            for (a, b) in d.probs.iter().zip(&exact) {
                prop_assert!((a - b).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn gain_and_loss_keep_states_physical(seed in any::<u64>(), g_tau in 0.0f64..6.0, kappa in 0.1f64..3.0, n_th in 0.0f64..2.0) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let d = 10;
        let mut a = DMatrix::from_fn(d, d, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        a.column_mut(d - 1).fill(Complex64::new(0.0, 0.0));
        let m = &a.adjoint() * &a;
        let rho = DensityMatrix::new(m.clone() / m.trace()).unwrap();
        let out = gain_map(&rho, g_tau).unwrap();
        prop_assert!((out.state.trace() - 1.0).abs() < 1e-12);
        prop_assert!(out.state.hermiticity_error() < 1e-12);
        prop_assert!(out.state.populations().iter().all(|&p| p >= -1e-14));
        prop_assert!(dissipator(&rho, kappa, n_th).unwrap().trace().norm() < 1e-12);
    }

    #[test]
    fn device_conversions_scale(nu in 1.0f64..100.0, scale in 0.1f64..10.0) {
        let cav = CavityParams::reference();
        let base = vacuum_flux_ratio(nu, &cav).unwrap();
        let bigger = CavityParams { loop_area: scale * cav.loop_area, ..cav };
        prop_assert!((vacuum_flux_ratio(nu, &bigger).unwrap() / base - scale).abs() < 1e-10 * scale);
        let g = coupling_rate(0.1, base, 400.0).unwrap();
        prop_assert!((coupling_rate(0.1, scale * base, 400.0).unwrap() / g - scale).abs() < 1e-10 * scale);
        prop_assert!((photon_lifetime(nu, scale * 1e6).unwrap() / photon_lifetime(nu, 1e6).unwrap() - scale).abs() < 1e-10 * scale);
    }
}
