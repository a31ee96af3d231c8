use std::f64::consts::PI;

use nalgebra::Vector3;
use proptest::prelude::*;

use entcloak::cli::config::{logspace, RunConfig};
use entcloak::cli::io::{eps_csv, parse_design, DesignMeta};
use entcloak::em::{couplings_from_green, free_space_green, free_space_self_green, Position};
use entcloak::quantum::{
    concurrence, linear_entropy, mems_concurrence_at_entropy, negativity, steady_state, MasterEqParams,
};
use entcloak::vie::PermittivityGrid;

const K: f64 = 2.0 * PI;

fn params() -> impl Strategy<Value = MasterEqParams> {
    (0.1f64..3.0, 0.1f64..3.0, -0.99f64..0.99, -5.0f64..5.0, 1e-4f64..3.0).prop_map(|(g1, g2, r, g12, p)| {
        MasterEqParams::new(g1, g2, r * (g1 * g2).sqrt(), g12, p).unwrap()
    })
}

fn point() -> impl Strategy<Value = Position> {
    (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0).prop_map(|(x, y, z)| Position::new(x, y, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn steady_state_is_a_density_matrix(p in params()) {
        let rho = steady_state(&p).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(rho.hermiticity_error() < 1e-12);
        prop_assert!(rho.min_eigenvalue() > -1e-12);
        prop_assert!(rho.x_structure_error() < 1e-10);
    }

    #[test]
    fn witnesses_are_ordered_and_bounded(p in params()) {
        let rho = steady_state(&p).unwrap();
        let (c, n, s) = (concurrence(&rho), negativity(&rho), linear_entropy(&rho));
        prop_assert!((0.0..=1.0).contains(&c));
        prop_assert!(n <= c + 1e-12);
        if c > 1e-6 {
            prop_assert!(n > 0.0);
        }
        prop_assert!(c <= mems_concurrence_at_entropy(s) + 1e-9);
    }

    #[test]
    fn swapping_emitters_swaps_populations(p in params()) {
        let swapped = MasterEqParams { gamma11: p.gamma22, gamma22: p.gamma11, ..p };
        let (a, b) = (steady_state(&p).unwrap(), steady_state(&swapped).unwrap());
        prop_assert!((a.rho11() - b.rho22()).abs() < 1e-10);
        prop_assert!((concurrence(&a) - concurrence(&b)).abs() < 1e-10);
    }

    #[test]
    fn free_space_green_is_reciprocal_and_couplings_bounded(a in point(), b in point()) {
        prop_assume!(a.distance(b) > 1e-3);
        let g = free_space_green(a, b, K).unwrap();
        let h = free_space_green(b, a, K).unwrap();
        prop_assert!((g - h.transpose()).frobenius_norm() <= 1e-12 * g.frobenius_norm());
        let p = Vector3::new(a.x - b.x, 0.3, 1.0).normalize();
        let s = free_space_self_green(K);
        let c = couplings_from_green(&s, &s, &g, &p, K).unwrap();
        prop_assert!((c.gamma11 - 1.0).abs() < 1e-14);
        prop_assert!(c.gamma12.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn design_files_round_trip_bit_exactly(
        dims in prop::array::uniform3(1usize..5),
        eps in prop::collection::vec(1.0f64..9.0, 64),
        spacing in 0.01f64..0.2,
    ) {
        let mut g = PermittivityGrid::centered(dims, spacing, 9.0).unwrap();
        for (i, e) in g.eps.iter_mut().enumerate() {
            *e = eps[i % eps.len()];
        }
        let meta = DesignMeta::new(&g, Position::on_axis(-0.3), Position::on_axis(0.3), [0.0, 0.0, 1.0]);
        let (back, m) = parse_design(&eps_csv(&g).unwrap(), &serde_json::to_string(&meta).unwrap()).unwrap();
        prop_assert_eq!(m, meta);
        prop_assert!(back.eps.iter().zip(&g.eps).all(|(a, b)| a.to_bits() == b.to_bits()));
        prop_assert_eq!(back.origin, g.origin);
    }

    #[test]
    fn logspace_is_increasing_with_exact_count(min in 1e-3f64..1.0, span in 1.5f64..100.0, n in 2usize..200) {
        let v = logspace(min, min * span, n);
        prop_assert_eq!(v.len(), n);
        prop_assert!(v.windows(2).all(|w| w[1] > w[0]));
        prop_assert!((v[0] / min - 1.0).abs() < 1e-12 && (v[n - 1] / (min * span) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn config_values_survive_parsing(d in 0.01f64..5.0, de in 0.001f64..1.0, iters in 0usize..1000, seed in any::<u64>()) {
        let text = format!("d12 = {d}\ndelta_eps = {de}\nmax_iterations = {iters}\nseed = {seed}\n");
        let cfg = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(cfg.d12, d);
        prop_assert_eq!(cfg.design.delta_eps, de);
        prop_assert_eq!(cfg.design.max_iterations, iters);
        prop_assert_eq!(cfg.seed, seed);
    }
}
