use crate::error::{Error, Result};

const BRANCH_POINT: f64 = 2.0 / 3.0;

/// Point (C, S_L) on the maximally-entangled-mixed-state frontier.
///
/// The family has coherence r/2 between |g₁g₂⟩ and |e₁e₂⟩ and populations
/// {g, 1−2g, 0, g} with g = max{r/2, 1/3}.
pub fn mems_curve(r: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidParams(format!("MEMS parameter {r} outside [0, 1]")));
    }
    let s_l = if r >= BRANCH_POINT {
        8.0 / 3.0 * r * (1.0 - r)
    } else {
        8.0 / 9.0 - 2.0 / 3.0 * r * r
    };
    Ok((r, s_l))
}

/// Largest concurrence attainable at linear entropy `s_l`.
pub fn mems_concurrence_at_entropy(s_l: f64) -> f64 {
    if s_l <= 0.0 {
        1.0
    } else if s_l <= 16.0 / 27.0 {
        0.5 * (1.0 + (1.0 - 1.5 * s_l).max(0.0).sqrt())
    } else if s_l < 8.0 / 9.0 {
        (1.5 * (8.0 / 9.0 - s_l)).sqrt()
    } else {
        0.0
    }
}

/// Euclidean distance in the (S_L, C) plane from a point to the MEMS curve.
pub fn mems_distance(s_l: f64, c: f64) -> f64 {
    let dist = |r: f64| {
        let (cc, ss) = mems_curve(r).expect("r in range");
        ((ss - s_l).powi(2) + (cc - c).powi(2)).sqrt()
    };
    const SAMPLES: usize = 4000;
    let best = (0..=SAMPLES)
        .map(|i| i as f64 / SAMPLES as f64)
        .min_by(|a, b| dist(*a).total_cmp(&dist(*b)))
        .unwrap_or(0.0);
    // Golden-section refinement on the bracketing interval.
    let h = 1.0 / SAMPLES as f64;
    let (mut lo, mut hi) = ((best - h).max(0.0), (best + h).min(1.0));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        if dist(a) < dist(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    dist(0.5 * (lo + hi)).min(dist(best))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random::random_density;
    use crate::quantum::{concurrence_wootters, linear_entropy, DensityMatrix4};
    use num_complex::Complex64;
    use rand::SeedableRng;

    #[test]
    fn endpoints() {
        assert_eq!(mems_curve(1.0).unwrap(), (1.0, 0.0));
        let (c, s) = mems_curve(0.0).unwrap();
        assert_eq!(c, 0.0);
        assert!((s - 8.0 / 9.0).abs() < 1e-15);
        assert!(mems_curve(1.01).is_err());
        assert!(mems_curve(-0.01).is_err());
    }

    #[test]
    fn branches_meet_at_two_thirds() {
        let r: f64 = 2.0 / 3.0;
        let upper = 8.0 / 3.0 * r * (1.0 - r);
        let lower = 8.0 / 9.0 - 2.0 / 3.0 * r * r;
        assert!((upper - 16.0 / 27.0).abs() < 1e-15);
        assert!((lower - 16.0 / 27.0).abs() < 1e-15);
        assert!((mems_curve(r).unwrap().1 - 16.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn explicit_family_reproduces_curve() {
        for i in 0..=50 {
            let r = i as f64 / 50.0;
            let g = (r / 2.0).max(1.0 / 3.0);
            let mut rho = DensityMatrix4::x_state([g, 1.0 - 2.0 * g, 0.0, g], Complex64::new(0.0, 0.0));
            rho.0[(0, 3)] = Complex64::new(r / 2.0, 0.0);
            rho.0[(3, 0)] = Complex64::new(r / 2.0, 0.0);
            let (c, s) = mems_curve(r).unwrap();
            assert!((concurrence_wootters(&rho) - c).abs() < 1e-7);
            assert!((linear_entropy(&rho) - s).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_matches_forward() {
        for i in 0..=100 {
            let r = i as f64 / 100.0;
            let (c, s) = mems_curve(r).unwrap();
            assert!((mems_concurrence_at_entropy(s) - c).abs() < 1e-7, "r = {r}");
            assert!(mems_distance(s, c) < 1e-9);
        }
    }

    #[test]
    fn random_states_stay_below_frontier() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..5000 {
            let rho = random_density(&mut rng);
            let s = linear_entropy(&rho);
            assert!(concurrence_wootters(&rho) <= mems_concurrence_at_entropy(s) + 1e-9);
        }
    }
}
