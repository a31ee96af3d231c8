use num_complex::Complex64;

use crate::em::Dyad33;

/// First-order change of G(rᵢ, rⱼ) when voxel k gains δε:
/// k²·δε·δV · G(rᵢ, r_k)·G(r_k, rⱼ).
pub fn born_delta_green(g_ik: &Dyad33, g_kj: &Dyad33, delta_eps: f64, voxel_volume: f64, k: f64) -> Dyad33 {
    (*g_ik * *g_kj).scale(Complex64::new(k * k * delta_eps * voxel_volume, 0.0))
}
