use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct KrylovSolution {
    pub x: Vec<Complex64>,
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Unpreconditioned BiCGSTAB. Converged when ‖b − Ax‖/‖b‖ ≤ `tol`; the
/// returned residual is recomputed from the final iterate.
pub fn bicgstab<F>(apply: F, b: &[Complex64], tol: f64, max_iter: usize) -> Result<KrylovSolution>
where
    F: Fn(&[Complex64]) -> Vec<Complex64>,
{
    let n = b.len();
    let zero = Complex64::new(0.0, 0.0);
    let bnorm = norm(b);
    if bnorm == 0.0 {
        return Ok(KrylovSolution { x: vec![zero; n], iterations: 0, residual: 0.0 });
    }
    let mut x = b.to_vec();
    let ax = apply(&x);
    let mut r: Vec<Complex64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let true_residual = |x: &[Complex64]| {
        let ax = apply(x);
        norm(&b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect::<Vec<_>>()) / bnorm
    };
    if norm(&r) / bnorm <= tol {
        let residual = norm(&r) / bnorm;
        return Ok(KrylovSolution { x, iterations: 0, residual });
    }
    let r_hat = r.clone();
    let mut p = r.clone();
    let mut rho = dot(&r_hat, &r);
    let mut residual = norm(&r) / bnorm;

    for it in 1..=max_iter {
        let v = apply(&p);
        let denom = dot(&r_hat, &v);
        if denom.norm() == 0.0 {
            break;
        }
        let alpha = rho / denom;
        let s: Vec<Complex64> = r.iter().zip(&v).map(|(ri, vi)| ri - alpha * vi).collect();
        if norm(&s) / bnorm <= tol {
            for (xi, pi) in x.iter_mut().zip(&p) {
                *xi += alpha * pi;
            }
            residual = true_residual(&x);
            if residual <= tol {
                return Ok(KrylovSolution { x, iterations: it, residual });
            }
            r = b.iter().zip(apply(&x)).map(|(bi, ai)| bi - ai).collect();
            p = r.clone();
            rho = dot(&r_hat, &r);
            continue;
        }
        let t = apply(&s);
        let tt = dot(&t, &t);
        if tt.norm() == 0.0 {
            break;
        }
        let omega = dot(&t, &s) / tt;
        for i in 0..n {
            x[i] += alpha * p[i] + omega * s[i];
            r[i] = s[i] - omega * t[i];
        }
        residual = norm(&r) / bnorm;
        if residual <= tol {
            residual = true_residual(&x);
            if residual <= tol {
                return Ok(KrylovSolution { x, iterations: it, residual });
            }
        }
        let rho_next = dot(&r_hat, &r);
        if rho_next.norm() == 0.0 || omega.norm() == 0.0 {
            break;
        }
        let beta = (rho_next / rho) * (alpha / omega);
        rho = rho_next;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
    }
    Err(Error::NotConverged { iterations: max_iter, residual })
}
