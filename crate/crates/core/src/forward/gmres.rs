//! Restarted GMRES for complex, matrix-free operators.

use num_complex::Complex64 as C64;

#[derive(Debug, Clone, Copy)]
pub struct GmresConfig {
    /// Relative residual target `||b - A x|| / ||b||`.
    pub tol: f64,
    /// Krylov dimension before restart.
    pub restart: usize,
    /// Total inner iterations across all restarts.
    pub max_iter: usize,
}

impl Default for GmresConfig {
    fn default() -> Self {
        Self { tol: 1e-8, restart: 100, max_iter: 2000 }
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<C64>,
    pub iterations: usize,
    /// True relative residual, recomputed from `x` at exit.
    pub residual: f64,
    pub converged: bool,
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn givens(a: C64, b: C64) -> (f64, C64) {
    let na = a.norm();
    if na == 0.0 {
        return (0.0, C64::new(1.0, 0.0));
    }
    let r = na.hypot(b.norm());
    let c = na / r;
    let s = (a / na) * b.conj() / r;
    (c, s)
}

/// Solves `A x = b` starting from `x0` (zero when `None`).
pub fn gmres<F>(apply: F, b: &[C64], x0: Option<Vec<C64>>, cfg: &GmresConfig) -> GmresOutcome
where
    F: Fn(&[C64]) -> Vec<C64>,
{
    let n = b.len();
    let bnorm = norm(b);
    let mut x = x0.unwrap_or_else(|| vec![C64::new(0.0, 0.0); n]);
    if bnorm == 0.0 {
        return GmresOutcome { x: vec![C64::new(0.0, 0.0); n], iterations: 0, residual: 0.0, converged: true };
    }

    let residual_of = |x: &[C64]| -> Vec<C64> {
        let ax = apply(x);
        b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect()
    };

    let mut iterations = 0;
    let m = cfg.restart.max(1);
    loop {
        let r = residual_of(&x);
        let beta = norm(&r);
        if beta / bnorm <= cfg.tol || iterations >= cfg.max_iter {
            return GmresOutcome { x, iterations, residual: beta / bnorm, converged: beta / bnorm <= cfg.tol };
        }

        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(m + 1);
        basis.push(r.iter().map(|z| z / beta).collect());
        // Hessenberg columns, rotated in place.
        let mut h: Vec<Vec<C64>> = Vec::with_capacity(m);
        let mut cs: Vec<(f64, C64)> = Vec::with_capacity(m);
        let mut g = vec![C64::new(0.0, 0.0); m + 1];
        g[0] = C64::new(beta, 0.0);

        let mut k = 0;
        while k < m && iterations < cfg.max_iter {
            let mut w = apply(&basis[k]);
            let mut col = vec![C64::new(0.0, 0.0); k + 2];
            // Modified Gram-Schmidt, two passes.
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let hij = dot(v, &w);
                    col[i] += hij;
                    for (wj, vj) in w.iter_mut().zip(v) {
                        *wj -= hij * vj;
                    }
                }
            }
            let hnext = norm(&w);
            col[k + 1] = C64::new(hnext, 0.0);

            for (i, &(c, s)) in cs.iter().enumerate() {
                let t = c * col[i] + s * col[i + 1];
                col[i + 1] = -s.conj() * col[i] + c * col[i + 1];
                col[i] = t;
            }
            let (c, s) = givens(col[k], col[k + 1]);
            col[k] = c * col[k] + s * col[k + 1];
            col[k + 1] = C64::new(0.0, 0.0);
            g[k + 1] = -s.conj() * g[k];
            g[k] *= c;
            cs.push((c, s));
            h.push(col);

            iterations += 1;
            k += 1;
            let est = g[k].norm() / bnorm;
            if hnext == 0.0 || est <= cfg.tol * 0.5 {
                break;
            }
            basis.push(w.iter().map(|z| z / hnext).collect());
        }

        // Back substitution for the k x k upper-triangular system.
        let mut y = vec![C64::new(0.0, 0.0); k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for j in i + 1..k {
                acc -= h[j][i] * y[j];
            }
            y[i] = acc / h[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&basis[j]) {
                *xi += yj * vi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(a: &[Vec<C64>]) -> impl Fn(&[C64]) -> Vec<C64> + '_ {
        move |x| a.iter().map(|row| row.iter().zip(x).map(|(r, v)| r * v).sum()).collect()
    }

    #[test]
    fn solves_small_nonsymmetric_system() {
        let n = 30;
        let a: Vec<Vec<C64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let base = if i == j { C64::new(4.0, 1.0) } else { C64::new(0.0, 0.0) };
                        base + C64::new(((i * 7 + j * 3) % 11) as f64 / 20.0, ((i + 2 * j) % 5) as f64 / 30.0)
                    })
                    .collect()
            })
            .collect();
        let xs: Vec<C64> = (0..n).map(|i| C64::new(i as f64, 1.0 - i as f64 * 0.5)).collect();
        let op = dense(&a);
        let b = op(&xs);
        let out = gmres(&op, &b, None, &GmresConfig { tol: 1e-12, restart: 8, max_iter: 500 });
        assert!(out.converged, "residual {}", out.residual);
        for (u, v) in out.x.iter().zip(&xs) {
            assert!((u - v).norm() < 1e-9);
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let out = gmres(|x: &[C64]| x.to_vec(), &[C64::new(0.0, 0.0); 4], None, &GmresConfig::default());
        assert_eq!(out.iterations, 0);
        assert!(out.x.iter().all(|z| *z == C64::new(0.0, 0.0)));
    }

    #[test]
    fn reports_non_convergence() {
        // Rotation-like operator needs the full dimension; cap iterations below it.
        let n = 20;
        let op = |x: &[C64]| -> Vec<C64> { (0..n).map(|i| x[(i + 1) % n]).collect() };
        let b: Vec<C64> = (0..n).map(|i| C64::new((i == 0) as u8 as f64, 0.0)).collect();
        let out = gmres(op, &b, None, &GmresConfig { tol: 1e-10, restart: 5, max_iter: 10 });
        assert!(!out.converged);
        assert!(out.residual > 1e-10);
    }
}
