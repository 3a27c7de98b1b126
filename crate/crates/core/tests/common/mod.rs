//! Reference computations that share no code path with the library.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Gamma, UnitSphere};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off.sqrt() <= 1e-15 * a.norm() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)] == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    d.sort_by(f64::total_cmp);
    d
}

/// Cholesky factor `L` with `A = L Lᵀ`, by the textbook recurrence.
pub fn cholesky(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut l = DMatrix::zeros(n, n);
    for j in 0..n {
        let s: f64 = (0..j).map(|k| l[(j, k)] * l[(j, k)]).sum();
        l[(j, j)] = (a[(j, j)] - s).sqrt();
        for i in j + 1..n {
            let s: f64 = (0..j).map(|k| l[(i, k)] * l[(j, k)]).sum();
            l[(i, j)] = (a[(i, j)] - s) / l[(j, j)];
        }
    }
    l
}

/// Inverse of a lower-triangular matrix by forward substitution.
pub fn lower_inverse(l: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut inv = DMatrix::zeros(n, n);
    for c in 0..n {
        for i in c..n {
            let rhs = if i == c { 1.0 } else { 0.0 };
            let s: f64 = (c..i).map(|k| l[(i, k)] * inv[(k, c)]).sum();
            inv[(i, c)] = (rhs - s) / l[(i, i)];
        }
    }
    inv
}

/// Eigenvalues of the pencil `(−B, A)` for `A ≻ 0`, via `L⁻¹(−B)L⁻ᵀ`.
pub fn pencil_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Vec<f64> {
    let li = lower_inverse(&cholesky(a));
    let m = -(&li * b * li.transpose());
    jacobi_eigenvalues(&(0.5 * (&m + m.transpose())))
}

/// Zero-energy `ℓ = 0` solution of `−u'' − g·e^{−r}/r·u = 0`, integrated by
/// RK4 out to `r_max`; returns the number of nodes and `u'(r_max)`.
fn yukawa_zero_energy(g: f64, r_max: f64, steps: usize) -> (usize, f64) {
    let h = r_max / steps as f64;
    let f = |r: f64, u: f64| -g * (-r).exp() / r * u;
    let r0 = 1e-9;
    let (mut r, mut u, mut du) = (r0, r0, 1.0 - g * r0);
    let mut nodes = 0;
    for _ in 0..steps {
        let k1u = du;
        let k1d = f(r, u);
        let k2u = du + 0.5 * h * k1d;
        let k2d = f(r + 0.5 * h, u + 0.5 * h * k1u);
        let k3u = du + 0.5 * h * k2d;
        let k3d = f(r + 0.5 * h, u + 0.5 * h * k2u);
        let k4u = du + h * k3d;
        let k4d = f(r + h, u + h * k3u);
        let un = u + h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        if un.signum() != u.signum() {
            nodes += 1;
        }
        u = un;
        r += h;
    }
    (nodes, du)
}

/// Critical `g` for `−e^{−r}/r` by shooting: the first `g` at which the
/// zero-energy solution turns over (`u'(∞) < 0`) or acquires a node.
pub fn yukawa_critical_strength() -> f64 {
    let binds = |g: f64| {
        let (nodes, du) = yukawa_zero_energy(g, 50.0, 200_000);
        nodes > 0 || du < 0.0
    };
    let (mut lo, mut hi) = (1.0, 3.0);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if binds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Squared Rollnik norm `∫∫ v(x)v(y)/|x−y|² d³x d³y` by importance sampling.
///
/// `x` is drawn from the radial density `r²v(r)/Z` given by `radial_draw`,
/// `y = x + ρΩ` with `Ω` uniform and `ρ ~ Exp(1)`; in these variables
/// `d³y/|x−y|² = dρ dΩ`.
pub fn rollnik_squared_mc<R: Rng>(
    rng: &mut R,
    v: impl Fn(f64) -> f64,
    z: f64,
    radial_draw: impl Fn(&mut R) -> f64,
    samples: usize,
) -> (f64, f64) {
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..samples {
        let r = radial_draw(rng);
        let dir: [f64; 3] = UnitSphere.sample(rng);
        let x = [r * dir[0], r * dir[1], r * dir[2]];
        let om: [f64; 3] = UnitSphere.sample(rng);
        let rho = -(1.0 - rng.random::<f64>()).ln();
        let y = [x[0] + rho * om[0], x[1] + rho * om[1], x[2] + rho * om[2]];
        let ry = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        let est = z * 4.0 * std::f64::consts::PI * v(ry) * rho.exp();
        sum += est;
        sum2 += est * est;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

/// Draws from `Gamma(k, 1)` for the radial densities `r e^{−r}` and `r² e^{−r}`.
pub fn gamma_draw<R: Rng>(k: f64) -> impl Fn(&mut R) -> f64 {
    let g = Gamma::new(k, 1.0).unwrap();
    move |rng: &mut R| g.sample(rng)
}
