//! Independent reference computations for the integration tests.
//!
//! Nothing here calls into the library's evolution or projection code. The
//! propagator comes from an explicit eigendecomposition of the effective
//! generator written in the strangeness basis; multi-kaon states are plain
//! amplitude vectors handled by index arithmetic.

#![allow(dead_code)]

use kaon_core::C64;

pub type M2 = [[C64; 2]; 2];

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Effective generator H in the strangeness basis for eigenvalues λ_S, λ_L
/// and mixing ratio p/q:
/// H = [[Σ, (p/q)Δ], [(q/p)Δ, Σ]] with Σ = (λ_S+λ_L)/2, Δ = (λ_S−λ_L)/2.
pub fn generator(lambda_s: C64, lambda_l: C64, eps: C64) -> M2 {
    let p = c(1.0, 0.0) + eps;
    let q = c(1.0, 0.0) - eps;
    let sigma = (lambda_s + lambda_l) / 2.0;
    let delta = (lambda_s - lambda_l) / 2.0;
    [[sigma, delta * p / q], [delta * q / p, sigma]]
}

/// Eigenpairs of a general 2×2 complex matrix from its characteristic
/// polynomial.
pub fn eig2(h: &M2) -> [(C64, [C64; 2]); 2] {
    let tr = h[0][0] + h[1][1];
    let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
    let disc = (tr * tr / 4.0 - det).sqrt();
    let mus = [tr / 2.0 + disc, tr / 2.0 - disc];
    mus.map(|mu| {
        // pick the better-conditioned row of (H − μ)v = 0
        let v = if h[0][1].norm() + (mu - h[0][0]).norm() >= h[1][0].norm() + (mu - h[1][1]).norm() {
            [h[0][1], mu - h[0][0]]
        } else {
            [mu - h[1][1], h[1][0]]
        };
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        (mu, [v[0] / n, v[1] / n])
    })
}

/// exp(−iHτ) from the eigendecomposition, columns solved by Cramer's rule.
pub fn propagator(h: &M2, tau: f64) -> M2 {
    let [(m1, v1), (m2, v2)] = eig2(h);
    let e1 = (-C64::i() * m1 * tau).exp();
    let e2 = (-C64::i() * m2 * tau).exp();
    let det = v1[0] * v2[1] - v2[0] * v1[1];
    let mut u = [[c(0.0, 0.0); 2]; 2];
    for (col, x) in [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]].iter().enumerate() {
        let a1 = (x[0] * v2[1] - v2[0] * x[1]) / det;
        let a2 = (v1[0] * x[1] - x[0] * v1[1]) / det;
        for row in 0..2 {
            u[row][col] = a1 * e1 * v1[row] + a2 * e2 * v2[row];
        }
    }
    u
}

/// exp(−iHτ) by scaling and squaring a Taylor series; no eigenvectors.
pub fn propagator_series(h: &M2, tau: f64) -> M2 {
    let a: M2 = [[h[0][0] * (-C64::i() * tau), h[0][1] * (-C64::i() * tau)], [h[1][0] * (-C64::i() * tau), h[1][1] * (-C64::i() * tau)]];
    let norm = a.iter().flatten().map(|z| z.norm()).sum::<f64>();
    let s = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let scale = 0.5f64.powi(s);
    let a = a.map(|r| r.map(|z| z * scale));
    let mut term = identity();
    let mut sum = identity();
    for k in 1..30 {
        term = mul(&term, &a).map(|r| r.map(|z| z / k as f64));
        sum = add(&sum, &term);
    }
    for _ in 0..s {
        sum = mul(&sum, &sum);
    }
    sum
}

pub fn identity() -> M2 {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]]
}

pub fn mul(x: &M2, y: &M2) -> M2 {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

fn add(x: &M2, y: &M2) -> M2 {
    [[x[0][0] + y[0][0], x[0][1] + y[0][1]], [x[1][0] + y[1][0], x[1][1] + y[1][1]]]
}

pub fn apply(u: &M2, v: [C64; 2]) -> [C64; 2] {
    [u[0][0] * v[0] + u[0][1] * v[1], u[1][0] * v[0] + u[1][1] * v[1]]
}

/// Reference propagator for the library's reduced eigenvalues.
pub fn kaon_propagator(tau: f64, gamma_l: f64, delta_m: f64, eps: C64) -> M2 {
    let h = generator(c(0.0, -0.5), c(delta_m, -gamma_l / 2.0), eps);
    propagator(&h, tau)
}

/// Apply a single-kaon operator to position `k` of an n-kaon amplitude vector
/// (bit k of the index is kaon k).
pub fn apply_at(amps: &[C64], k: usize, u: &M2) -> Vec<C64> {
    let mut out = vec![c(0.0, 0.0); amps.len()];
    for (idx, slot) in out.iter_mut().enumerate() {
        let bit = (idx >> k) & 1;
        let base = idx & !(1 << k);
        *slot = u[bit][0] * amps[base] + u[bit][1] * amps[base | (1 << k)];
    }
    out
}

/// Kronecker product with `first` on the low bits.
pub fn kron(first: &[C64], n_first: usize, second: &[C64]) -> Vec<C64> {
    let mut out = vec![c(0.0, 0.0); first.len() * second.len()];
    for (j, y) in second.iter().enumerate() {
        for (i, x) in first.iter().enumerate() {
            out[i | (j << n_first)] = x * y;
        }
    }
    out
}

/// The four φ vectors as amplitudes over index `first | second << 1`.
pub fn phi(v: usize) -> [C64; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let z = c(0.0, 0.0);
    match v {
        0 => [c(1.0, 0.0), z, z, z],
        1 => [z, z, z, c(1.0, 0.0)],
        2 => [z, c(h, 0.0), c(h, 0.0), z],
        3 => [z, c(-h, 0.0), c(h, 0.0), z],
        _ => unreachable!(),
    }
}

/// ⟨φ_v|_(i,j) applied to an n-kaon vector: returns the unnormalized
/// remaining-kaon vector, remaining kaons in their original order.
pub fn contract_pair(amps: &[C64], n: usize, i: usize, j: usize, v: usize) -> Vec<C64> {
    let rest: Vec<usize> = (0..n).filter(|&k| k != i && k != j).collect();
    let bra = phi(v);
    let mut out = vec![c(0.0, 0.0); 1 << rest.len()];
    for (r, slot) in out.iter_mut().enumerate() {
        let mut base = 0usize;
        for (pos, &k) in rest.iter().enumerate() {
            base |= ((r >> pos) & 1) << k;
        }
        for (pair_idx, b) in bra.iter().enumerate() {
            let idx = base | ((pair_idx & 1) << i) | (((pair_idx >> 1) & 1) << j);
            *slot += b.conj() * amps[idx];
        }
    }
    out
}

pub fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// |⟨a|b⟩|²/(‖a‖²‖b‖²).
pub fn fidelity(a: &[C64], b: &[C64]) -> f64 {
    inner(a, b).norm_sqr() / (norm2(a) * norm2(b))
}

/// Max component distance after normalizing both and removing the relative
/// global phase.
pub fn aligned_distance(a: &[C64], b: &[C64]) -> f64 {
    let (na, nb) = (norm2(a).sqrt(), norm2(b).sqrt());
    let ip = inner(a, b);
    let ph = if ip.norm() > 0.0 { ip / ip.norm() } else { c(1.0, 0.0) };
    a.iter().zip(b).map(|(x, y)| (x / na * ph - y / nb).norm()).fold(0.0, f64::max)
}

/// Proper time in either convention.
pub fn proper(gamma: f64, dt: f64, paper: bool) -> f64 {
    if paper {
        gamma * dt
    } else {
        dt / gamma
    }
}
