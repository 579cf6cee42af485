// SPDX-License-Identifier: Apache-2.0

//! Exponential map from Lie-algebra coefficients to SO(d) / SU(d), with exact derivatives.
//!
//! A complex block is `U = exp(i H)` with `H = Σ_k θ_k G_k` over the generalized Gell-Mann
//! matrices of dimension `d`, in this order:
//!
//! 1. symmetric `E_jk + E_kj` for `j < k`, lexicographic in `(j, k)`;
//! 2. antisymmetric `-i E_jk + i E_kj` for `j < k`, lexicographic;
//! 3. diagonal `sqrt(2 / (l (l + 1))) (Σ_{m<l} E_mm - l E_ll)` for `l = 1..d`.
//!
//! A real block uses only group 2. Then `i H` is the real antisymmetric matrix with
//! `θ` at `(j, k)` and `-θ` at `(k, j)`, so `U ∈ SO(d)`.

use std::sync::OnceLock;

use crate::linalg::{SquareMatrix, C64, I};

pub(crate) fn gell_mann(d: usize) -> Vec<SquareMatrix> {
    let mut out = Vec::with_capacity(d * d - 1);
    for j in 0..d {
        for k in j + 1..d {
            let mut m = SquareMatrix::zeros(d);
            m[(j, k)] = C64::new(1.0, 0.0);
            m[(k, j)] = C64::new(1.0, 0.0);
            out.push(m);
        }
    }
    out.extend(antisymmetric(d));
    for l in 1..d {
        let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut m = SquareMatrix::zeros(d);
        for mm in 0..l {
            m[(mm, mm)] = C64::new(norm, 0.0);
        }
        m[(l, l)] = C64::new(-(l as f64) * norm, 0.0);
        out.push(m);
    }
    out
}

fn antisymmetric(d: usize) -> Vec<SquareMatrix> {
    let mut out = Vec::with_capacity(d * (d - 1) / 2);
    for j in 0..d {
        for k in j + 1..d {
            let mut m = SquareMatrix::zeros(d);
            m[(j, k)] = -I;
            m[(k, j)] = I;
            out.push(m);
        }
    }
    out
}

/// Generator sets, cached per (dimension, field).
fn generators(d: usize, complex: bool) -> &'static [SquareMatrix] {
    static CACHE: [OnceLock<Vec<SquareMatrix>>; 4] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    let slot = match d {
        4 => 0,
        8 => 2,
        _ => panic!("unsupported generator dimension {d}"),
    } + complex as usize;
    CACHE[slot].get_or_init(|| {
        if complex {
            gell_mann(d)
        } else {
            antisymmetric(d)
        }
    })
}

/// Generator `G_k` used for coefficient `k`.
pub fn generator(d: usize, complex: bool, k: usize) -> &'static SquareMatrix {
    &generators(d, complex)[k]
}

/// `exp(i Σ θ_k G_k)` and, optionally, its partial derivatives.
pub(crate) fn exp_map(
    d: usize,
    complex: bool,
    theta: &[f64],
    with_grads: bool,
) -> (SquareMatrix, Vec<SquareMatrix>) {
    let gens = generators(d, complex);
    debug_assert_eq!(gens.len(), theta.len());

    let mut h = SquareMatrix::zeros(d);
    for (g, &t) in gens.iter().zip(theta) {
        if t == 0.0 {
            continue;
        }
        for (hz, gz) in h.as_mut_slice().iter_mut().zip(g.as_slice()) {
            *hz += gz * t;
        }
    }

    let (lambda, v) = h.hermitian_eigen();
    let vh = v.adjoint();
    let phases: Vec<C64> = lambda.iter().map(|&l| C64::from_polar(1.0, l)).collect();
    let mut u = &(&v * &SquareMatrix::diagonal(&phases)) * &vh;
    if !complex {
        u = u.real_part();
    }
    if !with_grads {
        return (u, Vec::new());
    }

    // Daleckii-Krein: dU = V ((V† iG V) ∘ Φ) V†, Φ_jl = e^{i(λj+λl)/2} sinc((λj-λl)/2).
    let mut phi = SquareMatrix::zeros(d);
    for j in 0..d {
        for l in 0..d {
            let half = 0.5 * (lambda[j] - lambda[l]);
            phi[(j, l)] = C64::from_polar(sinc(half), 0.5 * (lambda[j] + lambda[l]));
        }
    }
    let grads = gens
        .iter()
        .map(|g| {
            let mut inner = &(&vh * g) * &v;
            for (z, p) in inner.as_mut_slice().iter_mut().zip(phi.as_slice()) {
                *z *= I * p;
            }
            let du = &(&v * &inner) * &vh;
            if complex {
                du
            } else {
                du.real_part()
            }
        })
        .collect();
    (u, grads)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}
