#![allow(dead_code)]

use std::io::Write;

use num_complex::Complex64;
use qgraph::{CMatrix, Edge, MetricGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(r: &mut ChaCha8Rng, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| {
        Complex64::new(r.sample(StandardNormal), r.sample(StandardNormal))
    })
}

/// Haar unitary: QR of a complex Gaussian matrix with the phases of `R` removed.
pub fn random_unitary(r: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let (mut q, rr) = gaussian(r, d).qr().unpack();
    for j in 0..d {
        let p = rr[(j, j)] / rr[(j, j)].norm();
        for i in 0..d {
            q[(i, j)] *= p;
        }
    }
    q
}

/// `(C·i(U − I), C·(U + I))` with random unitary `U` and invertible `C`.
pub fn random_admissible_pair(r: &mut ChaCha8Rng, d: usize) -> (CMatrix, CMatrix) {
    let u = random_unitary(r, d);
    let c = CMatrix::identity(d, d) * Complex64::new(2.0, 0.0) + gaussian(r, d) * Complex64::new(0.5, 0.0);
    let id = CMatrix::identity(d, d);
    let a = &c * (&u - &id) * Complex64::new(0.0, 1.0);
    let b = &c * (&u + &id);
    (a, b)
}

/// Connected graph on at most `edges` vertices; loops and parallel edges allowed.
pub fn random_graph(r: &mut ChaCha8Rng, edges: usize) -> MetricGraph {
    let vertices = r.random_range(2..=edges.max(2));
    let mut list = Vec::new();
    for v in 1..vertices {
        list.push((r.random_range(0..v), v));
    }
    while list.len() < edges {
        list.push((r.random_range(0..vertices), r.random_range(0..vertices)));
    }
    let list = list
        .into_iter()
        .enumerate()
        .map(|(i, (a, b))| Edge::new(i + 1, format!("v{a}"), format!("v{b}"), r.random_range(0.3..2.0)))
        .collect();
    MetricGraph::from_edges(list).unwrap()
}

/// `‖M†M − I‖₂`
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.ncols();
    (m.adjoint() * m - CMatrix::identity(n, n))
        .svd(false, false)
        .singular_values
        .max()
}

/// Writes a result line straight to the process stdout so it survives output capture.
pub fn report(name: &str, pass: bool, detail: &str) {
    let line = format!("{} {name}: {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stdout().lock().write_all(line.as_bytes());
    assert!(pass, "{line}");
}
