use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::graph::{Edge, MetricGraph};
use crate::linalg::{c, CMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(r: &mut ChaCha8Rng, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| {
        c(r.sample::<f64, _>(StandardNormal), r.sample::<f64, _>(StandardNormal))
    })
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix.
pub fn random_unitary(r: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let qr = gaussian(r, d).qr();
    let (q, rr) = qr.unpack();
    let mut q = q;
    for j in 0..d {
        let p = rr[(j, j)] / rr[(j, j)].norm();
        for i in 0..d {
            q[(i, j)] *= p;
        }
    }
    q
}

pub fn random_invertible(r: &mut ChaCha8Rng, d: usize) -> CMatrix {
    CMatrix::identity(d, d) * c(2.0, 0.0) + gaussian(r, d) * c(0.5, 0.0)
}

/// Random connected graph, possibly with loops and parallel edges.
pub fn random_graph(r: &mut ChaCha8Rng, edges: usize) -> MetricGraph {
    let vertices = r.random_range(2..=edges.max(2));
    let mut list = Vec::new();
    for v in 1..vertices {
        let u = r.random_range(0..v);
        list.push((u, v));
    }
    while list.len() < edges {
        list.push((r.random_range(0..vertices), r.random_range(0..vertices)));
    }
    let list = list
        .into_iter()
        .take(edges.max(vertices - 1))
        .enumerate()
        .map(|(i, (a, b))| Edge::new(i + 1, format!("v{a}"), format!("v{b}"), r.random_range(0.3..2.0)))
        .collect();
    MetricGraph::from_edges(list).unwrap()
}
