//! Secular equation `det(I − U(k)) = 0` and its root set.
//!
//! Roots are located as zero crossings of eigenphases of the unitary
//! `U(k) = D(k)Σ(k)`. Eigenphases are followed between adjacent grid points
//! by matching eigenvectors with maximal overlap; each crossing through zero
//! is then bisected along the tracked eigenvector. Degenerate roots show up
//! as several crossings at the same `k` and are merged.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{identity, CVector, UnitaryEigen};
use crate::model::QuantumGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Grid points per mean level spacing `π / L_total`.
    pub q: f64,
    /// Bisection stops once the bracket is narrower than `tol_root · k`.
    pub tol_root: f64,
    /// Roots closer than `tol_cluster · k` are merged.
    pub tol_cluster: f64,
    /// Eigenphases within this many radians of zero count towards a root's multiplicity.
    pub phase_tol: f64,
    /// Relative singular-value threshold for null directions of `I − U(k)`.
    pub null_tol: f64,
    /// Overlap ratio above which a second candidate makes a match ambiguous.
    pub ambiguity_ratio: f64,
    pub max_refine_depth: u32,
    pub verify: bool,
    pub jobs: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            q: 8.0,
            tol_root: 1e-10,
            tol_cluster: 1e-8,
            phase_tol: 1e-8,
            null_tol: 1e-6,
            ambiguity_ratio: 0.5,
            max_refine_depth: 12,
            verify: false,
            jobs: 1,
        }
    }
}

/// `det(I − U(k))` with the eigenphases of `U(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecularSample {
    pub k: f64,
    pub det_value: Complex64,
    /// Sorted, each in `(−π, π]`.
    pub eigenphases: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Root {
    pub k: f64,
    pub multiplicity: usize,
    /// Final bisection bracket width relative to `k`.
    pub residual: f64,
    /// Largest |eigenphase| among those counted for the multiplicity.
    pub phase_residual: f64,
    pub bracket: (f64, f64),
    /// Crossing count and eigenphase count disagree, or the cluster is wide.
    pub unresolved: bool,
    /// Vertex-condition residual of the reconstructed eigenfunctions.
    pub verification: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SolverStats {
    pub grid_points: usize,
    pub refinements: usize,
    pub bisection_steps: usize,
    /// Intervals where tracking stayed ambiguous at the refinement limit.
    pub ambiguous_intervals: usize,
}

impl SolverStats {
    fn absorb(&mut self, other: &SolverStats) {
        self.grid_points += other.grid_points;
        self.refinements += other.refinements;
        self.bisection_steps += other.bisection_steps;
        self.ambiguous_intervals += other.ambiguous_intervals;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Spectrum {
    pub roots: Vec<Root>,
    pub k_range: (f64, f64),
    pub stats: SolverStats,
}

impl Spectrum {
    /// Roots repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.k, r.multiplicity))
            .collect()
    }

    /// Number of eigenvalues (with multiplicity) with root `≤ k`.
    pub fn counting(&self, k: f64) -> usize {
        self.roots.iter().filter(|r| r.k <= k).map(|r| r.multiplicity).sum()
    }
}

struct Sample {
    k: f64,
    eig: UnitaryEigen,
}

fn sample(model: &QuantumGraph, k: f64) -> Result<Sample> {
    let op = model.operator_at(k)?;
    let eig = UnitaryEigen::new(&op.evolution).ok_or(Error::EigenFailure(k))?;
    Ok(Sample { k, eig })
}

pub fn secular_value(model: &QuantumGraph, k: f64) -> Result<SecularSample> {
    let op = model.operator_at(k)?;
    let n = op.dimension();
    let det_value = crate::linalg::determinant(&(identity(n) - &op.evolution));
    let eig = UnitaryEigen::new(&op.evolution).ok_or(Error::EigenFailure(k))?;
    let mut eigenphases = eig.phases;
    eigenphases.sort_by(f64::total_cmp);
    Ok(SecularSample {
        k,
        det_value,
        eigenphases,
    })
}

/// The representative of `theta` closest to `reference`.
fn unwrap_near(theta: f64, reference: f64) -> f64 {
    let d = theta - reference;
    if d > PI {
        theta - 2.0 * PI
    } else if d < -PI {
        theta + 2.0 * PI
    } else {
        theta
    }
}

struct Candidate {
    k: f64,
    lo: f64,
    hi: f64,
}

struct Scanner<'a> {
    model: &'a QuantumGraph,
    opts: &'a SolverOptions,
    stats: SolverStats,
    candidates: Vec<Candidate>,
}

impl Scanner<'_> {
    /// Greedy maximal-overlap matching of eigenvectors at `a` to those at `b`.
    /// Reports ambiguity when a competing match of comparable overlap carries
    /// a different eigenphase near zero.
    fn match_eigenvectors(&self, a: &Sample, b: &Sample) -> (Vec<usize>, bool) {
        let n = a.eig.len();
        let overlaps = a.eig.overlaps(&b.eig);
        let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        pairs.sort_by(|&(i1, j1), &(i2, j2)| {
            overlaps[(i2, j2)]
                .total_cmp(&overlaps[(i1, j1)])
                .then((i1, j1).cmp(&(i2, j2)))
        });
        let mut to = vec![usize::MAX; n];
        let mut taken = vec![false; n];
        for (i, j) in pairs {
            if to[i] == usize::MAX && !taken[j] {
                to[i] = j;
                taken[j] = true;
            }
        }

        let cluster_gap = 1e-6;
        let mut ambiguous = false;
        for i in 0..n {
            let j = to[i];
            let near_zero = a.eig.phases[i].abs() < FRAC_PI_2 || b.eig.phases[j].abs() < FRAC_PI_2;
            if !near_zero {
                continue;
            }
            let best = overlaps[(i, j)];
            for j2 in 0..n {
                if j2 == j || overlaps[(i, j2)] < self.opts.ambiguity_ratio * best {
                    continue;
                }
                if (b.eig.values[j] - b.eig.values[j2]).norm() > cluster_gap {
                    ambiguous = true;
                }
            }
        }
        (to, ambiguous)
    }

    fn scan(&mut self, a: &Sample, b: &Sample, depth: u32) -> Result<()> {
        let (to, mut ambiguous) = self.match_eigenvectors(a, b);
        let mut crossings = Vec::new();
        for (i, &j) in to.iter().enumerate() {
            let start = a.eig.phases[i];
            let end = unwrap_near(b.eig.phases[j], start);
            if (end - start).abs() > FRAC_PI_4 && (start.abs() < FRAC_PI_2 || end.abs() < FRAC_PI_2) {
                ambiguous = true;
            }
            let upward = start < 0.0 && end >= 0.0;
            let downward = start >= 0.0 && end < 0.0;
            if upward || downward {
                crossings.push((i, start, end, upward));
            }
        }

        if ambiguous {
            if depth < self.opts.max_refine_depth {
                self.stats.refinements += 1;
                let mid = sample(self.model, 0.5 * (a.k + b.k))?;
                self.scan(a, &mid, depth + 1)?;
                return self.scan(&mid, b, depth + 1);
            }
            self.stats.ambiguous_intervals += 1;
        }

        for (i, start, end, upward) in crossings {
            let v = a.eig.vectors.column(i).into_owned();
            let c = self.bisect(a.k, v, start, b.k, end, upward)?;
            self.candidates.push(c);
        }
        Ok(())
    }

    fn bisect(
        &mut self,
        mut lo: f64,
        mut v_lo: CVector,
        mut th_lo: f64,
        mut hi: f64,
        mut th_hi: f64,
        upward: bool,
    ) -> Result<Candidate> {
        let mut iterations = 0;
        while hi - lo > self.opts.tol_root * hi {
            iterations += 1;
            if iterations > 200 {
                return Err(Error::NonConvergent { lo, hi });
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let s = sample(self.model, mid)?;
            let proj = s.eig.vectors.adjoint() * &v_lo;
            let mut best = 0;
            let mut best_score = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for j in 0..s.eig.len() {
                let near = -(unwrap_near(s.eig.phases[j], th_lo) - th_lo).abs();
                let score = (proj[j].norm(), near);
                if score.0 > best_score.0 + 1e-12 || ((score.0 - best_score.0).abs() <= 1e-12 && score.1 > best_score.1)
                {
                    best = j;
                    best_score = score;
                }
            }
            let th_mid = unwrap_near(s.eig.phases[best], th_lo);
            if (th_mid < 0.0) == upward {
                lo = mid;
                th_lo = th_mid;
                v_lo = s.eig.vectors.column(best).into_owned();
            } else {
                hi = mid;
                th_hi = th_mid;
            }
        }
        self.stats.bisection_steps += iterations;
        let k = if th_hi != th_lo {
            (lo - th_lo * (hi - lo) / (th_hi - th_lo)).clamp(lo, hi)
        } else {
            0.5 * (lo + hi)
        };
        Ok(Candidate { k, lo, hi })
    }
}

fn grid(k_min: f64, k_max: f64, total_length: f64, q: f64) -> Vec<f64> {
    let step = PI / (q * total_length);
    let n = ((k_max - k_min) / step).ceil().max(1.0) as usize;
    (0..=n)
        .map(|i| {
            if i == n {
                k_max
            } else {
                k_min + (k_max - k_min) * i as f64 / n as f64
            }
        })
        .collect()
}

fn scan_chunk(model: &QuantumGraph, ks: &[f64], opts: &SolverOptions) -> Result<(Vec<Candidate>, SolverStats)> {
    let mut scanner = Scanner {
        model,
        opts,
        stats: SolverStats::default(),
        candidates: Vec::new(),
    };
    let mut prev = sample(model, ks[0])?;
    for &k in &ks[1..] {
        let next = sample(model, k)?;
        scanner.scan(&prev, &next, 0)?;
        prev = next;
    }
    Ok((scanner.candidates, scanner.stats))
}

/// All roots of the secular equation in `[k_min, k_max]`.
pub fn find_spectrum(model: &QuantumGraph, k_min: f64, k_max: f64, opts: &SolverOptions) -> Result<Spectrum> {
    if !(k_min.is_finite() && k_max.is_finite() && k_min > 0.0 && k_max > k_min) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < k_min < k_max, got [{k_min}, {k_max}]"
        )));
    }
    if !(opts.q.is_finite() && opts.q > 0.0 && opts.tol_root > 0.0) {
        return Err(Error::InvalidParameter(
            "grid oversampling and root tolerance must be positive".into(),
        ));
    }
    let ks = grid(k_min, k_max, model.graph().total_length(), opts.q);
    let intervals = ks.len() - 1;
    let jobs = opts.jobs.clamp(1, intervals);

    // chunk c covers grid points [bounds[c], bounds[c + 1]], sharing its last point with the next chunk
    let bounds: Vec<usize> = (0..=jobs).map(|c| c * intervals / jobs).collect();
    let results: Vec<Result<(Vec<Candidate>, SolverStats)>> = if jobs == 1 {
        vec![scan_chunk(model, &ks, opts)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..jobs)
                .map(|c| {
                    let slice = &ks[bounds[c]..=bounds[c + 1]];
                    scope.spawn(move || scan_chunk(model, slice, opts))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("solver thread panicked"))
                .collect()
        })
    };

    let mut candidates = Vec::new();
    let mut stats = SolverStats::default();
    for r in results {
        let (c, s) = r?;
        candidates.extend(c);
        stats.absorb(&s);
    }
    stats.grid_points = ks.len();

    candidates.sort_by(|a, b| a.k.total_cmp(&b.k));
    let mut roots = Vec::new();
    let mut start = 0;
    while start < candidates.len() {
        let mut end = start + 1;
        while end < candidates.len()
            && candidates[end].k - candidates[start].k <= opts.tol_cluster * candidates[start].k
        {
            end += 1;
        }
        roots.push(merge_cluster(model, &candidates[start..end], opts)?);
        start = end;
    }

    if opts.verify {
        for root in &mut roots {
            root.verification = Some(verify_eigenfunction_with(model, root.k, opts.null_tol)?);
        }
    }

    Ok(Spectrum {
        roots,
        k_range: (k_min, k_max),
        stats,
    })
}

fn merge_cluster(model: &QuantumGraph, cluster: &[Candidate], opts: &SolverOptions) -> Result<Root> {
    let k = cluster.iter().map(|c| c.k).sum::<f64>() / cluster.len() as f64;
    let lo = cluster.iter().map(|c| c.lo).fold(f64::INFINITY, f64::min);
    let hi = cluster.iter().map(|c| c.hi).fold(f64::NEG_INFINITY, f64::max);
    let width = cluster.last().unwrap().k - cluster[0].k;

    let s = sample(model, k)?;
    let near: Vec<f64> = s
        .eig
        .phases
        .iter()
        .map(|p| p.abs())
        .filter(|p| *p <= opts.phase_tol)
        .collect();
    let crossings = cluster.len();
    let multiplicity = crossings.max(near.len());
    Ok(Root {
        k,
        multiplicity,
        residual: cluster.iter().map(|c| (c.hi - c.lo) / c.k).fold(0.0, f64::max),
        phase_residual: near.iter().copied().fold(0.0, f64::max),
        bracket: (lo, hi),
        unresolved: near.len() != crossings || width > opts.tol_cluster * k / 10.0,
        verification: None,
    })
}

/// Orthonormal null directions of `I − U(k)`, with the smallest singular value.
pub fn null_vectors(model: &QuantumGraph, k: f64, null_tol: f64) -> Result<(Vec<CVector>, f64)> {
    let op = model.operator_at(k)?;
    let n = op.dimension();
    let m = identity(n) - &op.evolution;
    let svd = m.svd(false, true);
    let vt = svd.v_t.ok_or(Error::EigenFailure(k))?;
    let sv = &svd.singular_values;
    let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
    // `I − U` has norm at most 2, so the threshold is effectively relative
    let vectors: Vec<CVector> = (0..sv.len())
        .filter(|&i| sv[i] <= null_tol)
        .map(|i| vt.row(i).adjoint())
        .collect();
    if vectors.is_empty() {
        return Err(Error::NoNullDirection { k, smallest });
    }
    Ok((vectors, smallest))
}

/// Residuals of the vertex conditions for every null direction at `k`.
pub fn eigenfunction_residuals(model: &QuantumGraph, k: f64, null_tol: f64) -> Result<Vec<f64>> {
    let (vectors, _) = null_vectors(model, k, null_tol)?;
    vectors.iter().map(|c| model.vertex_residual(k, c)).collect()
}

fn verify_eigenfunction_with(model: &QuantumGraph, k: f64, null_tol: f64) -> Result<f64> {
    Ok(eigenfunction_residuals(model, k, null_tol)?
        .into_iter()
        .fold(0.0, f64::max))
}

/// Rebuilds the wavefunction(s) at `k` from the fixed vectors of `U(k)` and
/// returns the largest vertex-condition residual.
pub fn verify_eigenfunction(model: &QuantumGraph, k: f64) -> Result<f64> {
    verify_eigenfunction_with(model, k, SolverOptions::default().null_tol)
}
