//! Maximal tensor component over product unit vectors, the planar sum of
//! squares, and closed-form functional inner products of tensor-form
//! correlation functions.
//!
//! T_max is found by alternating maximization: with every party but `j`
//! fixed the objective is linear in d_j, so d_j = g_j/‖g_j‖ where g_j is the
//! partial contraction. Sweeps never decrease the objective. A batch of
//! seeded starts runs in parallel and is reduced in start order, so results
//! do not depend on the thread count. For small N the result is checked
//! against an exhaustive angle grid.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{contract_all, contract_except, plane_vector, CorrelationTensor, PlaneVector};
use crate::error::{Error, Result};

/// Slack allowed between the grid-refined optimum and the multistart optimum.
pub const CERTIFICATION_TOL: f64 = 1e-9;

const TIE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TMaxConfig {
    pub seed: u64,
    /// Seeded random starts, in addition to the axis-aligned ones.
    pub random_starts: usize,
    pub max_sweeps: usize,
    /// A start stops once a sweep improves the objective by less than this.
    pub tolerance: f64,
    /// Grid points per angle for the exhaustive check.
    pub grid_points: usize,
    /// The grid check runs only up to this many parties.
    pub grid_max_parties: usize,
}

impl Default for TMaxConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            random_starts: 64,
            max_sweeps: 1000,
            tolerance: 1e-13,
            grid_points: 48,
            grid_max_parties: 4,
        }
    }
}

impl TMaxConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_random_starts(mut self, starts: usize) -> Self {
        self.random_starts = starts;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TMaxResult {
    pub value: f64,
    /// One unit 2-vector per party.
    pub maximizer: Vec<PlaneVector>,
    /// Sweeps used by the winning start.
    pub iterations: usize,
    pub starts_used: usize,
    /// The winning start converged and, when a grid check ran, the grid agreed.
    pub certified: bool,
    pub grid_checked: bool,
}

impl TMaxResult {
    /// Angles of the maximizing vectors, in [0, 2π).
    pub fn angles(&self) -> Vec<f64> {
        self.maximizer
            .iter()
            .map(|d| d[1].atan2(d[0]).rem_euclid(TAU))
            .collect()
    }
}

#[derive(Debug, Clone)]
struct Ascent {
    value: f64,
    vectors: Vec<PlaneVector>,
    sweeps: usize,
    converged: bool,
}

fn ascend(entries: &[f64], mut vectors: Vec<PlaneVector>, max_sweeps: usize, tol: f64) -> Ascent {
    let n = vectors.len();
    let mut value = contract_all(entries, &vectors);
    for sweep in 1..=max_sweeps {
        for j in 0..n {
            let g = contract_except(entries, &vectors, j);
            let norm = g[0].hypot(g[1]);
            // g = 0: every d_j is optimal, keep the current one.
            if norm > 0.0 {
                vectors[j] = [g[0] / norm, g[1] / norm];
            }
        }
        let next = contract_all(entries, &vectors);
        let improvement = next - value;
        value = value.max(next);
        if improvement < tol {
            return Ascent {
                value: contract_all(entries, &vectors),
                vectors,
                sweeps: sweep,
                converged: true,
            };
        }
    }
    Ascent {
        value: contract_all(entries, &vectors),
        vectors,
        sweeps: max_sweeps,
        converged: false,
    }
}

/// Start vectors in a fixed order: the dominant basis component, the 2N
/// axis-aligned patterns, then seeded random angles.
fn starting_points(tensor: &CorrelationTensor, config: &TMaxConfig) -> Vec<Vec<PlaneVector>> {
    let n = tensor.n_parties();
    let x = [1.0, 0.0];
    let y = [0.0, 1.0];
    let mut starts = Vec::with_capacity(1 + 2 * n + config.random_starts);

    let (best_key, best_val) = tensor
        .entries()
        .iter()
        .enumerate()
        .fold((0usize, 0.0f64), |acc, (k, v)| if v.abs() > acc.1.abs() { (k, *v) } else { acc });
    let mut corner: Vec<PlaneVector> = (0..n).map(|j| if (best_key >> j) & 1 == 0 { x } else { y }).collect();
    if best_val < 0.0 {
        corner[0] = [-corner[0][0], -corner[0][1]];
    }
    starts.push(corner);

    for j in 0..n {
        starts.push((0..n).map(|k| if k == j { y } else { x }).collect());
    }
    for j in 0..n {
        starts.push((0..n).map(|k| if k == j { x } else { y }).collect());
    }

    for s in 0..config.random_starts {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(s as u64);
        starts.push((0..n).map(|_| plane_vector(rng.random_range(0.0..TAU))).collect());
    }
    starts
}

/// Best point of a grid over parties 1..N−1, with the last party set in
/// closed form (its optimum is g/‖g‖, worth ‖g‖). Angles span [0, π): a sign
/// flip of any grid party is absorbed by the last one.
fn grid_search(entries: &[f64], n: usize, points: usize) -> Vec<PlaneVector> {
    let grid_parties = n - 1;
    let step = PI / points as f64;
    let total = points.pow(grid_parties as u32);
    let best = (0..total)
        .into_par_iter()
        .map(|code| {
            let mut vectors: Vec<PlaneVector> = (0..grid_parties)
                .map(|j| plane_vector(step * ((code / points.pow(j as u32)) % points) as f64))
                .collect();
            vectors.push([1.0, 0.0]);
            let g = contract_except(entries, &vectors, n - 1);
            (code, g[0].hypot(g[1]))
        })
        .reduce(
            || (usize::MAX, f64::NEG_INFINITY),
            |a, b| if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a },
        );
    let mut vectors: Vec<PlaneVector> = (0..grid_parties)
        .map(|j| plane_vector(step * ((best.0 / points.pow(j as u32)) % points) as f64))
        .collect();
    vectors.push([1.0, 0.0]);
    let g = contract_except(entries, &vectors, n - 1);
    let norm = g[0].hypot(g[1]);
    if norm > 0.0 {
        vectors[n - 1] = [g[0] / norm, g[1] / norm];
    }
    vectors
}

/// max over unit 2-vectors d_j of Σ_i T_i Π_j d_j^{i_j}.
pub fn t_max(tensor: &CorrelationTensor, config: &TMaxConfig) -> Result<TMaxResult> {
    if config.grid_points < 2 {
        return Err(Error::Domain {
            name: "grid_points",
            value: config.grid_points as f64,
            range: "[2, ∞)",
        });
    }
    if !(config.tolerance >= 0.0) {
        return Err(Error::Domain {
            name: "tolerance",
            value: config.tolerance,
            range: "[0, ∞)",
        });
    }
    let entries = tensor.entries();
    let n = tensor.n_parties();
    let starts = starting_points(tensor, config);
    let starts_used = starts.len();

    let runs: Vec<Ascent> = starts
        .into_par_iter()
        .map(|s| ascend(entries, s, config.max_sweeps, config.tolerance))
        .collect();
    // Later starts win only by more than roundoff, so ties go to the
    // earliest start.
    let mut best = runs
        .into_iter()
        .reduce(|a, b| if b.value > a.value + TIE_TOL * a.value.abs().max(1.0) { b } else { a })
        .expect("at least one start");

    let mut certified = best.converged;
    let grid_checked = n <= config.grid_max_parties;
    if grid_checked {
        let seed = grid_search(entries, n, config.grid_points);
        let refined = ascend(entries, seed, config.max_sweeps, config.tolerance);
        if refined.value > best.value + CERTIFICATION_TOL {
            certified = false;
        }
        if refined.value > best.value {
            best = refined;
        }
    }

    Ok(TMaxResult {
        value: best.value,
        maximizer: best.vectors,
        iterations: best.sweeps,
        starts_used,
        certified,
        grid_checked,
    })
}

/// Neumaier-compensated sum.
fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let t = sum + v;
        carry += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + carry
}

/// Σ_i T_i² over the 2^N planar entries.
pub fn sum_of_squares(tensor: &CorrelationTensor) -> f64 {
    compensated_sum(tensor.entries().iter().map(|v| v * v))
}

/// ∫…∫ E_a·E_b over [0, 2π]^N = π^N Σ_i T_i T′_i, using ∫ c^i c^{i′} = π δ_{ii′}.
pub fn analytic_inner_product(a: &CorrelationTensor, b: &CorrelationTensor) -> Result<f64> {
    if a.n_parties() != b.n_parties() {
        return Err(Error::Shape {
            expected: a.n_parties(),
            got: b.n_parties(),
        });
    }
    let dot = compensated_sum(a.entries().iter().zip(b.entries()).map(|(x, y)| x * y));
    Ok(pi_power(a.n_parties()) * dot)
}

/// π^N by repeated multiplication.
pub fn pi_power(n: usize) -> f64 {
    (0..n).fold(1.0, |acc, _| acc * PI)
}
