//! Deterministic ±1 response functions on the circle, their projections
//! onto span{cos α/√π, sin α/√π}, and periodic trapezoid quadrature of
//! inner products over [0, 2π]^N.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{plane_vector, CorrelationTensor, PlaneVector};
use crate::error::{Error, Result};

/// Upper bound on the projection norm of any ±1 response: 4/√π.
pub fn projection_norm_bound() -> f64 {
    4.0 / PI.sqrt()
}

/// Largest breakpoint count drawn by [`ResponseFunction::random`].
pub const MAX_RANDOM_BREAKPOINTS: usize = 8;

pub const DEFAULT_EVALUATION_BUDGET: f64 = 1e8;
pub const MIN_NODES_PER_AXIS: usize = 8;

/// Piecewise-constant ±1 function of the local angle.
///
/// Takes `leading_sign` on [0, b_0), flips at every breakpoint, and (with
/// an even breakpoint count) returns to `leading_sign` on [b_last, 2π).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseFunction {
    breakpoints: Vec<f64>,
    leading_sign: f64,
}

impl ResponseFunction {
    pub fn new(breakpoints: Vec<f64>, leading_sign: f64) -> Result<Self> {
        if leading_sign != 1.0 && leading_sign != -1.0 {
            return Err(Error::InvalidResponse(format!(
                "leading sign must be ±1, got {leading_sign}"
            )));
        }
        if breakpoints.len() % 2 != 0 {
            return Err(Error::InvalidResponse(format!(
                "breakpoint count must be even, got {}",
                breakpoints.len()
            )));
        }
        if let Some(b) = breakpoints.iter().find(|b| !(0.0..TAU).contains(*b)) {
            return Err(Error::InvalidResponse(format!("breakpoint {b} is outside [0, 2π)")));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidResponse("breakpoints must be strictly increasing".into()));
        }
        Ok(Self {
            breakpoints,
            leading_sign,
        })
    }

    pub fn constant(sign: f64) -> Result<Self> {
        Self::new(Vec::new(), sign)
    }

    /// Breakpoint count uniform in {0, 2, …, 8}, positions uniform in
    /// [0, 2π), leading sign uniform.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let count = 2 * rng.random_range(0..=MAX_RANDOM_BREAKPOINTS / 2);
        loop {
            let mut breakpoints: Vec<f64> = (0..count).map(|_| rng.random_range(0.0..TAU)).collect();
            breakpoints.sort_by(f64::total_cmp);
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            if let Ok(r) = Self::new(breakpoints, sign) {
                return r;
            }
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn leading_sign(&self) -> f64 {
        self.leading_sign
    }

    pub fn value(&self, angle: f64) -> f64 {
        let a = angle.rem_euclid(TAU);
        let flips = self.breakpoints.partition_point(|b| *b <= a);
        if flips % 2 == 0 {
            self.leading_sign
        } else {
            -self.leading_sign
        }
    }

    pub fn negated(&self) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            leading_sign: -self.leading_sign,
        }
    }

    /// Closed-form ∫ I cos and ∫ I sin over one period.
    pub fn project(&self) -> FourierProjection {
        // Each interval contributes s·(sin e − sin s) and s·(cos s − cos e);
        // regrouped by breakpoint, with the 0 and 2π ends cancelling exactly.
        let mut a = 0.0;
        let mut b = 0.0;
        let mut sign_before = self.leading_sign;
        for &x in &self.breakpoints {
            let (s, c) = x.sin_cos();
            a += 2.0 * sign_before * s;
            b -= 2.0 * sign_before * c;
            sign_before = -sign_before;
        }
        FourierProjection::from_coefficients(a, b)
    }
}

/// Fourier coefficients of a response against cos α and sin α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierProjection {
    /// ∫₀^{2π} I(α) cos α dα
    pub a: f64,
    /// ∫₀^{2π} I(α) sin α dα
    pub b: f64,
    /// √(a² + b²)/√π
    pub norm: f64,
    /// Direction of (a, b) in [0, 2π); 0 when `beta_defined` is false.
    pub beta: f64,
    pub beta_defined: bool,
}

impl FourierProjection {
    pub fn from_coefficients(a: f64, b: f64) -> Self {
        let norm = a.hypot(b) / PI.sqrt();
        let beta_defined = norm > 0.0;
        let beta = if beta_defined { b.atan2(a).rem_euclid(TAU) } else { 0.0 };
        Self {
            a,
            b,
            norm,
            beta,
            beta_defined,
        }
    }

    /// (a, b) as a plane vector; the per-party factor of the inner product.
    pub fn coefficients(&self) -> PlaneVector {
        [self.a, self.b]
    }
}

/// α ↦ sgn(cos(α − ψ)), the response whose projection attains 4/√π.
pub fn saturating_response(psi: f64) -> ResponseFunction {
    let wrap = |x: f64| {
        let w = x.rem_euclid(TAU);
        if w >= TAU {
            0.0
        } else {
            w
        }
    };
    let mut breakpoints = vec![wrap(psi - FRAC_PI_2), wrap(psi + FRAC_PI_2)];
    breakpoints.sort_by(f64::total_cmp);
    // The function is −(sign on the middle interval) before b_0.
    let mid = 0.5 * (breakpoints[0] + breakpoints[1]);
    let leading_sign = if (mid - psi).cos() >= 0.0 { -1.0 } else { 1.0 };
    ResponseFunction {
        breakpoints,
        leading_sign,
    }
}

/// E_T(α) as a callable for quadrature.
pub fn correlation_function(tensor: &CorrelationTensor) -> impl Fn(&[f64]) -> f64 + Sync + '_ {
    move |angles: &[f64]| {
        let vectors: Vec<PlaneVector> = angles.iter().map(|a| plane_vector(*a)).collect();
        tensor
            .contract(&vectors)
            .expect("angle count must match the tensor")
    }
}

fn check_nodes(nodes_per_axis: usize) -> Result<()> {
    if nodes_per_axis < MIN_NODES_PER_AXIS {
        Err(Error::Domain {
            name: "nodes_per_axis",
            value: nodes_per_axis as f64,
            range: "[8, ∞)",
        })
    } else {
        Ok(())
    }
}

/// Tensor-product periodic trapezoid rule for ∫…∫ f·g over [0, 2π]^N.
/// Exact for trigonometric polynomials of per-axis degree below
/// `nodes_per_axis / 2`.
pub fn quadrature_inner_product<F, G>(f: F, g: G, n_parties: usize, nodes_per_axis: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
    G: Fn(&[f64]) -> f64 + Sync,
{
    quadrature_inner_product_with_budget(f, g, n_parties, nodes_per_axis, DEFAULT_EVALUATION_BUDGET)
}

pub fn quadrature_inner_product_with_budget<F, G>(
    f: F,
    g: G,
    n_parties: usize,
    nodes_per_axis: usize,
    budget: f64,
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
    G: Fn(&[f64]) -> f64 + Sync,
{
    check_nodes(nodes_per_axis)?;
    if n_parties == 0 {
        return Err(Error::InvalidSize { n: 0, max: usize::MAX });
    }
    let required = (nodes_per_axis as f64).powi(n_parties as i32);
    if required > budget {
        return Err(Error::QuadratureBudget { required, budget });
    }
    let m = nodes_per_axis;
    let step = TAU / m as f64;
    let inner = m.pow(n_parties as u32 - 1);
    // Partial sums per first-axis node, then a fixed-order total.
    let partials: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|first| {
            let mut angles = vec![0.0; n_parties];
            angles[0] = step * first as f64;
            let mut acc = 0.0;
            for rest in 0..inner {
                let mut r = rest;
                for a in angles.iter_mut().skip(1) {
                    *a = step * (r % m) as f64;
                    r /= m;
                }
                acc += f(&angles) * g(&angles);
            }
            acc
        })
        .collect();
    Ok(partials.iter().sum::<f64>() * step.powi(n_parties as i32))
}

/// A function of the form Π_j h_j(α_j).
pub struct PartyProduct<'a> {
    factors: Vec<Box<dyn Fn(f64) -> f64 + Sync + 'a>>,
}

impl<'a> PartyProduct<'a> {
    pub fn new(factors: Vec<Box<dyn Fn(f64) -> f64 + Sync + 'a>>) -> Self {
        Self { factors }
    }

    pub fn n_parties(&self) -> usize {
        self.factors.len()
    }

    pub fn evaluate(&self, angles: &[f64]) -> f64 {
        self.factors.iter().zip(angles).map(|(h, a)| h(*a)).product()
    }
}

/// Inner product of two per-party products as a product of 1-D periodic
/// trapezoid sums; no evaluation budget applies.
pub fn factorized_quadrature_inner_product(
    f: &PartyProduct<'_>,
    g: &PartyProduct<'_>,
    nodes_per_axis: usize,
) -> Result<f64> {
    check_nodes(nodes_per_axis)?;
    if f.n_parties() != g.n_parties() {
        return Err(Error::Shape {
            expected: f.n_parties(),
            got: g.n_parties(),
        });
    }
    let step = TAU / nodes_per_axis as f64;
    Ok(f
        .factors
        .iter()
        .zip(&g.factors)
        .map(|(hf, hg)| {
            (0..nodes_per_axis)
                .map(|k| {
                    let a = step * k as f64;
                    hf(a) * hg(a)
                })
                .sum::<f64>()
                * step
        })
        .product())
}
