//! Local realistic models as finite mixtures of deterministic strategies,
//! their inner product with a tensor-form correlation function, and checks
//! of the bound (E_LR, E) ≤ 4^N·T_max.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{contract_all, CorrelationTensor, PlaneVector};
use crate::error::{Error, Result};
use crate::functional_space::{saturating_response, ResponseFunction};
use crate::tensor_analysis::{sum_of_squares, t_max, TMaxConfig, TMaxResult};

/// Slack on the bound when checking sampled ensembles.
pub const BOUND_TOL: f64 = 1e-8;
/// Slack on Σ T² ≤ 1 so that the boundary itself counts as satisfied.
pub const TWO_SETTING_TOL: f64 = 1e-12;
const WEIGHT_SUM_TOL: f64 = 1e-12;

/// One hidden-variable value: a response function per party.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterministicStrategy {
    responses: Vec<ResponseFunction>,
}

impl DeterministicStrategy {
    pub fn new(responses: Vec<ResponseFunction>) -> Self {
        Self { responses }
    }

    pub fn random<R: Rng + ?Sized>(n_parties: usize, rng: &mut R) -> Self {
        Self::new((0..n_parties).map(|_| ResponseFunction::random(rng)).collect())
    }

    pub fn n_parties(&self) -> usize {
        self.responses.len()
    }

    pub fn responses(&self) -> &[ResponseFunction] {
        &self.responses
    }

    /// Same strategy with party `party`'s outcomes flipped.
    pub fn with_party_negated(&self, party: usize) -> Self {
        let mut responses = self.responses.clone();
        responses[party] = responses[party].negated();
        Self { responses }
    }

    /// Product of outcomes at the given angles.
    pub fn outcome(&self, angles: &[f64]) -> f64 {
        self.responses.iter().zip(angles).map(|(r, a)| r.value(*a)).product()
    }

    /// (a_j, b_j) for each party.
    pub fn coefficients(&self) -> Vec<PlaneVector> {
        self.responses.iter().map(|r| r.project().coefficients()).collect()
    }
}

/// Finite distribution ρ(λ) over deterministic strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LhvEnsemble {
    strategies: Vec<DeterministicStrategy>,
    weights: Vec<f64>,
}

impl LhvEnsemble {
    pub fn new(strategies: Vec<DeterministicStrategy>, weights: Vec<f64>) -> Result<Self> {
        if strategies.is_empty() {
            return Err(Error::InvalidEnsemble("no strategies".into()));
        }
        if strategies.len() != weights.len() {
            return Err(Error::Shape {
                expected: strategies.len(),
                got: weights.len(),
            });
        }
        let n = strategies[0].n_parties();
        if let Some(s) = strategies.iter().find(|s| s.n_parties() != n) {
            return Err(Error::Shape {
                expected: n,
                got: s.n_parties(),
            });
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::InvalidEnsemble("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { strategies, weights })
    }

    pub fn single(strategy: DeterministicStrategy) -> Self {
        Self {
            strategies: vec![strategy],
            weights: vec![1.0],
        }
    }

    /// Between 1 and `max_members` random strategies with normalized
    /// uniform weights.
    pub fn random<R: Rng + ?Sized>(n_parties: usize, max_members: usize, rng: &mut R) -> Self {
        let members = rng.random_range(1..=max_members.max(1));
        let strategies = (0..members)
            .map(|_| DeterministicStrategy::random(n_parties, rng))
            .collect();
        let raw: Vec<f64> = (0..members).map(|_| rng.random_range(0.0..1.0) + f64::EPSILON).collect();
        let total: f64 = raw.iter().sum();
        Self {
            strategies,
            weights: raw.iter().map(|w| w / total).collect(),
        }
    }

    pub fn strategies(&self) -> &[DeterministicStrategy] {
        &self.strategies
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_parties(&self) -> usize {
        self.strategies[0].n_parties()
    }

    /// E_LR at the given angles.
    pub fn correlation(&self, angles: &[f64]) -> f64 {
        self.strategies
            .iter()
            .zip(&self.weights)
            .map(|(s, w)| w * s.outcome(angles))
            .sum()
    }
}

/// (E_LR, E) for one strategy: Σ_i T_i Π_j f_j^{i_j} with f_j = (a_j, b_j).
pub fn lr_inner_product(strategy: &DeterministicStrategy, tensor: &CorrelationTensor) -> Result<f64> {
    if strategy.n_parties() != tensor.n_parties() {
        return Err(Error::Shape {
            expected: tensor.n_parties(),
            got: strategy.n_parties(),
        });
    }
    Ok(contract_all(tensor.entries(), &strategy.coefficients()))
}

pub fn ensemble_inner_product(ensemble: &LhvEnsemble, tensor: &CorrelationTensor) -> Result<f64> {
    ensemble
        .strategies
        .iter()
        .zip(&ensemble.weights)
        .map(|(s, w)| lr_inner_product(s, tensor).map(|v| w * v))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalStrategy {
    pub strategy: DeterministicStrategy,
    pub value: f64,
    pub t_max: TMaxResult,
}

/// Aligns every party's response with the T_max maximizer, which attains
/// 4^N·T_max.
pub fn optimal_strategy(tensor: &CorrelationTensor, config: &TMaxConfig) -> Result<OptimalStrategy> {
    let tm = t_max(tensor, config)?;
    let strategy = DeterministicStrategy::new(tm.angles().into_iter().map(saturating_response).collect());
    let value = lr_inner_product(&strategy, tensor)?;
    Ok(OptimalStrategy {
        strategy,
        value,
        t_max: tm,
    })
}

pub fn bound(tensor: &CorrelationTensor, tm: &TMaxResult) -> f64 {
    4f64.powi(tensor.n_parties() as i32) * tm.value
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheckConfig {
    pub trials: usize,
    pub seed: u64,
    /// Strategies per sampled ensemble are uniform in 1..=max_members.
    pub max_members: usize,
    /// Also score the saturating strategy from [`optimal_strategy`].
    pub include_optimal: bool,
    pub t_max: TMaxConfig,
}

impl BoundCheckConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            max_members: 4,
            include_optimal: false,
            t_max: TMaxConfig::default().with_seed(seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n_parties: usize,
    pub trials: usize,
    pub seed: u64,
    pub max_found: f64,
    pub bound: f64,
    pub t_max: f64,
    /// max_found / bound, absent when the bound is 0.
    pub ratio: Option<f64>,
    pub violations: usize,
    pub certified: bool,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

pub fn verify_bound(tensor: &CorrelationTensor, trial_count: usize, seed: u64) -> Result<BoundReport> {
    verify_bound_with(tensor, &BoundCheckConfig::new(trial_count, seed))
}

/// Samples random ensembles and compares each (E_LR, E) with 4^N·T_max.
/// Trial `k` draws from its own stream of the seed, so the report does not
/// depend on how trials are spread over threads.
pub fn verify_bound_with(tensor: &CorrelationTensor, config: &BoundCheckConfig) -> Result<BoundReport> {
    if config.trials == 0 {
        return Err(Error::Domain {
            name: "trials",
            value: 0.0,
            range: "[1, ∞)",
        });
    }
    let n = tensor.n_parties();
    let tm = t_max(tensor, &config.t_max)?;
    let limit = bound(tensor, &tm);

    let mut values: Vec<f64> = (0..config.trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(k as u64);
            let ensemble = LhvEnsemble::random(n, config.max_members, &mut rng);
            ensemble_inner_product(&ensemble, tensor)
        })
        .collect::<Result<_>>()?;
    if config.include_optimal {
        let strategy = DeterministicStrategy::new(tm.angles().into_iter().map(saturating_response).collect());
        values.push(lr_inner_product(&strategy, tensor)?);
    }

    let max_found = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let violations = values.iter().filter(|v| **v > limit + BOUND_TOL).count();
    Ok(BoundReport {
        n_parties: n,
        trials: values.len(),
        seed: config.seed,
        max_found,
        bound: limit,
        t_max: tm.value,
        ratio: (limit > 0.0).then(|| max_found / limit),
        violations,
        certified: tm.certified,
    })
}

/// Σ T² ≤ 1: an explicit local realistic model of the 2^N measured
/// two-setting correlations exists.
pub fn two_setting_model_exists(tensor: &CorrelationTensor) -> bool {
    sum_of_squares(tensor) <= 1.0 + TWO_SETTING_TOL
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlation::ghz_planar_tensor;
    use crate::functional_space::quadrature_inner_product;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn all_saturating(n: usize, psi: f64) -> DeterministicStrategy {
        DeterministicStrategy::new(vec![saturating_response(psi); n])
    }

    #[test]
    fn saturating_ghz2() {
        let t = ghz_planar_tensor(2, 1.0).unwrap();
        let v = lr_inner_product(&all_saturating(2, 0.0), &t).unwrap();
        assert_abs_diff_eq!(v, 16.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_tensor_and_constant_response() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = DeterministicStrategy::random(3, &mut rng);
        assert_eq!(lr_inner_product(&s, &CorrelationTensor::zeros(3).unwrap()).unwrap(), 0.0);
        let mut responses = s.responses().to_vec();
        responses[1] = ResponseFunction::constant(-1.0).unwrap();
        let with_const = DeterministicStrategy::new(responses);
        let t = CorrelationTensor::new(3, vec![0.2, -0.3, 0.5, 0.9, -1.0, 0.1, 0.0, 0.7]).unwrap();
        assert_eq!(lr_inner_product(&with_const, &t).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_matches_direct_integral() {
        // Oracle: dense midpoint quadrature of the ±1 product against E_T.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = CorrelationTensor::new(2, vec![0.4, -0.2, 0.7, -0.5]).unwrap();
        let e = crate::functional_space::correlation_function(&t);
        for _ in 0..3 {
            let s = DeterministicStrategy::random(2, &mut rng);
            let closed = lr_inner_product(&s, &t).unwrap();
            let m = 2000;
            let h = 2.0 * PI / m as f64;
            let mut direct = 0.0;
            for i in 0..m {
                for k in 0..m {
                    let a = [(i as f64 + 0.5) * h, (k as f64 + 0.5) * h];
                    direct += s.outcome(&a) * e(&a);
                }
            }
            direct *= h * h;
            assert_abs_diff_eq!(closed, direct, epsilon = 2e-2);
        }
    }

    #[test]
    fn single_member_and_sign_flip_mixture() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = CorrelationTensor::new(2, vec![0.4, -0.2, 0.7, -0.5]).unwrap();
        let s = DeterministicStrategy::random(2, &mut rng);
        let single = LhvEnsemble::single(s.clone());
        assert_eq!(
            ensemble_inner_product(&single, &t).unwrap(),
            lr_inner_product(&s, &t).unwrap()
        );
        let flipped = s.with_party_negated(1);
        let mix = LhvEnsemble::new(vec![s, flipped], vec![0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(ensemble_inner_product(&mix, &t).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(mix.correlation(&[0.3, 1.9]), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn ensemble_validation() {
        let s = all_saturating(2, 0.0);
        assert!(LhvEnsemble::new(vec![], vec![]).is_err());
        assert!(LhvEnsemble::new(vec![s.clone()], vec![0.9]).is_err());
        assert!(LhvEnsemble::new(vec![s.clone(), s.clone()], vec![1.5, -0.5]).is_err());
        assert!(LhvEnsemble::new(vec![s.clone()], vec![0.5, 0.5]).is_err());
        assert!(LhvEnsemble::new(vec![s.clone(), all_saturating(3, 0.0)], vec![0.5, 0.5]).is_err());
        let e = LhvEnsemble::single(s);
        assert!(ensemble_inner_product(&e, &CorrelationTensor::zeros(3).unwrap()).is_err());
    }

    #[test]
    fn ghz4_random_ensembles_below_bound() {
        let t = ghz_planar_tensor(4, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..500 {
            let e = LhvEnsemble::random(4, 4, &mut rng);
            assert!(ensemble_inner_product(&e, &t).unwrap() <= 128.0 + BOUND_TOL);
        }
    }

    #[test]
    fn optimal_strategy_examples() {
        let cfg = TMaxConfig::default();
        let o = optimal_strategy(&ghz_planar_tensor(2, 1.0).unwrap(), &cfg).unwrap();
        assert_abs_diff_eq!(o.value, 16.0, epsilon = 1e-10);
        let o = optimal_strategy(&CorrelationTensor::zeros(3).unwrap(), &cfg).unwrap();
        assert_eq!(o.value, 0.0);
        let o = optimal_strategy(&ghz_planar_tensor(4, 0.5).unwrap(), &cfg).unwrap();
        assert_abs_diff_eq!(o.value, 128.0, epsilon = 1e-8);
    }

    #[test]
    fn verify_bound_examples() {
        let z = verify_bound(&CorrelationTensor::zeros(2).unwrap(), 50, 0).unwrap();
        assert_eq!((z.max_found, z.bound, z.ratio), (0.0, 0.0, None));
        assert!(z.holds());

        let t = ghz_planar_tensor(3, 1.0).unwrap();
        let cfg = BoundCheckConfig {
            include_optimal: true,
            ..BoundCheckConfig::new(2000, 4)
        };
        let r = verify_bound_with(&t, &cfg).unwrap();
        assert!(r.holds());
        assert!(r.max_found <= 64.0 + BOUND_TOL);
        assert!(r.max_found >= 0.99 * 64.0);
        assert_eq!(r.trials, 2001);

        assert!(verify_bound(&t, 0, 0).is_err());
    }

    #[test]
    fn verify_bound_is_thread_count_independent() {
        let t = CorrelationTensor::new(3, vec![0.2, -0.3, 0.5, 0.9, -1.0, 0.1, 0.0, 0.7]).unwrap();
        let a = verify_bound(&t, 300, 17).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| verify_bound(&t, 300, 17).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn two_setting_examples() {
        assert!(two_setting_model_exists(&ghz_planar_tensor(4, 0.35).unwrap()));
        assert!(!two_setting_model_exists(&ghz_planar_tensor(4, 0.36).unwrap()));
        assert!(two_setting_model_exists(&CorrelationTensor::zeros(4).unwrap()));
        for n in 1..=12 {
            let v = 1.0 / 2f64.powi(n - 1).sqrt();
            assert!(two_setting_model_exists(&ghz_planar_tensor(n as usize, v).unwrap()));
        }
    }

    #[test]
    fn quadrature_agrees_for_smooth_part() {
        // (E_LR, E) only sees the S⁽²⁾ projection: replacing each response
        // by its projection (a cos + b sin)/π gives the same inner product.
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let t = CorrelationTensor::new(2, vec![0.4, -0.2, 0.7, -0.5]).unwrap();
        let s = DeterministicStrategy::random(2, &mut rng);
        let coeffs = s.coefficients();
        let smooth = |a: &[f64]| {
            coeffs
                .iter()
                .zip(a)
                .map(|(c, x)| (c[0] * x.cos() + c[1] * x.sin()) / PI)
                .product::<f64>()
        };
        let e = crate::functional_space::correlation_function(&t);
        let q = quadrature_inner_product(smooth, &e, 2, 16).unwrap();
        assert_abs_diff_eq!(q, lr_inner_product(&s, &t).unwrap(), epsilon = 1e-12);
    }
}
