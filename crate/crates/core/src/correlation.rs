//! Planar correlation tensors and the rotationally invariant correlation
//! function built from them.
//!
//! A tensor entry T_{i1…iN} (each i_j ∈ {1, 2}) is stored at an integer key
//! whose bit `j` belongs to party `j + 1`: bit value 0 stands for index 1
//! (local x axis), bit value 1 for index 2 (local y axis).

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};
use crate::state_kit::{DensityMatrix, PauliAxis, StateVector};

/// Largest N accepted for a planar tensor (2^N entries).
pub const MAX_TENSOR_PARTIES: usize = 24;

const ENTRY_TOL: f64 = 1e-9;

/// A unit vector (cos α, sin α) in a party's measurement plane.
pub type PlaneVector = [f64; 2];

pub fn plane_vector(angle: f64) -> PlaneVector {
    let (s, c) = angle.sin_cos();
    [c, s]
}

/// Converts a key to its multi-index digits, e.g. `0b1100` at N=4 → `"1122"`.
pub fn key_to_digits(key: usize, n_parties: usize) -> String {
    (0..n_parties)
        .map(|j| if (key >> j) & 1 == 0 { '1' } else { '2' })
        .collect()
}

pub fn digits_to_key(digits: &str) -> Option<usize> {
    digits.chars().enumerate().try_fold(0usize, |key, (j, c)| match c {
        '1' => Some(key),
        '2' => Some(key | (1 << j)),
        _ => None,
    })
}

/// Real tensor with 2^N entries indexed by {1,2}^N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TensorDoc", into = "TensorDoc")]
pub struct CorrelationTensor {
    n_parties: usize,
    entries: Vec<f64>,
}

impl CorrelationTensor {
    pub fn new(n_parties: usize, entries: Vec<f64>) -> Result<Self> {
        check_tensor_parties(n_parties)?;
        let len = 1usize << n_parties;
        if entries.len() != len {
            return Err(Error::Shape {
                expected: len,
                got: entries.len(),
            });
        }
        if let Some((key, v)) = entries
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || v.abs() > 1.0 + ENTRY_TOL)
        {
            return Err(Error::InvalidTensor(format!(
                "entry {} = {v} is outside [-1, 1]",
                key_to_digits(key, n_parties)
            )));
        }
        Ok(Self { n_parties, entries })
    }

    pub fn zeros(n_parties: usize) -> Result<Self> {
        check_tensor_parties(n_parties)?;
        Ok(Self {
            n_parties,
            entries: vec![0.0; 1 << n_parties],
        })
    }

    /// Builds a tensor from `(digits, value)` pairs; missing entries are 0.
    pub fn from_components<'a, I>(n_parties: usize, components: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        check_tensor_parties(n_parties)?;
        let mut entries = vec![0.0; 1usize << n_parties];
        for (digits, value) in components {
            let key = digits_to_key(digits)
                .filter(|_| digits.chars().count() == n_parties)
                .ok_or_else(|| {
                    Error::InvalidTensor(format!(
                        "multi-index {digits:?} is not {n_parties} digits from {{1, 2}}"
                    ))
                })?;
            entries[key] = value;
        }
        Self::new(n_parties, entries)
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn entry(&self, key: usize) -> f64 {
        self.entries[key]
    }

    /// Entry at a multi-index written as digits, e.g. `"1122"`.
    pub fn get(&self, digits: &str) -> Option<f64> {
        if digits.chars().count() != self.n_parties {
            return None;
        }
        digits_to_key(digits).map(|k| self.entries[k])
    }

    /// Σ T_i · Π_j v_j^{i_j} for arbitrary 2-vectors v_j.
    pub fn contract(&self, vectors: &[PlaneVector]) -> Result<f64> {
        self.check_len(vectors.len())?;
        Ok(contract_all(&self.entries, vectors))
    }

    /// Contraction over every party except `skip`, leaving a 2-vector.
    pub fn partial_contraction(&self, vectors: &[PlaneVector], skip: usize) -> Result<PlaneVector> {
        self.check_len(vectors.len())?;
        if skip >= self.n_parties {
            return Err(Error::Shape {
                expected: self.n_parties,
                got: skip + 1,
            });
        }
        Ok(contract_except(&self.entries, vectors, skip))
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.n_parties,
            self.entries.iter().map(|v| v * factor).collect(),
        )
    }

    /// Counter-rotates mode `party` so that evaluating the result at α
    /// equals evaluating `self` at α with α_party shifted by `angle`.
    pub fn rotate_party(&self, party: usize, angle: f64) -> Result<Self> {
        if party >= self.n_parties {
            return Err(Error::Shape {
                expected: self.n_parties,
                got: party + 1,
            });
        }
        let (s, c) = angle.sin_cos();
        let bit = 1usize << party;
        let mut out = self.entries.clone();
        for key in (0..self.entries.len()).filter(|k| k & bit == 0) {
            let t1 = self.entries[key];
            let t2 = self.entries[key | bit];
            // n(α + δ) = R(δ)·n(α); fold Rᵀ into the tensor.
            out[key] = c * t1 + s * t2;
            out[key | bit] = -s * t1 + c * t2;
        }
        Ok(Self {
            n_parties: self.n_parties,
            entries: out,
        })
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.iter().map(|v| v.abs()).sum()
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.iter().filter(|v| **v != 0.0).count()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.n_parties {
            Err(Error::Shape {
                expected: self.n_parties,
                got,
            })
        } else {
            Ok(())
        }
    }
}

fn check_tensor_parties(n: usize) -> Result<()> {
    if n == 0 || n > MAX_TENSOR_PARTIES {
        Err(Error::InvalidSize {
            n,
            max: MAX_TENSOR_PARTIES,
        })
    } else {
        Ok(())
    }
}

/// Folds out the highest remaining party: out[k] = v0·e[k] + v1·e[k + half].
fn fold_top(buf: &mut Vec<f64>, v: PlaneVector) {
    let half = buf.len() / 2;
    for k in 0..half {
        buf[k] = v[0] * buf[k] + v[1] * buf[k + half];
    }
    buf.truncate(half);
}

/// Folds out the lowest remaining party: out[k] = v0·e[2k] + v1·e[2k + 1].
fn fold_bottom(buf: &mut Vec<f64>, v: PlaneVector) {
    let half = buf.len() / 2;
    for k in 0..half {
        buf[k] = v[0] * buf[2 * k] + v[1] * buf[2 * k + 1];
    }
    buf.truncate(half);
}

pub(crate) fn contract_all(entries: &[f64], vectors: &[PlaneVector]) -> f64 {
    let mut buf = entries.to_vec();
    for v in vectors.iter().rev() {
        fold_top(&mut buf, *v);
    }
    buf[0]
}

pub(crate) fn contract_except(entries: &[f64], vectors: &[PlaneVector], skip: usize) -> PlaneVector {
    let mut buf = entries.to_vec();
    for v in vectors[skip + 1..].iter().rev() {
        fold_top(&mut buf, *v);
    }
    for v in &vectors[..skip] {
        fold_bottom(&mut buf, *v);
    }
    [buf[0], buf[1]]
}

#[derive(Serialize, Deserialize)]
struct TensorDoc {
    n: usize,
    entries: BTreeMap<String, f64>,
}

impl From<CorrelationTensor> for TensorDoc {
    fn from(t: CorrelationTensor) -> Self {
        let entries = t
            .entries
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(k, v)| (key_to_digits(k, t.n_parties), *v))
            .collect();
        TensorDoc {
            n: t.n_parties,
            entries,
        }
    }
}

impl TryFrom<TensorDoc> for CorrelationTensor {
    type Error = Error;

    fn try_from(doc: TensorDoc) -> Result<Self> {
        CorrelationTensor::from_components(
            doc.n,
            doc.entries.iter().map(|(k, v)| (k.as_str(), *v)),
        )
    }
}

/// Measurement angles α_j, one per party, in radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleSettings(pub Vec<f64>);

impl AngleSettings {
    pub fn new(angles: Vec<f64>) -> Self {
        Self(angles)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn angles(&self) -> &[f64] {
        &self.0
    }

    pub fn plane_vectors(&self) -> Vec<PlaneVector> {
        self.0.iter().map(|a| plane_vector(*a)).collect()
    }

    /// Equality of every angle modulo 2π, within `tol`.
    pub fn eq_mod_2pi(&self, other: &Self, tol: f64) -> bool {
        self.len() == other.len()
            && self.0.iter().zip(&other.0).all(|(a, b)| {
                let d = (a - b).rem_euclid(TAU);
                d.min(TAU - d) <= tol
            })
    }
}

/// E(α) = Σ_i T_i · Π_j c_j^{i_j} with (c_j^1, c_j^2) = (cos α_j, sin α_j).
pub fn correlation_value(tensor: &CorrelationTensor, settings: &AngleSettings) -> Result<f64> {
    tensor.contract(&settings.plane_vectors())
}

fn planar_axes(key: usize, n_parties: usize) -> Vec<PauliAxis> {
    (0..n_parties)
        .map(|j| {
            if (key >> j) & 1 == 0 {
                PauliAxis::X
            } else {
                PauliAxis::Y
            }
        })
        .collect()
}

/// Planar tensor of a density matrix: x for index 1, y for index 2.
pub fn tensor_from_state(rho: &DensityMatrix) -> Result<CorrelationTensor> {
    let n = rho.n_parties();
    let entries = (0..1usize << n)
        .map(|key| crate::state_kit::pauli_expectation(rho, &planar_axes(key, n)))
        .collect::<Result<Vec<_>>>()?;
    CorrelationTensor::new(n, entries)
}

/// Planar tensor of V·|ψ⟩⟨ψ| + (1−V)·𝟙/2^N computed from |ψ⟩ alone; the
/// noise term has no full correlations.
pub fn tensor_from_pure_state(state: &StateVector, visibility: f64) -> Result<CorrelationTensor> {
    check_unit_interval("visibility", visibility)?;
    let n = state.n_parties();
    let entries = (0..1usize << n)
        .map(|key| {
            state
                .pauli_expectation(&planar_axes(key, n))
                .map(|e| visibility * e)
        })
        .collect::<Result<Vec<_>>>()?;
    CorrelationTensor::new(n, entries)
}

/// Closed form for the noisy GHZ state: V·(−1)^{k/2} when the number k of
/// index-2 positions is even, 0 otherwise.
pub fn ghz_planar_tensor(n_parties: usize, visibility: f64) -> Result<CorrelationTensor> {
    check_tensor_parties(n_parties)?;
    check_unit_interval("visibility", visibility)?;
    let entries = (0..1usize << n_parties)
        .map(|key| match key.count_ones() % 4 {
            0 => visibility,
            2 => -visibility,
            _ => 0.0,
        })
        .collect();
    CorrelationTensor::new(n_parties, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state_kit::{build_ghz, mix_with_white_noise};
    use approx::assert_abs_diff_eq;

    #[test]
    fn key_digits_roundtrip() {
        assert_eq!(key_to_digits(0, 4), "1111");
        assert_eq!(key_to_digits(0b1100, 4), "1122");
        assert_eq!(key_to_digits(0b0001, 3), "211");
        assert_eq!(digits_to_key("1122"), Some(0b1100));
        assert_eq!(digits_to_key("13"), None);
        for k in 0..64 {
            assert_eq!(digits_to_key(&key_to_digits(k, 6)), Some(k));
        }
    }

    #[test]
    fn ghz2_tensor_from_state() {
        let rho = mix_with_white_noise(&build_ghz(2).unwrap(), 1.0).unwrap();
        let t = tensor_from_state(&rho).unwrap();
        assert_abs_diff_eq!(t.get("11").unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.get("22").unwrap(), -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.get("12").unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(t.get("21").unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn ghz3_tensor_from_state() {
        let rho = mix_with_white_noise(&build_ghz(3).unwrap(), 1.0).unwrap();
        let t = tensor_from_state(&rho).unwrap();
        assert_abs_diff_eq!(t.get("111").unwrap(), 1.0, epsilon = 1e-14);
        for d in ["122", "212", "221"] {
            assert_abs_diff_eq!(t.get(d).unwrap(), -1.0, epsilon = 1e-14);
        }
        for d in ["211", "121", "112", "222"] {
            assert_abs_diff_eq!(t.get(d).unwrap(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn white_noise_tensor_vanishes() {
        for n in 1..=4 {
            let id = DensityMatrix::maximally_mixed(n).unwrap();
            let t = tensor_from_state(&id).unwrap();
            assert!(t.entries().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn ghz4_closed_form() {
        let t = ghz_planar_tensor(4, 0.8).unwrap();
        assert_eq!(t.get("1111"), Some(0.8));
        assert_eq!(t.get("1122"), Some(-0.8));
        assert_eq!(t.get("2222"), Some(0.8));
        assert_eq!(t.get("1222"), Some(0.0));
        let rho = mix_with_white_noise(&build_ghz(4).unwrap(), 0.8).unwrap();
        let oracle = tensor_from_state(&rho).unwrap();
        for (a, b) in t.entries().iter().zip(oracle.entries()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn ghz_nonzero_count() {
        assert_eq!(ghz_planar_tensor(5, 0.4).unwrap().nonzero_count(), 16);
        assert_eq!(ghz_planar_tensor(3, 0.0).unwrap().nonzero_count(), 0);
        assert!(ghz_planar_tensor(0, 0.5).is_err());
        assert!(ghz_planar_tensor(3, 1.01).is_err());
    }

    #[test]
    fn pure_state_path_agrees() {
        for n in 1..=6 {
            let g = build_ghz(n).unwrap();
            let fast = tensor_from_pure_state(&g, 0.45).unwrap();
            let closed = ghz_planar_tensor(n, 0.45).unwrap();
            for (a, b) in fast.entries().iter().zip(closed.entries()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    /// Direct sum over {1,2}^N with explicit cos/sin products.
    fn brute_correlation(t: &CorrelationTensor, angles: &[f64]) -> f64 {
        (0..t.entries().len())
            .map(|key| {
                let prod: f64 = angles
                    .iter()
                    .enumerate()
                    .map(|(j, a)| if (key >> j) & 1 == 0 { a.cos() } else { a.sin() })
                    .product();
                t.entry(key) * prod
            })
            .sum()
    }

    #[test]
    fn ghz_correlation_is_cos_of_sum() {
        let angles = [0.3, -1.2, 2.9, 5.5];
        for n in 1..=4 {
            let t = ghz_planar_tensor(n, 0.7).unwrap();
            let a = &angles[..n];
            let want = 0.7 * a.iter().sum::<f64>().cos();
            assert_abs_diff_eq!(brute_correlation(&t, a), want, epsilon = 1e-13);
            let got = correlation_value(&t, &AngleSettings::new(a.to_vec())).unwrap();
            assert_abs_diff_eq!(got, want, epsilon = 1e-13);
        }
    }

    #[test]
    fn zero_angles_pick_all_ones_entry() {
        let t = CorrelationTensor::new(3, vec![0.25, 0.5, -0.5, 0.1, 0.2, 0.3, 0.4, -0.9]).unwrap();
        let e = correlation_value(&t, &AngleSettings::new(vec![0.0; 3])).unwrap();
        assert_eq!(e, 0.25);
        let z = CorrelationTensor::zeros(3).unwrap();
        assert_eq!(correlation_value(&z, &AngleSettings::new(vec![1.0, 2.0, 3.0])).unwrap(), 0.0);
    }

    #[test]
    fn contraction_shape_errors() {
        let t = CorrelationTensor::zeros(3).unwrap();
        assert!(matches!(
            correlation_value(&t, &AngleSettings::new(vec![0.0; 2])),
            Err(Error::Shape { expected: 3, got: 2 })
        ));
        assert!(t.partial_contraction(&[[1.0, 0.0]; 3], 3).is_err());
        assert!(t.rotate_party(5, 0.1).is_err());
    }

    #[test]
    fn partial_contraction_completes_full() {
        let t = CorrelationTensor::new(3, vec![0.25, 0.5, -0.5, 0.1, 0.2, 0.3, 0.4, -0.9]).unwrap();
        let vs = [plane_vector(0.4), plane_vector(-2.0), plane_vector(1.1)];
        let full = t.contract(&vs).unwrap();
        for j in 0..3 {
            let g = t.partial_contraction(&vs, j).unwrap();
            assert_abs_diff_eq!(g[0] * vs[j][0] + g[1] * vs[j][1], full, epsilon = 1e-14);
        }
    }

    #[test]
    fn tensor_validation() {
        assert!(matches!(CorrelationTensor::new(2, vec![0.0; 3]), Err(Error::Shape { .. })));
        assert!(CorrelationTensor::new(1, vec![1.5, 0.0]).is_err());
        assert!(CorrelationTensor::new(1, vec![f64::NAN, 0.0]).is_err());
        assert!(CorrelationTensor::new(1, vec![1.0 + 1e-10, 0.0]).is_ok());
        assert!(CorrelationTensor::zeros(0).is_err());
        assert!(CorrelationTensor::from_components(2, [("113", 0.1)]).is_err());
        assert!(CorrelationTensor::from_components(2, [("111", 0.1)]).is_err());
    }

    #[test]
    fn json_format() {
        let t = ghz_planar_tensor(2, 0.5).unwrap();
        let json = t.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["n"], 2);
        assert_eq!(v["entries"]["11"], 0.5);
        assert_eq!(v["entries"]["22"], -0.5);
        assert!(v["entries"].get("12").is_none());
        assert_eq!(CorrelationTensor::from_json(&json).unwrap(), t);

        let sparse = CorrelationTensor::from_json(r#"{"n": 3, "entries": {"212": 0.25}}"#).unwrap();
        assert_eq!(sparse.get("212"), Some(0.25));
        assert_eq!(sparse.entry(0b101), 0.25);
        assert_eq!(sparse.nonzero_count(), 1);
        assert!(CorrelationTensor::from_json(r#"{"n": 2, "entries": {"1": 0.1}}"#).is_err());
        assert!(CorrelationTensor::from_json(r#"{"n": 2, "entries": {"11": 3.0}}"#).is_err());
    }

    #[test]
    fn angle_comparison_mod_2pi() {
        let a = AngleSettings::new(vec![0.1, -0.2]);
        let b = AngleSettings::new(vec![0.1 + TAU, TAU - 0.2]);
        assert!(a.eq_mod_2pi(&b, 1e-12));
        assert!(!a.eq_mod_2pi(&AngleSettings::new(vec![0.1, 0.2]), 1e-12));
        assert_ne!(a, b);
    }
}
