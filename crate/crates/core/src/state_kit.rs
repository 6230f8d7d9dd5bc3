//! N-qubit states, white-noise mixing and Pauli-string expectation values.
//!
//! Basis states are indexed little-endian: bit `j` of the index is the
//! z-basis value of party `j + 1`, with `0 ↔ |+⟩` and `1 ↔ |−⟩`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_unit_interval, Error, Result};

pub const DEFAULT_MAX_PARTIES: usize = 14;
pub const DEFAULT_MAX_DENSE_PARTIES: usize = 10;

const NORM_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// Memory caps on the number of parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StateLimits {
    /// Cap for state vectors (2^N amplitudes).
    pub max_parties: usize,
    /// Cap for dense density matrices (4^N entries).
    pub max_dense_parties: usize,
}

impl Default for StateLimits {
    fn default() -> Self {
        Self {
            max_parties: DEFAULT_MAX_PARTIES,
            max_dense_parties: DEFAULT_MAX_DENSE_PARTIES,
        }
    }
}

/// Local Pauli axis, indexed 1, 2, 3 for x, y, z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    pub fn index(self) -> usize {
        match self {
            PauliAxis::X => 1,
            PauliAxis::Y => 2,
            PauliAxis::Z => 3,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        match index {
            1 => Some(PauliAxis::X),
            2 => Some(PauliAxis::Y),
            3 => Some(PauliAxis::Z),
            _ => None,
        }
    }

    /// The 2×2 matrix in the z basis, row-major.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            PauliAxis::X => [[o, one], [one, o]],
            PauliAxis::Y => [[o, -i], [i, o]],
            PauliAxis::Z => [[one, o], [o, -one]],
        }
    }
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            PauliAxis::X => 'x',
            PauliAxis::Y => 'y',
            PauliAxis::Z => 'z',
        };
        write!(f, "{c}")
    }
}

/// A Pauli string σ_{a1}⊗…⊗σ_{aN} acts as P|b⟩ = phase(b)·|b ⊕ flip⟩.
struct PauliString {
    flip: usize,
    axes: Vec<PauliAxis>,
}

impl PauliString {
    fn new(axes: &[PauliAxis]) -> Self {
        let flip = axes
            .iter()
            .enumerate()
            .filter(|(_, a)| matches!(a, PauliAxis::X | PauliAxis::Y))
            .fold(0usize, |m, (j, _)| m | (1 << j));
        Self {
            flip,
            axes: axes.to_vec(),
        }
    }

    fn phase(&self, basis: usize) -> Complex64 {
        // Track the phase as i^k·(−1)^s to avoid complex multiplications.
        let mut quarter_turns = 0u32;
        for (j, axis) in self.axes.iter().enumerate() {
            let bit = (basis >> j) & 1;
            match axis {
                PauliAxis::X => {}
                PauliAxis::Y => quarter_turns += if bit == 0 { 1 } else { 3 },
                PauliAxis::Z => quarter_turns += if bit == 0 { 0 } else { 2 },
            }
        }
        match quarter_turns % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

fn check_parties(n: usize, max: usize) -> Result<()> {
    if n == 0 || n > max {
        Err(Error::InvalidSize { n, max })
    } else {
        Ok(())
    }
}

/// Normalized pure state of N qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_parties: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(n_parties: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::with_limits(n_parties, amplitudes, &StateLimits::default())
    }

    pub fn with_limits(
        n_parties: usize,
        amplitudes: Vec<Complex64>,
        limits: &StateLimits,
    ) -> Result<Self> {
        check_parties(n_parties, limits.max_parties)?;
        let dim = 1usize << n_parties;
        if amplitudes.len() != dim {
            return Err(Error::Shape {
                expected: dim,
                got: amplitudes.len(),
            });
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!(
                "squared amplitudes sum to {norm}, expected 1"
            )));
        }
        Ok(Self {
            n_parties,
            amplitudes,
        })
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// ⟨ψ|σ_{a1}⊗…⊗σ_{aN}|ψ⟩ without forming any matrix.
    pub fn pauli_expectation(&self, axes: &[PauliAxis]) -> Result<f64> {
        if axes.len() != self.n_parties {
            return Err(Error::Shape {
                expected: self.n_parties,
                got: axes.len(),
            });
        }
        let p = PauliString::new(axes);
        let sum: Complex64 = self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() != 0.0)
            .map(|(b, a)| self.amplitudes[b ^ p.flip].conj() * p.phase(b) * a)
            .sum();
        Ok(sum.re)
    }
}

/// Dense N-qubit density matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_parties: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_entries(n_parties: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_parties(n_parties, DEFAULT_MAX_DENSE_PARTIES)?;
        let dim = 1usize << n_parties;
        if entries.len() != dim * dim {
            return Err(Error::Shape {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let rho = Self { n_parties, entries };
        rho.check_hermitian()?;
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let min_eig = rho.min_eigenvalue();
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "eigenvalue {min_eig} is negative"
            )));
        }
        Ok(rho)
    }

    /// |ψ⟩⟨ψ|.
    pub fn pure(state: &StateVector) -> Result<Self> {
        Self::pure_with_limits(state, &StateLimits::default())
    }

    pub fn pure_with_limits(state: &StateVector, limits: &StateLimits) -> Result<Self> {
        check_parties(state.n_parties, limits.max_dense_parties)?;
        let amps = state.amplitudes();
        let entries = amps
            .iter()
            .flat_map(|r| amps.iter().map(move |c| r * c.conj()))
            .collect();
        Ok(Self {
            n_parties: state.n_parties,
            entries,
        })
    }

    /// 𝟙/2^N.
    pub fn maximally_mixed(n_parties: usize) -> Result<Self> {
        check_parties(n_parties, DEFAULT_MAX_DENSE_PARTIES)?;
        let dim = 1usize << n_parties;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for k in 0..dim {
            entries[k * dim + k] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Ok(Self { n_parties, entries })
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn dim(&self) -> usize {
        1 << self.n_parties
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|k| self.get(k, k)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.get(k, k).re).collect()
    }

    /// Largest |ρ_rc − conj(ρ_cr)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    fn check_hermitian(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (defect {defect})"
            )));
        }
        Ok(())
    }

    /// Smallest eigenvalue; dense Hermitian eigensolve, O(8^N).
    pub fn min_eigenvalue(&self) -> f64 {
        let dim = self.dim();
        let m = DMatrix::from_row_slice(dim, dim, &self.entries);
        m.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// (|+…+⟩ + |−…−⟩)/√2 in the z basis.
pub fn build_ghz(n_parties: usize) -> Result<StateVector> {
    build_ghz_with_limits(n_parties, &StateLimits::default())
}

pub fn build_ghz_with_limits(n_parties: usize, limits: &StateLimits) -> Result<StateVector> {
    check_parties(n_parties, limits.max_parties)?;
    let dim = 1usize << n_parties;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amplitudes[0] = h;
    amplitudes[dim - 1] = h;
    Ok(StateVector {
        n_parties,
        amplitudes,
    })
}

/// V·|ψ⟩⟨ψ| + (1−V)·𝟙/2^N.
pub fn mix_with_white_noise(state: &StateVector, visibility: f64) -> Result<DensityMatrix> {
    mix_with_white_noise_with_limits(state, visibility, &StateLimits::default())
}

pub fn mix_with_white_noise_with_limits(
    state: &StateVector,
    visibility: f64,
    limits: &StateLimits,
) -> Result<DensityMatrix> {
    check_unit_interval("visibility", visibility)?;
    let mut rho = DensityMatrix::pure_with_limits(state, limits)?;
    let dim = rho.dim();
    let noise = (1.0 - visibility) / dim as f64;
    for (k, e) in rho.entries.iter_mut().enumerate() {
        *e *= visibility;
        if k / dim == k % dim {
            e.re += noise;
        }
    }
    Ok(rho)
}

/// Tr[ρ·(σ_{a1}⊗…⊗σ_{aN})], evaluated in O(N·2^N) from the permutation
/// structure of the Pauli string.
pub fn pauli_expectation(rho: &DensityMatrix, axes: &[PauliAxis]) -> Result<f64> {
    if axes.len() != rho.n_parties {
        return Err(Error::Shape {
            expected: rho.n_parties,
            got: axes.len(),
        });
    }
    let p = PauliString::new(axes);
    let sum: Complex64 = (0..rho.dim())
        .map(|b| p.phase(b) * rho.get(b, b ^ p.flip))
        .sum();
    Ok(sum.re)
}
