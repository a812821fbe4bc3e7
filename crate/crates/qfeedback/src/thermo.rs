//! Canonical (Gibbs) states and thermodynamic bookkeeping: partition
//! functions, free energies, internal energies.
//!
//! All temperatures are in energy units with configurable `k_B` (default 1),
//! so `beta = 1 / (k_B T)`. Entropies elsewhere are in nats, which keeps
//! `F = U - T S` exact with these conventions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{Complex64, DensityOperator, HermitianOperator};

/// Physical constants; defaults pick natural units `k_B = hbar = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub k_b: f64,
    pub hbar: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self { k_b: 1.0, hbar: 1.0 }
    }
}

impl PhysicalConstants {
    pub fn new(k_b: f64, hbar: f64) -> Result<Self> {
        if k_b <= 0.0 || hbar <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "constants must be positive: k_b = {k_b}, hbar = {hbar}"
            )));
        }
        Ok(Self { k_b, hbar })
    }

    /// `beta = 1 / (k_B T)`.
    pub fn beta(&self, temperature: f64) -> Result<f64> {
        if temperature <= 0.0 {
            return Err(Error::NonPositiveTemperature { temperature });
        }
        Ok(1.0 / (self.k_b * temperature))
    }
}

/// One heat bath: its label in the composite space, its Hamiltonian, and its
/// temperature.
#[derive(Debug, Clone)]
pub struct BathSpec {
    label: String,
    hamiltonian: HermitianOperator,
    temperature: f64,
}

impl BathSpec {
    pub fn new(label: impl Into<String>, hamiltonian: HermitianOperator, temperature: f64) -> Result<Self> {
        if temperature <= 0.0 {
            return Err(Error::NonPositiveTemperature { temperature });
        }
        Ok(Self { label: label.into(), hamiltonian, temperature })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }
}

fn require_positive_beta(beta: f64) -> Result<()> {
    if beta <= 0.0 || !beta.is_finite() {
        return Err(Error::NonPositiveBeta { beta });
    }
    Ok(())
}

/// `ln tr exp(-beta H)`, evaluated with a spectrum shift so large
/// `beta * |H|` cannot overflow.
pub fn log_partition_function(h: &HermitianOperator, beta: f64) -> Result<f64> {
    require_positive_beta(beta)?;
    let eigs = h.eigh().values;
    let min = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    let shifted: f64 = eigs.iter().map(|&e| (-beta * (e - min)).exp()).sum();
    Ok(-beta * min + shifted.ln())
}

/// `Z = tr exp(-beta H)`.
pub fn partition_function(h: &HermitianOperator, beta: f64) -> Result<f64> {
    Ok(log_partition_function(h, beta)?.exp())
}

/// Canonical state `exp(-beta H) / Z`.
pub fn gibbs_state(h: &HermitianOperator, beta: f64) -> Result<DensityOperator> {
    require_positive_beta(beta)?;
    let decomp = h.eigh();
    let min = decomp.min_value();
    let z: f64 = decomp.values.iter().map(|&e| (-beta * (e - min)).exp()).sum();
    let mat = decomp.apply_complex(|e| Complex64::new((-beta * (e - min)).exp() / z, 0.0));
    DensityOperator::new(crate::operators::symmetrize(&mat))
}

/// Helmholtz free energy `F = -(1/beta) ln Z` (with `k_B` already folded
/// into `beta`).
pub fn free_energy(h: &HermitianOperator, beta: f64) -> Result<f64> {
    Ok(-log_partition_function(h, beta)? / beta)
}

/// `tr(H rho)`; real for Hermitian inputs (the imaginary residual is
/// round-off and is discarded).
pub fn internal_energy(rho: &DensityOperator, h: &HermitianOperator) -> Result<f64> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch { expected: h.dim(), actual: rho.dim() });
    }
    Ok((h.matrix() * rho.matrix()).trace().re)
}
