//! Entropy and information functionals: von Neumann and Shannon entropy,
//! the joint functional `H~(rho, X)`, the QC-mutual information
//! `I(rho:X) = S(rho) + H({p_k}) - H~(rho, X)`, its Holevo-chi
//! decomposition, the classical-reduction oracle, and the auxiliary-system
//! constructions behind the bound `0 <= I <= H({p_k})`.
//!
//! `I(rho:X)` is evaluated in the decomposed form
//! `H~ = H({p_k}) + sum_k p_k S(sigma2_k)` with
//! `sigma2_k = sqrt(D_k) rho sqrt(D_k) / p_k`, which stays well conditioned
//! near zero-probability outcomes; the raw `-sum tr(A ln A)` form is kept as
//! a cross-check. All entropies are in nats.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{measure, MeasurementChannel, OutcomeDistribution};
use crate::operators::{
    eigh, matrix_sqrt, sqrt_sandwich_with, symmetrize, CMatrix, CompositeSpace, DensityOperator,
};
use crate::tol;

// ─── Scalar entropies ────────────────────────────────────────────────

/// `-sum λ ln λ` over a spectrum, with the 0 ln 0 = 0 convention below the
/// eigenvalue floor. Weights need not be normalized.
pub(crate) fn entropy_of_spectrum(values: &[f64]) -> f64 {
    let s: f64 = values
        .iter()
        .filter(|&&v| v > tol::EIGENVALUE_FLOOR)
        .map(|&v| -v * v.ln())
        .sum();
    s
}

/// Von Neumann entropy `S(rho) = -tr(rho ln rho)` in nats; lands in
/// `[0, ln dim]`.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    entropy_of_spectrum(rho.eigenvalues()).max(0.0)
}

/// `-tr(A ln A)` for an (unnormalized) PSD operator, evaluated spectrally.
/// Fails on spectra below the PSD floor.
pub fn entropy_of_psd(mat: &CMatrix) -> Result<f64> {
    let decomp = eigh(&symmetrize(mat));
    let min = decomp.min_value();
    if min < tol::PSD_FLOOR {
        return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
    }
    Ok(entropy_of_spectrum(&decomp.values))
}

/// Shannon entropy of raw probabilities (zero terms contribute nothing).
pub fn shannon_of_probs(probs: &[f64]) -> f64 {
    entropy_of_spectrum(probs).max(0.0)
}

/// Shannon information content `H({p_k})` in nats.
pub fn shannon_entropy(dist: &OutcomeDistribution) -> f64 {
    shannon_of_probs(dist.probabilities())
}

// ─── The joint functional and the QC-mutual information ─────────────

/// Per-outcome sandwich data: `p_k = tr(sqrt(D_k) rho sqrt(D_k))` and the
/// entropy of the normalized sandwich state.
fn sandwich_parts(rho: &DensityOperator, channel: &MeasurementChannel) -> Result<(Vec<f64>, Vec<f64>)> {
    if rho.dim() != channel.dim() {
        return Err(Error::DimensionMismatch { expected: channel.dim(), actual: rho.dim() });
    }
    let sqrts = channel.povm_sqrts()?;
    let mut probs = Vec::with_capacity(sqrts.len());
    let mut entropies = Vec::with_capacity(sqrts.len());
    for s in &sqrts {
        let a = sqrt_sandwich_with(s, rho.matrix());
        let p = a.matrix().trace().re;
        if p > tol::BRANCH_FLOOR {
            let normalized: Vec<f64> = eigh(a.matrix()).values.iter().map(|v| v / p).collect();
            probs.push(p);
            entropies.push(entropy_of_spectrum(&normalized).max(0.0));
        } else {
            probs.push(p.max(0.0));
            entropies.push(0.0);
        }
    }
    Ok((probs, entropies))
}

/// `H~(rho, X) = -sum_k tr(sqrt(D_k) rho sqrt(D_k) ln sqrt(D_k) rho sqrt(D_k))`,
/// computed in the decomposed form `H({p_k}) + sum_k p_k S(sigma2_k)`.
pub fn h_tilde(rho: &DensityOperator, channel: &MeasurementChannel) -> Result<f64> {
    let (probs, entropies) = sandwich_parts(rho, channel)?;
    let mixture: f64 = probs.iter().zip(&entropies).map(|(p, s)| p * s).sum();
    Ok(shannon_of_probs(&probs) + mixture)
}

/// The raw eigen-evaluation `sum_k -tr(A_k ln A_k)` of the joint functional;
/// retained as an independent route for cross-checks.
pub fn h_tilde_direct(rho: &DensityOperator, channel: &MeasurementChannel) -> Result<f64> {
    if rho.dim() != channel.dim() {
        return Err(Error::DimensionMismatch { expected: channel.dim(), actual: rho.dim() });
    }
    let mut total = 0.0;
    for s in &channel.povm_sqrts()? {
        let a = sqrt_sandwich_with(s, rho.matrix());
        total += entropy_of_psd(a.matrix())?;
    }
    Ok(total)
}

/// All information functionals of one (state, measurement) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InformationReport {
    /// `S(rho)` of the pre-measurement state, nats.
    pub s_rho: f64,
    /// `H({p_k})`, nats.
    pub shannon: f64,
    /// `H~(rho, X)`, nats.
    pub h_tilde: f64,
    /// `I(rho:X) = s_rho + shannon - h_tilde`, nats.
    pub qc_mutual: f64,
    /// Holevo quantity `chi = S(rho_2) - sum_k p_k S(rho_2_k)`, nats.
    pub holevo_chi: f64,
    /// Measurement entropy change `S(rho_2) - S(rho_1)`, nats.
    pub delta_s_meas: f64,
}

/// Evaluate the full information report for a state and a measurement.
pub fn qc_mutual_info(rho: &DensityOperator, channel: &MeasurementChannel) -> Result<InformationReport> {
    let s_rho = von_neumann_entropy(rho);
    let (probs, sigma2_entropies) = sandwich_parts(rho, channel)?;
    let shannon = shannon_of_probs(&probs);
    let h_tilde_value = shannon + probs.iter().zip(&sigma2_entropies).map(|(p, s)| p * s).sum::<f64>();
    let qc_mutual = s_rho + shannon - h_tilde_value;

    // Non-selective post-measurement state over all outcomes (dropped
    // branches still contribute their unnormalized weight here).
    let d = rho.dim();
    let mut rho2_mat = CMatrix::zeros(d, d);
    for m in channel.operators() {
        rho2_mat += m * rho.matrix() * m.adjoint();
    }
    let rho2 = DensityOperator::new(symmetrize(&rho2_mat))?;
    let s_rho2 = von_neumann_entropy(&rho2);

    let (_, branches) = measure(rho, channel)?;
    let branch_term: f64 = branches.present().map(|(p, s)| p * von_neumann_entropy(s)).sum();
    let holevo_chi = s_rho2 - branch_term;
    let delta_s_meas = s_rho2 - s_rho;

    Ok(InformationReport { s_rho, shannon, h_tilde: h_tilde_value, qc_mutual, holevo_chi, delta_s_meas })
}

// ─── Classical reduction ─────────────────────────────────────────────

/// Classical mutual information from the joint distribution
/// `j_ik = q_i p(k|i)`: `I = sum_ik j_ik ln(j_ik / (q_i p_k))`.
/// This is the brute-force oracle for the commuting case; `conditional[i]`
/// is the outcome distribution given input `i`.
pub fn classical_mutual_info_oracle(q: &[f64], conditional: &[Vec<f64>]) -> Result<f64> {
    if conditional.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: q.len(), actual: conditional.len() });
    }
    let q_sum: f64 = q.iter().sum();
    if (q_sum - 1.0).abs() > tol::DISTRIBUTION_SUM || q.iter().any(|&x| x < -tol::PROBABILITY_SLACK) {
        return Err(Error::NotNormalized(format!("prior sums to {q_sum}")));
    }
    let n_outcomes = conditional.first().map_or(0, Vec::len);
    for (i, row) in conditional.iter().enumerate() {
        if row.len() != n_outcomes {
            return Err(Error::DimensionMismatch { expected: n_outcomes, actual: row.len() });
        }
        let row_sum: f64 = row.iter().sum();
        if (row_sum - 1.0).abs() > tol::DISTRIBUTION_SUM
            || row.iter().any(|&x| x < -tol::PROBABILITY_SLACK)
        {
            return Err(Error::NotNormalized(format!("conditional row {i} sums to {row_sum}")));
        }
    }

    let mut marginal = vec![0.0f64; n_outcomes];
    for (qi, row) in q.iter().zip(conditional) {
        for (k, pk_given_i) in row.iter().enumerate() {
            marginal[k] += qi * pk_given_i;
        }
    }
    let mut info = 0.0;
    for (qi, row) in q.iter().zip(conditional) {
        for (k, pk_given_i) in row.iter().enumerate() {
            let joint = qi * pk_given_i;
            if joint > tol::EIGENVALUE_FLOOR {
                info += joint * (joint.ln() - qi.ln() - marginal[k].ln());
            }
        }
    }
    Ok(info.max(0.0))
}

/// Extract the classical data `(q_i, p(k|i))` of a commuting pair from the
/// state's eigenbasis: `q_i` are the eigenvalues of `rho` and
/// `p(k|i) = <psi_i| D_k |psi_i>`.
pub fn classical_reduction_inputs(
    rho: &DensityOperator,
    channel: &MeasurementChannel,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if rho.dim() != channel.dim() {
        return Err(Error::DimensionMismatch { expected: channel.dim(), actual: rho.dim() });
    }
    let decomp = eigh(rho.matrix());
    let q: Vec<f64> = decomp.values.iter().map(|&v| v.clamp(0.0, 1.0)).collect();
    let povm = channel.povm();
    let d = rho.dim();
    let mut conditional = vec![vec![0.0f64; povm.len()]; d];
    for (k, dk) in povm.iter().enumerate() {
        for (i, row) in conditional.iter_mut().enumerate() {
            let v = decomp.vectors.column(i);
            let val = (v.adjoint() * dk.matrix() * v)[(0, 0)].re;
            row[k] = val.clamp(0.0, 1.0);
        }
    }
    Ok((q, conditional))
}

// ─── Proof constructions ─────────────────────────────────────────────

/// The two auxiliary-system states used to bound the QC-mutual information:
/// `sigma1 = sum_k sqrt(rho) D_k sqrt(rho) ⊗ |k><k|` and
/// `sigma2 = sum_k sqrt(D_k) rho sqrt(D_k) ⊗ |k><k|` on `Q ⊗ R`, together
/// with the register marginal `rho_R = sum_k p_k |k><k|`.
#[derive(Debug, Clone)]
pub struct SigmaPair {
    pub sigma1: DensityOperator,
    pub sigma2: DensityOperator,
    pub r_marginal: DensityOperator,
    space: CompositeSpace,
}

impl SigmaPair {
    /// The `Q ⊗ R` factor structure shared by both states.
    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }
}

pub fn sigma_pair(rho: &DensityOperator, channel: &MeasurementChannel) -> Result<SigmaPair> {
    if rho.dim() != channel.dim() {
        return Err(Error::DimensionMismatch { expected: channel.dim(), actual: rho.dim() });
    }
    let d = rho.dim();
    let n = channel.num_outcomes();
    let sqrt_rho = matrix_sqrt(&rho.to_hermitian())?;
    let sqrts = channel.povm_sqrts()?;
    let povm = channel.povm();

    let mut sigma1 = CMatrix::zeros(d * n, d * n);
    let mut sigma2 = CMatrix::zeros(d * n, d * n);
    let mut probs = vec![0.0f64; n];
    for k in 0..n {
        let block1 = sqrt_sandwich_with(&sqrt_rho, povm[k].matrix());
        let block2 = sqrt_sandwich_with(&sqrts[k], rho.matrix());
        probs[k] = block2.matrix().trace().re.clamp(0.0, 1.0);
        // |k><k| register block: copy into the (k, k) diagonal block.
        for i in 0..d {
            for j in 0..d {
                sigma1[(i * n + k, j * n + k)] = block1.matrix()[(i, j)];
                sigma2[(i * n + k, j * n + k)] = block2.matrix()[(i, j)];
            }
        }
    }
    let space = CompositeSpace::new(vec![d, n], vec!["Q", "R"])?;
    Ok(SigmaPair {
        sigma1: DensityOperator::new(sigma1)?,
        sigma2: DensityOperator::new(sigma2)?,
        r_marginal: DensityOperator::new(crate::operators::diagonal(&probs))?,
        space,
    })
}

/// The overlap matrix `d_ij = sum_k |<psi_i| sqrt(D_k) |psi_j'>|^2` between
/// the eigenbases of `rho` and of `rho' = sum_k sqrt(D_k) rho sqrt(D_k)`.
/// Doubly stochastic by POVM completeness, for any orthonormal basis choice
/// inside degenerate subspaces.
pub fn dij_matrix(rho: &DensityOperator, channel: &MeasurementChannel) -> Result<DMatrix<f64>> {
    if rho.dim() != channel.dim() {
        return Err(Error::DimensionMismatch { expected: channel.dim(), actual: rho.dim() });
    }
    let d = rho.dim();
    let sqrts = channel.povm_sqrts()?;
    let mut rho_prime = CMatrix::zeros(d, d);
    for s in &sqrts {
        rho_prime += sqrt_sandwich_with(s, rho.matrix()).matrix();
    }
    let basis = eigh(rho.matrix()).vectors;
    let basis_prime = eigh(&symmetrize(&rho_prime)).vectors;

    let mut out = DMatrix::<f64>::zeros(d, d);
    for s in &sqrts {
        let overlap = basis.adjoint() * s.matrix() * &basis_prime;
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += overlap[(i, j)].norm_sqr();
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{
        commuting_channel_with, is_classical, projective_commuting_channel_with, random_channel_with,
        random_density_with, seeded_rng, uninformative_channel_with, MeasurementChannel,
    };
    use crate::operators::{diagonal, identity, max_diff, partial_trace, tensor, CVector, Complex64};
    use rand::Rng;
    use std::f64::consts::LN_2;

    fn binary_entropy(p: f64) -> f64 {
        shannon_of_probs(&[p, 1.0 - p])
    }

    #[test]
    fn von_neumann_entropy_closed_forms() {
        let mut v = CVector::zeros(3);
        v[1] = Complex64::new(1.0, 0.0);
        let pure = DensityOperator::pure(&v).unwrap();
        assert!(von_neumann_entropy(&pure).abs() < 1e-12);

        for d in [2usize, 4] {
            let mixed = DensityOperator::maximally_mixed(d);
            assert!((von_neumann_entropy(&mixed) - (d as f64).ln()).abs() < 1e-12);
        }

        let rho = DensityOperator::new(diagonal(&[0.7, 0.3])).unwrap();
        assert!((von_neumann_entropy(&rho) - binary_entropy(0.7)).abs() < 1e-12);
        assert!((von_neumann_entropy(&rho) - 0.6109).abs() < 1e-4);
    }

    #[test]
    fn entropy_of_psd_rejects_indefinite_input() {
        assert!(entropy_of_psd(&diagonal(&[1.0, -0.2])).is_err());
        assert!(entropy_of_psd(&diagonal(&[1.0, 0.0])).is_ok());
    }

    #[test]
    fn shannon_entropy_closed_forms() {
        let h = |p: Vec<f64>| shannon_of_probs(&p);
        assert!(h(vec![1.0, 0.0]).abs() < 1e-12);
        assert!((h(vec![0.5, 0.5]) - LN_2).abs() < 1e-12);
        assert!((h(vec![0.5, 0.25, 0.25]) - 1.5 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn h_tilde_uninformative_shifts_by_ln2() {
        let m = identity(2).scale(1.0 / 2.0f64.sqrt());
        let channel = MeasurementChannel::new(vec![m.clone(), m]).unwrap();
        let mut rng = seeded_rng(3);
        let rho = random_density_with(&mut rng, 2);
        let expect = von_neumann_entropy(&rho) + LN_2;
        assert!((h_tilde(&rho, &channel).unwrap() - expect).abs() < 1e-10);
    }

    #[test]
    fn h_tilde_projective_on_diagonal_equals_shannon() {
        let channel = MeasurementChannel::projective_computational(2);
        let rho = DensityOperator::new(diagonal(&[0.7, 0.3])).unwrap();
        let expect = binary_entropy(0.7);
        assert!((h_tilde(&rho, &channel).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn h_tilde_decomposed_matches_direct_eigenvaluation() {
        let mut rng = seeded_rng(41);
        for _ in 0..25 {
            let dim = rng.gen_range(2..=4);
            let n = rng.gen_range(1..=4);
            let rho = random_density_with(&mut rng, dim);
            let channel = random_channel_with(&mut rng, dim, n);
            let a = h_tilde(&rho, &channel).unwrap();
            let b = h_tilde_direct(&rho, &channel).unwrap();
            assert!((a - b).abs() < 1e-9, "decomposed {a} vs direct {b}");
        }
    }

    #[test]
    fn qc_mutual_info_szilard_measurement() {
        let rho = DensityOperator::maximally_mixed(2);
        let channel = MeasurementChannel::projective_computational(2);
        let report = qc_mutual_info(&rho, &channel).unwrap();
        assert!((report.qc_mutual - LN_2).abs() < 1e-12);
        assert!((report.shannon - LN_2).abs() < 1e-12);
    }

    #[test]
    fn qc_mutual_info_vanishes_for_uninformative_channel() {
        let mut rng = seeded_rng(53);
        for _ in 0..10 {
            let dim = rng.gen_range(2..=4);
            let n = rng.gen_range(2..=4);
            let rho = random_density_with(&mut rng, dim);
            let channel = uninformative_channel_with(&mut rng, dim, n);
            let report = qc_mutual_info(&rho, &channel).unwrap();
            assert!(report.qc_mutual.abs() < 1e-9, "I = {}", report.qc_mutual);
        }
    }

    #[test]
    fn qc_mutual_info_noisy_classical_channel_matches_oracle() {
        // Binary symmetric channel with error 0.1 on a diag(0.7, 0.3) state.
        let rho = DensityOperator::new(diagonal(&[0.7, 0.3])).unwrap();
        let m0 = diagonal(&[0.9f64.sqrt(), 0.1f64.sqrt()]);
        let m1 = diagonal(&[0.1f64.sqrt(), 0.9f64.sqrt()]);
        let channel = MeasurementChannel::new(vec![m0, m1]).unwrap();
        let report = qc_mutual_info(&rho, &channel).unwrap();
        let oracle =
            classical_mutual_info_oracle(&[0.7, 0.3], &[vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
        assert!((report.qc_mutual - oracle).abs() < 1e-9);
    }

    #[test]
    fn oracle_closed_forms() {
        // Deterministic permutation: I = H(q).
        let q = [0.6, 0.4];
        let perm = [vec![0.0, 1.0], vec![1.0, 0.0]];
        let i = classical_mutual_info_oracle(&q, &perm).unwrap();
        assert!((i - shannon_of_probs(&q)).abs() < 1e-12);

        // Outcome independent of input: I = 0.
        let flat = [vec![0.3, 0.7], vec![0.3, 0.7]];
        assert!(classical_mutual_info_oracle(&q, &flat).unwrap().abs() < 1e-12);

        // Binary symmetric channel at uniform prior: I = ln 2 - H2(eps).
        let bsc = [vec![0.9, 0.1], vec![0.1, 0.9]];
        let i = classical_mutual_info_oracle(&[0.5, 0.5], &bsc).unwrap();
        assert!((i - (LN_2 - binary_entropy(0.1))).abs() < 1e-12);
        assert!((i - 0.3680).abs() < 1e-4);
    }

    #[test]
    fn oracle_rejects_unnormalized_inputs() {
        assert!(classical_mutual_info_oracle(&[0.6, 0.6], &[vec![1.0, 0.0], vec![0.0, 1.0]]).is_err());
        assert!(classical_mutual_info_oracle(&[0.5, 0.5], &[vec![0.9, 0.0], vec![0.0, 1.0]]).is_err());
    }

    #[test]
    fn qc_bounds_hold_on_random_instances() {
        let mut rng = seeded_rng(61);
        for dim in [2usize, 3, 4] {
            for _ in 0..100 {
                let n = rng.gen_range(2..=4);
                let rho = random_density_with(&mut rng, dim);
                let channel = random_channel_with(&mut rng, dim, n);
                let report = qc_mutual_info(&rho, &channel).unwrap();
                assert!(report.qc_mutual >= -1e-9);
                assert!(report.qc_mutual <= report.shannon + 1e-9);
                // Decomposition identity and report consistency.
                let residual =
                    report.qc_mutual - (report.s_rho + report.shannon - report.h_tilde);
                assert!(residual.abs() < 1e-9);
                assert!((report.qc_mutual - (report.holevo_chi - report.delta_s_meas)).abs() < 1e-8);
                // Subadditivity step of the lower-bound proof.
                assert!(report.h_tilde <= report.s_rho + report.shannon + 1e-9);
            }
        }
    }

    #[test]
    fn projective_commuting_channels_saturate_upper_bound() {
        let mut rng = seeded_rng(67);
        for _ in 0..50 {
            let dim = rng.gen_range(2..=4);
            let n = rng.gen_range(2..=dim);
            let rho = random_density_with(&mut rng, dim);
            let channel = projective_commuting_channel_with(&mut rng, &rho, n).unwrap();
            let report = qc_mutual_info(&rho, &channel).unwrap();
            assert!((report.qc_mutual - report.shannon).abs() < 1e-9);
        }
    }

    #[test]
    fn classical_case_matches_oracle() {
        let mut rng = seeded_rng(71);
        for _ in 0..50 {
            let dim = rng.gen_range(2..=4);
            let n = rng.gen_range(2..=4);
            let rho = random_density_with(&mut rng, dim);
            let channel = commuting_channel_with(&mut rng, &rho, n);
            assert!(is_classical(&rho, &channel));
            let report = qc_mutual_info(&rho, &channel).unwrap();
            let (q, conditional) = classical_reduction_inputs(&rho, &channel).unwrap();
            let oracle = classical_mutual_info_oracle(&q, &conditional).unwrap();
            assert!(
                (report.qc_mutual - oracle).abs() < 1e-9,
                "qc {} vs oracle {}",
                report.qc_mutual,
                oracle
            );
        }
    }

    #[test]
    fn non_disturbing_measurement_reduces_to_holevo_chi() {
        let mut rng = seeded_rng(73);
        for _ in 0..30 {
            let dim = rng.gen_range(2..=4);
            let n = rng.gen_range(2..=dim);
            let rho = random_density_with(&mut rng, dim);
            let channel = projective_commuting_channel_with(&mut rng, &rho, n).unwrap();
            let report = qc_mutual_info(&rho, &channel).unwrap();
            assert!(report.delta_s_meas.abs() < 1e-9);
            assert!((report.qc_mutual - report.holevo_chi).abs() < 1e-8);
        }
    }

    #[test]
    fn sigma_pair_single_outcome_is_product() {
        let mut rng = seeded_rng(79);
        let rho = random_density_with(&mut rng, 3);
        let channel = random_channel_with(&mut rng, 3, 1);
        let pair = sigma_pair(&rho, &channel).unwrap();
        let register = diagonal(&[1.0]);
        assert!(max_diff(pair.sigma1.matrix(), &tensor(rho.matrix(), &register)) < 1e-10);
    }

    #[test]
    fn sigma_pair_uninformative_is_exact_product() {
        let mut rng = seeded_rng(83);
        let rho = random_density_with(&mut rng, 3);
        let channel = uninformative_channel_with(&mut rng, 3, 3);
        let pair = sigma_pair(&rho, &channel).unwrap();
        let product = tensor(rho.matrix(), pair.r_marginal.matrix());
        assert!(max_diff(pair.sigma1.matrix(), &product) < 1e-10);
    }

    #[test]
    fn sigma_pair_invariants_on_random_instances() {
        let mut rng = seeded_rng(89);
        for _ in 0..30 {
            let dim = rng.gen_range(2..=4);
            let n = rng.gen_range(1..=4);
            let rho = random_density_with(&mut rng, dim);
            let channel = random_channel_with(&mut rng, dim, n);
            let pair = sigma_pair(&rho, &channel).unwrap();

            // Q marginal of sigma1 is rho; R marginal is rho_R.
            let q_marginal = partial_trace(pair.sigma1.matrix(), pair.space(), &["Q"]).unwrap();
            assert!(max_diff(&q_marginal, rho.matrix()) < 1e-9);
            let r_marginal = partial_trace(pair.sigma1.matrix(), pair.space(), &["R"]).unwrap();
            assert!(max_diff(&r_marginal, pair.r_marginal.matrix()) < 1e-9);

            // S(sigma1) = S(sigma2) = H~.
            let s1 = von_neumann_entropy(&pair.sigma1);
            let s2 = von_neumann_entropy(&pair.sigma2);
            let ht = h_tilde(&rho, &channel).unwrap();
            assert!((s1 - s2).abs() < 1e-8, "S(sigma1) {s1} vs S(sigma2) {s2}");
            assert!((s2 - ht).abs() < 1e-8, "S(sigma2) {s2} vs H~ {ht}");
        }
    }

    #[test]
    fn dij_uninformative_channel_is_doubly_stochastic() {
        let mut rng = seeded_rng(97);
        let rho = random_density_with(&mut rng, 3);
        let channel = uninformative_channel_with(&mut rng, 3, 2);
        let d = dij_matrix(&rho, &channel).unwrap();
        for i in 0..3 {
            assert!((d.row(i).sum() - 1.0).abs() < 1e-8);
            assert!((d.column(i).sum() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn dij_projective_commuting_is_permutation_like() {
        let mut rng = seeded_rng(101);
        let rho = random_density_with(&mut rng, 4);
        let channel = projective_commuting_channel_with(&mut rng, &rho, 2).unwrap();
        let d = dij_matrix(&rho, &channel).unwrap();
        for i in 0..4 {
            let row_max = (0..4).map(|j| d[(i, j)]).fold(0.0, f64::max);
            assert!(row_max > 1.0 - 1e-8, "row {i} has no dominant entry: {d}");
            assert!((d.row(i).sum() - 1.0).abs() < 1e-8);
            assert!((d.column(i).sum() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn dij_random_instances_doubly_stochastic() {
        let mut rng = seeded_rng(103);
        for _ in 0..30 {
            let dim = rng.gen_range(2..=4);
            let n = rng.gen_range(1..=4);
            let rho = random_density_with(&mut rng, dim);
            let channel = random_channel_with(&mut rng, dim, n);
            let d = dij_matrix(&rho, &channel).unwrap();
            for i in 0..dim {
                assert!((d.row(i).sum() - 1.0).abs() < 1e-8);
                assert!((d.column(i).sum() - 1.0).abs() < 1e-8);
                for j in 0..dim {
                    assert!(d[(i, j)] >= -1e-12);
                }
            }
        }
    }
}
