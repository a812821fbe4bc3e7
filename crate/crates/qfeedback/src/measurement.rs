//! Generalized quantum measurements: measurement-operator channels, POVMs,
//! outcome statistics, post-measurement branch ensembles, classicality
//! tests, and seeded random instance generators for verification campaigns.
//!
//! One measurement operator per outcome (single-Kraus instruments); the
//! POVM elements are derived as `D_k = M_k' M_k`. All generators are
//! deterministic in an explicit seed, so parallel campaigns can partition
//! the seed space with no shared state.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::operators::{
    self, commutator, identity, max_diff, max_norm, symmetrize, CMatrix, Complex64,
    CompositeSpace, DensityOperator, HermitianOperator,
};
use crate::thermo::PhysicalConstants;
use crate::tol;

// ─── Channels ────────────────────────────────────────────────────────

/// A finite list of measurement operators `{M_k}`, one per outcome,
/// resolving the identity: `sum_k M_k' M_k = I` within tolerance.
#[derive(Debug, Clone)]
pub struct MeasurementChannel {
    operators: Vec<CMatrix>,
    outcome_labels: Vec<String>,
}

impl MeasurementChannel {
    /// Channel with default outcome labels `"0", "1", ...`.
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let labels = (0..operators.len()).map(|k| k.to_string()).collect();
        Self::with_labels(operators, labels)
    }

    pub fn with_labels(operators: Vec<CMatrix>, outcome_labels: Vec<String>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidParameter("channel needs at least one outcome".into()));
        }
        if operators.len() != outcome_labels.len() {
            return Err(Error::InvalidParameter(format!(
                "{} operators but {} labels",
                operators.len(),
                outcome_labels.len()
            )));
        }
        let d = operators[0].nrows();
        for m in &operators {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, actual: m.nrows() });
            }
        }
        let mut sum = CMatrix::zeros(d, d);
        for m in &operators {
            sum += m.adjoint() * m;
        }
        let residual = max_diff(&sum, &identity(d));
        if residual > tol::COMPLETENESS {
            return Err(Error::IncompleteChannel { residual });
        }
        Ok(Self { operators, outcome_labels })
    }

    /// Single-outcome identity channel (measurement that learns nothing and
    /// disturbs nothing).
    pub fn trivial(dim: usize) -> Self {
        Self { operators: vec![identity(dim)], outcome_labels: vec!["0".into()] }
    }

    /// Projective measurement in the computational basis.
    pub fn projective_computational(dim: usize) -> Self {
        let operators = (0..dim)
            .map(|k| {
                let mut p = CMatrix::zeros(dim, dim);
                p[(k, k)] = Complex64::new(1.0, 0.0);
                p
            })
            .collect();
        let outcome_labels = (0..dim).map(|k| k.to_string()).collect();
        Self { operators, outcome_labels }
    }

    pub fn dim(&self) -> usize {
        self.operators[0].nrows()
    }

    pub fn num_outcomes(&self) -> usize {
        self.operators.len()
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn outcome_labels(&self) -> &[String] {
        &self.outcome_labels
    }

    /// POVM elements `D_k = M_k' M_k`.
    pub fn povm(&self) -> Vec<HermitianOperator> {
        self.operators
            .iter()
            .map(|m| HermitianOperator::new_unchecked(m.adjoint() * m))
            .collect()
    }

    /// Square roots of the POVM elements.
    pub fn povm_sqrts(&self) -> Result<Vec<HermitianOperator>> {
        self.povm().iter().map(operators::matrix_sqrt).collect()
    }

    /// Lift every `M_k` to `M_k ⊗ I` on the factor named `label` of a
    /// composite space.
    pub fn embed(&self, space: &CompositeSpace, label: &str) -> Result<Self> {
        let operators = self
            .operators
            .iter()
            .map(|m| space.embed(label, m))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { operators, outcome_labels: self.outcome_labels.clone() })
    }

    /// Reorder outcomes by the given permutation (`perm[new] = old`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.num_outcomes();
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidParameter("not a permutation".into()));
            }
            seen[p] = true;
        }
        if perm.len() != n {
            return Err(Error::InvalidParameter("not a permutation".into()));
        }
        Ok(Self {
            operators: perm.iter().map(|&p| self.operators[p].clone()).collect(),
            outcome_labels: perm.iter().map(|&p| self.outcome_labels[p].clone()).collect(),
        })
    }
}

// ─── Outcome statistics ──────────────────────────────────────────────

/// Probabilities over measurement outcomes, clamped to `[0, 1]` and
/// normalized within tolerance.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct OutcomeDistribution {
    probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        for &p in &raw {
            if !(-tol::PROBABILITY_SLACK..=1.0 + tol::PROBABILITY_SLACK).contains(&p) {
                return Err(Error::NotNormalized(format!("probability {p} out of range")));
            }
        }
        let sum: f64 = raw.iter().sum();
        if (sum - 1.0).abs() > tol::DISTRIBUTION_SUM {
            return Err(Error::NotNormalized(format!("probabilities sum to {sum}")));
        }
        Ok(Self { probabilities: raw.into_iter().map(|p| p.clamp(0.0, 1.0)).collect() })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }
}

/// One post-measurement branch; the state is absent when the outcome
/// probability sits at or below the branch floor.
#[derive(Debug, Clone)]
pub struct Branch {
    pub probability: f64,
    pub state: Option<DensityOperator>,
}

/// The ensemble `{p_k, rho^(k)}` produced by a measurement (and carried
/// through feedback). Absent branches contribute zero to every sum.
#[derive(Debug, Clone)]
pub struct BranchEnsemble {
    branches: Vec<Branch>,
}

impl BranchEnsemble {
    pub fn new(branches: Vec<Branch>) -> Self {
        Self { branches }
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// Iterate over present branches as `(p_k, state)`.
    pub fn present(&self) -> impl Iterator<Item = (f64, &DensityOperator)> {
        self.branches.iter().filter_map(|b| b.state.as_ref().map(|s| (b.probability, s)))
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.branches.iter().map(|b| b.probability).collect()
    }

    /// The statistical mixture `sum_k p_k rho^(k)` over present branches.
    pub fn mixture(&self) -> Result<DensityOperator> {
        let (_, first) = self
            .present()
            .next()
            .ok_or_else(|| Error::InvalidParameter("ensemble has no present branches".into()))?;
        let d = first.dim();
        let mut sum = CMatrix::zeros(d, d);
        for (p, state) in self.present() {
            sum += state.matrix().scale(p);
        }
        DensityOperator::new(sum)
    }

    /// Apply a state map branch-by-branch, keeping probabilities.
    pub fn map_states(
        &self,
        mut f: impl FnMut(usize, &DensityOperator) -> Result<DensityOperator>,
    ) -> Result<Self> {
        let branches = self
            .branches
            .iter()
            .enumerate()
            .map(|(k, b)| {
                Ok(Branch {
                    probability: b.probability,
                    state: b.state.as_ref().map(|s| f(k, s)).transpose()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { branches })
    }
}

/// Outcome probabilities `p_k = tr(D_k rho)` and normalized post-measurement
/// branches `M_k rho M_k' / p_k`.
pub fn measure(
    rho: &DensityOperator,
    channel: &MeasurementChannel,
) -> Result<(OutcomeDistribution, BranchEnsemble)> {
    if rho.dim() != channel.dim() {
        return Err(Error::DimensionMismatch { expected: channel.dim(), actual: rho.dim() });
    }
    let mut probs = Vec::with_capacity(channel.num_outcomes());
    let mut branches = Vec::with_capacity(channel.num_outcomes());
    for m in channel.operators() {
        let unnormalized = symmetrize(&(m * rho.matrix() * m.adjoint()));
        let p = unnormalized.trace().re;
        let state = if p > tol::BRANCH_FLOOR {
            Some(DensityOperator::new(unnormalized.scale(1.0 / p))?)
        } else {
            None
        };
        probs.push(p);
        branches.push(Branch { probability: p.clamp(0.0, 1.0), state });
    }
    Ok((OutcomeDistribution::new(probs)?, BranchEnsemble::new(branches)))
}

/// True iff the measurement is classical on `rho`: every POVM element
/// commutes with the state within tolerance.
pub fn is_classical(rho: &DensityOperator, channel: &MeasurementChannel) -> bool {
    assert_eq!(rho.dim(), channel.dim(), "dimension mismatch in is_classical");
    channel
        .povm()
        .iter()
        .all(|d| max_norm(&commutator(rho.matrix(), d.matrix())) <= tol::CLASSICALITY)
}

// ─── Unitary evolution ───────────────────────────────────────────────

/// `exp(-i H t / hbar)`; unitary by construction (eigenphases on the unit
/// circle).
pub fn unitary_from_hamiltonian(
    h: &HermitianOperator,
    duration: f64,
    constants: &PhysicalConstants,
) -> CMatrix {
    h.eigh().apply_complex(|e| Complex64::from_polar(1.0, -e * duration / constants.hbar))
}

/// Piecewise-constant schedule, earliest segment first; the result is the
/// ordered product `U_n ... U_2 U_1` that stands in for the time-ordered
/// exponential.
pub fn compose_schedule(segments: &[(HermitianOperator, f64)], constants: &PhysicalConstants) -> Result<CMatrix> {
    let (first, _) = segments
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty evolution schedule".into()))?;
    let mut u = identity(first.dim());
    for (h, duration) in segments {
        if h.dim() != first.dim() {
            return Err(Error::DimensionMismatch { expected: first.dim(), actual: h.dim() });
        }
        u = unitary_from_hamiltonian(h, *duration, constants) * u;
    }
    Ok(u)
}

// ─── Random instance generators ──────────────────────────────────────

/// SplitMix64 step; used to derive independent per-instance seeds.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Ginibre matrix: i.i.d. standard complex Gaussian entries.
pub fn ginibre_with(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the triangular
/// factor's diagonal phases folded into Q.
pub fn random_unitary_with(rng: &mut impl Rng, dim: usize) -> CMatrix {
    let g = ginibre_with(rng, dim, dim);
    let qr = g.qr();
    let r = qr.r();
    let mut u = qr.q();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            u[(i, j)] *= phase;
        }
    }
    u
}

pub fn random_unitary(dim: usize, seed: u64) -> CMatrix {
    random_unitary_with(&mut seeded_rng(seed), dim)
}

/// Random measurement channel with completeness exact by construction:
/// Ginibre drafts `G_k` normalized as `M_k = G_k (sum_j G_j' G_j)^{-1/2}`.
pub fn random_channel_with(rng: &mut impl Rng, dim: usize, n_outcomes: usize) -> MeasurementChannel {
    assert!(dim >= 1 && n_outcomes >= 1);
    let drafts: Vec<CMatrix> = (0..n_outcomes).map(|_| ginibre_with(rng, dim, dim)).collect();
    let mut gram = CMatrix::zeros(dim, dim);
    for g in &drafts {
        gram += g.adjoint() * g;
    }
    let inv_sqrt = operators::eigh(&symmetrize(&gram)).apply(|v| 1.0 / v.max(tol::EIGENVALUE_FLOOR).sqrt());
    let operators: Vec<CMatrix> = drafts.iter().map(|g| g * &inv_sqrt).collect();
    MeasurementChannel::new(operators).expect("normalized drafts resolve the identity")
}

pub fn random_channel(dim: usize, n_outcomes: usize, seed: u64) -> MeasurementChannel {
    random_channel_with(&mut seeded_rng(seed), dim, n_outcomes)
}

/// Uninformative channel: every POVM element proportional to the identity
/// (`M_k = sqrt(w_k) U_k` with random weights and Haar unitaries).
pub fn uninformative_channel_with(rng: &mut impl Rng, dim: usize, n_outcomes: usize) -> MeasurementChannel {
    let mut weights: Vec<f64> = (0..n_outcomes).map(|_| rng.gen_range(0.2..1.0)).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let operators = weights
        .iter()
        .map(|&w| random_unitary_with(rng, dim).scale(w.sqrt()))
        .collect();
    MeasurementChannel::new(operators).expect("weights sum to one")
}

/// Projective channel commuting with `rho`: the POVM projects onto a random
/// partition of the state's eigenbasis into `n_outcomes` nonempty groups.
pub fn projective_commuting_channel_with(
    rng: &mut impl Rng,
    rho: &DensityOperator,
    n_outcomes: usize,
) -> Result<MeasurementChannel> {
    let d = rho.dim();
    if n_outcomes > d {
        return Err(Error::InvalidParameter(format!(
            "cannot split {d} eigenvectors into {n_outcomes} nonempty groups"
        )));
    }
    let basis = operators::eigh(rho.matrix()).vectors;
    // Every group gets one eigenvector up front, the rest land uniformly.
    let mut assignment: Vec<usize> = (0..d)
        .map(|i| if i < n_outcomes { i } else { rng.gen_range(0..n_outcomes) })
        .collect();
    for i in (1..d).rev() {
        let j = rng.gen_range(0..=i);
        assignment.swap(i, j);
    }
    let operators = (0..n_outcomes)
        .map(|k| {
            let mut p = CMatrix::zeros(d, d);
            for (i, &g) in assignment.iter().enumerate() {
                if g == k {
                    let col = basis.column(i);
                    p += col * col.adjoint();
                }
            }
            symmetrize(&p)
        })
        .collect();
    MeasurementChannel::new(operators)
}

/// Non-projective channel diagonal in the eigenbasis of `rho`:
/// `M_k = V diag(sqrt(p(k|i))) V'` with random conditional columns.
pub fn commuting_channel_with(
    rng: &mut impl Rng,
    rho: &DensityOperator,
    n_outcomes: usize,
) -> MeasurementChannel {
    let d = rho.dim();
    let basis = operators::eigh(rho.matrix()).vectors;
    // p(k|i): for each eigenlevel i, a random distribution over outcomes.
    let mut conditional = vec![vec![0.0f64; d]; n_outcomes];
    for i in 0..d {
        let raw: Vec<f64> = (0..n_outcomes).map(|_| rng.gen_range(0.05..1.0)).collect();
        let sum: f64 = raw.iter().sum();
        for (k, row) in conditional.iter_mut().enumerate() {
            row[i] = raw[k] / sum;
        }
    }
    let operators = conditional
        .iter()
        .map(|col| {
            let diag = operators::diagonal(&col.iter().map(|&p| p.sqrt()).collect::<Vec<_>>());
            symmetrize(&(&basis * diag * basis.adjoint()))
        })
        .collect();
    MeasurementChannel::new(operators).expect("conditional columns sum to one")
}

/// Random density operator from the Hilbert-Schmidt ensemble `GG'/tr(GG')`.
pub fn random_density_with(rng: &mut impl Rng, dim: usize) -> DensityOperator {
    let g = ginibre_with(rng, dim, dim);
    let psd = &g * g.adjoint();
    let trace = psd.trace().re;
    DensityOperator::new(psd.scale(1.0 / trace)).expect("Wishart matrix is PSD with unit trace")
}

pub fn random_density(dim: usize, seed: u64) -> DensityOperator {
    random_density_with(&mut seeded_rng(seed), dim)
}

/// Random Hermitian operator (GUE-style), entries scaled by `scale`.
pub fn random_hermitian_with(rng: &mut impl Rng, dim: usize, scale: f64) -> HermitianOperator {
    let g = ginibre_with(rng, dim, dim).scale(scale);
    HermitianOperator::new_unchecked(symmetrize(&g))
}
