//! The five-stage feedback protocol engine on `S ⊗ B_1 ⊗ ... ⊗ B_n` and the
//! second-law inequality verifiers.
//!
//! Stages: (1) canonical product initial state, (2) global unitary,
//! (3) measurement on the system factor, (4) outcome-conditioned feedback
//! unitaries, (5) outcome-independent final unitary. The engine records
//! every checkpoint state, the energy/heat/work ledger, and the
//! QC-mutual information of the pre-measurement state with the embedded
//! channel, then the verifiers evaluate each bound as an
//! [`InequalityVerdict`].
//!
//! The exact second law, the entropy inequality, and (under cycle
//! preconditions) the Clausius and two-bath bounds hold for any final state
//! reachable by the five stages; no equilibration of the finite baths is
//! assumed or simulated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::information::{qc_mutual_info, von_neumann_entropy, InformationReport};
use crate::measurement::{
    compose_schedule, measure, BranchEnsemble, MeasurementChannel, OutcomeDistribution,
};
use crate::operators::{
    eigh, max_diff, partial_trace, symmetrize, unitarity_residual, CMatrix, CompositeSpace,
    DensityOperator, HermitianOperator,
};
use crate::thermo::{free_energy, gibbs_state, BathSpec, PhysicalConstants};
use crate::tol;

// ─── Stage evolutions ────────────────────────────────────────────────

/// A stage evolution: either an explicit unitary on the full space or a
/// piecewise-constant Hamiltonian schedule (earliest segment first) standing
/// in for the time-ordered exponential.
#[derive(Debug, Clone)]
pub enum Evolution {
    Unitary(CMatrix),
    Schedule(Vec<(HermitianOperator, f64)>),
}

impl Evolution {
    pub fn identity(dim: usize) -> Self {
        Evolution::Unitary(crate::operators::identity(dim))
    }

    /// Materialize the unitary, checking dimension and unitarity.
    pub fn resolve(&self, dim: usize, constants: &PhysicalConstants) -> Result<CMatrix> {
        let u = match self {
            Evolution::Unitary(u) => {
                if u.nrows() != dim || u.ncols() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, actual: u.nrows() });
                }
                u.clone()
            }
            Evolution::Schedule(segments) => {
                let u = compose_schedule(segments, constants)?;
                if u.nrows() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, actual: u.nrows() });
                }
                u
            }
        };
        let residual = unitarity_residual(&u);
        if residual > tol::UNITARITY {
            return Err(Error::NotUnitary { residual });
        }
        Ok(u)
    }
}

// ─── Protocol specification ──────────────────────────────────────────

/// Complete description of one five-stage protocol instance. The system is
/// the first factor of `space`; baths follow in order. Interaction terms
/// live inside the stage evolutions and vanish at the endpoints by
/// construction: only the bare system Hamiltonians below define endpoint
/// energies and free energies.
#[derive(Debug, Clone)]
pub struct ProtocolSpec {
    pub space: CompositeSpace,
    pub system_hamiltonian_initial: HermitianOperator,
    pub system_hamiltonian_final: HermitianOperator,
    pub system_temperature: f64,
    pub baths: Vec<BathSpec>,
    pub stage2: Evolution,
    /// Measurement channel on the system factor (embedded as `M_k ⊗ I`).
    pub channel: MeasurementChannel,
    /// One feedback evolution per channel outcome.
    pub feedback: Vec<Evolution>,
    pub stage5: Evolution,
    pub constants: PhysicalConstants,
}

impl ProtocolSpec {
    pub fn system_label(&self) -> &str {
        &self.space.factor_labels()[0]
    }

    pub fn system_dim(&self) -> usize {
        self.space.factor_dims()[0]
    }

    pub fn validate(&self) -> Result<()> {
        if self.space.num_factors() != self.baths.len() + 1 {
            return Err(Error::InvalidSpec(format!(
                "space has {} factors but spec has {} baths",
                self.space.num_factors(),
                self.baths.len()
            )));
        }
        for (i, bath) in self.baths.iter().enumerate() {
            let label = &self.space.factor_labels()[i + 1];
            if bath.label() != label {
                return Err(Error::InvalidSpec(format!(
                    "bath {} labeled `{}` but space factor {} is `{}`",
                    i,
                    bath.label(),
                    i + 1,
                    label
                )));
            }
            let dim = self.space.factor_dims()[i + 1];
            if bath.hamiltonian().dim() != dim {
                return Err(Error::InvalidSpec(format!(
                    "bath `{}` Hamiltonian dim {} but factor dim {}",
                    bath.label(),
                    bath.hamiltonian().dim(),
                    dim
                )));
            }
        }
        let s_dim = self.system_dim();
        if self.system_hamiltonian_initial.dim() != s_dim
            || self.system_hamiltonian_final.dim() != s_dim
        {
            return Err(Error::InvalidSpec("system Hamiltonian dimension mismatch".into()));
        }
        if self.channel.dim() != s_dim {
            return Err(Error::InvalidSpec(format!(
                "channel dim {} but system dim {}",
                self.channel.dim(),
                s_dim
            )));
        }
        if self.feedback.len() != self.channel.num_outcomes() {
            return Err(Error::InvalidSpec(format!(
                "{} feedback evolutions for {} outcomes",
                self.feedback.len(),
                self.channel.num_outcomes()
            )));
        }
        if self.system_temperature <= 0.0 {
            return Err(Error::NonPositiveTemperature { temperature: self.system_temperature });
        }
        Ok(())
    }
}

// ─── Ledger ──────────────────────────────────────────────────────────

/// The scalar slice of a ledger that the work/heat verifiers consume; both
/// simulated and analytic ledgers project onto this.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerScalars {
    pub system_temperature: f64,
    pub k_b: f64,
    pub bath_labels: Vec<String>,
    pub bath_temperatures: Vec<f64>,
    /// Heat absorbed from each bath, `Q_m = E_i^Bm - E_f^Bm` (positive when
    /// energy flows out of the bath).
    pub heats: Vec<f64>,
    pub delta_u_s: f64,
    pub delta_f_s: f64,
    pub w_ext: f64,
    pub qc_mutual: f64,
}

/// Everything the five stages produce: checkpoint states, branch ensembles,
/// outcome statistics, the information report, and the full energy ledger.
#[derive(Debug, Clone)]
pub struct ProtocolLedger {
    pub rho_i: DensityOperator,
    pub rho_1: DensityOperator,
    pub rho_f: DensityOperator,
    pub branches_2: BranchEnsemble,
    pub branches_3: BranchEnsemble,
    pub outcome_dist: OutcomeDistribution,
    /// Information functionals of `rho_1` with the embedded channel.
    pub info: InformationReport,
    pub e_s_initial: f64,
    pub e_s_final: f64,
    pub e_bath_initial: Vec<f64>,
    pub e_bath_final: Vec<f64>,
    /// `Q_m = e_bath_initial[m] - e_bath_final[m]`.
    pub heats: Vec<f64>,
    pub delta_u_s: f64,
    pub delta_f_s: f64,
    /// `W_ext = sum_m Q_m - delta_u_s` (first law; definitional here).
    pub w_ext: f64,
    pub s_initial: f64,
    pub s_final: f64,
    pub system_temperature: f64,
    pub bath_labels: Vec<String>,
    pub bath_temperatures: Vec<f64>,
    pub constants: PhysicalConstants,
    /// `max_k |rho_3^(k) - rho_3|` over present branches; zero means the
    /// feedback steered every branch to the same state (the equality
    /// condition of the main bound). Diagnostic, never asserted.
    pub feedback_uniformity: f64,
    /// Max-norm gap between the staged final state and the directly composed
    /// total channel applied to the initial state.
    pub channel_composition_residual: f64,
    /// Trace distance between the final state and the canonical reference
    /// final state. Diagnostic: finite baths do not equilibrate.
    pub canonical_final_distance: f64,
}

impl ProtocolLedger {
    pub fn scalars(&self) -> LedgerScalars {
        LedgerScalars {
            system_temperature: self.system_temperature,
            k_b: self.constants.k_b,
            bath_labels: self.bath_labels.clone(),
            bath_temperatures: self.bath_temperatures.clone(),
            heats: self.heats.clone(),
            delta_u_s: self.delta_u_s,
            delta_f_s: self.delta_f_s,
            w_ext: self.w_ext,
            qc_mutual: self.info.qc_mutual,
        }
    }
}

/// Trace distance `(1/2) ||a - b||_1` between two states.
pub fn trace_distance(a: &DensityOperator, b: &DensityOperator) -> f64 {
    let diff = a.matrix() - b.matrix();
    0.5 * eigh(&symmetrize(&diff)).values.iter().map(|v| v.abs()).sum::<f64>()
}

// ─── The five stages ─────────────────────────────────────────────────

fn conjugate(u: &CMatrix, rho: &CMatrix) -> CMatrix {
    symmetrize(&(u * rho * u.adjoint()))
}

/// Execute all five stages and assemble the ledger.
pub fn run(spec: &ProtocolSpec) -> Result<ProtocolLedger> {
    spec.validate()?;
    let constants = spec.constants;
    let beta = constants.beta(spec.system_temperature)?;
    let total_dim = spec.space.total_dim();

    // Stage 1: canonical product state.
    let gibbs_s = gibbs_state(&spec.system_hamiltonian_initial, beta)?;
    let mut product = gibbs_s.matrix().clone();
    let mut bath_betas = Vec::with_capacity(spec.baths.len());
    for bath in &spec.baths {
        let beta_m = constants.beta(bath.temperature())?;
        bath_betas.push(beta_m);
        product = crate::operators::tensor(&product, gibbs_state(bath.hamiltonian(), beta_m)?.matrix());
    }
    let rho_i = DensityOperator::new(product)?;

    // Stage 2: global unitary.
    let u_i = spec.stage2.resolve(total_dim, &constants)?;
    let rho_1 = DensityOperator::new(conjugate(&u_i, rho_i.matrix()))?;

    // Stage 3: measurement on the system factor.
    let embedded = spec.channel.embed(&spec.space, spec.system_label())?;
    let (outcome_dist, branches_2) = measure(&rho_1, &embedded)?;
    let info = qc_mutual_info(&rho_1, &embedded)?;

    // Stage 4: outcome-conditioned feedback.
    let feedback_unitaries = spec
        .feedback
        .iter()
        .map(|e| e.resolve(total_dim, &constants))
        .collect::<Result<Vec<_>>>()?;
    let branches_3 = branches_2
        .map_states(|k, state| DensityOperator::new(conjugate(&feedback_unitaries[k], state.matrix())))?;

    // Stage 5: outcome-independent final unitary on the mixture.
    let rho_3 = branches_3.mixture()?;
    let u_f = spec.stage5.resolve(total_dim, &constants)?;
    let rho_f = DensityOperator::new(conjugate(&u_f, rho_3.matrix()))?;

    // Cross-check: the staged final state equals the directly composed
    // total channel sum_k (U_f U_k M_k U_i) rho_i (…)'.
    let mut direct = CMatrix::zeros(total_dim, total_dim);
    for (k, m) in embedded.operators().iter().enumerate() {
        let kraus = &u_f * &feedback_unitaries[k] * m * &u_i;
        direct += &kraus * rho_i.matrix() * kraus.adjoint();
    }
    let channel_composition_residual = max_diff(rho_f.matrix(), &symmetrize(&direct));

    // Energy ledger from the reduced states.
    let sys = spec.system_label();
    let rho_i_s = HermitianOperator::new_unchecked(partial_trace(rho_i.matrix(), &spec.space, &[sys])?);
    let rho_f_s = HermitianOperator::new_unchecked(partial_trace(rho_f.matrix(), &spec.space, &[sys])?);
    let e_s_initial = (spec.system_hamiltonian_initial.matrix() * rho_i_s.matrix()).trace().re;
    let e_s_final = (spec.system_hamiltonian_final.matrix() * rho_f_s.matrix()).trace().re;

    let mut e_bath_initial = Vec::with_capacity(spec.baths.len());
    let mut e_bath_final = Vec::with_capacity(spec.baths.len());
    for bath in &spec.baths {
        let initial = partial_trace(rho_i.matrix(), &spec.space, &[bath.label()])?;
        let fin = partial_trace(rho_f.matrix(), &spec.space, &[bath.label()])?;
        e_bath_initial.push((bath.hamiltonian().matrix() * initial).trace().re);
        e_bath_final.push((bath.hamiltonian().matrix() * fin).trace().re);
    }
    let heats: Vec<f64> = e_bath_initial.iter().zip(&e_bath_final).map(|(i, f)| i - f).collect();
    let delta_u_s = e_s_final - e_s_initial;
    let delta_f_s = free_energy(&spec.system_hamiltonian_final, beta)?
        - free_energy(&spec.system_hamiltonian_initial, beta)?;
    let w_ext = heats.iter().sum::<f64>() - delta_u_s;

    let s_initial = von_neumann_entropy(&rho_i);
    let s_final = von_neumann_entropy(&rho_f);

    let feedback_uniformity = branches_3
        .present()
        .map(|(_, state)| max_diff(state.matrix(), rho_3.matrix()))
        .fold(0.0, f64::max);

    // Canonical reference final state (never reached by finite baths).
    let mut canonical = gibbs_state(&spec.system_hamiltonian_final, beta)?.matrix().clone();
    for (bath, &beta_m) in spec.baths.iter().zip(&bath_betas) {
        canonical = crate::operators::tensor(&canonical, gibbs_state(bath.hamiltonian(), beta_m)?.matrix());
    }
    let canonical_final_distance = trace_distance(&rho_f, &DensityOperator::new(canonical)?);

    Ok(ProtocolLedger {
        rho_i,
        rho_1,
        rho_f,
        branches_2,
        branches_3,
        outcome_dist,
        info,
        e_s_initial,
        e_s_final,
        e_bath_initial,
        e_bath_final,
        heats,
        delta_u_s,
        delta_f_s,
        w_ext,
        s_initial,
        s_final,
        system_temperature: spec.system_temperature,
        bath_labels: spec.baths.iter().map(|b| b.label().to_string()).collect(),
        bath_temperatures: spec.baths.iter().map(|b| b.temperature()).collect(),
        constants,
        feedback_uniformity,
        channel_composition_residual,
        canonical_final_distance,
    })
}

// ─── Verdicts ────────────────────────────────────────────────────────

/// One evaluated inequality `lhs <= rhs`: satisfied iff the slack
/// `rhs - lhs` stays above `-tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityVerdict {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub satisfied: bool,
    pub tolerance: f64,
}

impl InequalityVerdict {
    pub fn new(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let slack = rhs - lhs;
        Self { name: name.into(), lhs, rhs, slack, satisfied: slack >= -tolerance, tolerance }
    }
}

/// A verifier whose preconditions the ledger does not meet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedVerifier {
    pub name: String,
    pub reason: String,
}

/// Entropy inequality: `S(rho_i) - S(rho_f) <= I(rho_1:X)`.
pub fn verify_entropy_inequality(ledger: &ProtocolLedger) -> InequalityVerdict {
    InequalityVerdict::new(
        "entropy_inequality",
        ledger.s_initial - ledger.s_final,
        ledger.info.qc_mutual,
        tol::INEQUALITY,
    )
}

/// The exact second law with feedback:
/// `-dU^S + sum_m (T/T_m) Q_m <= -dF^S + k_B T I`. Exact for any final
/// state; only the canonical initial state enters the derivation.
pub fn verify_exact_second_law(scalars: &LedgerScalars) -> InequalityVerdict {
    let t = scalars.system_temperature;
    let lhs = -scalars.delta_u_s
        + scalars
            .heats
            .iter()
            .zip(&scalars.bath_temperatures)
            .map(|(q, tm)| (t / tm) * q)
            .sum::<f64>();
    let rhs = -scalars.delta_f_s + scalars.k_b * t * scalars.qc_mutual;
    InequalityVerdict::new("exact_second_law", lhs, rhs, tol::INEQUALITY)
}

fn require_cycle(verifier: &'static str, scalars: &LedgerScalars) -> Result<()> {
    if scalars.delta_u_s.abs() > tol::CYCLE_PRECONDITION {
        return Err(Error::PreconditionViolated {
            verifier,
            reason: format!("|dU^S| = {:.3e} is not a cycle", scalars.delta_u_s.abs()),
        });
    }
    if scalars.delta_f_s.abs() > tol::CYCLE_PRECONDITION {
        return Err(Error::PreconditionViolated {
            verifier,
            reason: format!("|dF^S| = {:.3e} is not a cycle", scalars.delta_f_s.abs()),
        });
    }
    Ok(())
}

/// Clausius inequality `sum_m Q_m / T_m <= 0` for feedback-free cycles.
pub fn verify_clausius(scalars: &LedgerScalars) -> Result<InequalityVerdict> {
    if scalars.qc_mutual.abs() > tol::CYCLE_PRECONDITION {
        return Err(Error::PreconditionViolated {
            verifier: "clausius",
            reason: format!("I = {:.3e} is not feedback-free", scalars.qc_mutual),
        });
    }
    require_cycle("clausius", scalars)?;
    let lhs: f64 = scalars
        .heats
        .iter()
        .zip(&scalars.bath_temperatures)
        .map(|(q, tm)| q / tm)
        .sum();
    Ok(InequalityVerdict::new("clausius", lhs, 0.0, tol::INEQUALITY))
}

/// Isothermal work bound `W_ext <= -dF^S + k_B T I` for a single bath at
/// the system temperature.
pub fn verify_isothermal(scalars: &LedgerScalars) -> Result<InequalityVerdict> {
    if scalars.bath_temperatures.len() != 1 {
        return Err(Error::PreconditionViolated {
            verifier: "isothermal",
            reason: format!("{} baths, need exactly one", scalars.bath_temperatures.len()),
        });
    }
    let t = scalars.system_temperature;
    let t1 = scalars.bath_temperatures[0];
    if (t1 - t).abs() > tol::CYCLE_PRECONDITION * t.max(1.0) {
        return Err(Error::PreconditionViolated {
            verifier: "isothermal",
            reason: format!("bath temperature {t1} differs from system temperature {t}"),
        });
    }
    let rhs = -scalars.delta_f_s + scalars.k_b * t * scalars.qc_mutual;
    Ok(InequalityVerdict::new("isothermal", scalars.w_ext, rhs, tol::INEQUALITY))
}

/// Two-bath cycle bound `W_ext <= (1 - T_L/T_H) Q_H + k_B T_L I`.
pub fn verify_two_bath(
    scalars: &LedgerScalars,
    hot_label: &str,
    cold_label: &str,
) -> Result<InequalityVerdict> {
    if scalars.bath_temperatures.len() != 2 {
        return Err(Error::PreconditionViolated {
            verifier: "two_bath",
            reason: format!("{} baths, need exactly two", scalars.bath_temperatures.len()),
        });
    }
    let find = |label: &str| -> Result<usize> {
        scalars
            .bath_labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    };
    let hot = find(hot_label)?;
    let cold = find(cold_label)?;
    let t_h = scalars.bath_temperatures[hot];
    let t_l = scalars.bath_temperatures[cold];
    if t_h <= t_l {
        return Err(Error::PreconditionViolated {
            verifier: "two_bath",
            reason: format!("T_H = {t_h} must exceed T_L = {t_l}"),
        });
    }
    require_cycle("two_bath", scalars)?;
    let rhs = (1.0 - t_l / t_h) * scalars.heats[hot] + scalars.k_b * t_l * scalars.qc_mutual;
    Ok(InequalityVerdict::new("two_bath", scalars.w_ext, rhs, tol::INEQUALITY))
}

/// Run every work/heat verifier whose shape matches the ledger; verifiers
/// whose preconditions fail are reported as skipped, not violated.
pub fn applicable_verdicts(scalars: &LedgerScalars) -> (Vec<InequalityVerdict>, Vec<SkippedVerifier>) {
    let mut verdicts = vec![verify_exact_second_law(scalars)];
    let mut skipped = Vec::new();
    let mut record = |name: &str, outcome: Result<InequalityVerdict>| match outcome {
        Ok(v) => verdicts.push(v),
        Err(e) => skipped.push(SkippedVerifier { name: name.into(), reason: e.to_string() }),
    };
    record("clausius", verify_clausius(scalars));
    record("isothermal", verify_isothermal(scalars));
    if scalars.bath_temperatures.len() == 2 {
        let (hot, cold) = if scalars.bath_temperatures[0] >= scalars.bath_temperatures[1] {
            (0, 1)
        } else {
            (1, 0)
        };
        let hot_label = scalars.bath_labels[hot].clone();
        let cold_label = scalars.bath_labels[cold].clone();
        record("two_bath", verify_two_bath(scalars, &hot_label, &cold_label));
    } else {
        skipped.push(SkippedVerifier {
            name: "two_bath".into(),
            reason: format!("{} baths, need exactly two", scalars.bath_temperatures.len()),
        });
    }
    (verdicts, skipped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurement::{random_unitary_with, seeded_rng};
    use crate::operators::{diagonal, identity, max_norm, tensor};

    fn null_spec(with_bath: bool) -> ProtocolSpec {
        let (space, baths) = if with_bath {
            (
                CompositeSpace::new(vec![2, 3], vec!["S", "B1"]).unwrap(),
                vec![BathSpec::new("B1", HermitianOperator::from_real_diagonal(&[0.0, 0.5, 1.1]), 1.0)
                    .unwrap()],
            )
        } else {
            (CompositeSpace::single(2, "S").unwrap(), vec![])
        };
        let total = space.total_dim();
        ProtocolSpec {
            space,
            system_hamiltonian_initial: HermitianOperator::from_real_diagonal(&[0.0, 1.0]),
            system_hamiltonian_final: HermitianOperator::from_real_diagonal(&[0.0, 1.0]),
            system_temperature: 1.0,
            baths,
            stage2: Evolution::identity(total),
            channel: MeasurementChannel::trivial(2),
            feedback: vec![Evolution::identity(total)],
            stage5: Evolution::identity(total),
            constants: PhysicalConstants::default(),
        }
    }

    #[test]
    fn null_protocol_changes_nothing() {
        for with_bath in [false, true] {
            let ledger = run(&null_spec(with_bath)).unwrap();
            assert!(max_diff(ledger.rho_f.matrix(), ledger.rho_i.matrix()) < 1e-12);
            for q in &ledger.heats {
                assert!(q.abs() < 1e-12);
            }
            assert!(ledger.w_ext.abs() < 1e-12);
            assert!(ledger.info.qc_mutual.abs() < 1e-12);
            assert!(ledger.delta_u_s.abs() < 1e-12);
            assert!(ledger.delta_f_s.abs() < 1e-12);

            let entropy = verify_entropy_inequality(&ledger);
            assert!(entropy.satisfied && entropy.slack.abs() < 1e-10);
            let second = verify_exact_second_law(&ledger.scalars());
            assert!(second.satisfied && second.slack.abs() < 1e-10);
            assert!(ledger.channel_composition_residual < 1e-12);
        }
    }

    #[test]
    fn closed_system_work_is_energy_change() {
        let mut spec = null_spec(false);
        let mut rng = seeded_rng(5);
        spec.stage2 = Evolution::Unitary(random_unitary_with(&mut rng, 2));
        let ledger = run(&spec).unwrap();
        // No baths: W_ext = -dU^S, and the bound reduces to -dU <= -dF.
        assert!((ledger.w_ext + ledger.delta_u_s).abs() < 1e-12);
        assert!(ledger.heats.is_empty());
        let verdict = verify_exact_second_law(&ledger.scalars());
        assert!(verdict.satisfied);
        // Rotating a Gibbs state can only raise its energy.
        assert!(ledger.delta_u_s >= -1e-12);
        assert!(ledger.info.qc_mutual.abs() < 1e-12);
    }

    #[test]
    fn trivial_channel_with_shared_unitaries_preserves_entropy_bound() {
        let mut spec = null_spec(true);
        let mut rng = seeded_rng(8);
        let total = spec.space.total_dim();
        spec.stage2 = Evolution::Unitary(random_unitary_with(&mut rng, total));
        spec.feedback = vec![Evolution::Unitary(random_unitary_with(&mut rng, total))];
        spec.stage5 = Evolution::Unitary(random_unitary_with(&mut rng, total));
        let ledger = run(&spec).unwrap();
        let verdict = verify_entropy_inequality(&ledger);
        // Everything is unitary: S_i = S_f, I = 0.
        assert!(verdict.lhs.abs() < 1e-10);
        assert!(verdict.rhs.abs() < 1e-10);
        assert!(verdict.satisfied);
    }

    #[test]
    fn measurement_only_protocol_obeys_exact_law() {
        // No baths at all: -dU <= -dF + k_B T I still holds for an
        // informative measurement with feedback.
        for seed in 0..20 {
            let mut rng = seeded_rng(seed);
            let spec = ProtocolSpec {
                space: CompositeSpace::single(3, "S").unwrap(),
                system_hamiltonian_initial: crate::measurement::random_hermitian_with(&mut rng, 3, 1.0),
                system_hamiltonian_final: crate::measurement::random_hermitian_with(&mut rng, 3, 1.0),
                system_temperature: 1.0,
                baths: vec![],
                stage2: Evolution::Unitary(random_unitary_with(&mut rng, 3)),
                channel: crate::measurement::random_channel_with(&mut rng, 3, 2),
                feedback: vec![
                    Evolution::Unitary(random_unitary_with(&mut rng, 3)),
                    Evolution::Unitary(random_unitary_with(&mut rng, 3)),
                ],
                stage5: Evolution::Unitary(random_unitary_with(&mut rng, 3)),
                constants: PhysicalConstants::default(),
            };
            let ledger = run(&spec).unwrap();
            assert!(verify_exact_second_law(&ledger.scalars()).satisfied, "seed {seed}");
            assert!(verify_entropy_inequality(&ledger).satisfied, "seed {seed}");
            assert!((ledger.w_ext + ledger.delta_u_s).abs() < 1e-12);
        }
    }

    #[test]
    fn unitary_stages_preserve_entropy() {
        let spec = crate::campaign::random_protocol_spec(11, 2, &[4], 2).unwrap();
        let ledger = run(&spec).unwrap();
        assert!((von_neumann_entropy(&ledger.rho_1) - ledger.s_initial).abs() < 1e-9);
        for ((_, before), (_, after)) in ledger.branches_2.present().zip(ledger.branches_3.present()) {
            assert!((von_neumann_entropy(before) - von_neumann_entropy(after)).abs() < 1e-9);
        }
    }

    #[test]
    fn convexity_of_mixture_entropy() {
        for seed in 0..20 {
            let spec = crate::campaign::random_protocol_spec(seed, 2, &[4], 2).unwrap();
            let ledger = run(&spec).unwrap();
            let mixture = ledger.branches_3.mixture().unwrap();
            let mixed_entropy = von_neumann_entropy(&mixture);
            let average: f64 = ledger
                .branches_3
                .present()
                .map(|(p, s)| p * von_neumann_entropy(s))
                .sum();
            assert!(mixed_entropy >= average - 1e-9);
        }
    }

    #[test]
    fn staged_final_state_matches_composed_channel() {
        for seed in 0..100 {
            let spec = crate::campaign::random_protocol_spec(seed, 2, &[4], 2).unwrap();
            let ledger = run(&spec).unwrap();
            assert!(
                ledger.channel_composition_residual < 1e-9,
                "seed {seed}: residual {}",
                ledger.channel_composition_residual
            );
        }
    }

    #[test]
    fn outcome_relabeling_leaves_ledger_scalars_unchanged() {
        let spec = crate::campaign::random_protocol_spec(17, 2, &[4], 3).unwrap();
        let ledger = run(&spec).unwrap();

        let perm = [2usize, 0, 1];
        let mut permuted = spec.clone();
        permuted.channel = spec.channel.permuted(&perm).unwrap();
        permuted.feedback = perm.iter().map(|&p| spec.feedback[p].clone()).collect();
        let ledger_p = run(&permuted).unwrap();

        assert!((ledger.w_ext - ledger_p.w_ext).abs() < 1e-10);
        assert!((ledger.delta_u_s - ledger_p.delta_u_s).abs() < 1e-10);
        assert!((ledger.delta_f_s - ledger_p.delta_f_s).abs() < 1e-10);
        assert!((ledger.info.qc_mutual - ledger_p.info.qc_mutual).abs() < 1e-10);
        assert!((ledger.s_initial - ledger_p.s_initial).abs() < 1e-10);
        assert!((ledger.s_final - ledger_p.s_final).abs() < 1e-10);
        for (a, b) in ledger.heats.iter().zip(&ledger_p.heats) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn first_law_identity_is_exact() {
        for seed in 0..20 {
            let spec = crate::campaign::random_protocol_spec(seed, 2, &[4, 4], 2).unwrap();
            let ledger = run(&spec).unwrap();
            let residual = ledger.w_ext - ledger.heats.iter().sum::<f64>() + ledger.delta_u_s;
            assert!(residual.abs() < 1e-10);
        }
    }

    #[test]
    fn stored_states_have_unit_trace() {
        let spec = crate::campaign::random_protocol_spec(23, 2, &[4], 2).unwrap();
        let ledger = run(&spec).unwrap();
        for state in [&ledger.rho_i, &ledger.rho_1, &ledger.rho_f] {
            assert!((state.matrix().trace().re - 1.0).abs() < 1e-9);
        }
        for (_, s) in ledger.branches_2.present().chain(ledger.branches_3.present()) {
            assert!((s.matrix().trace().re - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn clausius_rejects_feedback_and_non_cycles() {
        let spec = crate::campaign::random_protocol_spec(31, 2, &[4], 2).unwrap();
        let ledger = run(&spec).unwrap();
        // Random spec: dU != 0 and I > 0, so the cycle preconditions fail.
        assert!(matches!(
            verify_clausius(&ledger.scalars()),
            Err(Error::PreconditionViolated { .. })
        ));
    }

    #[test]
    fn isothermal_rejects_multi_bath_and_detuned_ledgers() {
        let spec = crate::campaign::random_protocol_spec(37, 2, &[4, 4], 2).unwrap();
        let ledger = run(&spec).unwrap();
        assert!(matches!(
            verify_isothermal(&ledger.scalars()),
            Err(Error::PreconditionViolated { .. })
        ));

        let mut scalars = ledger.scalars();
        scalars.bath_temperatures = vec![scalars.system_temperature * 2.0];
        scalars.bath_labels = vec!["B1".into()];
        scalars.heats = vec![0.0];
        assert!(matches!(
            verify_isothermal(&scalars),
            Err(Error::PreconditionViolated { .. })
        ));
    }

    #[test]
    fn two_bath_rejects_bad_ordering_and_labels() {
        let scalars = LedgerScalars {
            system_temperature: 1.0,
            k_b: 1.0,
            bath_labels: vec!["BH".into(), "BL".into()],
            bath_temperatures: vec![2.0, 1.0],
            heats: vec![1.0, -0.55],
            delta_u_s: 0.0,
            delta_f_s: 0.0,
            w_ext: 0.45,
            qc_mutual: 0.0,
        };
        assert!(verify_two_bath(&scalars, "BH", "BL").unwrap().satisfied);
        assert!(matches!(
            verify_two_bath(&scalars, "BL", "BH"),
            Err(Error::PreconditionViolated { .. })
        ));
        assert!(matches!(verify_two_bath(&scalars, "BX", "BL"), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn spec_validation_catches_mismatches() {
        let mut spec = null_spec(true);
        spec.feedback = vec![];
        assert!(matches!(spec.validate(), Err(Error::InvalidSpec(_))));

        let mut spec = null_spec(true);
        spec.channel = MeasurementChannel::trivial(3);
        assert!(matches!(spec.validate(), Err(Error::InvalidSpec(_))));

        let mut spec = null_spec(true);
        spec.baths = vec![BathSpec::new("B2", HermitianOperator::zero(3), 1.0).unwrap()];
        assert!(matches!(spec.validate(), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn evolution_resolution_checks_unitarity_and_dims() {
        let constants = PhysicalConstants::default();
        let not_unitary = Evolution::Unitary(identity(2).scale(0.9));
        assert!(matches!(not_unitary.resolve(2, &constants), Err(Error::NotUnitary { .. })));
        let wrong_dim = Evolution::identity(3);
        assert!(matches!(wrong_dim.resolve(2, &constants), Err(Error::DimensionMismatch { .. })));

        let schedule = Evolution::Schedule(vec![
            (HermitianOperator::from_real_diagonal(&[0.0, 1.0]), 0.4),
            (HermitianOperator::from_real_diagonal(&[0.5, -0.5]), 1.3),
        ]);
        let u = schedule.resolve(2, &constants).unwrap();
        assert!(unitarity_residual(&u) < 1e-12);
    }

    #[test]
    fn scheduled_protocol_matches_explicit_unitary() {
        // The same physical evolution given as a schedule or as its
        // resolved unitary must produce identical ledgers.
        let mut rng = seeded_rng(41);
        let constants = PhysicalConstants::default();
        let mut spec = null_spec(true);
        let total = spec.space.total_dim();
        let h1 = crate::measurement::random_hermitian_with(&mut rng, total, 1.0);
        let h2 = crate::measurement::random_hermitian_with(&mut rng, total, 1.0);
        let schedule = vec![(h1, 0.8), (h2, 0.5)];
        spec.stage2 = Evolution::Schedule(schedule.clone());
        let ledger_schedule = run(&spec).unwrap();

        spec.stage2 = Evolution::Unitary(compose_schedule(&schedule, &constants).unwrap());
        let ledger_unitary = run(&spec).unwrap();
        assert!(max_diff(ledger_schedule.rho_f.matrix(), ledger_unitary.rho_f.matrix()) < 1e-12);
        assert!((ledger_schedule.w_ext - ledger_unitary.w_ext).abs() < 1e-12);
    }

    #[test]
    fn feedback_uniformity_diagnostic_detects_perfect_feedback() {
        // Qubit, projective measurement, feedback flips outcome 1 to state 0:
        // every branch lands on |0><0|, so the diagnostic is ~0.
        let space = CompositeSpace::single(2, "S").unwrap();
        let flip = crate::operators::matrix_from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]);
        let spec = ProtocolSpec {
            space,
            system_hamiltonian_initial: HermitianOperator::zero(2),
            system_hamiltonian_final: HermitianOperator::zero(2),
            system_temperature: 1.0,
            baths: vec![],
            stage2: Evolution::identity(2),
            channel: MeasurementChannel::projective_computational(2),
            feedback: vec![Evolution::identity(2), Evolution::Unitary(flip)],
            stage5: Evolution::identity(2),
            constants: PhysicalConstants::default(),
        };
        let ledger = run(&spec).unwrap();
        assert!(ledger.feedback_uniformity < 1e-12);
        assert!(max_diff(ledger.rho_f.matrix(), &diagonal(&[1.0, 0.0])) < 1e-12);
        // Perfect feedback on the maximally mixed state extracts the full
        // entropy difference: S_i - S_f = ln 2 = I.
        let verdict = verify_entropy_inequality(&ledger);
        assert!(verdict.slack.abs() < 1e-10);
    }

    #[test]
    fn product_state_marginals_match_factors() {
        let spec = null_spec(true);
        let ledger = run(&spec).unwrap();
        let beta = 1.0;
        let gibbs_s = gibbs_state(&spec.system_hamiltonian_initial, beta).unwrap();
        let gibbs_b = gibbs_state(spec.baths[0].hamiltonian(), 1.0).unwrap();
        let expect = tensor(gibbs_s.matrix(), gibbs_b.matrix());
        assert!(max_diff(ledger.rho_i.matrix(), &expect) < 1e-12);
        assert!(max_norm(&expect) <= 1.0);
    }
}
