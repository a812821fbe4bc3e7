//! Randomized verification campaigns: draw seeded protocol or
//! (state, channel) instances, evaluate every applicable bound, and
//! aggregate verdict counts and worst slacks into a reproducible report.
//!
//! Instance seeds derive from the campaign seed by a SplitMix64 step, so
//! instances are independent and the campaign parallelizes over them;
//! aggregation runs in index order afterwards, which keeps reports
//! byte-identical for identical configs.

use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::information::{dij_matrix, qc_mutual_info, sigma_pair, von_neumann_entropy};
use crate::measurement::{
    mix_seed, random_channel_with, random_density_with, random_hermitian_with, random_unitary_with,
    seeded_rng, uninformative_channel_with, MeasurementChannel,
};
use crate::operators::{max_diff, partial_trace, CompositeSpace, HermitianOperator};
use crate::protocol::{
    run, verify_clausius, verify_entropy_inequality, verify_exact_second_law, verify_isothermal,
    verify_two_bath, Evolution, InequalityVerdict, ProtocolSpec,
};
use crate::thermo::{BathSpec, PhysicalConstants};
use crate::tol;

// ─── Random protocol specs ───────────────────────────────────────────

fn bath_labels(n: usize) -> Vec<String> {
    (1..=n).map(|m| format!("B{m}")).collect()
}

fn build_space(system_dim: usize, bath_dims: &[usize]) -> Result<CompositeSpace> {
    let mut dims = vec![system_dim];
    dims.extend_from_slice(bath_dims);
    let mut labels = vec!["S".to_string()];
    labels.extend(bath_labels(bath_dims.len()));
    CompositeSpace::new(dims, labels)
}

/// Generic random protocol: random endpoint Hamiltonians, Haar stage and
/// feedback unitaries, random measurement channel. The system temperature
/// equals the first bath's temperature (or is drawn itself when there is no
/// bath), so the single-bath case is isothermal by construction.
pub fn random_protocol_spec_with(
    rng: &mut impl Rng,
    system_dim: usize,
    bath_dims: &[usize],
    n_outcomes: usize,
) -> Result<ProtocolSpec> {
    let space = build_space(system_dim, bath_dims)?;
    let total = space.total_dim();
    let baths = bath_dims
        .iter()
        .enumerate()
        .map(|(m, &dim)| {
            let h = random_hermitian_with(rng, dim, 1.0);
            let t = rng.gen_range(0.5..2.0);
            BathSpec::new(format!("B{}", m + 1), h, t)
        })
        .collect::<Result<Vec<_>>>()?;
    let system_temperature =
        baths.first().map(BathSpec::temperature).unwrap_or_else(|| rng.gen_range(0.5..2.0));
    let channel = random_channel_with(rng, system_dim, n_outcomes);
    let feedback =
        (0..n_outcomes).map(|_| Evolution::Unitary(random_unitary_with(rng, total))).collect();
    Ok(ProtocolSpec {
        space,
        system_hamiltonian_initial: random_hermitian_with(rng, system_dim, 1.0),
        system_hamiltonian_final: random_hermitian_with(rng, system_dim, 1.0),
        system_temperature,
        baths,
        stage2: Evolution::Unitary(random_unitary_with(rng, total)),
        channel,
        feedback,
        stage5: Evolution::Unitary(random_unitary_with(rng, total)),
        constants: PhysicalConstants::default(),
    })
}

pub fn random_protocol_spec(
    seed: u64,
    system_dim: usize,
    bath_dims: &[usize],
    n_outcomes: usize,
) -> Result<ProtocolSpec> {
    random_protocol_spec_with(&mut seeded_rng(seed), system_dim, bath_dims, n_outcomes)
}

/// Cyclic protocol: the system Hamiltonian vanishes at both endpoints, so
/// `dU^S = dF^S = 0` exactly and the Clausius / two-bath cycle
/// preconditions hold. With `feedback = false` the channel is trivial or
/// uninformative (no information gain); otherwise it is a generic random
/// channel. Two-bath instances draw strictly ordered temperatures, hot bath
/// position randomized.
pub fn cyclic_protocol_spec_with(
    rng: &mut impl Rng,
    system_dim: usize,
    bath_dims: &[usize],
    n_outcomes: usize,
    feedback: bool,
) -> Result<ProtocolSpec> {
    let space = build_space(system_dim, bath_dims)?;
    let total = space.total_dim();

    let temps: Vec<f64> = if bath_dims.len() == 2 {
        let t_low = rng.gen_range(0.5..1.5);
        let t_high = t_low + rng.gen_range(0.25..1.5);
        if rng.gen_bool(0.5) {
            vec![t_high, t_low]
        } else {
            vec![t_low, t_high]
        }
    } else {
        (0..bath_dims.len()).map(|_| rng.gen_range(0.5..2.0)).collect()
    };
    let baths = bath_dims
        .iter()
        .enumerate()
        .map(|(m, &dim)| {
            let h = random_hermitian_with(rng, dim, 1.0);
            BathSpec::new(format!("B{}", m + 1), h, temps[m])
        })
        .collect::<Result<Vec<_>>>()?;
    let system_temperature =
        baths.first().map(BathSpec::temperature).unwrap_or_else(|| rng.gen_range(0.5..2.0));

    let channel = if feedback {
        random_channel_with(rng, system_dim, n_outcomes)
    } else if rng.gen_bool(0.5) {
        MeasurementChannel::trivial(system_dim)
    } else {
        uninformative_channel_with(rng, system_dim, n_outcomes)
    };
    let feedback_evolutions = (0..channel.num_outcomes())
        .map(|_| Evolution::Unitary(random_unitary_with(rng, total)))
        .collect();
    Ok(ProtocolSpec {
        space,
        system_hamiltonian_initial: HermitianOperator::zero(system_dim),
        system_hamiltonian_final: HermitianOperator::zero(system_dim),
        system_temperature,
        baths,
        stage2: Evolution::Unitary(random_unitary_with(rng, total)),
        channel,
        feedback: feedback_evolutions,
        stage5: Evolution::Unitary(random_unitary_with(rng, total)),
        constants: PhysicalConstants::default(),
    })
}

// ─── Campaign configuration ──────────────────────────────────────────

/// What each campaign instance exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CampaignMode {
    /// Full five-stage protocols with generic random ingredients.
    Protocol,
    /// Cyclic protocols without information gain: Clausius reduction.
    CyclicFeedbackFree,
    /// Cyclic protocols with measurement and feedback: two-bath bound.
    CyclicFeedback,
    /// No dynamics: random (state, channel) pairs and the information-
    /// functional bounds and proof constructions.
    Information,
}

impl std::str::FromStr for CampaignMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "protocol" => Ok(Self::Protocol),
            "cyclic-feedback-free" => Ok(Self::CyclicFeedbackFree),
            "cyclic-feedback" => Ok(Self::CyclicFeedback),
            "information" => Ok(Self::Information),
            other => Err(Error::InvalidParameter(format!("unknown campaign mode `{other}`"))),
        }
    }
}

impl std::fmt::Display for CampaignMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Self::Protocol => "protocol",
            Self::CyclicFeedbackFree => "cyclic-feedback-free",
            Self::CyclicFeedback => "cyclic-feedback",
            Self::Information => "information",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub seed: u64,
    pub n_instances: usize,
    /// System dimensions to draw from (state dimensions in information mode).
    pub system_dims: Vec<usize>,
    /// Bath dimensions to draw from (per bath).
    pub bath_dims: Vec<usize>,
    /// Inclusive range of outcome counts.
    pub n_outcomes_range: (usize, usize),
    /// Inclusive range of bath counts.
    pub n_baths_range: (usize, usize),
    /// Overrides every verdict tolerance when set; otherwise each check
    /// keeps its own pinned tolerance.
    pub tolerance: Option<f64>,
    pub mode: CampaignMode,
    /// Record per-instance verdicts in the report.
    pub include_instances: bool,
}

impl CampaignConfig {
    /// Information-mode defaults: dims and outcomes 2..=4.
    pub fn information(seed: u64, n_instances: usize) -> Self {
        Self {
            seed,
            n_instances,
            system_dims: vec![2, 3, 4],
            bath_dims: vec![],
            n_outcomes_range: (2, 4),
            n_baths_range: (0, 0),
            tolerance: None,
            mode: CampaignMode::Information,
            include_instances: false,
        }
    }

    /// Protocol-mode defaults: qubit system, one bath of dimension 4 to 8.
    pub fn protocol(seed: u64, n_instances: usize) -> Self {
        Self {
            seed,
            n_instances,
            system_dims: vec![2],
            bath_dims: vec![4, 5, 6, 7, 8],
            n_outcomes_range: (2, 3),
            n_baths_range: (1, 1),
            tolerance: None,
            mode: CampaignMode::Protocol,
            include_instances: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_instances == 0 {
            return Err(Error::InvalidParameter("n_instances must be at least 1".into()));
        }
        if self.system_dims.is_empty() || self.system_dims.contains(&0) {
            return Err(Error::InvalidParameter("system_dims must be nonempty positive".into()));
        }
        let (olo, ohi) = self.n_outcomes_range;
        if olo == 0 || olo > ohi {
            return Err(Error::InvalidParameter(format!("bad outcome range {olo}..{ohi}")));
        }
        let (blo, bhi) = self.n_baths_range;
        if blo > bhi {
            return Err(Error::InvalidParameter(format!("bad bath range {blo}..{bhi}")));
        }
        if self.mode != CampaignMode::Information
            && bhi > 0
            && (self.bath_dims.is_empty() || self.bath_dims.contains(&0))
        {
            return Err(Error::InvalidParameter("bath_dims must be nonempty positive".into()));
        }
        if matches!(self.mode, CampaignMode::CyclicFeedbackFree | CampaignMode::CyclicFeedback) && blo == 0
        {
            return Err(Error::InvalidParameter("cyclic modes need at least one bath".into()));
        }
        if let Some(t) = self.tolerance {
            if t <= 0.0 {
                return Err(Error::InvalidParameter(format!("tolerance {t} must be positive")));
            }
        }
        Ok(())
    }
}

// ─── Campaign report ─────────────────────────────────────────────────

/// Aggregate over all instances for one named inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictSummary {
    pub name: String,
    pub checked: usize,
    pub satisfied: usize,
    pub worst_slack: f64,
    /// Instance seed achieving the worst slack (first such instance wins).
    pub worst_instance_seed: u64,
    pub worst_instance_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFailure {
    pub index: usize,
    pub seed: u64,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub index: usize,
    pub seed: u64,
    pub verdicts: Vec<InequalityVerdict>,
}

/// Outcome of a whole campaign. `wall_time` is measured, never serialized:
/// reports must be byte-identical across reruns of the same config.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CampaignReport {
    pub config: CampaignConfig,
    pub instances_run: usize,
    pub instances_failed: usize,
    pub total_checked: usize,
    pub total_violations: usize,
    pub summaries: Vec<VerdictSummary>,
    pub failures: Vec<InstanceFailure>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instances: Option<Vec<InstanceRecord>>,
    #[serde(skip, default)]
    pub wall_time: Duration,
}

impl CampaignReport {
    pub fn all_satisfied(&self) -> bool {
        self.total_violations == 0 && self.instances_failed == 0
    }

    pub fn summary(&self, name: &str) -> Option<&VerdictSummary> {
        self.summaries.iter().find(|s| s.name == name)
    }
}

// ─── Instance evaluation ─────────────────────────────────────────────

fn choose<'a, T>(rng: &mut impl Rng, items: &'a [T]) -> &'a T {
    &items[rng.gen_range(0..items.len())]
}

fn draw_range(rng: &mut impl Rng, (lo, hi): (usize, usize)) -> usize {
    rng.gen_range(lo..=hi)
}

fn override_tol(v: InequalityVerdict, tolerance: Option<f64>) -> InequalityVerdict {
    match tolerance {
        Some(t) => InequalityVerdict::new(v.name, v.lhs, v.rhs, t),
        None => v,
    }
}

fn information_instance(rng: &mut impl Rng, config: &CampaignConfig) -> Result<Vec<InequalityVerdict>> {
    let dim = *choose(rng, &config.system_dims);
    let n_outcomes = draw_range(rng, config.n_outcomes_range);
    let rho = random_density_with(rng, dim);
    let channel = random_channel_with(rng, dim, n_outcomes);

    let report = qc_mutual_info(&rho, &channel)?;
    let pair = sigma_pair(&rho, &channel)?;
    let dij = dij_matrix(&rho, &channel)?;

    let bound_tol = config.tolerance.unwrap_or(tol::CLOSED_FORM);
    let chain_tol = config.tolerance.unwrap_or(tol::SPECTRAL_CHAIN);

    let s1 = von_neumann_entropy(&pair.sigma1);
    let s2 = von_neumann_entropy(&pair.sigma2);
    let q_marginal = partial_trace(pair.sigma1.matrix(), pair.space(), &["Q"])?;
    let marginal_residual = max_diff(&q_marginal, rho.matrix());
    let stochastic_residual = (0..dim)
        .flat_map(|i| [(dij.row(i).sum() - 1.0).abs(), (dij.column(i).sum() - 1.0).abs()])
        .fold(0.0, f64::max);

    Ok(vec![
        InequalityVerdict::new("qc_nonnegative", 0.0, report.qc_mutual, bound_tol),
        InequalityVerdict::new("qc_le_shannon", report.qc_mutual, report.shannon, bound_tol),
        InequalityVerdict::new(
            "decomposition_identity",
            (report.qc_mutual - (report.holevo_chi - report.delta_s_meas)).abs(),
            0.0,
            chain_tol,
        ),
        InequalityVerdict::new("sigma_entropy_agreement", (s1 - s2).abs(), 0.0, chain_tol),
        InequalityVerdict::new(
            "h_tilde_equals_sigma2_entropy",
            (s2 - report.h_tilde).abs(),
            0.0,
            chain_tol,
        ),
        InequalityVerdict::new("sigma1_marginal", marginal_residual, 0.0, bound_tol),
        InequalityVerdict::new("dij_doubly_stochastic", stochastic_residual, 0.0, chain_tol),
        InequalityVerdict::new(
            "h_tilde_subadditivity",
            report.h_tilde,
            report.s_rho + report.shannon,
            bound_tol,
        ),
    ])
}

fn draw_bath_dims(rng: &mut impl Rng, config: &CampaignConfig) -> Vec<usize> {
    let n_baths = draw_range(rng, config.n_baths_range);
    (0..n_baths).map(|_| *choose(rng, &config.bath_dims)).collect()
}

fn protocol_instance(rng: &mut impl Rng, config: &CampaignConfig) -> Result<Vec<InequalityVerdict>> {
    let system_dim = *choose(rng, &config.system_dims);
    let bath_dims = draw_bath_dims(rng, config);
    let n_outcomes = draw_range(rng, config.n_outcomes_range);
    let spec = random_protocol_spec_with(rng, system_dim, &bath_dims, n_outcomes)?;
    let ledger = run(&spec)?;
    let scalars = ledger.scalars();
    let mut verdicts = vec![
        override_tol(verify_entropy_inequality(&ledger), config.tolerance),
        override_tol(verify_exact_second_law(&scalars), config.tolerance),
    ];
    if scalars.bath_temperatures.len() == 1 {
        verdicts.push(override_tol(verify_isothermal(&scalars)?, config.tolerance));
    }
    Ok(verdicts)
}

fn cyclic_instance(
    rng: &mut impl Rng,
    config: &CampaignConfig,
    feedback: bool,
) -> Result<Vec<InequalityVerdict>> {
    let system_dim = *choose(rng, &config.system_dims);
    let bath_dims = draw_bath_dims(rng, config);
    let n_outcomes = draw_range(rng, config.n_outcomes_range);
    let spec = cyclic_protocol_spec_with(rng, system_dim, &bath_dims, n_outcomes, feedback)?;
    let ledger = run(&spec)?;
    let scalars = ledger.scalars();
    let mut verdicts = vec![
        override_tol(verify_entropy_inequality(&ledger), config.tolerance),
        override_tol(verify_exact_second_law(&scalars), config.tolerance),
    ];
    if !feedback {
        verdicts.push(override_tol(verify_clausius(&scalars)?, config.tolerance));
    }
    if scalars.bath_temperatures.len() == 2 {
        let (hot, cold) = if scalars.bath_temperatures[0] >= scalars.bath_temperatures[1] {
            (0, 1)
        } else {
            (1, 0)
        };
        verdicts.push(override_tol(
            verify_two_bath(
                &scalars,
                &scalars.bath_labels[hot].clone(),
                &scalars.bath_labels[cold].clone(),
            )?,
            config.tolerance,
        ));
    }
    Ok(verdicts)
}

struct InstanceOutcome {
    index: usize,
    seed: u64,
    result: std::result::Result<Vec<InequalityVerdict>, String>,
}

fn run_instance(config: &CampaignConfig, index: usize) -> InstanceOutcome {
    let seed = mix_seed(config.seed, index as u64);
    let mut rng = seeded_rng(seed);
    let result = match config.mode {
        CampaignMode::Information => information_instance(&mut rng, config),
        CampaignMode::Protocol => protocol_instance(&mut rng, config),
        CampaignMode::CyclicFeedbackFree => cyclic_instance(&mut rng, config, false),
        CampaignMode::CyclicFeedback => cyclic_instance(&mut rng, config, true),
    };
    InstanceOutcome { index, seed, result: result.map_err(|e| e.to_string()) }
}

/// Run the whole campaign. Instance failures are recorded in the report,
/// never thrown; only a malformed config errors.
pub fn random_campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    config.validate()?;
    let start = Instant::now();

    let outcomes: Vec<InstanceOutcome> =
        (0..config.n_instances).into_par_iter().map(|i| run_instance(config, i)).collect();

    let mut summaries: std::collections::BTreeMap<String, VerdictSummary> = Default::default();
    let mut failures = Vec::new();
    let mut records = Vec::new();
    let mut total_checked = 0;
    let mut total_violations = 0;
    let mut instances_failed = 0;

    for outcome in &outcomes {
        match &outcome.result {
            Ok(verdicts) => {
                for v in verdicts {
                    total_checked += 1;
                    if !v.satisfied {
                        total_violations += 1;
                    }
                    let entry = summaries.entry(v.name.clone()).or_insert_with(|| VerdictSummary {
                        name: v.name.clone(),
                        checked: 0,
                        satisfied: 0,
                        worst_slack: f64::INFINITY,
                        worst_instance_seed: 0,
                        worst_instance_index: 0,
                    });
                    entry.checked += 1;
                    if v.satisfied {
                        entry.satisfied += 1;
                    }
                    if v.slack < entry.worst_slack {
                        entry.worst_slack = v.slack;
                        entry.worst_instance_seed = outcome.seed;
                        entry.worst_instance_index = outcome.index;
                    }
                }
                if config.include_instances {
                    records.push(InstanceRecord {
                        index: outcome.index,
                        seed: outcome.seed,
                        verdicts: verdicts.clone(),
                    });
                }
            }
            Err(message) => {
                instances_failed += 1;
                failures.push(InstanceFailure {
                    index: outcome.index,
                    seed: outcome.seed,
                    error: message.clone(),
                });
            }
        }
    }

    Ok(CampaignReport {
        config: config.clone(),
        instances_run: config.n_instances,
        instances_failed,
        total_checked,
        total_violations,
        summaries: summaries.into_values().collect(),
        failures,
        instances: if config.include_instances { Some(records) } else { None },
        wall_time: start.elapsed(),
    })
}
