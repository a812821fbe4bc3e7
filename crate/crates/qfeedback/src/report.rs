//! Machine-readable reports and the protocol-spec wire format.
//!
//! JSON reports are UTF-8 with struct-declaration key order and
//! shortest-round-trip float formatting, so identical inputs produce
//! byte-identical files. Every report carries `schema_version` and a `kind`
//! tag. Matrices on the wire are nested arrays of `[re, im]` pairs in
//! row-major order; protocol specs serialized this way feed `verify-file`
//! for cross-implementation comparison.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::campaign::CampaignReport;
use crate::error::{Error, Result};
use crate::information::InformationReport;
use crate::operators::{CMatrix, Complex64, CompositeSpace, HermitianOperator};
use crate::protocol::{
    applicable_verdicts, verify_entropy_inequality, Evolution, InequalityVerdict, ProtocolLedger,
    ProtocolSpec, SkippedVerifier,
};
use crate::scenarios::AnalyticLedger;
use crate::thermo::{BathSpec, PhysicalConstants};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

// ─── Wire matrices ───────────────────────────────────────────────────

/// Row-major nested arrays of `[re, im]` pairs.
pub type WireMatrix = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_wire(m: &CMatrix) -> WireMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_wire(w: &WireMatrix) -> Result<CMatrix> {
    let rows = w.len();
    if rows == 0 {
        return Err(Error::InvalidSpec("empty wire matrix".into()));
    }
    let cols = w[0].len();
    for row in w {
        if row.len() != cols {
            return Err(Error::InvalidSpec("ragged wire matrix".into()));
        }
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| Complex64::new(w[i][j][0], w[i][j][1])))
}

// ─── Wire protocol spec ──────────────────────────────────────────────

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireSpace {
    pub factor_dims: Vec<usize>,
    pub factor_labels: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireBath {
    pub label: String,
    pub temperature: f64,
    pub hamiltonian: WireMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireSegment {
    pub hamiltonian: WireMatrix,
    pub duration: f64,
}

/// A stage evolution on the wire: either `{"unitary": ...}` or
/// `{"schedule": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WireEvolution {
    Unitary(WireMatrix),
    Schedule(Vec<WireSegment>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireChannel {
    pub operators: Vec<WireMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome_labels: Option<Vec<String>>,
}

/// JSON-serializable protocol spec (the `verify-file` input schema).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireProtocolSpec {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub space: WireSpace,
    pub system_hamiltonian_initial: WireMatrix,
    pub system_hamiltonian_final: WireMatrix,
    pub system_temperature: f64,
    pub baths: Vec<WireBath>,
    pub stage2: WireEvolution,
    pub channel: WireChannel,
    pub feedback: Vec<WireEvolution>,
    pub stage5: WireEvolution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<PhysicalConstants>,
}

fn default_schema_version() -> u32 {
    REPORT_SCHEMA_VERSION
}

fn evolution_to_wire(e: &Evolution) -> WireEvolution {
    match e {
        Evolution::Unitary(u) => WireEvolution::Unitary(matrix_to_wire(u)),
        Evolution::Schedule(segments) => WireEvolution::Schedule(
            segments
                .iter()
                .map(|(h, duration)| WireSegment {
                    hamiltonian: matrix_to_wire(h.matrix()),
                    duration: *duration,
                })
                .collect(),
        ),
    }
}

fn evolution_from_wire(w: &WireEvolution) -> Result<Evolution> {
    Ok(match w {
        WireEvolution::Unitary(m) => Evolution::Unitary(matrix_from_wire(m)?),
        WireEvolution::Schedule(segments) => Evolution::Schedule(
            segments
                .iter()
                .map(|s| Ok((HermitianOperator::new(matrix_from_wire(&s.hamiltonian)?)?, s.duration)))
                .collect::<Result<Vec<_>>>()?,
        ),
    })
}

pub fn protocol_spec_to_wire(spec: &ProtocolSpec) -> WireProtocolSpec {
    WireProtocolSpec {
        schema_version: REPORT_SCHEMA_VERSION,
        space: WireSpace {
            factor_dims: spec.space.factor_dims().to_vec(),
            factor_labels: spec.space.factor_labels().to_vec(),
        },
        system_hamiltonian_initial: matrix_to_wire(spec.system_hamiltonian_initial.matrix()),
        system_hamiltonian_final: matrix_to_wire(spec.system_hamiltonian_final.matrix()),
        system_temperature: spec.system_temperature,
        baths: spec
            .baths
            .iter()
            .map(|b| WireBath {
                label: b.label().to_string(),
                temperature: b.temperature(),
                hamiltonian: matrix_to_wire(b.hamiltonian().matrix()),
            })
            .collect(),
        stage2: evolution_to_wire(&spec.stage2),
        channel: WireChannel {
            operators: spec.channel.operators().iter().map(matrix_to_wire).collect(),
            outcome_labels: Some(spec.channel.outcome_labels().to_vec()),
        },
        feedback: spec.feedback.iter().map(evolution_to_wire).collect(),
        stage5: evolution_to_wire(&spec.stage5),
        constants: Some(spec.constants),
    }
}

pub fn protocol_spec_from_wire(wire: &WireProtocolSpec) -> Result<ProtocolSpec> {
    let space =
        CompositeSpace::new(wire.space.factor_dims.clone(), wire.space.factor_labels.clone())?;
    let baths = wire
        .baths
        .iter()
        .map(|b| {
            BathSpec::new(
                b.label.clone(),
                HermitianOperator::new(matrix_from_wire(&b.hamiltonian)?)?,
                b.temperature,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let operators =
        wire.channel.operators.iter().map(matrix_from_wire).collect::<Result<Vec<_>>>()?;
    let channel = match &wire.channel.outcome_labels {
        Some(labels) => {
            crate::measurement::MeasurementChannel::with_labels(operators, labels.clone())?
        }
        None => crate::measurement::MeasurementChannel::new(operators)?,
    };
    let spec = ProtocolSpec {
        space,
        system_hamiltonian_initial: HermitianOperator::new(matrix_from_wire(
            &wire.system_hamiltonian_initial,
        )?)?,
        system_hamiltonian_final: HermitianOperator::new(matrix_from_wire(
            &wire.system_hamiltonian_final,
        )?)?,
        system_temperature: wire.system_temperature,
        baths,
        stage2: evolution_from_wire(&wire.stage2)?,
        channel,
        feedback: wire.feedback.iter().map(evolution_from_wire).collect::<Result<Vec<_>>>()?,
        stage5: evolution_from_wire(&wire.stage5)?,
        constants: wire.constants.unwrap_or_default(),
    };
    spec.validate()?;
    Ok(spec)
}

pub fn write_protocol_spec(spec: &ProtocolSpec, path: &Path) -> Result<()> {
    let wire = protocol_spec_to_wire(spec);
    let mut text = serde_json::to_string_pretty(&wire)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_protocol_spec(path: &Path) -> Result<ProtocolSpec> {
    let text = fs::read_to_string(path)?;
    let wire: WireProtocolSpec = serde_json::from_str(&text)?;
    protocol_spec_from_wire(&wire)
}

// ─── Ledger reports ──────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireBranch {
    pub probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<WireMatrix>,
}

/// Serializable view of a simulated protocol ledger, with the verdicts of
/// every applicable verifier attached.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolLedgerReport {
    pub rho_i: WireMatrix,
    pub rho_1: WireMatrix,
    pub rho_f: WireMatrix,
    pub branches_2: Vec<WireBranch>,
    pub branches_3: Vec<WireBranch>,
    pub outcome_probabilities: Vec<f64>,
    pub info: InformationReport,
    pub e_s_initial: f64,
    pub e_s_final: f64,
    pub e_bath_initial: Vec<f64>,
    pub e_bath_final: Vec<f64>,
    pub heats: Vec<f64>,
    pub delta_u_s: f64,
    pub delta_f_s: f64,
    pub w_ext: f64,
    pub s_initial: f64,
    pub s_final: f64,
    pub system_temperature: f64,
    pub bath_labels: Vec<String>,
    pub bath_temperatures: Vec<f64>,
    pub k_b: f64,
    pub feedback_uniformity: f64,
    pub channel_composition_residual: f64,
    pub canonical_final_distance: f64,
    pub verdicts: Vec<InequalityVerdict>,
    pub skipped: Vec<SkippedVerifier>,
}

fn branches_to_wire(branches: &crate::measurement::BranchEnsemble) -> Vec<WireBranch> {
    branches
        .branches()
        .iter()
        .map(|b| WireBranch {
            probability: b.probability,
            state: b.state.as_ref().map(|s| matrix_to_wire(s.matrix())),
        })
        .collect()
}

pub fn protocol_ledger_report(ledger: &ProtocolLedger) -> ProtocolLedgerReport {
    let scalars = ledger.scalars();
    let (mut verdicts, skipped) = applicable_verdicts(&scalars);
    verdicts.insert(0, verify_entropy_inequality(ledger));
    ProtocolLedgerReport {
        rho_i: matrix_to_wire(ledger.rho_i.matrix()),
        rho_1: matrix_to_wire(ledger.rho_1.matrix()),
        rho_f: matrix_to_wire(ledger.rho_f.matrix()),
        branches_2: branches_to_wire(&ledger.branches_2),
        branches_3: branches_to_wire(&ledger.branches_3),
        outcome_probabilities: ledger.outcome_dist.probabilities().to_vec(),
        info: ledger.info,
        e_s_initial: ledger.e_s_initial,
        e_s_final: ledger.e_s_final,
        e_bath_initial: ledger.e_bath_initial.clone(),
        e_bath_final: ledger.e_bath_final.clone(),
        heats: ledger.heats.clone(),
        delta_u_s: ledger.delta_u_s,
        delta_f_s: ledger.delta_f_s,
        w_ext: ledger.w_ext,
        s_initial: ledger.s_initial,
        s_final: ledger.s_final,
        system_temperature: ledger.system_temperature,
        bath_labels: ledger.bath_labels.clone(),
        bath_temperatures: ledger.bath_temperatures.clone(),
        k_b: ledger.constants.k_b,
        feedback_uniformity: ledger.feedback_uniformity,
        channel_composition_residual: ledger.channel_composition_residual,
        canonical_final_distance: ledger.canonical_final_distance,
        verdicts,
        skipped,
    }
}

/// An analytic ledger with the verdicts of every applicable verifier.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalyticLedgerReport {
    #[serde(flatten)]
    pub ledger: AnalyticLedger,
    pub verdicts: Vec<InequalityVerdict>,
    pub skipped: Vec<SkippedVerifier>,
}

pub fn analytic_ledger_report(ledger: &AnalyticLedger) -> AnalyticLedgerReport {
    let (verdicts, skipped) = applicable_verdicts(&ledger.scalars());
    AnalyticLedgerReport { ledger: ledger.clone(), verdicts, skipped }
}

// ─── Report envelope and emission ────────────────────────────────────

#[derive(Debug, Clone)]
pub enum Report {
    Campaign(CampaignReport),
    Analytic(AnalyticLedgerReport),
    Protocol(Box<ProtocolLedgerReport>),
}

impl Report {
    pub fn kind(&self) -> &'static str {
        match self {
            Report::Campaign(_) => "campaign",
            Report::Analytic(_) => "analytic_ledger",
            Report::Protocol(_) => "protocol_ledger",
        }
    }

    /// Count of unsatisfied verdicts (plus failed instances for campaigns);
    /// the CLI exit status is zero iff this is zero.
    pub fn violations(&self) -> usize {
        match self {
            Report::Campaign(r) => r.total_violations + r.instances_failed,
            Report::Analytic(r) => r.verdicts.iter().filter(|v| !v.satisfied).count(),
            Report::Protocol(r) => r.verdicts.iter().filter(|v| !v.satisfied).count(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "text" => Ok(Self::Text),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    kind: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

pub fn render_json(report: &Report) -> Result<String> {
    let kind = report.kind();
    let mut text = match report {
        Report::Campaign(r) => {
            serde_json::to_string_pretty(&Envelope { schema_version: REPORT_SCHEMA_VERSION, kind, body: r })?
        }
        Report::Analytic(r) => {
            serde_json::to_string_pretty(&Envelope { schema_version: REPORT_SCHEMA_VERSION, kind, body: r })?
        }
        Report::Protocol(r) => serde_json::to_string_pretty(&Envelope {
            schema_version: REPORT_SCHEMA_VERSION,
            kind,
            body: r.as_ref(),
        })?,
    };
    text.push('\n');
    Ok(text)
}

fn verdict_table(verdicts: &[InequalityVerdict], skipped: &[SkippedVerifier]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<26} {:>14} {:>14} {:>12}  {}\n",
        "inequality", "lhs", "rhs", "slack", "ok"
    ));
    for v in verdicts {
        out.push_str(&format!(
            "{:<26} {:>14.6e} {:>14.6e} {:>12.3e}  {}\n",
            v.name,
            v.lhs,
            v.rhs,
            v.slack,
            if v.satisfied { "yes" } else { "NO" }
        ));
    }
    for s in skipped {
        out.push_str(&format!("{:<26} skipped: {}\n", s.name, s.reason));
    }
    out
}

fn scalars_block(scalars: &crate::protocol::LedgerScalars) -> String {
    let mut out = String::new();
    out.push_str(&format!("T = {}  k_B = {}\n", scalars.system_temperature, scalars.k_b));
    for ((label, temp), q) in scalars.bath_labels.iter().zip(&scalars.bath_temperatures).zip(&scalars.heats) {
        out.push_str(&format!("bath {label}: T = {temp}, Q = {q}\n"));
    }
    out.push_str(&format!(
        "dU^S = {}\ndF^S = {}\nW_ext = {}\nI = {} nats\n",
        scalars.delta_u_s, scalars.delta_f_s, scalars.w_ext, scalars.qc_mutual
    ));
    out
}

pub fn render_text(report: &Report) -> String {
    match report {
        Report::Campaign(r) => {
            let mut out = format!(
                "campaign: mode {}, seed {}, {} instances ({} failed), wall time {:.3} s\n",
                r.config.mode,
                r.config.seed,
                r.instances_run,
                r.instances_failed,
                r.wall_time.as_secs_f64()
            );
            out.push_str(&format!(
                "{:<26} {:>8} {:>10} {:>14} {:>12}\n",
                "inequality", "checked", "satisfied", "worst slack", "worst seed"
            ));
            for s in &r.summaries {
                out.push_str(&format!(
                    "{:<26} {:>8} {:>10} {:>14.3e} {:>12}\n",
                    s.name, s.checked, s.satisfied, s.worst_slack, s.worst_instance_seed
                ));
            }
            for f in &r.failures {
                out.push_str(&format!("instance {} (seed {}): {}\n", f.index, f.seed, f.error));
            }
            out
        }
        Report::Analytic(r) => {
            let mut out = String::from("analytic ledger\n");
            out.push_str(&scalars_block(&r.ledger.scalars()));
            out.push_str(&verdict_table(&r.verdicts, &r.skipped));
            out
        }
        Report::Protocol(r) => {
            let mut out = String::from("protocol ledger\n");
            out.push_str(&scalars_block(&crate::protocol::LedgerScalars {
                system_temperature: r.system_temperature,
                k_b: r.k_b,
                bath_labels: r.bath_labels.clone(),
                bath_temperatures: r.bath_temperatures.clone(),
                heats: r.heats.clone(),
                delta_u_s: r.delta_u_s,
                delta_f_s: r.delta_f_s,
                w_ext: r.w_ext,
                qc_mutual: r.info.qc_mutual,
            }));
            out.push_str(&format!(
                "S_i = {}  S_f = {}\nfeedback uniformity = {:.3e}\nchannel composition residual = {:.3e}\ndistance to canonical final state = {:.6}\n",
                r.s_initial,
                r.s_final,
                r.feedback_uniformity,
                r.channel_composition_residual,
                r.canonical_final_distance
            ));
            out.push_str(&verdict_table(&r.verdicts, &r.skipped));
            out
        }
    }
}

/// Render and write a report; `None` writes to stdout.
pub fn emit_report(report: &Report, out: Option<&Path>, format: ReportFormat) -> Result<()> {
    let text = match format {
        ReportFormat::Json => render_json(report)?,
        ReportFormat::Text => render_text(report),
    };
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::{random_campaign, random_protocol_spec, CampaignConfig};
    use crate::protocol::run;
    use crate::scenarios::szilard_scenario;
    use std::f64::consts::LN_2;

    #[test]
    fn wire_matrix_roundtrip_preserves_entries() {
        let m = crate::measurement::random_unitary(3, 9);
        let wire = matrix_to_wire(&m);
        let back = matrix_from_wire(&wire).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn wire_matrix_rejects_ragged_input() {
        let ragged: WireMatrix = vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0]]];
        assert!(matrix_from_wire(&ragged).is_err());
        assert!(matrix_from_wire(&vec![]).is_err());
    }

    #[test]
    fn protocol_spec_json_roundtrip_reproduces_ledger() {
        let spec = random_protocol_spec(77, 2, &[3], 2).unwrap();
        let wire = protocol_spec_to_wire(&spec);
        let json = serde_json::to_string(&wire).unwrap();
        let parsed: WireProtocolSpec = serde_json::from_str(&json).unwrap();
        let restored = protocol_spec_from_wire(&parsed).unwrap();

        let a = run(&spec).unwrap();
        let b = run(&restored).unwrap();
        assert_eq!(a.w_ext, b.w_ext);
        assert_eq!(a.info.qc_mutual, b.info.qc_mutual);
        assert_eq!(a.heats, b.heats);
    }

    #[test]
    fn schedule_evolution_survives_the_wire() {
        let mut spec = random_protocol_spec(78, 2, &[3], 2).unwrap();
        let h = crate::measurement::random_hermitian_with(&mut crate::measurement::seeded_rng(5), 6, 1.0);
        spec.stage2 = Evolution::Schedule(vec![(h.clone(), 0.3), (h, 0.9)]);
        let wire = protocol_spec_to_wire(&spec);
        let json = serde_json::to_string_pretty(&wire).unwrap();
        let parsed: WireProtocolSpec = serde_json::from_str(&json).unwrap();
        let restored = protocol_spec_from_wire(&parsed).unwrap();
        let a = run(&spec).unwrap();
        let b = run(&restored).unwrap();
        assert_eq!(a.w_ext, b.w_ext);
    }

    #[test]
    fn campaign_report_json_roundtrip() {
        let report = random_campaign(&CampaignConfig::information(1, 5)).unwrap();
        let json = render_json(&Report::Campaign(report.clone())).unwrap();
        assert!(json.contains("\"schema_version\": 1"));
        assert!(json.contains("\"kind\": \"campaign\""));
        // Wall time never lands in the serialized form.
        assert!(!json.contains("wall_time"));

        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let body: CampaignReport = serde_json::from_value(value).unwrap();
        assert_eq!(body.total_checked, report.total_checked);
        assert_eq!(body.summaries, report.summaries);
        assert_eq!(body.wall_time, std::time::Duration::ZERO);
    }

    #[test]
    fn szilard_json_contains_expected_work() {
        let ledger = szilard_scenario(1.0, 0.0, &PhysicalConstants::default()).unwrap();
        let json = render_json(&Report::Analytic(analytic_ledger_report(&ledger))).unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        let w = value["w_ext"].as_f64().unwrap();
        assert_eq!(w, LN_2);
        assert_eq!(value["kind"], "analytic_ledger");
        assert_eq!(value["mode"], "analytic");
    }

    #[test]
    fn protocol_ledger_report_carries_verdicts() {
        let spec = random_protocol_spec(80, 2, &[4], 2).unwrap();
        let ledger = run(&spec).unwrap();
        let report = protocol_ledger_report(&ledger);
        assert!(report.verdicts.iter().any(|v| v.name == "entropy_inequality"));
        assert!(report.verdicts.iter().any(|v| v.name == "exact_second_law"));
        assert!(report.verdicts.iter().any(|v| v.name == "isothermal"));
        let wrapped = Report::Protocol(Box::new(report));
        assert_eq!(wrapped.violations(), 0);

        let text = render_text(&wrapped);
        assert!(text.contains("exact_second_law"));
        assert!(text.contains("W_ext"));
    }

    #[test]
    fn empty_campaign_report_serializes_cleanly() {
        // A report with zero counts is still a valid document.
        let report = CampaignReport {
            config: CampaignConfig::information(0, 1),
            instances_run: 0,
            instances_failed: 0,
            total_checked: 0,
            total_violations: 0,
            summaries: vec![],
            failures: vec![],
            instances: None,
            wall_time: std::time::Duration::ZERO,
        };
        let json = render_json(&Report::Campaign(report)).unwrap();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["total_checked"], 0);
        assert_eq!(value["summaries"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn emit_report_writes_files(
    ) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let ledger = szilard_scenario(1.0, 0.1, &PhysicalConstants::default()).unwrap();
        let report = Report::Analytic(analytic_ledger_report(&ledger));
        emit_report(&report, Some(&path), ReportFormat::Json).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.ends_with('\n'));
        assert!(serde_json::from_str::<serde_json::Value>(&text).is_ok());

        let txt_path = dir.path().join("report.txt");
        emit_report(&report, Some(&txt_path), ReportFormat::Text).unwrap();
        assert!(fs::read_to_string(&txt_path).unwrap().contains("analytic ledger"));
    }
}
