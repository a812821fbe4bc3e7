//! Information functionals of different measurements on the same state.
//!
//! Three two-outcome channels probe a qubit: a projective reading in the
//! state's own eigenbasis (classical and error-free, `I = H({p_k})`), a
//! noisy symmetric reading (classical, `I` matches the classical mutual
//! information oracle), and an uninformative channel whose POVM elements
//! are proportional to the identity (`I = 0` for every state).
//!
//! Run with: `cargo run --example measurement_information`

use qfeedback::information::{
    classical_mutual_info_oracle, classical_reduction_inputs, qc_mutual_info, InformationReport,
};
use qfeedback::measurement::{is_classical, uninformative_channel_with, MeasurementChannel};
use qfeedback::operators::{diagonal, DensityOperator};

fn print_report(name: &str, report: &InformationReport) {
    println!("{name}:");
    println!("  S(rho)      = {:.9}", report.s_rho);
    println!("  H(p)        = {:.9}", report.shannon);
    println!("  H~(rho, X)  = {:.9}", report.h_tilde);
    println!("  I(rho:X)    = {:.9}", report.qc_mutual);
    println!("  Holevo chi  = {:.9}", report.holevo_chi);
    println!("  dS_meas     = {:.9}", report.delta_s_meas);
}

fn main() {
    let rho = DensityOperator::new(diagonal(&[0.7, 0.3])).unwrap();

    let projective = MeasurementChannel::projective_computational(2);
    let report = qc_mutual_info(&rho, &projective).unwrap();
    print_report("projective eigenbasis readout", &report);
    println!("  classical: {}, I - H = {:.2e}\n", is_classical(&rho, &projective), report.qc_mutual - report.shannon);

    // Binary symmetric channel with 10% error, diagonal in the eigenbasis.
    let eps: f64 = 0.1;
    let m0 = diagonal(&[(1.0 - eps).sqrt(), eps.sqrt()]);
    let m1 = diagonal(&[eps.sqrt(), (1.0 - eps).sqrt()]);
    let noisy = MeasurementChannel::new(vec![m0, m1]).unwrap();
    let report = qc_mutual_info(&rho, &noisy).unwrap();
    print_report("noisy symmetric readout (eps = 0.1)", &report);
    let (q, conditional) = classical_reduction_inputs(&rho, &noisy).unwrap();
    let oracle = classical_mutual_info_oracle(&q, &conditional).unwrap();
    println!("  joint-distribution oracle: {:.9} (gap {:.2e})\n", oracle, report.qc_mutual - oracle);

    let mut rng = qfeedback::measurement::seeded_rng(17);
    let uninformative = uninformative_channel_with(&mut rng, 2, 2);
    let report = qc_mutual_info(&rho, &uninformative).unwrap();
    print_report("uninformative channel (D_k proportional to I)", &report);
    println!("  no information about the state: I = {:.2e}", report.qc_mutual);
}
