//! Szilard engine ledgers across measurement error rates.
//!
//! The engine converts measurement information into extracted work:
//! `W_ext = k_B T I`, where `I` is the mutual information of a binary
//! symmetric reading of the molecule's side. Error-free readout extracts
//! `k_B T ln 2`; a coin-flip readout extracts nothing. Every ledger is
//! pushed through the same verifiers as simulated protocols, and the
//! error-free point saturates the isothermal bound with zero slack.
//!
//! Run with: `cargo run --example szilard`

use std::f64::consts::LN_2;

use qfeedback::protocol::verify_isothermal;
use qfeedback::scenarios::szilard_scenario;
use qfeedback::thermo::PhysicalConstants;

fn main() {
    let constants = PhysicalConstants::default();
    let temperature = 1.0;

    println!("Szilard engine at T = {temperature} (k_B = {}):", constants.k_b);
    println!("{:>8} {:>16} {:>16} {:>16}", "error", "I [nats]", "W_ext", "bound slack");
    for i in 0..=10 {
        let error = 0.05 * i as f64;
        let ledger = szilard_scenario(temperature, error, &constants).unwrap();
        let verdict = verify_isothermal(&ledger.scalars()).unwrap();
        println!(
            "{:>8.2} {:>16.12} {:>16.12} {:>16.3e}",
            error, ledger.qc_mutual, ledger.w_ext, verdict.slack
        );
    }

    let ideal = szilard_scenario(temperature, 0.0, &constants).unwrap();
    println!("\nerror-free cycle: W_ext = {:.12}, k_B T ln 2 = {:.12}", ideal.w_ext, LN_2);
    println!("heat drawn from the single bath equals the work: Q_1 = {:.12}", ideal.heats[0]);
}
