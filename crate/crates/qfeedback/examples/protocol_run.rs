//! Assemble and run one five-stage feedback protocol by hand.
//!
//! A qubit couples to a four-level bath through a piecewise-constant
//! interaction schedule (stage 2), a noisy two-outcome measurement reads
//! the qubit (stage 3), outcome-conditioned unitaries act (stage 4), and a
//! final decoupling schedule runs (stage 5). The printed report carries the
//! full energy/heat/work ledger, the information functionals, and every
//! applicable bound verdict.
//!
//! Run with: `cargo run --example protocol_run`

use qfeedback::measurement::{random_unitary, MeasurementChannel};
use qfeedback::operators::{
    matrix_from_real_rows, matrix_sqrt, tensor, CompositeSpace, HermitianOperator,
};
use qfeedback::protocol::{run, Evolution, ProtocolSpec};
use qfeedback::report::{protocol_ledger_report, render_text, Report};
use qfeedback::thermo::{BathSpec, PhysicalConstants};

fn main() {
    let space = CompositeSpace::new(vec![2, 4], vec!["S", "B1"]).unwrap();
    let h_system = HermitianOperator::from_real_diagonal(&[0.0, 1.0]);
    let h_bath = HermitianOperator::from_real_diagonal(&[0.0, 0.4, 0.9, 1.5]);

    // Interaction: sigma_x on the qubit against a bath hopping term, only
    // active inside the schedule (it vanishes at the stage endpoints).
    let sx = matrix_from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]);
    let hop = matrix_from_real_rows(
        4,
        &[
            0.0, 1.0, 0.0, 0.0, //
            1.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    );
    let coupling = HermitianOperator::new(tensor(&sx, &hop).scale(0.35)).unwrap();
    let bare = HermitianOperator::new(
        space.embed("S", h_system.matrix()).unwrap() + space.embed("B1", h_bath.matrix()).unwrap(),
    )
    .unwrap();
    let interacting =
        HermitianOperator::new(bare.matrix() + coupling.matrix()).unwrap();

    // Noisy two-outcome measurement of the qubit energy basis.
    let eps: f64 = 0.15;
    let m0 = matrix_sqrt(&HermitianOperator::from_real_diagonal(&[1.0 - eps, eps])).unwrap();
    let m1 = matrix_sqrt(&HermitianOperator::from_real_diagonal(&[eps, 1.0 - eps])).unwrap();
    let channel =
        MeasurementChannel::new(vec![m0.matrix().clone(), m1.matrix().clone()]).unwrap();

    let spec = ProtocolSpec {
        space,
        system_hamiltonian_initial: h_system.clone(),
        system_hamiltonian_final: h_system,
        system_temperature: 1.0,
        baths: vec![BathSpec::new("B1", h_bath, 1.0).unwrap()],
        stage2: Evolution::Schedule(vec![(interacting.clone(), 1.2), (bare.clone(), 0.3)]),
        channel,
        feedback: vec![
            Evolution::Unitary(random_unitary(8, 1)),
            Evolution::Unitary(random_unitary(8, 2)),
        ],
        stage5: Evolution::Schedule(vec![(interacting, 0.7), (bare, 0.5)]),
        constants: PhysicalConstants::default(),
    };

    let ledger = run(&spec).unwrap();
    let report = Report::Protocol(Box::new(protocol_ledger_report(&ledger)));
    print!("{}", render_text(&report));
    println!("\noutcome probabilities: {:?}", ledger.outcome_dist.probabilities());
    println!("violations: {}", report.violations());
}
