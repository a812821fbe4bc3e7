//! The protocol-spec wire format: serialize a spec to JSON, read it back,
//! and verify the bounds on the reconstructed instance.
//!
//! Matrices travel as row-major nested arrays of `[re, im]` pairs, which is
//! the schema the `verify-file` CLI subcommand accepts; an independent
//! implementation can emit the same file and compare verdicts.
//!
//! Run with: `cargo run --example verify_file`

use qfeedback::campaign::random_protocol_spec;
use qfeedback::protocol::run;
use qfeedback::report::{
    protocol_ledger_report, read_protocol_spec, write_protocol_spec,
};

fn main() {
    let dir = std::env::temp_dir();
    let path = dir.join("qfeedback_example_spec.json");

    let spec = random_protocol_spec(99, 2, &[4], 2).unwrap();
    write_protocol_spec(&spec, &path).unwrap();
    println!("wrote protocol spec to {}", path.display());

    let text = std::fs::read_to_string(&path).unwrap();
    let head: String = text.lines().take(14).collect::<Vec<_>>().join("\n");
    println!("file starts with:\n{head}\n  ...\n");

    let restored = read_protocol_spec(&path).unwrap();
    let ledger = run(&restored).unwrap();
    let report = protocol_ledger_report(&ledger);
    println!("ran the reconstructed spec: W_ext = {:.9}, I = {:.9}", ledger.w_ext, ledger.info.qc_mutual);
    for v in &report.verdicts {
        println!(
            "  {:<22} slack = {:>12.3e}  {}",
            v.name,
            v.slack,
            if v.satisfied { "ok" } else { "VIOLATED" }
        );
    }

    // The round trip is exact: the reconstructed ledger matches bitwise.
    let original = run(&spec).unwrap();
    assert_eq!(original.w_ext, ledger.w_ext);
    assert_eq!(original.info.qc_mutual, ledger.info.qc_mutual);
    println!("round trip is bit-exact");
}
