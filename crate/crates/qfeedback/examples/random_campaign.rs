//! Small randomized verification campaigns in every mode.
//!
//! Each instance draws a seeded random protocol (or state/channel pair),
//! runs the applicable verifiers, and the report aggregates verdict counts
//! and worst slacks. Identical seeds reproduce identical reports.
//!
//! Run with: `cargo run --example random_campaign`

use qfeedback::campaign::{random_campaign, CampaignConfig, CampaignMode};
use qfeedback::report::{render_text, Report};

fn main() {
    let mut information = CampaignConfig::information(11, 200);
    information.include_instances = false;

    let mut protocol = CampaignConfig::protocol(12, 100);
    protocol.n_outcomes_range = (2, 3);

    let mut cyclic_free = CampaignConfig::protocol(13, 100);
    cyclic_free.mode = CampaignMode::CyclicFeedbackFree;
    cyclic_free.n_baths_range = (2, 2);
    cyclic_free.bath_dims = vec![3, 4];

    let mut cyclic_feedback = CampaignConfig::protocol(14, 100);
    cyclic_feedback.mode = CampaignMode::CyclicFeedback;
    cyclic_feedback.n_baths_range = (2, 2);
    cyclic_feedback.bath_dims = vec![3, 4];

    for config in [information, protocol, cyclic_free, cyclic_feedback] {
        let report = random_campaign(&config).unwrap();
        print!("{}", render_text(&Report::Campaign(report)));
        println!();
    }
}
