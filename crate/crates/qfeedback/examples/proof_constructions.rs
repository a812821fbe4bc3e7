//! The auxiliary-system constructions behind `0 <= I(rho:X) <= H({p_k})`.
//!
//! For a random state and channel this prints the register-extended states
//! `sigma1 = sum_k sqrt(rho) D_k sqrt(rho) ⊗ |k><k|` and
//! `sigma2 = sum_k sqrt(D_k) rho sqrt(D_k) ⊗ |k><k|`: their entropies agree
//! with each other and with `H~(rho, X)`, the marginals recover `rho` and
//! the outcome register, and the eigenbasis overlap matrix `d_ij` is doubly
//! stochastic. Together these give the two bounds on `I`.
//!
//! Run with: `cargo run --example proof_constructions`

use qfeedback::information::{dij_matrix, h_tilde, qc_mutual_info, sigma_pair, von_neumann_entropy};
use qfeedback::measurement::{random_channel_with, random_density_with, seeded_rng};
use qfeedback::operators::{max_diff, partial_trace};

fn main() {
    let mut rng = seeded_rng(2718);
    let dim = 3;
    let n_outcomes = 3;
    let rho = random_density_with(&mut rng, dim);
    let channel = random_channel_with(&mut rng, dim, n_outcomes);

    let report = qc_mutual_info(&rho, &channel).unwrap();
    println!("random instance: dim {dim}, {n_outcomes} outcomes");
    println!("  S(rho) = {:.9}, H(p) = {:.9}, I = {:.9}", report.s_rho, report.shannon, report.qc_mutual);
    println!("  bounds: 0 <= I <= H(p) -> slack below H: {:.9}\n", report.shannon - report.qc_mutual);

    let pair = sigma_pair(&rho, &channel).unwrap();
    let s1 = von_neumann_entropy(&pair.sigma1);
    let s2 = von_neumann_entropy(&pair.sigma2);
    let ht = h_tilde(&rho, &channel).unwrap();
    println!("register-extended states on Q ⊗ R:");
    println!("  S(sigma1) = {s1:.12}");
    println!("  S(sigma2) = {s2:.12}");
    println!("  H~(rho,X) = {ht:.12}");
    println!("  |S(sigma1) - S(sigma2)| = {:.3e}", (s1 - s2).abs());

    let q_marginal = partial_trace(pair.sigma1.matrix(), pair.space(), &["Q"]).unwrap();
    let r_marginal = partial_trace(pair.sigma1.matrix(), pair.space(), &["R"]).unwrap();
    println!("  |tr_R(sigma1) - rho|     = {:.3e}", max_diff(&q_marginal, rho.matrix()));
    println!("  |tr_Q(sigma1) - rho_R|   = {:.3e}\n", max_diff(&r_marginal, pair.r_marginal.matrix()));

    let d = dij_matrix(&rho, &channel).unwrap();
    println!("eigenbasis overlap matrix d_ij:");
    for i in 0..dim {
        let row: Vec<String> = (0..dim).map(|j| format!("{:.6}", d[(i, j)])).collect();
        println!("  [{}]  row sum = {:.12}", row.join(", "), d.row(i).sum());
    }
    for j in 0..dim {
        println!("  column {j} sum = {:.12}", d.column(j).sum());
    }
}
