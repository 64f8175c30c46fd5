// Rank statistics on their own: Spearman, Kendall tau-b and the rank
// regression slope, on data with ties.

use ndsc::stats::{correlate, rank_regression, ranks};

pub fn run() -> ndsc::Result<()> {
    let load = [0.0002, 0.0005, 0.001, 0.001, 0.004, 0.008, 0.02];
    let score = [0.41, 0.52, 0.60, 0.58, 0.71, 0.71, 0.83];

    println!("ranks(load)  = {:?}", ranks(&load)?.as_slice());
    println!("ranks(score) = {:?}", ranks(&score)?.as_slice());
    let c = correlate(&load, &score)?;
    let fit = rank_regression(&load, &score)?;
    println!("spearman = {:.4}, kendall tau-b = {:.4} (n = {})", c.rho, c.tau, c.n);
    println!("rank(score) = {:.4} * rank(load) + {:.4}", fit.slope, fit.intercept);
    Ok(())
}

fn main() -> ndsc::Result<()> {
    run()
}
