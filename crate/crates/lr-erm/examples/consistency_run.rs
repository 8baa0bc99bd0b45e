//! A small consistency sweep: draw ever larger samples from a synthetic
//! regression truth, solve with a vanishing schedule λ_n = λ₀ n^{-γ}, and
//! watch the exact excess risk fall. Also shows the schedule validity
//! check rejecting a γ on the wrong side of 1/q.
//!
//!     cargo run --example consistency_run

use lr_erm::experiment::{run_consistency, RunOptions, Schedule, SyntheticModel};
use lr_erm::{Dictionary, Family, Regularizer, SeqVector};

fn main() -> lr_erm::Result<()> {
    let dict = Dictionary::new(Family::Trig { decay: 1.0 }, 5, 2.0)?;
    let true_u = SeqVector::new(vec![1.0, 0.6, -0.4, 0.2, 0.1], 2.0)?;
    let model = SyntheticModel::new(dict, true_u, 0.3)?;
    let reg = Regularizer::power(5, 0.5, 2.0)?;

    let schedule = Schedule::new(0.5, 0.25, 2.0)?;
    let v = schedule.validity()?;
    println!("schedule λ_n = 0.5 n^-1/4: weak = {}, strong = {}", v.weak, v.strong);

    let opts = RunOptions { tol: 1e-8, max_iter: 100_000, master_seed: 2024 };
    let report = run_consistency(&model, &reg, schedule, &[64, 256, 1024], &[0, 1, 2, 3, 4], opts)?;

    println!("\n    n    median excess risk    median ||u_n - u*||");
    for n in [64, 256, 1024] {
        println!(
            "{n:>6}    {:>14.6}    {:>15.6}",
            report.median_excess(n).unwrap(),
            report.median_u_dist(n).unwrap()
        );
    }
    assert!(report.median_excess(1024).unwrap() < report.median_excess(64).unwrap());

    for cell in &report.cells {
        assert!(cell.within_radius, "every solution stays inside the norm radius");
    }
    println!("\nnorm radius bound held on all {} cells", report.cells.len());

    // γ = 1/2 sits exactly at the 1/q boundary: flagged, not consistent
    let boundary = Schedule::new(0.5, 0.5, 2.0)?.validity()?;
    println!("γ = 0.5 flags: weak = {}, strong = {}", boundary.weak, boundary.strong);
    Ok(())
}
