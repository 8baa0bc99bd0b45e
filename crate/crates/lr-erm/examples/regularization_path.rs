//! Follow one sample along a decreasing λ grid: the empirical risk falls
//! toward the least-squares floor, the weighted penalty λG(u_λ) vanishes,
//! and the norm of every path point stays under the growth bound computed
//! from the regularizer's convexity modulus.
//!
//!     cargo run --example regularization_path

use lr_erm::experiment::{path_diagnostics, SyntheticModel};
use lr_erm::rng::derive_rng;
use lr_erm::{Dictionary, Family, Loss, Regularizer, SeqVector};

fn main() -> lr_erm::Result<()> {
    let dict = Dictionary::new(Family::Trig { decay: 0.0 }, 3, 2.0)?;
    let true_u = SeqVector::new(vec![0.8, 0.5, -0.3], 2.0)?;
    let model = SyntheticModel::new(dict, true_u, 0.2)?;

    let mut rng = derive_rng(7, &[0]);
    let (xs, ys) = model.draw(&mut rng, 80)?;
    let reg = Regularizer::power(3, 1.0, 2.0)?;
    let loss = Loss::power(2.0, model.y_bound()?)?;

    let lambdas = [1.0, 0.1, 0.01, 0.001];
    let report = path_diagnostics(model.dict(), &reg, &loss, &xs, &ys, &lambdas, 1e-9, 200_000)?;

    println!("least-squares floor: {:.6}\n", report.inf_risk);
    println!("     λ        F(u_λ)     λG(u_λ)     ||u_λ||   growth bound");
    for p in &report.points {
        println!(
            "{:>8}   {:>9.6}   {:>9.6}   {:>9.6}   {:>9.3}",
            p.lambda, p.risk, p.penalty, p.norm_u, p.growth_bound
        );
        assert!(p.norm_u <= p.growth_bound);
    }

    assert!(report.risk_nonincreasing, "risk only falls as λ shrinks");
    let first = &report.points[0];
    let last = &report.points[report.points.len() - 1];
    assert!(last.penalty <= 0.05 * first.penalty, "the weighted penalty dies out");
    println!("\nrisk nonincreasing along the path; λG shrank by {:.0}x", first.penalty / last.penalty);
    Ok(())
}
