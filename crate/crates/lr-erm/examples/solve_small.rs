//! Solve one small regularized ERM instance end to end: build a problem,
//! run the proximal solver, inspect the KKT certificate, and recover the
//! primal solution from the dual coefficients.
//!
//!     cargo run --example solve_small

use lr_erm::solver::recover_from_dual;
use lr_erm::{solve_primal, Dictionary, ErmProblem, Family, Loss, Regularizer};

fn main() -> lr_erm::Result<()> {
    // noisy samples of a cubic on [0,1]
    let xs: Vec<f64> = (0..30).map(|i| (i as f64 + 0.5) / 30.0).collect();
    let ys: Vec<f64> = xs.iter().map(|x| 4.0 * x * x * x - 3.0 * x + 0.2).collect();

    let dict = Dictionary::new(Family::Monomial, 4, 2.0)?;
    // elastic net: |.|-atoms promote sparsity, the quadratic part keeps the
    // problem strongly convex
    let reg = Regularizer::elastic_net(4, 0.5, 0.05, 2.0)?;
    let loss = Loss::power(2.0, 2.0)?;
    let prob = ErmProblem::new(dict, reg, loss, xs, ys, 0.01)?;

    let sol = solve_primal(&prob, 1e-9, 100_000)?;
    println!("coefficients: {:?}", sol.u.coeffs());
    println!("objective     = {:.10}", sol.objective);
    println!("kkt residual  = {:.3e}", sol.kkt_residual);
    println!("iterations    = {}", sol.iterations);

    // the certificate at the solution doubles as the optimal dual variable
    if let Some(gap) = sol.duality_gap {
        println!("duality gap   = {:.3e}  (primal + dual objective)", gap);
        assert!(gap.abs() <= 1e-6);
    }

    // dual-to-primal recovery reproduces the minimizer
    let recovered = recover_from_dual(&prob, &sol.dual_coeffs)?;
    let dist = recovered.sub(&sol.u)?.norm();
    println!("dual recovery ||u' - u|| = {dist:.3e}");
    assert!(dist <= 1e-4);

    assert!(sol.converged);
    Ok(())
}
