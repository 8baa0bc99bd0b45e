//! The vector-valued Hoeffding inequality: a deviation bound for averages
//! of bounded ℓ^q-valued variables, checked against Monte-Carlo draws of
//! coordinatewise random signs. The empirical violation rate must stay
//! under e^{-τ}.
//!
//!     cargo run --example hoeffding_check

use lr_erm::hoeffding::{type_constant, violation_rate, ConcentrationSpec, Sampler, Space};

fn main() -> lr_erm::Result<()> {
    // Hilbert space: type 2 with constant 1, the classical setting
    let tc = type_constant(Space::Hilbert)?;
    println!("Hilbert space type: q = {}, T_q = {} (verified = {})\n", tc.q, tc.t_const, tc.verified);

    let sampler = Sampler::RademacherCoords { dim: 8 };
    println!("   n    τ      bound    empirical rate    e^-τ");
    for n in [50, 200] {
        for tau in [1.0, 2.0, 3.0] {
            let spec = ConcentrationSpec::new(2.0, 1.0, 1.0, n, tau)?;
            let rate = violation_rate(&spec, &sampler, 10_000, 17)?;
            let tail = (-tau).exp();
            println!(
                "{n:>4}  {tau:>3}   {: >8.5}    {rate: >10.4}      {tail:.4}",
                spec.bound()
            );
            let sd = (tail * (1.0 - tail) / 10_000.0).sqrt();
            assert!(rate <= tail + 3.0 * sd, "rate must stay under the tail");
        }
    }

    // the bound weakens as q drops below 2 (heavier geometry, same data)
    let q15 = ConcentrationSpec::new(1.5, 1.0, 1.0, 100, 1.0)?;
    let q20 = ConcentrationSpec::new(2.0, 1.0, 1.0, 100, 1.0)?;
    println!("\nbound at n=100, τ=1:  q=1.5 -> {:.4},  q=2 -> {:.4}", q15.bound(), q20.bound());
    assert!(q15.bound() > q20.bound());
    Ok(())
}
