//! The reproducing kernel of the Sobolev space W^{1,p}_0 on [0,1]: a
//! two-sided ramp with a unit flux jump at the evaluation point. At p = 2
//! it is the classical Green's function x'(1-x); for general p the
//! evaluation pairing still reproduces piecewise-linear functions exactly.
//!
//!     cargo run --example sobolev_kernel

use lr_erm::sobolev::{PKernel, PiecewiseLinear};

fn main() -> lr_erm::Result<()> {
    let p2 = PKernel::new(2.0)?;
    println!("p = 2: K(0.5, 0.25) = {} (Green's function gives 0.125)", p2.value(0.5, 0.25)?);
    assert!((p2.value(0.5, 0.25)? - 0.125).abs() <= 1e-15);

    println!("\n  p     K(0.3, 0.3)   flux jump at 0.3");
    for p in [1.5, 2.0, 3.0, 5.0] {
        let k = PKernel::new(p)?;
        println!("{p:>4}    {:>10.6}    {:.12}", k.diag(0.3)?, k.flux_jump(0.3)?);
        assert!((k.flux_jump(0.3)? - 1.0).abs() <= 1e-10);
    }

    // reproducing property: pairing the kernel section against f' recovers
    // f(x) for any piecewise-linear f vanishing at the boundary
    let f = PiecewiseLinear::new(vec![0.0, 0.2, 0.7, 1.0], vec![0.0, 0.5, -0.25, 0.0])?;
    println!("\nreproducing residuals for a 3-segment test function:");
    for p in [1.5, 2.0, 3.0] {
        let k = PKernel::new(p)?;
        let worst = [0.1, 0.35, 0.6, 0.9]
            .iter()
            .map(|&x| k.reproducing_check(&f, x).unwrap().abs())
            .fold(0.0, f64::max);
        println!("  p = {p}: max residual {worst:.3e}");
        assert!(worst <= 1e-10);
    }
    Ok(())
}
