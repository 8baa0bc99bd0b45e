//! Dictionaries over [0,1] induce a reproducing kernel on the ℓ^r
//! coefficient space. This example evaluates the kernel for the three
//! built-in families and checks the two identities it satisfies: the
//! diagonal is the feature norm to the r* power, and off-diagonal values
//! obey a Hölder bound in the diagonal entries.
//!
//!     cargo run --example kernel_identities

use lr_erm::{Dictionary, Family};

fn main() -> lr_erm::Result<()> {
    let families = [
        ("trig", Family::Trig { decay: 1.0 }),
        ("monomial", Family::Monomial),
        ("hat", Family::Hat),
    ];
    for (name, family) in families {
        for r in [1.5, 2.0, 3.0] {
            let dict = Dictionary::new(family, 7, r)?;
            let r_star = dict.r_star();

            let (x, x2) = (0.3, 0.8);
            let k = dict.kernel(x, x2);
            let diag = dict.kernel(x, x);

            // diagonal identity: K(x,x) = ||features(x)||_{r*}^{r*}
            let feat_norm = dict.feature_map(x).norm();
            let diag_err = (diag - feat_norm.powf(r_star)).abs();

            // Hölder: |K(x,x')| <= K(x,x)^{1/r} K(x',x')^{1/r*}
            let holder = dict.kernel(x, x).powf(1.0 / r) * dict.kernel(x2, x2).powf(1.0 / r_star);

            println!(
                "{name:<9} r={r:<4} K({x},{x2}) = {k:>9.5}  diag err = {diag_err:.2e}  Hölder slack = {:.5}",
                holder - k.abs()
            );
            assert!(diag_err <= 1e-12 * (1.0 + diag));
            assert!(k.abs() <= holder * (1.0 + 1e-12));
        }
    }

    // at r = 2 the kernel is the plain Gram kernel sum phi_k(x) phi_k(x')
    let dict = Dictionary::new(Family::Monomial, 4, 2.0)?;
    let by_hand: f64 = (0..4).map(|k| dict.atom(k, 0.25) * dict.atom(k, 0.75)).sum();
    println!("\nmonomial r=2: K(0.25, 0.75) = {} (plain Gram sum {})", dict.kernel(0.25, 0.75), by_hand);
    Ok(())
}
