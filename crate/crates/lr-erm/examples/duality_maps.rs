//! Duality maps on finite sections of ℓ^r: the signed-power action, the
//! norm identities they satisfy, and the round trip through the conjugate
//! exponent.
//!
//!     cargo run --example duality_maps

use lr_erm::seq::{conjugate_exponent, pairing};
use lr_erm::SeqVector;

fn main() -> lr_erm::Result<()> {
    let r = 3.0;
    let u = SeqVector::new(vec![4.0, -1.0, 0.5], r)?;
    println!("u = {:?} in l^{r}", u.coeffs());
    println!("conjugate exponent r* = {}", conjugate_exponent(r)?);

    // J_r acts coordinatewise: mu -> |mu|^(r-1) sign(mu), landing in l^{r*}
    let ju = u.duality_map();
    println!("J_r(u) = {:?} in l^{}", ju.coeffs(), ju.r());

    // the two identities that make J_r the duality map
    let lhs = pairing(&u, &ju)?;
    println!("<u, J_r u>          = {lhs:.12}");
    println!("||u||_r^r           = {:.12}", u.norm().powf(r));
    println!("||J_r u||_r*        = {:.12}", ju.norm());
    println!("||u||_r^(r-1)       = {:.12}", u.norm().powf(r - 1.0));

    // the r*-duality map inverts it exactly
    let back = u.duality_map().duality_map();
    let err = back.sub(&u)?.norm();
    println!("|| J_r* (J_r u) - u || = {err:.3e}");
    assert!(err <= 1e-12 * (1.0 + u.norm()));

    // r = 2 is the identity: the Hilbert case
    let w = SeqVector::new(vec![0.3, -0.7], 2.0)?;
    assert_eq!(w.duality_map().coeffs(), w.coeffs());
    println!("r = 2: J_2 = identity, as in any Hilbert space");
    Ok(())
}
