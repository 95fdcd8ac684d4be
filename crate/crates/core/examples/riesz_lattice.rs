//! Lattice operations on ℝ^X with exact rationals, the ρ̃ construction
//! for a Riesz homomorphism, and the standard representation.

use num_bigint::BigInt;
use num_rational::BigRational;
use star_order_lab::riesz::{
    extremal_positive_functionals, lattice_ops, rho_tilde, rho_tilde_stabilization, rho_tilde_term,
    standard_representation, RieszElement, RieszFunctional,
};

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn show(v: &RieszElement<BigRational>) -> String {
    let parts: Vec<String> = v.values.iter().map(ToString::to_string).collect();
    format!("({})", parts.join(", "))
}

fn main() -> star_order_lab::Result<()> {
    let r = RieszElement::new(vec![q(3, 2), q(-1, 1), q(0, 1), q(2, 3)]);
    let s = RieszElement::new(vec![q(1, 1), q(1, 2), q(-2, 1), q(2, 3)]);
    let ops = lattice_ops(&r, &s)?;
    println!("r     = {}", show(&r));
    println!("s     = {}", show(&s));
    println!("r ∨ s = {}", show(&ops.sup));
    println!("r ∧ s = {}", show(&ops.inf));
    println!("|r|   = {}", show(&ops.abs));
    println!("r₊    = {}, r₋ = {}", show(&ops.pos), show(&ops.neg));
    println!("(r∨s) + (r∧s) == r + s: {}", ops.sup.add(&ops.inf)? == r.add(&s)?);

    // ω weighs points 1 and 2; r vanishes at point 2, so ρ̃ only sees point 1.
    let omega = RieszFunctional::new(vec![q(0, 1), q(2, 1), q(1, 1), q(0, 1)]);
    let support = RieszElement::new(vec![q(1, 1), q(1, 4), q(0, 1), q(1, 1)]);
    let t = RieszElement::new(vec![q(5, 1), q(3, 1), q(7, 1), q(0, 1)]);
    let n0 = rho_tilde_stabilization(&support, &t);
    for n in [1, 4, n0] {
        println!("⟨ω, ({n}·r) ∧ t⟩ = {}", rho_tilde_term(&omega, &support, &t, n)?);
    }
    println!("ρ̃(t) = {}", rho_tilde(&omega, &support, &t)?);

    let evals = extremal_positive_functionals(4)?;
    println!("{} extremal positive functionals on ℝ⁴", evals.len());
    let rep = standard_representation(&[r, s], 4)?;
    for (e, row) in rep.values.iter().enumerate() {
        let row: Vec<String> = row.iter().map(ToString::to_string).collect();
        println!("element {e} under the point evaluations: [{}]", row.join(", "));
    }
    Ok(())
}
