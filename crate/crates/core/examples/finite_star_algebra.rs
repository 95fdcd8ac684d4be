//! GNS for states on finite-dimensional *-algebras.
//!
//! A faithful state on the 2×2 matrices has a 4-dimensional quotient; a
//! vector state leaves the defining 2-dimensional representation, which is
//! still injective. A state on ℂ³ that ignores one point is not.

use num_complex::Complex64;
use star_order_lab::gns::{gns_finite, FiniteStarAlgebra};

fn report(name: &str, alg: &FiniteStarAlgebra, omega: &[Complex64]) -> star_order_lab::Result<()> {
    let g = gns_finite(alg, omega, 1e-10)?;
    println!(
        "{name}: quotient {} of {}, faithful {}, residuals rep {:.1e} adj {:.1e} state {:.1e}",
        g.quotient_dim,
        alg.dim(),
        g.faithful,
        g.representation_residual,
        g.adjoint_residual,
        g.state_residual
    );
    Ok(())
}

fn main() -> star_order_lab::Result<()> {
    let c = |v: f64| Complex64::new(v, 0.0);
    let m2 = FiniteStarAlgebra::matrix_algebra(2);
    // Basis E_00, E_01, E_10, E_11; ω(E_ab) is the (b, a) entry of the density matrix.
    report("M2, ρ = diag(0.7, 0.3)", &m2, &[c(0.7), c(0.0), c(0.0), c(0.3)])?;
    report("M2, ρ = e0 e0*", &m2, &[c(1.0), c(0.0), c(0.0), c(0.0)])?;

    let d3 = FiniteStarAlgebra::diagonal(3);
    report("ℂ³, weights (0.5, 0.5, 0)", &d3, &[c(0.5), c(0.5), c(0.0)])?;

    let sum = m2.direct_sum(&FiniteStarAlgebra::scalars());
    let mut omega = vec![c(0.25), c(0.0), c(0.0), c(0.25)];
    omega.push(c(0.5));
    report("M2 ⊕ ℂ", &sum, &omega)?;
    Ok(())
}
