//! Decide membership in the sum-of-squares cone for `(x²y² − 1)² + x²`,
//! extract the squares from the Gram matrix and re-check them.

use num_complex::Complex64;
use star_order_lab::poly::{FloatPolynomial, Mode, Monomial};
use star_order_lab::sos::{build_problem, extract_certificate, sos_feasibility, verify_certificate, Feasibility};

fn main() -> star_order_lab::Result<()> {
    let c = |v: f64| Complex64::new(v, 0.0);
    let p = FloatPolynomial::from_terms(
        2,
        [
            (Monomial::new(vec![4, 4]), c(1.0)),
            (Monomial::new(vec![2, 2]), c(-2.0)),
            (Monomial::new(vec![2, 0]), c(1.0)),
            (Monomial::new(vec![0, 0]), c(1.0)),
        ],
    )?;
    let problem = build_problem(&p)?;
    println!(
        "Gram basis of {} monomials, {} coefficient constraints",
        problem.basis_size(),
        problem.constraints.len()
    );

    match sos_feasibility(&problem, 20_000, 1e-9)? {
        Feasibility::Feasible {
            gram,
            iterations,
            residual,
        } => {
            println!("feasible after {iterations} iterations, residual {residual:.2e}");
            let cert = extract_certificate(&gram, &problem.gram_basis)?;
            println!("{} squares:", cert.len());
            for q in &cert.squares {
                println!("  {}", q.to_json());
            }
            println!("float verification: {}", verify_certificate(&p, &cert, Mode::Float)?);
        }
        Feasibility::Undecided { gap, iterations } => {
            println!("undecided after {iterations} iterations, gap {gap:.2e}");
        }
    }
    Ok(())
}
