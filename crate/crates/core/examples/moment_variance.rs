//! States from atomic measures: Cauchy-Schwarz, the variance formulas and
//! the pure/multiplicative dichotomy.

use num_complex::Complex64;
use star_order_lab::moments::{
    cauchy_schwarz_residual, functional_from_atoms, multiplicativity_test, variance_report, Atom, AtomicMeasure,
};
use star_order_lab::poly::FloatPolynomial;

fn main() -> star_order_lab::Result<()> {
    let x = FloatPolynomial::var(1, 0);
    let one = FloatPolynomial::one(1);
    let a = &(&x * &x) - &one.scale(&Complex64::new(0.5, 0.0));
    let b = &x + &one;

    let point = functional_from_atoms(&AtomicMeasure::single(vec![0.3])?, 4);
    let mixture = functional_from_atoms(
        &AtomicMeasure::new(vec![
            Atom {
                point: vec![-1.0],
                weight: 0.5,
            },
            Atom {
                point: vec![1.0],
                weight: 0.5,
            },
        ])?,
        4,
    );

    for (name, l) in [("δ_0.3", &point), ("½(δ_−1 + δ_1)", &mixture)] {
        let v = variance_report(l, &x)?;
        println!("{name}:");
        println!(
            "  Var(x): definitional {:.6}, alternative {:.6}",
            v.definitional, v.alternative
        );
        println!(
            "  Cauchy-Schwarz residual for (a, b): {:.6}",
            cauchy_schwarz_residual(l, &a, &b)?
        );
        println!(
            "  multiplicative: {}",
            multiplicativity_test(l, std::slice::from_ref(&x), 1e-9)?
        );
    }
    Ok(())
}
