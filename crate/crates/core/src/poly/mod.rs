//! Sparse multivariate polynomial *-algebra `ℂ[x_1, ..., x_n]` with Hermitian
//! generators.
//!
//! Coefficients are either exact complex rationals ([`ExactPolynomial`]) or
//! `f64` complex numbers ([`FloatPolynomial`]). Exact mode is what certificate
//! checks use; float mode feeds the numerical solvers.

mod coeff;
mod monomial;
mod polynomial;

pub(crate) use coeff::float_from_json;
pub use coeff::{rational_from_str, rational_to_f64, rational_to_string, Coefficient, ExactComplex, Mode, Rational};
pub use monomial::{monomial_count, monomials_up_to, Monomial};
pub(crate) use polynomial::parse_exps;
pub use polynomial::{
    hermitian_decompose, sum, support, AnyPolynomial, ExactPolynomial, FloatPolynomial, HermitianDecomposition,
    Polynomial,
};

use crate::error::{Error, Result};
use crate::sos::SosCertificate;

/// `a = p − q` with `p = ((a+1)/2)²` and `q = ((a−1)/2)²`, i.e. `4a = (a+1)² − (a−1)²`.
#[derive(Debug, Clone)]
pub struct DirectedDecomposition<C: Coefficient> {
    pub positive: Polynomial<C>,
    pub negative: Polynomial<C>,
    pub positive_certificate: SosCertificate<C>,
    pub negative_certificate: SosCertificate<C>,
}

/// Writes a Hermitian element as a difference of two squares.
pub fn directed_decomposition<C: Coefficient>(a: &Polynomial<C>) -> Result<DirectedDecomposition<C>> {
    if !a.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let half = C::from_ratio(1, 2);
    let one = Polynomial::one(a.arity());
    let up = (a + &one).scale(&half);
    let down = (a - &one).scale(&half);
    Ok(DirectedDecomposition {
        positive: up.hermitian_square(),
        negative: down.hermitian_square(),
        positive_certificate: SosCertificate::new(vec![up]),
        negative_certificate: SosCertificate::new(vec![down]),
    })
}

/// How the summand of the dominating sequence is indexed.
///
/// The construction is usually written `v̂_n = n Σ_{k≤n} (1 + a_k²)`; a literal
/// reading with `a_n` inside the sum gives `n²(1 + a_n²)`. Both are exposed,
/// but only the per-generator form dominates every `±2 a_k` for `k ≤ n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DominatingIndex {
    #[default]
    PerGenerator,
    LastGenerator,
}

fn check_dominating_input<C: Coefficient>(generators: &[Polynomial<C>], n: usize) -> Result<usize> {
    if n == 0 || n > generators.len() {
        return Err(Error::IndexOutOfRange {
            index: n,
            len: generators.len(),
        });
    }
    if generators.iter().any(|g| !g.is_hermitian()) {
        return Err(Error::NotHermitian);
    }
    let arity = generators[0].arity();
    if let Some(g) = generators.iter().find(|g| g.arity() != arity) {
        return Err(Error::ArityMismatch {
            expected: arity,
            found: g.arity(),
        });
    }
    Ok(arity)
}

/// `v̂_n = n · Σ_{k=1}^{n} (1 + a_k²)` for 1-based `n`.
pub fn dominating_sequence<C: Coefficient>(generators: &[Polynomial<C>], n: usize) -> Result<Polynomial<C>> {
    dominating_sequence_with(generators, n, DominatingIndex::PerGenerator)
}

pub fn dominating_sequence_with<C: Coefficient>(
    generators: &[Polynomial<C>],
    n: usize,
    index: DominatingIndex,
) -> Result<Polynomial<C>> {
    let arity = check_dominating_input(generators, n)?;
    let one = Polynomial::one(arity);
    let summand = |k: usize| &one + &generators[k].pow(2);
    let inner = match index {
        DominatingIndex::PerGenerator => {
            let parts: Vec<_> = (0..n).map(summand).collect();
            sum(arity, &parts)
        }
        DominatingIndex::LastGenerator => summand(n - 1).scale(&C::from_ratio(n as i64, 1)),
    };
    Ok(inner.scale(&C::from_ratio(n as i64, 1)))
}

/// Sign in `v̂_n ∓ 2n·a_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Exact certificate for `v̂_n − 2n·a_k` (`Sign::Minus`) or `v̂_n + 2n·a_k` (`Sign::Plus`).
///
/// `v̂_n ∓ 2n a_k = n (a_k ∓ 1)² + n Σ_{j≠k} (1 + a_j²)`; the factor `n` is
/// realised by repeating each square `n` times so every square stays rational.
/// `k` is 1-based.
pub fn dominating_certificate<C: Coefficient>(
    generators: &[Polynomial<C>],
    n: usize,
    k: usize,
    sign: Sign,
) -> Result<(Polynomial<C>, SosCertificate<C>)> {
    let arity = check_dominating_input(generators, n)?;
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, len: n });
    }
    let one = Polynomial::one(arity);
    let a_k = &generators[k - 1];
    let shifted = match sign {
        Sign::Minus => a_k - &one,
        Sign::Plus => a_k + &one,
    };
    let mut base = vec![shifted];
    for (j, g) in generators.iter().enumerate().take(n) {
        if j != k - 1 {
            base.push(one.clone());
            base.push(g.clone());
        }
    }
    let squares: Vec<_> = (0..n).flat_map(|_| base.iter().cloned()).collect();
    let shift = a_k.scale(&C::from_ratio(2 * n as i64, 1));
    let v = dominating_sequence(generators, n)?;
    let target = match sign {
        Sign::Minus => &v - &shift,
        Sign::Plus => &v + &shift,
    };
    Ok((target, SosCertificate::new(squares)))
}
