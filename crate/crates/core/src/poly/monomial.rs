use std::cmp::Ordering;
use std::fmt;

/// Exponent vector `x_1^{e_1} ... x_n^{e_n}` of a commutative monomial.
///
/// Ordering is graded lexicographic with `x_1 > x_2 > ... > x_n`, so sorted
/// sequences read `1, x, y, x², xy, y², ...`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn one(arity: usize) -> Self {
        Monomial { exps: vec![0; arity] }
    }

    /// The generator `x_index`.
    pub fn var(arity: usize, index: usize) -> Self {
        let mut exps = vec![0; arity];
        exps[index] = 1;
        Monomial { exps }
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn arity(&self) -> usize {
        self.exps.len()
    }

    pub fn total_degree(&self) -> usize {
        self.exps.iter().map(|&e| e as usize).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    /// Product of monomials (exponent addition). Arity must agree.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.arity(), other.arity());
        Monomial {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
        }
    }

    /// `self · x_index`.
    pub fn times_var(&self, index: usize) -> Monomial {
        let mut exps = self.exps.clone();
        exps[index] += 1;
        Monomial { exps }
    }

    pub fn eval_real(&self, point: &[f64]) -> f64 {
        self.exps.iter().zip(point).map(|(&e, &x)| x.powi(e as i32)).product()
    }

    /// If `self = 2α` for some monomial α, returns α.
    pub fn half(&self) -> Option<Monomial> {
        if self.exps.iter().all(|e| e % 2 == 0) {
            Some(Monomial {
                exps: self.exps.iter().map(|e| e / 2).collect(),
            })
        } else {
            None
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

const VAR_NAMES: [&str; 3] = ["x", "y", "z"];

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if self.arity() <= VAR_NAMES.len() {
                write!(f, "{}", VAR_NAMES[i])?;
            } else {
                write!(f, "x{}", i + 1)?;
            }
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// All monomials of total degree `<= degree` in graded-lex order.
///
/// The length is `C(arity + degree, degree)`.
pub fn monomials_up_to(arity: usize, degree: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for d in 0..=degree {
        let mut current = vec![0u32; arity];
        fill_degree(&mut out, &mut current, 0, d as u32);
    }
    out
}

/// `C(arity + degree, degree)`, or `None` on overflow.
pub fn monomial_count(arity: usize, degree: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for k in 1..=arity {
        acc = acc.checked_mul(degree + k)? / k;
    }
    Some(acc)
}

fn fill_degree(out: &mut Vec<Monomial>, current: &mut Vec<u32>, pos: usize, remaining: u32) {
    let arity = current.len();
    if arity == 0 {
        if remaining == 0 {
            out.push(Monomial::new(Vec::new()));
        }
        return;
    }
    if pos == arity - 1 {
        current[pos] = remaining;
        out.push(Monomial::new(current.clone()));
        current[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill_degree(out, current, pos + 1, remaining - e);
    }
    current[pos] = 0;
}
