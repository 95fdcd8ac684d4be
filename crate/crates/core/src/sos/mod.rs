//! Sums of Hermitian squares: certificates, Gram feasibility, dual witnesses.

mod certificate;
mod nonradical;
mod solver;
mod witness;

pub use certificate::{float_tolerance, verify_certificate, AnyCertificate, SosCertificate};
pub use nonradical::{
    demonstrate_nonradical, multiplier, multiplier_certificate, positive_non_square, product_certificate,
    product_of_certificates, unit_gap_certificate, NonradicalReport, NonradicalStep,
};
pub use solver::{
    build_problem, extract_certificate, pruned_basis, sos_feasibility, Feasibility, GramConstraint, SosProblem,
    MAX_GRAM_BASIS,
};
pub use witness::{non_sos_witness, DualWitness, WitnessOutcome, WITNESS_DEPTH};
