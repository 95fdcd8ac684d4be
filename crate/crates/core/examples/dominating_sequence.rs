use star_order_lab::poly::{dominating_certificate, dominating_sequence, ExactPolynomial, Mode, Sign};
use star_order_lab::sos::verify_certificate;

/// Generators `x, y, xy` of ℝ[x, y]; the dominating sequence
/// `v̂_n = n Σ_{k≤n} (1 + a_k²)` bounds `±2n a_k` for every `k ≤ n`,
/// and each bound comes with an exact certificate.
fn main() -> star_order_lab::Result<()> {
    let x = ExactPolynomial::var(2, 0);
    let y = ExactPolynomial::var(2, 1);
    let gens = vec![x.clone(), y.clone(), &x * &y];

    for n in 1..=gens.len() {
        let v = dominating_sequence(&gens, n)?;
        println!("v̂_{n} = {}", v.to_json());
        for k in 1..=n {
            for sign in [Sign::Minus, Sign::Plus] {
                let (target, cert) = dominating_certificate(&gens, n, k, sign)?;
                let ok = verify_certificate(&target, &cert, Mode::Exact)?;
                println!("  {sign:?} 2·{n}·a_{k}: {} squares, exact check {ok}", cert.len());
            }
        }
    }
    Ok(())
}
