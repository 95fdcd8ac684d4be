//! The order by sums of squares on ℝ[x, y] is not radical: with
//! `q = x² + y² + 1` and `p = x⁴y² + x²y⁴ − x²y² + 1` we have `1 ≤ q²`,
//! `0 ≤ q p q`, and yet `p` is not a sum of squares.

use star_order_lab::sos::demonstrate_nonradical;

fn main() -> star_order_lab::Result<()> {
    let report = demonstrate_nonradical()?;
    for (i, step) in report.steps.iter().enumerate() {
        let mark = if step.passed { "ok  " } else { "FAIL" };
        let how = if step.exact { "exact" } else { "numeric" };
        println!("{mark} step {}: {} [{how}] {}", i + 1, step.name, step.detail);
    }
    if let Some(w) = &report.witness {
        println!(
            "dual witness: L(p) = {:.6}, smallest moment eigenvalue {:.3e}",
            w.value, w.min_eigenvalue
        );
    }
    println!("complete: {}", report.is_complete());
    Ok(())
}
