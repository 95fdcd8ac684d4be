use star_order_lab::cone::{
    cone_member, decompose_into_extremals, dual_extreme_rays, recombine, separate, PolyhedralCone,
};

/// A pointed cone in ℝ³ over a square, separation of an outside
/// vector and extremal decomposition of a positive functional.
fn main() -> star_order_lab::Result<()> {
    let cone = PolyhedralCone::new(
        3,
        vec![
            vec![1.0, 1.0, 1.0],
            vec![1.0, -1.0, 1.0],
            vec![-1.0, 1.0, 1.0],
            vec![-1.0, -1.0, 1.0],
        ],
    )?;
    let rays = dual_extreme_rays(&cone)?;
    println!("dual cone has {} extreme rays:", rays.len());
    for r in &rays {
        println!("  {r:?}");
    }

    for v in [vec![0.2, -0.3, 1.0], vec![2.0, 0.0, 1.0]] {
        if cone_member(&cone, &v)? {
            println!("{v:?} is in the cone");
        } else {
            let w = separate(&cone, &v)?;
            let value: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
            println!("{v:?} is outside; ω = {w:?} gives ⟨ω, v⟩ = {value}");
        }
    }

    let omega = vec![0.0, 0.0, 1.0];
    let terms = decompose_into_extremals(&cone, &omega)?;
    println!("ω = {omega:?} as a sum of extremals:");
    for (c, r) in &terms {
        println!("  {c:.4} · {r:?}");
    }
    println!("recombined: {:?}", recombine(&terms, 3));
    Ok(())
}
