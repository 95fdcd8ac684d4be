//! Order intervals and the `U_δ` neighbourhoods of zero for the orthant in ℝ².

use star_order_lab::cone::{
    interval_member, minkowski_gauge, u_delta_member, DeltaNeighborhood, OrderInterval, PolyhedralCone,
};

fn main() -> star_order_lab::Result<()> {
    let cone = PolyhedralCone::orthant(2);
    let interval = OrderInterval::new(cone.clone(), vec![-1.0, 0.0], vec![1.0, 2.0])?;
    for v in [[0.5, 1.5], [1.5, 1.0]] {
        println!("{v:?} in [(-1, 0), (1, 2)]: {}", interval_member(&interval, &v)?);
    }

    let dominating = vec![vec![1.0, 1.0], vec![2.0, 4.0], vec![3.0, 9.0]];
    let u = DeltaNeighborhood::new(cone, dominating, vec![0.5, 0.25, 0.1])?;
    for v in [[0.3, -0.4], [2.0, 0.0], [-0.9, 2.0]] {
        println!(
            "{v:?}: in U_δ {}, gauge {:.4}",
            u_delta_member(&u, &v)?,
            minkowski_gauge(&u, &v, 1e-9)?
        );
    }
    Ok(())
}
