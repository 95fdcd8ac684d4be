//! Rebuild a three-atom measure on the plane from its moments: GNS
//! operators on the quotient, then joint diagonalization.

use star_order_lab::gns::{gns_build, joint_diagonalize};
use star_order_lab::moments::{functional_from_atoms, Atom, AtomicMeasure};

fn main() -> star_order_lab::Result<()> {
    let truth = AtomicMeasure::new(vec![
        Atom {
            point: vec![0.5, -0.2],
            weight: 0.2,
        },
        Atom {
            point: vec![-0.7, 0.4],
            weight: 0.5,
        },
        Atom {
            point: vec![0.1, 0.9],
            weight: 0.3,
        },
    ])?;
    let d = 2;
    let moments = functional_from_atoms(&truth, 2 * d + 2);

    let rep = gns_build(&moments, d)?;
    println!(
        "quotient dimension {}, flat {}, commutator residual {:.1e}",
        rep.quotient_dim,
        rep.flat,
        rep.max_commutator_residual()
    );
    for (i, m) in rep.mult_matrices.iter().enumerate() {
        println!("π(x{}) = {:?}", i + 1, m.to_rows());
    }

    let found = joint_diagonalize(&rep)?;
    for a in found.atoms() {
        println!(
            "atom at ({:+.6}, {:+.6}) with weight {:.6}",
            a.point[0], a.point[1], a.weight
        );
    }
    Ok(())
}
