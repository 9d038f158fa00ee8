//! Count self-intersecting faces on a clean sphere, the two-tetrahedra
//! fixture and a sphere with a dent pushed straight through it.

use meshpush::geometry::{count_intersecting_faces, count_intersecting_faces_exhaustive, default_tolerance};
use meshpush::mesh::{fixtures, make_icosphere, Mesh, Vec3};

fn report(name: &str, m: &Mesh) {
    let tol = default_tolerance(m);
    let fast = count_intersecting_faces(m, tol);
    let slow = count_intersecting_faces_exhaustive(m, tol);
    println!(
        "{name:<16} {:>4}/{:<4} faces intersect (broad phase tested {} pairs, exhaustive {})",
        fast.count,
        m.num_faces(),
        fast.pairs_tested,
        slow.pairs_tested
    );
    assert_eq!(fast.intersecting, slow.intersecting);
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sphere = make_icosphere(2)?;
    report("icosphere(2)", &sphere);
    report("two tetrahedra", &fixtures::two_tetrahedra());

    // drag every vertex of the upper cap down past the south pole
    let dented: Vec<Vec3> = sphere
        .vertices()
        .iter()
        .map(|v| if v.z > 0.5 { v - Vec3::new(0.0, 0.0, 2.0) } else { *v })
        .collect();
    report("dented sphere", &sphere.with_vertices(dented));
    Ok(())
}
