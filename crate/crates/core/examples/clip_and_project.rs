//! Project two faces of a mesh onto the plane perpendicular to a direction,
//! clip them against each other and express the overlap corners in
//! barycentric coordinates of each face.

use meshpush::geometry::{barycentric, clip_triangles_tracked, orthonormal_basis, project_mesh};
use meshpush::mesh::{fixtures, Vec3};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mesh = fixtures::stacked_triangles(0.5);
    let direction = Vec3::new(0.2, -0.1, 1.0);
    let frame = orthonormal_basis(&direction)?;
    let projected = project_mesh(&mesh, &frame);

    let [f, g] = [mesh.faces()[0], mesh.faces()[1]];
    let (t1, t2) = (projected.triangle(&f), projected.triangle(&g));
    let Some((overlap, origins)) = clip_triangles_tracked(&t1, &t2, 1e-12) else {
        println!("faces do not overlap along {direction:?}");
        return Ok(());
    };
    println!("overlap polygon with {} corners, area {:.6}", overlap.len(), overlap.area());
    for (p, origin) in overlap.corners().iter().zip(&origins) {
        let b1 = barycentric(p, &t1)?;
        let b2 = barycentric(p, &t2)?;
        let depth_gap = b2.dot(&depths(&mesh, &frame, g)) - b1.dot(&depths(&mesh, &frame, f));
        println!(
            "  ({:+.4}, {:+.4}) from {origin:?}: depth gap upper-lower {depth_gap:.4}",
            p.x, p.y
        );
    }
    Ok(())
}

fn depths(
    mesh: &meshpush::mesh::Mesh,
    frame: &meshpush::geometry::ProjectionFrame,
    face: [usize; 3],
) -> [f64; 3] {
    face.map(|v| frame.depth(&mesh.vertices()[v]))
}
