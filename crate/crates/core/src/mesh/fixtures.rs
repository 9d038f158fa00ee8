//! Small hand-built meshes used by tests, examples and the CLI fixtures.

use nalgebra::Rotation3;

use super::{Mesh, Vec3};

/// Two copies of the right triangle (0,0),(1,0),(0,1): the lower one at
/// `z = 0` (vertices 0..3), the upper one at `z = gap` (vertices 3..6).
pub fn stacked_triangles(gap: f64) -> Mesh {
    let base = [Vec3::zeros(), Vec3::x(), Vec3::y()];
    let mut vertices = base.to_vec();
    vertices.extend(base.iter().map(|v| v + Vec3::new(0.0, 0.0, gap)));
    Mesh::new(vertices, vec![[0, 1, 2], [3, 4, 5]]).expect("valid fixture")
}

fn regular_tetrahedron() -> Vec<Vec3> {
    vec![
        Vec3::new(1.0, 1.0, 1.0),
        Vec3::new(1.0, -1.0, -1.0),
        Vec3::new(-1.0, 1.0, -1.0),
        Vec3::new(-1.0, -1.0, 1.0),
    ]
}

fn outward_tetrahedron_faces(vertices: &[Vec3], offset: usize) -> Vec<[usize; 3]> {
    let centroid = vertices.iter().sum::<Vec3>() / vertices.len() as f64;
    [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]
        .into_iter()
        .map(|[a, b, c]| {
            let n = (vertices[b] - vertices[a]).cross(&(vertices[c] - vertices[a]));
            let out = (vertices[a] + vertices[b] + vertices[c]) / 3.0 - centroid;
            if n.dot(&out) > 0.0 {
                [a + offset, b + offset, c + offset]
            } else {
                [a + offset, c + offset, b + offset]
            }
        })
        .collect()
}

/// A regular tetrahedron and a rotated copy sharing its center; every one
/// of the eight faces crosses a face of the other solid.
pub fn two_tetrahedra() -> Mesh {
    let a = regular_tetrahedron();
    let rot = Rotation3::from_axis_angle(&Vec3::z_axis(), std::f64::consts::FRAC_PI_4)
        * Rotation3::from_axis_angle(&Vec3::x_axis(), 0.3);
    let b: Vec<Vec3> = a.iter().map(|v| rot * v).collect();
    let mut faces = outward_tetrahedron_faces(&a, 0);
    faces.extend(outward_tetrahedron_faces(&b, 4));
    let mut vertices = a;
    vertices.extend(b);
    Mesh::new(vertices, faces).expect("valid fixture")
}

/// Closed L-shaped prism: the polygon (0,0) (2,0) (2,1) (1,1) (1,2) (0,2)
/// extruded over `z` in `[0, 1]`, i.e. two unit-height boxes fused along a
/// face. Faces are wound outward.
pub fn l_shape() -> Mesh {
    let outline = [
        (0.0, 0.0),
        (2.0, 0.0),
        (2.0, 1.0),
        (1.0, 1.0),
        (1.0, 2.0),
        (0.0, 2.0),
    ];
    let n = outline.len();
    let mut vertices: Vec<Vec3> = outline.iter().map(|&(x, y)| Vec3::new(x, y, 0.0)).collect();
    vertices.extend(outline.iter().map(|&(x, y)| Vec3::new(x, y, 1.0)));

    let mut faces = Vec::new();
    // fan around corner 0 sees every other corner of the outline
    for k in 1..n - 1 {
        faces.push([0, k + 1, k]);
        faces.push([n, n + k, n + k + 1]);
    }
    for i in 0..n {
        let j = (i + 1) % n;
        faces.push([i, j, j + n]);
        faces.push([i, j + n, i + n]);
    }
    Mesh::new(vertices, faces).expect("valid fixture")
}
