//! Local smoothness energies with analytic vertex gradients.

use super::{build_adjacency, Mesh, MeshError, MeshResult, Vec3};

/// Uniform Laplacian energy `sum_v |v - mean(neighbors(v))|^2`.
pub fn laplacian_energy(mesh: &Mesh) -> MeshResult<(f64, Vec<Vec3>)> {
    let adj = build_adjacency(mesh);
    let verts = mesh.vertices();
    let mut energy = 0.0;
    let mut grad = vec![Vec3::zeros(); verts.len()];
    for (v, nbrs) in adj.vertex_neighbors.iter().enumerate() {
        if nbrs.is_empty() {
            return Err(MeshError::IsolatedVertex(v));
        }
        let inv = 1.0 / nbrs.len() as f64;
        let mean = nbrs.iter().map(|&u| verts[u]).sum::<Vec3>() * inv;
        let r = verts[v] - mean;
        energy += r.norm_squared();
        grad[v] += 2.0 * r;
        for &u in nbrs {
            grad[u] -= 2.0 * inv * r;
        }
    }
    Ok((energy, grad))
}

/// Crease energy `sum_e (1 - cos theta_e)^2` over interior edges, where
/// `cos theta_e` is the dot product of the unit normals of the two faces
/// sharing edge `e`. Boundary edges contribute nothing; edges with more than
/// two faces are rejected.
pub fn crease_energy(mesh: &Mesh) -> MeshResult<(f64, Vec<Vec3>)> {
    let adj = build_adjacency(mesh);
    let nf = mesh.num_faces();
    let mut normals = Vec::with_capacity(nf);
    let mut lengths = Vec::with_capacity(nf);
    for f in 0..nf {
        let n = mesh.face_normal(f);
        let len = n.norm();
        lengths.push(len);
        normals.push(if len > 0.0 { n / len } else { Vec3::zeros() });
    }

    let mut energy = 0.0;
    let mut grad_unit = vec![Vec3::zeros(); nf];
    for (&(a, b), faces) in &adj.edge_to_faces {
        let (f, g) = match faces.as_slice() {
            [_] => continue,
            &[f, g] => (f, g),
            _ => return Err(MeshError::NonManifoldEdge(a, b)),
        };
        let one_minus = 1.0 - normals[f].dot(&normals[g]);
        energy += one_minus * one_minus;
        grad_unit[f] -= 2.0 * one_minus * normals[g];
        grad_unit[g] -= 2.0 * one_minus * normals[f];
    }

    let verts = mesh.vertices();
    let mut grad = vec![Vec3::zeros(); verts.len()];
    for (f, face) in mesh.faces().iter().enumerate() {
        if lengths[f] == 0.0 {
            continue;
        }
        let n = normals[f];
        let gu = grad_unit[f];
        // d(N/|N|) = (I - n n^T) dN / |N|
        let g_raw = (gu - n * n.dot(&gu)) / lengths[f];
        let [a, b, c] = face.map(|i| verts[i]);
        let gb = (c - a).cross(&g_raw);
        let gc = g_raw.cross(&(b - a));
        grad[face[0]] -= gb + gc;
        grad[face[1]] += gb;
        grad[face[2]] += gc;
    }
    Ok((energy, grad))
}
