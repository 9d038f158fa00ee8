use std::collections::BTreeMap;

use super::{sorted_edge, Mesh};

/// Vertex and face incidence relations of a mesh.
#[derive(Debug, Clone)]
pub struct AdjacencyIndex {
    /// Sorted neighbor list per vertex.
    pub vertex_neighbors: Vec<Vec<usize>>,
    /// Sorted list of incident faces per vertex.
    pub vertex_faces: Vec<Vec<usize>>,
    /// Undirected edge `(lo, hi)` to the faces that contain it, in face order.
    pub edge_to_faces: BTreeMap<(usize, usize), Vec<usize>>,
}

impl AdjacencyIndex {
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.vertex_neighbors[v]
    }

    pub fn faces_share_vertex(&self, mesh: &Mesh, f: usize, g: usize) -> bool {
        mesh.faces()[f]
            .iter()
            .any(|v| self.vertex_faces[*v].binary_search(&g).is_ok())
    }

    pub fn is_closed_manifold(&self) -> bool {
        self.edge_to_faces.values().all(|fs| fs.len() == 2)
    }
}

pub fn build_adjacency(mesh: &Mesh) -> AdjacencyIndex {
    let n = mesh.num_vertices();
    let mut vertex_neighbors = vec![Vec::new(); n];
    let mut vertex_faces = vec![Vec::new(); n];
    let mut edge_to_faces: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (fi, f) in mesh.faces().iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            vertex_neighbors[a].push(b);
            vertex_neighbors[b].push(a);
            vertex_faces[a].push(fi);
            edge_to_faces.entry(sorted_edge(a, b)).or_default().push(fi);
        }
    }
    for list in vertex_neighbors.iter_mut().chain(vertex_faces.iter_mut()) {
        list.sort_unstable();
        list.dedup();
    }
    AdjacencyIndex {
        vertex_neighbors,
        vertex_faces,
        edge_to_faces,
    }
}
