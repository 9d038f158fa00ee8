//! Fixed-topology triangle meshes.
//!
//! A [`Mesh`] owns vertex positions, face index triples and optional
//! per-face colors. Everything downstream (projection, pushing, fitting)
//! treats the face list as immutable and only ever produces new vertex
//! positions.

mod adjacency;
pub mod fixtures;
mod icosphere;
mod obj;
mod regularize;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use adjacency::{build_adjacency, AdjacencyIndex};
pub use icosphere::{make_icosphere, MAX_SUBDIVISIONS};
pub use obj::{load_obj, load_obj_path, read_colors, save_obj, save_obj_path, write_colors, ObjLoad};
pub use regularize::{crease_energy, laplacian_energy};

pub type Vec3 = Vector3<f64>;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("subdivision level {requested} exceeds the limit of {limit}")]
    SubdivisionTooLarge { requested: u32, limit: u32 },
    #[error("parse error on line {line}: {message}")]
    ParseError { line: usize, message: String },
    #[error("line {line}: vertex index {index} out of range")]
    IndexOutOfRange { line: usize, index: i64 },
    #[error("mesh has no vertices")]
    EmptyMesh,
    #[error("face {face} is invalid: {reason}")]
    InvalidFace { face: usize, reason: String },
    #[error("invalid face colors: {0}")]
    InvalidColors(String),
    #[error("vertex {0} has no neighbors")]
    IsolatedVertex(usize),
    #[error("edge ({0}, {1}) is not shared by exactly two faces")]
    NonManifoldEdge(usize, usize),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type MeshResult<T> = Result<T, MeshError>;

/// Triangle mesh with fixed connectivity.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
    face_colors: Option<Vec<[f64; 3]>>,
}

impl Mesh {
    /// Builds a mesh, checking index range, distinct face corners and finite coordinates.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> MeshResult<Self> {
        let n = vertices.len();
        for (fi, f) in faces.iter().enumerate() {
            if let Some(&bad) = f.iter().find(|&&i| i >= n) {
                return Err(MeshError::InvalidFace {
                    face: fi,
                    reason: format!("index {bad} >= vertex count {n}"),
                });
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(MeshError::InvalidFace {
                    face: fi,
                    reason: format!("repeated vertex in {f:?}"),
                });
            }
        }
        if let Some(vi) = vertices.iter().position(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(MeshError::InvalidFace {
                face: usize::MAX,
                reason: format!("vertex {vi} has non-finite coordinates"),
            });
        }
        Ok(Self {
            vertices,
            faces,
            face_colors: None,
        })
    }

    pub fn with_colors(mut self, colors: Vec<[f64; 3]>) -> MeshResult<Self> {
        if colors.len() != self.faces.len() {
            return Err(MeshError::InvalidColors(format!(
                "{} colors for {} faces",
                colors.len(),
                self.faces.len()
            )));
        }
        if colors
            .iter()
            .flatten()
            .any(|c| !(0.0..=1.0).contains(c))
        {
            return Err(MeshError::InvalidColors(
                "color component outside [0, 1]".into(),
            ));
        }
        self.face_colors = Some(colors);
        Ok(self)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn face_colors(&self) -> Option<&[[f64; 3]]> {
        self.face_colors.as_deref()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    /// Same topology and colors, new vertex positions.
    ///
    /// Panics if `vertices` has a different length.
    pub fn with_vertices(&self, vertices: Vec<Vec3>) -> Self {
        assert_eq!(vertices.len(), self.vertices.len(), "vertex count changed");
        Self {
            vertices,
            faces: self.faces.clone(),
            face_colors: self.face_colors.clone(),
        }
    }

    pub fn triangle(&self, face: usize) -> [Vec3; 3] {
        self.faces[face].map(|i| self.vertices[i])
    }

    /// Unnormalized normal `(b - a) x (c - a)`; its length is twice the face area.
    pub fn face_normal(&self, face: usize) -> Vec3 {
        let [a, b, c] = self.triangle(face);
        (b - a).cross(&(c - a))
    }

    pub fn face_area(&self, face: usize) -> f64 {
        0.5 * self.face_normal(face).norm()
    }

    pub fn bbox(&self) -> Option<(Vec3, Vec3)> {
        let first = *self.vertices.first()?;
        Some(self.vertices.iter().fold((first, first), |(lo, hi), v| {
            (lo.inf(v), hi.sup(v))
        }))
    }

    pub fn bbox_diagonal(&self) -> f64 {
        self.bbox().map_or(0.0, |(lo, hi)| (hi - lo).norm())
    }

    /// Count of unordered vertex pairs joined by at least one face edge.
    pub fn num_edges(&self) -> usize {
        let mut edges: Vec<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(|f| (0..3).map(move |k| sorted_edge(f[k], f[(k + 1) % 3])))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64
    }

    pub fn faces_share_vertex(&self, f: usize, g: usize) -> bool {
        let a = &self.faces[f];
        self.faces[g].iter().any(|v| a.contains(v))
    }

    /// Maps every vertex through an affine transform `v -> scale * v + offset` (per axis).
    pub fn transformed(&self, scale: Vec3, offset: Vec3) -> Self {
        self.with_vertices(
            self.vertices
                .iter()
                .map(|v| v.component_mul(&scale) + offset)
                .collect(),
        )
    }

    /// Merges two meshes into one; the second mesh's indices are shifted.
    pub fn concat(&self, other: &Mesh) -> Mesh {
        let shift = self.vertices.len();
        let mut vertices = self.vertices.clone();
        vertices.extend_from_slice(&other.vertices);
        let mut faces = self.faces.clone();
        faces.extend(other.faces.iter().map(|f| f.map(|i| i + shift)));
        Mesh {
            vertices,
            faces,
            face_colors: None,
        }
    }
}

pub(crate) fn sorted_edge(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Face colors as stored in the sidecar JSON file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(transparent)]
pub struct FaceColors(pub Vec<[f64; 3]>);
