//! Minimal Wavefront OBJ reader/writer plus the JSON color sidecar.
//!
//! Only `v` and `f` records are interpreted. Texture and normal indices in
//! `f` records (`1/2/3`) are stripped, polygons are fan-triangulated around
//! their first corner, and everything else is ignored.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{FaceColors, Mesh, MeshError, MeshResult, Vec3};

#[derive(Debug, Clone)]
pub struct ObjLoad {
    pub mesh: Mesh,
    /// Number of polygon records with more than three corners.
    pub fan_triangulated: usize,
}

pub fn load_obj<R: Read>(reader: R) -> MeshResult<ObjLoad> {
    let reader = BufReader::new(reader);
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut fan_triangulated = 0;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let content = line.split('#').next().unwrap_or("");
        let mut tokens = content.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<f64> = tokens
                    .take(3)
                    .map(|t| {
                        t.parse::<f64>().map_err(|e| MeshError::ParseError {
                            line: lineno,
                            message: format!("bad coordinate {t:?}: {e}"),
                        })
                    })
                    .collect::<MeshResult<_>>()?;
                if coords.len() != 3 {
                    return Err(MeshError::ParseError {
                        line: lineno,
                        message: "vertex needs three coordinates".into(),
                    });
                }
                if coords.iter().any(|c| !c.is_finite()) {
                    return Err(MeshError::ParseError {
                        line: lineno,
                        message: "non-finite coordinate".into(),
                    });
                }
                vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let corners = tokens
                    .map(|t| parse_index(t, vertices.len(), lineno))
                    .collect::<MeshResult<Vec<usize>>>()?;
                if corners.len() < 3 {
                    return Err(MeshError::ParseError {
                        line: lineno,
                        message: format!("face has {} corners", corners.len()),
                    });
                }
                if corners.len() > 3 {
                    fan_triangulated += 1;
                }
                for k in 1..corners.len() - 1 {
                    faces.push([corners[0], corners[k], corners[k + 1]]);
                }
            }
            _ => {}
        }
    }

    if vertices.is_empty() {
        return Err(MeshError::EmptyMesh);
    }
    Ok(ObjLoad {
        mesh: Mesh::new(vertices, faces)?,
        fan_triangulated,
    })
}

fn parse_index(token: &str, n_vertices: usize, line: usize) -> MeshResult<usize> {
    let head = token.split('/').next().unwrap_or("");
    let raw: i64 = head.parse().map_err(|e| MeshError::ParseError {
        line,
        message: format!("bad face index {token:?}: {e}"),
    })?;
    // negative indices count back from the most recent vertex
    let resolved = match raw {
        0 => None,
        r if r > 0 => Some(r - 1),
        r => Some(n_vertices as i64 + r),
    };
    match resolved {
        Some(i) if i >= 0 && (i as usize) < n_vertices => Ok(i as usize),
        _ => Err(MeshError::IndexOutOfRange { line, index: raw }),
    }
}

/// Writes `v` and `f` records. Coordinates use the shortest decimal form
/// that parses back to the identical `f64`.
pub fn save_obj<W: Write>(mesh: &Mesh, writer: W) -> MeshResult<()> {
    let mut w = BufWriter::new(writer);
    for v in mesh.vertices() {
        writeln!(w, "v {:?} {:?} {:?}", v.x, v.y, v.z)?;
    }
    for f in mesh.faces() {
        writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_obj_path(path: impl AsRef<Path>) -> MeshResult<ObjLoad> {
    load_obj(File::open(path)?)
}

pub fn save_obj_path(mesh: &Mesh, path: impl AsRef<Path>) -> MeshResult<()> {
    save_obj(mesh, File::create(path)?)
}

/// Sidecar color file: a JSON array with one `[r, g, b]` triple per face.
pub fn write_colors<W: Write>(mesh: &Mesh, writer: W) -> MeshResult<()> {
    let colors = mesh
        .face_colors()
        .ok_or_else(|| MeshError::InvalidColors("mesh has no face colors".into()))?;
    serde_json::to_writer(writer, &FaceColors(colors.to_vec()))?;
    Ok(())
}

pub fn read_colors<R: Read>(mesh: Mesh, reader: R) -> MeshResult<Mesh> {
    let FaceColors(colors) = serde_json::from_reader(reader)?;
    mesh.with_colors(colors)
}
