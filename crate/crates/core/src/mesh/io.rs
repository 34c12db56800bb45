//! OBJ and STL loading. OBJ handles `v`/`f` records only; STL handles both
//! the binary and ASCII flavors with vertex welding at 1e-7 m.

use std::path::Path;

use nalgebra::Point3;

use crate::error::{Error, Result};

use super::{TriMesh, WELD_TOL};

/// Load a mesh from an OBJ or STL file and validate it.
///
/// The format is picked by extension (`.obj` / `.stl`, case-insensitive);
/// anything else is a parse error. Coordinates are interpreted as meters;
/// callers that declare other units rescale afterwards.
pub fn load_mesh(path: impl AsRef<Path>) -> Result<TriMesh> {
    let path = path.as_ref();
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    let bytes = std::fs::read(path).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let (vertices, triangles) = match ext.as_str() {
        "obj" => parse_obj(&bytes, path)?,
        "stl" => parse_stl(&bytes, path)?,
        other => {
            return Err(Error::Parse {
                path: path.display().to_string(),
                reason: format!("unsupported extension {other:?}; expected obj or stl"),
            })
        }
    };
    TriMesh::new(vertices, triangles)
}

/// Build a mesh from raw vertex/triangle data after rescaling to meters.
pub fn mesh_from_scaled(
    vertices: Vec<Point3<f64>>,
    triangles: Vec<[u32; 3]>,
    scale: f64,
) -> Result<TriMesh> {
    let vertices = vertices
        .into_iter()
        .map(|v| Point3::from(v.coords * scale))
        .collect();
    TriMesh::new(vertices, triangles)
}

/// Write a mesh as an ASCII OBJ (v/f records, full float precision).
pub fn write_obj(mesh: &super::TriMesh, path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for v in mesh.vertices() {
        out.push_str(&format!("v {} {} {}\n", v.x, v.y, v.z));
    }
    for t in mesh.triangles() {
        out.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn parse_obj(bytes: &[u8], path: &Path) -> Result<(Vec<Point3<f64>>, Vec<[u32; 3]>)> {
    let text = std::str::from_utf8(bytes).map_err(|_| Error::Parse {
        path: path.display().to_string(),
        reason: "OBJ file is not valid UTF-8".into(),
    })?;
    let err = |line_no: usize, reason: String| Error::Parse {
        path: path.display().to_string(),
        reason: format!("line {}: {}", line_no + 1, reason),
    };

    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("v") => {
                let mut coords = [0.0f64; 3];
                for c in &mut coords {
                    *c = fields
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| err(line_no, "malformed vertex record".into()))?;
                }
                vertices.push(Point3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let idx: Vec<u32> = fields
                    .map(|tok| {
                        let first = tok.split('/').next().unwrap_or("");
                        let i: i64 = first
                            .parse()
                            .map_err(|_| err(line_no, format!("bad face index {tok:?}")))?;
                        let resolved = if i > 0 {
                            i - 1
                        } else if i < 0 {
                            vertices.len() as i64 + i
                        } else {
                            return Err(err(line_no, "face index 0 is invalid".into()));
                        };
                        if resolved < 0 || resolved as usize >= vertices.len() {
                            return Err(err(line_no, format!("face index {i} out of range")));
                        }
                        Ok(resolved as u32)
                    })
                    .collect::<Result<_>>()?;
                if idx.len() < 3 {
                    return Err(err(line_no, "face needs at least 3 vertices".into()));
                }
                // Fan-triangulate polygons.
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            // Only v/f records are supported; everything else is ignored.
            _ => {}
        }
    }
    if vertices.is_empty() || triangles.is_empty() {
        return Err(Error::Parse {
            path: path.display().to_string(),
            reason: "no v/f records found".into(),
        });
    }
    Ok((vertices, triangles))
}

fn parse_stl(bytes: &[u8], path: &Path) -> Result<(Vec<Point3<f64>>, Vec<[u32; 3]>)> {
    let facets = if is_binary_stl(bytes) {
        parse_binary_stl(bytes, path)?
    } else {
        parse_ascii_stl(bytes, path)?
    };
    if facets.is_empty() {
        return Err(Error::Parse {
            path: path.display().to_string(),
            reason: "STL contains no facets".into(),
        });
    }
    Ok(weld(facets))
}

fn is_binary_stl(bytes: &[u8]) -> bool {
    if bytes.len() < 84 {
        return false;
    }
    let count = u32::from_le_bytes([bytes[80], bytes[81], bytes[82], bytes[83]]) as usize;
    if bytes.len() == 84 + 50 * count {
        return true;
    }
    // Not size-consistent with binary; treat as ASCII when it leads with
    // "solid", else fall back to binary and let the parser complain.
    !bytes.starts_with(b"solid")
}

fn parse_binary_stl(bytes: &[u8], path: &Path) -> Result<Vec<[Point3<f64>; 3]>> {
    if bytes.len() < 84 {
        return Err(Error::Parse {
            path: path.display().to_string(),
            reason: "binary STL shorter than its 84-byte header".into(),
        });
    }
    let count = u32::from_le_bytes([bytes[80], bytes[81], bytes[82], bytes[83]]) as usize;
    if bytes.len() < 84 + 50 * count {
        return Err(Error::Parse {
            path: path.display().to_string(),
            reason: format!("binary STL truncated: {count} facets declared"),
        });
    }
    let read_f32 = |off: usize| f32::from_le_bytes([bytes[off], bytes[off + 1], bytes[off + 2], bytes[off + 3]]);
    let mut facets = Vec::with_capacity(count);
    for i in 0..count {
        let base = 84 + 50 * i + 12; // skip the facet normal
        let mut tri = [Point3::origin(); 3];
        for (v, p) in tri.iter_mut().enumerate() {
            let off = base + 12 * v;
            *p = Point3::new(
                read_f32(off) as f64,
                read_f32(off + 4) as f64,
                read_f32(off + 8) as f64,
            );
        }
        facets.push(tri);
    }
    Ok(facets)
}

fn parse_ascii_stl(bytes: &[u8], path: &Path) -> Result<Vec<[Point3<f64>; 3]>> {
    let text = std::str::from_utf8(bytes).map_err(|_| Error::Parse {
        path: path.display().to_string(),
        reason: "ASCII STL is not valid UTF-8".into(),
    })?;
    let mut facets = Vec::new();
    let mut current: Vec<Point3<f64>> = Vec::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix("vertex") {
            let coords: Vec<f64> = rest
                .split_whitespace()
                .map(|s| s.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse {
                    path: path.display().to_string(),
                    reason: format!("line {}: malformed vertex", line_no + 1),
                })?;
            if coords.len() != 3 {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    reason: format!("line {}: vertex needs 3 coordinates", line_no + 1),
                });
            }
            current.push(Point3::new(coords[0], coords[1], coords[2]));
        } else if line.starts_with("endfacet") {
            if current.len() != 3 {
                return Err(Error::Parse {
                    path: path.display().to_string(),
                    reason: format!("line {}: facet with {} vertices", line_no + 1, current.len()),
                });
            }
            facets.push([current[0], current[1], current[2]]);
            current.clear();
        }
    }
    Ok(facets)
}

/// Merge facet soup into indexed vertices, welding within `WELD_TOL`.
fn weld(facets: Vec<[Point3<f64>; 3]>) -> (Vec<Point3<f64>>, Vec<[u32; 3]>) {
    use std::collections::HashMap;
    let quantum = WELD_TOL;
    let key = |p: &Point3<f64>| {
        (
            (p.x / quantum).round() as i64,
            (p.y / quantum).round() as i64,
            (p.z / quantum).round() as i64,
        )
    };
    let mut index: HashMap<(i64, i64, i64), u32> = HashMap::new();
    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut triangles = Vec::with_capacity(facets.len());
    for facet in &facets {
        let mut tri = [0u32; 3];
        for (k, p) in facet.iter().enumerate() {
            let id = *index.entry(key(p)).or_insert_with(|| {
                vertices.push(*p);
                (vertices.len() - 1) as u32
            });
            tri[k] = id;
        }
        triangles.push(tri);
    }
    (vertices, triangles)
}
