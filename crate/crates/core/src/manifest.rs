//! Assembly manifest files: the TOML input format (schema v1).
//!
//! A manifest declares units, the floor height, the part list (id, name,
//! mesh path, pose), an optional explicit liaison list, and optional config
//! overrides. Mesh paths resolve relative to the manifest's directory; all
//! lengths are rescaled to meters on load.

use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::assembly::{Assembly, Part, PartId};
use crate::error::{Error, Result};
use crate::mesh::{load_mesh, Pose};

pub const MANIFEST_SCHEMA: &str = "digplan-manifest-v1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestPart {
    pub id: u32,
    pub name: String,
    pub mesh: String,
    #[serde(default = "zero3")]
    pub position: [f64; 3],
    #[serde(default = "unit_quat")]
    pub rotation: [f64; 4],
}

fn zero3() -> [f64; 3] {
    [0.0; 3]
}

fn unit_quat() -> [f64; 4] {
    [1.0, 0.0, 0.0, 0.0]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestLiaison {
    pub a: u32,
    pub b: u32,
}

/// Optional numeric overrides; command-line flags still win.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ManifestConfig {
    pub shells: Option<usize>,
    pub samples: Option<usize>,
    pub accept: Option<f64>,
    pub contact_tol: Option<f64>,
    pub seed: Option<u64>,
    pub k_dirs: Option<usize>,
    pub cluster_k: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssemblyManifest {
    pub schema: String,
    #[serde(default = "default_units")]
    pub units: String,
    #[serde(default)]
    pub floor_z: f64,
    pub parts: Vec<ManifestPart>,
    #[serde(default)]
    pub liaisons: Option<Vec<ManifestLiaison>>,
    #[serde(default)]
    pub config: Option<ManifestConfig>,
}

fn default_units() -> String {
    "m".to_string()
}

/// A manifest resolved into geometry.
#[derive(Debug, Clone)]
pub struct LoadedAssembly {
    pub assembly: Assembly,
    pub floor_z: f64,
    pub explicit_liaisons: Option<Vec<(PartId, PartId)>>,
    pub config: ManifestConfig,
}

fn unit_scale(units: &str) -> Result<f64> {
    match units {
        "m" => Ok(1.0),
        "cm" => Ok(0.01),
        "mm" => Ok(0.001),
        other => Err(Error::InvalidInput(format!(
            "unknown units {other:?}; expected m, cm, or mm"
        ))),
    }
}

/// Parse and resolve a manifest file.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<LoadedAssembly> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let manifest: AssemblyManifest = toml::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    if manifest.schema != MANIFEST_SCHEMA {
        return Err(Error::InvalidInput(format!(
            "unsupported schema {:?}; expected {MANIFEST_SCHEMA:?}",
            manifest.schema
        )));
    }
    let scale = unit_scale(&manifest.units)?;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));

    let mut ids = Vec::new();
    let mut parts = Vec::new();
    for mp in &manifest.parts {
        if ids.contains(&mp.id) {
            return Err(Error::InvalidInput(format!("duplicate part id {}", mp.id)));
        }
        if mp.name.is_empty() || mp.name.chars().any(char::is_whitespace) {
            return Err(Error::InvalidInput(format!(
                "part {} name {:?} must be nonempty without whitespace",
                mp.id, mp.name
            )));
        }
        ids.push(mp.id);
        let mesh_path = dir.join(&mp.mesh);
        let mesh = load_mesh(&mesh_path)?;
        let mesh = if scale == 1.0 {
            mesh
        } else {
            crate::mesh::mesh_from_scaled(mesh.vertices().to_vec(), mesh.triangles().to_vec(), scale)?
        };
        let translation = Vector3::new(mp.position[0], mp.position[1], mp.position[2]) * scale;
        let pose = Pose::new(translation, mp.rotation)?;
        parts.push(Part::new(mp.id, mp.name.clone(), mesh, pose));
    }
    if parts.is_empty() {
        return Err(Error::InvalidInput("manifest declares no parts".into()));
    }

    let explicit_liaisons = match &manifest.liaisons {
        None => None,
        Some(list) => {
            let mut pairs = Vec::new();
            for l in list {
                if l.a == l.b || !ids.contains(&l.a) || !ids.contains(&l.b) {
                    return Err(Error::InvalidInput(format!(
                        "invalid liaison ({}, {})",
                        l.a, l.b
                    )));
                }
                pairs.push((PartId(l.a.min(l.b)), PartId(l.a.max(l.b))));
            }
            pairs.sort_unstable();
            pairs.dedup();
            Some(pairs)
        }
    };

    Ok(LoadedAssembly {
        assembly: Assembly::new(parts),
        floor_z: manifest.floor_z * scale,
        explicit_liaisons,
        config: manifest.config.clone().unwrap_or_default(),
    })
}

/// Write a manifest for an in-memory assembly, exporting each part mesh as
/// an OBJ beside it. Used to produce the bundled demo inputs.
pub fn save_assembly_as_manifest(
    assembly: &Assembly,
    floor_z: f64,
    dir: impl AsRef<Path>,
) -> Result<std::path::PathBuf> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir.join("meshes"))?;
    let mut parts = Vec::new();
    for p in assembly.parts() {
        let rel = format!("meshes/{}.obj", p.name);
        crate::mesh::write_obj(&p.mesh, dir.join(&rel))?;
        parts.push(ManifestPart {
            id: p.id.0,
            name: p.name.clone(),
            mesh: rel,
            position: [p.pose.translation.x, p.pose.translation.y, p.pose.translation.z],
            rotation: p.pose.rotation_wxyz(),
        });
    }
    let manifest = AssemblyManifest {
        schema: MANIFEST_SCHEMA.to_string(),
        units: "m".to_string(),
        floor_z,
        parts,
        liaisons: None,
        config: None,
    };
    let text = toml::to_string_pretty(&manifest)
        .map_err(|e| Error::InvalidInput(format!("manifest serialization: {e}")))?;
    let path = dir.join("assembly.toml");
    std::fs::write(&path, text)?;
    Ok(path)
}
