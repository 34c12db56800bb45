//! Posed part collections.

use std::fmt;
use std::sync::Arc;

use nalgebra::Point3;

use crate::mesh::{Aabb, Pose, TriMesh};

/// Identifier of a part within an assembly. Stable across planning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartId(pub u32);

impl fmt::Display for PartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One rigid part: geometry in its local frame plus a placement.
#[derive(Debug, Clone)]
pub struct Part {
    pub id: PartId,
    pub name: String,
    pub mesh: Arc<TriMesh>,
    pub pose: Pose,
}

impl Part {
    pub fn new(id: u32, name: impl Into<String>, mesh: TriMesh, pose: Pose) -> Self {
        Part {
            id: PartId(id),
            name: name.into(),
            mesh: Arc::new(mesh),
            pose,
        }
    }

    /// World-frame bounding box.
    pub fn world_aabb(&self) -> Aabb {
        self.mesh.aabb().transformed(&self.pose)
    }

    /// World-frame volume centroid.
    pub fn world_centroid(&self) -> Point3<f64> {
        self.pose.transform_point(&self.mesh.centroid())
    }
}

/// A product: parts with unique ids, sorted by id.
#[derive(Debug, Clone, Default)]
pub struct Assembly {
    parts: Vec<Part>,
}

impl Assembly {
    pub fn new(mut parts: Vec<Part>) -> Self {
        parts.sort_by_key(|p| p.id);
        for w in parts.windows(2) {
            assert!(w[0].id != w[1].id, "duplicate part id {}", w[0].id);
        }
        Assembly { parts }
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn ids(&self) -> Vec<PartId> {
        self.parts.iter().map(|p| p.id).collect()
    }

    pub fn part(&self, id: PartId) -> &Part {
        self.parts
            .iter()
            .find(|p| p.id == id)
            .unwrap_or_else(|| panic!("unknown part id {id}"))
    }

    pub fn contains(&self, id: PartId) -> bool {
        self.parts.iter().any(|p| p.id == id)
    }

    /// Whole-assembly bounding box in the world frame.
    pub fn world_aabb(&self) -> Aabb {
        self.parts
            .iter()
            .fold(Aabb::empty(), |acc, p| acc.union(&p.world_aabb()))
    }

    /// Sub-assembly containing only the listed ids (poses preserved).
    pub fn subset(&self, ids: &[PartId]) -> Assembly {
        Assembly::new(
            self.parts
                .iter()
                .filter(|p| ids.contains(&p.id))
                .cloned()
                .collect(),
        )
    }

    /// New assembly with each part's pose replaced via the callback.
    pub fn with_poses(&self, mut f: impl FnMut(&Part) -> Pose) -> Assembly {
        Assembly::new(
            self.parts
                .iter()
                .map(|p| {
                    let mut q = p.clone();
                    q.pose = f(p);
                    q
                })
                .collect(),
        )
    }
}
