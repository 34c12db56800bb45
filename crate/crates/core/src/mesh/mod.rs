//! Geometric substrate: watertight triangle meshes, rigid poses, and the
//! collision/containment queries used by every other module.
//!
//! Meshes are immutable after construction. Validation happens once at build
//! time (watertightness, degeneracy, outward winding); queries may then be
//! issued from any number of threads.

mod bvh;
mod io;
mod primitives;

pub use bvh::Bvh;
pub use io::{load_mesh, mesh_from_scaled, write_obj};
pub use primitives::{point_triangle_distance_sq, tri_tri_intersect, triangle_distance};

use nalgebra::{Point3, Quaternion, UnitQuaternion, Vector3};

use crate::error::{Error, Result};

/// Welding tolerance for STL vertex deduplication, in meters.
pub const WELD_TOL: f64 = 1e-7;

/// Area below which a triangle is rejected as degenerate.
const MIN_TRIANGLE_AREA: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Pose
// ---------------------------------------------------------------------------

/// Rigid placement of a part in the product frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: UnitQuaternion<f64>,
    pub translation: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            rotation: UnitQuaternion::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Build from a translation and a `[w, x, y, z]` rotation. The rotation
    /// must already be unit norm within 1e-9; it is renormalized afterwards.
    pub fn new(translation: Vector3<f64>, rotation_wxyz: [f64; 4]) -> Result<Self> {
        let [w, x, y, z] = rotation_wxyz;
        let q = Quaternion::new(w, x, y, z);
        let norm = q.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "rotation norm {norm} deviates from 1 by more than 1e-9"
            )));
        }
        Ok(Pose {
            rotation: UnitQuaternion::from_quaternion(q),
            translation,
        })
    }

    pub fn from_parts(translation: Vector3<f64>, rotation: UnitQuaternion<f64>) -> Self {
        Pose { rotation, translation }
    }

    pub fn translation_only(translation: Vector3<f64>) -> Self {
        Pose {
            rotation: UnitQuaternion::identity(),
            translation,
        }
    }

    pub fn transform_point(&self, p: &Point3<f64>) -> Point3<f64> {
        self.rotation * p + self.translation
    }

    pub fn transform_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v
    }

    pub fn inverse(&self) -> Pose {
        let inv_rot = self.rotation.inverse();
        Pose {
            rotation: inv_rot,
            translation: -(inv_rot * self.translation),
        }
    }

    /// Composition: `self.then_apply(other)` applies `other` first, then `self`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    /// Transform mapping points in `b`'s local frame into `a`'s local frame.
    pub fn relative(a: &Pose, b: &Pose) -> Pose {
        a.inverse().compose(b)
    }

    /// Pose shifted by a world-frame offset.
    pub fn translated(&self, offset: Vector3<f64>) -> Pose {
        Pose {
            rotation: self.rotation,
            translation: self.translation + offset,
        }
    }

    pub fn rotation_wxyz(&self) -> [f64; 4] {
        let q = self.rotation.quaternion();
        [q.w, q.i, q.j, q.k]
    }
}

// ---------------------------------------------------------------------------
// Aabb
// ---------------------------------------------------------------------------

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Point3<f64>,
    pub max: Point3<f64>,
}

impl Aabb {
    pub fn empty() -> Self {
        Aabb {
            min: Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            max: Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Point3<f64>>) -> Self {
        let mut aabb = Aabb::empty();
        for p in points {
            aabb.grow(p);
        }
        aabb
    }

    pub fn grow(&mut self, p: &Point3<f64>) {
        self.min = self.min.inf(p);
        self.max = self.max.sup(p);
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: self.min.inf(&other.min),
            max: self.max.sup(&other.max),
        }
    }

    pub fn intersects(&self, other: &Aabb) -> bool {
        self.min.x <= other.max.x
            && self.max.x >= other.min.x
            && self.min.y <= other.max.y
            && self.max.y >= other.min.y
            && self.min.z <= other.max.z
            && self.max.z >= other.min.z
    }

    pub fn contains(&self, other: &Aabb) -> bool {
        self.min.x <= other.min.x
            && self.min.y <= other.min.y
            && self.min.z <= other.min.z
            && self.max.x >= other.max.x
            && self.max.y >= other.max.y
            && self.max.z >= other.max.z
    }

    pub fn contains_point(&self, p: &Point3<f64>) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }

    pub fn inflated(&self, margin: f64) -> Aabb {
        let m = Vector3::new(margin, margin, margin);
        Aabb {
            min: self.min - m,
            max: self.max + m,
        }
    }

    pub fn center(&self) -> Point3<f64> {
        nalgebra::center(&self.min, &self.max)
    }

    pub fn extents(&self) -> Vector3<f64> {
        self.max - self.min
    }

    pub fn diagonal(&self) -> f64 {
        (self.max - self.min).norm()
    }

    pub fn min_extent(&self) -> f64 {
        let e = self.extents();
        e.x.min(e.y).min(e.z)
    }

    /// AABB of this box under a rigid transform (AABB of the 8 corners).
    pub fn transformed(&self, pose: &Pose) -> Aabb {
        let mut out = Aabb::empty();
        for &x in &[self.min.x, self.max.x] {
            for &y in &[self.min.y, self.max.y] {
                for &z in &[self.min.z, self.max.z] {
                    out.grow(&pose.transform_point(&Point3::new(x, y, z)));
                }
            }
        }
        out
    }

    /// Does the sphere (center, radius) overlap this box?
    pub fn intersects_sphere(&self, center: &Point3<f64>, radius: f64) -> bool {
        let mut d2 = 0.0;
        for k in 0..3 {
            let v = center[k];
            if v < self.min[k] {
                d2 += (self.min[k] - v) * (self.min[k] - v);
            } else if v > self.max[k] {
                d2 += (v - self.max[k]) * (v - self.max[k]);
            }
        }
        d2 <= radius * radius
    }
}

// ---------------------------------------------------------------------------
// TriMesh
// ---------------------------------------------------------------------------

/// Watertight triangle mesh in its own local frame.
///
/// Invariants established at construction:
/// - every edge is shared by exactly two triangles, with opposite direction
///   (closed, consistently oriented 2-manifold, possibly with inner voids);
/// - no zero-area triangles, no repeated vertex index within a triangle;
/// - signed volume is strictly positive (winding flipped wholesale if the
///   input was globally inverted).
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point3<f64>>,
    triangles: Vec<[u32; 3]>,
    aabb: Aabb,
    bvh: Bvh,
    volume: f64,
    centroid: Point3<f64>,
    surface_area: f64,
}

impl TriMesh {
    pub fn new(vertices: Vec<Point3<f64>>, mut triangles: Vec<[u32; 3]>) -> Result<Self> {
        if vertices.is_empty() || triangles.is_empty() {
            return Err(Error::DegenerateGeometry {
                reason: "empty mesh".into(),
            });
        }
        for (i, tri) in triangles.iter().enumerate() {
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::DegenerateGeometry {
                    reason: format!("triangle {i} repeats a vertex index"),
                });
            }
            for &v in tri {
                if v as usize >= vertices.len() {
                    return Err(Error::DegenerateGeometry {
                        reason: format!("triangle {i} references missing vertex {v}"),
                    });
                }
            }
            let [a, b, c] = tri_points(&vertices, tri);
            let area2 = (b - a).cross(&(c - a)).norm();
            if area2 < 2.0 * MIN_TRIANGLE_AREA {
                return Err(Error::DegenerateGeometry {
                    reason: format!("triangle {i} has near-zero area"),
                });
            }
        }
        check_watertight(&triangles)?;

        let volume = signed_volume(&vertices, &triangles);
        if volume < 0.0 {
            for tri in &mut triangles {
                tri.swap(1, 2);
            }
        }
        let volume = volume.abs();
        if volume < 1e-15 {
            return Err(Error::DegenerateGeometry {
                reason: "mesh encloses no volume".into(),
            });
        }

        let aabb = Aabb::from_points(&vertices);
        let bvh = Bvh::build(&vertices, &triangles);
        let centroid = volume_centroid(&vertices, &triangles, volume);
        let surface_area = triangles
            .iter()
            .map(|t| {
                let [a, b, c] = tri_points(&vertices, t);
                0.5 * (b - a).cross(&(c - a)).norm()
            })
            .sum();

        Ok(TriMesh {
            vertices,
            triangles,
            aabb,
            bvh,
            volume,
            centroid,
            surface_area,
        })
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_points(&self, i: usize) -> [Point3<f64>; 3] {
        tri_points(&self.vertices, &self.triangles[i])
    }

    pub fn triangle_normal(&self, i: usize) -> Vector3<f64> {
        let [a, b, c] = self.triangle_points(i);
        (b - a).cross(&(c - a)).normalize()
    }

    pub fn triangle_area(&self, i: usize) -> f64 {
        let [a, b, c] = self.triangle_points(i);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn triangle_centroid(&self, i: usize) -> Point3<f64> {
        let [a, b, c] = self.triangle_points(i);
        Point3::from((a.coords + b.coords + c.coords) / 3.0)
    }

    pub fn aabb(&self) -> &Aabb {
        &self.aabb
    }

    pub(crate) fn bvh(&self) -> &Bvh {
        &self.bvh
    }

    /// Enclosed volume from the divergence theorem (m³, always positive).
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Volume centroid (not the vertex average).
    pub fn centroid(&self) -> Point3<f64> {
        self.centroid
    }

    /// Total surface area (m²).
    pub fn surface_area(&self) -> f64 {
        self.surface_area
    }

    /// Radius of the bounding sphere centered on the volume centroid.
    pub fn bounding_radius(&self) -> f64 {
        self.vertices
            .iter()
            .map(|v| (v - self.centroid).norm())
            .fold(0.0, f64::max)
    }

    /// Mesh with all vertices mapped through a rigid pose, re-validated.
    pub fn transformed(&self, pose: &Pose) -> TriMesh {
        let vertices = self
            .vertices
            .iter()
            .map(|v| pose.transform_point(v))
            .collect();
        TriMesh::new(vertices, self.triangles.clone())
            .expect("rigid transform preserves mesh validity")
    }

    /// Mesh uniformly scaled about a center point. `factor` must be positive.
    pub fn scaled_about(&self, center: &Point3<f64>, factor: f64) -> TriMesh {
        assert!(factor > 0.0, "scale factor must be positive");
        let vertices = self
            .vertices
            .iter()
            .map(|v| center + (v - center) * factor)
            .collect();
        TriMesh::new(vertices, self.triangles.clone())
            .expect("uniform positive scaling preserves mesh validity")
    }
}

fn tri_points(vertices: &[Point3<f64>], tri: &[u32; 3]) -> [Point3<f64>; 3] {
    [
        vertices[tri[0] as usize],
        vertices[tri[1] as usize],
        vertices[tri[2] as usize],
    ]
}

fn signed_volume(vertices: &[Point3<f64>], triangles: &[[u32; 3]]) -> f64 {
    triangles
        .iter()
        .map(|t| {
            let [a, b, c] = tri_points(vertices, t);
            a.coords.dot(&b.coords.cross(&c.coords)) / 6.0
        })
        .sum()
}

fn volume_centroid(vertices: &[Point3<f64>], triangles: &[[u32; 3]], volume: f64) -> Point3<f64> {
    // Tetrahedra against the origin; each contributes its signed volume
    // weighted centroid (origin + three vertices) / 4.
    let mut acc = Vector3::zeros();
    for t in triangles {
        let [a, b, c] = tri_points(vertices, t);
        let v = a.coords.dot(&b.coords.cross(&c.coords)) / 6.0;
        acc += (a.coords + b.coords + c.coords) / 4.0 * v;
    }
    Point3::from(acc / volume.max(f64::MIN_POSITIVE))
}

fn check_watertight(triangles: &[[u32; 3]]) -> Result<()> {
    use std::collections::HashMap;
    // Per undirected edge: (forward count, backward count) where forward
    // means the triangle traverses (lo, hi).
    let mut edges: HashMap<(u32, u32), (u32, u32)> = HashMap::new();
    for tri in triangles {
        for k in 0..3 {
            let (u, v) = (tri[k], tri[(k + 1) % 3]);
            let key = (u.min(v), u.max(v));
            let entry = edges.entry(key).or_insert((0, 0));
            if u < v {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }
        }
    }
    for (&(u, v), &(fwd, back)) in &edges {
        let total = fwd + back;
        if total == 1 {
            return Err(Error::NotWatertight {
                reason: format!("boundary edge ({u}, {v})"),
            });
        }
        if total > 2 {
            return Err(Error::NotWatertight {
                reason: format!("non-manifold edge ({u}, {v}) shared by {total} triangles"),
            });
        }
        if fwd != 1 || back != 1 {
            return Err(Error::NotWatertight {
                reason: format!("inconsistent winding across edge ({u}, {v})"),
            });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Queries on posed meshes
// ---------------------------------------------------------------------------

/// Ray-parity containment test for a point against a posed mesh.
///
/// Uses a fixed pseudo-random direction sequence: grazing hits (ray passing
/// within tolerance of an edge, vertex, or the query plane) trigger a re-cast
/// along the next direction, so the result is deterministic.
pub fn point_inside(mesh: &TriMesh, pose: &Pose, point: &Point3<f64>) -> bool {
    let local = pose.inverse().transform_point(point);
    if !mesh.aabb().contains_point(&local) {
        return false;
    }
    for dir in ray_direction_sequence() {
        match mesh.bvh().ray_parity(mesh, &local, &dir) {
            Some(crossings) => return crossings % 2 == 1,
            None => continue, // degenerate hit, re-cast
        }
    }
    // Every retry direction grazed; fall back to a non-strict count.
    let crossings = mesh.bvh().ray_parity_forced(mesh, &local, &ray_direction_sequence()[0]);
    crossings % 2 == 1
}

/// Fixed direction sequence for containment ray casts (seed chosen once;
/// independent of any user-facing seed so geometry queries never vary).
fn ray_direction_sequence() -> [Vector3<f64>; 8] {
    // SplitMix64 stream from a fixed constant, mapped to directions that
    // avoid the coordinate axes and each other.
    let mut state: u64 = 0x9e3779b97f4a7c15;
    let mut next = move || {
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    };
    let mut dirs = [Vector3::zeros(); 8];
    for d in &mut dirs {
        loop {
            let u = (next() >> 11) as f64 / (1u64 << 53) as f64;
            let v = (next() >> 11) as f64 / (1u64 << 53) as f64;
            let z = 2.0 * u - 1.0;
            let phi = 2.0 * std::f64::consts::PI * v;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let cand = Vector3::new(r * phi.cos(), r * phi.sin(), z);
            if cand.norm() > 0.5 {
                *d = cand.normalize();
                break;
            }
        }
    }
    dirs
}

/// Minimum distance from a world-frame point to a posed mesh's surface.
pub fn point_surface_distance(mesh: &TriMesh, pose: &Pose, point: &Point3<f64>) -> f64 {
    let local = pose.inverse().transform_point(point);
    mesh.bvh().point_distance(mesh, &local)
}

/// True iff the two posed meshes share any point: triangle-triangle overlap
/// or full containment of one mesh in the other.
pub fn meshes_intersect(a: &TriMesh, pa: &Pose, b: &TriMesh, pb: &Pose) -> bool {
    let world_a = a.aabb().transformed(pa);
    let world_b = b.aabb().transformed(pb);
    if !world_a.intersects(&world_b) {
        return false;
    }
    // Map b into a's local frame for exact triangle tests.
    let rel = Pose::relative(pa, pb);
    if Bvh::pair_intersects(a, b, &rel) {
        return true;
    }
    // Containment: one representative vertex each way.
    let b0_world = pb.transform_point(&b.vertices()[0]);
    if point_inside(a, pa, &b0_world) {
        return true;
    }
    let a0_world = pa.transform_point(&a.vertices()[0]);
    point_inside(b, pb, &a0_world)
}

/// All triangle index pairs `(i in a, j in b)` whose minimum distance is
/// within `tol`, found by dual BVH traversal. Pairs are sorted.
pub fn proximity_pairs(
    a: &TriMesh,
    pa: &Pose,
    b: &TriMesh,
    pb: &Pose,
    tol: f64,
) -> Vec<(u32, u32)> {
    assert!(tol > 0.0, "proximity tolerance must be positive");
    let world_a = a.aabb().transformed(pa).inflated(tol);
    let world_b = b.aabb().transformed(pb);
    if !world_a.intersects(&world_b) {
        return Vec::new();
    }
    let rel = Pose::relative(pa, pb);
    let mut pairs = Bvh::pair_proximity(a, b, &rel, tol);
    pairs.sort_unstable();
    pairs
}
