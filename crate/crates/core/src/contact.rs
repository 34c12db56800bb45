//! Liaison detection, contact normals, and translational freedom cones.
//!
//! A liaison is a physical contact between two parts. The outward normals of
//! the contacting faces, clustered to suppress tessellation artifacts, act as
//! half-space constraints on the contacting parts' local translations: a unit
//! direction `d` is feasible for a moving set when `d . n >= -eps` for every
//! constraint normal `n` oriented from the reference side into the moving
//! side. The feasible set is the moving set's removal space.

use nalgebra::Vector3;

use crate::assembly::{Assembly, PartId};
use crate::error::{Error, Result};
use crate::mesh::{point_surface_distance, proximity_pairs};
use crate::sampling::fibonacci_sphere;

/// Angular clustering tolerance for contact normals (radians, 5 degrees).
const NORMAL_CLUSTER_ANGLE: f64 = 5.0 * std::f64::consts::PI / 180.0;

/// Opposition threshold: contacting faces must have normals with dot <= -0.9.
const OPPOSITION_DOT: f64 = -0.9;

/// Default contact tolerance as a fraction of the assembly AABB diagonal.
pub const CONTACT_TOL_FRACTION: f64 = 1e-4;

/// Sampling parameters for cone feasibility queries.
#[derive(Debug, Clone, Copy)]
pub struct ConeConfig {
    /// Feasibility slack: `d . n >= -eps_ang` counts as feasible.
    pub eps_ang: f64,
    /// Quasi-uniform sphere sample count for lock detection.
    pub n_dir: usize,
}

impl Default for ConeConfig {
    fn default() -> Self {
        ConeConfig {
            eps_ang: 1e-6,
            n_dir: 2048,
        }
    }
}

/// Degrees of translational freedom left to a part or set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofClass {
    /// No feasible direction.
    Locked,
    /// Constraints of rank >= 2 bound a proper cone.
    Cone,
    /// A single constraint plane; the feasible set is a half space.
    HalfSpace,
    /// No constraints at all.
    Free,
}

impl DofClass {
    pub fn as_u8(self) -> u8 {
        match self {
            DofClass::Locked => 0,
            DofClass::Cone => 1,
            DofClass::HalfSpace => 2,
            DofClass::Free => 3,
        }
    }
}

/// Set of unit constraint normals defining a removal space.
///
/// The feasible set is `{ unit d : d . n_k >= -eps for all k }`. An empty
/// constraint list means the whole sphere is feasible.
#[derive(Debug, Clone, Default)]
pub struct FreedomCone {
    constraint_normals: Vec<Vector3<f64>>,
}

impl FreedomCone {
    pub fn free() -> Self {
        FreedomCone {
            constraint_normals: Vec::new(),
        }
    }

    pub fn from_normals(normals: Vec<Vector3<f64>>) -> Self {
        FreedomCone {
            constraint_normals: cluster_normals(normals),
        }
    }

    pub fn constraint_normals(&self) -> &[Vector3<f64>] {
        &self.constraint_normals
    }

    pub fn is_free(&self) -> bool {
        self.constraint_normals.is_empty()
    }

    pub fn feasible(&self, d: &Vector3<f64>, eps_ang: f64) -> bool {
        self.constraint_normals.iter().all(|n| d.dot(n) >= -eps_ang)
    }

    /// Worst-case clearance of `d` against the constraints; 1 when free.
    pub fn interiorness(&self, d: &Vector3<f64>) -> f64 {
        self.constraint_normals
            .iter()
            .map(|n| d.dot(n))
            .fold(1.0, f64::min)
    }

    /// Deterministic candidate directions: the constraint mean and each
    /// constraint normal (which capture exact-slot cones that a lattice
    /// misses), followed by the Fibonacci lattice.
    fn candidates(&self, n_dir: usize) -> Vec<Vector3<f64>> {
        let mut cands = Vec::with_capacity(n_dir + self.constraint_normals.len() + 1);
        if !self.constraint_normals.is_empty() {
            let mean: Vector3<f64> = self.constraint_normals.iter().sum();
            if mean.norm() > 1e-12 {
                cands.push(mean.normalize());
            }
            cands.extend(self.constraint_normals.iter().copied());
        }
        cands.extend(fibonacci_sphere(n_dir));
        cands
    }

    /// True iff no sampled direction satisfies every constraint.
    ///
    /// Dense sampling, not exact cone emptiness: a cone thinner than the
    /// lattice spacing whose axis aligns with no constraint normal can be
    /// misclassified. See `ConeConfig` for the knobs.
    pub fn is_locked(&self, cfg: &ConeConfig) -> bool {
        if self.is_free() {
            return false;
        }
        !self
            .candidates(cfg.n_dir)
            .iter()
            .any(|d| self.feasible(d, cfg.eps_ang))
    }

    /// Degrees-of-freedom classification per the constraint rank.
    pub fn dof_class(&self, cfg: &ConeConfig) -> DofClass {
        if self.is_free() {
            return DofClass::Free;
        }
        if self.is_locked(cfg) {
            return DofClass::Locked;
        }
        if normal_rank(&self.constraint_normals) <= 1 {
            DofClass::HalfSpace
        } else {
            DofClass::Cone
        }
    }

    /// Up to `k` feasible unit directions ordered by decreasing interiorness
    /// (most interior first); deterministic for a fixed sample count.
    ///
    /// The k directions are chosen to cover the cone: selection starts from
    /// the most interior direction and greedily adds the feasible direction
    /// farthest from everything already chosen. A wide cone therefore yields
    /// spread-out candidates (so sweeps probe lateral exits too) instead of
    /// k near-copies of the axis; the result is then sorted by interiorness.
    pub fn representative_directions(
        &self,
        k: usize,
        cfg: &ConeConfig,
    ) -> Result<Vec<Vector3<f64>>> {
        let feasible: Vec<(usize, Vector3<f64>, f64)> = self
            .candidates(cfg.n_dir)
            .into_iter()
            .enumerate()
            .filter(|(_, d)| self.feasible(d, cfg.eps_ang))
            .map(|(i, d)| {
                let score = self.interiorness(&d);
                (i, d, score)
            })
            .collect();
        if feasible.is_empty() {
            return Err(Error::LockedCone);
        }

        // Seed: most interior direction (ties to the earliest candidate).
        let seed = feasible
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.2.partial_cmp(&b.2).unwrap().then(b.0.cmp(&a.0)))
            .map(|(pos, _)| pos)
            .unwrap();
        let mut chosen = vec![seed];
        // Track each candidate's closeness to the chosen set (max dot).
        let mut closeness: Vec<f64> = feasible
            .iter()
            .map(|(_, d, _)| d.dot(&feasible[seed].1))
            .collect();
        while chosen.len() < k.min(feasible.len()) {
            let mut best: Option<usize> = None;
            for (pos, &(idx, _, score)) in feasible.iter().enumerate() {
                if chosen.contains(&pos) || closeness[pos] > 1.0 - 1e-12 {
                    continue; // duplicate of a chosen direction
                }
                let better = match best {
                    None => true,
                    Some(b) => {
                        let (bi, _, bs) = feasible[b];
                        closeness[pos] < closeness[b] - 1e-15
                            || ((closeness[pos] - closeness[b]).abs() <= 1e-15
                                && (score > bs || (score == bs && idx < bi)))
                    }
                };
                if better {
                    best = Some(pos);
                }
            }
            match best {
                Some(pos) => {
                    chosen.push(pos);
                    for (q, &(_, d, _)) in feasible.iter().enumerate() {
                        closeness[q] = closeness[q].max(d.dot(&feasible[pos].1));
                    }
                }
                None => break, // every remaining direction duplicates a chosen one
            }
        }

        let mut out: Vec<(usize, Vector3<f64>, f64)> =
            chosen.into_iter().map(|pos| feasible[pos]).collect();
        out.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then(a.0.cmp(&b.0)));
        Ok(out.into_iter().map(|(_, d, _)| d).collect())
    }

    /// Cone with every constraint negated (the other side of the contact).
    pub fn negated(&self) -> FreedomCone {
        FreedomCone {
            constraint_normals: self.constraint_normals.iter().map(|n| -n).collect(),
        }
    }
}

/// Rank of the span of the normals, with tolerance for near-parallels.
fn normal_rank(normals: &[Vector3<f64>]) -> usize {
    let mut basis: Vec<Vector3<f64>> = Vec::new();
    for n in normals {
        let mut v = *n;
        for b in &basis {
            v -= b * v.dot(b);
        }
        if v.norm() > 1e-6 {
            basis.push(v.normalize());
            if basis.len() == 3 {
                break;
            }
        }
    }
    basis.len()
}

/// Greedy angular clustering; input order is canonicalized first so the
/// result is deterministic. Representatives are renormalized cluster means.
fn cluster_normals(mut normals: Vec<Vector3<f64>>) -> Vec<Vector3<f64>> {
    normals.retain(|n| n.norm() > 1e-12);
    for n in &mut normals {
        *n = n.normalize();
    }
    normals.sort_by(|a, b| {
        a.x.partial_cmp(&b.x)
            .unwrap()
            .then(a.y.partial_cmp(&b.y).unwrap())
            .then(a.z.partial_cmp(&b.z).unwrap())
    });
    let cos_tol = NORMAL_CLUSTER_ANGLE.cos();
    let mut sums: Vec<Vector3<f64>> = Vec::new();
    let mut reps: Vec<Vector3<f64>> = Vec::new();
    for n in normals {
        match reps.iter().position(|r| r.dot(&n) >= cos_tol) {
            Some(i) => {
                sums[i] += n;
                reps[i] = sums[i].normalize();
            }
            None => {
                sums.push(n);
                reps.push(n);
            }
        }
    }
    reps
}

// ---------------------------------------------------------------------------
// Liaisons
// ---------------------------------------------------------------------------

/// Physical contact between two parts (`a < b` by id).
#[derive(Debug, Clone)]
pub struct Liaison {
    pub a: PartId,
    pub b: PartId,
    /// Summed contact-patch area of the smaller-area side (m²).
    pub contact_area: f64,
    /// Clustered contact normals oriented from `a` into `b`, world frame.
    pub normals_a_to_b: Vec<Vector3<f64>>,
}

/// Undirected graph of liaisons over an assembly's parts.
#[derive(Debug, Clone, Default)]
pub struct LiaisonGraph {
    vertices: Vec<PartId>,
    edges: Vec<Liaison>,
}

impl LiaisonGraph {
    /// Graph from an explicit edge list (manifest-declared liaisons and
    /// synthetic test graphs). Edges are normalized to `a < b`.
    pub fn from_edges(mut vertices: Vec<PartId>, edges: Vec<Liaison>) -> LiaisonGraph {
        vertices.sort_unstable();
        let edges = edges
            .into_iter()
            .map(|mut e| {
                assert!(e.a != e.b, "self-loop liaison on {}", e.a);
                if e.a > e.b {
                    std::mem::swap(&mut e.a, &mut e.b);
                    e.normals_a_to_b = e.normals_a_to_b.iter().map(|n| -n).collect();
                }
                e
            })
            .collect();
        LiaisonGraph { vertices, edges }
    }

    pub fn vertices(&self) -> &[PartId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Liaison] {
        &self.edges
    }

    pub fn edge(&self, a: PartId, b: PartId) -> Option<&Liaison> {
        let (lo, hi) = (a.min(b), a.max(b));
        self.edges.iter().find(|e| e.a == lo && e.b == hi)
    }

    pub fn degree(&self, id: PartId) -> usize {
        self.edges.iter().filter(|e| e.a == id || e.b == id).count()
    }

    pub fn neighbors(&self, id: PartId) -> Vec<PartId> {
        let mut out: Vec<PartId> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.a == id {
                    Some(e.b)
                } else if e.b == id {
                    Some(e.a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    /// Is the induced subgraph on `ids` connected? Singletons count.
    pub fn is_connected(&self, ids: &[PartId]) -> bool {
        if ids.is_empty() {
            return false;
        }
        let mut reached = vec![ids[0]];
        let mut frontier = vec![ids[0]];
        while let Some(v) = frontier.pop() {
            for n in self.neighbors(v) {
                if ids.contains(&n) && !reached.contains(&n) {
                    reached.push(n);
                    frontier.push(n);
                }
            }
        }
        reached.len() == ids.len()
    }

    /// Connected components of the induced subgraph, each sorted, components
    /// ordered by smallest member.
    pub fn components(&self, ids: &[PartId]) -> Vec<Vec<PartId>> {
        let mut remaining: Vec<PartId> = ids.to_vec();
        remaining.sort_unstable();
        let mut out = Vec::new();
        while let Some(&seed) = remaining.first() {
            let mut comp = vec![seed];
            let mut frontier = vec![seed];
            while let Some(v) = frontier.pop() {
                for n in self.neighbors(v) {
                    if remaining.contains(&n) && !comp.contains(&n) {
                        comp.push(n);
                        frontier.push(n);
                    }
                }
            }
            comp.sort_unstable();
            remaining.retain(|p| !comp.contains(p));
            out.push(comp);
        }
        out
    }

    /// Summed liaison contact area between two disjoint part sets.
    pub fn contact_area_between(&self, xs: &[PartId], ys: &[PartId]) -> f64 {
        self.edges
            .iter()
            .filter(|e| {
                (xs.contains(&e.a) && ys.contains(&e.b))
                    || (xs.contains(&e.b) && ys.contains(&e.a))
            })
            .map(|e| e.contact_area)
            .sum()
    }

    /// Contact normals crossing the moving/reference boundary, oriented into
    /// the moving set and clustered (one representative per 5° cluster).
    pub fn contact_normals(&self, moving: &[PartId], reference: &[PartId]) -> Vec<Vector3<f64>> {
        let mut normals = Vec::new();
        for e in &self.edges {
            let a_moving = moving.contains(&e.a);
            let b_moving = moving.contains(&e.b);
            let a_ref = reference.contains(&e.a);
            let b_ref = reference.contains(&e.b);
            if a_ref && b_moving {
                normals.extend(e.normals_a_to_b.iter().copied());
            } else if a_moving && b_ref {
                normals.extend(e.normals_a_to_b.iter().map(|n| -n));
            }
        }
        cluster_normals(normals)
    }

    /// Removal space of `moving` against `reference`.
    pub fn freedom_cone(&self, moving: &[PartId], reference: &[PartId]) -> FreedomCone {
        assert!(!moving.is_empty() && !reference.is_empty());
        debug_assert!(moving.iter().all(|m| !reference.contains(m)));
        FreedomCone {
            constraint_normals: self.contact_normals(moving, reference),
        }
    }
}

/// Detect all liaisons at the given contact tolerance.
///
/// Errors with [`Error::Interpenetration`] when two parts overlap in volume
/// beyond the tolerance (sampled at mesh vertices and face centroids).
pub fn detect_liaisons(assembly: &Assembly, tol: f64) -> Result<LiaisonGraph> {
    assert!(tol > 0.0, "contact tolerance must be positive");
    let parts = assembly.parts();
    let mut edges = Vec::new();
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            let (p, q) = (&parts[i], &parts[j]);
            check_no_interpenetration(p, q, tol)?;
            let pairs = proximity_pairs(&p.mesh, &p.pose, &q.mesh, &q.pose, tol);
            if pairs.is_empty() {
                continue;
            }
            let (contact_area, normals_a_to_b) = contact_patch(p, q, &pairs, tol);
            edges.push(Liaison {
                a: p.id,
                b: q.id,
                contact_area,
                normals_a_to_b,
            });
        }
    }
    Ok(LiaisonGraph {
        vertices: assembly.ids(),
        edges,
    })
}

/// Default contact tolerance for an assembly.
pub fn default_contact_tol(assembly: &Assembly) -> f64 {
    CONTACT_TOL_FRACTION * assembly.world_aabb().diagonal()
}

/// Liaison graph restricted to an explicit pair list (manifest-declared).
/// Contact areas and normals are still measured geometrically; a declared
/// pair without geometric contact keeps its edge with zero area.
pub fn liaisons_for_pairs(
    assembly: &Assembly,
    pairs: &[(PartId, PartId)],
    tol: f64,
) -> Result<LiaisonGraph> {
    assert!(tol > 0.0);
    let mut edges = Vec::new();
    for &(a, b) in pairs {
        let p = assembly.part(a.min(b));
        let q = assembly.part(a.max(b));
        check_no_interpenetration(p, q, tol)?;
        let prox = proximity_pairs(&p.mesh, &p.pose, &q.mesh, &q.pose, tol);
        let (contact_area, normals_a_to_b) = contact_patch(p, q, &prox, tol);
        edges.push(Liaison {
            a: p.id,
            b: q.id,
            contact_area,
            normals_a_to_b,
        });
    }
    Ok(LiaisonGraph {
        vertices: assembly.ids(),
        edges,
    })
}

fn check_no_interpenetration(p: &crate::assembly::Part, q: &crate::assembly::Part, tol: f64) -> Result<()> {
    if !p.world_aabb().intersects(&q.world_aabb()) {
        return Ok(());
    }
    let deep_inside = |probe: &nalgebra::Point3<f64>,
                       mesh: &crate::mesh::TriMesh,
                       pose: &crate::mesh::Pose| {
        point_surface_distance(mesh, pose, probe) > tol
            && crate::mesh::point_inside(mesh, pose, probe)
    };
    // Probe vertices and face centroids; aligned overlaps can leave every
    // vertex exactly on the other surface.
    let probes = |part: &crate::assembly::Part| {
        let mut pts: Vec<nalgebra::Point3<f64>> =
            part.mesh.vertices().iter().map(|v| part.pose.transform_point(v)).collect();
        pts.extend(
            (0..part.mesh.triangle_count())
                .map(|t| part.pose.transform_point(&part.mesh.triangle_centroid(t))),
        );
        pts
    };
    for w in probes(p) {
        if deep_inside(&w, &q.mesh, &q.pose) {
            return Err(Error::Interpenetration { a: p.id, b: q.id });
        }
    }
    for w in probes(q) {
        if deep_inside(&w, &p.mesh, &p.pose) {
            return Err(Error::Interpenetration { a: p.id, b: q.id });
        }
    }
    Ok(())
}

/// Contact area and clustered normals for one liaison.
///
/// A triangle participates in the patch when its centroid lies within `tol`
/// of the other part and some paired triangle opposes it (normal dot <= -0.9).
/// The reported area is the smaller of the two sides' patch areas; normals
/// are taken from side `a`, pointing into `b`.
fn contact_patch(
    p: &crate::assembly::Part,
    q: &crate::assembly::Part,
    pairs: &[(u32, u32)],
    tol: f64,
) -> (f64, Vec<Vector3<f64>>) {
    let mut marked_a: Vec<u32> = Vec::new();
    let mut marked_b: Vec<u32> = Vec::new();
    for &(ta, tb) in pairs {
        let na = p.pose.transform_vector(&p.mesh.triangle_normal(ta as usize));
        let nb = q.pose.transform_vector(&q.mesh.triangle_normal(tb as usize));
        if na.dot(&nb) > OPPOSITION_DOT {
            continue;
        }
        let ca = p.pose.transform_point(&p.mesh.triangle_centroid(ta as usize));
        if point_surface_distance(&q.mesh, &q.pose, &ca) <= tol && !marked_a.contains(&ta) {
            marked_a.push(ta);
        }
        let cb = q.pose.transform_point(&q.mesh.triangle_centroid(tb as usize));
        if point_surface_distance(&p.mesh, &p.pose, &cb) <= tol && !marked_b.contains(&tb) {
            marked_b.push(tb);
        }
    }
    let area_a: f64 = marked_a.iter().map(|&t| p.mesh.triangle_area(t as usize)).sum();
    let area_b: f64 = marked_b.iter().map(|&t| q.mesh.triangle_area(t as usize)).sum();
    let normals = if !marked_a.is_empty() {
        cluster_normals(
            marked_a
                .iter()
                .map(|&t| p.pose.transform_vector(&p.mesh.triangle_normal(t as usize)))
                .collect(),
        )
    } else {
        // Tessellation mismatch left side a unmarked; flip side b's normals.
        cluster_normals(
            marked_b
                .iter()
                .map(|&t| -q.pose.transform_vector(&q.mesh.triangle_normal(t as usize)))
                .collect(),
        )
    };
    (area_a.min(area_b), normals)
}

#[cfg(test)]
mod tests;
