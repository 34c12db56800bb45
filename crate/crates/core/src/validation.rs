//! Simulated removal: straight-line sweeps, floor collision, whole-assembly
//! reorientation, and support-stability checks.
//!
//! Sweeps translate the moving set in fixed steps along a candidate
//! direction and test every intermediate pose against the reference parts
//! and the floor plane. The moving geometry is shrunk by a relative 1e-6
//! about each part centroid first, so flush sliding contact (a part leaving
//! an exact-fit pocket) does not read as a collision while any real
//! penetration still does.

use nalgebra::{UnitQuaternion, Vector3};

use crate::assembly::{Assembly, PartId};
use crate::contact::{ConeConfig, LiaisonGraph};
use crate::error::{Error, Result};
use crate::mesh::{meshes_intersect, Pose, TriMesh};

/// Relative shrink applied to moving geometry during sweeps.
const SWEEP_SHRINK: f64 = 1e-6;

/// Penetration slack below the floor plane.
const FLOOR_EPS: f64 = 1e-9;

/// Flatness cone for resting faces (radians, 5 degrees).
const REST_FLATNESS: f64 = 5.0 * std::f64::consts::PI / 180.0;

/// The world: an assembly resting on a horizontal floor, gravity along -z.
#[derive(Debug, Clone)]
pub struct WorldState {
    pub assembly: Assembly,
    pub floor_z: f64,
}

impl WorldState {
    pub fn new(assembly: Assembly, floor_z: f64) -> Result<Self> {
        let min_z = assembly.world_aabb().min.z;
        if min_z < floor_z - 1e-6 {
            return Err(Error::InvalidInput(format!(
                "assembly extends below the floor: min z {min_z} < {floor_z}"
            )));
        }
        Ok(WorldState { assembly, floor_z })
    }

    /// World with the assembly translated so its lowest point touches the floor.
    pub fn reseated(assembly: Assembly, floor_z: f64) -> Self {
        let min_z = assembly.world_aabb().min.z;
        let shift = Vector3::new(0.0, 0.0, floor_z - min_z);
        let assembly = assembly.with_poses(|p| p.pose.translated(shift));
        WorldState { assembly, floor_z }
    }
}

/// Outcome of a removal validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RemovalOutcome {
    Success,
    /// Some reference part blocked every feasible direction.
    Collision,
    /// Every feasible direction failed, and only against the floor.
    FloorBlocked,
}

/// One attempted straight-line removal of a part set.
#[derive(Debug, Clone)]
pub struct RemovalAttempt {
    pub moving: Vec<PartId>,
    pub direction: Vector3<f64>,
    pub step: f64,
    pub traveled: f64,
    pub outcome: RemovalOutcome,
}

#[derive(Debug, Clone, Copy, Default)]
struct SweepScan {
    part_hit: bool,
    floor_hit: bool,
}

impl SweepScan {
    fn clear(&self) -> bool {
        !self.part_hit && !self.floor_hit
    }
}

/// Moving-set geometry prepared for sweeping: shrunken meshes plus poses.
struct MovingSet {
    parts: Vec<(TriMesh, Pose)>,
}

impl MovingSet {
    fn prepare(assembly: &Assembly, moving: &[PartId]) -> MovingSet {
        let parts = moving
            .iter()
            .map(|&id| {
                let p = assembly.part(id);
                let shrunk = p.mesh.scaled_about(&p.mesh.centroid(), 1.0 - SWEEP_SHRINK);
                (shrunk, p.pose)
            })
            .collect();
        MovingSet { parts }
    }

    fn scan(
        &self,
        assembly: &Assembly,
        moving: &[PartId],
        floor_z: f64,
        dir: &Vector3<f64>,
        step: f64,
        dist: f64,
    ) -> SweepScan {
        let reference: Vec<&crate::assembly::Part> = assembly
            .parts()
            .iter()
            .filter(|p| !moving.contains(&p.id))
            .collect();
        let mut scan = SweepScan::default();
        let steps = (dist / step).round() as usize;
        for k in 1..=steps {
            let offset = dir * (step * k as f64);
            for (mesh, pose) in &self.parts {
                let posed = pose.translated(offset);
                if mesh.aabb().transformed(&posed).min.z < floor_z - FLOOR_EPS {
                    scan.floor_hit = true;
                }
                for r in &reference {
                    if meshes_intersect(mesh, &posed, &r.mesh, &r.pose) {
                        scan.part_hit = true;
                        return scan;
                    }
                }
            }
        }
        scan
    }
}

/// Default sweep step: a quarter of the moving set's smallest AABB extent.
pub fn default_step(assembly: &Assembly, moving: &[PartId]) -> f64 {
    let aabb = moving
        .iter()
        .map(|&id| assembly.part(id).world_aabb())
        .fold(crate::mesh::Aabb::empty(), |acc, b| acc.union(&b));
    0.25 * aabb.min_extent()
}

/// Travel needed along `dir` until the moving AABB separates from the
/// reference AABB, plus one moving-set diameter, rounded up to whole steps.
pub fn sweep_distance(
    assembly: &Assembly,
    moving: &[PartId],
    dir: &Vector3<f64>,
    step: f64,
) -> f64 {
    let mov = moving
        .iter()
        .map(|&id| assembly.part(id).world_aabb())
        .fold(crate::mesh::Aabb::empty(), |acc, b| acc.union(&b));
    let refs = assembly
        .parts()
        .iter()
        .filter(|p| !moving.contains(&p.id))
        .map(|p| p.world_aabb())
        .fold(crate::mesh::Aabb::empty(), |acc, b| acc.union(&b));

    let mut t_sep = f64::INFINITY;
    for k in 0..3 {
        if dir[k] > 1e-12 {
            t_sep = t_sep.min(((refs.max[k] - mov.min[k]) / dir[k]).max(0.0));
        } else if dir[k] < -1e-12 {
            t_sep = t_sep.min(((refs.min[k] - mov.max[k]) / dir[k]).max(0.0));
        }
    }
    if !t_sep.is_finite() {
        t_sep = 0.0;
    }
    let raw = t_sep + mov.diagonal();
    (raw / step).ceil() * step
}

/// Does sweeping the moving set along `dir` collide with the remaining
/// parts or the floor at any step multiple up to `dist`?
pub fn sweep_collides(
    assembly: &Assembly,
    floor_z: f64,
    moving: &[PartId],
    dir: &Vector3<f64>,
    step: f64,
    dist: f64,
) -> bool {
    assert!(step > 0.0 && dist > 0.0);
    let set = MovingSet::prepare(assembly, moving);
    !set.scan(assembly, moving, floor_z, dir, step, dist).clear()
}

/// Try straight-line removal along up to `k_dirs` representative directions
/// of the moving set's freedom cone, most interior first. The first clear
/// sweep wins. When every direction fails only against the floor the
/// outcome is `FloorBlocked`, otherwise `Collision`.
pub fn validate_removal(
    world: &WorldState,
    moving: &[PartId],
    liaisons: &LiaisonGraph,
    k_dirs: usize,
    cone_cfg: &ConeConfig,
) -> Result<RemovalAttempt> {
    let assembly = &world.assembly;
    let reference: Vec<PartId> = assembly
        .ids()
        .into_iter()
        .filter(|p| !moving.contains(p))
        .collect();
    assert!(!moving.is_empty() && !reference.is_empty());

    let cone = liaisons.freedom_cone(moving, &reference);
    let dirs = cone.representative_directions(k_dirs, cone_cfg)?;

    let step = default_step(assembly, moving);
    let set = MovingSet::prepare(assembly, moving);
    let mut floor_only_dir: Option<Vector3<f64>> = None;
    let mut part_hit_any = false;
    for dir in &dirs {
        let dist = sweep_distance(assembly, moving, dir, step);
        let scan = set.scan(assembly, moving, world.floor_z, dir, step, dist);
        if scan.clear() {
            return Ok(RemovalAttempt {
                moving: moving.to_vec(),
                direction: *dir,
                step,
                traveled: dist,
                outcome: RemovalOutcome::Success,
            });
        }
        if scan.part_hit {
            part_hit_any = true;
        } else if floor_only_dir.is_none() {
            floor_only_dir = Some(*dir);
        }
    }

    let (outcome, direction) = if !part_hit_any {
        (
            RemovalOutcome::FloorBlocked,
            floor_only_dir.unwrap_or(dirs[0]),
        )
    } else {
        (RemovalOutcome::Collision, dirs[0])
    };
    Ok(RemovalAttempt {
        moving: moving.to_vec(),
        direction,
        step,
        traveled: 0.0,
        outcome,
    })
}

/// Rotate the whole assembly so the blocked removal direction points up,
/// then reseat it on the floor.
///
/// Fails with [`Error::UnstablePose`] when no part offers a resting face:
/// a triangle whose outward normal lies within 5° of straight down and
/// whose vertices all sit within `contact_tol` of the new floor height.
/// Reorientation is not a scheduled action; it costs no plan time.
pub fn reorient_for_removal(
    world: &WorldState,
    attempt: &RemovalAttempt,
    contact_tol: f64,
) -> Result<WorldState> {
    assert_eq!(
        attempt.outcome,
        RemovalOutcome::FloorBlocked,
        "reorientation applies to floor-blocked attempts"
    );
    let rot = rotation_to_up(&attempt.direction);
    let rotated = world.assembly.with_poses(|p| {
        Pose::from_parts(rot * p.pose.translation, rot * p.pose.rotation)
    });
    let next = WorldState::reseated(rotated, world.floor_z);

    if !has_resting_face(&next, contact_tol) {
        return Err(Error::UnstablePose {
            reason: "no face within 5 degrees of flat supports the new orientation".into(),
        });
    }
    Ok(next)
}

/// Rotation carrying `dir` onto +z (identity when already vertical).
pub fn rotation_to_up(dir: &Vector3<f64>) -> UnitQuaternion<f64> {
    let up = Vector3::z();
    UnitQuaternion::rotation_between(dir, &up).unwrap_or_else(|| {
        // Antiparallel: rotate half a turn about any horizontal axis.
        UnitQuaternion::from_axis_angle(&Vector3::x_axis(), std::f64::consts::PI)
    })
}

fn has_resting_face(world: &WorldState, contact_tol: f64) -> bool {
    let cos_flat = REST_FLATNESS.cos();
    for part in world.assembly.parts() {
        let mesh = &part.mesh;
        for t in 0..mesh.triangle_count() {
            let n = part.pose.transform_vector(&mesh.triangle_normal(t));
            if n.dot(&-Vector3::z()) < cos_flat {
                continue;
            }
            let low_enough = mesh.triangle_points(t).iter().all(|v| {
                (part.pose.transform_point(v).z - world.floor_z).abs() <= contact_tol
            });
            if low_enough {
                return true;
            }
        }
    }
    false
}

/// Is the remaining assembly stable once the moving set is gone? Stability
/// is liaison connectivity plus floor support: the remaining parts stay one
/// connected component and at least one of them touches the floor. Contact
/// dynamics are out of scope, so adjacency is trusted to hold parts up.
pub fn check_stability(
    world: &WorldState,
    remaining: &[PartId],
    liaisons: &LiaisonGraph,
    contact_tol: f64,
) -> bool {
    if remaining.is_empty() {
        return false;
    }
    if !liaisons.is_connected(remaining) {
        return false;
    }
    remaining.iter().any(|&id| {
        let aabb = world.assembly.part(id).world_aabb();
        aabb.min.z <= world.floor_z + contact_tol
    })
}

/// Reversibility check: sweeping the removed set back along the reversed
/// direction over the same distance must also be collision-free.
pub fn removal_is_reversible(world: &WorldState, attempt: &RemovalAttempt) -> bool {
    assert_eq!(attempt.outcome, RemovalOutcome::Success);
    let offset = attempt.direction * attempt.traveled;
    let removed = world.assembly.with_poses(|p| {
        if attempt.moving.contains(&p.id) {
            p.pose.translated(offset)
        } else {
            p.pose
        }
    });
    !sweep_collides(
        &removed,
        world.floor_z,
        &attempt.moving,
        &-attempt.direction,
        attempt.step,
        attempt.traveled,
    )
}
