//! Blocking fractions, the part interference graph, and total blockage.
//!
//! How much does part `j` obstruct part `i`'s removal? Concentric spherical
//! shells grow outward from `i`'s volume centroid through its removal space;
//! the fraction of any shell's area that lands inside `j` measures how much
//! of `i`'s exit surface `j` occupies at that range. The maximum over shells
//! is the blocking fraction `w_ij`. Shell areas are estimated by quasi-uniform
//! direction sampling filtered to the freedom cone, so estimates are
//! deterministic and their error shrinks with the sample budget.

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::{Point3, Vector3};
use rayon::prelude::*;

use crate::assembly::{Assembly, PartId};
use crate::contact::{ConeConfig, FreedomCone, LiaisonGraph};
use crate::error::{Error, Result};
use crate::mesh::{point_inside, Pose, TriMesh};
use crate::sampling::fibonacci_sphere;

/// Tuning for interference-graph construction. Everything is configurable;
/// the defaults are the ones the planner ships with.
#[derive(Debug, Clone)]
pub struct BlockingConfig {
    /// Shell count `m` (raised automatically when spacing demands it).
    pub shell_count: usize,
    /// Initial Fibonacci lattice size for shell directions.
    pub direction_samples: usize,
    /// Minimum feasible directions per shell; the lattice is densified until
    /// the cone holds at least this many samples.
    pub min_shell_directions: usize,
    /// Cone feasibility parameters.
    pub cone: ConeConfig,
}

impl Default for BlockingConfig {
    fn default() -> Self {
        BlockingConfig {
            shell_count: 24,
            direction_samples: 1024,
            min_shell_directions: 256,
            cone: ConeConfig::default(),
        }
    }
}

/// Counter for shell-versus-part evaluations, the dominant cost of building
/// the interference graph. Exposed so tests can pin the exact cost model.
#[derive(Debug, Default)]
pub struct CostLedger {
    shell_part_evals: AtomicU64,
}

impl CostLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&self, evals: u64) {
        self.shell_part_evals.fetch_add(evals, Ordering::Relaxed);
    }

    pub fn shell_part_evals(&self) -> u64 {
        self.shell_part_evals.load(Ordering::Relaxed)
    }
}

// ---------------------------------------------------------------------------
// Shells
// ---------------------------------------------------------------------------

/// Parameters for one part's shell construction.
#[derive(Debug, Clone)]
pub struct ShellParams {
    pub shell_count: usize,
    /// Outermost shell radius.
    pub r_max: f64,
    /// Upper bound on radial spacing; `shell_count` is raised to honor it.
    pub max_spacing: Option<f64>,
    /// Initial Fibonacci lattice size.
    pub direction_samples: usize,
    /// Minimum feasible directions required per shell.
    pub min_directions: usize,
}

impl ShellParams {
    pub fn new(shell_count: usize, r_max: f64) -> Self {
        ShellParams {
            shell_count,
            r_max,
            max_spacing: None,
            direction_samples: 1024,
            min_directions: 256,
        }
    }

    /// Effective shell count after the spacing rule.
    fn effective_count(&self) -> usize {
        let r_min = FIRST_SHELL_FRACTION * self.r_max;
        match self.max_spacing {
            Some(limit) if self.shell_count > 1 => {
                let needed = ((self.r_max - r_min) / limit).ceil() as usize + 1;
                self.shell_count.max(needed)
            }
            _ => self.shell_count.max(1),
        }
    }
}

/// First shell radius as a fraction of `r_max`.
const FIRST_SHELL_FRACTION: f64 = 0.01;

/// Lattice densification cap: beyond this the cone is treated as degenerate.
const MAX_LATTICE: usize = 1 << 21;

/// Concentric sampling shells through a part's removal space.
#[derive(Debug, Clone)]
pub struct ShellSet {
    center: Point3<f64>,
    radii: Vec<f64>,
    directions: Vec<Vector3<f64>>,
    lattice_size: usize,
    degenerate: bool,
}

impl ShellSet {
    pub fn center(&self) -> Point3<f64> {
        self.center
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn shell_count(&self) -> usize {
        self.radii.len()
    }

    pub fn directions(&self) -> &[Vector3<f64>] {
        &self.directions
    }

    /// True when the cone was too thin to sample and the full sphere was
    /// substituted as a conservative estimate.
    pub fn used_fallback(&self) -> bool {
        self.degenerate
    }

    /// Estimated solid angle of the sampled cone (steradians).
    pub fn solid_angle(&self) -> f64 {
        4.0 * std::f64::consts::PI * self.directions.len() as f64 / self.lattice_size as f64
    }

    /// Area of shell `s`'s patch: r² times the cone's solid angle.
    pub fn patch_area(&self, s: usize) -> f64 {
        self.radii[s] * self.radii[s] * self.solid_angle()
    }

    /// Sample points on shell `s`.
    pub fn sample_points(&self, s: usize) -> impl Iterator<Item = Point3<f64>> + '_ {
        let r = self.radii[s];
        let c = self.center;
        self.directions.iter().map(move |d| c + d * r)
    }
}

/// Build the shells for a part whose removal space is `cone`.
///
/// Radii run from `0.01 * r_max` out to `r_max`. Spacing never exceeds
/// `max_spacing`, so a shell always lands inside any neighbor at least twice
/// that thick. Errors with [`Error::LockedCone`] when the cone is locked;
/// cones too thin for the lattice fall back to full-sphere sampling with the
/// `used_fallback` flag set.
pub fn construct_shells(
    center: Point3<f64>,
    cone: &FreedomCone,
    params: &ShellParams,
    cone_cfg: &ConeConfig,
) -> Result<ShellSet> {
    assert!(params.r_max > 0.0, "r_max must be positive");
    if cone.is_locked(cone_cfg) {
        return Err(Error::LockedCone);
    }

    let m = params.effective_count();
    let r_min = FIRST_SHELL_FRACTION * params.r_max;
    let radii: Vec<f64> = if m == 1 {
        vec![params.r_max]
    } else {
        (0..m)
            .map(|s| r_min + (params.r_max - r_min) * s as f64 / (m - 1) as f64)
            .collect()
    };

    let (directions, lattice_size, degenerate) =
        cone_directions(cone, params.direction_samples, params.min_directions, cone_cfg);

    Ok(ShellSet {
        center,
        radii,
        directions,
        lattice_size,
        degenerate,
    })
}

/// Feasible lattice directions, densifying until `min_directions` are found.
fn cone_directions(
    cone: &FreedomCone,
    initial: usize,
    min_directions: usize,
    cfg: &ConeConfig,
) -> (Vec<Vector3<f64>>, usize, bool) {
    let mut n = initial.max(min_directions);
    loop {
        let lattice = fibonacci_sphere(n);
        let feasible: Vec<Vector3<f64>> = lattice
            .into_iter()
            .filter(|d| cone.feasible(d, cfg.eps_ang))
            .collect();
        if feasible.len() >= min_directions {
            return (feasible, n, false);
        }
        if n >= MAX_LATTICE {
            // Degenerate cone: conservative full-sphere estimate.
            return (fibonacci_sphere(initial), initial, true);
        }
        n *= 2;
    }
}

/// Blocking fraction of the shell owner by `obstacle`: the maximum over
/// shells of the fraction of shell samples landing inside the obstacle.
pub fn blocking_fraction(
    shells: &ShellSet,
    obstacle: &TriMesh,
    obstacle_pose: &Pose,
    ledger: &CostLedger,
) -> f64 {
    let world_aabb = obstacle.aabb().transformed(obstacle_pose);
    let mut w: f64 = 0.0;
    for s in 0..shells.shell_count() {
        ledger.record(1);
        let r = shells.radii()[s];
        if !world_aabb.intersects_sphere(&shells.center(), r) {
            continue;
        }
        let inside = shells
            .sample_points(s)
            .filter(|p| point_inside(obstacle, obstacle_pose, p))
            .count();
        w = w.max(inside as f64 / shells.directions().len() as f64);
    }
    w
}

// ---------------------------------------------------------------------------
// Interference graph
// ---------------------------------------------------------------------------

/// Directed part-interference weights: `w(i, j)` is the blocking fraction of
/// `i` by `j`, computed in the freest state (cones against the base part
/// only). The base part's row and column are zero. Generally asymmetric.
#[derive(Debug, Clone)]
pub struct InterferenceGraph {
    base: PartId,
    index: Vec<PartId>,
    weights: Vec<f64>,
    locked_vs_base: Vec<bool>,
    fallback_cone: Vec<bool>,
    evaluations: u64,
    shell_count_used: usize,
}

impl InterferenceGraph {
    /// Build the graph for every non-base part of the assembly.
    ///
    /// The shell count is made uniform across parts (the maximum any part's
    /// spacing rule demands), which keeps the evaluation count at exactly
    /// `m * (n-1) * (n-2)`. Locked-versus-base parts fall back to full-sphere
    /// shells and are flagged; lock handling proper happens during
    /// subassembly growth.
    pub fn build(
        assembly: &Assembly,
        base: PartId,
        liaisons: &LiaisonGraph,
        cfg: &BlockingConfig,
    ) -> InterferenceGraph {
        let index = assembly.ids();
        let n = index.len();

        // Half the smallest part extent bounds shell spacing so that no
        // pass-through part can sit between consecutive shells.
        let max_spacing = assembly
            .parts()
            .iter()
            .map(|p| p.mesh.aabb().min_extent())
            .fold(f64::INFINITY, f64::min)
            / 2.0;

        let r_max_of = |id: PartId| -> f64 { reach_radius(assembly, id) };

        let non_base: Vec<PartId> = index.iter().copied().filter(|&p| p != base).collect();

        // Uniform shell count across parts.
        let shell_count_used = non_base
            .iter()
            .map(|&id| {
                ShellParams {
                    shell_count: cfg.shell_count,
                    r_max: r_max_of(id),
                    max_spacing: Some(max_spacing),
                    direction_samples: cfg.direction_samples,
                    min_directions: cfg.min_shell_directions,
                }
                .effective_count()
            })
            .max()
            .unwrap_or(cfg.shell_count);

        let ledger = CostLedger::new();
        let rows: Vec<(PartId, Vec<f64>, bool, bool)> = non_base
            .par_iter()
            .map(|&i| {
                let cone = liaisons.freedom_cone(&[i], &[base]);
                let locked = cone.is_locked(&cfg.cone);
                let effective_cone = if locked { FreedomCone::free() } else { cone };
                let params = ShellParams {
                    shell_count: shell_count_used,
                    r_max: r_max_of(i),
                    max_spacing: None, // already uniform
                    direction_samples: cfg.direction_samples,
                    min_directions: cfg.min_shell_directions,
                };
                let shells =
                    construct_shells(assembly.part(i).world_centroid(), &effective_cone, &params, &cfg.cone)
                        .expect("free fallback cone cannot be locked");
                let row: Vec<f64> = non_base
                    .iter()
                    .map(|&j| {
                        if j == i {
                            return 0.0;
                        }
                        let obstacle = assembly.part(j);
                        blocking_fraction(&shells, &obstacle.mesh, &obstacle.pose, &ledger)
                    })
                    .collect();
                (i, row, locked, shells.used_fallback())
            })
            .collect();

        let mut weights = vec![0.0; n * n];
        let mut locked_vs_base = vec![false; n];
        let mut fallback_cone = vec![false; n];
        let pos = |id: PartId| index.binary_search(&id).expect("id in index");
        for (i, row, locked, fallback) in rows {
            let ip = pos(i);
            locked_vs_base[ip] = locked;
            fallback_cone[ip] = fallback;
            for (k, &j) in non_base.iter().enumerate() {
                weights[ip * n + pos(j)] = row[k];
            }
        }

        InterferenceGraph {
            base,
            index,
            weights,
            locked_vs_base,
            fallback_cone,
            evaluations: ledger.shell_part_evals(),
            shell_count_used,
        }
    }

    /// Graph from an explicit weight matrix (row-major over `index`, which
    /// must be sorted). Used by schedulers of synthetic scenarios and tests.
    pub fn from_weights(base: PartId, index: Vec<PartId>, weights: Vec<f64>) -> InterferenceGraph {
        let n = index.len();
        assert_eq!(weights.len(), n * n, "weight matrix must be n x n");
        assert!(index.windows(2).all(|w| w[0] < w[1]), "index must be sorted");
        assert!(index.contains(&base));
        for (k, &w) in weights.iter().enumerate() {
            assert!((0.0..=1.0).contains(&w), "w[{k}] = {w} outside [0,1]");
            if k / n == k % n {
                assert_eq!(w, 0.0, "diagonal must be zero");
            }
        }
        InterferenceGraph {
            base,
            locked_vs_base: vec![false; n],
            fallback_cone: vec![false; n],
            evaluations: 0,
            shell_count_used: 0,
            index,
            weights,
        }
    }

    pub fn base(&self) -> PartId {
        self.base
    }

    pub fn index(&self) -> &[PartId] {
        &self.index
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Shell-versus-part evaluations issued during construction.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// Uniform shell count used for every part.
    pub fn shell_count_used(&self) -> usize {
        self.shell_count_used
    }

    fn pos(&self, id: PartId) -> usize {
        self.index
            .binary_search(&id)
            .unwrap_or_else(|_| panic!("part {id} not in interference graph"))
    }

    /// Blocking fraction of `i` by `j`.
    pub fn weight(&self, i: PartId, j: PartId) -> f64 {
        self.weights[self.pos(i) * self.index.len() + self.pos(j)]
    }

    /// Was `i`'s cone against the base locked (full-sphere fallback used)?
    pub fn locked_vs_base(&self, i: PartId) -> bool {
        self.locked_vs_base[self.pos(i)]
    }

    /// Did `i` use the degenerate-cone sampling fallback?
    pub fn fallback_cone(&self, i: PartId) -> bool {
        self.fallback_cone[self.pos(i)]
    }

    /// Total blockage of part `i`: the row sum of its blocking fractions.
    pub fn total_blockage(&self, i: PartId) -> f64 {
        let ip = self.pos(i);
        let n = self.index.len();
        self.weights[ip * n..(ip + 1) * n].iter().sum()
    }

    /// Total blockage of a subassembly: member rows summed over external
    /// columns only.
    pub fn subassembly_blockage(&self, members: &[PartId]) -> f64 {
        assert!(!members.is_empty(), "subassembly must be nonempty");
        debug_assert!(
            !members.contains(&self.base),
            "base part cannot join a subassembly"
        );
        let n = self.index.len();
        let mut tau = 0.0;
        for &i in members {
            let ip = self.pos(i);
            for (jp, &j) in self.index.iter().enumerate() {
                if !members.contains(&j) {
                    tau += self.weights[ip * n + jp];
                }
            }
        }
        tau
    }

    /// Per-part total blockage and lock flags.
    pub fn blockage_report(&self) -> BlockageReport {
        BlockageReport {
            entries: self
                .index
                .iter()
                .map(|&id| BlockageEntry {
                    part: id,
                    tau: self.total_blockage(id),
                    locked: self.locked_vs_base(id),
                    fallback_cone: self.fallback_cone(id),
                })
                .collect(),
        }
    }
}

/// Outermost shell radius for a part: the distance from its centroid to the
/// farthest vertex anywhere in the assembly, plus the part's own bounding
/// radius. Covers every obstacle and is exactly rotation-equivariant, so the
/// interference graph does not drift when the whole assembly is rotated.
pub fn reach_radius(assembly: &Assembly, id: PartId) -> f64 {
    let part = assembly.part(id);
    let c = part.world_centroid();
    let far = assembly
        .parts()
        .iter()
        .flat_map(|p| p.mesh.vertices().iter().map(move |v| p.pose.transform_point(v)))
        .map(|v| (v - c).norm())
        .fold(0.0, f64::max);
    far + part.mesh.bounding_radius()
}

/// Per-part blockage summary.
#[derive(Debug, Clone)]
pub struct BlockageEntry {
    pub part: PartId,
    pub tau: f64,
    pub locked: bool,
    pub fallback_cone: bool,
}

#[derive(Debug, Clone)]
pub struct BlockageReport {
    pub entries: Vec<BlockageEntry>,
}

#[cfg(test)]
mod tests;
