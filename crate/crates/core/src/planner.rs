//! Recursive decomposition into a disassembly tree, precedence layers, and
//! linear sequences.
//!
//! Each recursion level identifies candidate subassemblies (by the selected
//! method), validates their removal with straight-line sweeps (reorienting
//! the workpiece when only the floor is in the way), and recurses into every
//! multi-part child. Removed subassemblies become independent workpieces
//! reseated on the floor; whatever could not be removed stays with the base
//! in the remainder. When no grouping passes, the level falls back to
//! single-part removals in ascending total-blockage order.

use nalgebra::{UnitQuaternion, Vector3};

use crate::assembly::{Assembly, PartId};
use crate::baselines::{belhadj_partition, morato_partition, ClusterConfig};
use crate::blocking::{BlockingConfig, InterferenceGraph};
use crate::contact::{default_contact_tol, detect_liaisons, ConeConfig, LiaisonGraph};
use crate::error::{Error, Result};
use crate::subassembly::{identify_subassemblies, select_base, SubIdConfig};
use crate::validation::{
    check_stability, reorient_for_removal, validate_removal, RemovalAttempt, RemovalOutcome,
    WorldState,
};

/// Subassembly identification method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Blocking reduction over the interference graph.
    Dig,
    /// Proximity clustering with disjoint-cluster repair.
    Morato,
    /// Contact-area accrual around fitness nuclei.
    Belhadj,
}

impl Method {
    pub fn all() -> [Method; 3] {
        [Method::Dig, Method::Morato, Method::Belhadj]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Dig => "dig",
            Method::Morato => "morato",
            Method::Belhadj => "belhadj",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dig" => Ok(Method::Dig),
            "morato" => Ok(Method::Morato),
            "belhadj" => Ok(Method::Belhadj),
            other => Err(Error::InvalidInput(format!(
                "unknown method {other:?}; expected dig, morato, or belhadj"
            ))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Everything the planner can be tuned with.
#[derive(Debug, Clone)]
pub struct PlanConfig {
    pub method: Method,
    pub seed: u64,
    pub blocking: BlockingConfig,
    pub subid: SubIdConfig,
    pub cone: ConeConfig,
    pub cluster: ClusterConfig,
    /// Contact tolerance; `None` derives it from the assembly diagonal.
    pub contact_tol: Option<f64>,
    /// Removal directions tried per candidate.
    pub k_dirs: usize,
    /// Workpiece reorientations allowed while validating one candidate.
    pub max_reorients: usize,
    /// Re-validate sibling removals pairwise for order independence.
    pub validate_sibling_pairs: bool,
}

impl Default for PlanConfig {
    fn default() -> Self {
        PlanConfig {
            method: Method::Dig,
            seed: 0,
            blocking: BlockingConfig::default(),
            subid: SubIdConfig::default(),
            cone: ConeConfig::default(),
            cluster: ClusterConfig::default(),
            contact_tol: None,
            k_dirs: 32,
            max_reorients: 3,
            validate_sibling_pairs: true,
        }
    }
}

/// Removal action recorded on a tree node.
#[derive(Debug, Clone)]
pub struct RemovalRecord {
    pub direction: Vector3<f64>,
    pub step: f64,
    pub traveled: f64,
}

/// Whole-workpiece reorientation applied immediately before a removal.
#[derive(Debug, Clone)]
pub struct ReorientRecord {
    pub rotation: UnitQuaternion<f64>,
}

/// One node of the disassembly tree.
#[derive(Debug, Clone)]
pub struct TreeNode {
    pub id: usize,
    pub parts: Vec<PartId>,
    pub parent: Option<usize>,
    /// Children in creation order: removed subassemblies first (in removal
    /// order), the remainder last.
    pub children: Vec<usize>,
    /// True when this node was removed from its parent (not the remainder).
    pub removed: bool,
    pub removal: Option<RemovalRecord>,
    pub reorient: Option<ReorientRecord>,
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Root = the full product, leaves = single parts, children partition their
/// parent. Edges are join actions read in reverse.
#[derive(Debug, Clone)]
pub struct DisassemblyTree {
    pub nodes: Vec<TreeNode>,
    /// Part names for labeling exported plans.
    pub part_names: Vec<(PartId, String)>,
}

impl DisassemblyTree {
    pub fn root(&self) -> &TreeNode {
        &self.nodes[0]
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn part_name(&self, id: PartId) -> &str {
        self.part_names
            .iter()
            .find(|(p, _)| *p == id)
            .map(|(_, n)| n.as_str())
            .unwrap_or("?")
    }

    /// Structural invariants: children partition the parent, internal nodes
    /// have at least two children, leaves are single parts, and the leaf set
    /// equals the root's part set.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidInput(msg));
        for node in &self.nodes {
            if node.is_leaf() {
                if node.parts.len() != 1 {
                    return fail(format!("leaf {} holds {} parts", node.id, node.parts.len()));
                }
                continue;
            }
            if node.children.len() < 2 {
                return fail(format!("internal node {} has one child", node.id));
            }
            let mut union: Vec<PartId> = Vec::new();
            for &c in &node.children {
                if self.nodes[c].parent != Some(node.id) {
                    return fail(format!("child {c} disowns parent {}", node.id));
                }
                union.extend(self.nodes[c].parts.iter().copied());
            }
            union.sort_unstable();
            let mut expect = node.parts.clone();
            expect.sort_unstable();
            if union != expect {
                return fail(format!("children of {} do not partition it", node.id));
            }
        }
        let mut leaves: Vec<PartId> = self
            .nodes
            .iter()
            .filter(|n| n.is_leaf())
            .map(|n| n.parts[0])
            .collect();
        leaves.sort_unstable();
        let mut all = self.nodes[0].parts.clone();
        all.sort_unstable();
        if leaves != all {
            return fail("leaf set differs from the root part set".into());
        }
        Ok(())
    }

    /// Depth of each node (root = 0).
    pub fn depths(&self) -> Vec<usize> {
        let mut depth = vec![0usize; self.nodes.len()];
        for node in &self.nodes {
            if let Some(p) = node.parent {
                depth[node.id] = depth[p] + 1;
            }
        }
        depth
    }

    fn subtree_depth(&self, id: usize) -> usize {
        1 + self
            .node(id)
            .children
            .iter()
            .map(|&c| self.subtree_depth(c))
            .max()
            .unwrap_or(0)
    }
}

/// Abstract tree shape for building disassembly trees directly (scheduler
/// studies and tests); parts are synthesized leaf by leaf.
#[derive(Debug, Clone)]
pub enum TreeShape {
    Leaf,
    Node(Vec<TreeShape>),
}

impl TreeShape {
    pub fn leaves(&self) -> usize {
        match self {
            TreeShape::Leaf => 1,
            TreeShape::Node(children) => children.iter().map(|c| c.leaves()).sum(),
        }
    }

    /// A pure chain: each internal node is {leaf, rest}.
    pub fn chain(leaves: usize) -> TreeShape {
        assert!(leaves >= 1);
        let mut shape = TreeShape::Leaf;
        for _ in 1..leaves {
            shape = TreeShape::Node(vec![TreeShape::Leaf, shape]);
        }
        shape
    }

    /// A root with `leaves` leaf children.
    pub fn star(leaves: usize) -> TreeShape {
        TreeShape::Node(vec![TreeShape::Leaf; leaves])
    }
}

impl DisassemblyTree {
    /// Materialize a shape into a tree with synthetic part ids and names
    /// (leaves numbered in depth-first order).
    pub fn from_shape(shape: &TreeShape) -> DisassemblyTree {
        fn build(
            shape: &TreeShape,
            parent: Option<usize>,
            nodes: &mut Vec<TreeNode>,
            next_part: &mut u32,
        ) -> usize {
            let id = nodes.len();
            nodes.push(TreeNode {
                id,
                parts: Vec::new(),
                parent,
                children: Vec::new(),
                removed: false,
                removal: None,
                reorient: None,
            });
            match shape {
                TreeShape::Leaf => {
                    let p = PartId(*next_part);
                    *next_part += 1;
                    nodes[id].parts = vec![p];
                }
                TreeShape::Node(children) => {
                    let mut parts = Vec::new();
                    let mut child_ids = Vec::new();
                    for c in children {
                        let cid = build(c, Some(id), nodes, next_part);
                        parts.extend(nodes[cid].parts.iter().copied());
                        child_ids.push(cid);
                    }
                    parts.sort_unstable();
                    nodes[id].parts = parts;
                    nodes[id].children = child_ids;
                }
            }
            id
        }
        let mut nodes = Vec::new();
        let mut next_part = 0;
        build(shape, None, &mut nodes, &mut next_part);
        let part_names = nodes[0]
            .parts
            .iter()
            .map(|&p| (p, format!("p{p}")))
            .collect();
        let tree = DisassemblyTree { nodes, part_names };
        tree.validate().expect("shape yields a valid tree");
        tree
    }
}

/// The removals performed at one recursion of one node; sibling removals are
/// order-independent.
#[derive(Debug, Clone)]
pub struct PrecedenceLayer {
    pub node: usize,
    /// Removed child node ids, in the order the planner removed them.
    pub removed: Vec<usize>,
}

/// One join action of an assembly sequence (the reverse of a removal).
#[derive(Debug, Clone)]
pub struct JoinAction {
    pub moving: Vec<PartId>,
    pub reference: Vec<PartId>,
    pub direction: Option<Vector3<f64>>,
}

/// Ordered join actions; executing them in reverse disassembles the product.
#[derive(Debug, Clone)]
pub struct SequencePlan {
    pub actions: Vec<JoinAction>,
}

// ---------------------------------------------------------------------------
// Planning
// ---------------------------------------------------------------------------

struct Planner<'a> {
    cfg: &'a PlanConfig,
    nodes: Vec<TreeNode>,
}

/// Plan the disassembly of an assembly resting on the floor.
pub fn plan_disassembly(
    assembly: &Assembly,
    floor_z: f64,
    cfg: &PlanConfig,
) -> Result<DisassemblyTree> {
    cfg.subid.validate()?;
    let world = WorldState::new(assembly.clone(), floor_z)?;
    let mut planner = Planner {
        cfg,
        nodes: Vec::new(),
    };
    let root = planner.new_node(assembly.ids(), None, false);
    planner.decompose(world, root)?;
    let tree = DisassemblyTree {
        nodes: planner.nodes,
        part_names: assembly
            .parts()
            .iter()
            .map(|p| (p.id, p.name.clone()))
            .collect(),
    };
    tree.validate()?;
    Ok(tree)
}

impl<'a> Planner<'a> {
    fn new_node(&mut self, parts: Vec<PartId>, parent: Option<usize>, removed: bool) -> usize {
        let id = self.nodes.len();
        self.nodes.push(TreeNode {
            id,
            parts,
            parent,
            children: Vec::new(),
            removed,
            removal: None,
            reorient: None,
        });
        id
    }

    fn decompose(&mut self, world: WorldState, node: usize) -> Result<()> {
        if self.nodes[node].parts.len() <= 1 {
            return Ok(());
        }
        let stuck = |state: &Assembly, reason: &str| Error::PlanFailure {
            stuck: state
                .ids()
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(" "),
            reason: reason.to_string(),
        };

        let state = world.assembly.clone();
        let tol = self
            .cfg
            .contact_tol
            .unwrap_or_else(|| default_contact_tol(&state));
        let liaisons = detect_liaisons(&state, tol)?;
        let base = select_base(&state);
        let dig = InterferenceGraph::build(&state, base, &liaisons, &self.cfg.blocking);

        let candidates: Vec<Vec<PartId>> = match self.cfg.method {
            Method::Dig => {
                match identify_subassemblies(&state, &dig, &liaisons, &self.cfg.subid, &self.cfg.cone)
                {
                    Ok(out) => out.candidates.into_iter().map(|c| c.members).collect(),
                    Err(Error::DegenerateState) => {
                        return Err(stuck(&state, "every part and grouping is locked"))
                    }
                    Err(e) => return Err(e),
                }
            }
            Method::Morato => {
                let mut cluster_cfg = self.cfg.cluster.clone();
                cluster_cfg.seed = self.cfg.seed;
                morato_partition(&state, base, &liaisons, &cluster_cfg)
            }
            Method::Belhadj => belhadj_partition(&state, base, &liaisons, &self.cfg.subid),
        };

        // Validate candidate removals in order against the full sibling
        // state; the workpiece may reorient along the way.
        let mut working = world;
        let mut working_liaisons = liaisons;
        let mut removed_parts: Vec<PartId> = Vec::new();
        let mut accepted: Vec<(Vec<PartId>, RemovalAttempt, Option<ReorientRecord>)> = Vec::new();
        for cand in candidates {
            if cand.len() >= state.len() {
                continue; // a candidate must leave the base behind
            }
            if let Some((attempt, reorient, next_world, next_liaisons)) =
                self.try_removal(&working, &working_liaisons, &cand, tol)?
            {
                // The remaining parts must stay connected and grounded after
                // all removals so far plus this one.
                let remaining: Vec<PartId> = state
                    .ids()
                    .into_iter()
                    .filter(|p| !removed_parts.contains(p) && !cand.contains(p))
                    .collect();
                if !check_stability(&next_world, &remaining, &next_liaisons, tol) {
                    continue;
                }
                removed_parts.extend(cand.iter().copied());
                accepted.push((cand, attempt, reorient));
                working = next_world;
                working_liaisons = next_liaisons;
            }
        }

        // Fallback: single parts in ascending total blockage, then id.
        if accepted.is_empty() {
            let mut singles: Vec<PartId> = state.ids().into_iter().filter(|&p| p != base).collect();
            singles.sort_by(|&a, &b| {
                dig.total_blockage(a)
                    .partial_cmp(&dig.total_blockage(b))
                    .unwrap()
                    .then(a.cmp(&b))
            });
            for p in singles {
                let cand = vec![p];
                if let Some((attempt, reorient, next_world, next_liaisons)) =
                    self.try_removal(&working, &working_liaisons, &cand, tol)?
                {
                    let remaining: Vec<PartId> =
                        state.ids().into_iter().filter(|&q| q != p).collect();
                    if !check_stability(&next_world, &remaining, &next_liaisons, tol) {
                        continue;
                    }
                    removed_parts.push(p);
                    accepted.push((cand, attempt, reorient));
                    working = next_world;
                    break;
                }
            }
        }

        if accepted.is_empty() {
            return Err(stuck(&state, "no subassembly or single part can be removed"));
        }

        if self.cfg.validate_sibling_pairs && accepted.len() > 1 {
            self.check_sibling_order_independence(&working, &state, &accepted)?;
        }

        // Materialize children: removed subassemblies, then the remainder.
        for (cand, attempt, reorient) in &accepted {
            let child = self.new_node(cand.clone(), Some(node), true);
            self.nodes[child].removal = Some(RemovalRecord {
                direction: attempt.direction,
                step: attempt.step,
                traveled: attempt.traveled,
            });
            self.nodes[child].reorient = reorient.clone();
            self.nodes[node].children.push(child);
        }
        let remainder: Vec<PartId> = state
            .ids()
            .into_iter()
            .filter(|p| !removed_parts.contains(p))
            .collect();
        let remainder_node = self.new_node(remainder.clone(), Some(node), false);
        self.nodes[node].children.push(remainder_node);

        // Recurse: removed children become their own floor-seated
        // workpieces; the remainder continues in the working world.
        let children: Vec<usize> = self.nodes[node].children.clone();
        for &child in &children {
            let parts = self.nodes[child].parts.clone();
            if parts.len() <= 1 {
                continue;
            }
            let sub = working.assembly.subset(&parts);
            let child_world = if self.nodes[child].removed {
                WorldState::reseated(sub, working.floor_z)
            } else {
                WorldState::new(sub, working.floor_z)?
            };
            self.decompose(child_world, child)?;
        }
        Ok(())
    }

    /// Validate removing `cand` from `world`, reorienting the workpiece up
    /// to `max_reorients` times when only the floor blocks it. Returns the
    /// successful attempt with the (possibly rotated) world, or None.
    #[allow(clippy::type_complexity)]
    fn try_removal(
        &self,
        world: &WorldState,
        liaisons: &LiaisonGraph,
        cand: &[PartId],
        tol: f64,
    ) -> Result<Option<(RemovalAttempt, Option<ReorientRecord>, WorldState, LiaisonGraph)>> {
        let mut current = world.clone();
        let mut current_liaisons = liaisons.clone();
        let mut rotation: Option<UnitQuaternion<f64>> = None;
        for _ in 0..=self.cfg.max_reorients {
            let attempt =
                match validate_removal(&current, cand, &current_liaisons, self.cfg.k_dirs, &self.cfg.cone) {
                    Ok(a) => a,
                    Err(Error::LockedCone) => return Ok(None),
                    Err(e) => return Err(e),
                };
            match attempt.outcome {
                RemovalOutcome::Success => {
                    let reorient = rotation.map(|rotation| ReorientRecord { rotation });
                    return Ok(Some((attempt, reorient, current, current_liaisons)));
                }
                RemovalOutcome::Collision => return Ok(None),
                RemovalOutcome::FloorBlocked => {
                    match reorient_for_removal(&current, &attempt, tol) {
                        Ok(next) => {
                            let delta = crate::validation::rotation_to_up(&attempt.direction);
                            rotation = Some(match rotation {
                                Some(r) => delta * r,
                                None => delta,
                            });
                            current_liaisons = detect_liaisons(&next.assembly, tol)?;
                            current = next;
                        }
                        Err(Error::UnstablePose { .. }) => return Ok(None),
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        Ok(None)
    }

    /// Sibling removals must commute: re-validate each accepted removal in
    /// the state where every other sibling is already gone.
    fn check_sibling_order_independence(
        &self,
        world: &WorldState,
        state: &Assembly,
        accepted: &[(Vec<PartId>, RemovalAttempt, Option<ReorientRecord>)],
    ) -> Result<()> {
        for (i, (cand, attempt, _)) in accepted.iter().enumerate() {
            if attempt.outcome != RemovalOutcome::Success {
                continue;
            }
            let others: Vec<PartId> = accepted
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .flat_map(|(_, (c, _, _))| c.iter().copied())
                .collect();
            let kept: Vec<PartId> = state
                .ids()
                .into_iter()
                .filter(|p| !others.contains(p))
                .collect();
            let sub = world.assembly.subset(&kept);
            if crate::validation::sweep_collides(
                &sub,
                world.floor_z,
                cand,
                &attempt.direction,
                attempt.step,
                attempt.traveled,
            ) {
                return Err(Error::PlanFailure {
                    stuck: kept
                        .iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                    reason: "sibling removals are not order-independent".into(),
                });
            }
        }
        Ok(())
    }
}

/// The precedence layers of every internal node: its removed children,
/// grouped by the recursion that produced them. Hand-built trees without
/// remainder marks treat all children as one layer.
pub fn precedence_layers(tree: &DisassemblyTree) -> Vec<PrecedenceLayer> {
    let mut layers = Vec::new();
    for node in &tree.nodes {
        if node.is_leaf() {
            continue;
        }
        let removed: Vec<usize> = node
            .children
            .iter()
            .copied()
            .filter(|&c| tree.nodes[c].removed)
            .collect();
        let removed = if removed.is_empty() {
            node.children.clone()
        } else {
            removed
        };
        layers.push(PrecedenceLayer {
            node: node.id,
            removed,
        });
    }
    layers
}

/// Linear assembly sequence: depth-first, deepest subtree first, parents
/// joined only after their children are complete. Exactly `n - 1` actions.
pub fn linear_sequence(tree: &DisassemblyTree) -> SequencePlan {
    let mut actions = Vec::new();
    emit_joins(tree, 0, &mut actions);
    SequencePlan { actions }
}

fn emit_joins(tree: &DisassemblyTree, node: usize, out: &mut Vec<JoinAction>) {
    let n = tree.node(node);
    if n.is_leaf() {
        return;
    }
    // Children ordered deepest subtree first (ties by id).
    let mut order = n.children.clone();
    order.sort_by_key(|&c| (std::cmp::Reverse(tree.subtree_depth(c)), c));
    for &c in &order {
        emit_joins(tree, c, out);
    }

    // Joins at this node: reverse removal order, each candidate joining the
    // growing reference anchored at the remainder. Hand-built trees without
    // removal marks anchor on their last child.
    let removed: Vec<usize> = n
        .children
        .iter()
        .copied()
        .filter(|&c| tree.nodes[c].removed)
        .collect();
    let anchors: Vec<usize> = n
        .children
        .iter()
        .copied()
        .filter(|&c| !tree.nodes[c].removed)
        .collect();
    let (anchor, joiners): (Vec<usize>, Vec<usize>) = match (anchors.is_empty(), removed.is_empty()) {
        (false, false) => (anchors, removed),
        // No removal marks at all (hand-built): the last child anchors.
        (false, true) => {
            let mut cs = anchors;
            let a = cs.pop().expect("internal node has children");
            (vec![a], cs)
        }
        // Everything marked removed: anchor on the last removal.
        (true, false) => {
            let mut cs = removed;
            let a = cs.pop().expect("internal node has children");
            (vec![a], cs)
        }
        (true, true) => unreachable!("internal node without children"),
    };

    let mut reference: Vec<PartId> = anchor
        .iter()
        .flat_map(|&a| tree.nodes[a].parts.iter().copied())
        .collect();
    reference.sort_unstable();
    for &c in joiners.iter().rev() {
        let child = &tree.nodes[c];
        out.push(JoinAction {
            moving: child.parts.clone(),
            reference: reference.clone(),
            direction: child.removal.as_ref().map(|r| r.direction),
        });
        reference.extend(child.parts.iter().copied());
        reference.sort_unstable();
    }
}

/// Re-validate a planned tree geometrically: every removal sweep re-runs
/// clean in its recorded world (reorientations replayed), the remaining
/// set stays stable, and every reversed sweep re-inserts collision-free.
pub fn verify_tree(assembly: &Assembly, floor_z: f64, tree: &DisassemblyTree) -> Result<()> {
    tree.validate()?;
    let world = WorldState::new(assembly.clone(), floor_z)?;
    verify_node(tree, world, 0)
}

fn verify_node(tree: &DisassemblyTree, world: WorldState, node: usize) -> Result<()> {
    let n = tree.node(node);
    if n.is_leaf() {
        return Ok(());
    }
    let fail = |reason: String| Err(Error::PlanFailure {
        stuck: format!("node {node}"),
        reason,
    });
    let tol = default_contact_tol(&world.assembly);
    let mut working = world;
    let mut present: Vec<PartId> = n.parts.clone();
    for &c in &n.children {
        let child = &tree.nodes[c];
        if !child.removed {
            continue;
        }
        if let Some(re) = &child.reorient {
            let rot = re.rotation;
            let rotated = working.assembly.with_poses(|p| {
                crate::mesh::Pose::from_parts(rot * p.pose.translation, rot * p.pose.rotation)
            });
            working = WorldState::reseated(rotated, working.floor_z);
        }
        let rec = child
            .removal
            .as_ref()
            .ok_or_else(|| Error::InvalidInput(format!("removed node {c} lacks a removal record")))?;
        let current = working.assembly.subset(&present);
        if crate::validation::sweep_collides(
            &current,
            working.floor_z,
            &child.parts,
            &rec.direction,
            rec.step,
            rec.traveled,
        ) {
            return fail(format!("removal of node {c} no longer sweeps clean"));
        }
        // Reversed insertion.
        let offset = rec.direction * rec.traveled;
        let inserted = current.with_poses(|p| {
            if child.parts.contains(&p.id) {
                p.pose.translated(offset)
            } else {
                p.pose
            }
        });
        if crate::validation::sweep_collides(
            &inserted,
            working.floor_z,
            &child.parts,
            &(-rec.direction),
            rec.step,
            rec.traveled,
        ) {
            return fail(format!("reversed insertion of node {c} collides"));
        }
        present.retain(|p| !child.parts.contains(p));
        let liaisons = detect_liaisons(&working.assembly.subset(&present), tol)?;
        if !check_stability(&working, &present, &liaisons, tol) {
            return fail(format!("remaining set unstable after removing node {c}"));
        }
    }
    for &c in &n.children {
        let child = &tree.nodes[c];
        if child.parts.len() <= 1 {
            continue;
        }
        let sub = working.assembly.subset(&child.parts);
        let child_world = if child.removed {
            WorldState::reseated(sub, working.floor_z)
        } else {
            WorldState::new(sub, working.floor_z)?
        };
        verify_node(tree, child_world, c)?;
    }
    Ok(())
}
