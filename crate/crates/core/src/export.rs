//! Plan serialization: CSV exports, the versioned tree file format, DOT
//! graphs, and the comparison table.
//!
//! All numeric output is canonicalized to six significant digits so repeated
//! runs diff cleanly, and plan files re-export byte-identically after a
//! parse (the writers are canonical and parsing preserves canonical floats).

use std::collections::BTreeMap;

use nalgebra::Vector3;

use crate::assembly::PartId;
use crate::blocking::{BlockageReport, InterferenceGraph};
use crate::error::{Error, Result};
use crate::planner::{
    linear_sequence, DisassemblyTree, RemovalRecord, ReorientRecord, TreeNode,
};
use crate::workcell::{Metrics, Schedule};

pub const TREE_SCHEMA: &str = "digplan-tree v1";

/// Canonical six-significant-digit rendering.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || x == -0.0 {
        return "0.00000".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..6).contains(&exp) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

// ---------------------------------------------------------------------------
// CSV exports
// ---------------------------------------------------------------------------

/// Interference graph as CSV: one line per ordered part pair.
pub fn dig_csv(dig: &InterferenceGraph) -> String {
    let mut out = String::from("row,col,weight\n");
    for &i in dig.index() {
        for &j in dig.index() {
            out.push_str(&format!("{i},{j},{}\n", sig6(dig.weight(i, j))));
        }
    }
    out
}

/// Per-part blockage report as CSV.
pub fn blockage_csv(report: &BlockageReport) -> String {
    let mut out = String::from("part,tau,locked,fallback_cone\n");
    for e in &report.entries {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.part,
            sig6(e.tau),
            e.locked,
            e.fallback_cone
        ));
    }
    out
}

/// Schedule as CSV: one executed action per line.
pub fn schedule_csv(schedule: &Schedule) -> String {
    let mut out = String::from("timestep,robot,node,action\n");
    for e in &schedule.entries {
        out.push_str(&format!("{},{},{},{}\n", e.timestep, e.robot, e.node, e.action));
    }
    out
}

/// Metrics rows as CSV.
pub fn metrics_csv(rows: &[Metrics]) -> String {
    let mut out = String::from("robots,makespan,speedup\n");
    for m in rows {
        out.push_str(&format!("{},{},{:.2}\n", m.robots, m.makespan, m.speedup));
    }
    out
}

/// One comparison row: a method's metrics or its failure note.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub method: String,
    pub result: std::result::Result<Metrics, String>,
}

/// Plain-text comparison table (Method | Robots | Makespan | Speedup).
pub fn compare_table(rows: &[CompareRow]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{:<10} | {:>6} | {:>8} | {:>7}\n",
        "Method", "Robots", "Makespan", "Speedup"
    ));
    out.push_str(&"-".repeat(42));
    out.push('\n');
    for row in rows {
        match &row.result {
            Ok(m) => out.push_str(&format!(
                "{:<10} | {:>6} | {:>8} | {:>7.2}\n",
                row.method, m.robots, m.makespan, m.speedup
            )),
            Err(reason) => out.push_str(&format!(
                "{:<10} | {:>6} | {:>8} | FAILED: {}\n",
                row.method, "-", "-", reason
            )),
        }
    }
    out
}

/// Comparison table as CSV.
pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut out = String::from("method,robots,makespan,speedup,status\n");
    for row in rows {
        match &row.result {
            Ok(m) => out.push_str(&format!(
                "{},{},{},{:.2},ok\n",
                row.method, m.robots, m.makespan, m.speedup
            )),
            Err(reason) => {
                out.push_str(&format!("{},,,,failed: {}\n", row.method, reason))
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Tree file (schema v1)
// ---------------------------------------------------------------------------

fn ids_csv(parts: &[PartId]) -> String {
    parts
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Canonical text serialization of a disassembly tree.
pub fn write_tree(tree: &DisassemblyTree) -> String {
    let mut out = String::new();
    out.push_str(TREE_SCHEMA);
    out.push('\n');
    let mut names: Vec<(PartId, String)> = tree.part_names.clone();
    names.sort_by_key(|(p, _)| *p);
    out.push_str(&format!("parts {}\n", names.len()));
    for (p, name) in &names {
        out.push_str(&format!("part {p} {name}\n"));
    }
    out.push_str(&format!("nodes {}\n", tree.nodes.len()));
    for node in &tree.nodes {
        out.push_str(&format!("node {} parts {}", node.id, ids_csv(&node.parts)));
        match node.parent {
            None => out.push_str(" root"),
            Some(p) => {
                out.push_str(&format!(" parent {p}"));
                out.push_str(if node.removed { " removed" } else { " remainder" });
            }
        }
        if let Some(r) = &node.removal {
            out.push_str(&format!(
                " dir {},{},{} step {} dist {}",
                sig6(r.direction.x),
                sig6(r.direction.y),
                sig6(r.direction.z),
                sig6(r.step),
                sig6(r.traveled)
            ));
        }
        if let Some(re) = &node.reorient {
            let [w, x, y, z] = {
                let q = re.rotation.quaternion();
                [q.w, q.i, q.j, q.k]
            };
            out.push_str(&format!(
                " reorient {},{},{},{}",
                sig6(w),
                sig6(x),
                sig6(y),
                sig6(z)
            ));
        }
        out.push('\n');
    }
    out
}

/// Parse a tree file written by [`write_tree`].
pub fn parse_tree(text: &str) -> Result<DisassemblyTree> {
    let bad = |line_no: usize, why: &str| {
        Error::InvalidInput(format!("tree file line {}: {}", line_no + 1, why))
    };
    let mut lines = text.lines().enumerate();
    let (n0, header) = lines.next().ok_or_else(|| bad(0, "empty file"))?;
    if header.trim() != TREE_SCHEMA {
        return Err(bad(n0, "unknown schema header"));
    }

    let mut names: BTreeMap<PartId, String> = BTreeMap::new();
    let mut nodes: Vec<TreeNode> = Vec::new();
    let mut expected_parts = 0usize;
    let mut expected_nodes = 0usize;
    for (line_no, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        match tok.next() {
            Some("parts") => {
                expected_parts = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad(line_no, "bad parts count"))?;
            }
            Some("nodes") => {
                expected_nodes = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad(line_no, "bad nodes count"))?;
            }
            Some("part") => {
                let id: u32 = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad(line_no, "bad part id"))?;
                let name = tok.next().ok_or_else(|| bad(line_no, "missing part name"))?;
                names.insert(PartId(id), name.to_string());
            }
            Some("node") => {
                let id: usize = tok
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| bad(line_no, "bad node id"))?;
                if id != nodes.len() {
                    return Err(bad(line_no, "node ids must be dense and ordered"));
                }
                let mut node = TreeNode {
                    id,
                    parts: Vec::new(),
                    parent: None,
                    children: Vec::new(),
                    removed: false,
                    removal: None,
                    reorient: None,
                };
                let mut dir: Option<Vector3<f64>> = None;
                let mut step: Option<f64> = None;
                let mut dist: Option<f64> = None;
                while let Some(key) = tok.next() {
                    match key {
                        "parts" => {
                            let list = tok.next().ok_or_else(|| bad(line_no, "missing parts"))?;
                            node.parts = list
                                .split(',')
                                .map(|s| s.parse::<u32>().map(PartId))
                                .collect::<std::result::Result<_, _>>()
                                .map_err(|_| bad(line_no, "bad part list"))?;
                        }
                        "root" => node.parent = None,
                        "parent" => {
                            let p: usize = tok
                                .next()
                                .and_then(|s| s.parse().ok())
                                .ok_or_else(|| bad(line_no, "bad parent id"))?;
                            node.parent = Some(p);
                        }
                        "removed" => node.removed = true,
                        "remainder" => node.removed = false,
                        "dir" => {
                            let v = parse_floats::<3>(tok.next(), line_no)?;
                            dir = Some(Vector3::new(v[0], v[1], v[2]));
                        }
                        "step" => {
                            step = Some(
                                tok.next()
                                    .and_then(|s| s.parse().ok())
                                    .ok_or_else(|| bad(line_no, "bad step"))?,
                            )
                        }
                        "dist" => {
                            dist = Some(
                                tok.next()
                                    .and_then(|s| s.parse().ok())
                                    .ok_or_else(|| bad(line_no, "bad dist"))?,
                            )
                        }
                        "reorient" => {
                            let q = parse_floats::<4>(tok.next(), line_no)?;
                            let quat = nalgebra::Quaternion::new(q[0], q[1], q[2], q[3]);
                            node.reorient = Some(ReorientRecord {
                                rotation: nalgebra::UnitQuaternion::from_quaternion(quat),
                            });
                        }
                        other => return Err(bad(line_no, &format!("unknown field {other:?}"))),
                    }
                }
                if let (Some(direction), Some(step), Some(traveled)) = (dir, step, dist) {
                    node.removal = Some(RemovalRecord {
                        direction,
                        step,
                        traveled,
                    });
                }
                if let Some(p) = node.parent {
                    if p >= nodes.len() {
                        return Err(bad(line_no, "parent appears after child"));
                    }
                    nodes[p].children.push(id);
                }
                nodes.push(node);
            }
            Some(other) => return Err(bad(line_no, &format!("unknown record {other:?}"))),
            None => {}
        }
    }
    if nodes.len() != expected_nodes || names.len() != expected_parts {
        return Err(Error::InvalidInput(
            "tree file part/node counts do not match the header".into(),
        ));
    }
    let tree = DisassemblyTree {
        nodes,
        part_names: names.into_iter().collect(),
    };
    tree.validate()?;
    Ok(tree)
}

fn parse_floats<const N: usize>(tok: Option<&str>, line_no: usize) -> Result<[f64; N]> {
    let fields: Vec<f64> = tok
        .unwrap_or("")
        .split(',')
        .map(|s| s.parse())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::InvalidInput(format!("tree file line {}: bad float list", line_no + 1)))?;
    fields
        .try_into()
        .map_err(|_| Error::InvalidInput(format!("tree file line {}: wrong arity", line_no + 1)))
}

// ---------------------------------------------------------------------------
// Sequence and DOT exports
// ---------------------------------------------------------------------------

fn label(tree: &DisassemblyTree, parts: &[PartId]) -> String {
    if parts.len() == 1 {
        tree.part_name(parts[0]).to_string()
    } else {
        format!(
            "({})",
            parts
                .iter()
                .map(|&p| tree.part_name(p))
                .collect::<Vec<_>>()
                .join(" ")
        )
    }
}

/// Human-readable linear sequence listing.
pub fn sequence_text(tree: &DisassemblyTree) -> String {
    let plan = linear_sequence(tree);
    let mut out = String::new();
    for (k, a) in plan.actions.iter().enumerate() {
        let dir = match a.direction {
            Some(d) => format!(
                " dir {},{},{}",
                sig6(d.x),
                sig6(d.y),
                sig6(d.z)
            ),
            None => String::new(),
        };
        out.push_str(&format!(
            "{}: join {} -> {}{}\n",
            k + 1,
            label(tree, &a.moving),
            label(tree, &a.reference),
            dir
        ));
    }
    out
}

/// DOT digraph of the plan: assembly flows bottom-up, each edge labeled
/// moving -> reference, subassembly nodes boxed, parts in parentheses.
pub fn export_dot(tree: &DisassemblyTree) -> String {
    let mut out = String::from("digraph plan {\n  rankdir=BT;\n");
    for node in &tree.nodes {
        let shape = if node.parts.len() > 1 { "box" } else { "ellipse" };
        out.push_str(&format!(
            "  n{} [label=\"{}\", shape={}];\n",
            node.id,
            label(tree, &node.parts),
            shape
        ));
    }
    for node in &tree.nodes {
        if let Some(parent) = node.parent {
            let mut reference: Vec<PartId> = tree
                .node(parent)
                .parts
                .iter()
                .copied()
                .filter(|p| !node.parts.contains(p))
                .collect();
            reference.sort_unstable();
            out.push_str(&format!(
                "  n{} -> n{} [label=\"{} -> {}\"];\n",
                node.id,
                parent,
                label(tree, &node.parts),
                label(tree, &reference)
            ));
        }
    }
    out.push_str("}\n");
    out
}
