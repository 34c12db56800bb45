//! Python bindings: load assemblies, build interference graphs, plan
//! disassemblies, and read schedules from Python.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use digplan::assembly::PartId;
use digplan::baselines::ClusterConfig;
use digplan::blocking::InterferenceGraph;
use digplan::contact::{default_contact_tol, detect_liaisons, liaisons_for_pairs};
use digplan::export;
use digplan::manifest::load_manifest;
use digplan::planner::{plan_disassembly, DisassemblyTree, Method, PlanConfig};
use digplan::subassembly::select_base;
use digplan::workcell;

fn err(e: digplan::Error) -> PyErr {
    match e {
        digplan::Error::InvalidInput(_) | digplan::Error::Parse { .. } => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

/// An assembly loaded from a manifest file.
#[pyclass(name = "Assembly")]
struct PyAssembly {
    inner: digplan::Assembly,
    floor_z: f64,
    explicit_liaisons: Option<Vec<(PartId, PartId)>>,
}

#[pymethods]
impl PyAssembly {
    /// Load a digplan-manifest-v1 TOML file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let loaded = load_manifest(path).map_err(err)?;
        Ok(PyAssembly {
            inner: loaded.assembly,
            floor_z: loaded.floor_z,
            explicit_liaisons: loaded.explicit_liaisons,
        })
    }

    fn part_count(&self) -> usize {
        self.inner.len()
    }

    /// `(id, name)` pairs sorted by id.
    fn parts(&self) -> Vec<(u32, String)> {
        self.inner
            .parts()
            .iter()
            .map(|p| (p.id.0, p.name.clone()))
            .collect()
    }

    /// Id of the base part (largest volume).
    fn base(&self) -> u32 {
        select_base(&self.inner).0
    }

    fn liaison_graph(&self) -> PyResult<Vec<(u32, u32, f64)>> {
        let tol = default_contact_tol(&self.inner);
        let graph = self.graph(tol)?;
        Ok(graph
            .edges()
            .iter()
            .map(|e| (e.a.0, e.b.0, e.contact_area))
            .collect())
    }

    /// Build the part interference graph.
    #[pyo3(signature = (shells=24, samples=1024))]
    fn analyze(&self, shells: usize, samples: usize) -> PyResult<PyAnalysis> {
        let tol = default_contact_tol(&self.inner);
        let graph = self.graph(tol)?;
        let base = select_base(&self.inner);
        let mut cfg = digplan::BlockingConfig::default();
        cfg.shell_count = shells;
        cfg.direction_samples = samples;
        Ok(PyAnalysis {
            dig: InterferenceGraph::build(&self.inner, base, &graph, &cfg),
        })
    }

    /// Plan a disassembly; method is "dig", "morato", or "belhadj".
    #[pyo3(signature = (method="dig", seed=0, accept=0.85, shells=24, samples=1024))]
    fn plan(
        &self,
        method: &str,
        seed: u64,
        accept: f64,
        shells: usize,
        samples: usize,
    ) -> PyResult<PyPlan> {
        let method: Method = method.parse().map_err(err)?;
        let mut cfg = PlanConfig {
            method,
            seed,
            cluster: ClusterConfig {
                seed,
                ..ClusterConfig::default()
            },
            ..PlanConfig::default()
        };
        cfg.subid.f_accept = accept;
        cfg.blocking.shell_count = shells;
        cfg.blocking.direction_samples = samples;
        let tree = plan_disassembly(&self.inner, self.floor_z, &cfg).map_err(err)?;
        Ok(PyPlan { tree })
    }
}

impl PyAssembly {
    fn graph(&self, tol: f64) -> PyResult<digplan::LiaisonGraph> {
        match &self.explicit_liaisons {
            Some(pairs) => liaisons_for_pairs(&self.inner, pairs, tol).map_err(err),
            None => detect_liaisons(&self.inner, tol).map_err(err),
        }
    }
}

/// Interference-graph view: blocking fractions and total blockage.
#[pyclass(name = "Analysis")]
struct PyAnalysis {
    dig: InterferenceGraph,
}

#[pymethods]
impl PyAnalysis {
    fn base(&self) -> u32 {
        self.dig.base().0
    }

    fn index(&self) -> Vec<u32> {
        self.dig.index().iter().map(|p| p.0).collect()
    }

    /// Blocking fraction of part `i` by part `j`.
    fn weight(&self, i: u32, j: u32) -> f64 {
        self.dig.weight(PartId(i), PartId(j))
    }

    /// Row sum: total blockage of part `i`.
    fn total_blockage(&self, i: u32) -> f64 {
        self.dig.total_blockage(PartId(i))
    }

    fn subassembly_blockage(&self, members: Vec<u32>) -> f64 {
        let ids: Vec<PartId> = members.into_iter().map(PartId).collect();
        self.dig.subassembly_blockage(&ids)
    }

    fn locked(&self, i: u32) -> bool {
        self.dig.locked_vs_base(PartId(i))
    }

    fn evaluations(&self) -> u64 {
        self.dig.evaluations()
    }

    fn to_csv(&self) -> String {
        export::dig_csv(&self.dig)
    }
}

/// A planned disassembly tree plus its schedules.
#[pyclass(name = "Plan")]
struct PyPlan {
    tree: DisassemblyTree,
}

#[pymethods]
impl PyPlan {
    fn leaf_count(&self) -> usize {
        self.tree.leaf_count()
    }

    /// Part-id sets of every tree node (root first).
    fn nodes(&self) -> Vec<Vec<u32>> {
        self.tree
            .nodes
            .iter()
            .map(|n| n.parts.iter().map(|p| p.0).collect())
            .collect()
    }

    /// Join actions as `(moving_ids, reference_ids)` in execution order.
    fn sequence(&self) -> Vec<(Vec<u32>, Vec<u32>)> {
        digplan::planner::linear_sequence(&self.tree)
            .actions
            .into_iter()
            .map(|a| {
                (
                    a.moving.iter().map(|p| p.0).collect(),
                    a.reference.iter().map(|p| p.0).collect(),
                )
            })
            .collect()
    }

    fn makespan(&self, robots: usize) -> u32 {
        workcell::simulate(&self.tree, robots).makespan()
    }

    fn speedup(&self, robots: usize) -> f64 {
        workcell::speedup(&self.tree, robots)
    }

    /// `(robots, makespan, speedup)` rows for 1..=max_robots.
    fn metrics(&self, max_robots: usize) -> Vec<(usize, u32, f64)> {
        workcell::metrics_table(&self.tree, max_robots)
            .into_iter()
            .map(|m| (m.robots, m.makespan, m.speedup))
            .collect()
    }

    fn tree_text(&self) -> String {
        export::write_tree(&self.tree)
    }

    fn dot(&self) -> String {
        export::export_dot(&self.tree)
    }

    fn sequence_text(&self) -> String {
        export::sequence_text(&self.tree)
    }

    fn schedule_csv(&self, robots: usize) -> String {
        export::schedule_csv(&workcell::simulate(&self.tree, robots))
    }
}

/// Parse a saved tree file into a plan.
#[pyfunction]
fn load_plan(path: &str) -> PyResult<PyPlan> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| PyValueError::new_err(format!("cannot read {path}: {e}")))?;
    let tree = export::parse_tree(&text).map_err(err)?;
    Ok(PyPlan { tree })
}

#[pymodule]
fn digplan_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAssembly>()?;
    m.add_class::<PyAnalysis>()?;
    m.add_class::<PyPlan>()?;
    m.add_function(wrap_pyfunction!(load_plan, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
