//! digplan — disassembly sequence planning from part-access analysis.
//!
//! The library models a product as a set of posed watertight triangle meshes
//! and plans its disassembly by quantifying how strongly each part obstructs
//! every other part's removal space. The obstruction estimates form a
//! directed interference graph whose row sums measure total blockage; the
//! planner grows subassemblies that reduce blockage, validates removals with
//! straight-line sweeps, and emits a disassembly tree from which linear
//! sequences and multi-robot schedules are derived.
//!
//! Module map:
//! - [`mesh`] — triangle meshes, poses, BVHs, collision/containment queries
//! - [`assembly`] — posed part collections and bounding queries
//! - [`contact`] — liaison detection, contact normals, freedom cones
//! - [`blocking`] — shell sampling, blocking fractions, interference graph
//! - [`subassembly`] — base/nucleus selection and blocking-reduction growth
//! - [`validation`] — swept removal checks, reorientation, stability
//! - [`planner`] — recursive decomposition into a disassembly tree
//! - [`baselines`] — proximity-cluster and contact-area comparison planners
//! - [`workcell`] — discrete-time multi-robot schedule simulation
//! - [`manifest`] — assembly manifest files (TOML, schema v1)
//! - [`export`] — CSV / DOT / tree-file serialization
//! - [`shapes`] / [`fixtures`] — parametric test geometry and demo assemblies

pub mod assembly;
pub mod baselines;
pub mod blocking;
pub mod contact;
pub mod error;
pub mod export;
pub mod fixtures;
pub mod manifest;
pub mod mesh;
pub mod planner;
pub mod sampling;
pub mod shapes;
pub mod subassembly;
pub mod validation;
pub mod workcell;

pub use assembly::{Assembly, Part, PartId};
pub use blocking::{BlockageReport, BlockingConfig, CostLedger, InterferenceGraph, ShellSet};
pub use contact::{DofClass, FreedomCone, Liaison, LiaisonGraph};
pub use error::{Error, Result};
pub use subassembly::{CandidateSubassembly, SubIdConfig};
pub use validation::{RemovalAttempt, RemovalOutcome, WorldState};
pub use workcell::{Metrics, Schedule};
pub use mesh::{Aabb, Pose, TriMesh};
pub use planner::{DisassemblyTree, Method, PlanConfig, SequencePlan};
