//! End-to-end checks of the digplan binary: commands, files, exit codes,
//! and reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use digplan::assembly::PartId;
use digplan::fixtures;
use digplan::manifest::save_assembly_as_manifest;

fn digplan(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_digplan"))
        .args(args)
        .current_dir(dir)
        .env_remove("DIGPLAN_SEED")
        .output()
        .expect("binary runs")
}

fn manifest_for(asm: &digplan::Assembly, dir: &Path) -> PathBuf {
    save_assembly_as_manifest(asm, 0.0, dir).unwrap()
}

#[test]
fn analyze_two_part_stack_writes_zero_matrix() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = manifest_for(&fixtures::two_part_stack(), tmp.path());
    let out = digplan(
        &["analyze", manifest.to_str().unwrap(), "-o", "result"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let dig = std::fs::read_to_string(tmp.path().join("result/dig.csv")).unwrap();
    let mut lines = dig.lines();
    assert_eq!(lines.next(), Some("row,col,weight"));
    // 2x2 matrix including the base row/column, all zeros off base.
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert!(row.ends_with(",0.00000"), "unexpected weight in {row}");
    }
    let blockage = std::fs::read_to_string(tmp.path().join("result/blockage.csv")).unwrap();
    assert_eq!(blockage.lines().count(), 3);
}

#[test]
fn analyze_enclosure_reports_tau_above_one() {
    let tmp = tempfile::tempdir().unwrap();
    let (asm, ball) = fixtures::nested_enclosures();
    let manifest = manifest_for(&asm, tmp.path());
    let out = digplan(
        &["analyze", manifest.to_str().unwrap(), "-o", "result"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let blockage = std::fs::read_to_string(tmp.path().join("result/blockage.csv")).unwrap();
    let ball_row = blockage
        .lines()
        .find(|l| l.starts_with(&format!("{ball},")))
        .expect("ball row");
    let tau: f64 = ball_row.split(',').nth(1).unwrap().parse().unwrap();
    assert!(tau > 1.0, "enclosed part must exceed tau 1: {ball_row}");
}

#[test]
fn missing_mesh_exits_with_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = manifest_for(&fixtures::two_part_stack(), tmp.path());
    std::fs::remove_file(tmp.path().join("meshes/lower.obj")).unwrap();
    let out = digplan(&["analyze", manifest.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn plan_writes_all_outputs_and_export_dot_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = manifest_for(&fixtures::lock_pair_fixture(), tmp.path());
    let out = digplan(
        &[
            "plan",
            manifest.to_str().unwrap(),
            "--method",
            "dig",
            "--robots",
            "2",
            "-o",
            "result",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["tree.txt", "sequence.txt", "plan.dot", "schedule.csv", "metrics.csv"] {
        assert!(tmp.path().join("result").join(name).exists(), "{name}");
    }
    let metrics = std::fs::read_to_string(tmp.path().join("result/metrics.csv")).unwrap();
    assert!(metrics.starts_with("robots,makespan,speedup\n"));
    assert!(metrics.lines().nth(1).unwrap().starts_with("1,2,1.00"));

    // export-dot on the saved tree must match the plan's own DOT output.
    let out = digplan(
        &[
            "export-dot",
            "result/tree.txt",
            "-o",
            "result/replay.dot",
        ],
        tmp.path(),
    );
    assert!(out.status.success());
    let a = std::fs::read_to_string(tmp.path().join("result/plan.dot")).unwrap();
    let b = std::fs::read_to_string(tmp.path().join("result/replay.dot")).unwrap();
    assert_eq!(a, b);
    assert!(a.contains("(A B)"), "pair label present: {a}");
}

#[test]
fn export_dot_rejects_malformed_files() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("bad.txt"), "not a tree file\n").unwrap();
    let out = digplan(&["export-dot", "bad.txt"], tmp.path());
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn planning_failure_exits_with_code_four() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = manifest_for(&fixtures::welded_fixture(), tmp.path());
    let out = digplan(
        &["plan", manifest.to_str().unwrap(), "--method", "dig"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn fixed_seed_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = manifest_for(&fixtures::lock_pair_fixture(), tmp.path());
    for dir in ["a", "b"] {
        let out = digplan(
            &[
                "plan",
                manifest.to_str().unwrap(),
                "--method",
                "morato",
                "--seed",
                "7",
                "--robots",
                "2",
                "-o",
                dir,
            ],
            tmp.path(),
        );
        assert!(out.status.success());
    }
    for name in ["tree.txt", "sequence.txt", "plan.dot", "schedule.csv", "metrics.csv"] {
        let a = std::fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = std::fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn zero_accept_threshold_still_plans_stacks() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = manifest_for(&fixtures::tower(4), tmp.path());
    let out = digplan(
        &[
            "plan",
            manifest.to_str().unwrap(),
            "--method",
            "dig",
            "--accept",
            "0.0",
            "-o",
            "result",
        ],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let seq = std::fs::read_to_string(tmp.path().join("result/sequence.txt")).unwrap();
    assert_eq!(seq.lines().count(), 3, "n - 1 actions: {seq}");
}

#[test]
fn compare_handles_single_part_assemblies() {
    let tmp = tempfile::tempdir().unwrap();
    let asm = digplan::Assembly::new(vec![digplan::Part::new(
        0,
        "only",
        digplan::shapes::unit_cube(),
        digplan::Pose::identity(),
    )]);
    let manifest = manifest_for(&asm, tmp.path());
    let out = digplan(
        &["compare", manifest.to_str().unwrap(), "--robots", "2", "-o", "result"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(table.contains("Method"), "{table}");
    let csv = std::fs::read_to_string(tmp.path().join("result/compare.csv")).unwrap();
    // 3 methods x 2 robot counts, all makespan 0.
    assert_eq!(csv.lines().count(), 7);
    for line in csv.lines().skip(1) {
        assert!(line.contains(",0,1.00,ok"), "{line}");
    }
}

#[test]
fn compare_emits_chain_speedup_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = manifest_for(&fixtures::nested_covers_chain(6), tmp.path());
    let out = digplan(
        &["compare", manifest.to_str().unwrap(), "--robots", "3", "-o", "result"],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("result/compare.csv")).unwrap();
    assert_eq!(csv.lines().count(), 10, "3 methods x 3 robot counts: {csv}");
    for line in csv.lines().skip(1) {
        assert!(line.ends_with(",5,1.00,ok"), "pure chain rows: {line}");
    }
    assert_eq!(PartId(0), PartId(0));
}

#[test]
fn geometry_errors_exit_with_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = manifest_for(&fixtures::two_part_stack(), tmp.path());
    // Corrupt one mesh: drop its last face record to open the surface.
    let obj_path = tmp.path().join("meshes/lower.obj");
    let obj = std::fs::read_to_string(&obj_path).unwrap();
    let truncated: Vec<&str> = obj.trim_end().lines().collect();
    std::fs::write(&obj_path, truncated[..truncated.len() - 1].join("\n")).unwrap();
    let out = digplan(&["analyze", manifest.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn digplan_seed_env_var_matches_seed_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = manifest_for(&fixtures::lock_pair_fixture(), tmp.path());
    let flag = digplan(
        &["plan", manifest.to_str().unwrap(), "--method", "morato", "--seed", "9", "-o", "flag"],
        tmp.path(),
    );
    assert!(flag.status.success());
    let env = Command::new(env!("CARGO_BIN_EXE_digplan"))
        .args(["plan", manifest.to_str().unwrap(), "--method", "morato", "-o", "env"])
        .current_dir(tmp.path())
        .env("DIGPLAN_SEED", "9")
        .output()
        .unwrap();
    assert!(env.status.success());
    let a = std::fs::read(tmp.path().join("flag/tree.txt")).unwrap();
    let b = std::fs::read(tmp.path().join("env/tree.txt")).unwrap();
    assert_eq!(a, b, "env seed must act as the fallback for --seed");
}

#[test]
fn module_box_demo_plans_eleven_actions_via_cli() {
    let tmp = tempfile::tempdir().unwrap();
    let demo = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../demo/module_box/assembly.toml");
    let out = digplan(
        &["plan", demo.to_str().unwrap(), "--method", "dig", "--robots", "3", "-o",
          tmp.path().to_str().unwrap()],
        tmp.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let seq = std::fs::read_to_string(tmp.path().join("sequence.txt")).unwrap();
    assert_eq!(seq.lines().count(), 11);
    let metrics = std::fs::read_to_string(tmp.path().join("metrics.csv")).unwrap();
    let rows: Vec<&str> = metrics.lines().skip(1).collect();
    assert_eq!(rows, vec!["1,11,1.00", "2,7,1.57", "3,6,1.83"]);
}
