use super::*;
use crate::assembly::{Assembly, PartId};
use crate::contact::{default_contact_tol, detect_liaisons};
use crate::fixtures;
use crate::shapes::{cuboid, hollow_cube, icosphere, unit_cube};
use nalgebra::UnitQuaternion;

fn free_shells(center: Point3<f64>, m: usize, r_max: f64, max_spacing: Option<f64>) -> ShellSet {
    let mut params = ShellParams::new(m, r_max);
    params.max_spacing = max_spacing;
    construct_shells(center, &FreedomCone::free(), &params, &ConeConfig::default()).unwrap()
}

#[test]
fn notch_cone_shells_have_octant_patch_areas() {
    let asm = fixtures::notch_fixture();
    let g = detect_liaisons(&asm, default_contact_tol(&asm)).unwrap();
    let cone = g.freedom_cone(&[PartId(1)], &[PartId(0)]);
    let params = ShellParams::new(24, 3.0);
    let shells = construct_shells(
        asm.part(PartId(1)).world_centroid(),
        &cone,
        &params,
        &ConeConfig::default(),
    )
    .unwrap();
    assert_eq!(shells.shell_count(), 24);
    assert!(shells.directions().len() >= 256);
    for (s, &r) in shells.radii().iter().enumerate() {
        let expect = r * r * std::f64::consts::FRAC_PI_2;
        let got = shells.patch_area(s);
        assert!(
            (got - expect).abs() / expect < 0.02,
            "shell {s}: patch area {got} vs {expect}"
        );
    }
}

#[test]
fn free_cone_shells_cover_the_full_sphere() {
    let shells = free_shells(Point3::origin(), 24, 2.0, None);
    for (s, &r) in shells.radii().iter().enumerate() {
        let expect = 4.0 * std::f64::consts::PI * r * r;
        assert!((shells.patch_area(s) - expect).abs() / expect < 1e-9);
    }
    // Radii strictly increasing from 0.01 * r_max to r_max.
    assert!((shells.radii()[0] - 0.02).abs() < 1e-12);
    assert!((shells.radii()[23] - 2.0).abs() < 1e-12);
    assert!(shells.radii().windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn locked_cone_is_rejected() {
    use nalgebra::Vector3;
    let locked = FreedomCone::from_normals(vec![
        Vector3::x(),
        -Vector3::x(),
        Vector3::y(),
        -Vector3::y(),
        Vector3::z(),
        -Vector3::z(),
    ]);
    let params = ShellParams::new(24, 2.0);
    match construct_shells(Point3::origin(), &locked, &params, &ConeConfig::default()) {
        Err(crate::error::Error::LockedCone) => {}
        other => panic!("expected LockedCone, got {other:?}"),
    }
}

#[test]
fn thin_washer_forces_finer_shells_and_is_never_skipped() {
    // Washer: a broad slab only 0.02 m thick, hovering 1 m above the part.
    // The spacing rule (half the washer thickness) raises the shell count
    // beyond the default 24 so that some shell always lands inside the slab.
    let washer = cuboid(nalgebra::Vector3::new(8.0, 8.0, 0.02));
    let washer_pose = Pose::translation_only(nalgebra::Vector3::new(-4.0, -4.0, 1.0));
    let shells = free_shells(Point3::origin(), 24, 3.0, Some(0.01));
    assert!(shells.shell_count() > 24, "m must be auto-raised");
    assert!(shells
        .radii()
        .windows(2)
        .all(|w| w[1] - w[0] <= 0.01 + 1e-12));
    let ledger = CostLedger::new();
    let w = blocking_fraction(&shells, &washer, &washer_pose, &ledger);
    assert!(w > 0.0, "a pass-through part must never be skipped");
    assert_eq!(ledger.shell_part_evals(), shells.shell_count() as u64);
}

#[test]
fn far_obstacle_blocks_nothing() {
    let shells = free_shells(Point3::origin(), 24, 2.0, None);
    let cube = unit_cube();
    let far = Pose::translation_only(nalgebra::Vector3::new(50.0, 0.0, 0.0));
    let ledger = CostLedger::new();
    assert_eq!(blocking_fraction(&shells, &cube, &far, &ledger), 0.0);
}

#[test]
fn nested_enclosures_block_fully_at_some_shell() {
    // Covers with wall bands [sqrt(3)*1, 2] and [sqrt(3)*3, 6]: a shell of
    // matching radius lies entirely within the wall material, so the sampled
    // fraction must reach exactly 1.0. r_max = 7 with spacing <= 0.2 puts
    // shells inside both bands.
    let (asm, _) = fixtures::nested_enclosures();
    let mut params = ShellParams::new(36, 7.0);
    params.max_spacing = Some(0.2);
    let shells = construct_shells(
        Point3::origin(),
        &FreedomCone::free(),
        &params,
        &ConeConfig::default(),
    )
    .unwrap();
    let ledger = CostLedger::new();
    let inner = asm.part(PartId(1));
    let outer = asm.part(PartId(2));
    assert_eq!(
        blocking_fraction(&shells, &inner.mesh, &inner.pose, &ledger),
        1.0
    );
    assert_eq!(
        blocking_fraction(&shells, &outer.mesh, &outer.pose, &ledger),
        1.0
    );
}

#[test]
fn half_space_slab_blocks_half_the_sphere() {
    // Enormous slab covering the upper half space starting at z = 0.1, with
    // shells out to r_max = 2: the top shell's cap fraction is
    // (1 - 0.1/2) / 2 = 0.475, within the 0.5 +- 0.03 band.
    let slab = cuboid(nalgebra::Vector3::new(100.0, 100.0, 4.0));
    let pose = Pose::translation_only(nalgebra::Vector3::new(-50.0, -50.0, 0.1));
    let shells = free_shells(Point3::origin(), 24, 2.0, None);
    let ledger = CostLedger::new();
    let w = blocking_fraction(&shells, &slab, &pose, &ledger);
    assert!((w - 0.5).abs() <= 0.03, "half-space blocking {w}");
}

#[test]
fn monotone_under_obstacle_growth() {
    // Enlarging a convex blocker about its centroid never decreases the
    // blocking fraction (identical shell samples).
    let shells = free_shells(Point3::origin(), 24, 3.0, None);
    let blocker = icosphere(0.5, 1);
    let pose = Pose::translation_only(nalgebra::Vector3::new(1.5, 0.0, 0.0));
    let ledger = CostLedger::new();
    let mut last = -1.0;
    for scale in [1.0, 1.2, 1.5, 2.0] {
        let grown = blocker.scaled_about(&blocker.centroid(), scale);
        let w = blocking_fraction(&shells, &grown, &pose, &ledger);
        assert!(w >= last, "w decreased from {last} to {w} at scale {scale}");
        last = w;
    }
    assert!(last > 0.0);
}

fn build_fixture_dig(asm: &Assembly, base: PartId, cfg: &BlockingConfig) -> InterferenceGraph {
    let graph = detect_liaisons(asm, default_contact_tol(asm)).unwrap();
    InterferenceGraph::build(asm, base, &graph, cfg)
}

#[test]
fn sparse_row_has_zero_offdiagonal() {
    let asm = fixtures::sparse_row(3);
    let dig = build_fixture_dig(&asm, PartId(0), &BlockingConfig::default());
    for &i in dig.index() {
        for &j in dig.index() {
            assert_eq!(dig.weight(i, j), 0.0, "w({i},{j})");
        }
    }
}

#[test]
fn lock_pair_dig_is_asymmetric() {
    let asm = fixtures::lock_pair_fixture();
    let dig = build_fixture_dig(&asm, PartId(0), &BlockingConfig::default());
    let (a, b) = (PartId(1), PartId(2));
    let w_ab = dig.weight(a, b);
    let w_ba = dig.weight(b, a);
    assert!(w_ab > 0.2, "lid must block a large fraction: {w_ab}");
    assert!(w_ba < 0.05, "A cannot block the lid above it: {w_ba}");
    // Subassembly blockage of the pair vanishes while A alone is blocked.
    assert!(dig.total_blockage(a) > 0.2);
    let tau_pair = dig.subassembly_blockage(&[a, b]);
    assert!(tau_pair.abs() < 1e-12, "pair blockage {tau_pair}");
}

#[test]
fn evaluation_count_matches_cost_model() {
    let asm = fixtures::sparse_row(4);
    let dig = build_fixture_dig(&asm, PartId(0), &BlockingConfig::default());
    let n = asm.len() as u64;
    let m = dig.shell_count_used() as u64;
    assert_eq!(dig.evaluations(), m * (n - 1) * (n - 2));
}

// ---------------------------------------------------------------------------
// Independent oracle: brute-force containment, randomized 10x resampling
// ---------------------------------------------------------------------------

/// Brute-force point-in-mesh: parity over every triangle, no acceleration,
/// its own ray policy.
fn oracle_point_inside(mesh: &TriMesh, pose: &Pose, p: &Point3<f64>) -> bool {
    use nalgebra::Vector3;
    let local = pose.inverse().transform_point(p);
    let dirs = [
        Vector3::new(0.577_350_3, 0.577_350_3, 0.577_350_3),
        Vector3::new(-0.301_511_3, 0.904_534_0, 0.301_511_3),
         Vector3::new(0.267_261_2, -0.534_522_5, 0.801_783_7),
    ];
    'dir: for dir in dirs {
        let mut crossings = 0u32;
        for t in 0..mesh.triangle_count() {
            let [a, b, c] = mesh.triangle_points(t);
            let e1 = b - a;
            let e2 = c - a;
            let pv = dir.cross(&e2);
            let det = e1.dot(&pv);
            if det.abs() < 1e-12 {
                continue;
            }
            let inv = 1.0 / det;
            let s = local - a;
            let u = s.dot(&pv) * inv;
            let qv = s.cross(&e1);
            let v = dir.dot(&qv) * inv;
            let t_hit = e2.dot(&qv) * inv;
            let eps = 1e-9;
            if u < -eps || v < -eps || u + v > 1.0 + eps || t_hit < -eps {
                continue;
            }
            if u < eps || v < eps || u + v > 1.0 - eps || t_hit < eps {
                continue 'dir; // grazing: try the next ray
            }
            crossings += 1;
        }
        return crossings % 2 == 1;
    }
    false
}

/// Re-sampled blocking fraction: same radii, ten times as many directions
/// drawn uniformly from a seeded generator.
fn oracle_blocking_fraction(
    shells: &ShellSet,
    cone: &FreedomCone,
    obstacle: &TriMesh,
    pose: &Pose,
    n_dirs: usize,
) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1234);
    let mut dirs = Vec::with_capacity(n_dirs);
    while dirs.len() < n_dirs {
        let v = nalgebra::Vector3::new(
            rng.random_range(-1.0..1.0f64),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if n < 1e-3 || n > 1.0 {
            continue;
        }
        let d = v / n;
        if cone.feasible(&d, 1e-6) {
            dirs.push(d);
        }
    }
    let mut w: f64 = 0.0;
    for &r in shells.radii() {
        let inside = dirs
            .iter()
            .filter(|d| oracle_point_inside(obstacle, pose, &(shells.center() + *d * r)))
            .count();
        w = w.max(inside as f64 / dirs.len() as f64);
    }
    w
}

#[test]
fn dig_matches_dense_resampling_oracle_on_tower() {
    let asm = fixtures::tower(5);
    let base = PartId(0);
    let cfg = BlockingConfig::default();
    let liaisons = detect_liaisons(&asm, default_contact_tol(&asm)).unwrap();
    let dig = InterferenceGraph::build(&asm, base, &liaisons, &cfg);

    for pi in asm.parts().iter().filter(|p| p.id != base) {
        let cone = liaisons.freedom_cone(&[pi.id], &[base]);
        let c = pi.world_centroid();
        let mut params = ShellParams::new(dig.shell_count_used(), reach_radius(&asm, pi.id));
        params.direction_samples = cfg.direction_samples;
        let shells = construct_shells(c, &cone, &params, &cfg.cone).unwrap();
        for pj in asm.parts().iter().filter(|p| p.id != base && p.id != pi.id) {
            let expect = oracle_blocking_fraction(
                &shells,
                &cone,
                &pj.mesh,
                &pj.pose,
                10 * cfg.direction_samples,
            );
            let got = dig.weight(pi.id, pj.id);
            assert!(
                (got - expect).abs() <= 0.05,
                "w({}, {}) = {got} vs oracle {expect}",
                pi.id,
                pj.id
            );
        }
    }
}

#[test]
fn dig_invariant_under_rigid_rotation() {
    let asm = fixtures::lock_pair_fixture();
    // The 0.02 entrywise tolerance is a sampling tolerance; check it at a
    // 4x lattice where cap-boundary jitter sits safely inside the band.
    let cfg = BlockingConfig {
        direction_samples: 4096,
        ..BlockingConfig::default()
    };
    let dig0 = build_fixture_dig(&asm, PartId(0), &cfg);

    let rot = UnitQuaternion::from_euler_angles(0.3, 0.6, -0.9);
    let rotated = asm.with_poses(|p| Pose::from_parts(rot * p.pose.translation, rot * p.pose.rotation));
    let dig1 = build_fixture_dig(&rotated, PartId(0), &cfg);

    for &i in dig0.index() {
        for &j in dig0.index() {
            let (w0, w1) = (dig0.weight(i, j), dig1.weight(i, j));
            assert!(
                (w0 - w1).abs() <= 0.02,
                "w({i},{j}) drifted under rotation: {w0} vs {w1}"
            );
        }
    }
}

#[test]
fn weights_stay_in_unit_interval_with_zero_diagonal() {
    for asm in [fixtures::tower(4), fixtures::lock_pair_fixture()] {
        let dig = build_fixture_dig(&asm, PartId(0), &BlockingConfig::default());
        for &i in dig.index() {
            assert_eq!(dig.weight(i, i), 0.0);
            for &j in dig.index() {
                let w = dig.weight(i, j);
                assert!((0.0..=1.0).contains(&w), "w({i},{j}) = {w}");
            }
        }
    }
}

#[test]
fn blockage_bookkeeping_identity_is_exact() {
    // tau_sub(S + p) = tau_sub(S) - sum_{i in S} w_ip + sum_{j outside S+p} w_pj
    let asm = fixtures::tower(5);
    let dig = build_fixture_dig(&asm, PartId(0), &BlockingConfig::default());
    let s = vec![PartId(1), PartId(2)];
    let p = PartId(3);
    let mut s_plus = s.clone();
    s_plus.push(p);

    let lhs = dig.subassembly_blockage(&s_plus);
    let into_p: f64 = s.iter().map(|&i| dig.weight(i, p)).sum();
    let from_p: f64 = dig
        .index()
        .iter()
        .filter(|j| !s_plus.contains(j))
        .map(|&j| dig.weight(p, j))
        .sum();
    let rhs = dig.subassembly_blockage(&s) - into_p + from_p;
    assert!((lhs - rhs).abs() < 1e-12, "identity violated: {lhs} vs {rhs}");
}

#[test]
fn subassembly_blockage_edge_cases() {
    let asm = fixtures::tower(4);
    let dig = build_fixture_dig(&asm, PartId(0), &BlockingConfig::default());
    // Singleton: the row restricted to external columns (all columns).
    let tau_single = dig.subassembly_blockage(&[PartId(2)]);
    assert!((tau_single - dig.total_blockage(PartId(2))).abs() < 1e-12);
    // All non-base parts: only base columns remain, which are zero.
    let all: Vec<PartId> = dig.index().iter().copied().filter(|&p| p != PartId(0)).collect();
    assert_eq!(dig.subassembly_blockage(&all), 0.0);
}

#[test]
fn total_blockage_row_arithmetic() {
    // Nested covers give the ball two full covers: tau = 2.0 exactly.
    let (asm, ball) = fixtures::nested_enclosures();
    let mut params = ShellParams::new(36, 7.0);
    params.max_spacing = Some(0.2);
    let shells = construct_shells(
        Point3::origin(),
        &FreedomCone::free(),
        &params,
        &ConeConfig::default(),
    )
    .unwrap();
    let ledger = CostLedger::new();
    let tau: f64 = asm
        .parts()
        .iter()
        .filter(|p| p.id != ball)
        .map(|p| blocking_fraction(&shells, &p.mesh, &p.pose, &ledger))
        .sum();
    assert_eq!(tau, 2.0);
}

#[test]
fn hollow_cube_fixture_wall_band_is_correct() {
    // Sanity for the enclosure oracle: radii inside the wall band are fully
    // contained, radii inside the cavity are fully outside.
    let cover = hollow_cube(2.0, 1.0);
    let id = Pose::identity();
    let in_wall = Point3::new(0.0, 0.0, 1.9);
    let in_cavity = Point3::new(0.0, 0.0, 0.5);
    let outside = Point3::new(0.0, 0.0, 2.5);
    assert!(crate::mesh::point_inside(&cover, &id, &in_wall));
    assert!(!crate::mesh::point_inside(&cover, &id, &in_cavity));
    assert!(!crate::mesh::point_inside(&cover, &id, &outside));
    assert!((cover.volume() - (64.0 - 8.0)).abs() < 1e-9);
}
