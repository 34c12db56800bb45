use super::*;
use crate::assembly::{Assembly, Part};
use crate::mesh::Pose;
use crate::sampling::solid_angle_of;
use crate::shapes::{notched_plate, unit_cube};
use nalgebra::{UnitQuaternion, Vector3};

fn stacked_cubes() -> Assembly {
    Assembly::new(vec![
        Part::new(0, "lower", unit_cube(), Pose::identity()),
        Part::new(
            1,
            "upper",
            unit_cube(),
            Pose::translation_only(Vector3::new(0.0, 0.0, 1.0)),
        ),
    ])
}

/// Fig-style notch fixture: a cube resting in a corner recess of a plate,
/// touching the recess floor and both walls.
fn notch_assembly() -> Assembly {
    let plate = notched_plate(Vector3::new(4.0, 4.0, 1.0), Vector3::new(1.0, 1.0, 0.5));
    Assembly::new(vec![
        Part::new(0, "plate", plate, Pose::identity()),
        Part::new(
            1,
            "cube",
            unit_cube(),
            Pose::translation_only(Vector3::new(3.0, 3.0, 0.5)),
        ),
    ])
}

#[test]
fn stacked_cubes_have_one_full_face_liaison() {
    let asm = stacked_cubes();
    let graph = detect_liaisons(&asm, default_contact_tol(&asm)).unwrap();
    assert_eq!(graph.edges().len(), 1);
    let e = &graph.edges()[0];
    assert!((e.contact_area - 1.0).abs() < 0.05);
    assert_eq!(e.normals_a_to_b.len(), 1);
    assert!((e.normals_a_to_b[0] - Vector3::z()).norm() < 1e-9);
}

#[test]
fn separated_cubes_have_no_liaisons() {
    let asm = Assembly::new(vec![
        Part::new(0, "a", unit_cube(), Pose::identity()),
        Part::new(
            1,
            "b",
            unit_cube(),
            Pose::translation_only(Vector3::new(5.0, 0.0, 0.0)),
        ),
    ]);
    let graph = detect_liaisons(&asm, default_contact_tol(&asm)).unwrap();
    assert!(graph.edges().is_empty());
}

#[test]
fn overlapping_cubes_are_rejected() {
    let asm = Assembly::new(vec![
        Part::new(0, "a", unit_cube(), Pose::identity()),
        Part::new(
            1,
            "b",
            unit_cube(),
            Pose::translation_only(Vector3::new(0.5, 0.0, 0.0)),
        ),
    ]);
    match detect_liaisons(&asm, 1e-4) {
        Err(crate::error::Error::Interpenetration { .. }) => {}
        other => panic!("expected Interpenetration, got {other:?}"),
    }
}

#[test]
fn notch_contact_has_three_normal_clusters() {
    let asm = notch_assembly();
    let graph = detect_liaisons(&asm, default_contact_tol(&asm)).unwrap();
    assert_eq!(graph.edges().len(), 1);
    assert!(graph.edges()[0].normals_a_to_b.len() >= 3);
}

#[test]
fn contact_normals_for_stack_and_notch() {
    let stack = stacked_cubes();
    let g = detect_liaisons(&stack, default_contact_tol(&stack)).unwrap();
    let ns = g.contact_normals(&[PartId(1)], &[PartId(0)]);
    assert_eq!(ns.len(), 1);
    assert!((ns[0] - Vector3::z()).norm() < 1e-9);

    let notch = notch_assembly();
    let g = detect_liaisons(&notch, default_contact_tol(&notch)).unwrap();
    let ns = g.contact_normals(&[PartId(1)], &[PartId(0)]);
    assert_eq!(ns.len(), 3);
    for expect in [Vector3::x(), Vector3::y(), Vector3::z()] {
        assert!(
            ns.iter().any(|n| (n - expect).norm() < 1e-9),
            "missing {expect:?} in {ns:?}"
        );
    }

    // No contact crossing the boundary: empty list.
    let far = Assembly::new(vec![
        Part::new(0, "a", unit_cube(), Pose::identity()),
        Part::new(
            1,
            "b",
            unit_cube(),
            Pose::translation_only(Vector3::new(5.0, 0.0, 0.0)),
        ),
    ]);
    let g = detect_liaisons(&far, 1e-4).unwrap();
    assert!(g.contact_normals(&[PartId(1)], &[PartId(0)]).is_empty());
}

#[test]
fn notch_cone_is_an_octant() {
    let asm = notch_assembly();
    let g = detect_liaisons(&asm, default_contact_tol(&asm)).unwrap();
    let cone = g.freedom_cone(&[PartId(1)], &[PartId(0)]);
    let cfg = ConeConfig::default();
    assert!(!cone.is_locked(&cfg));
    assert_eq!(cone.dof_class(&cfg), DofClass::Cone);

    // Octant solid angle pi/2 sr within 2%, measured by direction sampling.
    let measured = solid_angle_of(100_000, |d| cone.feasible(d, cfg.eps_ang));
    let expect = std::f64::consts::FRAC_PI_2;
    assert!(
        (measured - expect).abs() / expect < 0.02,
        "octant solid angle {measured} vs {expect}"
    );
}

#[test]
fn table_block_cone_is_a_half_space() {
    let asm = stacked_cubes();
    let g = detect_liaisons(&asm, default_contact_tol(&asm)).unwrap();
    let cone = g.freedom_cone(&[PartId(1)], &[PartId(0)]);
    let cfg = ConeConfig::default();
    assert_eq!(cone.dof_class(&cfg), DofClass::HalfSpace);
    // Feasible set is the closed upper hemisphere.
    let measured = solid_angle_of(100_000, |d| cone.feasible(d, cfg.eps_ang));
    let expect = 2.0 * std::f64::consts::PI;
    assert!((measured - expect).abs() / expect < 0.02);
}

/// Independent lock oracle: dense randomized direction sampling, ten times
/// denser than the implementation's lattice and drawn from a different
/// generator entirely.
fn oracle_locked(cone: &FreedomCone, eps: f64) -> bool {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    for _ in 0..20_480 {
        let d = loop {
            let v = Vector3::new(
                rng.random_range(-1.0..1.0f64),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let n = v.norm();
            if n > 1e-3 && n <= 1.0 {
                break v / n;
            }
        };
        if cone.feasible(&d, eps) {
            return false;
        }
    }
    true
}

#[test]
fn lock_detection_cases() {
    let cfg = ConeConfig::default();

    let free = FreedomCone::free();
    assert!(!free.is_locked(&cfg));
    assert_eq!(free.dof_class(&cfg), DofClass::Free);

    // Positive span of all six axis directions: locked. Any unit d has some
    // component of magnitude >= 1/sqrt(3), violating the opposite normal.
    let six = FreedomCone::from_normals(vec![
        Vector3::x(),
        -Vector3::x(),
        Vector3::y(),
        -Vector3::y(),
        Vector3::z(),
        -Vector3::z(),
    ]);
    assert!(six.is_locked(&cfg));
    assert!(oracle_locked(&six, cfg.eps_ang));
    assert_eq!(six.dof_class(&cfg), DofClass::Locked);

    let octant = FreedomCone::from_normals(vec![Vector3::x(), Vector3::y(), Vector3::z()]);
    assert!(!octant.is_locked(&cfg));
    assert!(!oracle_locked(&octant, cfg.eps_ang));
}

#[test]
fn peg_in_blind_hole_under_cap_is_locked() {
    use crate::shapes::{box_solid, BoxSpec};
    use nalgebra::Point3;
    // Block with a blind square pocket, a peg filling it exactly, and a cap
    // plate resting over the pocket mouth.
    let block = box_solid(
        &[BoxSpec::new(Point3::new(0.0, 0.0, 0.0), Point3::new(3.0, 3.0, 2.0))],
        &[BoxSpec::new(Point3::new(1.0, 1.0, 1.0), Point3::new(2.0, 2.0, 2.5))],
    )
    .unwrap();
    let asm = Assembly::new(vec![
        Part::new(0, "block", block, Pose::identity()),
        Part::new(
            1,
            "peg",
            unit_cube(),
            Pose::translation_only(Vector3::new(1.0, 1.0, 1.0)),
        ),
        Part::new(
            2,
            "cap",
            crate::shapes::cuboid(Vector3::new(2.0, 2.0, 0.5)),
            Pose::translation_only(Vector3::new(0.5, 0.5, 2.0)),
        ),
    ]);
    let g = detect_liaisons(&asm, default_contact_tol(&asm)).unwrap();
    let cone = g.freedom_cone(&[PartId(1)], &[PartId(0), PartId(2)]);
    // Six opposing constraint directions: +-x, +-y from the pocket walls,
    // +z from the pocket floor, -z from the cap.
    assert!(cone.constraint_normals().len() >= 6);
    let cfg = ConeConfig::default();
    assert!(cone.is_locked(&cfg));
    assert!(oracle_locked(&cone, cfg.eps_ang));
}

#[test]
fn representative_directions_order_and_count() {
    let cfg = ConeConfig::default();

    let single = FreedomCone::from_normals(vec![Vector3::z()]);
    let dirs = single.representative_directions(4, &cfg).unwrap();
    assert!((dirs[0] - Vector3::z()).norm() < 1e-12, "most interior is the normal itself");

    let octant = FreedomCone::from_normals(vec![Vector3::x(), Vector3::y(), Vector3::z()]);
    let dirs = octant.representative_directions(4, &cfg).unwrap();
    let diag = Vector3::new(1.0, 1.0, 1.0).normalize();
    let angle = dirs[0].dot(&diag).clamp(-1.0, 1.0).acos();
    assert!(angle < 5.0f64.to_radians(), "first direction {:?}", dirs[0]);

    // Narrow slot: only the +z candidate survives, so asking for many
    // directions returns fewer.
    let slot = FreedomCone::from_normals(vec![
        Vector3::x(),
        -Vector3::x(),
        Vector3::y(),
        -Vector3::y(),
        Vector3::z(),
    ]);
    let dirs = slot.representative_directions(16, &cfg).unwrap();
    assert!(dirs.len() < 16);
    assert!(dirs.iter().all(|d| slot.feasible(d, cfg.eps_ang)));

    let locked = FreedomCone::from_normals(vec![Vector3::z(), -Vector3::z(), Vector3::x(), -Vector3::x(), Vector3::y(), -Vector3::y()]);
    assert!(locked.representative_directions(4, &cfg).is_err());
}

#[test]
fn cone_constraints_obey_contact_symmetry() {
    let asm = notch_assembly();
    let g = detect_liaisons(&asm, default_contact_tol(&asm)).unwrap();
    let forward = g.freedom_cone(&[PartId(1)], &[PartId(0)]);
    let backward = g.freedom_cone(&[PartId(0)], &[PartId(1)]);
    assert_eq!(
        forward.constraint_normals().len(),
        backward.constraint_normals().len()
    );
    for n in forward.constraint_normals() {
        assert!(
            backward
                .constraint_normals()
                .iter()
                .any(|m| (n + m).norm() < 1e-9),
            "no negated counterpart for {n:?}"
        );
    }
}

#[test]
fn rotating_the_assembly_rotates_the_cone() {
    let asm = notch_assembly();
    let rot = UnitQuaternion::from_euler_angles(0.7, -0.3, 1.9);
    let rotated = asm.with_poses(|p| {
        Pose::from_parts(rot * p.pose.translation, rot * p.pose.rotation)
    });

    let tol = default_contact_tol(&asm);
    let g0 = detect_liaisons(&asm, tol).unwrap();
    let g1 = detect_liaisons(&rotated, tol).unwrap();
    assert_eq!(g0.edges().len(), g1.edges().len());

    let cfg = ConeConfig::default();
    let c0 = g0.freedom_cone(&[PartId(1)], &[PartId(0)]);
    let c1 = g1.freedom_cone(&[PartId(1)], &[PartId(0)]);
    assert_eq!(c0.dof_class(&cfg), c1.dof_class(&cfg));
    assert_eq!(c0.is_locked(&cfg), c1.is_locked(&cfg));
    for n in c0.constraint_normals() {
        let rn = rot * n;
        assert!(
            c1.constraint_normals().iter().any(|m| (m - rn).norm() < 1e-6),
            "rotated constraint {rn:?} missing"
        );
    }
}

#[test]
fn liaison_detection_is_monotone_in_tolerance() {
    // Gaps of 2e-4 and 2e-3 between three aligned cubes.
    let asm = Assembly::new(vec![
        Part::new(0, "a", unit_cube(), Pose::identity()),
        Part::new(
            1,
            "b",
            unit_cube(),
            Pose::translation_only(Vector3::new(1.0 + 2e-4, 0.0, 0.0)),
        ),
        Part::new(
            2,
            "c",
            unit_cube(),
            Pose::translation_only(Vector3::new(2.0 + 2e-4 + 2e-3, 0.0, 0.0)),
        ),
    ]);
    let tols = [1e-4, 5e-4, 5e-3];
    let mut previous: Vec<(PartId, PartId)> = Vec::new();
    let mut counts = Vec::new();
    for tol in tols {
        let g = detect_liaisons(&asm, tol).unwrap();
        let edges: Vec<(PartId, PartId)> = g.edges().iter().map(|e| (e.a, e.b)).collect();
        for e in &previous {
            assert!(edges.contains(e), "edge {e:?} vanished as tol grew");
        }
        counts.push(edges.len());
        previous = edges;
    }
    assert_eq!(counts, vec![0, 1, 2]);
}

#[test]
fn components_and_connectivity() {
    let asm = Assembly::new(vec![
        Part::new(0, "a", unit_cube(), Pose::identity()),
        Part::new(
            1,
            "b",
            unit_cube(),
            Pose::translation_only(Vector3::new(0.0, 0.0, 1.0)),
        ),
        Part::new(
            2,
            "c",
            unit_cube(),
            Pose::translation_only(Vector3::new(4.0, 0.0, 0.0)),
        ),
    ]);
    let g = detect_liaisons(&asm, 1e-4).unwrap();
    assert!(g.is_connected(&[PartId(0), PartId(1)]));
    assert!(!g.is_connected(&[PartId(0), PartId(2)]));
    let comps = g.components(&[PartId(0), PartId(1), PartId(2)]);
    assert_eq!(comps, vec![vec![PartId(0), PartId(1)], vec![PartId(2)]]);
}
