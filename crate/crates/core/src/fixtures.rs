//! Constructed demo assemblies used by tests, the acceptance suite, and the
//! bundled examples. Everything rests on the z = 0 floor plane.

use nalgebra::{Point3, Vector3};

use crate::assembly::{Assembly, Part};
use crate::mesh::Pose;
use crate::shapes::{box_solid, cuboid, notched_plate, open_tub, BoxSpec};

fn at(x: f64, y: f64, z: f64) -> Pose {
    Pose::translation_only(Vector3::new(x, y, z))
}

/// Two stacked unit cubes on the floor; the smallest interesting assembly.
pub fn two_part_stack() -> Assembly {
    Assembly::new(vec![
        Part::new(0, "lower", cuboid(Vector3::new(1.0, 1.0, 1.0)), at(0.0, 0.0, 0.0)),
        Part::new(1, "upper", cuboid(Vector3::new(1.0, 1.0, 0.5)), at(0.0, 0.0, 1.0)),
    ])
}

/// A column of `n` parts: a 3x3 base slab with `n - 1` unit cubes stacked on
/// top of its center.
pub fn tower(n: usize) -> Assembly {
    assert!(n >= 1);
    let mut parts = vec![Part::new(
        0,
        "slab",
        cuboid(Vector3::new(3.0, 3.0, 0.5)),
        at(0.0, 0.0, 0.0),
    )];
    for k in 1..n {
        parts.push(Part::new(
            k as u32,
            format!("cube{k}"),
            cuboid(Vector3::new(1.0, 1.0, 1.0)),
            at(1.0, 1.0, 0.5 + (k - 1) as f64),
        ));
    }
    Assembly::new(parts)
}

/// The cube-in-notch fixture: a cube resting in a corner recess of a plate,
/// free to translate in the +x/+y/+z octant.
pub fn notch_fixture() -> Assembly {
    let plate = notched_plate(Vector3::new(4.0, 4.0, 1.0), Vector3::new(1.0, 1.0, 0.5));
    Assembly::new(vec![
        Part::new(0, "plate", plate, at(0.0, 0.0, 0.0)),
        Part::new(1, "cube", cuboid(Vector3::new(1.0, 1.0, 1.0)), at(3.0, 3.0, 0.5)),
    ])
}

/// Lock-and-free fixture: part A sits in a tub cavity with a lid B resting
/// on both the tub rim and A's top face. A alone is locked (floor below, lid
/// above); the pair {A, B} lifts out together.
///
/// Dimensions are chosen so that the tub is the base (most volume), A is the
/// top-fitness nucleus, and B's contact with A (1.0 m²) beats B's contact
/// with the rim (0.48 m²).
pub fn lock_pair_fixture() -> Assembly {
    let tub = open_tub(Vector3::new(1.3, 1.3, 0.6), 0.1, 0.15);
    Assembly::new(vec![
        Part::new(0, "case", tub, at(0.0, 0.0, 0.0)),
        Part::new(1, "A", cuboid(Vector3::new(1.0, 1.0, 0.45)), at(0.15, 0.15, 0.15)),
        Part::new(2, "B", cuboid(Vector3::new(1.3, 1.3, 0.15)), at(0.0, 0.0, 0.6)),
    ])
}

/// Ball-in-nested-enclosures blocking fixture: a small sphere centered in a
/// hollow cube, itself centered in a larger hollow cube, with a massive
/// anchor slab far below serving as the base part. Each cover blocks the
/// ball's entire removal sphere at some shell radius, so the ball's total
/// blockage exceeds 2.
pub fn nested_enclosures() -> (Assembly, crate::assembly::PartId) {
    let ball = crate::shapes::icosphere(0.2, 1);
    let inner = crate::shapes::hollow_cube(2.0, 1.0);
    let outer = crate::shapes::hollow_cube(6.0, 3.0);
    let anchor = cuboid(Vector3::new(16.0, 16.0, 6.0));
    let asm = Assembly::new(vec![
        Part::new(0, "ball", ball, Pose::identity()),
        Part::new(1, "inner_cover", inner, Pose::identity()),
        Part::new(2, "outer_cover", outer, Pose::identity()),
        Part::new(3, "anchor", anchor, at(-8.0, -8.0, -14.0)),
    ]);
    (asm, crate::assembly::PartId(0))
}

/// Blocks seated in the corner notches of a big slab, removal cones aimed up
/// and diagonally outward so no block ever obstructs another: every
/// off-diagonal interference weight is exactly zero by construction.
/// Supports `n` in 2..=5 (slab plus up to four corner blocks).
pub fn sparse_row(n: usize) -> Assembly {
    assert!((2..=5).contains(&n), "supports 1 slab + up to 4 corner blocks");
    let side = 14.0;
    // (block corner, notch cut rectangle): each cut opens to the outside on
    // its rim sides and stops flush at the block's interior faces, leaving
    // exactly two walls and a floor touching the block.
    let spots: [((f64, f64), (f64, f64, f64, f64)); 4] = [
        ((0.0, 0.0), (-0.5, -0.5, 1.0, 1.0)),
        ((side - 1.0, side - 1.0), (side - 1.0, side - 1.0, side + 0.5, side + 0.5)),
        ((0.0, side - 1.0), (-0.5, side - 1.0, 1.0, side + 0.5)),
        ((side - 1.0, 0.0), (side - 1.0, -0.5, side + 0.5, 1.0)),
    ];
    let mut cuts = Vec::new();
    for &(_, (x0, y0, x1, y1)) in spots.iter().take(n - 1) {
        cuts.push(BoxSpec::new(
            Point3::new(x0, y0, 0.5),
            Point3::new(x1, y1, 2.0),
        ));
    }
    let slab = box_solid(
        &[BoxSpec::new(Point3::new(0.0, 0.0, 0.0), Point3::new(side, side, 1.0))],
        &cuts,
    )
    .unwrap();
    let mut parts = vec![Part::new(0, "slab", slab, at(0.0, 0.0, 0.0))];
    for (k, &((x, y), _)) in spots.iter().take(n - 1).enumerate() {
        parts.push(Part::new(
            k as u32 + 1,
            format!("block{}", k + 1),
            cuboid(Vector3::new(1.0, 1.0, 1.0)),
            at(x, y, 0.5),
        ));
    }
    Assembly::new(parts)
}

/// Compact grid: a thick slab carrying a 3x3 (or smaller) grid of unit
/// cubes. Chunky extents keep the default shell count valid, which makes
/// this the cost-model fixture.
pub fn compact_grid(n: usize) -> Assembly {
    assert!((2..=10).contains(&n));
    let mut parts = vec![Part::new(
        0,
        "slab",
        cuboid(Vector3::new(3.6, 3.6, 1.0)),
        at(0.0, 0.0, 0.0),
    )];
    for k in 0..n - 1 {
        let (row, col) = (k / 3, k % 3);
        parts.push(Part::new(
            k as u32 + 1,
            format!("cube{}", k + 1),
            cuboid(Vector3::new(1.0, 1.0, 1.0)),
            at(0.15 + 1.15 * col as f64, 0.15 + 1.15 * row as f64, 1.0),
        ));
    }
    Assembly::new(parts)
}

/// Growth-rejection fixture: a slider free to rise from an open shaft, next
/// to a plug entombed in a lipped pocket. The slider and plug touch, so the
/// plug is the slider's liaison neighbor, but absorbing the plug would lock
/// the pair (its lip blocks +z, the shaft walls block everything else).
pub fn seal_fixture() -> Assembly {
    let slab = box_solid(
        &[BoxSpec::new(Point3::new(0.0, 0.0, 0.0), Point3::new(4.0, 3.0, 1.5))],
        &[
            // Open shaft for the slider.
            BoxSpec::new(Point3::new(1.0, 1.0, 0.5), Point3::new(2.0, 2.0, 2.0)),
            // Lipped pocket for the plug (slab material covers z in [1.3, 1.5]).
            BoxSpec::new(Point3::new(2.0, 1.0, 0.5), Point3::new(3.0, 2.0, 1.3)),
        ],
    )
    .unwrap();
    let block = cuboid(Vector3::new(1.0, 1.0, 0.8));
    Assembly::new(vec![
        Part::new(0, "slab", slab, at(0.0, 0.0, 0.0)),
        Part::new(1, "slider", block.clone(), at(1.0, 1.0, 0.5)),
        Part::new(2, "plug", block, at(2.0, 1.0, 0.5)),
    ])
}

/// Fully welded fixture: every non-base part is entombed in a closed pocket
/// of the slab. No part or grouping can ever be removed.
pub fn welded_fixture() -> Assembly {
    let slab = box_solid(
        &[BoxSpec::new(Point3::new(0.0, 0.0, 0.0), Point3::new(5.0, 3.0, 1.5))],
        &[
            BoxSpec::new(Point3::new(1.0, 1.0, 0.5), Point3::new(2.0, 2.0, 1.3)),
            BoxSpec::new(Point3::new(3.0, 1.0, 0.5), Point3::new(4.0, 2.0, 1.3)),
        ],
    )
    .unwrap();
    let peg = cuboid(Vector3::new(1.0, 1.0, 0.8));
    Assembly::new(vec![
        Part::new(0, "slab", slab, at(0.0, 0.0, 0.0)),
        Part::new(1, "peg1", peg.clone(), at(1.0, 1.0, 0.5)),
        Part::new(2, "peg2", peg, at(3.0, 1.0, 0.5)),
    ])
}

/// A block inside a case whose top is closed but whose +x side is missing:
/// the block's only way out is sideways through the opening.
pub fn open_side_case() -> Assembly {
    let case = box_solid(
        &[BoxSpec::new(Point3::new(0.0, 0.0, 0.0), Point3::new(5.0, 5.0, 6.0))],
        &[
            // Interior cavity.
            BoxSpec::new(Point3::new(0.5, 0.5, 1.0), Point3::new(4.5, 4.5, 5.0)),
            // Missing +x wall and ceiling strip: a full-height side opening.
            BoxSpec::new(Point3::new(4.0, 0.5, 1.0), Point3::new(6.0, 4.5, 6.0)),
        ],
    )
    .unwrap();
    let block = cuboid(Vector3::new(1.0, 1.0, 1.0));
    Assembly::new(vec![
        Part::new(0, "case", case, at(0.0, 0.0, 0.0)),
        Part::new(1, "block", block, at(2.0, 2.0, 1.0)),
    ])
}

/// A table holding a plate in a downward-opening pocket: the plate's only
/// exit direction is straight down, where the floor waits.
pub fn floor_trap_fixture() -> Assembly {
    let table = box_solid(
        &[
            // Table top and two legs.
            BoxSpec::new(Point3::new(0.0, 0.0, 1.0), Point3::new(3.0, 3.0, 2.0)),
            BoxSpec::new(Point3::new(0.0, 0.0, 0.0), Point3::new(0.5, 3.0, 1.0)),
            BoxSpec::new(Point3::new(2.5, 0.0, 0.0), Point3::new(3.0, 3.0, 1.0)),
        ],
        &[
            // Pocket cut upward into the table top's underside.
            BoxSpec::new(Point3::new(1.25, 1.25, 0.9), Point3::new(1.75, 1.75, 1.7)),
        ],
    )
    .unwrap();
    let plate = cuboid(Vector3::new(0.5, 0.5, 0.5));
    Assembly::new(vec![
        Part::new(0, "table", table, at(0.0, 0.0, 0.0)),
        Part::new(1, "plate", plate, at(1.25, 1.25, 1.2)),
    ])
}

/// A lone sphere resting on the floor: no orientation of it is stable on a
/// flat face.
pub fn sphere_base_fixture() -> Assembly {
    let ball = crate::shapes::icosphere(0.5, 2);
    let lift = -ball.aabb().min.z;
    Assembly::new(vec![Part::new(0, "ball", ball, at(0.0, 0.0, lift))])
}

/// Chain-inducing fixture: a post on a slab under `n - 2` nested open-bottom
/// covers, none touching another. Only the outermost cover is ever
/// removable, so every planner unwinds the covers one by one and the
/// disassembly tree degenerates to a pure chain of single-part removals.
pub fn nested_covers_chain(n: usize) -> Assembly {
    assert!((3..=9).contains(&n), "slab + post + 1..=7 covers");
    let covers = n - 2;
    let side = 0.8 + 0.6 * (covers as f64 - 1.0) + 2.0;
    let slab = cuboid(Vector3::new(side, side, 0.4));
    let mut parts = vec![
        Part::new(0, "slab", slab, at(0.0, 0.0, 0.0)),
        Part::new(
            1,
            "post",
            cuboid(Vector3::new(0.4, 0.4, 0.5)),
            at(side / 2.0 - 0.2, side / 2.0 - 0.2, 0.4),
        ),
    ];
    for k in 0..covers {
        let w = 0.8 + 0.6 * k as f64;
        let h = 0.8 + 0.3 * k as f64;
        let cover = box_solid(
            &[BoxSpec::new(Point3::new(0.0, 0.0, 0.0), Point3::new(w, w, h))],
            &[BoxSpec::new(
                Point3::new(0.1, 0.1, -1.0),
                Point3::new(w - 0.1, w - 0.1, h - 0.1),
            )],
        )
        .unwrap();
        parts.push(Part::new(
            k as u32 + 2,
            format!("cover{}", k + 1),
            cover,
            at(side / 2.0 - w / 2.0, side / 2.0 - w / 2.0, 0.4),
        ));
    }
    Assembly::new(parts)
}

/// Twelve-part module-box analog: an open case holding two interior stacks
/// of three blocks, a bridge plate resting across both stacks, a two-part
/// antenna protruding above the rim from the bridge, and two loose blocks on
/// the cavity floor. The bridge-and-antenna cover must leave before either
/// stack can rise.
pub fn module_box_analog() -> Assembly {
    let case = open_tub(Vector3::new(3.0, 2.0, 1.0), 0.15, 0.15);
    let block = cuboid(Vector3::new(0.6, 0.6, 0.25));
    let bridge = cuboid(Vector3::new(2.4, 0.5, 0.15));
    let mast = cuboid(Vector3::new(0.3, 0.3, 0.3));
    let rod = cuboid(Vector3::new(0.15, 0.15, 0.5));
    let loose = cuboid(Vector3::new(0.4, 0.4, 0.3));
    Assembly::new(vec![
        Part::new(0, "case", case, at(0.0, 0.0, 0.0)),
        Part::new(1, "left1", block.clone(), at(0.3, 0.7, 0.15)),
        Part::new(2, "left2", block.clone(), at(0.3, 0.7, 0.40)),
        Part::new(3, "left3", block.clone(), at(0.3, 0.7, 0.65)),
        Part::new(4, "right1", block.clone(), at(2.1, 0.7, 0.15)),
        Part::new(5, "right2", block.clone(), at(2.1, 0.7, 0.40)),
        Part::new(6, "right3", block, at(2.1, 0.7, 0.65)),
        Part::new(7, "bridge", bridge, at(0.3, 0.75, 0.9)),
        Part::new(8, "mast", mast, at(1.35, 0.85, 1.05)),
        Part::new(9, "rod", rod, at(1.425, 0.925, 1.35)),
        Part::new(10, "loose1", loose.clone(), at(1.3, 0.2, 0.15)),
        Part::new(11, "loose2", loose, at(1.3, 1.4, 0.15)),
    ])
}
