//! Parametric watertight test geometry.
//!
//! `box_solid` meshes any union-minus-union of axis-aligned boxes over a
//! shared rectilinear grid, which covers most constructed assemblies (plates,
//! tubs, notched blocks, hollow enclosures). Icospheres and tetrahedra cover
//! the curved and minimal cases.

use nalgebra::{Point3, Vector3};

use crate::error::Result;
use crate::mesh::TriMesh;

/// Axis-aligned box given by its min/max corners.
#[derive(Debug, Clone, Copy)]
pub struct BoxSpec {
    pub min: Point3<f64>,
    pub max: Point3<f64>,
}

impl BoxSpec {
    pub fn new(min: Point3<f64>, max: Point3<f64>) -> Self {
        assert!(
            min.x < max.x && min.y < max.y && min.z < max.z,
            "box must have positive extent"
        );
        BoxSpec { min, max }
    }

    pub fn from_corner(corner: Point3<f64>, size: Vector3<f64>) -> Self {
        BoxSpec::new(corner, corner + size)
    }

    fn contains(&self, p: &Point3<f64>) -> bool {
        p.x > self.min.x
            && p.x < self.max.x
            && p.y > self.min.y
            && p.y < self.max.y
            && p.z > self.min.z
            && p.z < self.max.z
    }
}

/// Mesh the solid `union(add) \ union(subtract)`.
///
/// All box faces must lie on the common rectilinear grid induced by the box
/// corners (automatic — the grid is derived from every corner coordinate).
/// The resulting boundary is emitted cell-face by cell-face with outward
/// winding; cavities come out as correctly oriented inner shells.
pub fn box_solid(add: &[BoxSpec], subtract: &[BoxSpec]) -> Result<TriMesh> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut zs = Vec::new();
    for b in add.iter().chain(subtract) {
        xs.extend([b.min.x, b.max.x]);
        ys.extend([b.min.y, b.max.y]);
        zs.extend([b.min.z, b.max.z]);
    }
    for axis in [&mut xs, &mut ys, &mut zs] {
        axis.sort_by(|a, b| a.partial_cmp(b).unwrap());
        axis.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    }

    let (nx, ny, nz) = (xs.len() - 1, ys.len() - 1, zs.len() - 1);
    let inside = |ix: isize, iy: isize, iz: isize| -> bool {
        if ix < 0 || iy < 0 || iz < 0 || ix >= nx as isize || iy >= ny as isize || iz >= nz as isize
        {
            return false;
        }
        let (ix, iy, iz) = (ix as usize, iy as usize, iz as usize);
        let center = Point3::new(
            0.5 * (xs[ix] + xs[ix + 1]),
            0.5 * (ys[iy] + ys[iy + 1]),
            0.5 * (zs[iz] + zs[iz + 1]),
        );
        add.iter().any(|b| b.contains(&center)) && !subtract.iter().any(|b| b.contains(&center))
    };

    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut vertex_ids = std::collections::HashMap::new();
    let mut vid = |vertices: &mut Vec<Point3<f64>>, xi: usize, yi: usize, zi: usize| -> u32 {
        *vertex_ids.entry((xi, yi, zi)).or_insert_with(|| {
            vertices.push(Point3::new(xs[xi], ys[yi], zs[zi]));
            (vertices.len() - 1) as u32
        })
    };

    let mut triangles: Vec<[u32; 3]> = Vec::new();
    // A quad [a, b, c, d] in CCW order seen from the outward normal.
    let mut emit_quad = |vertices: &mut Vec<Point3<f64>>, q: [(usize, usize, usize); 4]| {
        let ids: Vec<u32> = q
            .iter()
            .map(|&(xi, yi, zi)| vid(vertices, xi, yi, zi))
            .collect();
        triangles.push([ids[0], ids[1], ids[2]]);
        triangles.push([ids[0], ids[2], ids[3]]);
    };

    for iz in 0..=nz {
        for iy in 0..ny {
            for ix in 0..nx {
                let below = inside(ix as isize, iy as isize, iz as isize - 1);
                let above = inside(ix as isize, iy as isize, iz as isize);
                if below == above {
                    continue;
                }
                let (x0, x1, y0, y1) = (ix, ix + 1, iy, iy + 1);
                if below {
                    // Outward normal +z.
                    emit_quad(
                        &mut vertices,
                        [(x0, y0, iz), (x1, y0, iz), (x1, y1, iz), (x0, y1, iz)],
                    );
                } else {
                    emit_quad(
                        &mut vertices,
                        [(x0, y0, iz), (x0, y1, iz), (x1, y1, iz), (x1, y0, iz)],
                    );
                }
            }
        }
    }
    for iy in 0..=ny {
        for iz in 0..nz {
            for ix in 0..nx {
                let south = inside(ix as isize, iy as isize - 1, iz as isize);
                let north = inside(ix as isize, iy as isize, iz as isize);
                if south == north {
                    continue;
                }
                let (x0, x1, z0, z1) = (ix, ix + 1, iz, iz + 1);
                if south {
                    // Outward normal +y.
                    emit_quad(
                        &mut vertices,
                        [(x0, iy, z0), (x0, iy, z1), (x1, iy, z1), (x1, iy, z0)],
                    );
                } else {
                    emit_quad(
                        &mut vertices,
                        [(x0, iy, z0), (x1, iy, z0), (x1, iy, z1), (x0, iy, z1)],
                    );
                }
            }
        }
    }
    for ix in 0..=nx {
        for iz in 0..nz {
            for iy in 0..ny {
                let west = inside(ix as isize - 1, iy as isize, iz as isize);
                let east = inside(ix as isize, iy as isize, iz as isize);
                if west == east {
                    continue;
                }
                let (y0, y1, z0, z1) = (iy, iy + 1, iz, iz + 1);
                if west {
                    // Outward normal +x.
                    emit_quad(
                        &mut vertices,
                        [(ix, y0, z0), (ix, y1, z0), (ix, y1, z1), (ix, y0, z1)],
                    );
                } else {
                    emit_quad(
                        &mut vertices,
                        [(ix, y0, z0), (ix, y0, z1), (ix, y1, z1), (ix, y1, z0)],
                    );
                }
            }
        }
    }

    TriMesh::new(vertices, triangles)
}

/// Cuboid with its minimum corner at the origin.
pub fn cuboid(size: Vector3<f64>) -> TriMesh {
    box_solid(&[BoxSpec::from_corner(Point3::origin(), size)], &[])
        .expect("cuboid construction cannot fail")
}

/// Unit cube with its minimum corner at the origin.
pub fn unit_cube() -> TriMesh {
    cuboid(Vector3::new(1.0, 1.0, 1.0))
}

/// Open-topped rectangular tub: outer box minus a cavity that reaches above
/// the rim. `wall` is the side-wall thickness, `floor` the bottom thickness.
pub fn open_tub(size: Vector3<f64>, wall: f64, floor: f64) -> TriMesh {
    assert!(size.x > 2.0 * wall && size.y > 2.0 * wall && size.z > floor);
    let cavity = BoxSpec::new(
        Point3::new(wall, wall, floor),
        Point3::new(size.x - wall, size.y - wall, size.z + 1.0),
    );
    box_solid(&[BoxSpec::from_corner(Point3::origin(), size)], &[cavity])
        .expect("tub construction cannot fail")
}

/// Cube of half-extent `outer` centered at the origin with a cubic cavity of
/// half-extent `inner`; the cavity surface is an inward-facing inner shell.
pub fn hollow_cube(outer: f64, inner: f64) -> TriMesh {
    assert!(outer > inner && inner > 0.0);
    let o = Vector3::new(outer, outer, outer);
    let i = Vector3::new(inner, inner, inner);
    box_solid(
        &[BoxSpec::new(Point3::origin() - o, Point3::origin() + o)],
        &[BoxSpec::new(Point3::origin() - i, Point3::origin() + i)],
    )
    .expect("hollow cube construction cannot fail")
}

/// Plate with a corner notch: the full plate spans `size` from the origin,
/// and the notch removes the corner region nearest `(size.x, size.y, size.z)`
/// down to depth `notch.z`, leaving a floor and two walls for a resting cube.
pub fn notched_plate(size: Vector3<f64>, notch: Vector3<f64>) -> TriMesh {
    assert!(notch.x < size.x && notch.y < size.y && notch.z < size.z);
    let cut = BoxSpec::new(
        Point3::new(size.x - notch.x, size.y - notch.y, size.z - notch.z),
        Point3::new(size.x + 1.0, size.y + 1.0, size.z + 1.0),
    );
    box_solid(&[BoxSpec::from_corner(Point3::origin(), size)], &[cut])
        .expect("notched plate construction cannot fail")
}

/// Regular tetrahedron with the given edge length, centered at the origin.
pub fn tetrahedron(edge: f64) -> TriMesh {
    let s = edge / (2.0 * 2.0f64.sqrt());
    let v = [
        Point3::new(s, s, s),
        Point3::new(s, -s, -s),
        Point3::new(-s, s, -s),
        Point3::new(-s, -s, s),
    ];
    let triangles = vec![[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]];
    TriMesh::new(v.to_vec(), triangles).expect("tetrahedron construction cannot fail")
}

/// Icosphere centered at the origin: subdivided icosahedron projected onto
/// the sphere of the given radius. Subdivision 0 has 20 faces, each level
/// quadruples that.
pub fn icosphere(radius: f64, subdivisions: u32) -> TriMesh {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut vertices: Vec<Point3<f64>> = vec![
        Point3::new(-1.0, phi, 0.0),
        Point3::new(1.0, phi, 0.0),
        Point3::new(-1.0, -phi, 0.0),
        Point3::new(1.0, -phi, 0.0),
        Point3::new(0.0, -1.0, phi),
        Point3::new(0.0, 1.0, phi),
        Point3::new(0.0, -1.0, -phi),
        Point3::new(0.0, 1.0, -phi),
        Point3::new(phi, 0.0, -1.0),
        Point3::new(phi, 0.0, 1.0),
        Point3::new(-phi, 0.0, -1.0),
        Point3::new(-phi, 0.0, 1.0),
    ];
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoints = std::collections::HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mid = [0u32; 3];
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                mid[k] = *midpoints.entry(key).or_insert_with(|| {
                    let m = nalgebra::center(&vertices[a as usize], &vertices[b as usize]);
                    vertices.push(m);
                    (vertices.len() - 1) as u32
                });
            }
            next.push([f[0], mid[0], mid[2]]);
            next.push([f[1], mid[1], mid[0]]);
            next.push([f[2], mid[2], mid[1]]);
            next.push(mid);
        }
        faces = next;
    }

    for v in &mut vertices {
        *v = Point3::from(v.coords.normalize() * radius);
    }
    TriMesh::new(vertices, faces).expect("icosphere construction cannot fail")
}
