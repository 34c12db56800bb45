//! Low-level triangle primitives: ray casts, exact triangle-triangle
//! intersection, and minimum-distance computations.

use nalgebra::{Point3, Vector3};

/// Tolerance band around edges/vertices within which a ray hit is considered
/// grazing and the cast is retried along another direction.
const GRAZE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RayHit {
    Miss,
    /// Clean crossing at parameter `t > 0`.
    Hit(f64),
    /// Hit too close to an edge, vertex, or the ray origin to trust parity.
    Degenerate,
}

/// Möller–Trumbore ray/triangle intersection with grazing detection.
pub fn ray_triangle(
    origin: &Point3<f64>,
    dir: &Vector3<f64>,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> RayHit {
    let e1 = b - a;
    let e2 = c - a;
    let p = dir.cross(&e2);
    let det = e1.dot(&p);
    let scale = e1.norm().max(e2.norm());
    if det.abs() < 1e-12 * scale * scale {
        // Ray parallel to the triangle plane. Only degenerate if the origin
        // lies essentially in the plane and could graze the triangle.
        let n = e1.cross(&e2);
        let dist = (origin - a).dot(&n) / n.norm();
        if dist.abs() < GRAZE_EPS * scale.max(1.0) {
            return RayHit::Degenerate;
        }
        return RayHit::Miss;
    }
    let inv_det = 1.0 / det;
    let s = origin - a;
    let u = s.dot(&p) * inv_det;
    let q = s.cross(&e1);
    let v = dir.dot(&q) * inv_det;
    let t = e2.dot(&q) * inv_det;

    let eps = GRAZE_EPS;
    if u < -eps || v < -eps || u + v > 1.0 + eps {
        return RayHit::Miss;
    }
    if t < -eps {
        return RayHit::Miss;
    }
    // Inside the tolerance band around the boundary or the origin: grazing.
    if u < eps || v < eps || u + v > 1.0 - eps || t < eps {
        return RayHit::Degenerate;
    }
    RayHit::Hit(t)
}

// ---------------------------------------------------------------------------
// Triangle-triangle intersection (Möller 1997 interval test)
// ---------------------------------------------------------------------------

/// Exact-ish triangle/triangle intersection; touching counts as intersecting.
pub fn tri_tri_intersect(t1: &[Point3<f64>; 3], t2: &[Point3<f64>; 3]) -> bool {
    let [v0, v1, v2] = *t1;
    let [u0, u1, u2] = *t2;

    // Plane of T1: n1 . x + d1 = 0
    let e1 = v1 - v0;
    let e2 = v2 - v0;
    let n1 = e1.cross(&e2);
    let d1 = -n1.dot(&v0.coords);

    let du0 = n1.dot(&u0.coords) + d1;
    let du1 = n1.dot(&u1.coords) + d1;
    let du2 = n1.dot(&u2.coords) + d1;

    let eps1 = 1e-12 * n1.norm().max(1e-300);
    let (du0, du1, du2) = (zero_snap(du0, eps1), zero_snap(du1, eps1), zero_snap(du2, eps1));
    if du0 > 0.0 && du1 > 0.0 && du2 > 0.0 {
        return false;
    }
    if du0 < 0.0 && du1 < 0.0 && du2 < 0.0 {
        return false;
    }

    // Plane of T2
    let f1 = u1 - u0;
    let f2 = u2 - u0;
    let n2 = f1.cross(&f2);
    let d2 = -n2.dot(&u0.coords);

    let dv0 = n2.dot(&v0.coords) + d2;
    let dv1 = n2.dot(&v1.coords) + d2;
    let dv2 = n2.dot(&v2.coords) + d2;

    let eps2 = 1e-12 * n2.norm().max(1e-300);
    let (dv0, dv1, dv2) = (zero_snap(dv0, eps2), zero_snap(dv1, eps2), zero_snap(dv2, eps2));
    if dv0 > 0.0 && dv1 > 0.0 && dv2 > 0.0 {
        return false;
    }
    if dv0 < 0.0 && dv1 < 0.0 && dv2 < 0.0 {
        return false;
    }

    if du0 == 0.0 && du1 == 0.0 && du2 == 0.0 {
        return coplanar_tri_tri(&n1, t1, t2);
    }

    // Direction of the plane-plane intersection line.
    let dir = n1.cross(&n2);
    let max_axis = dir.iamax();
    let project = |p: &Point3<f64>| p.coords[max_axis];

    let (i1a, i1b) = interval_on_line(
        project(&v0),
        project(&v1),
        project(&v2),
        dv0,
        dv1,
        dv2,
    );
    let (i2a, i2b) = interval_on_line(
        project(&u0),
        project(&u1),
        project(&u2),
        du0,
        du1,
        du2,
    );

    let (lo1, hi1) = (i1a.min(i1b), i1a.max(i1b));
    let (lo2, hi2) = (i2a.min(i2b), i2a.max(i2b));
    lo1 <= hi2 && lo2 <= hi1
}

fn zero_snap(d: f64, eps: f64) -> f64 {
    if d.abs() < eps {
        0.0
    } else {
        d
    }
}

/// Interval of the triangle's intersection with the line, projected to the
/// dominant axis. Signed distances decide which edges cross the plane.
fn interval_on_line(p0: f64, p1: f64, p2: f64, d0: f64, d1: f64, d2: f64) -> (f64, f64) {
    let crossing = |pa: f64, pb: f64, da: f64, db: f64| pa + (pb - pa) * (da / (da - db));
    // Group the vertex that lies alone on one side of the plane.
    if d0 * d1 > 0.0 {
        // 2 is alone (or on-plane)
        (crossing(p0, p2, d0, d2), crossing(p1, p2, d1, d2))
    } else if d0 * d2 > 0.0 {
        (crossing(p0, p1, d0, d1), crossing(p2, p1, d2, d1))
    } else if d1 * d2 > 0.0 || d0 != 0.0 {
        (crossing(p1, p0, d1, d0), crossing(p2, p0, d2, d0))
    } else if d1 != 0.0 {
        (crossing(p1, p0, d1, d0), crossing(p1, p2, d1, d2))
    } else if d2 != 0.0 {
        (crossing(p2, p0, d2, d0), crossing(p2, p1, d2, d1))
    } else {
        // Fully on-plane; handled by the coplanar branch upstream, but a
        // caller passing snapped zeros lands here: the whole projection.
        (p0.min(p1).min(p2), p0.max(p1).max(p2))
    }
}

fn coplanar_tri_tri(n: &Vector3<f64>, t1: &[Point3<f64>; 3], t2: &[Point3<f64>; 3]) -> bool {
    // Project onto the dominant axis plane.
    let ax = n.iamax();
    let (i, j) = match ax {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let p1: Vec<[f64; 2]> = t1.iter().map(|p| [p.coords[i], p.coords[j]]).collect();
    let p2: Vec<[f64; 2]> = t2.iter().map(|p| [p.coords[i], p.coords[j]]).collect();

    for a in 0..3 {
        for b in 0..3 {
            if segments_intersect_2d(p1[a], p1[(a + 1) % 3], p2[b], p2[(b + 1) % 3]) {
                return true;
            }
        }
    }
    point_in_tri_2d(p1[0], &p2) || point_in_tri_2d(p2[0], &p1)
}

fn orient_2d(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_intersect_2d(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let d1 = orient_2d(c, d, a);
    let d2 = orient_2d(c, d, b);
    let d3 = orient_2d(a, b, c);
    let d4 = orient_2d(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |o: f64, p: [f64; 2], q: [f64; 2], r: [f64; 2]| {
        o == 0.0
            && r[0] >= p[0].min(q[0])
            && r[0] <= p[0].max(q[0])
            && r[1] >= p[1].min(q[1])
            && r[1] <= p[1].max(q[1])
    };
    on(d1, c, d, a) || on(d2, c, d, b) || on(d3, a, b, c) || on(d4, a, b, d)
}

fn point_in_tri_2d(p: [f64; 2], tri: &[[f64; 2]]) -> bool {
    let d1 = orient_2d(tri[0], tri[1], p);
    let d2 = orient_2d(tri[1], tri[2], p);
    let d3 = orient_2d(tri[2], tri[0], p);
    let has_neg = d1 < 0.0 || d2 < 0.0 || d3 < 0.0;
    let has_pos = d1 > 0.0 || d2 > 0.0 || d3 > 0.0;
    !(has_neg && has_pos)
}

// ---------------------------------------------------------------------------
// Distances
// ---------------------------------------------------------------------------

/// Squared distance from a point to a triangle (Ericson, Real-Time Collision
/// Detection §5.1.5).
pub fn point_triangle_distance_sq(
    p: &Point3<f64>,
    a: &Point3<f64>,
    b: &Point3<f64>,
    c: &Point3<f64>,
) -> f64 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;

    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return ap.norm_squared();
    }

    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return bp.norm_squared();
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return (ap - ab * v).norm_squared();
    }

    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return cp.norm_squared();
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return (ap - ac * w).norm_squared();
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (bp - (c - b) * w).norm_squared();
    }

    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (ap - ab * v - ac * w).norm_squared()
}

/// Squared distance between two segments (Ericson §5.1.9).
fn segment_segment_distance_sq(
    p1: &Point3<f64>,
    q1: &Point3<f64>,
    p2: &Point3<f64>,
    q2: &Point3<f64>,
) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);

    let (s, t);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        return r.norm_squared();
    }
    if a <= f64::EPSILON {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= f64::EPSILON {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s_ = if denom != 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t_ = (b * s_ + f) / e;
            if t_ < 0.0 {
                t_ = 0.0;
                s_ = (-c / a).clamp(0.0, 1.0);
            } else if t_ > 1.0 {
                t_ = 1.0;
                s_ = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s_;
            t = t_;
        }
    }
    let c1 = p1 + d1 * s;
    let c2 = p2 + d2 * t;
    (c2 - c1).norm_squared()
}

/// Minimum distance between two triangles; 0 when they intersect.
pub fn triangle_distance(t1: &[Point3<f64>; 3], t2: &[Point3<f64>; 3]) -> f64 {
    if tri_tri_intersect(t1, t2) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for i in 0..3 {
        let (p1, q1) = (t1[i], t1[(i + 1) % 3]);
        for j in 0..3 {
            let (p2, q2) = (t2[j], t2[(j + 1) % 3]);
            best = best.min(segment_segment_distance_sq(&p1, &q1, &p2, &q2));
        }
    }
    for p in t1 {
        best = best.min(point_triangle_distance_sq(p, &t2[0], &t2[1], &t2[2]));
    }
    for p in t2 {
        best = best.min(point_triangle_distance_sq(p, &t1[0], &t1[1], &t1[2]));
    }
    best.sqrt()
}
