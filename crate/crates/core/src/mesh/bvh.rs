//! Axis-aligned bounding-box hierarchy over mesh triangles.
//!
//! One BVH is built per mesh at load time, in the mesh's local frame. All
//! pairwise queries map the second operand through a relative pose, so posed
//! meshes never rebuild their trees.

use nalgebra::{Point3, Vector3};

use super::primitives::{ray_triangle, tri_tri_intersect, triangle_distance, RayHit};
use super::{Aabb, Pose, TriMesh};

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone)]
struct Node {
    aabb: Aabb,
    /// Leaf: range into `order`. Internal: `first` is the left child index,
    /// right child is `first + 1`, and `count` is zero.
    first: u32,
    count: u32,
}

impl Node {
    fn is_leaf(&self) -> bool {
        self.count > 0
    }
}

#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
}

impl Bvh {
    pub fn build(vertices: &[Point3<f64>], triangles: &[[u32; 3]]) -> Bvh {
        let tri_aabbs: Vec<Aabb> = triangles
            .iter()
            .map(|t| {
                Aabb::from_points(
                    t.iter().map(|&i| &vertices[i as usize]),
                )
            })
            .collect();
        let centroids: Vec<Point3<f64>> = tri_aabbs.iter().map(|b| b.center()).collect();
        let order: Vec<u32> = (0..triangles.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * triangles.len());
        nodes.push(Node {
            aabb: Aabb::empty(),
            first: 0,
            count: 0,
        });
        let mut bvh = Bvh { nodes, order };
        bvh.build_node(0, 0, triangles.len(), &tri_aabbs, &centroids);
        bvh
    }

    fn build_node(
        &mut self,
        node: usize,
        start: usize,
        len: usize,
        tri_aabbs: &[Aabb],
        centroids: &[Point3<f64>],
    ) {
        let mut aabb = Aabb::empty();
        for &t in &self.order[start..start + len] {
            aabb = aabb.union(&tri_aabbs[t as usize]);
        }
        if len <= LEAF_SIZE {
            self.nodes[node] = Node {
                aabb,
                first: start as u32,
                count: len as u32,
            };
            return;
        }
        // Median split along the widest centroid axis.
        let mut cmin = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut cmax = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for &t in &self.order[start..start + len] {
            cmin = cmin.inf(&centroids[t as usize]);
            cmax = cmax.sup(&centroids[t as usize]);
        }
        let span: Vector3<f64> = cmax - cmin;
        let axis = span.iamax();
        let slice = &mut self.order[start..start + len];
        slice.sort_unstable_by(|&a, &b| {
            centroids[a as usize][axis]
                .partial_cmp(&centroids[b as usize][axis])
                .unwrap()
                .then(a.cmp(&b))
        });
        let mid = len / 2;

        let left = self.nodes.len();
        self.nodes.push(Node {
            aabb: Aabb::empty(),
            first: 0,
            count: 0,
        });
        self.nodes.push(Node {
            aabb: Aabb::empty(),
            first: 0,
            count: 0,
        });
        self.nodes[node] = Node {
            aabb,
            first: left as u32,
            count: 0,
        };
        self.build_node(left, start, mid, tri_aabbs, centroids);
        self.build_node(left + 1, start + mid, len - mid, tri_aabbs, centroids);
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Triangle indices in traversal storage order (each exactly once).
    pub fn leaf_triangles(&self) -> &[u32] {
        &self.order
    }

    /// Walk leaf ranges and parent/child boxes; used by structural tests.
    pub fn validate_containment(&self) -> bool {
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let n = &self.nodes[i];
            if !n.is_leaf() {
                let (l, r) = (n.first as usize, n.first as usize + 1);
                if !n.aabb.contains(&self.nodes[l].aabb) || !n.aabb.contains(&self.nodes[r].aabb) {
                    return false;
                }
                stack.push(l);
                stack.push(r);
            }
        }
        true
    }

    /// Count ray crossings for a parity test. Returns `None` when any hit is
    /// degenerate (grazes an edge/vertex), signalling the caller to re-cast.
    pub fn ray_parity(&self, mesh: &TriMesh, origin: &Point3<f64>, dir: &Vector3<f64>) -> Option<u32> {
        let mut crossings = 0u32;
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let n = &self.nodes[i];
            if !ray_aabb(origin, dir, &n.aabb) {
                continue;
            }
            if n.is_leaf() {
                for &t in &self.order[n.first as usize..(n.first + n.count) as usize] {
                    let [a, b, c] = mesh.triangle_points(t as usize);
                    match ray_triangle(origin, dir, &a, &b, &c) {
                        RayHit::Hit(_) => crossings += 1,
                        RayHit::Degenerate => return None,
                        RayHit::Miss => {}
                    }
                }
            } else {
                stack.push(n.first as usize);
                stack.push(n.first as usize + 1);
            }
        }
        Some(crossings)
    }

    /// Parity count that treats grazing hits as crossings; last-resort path
    /// when every retry direction grazed.
    pub fn ray_parity_forced(
        &self,
        mesh: &TriMesh,
        origin: &Point3<f64>,
        dir: &Vector3<f64>,
    ) -> u32 {
        let mut crossings = 0u32;
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let n = &self.nodes[i];
            if !ray_aabb(origin, dir, &n.aabb) {
                continue;
            }
            if n.is_leaf() {
                for &t in &self.order[n.first as usize..(n.first + n.count) as usize] {
                    let [a, b, c] = mesh.triangle_points(t as usize);
                    if !matches!(ray_triangle(origin, dir, &a, &b, &c), RayHit::Miss) {
                        crossings += 1;
                    }
                }
            } else {
                stack.push(n.first as usize);
                stack.push(n.first as usize + 1);
            }
        }
        crossings
    }

    /// Any triangle of `a` intersecting any triangle of `b`, with `rel`
    /// mapping b-local points into a-local space.
    pub fn pair_intersects(a: &TriMesh, b: &TriMesh, rel: &Pose) -> bool {
        let (ta, tb) = (a.bvh(), b.bvh());
        let mut stack = vec![(0usize, 0usize)];
        while let Some((i, j)) = stack.pop() {
            let na = &ta.nodes[i];
            let nb = &tb.nodes[j];
            if !na.aabb.intersects(&nb.aabb.transformed(rel)) {
                continue;
            }
            match (na.is_leaf(), nb.is_leaf()) {
                (true, true) => {
                    for &x in &ta.order[na.first as usize..(na.first + na.count) as usize] {
                        let t1 = a.triangle_points(x as usize);
                        for &y in &tb.order[nb.first as usize..(nb.first + nb.count) as usize] {
                            let [p, q, r] = b.triangle_points(y as usize);
                            let t2 = [
                                rel.transform_point(&p),
                                rel.transform_point(&q),
                                rel.transform_point(&r),
                            ];
                            if tri_tri_intersect(&t1, &t2) {
                                return true;
                            }
                        }
                    }
                }
                (false, _) => {
                    stack.push((na.first as usize, j));
                    stack.push((na.first as usize + 1, j));
                }
                (true, false) => {
                    stack.push((i, nb.first as usize));
                    stack.push((i, nb.first as usize + 1));
                }
            }
        }
        false
    }

    /// Triangle index pairs within `tol`, in a-local space.
    pub fn pair_proximity(a: &TriMesh, b: &TriMesh, rel: &Pose, tol: f64) -> Vec<(u32, u32)> {
        let (ta, tb) = (a.bvh(), b.bvh());
        let mut out = Vec::new();
        let mut stack = vec![(0usize, 0usize)];
        while let Some((i, j)) = stack.pop() {
            let na = &ta.nodes[i];
            let nb = &tb.nodes[j];
            if !na.aabb.inflated(tol).intersects(&nb.aabb.transformed(rel)) {
                continue;
            }
            match (na.is_leaf(), nb.is_leaf()) {
                (true, true) => {
                    for &x in &ta.order[na.first as usize..(na.first + na.count) as usize] {
                        let t1 = a.triangle_points(x as usize);
                        for &y in &tb.order[nb.first as usize..(nb.first + nb.count) as usize] {
                            let [p, q, r] = b.triangle_points(y as usize);
                            let t2 = [
                                rel.transform_point(&p),
                                rel.transform_point(&q),
                                rel.transform_point(&r),
                            ];
                            if triangle_distance(&t1, &t2) <= tol {
                                out.push((x, y));
                            }
                        }
                    }
                }
                (false, _) => {
                    stack.push((na.first as usize, j));
                    stack.push((na.first as usize + 1, j));
                }
                (true, false) => {
                    stack.push((i, nb.first as usize));
                    stack.push((i, nb.first as usize + 1));
                }
            }
        }
        out
    }
}

impl Bvh {
    /// Minimum distance from a point to the mesh surface (local frame).
    pub fn point_distance(&self, mesh: &TriMesh, p: &Point3<f64>) -> f64 {
        let mut best = f64::INFINITY;
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let n = &self.nodes[i];
            if aabb_point_distance_sq(&n.aabb, p) >= best * best {
                continue;
            }
            if n.is_leaf() {
                for &t in &self.order[n.first as usize..(n.first + n.count) as usize] {
                    let [a, b, c] = mesh.triangle_points(t as usize);
                    let d2 = super::primitives::point_triangle_distance_sq(p, &a, &b, &c);
                    if d2 < best * best {
                        best = d2.sqrt();
                    }
                }
            } else {
                stack.push(n.first as usize);
                stack.push(n.first as usize + 1);
            }
        }
        best
    }
}

fn aabb_point_distance_sq(aabb: &Aabb, p: &Point3<f64>) -> f64 {
    let mut d2 = 0.0;
    for k in 0..3 {
        let v = p[k];
        if v < aabb.min[k] {
            d2 += (aabb.min[k] - v) * (aabb.min[k] - v);
        } else if v > aabb.max[k] {
            d2 += (v - aabb.max[k]) * (v - aabb.max[k]);
        }
    }
    d2
}

/// Slab test; robust to zero direction components via IEEE inf semantics.
fn ray_aabb(origin: &Point3<f64>, dir: &Vector3<f64>, aabb: &Aabb) -> bool {
    let mut tmin = 0.0f64;
    let mut tmax = f64::INFINITY;
    for k in 0..3 {
        let inv = 1.0 / dir[k];
        let mut t0 = (aabb.min[k] - origin[k]) * inv;
        let mut t1 = (aabb.max[k] - origin[k]) * inv;
        if inv < 0.0 {
            std::mem::swap(&mut t0, &mut t1);
        }
        if t0.is_nan() || t1.is_nan() {
            // Origin exactly on a slab plane with zero direction component;
            // the other axes decide.
            continue;
        }
        tmin = tmin.max(t0);
        tmax = tmax.min(t1);
        if tmax < tmin {
            return false;
        }
    }
    true
}
