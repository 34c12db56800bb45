//! Comparison partitioners: proximity clustering and contact-area accrual.
//!
//! Both produce candidate subassemblies that run through exactly the same
//! removal validation as the blocking-reduction method; only the grouping
//! rule differs. Fidelity is limited to what the comparison needs: seeded
//! Lloyd clustering over part centroids with disjoint clusters split into
//! liaison-connected components, and nucleus growth by dominant connecting
//! surface area.

use nalgebra::Point3;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::assembly::{Assembly, PartId};
use crate::contact::LiaisonGraph;
use crate::subassembly::{fitness_scores, nucleus_cutoff, SubIdConfig};

/// Proximity-clustering parameters.
#[derive(Debug, Clone)]
pub struct ClusterConfig {
    /// Cluster count; `None` picks `round(sqrt(n - 1))`.
    pub k: Option<usize>,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            k: None,
            max_iterations: 50,
            seed: 0,
        }
    }
}

/// Partition non-base parts by physical proximity: seeded Lloyd iterations
/// over part centroids, then each cluster is split into liaison-connected
/// components (a disjoint cluster cannot be removed as a unit). Empty
/// clusters are dropped. Components are returned sorted by smallest member.
pub fn morato_partition(
    assembly: &Assembly,
    base: PartId,
    liaisons: &LiaisonGraph,
    cfg: &ClusterConfig,
) -> Vec<Vec<PartId>> {
    let non_base: Vec<PartId> = assembly
        .ids()
        .into_iter()
        .filter(|&p| p != base)
        .collect();
    let n = non_base.len();
    if n == 0 {
        return Vec::new();
    }
    let k = cfg
        .k
        .unwrap_or_else(|| (n as f64).sqrt().round() as usize)
        .clamp(1, n);

    let centroid = |id: PartId| assembly.part(id).world_centroid();

    // Farthest-point initialization: the seed picks the first center, each
    // later center is the part centroid farthest from all chosen centers.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut shuffled = non_base.clone();
    shuffled.shuffle(&mut rng);
    let mut centers: Vec<Point3<f64>> = vec![centroid(shuffled[0])];
    while centers.len() < k {
        let far = non_base
            .iter()
            .map(|&p| centroid(p))
            .max_by(|a, b| {
                let da = centers.iter().map(|c| (a - c).norm_squared()).fold(f64::INFINITY, f64::min);
                let db = centers.iter().map(|c| (b - c).norm_squared()).fold(f64::INFINITY, f64::min);
                da.partial_cmp(&db).unwrap()
            })
            .unwrap();
        centers.push(far);
    }

    let mut assignment = vec![0usize; n];
    for _ in 0..cfg.max_iterations {
        let mut changed = false;
        for (i, &p) in non_base.iter().enumerate() {
            let c = centroid(p);
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (j, center) in centers.iter().enumerate() {
                let d = (c - center).norm_squared();
                if d < best_d - 1e-15 {
                    best = j;
                    best_d = d;
                }
            }
            if assignment[i] != best {
                assignment[i] = best;
                changed = true;
            }
        }
        for (j, center) in centers.iter_mut().enumerate() {
            let members: Vec<Point3<f64>> = non_base
                .iter()
                .enumerate()
                .filter(|(i, _)| assignment[*i] == j)
                .map(|(_, &p)| centroid(p))
                .collect();
            if !members.is_empty() {
                let sum = members
                    .iter()
                    .fold(nalgebra::Vector3::zeros(), |acc, p| acc + p.coords);
                *center = Point3::from(sum / members.len() as f64);
            }
        }
        if !changed {
            break;
        }
    }

    let mut candidates = Vec::new();
    for j in 0..k {
        let members: Vec<PartId> = non_base
            .iter()
            .enumerate()
            .filter(|(i, _)| assignment[*i] == j)
            .map(|(_, &p)| p)
            .collect();
        if members.is_empty() {
            continue;
        }
        // Repair: split disjoint clusters into connected subassemblies.
        candidates.extend(liaisons.components(&members));
    }
    candidates.sort_by_key(|c| c[0]);
    candidates
}

/// Grow subassemblies around fitness nuclei by connecting surface area: a
/// neighbor joins when its contact area with the candidate strictly exceeds
/// its contact area with everything else (base included). Unaccrued parts
/// are left for the remainder.
pub fn belhadj_partition(
    assembly: &Assembly,
    base: PartId,
    liaisons: &LiaisonGraph,
    cfg: &SubIdConfig,
) -> Vec<Vec<PartId>> {
    let state = assembly.ids();
    let scores = fitness_scores(assembly, base, liaisons, cfg);
    if scores.is_empty() {
        return Vec::new();
    }
    let nuclei = nucleus_cutoff(&scores);

    let mut consumed: Vec<PartId> = Vec::new();
    let mut candidates = Vec::new();
    for nucleus in nuclei {
        if consumed.contains(&nucleus) {
            continue;
        }
        let mut members = vec![nucleus];
        let mut evaluated = vec![nucleus];
        let mut queue: Vec<PartId> = Vec::new();
        let push_neighbors = |from: PartId, queue: &mut Vec<PartId>, evaluated: &[PartId]| {
            for nb in liaisons.neighbors(from) {
                if nb != base
                    && !evaluated.contains(&nb)
                    && !queue.contains(&nb)
                    && !consumed.contains(&nb)
                {
                    queue.push(nb);
                }
            }
        };
        push_neighbors(nucleus, &mut queue, &evaluated);

        while !queue.is_empty() {
            // Pop the neighbor with the strongest connection to the
            // candidate; ties to the lower id.
            let mut best = 0;
            for i in 1..queue.len() {
                let a_i = liaisons.contact_area_between(&[queue[i]], &members);
                let a_b = liaisons.contact_area_between(&[queue[best]], &members);
                if a_i > a_b + 1e-15 || ((a_i - a_b).abs() <= 1e-15 && queue[i] < queue[best]) {
                    best = i;
                }
            }
            let p = queue.swap_remove(best);
            evaluated.push(p);

            let rest: Vec<PartId> = state
                .iter()
                .copied()
                .filter(|&q| q != p && !members.contains(&q))
                .collect();
            let to_candidate = liaisons.contact_area_between(&[p], &members);
            let to_rest = liaisons.contact_area_between(&[p], &rest);
            if to_candidate > to_rest {
                members.push(p);
                members.sort_unstable();
                push_neighbors(p, &mut queue, &evaluated);
            }
        }
        consumed.extend(members.iter().copied());
        candidates.push(members);
    }
    candidates
}
