//! Subassembly identification by blocking reduction.
//!
//! The base part (largest volume) anchors the remainder. The other parts are
//! graded for fitness as subassembly nuclei; the highest-fitness parts grow
//! candidate subassemblies by accruing liaison neighbors whose addition does
//! not increase the candidate's total blockage, with automatic acceptance
//! when an addition frees a locked candidate and automatic rejection when it
//! locks one. Candidates above the acceptance threshold fold back into the
//! remainder.

use std::collections::BTreeSet;

use crate::assembly::{Assembly, PartId};
use crate::blocking::InterferenceGraph;
use crate::contact::{ConeConfig, LiaisonGraph};
use crate::error::{Error, Result};

/// Thresholds and fitness weights for subassembly identification.
#[derive(Debug, Clone)]
pub struct SubIdConfig {
    /// Acceptance threshold on a candidate's total blockage.
    pub f_accept: f64,
    /// Fitness weight of liaison degree.
    pub alpha: f64,
    /// Fitness weight of surface area.
    pub beta: f64,
    /// Fitness weight of volume.
    pub gamma: f64,
}

impl Default for SubIdConfig {
    fn default() -> Self {
        SubIdConfig {
            f_accept: 0.85,
            alpha: 1.0 / 3.0,
            beta: 1.0 / 3.0,
            gamma: 1.0 / 3.0,
        }
    }
}

impl SubIdConfig {
    pub fn validate(&self) -> Result<()> {
        if self.f_accept < 0.0 {
            return Err(Error::InvalidInput("f_accept cannot be negative".into()));
        }
        if (self.alpha + self.beta + self.gamma - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(
                "fitness weights must sum to 1".into(),
            ));
        }
        Ok(())
    }
}

/// A grown candidate subassembly.
#[derive(Debug, Clone)]
pub struct CandidateSubassembly {
    /// Sorted member ids; always excludes the base and induces a connected
    /// liaison subgraph.
    pub members: Vec<PartId>,
    pub nucleus: PartId,
    pub tau_sub: f64,
    pub locked: bool,
    pub accepted: bool,
}

/// Result of one identification pass: accepted candidates plus the remainder
/// (which always contains the base).
#[derive(Debug, Clone)]
pub struct IdentifyOutcome {
    pub candidates: Vec<CandidateSubassembly>,
    pub remainder: Vec<PartId>,
}

/// The part with the most volume; ties break to the lowest id.
pub fn select_base(assembly: &Assembly) -> PartId {
    assert!(!assembly.is_empty());
    let mut best = assembly.parts()[0].id;
    let mut best_vol = assembly.parts()[0].mesh.volume();
    for p in &assembly.parts()[1..] {
        let v = p.mesh.volume();
        if v > best_vol {
            best = p.id;
            best_vol = v;
        }
    }
    best
}

/// Nucleus fitness of every non-base part, sorted by descending score with
/// ties broken toward the lower id. Each score is a normalized weighted sum
/// of liaison degree, surface area, and volume, so the best part in every
/// dimension scores 1.
pub fn fitness_scores(
    assembly: &Assembly,
    base: PartId,
    liaisons: &LiaisonGraph,
    cfg: &SubIdConfig,
) -> Vec<(PartId, f64)> {
    let non_base: Vec<&crate::assembly::Part> = assembly
        .parts()
        .iter()
        .filter(|p| p.id != base)
        .collect();
    let max_deg = non_base
        .iter()
        .map(|p| liaisons.degree(p.id))
        .max()
        .unwrap_or(0) as f64;
    let max_area = non_base
        .iter()
        .map(|p| p.mesh.surface_area())
        .fold(0.0, f64::max);
    let max_vol = non_base
        .iter()
        .map(|p| p.mesh.volume())
        .fold(0.0, f64::max);
    let norm = |v: f64, max: f64| if max > 0.0 { v / max } else { 0.0 };

    let mut scores: Vec<(PartId, f64)> = non_base
        .iter()
        .map(|p| {
            let s = cfg.alpha * norm(liaisons.degree(p.id) as f64, max_deg)
                + cfg.beta * norm(p.mesh.surface_area(), max_area)
                + cfg.gamma * norm(p.mesh.volume(), max_vol);
            (p.id, s)
        })
        .collect();
    scores.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    scores
}

/// Split a descending score list at its largest consecutive gap; everything
/// above the gap is a nucleus. Ties between equal gaps break to the earlier
/// (higher-score) gap, so a uniform list yields a single nucleus.
pub fn nucleus_cutoff(scores: &[(PartId, f64)]) -> Vec<PartId> {
    assert!(!scores.is_empty());
    if scores.len() == 1 {
        return vec![scores[0].0];
    }
    let mut cut = 1;
    let mut best_gap = f64::NEG_INFINITY;
    for k in 1..scores.len() {
        let gap = scores[k - 1].1 - scores[k].1;
        if gap > best_gap {
            best_gap = gap;
            cut = k;
        }
    }
    scores[..cut].iter().map(|(id, _)| *id).collect()
}

/// Grow a candidate around `nucleus` by blocking reduction.
///
/// The queue holds the nucleus's liaison neighbors ordered by how strongly
/// each blocks the nucleus (descending, ties to the lower id). A popped part
/// is accepted when it frees a locked candidate, rejected when it locks the
/// candidate, and otherwise accepted iff the candidate's total blockage does
/// not increase. Accepted parts enqueue their own unvisited neighbors.
/// Parts in `unavailable` (assigned to earlier candidates or consumed by
/// failed ones) are skipped. Growth stops at `n - 2` members (but pairs are
/// always allowed) so the remainder keeps the base company.
pub fn grow_subassembly(
    nucleus: PartId,
    dig: &InterferenceGraph,
    liaisons: &LiaisonGraph,
    state: &[PartId],
    unavailable: &BTreeSet<PartId>,
    cone_cfg: &ConeConfig,
) -> CandidateSubassembly {
    let base = dig.base();
    let n = state.len();
    let cap = (n.saturating_sub(2)).max(2);

    let complement = |members: &[PartId]| -> Vec<PartId> {
        state
            .iter()
            .copied()
            .filter(|p| !members.contains(p))
            .collect()
    };
    let is_locked = |members: &[PartId]| -> bool {
        liaisons
            .freedom_cone(members, &complement(members))
            .is_locked(cone_cfg)
    };

    let mut members = vec![nucleus];
    let mut locked = is_locked(&members);
    let mut tau = dig.subassembly_blockage(&members);

    let mut evaluated: BTreeSet<PartId> = BTreeSet::new();
    evaluated.insert(nucleus);
    let mut queued: BTreeSet<PartId> = BTreeSet::new();
    let mut queue: Vec<(f64, PartId)> = Vec::new();

    let enqueue = |queue: &mut Vec<(f64, PartId)>,
                   queued: &mut BTreeSet<PartId>,
                   evaluated: &BTreeSet<PartId>,
                   from: PartId,
                   liaisons: &LiaisonGraph| {
        for nb in liaisons.neighbors(from) {
            if nb != base
                && state.contains(&nb)
                && !evaluated.contains(&nb)
                && !queued.contains(&nb)
                && !unavailable.contains(&nb)
            {
                queued.insert(nb);
                queue.push((dig.weight(nucleus, nb), nb));
            }
        }
    };
    enqueue(&mut queue, &mut queued, &evaluated, nucleus, liaisons);

    while !queue.is_empty() && members.len() < cap {
        // Pop the most-blocking neighbor; ties to the lower id.
        let mut best = 0;
        for k in 1..queue.len() {
            let (wk, pk) = queue[k];
            let (wb, pb) = queue[best];
            if wk > wb || (wk == wb && pk < pb) {
                best = k;
            }
        }
        let (_, p) = queue.swap_remove(best);
        queued.remove(&p);
        if evaluated.contains(&p) || unavailable.contains(&p) {
            continue;
        }
        evaluated.insert(p);

        let mut trial = members.clone();
        trial.push(p);
        trial.sort_unstable();
        let trial_locked = is_locked(&trial);
        let trial_tau = dig.subassembly_blockage(&trial);

        let accept = if locked && !trial_locked {
            true // frees a locked candidate
        } else if !locked && trial_locked {
            false // would lock the candidate
        } else {
            trial_tau <= tau + 1e-12
        };
        if accept {
            members = trial;
            locked = trial_locked;
            tau = trial_tau;
            enqueue(&mut queue, &mut queued, &evaluated, p, liaisons);
        }
    }

    CandidateSubassembly {
        members,
        nucleus,
        tau_sub: tau,
        locked,
        accepted: false,
    }
}

/// One identification pass over the current state.
///
/// Nuclei are processed in descending fitness; grown candidates are accepted
/// when unlocked and within the blockage threshold, and their parts leave the
/// pool either way (a failed candidate's parts merge into the remainder).
/// Errors with [`Error::DegenerateState`] when nothing was accepted and every
/// non-base part is singleton-locked.
pub fn identify_subassemblies(
    assembly: &Assembly,
    dig: &InterferenceGraph,
    liaisons: &LiaisonGraph,
    cfg: &SubIdConfig,
    cone_cfg: &ConeConfig,
) -> Result<IdentifyOutcome> {
    assert!(assembly.len() >= 2, "identification needs at least 2 parts");
    cfg.validate()?;
    let base = dig.base();
    let state = assembly.ids();

    let scores = fitness_scores(assembly, base, liaisons, cfg);
    let nuclei = nucleus_cutoff(&scores);

    let mut consumed: BTreeSet<PartId> = BTreeSet::new();
    let mut candidates: Vec<CandidateSubassembly> = Vec::new();
    for nucleus in nuclei {
        if consumed.contains(&nucleus) {
            continue;
        }
        let mut cand = grow_subassembly(nucleus, dig, liaisons, &state, &consumed, cone_cfg);
        cand.accepted = !cand.locked && cand.tau_sub <= cfg.f_accept;
        for &m in &cand.members {
            consumed.insert(m);
        }
        if cand.accepted {
            candidates.push(cand);
        }
    }

    let remainder: Vec<PartId> = state
        .iter()
        .copied()
        .filter(|&p| p == base || !candidates.iter().any(|c| c.members.contains(&p)))
        .collect();

    if candidates.is_empty() {
        let all_locked = state.iter().filter(|&&p| p != base).all(|&p| {
            let others: Vec<PartId> = state.iter().copied().filter(|&q| q != p).collect();
            liaisons.freedom_cone(&[p], &others).is_locked(cone_cfg)
        });
        if all_locked {
            return Err(Error::DegenerateState);
        }
    }

    Ok(IdentifyOutcome {
        candidates,
        remainder,
    })
}
