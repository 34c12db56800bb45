//! Discrete-time assembly-line simulation over a disassembly tree.
//!
//! Every internal tree node is one job: joining its `c` children onto a base
//! constituent takes `c - 1` unit actions, so all durations sum to `n - 1`
//! and one robot always needs exactly `n - 1` steps. A job becomes available
//! once every child job has completed (leaf children are parts, available
//! from the start). Each timestep runs an assignment phase (idle robots take
//! available jobs, deepest first, ties to the lower node id) and an execution
//! phase (every busy robot finishes one action); a job finishing in step `t`
//! unlocks its parent at step `t + 1`. Jobs are non-preemptive and stay on
//! one robot. Workpiece rotations and transfers cost nothing here.

use crate::error::{Error, Result};
use crate::planner::DisassemblyTree;

/// One unit action executed by a robot in a timestep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleEntry {
    pub timestep: u32,
    pub robot: usize,
    /// Tree node id of the job being worked.
    pub node: usize,
    /// Action index within the job, starting at 0.
    pub action: u32,
}

/// A complete simulated schedule.
#[derive(Debug, Clone)]
pub struct Schedule {
    pub robots: usize,
    pub entries: Vec<ScheduleEntry>,
    /// (node id, completion timestep) per job.
    pub completions: Vec<(usize, u32)>,
}

impl Schedule {
    /// Last completion time; 0 for an empty plan.
    pub fn makespan(&self) -> u32 {
        self.completions.iter().map(|&(_, t)| t).max().unwrap_or(0)
    }
}

/// Makespan of a schedule (time from first to last action).
pub fn makespan(schedule: &Schedule) -> u32 {
    schedule.makespan()
}

/// Per-robot-count metrics row.
#[derive(Debug, Clone, Copy)]
pub struct Metrics {
    pub robots: usize,
    pub makespan: u32,
    /// Serial-to-parallel ratio, rounded to 2 decimals.
    pub speedup: f64,
}

#[derive(Debug, Clone)]
struct JobTable {
    /// Tree node id per job.
    node: Vec<usize>,
    duration: Vec<u32>,
    /// Indices into the job table.
    predecessors: Vec<Vec<usize>>,
    depth: Vec<usize>,
}

fn job_table(tree: &DisassemblyTree) -> JobTable {
    let depths = tree.depths();
    let internal: Vec<usize> = tree
        .nodes
        .iter()
        .filter(|n| !n.is_leaf())
        .map(|n| n.id)
        .collect();
    let job_of = |node: usize| internal.iter().position(|&v| v == node);
    let mut table = JobTable {
        node: Vec::new(),
        duration: Vec::new(),
        predecessors: Vec::new(),
        depth: Vec::new(),
    };
    for &id in &internal {
        let n = tree.node(id);
        table.node.push(id);
        table.duration.push(n.children.len() as u32 - 1);
        table.predecessors.push(
            n.children
                .iter()
                .filter_map(|&c| job_of(c))
                .collect(),
        );
        table.depth.push(depths[id]);
    }
    table
}

/// Simulate the two-phase assembly line.
pub fn simulate(tree: &DisassemblyTree, robots: usize) -> Schedule {
    assert!(robots >= 1, "at least one robot");
    let jobs = job_table(tree);
    let m = jobs.node.len();

    let mut assigned: Vec<Option<usize>> = vec![None; robots]; // job per robot
    let mut done_actions: Vec<u32> = vec![0; m];
    let mut completed_at: Vec<Option<u32>> = vec![None; m];
    let mut started: Vec<bool> = vec![false; m];
    let mut entries = Vec::new();

    let mut t: u32 = 0;
    while completed_at.iter().any(|c| c.is_none()) {
        t += 1;
        debug_assert!(t as usize <= 2 * (m + 1) * (jobs.duration.iter().sum::<u32>() as usize + 1));

        // Assignment phase: a job is available when every predecessor
        // completed before this step.
        let mut available: Vec<usize> = (0..m)
            .filter(|&j| {
                !started[j]
                    && jobs.predecessors[j]
                        .iter()
                        .all(|&p| matches!(completed_at[p], Some(done) if done < t))
            })
            .collect();
        // Deepest first, ties to the lower node id.
        available.sort_by_key(|&j| (std::cmp::Reverse(jobs.depth[j]), jobs.node[j]));
        let mut next = available.into_iter();
        for r in 0..robots {
            if assigned[r].is_none() {
                if let Some(j) = next.next() {
                    assigned[r] = Some(j);
                    started[j] = true;
                }
            }
        }

        // Execution phase: every busy robot marks one action complete.
        for r in 0..robots {
            if let Some(j) = assigned[r] {
                entries.push(ScheduleEntry {
                    timestep: t,
                    robot: r,
                    node: jobs.node[j],
                    action: done_actions[j],
                });
                done_actions[j] += 1;
                if done_actions[j] == jobs.duration[j] {
                    completed_at[j] = Some(t);
                    assigned[r] = None;
                }
            }
        }
    }

    Schedule {
        robots,
        entries,
        completions: (0..m)
            .map(|j| (jobs.node[j], completed_at[j].expect("all jobs complete")))
            .collect(),
    }
}

/// Serial-to-parallel speedup, reported to two decimals.
pub fn speedup(tree: &DisassemblyTree, robots: usize) -> f64 {
    assert!(robots >= 1);
    let serial = simulate(tree, 1).makespan();
    if serial == 0 {
        return 1.0;
    }
    let parallel = simulate(tree, robots).makespan();
    round2(serial as f64 / parallel as f64)
}

pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Exact minimum makespan over all non-preemptive schedules, by exhaustive
/// branch-and-bound over start decisions. Refuses instances beyond 12 jobs.
pub fn optimal_makespan(tree: &DisassemblyTree, robots: usize) -> Result<u32> {
    assert!(robots >= 1);
    let jobs = job_table(tree);
    let m = jobs.node.len();
    if m > 12 {
        return Err(Error::TooLarge {
            jobs: m,
            limit: 12,
        });
    }
    if m == 0 {
        return Ok(0);
    }

    // Remaining critical path per job (job duration plus deepest successor
    // chain; predecessors here are children, so walk upward).
    let mut tail = vec![0u32; m];
    // Successor = the job that lists j as a predecessor.
    let successor: Vec<Option<usize>> = (0..m)
        .map(|j| (0..m).find(|&s| jobs.predecessors[s].contains(&j)))
        .collect();
    for j in 0..m {
        let mut len = 0;
        let mut cur = Some(j);
        while let Some(c) = cur {
            len += jobs.duration[c];
            cur = successor[c];
        }
        tail[j] = len;
    }

    let all_mask: u32 = (1u32 << m) - 1;
    let mut best = simulate(tree, robots).makespan(); // greedy upper bound
    let mut seen: std::collections::HashMap<(u32, Vec<(usize, u32)>), u32> =
        std::collections::HashMap::new();

    struct Ctx<'a> {
        jobs: &'a JobTable,
        robots: usize,
        all_mask: u32,
        tail: &'a [u32],
    }

    fn search(
        ctx: &Ctx,
        t: u32,
        completed: u32,
        started: u32,
        running: &[(usize, u32)], // (job, finish time)
        best: &mut u32,
        seen: &mut std::collections::HashMap<(u32, Vec<(usize, u32)>), u32>,
    ) {
        if completed == ctx.all_mask {
            *best = (*best).min(t);
            return;
        }
        // Lower bounds: critical path of any unfinished job; total work left
        // spread over the robots.
        let mut cp = 0u32;
        let mut work = 0u32;
        for j in 0..ctx.jobs.node.len() {
            if completed & (1 << j) == 0 && started & (1 << j) == 0 {
                cp = cp.max(t + ctx.tail[j]);
                work += ctx.jobs.duration[j];
            }
        }
        for &(_, finish) in running {
            work += finish - t;
            cp = cp.max(finish);
        }
        let lb = cp.max(t + work.div_ceil(ctx.robots as u32));
        if lb >= *best {
            return;
        }

        // Memo: canonical state.
        let mut canon: Vec<(usize, u32)> = running.iter().map(|&(j, f)| (j, f - t)).collect();
        canon.sort_unstable();
        if let Some(&prev) = seen.get(&(completed | started << 16, canon.clone())) {
            if prev <= t {
                return;
            }
        }
        seen.insert((completed | started << 16, canon), t);

        let available: Vec<usize> = (0..ctx.jobs.node.len())
            .filter(|&j| {
                started & (1 << j) == 0
                    && ctx.jobs.predecessors[j]
                        .iter()
                        .all(|&p| completed & (1 << p) != 0)
            })
            .collect();
        let free = ctx.robots - running.len();

        // Branch over subsets of available jobs to start now (bounded by
        // free robots), including starting none when something is running.
        let k = available.len();
        let mut subsets: Vec<u32> = (0..(1u32 << k))
            .filter(|s| (s.count_ones() as usize) <= free)
            .collect();
        // Try bigger subsets first: greedy-like descent reaches good
        // incumbents sooner.
        subsets.sort_by_key(|s| std::cmp::Reverse(s.count_ones()));
        for subset in subsets {
            if subset == 0 && running.is_empty() {
                continue; // nothing running, nothing started: deadlock
            }
            let mut next_running: Vec<(usize, u32)> = running.to_vec();
            let mut next_started = started;
            for (pos, &j) in available.iter().enumerate() {
                if subset & (1 << pos) != 0 {
                    next_started |= 1 << j;
                    next_running.push((j, t + ctx.jobs.duration[j]));
                }
            }
            // Advance to the earliest completion among running jobs.
            let next_t = next_running.iter().map(|&(_, f)| f).min().expect("nonempty");
            let mut next_completed = completed;
            let still: Vec<(usize, u32)> = next_running
                .into_iter()
                .filter(|&(j, f)| {
                    if f == next_t {
                        next_completed |= 1 << j;
                        false
                    } else {
                        true
                    }
                })
                .collect();
            search(ctx, next_t, next_completed, next_started, &still, best, seen);
        }
    }

    let ctx = Ctx {
        jobs: &jobs,
        robots,
        all_mask,
        tail: &tail,
    };
    search(&ctx, 0, 0, 0, &[], &mut best, &mut seen);
    Ok(best)
}

/// Metrics table for robot counts `1..=max_robots`.
pub fn metrics_table(tree: &DisassemblyTree, max_robots: usize) -> Vec<Metrics> {
    let serial = simulate(tree, 1).makespan();
    (1..=max_robots)
        .map(|k| {
            let mk = simulate(tree, k).makespan();
            Metrics {
                robots: k,
                makespan: mk,
                speedup: if mk == 0 { 1.0 } else { round2(serial as f64 / mk as f64) },
            }
        })
        .collect()
}
