//! Colorings and the state sum
//!
//! `|X| = (D²)^{-a} Σ_φ ∏_e dim φ(e) ∏_T |T^φ|`
//!
//! over admissible edge colorings φ, with `a` the number of vertices.
//!
//! The sum is contracted edge by edge along a fixed elimination order. The
//! running state is the coloring of the "frontier" (colored edges that still
//! meet an incomplete tetrahedron), so the work is exponential in the
//! frontier width rather than in the number of edges. Tetrahedron weights
//! are multiplied in when their last edge is colored; faces are checked for
//! admissibility as soon as they are complete.

use std::collections::HashMap;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{relative_deviation, QuantumParams, SixJKey};
use crate::analysis::{skeletons, validate, AnalysisError, GammaSignature, Validation};
use crate::moves::{random_walk_with, MoveError, MoveWeights};
use crate::perm::face_slots;
use crate::tri::Triangulation;

type StateMap<V> = HashMap<u128, V, rustc_hash::FxBuildHasher>;

/// Default cap on DP transitions (state × color pairs).
pub const DEFAULT_MAX_TRANSITIONS: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateSumError {
    #[error("complex is not closed")]
    NotClosed,
    #[error("complex is not a pseudomanifold: {0}")]
    Invalid(String),
    #[error("state sum too large: {0}")]
    Overflow(String),
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Position of edges of a tetrahedron in a 6j key (AB, BC, AC, CD, AD, BD)
/// with A..D the slots 0..3, as indices into [`EDGE_SLOTS`].
const KEY_EDGES: [usize; 6] = [0, 3, 1, 5, 2, 4];

/// An edge coloring. Every simple object is self-dual, so all link circles
/// of an edge (in both orientations) carry the edge's color.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Coloring {
    pub per_edge: Vec<usize>,
}

impl Coloring {
    /// The per-circle view: `(edge, circle index) → color`.
    pub fn per_circle(&self, t: &Triangulation) -> Vec<((usize, usize), usize)> {
        let mut out = Vec::new();
        for (e, info) in t.edge_links().iter().enumerate() {
            for c in 0..info.circles.len() + info.arcs.len() {
                out.push(((e, c), self.per_edge[e]));
            }
        }
        out
    }
}

fn tet_key(t: &Triangulation, tet: usize, color: impl Fn(usize) -> usize) -> SixJKey {
    SixJKey(KEY_EDGES.map(|ei| color(t.edge_of(tet, ei))))
}

/// `|T^φ|`: the 6j-symbol of the tetrahedron's edge colors read in the slot
/// order A, B, C, D = 0, 1, 2, 3.
pub fn tet_weight(t: &Triangulation, tet: usize, phi: &Coloring, p: &QuantumParams) -> Complex64 {
    p.sixj_unchecked(&tet_key(t, tet, |e| phi.per_edge[e]))
}

fn face_edges(t: &Triangulation, f: usize) -> [usize; 3] {
    let (tet, face) = t.face_slots(f)[0];
    let s = face_slots(face);
    [
        t.edge_of(tet, crate::perm::edge_index(s[0], s[1])),
        t.edge_of(tet, crate::perm::edge_index(s[1], s[2])),
        t.edge_of(tet, crate::perm::edge_index(s[0], s[2])),
    ]
}

/// Elimination order and per-step bookkeeping shared by the DP and the
/// depth-first enumerator.
#[derive(Clone, Debug)]
struct Plan {
    order: Vec<usize>,
    /// For each step, the faces and tetrahedra completed by it.
    faces_done: Vec<Vec<[usize; 3]>>,
    tets_done: Vec<Vec<usize>>,
    /// Frontier after each step.
    live: Vec<Vec<usize>>,
}

impl Plan {
    /// Greedy orders from several starting edges, cheapest first.
    fn candidates(t: &Triangulation) -> Vec<Plan> {
        let ne = t.num_edges();
        let nt = t.num_tetrahedra();
        let mut tets_of: Vec<Vec<usize>> = vec![Vec::new(); ne];
        for tet in 0..nt {
            for ei in 0..6 {
                let e = t.edge_of(tet, ei);
                if tets_of[e].last() != Some(&tet) && !tets_of[e].contains(&tet) {
                    tets_of[e].push(tet);
                }
            }
        }
        let tet_edges: Vec<Vec<usize>> = (0..nt)
            .map(|tet| {
                let mut v: Vec<usize> = (0..6).map(|ei| t.edge_of(tet, ei)).collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect();

        let starts: Vec<usize> = if ne <= 64 {
            (0..ne).collect()
        } else {
            (0..16).map(|i| i * ne / 16).collect()
        };
        let mut orders: Vec<(f64, Vec<usize>)> = starts
            .iter()
            .flat_map(|&s| (0..GREEDY_VARIANTS).map(move |v| (s, v)))
            .map(|(s, v)| greedy_order(ne, s, v, &tets_of, &tet_edges))
            .collect();
        orders.sort_by(|a, b| a.0.total_cmp(&b.0));
        orders.dedup_by(|a, b| a.1 == b.1);
        orders
            .into_iter()
            .map(|(_, order)| Plan::from_order(t, order, &tets_of, &tet_edges))
            .collect()
    }

    /// The candidate with the smallest estimated cost.
    fn new(t: &Triangulation) -> Plan {
        Plan::candidates(t).swap_remove(0)
    }

    /// The candidate that needs the fewest transitions in a two-color,
    /// weight-free run of the DP; state counts there track those of the
    /// real sum closely and cost a small fraction of it.
    fn for_state_sum(t: &Triangulation) -> Plan {
        let mut candidates = Plan::candidates(t);
        if candidates.len() == 1 {
            return candidates.swap_remove(0);
        }
        let mut best: Option<(u64, usize)> = None;
        for (i, plan) in candidates.iter().enumerate() {
            if plan.slots() > 128 {
                continue;
            }
            let cap = best.map_or(PROBE_CAP, |b| b.0);
            if let Some(cost) = probe_transitions(t, plan, cap) {
                if best.map_or(true, |b| cost < b.0) {
                    best = Some((cost, i));
                }
            }
        }
        candidates.swap_remove(best.map_or(0, |b| b.1))
    }

    fn from_order(t: &Triangulation, order: Vec<usize>, tets_of: &[Vec<usize>], tet_edges: &[Vec<usize>]) -> Plan {
        let ne = t.num_edges();
        let nt = t.num_tetrahedra();
        let mut pos = vec![0usize; ne];
        for (i, &e) in order.iter().enumerate() {
            pos[e] = i;
        }
        let mut faces_done = vec![Vec::new(); ne];
        for f in 0..t.num_faces() {
            let fe = face_edges(t, f);
            let last = fe.iter().map(|&e| pos[e]).max().expect("three edges");
            faces_done[last].push(fe);
        }
        let mut tets_done = vec![Vec::new(); ne];
        let mut tet_last = vec![0usize; nt];
        for tet in 0..nt {
            let last = tet_edges[tet].iter().map(|&e| pos[e]).max().expect("six edges");
            tets_done[last].push(tet);
            tet_last[tet] = last;
        }
        // an edge stays live until the last step completing one of its tets
        let mut dies = vec![0usize; ne];
        for e in 0..ne {
            dies[e] = tets_of[e].iter().map(|&tet| tet_last[tet]).max().unwrap_or(pos[e]);
        }
        let live = (0..ne)
            .map(|step| {
                order[..=step]
                    .iter()
                    .copied()
                    .filter(|&e| dies[e] > step)
                    .collect()
            })
            .collect();
        Plan {
            order,
            faces_done,
            tets_done,
            live,
        }
    }

    fn max_width(&self) -> usize {
        self.live.iter().map(|l| l.len()).max().unwrap_or(0)
    }

    /// State slots needed: the previous frontier plus the edge being colored.
    fn slots(&self) -> usize {
        std::iter::once(0)
            .chain(self.live.iter().map(|l| l.len()))
            .take(self.live.len())
            .map(|w| w + 1)
            .max()
            .unwrap_or(0)
    }
}

/// Tie-breaking rules tried for the greedy order.
const GREEDY_VARIANTS: usize = 3;

/// Transition cap for one order probe.
const PROBE_CAP: u64 = 20_000_000;

/// Transitions of the DP along `plan` with colors {0, 1} and the level-3
/// admissibility rule (even sum, not all odd), or `None` past `cap`.
fn probe_transitions(t: &Triangulation, plan: &Plan, cap: u64) -> Option<u64> {
    let steps = compile(t, plan, 1);
    let admissible = |a: u128, b: u128, c: u128| (a + b + c) % 2 == 0 && a + b + c < 3;
    let mut cur: Vec<u128> = vec![0];
    let mut seen: rustc_hash::FxHashSet<u128> = Default::default();
    let mut used = 0u64;
    for step in &steps {
        used += 2 * cur.len() as u64;
        if used > cap {
            return None;
        }
        seen.clear();
        let mut next = Vec::with_capacity(cur.len());
        for &state in &cur {
            let read = |src: Src, c: u128| match src {
                Src::New => c,
                Src::Old(shift) => (state >> shift) & 1,
            };
            for c in 0..2u128 {
                if step.faces.iter().all(|f| admissible(read(f[0], c), read(f[1], c), read(f[2], c))) {
                    let mut key = state & step.keep;
                    if let Some(shift) = step.new_shift {
                        key |= c << shift;
                    }
                    if seen.insert(key) {
                        next.push(key);
                    }
                }
            }
        }
        cur = next;
    }
    Some(used)
}

/// Greedy elimination order from `start`: repeatedly color the edge that
/// leaves the smallest frontier, preferring edges that complete more
/// tetrahedra. Returns the order and its cost `Σ 2^{frontier}`.
fn greedy_order(
    ne: usize,
    start: usize,
    variant: usize,
    tets_of: &[Vec<usize>],
    tet_edges: &[Vec<usize>],
) -> (f64, Vec<usize>) {
    let mut colored = vec![false; ne];
    let mut missing: Vec<usize> = tet_edges.iter().map(|v| v.len()).collect();
    // open tets per edge: tets containing it that are not complete
    let mut open: Vec<usize> = tets_of.iter().map(|v| v.len()).collect();
    let mut live: Vec<bool> = vec![false; ne];
    let mut width = 0usize;
    let mut order = Vec::with_capacity(ne);
    let mut cost = 0.0;
    let mut next = Some(start);
    while order.len() < ne {
        let e = match next.take() {
            Some(e) => e,
            None => {
                let mut best: Option<((isize, isize, usize), usize)> = None;
                for c in 0..ne {
                    if colored[c] {
                        continue;
                    }
                    // edges that would die: those whose open tets all complete
                    let mut completes = Vec::new();
                    for &tet in &tets_of[c] {
                        if missing[tet] == 1 {
                            completes.push(tet);
                        }
                    }
                    let mut dying: Vec<usize> = Vec::new();
                    for &tet in &completes {
                        for &x in &tet_edges[tet] {
                            if x != c && live[x] && !dying.contains(&x) {
                                let closes = tets_of[x].iter().filter(|t| completes.contains(t)).count();
                                if closes == open[x] {
                                    dying.push(x);
                                }
                            }
                        }
                    }
                    let self_live = completes.len() < tets_of[c].len();
                    let new_width = width as isize + self_live as isize - dying.len() as isize;
                    let touched = tets_of[c].iter().filter(|&&tet| missing[tet] < tet_edges[tet].len()).count();
                    let opened = tets_of[c].len() - touched;
                    let key = match variant {
                        0 => (new_width, -(completes.len() as isize) - touched as isize, c),
                        1 => (new_width + opened as isize, -(completes.len() as isize), c),
                        _ => (-(completes.len() as isize), new_width + opened as isize, c),
                    };
                    if best.as_ref().map_or(true, |(k, _)| key < *k) {
                        best = Some((key, c));
                    }
                }
                best.expect("uncolored edge remains").1
            }
        };
        colored[e] = true;
        order.push(e);
        live[e] = true;
        width += 1;
        for &tet in &tets_of[e] {
            missing[tet] -= 1;
            if missing[tet] == 0 {
                for &x in &tet_edges[tet] {
                    open[x] -= 1;
                    if open[x] == 0 && live[x] {
                        live[x] = false;
                        width -= 1;
                    }
                }
            }
        }
        if tets_of[e].is_empty() && live[e] {
            live[e] = false;
            width -= 1;
        }
        cost += (width as f64).exp2();
    }
    (cost, order)
}

#[derive(Clone, Debug, Serialize)]
pub struct StateSumResult {
    pub value: Complex64,
    /// Number of vertex classes `a`.
    pub vertices: usize,
    pub edges: usize,
    /// Colorings whose faces are all admissible.
    pub colorings: u128,
    /// Partial colorings discarded by a face admissibility check.
    pub pruned: u64,
    /// Largest frontier in the elimination order.
    pub frontier: usize,
    /// Worker threads used.
    pub workers: usize,
    pub wall_time_secs: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct StateSumOptions {
    pub jobs: usize,
    pub max_transitions: u64,
}

impl Default for StateSumOptions {
    fn default() -> Self {
        StateSumOptions {
            jobs: 1,
            max_transitions: DEFAULT_MAX_TRANSITIONS,
        }
    }
}

fn require_closed(t: &Triangulation) -> Result<(), StateSumError> {
    match validate(t) {
        Validation::ClosedPseudomanifold => Ok(()),
        Validation::PseudomanifoldWithBoundary { .. } => Err(StateSumError::NotClosed),
        Validation::Invalid { reason } => Err(StateSumError::Invalid(reason)),
    }
}

/// Where a color is read from during one DP step.
#[derive(Clone, Copy, Debug)]
enum Src {
    Old(u32),
    New,
}

struct CompiledStep {
    faces: Vec<[Src; 3]>,
    tets: Vec<[Src; 6]>,
    /// Bits of the state that stay live after the step.
    keep: u128,
    /// Where the new edge's color is stored, if it stays live.
    new_shift: Option<u32>,
}

/// Each live edge keeps a fixed slot of `bits` bits for as long as it is
/// live; slots are reused lowest-first, so `max_width` slots suffice.
fn compile(t: &Triangulation, plan: &Plan, bits: u32) -> Vec<CompiledStep> {
    let mut steps = Vec::with_capacity(plan.order.len());
    let mut slot_of: HashMap<usize, u32> = HashMap::new();
    let mut free: std::collections::BTreeSet<u32> = (0..plan.slots() as u32).collect();
    let slot_mask = |slot: u32| ((1u128 << bits) - 1) << (slot * bits);
    for (s, &e) in plan.order.iter().enumerate() {
        let new_slot = free.pop_first().expect("frontier fits its slots");
        slot_of.insert(e, new_slot);
        let src = |x: usize| -> Src {
            if x == e {
                Src::New
            } else {
                Src::Old(slot_of[&x] * bits)
            }
        };
        let faces = plan.faces_done[s].iter().map(|f| f.map(src)).collect();
        let tets = plan.tets_done[s]
            .iter()
            .map(|&tet| KEY_EDGES.map(|ei| src(t.edge_of(tet, ei))))
            .collect();
        let mut keep = 0u128;
        let mut new_shift = None;
        for &x in &plan.live[s] {
            if x == e {
                new_shift = Some(new_slot * bits);
            } else {
                keep |= slot_mask(slot_of[&x]);
            }
        }
        // release the slots of edges that just died
        let before: Vec<usize> = if s == 0 { Vec::new() } else { plan.live[s - 1].clone() };
        for x in before.into_iter().chain([e]) {
            if !plan.live[s].contains(&x) {
                if let Some(slot) = slot_of.remove(&x) {
                    free.insert(slot);
                }
            }
        }
        steps.push(CompiledStep {
            faces,
            tets,
            keep,
            new_shift,
        });
    }
    steps
}

struct Tables {
    nc: usize,
    qdim: Vec<Complex64>,
    admissible: Vec<bool>,
}

impl Tables {
    fn new(p: &QuantumParams) -> Tables {
        let nc = p.num_colors();
        let mut admissible = vec![false; nc * nc * nc];
        for i in 0..nc {
            for j in 0..nc {
                for k in 0..nc {
                    admissible[(i * nc + j) * nc + k] = p.admissible(i, j, k);
                }
            }
        }
        Tables {
            nc,
            qdim: (0..nc).map(|i| p.qdim_unchecked(i)).collect(),
            admissible,
        }
    }
}

/// One DP state: packed frontier colors, summed weight, coloring count.
type Entry = (u128, Complex64, u128);

/// Minimum states per parallel chunk; smaller steps run inline.
const MIN_CHUNK: usize = 4096;

/// Expands a run of states by one edge, in state order then color order,
/// handing each surviving transition to `emit`. Returns the pruned count.
fn expand(
    states: &[Entry],
    step: &CompiledStep,
    bits: u32,
    p: &QuantumParams,
    tables: &Tables,
    mut emit: impl FnMut(u128, Complex64, u128),
) -> u64 {
    let mask: u128 = (1u128 << bits) - 1;
    let nc = tables.nc;
    let mut pruned = 0u64;
    for &(state, w, n) in states {
        let read = |src: Src, c: usize| match src {
            Src::New => c,
            Src::Old(shift) => ((state >> shift) & mask) as usize,
        };
        'color: for c in 0..nc {
            for f in &step.faces {
                let (a, b, d) = (read(f[0], c), read(f[1], c), read(f[2], c));
                if !tables.admissible[(a * nc + b) * nc + d] {
                    pruned += 1;
                    continue 'color;
                }
            }
            let mut weight = w * tables.qdim[c];
            for tet in &step.tets {
                weight *= p.sixj_unchecked(&SixJKey(tet.map(|src| read(src, c))));
            }
            let mut key = state & step.keep;
            if let Some(shift) = step.new_shift {
                key |= (c as u128) << shift;
            }
            emit(key, weight, n);
        }
    }
    pruned
}

/// Accumulates transitions into the next frontier, keeping first-seen order.
struct Merger {
    index: StateMap<usize>,
    next: Vec<Entry>,
}

impl Merger {
    fn with_capacity(n: usize) -> Merger {
        Merger {
            index: StateMap::with_capacity_and_hasher(n, Default::default()),
            next: Vec::with_capacity(n),
        }
    }

    fn add(&mut self, key: u128, w: Complex64, n: u128) {
        match self.index.entry(key) {
            std::collections::hash_map::Entry::Occupied(o) => {
                let slot = &mut self.next[*o.get()];
                slot.1 += w;
                slot.2 += n;
            }
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(self.next.len());
                self.next.push((key, w, n));
            }
        }
    }
}

/// Runs the frontier DP. Chunks of each step may be expanded in parallel,
/// but contributions are merged in sequential order, so the floating-point
/// result is independent of the number of workers.
fn run_dp(
    steps: &[CompiledStep],
    bits: u32,
    p: &QuantumParams,
    tables: &Tables,
    pool: Option<&rayon::ThreadPool>,
    cap: u64,
) -> Result<(Complex64, u128, u64), StateSumError> {
    let nc = tables.nc;
    let mut cur: Vec<Entry> = vec![(0, Complex64::new(1.0, 0.0), 1)];
    let mut pruned = 0u64;
    let mut used = 0u64;
    for step in steps {
        used += (cur.len() * nc) as u64;
        if used > cap {
            return Err(StateSumError::Overflow(format!(
                "more than {cap} transitions; raise the cap or simplify the triangulation"
            )));
        }
        let mut merger = Merger::with_capacity(cur.len());
        match pool {
            Some(pool) if cur.len() >= 2 * MIN_CHUNK => {
                let chunk = cur.len().div_ceil(pool.current_num_threads() * 4).max(MIN_CHUNK);
                let outputs: Vec<(Vec<Entry>, u64)> = pool.install(|| {
                    cur.par_chunks(chunk)
                        .map(|c| {
                            let mut out = Vec::with_capacity(c.len() * nc);
                            let pr = expand(c, step, bits, p, tables, |k, w, n| out.push((k, w, n)));
                            (out, pr)
                        })
                        .collect()
                });
                for (out, pr) in outputs {
                    pruned += pr;
                    for (k, w, n) in out {
                        merger.add(k, w, n);
                    }
                }
            }
            _ => pruned += expand(&cur, step, bits, p, tables, |k, w, n| merger.add(k, w, n)),
        }
        cur = merger.next;
    }
    let (value, colorings) = cur
        .iter()
        .find(|e| e.0 == 0)
        .map(|e| (e.1, e.2))
        .unwrap_or((Complex64::new(0.0, 0.0), 0));
    Ok((value, colorings, pruned))
}

/// Evaluates the state sum with default options and `jobs` worker threads.
pub fn state_sum(t: &Triangulation, p: &QuantumParams, jobs: usize) -> Result<StateSumResult, StateSumError> {
    state_sum_with(
        t,
        p,
        &StateSumOptions {
            jobs,
            ..Default::default()
        },
    )
}

pub fn state_sum_with(
    t: &Triangulation,
    p: &QuantumParams,
    opts: &StateSumOptions,
) -> Result<StateSumResult, StateSumError> {
    require_closed(t)?;
    let started = Instant::now();
    let nc = p.num_colors();
    let bits = (usize::BITS - (nc - 1).leading_zeros()).max(1);
    let plan = Plan::for_state_sum(t);
    let width = plan.max_width();
    if plan.slots() as u32 * bits > 128 {
        return Err(StateSumError::Overflow(format!(
            "frontier of {width} edges (plus the edge being colored) does not fit the 128-bit state"
        )));
    }
    log::debug!(
        "state sum: {} tets, {} edges, frontier {width}, {nc} colors",
        t.num_tetrahedra(),
        t.num_edges()
    );
    let steps = compile(t, &plan, bits);
    let tables = Tables::new(p);

    let pool = if opts.jobs > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(opts.jobs)
                .build()
                .map_err(|e| StateSumError::Overflow(format!("thread pool: {e}")))?,
        )
    } else {
        None
    };
    let (total, colorings, pruned) = run_dp(&steps, bits, p, &tables, pool.as_ref(), opts.max_transitions)?;
    let a = t.num_vertices() as i32;
    let value = total * p.rank_squared().powi(-a);
    Ok(StateSumResult {
        value,
        vertices: t.num_vertices(),
        edges: t.num_edges(),
        colorings,
        pruned,
        frontier: width,
        workers: opts.jobs.max(1),
        wall_time_secs: started.elapsed().as_secs_f64(),
    })
}

/// Depth-first enumeration of admissible colorings, yielding each with its
/// unnormalized weight `∏_e dim ∏_T |T^φ|`.
pub struct ColoringIter<'a> {
    t: &'a Triangulation,
    p: &'a QuantumParams,
    plan: Plan,
    colors: Vec<usize>,
    // next color to try at each depth
    stack: Vec<usize>,
    done: bool,
}

pub fn enumerate_colorings<'a>(
    t: &'a Triangulation,
    p: &'a QuantumParams,
) -> Result<ColoringIter<'a>, StateSumError> {
    require_closed(t)?;
    let plan = Plan::new(t);
    Ok(ColoringIter {
        t,
        p,
        colors: vec![0; t.num_edges()],
        stack: vec![0],
        done: t.num_edges() == 0,
        plan,
    })
}

impl<'a> ColoringIter<'a> {
    fn faces_ok(&self, depth: usize) -> bool {
        self.plan.faces_done[depth]
            .iter()
            .all(|f| self.p.admissible(self.colors[f[0]], self.colors[f[1]], self.colors[f[2]]))
    }
}

impl<'a> Iterator for ColoringIter<'a> {
    type Item = (Coloring, Complex64);

    fn next(&mut self) -> Option<Self::Item> {
        let nc = self.p.num_colors();
        let depth_max = self.plan.order.len();
        while !self.done {
            let depth = self.stack.len() - 1;
            let c = self.stack[depth];
            if c >= nc {
                self.stack.pop();
                if self.stack.is_empty() {
                    self.done = true;
                    break;
                }
                *self.stack.last_mut().expect("nonempty") += 1;
                continue;
            }
            self.colors[self.plan.order[depth]] = c;
            if !self.faces_ok(depth) {
                self.stack[depth] += 1;
                continue;
            }
            if depth + 1 < depth_max {
                self.stack.push(0);
                continue;
            }
            self.stack[depth] += 1;
            let phi = Coloring {
                per_edge: self.colors.clone(),
            };
            let mut w: Complex64 = phi.per_edge.iter().map(|&c| self.p.qdim_unchecked(c)).product();
            for tet in 0..self.t.num_tetrahedra() {
                w *= tet_weight(self.t, tet, &phi, self.p);
            }
            return Some((phi, w));
        }
        None
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceReport {
    pub initial: Complex64,
    pub values: Vec<Complex64>,
    pub tets: Vec<usize>,
    pub max_deviation: f64,
    pub gamma_preserved: bool,
}

/// Runs a seeded random walk, evaluating the state sum after every step and
/// checking that the Γ-signature never changes.
pub fn invariance_check(
    t: &Triangulation,
    p: &QuantumParams,
    steps: usize,
    seed: u64,
    weights: &MoveWeights,
    jobs: usize,
) -> Result<InvarianceReport, StateSumError> {
    let initial = state_sum(t, p, jobs)?.value;
    let gamma0: GammaSignature = skeletons(t)?.gamma;
    let mut values = Vec::with_capacity(steps);
    let mut tets = Vec::with_capacity(steps);
    let mut failure: Option<StateSumError> = None;
    let mut gamma_ok = true;
    random_walk_with(t, steps, seed, weights, |_, _, cur| {
        if failure.is_some() {
            return;
        }
        match state_sum(cur, p, jobs) {
            Ok(r) => values.push(r.value),
            Err(e) => failure = Some(e),
        }
        tets.push(cur.num_tetrahedra());
        match skeletons(cur) {
            Ok(rep) => gamma_ok &= crate::analysis::same_gamma(&rep.gamma, &gamma0),
            Err(e) => failure = Some(e.into()),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    let max_deviation = values
        .iter()
        .map(|&v| relative_deviation(v, initial))
        .fold(0.0, f64::max);
    Ok(InvarianceReport {
        initial,
        values,
        tets,
        max_deviation,
        gamma_preserved: gamma_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::{legal_targets, move_14, move_23, move_32, move_41, MoveKind};
    use crate::perm::Perm4;

    fn bd4simplex() -> Triangulation {
        let tuples: Vec<[i64; 4]> = (0..5)
            .map(|skip| {
                let v: Vec<i64> = (0..5).filter(|&x| x != skip).collect();
                [v[0], v[1], v[2], v[3]]
            })
            .collect();
        Triangulation::from_vertex_tuples(&tuples).unwrap()
    }

    fn two_tet() -> Triangulation {
        let gl: Vec<_> = (0..4).map(|f| (0, f, 1, f, Perm4::IDENTITY)).collect();
        Triangulation::build_from_gluings(2, &gl).unwrap()
    }

    /// Independent oracle: every assignment of colors to edges, no pruning.
    fn brute_force(t: &Triangulation, p: &QuantumParams) -> (Complex64, usize) {
        let ne = t.num_edges();
        let nc = p.num_colors();
        let mut total = Complex64::new(0.0, 0.0);
        let mut admissible = 0;
        for idx in 0..nc.pow(ne as u32) {
            let mut rest = idx;
            let colors: Vec<usize> = (0..ne)
                .map(|_| {
                    let c = rest % nc;
                    rest /= nc;
                    c
                })
                .collect();
            let all_faces = (0..t.num_faces()).all(|f| {
                let e = face_edges(t, f);
                p.admissible(colors[e[0]], colors[e[1]], colors[e[2]])
            });
            if all_faces {
                admissible += 1;
            }
            let mut w: Complex64 = colors.iter().map(|&c| p.qdim(c).unwrap()).product();
            for tet in 0..t.num_tetrahedra() {
                let key: Vec<usize> = [(0, 1), (1, 2), (0, 2), (2, 3), (0, 3), (1, 3)]
                    .iter()
                    .map(|&(a, b)| colors[t.edge_of(tet, crate::perm::edge_index(a, b))])
                    .collect();
                w *= p.sixj(&SixJKey([key[0], key[1], key[2], key[3], key[4], key[5]])).unwrap();
            }
            total += w;
        }
        (total * p.rank_squared().powi(-(t.num_vertices() as i32)), admissible)
    }

    #[test]
    fn sphere_value_matches_brute_force() {
        let t = bd4simplex();
        let p = QuantumParams::level(3).unwrap();
        let r = state_sum(&t, &p, 1).unwrap();
        let (oracle, count) = brute_force(&t, &p);
        assert!((r.value - Complex64::new(0.5, 0.0)).norm() < 1e-9, "{:?}", r.value);
        assert!((r.value - oracle).norm() < 1e-9);
        assert_eq!(r.colorings, count as u128);
        assert!(count.is_power_of_two());
        let listed: Vec<_> = enumerate_colorings(&t, &p).unwrap().collect();
        assert_eq!(listed.len(), count);
        let sum: Complex64 = listed.iter().map(|(_, w)| *w).sum();
        assert!((sum * p.rank_squared().powi(-5) - oracle).norm() < 1e-9);
    }

    #[test]
    fn spheres_give_inverse_rank() {
        for r in 2..=5 {
            let p = QuantumParams::level(r).unwrap();
            let expect = p.rank_squared().inv();
            for t in [bd4simplex(), two_tet()] {
                let v = state_sum(&t, &p, 1).unwrap().value;
                assert!(relative_deviation(v, expect) < 1e-8, "r={r}: {v} vs {expect}");
            }
        }
        let p = QuantumParams::level(2).unwrap();
        assert_eq!(enumerate_colorings(&bd4simplex(), &p).unwrap().count(), 1);
    }

    #[test]
    fn single_moves_preserve_value() {
        let t = bd4simplex();
        for r in [3, 4, 5] {
            let p = QuantumParams::level(r).unwrap();
            let base = state_sum(&t, &p, 1).unwrap().value;
            let u = move_14(&t, 2).unwrap();
            let checks = [
                u.clone(),
                move_41(&u, legal_targets(&u, MoveKind::M41)[0]).unwrap(),
                move_23(&t, 3).unwrap(),
                move_32(&move_23(&t, 3).unwrap(), 0).unwrap_or_else(|_| t.clone()),
            ];
            for c in &checks {
                let v = state_sum(c, &p, 1).unwrap().value;
                assert!(relative_deviation(v, base) < 1e-9, "r={r}");
            }
        }
    }

    #[test]
    fn parallel_is_bit_identical() {
        let t = move_14(&bd4simplex(), 0).unwrap();
        let p = QuantumParams::level(5).unwrap();
        let a = state_sum(&t, &p, 1).unwrap();
        let b = state_sum(&t, &p, 8).unwrap();
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
        assert_eq!(a.colorings, b.colorings);
    }

    #[test]
    fn errors() {
        let one = Triangulation::from_vertex_tuples(&[[0i64, 1, 2, 3]]).unwrap();
        let p = QuantumParams::level(3).unwrap();
        assert_eq!(state_sum(&one, &p, 1).unwrap_err(), StateSumError::NotClosed);
        let opts = StateSumOptions {
            jobs: 1,
            max_transitions: 10,
        };
        assert!(matches!(
            state_sum_with(&bd4simplex(), &p, &opts),
            Err(StateSumError::Overflow(_))
        ));
    }

    #[test]
    fn tet_weight_of_zero_coloring() {
        let t = bd4simplex();
        let p = QuantumParams::level(4).unwrap();
        let phi = Coloring {
            per_edge: vec![0; t.num_edges()],
        };
        for tet in 0..5 {
            assert!((tet_weight(&t, tet, &phi, &p) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
        assert_eq!(phi.per_circle(&t).len(), 10);
    }

    #[test]
    fn zero_step_invariance() {
        let p = QuantumParams::level(3).unwrap();
        let rep = invariance_check(&bd4simplex(), &p, 0, 1, &MoveWeights::default(), 1).unwrap();
        assert_eq!(rep.max_deviation, 0.0);
        assert!(rep.values.is_empty());
        let rep = invariance_check(&bd4simplex(), &p, 8, 5, &MoveWeights::uniform(), 1).unwrap();
        assert!(rep.max_deviation < 1e-6);
        assert!(rep.gamma_preserved);
    }
}
