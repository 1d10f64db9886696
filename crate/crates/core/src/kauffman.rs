//! Kauffman's skein-template decision tree.
//!
//! The traversal walks the diagram arc by arc. A crossing met for the first
//! time from above is passed; met for the first time from below it forks into
//! a splice branch and a switch branch. Later encounters follow whatever the
//! first one decided. When a component closes, the walk restarts from the
//! lowest-ranked arc not yet traversed, and once every arc is used the leaf
//! contributes `(-1)^t- z^t a^(w-w0) d^(c-1)`.
//!
//! The tree is never materialized: branch state lives in two flat vectors
//! that are rolled back through an undo trail, so memory stays linear in the
//! crossing count.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::link::{ArcId, CrossingId, LinkDiagram, Sign, Slot};
use crate::poly::{expand_delta, BiLaurent, TriLaurent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KauffmanError {
    #[error("the diagram has no components")]
    NoComponents,
    #[error("arc order is not a permutation of 0..{0}")]
    BadOrder(usize),
}

/// A total order on the arcs of one diagram. `rank(a)` is 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcOrder {
    rank: Vec<u32>,
    by_rank: Vec<ArcId>,
}

impl ArcOrder {
    /// Arcs ranked by id.
    pub fn natural(arc_count: usize) -> Self {
        let by_rank: Vec<ArcId> = (0..arc_count as u32).map(ArcId).collect();
        ArcOrder { rank: (0..arc_count as u32).collect(), by_rank }
    }

    /// Arcs listed from lowest to highest rank.
    pub fn from_sequence(seq: Vec<ArcId>) -> Result<Self, KauffmanError> {
        let n = seq.len();
        let mut rank = vec![u32::MAX; n];
        for (r, a) in seq.iter().enumerate() {
            match rank.get_mut(a.index()) {
                Some(slot) if *slot == u32::MAX => *slot = r as u32,
                _ => return Err(KauffmanError::BadOrder(n)),
            }
        }
        Ok(ArcOrder { rank, by_rank: seq })
    }

    pub fn random(arc_count: usize, seed: u64) -> Self {
        let mut seq: Vec<ArcId> = (0..arc_count as u32).map(ArcId).collect();
        seq.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        Self::from_sequence(seq).expect("a shuffle is a permutation")
    }

    pub fn rank(&self, a: ArcId) -> u32 {
        self.rank[a.index()]
    }

    pub fn len(&self) -> usize {
        self.rank.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rank.is_empty()
    }

    pub fn sequence(&self) -> &[ArcId] {
        &self.by_rank
    }
}

/// What a leaf of the decision tree knows about its modified diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LeafStats {
    pub t: u32,
    pub t_minus: u32,
    pub w: i64,
    pub w0: i64,
    pub c: u32,
}

impl LeafStats {
    fn exponents(&self) -> [i32; 3] {
        [(self.w - self.w0) as i32, self.t as i32, self.c as i32 - 1]
    }
}

pub fn leaf_term(s: &LeafStats) -> TriLaurent {
    let coeff = if s.t_minus.is_multiple_of(2) { 1 } else { -1 };
    TriLaurent::mono(coeff, s.exponents())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct KauffmanStats {
    pub leaves: u64,
    /// Deepest nesting of forks on one root-to-leaf path.
    pub max_depth: usize,
    /// Largest undo trail held at once.
    pub peak_trail: usize,
}

impl KauffmanStats {
    fn absorb(&mut self, o: &KauffmanStats) {
        self.leaves += o.leaves;
        self.max_depth = self.max_depth.max(o.max_depth);
        self.peak_trail = self.peak_trail.max(o.peak_trail);
    }
}

#[derive(Debug, Clone)]
pub struct KauffmanRun {
    /// Sum of leaf terms before `d` is expanded.
    pub unexpanded: TriLaurent,
    pub stats: KauffmanStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Decision {
    Open,
    Pass,
    Switch,
    Splice,
}

#[derive(Debug, Clone, Copy)]
enum Undo {
    Traversed(ArcId),
    Decided(CrossingId),
}

#[derive(Debug, Clone, Copy)]
struct Counters {
    t: u32,
    t_minus: u32,
    w: i64,
    closed: u32,
}

/// Forks shallower than this hand one side to rayon in parallel mode.
const PARALLEL_DEPTH: usize = 12;

/// Owns its tallies so that forked copies can be joined without sharing.
#[derive(Clone)]
struct Walker<'a> {
    d: &'a LinkDiagram,
    order: &'a ArcOrder,
    w0: i64,
    decision: Vec<Decision>,
    traversed: Vec<bool>,
    trail: Vec<Undo>,
    stats: KauffmanStats,
    parallel: bool,
    counts: HashMap<[i32; 3], i128>,
    log: Option<Vec<LeafStats>>,
}

impl<'a> Walker<'a> {
    fn new(d: &'a LinkDiagram, order: &'a ArcOrder, parallel: bool, keep_leaves: bool) -> Self {
        assert_eq!(order.len(), d.arc_count(), "arc order does not match the diagram");
        Walker {
            d,
            order,
            w0: d.writhe(),
            decision: vec![Decision::Open; d.crossing_count()],
            traversed: vec![false; d.arc_count()],
            trail: Vec::with_capacity(3 * d.crossing_count()),
            stats: KauffmanStats::default(),
            parallel,
            counts: HashMap::new(),
            log: keep_leaves.then(Vec::new),
        }
    }

    fn run(&mut self) {
        let k = Counters { t: 0, t_minus: 0, w: self.w0, closed: 0 };
        match self.lowest_untraversed() {
            Some(a) => self.walk(a, k, 0),
            None => self.leaf(k),
        }
    }

    fn lowest_untraversed(&self) -> Option<ArcId> {
        self.order.sequence().iter().copied().find(|a| !self.traversed[a.index()])
    }

    fn rollback(&mut self, mark: usize) {
        while self.trail.len() > mark {
            match self.trail.pop().expect("trail longer than mark") {
                Undo::Traversed(a) => self.traversed[a.index()] = false,
                Undo::Decided(c) => self.decision[c.index()] = Decision::Open,
            }
        }
    }

    fn decide(&mut self, c: CrossingId, how: Decision) {
        self.decision[c.index()] = how;
        self.trail.push(Undo::Decided(c));
    }

    fn leaf(&mut self, k: Counters) {
        self.stats.leaves += 1;
        let s = LeafStats {
            t: k.t,
            t_minus: k.t_minus,
            w: k.w,
            w0: self.w0,
            c: k.closed + self.d.zero_components() as u32,
        };
        let sign = if s.t_minus.is_multiple_of(2) { 1 } else { -1 };
        *self.counts.entry(s.exponents()).or_insert(0) += sign;
        if let Some(log) = &mut self.log {
            log.push(s);
        }
    }

    /// Steps out of `c` through `out`, restarting when a component closes.
    /// `None` means every arc has been used.
    fn advance(&mut self, c: CrossingId, out: Slot, k: &mut Counters) -> Option<ArcId> {
        let next = self.d.arc_at(c, out);
        if !self.traversed[next.index()] {
            return Some(next);
        }
        k.closed += 1;
        self.lowest_untraversed()
    }

    fn walk(&mut self, mut a: ArcId, mut k: Counters, depth: usize) {
        self.stats.max_depth = self.stats.max_depth.max(depth);
        loop {
            self.traversed[a.index()] = true;
            self.trail.push(Undo::Traversed(a));
            self.stats.peak_trail = self.stats.peak_trail.max(self.trail.len());
            let head = self.d.arc(a).to;
            let c = head.crossing;
            let out = match self.decision[c.index()] {
                Decision::Open if head.slot == Slot::OverIn => {
                    self.decide(c, Decision::Pass);
                    head.slot.straight()
                }
                Decision::Open => {
                    self.fork(c, k, depth);
                    return;
                }
                Decision::Pass | Decision::Switch => head.slot.straight(),
                Decision::Splice => head.slot.smoothed(),
            };
            match self.advance(c, out, &mut k) {
                Some(next) => a = next,
                None => {
                    self.leaf(k);
                    return;
                }
            }
        }
    }

    /// Continues after deciding `c`, which was entered from below.
    fn branch(&mut self, c: CrossingId, how: Decision, mut k: Counters, depth: usize) {
        let sign = self.d.signs()[c.index()];
        self.decide(c, how);
        let out = if how == Decision::Splice {
            k.t += 1;
            if sign == Sign::Negative {
                k.t_minus += 1;
            }
            k.w -= sign.value();
            Slot::UnderIn.smoothed()
        } else {
            k.w -= 2 * sign.value();
            Slot::UnderIn.straight()
        };
        match self.advance(c, out, &mut k) {
            Some(next) => self.walk(next, k, depth + 1),
            None => {
                self.stats.max_depth = self.stats.max_depth.max(depth + 1);
                self.leaf(k)
            }
        }
    }

    fn fork(&mut self, c: CrossingId, k: Counters, depth: usize) {
        let mark = self.trail.len();
        if self.parallel && depth < PARALLEL_DEPTH {
            let mut other = self.clone();
            other.stats = KauffmanStats::default();
            other.counts = HashMap::new();
            other.log = self.log.as_ref().map(|_| Vec::new());
            rayon::join(|| self.branch(c, Decision::Splice, k, depth), || other.branch(c, Decision::Switch, k, depth));
            self.stats.absorb(&other.stats);
            for (e, v) in other.counts {
                *self.counts.entry(e).or_insert(0) += v;
            }
            if let (Some(mine), Some(theirs)) = (&mut self.log, other.log) {
                mine.extend(theirs);
            }
        } else {
            self.branch(c, Decision::Splice, k, depth);
            self.rollback(mark);
            self.branch(c, Decision::Switch, k, depth);
        }
        self.rollback(mark);
    }

    fn poly(&self) -> TriLaurent {
        TriLaurent::from_terms(self.counts.iter().map(|(e, &c)| (*e, c)))
    }
}

/// Every leaf in depth-first order (splice side first) with run statistics.
pub fn leaves(d: &LinkDiagram, order: &ArcOrder) -> (Vec<LeafStats>, KauffmanStats) {
    let mut w = Walker::new(d, order, false, true);
    w.run();
    (w.log.take().unwrap_or_default(), w.stats)
}

/// Runs the decision tree and returns the unexpanded sum with statistics.
/// With `parallel`, shallow forks split across the current rayon pool; the
/// result is identical to the sequential run.
pub fn kauffman_run(d: &LinkDiagram, order: &ArcOrder, parallel: bool) -> KauffmanRun {
    let mut w = Walker::new(d, order, parallel, false);
    w.run();
    KauffmanRun { unexpanded: w.poly(), stats: w.stats }
}

pub fn leaf_count(d: &LinkDiagram, order: &ArcOrder) -> u64 {
    kauffman_run(d, order, false).stats.leaves
}

/// The HOMFLY-PT polynomial of `d` in `(a, z)`.
pub fn homfly_kauffman(d: &LinkDiagram, order: &ArcOrder) -> Result<BiLaurent, KauffmanError> {
    homfly_kauffman_with(d, order, false).map(|(p, _)| p)
}

pub fn homfly_kauffman_with(
    d: &LinkDiagram,
    order: &ArcOrder,
    parallel: bool,
) -> Result<(BiLaurent, KauffmanStats), KauffmanError> {
    if d.components() == 0 {
        return Err(KauffmanError::NoComponents);
    }
    let run = kauffman_run(d, order, parallel);
    let p = expand_delta(&run.unexpanded).expect("every leaf has at least one component");
    Ok((p, run.stats))
}
