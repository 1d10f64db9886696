//! Configuration tables and the four bag transitions.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;

use super::order::TreeArcOrder;
use super::FptError;
use crate::link::{ArcId, CrossingId, LinkDiagram, Sign, Slot};
use crate::poly::TriLaurent;
use crate::treewidth::{CrossingStatus, NiceKind, NiceTreeDecomposition};

/// Ordered segments `(enter, leave)` through the forgotten region, in the
/// order the traversal meets them. A trivial pair has `enter == leave`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Configuration(pub Vec<(ArcId, ArcId)>);

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(a, b)| format!("{}:{}", a.0, b.0)).collect();
        write!(f, "({})", parts.join(" "))
    }
}

impl Configuration {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub type EvaluationTable = HashMap<Configuration, TriLaurent>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    Pass,
    Switch,
    Splice,
}

impl Tag {
    /// Exponents of `(a, z, d)` and whether to negate, for a crossing of `sign`.
    pub fn factor(self, sign: Sign) -> ([i32; 3], bool) {
        let s = sign.value() as i32;
        match self {
            Tag::Pass => ([s, 0, 0], false),
            Tag::Switch => ([-s, 0, 0], false),
            Tag::Splice => ([0, 1, 0], sign == Sign::Negative),
        }
    }
}

/// When arcs between two bag crossings enter configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairMode {
    /// Introduce inserts each such arc as a trivial pair at every position.
    Eager,
    /// Such arcs stay implicit until one end is forgotten; only then does
    /// the strand through them get a position. Every eager table entry maps
    /// to exactly one deferred entry, so results agree while tables shrink.
    #[default]
    Deferred,
}

/// Everything the transitions read besides the tables themselves.
pub struct DpContext<'a> {
    pub diagram: &'a LinkDiagram,
    pub ntd: &'a NiceTreeDecomposition,
    pub order: &'a TreeArcOrder,
    pub w0: i64,
    pub width_budget: usize,
    pub parallel: bool,
    pub pairs: PairMode,
}

/// Entries per rayon task when a transition runs in parallel.
const PAR_THRESHOLD: usize = 64;

impl DpContext<'_> {
    fn status(&self, node: usize, c: CrossingId) -> CrossingStatus {
        self.ntd.status(node, c.0)
    }

    fn budget_error(&self, node: usize, configs: usize) -> FptError {
        FptError::WidthBudgetExceeded { width: self.ntd.width(), node, configs, budget: self.width_budget }
    }

    /// Runs `step` on every child entry and sums the outputs, refusing to grow
    /// past the width budget.
    fn expand<F>(&self, node: usize, child: &EvaluationTable, step: F) -> Result<EvaluationTable, FptError>
    where
        F: Fn(&Configuration, &TriLaurent, &mut Vec<(Configuration, TriLaurent)>) + Sync,
    {
        let mut out = EvaluationTable::new();
        if self.parallel && child.len() >= PAR_THRESHOLD {
            let entries: Vec<(&Configuration, &TriLaurent)> = child.iter().collect();
            let produced: Vec<Vec<(Configuration, TriLaurent)>> = entries
                .par_chunks(PAR_THRESHOLD)
                .map(|chunk| {
                    let mut buf = Vec::new();
                    for (k, v) in chunk {
                        step(k, v, &mut buf);
                    }
                    buf
                })
                .collect();
            for (k, v) in produced.into_iter().flatten() {
                add_entry(&mut out, k, v);
                if out.len() > self.width_budget {
                    return Err(self.budget_error(node, out.len()));
                }
            }
        } else {
            let mut buf = Vec::new();
            for (k, v) in child {
                step(k, v, &mut buf);
                for (k2, v2) in buf.drain(..) {
                    add_entry(&mut out, k2, v2);
                }
                if out.len() > self.width_budget {
                    return Err(self.budget_error(node, out.len()));
                }
            }
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    }
}

fn add_entry(t: &mut EvaluationTable, k: Configuration, v: TriLaurent) {
    match t.get_mut(&k) {
        Some(p) => *p += &v,
        None => {
            t.insert(k, v);
        }
    }
}

/// The single empty configuration carrying `a^-w0 d^-1`.
pub fn process_leaf(ctx: &DpContext, node: usize) -> Result<EvaluationTable, FptError> {
    let NiceKind::Leaf { vertex } = ctx.ntd.nodes[node].kind else {
        return Err(FptError::WrongNodeKind { node });
    };
    let v = CrossingId(vertex);
    for a in ctx.diagram.slots_of(v) {
        let arc = ctx.diagram.arc(a);
        for end in [arc.from.crossing, arc.to.crossing] {
            if end != v && ctx.status(node, end) != CrossingStatus::Unvisited {
                return Err(FptError::LeafHasInternalArc { node, arc: a });
            }
        }
    }
    let mut t = EvaluationTable::new();
    t.insert(Configuration::default(), TriLaurent::mono(1, [-(ctx.w0 as i32), 0, -1]));
    Ok(t)
}

/// Adds a trivial pair, at every position, for each arc between the new
/// crossing and a crossing already in the bag.
pub fn process_introduce(ctx: &DpContext, node: usize, child: &EvaluationTable) -> Result<EvaluationTable, FptError> {
    let NiceKind::Introduce { vertex, .. } = ctx.ntd.nodes[node].kind else {
        return Err(FptError::WrongNodeKind { node });
    };
    let c = CrossingId(vertex);
    let mut fresh: Vec<ArcId> = Vec::new();
    for a in ctx.diagram.slots_of(c) {
        let arc = ctx.diagram.arc(a);
        let other = if arc.from.crossing == c { arc.to.crossing } else { arc.from.crossing };
        match ctx.status(node, other) {
            CrossingStatus::Forgotten => {
                return Err(FptError::IntroduceSeesForgottenNeighbor { node, crossing: other })
            }
            CrossingStatus::Current if other != c => fresh.push(a),
            _ => {}
        }
    }
    fresh.sort_unstable();
    fresh.dedup();
    if fresh.is_empty() || ctx.pairs == PairMode::Deferred {
        return Ok(child.clone());
    }
    ctx.expand(node, child, |k, v, out| {
        let mut layer = vec![k.0.clone()];
        for &a in &fresh {
            let mut next = Vec::with_capacity(layer.len() * (layer[0].len() + 1));
            for seq in &layer {
                for pos in 0..=seq.len() {
                    let mut s = seq.clone();
                    s.insert(pos, (a, a));
                    next.push(s);
                }
            }
            layer = next;
        }
        out.extend(layer.into_iter().map(|s| (Configuration(s), v.clone())));
    })
}

/// Every shuffle of `left` and `right` that keeps each side's order and lines
/// up the trivial pairs both sides share.
pub fn join_shuffles(left: &[(ArcId, ArcId)], right: &[(ArcId, ArcId)]) -> Vec<Vec<(ArcId, ArcId)>> {
    fn go(
        l: &[(ArcId, ArcId)],
        r: &[(ArcId, ArcId)],
        cur: &mut Vec<(ArcId, ArcId)>,
        out: &mut Vec<Vec<(ArcId, ArcId)>>,
    ) {
        let trivial = |p: &(ArcId, ArcId)| p.0 == p.1;
        match (l.first(), r.first()) {
            (None, None) => out.push(cur.clone()),
            (Some(x), Some(y)) if trivial(x) && trivial(y) => {
                if x == y {
                    cur.push(*x);
                    go(&l[1..], &r[1..], cur, out);
                    cur.pop();
                }
            }
            (x, y) => {
                if let Some(x) = x.filter(|x| !trivial(x)) {
                    cur.push(*x);
                    go(&l[1..], r, cur, out);
                    cur.pop();
                }
                if let Some(y) = y.filter(|y| !trivial(y)) {
                    cur.push(*y);
                    go(l, &r[1..], cur, out);
                    cur.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(left, right, &mut Vec::with_capacity(left.len() + right.len()), &mut out);
    out
}

pub fn process_join(
    ctx: &DpContext,
    node: usize,
    left: &EvaluationTable,
    right: &EvaluationTable,
) -> Result<EvaluationTable, FptError> {
    if !matches!(ctx.ntd.nodes[node].kind, NiceKind::Join { .. }) {
        return Err(FptError::WrongNodeKind { node });
    }
    let glue = TriLaurent::mono(1, [ctx.w0 as i32, 0, 1]);
    let right_entries: Vec<(&Configuration, &TriLaurent)> = right.iter().collect();
    ctx.expand(node, left, |k1, e1, out| {
        let scaled = e1 * &glue;
        for (k2, e2) in &right_entries {
            let shuffles = join_shuffles(&k1.0, &k2.0);
            if shuffles.is_empty() {
                continue;
            }
            let value = &scaled * e2;
            out.extend(shuffles.into_iter().map(|s| (Configuration(s), value.clone())));
        }
    })
}

/// How the two strands through a forgotten crossing leave it.
fn exits(d: &LinkDiagram, c: CrossingId, smoothed: bool) -> [(ArcId, ArcId); 2] {
    let at = |s: Slot| d.arc_at(c, s);
    let route = |s: Slot| if smoothed { s.smoothed() } else { s.straight() };
    [(at(Slot::UnderIn), at(route(Slot::UnderIn))), (at(Slot::OverIn), at(route(Slot::OverIn)))]
}

/// Outcome of reconnecting one child configuration through `c`.
struct Reconnected {
    config: Vec<(ArcId, ArcId)>,
    /// Which in-arc the traversal meets first: 0 under, 1 over.
    first: usize,
    closed: i32,
}

/// Applies the strand connections at `c` to `k`, or rejects the combination
/// when the pair order cannot come from a traversal under the tree order.
fn reconnect(k: &[(ArcId, ArcId)], strands: [(ArcId, ArcId); 2], order: &TreeArcOrder) -> Option<Reconnected> {
    let u = k.len();
    let by_leave = |x: ArcId| k.iter().position(|p| p.1 == x);
    let by_enter = |x: ArcId| k.iter().position(|p| p.0 == x);
    // p[s]: pair ending in strand s's in-arc; q[s]: pair it continues into
    let mut p = [0; 2];
    let mut q = [0; 2];
    for s in 0..2 {
        p[s] = by_leave(strands[s].0)?;
        q[s] = by_enter(strands[s].1)?;
    }
    let selfs = [p[0] == q[0], p[1] == q[1]];
    let two_cycle = !selfs[0] && !selfs[1] && q[0] == p[1] && q[1] == p[0];
    let rank_of = |i: usize| order.rank(k[i].1);

    let mut drop = [false; 2];
    let (first, closed) = if selfs[0] && selfs[1] {
        // two separate loops through c; the earlier one starts lower
        let (x, y) = (p[0].min(p[1]), p[0].max(p[1]));
        if x + 2 != u || y + 1 != u || rank_of(x) >= rank_of(y) {
            return None;
        }
        drop = [true, true];
        (if p[0] == x { 0 } else { 1 }, 2)
    } else if two_cycle {
        // one loop through c twice: pairs (f, s) at the tail, restarted from
        // the lower-ranked in-arc which must be the later pair's
        let (f, s) = (p[0].min(p[1]), p[0].max(p[1]));
        if f + 2 != u || s + 1 != u || rank_of(s) >= rank_of(f) {
            return None;
        }
        drop = [true, true];
        (if p[0] == s { 0 } else { 1 }, 1)
    } else {
        let mut closed = 0;
        for s in 0..2 {
            if selfs[s] {
                if p[s] + 1 != u {
                    return None;
                }
                drop[s] = true;
                closed += 1;
            } else if q[s] != p[s] + 1 {
                return None;
            }
        }
        let first = match selfs {
            [true, _] => 1,
            [_, true] => 0,
            _ => usize::from(p[1] < p[0]),
        };
        (first, closed)
    };

    // fuse each open link p -> q; a chain p -> q -> r collapses fully
    let mut config: Vec<(ArcId, ArcId)> = Vec::with_capacity(u);
    let mut successor = vec![usize::MAX; u];
    let mut is_successor = vec![false; u];
    for s in 0..2 {
        if drop[s] {
            continue;
        }
        successor[p[s]] = q[s];
        is_successor[q[s]] = true;
    }
    let dropped: Vec<usize> = (0..2).filter(|&s| drop[s]).map(|s| p[s]).collect();
    for i in 0..u {
        if is_successor[i] || dropped.contains(&i) {
            continue;
        }
        let mut end = i;
        while successor[end] != usize::MAX {
            end = successor[end];
        }
        config.push((k[i].0, k[end].1));
    }
    Some(Reconnected { config, first, closed })
}

/// Places the implicit trivial pairs of `c` into `k`. A pair linked through
/// `c` to a placed segment sits right beside it; a strand whose both arcs are
/// implicit becomes a block tried at every position.
fn materialize(k: &[(ArcId, ArcId)], strands: [(ArcId, ArcId); 2], implicit: &[ArcId]) -> Vec<Vec<(ArcId, ArcId)>> {
    let hidden = |a: ArcId| implicit.contains(&a);
    let mut before: Vec<(usize, ArcId)> = Vec::new();
    let mut after: Vec<(usize, ArcId)> = Vec::new();
    let mut blocks: Vec<(ArcId, ArcId)> = Vec::new();
    for &(i, o) in &strands {
        match (hidden(i), hidden(o)) {
            (false, false) => {}
            (true, false) => match k.iter().position(|p| p.0 == o) {
                Some(q) => before.push((q, i)),
                None => return Vec::new(),
            },
            (false, true) => match k.iter().position(|p| p.1 == i) {
                Some(p) => after.push((p, o)),
                None => return Vec::new(),
            },
            (true, true) => blocks.push((i, o)),
        }
    }
    let mut base: Vec<(ArcId, ArcId)> = Vec::with_capacity(k.len() + 4);
    for (idx, &pair) in k.iter().enumerate() {
        base.extend(before.iter().filter(|b| b.0 == idx).map(|b| (b.1, b.1)));
        base.push(pair);
        base.extend(after.iter().filter(|a| a.0 == idx).map(|a| (a.1, a.1)));
    }
    let mut layer = vec![base];
    for (i, o) in blocks {
        let mut next = Vec::new();
        for seq in &layer {
            for pos in 0..=seq.len() {
                let mut s = seq.clone();
                s.splice(pos..pos, [(i, i), (o, o)]);
                next.push(s);
            }
        }
        layer = next;
    }
    layer
}

/// Tags `c` in every admissible way and reconnects its strands.
pub fn process_forget(ctx: &DpContext, node: usize, child: &EvaluationTable) -> Result<EvaluationTable, FptError> {
    let NiceKind::Forget { vertex, .. } = ctx.ntd.nodes[node].kind else {
        return Err(FptError::WrongNodeKind { node });
    };
    let c = CrossingId(vertex);
    let d = ctx.diagram;
    let sign = d.signs()[c.index()];
    let straight = exits(d, c, false);
    let smoothed = exits(d, c, true);
    let implicit: Vec<ArcId> = match ctx.pairs {
        PairMode::Eager => Vec::new(),
        PairMode::Deferred => d
            .slots_of(c)
            .into_iter()
            .filter(|&a| {
                let arc = d.arc(a);
                let other = if arc.from.crossing == c { arc.to.crossing } else { arc.from.crossing };
                ctx.status(node, other) == CrossingStatus::Current
            })
            .collect(),
    };
    ctx.expand(node, child, |k, v, out| {
        let variants = |strands| {
            if implicit.is_empty() {
                vec![k.0.clone()]
            } else {
                materialize(&k.0, strands, &implicit)
            }
        };
        let mut emit = |tag: Tag, r: Reconnected| {
            let (mut mono, negate) = tag.factor(sign);
            mono[2] = r.closed;
            out.push((Configuration(r.config), v.mul_monomial(mono, negate)));
        };
        for seq in variants(straight) {
            if let Some(r) = reconnect(&seq, straight, ctx.order) {
                emit(if r.first == 1 { Tag::Pass } else { Tag::Switch }, r);
            }
        }
        for seq in variants(smoothed) {
            if let Some(r) = reconnect(&seq, smoothed, ctx.order).filter(|r| r.first == 0) {
                emit(Tag::Splice, r);
            }
        }
    })
}

/// Checks that every configuration at `node` uses exactly the arcs it must.
pub fn validate_table(ctx: &DpContext, node: usize, table: &EvaluationTable) -> Result<(), FptError> {
    use CrossingStatus::*;
    let d = ctx.diagram;
    let mut enters = Vec::new();
    let mut leaves = Vec::new();
    let mut trivial = Vec::new();
    for a in d.arc_ids() {
        let arc = d.arc(a);
        let (s, t) = (ctx.status(node, arc.from.crossing), ctx.status(node, arc.to.crossing));
        if s == Current && t != Unvisited {
            enters.push(a);
        }
        if t == Current && s != Unvisited {
            leaves.push(a);
        }
        if s == Current && t == Current {
            trivial.push(a);
        }
    }
    if ctx.pairs == PairMode::Deferred {
        let implicit = |a: &ArcId| !trivial.contains(a);
        enters.retain(implicit);
        leaves.retain(implicit);
        trivial.clear();
    }
    for k in table.keys() {
        let mut a: Vec<ArcId> = k.0.iter().map(|p| p.0).collect();
        let mut b: Vec<ArcId> = k.0.iter().map(|p| p.1).collect();
        let mut t: Vec<ArcId> = k.0.iter().filter(|p| p.0 == p.1).map(|p| p.0).collect();
        a.sort_unstable();
        b.sort_unstable();
        t.sort_unstable();
        let reason = if a != enters {
            "entering arcs differ"
        } else if b != leaves {
            "leaving arcs differ"
        } else if t != trivial {
            "trivial pairs differ"
        } else {
            continue;
        };
        return Err(FptError::InvalidConfiguration { node, reason: format!("{reason} in {k:?}") });
    }
    Ok(())
}
