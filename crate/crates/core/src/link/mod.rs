//! Oriented link diagrams.
//!
//! A diagram is a set of crossings, each with four slots (under-in,
//! under-out, over-in, over-out), and a set of oriented arcs joining an out
//! slot to an in slot. Closed loops with no crossings are kept only as a
//! count in [`LinkDiagram::zero_components`].
//!
//! The planar rotation at a crossing is implied by its sign: reading
//! counterclockwise from the under-in slot, a positive crossing has
//! `UnderIn, OverOut, UnderOut, OverIn` and a negative one
//! `UnderIn, OverIn, UnderOut, OverOut`.

mod braid;
mod json;
mod pd;

use std::fmt;

use thiserror::Error;

pub use braid::{generate_braid_closure, random_braid_diagram, random_braid_word, BraidGenerator};
pub use json::{DiagramFile, JsonArc, JsonCrossing};
pub use pd::{parse_pd, to_pd};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CrossingId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArcId(pub u32);

impl CrossingId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ArcId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for CrossingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    UnderIn = 0,
    UnderOut = 1,
    OverIn = 2,
    OverOut = 3,
}

impl Slot {
    pub const ALL: [Slot; 4] = [Slot::UnderIn, Slot::UnderOut, Slot::OverIn, Slot::OverOut];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn is_in(self) -> bool {
        matches!(self, Slot::UnderIn | Slot::OverIn)
    }

    pub fn is_over(self) -> bool {
        matches!(self, Slot::OverIn | Slot::OverOut)
    }

    /// The out slot on the same strand.
    pub fn straight(self) -> Slot {
        match self {
            Slot::UnderIn => Slot::UnderOut,
            Slot::OverIn => Slot::OverOut,
            Slot::UnderOut => Slot::UnderIn,
            Slot::OverOut => Slot::OverIn,
        }
    }

    /// The out slot reached by the oriented smoothing.
    pub fn smoothed(self) -> Slot {
        match self {
            Slot::UnderIn => Slot::OverOut,
            Slot::OverIn => Slot::UnderOut,
            Slot::UnderOut => Slot::OverIn,
            Slot::OverOut => Slot::UnderIn,
        }
    }

    /// Over and under roles exchanged.
    pub fn swapped(self) -> Slot {
        match self {
            Slot::UnderIn => Slot::OverIn,
            Slot::UnderOut => Slot::OverOut,
            Slot::OverIn => Slot::UnderIn,
            Slot::OverOut => Slot::UnderOut,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Slot::UnderIn => "under_in",
            Slot::UnderOut => "under_out",
            Slot::OverIn => "over_in",
            Slot::OverOut => "over_out",
        }
    }

    pub fn from_name(s: &str) -> Option<Slot> {
        Slot::ALL.into_iter().find(|x| x.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Endpoint {
    pub crossing: CrossingId,
    pub slot: Slot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Arc {
    pub from: Endpoint,
    pub to: Endpoint,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error("malformed syntax: {0}")]
    MalformedSyntax(String),
    #[error("arc label {label} appears {count} time(s); every label must appear exactly twice")]
    NonQuadrivalent { label: u64, count: usize },
    #[error("no consistent orientation exists ({0})")]
    OrientationConflict(String),
    #[error("unknown crossing {0}")]
    UnknownCrossing(CrossingId),
    #[error("invalid wiring: {0}")]
    InvalidWiring(String),
    #[error("generator index {index} outside 1..={max}")]
    BadGeneratorIndex { index: i32, max: usize },
}

/// An oriented link diagram with dense crossing and arc ids.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinkDiagram {
    signs: Vec<Sign>,
    arcs: Vec<Arc>,
    slots: Vec<[ArcId; 4]>,
    zero_components: usize,
}

impl fmt::Debug for LinkDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LinkDiagram")
            .field("crossings", &self.signs.len())
            .field("zero_components", &self.zero_components)
            .field("slots", &self.slots)
            .finish()
    }
}

impl LinkDiagram {
    /// Validates and builds a diagram. Arc `i` gets id `ArcId(i)`.
    pub fn new(signs: Vec<Sign>, arcs: Vec<Arc>, zero_components: usize) -> Result<Self, LinkError> {
        let n = signs.len();
        if arcs.len() != 2 * n {
            return Err(LinkError::InvalidWiring(format!("{} crossings need {} arcs, got {}", n, 2 * n, arcs.len())));
        }
        let mut slots: Vec<[Option<ArcId>; 4]> = vec![[None; 4]; n];
        for (i, arc) in arcs.iter().enumerate() {
            let id = ArcId(i as u32);
            for (end, want_in) in [(arc.from, false), (arc.to, true)] {
                if end.crossing.index() >= n {
                    return Err(LinkError::UnknownCrossing(end.crossing));
                }
                if end.slot.is_in() != want_in {
                    return Err(LinkError::InvalidWiring(format!(
                        "arc {id} {} at {} slot {}",
                        if want_in { "ends" } else { "starts" },
                        end.crossing,
                        end.slot.name()
                    )));
                }
                let cell = &mut slots[end.crossing.index()][end.slot.index()];
                if let Some(other) = cell {
                    return Err(LinkError::InvalidWiring(format!(
                        "slot {} of {} used by {other} and {id}",
                        end.slot.name(),
                        end.crossing
                    )));
                }
                *cell = Some(id);
            }
        }
        // 2n arcs with 2 distinct endpoints each fill all 4n slots.
        let slots = slots.into_iter().map(|s| s.map(|x| x.expect("slot filled"))).collect();
        Ok(LinkDiagram { signs, arcs, slots, zero_components })
    }

    /// The diagram with no crossings and `k` split unknotted circles.
    pub fn unlink(k: usize) -> Self {
        LinkDiagram { signs: Vec::new(), arcs: Vec::new(), slots: Vec::new(), zero_components: k }
    }

    pub fn crossing_count(&self) -> usize {
        self.signs.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn zero_components(&self) -> usize {
        self.zero_components
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn crossings(&self) -> impl Iterator<Item = CrossingId> + '_ {
        (0..self.signs.len() as u32).map(CrossingId)
    }

    pub fn arc_ids(&self) -> impl Iterator<Item = ArcId> + '_ {
        (0..self.arcs.len() as u32).map(ArcId)
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn arc(&self, a: ArcId) -> Arc {
        self.arcs[a.index()]
    }

    pub fn signs(&self) -> &[Sign] {
        &self.signs
    }

    fn check(&self, c: CrossingId) -> Result<(), LinkError> {
        if c.index() < self.signs.len() {
            Ok(())
        } else {
            Err(LinkError::UnknownCrossing(c))
        }
    }

    pub fn sign(&self, c: CrossingId) -> Result<Sign, LinkError> {
        self.check(c)?;
        Ok(self.signs[c.index()])
    }

    /// The arc attached at `slot` of `c`. Panics on an unknown crossing.
    pub fn arc_at(&self, c: CrossingId, slot: Slot) -> ArcId {
        self.slots[c.index()][slot.index()]
    }

    pub fn slots_of(&self, c: CrossingId) -> [ArcId; 4] {
        self.slots[c.index()]
    }

    pub fn writhe(&self) -> i64 {
        self.signs.iter().map(|s| s.value()).sum()
    }

    /// Next arc along the strand, passing straight through the head crossing.
    pub fn next_arc(&self, a: ArcId) -> ArcId {
        let to = self.arcs[a.index()].to;
        self.arc_at(to.crossing, to.slot.straight())
    }

    /// Closed strands, each as its arcs in traversal order starting from its
    /// lowest arc id. Zero-crossing components are not listed.
    pub fn strands(&self) -> Vec<Vec<ArcId>> {
        let mut seen = vec![false; self.arcs.len()];
        let mut out = Vec::new();
        for start in self.arc_ids() {
            if seen[start.index()] {
                continue;
            }
            let mut comp = Vec::new();
            let mut a = start;
            while !seen[a.index()] {
                seen[a.index()] = true;
                comp.push(a);
                a = self.next_arc(a);
            }
            out.push(comp);
        }
        out
    }

    /// Number of link components, counting split zero-crossing circles.
    pub fn components(&self) -> usize {
        self.strands().len() + self.zero_components
    }

    pub fn diagram_graph(&self) -> DiagramGraph {
        DiagramGraph {
            vertex_count: self.signs.len(),
            edges: self
                .arcs
                .iter()
                .enumerate()
                .map(|(i, a)| (ArcId(i as u32), a.from.crossing, a.to.crossing))
                .collect(),
        }
    }

    /// Moves the over strand of `c` beneath the under strand.
    pub fn switch(&self, c: CrossingId) -> Result<LinkDiagram, LinkError> {
        self.check(c)?;
        let mut d = self.clone();
        d.signs[c.index()] = d.signs[c.index()].flipped();
        let old = d.slots[c.index()];
        for slot in Slot::ALL {
            let a = old[slot.index()];
            let arc = &mut d.arcs[a.index()];
            let target = slot.swapped();
            // a loop arc at c has both ends here; fix the one matching `slot`.
            if arc.from.crossing == c && arc.from.slot == slot {
                arc.from.slot = target;
            } else {
                arc.to.slot = target;
            }
            d.slots[c.index()][target.index()] = a;
        }
        Ok(d)
    }

    /// Applies the oriented smoothing at `c`, removing it.
    pub fn splice(&self, c: CrossingId) -> Result<LinkDiagram, LinkError> {
        Ok(self.splice_traced(c)?.0)
    }

    /// Like [`splice`](Self::splice), also returning for each new arc the old
    /// arcs it was merged from, in traversal order.
    pub fn splice_traced(&self, c: CrossingId) -> Result<(LinkDiagram, Vec<Vec<ArcId>>), LinkError> {
        self.check(c)?;
        Ok(self.remove_crossing(c, Slot::smoothed))
    }

    /// Deletes `c`, joining each arc entering `c` at slot `s` to the arc
    /// leaving at `route(s)`. Loops that end up with no crossings become
    /// zero components.
    fn remove_crossing(&self, c: CrossingId, route: fn(Slot) -> Slot) -> (LinkDiagram, Vec<Vec<ArcId>>) {
        let renumber = |x: CrossingId| if x.0 > c.0 { CrossingId(x.0 - 1) } else { x };
        let mut used = vec![false; self.arcs.len()];
        let mut new_arcs = Vec::new();
        let mut trace = Vec::new();
        for a in self.arc_ids() {
            let arc = self.arcs[a.index()];
            if arc.from.crossing == c {
                continue;
            }
            let mut chain = vec![a];
            used[a.index()] = true;
            let mut cur = arc;
            while cur.to.crossing == c {
                let next = self.arc_at(c, route(cur.to.slot));
                used[next.index()] = true;
                chain.push(next);
                cur = self.arcs[next.index()];
            }
            new_arcs.push(Arc {
                from: Endpoint { crossing: renumber(arc.from.crossing), slot: arc.from.slot },
                to: Endpoint { crossing: renumber(cur.to.crossing), slot: cur.to.slot },
            });
            trace.push(chain);
        }
        let mut zero = self.zero_components;
        for a in self.arc_ids() {
            if used[a.index()] {
                continue;
            }
            // every remaining arc both starts and ends at c
            let mut x = a;
            while !used[x.index()] {
                used[x.index()] = true;
                x = self.arc_at(c, route(self.arcs[x.index()].to.slot));
            }
            zero += 1;
        }
        let mut signs = self.signs.clone();
        signs.remove(c.index());
        let d = LinkDiagram::new(signs, new_arcs, zero).expect("crossing removal keeps the diagram valid");
        (d, trace)
    }

    /// First arc that starts and ends at the same crossing.
    pub fn find_loop(&self) -> Option<ArcId> {
        self.arc_ids().find(|&a| {
            let arc = self.arcs[a.index()];
            arc.from.crossing == arc.to.crossing
        })
    }

    /// Removes trivial twists until the crossing graph has no loops.
    pub fn untwist_and_strip(&self) -> (LinkDiagram, UntwistReport) {
        let mut d = self.clone();
        let mut report = UntwistReport::default();
        while let Some(a) = d.find_loop() {
            let c = d.arcs[a.index()].from.crossing;
            let before = d.zero_components;
            d = d.remove_crossing(c, Slot::straight).0;
            report.twists_removed += 1;
            report.zero_components += d.zero_components - before;
        }
        (d, report)
    }

    /// Checks that the rotation system implied by the signs has genus zero.
    pub fn is_planar(&self) -> bool {
        let n = self.signs.len();
        if n == 0 {
            return true;
        }
        // dart = (arc, at_head); rotation order per crossing, counterclockwise
        let rotation = |c: CrossingId| -> [Slot; 4] {
            match self.signs[c.index()] {
                Sign::Positive => [Slot::UnderIn, Slot::OverOut, Slot::UnderOut, Slot::OverIn],
                Sign::Negative => [Slot::UnderIn, Slot::OverIn, Slot::UnderOut, Slot::OverOut],
            }
        };
        let dart_index = |c: CrossingId, s: Slot| -> usize {
            let a = self.arc_at(c, s);
            2 * a.index() + usize::from(s.is_in())
        };
        let mut seen = vec![false; 4 * n];
        let mut faces = 0;
        for start in 0..4 * n {
            if seen[start] {
                continue;
            }
            faces += 1;
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                let arc = self.arcs[d / 2];
                // leave along the arc, arrive at its other end, turn to the next slot
                let far = if d % 2 == 1 { arc.from } else { arc.to };
                let rot = rotation(far.crossing);
                let pos = rot.iter().position(|&s| s == far.slot).expect("slot in rotation");
                let next = rot[(pos + 1) % 4];
                d = dart_index(far.crossing, next);
            }
        }
        let mut uf: Vec<usize> = (0..n).collect();
        fn find(uf: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while uf[r] != r {
                r = uf[r];
            }
            let mut y = x;
            while uf[y] != r {
                let next = uf[y];
                uf[y] = r;
                y = next;
            }
            r
        }
        for arc in &self.arcs {
            let (x, y) = (find(&mut uf, arc.from.crossing.index()), find(&mut uf, arc.to.crossing.index()));
            uf[x] = y;
        }
        let k = (0..n).filter(|&v| find(&mut uf, v) == v).count() as i64;
        // V - E + F = 2k with E = 2V
        (n as i64) - 2 * (n as i64) + faces == 2 * k
    }

    /// A copy with arc ids permuted: new arc `perm[i]` is old arc `i`.
    pub fn relabel_arcs(&self, perm: &[u32]) -> LinkDiagram {
        assert_eq!(perm.len(), self.arcs.len());
        let mut arcs = self.arcs.clone();
        for (i, &p) in perm.iter().enumerate() {
            arcs[p as usize] = self.arcs[i];
        }
        LinkDiagram::new(self.signs.clone(), arcs, self.zero_components).expect("relabelling keeps validity")
    }

    /// Places `other` beside `self`; its crossings and arcs are renumbered
    /// after ours.
    pub fn disjoint_union(&self, other: &LinkDiagram) -> LinkDiagram {
        let off = self.signs.len() as u32;
        let shift = |e: Endpoint| Endpoint { crossing: CrossingId(e.crossing.0 + off), slot: e.slot };
        let mut signs = self.signs.clone();
        signs.extend_from_slice(&other.signs);
        let mut arcs = self.arcs.clone();
        arcs.extend(other.arcs.iter().map(|a| Arc { from: shift(a.from), to: shift(a.to) }));
        LinkDiagram::new(signs, arcs, self.zero_components + other.zero_components)
            .expect("union of valid diagrams is valid")
    }

    /// Inserts a one-crossing curl of the given sign into arc `a`. The new
    /// crossing gets the next crossing id; `a` keeps its id and two new arcs
    /// are appended.
    pub fn add_twist(&self, a: ArcId, sign: Sign, loop_on_over: bool) -> LinkDiagram {
        let n = self.signs.len() as u32;
        let t = CrossingId(n);
        let old = self.arcs[a.index()];
        let (enter, exit, loop_from, loop_to) = if loop_on_over {
            // enter under, go round, come back over
            (Slot::UnderIn, Slot::OverOut, Slot::UnderOut, Slot::OverIn)
        } else {
            (Slot::OverIn, Slot::UnderOut, Slot::OverOut, Slot::UnderIn)
        };
        let mut arcs = self.arcs.clone();
        arcs[a.index()] = Arc { from: old.from, to: Endpoint { crossing: t, slot: enter } };
        arcs.push(Arc { from: Endpoint { crossing: t, slot: loop_from }, to: Endpoint { crossing: t, slot: loop_to } });
        arcs.push(Arc { from: Endpoint { crossing: t, slot: exit }, to: old.to });
        let mut signs = self.signs.clone();
        signs.push(sign);
        LinkDiagram::new(signs, arcs, self.zero_components).expect("twist insertion keeps validity")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UntwistReport {
    pub twists_removed: usize,
    /// Zero-crossing circles created (and stripped) by untwisting.
    pub zero_components: usize,
}

/// The directed crossing multigraph: one vertex per crossing, one edge per arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramGraph {
    pub vertex_count: usize,
    pub edges: Vec<(ArcId, CrossingId, CrossingId)>,
}

impl DiagramGraph {
    /// A graph with synthetic arc ids, for callers that only need shape.
    pub fn from_pairs(vertex_count: usize, pairs: &[(u32, u32)]) -> Self {
        let edges =
            pairs.iter().enumerate().map(|(i, &(u, v))| (ArcId(i as u32), CrossingId(u), CrossingId(v))).collect();
        DiagramGraph { vertex_count, edges }
    }

    pub fn has_loops(&self) -> bool {
        self.edges.iter().any(|(_, u, v)| u == v)
    }

    /// Simple undirected adjacency lists, sorted, parallel edges and loops dropped.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(_, u, v) in &self.edges {
            if u != v {
                adj[u.index()].push(v.0);
                adj[v.index()].push(u.0);
            }
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}
