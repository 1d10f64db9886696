//! Tree decompositions of the crossing graph.
//!
//! Decompositions come from greedy elimination orderings. Parallel arcs
//! collapse to one adjacency; the DP reattaches arc identities itself.
//! [`make_nice`] rewrites any valid decomposition into leaf, introduce,
//! forget and binary join nodes under an empty root, stored in post-order so
//! that a plain index sweep processes children before parents.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::link::DiagramGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Heuristic {
    #[default]
    MinDegree,
    MinFill,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("decomposition has no bags")]
    NoBags,
    #[error("decomposition tree is not a tree")]
    NotATree,
    #[error("bag {bag} names vertex {vertex} outside the graph")]
    UnknownVertex { bag: usize, vertex: u32 },
    #[error("vertex {0} is in no bag")]
    MissingVertex(u32),
    #[error("edge {0}-{1} is in no bag")]
    UncoveredEdge(u32, u32),
    #[error("bags holding vertex {vertex} are disconnected (e.g. bags {first} and {second})")]
    DisconnectedTrace { vertex: u32, first: usize, second: usize },
    #[error("graph has no vertices")]
    NoVertices,
    #[error("nice node {node}: {reason}")]
    NotNice { node: usize, reason: String },
}

/// Bags are sorted vertex lists; `edges` join bag indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<u32>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// Largest bag size minus one; an empty bag alone gives -1.
    pub fn width(&self) -> Result<i64, Violation> {
        self.bags.iter().map(|b| b.len() as i64 - 1).max().ok_or(Violation::NoBags)
    }

    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); self.bags.len()];
        for &(x, y) in &self.edges {
            nb[x].push(y);
            nb[y].push(x);
        }
        nb
    }
}

pub fn width(td: &TreeDecomposition) -> Result<i64, Violation> {
    td.width()
}

/// Eliminates vertices greedily; ties go to the lowest vertex id.
pub fn greedy_decomposition(g: &DiagramGraph, heuristic: Heuristic) -> TreeDecomposition {
    let n = g.vertex_count;
    if n == 0 {
        return TreeDecomposition { bags: vec![Vec::new()], edges: Vec::new() };
    }
    let mut adj: Vec<BTreeSet<u32>> = g.adjacency().into_iter().map(|l| l.into_iter().collect()).collect();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    let mut bags = Vec::with_capacity(n);
    for _ in 0..n {
        let score = |v: usize| -> usize {
            match heuristic {
                Heuristic::MinDegree => adj[v].len(),
                Heuristic::MinFill => {
                    let nb: Vec<u32> = adj[v].iter().copied().collect();
                    let mut missing = 0;
                    for (i, &x) in nb.iter().enumerate() {
                        for &y in &nb[i + 1..] {
                            if !adj[x as usize].contains(&y) {
                                missing += 1;
                            }
                        }
                    }
                    missing
                }
            }
        };
        let v = (0..n).filter(|&v| alive[v]).min_by_key(|&v| (score(v), v)).expect("a live vertex remains");
        let nb: Vec<u32> = adj[v].iter().copied().collect();
        for (i, &x) in nb.iter().enumerate() {
            adj[x as usize].remove(&(v as u32));
            for &y in &nb[i + 1..] {
                adj[x as usize].insert(y);
                adj[y as usize].insert(x);
            }
        }
        let mut bag = nb;
        bag.push(v as u32);
        bag.sort_unstable();
        alive[v] = false;
        order.push(v);
        bags.push(bag);
    }
    // bag i hangs off the bag of its earliest-eliminated later neighbour,
    // or off the next bag when it has none
    let mut position = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n - 1 {
        let v = order[i] as u32;
        let parent = bags[i].iter().filter(|&&x| x != v).map(|&x| position[x as usize]).min().unwrap_or(i + 1);
        edges.push((i, parent));
    }
    TreeDecomposition { bags, edges }
}

/// Checks tree shape, vertex coverage, edge coverage and connected traces.
pub fn validate(td: &TreeDecomposition, g: &DiagramGraph) -> Result<(), Violation> {
    let m = td.bags.len();
    if m == 0 {
        return Err(Violation::NoBags);
    }
    if td.edges.len() != m - 1 || td.edges.iter().any(|&(x, y)| x >= m || y >= m || x == y) {
        return Err(Violation::NotATree);
    }
    let nb = td.neighbours();
    let mut seen = vec![false; m];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &y in &nb[x] {
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Violation::NotATree);
    }

    let n = g.vertex_count;
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, bag) in td.bags.iter().enumerate() {
        for &v in bag {
            holders.get_mut(v as usize).ok_or(Violation::UnknownVertex { bag: i, vertex: v })?.push(i);
        }
    }
    if let Some(v) = holders.iter().position(|h| h.is_empty()) {
        return Err(Violation::MissingVertex(v as u32));
    }
    for (u, list) in g.adjacency().iter().enumerate() {
        for &v in list.iter().filter(|&&v| v as usize > u) {
            let covered = td.bags.iter().any(|b| b.contains(&(u as u32)) && b.contains(&v));
            if !covered {
                return Err(Violation::UncoveredEdge(u as u32, v));
            }
        }
    }
    for (v, hs) in holders.iter().enumerate() {
        let inside: BTreeSet<usize> = hs.iter().copied().collect();
        let mut reached = BTreeSet::from([hs[0]]);
        let mut stack = vec![hs[0]];
        while let Some(x) = stack.pop() {
            for &y in &nb[x] {
                if inside.contains(&y) && reached.insert(y) {
                    stack.push(y);
                }
            }
        }
        if let Some(&missed) = inside.iter().find(|b| !reached.contains(b)) {
            return Err(Violation::DisconnectedTrace { vertex: v as u32, first: hs[0], second: missed });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NiceKind {
    Leaf { vertex: u32 },
    Introduce { vertex: u32, child: usize },
    Forget { vertex: u32, child: usize },
    Join { left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NiceNode {
    #[serde(flatten)]
    pub kind: NiceKind,
    pub bag: Vec<u32>,
}

impl NiceNode {
    pub fn children(&self) -> Vec<usize> {
        match self.kind {
            NiceKind::Leaf { .. } => vec![],
            NiceKind::Introduce { child, .. } | NiceKind::Forget { child, .. } => vec![child],
            NiceKind::Join { left, right } => vec![left, right],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CrossingStatus {
    Unvisited,
    Current,
    Forgotten,
}

/// A nice decomposition in post-order: every child index is smaller than its
/// parent's and the last node is the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NiceTreeDecomposition {
    pub nodes: Vec<NiceNode>,
    vertex_count: usize,
    /// Smallest node index in each subtree; subtrees are index ranges.
    #[serde(skip)]
    low: Vec<usize>,
    #[serde(skip)]
    forget_of: Vec<usize>,
}

/// Bag-count constant `c` in the bound `c * (width + 1) * |V| + 2`.
pub const NICE_BAG_FACTOR: usize = 4;

impl NiceTreeDecomposition {
    fn from_nodes(nodes: Vec<NiceNode>, vertex_count: usize) -> Self {
        let mut low: Vec<usize> = (0..nodes.len()).collect();
        let mut forget_of = vec![usize::MAX; vertex_count];
        for (i, node) in nodes.iter().enumerate() {
            for ch in node.children() {
                low[i] = low[i].min(low[ch]);
            }
            if let NiceKind::Forget { vertex, .. } = node.kind {
                forget_of[vertex as usize] = i;
            }
        }
        NiceTreeDecomposition { nodes, vertex_count, low, forget_of }
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn width(&self) -> i64 {
        self.nodes.iter().map(|n| n.bag.len() as i64 - 1).max().unwrap_or(-1)
    }

    /// The unique node that forgets `v`.
    pub fn forget_node(&self, v: u32) -> usize {
        self.forget_of[v as usize]
    }

    /// Whether `desc` lies in the subtree rooted at `anc` (inclusive).
    pub fn in_subtree(&self, anc: usize, desc: usize) -> bool {
        self.low[anc] <= desc && desc <= anc
    }

    pub fn status(&self, node: usize, v: u32) -> CrossingStatus {
        if self.nodes[node].bag.binary_search(&v).is_ok() {
            CrossingStatus::Current
        } else if self.in_subtree(node, self.forget_of[v as usize]) {
            CrossingStatus::Forgotten
        } else {
            CrossingStatus::Unvisited
        }
    }

    /// The same nodes and bags viewed as an ordinary decomposition.
    pub fn as_tree_decomposition(&self) -> TreeDecomposition {
        let mut edges = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            for ch in n.children() {
                edges.push((ch, i));
            }
        }
        TreeDecomposition { bags: self.nodes.iter().map(|n| n.bag.clone()).collect(), edges }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let nodes: Vec<serde_json::Value> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| {
                let mut v = serde_json::to_value(n).expect("node serializes");
                v["id"] = i.into();
                v
            })
            .collect();
        serde_json::json!({ "root": self.root(), "width": self.width(), "nodes": nodes })
    }
}

/// Contracts every tree edge whose one bag contains the other.
fn drop_subset_bags(td: &TreeDecomposition) -> TreeDecomposition {
    let m = td.bags.len();
    let mut nb: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
    for &(x, y) in &td.edges {
        nb[x].insert(y);
        nb[y].insert(x);
    }
    let sets: Vec<BTreeSet<u32>> = td.bags.iter().map(|b| b.iter().copied().collect()).collect();
    let mut alive = vec![true; m];
    loop {
        let found = (0..m)
            .filter(|&x| alive[x])
            .find_map(|x| nb[x].iter().find(|&&y| sets[x].is_subset(&sets[y])).map(|&y| (x, y)));
        let Some((x, y)) = found else { break };
        alive[x] = false;
        let others: Vec<usize> = nb[x].iter().copied().filter(|&z| z != y).collect();
        for z in others {
            nb[z].remove(&x);
            nb[z].insert(y);
            nb[y].insert(z);
        }
        nb[y].remove(&x);
        nb[x].clear();
    }
    let ids: Vec<usize> = (0..m).filter(|&x| alive[x]).collect();
    let mut new_id = vec![usize::MAX; m];
    for (i, &x) in ids.iter().enumerate() {
        new_id[x] = i;
    }
    let mut edges = Vec::new();
    for &x in &ids {
        for &y in &nb[x] {
            if x < y {
                edges.push((new_id[x], new_id[y]));
            }
        }
    }
    TreeDecomposition { bags: ids.iter().map(|&x| td.bags[x].clone()).collect(), edges }
}

struct NiceBuilder {
    nodes: Vec<NiceNode>,
}

impl NiceBuilder {
    fn push(&mut self, kind: NiceKind, bag: Vec<u32>) -> usize {
        self.nodes.push(NiceNode { kind, bag });
        self.nodes.len() - 1
    }

    /// Rewrites the bag of node `from` into `target` by forgets, then introduces.
    fn morph(&mut self, mut from: usize, target: &[u32]) -> usize {
        let current = self.nodes[from].bag.clone();
        let mut bag = current.clone();
        for &v in current.iter().filter(|v| target.binary_search(v).is_err()) {
            bag.retain(|&x| x != v);
            from = self.push(NiceKind::Forget { vertex: v, child: from }, bag.clone());
        }
        for &v in target.iter().filter(|v| current.binary_search(v).is_err()) {
            let at = bag.binary_search(&v).unwrap_err();
            bag.insert(at, v);
            from = self.push(NiceKind::Introduce { vertex: v, child: from }, bag.clone());
        }
        from
    }

    /// Builds bag `x` (entered from `parent`) with each child branch finished
    /// before the next starts, so every subtree is a contiguous index range.
    fn subtree(&mut self, td: &TreeDecomposition, nb: &[Vec<usize>], x: usize, parent: usize) -> usize {
        let bag = &td.bags[x];
        let mut kids: Vec<usize> = nb[x].iter().copied().filter(|&y| y != parent).collect();
        kids.sort_unstable();
        let mut top: Option<usize> = None;
        for y in kids {
            let below = self.subtree(td, nb, y, x);
            let arm = self.morph(below, bag);
            top = Some(match top {
                None => arm,
                Some(t) => self.push(NiceKind::Join { left: t, right: arm }, bag.clone()),
            });
        }
        match top {
            Some(t) => t,
            None => self.leaf_chain(bag),
        }
    }

    /// A chain from a single-vertex leaf up to `bag`.
    fn leaf_chain(&mut self, bag: &[u32]) -> usize {
        let first = bag[0];
        let leaf = self.push(NiceKind::Leaf { vertex: first }, vec![first]);
        self.morph(leaf, bag)
    }
}

/// Converts a valid decomposition of `g` into nice form with the same width.
pub fn make_nice(td: &TreeDecomposition, g: &DiagramGraph) -> Result<NiceTreeDecomposition, Violation> {
    validate(td, g)?;
    if g.vertex_count == 0 {
        return Err(Violation::NoVertices);
    }
    let td = drop_subset_bags(td);
    let nb = td.neighbours();
    // root at the largest bag (lowest index on ties) so it is never empty
    let root = (0..td.bags.len()).max_by_key(|&i| (td.bags[i].len(), std::cmp::Reverse(i))).expect("bags exist");
    let mut b = NiceBuilder { nodes: Vec::new() };
    let top = b.subtree(&td, &nb, root, usize::MAX);
    let last = b.morph(top, &[]);
    debug_assert_eq!(last, b.nodes.len() - 1);
    let nice = NiceTreeDecomposition::from_nodes(b.nodes, g.vertex_count);
    debug_assert!(validate_nice(&nice, g).is_ok());
    Ok(nice)
}

/// Full structural check of a nice decomposition against `g`.
pub fn validate_nice(ntd: &NiceTreeDecomposition, g: &DiagramGraph) -> Result<(), Violation> {
    let fail = |node: usize, reason: &str| Err(Violation::NotNice { node, reason: reason.to_string() });
    if ntd.nodes.is_empty() {
        return Err(Violation::NoBags);
    }
    let mut forgets = vec![0usize; g.vertex_count];
    let mut has_parent = vec![false; ntd.nodes.len()];
    for (i, n) in ntd.nodes.iter().enumerate() {
        if n.bag.windows(2).any(|w| w[0] >= w[1]) {
            return fail(i, "bag not sorted");
        }
        for ch in n.children() {
            if ch >= i {
                return fail(i, "child not before parent");
            }
            if std::mem::replace(&mut has_parent[ch], true) {
                return fail(ch, "two parents");
            }
        }
        let with = |bag: &[u32], v: u32| {
            let mut b = bag.to_vec();
            b.push(v);
            b.sort_unstable();
            b
        };
        match n.kind {
            NiceKind::Leaf { vertex } => {
                if n.bag != [vertex] {
                    return fail(i, "leaf bag is not its single vertex");
                }
            }
            NiceKind::Introduce { vertex, child } => {
                let cb = &ntd.nodes[child].bag;
                if cb.contains(&vertex) || with(cb, vertex) != n.bag {
                    return fail(i, "introduce does not add exactly its vertex");
                }
            }
            NiceKind::Forget { vertex, child } => {
                if n.bag.contains(&vertex) || with(&n.bag, vertex) != ntd.nodes[child].bag {
                    return fail(i, "forget does not drop exactly its vertex");
                }
                match forgets.get_mut(vertex as usize) {
                    Some(k) => *k += 1,
                    None => return fail(i, "forgets unknown vertex"),
                }
            }
            NiceKind::Join { left, right } => {
                if ntd.nodes[left].bag != n.bag || ntd.nodes[right].bag != n.bag {
                    return fail(i, "join children differ from join bag");
                }
            }
        }
    }
    let root = ntd.root();
    if !ntd.nodes[root].bag.is_empty() {
        return fail(root, "root bag not empty");
    }
    if let Some(i) = has_parent[..root].iter().position(|p| !p) {
        return fail(i, "node outside the tree");
    }
    if let Some(v) = forgets.iter().position(|&k| k != 1) {
        return fail(root, &format!("vertex {v} forgotten {} times", forgets[v]));
    }
    validate(&ntd.as_tree_decomposition(), g)
}
