use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kauffman::ArcOrder;
use crate::link::{ArcId, LinkDiagram};
use crate::treewidth::{NiceKind, NiceTreeDecomposition};

/// Arcs ranked by the depth-first pre-order position of the forget node of
/// their head crossing, so arcs into crossings forgotten nearer the root come
/// first and every subtree owns a contiguous block of ranks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeArcOrder {
    rank: Vec<u32>,
    by_rank: Vec<ArcId>,
    /// Forget node of each crossing.
    forget_bag: Vec<usize>,
    /// Pre-order position of each nice node.
    preorder: Vec<usize>,
}

/// Builds a tree-based order. `None` visits join children left first and
/// breaks ties by arc id; a seed shuffles both choices reproducibly.
pub fn tree_arc_order(d: &LinkDiagram, ntd: &NiceTreeDecomposition, seed: Option<u64>) -> TreeArcOrder {
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut preorder = vec![usize::MAX; ntd.len()];
    let mut stack = vec![ntd.root()];
    let mut next = 0;
    while let Some(x) = stack.pop() {
        preorder[x] = next;
        next += 1;
        let mut kids = ntd.nodes[x].children();
        if let (NiceKind::Join { .. }, Some(r)) = (ntd.nodes[x].kind, rng.as_mut()) {
            if r.gen_bool(0.5) {
                kids.reverse();
            }
        }
        // pushed in reverse so the first child is visited first
        stack.extend(kids.into_iter().rev());
    }
    let forget_bag: Vec<usize> = (0..d.crossing_count() as u32).map(|c| ntd.forget_node(c)).collect();
    let mut arcs: Vec<ArcId> = d.arc_ids().collect();
    if let Some(r) = rng.as_mut() {
        arcs.shuffle(r);
    }
    // stable sort keeps the shuffled tie order
    arcs.sort_by_key(|&a| preorder[forget_bag[d.arc(a).to.crossing.index()]]);
    let mut rank = vec![0; arcs.len()];
    for (r, a) in arcs.iter().enumerate() {
        rank[a.index()] = r as u32;
    }
    TreeArcOrder { rank, by_rank: arcs, forget_bag, preorder }
}

impl TreeArcOrder {
    pub fn rank(&self, a: ArcId) -> u32 {
        self.rank[a.index()]
    }

    pub fn sequence(&self) -> &[ArcId] {
        &self.by_rank
    }

    pub fn forget_bag_of(&self, c: crate::link::CrossingId) -> usize {
        self.forget_bag[c.index()]
    }

    pub fn to_arc_order(&self) -> ArcOrder {
        ArcOrder::from_sequence(self.by_rank.clone()).expect("ranks form a permutation")
    }

    /// Checks both defining conditions: ancestors' arcs rank first and each
    /// subtree's arcs occupy a contiguous block.
    pub fn is_tree_based(&self, d: &LinkDiagram, ntd: &NiceTreeDecomposition) -> bool {
        let bag = |a: ArcId| self.forget_bag[d.arc(a).to.crossing.index()];
        for a in d.arc_ids() {
            for b in d.arc_ids() {
                let (x, y) = (bag(a), bag(b));
                if x != y && ntd.in_subtree(y, x) && self.rank(b) >= self.rank(a) {
                    return false;
                }
            }
        }
        (0..ntd.len()).all(|node| {
            let ranks: Vec<u32> = d.arc_ids().filter(|&a| ntd.in_subtree(node, bag(a))).map(|a| self.rank(a)).collect();
            match (ranks.iter().min(), ranks.iter().max()) {
                (Some(lo), Some(hi)) => (hi - lo) as usize + 1 == ranks.len(),
                _ => true,
            }
        })
    }

    pub fn preorder_position(&self, node: usize) -> usize {
        self.preorder[node]
    }
}
