//! HOMFLY-PT by dynamic programming over a nice tree decomposition.
//!
//! Each bag keeps a table from configurations (ordered segments of partial
//! traversals through the forgotten crossings) to the summed leaf terms of
//! every tag assignment consistent with them. Tables are sparse: only
//! configurations that some assignment realizes are ever stored.
//!
//! When a crossing `c` is forgotten its tag is fixed and its two strands are
//! reconnected. The reconnection accepts a configuration only if it could be
//! the visiting order of a traversal that restarts from the lowest-ranked
//! untraversed arc of a tree-based order:
//!
//! * an open link from a segment into `c` must continue in the very next
//!   segment;
//! * segments that close into loops at `c` must sit at the end, and when two
//!   of them do, their in-arcs into `c` must rise in rank along the sequence
//!   (for two loops) or fall (for one loop through `c` twice).
//!
//! The strand met first is the earlier surviving segment, or, when both
//! strands close, the lower-ranked in-arc. Pass needs the over strand first;
//! switch and splice need the under strand first.

mod order;
mod table;

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

pub use order::{tree_arc_order, TreeArcOrder};
pub use table::{
    join_shuffles, process_forget, process_introduce, process_join, process_leaf, validate_table, Configuration,
    DpContext, EvaluationTable, PairMode, Tag,
};

use crate::link::{ArcId, CrossingId, LinkDiagram};
use crate::poly::{expand_delta, BiLaurent, PolyError, TriLaurent};
use crate::treewidth::{
    greedy_decomposition, make_nice, CrossingStatus, Heuristic, NiceKind, NiceTreeDecomposition, TreeDecomposition,
    Violation,
};

pub const DEFAULT_WIDTH_BUDGET: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FptError {
    #[error("the diagram has no components")]
    NoComponents,
    #[error("width {width} needs more than {budget} configurations (node {node} reached {configs})")]
    WidthBudgetExceeded { width: i64, node: usize, configs: usize, budget: usize },
    #[error("leaf node {node} has arc {arc} to a visited crossing")]
    LeafHasInternalArc { node: usize, arc: ArcId },
    #[error("introduce node {node} sees forgotten neighbour {crossing}")]
    IntroduceSeesForgottenNeighbor { node: usize, crossing: CrossingId },
    #[error("arc {arc} joins a forgotten and an unvisited crossing at node {node}")]
    ForgottenMeetsUnvisited { node: usize, arc: ArcId },
    #[error("node {node} holds {size} configurations, above the bound {bound}")]
    TableBoundExceeded { node: usize, size: usize, bound: u128 },
    #[error("invalid configuration at node {node}: {reason}")]
    InvalidConfiguration { node: usize, reason: String },
    #[error("node {node} has an unexpected kind for this transition")]
    WrongNodeKind { node: usize },
    #[error("root table has {entries} entries instead of the single empty configuration")]
    RootTable { entries: usize },
    #[error("decomposition: {0}")]
    Decomposition(#[from] Violation),
    #[error("polynomial: {0}")]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FptOptions {
    pub heuristic: Heuristic,
    /// `None` uses the canonical tree order; a seed picks another valid one.
    pub order_seed: Option<u64>,
    /// Largest table the run may build before giving up.
    pub width_budget: usize,
    /// Worker threads; 1 runs sequentially.
    pub threads: usize,
    /// Check every configuration against the bag (slow).
    pub validate_tables: bool,
    pub pairs: PairMode,
}

impl Default for FptOptions {
    fn default() -> Self {
        FptOptions {
            heuristic: Heuristic::MinDegree,
            order_seed: None,
            width_budget: DEFAULT_WIDTH_BUDGET,
            threads: 1,
            validate_tables: cfg!(debug_assertions),
            pairs: PairMode::Deferred,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DpStats {
    pub width: i64,
    pub bags: usize,
    pub peak_configs: usize,
    pub total_configs: usize,
    /// Table size at each nice node, in processing order.
    pub per_bag: Vec<usize>,
    /// Bag size at each nice node.
    pub bag_sizes: Vec<usize>,
    pub twists_removed: usize,
    pub zero_components: usize,
    pub wall_ms: f64,
}

impl DpStats {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "width": self.width,
            "bags": self.bags,
            "peak_configs": self.peak_configs,
            "total_configs": self.total_configs,
            "wall_ms": self.wall_ms,
        })
    }
}

/// `(2k)!^2`, saturating.
pub fn configuration_bound(bag_size: usize) -> u128 {
    let mut f: u128 = 1;
    for i in 2..=(2 * bag_size) as u128 {
        f = f.saturating_mul(i);
    }
    f.saturating_mul(f)
}

/// The stripped diagram and its decomposition, ready for the DP.
#[derive(Debug, Clone)]
pub struct Plan {
    pub diagram: LinkDiagram,
    pub twists_removed: usize,
    pub decomposition: Option<(TreeDecomposition, NiceTreeDecomposition)>,
}

/// Untwists `d` and decomposes what remains.
pub fn plan(d: &LinkDiagram, heuristic: Heuristic) -> Result<Plan, FptError> {
    let (stripped, report) = d.untwist_and_strip();
    let decomposition = if stripped.is_empty() {
        None
    } else {
        let g = stripped.diagram_graph();
        let td = greedy_decomposition(&g, heuristic);
        let ntd = make_nice(&td, &g)?;
        Some((td, ntd))
    };
    Ok(Plan { diagram: stripped, twists_removed: report.twists_removed, decomposition })
}

pub fn homfly_fpt(d: &LinkDiagram, options: &FptOptions) -> Result<BiLaurent, FptError> {
    homfly_fpt_with_stats(d, options).map(|(p, _)| p)
}

pub fn homfly_fpt_with_stats(d: &LinkDiagram, options: &FptOptions) -> Result<(BiLaurent, DpStats), FptError> {
    if options.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(options.threads).build().expect("thread pool starts");
        pool.install(|| run(d, options, true))
    } else {
        run(d, options, false)
    }
}

fn run(d: &LinkDiagram, options: &FptOptions, parallel: bool) -> Result<(BiLaurent, DpStats), FptError> {
    let start = Instant::now();
    let plan = plan(d, options.heuristic)?;
    let zero = plan.diagram.zero_components();
    let mut stats =
        DpStats { twists_removed: plan.twists_removed, zero_components: zero, width: -1, ..DpStats::default() };
    let Some((_, ntd)) = &plan.decomposition else {
        if zero == 0 {
            return Err(FptError::NoComponents);
        }
        let p = expand_delta(&TriLaurent::mono(1, [0, 0, zero as i32 - 1]))?;
        stats.wall_ms = start.elapsed().as_secs_f64() * 1e3;
        return Ok((p, stats));
    };
    let order = tree_arc_order(&plan.diagram, ntd, options.order_seed);
    let ctx = DpContext {
        diagram: &plan.diagram,
        ntd,
        order: &order,
        w0: plan.diagram.writhe(),
        width_budget: options.width_budget,
        parallel,
        pairs: options.pairs,
    };
    let root = evaluate(&ctx, options.validate_tables, &mut stats)?;
    let q = root.mul_monomial([0, 0, zero as i32], false);
    if let Some(m) = q.min_exponent(2) {
        if m < 0 {
            return Err(FptError::Poly(PolyError::NegativeDeltaExponent(m)));
        }
    }
    let p = expand_delta(&q)?;
    stats.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok((p, stats))
}

/// Processes every node bottom-up and returns the root evaluation.
pub fn evaluate(ctx: &DpContext, validate: bool, stats: &mut DpStats) -> Result<TriLaurent, FptError> {
    let ntd = ctx.ntd;
    stats.width = ntd.width();
    stats.bags = ntd.len();
    let mut tables: Vec<Option<EvaluationTable>> = vec![None; ntd.len()];
    for node in 0..ntd.len() {
        check_separation(ctx, node)?;
        let mut take = |i: usize| tables[i].take().expect("child table computed before parent");
        let table = match ntd.nodes[node].kind {
            NiceKind::Leaf { .. } => process_leaf(ctx, node)?,
            NiceKind::Introduce { child, .. } => process_introduce(ctx, node, &take(child))?,
            NiceKind::Forget { child, .. } => process_forget(ctx, node, &take(child))?,
            NiceKind::Join { left, right } => {
                let (l, r) = (take(left), take(right));
                process_join(ctx, node, &l, &r)?
            }
        };
        let bag = ntd.nodes[node].bag.len();
        let bound = configuration_bound(bag);
        if table.len() as u128 > bound {
            return Err(FptError::TableBoundExceeded { node, size: table.len(), bound });
        }
        if validate {
            validate_table(ctx, node, &table)?;
        }
        stats.per_bag.push(table.len());
        stats.bag_sizes.push(bag);
        stats.total_configs += table.len();
        stats.peak_configs = stats.peak_configs.max(table.len());
        tables[node] = Some(table);
    }
    let root = tables[ntd.root()].take().expect("root computed");
    match root.get(&Configuration::default()) {
        Some(q) if root.len() == 1 => Ok(q.clone()),
        _ => Err(FptError::RootTable { entries: root.len() }),
    }
}

/// No arc may join a forgotten crossing to an unvisited one.
fn check_separation(ctx: &DpContext, node: usize) -> Result<(), FptError> {
    use CrossingStatus::*;
    for a in ctx.diagram.arc_ids() {
        let arc = ctx.diagram.arc(a);
        let pair = (ctx.ntd.status(node, arc.from.crossing.0), ctx.ntd.status(node, arc.to.crossing.0));
        if matches!(pair, (Forgotten, Unvisited) | (Unvisited, Forgotten)) {
            return Err(FptError::ForgottenMeetsUnvisited { node, arc: a });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
