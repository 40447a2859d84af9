//! Answer sources: the honest oracle, the two scripted lower-bound
//! adversaries, and the solver-backed optimal adversary.

use std::sync::Arc;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::knowledge::PairingGraph;
use crate::session::AnswerSource;
use crate::solver::{ExactSolver, Position};
use crate::types::{honest_answer, Answer, BallId, BallSet, Coloring, Model, Query};

/// Answers truthfully for a fixed coloring.
#[derive(Clone, Debug)]
pub struct HonestOracle {
    coloring: Coloring,
    model: Model,
}

impl HonestOracle {
    pub fn new(coloring: Coloring, model: Model) -> Self {
        HonestOracle { coloring, model }
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }
}

impl AnswerSource for HonestOracle {
    fn answer(&mut self, q: &Query) -> Result<Answer> {
        Ok(honest_answer(&self.coloring, q, self.model))
    }
}

/// Feasibility limit for enumerating half-size subsets.
pub const MAX_PARTITION_BALLS: usize = 16;

fn splits(q: BallSet, x: BallSet) -> bool {
    !q.is_subset(x) && !q.is_disjoint(x)
}

/// The lexicographically smallest half-size set `X` such that no query lies
/// inside `X` or inside its complement, or `None` when no such set exists.
pub fn find_partition_witness(queries: &[Query], n: usize) -> Result<Option<BallSet>> {
    if n % 2 == 1 || n < 2 {
        return Err(Error::Precondition(format!("partition witness needs even n >= 2, got {n}")));
    }
    if n > MAX_PARTITION_BALLS {
        return Err(Error::TooLarge(format!("partition enumeration beyond {MAX_PARTITION_BALLS} balls")));
    }
    Ok((0..n)
        .combinations(n / 2)
        .map(|c| c.into_iter().map(BallId).collect::<BallSet>())
        .find(|&x| queries.iter().all(|q| splits(q.balls(), x))))
}

/// Y/N adversary for even `n` and triple queries. It says "no" while some
/// half-size set splits every query so far. At the first query that no
/// such set survives, it commits to the set that split all earlier
/// queries; from then on it says "yes" exactly to queries inside that set
/// or inside its complement.
#[derive(Clone, Debug)]
pub struct PartitionAdversary {
    n: usize,
    queries: Vec<Query>,
    committed: Option<BallSet>,
}

impl PartitionAdversary {
    pub fn new(n: usize) -> Result<Self> {
        if n % 2 == 1 || n < 4 {
            return Err(Error::Precondition(format!("partition adversary needs even n >= 4, got {n}")));
        }
        if n > MAX_PARTITION_BALLS {
            return Err(Error::TooLarge(format!("partition adversary beyond {MAX_PARTITION_BALLS} balls")));
        }
        Ok(PartitionAdversary { n, queries: Vec::new(), committed: None })
    }

    pub fn committed(&self) -> Option<BallSet> {
        self.committed
    }
}

impl AnswerSource for PartitionAdversary {
    fn answer(&mut self, q: &Query) -> Result<Answer> {
        if q.k() != 3 {
            return Err(Error::Precondition("partition adversary answers triples only".into()));
        }
        if let Some(x) = self.committed {
            self.queries.push(*q);
            return Ok(if splits(q.balls(), x) { Answer::NO } else { Answer::Yes });
        }
        let before = find_partition_witness(&self.queries, self.n)?
            .expect("a splitting set survives until commitment");
        self.queries.push(*q);
        if splits(q.balls(), before) {
            // the smallest witness still splits, so the property still fails
            return Ok(Answer::NO);
        }
        if find_partition_witness(&self.queries, self.n)?.is_some() {
            return Ok(Answer::NO);
        }
        self.committed = Some(before);
        Ok(Answer::Yes)
    }
}

/// Pairing adversary that says "no" whenever the query is not already known
/// to be monochromatic, showing the lexicographically smallest pair that may
/// differ. For even `n`, once the witnesses form `n/2 - 1` independent
/// edges, it avoids joining the last two isolated balls when it can.
#[derive(Clone, Debug)]
pub struct GreedyPairingAdversary {
    graph: PairingGraph,
}

impl GreedyPairingAdversary {
    pub fn new(n: usize) -> Result<Self> {
        Ok(GreedyPairingAdversary { graph: PairingGraph::new(n)? })
    }

    pub fn graph(&self) -> &PairingGraph {
        &self.graph
    }

    /// The two isolated balls, when the different-color edges form a
    /// matching of size `n/2 - 1` and nothing else is known.
    fn last_isolated_pair(&self) -> Option<BallSet> {
        let n = self.graph.n();
        if n % 2 == 1 || !self.graph.same_edges().is_empty() || self.graph.diff_edges().len() + 1 != n / 2 {
            return None;
        }
        let mut covered = BallSet::EMPTY;
        for e in self.graph.diff_edges() {
            if !covered.is_disjoint(e.as_set()) {
                return None;
            }
            covered = covered.union(e.as_set());
        }
        Some(covered.complement(n))
    }
}

impl AnswerSource for GreedyPairingAdversary {
    fn answer(&mut self, q: &Query) -> Result<Answer> {
        if self.graph.forced_monochromatic(q.balls()) {
            self.graph.apply(q, &Answer::Yes)?;
            return Ok(Answer::Yes);
        }
        let legal: Vec<_> = q.pairs().filter(|p| self.graph.relation(p.lo(), p.hi()) != Some(false)).collect();
        let avoid = self.last_isolated_pair();
        let witness = legal
            .iter()
            .find(|p| Some(p.as_set()) != avoid)
            .or(legal.first())
            .copied()
            .expect("a non-forced query has a pair that may differ");
        let a = Answer::no_with(witness);
        self.graph.apply(q, &a)?;
        Ok(a)
    }
}

/// Replies with an answer of maximal remaining game value, according to the
/// exact solver.
pub struct ExactAdversary {
    solver: Arc<ExactSolver>,
    position: Position,
}

impl ExactAdversary {
    pub fn new(solver: Arc<ExactSolver>) -> Self {
        let position = solver.root();
        ExactAdversary { solver, position }
    }
}

impl AnswerSource for ExactAdversary {
    fn answer(&mut self, q: &Query) -> Result<Answer> {
        let (a, next) = self.solver.best_answer(&self.position, q)?;
        self.position = next;
        Ok(a)
    }
}

/// Names accepted by [`by_name`], besides `honest:<coloring>`.
pub const NAMES: [&str; 3] = ["partition", "greedy", "exact"];

/// Builds an adversary from its CLI name. `exact` needs a solver.
pub fn by_name(
    name: &str,
    model: Model,
    n: usize,
    solver: Option<Arc<ExactSolver>>,
) -> Result<Box<dyn AnswerSource>> {
    if let Some(spec) = name.strip_prefix("honest:") {
        let c: Coloring = spec.parse()?;
        if c.n() != n {
            return Err(Error::InvalidColoring(format!("coloring has {} balls, expected {n}", c.n())));
        }
        return Ok(Box::new(HonestOracle::new(c, model)));
    }
    match name {
        "partition" if model == Model::Yn => Ok(Box::new(PartitionAdversary::new(n)?)),
        "greedy" if model == Model::Pairing => Ok(Box::new(GreedyPairingAdversary::new(n)?)),
        "exact" => {
            let solver = solver.ok_or_else(|| Error::Precondition("exact adversary needs a solver".into()))?;
            Ok(Box::new(ExactAdversary::new(solver)))
        }
        "partition" | "greedy" => Err(Error::Precondition(format!("{name} adversary does not support the {model} model"))),
        other => Err(Error::Precondition(format!("unknown adversary {other:?}"))),
    }
}
