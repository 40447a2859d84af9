//! The acceptance checks, shared by `mql verify` and the test suite.
//!
//! Each check returns a [`Check`] with its failures and informational
//! notes. Solvers are built once per instance and reused across checks.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::adversaries::{GreedyPairingAdversary, PartitionAdversary};
use crate::error::{Error, Result};
use crate::knowledge::{KnowledgeSet, PairingGraph};
use crate::questioners::{bounds, Majority3, Optimal, PairBins, PairingBins};
use crate::session::{run, AnswerSource, Questioner, Tracking};
use crate::solver::{existence_table, worst_case_count, ExactSolver, GameValue, SolveOptions};
use crate::types::{honest_answer, Answer, BallId, Coloring, Model, Pair, Query, Verdict};

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Restrict every sweep to `n <= 6`.
    pub fast: bool,
    pub threads: usize,
    /// Seed for the random transcript corpus.
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { fast: false, threads: 1, seed: 0x6d71_6c00 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub seconds: f64,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

/// Check ids and names, in run order.
pub const CHECKS: [(u8, &str); 8] = [
    (1, "exact-small-values"),
    (2, "pairing-closed-form"),
    (3, "pair-query-closed-form"),
    (4, "existence-thresholds"),
    (5, "upper-bound-compliance"),
    (6, "lower-bound-adversaries"),
    (7, "knowledge-properties"),
    (8, "sandwich"),
];

#[derive(Default)]
struct Report {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Report {
    fn ensure(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }

    fn note(&mut self, msg: String) {
        self.notes.push(msg);
    }
}

type Instance = (usize, usize, Model);

/// Runs the checks, caching solved instances between them.
pub struct Verifier {
    options: VerifyOptions,
    solvers: Mutex<HashMap<Instance, (Arc<ExactSolver>, GameValue)>>,
}

impl Verifier {
    pub fn new(options: VerifyOptions) -> Self {
        Verifier { options, solvers: Mutex::new(HashMap::new()) }
    }

    fn max_n(&self, full: usize) -> usize {
        if self.options.fast { full.min(6) } else { full }
    }

    /// Solver for an instance, with its root value already computed.
    pub fn solved(&self, n: usize, k: usize, model: Model) -> Result<(Arc<ExactSolver>, GameValue)> {
        if let Some(entry) = self.solvers.lock().expect("solver cache").get(&(n, k, model)) {
            return Ok(entry.clone());
        }
        let options = SolveOptions { threads: self.options.threads, ..Default::default() };
        let solver = Arc::new(ExactSolver::new(n, k, model, &options)?);
        let value = solver.game_value()?;
        self.solvers.lock().expect("solver cache").insert((n, k, model), (solver.clone(), value));
        Ok((solver, value))
    }

    fn value(&self, n: usize, k: usize, model: Model) -> Result<GameValue> {
        Ok(self.solved(n, k, model)?.1)
    }

    pub fn run_all(&self) -> Vec<Check> {
        CHECKS.iter().map(|&(id, _)| self.run(id)).collect()
    }

    pub fn run(&self, id: u8) -> Check {
        let (_, name) = *CHECKS.iter().find(|(i, _)| *i == id).expect("known check id");
        let start = Instant::now();
        let mut report = Report::default();
        let limit = match id {
            1 => Some(Duration::from_secs(300)),
            2 | 5 => Some(Duration::from_secs(600)),
            _ => None,
        };
        let outcome = match id {
            1 => self.exact_small_values(&mut report),
            2 => self.pairing_closed_form(&mut report),
            3 => self.pair_query_closed_form(&mut report),
            4 => self.existence_thresholds(&mut report),
            5 => self.upper_bound_compliance(&mut report),
            6 => self.lower_bound_adversaries(&mut report),
            7 => self.knowledge_properties(&mut report),
            _ => self.sandwich(&mut report),
        };
        if let Err(e) = outcome {
            report.failures.push(format!("error: {e}"));
        }
        let elapsed = start.elapsed();
        if let Some(limit) = limit {
            report.ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"));
        }
        Check {
            id,
            name,
            passed: report.failures.is_empty(),
            seconds: elapsed.as_secs_f64(),
            failures: report.failures,
            notes: report.notes,
        }
    }

    fn exact_small_values(&self, r: &mut Report) -> Result<()> {
        for (n, expected) in [(4, 4), (5, 4), (6, 7)] {
            let v = self.value(n, 3, Model::Yn)?;
            r.ensure(v == GameValue::exact(expected), || format!("q_3({n}) = {v}, expected {expected}"));
            r.note(format!("q_3({n}) = {v}"));
        }
        Ok(())
    }

    fn pairing_closed_form(&self, r: &mut Report) -> Result<()> {
        let top = self.max_n(8);
        let mut values = HashMap::new();
        for n in 3..=top {
            let v = self.value(n, 3, Model::Pairing)?;
            let expected = bounds::pairing3_exact(n) as u32;
            r.ensure(v == GameValue::exact(expected), || format!("q^p_3({n}) = {v}, expected {expected}"));
            values.insert(n, v.queries);
        }
        r.note(format!("q^p_3(3..={top}) = {:?}", (3..=top).map(|n| values[&n].unwrap_or(0)).collect::<Vec<_>>()));
        if top >= 7 {
            r.ensure(values[&6] > values[&7], || "q^p_3(6) does not exceed q^p_3(7)".into());
        }
        Ok(())
    }

    fn pair_query_closed_form(&self, r: &mut Report) -> Result<()> {
        for model in [Model::Yn, Model::Pairing] {
            for n in 2..=self.max_n(9) {
                let v = self.value(n, 2, model)?;
                let expected = bounds::pairs_exact(n) as u32;
                r.ensure(v == GameValue::exact(expected), || format!("{model} q_2({n}) = {v}, expected {expected}"));
            }
        }
        Ok(())
    }

    fn existence_thresholds(&self, r: &mut Report) -> Result<()> {
        for k in [3, 4] {
            for model in [Model::Yn, Model::Pairing] {
                let (threshold, top) = match model {
                    Model::Yn => (2 * k - 2, self.max_n(8)),
                    Model::Pairing => (2 * k - 3, self.max_n(9)),
                };
                let table = existence_table(k, model, k..=top)?;
                for (n, solvable) in table {
                    if (k, n, model) == (3, 3, Model::Yn) {
                        let word = if solvable { "solvable" } else { "unsolvable" };
                        r.note(format!("k = 3, n = 3, yn: {word} (recorded, not enforced)"));
                        continue;
                    }
                    r.ensure(solvable == (n >= threshold), || {
                        format!("k = {k}, n = {n}, {model}: solvable = {solvable}, threshold {threshold}")
                    });
                }
            }
        }
        Ok(())
    }

    fn upper_bound_compliance(&self, r: &mut Report) -> Result<()> {
        let top = if self.options.fast { 8 } else { 14 };
        for n in 4..=top {
            let w = worst_case_count(&Majority3::PLAIN, n, 3, Model::Yn)?;
            let bound = bounds::majority3_upper(n);
            r.ensure(w.all_correct, || format!("majority3 wrong verdict at n = {n}"));
            r.ensure(w.max_queries <= bound, || format!("majority3 uses {} > {bound} at n = {n}", w.max_queries));
        }
        for n in 3..=self.max_n(10) {
            let w = worst_case_count(&PairingBins, n, 3, Model::Pairing)?;
            let bound = bounds::pairing3_exact(n);
            r.ensure(w.all_correct, || format!("pairing-bins uncertified verdict at n = {n}"));
            r.ensure(w.max_queries <= bound, || format!("pairing-bins uses {} > {bound} at n = {n}", w.max_queries));
        }
        Ok(())
    }

    fn lower_bound_adversaries(&self, r: &mut Report) -> Result<()> {
        for n in [6, 8, 10].into_iter().filter(|&n| n <= self.max_n(10)) {
            let mut questioners: Vec<Box<dyn Questioner>> =
                vec![Box::new(Majority3::PLAIN), Box::new(Majority3::EXHAUSTIVE), Box::new(Majority3::WITH_GAP)];
            if n <= 8 {
                questioners.push(Box::new(Optimal::new(self.solved(n, 3, Model::Yn)?.0)));
            }
            for q in &questioners {
                let count = forced(q.as_ref(), &mut PartitionAdversary::new(n)?, Model::Yn, n)?;
                r.ensure(count >= n - 1, || format!("partition forces only {count} from {} at n = {n}", q.name()));
            }
        }
        for n in 3..=self.max_n(12) {
            let expected = bounds::pairing3_exact(n);
            let count = forced(&PairingBins, &mut GreedyPairingAdversary::new(n)?, Model::Pairing, n)?;
            r.ensure(count == expected, || format!("greedy forces {count} from pairing-bins at n = {n}, expected {expected}"));
            let optimal = Optimal::new(self.solved(n, 3, Model::Pairing)?.0);
            let count = forced(&optimal, &mut GreedyPairingAdversary::new(n)?, Model::Pairing, n)?;
            r.ensure(count >= expected, || format!("greedy forces only {count} from optimal at n = {n}"));
        }
        Ok(())
    }

    fn knowledge_properties(&self, r: &mut Report) -> Result<()> {
        let mut stats = CorpusStats::default();
        for n in 3..=self.max_n(6).min(6) {
            let steps = all_steps(n);
            let mut prefix = Vec::new();
            walk_multisets(&steps, 0, 4, &mut prefix, &KnowledgeSet::full(n)?, Some(&PairingGraph::new(n)?), r, &mut stats);
        }
        let count = if self.options.fast { 1_000 } else { 10_000 };
        let mut rng = StdRng::seed_from_u64(self.options.seed);
        for _ in 0..count {
            let n = rng.gen_range(4..=self.max_n(8));
            let t = random_transcript(&mut rng, n);
            check_transcript(n, &t, r, &mut stats);
        }
        r.note(format!(
            "transcripts: {} consistent, {} inconsistent, {} random",
            stats.consistent, stats.inconsistent, count
        ));

        let mut graphs = 0usize;
        let mut matched = 0usize;
        for n in 2..=self.max_n(7) {
            let edges: Vec<Pair> = (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| Pair::new(BallId(a), BallId(b)).expect("distinct")))
                .collect();
            for subset in 0u32..(1 << edges.len()) {
                let chosen = edges.iter().enumerate().filter(|(i, _)| subset >> i & 1 == 1).map(|(_, e)| *e);
                let Ok(g) = PairingGraph::from_diff_edges(n, chosen) else { continue };
                graphs += 1;
                let verdict = g.structural_verdict();
                if matches!(verdict, Verdict::Majority { .. }) {
                    r.ensure(g.edge_lower_bound_check(), || format!("edge bound fails on {:?}", g.diff_edges()));
                }
                if let Some(b) = g.majority_by_matching() {
                    matched += 1;
                    r.ensure(g.certifies(&Verdict::majority(b.0)), || {
                        format!("matching names {b:?} but {verdict:?} on {:?}", g.diff_edges())
                    });
                }
            }
        }
        r.note(format!("edge-bound graphs: {graphs} satisfiable, {matched} with a matching verdict"));
        Ok(())
    }

    fn sandwich(&self, r: &mut Report) -> Result<()> {
        let mut instances: Vec<Instance> = Vec::new();
        instances.extend((4..=self.max_n(8)).map(|n| (n, 3, Model::Yn)));
        instances.extend((3..=self.max_n(10)).map(|n| (n, 3, Model::Pairing)));
        for model in [Model::Yn, Model::Pairing] {
            instances.extend((2..=self.max_n(9)).map(|n| (n, 2, model)));
        }
        for (n, k, model) in instances {
            let (solver, value) = self.solved(n, k, model)?;
            let Some(v) = value.queries.map(|v| v as usize) else {
                r.ensure(false, || format!("({n}, {k}, {model}) unsolvable"));
                continue;
            };
            let optimal = Optimal::new(solver);
            if k == 3 && model == Model::Yn && n % 2 == 0 {
                let c = forced(&optimal, &mut PartitionAdversary::new(n)?, model, n)?;
                r.ensure(c <= v, || format!("partition forces {c} > {v} at n = {n}"));
            }
            if k == 3 && model == Model::Pairing {
                let c = forced(&optimal, &mut GreedyPairingAdversary::new(n)?, model, n)?;
                r.ensure(c <= v, || format!("greedy forces {c} > {v} at n = {n}"));
            }
            let mut questioners: Vec<Box<dyn Questioner>> = vec![Box::new(optimal)];
            match (k, model) {
                (3, Model::Yn) => {
                    questioners.push(Box::new(Majority3::PLAIN));
                    questioners.push(Box::new(Majority3::EXHAUSTIVE));
                    questioners.push(Box::new(Majority3::WITH_GAP));
                }
                (3, Model::Pairing) => questioners.push(Box::new(PairingBins)),
                _ => questioners.push(Box::new(PairBins)),
            }
            for q in &questioners {
                let w = worst_case_count(q.as_ref(), n, k, model)?;
                r.ensure(w.all_correct, || format!("{} wrong at ({n}, {k}, {model})", q.name()));
                r.ensure(v <= w.max_queries, || {
                    format!("value {v} exceeds {} worst case {} at ({n}, {k}, {model})", q.name(), w.max_queries)
                });
                if q.name() == "optimal" {
                    r.ensure(w.max_queries == v, || format!("optimal worst case {} != {v}", w.max_queries));
                }
            }
            if k == 3 && model == Model::Yn {
                let (lo, hi) = (bounds::yn3_lower(n), bounds::majority3_upper(n));
                r.ensure(lo <= v && v <= hi, || format!("q_3({n}) = {v} outside [{lo}, {hi}]"));
                r.note(format!("q_3({n}) = {v} in [{lo}, {hi}]"));
            }
        }
        Ok(())
    }
}

fn forced(q: &dyn Questioner, adversary: &mut dyn AnswerSource, model: Model, n: usize) -> Result<usize> {
    let r = run(q, adversary, model, n, Tracking::On)?;
    if r.certified != Some(true) {
        return Err(Error::Precondition(format!("{} stopped without a certified verdict", q.name())));
    }
    Ok(r.query_count)
}

#[derive(Default)]
struct CorpusStats {
    consistent: usize,
    inconsistent: usize,
}

/// Every triple with every reply shape: "yes", or "no" with each pair.
fn all_steps(n: usize) -> Vec<(Query, Answer)> {
    Query::all(n, 3)
        .into_iter()
        .flat_map(|q| {
            let answers: Vec<Answer> = std::iter::once(Answer::Yes).chain(q.pairs().map(Answer::no_with)).collect();
            answers.into_iter().map(move |a| (q, a))
        })
        .collect()
}

/// Depth-first over multisets of steps, extending each consistent prefix.
/// The graph is `None` once the prefix has become unsatisfiable.
#[allow(clippy::too_many_arguments)]
fn walk_multisets(
    steps: &[(Query, Answer)],
    start: usize,
    depth: usize,
    prefix: &mut Vec<(Query, Answer)>,
    ks: &KnowledgeSet,
    graph: Option<&PairingGraph>,
    r: &mut Report,
    stats: &mut CorpusStats,
) {
    compare(ks, graph, prefix, r, stats);
    if depth == 0 || graph.is_none() {
        return;
    }
    for (i, (q, a)) in steps.iter().enumerate().skip(start) {
        let next = ks.refine(q, a).unwrap_or_else(|_| KnowledgeSet::empty(ks.n()).expect("same n"));
        r.ensure(next.is_subset(ks), || format!("refine grew knowledge after {prefix:?}"));
        let mut g = graph.expect("checked above").clone();
        let g = g.apply(q, a).ok().map(|()| g);
        prefix.push((*q, *a));
        if g.is_none() {
            // extensions of an unsatisfiable transcript stay unsatisfiable
            compare(&next, None, prefix, r, stats);
        } else {
            walk_multisets(steps, i, depth - 1, prefix, &next, g.as_ref(), r, stats);
        }
        prefix.pop();
    }
}

fn compare(
    ks: &KnowledgeSet,
    graph: Option<&PairingGraph>,
    prefix: &[(Query, Answer)],
    r: &mut Report,
    stats: &mut CorpusStats,
) {
    match graph {
        None => {
            stats.inconsistent += 1;
            r.ensure(ks.is_empty(), || format!("graph rejects satisfiable {prefix:?}"));
        }
        Some(g) => {
            stats.consistent += 1;
            r.ensure(!ks.is_empty(), || format!("graph accepts unsatisfiable {prefix:?}"));
            r.ensure(ks.is_swap_closed(), || format!("knowledge not swap-closed after {prefix:?}"));
            if let Ok(v) = ks.verdict() {
                let s = g.structural_verdict();
                r.ensure(s == v, || format!("structural {s:?} != enumerated {v:?} after {prefix:?}"));
            }
            if let Some(b) = g.majority_by_matching() {
                r.ensure(ks.certifies(&Verdict::majority(b.0)), || format!("matching names {b:?} after {prefix:?}"));
            }
        }
    }
}

/// A Pairing transcript of 5 to 12 steps. Mostly honest replies for a
/// random coloring with a random witness; one in four uses arbitrary
/// replies, which may be inconsistent.
fn random_transcript(rng: &mut StdRng, n: usize) -> Vec<(Query, Answer)> {
    let len = rng.gen_range(5..=12);
    let reds: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
    let c = Coloring::new(n, reds).expect("balls in range");
    let honest = rng.gen_range(0..4) != 0;
    let queries = Query::all(n, 3);
    (0..len)
        .map(|_| {
            let q = *queries.choose(rng).expect("nonempty");
            let a = if honest {
                match honest_answer(&c, &q, Model::Yn) {
                    Answer::Yes => Answer::Yes,
                    _ => {
                        let witnesses: Vec<Pair> = q.pairs().filter(|p| !c.same_color(p.lo(), p.hi())).collect();
                        Answer::no_with(*witnesses.choose(rng).expect("mixed query"))
                    }
                }
            } else {
                let pairs: Vec<Pair> = q.pairs().collect();
                if rng.gen_bool(0.25) { Answer::Yes } else { Answer::no_with(*pairs.choose(rng).expect("pairs")) }
            };
            (q, a)
        })
        .collect()
}

fn check_transcript(n: usize, t: &[(Query, Answer)], r: &mut Report, stats: &mut CorpusStats) {
    let mut ks = KnowledgeSet::full(n).expect("small n");
    let mut graph = Some(PairingGraph::new(n).expect("small n"));
    for (i, (q, a)) in t.iter().enumerate() {
        let next = ks.refine(q, a).unwrap_or_else(|_| KnowledgeSet::empty(ks.n()).expect("same n"));
        r.ensure(next.is_subset(&ks), || format!("refine grew knowledge at step {i} of {t:?}"));
        ks = next;
        if let Some(g) = graph.as_mut() {
            if g.apply(q, a).is_err() {
                graph = None;
            }
        }
    }
    compare(&ks, graph.as_ref(), t, r, stats);
}
