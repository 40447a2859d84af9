//! What the questioner knows after a sequence of answers.
//!
//! Two representations are kept. [`KnowledgeSet`] lists every consistent
//! coloring and works in both models for small `n`. [`PairingGraph`] keeps
//! only same-color and different-color constraints; in the Pairing model
//! this captures the knowledge exactly.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::types::{
    Answer, BallId, BallSet, Coloring, Model, Pair, Query, Transcript, Verdict, MAX_BALLS,
    MAX_ENUMERATED,
};

/// The set of colorings consistent with the play so far.
#[derive(Clone, PartialEq, Eq)]
pub struct KnowledgeSet {
    n: usize,
    colorings: FixedBitSet,
}

impl KnowledgeSet {
    /// All `2^n` colorings.
    pub fn full(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_ENUMERATED {
            return Err(Error::TooLarge(format!(
                "enumerated knowledge needs 1 <= n <= {MAX_ENUMERATED}, got {n}"
            )));
        }
        let mut colorings = FixedBitSet::with_capacity(1 << n);
        colorings.insert_range(..);
        Ok(KnowledgeSet { n, colorings })
    }

    /// No colorings at all: what an unsatisfiable transcript leaves.
    pub fn empty(n: usize) -> Result<Self> {
        let mut ks = KnowledgeSet::full(n)?;
        ks.colorings.clear();
        Ok(ks)
    }

    /// Knowledge after replaying every step of `t` from full knowledge.
    pub fn from_transcript(t: &Transcript) -> Result<Self> {
        let mut ks = KnowledgeSet::full(t.n())?;
        for s in t.steps() {
            ks = ks.refine(&s.query, &s.answer)?;
        }
        Ok(ks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.colorings.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.colorings.is_clear()
    }

    pub fn contains(&self, c: &Coloring) -> bool {
        c.n() == self.n && self.colorings.contains(c.reds().bits() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = Coloring> + '_ {
        self.colorings.ones().map(|m| Coloring::from_mask(self.n, m as u32))
    }

    pub fn is_subset(&self, other: &KnowledgeSet) -> bool {
        self.colorings.is_subset(&other.colorings)
    }

    /// Keeps the colorings that could have produced `a` to `q`. Fails when
    /// nothing survives.
    pub fn refine(&self, q: &Query, a: &Answer) -> Result<Self> {
        let mut colorings = FixedBitSet::with_capacity(1 << self.n);
        for c in self.iter() {
            if a.consistent_with(&c, q) {
                colorings.insert(c.reds().bits() as usize);
            }
        }
        if colorings.is_clear() {
            return Err(Error::EmptyKnowledge);
        }
        Ok(KnowledgeSet { n: self.n, colorings })
    }

    pub fn is_swap_closed(&self) -> bool {
        self.iter().all(|c| self.contains(&c.swap()))
    }

    pub fn verdict(&self) -> Result<Verdict> {
        if self.is_empty() {
            return Err(Error::EmptyKnowledge);
        }
        let mut balanced = 0usize;
        let mut always_major = BallSet::full(self.n);
        for c in self.iter() {
            match c.majority_class() {
                None => {
                    balanced += 1;
                    always_major = BallSet::EMPTY;
                }
                Some(class) => always_major = always_major.intersection(class),
            }
        }
        Ok(if balanced == self.len() {
            Verdict::NoMajority
        } else if let Some(ball) = always_major.min() {
            Verdict::Majority { ball }
        } else {
            Verdict::Unknown
        })
    }

    /// Whether `v` is right for every coloring still possible.
    pub fn certifies(&self, v: &Verdict) -> bool {
        v.is_known() && !self.is_empty() && self.iter().all(|c| v.is_correct_for(&c))
    }
}

impl std::fmt::Debug for KnowledgeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter().map(|c| c.to_string())).finish()
    }
}

/// Union-find where each element carries its color parity relative to the
/// root.
#[derive(Clone, Debug)]
struct ParityDsu {
    parent: Vec<usize>,
    parity: Vec<bool>,
}

impl ParityDsu {
    fn new(n: usize) -> Self {
        ParityDsu { parent: (0..n).collect(), parity: vec![false; n] }
    }

    fn find(&self, mut x: usize) -> (usize, bool) {
        let mut p = false;
        while self.parent[x] != x {
            p ^= self.parity[x];
            x = self.parent[x];
        }
        (x, p)
    }

    /// `Some(true)` when `a` and `b` are forced different, `Some(false)` when
    /// forced equal, `None` when unrelated.
    fn relation(&self, a: usize, b: usize) -> Option<bool> {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        (ra == rb).then_some(pa ^ pb)
    }

    /// Records that `a` and `b` differ (`differ = true`) or match.
    fn union(&mut self, a: usize, b: usize, differ: bool) -> Result<()> {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return if pa ^ pb == differ { Ok(()) } else { Err(Error::Unsatisfiable) };
        }
        self.parent[rb] = ra;
        self.parity[rb] = pa ^ pb ^ differ;
        Ok(())
    }
}

/// One connected constraint component with its forced two-sidedness.
///
/// `side_a` is the larger side; on ties it is the side holding the
/// lowest-id member. `delta = |side_a| - |side_b|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ComponentSummary {
    pub members: BallSet,
    pub side_a: BallSet,
    pub side_b: BallSet,
    pub delta: usize,
}

/// A maximum set of independent different-color edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matching {
    pub size: usize,
    pub edges: Vec<Pair>,
    pub uncovered: BallSet,
}

/// Same-color and different-color constraints from Pairing answers.
#[derive(Clone, Debug)]
pub struct PairingGraph {
    n: usize,
    same: BTreeSet<Pair>,
    diff: BTreeSet<Pair>,
    dsu: ParityDsu,
}

impl PairingGraph {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_BALLS {
            return Err(Error::TooManyBalls { n, max: MAX_BALLS });
        }
        Ok(PairingGraph { n, same: BTreeSet::new(), diff: BTreeSet::new(), dsu: ParityDsu::new(n) })
    }

    pub fn from_transcript(t: &Transcript) -> Result<Self> {
        if t.model() != Model::Pairing {
            return Err(Error::Precondition("pairing graph needs a Pairing transcript".into()));
        }
        let mut g = PairingGraph::new(t.n())?;
        for s in t.steps() {
            g.apply(&s.query, &s.answer)?;
        }
        Ok(g)
    }

    /// Graph built from different-color edges only.
    pub fn from_diff_edges(n: usize, edges: impl IntoIterator<Item = Pair>) -> Result<Self> {
        let mut g = PairingGraph::new(n)?;
        for e in edges {
            g.add_diff(e)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn same_edges(&self) -> &BTreeSet<Pair> {
        &self.same
    }

    pub fn diff_edges(&self) -> &BTreeSet<Pair> {
        &self.diff
    }

    /// Adds the constraints of one Pairing answer. On failure the graph is
    /// left untouched.
    pub fn apply(&mut self, q: &Query, a: &Answer) -> Result<()> {
        a.validate(Model::Pairing, q)?;
        let mut next = self.clone();
        match a {
            Answer::Yes => {
                for p in q.pairs() {
                    next.add_same(p)?;
                }
            }
            Answer::No { witness } => next.add_diff(witness.expect("validated"))?,
        }
        *self = next;
        Ok(())
    }

    fn add_same(&mut self, p: Pair) -> Result<()> {
        self.dsu.union(p.lo().0, p.hi().0, false)?;
        self.same.insert(p);
        Ok(())
    }

    fn add_diff(&mut self, p: Pair) -> Result<()> {
        if p.hi().0 >= self.n {
            return Err(Error::BallOutOfRange { ball: p.hi().0, n: self.n });
        }
        self.dsu.union(p.lo().0, p.hi().0, true)?;
        self.diff.insert(p);
        Ok(())
    }

    /// `Some(true)` if forced different, `Some(false)` if forced equal.
    pub fn relation(&self, a: BallId, b: BallId) -> Option<bool> {
        self.dsu.relation(a.0, b.0)
    }

    /// Whether every ball of `balls` is forced to one color.
    pub fn forced_monochromatic(&self, balls: BallSet) -> bool {
        let mut it = balls.iter();
        let Some(first) = it.next() else { return true };
        it.all(|b| self.relation(first, b) == Some(false))
    }

    /// Whether `a` is a legal reply to `q` given the current constraints.
    pub fn admits(&self, q: &Query, a: &Answer) -> bool {
        self.clone().apply(q, a).is_ok()
    }

    /// Every answer to `q` that keeps the constraints satisfiable: `Yes`
    /// first, then each legal witness in lexicographic order.
    pub fn legal_answers(&self, q: &Query) -> Vec<Answer> {
        let mut out = Vec::new();
        if q.pairs().all(|p| self.relation(p.lo(), p.hi()) != Some(true)) {
            out.push(Answer::Yes);
        }
        out.extend(
            q.pairs()
                .filter(|p| self.relation(p.lo(), p.hi()) != Some(false))
                .map(Answer::no_with),
        );
        out
    }

    /// Connected components of the constraint graph, ordered by lowest
    /// member. Isolated balls are singleton components.
    pub fn components(&self) -> Vec<ComponentSummary> {
        let mut by_root: Vec<Option<usize>> = vec![None; self.n];
        let mut comps: Vec<(BallSet, BallSet, BallSet)> = Vec::new();
        for b in 0..self.n {
            let (root, parity) = self.dsu.find(b);
            let idx = *by_root[root].get_or_insert_with(|| {
                comps.push(Default::default());
                comps.len() - 1
            });
            let (members, even, odd) = &mut comps[idx];
            members.insert(BallId(b));
            if parity { odd.insert(BallId(b)) } else { even.insert(BallId(b)) }
        }
        comps
            .into_iter()
            .map(|(members, x, y)| {
                let low = members.min().expect("nonempty component");
                let (mut a, mut b) = if x.contains(low) { (x, y) } else { (y, x) };
                if b.len() > a.len() {
                    std::mem::swap(&mut a, &mut b);
                }
                ComponentSummary { members, side_a: a, side_b: b, delta: a.len() - b.len() }
            })
            .collect()
    }

    /// Verdict read off the component structure: ball `b` is certainly in
    /// the majority iff its signed side surplus beats the total surplus of
    /// every other component.
    pub fn structural_verdict(&self) -> Verdict {
        let comps = self.components();
        let total: usize = comps.iter().map(|c| c.delta).sum();
        if total == 0 {
            return Verdict::NoMajority;
        }
        for b in (0..self.n).map(BallId) {
            let c = comps.iter().find(|c| c.members.contains(b)).expect("ball in a component");
            if c.side_a.contains(b) && c.delta > 0 && c.delta > total - c.delta {
                return Verdict::Majority { ball: b };
            }
        }
        Verdict::Unknown
    }

    /// Whether `v` holds under every coloring satisfying the constraints.
    pub fn certifies(&self, v: &Verdict) -> bool {
        let comps = self.components();
        let total: usize = comps.iter().map(|c| c.delta).sum();
        match v {
            Verdict::NoMajority => total == 0,
            Verdict::Majority { ball } => comps.iter().any(|c| {
                c.side_a.contains(*ball) && c.delta > 0 && c.delta > total - c.delta
            }),
            Verdict::Unknown => false,
        }
    }

    /// Maximum matching of the different-color edges, found with augmenting
    /// paths from one side of the bipartition.
    pub fn maximum_matching(&self) -> Matching {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.diff {
            adj[e.lo().0].push(e.hi().0);
            adj[e.hi().0].push(e.lo().0);
        }
        let left: Vec<usize> = (0..self.n).filter(|&v| !self.dsu.find(v).1).collect();
        let mut mate: Vec<Option<usize>> = vec![None; self.n];
        let mut size = 0;
        for &v in &left {
            let mut seen = vec![false; self.n];
            if augment(v, &adj, &mut mate, &mut seen) {
                size += 1;
            }
        }
        let mut edges = Vec::with_capacity(size);
        let mut uncovered = BallSet::EMPTY;
        for (v, m) in mate.iter().enumerate() {
            match *m {
                Some(u) if u < v => edges.push(Pair::new(BallId(u), BallId(v)).expect("distinct")),
                Some(_) => {}
                None => uncovered.insert(BallId(v)),
            }
        }
        edges.sort();
        Matching { size, edges, uncovered }
    }

    /// For odd `n` and different-color edges only: when a matching leaves a
    /// single ball uncovered, that ball is in the majority under every
    /// consistent coloring.
    pub fn majority_by_matching(&self) -> Option<BallId> {
        if self.n.is_multiple_of(2) || !self.same.is_empty() {
            return None;
        }
        let m = self.maximum_matching();
        (m.size == (self.n - 1) / 2).then(|| m.uncovered.min().expect("one ball uncovered"))
    }

    /// Edge-count lower bound for graphs certifying a majority ball.
    pub fn edge_lower_bound_check(&self) -> bool {
        self.diff.len() >= self.n / 2
    }
}

// `mate` is indexed by vertex on both sides; `v` is always a left vertex.
fn augment(v: usize, adj: &[Vec<usize>], mate: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &u in &adj[v] {
        if seen[u] {
            continue;
        }
        seen[u] = true;
        if mate[u].is_none_or(|w| augment(w, adj, mate, seen)) {
            mate[u] = Some(v);
            mate[v] = Some(u);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::is_consistent;

    fn q(n: usize, ids: &[usize]) -> Query {
        Query::new(n, ids.iter().copied()).unwrap()
    }

    fn p(a: usize, b: usize) -> Pair {
        Pair::new(BallId(a), BallId(b)).unwrap()
    }

    fn names(ks: &KnowledgeSet) -> BTreeSet<String> {
        ks.iter().map(|c| c.to_string()).collect()
    }

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn full_knowledge() {
        assert_eq!(names(&KnowledgeSet::full(2).unwrap()), set(&["RR", "RB", "BR", "BB"]));
        assert_eq!(names(&KnowledgeSet::full(1).unwrap()), set(&["R", "B"]));
        assert_eq!(KnowledgeSet::full(3).unwrap().len(), 8);
        assert!(KnowledgeSet::full(17).is_err());
        assert!(KnowledgeSet::full(0).is_err());
    }

    #[test]
    fn refine_examples() {
        let full = KnowledgeSet::full(3).unwrap();
        let yes = full.refine(&q(3, &[0, 1, 2]), &Answer::Yes).unwrap();
        assert_eq!(names(&yes), set(&["RRR", "BBB"]));
        let no = full.refine(&q(3, &[0, 1, 2]), &Answer::NO).unwrap();
        assert_eq!(no.len(), 6);
        assert!(!no.iter().any(|c| c.to_string() == "RRR" || c.to_string() == "BBB"));
        let w = full.refine(&q(3, &[0, 1, 2]), &Answer::no_with(p(0, 1))).unwrap();
        // enumerated by hand: balls 0 and 1 differ
        assert_eq!(names(&w), set(&["RBR", "RBB", "BRR", "BRB"]));
        assert!(matches!(yes.refine(&q(3, &[0, 1, 2]), &Answer::NO), Err(Error::EmptyKnowledge)));
    }

    #[test]
    fn verdict_examples() {
        let full = KnowledgeSet::full(2).unwrap();
        let rb = full.refine(&q(2, &[0, 1]), &Answer::NO).unwrap();
        assert_eq!(rb.verdict().unwrap(), Verdict::NoMajority);

        let mut two = FixedBitSet::with_capacity(8);
        for c in ["RRB", "RRR"] {
            two.insert(c.parse::<Coloring>().unwrap().reds().bits() as usize);
        }
        let ks = KnowledgeSet { n: 3, colorings: two };
        assert_eq!(ks.verdict().unwrap(), Verdict::majority(0));

        let no = KnowledgeSet::full(3).unwrap().refine(&q(3, &[0, 1, 2]), &Answer::NO).unwrap();
        assert_eq!(no.verdict().unwrap(), Verdict::Unknown);
    }

    #[test]
    fn build_pairing_graph_examples() {
        let mut t = Transcript::new(Model::Pairing, 3, 5).unwrap();
        t.push(q(5, &[0, 1, 2]), Answer::Yes).unwrap();
        let g = PairingGraph::from_transcript(&t).unwrap();
        assert_eq!(g.same_edges().iter().copied().collect::<Vec<_>>(), vec![p(0, 1), p(0, 2), p(1, 2)]);
        assert!(g.diff_edges().is_empty());

        let mut t2 = Transcript::new(Model::Pairing, 3, 5).unwrap();
        t2.push(q(5, &[0, 1, 2]), Answer::no_with(p(0, 1))).unwrap();
        let g2 = PairingGraph::from_transcript(&t2).unwrap();
        assert_eq!(g2.diff_edges().iter().copied().collect::<Vec<_>>(), vec![p(0, 1)]);

        t.push(q(5, &[0, 3, 4]), Answer::no_with(p(0, 3))).unwrap();
        let g3 = PairingGraph::from_transcript(&t).unwrap();
        assert_eq!(g3.same_edges().len(), 3);
        assert_eq!(g3.diff_edges().iter().copied().collect::<Vec<_>>(), vec![p(0, 3)]);

        let mut bad = Transcript::new(Model::Pairing, 3, 5).unwrap();
        bad.push(q(5, &[0, 1, 2]), Answer::Yes).unwrap();
        bad.push(q(5, &[0, 1, 3]), Answer::no_with(p(0, 1))).unwrap();
        assert!(matches!(PairingGraph::from_transcript(&bad), Err(Error::Unsatisfiable)));
        let yn = Transcript::new(Model::Yn, 3, 5).unwrap();
        assert!(PairingGraph::from_transcript(&yn).is_err());
    }

    fn graph(n: usize, same: &[(usize, usize)], diff: &[(usize, usize)]) -> PairingGraph {
        let mut g = PairingGraph::new(n).unwrap();
        for &(a, b) in same {
            g.add_same(p(a, b)).unwrap();
        }
        for &(a, b) in diff {
            g.add_diff(p(a, b)).unwrap();
        }
        g
    }

    fn bs(ids: &[usize]) -> BallSet {
        ids.iter().map(|&i| BallId(i)).collect()
    }

    #[test]
    fn component_examples() {
        let g = graph(5, &[(1, 2)], &[(2, 3)]);
        let comps = g.components();
        assert_eq!(comps.len(), 3);
        assert_eq!(comps[0], ComponentSummary { members: bs(&[0]), side_a: bs(&[0]), side_b: bs(&[]), delta: 1 });
        assert_eq!(comps[1], ComponentSummary { members: bs(&[1, 2, 3]), side_a: bs(&[1, 2]), side_b: bs(&[3]), delta: 1 });
        assert_eq!(comps[2].delta, 1);

        let clique = graph(3, &[(0, 1), (0, 2), (1, 2)], &[]);
        assert_eq!(clique.components().len(), 1);
        assert_eq!(clique.components()[0].delta, 3);

        let pair = graph(2, &[], &[(0, 1)]);
        assert_eq!(pair.components(), vec![ComponentSummary { members: bs(&[0, 1]), side_a: bs(&[0]), side_b: bs(&[1]), delta: 0 }]);
    }

    #[test]
    fn structural_verdict_examples() {
        let g = graph(5, &[(0, 1), (0, 2), (1, 2)], &[(3, 4)]);
        assert_eq!(g.structural_verdict(), Verdict::majority(0));
        assert_eq!(graph(4, &[], &[(0, 1), (2, 3)]).structural_verdict(), Verdict::NoMajority);
        assert_eq!(graph(5, &[(1, 2)], &[(2, 3)]).structural_verdict(), Verdict::Unknown);
    }

    #[test]
    fn matching_examples() {
        let m = graph(5, &[], &[(0, 1), (2, 3)]).maximum_matching();
        assert_eq!((m.size, m.uncovered), (2, bs(&[4])));
        let path = graph(4, &[], &[(0, 1), (1, 2), (2, 3)]).maximum_matching();
        assert_eq!((path.size, path.uncovered), (2, BallSet::EMPTY));
        assert_eq!(path.edges, vec![p(0, 1), p(2, 3)]);
        let empty = graph(3, &[], &[]).maximum_matching();
        assert_eq!((empty.size, empty.uncovered), (0, bs(&[0, 1, 2])));
        // path 0-3-4-1: the second left vertex needs an augmenting path
        let aug = graph(5, &[], &[(0, 3), (3, 4), (4, 1)]).maximum_matching();
        assert_eq!(aug.size, 2);
    }

    #[test]
    fn majority_by_matching_examples() {
        assert_eq!(graph(5, &[], &[(0, 1), (2, 3)]).majority_by_matching(), Some(BallId(4)));
        assert_eq!(graph(5, &[], &[(0, 1)]).majority_by_matching(), None);
        assert_eq!(graph(3, &[], &[(0, 1)]).majority_by_matching(), Some(BallId(2)));
        assert_eq!(graph(4, &[], &[(0, 1)]).majority_by_matching(), None);
    }

    #[test]
    fn edge_lower_bound_examples() {
        let g = graph(5, &[], &[(0, 1), (2, 3)]);
        assert_eq!(g.structural_verdict(), Verdict::majority(4));
        assert!(g.edge_lower_bound_check());
        assert!(graph(3, &[], &[(0, 1)]).edge_lower_bound_check());
        let g7 = graph(7, &[], &[(0, 1), (2, 3), (4, 5)]);
        assert_eq!(g7.structural_verdict(), Verdict::majority(6));
        assert!(g7.edge_lower_bound_check());
    }

    #[test]
    fn legal_answers_respect_constraints() {
        let g = graph(4, &[(0, 1)], &[(1, 2)]);
        let a = g.legal_answers(&q(4, &[0, 1, 3]));
        assert_eq!(a, vec![Answer::Yes, Answer::no_with(p(0, 3)), Answer::no_with(p(1, 3))]);
        let b = g.legal_answers(&q(4, &[0, 2, 3]));
        assert_eq!(b[0], Answer::no_with(p(0, 2)));
        assert!(!b.contains(&Answer::Yes));
    }

    #[test]
    fn graph_matches_enumeration_on_small_transcripts() {
        // every 2-step Pairing transcript on 4 balls
        let n = 4;
        let full = KnowledgeSet::full(n).unwrap();
        let queries = Query::all(n, 3);
        let g0 = PairingGraph::new(n).unwrap();
        for q1 in &queries {
            for a1 in g0.legal_answers(q1) {
                let mut g1 = g0.clone();
                g1.apply(q1, &a1).unwrap();
                let k1 = full.refine(q1, &a1).unwrap();
                assert_eq!(g1.structural_verdict(), k1.verdict().unwrap());
                for q2 in &queries {
                    for a2 in g1.legal_answers(q2) {
                        let mut g2 = g1.clone();
                        g2.apply(q2, &a2).unwrap();
                        let k2 = k1.refine(q2, &a2).unwrap();
                        assert_eq!(g2.structural_verdict(), k2.verdict().unwrap());
                        assert!(k2.is_swap_closed());
                        let mut t = Transcript::new(Model::Pairing, 3, n).unwrap();
                        t.push(*q1, a1).unwrap();
                        t.push(*q2, a2).unwrap();
                        for c in Coloring::all(n) {
                            assert_eq!(k2.contains(&c), is_consistent(&c, &t));
                        }
                    }
                }
            }
        }
    }
}
