//! Exact values of the majority game for small instances.
//!
//! The questioner minimizes and the adversary maximizes the number of
//! queries until the knowledge state determines a verdict. States are
//! memoized under a canonical key. Two encodings are used:
//!
//! - Y/N with `k >= 3`: the set of consistent colorings as a bitmask over
//!   the `2^(n-1)` colorings with ball 0 red (the set is closed under color
//!   swap, so this half determines it).
//! - Pairing, and pair queries in either model: each ball's constraint
//!   component and side. With relabeling on, the key is just the multiset
//!   of component side sizes.
//!
//! The search is a fail-high minimax: `bound(s, beta)` returns the exact
//! value when it is below `beta` and a lower bound otherwise. A query is
//! only considered when every reply shrinks the state, so play terminates.

use std::collections::HashSet;
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use dashmap::DashMap;
use itertools::Itertools;
use rayon::prelude::*;
use rustc_hash::{FxBuildHasher, FxHashMap};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knowledge::{KnowledgeSet, PairingGraph};
use crate::questioners::bounds;
use crate::session::{run, AnswerSource, Questioner, Tracking};
use crate::adversaries::HonestOracle;
use crate::types::{Answer, BallId, Coloring, Model, Query, Transcript, Verdict, MAX_ENUMERATED};

const INF: u32 = u32::MAX / 2;

/// Largest `n` for the coloring-set encoding (`2^(n-1)` bits in a `u128`).
pub const MAX_YN_BALLS: usize = 8;
/// Largest `n` for the component encoding.
pub const MAX_STRUCTURAL_BALLS: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameValue {
    pub solvable: bool,
    pub queries: Option<u32>,
}

impl GameValue {
    pub const UNSOLVABLE: GameValue = GameValue { solvable: false, queries: None };

    pub fn exact(q: u32) -> Self {
        GameValue { solvable: true, queries: Some(q) }
    }
}

impl std::fmt::Display for GameValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.queries {
            Some(q) => write!(f, "{q}"),
            None => f.write_str("unsolvable"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Bound {
    Exact(u32),
    AtLeast(u32),
}

/// Which state encoding to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Encoding {
    /// Coloring sets for Y/N with `k >= 3`, components otherwise.
    #[default]
    Auto,
    /// Coloring sets; Y/N only.
    Colorings,
    /// Components; Pairing, or pair queries.
    Components,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Worker threads for the root of the search; 1 runs single-threaded.
    pub threads: usize,
    /// Canonicalize under ball relabeling. Defaults to on.
    pub relabel: Option<bool>,
    pub encoding: Encoding,
    /// Abort once this many states are memoized.
    pub max_states: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { threads: 1, relabel: None, encoding: Encoding::Auto, max_states: 50_000_000 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct MemoStats {
    pub states: usize,
    pub visited: u64,
    pub hits: u64,
    pub hit_rate: f64,
}

trait Game: Send + Sync {
    type State: Clone + Eq + Send + Sync + Debug;
    type Key: Clone + Eq + Hash + Ord + Send + Sync;

    fn root(&self) -> Self::State;
    fn key(&self, s: &Self::State) -> Self::Key;
    fn verdict(&self, s: &Self::State) -> Verdict;
    fn queries(&self) -> &[Query];
    /// Every legal reply to query `qi`, with the state it leads to.
    fn answers(&self, s: &Self::State, qi: usize) -> Vec<(Answer, Self::State)>;
    /// Rough size of the state, for move ordering.
    fn weight(&self, s: &Self::State) -> usize;

    fn solvable_hint(&self, _s: &Self::State) -> Option<bool> {
        None
    }

    fn key_bytes(k: &Self::Key) -> Vec<u8>;
    fn wrap(s: Self::State) -> Position;
    fn unwrap(p: &Position) -> Option<&Self::State>;
}

struct Move<S> {
    query: usize,
    children: Vec<S>,
}

struct Search<G: Game> {
    game: G,
    memo: DashMap<G::Key, Bound, FxBuildHasher>,
    solvable: DashMap<G::Key, bool, FxBuildHasher>,
    visited: AtomicU64,
    hits: AtomicU64,
    max_states: usize,
}

impl<G: Game> Search<G> {
    fn new(game: G, max_states: usize) -> Self {
        Search {
            game,
            memo: DashMap::with_hasher(FxBuildHasher),
            solvable: DashMap::with_hasher(FxBuildHasher),
            visited: AtomicU64::new(0),
            hits: AtomicU64::new(0),
            max_states,
        }
    }

    /// Queries whose every reply shrinks the state, one per class of
    /// queries with identical successor keys, most balanced first.
    fn moves(&self, s: &G::State) -> Vec<Move<G::State>> {
        let mut seen: HashSet<Vec<G::Key>, FxBuildHasher> = HashSet::with_hasher(FxBuildHasher);
        let mut out: Vec<(usize, Move<G::State>)> = Vec::new();
        for qi in 0..self.game.queries().len() {
            let answers = self.game.answers(s, qi);
            if answers.is_empty() || answers.iter().any(|(_, c)| c == s) {
                continue;
            }
            let mut keyed: Vec<(G::Key, G::State)> =
                answers.into_iter().map(|(_, c)| (self.game.key(&c), c)).collect();
            keyed.sort_by(|a, b| a.0.cmp(&b.0));
            keyed.dedup_by(|a, b| a.0 == b.0);
            let (keys, children): (Vec<_>, Vec<_>) = keyed.into_iter().unzip();
            if !seen.insert(keys) {
                continue;
            }
            let heaviest = children.iter().map(|c| self.game.weight(c)).max().unwrap_or(0);
            out.push((heaviest, Move { query: qi, children }));
        }
        out.sort_by_key(|(w, _)| *w);
        out.into_iter().map(|(_, m)| m).collect()
    }

    fn is_solvable(&self, s: &G::State) -> Result<bool> {
        if self.game.verdict(s).is_known() {
            return Ok(true);
        }
        if let Some(h) = self.game.solvable_hint(s) {
            return Ok(h);
        }
        let key = self.game.key(s);
        if let Some(v) = self.solvable.get(&key) {
            return Ok(*v);
        }
        let mut result = false;
        for mv in self.moves(s) {
            let mut all = true;
            for c in &mv.children {
                if !self.is_solvable(c)? {
                    all = false;
                    break;
                }
            }
            if all {
                result = true;
                break;
            }
        }
        self.solvable.insert(key, result);
        Ok(result)
    }

    fn bound(&self, s: &G::State, beta: u32) -> Result<Bound> {
        if self.game.verdict(s).is_known() {
            return Ok(Bound::Exact(0));
        }
        let key = self.game.key(s);
        if let Some(b) = self.memo.get(&key).map(|b| *b) {
            match b {
                Bound::Exact(_) => {
                    self.hits.fetch_add(1, Ordering::Relaxed);
                    return Ok(b);
                }
                Bound::AtLeast(lb) if lb >= beta => {
                    self.hits.fetch_add(1, Ordering::Relaxed);
                    return Ok(b);
                }
                Bound::AtLeast(_) => {}
            }
        }
        if !self.is_solvable(s)? {
            self.memo.insert(key, Bound::Exact(INF));
            return Ok(Bound::Exact(INF));
        }
        if beta <= 1 {
            return Ok(Bound::AtLeast(1));
        }
        self.visited.fetch_add(1, Ordering::Relaxed);
        if self.memo.len() >= self.max_states {
            return Err(Error::BudgetExceeded(self.max_states));
        }
        let mut best = INF;
        for mv in self.moves(s) {
            let limit = best.min(beta);
            if limit <= 1 {
                break;
            }
            if let Some(v) = self.move_value(&mv, limit)? {
                best = v;
            }
        }
        let result = if best < beta { Bound::Exact(best) } else { Bound::AtLeast(beta) };
        self.record(key, result);
        Ok(result)
    }

    /// Value of a move if it is below `limit`.
    fn move_value(&self, mv: &Move<G::State>, limit: u32) -> Result<Option<u32>> {
        let mut worst = 0;
        for c in &mv.children {
            match self.bound(c, limit - 1)? {
                Bound::Exact(v) if v < limit - 1 => worst = worst.max(v),
                _ => return Ok(None),
            }
        }
        Ok(Some(worst + 1))
    }

    fn record(&self, key: G::Key, b: Bound) {
        let mut entry = self.memo.entry(key).or_insert(b);
        match (*entry, b) {
            (Bound::Exact(_), _) => {}
            (_, Bound::Exact(_)) => *entry = b,
            (Bound::AtLeast(old), Bound::AtLeast(new)) => *entry = Bound::AtLeast(old.max(new)),
        }
    }

    /// Exact value, `None` when unsolvable.
    fn value(&self, s: &G::State) -> Result<Option<u32>> {
        match self.bound(s, INF)? {
            Bound::Exact(v) if v < INF => Ok(Some(v)),
            Bound::Exact(_) => Ok(None),
            Bound::AtLeast(_) => unreachable!("a solvable state has a finite value"),
        }
    }

    /// Root evaluation, optionally seeded with a known upper bound and
    /// spread over a thread pool. Schedules only affect memo contents.
    fn root_value(&self, s: &G::State, upper: Option<u32>, pool: Option<&rayon::ThreadPool>) -> Result<Option<u32>> {
        if self.game.verdict(s).is_known() {
            return Ok(Some(0));
        }
        if !self.is_solvable(s)? {
            return Ok(None);
        }
        let beta = upper.map_or(INF, |u| u + 1);
        let Some(pool) = pool else {
            return match self.bound(s, beta)? {
                Bound::Exact(v) => Ok(Some(v)),
                Bound::AtLeast(_) => self.value(s),
            };
        };
        let best = AtomicU32::new(beta);
        let moves = self.moves(s);
        pool.install(|| {
            moves.par_iter().try_for_each(|mv| {
                let limit = best.load(Ordering::Acquire);
                if limit > 1 {
                    if let Some(v) = self.move_value(mv, limit)? {
                        best.fetch_min(v, Ordering::AcqRel);
                    }
                }
                Ok::<_, Error>(())
            })
        })?;
        let v = best.into_inner();
        if v < beta {
            self.record(self.game.key(s), Bound::Exact(v));
            Ok(Some(v))
        } else {
            self.value(s)
        }
    }

    fn child_value(&self, s: &G::State) -> Result<u32> {
        Ok(self.value(s)?.unwrap_or(INF))
    }

    fn best_move(&self, s: &G::State) -> Result<Option<usize>> {
        let Some(v) = self.value(s)? else { return Ok(None) };
        if v == 0 {
            return Ok(None);
        }
        for mv in self.moves(s) {
            let mut worst = 0;
            for c in &mv.children {
                worst = worst.max(self.child_value(c)?);
            }
            if worst + 1 == v {
                return Ok(Some(mv.query));
            }
        }
        unreachable!("some move attains the value")
    }

    fn best_answer(&self, s: &G::State, qi: usize) -> Result<(Answer, G::State)> {
        let mut best: Option<(u32, Answer, G::State)> = None;
        for (a, c) in self.game.answers(s, qi) {
            let v = self.child_value(&c)?;
            if best.as_ref().is_none_or(|(bv, _, _)| v > *bv) {
                best = Some((v, a, c));
            }
        }
        best.map(|(_, a, c)| (a, c)).ok_or(Error::Inconsistent)
    }

    fn strategy(&self, s: &G::State) -> Result<StrategyChild> {
        let verdict = self.game.verdict(s);
        if verdict.is_known() {
            return Ok(StrategyChild::Verdict(verdict));
        }
        let qi = self.best_move(s)?.ok_or(Error::NoVerdict)?;
        let mut children = Vec::new();
        for (a, c) in self.game.answers(s, qi) {
            children.push(StrategyBranch::new(a, self.strategy(&c)?));
        }
        Ok(StrategyChild::Node(Box::new(StrategyNode { query: self.game.queries()[qi].ids(), children })))
    }

    fn stats(&self) -> MemoStats {
        let visited = self.visited.load(Ordering::Relaxed);
        let hits = self.hits.load(Ordering::Relaxed);
        let lookups = visited + hits;
        MemoStats {
            states: self.memo.len(),
            visited,
            hits,
            hit_rate: if lookups == 0 { 0.0 } else { hits as f64 / lookups as f64 },
        }
    }
}

/// Coloring-set encoding for the Y/N model.
struct ColoringGame {
    n: usize,
    queries: Vec<Query>,
    mono: Vec<u128>,
    full: u128,
    balanced: u128,
    majority: Vec<u128>,
    classes: Vec<u128>,
    relabel: Option<Relabeling>,
}

struct Relabeling {
    /// `maps[rank(perm)][i]`: coloring `i` after moving each ball `b` to `perm[b]`.
    maps: Vec<Vec<u8>>,
    /// Colorings in which balls `a` and `b` match, at `a * n + b`.
    same: Vec<u128>,
    cache: DashMap<u128, u128, FxBuildHasher>,
}

/// Position of a permutation in lexicographic order.
fn permutation_rank(perm: &[u8]) -> usize {
    let n = perm.len();
    (0..n).fold(0, |rank, i| {
        let smaller_after = perm[i + 1..].iter().filter(|&&p| p < perm[i]).count();
        rank * (n - i) + smaller_after
    })
}

fn half_coloring(n: usize, i: usize) -> Coloring {
    Coloring::from_mask(n, ((i as u32) << 1) | 1)
}

fn bits(set: u128) -> impl Iterator<Item = usize> {
    let mut rest = set;
    std::iter::from_fn(move || {
        (rest != 0).then(|| {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            i
        })
    })
}

impl ColoringGame {
    fn new(n: usize, k: usize, relabel: bool) -> Result<Self> {
        if n > MAX_YN_BALLS {
            return Err(Error::TooLarge(format!("coloring-set encoding supports n <= {MAX_YN_BALLS}")));
        }
        let half = 1usize << (n - 1);
        let queries = Query::all(n, k);
        let mut mono = vec![0u128; queries.len()];
        let mut balanced = 0u128;
        let mut majority = vec![0u128; n];
        let mut signature: FxHashMap<u128, u128> = FxHashMap::default();
        for i in 0..half {
            let c = half_coloring(n, i);
            let mut sig = 0u128;
            for (qi, q) in queries.iter().enumerate() {
                if c.is_monochromatic(q.balls()) {
                    mono[qi] |= 1 << i;
                    sig |= 1 << qi;
                }
            }
            match c.majority_class() {
                None => balanced |= 1 << i,
                Some(class) => class.iter().for_each(|b| majority[b.0] |= 1 << i),
            }
            *signature.entry(sig).or_default() |= 1 << i;
        }
        let mut classes: Vec<u128> = signature.into_values().collect();
        classes.sort_unstable();
        let relabel = relabel.then(|| Relabeling {
            maps: (0..n)
                .permutations(n)
                .map(|perm| {
                    (0..half)
                        .map(|i| {
                            let c = half_coloring(n, i);
                            let mut mask: u32 = c.reds().iter().map(|b| 1u32 << perm[b.0]).sum();
                            if mask & 1 == 0 {
                                mask = !mask & ((1 << n) - 1);
                            }
                            (mask >> 1) as u8
                        })
                        .collect()
                })
                .collect(),
            same: (0..n * n)
                .map(|ab| {
                    (0..half)
                        .filter(|&i| half_coloring(n, i).same_color(BallId(ab / n), BallId(ab % n)))
                        .fold(0u128, |m, i| m | 1 << i)
                })
                .collect(),
            cache: DashMap::with_hasher(FxBuildHasher),
        });
        let full = if half == 128 { u128::MAX } else { (1u128 << half) - 1 };
        Ok(ColoringGame { n, queries, mono, full, balanced, majority, classes, relabel })
    }

    /// Splits ball classes by their multiset of (neighbor class, agreement
    /// count) until stable. Classes come back as ranks `0..`.
    fn refine(&self, counts: &[u32], mut class: Vec<usize>) -> Vec<usize> {
        let n = self.n;
        let mut classes = usize::MAX;
        loop {
            let rows: Vec<(usize, Vec<(usize, u32)>)> = (0..n)
                .map(|a| {
                    let mut row: Vec<(usize, u32)> =
                        (0..n).filter(|&b| b != a).map(|b| (class[b], counts[a * n + b])).collect();
                    row.sort_unstable();
                    (class[a], row)
                })
                .collect();
            let mut distinct: Vec<&(usize, Vec<(usize, u32)>)> = rows.iter().collect();
            distinct.sort();
            distinct.dedup();
            class = rows.iter().map(|row| distinct.binary_search(&row).expect("row is listed")).collect();
            if distinct.len() == classes {
                return class;
            }
            classes = distinct.len();
        }
    }

    fn verdict_of(&self, s: u128) -> Verdict {
        if s & !self.balanced == 0 {
            return Verdict::NoMajority;
        }
        if s & self.balanced != 0 {
            return Verdict::Unknown;
        }
        match (0..self.n).find(|&b| s & !self.majority[b] == 0) {
            Some(b) => Verdict::majority(b),
            None => Verdict::Unknown,
        }
    }
}

impl Game for ColoringGame {
    type State = u128;
    type Key = u128;

    fn root(&self) -> u128 {
        self.full
    }

    /// Least image of `s` over the relabelings that order balls by a
    /// refined invariant, permuting freely within each class. The
    /// invariant moves with the balls, so the minimum is canonical.
    fn key(&self, s: &u128) -> u128 {
        let Some(r) = &self.relabel else { return *s };
        if let Some(k) = r.cache.get(s) {
            return *k;
        }
        let n = self.n;
        let counts: Vec<u32> = r.same.iter().map(|m| (s & m).count_ones()).collect();
        let class = self.refine(&counts, vec![0; n]);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&b| class[b]);
        let blocks: Vec<Vec<usize>> = order.chunk_by(|&a, &b| class[a] == class[b]).map(<[usize]>::to_vec).collect();
        let mut perm = vec![0u8; n];
        let key = blocks
            .iter()
            .map(|block| block.iter().copied().permutations(block.len()))
            .multi_cartesian_product()
            .map(|choice| {
                for (pos, &b) in choice.iter().flatten().enumerate() {
                    perm[b] = pos as u8;
                }
                let map = &r.maps[permutation_rank(&perm)];
                bits(*s).fold(0u128, |acc, i| acc | 1 << map[i])
            })
            .min()
            .expect("at least one relabeling");
        r.cache.insert(*s, key);
        key
    }

    fn verdict(&self, s: &u128) -> Verdict {
        self.verdict_of(*s)
    }

    fn queries(&self) -> &[Query] {
        &self.queries
    }

    fn answers(&self, s: &u128, qi: usize) -> Vec<(Answer, u128)> {
        let yes = s & self.mono[qi];
        let no = s & !self.mono[qi];
        [(Answer::Yes, yes), (Answer::NO, no)].into_iter().filter(|(_, c)| *c != 0).collect()
    }

    fn weight(&self, s: &u128) -> usize {
        s.count_ones() as usize
    }

    /// Y/N replies are fixed by the coloring, so asking every query leaves
    /// exactly the coloring's answer class. The state is winnable iff each
    /// class it meets already has a verdict.
    fn solvable_hint(&self, s: &u128) -> Option<bool> {
        Some(self.classes.iter().all(|c| s & c == 0 || self.verdict_of(s & c).is_known()))
    }

    fn key_bytes(k: &u128) -> Vec<u8> {
        k.to_le_bytes().to_vec()
    }

    fn wrap(s: u128) -> Position {
        Position(PositionRepr::Colorings(s))
    }

    fn unwrap(p: &Position) -> Option<&u128> {
        match &p.0 {
            PositionRepr::Colorings(s) => Some(s),
            PositionRepr::Components(_) => None,
        }
    }
}

/// Per-ball component label `2 * component + side`, normalized so that
/// components are numbered by lowest member and that member has side 0.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Components {
    labels: [u8; MAX_STRUCTURAL_BALLS],
    n: u8,
}

impl Debug for Components {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Components{:?}", &self.labels[..self.n as usize])
    }
}

impl Components {
    fn singletons(n: usize) -> Self {
        let mut labels = [0u8; MAX_STRUCTURAL_BALLS];
        for (i, l) in labels.iter_mut().enumerate().take(n) {
            *l = (i as u8) << 1;
        }
        Components { labels, n: n as u8 }
    }

    fn comp(&self, b: usize) -> u8 {
        self.labels[b] >> 1
    }

    fn side(&self, b: usize) -> u8 {
        self.labels[b] & 1
    }

    fn normalized(mut self) -> Self {
        let mut rename = [u8::MAX; MAX_STRUCTURAL_BALLS];
        let mut flip = [0u8; MAX_STRUCTURAL_BALLS];
        let mut next = 0u8;
        for b in 0..self.n as usize {
            let (c, s) = (self.comp(b) as usize, self.side(b));
            if rename[c] == u8::MAX {
                rename[c] = next;
                flip[c] = s;
                next += 1;
            }
            self.labels[b] = (rename[c] << 1) | (s ^ flip[c]);
        }
        self
    }

    /// Adds "`x` and `y` differ" (or match); `None` on contradiction.
    fn merge(&self, x: usize, y: usize, differ: bool) -> Option<Self> {
        let want = u8::from(differ);
        let (cx, cy) = (self.comp(x), self.comp(y));
        if cx == cy {
            return ((self.side(x) ^ self.side(y)) == want).then_some(*self);
        }
        let flip = self.side(x) ^ self.side(y) ^ want;
        let mut next = *self;
        for b in 0..self.n as usize {
            if self.comp(b) == cy {
                next.labels[b] = (cx << 1) | (self.side(b) ^ flip);
            }
        }
        Some(next.normalized())
    }

    /// `(larger side, smaller side)` per component, by component number.
    fn sides(&self) -> Vec<(u8, u8)> {
        let mut counts = vec![[0u8; 2]; self.n as usize];
        for b in 0..self.n as usize {
            counts[self.comp(b) as usize][self.side(b) as usize] += 1;
        }
        counts.retain(|c| c[0] + c[1] > 0);
        counts.into_iter().map(|[a, b]| (a.max(b), a.min(b))).collect()
    }

    fn verdict(&self) -> Verdict {
        let mut counts = vec![[0i32; 2]; self.n as usize];
        for b in 0..self.n as usize {
            counts[self.comp(b) as usize][self.side(b) as usize] += 1;
        }
        let total: i32 = counts.iter().map(|c| (c[0] - c[1]).abs()).sum();
        if total == 0 {
            return Verdict::NoMajority;
        }
        (0..self.n as usize)
            .find(|&b| {
                let c = counts[self.comp(b) as usize];
                let own = c[self.side(b) as usize] - c[1 - self.side(b) as usize];
                own > total - (c[0] - c[1]).abs()
            })
            .map_or(Verdict::Unknown, Verdict::majority)
    }
}

/// Component encoding: Pairing model, or pair queries in either model.
struct ComponentGame {
    n: usize,
    model: Model,
    queries: Vec<Query>,
    relabel: bool,
}

impl ComponentGame {
    fn new(n: usize, k: usize, model: Model, relabel: bool) -> Result<Self> {
        if n > MAX_STRUCTURAL_BALLS {
            return Err(Error::TooLarge(format!("component encoding supports n <= {MAX_STRUCTURAL_BALLS}")));
        }
        if model == Model::Yn && k != 2 {
            return Err(Error::Precondition("component encoding covers Y/N only for pair queries".into()));
        }
        Ok(ComponentGame { n, model, queries: Query::all(n, k), relabel })
    }
}

impl Game for ComponentGame {
    type State = Components;
    type Key = Vec<u8>;

    fn root(&self) -> Components {
        Components::singletons(self.n)
    }

    fn key(&self, s: &Components) -> Vec<u8> {
        if self.relabel {
            let mut sides = s.sides();
            sides.sort_unstable();
            sides.into_iter().flat_map(|(a, b)| [a, b]).collect()
        } else {
            s.labels[..self.n].to_vec()
        }
    }

    fn verdict(&self, s: &Components) -> Verdict {
        s.verdict()
    }

    fn queries(&self) -> &[Query] {
        &self.queries
    }

    fn answers(&self, s: &Components, qi: usize) -> Vec<(Answer, Components)> {
        let q = &self.queries[qi];
        let balls = q.ids();
        let mut out = Vec::new();
        let yes = balls[1..].iter().try_fold(*s, |acc, &b| acc.merge(balls[0], b, false));
        if let Some(c) = yes {
            out.push((Answer::Yes, c));
        }
        for p in q.pairs() {
            if let Some(c) = s.merge(p.lo().0, p.hi().0, true) {
                let a = match self.model {
                    Model::Pairing => Answer::no_with(p),
                    Model::Yn => Answer::NO,
                };
                out.push((a, c));
            }
        }
        out
    }

    fn weight(&self, s: &Components) -> usize {
        s.sides().len()
    }

    fn key_bytes(k: &Vec<u8>) -> Vec<u8> {
        k.clone()
    }

    fn wrap(s: Components) -> Position {
        Position(PositionRepr::Components(s))
    }

    fn unwrap(p: &Position) -> Option<&Components> {
        match &p.0 {
            PositionRepr::Components(s) => Some(s),
            PositionRepr::Colorings(_) => None,
        }
    }
}

/// Memo key of a knowledge state, invariant under color swap and, when
/// enabled, ball relabeling. Equal keys have equal game values.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

/// A knowledge state inside an [`ExactSolver`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Position(PositionRepr);

#[derive(Clone, Debug, PartialEq, Eq)]
enum PositionRepr {
    Colorings(u128),
    Components(Components),
}

enum Engine {
    Colorings(Search<ColoringGame>),
    Components(Search<ComponentGame>),
}

macro_rules! with_engine {
    ($self:expr, |$search:ident| $body:expr) => {
        match &$self.engine {
            Engine::Colorings($search) => $body,
            Engine::Components($search) => $body,
        }
    };
}

fn unwrap_pos<'p, G: Game>(_: &Search<G>, p: &'p Position) -> Result<&'p G::State> {
    G::unwrap(p).ok_or_else(|| Error::Precondition("position belongs to another encoding".into()))
}

/// Exact minimax evaluation for one `(n, k, model)` instance, with a memo
/// shared by every query made against it.
pub struct ExactSolver {
    n: usize,
    k: usize,
    model: Model,
    engine: Engine,
    pool: Option<rayon::ThreadPool>,
}

impl ExactSolver {
    pub fn new(n: usize, k: usize, model: Model, options: &SolveOptions) -> Result<Self> {
        if k < 2 || n < k {
            return Err(Error::Precondition(format!("need 2 <= k <= n, got k = {k}, n = {n}")));
        }
        let components = match options.encoding {
            Encoding::Auto => model == Model::Pairing || k == 2,
            Encoding::Colorings if model == Model::Pairing => {
                return Err(Error::Precondition("coloring-set encoding is Y/N only".into()))
            }
            Encoding::Colorings => false,
            Encoding::Components => true,
        };
        let engine = if components {
            let game = ComponentGame::new(n, k, model, options.relabel.unwrap_or(true))?;
            Engine::Components(Search::new(game, options.max_states))
        } else {
            let game = ColoringGame::new(n, k, options.relabel.unwrap_or(true))?;
            Engine::Colorings(Search::new(game, options.max_states))
        };
        let pool = if options.threads > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(options.threads)
                .build()
                .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
            Some(pool)
        } else {
            None
        };
        Ok(ExactSolver { n, k, model, engine, pool })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn model(&self) -> Model {
        self.model
    }

    /// Number of distinct queries; no useful play is longer.
    pub fn query_count(&self) -> usize {
        with_engine!(self, |s| s.game.queries().len())
    }

    pub fn root(&self) -> Position {
        with_engine!(self, |s| wrap_of(s, s.game.root()))
    }

    fn query_index(&self, q: &Query) -> Result<usize> {
        if q.k() != self.k || q.balls().iter().any(|b| b.0 >= self.n) {
            return Err(Error::InvalidQuery(format!("{q} is not a {}-query on {} balls", self.k, self.n)));
        }
        let queries = with_engine!(self, |s| s.game.queries());
        Ok(queries.iter().position(|x| x == q).expect("all k-subsets are listed"))
    }

    /// Applies one answered query. Fails if the answer is not legal here.
    pub fn advance(&self, pos: &Position, q: &Query, a: &Answer) -> Result<Position> {
        let qi = self.query_index(q)?;
        with_engine!(self, |s| {
            let state = unwrap_pos(s, pos)?;
            s.game
                .answers(state, qi)
                .into_iter()
                .find(|(b, _)| b == a)
                .map(|(_, c)| wrap_of(s, c))
                .ok_or(Error::Inconsistent)
        })
    }

    pub fn position(&self, t: &Transcript) -> Result<Position> {
        if (t.n(), t.k(), t.model()) != (self.n, self.k, self.model) {
            return Err(Error::Precondition("transcript is for another instance".into()));
        }
        let mut pos = self.root();
        for step in t.steps() {
            pos = self.advance(&pos, &step.query, &step.answer)?;
        }
        Ok(pos)
    }

    /// Position of a swap-closed knowledge set; coloring-set encoding only.
    pub fn position_of_knowledge(&self, ks: &KnowledgeSet) -> Result<Position> {
        if !matches!(self.engine, Engine::Colorings(_)) {
            return Err(Error::Precondition("solver uses the component encoding".into()));
        }
        if ks.n() != self.n || !ks.is_swap_closed() || ks.is_empty() {
            return Err(Error::Precondition("need a nonempty swap-closed knowledge set on n balls".into()));
        }
        let half = 1usize << (self.n - 1);
        let mask = (0..half).filter(|&i| ks.contains(&half_coloring(self.n, i))).fold(0u128, |m, i| m | 1 << i);
        Ok(Position(PositionRepr::Colorings(mask)))
    }

    /// Position of a constraint graph; component encoding only.
    pub fn position_of_graph(&self, g: &PairingGraph) -> Result<Position> {
        if !matches!(self.engine, Engine::Components(_)) {
            return Err(Error::Precondition("solver uses the coloring-set encoding".into()));
        }
        if g.n() != self.n {
            return Err(Error::Precondition(format!("graph has {} balls, expected {}", g.n(), self.n)));
        }
        let mut c = Components::singletons(self.n);
        for (i, comp) in g.components().iter().enumerate() {
            for b in comp.members.iter() {
                c.labels[b.0] = ((i as u8) << 1) | u8::from(comp.side_b.contains(b));
            }
        }
        Ok(Position(PositionRepr::Components(c.normalized())))
    }

    /// Memo key of a position.
    pub fn canonicalize(&self, pos: &Position) -> Result<CanonicalKey> {
        with_engine!(self, |s| Ok(CanonicalKey(key_bytes_of(s, &s.game.key(unwrap_pos(s, pos)?)))))
    }

    pub fn verdict(&self, pos: &Position) -> Verdict {
        with_engine!(self, |s| unwrap_pos(s, pos).map_or(Verdict::Unknown, |st| s.game.verdict(st)))
    }

    pub fn is_solvable(&self, pos: &Position) -> Result<bool> {
        with_engine!(self, |s| s.is_solvable(unwrap_pos(s, pos)?))
    }

    /// Remaining worst-case queries under optimal play; `None` if the
    /// questioner cannot win from here.
    pub fn value(&self, pos: &Position) -> Result<Option<u32>> {
        with_engine!(self, |s| s.value(unwrap_pos(s, pos)?))
    }

    /// Value of the whole game.
    pub fn game_value(&self) -> Result<GameValue> {
        let upper = initial_upper_bound(self.n, self.k, self.model);
        let v = with_engine!(self, |s| s.root_value(&s.game.root(), upper, self.pool.as_ref()))?;
        Ok(v.map_or(GameValue::UNSOLVABLE, GameValue::exact))
    }

    /// A query achieving the optimal value, or `None` at terminal or lost
    /// positions.
    pub fn best_query(&self, pos: &Position) -> Result<Option<Query>> {
        with_engine!(self, |s| Ok(s.best_move(unwrap_pos(s, pos)?)?.map(|qi| s.game.queries()[qi])))
    }

    /// The legal reply to `q` leaving the largest remaining value. Ties go
    /// to the earliest reply: yes, then witnesses in lexicographic order.
    pub fn best_answer(&self, pos: &Position, q: &Query) -> Result<(Answer, Position)> {
        let qi = self.query_index(q)?;
        with_engine!(self, |s| {
            let (a, c) = s.best_answer(unwrap_pos(s, pos)?, qi)?;
            Ok((a, wrap_of(s, c)))
        })
    }

    /// Optimal strategy tree from the root, if the game is solvable.
    pub fn strategy(&self) -> Result<Option<StrategyChild>> {
        if !self.game_value()?.solvable {
            return Ok(None);
        }
        with_engine!(self, |s| s.strategy(&s.game.root()).map(Some))
    }

    pub fn stats(&self) -> MemoStats {
        with_engine!(self, |s| s.stats())
    }
}

fn key_bytes_of<G: Game>(_: &Search<G>, k: &G::Key) -> Vec<u8> {
    G::key_bytes(k)
}

fn wrap_of<G: Game>(_: &Search<G>, s: G::State) -> Position {
    G::wrap(s)
}

/// Known upper bounds used as the first search window.
fn initial_upper_bound(n: usize, k: usize, model: Model) -> Option<u32> {
    let b = match (k, model) {
        (2, _) => bounds::pairs_exact(n),
        (3, Model::Yn) if n >= 4 => bounds::majority3_upper(n),
        (3, Model::Pairing) => bounds::pairing3_exact(n),
        _ => return None,
    };
    Some(b as u32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnswerLabel {
    Yes,
    No,
}

/// One reply and what follows it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyBranch {
    pub answer: AnswerLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<[usize; 2]>,
    #[serde(flatten)]
    pub next: StrategyChild,
}

impl StrategyBranch {
    fn new(a: Answer, next: StrategyChild) -> Self {
        StrategyBranch {
            answer: if a.is_yes() { AnswerLabel::Yes } else { AnswerLabel::No },
            witness: a.witness().map(|w| [w.lo().0, w.hi().0]),
            next,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyChild {
    Node(Box<StrategyNode>),
    Verdict(Verdict),
}

impl StrategyChild {
    /// Longest query path.
    pub fn depth(&self) -> usize {
        match self {
            StrategyChild::Verdict(_) => 0,
            StrategyChild::Node(n) => 1 + n.children.iter().map(|c| c.next.depth()).max().unwrap_or(0),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("strategy serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyNode {
    pub query: Vec<usize>,
    pub children: Vec<StrategyBranch>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Solution {
    pub n: usize,
    pub k: usize,
    pub model: Model,
    pub value: GameValue,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyChild>,
    pub stats: MemoStats,
}

/// Solves `(n, k, model)` from scratch.
pub fn solve(n: usize, k: usize, model: Model, options: &SolveOptions, want_strategy: bool) -> Result<Solution> {
    let solver = ExactSolver::new(n, k, model, options)?;
    let value = solver.game_value()?;
    let strategy = if want_strategy { solver.strategy()? } else { None };
    Ok(Solution { n, k, model, value, strategy, stats: solver.stats() })
}

/// Whether the questioner can always win, for each `n` in `ns` with `n >= k`.
pub fn existence_table(k: usize, model: Model, ns: impl IntoIterator<Item = usize>) -> Result<Vec<(usize, bool)>> {
    ns.into_iter()
        .filter(|&n| n >= k)
        .map(|n| {
            let solver = ExactSolver::new(n, k, model, &SolveOptions::default())?;
            Ok((n, solver.is_solvable(&solver.root())?))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WorstCase {
    pub max_queries: usize,
    pub all_correct: bool,
    /// Number of games played.
    pub games: usize,
}

/// Adversary that walks every legal reply in turn, driven by a script of
/// choice indices. Used to enumerate all Pairing games of a questioner.
struct Explorer {
    graph: PairingGraph,
    script: Vec<usize>,
    taken: Vec<usize>,
    branching: Vec<usize>,
}

impl AnswerSource for Explorer {
    fn answer(&mut self, q: &Query) -> Result<Answer> {
        let options = self.graph.legal_answers(q);
        let pick = self.script.get(self.branching.len()).copied().unwrap_or(0);
        let a = *options.get(pick).ok_or(Error::Inconsistent)?;
        self.branching.push(options.len());
        self.taken.push(pick);
        self.graph.apply(q, &a)?;
        Ok(a)
    }
}

/// True worst case of a deterministic questioner. Y/N: every coloring
/// against the honest oracle. Pairing: every sequence of legal replies,
/// with each verdict checked against the surviving constraints.
pub fn worst_case_count(questioner: &dyn Questioner, n: usize, k: usize, model: Model) -> Result<WorstCase> {
    if questioner.arity() != k {
        return Err(Error::Precondition(format!("{} asks {}-queries, not {k}", questioner.name(), questioner.arity())));
    }
    let mut worst = WorstCase { max_queries: 0, all_correct: true, games: 0 };
    match model {
        Model::Yn => {
            if n > MAX_ENUMERATED {
                return Err(Error::TooLarge(format!("coloring sweep supports n <= {MAX_ENUMERATED}")));
            }
            for c in Coloring::all(n) {
                let r = run(questioner, &mut HonestOracle::new(c, model), model, n, Tracking::Off)?;
                worst.max_queries = worst.max_queries.max(r.query_count);
                worst.all_correct &= r.verdict.is_correct_for(&c);
                worst.games += 1;
            }
        }
        Model::Pairing => {
            let mut script: Vec<usize> = Vec::new();
            loop {
                let mut explorer =
                    Explorer { graph: PairingGraph::new(n)?, script, taken: Vec::new(), branching: Vec::new() };
                let r = run(questioner, &mut explorer, model, n, Tracking::Off)?;
                worst.max_queries = worst.max_queries.max(r.query_count);
                worst.all_correct &= explorer.graph.certifies(&r.verdict);
                worst.games += 1;
                let Some(i) = (0..explorer.taken.len()).rev().find(|&i| explorer.taken[i] + 1 < explorer.branching[i])
                else {
                    break;
                };
                script = explorer.taken[..i].to_vec();
                script.push(explorer.taken[i] + 1);
            }
        }
    }
    Ok(worst)
}

/// Forced query count of a questioner against one adversary.
pub fn forced_count(questioner: &dyn Questioner, adversary: &mut dyn AnswerSource, model: Model, n: usize) -> Result<usize> {
    Ok(run(questioner, adversary, model, n, Tracking::On)?.query_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::ExactAdversary;
    use crate::questioners::{Majority3, Optimal, PairBins, PairingBins};
    use crate::types::Pair;
    use std::sync::Arc;

    fn value(n: usize, k: usize, model: Model, options: &SolveOptions) -> GameValue {
        ExactSolver::new(n, k, model, options).unwrap().game_value().unwrap()
    }

    fn with_relabel(relabel: bool) -> SolveOptions {
        SolveOptions { relabel: Some(relabel), ..Default::default() }
    }

    #[test]
    fn solve_examples() {
        let d = SolveOptions::default();
        assert_eq!(value(4, 3, Model::Yn, &d), GameValue::exact(4));
        assert_eq!(value(3, 3, Model::Pairing, &d), GameValue::exact(1));
        assert_eq!(value(3, 2, Model::Yn, &d), GameValue::exact(1));
        assert_eq!(value(3, 3, Model::Yn, &d), GameValue::UNSOLVABLE);
        assert_eq!(value(5, 4, Model::Yn, &d), GameValue::UNSOLVABLE);
    }

    #[test]
    fn infeasible_instances_are_rejected() {
        let d = SolveOptions::default();
        assert!(matches!(ExactSolver::new(9, 3, Model::Yn, &d), Err(Error::TooLarge(_))));
        assert!(matches!(ExactSolver::new(13, 3, Model::Pairing, &d), Err(Error::TooLarge(_))));
        assert!(matches!(ExactSolver::new(2, 3, Model::Yn, &d), Err(Error::Precondition(_))));
        let colorings = SolveOptions { encoding: Encoding::Colorings, ..Default::default() };
        assert!(ExactSolver::new(5, 3, Model::Pairing, &colorings).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let tight = SolveOptions { max_states: 3, relabel: Some(false), ..Default::default() };
        let solver = ExactSolver::new(6, 3, Model::Yn, &tight).unwrap();
        assert!(matches!(solver.game_value(), Err(Error::BudgetExceeded(3))));
    }

    #[test]
    fn relabeling_preserves_values() {
        for n in 3..=6 {
            assert_eq!(value(n, 3, Model::Yn, &with_relabel(true)), value(n, 3, Model::Yn, &with_relabel(false)));
        }
        for n in 3..=7 {
            let on = value(n, 3, Model::Pairing, &with_relabel(true));
            assert_eq!(on, value(n, 3, Model::Pairing, &with_relabel(false)));
        }
    }

    #[test]
    fn encodings_agree_on_pairs() {
        for n in 2..=7 {
            for relabel in [false, true] {
                let colorings =
                    SolveOptions { encoding: Encoding::Colorings, relabel: Some(relabel), ..Default::default() };
                let components = SolveOptions { encoding: Encoding::Components, ..Default::default() };
                assert_eq!(value(n, 2, Model::Yn, &colorings), value(n, 2, Model::Yn, &components), "n = {n}");
            }
        }
    }

    #[test]
    fn threads_do_not_change_values() {
        let parallel = SolveOptions { threads: 3, ..Default::default() };
        for n in 4..=6 {
            assert_eq!(value(n, 3, Model::Yn, &parallel), value(n, 3, Model::Yn, &SolveOptions::default()));
        }
        assert_eq!(value(8, 3, Model::Pairing, &parallel), GameValue::exact(5));
    }

    #[test]
    fn canonical_keys() {
        let solver = ExactSolver::new(5, 3, Model::Pairing, &SolveOptions::default()).unwrap();
        let edge = |a, b| Pair::new(BallId(a), BallId(b)).unwrap();
        let g1 = PairingGraph::from_diff_edges(5, [edge(0, 1)]).unwrap();
        let g2 = PairingGraph::from_diff_edges(5, [edge(2, 4)]).unwrap();
        let g3 = PairingGraph::from_diff_edges(5, [edge(0, 1), edge(1, 2)]).unwrap();
        let key = |g: &PairingGraph| solver.canonicalize(&solver.position_of_graph(g).unwrap()).unwrap();
        assert_eq!(key(&g1), key(&g2));
        assert_ne!(key(&g1), key(&g3));

        let plain = ExactSolver::new(5, 3, Model::Pairing, &with_relabel(false)).unwrap();
        let key = |g: &PairingGraph| plain.canonicalize(&plain.position_of_graph(g).unwrap()).unwrap();
        assert_ne!(key(&g1), key(&g2));

        // a state and its relabeling share a key; color swap is built in
        let yn = ExactSolver::new(5, 3, Model::Yn, &SolveOptions::default()).unwrap();
        let ks = |ids: [usize; 3], a: Answer| {
            let q = Query::new(5, ids).unwrap();
            KnowledgeSet::full(5).unwrap().refine(&q, &a).unwrap()
        };
        let key = |k: &KnowledgeSet| yn.canonicalize(&yn.position_of_knowledge(k).unwrap()).unwrap();
        assert_eq!(key(&ks([0, 1, 2], Answer::Yes)), key(&ks([1, 3, 4], Answer::Yes)));
        assert_ne!(key(&ks([0, 1, 2], Answer::Yes)), key(&ks([0, 1, 2], Answer::NO)));
    }

    fn check_strategy(node: &StrategyChild, n: usize, ks: &KnowledgeSet, depth_left: usize) {
        match node {
            StrategyChild::Verdict(v) => assert!(ks.certifies(v), "{v:?} not certified"),
            StrategyChild::Node(node) => {
                assert!(depth_left > 0);
                let q = Query::new(n, node.query.iter().copied()).unwrap();
                for branch in &node.children {
                    let a = match branch.answer {
                        AnswerLabel::Yes => Answer::Yes,
                        AnswerLabel::No => Answer::NO,
                    };
                    check_strategy(&branch.next, n, &ks.refine(&q, &a).unwrap(), depth_left - 1);
                }
            }
        }
    }

    #[test]
    fn strategy_trees_are_sound() {
        for n in 4..=6 {
            let solver = ExactSolver::new(n, 3, Model::Yn, &SolveOptions::default()).unwrap();
            let v = solver.game_value().unwrap().queries.unwrap() as usize;
            let tree = solver.strategy().unwrap().unwrap();
            assert_eq!(tree.depth(), v);
            check_strategy(&tree, n, &KnowledgeSet::full(n).unwrap(), v);
            let json = tree.to_json();
            assert_eq!(serde_json::from_str::<StrategyChild>(&json).unwrap(), tree);
        }
        let solver = ExactSolver::new(3, 3, Model::Yn, &SolveOptions::default()).unwrap();
        assert_eq!(solver.strategy().unwrap(), None);
    }

    #[test]
    fn strategy_json_shape() {
        let solver = ExactSolver::new(3, 3, Model::Pairing, &SolveOptions::default()).unwrap();
        let tree = solver.strategy().unwrap().unwrap();
        let json: serde_json::Value = serde_json::from_str(&tree.to_json()).unwrap();
        let node = &json["node"];
        assert_eq!(node["query"], serde_json::json!([0, 1, 2]));
        assert_eq!(node["children"][0]["answer"], "yes");
        assert_eq!(node["children"][0]["verdict"]["kind"], "majority");
        assert_eq!(node["children"][1]["witness"], serde_json::json!([0, 1]));
        assert_eq!(node["children"][1]["verdict"]["ball"], 2);
    }

    #[test]
    fn optimal_play_meets_the_value() {
        for (n, k, model) in [(5, 3, Model::Yn), (6, 3, Model::Yn), (7, 3, Model::Pairing), (6, 2, Model::Yn)] {
            let solver = Arc::new(ExactSolver::new(n, k, model, &SolveOptions::default()).unwrap());
            let v = solver.game_value().unwrap().queries.unwrap() as usize;
            let optimal = Optimal::new(solver.clone());
            let r = run(&optimal, &mut ExactAdversary::new(solver.clone()), model, n, Tracking::On).unwrap();
            assert_eq!(r.query_count, v);
            assert_eq!(r.certified, Some(true));
            let worst = worst_case_count(&optimal, n, k, model).unwrap();
            assert_eq!(worst.max_queries, v);
            assert!(worst.all_correct);
        }
    }

    #[test]
    fn positions_follow_transcripts() {
        let solver = ExactSolver::new(4, 3, Model::Pairing, &SolveOptions::default()).unwrap();
        let mut t = Transcript::new(Model::Pairing, 3, 4).unwrap();
        let q = Query::new(4, [0, 1, 2]).unwrap();
        t.push(q, Answer::no_with(Pair::new(BallId(0), BallId(1)).unwrap())).unwrap();
        let pos = solver.position(&t).unwrap();
        assert_eq!(solver.value(&pos).unwrap(), Some(2));
        // 0 and 1 already differ, so a "yes" on them is illegal
        assert!(matches!(solver.advance(&pos, &q, &Answer::Yes), Err(Error::Inconsistent)));
        let other = Transcript::new(Model::Yn, 3, 4).unwrap();
        assert!(solver.position(&other).is_err());
    }

    #[test]
    fn worst_case_examples() {
        let w = worst_case_count(&Majority3::PLAIN, 4, 3, Model::Yn).unwrap();
        assert!(w.max_queries <= 4 && w.all_correct && w.games == 16);
        let w = worst_case_count(&PairingBins, 7, 3, Model::Pairing).unwrap();
        assert_eq!((w.max_queries, w.all_correct), (3, true));
        let w = worst_case_count(&PairBins, 6, 2, Model::Yn).unwrap();
        assert!(w.max_queries <= 4 && w.all_correct);
        assert!(worst_case_count(&PairBins, 6, 3, Model::Yn).is_err());
    }

    #[test]
    fn existence_examples() {
        assert_eq!(existence_table(3, Model::Yn, 3..=5).unwrap(), vec![(3, false), (4, true), (5, true)]);
        assert_eq!(existence_table(4, Model::Pairing, 2..=5).unwrap(), vec![(4, false), (5, true)]);
        assert_eq!(existence_table(4, Model::Yn, 5..=6).unwrap(), vec![(5, false), (6, true)]);
    }
}
