//! Balls, colorings, queries, answers and transcripts.
//!
//! Every value here is immutable once built. Ball sets are bitmasks over
//! `[0, n)` with `n <= MAX_BALLS`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest instance representable by [`BallSet`].
pub const MAX_BALLS: usize = 30;

/// Largest instance for which whole knowledge sets are enumerated.
pub const MAX_ENUMERATED: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BallId(pub usize);

impl BallId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for BallId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A set of balls stored as a bitmask.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BallSet(u32);

impl BallSet {
    pub const EMPTY: BallSet = BallSet(0);

    pub fn from_bits(bits: u32) -> Self {
        BallSet(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// All balls `0..n`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_BALLS);
        BallSet(((1u64 << n) - 1) as u32)
    }

    pub fn single(b: BallId) -> Self {
        BallSet(1 << b.0)
    }

    pub fn contains(self, b: BallId) -> bool {
        b.0 < 32 && self.0 >> b.0 & 1 == 1
    }

    pub fn insert(&mut self, b: BallId) {
        self.0 |= 1 << b.0;
    }

    pub fn remove(&mut self, b: BallId) {
        self.0 &= !(1 << b.0);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset(self, other: BallSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: BallSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: BallSet) -> BallSet {
        BallSet(self.0 | other.0)
    }

    pub fn intersection(self, other: BallSet) -> BallSet {
        BallSet(self.0 & other.0)
    }

    pub fn difference(self, other: BallSet) -> BallSet {
        BallSet(self.0 & !other.0)
    }

    /// Complement relative to `0..n`.
    pub fn complement(self, n: usize) -> BallSet {
        BallSet(!self.0 & BallSet::full(n).0)
    }

    pub fn min(self) -> Option<BallId> {
        (self.0 != 0).then(|| BallId(self.0.trailing_zeros() as usize))
    }

    /// Ascending iteration.
    pub fn iter(self) -> impl Iterator<Item = BallId> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(BallId(b))
        })
    }

    pub fn to_vec(self) -> Vec<BallId> {
        self.iter().collect()
    }
}

impl FromIterator<BallId> for BallSet {
    fn from_iter<I: IntoIterator<Item = BallId>>(iter: I) -> Self {
        let mut s = BallSet::EMPTY;
        for b in iter {
            s.insert(b);
        }
        s
    }
}

impl fmt::Debug for BallSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|b| b.0)).finish()
    }
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_BALLS {
        return Err(Error::TooManyBalls { n, max: MAX_BALLS });
    }
    Ok(())
}

fn check_ball(b: usize, n: usize) -> Result<BallId> {
    if b >= n {
        return Err(Error::BallOutOfRange { ball: b, n });
    }
    Ok(BallId(b))
}

/// Red set of a two-coloring; every other ball is blue.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Coloring {
    n: usize,
    reds: BallSet,
}

impl Coloring {
    pub fn new(n: usize, reds: impl IntoIterator<Item = usize>) -> Result<Self> {
        check_n(n)?;
        let mut set = BallSet::EMPTY;
        for r in reds {
            set.insert(check_ball(r, n)?);
        }
        Ok(Coloring { n, reds: set })
    }

    pub fn from_set(n: usize, reds: BallSet) -> Result<Self> {
        check_n(n)?;
        if !reds.is_subset(BallSet::full(n)) {
            let ball = reds.difference(BallSet::full(n)).min().map_or(n, |b| b.0);
            return Err(Error::BallOutOfRange { ball, n });
        }
        Ok(Coloring { n, reds })
    }

    /// Builds a coloring from its red-set bitmask. Used by enumeration.
    pub(crate) fn from_mask(n: usize, mask: u32) -> Self {
        Coloring { n, reds: BallSet(mask) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn reds(&self) -> BallSet {
        self.reds
    }

    pub fn blues(&self) -> BallSet {
        self.reds.complement(self.n)
    }

    pub fn red_count(&self) -> usize {
        self.reds.len()
    }

    pub fn is_red(&self, b: BallId) -> bool {
        self.reds.contains(b)
    }

    pub fn same_color(&self, a: BallId, b: BallId) -> bool {
        self.is_red(a) == self.is_red(b)
    }

    pub fn is_monochromatic(&self, balls: BallSet) -> bool {
        balls.is_subset(self.reds) || balls.is_disjoint(self.reds)
    }

    /// Exchanges red and blue.
    pub fn swap(&self) -> Coloring {
        Coloring { n: self.n, reds: self.blues() }
    }

    pub fn is_balanced(&self) -> bool {
        2 * self.red_count() == self.n
    }

    /// The strictly larger color class, if any.
    pub fn majority_class(&self) -> Option<BallSet> {
        let r = self.red_count();
        match (2 * r).cmp(&self.n) {
            std::cmp::Ordering::Greater => Some(self.reds),
            std::cmp::Ordering::Less => Some(self.blues()),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn ground_truth(&self) -> Verdict {
        match self.majority_class().and_then(BallSet::min) {
            Some(ball) => Verdict::Majority { ball },
            None => Verdict::NoMajority,
        }
    }

    /// Every coloring of `n` balls, in red-mask order.
    pub fn all(n: usize) -> impl Iterator<Item = Coloring> {
        assert!(n <= MAX_ENUMERATED, "enumeration beyond {MAX_ENUMERATED} balls");
        (0u32..1 << n).map(move |m| Coloring::from_mask(n, m))
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            f.write_str(if self.reds.contains(BallId(i)) { "R" } else { "B" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coloring({self})")
    }
}

impl std::str::FromStr for Coloring {
    type Err = Error;

    /// Parses a string over `{R, B}`; character `i` is ball `i`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        check_n(s.len())?;
        let mut reds = BallSet::EMPTY;
        for (i, ch) in s.chars().enumerate() {
            match ch.to_ascii_uppercase() {
                'R' => reds.insert(BallId(i)),
                'B' => {}
                other => {
                    return Err(Error::InvalidColoring(format!("unexpected character {other:?}")))
                }
            }
        }
        Ok(Coloring { n: s.len(), reds })
    }
}

/// A set of distinct balls asked together. Order is irrelevant.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Query {
    balls: BallSet,
}

impl Query {
    pub fn new(n: usize, balls: impl IntoIterator<Item = usize>) -> Result<Self> {
        check_n(n)?;
        let mut set = BallSet::EMPTY;
        let mut count = 0;
        for b in balls {
            set.insert(check_ball(b, n)?);
            count += 1;
        }
        if set.len() != count {
            return Err(Error::InvalidQuery("repeated ball".into()));
        }
        if set.len() < 2 {
            return Err(Error::InvalidQuery("a query needs at least two balls".into()));
        }
        Ok(Query { balls: set })
    }

    pub fn from_set(balls: BallSet) -> Self {
        debug_assert!(balls.len() >= 2);
        Query { balls }
    }

    pub fn balls(&self) -> BallSet {
        self.balls
    }

    pub fn k(&self) -> usize {
        self.balls.len()
    }

    pub fn contains(&self, b: BallId) -> bool {
        self.balls.contains(b)
    }

    pub fn ids(&self) -> Vec<usize> {
        self.balls.iter().map(BallId::index).collect()
    }

    /// Unordered pairs of the query in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = Pair> + '_ {
        let v = self.balls.to_vec();
        let mut out = Vec::with_capacity(v.len() * (v.len() - 1) / 2);
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                out.push(Pair { lo: v[i], hi: v[j] });
            }
        }
        out.into_iter()
    }

    /// All `k`-subsets of `0..n` in lexicographic order.
    pub fn all(n: usize, k: usize) -> Vec<Query> {
        use itertools::Itertools;
        (0..n)
            .combinations(k)
            .map(|c| Query { balls: c.into_iter().map(BallId).collect() })
            .collect()
    }
}

impl fmt::Debug for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Query{:?}", self.balls)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.balls.iter().map(|b| b.to_string()).collect();
        write!(f, "{{{}}}", ids.join(","))
    }
}

/// Unordered pair of distinct balls, stored with `lo < hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    lo: BallId,
    hi: BallId,
}

impl Pair {
    pub fn new(a: BallId, b: BallId) -> Result<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Ok(Pair { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Ok(Pair { lo: b, hi: a }),
            std::cmp::Ordering::Equal => Err(Error::InvalidAnswer("pair of identical balls".into())),
        }
    }

    pub fn lo(&self) -> BallId {
        self.lo
    }

    pub fn hi(&self) -> BallId {
        self.hi
    }

    pub fn as_set(&self) -> BallSet {
        BallSet::single(self.lo).union(BallSet::single(self.hi))
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.lo, self.hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Yn,
    Pairing,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Yn => "yn",
            Model::Pairing => "pairing",
        })
    }
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "yn" | "y/n" => Ok(Model::Yn),
            "pairing" => Ok(Model::Pairing),
            other => Err(Error::Precondition(format!("unknown model {other:?}"))),
        }
    }
}

/// Oracle reply. A `No` carries a witness exactly in the Pairing model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No { witness: Option<Pair> },
}

impl Answer {
    pub const NO: Answer = Answer::No { witness: None };

    pub fn no_with(witness: Pair) -> Answer {
        Answer::No { witness: Some(witness) }
    }

    pub fn is_yes(&self) -> bool {
        matches!(self, Answer::Yes)
    }

    pub fn witness(&self) -> Option<Pair> {
        match self {
            Answer::No { witness } => *witness,
            Answer::Yes => None,
        }
    }

    /// Checks the answer's shape against the model and its query.
    pub fn validate(&self, model: Model, q: &Query) -> Result<()> {
        match (self, model) {
            (Answer::Yes, _) | (Answer::No { witness: None }, Model::Yn) => Ok(()),
            (Answer::No { witness: Some(_) }, Model::Yn) => {
                Err(Error::InvalidAnswer("witness given in the Y/N model".into()))
            }
            (Answer::No { witness: None }, Model::Pairing) => {
                Err(Error::InvalidAnswer("missing witness in the Pairing model".into()))
            }
            (Answer::No { witness: Some(w) }, Model::Pairing) => {
                if w.as_set().is_subset(q.balls()) {
                    Ok(())
                } else {
                    Err(Error::InvalidAnswer(format!("witness {w} outside query {q}")))
                }
            }
        }
    }

    /// Whether `c` could have produced this answer to `q`.
    pub fn consistent_with(&self, c: &Coloring, q: &Query) -> bool {
        let mono = c.is_monochromatic(q.balls());
        match self {
            Answer::Yes => mono,
            Answer::No { witness } => {
                !mono && witness.is_none_or(|w| !c.same_color(w.lo(), w.hi()))
            }
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Yes => f.write_str("yes"),
            Answer::No { witness: None } => f.write_str("no"),
            Answer::No { witness: Some(w) } => write!(f, "no {w}"),
        }
    }
}

/// The answer a truthful oracle holding `c` gives. In the Pairing model the
/// witness is the lexicographically smallest bichromatic pair of the query.
pub fn honest_answer(c: &Coloring, q: &Query, model: Model) -> Answer {
    if c.is_monochromatic(q.balls()) {
        return Answer::Yes;
    }
    match model {
        Model::Yn => Answer::NO,
        Model::Pairing => {
            let w = q
                .pairs()
                .find(|p| !c.same_color(p.lo(), p.hi()))
                .expect("non-monochromatic query has a bichromatic pair");
            Answer::no_with(w)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    NoMajority,
    Majority { ball: BallId },
    Unknown,
}

impl Verdict {
    pub fn majority(ball: usize) -> Verdict {
        Verdict::Majority { ball: BallId(ball) }
    }

    pub fn is_known(&self) -> bool {
        !matches!(self, Verdict::Unknown)
    }

    /// True when the verdict is right for coloring `c`. Any ball of the
    /// majority class is accepted.
    pub fn is_correct_for(&self, c: &Coloring) -> bool {
        match (self, c.majority_class()) {
            (Verdict::NoMajority, None) => true,
            (Verdict::Majority { ball }, Some(class)) => class.contains(*ball),
            _ => false,
        }
    }

    pub fn same_kind(&self, other: &Verdict) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NoMajority => f.write_str("no majority"),
            Verdict::Majority { ball } => write!(f, "majority: ball {ball}"),
            Verdict::Unknown => f.write_str("unknown"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub query: Query,
    pub answer: Answer,
}

/// Ordered history of one game.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TranscriptRepr", into = "TranscriptRepr")]
pub struct Transcript {
    model: Model,
    k: usize,
    n: usize,
    steps: Vec<Step>,
}

impl Transcript {
    pub fn new(model: Model, k: usize, n: usize) -> Result<Self> {
        check_n(n)?;
        if k < 2 || k > n {
            return Err(Error::Precondition(format!("need 2 <= k <= n, got k = {k}, n = {n}")));
        }
        Ok(Transcript { model, k, n, steps: Vec::new() })
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn queries(&self) -> impl Iterator<Item = Query> + '_ {
        self.steps.iter().map(|s| s.query)
    }

    /// Appends a step after checking arity, range and witness shape.
    pub fn push(&mut self, query: Query, answer: Answer) -> Result<()> {
        if query.k() != self.k {
            return Err(Error::InvalidQuery(format!("arity {} != {}", query.k(), self.k)));
        }
        if !query.balls().is_subset(BallSet::full(self.n)) {
            return Err(Error::InvalidQuery(format!("{query} has balls outside 0..{}", self.n)));
        }
        answer.validate(self.model, &query)?;
        self.steps.push(Step { query, answer });
        Ok(())
    }

    pub fn first_witness(&self) -> Option<Pair> {
        self.steps.iter().find_map(|s| s.answer.witness())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcript serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Whether `c` agrees with every step of `t`.
pub fn is_consistent(c: &Coloring, t: &Transcript) -> bool {
    c.n() == t.n() && t.steps().iter().all(|s| s.answer.consistent_with(c, &s.query))
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum AnswerKind {
    Yes,
    No,
}

#[derive(Serialize, Deserialize)]
struct StepRepr {
    query: Vec<usize>,
    answer: AnswerKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness: Option<[usize; 2]>,
}

#[derive(Serialize, Deserialize)]
struct TranscriptRepr {
    model: Model,
    k: usize,
    n: usize,
    steps: Vec<StepRepr>,
}

impl From<Transcript> for TranscriptRepr {
    fn from(t: Transcript) -> Self {
        TranscriptRepr {
            model: t.model,
            k: t.k,
            n: t.n,
            steps: t
                .steps
                .iter()
                .map(|s| StepRepr {
                    query: s.query.ids(),
                    answer: if s.answer.is_yes() { AnswerKind::Yes } else { AnswerKind::No },
                    witness: s.answer.witness().map(|w| [w.lo().0, w.hi().0]),
                })
                .collect(),
        }
    }
}

impl TryFrom<TranscriptRepr> for Transcript {
    type Error = Error;

    fn try_from(r: TranscriptRepr) -> Result<Self> {
        let mut t = Transcript::new(r.model, r.k, r.n)?;
        for s in r.steps {
            let query = Query::new(r.n, s.query)?;
            let answer = match (s.answer, s.witness) {
                (AnswerKind::Yes, None) => Answer::Yes,
                (AnswerKind::Yes, Some(_)) => {
                    return Err(Error::InvalidAnswer("witness on a yes answer".into()))
                }
                (AnswerKind::No, None) => Answer::NO,
                (AnswerKind::No, Some([a, b])) => {
                    Answer::no_with(Pair::new(check_ball(a, r.n)?, check_ball(b, r.n)?)?)
                }
            };
            t.push(query, answer)?;
        }
        Ok(t)
    }
}

impl fmt::Display for Transcript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            writeln!(f, "{:>3}. {} -> {}", i + 1, s.query, s.answer)?;
        }
        Ok(())
    }
}
