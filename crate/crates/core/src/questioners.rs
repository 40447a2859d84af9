//! Deterministic questioner strategies.
//!
//! - [`Majority3`]: groups of four balls probed with all their triples,
//!   then a counting phase against two balls of one color.
//! - [`OddReduce`]: solves on `n - 1` balls and infers the answer for odd `n`.
//! - [`PairingBins`]: monochromatic bins of size `3^c` for the Pairing model.
//! - [`PairBins`]: the classic binary bin strategy for pair queries.
//! - [`Optimal`]: replays the exact solver's best move at every step.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::session::{run, AnswerSource, Outcome, Questioner, QuestionerRun, Session, Tracking};
use crate::solver::ExactSolver;
use crate::types::{BallId, Model, Verdict};

/// The group-of-four triple strategy for the Y/N model.
///
/// Even counts run directly. Odd counts go through [`OddReduce`], except in
/// gap mode where the remainder is handled in place so the class sizes come
/// out exactly.
#[derive(Clone, Copy, Debug)]
pub struct Majority3 {
    /// Stop counting once one class holds more than half of the live balls.
    pub early_exit: bool,
    /// Also report the size of the majority class.
    pub report_gap: bool,
}

impl Majority3 {
    pub const PLAIN: Majority3 = Majority3 { early_exit: true, report_gap: false };
    pub const EXHAUSTIVE: Majority3 = Majority3 { early_exit: false, report_gap: false };
    pub const WITH_GAP: Majority3 = Majority3 { early_exit: false, report_gap: true };
}

impl Questioner for Majority3 {
    fn name(&self) -> &str {
        match (self.report_gap, self.early_exit) {
            (true, _) => "majority3-gap",
            (false, true) => "majority3",
            (false, false) => "majority3-full",
        }
    }

    fn arity(&self) -> usize {
        3
    }

    fn supports(&self, _model: Model) -> bool {
        true
    }

    fn min_balls(&self) -> usize {
        4
    }

    fn play(&self, session: &mut Session<'_>, balls: &[BallId]) -> Result<Outcome> {
        if balls.len() < 4 {
            return Err(Error::Precondition(format!("majority3 needs 4 balls, got {}", balls.len())));
        }
        if !self.report_gap && balls.len() % 2 == 1 {
            let inner = Majority3 { report_gap: false, ..*self };
            return OddReduce(inner).play(session, balls);
        }
        let m = balls.len() / 4;
        let (grouped, rest) = balls.split_at(4 * m);
        let outcome = match probe_groups(session, grouped)? {
            Some(found) => count_phase(session, balls, found, self.early_exit)?,
            None => remainder_phase(session, grouped, rest)?,
        };
        Ok(if self.report_gap { outcome } else { outcome.verdict.into() })
    }
}

/// A monochromatic triple found in group `group`, plus the fourth ball.
struct Found {
    group: usize,
    a: BallId,
    b: BallId,
    fourth: BallId,
    fourth_same: bool,
}

// Lexicographic triples of a group and the ball each one leaves out.
const TRIPLES: [([usize; 3], usize); 4] =
    [([0, 1, 2], 3), ([0, 1, 3], 2), ([0, 2, 3], 1), ([1, 2, 3], 0)];

fn probe_groups(session: &mut Session<'_>, grouped: &[BallId]) -> Result<Option<Found>> {
    for (group, g) in grouped.chunks_exact(4).enumerate() {
        for (t, (idx, left_out)) in TRIPLES.iter().enumerate() {
            let triple = idx.map(|i| g[i]);
            if !session.ask(&triple)?.is_yes() {
                continue;
            }
            let (a, b, fourth) = (triple[0], triple[1], g[*left_out]);
            // A "no" on an earlier triple means the left-out ball differs.
            // If the very first triple says "yes" nothing is known yet.
            let fourth_same = if t == 0 { session.ask(&[a, b, fourth])?.is_yes() } else { false };
            return Ok(Some(Found { group, a, b, fourth, fourth_same }));
        }
    }
    Ok(None)
}

fn count_phase(
    session: &mut Session<'_>,
    balls: &[BallId],
    found: Found,
    early_exit: bool,
) -> Result<Outcome> {
    let discarded = 4 * found.group;
    let live = balls.len() - discarded;
    let mut same = 3 + usize::from(found.fourth_same);
    let mut diff = usize::from(!found.fourth_same);
    let mut other = (!found.fourth_same).then_some(found.fourth);
    for &e in &balls[discarded + 4..] {
        if early_exit && (2 * same > live || 2 * diff > live) {
            break;
        }
        if session.ask(&[found.a, found.b, e])?.is_yes() {
            same += 1;
        } else {
            diff += 1;
            other.get_or_insert(e);
        }
    }
    let verdict = match same.cmp(&diff) {
        std::cmp::Ordering::Greater => Verdict::Majority { ball: found.a },
        std::cmp::Ordering::Less => Verdict::Majority { ball: other.expect("a differing ball") },
        std::cmp::Ordering::Equal => Verdict::NoMajority,
    };
    let counted = same + diff == live;
    let gap = counted.then(|| same.max(diff) + discarded / 2);
    Ok(Outcome { verdict, gap })
}

/// Every group split two and two; the remainder decides.
fn remainder_phase(session: &mut Session<'_>, grouped: &[BallId], rest: &[BallId]) -> Result<Outcome> {
    let half = grouped.len() / 2;
    let outcome = |verdict, size| Ok(Outcome { verdict, gap: Some(size) });
    match *rest {
        [] => outcome(Verdict::NoMajority, half),
        [x] => outcome(Verdict::Majority { ball: x }, half + 1),
        [x, y, ..] => {
            // G_1 holds both colors among its first three balls.
            let mut xy_same = false;
            for &c in &grouped[..3] {
                if session.ask(&[x, y, c])?.is_yes() {
                    xy_same = true;
                    break;
                }
            }
            match (rest.get(2), xy_same) {
                (None, true) => outcome(Verdict::Majority { ball: x }, half + 2),
                (None, false) => outcome(Verdict::NoMajority, half + 1),
                (Some(&z), false) => outcome(Verdict::Majority { ball: z }, half + 2),
                (Some(&z), true) => {
                    let size = if session.ask(&[x, y, z])?.is_yes() { half + 3 } else { half + 2 };
                    outcome(Verdict::Majority { ball: x }, size)
                }
            }
        }
    }
}

/// Runs the inner strategy without the last ball. A balanced remainder
/// makes the removed ball the majority; otherwise the inner majority leads
/// by at least two and survives the extra ball.
#[derive(Clone, Copy, Debug)]
pub struct OddReduce<Q>(pub Q);

impl<Q: Questioner> Questioner for OddReduce<Q> {
    fn name(&self) -> &str {
        self.0.name()
    }

    fn arity(&self) -> usize {
        self.0.arity()
    }

    fn supports(&self, model: Model) -> bool {
        self.0.supports(model)
    }

    fn min_balls(&self) -> usize {
        self.0.min_balls() + 1
    }

    fn play(&self, session: &mut Session<'_>, balls: &[BallId]) -> Result<Outcome> {
        let Some((&last, inner)) = balls.split_last().filter(|_| balls.len() % 2 == 1) else {
            return Err(Error::Precondition("odd reduction needs an odd ball count".into()));
        };
        let verdict = match self.0.play(session, inner)?.verdict {
            Verdict::NoMajority => Verdict::Majority { ball: last },
            Verdict::Unknown => return Err(Error::NoVerdict),
            v => v,
        };
        Ok(verdict.into())
    }
}

/// Bins of equal color whose sizes are powers of three, for the Pairing
/// model with triple queries.
#[derive(Clone, Copy, Debug, Default)]
pub struct PairingBins;

impl Questioner for PairingBins {
    fn name(&self) -> &str {
        "pairing-bins"
    }

    fn arity(&self) -> usize {
        3
    }

    fn supports(&self, model: Model) -> bool {
        model == Model::Pairing
    }

    fn min_balls(&self) -> usize {
        3
    }

    fn play(&self, session: &mut Session<'_>, balls: &[BallId]) -> Result<Outcome> {
        if session.model() != Model::Pairing {
            return Err(Error::Precondition("pairing-bins needs the Pairing model".into()));
        }
        let mut bins: Vec<Vec<BallId>> = balls.iter().map(|&b| vec![b]).collect();

        // Phase 1: merge or discard triples of equal-size bins.
        while let Some(picked) = pick_equal_bins(&bins, 3) {
            let reps: Vec<BallId> = picked.iter().map(|&i| bins[i][0]).collect();
            let answer = session.ask(&reps)?;
            match answer.witness() {
                None => merge_bins(&mut bins, &picked),
                Some(w) => {
                    let gone: Vec<usize> =
                        picked.iter().copied().filter(|&i| w.as_set().contains(bins[i][0])).collect();
                    remove_bins(&mut bins, &gone);
                }
            }
        }

        // Phase 2: resolve the two largest bins while they are bigger than one.
        loop {
            let Some(top) = bins.iter().map(Vec::len).max() else {
                return Ok(Verdict::NoMajority.into());
            };
            let largest: Vec<usize> = (0..bins.len()).filter(|&i| bins[i].len() == top).collect();
            if largest.len() == 1 {
                return Ok(Verdict::Majority { ball: bins[largest[0]][0] }.into());
            }
            let (b1, b2) = (largest[0], largest[1]);
            if top == 1 {
                return endgame(session, bins[b1][0], bins[b2][0]);
            }
            if session.ask(&[bins[b1][0], bins[b2][0], bins[b1][1]])?.is_yes() {
                return Ok(Verdict::Majority { ball: bins[b1][0] }.into());
            }
            remove_bins(&mut bins, &[b1, b2]);
        }
    }
}

/// Two singletons left: compare them against a known bichromatic pair.
fn endgame(session: &mut Session<'_>, a: BallId, b: BallId) -> Result<Outcome> {
    let Some(w) = session.first_witness() else {
        return Err(Error::Precondition("endgame needs an earlier witness".into()));
    };
    let (c, c2) = (w.lo(), w.hi());
    let first = session.ask(&[a, b, c])?;
    let verdict = match first.witness() {
        None => Verdict::Majority { ball: a },
        Some(w) if w.as_set().contains(a) && w.as_set().contains(b) => Verdict::NoMajority,
        Some(_) => {
            if session.ask(&[a, b, c2])?.is_yes() {
                Verdict::Majority { ball: a }
            } else {
                Verdict::NoMajority
            }
        }
    };
    Ok(verdict.into())
}

/// Indices of `count` bins of one size: the smallest size with enough bins,
/// and within it the bins with the lowest representatives.
fn pick_equal_bins(bins: &[Vec<BallId>], count: usize) -> Option<Vec<usize>> {
    let mut sizes: Vec<usize> = bins.iter().map(Vec::len).collect();
    sizes.sort_unstable();
    sizes.dedup();
    sizes.into_iter().find_map(|s| {
        let mut idx: Vec<usize> = (0..bins.len()).filter(|&i| bins[i].len() == s).collect();
        idx.sort_by_key(|&i| bins[i][0]);
        (idx.len() >= count).then(|| idx[..count].to_vec())
    })
}

fn merge_bins(bins: &mut Vec<Vec<BallId>>, picked: &[usize]) {
    let mut merged: Vec<BallId> = picked.iter().flat_map(|&i| bins[i].iter().copied()).collect();
    merged.sort_unstable();
    remove_bins(bins, picked);
    bins.push(merged);
    bins.sort_by_key(|b| b[0]);
}

fn remove_bins(bins: &mut Vec<Vec<BallId>>, gone: &[usize]) {
    let mut i = 0;
    bins.retain(|_| {
        i += 1;
        !gone.contains(&(i - 1))
    });
}

/// Binary bins for pair queries; identical in both models.
#[derive(Clone, Copy, Debug, Default)]
pub struct PairBins;

impl Questioner for PairBins {
    fn name(&self) -> &str {
        "pair-bins"
    }

    fn arity(&self) -> usize {
        2
    }

    fn supports(&self, _model: Model) -> bool {
        true
    }

    fn min_balls(&self) -> usize {
        2
    }

    fn play(&self, session: &mut Session<'_>, balls: &[BallId]) -> Result<Outcome> {
        let mut bins: Vec<Vec<BallId>> = balls.iter().map(|&b| vec![b]).collect();
        while let Some(picked) = pick_equal_bins(&bins, 2) {
            if session.ask(&[bins[picked[0]][0], bins[picked[1]][0]])?.is_yes() {
                merge_bins(&mut bins, &picked);
            } else {
                remove_bins(&mut bins, &picked);
            }
        }
        // Sizes are now distinct powers of two; the largest outweighs the rest.
        let verdict = match bins.iter().max_by_key(|b| b.len()) {
            Some(bin) => Verdict::Majority { ball: bin[0] },
            None => Verdict::NoMajority,
        };
        Ok(verdict.into())
    }
}

/// Plays the exact solver's optimal strategy.
#[derive(Clone)]
pub struct Optimal {
    solver: Arc<ExactSolver>,
}

impl Optimal {
    pub fn new(solver: Arc<ExactSolver>) -> Self {
        Optimal { solver }
    }
}

impl Questioner for Optimal {
    fn name(&self) -> &str {
        "optimal"
    }

    fn arity(&self) -> usize {
        self.solver.k()
    }

    fn supports(&self, model: Model) -> bool {
        model == self.solver.model()
    }

    fn min_balls(&self) -> usize {
        self.solver.n()
    }

    fn ceiling(&self, _n: usize) -> usize {
        self.solver.query_count()
    }

    fn play(&self, session: &mut Session<'_>, balls: &[BallId]) -> Result<Outcome> {
        if balls.len() != self.solver.n() || session.n() != self.solver.n() {
            return Err(Error::Precondition("optimal questioner is built for a fixed n".into()));
        }
        loop {
            let pos = self.solver.position(session.transcript())?;
            let verdict = self.solver.verdict(&pos);
            if verdict.is_known() {
                return Ok(verdict.into());
            }
            let Some(q) = self.solver.best_query(&pos)? else {
                return Err(Error::NoVerdict);
            };
            session.ask_set(q.balls())?;
        }
    }
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 5] = ["majority3", "majority3-full", "majority3-gap", "pairing-bins", "pair-bins"];

/// Looks up a scripted questioner by name. The optimal questioner needs a
/// solver and is built with [`Optimal::new`].
pub fn by_name(name: &str) -> Option<Box<dyn Questioner>> {
    Some(match name {
        "majority3" => Box::new(Majority3::PLAIN),
        "majority3-full" => Box::new(Majority3::EXHAUSTIVE),
        "majority3-gap" => Box::new(Majority3::WITH_GAP),
        "pairing-bins" => Box::new(PairingBins),
        "pair-bins" => Box::new(PairBins),
        _ => return None,
    })
}

pub fn run_majority3(source: &mut dyn AnswerSource, n: usize) -> Result<QuestionerRun> {
    run(&Majority3::PLAIN, source, Model::Yn, n, Tracking::On)
}

pub fn run_majority3_with_gap(source: &mut dyn AnswerSource, n: usize) -> Result<QuestionerRun> {
    run(&Majority3::WITH_GAP, source, Model::Yn, n, Tracking::On)
}

pub fn run_pairing_bins(source: &mut dyn AnswerSource, n: usize) -> Result<QuestionerRun> {
    run(&PairingBins, source, Model::Pairing, n, Tracking::On)
}

pub fn run_pair_bins(source: &mut dyn AnswerSource, model: Model, n: usize) -> Result<QuestionerRun> {
    run(&PairBins, source, model, n, Tracking::On)
}

/// Closed-form query bounds the strategies are measured against.
pub mod bounds {
    /// Upper bound on `majority3` for `n = 4m + r`, `m >= 1`.
    pub fn majority3_upper(n: usize) -> usize {
        match n % 4 {
            0 | 3 => n,
            1 => n - 1,
            _ => n + 1,
        }
    }

    /// Lower bound on the Y/N triple-query complexity for `n >= 4`.
    pub fn yn3_lower(n: usize) -> usize {
        if n.is_multiple_of(2) { n - 1 } else { n - 3 }
    }

    /// Exact Pairing triple-query complexity for `n >= 3`.
    pub fn pairing3_exact(n: usize) -> usize {
        if n.is_multiple_of(2) { n / 2 + 1 } else { n / 2 }
    }

    /// Exact pair-query complexity: `n` minus the number of one bits of `n`.
    pub fn pairs_exact(n: usize) -> usize {
        n - n.count_ones() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::HonestOracle;
    use crate::types::Coloring;

    fn honest(s: &str, model: Model) -> HonestOracle {
        HonestOracle::new(s.parse().unwrap(), model)
    }

    #[test]
    fn majority3_examples() {
        let r = run_majority3(&mut honest("RRRB", Model::Yn), 4).unwrap();
        assert_eq!(r.verdict, Verdict::majority(0));
        assert!(r.query_count <= 4);
        assert_eq!(r.certified, Some(true));

        let r = run_majority3(&mut honest("RRBB", Model::Yn), 4).unwrap();
        assert_eq!(r.verdict, Verdict::NoMajority);
        assert_eq!(r.query_count, 4);
        assert!(r.transcript.steps().iter().all(|s| !s.answer.is_yes()));

        let r = run_majority3(&mut honest("RRRRBB", Model::Yn), 6).unwrap();
        assert!(matches!(r.verdict, Verdict::Majority { ball } if ball.0 < 4));
        assert!(r.query_count <= 7);
    }

    #[test]
    fn first_triple_yes_spends_one_extra_query() {
        // RRRB: {0,1,2} yes, then {0,1,3} settles ball 3 before counting
        let r = run_majority3(&mut honest("RRRBRB", Model::Yn), 6).unwrap();
        let asked: Vec<Vec<usize>> = r.transcript.queries().map(|q| q.ids()).collect();
        assert_eq!(asked[..2], [vec![0, 1, 2], vec![0, 1, 3]]);
        assert_eq!(r.verdict, Verdict::majority(0));
    }

    #[test]
    fn gap_examples() {
        let r = run_majority3_with_gap(&mut honest("RRRB", Model::Yn), 4).unwrap();
        assert_eq!(r.gap, Some(3));

        let c = "RRBRBRR";
        let plain = run_majority3(&mut honest(c, Model::Yn), 7).unwrap();
        let r = run_majority3_with_gap(&mut honest(c, Model::Yn), 7).unwrap();
        assert_eq!(r.gap, Some(5));
        assert!(r.query_count <= bounds::majority3_upper(7) + 1);
        assert!(plain.verdict.same_kind(&r.verdict));

        let r = run_majority3_with_gap(&mut honest("RBRBRBRB", Model::Yn), 8).unwrap();
        assert_eq!((r.verdict, r.gap), (Verdict::NoMajority, Some(4)));
    }

    #[test]
    fn odd_reduce_examples() {
        let q = OddReduce(Majority3::PLAIN);
        let r = run(&q, &mut honest("RRBBR", Model::Yn), Model::Yn, 5, Tracking::On).unwrap();
        assert_eq!(r.verdict, Verdict::majority(4));
        let r = run(&q, &mut honest("RRRBB", Model::Yn), Model::Yn, 5, Tracking::On).unwrap();
        assert!(matches!(r.verdict, Verdict::Majority { ball } if ball.0 < 3));
        let r = run(&q, &mut honest("RRRRRRRRR", Model::Yn), Model::Yn, 9, Tracking::On).unwrap();
        assert!(matches!(r.verdict, Verdict::Majority { .. }));
        assert!(run(&q, &mut honest("RRRBBR", Model::Yn), Model::Yn, 6, Tracking::On).is_err());
    }

    #[test]
    fn pairing_bins_examples() {
        for c in Coloring::all(3) {
            let r = run_pairing_bins(&mut HonestOracle::new(c, Model::Pairing), 3).unwrap();
            assert_eq!(r.query_count, 1);
            assert!(r.verdict.is_correct_for(&c));
        }
        let r = run_pairing_bins(&mut honest("RRRRRR", Model::Pairing), 6).unwrap();
        assert_eq!(r.query_count, 3);
        assert_eq!(r.verdict, Verdict::majority(0));
        let r = run_pairing_bins(&mut honest("RRBB", Model::Pairing), 4).unwrap();
        assert_eq!(r.verdict, Verdict::NoMajority);
        assert!(r.query_count <= 3);
        assert!(run_pairing_bins(&mut honest("RRBB", Model::Yn), 4).is_err());
    }

    #[test]
    fn pair_bins_examples() {
        let r = run_pair_bins(&mut honest("RRB", Model::Yn), Model::Yn, 3).unwrap();
        assert_eq!((r.query_count, r.verdict), (1, Verdict::majority(0)));
        for (n, bound) in [(4, 3), (5, 3)] {
            for c in Coloring::all(n) {
                let r = run_pair_bins(&mut HonestOracle::new(c, Model::Yn), Model::Yn, n).unwrap();
                assert!(r.query_count <= bound);
                assert!(r.verdict.is_correct_for(&c));
            }
        }
    }

    #[test]
    fn exhaustive_correctness_small() {
        for n in 4..=9 {
            for c in Coloring::all(n) {
                for q in [Majority3::PLAIN, Majority3::EXHAUSTIVE, Majority3::WITH_GAP] {
                    let r = run(&q, &mut HonestOracle::new(c, Model::Yn), Model::Yn, n, Tracking::Off).unwrap();
                    assert!(r.verdict.is_correct_for(&c), "{} on {c}: {}", q.name(), r.verdict);
                    assert!(r.query_count <= bounds::majority3_upper(n) + usize::from(q.report_gap));
                }
            }
        }
    }

    #[test]
    fn bound_formulas() {
        assert_eq!(bounds::majority3_upper(4), 4);
        assert_eq!(bounds::majority3_upper(5), 4);
        assert_eq!(bounds::majority3_upper(6), 7);
        assert_eq!(bounds::majority3_upper(7), 7);
        assert_eq!(bounds::pairing3_exact(6), 4);
        assert_eq!(bounds::pairing3_exact(7), 3);
        assert_eq!(bounds::pairs_exact(6), 4);
        assert_eq!(bounds::pairs_exact(8), 7);
    }

    #[test]
    fn registry() {
        for name in NAMES {
            assert_eq!(by_name(name).unwrap().name(), name);
        }
        assert!(by_name("nope").is_none());
    }
}
