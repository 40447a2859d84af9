//! Driving one game: a questioner asks, an [`AnswerSource`] replies, and
//! the [`Session`] records the transcript and checks the replies.

use crate::error::{Error, Result};
use crate::knowledge::{KnowledgeSet, PairingGraph};
use crate::types::{
    Answer, BallId, BallSet, Model, Pair, Query, Transcript, Verdict, MAX_ENUMERATED,
};

/// Anything that answers queries: an honest oracle or an adversary.
///
/// Sources must stay consistent with at least one coloring. A session with
/// tracking enabled rejects replies that break this.
pub trait AnswerSource {
    fn answer(&mut self, q: &Query) -> Result<Answer>;
}

impl<S: AnswerSource + ?Sized> AnswerSource for &mut S {
    fn answer(&mut self, q: &Query) -> Result<Answer> {
        (**self).answer(q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Tracking {
    /// Trust the source. Used for honest oracles in exhaustive sweeps.
    Off,
    /// Maintain knowledge and reject inconsistent replies.
    On,
}

#[derive(Clone, Debug)]
enum Tracker {
    Off,
    Enumerated(KnowledgeSet),
    Graph(PairingGraph),
}

pub struct Session<'a> {
    source: &'a mut dyn AnswerSource,
    transcript: Transcript,
    tracker: Tracker,
    ceiling: usize,
}

impl<'a> Session<'a> {
    pub fn new(
        source: &'a mut dyn AnswerSource,
        model: Model,
        k: usize,
        n: usize,
        tracking: Tracking,
    ) -> Result<Self> {
        let transcript = Transcript::new(model, k, n)?;
        let tracker = match (tracking, model) {
            (Tracking::Off, _) => Tracker::Off,
            (Tracking::On, Model::Pairing) => Tracker::Graph(PairingGraph::new(n)?),
            (Tracking::On, Model::Yn) if n <= MAX_ENUMERATED => {
                Tracker::Enumerated(KnowledgeSet::full(n)?)
            }
            (Tracking::On, Model::Yn) => Tracker::Off,
        };
        Ok(Session { source, transcript, tracker, ceiling: n + 2 })
    }

    pub fn with_ceiling(mut self, ceiling: usize) -> Self {
        self.ceiling = ceiling;
        self
    }

    pub fn n(&self) -> usize {
        self.transcript.n()
    }

    pub fn k(&self) -> usize {
        self.transcript.k()
    }

    pub fn model(&self) -> Model {
        self.transcript.model()
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }

    pub fn queries_asked(&self) -> usize {
        self.transcript.len()
    }

    pub fn first_witness(&self) -> Option<Pair> {
        self.transcript.first_witness()
    }

    pub fn ask(&mut self, balls: &[BallId]) -> Result<Answer> {
        let set: BallSet = balls.iter().copied().collect();
        if set.len() != balls.len() {
            return Err(Error::InvalidQuery("repeated ball".into()));
        }
        self.ask_set(set)
    }

    pub fn ask_set(&mut self, balls: BallSet) -> Result<Answer> {
        if balls.len() != self.k() {
            return Err(Error::InvalidQuery(format!("arity {} != {}", balls.len(), self.k())));
        }
        if self.transcript.len() >= self.ceiling {
            return Err(Error::CeilingExceeded { ceiling: self.ceiling });
        }
        let q = Query::from_set(balls);
        let a = self.source.answer(&q)?;
        // arity, range and witness shape
        self.transcript.push(q, a)?;
        let checked = match &mut self.tracker {
            Tracker::Off => Ok(()),
            Tracker::Enumerated(ks) => ks.refine(&q, &a).map(|next| *ks = next),
            Tracker::Graph(g) => g.apply(&q, &a),
        };
        if checked.is_err() {
            return Err(Error::Inconsistent);
        }
        Ok(a)
    }

    /// Verdict implied by tracked knowledge, if tracking is on.
    pub fn knowledge_verdict(&self) -> Option<Verdict> {
        match &self.tracker {
            Tracker::Off => None,
            Tracker::Enumerated(ks) => ks.verdict().ok(),
            Tracker::Graph(g) => Some(g.structural_verdict()),
        }
    }

    /// Whether tracked knowledge proves `v`, if tracking is on.
    pub fn certifies(&self, v: &Verdict) -> Option<bool> {
        match &self.tracker {
            Tracker::Off => None,
            Tracker::Enumerated(ks) => Some(ks.certifies(v)),
            Tracker::Graph(g) => Some(g.certifies(v)),
        }
    }
}

/// What a questioner reports when it stops.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub verdict: Verdict,
    /// Size of one color class, when the strategy determines it.
    pub gap: Option<usize>,
}

impl From<Verdict> for Outcome {
    fn from(verdict: Verdict) -> Self {
        Outcome { verdict, gap: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuestionerRun {
    pub verdict: Verdict,
    pub transcript: Transcript,
    pub query_count: usize,
    pub gap: Option<usize>,
    /// Whether tracked knowledge proves the verdict; `None` without tracking.
    pub certified: Option<bool>,
}

/// A deterministic questioner strategy.
pub trait Questioner: Sync {
    fn name(&self) -> &str;

    /// Query arity the strategy uses.
    fn arity(&self) -> usize;

    fn supports(&self, model: Model) -> bool;

    /// Smallest ball count the strategy handles.
    fn min_balls(&self) -> usize;

    fn ceiling(&self, n: usize) -> usize {
        n + 2
    }

    /// Plays on the given balls, which are a subset of the session's balls.
    fn play(&self, session: &mut Session<'_>, balls: &[BallId]) -> Result<Outcome>;
}

/// Runs `questioner` on balls `0..n` against `source`.
pub fn run(
    questioner: &dyn Questioner,
    source: &mut dyn AnswerSource,
    model: Model,
    n: usize,
    tracking: Tracking,
) -> Result<QuestionerRun> {
    if !questioner.supports(model) {
        return Err(Error::Precondition(format!(
            "{} does not support the {model} model",
            questioner.name()
        )));
    }
    if n < questioner.min_balls() {
        return Err(Error::Precondition(format!(
            "{} needs n >= {}, got {n}",
            questioner.name(),
            questioner.min_balls()
        )));
    }
    let balls: Vec<BallId> = (0..n).map(BallId).collect();
    let mut session = Session::new(source, model, questioner.arity(), n, tracking)?
        .with_ceiling(questioner.ceiling(n));
    let outcome = questioner.play(&mut session, &balls)?;
    if !outcome.verdict.is_known() {
        return Err(Error::NoVerdict);
    }
    let certified = session.certifies(&outcome.verdict);
    let transcript = session.into_transcript();
    Ok(QuestionerRun {
        verdict: outcome.verdict,
        query_count: transcript.len(),
        transcript,
        gap: outcome.gap,
        certified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{honest_answer, Coloring};

    struct Liar;

    impl AnswerSource for Liar {
        fn answer(&mut self, _q: &Query) -> Result<Answer> {
            Ok(Answer::NO)
        }
    }

    struct Fixed(Coloring, Model);

    impl AnswerSource for Fixed {
        fn answer(&mut self, q: &Query) -> Result<Answer> {
            Ok(honest_answer(&self.0, q, self.1))
        }
    }

    #[test]
    fn tracking_rejects_inconsistent_sources() {
        // 0 != 1 and 1 != 2 force 0 == 2
        let mut liar = Liar;
        let mut s = Session::new(&mut liar, Model::Yn, 2, 3, Tracking::On).unwrap();
        s.ask(&[BallId(0), BallId(1)]).unwrap();
        s.ask(&[BallId(1), BallId(2)]).unwrap();
        assert!(matches!(s.ask(&[BallId(0), BallId(2)]), Err(Error::Inconsistent)));
    }

    #[test]
    fn ceiling_and_arity() {
        let mut src = Fixed("RRRB".parse().unwrap(), Model::Yn);
        let mut s = Session::new(&mut src, Model::Yn, 3, 4, Tracking::On).unwrap().with_ceiling(1);
        assert!(s.ask(&[BallId(0), BallId(1)]).is_err());
        assert!(s.ask(&[BallId(0), BallId(0), BallId(1)]).is_err());
        assert_eq!(s.ask(&[BallId(0), BallId(1), BallId(2)]).unwrap(), Answer::Yes);
        assert!(matches!(
            s.ask(&[BallId(0), BallId(1), BallId(3)]),
            Err(Error::CeilingExceeded { ceiling: 1 })
        ));
        assert_eq!(s.knowledge_verdict(), Some(Verdict::majority(0)));
    }

    #[test]
    fn pairing_source_must_give_witness() {
        let mut src = Fixed("RRBB".parse().unwrap(), Model::Yn);
        let mut s = Session::new(&mut src, Model::Pairing, 3, 4, Tracking::On).unwrap();
        assert!(matches!(s.ask(&[BallId(0), BallId(1), BallId(2)]), Err(Error::InvalidAnswer(_))));
    }
}
