//! Acceptance criteria 1 to 8. Each line passes only when the library check
//! and an independent oracle written here both agree.

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use mql_core::adversaries::HonestOracle;
use mql_core::questioners::Majority3;
use mql_core::verify::{VerifyOptions, Verifier, CHECKS};
use mql_core::{run, Answer, BallId, Coloring, Model, PairingGraph, Pair, Query, Tracking, Verdict};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Colorings are red-set masks; a state is the set of consistent colorings
/// as a bitmask over all `2^n` of them.
struct Brute {
    n: usize,
    k: usize,
    model: Model,
    queries: Vec<u32>,
    memo: HashMap<u128, Option<u32>>,
}

impl Brute {
    fn new(n: usize, k: usize, model: Model) -> Self {
        assert!(n <= 7);
        let queries = (0u32..1 << n).filter(|q| q.count_ones() as usize == k).collect();
        Brute { n, k, model, queries, memo: HashMap::new() }
    }

    fn verdict(&self, s: u128) -> Option<Verdict> {
        let n = self.n;
        let colorings: Vec<u32> = (0..1u32 << n).filter(|&c| s >> c & 1 == 1).collect();
        if colorings.iter().all(|c| 2 * c.count_ones() as usize == n) {
            return Some(Verdict::NoMajority);
        }
        (0..n)
            .find(|&b| {
                colorings.iter().all(|&c| {
                    let reds = c.count_ones() as usize;
                    let own = if c >> b & 1 == 1 { reds } else { n - reds };
                    2 * own > n
                })
            })
            .map(Verdict::majority)
    }

    fn children(&self, s: u128, q: u32) -> Vec<u128> {
        let all = |keep: &dyn Fn(u32) -> bool| (0..1u32 << self.n).filter(|&c| s >> c & 1 == 1 && keep(c)).fold(0u128, |m, c| m | 1 << c);
        let mono = |c: u32| c & q == q || c & q == 0;
        let mut out = vec![all(&|c| mono(c)), all(&|c| !mono(c))];
        if self.model == Model::Pairing {
            out.pop();
            let balls: Vec<u32> = (0..self.n as u32).filter(|b| q >> b & 1 == 1).collect();
            for (i, &a) in balls.iter().enumerate() {
                for &b in &balls[i + 1..] {
                    out.push(all(&|c| (c >> a & 1) != (c >> b & 1)));
                }
            }
        }
        out.retain(|&c| c != 0);
        out
    }

    fn value(&mut self, s: u128) -> Option<u32> {
        if self.verdict(s).is_some() {
            return Some(0);
        }
        if let Some(v) = self.memo.get(&s) {
            return *v;
        }
        let mut best: Option<u32> = None;
        for q in self.queries.clone() {
            let children = self.children(s, q);
            if children.contains(&s) {
                continue;
            }
            let mut worst = Some(0);
            for c in children {
                worst = match (worst, self.value(c)) {
                    (Some(w), Some(v)) => Some(w.max(v)),
                    _ => None,
                };
            }
            if let Some(w) = worst {
                best = Some(best.map_or(w + 1, |b| b.min(w + 1)));
            }
        }
        self.memo.insert(s, best);
        best
    }

    fn root_value(n: usize, k: usize, model: Model) -> Option<u32> {
        let mut b = Brute::new(n, k, model);
        let full = if n == 7 { u128::MAX } else { (1u128 << (1 << n)) - 1 };
        let _ = b.k;
        b.value(full)
    }
}

fn ones(n: usize) -> usize {
    format!("{n:b}").matches('1').count()
}

fn pairing_formula(n: usize) -> u32 {
    (if n.is_multiple_of(2) { n / 2 + 1 } else { n / 2 }) as u32
}

fn majority3_bound(n: usize) -> usize {
    [n, n - 1, n + 1, n][n % 4]
}

struct Oracle<'a> {
    verifier: &'a Verifier,
    failures: Vec<String>,
}

impl Oracle<'_> {
    fn ensure(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(format!("oracle: {}", msg()));
        }
    }

    fn solved(&self, n: usize, k: usize, model: Model) -> Option<u32> {
        self.verifier.solved(n, k, model).expect("feasible").1.queries
    }

    fn run(&mut self, id: u8) {
        match id {
            1 => {
                for n in 4..=5 {
                    let brute = Brute::root_value(n, 3, Model::Yn);
                    self.ensure(brute == self.solved(n, 3, Model::Yn), || format!("brute q_3({n}) = {brute:?}"));
                }
                let expected = [(4, 4), (5, 4), (6, 7)];
                for (n, v) in expected {
                    let got = self.solved(n, 3, Model::Yn);
                    self.ensure(got == Some(v), || format!("q_3({n}) = {got:?}"));
                }
            }
            2 => {
                let values: Vec<Option<u32>> = (3..=8).map(|n| self.solved(n, 3, Model::Pairing)).collect();
                for (n, v) in (3..=8).zip(&values) {
                    self.ensure(*v == Some(pairing_formula(n)), || format!("q^p_3({n}) = {v:?}"));
                }
                self.ensure(values[3] > values[4], || "no drop from n = 6 to n = 7".into());
                for n in 3..=6 {
                    let brute = Brute::root_value(n, 3, Model::Pairing);
                    self.ensure(brute == Some(pairing_formula(n)), || format!("brute q^p_3({n}) = {brute:?}"));
                }
            }
            3 => {
                for model in [Model::Yn, Model::Pairing] {
                    for n in 2..=9 {
                        let v = self.solved(n, 2, model);
                        self.ensure(v == Some((n - ones(n)) as u32), || format!("{model} q_2({n}) = {v:?}"));
                    }
                    for n in 2..=6 {
                        let brute = Brute::root_value(n, 2, model);
                        self.ensure(brute == Some((n - ones(n)) as u32), || format!("brute {model} q_2({n}) = {brute:?}"));
                    }
                }
            }
            4 => {
                // k = 3, n = 3 Y/N is reported by the library check, not asserted here
                for (k, model, n) in [(3, Model::Yn, 4), (3, Model::Yn, 5), (3, Model::Pairing, 3), (4, Model::Yn, 6), (4, Model::Pairing, 5)] {
                    self.ensure(Brute::root_value(n, k, model).is_some(), || format!("brute: ({n}, {k}, {model}) unsolvable"));
                }
                for (k, model, n) in [(4, Model::Yn, 5), (4, Model::Yn, 4), (4, Model::Pairing, 4)] {
                    self.ensure(Brute::root_value(n, k, model).is_none(), || format!("brute: ({n}, {k}, {model}) solvable"));
                }
            }
            5 => {
                for n in 4..=14 {
                    let mut worst = 0;
                    for mask in 0u32..1 << n {
                        let c = Coloring::new(n, (0..n).filter(|b| mask >> b & 1 == 1)).unwrap();
                        let r = run(&Majority3::PLAIN, &mut HonestOracle::new(c, Model::Yn), Model::Yn, n, Tracking::Off).unwrap();
                        worst = worst.max(r.query_count);
                        let reds = mask.count_ones() as usize;
                        let ok = match r.verdict {
                            Verdict::NoMajority => 2 * reds == n,
                            Verdict::Majority { ball } => {
                                let own = if mask >> ball.0 & 1 == 1 { reds } else { n - reds };
                                2 * own > n
                            }
                            Verdict::Unknown => false,
                        };
                        if !ok {
                            self.ensure(false, || format!("majority3 wrong on {c}"));
                            break;
                        }
                    }
                    self.ensure(worst <= majority3_bound(n), || format!("majority3 uses {worst} at n = {n}"));
                }
            }
            6 => {
                // forced counts are checked by the library; here the
                // partition property itself is re-derived for one play
                let mut adv = mql_core::adversaries::PartitionAdversary::new(6).unwrap();
                let mut asked: Vec<u32> = Vec::new();
                use mql_core::AnswerSource;
                for q in Query::all(6, 3) {
                    let a = adv.answer(&q).unwrap();
                    let mask = q.balls().bits();
                    asked.push(mask);
                    let splitting = (0u32..64)
                        .filter(|x| x.count_ones() == 3)
                        .any(|x| asked.iter().all(|&t| t & x != 0 && t & x != t));
                    if a == Answer::Yes {
                        let prior = &asked[..asked.len() - 1];
                        let prior_split = (0u32..64).filter(|x| x.count_ones() == 3).any(|x| prior.iter().all(|&t| t & x != 0 && t & x != t));
                        self.ensure(!splitting || !prior_split, || "yes while a splitting set survives".into());
                    }
                }
            }
            7 => self.knowledge_oracle(),
            _ => {
                for n in 4..=8 {
                    let Some(v) = self.solved(n, 3, Model::Yn) else {
                        self.ensure(false, || format!("q_3({n}) unsolved"));
                        continue;
                    };
                    let lower = if n % 2 == 0 { n - 1 } else { n - 3 } as u32;
                    self.ensure(lower <= v && v as usize <= majority3_bound(n), || format!("q_3({n}) = {v}"));
                }
            }
        }
    }

    /// Structural verdicts against direct enumeration of 2-colorings.
    fn knowledge_oracle(&mut self) {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..2_000 {
            let n = rng.gen_range(3..=7);
            let mask: u32 = rng.gen_range(0..1 << n);
            let mut g = PairingGraph::new(n).unwrap();
            let mut steps: Vec<(u32, Option<(usize, usize)>)> = Vec::new();
            for _ in 0..rng.gen_range(1..=8) {
                let mut balls: Vec<usize> = (0..n).collect();
                for i in 0..3 {
                    let j = rng.gen_range(i..n);
                    balls.swap(i, j);
                }
                let trio = &balls[..3];
                let q = Query::new(n, trio.iter().copied()).unwrap();
                let red = |b: usize| mask >> b & 1 == 1;
                let a = if trio.iter().all(|&b| red(b) == red(trio[0])) {
                    steps.push((q.balls().bits(), None));
                    Answer::Yes
                } else {
                    let mixed: Vec<(usize, usize)> = trio
                        .iter()
                        .flat_map(|&x| trio.iter().map(move |&y| (x, y)))
                        .filter(|&(x, y)| x < y && red(x) != red(y))
                        .collect();
                    let (x, y) = mixed[rng.gen_range(0..mixed.len())];
                    steps.push((q.balls().bits(), Some((x, y))));
                    Answer::no_with(Pair::new(BallId(x), BallId(y)).unwrap())
                };
                g.apply(&q, &a).unwrap();
            }
            let consistent: Vec<u32> = (0u32..1 << n)
                .filter(|&c| {
                    steps.iter().all(|&(q, w)| match w {
                        None => c & q == q || c & q == 0,
                        Some((x, y)) => (c >> x & 1) != (c >> y & 1),
                    })
                })
                .collect();
            let expected = Brute::new(n, 3, Model::Pairing).verdict(consistent.iter().fold(0u128, |m, &c| m | 1 << c));
            let got = g.structural_verdict();
            self.ensure(Some(got) == expected || (got == Verdict::Unknown && expected.is_none()), || {
                format!("structural {got:?} vs enumerated {expected:?} for steps {steps:?}")
            });
        }
        // edge bound on diff-only graphs, certified by enumeration
        for n in 2..=6usize {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            for subset in 0u32..1 << pairs.len() {
                let edges: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(i, _)| subset >> i & 1 == 1).map(|(_, e)| *e).collect();
                let colorings: u128 = (0u32..1 << n)
                    .filter(|&c| edges.iter().all(|&(a, b)| (c >> a & 1) != (c >> b & 1)))
                    .fold(0, |m, c| m | 1 << c);
                if colorings == 0 {
                    continue;
                }
                if let Some(Verdict::Majority { .. }) = Brute::new(n, 3, Model::Pairing).verdict(colorings) {
                    self.ensure(edges.len() >= n / 2, || format!("edge bound fails on {edges:?}"));
                }
            }
        }
    }
}

fn main() {
    let threads = std::env::var("MQL_THREADS").ok().and_then(|t| t.parse().ok()).unwrap_or(1);
    let verifier = Verifier::new(VerifyOptions { threads, ..Default::default() });
    let mut all_passed = true;
    for (id, name) in CHECKS {
        let start = Instant::now();
        let check = verifier.run(id);
        let mut oracle = Oracle { verifier: &verifier, failures: Vec::new() };
        let outcome = catch_unwind(AssertUnwindSafe(|| oracle.run(id)));
        let mut failures = check.failures.clone();
        failures.extend(oracle.failures);
        if outcome.is_err() {
            failures.push("oracle panicked".into());
        }
        let passed = failures.is_empty();
        all_passed &= passed;
        let status = if passed { "PASS" } else { "FAIL" };
        println!("criterion {id} {name}: {status} ({:.1}s)", start.elapsed().as_secs_f64());
        for note in &check.notes {
            println!("    {note}");
        }
        for failure in failures.iter().take(20) {
            println!("    FAIL {failure}");
        }
    }
    if !all_passed {
        std::process::exit(1);
    }
}
