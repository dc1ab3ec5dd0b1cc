//! A small string-rewriting engine over arbitrary token types.

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{CircuitWord, Gate, BASE_GATES};
use crate::linalg::ExactMatrix;
use crate::relations::{builtin_relations, RelationSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RewriteError {
    #[error("step {step} (rule {rule}) changed the evaluated operator")]
    Unsound { step: usize, rule: String },
    #[error("step {step} (rule {rule}) did not decrease the measure `{measure}`")]
    NotDecreasing {
        step: usize,
        rule: String,
        measure: &'static str,
    },
    #[error("rule {0} is unsound")]
    UnsoundRule(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule<T> {
    pub pattern: Vec<T>,
    pub replacement: Vec<T>,
    pub id: String,
    pub note: String,
}

impl<T> RewriteRule<T> {
    pub fn new(pattern: Vec<T>, replacement: Vec<T>, id: impl Into<String>) -> Self {
        RewriteRule {
            pattern,
            replacement,
            id: id.into(),
            note: String::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// The first rule in list order that matches anywhere, at its leftmost
    /// match.
    #[default]
    PriorityOrdered,
    /// The leftmost position where any rule matches; ties go to the
    /// earlier rule.
    LeftmostFirst,
}

/// A termination measure, compared lexicographically.
pub struct Measure<T> {
    pub name: &'static str,
    pub key: fn(&[T]) -> Vec<usize>,
}

impl<T> Clone for Measure<T> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<T> Copy for Measure<T> {}

pub struct RuleSet<T> {
    pub rules: Vec<RewriteRule<T>>,
    pub strategy: Strategy,
    pub step_cap: usize,
    /// Present when the set is claimed terminating under this measure.
    pub measure: Option<Measure<T>>,
}

pub const DEFAULT_STEP_CAP: usize = 100_000;

impl<T> RuleSet<T> {
    pub fn new(rules: Vec<RewriteRule<T>>) -> Self {
        RuleSet {
            rules,
            strategy: Strategy::default(),
            step_cap: DEFAULT_STEP_CAP,
            measure: None,
        }
    }

    pub fn with_strategy(mut self, s: Strategy) -> Self {
        self.strategy = s;
        self
    }

    pub fn with_step_cap(mut self, cap: usize) -> Self {
        self.step_cap = cap;
        self
    }

    pub fn with_measure(mut self, m: Measure<T>) -> Self {
        self.measure = Some(m);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub rule: String,
    pub position: usize,
    pub length_after: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteOutcome<T> {
    pub word: Vec<T>,
    pub trace: Vec<TraceStep>,
    /// True when no rule applies to `word`.
    pub exhausted: bool,
}

/// How often `rewrite_fixpoint_checked` re-evaluates the word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    Every,
    /// Every `n`-th step and the last.
    Sampled(usize),
}

fn find<T: PartialEq>(word: &[T], pat: &[T], from: usize) -> Option<usize> {
    if pat.is_empty() {
        return None;
    }
    (from..=word.len().saturating_sub(pat.len()))
        .take_while(|&p| p + pat.len() <= word.len())
        .find(|&p| word[p..p + pat.len()] == *pat)
}

fn splice<T: Clone>(word: &[T], pos: usize, len: usize, repl: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(word.len() - len + repl.len());
    out.extend_from_slice(&word[..pos]);
    out.extend_from_slice(repl);
    out.extend_from_slice(&word[pos + len..]);
    out
}

/// Applies a single rewrite under the rule set's strategy. Returns the new
/// word, the index of the rule used, and the match position.
pub fn apply_once<T: Clone + PartialEq>(
    word: &[T],
    rs: &RuleSet<T>,
) -> Option<(Vec<T>, usize, usize)> {
    let (rule, pos) = match rs.strategy {
        Strategy::PriorityOrdered => rs
            .rules
            .iter()
            .enumerate()
            .find_map(|(i, r)| find(word, &r.pattern, 0).map(|p| (i, p)))?,
        Strategy::LeftmostFirst => (0..word.len()).find_map(|p| {
            rs.rules
                .iter()
                .position(|r| !r.pattern.is_empty() && word[p..].starts_with(&r.pattern))
                .map(|i| (i, p))
        })?,
    };
    let r = &rs.rules[rule];
    Some((
        splice(word, pos, r.pattern.len(), &r.replacement),
        rule,
        pos,
    ))
}

/// Rewrites until no rule applies or the step cap is reached.
pub fn rewrite_fixpoint<T: Clone + PartialEq>(word: &[T], rs: &RuleSet<T>) -> RewriteOutcome<T> {
    let mut cur = word.to_vec();
    let mut trace = Vec::new();
    while trace.len() < rs.step_cap {
        match apply_once(&cur, rs) {
            Some((next, rule, position)) => {
                trace.push(TraceStep {
                    rule: rs.rules[rule].id.clone(),
                    position,
                    length_after: next.len(),
                });
                cur = next;
            }
            None => {
                return RewriteOutcome {
                    word: cur,
                    trace,
                    exhausted: true,
                }
            }
        }
    }
    let exhausted = apply_once(&cur, rs).is_none();
    RewriteOutcome {
        word: cur,
        trace,
        exhausted,
    }
}

/// Like [`rewrite_fixpoint`], additionally checking that the evaluation is
/// preserved and, when the set declares one, that the measure decreases.
pub fn rewrite_fixpoint_checked<T, E>(
    word: &[T],
    rs: &RuleSet<T>,
    eval: E,
    mode: CheckMode,
) -> Result<RewriteOutcome<T>, RewriteError>
where
    T: Clone + PartialEq,
    E: Fn(&[T]) -> ExactMatrix,
{
    let reference = eval(word);
    let mut cur = word.to_vec();
    let mut trace = Vec::new();
    let mut key = rs.measure.as_ref().map(|m| (m.key)(&cur));
    loop {
        let step = trace.len();
        if step >= rs.step_cap {
            break;
        }
        let Some((next, rule, position)) = apply_once(&cur, rs) else {
            break;
        };
        let id = &rs.rules[rule].id;
        if let Some(m) = rs.measure.as_ref() {
            let k = (m.key)(&next);
            if key.as_ref().is_some_and(|old| k >= *old) {
                return Err(RewriteError::NotDecreasing {
                    step,
                    rule: id.clone(),
                    measure: m.name,
                });
            }
            key = Some(k);
        }
        let due = match mode {
            CheckMode::Every => true,
            CheckMode::Sampled(n) => n == 0 || step % n == 0,
        };
        if due && eval(&next) != reference {
            return Err(RewriteError::Unsound {
                step,
                rule: id.clone(),
            });
        }
        trace.push(TraceStep {
            rule: id.clone(),
            position,
            length_after: next.len(),
        });
        cur = next;
    }
    if eval(&cur) != reference {
        return Err(RewriteError::Unsound {
            step: trace.len(),
            rule: trace.last().map(|t| t.rule.clone()).unwrap_or_default(),
        });
    }
    let exhausted = apply_once(&cur, rs).is_none();
    Ok(RewriteOutcome {
        word: cur,
        trace,
        exhausted,
    })
}

/// Checks each rule against a matrix model.
pub fn check_rules<T, E>(rs: &RuleSet<T>, eval: E) -> Result<(), RewriteError>
where
    E: Fn(&[T]) -> ExactMatrix,
{
    match rs
        .rules
        .iter()
        .find(|r| eval(&r.pattern) != eval(&r.replacement))
    {
        Some(r) => Err(RewriteError::UnsoundRule(r.id.clone())),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConfluenceReport {
    pub samples: usize,
    /// Samples whose one-step successors reached different normal forms.
    pub divergent: usize,
    /// Samples where some branch hit the step cap.
    pub unresolved: usize,
}

/// Empirical local-confluence check: for each sample word, every one-step
/// rewrite is driven to a fixpoint and the results are compared.
pub fn confluence_sample<T: Clone + PartialEq>(
    rs: &RuleSet<T>,
    words: &[Vec<T>],
) -> ConfluenceReport {
    let mut report = ConfluenceReport::default();
    for word in words {
        report.samples += 1;
        let mut successors = Vec::new();
        for r in &rs.rules {
            let mut from = 0;
            while let Some(p) = find(word, &r.pattern, from) {
                successors.push(splice(word, p, r.pattern.len(), &r.replacement));
                from = p + 1;
            }
        }
        let outcomes: Vec<RewriteOutcome<T>> =
            successors.iter().map(|s| rewrite_fixpoint(s, rs)).collect();
        if outcomes.iter().any(|o| !o.exhausted) {
            report.unresolved += 1;
        } else if outcomes.windows(2).any(|p| p[0].word != p[1].word) {
            report.divergent += 1;
        }
    }
    report
}

/// Evaluation hook for gate-token rule sets.
pub fn circuit_eval(tokens: &[Gate]) -> ExactMatrix {
    CircuitWord::new(tokens.to_vec()).eval()
}

fn inversions(word: &[Gate]) -> usize {
    let mut n = 0;
    for (a, &g) in word.iter().enumerate() {
        for &h in &word[a + 1..] {
            if h < g && commute(g, h) {
                n += 1;
            }
        }
    }
    n
}

/// Whether two tokens commute by disjoint support, by being diagonal, or
/// because one is the scalar.
fn commute(g: Gate, h: Gate) -> bool {
    let diagonal = |g: Gate| {
        matches!(
            g,
            Gate::S(_) | Gate::CS(_) | Gate::Sdg(_) | Gate::CSdg(_) | Gate::CZ(_) | Gate::CCZ
        )
    };
    g.support() & h.support() == 0 || (diagonal(g) && diagonal(h))
}

/// Measure for [`standard_simplifier`]: `(#K, length, inversions)`.
pub fn k_length_inversions(word: &[Gate]) -> Vec<usize> {
    let k = word.iter().filter(|g| matches!(g, Gate::K(_))).count();
    vec![k, word.len(), inversions(word)]
}

/// Sorting rules `g h → h g` for commuting base tokens with `h < g`.
pub fn commutation_rules() -> Vec<RewriteRule<Gate>> {
    let mut out = Vec::new();
    for &g in &BASE_GATES {
        for &h in &BASE_GATES {
            if h < g && commute(g, h) {
                out.push(RewriteRule {
                    pattern: vec![g, h],
                    replacement: vec![h, g],
                    id: format!("comm:{g}.{h}"),
                    note: "commutation, oriented by token order".into(),
                });
            }
        }
    }
    out
}

/// Commutation sorting alone; terminating since each step removes one
/// inversion.
pub fn commutation_rule_set() -> RuleSet<Gate> {
    RuleSet::new(commutation_rules()).with_measure(Measure {
        name: "inversions",
        key: |w| vec![inversions(w)],
    })
}

/// Power reductions from the presentation (`i^4`, `K^2`, `S^4`, `CS^4`),
/// then commutation sorting.
pub fn standard_simplifier() -> RuleSet<Gate> {
    let mut rules = Vec::new();
    for r in builtin_relations(RelationSet::Core) {
        if matches!(r.family.as_str(), "C1" | "C2" | "C3" | "C5") {
            rules.push(RewriteRule {
                pattern: r.lhs.into_tokens(),
                replacement: r.rhs.into_tokens(),
                id: format!("{}[{}]", r.family, r.instance),
                note: "power reduction".into(),
            });
        }
    }
    rules.extend(commutation_rules());
    RuleSet::new(rules).with_measure(Measure {
        name: "K-count, length, inversions",
        key: k_length_inversions,
    })
}

/// Random base word helper for confluence sampling.
pub fn random_gate_words<R: Rng + ?Sized>(
    rng: &mut R,
    count: usize,
    max_len: usize,
) -> Vec<Vec<Gate>> {
    (0..count)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            CircuitWord::random_base(rng, len).into_tokens()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::w;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn toks(s: &str) -> Vec<Gate> {
        w(s).into_tokens()
    }

    #[test]
    fn apply_once_examples() {
        let rs = RuleSet::new(vec![RewriteRule::new(toks("S0 S0 S0 S0"), vec![], "s4")]);
        let (out, rule, pos) = apply_once(&toks("S0 S0 S0 S0"), &rs).unwrap();
        assert!(out.is_empty());
        assert_eq!((rule, pos), (0, 0));
        assert!(apply_once(&[], &rs).is_none());
        let rs = RuleSet::new(vec![RewriteRule::new(toks("K0 K0"), toks("i i i"), "k2")]);
        assert_eq!(apply_once(&toks("K0 K0"), &rs).unwrap().0, toks("i i i"));
    }

    #[test]
    fn strategies_differ() {
        let rules = vec![
            RewriteRule::new(vec!['b'], vec!['x'], "b"),
            RewriteRule::new(vec!['a'], vec!['y'], "a"),
        ];
        let word: Vec<char> = "ab".chars().collect();
        let pri = RuleSet::new(rules.clone());
        assert_eq!(apply_once(&word, &pri).unwrap().0, vec!['a', 'x']);
        let left = RuleSet::new(rules).with_strategy(Strategy::LeftmostFirst);
        assert_eq!(apply_once(&word, &left).unwrap().0, vec!['y', 'b']);
    }

    #[test]
    fn commutation_normalizes_both_sides() {
        let rs = commutation_rule_set();
        let a = rewrite_fixpoint(&toks("S0 CS01"), &rs);
        let b = rewrite_fixpoint(&toks("CS01 S0"), &rs);
        assert!(a.exhausted && b.exhausted);
        assert_eq!(a.word, b.word);
        assert_eq!(circuit_eval(&toks("S0 CS01")), circuit_eval(&a.word));
    }

    #[test]
    fn fixpoint_is_idempotent() {
        let rs = standard_simplifier();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for word in random_gate_words(&mut rng, 30, 25) {
            let once = rewrite_fixpoint(&word, &rs);
            assert!(once.exhausted);
            let twice = rewrite_fixpoint(&once.word, &rs);
            assert_eq!(twice.word, once.word);
            assert!(twice.trace.is_empty());
        }
    }

    #[test]
    fn looping_rules_hit_the_cap() {
        let rs = RuleSet::new(vec![
            RewriteRule::new(vec!['a'], vec!['b'], "ab"),
            RewriteRule::new(vec!['b'], vec!['a'], "ba"),
        ])
        .with_step_cap(50);
        let out = rewrite_fixpoint(&['a'], &rs);
        assert!(!out.exhausted);
        assert_eq!(out.trace.len(), 50);
    }

    #[test]
    fn checked_rewriting_preserves_eval_and_decreases_measure() {
        let rs = standard_simplifier();
        check_rules(&rs, circuit_eval).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for word in random_gate_words(&mut rng, 20, 20) {
            let out = rewrite_fixpoint_checked(&word, &rs, circuit_eval, CheckMode::Every).unwrap();
            assert!(out.exhausted);
            assert!(k_length_inversions(&out.word)[0] <= k_length_inversions(&word)[0]);
        }
    }

    #[test]
    fn unsound_rule_is_caught() {
        let rs = RuleSet::new(vec![RewriteRule::new(toks("S0"), toks("S1"), "bad")]);
        assert!(check_rules(&rs, circuit_eval).is_err());
        let err =
            rewrite_fixpoint_checked(&toks("S0"), &rs, circuit_eval, CheckMode::Every).unwrap_err();
        assert!(matches!(err, RewriteError::Unsound { .. }));
    }

    #[test]
    fn confluence_sampling_runs() {
        let rs = commutation_rule_set();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let words = random_gate_words(&mut rng, 40, 10);
        let report = confluence_sample(&rs, &words);
        assert_eq!(report.samples, 40);
        assert_eq!(report.unresolved, 0);
    }
}
