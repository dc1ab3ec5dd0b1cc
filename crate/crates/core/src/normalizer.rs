//! Almost-normal forms: alternation of PD segments and K0-type blocks,
//! renormalized left to right through the finite subgroups.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::circuit::{CircuitWord, Gate, Pair};
use crate::linalg::ExactMatrix;
use crate::relations::{builtin_relations, RelationSet, Witness};
use crate::subgroups::{
    factor_k0cd, factor_pd_monomial, tables, CNormal, DNormal, EChoice, Monomial, NormalWord,
    QNormal, SubgroupError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("internal factorization failed: {0}")]
    Factor(#[from] SubgroupError),
    #[error("step {0} changed the operator")]
    Unsound(usize),
    #[error("rule {0} does not split into matching syllables")]
    BadRule(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Syllable {
    CosetRep(usize),
    EBlock(EChoice),
    Tail(CNormal, QNormal, DNormal),
    RawSegment(CircuitWord),
}

impl Syllable {
    pub fn word(&self) -> CircuitWord {
        match self {
            Syllable::CosetRep(v) => tables().v_words[*v].clone(),
            Syllable::EBlock(e) => e.word(),
            Syllable::Tail(c, q, d) => c.word().concat(&q.word()).concat(&d.word()),
            Syllable::RawSegment(w) => w.clone(),
        }
    }
}

impl fmt::Display for Syllable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Syllable::CosetRep(v) => write!(f, "V[{v}]"),
            Syllable::EBlock(e) => write!(f, "E({},{},{},{})", e.e4, e.e3, e.e2, e.e1),
            Syllable::Tail(..) => write!(f, "Tail({})", self.word()),
            Syllable::RawSegment(w) => write!(f, "PD({w})"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SyllableWord {
    pub syllables: Vec<Syllable>,
}

impl SyllableWord {
    pub fn flatten(&self) -> CircuitWord {
        self.syllables
            .iter()
            .flat_map(|s| s.word().into_tokens())
            .collect()
    }

    pub fn eval(&self) -> ExactMatrix {
        self.flatten().eval()
    }

    pub fn e_count(&self) -> usize {
        self.syllables
            .iter()
            .filter(|s| matches!(s, Syllable::EBlock(_)))
            .count()
    }

    /// Whether the shape is `(CosetRep EBlock)* CosetRep Tail`.
    pub fn is_processed(&self) -> bool {
        let n = self.syllables.len();
        n >= 2
            && matches!(self.syllables[n - 1], Syllable::Tail(..))
            && self.syllables[..n - 1]
                .iter()
                .enumerate()
                .all(|(k, s)| match s {
                    Syllable::CosetRep(_) => k % 2 == 0,
                    Syllable::EBlock(_) => k % 2 == 1,
                    _ => false,
                })
    }
}

impl fmt::Display for SyllableWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.syllables.iter().map(Syllable::to_string).collect();
        write!(f, "{}", parts.join(" · "))
    }
}

const K0: Gate = Gate::K(0);

fn push_token(g: Gate, raw: &mut Vec<Gate>, out: &mut Vec<Syllable>, last_was_k0: &mut bool) {
    match g {
        Gate::K(0) => {
            if !raw.is_empty() || *last_was_k0 {
                out.push(Syllable::RawSegment(CircuitWord::new(std::mem::take(raw))));
            }
            out.push(Syllable::EBlock(EChoice {
                e4: 1,
                ..Default::default()
            }));
            *last_was_k0 = true;
            return;
        }
        Gate::K(1) => {
            for t in [Gate::Swap(Pair::P01), K0, Gate::Swap(Pair::P01)] {
                push_token(t, raw, out, last_was_k0);
            }
            return;
        }
        Gate::K(2) => {
            let (s01, s12) = (Gate::Swap(Pair::P01), Gate::Swap(Pair::P12));
            for t in [s12, s01, K0, s01, s12] {
                push_token(t, raw, out, last_was_k0);
            }
            return;
        }
        g if g.is_monomial() => raw.push(g),
        g => {
            for t in g
                .definition()
                .expect("non-monomial macros have definitions")
            {
                push_token(t, raw, out, last_was_k0);
            }
            return;
        }
    }
    *last_was_k0 = false;
}

/// Splits a word into K0-free monomial segments and K0 markers. K1 and K2
/// become conjugates of K0 by swaps; adjacent markers get an empty segment
/// between them.
pub fn alternation_decompose(word: &CircuitWord) -> SyllableWord {
    let mut out = Vec::new();
    let mut raw = Vec::new();
    let mut last_was_k0 = false;
    for &g in word.iter() {
        push_token(g, &mut raw, &mut out, &mut last_was_k0);
    }
    if !raw.is_empty() {
        out.push(Syllable::RawSegment(CircuitWord::new(raw)));
    }
    SyllableWord { syllables: out }
}

/// Working form: `pd[0] x[0] pd[1] … x[m-1] pd[m]` with monomial `pd`
/// and K0D-valued `x`.
#[derive(Clone, Debug)]
struct Alternation {
    pd: Vec<Monomial>,
    x: Vec<ExactMatrix>,
}

impl Alternation {
    fn from_syllables(s: &SyllableWord) -> Alternation {
        let mut pd = vec![Monomial::IDENTITY];
        let mut x = Vec::new();
        for syl in &s.syllables {
            match syl {
                Syllable::EBlock(e) => {
                    x.push(e.matrix().clone());
                    pd.push(Monomial::IDENTITY);
                }
                other => {
                    let m = Monomial::of_word(&other.word()).expect("segments are monomial");
                    let last = pd.last_mut().expect("nonempty");
                    *last = last.mul(&m);
                }
            }
        }
        Alternation { pd, x }
    }

    /// One left-to-right pass producing `(CosetRep EBlock)* CosetRep Tail`.
    fn pass(&self) -> Result<SyllableWord, SubgroupError> {
        let t = tables();
        let mut out = Vec::new();
        let mut carry = Monomial::IDENTITY;
        for (pd, x) in self.pd.iter().zip(&self.x) {
            let (nf, h) = factor_pd_monomial(&carry.mul(pd))?;
            let k = factor_k0cd(&h.to_matrix().mul(x))?;
            if k.k.e.is_identity() {
                carry = t.v_monomial(nf.p.v).mul(&k.dqc_monomial());
            } else {
                out.push(Syllable::CosetRep(nf.p.v));
                out.push(Syllable::EBlock(k.k.e));
                carry = k.dqc_monomial();
            }
        }
        let last = self.pd.last().expect("nonempty");
        let (nf, _) = factor_pd_monomial(&carry.mul(last))?;
        out.push(Syllable::CosetRep(nf.p.v));
        out.push(Syllable::Tail(nf.p.c, nf.p.q, nf.d));
        Ok(SyllableWord { syllables: out })
    }

    /// Folds `x[j-1]·x[j]` wherever the segment between them is trivial.
    fn merge_trivial(&mut self) -> bool {
        let mut changed = false;
        let mut j = 1;
        while j < self.x.len() {
            if self.pd[j] == Monomial::IDENTITY {
                let joined = self.x[j - 1].mul(&self.x[j]);
                self.x[j - 1] = joined;
                self.x.remove(j);
                self.pd.remove(j);
                changed = true;
            } else {
                j += 1;
            }
        }
        changed
    }
}

/// A rewrite of the form `l0 Y0 l1 … Y(t-1) lt = r0 Z0 r1 … Z(t-1) rt` with
/// monomial `l`, `r` and K0D blocks `Y`, `Z`. The boundary pieces `l0`,
/// `lt` are absorbed into neighbouring segments; blocks and interior
/// pieces must match exactly.
#[derive(Clone, Debug)]
pub struct SyllableRule {
    pub id: String,
    lhs: (Vec<Monomial>, Vec<ExactMatrix>),
    rhs: (Vec<Monomial>, Vec<ExactMatrix>),
}

fn split_rule_side(word: &CircuitWord) -> (Vec<Monomial>, Vec<ExactMatrix>) {
    let mut pd = vec![Monomial::IDENTITY];
    let mut x: Vec<ExactMatrix> = Vec::new();
    let mut in_block = false;
    for &g in word.iter() {
        match Monomial::of_gate(g) {
            Some(m) => {
                let last = pd.last_mut().expect("nonempty");
                *last = last.mul(&m);
                in_block = false;
            }
            None => {
                if in_block {
                    let top = x.last_mut().expect("open block");
                    *top = top.mul(g.matrix());
                } else {
                    x.push(g.matrix().clone());
                    pd.push(Monomial::IDENTITY);
                }
                in_block = true;
            }
        }
    }
    (pd, x)
}

impl SyllableRule {
    pub fn from_words(
        id: &str,
        lhs: &CircuitWord,
        rhs: &CircuitWord,
    ) -> Result<SyllableRule, NormalizeError> {
        let (l, r) = (split_rule_side(lhs), split_rule_side(rhs));
        if l.1.len() != r.1.len() || l.1.is_empty() {
            return Err(NormalizeError::BadRule(id.to_string()));
        }
        Ok(SyllableRule {
            id: id.to_string(),
            lhs: l,
            rhs: r,
        })
    }

    pub fn reversed(&self) -> SyllableRule {
        SyllableRule {
            id: format!("{}⁻", self.id),
            lhs: self.rhs.clone(),
            rhs: self.lhs.clone(),
        }
    }

    fn apply_at(&self, alt: &Alternation, j: usize) -> Option<Alternation> {
        let (lpd, lx) = &self.lhs;
        let (rpd, rx) = &self.rhs;
        let t = lx.len();
        if j + t > alt.x.len() {
            return None;
        }
        if (0..t).any(|k| alt.x[j + k] != lx[k]) || (1..t).any(|k| alt.pd[j + k] != lpd[k]) {
            return None;
        }
        let mut out = alt.clone();
        out.pd[j] = alt.pd[j].mul(&lpd[0].inverse()).mul(&rpd[0]);
        out.x[j..j + t].clone_from_slice(rx);
        out.pd[j + 1..j + t].copy_from_slice(&rpd[1..t]);
        out.pd[j + t] = rpd[t].mul(&lpd[t].inverse()).mul(&alt.pd[j + t]);
        Some(out)
    }
}

/// The built-in syllable rules in listed order, each followed by its reverse.
pub fn syllable_rules() -> Vec<SyllableRule> {
    builtin_relations(RelationSet::Rewrite)
        .iter()
        .flat_map(|r| {
            let rule =
                SyllableRule::from_words(&r.family, &r.lhs, &r.rhs).expect("built-in rules split");
            let back = rule.reversed();
            [rule, back]
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizeConfig {
    pub pass_cap: usize,
    pub debug_verify: bool,
    pub use_rules: bool,
}

impl Default for NormalizeConfig {
    fn default() -> Self {
        NormalizeConfig {
            pass_cap: 200,
            debug_verify: cfg!(debug_assertions),
            use_rules: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NormalizeStats {
    pub input_len: usize,
    pub output_len: usize,
    pub k0_syllables: usize,
    pub cs_before: usize,
    pub cs_after: usize,
    pub passes: usize,
    pub merges: usize,
    pub rule_applications: Vec<String>,
    pub exhausted: bool,
}

fn measure(s: &SyllableWord) -> (usize, usize) {
    (s.e_count(), s.flatten().len())
}

/// The first rule application, leftmost position first and then in rule
/// order, whose renormalized result strictly lowers the measure.
fn improve(
    alt: &Alternation,
    current: &SyllableWord,
    rules: &[SyllableRule],
) -> Result<Option<(String, Alternation, SyllableWord)>, SubgroupError> {
    let here = measure(current);
    for j in 0..alt.x.len() {
        for rule in rules {
            if let Some(next) = rule.apply_at(alt, j) {
                let s = next.pass()?;
                if measure(&s) < here {
                    return Ok(Some((rule.id.clone(), next, s)));
                }
            }
        }
    }
    Ok(None)
}

/// Repeats the left-to-right pass, folding blocks separated by trivial
/// segments and applying the syllable rules whenever they strictly shrink
/// `(E-block count, flattened length)`, until nothing changes.
pub fn almost_normalize(
    word: &CircuitWord,
    config: &NormalizeConfig,
) -> Result<(SyllableWord, NormalizeStats), NormalizeError> {
    let mut stats = NormalizeStats {
        input_len: word.len(),
        cs_before: word.cs_count(),
        ..Default::default()
    };
    if word.is_empty() {
        return Ok((SyllableWord::default(), stats));
    }
    let target = config.debug_verify.then(|| word.eval());
    let check = |s: &SyllableWord, step: usize| match &target {
        Some(m) if s.eval() != *m => Err(NormalizeError::Unsound(step)),
        _ => Ok(()),
    };
    let rules = if config.use_rules {
        syllable_rules()
    } else {
        Vec::new()
    };
    let mut alt = Alternation::from_syllables(&alternation_decompose(word));
    let mut current = alt.pass()?;
    stats.passes = 1;
    check(&current, stats.passes)?;
    // the input's own segments first: rule pieces often occur there verbatim
    let mut raw = true;
    loop {
        if stats.passes >= config.pass_cap {
            stats.exhausted = true;
            break;
        }
        if !raw {
            alt = Alternation::from_syllables(&current);
            if alt.merge_trivial() {
                current = alt.pass()?;
                stats.passes += 1;
                stats.merges += 1;
                check(&current, stats.passes)?;
                continue;
            }
        }
        match improve(&alt, &current, &rules)? {
            Some((id, next, s)) => {
                if raw {
                    alt = next;
                }
                current = s;
                stats.passes += 1;
                stats.rule_applications.push(id);
                check(&current, stats.passes)?;
            }
            None if raw => raw = false,
            None => break,
        }
    }
    let flat = current.flatten();
    stats.output_len = flat.len();
    stats.cs_after = flat.cs_count();
    stats.k0_syllables = current.e_count();
    Ok((current, stats))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Equivalence {
    Equal,
    NotEqual(Witness),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivReport {
    pub verdict: Equivalence,
    /// Whether the two almost-normal forms coincide syllable for syllable.
    pub syntactic_match: bool,
}

/// Decides equality by exact evaluation and records whether the
/// almost-normal forms agree.
pub fn equiv_check(u: &CircuitWord, v: &CircuitWord) -> Result<EquivReport, NormalizeError> {
    let verdict = match Witness::between(&u.eval(), &v.eval()) {
        None => Equivalence::Equal,
        Some(w) => Equivalence::NotEqual(w),
    };
    let config = NormalizeConfig {
        debug_verify: false,
        ..Default::default()
    };
    let (a, _) = almost_normalize(u, &config)?;
    let (b, _) = almost_normalize(v, &config)?;
    Ok(EquivReport {
        verdict,
        syntactic_match: a == b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::w;
    use crate::ring::DyadicGaussian;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn shape(s: &SyllableWord) -> Vec<String> {
        s.syllables.iter().map(Syllable::to_string).collect()
    }

    #[test]
    fn decompose_examples() {
        assert_eq!(
            shape(&alternation_decompose(&w("S0 CS01 K0 X0"))),
            ["PD(S0 CS01)", "E(1,0,0,0)", "PD(X0)"]
        );
        assert_eq!(
            shape(&alternation_decompose(&w("K1"))),
            ["PD(SWAP01)", "E(1,0,0,0)", "PD(SWAP01)"]
        );
        assert!(alternation_decompose(&CircuitWord::empty())
            .syllables
            .is_empty());
        assert_eq!(
            shape(&alternation_decompose(&w("K0 K0"))),
            ["E(1,0,0,0)", "PD(ε)", "E(1,0,0,0)"]
        );
        let k2 = w("S1 K2 CK10");
        assert_eq!(alternation_decompose(&k2).eval(), k2.eval());
    }

    #[test]
    fn normalize_k1() {
        let (s, stats) = almost_normalize(&w("K1"), &NormalizeConfig::default()).unwrap();
        assert!(s.is_processed());
        assert_eq!(s.eval(), w("K1").eval());
        assert_eq!(stats.k0_syllables, 1);
        assert!(!stats.exhausted);
    }

    #[test]
    fn normalize_empty_and_monomial() {
        let (s, stats) =
            almost_normalize(&CircuitWord::empty(), &NormalizeConfig::default()).unwrap();
        assert!(s.syllables.is_empty());
        assert_eq!(stats.passes, 0);
        let (s, _) = almost_normalize(&w("S0 X1 CCZ"), &NormalizeConfig::default()).unwrap();
        assert_eq!(s.e_count(), 0);
        assert_eq!(s.eval(), w("S0 X1 CCZ").eval());
    }

    #[test]
    fn k0_power_collapses() {
        let (s, _) =
            almost_normalize(&w("K0 K0 K0 K0 K0 K0 K0 K0"), &NormalizeConfig::default()).unwrap();
        assert_eq!(s.e_count(), 0);
        assert_eq!(s.eval(), w("K0").pow(8).eval());
    }

    #[test]
    fn syllable_rules_split_and_hold() {
        let rules = syllable_rules();
        assert_eq!(rules.len(), 12);
        for r in &rules {
            let flat = |side: &(Vec<Monomial>, Vec<ExactMatrix>)| {
                let mut m = side.0[0].to_matrix();
                for (x, p) in side.1.iter().zip(&side.0[1..]) {
                    m = m.mul(x).mul(&p.to_matrix());
                }
                m
            };
            assert_eq!(flat(&r.lhs), flat(&r.rhs), "{}", r.id);
        }
    }

    #[test]
    fn c16_sides_agree() {
        let c16 = builtin_relations(RelationSet::Core)
            .into_iter()
            .find(|r| r.family == "C16")
            .unwrap();
        let report = equiv_check(&c16.lhs, &c16.rhs).unwrap();
        assert_eq!(report.verdict, Equivalence::Equal);
    }

    #[test]
    fn equiv_examples() {
        let r = equiv_check(&w("S0"), &w("S0 S0")).unwrap();
        let Equivalence::NotEqual(wit) = r.verdict else {
            panic!("S0 ≠ S0²")
        };
        assert_eq!((wit.row, wit.col), (4, 4));
        assert_eq!(
            (wit.lhs, wit.rhs),
            (DyadicGaussian::i(), DyadicGaussian::from_int(-1))
        );
        let u = w("K0 CS12 K1");
        let conj = w("i").concat(&u).concat(&w("i").invert());
        assert_eq!(equiv_check(&u, &conj).unwrap().verdict, Equivalence::Equal);
    }

    #[test]
    fn random_words_preserved() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let len = rand::Rng::gen_range(&mut rng, 0..=25);
            let word = CircuitWord::random_base(&mut rng, len);
            let (s, stats) = almost_normalize(&word, &NormalizeConfig::default()).unwrap();
            assert_eq!(s.eval(), word.eval());
            assert!(!stats.exhausted);
            if !word.is_empty() {
                assert!(s.is_processed());
            }
        }
    }
}
