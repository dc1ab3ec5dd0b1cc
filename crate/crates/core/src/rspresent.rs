//! Reidemeister–Schreier presentations of kernels of gradings `φ: M → Z_m`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::ExactMatrix;
use crate::relations::{level_relations, LevelGen, RelationError};

pub type Word = Vec<String>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RsError {
    #[error("symbol `{0}` is not a declared generator")]
    UnknownSymbol(String),
    #[error("no grading given for generator `{0}`")]
    MissingGrading(String),
    #[error("no inverse witness for generator `{0}`")]
    MissingWitness(String),
    #[error("inverse witness for `{0}` has the wrong grade")]
    BadWitness(String),
    #[error("representative {0} has the wrong grade, or r_0 is not empty")]
    BadRepresentative(usize),
    #[error("relation {0} relates words of different grade")]
    GradingMismatch(usize),
    #[error("enumeration exceeded the budget of {0}")]
    BudgetExceeded(usize),
    #[error("completion did not finish within {0} rules")]
    CompletionCap(usize),
    #[error("relations: {0}")]
    Relation(#[from] RelationError),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relations: Vec<(Word, Word)>,
}

impl Presentation {
    pub fn new(generators: Vec<String>, relations: Vec<(Word, Word)>) -> Result<Self, RsError> {
        let p = Presentation {
            generators,
            relations,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), RsError> {
        let known: HashSet<&String> = self.generators.iter().collect();
        for s in self.relations.iter().flat_map(|(l, r)| l.iter().chain(r)) {
            if !known.contains(s) {
                return Err(RsError::UnknownSymbol(s.clone()));
            }
        }
        Ok(())
    }
}

/// Splits on whitespace; `ε` and the empty string give the empty word.
pub fn word(text: &str) -> Word {
    text.split_whitespace()
        .filter(|t| *t != "ε")
        .map(str::to_string)
        .collect()
}

/// A grading onto `Z_m` together with coset representatives and inverses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetSystem {
    pub index: usize,
    pub grading: BTreeMap<String, usize>,
    pub representatives: Vec<Word>,
    pub inverse_witnesses: BTreeMap<String, Word>,
}

impl CosetSystem {
    pub fn grade(&self, w: &[String]) -> Result<usize, RsError> {
        w.iter().try_fold(0, |acc, s| {
            self.grading
                .get(s)
                .map(|g| (acc + g) % self.index)
                .ok_or_else(|| RsError::MissingGrading(s.clone()))
        })
    }

    pub fn validate(&self, p: &Presentation) -> Result<(), RsError> {
        for g in &p.generators {
            let phi = *self
                .grading
                .get(g)
                .ok_or_else(|| RsError::MissingGrading(g.clone()))?;
            let wit = self
                .inverse_witnesses
                .get(g)
                .ok_or_else(|| RsError::MissingWitness(g.clone()))?;
            if (phi + self.grade(wit)?) % self.index != 0 {
                return Err(RsError::BadWitness(g.clone()));
            }
        }
        if self.representatives.len() != self.index || !self.representatives[0].is_empty() {
            return Err(RsError::BadRepresentative(0));
        }
        for (j, r) in self.representatives.iter().enumerate() {
            if self.grade(r)? != j {
                return Err(RsError::BadRepresentative(j));
            }
        }
        Ok(())
    }

    /// Formal inverse: reversed, each symbol replaced by its witness.
    pub fn invert(&self, w: &[String]) -> Result<Word, RsError> {
        let mut out = Vec::new();
        for s in w.iter().rev() {
            out.extend(
                self.inverse_witnesses
                    .get(s)
                    .ok_or_else(|| RsError::MissingWitness(s.clone()))?
                    .iter()
                    .cloned(),
            );
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchreierGenerator {
    pub coset: usize,
    pub generator: String,
    pub symbol: String,
    /// `r_j · g · (r_{j+φ(g)})⁻¹` over the original alphabet.
    pub word: Word,
}

fn schreier_symbol(j: usize, g: &str) -> String {
    format!("s[{j},{g}]")
}

/// One Schreier generator per (coset, generator) pair.
pub fn schreier_generators(
    p: &Presentation,
    c: &CosetSystem,
) -> Result<Vec<SchreierGenerator>, RsError> {
    c.validate(p)?;
    let mut out = Vec::with_capacity(c.index * p.generators.len());
    for (j, r) in c.representatives.iter().enumerate() {
        for g in &p.generators {
            let target = (j + c.grading[g]) % c.index;
            let mut word = r.clone();
            word.push(g.clone());
            word.extend(c.invert(&c.representatives[target])?);
            out.push(SchreierGenerator {
                coset: j,
                generator: g.clone(),
                symbol: schreier_symbol(j, g),
                word,
            });
        }
    }
    Ok(out)
}

/// Rewrites a word read from coset `j` into Schreier symbols.
fn translate(c: &CosetSystem, mut j: usize, w: &[String]) -> Word {
    w.iter()
        .map(|g| {
            let s = schreier_symbol(j, g);
            j = (j + c.grading[g]) % c.index;
            s
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelPresentation {
    /// Every Schreier generator and every translated relation.
    pub raw: Presentation,
    /// `raw` with generators equal to ε removed and duplicates dropped.
    pub simplified: Presentation,
    pub schreier: Vec<SchreierGenerator>,
    pub eliminated: Vec<String>,
}

impl KernelPresentation {
    /// Expands Schreier symbols into words over the original alphabet.
    pub fn expand(&self, w: &[String]) -> Word {
        w.iter()
            .flat_map(|s| {
                self.schreier
                    .iter()
                    .find(|g| &g.symbol == s)
                    .map(|g| g.word.clone())
                    .unwrap_or_else(|| vec![s.clone()])
            })
            .collect()
    }
}

/// Translates every relation through every coset, adds `τ_0(r_j) = ε`, and
/// eliminates generators that a relation sets equal to ε.
pub fn rs_present(p: &Presentation, c: &CosetSystem) -> Result<KernelPresentation, RsError> {
    p.validate()?;
    let schreier = schreier_generators(p, c)?;
    let mut relations = Vec::new();
    for (n, (u, v)) in p.relations.iter().enumerate() {
        if c.grade(u)? != c.grade(v)? {
            return Err(RsError::GradingMismatch(n));
        }
        for j in 0..c.index {
            relations.push((translate(c, j, u), translate(c, j, v)));
        }
    }
    for r in &c.representatives[1..] {
        relations.push((translate(c, 0, r), Vec::new()));
    }
    let raw = Presentation {
        generators: schreier.iter().map(|g| g.symbol.clone()).collect(),
        relations,
    };
    let (simplified, eliminated) = eliminate_trivial(&raw);
    Ok(KernelPresentation {
        raw,
        simplified,
        schreier,
        eliminated,
    })
}

fn eliminate_trivial(p: &Presentation) -> (Presentation, Vec<String>) {
    let mut trivial: BTreeSet<String> = BTreeSet::new();
    let mut rels = p.relations.clone();
    loop {
        let found: Vec<String> = rels
            .iter()
            .filter_map(|(l, r)| match (l.as_slice(), r.as_slice()) {
                ([s], []) | ([], [s]) => Some(s.clone()),
                _ => None,
            })
            .filter(|s| !trivial.contains(s))
            .collect();
        if found.is_empty() {
            break;
        }
        trivial.extend(found);
        for (l, r) in rels.iter_mut() {
            l.retain(|s| !trivial.contains(s));
            r.retain(|s| !trivial.contains(s));
        }
    }
    let mut seen = HashSet::new();
    let relations = rels
        .into_iter()
        .filter(|(l, r)| l != r)
        .map(|(l, r)| {
            if shortlex(&l, &r) == Ordering::Less {
                (r, l)
            } else {
                (l, r)
            }
        })
        .filter(|rel| seen.insert(rel.clone()))
        .collect();
    let generators = p
        .generators
        .iter()
        .filter(|g| !trivial.contains(*g))
        .cloned()
        .collect();
    (
        Presentation {
            generators,
            relations,
        },
        trivial.into_iter().collect(),
    )
}

fn shortlex<T: Ord>(a: &[T], b: &[T]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Irreducible words of a shortlex-complete rewriting system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonoidTable {
    pub elements: Vec<Word>,
    pub rules: Vec<(Word, Word)>,
}

impl MonoidTable {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

pub const COMPLETION_RULE_CAP: usize = 2000;

struct Completion {
    rules: Vec<(Vec<usize>, Vec<usize>)>,
}

impl Completion {
    fn reduce(&self, w: &[usize]) -> Vec<usize> {
        let mut w = w.to_vec();
        'outer: loop {
            for (l, r) in &self.rules {
                if let Some(pos) = w.windows(l.len()).position(|win| win == l.as_slice()) {
                    w.splice(pos..pos + l.len(), r.iter().copied());
                    continue 'outer;
                }
            }
            return w;
        }
    }

    fn critical_pairs(&self, a: usize, b: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
        let (l1, r1) = &self.rules[a];
        let (l2, r2) = &self.rules[b];
        let mut out = Vec::new();
        // suffix of l1 overlaps prefix of l2
        for k in 1..l1.len().min(l2.len()) {
            if l1[l1.len() - k..] == l2[..k] {
                let mut x = r1.clone();
                x.extend_from_slice(&l2[k..]);
                let mut y = l1[..l1.len() - k].to_vec();
                y.extend_from_slice(r2);
                out.push((x, y));
            }
        }
        // l2 inside l1
        if a != b && l2.len() <= l1.len() {
            for pos in 0..=l1.len() - l2.len() {
                if l1[pos..pos + l2.len()] == l2[..] {
                    let mut y = l1[..pos].to_vec();
                    y.extend_from_slice(r2);
                    y.extend_from_slice(&l1[pos + l2.len()..]);
                    out.push((r1.clone(), y));
                }
            }
        }
        out
    }

    fn complete(pairs: Vec<(Vec<usize>, Vec<usize>)>, cap: usize) -> Result<Completion, RsError> {
        let mut c = Completion { rules: Vec::new() };
        let mut pending: VecDeque<_> = pairs.into();
        while let Some((u, v)) = pending.pop_front() {
            let (u, v) = (c.reduce(&u), c.reduce(&v));
            if u == v {
                continue;
            }
            let rule = if shortlex(&u, &v) == Ordering::Greater {
                (u, v)
            } else {
                (v, u)
            };
            c.rules.push(rule);
            if c.rules.len() > cap {
                return Err(RsError::CompletionCap(cap));
            }
            let n = c.rules.len() - 1;
            for k in 0..=n {
                pending.extend(c.critical_pairs(n, k));
                if k != n {
                    pending.extend(c.critical_pairs(k, n));
                }
            }
        }
        Ok(c)
    }
}

/// Completes the relations to a shortlex rewriting system and lists the
/// irreducible words, which are the monoid's elements.
pub fn brute_force_monoid(p: &Presentation, budget: usize) -> Result<MonoidTable, RsError> {
    p.validate()?;
    let idx: BTreeMap<&String, usize> = p
        .generators
        .iter()
        .enumerate()
        .map(|(n, g)| (g, n))
        .collect();
    let enc = |w: &Word| w.iter().map(|s| idx[s]).collect::<Vec<usize>>();
    let dec = |w: &[usize]| w.iter().map(|&n| p.generators[n].clone()).collect::<Word>();
    let c = Completion::complete(
        p.relations.iter().map(|(l, r)| (enc(l), enc(r))).collect(),
        COMPLETION_RULE_CAP,
    )?;
    let mut elements = vec![Vec::<usize>::new()];
    let mut frontier = 0;
    while frontier < elements.len() {
        let base = elements[frontier].clone();
        frontier += 1;
        for g in 0..p.generators.len() {
            let mut next = base.clone();
            next.push(g);
            if c.reduce(&next) == next {
                if elements.len() >= budget {
                    return Err(RsError::BudgetExceeded(budget));
                }
                elements.push(next);
            }
        }
    }
    Ok(MonoidTable {
        elements: elements.iter().map(|w| dec(w)).collect(),
        rules: c.rules.iter().map(|(l, r)| (dec(l), dec(r))).collect(),
    })
}

/// Evaluates a word of level-generator names as an `n × n` matrix.
pub fn evaluate_level_word(w: &[String], n: usize) -> Result<ExactMatrix, RsError> {
    let mut m = ExactMatrix::identity(n);
    for s in w {
        let g: LevelGen = s.parse().map_err(|_| RsError::UnknownSymbol(s.clone()))?;
        m = m.mul(&g.matrix(n));
    }
    Ok(m)
}

/// The level-generator presentation of `U_n(Z[1/2,i])` and its
/// determinant-parity grading: `i_[j]` and `K_[j,k]` have odd grade,
/// `X_[j,k]` even. `r_1 = i_[0]`.
pub fn level_presentation(n: usize) -> Result<(Presentation, CosetSystem), RsError> {
    let gens = LevelGen::all(n);
    let names: Vec<String> = gens.iter().map(LevelGen::to_string).collect();
    let relations = level_relations(n)?
        .into_iter()
        .map(|r| {
            let f = |t: &[LevelGen]| t.iter().map(LevelGen::to_string).collect::<Word>();
            (f(&r.lhs.tokens), f(&r.rhs.tokens))
        })
        .collect();
    let mut grading = BTreeMap::new();
    let mut inverse_witnesses = BTreeMap::new();
    for (g, name) in gens.iter().zip(&names) {
        let (grade, power) = match g {
            LevelGen::I(_) => (1, 3),
            LevelGen::X(..) => (0, 1),
            LevelGen::K(..) => (1, 7),
        };
        grading.insert(name.clone(), grade);
        inverse_witnesses.insert(name.clone(), vec![name.clone(); power]);
    }
    let cosets = CosetSystem {
        index: 2,
        grading,
        representatives: vec![Vec::new(), vec![LevelGen::I(0).to_string()]],
        inverse_witnesses,
    };
    Ok((Presentation::new(names, relations)?, cosets))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelKernelReport {
    pub n: usize,
    pub schreier_generators: usize,
    pub raw_relations: usize,
    pub sampled: usize,
    pub sampled_failures: Vec<usize>,
    pub kernel_generators_ok: bool,
    pub witnesses_ok: bool,
}

/// Runs the determinant-parity presentation and checks `samples` raw
/// relations, drawn uniformly without replacement, in the matrix model.
pub fn level_kernel<R: Rng + ?Sized>(
    n: usize,
    samples: usize,
    rng: &mut R,
) -> Result<LevelKernelReport, RsError> {
    let (p, c) = level_presentation(n)?;
    let id = ExactMatrix::identity(n);
    let mut witnesses_ok = true;
    for g in &p.generators {
        let mut w = vec![g.clone()];
        w.extend(c.inverse_witnesses[g].iter().cloned());
        witnesses_ok &= evaluate_level_word(&w, n)? == id;
    }
    let k = rs_present(&p, &c)?;
    let mut kernel_generators_ok = true;
    for s in &k.schreier {
        let det = evaluate_level_word(&s.word, n)?.det();
        kernel_generators_ok &= det.is_one() || (-det).is_one();
    }
    let total = k.raw.relations.len();
    let chosen = sample(rng, total, samples.min(total)).into_vec();
    let sampled_failures = chosen
        .iter()
        .filter(|&&t| {
            let (l, r) = &k.raw.relations[t];
            let lhs = evaluate_level_word(&k.expand(l), n);
            let rhs = evaluate_level_word(&k.expand(r), n);
            !matches!((lhs, rhs), (Ok(a), Ok(b)) if a == b)
        })
        .copied()
        .collect();
    Ok(LevelKernelReport {
        n,
        schreier_generators: k.schreier.len(),
        raw_relations: total,
        sampled: chosen.len(),
        sampled_failures,
        kernel_generators_ok,
        witnesses_ok,
    })
}

/// `⟨a | a⁴ = ε⟩` graded by `a ↦ 1 mod 2`.
pub fn z4_toy() -> (Presentation, CosetSystem) {
    let p = Presentation {
        generators: vec!["a".into()],
        relations: vec![(word("a a a a"), Vec::new())],
    };
    let c = CosetSystem {
        index: 2,
        grading: BTreeMap::from([("a".into(), 1)]),
        representatives: vec![Vec::new(), word("a")],
        inverse_witnesses: BTreeMap::from([("a".into(), word("a a a"))]),
    };
    (p, c)
}

/// `⟨a, b | a² = ε, b² = ε⟩` graded by length parity.
pub fn dihedral_toy() -> (Presentation, CosetSystem) {
    let p = Presentation {
        generators: vec!["a".into(), "b".into()],
        relations: vec![(word("a a"), Vec::new()), (word("b b"), Vec::new())],
    };
    let c = CosetSystem {
        index: 2,
        grading: BTreeMap::from([("a".into(), 1), ("b".into(), 1)]),
        representatives: vec![Vec::new(), word("a")],
        inverse_witnesses: BTreeMap::from([("a".into(), word("a")), ("b".into(), word("b"))]),
    };
    (p, c)
}

/// Input for `rs run`: a presentation plus its coset system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RsInput {
    #[serde(flatten)]
    pub presentation: Presentation,
    pub cosets: CosetSystem,
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn z4_schreier_generators() {
        let (p, c) = z4_toy();
        let s = schreier_generators(&p, &c).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].word, word("a a a a"));
        assert_eq!(s[1].word, word("a a"));
    }

    #[test]
    fn z4_kernel_matches_oracle() {
        let (p, c) = z4_toy();
        let k = rs_present(&p, &c).unwrap();
        assert_eq!(k.simplified.generators, ["s[1,a]"]);
        assert_eq!(
            k.simplified.relations,
            [(word("s[1,a] s[1,a]"), Vec::new())]
        );
        // even powers of a generator of Z4
        let oracle: BTreeSet<u32> = (0..4u32).map(|e| (2 * e) % 4).collect();
        assert_eq!(
            brute_force_monoid(&k.simplified, 100).unwrap().order(),
            oracle.len()
        );
    }

    #[test]
    fn identity_coset_generator_is_itself() {
        let (p, c) = dihedral_toy();
        let mut c = c;
        c.grading.insert("b".into(), 0);
        c.inverse_witnesses.insert("b".into(), word("b"));
        let s = schreier_generators(&p, &c).unwrap();
        let s0b = s
            .iter()
            .find(|g| g.coset == 0 && g.generator == "b")
            .unwrap();
        assert_eq!(s0b.word, word("b"));
    }

    #[test]
    fn dihedral_kernel() {
        let (p, c) = dihedral_toy();
        let k = rs_present(&p, &c).unwrap();
        assert_eq!(k.simplified.generators, ["s[0,b]", "s[1,b]"]);
        let find = |sym: &str| {
            k.schreier
                .iter()
                .find(|g| g.symbol == sym)
                .unwrap()
                .word
                .clone()
        };
        assert_eq!(find("s[0,b]"), word("b a"));
        assert_eq!(find("s[1,b]"), word("a b"));
        assert!(k
            .simplified
            .relations
            .contains(&(word("s[1,b] s[0,b]"), Vec::new())));
        // soundness up to free reduction of a² and b²
        let reduce = |mut w: Word| {
            while let Some(pos) = w.windows(2).position(|x| x[0] == x[1]) {
                w.drain(pos..pos + 2);
            }
            w
        };
        for (l, r) in &k.raw.relations {
            assert_eq!(reduce(k.expand(l)), reduce(k.expand(r)));
        }
    }

    #[test]
    fn brute_force_examples() {
        let (p, _) = z4_toy();
        assert_eq!(brute_force_monoid(&p, 100).unwrap().order(), 4);
        let free = Presentation::new(vec!["a".into()], Vec::new()).unwrap();
        assert_eq!(
            brute_force_monoid(&free, 10),
            Err(RsError::BudgetExceeded(10))
        );
        let s3 = Presentation::new(
            vec!["a".into(), "b".into()],
            vec![
                (word("a a"), Vec::new()),
                (word("b b"), Vec::new()),
                (word("a b a"), word("b a b")),
            ],
        )
        .unwrap();
        assert_eq!(brute_force_monoid(&s3, 100).unwrap().order(), 6);
    }

    #[test]
    fn validation_errors() {
        let (p, mut c) = z4_toy();
        c.inverse_witnesses.insert("a".into(), word("a a"));
        assert_eq!(
            schreier_generators(&p, &c),
            Err(RsError::BadWitness("a".into()))
        );
        assert!(Presentation::new(vec!["a".into()], vec![(word("b"), Vec::new())]).is_err());
        let (p, mut c) = z4_toy();
        c.inverse_witnesses.clear();
        assert_eq!(
            schreier_generators(&p, &c),
            Err(RsError::MissingWitness("a".into()))
        );
    }

    #[test]
    fn small_level_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = level_kernel(3, 50, &mut rng).unwrap();
        assert_eq!(r.schreier_generators, 2 * LevelGen::all(3).len());
        assert!(r.sampled_failures.is_empty() && r.kernel_generators_ok && r.witnesses_ok);
    }

    #[test]
    fn rs_input_json_shape() {
        let (p, c) = z4_toy();
        let input = RsInput {
            presentation: p,
            cosets: c,
        };
        let text = serde_json::to_string(&input).unwrap();
        assert!(text
            .starts_with("{\"generators\":[\"a\"],\"relations\":[[[\"a\",\"a\",\"a\",\"a\"],[]]]"));
        assert_eq!(serde_json::from_str::<RsInput>(&text).unwrap(), input);
    }
}
