//! Concrete relation instances and their exact verification.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{w, CircuitWord, Gate, BASE_GATES};
use crate::linalg::{level_matrix, ExactMatrix, LevelKind};
use crate::ring::DyadicGaussian;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RelationError {
    #[error("unknown relation set `{0}`")]
    UnknownSet(String),
    #[error("level-matrix relations need 2 <= n <= 16, got {0}")]
    BadDimension(usize),
    #[error("bad level generator `{0}`")]
    BadLevelGen(String),
}

/// Anything that evaluates to an exact matrix.
pub trait WordModel: Clone + Send + Sync {
    fn evaluate(&self) -> ExactMatrix;
    fn render(&self) -> String;
}

impl WordModel for CircuitWord {
    fn evaluate(&self) -> ExactMatrix {
        self.eval()
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

/// A one- or two-level generator of `U_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LevelGen {
    I(usize),
    X(usize, usize),
    K(usize, usize),
}

impl LevelGen {
    pub fn matrix(self, n: usize) -> ExactMatrix {
        let m = match self {
            LevelGen::I(j) => level_matrix(LevelKind::I, j, None, n),
            LevelGen::X(j, k) => level_matrix(LevelKind::X, j, Some(k), n),
            LevelGen::K(j, k) => level_matrix(LevelKind::K, j, Some(k), n),
        };
        m.expect("level generator indices are validated at construction")
    }

    /// All `n + 2·C(n,2)` generators: `i_[j]`, then `X_[j,k]`, then `K_[j,k]`.
    pub fn all(n: usize) -> Vec<LevelGen> {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|j| (j + 1..n).map(move |k| (j, k)))
            .collect();
        (0..n)
            .map(LevelGen::I)
            .chain(pairs.iter().map(|&(j, k)| LevelGen::X(j, k)))
            .chain(pairs.iter().map(|&(j, k)| LevelGen::K(j, k)))
            .collect()
    }
}

impl fmt::Display for LevelGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelGen::I(j) => write!(f, "i[{j}]"),
            LevelGen::X(j, k) => write!(f, "X[{j},{k}]"),
            LevelGen::K(j, k) => write!(f, "K[{j},{k}]"),
        }
    }
}

impl FromStr for LevelGen {
    type Err = RelationError;

    fn from_str(s: &str) -> Result<Self, RelationError> {
        let bad = || RelationError::BadLevelGen(s.to_string());
        let (head, rest) = s.split_once('[').ok_or_else(bad)?;
        let inner = rest.strip_suffix(']').ok_or_else(bad)?;
        let idx: Vec<usize> = inner
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        match (head, idx.as_slice()) {
            ("i", [j]) => Ok(LevelGen::I(*j)),
            ("X", [j, k]) if j < k => Ok(LevelGen::X(*j, *k)),
            ("K", [j, k]) if j < k => Ok(LevelGen::K(*j, *k)),
            _ => Err(bad()),
        }
    }
}

/// A word of level generators in a fixed dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelWord {
    pub n: usize,
    pub tokens: Vec<LevelGen>,
}

impl WordModel for LevelWord {
    fn evaluate(&self) -> ExactMatrix {
        self.tokens
            .iter()
            .fold(ExactMatrix::identity(self.n), |acc, g| {
                acc.mul(&g.matrix(self.n))
            })
    }

    fn render(&self) -> String {
        if self.tokens.is_empty() {
            return "ε".into();
        }
        self.tokens
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// `lhs = rhs`, tagged with its family and index assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation<W> {
    pub lhs: W,
    pub rhs: W,
    pub family: String,
    pub instance: String,
}

impl<W> Relation<W> {
    pub fn new(lhs: W, rhs: W, family: impl Into<String>, instance: impl Into<String>) -> Self {
        Relation {
            lhs,
            rhs,
            family: family.into(),
            instance: instance.into(),
        }
    }
}

impl<W: WordModel> fmt::Display for Relation<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}]: {} = {}",
            self.family,
            self.instance,
            self.lhs.render(),
            self.rhs.render()
        )
    }
}

/// First entry at which two matrices differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub row: usize,
    pub col: usize,
    pub lhs: DyadicGaussian,
    pub rhs: DyadicGaussian,
}

impl Witness {
    pub fn between(a: &ExactMatrix, b: &ExactMatrix) -> Option<Witness> {
        a.first_difference(b).map(|(row, col)| Witness {
            row,
            col,
            lhs: a.get(row, col).clone(),
            rhs: b.get(row, col).clone(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

pub fn verify_relation<W: WordModel>(r: &Relation<W>) -> Verdict {
    let witness = Witness::between(&r.lhs.evaluate(), &r.rhs.evaluate());
    Verdict {
        holds: witness.is_none(),
        witness,
    }
}

/// Verifies every relation in parallel, preserving order.
pub fn verify_all<W: WordModel>(rs: &[Relation<W>]) -> Vec<Verdict> {
    rs.par_iter().map(verify_relation).collect()
}

/// Maps qubit `q` to `2 - q` throughout; `None` if a token has no mirror.
pub fn qubit_reversal(r: &Relation<CircuitWord>) -> Option<Relation<CircuitWord>> {
    let family = match r.family.strip_prefix("UPSIDE-") {
        Some(orig) => orig.to_string(),
        None => format!("UPSIDE-{}", r.family),
    };
    Some(Relation {
        lhs: r.lhs.reversed_qubits()?,
        rhs: r.rhs.reversed_qubits()?,
        family,
        instance: r.instance.clone(),
    })
}

/// Inverts both sides; the result holds whenever `r` does.
pub fn inverted(r: &Relation<CircuitWord>) -> Relation<CircuitWord> {
    Relation {
        lhs: r.lhs.invert(),
        rhs: r.rhs.invert(),
        family: format!("INV-{}", r.family),
        instance: r.instance.clone(),
    }
}

/// Named collections of built-in circuit relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelationSet {
    /// Families (a)–(d) of the 3-qubit presentation: 30 instances.
    Core,
    /// Commutation of `i` and of disjoint-support base generators.
    Monoidal,
    /// Commutation over base generators plus `X` and `CX` tokens.
    MonoidalExt,
    /// `Core` followed by `Monoidal`.
    Presentation,
    Definitions,
    Intro,
    Rewrite,
    UpsideDown,
    Amalgam,
    Worked,
}

impl RelationSet {
    pub const ALL: [RelationSet; 10] = [
        RelationSet::Core,
        RelationSet::Monoidal,
        RelationSet::MonoidalExt,
        RelationSet::Presentation,
        RelationSet::Definitions,
        RelationSet::Intro,
        RelationSet::Rewrite,
        RelationSet::UpsideDown,
        RelationSet::Amalgam,
        RelationSet::Worked,
    ];

    pub fn id(self) -> &'static str {
        match self {
            RelationSet::Core => "c17",
            RelationSet::Monoidal => "monoidal",
            RelationSet::MonoidalExt => "monoidal-ext",
            RelationSet::Presentation => "fig2",
            RelationSet::Definitions => "defs",
            RelationSet::Intro => "intro",
            RelationSet::Rewrite => "fig4",
            RelationSet::UpsideDown => "updown",
            RelationSet::Amalgam => "amalgam",
            RelationSet::Worked => "worked",
        }
    }
}

impl FromStr for RelationSet {
    type Err = RelationError;

    fn from_str(s: &str) -> Result<Self, RelationError> {
        RelationSet::ALL
            .into_iter()
            .find(|set| set.id() == s)
            .ok_or_else(|| RelationError::UnknownSet(s.to_string()))
    }
}

pub fn builtin_relations(which: RelationSet) -> Vec<Relation<CircuitWord>> {
    match which {
        RelationSet::Core => core_relations(),
        RelationSet::Monoidal => monoidal_relations(&BASE_GATES, "MONOIDAL"),
        RelationSet::MonoidalExt => monoidal_ext_relations(),
        RelationSet::Presentation => {
            let mut out = core_relations();
            out.extend(monoidal_relations(&BASE_GATES, "MONOIDAL"));
            out
        }
        RelationSet::Definitions => definition_relations(),
        RelationSet::Intro => intro_relations(),
        RelationSet::Rewrite => rewrite_rules(),
        RelationSet::UpsideDown => builtin_relations(RelationSet::Presentation)
            .iter()
            .map(|r| qubit_reversal(r).expect("presentation tokens all have mirrors"))
            .collect(),
        RelationSet::Amalgam => amalgam_relations(),
        RelationSet::Worked => vec![Relation::new(
            w("X1 K0 CS01 K0 CCZ"),
            w("K0 CS01 CS01 CS01 S0 K0 CCZ CS02 CS02 X1"),
            "WORKED",
            "",
        )],
    }
}

/// Looks a set up by its textual id.
pub fn builtin_relation_set(id: &str) -> Result<Vec<Relation<CircuitWord>>, RelationError> {
    Ok(builtin_relations(id.parse()?))
}

fn rel(lhs: &str, rhs: &str, family: &str, instance: String) -> Relation<CircuitWord> {
    Relation::new(w(lhs), w(rhs), family, instance)
}

fn core_relations() -> Vec<Relation<CircuitWord>> {
    let mut out = vec![rel("i i i i", "", "C1", String::new())];
    for q in 0..3 {
        let inst = format!("q={q}");
        let (k, s) = (format!("K{q}"), format!("S{q}"));
        out.push(rel(&format!("{k} {k}"), "i i i", "C2", inst.clone()));
        out.push(rel(&format!("{s} {s} {s} {s}"), "", "C3", inst.clone()));
        out.push(rel(
            &format!("{s} {k} {s} {k} {s} {k}"),
            "i i i",
            "C4",
            inst,
        ));
    }
    for (a, b) in [(0, 1), (1, 2)] {
        let inst = format!("a={a},b={b}");
        let cs = format!("CS{a}{b}");
        let sub = |t: &str| {
            t.replace("CS", &cs)
                .replace("Sa", &format!("S{a}"))
                .replace("Sb", &format!("S{b}"))
                .replace("Ka", &format!("K{a}"))
                .replace("Kb", &format!("K{b}"))
                .replace("Xa", &format!("X{a}"))
                .replace("Xb", &format!("X{b}"))
        };
        let table = [
            ("C5", "CS CS CS CS", ""),
            ("C6", "Sa CS", "CS Sa"),
            ("C7", "Sb CS", "CS Sb"),
            ("C8", "Xa CS", "CS CS CS Xa Sb"),
            ("C9", "Xb CS", "CS CS CS Xb Sa"),
            ("C10", "Sa Ka CS Ka CS", "CS Ka CS Ka Sa"),
            ("C11", "Sb Kb CS Kb CS", "CS Kb CS Kb Sb"),
        ];
        for (fam, l, r) in table {
            out.push(rel(&sub(l), &sub(r), fam, inst.clone()));
        }
    }
    let three = [
        ("C12", "CS12 CS01", "CS01 CS12"),
        (
            "C13",
            "CX10 CX01 CS12 CX01 CX10",
            "CX12 CX21 CS01 CX21 CX12",
        ),
        (
            "C14",
            "CS12 CX01 CS12 CS12 CS12 CX01",
            "CS01 CX21 CS01 CS01 CS01 CX21",
        ),
        (
            "C15",
            "CX10 CX01 CS12 CS12 CX01 CX10",
            "CX01 CS12 CS12 CX01 CS12 CS12",
        ),
        (
            "C16",
            "CS12 K1 CS12 K1 CS01 K1 CS01",
            "CS01 K1 CS01 K1 CS12 K1 CS12",
        ),
        (
            "C17",
            "CS12 K1 CS12 CS12 CS12 K1 CS01 K1 CS12",
            "CS01 K1 CS01 CS01 CS01 K1 CS12 K1 CS01",
        ),
    ];
    out.extend(
        three
            .into_iter()
            .map(|(fam, l, r)| rel(l, r, fam, String::new())),
    );
    out
}

fn disjoint(g: Gate, h: Gate) -> bool {
    g.support() & h.support() == 0
}

/// `i·g = g·i` for every other token, then `g·h = h·g` for each unordered
/// pair of non-scalar tokens with disjoint supports.
fn monoidal_relations(alphabet: &[Gate], family: &str) -> Vec<Relation<CircuitWord>> {
    let mut out = Vec::new();
    let tokens: Vec<Gate> = alphabet
        .iter()
        .copied()
        .filter(|&g| g != Gate::Omega)
        .collect();
    for &g in &tokens {
        out.push(Relation::new(
            CircuitWord::new(vec![Gate::Omega, g]),
            CircuitWord::new(vec![g, Gate::Omega]),
            family,
            format!("i,{g}"),
        ));
    }
    for (n, &g) in tokens.iter().enumerate() {
        for &h in &tokens[n + 1..] {
            if disjoint(g, h) {
                out.push(Relation::new(
                    CircuitWord::new(vec![g, h]),
                    CircuitWord::new(vec![h, g]),
                    family,
                    format!("{g},{h}"),
                ));
            }
        }
    }
    out
}

/// The extended commutations not already present among base generators.
fn monoidal_ext_relations() -> Vec<Relation<CircuitWord>> {
    let mut alphabet = BASE_GATES.to_vec();
    alphabet.extend(w("X0 X1 X2 CX01 CX10 CX12 CX21").iter().copied());
    monoidal_relations(&alphabet, "MONOIDAL-EXT")
        .into_iter()
        .filter(|r| !(r.lhs.iter().all(|g| g.is_base())))
        .collect()
}

fn definition_relations() -> Vec<Relation<CircuitWord>> {
    Gate::all()
        .into_iter()
        .filter_map(|g| {
            g.definition().map(|body| {
                Relation::new(
                    CircuitWord::new(vec![g]),
                    CircuitWord::new(body),
                    format!("DEF-{g}"),
                    "",
                )
            })
        })
        .collect()
}

/// `CS†·K·CS·K·CS = S†·K·CS·K·S` on the pair (0, 1), with the K gates on
/// either qubit of the pair.
fn intro_relations() -> Vec<Relation<CircuitWord>> {
    (0..2)
        .map(|a| {
            rel(
                &format!("CSdg01 K{a} CS01 K{a} CS01"),
                &format!("Sdg{a} K{a} CS01 K{a} S{a}"),
                "INTRO",
                format!("a={a}"),
            )
        })
        .collect()
}

fn rewrite_rules() -> Vec<Relation<CircuitWord>> {
    [
        ("r1", "SWAP01 K0 SWAP01 K0", "K0 SWAP01 K0 SWAP01"),
        ("r2", "CCX2 K0 CK10", "K0 CK10 CCX2"),
        ("r3", "CCX2 CK20 CCK0", "CK20 CCK0 CCX2 CZ01"),
        ("r4", "CCX1 CK10 CCK0", "CK10 CCK0 CCX1 CZ02"),
        ("r5", "CCX2 CX02 CK10", "CK10 CCX2 CX02"),
        ("r6", "K0 CCX2 K0 CCX2", "CCX2 K0 CCX2 K0 CX12"),
    ]
    .into_iter()
    .map(|(id, l, r)| rel(l, r, &format!("FIG4-{id}"), String::new()))
    .collect()
}

/// The derivation of the K1 alternation relation from the three finite
/// subgroups, step by step, together with the facts each step uses.
pub fn amalgam_steps() -> Vec<CircuitWord> {
    [
        "CS12 K1 CS12 K1 CS01 K1 CS01",
        "CS12 SWAP01 K0 SWAP01 CS12 SWAP01 K0 SWAP01 CS01 SWAP01 K0 SWAP01 CS01",
        "SWAP01 CS02 K0 CS02 K0 CS01 K0 CS01 SWAP01",
        "SWAP01 CS01 K0 CS01 K0 CS02 K0 CS02 SWAP01",
        "CS01 SWAP01 K0 SWAP01 CS01 SWAP01 K0 SWAP01 CS12 SWAP01 K0 SWAP01 CS12",
        "CS01 K1 CS01 K1 CS12 K1 CS12",
    ]
    .into_iter()
    .map(w)
    .collect()
}

fn amalgam_relations() -> Vec<Relation<CircuitWord>> {
    let steps = amalgam_steps();
    let mut out: Vec<_> = steps
        .windows(2)
        .enumerate()
        .map(|(n, pair)| {
            Relation::new(
                pair[0].clone(),
                pair[1].clone(),
                "AMALGAM-STEP",
                format!("{}", n + 1),
            )
        })
        .collect();
    let facts = [
        ("SWAP01 SWAP01", ""),
        ("SWAP01 CS12 SWAP01", "CS02"),
        ("SWAP01 CS01 SWAP01", "CS01"),
        (
            "CS02 K0 CS02 K0 CS01 K0 CS01",
            "CS01 K0 CS01 K0 CS02 K0 CS02",
        ),
        ("K1", "SWAP01 K0 SWAP01"),
        ("K2", "SWAP12 SWAP01 K0 SWAP01 SWAP12"),
    ];
    out.extend(
        facts
            .into_iter()
            .enumerate()
            .map(|(n, (l, r))| rel(l, r, "AMALGAM-FACT", format!("{}", n + 1))),
    );
    out
}

/// Generator sets X, Y, Z whose pairwise unions generate the three finite
/// subgroups.
pub fn amalgam_generators() -> (Vec<Gate>, Vec<Gate>, Vec<Gate>) {
    let x = w("K0 i").into_tokens();
    let y = w("X0 X1 X2 CX12 CX21 CX10 CX20 CCX0 S0 S1 S2 CS01 CS12 CS02 CCZ i").into_tokens();
    let z = w("SWAP01 SWAP12").into_tokens();
    (x, y, z)
}

/// Every instance of the level-matrix relations for dimension `n`.
/// Indices within an instance are distinct, and each two-level generator
/// `X_[a,b]`, `K_[a,b]` has `a < b`.
pub fn level_relations(n: usize) -> Result<Vec<Relation<LevelWord>>, RelationError> {
    use LevelGen::{I, K, X};
    if !(2..=16).contains(&n) {
        return Err(RelationError::BadDimension(n));
    }
    let mut out = Vec::new();
    let mut push = |fam: &str, inst: String, l: Vec<LevelGen>, r: Vec<LevelGen>| {
        out.push(Relation::new(
            LevelWord { n, tokens: l },
            LevelWord { n, tokens: r },
            format!("FIG1-{fam}"),
            inst,
        ))
    };
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|j| (j + 1..n).map(move |k| (j, k)))
        .collect();
    for j in 0..n {
        push("eq1", format!("j={j}"), vec![I(j); 4], vec![]);
    }
    for &(j, k) in &pairs {
        let inst = format!("j={j},k={k}");
        push("eq2", inst.clone(), vec![X(j, k); 2], vec![]);
        push("eq3", inst.clone(), vec![K(j, k); 8], vec![]);
        push(
            "eq10",
            inst.clone(),
            vec![I(k), X(j, k)],
            vec![X(j, k), I(j)],
        );
        push(
            "eq13",
            inst.clone(),
            vec![K(j, k), I(k), I(k)],
            vec![X(j, k), K(j, k)],
        );
        push(
            "eq14",
            inst.clone(),
            vec![K(j, k), I(k), I(k), I(k)],
            vec![I(k), K(j, k), I(k), K(j, k)],
        );
        push(
            "eq15",
            inst.clone(),
            vec![K(j, k), I(j), I(k)],
            vec![I(j), I(k), K(j, k)],
        );
        push("eq16", inst, vec![K(j, k), K(j, k), I(j), I(k)], vec![]);
    }
    for j in 0..n {
        for k in 0..n {
            if j != k {
                push(
                    "eq4",
                    format!("j={j},k={k}"),
                    vec![I(j), I(k)],
                    vec![I(k), I(j)],
                );
            }
        }
    }
    for j in 0..n {
        for &(k, l) in &pairs {
            if j != k && j != l {
                let inst = format!("j={j},k={k},l={l}");
                push(
                    "eq5",
                    inst.clone(),
                    vec![I(j), X(k, l)],
                    vec![X(k, l), I(j)],
                );
                push("eq6", inst, vec![I(j), K(k, l)], vec![K(k, l), I(j)]);
            }
        }
    }
    for &(j, k) in &pairs {
        for &(l, m) in &pairs {
            if [l, m].iter().any(|x| *x == j || *x == k) {
                continue;
            }
            let inst = format!("j={j},k={k},l={l},m={m}");
            push(
                "eq7",
                inst.clone(),
                vec![X(j, k), X(l, m)],
                vec![X(l, m), X(j, k)],
            );
            push(
                "eq8",
                inst.clone(),
                vec![X(j, k), K(l, m)],
                vec![K(l, m), X(j, k)],
            );
            push(
                "eq9",
                inst.clone(),
                vec![K(j, k), K(l, m)],
                vec![K(l, m), K(j, k)],
            );
            if j < l && k < m {
                push(
                    "eq17",
                    inst,
                    vec![K(j, k), K(l, m), K(j, l), K(k, m)],
                    vec![K(j, l), K(k, m), K(j, k), K(l, m)],
                );
            }
        }
    }
    for j in 0..n {
        for k in j + 1..n {
            for l in k + 1..n {
                let inst = format!("j={j},k={k},l={l}");
                push(
                    "eq11",
                    inst.clone(),
                    vec![X(k, l), X(j, k)],
                    vec![X(j, k), X(j, l)],
                );
                push(
                    "eq11'",
                    inst.clone(),
                    vec![X(j, l), X(k, l)],
                    vec![X(k, l), X(j, k)],
                );
                push(
                    "eq12",
                    inst.clone(),
                    vec![K(k, l), X(j, k)],
                    vec![X(j, k), K(j, l)],
                );
                push(
                    "eq12'",
                    inst,
                    vec![K(j, l), X(k, l)],
                    vec![X(k, l), K(j, k)],
                );
            }
        }
    }
    Ok(out)
}

/// Membership in the 3-qubit Clifford+CS group: 8×8, unitary, and
/// determinant ±1. Entries are canonical by construction.
pub fn is_clifford_cs_member(m: &ExactMatrix) -> bool {
    if m.rows() != 8 || !m.is_square() || !m.is_unitary() {
        return false;
    }
    let d = m.det();
    d.is_one() || (-&d).is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn family_counts(rs: &[Relation<CircuitWord>]) -> BTreeMap<String, usize> {
        let mut m = BTreeMap::new();
        for r in rs {
            *m.entry(r.family.clone()).or_insert(0) += 1;
        }
        m
    }

    #[test]
    fn core_counts_and_soundness() {
        let core = builtin_relations(RelationSet::Core);
        assert_eq!(core.len(), 30);
        let counts = family_counts(&core);
        assert_eq!(counts["C1"], 1);
        assert_eq!(counts["C4"], 3);
        assert_eq!(counts["C11"], 2);
        assert_eq!(counts["C17"], 1);
        for (r, v) in core.iter().zip(verify_all(&core)) {
            assert!(v.holds, "{r}");
        }
    }

    #[test]
    fn monoidal_membership() {
        let m = builtin_relations(RelationSet::Monoidal);
        assert_eq!(m.len(), 24);
        assert!(m
            .iter()
            .any(|r| r.lhs == w("K0 CS12") && r.rhs == w("CS12 K0")));
        assert!(verify_all(&m).iter().all(|v| v.holds));
        let ext = builtin_relations(RelationSet::MonoidalExt);
        assert!(!ext.is_empty());
        assert!(verify_all(&ext).iter().all(|v| v.holds));
    }

    #[test]
    fn corrupted_relation_has_diagonal_witness() {
        let r = rel("CS01 CS01 CS01", "", "BAD", String::new());
        let v = verify_relation(&r);
        assert!(!v.holds);
        let wit = v.witness.unwrap();
        assert_eq!(wit.row, wit.col);
        assert_eq!(wit.lhs, DyadicGaussian::i_pow(3));
        assert_eq!(wit.rhs, DyadicGaussian::one());
    }

    #[test]
    fn other_sets_verify() {
        for set in [
            RelationSet::Definitions,
            RelationSet::Intro,
            RelationSet::Rewrite,
            RelationSet::UpsideDown,
            RelationSet::Amalgam,
            RelationSet::Worked,
        ] {
            let rs = builtin_relations(set);
            assert!(!rs.is_empty());
            for (r, v) in rs.iter().zip(verify_all(&rs)) {
                assert!(v.holds, "{r}");
            }
        }
        assert_eq!(builtin_relations(RelationSet::Rewrite).len(), 6);
        assert!(builtin_relation_set("nope").is_err());
    }

    #[test]
    fn reversal_and_inversion() {
        for r in builtin_relations(RelationSet::Presentation) {
            let rev = qubit_reversal(&r).unwrap();
            assert_eq!(qubit_reversal(&rev).unwrap(), r);
            assert!(verify_relation(&inverted(&r)).holds, "{r}");
        }
    }

    #[test]
    fn level_relations_small_dimensions() {
        assert!(level_relations(1).is_err());
        for n in 2..=5 {
            let rs = level_relations(n).unwrap();
            for (r, v) in rs.iter().zip(verify_all(&rs)) {
                assert!(v.holds, "{r}");
                assert_eq!(r.lhs.evaluate().det(), r.rhs.evaluate().det());
            }
        }
        let two = level_relations(2).unwrap();
        let eq16 = two.iter().find(|r| r.family == "FIG1-eq16").unwrap();
        assert_eq!(eq16.lhs.render(), "K[0,1] K[0,1] i[0] i[1]");
        assert!(eq16.rhs.tokens.is_empty());
    }

    #[test]
    fn level_gen_text() {
        for g in LevelGen::all(4) {
            assert_eq!(g.to_string().parse::<LevelGen>().unwrap(), g);
        }
        assert_eq!(LevelGen::all(8).len(), 64);
        assert!("X[1,0]".parse::<LevelGen>().is_err());
    }

    #[test]
    fn membership_criterion() {
        for g in BASE_GATES {
            assert!(is_clifford_cs_member(g.matrix()));
        }
        assert!(!is_clifford_cs_member(&LevelGen::I(0).matrix(8)));
    }
}
