//! Circuit words over the 3-qubit Clifford+CS alphabet and its macro gates.
//!
//! A word `g1 g2 … gk` denotes the matrix product `g1·g2·…·gk`, so the
//! rightmost gate acts first. Basis index is `4·x0 + 2·x1 + x2`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{cs_gate, k_gate, s_gate, ExactMatrix};
use crate::ring::DyadicGaussian;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("unknown token `{0}`")]
    UnknownToken(String),
    #[error("malformed or out-of-range qubit index in `{0}`")]
    MalformedIndex(String),
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        source: Box<CircuitError>,
    },
}

/// An unordered pair of distinct qubits, stored low index first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair(u8, u8);

impl Pair {
    pub const P01: Pair = Pair(0, 1);
    pub const P12: Pair = Pair(1, 2);
    pub const P02: Pair = Pair(0, 2);

    pub fn new(a: u8, b: u8) -> Option<Pair> {
        (a != b && a < 3 && b < 3).then(|| Pair(a.min(b), a.max(b)))
    }

    pub fn lo(self) -> u8 {
        self.0
    }

    pub fn hi(self) -> u8 {
        self.1
    }

    fn reversed(self) -> Pair {
        Pair(2 - self.1, 2 - self.0)
    }
}

/// One generator token. Qubit fields are always in `0..3`; the
/// constructors used by the parser enforce this.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate {
    /// The scalar `i`.
    Omega,
    K(u8),
    S(u8),
    CS(Pair),
    X(u8),
    Sdg(u8),
    CSdg(Pair),
    CZ(Pair),
    CX {
        control: u8,
        target: u8,
    },
    /// Only the adjacent swaps `SWAP01` and `SWAP12` exist.
    Swap(Pair),
    /// Controlled K with target 0: `CK10` and `CK20`.
    CK {
        target: u8,
        control: u8,
    },
    CCZ,
    CCX(u8),
    /// The doubly controlled `K·S†` with target 0.
    CCK0,
}

use Gate::*;

/// The nine generators of the 3-qubit Clifford+CS presentation.
pub const BASE_GATES: [Gate; 9] = [
    Omega,
    K(0),
    K(1),
    K(2),
    S(0),
    S(1),
    S(2),
    CS(Pair::P01),
    CS(Pair::P12),
];

impl Gate {
    /// Every token the grammar accepts.
    pub fn all() -> Vec<Gate> {
        let mut out = BASE_GATES.to_vec();
        out.push(CS(Pair::P02));
        for q in 0..3 {
            out.push(X(q));
            out.push(Sdg(q));
            out.push(CCX(q));
        }
        for p in [Pair::P01, Pair::P12, Pair::P02] {
            out.push(CSdg(p));
            out.push(CZ(p));
        }
        for c in 0..3 {
            for t in 0..3 {
                if c != t {
                    out.push(CX {
                        control: c,
                        target: t,
                    });
                }
            }
        }
        out.extend([
            Swap(Pair::P01),
            Swap(Pair::P12),
            CK {
                target: 0,
                control: 1,
            },
            CK {
                target: 0,
                control: 2,
            },
            CCZ,
            CCK0,
        ]);
        out
    }

    pub fn is_base(self) -> bool {
        match self {
            Omega | K(_) | S(_) => true,
            CS(p) => p != Pair::P02,
            _ => false,
        }
    }

    /// Whether the gate's matrix has one nonzero entry per column.
    pub fn is_monomial(self) -> bool {
        !matches!(self, K(_) | CK { .. } | CCK0)
    }

    /// Bitmask of the qubits the gate acts on; `i` acts on none.
    pub fn support(self) -> u8 {
        let q = |q: u8| 1u8 << q;
        match self {
            Omega => 0,
            K(a) | S(a) | X(a) | Sdg(a) => q(a),
            CS(p) | CSdg(p) | CZ(p) | Swap(p) => q(p.0) | q(p.1),
            CX { control, target } => q(control) | q(target),
            CK { target, control } => q(target) | q(control),
            CCZ | CCX(_) | CCK0 => 0b111,
        }
    }

    /// The gate with qubit `q` relabelled `2 - q`, when that gate exists.
    pub fn reversed(self) -> Option<Gate> {
        let r = |q: u8| 2 - q;
        Some(match self {
            Omega => Omega,
            K(a) => K(r(a)),
            S(a) => S(r(a)),
            X(a) => X(r(a)),
            Sdg(a) => Sdg(r(a)),
            CS(p) => CS(p.reversed()),
            CSdg(p) => CSdg(p.reversed()),
            CZ(p) => CZ(p.reversed()),
            Swap(p) => Swap(p.reversed()),
            CX { control, target } => CX {
                control: r(control),
                target: r(target),
            },
            CCZ => CCZ,
            CCX(t) => CCX(r(t)),
            CK { .. } | CCK0 => return None,
        })
    }

    /// One level of macro expansion; `None` for base generators.
    pub fn definition(self) -> Option<Vec<Gate>> {
        if self.is_base() {
            return None;
        }
        let cx = |c: u8, t: u8| CX {
            control: c,
            target: t,
        };
        let s01 = Swap(Pair::P01);
        let s12 = Swap(Pair::P12);
        Some(match self {
            X(q) => vec![K(q), S(q), S(q), K(q), Omega],
            Sdg(q) => vec![S(q); 3],
            CSdg(p) => vec![CS(p); 3],
            CZ(p) => vec![CS(p); 2],
            CX { control, target } => {
                let p = Pair::new(control, target).expect("distinct qubits");
                vec![K(target), CS(p), CS(p), K(target), Omega]
            }
            Swap(Pair(0, 1)) => vec![cx(0, 1), cx(1, 0), cx(0, 1)],
            Swap(_) => vec![cx(1, 2), cx(2, 1), cx(1, 2)],
            CS(_) => vec![s12, CS(Pair::P01), s12],
            CK { control: 1, .. } => {
                let cs = CS(Pair::P01);
                vec![cs, K(0), cs, K(0), S(1), S(1), S(1), cs, Omega]
            }
            CK { .. } => vec![
                s12,
                CK {
                    target: 0,
                    control: 1,
                },
                s12,
            ],
            CCZ => {
                let cs = CS(Pair::P01);
                vec![cs, cx(2, 1), cs, cs, cs, cx(2, 1), CS(Pair::P02)]
            }
            CCX(0) => vec![K(0), CCZ, K(0), Omega],
            CCX(1) => vec![s01, CCX(0), s01],
            CCX(_) => vec![s12, CCX(1), s12],
            CCK0 => vec![
                K(0),
                CS(Pair::P01),
                K(0),
                CS(Pair::P02),
                K(0),
                CS(Pair::P01),
                K(0),
                CCX(0),
                cx(1, 0),
                CS(Pair::P12),
                CZ(Pair::P12),
                CS(Pair::P02),
                CZ(Pair::P02),
                Omega,
                Omega,
            ],
            Omega | K(_) | S(_) => unreachable!(),
        })
    }

    /// A word whose evaluation is the inverse of this gate.
    pub fn inverse(self) -> Vec<Gate> {
        match self {
            Omega => vec![Omega; 3],
            K(q) => vec![Omega, K(q)],
            S(q) => vec![S(q); 3],
            Sdg(q) => vec![S(q)],
            CS(p) => vec![CS(p); 3],
            CSdg(p) => vec![CS(p)],
            // the square of a controlled K is a phase i^3 on the control
            CK { target, control } => vec![S(control), CK { target, control }],
            // K·S† has order 6
            CCK0 => vec![CCK0; 5],
            X(_) | CZ(_) | CX { .. } | Swap(_) | CCZ | CCX(_) => vec![self],
        }
    }

    /// Exact 8×8 matrix, built directly rather than through the macro table.
    pub fn matrix(self) -> &'static ExactMatrix {
        static TABLE: OnceLock<HashMap<Gate, ExactMatrix>> = OnceLock::new();
        TABLE
            .get_or_init(|| {
                Gate::all()
                    .into_iter()
                    .map(|g| (g, g.build_matrix()))
                    .collect()
            })
            .get(&self)
            .expect("every constructible gate is tabulated")
    }

    fn build_matrix(self) -> ExactMatrix {
        let id2 = ExactMatrix::identity(2);
        let on = |m: ExactMatrix, q: u8| match q {
            0 => m.tensor(&id2).tensor(&id2),
            1 => id2.tensor(&m).tensor(&id2),
            _ => id2.tensor(&id2).tensor(&m),
        };
        let flip = |q: u8| 1usize << (2 - q);
        match self {
            Omega => ExactMatrix::scalar(8, DyadicGaussian::i()),
            K(q) => on(k_gate(), q),
            S(q) => on(s_gate(), q),
            CS(Pair(0, 1)) => cs_gate().tensor(&id2),
            CS(Pair(1, 2)) => id2.tensor(&cs_gate()),
            CS(p) => phase_diagonal(|x| (bit(x, p.0) & bit(x, p.1)) as u8),
            Sdg(q) => phase_diagonal(|x| 3 * bit(x, q) as u8),
            CSdg(p) => phase_diagonal(|x| 3 * (bit(x, p.0) & bit(x, p.1)) as u8),
            CZ(p) => phase_diagonal(|x| 2 * (bit(x, p.0) & bit(x, p.1)) as u8),
            CCZ => phase_diagonal(|x| if x == 7 { 2 } else { 0 }),
            X(q) => permutation_matrix(|x| x ^ flip(q)),
            CX { control, target } => permutation_matrix(|x| x ^ (bit(x, control) * flip(target))),
            Swap(p) => permutation_matrix(|x| {
                let (a, b) = (bit(x, p.0), bit(x, p.1));
                (x & !(flip(p.0) | flip(p.1))) | (b * flip(p.0)) | (a * flip(p.1))
            }),
            CCX(t) => permutation_matrix(|x| {
                let others = (0..3).filter(|&q| q != t).all(|q| bit(x, q) == 1);
                if others {
                    x ^ flip(t)
                } else {
                    x
                }
            }),
            CK { target, control } => controlled(&k_gate(), target, &[control]),
            CCK0 => {
                let sdg =
                    ExactMatrix::diagonal(vec![DyadicGaussian::one(), DyadicGaussian::i_pow(3)]);
                controlled(&k_gate().mul(&sdg), 0, &[1, 2])
            }
        }
    }
}

/// Value of qubit `q` in basis index `x`.
pub fn bit(x: usize, q: u8) -> usize {
    (x >> (2 - q)) & 1
}

fn phase_diagonal(f: impl Fn(usize) -> u8) -> ExactMatrix {
    ExactMatrix::diagonal((0..8).map(|x| DyadicGaussian::i_pow(f(x) as i64)).collect())
}

/// Matrix sending basis vector `x` to `f(x)`.
fn permutation_matrix(f: impl Fn(usize) -> usize) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(8, 8);
    for x in 0..8 {
        m.set(f(x), x, DyadicGaussian::one());
    }
    m
}

/// Applies the 2×2 `u` to `target` when every control qubit is 1.
fn controlled(u: &ExactMatrix, target: u8, controls: &[u8]) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(8, 8);
    let t = 1usize << (2 - target);
    for x in 0..8 {
        if controls.iter().all(|&c| bit(x, c) == 1) {
            let xb = bit(x, target);
            let base = x & !t;
            for yb in 0..2 {
                m.set(base | (yb * t), x, u.get(yb, xb).clone());
            }
        } else {
            m.set(x, x, DyadicGaussian::one());
        }
    }
    m
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Omega => write!(f, "i"),
            K(q) => write!(f, "K{q}"),
            S(q) => write!(f, "S{q}"),
            X(q) => write!(f, "X{q}"),
            Sdg(q) => write!(f, "Sdg{q}"),
            CS(p) => write!(f, "CS{}{}", p.0, p.1),
            CSdg(p) => write!(f, "CSdg{}{}", p.0, p.1),
            CZ(p) => write!(f, "CZ{}{}", p.0, p.1),
            Swap(p) => write!(f, "SWAP{}{}", p.0, p.1),
            CX { control, target } => write!(f, "CX{control}{target}"),
            CK { target, control } => write!(f, "CK{control}{target}"),
            CCZ => write!(f, "CCZ"),
            CCX(t) => write!(f, "CCX{t}"),
            CCK0 => write!(f, "CCK0"),
        }
    }
}

impl FromStr for Gate {
    type Err = CircuitError;

    fn from_str(tok: &str) -> Result<Gate, CircuitError> {
        if tok == "i" {
            return Ok(Omega);
        }
        if tok == "CCZ" {
            return Ok(CCZ);
        }
        if tok == "CCK0" {
            return Ok(CCK0);
        }
        // longest prefixes first so that `CSdg` is not read as `CS`
        const PREFIXES: [&str; 10] = [
            "CSdg", "SWAP", "Sdg", "CCX", "CS", "CZ", "CX", "CK", "K", "S",
        ];
        let prefix = PREFIXES
            .iter()
            .find(|p| tok.starts_with(**p))
            .copied()
            .or_else(|| tok.starts_with('X').then_some("X"))
            .ok_or_else(|| CircuitError::UnknownToken(tok.to_string()))?;
        let digits = &tok[prefix.len()..];
        let bad = || CircuitError::MalformedIndex(tok.to_string());
        let idx: Vec<u8> = digits
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).filter(|&d| d < 3))
            .collect::<Option<_>>()
            .ok_or_else(bad)?;
        let one = || match idx.as_slice() {
            [a] => Ok(*a),
            _ => Err(bad()),
        };
        let two = || match idx.as_slice() {
            [a, b] if a != b => Ok((*a, *b)),
            _ => Err(bad()),
        };
        let ordered_pair = || {
            let (a, b) = two()?;
            if a < b {
                Ok(Pair(a, b))
            } else {
                Err(bad())
            }
        };
        Ok(match prefix {
            "K" => K(one()?),
            "S" => S(one()?),
            "X" => X(one()?),
            "Sdg" => Sdg(one()?),
            "CCX" => CCX(one()?),
            "CS" => CS(ordered_pair()?),
            "CSdg" => CSdg(ordered_pair()?),
            "CZ" => CZ(ordered_pair()?),
            "SWAP" => match ordered_pair()? {
                Pair(0, 2) => return Err(bad()),
                p => Swap(p),
            },
            "CX" => {
                let (control, target) = two()?;
                CX { control, target }
            }
            "CK" => match two()? {
                (control, 0) => CK { target: 0, control },
                _ => return Err(bad()),
            },
            _ => unreachable!(),
        })
    }
}

impl Serialize for Gate {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Gate {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A finite sequence of gate tokens; the empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CircuitWord(Vec<Gate>);

impl CircuitWord {
    pub fn new(tokens: Vec<Gate>) -> Self {
        CircuitWord(tokens)
    }

    pub fn empty() -> Self {
        CircuitWord(Vec::new())
    }

    pub fn tokens(&self) -> &[Gate] {
        &self.0
    }

    pub fn into_tokens(self) -> Vec<Gate> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Gate> {
        self.0.iter()
    }

    pub fn push(&mut self, g: Gate) {
        self.0.push(g);
    }

    pub fn concat(&self, other: &CircuitWord) -> CircuitWord {
        CircuitWord(self.0.iter().chain(&other.0).copied().collect())
    }

    /// `self` repeated `n` times.
    pub fn pow(&self, n: usize) -> CircuitWord {
        CircuitWord(self.0.repeat(n))
    }

    /// Replaces every macro by its definition, recursively, leaving only
    /// the nine base generators.
    pub fn expand(&self) -> CircuitWord {
        fn go(g: Gate, out: &mut Vec<Gate>) {
            match g.definition() {
                None => out.push(g),
                Some(body) => body.into_iter().for_each(|h| go(h, out)),
            }
        }
        let mut out = Vec::new();
        for &g in &self.0 {
            go(g, &mut out);
        }
        CircuitWord(out)
    }

    /// Product of the token matrices in word order.
    pub fn eval(&self) -> ExactMatrix {
        let mut iter = self.0.iter();
        let Some(first) = iter.next() else {
            return ExactMatrix::identity(8);
        };
        iter.fold(first.matrix().clone(), |acc, g| acc.mul(g.matrix()))
    }

    /// A word evaluating to the inverse matrix.
    pub fn invert(&self) -> CircuitWord {
        CircuitWord(self.0.iter().rev().flat_map(|g| g.inverse()).collect())
    }

    /// The qubit-reversed word, or `None` if some token has no mirror image.
    pub fn reversed_qubits(&self) -> Option<CircuitWord> {
        self.0
            .iter()
            .map(|g| g.reversed())
            .collect::<Option<_>>()
            .map(CircuitWord)
    }

    /// Number of CS tokens after full expansion.
    pub fn cs_count(&self) -> usize {
        self.expand().iter().filter(|g| matches!(g, CS(_))).count()
    }

    pub fn support(&self) -> u8 {
        self.0.iter().fold(0, |acc, g| acc | g.support())
    }

    /// Uniformly random word over the nine base generators.
    pub fn random_base<R: Rng + ?Sized>(rng: &mut R, len: usize) -> CircuitWord {
        CircuitWord(
            (0..len)
                .map(|_| BASE_GATES[rng.gen_range(0..BASE_GATES.len())])
                .collect(),
        )
    }

    /// Uniformly random word over the given alphabet.
    pub fn random_over<R: Rng + ?Sized>(rng: &mut R, alphabet: &[Gate], len: usize) -> CircuitWord {
        CircuitWord(
            (0..len)
                .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
                .collect(),
        )
    }
}

impl From<Vec<Gate>> for CircuitWord {
    fn from(v: Vec<Gate>) -> Self {
        CircuitWord(v)
    }
}

impl FromIterator<Gate> for CircuitWord {
    fn from_iter<I: IntoIterator<Item = Gate>>(iter: I) -> Self {
        CircuitWord(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a CircuitWord {
    type Item = &'a Gate;
    type IntoIter = std::slice::Iter<'a, Gate>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Space-separated tokens; the empty word renders as `ε`.
impl fmt::Display for CircuitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for (n, g) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, " ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for CircuitWord {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, CircuitError> {
        parse_word(s)
    }
}

/// Parses whitespace-separated tokens. `ε` is accepted and ignored.
pub fn parse_word(text: &str) -> Result<CircuitWord, CircuitError> {
    text.split_whitespace()
        .filter(|t| *t != "ε")
        .map(str::parse)
        .collect::<Result<Vec<_>, _>>()
        .map(CircuitWord)
}

/// One circuit per line; `#` starts a comment, blank lines are skipped.
pub fn parse_file(text: &str) -> Result<Vec<CircuitWord>, CircuitError> {
    text.lines()
        .enumerate()
        .filter_map(|(n, line)| {
            let body = line.split('#').next().unwrap_or("").trim();
            (!body.is_empty()).then_some((n + 1, body))
        })
        .map(|(line, body)| {
            parse_word(body).map_err(|e| CircuitError::Line {
                line,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Shorthand for literal words in code; panics on a bad token.
pub fn w(text: &str) -> CircuitWord {
    parse_word(text).unwrap_or_else(|e| panic!("bad word {text:?}: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest, ProptestConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parse_examples() {
        assert_eq!(parse_word("K0 S1 CS01").unwrap().len(), 3);
        assert!(parse_word("").unwrap().is_empty());
        assert_eq!(
            parse_word("K3"),
            Err(CircuitError::MalformedIndex("K3".into()))
        );
        assert_eq!(
            parse_word("H0"),
            Err(CircuitError::UnknownToken("H0".into()))
        );
        assert!(parse_word("CS10").is_err());
        assert!(parse_word("CX11").is_err());
        assert!(parse_word("SWAP02").is_err());
        assert!(parse_word("k0").is_err());
        assert_eq!(parse_word("CSdg12").unwrap().tokens(), &[CSdg(Pair::P12)]);
        assert_eq!(parse_word("Sdg2").unwrap().tokens(), &[Sdg(2)]);
    }

    #[test]
    fn every_token_round_trips() {
        for g in Gate::all() {
            assert_eq!(g.to_string().parse::<Gate>().unwrap(), g);
        }
        let word = w("i K0 CX20 CCK0 SWAP12 CK20");
        assert_eq!(word.to_string().parse::<CircuitWord>().unwrap(), word);
        assert_eq!(CircuitWord::empty().to_string(), "ε");
        assert!(parse_word("ε").unwrap().is_empty());
    }

    #[test]
    fn file_format() {
        let words = parse_file("# header\nK0 S0\n\nCS01 # trailing\n").unwrap();
        assert_eq!(words, vec![w("K0 S0"), w("CS01")]);
        let err = parse_file("K0\nK9\n").unwrap_err();
        assert!(matches!(err, CircuitError::Line { line: 2, .. }));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(CircuitWord::empty().eval(), ExactMatrix::identity(8));
        assert_eq!(
            w("K0 K0").eval(),
            ExactMatrix::scalar(8, DyadicGaussian::i_pow(3))
        );
        let mut cs01 = ExactMatrix::identity(8);
        cs01.set(6, 6, DyadicGaussian::i());
        cs01.set(7, 7, DyadicGaussian::i());
        assert_eq!(w("CS01").eval(), cs01);
    }

    #[test]
    fn macros_agree_with_definitions() {
        for g in Gate::all() {
            if let Some(body) = g.definition() {
                assert_eq!(CircuitWord(body).eval(), *g.matrix(), "definition of {g}");
            }
            let single = CircuitWord(vec![g]);
            assert_eq!(single.expand().eval(), *g.matrix(), "full expansion of {g}");
            assert!(single.expand().iter().all(|h| h.is_base()));
        }
    }

    #[test]
    fn expansion_examples() {
        assert_eq!(w("X0").expand(), w("K0 S0 S0 K0 i"));
        let cx = |c: &str| w(c).expand();
        let swap = cx("CX01").concat(&cx("CX10")).concat(&cx("CX01"));
        assert_eq!(w("SWAP01").expand(), swap);
        assert!(CircuitWord::empty().expand().is_empty());
    }

    #[test]
    fn cck0_is_two_level_k_prime() {
        let kp = k_gate().mul(&ExactMatrix::diagonal(vec![
            DyadicGaussian::one(),
            DyadicGaussian::i_pow(3),
        ]));
        assert_eq!(kp.det(), DyadicGaussian::one());
        let mut expected = ExactMatrix::identity(8);
        for (r, &x) in [3usize, 7].iter().enumerate() {
            for (c, &y) in [3usize, 7].iter().enumerate() {
                expected.set(x, y, kp.get(r, c).clone());
            }
        }
        assert_eq!(w("CCK0").expand().eval(), expected);
        assert_eq!(expected.det(), DyadicGaussian::one());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(w("S0").invert(), w("S0 S0 S0"));
        assert!(CircuitWord::empty().invert().is_empty());
        assert_eq!(w("K0 CS01").invert(), w("CS01 CS01 CS01 i K0"));
        for g in Gate::all() {
            let word = CircuitWord(vec![g]);
            assert!(
                word.invert().eval().mul(&word.eval()).is_identity(),
                "inverse of {g}"
            );
        }
    }

    #[test]
    fn base_generators_are_unitary_with_real_unit_det() {
        let one = DyadicGaussian::one();
        for g in BASE_GATES {
            let m = g.matrix();
            assert!(m.is_unitary());
            let d = m.det();
            assert!(d == one || d == -&one, "{g}: {d}");
        }
    }

    #[test]
    fn reversal_is_involution_and_mirrors_support() {
        for g in Gate::all() {
            if let Some(r) = g.reversed() {
                assert_eq!(r.reversed(), Some(g));
                let flipped = (0..3u8)
                    .filter(|q| g.support() >> q & 1 == 1)
                    .fold(0u8, |a, q| a | 1 << (2 - q));
                assert_eq!(r.support(), flipped);
            }
        }
        assert_eq!(w("K0 CS01 CX20").reversed_qubits(), Some(w("K2 CS12 CX02")));
    }

    #[test]
    fn random_mixed_words_expand_faithfully() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let alphabet = Gate::all();
        for _ in 0..200 {
            let len = rng.gen_range(0..8);
            let word = CircuitWord::random_over(&mut rng, &alphabet, len);
            assert_eq!(word.expand().eval(), word.eval());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn eval_is_a_morphism(a in 0u64..1000, la in 0usize..10, lb in 0usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(a);
            let u = CircuitWord::random_base(&mut rng, la);
            let v = CircuitWord::random_base(&mut rng, lb);
            prop_assert_eq!(u.concat(&v).eval(), u.eval().mul(&v.eval()));
            prop_assert!(u.invert().eval().mul(&u.eval()).is_identity());
        }
    }
}
