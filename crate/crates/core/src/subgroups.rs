//! Finite subgroups of the 3-qubit Clifford+CS group, their normal forms,
//! and factorization of matrices into those normal forms.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{w, CircuitWord, Gate};
use crate::linalg::ExactMatrix;
use crate::ring::DyadicGaussian;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubgroupError {
    #[error("matrix is not diagonal")]
    NotDiagonal,
    #[error("entry is not a power of i")]
    NotPowerOfI,
    #[error("diagonal matrix is not in D (odd cubic coefficient)")]
    NotInD,
    #[error("matrix is not a permutation matrix")]
    NotPermutation,
    #[error("matrix is not monomial with power-of-i entries")]
    NotMonomial,
    #[error("monomial matrix is not in PD")]
    NotInPD,
    #[error("matrix is not a member of {0}")]
    NotMember(GroupId),
    #[error("{count} distinct normal forms of {group} evaluate to the same matrix")]
    Collision { group: GroupId, count: usize },
    #[error("enumeration exceeded the budget of {0} elements")]
    BudgetExceeded(usize),
    #[error("cache: {0}")]
    Cache(String),
}

/// A permutation of the eight basis states; `perm[x]` is the image of `x`.
pub type Perm = [u8; 8];

fn compose(a: &Perm, b: &Perm) -> Perm {
    std::array::from_fn(|x| a[b[x] as usize])
}

fn invert_perm(p: &Perm) -> Perm {
    let mut out = [0u8; 8];
    for (x, &y) in p.iter().enumerate() {
        out[y as usize] = x as u8;
    }
    out
}

const IDENTITY_PERM: Perm = [0, 1, 2, 3, 4, 5, 6, 7];

/// A monomial matrix with power-of-i entries: column `x` holds
/// `i^phase[x]` in row `perm[x]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub perm: Perm,
    pub phase: [u8; 8],
}

impl Monomial {
    pub const IDENTITY: Monomial = Monomial {
        perm: IDENTITY_PERM,
        phase: [0; 8],
    };

    pub fn from_perm(perm: Perm) -> Self {
        Monomial {
            perm,
            phase: [0; 8],
        }
    }

    pub fn diagonal(phase: [u8; 8]) -> Self {
        Monomial {
            perm: IDENTITY_PERM,
            phase,
        }
    }

    pub fn from_matrix(m: &ExactMatrix) -> Result<Monomial, SubgroupError> {
        if m.rows() != 8 || m.cols() != 8 {
            return Err(SubgroupError::NotMonomial);
        }
        let mut perm = [0u8; 8];
        let mut phase = [0u8; 8];
        let mut seen = [false; 8];
        for x in 0..8 {
            let mut found = None;
            for r in 0..8 {
                let e = m.get(r, x);
                if e.is_zero() {
                    continue;
                }
                if found.is_some() {
                    return Err(SubgroupError::NotMonomial);
                }
                let t = e.as_power_of_i().ok_or(SubgroupError::NotMonomial)?;
                found = Some((r, t));
            }
            let (r, t) = found.ok_or(SubgroupError::NotMonomial)?;
            if seen[r] {
                return Err(SubgroupError::NotMonomial);
            }
            seen[r] = true;
            perm[x] = r as u8;
            phase[x] = t;
        }
        Ok(Monomial { perm, phase })
    }

    pub fn to_matrix(&self) -> ExactMatrix {
        let mut m = ExactMatrix::zeros(8, 8);
        for x in 0..8 {
            m.set(
                self.perm[x] as usize,
                x,
                DyadicGaussian::i_pow(self.phase[x] as i64),
            );
        }
        m
    }

    pub fn mul(&self, rhs: &Monomial) -> Monomial {
        Monomial {
            perm: compose(&self.perm, &rhs.perm),
            phase: std::array::from_fn(|x| (rhs.phase[x] + self.phase[rhs.perm[x] as usize]) % 4),
        }
    }

    pub fn inverse(&self) -> Monomial {
        let mut perm = [0u8; 8];
        let mut phase = [0u8; 8];
        for x in 0..8 {
            let y = self.perm[x] as usize;
            perm[y] = x as u8;
            phase[y] = (4 - self.phase[x]) % 4;
        }
        Monomial { perm, phase }
    }

    pub fn is_permutation(&self) -> bool {
        self.phase == [0; 8]
    }

    pub fn is_diagonal(&self) -> bool {
        self.perm == IDENTITY_PERM
    }

    pub fn of_gate(g: Gate) -> Option<Monomial> {
        static TABLE: OnceLock<HashMap<Gate, Monomial>> = OnceLock::new();
        TABLE
            .get_or_init(|| {
                Gate::all()
                    .into_iter()
                    .filter(|g| g.is_monomial())
                    .map(|g| (g, Monomial::from_matrix(g.matrix()).expect("monomial gate")))
                    .collect()
            })
            .get(&g)
            .copied()
    }

    /// Product of a word of monomial gates; `None` if any gate is not.
    pub fn of_word(word: &CircuitWord) -> Option<Monomial> {
        word.iter().try_fold(Monomial::IDENTITY, |acc, &g| {
            Monomial::of_gate(g).map(|m| acc.mul(&m))
        })
    }

    /// Writes `self = P·Δ` with `Δ` diagonal; returns `(P, phases of Δ)`.
    pub fn split_right(&self) -> (Perm, [u8; 8]) {
        (self.perm, self.phase)
    }

    /// Writes `self = Δ·P` with `Δ` diagonal; returns `(phases of Δ, P)`.
    pub fn split_left(&self) -> ([u8; 8], Perm) {
        let mut phase = [0u8; 8];
        for x in 0..8 {
            phase[self.perm[x] as usize] = self.phase[x];
        }
        (phase, self.perm)
    }
}

/// Value of qubit `q` in basis state `x`.
fn bit(x: usize, q: u8) -> u8 {
    ((x >> (2 - q)) & 1) as u8
}

/// Identifier for each finite subgroup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupId {
    W,
    Q,
    C,
    CQ,
    P,
    D,
    QD,
    CQD,
    PD,
    K0,
    K0D,
    K0CD,
    K0W,
}

impl GroupId {
    pub const ALL: [GroupId; 13] = [
        GroupId::W,
        GroupId::Q,
        GroupId::C,
        GroupId::CQ,
        GroupId::P,
        GroupId::D,
        GroupId::QD,
        GroupId::CQD,
        GroupId::PD,
        GroupId::K0,
        GroupId::K0D,
        GroupId::K0CD,
        GroupId::K0W,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GroupId::W => "W",
            GroupId::Q => "Q",
            GroupId::C => "C",
            GroupId::CQ => "CQ",
            GroupId::P => "P",
            GroupId::D => "D",
            GroupId::QD => "QD",
            GroupId::CQD => "CQD",
            GroupId::PD => "PD",
            GroupId::K0 => "K0",
            GroupId::K0D => "K0D",
            GroupId::K0CD => "K0CD",
            GroupId::K0W => "K0W",
        }
    }

    /// The published generating set.
    pub fn generators(self) -> Vec<Gate> {
        let xw = "SWAP01 SWAP12";
        let xq = "X0 CX10 CX20 CCX0";
        let xc = "X1 CX12 CX21";
        let xp = "CX01 CX10 CX12 CX21 CCX0 X0";
        let xd = "i S0 S1 S2 CS01 CS12 CS02 CCZ";
        let text = match self {
            GroupId::W => xw.to_string(),
            GroupId::Q => xq.to_string(),
            GroupId::C => xc.to_string(),
            GroupId::CQ => format!("{xc} {xq}"),
            GroupId::P => xp.to_string(),
            GroupId::D => xd.to_string(),
            GroupId::QD => format!("{xq} {xd}"),
            GroupId::CQD => format!("{xc} {xq} {xd}"),
            GroupId::PD => format!("{xp} {xd}"),
            GroupId::K0 => "K0".to_string(),
            GroupId::K0D => format!("K0 {xd}"),
            GroupId::K0CD => format!("K0 {xc} {xd}"),
            GroupId::K0W => format!("K0 {xw}"),
        };
        w(&text).into_tokens()
    }

    /// Groups whose elements are all monomial matrices.
    pub fn is_monomial(self) -> bool {
        !matches!(
            self,
            GroupId::K0 | GroupId::K0D | GroupId::K0CD | GroupId::K0W
        )
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GroupId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        GroupId::ALL
            .into_iter()
            .find(|g| {
                g.name().eq_ignore_ascii_case(s)
                    || (s.eq_ignore_ascii_case("K0QD") && *g == GroupId::K0D)
            })
            .or_else(|| s.eq_ignore_ascii_case("K0CQD").then_some(GroupId::K0CD))
            .ok_or_else(|| format!("unknown group `{s}`"))
    }
}

/// Edges `(sub, super)` of the subgroup inclusion graph.
pub const INCLUSIONS: [(GroupId, GroupId); 16] = [
    (GroupId::W, GroupId::P),
    (GroupId::K0, GroupId::K0D),
    (GroupId::K0, GroupId::K0W),
    (GroupId::W, GroupId::K0W),
    (GroupId::C, GroupId::CQ),
    (GroupId::CQ, GroupId::P),
    (GroupId::P, GroupId::PD),
    (GroupId::D, GroupId::QD),
    (GroupId::QD, GroupId::K0D),
    (GroupId::K0D, GroupId::K0CD),
    (GroupId::Q, GroupId::CQ),
    (GroupId::CQ, GroupId::CQD),
    (GroupId::CQD, GroupId::K0CD),
    (GroupId::Q, GroupId::QD),
    (GroupId::QD, GroupId::CQD),
    (GroupId::CQD, GroupId::PD),
];

/// Words in normal form.
pub trait NormalWord {
    fn word(&self) -> CircuitWord;
}

/// `X0^a CX10^b CX20^c CCX0^d`, acting as `x0 ^= a ⊕ b·x1 ⊕ c·x2 ⊕ d·x1·x2`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct QNormal {
    pub a: u8,
    pub b: u8,
    pub c: u8,
    pub d: u8,
}

impl QNormal {
    pub fn all() -> impl Iterator<Item = QNormal> {
        (0..16u8).map(|n| QNormal {
            a: n >> 3 & 1,
            b: n >> 2 & 1,
            c: n >> 1 & 1,
            d: n & 1,
        })
    }

    pub fn perm(&self) -> Perm {
        std::array::from_fn(|x| {
            let (x1, x2) = (bit(x, 1), bit(x, 2));
            let g = self.a ^ (self.b & x1) ^ (self.c & x2) ^ (self.d & x1 & x2);
            (x ^ ((g as usize) << 2)) as u8
        })
    }

    fn decode(perm: &Perm) -> Option<QNormal> {
        let mut g = [0u8; 4];
        for (x, &y) in perm.iter().enumerate() {
            let y = y as usize;
            if y & 3 != x & 3 {
                return None;
            }
            let flip = ((x ^ y) >> 2) as u8;
            let lo = x & 3;
            if x < 4 {
                g[lo] = flip;
            } else if g[lo] != flip {
                return None;
            }
        }
        // g is indexed by 2·x1 + x2
        let a = g[0];
        Some(QNormal {
            a,
            b: g[2] ^ a,
            c: g[1] ^ a,
            d: g[3] ^ g[2] ^ g[1] ^ g[0],
        })
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        QNormal::all()
            .nth(rng.gen_range(0..16))
            .expect("16 elements")
    }
}

impl NormalWord for QNormal {
    fn word(&self) -> CircuitWord {
        let mut out = CircuitWord::empty();
        for (e, g) in [
            (self.a, "X0"),
            (self.b, "CX10"),
            (self.c, "CX20"),
            (self.d, "CCX0"),
        ] {
            if e == 1 {
                out = out.concat(&w(g));
            }
        }
        out
    }
}

/// `c4 c3 c2` with `c4 ∈ {ε, X1, X2, X1 X2}`, `c3 ∈ {ε, CX21, CX12 CX21}`,
/// `c2 ∈ {ε, CX12}`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct CNormal {
    pub c4: u8,
    pub c3: u8,
    pub c2: u8,
}

impl CNormal {
    pub fn all() -> impl Iterator<Item = CNormal> {
        (0..4u8).flat_map(|c4| {
            (0..3u8).flat_map(move |c3| (0..2u8).map(move |c2| CNormal { c4, c3, c2 }))
        })
    }

    pub fn is_identity(&self) -> bool {
        *self == CNormal::default()
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        CNormal {
            c4: rng.gen_range(0..4),
            c3: rng.gen_range(0..3),
            c2: rng.gen_range(0..2),
        }
    }
}

impl NormalWord for CNormal {
    fn word(&self) -> CircuitWord {
        let c4 = ["", "X1", "X2", "X1 X2"][self.c4 as usize];
        let c3 = ["", "CX21", "CX12 CX21"][self.c3 as usize];
        let c2 = ["", "CX12"][self.c2 as usize];
        w(&format!("{c4} {c3} {c2}"))
    }
}

/// `C̄ Q̄`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CQNormal {
    pub c: CNormal,
    pub q: QNormal,
}

impl NormalWord for CQNormal {
    fn word(&self) -> CircuitWord {
        self.c.word().concat(&self.q.word())
    }
}

/// `i^n0 S0^n1 S1^n2 S2^n3 CS01^n4 CS12^n5 CS02^n6 CCZ^n7`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct DNormal {
    pub n0: u8,
    pub n1: u8,
    pub n2: u8,
    pub n3: u8,
    pub n4: u8,
    pub n5: u8,
    pub n6: u8,
    pub n7: u8,
}

impl DNormal {
    pub fn coeffs(&self) -> [u8; 8] {
        [
            self.n0, self.n1, self.n2, self.n3, self.n4, self.n5, self.n6, self.n7,
        ]
    }

    pub fn from_coeffs(n: [u8; 8]) -> Self {
        DNormal {
            n0: n[0],
            n1: n[1],
            n2: n[2],
            n3: n[3],
            n4: n[4],
            n5: n[5],
            n6: n[6],
            n7: n[7],
        }
    }

    /// Exponent of i at each basis state.
    pub fn phases(&self) -> [u8; 8] {
        let n = self.coeffs();
        std::array::from_fn(|x| {
            let (x0, x1, x2) = (bit(x, 0), bit(x, 1), bit(x, 2));
            let f = n[0]
                + n[1] * x0
                + n[2] * x1
                + n[3] * x2
                + n[4] * x0 * x1
                + n[5] * x1 * x2
                + n[6] * x0 * x2
                + 2 * n[7] * x0 * x1 * x2;
            f % 4
        })
    }

    /// Inclusion–exclusion over the cube.
    pub fn decode_phases(f: &[u8; 8]) -> Result<DNormal, SubgroupError> {
        let v = |x: usize| f[x] as i32;
        let m = |t: i32| t.rem_euclid(4) as u8;
        let t = m(v(7) - v(6) - v(5) - v(3) + v(4) + v(2) + v(1) - v(0));
        if t % 2 == 1 {
            return Err(SubgroupError::NotInD);
        }
        Ok(DNormal {
            n0: m(v(0)),
            n1: m(v(4) - v(0)),
            n2: m(v(2) - v(0)),
            n3: m(v(1) - v(0)),
            n4: m(v(6) - v(4) - v(2) + v(0)),
            n5: m(v(3) - v(2) - v(1) + v(0)),
            n6: m(v(5) - v(4) - v(1) + v(0)),
            n7: t / 2,
        })
    }

    pub fn is_identity(&self) -> bool {
        *self == DNormal::default()
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut n: [u8; 8] = std::array::from_fn(|_| rng.gen_range(0..4));
        n[7] %= 2;
        DNormal::from_coeffs(n)
    }
}

impl NormalWord for DNormal {
    fn word(&self) -> CircuitWord {
        let names = ["i", "S0", "S1", "S2", "CS01", "CS12", "CS02", "CCZ"];
        names
            .iter()
            .zip(self.coeffs())
            .flat_map(|(g, e)| std::iter::repeat_n(g.parse::<Gate>().expect("valid"), e as usize))
            .collect()
    }
}

/// Decodes a diagonal matrix with power-of-i entries into `DNormal`.
pub fn decode_diagonal(m: &ExactMatrix) -> Result<DNormal, SubgroupError> {
    if m.rows() != 8 || !m.is_diagonal() {
        return Err(SubgroupError::NotDiagonal);
    }
    let mut f = [0u8; 8];
    for (x, fx) in f.iter_mut().enumerate() {
        *fx = m
            .get(x, x)
            .as_power_of_i()
            .ok_or(SubgroupError::NotPowerOfI)?;
    }
    DNormal::decode_phases(&f)
}

/// `V[v] C̄ Q̄`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PNormal {
    pub v: usize,
    pub c: CNormal,
    pub q: QNormal,
}

impl NormalWord for PNormal {
    fn word(&self) -> CircuitWord {
        tables().v_words[self.v]
            .concat(&self.c.word())
            .concat(&self.q.word())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QDNormal {
    pub q: QNormal,
    pub d: DNormal,
}

impl NormalWord for QDNormal {
    fn word(&self) -> CircuitWord {
        self.q.word().concat(&self.d.word())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CQDNormal {
    pub c: CNormal,
    pub q: QNormal,
    pub d: DNormal,
}

impl NormalWord for CQDNormal {
    fn word(&self) -> CircuitWord {
        self.c.word().concat(&self.q.word()).concat(&self.d.word())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PDNormal {
    pub p: PNormal,
    pub d: DNormal,
}

impl NormalWord for PDNormal {
    fn word(&self) -> CircuitWord {
        self.p.word().concat(&self.d.word())
    }
}

/// One of the six qubit permutations, by index into the `W` table.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WNormal {
    pub index: usize,
}

impl NormalWord for WNormal {
    fn word(&self) -> CircuitWord {
        tables().w_table[self.index].1.clone()
    }
}

/// The prefix `e4 e3 e2 e1`, each choice in `0..3`.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct EChoice {
    pub e4: u8,
    pub e3: u8,
    pub e2: u8,
    pub e1: u8,
}

impl EChoice {
    pub fn all() -> impl Iterator<Item = EChoice> {
        (0..81u8).map(|n| EChoice {
            e4: n / 27,
            e3: n / 9 % 3,
            e2: n / 3 % 3,
            e1: n % 3,
        })
    }

    pub fn index(&self) -> usize {
        (self.e4 as usize * 27) + (self.e3 as usize * 9) + (self.e2 as usize * 3) + self.e1 as usize
    }

    pub fn is_identity(&self) -> bool {
        *self == EChoice::default()
    }

    /// The evaluated prefix.
    pub fn matrix(&self) -> &'static ExactMatrix {
        &tables().e_table[self.index()].0
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        EChoice::all()
            .nth(rng.gen_range(0..81))
            .expect("81 elements")
    }
}

impl NormalWord for EChoice {
    fn word(&self) -> CircuitWord {
        let e4 = ["", "K0", "S0 K0"][self.e4 as usize];
        let e3 = ["", "CK20", "S0 CK20"][self.e3 as usize];
        let e2 = ["", "CK10", "S0 CK10"][self.e2 as usize];
        let e1 = ["", "CCK0", "CCK0 CCK0"][self.e1 as usize];
        w(&format!("{e4} {e3} {e2} {e1}"))
    }
}

/// `e4 e3 e2 e1 D̄ Q̄`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct K0DNormal {
    pub e: EChoice,
    pub d: DNormal,
    pub q: QNormal,
}

impl NormalWord for K0DNormal {
    fn word(&self) -> CircuitWord {
        self.e.word().concat(&self.d.word()).concat(&self.q.word())
    }
}

impl K0DNormal {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        K0DNormal {
            e: EChoice::random(rng),
            d: DNormal::random(rng),
            q: QNormal::random(rng),
        }
    }

    /// The monomial part `D̄ Q̄`.
    pub fn dq_monomial(&self) -> Monomial {
        Monomial::diagonal(self.d.phases()).mul(&Monomial::from_perm(self.q.perm()))
    }
}

/// `(e4 e3 e2 e1 D̄ Q̄) C̄`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct K0CDNormal {
    pub k: K0DNormal,
    pub c: CNormal,
}

impl NormalWord for K0CDNormal {
    fn word(&self) -> CircuitWord {
        self.k.word().concat(&self.c.word())
    }
}

impl K0CDNormal {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        K0CDNormal {
            k: K0DNormal::random(rng),
            c: CNormal::random(rng),
        }
    }

    /// The monomial part `D̄ Q̄ C̄`.
    pub fn dqc_monomial(&self) -> Monomial {
        self.k.dq_monomial().mul(&tables().c_monomial(self.c))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "group")]
pub enum NormalForm {
    W(WNormal),
    Q(QNormal),
    C(CNormal),
    CQ(CQNormal),
    P(PNormal),
    D(DNormal),
    QD(QDNormal),
    CQD(CQDNormal),
    PD(PDNormal),
    K0D(K0DNormal),
    K0CD(K0CDNormal),
}

impl NormalWord for NormalForm {
    fn word(&self) -> CircuitWord {
        match self {
            NormalForm::W(t) => t.word(),
            NormalForm::Q(t) => t.word(),
            NormalForm::C(t) => t.word(),
            NormalForm::CQ(t) => t.word(),
            NormalForm::P(t) => t.word(),
            NormalForm::D(t) => t.word(),
            NormalForm::QD(t) => t.word(),
            NormalForm::CQD(t) => t.word(),
            NormalForm::PD(t) => t.word(),
            NormalForm::K0D(t) => t.word(),
            NormalForm::K0CD(t) => t.word(),
        }
    }
}

/// Precomputed lookup data shared by all factorizations.
pub struct Tables {
    c_list: Vec<(CNormal, Perm)>,
    c_by_perm: HashMap<Perm, CNormal>,
    pub v_words: Vec<CircuitWord>,
    v_perms: Vec<Perm>,
    v_by_key: HashMap<Perm, usize>,
    /// `(E, E⁻¹)` for each of the 81 prefixes.
    e_table: Vec<(ExactMatrix, ExactMatrix)>,
    w_table: Vec<(Perm, CircuitWord)>,
}

static TABLES: OnceLock<Tables> = OnceLock::new();

pub fn tables() -> &'static Tables {
    TABLES.get_or_init(|| Tables::build_with(build_coset_table()))
}

/// Seeds the shared tables from a previously built coset table. Returns
/// `false` if the tables were already initialized.
pub fn install_coset_table(v: CosetTableV) -> Result<bool, SubgroupError> {
    let keys: std::collections::HashSet<Perm> = v.perms.iter().map(coset_key).collect();
    if v.words.len() != 105 || keys.len() != 105 || v.words.first().is_none_or(|w| !w.is_empty()) {
        return Err(SubgroupError::Cache(
            "coset table must list 105 distinct cosets, starting with ε".into(),
        ));
    }
    for (word, perm) in v.words.iter().zip(&v.perms) {
        if Monomial::of_word(word).map(|m| m.perm) != Some(*perm) {
            return Err(SubgroupError::Cache(format!(
                "representative `{word}` does not match its permutation"
            )));
        }
    }
    Ok(TABLES.set(Tables::build_with(v)).is_ok())
}

/// Key of the left coset `π·CQ`: the images `{π(x), π(x ⊕ 4)}` of the
/// pairs fixed setwise by CQ, as a partner involution.
fn coset_key(p: &Perm) -> Perm {
    let mut key = [0u8; 8];
    for x in 0..8 {
        key[p[x] as usize] = p[x ^ 4];
    }
    key
}

impl Tables {
    fn build_with(coset: CosetTableV) -> Tables {
        let c_list: Vec<(CNormal, Perm)> = CNormal::all()
            .map(|c| (c, Monomial::of_word(&c.word()).expect("C is monomial").perm))
            .collect();
        let c_by_perm = c_list.iter().map(|(c, p)| (*p, *c)).collect();
        let v_by_key = coset
            .perms
            .iter()
            .enumerate()
            .map(|(v, p)| (coset_key(p), v))
            .collect();
        let e_table = EChoice::all()
            .map(|e| {
                let word = e.word();
                (word.eval(), word.invert().eval())
            })
            .collect();
        let w_table = bfs_monomial(&GroupId::W.generators(), 10)
            .expect("W is tiny")
            .into_iter()
            .map(|(m, word)| (m.perm, word))
            .collect();
        Tables {
            c_list,
            c_by_perm,
            v_words: coset.words,
            v_perms: coset.perms,
            v_by_key,
            e_table,
            w_table,
        }
    }

    pub fn v_len(&self) -> usize {
        self.v_words.len()
    }

    pub fn v_monomial(&self, v: usize) -> Monomial {
        Monomial::from_perm(self.v_perms[v])
    }

    pub fn c_monomial(&self, c: CNormal) -> Monomial {
        let (_, p) = self
            .c_list
            .iter()
            .find(|(x, _)| *x == c)
            .expect("all 24 tabulated");
        Monomial::from_perm(*p)
    }

    pub fn coset_of(&self, p: &Perm) -> usize {
        self.v_by_key[&coset_key(p)]
    }
}

/// The 105 coset representatives with their permutations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetTableV {
    pub generators: Vec<Gate>,
    pub words: Vec<CircuitWord>,
    pub perms: Vec<Perm>,
}

/// Breadth-first search of P with right multiplication by the generators
/// in listed order, so each element is first reached by its shortlex-least
/// word. The first element reached in each left coset of CQ supplies the
/// representative.
pub fn build_coset_table() -> CosetTableV {
    let generators = GroupId::P.generators();
    let elements = bfs_monomial(&generators, 50_000).expect("|P| = 40320");
    let mut seen = HashMap::new();
    let mut words = Vec::new();
    let mut perms = Vec::new();
    for (m, word) in elements {
        let key = coset_key(&m.perm);
        if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(key) {
            e.insert(words.len());
            words.push(word);
            perms.push(m.perm);
        }
    }
    CosetTableV {
        generators,
        words,
        perms,
    }
}

fn bfs<E: Clone + Eq + Hash>(
    identity: E,
    gens: &[(Gate, E)],
    mul: impl Fn(&E, &E) -> E,
    budget: usize,
) -> Result<Vec<(E, CircuitWord)>, SubgroupError> {
    let mut index: HashMap<E, usize> = HashMap::new();
    let mut out: Vec<(E, CircuitWord)> = vec![(identity.clone(), CircuitWord::empty())];
    index.insert(identity, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        for (g, m) in gens {
            let next = mul(&out[n].0, m);
            if index.contains_key(&next) {
                continue;
            }
            if out.len() >= budget {
                return Err(SubgroupError::BudgetExceeded(budget));
            }
            let mut word = out[n].1.clone();
            word.push(*g);
            index.insert(next.clone(), out.len());
            queue.push_back(out.len());
            out.push((next, word));
        }
    }
    Ok(out)
}

fn bfs_monomial(
    gens: &[Gate],
    budget: usize,
) -> Result<Vec<(Monomial, CircuitWord)>, SubgroupError> {
    let gm: Vec<(Gate, Monomial)> = gens
        .iter()
        .map(|&g| (g, Monomial::of_gate(g).expect("monomial generator")))
        .collect();
    bfs(Monomial::IDENTITY, &gm, Monomial::mul, budget)
}

/// A group element in the cheapest faithful representation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ElementKey {
    Monomial(Monomial),
    Matrix(ExactMatrix),
}

/// All elements of an enumerated subgroup, each with its shortlex-least
/// word over the generators.
pub struct ElementTable {
    pub generators: Vec<Gate>,
    pub elements: Vec<(ElementKey, CircuitWord)>,
    monomial: bool,
    index: HashMap<ElementKey, usize>,
}

impl ElementTable {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn lookup(&self, m: &ExactMatrix) -> Option<&CircuitWord> {
        let key = if self.monomial {
            ElementKey::Monomial(Monomial::from_matrix(m).ok()?)
        } else {
            ElementKey::Matrix(m.clone())
        };
        self.index.get(&key).map(|&n| &self.elements[n].1)
    }
}

pub const DEFAULT_BUDGET: usize = 100_000;

/// BFS closure over the group's generators.
pub fn enumerate_subgroup(group: GroupId, budget: usize) -> Result<ElementTable, SubgroupError> {
    enumerate_generated(&group.generators(), budget)
}

/// BFS closure of an arbitrary generating set, keyed by monomial data when
/// every generator is monomial.
pub fn enumerate_generated(gens: &[Gate], budget: usize) -> Result<ElementTable, SubgroupError> {
    let monomial = gens.iter().all(|g| g.is_monomial());
    let elements: Vec<(ElementKey, CircuitWord)> = if monomial {
        bfs_monomial(gens, budget)?
            .into_iter()
            .map(|(m, word)| (ElementKey::Monomial(m), word))
            .collect()
    } else {
        let gm: Vec<(Gate, ExactMatrix)> = gens.iter().map(|&g| (g, g.matrix().clone())).collect();
        bfs(ExactMatrix::identity(8), &gm, ExactMatrix::mul, budget)?
            .into_iter()
            .map(|(m, word)| (ElementKey::Matrix(m), word))
            .collect()
    };
    let index = elements
        .iter()
        .enumerate()
        .map(|(n, (k, _))| (k.clone(), n))
        .collect();
    Ok(ElementTable {
        generators: gens.to_vec(),
        elements,
        monomial,
        index,
    })
}

fn enumerated(group: GroupId) -> &'static ElementTable {
    static K0: OnceLock<ElementTable> = OnceLock::new();
    static K0W: OnceLock<ElementTable> = OnceLock::new();
    let cell = match group {
        GroupId::K0 => &K0,
        GroupId::K0W => &K0W,
        _ => unreachable!("only the non-monomial finite groups are cached"),
    };
    cell.get_or_init(|| enumerate_subgroup(group, DEFAULT_BUDGET).expect("small group"))
}

fn permutation_of(m: &ExactMatrix) -> Result<Perm, SubgroupError> {
    let mono = Monomial::from_matrix(m).map_err(|_| SubgroupError::NotPermutation)?;
    if !mono.is_permutation() {
        return Err(SubgroupError::NotPermutation);
    }
    Ok(mono.perm)
}

fn decode_cq(p: &Perm) -> Option<CQNormal> {
    // σ on (x1, x2) must not depend on x0
    let sigma: Perm = std::array::from_fn(|x| ((x & 4) as u8) | (p[x & 3] & 3));
    if (0..8).any(|x| p[x] & 3 != sigma[x] & 3) {
        return None;
    }
    let t = tables();
    let c = *t.c_by_perm.get(&sigma)?;
    let q = QNormal::decode(&compose(&invert_perm(&sigma), p))?;
    Some(CQNormal { c, q })
}

/// Factors a permutation matrix as `V[v] C̄ Q̄`.
pub fn decode_permutation(m: &ExactMatrix) -> Result<PNormal, SubgroupError> {
    decode_perm(&permutation_of(m)?)
}

fn decode_perm(p: &Perm) -> Result<PNormal, SubgroupError> {
    let t = tables();
    let v = t.coset_of(p);
    let rest = compose(&invert_perm(&t.v_perms[v]), p);
    let cq = decode_cq(&rest).expect("V[v]⁻¹π lies in CQ by construction of the coset key");
    Ok(PNormal {
        v,
        c: cq.c,
        q: cq.q,
    })
}

/// Splits a monomial matrix as a permutation followed by a diagonal in D.
pub fn monomial_split(m: &ExactMatrix) -> Result<(ExactMatrix, DNormal), SubgroupError> {
    let mono = Monomial::from_matrix(m)?;
    let (perm, phase) = mono.split_right();
    let d = DNormal::decode_phases(&phase).map_err(|_| SubgroupError::NotInPD)?;
    Ok((Monomial::from_perm(perm).to_matrix(), d))
}

/// `M = V[v]·h` with `h ∈ CQD`, for any monomial `M ∈ PD`.
pub fn factor_pd_monomial(m: &Monomial) -> Result<(PDNormal, Monomial), SubgroupError> {
    let (perm, phase) = m.split_right();
    let d = DNormal::decode_phases(&phase).map_err(|_| SubgroupError::NotInPD)?;
    let p = decode_perm(&perm)?;
    let h = tables().v_monomial(p.v).inverse().mul(m);
    Ok((PDNormal { p, d }, h))
}

/// Factors into `e4 e3 e2 e1 D̄ Q̄`, scanning all 81 prefixes.
pub fn factor_k0d(m: &ExactMatrix) -> Result<K0DNormal, SubgroupError> {
    let t = tables();
    let mut hits = Vec::new();
    for e in EChoice::all() {
        let rest = t.e_table[e.index()].1.mul(m);
        let Ok(mono) = Monomial::from_matrix(&rest) else {
            continue;
        };
        let (phase, perm) = mono.split_left();
        let (Some(q), Ok(d)) = (QNormal::decode(&perm), DNormal::decode_phases(&phase)) else {
            continue;
        };
        hits.push(K0DNormal { e, d, q });
    }
    match hits.len() {
        0 => Err(SubgroupError::NotMember(GroupId::K0D)),
        1 => Ok(hits[0]),
        count => Err(SubgroupError::Collision {
            group: GroupId::K0D,
            count,
        }),
    }
}

/// Right-multiplies by a permutation: `(M·P)` has column `x` equal to
/// column `p(x)` of `M`.
fn permute_columns(m: &ExactMatrix, p: &Perm) -> ExactMatrix {
    let mut out = ExactMatrix::zeros(8, 8);
    for (x, &src) in p.iter().enumerate() {
        for r in 0..8 {
            let e = m.get(r, src as usize);
            if !e.is_zero() {
                out.set(r, x, e.clone());
            }
        }
    }
    out
}

/// Whether every nonzero entry keeps `(x1, x2)`.
fn is_block_diagonal(m: &ExactMatrix) -> bool {
    (0..8).all(|r| (0..8).all(|c| r & 3 == c & 3 || m.get(r, c).is_zero()))
}

/// Factors into `(e4 e3 e2 e1 D̄ Q̄) C̄`. For the right `c`, `M·c⁻¹` is
/// block diagonal over `(x1, x2)`, which rules out the other 23 cheaply.
pub fn factor_k0cd(m: &ExactMatrix) -> Result<K0CDNormal, SubgroupError> {
    let t = tables();
    let mut hits = Vec::new();
    for (c, perm) in &t.c_list {
        let candidate = permute_columns(m, &invert_perm(perm));
        if !is_block_diagonal(&candidate) {
            continue;
        }
        match factor_k0d(&candidate) {
            Ok(k) => hits.push(K0CDNormal { k, c: *c }),
            Err(SubgroupError::NotMember(_)) => {}
            Err(e) => return Err(e),
        }
    }
    match hits.len() {
        0 => Err(SubgroupError::NotMember(GroupId::K0CD)),
        1 => Ok(hits[0]),
        count => Err(SubgroupError::Collision {
            group: GroupId::K0CD,
            count,
        }),
    }
}

/// Decides membership and returns the normal form.
pub fn factor(group: GroupId, m: &ExactMatrix) -> Result<NormalForm, SubgroupError> {
    let not = || SubgroupError::NotMember(group);
    match group {
        GroupId::D => decode_diagonal(m).map(NormalForm::D),
        GroupId::W => {
            let p = permutation_of(m)?;
            let index = tables()
                .w_table
                .iter()
                .position(|(q, _)| *q == p)
                .ok_or_else(not)?;
            Ok(NormalForm::W(WNormal { index }))
        }
        GroupId::Q | GroupId::C | GroupId::CQ => {
            let cq = decode_cq(&permutation_of(m)?).ok_or_else(not)?;
            match group {
                GroupId::Q if cq.c.is_identity() => Ok(NormalForm::Q(cq.q)),
                GroupId::C if cq.q == QNormal::default() => Ok(NormalForm::C(cq.c)),
                GroupId::CQ => Ok(NormalForm::CQ(cq)),
                _ => Err(not()),
            }
        }
        GroupId::P => decode_permutation(m).map(NormalForm::P),
        GroupId::QD | GroupId::CQD | GroupId::PD => {
            let mono = Monomial::from_matrix(m)?;
            let (perm, phase) = mono.split_right();
            let d = DNormal::decode_phases(&phase).map_err(|_| not())?;
            match group {
                GroupId::PD => Ok(NormalForm::PD(PDNormal {
                    p: decode_perm(&perm)?,
                    d,
                })),
                _ => {
                    let cq = decode_cq(&perm).ok_or_else(not)?;
                    if group == GroupId::CQD {
                        Ok(NormalForm::CQD(CQDNormal {
                            c: cq.c,
                            q: cq.q,
                            d,
                        }))
                    } else if cq.c.is_identity() {
                        Ok(NormalForm::QD(QDNormal { q: cq.q, d }))
                    } else {
                        Err(not())
                    }
                }
            }
        }
        GroupId::K0D => factor_k0d(m).map(NormalForm::K0D),
        GroupId::K0CD => factor_k0cd(m).map(NormalForm::K0CD),
        GroupId::K0 | GroupId::K0W => Err(SubgroupError::NotMember(group)),
    }
}

pub fn is_member(group: GroupId, m: &ExactMatrix) -> bool {
    match group {
        GroupId::K0 | GroupId::K0W => enumerated(group).lookup(m).is_some(),
        _ => factor(group, m).is_ok(),
    }
}

/// `word_of` for any normal form.
pub fn word_of(t: &NormalForm) -> CircuitWord {
    t.word()
}

/// Format version of the table cache file.
pub const CACHE_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheFile {
    pub format_version: u32,
    pub v: CosetTableV,
    pub c_table: Vec<(CNormal, Perm)>,
    pub q_table: Vec<(QNormal, Perm)>,
}

impl CacheFile {
    pub fn build() -> CacheFile {
        CacheFile {
            format_version: CACHE_FORMAT_VERSION,
            v: build_coset_table(),
            c_table: tables().c_list.clone(),
            q_table: QNormal::all().map(|q| (q, q.perm())).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }

    /// Parses and validates a cache; a version mismatch or a table that
    /// disagrees with a fresh build is an error so callers can rebuild.
    pub fn from_json(text: &str) -> Result<CacheFile, SubgroupError> {
        let cache: CacheFile =
            serde_json::from_str(text).map_err(|e| SubgroupError::Cache(e.to_string()))?;
        if cache.format_version != CACHE_FORMAT_VERSION {
            return Err(SubgroupError::Cache(format!(
                "format version {} != {}",
                cache.format_version, CACHE_FORMAT_VERSION
            )));
        }
        if cache.v.words.len() != 105 || cache.v.words.len() != cache.v.perms.len() {
            return Err(SubgroupError::Cache(
                "coset table must have 105 entries".into(),
            ));
        }
        for (word, perm) in cache.v.words.iter().zip(&cache.v.perms) {
            if Monomial::of_word(word).map(|m| m.perm) != Some(*perm) {
                return Err(SubgroupError::Cache(format!(
                    "representative `{word}` does not match its permutation"
                )));
            }
        }
        Ok(cache)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::w;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mono(s: &str) -> Monomial {
        Monomial::of_word(&w(s)).unwrap()
    }

    #[test]
    fn monomial_matches_matrix_product() {
        let a = mono("S0 CX01 CS12");
        let b = mono("X2 CCZ SWAP01");
        assert_eq!(
            a.mul(&b).to_matrix(),
            w("S0 CX01 CS12 X2 CCZ SWAP01").eval()
        );
        assert_eq!(a.mul(&a.inverse()), Monomial::IDENTITY);
        assert!(Monomial::from_matrix(&w("K0").eval()).is_err());
    }

    #[test]
    fn decode_diagonal_examples() {
        let ccz = decode_diagonal(&w("CCZ").eval()).unwrap();
        assert_eq!(
            ccz,
            DNormal {
                n7: 1,
                ..Default::default()
            }
        );
        let s0 = decode_diagonal(&w("S0").eval()).unwrap();
        assert_eq!(
            s0,
            DNormal {
                n1: 1,
                ..Default::default()
            }
        );
        let ccs = ExactMatrix::diagonal(
            (0..8)
                .map(|x| DyadicGaussian::i_pow((x == 7) as i64))
                .collect(),
        );
        assert_eq!(decode_diagonal(&ccs), Err(SubgroupError::NotInD));
        assert_eq!(ccs.det(), DyadicGaussian::i());
        assert_eq!(
            decode_diagonal(&w("X0").eval()),
            Err(SubgroupError::NotDiagonal)
        );
    }

    #[test]
    fn d_round_trips_exhaustively_by_phase() {
        // the phase polynomial, evaluated independently, decodes back
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..2000 {
            let d = DNormal::random(&mut rng);
            assert_eq!(DNormal::decode_phases(&d.phases()).unwrap(), d);
            assert_eq!(
                Monomial::of_word(&d.word()).unwrap(),
                Monomial::diagonal(d.phases())
            );
        }
    }

    #[test]
    fn decode_permutation_examples() {
        let p = decode_permutation(&w("X0 CCX0").eval()).unwrap();
        assert_eq!(p.v, 0);
        assert!(p.c.is_identity());
        assert_eq!(
            p.q,
            QNormal {
                a: 1,
                b: 0,
                c: 0,
                d: 1
            }
        );
        let p = decode_permutation(&w("SWAP12").eval()).unwrap();
        assert_eq!(p.v, 0);
        assert_eq!(p.q, QNormal::default());
        assert_eq!(p.c.word().eval(), w("SWAP12").eval());
        assert_ne!(decode_permutation(&w("CX01").eval()).unwrap().v, 0);
        assert_eq!(
            decode_permutation(&w("S0").eval()),
            Err(SubgroupError::NotPermutation)
        );
    }

    #[test]
    fn monomial_split_examples() {
        let (perm, d) = monomial_split(&w("S0 X0").eval()).unwrap();
        assert_eq!(perm, w("X0").eval());
        assert_eq!(
            d,
            DNormal {
                n0: 1,
                n1: 3,
                ..Default::default()
            }
        );
        let (perm, d) = monomial_split(&ExactMatrix::identity(8)).unwrap();
        assert!(perm.is_identity() && d.is_identity());
        assert_eq!(
            monomial_split(&w("K0").eval()),
            Err(SubgroupError::NotMonomial)
        );
    }

    #[test]
    fn coset_table_shape() {
        let t = tables();
        assert_eq!(t.v_len(), 105);
        assert!(t.v_words[0].is_empty());
        let lens: Vec<usize> = t.v_words.iter().map(CircuitWord::len).collect();
        let sorted = {
            let mut s = lens.clone();
            s.sort();
            s
        };
        assert_eq!(lens, sorted, "BFS order is by length");
    }

    #[test]
    fn word_of_examples() {
        assert_eq!(
            QNormal {
                a: 1,
                b: 0,
                c: 0,
                d: 1
            }
            .word(),
            w("X0 CCX0")
        );
        assert!(DNormal::default().word().is_empty());
        let k = K0DNormal {
            e: EChoice {
                e4: 2,
                ..Default::default()
            },
            ..Default::default()
        };
        assert_eq!(k.word(), w("S0 K0"));
    }

    #[test]
    fn k0d_and_k0cd_examples() {
        let k = factor_k0d(&w("K0 S0").eval()).unwrap();
        assert_eq!(
            k.e,
            EChoice {
                e4: 1,
                ..Default::default()
            }
        );
        assert_eq!(
            k.d,
            DNormal {
                n1: 1,
                ..Default::default()
            }
        );
        assert_eq!(k.q, QNormal::default());
        let kc = factor_k0cd(&w("X1 K0").eval()).unwrap();
        assert_eq!(
            kc.k.e,
            EChoice {
                e4: 1,
                ..Default::default()
            }
        );
        assert_eq!(kc.c.word().eval(), w("X1").eval());
        assert!(kc.k.d.is_identity());
        let lhs = factor_k0cd(&w("X1 K0 CS01 K0 CCZ").eval()).unwrap();
        let rhs = factor_k0cd(&w("K0 CS01 CS01 CS01 S0 K0 CCZ CS02 CS02 X1").eval()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.word().eval(), w("X1 K0 CS01 K0 CCZ").eval());
        assert!(factor_k0cd(&w("K1").eval()).is_err());
    }

    #[test]
    fn small_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let t = K0CDNormal::random(&mut rng);
            assert_eq!(factor_k0cd(&t.word().eval()).unwrap(), t);
        }
    }

    #[test]
    fn enumeration_small_groups() {
        assert_eq!(
            enumerate_subgroup(GroupId::W, DEFAULT_BUDGET)
                .unwrap()
                .order(),
            6
        );
        assert_eq!(
            enumerate_subgroup(GroupId::Q, DEFAULT_BUDGET)
                .unwrap()
                .order(),
            16
        );
        assert_eq!(
            enumerate_subgroup(GroupId::C, DEFAULT_BUDGET)
                .unwrap()
                .order(),
            24
        );
        assert_eq!(
            enumerate_subgroup(GroupId::CQ, DEFAULT_BUDGET)
                .unwrap()
                .order(),
            384
        );
        assert_eq!(
            enumerate_subgroup(GroupId::K0, DEFAULT_BUDGET)
                .unwrap()
                .order(),
            8
        );
        assert_eq!(
            enumerate_subgroup(GroupId::P, 10).err(),
            Some(SubgroupError::BudgetExceeded(10))
        );
    }

    #[test]
    fn cache_round_trip() {
        let c = CacheFile::build();
        let text = c.to_json();
        assert_eq!(CacheFile::from_json(&text).unwrap(), c);
        assert_eq!(CacheFile::build().to_json(), text);
        let bumped = text.replacen("\"format_version\": 1", "\"format_version\": 99", 1);
        assert!(CacheFile::from_json(&bumped).is_err());
    }
}
