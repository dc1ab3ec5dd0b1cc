//! The acceptance suite, shared by the `acceptance` test target and the
//! `selftest` command.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{CircuitWord, Gate, BASE_GATES};
use crate::linalg::{k_gate, s_gate, ExactMatrix};
use crate::normalizer::{almost_normalize, equiv_check, Equivalence, NormalizeConfig};
use crate::relations::{
    amalgam_generators, builtin_relations, is_clifford_cs_member, level_relations, verify_all,
    LevelGen, Relation, RelationSet,
};
use crate::ring::DyadicGaussian;
use crate::rspresent::{brute_force_monoid, level_kernel, rs_present, z4_toy};
use crate::subgroups::{
    enumerate_generated, enumerate_subgroup, factor, factor_k0cd, factor_k0d, is_member, tables,
    word_of, CNormal, DNormal, GroupId, K0CDNormal, K0DNormal, NormalForm, NormalWord, PNormal,
    QNormal, DEFAULT_BUDGET, INCLUSIONS,
};

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{tag} criterion {:>2} {:<28} [{:.2}s] {}",
            self.id,
            self.name,
            self.elapsed_ms as f64 / 1000.0,
            self.detail
        )
    }
}

/// Name, check, and time limit where one is stated.
pub type Criterion = (&'static str, fn() -> (bool, String), Option<Duration>);

pub const CRITERIA: [Criterion; 11] = [
    (
        "presentation soundness",
        presentation_soundness,
        Some(Duration::from_secs(60)),
    ),
    (
        "level relation soundness",
        level_soundness,
        Some(Duration::from_secs(300)),
    ),
    ("definitional identities", definitions, None),
    ("upside-down closure", upside_down, None),
    ("cs-count and worked identity", intro_and_worked, None),
    ("enumeration counts", enumeration, None),
    ("normal-form round trips", round_trips, None),
    (
        "almost-normalizer",
        normalizer,
        Some(Duration::from_secs(600)),
    ),
    ("amalgamated product", amalgam, None),
    ("reidemeister-schreier", reidemeister_schreier, None),
    ("membership criterion", membership, None),
];

/// Runs criterion `id` (1-based) and checks its time limit.
pub fn run_criterion(id: usize) -> CriterionResult {
    let (name, f, limit) = CRITERIA[id - 1];
    let start = Instant::now();
    let (ok, mut detail) = f();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    if let (false, Some(l)) = (in_time, limit) {
        detail.push_str(&format!("; exceeded limit of {}s", l.as_secs()));
    }
    CriterionResult {
        id,
        name,
        passed: ok && in_time,
        detail,
        elapsed_ms: elapsed.as_millis(),
    }
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=CRITERIA.len()).map(run_criterion).collect()
}

fn failures(rs: &[Relation<CircuitWord>]) -> Vec<String> {
    verify_all(rs)
        .iter()
        .zip(rs)
        .filter(|(v, _)| !v.holds)
        .map(|(_, r)| format!("{} [{}]", r.family, r.instance))
        .collect()
}

fn report(total: usize, failed: Vec<String>) -> (bool, String) {
    if failed.is_empty() {
        (true, format!("{total}/{total} verified"))
    } else {
        let shown: Vec<&String> = failed.iter().take(5).collect();
        (
            false,
            format!("{} of {total} failed: {shown:?}", failed.len()),
        )
    }
}

fn presentation_soundness() -> (bool, String) {
    let core = builtin_relations(RelationSet::Core);
    let family_count = |names: &[&str]| {
        core.iter()
            .filter(|r| names.contains(&r.family.as_str()))
            .count()
    };
    let counts = [
        family_count(&["C1"]),
        family_count(&["C2", "C3", "C4"]),
        family_count(&["C5", "C6", "C7", "C8", "C9", "C10", "C11"]),
        family_count(&["C12", "C13", "C14", "C15", "C16", "C17"]),
    ];
    let monoidal = builtin_relations(RelationSet::Monoidal);
    let mut all = core.clone();
    all.extend(monoidal.iter().cloned());
    let (ok, detail) = report(all.len(), failures(&all));
    let shape_ok = counts == [1, 9, 14, 6] && core.len() == 30;
    (
        ok && shape_ok,
        format!(
            "families {counts:?} + {} monoidal; {detail}",
            monoidal.len()
        ),
    )
}

fn level_soundness() -> (bool, String) {
    let mut total = 0;
    let mut failed = Vec::new();
    for n in 2..=8 {
        let rels = match level_relations(n) {
            Ok(r) => r,
            Err(e) => return (false, e.to_string()),
        };
        total += rels.len();
        failed.extend(
            verify_all(&rels)
                .iter()
                .zip(&rels)
                .filter(|(v, _)| !v.holds)
                .map(|(_, r)| format!("n={n} {} [{}]", r.family, r.instance)),
        );
    }
    report(total, failed)
}

/// `block-diag(I₆, K·S†)` on the basis states 3 and 7.
fn expected_cck0() -> ExactMatrix {
    let kp = k_gate().mul(&s_gate().mul(&s_gate()).mul(&s_gate()));
    let mut m = ExactMatrix::identity(8);
    for (a, r) in [3, 7].into_iter().enumerate() {
        for (b, c) in [3, 7].into_iter().enumerate() {
            m.set(r, c, kp.get(a, b).clone());
        }
    }
    m
}

fn definitions() -> (bool, String) {
    let defs = builtin_relations(RelationSet::Definitions);
    let (ok, detail) = report(defs.len(), failures(&defs));
    let cck0 = CircuitWord::new(vec![Gate::CCK0]);
    let block_ok = cck0.expand().eval() == expected_cck0();
    let det_ok = cck0.expand().eval().det().is_one();
    (
        ok && block_ok && det_ok,
        format!("{detail}; CCK0 block {block_ok}, det 1 {det_ok}"),
    )
}

fn upside_down() -> (bool, String) {
    let rels = builtin_relations(RelationSet::UpsideDown);
    let has_c15 = rels.iter().any(|r| r.family == "UPSIDE-C15");
    let (ok, detail) = report(rels.len(), failures(&rels));
    (
        ok && has_c15,
        format!("{detail}; reversed C15 present {has_c15}"),
    )
}

fn intro_and_worked() -> (bool, String) {
    let mut rels = builtin_relations(RelationSet::Intro);
    rels.extend(builtin_relations(RelationSet::Worked));
    report(rels.len(), failures(&rels))
}

fn enumeration() -> (bool, String) {
    let expected = [
        (GroupId::W, 6),
        (GroupId::Q, 16),
        (GroupId::C, 24),
        (GroupId::CQ, 384),
        (GroupId::D, 32768),
        (GroupId::P, 40320),
    ];
    let mut problems = Vec::new();
    let mut found = Vec::new();
    for (g, n) in expected {
        match enumerate_subgroup(g, DEFAULT_BUDGET) {
            Ok(t) if t.order() == n => found.push(format!("|{g}|={n}")),
            Ok(t) => problems.push(format!("|{g}| = {} ≠ {n}", t.order())),
            Err(e) => problems.push(format!("{g}: {e}")),
        }
    }
    let v = tables().v_len();
    if v != 105 {
        problems.push(format!("|V| = {v}"));
    }
    match enumerate_subgroup(GroupId::K0W, DEFAULT_BUDGET) {
        Ok(t) => found.push(format!("|K0W|={}", t.order())),
        Err(e) => problems.push(format!("K0W: {e}")),
    }
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (lo, hi) in INCLUSIONS {
        let gens = lo.generators();
        let mut samples: Vec<ExactMatrix> = gens.iter().map(|g| g.matrix().clone()).collect();
        for _ in 0..20 {
            let len = rng.gen_range(1..=20);
            samples.push(CircuitWord::random_over(&mut rng, &gens, len).eval());
        }
        if !samples.par_iter().all(|m| is_member(hi, m)) {
            problems.push(format!("edge {lo}–{hi}"));
        }
    }
    found.push(format!("|V|={v}"));
    found.push(format!("{} edges", INCLUSIONS.len()));
    (
        problems.is_empty(),
        format!("{}; problems {problems:?}", found.join(" ")),
    )
}

fn round_trip(group: GroupId, t: NormalForm) -> bool {
    factor(group, &word_of(&t).eval()).is_ok_and(|f| f == t)
}

fn round_trips() -> (bool, String) {
    let mut failed = Vec::new();
    let q = QNormal::all()
        .filter(|&t| !round_trip(GroupId::Q, NormalForm::Q(t)))
        .count();
    let c = CNormal::all()
        .filter(|&t| !round_trip(GroupId::C, NormalForm::C(t)))
        .count();
    let d = (0..32768u32)
        .into_par_iter()
        .filter(|&n| {
            let coeff: [u8; 8] = std::array::from_fn(|k| {
                if k < 7 {
                    (n >> (2 * k) & 3) as u8
                } else {
                    (n >> 14 & 1) as u8
                }
            });
            !round_trip(GroupId::D, NormalForm::D(DNormal::from_coeffs(coeff)))
        })
        .count();
    let p_tuples: Vec<PNormal> = (0..tables().v_len())
        .flat_map(|v| {
            CNormal::all().flat_map(move |c| QNormal::all().map(move |q| PNormal { v, c, q }))
        })
        .collect();
    let p = p_tuples
        .par_iter()
        .filter(|&&t| !round_trip(GroupId::P, NormalForm::P(t)))
        .count();
    let k0d = (0..10_000u64)
        .into_par_iter()
        .filter(|&s| {
            let t = K0DNormal::random(&mut ChaCha8Rng::seed_from_u64(s));
            factor_k0d(&t.word().eval()) != Ok(t)
        })
        .count();
    let k0cd = (0..10_000u64)
        .into_par_iter()
        .filter(|&s| {
            let t = K0CDNormal::random(&mut ChaCha8Rng::seed_from_u64(s));
            factor_k0cd(&t.word().eval()) != Ok(t)
        })
        .count();
    for (name, n) in [
        ("Q", q),
        ("C", c),
        ("D", d),
        ("P", p),
        ("K0D", k0d),
        ("K0CD", k0cd),
    ] {
        if n > 0 {
            failed.push(format!("{name}: {n} tuple failures"));
        }
    }
    let groups = [
        GroupId::W,
        GroupId::Q,
        GroupId::C,
        GroupId::CQ,
        GroupId::P,
        GroupId::D,
        GroupId::QD,
        GroupId::CQD,
        GroupId::PD,
        GroupId::K0D,
        GroupId::K0CD,
    ];
    for g in groups {
        let gens = g.generators();
        let bad = (0..1000u64)
            .into_par_iter()
            .filter(|&s| {
                let mut rng = ChaCha8Rng::seed_from_u64(s);
                let len = rng.gen_range(0..=30);
                let m = CircuitWord::random_over(&mut rng, &gens, len).eval();
                factor(g, &m).map_or(true, |t| word_of(&t).eval() != m)
            })
            .count();
        if bad > 0 {
            failed.push(format!("{g}: {bad} word failures"));
        }
    }
    let detail = format!(
        "exhaustive Q 16, C 24, D 32768, P {}; random K0D/K0CD 10⁴ each; 10³ words × {} groups; failures {failed:?}",
        p_tuples.len(),
        groups.len()
    );
    (failed.is_empty(), detail)
}

fn normalizer() -> (bool, String) {
    let config = NormalizeConfig {
        debug_verify: false,
        ..Default::default()
    };
    let results: Vec<Result<(bool, bool, usize), String>> = (0..500u64)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let len = rng.gen_range(0..=40);
            let word = CircuitWord::random_base(&mut rng, len);
            let (nf, stats) = almost_normalize(&word, &config).map_err(|e| e.to_string())?;
            Ok((nf.eval() == word.eval(), stats.exhausted, stats.passes))
        })
        .collect();
    let errors = results.iter().filter(|r| r.is_err()).count();
    let ok: Vec<_> = results.into_iter().flatten().collect();
    let unsound = ok.iter().filter(|r| !r.0).count();
    let exhausted = ok.iter().filter(|r| r.1).count();
    let max_passes = ok.iter().map(|r| r.2).max().unwrap_or(0);
    let rels = builtin_relations(RelationSet::Presentation);
    let equiv: Vec<(bool, bool)> = rels
        .par_iter()
        .map(|r| match equiv_check(&r.lhs, &r.rhs) {
            Ok(rep) => (rep.verdict == Equivalence::Equal, rep.syntactic_match),
            Err(_) => (false, false),
        })
        .collect();
    let not_equal = equiv.iter().filter(|e| !e.0).count();
    let syntactic = equiv.iter().filter(|e| e.1).count();
    (
        errors == 0 && unsound == 0 && exhausted == 0 && not_equal == 0,
        format!(
            "500 words: errors {errors}, unsound {unsound}, cap hits {exhausted}, max passes {max_passes}; \
             {} relations: not equal {not_equal}, syntactic matches {syntactic}",
            rels.len()
        ),
    )
}

fn amalgam() -> (bool, String) {
    let rels = builtin_relations(RelationSet::Amalgam);
    let steps = rels.iter().filter(|r| r.family == "AMALGAM-STEP").count();
    let (ok, detail) = report(rels.len(), failures(&rels));
    let (x, y, z) = amalgam_generators();
    let xy_ok = x
        .iter()
        .chain(&y)
        .all(|g| is_member(GroupId::K0CD, g.matrix()));
    let yz_ok = y
        .iter()
        .chain(&z)
        .all(|g| is_member(GroupId::PD, g.matrix()));
    let xz: Vec<Gate> = x.iter().chain(&z).copied().collect();
    let xz_order = enumerate_generated(&xz, DEFAULT_BUDGET).map(|t| t.order());
    (
        ok && steps == 5 && xy_ok && yz_ok && xz_order.is_ok(),
        format!("{detail} ({steps} steps); X∪Y ⊂ K0CD {xy_ok}; Y∪Z ⊂ PD {yz_ok}; |⟨X∪Z⟩| = {xz_order:?}"),
    )
}

fn reidemeister_schreier() -> (bool, String) {
    let start = Instant::now();
    let (p, c) = z4_toy();
    let toy =
        rs_present(&p, &c).and_then(|k| brute_force_monoid(&k.simplified, 100).map(|t| (k, t)));
    // the even powers of a generator of Z4
    let oracle = (0..4)
        .map(|e| (2 * e) % 4)
        .collect::<std::collections::BTreeSet<u32>>()
        .len();
    let toy_ok =
        matches!(&toy, Ok((k, t)) if k.simplified.generators.len() == 1 && t.order() == oracle);
    let toy_time = start.elapsed();
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let u8 = level_kernel(8, 100, &mut rng);
    let u8_time = start.elapsed();
    let u8_ok = matches!(&u8, Ok(r) if r.schreier_generators == 128 && r.sampled == 100
        && r.sampled_failures.is_empty() && r.kernel_generators_ok && r.witnesses_ok);
    let summary = match &u8 {
        Ok(r) => format!(
            "U8: {} Schreier generators, {} raw relations, {} sampled, {} failures",
            r.schreier_generators,
            r.raw_relations,
            r.sampled,
            r.sampled_failures.len()
        ),
        Err(e) => format!("U8: {e}"),
    };
    (
        toy_ok && u8_ok && toy_time < Duration::from_secs(1) && u8_time < Duration::from_secs(600),
        format!(
            "Z4 kernel order {:?} vs oracle {oracle} in {:.3}s; {summary} in {:.1}s",
            toy.as_ref().map(|(_, t)| t.order()),
            toy_time.as_secs_f64(),
            u8_time.as_secs_f64()
        ),
    )
}

fn membership() -> (bool, String) {
    let gens_ok = BASE_GATES.iter().all(|g| is_clifford_cs_member(g.matrix()));
    let bad = (0..1000u64)
        .into_par_iter()
        .filter(|&s| {
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let len = rng.gen_range(0..=30);
            let m = CircuitWord::random_base(&mut rng, len).eval();
            let det = m.det();
            !(is_clifford_cs_member(&m) && (det.is_one() || (-det).is_one()))
        })
        .count();
    let level = LevelGen::I(0).matrix(8);
    let rejected = !is_clifford_cs_member(&level) && level.det() == DyadicGaussian::i();
    (
        gens_ok && bad == 0 && rejected,
        format!(
            "9 generators ok {gens_ok}; random words failing {bad}/1000; i_[0] rejected {rejected}"
        ),
    )
}
