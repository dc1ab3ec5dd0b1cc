//! Ring arithmetic against plain binary fractions `(p + q·i) / 2^e`.

use cliffordcs::ring::DyadicGaussian;
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
struct Frac {
    p: BigInt,
    q: BigInt,
    e: u32,
}

impl Frac {
    fn same(&self, other: &Frac) -> bool {
        let scale = |x: &BigInt, by: u32| x << by as usize;
        scale(&self.p, other.e) == scale(&other.p, self.e)
            && scale(&self.q, other.e) == scale(&other.q, self.e)
    }

    fn add(&self, o: &Frac) -> Frac {
        let e = self.e.max(o.e);
        Frac {
            p: (&self.p << (e - self.e) as usize) + (&o.p << (e - o.e) as usize),
            q: (&self.q << (e - self.e) as usize) + (&o.q << (e - o.e) as usize),
            e,
        }
    }

    fn mul(&self, o: &Frac) -> Frac {
        Frac {
            p: &self.p * &o.p - &self.q * &o.q,
            q: &self.p * &o.q + &self.q * &o.p,
            e: self.e + o.e,
        }
    }

    fn conj(&self) -> Frac {
        Frac {
            p: self.p.clone(),
            q: -&self.q,
            e: self.e,
        }
    }
}

fn random_pair(rng: &mut ChaCha8Rng) -> (DyadicGaussian, Frac) {
    let p: i64 = rng.gen_range(-1000..=1000);
    let q: i64 = rng.gen_range(-1000..=1000);
    let e: u32 = rng.gen_range(0..6);
    let half = DyadicGaussian::new(0, 1, 2);
    let mut x = DyadicGaussian::from_int(p) + DyadicGaussian::i() * DyadicGaussian::from_int(q);
    for _ in 0..e {
        x = x * half.clone();
    }
    (
        x,
        Frac {
            p: p.into(),
            q: q.into(),
            e,
        },
    )
}

fn frac_of(x: &DyadicGaussian) -> Frac {
    let (p, q, e) = x.to_binary_fraction();
    Frac { p, q, e }
}

#[test]
fn hundred_thousand_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100_000 {
        let (a, fa) = random_pair(&mut rng);
        let (b, fb) = random_pair(&mut rng);
        assert!(frac_of(&a).same(&fa));
        assert!(frac_of(&(&a + &b)).same(&fa.add(&fb)));
        assert!(frac_of(&(&a * &b)).same(&fa.mul(&fb)));
        assert!(frac_of(&(&a - &b)).same(&fa.add(&fb.mul(&Frac {
            p: (-1).into(),
            q: 0.into(),
            e: 0
        }))));
        assert!(frac_of(&a.conj()).same(&fa.conj()));
        assert!(frac_of(&a.norm_sqr()).same(&fa.mul(&fa.conj())));
    }
}

#[test]
fn canonical_forms_are_unique() {
    // equal values built along different routes compare equal
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let (a, _) = random_pair(&mut rng);
        let (b, _) = random_pair(&mut rng);
        assert_eq!(&(&a + &b) - &b, a);
        assert_eq!(&a * &DyadicGaussian::one(), a);
    }
}
