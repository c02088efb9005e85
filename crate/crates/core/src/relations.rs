//! Elementwise identities between the generator permutations, checked
//! exhaustively or on seeded samples of the parameter domain.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::named::{GroupName, Registry};
use crate::omega::Omega;
use crate::perm::Perm;

/// Domains above this size are sampled even in exhaustive mode.
pub const EXHAUSTIVE_CUTOFF: u64 = 10_000_000;
pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Sampled { n: usize, seed: u64 },
}

/// Kind of a single free parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Param {
    /// any field element
    Elem,
    /// a nonzero field element
    Unit,
    /// an exponent i of the Frobenius map, 0 ≤ i < r
    Frob,
}

type Checker = fn(&Ctx, &[u64]) -> Result<bool>;

pub struct RelationCase {
    pub id: &'static str,
    pub params: &'static [Param],
    /// Human-readable statement of what is compared.
    pub statement: &'static str,
    check: Checker,
    applies: fn(&Field) -> bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub lemma_id: String,
    pub statement: String,
    pub applicable: bool,
    /// "exhaustive" or "sampled(n, seed)"
    pub mode: String,
    pub domain_size: u64,
    pub cases_checked: u64,
    /// Failing tuples, smallest first, rendered as field-element strings.
    pub failures: Vec<Vec<u64>>,
    pub elapsed: Duration,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Evaluation context: field, Ω and the group registry for the cases that
/// compare cosets or subgroups.
pub struct Ctx<'a> {
    pub reg: &'a Registry,
}

impl<'a> Ctx<'a> {
    fn o(&self) -> &Omega {
        self.reg.omega()
    }
    fn f(&self) -> &Field {
        self.reg.omega().field()
    }
}

fn s(x: u64) -> Scalar {
    Scalar(x as u16)
}

fn always(_: &Field) -> bool {
    true
}

fn q_one_mod_four(f: &Field) -> bool {
    f.q() % 4 == 1
}

fn frob_pow(f: &Field, a: Scalar, i: u64) -> Scalar {
    (0..i).fold(a, |x, _| f.frobenius(x))
}

fn two_eps(f: &Field, x: Scalar) -> Scalar {
    let e = f.eps_pow(x);
    f.mul(e, e)
}

use Param::*;

pub fn cases() -> Vec<RelationCase> {
    vec![
        RelationCase {
            id: "A1.i",
            params: &[],
            statement: "alpha(0,0,0) = beta(1,1) = gamma(0) = tau(0) = 1",
            applies: always,
            check: |c, _| {
                let o = c.o();
                let z = Scalar::ZERO;
                let one = Scalar::ONE;
                Ok([o.alpha(z, z, z), o.beta(one, one), o.gamma(z), o.tau(z)].iter().all(Perm::is_identity))
            },
        },
        RelationCase {
            id: "A1.ii",
            params: &[Elem, Elem, Elem, Elem, Elem, Elem],
            statement: "alpha(x) alpha(y) = alpha(x+y), alpha(x)^-1 = alpha(-x)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let a1 = o.alpha(s(p[0]), s(p[1]), s(p[2]));
                let a2 = o.alpha(s(p[3]), s(p[4]), s(p[5]));
                let sum = o.alpha(f.add(s(p[0]), s(p[3])), f.add(s(p[1]), s(p[4])), f.add(s(p[2]), s(p[5])));
                let neg = o.alpha(f.neg(s(p[0])), f.neg(s(p[1])), f.neg(s(p[2])));
                Ok(a1.compose(&a2) == sum && a1.inverse() == neg)
            },
        },
        RelationCase {
            id: "A1.iii",
            params: &[Unit, Unit, Unit, Unit],
            statement: "beta(l1,m1) beta(l2,m2) = beta(l1 l2, m1 m2), beta(l,m)^-1 = beta(1/l, 1/m)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let b1 = o.beta(s(p[0]), s(p[1]));
                let b2 = o.beta(s(p[2]), s(p[3]));
                let prod = o.beta(f.mul(s(p[0]), s(p[2])), f.mul(s(p[1]), s(p[3])));
                let inv = o.beta(f.inv(s(p[0]))?, f.inv(s(p[1]))?);
                Ok(b1.compose(&b2) == prod && b1.inverse() == inv)
            },
        },
        RelationCase {
            id: "A1.iv",
            params: &[Elem, Elem],
            statement: "gamma(e1) gamma(e2) = gamma(e1+e2), gamma(e)^-1 = gamma(-e)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let g1 = o.gamma(s(p[0]));
                Ok(g1.compose(&o.gamma(s(p[1]))) == o.gamma(f.add(s(p[0]), s(p[1])))
                    && g1.inverse() == o.gamma(f.neg(s(p[0]))))
            },
        },
        RelationCase {
            id: "A1.v",
            params: &[],
            statement: "delta^-1 = delta beta(-1,-1), delta^2 = beta(-1,-1)",
            applies: always,
            check: |c, _| {
                let (o, f) = (c.o(), c.f());
                let m1 = f.neg(Scalar::ONE);
                let d = o.delta();
                let b = o.beta(m1, m1);
                Ok(d.inverse() == d.compose(&b) && d.compose(&d) == b)
            },
        },
        RelationCase {
            id: "A1.vi",
            params: &[Elem, Elem],
            statement: "tau(d1) tau(d2) = tau(d1+d2), tau(d)^-1 = tau(-d)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let t1 = o.tau(s(p[0]));
                Ok(t1.compose(&o.tau(s(p[1]))) == o.tau(f.add(s(p[0]), s(p[1])))
                    && t1.inverse() == o.tau(f.neg(s(p[0]))))
            },
        },
        RelationCase {
            id: "A2.i",
            params: &[Unit, Unit, Elem, Elem, Elem],
            statement: "beta(l,m)^-1 alpha(u,v,w) beta(l,m) = alpha(l u, m v, (l m)^(2 eps) w)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (l, m, u, v, w) = (s(p[0]), s(p[1]), s(p[2]), s(p[3]), s(p[4]));
                let lhs = o.alpha(u, v, w).conj(&o.beta(l, m));
                let rhs = o.alpha(f.mul(l, u), f.mul(m, v), f.mul(two_eps(f, f.mul(l, m)), w));
                Ok(lhs == rhs)
            },
        },
        RelationCase {
            id: "A2.ii",
            params: &[Unit, Unit, Elem],
            statement: "beta(l,m)^-1 gamma(e) beta(l,m) = gamma(l e / m)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (l, m, e) = (s(p[0]), s(p[1]), s(p[2]));
                Ok(o.gamma(e).conj(&o.beta(l, m)) == o.gamma(f.mul(f.mul(l, f.inv(m)?), e)))
            },
        },
        RelationCase {
            id: "A2.iii",
            params: &[Elem, Elem, Elem, Elem],
            statement: "gamma(e)^-1 alpha(u,v,w) gamma(e) = alpha(u + e v, v, w)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (e, u, v, w) = (s(p[0]), s(p[1]), s(p[2]), s(p[3]));
                Ok(o.alpha(u, v, w).conj(&o.gamma(e)) == o.alpha(f.add(u, f.mul(e, v)), v, w))
            },
        },
        RelationCase {
            id: "A2.iv",
            params: &[Elem, Elem, Elem],
            statement: "delta^-1 alpha(u,v,w) delta = alpha(v, -u, w)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (u, v, w) = (s(p[0]), s(p[1]), s(p[2]));
                Ok(o.alpha(u, v, w).conj(&o.delta()) == o.alpha(v, f.neg(u), w))
            },
        },
        RelationCase {
            id: "A2.v",
            params: &[Unit, Unit],
            statement: "delta^-1 beta(l,m) delta = beta(m,l), delta^-1 beta(m^2,m) delta = beta(1/m,m) beta(m^2,m)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (l, m) = (s(p[0]), s(p[1]));
                let d = o.delta();
                let first = o.beta(l, m).conj(&d) == o.beta(m, l);
                let m2 = f.mul(m, m);
                let second = o.beta(m2, m).conj(&d) == o.beta(f.inv(m)?, m).compose(&o.beta(m2, m));
                Ok(first && second)
            },
        },
        RelationCase {
            id: "A5.ii",
            params: &[Elem, Elem, Elem, Elem, Elem, Elem, Elem, Elem],
            statement: "[gamma(e1) alpha(u1,v1,w1), gamma(e2) alpha(u2,v2,w2)] = alpha(e2 v1 - e1 v2, 0, 0)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (e1, u1, v1, w1) = (s(p[0]), s(p[1]), s(p[2]), s(p[3]));
                let (e2, u2, v2, w2) = (s(p[4]), s(p[5]), s(p[6]), s(p[7]));
                let x = o.gamma(e1).compose(&o.alpha(u1, v1, w1));
                let y = o.gamma(e2).compose(&o.alpha(u2, v2, w2));
                let z = Scalar::ZERO;
                Ok(x.comm(&y) == o.alpha(f.sub(f.mul(e2, v1), f.mul(e1, v2)), z, z))
            },
        },
        RelationCase {
            id: "A6.i",
            params: &[Unit, Unit, Elem],
            statement: "beta(l,m)^-1 tau(d) beta(l,m) = tau(l m^-2 d)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (l, m, d) = (s(p[0]), s(p[1]), s(p[2]));
                let mi = f.inv(m)?;
                Ok(o.tau(d).conj(&o.beta(l, m)) == o.tau(f.mul(f.mul(l, f.mul(mi, mi)), d)))
            },
        },
        RelationCase {
            id: "A6.ii",
            params: &[Elem, Elem, Elem, Elem],
            statement: "tau(d)^-1 alpha(u,v,w) tau(d) = gamma(2 d v) alpha(u + d v^2 + d^eps w, v, w)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (d, u, v, w) = (s(p[0]), s(p[1]), s(p[2]), s(p[3]));
                let two = f.from_int(2);
                let a = f.add(f.add(u, f.mul(d, f.mul(v, v))), f.mul(f.eps_pow(d), w));
                let rhs = o.gamma(f.mul(two, f.mul(d, v))).compose(&o.alpha(a, v, w));
                Ok(o.alpha(u, v, w).conj(&o.tau(d)) == rhs)
            },
        },
        RelationCase {
            id: "A6.iii",
            params: &[Elem, Elem],
            statement: "tau(d)^-1 gamma(e) tau(d) = gamma(e)",
            applies: always,
            check: |c, p| {
                let o = c.o();
                let g = o.gamma(s(p[1]));
                Ok(g.conj(&o.tau(s(p[0]))) == g)
            },
        },
        RelationCase {
            id: "A7.i",
            params: &[Unit, Elem],
            statement: "[beta(m^2,m), tau(d)] = 1",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let m = s(p[0]);
                Ok(o.beta(f.mul(m, m), m).comm(&o.tau(s(p[1]))).is_identity())
            },
        },
        RelationCase {
            id: "A7.ii",
            params: &[Unit, Elem, Elem, Elem, Elem],
            statement: "beta(m^2,m)^-1 gamma(e) alpha(u,v,w) beta(m^2,m) = gamma(m e) alpha(m^2 u, m v, m^2 w)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (m, e, u, v, w) = (s(p[0]), s(p[1]), s(p[2]), s(p[3]), s(p[4]));
                let m2 = f.mul(m, m);
                let lhs = o.gamma(e).compose(&o.alpha(u, v, w)).conj(&o.beta(m2, m));
                let rhs = o.gamma(f.mul(m, e)).compose(&o.alpha(f.mul(m2, u), f.mul(m, v), f.mul(m2, w)));
                Ok(lhs == rhs)
            },
        },
        RelationCase {
            id: "A7.iii",
            params: &[Unit, Elem],
            statement: "beta(l,1/l)^-1 tau(d) beta(l,1/l) = tau(l^3 d)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (l, d) = (s(p[0]), s(p[1]));
                Ok(o.tau(d).conj(&o.beta(l, f.inv(l)?)) == o.tau(f.mul(f.powu(l, 3), d)))
            },
        },
        RelationCase {
            id: "A7.iv",
            params: &[Unit, Elem, Elem, Elem, Elem],
            statement: "beta(l,1/l)^-1 gamma(e) alpha(u,v,w) beta(l,1/l) = gamma(l^2 e) alpha(l u, v / l, w)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (l, e, u, v, w) = (s(p[0]), s(p[1]), s(p[2]), s(p[3]), s(p[4]));
                let li = f.inv(l)?;
                let lhs = o.gamma(e).compose(&o.alpha(u, v, w)).conj(&o.beta(l, li));
                let rhs = o.gamma(f.mul(f.mul(l, l), e)).compose(&o.alpha(f.mul(l, u), f.mul(li, v), w));
                Ok(lhs == rhs)
            },
        },
        RelationCase {
            id: "A9.vi",
            params: &[Elem, Elem],
            statement: "tau(d)^-1 Q_* tau(d) = Q_*, tau(d)^-1 Q_r tau(d) = Q_(2d+r)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (d, r) = (s(p[0]), s(p[1]));
                let t = o.tau(d);
                let qr = c.reg.get(&GroupName::Qr(r))?;
                let target = c.reg.get(&GroupName::Qr(f.add(f.mul(f.from_int(2), d), r)))?;
                let qs = c.reg.get(&GroupName::Qstar)?;
                let moved = qr.gens().iter().all(|x| target.contains(&x.conj(&t)));
                let star = qs.gens().iter().all(|x| qs.contains(&x.conj(&t)));
                Ok(moved && star && qr.order() == target.order())
            },
        },
        RelationCase {
            id: "A10.i",
            params: &[Elem, Elem, Elem],
            statement: "sigma^-1 alpha(u,v,w) sigma = alpha(u^3, v^3, w^3)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (u, v, w) = (s(p[0]), s(p[1]), s(p[2]));
                Ok(o.alpha(u, v, w).conj(&o.sigma()) == o.alpha(f.frobenius(u), f.frobenius(v), f.frobenius(w)))
            },
        },
        RelationCase {
            id: "A10.ii",
            params: &[Unit, Unit],
            statement: "sigma^-1 beta(l,m) sigma = beta(l^3, m^3)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (l, m) = (s(p[0]), s(p[1]));
                Ok(o.beta(l, m).conj(&o.sigma()) == o.beta(f.frobenius(l), f.frobenius(m)))
            },
        },
        RelationCase {
            id: "A10.iii",
            params: &[Elem],
            statement: "sigma^-1 gamma(e) sigma = gamma(e^3)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                Ok(o.gamma(s(p[0])).conj(&o.sigma()) == o.gamma(f.frobenius(s(p[0]))))
            },
        },
        RelationCase {
            id: "A10.iv",
            params: &[],
            statement: "sigma^-1 delta sigma = delta",
            applies: always,
            check: |c, _| {
                let o = c.o();
                Ok(o.delta().conj(&o.sigma()) == o.delta())
            },
        },
        RelationCase {
            id: "A10.v",
            params: &[Elem],
            statement: "sigma^-1 tau(d) sigma = tau(d^3)",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                Ok(o.tau(s(p[0])).conj(&o.sigma()) == o.tau(f.frobenius(s(p[0]))))
            },
        },
        RelationCase {
            id: "B2.iii",
            params: &[Elem, Unit, Frob],
            statement: "alpha(0,0,f) beta(m^2,m) sigma^i maps block c to ((c+f) m^2)^(3^i); \
                        it fixes every block iff f = 0, i = 0, m = +-1",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (fv, m, i) = (s(p[0]), s(p[1]), p[2]);
                let z = Scalar::ZERO;
                let g = o.alpha(z, z, fv).compose(&o.beta(f.mul(m, m), m)).compose(&o.sigma().pow(i as i64));
                let Some(blocks) = o.block_action(&g) else {
                    return Ok(false);
                };
                let m2 = f.mul(m, m);
                let map_ok = f.elements().all(|cv| {
                    let expect = frob_pow(f, f.mul(f.add(cv, fv), m2), i);
                    blocks.apply(cv.0) == expect.0
                });
                let trivial = blocks.is_identity();
                let claim = fv.is_zero() && i == 0 && (m == Scalar::ONE || m == f.neg(Scalar::ONE));
                Ok(map_ok && trivial == claim)
            },
        },
        RelationCase {
            id: "B4.iii.order",
            params: &[],
            statement: "theta has order q-1",
            applies: q_one_mod_four,
            check: |c, _| Ok(c.o().theta()?.order() == c.f().q() as u128 - 1),
        },
        RelationCase {
            id: "B4.iii.power",
            params: &[],
            statement: "theta^((q-1)/2) = beta(1,-1)",
            applies: q_one_mod_four,
            check: |c, _| {
                let (o, f) = (c.o(), c.f());
                let th = o.theta()?;
                Ok(th.pow((f.q() as i64 - 1) / 2) == o.beta(Scalar::ONE, f.neg(Scalar::ONE)))
            },
        },
        RelationCase {
            id: "B4.iii.cycles",
            params: &[],
            statement: "on each block theta has q cycles of length q-1 and m cycles of length 2^l, q-1 = 2^l m",
            applies: q_one_mod_four,
            check: |c, _| {
                let o = c.o();
                let q = o.q();
                let (l, m) = o.two_adic();
                let th = o.theta()?;
                for b in 0..q {
                    let Some(r) = o.restrict_to_block(&th, b) else {
                        return Ok(false);
                    };
                    let mut ct = r.cycle_type();
                    ct.sort_unstable();
                    let mut expect = vec![1usize];
                    expect.extend(std::iter::repeat(1usize << l).take(m as usize));
                    expect.extend(std::iter::repeat(q - 1).take(q));
                    expect.sort_unstable();
                    if ct != expect {
                        return Ok(false);
                    }
                }
                Ok(true)
            },
        },
        RelationCase {
            id: "B4.iii.parity",
            params: &[],
            statement: "theta is even on every block",
            applies: q_one_mod_four,
            check: |c, _| {
                let o = c.o();
                let th = o.theta()?;
                Ok((0..o.q()).all(|b| o.restrict_to_block(&th, b).is_some_and(|r| r.sign() == 1)))
            },
        },
        RelationCase {
            id: "B4.iii.commute",
            params: &[],
            statement: "theta commutes with beta(zeta^2, zeta)",
            applies: q_one_mod_four,
            check: |c, _| {
                let (o, f) = (c.o(), c.f());
                let z = f.primitive_root();
                let b = o.beta(f.mul(z, z), z);
                let th = o.theta()?;
                Ok(th.compose(&b) == b.compose(&th))
            },
        },
        RelationCase {
            id: "B4.iii.normalizes_F",
            params: &[Elem],
            statement: "theta^-1 alpha(0,0,w) theta lies in F",
            applies: q_one_mod_four,
            check: |c, p| {
                let o = c.o();
                let z = Scalar::ZERO;
                let x = o.alpha(z, z, s(p[0])).conj(&o.theta()?);
                Ok(c.reg.get(&GroupName::F)?.contains(&x))
            },
        },
        RelationCase {
            id: "D4.y",
            params: &[Unit, Unit, Frob],
            statement: "G2 delta gamma(c) . beta(m^2,m) sigma^i = G2 delta gamma((c m)^(3^i))",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (cv, m, i) = (s(p[0]), s(p[1]), p[2]);
                let j = o.beta(f.mul(m, m), m).compose(&o.sigma().pow(i as i64));
                let lhs = o.delta().compose(&o.gamma(cv)).compose(&j);
                let rhs = o.delta().compose(&o.gamma(frob_pow(f, f.mul(cv, m), i)));
                Ok(c.reg.get(&GroupName::G2)?.contains(&lhs.compose(&rhs.inverse())))
            },
        },
        RelationCase {
            id: "D4.u",
            params: &[Unit, Unit, Frob],
            statement: "G1 tau(d) delta . beta(m^2,m) sigma^i = G1 tau((d m^-3)^(3^i)) delta",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (d, m, i) = (s(p[0]), s(p[1]), p[2]);
                let j = o.beta(f.mul(m, m), m).compose(&o.sigma().pow(i as i64));
                let lhs = o.tau(d).compose(&o.delta()).compose(&j);
                let label = frob_pow(f, f.mul(d, f.inv(f.powu(m, 3))?), i);
                let rhs = o.tau(label).compose(&o.delta());
                Ok(c.reg.get(&GroupName::G1)?.contains(&lhs.compose(&rhs.inverse())))
            },
        },
        RelationCase {
            id: "D4.phi",
            params: &[Unit, Unit, Frob],
            statement: "y_l -> u_(l^-3) commutes with beta(m^2,m) sigma^i",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (l, m, i) = (s(p[0]), s(p[1]), p[2]);
                let j = o.beta(f.mul(m, m), m).compose(&o.sigma().pow(i as i64));
                let (g1, g2) = (c.reg.get(&GroupName::G1)?, c.reg.get(&GroupName::G2)?);
                let phi = |x: Scalar| -> Result<Scalar> { f.inv(f.powu(x, 3)) };
                // y_l j = y_l' forces u_phi(l) j = u_phi(l')
                let l2 = frob_pow(f, f.mul(l, m), i);
                let y_lhs = o.delta().compose(&o.gamma(l)).compose(&j);
                let y_rhs = o.delta().compose(&o.gamma(l2));
                let u_lhs = o.tau(phi(l)?).compose(&o.delta()).compose(&j);
                let u_rhs = o.tau(phi(l2)?).compose(&o.delta());
                Ok(g2.contains(&y_lhs.compose(&y_rhs.inverse())) && g1.contains(&u_lhs.compose(&u_rhs.inverse())))
            },
        },
        RelationCase {
            id: "D4.centralizer",
            params: &[Unit, Frob],
            statement: "beta(m^2,m) sigma^i centralizes gamma(1) iff m = 1",
            applies: always,
            check: |c, p| {
                let (o, f) = (c.o(), c.f());
                let (m, i) = (s(p[0]), p[1]);
                let j = o.beta(f.mul(m, m), m).compose(&o.sigma().pow(i as i64));
                let g = o.gamma(Scalar::ONE);
                Ok((g.compose(&j) == j.compose(&g)) == (m == Scalar::ONE))
            },
        },
    ]
}

/// Clause prefixes covered by the relation suite.
pub const CLAUSES: &[&str] = &["A1", "A2", "A5", "A6", "A7", "A9", "A10", "B2", "B4", "D4"];

fn domain_of(f: &Field, p: Param) -> u64 {
    match p {
        Elem => f.q() as u64,
        Unit => f.q() as u64 - 1,
        Frob => f.r() as u64,
    }
}

fn decode_index(f: &Field, params: &[Param], mut idx: u64) -> Vec<u64> {
    let mut out = vec![0; params.len()];
    for k in (0..params.len()).rev() {
        let size = domain_of(f, params[k]);
        let x = idx % size;
        idx /= size;
        out[k] = if params[k] == Unit { x + 1 } else { x };
    }
    out
}

/// All-zero, all-one and single basis-element tuples, with 1 standing in
/// for 0 on nonzero parameters.
fn structured(f: &Field, params: &[Param]) -> Vec<Vec<u64>> {
    let base: Vec<u64> = params.iter().map(|p| if *p == Unit { 1 } else { 0 }).collect();
    let mut out = vec![base.clone(), params.iter().map(|p| if *p == Frob { 0 } else { 1 }).collect()];
    for (k, p) in params.iter().enumerate() {
        match p {
            Frob => {
                for i in 1..f.r() as u64 {
                    let mut t = base.clone();
                    t[k] = i;
                    out.push(t);
                }
            }
            _ => {
                for b in f.basis() {
                    let mut t = base.clone();
                    t[k] = b.0 as u64;
                    out.push(t);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn case_seed(seed: u64, id: &str) -> u64 {
    let h = Sha256::digest(id.as_bytes());
    seed ^ u64::from_le_bytes(h[..8].try_into().unwrap())
}

/// Runs one case in the requested mode.
pub fn run_case(case: &RelationCase, reg: &Registry, mode: Mode) -> Result<RelationReport> {
    let f = reg.omega().field();
    let ctx = Ctx { reg };
    let start = Instant::now();
    let domain: u64 = case.params.iter().map(|&p| domain_of(f, p)).product();
    let mut report = RelationReport {
        lemma_id: case.id.to_string(),
        statement: case.statement.to_string(),
        applicable: (case.applies)(f),
        mode: String::new(),
        domain_size: domain,
        cases_checked: 0,
        failures: Vec::new(),
        elapsed: Duration::ZERO,
    };
    if !report.applicable {
        report.mode = "not applicable".into();
        return Ok(report);
    }
    let (n, seed, exhaustive) = match mode {
        Mode::Exhaustive => (DEFAULT_SAMPLES, 0, domain <= EXHAUSTIVE_CUTOFF),
        Mode::Sampled { n, seed } => (n, seed, domain <= n as u64),
    };
    if exhaustive {
        report.mode = "exhaustive".into();
        for idx in 0..domain {
            let t = decode_index(f, case.params, idx);
            if !(case.check)(&ctx, &t)? {
                report.failures.push(t);
            }
            report.cases_checked += 1;
        }
    } else {
        report.mode = format!("sampled({n}, {seed})");
        let mut tuples = structured(f, case.params);
        let mut rng = ChaCha8Rng::seed_from_u64(case_seed(seed, case.id));
        for _ in 0..n {
            tuples.push(decode_index(f, case.params, rng.gen_range(0..domain)));
        }
        for t in &tuples {
            if !(case.check)(&ctx, t)? {
                report.failures.push(t.clone());
            }
            report.cases_checked += 1;
        }
        report.failures.sort();
        report.failures.dedup();
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

/// Runs the case with this id, or every case whose id starts with `id.`.
pub fn check(id: &str, reg: &Registry, mode: Mode) -> Result<Vec<RelationReport>> {
    let all = cases();
    let picked: Vec<&RelationCase> = all.iter().filter(|c| c.id == id || c.id.starts_with(&format!("{id}."))).collect();
    if picked.is_empty() {
        return Err(Error::UnknownLemma(id.to_string()));
    }
    picked.into_iter().map(|c| run_case(c, reg, mode)).collect()
}

pub fn check_all(reg: &Registry, mode: Mode) -> Result<Vec<RelationReport>> {
    cases().iter().map(|c| run_case(c, reg, mode)).collect()
}

/// Hash of the report contents, timings excluded.
pub fn report_hash(reports: &[RelationReport]) -> String {
    let mut h = Sha256::new();
    for r in reports {
        h.update(format!(
            "{}|{}|{}|{}|{}|{:?}\n",
            r.lemma_id, r.applicable, r.mode, r.domain_size, r.cases_checked, r.failures
        ));
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
