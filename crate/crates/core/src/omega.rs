//! The point set Ω = F_q³ and the generating permutations on it.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::perm::{Perm, Point};

/// A point (a, b, c) of Ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OmegaPoint {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
}

/// Parameterised generator families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GenSpec {
    /// (a,b,c) ↦ (a+u, b+v, c+w)
    Alpha(Scalar, Scalar, Scalar),
    /// (a,b,c) ↦ (λa, μb, (λμ)^{2ε}c)
    Beta(Scalar, Scalar),
    /// (a,b,c) ↦ (a+eb, b, c)
    Gamma(Scalar),
    /// (a,b,c) ↦ (b, −a, c)
    Delta,
    /// (a,b,c) ↦ (a+db²+d^ε c, b, c)
    Tau(Scalar),
    /// cube every coordinate
    Sigma,
    /// (ζ²a, ζb, c) when b ≠ 0, (ζ^m a, 0, c) when b = 0, where q−1 = 2^l·m
    Theta,
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenSpec::Alpha(u, v, w) => write!(f, "alpha({},{},{})", u.0, v.0, w.0),
            GenSpec::Beta(l, m) => write!(f, "beta({},{})", l.0, m.0),
            GenSpec::Gamma(e) => write!(f, "gamma({})", e.0),
            GenSpec::Delta => write!(f, "delta"),
            GenSpec::Tau(d) => write!(f, "tau({})", d.0),
            GenSpec::Sigma => write!(f, "sigma"),
            GenSpec::Theta => write!(f, "theta"),
        }
    }
}

/// Ω over a fixed field, with point encoding idx = a + q·b + q²·c.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Omega {
    field: Field,
}

impl Omega {
    pub fn new(field: Field) -> Omega {
        Omega { field }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> usize {
        self.field.q()
    }

    /// |Ω| = q³.
    pub fn degree(&self) -> usize {
        self.q().pow(3)
    }

    #[inline]
    pub fn encode(&self, p: OmegaPoint) -> Point {
        let q = self.q();
        (p.a.index() + q * p.b.index() + q * q * p.c.index()) as Point
    }

    #[inline]
    pub fn decode(&self, idx: Point) -> OmegaPoint {
        let q = self.q();
        let i = idx as usize;
        OmegaPoint { a: Scalar((i % q) as u16), b: Scalar(((i / q) % q) as u16), c: Scalar((i / (q * q)) as u16) }
    }

    pub fn point(&self, a: Scalar, b: Scalar, c: Scalar) -> Point {
        self.encode(OmegaPoint { a, b, c })
    }

    /// Label c of the block Ω_c containing the point.
    #[inline]
    pub fn block_of(&self, idx: Point) -> usize {
        idx as usize / (self.q() * self.q())
    }

    fn from_fn(&self, f: impl Fn(OmegaPoint) -> OmegaPoint) -> Perm {
        let images = (0..self.degree() as u32).map(|i| self.encode(f(self.decode(i as Point)))).collect();
        Perm::from_images_unchecked(images)
    }

    /// Decomposition q−1 = 2^l·m with m odd.
    pub fn two_adic(&self) -> (u32, u64) {
        let mut m = self.q() as u64 - 1;
        let mut l = 0;
        while m % 2 == 0 {
            m /= 2;
            l += 1;
        }
        (l, m)
    }

    pub fn perm(&self, g: &GenSpec) -> Result<Perm> {
        let f = &self.field;
        Ok(match *g {
            GenSpec::Alpha(u, v, w) => {
                self.from_fn(|p| OmegaPoint { a: f.add(p.a, u), b: f.add(p.b, v), c: f.add(p.c, w) })
            }
            GenSpec::Beta(l, m) => {
                if l.is_zero() || m.is_zero() {
                    return Err(Error::InvalidGenSpec(format!("{g} needs nonzero parameters")));
                }
                let k = f.powu(f.mul(l, m), 2 * f.epsilon() as u64);
                self.from_fn(|p| OmegaPoint { a: f.mul(l, p.a), b: f.mul(m, p.b), c: f.mul(k, p.c) })
            }
            GenSpec::Gamma(e) => self.from_fn(|p| OmegaPoint { a: f.add(p.a, f.mul(e, p.b)), ..p }),
            GenSpec::Delta => self.from_fn(|p| OmegaPoint { a: p.b, b: f.neg(p.a), c: p.c }),
            GenSpec::Tau(d) => {
                let de = f.eps_pow(d);
                self.from_fn(|p| {
                    let b2 = f.mul(p.b, p.b);
                    let a = f.add(f.add(p.a, f.mul(d, b2)), f.mul(de, p.c));
                    OmegaPoint { a, ..p }
                })
            }
            GenSpec::Sigma => {
                self.from_fn(|p| OmegaPoint { a: f.frobenius(p.a), b: f.frobenius(p.b), c: f.frobenius(p.c) })
            }
            GenSpec::Theta => {
                if self.q() % 4 != 1 {
                    return Err(Error::InvalidGenSpec(format!("theta needs q ≡ 1 mod 4, got q = {}", self.q())));
                }
                let z = f.primitive_root();
                let (_, m) = self.two_adic();
                let z2 = f.mul(z, z);
                let zm = f.powu(z, m);
                self.from_fn(|p| {
                    if p.b.is_zero() {
                        OmegaPoint { a: f.mul(zm, p.a), ..p }
                    } else {
                        OmegaPoint { a: f.mul(z2, p.a), b: f.mul(z, p.b), c: p.c }
                    }
                })
            }
        })
    }

    pub fn alpha(&self, u: Scalar, v: Scalar, w: Scalar) -> Perm {
        self.perm(&GenSpec::Alpha(u, v, w)).unwrap()
    }

    /// Panics on a zero parameter; use [`Omega::perm`] for checked construction.
    pub fn beta(&self, l: Scalar, m: Scalar) -> Perm {
        self.perm(&GenSpec::Beta(l, m)).expect("beta parameters must be nonzero")
    }

    pub fn gamma(&self, e: Scalar) -> Perm {
        self.perm(&GenSpec::Gamma(e)).unwrap()
    }

    pub fn delta(&self) -> Perm {
        self.perm(&GenSpec::Delta).unwrap()
    }

    pub fn tau(&self, d: Scalar) -> Perm {
        self.perm(&GenSpec::Tau(d)).unwrap()
    }

    pub fn sigma(&self) -> Perm {
        self.perm(&GenSpec::Sigma).unwrap()
    }

    pub fn theta(&self) -> Result<Perm> {
        self.perm(&GenSpec::Theta)
    }

    /// Permutation induced on block labels by an element preserving the block system.
    pub fn block_action(&self, g: &Perm) -> Option<Perm> {
        let q = self.q();
        let bs = q * q;
        let mut img = vec![0u16; q];
        for c in 0..q {
            let target = self.block_of(g.apply((c * bs) as Point));
            for i in 0..bs {
                if self.block_of(g.apply((c * bs + i) as Point)) != target {
                    return None;
                }
            }
            img[c] = target as u16;
        }
        Perm::from_images(img).ok()
    }

    /// Restriction to the block Ω_c, renumbered to `[0, q²)`; `None` if the block moves.
    pub fn restrict_to_block(&self, g: &Perm, c: usize) -> Option<Perm> {
        let bs = self.q() * self.q();
        let off = c * bs;
        let mut img = Vec::with_capacity(bs);
        for i in 0..bs {
            let x = g.apply((off + i) as Point) as usize;
            if x < off || x >= off + bs {
                return None;
            }
            img.push((x - off) as u16);
        }
        Some(Perm::from_images_unchecked(img))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn om(r: u32) -> Omega {
        Omega::new(Field::new(r, None).unwrap())
    }

    #[test]
    fn encode_round_trip() {
        for r in 1..=2 {
            let o = om(r);
            for i in 0..o.degree() {
                let p = o.decode(i as Point);
                assert_eq!(o.encode(p) as usize, i);
            }
        }
    }

    #[test]
    fn every_generator_is_a_bijection() {
        for r in 1..=2 {
            let o = om(r);
            let f = o.field().clone();
            let mut specs = vec![GenSpec::Delta, GenSpec::Sigma];
            for a in f.elements() {
                specs.push(GenSpec::Gamma(a));
                specs.push(GenSpec::Tau(a));
                for b in f.elements() {
                    specs.push(GenSpec::Alpha(a, b, Scalar(1)));
                    if !a.is_zero() && !b.is_zero() {
                        specs.push(GenSpec::Beta(a, b));
                    }
                }
            }
            if o.q() % 4 == 1 {
                specs.push(GenSpec::Theta);
            }
            for s in specs {
                let g = o.perm(&s).unwrap();
                assert!(Perm::from_images(g.images().to_vec()).is_ok(), "{s}");
            }
        }
    }

    #[test]
    fn generator_examples() {
        let o = om(1);
        let (z, one, two) = (Scalar(0), Scalar(1), Scalar(2));
        let a = o.alpha(one, z, z);
        assert_eq!(a.apply(o.point(z, z, z)), o.point(one, z, z));
        // τ_1(1,1,1) = (1+1+1, 1, 1) = (0,1,1)
        assert_eq!(o.tau(one).apply(o.point(one, one, one)), o.point(z, one, one));
        assert!(o.alpha(z, z, z).is_identity());
        assert!(o.beta(one, one).is_identity());
        assert!(o.gamma(z).is_identity());
        assert!(o.tau(z).is_identity());
        assert_eq!(o.delta().order(), 4);
        assert_eq!(&o.delta() * &o.delta(), o.beta(two, two));
        // δ⁻¹α(1,0,0)δ = α(0,−1,0)
        assert_eq!(a.conj(&o.delta()), o.alpha(z, two, z));
        // β_{1,−1}: three 2-cycles in each of the three blocks
        let b = o.beta(one, two);
        assert_eq!(b.cycle_type().iter().filter(|&&l| l == 2).count(), 9);
        assert_eq!(b.sign(), -1);
        assert!(matches!(o.perm(&GenSpec::Beta(z, one)), Err(Error::InvalidGenSpec(_))));
        assert!(matches!(o.theta(), Err(Error::InvalidGenSpec(_))));
    }

    #[test]
    fn theta_at_nine() {
        let o = om(2);
        let t = o.theta().unwrap();
        assert_eq!(t.order(), 8);
        assert_eq!(t.sign(), 1);
    }

    #[test]
    fn alpha_is_even_and_sigma_conjugates_alpha() {
        for r in 1..=2 {
            let o = om(r);
            let f = o.field().clone();
            let s = o.sigma();
            for u in f.elements() {
                for v in f.elements() {
                    let w = f.add(u, v);
                    let a = o.alpha(u, v, w);
                    assert_eq!(a.sign(), 1);
                    let img = o.alpha(f.frobenius(u), f.frobenius(v), f.frobenius(w));
                    assert_eq!(a.conj(&s), img);
                }
            }
        }
    }

    #[test]
    fn block_helpers() {
        let o = om(1);
        let one = Scalar(1);
        let z = Scalar(0);
        let ba = o.block_action(&o.alpha(z, z, one)).unwrap();
        assert_eq!(ba.images(), &[1, 2, 0]);
        assert!(o.block_action(&o.alpha(one, one, z)).unwrap().is_identity());
        assert!(o.restrict_to_block(&o.alpha(z, z, one), 0).is_none());
        let r = o.restrict_to_block(&o.delta(), 2).unwrap();
        assert_eq!(r.degree(), 9);
    }
}
