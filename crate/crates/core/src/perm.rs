//! Dense permutations of `[0, n)`, applied left to right: in `g * h` the
//! permutation `g` acts first.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Mul;
use std::sync::OnceLock;

use crate::error::{Error, Result};

pub type Point = u16;

/// A permutation stored as its image array, with a lazily cached sign.
pub struct Perm {
    images: Vec<Point>,
    sign: OnceLock<i8>,
}

impl Clone for Perm {
    fn clone(&self) -> Self {
        let sign = OnceLock::new();
        if let Some(&s) = self.sign.get() {
            let _ = sign.set(s);
        }
        Perm { images: self.images.clone(), sign }
    }
}

impl PartialEq for Perm {
    fn eq(&self, other: &Self) -> bool {
        self.images == other.images
    }
}
impl Eq for Perm {}

impl Hash for Perm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.images.hash(state)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "()");
        }
        for cyc in self.cycles() {
            if cyc.len() > 1 {
                write!(f, "(")?;
                for (i, p) in cyc.iter().enumerate() {
                    if i > 0 {
                        write!(f, " ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")?;
            }
        }
        Ok(())
    }
}

impl Perm {
    pub fn identity(n: usize) -> Perm {
        assert!(n <= 1 << 16, "degree {n} does not fit 16-bit points");
        Perm::from_images_unchecked((0..n).map(|i| i as Point).collect())
    }

    /// Validates that `images` is a bijection.
    pub fn from_images(images: Vec<Point>) -> Result<Perm> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &p in &images {
            let p = p as usize;
            if p >= n || seen[p] {
                return Err(Error::InvalidGenSpec(format!("image array is not a bijection at {p}")));
            }
            seen[p] = true;
        }
        Ok(Perm::from_images_unchecked(images))
    }

    pub(crate) fn from_images_unchecked(images: Vec<Point>) -> Perm {
        Perm { images, sign: OnceLock::new() }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn images(&self) -> &[Point] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, p: Point) -> Point {
        self.images[p as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i == p as usize)
    }

    /// First point moved, if any.
    pub fn first_moved(&self) -> Option<Point> {
        self.images.iter().enumerate().find(|(i, &p)| *i != p as usize).map(|(i, _)| i as Point)
    }

    /// `self` then `other`.
    pub fn compose(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Perm::from_images_unchecked(self.images.iter().map(|&p| other.images[p as usize]).collect())
    }

    pub fn try_compose(&self, other: &Perm) -> Result<Perm> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch(self.degree(), other.degree()));
        }
        Ok(self.compose(other))
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0 as Point; self.degree()];
        for (i, &p) in self.images.iter().enumerate() {
            inv[p as usize] = i as Point;
        }
        let out = Perm::from_images_unchecked(inv);
        if let Some(&s) = self.sign.get() {
            let _ = out.sign.set(s);
        }
        out
    }

    /// `h⁻¹ self h`.
    pub fn conj(&self, h: &Perm) -> Perm {
        assert_eq!(self.degree(), h.degree(), "degree mismatch");
        // (h⁻¹ g h)(h(p)) = h(g(p))
        let mut out = vec![0 as Point; self.degree()];
        for (p, &gp) in self.images.iter().enumerate() {
            out[h.images[p] as usize] = h.images[gp as usize];
        }
        Perm::from_images_unchecked(out)
    }

    /// `self⁻¹ h⁻¹ self h`.
    pub fn comm(&self, h: &Perm) -> Perm {
        self.inverse().compose(&self.conj(h))
    }

    pub fn pow(&self, e: i64) -> Perm {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Perm::identity(self.degree());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose(&sq);
            }
        }
        acc
    }

    pub fn cycles(&self) -> Vec<Vec<Point>> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut p = s;
            while !seen[p] {
                seen[p] = true;
                cyc.push(p as Point);
                p = self.images[p] as usize;
            }
            out.push(cyc);
        }
        out
    }

    /// Sorted cycle lengths, fixed points included.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.cycles().iter().map(|c| c.len()).collect();
        t.sort_unstable();
        t
    }

    /// +1 for even, −1 for odd.
    pub fn sign(&self) -> i8 {
        *self.sign.get_or_init(|| {
            let n = self.degree();
            let cycles = self.cycles().len();
            if (n - cycles) % 2 == 0 {
                1
            } else {
                -1
            }
        })
    }

    /// Least n ≥ 1 with selfⁿ = 1.
    pub fn order(&self) -> u128 {
        let mut acc: u128 = 1;
        for c in self.cycles() {
            let l = c.len() as u128;
            acc = acc / gcd128(acc, l) * l;
        }
        acc
    }

    /// Restriction to `[0, m)`; the caller guarantees that range is invariant.
    pub fn truncate(&self, m: usize) -> Perm {
        Perm::from_images_unchecked(self.images[..m].to_vec())
    }

    /// Length-prefixed little-endian encoding.
    pub fn to_bytes(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.degree() as u32).to_le_bytes());
        for &p in &self.images {
            out.extend_from_slice(&p.to_le_bytes());
        }
    }

    /// Inverse of [`Perm::to_bytes`]; returns the permutation and bytes consumed.
    pub fn from_bytes(buf: &[u8]) -> Result<(Perm, usize)> {
        let bad = || Error::Cache("truncated permutation record".into());
        let n = u32::from_le_bytes(buf.get(..4).ok_or_else(bad)?.try_into().unwrap()) as usize;
        let body = buf.get(4..4 + 2 * n).ok_or_else(bad)?;
        let images = body.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect();
        Ok((Perm::from_images(images)?, 4 + 2 * n))
    }
}

impl Mul for &Perm {
    type Output = Perm;
    fn mul(self, rhs: &Perm) -> Perm {
        self.compose(rhs)
    }
}

fn gcd128(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd128(b, a % b)
    }
}
