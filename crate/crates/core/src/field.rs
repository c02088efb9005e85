//! Arithmetic in F_q with q = 3^r.
//!
//! Elements are stored as a packed base-3 index: the coefficient of t^i is
//! the i-th ternary digit. All operations go through tables built once per
//! field, so a `Field` is cheap to clone and share.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest degree accepted with an explicit modulus.
pub const MAX_DEGREE: u32 = 6;

/// An element of F_q, as its packed ternary index in `[0, q)`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(pub u16);

impl Scalar {
    pub const ZERO: Scalar = Scalar(0);
    pub const ONE: Scalar = Scalar(1);

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

struct Tables {
    r: u32,
    q: usize,
    epsilon: u32,
    modulus: Vec<u8>,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    // log/exp relative to the primitive root
    log: Vec<u32>,
    exp: Vec<u16>,
    zeta: u16,
}

/// The field F_{3^r} with a fixed modulus. Cloning shares the tables.
#[derive(Clone)]
pub struct Field(Arc<Tables>);

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}[{}]", self.q(), self.modulus_string())
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.modulus == other.0.modulus
    }
}
impl Eq for Field {}

fn default_modulus(r: u32) -> Option<Vec<u8>> {
    // little-endian coefficients, monic
    match r {
        1 => Some(vec![0, 1]),
        2 => Some(vec![1, 0, 1]),
        3 => Some(vec![1, 2, 0, 1]),
        _ => None,
    }
}

fn poly_trim(p: &mut Vec<u8>) {
    while p.len() > 1 && *p.last().unwrap() == 0 {
        p.pop();
    }
}

/// Remainder of `a` modulo the monic polynomial `m` over F3.
fn poly_rem(a: &[u8], m: &[u8]) -> Vec<u8> {
    let mut a = a.to_vec();
    let dm = m.len() - 1;
    while a.len() > dm && a.len() > 1 {
        let lead = *a.last().unwrap();
        let shift = a.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                a[shift + i] = (a[shift + i] + 3 - (lead * c) % 3) % 3;
            }
        }
        a.pop();
    }
    poly_trim(&mut a);
    a
}

/// Trial division by every monic polynomial of degree 1..=deg/2.
pub fn is_irreducible(modulus: &[u8]) -> bool {
    let deg = modulus.len() - 1;
    for d in 1..=deg / 2 {
        let count = 3usize.pow(d as u32);
        for low in 0..count {
            let mut f = Vec::with_capacity(d + 1);
            let mut x = low;
            for _ in 0..d {
                f.push((x % 3) as u8);
                x /= 3;
            }
            f.push(1);
            let rem = poly_rem(modulus, &f);
            if rem.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl Field {
    /// Builds F_{3^r}, using the default modulus when none is given.
    pub fn new(r: u32, modulus: Option<&[u8]>) -> Result<Field> {
        if r == 0 {
            return Err(Error::UnsupportedDegree(r));
        }
        let modulus = match modulus {
            Some(m) => m.to_vec(),
            None => default_modulus(r).ok_or(Error::UnsupportedDegree(r))?,
        };
        if r > MAX_DEGREE {
            return Err(Error::UnsupportedDegree(r));
        }
        if modulus.len() != r as usize + 1 || *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c > 2) {
            return Err(Error::MalformedModulus(modulus));
        }
        if !is_irreducible(&modulus) {
            return Err(Error::ReducibleModulus(modulus));
        }
        Ok(Field(Arc::new(Self::build_tables(r, modulus))))
    }

    /// Field with q elements and the default modulus.
    pub fn with_order(q: u64) -> Result<Field> {
        let mut r = 0u32;
        let mut x = q;
        while x > 1 && x % 3 == 0 {
            x /= 3;
            r += 1;
        }
        if x != 1 || r == 0 {
            return Err(Error::InvalidParameter(format!("q = {q} is not a power of 3")));
        }
        Field::new(r, None)
    }

    fn build_tables(r: u32, modulus: Vec<u8>) -> Tables {
        let q = 3usize.pow(r);
        let digits = |x: usize| -> Vec<u8> {
            let mut v = Vec::with_capacity(r as usize);
            let mut x = x;
            for _ in 0..r {
                v.push((x % 3) as u8);
                x /= 3;
            }
            v
        };
        let pack = |v: &[u8]| -> u16 {
            let mut x = 0usize;
            for (i, &c) in v.iter().enumerate().take(r as usize) {
                x += c as usize * 3usize.pow(i as u32);
            }
            x as u16
        };
        let mut add = vec![0u16; q * q];
        let mut mul = vec![0u16; q * q];
        let mut neg = vec![0u16; q];
        for a in 0..q {
            let da = digits(a);
            neg[a] = pack(&da.iter().map(|&c| (3 - c) % 3).collect::<Vec<_>>());
            for b in 0..q {
                let db = digits(b);
                let s: Vec<u8> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % 3).collect();
                add[a * q + b] = pack(&s);
                let mut prod = vec![0u8; 2 * r as usize];
                for (i, &x) in da.iter().enumerate() {
                    for (j, &y) in db.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % 3;
                    }
                }
                let mut red = poly_rem(&prod, &modulus);
                red.resize(r as usize, 0);
                mul[a * q + b] = pack(&red);
            }
        }
        let mut inv = vec![0u16; q];
        for a in 1..q {
            inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u16;
        }
        // least packed index generating the multiplicative group
        let mut zeta = 0u16;
        for g in 1..q {
            let mut x = 1usize;
            let mut ord = 0usize;
            loop {
                x = mul[x * q + g] as usize;
                ord += 1;
                if x == 1 {
                    break;
                }
            }
            if ord == q - 1 {
                zeta = g as u16;
                break;
            }
        }
        let mut exp = vec![0u16; q - 1];
        let mut log = vec![u32::MAX; q];
        let mut x = 1usize;
        for (k, e) in exp.iter_mut().enumerate() {
            *e = x as u16;
            log[x] = k as u32;
            x = mul[x * q + zeta as usize] as usize;
        }
        Tables { r, q, epsilon: (q / 3) as u32, modulus, add, mul, neg, inv, log, exp, zeta }
    }

    pub fn r(&self) -> u32 {
        self.0.r
    }
    pub fn q(&self) -> usize {
        self.0.q
    }
    pub fn epsilon(&self) -> u32 {
        self.0.epsilon
    }
    pub fn modulus(&self) -> &[u8] {
        &self.0.modulus
    }

    /// Modulus as a readable polynomial, highest degree first.
    pub fn modulus_string(&self) -> String {
        let mut terms = Vec::new();
        for (i, &c) in self.0.modulus.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
            terms.push(match i {
                0 => coef,
                1 => format!("{coef}x"),
                _ => format!("{coef}x^{i}"),
            });
        }
        terms.join("+")
    }

    pub fn elements(&self) -> impl Iterator<Item = Scalar> + Clone {
        (0..self.0.q as u16).map(Scalar)
    }

    pub fn units(&self) -> impl Iterator<Item = Scalar> + Clone {
        (1..self.0.q as u16).map(Scalar)
    }

    /// t^0, …, t^{r-1}: an F3-basis of the field.
    pub fn basis(&self) -> Vec<Scalar> {
        (0..self.0.r).map(|i| Scalar(3u16.pow(i))).collect()
    }

    pub fn from_int(&self, n: i64) -> Scalar {
        Scalar(n.rem_euclid(3) as u16)
    }

    pub fn from_coeffs(&self, coeffs: &[u8]) -> Result<Scalar> {
        if coeffs.len() != self.0.r as usize || coeffs.iter().any(|&c| c > 2) {
            return Err(Error::InvalidParameter(format!("bad coefficient vector {coeffs:?}")));
        }
        let mut x = 0u16;
        for (i, &c) in coeffs.iter().enumerate() {
            x += c as u16 * 3u16.pow(i as u32);
        }
        Ok(Scalar(x))
    }

    pub fn coeffs(&self, a: Scalar) -> Vec<u8> {
        let mut v = Vec::with_capacity(self.0.r as usize);
        let mut x = a.0;
        for _ in 0..self.0.r {
            v.push((x % 3) as u8);
            x /= 3;
        }
        v
    }

    #[inline]
    pub fn add(&self, a: Scalar, b: Scalar) -> Scalar {
        Scalar(self.0.add[a.index() * self.0.q + b.index()])
    }
    #[inline]
    pub fn neg(&self, a: Scalar) -> Scalar {
        Scalar(self.0.neg[a.index()])
    }
    #[inline]
    pub fn sub(&self, a: Scalar, b: Scalar) -> Scalar {
        self.add(a, self.neg(b))
    }
    #[inline]
    pub fn mul(&self, a: Scalar, b: Scalar) -> Scalar {
        Scalar(self.0.mul[a.index() * self.0.q + b.index()])
    }

    pub fn inv(&self, a: Scalar) -> Result<Scalar> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Scalar(self.0.inv[a.index()]))
    }

    /// a^e. Exponents are reduced mod q−1 for nonzero bases; 0^0 = 1.
    pub fn pow(&self, a: Scalar, e: i64) -> Result<Scalar> {
        if a.is_zero() {
            return match e {
                0 => Ok(Scalar::ONE),
                e if e > 0 => Ok(Scalar::ZERO),
                _ => Err(Error::DivisionByZero),
            };
        }
        let n = (self.0.q - 1) as i64;
        let k = (self.0.log[a.index()] as i64 * e.rem_euclid(n)) % n;
        Ok(Scalar(self.0.exp[k as usize]))
    }

    /// a^e for e ≥ 0; never fails.
    #[inline]
    pub fn powu(&self, a: Scalar, e: u64) -> Scalar {
        if a.is_zero() {
            return if e == 0 { Scalar::ONE } else { Scalar::ZERO };
        }
        let n = (self.0.q - 1) as u64;
        let k = (self.0.log[a.index()] as u64 * (e % n)) % n;
        Scalar(self.0.exp[k as usize])
    }

    /// a^ε with ε = q/3.
    #[inline]
    pub fn eps_pow(&self, a: Scalar) -> Scalar {
        self.powu(a, self.0.epsilon as u64)
    }

    /// a ↦ a³.
    #[inline]
    pub fn frobenius(&self, a: Scalar) -> Scalar {
        let a2 = self.mul(a, a);
        self.mul(a2, a)
    }

    /// The generator of F_q^* with the least packed index.
    pub fn primitive_root(&self) -> Scalar {
        Scalar(self.0.zeta)
    }

    /// Multiplicative order of a nonzero element.
    pub fn mult_order(&self, a: Scalar) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = (self.0.q - 1) as u64;
        let l = self.0.log[a.index()] as u64;
        Ok(n / gcd(n, l))
    }

    /// Discrete logarithm to the base of the primitive root.
    pub fn log(&self, a: Scalar) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.0.log[a.index()] as u64)
    }
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent polynomial arithmetic over F3 on coefficient vectors.
    fn slow_mul(f: &Field, a: &[u8], b: &[u8]) -> Vec<u8> {
        let r = f.r() as usize;
        let mut prod = vec![0i32; 2 * r];
        for i in 0..r {
            for j in 0..r {
                prod[i + j] += a[i] as i32 * b[j] as i32;
            }
        }
        let m = f.modulus();
        for k in (r..2 * r).rev() {
            let c = prod[k].rem_euclid(3);
            prod[k] = 0;
            for i in 0..r {
                prod[k - r + i] -= c * m[i] as i32;
            }
        }
        prod[..r].iter().map(|&c| c.rem_euclid(3) as u8).collect()
    }

    #[test]
    fn defaults_build() {
        for r in 1..=3 {
            let f = Field::new(r, None).unwrap();
            assert_eq!(f.q(), 3usize.pow(r));
            assert_eq!(f.epsilon() as usize, f.q() / 3);
            assert_eq!(gcd(f.epsilon() as u64, f.q() as u64 - 1), 1);
        }
        assert!(matches!(Field::new(4, None), Err(Error::UnsupportedDegree(4))));
    }

    #[test]
    fn reducible_modulus_rejected() {
        // x^2 + x = x(x+1)
        assert!(matches!(Field::new(2, Some(&[0, 1, 1])), Err(Error::ReducibleModulus(_))));
        // x^2 + 2 = (x+1)(x+2)
        assert!(matches!(Field::new(2, Some(&[2, 0, 1])), Err(Error::ReducibleModulus(_))));
        // x^2 + x + 2 has no roots in F3
        assert!(Field::new(2, Some(&[2, 1, 1])).is_ok());
    }

    #[test]
    fn irreducibility_matches_root_search() {
        for r in 2..=3usize {
            for low in 0..3usize.pow(r as u32) {
                let mut m: Vec<u8> = (0..r).map(|i| ((low / 3usize.pow(i as u32)) % 3) as u8).collect();
                m.push(1);
                let has_root = (0..3u32)
                    .any(|x| m.iter().enumerate().map(|(i, &c)| c as u32 * x.pow(i as u32)).sum::<u32>() % 3 == 0);
                // degree ≤ 3: irreducible iff no root
                assert_eq!(is_irreducible(&m), !has_root, "{m:?}");
            }
        }
    }

    #[test]
    fn multiplication_matches_polynomial_oracle() {
        for r in 1..=3 {
            let f = Field::new(r, None).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    let want = slow_mul(&f, &f.coeffs(a), &f.coeffs(b));
                    assert_eq!(f.coeffs(f.mul(a, b)), want);
                }
            }
        }
    }

    #[test]
    fn small_examples() {
        let f3 = Field::new(1, None).unwrap();
        assert_eq!(f3.inv(Scalar(2)).unwrap(), Scalar(2));
        assert!(matches!(f3.inv(Scalar(0)), Err(Error::DivisionByZero)));
        assert_eq!(f3.primitive_root(), Scalar(2));

        let f9 = Field::new(2, None).unwrap();
        let t = f9.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f9.mul(t, t), Scalar(2));
        // t^3 = -t = 2t
        assert_eq!(f9.frobenius(t), f9.from_coeffs(&[0, 2]).unwrap());
        assert_eq!(f9.frobenius(Scalar::ONE), Scalar::ONE);
    }

    #[test]
    fn primitive_root_is_least_generator() {
        for r in 1..=3 {
            let f = Field::new(r, None).unwrap();
            let n = f.q() as u64 - 1;
            let z = f.primitive_root();
            // brute-force order by repeated multiplication
            let order = |a: Scalar| {
                let mut x = a;
                let mut k = 1u64;
                while x != Scalar::ONE {
                    x = f.mul(x, a);
                    k += 1;
                }
                k
            };
            assert_eq!(order(z), n);
            for a in 1..z.0 {
                assert_ne!(order(Scalar(a)), n);
            }
        }
    }

    #[test]
    fn powers() {
        for r in 1..=3 {
            let f = Field::new(r, None).unwrap();
            let n = f.q() as i64 - 1;
            for a in f.units() {
                assert_eq!(f.pow(a, n).unwrap(), Scalar::ONE);
                assert_eq!(f.pow(a, -1).unwrap(), f.inv(a).unwrap());
                let mut x = Scalar::ONE;
                for e in 0..2 * n {
                    assert_eq!(f.pow(a, e).unwrap(), x);
                    x = f.mul(x, a);
                }
            }
            assert_eq!(f.pow(Scalar::ZERO, 0).unwrap(), Scalar::ONE);
            assert_eq!(f.pow(Scalar::ZERO, 5).unwrap(), Scalar::ZERO);
            assert!(f.pow(Scalar::ZERO, -1).is_err());
        }
    }

    #[test]
    fn eps_pow_identities() {
        for r in 1..=3 {
            let f = Field::new(r, None).unwrap();
            let eps = f.epsilon() as i64;
            let mut seen = vec![false; f.q()];
            for a in f.elements() {
                let e = f.eps_pow(a);
                assert!(!seen[e.index()]);
                seen[e.index()] = true;
                for b in f.elements() {
                    assert_eq!(f.eps_pow(f.add(a, b)), f.add(e, f.eps_pow(b)));
                }
            }
            for a in f.units() {
                assert_eq!(f.eps_pow(a), f.pow(a, 1 - 2 * eps).unwrap());
                assert_eq!(f.pow(a, 6 * eps).unwrap(), f.mul(a, a));
            }
            assert_eq!(f.eps_pow(Scalar::ZERO), Scalar::ZERO);
        }
        let f9 = Field::new(2, None).unwrap();
        for a in f9.units() {
            assert_eq!(f9.eps_pow(a), f9.powu(a, 3));
        }
    }

    #[test]
    fn frobenius_is_automorphism_fixing_prime_field() {
        for r in 1..=3 {
            let f = Field::new(r, None).unwrap();
            for a in f.elements() {
                let mut x = a;
                for _ in 0..r {
                    x = f.frobenius(x);
                }
                assert_eq!(x, a);
                assert_eq!(f.frobenius(a) == a, a.0 < 3);
                for b in f.elements() {
                    assert_eq!(f.frobenius(f.mul(a, b)), f.mul(f.frobenius(a), f.frobenius(b)));
                    assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
                }
            }
        }
    }
}
