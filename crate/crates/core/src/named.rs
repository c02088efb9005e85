//! Registry of the named subgroups of Sym(Ω), built from generator recipes.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::group::chain::EXPLICIT_DEGREE;
use crate::group::GroupHandle;
use crate::omega::{GenSpec, Omega};
use crate::perm::Perm;

/// Names of the groups in the construction. `Product` is the group
/// generated by the listed groups together.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupName {
    A,
    V,
    F,
    Z0,
    Z,
    C,
    R,
    S,
    T,
    D,
    E,
    Sigma,
    M,
    Q,
    P,
    /// ⟨γ_{tr}α_{(u,t,w)}⟩ for the given r
    Qr(Scalar),
    Qstar,
    K1,
    K2,
    K12,
    K,
    G1,
    G2,
    G12,
    Theta,
    /// ⟨ζ_S^d⟩ with ζ_S = β_{ζ²,ζ}
    Sd(u64),
    /// ⟨α_{(0,0,ζ)}⟩
    F0,
    Product(Vec<GroupName>),
}

impl GroupName {
    pub fn product(parts: &[GroupName]) -> GroupName {
        GroupName::Product(parts.to_vec())
    }

    /// Generator families as listed in the definitions, before expansion.
    fn parts(&self) -> Vec<GroupName> {
        use GroupName::*;
        match self {
            M => vec![C, D, T],
            Q => vec![A, C],
            P => vec![A, C, E],
            Qstar => vec![C, Z0],
            K1 => vec![V, C, D, T],
            K2 => vec![V, C, E, T],
            K12 => vec![V, C, T],
            K => vec![V, C, D, T, E],
            G1 => vec![A, C, D, T, S, Sigma],
            G2 => vec![A, C, S, E, T, Sigma],
            G12 => vec![A, C, S, T, Sigma],
            Product(v) => v.iter().flat_map(|x| x.parts()).collect(),
            other => vec![other.clone()],
        }
    }
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use GroupName::*;
        match self {
            Qr(r) => write!(f, "Q_{}", r.0),
            Sd(d) => write!(f, "S^({d})"),
            Product(v) => {
                let names: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                write!(f, "{}", names.join("."))
            }
            other => {
                let s = format!("{other:?}");
                write!(f, "{s}")
            }
        }
    }
}

/// The family {Q_r} together with Q_* and the block partition of Ω.
pub struct NamedFamily {
    pub q_r: Vec<(Scalar, GroupHandle)>,
    pub q_star: GroupHandle,
    /// blocks[c] lists the points with third coordinate c
    pub blocks: Vec<Vec<u16>>,
}

/// Memoizing builder for named groups over one field.
pub struct Registry {
    omega: Omega,
    memo: Mutex<HashMap<GroupName, GroupHandle>>,
    cache_dir: Option<PathBuf>,
}

impl Registry {
    pub fn new(omega: Omega) -> Registry {
        Registry { omega, memo: Mutex::new(HashMap::new()), cache_dir: None }
    }

    pub fn with_cache_dir(mut self, dir: Option<PathBuf>) -> Registry {
        self.cache_dir = dir;
        self
    }

    pub fn omega(&self) -> &Omega {
        &self.omega
    }

    pub fn cache_dir(&self) -> Option<&PathBuf> {
        self.cache_dir.as_ref()
    }

    fn zeta(&self) -> Scalar {
        self.omega.field().primitive_root()
    }

    /// Generators of a single family, on an F3-basis of each free parameter.
    pub fn basis_generators(&self, name: &GroupName) -> Result<Vec<Perm>> {
        use GroupName::*;
        let o = &self.omega;
        let f = o.field();
        let basis = f.basis();
        let z = Scalar::ZERO;
        let zeta = self.zeta();
        let mut out = Vec::new();
        match name {
            A | V | F | Z0 | Z => {
                let (du, dv, dw) = match name {
                    A => (true, true, true),
                    V => (true, true, false),
                    F => (false, false, true),
                    Z0 => (true, false, true),
                    _ => (true, false, false),
                };
                for &e in &basis {
                    if du {
                        out.push(o.alpha(e, z, z));
                    }
                    if dv {
                        out.push(o.alpha(z, e, z));
                    }
                    if dw {
                        out.push(o.alpha(z, z, e));
                    }
                }
            }
            C => out.extend(basis.iter().map(|&e| o.gamma(e))),
            E => out.extend(basis.iter().map(|&e| o.tau(e))),
            R => out.push(o.beta(zeta, zeta)),
            S => out.push(o.beta(f.mul(zeta, zeta), zeta)),
            T => out.push(o.beta(zeta, f.inv(zeta)?)),
            D => out.push(o.delta()),
            Sigma => out.push(o.sigma()),
            Theta => out.push(o.theta()?),
            Sd(d) => {
                let n = f.q() as u64 - 1;
                if *d == 0 || n % d != 0 {
                    return Err(Error::InvalidParameter(format!("d = {d} does not divide q-1 = {n}")));
                }
                let m = f.powu(zeta, *d);
                out.push(o.beta(f.mul(m, m), m));
            }
            F0 => out.push(o.alpha(z, z, zeta)),
            Qr(r) => {
                for &e in &basis {
                    out.push(o.gamma(f.mul(e, *r)).compose(&o.alpha(z, e, z)));
                    out.push(o.alpha(e, z, z));
                    out.push(o.alpha(z, z, e));
                }
            }
            composite => {
                for p in composite.parts() {
                    out.extend(self.basis_generators(&p)?);
                }
            }
        }
        Ok(out)
    }

    /// Every element named in the defining display of a single family.
    pub fn sweep_generators(&self, name: &GroupName) -> Result<Vec<GenSpecOrPerm>> {
        use GroupName::*;
        let o = &self.omega;
        let f = o.field().clone();
        let z = Scalar::ZERO;
        let mut out = Vec::new();
        match name {
            A | V | F | Z0 | Z => {
                for u in f.elements() {
                    for v in f.elements() {
                        for w in f.elements() {
                            let keep = match name {
                                A => true,
                                V => w == z,
                                F => u == z && v == z,
                                Z0 => v == z,
                                _ => v == z && w == z,
                            };
                            if keep {
                                out.push(GenSpecOrPerm::Spec(GenSpec::Alpha(u, v, w)));
                            }
                        }
                    }
                }
            }
            C => out.extend(f.elements().map(|e| GenSpecOrPerm::Spec(GenSpec::Gamma(e)))),
            E => out.extend(f.elements().map(|e| GenSpecOrPerm::Spec(GenSpec::Tau(e)))),
            R => out.extend(f.units().map(|m| GenSpecOrPerm::Spec(GenSpec::Beta(m, m)))),
            S => out.extend(f.units().map(|m| GenSpecOrPerm::Spec(GenSpec::Beta(f.mul(m, m), m)))),
            T => {
                for m in f.units() {
                    out.push(GenSpecOrPerm::Spec(GenSpec::Beta(m, f.inv(m)?)));
                }
            }
            D => out.push(GenSpecOrPerm::Spec(GenSpec::Delta)),
            Sigma => out.push(GenSpecOrPerm::Spec(GenSpec::Sigma)),
            Qr(r) => {
                for t in f.elements() {
                    for u in f.elements() {
                        for w in f.elements() {
                            let g = o.gamma(f.mul(t, *r)).compose(&o.alpha(u, t, w));
                            out.push(GenSpecOrPerm::Perm(g));
                        }
                    }
                }
            }
            composite => {
                for p in composite.parts() {
                    if p == *composite {
                        out.extend(self.basis_generators(&p)?.into_iter().map(GenSpecOrPerm::Perm));
                    } else {
                        out.extend(self.sweep_generators(&p)?);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Checks that every element of the full parameter sweep lies in the
    /// handle built from basis generators. Returns the number checked.
    pub fn verify_sweep(&self, name: &GroupName) -> Result<usize> {
        let h = self.get(name)?;
        let sweep = self.sweep_generators(name)?;
        for s in &sweep {
            let p = match s {
                GenSpecOrPerm::Spec(g) => self.omega.perm(g)?,
                GenSpecOrPerm::Perm(p) => p.clone(),
            };
            if !h.contains(&p) {
                return Err(Error::ClaimMismatch(format!("{name}: sweep element outside the basis-generated group")));
            }
        }
        Ok(sweep.len())
    }

    /// Transitive subgroups that may be normal in `name`, tried in order for a faster build.
    fn helpers(&self, name: &GroupName) -> Vec<GroupName> {
        let parts = name.parts();
        let has = |x: &GroupName| parts.contains(x);
        let mut out = Vec::new();
        if has(&GroupName::A) && has(&GroupName::C) && *name != GroupName::Q {
            out.push(GroupName::Q);
        }
        if has(&GroupName::A) && *name != GroupName::A {
            out.push(GroupName::A);
        }
        out
    }

    /// The handle for `name`, built once and memoized.
    pub fn get(&self, name: &GroupName) -> Result<GroupHandle> {
        if let Some(h) = self.memo.lock().unwrap().get(name) {
            return Ok(h.clone());
        }
        let h = self.build(name)?;
        self.memo.lock().unwrap().insert(name.clone(), h.clone());
        Ok(h)
    }

    /// Inserts an externally built handle under a name.
    pub fn insert(&self, name: GroupName, h: GroupHandle) {
        self.memo.lock().unwrap().insert(name, h);
    }

    fn build(&self, name: &GroupName) -> Result<GroupHandle> {
        let n = self.omega.degree();
        let gens = self.basis_generators(name)?;
        if n > EXPLICIT_DEGREE {
            for helper in self.helpers(name) {
                let normal = self.get(&helper)?;
                match GroupHandle::build_with_normal(gens.clone(), n, &normal) {
                    Err(Error::NotNormal(_)) => continue,
                    other => return other,
                }
            }
        }
        GroupHandle::build(gens, n)
    }

    pub fn family(&self) -> Result<NamedFamily> {
        let f = self.omega.field().clone();
        let mut q_r = Vec::new();
        for r in f.elements() {
            q_r.push((r, self.get(&GroupName::Qr(r))?));
        }
        let q = f.q();
        let blocks = (0..q).map(|c| ((c * q * q) as u16..((c + 1) * q * q) as u16).collect()).collect();
        Ok(NamedFamily { q_r, q_star: self.get(&GroupName::Qstar)?, blocks })
    }
}

/// A sweep element: either a generator spec or an explicit product.
pub enum GenSpecOrPerm {
    Spec(GenSpec),
    Perm(Perm),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use num_bigint::BigUint;

    fn reg(r: u32) -> Registry {
        Registry::new(Omega::new(Field::new(r, None).unwrap()))
    }

    fn ord(reg: &Registry, n: GroupName) -> BigUint {
        reg.get(&n).unwrap().order().clone()
    }

    #[test]
    fn stated_orders() {
        use GroupName::*;
        for r in 1..=2u32 {
            let rg = reg(r);
            let q = 3u64.pow(r);
            let b = |x: u64| BigUint::from(x);
            assert_eq!(ord(&rg, A), b(q.pow(3)));
            assert_eq!(ord(&rg, V), b(q.pow(2)));
            assert_eq!(ord(&rg, Z0), b(q.pow(2)));
            for x in [F, Z, C, E] {
                assert_eq!(ord(&rg, x), b(q));
            }
            for x in [R, S, T] {
                assert_eq!(ord(&rg, x), b(q - 1));
            }
            assert_eq!(ord(&rg, D), b(4));
            assert_eq!(ord(&rg, Sigma), b(r as u64));
            assert_eq!(ord(&rg, Q), b(q.pow(4)));
            assert_eq!(ord(&rg, P), b(q.pow(5)));
            assert_eq!(ord(&rg, M), b(q * (q * q - 1)));
        }
    }

    #[test]
    fn sweeps_match_basis() {
        let rg = reg(1);
        use GroupName::*;
        for n in [A, V, F, Z0, Z, C, R, S, T, D, E, Sigma, M, Q, P, Qstar] {
            assert!(rg.verify_sweep(&n).unwrap() >= 1, "{n}");
        }
        let rg9 = reg(2);
        for n in [A, C, S, T, E, Qr(Scalar(4))] {
            rg9.verify_sweep(&n).unwrap();
        }
    }

    #[test]
    fn sd_requires_divisor() {
        let rg = reg(2);
        assert!(matches!(rg.get(&GroupName::Sd(3)), Err(Error::InvalidParameter(_))));
        assert_eq!(ord(&rg, GroupName::Sd(2)), BigUint::from(4u32));
    }

    #[test]
    fn family_shape() {
        let rg = reg(1);
        let fam = rg.family().unwrap();
        assert_eq!(fam.q_r.len(), 3);
        for (_, h) in &fam.q_r {
            assert_eq!(h.order(), &BigUint::from(27u32));
            assert!(crate::group::elementary_abelian_p(h, 3));
        }
        assert!(fam.q_r[0].1.same_group(&rg.get(&GroupName::A).unwrap()));
        assert_eq!(fam.q_star.order(), &BigUint::from(27u32));
        assert_eq!(fam.blocks.iter().map(|b| b.len()).sum::<usize>(), 27);
    }
}
