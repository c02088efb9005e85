//! On-disk stabilizer chains.
//!
//! Layout: magic, format version, degree, SHA-256 of the generator list,
//! decimal order, then the base, the strong generators and, per level, the
//! strong generator ids. Orbits and transversals are rebuilt on load.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::chain::chain_from_parts;
use super::GroupHandle;
use crate::error::{Error, Result};
use crate::perm::{Perm, Point};

const MAGIC: &[u8; 8] = b"FVBSGS\0\0";
const VERSION: u32 = 1;

pub fn generator_hash(gens: &[Perm]) -> [u8; 32] {
    let mut h = Sha256::new();
    let mut buf = Vec::new();
    for g in gens {
        buf.clear();
        g.to_bytes(&mut buf);
        h.update(&buf);
    }
    h.finalize().into()
}

fn put_u32(out: &mut Vec<u8>, x: u32) {
    out.extend_from_slice(&x.to_le_bytes());
}

pub fn save_chain(g: &GroupHandle, path: &Path) -> Result<()> {
    let c = g.chain();
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    put_u32(&mut out, VERSION);
    put_u32(&mut out, c.n as u32);
    out.extend_from_slice(&generator_hash(&c.gens));
    let order = c.order.to_string();
    put_u32(&mut out, order.len() as u32);
    out.extend_from_slice(order.as_bytes());
    put_u32(&mut out, c.levels.len() as u32);
    for l in &c.levels {
        out.extend_from_slice(&l.base.to_le_bytes());
    }
    put_u32(&mut out, c.pool.len() as u32);
    for p in &c.pool {
        p.to_bytes(&mut out);
    }
    for l in &c.levels {
        put_u32(&mut out, l.gen_ids.len() as u32);
        for &id in &l.gen_ids {
            put_u32(&mut out, id);
        }
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, out)?;
    Ok(())
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8]> {
        let s = self.buf.get(self.pos..self.pos + k).ok_or_else(|| Error::Cache("truncated file".into()))?;
        self.pos += k;
        Ok(s)
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

/// Loads a chain for exactly these generators; `Ok(None)` when the file is
/// missing or was written for different generators.
pub fn load_chain(path: &Path, gens: &[Perm], n: usize) -> Result<Option<GroupHandle>> {
    let buf = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut r = Reader { buf: &buf, pos: 0 };
    if r.take(8)? != MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    if r.u32()? != VERSION {
        return Ok(None);
    }
    if r.u32()? as usize != n || r.take(32)? != generator_hash(gens) {
        return Ok(None);
    }
    let olen = r.u32()? as usize;
    let order = String::from_utf8(r.take(olen)?.to_vec()).map_err(|_| Error::Cache("bad order".into()))?;
    let nl = r.u32()? as usize;
    let mut bases = Vec::with_capacity(nl);
    for _ in 0..nl {
        let b = r.take(2)?;
        bases.push(Point::from_le_bytes([b[0], b[1]]));
    }
    let np = r.u32()? as usize;
    let mut pool = Vec::with_capacity(np);
    for _ in 0..np {
        let (p, used) = Perm::from_bytes(&buf[r.pos..])?;
        r.pos += used;
        pool.push(p);
    }
    let mut ids = Vec::with_capacity(nl);
    for _ in 0..nl {
        let k = r.u32()? as usize;
        let mut v = Vec::with_capacity(k);
        for _ in 0..k {
            let id = r.u32()?;
            if id as usize >= np {
                return Err(Error::Cache("generator id out of range".into()));
            }
            v.push(id);
        }
        ids.push(v);
    }
    let chain = chain_from_parts(n, gens.to_vec(), pool, &bases, &ids);
    if chain.order.to_string() != order {
        return Err(Error::Cache("rebuilt order disagrees with the stored order".into()));
    }
    let g = GroupHandle::from_chain(chain);
    if !gens.iter().all(|x| g.contains(x)) {
        return Err(Error::Cache("stored chain does not contain the generators".into()));
    }
    Ok(Some(g))
}
