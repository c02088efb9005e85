//! Verification results and their canonical JSON form.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::time::Duration;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::field::Field;
use crate::relations::RelationReport;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    /// Clause id, e.g. "A11.iii.kernel_x1".
    pub id: String,
    pub passed: bool,
    pub values: BTreeMap<String, String>,
    pub witness: Option<String>,
    pub note: Option<String>,
}

impl Check {
    pub fn holds(id: impl Into<String>, passed: bool) -> Check {
        Check { id: id.into(), passed, values: BTreeMap::new(), witness: None, note: None }
    }

    /// Passes when both sides render identically (orders are compared as decimal strings).
    pub fn eq(id: impl Into<String>, computed: impl Display, expected: impl Display) -> Check {
        let (c, e) = (computed.to_string(), expected.to_string());
        Check::holds(id, c == e).with("computed", &c).with("expected", &e)
    }

    pub fn with(mut self, key: &str, value: impl Display) -> Check {
        self.values.insert(key.to_string(), value.to_string());
        self
    }

    pub fn witness(mut self, w: impl Display) -> Check {
        self.witness = Some(w.to_string());
        self
    }

    pub fn note(mut self, n: impl Display) -> Check {
        self.note = Some(n.to_string());
        self
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("passed".into(), json!(self.passed));
        if !self.values.is_empty() {
            m.insert("values".into(), json!(self.values));
        }
        if let Some(w) = &self.witness {
            m.insert("witness".into(), json!(w));
        }
        if let Some(n) = &self.note {
            m.insert("note".into(), json!(n));
        }
        Value::Object(m)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Section {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub elapsed: Duration,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Section {
        Section { name: name.into(), ..Default::default() }
    }

    pub fn param(&mut self, key: &str, value: impl Display) {
        self.params.insert(key.to_string(), value.to_string());
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn note(&mut self, n: impl Display) {
        self.notes.push(n.to_string());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn get(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    fn to_json(&self, with_timing: bool) -> Value {
        let mut checks = Map::new();
        for c in &self.checks {
            let mut key = c.id.clone();
            let mut k = 2;
            while checks.contains_key(&key) {
                key = format!("{}#{k}", c.id);
                k += 1;
            }
            checks.insert(key, c.to_json());
        }
        let mut m = Map::new();
        m.insert("passed".into(), json!(self.passed()));
        m.insert("checks".into(), Value::Object(checks));
        if !self.params.is_empty() {
            m.insert("params".into(), json!(self.params));
        }
        if !self.notes.is_empty() {
            m.insert("notes".into(), json!(self.notes));
        }
        if with_timing {
            m.insert("elapsed_ms".into(), json!(self.elapsed.as_millis() as u64));
        }
        Value::Object(m)
    }
}

/// One section per relation report, failing tuples as witnesses.
pub fn relation_section(name: &str, reports: &[RelationReport]) -> Section {
    let mut s = Section::new(name);
    for r in reports {
        let mut c = Check::holds(&r.lemma_id, r.passed())
            .with("statement", &r.statement)
            .with("mode", &r.mode)
            .with("cases_checked", r.cases_checked)
            .with("failures", r.failures.len());
        if let Some(w) = r.failures.first() {
            c = c.witness(format!("{w:?}"));
        }
        s.elapsed += r.elapsed;
        s.push(c);
    }
    s
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub command: String,
    /// One echo per field the run touched.
    pub fields: Vec<FieldEcho>,
    pub sections: Vec<Section>,
}

#[derive(Clone, Debug)]
pub struct FieldEcho {
    pub r: u32,
    pub q: usize,
    pub epsilon: u32,
    pub modulus: String,
    pub primitive_root: String,
}

impl FieldEcho {
    pub fn of(f: &Field) -> FieldEcho {
        let z = f.primitive_root();
        FieldEcho {
            r: f.r(),
            q: f.q(),
            epsilon: f.epsilon(),
            modulus: f.modulus_string(),
            primitive_root: format!("{:?} (index {})", f.coeffs(z), z.0),
        }
    }
}

impl FieldEcho {
    fn to_json(&self) -> Value {
        json!({
            "r": self.r,
            "q": self.q,
            "epsilon": self.epsilon,
            "modulus": self.modulus,
            "primitive_root": self.primitive_root,
        })
    }
}

impl Certificate {
    pub fn new(command: impl Into<String>, field: Option<&Field>) -> Certificate {
        Certificate {
            command: command.into(),
            fields: field.map(FieldEcho::of).into_iter().collect(),
            sections: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.sections.iter().all(Section::passed)
    }

    pub fn first_failure(&self) -> Option<(&Section, &Check)> {
        self.sections.iter().find_map(|s| s.first_failure().map(|c| (s, c)))
    }

    fn body(&self, with_timing: bool) -> Value {
        let mut sections = Map::new();
        for s in &self.sections {
            sections.insert(s.name.clone(), s.to_json(with_timing));
        }
        let mut m = Map::new();
        m.insert("tool".into(), json!("fivearc"));
        m.insert("tool_version".into(), json!(env!("CARGO_PKG_VERSION")));
        m.insert("command".into(), json!(self.command));
        let echoes: Vec<Value> = self.fields.iter().map(FieldEcho::to_json).collect();
        match echoes.len() {
            0 => {}
            1 => {
                m.insert("field".into(), echoes[0].clone());
            }
            _ => {
                m.insert("fields".into(), Value::Array(echoes));
            }
        }
        m.insert("sections".into(), Value::Object(sections));
        m.insert("verdict".into(), json!(if self.passed() { "pass" } else { "fail" }));
        Value::Object(m)
    }

    /// SHA-256 of the canonical content with timings removed.
    pub fn content_hash(&self) -> String {
        let s = serde_json::to_string(&self.body(false)).expect("json");
        Sha256::digest(s.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json(&self) -> Value {
        let mut v = self.body(true);
        v.as_object_mut().unwrap().insert("content_hash".into(), json!(self.content_hash()));
        v
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("json") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(elapsed: u64) -> Certificate {
        let mut c = Certificate::new("verify-test", Some(&Field::new(2, None).unwrap()));
        let mut s = Section::new("b");
        s.push(Check::eq("x.order", 81u32, "81"));
        s.push(Check::holds("x.flag", true).note("n"));
        s.elapsed = Duration::from_millis(elapsed);
        c.sections.push(s);
        c.sections.push(Section::new("a"));
        c
    }

    #[test]
    fn hash_ignores_timings() {
        assert_eq!(sample(1).content_hash(), sample(999).content_hash());
        assert_ne!(sample(1).to_string_pretty(), sample(999).to_string_pretty());
    }

    #[test]
    fn keys_are_sorted() {
        let s = sample(0).to_string_pretty();
        let a = s.find("\"a\"").unwrap();
        let b = s.find("\"b\"").unwrap();
        assert!(a < b);
        assert!(s.contains("\"verdict\": \"pass\""));
    }

    #[test]
    fn failing_check_flips_verdict() {
        let mut c = sample(0);
        c.sections[0].push(Check::eq("y", 1, 2));
        assert!(!c.passed());
        assert_eq!(c.first_failure().unwrap().1.id, "y");
        assert!(c.to_string_pretty().contains("\"verdict\": \"fail\""));
    }
}
