//! Clause manifest and the modules that check each clause.

/// Every clause the toolkit must cover.
pub const MANIFEST: &[&str] = &[
    "A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "A10", "A11", "A12", "B1", "B2", "B3", "B4", "D1", "D2",
    "D3", "D4", "D5", "D6", "D7", "D8", "T1.1", "T1.2", "T1.3",
];

/// (module, clauses it registers)
pub const REGISTRY: &[(&str, &[&str])] = &[
    ("relations", crate::relations::CLAUSES),
    ("amalgam", crate::amalgam::CLAUSES),
    ("structure", crate::structure::CLAUSES),
    ("cover", crate::cover::CLAUSES),
    ("ball", crate::ball::CLAUSES),
];

const fn str_eq(a: &str, b: &str) -> bool {
    let (a, b) = (a.as_bytes(), b.as_bytes());
    if a.len() != b.len() {
        return false;
    }
    let mut i = 0;
    while i < a.len() {
        if a[i] != b[i] {
            return false;
        }
        i += 1;
    }
    true
}

const fn registered(clause: &str) -> bool {
    let mut m = 0;
    while m < REGISTRY.len() {
        let list = REGISTRY[m].1;
        let mut i = 0;
        while i < list.len() {
            if str_eq(list[i], clause) {
                return true;
            }
            i += 1;
        }
        m += 1;
    }
    false
}

const fn all_registered() -> bool {
    let mut i = 0;
    while i < MANIFEST.len() {
        if !registered(MANIFEST[i]) {
            return false;
        }
        i += 1;
    }
    true
}

// An unregistered clause is a build error.
const _: () = assert!(all_registered(), "a manifest clause has no registered checker");

/// Modules registering `clause`.
pub fn checkers(clause: &str) -> Vec<&'static str> {
    REGISTRY.iter().filter(|(_, cs)| cs.contains(&clause)).map(|(m, _)| *m).collect()
}

/// Clause a check id belongs to, e.g. "A11.iii.kernel_x1" → "A11".
pub fn clause_of(check_id: &str) -> Option<&'static str> {
    // longest match first so "A12" wins over "A1" and "T1.1" over "T1"
    MANIFEST
        .iter()
        .filter(|c| {
            check_id.strip_prefix(**c).is_some_and(|rest| rest.is_empty() || rest.starts_with(['.', '(', '[', ' ']))
        })
        .max_by_key(|c| c.len())
        .copied()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_clause_has_a_checker() {
        for c in MANIFEST {
            assert!(!checkers(c).is_empty(), "{c}");
        }
    }

    #[test]
    fn registered_clauses_are_in_manifest() {
        for (m, cs) in REGISTRY {
            for c in *cs {
                assert!(MANIFEST.contains(c), "{m} registers unknown clause {c}");
            }
        }
    }

    #[test]
    fn clause_prefixes() {
        assert_eq!(clause_of("A12.ii.O3"), Some("A12"));
        assert_eq!(clause_of("A1.i"), Some("A1"));
        assert_eq!(clause_of("T1.1.v.six_arcs_at_x2"), Some("T1.1"));
        assert_eq!(clause_of("T1.3.v.H_x1/L1_profile=Q8"), Some("T1.3"));
        assert_eq!(clause_of("ball.size"), None);
        assert_eq!(clause_of("A13"), None);
    }
}
