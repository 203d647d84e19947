use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use shadowlab_core::combinatorics::ColexIter;
use shadowlab_core::{KSet, SetFamily};

use crate::problem::SearchProblem;

/// Outcome of a search, checkable from the witness family alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchCertificate {
    pub r: usize,
    pub k: usize,
    pub b: usize,
    pub n: usize,
    pub mode: String,
    /// The witness family, in canonical form, sets listed in colex order.
    #[serde(rename = "best_B")]
    pub best_b: Vec<Vec<u32>>,
    pub achieved_a: u64,
    /// True when no family over `[n]` can beat `achieved_a`.
    pub exhausted: bool,
    pub nodes_visited: u64,
    /// Seconds; only recorded on request so that output stays reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<String>,
    /// Every optimal family up to isomorphism, when requested.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub optima: Vec<Vec<Vec<u32>>>,
}

impl SearchCertificate {
    pub fn problem(&self) -> SearchProblem {
        SearchProblem { r: self.r, k: self.k, b: self.b, n: self.n }
    }

    pub fn best_family(&self) -> Result<SetFamily, shadowlab_core::SetError> {
        SetFamily::from_vecs(self.r.saturating_sub(1), self.best_b.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub valid: bool,
    pub recomputed_a: Option<u64>,
    pub diagnostics: Vec<String>,
}

/// Number of `r`-subsets of `[n]` containing at least `k` members of
/// `family`, by walking every `r`-set.
pub fn count_covered(family: &[KSet], r: usize, k: usize, n: usize) -> u64 {
    let members: HashSet<&KSet> = family.iter().collect();
    ColexIter::new(r)
        .take_while(|s| s.max_element().unwrap_or(0) as usize <= n)
        .filter(|s| s.lower_shadow().filter(|t| members.contains(t)).count() >= k)
        .count() as u64
}

fn check_family(cert: &SearchCertificate, sets: &[Vec<u32>], what: &str, diag: &mut Vec<String>) -> Option<u64> {
    let mut parsed = Vec::with_capacity(sets.len());
    for s in sets {
        match KSet::new(s.clone()) {
            Ok(ks) if ks.len() + 1 != cert.r => {
                diag.push(format!("{what}: set {ks} has size {}, expected {}", ks.len(), cert.r - 1));
            }
            Ok(ks) if ks.max_element().unwrap_or(0) as usize > cert.n => {
                diag.push(format!("{what}: set {ks} leaves the ground set [{}]", cert.n));
            }
            Ok(ks) => parsed.push(ks),
            Err(e) => diag.push(format!("{what}: bad set {s:?}: {e}")),
        }
    }
    let distinct: HashSet<&KSet> = parsed.iter().collect();
    if distinct.len() != parsed.len() {
        diag.push(format!("{what}: repeated sets"));
    }
    if sets.len() != cert.b {
        diag.push(format!("{what}: has {} sets, expected b={}", sets.len(), cert.b));
    }
    (parsed.len() == sets.len()).then(|| count_covered(&parsed, cert.r, cert.k, cert.n))
}

/// Recomputes the claimed value from the witness without touching search
/// internals.
pub fn verify_certificate(cert: &SearchCertificate) -> Verification {
    let mut diagnostics = Vec::new();
    if let Err(e) = cert.problem().validate() {
        diagnostics.push(e.to_string());
        return Verification { valid: false, recomputed_a: None, diagnostics };
    }
    let recomputed_a = check_family(cert, &cert.best_b, "best_B", &mut diagnostics);
    if let Some(a) = recomputed_a {
        if a != cert.achieved_a {
            diagnostics.push(format!("best_B covers {a} sets, certificate claims {}", cert.achieved_a));
        }
    }
    for (i, opt) in cert.optima.iter().enumerate() {
        if let Some(a) = check_family(cert, opt, &format!("optimum {i}"), &mut diagnostics) {
            if a != cert.achieved_a {
                diagnostics.push(format!("optimum {i} covers {a} sets, certificate claims {}", cert.achieved_a));
            }
        }
    }
    Verification { valid: diagnostics.is_empty(), recomputed_a, diagnostics }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cert() -> SearchCertificate {
        SearchCertificate {
            r: 3,
            k: 2,
            b: 3,
            n: 4,
            mode: "exhaustive".into(),
            best_b: vec![vec![1, 2], vec![1, 3], vec![1, 4]],
            achieved_a: 3,
            exhausted: true,
            nodes_visited: 0,
            wall_time: None,
            checkpoint: None,
            optima: vec![],
        }
    }

    #[test]
    fn accepts_honest_certificate() {
        let v = verify_certificate(&cert());
        assert!(v.valid, "{:?}", v.diagnostics);
        assert_eq!(v.recomputed_a, Some(3));
    }

    #[test]
    fn rejects_tampering() {
        let mut c = cert();
        c.achieved_a += 1;
        assert!(!verify_certificate(&c).valid);
        let mut c = cert();
        c.best_b.pop();
        let v = verify_certificate(&c);
        assert!(!v.valid);
        assert!(v.diagnostics.iter().any(|d| d.contains("expected b=3")));
        let mut c = cert();
        c.best_b[0] = vec![1, 9];
        assert!(!verify_certificate(&c).valid);
    }

    #[test]
    fn json_field_names() {
        let text = cert().to_json();
        assert!(text.contains("\"best_B\""));
        assert!(!text.contains("wall_time"));
        let back: SearchCertificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cert());
    }
}
