//! Equality patterns between two label tuples. A pattern records exactly
//! which coordinates of the left tuple coincide with which coordinates of
//! the right tuple; every value not forced equal by the pattern is pairwise
//! distinct. Patterns are the unit of orbit data: two vertex pairs lie in
//! the same symmetric-group orbit exactly when their canonical patterns
//! agree.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::perm::PermGroup;

/// A partial matching between the coordinates of a `k_left`-tuple and a
/// `k_right`-tuple. `matches` is a partial injection, kept sorted by left
/// index. Coordinates are 0-based internally; the document format is
/// 1-based.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairPattern {
    k_left: u8,
    k_right: u8,
    matches: Vec<(u8, u8)>,
}

impl PairPattern {
    pub fn new(k_left: usize, k_right: usize, mut matches: Vec<(u8, u8)>) -> Result<Self> {
        matches.sort_unstable();
        let mut left_seen = [false; 8];
        let mut right_seen = [false; 8];
        for &(i, j) in &matches {
            if i as usize >= k_left || j as usize >= k_right {
                return Err(Error::Schema {
                    field: "matches".into(),
                    reason: format!("index pair ({},{}) out of range", i + 1, j + 1),
                });
            }
            if left_seen[i as usize] || right_seen[j as usize] {
                return Err(Error::Schema {
                    field: "matches".into(),
                    reason: format!("coordinate reused in pair ({},{})", i + 1, j + 1),
                });
            }
            left_seen[i as usize] = true;
            right_seen[j as usize] = true;
        }
        Ok(PairPattern {
            k_left: k_left as u8,
            k_right: k_right as u8,
            matches,
        })
    }

    /// The raw equality pattern between two injective tuples.
    pub fn from_tuples(u: &[u32], v: &[u32]) -> Self {
        let mut matches = Vec::new();
        for (i, a) in u.iter().enumerate() {
            for (j, b) in v.iter().enumerate() {
                if a == b {
                    matches.push((i as u8, j as u8));
                }
            }
        }
        PairPattern {
            k_left: u.len() as u8,
            k_right: v.len() as u8,
            matches,
        }
    }

    pub fn identity(k: usize) -> Self {
        PairPattern {
            k_left: k as u8,
            k_right: k as u8,
            matches: (0..k as u8).map(|i| (i, i)).collect(),
        }
    }

    pub fn empty(k_left: usize, k_right: usize) -> Self {
        PairPattern {
            k_left: k_left as u8,
            k_right: k_right as u8,
            matches: vec![],
        }
    }

    pub fn k_left(&self) -> usize {
        self.k_left as usize
    }

    pub fn k_right(&self) -> usize {
        self.k_right as usize
    }

    pub fn matches(&self) -> &[(u8, u8)] {
        &self.matches
    }

    pub fn match_count(&self) -> usize {
        self.matches.len()
    }

    /// Whether every coordinate is matched (left and right tuples carry the
    /// same value set).
    pub fn is_full(&self) -> bool {
        self.k_left == self.k_right && self.matches.len() == self.k_left as usize
    }

    pub fn transpose(&self) -> PairPattern {
        let mut matches: Vec<(u8, u8)> = self.matches.iter().map(|&(i, j)| (j, i)).collect();
        matches.sort_unstable();
        PairPattern {
            k_left: self.k_right,
            k_right: self.k_left,
            matches,
        }
    }

    /// Smallest ground-set size at which the pattern is realizable by a
    /// pair of injective tuples.
    pub fn min_n(&self) -> u64 {
        (self.k_left as u64) + (self.k_right as u64) - self.matches.len() as u64
    }

    /// 1-based match list for documents and display.
    pub fn matches_one_based(&self) -> Vec<[u64; 2]> {
        self.matches
            .iter()
            .map(|&(i, j)| [i as u64 + 1, j as u64 + 1])
            .collect()
    }
}

impl fmt::Display for PairPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .matches
            .iter()
            .map(|&(i, j)| format!("{}={}", i + 1, j + 1))
            .collect();
        if parts.is_empty() {
            write!(f, "{{}}")
        } else {
            write!(f, "{{{}}}", parts.join(","))
        }
    }
}

/// Canonical form of `pattern` under simultaneous relabeling of left
/// coordinates by `group` and right coordinates by `group`: the
/// lexicographically smallest relabeled match list. Two tuple pairs have
/// equal canonical patterns exactly when some ambient permutation carries
/// one pair onto class representatives of the other.
pub fn canonicalize(group: &PermGroup, pattern: &PairPattern) -> PairPattern {
    debug_assert_eq!(pattern.k_left as usize, group.k());
    debug_assert_eq!(pattern.k_right as usize, group.k());
    if group.is_trivial() {
        return pattern.clone();
    }
    if group.is_full_symmetric() {
        let m = pattern.matches.len() as u8;
        return PairPattern {
            k_left: pattern.k_left,
            k_right: pattern.k_right,
            matches: (0..m).map(|i| (i, i)).collect(),
        };
    }
    let mut best: Option<Vec<(u8, u8)>> = None;
    for h_left in group.elements() {
        for h_right in group.elements() {
            let mut relabeled: Vec<(u8, u8)> = pattern
                .matches
                .iter()
                .map(|&(i, j)| {
                    (
                        h_left.apply(i as usize) as u8,
                        h_right.apply(j as usize) as u8,
                    )
                })
                .collect();
            relabeled.sort_unstable();
            if best.as_ref().map_or(true, |b| relabeled < *b) {
                best = Some(relabeled);
            }
        }
    }
    PairPattern {
        k_left: pattern.k_left,
        k_right: pattern.k_right,
        matches: best.expect("group is nonempty"),
    }
}

/// All raw match lists in the relabeling orbit of a canonical pattern.
pub fn raw_orbit(group: &PermGroup, canonical: &PairPattern) -> Vec<PairPattern> {
    let mut seen: BTreeSet<Vec<(u8, u8)>> = BTreeSet::new();
    for h_left in group.elements() {
        for h_right in group.elements() {
            let mut relabeled: Vec<(u8, u8)> = canonical
                .matches
                .iter()
                .map(|&(i, j)| {
                    (
                        h_left.apply(i as usize) as u8,
                        h_right.apply(j as usize) as u8,
                    )
                })
                .collect();
            relabeled.sort_unstable();
            seen.insert(relabeled);
        }
    }
    seen.into_iter()
        .map(|matches| PairPattern {
            k_left: canonical.k_left,
            k_right: canonical.k_right,
            matches,
        })
        .collect()
}

/// Every partial injection between `[k]` and `[k]`, as sorted match lists.
pub fn all_partial_injections(k: usize) -> Vec<PairPattern> {
    let mut out = Vec::new();
    let mut current: Vec<(u8, u8)> = Vec::new();
    let mut right_used = vec![false; k];
    fn rec(
        i: usize,
        k: usize,
        current: &mut Vec<(u8, u8)>,
        right_used: &mut Vec<bool>,
        out: &mut Vec<PairPattern>,
    ) {
        if i == k {
            out.push(PairPattern {
                k_left: k as u8,
                k_right: k as u8,
                matches: current.clone(),
            });
            return;
        }
        rec(i + 1, k, current, right_used, out);
        for j in 0..k {
            if !right_used[j] {
                right_used[j] = true;
                current.push((i as u8, j as u8));
                rec(i + 1, k, current, right_used, out);
                current.pop();
                right_used[j] = false;
            }
        }
    }
    rec(0, k, &mut current, &mut right_used, &mut out);
    out
}

/// Canonical forms of every pattern realizable over a ground set of size
/// `n`, sorted. This is the orbit-walk state set at `n`.
pub fn realizable_canonical_patterns(group: &PermGroup, n: u64) -> Vec<PairPattern> {
    let k = group.k();
    let mut set: BTreeSet<PairPattern> = BTreeSet::new();
    for raw in all_partial_injections(k) {
        if raw.min_n() <= n {
            set.insert(canonicalize(group, &raw));
        }
    }
    set.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Perm;

    #[test]
    fn from_tuples_records_equalities() {
        let p = PairPattern::from_tuples(&[1, 2], &[1, 3]);
        assert_eq!(p.matches(), &[(0, 0)]);
        let p = PairPattern::from_tuples(&[1, 2], &[3, 4]);
        assert_eq!(p.match_count(), 0);
        let p = PairPattern::from_tuples(&[1, 2], &[2, 1]);
        assert_eq!(p.matches(), &[(0, 1), (1, 0)]);
    }

    #[test]
    fn rejects_non_injective_matches() {
        assert!(PairPattern::new(2, 2, vec![(0, 0), (0, 1)]).is_err());
        assert!(PairPattern::new(2, 2, vec![(0, 0), (1, 0)]).is_err());
        assert!(PairPattern::new(2, 2, vec![(2, 0)]).is_err());
    }

    #[test]
    fn canonical_form_under_full_group_depends_only_on_count() {
        let g = PermGroup::symmetric(2);
        let a = canonicalize(&g, &PairPattern::from_tuples(&[1, 2], &[2, 3]));
        let b = canonicalize(&g, &PairPattern::from_tuples(&[1, 2], &[1, 4]));
        assert_eq!(a, b);
        assert_eq!(a.match_count(), 1);
        assert_eq!(a.matches(), &[(0, 0)]);
    }

    #[test]
    fn canonical_form_respects_cyclic_group() {
        let c3 = PermGroup::generate(3, &[Perm::from_one_line(&[2, 3, 1]).unwrap()]).unwrap();
        // (1,2,3) vs (2,3,4): matches (1,0),(2,1) — a "shift" overlap
        let shift = canonicalize(&c3, &PairPattern::from_tuples(&[1, 2, 3], &[2, 3, 4]));
        // (1,2,3) vs (4,1,2): the opposite shift; the class representatives
        // (2,3,1) vs (2,3,4) realize the same pattern, so the cyclic group
        // identifies the two shifts
        let other = canonicalize(&c3, &PairPattern::from_tuples(&[1, 2, 3], &[4, 1, 2]));
        assert_eq!(shift, other);
        assert_eq!(shift.matches(), &[(0, 0), (1, 1)]);
        // under the trivial group they stay distinct
        let trivial = PermGroup::trivial(3);
        let a = canonicalize(&trivial, &PairPattern::from_tuples(&[1, 2, 3], &[2, 3, 4]));
        let b = canonicalize(&trivial, &PairPattern::from_tuples(&[1, 2, 3], &[4, 1, 2]));
        assert_ne!(a, b);
    }

    #[test]
    fn partial_injection_count() {
        // sum over m of C(k,m)^2 m!: k=2 -> 1 + 4 + 2 = 7; k=3 -> 34
        assert_eq!(all_partial_injections(2).len(), 7);
        assert_eq!(all_partial_injections(3).len(), 34);
    }

    #[test]
    fn realizable_states_stabilize_at_2k() {
        let g = PermGroup::symmetric(2);
        // kneser r=2 states: overlap 2, 1, 0
        assert_eq!(realizable_canonical_patterns(&g, 5).len(), 3);
        assert_eq!(realizable_canonical_patterns(&g, 4).len(), 3);
        // at n = 3 the disjoint pattern is not realizable
        assert_eq!(realizable_canonical_patterns(&g, 3).len(), 2);
        let trivial = PermGroup::trivial(3);
        assert_eq!(realizable_canonical_patterns(&trivial, 7).len(), 34);
    }

    #[test]
    fn raw_orbit_covers_relabelings() {
        let g = PermGroup::symmetric(2);
        let canon = canonicalize(&g, &PairPattern::new(2, 2, vec![(0, 0)]).unwrap());
        let orbit = raw_orbit(&g, &canon);
        // one match between 2-tuples: 4 raw placements
        assert_eq!(orbit.len(), 4);
    }
}
