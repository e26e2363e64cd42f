//! Permutations of coordinate positions and the finite groups they
//! generate. Tuple lengths are capped at 7, so groups are materialized by
//! closure over the generators (at most 7! = 5040 elements).

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

pub const MAX_TUPLE_LEN: usize = 7;

/// A permutation of `{0, .., k-1}`, stored as images: `map[i]` is where
/// position `i` goes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm {
    map: Vec<u8>,
}

impl Perm {
    pub fn identity(k: usize) -> Self {
        Perm {
            map: (0..k as u8).collect(),
        }
    }

    /// Build from one-line notation with 1-based images, e.g. `[2,1,3]`.
    pub fn from_one_line(images: &[u64]) -> Result<Self> {
        let k = images.len();
        if k == 0 || k > MAX_TUPLE_LEN {
            return Err(Error::Schema {
                field: "symmetry_generators".into(),
                reason: format!("permutation length must be in 1..={MAX_TUPLE_LEN}, got {k}"),
            });
        }
        let mut seen = vec![false; k];
        let mut map = vec![0u8; k];
        for (i, &img) in images.iter().enumerate() {
            if img == 0 || img as usize > k {
                return Err(Error::Schema {
                    field: "symmetry_generators".into(),
                    reason: format!("image {img} out of range 1..={k}"),
                });
            }
            let img = img as usize - 1;
            if seen[img] {
                return Err(Error::Schema {
                    field: "symmetry_generators".into(),
                    reason: format!("duplicate image {}", img + 1),
                });
            }
            seen[img] = true;
            map[i] = img as u8;
        }
        Ok(Perm { map })
    }

    pub fn swap(k: usize, a: usize, b: usize) -> Self {
        let mut map: Vec<u8> = (0..k as u8).collect();
        map.swap(a, b);
        Perm { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &v)| i as u8 == v)
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i] as usize
    }

    /// `self` after `other`: `(self * other)(i) = self(other(i))`.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm {
            map: other.map.iter().map(|&i| self.map[i as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut map = vec![0u8; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            map[v as usize] = i as u8;
        }
        Perm { map }
    }

    /// Reorder tuple entries: result position `i` holds `tuple[perm(i)]`.
    pub fn permute_tuple<T: Copy>(&self, tuple: &[T]) -> Vec<T> {
        self.map.iter().map(|&i| tuple[i as usize]).collect()
    }

    pub fn one_line(&self) -> Vec<u64> {
        self.map.iter().map(|&i| i as u64 + 1).collect()
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}]",
            self.one_line()
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    }
}

/// The subgroup of position permutations generated by a list of
/// generators, fully materialized.
#[derive(Debug, Clone)]
pub struct PermGroup {
    k: usize,
    elements: Vec<Perm>,
}

impl PermGroup {
    pub fn generate(k: usize, generators: &[Perm]) -> Result<Self> {
        for g in generators {
            if g.len() != k {
                return Err(Error::Schema {
                    field: "symmetry_generators".into(),
                    reason: format!("generator {g} has length {} but k = {k}", g.len()),
                });
            }
        }
        let mut seen: BTreeSet<Perm> = BTreeSet::new();
        seen.insert(Perm::identity(k));
        let mut frontier: Vec<Perm> = vec![Perm::identity(k)];
        while let Some(p) = frontier.pop() {
            for g in generators {
                let q = g.compose(&p);
                if seen.insert(q.clone()) {
                    frontier.push(q);
                }
            }
        }
        Ok(PermGroup {
            k,
            elements: seen.into_iter().collect(),
        })
    }

    pub fn trivial(k: usize) -> Self {
        PermGroup {
            k,
            elements: vec![Perm::identity(k)],
        }
    }

    /// The full symmetric group on `k` positions.
    pub fn symmetric(k: usize) -> Self {
        let generators: Vec<Perm> = (1..k).map(|i| Perm::swap(k, i - 1, i)).collect();
        PermGroup::generate(k, &generators).expect("adjacent transpositions are valid")
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_full_symmetric(&self) -> bool {
        self.elements.len() == (1..=self.k).product::<usize>()
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    /// Lexicographically smallest reordering of `tuple` over the group.
    pub fn canonical_tuple(&self, tuple: &[u32]) -> Vec<u32> {
        if self.is_trivial() {
            return tuple.to_vec();
        }
        if self.is_full_symmetric() {
            let mut sorted = tuple.to_vec();
            sorted.sort_unstable();
            return sorted;
        }
        self.elements
            .iter()
            .map(|p| p.permute_tuple(tuple))
            .min()
            .expect("group is nonempty")
    }

    pub fn is_canonical_tuple(&self, tuple: &[u32]) -> bool {
        if self.is_trivial() {
            return true;
        }
        self.elements
            .iter()
            .all(|p| p.permute_tuple(tuple).as_slice() >= tuple)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_invert() {
        let p = Perm::from_one_line(&[2, 3, 1]).unwrap();
        let q = p.inverse();
        assert!(p.compose(&q).is_identity());
        assert!(q.compose(&p).is_identity());
        assert_eq!(p.permute_tuple(&[10, 20, 30]), vec![20, 30, 10]);
    }

    #[test]
    fn closure_generates_s3() {
        let g = PermGroup::generate(3, &[Perm::swap(3, 0, 1), Perm::swap(3, 1, 2)]).unwrap();
        assert_eq!(g.order(), 6);
        assert!(g.is_full_symmetric());
        let c3 = PermGroup::generate(3, &[Perm::from_one_line(&[2, 3, 1]).unwrap()]).unwrap();
        assert_eq!(c3.order(), 3);
        assert!(!c3.is_full_symmetric());
    }

    #[test]
    fn canonical_tuple_is_orbit_minimum() {
        let g = PermGroup::symmetric(3);
        assert_eq!(g.canonical_tuple(&[3, 1, 2]), vec![1, 2, 3]);
        let c3 = PermGroup::generate(3, &[Perm::from_one_line(&[2, 3, 1]).unwrap()]).unwrap();
        // orbit of (3,1,2) under cyclic shifts: (3,1,2), (1,2,3), (2,3,1)
        assert_eq!(c3.canonical_tuple(&[3, 1, 2]), vec![1, 2, 3]);
        assert!(c3.is_canonical_tuple(&[1, 2, 3]));
        assert!(!c3.is_canonical_tuple(&[2, 3, 1]));
    }
}
