//! The orbit walk: the quotient of the family walk by ambient symmetry,
//! rooted at the standard vertex. States are canonical equality patterns
//! against the root; the state set is independent of `n` once every
//! pattern is realizable, which is what makes large-`n` analysis exact and
//! cheap. This module builds the quotient without materializing the full
//! graph, and verifies the exact projection identities against the full
//! walk where that graph fits in memory.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::error::{Error, Result};
use crate::exact::SharedDenRow;
use crate::family::{
    for_each_neighbor_tuple, instantiate_graph, pair_orbit, FamilySpec,
};
use crate::pattern::{self, PairPattern};
use crate::ratfun::{q_string, Q};

/// One orbit-walk state: a canonical pattern against the root, plus the
/// number of vertex classes realizing it at the instantiated `n`.
#[derive(Debug, Clone)]
pub struct OrbitState {
    pub pattern: PairPattern,
    pub class_size: BigInt,
}

/// The orbit walk at a fixed `n`.
#[derive(Debug, Clone)]
pub struct QuotientChain {
    chain: Chain,
    states: Vec<OrbitState>,
    n: u64,
    root: usize,
}

impl QuotientChain {
    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn states(&self) -> &[OrbitState] {
        &self.states
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Index of the identity-pattern state (the root's own class).
    pub fn root(&self) -> usize {
        self.root
    }

    /// Index of the disjoint-labels state, when realizable.
    pub fn empty_state(&self) -> Option<usize> {
        self.states.iter().position(|s| s.pattern.match_count() == 0)
    }

    pub fn state_index(&self, pattern: &PairPattern) -> Option<usize> {
        self.states.iter().position(|s| s.pattern == *pattern)
    }

    /// A vertex tuple realizing the given state's pattern against the root.
    pub fn representative(&self, state: usize, k: usize) -> Vec<u32> {
        representative_tuple(&self.states[state].pattern, k)
    }
}

/// The root vertex: the canonical representative of `(1, 2, .., k)`.
pub fn root_vertex(spec: &FamilySpec, _n: u64) -> Vec<u32> {
    let tuple: Vec<u32> = (1..=spec.k() as u32).collect();
    spec.group().canonical_tuple(&tuple)
}

/// A tuple whose pattern against the root `(1..k)` is exactly `pattern`:
/// matched coordinates copy root values, free coordinates take fresh values
/// `k+1, k+2, ..`.
fn representative_tuple(pattern: &PairPattern, k: usize) -> Vec<u32> {
    let mut tuple = vec![0u32; k];
    for &(i, j) in pattern.matches() {
        tuple[i as usize] = j as u32 + 1;
    }
    let mut next = k as u32 + 1;
    for slot in tuple.iter_mut() {
        if *slot == 0 {
            *slot = next;
            next += 1;
        }
    }
    tuple
}

/// Number of vertex classes whose pattern against the root is `pattern`:
/// `|raw orbit| * (n-k)(n-k-1)..(n-2k+m+1) / |H|`.
fn class_size(spec: &FamilySpec, pattern: &PairPattern, n: u64) -> BigInt {
    let k = spec.k() as u64;
    let m = pattern.match_count() as u64;
    let raw_count = BigInt::from(pattern::raw_orbit(spec.group(), pattern).len());
    let mut falling = BigInt::one();
    for i in 0..k - m {
        falling *= BigInt::from(n - k - i);
    }
    let total = raw_count * falling;
    let order = BigInt::from(spec.group().order());
    debug_assert!((&total % &order).is_zero(), "class size must be integral");
    total / order
}

/// Build the orbit walk at `n` by enumerating the neighbors of one
/// representative per state and grouping them by canonical pattern against
/// the root. The full vertex set is never materialized.
pub fn build_orbit_walk(spec: &FamilySpec, n: u64, laziness: &Q) -> Result<QuotientChain> {
    if n < spec.n_min() {
        return Err(Error::BelowNMin {
            n,
            n_min: spec.n_min(),
        });
    }
    assert!(!laziness.is_negative() && *laziness < Q::one());
    let weights = spec.orbit_weights_at(n)?;
    let k = spec.k();
    let group = spec.group();
    let patterns = pattern::realizable_canonical_patterns(group, n);
    let states: Vec<OrbitState> = patterns
        .iter()
        .map(|p| OrbitState {
            pattern: p.clone(),
            class_size: class_size(spec, p, n),
        })
        .collect();
    let index: BTreeMap<&PairPattern, usize> =
        patterns.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let root_tuple = root_vertex(spec, n);
    let identity = pattern::canonicalize(group, &PairPattern::identity(k));
    let root = *index.get(&identity).expect("identity pattern is realizable");

    // total vertex count and stationary distribution
    let num_vertices = spec.vertex_count(n);
    let total_classes: BigInt = states.iter().map(|s| s.class_size.clone()).sum();
    assert_eq!(
        total_classes, num_vertices,
        "class sizes must partition the vertex set"
    );
    assert!(states[root].class_size.is_one());
    let stationary: Vec<Q> = states
        .iter()
        .map(|s| Q::new(s.class_size.clone(), num_vertices.clone()))
        .collect();

    // transition rows, one representative per state
    let mut rows: Vec<Vec<Q>> = Vec::with_capacity(states.len());
    let mut tuple_degree: Option<Q> = None;
    for state in &states {
        let y = representative_tuple(&state.pattern, k);
        let mut buckets: BTreeMap<usize, Q> = BTreeMap::new();
        let mut total = Q::zero();
        for_each_neighbor_tuple(spec, &y, n, &mut |z, orbit| {
            let w = &weights[orbit];
            if w.is_zero() {
                return;
            }
            let target = pattern::canonicalize(group, &PairPattern::from_tuples(z, &root_tuple));
            let idx = *index
                .get(&target)
                .expect("neighbor pattern must be realizable");
            *buckets.entry(idx).or_insert_with(Q::zero) += w;
            total += w;
        });
        match &tuple_degree {
            None => tuple_degree = Some(total.clone()),
            Some(d) => assert_eq!(
                *d, total,
                "tuple-level degree weight must be constant across states"
            ),
        }
        let keep = laziness.clone();
        let move_scale = (Q::one() - laziness) / &total;
        let mut row = vec![Q::zero(); states.len()];
        for (idx, mass) in buckets {
            row[idx] = mass * &move_scale;
        }
        row[rows.len()] += keep;
        rows.push(row);
    }
    for (i, row) in rows.iter().enumerate() {
        let sum: Q = row.iter().fold(Q::zero(), |acc, v| acc + v);
        if sum != Q::one() {
            return Err(Error::QuotientRowSum(i));
        }
    }
    let labels: Vec<String> = states.iter().map(|s| s.pattern.to_string()).collect();
    let chain = Chain::with_stationary(labels, rows, stationary, laziness.clone(), false)?;
    Ok(QuotientChain {
        chain,
        states,
        n,
        root,
    })
}

/// Exact projection check between the full walk and the orbit walk: for
/// every `t <= t_max` and every state `s`,
/// `(P^x)^t(root, s) = class_size(s) * P^t(x, y_s)` as exact rationals.
#[derive(Debug, Clone)]
pub struct LumpingReport {
    pub n: u64,
    pub t_max: u64,
    pub states: usize,
    pub max_discrepancy: Q,
}

pub fn verify_lumping(
    spec: &FamilySpec,
    n: u64,
    t_max: u64,
    laziness: &Q,
    cap: u64,
) -> Result<LumpingReport> {
    let instance = instantiate_graph(spec, n, cap)?;
    let labels = instance
        .vertices()
        .iter()
        .map(|t| spec.format_vertex(t))
        .collect();
    let full = Chain::walk_on(&instance, labels, laziness.clone())?;
    let quotient = build_orbit_walk(spec, n, laziness)?;
    let root_tuple = root_vertex(spec, n);
    let root_idx = instance
        .index_of(&root_tuple)
        .expect("root vertex is canonical");
    let rep_idx: Vec<usize> = quotient
        .states
        .iter()
        .map(|s| {
            let y = representative_tuple(&s.pattern, spec.k());
            let rep = spec.group().canonical_tuple(&y);
            instance
                .index_of(&rep)
                .expect("state representative must be a vertex")
        })
        .collect();

    let full_matrix = full.step_matrix();
    let quot_matrix = quotient.chain.step_matrix();
    let mut full_row = SharedDenRow::point_mass(full.len(), root_idx);
    let mut quot_row = SharedDenRow::point_mass(quotient.states.len(), quotient.root);
    for t in 0..=t_max {
        for (s, state) in quotient.states.iter().enumerate() {
            let lhs = quot_row.entry(s);
            let rhs = full_row.entry(rep_idx[s]) * Q::from_integer(state.class_size.clone());
            if lhs != rhs {
                let discrepancy = (&lhs - &rhs).abs();
                return Err(Error::LumpingViolation {
                    t,
                    state: state.pattern.to_string(),
                    discrepancy: q_string(&discrepancy),
                });
            }
        }
        if t < t_max {
            full_row = full_matrix.apply_row(&full_row);
            quot_row = quot_matrix.apply_row(&quot_row);
            if (t + 1) % 8 == 0 {
                full_row.normalize();
                quot_row.normalize();
            }
        }
    }
    Ok(LumpingReport {
        n,
        t_max,
        states: quotient.states.len(),
        max_discrepancy: Q::zero(),
    })
}

/// Whether the orbit-walk state set is the same across a window of `n`.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub n_lo: u64,
    pub n_hi: u64,
    pub stable: bool,
    pub state_count: usize,
    pub first_disagreement: Option<u64>,
}

pub fn verify_state_stability(spec: &FamilySpec, n_lo: u64, n_hi: u64) -> StabilityReport {
    assert!(n_hi > n_lo);
    let reference = pattern::realizable_canonical_patterns(spec.group(), n_lo);
    for n in n_lo + 1..=n_hi {
        let here = pattern::realizable_canonical_patterns(spec.group(), n);
        if here != reference {
            return StabilityReport {
                n_lo,
                n_hi,
                stable: false,
                state_count: reference.len(),
                first_disagreement: Some(n),
            };
        }
    }
    StabilityReport {
        n_lo,
        n_hi,
        stable: true,
        state_count: reference.len(),
        first_disagreement: None,
    }
}

/// Stationary mass of each orbit state at a list of probe values of `n`,
/// with the declared `n -> infinity` limit: all mass on the
/// disjoint-labels state.
#[derive(Debug, Clone)]
pub struct LimitingStationaryReport {
    pub patterns: Vec<PairPattern>,
    pub empty_state: usize,
    /// (n, exact stationary distribution over orbit states)
    pub probe_masses: Vec<(u64, Vec<Q>)>,
    /// empty-pattern mass strictly increasing across probes
    pub monotone: bool,
    /// smallest exact C with mass(n) >= 1 - C/n at every probe
    pub mass_bound_constant: Q,
    pub limit: Vec<Q>,
}

pub fn limiting_stationary(spec: &FamilySpec, probes: &[u64]) -> Result<LimitingStationaryReport> {
    assert!(!probes.is_empty());
    assert!(probes.windows(2).all(|w| w[0] < w[1]), "probes must ascend");
    let stability = verify_state_stability(spec, probes[0], *probes.last().unwrap());
    if !stability.stable {
        return Err(Error::UnstableStates {
            n_a: probes[0],
            n_b: stability.first_disagreement.unwrap(),
        });
    }
    let patterns = pattern::realizable_canonical_patterns(spec.group(), probes[0]);
    let empty_state = patterns
        .iter()
        .position(|p| p.match_count() == 0)
        .ok_or_else(|| {
            Error::Config("disjoint-labels pattern not realizable at the probes".into())
        })?;
    let mut probe_masses = Vec::new();
    for &n in probes {
        let total = spec.vertex_count(n);
        let masses: Vec<Q> = patterns
            .iter()
            .map(|p| Q::new(class_size(spec, p, n), total.clone()))
            .collect();
        probe_masses.push((n, masses));
    }
    let empty_masses: Vec<&Q> = probe_masses.iter().map(|(_, m)| &m[empty_state]).collect();
    let monotone = empty_masses.windows(2).all(|w| w[0] < w[1]);
    let mass_bound_constant = probe_masses
        .iter()
        .map(|(n, m)| (Q::one() - &m[empty_state]) * Q::from_integer(BigInt::from(*n)))
        .max()
        .unwrap();
    let mut limit = vec![Q::zero(); patterns.len()];
    limit[empty_state] = Q::one();
    Ok(LimitingStationaryReport {
        patterns,
        empty_state,
        probe_masses,
        monotone,
        mass_bound_constant,
        limit,
    })
}

// ---------------------------------------------------------------------------
// export document

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuotientDocument {
    pub family: String,
    pub n: u64,
    pub laziness: String,
    pub states: Vec<QuotientStateDocument>,
    /// transition entries as exact fraction strings, row major
    pub transition: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuotientStateDocument {
    pub pattern: Vec<[u64; 2]>,
    pub class_size: String,
    pub stationary: String,
}

pub fn quotient_to_document(spec: &FamilySpec, quotient: &QuotientChain) -> QuotientDocument {
    let chain = quotient.chain();
    QuotientDocument {
        family: spec.name().to_string(),
        n: quotient.n(),
        laziness: q_string(chain.laziness()),
        states: quotient
            .states()
            .iter()
            .enumerate()
            .map(|(i, s)| QuotientStateDocument {
                pattern: s.pattern.matches_one_based(),
                class_size: s.class_size.to_string(),
                stationary: q_string(&chain.stationary()[i]),
            })
            .collect(),
        transition: (0..chain.len())
            .map(|i| {
                (0..chain.len())
                    .map(|j| q_string(&chain.prob(i, j)))
                    .collect()
            })
            .collect(),
    }
}

/// Sanity check used by tests and examples: quotient states enumerated
/// abstractly agree with brute-force grouping of actual vertices by their
/// pattern against the root.
pub fn brute_force_class_sizes(spec: &FamilySpec, n: u64, cap: u64) -> Result<Vec<(PairPattern, u64)>> {
    let instance = instantiate_graph(spec, n, cap)?;
    let root = root_vertex(spec, n);
    let mut counts: BTreeMap<PairPattern, u64> = BTreeMap::new();
    for v in instance.vertices() {
        let p = pair_orbit(spec, v, &root)?;
        *counts.entry(p).or_insert(0) += 1;
    }
    Ok(counts.into_iter().collect())
}

pub fn stationary_f64(quotient: &QuotientChain) -> Vec<f64> {
    quotient
        .chain()
        .stationary()
        .iter()
        .map(|q| q.to_f64().unwrap_or(f64::NAN))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::builtin_family;
    use crate::chain::{mixing_time, mixing_times};
    use crate::ratfun::{q_int, q_ratio};

    #[test]
    fn root_is_standard_tuple() {
        let kneser = builtin_family("kneser", &[2]).unwrap();
        assert_eq!(root_vertex(&kneser, 9), vec![1, 2]);
        let complete = builtin_family("complete", &[]).unwrap();
        assert_eq!(root_vertex(&complete, 5), vec![1]);
        let triple = builtin_family("triple-replace-one", &[]).unwrap();
        assert_eq!(root_vertex(&triple, 8), vec![1, 2, 3]);
    }

    #[test]
    fn petersen_quotient_matches_hand_enumeration() {
        let spec = builtin_family("kneser", &[2]).unwrap();
        let q = build_orbit_walk(&spec, 5, &Q::zero()).unwrap();
        assert_eq!(q.states().len(), 3);
        // states sort as: empty (overlap 0), one match, identity (root)
        let sizes: Vec<i64> = q
            .states()
            .iter()
            .map(|s| i64::try_from(&s.class_size).unwrap())
            .collect();
        assert_eq!(sizes, vec![3, 6, 1]);
        assert_eq!(q.root(), 2);
        let c = q.chain();
        // from the root: to overlap-0 with probability 1
        assert_eq!(c.prob(2, 0), q_int(1));
        assert_eq!(c.prob(2, 1), q_int(0));
        // from overlap-1: stay overlap-1 w.p. 2/3, to overlap-0 w.p. 1/3
        assert_eq!(c.prob(1, 1), q_ratio(2, 3));
        assert_eq!(c.prob(1, 0), q_ratio(1, 3));
        assert_eq!(c.prob(1, 2), q_int(0));
        // from overlap-0: to root w.p. 1/3, to overlap-1 w.p. 2/3
        assert_eq!(c.prob(0, 2), q_ratio(1, 3));
        assert_eq!(c.prob(0, 1), q_ratio(2, 3));
    }

    #[test]
    fn complete_quotient_closed_form() {
        let spec = builtin_family("complete", &[]).unwrap();
        for n in [6u64, 9, 20] {
            let q = build_orbit_walk(&spec, n, &Q::zero()).unwrap();
            assert_eq!(q.states().len(), 2);
            let c = q.chain();
            let root = q.root();
            let other = 1 - root;
            assert_eq!(c.prob(root, other), q_int(1));
            assert_eq!(c.prob(other, root), q_ratio(1, n as i64 - 1));
            assert_eq!(c.prob(other, other), q_ratio(n as i64 - 2, n as i64 - 1));
        }
    }

    #[test]
    fn lazy_quotient_keeps_diagonal_mass() {
        let spec = builtin_family("triple-replace-one", &[]).unwrap();
        let q = build_orbit_walk(&spec, 9, &q_ratio(1, 2)).unwrap();
        let c = q.chain();
        for i in 0..c.len() {
            assert!(c.prob(i, i) >= q_ratio(1, 2));
        }
    }

    #[test]
    fn class_sizes_match_brute_force() {
        for (name, params, n) in [
            ("kneser", &[2][..], 6u64),
            ("johnson", &[2][..], 6),
            ("triple-replace-one", &[][..], 7),
            ("shift-register", &[3][..], 7),
            ("ordered-pair-weighted", &[][..], 6),
        ] {
            let spec = builtin_family(name, params).unwrap();
            let q = build_orbit_walk(&spec, n, &Q::zero()).unwrap();
            let brute = brute_force_class_sizes(&spec, n, 100_000).unwrap();
            assert_eq!(brute.len(), q.states().len(), "{name}");
            for ((pattern, count), state) in brute.iter().zip(q.states()) {
                assert_eq!(*pattern, state.pattern, "{name}");
                assert_eq!(BigInt::from(*count), state.class_size, "{name}");
            }
        }
    }

    #[test]
    fn lumping_identity_holds_exactly() {
        let kneser = builtin_family("kneser", &[2]).unwrap();
        let report = verify_lumping(&kneser, 5, 20, &Q::zero(), 10_000).unwrap();
        assert!(report.max_discrepancy.is_zero());
        assert_eq!(report.states, 3);
        let complete = builtin_family("complete", &[]).unwrap();
        let report = verify_lumping(&complete, 6, 20, &Q::zero(), 10_000).unwrap();
        assert!(report.max_discrepancy.is_zero());
        // t_max = 0 is the indicator identity
        let report = verify_lumping(&kneser, 6, 0, &Q::zero(), 10_000).unwrap();
        assert!(report.max_discrepancy.is_zero());
        // and with laziness
        let report = verify_lumping(&kneser, 6, 12, &q_ratio(1, 3), 10_000).unwrap();
        assert!(report.max_discrepancy.is_zero());
    }

    #[test]
    fn state_sets_are_stable() {
        let kneser = builtin_family("kneser", &[2]).unwrap();
        let report = verify_state_stability(&kneser, 5, 15);
        assert!(report.stable);
        assert_eq!(report.state_count, 3);
        let kneser3 = builtin_family("kneser", &[3]).unwrap();
        let report = verify_state_stability(&kneser3, 7, 15);
        assert!(report.stable);
        assert_eq!(report.state_count, 4);
        let complete = builtin_family("complete", &[]).unwrap();
        let report = verify_state_stability(&complete, 3, 10);
        assert!(report.stable);
        assert_eq!(report.state_count, 2);
        // below 2k the disjoint pattern is missing
        let report = verify_state_stability(&kneser, 3, 5);
        assert!(!report.stable);
        assert_eq!(report.first_disagreement, Some(4));
    }

    #[test]
    fn limiting_stationary_kneser_masses() {
        let spec = builtin_family("kneser", &[2]).unwrap();
        let report = limiting_stationary(&spec, &[10, 20, 40]).unwrap();
        assert!(report.monotone);
        let expect = [q_ratio(28, 45), q_ratio(153, 190), q_ratio(703, 780)];
        for ((_, masses), want) in report.probe_masses.iter().zip(&expect) {
            assert_eq!(&masses[report.empty_state], want);
        }
        assert_eq!(report.limit[report.empty_state], q_int(1));
        assert!(report.limit.iter().filter(|m| m.is_zero()).count() == 2);
        // mass exceeds 1 - C/n at every probe by construction of C
        for (n, masses) in &report.probe_masses {
            let bound = Q::one()
                - &report.mass_bound_constant / Q::from_integer(BigInt::from(*n));
            assert!(masses[report.empty_state] >= bound);
        }
    }

    #[test]
    fn limiting_stationary_complete() {
        let spec = builtin_family("complete", &[]).unwrap();
        let report = limiting_stationary(&spec, &[10, 20]).unwrap();
        let other = report.empty_state;
        assert_eq!(report.probe_masses[0].1[other], q_ratio(9, 10));
        assert_eq!(report.probe_masses[1].1[other], q_ratio(19, 20));
    }

    #[test]
    fn quotient_mixing_equals_full_mixing() {
        let spec = builtin_family("kneser", &[2]).unwrap();
        let instance = instantiate_graph(&spec, 7, 10_000).unwrap();
        let labels = instance
            .vertices()
            .iter()
            .map(|t| spec.format_vertex(t))
            .collect();
        let full = Chain::walk_on(&instance, labels, Q::zero()).unwrap();
        let quotient = build_orbit_walk(&spec, 7, &Q::zero()).unwrap();
        let root_idx = instance.index_of(&root_vertex(&spec, 7)).unwrap();
        let epsilons = [q_ratio(1, 4), q_ratio(1, 10), q_ratio(1, 100)];
        let full_times = mixing_times(&full, root_idx, &epsilons, 100_000).unwrap();
        let quot_times =
            mixing_times(quotient.chain(), quotient.root(), &epsilons, 100_000).unwrap();
        assert_eq!(full_times, quot_times);
        // and the quotient from the root matches the worst case over starts
        for (eps, expect) in epsilons.iter().zip(&full_times) {
            let mut worst = 0;
            for s in 0..quotient.chain().len() {
                worst = worst.max(mixing_time(quotient.chain(), s, eps).unwrap());
            }
            assert_eq!(worst, *expect);
        }
    }

    #[test]
    fn export_document_shape() {
        let spec = builtin_family("kneser", &[2]).unwrap();
        let q = build_orbit_walk(&spec, 5, &Q::zero()).unwrap();
        let doc = quotient_to_document(&spec, &q);
        assert_eq!(doc.n, 5);
        assert_eq!(doc.states.len(), 3);
        assert_eq!(doc.transition[2][0], "1");
        assert_eq!(doc.transition[1][1], "2/3");
        let text = serde_json::to_string(&doc).unwrap();
        let back: QuotientDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back.states[0].class_size, "3");
    }
}
