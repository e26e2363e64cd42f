//! Declarative family specifications and their finite instantiations.
//!
//! A family is described by a tuple length `k`, a symmetry subgroup
//! `H <= S_k` given by generators, and a list of edge orbits: equality
//! patterns with a rational-function weight in the family parameter `n`.
//! Vertices of the instance at `n` are `H`-classes of injective
//! `k`-tuples over `{1,..,n}`; two classes are adjacent when the equality
//! pattern between representatives lies in a listed orbit.

use std::collections::HashMap;

use num::bigint::BigInt;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pattern::{self, PairPattern};
use crate::perm::{Perm, PermGroup, MAX_TUPLE_LEN};
use crate::ratfun::{Poly, Q, RationalFunction};

/// Default ceiling on the number of vertices a full instantiation will
/// materialize.
pub const DEFAULT_STATE_CAP: u64 = 200_000;

/// An orbit of edges: a canonical equality pattern plus its weight as a
/// function of `n`. Weight 1 everywhere gives the simple random walk.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeOrbit {
    pattern: PairPattern,
    weight: RationalFunction,
}

impl EdgeOrbit {
    pub fn pattern(&self) -> &PairPattern {
        &self.pattern
    }

    pub fn weight(&self) -> &RationalFunction {
        &self.weight
    }
}

/// A validated family specification. Immutable after construction.
#[derive(Debug, Clone)]
pub struct FamilySpec {
    name: String,
    k: usize,
    generators: Vec<Perm>,
    group: PermGroup,
    edge_orbits: Vec<EdgeOrbit>,
    n_min: u64,
    raw_edge_index: HashMap<Vec<(u8, u8)>, usize>,
}

impl FamilySpec {
    pub fn new(
        name: impl Into<String>,
        k: usize,
        generators: Vec<Perm>,
        orbits: Vec<(PairPattern, RationalFunction)>,
        n_min: Option<u64>,
    ) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::Schema {
                field: "name".into(),
                reason: "must be nonempty".into(),
            });
        }
        if k == 0 || k > MAX_TUPLE_LEN {
            return Err(Error::Schema {
                field: "k".into(),
                reason: format!("tuple length must be in 1..={MAX_TUPLE_LEN}, got {k}"),
            });
        }
        let group = PermGroup::generate(k, &generators)?;
        let identity_canon = pattern::canonicalize(&group, &PairPattern::identity(k));
        let mut edge_orbits: Vec<EdgeOrbit> = Vec::new();
        for (idx, (raw, weight)) in orbits.into_iter().enumerate() {
            if raw.k_left() != k || raw.k_right() != k {
                return Err(Error::Schema {
                    field: format!("edge_orbits[{idx}].matches"),
                    reason: format!("pattern is {}x{} but k = {k}", raw.k_left(), raw.k_right()),
                });
            }
            let canon = pattern::canonicalize(&group, &raw);
            if canon == identity_canon {
                return Err(Error::Schema {
                    field: format!("edge_orbits[{idx}].matches"),
                    reason: "identity matching would create a self-loop".into(),
                });
            }
            match edge_orbits.iter().position(|o| o.pattern == canon) {
                Some(prev) if edge_orbits[prev].weight == weight => {
                    // several members of one orbit listed consistently: merge
                }
                Some(prev) => {
                    let element = relabeling_witness(&group, &edge_orbits[prev].pattern, &raw);
                    return Err(Error::SymmetryClosure {
                        orbit: idx,
                        element,
                    });
                }
                None => edge_orbits.push(EdgeOrbit {
                    pattern: canon,
                    weight,
                }),
            }
        }
        for idx in 0..edge_orbits.len() {
            let t = pattern::canonicalize(&group, &edge_orbits[idx].pattern.transpose());
            let found = edge_orbits
                .iter()
                .any(|o| o.pattern == t && o.weight == edge_orbits[idx].weight);
            if !found {
                return Err(Error::TransposeClosure { orbit: idx });
            }
        }
        let n_min = n_min.unwrap_or(2 * k as u64 + 1);
        let mut raw_edge_index = HashMap::new();
        for (i, orbit) in edge_orbits.iter().enumerate() {
            for raw in pattern::raw_orbit(&group, &orbit.pattern) {
                raw_edge_index.insert(raw.matches().to_vec(), i);
            }
        }
        Ok(FamilySpec {
            name,
            k,
            generators,
            group,
            edge_orbits,
            n_min,
            raw_edge_index,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn edge_orbits(&self) -> &[EdgeOrbit] {
        &self.edge_orbits
    }

    pub fn n_min(&self) -> u64 {
        self.n_min
    }

    /// Same family declared valid from a different minimum n. Connectivity
    /// is still verified at instantiation time.
    pub fn with_n_min(mut self, n_min: u64) -> Self {
        self.n_min = n_min;
        self
    }

    /// Orbit index of the raw (uncanonicalized) equality pattern, if it is
    /// an edge.
    pub fn edge_orbit_of_raw(&self, matches: &[(u8, u8)]) -> Option<usize> {
        self.raw_edge_index.get(matches).copied()
    }

    /// All raw patterns that realize edges, with their orbit index.
    pub fn raw_edges(&self) -> impl Iterator<Item = (&Vec<(u8, u8)>, usize)> {
        let mut items: Vec<_> = self.raw_edge_index.iter().map(|(m, &i)| (m, i)).collect();
        items.sort();
        items.into_iter()
    }

    /// Exact weight of every orbit at `n`; errors on poles and negatives.
    pub fn orbit_weights_at(&self, n: u64) -> Result<Vec<Q>> {
        self.edge_orbits
            .iter()
            .map(|o| match o.weight.eval(n) {
                None => Err(Error::WeightPole {
                    weight: o.weight.to_string(),
                    n,
                }),
                Some(w) if w.is_negative() => Err(Error::NegativeWeight {
                    weight: o.weight.to_string(),
                    n,
                }),
                Some(w) => Ok(w),
            })
            .collect()
    }

    /// Number of vertex classes at `n`: `n (n-1) .. (n-k+1) / |H|`.
    pub fn vertex_count(&self, n: u64) -> BigInt {
        let mut falling = BigInt::one();
        for i in 0..self.k as u64 {
            falling *= BigInt::from(n - i);
        }
        let order = BigInt::from(self.group.order());
        debug_assert!((&falling % &order).is_zero());
        falling / order
    }

    /// Render a vertex for display: set style when the symmetry group is the
    /// full symmetric group, tuple style otherwise.
    pub fn format_vertex(&self, tuple: &[u32]) -> String {
        let inner = tuple
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        if self.group.is_full_symmetric() && self.k > 1 {
            format!("{{{inner}}}")
        } else {
            format!("({inner})")
        }
    }
}

/// A pair of group elements witnessing that two listed patterns lie in the
/// same orbit (used in closure-violation messages).
fn relabeling_witness(group: &PermGroup, canon: &PairPattern, raw: &PairPattern) -> String {
    for h_left in group.elements() {
        for h_right in group.elements() {
            let mut relabeled: Vec<(u8, u8)> = raw
                .matches()
                .iter()
                .map(|&(i, j)| {
                    (
                        h_left.apply(i as usize) as u8,
                        h_right.apply(j as usize) as u8,
                    )
                })
                .collect();
            relabeled.sort_unstable();
            if relabeled == canon.matches() {
                return format!("({h_left}, {h_right})");
            }
        }
    }
    "(unknown, unknown)".into()
}

/// One representative per `H`-class of injective `k`-tuples over
/// `{1,..,n}`, in sorted canonical order.
pub fn enumerate_vertices(spec: &FamilySpec, n: u64, cap: u64) -> Result<Vec<Vec<u32>>> {
    if n < spec.n_min {
        return Err(Error::BelowNMin {
            n,
            n_min: spec.n_min,
        });
    }
    let count = spec.vertex_count(n);
    if count > BigInt::from(cap) {
        return Err(Error::CapExceeded {
            count: count.to_string(),
            cap,
        });
    }
    let k = spec.k;
    let group = &spec.group;
    let mut out: Vec<Vec<u32>> = Vec::new();
    if group.is_trivial() {
        let mut current = Vec::with_capacity(k);
        let mut used = vec![false; n as usize + 1];
        enumerate_injective(n, k, &mut current, &mut used, &mut |t| out.push(t.to_vec()));
    } else if group.is_full_symmetric() {
        let mut combo: Vec<u32> = (1..=k as u32).collect();
        loop {
            out.push(combo.clone());
            // next k-combination of {1..n} in lex order
            let mut i = k;
            loop {
                if i == 0 {
                    return finish_enumeration(out, count);
                }
                i -= 1;
                if combo[i] < (n as u32) - (k as u32 - 1 - i as u32) {
                    combo[i] += 1;
                    for j in i + 1..k {
                        combo[j] = combo[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    } else {
        let mut combo: Vec<u32> = (1..=k as u32).collect();
        loop {
            let mut arrangement = combo.clone();
            permutations(&mut arrangement, 0, &mut |t| {
                if group.is_canonical_tuple(t) {
                    out.push(t.to_vec());
                }
            });
            let mut i = k;
            loop {
                if i == 0 {
                    return finish_enumeration(out, count);
                }
                i -= 1;
                if combo[i] < (n as u32) - (k as u32 - 1 - i as u32) {
                    combo[i] += 1;
                    for j in i + 1..k {
                        combo[j] = combo[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
    finish_enumeration(out, count)
}

fn finish_enumeration(mut out: Vec<Vec<u32>>, expected: BigInt) -> Result<Vec<Vec<u32>>> {
    out.sort_unstable();
    assert_eq!(
        BigInt::from(out.len()),
        expected,
        "vertex enumeration disagrees with the closed-form count"
    );
    Ok(out)
}

fn enumerate_injective(
    n: u64,
    k: usize,
    current: &mut Vec<u32>,
    used: &mut Vec<bool>,
    emit: &mut impl FnMut(&[u32]),
) {
    if current.len() == k {
        emit(current);
        return;
    }
    for v in 1..=n as u32 {
        if !used[v as usize] {
            used[v as usize] = true;
            current.push(v);
            enumerate_injective(n, k, current, used, emit);
            current.pop();
            used[v as usize] = false;
        }
    }
}

fn permutations(values: &mut Vec<u32>, start: usize, emit: &mut impl FnMut(&[u32])) {
    if start == values.len() {
        emit(values);
        return;
    }
    for i in start..values.len() {
        values.swap(start, i);
        permutations(values, start + 1, emit);
        values.swap(start, i);
    }
}

/// A fully materialized instance of a family at a specific `n`:
/// canonical vertex representatives, weighted adjacency by orbit, and the
/// common degree weight.
#[derive(Debug, Clone)]
pub struct GraphInstance {
    n: u64,
    k: usize,
    vertices: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    /// Per vertex: (neighbor index, edge-orbit index), sorted by neighbor.
    neighbors: Vec<Vec<(usize, usize)>>,
    orbit_weights: Vec<Q>,
    degree_weight: Q,
}

impl GraphInstance {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vec<u32>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &[u32] {
        &self.vertices[i]
    }

    pub fn index_of(&self, tuple: &[u32]) -> Option<usize> {
        self.index.get(tuple).copied()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.neighbors[v]
    }

    pub fn orbit_weight(&self, orbit: usize) -> &Q {
        &self.orbit_weights[orbit]
    }

    pub fn num_orbits(&self) -> usize {
        self.orbit_weights.len()
    }

    pub fn degree_weight(&self) -> &Q {
        &self.degree_weight
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }
}

/// Instantiate the family at `n`: enumerate canonical vertices, match
/// every ordered pair of classes against the edge orbits, and verify
/// regularity, weighted symmetry, and connectivity.
pub fn instantiate_graph(spec: &FamilySpec, n: u64, cap: u64) -> Result<GraphInstance> {
    let vertices = enumerate_vertices(spec, n, cap)?;
    let orbit_weights = spec.orbit_weights_at(n)?;
    let k = spec.k;
    let group_order = spec.group.order();
    let index: HashMap<Vec<u32>, usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();

    let mut neighbors: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vertices.len()];
    for (u_idx, u) in vertices.iter().enumerate() {
        let mut seen: HashMap<usize, (usize, usize)> = HashMap::new();
        for_each_neighbor_tuple(spec, u, n, &mut |tuple, orbit| {
            let rep = spec.group.canonical_tuple(tuple);
            let v_idx = *index
                .get(&rep)
                .expect("neighbor canonical form must be an enumerated vertex");
            let entry = seen.entry(v_idx).or_insert((orbit, 0));
            assert_eq!(
                entry.0, orbit,
                "one class pair matched two distinct edge orbits"
            );
            entry.1 += 1;
        });
        let mut adj: Vec<(usize, usize)> = seen
            .iter()
            .map(|(&v_idx, &(orbit, hits))| {
                assert_eq!(
                    hits, group_order,
                    "each neighbor class must be hit once per group element"
                );
                (v_idx, orbit)
            })
            .collect();
        adj.sort_unstable();
        neighbors[u_idx] = adj;
    }

    // regularity of the total outgoing weight
    let weight_of = |adj: &[(usize, usize)]| -> Q {
        adj.iter()
            .map(|&(_, orbit)| orbit_weights[orbit].clone())
            .fold(Q::zero(), |acc, w| acc + w)
    };
    let degree_weight = weight_of(&neighbors[0]);
    for (v, adj) in neighbors.iter().enumerate() {
        let w = weight_of(adj);
        assert_eq!(
            w, degree_weight,
            "vertex {v} has degree weight {w}, expected {degree_weight}"
        );
    }

    // weighted symmetry of the adjacency relation
    for (u_idx, adj) in neighbors.iter().enumerate() {
        for &(v_idx, orbit) in adj {
            let back = neighbors[v_idx]
                .binary_search_by_key(&u_idx, |&(w, _)| w)
                .ok()
                .map(|pos| neighbors[v_idx][pos].1);
            match back {
                Some(back_orbit) if orbit_weights[back_orbit] == orbit_weights[orbit] => {}
                _ => panic!(
                    "adjacency not symmetric as a weighted relation at pair ({u_idx}, {v_idx})"
                ),
            }
        }
    }

    // connectivity (ignoring zero-weight orbits)
    let mut reached = vec![false; vertices.len()];
    let mut stack = vec![0usize];
    reached[0] = true;
    while let Some(v) = stack.pop() {
        for &(w, orbit) in &neighbors[v] {
            if !reached[w] && !orbit_weights[orbit].is_zero() {
                reached[w] = true;
                stack.push(w);
            }
        }
    }
    if let Some(missing) = reached.iter().position(|&r| !r) {
        return Err(Error::Disconnected {
            n,
            rep_a: spec.format_vertex(&vertices[0]),
            rep_b: spec.format_vertex(&vertices[missing]),
        });
    }

    Ok(GraphInstance {
        n,
        k,
        vertices,
        index,
        neighbors,
        orbit_weights,
        degree_weight,
    })
}

/// Enumerate every tuple adjacent to `base` in the instance at `n`,
/// together with the edge orbit realizing the adjacency. Each neighbor
/// class is visited once per member tuple, so class-level quantities are
/// obtained by grouping. Runs without materializing the vertex set.
pub fn for_each_neighbor_tuple(
    spec: &FamilySpec,
    base: &[u32],
    n: u64,
    visit: &mut impl FnMut(&[u32], usize),
) {
    let k = spec.k;
    assert_eq!(base.len(), k);
    let mut avail: Vec<u32> = Vec::with_capacity(n as usize - k);
    let mut used = vec![false; n as usize + 1];
    for &v in base {
        used[v as usize] = true;
    }
    for v in 1..=n as u32 {
        if !used[v as usize] {
            avail.push(v);
        }
    }
    let mut scratch = vec![0u32; k];
    for (raw, orbit) in spec.raw_edges() {
        let m = raw.len();
        if (2 * k - m) as u64 > n {
            continue;
        }
        scratch.iter_mut().for_each(|v| *v = 0);
        for &(i, j) in raw {
            scratch[j as usize] = base[i as usize];
        }
        let free_positions: Vec<usize> = (0..k).filter(|&j| scratch[j] == 0).collect();
        fill_free(
            &mut scratch,
            &free_positions,
            0,
            &avail,
            &mut vec![false; avail.len()],
            &mut |tuple| visit(tuple, orbit),
        );
    }
}

fn fill_free(
    tuple: &mut Vec<u32>,
    free_positions: &[usize],
    depth: usize,
    avail: &[u32],
    used: &mut Vec<bool>,
    emit: &mut impl FnMut(&[u32]),
) {
    if depth == free_positions.len() {
        emit(tuple);
        return;
    }
    for (i, &v) in avail.iter().enumerate() {
        if !used[i] {
            used[i] = true;
            tuple[free_positions[depth]] = v;
            fill_free(tuple, free_positions, depth + 1, avail, used, emit);
            used[i] = false;
        }
    }
    tuple[free_positions[depth]] = 0;
}

/// Total edge weight at every vertex class, in closed form from the raw
/// pattern expansion: no enumeration, so it is available at any `n`.
pub fn class_degree_weight(spec: &FamilySpec, n: u64) -> Result<Q> {
    let weights = spec.orbit_weights_at(n)?;
    let k = spec.k() as u64;
    let mut total = Q::zero();
    for (raw, orbit) in spec.raw_edges() {
        let m = raw.len() as u64;
        if 2 * k - m > n {
            continue;
        }
        let mut fills = BigInt::one();
        for i in 0..k - m {
            fills *= BigInt::from(n - k - i);
        }
        total += &weights[orbit] * Q::from_integer(fills);
    }
    Ok(total / Q::from_integer(BigInt::from(spec.group().order())))
}

/// Canonical equality pattern between two vertex representatives. Two
/// pairs return the same pattern exactly when an ambient relabeling of the
/// ground set carries one pair to the other.
pub fn pair_orbit(spec: &FamilySpec, u: &[u32], v: &[u32]) -> Result<PairPattern> {
    if u.len() != v.len() {
        return Err(Error::MismatchedLength(u.len(), v.len()));
    }
    if u.len() != spec.k {
        return Err(Error::MismatchedLength(u.len(), spec.k));
    }
    Ok(pattern::canonicalize(
        &spec.group,
        &PairPattern::from_tuples(u, v),
    ))
}

// ---------------------------------------------------------------------------
// document format

/// Serialized form of a family specification.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDocument {
    pub name: String,
    pub k: u64,
    #[serde(default)]
    pub symmetry_generators: Vec<Vec<u64>>,
    pub edge_orbits: Vec<EdgeOrbitDocument>,
    #[serde(default)]
    pub n_min: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeOrbitDocument {
    pub matches: Vec<[u64; 2]>,
    pub weight: WeightDocument,
}

/// Rational-function weight as ascending-degree integer coefficient lists.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightDocument {
    pub num: Vec<i64>,
    #[serde(default = "default_den")]
    pub den: Vec<i64>,
}

fn default_den() -> Vec<i64> {
    vec![1]
}

/// Parse and validate a family-spec document (JSON text).
pub fn parse_family_spec(text: &str) -> Result<FamilySpec> {
    let doc: FamilyDocument = serde_json::from_str(text).map_err(|e| Error::Schema {
        field: "document".into(),
        reason: e.to_string(),
    })?;
    family_from_document(&doc)
}

pub fn family_from_document(doc: &FamilyDocument) -> Result<FamilySpec> {
    let k = doc.k as usize;
    let generators: Vec<Perm> = doc
        .symmetry_generators
        .iter()
        .map(|g| Perm::from_one_line(g))
        .collect::<Result<_>>()?;
    let mut orbits = Vec::new();
    for (idx, orbit_doc) in doc.edge_orbits.iter().enumerate() {
        let matches: Vec<(u8, u8)> = orbit_doc
            .matches
            .iter()
            .map(|&[i, j]| {
                if i == 0 || j == 0 {
                    return Err(Error::Schema {
                        field: format!("edge_orbits[{idx}].matches"),
                        reason: "coordinate indices are 1-based".into(),
                    });
                }
                Ok((i as u8 - 1, j as u8 - 1))
            })
            .collect::<Result<_>>()?;
        let pattern = PairPattern::new(k, k, matches).map_err(|e| match e {
            Error::Schema { reason, .. } => Error::Schema {
                field: format!("edge_orbits[{idx}].matches"),
                reason,
            },
            other => other,
        })?;
        if orbit_doc.weight.den.iter().all(|&c| c == 0) {
            return Err(Error::Schema {
                field: format!("edge_orbits[{idx}].weight.den"),
                reason: "denominator must not be identically zero".into(),
            });
        }
        let weight = RationalFunction::new(
            Poly::from_i64(&orbit_doc.weight.num),
            Poly::from_i64(&orbit_doc.weight.den),
        );
        orbits.push((pattern, weight));
    }
    FamilySpec::new(doc.name.clone(), k, generators, orbits, doc.n_min)
}

/// Inverse of `parse_family_spec` for round-tripping built-ins to disk.
pub fn family_to_document(spec: &FamilySpec) -> FamilyDocument {
    FamilyDocument {
        name: spec.name.clone(),
        k: spec.k as u64,
        symmetry_generators: spec.generators.iter().map(|p| p.one_line()).collect(),
        edge_orbits: spec
            .edge_orbits
            .iter()
            .map(|o| EdgeOrbitDocument {
                matches: o.pattern.matches_one_based(),
                weight: WeightDocument {
                    num: poly_to_i64(o.weight.numerator()),
                    den: poly_to_i64(o.weight.denominator()),
                },
            })
            .collect(),
        n_min: Some(spec.n_min),
    }
}

fn poly_to_i64(p: &Poly) -> Vec<i64> {
    let coeffs: Vec<i64> = p
        .coeffs()
        .iter()
        .map(|c| i64::try_from(c).expect("built-in weight coefficients fit i64"))
        .collect();
    if coeffs.is_empty() {
        vec![0]
    } else {
        coeffs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::builtin_family;
    use crate::ratfun::q_int;

    fn kneser2() -> FamilySpec {
        builtin_family("kneser", &[2]).unwrap()
    }

    #[test]
    fn kneser_document_roundtrip() {
        let spec = kneser2();
        let doc = family_to_document(&spec);
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let parsed = parse_family_spec(&text).unwrap();
        assert_eq!(parsed.k(), 2);
        assert_eq!(parsed.group().order(), 2);
        assert_eq!(parsed.edge_orbits().len(), 1);
        assert_eq!(parsed.n_min(), 5);
    }

    #[test]
    fn missing_transpose_is_rejected() {
        // k = 2, trivial symmetry, only the asymmetric pattern (1,2):
        // u_1 = v_2. Its transpose (2,1) is absent.
        let text = r#"{
            "name": "broken",
            "k": 2,
            "edge_orbits": [{"matches": [[1, 2]], "weight": {"num": [1]}}]
        }"#;
        match parse_family_spec(text) {
            Err(Error::TransposeClosure { orbit: 0 }) => {}
            other => panic!("expected transpose-closure error, got {other:?}"),
        }
    }

    #[test]
    fn conflicting_weights_in_one_orbit_are_rejected() {
        // under H = S_2 the patterns (1,1) and (2,2) are one orbit; listing
        // them with different weights violates symmetry closure
        let text = r#"{
            "name": "broken",
            "k": 2,
            "symmetry_generators": [[2, 1]],
            "edge_orbits": [
                {"matches": [[1, 1]], "weight": {"num": [1]}},
                {"matches": [[2, 2]], "weight": {"num": [2]}}
            ]
        }"#;
        match parse_family_spec(text) {
            Err(Error::SymmetryClosure { orbit: 1, .. }) => {}
            other => panic!("expected symmetry-closure error, got {other:?}"),
        }
    }

    #[test]
    fn self_loop_pattern_is_rejected() {
        let text = r#"{
            "name": "loopy",
            "k": 2,
            "edge_orbits": [{"matches": [[1, 1], [2, 2]], "weight": {"num": [1]}}]
        }"#;
        match parse_family_spec(text) {
            Err(Error::Schema { field, .. }) => assert!(field.contains("edge_orbits[0]")),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn swapped_full_matching_is_a_valid_edge() {
        // (1,2)->(2,1) swaps the coordinates: a legitimate move when the
        // symmetry group is trivial
        let text = r#"{
            "name": "swapper",
            "k": 2,
            "edge_orbits": [{"matches": [[1, 2], [2, 1]], "weight": {"num": [1]}}]
        }"#;
        let spec = parse_family_spec(text).unwrap();
        assert_eq!(spec.edge_orbits().len(), 1);
    }

    #[test]
    fn vertex_counts_match_closed_form() {
        let spec = kneser2();
        let v = enumerate_vertices(&spec, 5, 1000).unwrap();
        assert_eq!(v.len(), 10);
        let complete = builtin_family("complete", &[]).unwrap();
        let v = enumerate_vertices(&complete, 7, 1000).unwrap();
        assert_eq!(v.len(), 7);
        // ordered pairs with trivial symmetry at n = 4: 4 * 3 = 12
        let pairs = builtin_family("ordered-pair-weighted", &[])
            .unwrap()
            .with_n_min(4);
        let v = enumerate_vertices(&pairs, 4, 1000).unwrap();
        assert_eq!(v.len(), 12);
    }

    #[test]
    fn petersen_adjacency_matches_brute_force() {
        // oracle: each 2-subset of {1..5} is adjacent to exactly the
        // disjoint 2-subsets, giving the 3-regular Petersen graph
        let spec = kneser2();
        let g = instantiate_graph(&spec, 5, 1000).unwrap();
        assert_eq!(g.num_vertices(), 10);
        for v in 0..10 {
            assert_eq!(g.degree(v), 3);
            let tuple_v = g.vertex(v);
            for &(w, _) in g.neighbors(v) {
                let tuple_w = g.vertex(w);
                assert!(
                    tuple_v.iter().all(|a| !tuple_w.contains(a)),
                    "adjacent subsets must be disjoint"
                );
            }
        }
        assert_eq!(*g.degree_weight(), q_int(3));
    }

    #[test]
    fn kneser_below_threshold_is_disconnected() {
        let spec = kneser2().with_n_min(4);
        match instantiate_graph(&spec, 4, 1000) {
            Err(Error::Disconnected { n: 4, .. }) => {}
            other => panic!("expected disconnected error, got {other:?}"),
        }
    }

    #[test]
    fn cap_is_enforced() {
        let spec = kneser2();
        match enumerate_vertices(&spec, 100, 10) {
            Err(Error::CapExceeded { cap: 10, .. }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn pair_orbit_examples() {
        let spec = kneser2();
        let p = pair_orbit(&spec, &[1, 2], &[1, 3]).unwrap();
        assert_eq!(p.match_count(), 1);
        let q = pair_orbit(&spec, &[1, 2], &[1, 2]).unwrap();
        assert!(q.is_full());
        let r = pair_orbit(&spec, &[1, 2], &[3, 4]).unwrap();
        assert_eq!(r.match_count(), 0);
        assert!(pair_orbit(&spec, &[1, 2], &[1, 2, 3]).is_err());
    }

    #[test]
    fn adjacency_depends_only_on_pair_orbit() {
        let spec = kneser2();
        let g = instantiate_graph(&spec, 6, 1000).unwrap();
        for u in 0..g.num_vertices() {
            for v in 0..g.num_vertices() {
                if u == v {
                    continue;
                }
                let p = pair_orbit(&spec, g.vertex(u), g.vertex(v)).unwrap();
                let adjacent = g.neighbors(u).binary_search_by_key(&v, |&(w, _)| w).is_ok();
                let is_edge = spec
                    .edge_orbits()
                    .iter()
                    .any(|o| *o.pattern() == p);
                assert_eq!(adjacent, is_edge);
            }
        }
    }
}
