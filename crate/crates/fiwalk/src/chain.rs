//! Exact reversible Markov chains: construction from graph instances,
//! total-variation mixing times by exact row powering, floating-point
//! spectra with multiplicity clustering, relaxation times, bipartiteness,
//! and the relaxation/mixing sandwich bounds.
//!
//! The split is deliberate: transition matrices, stationary vectors, TV
//! distances, and mixing times are exact rationals; only eigenvalues pass
//! through floating point.

use nalgebra::DMatrix;
use num::bigint::BigInt;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{nullspace_vector, SharedDenRow, StepMatrix};
use crate::family::GraphInstance;
use crate::ratfun::Q;

pub const DEFAULT_HORIZON: u64 = 1_000_000;
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;
/// Worst-case-over-starts computations are refused above this state count.
pub const WORST_CASE_STATE_CAP: usize = 2_000;

/// Transition structure: dense rows for small chains, or the shared
/// neighbor-orbit form of a walk on a graph instance (one probability per
/// edge orbit plus a holding probability).
#[derive(Debug, Clone)]
enum Transition {
    Dense(Vec<Vec<Q>>),
    Walk {
        neighbors: Vec<Vec<(usize, usize)>>,
        step_probs: Vec<Q>,
        holding: Q,
    },
}

/// A finite, connected, reversible Markov chain with exact transition
/// probabilities and stationary distribution. Immutable after construction.
#[derive(Debug, Clone)]
pub struct Chain {
    states: Vec<String>,
    transition: Transition,
    stationary: Vec<Q>,
    laziness: Q,
    transitive: bool,
}

impl Chain {
    /// Dense chain with the stationary distribution solved exactly from
    /// `pi P = pi`. Verifies row sums, connectivity, and reversibility.
    pub fn from_dense(states: Vec<String>, rows: Vec<Vec<Q>>, laziness: Q) -> Result<Self> {
        let stationary = solve_stationary(&rows)?;
        Chain::with_stationary(states, rows, stationary, laziness, false)
    }

    /// Dense chain with a caller-supplied stationary distribution, verified
    /// exactly.
    pub fn with_stationary(
        states: Vec<String>,
        rows: Vec<Vec<Q>>,
        stationary: Vec<Q>,
        laziness: Q,
        transitive: bool,
    ) -> Result<Self> {
        let dim = states.len();
        assert_eq!(rows.len(), dim);
        assert_eq!(stationary.len(), dim);
        let one = Q::one();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), dim);
            let sum: Q = row.iter().fold(Q::zero(), |acc, v| acc + v);
            if sum != one {
                return Err(Error::RowSum(i));
            }
        }
        let chain = Chain {
            states,
            transition: Transition::Dense(rows),
            stationary,
            laziness,
            transitive,
        };
        chain.verify_stationary()?;
        chain.verify_connected()?;
        chain.verify_reversible()?;
        Ok(chain)
    }

    /// The random walk on a graph instance: from each class, step along an
    /// incident edge with probability proportional to its orbit weight,
    /// scaled by `1 - laziness`; hold with probability `laziness`. The
    /// stationary distribution is uniform (the instance is regular) and is
    /// verified, as is reversibility.
    pub fn walk_on(instance: &GraphInstance, states: Vec<String>, laziness: Q) -> Result<Self> {
        assert!(!laziness.is_negative() && laziness < Q::one());
        let dim = instance.num_vertices();
        assert_eq!(states.len(), dim);
        let total = instance.degree_weight();
        assert!(
            total.is_positive(),
            "walk on an instance with zero total edge weight"
        );
        let scale = (Q::one() - &laziness) / total;
        let step_probs: Vec<Q> = (0..instance.num_orbits())
            .map(|o| instance.orbit_weight(o) * &scale)
            .collect();
        let neighbors: Vec<Vec<(usize, usize)>> =
            (0..dim).map(|v| instance.neighbors(v).to_vec()).collect();
        let uniform = Q::new(BigInt::one(), BigInt::from(dim));
        let chain = Chain {
            states,
            transition: Transition::Walk {
                neighbors,
                step_probs,
                holding: laziness.clone(),
            },
            stationary: vec![uniform; dim],
            laziness,
            transitive: true,
        };
        chain.verify_row_sums()?;
        chain.verify_stationary()?;
        chain.verify_connected()?;
        chain.verify_reversible()?;
        Ok(chain)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn stationary(&self) -> &[Q] {
        &self.stationary
    }

    pub fn laziness(&self) -> &Q {
        &self.laziness
    }

    pub fn is_transitive(&self) -> bool {
        self.transitive
    }

    /// Exact transition probability.
    pub fn prob(&self, from: usize, to: usize) -> Q {
        match &self.transition {
            Transition::Dense(rows) => rows[from][to].clone(),
            Transition::Walk {
                neighbors,
                step_probs,
                holding,
            } => {
                if from == to {
                    return holding.clone();
                }
                match neighbors[from].binary_search_by_key(&to, |&(v, _)| v) {
                    Ok(pos) => step_probs[neighbors[from][pos].1].clone(),
                    Err(_) => Q::zero(),
                }
            }
        }
    }

    /// Sparse row as (column, probability) pairs, zero entries omitted.
    pub fn sparse_row(&self, from: usize) -> Vec<(usize, Q)> {
        match &self.transition {
            Transition::Dense(rows) => rows[from]
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(j, v)| (j, v.clone()))
                .collect(),
            Transition::Walk {
                neighbors,
                step_probs,
                holding,
            } => {
                let mut row: Vec<(usize, Q)> = Vec::with_capacity(neighbors[from].len() + 1);
                if !holding.is_zero() {
                    row.push((from, holding.clone()));
                }
                for &(v, o) in &neighbors[from] {
                    if !step_probs[o].is_zero() {
                        row.push((v, step_probs[o].clone()));
                    }
                }
                row.sort_unstable_by_key(|&(j, _)| j);
                row
            }
        }
    }

    pub fn step_matrix(&self) -> StepMatrix {
        StepMatrix::from_sparse_rows(self.len(), (0..self.len()).map(|i| self.sparse_row(i)))
    }

    fn verify_row_sums(&self) -> Result<()> {
        let one = Q::one();
        for i in 0..self.len() {
            let sum: Q = self
                .sparse_row(i)
                .into_iter()
                .fold(Q::zero(), |acc, (_, v)| acc + v);
            if sum != one {
                return Err(Error::RowSum(i));
            }
        }
        Ok(())
    }

    /// `pi P = pi`, exactly, via one pass over the nonzero entries.
    fn verify_stationary(&self) -> Result<()> {
        let mut acc = vec![Q::zero(); self.len()];
        for i in 0..self.len() {
            for (j, p) in self.sparse_row(i) {
                acc[j] += &self.stationary[i] * p;
            }
        }
        for (j, v) in acc.iter().enumerate() {
            if *v != self.stationary[j] {
                return Err(Error::Config(format!(
                    "stationary vector is not invariant at state {j}"
                )));
            }
            if !self.stationary[j].is_positive() {
                return Err(Error::Config(format!(
                    "stationary entry {j} is not positive"
                )));
            }
        }
        let total: Q = self.stationary.iter().fold(Q::zero(), |acc, v| acc + v);
        if total != Q::one() {
            return Err(Error::Config("stationary vector does not sum to 1".into()));
        }
        Ok(())
    }

    fn verify_connected(&self) -> Result<()> {
        let mut reached = vec![false; self.len()];
        let mut stack = vec![0usize];
        reached[0] = true;
        while let Some(v) = stack.pop() {
            for (w, p) in self.sparse_row(v) {
                if !reached[w] && p.is_positive() {
                    reached[w] = true;
                    stack.push(w);
                }
            }
        }
        match reached.iter().position(|&r| !r) {
            Some(_) => Err(Error::Config("chain is not connected".into())),
            None => Ok(()),
        }
    }

    /// Detailed balance `pi(x) P(x,y) = pi(y) P(y,x)`, exactly.
    fn verify_reversible(&self) -> Result<()> {
        for x in 0..self.len() {
            for (y, p_xy) in self.sparse_row(x) {
                if y < x {
                    continue; // each unordered pair once
                }
                let lhs = &self.stationary[x] * &p_xy;
                let rhs = &self.stationary[y] * self.prob(y, x);
                if lhs != rhs {
                    return Err(Error::NotReversible(x, y));
                }
            }
        }
        Ok(())
    }

    /// Whether the chain is guaranteed aperiodic: positive holding
    /// probability somewhere, or a spectrum that is not symmetric about 0.
    fn check_aperiodic(&self) -> Result<()> {
        if self.laziness.is_positive() {
            return Ok(());
        }
        for i in 0..self.len() {
            if self.prob(i, i).is_positive() {
                return Ok(());
            }
        }
        let spec = spectrum(self, DEFAULT_CLUSTER_TOL)?;
        if bipartite_test(&spec, 1e-7) {
            return Err(Error::Periodic);
        }
        Ok(())
    }
}

fn solve_stationary(rows: &[Vec<Q>]) -> Result<Vec<Q>> {
    let dim = rows.len();
    if dim == 0 {
        return Err(Error::Degenerate);
    }
    // kernel of (P^T - I)
    let mut system = vec![vec![Q::zero(); dim]; dim];
    for (i, row) in rows.iter().enumerate() {
        for (j, p) in row.iter().enumerate() {
            system[j][i] = p.clone();
        }
    }
    for (i, row) in system.iter_mut().enumerate() {
        row[i] -= Q::one();
    }
    let v = nullspace_vector(system).ok_or(Error::SingularSystem)?;
    let total: Q = v.iter().fold(Q::zero(), |acc, x| acc + x);
    if total.is_zero() {
        return Err(Error::SingularSystem);
    }
    Ok(v.into_iter().map(|x| x / &total).collect())
}

/// Exact total variation distance between two distributions of equal
/// length: half the L1 distance.
pub fn tv_distance(mu: &[Q], nu: &[Q]) -> Result<Q> {
    if mu.len() != nu.len() {
        return Err(Error::MismatchedLength(mu.len(), nu.len()));
    }
    let two = Q::from_integer(BigInt::from(2));
    let sum = mu
        .iter()
        .zip(nu)
        .fold(Q::zero(), |acc, (a, b)| acc + (a - b).abs());
    Ok(sum / two)
}

/// Sequence of exact TV distances to stationary from a fixed start.
#[derive(Debug, Clone)]
pub struct MixingProfile {
    pub start_state: usize,
    pub distances: Vec<Q>,
    pub horizon: u64,
}

pub fn mixing_profile(chain: &Chain, start: usize, horizon: u64) -> MixingProfile {
    let matrix = chain.step_matrix();
    let pi = SharedDenRow::from_rationals(chain.stationary());
    let mut row = SharedDenRow::point_mass(chain.len(), start);
    let mut distances = Vec::with_capacity(horizon as usize + 1);
    distances.push(row.tv_to(&pi));
    for t in 1..=horizon {
        row = matrix.apply_row(&row);
        if t % 8 == 0 {
            row.normalize();
        }
        distances.push(row.tv_to(&pi));
    }
    let half = Q::new(BigInt::one(), BigInt::from(2));
    if chain.laziness() >= &half {
        for w in distances.windows(2) {
            assert!(w[1] <= w[0], "TV distance must be non-increasing for lazy chains");
        }
    }
    MixingProfile {
        start_state: start,
        distances,
        horizon,
    }
}

/// First times at which the exact TV distance from `start` drops to each
/// epsilon. One pass of exact row powering serves all thresholds.
pub fn mixing_times(
    chain: &Chain,
    start: usize,
    epsilons: &[Q],
    horizon: u64,
) -> Result<Vec<u64>> {
    for eps in epsilons {
        if !eps.is_positive() || *eps >= Q::one() {
            return Err(Error::Config(format!(
                "epsilon must lie in (0,1), got {eps}"
            )));
        }
    }
    chain.check_aperiodic()?;
    let matrix = chain.step_matrix();
    let pi = SharedDenRow::from_rationals(chain.stationary());
    let mut row = SharedDenRow::point_mass(chain.len(), start);
    let mut hit: Vec<Option<u64>> = vec![None; epsilons.len()];
    let mut remaining = epsilons.len();
    let mut t = 0u64;
    loop {
        let d = row.tv_to(&pi);
        for (i, eps) in epsilons.iter().enumerate() {
            if hit[i].is_none() && d <= *eps {
                hit[i] = Some(t);
                remaining -= 1;
            }
        }
        if remaining == 0 {
            return Ok(hit.into_iter().map(|h| h.unwrap()).collect());
        }
        if t >= horizon {
            return Err(Error::HorizonExhausted(horizon));
        }
        row = matrix.apply_row(&row);
        t += 1;
        if t % 8 == 0 {
            row.normalize();
        }
    }
}

pub fn mixing_time(chain: &Chain, start: usize, epsilon: &Q) -> Result<u64> {
    Ok(mixing_times(chain, start, &[epsilon.clone()], DEFAULT_HORIZON)?[0])
}

/// Worst-case mixing time over starting states. Transitive chains are
/// start-independent, so a single start suffices; otherwise every start is
/// tried, gated by the state cap.
pub fn mixing_time_worst(chain: &Chain, epsilon: &Q) -> Result<u64> {
    if chain.is_transitive() {
        return mixing_time(chain, 0, epsilon);
    }
    if chain.len() > WORST_CASE_STATE_CAP {
        return Err(Error::CapExceeded {
            count: chain.len().to_string(),
            cap: WORST_CASE_STATE_CAP as u64,
        });
    }
    let mut worst = 0;
    for start in 0..chain.len() {
        worst = worst.max(mixing_time(chain, start, epsilon)?);
    }
    Ok(worst)
}

/// Clustered eigenvalues of the symmetrized transition matrix, descending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub cluster_tolerance: f64,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn num_distinct(&self) -> usize {
        self.eigenvalues.len()
    }

    /// (value, multiplicity) pairs.
    pub fn clusters(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.eigenvalues
            .iter()
            .copied()
            .zip(self.multiplicities.iter().copied())
    }
}

/// Eigenvalues of `D^{1/2} P D^{-1/2}` (D the diagonal of the stationary
/// distribution), clustered at the given tolerance. Reversibility makes the
/// symmetrized matrix exactly `sqrt(P(x,y) P(y,x))` off the diagonal.
pub fn spectrum(chain: &Chain, cluster_tolerance: f64) -> Result<Spectrum> {
    let dim = chain.len();
    let mut sym = DMatrix::<f64>::zeros(dim, dim);
    for x in 0..dim {
        for (y, p_xy) in chain.sparse_row(x) {
            if y < x {
                continue;
            }
            if y == x {
                sym[(x, x)] = p_xy.to_f64().unwrap_or(f64::NAN);
                continue;
            }
            let back = chain.prob(y, x);
            let value = (&p_xy * back).to_f64().unwrap_or(f64::NAN).sqrt();
            sym[(x, y)] = value;
            sym[(y, x)] = value;
        }
    }
    finish_spectrum(sym, dim, cluster_tolerance)
}

/// Spectrum of the walk on a regular instance without building an exact
/// chain: the walk matrix is symmetric, so the floating matrix is filled
/// straight from the neighbor lists.
pub fn spectrum_of_instance(
    instance: &GraphInstance,
    laziness: &Q,
    cluster_tolerance: f64,
) -> Result<Spectrum> {
    let dim = instance.num_vertices();
    let scale = (Q::one() - laziness) / instance.degree_weight();
    let probs: Vec<f64> = (0..instance.num_orbits())
        .map(|o| {
            (instance.orbit_weight(o) * &scale)
                .to_f64()
                .unwrap_or(f64::NAN)
        })
        .collect();
    let hold = laziness.to_f64().unwrap_or(f64::NAN);
    let mut sym = DMatrix::<f64>::zeros(dim, dim);
    for u in 0..dim {
        sym[(u, u)] = hold;
        for &(v, o) in instance.neighbors(u) {
            sym[(u, v)] = probs[o];
        }
    }
    finish_spectrum(sym, dim, cluster_tolerance)
}

fn finish_spectrum(sym: DMatrix<f64>, dim: usize, cluster_tolerance: f64) -> Result<Spectrum> {
    let mut values: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("eigensolver produced non-finite values".into()));
    }
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let spec = cluster_eigenvalues(&values, cluster_tolerance);
    // sanity: eigenvalues of a stochastic symmetrization live in [-1, 1]
    for &v in &spec.eigenvalues {
        assert!(
            v.abs() <= 1.0 + 10.0 * cluster_tolerance,
            "eigenvalue {v} outside [-1,1]"
        );
    }
    assert_eq!(spec.dim(), dim);
    assert!(
        (spec.eigenvalues[0] - 1.0).abs() <= 10.0 * cluster_tolerance,
        "leading eigenvalue must be 1 for a stochastic chain"
    );
    assert_eq!(
        spec.multiplicities[0], 1,
        "leading eigenvalue of a connected chain is simple"
    );
    Ok(spec)
}

fn cluster_eigenvalues(sorted_desc: &[f64], tol: f64) -> Spectrum {
    let mut eigenvalues = Vec::new();
    let mut multiplicities = Vec::new();
    let mut cluster_start = 0;
    for i in 1..=sorted_desc.len() {
        if i == sorted_desc.len() || sorted_desc[i - 1] - sorted_desc[i] > tol {
            let cluster = &sorted_desc[cluster_start..i];
            eigenvalues.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
            multiplicities.push(cluster.len());
            cluster_start = i;
        }
    }
    Spectrum {
        eigenvalues,
        multiplicities,
        cluster_tolerance: tol,
    }
}

/// `1 / (1 - lambda)` where lambda is the largest absolute non-leading
/// eigenvalue.
pub fn relaxation_time(spec: &Spectrum) -> Result<f64> {
    if spec.dim() <= 1 || spec.num_distinct() <= 1 {
        return Err(Error::Degenerate);
    }
    let lambda = lambda_star(spec);
    if lambda >= 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (1.0 - lambda))
}

/// Largest absolute value among non-leading eigenvalues.
pub fn lambda_star(spec: &Spectrum) -> f64 {
    spec.eigenvalues[1..]
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max)
}

/// Spectral bipartiteness: the eigenvalue multiset is symmetric about 0
/// with matching multiplicities.
pub fn bipartite_test(spec: &Spectrum, tol: f64) -> bool {
    let c = spec.eigenvalues.len();
    for i in 0..c {
        let j = c - 1 - i;
        if (spec.eigenvalues[i] + spec.eigenvalues[j]).abs() > tol
            || spec.multiplicities[i] != spec.multiplicities[j]
        {
            return false;
        }
    }
    true
}

/// The relaxation/mixing sandwich at a given epsilon:
/// `(t_rel - 1) log(1/(2 eps)) <= t_mix(eps) <= t_rel log(1/(eps pi_min))`.
#[derive(Debug, Clone)]
pub struct MixingBounds {
    pub epsilon: Q,
    pub t_rel: f64,
    pub t_mix: u64,
    pub lower: f64,
    pub upper: f64,
    pub pi_min: f64,
    pub holds: bool,
}

pub fn verify_mixing_bounds(chain: &Chain, epsilon: &Q) -> Result<MixingBounds> {
    let spec = spectrum(chain, DEFAULT_CLUSTER_TOL)?;
    let t_rel = relaxation_time(&spec)?;
    let t_mix = mixing_time_worst(chain, epsilon)?;
    let pi_min = chain
        .stationary()
        .iter()
        .map(|q| q.to_f64().unwrap_or(f64::NAN))
        .fold(f64::INFINITY, f64::min);
    let eps = epsilon.to_f64().unwrap_or(f64::NAN);
    let lower = (t_rel - 1.0) * (1.0 / (2.0 * eps)).ln();
    let upper = t_rel * (1.0 / (eps * pi_min)).ln();
    let slack = 1e-9 * (1.0 + lower.abs().max(upper.abs()));
    let t = t_mix as f64;
    let holds = lower <= t + slack && t <= upper + slack;
    Ok(MixingBounds {
        epsilon: epsilon.clone(),
        t_rel,
        t_mix,
        lower,
        upper,
        pi_min,
        holds,
    })
}
