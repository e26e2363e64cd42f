//! Sweeps a family across `n` and renders the structural verdicts:
//! stabilization of the distinct-eigenvalue count, exact rational fits of
//! swept quantities, polynomial growth of eigenvalue multiplicities,
//! failure of the product condition, and the absence of a cutoff profile.

use num::bigint::BigInt;
use num::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::chain::{
    mixing_times, relaxation_time, lambda_star, spectrum, spectrum_of_instance, Chain,
    Spectrum, DEFAULT_CLUSTER_TOL, DEFAULT_HORIZON,
};
use crate::error::{Error, Result};
use crate::family::{class_degree_weight, instantiate_graph, FamilySpec};
use crate::hitting::large_set_hitting_time;
use crate::orbit::{build_orbit_walk, root_vertex, verify_state_stability};
use crate::ratfun::{rationalize, Poly, Q, RationalFunction};

/// Caps controlling which exact computations run at each swept `n`.
#[derive(Debug, Clone)]
pub struct SweepCaps {
    /// Full graphs are instantiated (and full-vs-quotient mixing equality
    /// asserted) only while the vertex count stays under this bound.
    pub full_graph_states: u64,
    /// Exhaustive hitting times are computed only while the quotient state
    /// count stays under this bound.
    pub hitting_states: usize,
}

impl Default for SweepCaps {
    fn default() -> Self {
        SweepCaps {
            full_graph_states: 2_000,
            hitting_states: 15,
        }
    }
}

/// Everything measured at one value of `n`.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub n: u64,
    pub num_vertices: BigInt,
    pub degree_weight: Q,
    pub quotient_states: usize,
    pub num_distinct_eigs: usize,
    pub lambda2_abs: f64,
    pub t_rel: f64,
    /// quotient spectrum clusters, descending (value, multiplicity)
    pub eig_clusters: Vec<(f64, usize)>,
    /// mixing times from the root, aligned with the epsilon list
    pub t_mix: Vec<u64>,
    /// exact hitting times aligned with the alpha list; `None` when the
    /// quotient exceeds the exhaustive cap
    pub t_hit: Option<Vec<Q>>,
    /// exact quotient transition rows at this `n`
    pub quotient_rows: Vec<Vec<Q>>,
    /// minimal stationary mass of the quotient chain
    pub pi_min: Q,
    /// the relaxation/mixing sandwich held at every swept epsilon
    pub sandwich_ok: bool,
    /// whether the full graph was instantiated and checked at this `n`
    pub full_graph_checked: bool,
}

/// Sweep the family over `n_lo..=n_hi`. Quotient-based quantities are
/// computed at every `n`; wherever the full graph fits the cap it is
/// instantiated and the exact equality of full and quotient mixing times
/// is asserted.
pub fn sweep(
    spec: &FamilySpec,
    n_lo: u64,
    n_hi: u64,
    epsilons: &[Q],
    alphas: &[Q],
    laziness: &Q,
    caps: &SweepCaps,
) -> Result<Vec<SweepRecord>> {
    if n_lo > n_hi {
        return Ok(vec![]);
    }
    if n_lo < spec.n_min() {
        return Err(Error::BelowNMin {
            n: n_lo,
            n_min: spec.n_min(),
        });
    }
    if n_hi > n_lo {
        let stability = verify_state_stability(spec, n_lo, n_hi);
        if !stability.stable {
            return Err(Error::UnstableStates {
                n_a: n_lo,
                n_b: stability.first_disagreement.unwrap(),
            });
        }
    }
    let ns: Vec<u64> = (n_lo..=n_hi).collect();
    ns.into_par_iter()
        .map(|n| sweep_one(spec, n, epsilons, alphas, laziness, caps))
        .collect()
}

fn sweep_one(
    spec: &FamilySpec,
    n: u64,
    epsilons: &[Q],
    alphas: &[Q],
    laziness: &Q,
    caps: &SweepCaps,
) -> Result<SweepRecord> {
    let quotient = build_orbit_walk(spec, n, laziness)?;
    let chain = quotient.chain();
    let spec_trum = spectrum(chain, DEFAULT_CLUSTER_TOL)?;
    let t_rel = relaxation_time(&spec_trum)?;
    let lambda2_abs = lambda_star(&spec_trum);
    let t_mix = mixing_times(chain, quotient.root(), epsilons, DEFAULT_HORIZON)?;
    let t_hit = if chain.len() <= caps.hitting_states {
        let mut per_alpha = Vec::with_capacity(alphas.len());
        for alpha in alphas {
            per_alpha.push(large_set_hitting_time(chain, alpha, caps.hitting_states)?.t_hit);
        }
        Some(per_alpha)
    } else {
        None
    };
    let quotient_rows: Vec<Vec<Q>> = (0..chain.len())
        .map(|i| (0..chain.len()).map(|j| chain.prob(i, j)).collect())
        .collect();
    let pi_min = chain
        .stationary()
        .iter()
        .min()
        .expect("chain is nonempty")
        .clone();
    // the root is the worst start of the orbit walk (projection contracts
    // TV and the full walk is start-independent), so the from-root mixing
    // times feed the worst-case sandwich directly
    let pi_min_f = pi_min.to_f64().unwrap_or(f64::NAN);
    let sandwich_ok = epsilons.iter().zip(&t_mix).all(|(eps, &tm)| {
        let e = eps.to_f64().unwrap_or(f64::NAN);
        let lower = (t_rel - 1.0) * (1.0 / (2.0 * e)).ln();
        let upper = t_rel * (1.0 / (e * pi_min_f)).ln();
        let slack = 1e-9 * (1.0 + lower.abs().max(upper.abs()));
        lower <= tm as f64 + slack && tm as f64 <= upper + slack
    });
    let num_vertices = spec.vertex_count(n);
    let mut full_graph_checked = false;
    if num_vertices <= BigInt::from(caps.full_graph_states) {
        let instance = instantiate_graph(spec, n, caps.full_graph_states)?;
        let labels = instance
            .vertices()
            .iter()
            .map(|t| spec.format_vertex(t))
            .collect();
        let full = Chain::walk_on(&instance, labels, laziness.clone())?;
        let root_idx = instance
            .index_of(&root_vertex(spec, n))
            .expect("root vertex is canonical");
        let full_times = mixing_times(&full, root_idx, epsilons, DEFAULT_HORIZON)?;
        if full_times != t_mix {
            return Err(Error::Assertion(format!(
                "full/quotient mixing mismatch at n = {n}: {full_times:?} vs {t_mix:?}"
            )));
        }
        assert_eq!(instance.degree_weight(), &class_degree_weight(spec, n)?);
        full_graph_checked = true;
    }
    Ok(SweepRecord {
        n,
        num_vertices,
        degree_weight: class_degree_weight(spec, n)?,
        quotient_states: quotient.states().len(),
        num_distinct_eigs: spec_trum.num_distinct(),
        lambda2_abs,
        t_rel,
        eig_clusters: spec_trum.clusters().collect(),
        t_mix,
        t_hit,
        quotient_rows,
        pi_min,
        sandwich_ok,
        full_graph_checked,
    })
}

/// Fit every quotient transition entry, as a function of `n`, with an
/// exact rational function of bounded degree. Returns one report per
/// matrix entry, row major.
pub fn fit_quotient_entries(
    records: &[SweepRecord],
    max_deg: usize,
) -> Result<Vec<((usize, usize), FitReport)>> {
    if records.is_empty() {
        return Err(Error::InsufficientPoints { need: 1, got: 0 });
    }
    let dim = records[0].quotient_rows.len();
    let mut out = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let points: Vec<(u64, Q)> = records
                .iter()
                .map(|r| (r.n, r.quotient_rows[i][j].clone()))
                .collect();
            out.push(((i, j), fit_rational(&points, max_deg)?));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// exact fitting

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    Rational,
    Polynomial,
}

/// Result of an exact interpolation attempt. `exact` means every train and
/// validation point is reproduced exactly (rational data) or within the
/// declared tolerance (floating data).
#[derive(Debug, Clone)]
pub struct FitReport {
    pub model: FitModel,
    pub fitted: Option<RationalFunction>,
    pub exact: bool,
    pub train_points: Vec<(u64, Q)>,
    pub validation_points: Vec<(u64, Q)>,
    pub max_validation_error: f64,
}

impl FitReport {
    pub fn degree(&self) -> Option<(usize, usize)> {
        self.fitted
            .as_ref()
            .map(|f| (f.numerator().degree(), f.denominator().degree()))
    }
}

const RATIONAL_VALIDATION_POINTS: usize = 3;
const POLYNOMIAL_VALIDATION_POINTS: usize = 2;

/// Search degree pairs `(d_num, d_den)` in increasing total degree and
/// return the first reduced rational function reproducing every train and
/// validation point exactly. The last three points are held out for
/// validation.
pub fn fit_rational(points: &[(u64, Q)], max_deg: usize) -> Result<FitReport> {
    let need = 2 * max_deg + RATIONAL_VALIDATION_POINTS;
    if points.len() < need {
        return Err(Error::InsufficientPoints {
            need,
            got: points.len(),
        });
    }
    let split = points.len() - RATIONAL_VALIDATION_POINTS;
    let (train, validation) = points.split_at(split);
    let mut best: Option<(RationalFunction, f64)> = None;
    for total in 0..=2 * max_deg {
        for d_num in 0..=total.min(max_deg) {
            let d_den = total - d_num;
            if d_den > max_deg {
                continue;
            }
            let Some(candidate) = solve_rational_candidate(train, d_num, d_den) else {
                continue;
            };
            let err = max_error(&candidate, points);
            if err == Some(0.0) {
                return Ok(FitReport {
                    model: FitModel::Rational,
                    fitted: Some(candidate),
                    exact: true,
                    train_points: train.to_vec(),
                    validation_points: validation.to_vec(),
                    max_validation_error: 0.0,
                });
            }
            if let Some(e) = err {
                if best.as_ref().map_or(true, |(_, be)| e < *be) {
                    best = Some((candidate, e));
                }
            }
        }
    }
    let (fitted, err) = match best {
        Some((f, e)) => (Some(f), e),
        None => (None, f64::INFINITY),
    };
    Ok(FitReport {
        model: FitModel::Rational,
        fitted,
        exact: false,
        train_points: train.to_vec(),
        validation_points: validation.to_vec(),
        max_validation_error: err,
    })
}

fn solve_rational_candidate(
    train: &[(u64, Q)],
    d_num: usize,
    d_den: usize,
) -> Option<RationalFunction> {
    // homogeneous system: num(n) - v * den(n) = 0 at every train point
    let cols = d_num + d_den + 2;
    let mut rows = Vec::with_capacity(train.len());
    for (n, v) in train {
        let mut row = Vec::with_capacity(cols);
        let nq = Q::from_integer(BigInt::from(*n));
        let mut power = Q::one();
        for _ in 0..=d_num {
            row.push(power.clone());
            power *= &nq;
        }
        let mut power = Q::one();
        for _ in 0..=d_den {
            row.push(-(v * &power));
            power *= &nq;
        }
        rows.push(row);
    }
    let coeffs = crate::exact::nullspace_vector(rows)?;
    let denom_lcm = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| num::Integer::lcm(&acc, c.denom()));
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| c.numer() * (&denom_lcm / c.denom()))
        .collect();
    let num = Poly::new(ints[..=d_num].to_vec());
    let den = Poly::new(ints[d_num + 1..].to_vec());
    if den.is_zero() {
        return None;
    }
    Some(RationalFunction::new(num, den))
}

fn max_error(candidate: &RationalFunction, points: &[(u64, Q)]) -> Option<f64> {
    let mut worst = 0.0f64;
    for (n, v) in points {
        let value = candidate.eval(*n)?;
        if value != *v {
            let delta = (&value - v).abs().to_f64()?;
            worst = worst.max(delta);
        }
    }
    Some(worst)
}

/// Minimal-degree exact polynomial through the points, validated on the
/// last two. Polynomial coefficients may be rational (e.g. binomial
/// counts); the result is a rational function with constant denominator.
pub fn fit_polynomial(points: &[(u64, Q)]) -> Result<FitReport> {
    if points.len() < 5 {
        return Err(Error::InsufficientPoints {
            need: 5,
            got: points.len(),
        });
    }
    let split = points.len() - POLYNOMIAL_VALIDATION_POINTS;
    let (train, validation) = points.split_at(split);
    let mut best: Option<(RationalFunction, f64)> = None;
    for d in 0..train.len() {
        let candidate = newton_polynomial(&train[..=d.min(train.len() - 1)]);
        let err = max_error(&candidate, points);
        if err == Some(0.0) {
            return Ok(FitReport {
                model: FitModel::Polynomial,
                fitted: Some(candidate),
                exact: true,
                train_points: train.to_vec(),
                validation_points: validation.to_vec(),
                max_validation_error: 0.0,
            });
        }
        if let Some(e) = err {
            if best.as_ref().map_or(true, |(_, be)| e < *be) {
                best = Some((candidate, e));
            }
        }
    }
    let (fitted, err) = match best {
        Some((f, e)) => (Some(f), e),
        None => (None, f64::INFINITY),
    };
    Ok(FitReport {
        model: FitModel::Polynomial,
        fitted,
        exact: false,
        train_points: train.to_vec(),
        validation_points: validation.to_vec(),
        max_validation_error: err,
    })
}

/// Exact interpolating polynomial through all given points (Newton form
/// expanded to monomial coefficients, packaged over a common denominator).
fn newton_polynomial(points: &[(u64, Q)]) -> RationalFunction {
    let xs: Vec<Q> = points
        .iter()
        .map(|(n, _)| Q::from_integer(BigInt::from(*n)))
        .collect();
    let mut diffs: Vec<Q> = points.iter().map(|(_, v)| v.clone()).collect();
    let m = points.len();
    // divided differences in place: diffs[j] holds f[x_0..x_j]
    for level in 1..m {
        for j in (level..m).rev() {
            let dx = &xs[j] - &xs[j - level];
            diffs[j] = (&diffs[j] - &diffs[j - 1]) / dx;
        }
    }
    // expand sum_j diffs[j] * prod_{i<j} (x - x_i)
    let mut coeffs = vec![Q::zero(); m];
    let mut basis: Vec<Q> = vec![Q::one()];
    for (j, dd) in diffs.iter().enumerate() {
        for (i, b) in basis.iter().enumerate() {
            coeffs[i] += dd * b;
        }
        if j + 1 < m {
            let mut next = vec![Q::zero(); basis.len() + 1];
            for (i, b) in basis.iter().enumerate() {
                next[i + 1] += b;
                next[i] -= &xs[j] * b;
            }
            basis = next;
        }
    }
    let denom_lcm = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| num::Integer::lcm(&acc, c.denom()));
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| c.numer() * (&denom_lcm / c.denom()))
        .collect();
    RationalFunction::new(Poly::new(ints), Poly::new(vec![denom_lcm]))
}

/// Rationalize floating data (continued fractions at `tol`) and fit
/// exactly; `exact` then means every original float is within `tol` of the
/// fitted value.
pub fn fit_rational_float(points: &[(u64, f64)], max_deg: usize, tol: f64) -> Result<FitReport> {
    let rational_points = rationalize_points(points, tol)?;
    let mut report = fit_rational(&rational_points, max_deg)?;
    patch_float_error(&mut report, points, tol);
    Ok(report)
}

pub fn fit_polynomial_float(points: &[(u64, f64)], tol: f64) -> Result<FitReport> {
    let rational_points = rationalize_points(points, tol)?;
    let mut report = fit_polynomial(&rational_points)?;
    patch_float_error(&mut report, points, tol);
    Ok(report)
}

fn rationalize_points(points: &[(u64, f64)], tol: f64) -> Result<Vec<(u64, Q)>> {
    points
        .iter()
        .map(|&(n, v)| {
            rationalize(v, tol)
                .map(|q| (n, q))
                .ok_or_else(|| Error::Config(format!("cannot rationalize {v} at tolerance {tol}")))
        })
        .collect()
}

fn patch_float_error(report: &mut FitReport, points: &[(u64, f64)], tol: f64) {
    if let Some(fitted) = &report.fitted {
        let mut worst = 0.0f64;
        for &(n, v) in points {
            match fitted.eval(n).and_then(|q| q.to_f64()) {
                Some(value) => worst = worst.max((value - v).abs()),
                None => worst = f64::INFINITY,
            }
        }
        report.max_validation_error = worst;
        report.exact = worst <= tol;
    }
}

// ---------------------------------------------------------------------------
// stabilization and diagnostics

/// Eigenvalue stabilization over a sweep: constancy of the distinct count
/// on the tail, plus a rational fit of every branch tracked by descending
/// order.
#[derive(Debug, Clone)]
pub struct StabilizationReport {
    pub stable: bool,
    pub stable_count: usize,
    pub first_stable_n: Option<u64>,
    pub tracking_ok: bool,
    pub branch_fits: Vec<FitReport>,
}

pub fn stabilization_report(records: &[SweepRecord], max_deg: usize) -> Result<StabilizationReport> {
    if records.len() < 8 {
        return Err(Error::InsufficientPoints {
            need: 8,
            got: records.len(),
        });
    }
    let tail_start = records.len() / 2;
    let stable_count = records[tail_start].num_distinct_eigs;
    let stable = records[tail_start..]
        .iter()
        .all(|r| r.num_distinct_eigs == stable_count);
    let first_stable_n = if stable {
        let mut first = tail_start;
        while first > 0 && records[first - 1].num_distinct_eigs == stable_count {
            first -= 1;
        }
        Some(records[first].n)
    } else {
        None
    };
    if !stable {
        return Ok(StabilizationReport {
            stable,
            stable_count,
            first_stable_n,
            tracking_ok: false,
            branch_fits: vec![],
        });
    }
    // branch tracking on the maximal suffix with the stable count
    let suffix_start = (0..records.len())
        .rev()
        .take_while(|&i| records[i].num_distinct_eigs == stable_count)
        .last()
        .unwrap();
    let suffix = &records[suffix_start..];
    let mut tracking_ok = true;
    'outer: for pair in suffix.windows(2) {
        let (a, b) = (&pair[0].eig_clusters, &pair[1].eig_clusters);
        let min_gap = a
            .windows(2)
            .map(|w| (w[0].0 - w[1].0).abs())
            .fold(f64::INFINITY, f64::min);
        for (ca, cb) in a.iter().zip(b) {
            if (ca.0 - cb.0).abs() > 0.5 * min_gap {
                tracking_ok = false;
                break 'outer;
            }
        }
    }
    let mut branch_fits = Vec::new();
    if tracking_ok {
        for branch in 0..stable_count {
            let series: Vec<(u64, f64)> = suffix
                .iter()
                .map(|r| (r.n, r.eig_clusters[branch].0))
                .collect();
            if series.len() >= 2 * max_deg + RATIONAL_VALIDATION_POINTS {
                branch_fits.push(fit_rational_float(&series, max_deg, DEFAULT_CLUSTER_TOL)?);
            }
        }
    }
    Ok(StabilizationReport {
        stable,
        stable_count,
        first_stable_n,
        tracking_ok,
        branch_fits,
    })
}

/// Multiplicity of the second-largest-|eigenvalue| branch across full
/// instantiations, with its minimal-degree polynomial fit.
#[derive(Debug, Clone)]
pub struct MultiplicityGrowth {
    pub observations: Vec<(u64, usize)>,
    pub fit: FitReport,
}

pub fn multiplicity_growth(
    spec: &FamilySpec,
    ns: &[u64],
    laziness: &Q,
    cap: u64,
) -> Result<MultiplicityGrowth> {
    let observations: Vec<(u64, usize)> = ns
        .par_iter()
        .map(|&n| {
            let instance = instantiate_graph(spec, n, cap)?;
            let spect = spectrum_of_instance(&instance, laziness, DEFAULT_CLUSTER_TOL)?;
            Ok((n, second_branch_multiplicity(&spect)))
        })
        .collect::<Result<_>>()?;
    let points: Vec<(u64, Q)> = observations
        .iter()
        .map(|&(n, m)| (n, Q::from_integer(BigInt::from(m))))
        .collect();
    let fit = fit_polynomial(&points)?;
    Ok(MultiplicityGrowth { observations, fit })
}

fn second_branch_multiplicity(spect: &Spectrum) -> usize {
    let mut best = (0.0f64, 0usize);
    for (value, mult) in spect.clusters().skip(1) {
        if value.abs() > best.0 {
            best = (value.abs(), mult);
        }
    }
    best.1
}

/// Per-`n` relaxation-to-mixing ratios and the two assertions that witness
/// the failure of the product condition at desk scale: the mixing/relaxation
/// quotient stays under `log(4 |V_n|)`, and the inverse ratio stays above a
/// calibrated floor on the sweep tail.
#[derive(Debug, Clone)]
pub struct ProductConditionReport {
    pub epsilon: Q,
    pub floor: f64,
    pub rows: Vec<ProductConditionRow>,
    pub min_tail_ratio: f64,
    pub floor_ok: bool,
    pub bounds_ok: bool,
    pub degenerate_ns: Vec<u64>,
}

#[derive(Debug, Clone)]
pub struct ProductConditionRow {
    pub n: u64,
    pub t_rel: f64,
    pub t_mix: u64,
    /// t_rel / t_mix — bounded away from 0 when the product condition fails
    pub ratio: Option<f64>,
    /// t_mix / t_rel
    pub inverse_ratio: Option<f64>,
    pub bound_log4v: f64,
    pub bound_ok: bool,
}

pub fn product_condition_diagnostic(
    records: &[SweepRecord],
    epsilons: &[Q],
    epsilon: &Q,
    floor: f64,
) -> Result<ProductConditionReport> {
    if records.is_empty() {
        return Err(Error::InsufficientPoints { need: 1, got: 0 });
    }
    let eps_idx = epsilon_index(epsilons, epsilon)?;
    let mut rows = Vec::with_capacity(records.len());
    let mut degenerate_ns = Vec::new();
    for r in records {
        let t_mix = r.t_mix[eps_idx];
        let bound_log4v = (4.0 * big_to_f64(&r.num_vertices)).ln();
        if t_mix == 0 {
            degenerate_ns.push(r.n);
            rows.push(ProductConditionRow {
                n: r.n,
                t_rel: r.t_rel,
                t_mix,
                ratio: None,
                inverse_ratio: None,
                bound_log4v,
                bound_ok: true,
            });
            continue;
        }
        let ratio = r.t_rel / t_mix as f64;
        let inverse_ratio = t_mix as f64 / r.t_rel;
        let bound_ok = inverse_ratio <= bound_log4v + 1e-9;
        rows.push(ProductConditionRow {
            n: r.n,
            t_rel: r.t_rel,
            t_mix,
            ratio: Some(ratio),
            inverse_ratio: Some(inverse_ratio),
            bound_log4v,
            bound_ok,
        });
    }
    let tail_start = records.len() / 2;
    let min_tail_ratio = rows[tail_start..]
        .iter()
        .filter_map(|r| r.ratio)
        .fold(f64::INFINITY, f64::min);
    let floor_ok = min_tail_ratio >= floor;
    let bounds_ok = rows.iter().all(|r| r.bound_ok);
    Ok(ProductConditionReport {
        epsilon: epsilon.clone(),
        floor,
        rows,
        min_tail_ratio,
        floor_ok,
        bounds_ok,
        degenerate_ns,
    })
}

/// Cutoff would require the `t_mix(eps) / t_mix(1-eps)` profile to fall to
/// 1; these walks instead mix in eventually constant time or keep the
/// profile bounded away from 1.
#[derive(Debug, Clone)]
pub struct CutoffReport {
    pub eps_small: Q,
    /// (n, profile ratio); `None` where the denominator mixing time is 0
    pub ratios: Vec<(u64, Option<f64>)>,
    pub excluded_ns: Vec<u64>,
    /// every swept epsilon has constant t_mix on the tail
    pub eventually_constant: bool,
    pub tail_ratio: Option<f64>,
    pub cutoff_consistent: bool,
}

pub fn cutoff_profile(
    records: &[SweepRecord],
    epsilons: &[Q],
    eps_small: &Q,
) -> Result<CutoffReport> {
    if records.is_empty() {
        return Err(Error::InsufficientPoints { need: 1, got: 0 });
    }
    let half = Q::new(1.into(), 2.into());
    if !eps_small.is_positive() || *eps_small >= half {
        return Err(Error::Config(format!(
            "profile epsilon must lie in (0, 1/2), got {eps_small}"
        )));
    }
    let small_idx = epsilon_index(epsilons, eps_small)?;
    let large = Q::one() - eps_small;
    let large_idx = epsilon_index(epsilons, &large)?;
    let mut ratios = Vec::with_capacity(records.len());
    let mut excluded_ns = Vec::new();
    for r in records {
        let denom = r.t_mix[large_idx];
        if denom == 0 {
            excluded_ns.push(r.n);
            ratios.push((r.n, None));
        } else {
            ratios.push((r.n, Some(r.t_mix[small_idx] as f64 / denom as f64)));
        }
    }
    let tail_start = records.len() / 2;
    let eventually_constant = (0..epsilons.len()).all(|e| {
        records[tail_start..]
            .windows(2)
            .all(|w| w[0].t_mix[e] == w[1].t_mix[e])
    });
    let tail_ratio = ratios[tail_start..]
        .iter()
        .rev()
        .find_map(|(_, r)| *r);
    let defined: Vec<f64> = ratios.iter().filter_map(|(_, r)| *r).collect();
    let decreasing = defined.windows(2).all(|w| w[1] <= w[0] + 1e-9);
    let cutoff_consistent = !eventually_constant
        && decreasing
        && tail_ratio.map_or(false, |t| t <= 1.05);
    Ok(CutoffReport {
        eps_small: eps_small.clone(),
        ratios,
        excluded_ns,
        eventually_constant,
        tail_ratio,
        cutoff_consistent,
    })
}

/// Mixing-time doubling ratios `t_mix(2n) / t_mix(n)` for every pair with
/// `2n` inside the sweep tail: near 2 for linearly growing mixing times,
/// near 1 for eventually constant ones.
pub fn doubling_ratios(records: &[SweepRecord], epsilons: &[Q], epsilon: &Q) -> Result<Vec<(u64, f64)>> {
    let eps_idx = epsilon_index(epsilons, epsilon)?;
    let tail_start = records.len() / 2;
    let tail_lo = records[tail_start].n;
    let mut out = Vec::new();
    for r in records {
        let double = r.n * 2;
        if double < tail_lo {
            continue;
        }
        if let Some(rr) = records.iter().find(|s| s.n == double) {
            let base = r.t_mix[eps_idx];
            if base > 0 {
                out.push((r.n, rr.t_mix[eps_idx] as f64 / base as f64));
            }
        }
    }
    Ok(out)
}

fn epsilon_index(epsilons: &[Q], target: &Q) -> Result<usize> {
    epsilons
        .iter()
        .position(|e| e == target)
        .ok_or_else(|| Error::Config(format!("epsilon {target} was not swept")))
}

pub fn big_to_f64(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Pilot-calibrated floor for the tail of `t_rel / t_mix`, per built-in
/// family; 0.05 for families without a recorded calibration.
pub fn product_floor(family: &str) -> f64 {
    let _ = family;
    0.05
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::builtin_family;
    use crate::ratfun::{q_int, q_ratio};
    use proptest::prelude::*;

    fn rational_series(f: &RationalFunction, lo: u64, count: usize) -> Vec<(u64, Q)> {
        (lo..)
            .filter_map(|n| f.eval(n).map(|v| (n, v)))
            .take(count)
            .collect()
    }

    #[test]
    fn fit_recovers_relaxation_time_form() {
        // (n-1)/(n-2) from its values at n = 5..14
        let f = RationalFunction::from_i64(&[-1, 1], &[-2, 1]);
        let points = rational_series(&f, 5, 10);
        let report = fit_rational(&points, 2).unwrap();
        assert!(report.exact);
        assert_eq!(report.fitted.unwrap(), f);
    }

    #[test]
    fn fit_constant_sequence() {
        let points: Vec<(u64, Q)> = (3..12).map(|n| (n, q_int(3))).collect();
        let report = fit_rational(&points, 3).unwrap();
        assert!(report.exact);
        let fitted = report.fitted.unwrap();
        assert!(fitted.is_constant());
        assert_eq!(fitted.eval(100).unwrap(), q_int(3));
    }

    #[test]
    fn fit_quotient_entry_form() {
        // 2/((n-2)(n-3)) at n = 5..14
        let f = RationalFunction::from_i64(&[2], &[6, -5, 1]);
        let points = rational_series(&f, 5, 11);
        let report = fit_rational(&points, 4).unwrap();
        assert!(report.exact);
        assert_eq!(report.fitted.unwrap(), f);
    }

    #[test]
    fn fit_rejects_insufficient_points() {
        let points: Vec<(u64, Q)> = (1..5).map(|n| (n, q_int(1))).collect();
        assert!(matches!(
            fit_rational(&points, 2),
            Err(Error::InsufficientPoints { .. })
        ));
    }

    #[test]
    fn fit_reports_inexact_data() {
        // not a rational function of degree <= 1: 2^n
        let points: Vec<(u64, Q)> = (1..10).map(|n| (n, q_int(1 << n))).collect();
        let report = fit_rational(&points, 1).unwrap();
        assert!(!report.exact);
    }

    #[test]
    fn polynomial_fit_minimal_degree() {
        // n(n-1)/2 has degree 2 and half-integer coefficients
        let points: Vec<(u64, Q)> = (2..11).map(|n| (n, q_ratio((n * (n - 1)) as i64, 2))).collect();
        let report = fit_polynomial(&points).unwrap();
        assert!(report.exact);
        let (dn, dd) = report.degree().unwrap();
        assert_eq!((dn, dd), (2, 0));
        // constant sequence fits at degree 0
        let ones: Vec<(u64, Q)> = (1..8).map(|n| (n, q_int(1))).collect();
        let report = fit_polynomial(&ones).unwrap();
        assert!(report.exact);
        assert_eq!(report.degree().unwrap(), (0, 0));
        // linear: n - 1
        let lin: Vec<(u64, Q)> = (6..15).map(|n| (n, q_int(n as i64 - 1))).collect();
        let report = fit_polynomial(&lin).unwrap();
        assert!(report.exact);
        assert_eq!(report.degree().unwrap(), (1, 0));
    }

    #[test]
    fn float_fit_recovers_exact_values() {
        let f = RationalFunction::from_i64(&[-1, 1], &[-2, 1]);
        let points: Vec<(u64, f64)> = (5..15)
            .map(|n| {
                let v = f.eval(n).unwrap().to_f64().unwrap();
                (n, v + 3e-13) // typical eigensolver noise
            })
            .collect();
        let report = fit_rational_float(&points, 2, 1e-8).unwrap();
        assert!(report.exact);
        assert_eq!(report.fitted.unwrap(), f);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn refitting_recovers_random_rational_functions(
            a in -6i64..7, b in -6i64..7, c in -6i64..7,
            d in 1i64..5, e in -4i64..5,
        ) {
            // f = (a + b n + c n^2) / (e + d n); denominator nonzero on n >= 20
            let f = RationalFunction::from_i64(&[a, b, c], &[e, d]);
            let points = rational_series(&f, 20, 11);
            let report = fit_rational(&points, 2).unwrap();
            prop_assert!(report.exact);
            prop_assert_eq!(report.fitted.unwrap(), f);
        }
    }

    #[test]
    fn sweep_complete_family_records() {
        let spec = builtin_family("complete", &[]).unwrap();
        let eps = [q_ratio(1, 4)];
        let records = sweep(&spec, 5, 40, &eps, &[], &Q::zero(), &SweepCaps::default()).unwrap();
        assert_eq!(records.len(), 36);
        for r in &records {
            assert_eq!(r.t_mix[0], 1, "K_n mixes in one step at eps 1/4 for n >= 5");
            assert_eq!(r.quotient_states, 2);
            assert_eq!(r.num_distinct_eigs, 2);
            assert!(r.full_graph_checked);
            // t_rel = (n-1)/(n-2)
            let expect = (r.n as f64 - 1.0) / (r.n as f64 - 2.0);
            assert!((r.t_rel - expect).abs() < 1e-9);
        }
        // empty range
        let empty = sweep(&spec, 10, 9, &eps, &[], &Q::zero(), &SweepCaps::default()).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn sweep_kneser_has_three_states_everywhere() {
        let spec = builtin_family("kneser", &[2]).unwrap();
        let eps = [q_ratio(1, 4)];
        let alphas = [q_ratio(1, 8)];
        let records =
            sweep(&spec, 5, 30, &eps, &alphas, &Q::zero(), &SweepCaps::default()).unwrap();
        assert_eq!(records.len(), 26);
        for r in &records {
            assert_eq!(r.quotient_states, 3);
            assert_eq!(r.num_distinct_eigs, 3);
            assert!(r.t_hit.is_some());
        }
    }

    #[test]
    fn stabilization_report_on_kneser() {
        let spec = builtin_family("kneser", &[2]).unwrap();
        let eps = [q_ratio(1, 4)];
        let records =
            sweep(&spec, 5, 30, &eps, &[], &Q::zero(), &SweepCaps::default()).unwrap();
        let report = stabilization_report(&records, 4).unwrap();
        assert!(report.stable);
        assert_eq!(report.stable_count, 3);
        assert_eq!(report.first_stable_n, Some(5));
        assert!(report.tracking_ok);
        assert_eq!(report.branch_fits.len(), 3);
        for fit in &report.branch_fits {
            assert!(fit.exact, "eigenvalue branches of KG(n,2) are rational");
        }
        // the lambda branch is -2/(n-2)
        let branch = report.branch_fits[2].fitted.as_ref().unwrap();
        assert_eq!(*branch, RationalFunction::from_i64(&[-2], &[-2, 1]));
    }

    #[test]
    fn multiplicity_growth_kneser_is_n_minus_1() {
        let spec = builtin_family("kneser", &[2]).unwrap();
        let ns: Vec<u64> = (6..=14).collect();
        let growth = multiplicity_growth(&spec, &ns, &Q::zero(), 100_000).unwrap();
        for (n, m) in &growth.observations {
            assert_eq!(*m as u64, n - 1);
        }
        assert!(growth.fit.exact);
        assert_eq!(
            growth.fit.fitted.unwrap(),
            RationalFunction::from_i64(&[-1, 1], &[1])
        );
    }

    #[test]
    fn product_condition_on_complete_family() {
        let spec = builtin_family("complete", &[]).unwrap();
        let eps = [q_ratio(1, 4)];
        let records =
            sweep(&spec, 10, 40, &eps, &[], &Q::zero(), &SweepCaps::default()).unwrap();
        let report =
            product_condition_diagnostic(&records, &eps, &q_ratio(1, 4), 0.05).unwrap();
        assert!(report.floor_ok);
        assert!(report.bounds_ok);
        assert!(report.min_tail_ratio >= 1.0, "t_rel/t_mix >= 1 for K_n");
        assert!(report.degenerate_ns.is_empty());
    }

    #[test]
    fn cutoff_profile_complete_is_eventually_constant() {
        let spec = builtin_family("complete", &[]).unwrap();
        let eps = [q_ratio(1, 4), q_ratio(3, 4)];
        let records =
            sweep(&spec, 10, 30, &eps, &[], &Q::zero(), &SweepCaps::default()).unwrap();
        let report = cutoff_profile(&records, &eps, &q_ratio(1, 4)).unwrap();
        assert!(report.eventually_constant);
        assert!(!report.cutoff_consistent);
    }
}
