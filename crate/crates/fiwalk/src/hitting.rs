//! Expected hitting times by the exact first-step linear system, the
//! large-set hitting time by exhaustive subset search, and the observed
//! mixing/hitting comparison ratios.

use num::{One, Signed, ToPrimitive, Zero};

use crate::chain::{mixing_time_worst, Chain};
use crate::error::{Error, Result};
use crate::exact::solve;
use crate::ratfun::Q;

/// Exhaustive subset search is refused above this many states by default:
/// the hitting-time definition quantifies over all subsets, and restricting
/// the family of subsets would change the quantity.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 15;

/// Exact expected times to enter `target` from every state, via the
/// first-step system `(I - P|_V) Q = 1` on the complement `V`. Entries for
/// target states are 0.
pub fn expected_hitting_times(chain: &Chain, target: &[usize]) -> Result<Vec<Q>> {
    if target.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let dim = chain.len();
    let mut in_target = vec![false; dim];
    for &t in target {
        assert!(t < dim, "target state out of range");
        in_target[t] = true;
    }
    let complement: Vec<usize> = (0..dim).filter(|&i| !in_target[i]).collect();
    let mut result = vec![Q::zero(); dim];
    if complement.is_empty() {
        return Ok(result);
    }
    let pos: Vec<usize> = {
        let mut pos = vec![usize::MAX; dim];
        for (idx, &s) in complement.iter().enumerate() {
            pos[s] = idx;
        }
        pos
    };
    let m = complement.len();
    let mut system = vec![vec![Q::zero(); m]; m];
    for (row_idx, &s) in complement.iter().enumerate() {
        system[row_idx][row_idx] = Q::one();
        for (j, p) in chain.sparse_row(s) {
            if !in_target[j] {
                system[row_idx][pos[j]] -= p;
            }
        }
    }
    let rhs = vec![Q::one(); m];
    let solution = solve(system, rhs)?;
    for (idx, &s) in complement.iter().enumerate() {
        result[s] = solution[idx].clone();
    }
    // certificate: the first-step equations hold exactly
    for &s in &complement {
        let mut acc = Q::one();
        for (j, p) in chain.sparse_row(s) {
            acc += p * &result[j];
        }
        assert_eq!(acc, result[s], "first-step residual must vanish");
    }
    Ok(result)
}

/// The worst expected entry time into any set of stationary mass at least
/// `alpha`, together with the maximizing set and start.
#[derive(Debug, Clone)]
pub struct HittingReport {
    pub alpha: Q,
    pub t_hit: Q,
    pub argmax_set: Vec<usize>,
    pub argmax_start: usize,
}

pub fn large_set_hitting_time(chain: &Chain, alpha: &Q, cap: usize) -> Result<HittingReport> {
    if !alpha.is_positive() || *alpha >= Q::new(1.into(), 2.into()) {
        return Err(Error::Config(format!(
            "alpha must lie in (0, 1/2), got {alpha}"
        )));
    }
    let dim = chain.len();
    if dim > cap || dim > 63 {
        return Err(Error::HittingCapExceeded { count: dim, cap });
    }
    let pi = chain.stationary();
    let mut best: Option<(Q, Vec<usize>, usize)> = None;
    for mask in 1u64..(1u64 << dim) {
        let mut mass = Q::zero();
        for (i, p) in pi.iter().enumerate() {
            if mask >> i & 1 == 1 {
                mass += p;
            }
        }
        if mass < *alpha {
            continue;
        }
        let target: Vec<usize> = (0..dim).filter(|i| mask >> i & 1 == 1).collect();
        let times = expected_hitting_times(chain, &target)?;
        for (start, time) in times.iter().enumerate() {
            let better = match &best {
                None => true,
                Some((t, _, _)) => time > t,
            };
            if better {
                best = Some((time.clone(), target.clone(), start));
            }
        }
    }
    let (t_hit, argmax_set, argmax_start) = best.expect("some subset always qualifies");
    Ok(HittingReport {
        alpha: alpha.clone(),
        t_hit,
        argmax_set,
        argmax_start,
    })
}

/// One observation of the mixing-vs-hitting comparison: both quantities
/// and their ratio. No universal constant is asserted; sweeps only check
/// that the observed ratios stay in a bounded window.
#[derive(Debug, Clone)]
pub struct PeresSousiRecord {
    pub alpha: Q,
    pub epsilon: Q,
    pub t_mix: u64,
    pub t_hit: Q,
    pub ratio: f64,
}

pub fn peres_sousi_ratio(
    chain: &Chain,
    alpha: &Q,
    epsilon: &Q,
    cap: usize,
) -> Result<PeresSousiRecord> {
    if !alpha.is_positive() || *alpha >= Q::new(1.into(), 4.into()) {
        return Err(Error::Config(format!(
            "alpha must lie in (0, 1/4), got {alpha}"
        )));
    }
    let t_mix = mixing_time_worst(chain, epsilon)?;
    let report = large_set_hitting_time(chain, alpha, cap)?;
    let ratio = if t_mix == 0 {
        0.0
    } else if report.t_hit.is_zero() {
        return Err(Error::Config(
            "degenerate comparison: t_hit = 0 with t_mix > 0".into(),
        ));
    } else {
        t_mix as f64 / report.t_hit.to_f64().unwrap_or(f64::NAN)
    };
    Ok(PeresSousiRecord {
        alpha: alpha.clone(),
        epsilon: epsilon.clone(),
        t_mix,
        t_hit: report.t_hit,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::builtin_family;
    use crate::orbit::build_orbit_walk;
    use crate::ratfun::{q_int, q_ratio};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn complete_quotient_hitting_root_is_n_minus_1() {
        let spec = builtin_family("complete", &[]).unwrap();
        for n in [5u64, 10, 17, 30] {
            let q = build_orbit_walk(&spec, n, &Q::zero()).unwrap();
            let times = expected_hitting_times(q.chain(), &[q.root()]).unwrap();
            let other = 1 - q.root();
            assert_eq!(times[other], q_int(n as i64 - 1));
            assert_eq!(times[q.root()], q_int(0));
        }
    }

    #[test]
    fn all_states_target_gives_zero() {
        let spec = builtin_family("kneser", &[2]).unwrap();
        let q = build_orbit_walk(&spec, 6, &Q::zero()).unwrap();
        let times = expected_hitting_times(q.chain(), &[0, 1, 2]).unwrap();
        assert!(times.iter().all(|t| t.is_zero()));
        assert!(matches!(
            expected_hitting_times(q.chain(), &[]),
            Err(Error::EmptyTarget)
        ));
    }

    #[test]
    fn petersen_quotient_hitting_disjoint_state() {
        // target the overlap-0 state of the n = 5 quotient: from the root
        // one step suffices in expectation 1; from overlap-1 it takes 3
        let spec = builtin_family("kneser", &[2]).unwrap();
        let q = build_orbit_walk(&spec, 5, &Q::zero()).unwrap();
        let times = expected_hitting_times(q.chain(), &[0]).unwrap();
        assert_eq!(times[q.root()], q_int(1));
        assert_eq!(times[1], q_int(3));
    }

    #[test]
    fn complete_quotient_large_set_hitting() {
        let spec = builtin_family("complete", &[]).unwrap();
        let q = build_orbit_walk(&spec, 10, &Q::zero()).unwrap();
        let report =
            large_set_hitting_time(q.chain(), &q_ratio(1, 4), DEFAULT_EXHAUSTIVE_CAP).unwrap();
        // only {other} and the full set have mass >= 1/4; the maximum is
        // one step from the root into the 9/10-mass class
        assert_eq!(report.t_hit, q_int(1));
        assert_eq!(report.argmax_set, vec![0]);
        assert_eq!(report.argmax_start, q.root());
    }

    #[test]
    fn petersen_quotient_large_set_hitting_frozen() {
        // exhaustive oracle over the 7 nonempty subsets of the 3-state
        // quotient at n = 5 gives t_hit(1/4) = 3 (target {overlap-0},
        // started at overlap-1; target {overlap-1} from the root ties)
        let spec = builtin_family("kneser", &[2]).unwrap();
        let q = build_orbit_walk(&spec, 5, &Q::zero()).unwrap();
        let report =
            large_set_hitting_time(q.chain(), &q_ratio(1, 4), DEFAULT_EXHAUSTIVE_CAP).unwrap();
        assert_eq!(report.t_hit, q_int(3));
        assert_eq!(report.argmax_set, vec![0]);
        assert_eq!(report.argmax_start, 1);
    }

    #[test]
    fn alpha_and_cap_guards() {
        let spec = builtin_family("kneser", &[2]).unwrap();
        let q = build_orbit_walk(&spec, 5, &Q::zero()).unwrap();
        assert!(large_set_hitting_time(q.chain(), &q_ratio(1, 2), 15).is_err());
        assert!(large_set_hitting_time(q.chain(), &q_int(0), 15).is_err());
        assert!(matches!(
            large_set_hitting_time(q.chain(), &q_ratio(1, 4), 2),
            Err(Error::HittingCapExceeded { count: 3, cap: 2 })
        ));
    }

    #[test]
    fn enlarging_target_never_increases_hitting_times() {
        let spec = builtin_family("triple-replace-one", &[]).unwrap();
        let q = build_orbit_walk(&spec, 8, &Q::zero()).unwrap();
        let dim = q.chain().len();
        let mut rng = StdRng::seed_from_u64(0);
        for _ in 0..25 {
            let small: Vec<usize> = (0..dim).filter(|_| rng.gen_bool(0.2)).collect();
            if small.is_empty() {
                continue;
            }
            let mut large = small.clone();
            for s in 0..dim {
                if !large.contains(&s) && rng.gen_bool(0.3) {
                    large.push(s);
                }
            }
            large.sort_unstable();
            let t_small = expected_hitting_times(q.chain(), &small).unwrap();
            let t_large = expected_hitting_times(q.chain(), &large).unwrap();
            for s in 0..dim {
                assert!(t_large[s] <= t_small[s]);
            }
        }
    }

    #[test]
    fn peres_sousi_ratio_on_complete_family() {
        let spec = builtin_family("complete", &[]).unwrap();
        for n in [10u64, 15, 20] {
            let q = build_orbit_walk(&spec, n, &Q::zero()).unwrap();
            let record = peres_sousi_ratio(
                q.chain(),
                &q_ratio(1, 8),
                &q_ratio(1, 4),
                DEFAULT_EXHAUSTIVE_CAP,
            )
            .unwrap();
            // ratio t_mix / t_hit = 1/1 at every n
            assert_eq!(record.t_mix, 1);
            assert_eq!(record.t_hit, q_int(1));
            assert!((record.ratio - 1.0).abs() < 1e-12);
        }
    }
}
