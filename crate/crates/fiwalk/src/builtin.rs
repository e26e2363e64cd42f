//! The built-in family catalog: classical subset graphs plus the tuple
//! walks with one or several edge orbits, weighted and unweighted.

use crate::error::{Error, Result};
use crate::family::FamilySpec;
use crate::pattern::PairPattern;
use crate::perm::{Perm, PermGroup};
use crate::ratfun::RationalFunction;

/// Catalog entry for listings.
pub struct BuiltinInfo {
    pub name: &'static str,
    pub params: &'static str,
    pub n_min: &'static str,
    pub description: &'static str,
}

pub fn builtin_catalog() -> Vec<BuiltinInfo> {
    vec![
        BuiltinInfo {
            name: "complete",
            params: "(none)",
            n_min: "3",
            description: "single labels; a step moves to any other label",
        },
        BuiltinInfo {
            name: "kneser",
            params: "r",
            n_min: "2r+1",
            description: "r-element subsets, disjointness edges; a step replaces every element",
        },
        BuiltinInfo {
            name: "johnson",
            params: "r",
            n_min: "2r+1",
            description: "r-element subsets, edges join subsets sharing r-1 elements",
        },
        BuiltinInfo {
            name: "ordered-pair-weighted",
            params: "(none)",
            n_min: "5",
            description: "ordered pairs; replace the first entry with probability 1/n, the second with probability (n-1)/n",
        },
        BuiltinInfo {
            name: "triple-replace-one",
            params: "(none)",
            n_min: "7",
            description: "ordered triples; a step replaces one entry, chosen uniformly, with an unused label",
        },
        BuiltinInfo {
            name: "triple-permute-or-replace",
            params: "(none)",
            n_min: "7",
            description: "ordered triples; a step reorders the entries or replaces the last one with an unused label",
        },
        BuiltinInfo {
            name: "shift-register",
            params: "k",
            n_min: "2k+1",
            description: "ordered k-tuples; a step shifts entries one place left or right, dropping one end and drawing a fresh label at the other",
        },
        BuiltinInfo {
            name: "triple-weighted",
            params: "(none)",
            n_min: "7",
            description: "ordered triples; replace the first entry with probability 1/n, the last two with probability (n-1)/n",
        },
    ]
}

/// Construct a built-in family by name.
pub fn builtin_family(name: &str, params: &[i64]) -> Result<FamilySpec> {
    match name {
        "complete" => {
            expect_params(name, params, 0)?;
            FamilySpec::new(
                "complete",
                1,
                vec![],
                vec![(PairPattern::empty(1, 1), RationalFunction::one())],
                Some(3),
            )
        }
        "kneser" => {
            expect_params(name, params, 1)?;
            let r = subset_size(name, params[0])?;
            FamilySpec::new(
                format!("kneser-{r}"),
                r,
                symmetric_generators(r),
                vec![(PairPattern::empty(r, r), RationalFunction::one())],
                Some(2 * r as u64 + 1),
            )
        }
        "johnson" => {
            expect_params(name, params, 1)?;
            let r = subset_size(name, params[0])?;
            let overlap: Vec<(u8, u8)> = (0..r as u8 - 1).map(|i| (i, i)).collect();
            if overlap.is_empty() {
                // J(n,1) degenerates to the complete graph
                return builtin_family("complete", &[]);
            }
            FamilySpec::new(
                format!("johnson-{r}"),
                r,
                symmetric_generators(r),
                vec![(
                    PairPattern::new(r, r, overlap)?,
                    RationalFunction::one(),
                )],
                Some(2 * r as u64 + 1),
            )
        }
        "ordered-pair-weighted" => {
            expect_params(name, params, 0)?;
            FamilySpec::new(
                "ordered-pair-weighted",
                2,
                vec![],
                vec![
                    // second coordinate fixed: replace the first entry
                    (
                        PairPattern::new(2, 2, vec![(1, 1)])?,
                        RationalFunction::from_i64(&[1], &[0, 1]),
                    ),
                    // first coordinate fixed: replace the second entry
                    (
                        PairPattern::new(2, 2, vec![(0, 0)])?,
                        RationalFunction::from_i64(&[-1, 1], &[0, 1]),
                    ),
                ],
                Some(5),
            )
        }
        "triple-replace-one" => {
            expect_params(name, params, 0)?;
            let fix = |a: u8, b: u8| PairPattern::new(3, 3, vec![(a, a), (b, b)]);
            FamilySpec::new(
                "triple-replace-one",
                3,
                vec![],
                vec![
                    (fix(1, 2)?, RationalFunction::one()),
                    (fix(0, 2)?, RationalFunction::one()),
                    (fix(0, 1)?, RationalFunction::one()),
                ],
                Some(7),
            )
        }
        "triple-permute-or-replace" => {
            expect_params(name, params, 0)?;
            let mut orbits = Vec::new();
            for perm in PermGroup::symmetric(3).elements() {
                if perm.is_identity() {
                    continue;
                }
                let matches: Vec<(u8, u8)> =
                    (0..3u8).map(|i| (i, perm.apply(i as usize) as u8)).collect();
                orbits.push((PairPattern::new(3, 3, matches)?, RationalFunction::one()));
            }
            orbits.push((
                PairPattern::new(3, 3, vec![(0, 0), (1, 1)])?,
                RationalFunction::one(),
            ));
            FamilySpec::new("triple-permute-or-replace", 3, vec![], orbits, Some(7))
        }
        "shift-register" => {
            expect_params(name, params, 1)?;
            let k = params[0];
            if !(2..=7).contains(&k) {
                return Err(Error::InvalidParams {
                    family: name.into(),
                    reason: format!("tuple length must be in 2..=7, got {k}"),
                });
            }
            let k = k as usize;
            let left: Vec<(u8, u8)> = (0..k as u8 - 1).map(|j| (j + 1, j)).collect();
            let right: Vec<(u8, u8)> = (0..k as u8 - 1).map(|j| (j, j + 1)).collect();
            FamilySpec::new(
                format!("shift-register-{k}"),
                k,
                vec![],
                vec![
                    (PairPattern::new(k, k, left)?, RationalFunction::one()),
                    (PairPattern::new(k, k, right)?, RationalFunction::one()),
                ],
                Some(2 * k as u64 + 1),
            )
        }
        "triple-weighted" => {
            expect_params(name, params, 0)?;
            FamilySpec::new(
                "triple-weighted",
                3,
                vec![],
                vec![
                    // last two coordinates fixed: replace the first entry,
                    // total probability 1/n split over n-3 targets
                    (
                        PairPattern::new(3, 3, vec![(1, 1), (2, 2)])?,
                        RationalFunction::from_i64(&[1], &[0, -3, 1]),
                    ),
                    // first coordinate fixed: replace the last two entries,
                    // total probability (n-1)/n split over (n-3)(n-4) targets
                    (
                        PairPattern::new(3, 3, vec![(0, 0)])?,
                        RationalFunction::from_i64(&[-1, 1], &[0, 12, -7, 1]),
                    ),
                ],
                Some(7),
            )
        }
        other => Err(Error::UnknownFamily(other.into())),
    }
}

fn expect_params(name: &str, params: &[i64], arity: usize) -> Result<()> {
    if params.len() != arity {
        return Err(Error::InvalidParams {
            family: name.into(),
            reason: format!("expected {arity} parameter(s), got {}", params.len()),
        });
    }
    Ok(())
}

fn subset_size(name: &str, r: i64) -> Result<usize> {
    if !(1..=7).contains(&r) {
        return Err(Error::InvalidParams {
            family: name.into(),
            reason: format!("subset size must be in 1..=7, got {r}"),
        });
    }
    Ok(r as usize)
}

fn symmetric_generators(k: usize) -> Vec<Perm> {
    (1..k).map(|i| Perm::swap(k, i - 1, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::enumerate_vertices;

    #[test]
    fn catalog_has_all_families() {
        let catalog = builtin_catalog();
        assert!(catalog.len() >= 8);
        for info in &catalog {
            let params: &[i64] = match info.params {
                "r" => &[2],
                "k" => &[3],
                _ => &[],
            };
            let spec = builtin_family(info.name, params).unwrap();
            assert!(spec.n_min() >= 2);
        }
    }

    #[test]
    fn unknown_and_invalid_params_are_rejected() {
        assert!(matches!(
            builtin_family("nope", &[]),
            Err(Error::UnknownFamily(_))
        ));
        assert!(matches!(
            builtin_family("kneser", &[0]),
            Err(Error::InvalidParams { .. })
        ));
        assert!(matches!(
            builtin_family("kneser", &[-2]),
            Err(Error::InvalidParams { .. })
        ));
        assert!(matches!(
            builtin_family("complete", &[4]),
            Err(Error::InvalidParams { .. })
        ));
    }

    #[test]
    fn builtin_shapes() {
        let complete = builtin_family("complete", &[]).unwrap();
        assert_eq!(complete.k(), 1);
        assert_eq!(complete.edge_orbits().len(), 1);

        let kneser3 = builtin_family("kneser", &[3]).unwrap();
        assert_eq!(kneser3.k(), 3);
        assert_eq!(kneser3.group().order(), 6);
        assert_eq!(kneser3.edge_orbits().len(), 1);
        assert_eq!(kneser3.edge_orbits()[0].pattern().match_count(), 0);

        let triple = builtin_family("triple-replace-one", &[]).unwrap();
        assert!(triple.group().is_trivial());
        assert_eq!(triple.edge_orbits().len(), 3);
        for orbit in triple.edge_orbits() {
            assert_eq!(orbit.pattern().match_count(), 2);
        }

        let tpr = builtin_family("triple-permute-or-replace", &[]).unwrap();
        assert_eq!(tpr.edge_orbits().len(), 6);
    }

    #[test]
    fn closed_form_counts_over_a_window() {
        for (name, params, k, order) in [
            ("complete", &[][..], 1usize, 1usize),
            ("kneser", &[2][..], 2, 2),
            ("johnson", &[2][..], 2, 2),
            ("ordered-pair-weighted", &[][..], 2, 1),
            ("triple-replace-one", &[][..], 3, 1),
            ("shift-register", &[3][..], 3, 1),
        ] {
            let spec = builtin_family(name, params).unwrap();
            for n in spec.n_min()..spec.n_min() + 4 {
                let got = enumerate_vertices(&spec, n, 1_000_000).unwrap().len();
                let mut expect = 1u64;
                for i in 0..k as u64 {
                    expect *= n - i;
                }
                assert_eq!(got as u64, expect / order as u64, "{name} at n = {n}");
            }
        }
    }
}
