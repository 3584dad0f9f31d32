use super::chain::SubgroupChain;
use super::coset::CosetSpace;
use crate::error::Result;
use crate::group::{word_ball, Element, LengthTable};
use serde::Serialize;
use std::collections::{HashMap, HashSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum InjectiveOutcome {
    /// Least stage on which π_n is injective on B_R(1)·k for every tested k.
    Stage {
        stage: usize,
        normal: bool,
        conjugators_tested: usize,
    },
    /// No stage in range works; the collision found at the deepest stage.
    Failure {
        stage: usize,
        g1: Element,
        g2: Element,
        k: Element,
    },
}

/// First pair g1 ≠ g2 in `ball` with g1·k and g2·k in the same coset.
fn collision(
    chain: &SubgroupChain,
    n: usize,
    ball: &[Element],
    k: &Element,
) -> Result<Option<(Element, Element)>> {
    let g = chain.group();
    let lattice = chain.stage(n)?;
    let mut seen: HashMap<Element, &Element> = HashMap::new();
    for x in ball {
        let c = lattice.canonical(g, &g.multiply(x, k));
        if let Some(prev) = seen.insert(c, x) {
            return Ok(Some((prev.clone(), x.clone())));
        }
    }
    Ok(None)
}

pub fn injective_radius_stage(
    chain: &SubgroupChain,
    r: u32,
    conjugator_radius: u32,
    cap: usize,
) -> Result<InjectiveOutcome> {
    let g = chain.group();
    let ball: Vec<Element> = word_ball(g, &g.identity(), r, cap)?.points().cloned().collect();
    let conj: Vec<Element> = word_ball(g, &g.identity(), conjugator_radius, cap)?
        .points()
        .cloned()
        .collect();
    let mut last = None;
    for n in chain.stages() {
        let normal = chain.is_normal(n)?;
        let ks: &[Element] = if normal {
            std::slice::from_ref(&conj[0])
        } else {
            &conj
        };
        let mut bad = None;
        for k in ks {
            if let Some((g1, g2)) = collision(chain, n, &ball, k)? {
                bad = Some((g1, g2, k.clone()));
                break;
            }
        }
        match bad {
            None => {
                return Ok(InjectiveOutcome::Stage {
                    stage: n,
                    normal,
                    conjugators_tested: ks.len(),
                })
            }
            Some(w) => last = Some((n, w)),
        }
    }
    let (stage, (g1, g2, k)) = last.expect("chain has at least one stage");
    Ok(InjectiveOutcome::Failure { stage, g1, g2, k })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum IsometryOutcome {
    /// Distances on B_R(x) are preserved and π(B_R(x)) = B_R(π(x)).
    Pass { pairs_checked: usize },
    /// π is not injective on B_3R(x), so the lemma does not apply;
    /// `conclusion_holds` reports whether its conclusion happens to hold anyway.
    Inconclusive {
        a: Element,
        b: Element,
        conclusion_holds: bool,
    },
    /// A counterexample to the lemma.
    Falsified { a: Element, b: Element, word: u32, quotient: u32 },
    /// A coset in B_R(π(x)) that is not the image of B_R(x).
    FalsifiedBall { coset: Element },
}

pub fn isometry_radius_check(cs: &CosetSpace, x: &Element, r: u32, cap: usize) -> Result<IsometryOutcome> {
    let g = cs.group();
    g.check(x)?;
    let big = word_ball(g, x, 3 * r, cap)?;
    let mut seen: HashMap<usize, &Element> = HashMap::new();
    let mut collision = None;
    for p in big.points() {
        if let Some(prev) = seen.insert(cs.locate(p), p) {
            collision = Some((prev.clone(), p.clone()));
            break;
        }
    }
    let outcome = compare_ball(cs, x, r, &big, cap)?;
    Ok(match collision {
        None => outcome,
        Some((a, b)) => IsometryOutcome::Inconclusive {
            a,
            b,
            conclusion_holds: matches!(outcome, IsometryOutcome::Pass { .. }),
        },
    })
}

fn compare_ball(
    cs: &CosetSpace,
    x: &Element,
    r: u32,
    big: &crate::group::Ball,
    cap: usize,
) -> Result<IsometryOutcome> {
    let g = cs.group();
    let lengths = LengthTable::new(g, 2 * r, cap)?;
    let small: Vec<&Element> = big.interior(2 * r).collect();
    let cosets: Vec<usize> = small.iter().map(|p| cs.locate(p)).collect();
    let mut pairs = 0;
    for (ia, a) in small.iter().enumerate() {
        let dist = cs.distances_from(cosets[ia], Some(2 * r));
        for (ib, b) in small.iter().enumerate() {
            let word = lengths
                .distance(g, a, b)
                .expect("points of B_R(x) are within 2R of each other");
            let quotient = dist[cosets[ib]].unwrap_or(u32::MAX);
            if word != quotient {
                return Ok(IsometryOutcome::Falsified {
                    a: (*a).clone(),
                    b: (*b).clone(),
                    word,
                    quotient,
                });
            }
            pairs += 1;
        }
    }
    let image: HashSet<usize> = cosets.iter().copied().collect();
    let around = cs.distances_from(cs.locate(x), Some(r));
    for (i, d) in around.iter().enumerate() {
        if d.is_some() && !image.contains(&i) {
            return Ok(IsometryOutcome::FalsifiedBall {
                coset: cs.rep(i).clone(),
            });
        }
    }
    Ok(IsometryOutcome::Pass { pairs_checked: pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{coset_space, Lattice, DEFAULT_INDEX_CAP};
    use crate::group::{GroupSpec, DEFAULT_CAP};
    use num_bigint::BigInt;

    fn e(v: &[i64]) -> Element {
        Element::from_i64s(v)
    }

    #[test]
    fn factorial_chain_radius_two() {
        let c = SubgroupChain::preset("z", "factorial", 0, 6).unwrap();
        let out = injective_radius_stage(&c, 2, 0, DEFAULT_CAP).unwrap();
        assert_eq!(
            out,
            InjectiveOutcome::Stage {
                stage: 3,
                normal: true,
                conjugators_tested: 1
            }
        );
    }

    #[test]
    fn constant_chain_fails_with_antipodes() {
        let z = GroupSpec::free_abelian(1).unwrap();
        let c = SubgroupChain::constant(z, vec![BigInt::from(6)], 5).unwrap();
        match injective_radius_stage(&c, 3, 0, DEFAULT_CAP).unwrap() {
            InjectiveOutcome::Failure { g1, g2, .. } => {
                assert_eq!((g1, g2), (e(&[-3]), e(&[3])));
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn isometry_examples() {
        let z = GroupSpec::free_abelian(1).unwrap();
        let cs13 = CosetSpace::new(&z, &Lattice::from_i64s(&z, &[13]).unwrap(), DEFAULT_INDEX_CAP).unwrap();
        assert!(matches!(
            isometry_radius_check(&cs13, &e(&[0]), 2, DEFAULT_CAP).unwrap(),
            IsometryOutcome::Pass { pairs_checked: 25 }
        ));
        let cs6 = CosetSpace::new(&z, &Lattice::from_i64s(&z, &[6]).unwrap(), DEFAULT_INDEX_CAP).unwrap();
        assert!(matches!(
            isometry_radius_check(&cs6, &e(&[0]), 2, DEFAULT_CAP).unwrap(),
            IsometryOutcome::Inconclusive { .. }
        ));
        // stage 2 is the α_6 image
        // (0,0,±3) ∈ B_3 collide mod the α_6 image: only the conclusion can be checked
        let u = SubgroupChain::preset("u3", "scaled", 0, 2).unwrap();
        let cs = coset_space(&u, 2, DEFAULT_INDEX_CAP).unwrap();
        assert!(matches!(
            isometry_radius_check(&cs, &e(&[0, 0, 0]), 1, DEFAULT_CAP).unwrap(),
            IsometryOutcome::Inconclusive { conclusion_holds: true, .. }
        ));
        let u3 = GroupSpec::unitriangular(3).unwrap();
        let a7 = Lattice::scaled(&u3, &BigInt::from(7)).unwrap();
        let cs7 = CosetSpace::new(&u3, &a7, DEFAULT_INDEX_CAP).unwrap();
        for x in [e(&[0, 0, 0]), e(&[1, 5, -2])] {
            assert!(matches!(
                isometry_radius_check(&cs7, &x, 1, DEFAULT_CAP).unwrap(),
                IsometryOutcome::Pass { .. }
            ));
        }
    }
}
