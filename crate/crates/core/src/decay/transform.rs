use super::dist::DistOracle;
use super::family::DecayFamily;
use crate::covers::{verify_cover, BaseSet, ColorIndex, ColoredCover, CoverReport};
use crate::error::{Error, Result};
use crate::group::{Ball, Element, GroupSpec};
use crate::scalar::Scalar;
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};

/// Support sizes up to which every value is stored.
pub const COMPLETE_CAP: usize = 200_000;

/// Consolidates each colour into one base set (the union of its base sets).
fn consolidate(cover: &ColoredCover, cap: usize) -> Result<Vec<BaseSet>> {
    cover
        .colors
        .iter()
        .map(|bases| match bases.len() {
            0 => Ok(BaseSet::Points(Vec::new())),
            1 => Ok(bases[0].clone()),
            _ => {
                let mut pts = Vec::new();
                for b in bases {
                    pts.extend(b.enumerate(cap)?);
                }
                pts.sort();
                pts.dedup();
                Ok(BaseSet::Points(pts))
            }
        })
        .collect()
}

/// Evaluation context shared by the transforms: the support sets with their
/// coset indices and distance oracles.
pub(crate) struct Supports<'a> {
    pub(crate) indices: Vec<ColorIndex<'a>>,
    pub(crate) oracles: Vec<DistOracle>,
}

impl<'a> Supports<'a> {
    pub(crate) fn new(
        group: &'a GroupSpec,
        period: &'a crate::chains::Lattice,
        sets: &'a [BaseSet],
        cap: usize,
    ) -> Result<Self> {
        Ok(Supports {
            indices: sets
                .iter()
                .map(|s| ColorIndex::new(group, period, std::slice::from_ref(s)))
                .collect(),
            oracles: DistOracle::for_sets(group, sets, cap)?,
        })
    }

    /// Period representatives of x in each support: reps[l] lists the u in
    /// U^(l) with x ∈ U^(l)·(u⁻¹x).
    pub(crate) fn reps(&self, x: &Element) -> Vec<Vec<Element>> {
        self.indices
            .iter()
            .map(|i| i.members_at(x).into_iter().map(|(_, u)| u).collect())
            .collect()
    }

    /// Σ over all members V ∋ u of dist(u, G∖V).
    fn denominator(&self, u: &Element) -> u64 {
        self.reps(u)
            .iter()
            .zip(&self.oracles)
            .map(|(ws, o)| ws.iter().map(|w| u64::from(o.dist(w))).sum::<u64>())
            .sum()
    }

    /// μ^(l)(u) = dist(u, G∖U^(l)) / Σ_V dist(u, G∖V).
    pub(crate) fn mu(&self, l: usize, u: &Element) -> BigRational {
        let d = self.oracles[l].dist(u);
        if d == 0 {
            return BigRational::from_integer(0.into());
        }
        BigRational::new(BigInt::from(d), BigInt::from(self.denominator(u)))
    }
}

/// Distance-ratio decay functions of a cover (after merging each colour into
/// one base set). The cover must pass verification at its claimed scale on
/// `window`. Values are stored for every support point when the supports are
/// small, otherwise at the window's period representatives and their shifts
/// by the generators.
pub fn cover_to_decay<S: Scalar>(cover: &ColoredCover, window: &Ball, cap: usize) -> Result<DecayFamily<S>> {
    let r = cover.scale_r;
    let report = verify_cover(cover, window, r)?;
    if !report.pass() {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        return Err(Error::Precondition(format!(
            "cover fails its claimed scale R = {r}: {}",
            failed.join(", ")
        )));
    }
    let g = &cover.group;
    let supports = consolidate(cover, cap)?;
    let ctx = Supports::new(g, &cover.period.lattice, &supports, cap)?;
    let scale_m: Vec<Element> = g.generators().to_vec();

    let total: BigInt = supports.iter().map(BaseSet::size).sum();
    let complete = total <= BigInt::from(COMPLETE_CAP);
    let targets: Vec<BTreeSet<Element>> = if complete {
        supports
            .iter()
            .map(|s| s.enumerate(cap).map(|v| v.into_iter().collect()))
            .collect::<Result<_>>()?
    } else {
        let per_point: Vec<Vec<Vec<Element>>> = window.points().collect::<Vec<_>>().par_iter().map(|x| ctx.reps(x)).collect();
        let mut t = vec![BTreeSet::new(); supports.len()];
        for reps in per_point {
            for (l, ws) in reps.into_iter().enumerate() {
                for w in ws {
                    for s in &scale_m {
                        let y = g.multiply(s, &w);
                        if ctx.oracles[l].dist(&y) > 0 {
                            t[l].insert(y);
                        }
                    }
                    t[l].insert(w);
                }
            }
        }
        t
    };
    let values: Vec<BTreeMap<Element, S>> = targets
        .iter()
        .enumerate()
        .map(|(l, pts)| {
            pts.iter()
                .collect::<Vec<_>>()
                .par_iter()
                .map(|u| {
                    let q = ctx.mu(l, u);
                    ((*u).clone(), S::from_ratio(q.numer(), q.denom()))
                })
                .collect()
        })
        .collect();
    let s = supports.len() as i64 - 1;
    Ok(DecayFamily {
        group: g.clone(),
        period: cover.period.clone(),
        supports,
        values,
        complete,
        tolerance_eps: lipschitz_bound(s as usize, r),
        scale_m,
        source_r: r,
    })
}

/// 2(2s+3)/R, the sup-shift bound for unit generators; at R = 0 only the
/// trivial bound 1 for [0,1]-valued functions is available.
pub fn lipschitz_bound<S: Scalar>(s: usize, r: u32) -> S {
    if r == 0 {
        return S::one();
    }
    S::from_ratio(&BigInt::from(2 * (2 * s + 3)), &BigInt::from(r))
}

/// Result of turning a decay family back into a cover.
#[derive(Clone, Debug)]
pub struct DecayCover {
    pub cover: ColoredCover,
    /// Largest R for which, at every window point g at distance ≤ radius − 1,
    /// the translate selected by the pigeonhole bound μ ≥ 1/(s+1) contains
    /// B_R(g).
    pub claimed_r: u32,
    pub report: CoverReport,
}

/// Supports become base sets; the claimed scale comes from the pigeonhole
/// step and is then checked by `verify_cover` on the same window.
pub fn decay_to_cover<S: Scalar>(family: &DecayFamily<S>, window: &Ball, cap: usize) -> Result<DecayCover> {
    let s1 = family.supports.len();
    if s1 == 0 {
        return Err(Error::Invalid("family has no colours".into()));
    }
    let bound = S::from_ratio(&BigInt::from(1), &BigInt::from(s1));
    if !(family.tolerance_eps < bound) {
        return Err(Error::Precondition(format!(
            "tolerance {:?} is not below 1/(s+1) = 1/{s1}",
            family.tolerance_eps
        )));
    }
    let g = &family.group;
    let ctx = Supports::new(g, &family.period.lattice, &family.supports, cap)?;
    let inner: Vec<&Element> = window.interior(1).collect();
    let per_point: Vec<Result<u32>> = inner
        .par_iter()
        .map(|x| {
            let mut best: Option<u32> = None;
            for (l, ws) in ctx.reps(x).iter().enumerate() {
                for w in ws {
                    if family.value(l, w)? >= bound {
                        let d = ctx.oracles[l].dist(w).saturating_sub(1);
                        best = Some(best.map_or(d, |b| b.max(d)));
                    }
                }
            }
            best.ok_or_else(|| Error::Precondition(format!("no colour reaches 1/(s+1) at {x}")))
        })
        .collect();
    let mut claimed = window.radius;
    for r in per_point {
        claimed = claimed.min(r?);
    }
    let colors = family.supports.iter().map(|b| vec![b.clone()]).collect();
    let cover = ColoredCover::new(g.clone(), family.period.clone(), colors, claimed)?;
    let report = verify_cover(&cover, window, claimed)?;
    Ok(DecayCover {
        cover,
        claimed_r: claimed,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::Lattice;
    use crate::covers::PeriodStage;
    use crate::group::{word_ball, DEFAULT_CAP};
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn e(x: i64) -> Element {
        Element::from_i64s(&[x])
    }

    pub(crate) fn period_eight() -> ColoredCover {
        ColoredCover::period_eight_demo()
    }

    fn ball(g: &GroupSpec, r: u32) -> Ball {
        word_ball(g, &g.identity(), r, DEFAULT_CAP).unwrap()
    }

    #[test]
    fn distance_ratio_values() {
        let c = period_eight();
        let f: DecayFamily<Rational> = cover_to_decay(&c, &ball(&c.group, 40), DEFAULT_CAP).unwrap();
        assert!(f.complete);
        assert_eq!(f.value(0, &e(2)).unwrap(), q(1, 1));
        assert_eq!(f.value(0, &e(4)).unwrap(), q(2, 3));
        assert_eq!(f.value(1, &e(4)).unwrap(), q(1, 3));
        assert_eq!(f.value(0, &e(7)).unwrap(), q(0, 1));
        assert_eq!(f.tolerance_eps, q(10, 1));
    }

    #[test]
    fn round_trip_reproduces_bases() {
        let c = period_eight();
        let w = ball(&c.group, 40);
        let f: DecayFamily<Rational> = cover_to_decay(&c, &w, DEFAULT_CAP).unwrap();
        let f = f.with_tolerance(q(1, 3));
        let back = decay_to_cover(&f, &w, DEFAULT_CAP).unwrap();
        assert_eq!(back.cover.colors, c.colors);
        assert_eq!(back.claimed_r, 1);
        assert!(back.report.pass());
    }

    #[test]
    fn loose_tolerance_is_refused() {
        let c = period_eight();
        let w = ball(&c.group, 40);
        let f: DecayFamily<Rational> = cover_to_decay(&c, &w, DEFAULT_CAP).unwrap();
        assert!(matches!(decay_to_cover(&f, &w, DEFAULT_CAP), Err(Error::Precondition(_))));
    }

    #[test]
    fn failing_cover_is_refused() {
        let mut c = period_eight();
        c.scale_r = 2;
        let r: Result<DecayFamily<Rational>> = cover_to_decay(&c, &ball(&c.group, 40), DEFAULT_CAP);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn partition_cover_takes_values_zero_and_one() {
        let g = GroupSpec::free_abelian(1).unwrap();
        let p = PeriodStage::lattice(Lattice::from_i64s(&g, &[4]).unwrap());
        let c = ColoredCover::new(g.clone(), p, vec![vec![BaseSet::Points((0..4).map(e).collect())]], 0).unwrap();
        let f: DecayFamily<Rational> = cover_to_decay(&c, &ball(&g, 20), DEFAULT_CAP).unwrap();
        for v in f.values[0].values() {
            assert_eq!(*v, q(1, 1));
        }
    }

    #[test]
    fn float_instantiation_agrees() {
        let c = period_eight();
        let f: DecayFamily<f64> = cover_to_decay(&c, &ball(&c.group, 40), DEFAULT_CAP).unwrap();
        assert!((f.value(0, &e(4)).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let c = period_eight();
        let f: DecayFamily<Rational> = cover_to_decay(&c, &ball(&c.group, 40), DEFAULT_CAP).unwrap();
        let back = DecayFamily::<Rational>::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
    }
}
