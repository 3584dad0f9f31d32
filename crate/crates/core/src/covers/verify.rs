use super::cover::{ColorIndex, ColoredCover};
use crate::error::{Error, Result};
use crate::group::{word_ball, Ball, Element, DEFAULT_CAP};
use crate::json::int_to_value;
use crate::report::{all_pass, Check};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

/// Failing points listed in a report, at most.
pub const WITNESS_LIST_CAP: usize = 256;

#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    pub window_center: Element,
    pub window_radius: u32,
    pub lebesgue_r: u32,
    pub window_points: usize,
    pub interior_points: usize,
    pub max_multiplicity: usize,
    /// Interior points whose R-ball lies in no member (capped list).
    pub lebesgue_failures: Vec<Element>,
    pub lebesgue_failure_count: usize,
    pub checks: Vec<Check>,
}

impl CoverReport {
    pub fn pass(&self) -> bool {
        all_pass(&self.checks)
    }
}

struct PointResult {
    multiplicity: usize,
    overlap: Option<serde_json::Value>,
    lebesgue_ok: Option<bool>,
    audit_ok: bool,
}

/// Checks the cover on the window: disjointness within colours and
/// multiplicity at every window point, the ball-form Lebesgue condition at
/// interior points (distance ≤ radius − R from the center). Membership in
/// translates base·h is decided algebraically through the period cosets.
pub fn verify_cover(cover: &ColoredCover, window: &Ball, r: u32) -> Result<CoverReport> {
    let g = &cover.group;
    g.check(&window.center)?;
    if window.radius < r {
        return Err(Error::WindowTooSmall(format!(
            "window radius {} is smaller than the Lebesgue radius {r}",
            window.radius
        )));
    }
    let period = &cover.period.lattice;
    let ball_r: Vec<Element> = word_ball(g, &g.identity(), r, DEFAULT_CAP)?.points().cloned().collect();
    let indices: Vec<ColorIndex> = cover
        .colors
        .iter()
        .map(|c| ColorIndex::new(g, period, c))
        .collect();
    let interior = window.radius - r;

    let results: Vec<PointResult> = window
        .elements
        .par_iter()
        .map(|(x, d)| {
            let mut multiplicity = 0;
            let mut overlap = None;
            let mut audit_ok = true;
            let mut members = Vec::new();
            for (l, idx) in indices.iter().enumerate() {
                let m = idx.members_at(x);
                for (_, u) in &m {
                    let h = g.multiply(&g.invert(u), x);
                    audit_ok &= period.contains(&h);
                }
                if m.len() > 1 && overlap.is_none() {
                    let show = |(b, u): &(usize, Element)| {
                        json!({"base": b, "translate": g.multiply(&g.invert(u), x)})
                    };
                    overlap = Some(json!({"point": x, "color": l, "members": [show(&m[0]), show(&m[1])]}));
                }
                multiplicity += m.len();
                members.push(m);
            }
            let lebesgue_ok = (*d <= interior).then(|| {
                members.iter().enumerate().any(|(l, m)| {
                    m.iter()
                        .any(|(b, u)| ball_r.iter().all(|s| indices[l].contains(*b, &g.multiply(s, u))))
                })
            });
            PointResult {
                multiplicity,
                overlap,
                lebesgue_ok,
                audit_ok,
            }
        })
        .collect();

    let s1 = cover.colors.len();
    let max_multiplicity = results.iter().map(|p| p.multiplicity).max().unwrap_or(0);
    let mut failures = Vec::new();
    let mut failure_count = 0;
    for ((x, _), p) in window.elements.iter().zip(&results) {
        if p.lebesgue_ok == Some(false) {
            failure_count += 1;
            if failures.len() < WITNESS_LIST_CAP {
                failures.push(x.clone());
            }
        }
    }
    let interior_points = results.iter().filter(|p| p.lebesgue_ok.is_some()).count();

    let mut checks = Vec::new();
    let overlap = results.iter().find_map(|p| p.overlap.clone());
    let mut c = Check::new("per-color-disjointness", overlap.is_none());
    if let Some(w) = overlap {
        c = c.witness(w);
    }
    checks.push(c);

    let mut c = Check::new("multiplicity", max_multiplicity <= s1).measured(json!(max_multiplicity));
    if max_multiplicity > s1 {
        let (x, _) = window
            .elements
            .iter()
            .zip(&results)
            .find(|(_, p)| p.multiplicity == max_multiplicity)
            .map(|(e, _)| e)
            .unwrap();
        c = c.witness(json!({"point": x}));
    }
    checks.push(c);

    let mut c = Check::new("lebesgue_at_R", failure_count == 0).measured(json!({
        "R": r, "interior_points": interior_points, "failures": failure_count
    }));
    if let Some(first) = failures.first() {
        c = c.witness(json!({"point": first, "failing_points": failures}));
    }
    checks.push(c);

    let audit = results.iter().all(|p| p.audit_ok);
    checks.push(
        Check::new("periodicity", audit).measured(json!({
            "period_divisors": cover.period.lattice.divisors().iter().map(int_to_value).collect::<Vec<_>>(),
            "members": "base·h for h in the period subgroup",
        })),
    );

    let diam = cover.diameter_bound(DEFAULT_CAP);
    let mut c = Check::new("boundedness", diam.is_some());
    match &diam {
        Some(d) => c = c.measured(json!({"diameter_bound": int_to_value(d)})),
        None => c = c.witness(json!("diameter bound not computable under the element cap")),
    }
    checks.push(c);

    Ok(CoverReport {
        window_center: window.center.clone(),
        window_radius: window.radius,
        lebesgue_r: r,
        window_points: window.len(),
        interior_points,
        max_multiplicity,
        lebesgue_failures: failures,
        lebesgue_failure_count: failure_count,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::Lattice;
    use crate::covers::{staggered_brick_cover_u3, synth_simplicial_cover_zm, BaseSet, PeriodStage};
    use crate::group::GroupSpec;
    use crate::report::find;

    fn two_interval_cover() -> ColoredCover {
        let g = GroupSpec::free_abelian(1).unwrap();
        let p = PeriodStage::lattice(Lattice::from_i64s(&g, &[8]).unwrap());
        let c0 = BaseSet::Points((0..=5).map(|i| Element::from_i64s(&[i])).collect());
        let c1 = BaseSet::Points((4..=9).map(|i| Element::from_i64s(&[i])).collect());
        ColoredCover::new(g, p, vec![vec![c0], vec![c1]], 1).unwrap()
    }

    fn window(g: &GroupSpec, r: u32) -> Ball {
        word_ball(g, &g.identity(), r, DEFAULT_CAP).unwrap()
    }

    #[test]
    fn period_eight_passes_at_one() {
        let c = two_interval_cover();
        let rep = verify_cover(&c, &window(&c.group, 40), 1).unwrap();
        assert!(rep.pass(), "{:?}", rep.checks);
        assert_eq!(rep.max_multiplicity, 2);
    }

    #[test]
    fn period_eight_fails_at_two() {
        let c = two_interval_cover();
        let rep = verify_cover(&c, &window(&c.group, 40), 2).unwrap();
        assert!(!rep.pass());
        let leb = find(&rep.checks, "lebesgue_at_R").unwrap();
        assert!(!leb.pass);
        assert!(rep.lebesgue_failures.contains(&Element::from_i64s(&[8])));
        // residues 0, 1, 4, 5 fail; 2, 3, 6, 7 sit two steps inside a member
        for x in &rep.lebesgue_failures {
            let r = i64::try_from(&x.0[0]).unwrap().rem_euclid(8);
            assert!([0, 1, 4, 5].contains(&r));
        }
        let expected = (-38i64..=38).filter(|x| [0, 1, 4, 5].contains(&x.rem_euclid(8))).count();
        assert_eq!(rep.lebesgue_failure_count, expected);
        assert!(find(&rep.checks, "per-color-disjointness").unwrap().pass);
    }

    #[test]
    fn single_member_is_vacuously_disjoint() {
        let g = GroupSpec::free_abelian(1).unwrap();
        let pts = (-10..=10).map(|i| Element::from_i64s(&[i])).collect();
        let p = PeriodStage::lattice(Lattice::from_i64s(&g, &[1000]).unwrap());
        let c = ColoredCover::new(g.clone(), p, vec![vec![BaseSet::Points(pts)]], 0).unwrap();
        let rep = verify_cover(&c, &window(&g, 10), 0).unwrap();
        assert!(rep.pass());
        assert_eq!(rep.max_multiplicity, 1);
    }

    #[test]
    fn overlapping_translates_are_caught() {
        let g = GroupSpec::free_abelian(1).unwrap();
        let p = PeriodStage::lattice(Lattice::from_i64s(&g, &[4]).unwrap());
        let c0 = BaseSet::Points((0..=5).map(|i| Element::from_i64s(&[i])).collect());
        let c = ColoredCover::new(g.clone(), p, vec![vec![c0]], 0).unwrap();
        let rep = verify_cover(&c, &window(&g, 10), 0).unwrap();
        let dis = find(&rep.checks, "per-color-disjointness").unwrap();
        assert!(!dis.pass);
        assert!(dis.witness.is_some());
    }

    #[test]
    fn window_smaller_than_r_is_rejected() {
        let c = two_interval_cover();
        assert!(matches!(
            verify_cover(&c, &window(&c.group, 1), 2),
            Err(Error::WindowTooSmall(_))
        ));
    }

    #[test]
    fn simplicial_line_scales() {
        let c = synth_simplicial_cover_zm(1, 8).unwrap();
        let w = window(&c.group, 40);
        assert!(verify_cover(&c, &w, 1).unwrap().pass());
        let rep = verify_cover(&c, &w, 2).unwrap();
        assert!(rep.lebesgue_failures.contains(&Element::from_i64s(&[6])));
        let c = synth_simplicial_cover_zm(1, 16).unwrap();
        assert!(verify_cover(&c, &window(&c.group, 80), 2).unwrap().pass());
    }

    #[test]
    fn simplicial_grid() {
        for (m, l, r) in [(2, 8, 1), (2, 16, 2), (3, 8, 1)] {
            let c = synth_simplicial_cover_zm(m, l).unwrap();
            let rep = verify_cover(&c, &window(&c.group, 5 * l), r).unwrap();
            assert!(rep.pass(), "{m} {l} {r}: {:?}", rep.lebesgue_failures.first());
            assert!(rep.max_multiplicity <= m + 1);
        }
    }

    #[test]
    fn staggered_u3_cover_at_scale_eight() {
        let c = staggered_brick_cover_u3(8).unwrap();
        let rep = verify_cover(&c, &window(&c.group, 6), 1).unwrap();
        assert!(rep.pass(), "{:?}", rep.checks);
        assert!(rep.max_multiplicity <= 4);
    }
}
