use super::family::DecayFamily;
use super::transform::Supports;
use crate::error::{Error, Result};
use crate::group::{Ball, Element, DEFAULT_CAP};
use crate::json::frac_value;
use crate::report::{all_pass, Check};
use crate::scalar::Scalar;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub window_radius: u32,
    pub checked_points: usize,
    /// Largest |μ^(l)(g·u) − μ^(l)(u)| per element g of M, as exact fractions.
    pub shifts: Vec<Value>,
    pub checks: Vec<Check>,
}

impl DecayReport {
    pub fn pass(&self) -> bool {
        all_pass(&self.checks)
    }
}

/// The measured sup-norm shift: max over g ∈ M, l and u of
/// |μ^(l)(g·u) − μ^(l)(u)|, with a point where it is attained.
pub fn sup_shift<S: Scalar>(family: &DecayFamily<S>, window: &Ball, m: &[Element]) -> Result<(S, Option<Value>)> {
    let per = shifts(family, window, m)?;
    let mut best = S::zero();
    let mut at = None;
    for (v, w) in per {
        if v > best || at.is_none() {
            best = v;
            at = w;
        }
    }
    Ok((best, at))
}

/// Sample points for shift checks: every stored support point in complete
/// mode, the period representatives of window points otherwise; each sample
/// u also contributes g⁻¹·u so that boundary crossings are seen.
fn samples<S: Scalar>(family: &DecayFamily<S>, ctx: &Supports, window: &Ball, l: usize) -> Vec<Element> {
    if family.complete {
        family.values[l].keys().cloned().collect()
    } else {
        let mut out: Vec<Element> = window
            .interior(1)
            .flat_map(|x| ctx.reps(x).swap_remove(l))
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

fn shifts<S: Scalar>(family: &DecayFamily<S>, window: &Ball, m: &[Element]) -> Result<Vec<(S, Option<Value>)>> {
    let g = &family.group;
    let ctx = Supports::new(g, &family.period.lattice, &family.supports, DEFAULT_CAP)?;
    let per_color: Vec<Vec<Element>> = (0..family.supports.len())
        .map(|l| samples(family, &ctx, window, l))
        .collect();
    m.iter()
        .map(|s| {
            let si = g.invert(s);
            let mut best = S::zero();
            let mut at = None;
            for (l, pts) in per_color.iter().enumerate() {
                let local: Vec<Result<(S, Element)>> = pts
                    .par_iter()
                    .flat_map(|w| [w.clone(), g.multiply(&si, w)])
                    .map(|u| {
                        let a = family.value(l, &g.multiply(s, &u))?;
                        let b = family.value(l, &u)?;
                        Ok(((a - b).abs(), u))
                    })
                    .collect();
                for r in local {
                    let (d, u) = r?;
                    if d > best || (at.is_none() && d == best) {
                        best = d;
                        at = Some(json!({"g": s, "color": l, "u": u}));
                    }
                }
            }
            Ok((best, at))
        })
        .collect()
}

/// Checks, on the window: (a) translate-disjoint supports at every point,
/// (b) Σ_l Σ_h μ^(l)(gh) = 1 at points at distance ≤ radius − 1, (c)
/// sup-norm shifts ≤ eps for each g ∈ M.
pub fn verify_decay<S: Scalar>(family: &DecayFamily<S>, window: &Ball, m: &[Element], eps: &S) -> Result<DecayReport> {
    let g = &family.group;
    if window.radius < 1 {
        return Err(Error::WindowTooSmall("decay checks need a window of radius ≥ 1".into()));
    }
    for x in m {
        g.check(x)?;
    }
    let ctx = Supports::new(g, &family.period.lattice, &family.supports, DEFAULT_CAP)?;
    let one = S::one();

    struct PointCheck<S> {
        overlap: Option<Value>,
        sum: Option<S>,
    }
    let points: Vec<&(Element, u32)> = window.elements.iter().collect();
    let inner = window.radius - 1;
    let results: Vec<Result<PointCheck<S>>> = points
        .par_iter()
        .map(|(x, d)| {
            let reps = ctx.reps(x);
            let mut overlap = None;
            for (l, ws) in reps.iter().enumerate() {
                if ws.len() > 1 && overlap.is_none() {
                    overlap = Some(json!({"point": x, "color": l, "representatives": [ws[0], ws[1]]}));
                }
            }
            let sum = if *d <= inner {
                let mut acc = S::zero();
                for (l, ws) in reps.iter().enumerate() {
                    for w in ws {
                        acc = acc + family.value(l, w)?;
                    }
                }
                Some(acc)
            } else {
                None
            };
            Ok(PointCheck { overlap, sum })
        })
        .collect();
    let mut overlap = None;
    let mut bad_sum = None;
    let mut checked = 0;
    for ((x, _), r) in points.iter().zip(results) {
        let r = r?;
        if overlap.is_none() {
            overlap = r.overlap;
        }
        if let Some(sum) = r.sum {
            checked += 1;
            if bad_sum.is_none() && !sum.approx_eq(&one) {
                bad_sum = Some(json!({"point": x, "sum": frac_value(&sum.to_rational())}));
            }
        }
    }
    let per = shifts(family, window, m)?;
    let mut checks = Vec::new();
    let mut c = Check::new("support-translate-disjointness", overlap.is_none());
    if let Some(w) = overlap {
        c = c.witness(w);
    }
    checks.push(c);
    let mut c = Check::new("partition", bad_sum.is_none()).measured(json!({"points": checked, "exact": S::EXACT}));
    if let Some(w) = bad_sum {
        c = c.witness(w);
    }
    checks.push(c);
    let mut worst = S::zero();
    let mut worst_at = None;
    for (v, at) in &per {
        if *v > worst || worst_at.is_none() {
            worst = v.clone();
            worst_at = at.clone();
        }
    }
    let ok = per.iter().all(|(v, _)| v.approx_le(eps));
    let mut c = Check::new("sup-shift", ok).measured(json!({
        "max": frac_value(&worst.to_rational()),
        "eps": frac_value(&eps.to_rational()),
    }));
    if !ok {
        c = c.witness(worst_at.unwrap_or(Value::Null));
    }
    checks.push(c);
    Ok(DecayReport {
        window_radius: window.radius,
        checked_points: checked,
        shifts: per.iter().map(|(v, _)| frac_value(&v.to_rational())).collect(),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::Lattice;
    use crate::covers::{BaseSet, ColoredCover, PeriodStage};
    use crate::decay::cover_to_decay;
    use crate::group::{word_ball, GroupSpec};
    use crate::report::find;
    use crate::Rational;

    fn e(x: i64) -> Element {
        Element::from_i64s(&[x])
    }

    fn family() -> (DecayFamily<Rational>, Ball) {
        let g = GroupSpec::free_abelian(1).unwrap();
        let p = PeriodStage::lattice(Lattice::from_i64s(&g, &[8]).unwrap());
        let c0 = BaseSet::Points((0..=5).map(e).collect());
        let c1 = BaseSet::Points((4..=9).map(e).collect());
        let c = ColoredCover::new(g.clone(), p, vec![vec![c0], vec![c1]], 1).unwrap();
        let w = word_ball(&g, &g.identity(), 40, DEFAULT_CAP).unwrap();
        (cover_to_decay(&c, &w, DEFAULT_CAP).unwrap(), w)
    }

    #[test]
    fn unit_shift_is_one_third() {
        let (f, w) = family();
        let m = [e(1), e(-1)];
        let third = Rational::new(1.into(), 3.into());
        let rep = verify_decay(&f, &w, &m, &third).unwrap();
        assert!(rep.pass(), "{:?}", rep.checks);
        let (sup, _) = sup_shift(&f, &w, &m).unwrap();
        assert_eq!(sup, third);
        let quarter = Rational::new(1.into(), 4.into());
        let rep = verify_decay(&f, &w, &m, &quarter).unwrap();
        let c = find(&rep.checks, "sup-shift").unwrap();
        assert!(!c.pass && c.witness.is_some());
    }

    #[test]
    fn identity_shift_is_zero() {
        let (f, w) = family();
        let (sup, _) = sup_shift(&f, &w, &[e(0)]).unwrap();
        assert_eq!(sup, Rational::from_integer(0.into()));
    }

    #[test]
    fn broken_partition_is_reported() {
        let (mut f, w) = family();
        f.values[0].insert(e(2), Rational::new(1.into(), 2.into()));
        let rep = verify_decay(&f, &w, &[e(1)], &Rational::from_integer(10.into())).unwrap();
        let c = find(&rep.checks, "partition").unwrap();
        assert!(!c.pass);
        assert!(c.witness.is_some());
    }
}
