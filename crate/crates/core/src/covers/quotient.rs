use super::cover::ColoredCover;
use crate::chains::CosetSpace;
use crate::error::{Error, Result};
use crate::report::{all_pass, Check};
use serde::Serialize;
use serde_json::json;
use std::collections::{HashMap, VecDeque};

/// Image π(base·h) of one member in G/Q, as sorted coset indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientMember {
    pub base: usize,
    /// Coset index of hQ.
    pub translate: usize,
    pub points: Vec<usize>,
}

/// A coloured cover of the finite quotient G/Q, one member per base set and
/// per element of the image of the period subgroup in G/Q.
#[derive(Clone, Debug, Serialize)]
pub struct QuotientCover {
    pub index: usize,
    pub colors: Vec<Vec<QuotientMember>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientReport {
    pub lebesgue_r: u32,
    pub max_multiplicity: usize,
    pub members_per_color: Vec<usize>,
    pub checks: Vec<Check>,
}

impl QuotientReport {
    pub fn pass(&self) -> bool {
        all_pass(&self.checks)
    }
}

/// Orbit of the identity coset under the left action of the period
/// subgroup, i.e. the cosets hQ with h in the period.
fn period_image(cover: &ColoredCover, cs: &CosetSpace) -> Vec<usize> {
    let g = &cover.group;
    let mut gens = cover.period.lattice.generators(g);
    let inv: Vec<_> = gens.iter().map(|x| g.invert(x)).collect();
    gens.extend(inv);
    let start = cs.locate(&g.identity());
    let mut seen = vec![false; cs.index()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    let mut out = vec![start];
    while let Some(i) = queue.pop_front() {
        for s in &gens {
            let j = cs.act(s, i);
            if !seen[j] {
                seen[j] = true;
                out.push(j);
                queue.push_back(j);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Projects every member base·h to G/Q. Fails when the projection is not
/// injective on some base set, naming the colliding pair.
pub fn push_cover_to_quotient(cover: &ColoredCover, cs: &CosetSpace, cap: usize) -> Result<QuotientCover> {
    if cs.group() != &cover.group {
        return Err(Error::Invalid("coset space and cover live on different groups".into()));
    }
    let image = period_image(cover, cs);
    let mut colors = Vec::new();
    for (l, bases) in cover.colors.iter().enumerate() {
        let mut members = Vec::new();
        for (b, base) in bases.iter().enumerate() {
            let pts = base.enumerate(cap)?;
            let mut seen: HashMap<usize, &_> = HashMap::new();
            for u in &pts {
                let c = cs.locate(u);
                if let Some(prev) = seen.insert(c, u) {
                    return Err(Error::Precondition(format!(
                        "projection is not injective on colors[{l}][{b}]: {prev} and {u} share coset {c}"
                    )));
                }
            }
            for &t in &image {
                let rep = cs.rep(t);
                let mut points: Vec<usize> = pts
                    .iter()
                    .map(|u| cs.locate(&cover.group.multiply(u, rep)))
                    .collect();
                points.sort_unstable();
                members.push(QuotientMember {
                    base: b,
                    translate: t,
                    points,
                });
            }
        }
        colors.push(members);
    }
    Ok(QuotientCover {
        index: cs.index(),
        colors,
    })
}

/// Disjointness within colours, multiplicity and the ball-form Lebesgue
/// condition at every vertex of the Schreier graph of G/Q.
pub fn verify_quotient_cover(qc: &QuotientCover, cs: &CosetSpace, r: u32) -> QuotientReport {
    let n = qc.index;
    let s = qc.colors.len().saturating_sub(1);
    // member ids per point, per colour
    let mut at: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); n]; qc.colors.len()];
    for (l, members) in qc.colors.iter().enumerate() {
        for (m, mem) in members.iter().enumerate() {
            for &p in &mem.points {
                at[l][p].push(m);
            }
        }
    }
    let mut overlap = None;
    let mut max_mult = 0;
    let mut uncovered = None;
    for p in 0..n {
        let mut mult = 0;
        for (l, per) in at.iter().enumerate() {
            let here = &per[p];
            if here.len() > 1 && overlap.is_none() {
                let (a, b) = (&qc.colors[l][here[0]], &qc.colors[l][here[1]]);
                overlap = Some(json!({
                    "point": p, "color": l,
                    "members": [{"base": a.base, "translate": a.translate}, {"base": b.base, "translate": b.translate}],
                }));
            }
            mult += usize::from(!here.is_empty());
        }
        max_mult = max_mult.max(mult);
        if mult == 0 && uncovered.is_none() {
            uncovered = Some(p);
        }
    }
    let mut lebesgue_fail = Vec::new();
    for x in 0..n {
        let ball: Vec<usize> = cs
            .distances_from(x, Some(r))
            .iter()
            .enumerate()
            .filter_map(|(i, d)| d.map(|_| i))
            .collect();
        let ok = qc.colors.iter().enumerate().any(|(l, members)| {
            at[l][x]
                .iter()
                .any(|&m| ball.iter().all(|y| members[m].points.binary_search(y).is_ok()))
        });
        if !ok {
            lebesgue_fail.push(x);
        }
    }
    let mut checks = Vec::new();
    let mut c = Check::new("per-color-disjointness", overlap.is_none());
    if let Some(w) = overlap {
        c = c.witness(w);
    }
    checks.push(c);
    let mut c = Check::new("multiplicity", max_mult <= s + 1 && uncovered.is_none()).measured(json!(max_mult));
    if let Some(p) = uncovered {
        c = c.witness(json!({ "uncovered_point": p }));
    }
    checks.push(c);
    let mut c = Check::new("lebesgue_at_R", lebesgue_fail.is_empty()).measured(json!(lebesgue_fail.len()));
    if let Some(&x) = lebesgue_fail.first() {
        c = c.witness(json!({ "point": x, "rep": cs.rep(x), "radius": r }));
    }
    checks.push(c);
    QuotientReport {
        lebesgue_r: r,
        max_multiplicity: max_mult,
        members_per_color: qc.colors.iter().map(Vec::len).collect(),
        checks,
    }
}
