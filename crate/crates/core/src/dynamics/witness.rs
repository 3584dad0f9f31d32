use super::action::{point_label, FiniteAction};
use super::folner::symmetric_difference;
use super::growth::GrowthCertificate;
use super::marker::MarkerSet;
use super::towers::TowerSystem;
use crate::decay::DecayFamily;
use crate::error::{Error, Result};
use crate::group::Element;
use crate::json::frac_value;
use crate::report::{all_pass, Check};
use crate::scalar::{from_u64, Scalar};
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

/// One family μ^(k): G → functions on X, stored on its finite support.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessFamily<S: Scalar> {
    pub label: String,
    pub maps: BTreeMap<Element, Vec<S>>,
}

impl<S: Scalar> WitnessFamily<S> {
    fn at(&self, g: &Element) -> Option<&Vec<S>> {
        self.maps.get(g)
    }
}

/// Finitely supported families μ^(0..=am_d) on a finite G-set.
#[derive(Clone, Debug)]
pub struct AmdimWitness<S: Scalar> {
    pub action: FiniteAction,
    pub families: Vec<WitnessFamily<S>>,
    /// Claimed bound for the shift condition.
    pub eps: S,
    pub m_set: Vec<Element>,
    /// Construction data (indices, set sizes, bounds).
    pub bookkeeping: Value,
}

impl<S: Scalar> AmdimWitness<S> {
    pub fn am_d(&self) -> usize {
        self.families.len().saturating_sub(1)
    }

    pub fn to_json(&self) -> Value {
        let fams: Vec<Value> = self
            .families
            .iter()
            .map(|f| {
                let maps: Vec<Value> = f
                    .maps
                    .iter()
                    .map(|(g, v)| {
                        json!({"g": g, "values": v.iter().map(|s| frac_value(&s.to_rational())).collect::<Vec<_>>()})
                    })
                    .collect();
                json!({"label": f.label, "maps": maps})
            })
            .collect();
        json!({
            "action": self.action.to_json(),
            "am_d": self.am_d(),
            "eps": frac_value(&self.eps.to_rational()),
            "M": self.m_set,
            "bookkeeping": self.bookkeeping,
            "families": fams,
        })
    }
}

fn nonzero<S: Scalar>(v: &[S]) -> bool {
    v.iter().any(|s| !s.is_zero())
}

/// μ^{(l,j)}_g = ν^(j)(g) · f^(l)_ḡ for towers over G/G_n and a complete decay
/// family with period G_n.
pub fn build_amdim_witness_product<S: Scalar>(ts: &TowerSystem<S>, family: &DecayFamily<S>) -> Result<AmdimWitness<S>> {
    if ts.action.group != family.group {
        return Err(Error::Precondition("towers and decay family live on different groups".into()));
    }
    if ts.quotient.lattice() != &family.period.lattice {
        return Err(Error::Precondition(format!(
            "stage mismatch: towers over {:?}, decay period {:?}",
            ts.quotient.lattice().divisors(),
            family.period.lattice.divisors()
        )));
    }
    if !family.complete {
        return Err(Error::Unsupported("product witnesses need a decay family stored on its whole support".into()));
    }
    let mut families = Vec::new();
    for (l, fl) in ts.functions.iter().enumerate() {
        for (j, values) in family.values.iter().enumerate() {
            let mut maps = BTreeMap::new();
            for (u, nu) in values {
                if nu.is_zero() {
                    continue;
                }
                let f = &fl[ts.quotient.locate(u)];
                let v: Vec<S> = f.iter().map(|x| nu.clone() * x.clone()).collect();
                if nonzero(&v) {
                    maps.insert(u.clone(), v);
                }
            }
            families.push(WitnessFamily {
                label: format!("(l={l},j={j})"),
                maps,
            });
        }
    }
    let m_set = if family.scale_m.is_empty() {
        ts.action.group.generators().to_vec()
    } else {
        family.scale_m.clone()
    };
    Ok(AmdimWitness {
        action: ts.action.clone(),
        families,
        eps: ts.eps.clone() + family.tolerance_eps.clone(),
        m_set,
        bookkeeping: json!({
            "construction": "product",
            "N": ts.quotient.index(),
            "r": ts.r(),
            "s": family.s(),
            "families": (ts.r() + 1) * (family.s() + 1),
        }),
    })
}

/// μ^{(l,j)}_g = (1/|J|) Σ_{h∈J} ν^{(l,j,h⁻¹g)} ∘ α_{h⁻¹}, where the ν form the
/// uniform partition of unity subordinate to the marker translates α_g(Z),
/// g ∈ N^{(l,j)} = {g : Jg ⊆ g_l h_j F}.
pub fn build_amdim_witness_folner<S: Scalar>(
    action: &FiniteAction,
    growth: &GrowthCertificate,
    markers: &MarkerSet,
    j_set: &[Element],
) -> Result<AmdimWitness<S>> {
    let g = &action.group;
    if growth.group != *g {
        return Err(Error::Precondition("growth certificate is for another group".into()));
    }
    if j_set.is_empty() {
        return Err(Error::Invalid("J is empty".into()));
    }
    let js: BTreeSet<&Element> = j_set.iter().collect();
    let ms: BTreeSet<&Element> = growth.m_set.iter().collect();
    if js != ms {
        return Err(Error::Precondition("the growth certificate was not built for M = J".into()));
    }
    let gc = growth.verify()?;
    if !gc.pass {
        return Err(Error::Precondition(format!("growth certificate fails: {:?}", gc.witness)));
    }
    let fs: BTreeSet<&Element> = growth.f_set.iter().collect();
    if fs != markers.f_set.iter().collect::<BTreeSet<_>>() {
        return Err(Error::Precondition("markers were built for a different F".into()));
    }
    let mc = super::marker::verify_marker(action, &markers.f_set, &markers.translators, &markers.z)?;
    if !mc.pass() {
        return Err(Error::Precondition("marker disjointness or coverage fails".into()));
    }

    let f_lookup: HashSet<&Element> = growth.f_set.iter().collect();
    let j0i = g.invert(&j_set[0]);
    let mut cache: HashMap<Element, Vec<usize>> = HashMap::new();
    let mut perm = |e: &Element| -> Result<Vec<usize>> {
        if let Some(p) = cache.get(e) {
            return Ok(p.clone());
        }
        let p = action.perm_of(e)?;
        cache.insert(e.clone(), p.clone());
        Ok(p)
    };

    // N^{(l,j)} and the cover members α_g(Z)
    let mut labels = Vec::new();
    let mut nsets: Vec<Vec<Element>> = Vec::new();
    for (l, gl) in markers.translators.iter().enumerate() {
        for (jj, hj) in growth.translators.iter().enumerate() {
            let base = g.multiply(gl, hj);
            let base_inv = g.invert(&base);
            let mut n = BTreeSet::new();
            for f in &growth.f_set {
                let cand = g.multiply(&j0i, &g.multiply(&base, f));
                if j_set
                    .iter()
                    .all(|h| f_lookup.contains(&g.multiply(&base_inv, &g.multiply(h, &cand))))
                {
                    n.insert(cand);
                }
            }
            labels.push(format!("(l={l},j={jj})"));
            nsets.push(n.into_iter().collect());
        }
    }
    let size = action.size();
    let mut count = vec![0u64; size];
    for n in &nsets {
        for gp in n {
            let p = perm(gp)?;
            for &z in &markers.z {
                count[p[z]] += 1;
            }
        }
    }
    if let Some(x) = (0..size).find(|&x| count[x] == 0) {
        return Err(Error::Precondition(format!("point {x} is not covered by the marker translates")));
    }
    let jn = j_set.len() as u64;
    let mut families = Vec::new();
    let j_perms: Vec<Vec<usize>> = j_set.iter().map(&mut perm).collect::<Result<_>>()?;
    for (k, n) in nsets.iter().enumerate() {
        let mut maps: BTreeMap<Element, Vec<S>> = BTreeMap::new();
        for gp in n {
            let p = perm(gp)?;
            for &z in &markers.z {
                let y = p[z];
                let val = S::one() / from_u64::<S>(jn * count[y]);
                for (h, ph) in j_set.iter().zip(&j_perms) {
                    let entry = maps
                        .entry(g.multiply(h, gp))
                        .or_insert_with(|| vec![S::zero(); size]);
                    let x = ph[y];
                    entry[x] = entry[x].clone() + val.clone();
                }
            }
        }
        families.push(WitnessFamily {
            label: labels[k].clone(),
            maps,
        });
    }

    let m_set = g.generators().to_vec();
    let mut eps = S::zero();
    let mut boundary = Vec::new();
    for s in &m_set {
        let b = symmetric_difference(g, j_set, s);
        boundary.push(b);
        eps = S::max_of(eps, from_u64::<S>(b as u64) / from_u64::<S>(jn));
    }
    let d = markers.translators.len() - 1;
    Ok(AmdimWitness {
        action: action.clone(),
        families,
        eps: eps.clone(),
        m_set,
        bookkeeping: json!({
            "construction": "folner",
            "J": j_set.len(),
            "boundary": boundary,
            "folner_bound": frac_value(&eps.to_rational()),
            "F": growth.f_set.len(),
            "growth_translators": growth.translators.len(),
            "hirsch": growth.hirsch,
            "d": d,
            "N_sizes": nsets.iter().map(Vec::len).collect::<Vec<_>>(),
            "family_bound": growth.translators.len() * (d + 1),
        }),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub am_d: usize,
    /// Largest |μ_h(α_{g⁻¹}x) − μ_{gh}(x)| over g ∈ M, h, x.
    #[serde(serialize_with = "crate::json::serialize_rational")]
    pub measured_eps: BigRational,
    /// Largest |Σ_{h∈E} (μ_h(α_{g⁻¹}x) − μ_{gh}(x))| over finite E ⊆ G,
    /// g ∈ M and x: the larger of the positive and negative parts.
    #[serde(serialize_with = "crate::json::serialize_rational")]
    pub sum_eps: BigRational,
    pub checks: Vec<Check>,
}

impl WitnessReport {
    pub fn pass(&self) -> bool {
        all_pass(&self.checks)
    }
}

/// Point-wise view: for each point x, the nonzero (g, μ_g(x)) of one family.
fn by_point<S: Scalar>(f: &WitnessFamily<S>, size: usize) -> Vec<Vec<(Element, S)>> {
    let mut out = vec![Vec::new(); size];
    for (g, v) in &f.maps {
        for (x, s) in v.iter().enumerate() {
            if !s.is_zero() {
                out[x].push((g.clone(), s.clone()));
            }
        }
    }
    out
}

/// Checks values in [0,1], the exact partition Σ_k Σ_g μ^(k)_g = 1, exact
/// orthogonality within each family, and measures the shift defect.
pub fn verify_witness<S: Scalar>(w: &AmdimWitness<S>) -> Result<WitnessReport> {
    let a = &w.action;
    let g = &a.group;
    let n = a.size();
    let mut checks = Vec::new();

    let mut bad_range = None;
    let mut sums = vec![S::zero(); n];
    for (k, f) in w.families.iter().enumerate() {
        if let Some(v) = f.maps.values().next() {
            if v.len() != n {
                return Err(Error::Invalid(format!("family {k} has functions of length {} on {n} points", v.len())));
            }
        }
        for (h, v) in &f.maps {
            for (x, s) in v.iter().enumerate() {
                if (*s < S::zero() || *s > S::one()) && bad_range.is_none() {
                    bad_range = Some(json!({"family": k, "g": h, "point": point_label(a, x)}));
                }
                sums[x] = sums[x].clone() + s.clone();
            }
        }
    }
    let mut c = Check::new("values-in-unit-interval", bad_range.is_none());
    if let Some(wt) = bad_range {
        c = c.witness(wt);
    }
    checks.push(c);

    let off = (0..n).find(|&x| !sums[x].approx_eq(&S::one()));
    let mut c = Check::new("a-partition", off.is_none());
    if let Some(x) = off {
        c = c.witness(json!({"point": point_label(a, x), "index": x, "sum": frac_value(&sums[x].to_rational())}));
    }
    checks.push(c);

    let points: Vec<Vec<Vec<(Element, S)>>> = w.families.iter().map(|f| by_point(f, n)).collect();
    let mut clash = None;
    'outer: for (k, pf) in points.iter().enumerate() {
        for (x, list) in pf.iter().enumerate() {
            if list.len() > 1 {
                clash = Some(json!({"family": k, "point": point_label(a, x), "g": [list[0].0.clone(), list[1].0.clone()]}));
                break 'outer;
            }
        }
    }
    let mut c = Check::new("b-orthogonality", clash.is_none());
    if let Some(wt) = clash {
        c = c.witness(wt);
    }
    checks.push(c);

    let mut best = S::zero();
    let mut at: Option<Value> = None;
    let mut best_sum = S::zero();
    let zero_fn = vec![S::zero(); n];
    for s in &w.m_set {
        let si = g.invert(s);
        let back = a.perm_of(&si)?;
        for (k, f) in w.families.iter().enumerate() {
            let mut hs: BTreeSet<Element> = f.maps.keys().cloned().collect();
            hs.extend(f.maps.keys().map(|u| g.multiply(&si, u)));
            let hs: Vec<Element> = hs.into_iter().collect();
            let local: Vec<(S, Option<Value>)> = hs
                .par_iter()
                .map(|h| {
                    let left = f.at(h).unwrap_or(&zero_fn);
                    let right = f.at(&g.multiply(s, h)).unwrap_or(&zero_fn);
                    let mut b = S::zero();
                    let mut where_ = None;
                    for x in 0..n {
                        let d = (left[back[x]].clone() - right[x].clone()).abs();
                        if d > b {
                            b = d;
                            where_ = Some(x);
                        }
                    }
                    let wt = where_.map(|x| json!({"g": s, "family": k, "h": h, "point": point_label(a, x)}));
                    (b, wt)
                })
                .collect();
            for (b, wt) in local {
                if b > best {
                    best = b;
                    at = wt;
                }
            }
            let (mut pos, mut neg) = (vec![S::zero(); n], vec![S::zero(); n]);
            for h in &hs {
                let left = f.at(h).unwrap_or(&zero_fn);
                let right = f.at(&g.multiply(s, h)).unwrap_or(&zero_fn);
                for x in 0..n {
                    let d = left[back[x]].clone() - right[x].clone();
                    if d > S::zero() {
                        pos[x] = pos[x].clone() + d;
                    } else {
                        neg[x] = neg[x].clone() - d;
                    }
                }
            }
            for v in pos.into_iter().chain(neg) {
                if v > best_sum {
                    best_sum = v;
                }
            }
        }
    }
    let pass = best.approx_le(&w.eps);
    let mut c = Check::new("c-shift", pass).measured(json!({
        "measured": frac_value(&best.to_rational()),
        "claimed": frac_value(&w.eps.to_rational()),
    }));
    if let (false, Some(wt)) = (pass, at) {
        c = c.witness(wt);
    }
    checks.push(c);

    let measured = best.to_rational();
    Ok(WitnessReport {
        am_d: w.am_d(),
        sum_eps: best_sum.to_rational(),
        measured_eps: measured,
        checks,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SimplicialReport {
    pub am_d: usize,
    pub vertices: usize,
    #[serde(serialize_with = "crate::json::serialize_rational")]
    pub eps: BigRational,
    /// max over x and g ∈ M of d¹(φ(α_g x), g·φ(x)).
    #[serde(serialize_with = "crate::json::serialize_rational")]
    pub measured: BigRational,
    /// 2(am_d + 1)·eps
    #[serde(serialize_with = "crate::json::serialize_rational")]
    pub bound: BigRational,
    pub checks: Vec<Check>,
}

impl SimplicialReport {
    pub fn pass(&self) -> bool {
        all_pass(&self.checks)
    }
}

/// The barycentric map φ(x) = Σ μ^(k)_g(x)·v_(k,g) into the complex with
/// vertex set G × {0..am_d}; measures the exact ℓ¹ equivariance defect.
pub fn witness_to_simplicial_map<S: Scalar>(w: &AmdimWitness<S>) -> Result<SimplicialReport> {
    let report = verify_witness(w)?;
    let a = &w.action;
    let g = &a.group;
    let n = a.size();
    let points: Vec<Vec<Vec<(Element, S)>>> = w.families.iter().map(|f| by_point(f, n)).collect();
    let vertices: usize = w.families.iter().map(|f| f.maps.len()).sum();
    let mut best = S::zero();
    let mut at = None;
    for s in &w.m_set {
        let p = a.perm_of(s)?;
        let local: Vec<(S, usize)> = (0..n)
            .into_par_iter()
            .map(|x| {
                let y = p[x];
                let mut total = S::zero();
                for pf in &points {
                    let mut diff: BTreeMap<Element, S> = BTreeMap::new();
                    for (h, v) in &pf[y] {
                        *diff.entry(h.clone()).or_insert_with(S::zero) = v.clone();
                    }
                    for (h, v) in &pf[x] {
                        let e = diff.entry(g.multiply(s, h)).or_insert_with(S::zero);
                        *e = e.clone() - v.clone();
                    }
                    total = diff.into_values().fold(total, |t, d| t + d.abs());
                }
                (total, x)
            })
            .collect();
        for (t, x) in local {
            if t > best {
                best = t;
                at = Some(json!({"g": s, "point": point_label(a, x)}));
            }
        }
    }
    let eps = report.measured_eps.clone();
    let bound = &eps * BigRational::from_integer((2 * (w.am_d() + 1)).into());
    let measured = best.to_rational();
    let pass = S::from_ratio(measured.numer(), measured.denom()).approx_le(&S::from_ratio(bound.numer(), bound.denom()));
    let mut c = Check::new("l1-equivariance", pass).measured(json!({
        "measured": frac_value(&measured),
        "bound": frac_value(&bound),
    }));
    if let (false, Some(wt)) = (pass, at) {
        c = c.witness(wt);
    }
    let mut checks = report.checks.clone();
    checks.push(c);
    Ok(SimplicialReport {
        am_d: w.am_d(),
        vertices,
        eps,
        measured,
        bound,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::{Lattice, SubgroupChain};
    use crate::covers::{BaseSet, ColoredCover, PeriodStage};
    use crate::decay::{cover_to_decay, sup_shift};
    use crate::dynamics::{build_towers_lattice, interval_growth_certificate, marker_search, odometer_lattice};
    use crate::group::{word_ball, GroupSpec};
    use crate::report::find;
    use crate::scalar::ratio;
    use num_traits::{Signed, Zero};

    type Q = BigRational;

    fn z() -> GroupSpec {
        GroupSpec::free_abelian(1).unwrap()
    }

    fn cyclic(n: i64) -> FiniteAction {
        odometer_lattice(&z(), &Lattice::from_i64s(&z(), &[n]).unwrap(), 1000).unwrap()
    }

    fn ints(r: std::ops::Range<i64>) -> Vec<Element> {
        r.map(|i| Element::from_i64s(&[i])).collect()
    }

    fn period_eight_decay() -> DecayFamily<Q> {
        let g = z();
        let p = PeriodStage::lattice(Lattice::from_i64s(&g, &[8]).unwrap());
        let c0 = BaseSet::Points(ints(0..6));
        let c1 = BaseSet::Points(ints(4..10));
        let cover = ColoredCover::new(g.clone(), p, vec![vec![c0], vec![c1]], 1).unwrap();
        let w = word_ball(&g, &g.identity(), 40, 1000).unwrap();
        let fam: DecayFamily<Q> = cover_to_decay(&cover, &w, 1000).unwrap();
        let (shift, _) = sup_shift(&fam, &w, g.generators()).unwrap();
        fam.with_tolerance(shift)
    }

    fn towers24() -> TowerSystem<Q> {
        build_towers_lattice(&cyclic(24), &Lattice::from_i64s(&z(), &[8]).unwrap()).unwrap()
    }

    #[test]
    fn product_witness_matches_decay_shift() {
        let fam = period_eight_decay();
        let w = build_amdim_witness_product(&towers24(), &fam).unwrap();
        assert_eq!(w.families.len(), 2);
        let rep = verify_witness(&w).unwrap();
        assert!(rep.pass(), "{:?}", rep.checks);
        assert_eq!(rep.measured_eps, ratio(1, 3));
        assert_eq!(rep.measured_eps, fam.tolerance_eps);
        let sm = witness_to_simplicial_map(&w).unwrap();
        assert!(sm.pass(), "{:?}", sm.checks);
        assert_eq!(sm.bound, ratio(4, 3));
        assert!(sm.measured <= sm.bound);
        assert!(sm.measured > Q::zero());
    }

    #[test]
    fn stage_mismatch_is_refused() {
        let fam = period_eight_decay();
        let ts: TowerSystem<Q> =
            build_towers_lattice(&cyclic(24), &Lattice::from_i64s(&z(), &[4]).unwrap()).unwrap();
        assert!(matches!(build_amdim_witness_product(&ts, &fam), Err(Error::Precondition(_))));
    }

    #[test]
    fn fundamental_domain_gives_the_towers() {
        let g = z();
        let p = PeriodStage::lattice(Lattice::from_i64s(&g, &[8]).unwrap());
        let dom = ints(0..8);
        let fam = DecayFamily::<Q> {
            group: g.clone(),
            period: p,
            supports: vec![BaseSet::Points(dom.clone())],
            values: vec![dom.iter().map(|u| (u.clone(), ratio(1, 1))).collect()],
            complete: true,
            tolerance_eps: ratio(1, 1),
            scale_m: g.generators().to_vec(),
            source_r: 0,
        };
        let ts = towers24();
        let w = build_amdim_witness_product(&ts, &fam).unwrap();
        assert_eq!(w.families.len(), 1);
        for (u, v) in &w.families[0].maps {
            assert_eq!(v, &ts.functions[0][ts.quotient.locate(u)]);
        }
        assert!(verify_witness(&w).unwrap().pass());
    }

    #[test]
    fn tower_perturbation_moves_eps_by_at_most_delta() {
        let fam = period_eight_decay();
        let delta: Q = ratio(1, 10);
        let ts = towers24();
        let base = verify_witness(&build_amdim_witness_product(&ts, &fam).unwrap()).unwrap();
        let x = 5;
        let gbar = ts.functions[0].iter().position(|f| f[x] == ratio(1, 1)).unwrap();
        let bumped = ts.perturbed(0, gbar, x, ratio::<Q>(1, 1) - delta.clone());
        let rep = verify_witness(&build_amdim_witness_product(&bumped, &fam).unwrap()).unwrap();
        let moved = (rep.measured_eps - base.measured_eps).abs();
        assert!(moved <= delta);
    }

    fn folner_witness(w: i64) -> (AmdimWitness<Q>, MarkerSet) {
        let a = cyclic(24);
        let j = ints(0..w);
        let growth = interval_growth_certificate(&z(), w).unwrap();
        let markers = marker_search(&a, &growth.f_set, &[], 0).unwrap();
        assert!(markers.pass());
        (build_amdim_witness_folner(&a, &growth, &markers, &j).unwrap(), markers)
    }

    #[test]
    fn folner_witness_on_24() {
        let (w, markers) = folner_witness(8);
        assert_eq!(markers.z, vec![0]);
        assert_eq!(w.families.len(), 3);
        assert_eq!(w.eps, ratio(1, 4));
        let rep = verify_witness(&w).unwrap();
        assert!(rep.pass(), "{:?}", rep.checks);
        assert!(rep.measured_eps <= ratio(1, 4));
        let sm = witness_to_simplicial_map(&w).unwrap();
        assert!(sm.pass());
        assert_eq!(sm.bound, &rep.measured_eps * Q::from_integer(6.into()));
    }

    #[test]
    fn single_point_j_is_the_raw_partition() {
        let (w, _) = folner_witness(1);
        let rep = verify_witness(&w).unwrap();
        // J = {0}: μ^{(j)}_g = ν^{(j,g)} directly; each ν is the constant 1/3 on
        // one translator, so a unit shift moves it by 1/3
        for f in &w.families {
            assert_eq!(f.maps.len(), 1);
            assert!(f.maps.values().next().unwrap().iter().all(|v| *v == ratio(1, 3)));
        }
        assert_eq!(rep.measured_eps, ratio(1, 3));
    }

    #[test]
    fn broken_witness_is_caught() {
        let fam = period_eight_decay();
        let mut w = build_amdim_witness_product(&towers24(), &fam).unwrap();
        let (k, v) = w.families[0].maps.iter_mut().next().unwrap();
        let _ = k;
        let x = v.iter().position(|s| !s.is_zero()).unwrap();
        v[x] = Q::zero();
        let rep = verify_witness(&w).unwrap();
        assert!(!find(&rep.checks, "a-partition").unwrap().pass);
        let extra = w.families[0].maps.keys().nth(1).unwrap().clone();
        let first = w.families[0].maps.keys().next().unwrap().clone();
        let copy = w.families[0].maps[&extra].clone();
        let slot = w.families[0].maps.get_mut(&first).unwrap();
        for (a, b) in slot.iter_mut().zip(copy) {
            if !b.is_zero() {
                *a = b;
            }
        }
        let rep = verify_witness(&w).unwrap();
        assert!(!find(&rep.checks, "b-orthogonality").unwrap().pass);
    }

    #[test]
    fn one_point_space() {
        let g = z();
        let a = FiniteAction::custom(g.clone(), vec![vec![0], vec![0]]).unwrap();
        let mut maps = BTreeMap::new();
        maps.insert(g.identity(), vec![Q::from_integer(1.into())]);
        let w = AmdimWitness {
            action: a,
            families: vec![WitnessFamily { label: "0".into(), maps }],
            eps: ratio(1, 1),
            m_set: g.generators().to_vec(),
            bookkeeping: json!({}),
        };
        let sm = witness_to_simplicial_map(&w).unwrap();
        // φ is the single vertex v_(0,1); g·φ is v_(0,g), so the defect is 2
        assert_eq!(sm.measured, ratio(2, 1));
        assert!(sm.pass());
    }

    #[test]
    fn identity_shift_has_zero_defect() {
        let chain = SubgroupChain::preset("z", "factorial", 1, 3).unwrap();
        let a = crate::dynamics::build_odometer(&chain, 3, 100).unwrap();
        let ts: TowerSystem<Q> = crate::dynamics::build_towers(&a, 3).unwrap();
        // μ_g = f_ḡ for the coset representatives g ∈ [0, 6)
        let maps: BTreeMap<Element, Vec<Q>> = (0..ts.quotient.index())
            .map(|i| (ts.quotient.rep(i).clone(), ts.functions[0][i].clone()))
            .collect();
        let w = AmdimWitness {
            action: a,
            families: vec![WitnessFamily { label: "t".into(), maps }],
            eps: Q::zero(),
            m_set: vec![Element::from_i64s(&[0])],
            bookkeeping: json!({}),
        };
        let sm = witness_to_simplicial_map(&w).unwrap();
        assert!(sm.pass());
        assert_eq!(sm.measured, Q::zero());
        assert_eq!(sm.eps, Q::zero());
    }
}
