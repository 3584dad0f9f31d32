use crate::error::{Error, Result};
use crate::group::{Element, GroupKind, GroupSpec};
use crate::report::Check;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::json;
use std::collections::{BTreeSet, HashMap};

/// F and translators g_1..g_m with M·x ⊆ g_j·F for some j, for every x ∈ F⁻¹F.
#[derive(Clone, Debug)]
pub struct GrowthCertificate {
    pub group: GroupSpec,
    pub m_set: Vec<Element>,
    pub f_set: Vec<Element>,
    pub translators: Vec<Element>,
    pub hirsch: usize,
    /// The bound n of each recursion level, innermost quotient first.
    pub levels: Vec<i64>,
    pub check: Check,
}

type V = Vec<i64>;

/// ℤ^k (k may be 0) or U_3(ℤ) in coordinates (a, c, b), with i64 arithmetic.
#[derive(Clone, Copy, Debug)]
enum Model {
    Abelian(usize),
    Heisenberg,
}

impl Model {
    fn dim(self) -> usize {
        match self {
            Model::Abelian(k) => k,
            Model::Heisenberg => 3,
        }
    }

    fn mul(self, x: &[i64], y: &[i64]) -> V {
        match self {
            Model::Abelian(_) => x.iter().zip(y).map(|(a, b)| a + b).collect(),
            Model::Heisenberg => vec![x[0] + y[0], x[1] + y[1] + x[0] * y[2], x[2] + y[2]],
        }
    }

    fn inv(self, x: &[i64]) -> V {
        match self {
            Model::Abelian(_) => x.iter().map(|a| -a).collect(),
            Model::Heisenberg => vec![-x[0], -x[1] + x[0] * x[2], -x[2]],
        }
    }

    fn id(self) -> V {
        vec![0; self.dim()]
    }

    /// Quotient by ⟨t⟩ with t the canonical central element.
    fn quotient(self) -> Model {
        match self {
            Model::Abelian(k) => Model::Abelian(k - 1),
            Model::Heisenberg => Model::Abelian(2),
        }
    }

    fn t_coord(self) -> usize {
        match self {
            Model::Abelian(k) => k - 1,
            Model::Heisenberg => 1,
        }
    }

    fn pi(self, x: &[i64]) -> V {
        match self {
            Model::Abelian(k) => x[..k - 1].to_vec(),
            Model::Heisenberg => vec![x[0], x[2]],
        }
    }

    /// Coordinate lift of the quotient, σ(1) = 1.
    fn sigma(self, h: &[i64]) -> V {
        match self {
            Model::Abelian(_) => {
                let mut v = h.to_vec();
                v.push(0);
                v
            }
            Model::Heisenberg => vec![h[0], 0, h[1]],
        }
    }

    fn t_pow(self, e: i64) -> V {
        let mut v = self.id();
        v[self.t_coord()] = e;
        v
    }

    /// Exponent of an element of ⟨t⟩.
    fn t_exp(self, x: &[i64]) -> i64 {
        debug_assert!(x.iter().enumerate().all(|(k, c)| k == self.t_coord() || *c == 0));
        x[self.t_coord()]
    }
}

struct Level {
    f: Vec<V>,
    translators: Vec<V>,
    ns: Vec<i64>,
}

fn recurse(model: Model, m: &[V]) -> Level {
    if model.dim() == 0 {
        return Level {
            f: vec![vec![]],
            translators: vec![vec![]],
            ns: vec![],
        };
    }
    let h = model.quotient();
    let pi_m: BTreeSet<V> = m.iter().map(|x| model.pi(x)).collect();
    let pi_m: Vec<V> = pi_m.into_iter().collect();
    let inner = recurse(h, &pi_m);
    let sig = |k: &[i64]| model.sigma(k);
    // M_k = M·σ(k)⁻¹ ∩ ⟨t⟩ as exponents
    let m_k: Vec<Vec<i64>> = pi_m
        .iter()
        .map(|k| {
            m.iter()
                .filter(|x| model.pi(x) == *k)
                .map(|x| model.t_exp(&model.mul(x, &model.inv(&sig(k)))))
                .collect()
        })
        .collect();
    let f0 = &inner.f;
    let mut t_set: BTreeSet<i64> = BTreeSet::new();
    let mut s_set: BTreeSet<i64> = BTreeSet::new();
    for (ki, k) in pi_m.iter().enumerate() {
        for k1 in f0 {
            for k2 in f0 {
                let kk = h.mul(&h.mul(k, &h.inv(k1)), k2);
                // σ(kk₁⁻¹k₂)⁻¹ σ(k) σ(k₁)⁻¹ σ(k₂)
                let base = model.mul(
                    &model.mul(&model.mul(&model.inv(&sig(&kk)), &sig(k)), &model.inv(&sig(k1))),
                    &sig(k2),
                );
                let e = model.t_exp(&base);
                for mk in &m_k[ki] {
                    t_set.insert(e + mk);
                }
                for hj in &inner.translators {
                    // σ(h_j⁻¹kk₁⁻¹k₂)⁻¹ σ(h_j)⁻¹ σ(kk₁⁻¹k₂)
                    let hk = h.mul(&h.inv(hj), &kk);
                    let s = model.mul(&model.mul(&model.inv(&sig(&hk)), &model.inv(&sig(hj))), &sig(&kk));
                    s_set.insert(model.t_exp(&s));
                }
            }
        }
    }
    let n = s_set
        .iter()
        .flat_map(|s| t_set.iter().map(move |t| (s + t).abs()))
        .max()
        .unwrap_or(0)
        .max(1);
    let mut f = Vec::with_capacity(f0.len() * (6 * n as usize + 1));
    for k in f0 {
        for i in -3 * n..=3 * n {
            f.push(model.mul(&sig(k), &model.t_pow(i)));
        }
    }
    let mut translators = Vec::new();
    for i in -1..=1 {
        for hj in &inner.translators {
            translators.push(model.mul(&model.t_pow(4 * n * i), &sig(hj)));
        }
    }
    let mut ns = inner.ns;
    ns.push(n);
    Level { f, translators, ns }
}

fn model_of(spec: &GroupSpec) -> Result<Model> {
    match spec.kind() {
        GroupKind::FreeAbelian(m) => Ok(Model::Abelian(*m)),
        GroupKind::Unitriangular(3) => Ok(Model::Heisenberg),
        _ => Err(Error::Unsupported("nilpotent growth is implemented for ℤ^m and U_3(ℤ)".into())),
    }
}

fn to_v(x: &Element) -> Result<V> {
    x.0.iter()
        .map(|c| c.to_i64().ok_or_else(|| Error::Invalid(format!("coordinate {c} is out of range"))))
        .collect()
}

fn to_e(v: &[i64]) -> Element {
    Element::from_i64s(v)
}

/// Runs the recursion through central quotients (last coordinate of ℤ^m,
/// the (1,3) entry of U_3 with quotient ℤ² in (a, b)), then verifies the
/// certificate over all of F⁻¹F.
pub fn nilpotent_growth(spec: &GroupSpec, m: &[Element]) -> Result<GrowthCertificate> {
    let model = model_of(spec)?;
    for x in m {
        spec.check(x)?;
    }
    let mv: Vec<V> = m.iter().map(to_v).collect::<Result<_>>()?;
    let level = recurse(model, &mv);
    let check = verify_growth_model(model, &mv, &level.f, &level.translators);
    Ok(GrowthCertificate {
        group: spec.clone(),
        m_set: m.to_vec(),
        f_set: level.f.iter().map(|v| to_e(v)).collect(),
        translators: level.translators.iter().map(|v| to_e(v)).collect(),
        hirsch: spec.hirsch_length(),
        levels: level.ns,
        check,
    })
}

/// A three-translator certificate on ℤ for an interval J = [0, w): F = [0, L)
/// with L = max(1, 3w − 4), translators −(L−1) + t(L − w + 1) for t = 0, 1, 2.
/// Much smaller than the recursion's F when M is a long interval.
pub fn interval_growth_certificate(spec: &GroupSpec, w: i64) -> Result<GrowthCertificate> {
    if !matches!(spec.kind(), GroupKind::FreeAbelian(1)) {
        return Err(Error::Unsupported("interval certificates live on ℤ".into()));
    }
    if w < 1 {
        return Err(Error::Invalid("interval width must be positive".into()));
    }
    let l = (3 * w - 4).max(1);
    let mv: Vec<V> = (0..w).map(|i| vec![i]).collect();
    let f: Vec<V> = (0..l).map(|i| vec![i]).collect();
    let translators: Vec<V> = (0..3).map(|t| vec![-(l - 1) + t * (l - w + 1)]).collect();
    let check = verify_growth_model(Model::Abelian(1), &mv, &f, &translators);
    Ok(GrowthCertificate {
        group: spec.clone(),
        m_set: mv.iter().map(|v| to_e(v)).collect(),
        f_set: f.iter().map(|v| to_e(v)).collect(),
        translators: translators.iter().map(|v| to_e(v)).collect(),
        hirsch: 1,
        levels: vec![],
        check,
    })
}

/// F split along the central coordinate: F = ⋃_k σ(k)·t^{E_k}.
struct Fibred {
    model: Model,
    fibres: HashMap<V, Vec<i64>>,
}

impl Fibred {
    fn new(model: Model, f: &[V]) -> Self {
        let mut fibres: HashMap<V, Vec<i64>> = HashMap::new();
        for x in f {
            let (k, e) = Self::split(model, x);
            fibres.entry(k).or_default().push(e);
        }
        for v in fibres.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
        Fibred { model, fibres }
    }

    fn split(model: Model, x: &[i64]) -> (V, i64) {
        let k = model.pi(x);
        let e = model.t_exp(&model.mul(&model.inv(&model.sigma(&k)), x));
        (k, e)
    }

    fn contains(&self, x: &[i64]) -> bool {
        let (k, e) = Self::split(self.model, x);
        self.fibres.get(&k).is_some_and(|v| v.binary_search(&e).is_ok())
    }
}

/// {b − a : a ∈ xs, b ∈ ys} for sorted exponent sets.
fn differences(xs: &[i64], ys: &[i64]) -> Vec<i64> {
    let contiguous = |v: &[i64]| v.windows(2).all(|w| w[1] == w[0] + 1);
    if contiguous(xs) && contiguous(ys) {
        return (ys[0] - xs[xs.len() - 1]..=ys[ys.len() - 1] - xs[0]).collect();
    }
    let set: BTreeSet<i64> = xs.iter().flat_map(|a| ys.iter().map(move |b| b - a)).collect();
    set.into_iter().collect()
}

/// Exhaustive check: every x ∈ F⁻¹F has a j with M·x ⊆ g_j·F. Since t is
/// central, F⁻¹F = ⋃ σ(k₁)⁻¹σ(k₂)·t^{E_k₂ − E_k₁}, which is enumerated exactly.
fn verify_growth_model(model: Model, m: &[V], f: &[V], translators: &[V]) -> Check {
    let fib = Fibred::new(model, f);
    let g_inv: Vec<V> = translators.iter().map(|g| model.inv(g)).collect();
    let fibres: Vec<(&V, &Vec<i64>)> = fib.fibres.iter().collect();
    let pairs: Vec<(usize, usize)> = (0..fibres.len())
        .flat_map(|a| (0..fibres.len()).map(move |b| (a, b)))
        .collect();
    let results: Vec<(usize, Option<V>)> = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (k1, e1) = fibres[a];
            let (k2, e2) = fibres[b];
            let base = model.mul(&model.inv(&model.sigma(k1)), &model.sigma(k2));
            let es = differences(e1, e2);
            let mut last = 0usize;
            for e in &es {
                let x = model.mul(&base, &model.t_pow(*e));
                let mx: Vec<V> = m.iter().map(|s| model.mul(s, &x)).collect();
                let ok = |j: usize| mx.iter().all(|y| fib.contains(&model.mul(&g_inv[j], y)));
                if ok(last) {
                    continue;
                }
                match (0..g_inv.len()).find(|&j| ok(j)) {
                    Some(j) => last = j,
                    None => return (es.len(), Some(x)),
                }
            }
            (es.len(), None)
        })
        .collect();
    let checked: usize = results.iter().map(|r| r.0).sum();
    let failure = results.into_iter().find_map(|r| r.1);
    let expected = 3usize.pow(model.dim() as u32);
    let count_ok = translators.len() == expected;
    let has_id = fib.contains(&model.id());
    let pass = failure.is_none() && count_ok && has_id;
    let mut c = Check::new("growth", pass).measured(json!({
        "F": f.len(),
        "checked": checked,
        "translators": translators.len(),
        "expected_translators": expected,
    }));
    if let Some(x) = failure {
        c = c.witness(json!({"x": to_e(&x)}));
    } else if !count_ok {
        c = c.witness(json!({"translators": translators.len(), "expected": expected}));
    } else if !has_id {
        c = c.witness(json!("F does not contain the identity"));
    }
    c
}

impl GrowthCertificate {
    /// Re-runs the exhaustive check.
    pub fn verify(&self) -> Result<Check> {
        let model = model_of(&self.group)?;
        let conv = |v: &[Element]| v.iter().map(to_v).collect::<Result<Vec<V>>>();
        let mut c = verify_growth_model(model, &conv(&self.m_set)?, &conv(&self.f_set)?, &conv(&self.translators)?);
        if self.hirsch != model.dim() && c.pass {
            c.pass = false;
            c.witness = Some(json!({"hirsch": self.hirsch, "expected": model.dim()}));
        }
        Ok(c)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "group": self.group.to_json(),
            "M": self.m_set,
            "F_size": self.f_set.len(),
            "F": self.f_set,
            "translators": self.translators,
            "hirsch": self.hirsch,
            "m": self.translators.len(),
            "levels": self.levels,
        })
    }
}
