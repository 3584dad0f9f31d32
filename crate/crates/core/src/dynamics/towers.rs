use super::action::{point_label, FiniteAction};
use crate::chains::{CosetSpace, Lattice, DEFAULT_INDEX_CAP};
use crate::error::{Error, Result};
use crate::group::Element;
use crate::json::frac_value;
use crate::report::{all_pass, Check};
use crate::scalar::Scalar;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

/// Rokhlin towers f^(l)_ḡ on a finite G-set, ḡ ranging over G/G_n.
#[derive(Clone, Debug)]
pub struct TowerSystem<S: Scalar> {
    pub action: FiniteAction,
    pub stage_n: Option<usize>,
    /// G/G_n; tower index ḡ is the coset `quotient.rep(ḡ)`.
    pub quotient: CosetSpace,
    /// functions[l][ḡ][x]
    pub functions: Vec<Vec<Vec<S>>>,
    pub eps: S,
}

/// Indicator towers on an odometer G/G_m: f_ḡ is the indicator of the fibre
/// of G/G_m → G/G_n over ḡ.
pub fn build_towers<S: Scalar>(action: &FiniteAction, n: usize) -> Result<TowerSystem<S>> {
    let chain = match &action.kind {
        super::ActionKind::Odometer { chain: Some(c), .. } => c,
        _ => return Err(Error::Precondition("build_towers needs an odometer attached to a chain".into())),
    };
    let lattice = chain.stage(n)?;
    let mut ts = build_towers_lattice(action, &lattice)?;
    ts.stage_n = Some(n);
    Ok(ts)
}

/// Indicator towers over an arbitrary lattice G_n ⊇ G_m.
pub fn build_towers_lattice<S: Scalar>(action: &FiniteAction, lattice_n: &Lattice) -> Result<TowerSystem<S>> {
    let cs = action
        .cosets()
        .ok_or_else(|| Error::Precondition("towers are built on odometer actions".into()))?;
    if !cs.lattice().is_subgroup_of(lattice_n) {
        return Err(Error::Precondition(format!(
            "stage ordering violated: G_m {:?} is not contained in G_n {:?}",
            cs.lattice().divisors(),
            lattice_n.divisors()
        )));
    }
    let quotient = CosetSpace::new(&action.group, lattice_n, DEFAULT_INDEX_CAP)?;
    let fibre: Vec<usize> = (0..action.size()).map(|x| quotient.locate(cs.rep(x))).collect();
    let functions = vec![(0..quotient.index())
        .map(|g| fibre.iter().map(|&b| if b == g { S::one() } else { S::zero() }).collect())
        .collect()];
    Ok(TowerSystem {
        action: action.clone(),
        stage_n: None,
        quotient,
        functions,
        eps: S::zero(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerReport {
    /// Largest defect over the four conditions.
    pub eps: Value,
    pub checks: Vec<Check>,
}

impl TowerReport {
    pub fn pass(&self) -> bool {
        all_pass(&self.checks)
    }
}

impl<S: Scalar> TowerSystem<S> {
    pub fn r(&self) -> usize {
        self.functions.len() - 1
    }

    /// A copy with f^(l)_ḡ(x) replaced.
    pub fn perturbed(&self, l: usize, g: usize, x: usize, value: S) -> Self {
        let mut t = self.clone();
        t.functions[l][g][x] = value;
        t
    }

    /// Transports towers and action along the bijection x ↦ σ(x).
    pub fn relabel(&self, sigma: &[usize]) -> Result<Self> {
        let action = self.action.relabel(sigma)?;
        let functions = self
            .functions
            .iter()
            .map(|fl| {
                fl.iter()
                    .map(|f| {
                        let mut out = vec![S::zero(); f.len()];
                        for (x, v) in f.iter().enumerate() {
                            out[sigma[x]] = v.clone();
                        }
                        out
                    })
                    .collect()
            })
            .collect();
        Ok(TowerSystem {
            action,
            stage_n: self.stage_n,
            quotient: self.quotient.clone(),
            functions,
            eps: self.eps.clone(),
        })
    }

    pub fn to_json(&self) -> Value {
        let fns: Vec<Value> = self
            .functions
            .iter()
            .enumerate()
            .flat_map(|(l, fl)| {
                fl.iter().enumerate().map(move |(g, f)| {
                    json!({
                        "color": l,
                        "coset": self.quotient.rep(g),
                        "values": f.iter().map(|v| frac_value(&v.to_rational())).collect::<Vec<_>>(),
                    })
                })
            })
            .collect();
        json!({
            "action": self.action.to_json(),
            "subgroup": self.quotient.lattice(),
            "stage_n": self.stage_n,
            "r": self.r(),
            "eps": frac_value(&self.eps.to_rational()),
            "functions": fns,
        })
    }
}

/// Largest defect of one condition with the point where it occurs.
struct Defect<S> {
    value: S,
    at: Option<Value>,
}

impl<S: Scalar> Defect<S> {
    fn new() -> Self {
        Defect { value: S::zero(), at: None }
    }

    fn offer(&mut self, v: S, at: impl FnOnce() -> Value) {
        if v > self.value {
            self.value = v;
            self.at = Some(at());
        }
    }

    fn merge(mut self, other: Self) -> Self {
        if other.value > self.value {
            self.value = other.value;
            self.at = other.at;
        }
        self
    }

    fn check(self, name: &str, eps: &S) -> (Check, S) {
        let pass = self.value.approx_le(eps);
        let mut c = Check::new(name, pass).measured(frac_value(&self.value.to_rational()));
        if let (false, Some(w)) = (pass, self.at) {
            c = c.witness(w);
        }
        (c, self.value)
    }
}

/// Exact sup-norm defects of the tower conditions (3a)–(3d) against the
/// test functions `tests` (the constant 1 when empty) and the shifts `m`.
/// Each check passes when its defect is at most `ts.eps`.
pub fn verify_towers<S: Scalar>(ts: &TowerSystem<S>, tests: &[Vec<S>], m: &[Element]) -> Result<TowerReport> {
    let a = &ts.action;
    let n = a.size();
    let ones = vec![vec![S::one(); n]];
    let tests = if tests.is_empty() { &ones[..] } else { tests };
    if let Some(t) = tests.iter().find(|t| t.len() != n) {
        return Err(Error::Invalid(format!("test function has {} values for {n} points", t.len())));
    }
    let q = &ts.quotient;
    let label = |x: usize| point_label(a, x);

    // (3a) |Σ f(x) − 1|·|a(x)|
    let sums: Vec<S> = (0..n)
        .map(|x| {
            ts.functions
                .iter()
                .flat_map(|fl| fl.iter().map(move |f| f[x].clone()))
                .fold(S::zero(), |s, v| s + v)
        })
        .collect();
    let mut d_a = Defect::new();
    for (i, t) in tests.iter().enumerate() {
        for x in 0..n {
            d_a.offer(((sums[x].clone() - S::one()) * t[x].clone()).abs(), || {
                json!({"point": label(x), "index": x, "test": i, "sum": frac_value(&sums[x].to_rational())})
            });
        }
    }

    // (3b) max over ḡ ≠ h̄ of |f_ḡ f_h̄ a|: the product of the two largest values
    let mut d_b = Defect::new();
    for (l, fl) in ts.functions.iter().enumerate() {
        for x in 0..n {
            let mut top: Vec<(S, usize)> = fl.iter().enumerate().map(|(g, f)| (f[x].clone(), g)).collect();
            top.sort_by(|p, q| q.0.partial_cmp(&p.0).unwrap_or(std::cmp::Ordering::Equal));
            if top.len() < 2 {
                continue;
            }
            let prod = top[0].0.clone() * top[1].0.clone();
            for (i, t) in tests.iter().enumerate() {
                d_b.offer((prod.clone() * t[x].clone()).abs(), || {
                    json!({"point": label(x), "index": x, "color": l, "cosets": [q.rep(top[0].1), q.rep(top[1].1)], "test": i})
                });
            }
        }
    }

    // (3c) |f_h̄(α_{g⁻¹}x) − f_{gh̄}(x)|·|a(x)|
    let mut d_c = Defect::new();
    for g in m {
        let back = a.perm_of(&a.group.invert(g))?;
        let per: Vec<Defect<S>> = (0..q.index())
            .into_par_iter()
            .map(|h| {
                let gh = q.act(g, h);
                let mut d = Defect::new();
                for (l, fl) in ts.functions.iter().enumerate() {
                    for x in 0..n {
                        let diff = (fl[h][back[x]].clone() - fl[gh][x].clone()).abs();
                        if diff.is_zero() {
                            continue;
                        }
                        for (i, t) in tests.iter().enumerate() {
                            d.offer((diff.clone() * t[x].clone()).abs(), || {
                                json!({"point": label(x), "index": x, "color": l, "g": g, "coset": q.rep(h), "test": i})
                            });
                        }
                    }
                }
                d
            })
            .collect();
        d_c = per.into_iter().fold(d_c, Defect::merge);
    }

    // (3d) commutators vanish: functions on a finite set commute
    let d_d: Defect<S> = Defect::new();

    let mut checks = Vec::new();
    let mut eps = S::zero();
    for (name, d) in [("3a-sum", d_a), ("3b-orthogonality", d_b), ("3c-equivariance", d_c), ("3d-commutator", d_d)] {
        let (c, v) = d.check(name, &ts.eps);
        eps = S::max_of(eps, v);
        checks.push(c);
    }
    Ok(TowerReport {
        eps: frac_value(&eps.to_rational()),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::SubgroupChain;
    use crate::dynamics::build_odometer;
    use crate::group::GroupSpec;
    use crate::report::find;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        crate::scalar::ratio(n, d)
    }

    fn z_towers(n: usize, m: usize) -> TowerSystem<Q> {
        let chain = SubgroupChain::preset("z", "factorial", 1, 3).unwrap();
        let a = build_odometer(&chain, m, 1000).unwrap();
        build_towers(&a, n).unwrap()
    }

    fn gens(g: &GroupSpec) -> Vec<Element> {
        g.generators().to_vec()
    }

    #[test]
    fn parity_towers() {
        let ts = z_towers(2, 3);
        assert_eq!(ts.quotient.index(), 2);
        let cs = ts.action.cosets().unwrap();
        for (g, f) in ts.functions[0].iter().enumerate() {
            let parity = i64::try_from(&ts.quotient.rep(g).0[0]).unwrap();
            for x in 0..6 {
                let rep = i64::try_from(&cs.rep(x).0[0]).unwrap();
                let expect = if rep.rem_euclid(2) == parity { 1 } else { 0 };
                assert_eq!(f[x], q(expect, 1));
            }
        }
        // shift by one swaps the two towers
        let one = Element::from_i64s(&[1]);
        assert_eq!(ts.quotient.act(&one, 0), 1);
        let rep = verify_towers(&ts, &[], &gens(&ts.action.group)).unwrap();
        assert!(rep.pass());
        assert_eq!(rep.eps, frac_value(&q(0, 1)));
    }

    #[test]
    fn point_towers_when_n_equals_m() {
        let ts = z_towers(3, 3);
        assert_eq!(ts.functions[0].len(), 6);
        for f in &ts.functions[0] {
            assert_eq!(f.iter().filter(|v| **v == q(1, 1)).count(), 1);
        }
        assert!(verify_towers(&ts, &[], &gens(&ts.action.group)).unwrap().pass());
    }

    #[test]
    fn stage_order_is_enforced() {
        let chain = SubgroupChain::preset("z", "factorial", 1, 3).unwrap();
        let a = build_odometer(&chain, 2, 1000).unwrap();
        assert!(matches!(build_towers::<Q>(&a, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn heisenberg_fibres_over_abelianization() {
        let g = GroupSpec::preset("u3").unwrap();
        let stages: Vec<Vec<num_bigint::BigInt>> = [[1, 1, 1], [2, 1, 2], [2, 4, 2]]
            .iter()
            .map(|d| d.iter().map(|&x| x.into()).collect())
            .collect();
        let chain = SubgroupChain::custom(g.clone(), stages).unwrap();
        let a = build_odometer(&chain, 2, 1000).unwrap();
        assert_eq!(a.size(), 16);
        let ts: TowerSystem<Q> = build_towers(&a, 1).unwrap();
        assert_eq!(ts.quotient.index(), 4);
        for f in &ts.functions[0] {
            assert_eq!(f.iter().filter(|v| **v == q(1, 1)).count(), 4);
        }
        let m = vec![
            Element::from_i64s(&[1, 0, 0]),
            Element::from_i64s(&[0, 0, 1]),
            Element::from_i64s(&[0, 1, 0]),
            Element::from_i64s(&[3, -2, 5]),
        ];
        let rep = verify_towers(&ts, &[], &m).unwrap();
        assert!(rep.pass(), "{:?}", rep.checks);
    }

    #[test]
    fn perturbation_reports_half() {
        let ts = z_towers(2, 3).perturbed(0, 0, 0, q(1, 2));
        let rep = verify_towers(&ts, &[], &gens(&ts.action.group)).unwrap();
        assert!(!rep.pass());
        let c = find(&rep.checks, "3a-sum").unwrap();
        assert!(!c.pass);
        assert_eq!(c.measured_value, Some(frac_value(&q(1, 2))));
        assert_eq!(c.witness.as_ref().unwrap()["index"], json!(0));
        assert!(find(&rep.checks, "3d-commutator").unwrap().pass);
    }

    #[test]
    fn relabelling_keeps_defects() {
        let ts = z_towers(2, 3).perturbed(0, 1, 3, q(1, 3));
        let m = gens(&ts.action.group);
        let before = verify_towers(&ts, &[], &m).unwrap();
        let moved = ts.relabel(&[4, 0, 5, 1, 3, 2]).unwrap();
        let after = verify_towers(&moved, &[], &m).unwrap();
        assert_eq!(before.eps, after.eps);
        for (b, a) in before.checks.iter().zip(&after.checks) {
            assert_eq!(b.measured_value, a.measured_value);
        }
    }

    #[test]
    fn test_functions_scale_defects() {
        let ts = z_towers(2, 3).perturbed(0, 0, 0, q(1, 2));
        let mut a = vec![q(1, 1); 6];
        a[0] = q(1, 4);
        let rep = verify_towers(&ts, &[a], &[]).unwrap();
        assert_eq!(find(&rep.checks, "3a-sum").unwrap().measured_value, Some(frac_value(&q(1, 8))));
    }

    #[test]
    fn float_towers_agree() {
        let chain = SubgroupChain::preset("z", "factorial", 1, 3).unwrap();
        let a = build_odometer(&chain, 3, 1000).unwrap();
        let ts: TowerSystem<f64> = build_towers(&a, 1).unwrap();
        assert!(verify_towers(&ts, &[], &gens(&a.group)).unwrap().pass());
    }
}
