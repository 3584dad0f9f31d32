use crate::chains::{CosetSpace, Lattice, SubgroupChain};
use crate::error::{invalid, Error, Result};
use crate::group::{word_ball, Element, GroupKind, GroupSpec};
use crate::report::Check;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

#[derive(Clone, Debug)]
pub enum ActionKind {
    /// G acting on G/G_m by left translation; point i is the coset of `cosets.rep(i)`.
    Odometer {
        chain: Option<SubgroupChain>,
        stage: Option<usize>,
        cosets: CosetSpace,
    },
    /// Generator permutations only.
    Custom,
}

/// A finite G-set given by one permutation per generator.
#[derive(Clone, Debug)]
pub struct FiniteAction {
    pub group: GroupSpec,
    pub kind: ActionKind,
    /// perms[k][x]: generator k applied to point x.
    pub perms: Vec<Vec<usize>>,
}

type Perm = Vec<usize>;

fn compose(a: &[usize], b: &[usize]) -> Perm {
    // a∘b: first b, then a
    b.iter().map(|&x| a[x]).collect()
}

fn inverse(p: &[usize]) -> Perm {
    let mut q = vec![0; p.len()];
    for (x, &y) in p.iter().enumerate() {
        q[y] = x;
    }
    q
}

fn identity(n: usize) -> Perm {
    (0..n).collect()
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &y in p {
        if y >= p.len() || seen[y] {
            return false;
        }
        seen[y] = true;
    }
    true
}

/// p^e for any integer e; the exponent is reduced modulo the permutation order.
fn perm_pow(p: &[usize], e: &BigInt) -> Perm {
    let n = p.len();
    let mut out = vec![0; n];
    let mut done = vec![false; n];
    for start in 0..n {
        if done[start] {
            continue;
        }
        let mut cycle = vec![start];
        let mut y = p[start];
        while y != start {
            cycle.push(y);
            y = p[y];
        }
        let len = BigInt::from(cycle.len());
        let shift = e.mod_floor(&len).to_usize().unwrap();
        for (i, &x) in cycle.iter().enumerate() {
            out[x] = cycle[(i + shift) % cycle.len()];
            done[x] = true;
        }
    }
    out
}

/// Build an odometer on G/G_m for stage m of a chain.
pub fn build_odometer(chain: &SubgroupChain, m: usize, cap: usize) -> Result<FiniteAction> {
    let lattice = chain.stage(m)?;
    let mut a = odometer_lattice(chain.group(), &lattice, cap)?;
    if let ActionKind::Odometer { chain: c, stage, .. } = &mut a.kind {
        *c = Some(chain.clone());
        *stage = Some(m);
    }
    Ok(a)
}

/// Odometer on G/L for a lattice subgroup not attached to a chain.
pub fn odometer_lattice(group: &GroupSpec, lattice: &Lattice, cap: usize) -> Result<FiniteAction> {
    let cosets = CosetSpace::new(group, lattice, cap)?;
    let n = cosets.index();
    let perms = (0..group.generators().len())
        .map(|k| (0..n).map(|i| cosets.step(i, k)).collect())
        .collect();
    Ok(FiniteAction {
        group: group.clone(),
        kind: ActionKind::Odometer {
            chain: None,
            stage: None,
            cosets,
        },
        perms,
    })
}

impl FiniteAction {
    pub fn custom(group: GroupSpec, perms: Vec<Vec<usize>>) -> Result<Self> {
        if perms.len() != group.generators().len() {
            return invalid(format!(
                "{} permutations given for {} generators",
                perms.len(),
                group.generators().len()
            ));
        }
        let n = perms.first().map_or(0, Vec::len);
        if n == 0 {
            return invalid("the space is empty");
        }
        for (k, p) in perms.iter().enumerate() {
            if p.len() != n || !is_permutation(p) {
                return invalid(format!("perms[{k}] is not a permutation of {n} points"));
            }
        }
        word_plan(&group)?;
        Ok(FiniteAction {
            group,
            kind: ActionKind::Custom,
            perms,
        })
    }

    pub fn size(&self) -> usize {
        self.perms[0].len()
    }

    pub fn cosets(&self) -> Option<&CosetSpace> {
        match &self.kind {
            ActionKind::Odometer { cosets, .. } => Some(cosets),
            ActionKind::Custom => None,
        }
    }

    /// The subgroup G_m of an odometer.
    pub fn lattice(&self) -> Option<&Lattice> {
        self.cosets().map(CosetSpace::lattice)
    }

    /// α_g as a permutation of the points.
    pub fn perm_of(&self, g: &Element) -> Result<Perm> {
        self.group.check(g)?;
        if let Some(cs) = self.cosets() {
            return Ok((0..self.size()).map(|i| cs.act(g, i)).collect());
        }
        let mut p = identity(self.size());
        for (q, e) in self.word(g)? {
            p = compose(&p, &perm_pow(&q, &e));
        }
        Ok(p)
    }

    pub fn act(&self, g: &Element, x: usize) -> Result<usize> {
        if let Some(cs) = self.cosets() {
            self.group.check(g)?;
            return Ok(cs.act(g, x));
        }
        Ok(self.perm_of(g)?[x])
    }

    /// g as a product of powers of permutations (applied right to left).
    fn word(&self, g: &Element) -> Result<Vec<(Perm, BigInt)>> {
        let plan = word_plan(&self.group)?;
        let gen = |i: usize| self.perms[plan.positive[i]].clone();
        match plan.shape {
            Shape::Abelian => Ok((0..self.group.dim()).map(|i| (gen(i), g.0[i].clone())).collect()),
            Shape::Heisenberg => {
                // (a,c,b) = z^(c−ab)·x^a·y^b with z = x y x⁻¹ y⁻¹ central
                let (x, y) = (gen(0), gen(1));
                let z = compose(&compose(&compose(&x, &y), &inverse(&x)), &inverse(&y));
                let (a, c, b) = (&g.0[0], &g.0[1], &g.0[2]);
                Ok(vec![(z, c - a * b), (x, a.clone()), (y, b.clone())])
            }
        }
    }

    /// Checks that the generator permutations satisfy the defining relations:
    /// pairwise commutation for ℤ^m, [x,[x,y]] = [y,[x,y]] = 1 for U_3, and
    /// for other odometer groups agreement of s∘t with the action of s·t.
    pub fn relation_audit(&self) -> Check {
        let n = self.size();
        let id = identity(n);
        let comm = |a: &Perm, b: &Perm| compose(&compose(&compose(a, b), &inverse(a)), &inverse(b));
        let mut failure: Option<Value> = None;
        let mut relators = 0usize;
        match word_plan(&self.group) {
            Ok(plan) => {
                let gens: Vec<Perm> = plan.positive.iter().map(|&k| self.perms[k].clone()).collect();
                let mut rels: Vec<(String, Perm)> = Vec::new();
                match plan.shape {
                    Shape::Abelian => {
                        for i in 0..gens.len() {
                            for j in i + 1..gens.len() {
                                rels.push((format!("[e{i},e{j}]"), comm(&gens[i], &gens[j])));
                            }
                        }
                    }
                    Shape::Heisenberg => {
                        let z = comm(&gens[0], &gens[1]);
                        rels.push(("[x,[x,y]]".into(), comm(&gens[0], &z)));
                        rels.push(("[y,[x,y]]".into(), comm(&gens[1], &z)));
                    }
                }
                for (k, &pk) in plan.positive.iter().enumerate() {
                    let inv = plan.negative[k];
                    rels.push((format!("s{pk}·s{inv}"), compose(&self.perms[pk], &self.perms[inv])));
                }
                relators = rels.len();
                if let Some((name, p)) = rels.into_iter().find(|(_, p)| *p != id) {
                    let x = (0..n).find(|&x| p[x] != x).unwrap();
                    failure = Some(json!({"relator": name, "point": x, "image": p[x]}));
                }
            }
            Err(_) => {
                let gens = self.group.generators();
                'outer: for (i, s) in gens.iter().enumerate() {
                    for (j, t) in gens.iter().enumerate() {
                        relators += 1;
                        let st = self.perm_of(&self.group.multiply(s, t)).expect("group element");
                        let lhs = compose(&self.perms[i], &self.perms[j]);
                        if lhs != st {
                            let x = (0..n).find(|&x| lhs[x] != st[x]).unwrap();
                            failure = Some(json!({"relator": format!("s{i}∘s{j} = α(s{i}·s{j})"), "point": x}));
                            break 'outer;
                        }
                    }
                }
            }
        }
        let c = Check::new("relations", failure.is_none()).measured(json!({"relators": relators}));
        match failure {
            Some(w) => c.witness(w),
            None => c,
        }
    }

    /// No g ∈ B_ρ(1) \ {1} fixes a point.
    pub fn freeness_audit(&self, rho: u32, cap: usize) -> Result<Check> {
        let ball = word_ball(&self.group, &self.group.identity(), rho, cap)?;
        let mut checked = 0usize;
        for g in ball.points() {
            if g.is_identity() {
                continue;
            }
            checked += 1;
            let p = self.perm_of(g)?;
            if let Some(x) = (0..self.size()).find(|&x| p[x] == x) {
                return Ok(Check::new("freeness", false)
                    .measured(json!({"rho": rho}))
                    .witness(json!({"element": g, "fixed_point": x})));
            }
        }
        Ok(Check::new("freeness", true).measured(json!({"rho": rho, "elements": checked})))
    }

    /// Transports the action along a bijection of the points (point x becomes σ(x)).
    pub fn relabel(&self, sigma: &[usize]) -> Result<FiniteAction> {
        if sigma.len() != self.size() || !is_permutation(sigma) {
            return invalid("relabelling is not a bijection of the points");
        }
        let inv = inverse(sigma);
        let perms = self
            .perms
            .iter()
            .map(|p| (0..self.size()).map(|y| sigma[p[inv[y]]]).collect())
            .collect();
        FiniteAction::custom(self.group.clone(), perms)
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "group": self.group.to_json(),
            "size": self.size(),
            "perms": self.perms,
        });
        if let ActionKind::Odometer { chain, stage, cosets } = &self.kind {
            v["kind"] = json!("odometer");
            v["lattice"] = json!(cosets.lattice());
            v["points"] = json!(cosets.reps());
            if let Some(c) = chain {
                v["chain"] = json!(c);
            }
            if let Some(m) = stage {
                v["stage"] = json!(m);
            }
        } else {
            v["kind"] = json!("custom");
        }
        v
    }

    /// Reads the custom form `{group, perms}` or an odometer `{group, lattice}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let group = GroupSpec::from_json(v.get("group").ok_or_else(|| Error::Invalid("missing field `group`".into()))?)?;
        if let Some(chain) = v.get("chain") {
            let chain: SubgroupChain = serde_json::from_value(chain.clone())
                .map_err(|e| Error::Invalid(format!("field `chain`: {e}")))?;
            let m = v
                .get("stage")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Invalid("field `stage`: expected a stage number".into()))?;
            return build_odometer(&chain, m as usize, crate::chains::DEFAULT_INDEX_CAP);
        }
        if let Some(l) = v.get("lattice") {
            let lattice: Lattice =
                serde_json::from_value(l.clone()).map_err(|e| Error::Invalid(format!("field `lattice`: {e}")))?;
            let lattice = Lattice::new(&group, lattice.divisors().to_vec())?;
            return odometer_lattice(&group, &lattice, crate::chains::DEFAULT_INDEX_CAP);
        }
        let perms: Vec<Vec<usize>> = serde_json::from_value(
            v.get("perms")
                .cloned()
                .ok_or_else(|| Error::Invalid("missing field `perms`".into()))?,
        )
        .map_err(|e| Error::Invalid(format!("field `perms`: {e}")))?;
        FiniteAction::custom(group, perms)
    }
}

#[derive(Clone, Copy)]
enum Shape {
    Abelian,
    Heisenberg,
}

struct WordPlan {
    shape: Shape,
    /// Generator index of the positive coordinate generator, per coordinate
    /// (for U_3: x then y).
    positive: Vec<usize>,
    negative: Vec<usize>,
}

/// Custom actions are evaluated through coordinate words, available for ℤ^m
/// and U_3(ℤ) with their standard generators.
fn word_plan(group: &GroupSpec) -> Result<WordPlan> {
    let find = |coord: usize, sign: i64| -> Option<usize> {
        group.generators().iter().position(|s| {
            s.0.iter()
                .enumerate()
                .all(|(k, c)| if k == coord { *c == BigInt::from(sign) } else { c.is_zero() })
        })
    };
    let (shape, coords) = match group.kind() {
        GroupKind::FreeAbelian(m) => (Shape::Abelian, (0..*m).collect::<Vec<_>>()),
        GroupKind::Unitriangular(3) => (Shape::Heisenberg, vec![0, 2]),
        _ => {
            return Err(Error::Unsupported(
                "custom actions need ℤ^m or U_3(ℤ) with standard generators".into(),
            ))
        }
    };
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    for &c in &coords {
        match (find(c, 1), find(c, -1)) {
            (Some(p), Some(n)) => {
                positive.push(p);
                negative.push(n);
            }
            _ => {
                return Err(Error::Unsupported(
                    "custom actions need the standard generating set".into(),
                ))
            }
        }
    }
    if group.generators().len() != 2 * coords.len() {
        return Err(Error::Unsupported("custom actions need the standard generating set".into()));
    }
    Ok(WordPlan { shape, positive, negative })
}

/// For reports: the points of an odometer as coset representatives.
pub fn point_label(a: &FiniteAction, x: usize) -> Value {
    match a.cosets() {
        Some(cs) => json!(cs.rep(x)),
        None => json!(x),
    }
}
