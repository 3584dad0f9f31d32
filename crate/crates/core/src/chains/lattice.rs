use crate::error::{invalid, Result};
use crate::group::{pow, Element, GroupSpec};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// The subgroup {x : D_k divides x_k for every coordinate k}.
///
/// This is a subgroup exactly when D_k divides D_p·D_q for every product term
/// (p, q) of coordinate k; the index is the product of the D_k.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    #[serde(with = "divisors_serde")]
    divisors: Vec<BigInt>,
}

mod divisors_serde {
    use crate::json::{ints, unints, Int};
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        ints(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Int>::deserialize(d).map(unints)
    }
}

impl Lattice {
    pub fn new(spec: &GroupSpec, divisors: Vec<BigInt>) -> Result<Self> {
        if divisors.len() != spec.dim() {
            return invalid(format!(
                "divisor vector has {} entries, group has {} coordinates",
                divisors.len(),
                spec.dim()
            ));
        }
        if let Some(d) = divisors.iter().find(|d| !d.is_positive()) {
            return invalid(format!("divisors must be positive, got {d}"));
        }
        for k in 0..spec.dim() {
            for (p, q) in spec.product_terms(k) {
                if !(&divisors[p] * &divisors[q]).is_multiple_of(&divisors[k]) {
                    return invalid(format!(
                        "divisors {:?} do not define a subgroup: coordinate {k} needs D{k} | D{p}·D{q}",
                        divisors.iter().map(|d| d.to_string()).collect::<Vec<_>>()
                    ));
                }
            }
        }
        Ok(Lattice { divisors })
    }

    pub fn from_i64s(spec: &GroupSpec, d: &[i64]) -> Result<Self> {
        Self::new(spec, d.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// Image of α_r: D_k = r^(level of k).
    pub fn scaled(spec: &GroupSpec, r: &BigInt) -> Result<Self> {
        Self::new(spec, spec.levels().iter().map(|&l| pow(r, l)).collect())
    }

    /// Every coordinate divisible by `n`.
    pub fn uniform(spec: &GroupSpec, n: &BigInt) -> Result<Self> {
        Self::new(spec, vec![n.clone(); spec.dim()])
    }

    pub fn divisors(&self) -> &[BigInt] {
        &self.divisors
    }

    pub fn contains(&self, x: &Element) -> bool {
        x.0.iter()
            .zip(&self.divisors)
            .all(|(c, d)| c.is_multiple_of(d))
    }

    pub fn index(&self) -> BigInt {
        self.divisors.iter().product()
    }

    /// `self ⊆ other` (as subgroups).
    pub fn is_subgroup_of(&self, other: &Lattice) -> bool {
        self.divisors
            .iter()
            .zip(&other.divisors)
            .all(|(mine, theirs)| mine.is_multiple_of(theirs))
    }

    /// Generators E_k^{D_k} of the subgroup.
    pub fn generators(&self, spec: &GroupSpec) -> Vec<Element> {
        (0..spec.dim())
            .map(|k| {
                let mut e = spec.identity();
                e.0[k] = self.divisors[k].clone();
                e
            })
            .collect()
    }

    /// Normal iff conjugating its generators by the group generators stays inside.
    pub fn is_normal(&self, spec: &GroupSpec) -> bool {
        let gens = self.generators(spec);
        spec.generators().iter().all(|s| {
            let si = spec.invert(s);
            gens.iter()
                .all(|e| self.contains(&spec.multiply(&spec.multiply(s, e), &si)))
        })
    }

    /// Canonical representative of the left coset x·H: every coordinate in [0, D_k).
    pub fn canonical(&self, spec: &GroupSpec, x: &Element) -> Element {
        let zero = vec![BigInt::zero(); spec.dim()];
        let hi: Vec<BigInt> = self.divisors.iter().map(|d| d - 1).collect();
        self.coset_points_in_box(spec, x, &zero, &hi)
            .pop()
            .expect("a box of side D meets every coset once")
    }

    /// All elements of x·H whose coordinates lie in [lo_k, hi_k].
    pub fn coset_points_in_box(
        &self,
        spec: &GroupSpec,
        x: &Element,
        lo: &[BigInt],
        hi: &[BigInt],
    ) -> Vec<Element> {
        let order = spec.coords_by_level();
        let terms: Vec<Vec<(usize, usize)>> = (0..spec.dim()).map(|k| spec.product_terms(k)).collect();
        let mut h = vec![BigInt::zero(); spec.dim()];
        let mut out_coords = vec![BigInt::zero(); spec.dim()];
        let mut out = Vec::new();
        self.box_dfs(x, lo, hi, &order, &terms, 0, &mut h, &mut out_coords, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn box_dfs(
        &self,
        x: &Element,
        lo: &[BigInt],
        hi: &[BigInt],
        order: &[usize],
        terms: &[Vec<(usize, usize)>],
        pos: usize,
        h: &mut Vec<BigInt>,
        cur: &mut Vec<BigInt>,
        out: &mut Vec<Element>,
    ) {
        if pos == order.len() {
            out.push(Element(cur.clone()));
            return;
        }
        let k = order[pos];
        let mut t = x.0[k].clone();
        for &(p, q) in &terms[k] {
            if !h[q].is_zero() {
                t += &x.0[p] * &h[q];
            }
        }
        let d = &self.divisors[k];
        // smallest v ≥ lo with v ≡ t (mod d)
        let mut v = &lo[k] + (&t - &lo[k]).mod_floor(d);
        while v <= hi[k] {
            h[k] = &v - &t;
            cur[k] = v.clone();
            self.box_dfs(x, lo, hi, order, terms, pos + 1, h, cur, out);
            v += d;
        }
        h[k] = BigInt::zero();
    }

    /// The whole group as a lattice.
    pub fn whole(spec: &GroupSpec) -> Self {
        Lattice {
            divisors: vec![BigInt::one(); spec.dim()],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: &[i64]) -> Element {
        Element::from_i64s(v)
    }

    #[test]
    fn alpha2_image_in_u3() {
        let g = GroupSpec::unitriangular(3).unwrap();
        let l = Lattice::scaled(&g, &BigInt::from(2)).unwrap();
        assert_eq!(l.divisors(), &[2.into(), 4.into(), 2.into()]);
        assert_eq!(l.index(), BigInt::from(16));
        assert!(!l.is_normal(&g));
        assert!(Lattice::uniform(&g, &BigInt::from(6)).unwrap().is_normal(&g));
    }

    #[test]
    fn invalid_divisors_rejected() {
        let g = GroupSpec::unitriangular(3).unwrap();
        // D13 = 4 does not divide D12·D23 = 1
        assert!(Lattice::from_i64s(&g, &[1, 4, 1]).is_err());
        assert!(Lattice::from_i64s(&g, &[1, 0, 1]).is_err());
    }

    #[test]
    fn canonical_form_is_a_coset_invariant() {
        let g = GroupSpec::unitriangular(3).unwrap();
        let l = Lattice::scaled(&g, &BigInt::from(3)).unwrap();
        let x = e(&[5, -7, 11]);
        let c = l.canonical(&g, &x);
        assert_eq!(l.canonical(&g, &c), c);
        assert!(l.contains(&g.multiply(&g.invert(&x), &c)));
        let h = e(&[3, -18, 6]);
        assert_eq!(l.canonical(&g, &g.multiply(&x, &h)), c);
    }

    #[test]
    fn box_enumeration_counts() {
        let g = GroupSpec::unitriangular(3).unwrap();
        let l = Lattice::scaled(&g, &BigInt::from(2)).unwrap();
        let lo: Vec<BigInt> = vec![0.into(), 0.into(), 0.into()];
        let hi: Vec<BigInt> = vec![3.into(), 3.into(), 1.into()];
        // box of 4·4·2 points meets each of the 16 cosets twice
        let pts = l.coset_points_in_box(&g, &e(&[1, 1, 1]), &lo, &hi);
        assert_eq!(pts.len(), 2);
        let x = e(&[1, 1, 1]);
        for p in pts {
            assert!(l.contains(&g.multiply(&g.invert(&x), &p)));
        }
    }
}
