use super::action::FiniteAction;
use crate::error::{Error, Result};
use crate::group::Element;
use crate::report::{all_pass, Check};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::collections::HashSet;

/// A marker set Z ⊆ X for F and translators g_0 = 1, g_1, …, g_d.
#[derive(Clone, Debug)]
pub struct MarkerSet {
    pub f_set: Vec<Element>,
    pub translators: Vec<Element>,
    pub z: Vec<usize>,
    /// Points not covered by ⋃_l ⋃_{g∈F⁻¹F} α_{g_l g}(Z), empty on success.
    pub residue: Vec<usize>,
    pub checks: Vec<Check>,
}

impl MarkerSet {
    pub fn pass(&self) -> bool {
        all_pass(&self.checks)
    }
}

fn f_inv_f(a: &FiniteAction, f: &[Element]) -> Vec<Element> {
    let g = &a.group;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for x in f {
        let xi = g.invert(x);
        for y in f {
            let p = g.multiply(&xi, y);
            if seen.insert(p.clone()) {
                out.push(p);
            }
        }
    }
    out
}

/// Greedy marker search. Points are visited in natural order (seed 0) or in
/// a ChaCha-shuffled order; a point joins Z when its F-translates avoid
/// those of Z. The result is verified exhaustively.
pub fn marker_search(action: &FiniteAction, f: &[Element], translators: &[Element], seed: u64) -> Result<MarkerSet> {
    let g = &action.group;
    if f.is_empty() {
        return Err(Error::Invalid("F is empty".into()));
    }
    for x in f.iter().chain(translators) {
        g.check(x)?;
    }
    let translators: Vec<Element> = if translators.is_empty() {
        vec![g.identity()]
    } else {
        translators.to_vec()
    };
    if !translators[0].is_identity() {
        return Err(Error::Precondition("the first translator g_0 must be the identity".into()));
    }
    let ff = f_inv_f(action, f);
    let shifted: Vec<HashSet<Element>> = translators
        .iter()
        .map(|t| ff.iter().map(|x| g.multiply(t, x)).collect())
        .collect();
    for i in 0..shifted.len() {
        for j in i + 1..shifted.len() {
            if let Some(x) = shifted[i].intersection(&shifted[j]).next() {
                return Err(Error::Precondition(format!(
                    "g_{i}F⁻¹F and g_{j}F⁻¹F share the element {x}"
                )));
            }
        }
    }

    let n = action.size();
    let f_perms: Vec<Vec<usize>> = f.iter().map(|x| action.perm_of(x)).collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..n).collect();
    if seed != 0 {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut taken = vec![false; n];
    let mut z = Vec::new();
    for &x in &order {
        let images: Vec<usize> = f_perms.iter().map(|p| p[x]).collect();
        let distinct = images.iter().collect::<HashSet<_>>().len() == images.len();
        if distinct && images.iter().all(|&y| !taken[y]) {
            for &y in &images {
                taken[y] = true;
            }
            z.push(x);
        }
    }
    z.sort_unstable();
    verify_marker(action, f, &translators, &z)
}

/// Exact set checks for a candidate Z: the α_f(Z), f ∈ F, are pairwise
/// disjoint, and the translates α_{g_l g}(Z), g ∈ F⁻¹F, cover X.
pub fn verify_marker(action: &FiniteAction, f: &[Element], translators: &[Element], z: &[usize]) -> Result<MarkerSet> {
    let g = &action.group;
    let n = action.size();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut clash = None;
    for (i, fe) in f.iter().enumerate() {
        let p = action.perm_of(fe)?;
        let mut image = HashSet::new();
        for &x in z {
            let y = p[x];
            image.insert(y);
            match owner[y] {
                Some(j) if j != i && clash.is_none() => {
                    clash = Some(json!({"point": y, "f": [f[j].clone(), fe.clone()]}));
                }
                _ => owner[y] = Some(i),
            }
        }
        if image.len() != z.len() && clash.is_none() {
            clash = Some(json!({"f": fe, "reason": "α_f is not injective on Z"}));
        }
    }
    let mut covered = vec![false; n];
    let ff = f_inv_f(action, f);
    for t in translators {
        for x in &ff {
            let p = action.perm_of(&g.multiply(t, x))?;
            for &zz in z {
                covered[p[zz]] = true;
            }
        }
    }
    let residue: Vec<usize> = (0..n).filter(|&x| !covered[x]).collect();
    let mut c1 = Check::new("marker-disjointness", clash.is_none()).measured(json!({"F": f.len(), "Z": z.len()}));
    if let Some(w) = clash {
        c1 = c1.witness(w);
    }
    let mut c2 = Check::new("marker-coverage", residue.is_empty()).measured(json!({"uncovered": residue.len()}));
    if !residue.is_empty() {
        c2 = c2.witness(json!({"residue": residue}));
    }
    Ok(MarkerSet {
        f_set: f.to_vec(),
        translators: translators.to_vec(),
        z: z.to_vec(),
        residue,
        checks: vec![c1, c2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::Lattice;
    use crate::dynamics::odometer_lattice;
    use crate::group::GroupSpec;

    fn cyclic(n: i64) -> FiniteAction {
        let g = GroupSpec::free_abelian(1).unwrap();
        odometer_lattice(&g, &Lattice::from_i64s(&g, &[n]).unwrap(), 1000).unwrap()
    }

    fn ints(r: std::ops::RangeInclusive<i64>) -> Vec<Element> {
        r.map(|i| Element::from_i64s(&[i])).collect()
    }

    #[test]
    fn twelve_with_three() {
        let a = cyclic(12);
        let m = marker_search(&a, &ints(0..=2), &[], 0).unwrap();
        assert!(m.pass(), "{:?}", m.checks);
        let mut reps: Vec<i64> = m.z.iter().map(|&x| i64::try_from(&a.cosets().unwrap().rep(x).0[0]).unwrap()).collect();
        reps.sort_unstable();
        assert_eq!(reps, vec![0, 3, 6, 9]);
    }

    #[test]
    fn trivial_f_takes_everything() {
        let a = cyclic(7);
        let m = marker_search(&a, &ints(0..=0), &[], 0).unwrap();
        assert_eq!(m.z.len(), 7);
        assert!(m.pass());
    }

    #[test]
    fn oversized_f_fails_with_residue() {
        let a = cyclic(6);
        let m = marker_search(&a, &ints(0..=6), &[], 0).unwrap();
        assert!(!m.pass());
        assert_eq!(m.residue.len(), 6);
    }

    #[test]
    fn seeded_orders_still_verify() {
        let a = cyclic(24);
        for seed in 1..6 {
            let m = marker_search(&a, &ints(0..=2), &[], seed).unwrap();
            assert!(m.pass(), "seed {seed}");
        }
    }

    #[test]
    fn overlapping_translators_are_refused() {
        let a = cyclic(24);
        let t = ints(0..=0).into_iter().chain(ints(3..=3)).collect::<Vec<_>>();
        assert!(matches!(marker_search(&a, &ints(0..=2), &t, 0), Err(Error::Precondition(_))));
        let t = ints(0..=0).into_iter().chain(ints(5..=5)).collect::<Vec<_>>();
        let m = marker_search(&a, &ints(0..=2), &t, 0).unwrap();
        assert!(m.pass());
    }

    #[test]
    fn bad_candidate_is_caught() {
        let a = cyclic(12);
        let m = verify_marker(&a, &ints(0..=2), &ints(0..=0), &[0, 1]).unwrap();
        assert!(!m.pass());
        assert!(m.checks[0].witness.is_some());
    }
}
