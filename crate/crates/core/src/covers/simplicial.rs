use super::cover::{BaseSet, ColoredCover, PeriodStage};
use crate::chains::SubgroupChain;
use crate::error::{invalid, Result};
use crate::group::{Element, GroupSpec};
use num_bigint::BigInt;
use std::collections::BTreeMap;

type Simplex = Vec<Vec<i64>>;

/// Barycentric weights (scaled by L) of p in the L-scaled Kuhn triangulation,
/// as (vertex in grid units, weight) with positive weights only.
fn kuhn_weights(p: &[i64], l: i64) -> Vec<(Vec<i64>, i64)> {
    let m = p.len();
    let base: Vec<i64> = p.iter().map(|x| x.div_euclid(l)).collect();
    let f: Vec<i64> = p.iter().zip(&base).map(|(x, b)| x - l * b).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| f[j].cmp(&f[i]).then(i.cmp(&j)));
    let mut out = Vec::with_capacity(m + 1);
    let mut v = base.clone();
    out.push((v.clone(), l - f[order[0]]));
    for k in 0..m {
        v[order[k]] += 1;
        let next = if k + 1 < m { f[order[k + 1]] } else { 0 };
        out.push((v.clone(), f[order[k]] - next));
    }
    out.retain(|(_, w)| *w > 0);
    out
}

/// The simplices σ with p ∈ U_σ: for each l such that the (l+1)-th largest
/// weight strictly exceeds the (l+2)-th, σ is the set of the l+1 heaviest
/// vertices.
pub fn open_star_simplices(p: &[i64], l: i64) -> Vec<(usize, Simplex)> {
    let mut w = kuhn_weights(p, l);
    w.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut out = Vec::new();
    for k in 0..w.len() {
        let next = w.get(k + 1).map_or(0, |x| x.1);
        if w[k].1 > next {
            let mut s: Simplex = w[..=k].iter().map(|x| x.0.clone()).collect();
            s.sort();
            out.push((k, s));
        }
    }
    out
}

/// Edge length of the triangulation behind `synth_simplicial_cover_zm(m, L)`.
/// The open-star cover has Lebesgue number 2/((m+1)(m+2)) in barycentric ℓ¹,
/// and one lattice step moves barycentric coordinates by 2/edge, so an edge
/// of L·⌈(m+1)(m+2)/8⌉ keeps the claimed scale L/8.
pub fn simplicial_edge(m: usize, l: u32) -> u32 {
    let k = ((m + 1) * (m + 2)).div_ceil(8).max(1);
    l * k as u32
}

/// (m+1)-coloured cover of ℤ^m: colour l collects the sets U_σ ∩ ℤ^m for the
/// l-simplices σ of the scaled Kuhn triangulation, one base set per
/// translation class of simplices. The period is Eℤ^m for the edge length
/// E = simplicial_edge(m, L), and the claimed scale is L/8.
pub fn synth_simplicial_cover_zm(m: usize, l: u32) -> Result<ColoredCover> {
    if m < 1 {
        return invalid("m must be at least 1");
    }
    if l < 2 {
        return invalid("L must be at least 2");
    }
    let e = simplicial_edge(m, l);
    let li = i64::from(e);
    let group = GroupSpec::free_abelian(m)?;
    let mut classes: BTreeMap<(usize, Simplex), Vec<Vec<i64>>> = BTreeMap::new();
    let total = (e as usize).pow(m as u32);
    let mut p = vec![0i64; m];
    for _ in 0..total {
        for (dim, sigma) in open_star_simplices(&p, li) {
            let w = sigma[0].clone();
            let shifted: Simplex = sigma
                .iter()
                .map(|v| v.iter().zip(&w).map(|(a, b)| a - b).collect())
                .collect();
            let point: Vec<i64> = p.iter().zip(&w).map(|(x, c)| x - li * c).collect();
            classes.entry((dim, shifted)).or_default().push(point);
        }
        for k in 0..m {
            p[k] += 1;
            if p[k] < li {
                break;
            }
            p[k] = 0;
        }
    }
    let mut colors: Vec<Vec<BaseSet>> = vec![Vec::new(); m + 1];
    for ((dim, _), mut pts) in classes {
        pts.sort();
        colors[dim].push(BaseSet::Points(pts.iter().map(|v| Element::from_i64s(v)).collect()));
    }
    let chain = SubgroupChain::custom(group.clone(), vec![vec![BigInt::from(1); m], vec![BigInt::from(e); m]])?;
    ColoredCover::new(group, PeriodStage::from_chain(&chain, 1)?, colors, l / 8)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(b: &BaseSet) -> Vec<i64> {
        match b {
            BaseSet::Points(p) => p.iter().map(|e| i64::try_from(&e.0[0]).unwrap()).collect(),
            _ => panic!("points expected"),
        }
    }

    #[test]
    fn line_at_scale_eight() {
        let c = synth_simplicial_cover_zm(1, 8).unwrap();
        assert_eq!(c.colors.len(), 2);
        assert_eq!(ints(&c.colors[0][0]), (-3..=3).collect::<Vec<_>>());
        assert_eq!(ints(&c.colors[1][0]), (1..=7).collect::<Vec<_>>());
        assert_eq!(c.scale_r, 1);
    }

    #[test]
    fn line_at_scale_two_is_a_partition() {
        let c = synth_simplicial_cover_zm(1, 2).unwrap();
        assert_eq!(ints(&c.colors[0][0]), vec![0]);
        assert_eq!(ints(&c.colors[1][0]), vec![1]);
        assert_eq!(c.scale_r, 0);
    }

    #[test]
    fn kuhn_simplex_counts() {
        // translation classes of l-simplices in the Kuhn triangulation of ℝ^m
        let c = synth_simplicial_cover_zm(2, 8).unwrap();
        let counts: Vec<usize> = c.colors.iter().map(Vec::len).collect();
        assert_eq!(counts, vec![1, 3, 2]);
        let c = synth_simplicial_cover_zm(3, 8).unwrap();
        let counts: Vec<usize> = c.colors.iter().map(Vec::len).collect();
        assert_eq!(counts, vec![1, 7, 12, 6]);
    }

    #[test]
    fn weights_sum_to_scale() {
        for p in [[0, 0, 0], [3, 7, 1], [-5, 12, 4], [8, 8, 8]] {
            let w = kuhn_weights(&p, 8);
            assert_eq!(w.iter().map(|x| x.1).sum::<i64>(), 8);
            // barycenter reproduces the point
            for k in 0..3 {
                let s: i64 = w.iter().map(|(v, x)| v[k] * x).sum();
                assert_eq!(s, p[k]);
            }
        }
    }
}
