use crate::covers::BaseSet;
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

/// Extremes of the central coordinate over the U_3 ball: for each radius ρ
/// and first coordinate a, the least and greatest c among elements (a, c, b)
/// of length ≤ ρ.
#[derive(Debug)]
pub(crate) struct U3CenterTable {
    radius: i64,
    rows: Vec<Vec<Option<(i64, i64)>>>,
}

impl U3CenterTable {
    pub(crate) fn new(radius: u32) -> Self {
        let r = i64::from(radius);
        let width = (2 * r + 1) as usize;
        let mut rows = vec![vec![None; width]; radius as usize + 1];
        let gens = [(1, 0, 0), (-1, 0, 0), (0, 0, 1), (0, 0, -1)];
        let mut seen: HashSet<(i64, i64, i64)> = HashSet::from([(0, 0, 0)]);
        let mut frontier = vec![(0i64, 0i64, 0i64)];
        let update = |row: &mut Vec<Option<(i64, i64)>>, a: i64, c: i64| {
            let slot = &mut row[(a + r) as usize];
            *slot = Some(match *slot {
                None => (c, c),
                Some((lo, hi)) => (lo.min(c), hi.max(c)),
            });
        };
        update(&mut rows[0], 0, 0);
        for rho in 1..=radius as usize {
            rows[rho] = rows[rho - 1].clone();
            let mut next = Vec::new();
            for &(a, c, b) in &frontier {
                for &(sa, sc, sb) in &gens {
                    let y = (sa + a, sc + c + sa * b, sb + b);
                    if seen.insert(y) {
                        update(&mut rows[rho], y.0, y.1);
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        U3CenterTable { radius: r, rows }
    }
}

/// Word distance from each point of a base set to its complement (0 for
/// points outside the set).
#[derive(Debug)]
pub(crate) enum DistOracle {
    Table(HashMap<Element, u32>),
    /// ℓ¹ metric of ℤ^m with the standard generators.
    AbelianBrick(Vec<(BigInt, BigInt)>),
    U3Brick {
        bounds: [(i64, i64); 3],
        table: Arc<U3CenterTable>,
    },
}

fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::Unsupported(format!("coordinate {x} exceeds the 64-bit fast path")))
}

/// Half-width reach of a U_3 brick: no point is further than this from the
/// complement.
fn u3_reach(b: &[(i64, i64); 3]) -> u32 {
    let half = |(lo, hi): (i64, i64)| ((hi - lo).max(0) / 2 + 1) as u32;
    half(b[0]).min(half(b[2]))
}

impl DistOracle {
    /// One oracle per base set, sharing the U_3 table where it applies.
    pub(crate) fn for_sets(group: &GroupSpec, sets: &[BaseSet], cap: usize) -> Result<Vec<DistOracle>> {
        let abelian = group.is_free_abelian() && group.has_default_generators();
        let u3 = group.is_standard_u3();
        let mut u3_bounds = Vec::new();
        if u3 {
            for s in sets {
                if let BaseSet::Brick(b) = s {
                    let mut out = [(0, 0); 3];
                    for k in 0..3 {
                        out[k] = (to_i64(&b[k].0)?, to_i64(&b[k].1)?);
                    }
                    u3_bounds.push(out);
                }
            }
        }
        let table = Arc::new(U3CenterTable::new(u3_bounds.iter().map(u3_reach).max().unwrap_or(0)));
        let mut bricks = u3_bounds.into_iter();
        sets.iter()
            .map(|s| match s {
                BaseSet::Brick(b) if abelian => Ok(DistOracle::AbelianBrick(b.clone())),
                BaseSet::Brick(_) if u3 => Ok(DistOracle::U3Brick {
                    bounds: bricks.next().expect("one bound per brick"),
                    table: table.clone(),
                }),
                _ => Ok(DistOracle::Table(bfs_table(group, &s.enumerate(cap)?))),
            })
            .collect()
    }

    pub(crate) fn dist(&self, u: &Element) -> u32 {
        match self {
            DistOracle::Table(t) => t.get(u).copied().unwrap_or(0),
            DistOracle::AbelianBrick(b) => {
                if !BaseSet::in_brick(b, u) {
                    return 0;
                }
                u.0.iter()
                    .zip(b)
                    .map(|(x, (lo, hi))| (x - lo + 1u32).min(hi - x + 1u32))
                    .min()
                    .and_then(|d| d.abs().to_u32())
                    .unwrap_or(u32::MAX)
            }
            DistOracle::U3Brick { bounds, table } => {
                let Some((a, c, b)) = u.0.iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>().map(|v| (v[0], v[1], v[2]))
                else {
                    return 0;
                };
                let [(a0, a1), (c0, c1), (b0, b1)] = *bounds;
                if a < a0 || a > a1 || b < b0 || b > b1 || c < c0 || c > c1 {
                    return 0;
                }
                // s·u = (a_s + a, c_s + c + a_s·b, b_s + b)
                let cut = (a - a0 + 1).min(a1 - a + 1).min(b - b0 + 1).min(b1 - b + 1);
                let (lo, hi) = (c0 - c, c1 - c);
                for rho in 1..cut.min(table.radius + 1) {
                    let row = &table.rows[rho as usize];
                    for sa in -rho..=rho {
                        if let Some((mn, mx)) = row[(sa + table.radius) as usize] {
                            if mx + sa * b > hi || mn + sa * b < lo {
                                return rho as u32;
                            }
                        }
                    }
                }
                cut as u32
            }
        }
    }
}

/// Multi-source search inward from the boundary: points with a neighbour
/// outside the set are at distance 1.
fn bfs_table(group: &GroupSpec, points: &[Element]) -> HashMap<Element, u32> {
    let set: HashSet<&Element> = points.iter().collect();
    let mut gens: Vec<Element> = group.generators().to_vec();
    for s in group.generators() {
        let i = group.invert(s);
        if !gens.contains(&i) {
            gens.push(i);
        }
    }
    let mut dist: HashMap<Element, u32> = HashMap::new();
    let mut queue = VecDeque::new();
    for u in points {
        if gens.iter().any(|s| !set.contains(&group.multiply(s, u))) {
            dist.insert(u.clone(), 1);
            queue.push_back(u.clone());
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[&v];
        for s in &gens {
            let w = group.multiply(s, &v);
            if set.contains(&w) && !dist.contains_key(&w) {
                dist.insert(w.clone(), d + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{word_ball, DEFAULT_CAP};

    /// Brute force: smallest |s| with s·u outside the set.
    fn brute(group: &GroupSpec, set: &HashSet<Element>, u: &Element, radius: u32) -> u32 {
        let ball = word_ball(group, &group.identity(), radius, DEFAULT_CAP).unwrap();
        for (s, d) in &ball.elements {
            if !set.contains(&group.multiply(s, u)) {
                return *d;
            }
        }
        panic!("ball too small");
    }

    #[test]
    fn u3_fast_path_matches_search() {
        let g = GroupSpec::unitriangular(3).unwrap();
        let brick = BaseSet::brick_i64(&[(-3, 4), (2, 40), (0, 6)]);
        let pts = brick.enumerate(100_000).unwrap();
        let set: HashSet<Element> = pts.iter().cloned().collect();
        let fast = &DistOracle::for_sets(&g, &[brick.clone()], 100_000).unwrap()[0];
        let table = bfs_table(&g, &pts);
        for u in pts.iter().step_by(7) {
            let d = fast.dist(u);
            assert_eq!(d, table[u], "{u}");
            assert_eq!(d, brute(&g, &set, u, 6), "{u}");
        }
        assert_eq!(fast.dist(&Element::from_i64s(&[5, 3, 3])), 0);
    }

    #[test]
    fn abelian_brick_is_l1() {
        let g = GroupSpec::free_abelian(2).unwrap();
        let brick = BaseSet::brick_i64(&[(0, 5), (-2, 9)]);
        let o = &DistOracle::for_sets(&g, &[brick.clone()], 1000).unwrap()[0];
        let t = bfs_table(&g, &brick.enumerate(1000).unwrap());
        for (u, d) in &t {
            assert_eq!(o.dist(u), *d);
        }
        assert_eq!(o.dist(&Element::from_i64s(&[2, 3])), 3);
    }

    #[test]
    fn interval_distances() {
        let g = GroupSpec::free_abelian(1).unwrap();
        let base = BaseSet::Points((0..=5).map(|i| Element::from_i64s(&[i])).collect());
        let o = &DistOracle::for_sets(&g, &[base], 100).unwrap()[0];
        let d: Vec<u32> = (-1..=6).map(|i| o.dist(&Element::from_i64s(&[i]))).collect();
        assert_eq!(d, vec![0, 1, 2, 3, 3, 2, 1, 0]);
    }
}
