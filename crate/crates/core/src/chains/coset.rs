use super::chain::SubgroupChain;
use super::lattice::Lattice;
use crate::error::{Error, Result};
use crate::group::{Element, GroupSpec};
use num_traits::ToPrimitive;
use serde::Serialize;
use std::collections::{HashMap, VecDeque};

/// Default cap on the index of a materialized stage.
pub const DEFAULT_INDEX_CAP: usize = 100_000;

/// Left cosets G/H with canonical representatives and the Schreier graph
/// x̄ → s·x̄ for the group generators.
#[derive(Clone, Debug)]
pub struct CosetSpace {
    group: GroupSpec,
    lattice: Lattice,
    stage: Option<usize>,
    reps: Vec<Element>,
    lookup: HashMap<Element, usize>,
    /// edges[i][k] = coset of generators[k]·reps[i]
    edges: Vec<Vec<usize>>,
}

impl CosetSpace {
    pub fn new(group: &GroupSpec, lattice: &Lattice, cap: usize) -> Result<Self> {
        let index = lattice.index();
        if index.to_usize().is_none_or(|i| i > cap) {
            return Err(Error::Cap { cap });
        }
        let id = lattice.canonical(group, &group.identity());
        let mut reps = vec![id.clone()];
        let mut lookup = HashMap::from([(id, 0usize)]);
        let mut edges: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let mut row = Vec::with_capacity(group.generators().len());
            for s in group.generators() {
                let y = lattice.canonical(group, &group.multiply(s, &reps[i]));
                let j = match lookup.get(&y) {
                    Some(&j) => j,
                    None => {
                        let j = reps.len();
                        reps.push(y.clone());
                        lookup.insert(y, j);
                        queue.push_back(j);
                        j
                    }
                };
                row.push(j);
            }
            if edges.len() <= i {
                edges.resize(i + 1, Vec::new());
            }
            edges[i] = row;
        }
        if index != reps.len().into() {
            return Err(Error::Invalid(format!(
                "orbit of the identity coset has {} cosets but the index is {index}; generators do not generate",
                reps.len()
            )));
        }
        Ok(CosetSpace {
            group: group.clone(),
            lattice: lattice.clone(),
            stage: None,
            reps,
            lookup,
            edges,
        })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn stage(&self) -> Option<usize> {
        self.stage
    }

    pub fn index(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[Element] {
        &self.reps
    }

    pub fn rep(&self, i: usize) -> &Element {
        &self.reps[i]
    }

    /// Coset of an arbitrary element.
    pub fn locate(&self, x: &Element) -> usize {
        self.lookup[&self.lattice.canonical(&self.group, x)]
    }

    /// Coset of g·reps[i].
    pub fn act(&self, g: &Element, i: usize) -> usize {
        self.locate(&self.group.multiply(g, &self.reps[i]))
    }

    /// Coset reached from `i` by generator number `k`.
    pub fn step(&self, i: usize, k: usize) -> usize {
        self.edges[i][k]
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    /// Schreier-graph distances from coset `i`, stopping after `max_depth`.
    pub fn distances_from(&self, i: usize, max_depth: Option<u32>) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.index()];
        dist[i] = Some(0);
        let mut queue = VecDeque::from([i]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            if max_depth.is_some_and(|m| du >= m) {
                continue;
            }
            for &v in &self.edges[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn diameter(&self) -> u32 {
        (0..self.index())
            .map(|i| {
                self.distances_from(i, None)
                    .into_iter()
                    .map(|d| d.expect("Schreier graph is connected"))
                    .max()
                    .unwrap_or(0)
            })
            .max()
            .unwrap_or(0)
    }

    /// Adjacency dump: canonical representatives with their neighbour lists.
    pub fn dump(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Node<'a> {
            rep: &'a Element,
            neighbors: &'a [usize],
        }
        let nodes: Vec<Node> = self
            .reps
            .iter()
            .zip(&self.edges)
            .map(|(rep, neighbors)| Node { rep, neighbors })
            .collect();
        serde_json::json!({
            "divisors": self.lattice,
            "index": self.index(),
            "generators": self.group.generators(),
            "cosets": nodes,
        })
    }
}

pub fn coset_space(chain: &SubgroupChain, n: usize, cap: usize) -> Result<CosetSpace> {
    let (a, b) = chain.range();
    if n < a || n > b {
        return Err(Error::Invalid(format!("stage {n} outside the chain range {a}..={b}")));
    }
    let mut cs = CosetSpace::new(chain.group(), &chain.stage(n)?, cap)?;
    cs.stage = Some(n);
    Ok(cs)
}

/// Schreier distance between the cosets of x and y; equals
/// inf over h ∈ H of |x·h·y⁻¹|.
pub fn quotient_distance(cs: &CosetSpace, x: &Element, y: &Element) -> Result<u32> {
    cs.group().check(x)?;
    cs.group().check(y)?;
    let (i, j) = (cs.locate(x), cs.locate(y));
    if i == j {
        return Ok(0);
    }
    let mut dist = vec![u32::MAX; cs.index()];
    dist[i] = 0;
    let mut queue = VecDeque::from([i]);
    while let Some(u) = queue.pop_front() {
        for &v in &cs.edges[u] {
            if dist[v] == u32::MAX {
                dist[v] = dist[u] + 1;
                if v == j {
                    return Ok(dist[v]);
                }
                queue.push_back(v);
            }
        }
    }
    unreachable!("Schreier graph of a transitive action is connected")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_mod_6_is_a_cycle() {
        let c = SubgroupChain::preset("z", "factorial", 0, 4).unwrap();
        let cs = coset_space(&c, 3, DEFAULT_INDEX_CAP).unwrap();
        assert_eq!(cs.index(), 6);
        assert!(cs.edges().iter().all(|row| row.len() == 2));
        let e = |v: i64| Element::from_i64s(&[v]);
        assert_eq!(quotient_distance(&cs, &e(0), &e(5)).unwrap(), 1);
        assert_eq!(quotient_distance(&cs, &e(0), &e(3)).unwrap(), 3);
        assert_eq!(cs.diameter(), 3);
    }

    #[test]
    fn indices() {
        let c = SubgroupChain::preset("z2", "factorial", 0, 3).unwrap();
        assert_eq!(coset_space(&c, 2, DEFAULT_INDEX_CAP).unwrap().index(), 4);
        let u = SubgroupChain::preset("u3", "scaled", 0, 2).unwrap();
        let cs = coset_space(&u, 1, DEFAULT_INDEX_CAP).unwrap();
        assert_eq!(cs.index(), 16);
        assert!(coset_space(&u, 2, 1000).is_err());
    }
}
