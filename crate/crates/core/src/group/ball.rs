use super::element::Element;
use super::spec::GroupSpec;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use std::collections::HashMap;

/// Default cap on the number of elements a single enumeration may touch.
pub const DEFAULT_CAP: usize = 5_000_000;

/// A word-metric ball with exact distances from its center, ordered by
/// distance and then lexicographically.
#[derive(Clone, Debug)]
pub struct Ball {
    pub center: Element,
    pub radius: u32,
    pub elements: Vec<(Element, u32)>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &Element> {
        self.elements.iter().map(|(e, _)| e)
    }

    /// Points whose distance to the center is at most `radius − margin`.
    pub fn interior(&self, margin: u32) -> impl Iterator<Item = &Element> {
        let r = self.radius.checked_sub(margin);
        self.elements
            .iter()
            .filter(move |(_, d)| r.is_some_and(|r| *d <= r))
            .map(|(e, _)| e)
    }
}

/// Layers of the ball around the identity; the neighbours of `x` in the
/// Cayley graph of the right-invariant word metric are `s·x`.
fn identity_layers(spec: &GroupSpec, radius: u32, cap: usize) -> Result<Vec<Vec<Element>>> {
    let id = spec.identity();
    let mut seen: HashMap<Element, u32> = HashMap::new();
    seen.insert(id.clone(), 0);
    let mut layers = vec![vec![id]];
    for r in 1..=radius {
        let mut next = Vec::new();
        for x in layers.last().unwrap() {
            for s in spec.generators() {
                let y = spec.multiply(s, x);
                if !seen.contains_key(&y) {
                    seen.insert(y.clone(), r);
                    next.push(y);
                    if seen.len() > cap {
                        return Err(Error::Cap { cap });
                    }
                }
            }
        }
        next.sort();
        layers.push(next);
    }
    Ok(layers)
}

pub fn word_ball(spec: &GroupSpec, center: &Element, radius: u32, cap: usize) -> Result<Ball> {
    spec.check(center)?;
    let layers = identity_layers(spec, radius, cap)?;
    let mut elements = Vec::new();
    for (r, layer) in layers.into_iter().enumerate() {
        let mut l: Vec<Element> = if center.is_identity() {
            layer
        } else {
            layer.iter().map(|s| spec.multiply(s, center)).collect()
        };
        l.sort();
        elements.extend(l.into_iter().map(|e| (e, r as u32)));
    }
    Ok(Ball {
        center: center.clone(),
        radius,
        elements,
    })
}

/// Word length by the ℓ¹ formula (free abelian, standard generators) or BFS.
pub fn word_length(spec: &GroupSpec, g: &Element, cap: usize) -> Result<u32> {
    spec.check(g)?;
    if spec.is_free_abelian() && spec.has_default_generators() {
        let s: BigInt = g.0.iter().map(|c| c.abs()).sum();
        return s.to_u32().ok_or(Error::Cap { cap });
    }
    if g.is_identity() {
        return Ok(0);
    }
    let mut seen: std::collections::HashSet<Element> = std::collections::HashSet::new();
    seen.insert(spec.identity());
    let mut frontier = vec![spec.identity()];
    let mut r = 0;
    loop {
        r += 1;
        let mut next = Vec::new();
        for x in &frontier {
            for s in spec.generators() {
                let y = spec.multiply(s, x);
                if &y == g {
                    return Ok(r);
                }
                if seen.insert(y.clone()) {
                    next.push(y);
                    if seen.len() > cap {
                        return Err(Error::Cap { cap });
                    }
                }
            }
        }
        frontier = next;
    }
}

/// d(a, b) = |a·b⁻¹|.
pub fn word_distance(spec: &GroupSpec, a: &Element, b: &Element, cap: usize) -> Result<u32> {
    spec.check(a)?;
    spec.check(b)?;
    word_length(spec, &spec.multiply(a, &spec.invert(b)), cap)
}

/// Word lengths of all elements up to a fixed radius, for repeated lookups.
#[derive(Clone, Debug)]
pub struct LengthTable {
    pub radius: u32,
    map: HashMap<Element, u32>,
    sorted: Vec<(Element, u32)>,
}

impl LengthTable {
    pub fn new(spec: &GroupSpec, radius: u32, cap: usize) -> Result<Self> {
        let ball = word_ball(spec, &spec.identity(), radius, cap)?;
        let map = ball.elements.iter().cloned().collect();
        Ok(LengthTable {
            radius,
            map,
            sorted: ball.elements,
        })
    }

    /// Length of `g` if it is at most the table radius.
    pub fn length(&self, g: &Element) -> Option<u32> {
        self.map.get(g).copied()
    }

    pub fn distance(&self, spec: &GroupSpec, a: &Element, b: &Element) -> Option<u32> {
        self.length(&spec.multiply(a, &spec.invert(b)))
    }

    /// Elements in order of increasing length.
    pub fn sorted(&self) -> &[(Element, u32)] {
        &self.sorted
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: &[i64]) -> Element {
        Element::from_i64s(v)
    }

    #[test]
    fn z2_unit_ball() {
        let g = GroupSpec::free_abelian(2).unwrap();
        let b = word_ball(&g, &g.identity(), 1, DEFAULT_CAP).unwrap();
        assert_eq!(b.len(), 5);
        assert_eq!(word_distance(&g, &e(&[0, 0]), &e(&[2, 3]), DEFAULT_CAP).unwrap(), 5);
    }

    #[test]
    fn u3_center_needs_four_letters() {
        let g = GroupSpec::unitriangular(3).unwrap();
        assert_eq!(word_length(&g, &e(&[0, 1, 0]), DEFAULT_CAP).unwrap(), 4);
        let t = LengthTable::new(&g, 4, DEFAULT_CAP).unwrap();
        assert_eq!(t.length(&e(&[0, 1, 0])), Some(4));
        assert_eq!(t.length(&e(&[3, 0, 0])), Some(3));
    }

    #[test]
    fn ball_is_ordered_and_centered() {
        let g = GroupSpec::unitriangular(3).unwrap();
        let c = e(&[1, 2, -1]);
        let b = word_ball(&g, &c, 2, DEFAULT_CAP).unwrap();
        assert_eq!(b.elements[0], (c.clone(), 0));
        for w in b.elements.windows(2) {
            assert!((w[0].1, &w[0].0) < (w[1].1, &w[1].0));
        }
        for (x, d) in &b.elements {
            assert_eq!(word_distance(&g, x, &c, DEFAULT_CAP).unwrap(), *d);
        }
    }

    #[test]
    fn cap_is_reported() {
        let g = GroupSpec::free_abelian(3).unwrap();
        assert!(matches!(
            word_ball(&g, &g.identity(), 30, 100),
            Err(Error::Cap { cap: 100 })
        ));
    }
}
