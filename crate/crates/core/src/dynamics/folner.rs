use crate::error::{Error, Result};
use crate::group::{word_ball, Element, GroupKind, GroupSpec};
use crate::json::frac_value;
use crate::scalar::{from_u64, Scalar};
use num_rational::BigRational;
use serde_json::{json, Value};
use std::collections::HashSet;

#[derive(Clone, Debug)]
pub struct FolnerSet {
    pub elements: Vec<Element>,
    /// "box" with side n, or "ball" with radius n.
    pub shape: &'static str,
    pub size_param: u32,
    /// |JΔgJ| for each g ∈ M.
    pub boundary: Vec<usize>,
}

impl FolnerSet {
    /// max over g of |JΔgJ|/|J|.
    pub fn ratio(&self) -> BigRational {
        let worst = self.boundary.iter().copied().max().unwrap_or(0);
        BigRational::new(worst.into(), self.elements.len().into())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "shape": self.shape,
            "size": self.size_param,
            "J": self.elements.len(),
            "boundary": self.boundary,
            "ratio": frac_value(&self.ratio()),
            "elements": self.elements,
        })
    }
}

/// |JΔgJ| for left translation.
pub fn symmetric_difference(spec: &GroupSpec, j: &[Element], g: &Element) -> usize {
    let set: HashSet<&Element> = j.iter().collect();
    let moved: HashSet<Element> = j.iter().map(|x| spec.multiply(g, x)).collect();
    let inside = moved.iter().filter(|y| set.contains(y)).count();
    2 * (j.len() - inside)
}

fn cube(m: usize, n: u32) -> Vec<Element> {
    let mut out = vec![Element::zero(m)];
    for k in 0..m {
        let mut next = Vec::with_capacity(out.len() * n as usize);
        for e in &out {
            for i in 0..n {
                let mut f = e.clone();
                f.0[k] = i.into();
                next.push(f);
            }
        }
        out = next;
    }
    out
}

/// Smallest box [0,n)^m (for ℤ^m) or word ball B_n(1) (for U_d) with
/// |JΔgJ| ≤ eps·|J| for all g ∈ M, counted exactly.
pub fn folner_set<S: Scalar>(spec: &GroupSpec, m: &[Element], eps: &S, cap: usize) -> Result<FolnerSet> {
    for g in m {
        spec.check(g)?;
    }
    let boxes = match spec.kind() {
        GroupKind::FreeAbelian(_) => true,
        GroupKind::Unitriangular(_) => false,
        _ => return Err(Error::Unsupported("Følner search supports ℤ^m and U_d(ℤ)".into())),
    };
    let mut n: u32 = if boxes { 1 } else { 0 };
    loop {
        let j = if boxes {
            let size = (n as usize).checked_pow(spec.dim() as u32).filter(|&s| s <= cap);
            if size.is_none() {
                return Err(Error::Cap { cap });
            }
            cube(spec.dim(), n)
        } else {
            word_ball(spec, &spec.identity(), n, cap)?.points().cloned().collect()
        };
        let boundary: Vec<usize> = m.iter().map(|g| symmetric_difference(spec, &j, g)).collect();
        let bound = eps.clone() * from_u64::<S>(j.len() as u64);
        if boundary.iter().all(|&b| from_u64::<S>(b as u64).approx_le(&bound)) {
            return Ok(FolnerSet {
                elements: j,
                shape: if boxes { "box" } else { "ball" },
                size_param: n,
                boundary,
            });
        }
        n += 1;
    }
}
