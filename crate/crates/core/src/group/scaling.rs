use super::element::Element;
use super::spec::{pow, GroupSpec};
use crate::error::{invalid, Result};
use num_bigint::BigInt;

/// α_r: the (i,j) coordinate is multiplied by r^(j−i); free abelian
/// coordinates by r.
pub fn scaling_endomorphism(spec: &GroupSpec, r: &BigInt, a: &Element) -> Result<Element> {
    if r <= &BigInt::from(0) {
        return invalid(format!("scaling factor must be positive, got {r}"));
    }
    spec.check(a)?;
    Ok(scale_unchecked(spec, r, a))
}

pub(crate) fn scale_unchecked(spec: &GroupSpec, r: &BigInt, a: &Element) -> Element {
    Element(
        a.0.iter()
            .zip(spec.levels())
            .map(|(x, &l)| x * pow(r, l))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let u3 = GroupSpec::unitriangular(3).unwrap();
        let two = BigInt::from(2);
        assert_eq!(
            scaling_endomorphism(&u3, &two, &Element::from_i64s(&[1, 1, 1])).unwrap(),
            Element::from_i64s(&[2, 4, 2])
        );
        let a = Element::from_i64s(&[5, -7, 3]);
        assert_eq!(scaling_endomorphism(&u3, &BigInt::from(1), &a).unwrap(), a);
        let z2 = GroupSpec::free_abelian(2).unwrap();
        assert_eq!(
            scaling_endomorphism(&z2, &BigInt::from(3), &Element::from_i64s(&[1, -2])).unwrap(),
            Element::from_i64s(&[3, -6])
        );
        assert!(scaling_endomorphism(&z2, &BigInt::from(0), &Element::from_i64s(&[1, 1])).is_err());
    }
}
