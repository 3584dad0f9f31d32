use super::cover::{BaseSet, ColoredCover, PeriodStage};
use crate::chains::Lattice;
use crate::error::{invalid, Error, Result};
use crate::group::{GroupKind, GroupSpec};
use num_bigint::BigInt;
use num_traits::{One, Pow};

/// Four-coloured brick cover of U_3(ℤ) in coordinates (a, c, b) with period
/// α_N(U_3): colour l is the brick with sides (N, N², N) offset by
/// (lN/4, lN²/4, lN/4 − N/2), so that the colours are staggered by a
/// quarter period in every coordinate.
pub fn staggered_brick_cover_u3(n: u32) -> Result<ColoredCover> {
    if n < 4 || n % 4 != 0 {
        return invalid(format!("N must be a positive multiple of 4, got {n}"));
    }
    let group = GroupSpec::unitriangular(3)?;
    let n = i64::from(n);
    let colors = (0..4)
        .map(|l| {
            let lo = [l * n / 4, l * n * n / 4, l * n / 4 - n / 2];
            let side = [n, n * n, n];
            vec![BaseSet::brick_i64(&[
                (lo[0], lo[0] + side[0] - 1),
                (lo[1], lo[1] + side[1] - 1),
                (lo[2], lo[2] + side[2] - 1),
            ])]
        })
        .collect();
    let period = Lattice::scaled(&group, &BigInt::from(n))?;
    ColoredCover::new(group, PeriodStage::lattice(period), colors, (n / 8) as u32)
}

/// Pushes a brick cover of U_d(ℤ) forward along α_k: the interval [lo, hi]
/// of a level-e coordinate becomes [k^e·lo, k^e·(hi+1) − 1], so the scaled
/// bricks tile exactly as the originals did, and the period lattice is
/// scaled the same way.
pub fn synth_scaled_cover_ud(d: usize, k: u32, base: &ColoredCover) -> Result<ColoredCover> {
    let group = GroupSpec::unitriangular(d)?;
    if !matches!(base.group.kind(), GroupKind::Unitriangular(e) if *e == d) || !base.group.has_default_generators() {
        return invalid(format!("base cover must live on U_{d} with its standard generators"));
    }
    if k == 0 {
        return invalid("k must be positive");
    }
    let want = d * (d - 1) / 2 + 1;
    if base.colors.len() != want {
        return invalid(format!("base cover has {} colours, expected {want}", base.colors.len()));
    }
    if !base.is_brick_shaped() {
        return Err(Error::Unsupported("base cover is not brick-shaped".into()));
    }
    let kb = BigInt::from(k);
    let factors: Vec<BigInt> = group.levels().iter().map(|&e| Pow::pow(&kb, e)).collect();
    let colors = base
        .colors
        .iter()
        .map(|bases| {
            bases
                .iter()
                .map(|b| match b {
                    BaseSet::Brick(bounds) => BaseSet::Brick(
                        bounds
                            .iter()
                            .zip(&factors)
                            .map(|((lo, hi), f)| (f * lo, f * (hi + 1) - BigInt::one()))
                            .collect(),
                    ),
                    BaseSet::Points(_) => unreachable!("checked brick-shaped"),
                })
                .collect()
        })
        .collect();
    let divisors = base
        .period
        .lattice
        .divisors()
        .iter()
        .zip(&factors)
        .map(|(p, f)| p * f)
        .collect();
    let period = Lattice::new(&group, divisors)?;
    ColoredCover::new(group, PeriodStage::lattice(period), colors, base.scale_r * k)
}
