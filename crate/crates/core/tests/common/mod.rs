#![allow(dead_code)]

use flatkahler::crystal::{DiagonalAction, TranslationCocycle};
use flatkahler::groups::AbstractAbelianGroup;
use flatkahler::torus::{make_torus, FactorDescription, Preset, TorsionPoint, TorusSpec};

pub fn torus(presets: &[Preset]) -> TorusSpec {
    let d: Vec<FactorDescription> = presets
        .iter()
        .map(|&p| FactorDescription::Preset { preset: p, iso_tag: None })
        .collect();
    make_torus(&d, false).unwrap()
}

/// Exponents refer to each preset's unit generator: -1 for generic, i for
/// gauss, -xi for eisenstein.
pub fn action(presets: &[Preset], moduli: Vec<u64>, exps: &[&[u64]]) -> DiagonalAction {
    let t = torus(presets);
    let g = AbstractAbelianGroup::new(moduli).unwrap();
    let e: Vec<Vec<Vec<u64>>> = exps.iter().map(|row| row.iter().map(|&x| vec![x]).collect()).collect();
    DiagonalAction::from_exponents(&t, g, &e).unwrap()
}

/// Exponent of -1 for each preset.
pub fn minus_one(p: Preset) -> u64 {
    match p {
        Preset::Generic => 1,
        Preset::Gauss => 2,
        Preset::Eisenstein => 3,
    }
}

// On eisenstein factors xi = (-xi)^4 and xi^2 = (-xi)^2.
pub const XI: u64 = 4;
pub const XI2: u64 = 2;

/// Z/3 x Z/3 on four hexagonal curves, g1 = (1, xi, xi, xi), g2 = (xi, 1, xi, xi^2).
pub fn fourfold() -> DiagonalAction {
    action(&[Preset::Eisenstein; 4], vec![3, 3], &[&[0, XI, XI, XI], &[XI, 0, XI, XI2]])
}

/// Z/2 x Z/2 acting by (1,-1,-1) and (-1,1,-1).
pub fn chw(presets: [Preset; 3]) -> DiagonalAction {
    let [a, b, c] = presets.map(minus_one);
    action(&presets, vec![2, 2], &[&[0, b, c], &[a, 0, c]])
}

/// Z/3 x Z/3 on five hexagonal curves. The unprimed action repeats the
/// character on the last two factors; the primed one swaps them.
pub fn fivefold(primed: bool) -> DiagonalAction {
    let (g1, g2): (&[u64], &[u64]) = if primed {
        (&[0, XI, XI, XI, XI2], &[XI, 0, XI, XI2, XI])
    } else {
        (&[0, XI, XI, XI, XI], &[XI, 0, XI, XI2, XI2])
    };
    action(&[Preset::Eisenstein; 5], vec![3, 3], &[g1, g2])
}

/// Point with numerators over `m`, placed on consecutive factors of rank 2.
pub fn point(m: u64, nums: &[i64]) -> TorsionPoint {
    TorsionPoint::new(m, nums)
}

/// CHW cocycle with z(g1) = (a, 0, 0), z(g2) = (0, b, c); each argument is a
/// pair of numerators over 2 on one curve.
pub fn chw_cocycle(a: &DiagonalAction, x: [i64; 2], y: [i64; 2], z: [i64; 2]) -> TranslationCocycle {
    TranslationCocycle::from_generators(
        a,
        &[
            point(2, &[x[0], x[1], 0, 0, 0, 0]),
            point(2, &[0, 0, y[0], y[1], z[0], z[1]]),
        ],
    )
    .unwrap()
}
