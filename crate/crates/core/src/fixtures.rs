//! Named quivers and reduction data used throughout the test-suite and CLI.

use crate::algebra::Rational;
use crate::quiver::{build_period1, primitive, PalindromicTuple, QuiverMatrix};
use num_traits::{One, Zero};

pub fn somos4_tuple() -> PalindromicTuple {
    PalindromicTuple::new(vec![1, -2, 1]).unwrap()
}

pub fn somos4_quiver() -> QuiverMatrix {
    QuiverMatrix::new(vec![
        vec![0, -1, 2, -1],
        vec![1, 0, -3, 2],
        vec![-2, 3, 0, -1],
        vec![1, -2, 1, 0],
    ])
    .unwrap()
}

pub fn somos5_tuple() -> PalindromicTuple {
    PalindromicTuple::new(vec![1, -1, -1, 1]).unwrap()
}

pub fn somos5_quiver() -> QuiverMatrix {
    build_period1(&somos5_tuple())
}

/// The three six-node Gale-Robinson quivers (Somos-6 subcases).
pub fn gale_robinson6_tuples() -> [PalindromicTuple; 3] {
    [
        PalindromicTuple::new(vec![1, -1, 0, -1, 1]).unwrap(),
        PalindromicTuple::new(vec![1, 0, -2, 0, 1]).unwrap(),
        PalindromicTuple::new(vec![0, 1, -2, 1, 0]).unwrap(),
    ]
}

pub fn gale_robinson6_quivers() -> [QuiverMatrix; 3] {
    let t = gale_robinson6_tuples();
    [
        build_period1(&t[0]),
        build_period1(&t[1]),
        build_period1(&t[2]),
    ]
}

/// Composite quivers built from a primitive pair plus a correction term:
/// the four-node P4(1)-P4(2)+P2(1) and the six-node pair
/// P6(1)-P6(3)+P4(2), P6(2)-P6(3)+P2(1).
pub fn composite_tuples() -> [PalindromicTuple; 3] {
    [
        PalindromicTuple::new(vec![1, -1, 1]).unwrap(),
        PalindromicTuple::new(vec![1, 0, -1, 0, 1]).unwrap(),
        PalindromicTuple::new(vec![0, 1, -1, 1, 0]).unwrap(),
    ]
}

pub fn composite_quivers() -> [QuiverMatrix; 3] {
    let t = composite_tuples();
    [
        build_period1(&t[0]),
        build_period1(&t[1]),
        build_period1(&t[2]),
    ]
}

/// Eight-node composite P8(1)-P8(4)+P6(3).
pub fn composite8_tuple() -> PalindromicTuple {
    PalindromicTuple::new(vec![1, 0, 0, -1, 0, 0, 1]).unwrap()
}

pub fn primitive_quiver(n: usize, k: usize) -> QuiverMatrix {
    primitive(n, k).unwrap()
}

/// Exponent vectors of the invariant monomials y_i = x^{v_i} that the
/// Somos-4 orbit projects onto (y1 = x1 x3 / x2^2, y2 = x2 x4 / x3^2).
pub fn somos4_y_exponents() -> Vec<Vec<i64>> {
    vec![vec![1, -2, 1, 0], vec![0, 1, -2, 1]]
}

/// Somos-5 projection: y1 = x1 x4 / (x2 x3), y2 = x2 x5 / (x3 x4).
pub fn somos5_y_exponents() -> Vec<Vec<i64>> {
    vec![vec![1, -1, -1, 1, 0], vec![0, 1, -1, -1, 1]]
}

/// Reduced Somos-4 map (y1, y2) -> (y2, (y2+1)/(y1 y2^2)).
pub fn somos4_reduced_map(y: &[Rational; 2]) -> Option<[Rational; 2]> {
    if y[0].is_zero() || y[1].is_zero() {
        return None;
    }
    let num = &y[1] + Rational::one();
    let den = &y[0] * &(&y[1] * &y[1]);
    Some([y[1].clone(), num / den])
}

/// Reduced Somos-5 map (y1, y2) -> (y2, (y2+1)/(y1 y2)).
pub fn somos5_reduced_map(y: &[Rational; 2]) -> Option<[Rational; 2]> {
    if y[0].is_zero() || y[1].is_zero() {
        return None;
    }
    let num = &y[1] + Rational::one();
    let den = &y[0] * &y[1];
    Some([y[1].clone(), num / den])
}

/// Catalog of named fixtures for the CLI `build` convenience and tests.
pub fn named_quiver(name: &str) -> Option<QuiverMatrix> {
    match name {
        "somos4" | "s4" => Some(somos4_quiver()),
        "somos5" | "s5" => Some(somos5_quiver()),
        "gr6-1" => Some(gale_robinson6_quivers()[0].clone()),
        "gr6-2" => Some(gale_robinson6_quivers()[1].clone()),
        "gr6-3" => Some(gale_robinson6_quivers()[2].clone()),
        "composite4" => Some(composite_quivers()[0].clone()),
        "composite6a" => Some(composite_quivers()[1].clone()),
        "composite6b" => Some(composite_quivers()[2].clone()),
        "composite8" => Some(build_period1(&composite8_tuple())),
        "p31" => Some(primitive_quiver(3, 1)),
        "p41" => Some(primitive_quiver(4, 1)),
        "p42" => Some(primitive_quiver(4, 2)),
        "p51" => Some(primitive_quiver(5, 1)),
        "p52" => Some(primitive_quiver(5, 2)),
        "p61" => Some(primitive_quiver(6, 1)),
        "p81" => Some(primitive_quiver(8, 1)),
        _ => None,
    }
}
