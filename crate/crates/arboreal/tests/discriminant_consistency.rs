//! Independent oracle for the discriminant sequence: the square class of
//! disc(f^i(z) - x0) must equal the square class of the stored difference
//! D_i. The discriminants come from resultants of the iterated polynomial
//! and its derivative, computed exactly as Sylvester determinants by
//! fraction-free (Bareiss) elimination — a route that never touches the
//! library's own discriminant bookkeeping.

use arboreal::squares::{disc_sequence, square_class};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Ascending-coefficient polynomials over the integers.
fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_derivative(a: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, x)| x * BigInt::from(i))
        .collect()
}

fn trim(mut a: Vec<BigInt>) -> Vec<BigInt> {
    while a.len() > 1 && a.last().is_some_and(|x| x.is_zero()) {
        a.pop();
    }
    a
}

/// Exact determinant by Bareiss elimination: every division is exact over
/// the integers.
fn determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if sign < 0 {
        -det
    } else {
        det
    }
}

/// Res(f, g) as the Sylvester determinant.
fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let f = trim(f.to_vec());
    let g = trim(g.to_vec());
    let (df, dg) = (f.len() - 1, g.len() - 1);
    let size = df + dg;
    let mut m = vec![vec![BigInt::zero(); size]; size];
    for row in 0..dg {
        for (j, c) in f.iter().rev().enumerate() {
            m[row][row + j] = c.clone();
        }
    }
    for row in 0..df {
        for (j, c) in g.iter().rev().enumerate() {
            m[dg + row][row + j] = c.clone();
        }
    }
    determinant(m)
}

/// disc(g) = (-1)^(d(d-1)/2) Res(g, g') / lc(g), exact over the integers.
fn discriminant(g: &[BigInt]) -> BigInt {
    let g = trim(g.to_vec());
    let d = g.len() - 1;
    let res = resultant(&g, &poly_derivative(&g));
    let lead = g.last().unwrap().clone();
    let adjusted = res / lead;
    if (d * (d - 1) / 2) % 2 == 1 {
        -adjusted
    } else {
        adjusted
    }
}

/// f^i(z) for f = z^2 + c via repeated squaring of the polynomial.
fn iterate(c: &BigInt, i: u32) -> Vec<BigInt> {
    let mut p = vec![c.clone(), BigInt::zero(), BigInt::one()];
    for _ in 1..i {
        p = poly_mul(&p, &p);
        p[0] += c;
    }
    p
}

/// disc(f^i(z) - x0) for rational x0, up to a rational square: clear the
/// denominator b first; disc(b g) = b^(2d-2) disc(g) keeps the class.
fn level_discriminant(c: &BigInt, x0: &BigRational, i: u32) -> BigInt {
    let b = x0.denom().clone();
    let mut g: Vec<BigInt> = iterate(c, i).iter().map(|coeff| coeff * &b).collect();
    g[0] -= x0.numer();
    discriminant(&g)
}

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

#[test]
fn resultant_and_determinant_basics() {
    // det of a known 3x3 integer matrix
    let m = vec![
        vec![BigInt::from(2), BigInt::from(0), BigInt::from(1)],
        vec![BigInt::from(1), BigInt::from(3), BigInt::from(2)],
        vec![BigInt::from(1), BigInt::from(1), BigInt::from(2)],
    ];
    assert_eq!(determinant(m), BigInt::from(6));
    // singular matrix
    let s = vec![
        vec![BigInt::from(1), BigInt::from(2)],
        vec![BigInt::from(2), BigInt::from(4)],
    ];
    assert_eq!(determinant(s), BigInt::zero());

    // Res(x^2 - 1, x - 2) = value of the first at the root of the second: 3
    let f = [BigInt::from(-1), BigInt::zero(), BigInt::one()];
    let g = [BigInt::from(-2), BigInt::one()];
    assert_eq!(resultant(&f, &g), BigInt::from(3));

    // disc(x^2 + bx + c) = b^2 - 4c
    let q = [BigInt::from(5), BigInt::from(3), BigInt::one()];
    assert_eq!(discriminant(&q), BigInt::from(9 - 20));

    // disc(x^3 + px + q) = -4p^3 - 27q^2
    let cubic = [BigInt::from(2), BigInt::from(-1), BigInt::zero(), BigInt::one()];
    assert_eq!(discriminant(&cubic), BigInt::from(4 - 108));
}

#[test]
fn first_level_discriminant_is_four_d1() {
    // f(z) - x0 = z^2 + (c - x0): disc = 4(x0 - c) = 4 D_1
    for (c, x0) in [(0i64, 5i64), (-1, 5), (3, -2), (-4, 7)] {
        let disc = level_discriminant(&BigInt::from(c), &rational(x0, 1), 1);
        let d1 = BigInt::from(4) * BigInt::from(x0 - c);
        assert_eq!(disc, d1);
    }
}

#[test]
fn discriminant_square_classes_match_the_stored_sequence() {
    let cases: [(i64, i64, i64, u32); 7] = [
        (0, 5, 1, 5),
        (-1, 5, 1, 5),
        (-1, 3, 1, 5),
        (2, 1, 1, 4),
        (-3, 2, 1, 4),
        (-1, 7, 5, 5),
        (1, -3, 7, 4),
    ];
    for (c, num, den, max_i) in cases {
        let c_int = BigInt::from(c);
        let c_rat = BigRational::from_integer(c.into());
        let x0 = rational(num, den);
        let stored = disc_sequence(&c_rat, &x0, max_i).expect("x0 off the critical orbit");
        for i in 1..=max_i {
            let disc = level_discriminant(&c_int, &x0, i);
            assert!(!disc.is_zero(), "separable polynomial expected");
            let lhs = square_class(&BigRational::from_integer(disc)).unwrap();
            let rhs = square_class(&stored[(i - 1) as usize]).unwrap();
            assert_eq!(
                lhs, rhs,
                "square class of disc(f^{i} - x0) vs D_{i} for c={c}, x0={num}/{den}"
            );
        }
    }
}
