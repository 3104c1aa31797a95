//! Independent oracles shared by the integration tests. None of these call
//! into the library routines they check.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use relmon_core::affine::{AffineElement, UniMat2};
use relmon_core::lattice::IntVector;

// Gauss–Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod quadrature of a smooth integrand on `[a, b]`.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, err) = gk15(f, a, b);
        if err <= tol || depth > 40 {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, tol / 2.0, depth + 1) + rec(f, m, b, tol / 2.0, depth + 1)
    }
    rec(f, a, b, tol, 0)
}

/// `∫_x0^∞ dx/√(x(x−1)(x−λ))` for real `1 < x0` and `0 < λ < 1`, after
/// `x = x0 + s²` and `s = t/(1−t)` to remove the endpoint behaviour.
pub fn tail_integral(lambda: f64, x0: f64) -> f64 {
    let f = |t: f64| {
        if t >= 1.0 {
            return 0.0;
        }
        let s = t / (1.0 - t);
        let ds = 1.0 / ((1.0 - t) * (1.0 - t));
        let x = x0 + s * s;
        if x0 == 1.0 {
            // √(x − 1) = s cancels the factor s of dx = 2s·ds
            2.0 * ds / (x * (x - lambda)).sqrt()
        } else {
            2.0 * s * ds / (x * (x - 1.0) * (x - lambda)).sqrt()
        }
    };
    integrate(&f, 0.0, 1.0, 1e-14)
}

/// `∫_λ^1 dx/√(x(1−x)(x−λ))` via `x = λ + (1−λ)sin²θ`.
pub fn middle_integral(lambda: f64) -> f64 {
    let f = |th: f64| {
        let s = th.sin();
        let x = lambda + (1.0 - lambda) * s * s;
        2.0 / x.sqrt()
    };
    integrate(&f, 0.0, std::f64::consts::FRAC_PI_2, 1e-14)
}

/// `τ = ω₂/ω₁` for real `0 < λ < 1` by quadrature: `ω₁ = 2∫_1^∞`,
/// `ω₂ = 2i∫_λ^1`.
pub fn tau_oracle(lambda: f64) -> (f64, f64) {
    let w1 = 2.0 * tail_integral(lambda, 1.0);
    let w2 = 2.0 * middle_integral(lambda);
    (w1, w2)
}

/// Order of the group generated by the block tuples reduced mod `p`,
/// by plain breadth-first closure on tuples of 2×2 arrays.
pub fn closure_order_oracle(gens: &[Vec<[[i64; 2]; 2]>], p: i64) -> usize {
    type T = Vec<[i64; 4]>;
    let red = |m: &[[i64; 2]; 2]| [m[0][0].rem_euclid(p), m[0][1].rem_euclid(p), m[1][0].rem_euclid(p), m[1][1].rem_euclid(p)];
    let gens: Vec<T> = gens.iter().map(|g| g.iter().map(red).collect()).collect();
    let k = gens[0].len();
    let id: T = vec![[1, 0, 0, 1]; k];
    let mul = |a: &T, b: &T| -> T {
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                [
                    (x[0] * y[0] + x[1] * y[2]) % p,
                    (x[0] * y[1] + x[1] * y[3]) % p,
                    (x[2] * y[0] + x[3] * y[2]) % p,
                    (x[2] * y[1] + x[3] * y[3]) % p,
                ]
            })
            .collect()
    };
    let mut seen: HashSet<T> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = mul(&x, g);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.len()
}

/// Rank over ℚ by Gaussian elimination on exact fractions held as
/// numerator/denominator pairs of BigInt.
pub fn rank_oracle(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<(BigInt, BigInt)>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| (BigInt::from(x), BigInt::one())).collect())
        .collect();
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..m).find(|&i| !a[i][col].0.is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in 0..m {
            if i == rank || a[i][col].0.is_zero() {
                continue;
            }
            // row_i -= (a_i,col / a_r,col) row_r
            let (fn_, fd) = (&a[i][col].0 * &a[rank][col].1, &a[i][col].1 * &a[rank][col].0);
            for j in 0..n {
                let (rn, rd) = a[rank][j].clone();
                let (xn, xd) = a[i][j].clone();
                let num = &xn * &rd * &fd - &rn * &fn_ * &xd;
                let den = &xd * &rd * &fd;
                a[i][j] = (num, den);
            }
        }
        rank += 1;
    }
    rank
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Random determinant-one matrix with `|a|, |c| ≤ bound` and `b, d` reduced
/// into the same range.
pub fn random_unimodular(rng: &mut impl Rng, bound: i64) -> UniMat2 {
    loop {
        let a: i64 = rng.gen_range(-bound..=bound);
        let c: i64 = rng.gen_range(-bound..=bound);
        let (g, x, y) = ext_gcd(a, c);
        if g.abs() != 1 {
            continue;
        }
        // a·x + c·y = g, so with d = x·g, b = −y·g: a·d − b·c = 1
        let (mut b, mut d) = (-y * g, x * g);
        // shift (b, d) by multiples of (a, c) to keep them small
        if a != 0 {
            let t = b.div_euclid(a);
            b -= t * a;
            d -= t * c;
        }
        if b.abs() <= bound && d.abs() <= bound {
            return UniMat2::from_i64(a, b, c, d).expect("determinant one");
        }
    }
}

pub fn random_element(rng: &mut impl Rng, k: usize, bound: i64) -> AffineElement {
    let blocks = (0..k).map(|_| random_unimodular(rng, bound)).collect();
    let w: Vec<i64> = (0..2 * k).map(|_| rng.gen_range(-bound..=bound)).collect();
    AffineElement::new(blocks, IntVector::from_i64s(&w)).expect("valid element")
}

/// `(T, w)` as BigInt arrays for direct arithmetic.
pub fn big_parts(x: &AffineElement) -> (Vec<[BigInt; 4]>, Vec<BigInt>) {
    let blocks = x
        .blocks()
        .iter()
        .map(|b| {
            let e = b.entries();
            [e[0].to_bigint(), e[1].to_bigint(), e[2].to_bigint(), e[3].to_bigint()]
        })
        .collect();
    (blocks, x.translation().to_bigints())
}

/// `w_g + T_g·w_h` computed directly on BigInt.
pub fn cocycle_oracle(g: &AffineElement, h: &AffineElement) -> Vec<BigInt> {
    let (tg, wg) = big_parts(g);
    let (_, wh) = big_parts(h);
    let mut out = Vec::with_capacity(wg.len());
    for (i, t) in tg.iter().enumerate() {
        let (x, y) = (&wh[2 * i], &wh[2 * i + 1]);
        out.push(&wg[2 * i] + &t[0] * x + &t[1] * y);
        out.push(&wg[2 * i + 1] + &t[2] * x + &t[3] * y);
    }
    out
}
