//! Exact points, windows and tube families on the unit torus.

use crate::error::{invalid, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// A rational point `(x, y) / d` with `d > 0`.
#[derive(Debug, Clone)]
pub struct Point {
    pub x: BigInt,
    pub y: BigInt,
    pub d: BigInt,
}

impl Point {
    pub fn new(x: BigInt, y: BigInt, d: BigInt) -> Self {
        assert!(d.is_positive(), "denominator must be positive");
        Point { x, y, d }
    }

    /// The same point in lowest terms.
    pub fn reduced(&self) -> Point {
        let g = self.x.gcd(&self.y).gcd(&self.d);
        if g.is_one() {
            self.clone()
        } else {
            Point::new(&self.x / &g, &self.y / &g, &self.d / g)
        }
    }

    pub fn from_rationals(x: &BigRational, y: &BigRational) -> Self {
        let d = x.denom().lcm(y.denom());
        Point {
            x: x.numer() * (&d / x.denom()),
            y: y.numer() * (&d / y.denom()),
            d,
        }
    }

    pub fn xr(&self) -> BigRational {
        BigRational::new(self.x.clone(), self.d.clone())
    }

    pub fn yr(&self) -> BigRational {
        BigRational::new(self.y.clone(), self.d.clone())
    }

    pub fn scaled(&self, f: &BigInt) -> Point {
        Point::from_rationals(&(self.xr() * f), &(self.yr() * f))
    }

    pub fn translated(&self, dx: &BigInt, dy: &BigInt) -> Point {
        Point::new(&self.x + dx * &self.d, &self.y + dy * &self.d, self.d.clone())
    }
}

impl PartialEq for Point {
    fn eq(&self, o: &Self) -> bool {
        &self.x * &o.d == &o.x * &self.d && &self.y * &o.d == &o.y * &self.d
    }
}

impl Eq for Point {}

/// Closed axis-parallel rectangle `[x0, x0 + w] x [y0, y0 + h]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub x0: BigRational,
    pub y0: BigRational,
    pub w: BigRational,
    pub h: BigRational,
}

impl Window {
    pub fn square(x0: BigRational, y0: BigRational, side: BigRational) -> Self {
        Window {
            x0,
            y0,
            w: side.clone(),
            h: side,
        }
    }

    pub fn x1(&self) -> BigRational {
        &self.x0 + &self.w
    }

    pub fn y1(&self) -> BigRational {
        &self.y0 + &self.h
    }

    pub fn contains(&self, p: &Point) -> bool {
        let (x, y) = (p.xr(), p.yr());
        x >= self.x0 && x <= self.x1() && y >= self.y0 && y <= self.y1()
    }

    pub fn corners(&self) -> [Point; 4] {
        let (x0, x1, y0, y1) = (self.x0.clone(), self.x1(), self.y0.clone(), self.y1());
        [
            Point::from_rationals(&x0, &y0),
            Point::from_rationals(&x1, &y0),
            Point::from_rationals(&x0, &y1),
            Point::from_rationals(&x1, &y1),
        ]
    }

    /// Squared distance from the origin to the nearest window point.
    pub fn min_norm_squared(&self) -> BigRational {
        let clamp = |lo: &BigRational, hi: &BigRational| {
            if lo.is_positive() {
                lo.clone()
            } else if hi.is_negative() {
                -hi.clone()
            } else {
                BigRational::zero()
            }
        };
        let cx = clamp(&self.x0, &self.x1());
        let cy = clamp(&self.y0, &self.y1());
        &cx * &cx + &cy * &cy
    }
}

/// Which of the two tube-set conventions a scan uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Unit torus, integer vectors, ball of radius `A^-2` removed.
    K,
    /// Torus `A_tilde T^2`, rational vectors, ball of radius `A^-1` removed.
    Ktilde,
}

/// Planes `{beta : V . beta in (1/r) Z}` thickened by `2^-(C1 s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TubeFamily {
    pub v: (BigInt, BigInt),
    pub r: u64,
    pub s: u32,
    pub c1: u32,
}

impl TubeFamily {
    pub fn new(v: (BigInt, BigInt), r: u64, s: u32, c1: u32) -> Result<Self> {
        if s >= 63 || r < 1 << s || r >= 1 << (s + 1) {
            return Err(invalid(format!("r = {r} is not in [2^{s}, 2^{})", s + 1)));
        }
        if v.0.is_zero() && v.1.is_zero() {
            return Err(invalid("tube direction must be nonzero"));
        }
        // Tubes of adjacent planes must not touch: 2 * 2^-(C1 s) < 1/r.
        let e = c1 as u64 * s as u64;
        if e < 127 && 2 * r as u128 >= 1u128 << e {
            return Err(invalid(format!(
                "thickness 2^-{e} is not below half the plane spacing 1/{r}"
            )));
        }
        Ok(TubeFamily { v, r, s, c1 })
    }

    /// `C1 s`, the thickness exponent.
    pub fn thickness_exp(&self) -> usize {
        self.c1 as usize * self.s as usize
    }

    /// Exact closed membership, ignoring the excluded ball.
    pub fn contains(&self, p: &Point) -> bool {
        // X = r (V . beta) * d; nearest plane index b = round(X / d).
        let r = BigInt::from(self.r);
        let x = (&self.v.0 * &p.x + &self.v.1 * &p.y) * &r;
        let b = round_div(&x, &p.d);
        let gap = (x - b * &p.d).abs();
        // |r V.beta - b| <= r 2^-(C1 s)  <=>  gap 2^(C1 s) <= r d
        (gap << self.thickness_exp()) <= r * &p.d
    }
}

/// Nearest integer to `a / b` (`b > 0`), ties rounded down.
pub(crate) fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let (q, _) = (a * &two + b).div_mod_floor(&(b * &two));
    q
}

/// Exact membership of `beta` in the tube set of `fam`.
pub fn tube_membership(beta: &Point, fam: &TubeFamily) -> bool {
    fam.contains(beta)
}

pub(crate) fn floor_rat(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

pub(crate) fn ceil_rat(r: &BigRational) -> BigInt {
    r.ceil().to_integer()
}
