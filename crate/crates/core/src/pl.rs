//! Piecewise-linear lifts of circle homeomorphisms with rational data.
//!
//! A [`LiftPL`] is a homeomorphism `f` of the real line with `f(x + 1) = f(x) + 1`,
//! affine between finitely many breakpoints per unit interval. Lifts form a group
//! under composition which is closed under inversion, and every value produced here
//! is exact.
//!
//! Maps are stored in a canonical form: the breakpoint at `x = 0` is always present,
//! every other breakpoint in `(0, 1)` is a genuine change of slope. Two lifts are
//! equal as functions iff their canonical forms are structurally equal.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlError {
    #[error("breakpoint list is empty")]
    Empty,
    #[error("breakpoint x-coordinates must start at 0 and increase strictly inside [0, 1) (at index {index})")]
    BadDomain { index: usize },
    #[error("breakpoint y-values must increase strictly (at index {index})")]
    NonMonotone { index: usize },
    #[error("periodic extension is not a continuous increasing map across x = 1")]
    DiscontinuousWrap,
    #[error(transparent)]
    Rational(#[from] rational::RationalParseError),
    #[error("malformed breakpoint list: {0}")]
    Malformed(String),
}

/// A lift in the universal cover of the orientation-preserving circle homeomorphism group.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LiftPL {
    // (x, f(x)) with x strictly increasing in [0, 1), first x = 0, canonical.
    points: Vec<(Rational, Rational)>,
}

impl LiftPL {
    /// Validates a raw breakpoint list and returns the canonical lift.
    ///
    /// A trailing point at `x = 1` is accepted when it agrees with the periodic
    /// extension, and a single point `(0, y)` is the rigid translation `x ↦ x + y`.
    pub fn new(raw: Vec<(Rational, Rational)>) -> Result<Self, PlError> {
        let mut raw = raw;
        if raw.is_empty() {
            return Err(PlError::Empty);
        }
        if !raw[0].0.is_zero() {
            return Err(PlError::BadDomain { index: 0 });
        }
        let one = Rational::one();
        if raw.len() > 1 && raw.last().map(|p| p.0 == one).unwrap_or(false) {
            let (_, y_end) = raw.pop().expect("nonempty");
            if y_end != &raw[0].1 + &one {
                return Err(PlError::DiscontinuousWrap);
            }
        }
        for i in 1..raw.len() {
            if raw[i].0 <= raw[i - 1].0 || raw[i].0 >= one {
                return Err(PlError::BadDomain { index: i });
            }
            if raw[i].1 <= raw[i - 1].1 {
                return Err(PlError::NonMonotone { index: i });
            }
        }
        let last = &raw[raw.len() - 1].1;
        if *last >= &raw[0].1 + &one {
            return Err(PlError::DiscontinuousWrap);
        }
        Ok(Self::canonical(raw))
    }

    /// Parses pairs of rational strings such as `[["0","1/2"],["1/2","3/4"]]`.
    pub fn from_string_pairs<S: AsRef<str>>(pairs: &[[S; 2]]) -> Result<Self, PlError> {
        let raw = pairs
            .iter()
            .map(|[x, y]| Ok((rational::parse_rational(x.as_ref())?, rational::parse_rational(y.as_ref())?)))
            .collect::<Result<Vec<_>, PlError>>()?;
        Self::new(raw)
    }

    /// Parses the JSON serialization `[["x","y"], ...]`.
    pub fn from_json(text: &str) -> Result<Self, PlError> {
        let pairs: Vec<[String; 2]> = serde_json::from_str(text).map_err(|e| PlError::Malformed(e.to_string()))?;
        Self::from_string_pairs(&pairs)
    }

    pub fn to_string_pairs(&self) -> Vec<[String; 2]> {
        self.points.iter().map(|(x, y)| [rational::format_rational(x), rational::format_rational(y)]).collect()
    }

    pub fn identity() -> Self {
        Self::translation(BigInt::zero())
    }

    /// `T^m`, the translation by the integer `m`.
    pub fn translation(m: impl Into<BigInt>) -> Self {
        Self::rotation(Rational::from_integer(m.into()))
    }

    /// The rigid lift `x ↦ x + shift`.
    pub fn rotation(shift: Rational) -> Self {
        LiftPL { points: vec![(Rational::zero(), shift)] }
    }

    pub fn breakpoints(&self) -> &[(Rational, Rational)] {
        &self.points
    }

    pub fn num_breakpoints(&self) -> usize {
        self.points.len()
    }

    /// Total bit length of all breakpoint numerators and denominators.
    pub fn size_bits(&self) -> u64 {
        self.points.iter().flat_map(|(x, y)| [x, y]).map(|r| r.numer().bits() + r.denom().bits()).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.points.len() == 1 && self.points[0].1.is_zero()
    }

    // End of segment i, using the periodic wrap for the last one.
    fn segment_end(&self, i: usize) -> (Rational, Rational) {
        match self.points.get(i + 1) {
            Some(p) => p.clone(),
            None => (Rational::one(), &self.points[0].1 + Rational::one()),
        }
    }

    /// Slope on the segment starting at breakpoint `i`.
    pub fn slope(&self, i: usize) -> Rational {
        let (x0, y0) = &self.points[i];
        let (x1, y1) = self.segment_end(i);
        (y1 - y0) / (x1 - x0)
    }

    /// Exact value of the periodic extension at `x`.
    pub fn eval(&self, x: &Rational) -> Rational {
        let n = rational::floor(x);
        let u = x - Rational::from_integer(n.clone());
        let i = self.points.partition_point(|(px, _)| *px <= u) - 1;
        let (x0, y0) = &self.points[i];
        let (x1, y1) = self.segment_end(i);
        y0 + (&u - x0) * (y1 - y0) / (x1 - x0) + Rational::from_integer(n)
    }

    /// Exact value of the inverse map at `y`.
    pub fn eval_inverse(&self, y: &Rational) -> Rational {
        let base = &self.points[0].1;
        let k = rational::floor(&(y - base));
        let v = y - Rational::from_integer(k.clone());
        let i = self.points.partition_point(|(_, py)| *py <= v) - 1;
        let (x0, y0) = &self.points[i];
        let (x1, y1) = self.segment_end(i);
        x0 + (&v - y0) * (x1 - x0) / (y1 - y0) + Rational::from_integer(k)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LiftPL) -> LiftPL {
        let mut xs: Vec<Rational> = inner.points.iter().map(|(x, _)| x.clone()).collect();
        let g0 = &inner.points[0].1;
        for (bx, _) in &self.points {
            // the unique integer shift of bx landing in [g(0), g(0) + 1)
            let k = rational::ceil(&(g0 - bx));
            let target = bx + Rational::from_integer(k);
            xs.push(inner.eval_inverse(&target));
        }
        xs.sort();
        xs.dedup();
        let pts = xs
            .into_iter()
            .map(|x| {
                let y = self.eval(&inner.eval(&x));
                (x, y)
            })
            .collect();
        Self::canonical(pts)
    }

    pub fn inverse(&self) -> LiftPL {
        let mut xs: Vec<Rational> = self.points.iter().map(|(_, y)| rational::frac(y)).collect();
        xs.push(Rational::zero());
        xs.sort();
        xs.dedup();
        let pts = xs
            .into_iter()
            .map(|x| {
                let y = self.eval_inverse(&x);
                (x, y)
            })
            .collect();
        Self::canonical(pts)
    }

    /// `self^n` for any integer `n`, by repeated squaring.
    pub fn pow(&self, n: i64) -> LiftPL {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = LiftPL::identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose(&sq);
            }
        }
        acc
    }

    /// `self ∘ T^m`, which equals `T^m ∘ self`.
    pub fn shift(&self, m: &BigInt) -> LiftPL {
        let m = Rational::from_integer(m.clone());
        LiftPL { points: self.points.iter().map(|(x, y)| (x.clone(), y + &m)).collect() }
    }

    /// `Some(n)` when this lift is exactly `T^n`.
    pub fn translation_gap(&self) -> Option<BigInt> {
        match self.points.as_slice() {
            [(_, y)] if rational::is_integer(y) => Some(y.to_integer()),
            _ => None,
        }
    }

    /// Minimum and maximum of the displacement `f(x) - x` over one period.
    pub fn displacement_range(&self) -> (Rational, Rational) {
        let mut it = self.points.iter().map(|(x, y)| y - x);
        let first = it.next().expect("nonempty");
        it.fold((first.clone(), first), |(lo, hi), d| {
            let lo = if d < lo { d.clone() } else { lo };
            let hi = if d > hi { d } else { hi };
            (lo, hi)
        })
    }

    /// A point `x` in `[0, 1)` with `f(x) - x = level`, if one exists.
    pub fn displacement_root(&self, level: &Rational) -> Option<Rational> {
        for i in 0..self.points.len() {
            let (x0, y0) = &self.points[i];
            let (x1, y1) = self.segment_end(i);
            let d0 = y0 - x0 - level;
            let d1 = &y1 - &x1 - level;
            if d0.is_zero() {
                return Some(x0.clone());
            }
            if (d0 < Rational::zero()) != (d1 < Rational::zero()) && !d1.is_zero() {
                // d is affine on the segment: d0 + t (d1 - d0) = 0
                let t = &d0 / (&d0 - &d1);
                return Some(x0 + t * (x1 - x0));
            }
        }
        None
    }

    fn canonical(mut pts: Vec<(Rational, Rational)>) -> LiftPL {
        debug_assert!(pts.first().map(|p| p.0.is_zero()).unwrap_or(false));
        if pts.len() > 1 {
            let n = pts.len();
            let one = Rational::one();
            let end = (one.clone(), &pts[0].1 + &one);
            let slopes: Vec<Rational> = (0..n)
                .map(|i| {
                    let (x1, y1) = if i + 1 < n { (&pts[i + 1].0, &pts[i + 1].1) } else { (&end.0, &end.1) };
                    (y1 - &pts[i].1) / (x1 - &pts[i].0)
                })
                .collect();
            let keep: Vec<bool> = (0..n).map(|i| i == 0 || slopes[i - 1] != slopes[i]).collect();
            let mut k = keep.into_iter();
            pts.retain(|_| k.next().unwrap_or(true));
        }
        LiftPL { points: pts }
    }
}

impl fmt::Debug for LiftPL {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LiftPL{}", self)
    }
}

impl fmt::Display for LiftPL {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (x, y)) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({}, {})", rational::format_rational(x), rational::format_rational(y))?;
        }
        write!(f, "]")
    }
}

impl Serialize for LiftPL {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_string_pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LiftPL {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs = Vec::<[String; 2]>::deserialize(d)?;
        LiftPL::from_string_pairs(&pairs).map_err(serde::de::Error::custom)
    }
}

/// A circle homeomorphism, stored as its unique lift with `f(0) ∈ [0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CirclePL {
    lift: LiftPL,
}

impl CirclePL {
    /// Projects a lift to the circle; lifts differing by a power of `T` project equally.
    pub fn from_lift(lift: &LiftPL) -> Self {
        let m = rational::floor(&lift.points[0].1);
        CirclePL { lift: lift.shift(&-m) }
    }

    pub fn identity() -> Self {
        CirclePL { lift: LiftPL::identity() }
    }

    /// The normalized lift.
    pub fn lift(&self) -> &LiftPL {
        &self.lift
    }

    pub fn compose(&self, inner: &CirclePL) -> CirclePL {
        CirclePL::from_lift(&self.lift.compose(&inner.lift))
    }

    pub fn inverse(&self) -> CirclePL {
        CirclePL::from_lift(&self.lift.inverse())
    }

    pub fn is_identity(&self) -> bool {
        self.lift.is_identity()
    }
}

impl fmt::Display for CirclePL {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.lift.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn two_piece() -> LiftPL {
        LiftPL::new(vec![(int(0), int(0)), (ratio(1, 2), ratio(3, 4))]).unwrap()
    }

    #[test]
    fn validate_examples() {
        let rot = LiftPL::new(vec![(int(0), ratio(1, 2))]).unwrap();
        assert_eq!(rot, LiftPL::rotation(ratio(1, 2)));
        let f = two_piece();
        assert_eq!(f.slope(0), ratio(3, 2));
        assert_eq!(f.slope(1), ratio(1, 2));
        let bad = LiftPL::new(vec![(int(0), int(0)), (ratio(1, 2), ratio(1, 4)), (ratio(3, 4), ratio(1, 8))]);
        assert_eq!(bad, Err(PlError::NonMonotone { index: 2 }));
    }

    #[test]
    fn validate_errors() {
        assert_eq!(LiftPL::new(vec![]), Err(PlError::Empty));
        assert_eq!(LiftPL::new(vec![(ratio(1, 4), int(0))]), Err(PlError::BadDomain { index: 0 }));
        assert_eq!(
            LiftPL::new(vec![(int(0), int(0)), (ratio(1, 2), ratio(1, 4)), (ratio(1, 4), ratio(1, 2))]),
            Err(PlError::BadDomain { index: 2 })
        );
        assert_eq!(LiftPL::new(vec![(int(0), int(0)), (ratio(1, 2), ratio(3, 2))]), Err(PlError::DiscontinuousWrap));
        assert_eq!(LiftPL::new(vec![(int(0), int(0)), (int(1), ratio(3, 2))]), Err(PlError::DiscontinuousWrap));
        // an explicit endpoint matching the wrap is accepted and dropped
        let f = LiftPL::new(vec![(int(0), int(0)), (ratio(1, 2), ratio(3, 4)), (int(1), int(1))]).unwrap();
        assert_eq!(f, two_piece());
    }

    #[test]
    fn collinear_points_are_merged() {
        let f = LiftPL::new(vec![(int(0), ratio(1, 4)), (ratio(1, 2), ratio(3, 4))]).unwrap();
        assert_eq!(f, LiftPL::rotation(ratio(1, 4)));
    }

    #[test]
    fn eval_examples() {
        let rot = LiftPL::rotation(ratio(1, 2));
        assert_eq!(rot.eval(&ratio(1, 4)), ratio(3, 4));
        assert_eq!(rot.eval(&ratio(9, 4)), ratio(11, 4));
        assert_eq!(two_piece().eval(&ratio(1, 4)), ratio(3, 8));
        assert_eq!(two_piece().eval(&ratio(-3, 4)), ratio(-5, 8));
        assert_eq!(two_piece().eval_inverse(&ratio(3, 8)), ratio(1, 4));
    }

    #[test]
    fn compose_examples() {
        let rot = LiftPL::rotation(ratio(1, 2));
        assert_eq!(rot.compose(&rot), LiftPL::translation(1));
        let f = two_piece();
        assert_eq!(f.compose(&LiftPL::identity()), f);
        assert_eq!(LiftPL::identity().compose(&f), f);
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(LiftPL::rotation(ratio(1, 2)).inverse(), LiftPL::rotation(ratio(-1, 2)));
        assert_eq!(LiftPL::identity().inverse(), LiftPL::identity());
        let f = two_piece();
        let g = f.inverse();
        assert!(f.compose(&g).is_identity());
        assert!(g.compose(&f).is_identity());
        let mut slopes: Vec<Rational> = (0..g.num_breakpoints()).map(|i| g.slope(i)).collect();
        slopes.sort();
        assert_eq!(slopes, vec![ratio(2, 3), int(2)]);
    }

    #[test]
    fn translation_gap_examples() {
        assert_eq!(LiftPL::translation(3).translation_gap(), Some(BigInt::from(3)));
        assert_eq!(LiftPL::identity().translation_gap(), Some(BigInt::zero()));
        assert_eq!(two_piece().translation_gap(), None);
        assert_eq!(LiftPL::rotation(ratio(1, 2)).translation_gap(), None);
    }

    #[test]
    fn circle_normalization() {
        let f = two_piece();
        let shifted = f.shift(&BigInt::from(-4));
        assert_eq!(CirclePL::from_lift(&f), CirclePL::from_lift(&shifted));
        let half = CirclePL::from_lift(&LiftPL::rotation(ratio(1, 2)));
        assert!(half.compose(&half).is_identity());
    }

    #[test]
    fn displacement_root_finds_zero() {
        let f = two_piece();
        assert_eq!(f.displacement_range(), (int(0), ratio(1, 4)));
        assert_eq!(f.displacement_root(&int(0)), Some(int(0)));
        let x = f.displacement_root(&ratio(1, 8)).unwrap();
        assert_eq!(f.eval(&x) - &x, ratio(1, 8));
        assert_eq!(f.displacement_root(&int(1)), None);
    }

    #[test]
    fn string_pairs_round_trip() {
        let f = LiftPL::from_json(r#"[["0","0"],["0.5","3/4"]]"#).unwrap();
        assert_eq!(f, two_piece());
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"[["0","0"],["1/2","3/4"]]"#);
        assert_eq!(serde_json::from_str::<LiftPL>(&json).unwrap(), f);
    }
}
