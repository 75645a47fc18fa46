//! Translation numbers of PL lifts and the Euler cocycles built from them.
//!
//! `tau(f) = lim f^n(0) / n`. For a PL lift the value is certified exactly whenever it
//! is a rational `p/q` reachable within the iteration budget: `tau(f) = p/q` iff
//! `f^q - T^p` has a fixed point, and the sign of `f^q(x) - x - p` on one period
//! decides which side of `p/q` the translation number lies on. Candidates are
//! walked down the Stern–Brocot tree inside the current enclosure.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::pl::{CirclePL, LiftPL};
use crate::rational::{self, Rational};

pub const DEFAULT_BUDGET: u64 = 4096;
pub const DEFAULT_BREAKPOINT_CAP: usize = 512;
pub const DEFAULT_BIT_CAP: u64 = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RotationError {
    #[error("translation number not certified within the iteration budget")]
    IndeterminateTau,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TauResult {
    /// `witness` is a fixed point of `f^q ∘ T^{-p}` for `value = p/q` in lowest terms.
    Exact { value: Rational, witness: Rational },
    /// `lo <= tau <= hi`; the width is below `1/n` for the largest power `f^n`
    /// formed within the budget and size caps, plus outward rounding to `2^-64`.
    Enclosure { lo: Rational, hi: Rational },
}

impl TauResult {
    pub fn exact(&self) -> Option<&Rational> {
        match self {
            TauResult::Exact { value, .. } => Some(value),
            TauResult::Enclosure { .. } => None,
        }
    }

    pub fn bounds(&self) -> (Rational, Rational) {
        match self {
            TauResult::Exact { value, .. } => (value.clone(), value.clone()),
            TauResult::Enclosure { lo, hi } => (lo.clone(), hi.clone()),
        }
    }

    pub fn contains(&self, v: &Rational) -> bool {
        let (lo, hi) = self.bounds();
        lo <= *v && *v <= hi
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FloorResult {
    Determined(BigInt),
    Indeterminate(TauResult),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TauOptions {
    pub budget: u64,
    /// Powers of `f` with more breakpoints than this are not formed.
    pub breakpoint_cap: usize,
    /// Powers of `f` whose coordinates need more bits than this are not formed.
    pub bit_cap: u64,
}

impl TauOptions {
    pub fn with_budget(budget: u64) -> Self {
        TauOptions { budget: budget.max(1), breakpoint_cap: DEFAULT_BREAKPOINT_CAP, bit_cap: DEFAULT_BIT_CAP }
    }
}

impl Default for TauOptions {
    fn default() -> Self {
        TauOptions::with_budget(DEFAULT_BUDGET)
    }
}

// Outcome of examining the displacement of g = f^n.
enum Probe {
    // tau = p / n, with a fixed point of g ∘ T^{-p}
    Hit { p: BigInt, witness: Rational },
    // tau lies strictly between lo / n and hi / n, and no integer lies in [lo, hi]
    Bounds { lo: Rational, hi: Rational },
}

fn probe(g: &LiftPL) -> Probe {
    let (lo, hi) = g.displacement_range();
    // the displacement range of a lift is shorter than 1, so at most one integer fits
    let p = rational::ceil(&lo);
    if Rational::from_integer(p.clone()) <= hi {
        let level = Rational::from_integer(p.clone());
        let witness = g.displacement_root(&level).expect("intermediate value on a periodic PL function");
        Probe::Hit { p, witness }
    } else {
        Probe::Bounds { lo, hi }
    }
}

// Cached powers f^(2^j), built lazily up to the breakpoint cap.
struct Powers {
    squares: Vec<LiftPL>,
    cap: usize,
    bit_cap: u64,
    exhausted: bool,
}

impl Powers {
    fn new(f: &LiftPL, opts: &TauOptions) -> Self {
        Powers { squares: vec![f.clone()], cap: opts.breakpoint_cap, bit_cap: opts.bit_cap, exhausted: false }
    }

    fn too_big(&self, g: &LiftPL) -> bool {
        g.num_breakpoints() > self.cap || g.size_bits() > self.bit_cap
    }

    fn square(&mut self, j: usize) -> Option<&LiftPL> {
        while self.squares.len() <= j {
            if self.exhausted {
                return None;
            }
            let last = self.squares.last().expect("nonempty");
            let next = last.compose(last);
            if self.too_big(&next) {
                self.exhausted = true;
                return None;
            }
            self.squares.push(next);
        }
        Some(&self.squares[j])
    }

    fn power(&mut self, n: u64) -> Option<LiftPL> {
        let mut acc: Option<LiftPL> = None;
        let mut j = 0;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                let sq = self.square(j)?.clone();
                let next = match acc {
                    None => sq,
                    Some(a) => a.compose(&sq),
                };
                if self.too_big(&next) {
                    return None;
                }
                acc = Some(next);
            }
            e >>= 1;
            j += 1;
        }
        Some(acc.unwrap_or_else(LiftPL::identity))
    }
}

fn over(x: &Rational, n: u64) -> Rational {
    x / Rational::from_integer(BigInt::from(n))
}

const GRID_BITS: u32 = 48;
const REPORT_BITS: u32 = 64;

fn round_to_grid(x: &Rational, up: bool, bits: u32) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = x * Rational::from_integer(scale.clone());
    let k = if up { rational::ceil(&scaled) } else { rational::floor(&scaled) };
    Rational::new(k, scale)
}

fn frac_of(p: BigInt, q: u64) -> Rational {
    Rational::new(p, BigInt::from(q))
}

/// Translation number with the default breakpoint cap.
pub fn tau(f: &LiftPL, budget: u64) -> TauResult {
    tau_with(f, TauOptions::with_budget(budget))
}

pub fn tau_with(f: &LiftPL, opts: TauOptions) -> TauResult {
    let budget = opts.budget.max(1);
    let (mut lo, mut hi) = match probe(f) {
        Probe::Hit { p, witness } => return TauResult::Exact { value: Rational::from_integer(p), witness },
        Probe::Bounds { lo, hi } => (lo, hi),
    };
    let mut powers = Powers::new(f, &opts);

    // doubling: the displacement of f^n brackets n * tau
    let mut n: u64 = 1;
    let mut j = 0;
    while n.saturating_mul(2) <= budget {
        let Some(g) = powers.square(j + 1) else { break };
        n *= 2;
        j += 1;
        match probe(g) {
            Probe::Hit { p, witness } => return TauResult::Exact { value: frac_of(p, n), witness },
            Probe::Bounds { lo: l, hi: h } => {
                lo = lo.max(over(&l, n));
                hi = hi.min(over(&h, n));
            }
        }
    }

    // Evaluation-only orbit of the largest available power for the rest of the budget.
    // The orbit of 0 is tracked in an outward-rounded interval so sizes stay bounded;
    // a lift maps intervals shorter than 1 to intervals shorter than 1 plus rounding.
    if n < budget {
        let g = powers.squares[j].clone();
        let (mut a, mut b) = (Rational::zero(), Rational::zero());
        let mut steps = 0;
        let one = Rational::one();
        while steps + n <= budget {
            a = round_to_grid(&g.eval(&a), false, GRID_BITS);
            b = round_to_grid(&g.eval(&b), true, GRID_BITS);
            steps += n;
            lo = lo.max(over(&(&a - &one), steps));
            hi = hi.min(over(&(&b + &one), steps));
        }
    }

    // Stern–Brocot descent between consecutive integers
    let m = rational::floor(&lo);
    let (mut lp, mut lq) = (m.clone(), 1u64);
    let (mut rp, mut rq) = (m + BigInt::one(), 1u64);
    loop {
        let q = lq + rq;
        if q > budget {
            break;
        }
        let p: BigInt = &lp + &rp;
        let mediant = frac_of(p.clone(), q);
        if mediant < lo {
            lp = p;
            lq = q;
            continue;
        }
        if mediant > hi {
            rp = p;
            rq = q;
            continue;
        }
        let Some(g) = powers.power(q) else { break };
        match probe(&g) {
            Probe::Hit { p: hit, witness } => return TauResult::Exact { value: frac_of(hit, q), witness },
            Probe::Bounds { lo: l, hi: h } => {
                lo = lo.max(over(&l, q));
                hi = hi.min(over(&h, q));
                if h < Rational::from_integer(p.clone()) {
                    rp = p;
                    rq = q;
                } else {
                    lp = p;
                    lq = q;
                }
            }
        }
    }
    // outward rounding keeps the reported endpoints small
    TauResult::Enclosure { lo: round_to_grid(&lo, false, REPORT_BITS), hi: round_to_grid(&hi, true, REPORT_BITS) }
}

/// `⌊tau(f)⌋`.
///
/// The displacement range of `f` has length below one and brackets `tau(f)`; either
/// it contains an integer `k`, in which case `tau(f) = k`, or it pins the floor.
/// PL lifts therefore always give `Determined`.
pub fn tau_floor(f: &LiftPL, _budget: u64) -> FloorResult {
    match probe(f) {
        Probe::Hit { p, .. } => FloorResult::Determined(p),
        Probe::Bounds { lo, .. } => FloorResult::Determined(rational::floor(&lo)),
    }
}

fn floor_of(f: &LiftPL, budget: u64) -> Result<BigInt, RotationError> {
    match tau_floor(f, budget) {
        FloorResult::Determined(m) => Ok(m),
        FloorResult::Indeterminate(_) => Err(RotationError::IndeterminateTau),
    }
}

fn exact_tau(f: &LiftPL, budget: u64) -> Result<Rational, RotationError> {
    match tau(f, budget) {
        TauResult::Exact { value, .. } => Ok(value),
        TauResult::Enclosure { .. } => Err(RotationError::IndeterminateTau),
    }
}

/// `tau(f) - ⌊tau(f)⌋`, which only depends on the circle map.
pub fn frac_b(f: &LiftPL, budget: u64) -> Result<Rational, RotationError> {
    let t = exact_tau(f, budget)?;
    Ok(rational::frac(&t))
}

/// `tau(f̃ g̃) - tau(f̃) - tau(g̃)` for arbitrary lifts.
pub fn chi_of_lifts(f: &LiftPL, g: &LiftPL, budget: u64) -> Result<Rational, RotationError> {
    let fg = exact_tau(&f.compose(g), budget)?;
    Ok(fg - exact_tau(f, budget)? - exact_tau(g, budget)?)
}

/// `⌊tau(f̃ g̃)⌋ - ⌊tau(f̃)⌋ - ⌊tau(g̃)⌋` for arbitrary lifts.
pub fn chi_int_of_lifts(f: &LiftPL, g: &LiftPL, budget: u64) -> Result<i64, RotationError> {
    let v = floor_of(&f.compose(g), budget)? - floor_of(f, budget)? - floor_of(g, budget)?;
    Ok(v.to_i64().expect("Euler cocycle values are bounded"))
}

/// The canonical Euler cocycle.
pub fn euler_chi(f: &CirclePL, g: &CirclePL, budget: u64) -> Result<Rational, RotationError> {
    chi_of_lifts(f.lift(), g.lift(), budget)
}

/// The integral Euler cocycle, valued in `{-1, 0, 1}`.
pub fn euler_chi_int(f: &CirclePL, g: &CirclePL, budget: u64) -> Result<i64, RotationError> {
    chi_int_of_lifts(f.lift(), g.lift(), budget)
}
