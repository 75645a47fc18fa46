//! The lifted action of `K`, the crossed homomorphism `k`, the correction cochains
//! `a` and `b`, the corrected Euler cocycle and the crossed homomorphism `𝔎` it
//! induces.
//!
//! `G` is free on the scenario generators, `Q = G/K` is finite and `K` is free on the
//! Schreier generators `x_1, ..., x_r`. The lift `ρ̃` of `ρ|_K` sends `x_i` to the
//! normalized lift of `ρ(x_i)` shifted by an integer offset and extends to `K` as a
//! homomorphism.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::cohomology::{delta, is_crossed_hom, Cochain, CohomologyError, CrossedHomCheck, QModule};
use crate::pl::LiftPL;
use crate::rational::Rational;
use crate::rotation::{euler_chi_int, tau, tau_floor, FloorResult, RotationError, TauResult};
use crate::schreier::{SchreierData, SchreierError};
use crate::words::{lift_word, CircleAction, Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PipelineError {
    #[error("{found} lift offsets given but K has rank {expected}")]
    OffsetCount { expected: usize, found: usize },
    #[error("conjugation defect is not an integer translation (γ = {gamma:?}, x = {x:?})")]
    GapNotIntegral { gamma: Word, x: Word },
    #[error("the table of k is not a crossed homomorphism at ({q1}, {q2})")]
    NotCrossedHom { q1: usize, q2: usize },
    #[error("k(s({q})) is not additive on x{i} x{j}")]
    NotAdditive { q: usize, i: usize, j: usize },
    #[error("integer value out of range")]
    Overflow,
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Rotation(#[from] RotationError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Schreier(#[from] SchreierError),
}

pub type Result<T> = std::result::Result<T, PipelineError>;

fn small(n: BigInt) -> Result<i64> {
    n.to_i64().ok_or(PipelineError::Overflow)
}

/// `Q` acting on `H¹(K; Z) = Z^r` by conjugation.
pub fn conjugation_module(schreier: &SchreierData) -> QModule {
    QModule::new(schreier.quotient().table().clone(), schreier.rank(), schreier.conjugation_matrices())
        .expect("conjugation is a left action")
}

/// Lifts of `ρ(x_i)` for the Schreier generators, extended to `K` as a homomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedKAction {
    lifts: Vec<LiftPL>,
    inverses: Vec<LiftPL>,
    offsets: Vec<i64>,
}

impl LiftedKAction {
    pub fn new(action: &CircleAction, schreier: &SchreierData, offsets: &[i64]) -> Result<Self> {
        if offsets.len() != schreier.rank() {
            return Err(PipelineError::OffsetCount { expected: schreier.rank(), found: offsets.len() });
        }
        let lifts = schreier
            .k_generators()
            .iter()
            .zip(offsets)
            .map(|(x, &m)| Ok(action.evaluate(x)?.lift().shift(&BigInt::from(m))))
            .collect::<Result<Vec<_>>>()?;
        let inverses = lifts.iter().map(LiftPL::inverse).collect();
        Ok(LiftedKAction { lifts, inverses, offsets: offsets.to_vec() })
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn generator_lift(&self, i: usize) -> &LiftPL {
        &self.lifts[i]
    }

    /// `ρ̃(x)` for a word `x` in the Schreier generators.
    pub fn eval(&self, k_word: &Word) -> Result<LiftPL> {
        Ok(lift_word(&self.lifts, &self.inverses, k_word)?)
    }
}

/// Everything needed to evaluate the constructions for one scenario and one lift.
#[derive(Debug, Clone)]
pub struct EulerContext {
    action: CircleAction,
    schreier: SchreierData,
    lifted: LiftedKAction,
    module: QModule,
    budget: u64,
}

impl EulerContext {
    pub fn new(action: CircleAction, schreier: SchreierData, offsets: &[i64], budget: u64) -> Result<Self> {
        let lifted = LiftedKAction::new(&action, &schreier, offsets)?;
        let module = conjugation_module(&schreier);
        Ok(EulerContext { action, schreier, lifted, module, budget })
    }

    /// The same scenario with different lift offsets.
    pub fn with_offsets(&self, offsets: &[i64]) -> Result<Self> {
        let lifted = LiftedKAction::new(&self.action, &self.schreier, offsets)?;
        Ok(EulerContext { lifted, ..self.clone() })
    }

    pub fn action(&self) -> &CircleAction {
        &self.action
    }

    pub fn schreier(&self) -> &SchreierData {
        &self.schreier
    }

    pub fn lifted(&self) -> &LiftedKAction {
        &self.lifted
    }

    pub fn module(&self) -> &QModule {
        &self.module
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    /// `ρ̃(rw(γ))` for `γ ∈ K`.
    pub fn lift_of_kernel_word(&self, gamma: &Word) -> Result<LiftPL> {
        self.lifted.eval(&self.schreier.rewrite(gamma)?)
    }

    /// `k(γ)(x)` as the integer `n` with `L⁻¹ ρ̃(x) L = ρ̃(γ⁻¹ x γ) Tⁿ`, where `L` lifts `ρ(γ)`.
    pub fn k_eval_gap(&self, gamma: &Word, x: &Word) -> Result<i64> {
        let l = self.action.global_lift(gamma)?;
        self.k_eval_gap_with_lift(gamma, x, &l)
    }

    /// As `k_eval_gap` with an explicit lift `l` of `ρ(γ)`.
    pub fn k_eval_gap_with_lift(&self, gamma: &Word, x: &Word, l: &LiftPL) -> Result<i64> {
        let conj = self.schreier.conjugate_k_word(x, gamma);
        let h = l.inverse().compose(&self.lifted.eval(x)?).compose(l).compose(&self.lifted.eval(&conj)?.inverse());
        match h.translation_gap() {
            Some(n) => small(n),
            None => Err(PipelineError::GapNotIntegral { gamma: gamma.clone(), x: x.clone() }),
        }
    }

    /// `k(γ)(x) = τ(ρ̃(x)) − τ(ρ̃(γ⁻¹ x γ))`.
    pub fn k_eval_tau(&self, gamma: &Word, x: &Word) -> Result<i64> {
        let conj = self.schreier.conjugate_k_word(x, gamma);
        let a = self.exact_tau(&self.lifted.eval(x)?)?;
        let b = self.exact_tau(&self.lifted.eval(&conj)?)?;
        let d = a - b;
        if !d.is_integer() {
            return Err(PipelineError::GapNotIntegral { gamma: gamma.clone(), x: x.clone() });
        }
        small(d.to_integer())
    }

    fn exact_tau(&self, f: &LiftPL) -> Result<Rational> {
        match tau(f, self.budget) {
            TauResult::Exact { value, .. } => Ok(value),
            TauResult::Enclosure { .. } => Err(RotationError::IndeterminateTau.into()),
        }
    }

    fn floor_tau(&self, f: &LiftPL) -> Result<i64> {
        match tau_floor(f, self.budget) {
            FloorResult::Determined(m) => small(m),
            FloorResult::Indeterminate(_) => Err(RotationError::IndeterminateTau.into()),
        }
    }

    /// The table `(q, i) ↦ k(s(q))(x_i)`, checked to be a crossed homomorphism and
    /// to be additive on pairs of Schreier generators.
    pub fn build_crossed_hom(&self) -> Result<Cochain> {
        let r = self.schreier.rank();
        let order = self.schreier.quotient().order();
        let gens: Vec<Word> = (0..r).map(Word::generator).collect();
        let rows = (0..order)
            .into_par_iter()
            .map(|q| {
                let t = self.schreier.transversal(q);
                gens.iter().map(|x| self.k_eval_gap(t, x)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        for q in 0..order {
            let t = self.schreier.transversal(q);
            for i in 0..r {
                for j in [i, (i + 1) % r] {
                    let xy = gens[i].multiply(&gens[j]);
                    if self.k_eval_gap(t, &xy)? != rows[q][i] + rows[q][j] {
                        return Err(PipelineError::NotAdditive { q, i, j });
                    }
                }
            }
        }
        let k = Cochain::from_rows(self.module.group(), rows)?;
        match is_crossed_hom(&k, &self.module)? {
            CrossedHomCheck::Holds => Ok(k),
            CrossedHomCheck::Violated { q1, q2 } => Err(PipelineError::NotCrossedHom { q1, q2 }),
        }
    }

    /// `ρ*χ_Z(γ₁, γ₂)`.
    pub fn chi_z(&self, g1: &Word, g2: &Word) -> Result<i64> {
        let f = self.action.evaluate(g1)?;
        let g = self.action.evaluate(g2)?;
        Ok(euler_chi_int(&f, &g, self.budget)?)
    }

    /// `⌊τ(ρ̃(γ))⌋` on `K`, zero elsewhere.
    pub fn a_rho(&self, gamma: &Word) -> Result<i64> {
        if !self.schreier.quotient().is_trivial_image(gamma) {
            return Ok(0);
        }
        self.floor_tau(&self.lift_of_kernel_word(gamma)?)
    }

    /// `⌊τ(ρ̃(γ))⌋` on `K`; `(ρ*χ_Z + δa)(s(p(γ)), x_γ)` elsewhere.
    pub fn b_rho(&self, gamma: &Word) -> Result<i64> {
        let (q, x) = self.schreier.section_decompose(gamma);
        if q == 0 {
            return self.a_rho(gamma);
        }
        let t = self.schreier.transversal(q);
        let x = self.schreier.expand(&x);
        let delta_a = self.a_rho(&x)? - self.a_rho(&t.multiply(&x))? + self.a_rho(t)?;
        Ok(self.chi_z(t, &x)? + delta_a)
    }

    /// `(ρ*χ_Z + δb)(γ₁, γ₂)`.
    pub fn corrected_cocycle(&self, g1: &Word, g2: &Word) -> Result<i64> {
        let db = self.b_rho(g2)? - self.b_rho(&g1.multiply(g2))? + self.b_rho(g1)?;
        Ok(self.chi_z(g1, g2)? + db)
    }

    /// `(q, i) ↦ (ρ*χ_Z + δb)(x_i, s(q))`.
    pub fn frak_k(&self) -> Result<Cochain> {
        let r = self.schreier.rank();
        let order = self.schreier.quotient().order();
        let rows = (0..order)
            .into_par_iter()
            .map(|q| {
                let t = self.schreier.transversal(q);
                (0..r).map(|i| self.corrected_cocycle(&self.schreier.k_generators()[i], t)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Cochain::from_rows(self.module.group(), rows)?)
    }

    /// `ν` with `ρ̃(x_i) = ρ̂(x_i) T^{ν_i}`, where `ρ̂` is the homomorphism lifting all of
    /// `ρ` that sends each generator of `G` to its normalized lift.
    ///
    /// `k` vanishes for `ρ̂`, so `k = δ(−ν)`.
    pub fn global_lift_offsets(&self) -> Result<Vec<i64>> {
        self.schreier
            .k_generators()
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let global = self.action.global_lift(x)?;
                let gap = self.lifted.generator_lift(i).compose(&global.inverse()).translation_gap();
                small(gap.expect("both lift the same circle map"))
            })
            .collect()
    }

    /// `μ_i = τ(ρ̃(x_i)) − τ(ρ̃'(x_i))`, read off exactly as a translation.
    pub fn offset_difference(&self, other: &EulerContext) -> Vec<i64> {
        (0..self.schreier.rank())
            .map(|i| {
                let d = self.lifted.generator_lift(i).compose(&other.lifted.generator_lift(i).inverse());
                d.translation_gap().and_then(|n| n.to_i64()).expect("both lift the same circle map")
            })
            .collect()
    }

    /// `δ(−ν)` for the offsets `ν` of `global_lift_offsets`.
    pub fn predicted_crossed_hom(&self) -> Result<Cochain> {
        let nu: Vec<i64> = self.global_lift_offsets()?.iter().map(|v| -v).collect();
        let c = Cochain::constant(nu, self.module.order());
        Ok(delta(&c, &self.module)?.into_cochain().expect("degree one"))
    }
}
