//! Sampled and exhaustive checks of the lemma-level identities and of `𝔎 = k`.
//!
//! Sample `i` of check `c` draws from a ChaCha stream keyed by `(seed, c, i)`, so the
//! outcome does not depend on how samples are scheduled across threads. A sample
//! whose translation numbers cannot be certified is skipped, never failed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cohomology::{h1_classify, is_coboundary, CoboundaryTest, Cochain, H1Classification};
use crate::pipeline::{EulerContext, PipelineError, Result};
use crate::rational::Rational;
use crate::rotation::{chi_int_of_lifts, chi_of_lifts, frac_b, RotationError};
use crate::schreier::SchreierData;
use crate::words::{numbered_names, Letter, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyParams {
    pub samples: usize,
    pub seed: u64,
    pub max_word_len: usize,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams { samples: 200, seed: 42, max_word_len: 8 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub verdict: Verdict,
    pub witness: Option<Value>,
    pub evaluated: usize,
    pub skipped: usize,
}

impl CheckOutcome {
    fn exhaustive(name: &str, failure: Option<Value>) -> Self {
        CheckOutcome {
            name: name.to_string(),
            verdict: if failure.is_some() { Verdict::Fail } else { Verdict::Pass },
            witness: failure,
            evaluated: 1,
            skipped: 0,
        }
    }

    fn error(name: &str, e: &PipelineError) -> Self {
        CheckOutcome::exhaustive(name, Some(json!({ "error": e.to_string() })))
    }
}

/// The RNG for sample `index` of check `check`.
pub fn sample_rng(seed: u64, check: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((check << 32) | index);
    rng
}

/// A reduced word of length uniform in `0..=max_len`.
pub fn random_word<R: Rng>(rng: &mut R, generators: usize, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    while letters.len() < len {
        let l = Letter::from_rank(rng.gen_range(0..2 * generators));
        if letters.last() != Some(&l.inv()) {
            letters.push(l);
        }
    }
    Word::from_letters(letters)
}

/// `w s(p(w))⁻¹` for a random word `w`; an element of `K`.
pub fn random_kernel_word<R: Rng>(rng: &mut R, schreier: &SchreierData, max_len: usize) -> Word {
    let w = random_word(rng, schreier.quotient().num_generators(), max_len);
    let q = schreier.quotient().image(&w);
    w.multiply(&schreier.transversal(q).inverse())
}

enum Sample {
    Pass,
    Skip,
    Fail(Value),
}

fn check(ok: bool, witness: impl FnOnce() -> Value) -> Sample {
    if ok {
        Sample::Pass
    } else {
        Sample::Fail(witness())
    }
}

/// Runs a sampled check and merges the results in sample order.
fn run_sampled<F>(name: &str, id: u64, params: &VerifyParams, f: F) -> CheckOutcome
where
    F: Fn(&mut ChaCha8Rng) -> Result<Sample> + Sync,
{
    let results: Vec<Sample> = (0..params.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(params.seed, id, i as u64);
            match f(&mut rng) {
                Ok(s) => s,
                Err(PipelineError::Rotation(RotationError::IndeterminateTau)) => Sample::Skip,
                Err(e) => Sample::Fail(json!({ "error": e.to_string() })),
            }
        })
        .collect();
    let skipped = results.iter().filter(|s| matches!(s, Sample::Skip)).count();
    let failure = results.into_iter().enumerate().find_map(|(i, s)| match s {
        Sample::Fail(mut w) => {
            if let Value::Object(m) = &mut w {
                m.insert("sample".into(), json!(i));
            }
            Some(w)
        }
        _ => None,
    });
    let evaluated = params.samples - skipped;
    let verdict = match (&failure, evaluated) {
        (Some(_), _) => Verdict::Fail,
        (None, 0) if params.samples > 0 => Verdict::Skip,
        _ => Verdict::Pass,
    };
    CheckOutcome { name: name.to_string(), verdict, witness: failure, evaluated, skipped }
}

/// Renders words for witnesses.
struct Namer {
    g: Vec<String>,
    k: Vec<String>,
}

impl Namer {
    fn g(&self, w: &Word) -> String {
        w.display(&self.g).to_string()
    }

    fn k(&self, w: &Word) -> String {
        w.display(&self.k).to_string()
    }
}

/// Verification of one scenario under one lift.
pub struct Verifier<'a> {
    ctx: &'a EulerContext,
    params: VerifyParams,
    names: Namer,
}

#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub checks: Vec<CheckOutcome>,
    pub crossed_hom: Option<Cochain>,
    pub h1: Option<H1Classification>,
}

impl TheoremReport {
    pub fn skipped(&self) -> usize {
        self.checks.iter().map(|c| c.skipped).sum()
    }

    /// No failures, and under `strict` no skipped samples either.
    pub fn passed(&self, strict: bool) -> bool {
        self.checks
            .iter()
            .all(|c| c.verdict != Verdict::Fail && !(strict && (c.skipped > 0 || c.verdict == Verdict::Skip)))
    }
}

impl<'a> Verifier<'a> {
    pub fn new(ctx: &'a EulerContext, params: VerifyParams, generator_names: &[String]) -> Self {
        let names = Namer { g: generator_names.to_vec(), k: numbered_names("x", ctx.schreier().rank()) };
        Verifier { ctx, params, names }
    }

    fn n(&self) -> usize {
        self.ctx.action().num_generators()
    }

    fn word(&self, rng: &mut ChaCha8Rng) -> Word {
        random_word(rng, self.n(), self.params.max_word_len)
    }

    fn kernel_word(&self, rng: &mut ChaCha8Rng) -> Word {
        random_kernel_word(rng, self.ctx.schreier(), self.params.max_word_len)
    }

    // a random element of K written in the Schreier generators
    fn k_word(&self, rng: &mut ChaCha8Rng) -> Result<Word> {
        Ok(self.ctx.schreier().rewrite(&self.kernel_word(rng))?)
    }

    /// `k` by translation gaps agrees with `k` by translation numbers.
    pub fn gap_vs_tau(&self) -> CheckOutcome {
        run_sampled("k_gap_equals_tau", 1, &self.params, |rng| {
            let (g, x) = (self.word(rng), self.k_word(rng)?);
            let gap = self.ctx.k_eval_gap(&g, &x)?;
            let t = self.ctx.k_eval_tau(&g, &x)?;
            Ok(check(gap == t, || json!({ "gamma": self.names.g(&g), "x": self.names.k(&x), "gap": gap, "tau": t })))
        })
    }

    /// The gap does not depend on which lift of `ρ(γ)` conjugates.
    pub fn gap_lift_choice(&self) -> CheckOutcome {
        run_sampled("k_gap_lift_choice", 2, &self.params, |rng| {
            let (g, x) = (self.word(rng), self.k_word(rng)?);
            let m: i64 = rng.gen_range(-3..=3);
            let l = self.ctx.action().global_lift(&g)?.shift(&m.into());
            let a = self.ctx.k_eval_gap(&g, &x)?;
            let b = self.ctx.k_eval_gap_with_lift(&g, &x, &l)?;
            Ok(check(
                a == b,
                || json!({ "gamma": self.names.g(&g), "x": self.names.k(&x), "shift": m, "values": [a, b] }),
            ))
        })
    }

    /// `k(γ) = 0` for `γ ∈ K`.
    pub fn trivial_on_kernel(&self) -> CheckOutcome {
        run_sampled("k_trivial_on_kernel", 3, &self.params, |rng| {
            let (g, x) = (self.kernel_word(rng), self.k_word(rng)?);
            let v = self.ctx.k_eval_gap(&g, &x)?;
            Ok(check(v == 0, || json!({ "gamma": self.names.g(&g), "x": self.names.k(&x), "value": v })))
        })
    }

    /// `k(γ)(xy) = k(γ)(x) + k(γ)(y)`.
    pub fn additivity(&self) -> CheckOutcome {
        run_sampled("k_additivity", 4, &self.params, |rng| {
            let (g, x, y) = (self.word(rng), self.k_word(rng)?, self.k_word(rng)?);
            let xy = self.ctx.k_eval_gap(&g, &x.multiply(&y))?;
            let sum = self.ctx.k_eval_gap(&g, &x)? + self.ctx.k_eval_gap(&g, &y)?;
            Ok(check(
                xy == sum,
                || json!({ "gamma": self.names.g(&g), "x": self.names.k(&x), "y": self.names.k(&y), "values": [xy, sum] }),
            ))
        })
    }

    /// `χ_Z` takes values in `{-1, 0, 1}`.
    pub fn chi_z_range(&self) -> CheckOutcome {
        run_sampled("chi_z_range", 5, &self.params, |rng| {
            let (f, g) = (self.word(rng), self.word(rng));
            let v = self.ctx.chi_z(&f, &g)?;
            Ok(check((-1..=1).contains(&v), || json!({ "g1": self.names.g(&f), "g2": self.names.g(&g), "value": v })))
        })
    }

    /// `δ(ρ*χ_Z) = 0`.
    pub fn chi_z_cocycle(&self) -> CheckOutcome {
        run_sampled("chi_z_cocycle", 6, &self.params, |rng| {
            let (f, g, h) = (self.word(rng), self.word(rng), self.word(rng));
            let c = |a: &Word, b: &Word| self.ctx.chi_z(a, b);
            let d = c(&g, &h)? - c(&f.multiply(&g), &h)? + c(&f, &g.multiply(&h))? - c(&f, &g)?;
            Ok(check(
                d == 0,
                || json!({ "g1": self.names.g(&f), "g2": self.names.g(&g), "g3": self.names.g(&h), "value": d }),
            ))
        })
    }

    /// `χ − χ_Z` is the coboundary of `b = τ − ⌊τ⌋`: `χ(f, g) = χ_Z(f, g) − δb(f, g)`
    /// with `δb(f, g) = b(g) − b(fg) + b(f)`, also under random lift shifts.
    pub fn chi_decomposition(&self) -> CheckOutcome {
        run_sampled("chi_decomposition", 7, &self.params, |rng| {
            let (f, g) = (self.word(rng), self.word(rng));
            let budget = self.ctx.budget();
            let (m1, m2): (i64, i64) = (rng.gen_range(-2..=2), rng.gen_range(-2..=2));
            let lf = self.ctx.action().evaluate(&f)?.lift().shift(&m1.into());
            let lg = self.ctx.action().evaluate(&g)?.lift().shift(&m2.into());
            let chi = chi_of_lifts(&lf, &lg, budget)?;
            let chi_z = chi_int_of_lifts(&lf, &lg, budget)?;
            let b = |l: &crate::pl::LiftPL| frac_b(l, budget);
            let db = b(&lg)? - b(&lf.compose(&lg))? + b(&lf)?;
            let ok = chi == Rational::from_integer(chi_z.into()) - db && chi_z == self.ctx.chi_z(&f, &g)?;
            Ok(check(
                ok,
                || json!({ "g1": self.names.g(&f), "g2": self.names.g(&g), "chi": chi.to_string(), "chiZ": chi_z }),
            ))
        })
    }

    /// `(ρ*χ_Z + δb)(γ, y) = 0` for `y ∈ K`.
    pub fn vanishing_on_kernel(&self) -> CheckOutcome {
        run_sampled("corrected_vanishes_on_kernel", 8, &self.params, |rng| {
            let (g, y) = (self.word(rng), self.kernel_word(rng));
            let v = self.ctx.corrected_cocycle(&g, &y)?;
            Ok(check(v == 0, || json!({ "gamma": self.names.g(&g), "y": self.names.g(&y), "value": v })))
        })
    }

    /// `(ρ*χ_Z + δb)(γ₁, γ₂ y) = (ρ*χ_Z + δb)(γ₁, γ₂)` for `y ∈ K`.
    pub fn filtration(&self) -> CheckOutcome {
        run_sampled("corrected_in_a1", 9, &self.params, |rng| {
            let (g1, g2, y) = (self.word(rng), self.word(rng), self.kernel_word(rng));
            let a = self.ctx.corrected_cocycle(&g1, &g2.multiply(&y))?;
            let b = self.ctx.corrected_cocycle(&g1, &g2)?;
            Ok(check(
                a == b,
                || json!({ "g1": self.names.g(&g1), "g2": self.names.g(&g2), "y": self.names.g(&y), "values": [a, b] }),
            ))
        })
    }

    /// `ρ*χ_Z(x, γ) = ρ*χ_Z(γ, γ⁻¹ x γ)` for `x ∈ K`.
    pub fn conjugation_cancellation(&self) -> CheckOutcome {
        run_sampled("chi_z_conjugation_cancellation", 10, &self.params, |rng| {
            let (x, g) = (self.kernel_word(rng), self.word(rng));
            let a = self.ctx.chi_z(&x, &g)?;
            let b = self.ctx.chi_z(&g, &x.conjugate(&g))?;
            Ok(check(a == b, || json!({ "x": self.names.g(&x), "gamma": self.names.g(&g), "values": [a, b] })))
        })
    }

    /// `δb(x, γ) − δb(γ, γ⁻¹xγ) = ⌊τ(ρ̃(x))⌋ − ⌊τ(ρ̃(γ⁻¹xγ))⌋ = k(γ)(x)` for `x ∈ K`.
    pub fn delta_b_identity(&self) -> CheckOutcome {
        run_sampled("delta_b_identity", 11, &self.params, |rng| {
            let (x, g) = (self.kernel_word(rng), self.word(rng));
            let b = |w: &Word| self.ctx.b_rho(w);
            let conj = x.conjugate(&g);
            let db = |u: &Word, v: &Word| -> Result<i64> { Ok(b(v)? - b(&u.multiply(v))? + b(u)?) };
            let lhs = db(&x, &g)? - db(&g, &conj)?;
            let floors = self.ctx.a_rho(&x)? - self.ctx.a_rho(&conj)?;
            let k = self.ctx.k_eval_gap(&g, &self.ctx.schreier().rewrite(&x)?)?;
            Ok(check(
                lhs == floors && floors == k,
                || json!({ "x": self.names.g(&x), "gamma": self.names.g(&g), "values": [lhs, floors, k] }),
            ))
        })
    }

    pub fn lemma_checks(&self) -> Vec<CheckOutcome> {
        vec![self.gap_vs_tau(), self.gap_lift_choice(), self.trivial_on_kernel(), self.additivity()]
    }

    pub fn cocycle_checks(&self) -> Vec<CheckOutcome> {
        vec![self.chi_z_range(), self.chi_z_cocycle(), self.chi_decomposition()]
    }

    /// Everything: the lemma suite, the Euler cocycle identities, membership of the
    /// corrected cocycle in `A₁`, `𝔎 = k` entrywise, and the class of `k`.
    pub fn verify_theorem(&self) -> TheoremReport {
        let mut checks = self.lemma_checks();
        checks.extend(self.cocycle_checks());
        checks.push(self.vanishing_on_kernel());
        checks.push(self.filtration());
        checks.push(self.conjugation_cancellation());
        checks.push(self.delta_b_identity());

        let k = match self.ctx.build_crossed_hom() {
            Ok(k) => {
                checks.push(CheckOutcome::exhaustive("crossed_hom_identity", None));
                Some(k)
            }
            Err(e @ PipelineError::NotCrossedHom { q1, q2 }) => {
                checks.push(CheckOutcome::exhaustive(
                    "crossed_hom_identity",
                    Some(json!({ "q1": q1, "q2": q2, "error": e.to_string() })),
                ));
                None
            }
            Err(e) => {
                checks.push(CheckOutcome::error("crossed_hom_identity", &e));
                None
            }
        };
        let mut h1 = None;
        if let Some(k) = &k {
            checks.push(match self.ctx.frak_k() {
                Ok(frak) => CheckOutcome::exhaustive("frak_k_equals_k", first_difference(&frak, k)),
                Err(PipelineError::Rotation(_)) => CheckOutcome {
                    name: "frak_k_equals_k".into(),
                    verdict: Verdict::Skip,
                    witness: None,
                    evaluated: 0,
                    skipped: 1,
                },
                Err(e) => CheckOutcome::error("frak_k_equals_k", &e),
            });
            checks.push(match self.ctx.predicted_crossed_hom() {
                Ok(p) => CheckOutcome::exhaustive("k_equals_global_lift_coboundary", first_difference(&p, k)),
                Err(e) => CheckOutcome::error("k_equals_global_lift_coboundary", &e),
            });
            match h1_classify(std::slice::from_ref(k), self.ctx.module()) {
                Ok(c) => {
                    checks.push(CheckOutcome::exhaustive("h1_class", None));
                    h1 = Some(c);
                }
                Err(e) => checks.push(CheckOutcome::error("h1_class", &e.into())),
            }
        }
        TheoremReport { checks, crossed_hom: k, h1 }
    }
}

fn first_difference(a: &Cochain, b: &Cochain) -> Option<Value> {
    a.rows().iter().zip(b.rows()).enumerate().find_map(|(q, (x, y))| {
        x.iter().zip(y).position(|(u, v)| u != v).map(|i| json!({ "q": q, "i": i, "values": [x[i], y[i]] }))
    })
}

/// Result of comparing the crossed homomorphisms of two lifts.
#[derive(Debug, Clone)]
pub struct LiftComparison {
    pub k1: Cochain,
    pub k2: Cochain,
    /// `μ_i = τ(ρ̃₁(x_i)) − τ(ρ̃₂(x_i))`.
    pub mu: Vec<i64>,
    pub coboundary: CoboundaryTest,
    /// `k₁ − k₂ = μ − ᵞμ = δ(−μ)`.
    pub predicted_matches: bool,
    /// The solver's witness differs from `−μ` by a `Q`-invariant vector.
    pub witness_matches: bool,
}

impl LiftComparison {
    pub fn passed(&self) -> bool {
        self.coboundary.is_yes() && self.predicted_matches && self.witness_matches
    }
}

pub fn lift_independence_check(ctx: &EulerContext, offsets1: &[i64], offsets2: &[i64]) -> Result<LiftComparison> {
    let c1 = ctx.with_offsets(offsets1)?;
    let c2 = ctx.with_offsets(offsets2)?;
    let k1 = c1.build_crossed_hom()?;
    let k2 = c2.build_crossed_hom()?;
    let mu = c1.offset_difference(&c2);
    let m = ctx.module();
    let diff = k1.sub(&k2);
    let coboundary = is_coboundary(&diff, m)?;
    let minus_mu: Vec<i64> = mu.iter().map(|v| -v).collect();
    let delta_of = |v: &[i64]| -> Vec<Vec<i64>> { (0..m.order()).map(|q| sub(&m.act(q, v), v)).collect() };
    let predicted_matches = delta_of(&minus_mu) == diff.rows();
    let witness_matches = match &coboundary {
        CoboundaryTest::Yes(w) => {
            let d = sub(w, &minus_mu);
            (0..m.order()).all(|q| m.act(q, &d) == d)
        }
        CoboundaryTest::No => false,
    };
    Ok(LiftComparison { k1, k2, mu, coboundary, predicted_matches, witness_matches })
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}
