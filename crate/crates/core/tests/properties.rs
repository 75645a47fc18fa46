//! Property tests for the invariants of each module. Random structures are drawn
//! from seeded ChaCha streams so failures shrink to a single seed.

mod common;

use circle_euler::cohomology::{delta, h1_classify, is_coboundary, Cochain, QModule};
use circle_euler::pipeline::conjugation_module;
use circle_euler::pl::{CirclePL, LiftPL};
use circle_euler::quotient::{GroupTable, Perm, QuotientMap};
use circle_euler::rational::{int, ratio, Rational};
use circle_euler::rotation::{chi_int_of_lifts, chi_of_lifts, tau, TauResult};
use circle_euler::scenario::ActionScenario;
use circle_euler::schreier::SchreierData;
use circle_euler::verify::{random_kernel_word, random_word, sample_rng, VerifyParams};
use circle_euler::words::{CircleAction, Word};
use num_bigint::BigInt;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const BUDGET: u64 = 4096;

fn rng(seed: u64) -> ChaCha8Rng {
    sample_rng(seed, 99, 0)
}

fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    ratio(rng.gen_range(-200..=200), rng.gen_range(1..=24))
}

fn random_quotient<R: Rng>(rng: &mut R, generators: usize, max_degree: usize) -> QuotientMap {
    let degree = rng.gen_range(1..=max_degree);
    let perms = (0..generators)
        .map(|_| {
            let mut img: Vec<usize> = (0..degree).collect();
            img.shuffle(rng);
            Perm::from_images(img).unwrap()
        })
        .collect();
    QuotientMap::new(degree, perms).unwrap()
}

fn random_cochain<R: Rng>(rng: &mut R, degree: usize, m: &QModule) -> Cochain {
    let e = m.group().identity();
    Cochain::from_fn(degree, m.group(), m.rank(), |args| {
        if args.contains(&e) {
            vec![0; m.rank()]
        } else {
            (0..m.rank()).map(|_| rng.gen_range(-4..=4)).collect()
        }
    })
    .unwrap()
}

fn negation_module() -> QModule {
    QModule::new(GroupTable::cyclic(2), 1, vec![vec![vec![1]], vec![vec![-1]]]).unwrap()
}

fn random_module<R: Rng>(rng: &mut R) -> QModule {
    if rng.gen_bool(0.2) {
        return negation_module();
    }
    let s = SchreierData::build(random_quotient(rng, 2, 3));
    conjugation_module(&s)
}

fn exact(f: &LiftPL) -> Option<Rational> {
    tau(f, BUDGET).exact().cloned()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eval_commutes_with_unit_translation(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = common::random_map(&mut r);
        let x = random_rational(&mut r);
        prop_assert_eq!(f.eval(&(&x + int(1))), f.eval(&x) + int(1));
        prop_assert_eq!(f.eval_inverse(&f.eval(&x)), x);
    }

    #[test]
    fn compose_with_inverse_is_identity(seed in any::<u64>()) {
        let f = common::random_map(&mut rng(seed));
        prop_assert!(f.compose(&f.inverse()).is_identity());
        prop_assert!(f.inverse().compose(&f).is_identity());
    }

    #[test]
    fn compose_is_associative_and_pointwise(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (f, g, h) = (common::random_map(&mut r), common::random_map(&mut r), common::random_map(&mut r));
        prop_assert_eq!(f.compose(&g).compose(&h), f.compose(&g.compose(&h)));
        let x = random_rational(&mut r);
        prop_assert_eq!(f.compose(&g).eval(&x), f.eval(&g.eval(&x)));
    }

    #[test]
    fn canonical_form_is_idempotent_and_pointwise(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = common::random_map(&mut r);
        // refine by extra collinear breakpoints, then canonicalize again
        let mut raw = f.breakpoints().to_vec();
        for _ in 0..3 {
            let x = ratio(r.gen_range(0..48), 48);
            raw.push((x.clone(), f.eval(&x)));
        }
        raw.sort();
        raw.dedup();
        let again = LiftPL::new(raw).unwrap();
        prop_assert_eq!(&again, &f);
        prop_assert_eq!(LiftPL::new(f.breakpoints().to_vec()).unwrap(), f.clone());
        // equality agrees with pointwise equality on the union of breakpoints
        let g = common::random_map(&mut r);
        let mut xs: Vec<Rational> = f.breakpoints().iter().chain(g.breakpoints()).map(|p| p.0.clone()).collect();
        xs.sort();
        let pointwise = xs.iter().all(|x| f.eval(x) == g.eval(x));
        prop_assert_eq!(pointwise, f == g);
    }

    #[test]
    fn translation_gap_is_additive(a in -1000i64..1000, b in -1000i64..1000) {
        let t = LiftPL::translation(a).compose(&LiftPL::translation(b));
        prop_assert_eq!(t.translation_gap(), Some(BigInt::from(a + b)));
    }

    #[test]
    fn tau_shifts_under_translation(seed in any::<u64>(), m in -20i64..20) {
        let f = common::random_map(&mut rng(seed));
        if let Some(t) = exact(&f) {
            prop_assert_eq!(exact(&f.compose(&LiftPL::translation(m))), Some(t + int(m)));
        }
    }

    #[test]
    fn tau_is_conjugation_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (f, g) = (common::random_map(&mut r), common::random_map(&mut r));
        if let Some(t) = exact(&f) {
            if let Some(u) = exact(&g.inverse().compose(&f).compose(&g)) {
                prop_assert_eq!(u, t);
            }
        }
    }

    #[test]
    fn quasimorphism_defect_below_one(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (f, g) = (common::random_map(&mut r), common::random_map(&mut r));
        if let Ok(chi) = chi_of_lifts(&f, &g, BUDGET) {
            prop_assert!(chi < int(1) && chi > int(-1));
        }
    }

    #[test]
    fn chi_is_independent_of_lifts(seed in any::<u64>(), m in -5i64..5, n in -5i64..5) {
        let mut r = rng(seed);
        let (f, g) = (common::random_map(&mut r), common::random_map(&mut r));
        let (fm, gn) = (f.compose(&LiftPL::translation(m)), g.compose(&LiftPL::translation(n)));
        prop_assert_eq!(chi_int_of_lifts(&f, &g, BUDGET).unwrap(), chi_int_of_lifts(&fm, &gn, BUDGET).unwrap());
        prop_assert_eq!(chi_of_lifts(&f, &g, BUDGET).ok(), chi_of_lifts(&fm, &gn, BUDGET).ok());
    }

    #[test]
    fn enclosures_contain_the_exact_value(seed in any::<u64>()) {
        let f = common::random_map(&mut rng(seed));
        if let Some(t) = exact(&f) {
            for budget in [1, 2, 5, 16, 64, 256] {
                let r = tau(&f, budget);
                prop_assert!(r.contains(&t), "budget {}: {:?} misses {}", budget, r, t);
                if let TauResult::Enclosure { lo, hi } = r {
                    prop_assert!(lo <= hi);
                }
            }
        }
    }

    #[test]
    fn words_form_a_group(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (u, v, w) = (random_word(&mut r, 3, 10), random_word(&mut r, 3, 10), random_word(&mut r, 3, 10));
        prop_assert_eq!(u.multiply(&v).multiply(&w), u.multiply(&v.multiply(&w)));
        prop_assert!(u.multiply(&u.inverse()).is_empty());
        prop_assert_eq!(u.multiply(&Word::empty()), u.clone());
        prop_assert_eq!(Word::from_letters(u.letters().iter().copied()), u.clone());
        prop_assert_eq!(u.pow(3).exponent_sum(0), 3 * u.exponent_sum(0));
    }

    #[test]
    fn evaluate_is_a_homomorphism(seed in any::<u64>()) {
        let mut r = rng(seed);
        let lifts: Vec<LiftPL> = (0..2).map(|_| common::random_map(&mut r)).collect();
        let action = CircleAction::from_lifts(&lifts);
        let (u, v) = (random_word(&mut r, 2, 6), random_word(&mut r, 2, 6));
        let uv: CirclePL = action.evaluate(&u.multiply(&v)).unwrap();
        prop_assert_eq!(uv, action.evaluate(&u).unwrap().compose(&action.evaluate(&v).unwrap()));
        let lift = action.global_lift(&u.multiply(&v)).unwrap();
        prop_assert_eq!(lift, action.global_lift(&u).unwrap().compose(&action.global_lift(&v).unwrap()));
    }

    #[test]
    fn schreier_rewriting_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let q = random_quotient(&mut r, n, 4);
        let order = q.order();
        let s = SchreierData::build(q);
        prop_assert_eq!(s.rank(), order * (n - 1) + 1);
        let y = random_kernel_word(&mut r, &s, 10);
        prop_assert_eq!(s.expand(&s.rewrite(&y).unwrap()), y);
        let gamma = random_word(&mut r, n, 10);
        let (p, x) = s.section_decompose(&gamma);
        prop_assert_eq!(s.transversal(p).multiply(&s.expand(&x)), gamma);
        for p in 0..order {
            for i in 0..s.rank() {
                let expected = s.k_generators()[i].conjugate(s.transversal(p));
                prop_assert_eq!(s.expand(&s.conj_action_word(p, i)), expected);
            }
        }
    }

    #[test]
    fn conjugation_matrices_ignore_the_coset_representative(seed in any::<u64>()) {
        // any element of the coset s(q)K gives the same action on Hom(K, Z)
        let mut r = rng(seed);
        let s = SchreierData::build(random_quotient(&mut r, 2, 4));
        let matrices = s.conjugation_matrices();
        for p in 0..s.quotient().order() {
            let y = random_kernel_word(&mut r, &s, 8);
            let rep = s.transversal(p).multiply(&y);
            for i in 0..s.rank() {
                let conj = s.rewrite(&s.k_generators()[i].conjugate(&rep)).unwrap();
                let row: Vec<i64> = (0..s.rank()).map(|j| conj.exponent_sum(j)).collect();
                prop_assert_eq!(&row, &matrices[p][i]);
            }
        }
    }

    #[test]
    fn delta_squared_vanishes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_module(&mut r);
        let v: Vec<i64> = (0..m.rank()).map(|_| r.gen_range(-5..=5)).collect();
        let c0 = Cochain::constant(v, m.order());
        let d0 = delta(&c0, &m).unwrap().into_cochain().unwrap();
        prop_assert!(delta(&d0, &m).unwrap().is_zero());
        let c1 = random_cochain(&mut r, 1, &m);
        let d1 = delta(&c1, &m).unwrap().into_cochain().unwrap();
        prop_assert!(delta(&d1, &m).unwrap().is_zero());
        // normalization is preserved by delta
        let e = m.group().identity();
        prop_assert!(Cochain::from_fn(2, m.group(), m.rank(), |a| d1.get(a).to_vec()).is_ok());
        let c2 = random_cochain(&mut r, 2, &m);
        let d2 = delta(&c2, &m).unwrap();
        let n = m.order();
        for a in 0..n {
            for b in 0..n {
                for args in [[e, a, b], [a, e, b], [a, b, e]] {
                    prop_assert!(d2.eval(&args).iter().all(|&x| x == 0));
                }
            }
        }
    }

    #[test]
    fn principal_crossed_homs_have_zero_class(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = random_module(&mut r);
        let v: Vec<i64> = (0..m.rank()).map(|_| r.gen_range(-5..=5)).collect();
        let k = delta(&Cochain::constant(v, m.order()), &m).unwrap().into_cochain().unwrap();
        prop_assert!(is_coboundary(&k, &m).unwrap().is_yes());
        let cls = h1_classify(&[k], &m).unwrap();
        prop_assert!(cls.classes[0].coordinates.iter().all(|&c| c == 0));
    }

    #[test]
    fn scenarios_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let q = random_quotient(&mut r, n, 3);
        let rank = SchreierData::build(q.clone()).rank();
        let s = ActionScenario {
            generators: ["a", "b", "c"][..n].iter().map(|x| x.to_string()).collect(),
            maps: (0..n).map(|_| common::random_map(&mut r)).collect(),
            degree: q.degree(),
            permutations: q.generator_images().to_vec(),
            offsets: r.gen_bool(0.5).then(|| (0..rank).map(|_| r.gen_range(-3..=3)).collect()),
            verify: VerifyParams { samples: r.gen_range(1..500), seed: r.gen_range(0..=i64::MAX as u64), max_word_len: r.gen_range(1..12) },
            tau_budget: r.gen_range(1..10_000),
        };
        let again = ActionScenario::parse(&s.emit()).unwrap();
        prop_assert_eq!(&again, &s);
        prop_assert_eq!(again.hash(), s.hash());
    }
}
