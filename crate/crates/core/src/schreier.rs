//! Reidemeister–Schreier data for the kernel `K` of a finite quotient of a free group.
//!
//! The transversal is a shortlex breadth-first spanning tree of the Schreier graph,
//! so it is prefix closed and sends the identity to the empty word. Every non-tree
//! edge `(t, g)` gives a free generator `t g (overline{t g})⁻¹` of `K`; generators
//! are listed by transversal element first, then by generator index.

use std::collections::VecDeque;

use thiserror::Error;

use crate::quotient::QuotientMap;
use crate::words::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchreierError {
    #[error("word does not lie in the kernel (it maps to element {0})")]
    NotInKernel(usize),
}

#[derive(Debug, Clone)]
pub struct SchreierData {
    quotient: QuotientMap,
    transversal: Vec<Word>,
    k_generators: Vec<Word>,
    // edge_label[q][g]: Schreier generator for the edge (t_q, g), None on tree edges
    edge_label: Vec<Vec<Option<usize>>>,
}

impl SchreierData {
    pub fn build(quotient: QuotientMap) -> Self {
        let order = quotient.order();
        let n = quotient.num_generators();
        let table = quotient.table().clone();

        let mut transversal: Vec<Option<Word>> = vec![None; order];
        transversal[0] = Some(Word::empty());
        let mut bfs = Vec::with_capacity(order);
        let mut queue = VecDeque::from([0usize]);
        while let Some(q) = queue.pop_front() {
            bfs.push(q);
            for rank in 0..2 * n {
                let l = Letter::from_rank(rank);
                let next = table.mul(q, quotient.letter_image(l));
                if transversal[next].is_none() {
                    let w = transversal[q].as_ref().expect("visited").multiply(&Word::letter(l));
                    transversal[next] = Some(w);
                    queue.push_back(next);
                }
            }
        }
        let transversal: Vec<Word> = transversal.into_iter().map(|w| w.expect("Q is generated")).collect();

        let mut k_generators = Vec::new();
        let mut edge_label = vec![vec![None; n]; order];
        for &q in &bfs {
            for g in 0..n {
                let target = table.mul(q, quotient.letter_image(Letter::new(g, false)));
                let w = transversal[q].multiply(&Word::generator(g)).multiply(&transversal[target].inverse());
                if !w.is_empty() {
                    edge_label[q][g] = Some(k_generators.len());
                    k_generators.push(w);
                }
            }
        }
        SchreierData { quotient, transversal, k_generators, edge_label }
    }

    pub fn quotient(&self) -> &QuotientMap {
        &self.quotient
    }

    /// `s(q)`, the coset representative of `q`.
    pub fn transversal(&self, q: usize) -> &Word {
        &self.transversal[q]
    }

    pub fn transversals(&self) -> &[Word] {
        &self.transversal
    }

    pub fn k_generators(&self) -> &[Word] {
        &self.k_generators
    }

    /// Rank `r` of the free group `K`.
    pub fn rank(&self) -> usize {
        self.k_generators.len()
    }

    /// Expands a word in the Schreier generators into the ambient generators.
    pub fn expand(&self, k_word: &Word) -> Word {
        k_word.substitute(&self.k_generators)
    }

    /// Rewrites a word with trivial image as a word in the Schreier generators.
    pub fn rewrite(&self, w: &Word) -> Result<Word, SchreierError> {
        let table = self.quotient.table();
        let mut q = 0;
        let mut letters = Vec::new();
        for &l in w.letters() {
            if l.inverse {
                // traverse the edge (t_{q'}, g) backwards, where q' g = q
                let prev = table.mul(q, self.quotient.letter_image(l));
                if let Some(i) = self.edge_label[prev][l.generator] {
                    letters.push(Letter::new(i, true));
                }
                q = prev;
            } else {
                if let Some(i) = self.edge_label[q][l.generator] {
                    letters.push(Letter::new(i, false));
                }
                q = table.mul(q, self.quotient.letter_image(l));
            }
        }
        if q != 0 {
            return Err(SchreierError::NotInKernel(q));
        }
        Ok(Word::from_letters(letters))
    }

    /// `γ ↦ (p(γ), x_γ)` with `x_γ = s(p(γ))⁻¹ γ` written in the Schreier generators.
    pub fn section_decompose(&self, gamma: &Word) -> (usize, Word) {
        let q = self.quotient.image(gamma);
        let x = self.transversal[q].inverse().multiply(gamma);
        (q, self.rewrite(&x).expect("s(p(γ))⁻¹γ lies in K"))
    }

    /// `s(q)⁻¹ x_i s(q)` written in the Schreier generators.
    pub fn conj_action_word(&self, q: usize, k_gen: usize) -> Word {
        let conj = self.k_generators[k_gen].conjugate(&self.transversal[q]);
        self.rewrite(&conj).expect("K is normal")
    }

    /// Rewrites `γ⁻¹ x γ` for a word `x` in the Schreier generators and any `γ`.
    pub fn conjugate_k_word(&self, k_word: &Word, gamma: &Word) -> Word {
        let conj = self.expand(k_word).conjugate(gamma);
        self.rewrite(&conj).expect("K is normal")
    }

    /// Matrices of the left action `(ᵍφ)(x) = φ(g⁻¹ x g)` of `Q` on `Hom(K, Z) = Z^r`,
    /// in the basis dual to the Schreier generators: row `i` of the matrix for `q`
    /// holds the exponent sums of `s(q)⁻¹ x_i s(q)`.
    pub fn conjugation_matrices(&self) -> Vec<Vec<Vec<i64>>> {
        let r = self.rank();
        (0..self.quotient.order())
            .map(|q| {
                (0..r)
                    .map(|i| {
                        let w = self.conj_action_word(q, i);
                        (0..r).map(|j| w.exponent_sum(j)).collect()
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotient::Perm;

    fn names() -> Vec<String> {
        vec!["a".to_string(), "b".to_string()]
    }

    fn w(s: &str) -> Word {
        Word::parse(s, &names()).unwrap()
    }

    fn f2_z2() -> SchreierData {
        let a = Perm::parse_cycles("(0 1)", 2).unwrap();
        let b = Perm::parse_cycles("()", 2).unwrap();
        SchreierData::build(QuotientMap::new(2, vec![a, b]).unwrap())
    }

    #[test]
    fn f2_mod_z2_generators() {
        let s = f2_z2();
        assert_eq!(s.transversals(), &[Word::empty(), w("a")]);
        // the three generators b, a², a b a⁻¹ (listed by transversal element, then generator)
        assert_eq!(s.k_generators(), &[w("b"), w("a a"), w("a b a^-1")]);
        assert_eq!(s.rank(), 3);
        for g in s.k_generators() {
            assert!(s.quotient().is_trivial_image(g));
        }
    }

    #[test]
    fn f1_mod_z3() {
        let c = Perm::parse_cycles("(0 1 2)", 3).unwrap();
        let s = SchreierData::build(QuotientMap::new(3, vec![c]).unwrap());
        let names = vec!["a".to_string()];
        assert_eq!(s.k_generators(), &[Word::parse("a^3", &names).unwrap()]);
        // a³ is central
        for q in 0..3 {
            assert_eq!(s.conj_action_word(q, 0), Word::generator(0));
        }
    }

    #[test]
    fn trivial_quotient_keeps_generators() {
        let s = SchreierData::build(QuotientMap::new(1, vec![Perm::identity(1), Perm::identity(1)]).unwrap());
        assert_eq!(s.k_generators(), &[w("a"), w("b")]);
    }

    #[test]
    fn section_decompose_examples() {
        let s = f2_z2();
        assert_eq!(s.section_decompose(&Word::empty()), (0, Word::empty()));
        assert_eq!(s.section_decompose(&w("a")), (1, Word::empty()));
        // x₁ = b, x₂ = a², x₃ = a b a⁻¹:  a⁻¹ b a = x₂⁻¹ x₃ x₂
        let k = vec!["x1".to_string(), "x2".to_string(), "x3".to_string()];
        let (q, x) = s.section_decompose(&w("a^-1 b a"));
        assert_eq!(q, 0);
        assert_eq!(x, Word::parse("x2^-1 x3 x2", &k).unwrap());
        assert_eq!(s.expand(&x), w("a^-1 b a"));
    }

    #[test]
    fn conj_action_examples() {
        let s = f2_z2();
        let k = vec!["x1".to_string(), "x2".to_string(), "x3".to_string()];
        assert_eq!(s.conj_action_word(0, 1), Word::generator(1));
        assert_eq!(s.conj_action_word(1, 0), Word::parse("x2^-1 x3 x2", &k).unwrap());
        let m = s.conjugation_matrices();
        assert_eq!(m[0], vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(m[1], vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
    }

    #[test]
    fn rewrite_rejects_non_kernel() {
        assert_eq!(f2_z2().rewrite(&w("a b")), Err(SchreierError::NotInKernel(1)));
    }
}
