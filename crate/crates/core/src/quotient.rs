//! Finite quotients of a free group given by permutation images of the generators.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::words::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuotientError {
    #[error("malformed permutation {text:?}: {reason}")]
    BadPermutation { text: String, reason: String },
    #[error("permutation of degree {found} where degree {expected} was declared")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("degree must be positive")]
    ZeroDegree,
}

/// A permutation of `{0, ..., n-1}`; `p.apply(i) = p[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm((0..degree).collect())
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, QuotientError> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(QuotientError::BadPermutation {
                    text: format!("{images:?}"),
                    reason: "not a bijection".into(),
                });
            }
            seen[i] = true;
        }
        Ok(Perm(images))
    }

    /// Parses cycle notation such as `"(0 1)(2 3)"`; `"()"` is the identity.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self, QuotientError> {
        let bad = |reason: &str| QuotientError::BadPermutation { text: text.to_string(), reason: reason.to_string() };
        let mut images: Vec<usize> = (0..degree).collect();
        let mut moved = vec![false; degree];
        let mut rest = text.trim();
        if rest.is_empty() {
            return Err(bad("empty"));
        }
        while !rest.is_empty() {
            let inner_start = rest.strip_prefix('(').ok_or_else(|| bad("expected '('"))?;
            let close = inner_start.find(')').ok_or_else(|| bad("unclosed cycle"))?;
            let cycle = inner_start[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<usize>().map_err(|_| bad("non-integer point")))
                .collect::<Result<Vec<_>, _>>()?;
            for (k, &p) in cycle.iter().enumerate() {
                if p >= degree {
                    return Err(bad("point outside the declared degree"));
                }
                if moved[p] {
                    return Err(bad("cycles are not disjoint"));
                }
                moved[p] = true;
                images[p] = cycle[(k + 1) % cycle.len()];
            }
            rest = inner_start[close + 1..].trim_start();
        }
        Ok(Perm(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        Perm(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.0.len()];
        let mut any = false;
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] == start {
                continue;
            }
            any = true;
            write!(f, "(")?;
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    write!(f, " ")?;
                }
                first = false;
                write!(f, "{i}")?;
                i = self.0[i];
            }
            write!(f, ")")?;
        }
        if !any {
            write!(f, "()")?;
        }
        Ok(())
    }
}

/// Multiplication table of a finite group with elements `0..order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    mul: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl GroupTable {
    /// Checks closure, identity, inverses and associativity.
    pub fn new(mul: Vec<Vec<usize>>, identity: usize) -> Result<Self, String> {
        let n = mul.len();
        if identity >= n || mul.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
            return Err("table is not closed".into());
        }
        if (0..n).any(|a| mul[identity][a] != a || mul[a][identity] != a) {
            return Err("identity is not two-sided".into());
        }
        let mut inverses = Vec::with_capacity(n);
        for a in 0..n {
            let inv = (0..n).find(|&b| mul[a][b] == identity && mul[b][a] == identity);
            inverses.push(inv.ok_or_else(|| format!("element {a} has no inverse"))?);
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(format!("not associative at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        Ok(GroupTable { mul, identity, inverses })
    }

    /// The cyclic group `Z/n` with generator `1`.
    pub fn cyclic(n: usize) -> Self {
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        GroupTable::new(mul, 0).expect("cyclic group")
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverses[a]
    }

    /// Direct product; element `(a, b)` has index `a * other.order() + b`.
    pub fn product(&self, other: &GroupTable) -> GroupTable {
        let m = other.order();
        let n = self.order() * m;
        let mul =
            (0..n).map(|x| (0..n).map(|y| self.mul(x / m, y / m) * m + other.mul(x % m, y % m)).collect()).collect();
        GroupTable::new(mul, self.identity * m + other.identity).expect("product of groups")
    }
}

/// The homomorphism from the free group onto the finite permutation group generated
/// by the generator images.
///
/// Elements are indexed in breadth-first order from the identity, right-multiplying
/// by letters in the order `a < a⁻¹ < b < b⁻¹ < ...`; index 0 is the identity.
#[derive(Debug, Clone)]
pub struct QuotientMap {
    degree: usize,
    images: Vec<Perm>,
    elements: Vec<Perm>,
    table: GroupTable,
    letter_images: Vec<usize>, // by letter rank
}

impl QuotientMap {
    pub fn new(degree: usize, images: Vec<Perm>) -> Result<Self, QuotientError> {
        if degree == 0 {
            return Err(QuotientError::ZeroDegree);
        }
        if let Some(p) = images.iter().find(|p| p.degree() != degree) {
            return Err(QuotientError::DegreeMismatch { expected: degree, found: p.degree() });
        }
        let letters: Vec<Perm> = images.iter().flat_map(|p| [p.clone(), p.inverse()]).collect();
        let mut elements = vec![Perm::identity(degree)];
        let mut index: HashMap<Perm, usize> = HashMap::from([(elements[0].clone(), 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(q) = queue.pop_front() {
            for l in &letters {
                let next = elements[q].compose(l);
                if !index.contains_key(&next) {
                    index.insert(next.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(next);
                }
            }
        }
        let mul = elements.iter().map(|a| elements.iter().map(|b| index[&a.compose(b)]).collect()).collect();
        let table = GroupTable::new(mul, 0).expect("permutation groups are groups");
        let letter_images = letters.iter().map(|p| index[p]).collect();
        Ok(QuotientMap { degree, images, elements, table, letter_images })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn num_generators(&self) -> usize {
        self.images.len()
    }

    pub fn generator_images(&self) -> &[Perm] {
        &self.images
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, q: usize) -> &Perm {
        &self.elements[q]
    }

    pub fn table(&self) -> &GroupTable {
        &self.table
    }

    pub fn letter_image(&self, l: Letter) -> usize {
        self.letter_images[l.rank()]
    }

    /// `p(w)` as an element index.
    pub fn image(&self, w: &Word) -> usize {
        w.letters().iter().fold(0, |q, &l| self.table.mul(q, self.letter_image(l)))
    }

    pub fn is_trivial_image(&self, w: &Word) -> bool {
        self.image(w) == 0
    }
}
