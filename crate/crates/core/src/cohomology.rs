//! Normalized cochains of a finite group `Q` with coefficients in a free module `Z^r`,
//! the coboundary, crossed homomorphism and coboundary tests, and the classification
//! of `H¹(Q; Z^r)`.
//!
//! Cochains of degree `n` are dense tables over `Qⁿ`, indexed with the first argument
//! most significant. Vectors are `i64`; linear algebra runs over big integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::intlin::{kernel_basis, smith, solve, IntMatrix};
use crate::quotient::GroupTable;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("coefficient rank {found} does not match module rank {expected}")]
    RankMismatch { expected: usize, found: usize },
    #[error("cochain is defined on a group of order {found}, module on order {expected}")]
    OrderMismatch { expected: usize, found: usize },
    #[error("cochain is not a crossed homomorphism: identity fails at ({q1}, {q2})")]
    NotACocycle { q1: usize, q2: usize },
    #[error("cochain of degree {0} is not supported here")]
    BadDegree(usize),
    #[error("cochain is not normalized at {0:?}")]
    NotNormalized(Vec<usize>),
    #[error("invalid module: {0}")]
    BadModule(String),
    #[error("integer overflow in a cohomology computation")]
    Overflow,
}

type Result<T> = std::result::Result<T, CohomologyError>;

fn add(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// A finite group acting on the left on `Z^r` through integer matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QModule {
    group: GroupTable,
    rank: usize,
    matrices: Vec<Vec<Vec<i64>>>,
}

impl QModule {
    /// Checks that the identity acts trivially and `M(q1 q2) = M(q1) M(q2)`; the
    /// latter makes every matrix invertible over the integers.
    pub fn new(group: GroupTable, rank: usize, matrices: Vec<Vec<Vec<i64>>>) -> Result<Self> {
        if matrices.len() != group.order() {
            return Err(CohomologyError::BadModule(format!(
                "{} matrices for a group of order {}",
                matrices.len(),
                group.order()
            )));
        }
        if let Some(m) = matrices.iter().find(|m| m.len() != rank || m.iter().any(|row| row.len() != rank)) {
            let found = m.iter().map(Vec::len).find(|&l| l != rank).unwrap_or(m.len());
            return Err(CohomologyError::RankMismatch { expected: rank, found });
        }
        let module = QModule { group, rank, matrices };
        let id = module.group.identity();
        if module.matrices[id] != identity_matrix(rank) {
            return Err(CohomologyError::BadModule("identity does not act trivially".into()));
        }
        let n = module.group.order();
        for a in 0..n {
            for b in 0..n {
                if module.matrices[module.group.mul(a, b)] != mat_mul(&module.matrices[a], &module.matrices[b]) {
                    return Err(CohomologyError::BadModule(format!("not a homomorphism at ({a}, {b})")));
                }
            }
        }
        Ok(module)
    }

    /// `Z^r` with every element acting as the identity.
    pub fn trivial(group: GroupTable, rank: usize) -> Self {
        let matrices = vec![identity_matrix(rank); group.order()];
        QModule { group, rank, matrices }
    }

    pub fn group(&self) -> &GroupTable {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self, q: usize) -> &[Vec<i64>] {
        &self.matrices[q]
    }

    pub fn matrices(&self) -> &[Vec<Vec<i64>>] {
        &self.matrices
    }

    /// `ᵠv = M(q) v`.
    pub fn act(&self, q: usize, v: &[i64]) -> Vec<i64> {
        self.matrices[q].iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    fn check_cochain(&self, c: &Cochain) -> Result<()> {
        if c.rank != self.rank {
            return Err(CohomologyError::RankMismatch { expected: self.rank, found: c.rank });
        }
        if c.order != self.order() {
            return Err(CohomologyError::OrderMismatch { expected: self.order(), found: c.order });
        }
        Ok(())
    }

    // rows (q, i) over q != identity, columns j: the map m ↦ δm on normalized C¹
    fn coboundary_matrix(&self) -> IntMatrix {
        let r = self.rank;
        let others: Vec<usize> = (0..self.order()).filter(|&q| q != self.group.identity()).collect();
        let mut d = IntMatrix::zeros(others.len() * r, r);
        for (k, &q) in others.iter().enumerate() {
            for i in 0..r {
                for j in 0..r {
                    let delta = self.matrices[q][i][j] - i64::from(i == j);
                    d[(k * r + i, j)] = BigInt::from(delta);
                }
            }
        }
        d
    }

    // flattens a 1-cochain over q != identity, matching coboundary_matrix rows
    fn flatten(&self, k: &Cochain) -> Vec<BigInt> {
        (0..self.order())
            .filter(|&q| q != self.group.identity())
            .flat_map(|q| k.get(&[q]).iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
            .collect()
    }
}

fn identity_matrix(r: usize) -> Vec<Vec<i64>> {
    (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect()
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let r = a.len();
    (0..r).map(|i| (0..r).map(|j| (0..r).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

/// A normalized cochain of degree 0, 1 or 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cochain {
    degree: usize,
    order: usize,
    rank: usize,
    values: Vec<Vec<i64>>,
}

impl Cochain {
    pub fn zero(degree: usize, order: usize, rank: usize) -> Self {
        Cochain { degree, order, rank, values: vec![vec![0; rank]; order.pow(degree as u32)] }
    }

    /// A degree 0 cochain, i.e. a vector.
    pub fn constant(v: Vec<i64>, order: usize) -> Self {
        Cochain { degree: 0, order, rank: v.len(), values: vec![v] }
    }

    /// Tabulates `f` over `Qⁿ`, checking normalization against `identity`.
    pub fn from_fn(
        degree: usize,
        group: &GroupTable,
        rank: usize,
        mut f: impl FnMut(&[usize]) -> Vec<i64>,
    ) -> Result<Self> {
        if degree > 2 {
            return Err(CohomologyError::BadDegree(degree));
        }
        let order = group.order();
        let mut values = Vec::with_capacity(order.pow(degree as u32));
        for idx in 0..order.pow(degree as u32) {
            let args = unflatten(idx, degree, order);
            let v = f(&args);
            if v.len() != rank {
                return Err(CohomologyError::RankMismatch { expected: rank, found: v.len() });
            }
            if args.contains(&group.identity()) && v.iter().any(|&x| x != 0) {
                return Err(CohomologyError::NotNormalized(args));
            }
            values.push(v);
        }
        Ok(Cochain { degree, order, rank, values })
    }

    /// A 1-cochain from its rows `q ↦ k(q)`.
    pub fn from_rows(group: &GroupTable, rows: Vec<Vec<i64>>) -> Result<Self> {
        let rank = rows.first().map_or(0, Vec::len);
        if rows.len() != group.order() {
            return Err(CohomologyError::OrderMismatch { expected: group.order(), found: rows.len() });
        }
        Cochain::from_fn(1, group, rank, |a| rows[a[0]].clone())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, args: &[usize]) -> &[i64] {
        assert_eq!(args.len(), self.degree, "wrong number of arguments");
        &self.values[args.iter().fold(0, |acc, &q| acc * self.order + q)]
    }

    /// Rows of a 1-cochain.
    pub fn rows(&self) -> &[Vec<i64>] {
        &self.values
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        self.zip(other, add)
    }

    pub fn sub(&self, other: &Cochain) -> Cochain {
        self.zip(other, sub)
    }

    fn zip(&self, other: &Cochain, f: fn(&[i64], &[i64]) -> Vec<i64>) -> Cochain {
        assert_eq!((self.degree, self.order, self.rank), (other.degree, other.order, other.rank));
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect();
        Cochain { values, ..*self }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.iter().all(|&x| x == 0))
    }

    /// `[{"args": [...], "value": [...]}, ...]` in table order.
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .values
            .iter()
            .enumerate()
            .map(|(idx, v)| json!({ "args": unflatten(idx, self.degree, self.order), "value": v }))
            .collect();
        Value::Array(entries)
    }
}

fn unflatten(mut idx: usize, degree: usize, order: usize) -> Vec<usize> {
    let mut args = vec![0; degree];
    for slot in args.iter_mut().rev() {
        *slot = idx % order;
        idx /= order;
    }
    args
}

/// The coboundary of a cochain: stored for degrees 0 and 1, evaluated on demand
/// for degree 2.
#[derive(Debug, Clone)]
pub enum Coboundary<'a> {
    Stored(Cochain),
    DegreeThree { cochain: &'a Cochain, module: &'a QModule },
}

impl Coboundary<'_> {
    pub fn eval(&self, args: &[usize]) -> Vec<i64> {
        match self {
            Coboundary::Stored(c) => c.get(args).to_vec(),
            Coboundary::DegreeThree { cochain: f, module: m } => {
                let g = m.group();
                let (a, b, c) = (args[0], args[1], args[2]);
                let mut v = m.act(a, f.get(&[b, c]));
                v = sub(&v, f.get(&[g.mul(a, b), c]));
                v = add(&v, f.get(&[a, g.mul(b, c)]));
                sub(&v, f.get(&[a, b]))
            }
        }
    }

    /// Exhaustive zero test; the first nonzero argument tuple on failure.
    pub fn first_nonzero(&self) -> Option<Vec<usize>> {
        match self {
            Coboundary::Stored(c) => (0..c.values.len())
                .find(|&i| c.values[i].iter().any(|&x| x != 0))
                .map(|i| unflatten(i, c.degree, c.order)),
            Coboundary::DegreeThree { module, .. } => {
                let n = module.order();
                (0..n * n * n).map(|i| unflatten(i, 3, n)).find(|args| self.eval(args).iter().any(|&x| x != 0))
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.first_nonzero().is_none()
    }

    pub fn into_cochain(self) -> Option<Cochain> {
        match self {
            Coboundary::Stored(c) => Some(c),
            Coboundary::DegreeThree { .. } => None,
        }
    }
}

/// `δc(g₁, ..., gₙ₊₁) = ᵍ¹c(g₂, ...) + Σ (−1)ⁱ c(..., gᵢgᵢ₊₁, ...) + (−1)ⁿ⁺¹ c(g₁, ..., gₙ)`.
pub fn delta<'a>(c: &'a Cochain, m: &'a QModule) -> Result<Coboundary<'a>> {
    m.check_cochain(c)?;
    let g = m.group();
    let n = m.order();
    let values: Vec<Vec<i64>> = match c.degree {
        0 => {
            let v = c.get(&[]);
            (0..n).map(|q| sub(&m.act(q, v), v)).collect()
        }
        1 => (0..n * n)
            .map(|idx| {
                let (a, b) = (idx / n, idx % n);
                add(&sub(&m.act(a, c.get(&[b])), c.get(&[g.mul(a, b)])), c.get(&[a]))
            })
            .collect(),
        2 => return Ok(Coboundary::DegreeThree { cochain: c, module: m }),
        d => return Err(CohomologyError::BadDegree(d)),
    };
    Ok(Coboundary::Stored(Cochain { degree: c.degree + 1, order: n, rank: c.rank, values }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CrossedHomCheck {
    Holds,
    Violated { q1: usize, q2: usize },
}

impl CrossedHomCheck {
    pub fn holds(&self) -> bool {
        matches!(self, CrossedHomCheck::Holds)
    }
}

/// Checks `k(q1 q2) = k(q1) + ᵠ¹k(q2)` over all pairs.
pub fn is_crossed_hom(k: &Cochain, m: &QModule) -> Result<CrossedHomCheck> {
    if k.degree != 1 {
        return Err(CohomologyError::BadDegree(k.degree));
    }
    let d = delta(k, m)?;
    Ok(match d.first_nonzero() {
        Some(args) => CrossedHomCheck::Violated { q1: args[0], q2: args[1] },
        None => CrossedHomCheck::Holds,
    })
}

fn require_crossed_hom(k: &Cochain, m: &QModule) -> Result<()> {
    match is_crossed_hom(k, m)? {
        CrossedHomCheck::Holds => Ok(()),
        CrossedHomCheck::Violated { q1, q2 } => Err(CohomologyError::NotACocycle { q1, q2 }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoboundaryTest {
    /// `δv = k`.
    Yes(Vec<i64>),
    No,
}

impl CoboundaryTest {
    pub fn is_yes(&self) -> bool {
        matches!(self, CoboundaryTest::Yes(_))
    }
}

fn to_i64(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(|x| x.to_i64().ok_or(CohomologyError::Overflow)).collect()
}

/// Decides whether a crossed homomorphism is principal by solving
/// `(M(q) − I) v = k(q)` for all `q` simultaneously.
pub fn is_coboundary(k: &Cochain, m: &QModule) -> Result<CoboundaryTest> {
    require_crossed_hom(k, m)?;
    let a = m.coboundary_matrix();
    Ok(match solve(&a, &m.flatten(k)) {
        Some(v) => CoboundaryTest::Yes(to_i64(&v)?),
        None => CoboundaryTest::No,
    })
}

/// A class in `H¹(Q; Z^r)` with its canonical coordinates, one per invariant factor
/// `d` and reduced into `[0, d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct H1Class {
    pub representative: Cochain,
    pub coordinates: Vec<i64>,
}

impl H1Class {
    pub fn is_zero(&self) -> bool {
        self.coordinates.iter().all(|&c| c == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct H1Classification {
    /// `H¹ ≅ ⊕ Z/dᵢ`; every `dᵢ > 1`.
    pub invariant_factors: Vec<i64>,
    pub classes: Vec<H1Class>,
}

/// Canonical coordinates of crossed homomorphisms in `H¹(Q; Z^r)`.
///
/// `H¹` is finite, so it is the torsion of `C¹/B¹` on normalized cochains; Smith
/// normal form of the coboundary lattice `B¹` reads it off directly.
pub fn h1_classify(cocycles: &[Cochain], m: &QModule) -> Result<H1Classification> {
    for k in cocycles {
        require_crossed_hom(k, m)?;
    }
    let snf = smith(&m.coboundary_matrix());
    let torsion: Vec<(usize, BigInt)> =
        snf.diagonal.iter().enumerate().filter(|(_, d)| *d > &BigInt::from(1)).map(|(i, d)| (i, d.clone())).collect();
    let invariant_factors =
        torsion.iter().map(|(_, d)| d.to_i64().ok_or(CohomologyError::Overflow)).collect::<Result<_>>()?;
    let classes = cocycles
        .iter()
        .map(|k| {
            let y = snf.u.mul_vec(&m.flatten(k));
            // |Q| k is a coboundary, so the free part of a cocycle vanishes
            debug_assert!(y
                .iter()
                .enumerate()
                .all(|(i, yi)| yi.is_zero() || snf.diagonal.get(i).is_some_and(|d| !d.is_zero())));
            let coordinates = torsion.iter().map(|(i, d)| y[*i].mod_floor(d)).collect::<Vec<_>>();
            Ok(H1Class { representative: k.clone(), coordinates: to_i64(&coordinates)? })
        })
        .collect::<Result<_>>()?;
    Ok(H1Classification { invariant_factors, classes })
}

/// A basis of the crossed homomorphisms `Z¹(Q; Z^r)`.
pub fn crossed_hom_basis(m: &QModule) -> Result<Vec<Cochain>> {
    let n = m.order();
    let r = m.rank();
    let id = m.group().identity();
    let others: Vec<usize> = (0..n).filter(|&q| q != id).collect();
    let col = |q: usize, i: usize| others.iter().position(|&p| p == q).map(|k| k * r + i);
    // δk(a, b) for a, b != identity; entries at the identity vanish by normalization
    let mut d1 = IntMatrix::zeros(others.len() * others.len() * r, others.len() * r);
    for (ia, &a) in others.iter().enumerate() {
        for (ib, &b) in others.iter().enumerate() {
            let row0 = (ia * others.len() + ib) * r;
            for i in 0..r {
                for j in 0..r {
                    if let Some(c) = col(b, j) {
                        d1[(row0 + i, c)] += m.matrix(a)[i][j];
                    }
                }
                if let Some(c) = col(m.group().mul(a, b), i) {
                    d1[(row0 + i, c)] -= 1;
                }
                d1[(row0 + i, col(a, i).expect("a is not the identity"))] += 1;
            }
        }
    }
    let kernel = kernel_basis(&d1);
    (0..kernel.cols())
        .map(|c| {
            let v = to_i64(&kernel.column(c))?;
            Cochain::from_fn(1, m.group(), r, |args| match col(args[0], 0) {
                Some(start) => v[start..start + r].to_vec(),
                None => vec![0; r],
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn negation() -> QModule {
        QModule::new(GroupTable::cyclic(2), 1, vec![vec![vec![1]], vec![vec![-1]]]).unwrap()
    }

    fn swap() -> QModule {
        let swap = vec![vec![0, 1], vec![1, 0]];
        QModule::new(GroupTable::cyclic(2), 2, vec![identity_matrix(2), swap]).unwrap()
    }

    #[test]
    fn module_validation() {
        assert!(QModule::new(GroupTable::cyclic(2), 1, vec![vec![vec![1]], vec![vec![2]]]).is_err());
        assert!(matches!(
            QModule::new(GroupTable::cyclic(2), 2, vec![vec![vec![1]], vec![vec![-1]]]),
            Err(CohomologyError::RankMismatch { .. })
        ));
    }

    #[test]
    fn delta_degree_zero() {
        let m = swap();
        let c = Cochain::constant(vec![3, 5], 2);
        let d = delta(&c, &m).unwrap().into_cochain().unwrap();
        assert_eq!(d.get(&[0]), &[0, 0]);
        assert_eq!(d.get(&[1]), &[2, -2]);
        let dd = delta(&d, &m).unwrap();
        assert!(dd.is_zero());
    }

    #[test]
    fn normalization_is_checked() {
        let g = GroupTable::cyclic(2);
        assert!(matches!(Cochain::from_rows(&g, vec![vec![1], vec![0]]), Err(CohomologyError::NotNormalized(_))));
    }

    #[test]
    fn negation_module_has_z2() {
        let m = negation();
        let g = m.group().clone();
        let k = Cochain::from_rows(&g, vec![vec![0], vec![1]]).unwrap();
        assert!(is_crossed_hom(&k, &m).unwrap().holds());
        assert_eq!(is_coboundary(&k, &m).unwrap(), CoboundaryTest::No);
        let k2 = Cochain::from_rows(&g, vec![vec![0], vec![2]]).unwrap();
        assert_eq!(is_coboundary(&k2, &m).unwrap(), CoboundaryTest::Yes(vec![-1]));
        let cls = h1_classify(&[k, k2], &m).unwrap();
        assert_eq!(cls.invariant_factors, vec![2]);
        assert_eq!(cls.classes[0].coordinates, vec![1]);
        assert_eq!(cls.classes[1].coordinates, vec![0]);
    }

    #[test]
    fn perturbed_crossed_hom_is_caught() {
        let m = QModule::trivial(GroupTable::cyclic(3), 1);
        let good = Cochain::from_rows(m.group(), vec![vec![0], vec![1], vec![2]]).unwrap();
        assert!(!is_crossed_hom(&good, &m).unwrap().holds()); // k(1) + k(2) = 3 but k(0) = 0
        let hom = Cochain::from_rows(m.group(), vec![vec![0], vec![0], vec![0]]).unwrap();
        assert!(is_crossed_hom(&hom, &m).unwrap().holds());
        let bad = Cochain::from_rows(m.group(), vec![vec![0], vec![1], vec![0]]).unwrap();
        assert!(matches!(is_crossed_hom(&bad, &m).unwrap(), CrossedHomCheck::Violated { .. }));
        assert!(matches!(is_coboundary(&bad, &m), Err(CohomologyError::NotACocycle { .. })));
    }

    #[test]
    fn degree_three_view() {
        let m = swap();
        let g = m.group().clone();
        let f = Cochain::from_fn(2, &g, 2, |a| if a == [1, 1] { vec![1, 1] } else { vec![0, 0] }).unwrap();
        assert!(delta(&f, &m).unwrap().is_zero());
        let f = Cochain::from_fn(2, &g, 2, |a| if a == [1, 1] { vec![1, 0] } else { vec![0, 0] }).unwrap();
        assert!(!delta(&f, &m).unwrap().is_zero());
    }

    #[test]
    fn crossed_hom_basis_of_swap() {
        let m = swap();
        let basis = crossed_hom_basis(&m).unwrap();
        assert_eq!(basis.len(), 1);
        for k in &basis {
            assert!(is_crossed_hom(k, &m).unwrap().holds());
            assert!(is_coboundary(k, &m).unwrap().is_yes());
        }
        let cls = h1_classify(&basis, &m).unwrap();
        assert!(cls.invariant_factors.is_empty());
    }
}
