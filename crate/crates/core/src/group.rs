//! Finite groups small enough to enumerate, and the generators the shuffles use.
//!
//! A [`Permutation`] is a map on deck positions: applying `g` to a deck `d`
//! produces `d'` with `d'[g(p)] = d[p]`. Products read left to right, so
//! `a.compose(&b)` is "apply `a`, then `b`" and a walk steps by right
//! multiplication, `X_{t+1} = X_t · g`.
//!
//! Positions are 1-based at the public boundary and 0-based inside.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A permutation of `n` positions in one-line notation.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    // images[p] = position that p is sent to, 0-based
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    /// Builds a permutation from 1-based one-line notation.
    pub fn from_one_line(one_line: &[usize]) -> Result<Self> {
        let n = one_line.len();
        let images: Vec<usize> = one_line
            .iter()
            .map(|&p| {
                if p == 0 || p > n {
                    Err(Error::IndexOutOfRange { index: p, n })
                } else {
                    Ok(p - 1)
                }
            })
            .collect::<Result<_>>()?;
        Self::from_images(images)
    }

    /// Builds a permutation from 0-based images.
    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &p in &images {
            if p >= n || seen[p] {
                return Err(Error::NotAPermutation { n });
            }
            seen[p] = true;
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// 0-based images.
    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// 1-based one-line notation.
    pub fn one_line(&self) -> Vec<usize> {
        self.images.iter().map(|&p| p + 1).collect()
    }

    /// Where 1-based position `p` is sent.
    pub fn apply(&self, p: usize) -> Result<usize> {
        if p == 0 || p > self.degree() {
            return Err(Error::IndexOutOfRange {
                index: p,
                n: self.degree(),
            });
        }
        Ok(self.images[p - 1] + 1)
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.degree() != other.degree() {
            return Err(Error::SizeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self.then(other))
    }

    pub(crate) fn then(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: self.images.iter().map(|&p| other.images[p]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (p, &q) in self.images.iter().enumerate() {
            images[q] = p;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(p, &q)| p == q)
    }

    /// `self` composed with itself `exp` times; `pow(0)` is the identity.
    pub fn pow(&self, mut exp: u64) -> Permutation {
        let mut acc = Permutation::identity(self.degree());
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.then(&base);
            }
            base = base.then(&base);
            exp >>= 1;
        }
        acc
    }

    /// Cycle lengths, including fixed points.
    pub fn cycle_type(&self) -> Vec<usize> {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut lengths = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                p = self.images[p];
                len += 1;
            }
            lengths.push(len);
        }
        lengths
    }

    /// Least `m >= 1` with `self^m = e`.
    pub fn order(&self) -> usize {
        self.cycle_type()
            .into_iter()
            .fold(1, lcm)
    }

    /// Parity: `+1` for even permutations, `-1` for odd ones.
    pub fn sign(&self) -> i32 {
        let even_cycles = self.cycle_type().iter().filter(|&&l| l % 2 == 0).count();
        if even_cycles % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Applies the permutation to a deck: `out[g(p)] = deck[p]`.
    pub fn act_on<T: Clone>(&self, deck: &[T]) -> Result<Vec<T>> {
        if deck.len() != self.degree() {
            return Err(Error::SizeMismatch {
                left: self.degree(),
                right: deck.len(),
            });
        }
        let mut out = deck.to_vec();
        for (p, card) in deck.iter().enumerate() {
            out[self.images[p]] = card.clone();
        }
        Ok(out)
    }

    /// Lexicographic rank among all permutations of the same degree.
    pub fn lex_rank(&self) -> usize {
        let n = self.degree();
        let mut rank = 0usize;
        for i in 0..n {
            let smaller = self.images[i + 1..]
                .iter()
                .filter(|&&q| q < self.images[i])
                .count();
            rank = rank * (n - i) + smaller;
        }
        rank
    }

    /// Inverse of [`Permutation::lex_rank`].
    pub fn from_lex_rank(n: usize, mut rank: usize) -> Permutation {
        let mut digits = vec![0usize; n];
        for i in (0..n).rev() {
            let base = n - i;
            digits[i] = rank % base;
            rank /= base;
        }
        let mut pool: Vec<usize> = (0..n).collect();
        let images = digits.into_iter().map(|d| pool.remove(d)).collect();
        Permutation { images }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{:?}", self.one_line())
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_line().iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

fn check_position(n: usize, p: usize) -> Result<()> {
    if p == 0 || p > n {
        Err(Error::IndexOutOfRange { index: p, n })
    } else {
        Ok(())
    }
}

/// `σ_k`: the top card goes to position `k`, cards `2..=k` move up one.
pub fn top_to_random_generator(n: usize, k: usize) -> Result<Permutation> {
    check_position(n, k)?;
    let images = (0..n)
        .map(|p| match p {
            0 => k - 1,
            p if p < k => p - 1,
            p => p,
        })
        .collect();
    Ok(Permutation { images })
}

/// `σ_ij`: take the card at position `i` and insert it at position `j`.
pub fn random_insertion_generator(n: usize, i: usize, j: usize) -> Result<Permutation> {
    check_position(n, i)?;
    check_position(n, j)?;
    let (i, j) = (i - 1, j - 1);
    let mut images: Vec<usize> = (0..n).collect();
    images[i] = j;
    if i < j {
        for (p, image) in images.iter_mut().enumerate().take(j + 1).skip(i + 1) {
            *image = p - 1;
        }
    } else {
        for (p, image) in images.iter_mut().enumerate().take(i).skip(j) {
            *image = p + 1;
        }
    }
    Ok(Permutation { images })
}

/// `τ_ij`: swap the cards at positions `i` and `j`.
pub fn transposition(n: usize, i: usize, j: usize) -> Result<Permutation> {
    check_position(n, i)?;
    check_position(n, j)?;
    let mut images: Vec<usize> = (0..n).collect();
    images.swap(i - 1, j - 1);
    Ok(Permutation { images })
}

/// An element of `(Z/nZ)^d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclicVector {
    coords: Vec<usize>,
    modulus: usize,
}

impl CyclicVector {
    pub fn new(coords: Vec<usize>, modulus: usize) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidParameter("modulus must be positive".into()));
        }
        if let Some(&c) = coords.iter().find(|&&c| c >= modulus) {
            return Err(Error::InvalidParameter(format!(
                "coordinate {c} not reduced mod {modulus}"
            )));
        }
        Ok(CyclicVector { coords, modulus })
    }

    pub fn zero(modulus: usize, dimension: usize) -> Self {
        CyclicVector {
            coords: vec![0; dimension],
            modulus,
        }
    }

    /// `sign · e_j` for 1-based `j`.
    pub fn unit(modulus: usize, dimension: usize, j: usize, negative: bool) -> Result<Self> {
        check_position(dimension, j)?;
        let mut v = Self::zero(modulus, dimension);
        v.coords[j - 1] = if negative {
            (modulus - 1) % modulus
        } else {
            1 % modulus
        };
        Ok(v)
    }

    pub fn coords(&self) -> &[usize] {
        &self.coords
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn add(&self, other: &CyclicVector) -> Result<CyclicVector> {
        if self.modulus != other.modulus || self.dimension() != other.dimension() {
            return Err(Error::SizeMismatch {
                left: self.dimension(),
                right: other.dimension(),
            });
        }
        Ok(self.plus(other))
    }

    fn plus(&self, other: &CyclicVector) -> CyclicVector {
        CyclicVector {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| (a + b) % self.modulus)
                .collect(),
            modulus: self.modulus,
        }
    }

    pub fn neg(&self) -> CyclicVector {
        CyclicVector {
            coords: self
                .coords
                .iter()
                .map(|&a| (self.modulus - a) % self.modulus)
                .collect(),
            modulus: self.modulus,
        }
    }
}

/// Serializable description of a group, used in JSON documents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupDescriptor {
    Symmetric { n: usize },
    CyclicPower { modulus: usize, dimension: usize },
}

/// A finite group with a stable enumeration of its elements.
///
/// `multiply(a, b)` means "`a` then `b`". Elements passed to the methods
/// must belong to the group.
pub trait FiniteGroup: Clone + fmt::Debug + PartialEq + Send + Sync {
    type Element: Clone + Eq + Ord + Hash + fmt::Debug + Send + Sync;

    fn identity(&self) -> Self::Element;
    fn multiply(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn inverse(&self, a: &Self::Element) -> Self::Element;
    fn contains(&self, a: &Self::Element) -> bool;

    /// `|G|`, or `None` when it does not fit in `usize`.
    fn size(&self) -> Option<usize>;

    /// Position of `a` in the enumeration.
    fn index_of(&self, a: &Self::Element) -> usize;

    /// Element at position `index` of the enumeration.
    fn element(&self, index: usize) -> Self::Element;

    fn descriptor(&self) -> GroupDescriptor;
    fn from_descriptor(descriptor: &GroupDescriptor) -> Result<Self>;

    /// Flat integer encoding (1-based one-line notation or coordinates).
    fn encode(&self, a: &Self::Element) -> Vec<usize>;
    fn decode(&self, code: &[usize]) -> Result<Self::Element>;

    /// Least `m >= 1` with `a^m = e`.
    fn order_of(&self, a: &Self::Element) -> usize {
        let e = self.identity();
        let mut x = a.clone();
        let mut m = 1;
        while x != e {
            x = self.multiply(&x, a);
            m += 1;
        }
        m
    }

    fn power(&self, a: &Self::Element, exp: usize) -> Self::Element {
        (0..exp).fold(self.identity(), |acc, _| self.multiply(&acc, a))
    }

    /// All elements in enumeration order. Fails when `|G|` exceeds `limit`.
    fn elements(&self, limit: usize) -> Result<Vec<Self::Element>> {
        let size = self.enumerable_size(limit)?;
        Ok((0..size).map(|i| self.element(i)).collect())
    }

    fn enumerable_size(&self, limit: usize) -> Result<usize> {
        match self.size() {
            Some(s) if s <= limit => Ok(s),
            Some(s) => Err(Error::GuardExceeded {
                what: "group size",
                size: s,
                limit,
            }),
            None => Err(Error::GuardExceeded {
                what: "group size",
                size: usize::MAX,
                limit,
            }),
        }
    }
}

/// The symmetric group `S_n`, enumerated lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymmetricGroup {
    n: usize,
}

impl SymmetricGroup {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("S_0 is not supported".into()));
        }
        Ok(SymmetricGroup { n })
    }

    pub fn degree(&self) -> usize {
        self.n
    }
}

impl FiniteGroup for SymmetricGroup {
    type Element = Permutation;

    fn identity(&self) -> Permutation {
        Permutation::identity(self.n)
    }

    fn multiply(&self, a: &Permutation, b: &Permutation) -> Permutation {
        a.then(b)
    }

    fn inverse(&self, a: &Permutation) -> Permutation {
        a.inverse()
    }

    fn contains(&self, a: &Permutation) -> bool {
        a.degree() == self.n
    }

    fn size(&self) -> Option<usize> {
        (1..=self.n).try_fold(1usize, |acc, k| acc.checked_mul(k))
    }

    fn index_of(&self, a: &Permutation) -> usize {
        a.lex_rank()
    }

    fn element(&self, index: usize) -> Permutation {
        Permutation::from_lex_rank(self.n, index)
    }

    fn descriptor(&self) -> GroupDescriptor {
        GroupDescriptor::Symmetric { n: self.n }
    }

    fn from_descriptor(descriptor: &GroupDescriptor) -> Result<Self> {
        match descriptor {
            GroupDescriptor::Symmetric { n } => SymmetricGroup::new(*n),
            other => Err(Error::Parse(format!(
                "expected a symmetric group, got {other:?}"
            ))),
        }
    }

    fn encode(&self, a: &Permutation) -> Vec<usize> {
        a.one_line()
    }

    fn decode(&self, code: &[usize]) -> Result<Permutation> {
        if code.len() != self.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: code.len(),
            });
        }
        Permutation::from_one_line(code)
    }

    fn order_of(&self, a: &Permutation) -> usize {
        a.order()
    }

    fn power(&self, a: &Permutation, exp: usize) -> Permutation {
        a.pow(exp as u64)
    }
}

/// `(Z/nZ)^d`, enumerated lexicographically on coordinate vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CyclicPower {
    modulus: usize,
    dimension: usize,
}

impl CyclicPower {
    pub fn new(modulus: usize, dimension: usize) -> Result<Self> {
        if modulus == 0 || dimension == 0 {
            return Err(Error::InvalidParameter(
                "modulus and dimension must be positive".into(),
            ));
        }
        Ok(CyclicPower { modulus, dimension })
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }
}

impl FiniteGroup for CyclicPower {
    type Element = CyclicVector;

    fn identity(&self) -> CyclicVector {
        CyclicVector::zero(self.modulus, self.dimension)
    }

    fn multiply(&self, a: &CyclicVector, b: &CyclicVector) -> CyclicVector {
        a.plus(b)
    }

    fn inverse(&self, a: &CyclicVector) -> CyclicVector {
        a.neg()
    }

    fn contains(&self, a: &CyclicVector) -> bool {
        a.modulus == self.modulus && a.dimension() == self.dimension
    }

    fn size(&self) -> Option<usize> {
        (0..self.dimension).try_fold(1usize, |acc, _| acc.checked_mul(self.modulus))
    }

    fn index_of(&self, a: &CyclicVector) -> usize {
        a.coords.iter().fold(0, |acc, &c| acc * self.modulus + c)
    }

    fn element(&self, mut index: usize) -> CyclicVector {
        let mut coords = vec![0; self.dimension];
        for c in coords.iter_mut().rev() {
            *c = index % self.modulus;
            index /= self.modulus;
        }
        CyclicVector {
            coords,
            modulus: self.modulus,
        }
    }

    fn descriptor(&self) -> GroupDescriptor {
        GroupDescriptor::CyclicPower {
            modulus: self.modulus,
            dimension: self.dimension,
        }
    }

    fn from_descriptor(descriptor: &GroupDescriptor) -> Result<Self> {
        match descriptor {
            GroupDescriptor::CyclicPower { modulus, dimension } => {
                CyclicPower::new(*modulus, *dimension)
            }
            other => Err(Error::Parse(format!(
                "expected a cyclic power, got {other:?}"
            ))),
        }
    }

    fn encode(&self, a: &CyclicVector) -> Vec<usize> {
        a.coords.clone()
    }

    fn decode(&self, code: &[usize]) -> Result<CyclicVector> {
        if code.len() != self.dimension {
            return Err(Error::SizeMismatch {
                left: self.dimension,
                right: code.len(),
            });
        }
        CyclicVector::new(code.to_vec(), self.modulus)
    }
}

/// An ordered tuple of group elements; repetition is allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratingTuple<G: FiniteGroup> {
    group: G,
    elements: Vec<G::Element>,
}

impl<G: FiniteGroup> GeneratingTuple<G> {
    pub fn new(group: G, elements: Vec<G::Element>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyTuple);
        }
        if elements.iter().any(|g| !group.contains(g)) {
            return Err(Error::GroupMismatch);
        }
        Ok(GeneratingTuple { group, elements })
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn elements(&self) -> &[G::Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Size of the subgroup generated by the tuple, by breadth-first closure.
    pub fn closure_size(&self, limit: usize) -> Result<usize> {
        self.group.enumerable_size(limit)?;
        let e = self.group.identity();
        let mut seen: HashSet<G::Element> = HashSet::from([e.clone()]);
        let mut queue = VecDeque::from([e]);
        while let Some(x) = queue.pop_front() {
            for g in &self.elements {
                let y = self.group.multiply(&x, g);
                if seen.insert(y.clone()) {
                    queue.push_back(y);
                }
            }
        }
        Ok(seen.len())
    }

    /// Whether the tuple generates the whole group.
    pub fn generates(&self, limit: usize) -> Result<bool> {
        let size = self.group.enumerable_size(limit)?;
        Ok(self.closure_size(limit)? == size)
    }
}

/// `(σ_1, ..., σ_n)`.
pub fn top_to_random_tuple(n: usize) -> Result<GeneratingTuple<SymmetricGroup>> {
    let group = SymmetricGroup::new(n)?;
    let elements = (1..=n)
        .map(|k| top_to_random_generator(n, k))
        .collect::<Result<_>>()?;
    GeneratingTuple::new(group, elements)
}

/// `(σ_ij)` over all ordered pairs `1 <= i, j <= n`, lexicographically.
pub fn random_to_random_tuple(n: usize) -> Result<GeneratingTuple<SymmetricGroup>> {
    let group = SymmetricGroup::new(n)?;
    let mut elements = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            elements.push(random_insertion_generator(n, i, j)?);
        }
    }
    GeneratingTuple::new(group, elements)
}

/// `(τ_ij)` over all ordered pairs `1 <= i, j <= n`: each transposition twice,
/// the identity `n` times.
pub fn random_transposition_tuple(n: usize) -> Result<GeneratingTuple<SymmetricGroup>> {
    let group = SymmetricGroup::new(n)?;
    let mut elements = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            elements.push(transposition(n, i, j)?);
        }
    }
    GeneratingTuple::new(group, elements)
}

/// `(0, e_1, -e_1, ..., e_d, -e_d)` in `(Z/nZ)^d`.
pub fn cyclic_tuple(modulus: usize, dimension: usize) -> Result<GeneratingTuple<CyclicPower>> {
    let group = CyclicPower::new(modulus, dimension)?;
    let mut elements = vec![group.identity()];
    for j in 1..=dimension {
        elements.push(CyclicVector::unit(modulus, dimension, j, false)?);
        elements.push(CyclicVector::unit(modulus, dimension, j, true)?);
    }
    GeneratingTuple::new(group, elements)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma(n: usize, k: usize) -> Permutation {
        top_to_random_generator(n, k).unwrap()
    }

    #[test]
    fn sigma3_squared_moves_top_packet_below_third_card() {
        let s = sigma(3, 3);
        let s2 = s.compose(&s).unwrap();
        assert_eq!(s2.act_on(&['A', 'B', 'C']).unwrap(), vec!['C', 'A', 'B']);
    }

    #[test]
    fn compose_with_identity_and_involution() {
        let p = Permutation::from_one_line(&[3, 1, 4, 2]).unwrap();
        assert_eq!(p.compose(&Permutation::identity(4)).unwrap(), p);
        for n in 2..7 {
            let s2 = sigma(n, 2);
            assert!(s2.compose(&s2).unwrap().is_identity());
        }
    }

    #[test]
    fn compose_rejects_mismatched_degrees() {
        let err = Permutation::identity(3).compose(&Permutation::identity(4));
        assert!(matches!(err, Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn generator_shapes() {
        assert_eq!(sigma(3, 3).one_line(), vec![3, 1, 2]);
        assert!(sigma(5, 1).is_identity());
        assert_eq!(sigma(4, 2), transposition(4, 1, 2).unwrap());
        assert!(top_to_random_generator(3, 4).is_err());
        assert!(top_to_random_generator(3, 0).is_err());
        assert!(transposition(4, 3, 3).unwrap().is_identity());
        assert!(random_insertion_generator(4, 5, 1).is_err());
    }

    #[test]
    fn orders() {
        for k in 1..=7 {
            assert_eq!(sigma(7, k).order(), k);
        }
        assert_eq!(Permutation::identity(4).order(), 1);
        let g = CyclicPower::new(5, 2).unwrap();
        let e1 = CyclicVector::unit(5, 2, 1, false).unwrap();
        assert_eq!(g.order_of(&e1), 5);
    }

    #[test]
    fn random_insertion_relations() {
        for n in 2..=7 {
            for i in 1..=n {
                assert!(random_insertion_generator(n, i, i).unwrap().is_identity());
                for j in 1..=n {
                    let a = random_insertion_generator(n, i, j).unwrap();
                    let b = random_insertion_generator(n, j, i).unwrap();
                    assert_eq!(a, b.inverse());
                    if i < j {
                        let word = sigma(n, j)
                            .pow(i as u64)
                            .then(&sigma(n, j - 1).pow((j - i) as u64));
                        assert_eq!(word, a, "n={n} i={i} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn sign_of_cycles() {
        for k in 1..=8 {
            let expected = if (k - 1) % 2 == 0 { 1 } else { -1 };
            assert_eq!(sigma(8, k).sign(), expected);
        }
    }

    #[test]
    fn lex_rank_round_trip_and_order() {
        let g = SymmetricGroup::new(5).unwrap();
        let all = g.elements(1000).unwrap();
        assert_eq!(all.len(), 120);
        for (i, p) in all.iter().enumerate() {
            assert_eq!(g.index_of(p), i);
        }
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert!(all[0].is_identity());
    }

    #[test]
    fn cyclic_enumeration() {
        let g = CyclicPower::new(3, 2).unwrap();
        let all = g.elements(100).unwrap();
        assert_eq!(all.len(), 9);
        assert_eq!(all[1].coords(), &[0, 1]);
        for (i, x) in all.iter().enumerate() {
            assert_eq!(g.index_of(x), i);
            assert_eq!(g.multiply(x, &g.inverse(x)), g.identity());
        }
    }

    #[test]
    fn top_to_random_generates_symmetric_group() {
        for n in 1..=8 {
            let tuple = top_to_random_tuple(n).unwrap();
            assert!(tuple.generates(50_000).unwrap(), "n={n}");
        }
    }

    #[test]
    fn order_divides_group_size() {
        for n in 1..=6 {
            let g = SymmetricGroup::new(n).unwrap();
            let size = g.size().unwrap();
            for p in g.elements(1000).unwrap() {
                let m = p.order();
                assert_eq!(size % m, 0);
                // brute-force definition agrees with cycle lcm
                let mut x = p.clone();
                let mut brute = 1;
                while !x.is_identity() {
                    x = x.then(&p);
                    brute += 1;
                }
                assert_eq!(brute, m);
            }
        }
    }

    #[test]
    fn empty_tuple_rejected() {
        let g = SymmetricGroup::new(3).unwrap();
        assert!(matches!(
            GeneratingTuple::new(g, vec![]),
            Err(Error::EmptyTuple)
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn perm(n: usize) -> impl Strategy<Value = Permutation> {
            Just((0..n).collect::<Vec<_>>())
                .prop_shuffle()
                .prop_map(|v| Permutation::from_images(v).unwrap())
        }

        proptest! {
            #[test]
            fn compose_is_associative((a, b, c) in (1usize..9).prop_flat_map(|n| (perm(n), perm(n), perm(n)))) {
                prop_assert_eq!(a.then(&b).then(&c), a.then(&b.then(&c)));
            }

            #[test]
            fn inverse_is_two_sided(p in (1usize..12).prop_flat_map(perm)) {
                prop_assert!(p.then(&p.inverse()).is_identity());
                prop_assert!(p.inverse().then(&p).is_identity());
            }

            #[test]
            fn action_matches_composition((a, b) in (1usize..9).prop_flat_map(|n| (perm(n), perm(n)))) {
                let deck: Vec<usize> = (0..a.degree()).collect();
                let stepwise = b.act_on(&a.act_on(&deck).unwrap()).unwrap();
                prop_assert_eq!(stepwise, a.then(&b).act_on(&deck).unwrap());
            }
        }
    }
}
