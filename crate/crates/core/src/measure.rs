//! Probability measures on finite groups.
//!
//! Every constructor accumulates 64-bit weights in declaration order and, in
//! parallel, the same weights as exact rationals so that identities between
//! measures can be checked without rounding.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{
    cyclic_tuple, random_to_random_tuple, random_transposition_tuple, top_to_random_tuple,
    CyclicPower, FiniteGroup, GeneratingTuple, GroupDescriptor, Permutation, SymmetricGroup,
};
use crate::numeric::KahanSum;

/// Tolerance on total mass and on `μ(x⁻¹) = μ(x)`.
pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct GroupMeasure<G: FiniteGroup> {
    group: G,
    weights: BTreeMap<G::Element, f64>,
    exact: Option<BTreeMap<G::Element, BigRational>>,
}

/// Accumulates float and rational weights side by side.
struct Accumulator<G: FiniteGroup> {
    group: G,
    weights: BTreeMap<G::Element, f64>,
    exact: BTreeMap<G::Element, BigRational>,
}

impl<G: FiniteGroup> Accumulator<G> {
    fn new(group: G) -> Self {
        Accumulator {
            group,
            weights: BTreeMap::new(),
            exact: BTreeMap::new(),
        }
    }

    fn add(&mut self, element: G::Element, numer: u64, denom: u64) {
        *self.weights.entry(element.clone()).or_insert(0.0) += numer as f64 / denom as f64;
        *self.exact.entry(element).or_insert_with(BigRational::zero) +=
            BigRational::new(BigInt::from(numer), BigInt::from(denom));
    }

    fn finish(self) -> Result<GroupMeasure<G>> {
        let mut m = GroupMeasure::new(self.group, self.weights)?;
        m.exact = Some(self.exact);
        Ok(m)
    }
}

impl<G: FiniteGroup> GroupMeasure<G> {
    /// Validates non-negativity, membership and unit mass.
    pub fn new(group: G, weights: BTreeMap<G::Element, f64>) -> Result<Self> {
        for (g, &w) in &weights {
            if !group.contains(g) {
                return Err(Error::GroupMismatch);
            }
            if w < 0.0 || !w.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "negative or non-finite weight {w} at {g:?}"
                )));
            }
        }
        let m = GroupMeasure {
            group,
            weights,
            exact: None,
        };
        let total = m.total_mass();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "total mass {total} is not 1"
            )));
        }
        Ok(m)
    }

    pub fn delta(group: G, g: G::Element) -> Result<Self> {
        let mut acc = Accumulator::new(group);
        acc.add(g, 1, 1);
        acc.finish()
    }

    pub fn uniform(group: G, limit: usize) -> Result<Self> {
        let size = group.enumerable_size(limit)?;
        let mut acc = Accumulator::new(group.clone());
        for i in 0..size {
            acc.add(group.element(i), 1, size as u64);
        }
        acc.finish()
    }

    /// Builds a measure from a dense vector indexed by the group enumeration.
    pub fn from_dense(group: G, dense: &[f64]) -> Result<Self> {
        let size = group.enumerable_size(dense.len())?;
        if size != dense.len() {
            return Err(Error::SizeMismatch {
                left: size,
                right: dense.len(),
            });
        }
        let weights = dense
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(|(i, &w)| (group.element(i), w))
            .collect();
        GroupMeasure::new(group, weights)
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    pub fn mass(&self, g: &G::Element) -> f64 {
        self.weights.get(g).copied().unwrap_or(0.0)
    }

    /// Exact weight, when the measure was built by an exact constructor.
    pub fn exact_mass(&self, g: &G::Element) -> Option<BigRational> {
        self.exact
            .as_ref()
            .map(|e| e.get(g).cloned().unwrap_or_else(BigRational::zero))
    }

    pub fn exact_weights(&self) -> Option<&BTreeMap<G::Element, BigRational>> {
        self.exact.as_ref()
    }

    /// Exact weights as integer numerators over their least common denominator.
    pub fn common_denominator_form(&self) -> Option<(BigInt, BTreeMap<G::Element, BigInt>)> {
        let exact = self.exact.as_ref()?;
        let denom = exact
            .values()
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let numerators = exact
            .iter()
            .map(|(g, r)| (g.clone(), r.numer() * (&denom / r.denom())))
            .collect();
        Some((denom, numerators))
    }

    /// Support elements with their weights, in element order.
    pub fn support(&self) -> impl Iterator<Item = (&G::Element, f64)> {
        self.weights.iter().map(|(g, &w)| (g, w))
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.values().copied().collect::<KahanSum>().value()
    }

    /// Whether `μ(x⁻¹) = μ(x)` for every `x`, within [`MASS_TOLERANCE`].
    pub fn is_symmetric(&self) -> bool {
        self.max_asymmetry() <= MASS_TOLERANCE
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.weights
            .iter()
            .map(|(g, &w)| (w - self.mass(&self.group.inverse(g))).abs())
            .fold(0.0, f64::max)
    }

    /// `(self ∗ other)(x) = Σ_y self(y)·other(y⁻¹x)`.
    pub fn convolve(&self, other: &GroupMeasure<G>) -> Result<GroupMeasure<G>> {
        if self.group != other.group {
            return Err(Error::GroupMismatch);
        }
        let mut out: BTreeMap<G::Element, f64> = BTreeMap::new();
        for (y, wy) in self.support() {
            for (z, wz) in other.support() {
                *out.entry(self.group.multiply(y, z)).or_insert(0.0) += wy * wz;
            }
        }
        GroupMeasure::new(self.group.clone(), out)
    }

    /// `t`-fold convolution; `t = 0` gives `δ_e`.
    pub fn t_fold(&self, t: usize) -> Result<GroupMeasure<G>> {
        let mut acc = GroupMeasure::delta(self.group.clone(), self.group.identity())?;
        for _ in 0..t {
            acc = acc.convolve(self)?;
        }
        Ok(acc)
    }

    /// Dense vector indexed by the group enumeration.
    pub fn to_dense(&self, limit: usize) -> Result<Vec<f64>> {
        let size = self.group.enumerable_size(limit)?;
        let mut dense = vec![0.0; size];
        for (g, w) in self.support() {
            dense[self.group.index_of(g)] = w;
        }
        Ok(dense)
    }

    pub fn to_document(&self) -> MeasureDocument {
        MeasureDocument {
            group: self.group.descriptor(),
            entries: self
                .support()
                .map(|(g, p)| MeasureEntry {
                    element: self.group.encode(g),
                    p,
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &MeasureDocument) -> Result<Self> {
        let group = G::from_descriptor(&doc.group)?;
        let mut weights = BTreeMap::new();
        for entry in &doc.entries {
            let g = group.decode(&entry.element)?;
            if weights.insert(g, entry.p).is_some() {
                return Err(Error::Parse(format!(
                    "duplicate element {:?}",
                    entry.element
                )));
            }
        }
        GroupMeasure::new(group, weights)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let doc: MeasureDocument = serde_json::from_str(json)?;
        Self::from_document(&doc)
    }
}

/// JSON form: `{group: {...}, entries: [{element: [...], p: ...}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureDocument {
    pub group: GroupDescriptor,
    pub entries: Vec<MeasureEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureEntry {
    pub element: Vec<usize>,
    pub p: f64,
}

/// `μ_S = (1/k) Σ δ_{g_i}`.
pub fn uniform_tuple_measure<G: FiniteGroup>(
    tuple: &GeneratingTuple<G>,
) -> Result<GroupMeasure<G>> {
    if tuple.is_empty() {
        return Err(Error::EmptyTuple);
    }
    let k = tuple.len() as u64;
    let mut acc = Accumulator::new(tuple.group().clone());
    for g in tuple.elements() {
        acc.add(g.clone(), 1, k);
    }
    acc.finish()
}

/// `q_S = (1/k) Σ_i (1/m_i) Σ_{j<m_i} δ_{s_i^j}` where `m_i` is the order of `s_i`.
pub fn hit_and_run_measure<G: FiniteGroup>(tuple: &GeneratingTuple<G>) -> Result<GroupMeasure<G>> {
    if tuple.is_empty() {
        return Err(Error::EmptyTuple);
    }
    let group = tuple.group();
    let k = tuple.len() as u64;
    let mut acc = Accumulator::new(group.clone());
    for s in tuple.elements() {
        let m = group.order_of(s) as u64;
        let mut power = group.identity();
        for _ in 0..m {
            acc.add(power.clone(), 1, k * m);
            power = group.multiply(&power, s);
        }
    }
    acc.finish()
}

fn require_deck(n: usize) -> Result<SymmetricGroup> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "need n >= 2 cards, got {n}"
        )));
    }
    SymmetricGroup::new(n)
}

/// The hit-and-run measure of the top-to-random tuple `(σ_1, ..., σ_n)`.
pub fn hnr_top_to_random(n: usize) -> Result<GroupMeasure<SymmetricGroup>> {
    require_deck(n)?;
    hit_and_run_measure(&top_to_random_tuple(n)?)
}

pub fn top_to_random_measure(n: usize) -> Result<GroupMeasure<SymmetricGroup>> {
    uniform_tuple_measure(&top_to_random_tuple(n)?)
}

pub fn random_to_random_measure(n: usize) -> Result<GroupMeasure<SymmetricGroup>> {
    uniform_tuple_measure(&random_to_random_tuple(n)?)
}

pub fn random_transposition_measure(n: usize) -> Result<GroupMeasure<SymmetricGroup>> {
    uniform_tuple_measure(&random_transposition_tuple(n)?)
}

pub fn hnr_random_transposition(n: usize) -> Result<GroupMeasure<SymmetricGroup>> {
    hit_and_run_measure(&random_transposition_tuple(n)?)
}

/// Hit-and-run measure of `(0, ±e_1, ..., ±e_d)` on `(Z/nZ)^d`.
pub fn hnr_cyclic(modulus: usize, dimension: usize) -> Result<GroupMeasure<CyclicPower>> {
    hit_and_run_measure(&cyclic_tuple(modulus, dimension)?)
}

/// Permutation sending old position `order[new]` to `new` (0-based).
fn from_deck_order(order: Vec<usize>) -> Permutation {
    Permutation::from_images(order)
        .expect("deck order is a rearrangement")
        .inverse()
}

/// Uniform position `i`, uniform packet size `j <= i`; the top `j` cards go
/// below the card originally at position `i`.
pub fn packet_description_measure(n: usize) -> Result<GroupMeasure<SymmetricGroup>> {
    let group = require_deck(n)?;
    let mut acc = Accumulator::new(group);
    for i in 1..=n {
        for j in 1..=i {
            // new deck: cards j+1..=i, then the packet 1..=j, then the rest
            let order: Vec<usize> = (j..i).chain(0..j).chain(i..n).collect();
            acc.add(from_deck_order(order), 1, (n * i) as u64);
        }
    }
    acc.finish()
}

/// Crude overhand: cut at `a <= b` into top `[1,a]`, middle `[a+1,b]`,
/// bottom `[b+1,n]`; the deck becomes bottom, middle, top.
pub fn crude_overhand_measure(n: usize) -> Result<GroupMeasure<SymmetricGroup>> {
    let group = require_deck(n)?;
    let mut acc = Accumulator::new(group);
    for a in 1..=n {
        for b in a..=n {
            let order: Vec<usize> = (b..n).chain(a..b).chain(0..a).collect();
            acc.add(from_deck_order(order), 1, (n * (n - a + 1)) as u64);
        }
    }
    acc.finish()
}

/// Borel shuffle: the packet at positions `a..=b` moves to the top, with
/// `(a, b)` uniform over the `C(n+1, 2)` pairs.
pub fn borel_measure(n: usize) -> Result<GroupMeasure<SymmetricGroup>> {
    let group = require_deck(n)?;
    let pairs = (n * (n + 1) / 2) as u64;
    let mut acc = Accumulator::new(group);
    for a in 1..=n {
        for b in a..=n {
            let order: Vec<usize> = (a - 1..b).chain(0..a - 1).chain(b..n).collect();
            acc.add(from_deck_order(order), 1, pairs);
        }
    }
    acc.finish()
}

/// `H_n / n`, the identity mass of the hit-and-run top-to-random measure.
pub fn harmonic_identity_mass(n: usize) -> BigRational {
    (1..=n).fold(BigRational::zero(), |acc, i| {
        acc + BigRational::new(BigInt::one(), BigInt::from(i))
    }) / BigInt::from(n)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{top_to_random_generator, transposition, CyclicVector};

    fn q(n: u64, d: u64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sigma(n: usize, k: usize) -> Permutation {
        top_to_random_generator(n, k).unwrap()
    }

    #[test]
    fn top_to_random_simple_measure() {
        let m = top_to_random_measure(3).unwrap();
        for k in 1..=3 {
            assert_eq!(m.exact_mass(&sigma(3, k)), Some(q(1, 3)));
        }
        assert!(!m.is_symmetric());
    }

    #[test]
    fn random_transposition_simple_measure() {
        let n = 5;
        let m = random_transposition_measure(n).unwrap();
        assert_eq!(m.exact_mass(&Permutation::identity(n)), Some(q(1, 5)));
        assert_eq!(
            m.exact_mass(&transposition(n, 2, 4).unwrap()),
            Some(q(2, 25))
        );
        assert_eq!(m.support_len(), 1 + n * (n - 1) / 2);
    }

    #[test]
    fn random_to_random_simple_measure() {
        let n = 5;
        let m = random_to_random_measure(n).unwrap();
        assert_eq!(m.exact_mass(&Permutation::identity(n)), Some(q(1, 5)));
        let adjacent = crate::group::random_insertion_generator(n, 2, 3).unwrap();
        assert_eq!(m.exact_mass(&adjacent), Some(q(2, 25)));
        let far = crate::group::random_insertion_generator(n, 1, 4).unwrap();
        assert_eq!(m.exact_mass(&far), Some(q(1, 25)));
        assert!(m.is_symmetric());
    }

    #[test]
    fn hnr_top_to_random_n3() {
        let m = hnr_top_to_random(3).unwrap();
        assert_eq!(m.exact_mass(&Permutation::identity(3)), Some(q(11, 18)));
        assert_eq!(m.exact_mass(&sigma(3, 2)), Some(q(1, 6)));
        assert_eq!(m.exact_mass(&sigma(3, 3)), Some(q(1, 9)));
        assert_eq!(m.exact_mass(&sigma(3, 3).pow(2)), Some(q(1, 9)));
        assert_eq!(m.support_len(), 4);
    }

    #[test]
    fn hnr_identity_mass_is_harmonic() {
        for n in 2..=8 {
            let m = hnr_top_to_random(n).unwrap();
            let e = Permutation::identity(n);
            assert_eq!(m.exact_mass(&e), Some(harmonic_identity_mass(n)));
            assert!((m.mass(&e) - rational_to_f64(&harmonic_identity_mass(n))).abs() < 1e-14);
        }
        assert_eq!(harmonic_identity_mass(5), q(137, 300));
    }

    #[test]
    fn hnr_support_size_and_symmetry() {
        for n in 2..=8 {
            let m = hnr_top_to_random(n).unwrap();
            assert!(m.is_symmetric(), "n={n}");
            // distinct σ_i^j, 2 <= i <= n, 1 <= j < i, plus e
            let mut distinct = std::collections::BTreeSet::new();
            distinct.insert(Permutation::identity(n));
            for i in 2..=n {
                for j in 1..i {
                    distinct.insert(sigma(n, i).pow(j as u64));
                }
            }
            assert_eq!(distinct.len(), 1 + n * (n - 1) / 2);
            assert_eq!(m.support_len(), distinct.len());
        }
        assert!(hnr_top_to_random(1).is_err());
    }

    #[test]
    fn hnr_cyclic_values() {
        let m = hnr_cyclic(5, 2).unwrap();
        let g = CyclicPower::new(5, 2).unwrap();
        assert_eq!(m.exact_mass(&g.identity()), Some(q(9, 25)));
        for j in 1..=2 {
            for mult in 1..5 {
                let e = CyclicVector::unit(5, 2, j, false).unwrap();
                let x = g.power(&e, mult);
                assert_eq!(m.exact_mass(&x), Some(q(2, 25)));
            }
        }
    }

    #[test]
    fn hnr_random_transposition_values() {
        let m = hnr_random_transposition(4).unwrap();
        assert_eq!(m.exact_mass(&Permutation::identity(4)), Some(q(5, 8)));
        assert_eq!(
            m.exact_mass(&transposition(4, 1, 3).unwrap()),
            Some(q(1, 16))
        );
    }

    #[test]
    fn packet_description_matches_hit_and_run() {
        for n in 2..=8 {
            let packet = packet_description_measure(n).unwrap();
            let hnr = hnr_top_to_random(n).unwrap();
            assert_eq!(packet.exact_weights(), hnr.exact_weights(), "n={n}");
            for (g, w) in hnr.support() {
                assert!((packet.mass(g) - w).abs() < 1e-15);
            }
        }
        let two = packet_description_measure(2).unwrap();
        assert_eq!(two.exact_mass(&Permutation::identity(2)), Some(q(3, 4)));
        assert_eq!(
            two.exact_mass(&transposition(2, 1, 2).unwrap()),
            Some(q(1, 4))
        );
    }

    #[test]
    fn overhand_and_borel_identity_masses() {
        for n in 2..=8 {
            let e = Permutation::identity(n);
            let overhand = crude_overhand_measure(n).unwrap();
            assert_eq!(overhand.exact_mass(&e), Some(q(1, n as u64)));
            let borel = borel_measure(n).unwrap();
            assert_eq!(borel.exact_mass(&e), Some(q(2, n as u64 + 1)));
            assert!((overhand.total_mass() - 1.0).abs() < 1e-12);
            assert!((borel.total_mass() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn borel_moves_middle_packet_to_top() {
        // (a, b) = (2, 3) on four cards: [A B C D] -> [B C A D]
        let m = borel_measure(4).unwrap();
        let expected = Permutation::from_one_line(&[3, 1, 2, 4]).unwrap();
        assert_eq!(
            expected.act_on(&['A', 'B', 'C', 'D']).unwrap(),
            vec!['B', 'C', 'A', 'D']
        );
        assert!(m.mass(&expected) > 0.0);
    }

    #[test]
    fn delta_convolution() {
        let g = SymmetricGroup::new(4).unwrap();
        let a = Permutation::from_one_line(&[2, 3, 1, 4]).unwrap();
        let b = Permutation::from_one_line(&[4, 1, 2, 3]).unwrap();
        let da = GroupMeasure::delta(g, a.clone()).unwrap();
        let db = GroupMeasure::delta(g, b.clone()).unwrap();
        let c = da.convolve(&db).unwrap();
        assert_eq!(c.support_len(), 1);
        assert_eq!(c.mass(&a.then(&b)), 1.0);
    }

    #[test]
    fn t_fold_base_cases() {
        let m = hnr_top_to_random(4).unwrap();
        let zero = m.t_fold(0).unwrap();
        assert_eq!(zero.mass(&Permutation::identity(4)), 1.0);
        let one = m.t_fold(1).unwrap();
        for (g, w) in m.support() {
            assert_eq!(one.mass(g), w);
        }
    }

    #[test]
    fn two_step_top_to_random_matches_path_enumeration() {
        let n = 3;
        let m = top_to_random_measure(n).unwrap();
        let two = m.t_fold(2).unwrap();
        let mut paths: BTreeMap<Permutation, f64> = BTreeMap::new();
        for a in 1..=n {
            for b in 1..=n {
                let x = sigma(n, a).then(&sigma(n, b));
                *paths.entry(x).or_insert(0.0) += 1.0 / 9.0;
            }
        }
        assert_eq!(two.support_len(), paths.len());
        for (g, w) in &paths {
            assert!((two.mass(g) - w).abs() < 1e-15);
        }
    }

    #[test]
    fn convolve_rejects_other_group() {
        let a = hnr_top_to_random(3).unwrap();
        let b = hnr_top_to_random(4).unwrap();
        assert!(matches!(a.convolve(&b), Err(Error::GroupMismatch)));
    }

    #[test]
    fn rejects_bad_mass() {
        let g = SymmetricGroup::new(2).unwrap();
        let mut w = BTreeMap::new();
        w.insert(Permutation::identity(2), 0.5);
        assert!(GroupMeasure::new(g, w).is_err());
    }

    #[test]
    fn common_denominator() {
        let m = hnr_top_to_random(3).unwrap();
        let (denom, numerators) = m.common_denominator_form().unwrap();
        assert_eq!(denom, BigInt::from(18));
        assert_eq!(numerators[&Permutation::identity(3)], BigInt::from(11));
    }

    #[test]
    fn json_round_trip_cyclic() {
        let m = hnr_cyclic(3, 2).unwrap();
        let back = GroupMeasure::<CyclicPower>::from_json(&m.to_json().unwrap()).unwrap();
        for (g, w) in m.support() {
            assert_eq!(back.mass(g), w);
        }
        assert!(GroupMeasure::<SymmetricGroup>::from_json(&m.to_json().unwrap()).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn json_round_trip(n in 2usize..7, which in 0usize..5) {
                let m = match which {
                    0 => hnr_top_to_random(n),
                    1 => packet_description_measure(n),
                    2 => crude_overhand_measure(n),
                    3 => borel_measure(n),
                    _ => random_to_random_measure(n),
                }.unwrap();
                let back = GroupMeasure::<SymmetricGroup>::from_json(&m.to_json().unwrap()).unwrap();
                prop_assert_eq!(back.support_len(), m.support_len());
                for (g, w) in m.support() {
                    prop_assert_eq!(back.mass(g), w);
                }
            }

            #[test]
            fn convolution_preserves_mass(n in 2usize..6, t in 0usize..4) {
                let m = crude_overhand_measure(n).unwrap().t_fold(t).unwrap();
                prop_assert!((m.total_mass() - 1.0).abs() < 1e-12);
            }
        }
    }
}
