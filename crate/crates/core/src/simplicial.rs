//! Subsets of F_2^m, coordinate index sets, simplicial complexes, and the
//! character sums attached to them.
//!
//! A vector in F_2^m is a bitmask; bit i-1 is coordinate i of [m]. A complex
//! is handed over by its maximal elements and is downward closed under
//! support containment. The complex generated by a coordinate set L is the
//! subspace spanned by the unit vectors indexed by L.

use std::collections::BTreeSet;
use std::fmt;

use crate::bitmat::parity;
use crate::error::{Error, Result};

pub const MAX_AMBIENT: usize = 32;

/// Vector in F_2^m.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vec2m {
    bits: u64,
    m: u8,
}

impl Vec2m {
    pub fn new(bits: u64, m: usize) -> Result<Vec2m> {
        check_m(m)?;
        if m < 64 && bits >> m != 0 {
            return Err(Error::invalid(format!(
                "vector {bits:#x} has bits outside F_2^{m}"
            )));
        }
        Ok(Vec2m { bits, m: m as u8 })
    }

    pub fn zero(m: usize) -> Vec2m {
        Vec2m { bits: 0, m: m as u8 }
    }

    /// Unit vector for coordinate i of [m] (1-indexed).
    pub fn unit(i: usize, m: usize) -> Result<Vec2m> {
        if i < 1 || i > m {
            return Err(Error::invalid(format!("coordinate {i} outside [{m}]")));
        }
        Vec2m::new(1 << (i - 1), m)
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn m(self) -> usize {
        self.m as usize
    }

    pub fn is_zero(self) -> bool {
        self.bits == 0
    }

    pub fn weight(self) -> usize {
        self.bits.count_ones() as usize
    }

    /// 1-indexed support.
    pub fn support(self) -> Vec<usize> {
        (1..=self.m()).filter(|&i| (self.bits >> (i - 1)) & 1 == 1).collect()
    }

    /// Does the support of `self` contain the support of `other`?
    pub fn covers(self, other: Vec2m) -> bool {
        assert_eq!(self.m, other.m, "covers across different ambient spaces");
        other.bits & !self.bits == 0
    }

    pub fn xor(self, other: Vec2m) -> Vec2m {
        assert_eq!(self.m, other.m, "sum across different ambient spaces");
        Vec2m {
            bits: self.bits ^ other.bits,
            m: self.m,
        }
    }

    pub fn dot(self, other: Vec2m) -> u8 {
        assert_eq!(self.m, other.m, "dot across different ambient spaces");
        parity(self.bits & other.bits)
    }
}

impl fmt::Debug for Vec2m {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Vec2m({:0width$b})", self.bits, width = self.m as usize)
    }
}

fn check_m(m: usize) -> Result<()> {
    if !(1..=MAX_AMBIENT).contains(&m) {
        return Err(Error::invalid(format!(
            "ambient dimension m = {m} outside 1..={MAX_AMBIENT}"
        )));
    }
    Ok(())
}

/// Subset of the coordinate index set [m]; 1-indexed externally.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoordSet {
    mask: u64,
    m: u8,
}

impl CoordSet {
    pub fn new(m: usize, indices: &[usize]) -> Result<CoordSet> {
        check_m(m)?;
        let mut mask = 0u64;
        for &i in indices {
            if i < 1 || i > m {
                return Err(Error::invalid(format!("coordinate {i} outside [{m}]")));
            }
            mask |= 1 << (i - 1);
        }
        Ok(CoordSet { mask, m: m as u8 })
    }

    pub fn from_mask(m: usize, mask: u64) -> Result<CoordSet> {
        check_m(m)?;
        if m < 64 && mask >> m != 0 {
            return Err(Error::invalid(format!("mask {mask:#x} has bits outside [{m}]")));
        }
        Ok(CoordSet { mask, m: m as u8 })
    }

    pub fn empty(m: usize) -> CoordSet {
        CoordSet { mask: 0, m: m as u8 }
    }

    pub fn full(m: usize) -> Result<CoordSet> {
        check_m(m)?;
        Ok(CoordSet {
            mask: (1u64 << m) - 1,
            m: m as u8,
        })
    }

    /// Comma list of 1-indexed coordinates; empty input means the empty set.
    pub fn parse(s: &str, m: usize) -> Result<CoordSet> {
        let t = s.trim();
        if t.is_empty() {
            check_m(m)?;
            return Ok(CoordSet::empty(m));
        }
        let mut idx = Vec::new();
        for item in t.split(',') {
            let i: usize = item
                .trim()
                .parse()
                .map_err(|_| Error::parse(format!("bad coordinate {item:?} in {s:?}")))?;
            idx.push(i);
        }
        CoordSet::new(m, &idx)
    }

    pub fn mask(self) -> u64 {
        self.mask
    }

    pub fn m(self) -> usize {
        self.m as usize
    }

    pub fn len(self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.mask == 0
    }

    pub fn is_proper(self) -> bool {
        self.mask != (1u64 << self.m) - 1
    }

    pub fn contains(self, i: usize) -> bool {
        i >= 1 && i <= self.m() && (self.mask >> (i - 1)) & 1 == 1
    }

    pub fn indices(self) -> Vec<usize> {
        (1..=self.m()).filter(|&i| self.contains(i)).collect()
    }

    pub fn complement(self) -> CoordSet {
        CoordSet {
            mask: !self.mask & ((1u64 << self.m) - 1),
            m: self.m,
        }
    }

    pub fn union(self, other: CoordSet) -> CoordSet {
        assert_eq!(self.m, other.m);
        CoordSet {
            mask: self.mask | other.mask,
            m: self.m,
        }
    }

    pub fn minus(self, other: CoordSet) -> CoordSet {
        assert_eq!(self.m, other.m);
        CoordSet {
            mask: self.mask & !other.mask,
            m: self.m,
        }
    }

    /// Support of x meets this index set?
    pub fn meets(self, x: Vec2m) -> bool {
        assert_eq!(self.m, x.m, "index set and vector over different m");
        self.mask & x.bits() != 0
    }
}

impl fmt::Display for CoordSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx = self.indices();
        let strs: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
        write!(f, "{}", strs.join(","))
    }
}

impl fmt::Debug for CoordSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoordSet{{{self}}}")
    }
}

/// Simplicial complex given by its maximal elements: the downward closure
/// under support containment.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Complex {
    m: usize,
    maximal: Vec<Vec2m>,
}

impl Complex {
    /// Deduplicates and drops elements covered by another maximal element.
    pub fn new(m: usize, elements: Vec<Vec2m>) -> Result<Complex> {
        check_m(m)?;
        for e in &elements {
            if e.m() != m {
                return Err(Error::invalid("maximal element with mismatched ambient dimension"));
            }
        }
        let mut uniq: Vec<Vec2m> = elements;
        uniq.sort();
        uniq.dedup();
        let maximal: Vec<Vec2m> = uniq
            .iter()
            .filter(|&&e| !uniq.iter().any(|&o| o != e && o.covers(e)))
            .copied()
            .collect();
        Ok(Complex { m, maximal })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn maximal(&self) -> &[Vec2m] {
        &self.maximal
    }

    pub fn contains(&self, x: Vec2m) -> bool {
        self.maximal.iter().any(|&e| e.covers(x))
    }

    /// All members, ascending by bitmask.
    pub fn members(&self) -> Vec<Vec2m> {
        let mut set = BTreeSet::new();
        for &e in &self.maximal {
            for sub in submasks(e.bits()) {
                set.insert(sub);
            }
        }
        set.into_iter()
            .map(|bits| Vec2m { bits, m: self.m as u8 })
            .collect()
    }

    pub fn size(&self) -> usize {
        self.members().len()
    }
}

/// The complex generated by a coordinate set: span{e_i : i in L}.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct GenComplex {
    coords: CoordSet,
}

impl GenComplex {
    pub fn new(coords: CoordSet) -> GenComplex {
        GenComplex { coords }
    }

    pub fn from_indices(m: usize, indices: &[usize]) -> Result<GenComplex> {
        Ok(GenComplex::new(CoordSet::new(m, indices)?))
    }

    pub fn coords(self) -> CoordSet {
        self.coords
    }

    pub fn m(self) -> usize {
        self.coords.m()
    }

    pub fn cardinality(self) -> u64 {
        1u64 << self.coords.len()
    }

    pub fn contains(self, x: Vec2m) -> bool {
        assert_eq!(self.m(), x.m());
        x.bits() & !self.coords.mask() == 0
    }

    /// Members ascending by bitmask.
    pub fn members(self) -> Vec<Vec2m> {
        submasks(self.coords.mask())
            .into_iter()
            .map(|bits| Vec2m {
                bits,
                m: self.coords.m,
            })
            .collect()
    }

    /// The generated complex on the complementary index set; equals the
    /// orthogonal complement of this subspace.
    pub fn orthogonal(self) -> GenComplex {
        GenComplex {
            coords: self.coords.complement(),
        }
    }

    pub fn as_complex(self) -> Complex {
        Complex {
            m: self.m(),
            maximal: vec![Vec2m {
                bits: self.coords.mask(),
                m: self.coords.m,
            }],
        }
    }
}

/// Submasks of `mask` in ascending order.
fn submasks(mask: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(1 << mask.count_ones());
    let mut t = 0u64;
    loop {
        out.push(t);
        if t == mask {
            break;
        }
        t = (t.wrapping_sub(mask)) & mask;
    }
    out
}

/// Character sum of x over an explicit point set.
pub fn chi(x: Vec2m, points: &[Vec2m]) -> i64 {
    points
        .iter()
        .map(|&y| if x.dot(y) == 1 { -1i64 } else { 1 })
        .sum()
}

/// Character sum of x over a generated complex: the subspace count if x is
/// orthogonal to the span, zero otherwise.
pub fn chi_gen(x: Vec2m, g: GenComplex) -> i64 {
    assert_eq!(x.m(), g.m());
    if x.bits() & g.coords().mask() == 0 {
        g.cardinality() as i64
    } else {
        0
    }
}

/// phi(x | Y): 1 exactly when the support of x avoids Y.
pub fn phi(x: Vec2m, y: CoordSet) -> bool {
    !y.meets(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(bits: u64, m: usize) -> Vec2m {
        Vec2m::new(bits, m).unwrap()
    }

    #[test]
    fn covers_is_support_containment() {
        let a = v(0b011, 3); // (1,1,0)
        assert!(a.covers(v(0b001, 3)));
        assert!(a.covers(v(0b010, 3)));
        assert!(a.covers(a));
        assert!(!a.covers(v(0b100, 3)));
        assert!(!v(0b001, 3).covers(a));
    }

    #[test]
    fn complex_members_close_downward() {
        // maximal (1,1,0) and (0,1,1) in F_2^3
        let c = Complex::new(3, vec![v(0b011, 3), v(0b110, 3)]).unwrap();
        let members: Vec<u64> = c.members().iter().map(|e| e.bits()).collect();
        assert_eq!(members, vec![0b000, 0b001, 0b010, 0b011, 0b100, 0b110]);
        assert_eq!(c.size(), 6);
        assert!(c.contains(v(0b010, 3)));
        assert!(!c.contains(v(0b101, 3)));
    }

    #[test]
    fn complex_construction_prunes_dominated_elements() {
        let c = Complex::new(3, vec![v(0b011, 3), v(0b001, 3), v(0b110, 3), v(0b110, 3)]).unwrap();
        let maximal: Vec<u64> = c.maximal().iter().map(|e| e.bits()).collect();
        assert_eq!(maximal, vec![0b011, 0b110]);
    }

    #[test]
    fn generated_complex_is_the_spanned_subspace() {
        let g = GenComplex::from_indices(4, &[1, 2]).unwrap();
        let members: Vec<u64> = g.members().iter().map(|e| e.bits()).collect();
        assert_eq!(members, vec![0b00, 0b01, 0b10, 0b11]);
        assert_eq!(g.cardinality(), 4);
        // closed under addition
        for &a in &g.members() {
            for &b in &g.members() {
                assert!(g.contains(a.xor(b)));
            }
        }
    }

    #[test]
    fn generated_complex_duality() {
        for m in 1..=4usize {
            for mask in 0..(1u64 << m) {
                let g = GenComplex::new(CoordSet::from_mask(m, mask).unwrap());
                // brute-force orthogonal complement of the subspace
                let members = g.members();
                let perp: Vec<u64> = (0..(1u64 << m))
                    .filter(|&x| members.iter().all(|&y| v(x, m).dot(y) == 0))
                    .collect();
                let dual: Vec<u64> = g.orthogonal().members().iter().map(|e| e.bits()).collect();
                assert_eq!(perp, dual, "m={m} mask={mask:#b}");
            }
        }
    }

    #[test]
    fn chi_on_subspaces_is_all_or_nothing() {
        for m in 1..=4usize {
            for mask in 0..(1u64 << m) {
                let g = GenComplex::new(CoordSet::from_mask(m, mask).unwrap());
                let members = g.members();
                for x in 0..(1u64 << m) {
                    let x = v(x, m);
                    let direct = chi(x, &members);
                    assert_eq!(direct, chi_gen(x, g));
                    let expected = if x.bits() & mask == 0 {
                        g.cardinality() as i64
                    } else {
                        0
                    };
                    assert_eq!(direct, expected);
                }
            }
        }
    }

    #[test]
    fn chi_over_a_non_subspace_complex() {
        let c = Complex::new(3, vec![v(0b011, 3), v(0b110, 3)]).unwrap();
        let members = c.members();
        assert_eq!(chi(Vec2m::zero(3), &members), 6);
        assert_eq!(chi(v(0b100, 3), &members), 2); // two members meet coordinate 3
        assert_eq!(chi(v(0b001, 3), &members), 2);
        assert_eq!(chi(Vec2m::zero(3), &[]), 0);
    }

    #[test]
    fn phi_tests_support_disjointness() {
        let y = CoordSet::new(4, &[2, 3]).unwrap();
        assert!(phi(v(0b1001, 4), y));
        assert!(!phi(v(0b0010, 4), y));
        assert!(phi(Vec2m::zero(4), y));
        assert!(phi(v(0b1111, 4), CoordSet::empty(4)));
    }

    #[test]
    fn coord_set_parsing_and_accessors() {
        let s = CoordSet::parse("1,2,4", 4).unwrap();
        assert_eq!(s.mask(), 0b1011);
        assert_eq!(s.indices(), vec![1, 2, 4]);
        assert_eq!(s.to_string(), "1,2,4");
        assert!(s.is_proper());
        assert!(!CoordSet::full(4).unwrap().is_proper());
        assert_eq!(CoordSet::parse("", 4).unwrap().len(), 0);
        assert_eq!(s.complement().indices(), vec![3]);
        assert!(CoordSet::parse("0", 4).is_err());
        assert!(CoordSet::parse("5", 4).is_err());
        assert!(CoordSet::parse("a", 4).is_err());
        assert!(CoordSet::new(4, &[1, 1, 2]).unwrap().len() == 2);
    }

    #[test]
    fn vector_construction_bounds() {
        assert!(Vec2m::new(0b10000, 4).is_err());
        assert!(Vec2m::new(0, 0).is_err());
        assert!(Vec2m::unit(5, 4).is_err());
        assert_eq!(Vec2m::unit(3, 4).unwrap().bits(), 0b100);
        assert_eq!(v(0b1010, 4).support(), vec![2, 4]);
        assert_eq!(v(0b1010, 4).weight(), 2);
    }
}
