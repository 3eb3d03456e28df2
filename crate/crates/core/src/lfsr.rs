//! Binary sequences satisfying a fixed linear recurrence.
//!
//! A sequence lives in G(f) for a monic f of degree n when f applied to the
//! left-shift operator annihilates it. A sequence is stored as its
//! characteristic polynomial plus the first n terms; everything else is
//! generated on demand.

use crate::bitmat::{parity, BitMat};
use crate::error::{Error, Result};
use crate::gf2n::{BinPoly, FieldCtx};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LfsrSeq {
    charpoly: BinPoly,
    init: u64,
}

impl LfsrSeq {
    /// Sequence in G(charpoly) with initial terms a_0..a_{n-1} given as the
    /// low n bits of `init` (bit k is a_k).
    pub fn new(charpoly: BinPoly, init: u64) -> Result<LfsrSeq> {
        let n = charpoly.degree();
        if charpoly.is_zero() || n < 1 {
            return Err(Error::invalid("characteristic polynomial must have degree at least 1"));
        }
        if n < 64 && init >> n != 0 {
            return Err(Error::invalid(format!(
                "initial state {init:#x} has bits above n = {n}"
            )));
        }
        Ok(LfsrSeq { charpoly, init })
    }

    pub fn charpoly(&self) -> BinPoly {
        self.charpoly
    }

    pub fn order(&self) -> usize {
        self.charpoly.degree()
    }

    pub fn is_zero(&self) -> bool {
        self.init == 0
    }

    fn feedback_mask(&self) -> u64 {
        self.charpoly.0 & ((1u64 << self.order()) - 1)
    }

    fn step(&self, state: u64) -> u64 {
        let n = self.order();
        let newbit = parity(state & self.feedback_mask()) as u64;
        (state >> 1) | (newbit << (n - 1))
    }

    /// State s_k = (a_k, ..., a_{k+n-1}) as a mask with bit j = a_{k+j}.
    pub fn state(&self, k: usize) -> u64 {
        let mut s = self.init;
        for _ in 0..k {
            s = self.step(s);
        }
        s
    }

    pub fn term(&self, k: usize) -> u8 {
        (self.state(k) & 1) as u8
    }

    pub fn terms(&self, len: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(len);
        let mut s = self.init;
        for _ in 0..len {
            out.push((s & 1) as u8);
            s = self.step(s);
        }
        out
    }

    pub fn prefix(&self, len: usize) -> String {
        self.terms(len)
            .into_iter()
            .map(|b| if b == 1 { '1' } else { '0' })
            .collect()
    }

    /// The left shift La: same recurrence, state advanced by one.
    pub fn shift(&self) -> LfsrSeq {
        LfsrSeq {
            charpoly: self.charpoly,
            init: self.state(1),
        }
    }

    /// Termwise sum; both sides must carry the same characteristic polynomial.
    pub fn xor(&self, other: &LfsrSeq) -> Result<LfsrSeq> {
        if self.charpoly != other.charpoly {
            return Err(Error::invalid(format!(
                "cannot add sequences over different characteristic polynomials ({} vs {})",
                self.charpoly, other.charpoly
            )));
        }
        Ok(LfsrSeq {
            charpoly: self.charpoly,
            init: self.init ^ other.init,
        })
    }

    /// Does g(L) annihilate this sequence? Checked on a window of
    /// deg(charpoly) + deg(g) + 2n terms, which is more than enough to pin
    /// down a sequence obeying the recurrence.
    pub fn annihilated_by(&self, g: BinPoly) -> bool {
        if g.is_zero() {
            return true;
        }
        let n = self.order();
        let dg = g.degree();
        let window = n + dg + 2 * n;
        let terms = self.terms(window + dg);
        (0..window).all(|k| {
            let mut acc = 0u8;
            for i in 0..=dg {
                if (g.0 >> i) & 1 == 1 {
                    acc ^= terms[k + i];
                }
            }
            acc == 0
        })
    }

    /// Lowest-degree monic divisor of the characteristic polynomial that
    /// annihilates the sequence; 1 for the zero sequence.
    pub fn minimal_polynomial(&self) -> BinPoly {
        if self.is_zero() {
            return BinPoly::ONE;
        }
        let n = self.order();
        for d in 1..=n {
            for cand in (1u64 << d)..(1u64 << (d + 1)) {
                let g = BinPoly(cand);
                if g.divides(self.charpoly) && self.annihilated_by(g) {
                    return g;
                }
            }
        }
        unreachable!("charpoly always annihilates its own sequences")
    }

    /// Matrix whose rows are the states s_0..s_{n-1}.
    pub fn states_matrix(&self) -> BitMat {
        let n = self.order();
        let mut rows = Vec::with_capacity(n);
        let mut s = self.init;
        for _ in 0..n {
            rows.push(s);
            s = self.step(s);
        }
        BitMat { cols: n, rows }
    }

    pub fn states_full_rank(&self) -> bool {
        self.states_matrix().is_invertible()
    }
}

/// The n coordinate sequences of the field context: sequence i starts from
/// the i-th unit state and generates column i of the power table.
pub fn basis_sequences(ctx: &FieldCtx) -> Vec<LfsrSeq> {
    (0..ctx.n())
        .map(|i| LfsrSeq::new(ctx.modulus(), 1 << i).expect("context modulus is valid"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> BinPoly {
        s.parse().unwrap()
    }

    fn ctx(s: &str) -> FieldCtx {
        FieldCtx::new(poly(s)).unwrap()
    }

    #[test]
    fn coordinate_sequences_of_the_cubic_field() {
        let seqs = basis_sequences(&ctx("x^3+x+1"));
        assert_eq!(seqs[0].prefix(7), "1001011");
        assert_eq!(seqs[1].prefix(7), "0101110");
        assert_eq!(seqs[2].prefix(7), "0010111");
    }

    #[test]
    fn sequences_track_power_table_columns() {
        for s in ["x+1", "x^2+x+1", "x^3+x+1", "x^4+x^3+1", "x^5+x^2+1"] {
            let p = poly(s);
            let c = FieldCtx::with_table_len(p, 4 * p.degree()).unwrap();
            for (i, seq) in basis_sequences(&c).iter().enumerate() {
                for (k, &row) in c.power_table().iter().enumerate() {
                    assert_eq!(seq.term(k) as u64, (row >> i) & 1, "{s} seq {i} term {k}");
                }
            }
        }
    }

    #[test]
    fn shift_of_first_sequence_is_last_sequence() {
        let seqs = basis_sequences(&ctx("x^3+x+1"));
        assert_eq!(seqs[0].shift(), seqs[2]);
        assert_eq!(seqs[0].shift().prefix(10), seqs[2].prefix(10));
    }

    #[test]
    fn states_window_the_term_stream() {
        let seq = LfsrSeq::new(poly("x^4+x+1"), 0b0011).unwrap();
        for k in 0..20 {
            let st = seq.state(k);
            for j in 0..4 {
                assert_eq!((st >> j) & 1, seq.term(k + j) as u64);
            }
        }
    }

    #[test]
    fn xor_is_termwise_and_checks_charpoly() {
        let a = LfsrSeq::new(poly("x^3+x+1"), 0b001).unwrap();
        let b = LfsrSeq::new(poly("x^3+x+1"), 0b110).unwrap();
        let c = a.xor(&b).unwrap();
        for k in 0..16 {
            assert_eq!(c.term(k), a.term(k) ^ b.term(k));
        }
        let other = LfsrSeq::new(poly("x^3+x^2+1"), 0b001).unwrap();
        assert!(a.xor(&other).is_err());
    }

    #[test]
    fn charpoly_annihilates_and_unrelated_polys_do_not() {
        let f = poly("x^3+x+1");
        for init in 0..8u64 {
            let seq = LfsrSeq::new(f, init).unwrap();
            assert!(seq.annihilated_by(f));
        }
        // all-ones sequence: f has an odd number of terms, so f(L)1 = 1
        let ones = LfsrSeq::new(poly("x^3+1"), 0b111).unwrap();
        assert_eq!(ones.prefix(6), "111111");
        assert!(!ones.annihilated_by(f));
        assert!(ones.annihilated_by(poly("x+1")));
        assert!(ones.annihilated_by(BinPoly::ZERO));
    }

    #[test]
    fn minimal_polynomial_picks_the_smallest_divisor() {
        // all-ones under x^3+1 collapses to x+1
        let ones = LfsrSeq::new(poly("x^3+1"), 0b111).unwrap();
        assert_eq!(ones.minimal_polynomial(), poly("x+1"));
        // zero sequence collapses to 1
        let zero = LfsrSeq::new(poly("x^3+1"), 0).unwrap();
        assert_eq!(zero.minimal_polynomial(), BinPoly::ONE);
        // irreducible charpoly leaves no room between 1 and f
        for init in 1..8u64 {
            let seq = LfsrSeq::new(poly("x^3+x+1"), init).unwrap();
            assert_eq!(seq.minimal_polynomial(), poly("x^3+x+1"));
        }
    }

    #[test]
    fn minimal_polynomial_degree_matches_state_rank() {
        // across a few reducible charpolys the state rank equals the degree
        // of the minimal polynomial
        for (f, inits) in [
            ("x^3+1", 0..8u64),
            ("x^4+x^2", 0..16u64),
            ("x^4+x^3+x+1", 0..16u64),
        ] {
            let f = poly(f);
            for init in inits {
                let seq = LfsrSeq::new(f, init).unwrap();
                let rank = seq.states_matrix().rank();
                assert_eq!(
                    seq.minimal_polynomial().degree(),
                    rank,
                    "f={f} init={init:#b}"
                );
            }
        }
    }

    #[test]
    fn basis_states_are_full_rank_for_irreducible_moduli() {
        for s in ["x+1", "x^2+x+1", "x^3+x^2+1", "x^4+x+1", "x^5+x^4+x^3+x^2+1"] {
            for seq in basis_sequences(&ctx(s)) {
                assert!(seq.states_full_rank(), "{s}");
            }
        }
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(LfsrSeq::new(BinPoly::ZERO, 0).is_err());
        assert!(LfsrSeq::new(BinPoly::ONE, 0).is_err());
        assert!(LfsrSeq::new(poly("x^3+x+1"), 0b1000).is_err());
        assert!(LfsrSeq::new(poly("x^3+x+1"), 0b111).is_ok());
    }
}
