//! Arithmetic in F_{2^n} = F_2(w) for an irreducible modulus f of degree n.
//!
//! Elements are coordinate vectors over the basis {1, w, ..., w^{n-1}}; bit 0
//! of a coordinate mask is the constant term. The context precomputes the
//! coordinate rows of w^0..w^K, which double as the joint output columns of
//! the feedback shift registers attached to f.

use std::fmt;
use std::io;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Polynomial over F_2 packed into a word; bit i holds the coefficient of x^i.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinPoly(pub u64);

impl BinPoly {
    pub const ZERO: BinPoly = BinPoly(0);
    pub const ONE: BinPoly = BinPoly(1);
    pub const X: BinPoly = BinPoly(2);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Index of the highest set bit; 0 for constants and for the zero polynomial.
    pub fn degree(self) -> usize {
        if self.0 <= 1 {
            0
        } else {
            63 - self.0.leading_zeros() as usize
        }
    }

    pub fn divrem(self, divisor: BinPoly) -> (BinPoly, BinPoly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dd = divisor.degree();
        let mut rem = self.0;
        let mut quot = 0u64;
        while rem != 0 && BinPoly(rem).degree() >= dd {
            let shift = BinPoly(rem).degree() - dd;
            quot |= 1 << shift;
            rem ^= divisor.0 << shift;
        }
        (BinPoly(quot), BinPoly(rem))
    }

    pub fn divides(self, other: BinPoly) -> bool {
        !self.is_zero() && (other % self).is_zero()
    }

    /// Trial division by every polynomial of degree 1..=deg/2.
    /// Constants are units, not irreducible.
    pub fn is_irreducible(self) -> bool {
        let d = self.degree();
        if self.0 <= 1 || d == 0 {
            return false;
        }
        for fd in 1..=d / 2 {
            for cand in (1u64 << fd)..(1u64 << (fd + 1)) {
                if BinPoly(cand).divides(self) {
                    return false;
                }
            }
        }
        true
    }
}

impl std::ops::Mul for BinPoly {
    type Output = BinPoly;

    fn mul(self, rhs: BinPoly) -> BinPoly {
        let p = clmul(self.0, rhs.0);
        assert!(p >> 64 == 0, "polynomial product overflows 64 bits");
        BinPoly(p as u64)
    }
}

impl std::ops::Rem for BinPoly {
    type Output = BinPoly;

    fn rem(self, divisor: BinPoly) -> BinPoly {
        self.divrem(divisor).1
    }
}

/// Carry-less product of two words.
fn clmul(a: u64, b: u64) -> u128 {
    let mut acc = 0u128;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        let tz = b.trailing_zeros();
        shift += tz;
        acc ^= (a as u128) << shift;
        b >>= tz;
        b &= !1;
    }
    acc
}

impl fmt::Display for BinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "0");
        }
        let mut first = true;
        for i in (0..64).rev() {
            if (self.0 >> i) & 1 == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "1")?,
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinPoly({self})")
    }
}

impl FromStr for BinPoly {
    type Err = Error;

    /// Accepts sums of terms ("x^3+x+1") or a hex bitmask ("0xB").
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::parse("empty polynomial"));
        }
        if let Some(hex) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
            let bits = u64::from_str_radix(hex, 16)
                .map_err(|e| Error::parse(format!("bad hex polynomial {t:?}: {e}")))?;
            return Ok(BinPoly(bits));
        }
        if t == "0" {
            return Ok(BinPoly::ZERO);
        }
        let mut mask = 0u64;
        for term in t.split('+') {
            let term = term.trim();
            let bit = match term {
                "1" => 0,
                "x" | "X" => 1,
                _ => {
                    let exp = term
                        .strip_prefix("x^")
                        .or_else(|| term.strip_prefix("X^"))
                        .ok_or_else(|| Error::parse(format!("bad term {term:?} in {t:?}")))?;
                    let e: u32 = exp
                        .parse()
                        .map_err(|_| Error::parse(format!("bad exponent {exp:?} in {t:?}")))?;
                    if e > 63 {
                        return Err(Error::parse(format!("exponent {e} above 63 in {t:?}")));
                    }
                    e
                }
            };
            if (mask >> bit) & 1 == 1 {
                return Err(Error::parse(format!("duplicate term {term:?} in {t:?}")));
            }
            mask |= 1 << bit;
        }
        Ok(BinPoly(mask))
    }
}

pub const MAX_FIELD_DEGREE: usize = 8;

/// Field element: n coordinate bits over the basis {1, w, ..., w^{n-1}}.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fq {
    coords: u16,
    n: u8,
}

impl Fq {
    pub fn coords(self) -> u64 {
        self.coords as u64
    }

    pub fn n(self) -> usize {
        self.n as usize
    }

    pub fn is_zero(self) -> bool {
        self.coords == 0
    }

    pub(crate) fn raw(coords: u16, n: u8) -> Fq {
        Fq { coords, n }
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fq({:0width$b})", self.coords, width = self.n as usize)
    }
}

/// Precomputed context for one modulus: degree, coordinate table of w-powers.
#[derive(Clone, Debug)]
pub struct FieldCtx {
    n: usize,
    modulus: BinPoly,
    table: Vec<u64>,
}

impl FieldCtx {
    /// Context with the minimal table length K = 2n-2.
    pub fn new(modulus: BinPoly) -> Result<FieldCtx> {
        let n = modulus.degree();
        FieldCtx::with_table_len(modulus, if n >= 1 { 2 * n - 2 } else { 0 })
    }

    /// Context with rows w^0..w^k; k must be at least 2n-2.
    pub fn with_table_len(modulus: BinPoly, k: usize) -> Result<FieldCtx> {
        if modulus.is_zero() {
            return Err(Error::invalid("modulus must be nonzero"));
        }
        let n = modulus.degree();
        if n < 1 {
            return Err(Error::invalid("modulus must have degree at least 1"));
        }
        if n > MAX_FIELD_DEGREE {
            return Err(Error::invalid(format!(
                "modulus degree {n} above supported cap {MAX_FIELD_DEGREE}"
            )));
        }
        if !modulus.is_irreducible() {
            return Err(Error::ReduciblePolynomial(modulus.to_string()));
        }
        if k < 2 * n - 2 {
            return Err(Error::invalid(format!(
                "table length {k} below required 2n-2 = {}",
                2 * n - 2
            )));
        }
        let mut table = Vec::with_capacity(k + 1);
        let mut row = 1u64;
        for _ in 0..=k {
            table.push(row);
            row = step_row(row, n, modulus.0);
        }
        Ok(FieldCtx { n, modulus, table })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> BinPoly {
        self.modulus
    }

    /// Field size 2^n.
    pub fn q(&self) -> u64 {
        1 << self.n
    }

    /// Coordinate rows of w^0..w^K; row k bit i is the coefficient of w^i.
    pub fn power_table(&self) -> &[u64] {
        &self.table
    }

    pub fn zero(&self) -> Fq {
        Fq::raw(0, self.n as u8)
    }

    pub fn one(&self) -> Fq {
        Fq::raw(1, self.n as u8)
    }

    pub fn element(&self, coords: u64) -> Result<Fq> {
        if coords >> self.n != 0 {
            return Err(Error::invalid(format!(
                "coordinate mask {coords:#x} has bits above n = {}",
                self.n
            )));
        }
        Ok(Fq::raw(coords as u16, self.n as u8))
    }

    /// w^k for any k, via the table when it reaches that far.
    pub fn omega_pow(&self, k: usize) -> Fq {
        if let Some(&row) = self.table.get(k) {
            return Fq::raw(row as u16, self.n as u8);
        }
        let mut row = *self.table.last().expect("table is never empty");
        for _ in self.table.len() - 1..k {
            row = step_row(row, self.n, self.modulus.0);
        }
        Fq::raw(row as u16, self.n as u8)
    }

    fn check_n(&self, a: Fq) -> Result<()> {
        if a.n() != self.n {
            return Err(Error::invalid(format!(
                "element has {} coordinates, context expects {}",
                a.n(),
                self.n
            )));
        }
        Ok(())
    }

    pub fn add(&self, a: Fq, b: Fq) -> Result<Fq> {
        self.check_n(a)?;
        self.check_n(b)?;
        Ok(Fq::raw(a.coords ^ b.coords, self.n as u8))
    }

    pub fn mul(&self, a: Fq, b: Fq) -> Result<Fq> {
        self.check_n(a)?;
        self.check_n(b)?;
        Ok(Fq::raw(self.mul_bits(a.coords, b.coords), self.n as u8))
    }

    /// Product of coordinate masks: carry-less multiply, reduce by the modulus.
    pub(crate) fn mul_bits(&self, a: u16, b: u16) -> u16 {
        let mut p = clmul(a as u64, b as u64) as u64;
        let f = self.modulus.0;
        let n = self.n;
        while p >> n != 0 {
            let deg = 63 - p.leading_zeros() as usize;
            p ^= f << (deg - n);
        }
        p as u16
    }

    pub fn dot(&self, u: &[Fq], v: &[Fq]) -> Result<Fq> {
        if u.len() != v.len() {
            return Err(Error::invalid(format!(
                "dot product of vectors with lengths {} and {}",
                u.len(),
                v.len()
            )));
        }
        let mut acc = self.zero();
        for (&a, &b) in u.iter().zip(v) {
            acc = self.add(acc, self.mul(a, b)?)?;
        }
        Ok(acc)
    }

    pub fn pow(&self, a: Fq, mut e: u64) -> Result<Fq> {
        self.check_n(a)?;
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base)?;
            }
            base = self.mul(base, base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    pub fn inv(&self, a: Fq) -> Result<Fq> {
        self.check_n(a)?;
        if a.is_zero() {
            return Err(Error::invalid("zero has no multiplicative inverse"));
        }
        self.pow(a, self.q() - 2)
    }

    /// Multiplicative order of w, or None when w = 0 (modulus x).
    pub fn omega_order(&self) -> Option<u64> {
        let w = self.omega_pow(1);
        if w.is_zero() {
            return None;
        }
        let mut acc = w;
        let mut ord = 1;
        while acc != self.one() {
            acc = self.mul(acc, w).expect("same context");
            ord += 1;
        }
        Some(ord)
    }

    pub fn is_primitive(&self) -> bool {
        self.omega_order() == Some(self.q() - 1)
    }

    /// Power table as CSV with header k,l0,...,l{n-1}.
    pub fn write_power_table_csv<W: io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["k".to_string()];
        header.extend((0..self.n).map(|i| format!("l{i}")));
        w.write_record(&header).map_err(csv_err)?;
        for (k, &row) in self.table.iter().enumerate() {
            let mut rec = vec![k.to_string()];
            rec.extend((0..self.n).map(|i| ((row >> i) & 1).to_string()));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn csv_err(e: csv::Error) -> Error {
    Error::invalid(format!("csv: {e}"))
}

/// One multiply-by-w step on a coordinate row: shift up, feed the overflow
/// back through the low coefficients of the modulus.
fn step_row(row: u64, n: usize, modulus: u64) -> u64 {
    let mask = (1u64 << n) - 1;
    let hi = (row >> (n - 1)) & 1;
    let mut next = (row << 1) & mask;
    if hi == 1 {
        next ^= modulus & mask;
    }
    next
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

    /// Independent reducibility oracle: search for a factor pair with a
    /// schoolbook product, no shared code with BinPoly::mul.
    fn oracle_is_irreducible(p: u64) -> bool {
        fn deg(x: u64) -> i32 {
            63 - x.leading_zeros() as i32
        }
        if p <= 1 || deg(p) < 1 {
            return false;
        }
        let d = deg(p);
        for a in 2..(1u64 << d) {
            if deg(a) < 1 {
                continue;
            }
            for b in a..(1u64 << d) {
                if deg(a) + deg(b) != d {
                    continue;
                }
                let mut prod = 0u64;
                for i in 0..=deg(a) {
                    if (a >> i) & 1 == 1 {
                        prod ^= b << i;
                    }
                }
                if prod == p {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn parses_term_form_and_hex_form() {
        assert_eq!(poly("x^3+x+1").0, 0b1011);
        assert_eq!(poly("0xB").0, 0b1011);
        assert_eq!(poly("0x13").0, 0b10011);
        assert_eq!(poly("1+x+x^3").0, 0b1011);
        assert_eq!(poly("x").0, 0b10);
        assert_eq!(poly("1").0, 1);
        assert_eq!(poly("0").0, 0);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!("".parse::<BinPoly>().is_err());
        assert!("x^".parse::<BinPoly>().is_err());
        assert!("y+1".parse::<BinPoly>().is_err());
        assert!("x+x".parse::<BinPoly>().is_err());
        assert!("x^70".parse::<BinPoly>().is_err());
        assert!("0xZZ".parse::<BinPoly>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["x^3+x+1", "x^8+x^4+x^3+x^2+1", "x", "1", "0"] {
            assert_eq!(poly(s).to_string(), s);
        }
        let p = BinPoly(0b110101);
        assert_eq!(p.to_string().parse::<BinPoly>().unwrap(), p);
    }

    #[test]
    fn divrem_reconstructs_exhaustively() {
        for a in 0u64..(1 << 7) {
            for b in 1u64..(1 << 4) {
                let (q, r) = BinPoly(a).divrem(BinPoly(b));
                assert_eq!((q * BinPoly(b)).0 ^ r.0, a, "a={a:#b} b={b:#b}");
                assert!(r.is_zero() || r.degree() < BinPoly(b).degree() || b == 1);
                if b == 1 {
                    assert!(r.is_zero());
                }
            }
        }
    }

    #[test]
    fn irreducibility_spot_checks() {
        assert!(poly("x^3+x+1").is_irreducible());
        assert!(poly("x^4+x+1").is_irreducible());
        assert!(!poly("x^2+1").is_irreducible()); // (x+1)^2
        assert!(!poly("x^4+x^2+1").is_irreducible()); // (x^2+x+1)^2
        assert!(!poly("1").is_irreducible());
        assert!(!poly("0").is_irreducible());
        assert!(poly("x").is_irreducible());
        assert!(poly("x+1").is_irreducible());
    }

    #[test]
    fn irreducibility_matches_oracle_up_to_degree_6() {
        let mut counts = [0usize; 7];
        for p in 2u64..(1 << 7) {
            let got = BinPoly(p).is_irreducible();
            assert_eq!(got, oracle_is_irreducible(p), "mismatch at {p:#b}");
            if got {
                counts[BinPoly(p).degree()] += 1;
            }
        }
        // Known counts of monic irreducibles over F_2 by degree.
        assert_eq!(&counts[1..], &[2, 1, 2, 3, 6, 9]);
    }

    #[test]
    fn power_table_for_cubic_modulus() {
        let c = FieldCtx::with_table_len(poly("x^3+x+1"), 7).unwrap();
        assert_eq!(c.power_table(), &[1, 2, 4, 0b011, 0b110, 0b111, 0b101, 1]);
    }

    #[test]
    fn power_table_rows_satisfy_shift_feedback_recurrence() {
        for s in ["x+1", "x^2+x+1", "x^3+x^2+1", "x^4+x+1", "x^8+x^4+x^3+x^2+1"] {
            let c = FieldCtx::with_table_len(poly(s), 3 * 8).unwrap();
            let n = c.n();
            let f = c.modulus().0;
            for k in 0..c.power_table().len() - 1 {
                let row = c.power_table()[k];
                let next = c.power_table()[k + 1];
                for i in 0..n {
                    let prev = if i == 0 { 0 } else { (row >> (i - 1)) & 1 };
                    let feedback = ((f >> i) & 1) * ((row >> (n - 1)) & 1);
                    assert_eq!((next >> i) & 1, prev ^ feedback, "{s} row {k} coord {i}");
                }
            }
            // rows 0..n-1 are the basis itself
            for k in 0..n {
                assert_eq!(c.power_table()[k], 1 << k);
            }
        }
    }

    #[test]
    fn rejects_bad_context_requests() {
        assert!(matches!(
            FieldCtx::new(poly("x^2+1")),
            Err(Error::ReduciblePolynomial(_))
        ));
        assert!(FieldCtx::new(poly("0")).is_err());
        assert!(FieldCtx::new(poly("1")).is_err());
        assert!(FieldCtx::new(poly("x^9+x+1")).is_err());
        assert!(FieldCtx::with_table_len(poly("x^3+x+1"), 3).is_err());
        assert!(FieldCtx::with_table_len(poly("x^3+x+1"), 4).is_ok());
    }

    #[test]
    fn multiplication_follows_the_table() {
        let c = ctx("x^3+x+1");
        let w = c.omega_pow(1);
        let w2 = c.omega_pow(2);
        let prod = c.mul(w, w2).unwrap();
        assert_eq!(prod.coords(), 0b011); // w^3 = w + 1
        assert_eq!(c.mul(c.omega_pow(3), c.omega_pow(4)).unwrap(), c.omega_pow(7));
        // powers beyond the table length still come out right
        assert_eq!(c.omega_pow(7).coords(), 1);
        assert_eq!(c.omega_pow(14).coords(), 1);
    }

    #[test]
    fn addition_is_coordinatewise_xor() {
        let c = ctx("x^3+x+1");
        let a = c.element(0b101).unwrap();
        let b = c.element(0b011).unwrap();
        assert_eq!(c.add(a, b).unwrap().coords(), 0b110);
        assert!(c.add(a, a).unwrap().is_zero());
    }

    #[test]
    fn field_axioms_hold_exhaustively_for_small_degrees() {
        for s in ["x+1", "x^2+x+1", "x^3+x+1", "x^3+x^2+1", "x^4+x+1", "x^4+x^3+1"] {
            let c = ctx(s);
            let q = c.q();
            let els: Vec<Fq> = (0..q).map(|i| c.element(i).unwrap()).collect();
            for &a in &els {
                for &b in &els {
                    assert_eq!(c.mul(a, b).unwrap(), c.mul(b, a).unwrap());
                    for &d in &els {
                        let lhs = c.mul(a, c.add(b, d).unwrap()).unwrap();
                        let rhs = c.add(c.mul(a, b).unwrap(), c.mul(a, d).unwrap()).unwrap();
                        assert_eq!(lhs, rhs, "distributivity in {s}");
                        let assoc_l = c.mul(c.mul(a, b).unwrap(), d).unwrap();
                        let assoc_r = c.mul(a, c.mul(b, d).unwrap()).unwrap();
                        assert_eq!(assoc_l, assoc_r, "associativity in {s}");
                    }
                }
                if !a.is_zero() {
                    let ai = c.inv(a).unwrap();
                    assert_eq!(c.mul(a, ai).unwrap(), c.one());
                }
            }
        }
    }

    #[test]
    fn modulus_has_omega_as_root() {
        for p in 2u64..(1 << 9) {
            let bp = BinPoly(p);
            if !bp.is_irreducible() || bp.degree() < 1 || bp == BinPoly::X {
                continue;
            }
            let c = FieldCtx::new(bp).unwrap();
            // Horner evaluation of f at w must vanish
            let w = c.omega_pow(1);
            let mut acc = c.zero();
            for i in (0..=bp.degree()).rev() {
                acc = c.mul(acc, w).unwrap();
                if (p >> i) & 1 == 1 {
                    acc = c.add(acc, c.one()).unwrap();
                }
            }
            assert!(acc.is_zero(), "f(w) != 0 for {bp}");
        }
    }

    #[test]
    fn omega_order_divides_group_order() {
        for p in 2u64..(1 << 9) {
            let bp = BinPoly(p);
            if !bp.is_irreducible() || bp == BinPoly::X {
                continue;
            }
            let c = FieldCtx::new(bp).unwrap();
            let ord = c.omega_order().unwrap();
            assert_eq!((c.q() - 1) % ord, 0, "order of w under {bp}");
            if c.is_primitive() {
                for k in 1..(c.q() - 1) as usize {
                    assert_ne!(c.omega_pow(k), c.one(), "premature cycle under {bp}");
                }
            }
        }
        // x^4+x^3+x^2+x+1 is irreducible but not primitive: w has order 5
        let c = ctx("x^4+x^3+x^2+x+1");
        assert_eq!(c.omega_order(), Some(5));
        assert!(!c.is_primitive());
    }

    #[test]
    fn dot_products_and_length_checks() {
        let c = ctx("x^3+x+1");
        let w = |k| c.omega_pow(k);
        let u = [w(1), c.one(), c.zero()];
        let v = [w(2), w(1), w(5)];
        // w*w^2 + 1*w + 0 = (w+1) + w = 1
        assert_eq!(c.dot(&u, &v).unwrap(), c.one());
        assert!(c.dot(&u, &v[..2]).is_err());
    }

    #[test]
    fn mismatched_widths_are_rejected() {
        let c3 = ctx("x^3+x+1");
        let c2 = ctx("x^2+x+1");
        let a = c2.one();
        assert!(c3.add(a, c3.one()).is_err());
        assert!(c3.mul(a, c3.one()).is_err());
        assert!(c3.element(0b1000).is_err());
        assert!(c3.element(0b111).is_ok());
    }

    #[test]
    fn power_table_csv_layout() {
        let c = ctx("x^2+x+1");
        let mut buf = Vec::new();
        c.write_power_table_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "k,l0,l1\n0,1,0\n1,0,1\n2,1,1\n");
    }

    #[test]
    fn degenerate_modulus_x_yields_omega_zero() {
        let c = ctx("x");
        assert_eq!(c.n(), 1);
        assert!(c.omega_pow(1).is_zero());
        assert_eq!(c.omega_order(), None);
        assert_eq!(c.power_table(), &[1]);
    }
}
