//! Closed-form weight machinery for codes whose defining set splits into n
//! layers over F_2^m.
//!
//! A message v over F_{2^n}^m decomposes into n binary vectors (alphas). The
//! n combination matrices M_i tie that decomposition to the coordinate
//! sequences of the field: row r of M_i is state r of the i-th coordinate
//! sequence. Spanning the rows over F_2 yields a 2^n-element space of
//! coefficient tuples; realizing each tuple against the alphas and summing
//! characters over the layers produces exact codeword weights without
//! touching the code itself.

use crate::bitmat::BitMat;
use crate::error::{Error, Result};
use crate::gf2n::{FieldCtx, Fq};
use crate::simplicial::{chi, phi, CoordSet, Vec2m};

/// The antidiagonal basis matrices A_0..A_{2n-2} and the combinations
/// M_i = A_i + sum_{j=n}^{2n-2} l_{j,i} A_j for one field context.
#[derive(Clone, Debug)]
pub struct EtaSystem {
    n: usize,
    a_mats: Vec<BitMat>,
    m_mats: Vec<BitMat>,
}

impl EtaSystem {
    pub fn new(ctx: &FieldCtx) -> EtaSystem {
        let n = ctx.n();
        let mut a_mats = Vec::with_capacity(2 * n - 1);
        for k in 0..=2 * n - 2 {
            let mut a = BitMat::zero(n, n);
            for r in 0..n {
                if k >= r && k - r < n {
                    a.set(r, k - r, true);
                }
            }
            a_mats.push(a);
        }
        let table = ctx.power_table();
        let mut m_mats = Vec::with_capacity(n);
        for i in 0..n {
            let mut m = BitMat::zero(n, n);
            for (j, a) in a_mats.iter().enumerate() {
                if (table[j] >> i) & 1 == 1 {
                    m.xor_assign(a);
                }
            }
            // row r must reproduce state r of coordinate sequence i
            for r in 0..n {
                let state: u64 = (0..n).map(|c| ((table[r + c] >> i) & 1) << c).sum();
                assert_eq!(m.rows[r], state, "combination matrix row/state mismatch");
            }
            m_mats.push(m);
        }
        EtaSystem { n, a_mats, m_mats }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a_mats(&self) -> &[BitMat] {
        &self.a_mats
    }

    pub fn m_mats(&self) -> &[BitMat] {
        &self.m_mats
    }

    /// Every nonzero F_2-combination of the M_i must be invertible; this is
    /// what makes the realized coefficient tuples range over bases.
    pub fn all_combinations_invertible(&self) -> bool {
        let n = self.n;
        (1u32..1 << n).all(|s| {
            let mut acc = BitMat::zero(n, n);
            for i in 0..n {
                if (s >> i) & 1 == 1 {
                    acc.xor_assign(&self.m_mats[i]);
                }
            }
            acc.is_invertible()
        })
    }
}

/// All 2^n F_2-combinations of the rows of the M_i, indexed by subset mask.
/// Component j of tuple S is the coordinate mask XOR_{i in S} M_i[j].
#[derive(Clone, Debug)]
pub struct WSpace {
    n: usize,
    tuples: Vec<Vec<u16>>,
}

impl WSpace {
    pub fn new(es: &EtaSystem) -> WSpace {
        let n = es.n();
        let mut tuples = Vec::with_capacity(1 << n);
        for s in 0u32..1 << n {
            let mut comps = vec![0u16; n];
            for i in 0..n {
                if (s >> i) & 1 == 1 {
                    for (c, row) in comps.iter_mut().zip(&es.m_mats()[i].rows) {
                        *c ^= *row as u16;
                    }
                }
            }
            tuples.push(comps);
        }
        WSpace { n, tuples }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coefficient tuple for subset mask s.
    pub fn tuple(&self, s: usize) -> &[u16] {
        &self.tuples[s]
    }
}

/// A message over F_{2^n}^m in sliced form: alphas[i] collects coordinate i
/// of every symbol.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MsgDecomp {
    alphas: Vec<Vec2m>,
}

impl MsgDecomp {
    pub fn new(alphas: Vec<Vec2m>) -> Result<MsgDecomp> {
        if alphas.is_empty() {
            return Err(Error::invalid("message decomposition needs at least one slice"));
        }
        let m = alphas[0].m();
        if alphas.iter().any(|a| a.m() != m) {
            return Err(Error::invalid("message slices with mixed ambient dimensions"));
        }
        Ok(MsgDecomp { alphas })
    }

    pub fn from_message(ctx: &FieldCtx, v: &[Fq]) -> Result<MsgDecomp> {
        if v.is_empty() {
            return Err(Error::invalid("empty message"));
        }
        let n = ctx.n();
        let m = v.len();
        for &sym in v {
            if sym.n() != n {
                return Err(Error::invalid("message symbol width differs from context"));
            }
        }
        let mut alphas = Vec::with_capacity(n);
        for i in 0..n {
            let mut bits = 0u64;
            for (pos, &sym) in v.iter().enumerate() {
                bits |= ((sym.coords() >> i) & 1) << pos;
            }
            alphas.push(Vec2m::new(bits, m)?);
        }
        Ok(MsgDecomp { alphas })
    }

    pub fn to_message(&self, ctx: &FieldCtx) -> Result<Vec<Fq>> {
        if self.alphas.len() != ctx.n() {
            return Err(Error::invalid(format!(
                "{} slices cannot rebuild a message over a degree-{} field",
                self.alphas.len(),
                ctx.n()
            )));
        }
        let m = self.m();
        (0..m)
            .map(|pos| {
                let coords: u64 = self
                    .alphas
                    .iter()
                    .enumerate()
                    .map(|(i, a)| ((a.bits() >> pos) & 1) << i)
                    .sum();
                ctx.element(coords)
            })
            .collect()
    }

    pub fn alphas(&self) -> &[Vec2m] {
        &self.alphas
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    pub fn m(&self) -> usize {
        self.alphas[0].m()
    }

    pub fn is_zero(&self) -> bool {
        self.alphas.iter().all(|a| a.is_zero())
    }

    /// Realize a coefficient mask against the alphas: XOR of the slices
    /// selected by the bits.
    pub fn realize(&self, coeffs: u16) -> Vec2m {
        let mut acc = Vec2m::zero(self.m());
        for (i, &a) in self.alphas.iter().enumerate() {
            if (coeffs >> i) & 1 == 1 {
                acc = acc.xor(a);
            }
        }
        acc
    }
}

fn check_shapes(ws: &WSpace, msg: &MsgDecomp, n_layers: usize) -> Result<()> {
    if msg.n() != ws.n() {
        return Err(Error::invalid(format!(
            "message has {} slices, coefficient space expects {}",
            msg.n(),
            ws.n()
        )));
    }
    if n_layers != ws.n() {
        return Err(Error::invalid(format!(
            "{} layers for a {}-layer construction",
            n_layers,
            ws.n()
        )));
    }
    let nm = ws.n() * msg.m();
    if nm > 60 {
        return Err(Error::invalid(format!(
            "ambient bit size n*m = {nm} too large for exact character accumulation"
        )));
    }
    Ok(())
}

fn layer_sizes_product(layers: &[Vec<Vec2m>]) -> u128 {
    layers.iter().map(|l| l.len() as u128).product()
}

/// Weight of the codeword of `msg` in the code defined on the layered set D
/// (zero position excluded): |D| minus the averaged character-product sum.
pub fn cd_star_weight(ws: &WSpace, msg: &MsgDecomp, layers: &[Vec<Vec2m>]) -> Result<u64> {
    check_shapes(ws, msg, layers.len())?;
    let m = msg.m();
    for l in layers {
        if l.iter().any(|e| e.m() != m) {
            return Err(Error::invalid("layer member with mismatched ambient dimension"));
        }
    }
    let d_size = layer_sizes_product(layers) as i128;
    let mut acc: i128 = 0;
    for s in 0..ws.len() {
        let tuple = ws.tuple(s);
        let mut prod: i128 = 1;
        for (j, layer) in layers.iter().enumerate() {
            let x = msg.realize(tuple[j]);
            prod *= chi(x, layer) as i128;
            if prod == 0 {
                break;
            }
        }
        acc += prod;
    }
    let q = 1i128 << ws.n();
    let num = d_size * q - acc;
    debug_assert!(num % q == 0 && num >= 0);
    Ok((num / q) as u64)
}

/// Weight of the codeword of `msg` over the complement of the layered set D
/// in F_{2^n}^m.
pub fn cd_complement_weight(ws: &WSpace, msg: &MsgDecomp, layers: &[Vec<Vec2m>]) -> Result<u64> {
    check_shapes(ws, msg, layers.len())?;
    let m = msg.m();
    let ambient: i128 = 1i128 << (ws.n() * m);
    let d_size = layer_sizes_product(layers) as i128;
    let dc_size = ambient - d_size;
    let mut acc: i128 = 0;
    for s in 0..ws.len() {
        let tuple = ws.tuple(s);
        let mut prod: i128 = 1;
        let mut all_zero = true;
        for (j, layer) in layers.iter().enumerate() {
            let x = msg.realize(tuple[j]);
            all_zero &= x.is_zero();
            if prod != 0 {
                prod *= chi(x, layer) as i128;
            }
        }
        acc += if all_zero { ambient } else { 0 } - prod;
    }
    let q = 1i128 << ws.n();
    let num = dc_size * q - acc;
    debug_assert!(num % q == 0 && num >= 0);
    Ok((num / q) as u64)
}

/// The two weights above must split (2^n - 1) * 2^{n(m-1)} for nonzero
/// messages and vanish together at zero.
pub fn complementarity_holds(ws: &WSpace, msg: &MsgDecomp, layers: &[Vec<Vec2m>]) -> Result<bool> {
    let star = cd_star_weight(ws, msg, layers)?;
    let comp = cd_complement_weight(ws, msg, layers)?;
    let n = ws.n();
    let m = msg.m();
    let rhs = if msg.is_zero() {
        0
    } else {
        ((1u64 << n) - 1) << (n * (m - 1))
    };
    Ok(star + comp == rhs)
}

/// Number of coefficient tuples whose realizations avoid every L_j. Always a
/// power of two between 1 and 2^n.
pub fn theta(ws: &WSpace, msg: &MsgDecomp, ls: &[CoordSet]) -> Result<u64> {
    check_shapes(ws, msg, ls.len())?;
    let m = msg.m();
    if ls.iter().any(|l| l.m() != m) {
        return Err(Error::invalid("index set with mismatched ambient dimension"));
    }
    let mut count = 0u64;
    for s in 0..ws.len() {
        let tuple = ws.tuple(s);
        if ls
            .iter()
            .enumerate()
            .all(|(j, &l)| phi(msg.realize(tuple[j]), l))
        {
            count += 1;
        }
    }
    Ok(count)
}

/// Closed form for generated-complex layers: 2^{sum|L_i| - n} (2^n - theta).
pub fn cd_star_weight_from_theta(n: usize, sum_l: usize, theta: u64) -> u64 {
    let scaled = ((1u128 << sum_l) * ((1u128 << n) - theta as u128)) >> n;
    debug_assert_eq!(
        scaled << n,
        (1u128 << sum_l) * ((1u128 << n) - theta as u128)
    );
    scaled as u64
}
