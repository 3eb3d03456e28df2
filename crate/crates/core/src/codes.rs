//! Defining-set codes over F_{2^n} and exact weight-distribution reports.
//!
//! A defining set is a layered product: one subset of F_2^m per power of w,
//! combined as d_0 + w d_1 + ... + w^{n-1} d_{n-1}. The two variants drop
//! the zero vector (`DStar`) or complement the product in F_{2^n}^m
//! (`DComplement`). Every set is materialized in one canonical order, so a
//! codeword is reproducible bit for bit across runs and machines.
//!
//! Reports enumerate the full message space with a Gray-code walk: stepping
//! to the next message XORs a single precomputed generator row into the
//! current codeword, and symbols are packed eight to a word so the nonzero
//! count is a handful of word operations.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;
use std::thread;

use serde::{Deserialize, Serialize};

use crate::bitmat;
use crate::error::{Error, Result};
use crate::gf2n::{FieldCtx, Fq};
use crate::simplicial::{CoordSet, GenComplex, Vec2m};

/// Messages a single report may enumerate unless overridden.
pub const DEFAULT_MAX_MESSAGES: u64 = 1 << 20;
/// Longest defining set a report will materialize unless overridden.
pub const DEFAULT_MAX_LENGTH: u64 = 1 << 12;
/// Exhaustive minimality scans are skipped above this many codewords.
pub const MINIMALITY_CODEWORD_CAP: u128 = 1 << 16;

/// Environment override for [`EnumBudget::max_messages`].
pub const ENV_MAX_MESSAGES: &str = "SIMPLICIAL_CODES_MAX_MESSAGES";
/// Environment override for [`EnumBudget::max_length`].
pub const ENV_MAX_LENGTH: &str = "SIMPLICIAL_CODES_MAX_LENGTH";

// Complement materialization touches every point of F_{2^n}^m once; the
// marker bit-vector for 2^26 points is 8 MiB, which is where we stop.
const MAX_COMPLEMENT_BITS: usize = 26;

/// Hard limits on enumeration work. Exceeding a limit is an error; nothing
/// is ever sampled or truncated silently.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumBudget {
    pub max_messages: u64,
    pub max_length: u64,
}

impl Default for EnumBudget {
    fn default() -> Self {
        EnumBudget {
            max_messages: DEFAULT_MAX_MESSAGES,
            max_length: DEFAULT_MAX_LENGTH,
        }
    }
}

impl EnumBudget {
    /// Default budget with any environment overrides applied.
    pub fn from_env() -> Result<EnumBudget> {
        let mut budget = EnumBudget::default();
        if let Some(v) = read_env(ENV_MAX_MESSAGES)? {
            budget.max_messages = v;
        }
        if let Some(v) = read_env(ENV_MAX_LENGTH)? {
            budget.max_length = v;
        }
        Ok(budget)
    }

    pub fn check_messages(&self, required: u128) -> Result<()> {
        if required > u128::from(self.max_messages) {
            return Err(Error::BudgetExceeded {
                quantity: "messages",
                required,
                allowed: u128::from(self.max_messages),
            });
        }
        Ok(())
    }

    pub fn check_length(&self, required: u128) -> Result<()> {
        if required > u128::from(self.max_length) {
            return Err(Error::BudgetExceeded {
                quantity: "code length",
                required,
                allowed: u128::from(self.max_length),
            });
        }
        Ok(())
    }
}

fn read_env(name: &str) -> Result<Option<u64>> {
    let Ok(raw) = std::env::var(name) else {
        return Ok(None);
    };
    match raw.trim().parse::<u64>() {
        Ok(v) if v > 0 => Ok(Some(v)),
        _ => Err(Error::invalid(format!(
            "{name} must be a positive integer, got {raw:?}"
        ))),
    }
}

/// Which slice of the layered product forms the code's defining set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    /// The product minus the zero vector.
    DStar,
    /// Everything outside the product.
    DComplement,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::DStar => "dstar",
            Variant::DComplement => "dcomp",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Variant> {
        match s {
            "dstar" => Ok(Variant::DStar),
            "dcomp" | "dcomplement" => Ok(Variant::DComplement),
            other => Err(Error::parse(format!(
                "unknown variant {other:?}, expected \"dstar\" or \"dcomp\""
            ))),
        }
    }
}

/// One layer of the product: the span of some coordinates, or an arbitrary
/// explicit subset of F_2^m. Claim checks only apply to spanned layers.
#[derive(Clone, Debug)]
pub enum Layer {
    Generated(GenComplex),
    Explicit(Vec<Vec2m>),
}

impl Layer {
    /// Members as ascending bitmasks, deduplicated.
    fn member_masks(&self, m: usize) -> Result<Vec<u64>> {
        match self {
            Layer::Generated(g) => {
                if g.m() != m {
                    return Err(Error::invalid(format!(
                        "layer lives in dimension {}, defining set in {m}",
                        g.m()
                    )));
                }
                Ok(g.members().iter().map(|x| x.bits()).collect())
            }
            Layer::Explicit(points) => {
                let mut masks = Vec::with_capacity(points.len());
                for x in points {
                    if x.m() != m {
                        return Err(Error::invalid(format!(
                            "layer point lives in dimension {}, defining set in {m}",
                            x.m()
                        )));
                    }
                    masks.push(x.bits());
                }
                masks.sort_unstable();
                masks.dedup();
                Ok(masks)
            }
        }
    }
}

/// Per-instance facts the claim families condition on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisFlags {
    pub all_layers_nonempty: bool,
    /// L_i minus the other layers' union is nonempty for every i < n-1.
    pub r_prefix_nonempty: bool,
    pub some_layer_proper: bool,
    pub all_layers_equal: bool,
    pub union_proper: bool,
    /// Sum of layer dimensions at most nm - (n+1); gates the field
    /// complement code's minimality claim.
    pub minimality_margin_field: bool,
    /// Sum of layer dimensions at most nm - 2; gates the binary complement
    /// code's minimality claim.
    pub minimality_margin_binary: bool,
}

/// Hypothesis flags for a layer tuple given directly as coordinate sets,
/// without building a defining set first.
pub fn hypothesis_flags_for(sets: &[CoordSet], m: usize) -> HypothesisFlags {
    flags_from_sets(sets, m)
}

fn flags_from_sets(sets: &[CoordSet], m: usize) -> HypothesisFlags {
    let n = sets.len();
    let r_prefix_nonempty = (0..n.saturating_sub(1)).all(|i| {
        let mut others = CoordSet::empty(m);
        for (j, s) in sets.iter().enumerate() {
            if j != i {
                others = others.union(*s);
            }
        }
        !sets[i].minus(others).is_empty()
    });
    let union = sets
        .iter()
        .fold(CoordSet::empty(m), |acc, s| acc.union(*s));
    let sum: usize = sets.iter().map(|s| s.len()).sum();
    HypothesisFlags {
        all_layers_nonempty: sets.iter().all(|s| !s.is_empty()),
        r_prefix_nonempty,
        some_layer_proper: sets.iter().any(|s| s.is_proper()),
        all_layers_equal: sets.windows(2).all(|w| w[0] == w[1]),
        union_proper: union.is_proper(),
        minimality_margin_field: sum + n < n * m,
        minimality_margin_binary: sum + 2 <= n * m,
    }
}

/// A materialized defining set: the chosen variant of the layered product,
/// in canonical ascending key order.
///
/// The key of a product tuple concatenates the layer bitmasks, layer i in
/// bits [i*m, (i+1)*m). Keys biject with vectors of F_{2^n}^m because
/// layer i holds exactly the i-th basis coordinate of every entry.
#[derive(Clone, Debug)]
pub struct DefiningSet {
    ctx: FieldCtx,
    m: usize,
    variant: Variant,
    member_lists: Vec<Vec<u64>>,
    layer_sets: Option<Vec<CoordSet>>,
    keys: Vec<u64>,
    elements: Vec<Vec<Fq>>,
}

impl DefiningSet {
    /// Materializes the chosen variant. Layer count must equal the field
    /// degree; the expected length is checked against the budget before
    /// anything is allocated.
    pub fn build(
        ctx: &FieldCtx,
        m: usize,
        layers: &[Layer],
        variant: Variant,
        budget: &EnumBudget,
    ) -> Result<DefiningSet> {
        let n = ctx.n();
        if layers.len() != n {
            return Err(Error::invalid(format!(
                "field of degree {n} needs {n} layers, got {}",
                layers.len()
            )));
        }
        if m == 0 {
            return Err(Error::invalid("ambient dimension must be positive"));
        }
        if n * m > 60 {
            return Err(Error::invalid(format!(
                "n*m = {} exceeds the 60-bit key limit",
                n * m
            )));
        }
        let mut member_lists = Vec::with_capacity(n);
        let mut sets = Vec::with_capacity(n);
        let mut all_generated = true;
        for layer in layers {
            member_lists.push(layer.member_masks(m)?);
            match layer {
                Layer::Generated(g) => sets.push(g.coords()),
                Layer::Explicit(_) => all_generated = false,
            }
        }
        let keys = variant_keys(&member_lists, m, variant, budget)?;
        let elements = keys
            .iter()
            .map(|&k| element_from_key(ctx, m, k))
            .collect::<Result<Vec<_>>>()?;
        Ok(DefiningSet {
            ctx: ctx.clone(),
            m,
            variant,
            member_lists,
            layer_sets: all_generated.then_some(sets),
            keys,
            elements,
        })
    }

    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.ctx.n()
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Canonical keys, ascending.
    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    /// Set elements as vectors over F_{2^n}, in key order.
    pub fn elements(&self) -> &[Vec<Fq>] {
        &self.elements
    }

    /// The generating coordinate sets, when every layer was spanned.
    pub fn layer_sets(&self) -> Option<&[CoordSet]> {
        self.layer_sets.as_deref()
    }

    /// Layer members as vectors, in ascending mask order.
    pub fn layer_member_vecs(&self) -> Vec<Vec<Vec2m>> {
        self.member_lists
            .iter()
            .map(|l| {
                l.iter()
                    .map(|&mask| Vec2m::new(mask, self.m).expect("masks validated at build"))
                    .collect()
            })
            .collect()
    }

    pub fn hypothesis_flags(&self) -> Option<HypothesisFlags> {
        self.layer_sets
            .as_ref()
            .map(|sets| flags_from_sets(sets, self.m))
    }
}

/// Walks the full layered product, fastest digit first, which visits keys
/// in ascending order because member lists are sorted.
fn for_each_product_key(lists: &[Vec<u64>], m: usize, mut f: impl FnMut(u64)) {
    if lists.iter().any(|l| l.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; lists.len()];
    loop {
        let mut key = 0u64;
        for (i, l) in lists.iter().enumerate() {
            key |= l[idx[i]] << (i * m);
        }
        f(key);
        let mut i = 0;
        loop {
            if i == lists.len() {
                return;
            }
            idx[i] += 1;
            if idx[i] < lists[i].len() {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

fn variant_keys(
    lists: &[Vec<u64>],
    m: usize,
    variant: Variant,
    budget: &EnumBudget,
) -> Result<Vec<u64>> {
    let n = lists.len();
    let size: u128 = lists.iter().map(|l| l.len() as u128).product();
    match variant {
        Variant::DStar => {
            let zero_in = lists.iter().all(|l| l.first() == Some(&0));
            let expected = size - u128::from(zero_in);
            budget.check_length(expected)?;
            let mut keys = Vec::with_capacity(expected as usize);
            for_each_product_key(lists, m, |k| {
                if k != 0 {
                    keys.push(k);
                }
            });
            Ok(keys)
        }
        Variant::DComplement => {
            let nm = n * m;
            budget.check_length((1u128 << nm) - size)?;
            if nm > MAX_COMPLEMENT_BITS {
                return Err(Error::invalid(format!(
                    "complement materialization supports n*m <= {MAX_COMPLEMENT_BITS}, got {nm}"
                )));
            }
            let mut seen = vec![0u64; (1usize << nm).div_ceil(64)];
            for_each_product_key(lists, m, |k| {
                seen[(k / 64) as usize] |= 1 << (k % 64);
            });
            let mut keys = Vec::with_capacity(((1u128 << nm) - size) as usize);
            for k in 0..(1u64 << nm) {
                if seen[(k / 64) as usize] >> (k % 64) & 1 == 0 {
                    keys.push(k);
                }
            }
            Ok(keys)
        }
    }
}

fn element_from_key(ctx: &FieldCtx, m: usize, key: u64) -> Result<Vec<Fq>> {
    let n = ctx.n();
    (0..m)
        .map(|pos| {
            let mut bits = 0u64;
            for i in 0..n {
                bits |= (key >> (i * m + pos) & 1) << i;
            }
            ctx.element(bits)
        })
        .collect()
}

/// One evaluation of a message against the whole defining set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Codeword {
    symbols: Vec<Fq>,
}

impl Codeword {
    pub fn symbols(&self) -> &[Fq] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn weight(&self) -> u64 {
        self.symbols.iter().filter(|s| !s.is_zero()).count() as u64
    }
}

/// Inner products of `v` with every set element, in canonical order.
pub fn encode(ds: &DefiningSet, v: &[Fq]) -> Result<Codeword> {
    if v.len() != ds.m {
        return Err(Error::invalid(format!(
            "message length {} does not match ambient dimension {}",
            v.len(),
            ds.m
        )));
    }
    let symbols = ds
        .elements
        .iter()
        .map(|d| ds.ctx.dot(v, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(Codeword { symbols })
}

/// The product of the layers viewed inside F_2^{nm}: the same canonical
/// keys, now as binary defining vectors. Variants are applied at report
/// time, so one expansion serves both.
#[derive(Clone, Debug)]
pub struct SubfieldCode {
    n: usize,
    m: usize,
    member_lists: Vec<Vec<u64>>,
    layer_sets: Option<Vec<CoordSet>>,
}

impl SubfieldCode {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ambient_bits(&self) -> usize {
        self.n * self.m
    }

    /// Size of the full product, before any variant is applied.
    pub fn product_size(&self) -> u128 {
        self.member_lists.iter().map(|l| l.len() as u128).product()
    }

    pub fn layer_sets(&self) -> Option<&[CoordSet]> {
        self.layer_sets.as_deref()
    }

    pub fn hypotheses(&self) -> Option<HypothesisFlags> {
        self.layer_sets
            .as_ref()
            .map(|sets| flags_from_sets(sets, self.m))
    }

    /// Every product key in ascending order.
    pub fn full_product_keys(&self, budget: &EnumBudget) -> Result<Vec<u64>> {
        budget.check_length(self.product_size())?;
        let mut keys = Vec::with_capacity(self.product_size() as usize);
        for_each_product_key(&self.member_lists, self.m, |k| keys.push(k));
        Ok(keys)
    }

    /// Binary defining vectors of the requested variant, ascending.
    pub fn materialize_keys(&self, variant: Variant, budget: &EnumBudget) -> Result<Vec<u64>> {
        variant_keys(&self.member_lists, self.m, variant, budget)
    }
}

pub fn subfield_expand(ds: &DefiningSet) -> SubfieldCode {
    SubfieldCode {
        n: ds.n(),
        m: ds.m,
        member_lists: ds.member_lists.clone(),
        layer_sets: ds.layer_sets.clone(),
    }
}

/// Best known minimum distances, keyed by (q, length, k).
#[derive(Clone, Debug, Default)]
pub struct BoundsTable {
    entries: HashMap<(u64, u64, usize), u64>,
}

#[derive(Deserialize)]
struct BoundsRow {
    q: u64,
    length: u64,
    k: usize,
    best_d: u64,
}

impl BoundsTable {
    /// Reads a CSV with header `q,length,k,best_d`. Later duplicates win.
    pub fn from_reader<R: Read>(reader: R) -> Result<BoundsTable> {
        let mut table = BoundsTable::default();
        let mut csv = csv::Reader::from_reader(reader);
        for record in csv.deserialize::<BoundsRow>() {
            let row = record.map_err(|e| Error::parse(format!("bounds table: {e}")))?;
            table.insert(row.q, row.length, row.k, row.best_d);
        }
        Ok(table)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<BoundsTable> {
        BoundsTable::from_reader(File::open(path)?)
    }

    pub fn insert(&mut self, q: u64, length: u64, k: usize, best_d: u64) {
        self.entries.insert((q, length, k), best_d);
    }

    pub fn lookup(&self, q: u64, length: u64, k: usize) -> Option<u64> {
        self.entries.get(&(q, length, k)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Knobs for report computation.
#[derive(Clone, Debug, Default)]
pub struct ReportOptions {
    pub budget: EnumBudget,
    /// Skip the support-cover scan entirely when false.
    pub check_exhaustive_minimal: bool,
    pub bounds: Option<BoundsTable>,
    /// Enumeration worker threads; 0 asks the OS.
    pub workers: usize,
}

impl ReportOptions {
    pub fn new() -> ReportOptions {
        ReportOptions {
            budget: EnumBudget::default(),
            check_exhaustive_minimal: true,
            bounds: None,
            workers: 0,
        }
    }
}

/// Everything a weight enumeration establishes about one code.
///
/// `weights` lists (w, A_w) pairs ascending, including (0, 1). The weight
/// counts always sum to q^k: multiplicity from a non-injective encoding is
/// divided out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeReport {
    pub q: u64,
    pub length: u64,
    pub k: usize,
    pub d: u64,
    pub weights: Vec<(u64, u64)>,
    pub griesmer_sum: u64,
    pub is_griesmer: bool,
    /// Settled by Griesmer equality or a bounds-table hit; None when
    /// neither applies.
    pub distance_optimal: Option<bool>,
    pub ab_ratio: f64,
    pub ab_minimal: bool,
    /// None when the scan was skipped (disabled or over the codeword cap).
    pub exhaustive_minimal: Option<bool>,
    pub hypotheses: Option<HypothesisFlags>,
}

/// Full report for the field code: all q^m messages are enumerated.
pub fn code_report(ds: &DefiningSet, opts: &ReportOptions) -> Result<CodeReport> {
    if ds.is_empty() {
        return Err(Error::invalid("defining set is empty"));
    }
    let (n, m) = (ds.n(), ds.m);
    opts.budget.check_length(ds.len() as u128)?;
    opts.budget.check_messages(1u128 << (n * m))?;

    let length = ds.len() as u64;
    let rows = packed_field_rows(&ds.ctx, &ds.elements, m);
    let words = ds.len().div_ceil(8);
    let counts = gray_histogram(&rows, words, length as usize + 1, opts.workers, count_nonzero_bytes);

    let generator: Vec<Vec<u16>> = (0..m)
        .map(|pos| ds.elements.iter().map(|d| d[pos].coords() as u16).collect())
        .collect();
    let basis = field_row_basis(&ds.ctx, generator);
    let k = basis.len();

    let exhaustive = if opts.check_exhaustive_minimal && (1u128 << (n * k)) <= MINIMALITY_CODEWORD_CAP
    {
        let scaled = packed_scaled_rows(&ds.ctx, &basis, ds.len());
        let sup_words = ds.len().div_ceil(64);
        Some(scan_minimal(&scaled, words, ds.ctx.q(), sup_words, support_from_bytes))
    } else {
        None
    };

    Ok(assemble_report(
        ds.ctx.q(),
        length,
        k,
        n,
        m,
        &counts,
        opts,
        ds.hypothesis_flags(),
        exhaustive,
    ))
}

/// Full report for the binary expansion: all 2^{nm} messages.
pub fn subfield_report(
    ss: &SubfieldCode,
    variant: Variant,
    opts: &ReportOptions,
) -> Result<CodeReport> {
    let nm = ss.ambient_bits();
    opts.budget.check_messages(1u128 << nm)?;
    let keys = ss.materialize_keys(variant, &opts.budget)?;
    if keys.is_empty() {
        return Err(Error::invalid("binary defining set is empty"));
    }

    let length = keys.len() as u64;
    let rows = packed_binary_rows(&keys, nm);
    let words = keys.len().div_ceil(64);
    let counts = gray_histogram(&rows, words, length as usize + 1, opts.workers, count_set_bits);

    let basis = bitmat::row_basis_wide(&rows);
    let k = basis.len();

    let exhaustive = if opts.check_exhaustive_minimal && (1u128 << k) <= MINIMALITY_CODEWORD_CAP {
        Some(scan_minimal(&basis, words, 2, words, |buf, sup| {
            sup.copy_from_slice(buf)
        }))
    } else {
        None
    };

    Ok(assemble_report(
        2,
        length,
        k,
        1,
        nm,
        &counts,
        opts,
        ss.hypotheses(),
        exhaustive,
    ))
}

#[allow(clippy::too_many_arguments)]
fn assemble_report(
    q: u64,
    length: u64,
    k: usize,
    alphabet_bits: usize,
    ambient_units: usize,
    counts: &[u64],
    opts: &ReportOptions,
    hypotheses: Option<HypothesisFlags>,
    exhaustive_minimal: Option<bool>,
) -> CodeReport {
    // Every codeword is hit by exactly q^{ambient - k} messages.
    let divisor = 1u64 << (alphabet_bits * (ambient_units - k));
    let mut weights = Vec::new();
    for (w, &c) in counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        assert!(c % divisor == 0, "histogram not a multiple of the kernel size");
        weights.push((w as u64, c / divisor));
    }
    let d = weights
        .iter()
        .map(|&(w, _)| w)
        .find(|&w| w > 0)
        .unwrap_or(0);
    let w_max = weights.last().map_or(0, |&(w, _)| w);

    let griesmer_sum = griesmer_sum(q, d, k);
    let is_griesmer = k > 0 && griesmer_sum == length;
    let distance_optimal = if is_griesmer {
        Some(true)
    } else {
        opts.bounds
            .as_ref()
            .and_then(|t| t.lookup(q, length, k))
            .map(|best| d >= best)
    };
    let ab_ratio = if w_max > 0 { d as f64 / w_max as f64 } else { 0.0 };
    let ab_minimal = w_max > 0 && u128::from(d) * u128::from(q) > u128::from(w_max) * u128::from(q - 1);

    CodeReport {
        q,
        length,
        k,
        d,
        weights,
        griesmer_sum,
        is_griesmer,
        distance_optimal,
        ab_ratio,
        ab_minimal,
        exhaustive_minimal,
        hypotheses,
    }
}

fn griesmer_sum(q: u64, d: u64, k: usize) -> u64 {
    let mut sum = 0u64;
    let mut qi = 1u128;
    for _ in 0..k {
        sum += u128::from(d).div_ceil(qi) as u64;
        qi *= u128::from(q);
    }
    sum
}

// Row per message bit i*m + pos: the codeword of w^i e_{pos+1}, symbols
// packed one byte each, eight per word.
fn packed_field_rows(ctx: &FieldCtx, elements: &[Vec<Fq>], m: usize) -> Vec<Vec<u64>> {
    let n = ctx.n();
    let words = elements.len().div_ceil(8);
    let mut rows = vec![vec![0u64; words]; n * m];
    for i in 0..n {
        let w = ctx.omega_pow(i).coords() as u16;
        for pos in 0..m {
            let row = &mut rows[i * m + pos];
            for (j, d) in elements.iter().enumerate() {
                let s = ctx.mul_bits(w, d[pos].coords() as u16);
                row[j / 8] |= u64::from(s) << (8 * (j % 8));
            }
        }
    }
    rows
}

// Row per message bit b: bit b of every key, packed 64 per word.
fn packed_binary_rows(keys: &[u64], nbits: usize) -> Vec<Vec<u64>> {
    let words = keys.len().div_ceil(64);
    let mut rows = vec![vec![0u64; words]; nbits];
    for (j, &key) in keys.iter().enumerate() {
        for (b, row) in rows.iter_mut().enumerate() {
            if key >> b & 1 == 1 {
                row[j / 64] |= 1 << (j % 64);
            }
        }
    }
    rows
}

// The basis rows scaled by every w^i, giving one packed row per codeword
// bit of the k-dimensional row space.
fn packed_scaled_rows(ctx: &FieldCtx, basis: &[Vec<u16>], len: usize) -> Vec<Vec<u64>> {
    let n = ctx.n();
    let words = len.div_ceil(8);
    let mut out = Vec::with_capacity(n * basis.len());
    for row in basis {
        for i in 0..n {
            let w = ctx.omega_pow(i).coords() as u16;
            let mut packed = vec![0u64; words];
            for (j, &c) in row.iter().enumerate() {
                packed[j / 8] |= u64::from(ctx.mul_bits(w, c)) << (8 * (j % 8));
            }
            out.push(packed);
        }
    }
    out
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

// Exact per-byte nonzero marker: low 7 bits propagate into bit 7 without
// crossing byte lanes, then the byte's own bit 7 is folded in.
#[inline]
fn nonzero_byte_bits(w: u64) -> u64 {
    const LOW7: u64 = 0x7f7f_7f7f_7f7f_7f7f;
    (((w & LOW7) + LOW7) | w) & !LOW7
}

fn count_nonzero_bytes(words: &[u64]) -> u64 {
    words
        .iter()
        .map(|&w| u64::from(nonzero_byte_bits(w).count_ones()))
        .sum()
}

fn count_set_bits(words: &[u64]) -> u64 {
    words.iter().map(|w| u64::from(w.count_ones())).sum()
}

fn effective_workers(requested: usize, total: u64) -> usize {
    let hw = if requested == 0 {
        thread::available_parallelism().map_or(1, |p| p.get())
    } else {
        requested
    };
    hw.clamp(1, 64).min(total.max(1) as usize)
}

/// Weight histogram over the full 2^{rows.len()} message space. Messages
/// are visited in Gray-code order so each step is one row XOR; disjoint
/// index ranges go to separate workers and the histograms are summed.
fn gray_histogram(
    rows: &[Vec<u64>],
    words: usize,
    hist_len: usize,
    workers: usize,
    count: impl Fn(&[u64]) -> u64 + Sync,
) -> Vec<u64> {
    let total = 1u64 << rows.len();
    let workers = effective_workers(workers, total);
    if workers == 1 {
        return walk_range(rows, words, 0, total, hist_len, &count);
    }
    let chunk = total.div_ceil(workers as u64);
    let mut hist = vec![0u64; hist_len];
    thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..workers {
            let lo = w as u64 * chunk;
            let hi = (lo + chunk).min(total);
            if lo >= hi {
                continue;
            }
            let count = &count;
            handles.push(scope.spawn(move || walk_range(rows, words, lo, hi, hist_len, count)));
        }
        for handle in handles {
            let part = handle.join().expect("enumeration worker panicked");
            for (acc, c) in hist.iter_mut().zip(part) {
                *acc += c;
            }
        }
    });
    hist
}

fn walk_range(
    rows: &[Vec<u64>],
    words: usize,
    lo: u64,
    hi: u64,
    hist_len: usize,
    count: &(impl Fn(&[u64]) -> u64 + Sync),
) -> Vec<u64> {
    let mut hist = vec![0u64; hist_len];
    let mut buf = vec![0u64; words];
    let start = lo ^ (lo >> 1);
    for (b, row) in rows.iter().enumerate() {
        if start >> b & 1 == 1 {
            xor_into(&mut buf, row);
        }
    }
    hist[count(&buf) as usize] += 1;
    for t in lo + 1..hi {
        xor_into(&mut buf, &rows[t.trailing_zeros() as usize]);
        hist[count(&buf) as usize] += 1;
    }
    hist
}

// Reduced row basis over F_{2^n}; pivots normalized to 1 so elimination is
// a single scaled subtraction per step.
fn field_row_basis(ctx: &FieldCtx, rows: Vec<Vec<u16>>) -> Vec<Vec<u16>> {
    let mut basis: Vec<(usize, Vec<u16>)> = Vec::new();
    for mut row in rows {
        while let Some(p) = row.iter().position(|&c| c != 0) {
            match basis.iter().find(|(bp, _)| *bp == p) {
                Some((_, b)) => {
                    let c = row[p];
                    for (x, y) in row.iter_mut().zip(b) {
                        *x ^= ctx.mul_bits(c, *y);
                    }
                }
                None => {
                    let pivot = ctx.element(u64::from(row[p])).expect("symbol in range");
                    let inv = ctx.inv(pivot).expect("pivot nonzero").coords() as u16;
                    for x in row.iter_mut() {
                        *x = ctx.mul_bits(inv, *x);
                    }
                    basis.push((p, row));
                    break;
                }
            }
        }
    }
    basis.sort_unstable_by_key(|(p, _)| *p);
    basis.into_iter().map(|(_, row)| row).collect()
}

fn support_from_bytes(buf: &[u64], sup: &mut [u64]) {
    for s in sup.iter_mut() {
        *s = 0;
    }
    for (wi, &w) in buf.iter().enumerate() {
        let marker = nonzero_byte_bits(w);
        if marker == 0 {
            continue;
        }
        for b in 0..8 {
            if marker >> (8 * b + 7) & 1 == 1 {
                let j = wi * 8 + b;
                sup[j / 64] |= 1 << (j % 64);
            }
        }
    }
}

/// A code is minimal when no nonzero codeword's support strictly contains
/// another's. Enumerates the row space of `rows` (assumed independent),
/// groups by support, and rejects either a support class bigger than the
/// scalar orbit or a strict cover between classes of different weight.
fn scan_minimal(
    rows: &[Vec<u64>],
    words: usize,
    q: u64,
    sup_words: usize,
    extract: impl Fn(&[u64], &mut [u64]),
) -> bool {
    let total = 1u64 << rows.len();
    let mut classes: HashMap<Vec<u64>, u64> = HashMap::new();
    let mut buf = vec![0u64; words];
    let mut sup = vec![0u64; sup_words];
    for t in 1..total {
        xor_into(&mut buf, &rows[t.trailing_zeros() as usize]);
        extract(&buf, &mut sup);
        *classes.entry(sup.clone()).or_insert(0) += 1;
    }
    if classes.values().any(|&c| c != q - 1) {
        return false;
    }
    let mut supports: Vec<(u64, Vec<u64>)> = classes
        .into_keys()
        .map(|s| (count_set_bits(&s), s))
        .collect();
    supports.sort_unstable();
    for i in 0..supports.len() {
        for j in i + 1..supports.len() {
            if supports[j].0 == supports[i].0 {
                continue;
            }
            if supports[i]
                .1
                .iter()
                .zip(&supports[j].1)
                .all(|(a, b)| a & !b == 0)
            {
                return false;
            }
        }
    }
    true
}
