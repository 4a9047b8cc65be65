//! Subsets of ℕ with membership and prefix counts `‖S_n‖`.
//!
//! Every realization satisfies the [`NatSet`] contract: `count_leq` is
//! monotone, steps by exactly `contains(n) as u64`, and never exceeds `n`.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalUnion};

/// A subset of ℕ = {1, 2, ...}.
pub trait NatSet: Send + Sync {
    fn contains(&self, n: u64) -> bool;

    /// `‖S_n‖`, the number of members `≤ n`. `count_leq(0) = 0`.
    fn count_leq(&self, n: u64) -> u64;

    /// Largest `n` for which membership is known; `None` when the set is
    /// known everywhere.
    fn horizon(&self) -> Option<u64> {
        None
    }

    /// `‖S ∩ I‖`
    fn count_in(&self, i: &Interval) -> u64 {
        self.count_leq(i.b()) - self.count_leq(i.a() - 1)
    }

    fn describe(&self) -> String;
}

impl<T: NatSet + ?Sized> NatSet for Arc<T> {
    fn contains(&self, n: u64) -> bool {
        (**self).contains(n)
    }
    fn count_leq(&self, n: u64) -> u64 {
        (**self).count_leq(n)
    }
    fn horizon(&self) -> Option<u64> {
        (**self).horizon()
    }
    fn count_in(&self, i: &Interval) -> u64 {
        (**self).count_in(i)
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

impl<T: NatSet + ?Sized> NatSet for Box<T> {
    fn contains(&self, n: u64) -> bool {
        (**self).contains(n)
    }
    fn count_leq(&self, n: u64) -> u64 {
        (**self).count_leq(n)
    }
    fn horizon(&self) -> Option<u64> {
        (**self).horizon()
    }
    fn count_in(&self, i: &Interval) -> u64 {
        (**self).count_in(i)
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// Fails when `n` lies past the set's horizon.
pub fn ensure_known(set: &dyn NatSet, n: u64) -> Result<()> {
    match set.horizon() {
        Some(h) if n > h => Err(Error::BeyondHorizon { n, horizon: h }),
        _ => Ok(()),
    }
}

/// `{n : n ≡ residue (mod modulus)}` with closed-form counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResidueSet {
    modulus: u64,
    residue: u64,
}

impl ResidueSet {
    pub fn new(modulus: u64, residue: u64) -> Result<ResidueSet> {
        if modulus == 0 {
            return Err(Error::Zero);
        }
        Ok(ResidueSet {
            modulus,
            residue: residue % modulus,
        })
    }

    pub fn multiples(k: u64) -> Result<ResidueSet> {
        ResidueSet::new(k, 0)
    }

    pub fn evens() -> ResidueSet {
        ResidueSet { modulus: 2, residue: 0 }
    }

    pub fn odds() -> ResidueSet {
        ResidueSet { modulus: 2, residue: 1 }
    }
}

impl NatSet for ResidueSet {
    fn contains(&self, n: u64) -> bool {
        n >= 1 && n % self.modulus == self.residue
    }

    fn count_leq(&self, n: u64) -> u64 {
        // members are residue + t·modulus, t ≥ 0, excluding 0 itself
        let first = if self.residue == 0 { self.modulus } else { self.residue };
        if n < first {
            0
        } else {
            (n - first) / self.modulus + 1
        }
    }

    fn describe(&self) -> String {
        match (self.modulus, self.residue) {
            (2, 0) => "evens".into(),
            (2, 1) => "odds".into(),
            (k, 0) => format!("multiples:{k}"),
            (k, r) => format!("residue {r} mod {k}"),
        }
    }
}

const BLOCK_BITS: u32 = 16;
const BLOCK: u64 = 1 << BLOCK_BITS;

type Predicate = dyn Fn(u64) -> bool + Send + Sync;

/// Membership bits of one block with running popcounts per 64-bit word.
struct BlockRank {
    block: usize,
    words: Vec<u64>,
    // ranks[w] = members in words[..w]
    ranks: Vec<u32>,
}

impl BlockRank {
    /// Members among the first `offset` naturals of the block.
    fn count(&self, offset: u64) -> u64 {
        let (w, bit) = ((offset / 64) as usize, offset % 64);
        let partial = if bit == 0 { 0 } else { (self.words[w] & (u64::MAX >> (64 - bit))).count_ones() };
        (self.ranks[w] + partial) as u64
    }
}

/// A set given by a membership rule, with prefix counts cached per block of
/// 2^16 naturals. The most recently used block is also kept as a bitmap, so
/// repeated queries inside one block cost O(1).
pub struct PredicateSet {
    name: String,
    rule: Box<Predicate>,
    // checkpoints[j] = ‖S_{j·BLOCK}‖; only ever extended, so readers either
    // see a complete checkpoint or none.
    checkpoints: RwLock<Vec<u64>>,
    hot: RwLock<Option<Arc<BlockRank>>>,
}

impl PredicateSet {
    pub fn new(name: impl Into<String>, rule: impl Fn(u64) -> bool + Send + Sync + 'static) -> Self {
        PredicateSet {
            name: name.into(),
            rule: Box::new(rule),
            checkpoints: RwLock::new(vec![0]),
            hot: RwLock::new(None),
        }
    }

    fn scan(&self, lo: u64, hi: u64) -> u64 {
        (lo..=hi).filter(|&n| (self.rule)(n)).count() as u64
    }

    fn checkpoint(&self, block: usize) -> u64 {
        if let Some(&c) = self.checkpoints.read().expect("cache lock").get(block) {
            return c;
        }
        let mut cache = self.checkpoints.write().expect("cache lock");
        while cache.len() <= block {
            let j = (cache.len() - 1) as u64;
            let prev = *cache.last().expect("seeded");
            cache.push(prev + self.scan(j * BLOCK + 1, (j + 1) * BLOCK));
        }
        cache[block]
    }

    /// Bitmap of block `j`, covering `j·BLOCK + 1 ..= (j + 1)·BLOCK`.
    fn block_rank(&self, block: usize) -> Arc<BlockRank> {
        if let Some(hot) = self.hot.read().expect("cache lock").as_ref() {
            if hot.block == block {
                return hot.clone();
            }
        }
        let base = block as u64 * BLOCK;
        let mut words = vec![0u64; (BLOCK / 64) as usize];
        for off in 0..BLOCK {
            if (self.rule)(base + off + 1) {
                words[(off / 64) as usize] |= 1 << (off % 64);
            }
        }
        let mut ranks = Vec::with_capacity(words.len() + 1);
        let mut acc = 0;
        for w in &words {
            ranks.push(acc);
            acc += w.count_ones();
        }
        ranks.push(acc);
        let rank = Arc::new(BlockRank { block, words, ranks });
        *self.hot.write().expect("cache lock") = Some(rank.clone());
        rank
    }
}

impl NatSet for PredicateSet {
    fn contains(&self, n: u64) -> bool {
        n >= 1 && (self.rule)(n)
    }

    fn count_leq(&self, n: u64) -> u64 {
        let block = (n >> BLOCK_BITS) as usize;
        let offset = n - block as u64 * BLOCK;
        if offset == 0 {
            return self.checkpoint(block);
        }
        self.checkpoint(block) + self.block_rank(block).count(offset)
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

impl fmt::Debug for PredicateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PredicateSet").field("name", &self.name).finish()
    }
}

/// A finite union of intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalUnionSet {
    union: IntervalUnion,
}

impl IntervalUnionSet {
    pub fn new(union: IntervalUnion) -> Self {
        IntervalUnionSet { union }
    }

    pub fn union(&self) -> &IntervalUnion {
        &self.union
    }
}

impl NatSet for IntervalUnionSet {
    fn contains(&self, n: u64) -> bool {
        self.union.contains(n)
    }

    fn count_leq(&self, n: u64) -> u64 {
        self.union.count_leq(n)
    }

    fn describe(&self) -> String {
        let parts: Vec<String> = self
            .union
            .parts()
            .iter()
            .map(|p| format!("{}-{}", p.a(), p.b()))
            .collect();
        format!("interval-union:{}", parts.join(","))
    }
}

type IntervalGen = dyn Fn(u64) -> Option<Interval> + Send + Sync;

/// A possibly infinite union of intervals produced lazily by index.
///
/// `generator(t)` must return strictly ascending, disjoint intervals for
/// increasing `t` and `None` once the sequence ends. The sets used here grow
/// geometrically, so walking the sequence up to `n` costs `O(log n)`.
pub struct IntervalSequenceSet {
    name: String,
    generator: Box<IntervalGen>,
}

impl IntervalSequenceSet {
    pub fn new(
        name: impl Into<String>,
        generator: impl Fn(u64) -> Option<Interval> + Send + Sync + 'static,
    ) -> Self {
        IntervalSequenceSet {
            name: name.into(),
            generator: Box::new(generator),
        }
    }

    pub fn intervals(&self) -> impl Iterator<Item = Interval> + '_ {
        (0..).map_while(|t| (self.generator)(t))
    }

    /// The members `≤ limit` as a finite union.
    pub fn truncate(&self, limit: u64) -> IntervalUnion {
        let bound = Interval::new(1, limit.max(1)).expect("limit >= 1");
        IntervalUnion::new(
            self.intervals()
                .take_while(|i| i.a() <= limit)
                .filter_map(|i| i.intersect(&bound))
                .collect(),
        )
    }
}

impl NatSet for IntervalSequenceSet {
    fn contains(&self, n: u64) -> bool {
        self.intervals()
            .take_while(|i| i.a() <= n)
            .any(|i| i.contains(n))
    }

    fn count_leq(&self, n: u64) -> u64 {
        self.intervals()
            .take_while(|i| i.a() <= n)
            .map(|i| i.b().min(n) - i.a() + 1)
            .sum()
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

impl fmt::Debug for IntervalSequenceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntervalSequenceSet").field("name", &self.name).finish()
    }
}

/// Mutable bitmap over a window, frozen into a [`BitWindowSet`].
#[derive(Debug, Clone)]
pub struct BitWindow {
    window: Interval,
    words: Vec<u64>,
}

impl BitWindow {
    pub fn new(window: Interval) -> Self {
        let words = vec![0u64; window.len().div_ceil(64) as usize];
        BitWindow { window, words }
    }

    pub fn window(&self) -> Interval {
        self.window
    }

    fn slot(&self, n: u64) -> Option<(usize, u64)> {
        self.window.contains(n).then(|| {
            let off = n - self.window.a();
            ((off / 64) as usize, 1u64 << (off % 64))
        })
    }

    /// Returns the previous membership; out-of-window points are ignored.
    pub fn insert(&mut self, n: u64) -> bool {
        match self.slot(n) {
            Some((w, bit)) => {
                let was = self.words[w] & bit != 0;
                self.words[w] |= bit;
                was
            }
            None => false,
        }
    }

    pub fn get(&self, n: u64) -> bool {
        self.slot(n).is_some_and(|(w, bit)| self.words[w] & bit != 0)
    }

    pub fn freeze(self) -> BitWindowSet {
        let mut rank = Vec::with_capacity(self.words.len() + 1);
        let mut total = 0u64;
        rank.push(0);
        for w in &self.words {
            total += w.count_ones() as u64;
            rank.push(total);
        }
        BitWindowSet {
            window: self.window,
            words: self.words,
            rank,
        }
    }
}

/// Explicit members on a finite window; nothing is known past its end.
#[derive(Clone, PartialEq, Eq)]
pub struct BitWindowSet {
    window: Interval,
    words: Vec<u64>,
    // rank[w] = members in words[..w]
    rank: Vec<u64>,
}

impl BitWindowSet {
    pub fn from_members<I: IntoIterator<Item = u64>>(window: Interval, members: I) -> Self {
        let mut bits = BitWindow::new(window);
        for n in members {
            bits.insert(n);
        }
        bits.freeze()
    }

    pub fn window(&self) -> Interval {
        self.window
    }

    pub fn len(&self) -> u64 {
        *self.rank.last().unwrap_or(&0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn members(&self) -> impl Iterator<Item = u64> + '_ {
        let base = self.window.a();
        self.words.iter().enumerate().flat_map(move |(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                (bits != 0).then(|| {
                    let tz = bits.trailing_zeros() as u64;
                    bits &= bits - 1;
                    base + w as u64 * 64 + tz
                })
            })
        })
    }

    /// Reads one member per line. Blank lines and `#` comments are skipped,
    /// except a `# window: L` header which fixes the window to `[1, L]`;
    /// without it the window ends at the largest member.
    pub fn read_from(path: &Path) -> Result<BitWindowSet> {
        let io_err = |e: std::io::Error| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        let file = std::fs::File::open(path).map_err(io_err)?;
        let mut window_end = None;
        let mut members = Vec::new();
        for (lineno, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line.map_err(io_err)?;
            let t = line.trim();
            if let Some(comment) = t.strip_prefix('#') {
                if let Some(v) = comment.trim().strip_prefix("window:") {
                    window_end = Some(v.trim().parse::<u64>().map_err(|_| Error::Io {
                        path: path.display().to_string(),
                        message: format!("line {}: bad window header", lineno + 1),
                    })?);
                }
                continue;
            }
            if t.is_empty() {
                continue;
            }
            let n: u64 = t.parse().map_err(|_| Error::Io {
                path: path.display().to_string(),
                message: format!("line {}: expected a natural number, got {t:?}", lineno + 1),
            })?;
            if n == 0 {
                return Err(Error::Zero);
            }
            members.push(n);
        }
        let end = window_end
            .or_else(|| members.iter().copied().max())
            .unwrap_or(1)
            .max(1);
        if let Some(&n) = members.iter().find(|&&n| n > end) {
            return Err(Error::BeyondHorizon { n, horizon: end });
        }
        Ok(BitWindowSet::from_members(Interval::new(1, end)?, members))
    }

    pub fn write_to(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "# window: {}", self.window.b())?;
        for n in self.members() {
            writeln!(out, "{n}")?;
        }
        Ok(())
    }
}

impl NatSet for BitWindowSet {
    fn contains(&self, n: u64) -> bool {
        self.window.contains(n) && {
            let off = n - self.window.a();
            self.words[(off / 64) as usize] & (1u64 << (off % 64)) != 0
        }
    }

    fn count_leq(&self, n: u64) -> u64 {
        if n < self.window.a() {
            return 0;
        }
        if n >= self.window.b() {
            return self.len();
        }
        let off = n - self.window.a() + 1;
        let (w, bits) = ((off / 64) as usize, off % 64);
        let partial = if bits == 0 {
            0
        } else {
            (self.words[w] & ((1u64 << bits) - 1)).count_ones() as u64
        };
        self.rank[w] + partial
    }

    fn horizon(&self) -> Option<u64> {
        Some(self.window.b())
    }

    fn describe(&self) -> String {
        format!("bit window {}", self.window)
    }
}

impl fmt::Debug for BitWindowSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BitWindowSet")
            .field("window", &self.window)
            .field("len", &self.len())
            .finish()
    }
}
