//! 7-aperiodic word families and their C*(λ) small-cancellation reports.
//!
//! `𝒳(k)` is the set of positive 6-aperiodic words of length `k` over
//! `{a, b}` that start and end with `b`, listed lexicographically with
//! `a < b`; `f(k) = |𝒳(k)|`. For `k ≥ k₀` the family word is
//!
//! ```text
//! v_k = (a⁶ X_{k−6,1}) (a⁶ X_{k−6,2}) ⋯ (a⁶ X_{k−6,k})
//! ```
//!
//! so `|v_k| = k²`. The maximal `a⁶` runs mark block boundaries, which is
//! what makes long common subwords rare.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::words::{is_l_aperiodic, is_positive, Letter, ReducedWord};

pub const SYM_A: u16 = 0;
pub const SYM_B: u16 = 1;

/// Default cap on the number of candidates `2^(k−2)` examined by
/// [`enumerate_xk`].
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 1 << 26;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XkCatalog {
    pub k: usize,
    pub words: Vec<ReducedWord>,
    pub count: usize,
}

pub fn enumerate_xk(k: usize) -> Result<XkCatalog> {
    enumerate_xk_with(k, DEFAULT_ENUMERATION_BUDGET, Exec::default())
}

pub fn enumerate_xk_with(k: usize, budget: u64, exec: Exec) -> Result<XkCatalog> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    if k == 1 {
        let words = vec![ReducedWord::positive([SYM_B])];
        return Ok(XkCatalog { k, count: 1, words });
    }
    let free = k - 2;
    if free >= 63 || (1u64 << free) > budget {
        return Err(Error::budget(format!("enumeration of 2^{free} candidates"), budget));
    }
    let total = 1u64 << free;
    // chunks of the lexicographically ordered candidate range
    let chunk = 1u64 << free.min(12);
    let chunks = total.div_ceil(chunk) as usize;
    let words = exec.flat_map_range(chunks, |c| {
        let lo = c as u64 * chunk;
        let hi = (lo + chunk).min(total);
        (lo..hi)
            .filter_map(|mask| {
                let w = candidate(k, mask);
                is_l_aperiodic(&w, 6).unwrap_or(false).then_some(w)
            })
            .collect()
    });
    Ok(XkCatalog {
        k,
        count: words.len(),
        words,
    })
}

/// `b m b` where the middle letters read the bits of `mask`, most
/// significant first, `0 = a`.
fn candidate(k: usize, mask: u64) -> ReducedWord {
    let free = k - 2;
    let middle = (0..free).map(|i| {
        if (mask >> (free - 1 - i)) & 1 == 1 {
            SYM_B
        } else {
            SYM_A
        }
    });
    ReducedWord::positive(std::iter::once(SYM_B).chain(middle).chain(std::iter::once(SYM_B)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct K0Report {
    pub k0: usize,
    pub k_max: usize,
    /// `(k, f(k − 6))` for every `k` in `[k0, k_max]`; the inequality
    /// `f(k − 6) ≥ k` is verified only on this range.
    pub checked: Vec<(usize, usize)>,
}

/// Smallest `k₀ > 6` with `f(k − 6) ≥ k` for all `k₀ ≤ k ≤ k_max`.
pub fn find_k0(k_max: usize) -> Result<K0Report> {
    if k_max < 7 {
        return Err(Error::InvalidParameter(format!(
            "k_max must be at least 7, got {k_max}"
        )));
    }
    let mut f = BTreeMap::new();
    for k in 7..=k_max {
        f.insert(k, enumerate_xk(k - 6)?.count);
    }
    let last_failure = (7..=k_max).rev().find(|k| f[k] < *k);
    let k0 = last_failure.map_or(7, |k| k + 1);
    if k0 > k_max {
        return Err(Error::NotFound(format!(
            "f(k - 6) >= k fails at k = {k_max}; no k0 within [7, {k_max}]"
        )));
    }
    Ok(K0Report {
        k0,
        k_max,
        checked: (k0..=k_max).map(|k| (k, f[&k])).collect(),
    })
}

pub fn build_vk(k: usize) -> Result<ReducedWord> {
    if k < 7 {
        return Err(Error::Precondition(format!("v_k needs k > 6, got {k}")));
    }
    let catalog = enumerate_xk(k - 6)?;
    vk_from_catalog(k, &catalog)
}

fn vk_from_catalog(k: usize, catalog: &XkCatalog) -> Result<ReducedWord> {
    if catalog.count < k {
        return Err(Error::Precondition(format!(
            "f({}) = {} < {k}",
            k - 6,
            catalog.count
        )));
    }
    let mut letters = Vec::with_capacity(k * k);
    for x in &catalog.words[..k] {
        letters.extend(std::iter::repeat(Letter::pos(SYM_A)).take(6));
        letters.extend_from_slice(x.letters());
    }
    ReducedWord::try_from_letters(letters)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MemberCheck {
    pub k: usize,
    pub length: usize,
    pub positive: bool,
    pub aperiodic7: bool,
}

/// The words `v_k`, `k ∈ [k_min, k_max]`, each checked on construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AperiodicFamily {
    pub k0: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub members: BTreeMap<usize, ReducedWord>,
    pub checks: Vec<MemberCheck>,
}

impl AperiodicFamily {
    /// Builds `v_k` for `k_min ≤ k ≤ k_max`. `k_min` below the verified
    /// `k₀` is rejected.
    pub fn build(k_min: usize, k_max: usize) -> Result<Self> {
        Self::build_with(k_min, k_max, Exec::default())
    }

    pub fn build_with(k_min: usize, k_max: usize, exec: Exec) -> Result<Self> {
        if k_min > k_max {
            return Err(Error::InvalidParameter(format!(
                "empty range {k_min}..={k_max}"
            )));
        }
        let k0 = find_k0(k_max.max(12))?.k0;
        if k_min < k0 {
            return Err(Error::Precondition(format!(
                "k_min = {k_min} is below k0 = {k0}"
            )));
        }
        let ks: Vec<usize> = (k_min..=k_max).collect();
        let built: Vec<Result<(usize, ReducedWord, MemberCheck)>> = exec.map(&ks, |&k| {
            let v = build_vk(k)?;
            let check = MemberCheck {
                k,
                length: v.len(),
                positive: is_positive(&v),
                aperiodic7: is_l_aperiodic(&v, 7)?,
            };
            Ok((k, v, check))
        });
        let mut members = BTreeMap::new();
        let mut checks = Vec::new();
        for item in built {
            let (k, v, check) = item?;
            members.insert(k, v);
            checks.push(check);
        }
        Ok(AperiodicFamily {
            k0,
            k_min,
            k_max,
            members,
            checks,
        })
    }

    pub fn get(&self, k: usize) -> Option<&ReducedWord> {
        self.members.get(&k)
    }

    /// `𝒬_n ∩ [n, k_max]` as a list.
    pub fn tail(&self, n: usize) -> Vec<ReducedWord> {
        self.members.range(n..).map(|(_, v)| v.clone()).collect()
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks
            .iter()
            .all(|c| c.positive && c.aperiodic7 && c.length == c.k * c.k)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CStarOptions {
    /// Also compare each word against the inverses of the family words.
    pub inverse_aware: bool,
    pub exec: Exec,
}

impl Default for CStarOptions {
    fn default() -> Self {
        CStarOptions {
            inverse_aware: false,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "condition")]
pub enum CStarViolation {
    /// Condition (a): a common subword of cyclic shifts of two distinct
    /// words is at least `λ·min(|v|, |w|)` long.
    #[serde(rename = "a")]
    CommonSubword {
        first: usize,
        second: usize,
        second_inverted: bool,
        subword: ReducedWord,
        length: usize,
        min_length: usize,
    },
    /// Condition (b): a subword of length `≥ λ|v|` occurs twice in one
    /// cyclic shift of `v`.
    #[serde(rename = "b")]
    RepeatedSubword {
        word: usize,
        subword: ReducedWord,
        length: usize,
        shift: usize,
        positions: (usize, usize),
        word_length: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairStat {
    pub first: usize,
    pub second: usize,
    pub second_inverted: bool,
    pub longest_common: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CStarReport {
    #[serde(with = "crate::real::rational")]
    pub lambda: Rational64,
    pub inverse_aware: bool,
    pub checked_pairs: usize,
    pub checked_words: usize,
    pub pair_stats: Vec<PairStat>,
    pub violations: Vec<CStarViolation>,
}

impl CStarReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_cstar(family: &[ReducedWord], lambda: Rational64) -> Result<CStarReport> {
    verify_cstar_with(family, lambda, CStarOptions::default())
}

pub fn verify_cstar_with(
    family: &[ReducedWord],
    lambda: Rational64,
    opts: CStarOptions,
) -> Result<CStarReport> {
    if !lambda.is_positive() || lambda > Rational64::one() {
        return Err(Error::InvalidParameter(format!(
            "lambda must lie in (0, 1], got {lambda}"
        )));
    }
    for (i, w) in family.iter().enumerate() {
        if w.is_empty() || !w.is_cyclically_reduced() {
            return Err(Error::InvalidInput(format!(
                "family word {i} is empty or not cyclically reduced"
            )));
        }
    }

    // (i, j, invert_j); with inverse awareness a word is also compared to
    // its own inverse.
    let mut pairs = Vec::new();
    for i in 0..family.len() {
        for j in i + 1..family.len() {
            pairs.push((i, j, false));
            if opts.inverse_aware {
                pairs.push((i, j, true));
            }
        }
        if opts.inverse_aware {
            pairs.push((i, i, true));
        }
    }
    let inverses: Vec<ReducedWord> = if opts.inverse_aware {
        family.iter().map(ReducedWord::inverse).collect()
    } else {
        Vec::new()
    };

    let pair_results = opts.exec.map(&pairs, |&(i, j, inv)| {
        let v = &family[i];
        let w = if inv { &inverses[j] } else { &family[j] };
        let (len, start) = longest_common_cyclic(v.letters(), w.letters());
        let min_length = v.len().min(w.len());
        let stat = PairStat {
            first: i,
            second: j,
            second_inverted: inv,
            longest_common: len,
        };
        let violation = at_least_fraction(len, lambda, min_length).then(|| {
            CStarViolation::CommonSubword {
                first: i,
                second: j,
                second_inverted: inv,
                subword: cyclic_factor(v.letters(), start, len),
                length: len,
                min_length,
            }
        });
        (stat, violation)
    });

    let word_results = opts
        .exec
        .map_range(family.len(), |i| repeated_subwords(i, &family[i], lambda));

    let mut pair_stats = Vec::with_capacity(pair_results.len());
    let mut violations = Vec::new();
    for (stat, v) in pair_results {
        pair_stats.push(stat);
        violations.extend(v);
    }
    for vs in word_results {
        violations.extend(vs);
    }
    Ok(CStarReport {
        lambda,
        inverse_aware: opts.inverse_aware,
        checked_pairs: pairs.len(),
        checked_words: family.len(),
        pair_stats,
        violations,
    })
}

/// `len ≥ λ·n`, exactly.
fn at_least_fraction(len: usize, lambda: Rational64, n: usize) -> bool {
    Rational64::from_integer(len as i64) >= lambda * Rational64::from_integer(n as i64)
}

/// `⌈λ·n⌉`
fn ceil_fraction(lambda: Rational64, n: usize) -> usize {
    (lambda * Rational64::from_integer(n as i64))
        .ceil()
        .to_integer()
        .to_usize()
        .unwrap_or(usize::MAX)
}

fn cyclic_factor(s: &[Letter], start: usize, len: usize) -> ReducedWord {
    let n = s.len();
    ReducedWord::reduce_letters((0..len).map(|t| s[(start + t) % n]))
}

/// Longest common factor of some cyclic shift of `v` and some cyclic shift
/// of `w`, with a start position in `v`. Diagonal run scan over the doubled
/// words; runs are capped at `min(|v|, |w|)`.
fn longest_common_cyclic(v: &[Letter], w: &[Letter]) -> (usize, usize) {
    let (n, m) = (v.len(), w.len());
    let cap = n.min(m);
    let (mut best, mut best_start) = (0usize, 0usize);
    // diagonal offset: position i in vv pairs with i + d in ww
    for d0 in 0..m {
        // walk 2n positions along the diagonal starting at (0, d0)
        let mut run = 0usize;
        for i in 0..(n + cap) {
            if v[i % n] == w[(i + d0) % m] {
                run += 1;
                let len = run.min(cap);
                if len > best {
                    best = len;
                    best_start = (i + 1 - len) % n;
                }
            } else {
                run = 0;
            }
        }
        if best == cap {
            break;
        }
    }
    (best, best_start)
}

/// Condition (b) for one word: pairs of cyclic positions whose length-`L`
/// windows agree and fit together inside one cyclic shift.
fn repeated_subwords(index: usize, v: &ReducedWord, lambda: Rational64) -> Vec<CStarViolation> {
    let s = v.letters();
    let n = s.len();
    let big_l = ceil_fraction(lambda, n).max(1);
    if big_l >= n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut ext = vec![0usize; n];
    // the pair {p, p + d} is the pair {p + d, p + d + (n − d)}, so
    // offsets up to n/2 cover every unordered pair
    for d in 1..=n / 2 {
        // windows at p and p + d can share a shift iff d + L ≤ n or d ≥ L
        if !(d + big_l <= n || d >= big_l) {
            continue;
        }
        let eq = |p: usize| s[p] == s[(p + d) % n];
        match (0..n).find(|&p| !eq(p)) {
            None => ext.iter_mut().for_each(|e| *e = n),
            Some(z) => {
                ext[z] = 0;
                for step in 1..n {
                    let p = (z + n - step) % n;
                    ext[p] = if eq(p) { ext[(p + 1) % n] + 1 } else { 0 };
                }
            }
        }
        for p in 0..n {
            let q = (p + d) % n;
            if ext[p] >= big_l && (2 * d < n || p < q) {
                let shift = if d + big_l <= n { p } else { q };
                let pos_p = (p + n - shift) % n;
                let pos_q = (q + n - shift) % n;
                out.push(CStarViolation::RepeatedSubword {
                    word: index,
                    subword: cyclic_factor(s, p, big_l),
                    length: big_l,
                    shift,
                    positions: (pos_p.min(pos_q), pos_p.max(pos_q)),
                    word_length: n,
                });
            }
        }
    }
    out
}

/// `f(k)` for `1 ≤ k ≤ k_max`.
pub fn f_table(k_max: usize) -> Result<Vec<(usize, usize)>> {
    (1..=k_max)
        .map(|k| enumerate_xk(k).map(|c| (k, c.count)))
        .collect()
}
