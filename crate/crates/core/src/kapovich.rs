//! Kapovich generating sets `Z_S` of `F(a, b, c)`.
//!
//! For a finite seed set `S` of family indices, put `w_n = v_n c`. A
//! reduced word is a W_S-word when it is a factor of `w_n^m` for some
//! `n ∈ S`, `m ≠ 0`; `Z_S` is the set of positive W_S-words. Word length
//! in `Z_S` equals the least number of W_S-words whose concatenation,
//! without cancellation, spells the word. [`ZMetric`] computes it by prefix
//! dynamic programming; [`BfsOracle`] recomputes it by breadth-first search
//! in the Cayley graph.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::atomic::{AtomicU8, Ordering};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par::Exec;
use crate::smallcancel::AperiodicFamily;
use crate::words::{is_positive, Letter, ReducedWord, Sign};

pub const SYM_C: u16 = 2;

/// Finite set of family indices with their words `v_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeedSet {
    words: BTreeMap<usize, ReducedWord>,
}

impl SeedSet {
    pub fn from_family(family: &AperiodicFamily, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut words = BTreeMap::new();
        for k in indices {
            let v = family.get(k).ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "seed {k} outside the built family range [{}, {}]",
                    family.k_min, family.k_max
                ))
            })?;
            words.insert(k, v.clone());
        }
        if words.is_empty() {
            return Err(Error::InvalidParameter("seed set must be non-empty".into()));
        }
        Ok(SeedSet { words })
    }

    /// Builds the family over `[min S, max S]` and selects `S`.
    pub fn build(indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let idx: BTreeSet<usize> = indices.into_iter().collect();
        let (Some(&lo), Some(&hi)) = (idx.first(), idx.last()) else {
            return Err(Error::InvalidParameter("seed set must be non-empty".into()));
        };
        let family = AperiodicFamily::build(lo, hi)?;
        SeedSet::from_family(&family, idx)
    }

    pub fn indices(&self) -> Vec<usize> {
        self.words.keys().copied().collect()
    }

    pub fn word(&self, k: usize) -> Option<&ReducedWord> {
        self.words.get(&k)
    }

    pub fn contains(&self, k: usize) -> bool {
        self.words.contains_key(&k)
    }

    /// The cyclic words `v_n c`.
    pub fn periods(&self) -> Vec<Vec<Letter>> {
        self.words
            .values()
            .map(|v| {
                let mut u = v.letters().to_vec();
                u.push(Letter::pos(SYM_C));
                u
            })
            .collect()
    }
}

fn check_abc(w: &ReducedWord) -> Result<()> {
    match w.letters().iter().find(|l| l.symbol > SYM_C) {
        Some(l) => Err(Error::MalformedInput(format!(
            "symbol index {} outside {{a, b, c}}",
            l.symbol
        ))),
        None => Ok(()),
    }
}

/// Direct membership test: `z` (or `z⁻¹`) occurs inside `(v_n c)` repeated
/// `⌈|z| / |v_n c|⌉ + 1` times.
pub fn is_w_word(z: &ReducedWord, seeds: &SeedSet) -> bool {
    if z.is_empty() {
        return false;
    }
    let target = if is_positive(z) {
        z.clone()
    } else if z.letters().iter().all(|l| l.sign == Sign::Neg) {
        z.inverse()
    } else {
        return false;
    };
    let t = target.letters();
    seeds.periods().iter().any(|u| {
        let reps = t.len().div_ceil(u.len()) + 1;
        let hay: Vec<Letter> = u.iter().copied().cycle().take(reps * u.len()).collect();
        hay.windows(t.len()).any(|win| win == t)
    })
}

/// Factorization `w ≡ z₁⋯z_k` into W_S-words, concatenated without
/// cancellation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WDecomposition {
    pub factors: Vec<ReducedWord>,
    pub total: ReducedWord,
}

impl WDecomposition {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Letter-for-letter check of the concatenation.
    pub fn is_graphical(&self) -> bool {
        let joined: Vec<Letter> = self
            .factors
            .iter()
            .flat_map(|f| f.letters().iter().copied())
            .collect();
        joined == self.total.letters()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZDistance {
    pub length: usize,
    pub witness: WDecomposition,
}

/// Word length with respect to `Z_S`.
#[derive(Clone, Debug)]
pub struct ZMetric {
    seeds: Vec<usize>,
    // cyclic words v_n c and their inverses c⁻¹ v_n⁻¹
    cycles: Vec<Vec<Letter>>,
}

impl ZMetric {
    pub fn new(seeds: &SeedSet) -> Self {
        let mut cycles = Vec::new();
        for u in seeds.periods() {
            let inv: Vec<Letter> = u.iter().rev().map(|l| l.inverse()).collect();
            cycles.push(u);
            cycles.push(inv);
        }
        ZMetric {
            seeds: seeds.indices(),
            cycles,
        }
    }

    pub fn seeds(&self) -> &[usize] {
        &self.seeds
    }

    /// `reach[j]`: the longest factor of `w` starting at `j` that is a
    /// W_S-word. Factors of W_S-words are W_S-words, so every shorter
    /// factor from `j` qualifies too.
    pub fn reach(&self, w: &[Letter]) -> Vec<usize> {
        let n = w.len();
        let mut reach = vec![0usize; n];
        for u in &self.cycles {
            let period = u.len();
            // ext[r] for the current j: matching length of w[j..] against u
            // read cyclically from offset r
            let mut next = vec![0usize; period];
            let mut cur = vec![0usize; period];
            for j in (0..n).rev() {
                for r in 0..period {
                    cur[r] = if w[j] == u[r] {
                        1 + next[(r + 1) % period]
                    } else {
                        0
                    };
                }
                reach[j] = reach[j].max(cur.iter().copied().max().unwrap_or(0));
                std::mem::swap(&mut cur, &mut next);
            }
        }
        reach
    }

    /// Least number of W_S-factors, with the leftmost-longest witness.
    pub fn dist(&self, w: &ReducedWord) -> Result<ZDistance> {
        check_abc(w)?;
        let letters = w.letters();
        let n = letters.len();
        let reach = self.reach(letters);
        // d[i]: least factors spelling the prefix of length i
        let mut d = vec![usize::MAX; n + 1];
        d[0] = 0;
        for j in 0..n {
            if d[j] == usize::MAX {
                continue;
            }
            for i in j + 1..=j + reach[j] {
                d[i] = d[i].min(d[j] + 1);
            }
        }
        // suffix costs for the witness: e[j] = least factors for w[j..]
        let mut e = vec![usize::MAX; n + 1];
        e[n] = 0;
        for j in (0..n).rev() {
            e[j] = (j + 1..=j + reach[j])
                .map(|i| e[i])
                .min()
                .map_or(usize::MAX, |m| m.saturating_add(1));
        }
        debug_assert_eq!(d[n], e[0]);
        let mut factors = Vec::with_capacity(e[0]);
        let mut j = 0;
        while j < n {
            // longest first factor among optimal choices
            let i = (j + 1..=j + reach[j])
                .rev()
                .find(|&i| e[i] + 1 == e[j])
                .expect("reach[j] >= 1 for every letter");
            factors.push(w.subword(j..i));
            j = i;
        }
        Ok(ZDistance {
            length: d[n],
            witness: WDecomposition {
                factors,
                total: w.clone(),
            },
        })
    }
}

/// `|w|_{Z_S}` with a witness decomposition.
pub fn dist_z(w: &ReducedWord, seeds: &SeedSet) -> Result<ZDistance> {
    ZMetric::new(seeds).dist(w)
}

pub const DEFAULT_BALL_BUDGET: u64 = 20_000_000;

/// Breadth-first search in the Cayley graph of `F(a, b, c)` with respect to
/// the positive W_S-words of length at most `gen_len` and their inverses.
/// Vertices are reduced words of free length at most `vertex_len`.
///
/// Distances found this way are lengths of genuine paths, so they never
/// undercount; with `vertex_len ≥ |w|` the graphical decompositions of `w`
/// are paths inside the explored region.
#[derive(Debug)]
pub struct BfsOracle {
    gen_len: usize,
    vertex_len: usize,
    generators: usize,
    dist: DistTable,
}

#[derive(Debug)]
enum DistTable {
    Dense(Vec<u8>),
    Sparse(HashMap<u64, u8>),
}

const UNSEEN: u8 = u8::MAX;

/// Letters as base-7 digits: a = 1, a⁻¹ = 2, b = 3, b⁻¹ = 4, c = 5, c⁻¹ = 6.
fn digit(l: Letter) -> u64 {
    1 + 2 * l.symbol as u64 + u64::from(l.sign == Sign::Neg)
}

fn inv_digit(d: u64) -> u64 {
    if d % 2 == 1 {
        d + 1
    } else {
        d - 1
    }
}

fn encode(w: &[Letter]) -> u64 {
    w.iter().rev().fold(0u64, |acc, &l| acc * 7 + digit(l))
}

#[derive(Clone, Copy)]
struct Vertex {
    code: u64,
    len: usize,
}

struct Generator {
    digits: Vec<u64>,
    // code of digits[c..] for each c
    suffix_codes: Vec<u64>,
}

impl BfsOracle {
    pub fn build(seeds: &SeedSet, gen_len: usize, vertex_len: usize, budget: u64, exec: Exec) -> Result<Self> {
        Self::search(seeds, gen_len, vertex_len, budget, exec, None)
    }

    fn search(
        seeds: &SeedSet,
        gen_len: usize,
        vertex_len: usize,
        budget: u64,
        exec: Exec,
        target: Option<&ReducedWord>,
    ) -> Result<Self> {
        if vertex_len > 20 {
            return Err(Error::budget("vertex length above 20", 20));
        }
        // reduced words of length ≤ vertex_len over six letters
        let ball: u64 = 1 + (1..=vertex_len as u32).map(|k| 6 * 5u64.pow(k - 1)).sum::<u64>();
        if ball > budget {
            return Err(Error::budget(format!("ball of {ball} vertices"), budget));
        }

        let mut gens: BTreeSet<Vec<Letter>> = BTreeSet::new();
        for u in seeds.periods() {
            for len in 1..=gen_len {
                for start in 0..u.len() {
                    let z: Vec<Letter> = (0..len).map(|t| u[(start + t) % u.len()]).collect();
                    gens.insert(z.iter().rev().map(|l| l.inverse()).collect());
                    gens.insert(z);
                }
            }
        }
        let generators: Vec<Generator> = gens
            .into_iter()
            .map(|g| {
                let digits: Vec<u64> = g.iter().map(|&l| digit(l)).collect();
                let suffix_codes = (0..=digits.len())
                    .map(|c| digits[c..].iter().rev().fold(0u64, |acc, &d| acc * 7 + d))
                    .collect();
                Generator {
                    digits,
                    suffix_codes,
                }
            })
            .collect();
        let pow7: Vec<u64> = (0..=vertex_len as u32 + 1).map(|k| 7u64.pow(k)).collect();
        let target_code = target.map(|t| encode(t.letters()));

        let expand = |v: &Vertex, out: &mut Vec<Vertex>| {
            let mut digits = [0u64; 21];
            let mut c = v.code;
            for d in digits.iter_mut().take(v.len) {
                *d = c % 7;
                c /= 7;
            }
            for g in &generators {
                let lg = g.digits.len();
                let mut cancel = 0;
                while cancel < lg.min(v.len) && digits[v.len - 1 - cancel] == inv_digit(g.digits[cancel]) {
                    cancel += 1;
                }
                let keep = v.len - cancel;
                let len = keep + lg - cancel;
                if len > vertex_len {
                    continue;
                }
                let code = v.code % pow7[keep] + pow7[keep] * g.suffix_codes[cancel];
                out.push(Vertex { code, len });
            }
        };

        let dense = pow7[vertex_len] * 7 <= 1 << 27;
        let dist = if dense {
            let table: Vec<AtomicU8> = (0..pow7[vertex_len + 1]).map(|_| AtomicU8::new(UNSEEN)).collect();
            table[0].store(0, Ordering::Relaxed);
            let mut frontier = vec![Vertex { code: 0, len: 0 }];
            let mut level = 0u8;
            while !frontier.is_empty() {
                if let Some(t) = target_code {
                    if table[t as usize].load(Ordering::Relaxed) != UNSEEN {
                        break;
                    }
                }
                level += 1;
                let next_level = level;
                let chunks: Vec<&[Vertex]> = frontier.chunks(256).collect();
                let claimed = exec.map(&chunks, |chunk| {
                    let mut out = Vec::new();
                    let mut mine = Vec::new();
                    for v in *chunk {
                        out.clear();
                        expand(v, &mut out);
                        for w in &out {
                            if table[w.code as usize]
                                .compare_exchange(UNSEEN, next_level, Ordering::Relaxed, Ordering::Relaxed)
                                .is_ok()
                            {
                                mine.push(*w);
                            }
                        }
                    }
                    mine
                });
                frontier = claimed.into_iter().flatten().collect();
            }
            DistTable::Dense(table.into_iter().map(AtomicU8::into_inner).collect())
        } else {
            let mut table: HashMap<u64, u8> = HashMap::new();
            table.insert(0, 0);
            let mut frontier = vec![Vertex { code: 0, len: 0 }];
            let mut level = 0u8;
            let mut out = Vec::new();
            while !frontier.is_empty() {
                if let Some(t) = target_code {
                    if table.contains_key(&t) {
                        break;
                    }
                }
                level += 1;
                let mut next = Vec::new();
                for v in &frontier {
                    out.clear();
                    expand(v, &mut out);
                    for w in &out {
                        if let std::collections::hash_map::Entry::Vacant(e) = table.entry(w.code) {
                            e.insert(level);
                            next.push(*w);
                        }
                    }
                }
                frontier = next;
            }
            DistTable::Sparse(table)
        };
        Ok(BfsOracle {
            gen_len,
            vertex_len,
            generators: generators.len(),
            dist,
        })
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    pub fn gen_len(&self) -> usize {
        self.gen_len
    }

    /// Distance from the identity, if `w` lies in the explored ball.
    pub fn dist(&self, w: &ReducedWord) -> Option<usize> {
        if w.len() > self.vertex_len || w.letters().iter().any(|l| l.symbol > SYM_C) {
            return None;
        }
        let code = encode(w.letters());
        let d = match &self.dist {
            DistTable::Dense(t) => t.get(code as usize).copied(),
            DistTable::Sparse(t) => t.get(&code).copied(),
        }?;
        (d != UNSEEN).then_some(d as usize)
    }
}

/// `|w|_{Z_S}` by breadth-first search with generators of length `≤ gen_len`
/// and vertices of length `≤ gen_len`. Requires `|w| ≤ gen_len`.
pub fn bfs_oracle_dist(w: &ReducedWord, seeds: &SeedSet, gen_len: usize) -> Result<usize> {
    check_abc(w)?;
    if w.len() > gen_len {
        return Err(Error::Precondition(format!(
            "|w| = {} exceeds generator length bound {gen_len}",
            w.len()
        )));
    }
    let oracle = BfsOracle::search(seeds, gen_len, gen_len, DEFAULT_BALL_BUDGET, Exec::default(), Some(w))?;
    oracle
        .dist(w)
        .ok_or_else(|| Error::NotFound("word not reached inside the explored ball".into()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationProbe {
    pub seed: usize,
    pub word_length: usize,
    pub length_in_s: usize,
    pub length_in_t: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SeparationVerdict {
    /// Probes in both `S \ T` and `T \ S` exceed the ratio threshold.
    IncomparableEvidence,
    /// At most one direction is separated. The flags say which length
    /// functional stayed within the threshold of the other on its probes.
    DominatedEvidence {
        s_length_bounded_by_t: bool,
        t_length_bounded_by_s: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationCertificate {
    pub s: Vec<usize>,
    pub t: Vec<usize>,
    /// Finite working range standing in for the infinite seed sets.
    pub family_range: (usize, usize),
    #[serde(serialize_with = "crate::real::ser_f64")]
    pub ratio_threshold: f64,
    /// Words `v_u` with `u ∈ S \ T`; here `|v_u|_{Z_S} = 1`.
    pub s_minus_t: Vec<SeparationProbe>,
    /// Words `v_u` with `u ∈ T \ S`; here `|v_u|_{Z_T} = 1`.
    pub t_minus_s: Vec<SeparationProbe>,
    pub verdict: SeparationVerdict,
}

pub const DEFAULT_SEPARATION_RATIO: f64 = 2.0;

pub fn separation_certificate(s: &SeedSet, t: &SeedSet, probe_count: usize) -> Result<SeparationCertificate> {
    separation_certificate_with(s, t, probe_count, DEFAULT_SEPARATION_RATIO, Exec::default())
}

pub fn separation_certificate_with(
    s: &SeedSet,
    t: &SeedSet,
    probe_count: usize,
    ratio_threshold: f64,
    exec: Exec,
) -> Result<SeparationCertificate> {
    if s.indices() == t.indices() {
        return Err(Error::InvalidParameter("S and T must differ".into()));
    }
    if probe_count == 0 {
        return Err(Error::InvalidParameter("probe count must be positive".into()));
    }
    let ms = ZMetric::new(s);
    let mt = ZMetric::new(t);
    let pick = |from: &SeedSet, other: &SeedSet| -> Vec<(usize, ReducedWord)> {
        from.words
            .iter()
            .filter(|(k, _)| !other.contains(**k))
            .take(probe_count)
            .map(|(k, v)| (*k, v.clone()))
            .collect()
    };
    let eval = |items: &[(usize, ReducedWord)]| -> Result<Vec<SeparationProbe>> {
        exec.map(items, |(k, v)| {
            Ok(SeparationProbe {
                seed: *k,
                word_length: v.len(),
                length_in_s: ms.dist(v)?.length,
                length_in_t: mt.dist(v)?.length,
            })
        })
        .into_iter()
        .collect()
    };
    let s_minus_t = eval(&pick(s, t))?;
    let t_minus_s = eval(&pick(t, s))?;
    let t_blows_up = s_minus_t
        .iter()
        .any(|p| p.length_in_t as f64 > ratio_threshold * p.length_in_s as f64);
    let s_blows_up = t_minus_s
        .iter()
        .any(|p| p.length_in_s as f64 > ratio_threshold * p.length_in_t as f64);
    let verdict = if t_blows_up && s_blows_up {
        SeparationVerdict::IncomparableEvidence
    } else {
        SeparationVerdict::DominatedEvidence {
            s_length_bounded_by_t: !s_blows_up,
            t_length_bounded_by_s: !t_blows_up,
        }
    };
    let all: BTreeSet<usize> = s.indices().into_iter().chain(t.indices()).collect();
    Ok(SeparationCertificate {
        s: s.indices(),
        t: t.indices(),
        family_range: (*all.first().unwrap_or(&0), *all.last().unwrap_or(&0)),
        ratio_threshold,
        s_minus_t,
        t_minus_s,
        verdict,
    })
}

/// Positive W_S-words of length `≤ max_len`, deduplicated and sorted.
pub fn positive_w_words(seeds: &SeedSet, max_len: usize) -> Vec<ReducedWord> {
    let mut out: HashSet<Vec<Letter>> = HashSet::new();
    for u in seeds.periods() {
        for len in 1..=max_len {
            for start in 0..u.len() {
                out.insert((0..len).map(|t| u[(start + t) % u.len()]).collect());
            }
        }
    }
    let mut words: Vec<ReducedWord> = out
        .into_iter()
        .map(|l| ReducedWord::try_from_letters(l).expect("positive words are reduced"))
        .collect();
    words.sort();
    words
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;
    use proptest::prelude::*;
    use std::sync::OnceLock;

    fn family() -> &'static AperiodicFamily {
        static F: OnceLock<AperiodicFamily> = OnceLock::new();
        F.get_or_init(|| AperiodicFamily::build(12, 14).unwrap())
    }

    fn seeds(ix: &[usize]) -> SeedSet {
        SeedSet::from_family(family(), ix.iter().copied()).unwrap()
    }

    fn abc(s: &str) -> ReducedWord {
        Alphabet::abc().parse(s).unwrap()
    }

    /// DP over every factor using the direct membership test.
    fn slow_dist(w: &ReducedWord, s: &SeedSet) -> usize {
        let n = w.len();
        let mut d = vec![usize::MAX; n + 1];
        d[0] = 0;
        for i in 1..=n {
            for j in 0..i {
                if d[j] != usize::MAX && is_w_word(&w.subword(j..i), s) {
                    d[i] = d[i].min(d[j] + 1);
                }
            }
        }
        d[n]
    }

    #[test]
    fn w_word_examples() {
        let s = seeds(&[12]);
        assert!(is_w_word(&abc("c"), &s));
        assert!(is_w_word(&abc("c'"), &s));
        assert!(is_w_word(family().get(12).unwrap(), &s));
        assert!(!is_w_word(&abc("c c"), &s));
        assert!(!is_w_word(&abc("a b'"), &s));
        assert!(!is_w_word(&ReducedWord::empty(), &s));
        // wraps across the c: end of v_12, c, start of v_12
        assert!(is_w_word(&abc("b c a a a a a a b"), &s));
    }

    #[test]
    fn dist_examples() {
        let s = seeds(&[12]);
        let v12 = family().get(12).unwrap();
        assert_eq!(dist_z(v12, &s).unwrap().length, 1);
        let r = dist_z(&abc("a^100"), &s).unwrap();
        assert_eq!(r.length, 17);
        assert!(r.witness.is_graphical());
        assert!(r.witness.factors.iter().all(|f| is_w_word(f, &s)));
        // leftmost-longest: sixteen a⁶ blocks then a⁴
        assert_eq!(r.witness.factors[0].len(), 6);
        assert_eq!(r.witness.factors[16].len(), 4);
        assert_eq!(dist_z(&abc("a"), &s).unwrap().length, 1);
        assert_eq!(dist_z(&ReducedWord::empty(), &s).unwrap().length, 0);
        let bad = ReducedWord::positive([3]);
        assert!(dist_z(&bad, &s).is_err());
    }

    #[test]
    fn dp_matches_direct_membership() {
        use rand::Rng;
        let s = seeds(&[12, 13]);
        let m = ZMetric::new(&s);
        let mut rng = crate::rng::seeded(5);
        let letters = Alphabet::abc().letters();
        for _ in 0..300 {
            let len = rng.gen_range(1..40);
            let w = if rng.gen_bool(0.5) {
                // long factors of the seeds glued together
                let v = family().get(12).unwrap();
                let a = rng.gen_range(0..v.len() - 10);
                let b = rng.gen_range(a + 1..v.len());
                let u = v.subword(a..b);
                u.mul(&abc("c")).mul(&family().get(13).unwrap().subword(0..rng.gen_range(1..30)))
            } else {
                ReducedWord::reduce_letters((0..len).map(|_| letters[rng.gen_range(0..6)]))
            };
            if w.is_empty() {
                continue;
            }
            assert_eq!(m.dist(&w).unwrap().length, slow_dist(&w, &s), "{}", Alphabet::abc().format(&w));
        }
    }

    #[test]
    fn bfs_examples() {
        let s = seeds(&[12]);
        assert_eq!(bfs_oracle_dist(&abc("c"), &s, 8).unwrap(), 1);
        let prefix = family().get(12).unwrap().subword(0..8);
        assert_eq!(
            bfs_oracle_dist(&prefix, &s, 8).unwrap(),
            dist_z(&prefix, &s).unwrap().length
        );
        assert!(bfs_oracle_dist(&abc("a^9"), &s, 8).is_err());
        assert!(BfsOracle::build(&s, 8, 12, 1000, Exec::Sequential).unwrap_err().is_budget());
    }

    #[test]
    fn bfs_agrees_on_all_words_up_to_five() {
        let s = seeds(&[12]);
        let oracle = BfsOracle::build(&s, 5, 5, DEFAULT_BALL_BUDGET, Exec::default()).unwrap();
        let m = ZMetric::new(&s);
        let letters = Alphabet::abc().letters();
        let mut layer = vec![ReducedWord::empty()];
        for _ in 0..5 {
            let mut next = Vec::new();
            for w in &layer {
                for &l in &letters {
                    let x = w.mul(&ReducedWord::reduce_letters([l]));
                    if x.len() == w.len() + 1 {
                        assert_eq!(Some(m.dist(&x).unwrap().length), oracle.dist(&x));
                        next.push(x);
                    }
                }
            }
            layer = next;
        }
    }

    #[test]
    fn separation_examples() {
        let s = seeds(&[12]);
        let t = seeds(&[13]);
        let v12 = family().get(12).unwrap();
        assert_eq!(dist_z(v12, &s).unwrap().length, 1);
        assert!(dist_z(v12, &t).unwrap().length >= 3);

        let cert = separation_certificate(&s, &t, 4).unwrap();
        assert_eq!(cert.verdict, SeparationVerdict::IncomparableEvidence);
        assert_eq!(cert.s_minus_t[0].length_in_s, 1);

        let cert = separation_certificate(&seeds(&[12, 14]), &t, 4).unwrap();
        assert!(cert.s_minus_t.iter().all(|p| p.length_in_s == 1));
        assert_eq!(cert.s_minus_t.len(), 2);

        let cert = separation_certificate(&s, &seeds(&[12, 13]), 4).unwrap();
        assert!(cert.s_minus_t.is_empty());
        assert_eq!(
            cert.verdict,
            SeparationVerdict::DominatedEvidence {
                s_length_bounded_by_t: false,
                t_length_bounded_by_s: true
            }
        );
        assert!(separation_certificate(&s, &s, 4).is_err());
    }

    #[test]
    fn seed_members_have_length_one() {
        let s = seeds(&[12, 13, 14]);
        for k in 12..=14 {
            assert_eq!(dist_z(family().get(k).unwrap(), &s).unwrap().length, 1);
        }
        for (k, others) in [(12, [13, 14]), (13, [12, 14]), (14, [12, 13])] {
            assert!(dist_z(family().get(k).unwrap(), &seeds(&others)).unwrap().length >= 2);
        }
    }

    fn abc_word() -> impl Strategy<Value = ReducedWord> {
        prop::collection::vec((0u16..3, any::<bool>()), 1..30).prop_map(|v| {
            ReducedWord::reduce_letters(
                v.into_iter()
                    .map(|(s, p)| if p { Letter::pos(s) } else { Letter::neg(s) }),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn subadditive_under_graphical_concatenation(u in abc_word(), v in abc_word()) {
            let s = seeds(&[12]);
            if let Ok(uv) = u.concat_graphical(&v) {
                let m = ZMetric::new(&s);
                prop_assert!(m.dist(&uv).unwrap().length <= m.dist(&u).unwrap().length + m.dist(&v).unwrap().length);
            }
        }

        #[test]
        fn monotone_in_seed_set(w in abc_word()) {
            let small = ZMetric::new(&seeds(&[13]));
            let big = ZMetric::new(&seeds(&[12, 13]));
            prop_assert!(big.dist(&w).unwrap().length <= small.dist(&w).unwrap().length);
        }

        #[test]
        fn greedy_longest_factor_is_optimal(w in abc_word()) {
            let m = ZMetric::new(&seeds(&[12, 14]));
            let reach = m.reach(w.letters());
            let (mut j, mut count) = (0, 0);
            while j < w.len() { j += reach[j]; count += 1; }
            prop_assert_eq!(count, m.dist(&w).unwrap().length);
        }
    }
}
