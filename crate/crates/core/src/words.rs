//! Free-group words over a finite signed alphabet.
//!
//! Words are flat letter vectors. A [`ReducedWord`] never contains an
//! adjacent pair `x x⁻¹`; every constructor enforces this. "Subword" always
//! means a contiguous factor.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered, non-empty list of distinct symbol names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidParameter("alphabet must be non-empty".into()));
        }
        if symbols.len() > u16::MAX as usize {
            return Err(Error::InvalidParameter("alphabet too large".into()));
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(|c| c.is_whitespace() || c == '\'' || c == '^') {
                return Err(Error::InvalidParameter(format!("bad symbol name {s:?}")));
            }
            if symbols[..i].contains(s) {
                return Err(Error::InvalidParameter(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// `{a, b}`
    pub fn ab() -> Self {
        Alphabet::new(["a", "b"]).expect("static alphabet")
    }

    /// `{a, b, c}`
    pub fn abc() -> Self {
        Alphabet::new(["a", "b", "c"]).expect("static alphabet")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn name(&self, symbol: u16) -> Option<&str> {
        self.symbols.get(symbol as usize).map(String::as_str)
    }

    pub fn index_of(&self, name: &str) -> Option<u16> {
        self.symbols.iter().position(|s| s == name).map(|i| i as u16)
    }

    /// Every letter of the alphabet and its inverse, in declaration order
    /// with `x` before `x⁻¹`.
    pub fn letters(&self) -> Vec<Letter> {
        (0..self.len() as u16)
            .flat_map(|s| [Letter::pos(s), Letter::neg(s)])
            .collect()
    }

    pub fn contains(&self, letter: Letter) -> bool {
        (letter.symbol as usize) < self.len()
    }

    /// Parse whitespace-separated letters: `a`, `b'` (inverse), `a^6`,
    /// `b'^2`, `a^-3`. The empty string and `1` denote the identity.
    pub fn parse(&self, text: &str) -> Result<ReducedWord> {
        let mut raw = Vec::new();
        for token in text.split_whitespace() {
            if token == "1" {
                continue;
            }
            let (base, exp) = match token.split_once('^') {
                Some((b, e)) => {
                    let e: i64 = e
                        .parse()
                        .map_err(|_| Error::MalformedInput(format!("bad exponent in {token:?}")))?;
                    (b, e)
                }
                None => (token, 1),
            };
            let (name, inverted) = match base.strip_suffix('\'') {
                Some(n) => (n, true),
                None => (base, false),
            };
            let symbol = self
                .index_of(name)
                .ok_or_else(|| Error::MalformedInput(format!("unknown symbol {name:?}")))?;
            let mut letter = Letter::pos(symbol);
            if inverted {
                letter = letter.inverse();
            }
            if exp < 0 {
                letter = letter.inverse();
            }
            raw.extend(std::iter::repeat(letter).take(exp.unsigned_abs() as usize));
        }
        reduce(self, &raw)
    }

    /// Inverse of [`Alphabet::parse`]; never emits exponents.
    pub fn format(&self, w: &ReducedWord) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        let mut out = String::with_capacity(w.len() * 3);
        for (i, l) in w.letters().iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(self.name(l.symbol).unwrap_or("?"));
            if l.sign == Sign::Neg {
                out.push('\'');
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }
}

/// A generator or its inverse. Ordering is by symbol, then `x < x⁻¹`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub symbol: u16,
    pub sign: Sign,
}

impl Letter {
    pub const fn pos(symbol: u16) -> Self {
        Letter {
            symbol,
            sign: Sign::Pos,
        }
    }

    pub const fn neg(symbol: u16) -> Self {
        Letter {
            symbol,
            sign: Sign::Neg,
        }
    }

    pub fn inverse(self) -> Self {
        Letter {
            symbol: self.symbol,
            sign: self.sign.flip(),
        }
    }

    pub fn cancels(self, other: Letter) -> bool {
        self.symbol == other.symbol && self.sign != other.sign
    }
}

/// A freely reduced word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReducedWord {
    letters: Vec<Letter>,
}

/// Free reduction of `raw` against the given alphabet.
pub fn reduce(alphabet: &Alphabet, raw: &[Letter]) -> Result<ReducedWord> {
    if let Some(bad) = raw.iter().find(|l| !alphabet.contains(**l)) {
        return Err(Error::MalformedInput(format!(
            "symbol index {} outside alphabet of size {}",
            bad.symbol,
            alphabet.len()
        )));
    }
    Ok(ReducedWord::reduce_letters(raw.iter().copied()))
}

impl ReducedWord {
    pub fn empty() -> Self {
        ReducedWord::default()
    }

    /// Stack-based free reduction; no alphabet check.
    pub fn reduce_letters(raw: impl IntoIterator<Item = Letter>) -> Self {
        let mut letters: Vec<Letter> = Vec::new();
        for l in raw {
            match letters.last() {
                Some(&top) if top.cancels(l) => {
                    letters.pop();
                }
                _ => letters.push(l),
            }
        }
        ReducedWord { letters }
    }

    /// Accepts `letters` only if already freely reduced.
    pub fn try_from_letters(letters: Vec<Letter>) -> Result<Self> {
        if let Some(i) = letters.windows(2).position(|p| p[0].cancels(p[1])) {
            return Err(Error::InvalidInput(format!(
                "letters {i} and {} cancel",
                i + 1
            )));
        }
        Ok(ReducedWord { letters })
    }

    /// Positive word from symbol indices.
    pub fn positive(symbols: impl IntoIterator<Item = u16>) -> Self {
        ReducedWord {
            letters: symbols.into_iter().map(Letter::pos).collect(),
        }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn inverse(&self) -> Self {
        ReducedWord {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Product in the free group (concatenate, then reduce at the seam).
    pub fn mul(&self, other: &ReducedWord) -> Self {
        let mut letters = self.letters.clone();
        let mut rest = other.letters.iter().peekable();
        while let (Some(&top), Some(&&next)) = (letters.last(), rest.peek()) {
            if top.cancels(next) {
                letters.pop();
                rest.next();
            } else {
                break;
            }
        }
        letters.extend(rest);
        ReducedWord { letters }
    }

    /// Concatenation without cancellation, failing if the seam cancels.
    pub fn concat_graphical(&self, other: &ReducedWord) -> Result<Self> {
        if let (Some(a), Some(b)) = (self.last(), other.first()) {
            if a.cancels(b) {
                return Err(Error::InvalidInput("concatenation is not reduced".into()));
            }
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(ReducedWord { letters })
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = ReducedWord::empty();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    /// Contiguous factor; factors of reduced words are reduced.
    pub fn subword(&self, range: std::ops::Range<usize>) -> Self {
        ReducedWord {
            letters: self.letters[range].to_vec(),
        }
    }

    /// Letters in reverse order, signs unchanged. For positive words this
    /// is the mirror image, not the group inverse.
    pub fn reversed(&self) -> Self {
        ReducedWord {
            letters: self.letters.iter().rev().copied().collect(),
        }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(a), Some(b)) if self.len() > 1 => !a.cancels(b),
            _ => true,
        }
    }

    /// Conjugate to the cyclically reduced core.
    pub fn cyclic_core(&self) -> Self {
        let n = self.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k].cancels(self.letters[n - 1 - k]) {
            k += 1;
        }
        self.subword(k..n - k)
    }

    pub fn count_symbol(&self, symbol: u16) -> usize {
        self.letters.iter().filter(|l| l.symbol == symbol).count()
    }

    /// Rotation by `k` letters to the left. Caller guarantees cyclic
    /// reducedness when the result must be reduced.
    fn rotate(&self, k: usize) -> Self {
        let mut letters = self.letters.clone();
        if !letters.is_empty() {
            letters.rotate_left(k % self.len());
        }
        ReducedWord { letters }
    }
}

pub fn is_positive(w: &ReducedWord) -> bool {
    w.letters.iter().all(|l| l.sign == Sign::Pos)
}

/// True iff `w` has no non-empty factor of the form `vˡ`.
///
/// For each period `p` the scan tracks the run of positions `i` with
/// `w[i] = w[i + p]`; a factor `vˡ` with `|v| = p` exists exactly when some
/// run reaches `p·(l − 1)`. Total work is `O(|w|²)`.
pub fn is_l_aperiodic(w: &ReducedWord, l: usize) -> Result<bool> {
    if l == 0 {
        return Err(Error::InvalidParameter("l must be at least 1".into()));
    }
    let s = w.letters();
    let n = s.len();
    if l == 1 {
        return Ok(n == 0);
    }
    for p in 1..=n / l {
        let need = p * (l - 1);
        let mut run = 0usize;
        for i in 0..n - p {
            if s[i] == s[i + p] {
                run += 1;
                if run >= need {
                    return Ok(false);
                }
            } else {
                run = 0;
            }
        }
    }
    Ok(true)
}

/// All rotations of a cyclically reduced word, starting with `w`.
pub fn cyclic_shifts(w: &ReducedWord) -> Result<Vec<ReducedWord>> {
    if !w.is_cyclically_reduced() {
        return Err(Error::InvalidInput("word is not cyclically reduced".into()));
    }
    Ok((0..w.len()).map(|k| w.rotate(k)).collect())
}

/// A cyclically reduced word up to rotation.
#[derive(Clone, Debug)]
pub struct CyclicWord {
    representative: ReducedWord,
}

impl CyclicWord {
    pub fn new(w: ReducedWord) -> Result<Self> {
        if !w.is_cyclically_reduced() {
            return Err(Error::InvalidInput("word is not cyclically reduced".into()));
        }
        Ok(CyclicWord { representative: w })
    }

    pub fn representative(&self) -> &ReducedWord {
        &self.representative
    }

    pub fn len(&self) -> usize {
        self.representative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representative.is_empty()
    }

    /// Lexicographically least rotation.
    pub fn canonical(&self) -> ReducedWord {
        let n = self.len();
        (0..n.max(1))
            .map(|k| self.representative.rotate(k))
            .min()
            .unwrap_or_default()
    }

    /// Letter at cyclic position `i`.
    pub fn at(&self, i: usize) -> Letter {
        self.representative.letters[i % self.len()]
    }
}

impl PartialEq for CyclicWord {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.canonical() == other.canonical()
    }
}

impl Eq for CyclicWord {}

impl fmt::Display for ReducedWord {
    /// Compact form with symbols `x0, x1, …`; use [`Alphabet::format`] for
    /// real names.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "x{}", l.symbol)?;
            if l.sign == Sign::Neg {
                write!(f, "'")?;
            }
        }
        Ok(())
    }
}
