//! Exact arithmetic in the example groups.
//!
//! * [`BsElement`]: `BS(1,2) = ⟨a, b | b a b⁻¹ = a²⟩` in the normal form
//!   `b⁻ᵖ aᵐ b^q`.
//! * [`WreathElement`]: `ℤ wr ℤ` and `ℤ_n wr ℤ` as pairs `(f, k)` meaning
//!   `(∏ a_i^{f(i)}) s^k`, where `s a_i s⁻¹ = a_{i+1}`.
//! * `ℤ²` as `[i64; 2]`; free groups live in [`crate::words`].
//!
//! Every stable letter (`b` in `BS(1,2)`, `s`/`t` in the wreath products) is
//! handled by the same ascending-HNN logic; the conventional names are kept
//! only for parsing and printing.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter, ReducedWord, Sign};

/// Group operations shared by the element types.
pub trait GroupOps: Clone + PartialEq {
    /// The identity of the group `self` lives in.
    fn identity_like(&self) -> Self;
    fn op(&self, other: &Self) -> Result<Self>;
    fn inv(&self) -> Self;

    /// Square-and-multiply power; negative exponents invert first.
    fn pow(&self, n: i64) -> Result<Self> {
        let mut base = if n < 0 { self.inv() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = self.identity_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.op(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.op(&base)?;
            }
        }
        Ok(acc)
    }
}

pub const BS_BIT_BUDGET: u64 = 10_000;

/// `b⁻ᵖ aᵐ b^q` in `BS(1,2)`, Britton-reduced: `p > 0 ∧ q > 0 ⟹ m` odd.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BsElement {
    p: u64,
    m: BigInt,
    q: u64,
}

impl BsElement {
    pub fn identity() -> Self {
        BsElement {
            p: 0,
            m: BigInt::zero(),
            q: 0,
        }
    }

    pub fn a() -> Self {
        BsElement {
            p: 0,
            m: BigInt::one(),
            q: 0,
        }
    }

    pub fn b() -> Self {
        BsElement {
            p: 0,
            m: BigInt::zero(),
            q: 1,
        }
    }

    pub fn a_pow(m: impl Into<BigInt>) -> Self {
        BsElement {
            p: 0,
            m: m.into(),
            q: 0,
        }
    }

    pub fn b_pow(k: i64) -> Self {
        if k >= 0 {
            BsElement {
                p: 0,
                m: BigInt::zero(),
                q: k as u64,
            }
        } else {
            BsElement {
                p: k.unsigned_abs(),
                m: BigInt::zero(),
                q: 0,
            }
        }
    }

    /// Normalizes an arbitrary triple.
    pub fn new(p: u64, m: impl Into<BigInt>, q: u64) -> Result<Self> {
        let g = BsElement { p, m: m.into(), q };
        g.check_budget()?;
        Ok(g.normalized())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> &BigInt {
        &self.m
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    fn normalized(mut self) -> Self {
        if self.p > 0 && self.q > 0 {
            let twos = if self.m.is_zero() {
                u64::MAX
            } else {
                self.m.trailing_zeros().unwrap_or(0)
            };
            let k = twos.min(self.p).min(self.q);
            if k > 0 {
                if !self.m.is_zero() {
                    self.m >>= k as usize;
                }
                self.p -= k;
                self.q -= k;
            }
        }
        self
    }

    fn check_budget(&self) -> Result<()> {
        if self.m.bits() > BS_BIT_BUDGET {
            return Err(Error::budget("BS(1,2) exponent size in bits", BS_BIT_BUDGET));
        }
        Ok(())
    }

    /// Exponent sum of `b`, the homomorphism `ε: BS(1,2) → ℤ`.
    pub fn epsilon(&self) -> i64 {
        self.q as i64 - self.p as i64
    }

    /// Distance from the base vertex in the Bass–Serre tree: the number of
    /// stable letters in the normal form.
    pub fn tree_length(&self) -> u64 {
        self.p + self.q
    }

    /// Britton normal form of a word over `{a, b}` (symbols 0 and 1).
    pub fn from_word(w: &ReducedWord) -> Result<Self> {
        let mut g = BsElement::identity();
        for l in w.letters() {
            let step = match (l.symbol, l.sign) {
                (0, Sign::Pos) => BsElement::a(),
                (0, Sign::Neg) => BsElement::a_pow(-1),
                (1, Sign::Pos) => BsElement::b(),
                (1, Sign::Neg) => BsElement::b_pow(-1),
                (s, _) => {
                    return Err(Error::MalformedInput(format!(
                        "symbol index {s} is not a generator of BS(1,2)"
                    )))
                }
            };
            g = g.op(&step)?;
        }
        Ok(g)
    }

    /// Parses `b^-p a^m b^q`, or any word over `a, b` with exponents.
    pub fn parse(text: &str) -> Result<Self> {
        let mut g = BsElement::identity();
        for token in text.split_whitespace() {
            if token == "1" {
                continue;
            }
            let (base, exp) = match token.split_once('^') {
                Some((b, e)) => (
                    b,
                    e.parse::<BigInt>()
                        .map_err(|_| Error::MalformedInput(format!("bad exponent in {token:?}")))?,
                ),
                None => (token, BigInt::one()),
            };
            let (name, exp) = match base.strip_suffix('\'') {
                Some(n) => (n, -exp),
                None => (base, exp),
            };
            let step = match name {
                "a" => BsElement::a_pow(exp),
                "b" => {
                    let k = exp
                        .to_i64()
                        .ok_or_else(|| Error::MalformedInput(format!("exponent too large in {token:?}")))?;
                    BsElement::b_pow(k)
                }
                other => return Err(Error::MalformedInput(format!("unknown BS(1,2) symbol {other:?}"))),
            };
            g = g.op(&step)?;
        }
        Ok(g)
    }

    /// Matrix of the standard action on the upper half-plane:
    /// `a ↦ z + 1`, `b ↦ 2z`.
    pub fn matrix(&self) -> Mat2 {
        let half = std::f64::consts::SQRT_2;
        let e = self.epsilon() as i32;
        let m = bigint_to_f64(&self.m);
        let s = (self.p + self.q) as i32;
        Mat2([
            [pow_sqrt2(e, half), m * 2f64.powf(-(s as f64) / 2.0)],
            [0.0, pow_sqrt2(-e, half)],
        ])
    }

    /// Image of `i` under [`BsElement::matrix`], computed directly:
    /// `x = m·2⁻ᵖ`, `y = 2^{q−p}`.
    pub fn image_of_i(&self) -> (f64, f64) {
        let x = bigint_to_f64(&self.m) * 2f64.powi(-(self.p as i32));
        let y = 2f64.powi(self.epsilon() as i32);
        (x, y)
    }
}

fn pow_sqrt2(e: i32, sqrt2: f64) -> f64 {
    let whole = 2f64.powi(e.div_euclid(2));
    if e.rem_euclid(2) == 1 {
        whole * sqrt2
    } else {
        whole
    }
}

pub(crate) fn bigint_to_f64(m: &BigInt) -> f64 {
    m.to_f64().unwrap_or(if m.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

impl GroupOps for BsElement {
    fn identity_like(&self) -> Self {
        BsElement::identity()
    }

    fn op(&self, other: &Self) -> Result<Self> {
        let g = if self.q >= other.p {
            let k = self.q - other.p;
            BsElement {
                p: self.p,
                m: &self.m + (&other.m << k as usize),
                q: k + other.q,
            }
        } else {
            let k = other.p - self.q;
            BsElement {
                p: self.p + k,
                m: (&self.m << k as usize) + &other.m,
                q: other.q,
            }
        };
        g.check_budget()?;
        Ok(g.normalized())
    }

    fn inv(&self) -> Self {
        BsElement {
            p: self.q,
            m: -&self.m,
            q: self.p,
        }
    }
}

impl fmt::Display for BsElement {
    /// `b^-p a^m b^q`, omitting trivial parts; the identity prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.p > 0 {
            parts.push(format!("b^-{}", self.p));
        }
        if !self.m.is_zero() {
            parts.push(format!("a^{}", self.m));
        }
        if self.q > 0 {
            parts.push(format!("b^{}", self.q));
        }
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

impl Serialize for BsElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `(f, k)` in `ℤ wr ℤ` (`modulus = None`) or `ℤ_n wr ℤ`.
///
/// `f` is stored as sorted `(position, value)` pairs with zero values
/// removed; in the quotient, values lie in `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WreathElement {
    modulus: Option<u64>,
    f: Vec<(i64, i64)>,
    k: i64,
}

impl WreathElement {
    pub fn identity(modulus: Option<u64>) -> Self {
        WreathElement { modulus, f: Vec::new(), k: 0 }
    }

    pub fn new(modulus: Option<u64>, f: impl IntoIterator<Item = (i64, i64)>, k: i64) -> Result<Self> {
        if let Some(n) = modulus {
            if n < 2 {
                return Err(Error::InvalidParameter(format!("modulus must be at least 2, got {n}")));
            }
        }
        let mut acc: BTreeMap<i64, i64> = BTreeMap::new();
        for (i, v) in f {
            *acc.entry(i).or_insert(0) += v;
        }
        Ok(WreathElement {
            modulus,
            f: Self::prune(modulus, acc),
            k,
        })
    }

    /// `a_i^v`.
    pub fn lamp(modulus: Option<u64>, i: i64, v: i64) -> Self {
        WreathElement {
            modulus,
            f: Self::prune(modulus, BTreeMap::from([(i, v)])),
            k: 0,
        }
    }

    /// The stable letter `s` (written `t` in the quotients).
    pub fn shift(modulus: Option<u64>, k: i64) -> Self {
        WreathElement { modulus, f: Vec::new(), k }
    }

    fn prune(modulus: Option<u64>, acc: BTreeMap<i64, i64>) -> Vec<(i64, i64)> {
        acc.into_iter()
            .map(|(i, v)| match modulus {
                Some(n) => (i, v.rem_euclid(n as i64)),
                None => (i, v),
            })
            .filter(|&(_, v)| v != 0)
            .collect()
    }

    pub fn modulus(&self) -> Option<u64> {
        self.modulus
    }

    pub fn support(&self) -> &[(i64, i64)] {
        &self.f
    }

    pub fn value(&self, i: i64) -> i64 {
        self.f
            .binary_search_by_key(&i, |&(j, _)| j)
            .map_or(0, |ix| self.f[ix].1)
    }

    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn epsilon(&self) -> i64 {
        self.k
    }

    /// Reduction `ℤ_m wr ℤ → ℤ_n wr ℤ` (or from `ℤ wr ℤ`); requires `n | m`.
    pub fn reduce_mod(&self, n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("modulus must be at least 2, got {n}")));
        }
        if let Some(m) = self.modulus {
            if m % n != 0 {
                return Err(Error::InvalidParameter(format!("{n} does not divide {m}")));
            }
        }
        WreathElement::new(Some(n), self.f.iter().copied(), self.k)
    }

    /// Distance from the base vertex `B` in the Bass–Serre tree of the
    /// ascending HNN extension over `B = ⟨a_0, a_1, …⟩`:
    /// `2p + k` with `p = max(0, −min supp f, −k)`.
    pub fn tree_length(&self) -> u64 {
        let lo = self.f.first().map_or(0, |&(i, _)| i);
        let p = 0.max(-lo).max(-self.k);
        (2 * p + self.k) as u64
    }

    /// `φ_ξ(g)` with `s ↦ diag(√ξ, 1/√ξ)` and `a_i ↦ [[1, ξⁱ], [0, 1]]`.
    pub fn phi_xi(&self, xi: f64) -> Result<Mat2> {
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(Error::InvalidParameter(format!("ξ must be positive, got {xi}")));
        }
        if self.modulus.is_some() {
            return Err(Error::IncompatibleElement("φ_ξ is defined on ℤ wr ℤ only".into()));
        }
        let top: f64 = self.f.iter().map(|&(i, v)| v as f64 * xi.powi(i as i32)).sum();
        let half = xi.powf(self.k as f64 / 2.0);
        Ok(Mat2([[half, top / half], [0.0, 1.0 / half]]))
    }

    /// Parses `{-1:2, 3:1}@k`; `@k` may be omitted.
    pub fn parse(text: &str, modulus: Option<u64>) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::MalformedInput(format!("bad wreath literal {text:?}"));
        let (body, k) = match text.rsplit_once('@') {
            Some((b, k)) => (b.trim(), k.trim().parse::<i64>().map_err(|_| bad())?),
            None => (text, 0),
        };
        let inner = body.strip_prefix('{').and_then(|b| b.strip_suffix('}')).ok_or_else(bad)?;
        let mut pairs = Vec::new();
        for item in inner.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (i, v) = item.split_once(':').ok_or_else(bad)?;
            pairs.push((
                i.trim().parse::<i64>().map_err(|_| bad())?,
                v.trim().parse::<i64>().map_err(|_| bad())?,
            ));
        }
        WreathElement::new(modulus, pairs, k)
    }
}

impl GroupOps for WreathElement {
    fn identity_like(&self) -> Self {
        WreathElement::identity(self.modulus)
    }

    /// `(f, k)(g, l) = (f + g(· − k), k + l)`; operands with different
    /// moduli are rejected.
    fn op(&self, other: &Self) -> Result<Self> {
        self.try_op(other)
    }

    fn inv(&self) -> Self {
        WreathElement::new(self.modulus, self.f.iter().map(|&(i, v)| (i - self.k, -v)), -self.k)
            .expect("modulus already validated")
    }
}

impl WreathElement {
    pub fn try_op(&self, other: &Self) -> Result<Self> {
        if self.modulus != other.modulus {
            return Err(Error::IncompatibleElement(format!(
                "moduli {:?} and {:?} differ",
                self.modulus, other.modulus
            )));
        }
        let shifted = other.f.iter().map(|&(i, v)| (i + self.k, v));
        WreathElement::new(self.modulus, self.f.iter().copied().chain(shifted), self.k + other.k)
    }
}

impl fmt::Display for WreathElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.f.iter().map(|(i, v)| format!("{i}:{v}")).collect();
        write!(f, "{{{}}}@{}", items.join(", "), self.k)
    }
}

impl Serialize for WreathElement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl GroupOps for [i64; 2] {
    fn identity_like(&self) -> Self {
        [0, 0]
    }

    fn op(&self, other: &Self) -> Result<Self> {
        Ok([self[0] + other[0], self[1] + other[1]])
    }

    fn inv(&self) -> Self {
        [-self[0], -self[1]]
    }
}

impl GroupOps for i64 {
    fn identity_like(&self) -> Self {
        0
    }

    fn op(&self, other: &Self) -> Result<Self> {
        self.checked_add(*other)
            .ok_or_else(|| Error::budget("integer overflow in ℤ", i64::MAX as u64))
    }

    fn inv(&self) -> Self {
        -self
    }
}

impl GroupOps for ReducedWord {
    fn identity_like(&self) -> Self {
        ReducedWord::empty()
    }

    fn op(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(other))
    }

    fn inv(&self) -> Self {
        self.inverse()
    }
}

/// A 2×2 real matrix, used for actions on the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }

    pub fn det(&self) -> f64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Inverse of a determinant-one matrix.
    pub fn inv_sl2(&self) -> Mat2 {
        let m = self.0;
        Mat2([[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]])
    }

    /// Möbius action `z ↦ (az + b)/(cz + d)` on a point `x + iy`.
    pub fn apply(&self, (x, y): (f64, f64)) -> (f64, f64) {
        let [[a, b], [c, d]] = self.0;
        // (a z + b)(c z̄ + d) / |c z + d|²
        let den = (c * x + d).powi(2) + (c * y).powi(2);
        let re = ((a * x + b) * (c * x + d) + a * c * y * y) / den;
        let im = (a * d - b * c) * y / den;
        (re, im)
    }

    pub fn max_abs_diff(&self, o: &Mat2) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let scale = 1f64.max(self.0[r][c].abs()).max(o.0[r][c].abs());
                worst = worst.max((self.0[r][c] - o.0[r][c]).abs() / scale);
            }
        }
        worst
    }
}

impl Serialize for Mat2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::real::ser_matrix(&self.0, s)
    }
}

/// A homomorphism used by the experiments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum HomDescriptor {
    /// `ε`: exponent sum of the stable letter.
    ExponentSum,
    /// `ℤ wr ℤ → ℤ_n wr ℤ`.
    ModReduction { n: u64 },
    /// `φ_ξ: ℤ wr ℤ → SL₂(ℝ)`.
    MatrixRepresentation {
        #[serde(serialize_with = "crate::real::ser_f64")]
        xi: f64,
    },
}

impl HomDescriptor {
    /// Checks parameters; `quasi_parabolic` additionally forbids `ξ = 1`.
    pub fn validate(&self, quasi_parabolic: bool) -> Result<()> {
        match *self {
            HomDescriptor::ExponentSum => Ok(()),
            HomDescriptor::ModReduction { n } if n >= 2 => Ok(()),
            HomDescriptor::ModReduction { n } => {
                Err(Error::InvalidParameter(format!("modulus must be at least 2, got {n}")))
            }
            HomDescriptor::MatrixRepresentation { xi } if !(xi > 0.0 && xi.is_finite()) => {
                Err(Error::InvalidParameter(format!("ξ must be positive, got {xi}")))
            }
            HomDescriptor::MatrixRepresentation { xi } if quasi_parabolic && xi == 1.0 => {
                Err(Error::InvalidParameter("ξ = 1 gives a parabolic image".into()))
            }
            HomDescriptor::MatrixRepresentation { .. } => Ok(()),
        }
    }
}

/// Britton normal form of a word, with the alphabet `{a, b}`.
pub fn bs_normalize(text: &str) -> Result<BsElement> {
    BsElement::from_word(&Alphabet::ab().parse(text)?)
}

/// Random unreduced word of length `len` over the first `symbols` letters
/// and their inverses.
pub fn random_letters<R: rand::Rng>(rng: &mut R, symbols: u16, len: usize) -> Vec<Letter> {
    (0..len)
        .map(|_| {
            let s = rng.gen_range(0..symbols);
            if rng.gen_bool(0.5) {
                Letter::pos(s)
            } else {
                Letter::neg(s)
            }
        })
        .collect()
}

/// Random element of `BS(1,2)` given by a random word of length `≤ max_len`.
pub fn random_bs<R: rand::Rng>(rng: &mut R, max_len: usize) -> BsElement {
    let len = rng.gen_range(0..=max_len);
    let w = ReducedWord::reduce_letters(random_letters(rng, 2, len));
    BsElement::from_word(&w).expect("short words stay within budget")
}

/// Random element of a wreath product given by a random word in `a_0, s`.
pub fn random_wreath<R: rand::Rng>(rng: &mut R, modulus: Option<u64>, max_len: usize) -> WreathElement {
    let len = rng.gen_range(0..=max_len);
    let mut g = WreathElement::identity(modulus);
    for l in random_letters(rng, 2, len) {
        let e = l.sign.as_i8() as i64;
        let step = if l.symbol == 0 {
            WreathElement::lamp(modulus, 0, e)
        } else {
            WreathElement::shift(modulus, e)
        };
        g = g.try_op(&step).expect("same modulus");
    }
    g
}

/// `2^k` as a big integer, for building `a^{2^k}`.
pub fn two_pow(k: u32) -> BigInt {
    BigInt::one() << k as usize
}
