//! Quasi-characters, homogenization, Busemann estimates, and the lineal
//! generating sets `X_{p,C} = {g : |p(g)| < C}` on `ℤ²`.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::actions::{half_plane_distance, ActionModel, GroupElement};
use crate::error::{Error, Result};
use crate::groups::{BsElement, GroupOps, WreathElement};
use crate::real::{rational, rational_to_f64, ser_f64};

/// A real function on a group with bounded defect
/// `|q(gh) − q(g) − q(h)| ≤ D`.
pub trait QuasiCharacter<G> {
    fn eval(&self, g: &G) -> f64;
    fn declared_defect(&self) -> f64;
}

/// Exponent sum of the stable letter.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExponentSum;

impl QuasiCharacter<BsElement> for ExponentSum {
    fn eval(&self, g: &BsElement) -> f64 {
        g.epsilon() as f64
    }

    fn declared_defect(&self) -> f64 {
        0.0
    }
}

impl QuasiCharacter<WreathElement> for ExponentSum {
    fn eval(&self, g: &WreathElement) -> f64 {
        g.epsilon() as f64
    }

    fn declared_defect(&self) -> f64 {
        0.0
    }
}

/// A quasi-character given by a closure and a declared defect.
pub struct FnCharacter<F> {
    f: F,
    defect: f64,
}

impl<F> FnCharacter<F> {
    pub fn new(f: F, defect: f64) -> Self {
        FnCharacter { f, defect }
    }
}

impl<G, F: Fn(&G) -> f64> QuasiCharacter<G> for FnCharacter<F> {
    fn eval(&self, g: &G) -> f64 {
        (self.f)(g)
    }

    fn declared_defect(&self) -> f64 {
        self.defect
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefectReport {
    #[serde(serialize_with = "ser_f64")]
    pub observed: f64,
    /// Index of the sample pair attaining `observed`.
    pub witness: Option<usize>,
    #[serde(serialize_with = "ser_f64")]
    pub declared: f64,
    pub within_declared: bool,
}

/// Largest `|q(gh) − q(g) − q(h)|` over the sample pairs: a lower bound on
/// the true defect.
pub fn defect_estimate<G: GroupOps, Q: QuasiCharacter<G>>(q: &Q, samples: &[(G, G)]) -> Result<DefectReport> {
    let mut observed: f64 = 0.0;
    let mut witness = None;
    for (i, (g, h)) in samples.iter().enumerate() {
        let d = (q.eval(&g.op(h)?) - q.eval(g) - q.eval(h)).abs();
        if d > observed {
            observed = d;
            witness = Some(i);
        }
    }
    let declared = q.declared_defect();
    Ok(DefectReport {
        observed,
        witness,
        declared,
        within_declared: observed <= declared + 1e-9,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Bracket {
    #[serde(serialize_with = "ser_f64")]
    pub lower: f64,
    #[serde(serialize_with = "ser_f64")]
    pub upper: f64,
}

impl Bracket {
    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.lower - tol <= x && x <= self.upper + tol
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// `p(g) = lim q(gⁿ)/n` lies within `D/n` of `q(gⁿ)/n`.
pub fn homogenize<G: GroupOps, Q: QuasiCharacter<G>>(q: &Q, g: &G, n_max: u64) -> Result<Bracket> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let n = i64::try_from(n_max).map_err(|_| Error::InvalidParameter("n_max too large".into()))?;
    let centre = q.eval(&g.pow(n)?) / n_max as f64;
    let slack = q.declared_defect() / n_max as f64;
    Ok(Bracket {
        lower: centre - slack,
        upper: centre + slack,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BusemannEstimate {
    /// `d(gs, x_n) − d(s, x_n)` along the ray.
    #[serde(serialize_with = "crate::real::ser_vec_f64")]
    pub values: Vec<f64>,
    pub window: usize,
    /// Range of the last `window` values; `limsup` is their maximum.
    pub tail: Bracket,
    #[serde(serialize_with = "ser_f64")]
    pub limsup: f64,
    /// `−ε(g)·ln 2` for `BS(1,2)` on the half-plane with a ray going up
    /// the imaginary axis.
    #[serde(serialize_with = "crate::real::ser_opt_f64")]
    pub closed_form: Option<f64>,
}

/// The Busemann quasi-character `limsup (d(gs, x_n) − d(s, x_n))` with the
/// limsup read over the last `window` ray points.
pub fn busemann_estimate(
    model: &ActionModel,
    g: &GroupElement,
    ray: &[(f64, f64)],
    window: usize,
) -> Result<BusemannEstimate> {
    if !matches!(model, ActionModel::BsHalfPlane | ActionModel::PhiXi { .. }) {
        return Err(Error::Unsupported(format!("{} is not a half-plane model", model.name())));
    }
    if ray.is_empty() || window == 0 {
        return Err(Error::InvalidParameter("ray and window must be non-empty".into()));
    }
    if ray.iter().any(|p| !(p.1 > 0.0)) {
        return Err(Error::InvalidInput("ray points must lie in the upper half-plane".into()));
    }
    let s = (0.0, 1.0);
    let gs = model.orbit_point(g)?;
    let values: Vec<f64> = ray
        .iter()
        .map(|&x| half_plane_distance(gs, x) - half_plane_distance(s, x))
        .collect();
    let window = window.min(values.len());
    let tail = &values[values.len() - window..];
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let vertical = ray.iter().all(|p| p.0 == 0.0) && ray.windows(2).all(|w| w[1].1 > w[0].1);
    let closed_form = match (model, g) {
        (ActionModel::BsHalfPlane, GroupElement::Bs(b)) if vertical => {
            Some(-(b.epsilon() as f64) * std::f64::consts::LN_2)
        }
        _ => None,
    };
    Ok(BusemannEstimate {
        values,
        window,
        tail: Bracket { lower: lo, upper: hi },
        limsup: hi,
        closed_form,
    })
}

/// `x_n = 2ⁿ·i` for `n = 1..=n_max`.
pub fn vertical_ray(n_max: usize) -> Vec<(f64, f64)> {
    (1..=n_max).map(|n| (0.0, 2f64.powi(n as i32))).collect()
}

/// `p(m, n) = αm + βn` on `ℤ²` with rational coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LinearCharacter {
    #[serde(with = "rational")]
    pub alpha: Rational64,
    #[serde(with = "rational")]
    pub beta: Rational64,
}

impl LinearCharacter {
    pub fn new(alpha: Rational64, beta: Rational64) -> Result<Self> {
        if alpha.is_zero() && beta.is_zero() {
            return Err(Error::InvalidStructure("pseudocharacter must be non-zero".into()));
        }
        Ok(LinearCharacter { alpha, beta })
    }

    /// `p_λ(m, n) = λm + (1 − λ)n`, `λ ∈ [0, 1]`.
    pub fn from_lambda(lambda: Rational64) -> Result<Self> {
        if lambda < Rational64::zero() || lambda > Rational64::one() {
            return Err(Error::InvalidParameter(format!(
                "λ = {} is outside [0, 1]",
                crate::real::rational_string(&lambda)
            )));
        }
        LinearCharacter::new(lambda, Rational64::one() - lambda)
    }

    pub fn value(&self, g: [i64; 2]) -> Rational64 {
        self.alpha * Rational64::from_integer(g[0]) + self.beta * Rational64::from_integer(g[1])
    }

    /// Common denominator form `(a m + b n) / d`.
    fn integer_form(&self) -> (i64, i64, i64) {
        let d = self.alpha.denom().lcm(self.beta.denom());
        (self.alpha.numer() * (d / self.alpha.denom()), self.beta.numer() * (d / self.beta.denom()), d)
    }

    /// Positive generator of the image `p(ℤ²)`.
    pub fn image_step(&self) -> Rational64 {
        let (a, b, d) = self.integer_form();
        Rational64::new(a.gcd(&b), d)
    }

    /// A vector with `p = image_step()`.
    fn step_vector(&self) -> [i64; 2] {
        let (a, b, _) = self.integer_form();
        let e = a.extended_gcd(&b);
        // a·x + b·y = gcd, with gcd taken positive
        if e.gcd < 0 {
            [-e.x, -e.y]
        } else {
            [e.x, e.y]
        }
    }

    /// Primitive `z ≠ 0` with `p(z) = 0`.
    pub fn null_direction(&self) -> [i64; 2] {
        let (a, b, _) = self.integer_form();
        let g = a.gcd(&b);
        [b / g, -a / g]
    }
}

impl QuasiCharacter<[i64; 2]> for LinearCharacter {
    fn eval(&self, g: &[i64; 2]) -> f64 {
        rational_to_f64(&self.value(*g))
    }

    fn declared_defect(&self) -> f64 {
        0.0
    }
}

/// `X_{p,C} = {g ∈ ℤ² : |p(g)| < C}` with a chosen `x`, `p(x) ∈ (0, C/2)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinealGenSet {
    pub p: LinearCharacter,
    #[serde(with = "rational")]
    pub c: Rational64,
    pub x: [i64; 2],
}

impl LinealGenSet {
    pub fn new(p: LinearCharacter, c: Rational64, x: [i64; 2]) -> Result<Self> {
        if c <= Rational64::zero() {
            return Err(Error::InvalidStructure("C must be positive".into()));
        }
        let px = p.value(x);
        if px <= Rational64::zero() || px >= c / 2 {
            return Err(Error::InvalidStructure(format!(
                "p(x) = {} is not in (0, C/2)",
                crate::real::rational_string(&px)
            )));
        }
        Ok(LinealGenSet { p, c, x })
    }

    /// Picks `x` as the largest multiple of the image step below `C/2`.
    pub fn with_default_x(p: LinearCharacter, c: Rational64) -> Result<Self> {
        let step = p.image_step();
        let half = c / 2;
        let k = (half / step).ceil().to_integer() - 1;
        if k < 1 {
            return Err(Error::InvalidStructure("p takes no value in (0, C/2)".into()));
        }
        let v = p.step_vector();
        LinealGenSet::new(p, c, [k * v[0], k * v[1]])
    }

    pub fn contains(&self, g: [i64; 2]) -> bool {
        self.p.value(g).abs() < self.c
    }

    /// Largest value of `|p|` on `X`.
    fn max_value(&self) -> Rational64 {
        let step = self.p.image_step();
        step * ((self.c / step).ceil() - Rational64::one())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LengthBracket {
    pub lower: u64,
    pub upper: u64,
    pub exact: Option<u64>,
}

/// Bounds on `|g|_X`: `⌈|p(g)|/C⌉ ≤ |g|_X ≤ ⌊|p(g)/p(x)|⌋ + 2`, and the
/// exact value `⌈|p(g)|/v⌉`, where `v` is the largest value of `|p|` below
/// `C`.
pub fn lineal_length_bracket(x: &LinealGenSet, g: [i64; 2]) -> LengthBracket {
    if g == [0, 0] {
        return LengthBracket {
            lower: 0,
            upper: 0,
            exact: Some(0),
        };
    }
    if x.contains(g) {
        return LengthBracket {
            lower: 1,
            upper: 1,
            exact: Some(1),
        };
    }
    let pg = x.p.value(g).abs();
    let lower = (pg / x.c).ceil().to_integer().max(1) as u64;
    let upper = (pg / x.p.value(x.x)).floor().to_integer() as u64 + 2;
    let exact = (pg / x.max_value()).ceil().to_integer() as u64;
    LengthBracket {
        lower,
        upper,
        exact: Some(exact),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AntichainRow {
    pub i: i64,
    pub z: [i64; 2],
    /// `p(z_i)` under the structure in which `z_i` has length 1.
    #[serde(with = "rational")]
    pub null_value: Rational64,
    pub null_length: LengthBracket,
    #[serde(with = "rational")]
    pub other_value: Rational64,
    pub other_length: LengthBracket,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AntichainDirection {
    /// Parameter whose character vanishes on the witnesses.
    #[serde(with = "rational")]
    pub null_parameter: Rational64,
    #[serde(with = "rational")]
    pub other_parameter: Rational64,
    pub null_set: LinealGenSet,
    pub other_set: LinealGenSet,
    pub rows: Vec<AntichainRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AntichainCertificate {
    #[serde(with = "rational")]
    pub lambda: Rational64,
    #[serde(with = "rational")]
    pub mu: Rational64,
    #[serde(with = "rational")]
    pub c: Rational64,
    pub i_max: i64,
    /// Witnesses bounded for `λ`, unbounded for `μ`.
    pub lambda_null: AntichainDirection,
    /// Witnesses bounded for `μ`, unbounded for `λ`.
    pub mu_null: AntichainDirection,
}

fn antichain_direction(null: Rational64, other: Rational64, c: Rational64, i_max: i64) -> Result<AntichainDirection> {
    let pn = LinearCharacter::from_lambda(null)?;
    let po = LinearCharacter::from_lambda(other)?;
    let null_set = LinealGenSet::with_default_x(pn, c)?;
    let other_set = LinealGenSet::with_default_x(po, c)?;
    let dir = pn.null_direction();
    let rows = (1..=i_max)
        .map(|i| {
            let z = [dir[0] * i, dir[1] * i];
            AntichainRow {
                i,
                z,
                null_value: pn.value(z),
                null_length: lineal_length_bracket(&null_set, z),
                other_value: po.value(z),
                other_length: lineal_length_bracket(&other_set, z),
            }
        })
        .collect();
    Ok(AntichainDirection {
        null_parameter: null,
        other_parameter: other,
        null_set,
        other_set,
        rows,
    })
}

/// Witnesses that the lineal structures of `p_λ` and `p_μ` on `ℤ²` are
/// incomparable: `z_i` with `p_λ(z_i) = 0` have `X_{p_λ,C}`-length 1 while
/// their `X_{p_μ,C}`-length grows linearly in `i`, and symmetrically.
pub fn antichain_certificate(lambda: Rational64, mu: Rational64, c: Rational64, i_max: i64) -> Result<AntichainCertificate> {
    if lambda == mu {
        return Err(Error::InvalidParameter("λ and μ must differ".into()));
    }
    if c <= Rational64::from_integer(2) {
        return Err(Error::InvalidParameter("C must exceed 2".into()));
    }
    if i_max < 1 {
        return Err(Error::InvalidParameter("i_max must be positive".into()));
    }
    Ok(AntichainCertificate {
        lambda,
        mu,
        c,
        i_max,
        lambda_null: antichain_direction(lambda, mu, c, i_max)?,
        mu_null: antichain_direction(mu, lambda, c, i_max)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::random_bs;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    /// Fewest summands from `{v : |v| ≤ vmax}` (integers) totaling `t`.
    fn fewest_summands(t: i64, vmax: i64) -> u64 {
        let t = t.unsigned_abs() as usize;
        let mut best = vec![u64::MAX; t + 1];
        best[0] = 0;
        for s in 1..=t {
            for v in 1..=(vmax as usize).min(s) {
                best[s] = best[s].min(best[s - v].saturating_add(1));
            }
        }
        best[t]
    }

    #[test]
    fn defect_examples() {
        let mut rng = crate::rng::seeded(1);
        let pairs: Vec<(BsElement, BsElement)> = (0..200).map(|_| (random_bs(&mut rng, 12), random_bs(&mut rng, 12))).collect();
        assert_eq!(defect_estimate(&ExponentSum, &pairs).unwrap().observed, 0.0);

        let q = FnCharacter::new(|n: &i64| *n as f64 + (*n as f64).sin(), 3.0);
        let pairs: Vec<(i64, i64)> = (-20..20).flat_map(|a| (-20..20).map(move |b| (a, b))).collect();
        let d = defect_estimate(&q, &pairs).unwrap();
        assert!(d.observed > 0.0 && d.observed <= 3.0);
        assert!(d.within_declared);

        let p = LinearCharacter::from_lambda(r(3, 10)).unwrap();
        let pairs: Vec<([i64; 2], [i64; 2])> = (0..50).map(|k| ([k, -k], [3 - k, 2 * k])).collect();
        assert!(defect_estimate(&p, &pairs).unwrap().observed < 1e-12);
        assert!(pairs.iter().all(|(g, h)| p.value([g[0] + h[0], g[1] + h[1]]) == p.value(*g) + p.value(*h)));
    }

    #[test]
    fn homogenize_examples() {
        let b = BsElement::parse("b^-1 a b^3").unwrap();
        let h = homogenize(&ExponentSum, &b, 10).unwrap();
        assert_eq!((h.lower, h.upper), (2.0, 2.0));
        let q = FnCharacter::new(|n: &i64| *n as f64 + (*n as f64).sin(), 2.0);
        let h = homogenize(&q, &1i64, 1_000_000).unwrap();
        assert!(h.contains(1.0, 0.0) && h.width() <= 4e-6 + 1e-12);
        assert!(homogenize(&q, &1i64, 0).is_err());
    }

    #[test]
    fn busemann_examples() {
        let hp = ActionModel::BsHalfPlane;
        let ray = vertical_ray(40);
        let e = busemann_estimate(&hp, &GroupElement::Bs(BsElement::b()), &ray, 5).unwrap();
        assert!((e.limsup + LN_2).abs() < 1e-6);
        assert_eq!(e.closed_form, Some(-LN_2));
        let e = busemann_estimate(&hp, &GroupElement::Bs(BsElement::a()), &ray, 5).unwrap();
        assert!(e.limsup.abs() < 1e-6);
        let e = busemann_estimate(&hp, &GroupElement::Bs(BsElement::identity()), &ray, 5).unwrap();
        assert_eq!(e.limsup, 0.0);
        assert!(busemann_estimate(&ActionModel::BsTree, &GroupElement::Bs(BsElement::a()), &ray, 5).is_err());
    }

    #[test]
    fn busemann_matches_closed_form_on_random_elements() {
        let hp = ActionModel::BsHalfPlane;
        let ray = vertical_ray(40);
        let mut rng = crate::rng::seeded(2);
        for _ in 0..200 {
            let g = GroupElement::Bs(random_bs(&mut rng, 20));
            let e = busemann_estimate(&hp, &g, &ray, 4).unwrap();
            assert!((e.limsup - e.closed_form.unwrap()).abs() < 1e-6, "{g}");
        }
    }

    #[test]
    fn lineal_examples() {
        let p = LinearCharacter::new(r(1, 1), r(0, 1)).unwrap();
        let x = LinealGenSet::new(p, r(3, 1), [1, 0]).unwrap();
        assert_eq!(lineal_length_bracket(&x, [10, 0]).exact, Some(5));
        assert_eq!(lineal_length_bracket(&x, [0, 17]).exact, Some(1));
        assert_eq!(lineal_length_bracket(&x, [0, 0]).exact, Some(0));
        assert!(LinealGenSet::new(p, r(3, 1), [2, 0]).is_err());
        assert!(LinealGenSet::new(p, r(3, 1), [-1, 0]).is_err());
        assert!(LinearCharacter::new(r(0, 1), r(0, 1)).is_err());
        let auto = LinealGenSet::with_default_x(LinearCharacter::from_lambda(r(3, 10)).unwrap(), r(3, 1)).unwrap();
        assert_eq!(auto.p.value(auto.x), r(14, 10));
    }

    #[test]
    fn exact_lengths_match_summand_search() {
        for lambda in [r(0, 1), r(3, 10), r(1, 2), r(7, 10), r(1, 1)] {
            let p = LinearCharacter::from_lambda(lambda).unwrap();
            for c in [r(3, 1), r(5, 2), r(7, 1)] {
                let x = LinealGenSet::with_default_x(p, c).unwrap();
                let step = p.image_step();
                let vmax = (x.max_value() / step).to_integer();
                for m in -60..=60 {
                    for n in [-3, 0, 5] {
                        let g = [m, n];
                        let pg = p.value(g);
                        if pg.abs() > Rational64::from_integer(50) {
                            continue;
                        }
                        let b = lineal_length_bracket(&x, g);
                        let exact = b.exact.unwrap();
                        assert!(b.lower <= exact && exact <= b.upper, "{g:?} {b:?}");
                        if g != [0, 0] && !pg.is_zero() {
                            assert_eq!(exact, fewest_summands((pg / step).to_integer(), vmax), "{g:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn antichain_examples() {
        let cert = antichain_certificate(r(3, 10), r(7, 10), r(3, 1), 100).unwrap();
        let row = &cert.lambda_null.rows[99];
        assert_eq!(row.z, [700, -300]);
        assert_eq!(row.null_value, r(0, 1));
        assert_eq!(row.null_length.exact, Some(1));
        assert_eq!(row.other_value, r(400, 1));
        assert!(row.other_length.lower >= 93);
        let back = &cert.mu_null.rows[0];
        assert_eq!(back.z, [3, -7]);
        assert_eq!(back.other_value, r(-4, 1));
        assert!(antichain_certificate(r(1, 2), r(1, 2), r(3, 1), 10).is_err());
        assert!(antichain_certificate(r(1, 2), r(1, 3), r(2, 1), 10).is_err());
    }

    proptest! {
        #[test]
        fn antichain_is_symmetric(a in 0i64..=10, b in 0i64..=10, i_max in 1i64..20) {
            prop_assume!(a != b);
            let (l, m) = (r(a, 10), r(b, 10));
            let one = antichain_certificate(l, m, r(3, 1), i_max).unwrap();
            let two = antichain_certificate(m, l, r(3, 1), i_max).unwrap();
            prop_assert_eq!(&one.lambda_null, &two.mu_null);
            prop_assert_eq!(&one.mu_null, &two.lambda_null);
            for row in &one.lambda_null.rows {
                prop_assert_eq!(row.null_length.exact, Some(1));
            }
        }

        #[test]
        fn homogenized_brackets_shrink(n in 1u64..2000) {
            let q = FnCharacter::new(|k: &i64| 0.5 * *k as f64 + (*k as f64).cos(), 2.0);
            let small = homogenize(&q, &3i64, n).unwrap();
            let big = homogenize(&q, &3i64, 2 * n).unwrap();
            prop_assert!(big.width() <= small.width() / 2.0 + 1e-12);
            prop_assert!(small.contains(1.5, 1e-12) && big.contains(1.5, 1e-12));
        }
    }
}
