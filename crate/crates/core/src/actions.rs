//! Concrete isometric actions with exact displacements.
//!
//! Models: `BS(1,2)` and `ℤ wr ℤ` (through `φ_ξ`) on the upper half-plane,
//! `BS(1,2)` and `ℤ_n wr ℤ` on their Bass–Serre trees, and Cayley graphs
//! of `ℤᵈ` and `ℤ_n`. The basepoint is `i`, the base vertex, or the
//! identity respectively. Distances between orbit points reduce to
//! displacements: `d(gs, hs) = d(s, g⁻¹h s)`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{BsElement, GroupOps, Mat2, WreathElement};
use crate::par::Exec;
use crate::real::{ser_f64, ser_opt_f64};

/// `d(z, w)` in the upper half-plane, `arccosh(1 + |z−w|²/(2·Im z·Im w))`
/// evaluated as `log1p(x + √(x(x+2)))`.
pub fn half_plane_distance(z: (f64, f64), w: (f64, f64)) -> f64 {
    let num = (z.0 - w.0).powi(2) + (z.1 - w.1).powi(2);
    let x = num / (2.0 * z.1 * w.1);
    acosh1p(x)
}

/// `arccosh(1 + x)` for `x ≥ 0`.
pub fn acosh1p(x: f64) -> f64 {
    if x > 1e150 {
        std::f64::consts::LN_2 + x.ln()
    } else {
        (x + (x * (x + 2.0)).sqrt()).ln_1p()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupElement {
    Bs(BsElement),
    Wreath(WreathElement),
    Lattice(Vec<i64>),
    Cyclic(i64),
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Bs(g) => write!(f, "{g}"),
            GroupElement::Wreath(g) => write!(f, "{g}"),
            GroupElement::Lattice(v) => {
                let parts: Vec<String> = v.iter().map(i64::to_string).collect();
                write!(f, "({})", parts.join(","))
            }
            GroupElement::Cyclic(k) => write!(f, "{k}"),
        }
    }
}

impl Serialize for GroupElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl GroupOps for GroupElement {
    fn identity_like(&self) -> Self {
        match self {
            GroupElement::Bs(_) => GroupElement::Bs(BsElement::identity()),
            GroupElement::Wreath(g) => GroupElement::Wreath(g.identity_like()),
            GroupElement::Lattice(v) => GroupElement::Lattice(vec![0; v.len()]),
            GroupElement::Cyclic(_) => GroupElement::Cyclic(0),
        }
    }

    fn op(&self, other: &Self) -> Result<Self> {
        Ok(match (self, other) {
            (GroupElement::Bs(g), GroupElement::Bs(h)) => GroupElement::Bs(g.op(h)?),
            (GroupElement::Wreath(g), GroupElement::Wreath(h)) => GroupElement::Wreath(g.op(h)?),
            (GroupElement::Lattice(u), GroupElement::Lattice(v)) if u.len() == v.len() => {
                GroupElement::Lattice(u.iter().zip(v).map(|(a, b)| a + b).collect())
            }
            (GroupElement::Cyclic(a), GroupElement::Cyclic(b)) => GroupElement::Cyclic(a.op(b)?),
            _ => {
                return Err(Error::IncompatibleElement(format!(
                    "cannot multiply {self} and {other}"
                )))
            }
        })
    }

    fn inv(&self) -> Self {
        match self {
            GroupElement::Bs(g) => GroupElement::Bs(g.inv()),
            GroupElement::Wreath(g) => GroupElement::Wreath(g.inv()),
            GroupElement::Lattice(v) => GroupElement::Lattice(v.iter().map(|x| -x).collect()),
            GroupElement::Cyclic(k) => GroupElement::Cyclic(-k),
        }
    }
}

pub const DEFAULT_CAYLEY_BUDGET: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "group", rename_all = "kebab-case")]
pub enum CayleyGroup {
    Lattice { dim: usize },
    Cyclic { order: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum ActionModel {
    /// `BS(1,2)` on the upper half-plane: `a ↦ z + 1`, `b ↦ 2z`.
    BsHalfPlane,
    /// `ℤ wr ℤ` on the upper half-plane through `φ_ξ`.
    PhiXi {
        #[serde(serialize_with = "ser_f64")]
        xi: f64,
    },
    /// `BS(1,2)` on its Bass–Serre tree.
    BsTree,
    /// `ℤ wr ℤ` (or any `ℤ_m wr ℤ` with `n | m`) on the tree `T_n` of
    /// `ℤ_n wr ℤ`.
    WreathTree { n: u64 },
    /// Cayley graph with respect to `generators` and their inverses.
    Cayley {
        group: CayleyGroup,
        generators: Vec<Vec<i64>>,
        budget: u64,
    },
}

impl ActionModel {
    pub fn cayley_lattice(generators: Vec<Vec<i64>>) -> Result<Self> {
        let dim = generators.first().map_or(0, Vec::len);
        if dim == 0 || generators.iter().any(|g| g.len() != dim) {
            return Err(Error::InvalidParameter("lattice generators need a common positive dimension".into()));
        }
        Ok(ActionModel::Cayley {
            group: CayleyGroup::Lattice { dim },
            generators,
            budget: DEFAULT_CAYLEY_BUDGET,
        })
    }

    pub fn cayley_cyclic(order: u64, generators: Vec<i64>) -> Result<Self> {
        if order == 0 || generators.is_empty() {
            return Err(Error::InvalidParameter("cyclic model needs a positive order and generators".into()));
        }
        Ok(ActionModel::Cayley {
            group: CayleyGroup::Cyclic { order },
            generators: generators.into_iter().map(|g| vec![g]).collect(),
            budget: DEFAULT_CAYLEY_BUDGET,
        })
    }

    pub fn wreath_tree(n: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("tree modulus must be at least 2, got {n}")));
        }
        Ok(ActionModel::WreathTree { n })
    }

    /// Short name used on the command line.
    pub fn name(&self) -> String {
        match self {
            ActionModel::BsHalfPlane => "bs-h2".into(),
            ActionModel::PhiXi { xi } => format!("phi-xi:{xi}"),
            ActionModel::BsTree => "bs-tree".into(),
            ActionModel::WreathTree { n } => format!("wreath-tree:{n}"),
            ActionModel::Cayley { .. } => "cayley".into(),
        }
    }

    pub fn is_tree(&self) -> bool {
        matches!(self, ActionModel::BsTree | ActionModel::WreathTree { .. })
    }

    pub fn identity(&self) -> GroupElement {
        match self {
            ActionModel::BsHalfPlane | ActionModel::BsTree => GroupElement::Bs(BsElement::identity()),
            ActionModel::PhiXi { .. } => GroupElement::Wreath(WreathElement::identity(None)),
            ActionModel::WreathTree { n } => GroupElement::Wreath(WreathElement::identity(Some(*n))),
            ActionModel::Cayley { group: CayleyGroup::Lattice { dim }, .. } => GroupElement::Lattice(vec![0; *dim]),
            ActionModel::Cayley { group: CayleyGroup::Cyclic { .. }, .. } => GroupElement::Cyclic(0),
        }
    }

    /// A finite generating set (without inverses).
    pub fn generators(&self) -> Vec<GroupElement> {
        match self {
            ActionModel::BsHalfPlane | ActionModel::BsTree => {
                vec![GroupElement::Bs(BsElement::a()), GroupElement::Bs(BsElement::b())]
            }
            ActionModel::PhiXi { .. } => vec![
                GroupElement::Wreath(WreathElement::lamp(None, 0, 1)),
                GroupElement::Wreath(WreathElement::shift(None, 1)),
            ],
            ActionModel::WreathTree { n } => vec![
                GroupElement::Wreath(WreathElement::lamp(Some(*n), 0, 1)),
                GroupElement::Wreath(WreathElement::shift(Some(*n), 1)),
            ],
            ActionModel::Cayley { group, generators, .. } => generators
                .iter()
                .map(|g| match group {
                    CayleyGroup::Lattice { .. } => GroupElement::Lattice(g.clone()),
                    CayleyGroup::Cyclic { .. } => GroupElement::Cyclic(g[0]),
                })
                .collect(),
        }
    }

    /// Parses an element literal appropriate for the model.
    pub fn parse_element(&self, text: &str) -> Result<GroupElement> {
        match self {
            ActionModel::BsHalfPlane | ActionModel::BsTree => Ok(GroupElement::Bs(BsElement::parse(text)?)),
            ActionModel::PhiXi { .. } => Ok(GroupElement::Wreath(WreathElement::parse(text, None)?)),
            ActionModel::WreathTree { n } => Ok(GroupElement::Wreath(WreathElement::parse(text, Some(*n))?)),
            ActionModel::Cayley { group, .. } => {
                let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
                let coords: Vec<i64> = inner
                    .split(',')
                    .map(|s| s.trim().parse::<i64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::MalformedInput(format!("bad lattice element {text:?}")))?;
                match group {
                    CayleyGroup::Lattice { dim } if coords.len() == *dim => Ok(GroupElement::Lattice(coords)),
                    CayleyGroup::Cyclic { .. } if coords.len() == 1 => Ok(GroupElement::Cyclic(coords[0])),
                    _ => Err(Error::MalformedInput(format!("element {text:?} has the wrong dimension"))),
                }
            }
        }
    }

    /// Matrix of `g` for the half-plane models.
    pub fn matrix(&self, g: &GroupElement) -> Result<Mat2> {
        match (self, g) {
            (ActionModel::BsHalfPlane, GroupElement::Bs(b)) => Ok(b.matrix()),
            (ActionModel::PhiXi { xi }, GroupElement::Wreath(w)) => w.phi_xi(*xi),
            (ActionModel::BsHalfPlane | ActionModel::PhiXi { .. }, _) => Err(self.incompatible(g)),
            _ => Err(Error::Unsupported(format!("{} is not a half-plane model", self.name()))),
        }
    }

    /// Image of the basepoint `i` for the half-plane models.
    pub fn orbit_point(&self, g: &GroupElement) -> Result<(f64, f64)> {
        match (self, g) {
            (ActionModel::BsHalfPlane, GroupElement::Bs(b)) => Ok(b.image_of_i()),
            _ => Ok(self.matrix(g)?.apply((0.0, 1.0))),
        }
    }

    fn incompatible(&self, g: &GroupElement) -> Error {
        Error::IncompatibleElement(format!("{g} is not an element of the {} group", self.name()))
    }

    fn tree_element(&self, g: &GroupElement) -> Result<WreathElement> {
        let (ActionModel::WreathTree { n }, GroupElement::Wreath(w)) = (self, g) else {
            return Err(self.incompatible(g));
        };
        match w.modulus() {
            Some(m) if m % n != 0 => Err(self.incompatible(g)),
            _ => w.reduce_mod(*n),
        }
    }

    /// `d(s, gs)`.
    pub fn displacement(&self, g: &GroupElement) -> Result<f64> {
        match self {
            ActionModel::BsHalfPlane | ActionModel::PhiXi { .. } => {
                Ok(half_plane_distance((0.0, 1.0), self.orbit_point(g)?))
            }
            ActionModel::BsTree => match g {
                GroupElement::Bs(b) => Ok(b.tree_length() as f64),
                _ => Err(self.incompatible(g)),
            },
            ActionModel::WreathTree { .. } => Ok(self.tree_element(g)?.tree_length() as f64),
            ActionModel::Cayley { .. } => Ok(self.cayley_distance(g)? as f64),
        }
    }

    /// `d(gs, hs)`.
    pub fn distance(&self, g: &GroupElement, h: &GroupElement) -> Result<f64> {
        match self {
            ActionModel::BsHalfPlane | ActionModel::PhiXi { .. } => {
                Ok(half_plane_distance(self.orbit_point(g)?, self.orbit_point(h)?))
            }
            _ => self.displacement(&g.inv().op(h)?),
        }
    }

    fn cayley_distance(&self, g: &GroupElement) -> Result<u64> {
        let ActionModel::Cayley { group, generators, budget } = self else {
            unreachable!("only called on Cayley models")
        };
        let mut steps: Vec<Vec<i64>> = generators.clone();
        steps.extend(generators.iter().map(|s| s.iter().map(|x| -x).collect()));
        let (target, modulus) = match (group, g) {
            (CayleyGroup::Lattice { dim }, GroupElement::Lattice(v)) if v.len() == *dim => (v.clone(), None),
            (CayleyGroup::Cyclic { order }, GroupElement::Cyclic(k)) => {
                (vec![k.rem_euclid(*order as i64)], Some(*order as i64))
            }
            _ => return Err(self.incompatible(g)),
        };
        let start = vec![0; target.len()];
        let mut seen: HashMap<Vec<i64>, u64> = HashMap::from([(start.clone(), 0)]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let d = seen[&v];
            if v == target {
                return Ok(d);
            }
            for s in &steps {
                let mut w: Vec<i64> = v.iter().zip(s).map(|(a, b)| a + b).collect();
                if let Some(n) = modulus {
                    w[0] = w[0].rem_euclid(n);
                }
                if !seen.contains_key(&w) {
                    if seen.len() as u64 >= *budget {
                        return Err(Error::budget("Cayley ball search", *budget));
                    }
                    seen.insert(w.clone(), d + 1);
                    queue.push_back(w);
                }
            }
        }
        Err(Error::NotFound(format!("{g} is not reachable from the generators")))
    }

    /// A geodesic from the base vertex to `g·base` in the tree models,
    /// given by elements `h_0 = 1, …, h_n = g` with `h_i·base` the vertices
    /// along the path.
    pub fn geodesic_path(&self, g: &GroupElement) -> Result<Vec<GroupElement>> {
        match (self, g) {
            (ActionModel::BsTree, GroupElement::Bs(x)) => {
                let core = BsElement::a_pow(x.m().clone());
                Ok(hnn_path(
                    GroupElement::Bs(BsElement::identity()),
                    GroupElement::Bs(BsElement::b()),
                    GroupElement::Bs(core),
                    x.p(),
                    x.q(),
                ))
            }
            (ActionModel::WreathTree { n }, GroupElement::Wreath(_)) => {
                let w = self.tree_element(g)?;
                // g = t⁻ᵖ β t^q with β supported on i ≥ 0
                let lo = w.support().first().map_or(0, |&(i, _)| i);
                let p = 0.max(-lo).max(-w.k());
                let q = p + w.k();
                let beta = WreathElement::new(Some(*n), w.support().iter().map(|&(i, v)| (i + p, v)), 0)?;
                Ok(hnn_path(
                    GroupElement::Wreath(WreathElement::identity(Some(*n))),
                    GroupElement::Wreath(WreathElement::shift(Some(*n), 1)),
                    GroupElement::Wreath(beta),
                    p as u64,
                    q as u64,
                ))
            }
            _ if self.is_tree() => Err(self.incompatible(g)),
            _ => Err(Error::Unsupported(format!(
                "{} has no geodesic tracing",
                self.name()
            ))),
        }
    }
}

/// Prefixes of `t⁻ᵖ β t^q`: `t⁻¹, …, t⁻ᵖ, t⁻ᵖβt, …, t⁻ᵖβt^q`, or ending in
/// `t⁻ᵖβ` when `q = 0`.
fn hnn_path(id: GroupElement, t: GroupElement, beta: GroupElement, p: u64, q: u64) -> Vec<GroupElement> {
    let mut path = vec![id.clone()];
    let mut cur = id.clone();
    let t_inv = t.inv();
    for _ in 0..p {
        cur = cur.op(&t_inv).expect("same group");
        path.push(cur.clone());
    }
    cur = cur.op(&beta).expect("same group");
    if q == 0 {
        if beta != id {
            // β fixes the current vertex; keep it as a final zero-length step
            path.push(cur);
        }
        return path;
    }
    for _ in 0..q {
        cur = cur.op(&t).expect("same group");
        path.push(cur.clone());
    }
    path
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TauMethod {
    ExactClosedForm,
    FeketeBracket,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeketeBracket {
    #[serde(serialize_with = "ser_f64")]
    pub lower: f64,
    #[serde(serialize_with = "ser_f64")]
    pub upper: f64,
    pub n_max: u32,
    /// Additive constant `K` in `d(s, gⁿs) ≤ nτ + K`; absent when the lower
    /// bound is the trivial 0.
    #[serde(serialize_with = "ser_opt_f64")]
    pub k: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TranslationReport {
    pub element: GroupElement,
    #[serde(serialize_with = "ser_f64")]
    pub lower: f64,
    #[serde(serialize_with = "ser_f64")]
    pub upper: f64,
    pub method: TauMethod,
    pub fekete: FeketeBracket,
}

impl TranslationReport {
    pub fn exact(&self) -> Option<f64> {
        (self.method == TauMethod::ExactClosedForm).then_some(self.lower)
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        self.lower - tol <= x && x <= self.upper + tol
    }
}

/// Distance from `z` to the axis of a hyperbolic Möbius map.
fn distance_to_axis(m: &Mat2, z: (f64, f64)) -> f64 {
    let [[a, b], [c, d]] = m.0;
    let (x, y) = z;
    if c.abs() < 1e-300 {
        // axis is the vertical line over the finite fixed point b/(d − a)
        let c0 = b / (d - a);
        ((x - c0).abs() / y).asinh()
    } else {
        let disc = ((d - a).powi(2) + 4.0 * b * c).sqrt();
        let r1 = (a - d + disc) / (2.0 * c);
        let r2 = (a - d - disc) / (2.0 * c);
        let centre = (r1 + r2) / 2.0;
        let radius = (r1 - r2).abs() / 2.0;
        (((x - centre).powi(2) + y * y - radius * radius).abs() / (2.0 * radius * y)).asinh()
    }
}

pub const TAU_TOLERANCE: f64 = 1e-9;

/// `τ(g) = lim d(s, gⁿs)/n`, exact where a closed form exists, with the
/// Fekete bracket from `n ≤ n_max` always attached.
pub fn translation_number(model: &ActionModel, g: &GroupElement, n_max: u32) -> Result<TranslationReport> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let mut upper = f64::INFINITY;
    let mut powers = Vec::with_capacity(n_max as usize);
    let mut cur = g.clone();
    for n in 1..=n_max {
        if n > 1 {
            cur = cur.op(g)?;
        }
        let d = model.displacement(&cur)?;
        upper = upper.min(d / n as f64);
        powers.push(d);
    }
    let d1 = powers[0];
    let (exact, k) = match model {
        ActionModel::BsHalfPlane | ActionModel::PhiXi { .. } => {
            let m = model.matrix(g)?;
            let tr = m.trace().abs();
            if tr > 2.0 + 1e-15 {
                let tau = 2.0 * (tr / 2.0).acosh();
                (Some(tau), Some(2.0 * distance_to_axis(&m, (0.0, 1.0))))
            } else {
                (Some(0.0), None)
            }
        }
        ActionModel::BsTree | ActionModel::WreathTree { .. } => {
            let d2 = model.displacement(&g.op(g)?)?;
            (Some((d2 - d1).max(0.0)), Some(d1))
        }
        ActionModel::Cayley { group: CayleyGroup::Cyclic { .. }, .. } => (Some(0.0), None),
        ActionModel::Cayley { group: CayleyGroup::Lattice { .. }, .. } => (None, None),
    };
    let lower = match (model, k) {
        (ActionModel::Cayley { generators, .. }, _) => lattice_tau_lower(generators, g),
        (_, Some(k)) => powers
            .iter()
            .enumerate()
            .map(|(i, d)| (d - k) / (i + 1) as f64)
            .fold(0.0, f64::max),
        (_, None) => 0.0,
    };
    let fekete = FeketeBracket { lower, upper, n_max, k };
    Ok(match exact {
        Some(tau) => TranslationReport {
            element: g.clone(),
            lower: tau,
            upper: tau,
            method: TauMethod::ExactClosedForm,
            fekete,
        },
        None => TranslationReport {
            element: g.clone(),
            lower,
            upper,
            method: TauMethod::FeketeBracket,
            fekete,
        },
    })
}

/// Coordinate functionals `v ↦ v_j / max_s |s_j|` are 1-Lipschitz for the
/// word metric, so each bounds `τ` from below.
fn lattice_tau_lower(generators: &[Vec<i64>], g: &GroupElement) -> f64 {
    let GroupElement::Lattice(v) = g else { return 0.0 };
    (0..v.len())
        .filter_map(|j| {
            let scale = generators.iter().map(|s| s[j].abs()).max()?;
            (scale > 0).then(|| v[j].abs() as f64 / scale as f64)
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionType {
    Elliptic,
    Parabolic,
    Lineal,
    QuasiParabolic,
    GeneralType,
    Undetermined,
}

/// Comparison of the ends of two loxodromic elements `f, g`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EndComparison {
    pub f: GroupElement,
    pub g: GroupElement,
    /// `[f⁺ vs g⁺, f⁺ vs g⁻, f⁻ vs g⁺, f⁻ vs g⁻]`.
    pub shared: [bool; 4],
    /// Gap between `f^{±N}s` and the `g^{±}`-ray at `N` and `2N`.
    #[serde(serialize_with = "crate::real::ser_vec_f64")]
    pub gaps: Vec<f64>,
}

impl EndComparison {
    pub fn shared_count(&self) -> usize {
        let [pp, pm, mp, mm] = self.shared;
        // two distinct ends can be matched at most twice
        usize::from(pp || pm) + usize::from(mp || mm)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActionTypeEvidence {
    pub claimed: ActionType,
    pub sampled_elements: usize,
    /// Largest displacement among sampled elements of word length `≤ ℓ`.
    #[serde(serialize_with = "crate::real::ser_vec_f64")]
    pub orbit_radius_by_length: Vec<f64>,
    pub loxodromics: Vec<TranslationReport>,
    pub end_comparisons: Vec<EndComparison>,
    pub tail_n: u32,
}

const MAX_LOXODROMICS: usize = 6;

/// Evidence-based type of the action, following the case split for
/// isometric actions on hyperbolic spaces. Elements are sampled from the
/// ball of radius 4 in the model's generators, at most `witness_budget` of
/// them.
pub fn classify_action(model: &ActionModel, witness_budget: usize) -> Result<ActionTypeEvidence> {
    const RADIUS: usize = 4;
    const TAIL_N: u32 = 8;
    let mut gens = model.generators();
    gens.extend(gens.clone().iter().map(GroupOps::inv));
    let mut layers: Vec<Vec<GroupElement>> = vec![vec![model.identity()]];
    let mut seen: std::collections::HashSet<GroupElement> = layers[0].iter().cloned().collect();
    let mut count = 1;
    'grow: for _ in 0..RADIUS {
        let mut next = Vec::new();
        for g in layers.last().expect("non-empty") {
            for s in &gens {
                if count >= witness_budget.max(1) {
                    layers.push(next);
                    break 'grow;
                }
                let h = g.op(s)?;
                if seen.insert(h.clone()) {
                    next.push(h);
                    count += 1;
                }
            }
        }
        layers.push(next);
    }

    let mut radius = Vec::new();
    let mut best: f64 = 0.0;
    let mut loxodromics = Vec::new();
    for layer in layers.iter().skip(1) {
        for g in layer {
            best = best.max(model.displacement(g)?);
            if loxodromics.len() < MAX_LOXODROMICS {
                let t = translation_number(model, g, 4)?;
                if t.lower > TAU_TOLERANCE {
                    loxodromics.push(t);
                }
            }
        }
        radius.push(best);
    }

    let mut comparisons = Vec::new();
    for i in 0..loxodromics.len() {
        for j in i + 1..loxodromics.len() {
            comparisons.push(compare_ends(model, &loxodromics[i], &loxodromics[j], TAIL_N)?);
        }
    }

    let growing = radius.windows(2).last().is_some_and(|w| w[1] > w[0] + 1e-9);
    let claimed = if loxodromics.is_empty() {
        if growing {
            ActionType::Parabolic
        } else {
            ActionType::Elliptic
        }
    } else if comparisons.iter().all(|c| c.shared_count() == 2) {
        ActionType::Lineal
    } else if comparisons.iter().all(|c| c.shared_count() >= 1) {
        ActionType::QuasiParabolic
    } else if comparisons.iter().any(|c| c.shared_count() == 0) {
        ActionType::GeneralType
    } else {
        ActionType::Undetermined
    };
    Ok(ActionTypeEvidence {
        claimed,
        sampled_elements: count,
        orbit_radius_by_length: radius,
        loxodromics,
        end_comparisons: comparisons,
        tail_n: TAIL_N,
    })
}

/// `f^{εN}s` and `g^{δn}s` with `n ≥ 0` approach the same end when the gap
/// from `f^{εN}s` to the `g`-ray grows by less than `Nτ(f)/2` between `N`
/// and `2N`; for distinct ends it grows by about `Nτ(f)`.
fn compare_ends(model: &ActionModel, f: &TranslationReport, g: &TranslationReport, n: u32) -> Result<EndComparison> {
    let ray_len = ((2 * n) as f64 * f.upper / g.lower).ceil() as i64 + 2;
    let mut shared = [false; 4];
    let mut gaps = Vec::new();
    let mut slot = 0;
    for fe in [1i64, -1] {
        for ge in [1i64, -1] {
            let ray: Vec<GroupElement> = (0..=ray_len)
                .map(|k| g.element.pow(ge * k))
                .collect::<Result<_>>()?;
            let gap = |m: u32| -> Result<f64> {
                let x = f.element.pow(fe * m as i64)?;
                ray.iter()
                    .map(|y| model.distance(&x, y))
                    .try_fold(f64::INFINITY, |acc, d| d.map(|d| acc.min(d)))
            };
            let (g1, g2) = (gap(n)?, gap(2 * n)?);
            shared[slot] = g2 - g1 < n as f64 * f.lower / 2.0;
            gaps.extend([g1, g2]);
            slot += 1;
        }
    }
    Ok(EndComparison {
        f: f.element.clone(),
        g: g.element.clone(),
        shared,
        gaps,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeRow {
    pub element: GroupElement,
    /// Displacement in the dominating action `A`.
    #[serde(serialize_with = "ser_f64")]
    pub a: f64,
    /// Displacement in the dominated action `B`.
    #[serde(serialize_with = "ser_f64")]
    pub b: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum DominationStatus {
    /// `d_B ≤ factor·d_A + offset` on all probes; `constant` is the least
    /// single `C` with `d_B ≤ C·d_A + C`.
    HoldsOnProbes {
        #[serde(serialize_with = "ser_f64")]
        factor: f64,
        #[serde(serialize_with = "ser_f64")]
        offset: f64,
        #[serde(serialize_with = "ser_f64")]
        constant: f64,
    },
    /// Probes whose `B`-displacement exceeds `envelope` while their
    /// `A`-displacements stay at most `a_bound`, ordered by `B`.
    Refuted {
        #[serde(serialize_with = "ser_f64")]
        a_bound: f64,
        #[serde(serialize_with = "ser_f64")]
        envelope: f64,
        witnesses: Vec<ProbeRow>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DominationVerdict {
    /// Names of `(A, B)` in `d_B(s, gs) ≤ C·d_A(r, gr) + C`.
    pub dominating: String,
    pub dominated: String,
    #[serde(serialize_with = "ser_f64")]
    pub envelope_factor: f64,
    pub status: DominationStatus,
    pub probes: Vec<ProbeRow>,
}

impl DominationVerdict {
    pub fn refuted(&self) -> bool {
        matches!(self.status, DominationStatus::Refuted { .. })
    }
}

pub const DEFAULT_ENVELOPE_FACTOR: f64 = 10.0;
pub const MIN_REFUTATION_WITNESSES: usize = 3;

/// Tests `d_B(s, gs) ≤ C·d_A(r, gr) + C` on the probes.
pub fn dominates(a: &ActionModel, b: &ActionModel, probes: &[GroupElement]) -> Result<DominationVerdict> {
    dominates_with(a, b, probes, DEFAULT_ENVELOPE_FACTOR, Exec::default())
}

/// As [`dominates`]. The inequality is refuted when, for some threshold
/// `t`, at least three probes have `d_A ≤ t` and
/// `d_B > envelope_factor·(1 + t)`.
pub fn dominates_with(
    a: &ActionModel,
    b: &ActionModel,
    probes: &[GroupElement],
    envelope_factor: f64,
    exec: Exec,
) -> Result<DominationVerdict> {
    if probes.is_empty() {
        return Err(Error::InvalidParameter("probe list is empty".into()));
    }
    let rows: Vec<ProbeRow> = exec
        .map(probes, |g| -> Result<ProbeRow> {
            Ok(ProbeRow {
                element: g.clone(),
                a: a.displacement(g)?,
                b: b.displacement(g)?,
            })
        })
        .into_iter()
        .collect::<Result<_>>()?;

    let mut thresholds: Vec<f64> = rows.iter().map(|r| r.a).collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    let mut refutation: Option<(f64, f64, Vec<ProbeRow>)> = None;
    for t in thresholds {
        let envelope = envelope_factor * (1.0 + t);
        let mut w: Vec<ProbeRow> = rows.iter().filter(|r| r.a <= t && r.b > envelope).cloned().collect();
        if w.len() >= MIN_REFUTATION_WITNESSES && refutation.as_ref().is_none_or(|(_, _, best)| w.len() > best.len()) {
            w.sort_by(|x, y| x.b.total_cmp(&y.b));
            refutation = Some((t, envelope, w));
        }
    }

    let status = match refutation {
        Some((a_bound, envelope, witnesses)) => DominationStatus::Refuted {
            a_bound,
            envelope,
            witnesses,
        },
        None => {
            let factor = rows
                .iter()
                .filter(|r| r.a > 0.0)
                .map(|r| r.b / r.a)
                .fold(0.0, f64::max);
            let offset = rows.iter().map(|r| r.b - factor * r.a).fold(0.0, f64::max);
            let constant = rows.iter().map(|r| r.b / (1.0 + r.a)).fold(0.0, f64::max);
            DominationStatus::HoldsOnProbes {
                factor,
                offset,
                constant,
            }
        }
    };
    Ok(DominationVerdict {
        dominating: a.name(),
        dominated: b.name(),
        envelope_factor,
        status,
        probes: rows,
    })
}

/// A finite truncation of an element sequence expected to be read for
/// divergence of translation numbers.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedSequence {
    pub name: String,
    pub elements: Vec<GroupElement>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SequenceReading {
    pub name: String,
    #[serde(serialize_with = "crate::real::ser_vec_f64")]
    pub tau_a: Vec<f64>,
    #[serde(serialize_with = "crate::real::ser_vec_f64")]
    pub tau_b: Vec<f64>,
    pub diverges_a: bool,
    pub diverges_b: bool,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LnTwoLaw {
    /// Largest `|τ_half-plane − ln 2·τ_tree|` over all sequence elements.
    #[serde(serialize_with = "ser_f64")]
    pub max_error: f64,
    #[serde(serialize_with = "ser_f64")]
    pub tolerance: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IsospectralReport {
    pub a: String,
    pub b: String,
    /// A sequence reads as divergent when the lower `τ` bracket at its last
    /// element exceeds `growth_factor·(1 + upper bracket at its first)`.
    #[serde(serialize_with = "ser_f64")]
    pub growth_factor: f64,
    pub sequences: Vec<SequenceReading>,
    pub isospectral: bool,
    pub ln_two_law: Option<LnTwoLaw>,
}

pub const DEFAULT_GROWTH_FACTOR: f64 = 4.0;
const ISOSPEC_N_MAX: u32 = 8;

pub fn coarsely_isospectral(a: &ActionModel, b: &ActionModel, sequences: &[NamedSequence]) -> Result<IsospectralReport> {
    let bs_pair = match (a, b) {
        (ActionModel::BsHalfPlane, ActionModel::BsTree) => Some(false),
        (ActionModel::BsTree, ActionModel::BsHalfPlane) => Some(true),
        _ => None,
    };
    let mut readings = Vec::new();
    let mut max_error: f64 = 0.0;
    for seq in sequences {
        if seq.elements.is_empty() {
            return Err(Error::InvalidParameter(format!("sequence {:?} is empty", seq.name)));
        }
        let ra: Vec<TranslationReport> = seq
            .elements
            .iter()
            .map(|g| translation_number(a, g, ISOSPEC_N_MAX))
            .collect::<Result<_>>()?;
        let rb: Vec<TranslationReport> = seq
            .elements
            .iter()
            .map(|g| translation_number(b, g, ISOSPEC_N_MAX))
            .collect::<Result<_>>()?;
        let diverges = |r: &[TranslationReport]| {
            let (first, last) = (&r[0], &r[r.len() - 1]);
            last.lower > DEFAULT_GROWTH_FACTOR * (1.0 + first.upper)
        };
        if let Some(swapped) = bs_pair {
            for (x, y) in ra.iter().zip(&rb) {
                let (hp, tree) = if swapped { (y, x) } else { (x, y) };
                max_error = max_error.max((hp.lower - std::f64::consts::LN_2 * tree.lower).abs());
            }
        }
        let (da, db) = (diverges(&ra), diverges(&rb));
        readings.push(SequenceReading {
            name: seq.name.clone(),
            tau_a: ra.iter().map(|r| r.lower).collect(),
            tau_b: rb.iter().map(|r| r.lower).collect(),
            diverges_a: da,
            diverges_b: db,
            agree: da == db,
        });
    }
    Ok(IsospectralReport {
        a: a.name(),
        b: b.name(),
        growth_factor: DEFAULT_GROWTH_FACTOR,
        isospectral: readings.iter().all(|r| r.agree),
        sequences: readings,
        ln_two_law: bs_pair.map(|_| LnTwoLaw {
            max_error,
            tolerance: 1e-9,
            holds: max_error <= 1e-9,
        }),
    })
}

/// Breadth-first enumeration of the Bass–Serre tree from cosets of the
/// vertex group: vertex `gB` is adjacent to `g a^c t^{±1} B`. Returns one
/// representative per vertex with its distance from `B`, for all vertices
/// within `radius`.
pub fn coset_ball(model: &ActionModel, radius: usize) -> Result<Vec<(GroupElement, usize)>> {
    let (t, a, span) = match model {
        ActionModel::BsTree => (GroupElement::Bs(BsElement::b()), GroupElement::Bs(BsElement::a()), 2),
        ActionModel::WreathTree { n } => (
            GroupElement::Wreath(WreathElement::shift(Some(*n), 1)),
            GroupElement::Wreath(WreathElement::lamp(Some(*n), 0, 1)),
            *n as i64,
        ),
        _ => return Err(Error::Unsupported(format!("{} is not a tree model", model.name()))),
    };
    // g⁻¹h lies in the vertex group
    let same_vertex = |g: &GroupElement, h: &GroupElement| -> bool {
        match g.inv().op(h) {
            Ok(GroupElement::Bs(x)) => x.p() == 0 && x.q() == 0,
            Ok(GroupElement::Wreath(x)) => x.k() == 0 && x.support().first().is_none_or(|&(i, _)| i >= 0),
            _ => false,
        }
    };
    let mut steps = Vec::new();
    for c in -span..=span {
        let ac = a.pow(c)?;
        steps.push(ac.op(&t)?);
        steps.push(ac.op(&t.inv())?);
    }
    let mut ball = vec![(model.identity(), 0usize)];
    let mut frontier = vec![model.identity()];
    for d in 1..=radius {
        let mut next: Vec<GroupElement> = Vec::new();
        for g in &frontier {
            for s in &steps {
                let h = g.op(s)?;
                let known = ball.iter().any(|(v, _)| same_vertex(v, &h)) || next.iter().any(|v| same_vertex(v, &h));
                if !known {
                    next.push(h);
                }
            }
        }
        ball.extend(next.iter().map(|g| (g.clone(), d)));
        frontier = next;
    }
    Ok(ball)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparationWitness {
    pub j: i64,
    pub element: WreathElement,
    /// `d_{T_m}(B, gB)`.
    pub distance_in_source: u64,
    pub trivial_in_target: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub m: u64,
    pub n: u64,
    pub seed: u64,
    pub sampled_pairs: usize,
    /// Largest `d_{T_n}(λu, λv) − d_{T_m}(u, v)` over the samples.
    pub worst_excess: i64,
    pub lipschitz: bool,
    /// `t⁻ʲ a_0ⁿ tʲ`: trivial in `ℤ_n wr ℤ`, at distance `2j` in `T_m`
    /// whenever `m ∤ n`.
    pub witnesses: Vec<SeparationWitness>,
}

/// Checks that mod-`n` reduction `λ: T_m → T_n` is 1-Lipschitz on sampled
/// vertex pairs and records the elements `t⁻ʲ a_0ⁿ tʲ`, `j = 1..=witness_count`.
pub fn zwreath_embedding_check(m: u64, n: u64, samples: usize, seed: u64, witness_count: i64) -> Result<EmbeddingReport> {
    if n < 2 || m % n != 0 {
        return Err(Error::InvalidParameter(format!("need n ≥ 2 dividing m, got m = {m}, n = {n}")));
    }
    let mut rng = crate::rng::seeded(seed);
    let mut worst = i64::MIN;
    for _ in 0..samples {
        let u = crate::groups::random_wreath(&mut rng, Some(m), 16);
        let v = crate::groups::random_wreath(&mut rng, Some(m), 16);
        let uv = u.inv().op(&v)?;
        let dm = uv.tree_length() as i64;
        let dn = uv.reduce_mod(n)?.tree_length() as i64;
        worst = worst.max(dn - dm);
    }
    let witnesses = (1..=witness_count)
        .map(|j| -> Result<SeparationWitness> {
            let t = WreathElement::shift(Some(m), 1);
            let g = t.pow(-j)?.op(&WreathElement::lamp(Some(m), 0, n as i64))?.op(&t.pow(j)?)?;
            Ok(SeparationWitness {
                j,
                distance_in_source: g.tree_length(),
                trivial_in_target: g.reduce_mod(n)? == WreathElement::identity(Some(n)),
                element: g,
            })
        })
        .collect::<Result<_>>()?;
    Ok(EmbeddingReport {
        m,
        n,
        seed,
        sampled_pairs: samples,
        worst_excess: if samples == 0 { 0 } else { worst },
        lipschitz: samples == 0 || worst <= 0,
        witnesses,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiRow {
    pub n: i64,
    pub alpha: i64,
    pub beta: i64,
    #[serde(serialize_with = "ser_f64")]
    pub bounded: f64,
    #[serde(serialize_with = "ser_f64")]
    pub diverging: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiDirection {
    /// `g_n = a_1^n a_0^{−round(nξ)}` stays within `bound` under `φ_ξ`…
    #[serde(serialize_with = "ser_f64")]
    pub bounded_under: f64,
    /// …and is unbounded under `φ_η`.
    #[serde(serialize_with = "ser_f64")]
    pub diverging_under: f64,
    #[serde(serialize_with = "ser_f64")]
    pub max_bounded: f64,
    #[serde(serialize_with = "ser_f64")]
    pub bound: f64,
    pub rows: Vec<PhiRow>,
}

impl PhiDirection {
    pub fn row(&self, n: i64) -> Option<&PhiRow> {
        self.rows.get(usize::try_from(n - 1).ok()?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhiCertificate {
    pub n_max: i64,
    pub forward: PhiDirection,
    pub backward: PhiDirection,
}

/// `arccosh(9/8)`: displacement of a translation by `1/2`.
pub fn phi_bound() -> f64 {
    acosh1p(1.0 / 8.0)
}

fn phi_direction(xi: f64, eta: f64, n_max: i64, exec: Exec) -> Result<PhiDirection> {
    let bounded_model = ActionModel::PhiXi { xi };
    let diverging_model = ActionModel::PhiXi { xi: eta };
    let rows: Vec<PhiRow> = exec
        .map_range(n_max as usize, |i| -> Result<PhiRow> {
            let n = i as i64 + 1;
            let beta = -(n as f64 * xi).round() as i64;
            let g = GroupElement::Wreath(WreathElement::new(None, [(1, n), (0, beta)], 0)?);
            Ok(PhiRow {
                n,
                alpha: n,
                beta,
                bounded: bounded_model.displacement(&g)?,
                diverging: diverging_model.displacement(&g)?,
            })
        })
        .into_iter()
        .collect::<Result<_>>()?;
    Ok(PhiDirection {
        bounded_under: xi,
        diverging_under: eta,
        max_bounded: rows.iter().map(|r| r.bounded).fold(0.0, f64::max),
        bound: phi_bound(),
        rows,
    })
}

/// Certificate that `φ_ξ` and `φ_η` give incomparable actions: a sequence
/// bounded under one and divergent under the other, in both directions.
pub fn phi_xi_incomparability(xi: f64, eta: f64, n_max: i64) -> Result<PhiCertificate> {
    for x in [xi, eta] {
        if !(x > 0.0 && x.is_finite() && x != 1.0) {
            return Err(Error::InvalidParameter(format!("parameters must be positive and ≠ 1, got {x}")));
        }
    }
    if xi == eta {
        return Err(Error::InvalidParameter("ξ and η must differ".into()));
    }
    if n_max < 1 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    Ok(PhiCertificate {
        n_max,
        forward: phi_direction(xi, eta, n_max, Exec::default())?,
        backward: phi_direction(eta, xi, n_max, Exec::default())?,
    })
}

/// `b⁻ʲ a bʲ` for `j = 1..=count`.
pub fn bs_conjugate_family(count: i64) -> Vec<GroupElement> {
    (1..=count)
        .map(|j| {
            let g = BsElement::b_pow(-j)
                .op(&BsElement::a())
                .and_then(|x| x.op(&BsElement::b_pow(j)))
                .expect("small exponents");
            GroupElement::Bs(g)
        })
        .collect()
}

/// `a^{2ʲ}` for `j = 1..=count`.
pub fn bs_power_family(count: u32) -> Vec<GroupElement> {
    (1..=count)
        .map(|j| GroupElement::Bs(BsElement::a_pow(crate::groups::two_pow(j))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::random_bs;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    fn bs(s: &str) -> GroupElement {
        GroupElement::Bs(BsElement::parse(s).unwrap())
    }

    #[test]
    fn displacement_examples() {
        let hp = ActionModel::BsHalfPlane;
        assert!((hp.displacement(&bs("b")).unwrap() - LN_2).abs() < 1e-15);
        assert!((1.25f64.acosh() - LN_2).abs() < 1e-15);
        assert_eq!(ActionModel::BsTree.displacement(&bs("b")).unwrap(), 1.0);
        for m in [
            ActionModel::BsHalfPlane,
            ActionModel::BsTree,
            ActionModel::PhiXi { xi: 2.0 },
            ActionModel::wreath_tree(3).unwrap(),
            ActionModel::cayley_lattice(vec![vec![1]]).unwrap(),
        ] {
            assert_eq!(m.displacement(&m.identity()).unwrap(), 0.0);
        }
        let z = ActionModel::cayley_lattice(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(z.displacement(&GroupElement::Lattice(vec![3, -4])).unwrap(), 7.0);
        let c = ActionModel::cayley_cyclic(7, vec![1]).unwrap();
        assert_eq!(c.displacement(&GroupElement::Cyclic(6)).unwrap(), 1.0);
        assert!(hp.displacement(&GroupElement::Cyclic(1)).is_err());
        let tiny = ActionModel::Cayley {
            group: CayleyGroup::Lattice { dim: 1 },
            generators: vec![vec![1]],
            budget: 10,
        };
        assert!(tiny.displacement(&GroupElement::Lattice(vec![100])).unwrap_err().is_budget());
    }

    #[test]
    fn half_plane_closed_forms() {
        let hp = ActionModel::BsHalfPlane;
        for (j, g) in bs_conjugate_family(12).iter().enumerate() {
            let want = acosh1p(4f64.powi(-(j as i32 + 1)) / 2.0);
            assert!((hp.displacement(g).unwrap() - want).abs() < 1e-15);
            assert_eq!(ActionModel::BsTree.displacement(g).unwrap(), 2.0 * (j as f64 + 1.0));
        }
        for (j, g) in bs_power_family(20).iter().enumerate() {
            let n = 2f64.powi(j as i32 + 1);
            assert!((hp.displacement(g).unwrap() - acosh1p(n * n / 2.0)).abs() < 1e-12);
            assert_eq!(ActionModel::BsTree.displacement(g).unwrap(), 0.0);
        }
    }

    #[test]
    fn translation_examples() {
        let hp = ActionModel::BsHalfPlane;
        let t = translation_number(&hp, &bs("b"), 8).unwrap();
        assert_eq!(t.method, TauMethod::ExactClosedForm);
        assert!((t.lower - LN_2).abs() < 1e-12);
        assert!((2.0 * (3.0 / (2.0 * 2f64.sqrt())).acosh() - LN_2).abs() < 1e-15);
        assert_eq!(translation_number(&ActionModel::BsTree, &bs("a"), 8).unwrap().lower, 0.0);
        let ta = translation_number(&hp, &bs("a"), 64).unwrap();
        assert_eq!(ta.lower, 0.0);
        assert!(ta.fekete.upper < 0.2);
        assert!(translation_number(&hp, &bs("a"), 0).is_err());
        let z = ActionModel::cayley_lattice(vec![vec![1]]).unwrap();
        let tz = translation_number(&z, &GroupElement::Lattice(vec![3]), 4).unwrap();
        assert_eq!((tz.lower, tz.upper), (3.0, 3.0));
    }

    #[test]
    fn classification_examples() {
        let e = classify_action(&ActionModel::BsHalfPlane, 200).unwrap();
        assert_eq!(e.claimed, ActionType::QuasiParabolic, "{e:?}");
        let e = classify_action(&ActionModel::BsTree, 200).unwrap();
        assert_eq!(e.claimed, ActionType::QuasiParabolic);
        let z = ActionModel::cayley_lattice(vec![vec![1]]).unwrap();
        assert_eq!(classify_action(&z, 200).unwrap().claimed, ActionType::Lineal);
        let c = ActionModel::cayley_cyclic(5, vec![1]).unwrap();
        assert_eq!(classify_action(&c, 200).unwrap().claimed, ActionType::Elliptic);
        let z2 = ActionModel::cayley_lattice(vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(classify_action(&z2, 200).unwrap().claimed, ActionType::GeneralType);
    }

    #[test]
    fn domination_examples() {
        let hp = ActionModel::BsHalfPlane;
        let tree = ActionModel::BsTree;
        let v = dominates(&hp, &tree, &bs_conjugate_family(20)).unwrap();
        assert!(v.refuted());
        let v = dominates(&tree, &hp, &bs_power_family(20)).unwrap();
        assert!(v.refuted());
        let probes: Vec<GroupElement> = {
            let mut rng = crate::rng::seeded(1);
            (0..50).map(|_| GroupElement::Bs(random_bs(&mut rng, 12))).collect()
        };
        for m in [&hp, &tree] {
            match dominates(m, m, &probes).unwrap().status {
                DominationStatus::HoldsOnProbes { factor, offset, .. } => {
                    assert_eq!((factor, offset), (1.0, 0.0));
                }
                other => panic!("{other:?}"),
            }
        }
        assert!(dominates(&hp, &tree, &[]).is_err());
    }

    #[test]
    fn isospectral_examples() {
        let hp = ActionModel::BsHalfPlane;
        let tree = ActionModel::BsTree;
        let seqs = vec![
            NamedSequence {
                name: "b^n".into(),
                elements: (1..=30).map(|n| GroupElement::Bs(BsElement::b_pow(n))).collect(),
            },
            NamedSequence {
                name: "a^n".into(),
                elements: (1..=30).map(|n| GroupElement::Bs(BsElement::a_pow(n))).collect(),
            },
        ];
        let r = coarsely_isospectral(&hp, &tree, &seqs).unwrap();
        assert!(r.isospectral);
        assert!(r.sequences[0].diverges_a && r.sequences[0].diverges_b);
        assert!(!r.sequences[1].diverges_a && !r.sequences[1].diverges_b);
        assert!(r.ln_two_law.unwrap().holds);
        let same = coarsely_isospectral(&tree, &tree, &seqs).unwrap();
        assert!(same.isospectral && same.ln_two_law.is_none());
    }

    #[test]
    fn tree_lengths_match_coset_bfs() {
        for model in [
            ActionModel::BsTree,
            ActionModel::wreath_tree(2).unwrap(),
            ActionModel::wreath_tree(4).unwrap(),
        ] {
            let ball = coset_ball(&model, 4).unwrap();
            let degree = match &model {
                ActionModel::WreathTree { n } => *n as usize + 1,
                _ => 3,
            };
            let expected: usize = 1 + (1..=4).map(|r| degree * (degree - 1).pow(r - 1)).sum::<usize>();
            assert_eq!(ball.len(), expected, "{}", model.name());
            for (g, d) in &ball {
                assert_eq!(model.displacement(g).unwrap(), *d as f64, "{g}");
            }
        }
    }

    #[test]
    fn embedding_examples() {
        let r = zwreath_embedding_check(4, 2, 500, 7, 10).unwrap();
        assert!(r.lipschitz);
        for w in &r.witnesses {
            assert_eq!(w.distance_in_source, 2 * w.j as u64);
            assert!(w.trivial_in_target);
        }
        let same = zwreath_embedding_check(3, 3, 200, 7, 3).unwrap();
        assert_eq!(same.worst_excess, 0);
        assert!(same.witnesses.iter().all(|w| w.distance_in_source == 0));
        assert!(zwreath_embedding_check(4, 3, 10, 7, 3).is_err());
    }

    #[test]
    fn phi_examples() {
        let c = phi_xi_incomparability(2f64.sqrt(), 3f64.sqrt(), 1000).unwrap();
        assert!(c.forward.max_bounded <= phi_bound() + 1e-9);
        assert!(c.backward.max_bounded <= phi_bound() + 1e-9);
        let row = c.forward.row(1000).unwrap();
        let floor = acosh1p((1000.0 * (3f64.sqrt() - 2f64.sqrt()) - 0.5).powi(2) / 2.0);
        assert!(row.diverging >= floor && row.diverging > 10.0);
        assert!((phi_bound() - 0.4949).abs() < 1e-4);
        assert!(phi_xi_incomparability(2.0, 2.0, 10).is_err());
        assert!(phi_xi_incomparability(1.0, 2.0, 10).is_err());
    }

    #[test]
    fn geodesic_paths_are_paths() {
        let mut rng = crate::rng::seeded(3);
        for model in [ActionModel::BsTree, ActionModel::wreath_tree(3).unwrap()] {
            for _ in 0..100 {
                let g = match model {
                    ActionModel::BsTree => GroupElement::Bs(random_bs(&mut rng, 14)),
                    _ => GroupElement::Wreath(crate::groups::random_wreath(&mut rng, Some(3), 14)),
                };
                let path = model.geodesic_path(&g).unwrap();
                assert_eq!(path.last().unwrap(), &g);
                let d = model.displacement(&g).unwrap() as usize;
                assert!(path.len() - 1 <= d + 1);
                for w in path.windows(2) {
                    assert!(model.distance(&w[0], &w[1]).unwrap() <= 1.0);
                }
            }
        }
        assert!(ActionModel::BsHalfPlane.geodesic_path(&bs("a")).is_err());
    }

    fn bs_element() -> impl Strategy<Value = BsElement> {
        prop::collection::vec((0u16..2, any::<bool>()), 0..=20).prop_map(|v| {
            use crate::words::{Letter, ReducedWord};
            let w = ReducedWord::reduce_letters(v.into_iter().map(|(s, p)| if p { Letter::pos(s) } else { Letter::neg(s) }));
            BsElement::from_word(&w).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn bs_translation_laws(g in bs_element()) {
            let e = g.epsilon().unsigned_abs() as f64;
            let g = GroupElement::Bs(g);
            let tree = translation_number(&ActionModel::BsTree, &g, 6).unwrap();
            let hp = translation_number(&ActionModel::BsHalfPlane, &g, 6).unwrap();
            prop_assert_eq!(tree.lower, e);
            prop_assert!((hp.lower - LN_2 * e).abs() < 1e-9);
            prop_assert!(tree.fekete.lower <= e + 1e-9 && e <= tree.fekete.upper + 1e-9);
            prop_assert!(hp.fekete.lower <= hp.lower + 1e-9 && hp.lower <= hp.fekete.upper + 1e-9);
        }

        #[test]
        fn tau_of_powers(g in bs_element(), k in 1i64..5) {
            let g = GroupElement::Bs(g);
            let gk = g.pow(k).unwrap();
            for m in [ActionModel::BsTree, ActionModel::BsHalfPlane] {
                let t1 = translation_number(&m, &g, 2).unwrap().lower;
                let tk = translation_number(&m, &gk, 2).unwrap().lower;
                prop_assert!((tk - k as f64 * t1).abs() < 1e-9);
            }
        }

        #[test]
        fn tau_is_conjugation_invariant(g in bs_element(), h in bs_element()) {
            let g = GroupElement::Bs(g);
            let h = GroupElement::Bs(h);
            let c = h.op(&g).unwrap().op(&h.inv()).unwrap();
            for m in [ActionModel::BsTree, ActionModel::BsHalfPlane] {
                let a = translation_number(&m, &g, 4).unwrap();
                let b = translation_number(&m, &c, 4).unwrap();
                prop_assert!(a.lower <= b.upper + 1e-9 && b.lower <= a.upper + 1e-9);
            }
        }

        #[test]
        fn wreath_tree_tau_is_shift(w in (prop::collection::vec((-4i64..4, 0i64..3), 0..4), -3i64..4)) {
            let g = GroupElement::Wreath(WreathElement::new(Some(3), w.0, w.1).unwrap());
            let t = translation_number(&ActionModel::wreath_tree(3).unwrap(), &g, 4).unwrap();
            prop_assert_eq!(t.lower, w.1.unsigned_abs() as f64);
        }
    }
}
