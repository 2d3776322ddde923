//! Finite metric spaces: Gromov products, four-point hyperbolicity,
//! Hausdorff distance, broken geodesics, orbit graphs, and the Švarc–Milnor
//! generating sets of tree actions.

use std::collections::VecDeque;

use rand::Rng;
use serde::Serialize;

use crate::actions::{half_plane_distance, ActionModel, GroupElement};
use crate::error::{Error, Result};
use crate::groups::GroupOps;
use crate::par::Exec;
use crate::real::ser_f64;

pub const METRIC_TOLERANCE: f64 = 1e-9;

/// `n` points with a symmetric distance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    n: usize,
    d: Vec<f64>,
    exact: bool,
}

impl PointCloud {
    /// Validates zero diagonal, symmetry, non-negativity and the triangle
    /// inequality, each within [`METRIC_TOLERANCE`].
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("distance matrix must be square".into()));
        }
        let cloud = PointCloud {
            n,
            d: rows.into_iter().flatten().collect(),
            exact: false,
        };
        cloud.validate(METRIC_TOLERANCE)?;
        Ok(cloud)
    }

    /// As [`PointCloud::new`] with exact checks.
    pub fn from_integers(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("distance matrix must be square".into()));
        }
        let cloud = PointCloud {
            n,
            d: rows.into_iter().flatten().map(|x| x as f64).collect(),
            exact: true,
        };
        cloud.validate(0.0)?;
        Ok(cloud)
    }

    /// Comma- or whitespace-separated rows. All-integer input is checked
    /// exactly.
    pub fn from_csv(text: &str) -> Result<Self> {
        let rows: Vec<Vec<&str>> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| l.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).collect())
            .collect();
        if rows.iter().flatten().all(|t| t.parse::<i64>().is_ok()) {
            return PointCloud::from_integers(
                rows.iter().map(|r| r.iter().map(|t| t.parse().expect("checked")).collect()).collect(),
            );
        }
        let parsed: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|t| {
                        t.parse::<f64>()
                            .ok()
                            .filter(|x| x.is_finite())
                            .ok_or_else(|| Error::MalformedInput(format!("not a finite number: {t:?}")))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        PointCloud::new(parsed)
    }

    /// Points of the upper half-plane with the hyperbolic metric.
    pub fn from_half_plane(points: &[(f64, f64)]) -> Result<Self> {
        if points.iter().any(|p| !(p.1 > 0.0) || !p.0.is_finite()) {
            return Err(Error::InvalidInput("points must lie in the upper half-plane".into()));
        }
        Ok(PointCloud::from_fn(points.len(), |i, j| half_plane_distance(points[i], points[j])))
    }

    /// Orbit points `g·s` of an action model.
    pub fn from_orbit(model: &ActionModel, elements: &[GroupElement], exec: Exec) -> Result<Self> {
        let n = elements.len();
        let rows: Vec<Vec<f64>> = exec
            .map_range(n, |i| -> Result<Vec<f64>> {
                (0..n)
                    .map(|j| if i < j { model.distance(&elements[i], &elements[j]) } else { Ok(0.0) })
                    .collect()
            })
            .into_iter()
            .collect::<Result<_>>()?;
        Ok(PointCloud::from_fn(n, |i, j| if i < j { rows[i][j] } else { rows[j][i] }))
    }

    /// Tree metric from a parent array (`parents[0]` is ignored; vertex `v`
    /// hangs below `parents[v] < v`).
    pub fn tree_metric(parents: &[usize]) -> Result<Self> {
        let n = parents.len();
        if parents.iter().enumerate().skip(1).any(|(v, &p)| p >= v) {
            return Err(Error::InvalidInput("parent indices must precede their children".into()));
        }
        let mut adj = vec![Vec::new(); n];
        for (v, &p) in parents.iter().enumerate().skip(1) {
            adj[v].push(p);
            adj[p].push(v);
        }
        let mut d = vec![0i64; n * n];
        for s in 0..n {
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut q = VecDeque::from([s]);
            while let Some(u) = q.pop_front() {
                for &w in &adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        d[s * n + w] = d[s * n + u] + 1;
                        q.push_back(w);
                    }
                }
            }
        }
        Ok(PointCloud {
            n,
            d: d.into_iter().map(|x| x as f64).collect(),
            exact: true,
        })
    }

    /// Trusted constructor for metrics computed from a model.
    fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let x = f(i, j);
                d[i * n + j] = x;
                d[j * n + i] = x;
            }
        }
        PointCloud { n, d, exact: false }
    }

    fn validate(&self, tol: f64) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if self.dist(i, i).abs() > tol {
                return Err(Error::InvalidInput(format!("d({i},{i}) ≠ 0")));
            }
            for j in 0..n {
                let x = self.dist(i, j);
                if !x.is_finite() || x < -tol {
                    return Err(Error::InvalidInput(format!("d({i},{j}) = {x} is not a valid distance")));
                }
                if (x - self.dist(j, i)).abs() > tol {
                    return Err(Error::InvalidInput(format!("d({i},{j}) ≠ d({j},{i})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.dist(i, k) > self.dist(i, j) + self.dist(j, k) + tol {
                        return Err(Error::InvalidInput(format!("triangle inequality fails for ({i},{j},{k})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    /// The sub-cloud on `indices`.
    pub fn restrict(&self, indices: &[usize]) -> PointCloud {
        let mut c = PointCloud::from_fn(indices.len(), |i, j| self.dist(indices[i], indices[j]));
        c.exact = self.exact;
        c
    }
}

/// `(x|y)_z = ½(d(x,z) + d(y,z) − d(x,y))`. Panics on out-of-range indices.
pub fn gromov_product(x: usize, y: usize, z: usize, p: &PointCloud) -> f64 {
    0.5 * (p.dist(x, z) + p.dist(y, z) - p.dist(x, y))
}

pub const EXHAUSTIVE_DELTA_LIMIT: usize = 200;
pub const DELTA_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_DELTA_SEED: u64 = 0x5eed;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaEstimate {
    /// Least `δ′` with `(x|z)_t ≥ min{(x|y)_t, (y|z)_t} − δ′` on every
    /// checked ordered quadruple.
    #[serde(serialize_with = "ser_f64")]
    pub delta: f64,
    /// Worst quadruple `[x, y, z, t]`.
    pub witness: Option<[usize; 4]>,
    pub exhaustive: bool,
    pub checked: u64,
    pub seed: Option<u64>,
    /// A geodesic space with δ-thin triangles satisfies the four-point
    /// condition with `8δ`, so thin-triangle δ is at least `delta / 8`.
    #[serde(serialize_with = "ser_f64")]
    pub thin_triangle_lower_bound: f64,
}

/// Four-point defect of a quadruple and the ordering `[x, y, z, t]`
/// realizing it.
fn quad_defect(p: &PointCloud, i: usize, j: usize, k: usize, l: usize) -> (f64, [usize; 4]) {
    // pairings and their sums; the pairing {x,z},{y,t} must be the largest
    let sums = [
        (p.dist(i, j) + p.dist(k, l), [i, k, j, l]),
        (p.dist(i, k) + p.dist(j, l), [i, j, k, l]),
        (p.dist(i, l) + p.dist(j, k), [i, j, l, k]),
    ];
    let mut order = [0, 1, 2];
    order.sort_by(|&a, &b| sums[b].0.total_cmp(&sums[a].0));
    ((sums[order[0]].0 - sums[order[1]].0) / 2.0, sums[order[0]].1)
}

pub fn four_point_delta(p: &PointCloud) -> DeltaEstimate {
    four_point_delta_with(p, DEFAULT_DELTA_SEED, Exec::default())
}

/// Exhaustive over 4-subsets up to [`EXHAUSTIVE_DELTA_LIMIT`] points;
/// beyond that, [`DELTA_SAMPLES`] seeded random quadruples.
pub fn four_point_delta_with(p: &PointCloud, seed: u64, exec: Exec) -> DeltaEstimate {
    let n = p.len();
    let finish = |delta: f64, witness, exhaustive, checked, seed| DeltaEstimate {
        delta,
        witness,
        exhaustive,
        checked,
        seed,
        thin_triangle_lower_bound: delta / 8.0,
    };
    if n < 4 {
        return finish(0.0, None, true, 0, None);
    }
    if n <= EXHAUSTIVE_DELTA_LIMIT {
        let per_i = exec.map_range(n, |i| {
            let mut best = (f64::NEG_INFINITY, [0; 4]);
            for j in i + 1..n {
                for k in j + 1..n {
                    for l in k + 1..n {
                        let cand = quad_defect(p, i, j, k, l);
                        if cand.0 > best.0 {
                            best = cand;
                        }
                    }
                }
            }
            best
        });
        let best = per_i
            .into_iter()
            .fold((f64::NEG_INFINITY, [0; 4]), |acc, c| if c.0 > acc.0 { c } else { acc });
        let checked = (n as u64) * (n as u64 - 1) * (n as u64 - 2) * (n as u64 - 3) / 24;
        return finish(best.0.max(0.0), Some(best.1), true, checked, None);
    }
    const CHUNK: u64 = 1 << 14;
    let chunks = DELTA_SAMPLES.div_ceil(CHUNK);
    let per_chunk = exec.map_range(chunks as usize, |c| {
        let mut rng = crate::rng::substream(seed, c as u64);
        let mut best = (f64::NEG_INFINITY, [0; 4]);
        let count = CHUNK.min(DELTA_SAMPLES - c as u64 * CHUNK);
        for _ in 0..count {
            let mut q = [0usize; 4];
            loop {
                for x in q.iter_mut() {
                    *x = rng.gen_range(0..n);
                }
                q.sort_unstable();
                if q.windows(2).all(|w| w[0] < w[1]) {
                    break;
                }
            }
            let cand = quad_defect(p, q[0], q[1], q[2], q[3]);
            if cand.0 > best.0 {
                best = cand;
            }
        }
        best
    });
    let best = per_chunk
        .into_iter()
        .fold((f64::NEG_INFINITY, [0; 4]), |acc, c| if c.0 > acc.0 { c } else { acc });
    finish(best.0.max(0.0), Some(best.1), false, DELTA_SAMPLES, Some(seed))
}

/// Hausdorff distance between two non-empty index sets.
pub fn hausdorff(a: &[usize], b: &[usize], p: &PointCloud) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter("Hausdorff distance needs non-empty sets".into()));
    }
    let one_sided = |from: &[usize], to: &[usize]| {
        from.iter()
            .map(|&x| to.iter().map(|&y| p.dist(x, y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(one_sided(a, b).max(one_sided(b, a)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainOutcome {
    Holds,
    Violated,
    HypothesisFailure,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainCheck {
    pub outcome: ChainOutcome,
    /// Largest `(x_{i−1}|x_{i+1})_{x_i}` over interior points.
    #[serde(serialize_with = "ser_f64")]
    pub max_product: f64,
    /// Shortest step `d(x_{i−1}, x_i)` and the required `2C + 16δ`.
    #[serde(serialize_with = "ser_f64")]
    pub min_step: f64,
    #[serde(serialize_with = "ser_f64")]
    pub step_threshold: f64,
    /// `d(x_0, x_n)` and `Σ d(x_{i−1}, x_i) − 2(n−1)(C + 8δ)`.
    #[serde(serialize_with = "ser_f64")]
    pub lhs: f64,
    #[serde(serialize_with = "ser_f64")]
    pub rhs: f64,
    #[serde(serialize_with = "ser_f64")]
    pub slack: f64,
}

/// Broken-geodesic lower bound: if consecutive points are far apart and
/// the chain turns little at each interior point, `d(x_0, x_n)` is close to
/// the length of the chain.
pub fn broken_chain_check(x: &[usize], c: f64, delta: f64, p: &PointCloud) -> Result<ChainCheck> {
    if x.len() < 2 {
        return Err(Error::InvalidParameter("a chain needs at least two points".into()));
    }
    if let Some(&bad) = x.iter().find(|&&i| i >= p.len()) {
        return Err(Error::InvalidParameter(format!("point index {bad} out of range")));
    }
    let n = x.len() - 1;
    let max_product = (1..n)
        .map(|i| gromov_product(x[i - 1], x[i + 1], x[i], p))
        .fold(f64::NEG_INFINITY, f64::max);
    let steps: Vec<f64> = x.windows(2).map(|w| p.dist(w[0], w[1])).collect();
    let min_step = steps.iter().copied().fold(f64::INFINITY, f64::min);
    let step_threshold = 2.0 * c + 16.0 * delta;
    let tol = if p.is_exact() { 0.0 } else { METRIC_TOLERANCE };
    let hypotheses = max_product <= c + tol && min_step > step_threshold;
    let lhs = p.dist(x[0], x[n]);
    let rhs = steps.iter().sum::<f64>() - 2.0 * (n as f64 - 1.0) * (c + 8.0 * delta);
    let outcome = if !hypotheses {
        ChainOutcome::HypothesisFailure
    } else if lhs >= rhs - tol {
        ChainOutcome::Holds
    } else {
        ChainOutcome::Violated
    };
    Ok(ChainCheck {
        outcome,
        max_product: if n > 1 { max_product } else { 0.0 },
        min_step,
        step_threshold,
        lhs,
        rhs,
        slack: lhs - rhs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairWitness {
    pub u: usize,
    pub v: usize,
    #[serde(serialize_with = "ser_f64")]
    pub d_space: f64,
    pub d_graph: u32,
}

/// Comparison between the sampled metric `d_S` and the graph metric `d_Γ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonCertificate {
    /// `C = 2ρ + 1` in `d_S ≤ C·d_Γ`.
    #[serde(serialize_with = "ser_f64")]
    pub constant: f64,
    pub direction: String,
    pub lipschitz_holds: bool,
    /// `d_Γ ≤ ⌈d_S⌉` on every pair; it can fail for samples that are too
    /// sparse along geodesics.
    pub ceiling_holds: bool,
    /// Pair where `d_S / d_Γ` is largest.
    pub tightest: Option<PairWitness>,
    /// Up to ten pairs violating either inequality.
    pub violations: Vec<PairWitness>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitGraph {
    pub n: usize,
    #[serde(serialize_with = "ser_f64")]
    pub rho: f64,
    pub edges: Vec<(usize, usize)>,
    #[serde(skip)]
    pub graph_distance: Vec<u32>,
    pub certificate: ComparisonCertificate,
}

impl OrbitGraph {
    pub fn graph_dist(&self, u: usize, v: usize) -> u32 {
        self.graph_distance[u * self.n + v]
    }
}

/// Graph on the points with an edge wherever `d ≤ 2ρ + 1`, compared with
/// the ambient metric.
pub fn orbit_graph(p: &PointCloud, rho: f64) -> Result<OrbitGraph> {
    orbit_graph_with(p, rho, Exec::default())
}

pub fn orbit_graph_with(p: &PointCloud, rho: f64, exec: Exec) -> Result<OrbitGraph> {
    if !(rho >= 0.0) {
        return Err(Error::InvalidParameter("ρ must be non-negative".into()));
    }
    let n = p.len();
    let reach = 2.0 * rho + 1.0;
    let tol = if p.is_exact() { 0.0 } else { METRIC_TOLERANCE };
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && p.dist(i, j) <= reach + tol).collect())
        .collect();
    let edges = (0..n)
        .flat_map(|i| adj[i].iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
        .collect();
    let rows: Vec<Vec<u32>> = exec.map_range(n, |s| {
        let mut d = vec![u32::MAX; n];
        d[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &w in &adj[u] {
                if d[w] == u32::MAX {
                    d[w] = d[u] + 1;
                    q.push_back(w);
                }
            }
        }
        d
    });
    if let Some((u, v)) = (0..n).find_map(|u| rows[u].iter().position(|&x| x == u32::MAX).map(|v| (u, v))) {
        return Err(Error::Disconnected(u, v));
    }
    let mut tightest: Option<(f64, PairWitness)> = None;
    let mut violations = Vec::new();
    let (mut lipschitz_holds, mut ceiling_holds) = (true, true);
    for u in 0..n {
        for v in u + 1..n {
            let w = PairWitness {
                u,
                v,
                d_space: p.dist(u, v),
                d_graph: rows[u][v],
            };
            let ratio = w.d_space / w.d_graph as f64;
            let lip = w.d_space <= reach * w.d_graph as f64 + tol;
            let ceil = w.d_graph as f64 <= (w.d_space - tol).ceil().max(1.0);
            lipschitz_holds &= lip;
            ceiling_holds &= ceil;
            if (!lip || !ceil) && violations.len() < 10 {
                violations.push(w.clone());
            }
            if tightest.as_ref().is_none_or(|(r, _)| ratio > *r) {
                tightest = Some((ratio, w));
            }
        }
    }
    Ok(OrbitGraph {
        n,
        rho,
        edges,
        certificate: ComparisonCertificate {
            constant: reach,
            direction: "d_S(u,v) <= (2rho+1) d_graph(u,v) and d_graph(u,v) <= ceil(d_S(u,v))".into(),
            lipschitz_holds,
            ceiling_holds,
            tightest: tightest.map(|(_, w)| w),
            violations,
        },
        graph_distance: rows.into_iter().flatten().collect(),
    })
}

/// The generating set `X = {g : d(b, gb) ≤ 2D + 1}` of a tree action,
/// with factorizations along geodesics.
#[derive(Clone, Debug)]
pub struct SvarcMilnor {
    model: ActionModel,
    d: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Factorization {
    pub element: GroupElement,
    pub factors: Vec<GroupElement>,
    /// `d(b, gb)`.
    #[serde(serialize_with = "ser_f64")]
    pub displacement: f64,
}

impl Factorization {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

pub fn svarc_milnor_generators(model: &ActionModel, d: f64) -> Result<SvarcMilnor> {
    if !model.is_tree() {
        return Err(Error::Unsupported(format!("{} has no geodesic tracing", model.name())));
    }
    if !(d >= 0.0) {
        return Err(Error::InvalidParameter("D must be non-negative".into()));
    }
    Ok(SvarcMilnor {
        model: model.clone(),
        d,
    })
}

impl SvarcMilnor {
    pub fn radius(&self) -> f64 {
        2.0 * self.d + 1.0
    }

    pub fn membership(&self, g: &GroupElement) -> Result<bool> {
        Ok(self.model.displacement(g)? <= self.radius())
    }

    /// `g = x_1 ⋯ x_k` with each `x_i ∈ X` and `k ≤ d(b, gb) + 1`, read off
    /// the vertices of the geodesic from `b` to `gb`.
    pub fn factorize(&self, g: &GroupElement) -> Result<Factorization> {
        let path = self.model.geodesic_path(g)?;
        let factors = path
            .windows(2)
            .map(|w| w[0].inv().op(&w[1]))
            .collect::<Result<_>>()?;
        Ok(Factorization {
            element: g.clone(),
            factors,
            displacement: self.model.displacement(g)?,
        })
    }

    /// Every factor lies in `X` and the product is the element.
    pub fn verify(&self, f: &Factorization) -> Result<bool> {
        let mut prod = f.element.identity_like();
        for x in &f.factors {
            if !self.membership(x)? {
                return Ok(false);
            }
            prod = prod.op(x)?;
        }
        Ok(prod == f.element)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{random_bs, BsElement};
    use proptest::prelude::*;
    use rand::Rng;

    fn line(xs: &[f64]) -> PointCloud {
        PointCloud::new(xs.iter().map(|a| xs.iter().map(|b| (a - b).abs()).collect()).collect()).unwrap()
    }

    fn random_tree(rng: &mut impl Rng, n: usize) -> PointCloud {
        let parents: Vec<usize> = (0..n).map(|v| if v == 0 { 0 } else { rng.gen_range(0..v) }).collect();
        PointCloud::tree_metric(&parents).unwrap()
    }

    /// Literal definition over ordered quadruples.
    fn slow_delta(p: &PointCloud) -> f64 {
        let n = p.len();
        let mut worst: f64 = 0.0;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for t in 0..n {
                        let lhs = gromov_product(x, z, t, p);
                        let rhs = gromov_product(x, y, t, p).min(gromov_product(y, z, t, p));
                        worst = worst.max(rhs - lhs);
                    }
                }
            }
        }
        worst
    }

    #[test]
    fn validation() {
        assert!(PointCloud::new(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(PointCloud::new(vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0]]).is_err());
        let bad = vec![vec![0, 1, 5], vec![1, 0, 1], vec![5, 1, 0]];
        assert!(PointCloud::from_integers(bad).is_err());
        let c = PointCloud::from_csv("0,1,2\n1,0,1\n2,1,0\n").unwrap();
        assert!(c.is_exact());
        let c = PointCloud::from_csv("0 0.5\n0.5 0\n").unwrap();
        assert!(!c.is_exact());
        assert!(PointCloud::from_csv("0,x\nx,0").is_err());
        assert!(PointCloud::tree_metric(&[0, 2, 0]).is_err());
    }

    #[test]
    fn gromov_examples() {
        let p = line(&[0.0, 4.0, 1.0]);
        assert_eq!(gromov_product(0, 1, 2, &p), 0.0);
        assert_eq!(gromov_product(0, 0, 2, &p), p.dist(0, 2));
        // distance from z to the x–y geodesic on random trees
        let mut rng = crate::rng::seeded(11);
        for _ in 0..20 {
            let t = random_tree(&mut rng, 12);
            for (x, y, z) in [(0, 5, 9), (3, 7, 11), (1, 2, 4)] {
                let on_geodesic = (0..12).filter(|&w| t.dist(x, w) + t.dist(w, y) == t.dist(x, y));
                let to_geodesic = on_geodesic.map(|w| t.dist(z, w)).fold(f64::INFINITY, f64::min);
                assert_eq!(gromov_product(x, y, z, &t), to_geodesic);
            }
        }
    }

    #[test]
    fn delta_examples() {
        let mut rng = crate::rng::seeded(2);
        for _ in 0..10 {
            assert_eq!(four_point_delta(&random_tree(&mut rng, 30)).delta, 0.0);
        }
        // corners of an r×r square in ℓ¹: pairings 2r, 2r and 4r
        for r in [4.0, 8.0, 16.0] {
            let pts: [(f64, f64); 4] = [(0.0, 0.0), (r, 0.0), (r, r), (0.0, r)];
            let rows = pts
                .iter()
                .map(|a| pts.iter().map(|b| (a.0 - b.0).abs() + (a.1 - b.1).abs()).collect())
                .collect();
            assert_eq!(four_point_delta(&PointCloud::new(rows).unwrap()).delta, r);
        }
        let small = four_point_delta(&line(&[0.0, 1.0, 2.0]));
        assert_eq!((small.delta, small.witness), (0.0, None));
    }

    #[test]
    fn delta_matches_literal_definition() {
        let mut rng = crate::rng::seeded(4);
        for _ in 0..20 {
            let pts: Vec<(f64, f64)> = (0..9).map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(0.1..3.0))).collect();
            let p = PointCloud::from_half_plane(&pts).unwrap();
            let est = four_point_delta(&p);
            assert!((est.delta - slow_delta(&p)).abs() < 1e-12);
            let [x, y, z, t] = est.witness.unwrap();
            let gap = gromov_product(x, y, t, &p).min(gromov_product(y, z, t, &p)) - gromov_product(x, z, t, &p);
            assert!((gap - est.delta).abs() < 1e-12);
        }
    }

    #[test]
    fn hyperbolic_disk_sample_is_thin() {
        // 200 points, hyperbolic radius ≤ 10 around i
        let mut rng = crate::rng::seeded(8);
        let pts: Vec<(f64, f64)> = (0..200)
            .map(|_| {
                let r: f64 = rng.gen_range(0.0..10.0);
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                // disk model point at Euclidean radius tanh(r/2), then Cayley map
                let (u, v) = ((r / 2.0).tanh() * theta.cos(), (r / 2.0).tanh() * theta.sin());
                let den = u * u + (1.0 - v).powi(2);
                (2.0 * u / den, (1.0 - u * u - v * v) / den)
            })
            .collect();
        let est = four_point_delta(&PointCloud::from_half_plane(&pts).unwrap());
        assert!(est.exhaustive);
        assert!(est.delta <= 1.5, "{}", est.delta);
    }

    #[test]
    fn sampled_delta_for_large_clouds() {
        let mut rng = crate::rng::seeded(5);
        let t = random_tree(&mut rng, 240);
        let est = four_point_delta(&t);
        assert!(!est.exhaustive);
        assert_eq!(est.seed, Some(DEFAULT_DELTA_SEED));
        assert_eq!(est.delta, 0.0);
        assert_eq!(four_point_delta_with(&t, 9, Exec::Sequential), four_point_delta_with(&t, 9, Exec::Parallel));
    }

    #[test]
    fn hausdorff_examples() {
        let p = line(&[0.0, 1.0, 2.0, 3.0]);
        assert_eq!(hausdorff(&[0], &[0, 3], &p).unwrap(), 3.0);
        assert_eq!(hausdorff(&[1, 2], &[2, 1], &p).unwrap(), 0.0);
        assert!(hausdorff(&[], &[1], &p).is_err());
        let pts: Vec<(f64, f64)> = (0..=10)
            .map(|n| (0.0, 2f64.powi(n)))
            .chain((0..=10).map(|n| (0.0, 3f64.powi(n))))
            .collect();
        let h = PointCloud::from_half_plane(&pts).unwrap();
        let (a, b): (Vec<usize>, Vec<usize>) = ((0..11).collect(), (11..22).collect());
        let d = hausdorff(&a, &b, &h).unwrap();
        assert!(d.is_finite() && d < 10.0);
    }

    #[test]
    fn chain_examples() {
        let p = line(&[0.0, 10.0, 20.0, 30.0]);
        let c = broken_chain_check(&[0, 1, 2, 3], 0.0, 0.0, &p).unwrap();
        assert_eq!(c.outcome, ChainOutcome::Holds);
        assert_eq!(c.slack, 0.0);
        let c = broken_chain_check(&[0, 2, 1, 3], 0.0, 0.0, &p).unwrap();
        assert_eq!(c.outcome, ChainOutcome::HypothesisFailure);
        assert!(broken_chain_check(&[0], 0.0, 0.0, &p).is_err());

        // monotone chains along a tree geodesic
        let mut rng = crate::rng::seeded(6);
        for _ in 0..20 {
            let t = random_tree(&mut rng, 40);
            let (x, y) = (0, 39);
            let mut on: Vec<usize> = (0..40).filter(|&w| t.dist(x, w) + t.dist(w, y) == t.dist(x, y)).collect();
            on.sort_by(|&a, &b| t.dist(x, a).total_cmp(&t.dist(x, b)));
            let chain: Vec<usize> = on.iter().step_by(2).copied().collect();
            if chain.len() >= 2 {
                let r = broken_chain_check(&chain, 0.0, 0.0, &t).unwrap();
                assert_eq!(r.outcome, ChainOutcome::Holds);
            }
        }

        // along 2ᵏ·i in the half-plane
        let pts: Vec<(f64, f64)> = (0..12).map(|k| (0.0, 2f64.powi(3 * k))).collect();
        let h = PointCloud::from_half_plane(&pts).unwrap();
        let delta = four_point_delta(&h).delta;
        let chain: Vec<usize> = (0..12).collect();
        let c = (1..11).map(|i| gromov_product(i - 1, i + 1, i, &h)).fold(0.0, f64::max);
        let r = broken_chain_check(&chain, c, delta, &h).unwrap();
        assert_eq!(r.outcome, ChainOutcome::Holds);
    }

    #[test]
    fn orbit_graph_examples() {
        let p = line(&(0..=10).map(f64::from).collect::<Vec<_>>());
        let g = orbit_graph(&p, 0.0).unwrap();
        assert_eq!(g.edges.len(), 10);
        assert!(g.certificate.lipschitz_holds && g.certificate.ceiling_holds);
        let g = orbit_graph(&p, 10.0).unwrap();
        assert_eq!(g.edges.len(), 55);
        assert!((0..11).all(|u| (0..11).all(|v| g.graph_dist(u, v) == u32::from(u != v))));
        let gap = line(&[0.0, 1.0, 5.0]);
        assert_eq!(orbit_graph(&gap, 0.0).unwrap_err(), Error::Disconnected(0, 2));
        let sparse = line(&[0.0, 0.6, 1.2, 1.8]);
        assert!(!orbit_graph(&sparse, 0.0).unwrap().certificate.ceiling_holds);
    }

    #[test]
    fn bs_orbit_graph_certificate() {
        let mut rng = crate::rng::seeded(12);
        let els: Vec<GroupElement> = (0..50).map(|_| GroupElement::Bs(random_bs(&mut rng, 6))).collect();
        let p = PointCloud::from_orbit(&ActionModel::BsHalfPlane, &els, Exec::default()).unwrap();
        // smallest ρ joining the sample
        let mut rho = 0.0;
        let g = loop {
            match orbit_graph(&p, rho) {
                Ok(g) => break g,
                Err(Error::Disconnected(..)) => rho += 0.25,
                Err(e) => panic!("{e}"),
            }
        };
        assert!(g.certificate.lipschitz_holds);
    }

    #[test]
    fn svarc_milnor_examples() {
        let sm = svarc_milnor_generators(&ActionModel::BsTree, 0.0).unwrap();
        assert!(sm.membership(&GroupElement::Bs(BsElement::b())).unwrap());
        assert!(!sm.membership(&GroupElement::Bs(BsElement::b_pow(2))).unwrap());
        assert!(svarc_milnor_generators(&ActionModel::BsHalfPlane, 0.0).unwrap_err().to_string().contains("unsupported"));
        let mut rng = crate::rng::seeded(13);
        for _ in 0..100 {
            let g = GroupElement::Bs(random_bs(&mut rng, 20));
            let f = sm.factorize(&g).unwrap();
            assert!(f.len() as f64 <= f.displacement + 1.0);
            assert!(sm.verify(&f).unwrap());
        }
        let w = svarc_milnor_generators(&ActionModel::wreath_tree(2).unwrap(), 1.0).unwrap();
        let g = GroupElement::Wreath(crate::groups::WreathElement::parse("{-3:1, 2:1}@1", Some(2)).unwrap());
        assert!(w.verify(&w.factorize(&g).unwrap()).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn product_identity(seed in any::<u64>()) {
            let mut rng = crate::rng::seeded(seed);
            let t = random_tree(&mut rng, 15);
            let (x, y, z) = (rng.gen_range(0..15), rng.gen_range(0..15), rng.gen_range(0..15));
            prop_assert_eq!(gromov_product(x, y, z, &t) + gromov_product(x, z, y, &t), t.dist(y, z));
            prop_assert_eq!(gromov_product(x, y, z, &t), gromov_product(y, x, z, &t));
        }

        #[test]
        fn hausdorff_is_a_pseudometric(seed in any::<u64>()) {
            let mut rng = crate::rng::seeded(seed);
            let pts: Vec<(f64, f64)> = (0..12).map(|_| (rng.gen_range(-2.0..2.0), rng.gen_range(0.2..2.0))).collect();
            let p = PointCloud::from_half_plane(&pts).unwrap();
            let mut pick = || -> Vec<usize> {
                let mut v: Vec<usize> = (0..12).filter(|_| rng.gen_bool(0.4)).collect();
                v.push(rng.gen_range(0..12));
                v
            };
            let (a, b, c) = (pick(), pick(), pick());
            let ab = hausdorff(&a, &b, &p).unwrap();
            prop_assert_eq!(ab, hausdorff(&b, &a, &p).unwrap());
            prop_assert_eq!(hausdorff(&a, &a, &p).unwrap(), 0.0);
            prop_assert!(ab <= hausdorff(&a, &c, &p).unwrap() + hausdorff(&c, &b, &p).unwrap() + 1e-12);
        }

        #[test]
        fn chains_never_violate_with_measured_delta(seed in any::<u64>()) {
            let mut rng = crate::rng::seeded(seed);
            let t = random_tree(&mut rng, 25);
            let delta = four_point_delta(&t).delta;
            let chain: Vec<usize> = (0..rng.gen_range(2..7)).map(|_| rng.gen_range(0..25)).collect();
            let c = rng.gen_range(0.0..3.0);
            let r = broken_chain_check(&chain, c, delta, &t).unwrap();
            prop_assert_ne!(r.outcome, ChainOutcome::Violated);
        }
    }
}
