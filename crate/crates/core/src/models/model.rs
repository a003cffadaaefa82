use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom;

/// Analytic ground-truth spaces, as serialized in experiment configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case")]
pub enum ModelSpace {
    /// Circle of the given radius in the plane of the first two coordinates
    /// through `center`; the embedding dimension is `center.len()`.
    Circle { center: Vec<f64>, radius: f64 },
    /// The trefoil knot `(sin t + 2 sin 2t, cos t - 2 cos 2t, -sin 3t)` scaled by `scale`.
    Trefoil { scale: f64 },
    /// A graph embedded with straight edges.
    EmbeddedGraph { vertices: Vec<Vec<f64>>, edges: Vec<[usize; 2]> },
}

impl ModelSpace {
    pub fn circle(radius: f64) -> Self {
        ModelSpace::Circle { center: vec![0.0, 0.0], radius }
    }

    /// Theta graph: vertices `(-1,0)` and `(1,0)` joined by the straight
    /// segment and by two bent arcs through `(0,1)` and `(0,-1)`.
    pub fn theta_graph() -> Self {
        ModelSpace::EmbeddedGraph {
            vertices: vec![vec![-1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            edges: vec![[0, 2], [2, 1], [0, 1], [0, 3], [3, 1]],
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ModelSpace::Circle { .. } => "circle",
            ModelSpace::Trefoil { .. } => "trefoil",
            ModelSpace::EmbeddedGraph { .. } => "embedded-graph",
        }
    }
}

/// Replacement values for the regularity constants. Used to probe how
/// verdicts react when a single hypothesis is forced to fail.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tube_radius: Option<f64>,
}

impl ConstantOverrides {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }
}

/// A model space together with optional constant overrides: the JSON record
/// `{kind, params, overrides?}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub space: ModelSpace,
    #[serde(default, skip_serializing_if = "ConstantOverrides::is_empty")]
    pub overrides: ConstantOverrides,
}

impl From<ModelSpace> for ModelSpec {
    fn from(space: ModelSpace) -> Self {
        Self { space, overrides: ConstantOverrides::default() }
    }
}

/// Regularity constants of a model: `eta` is the normal-slice injectivity
/// radius, `rho` the homotopy-closeness radius, `xi` the geodesic/chord
/// distortion bound valid below `delta`. The tube displacement bound is the
/// identity, `epsilon(r) = r`, for every model here since projection is
/// nearest-point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    pub eta: Option<f64>,
    pub rho: f64,
    pub delta: f64,
    pub xi: f64,
    pub tube_radius: f64,
    pub reach: Option<f64>,
    pub eta_over_reach: Option<f64>,
    pub epsilon_rule: String,
    pub method: String,
}

impl ModelConstants {
    /// `epsilon_r`: bound on `|pi(x) - x|` for `x` within `r` of the model.
    pub fn epsilon(&self, r: f64) -> f64 {
        r
    }
}

/// Nearest point on a model.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub point: Vec<f64>,
    /// Arc-length parameter of `point`.
    pub param: f64,
    pub distance: f64,
}

const TREFOIL_TABLE: usize = 4096;
const PROJECTION_SAMPLES: usize = 4096;
const SCAN_POINTS: usize = 2048;

/// A model space prepared for computation: arc-length tables, graph
/// shortest paths and lazily computed constants.
#[derive(Debug)]
pub struct Model {
    spec: ModelSpec,
    geometry: Geometry,
    length: f64,
    base: OnceLock<BaseConstants>,
}

#[derive(Debug)]
enum Geometry {
    Circle { center: Vec<f64>, radius: f64 },
    Trefoil { scale: f64, table: ArcTable },
    Graph(GraphGeometry),
}

#[derive(Clone, Debug)]
struct BaseConstants {
    eta: Option<f64>,
    rho: f64,
    default_delta: f64,
    tube_radius: f64,
    reach: Option<f64>,
    method: String,
}

impl Model {
    pub fn new(spec: impl Into<ModelSpec>) -> Result<Self> {
        let spec = spec.into();
        let (geometry, length) = match &spec.space {
            ModelSpace::Circle { center, radius } => {
                if center.len() < 2 {
                    return Err(Error::InvalidInput("circle needs an ambient dimension of at least 2".into()));
                }
                if !(*radius > 0.0) || !radius.is_finite() || center.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidInput(format!("invalid circle radius {radius}")));
                }
                (Geometry::Circle { center: center.clone(), radius: *radius }, 2.0 * PI * radius)
            }
            ModelSpace::Trefoil { scale } => {
                if !(*scale > 0.0) || !scale.is_finite() {
                    return Err(Error::InvalidInput(format!("invalid trefoil scale {scale}")));
                }
                let table = ArcTable::new(*scale);
                let len = table.length();
                (Geometry::Trefoil { scale: *scale, table }, len)
            }
            ModelSpace::EmbeddedGraph { vertices, edges } => {
                let g = GraphGeometry::new(vertices, edges)?;
                let len = g.total_length();
                (Geometry::Graph(g), len)
            }
        };
        Ok(Self { spec, geometry, length, base: OnceLock::new() })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        match &self.geometry {
            Geometry::Circle { center, .. } => center.len(),
            Geometry::Trefoil { .. } => 3,
            Geometry::Graph(g) => g.dim,
        }
    }

    /// Total arc length.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_closed_curve(&self) -> bool {
        !matches!(self.geometry, Geometry::Graph(_))
    }

    /// Betti numbers `b_0..=b_max` of the model.
    pub fn betti(&self, max_dim: usize) -> Vec<usize> {
        let (b0, b1) = match &self.geometry {
            Geometry::Graph(g) => {
                let c = g.components();
                (c, g.edges.len() + c - g.vertices.len())
            }
            _ => (1, 1),
        };
        (0..=max_dim).map(|m| match m {
            0 => b0,
            1 => b1,
            _ => 0,
        })
        .collect()
    }

    /// Point at arc-length parameter `s` (taken modulo the length for curves).
    pub fn point_at(&self, s: f64) -> Vec<f64> {
        match &self.geometry {
            Geometry::Circle { center, radius } => {
                let theta = s / radius;
                let mut p = center.clone();
                p[0] += radius * theta.cos();
                p[1] += radius * theta.sin();
                p
            }
            Geometry::Trefoil { scale, table } => {
                trefoil_pos(*scale, table.t_of_s(s.rem_euclid(self.length)))
            }
            Geometry::Graph(g) => {
                let (e, off) = g.locate(s);
                g.point_on(e, off)
            }
        }
    }

    /// Unit tangent at arc-length parameter `s`.
    pub fn tangent_at(&self, s: f64) -> Vec<f64> {
        match &self.geometry {
            Geometry::Circle { center, radius } => {
                let theta = s / radius;
                let mut t = vec![0.0; center.len()];
                t[0] = -theta.sin();
                t[1] = theta.cos();
                t
            }
            Geometry::Trefoil { scale, table } => {
                geom::normalize(&trefoil_d1(*scale, table.t_of_s(s.rem_euclid(self.length))))
            }
            Geometry::Graph(g) => {
                let (e, _) = g.locate(s);
                g.direction(e)
            }
        }
    }

    /// Intrinsic (geodesic) distance between the points at parameters `s1`, `s2`.
    pub fn geodesic(&self, s1: f64, s2: f64) -> f64 {
        match &self.geometry {
            Geometry::Graph(g) => g.geodesic(s1, s2),
            _ => {
                let d = (s1 - s2).rem_euclid(self.length);
                d.min(self.length - d)
            }
        }
    }

    /// Nearest point of the model to `x`.
    pub fn project(&self, x: &[f64]) -> Result<Projection> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: x.len() });
        }
        match &self.geometry {
            Geometry::Circle { center, radius } => {
                let v = geom::sub(x, center);
                let planar = v[0].hypot(v[1]);
                if planar <= 1e-12 * radius.max(1.0) {
                    return Err(Error::AmbiguousProjection {
                        point: x.to_vec(),
                        reason: "point lies on the axis through the circle center".into(),
                    });
                }
                let theta = v[1].atan2(v[0]).rem_euclid(2.0 * PI);
                let point = self.point_at(radius * theta);
                let distance = geom::dist(x, &point);
                Ok(Projection { point, param: (radius * theta).rem_euclid(self.length), distance })
            }
            Geometry::Trefoil { scale, table } => self.project_trefoil(*scale, table, x),
            Geometry::Graph(g) => g.project(x),
        }
    }

    fn project_trefoil(&self, scale: f64, table: &ArcTable, x: &[f64]) -> Result<Projection> {
        let h = 2.0 * PI / PROJECTION_SAMPLES as f64;
        let f: Vec<f64> = (0..PROJECTION_SAMPLES)
            .map(|k| {
                let p = trefoil_pos(scale, k as f64 * h);
                let d = geom::dist(&p, x);
                d * d
            })
            .collect();
        let best = f.iter().copied().fold(f64::INFINITY, f64::min).sqrt();
        // Max chord between neighbouring dithering samples bounds how far a
        // coarse value can sit above the true local minimum.
        let max_chord = table.max_speed() * h;
        let slack = (best + 2.0 * max_chord).powi(2);
        let n = PROJECTION_SAMPLES;
        let mut refined: Vec<(f64, f64)> = Vec::new();
        for k in 0..n {
            let prev = f[(k + n - 1) % n];
            let next = f[(k + 1) % n];
            if f[k] <= prev && f[k] <= next && f[k] <= slack {
                let t = refine_trefoil(scale, x, (k as f64 - 1.0) * h, (k as f64 + 1.0) * h);
                let d = geom::dist(&trefoil_pos(scale, t), x);
                refined.push((d, t.rem_euclid(2.0 * PI)));
            }
        }
        refined.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (d0, t0) = refined[0];
        let p0 = trefoil_pos(scale, t0);
        for &(d, t) in &refined[1..] {
            if d - d0 > 1e-9 {
                break;
            }
            if geom::dist(&trefoil_pos(scale, t), &p0) > 1e-7 {
                return Err(Error::AmbiguousProjection {
                    point: x.to_vec(),
                    reason: format!("two nearest points at parameters {t0} and {t}"),
                });
            }
        }
        Ok(Projection { point: p0, param: table.s_of_t(t0), distance: d0 })
    }

    /// Points along the model at arc spacing at most `spacing`. Graph
    /// discretizations include every vertex.
    pub fn discretize(&self, spacing: f64) -> Vec<Vec<f64>> {
        match &self.geometry {
            Geometry::Graph(g) => g.discretize(spacing),
            _ => {
                let m = (self.length / spacing).ceil().max(3.0) as usize;
                (0..m).map(|k| self.point_at(self.length * k as f64 / m as f64)).collect()
            }
        }
    }

    /// Largest geodesic distance from a model point to the nearest of the
    /// given parameters: the smallest `zeta` for which they are (weakly) `zeta`-dense.
    pub fn covering_radius(&self, params: &[f64]) -> f64 {
        if params.is_empty() {
            return f64::INFINITY;
        }
        match &self.geometry {
            Geometry::Graph(g) => g.covering_radius(params),
            _ => {
                let mut s: Vec<f64> = params.iter().map(|p| p.rem_euclid(self.length)).collect();
                s.sort_by(f64::total_cmp);
                let mut gap = self.length - (s[s.len() - 1] - s[0]);
                for w in s.windows(2) {
                    gap = gap.max(w[1] - w[0]);
                }
                gap / 2.0
            }
        }
    }

    fn base(&self) -> &BaseConstants {
        self.base.get_or_init(|| match &self.geometry {
            Geometry::Circle { radius, .. } => BaseConstants {
                eta: Some(2.0 * radius),
                rho: PI * radius,
                default_delta: 1.9 * radius,
                tube_radius: *radius,
                reach: Some(*radius),
                method: "analytic".into(),
            },
            Geometry::Trefoil { scale, table } => trefoil_base(*scale, table),
            Geometry::Graph(g) => g.base(),
        })
    }

    /// Default `delta` used when none is supplied.
    pub fn default_delta(&self) -> f64 {
        self.spec.overrides.delta.unwrap_or_else(|| self.base().default_delta)
    }

    /// Constants at the default `delta`, with overrides applied.
    pub fn constants(&self) -> Result<ModelConstants> {
        self.constants_at(self.default_delta())
    }

    /// Constants with the distortion bound `xi` evaluated at `delta`.
    pub fn constants_at(&self, delta: f64) -> Result<ModelConstants> {
        if !(delta > 0.0) {
            return Err(Error::InvalidInput(format!("delta must be positive, got {delta}")));
        }
        let base = self.base().clone();
        let xi = match &self.geometry {
            Geometry::Circle { radius, .. } => {
                if delta >= 2.0 * radius {
                    return Err(Error::InvalidInput(format!(
                        "delta {delta} must be below the circle diameter {}",
                        2.0 * radius
                    )));
                }
                2.0 * radius * (delta / (2.0 * radius)).asin() / delta
            }
            _ => self.numeric_xi(delta)?,
        };
        let o = &self.spec.overrides;
        let eta = o.eta.or(base.eta);
        let tube_radius = o.tube_radius.unwrap_or(base.tube_radius);
        let mut method = base.method;
        if !o.is_empty() {
            method.push_str(" (with overrides)");
        }
        Ok(ModelConstants {
            eta,
            rho: o.rho.unwrap_or(base.rho),
            delta,
            xi: o.xi.unwrap_or(xi),
            tube_radius,
            reach: base.reach,
            eta_over_reach: match (eta, base.reach) {
                (Some(e), Some(r)) => Some(e / r),
                _ => None,
            },
            epsilon_rule: "identity: epsilon_r = r".into(),
            method,
        })
    }

    /// Max of geodesic/chord ratio over scan pairs closer than `delta`, with
    /// a 1% margin.
    fn numeric_xi(&self, delta: f64) -> Result<f64> {
        let (pts, params) = self.scan_points();
        let diam = pts
            .iter()
            .flat_map(|p| pts.iter().map(move |q| geom::dist(p, q)))
            .fold(0.0, f64::max);
        if delta >= diam {
            return Err(Error::InvalidInput(format!(
                "delta {delta} must be below the model diameter {diam}"
            )));
        }
        let mut ratio: f64 = 1.0;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let e = geom::dist(&pts[i], &pts[j]);
                if e < delta && e > 0.0 {
                    ratio = ratio.max(self.geodesic(params[i], params[j]) / e);
                }
            }
        }
        Ok(ratio * 1.01)
    }

    fn scan_points(&self) -> (Vec<Vec<f64>>, Vec<f64>) {
        match &self.geometry {
            Geometry::Graph(g) => g.scan_points(SCAN_POINTS),
            _ => {
                let params: Vec<f64> =
                    (0..SCAN_POINTS).map(|k| self.length * k as f64 / SCAN_POINTS as f64).collect();
                (params.iter().map(|&s| self.point_at(s)).collect(), params)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Trefoil

fn trefoil_pos(s: f64, t: f64) -> Vec<f64> {
    vec![
        s * (t.sin() + 2.0 * (2.0 * t).sin()),
        s * (t.cos() - 2.0 * (2.0 * t).cos()),
        -s * (3.0 * t).sin(),
    ]
}

fn trefoil_d1(s: f64, t: f64) -> Vec<f64> {
    vec![
        s * (t.cos() + 4.0 * (2.0 * t).cos()),
        s * (-t.sin() + 4.0 * (2.0 * t).sin()),
        -3.0 * s * (3.0 * t).cos(),
    ]
}

fn trefoil_d2(s: f64, t: f64) -> Vec<f64> {
    vec![
        s * (-t.sin() - 8.0 * (2.0 * t).sin()),
        s * (-t.cos() + 8.0 * (2.0 * t).cos()),
        9.0 * s * (3.0 * t).sin(),
    ]
}

fn trefoil_speed(s: f64, t: f64) -> f64 {
    geom::norm(&trefoil_d1(s, t))
}

/// Golden-section on `[lo, hi]` followed by Newton polishing of
/// `(gamma(t) - x) . gamma'(t) = 0`.
fn refine_trefoil(scale: f64, x: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let f = |t: f64| {
        let d = geom::dist(&trefoil_pos(scale, t), x);
        d * d
    };
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > 1e-10 {
        if fa < fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..4 {
        let r = geom::sub(&trefoil_pos(scale, t), x);
        let d1 = trefoil_d1(scale, t);
        let d2 = trefoil_d2(scale, t);
        let gval = geom::dot(&r, &d1);
        let gder = geom::dot(&d1, &d1) + geom::dot(&r, &d2);
        if gder <= 0.0 {
            break;
        }
        let step = gval / gder;
        if step.abs() > 1e-6 {
            break;
        }
        t -= step;
    }
    t
}

/// Cumulative arc length of the trefoil on a uniform parameter grid, via
/// 5-point Gauss-Legendre per cell.
#[derive(Debug)]
struct ArcTable {
    scale: f64,
    cumulative: Vec<f64>,
    max_speed: f64,
}

impl ArcTable {
    fn new(scale: f64) -> Self {
        const NODES: [f64; 5] = [
            0.0,
            -0.538_469_310_105_683_1,
            0.538_469_310_105_683_1,
            -0.906_179_845_938_664,
            0.906_179_845_938_664,
        ];
        const WEIGHTS: [f64; 5] = [
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_5,
            0.478_628_670_499_366_5,
            0.236_926_885_056_189_1,
            0.236_926_885_056_189_1,
        ];
        let h = 2.0 * PI / TREFOIL_TABLE as f64;
        let mut cumulative = Vec::with_capacity(TREFOIL_TABLE + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        let mut max_speed: f64 = 0.0;
        for k in 0..TREFOIL_TABLE {
            let mid = (k as f64 + 0.5) * h;
            let cell: f64 = NODES
                .iter()
                .zip(WEIGHTS)
                .map(|(x, w)| w * trefoil_speed(scale, mid + 0.5 * h * x))
                .sum();
            acc += 0.5 * h * cell;
            cumulative.push(acc);
            max_speed = max_speed.max(trefoil_speed(scale, k as f64 * h));
        }
        Self { scale, cumulative, max_speed: max_speed * 1.01 }
    }

    fn length(&self) -> f64 {
        self.cumulative[TREFOIL_TABLE]
    }

    fn max_speed(&self) -> f64 {
        self.max_speed
    }

    fn h(&self) -> f64 {
        2.0 * PI / TREFOIL_TABLE as f64
    }

    /// Arc length from `t = 0` to `t` in `[0, 2 pi)`.
    fn s_of_t(&self, t: f64) -> f64 {
        let t = t.rem_euclid(2.0 * PI);
        let h = self.h();
        let k = ((t / h) as usize).min(TREFOIL_TABLE - 1);
        let t0 = k as f64 * h;
        // Gauss-Legendre on the partial cell.
        let half = 0.5 * (t - t0);
        let mid = t0 + half;
        let nodes = [0.0, -0.774_596_669_241_483_4, 0.774_596_669_241_483_4];
        let weights = [0.888_888_888_888_888_9, 0.555_555_555_555_555_6, 0.555_555_555_555_555_6];
        let part: f64 = nodes
            .iter()
            .zip(weights)
            .map(|(x, w)| w * trefoil_speed(self.scale, mid + half * x))
            .sum();
        self.cumulative[k] + half * part
    }

    fn t_of_s(&self, s: f64) -> f64 {
        let s = s.clamp(0.0, self.length());
        let k = match self.cumulative.binary_search_by(|c| c.total_cmp(&s)) {
            Ok(k) => return k as f64 * self.h(),
            Err(k) => k.saturating_sub(1).min(TREFOIL_TABLE - 1),
        };
        let (c0, c1) = (self.cumulative[k], self.cumulative[k + 1]);
        let mut t = (k as f64 + (s - c0) / (c1 - c0)) * self.h();
        for _ in 0..5 {
            let err = self.s_of_t(t) - s;
            t -= err / trefoil_speed(self.scale, t);
        }
        t
    }
}

fn trefoil_base(scale: f64, table: &ArcTable) -> BaseConstants {
    let len = table.length();
    let n = SCAN_POINTS;
    let params: Vec<f64> = (0..n).map(|k| len * k as f64 / n as f64).collect();
    let ts: Vec<f64> = params.iter().map(|&s| table.t_of_s(s)).collect();
    let pts: Vec<Vec<f64>> = ts.iter().map(|&t| trefoil_pos(scale, t)).collect();
    let tangents: Vec<Vec<f64>> = ts.iter().map(|&t| geom::normalize(&trefoil_d1(scale, t))).collect();

    // Normal-slice injectivity: for each p, the closest other curve point on
    // the normal plane at p. Sign changes of (q - p).T_p locate crossings.
    let mut eta_raw = f64::INFINITY;
    for i in 0..n {
        let f: Vec<f64> = pts.iter().map(|q| geom::dot(&geom::sub(q, &pts[i]), &tangents[i])).collect();
        for j in 0..n {
            let k = (j + 1) % n;
            if j == i || k == i || (j + n - 1) % n == i || (k + 1) % n == i {
                continue;
            }
            if f[j] == 0.0 || f[j].signum() != f[k].signum() {
                let (mut a, mut b) = (ts[j], if k == 0 { 2.0 * PI } else { ts[k] });
                let g = |t: f64| geom::dot(&geom::sub(&trefoil_pos(scale, t), &pts[i]), &tangents[i]);
                let ga = g(a);
                for _ in 0..60 {
                    let m = 0.5 * (a + b);
                    if g(m).signum() == ga.signum() {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                let q = trefoil_pos(scale, 0.5 * (a + b));
                eta_raw = eta_raw.min(geom::dist(&q, &pts[i]));
            }
        }
    }
    let kappa_max = (0..8 * n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / (8 * n) as f64;
            let d1 = trefoil_d1(scale, t);
            let d2 = trefoil_d2(scale, t);
            let c = cross(&d1, &d2);
            geom::norm(&c) / geom::norm(&d1).powi(3)
        })
        .fold(0.0, f64::max);
    let reach = (1.0 / kappa_max).min(eta_raw / 2.0);
    let eta = 0.98 * eta_raw;
    BaseConstants {
        eta: Some(eta),
        rho: len / 2.0,
        default_delta: eta / 2.0,
        tube_radius: 0.98 * reach,
        reach: Some(reach),
        method: format!(
            "numeric: {n}-point normal-plane scan (eta, 2% margin), curvature scan (reach), \
             pair scan (xi, 1% margin), rho = length/2"
        ),
    }
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

// ---------------------------------------------------------------------------
// Embedded graphs

#[derive(Debug)]
struct GraphGeometry {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    edges: Vec<[usize; 2]>,
    lengths: Vec<f64>,
    /// Arc offset at which each edge starts in the concatenated parameter.
    starts: Vec<f64>,
    /// All-pairs shortest paths between graph vertices.
    apsp: Vec<Vec<f64>>,
}

impl GraphGeometry {
    fn new(vertices: &[Vec<f64>], edges: &[[usize; 2]]) -> Result<Self> {
        let dim = vertices.first().map(Vec::len).ok_or(Error::Empty)?;
        if dim < 2 || vertices.iter().any(|v| v.len() != dim || v.iter().any(|c| !c.is_finite())) {
            return Err(Error::InvalidInput("graph vertices must share a dimension of at least 2".into()));
        }
        if edges.is_empty() {
            return Err(Error::InvalidInput("graph needs at least one edge".into()));
        }
        let nv = vertices.len();
        let mut lengths = Vec::new();
        let mut starts = Vec::new();
        let mut acc = 0.0;
        for &[a, b] in edges {
            if a >= nv || b >= nv || a == b {
                return Err(Error::InvalidInput(format!("invalid edge [{a}, {b}]")));
            }
            let l = geom::dist(&vertices[a], &vertices[b]);
            if l == 0.0 {
                return Err(Error::InvalidInput(format!("edge [{a}, {b}] has zero length")));
            }
            starts.push(acc);
            lengths.push(l);
            acc += l;
        }
        let mut apsp = vec![vec![f64::INFINITY; nv]; nv];
        for (v, row) in apsp.iter_mut().enumerate() {
            row[v] = 0.0;
        }
        for (&[a, b], &l) in edges.iter().zip(&lengths) {
            apsp[a][b] = apsp[a][b].min(l);
            apsp[b][a] = apsp[b][a].min(l);
        }
        for k in 0..nv {
            for i in 0..nv {
                for j in 0..nv {
                    let via = apsp[i][k] + apsp[k][j];
                    if via < apsp[i][j] {
                        apsp[i][j] = via;
                    }
                }
            }
        }
        Ok(Self { dim, vertices: vertices.to_vec(), edges: edges.to_vec(), lengths, starts, apsp })
    }

    fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    fn components(&self) -> usize {
        let nv = self.vertices.len();
        let mut seen = vec![false; nv];
        let mut count = 0;
        for v in 0..nv {
            if !seen[v] {
                count += 1;
                for w in 0..nv {
                    if self.apsp[v][w].is_finite() {
                        seen[w] = true;
                    }
                }
            }
        }
        count
    }

    /// Edge index and offset along it for a concatenated arc parameter.
    fn locate(&self, s: f64) -> (usize, f64) {
        let s = s.clamp(0.0, self.total_length());
        let e = match self.starts.binary_search_by(|x| x.total_cmp(&s)) {
            Ok(e) => e,
            Err(e) => e - 1,
        };
        (e, (s - self.starts[e]).min(self.lengths[e]))
    }

    fn point_on(&self, e: usize, offset: f64) -> Vec<f64> {
        let [a, b] = self.edges[e];
        geom::lerp(&self.vertices[a], &self.vertices[b], offset / self.lengths[e])
    }

    fn direction(&self, e: usize) -> Vec<f64> {
        let [a, b] = self.edges[e];
        geom::normalize(&geom::sub(&self.vertices[b], &self.vertices[a]))
    }

    fn geodesic(&self, s1: f64, s2: f64) -> f64 {
        let (e1, a) = self.locate(s1);
        let (e2, b) = self.locate(s2);
        let mut best = f64::INFINITY;
        if e1 == e2 {
            best = (a - b).abs();
        }
        let ends1 = [(self.edges[e1][0], a), (self.edges[e1][1], self.lengths[e1] - a)];
        let ends2 = [(self.edges[e2][0], b), (self.edges[e2][1], self.lengths[e2] - b)];
        for &(u, du) in &ends1 {
            for &(w, dw) in &ends2 {
                best = best.min(du + self.apsp[u][w] + dw);
            }
        }
        best
    }

    fn project(&self, x: &[f64]) -> Result<Projection> {
        let mut best: Option<(f64, usize, f64)> = None;
        let mut cands = Vec::with_capacity(self.edges.len());
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            let (d2, t) = geom::point_segment(x, &self.vertices[a], &self.vertices[b]);
            let d = d2.sqrt();
            cands.push((d, e, t));
            if best.map_or(true, |(bd, _, _)| d < bd) {
                best = Some((d, e, t));
            }
        }
        let (d, e, t) = best.expect("graph has edges");
        let point = self.point_on(e, t * self.lengths[e]);
        let tol = 1e-12 * (1.0 + d);
        for &(d2, e2, t2) in &cands {
            if e2 != e && (d2 - d).abs() <= tol {
                let other = self.point_on(e2, t2 * self.lengths[e2]);
                if geom::dist(&other, &point) > 1e-9 {
                    return Err(Error::AmbiguousProjection {
                        point: x.to_vec(),
                        reason: format!("equidistant from edges {e} and {e2}"),
                    });
                }
            }
        }
        Ok(Projection { point, param: self.starts[e] + t * self.lengths[e], distance: d })
    }

    fn discretize(&self, spacing: f64) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = self.vertices.clone();
        for (e, &l) in self.lengths.iter().enumerate() {
            let m = (l / spacing).ceil().max(1.0) as usize;
            for k in 1..m {
                out.push(self.point_on(e, l * k as f64 / m as f64));
            }
        }
        out
    }

    fn scan_points(&self, count: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
        let total = self.total_length();
        let mut params: Vec<f64> = (0..count).map(|k| total * k as f64 / count as f64).collect();
        params.extend(self.starts.iter().copied());
        params.extend(self.starts.iter().zip(&self.lengths).map(|(s, l)| s + l));
        let pts = params.iter().map(|&s| {
            let (e, off) = self.locate(s);
            self.point_on(e, off)
        });
        (pts.collect(), params)
    }

    fn covering_radius(&self, params: &[f64]) -> f64 {
        let nv = self.vertices.len();
        let mut on_edge: Vec<Vec<f64>> = vec![Vec::new(); self.edges.len()];
        let mut direct = vec![f64::INFINITY; nv];
        for &s in params {
            let (e, off) = self.locate(s);
            on_edge[e].push(off);
            let [a, b] = self.edges[e];
            direct[a] = direct[a].min(off);
            direct[b] = direct[b].min(self.lengths[e] - off);
        }
        let to_vertex: Vec<f64> = (0..nv)
            .map(|v| (0..nv).map(|u| direct[u] + self.apsp[u][v]).fold(f64::INFINITY, f64::min))
            .collect();
        let mut worst: f64 = 0.0;
        for (e, offs) in on_edge.iter_mut().enumerate() {
            let l = self.lengths[e];
            let [a, b] = self.edges[e];
            let mut pos = vec![-to_vertex[a], l + to_vertex[b]];
            pos.extend(offs.iter().copied());
            pos.sort_by(f64::total_cmp);
            for w in pos.windows(2) {
                let (p, q) = (w[0], w[1]);
                let (lo, hi) = (p.max(0.0), q.min(l));
                if lo > hi {
                    continue;
                }
                let m = (0.5 * (p + q)).clamp(lo, hi);
                worst = worst.max((m - p).min(q - m));
            }
        }
        worst
    }

    fn girth(&self) -> Option<f64> {
        let nv = self.vertices.len();
        let mut best = f64::INFINITY;
        for (skip, (&[a, b], &l)) in self.edges.iter().zip(&self.lengths).enumerate() {
            // Dijkstra from a to b without edge `skip`.
            let mut dist = vec![f64::INFINITY; nv];
            let mut done = vec![false; nv];
            dist[a] = 0.0;
            for _ in 0..nv {
                let u = (0..nv).filter(|&v| !done[v]).min_by(|&x, &y| dist[x].total_cmp(&dist[y]));
                let Some(u) = u else { break };
                if !dist[u].is_finite() {
                    break;
                }
                done[u] = true;
                for (f, (&[p, q], &w)) in self.edges.iter().zip(&self.lengths).enumerate() {
                    if f == skip {
                        continue;
                    }
                    let other = if p == u { q } else if q == u { p } else { continue };
                    if dist[u] + w < dist[other] {
                        dist[other] = dist[u] + w;
                    }
                }
            }
            best = best.min(dist[b] + l);
        }
        best.is_finite().then_some(best)
    }

    fn base(&self) -> BaseConstants {
        let girth = self.girth();
        let min_edge = self.lengths.iter().copied().fold(f64::INFINITY, f64::min);
        let mut separation = f64::INFINITY;
        for (i, &[a, b]) in self.edges.iter().enumerate() {
            for &[c, d] in &self.edges[i + 1..] {
                if a == c || a == d || b == c || b == d {
                    continue;
                }
                separation = separation.min(geom::segment_segment_dist(
                    &self.vertices[a],
                    &self.vertices[b],
                    &self.vertices[c],
                    &self.vertices[d],
                ));
            }
        }
        let tube = (0.5 * separation).min(0.5 * min_edge);
        BaseConstants {
            eta: None,
            rho: girth.map_or(self.total_length(), |g| g / 2.0),
            default_delta: girth.map_or(min_edge, |g| g / 5.0),
            tube_radius: tube,
            reach: None,
            method: "numeric: rho = girth/2, pair scan (xi, 1% margin), \
                     tube = half the separation of non-adjacent edges; eta undefined for graphs"
                .into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_projection_examples() {
        let m = Model::new(ModelSpace::circle(1.0)).unwrap();
        let p = m.project(&[2.0, 0.0]).unwrap();
        assert!(geom::dist(&p.point, &[1.0, 0.0]) < 1e-15);
        assert!(matches!(m.project(&[0.0, 0.0]), Err(Error::AmbiguousProjection { .. })));
    }

    #[test]
    fn circle_constants_examples() {
        let m = Model::new(ModelSpace::circle(1.0)).unwrap();
        let c = m.constants_at(1.0).unwrap();
        assert_eq!(c.eta, Some(2.0));
        assert!((c.xi - PI / 3.0).abs() < 1e-12);
        assert!((c.rho - PI).abs() < 1e-15);
        assert_eq!(c.epsilon(0.37), 0.37);
        assert!(m.constants_at(2.0).is_err());
    }

    #[test]
    fn spec_json_shape() {
        let spec: ModelSpec = serde_json::from_str(
            r#"{"kind":"circle","params":{"center":[0,0],"radius":1},"overrides":{"eta":0.5}}"#,
        )
        .unwrap();
        assert_eq!(spec.space, ModelSpace::circle(1.0));
        assert_eq!(spec.overrides.eta, Some(0.5));
        let json = serde_json::to_string(&ModelSpec::from(ModelSpace::Trefoil { scale: 2.0 })).unwrap();
        assert_eq!(json, r#"{"kind":"trefoil","params":{"scale":2.0}}"#);
    }

    #[test]
    fn trefoil_projection_fixed_point() {
        let m = Model::new(ModelSpace::Trefoil { scale: 1.0 }).unwrap();
        for k in 0..7 {
            let s = m.length() * (k as f64 + 0.13) / 7.0;
            let x = m.point_at(s);
            let p = m.project(&x).unwrap();
            assert!(geom::dist(&p.point, &x) < 1e-9, "k={k}: {}", geom::dist(&p.point, &x));
            assert!(m.geodesic(p.param, s) < 1e-8);
        }
    }

    #[test]
    fn trefoil_arc_table_is_consistent() {
        let m = Model::new(ModelSpace::Trefoil { scale: 1.0 }).unwrap();
        let Geometry::Trefoil { table, .. } = &m.geometry else { unreachable!() };
        for k in 0..20 {
            let s = m.length() * k as f64 / 20.0;
            assert!((table.s_of_t(table.t_of_s(s)) - s).abs() < 1e-10);
        }
        // Chord between close parameters approximates the arc.
        let (a, b) = (3.0, 3.001);
        let chord = geom::dist(&m.point_at(a), &m.point_at(b));
        assert!((chord - 0.001).abs() < 1e-6);
    }

    #[test]
    fn theta_graph_geometry() {
        let m = Model::new(ModelSpace::theta_graph()).unwrap();
        assert_eq!(m.betti(1), vec![1, 2]);
        let top = m.project(&[0.0, 1.2]).unwrap();
        assert!(geom::dist(&top.point, &[0.0, 1.0]) < 1e-12);
        // From the apex (0,1) to the middle of the straight edge (0,0).
        let mid = m.project(&[0.0, 0.01]).unwrap();
        let d = m.geodesic(top.param, mid.param);
        assert!((d - (2f64.sqrt() + 1.0)).abs() < 1e-12);
        let c = m.constants().unwrap();
        assert!((c.rho - (1.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!(c.eta.is_none());
    }

    #[test]
    fn graph_covering_radius_counts_vertices() {
        let m = Model::new(ModelSpec::from(ModelSpace::EmbeddedGraph {
            vertices: vec![vec![0.0, 0.0], vec![1.0, 0.0]],
            edges: vec![[0, 1]],
        }))
        .unwrap();
        assert!((m.covering_radius(&[0.5]) - 0.5).abs() < 1e-15);
        assert!((m.covering_radius(&[0.0, 1.0]) - 0.5).abs() < 1e-15);
        assert!((m.covering_radius(&[0.0]) - 1.0).abs() < 1e-15);
    }
}
