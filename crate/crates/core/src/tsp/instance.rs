use std::fmt;

use rand::Rng;
use rand_distr::{Distribution, Normal, Triangular};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Minimum allowed distance between two generated points.
pub const MIN_SEPARATION: f64 = 1e-9;
const MAX_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Shape {
    /// `[0,1] x [0,1]`.
    UnitSquare,
    /// `[0,w] x [0,h]`.
    Rectangle { w: f64, h: f64 },
    /// Disc of radius `r` centred at `(r, r)`.
    Circle { r: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointLaw {
    Uniform,
    /// Normal centred on the region centre, sd = 0.15 of the smaller extent,
    /// truncated to the region by rejection.
    Gaussian,
    /// Symmetric triangular law on each axis with its mode at the centre,
    /// truncated to the region by rejection.
    Triangular,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub shape: Shape,
    pub law: PointLaw,
}

impl Default for RegionSpec {
    fn default() -> Self {
        Self::unit_square()
    }
}

impl RegionSpec {
    pub fn unit_square() -> Self {
        Self { shape: Shape::UnitSquare, law: PointLaw::Uniform }
    }

    fn extent(&self) -> (f64, f64) {
        match self.shape {
            Shape::UnitSquare => (1.0, 1.0),
            Shape::Rectangle { w, h } => (w, h),
            Shape::Circle { r } => (2.0 * r, 2.0 * r),
        }
    }

    fn validate(&self) -> Result<()> {
        let (w, h) = self.extent();
        if !(w > 0.0 && h > 0.0 && w.is_finite() && h.is_finite()) {
            return Err(Error::invalid(format!("region extent must be positive and finite, got {self}")));
        }
        Ok(())
    }

    pub fn contains(&self, [x, y]: [f64; 2]) -> bool {
        match self.shape {
            Shape::Circle { r } => {
                let (dx, dy) = (x - r, y - r);
                dx * dx + dy * dy <= r * r
            }
            _ => {
                let (w, h) = self.extent();
                (0.0..=w).contains(&x) && (0.0..=h).contains(&y)
            }
        }
    }

    fn sample_point<R: Rng>(&self, rng: &mut R) -> [f64; 2] {
        let (w, h) = self.extent();
        loop {
            let p = match self.law {
                PointLaw::Uniform => match self.shape {
                    Shape::Circle { r } => {
                        let rad = r * rng.random::<f64>().sqrt();
                        let theta = std::f64::consts::TAU * rng.random::<f64>();
                        [r + rad * theta.cos(), r + rad * theta.sin()]
                    }
                    _ => [w * rng.random::<f64>(), h * rng.random::<f64>()],
                },
                PointLaw::Gaussian => {
                    let sd = 0.15 * w.min(h);
                    let nx = Normal::new(0.5 * w, sd).expect("positive sd");
                    let ny = Normal::new(0.5 * h, sd).expect("positive sd");
                    [nx.sample(rng), ny.sample(rng)]
                }
                PointLaw::Triangular => {
                    let tx = Triangular::new(0.0, w, 0.5 * w).expect("valid triangle");
                    let ty = Triangular::new(0.0, h, 0.5 * h).expect("valid triangle");
                    [tx.sample(rng), ty.sample(rng)]
                }
            };
            if self.contains(p) {
                return p;
            }
        }
    }
}

impl fmt::Display for RegionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let law = match self.law {
            PointLaw::Uniform => "uniform",
            PointLaw::Gaussian => "gaussian",
            PointLaw::Triangular => "triangular",
        };
        match self.shape {
            Shape::UnitSquare => write!(f, "unit-square/{law}"),
            Shape::Rectangle { w, h } => write!(f, "rectangle({w},{h})/{law}"),
            Shape::Circle { r } => write!(f, "circle({r})/{law}"),
        }
    }
}

/// A Euclidean TSP instance with a dense distance table.
#[derive(Debug, Clone)]
pub struct Instance {
    seed: u64,
    region: RegionSpec,
    points: Vec<[f64; 2]>,
    dist: Vec<f64>,
}

/// On-disk form of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub seed: u64,
    pub n: usize,
    pub region: RegionSpec,
    pub points: Vec<[f64; 2]>,
}

impl Instance {
    /// Sample `n` i.i.d. points from `region`, deterministically in `seed`.
    pub fn generate(n: usize, region: RegionSpec, seed: u64) -> Result<Self> {
        if n < 3 {
            return Err(Error::invalid(format!("instance needs at least 3 vertices, got {n}")));
        }
        region.validate()?;
        let mut rng = rng::stream(seed, &[rng::tag::INSTANCE]);
        let mut points: Vec<[f64; 2]> = Vec::with_capacity(n);
        for index in 0..n {
            let mut placed = false;
            for _ in 0..MAX_ATTEMPTS {
                let p = region.sample_point(&mut rng);
                if points.iter().all(|q| euclid(*q, p) >= MIN_SEPARATION) {
                    points.push(p);
                    placed = true;
                    break;
                }
            }
            if !placed {
                return Err(Error::DegenerateRegion { index, attempts: MAX_ATTEMPTS });
            }
        }
        Self::build(seed, region, points)
    }

    /// Build an instance from explicit coordinates.
    pub fn from_points(points: Vec<[f64; 2]>) -> Result<Self> {
        Self::build(0, RegionSpec::unit_square(), points)
    }

    fn build(seed: u64, region: RegionSpec, points: Vec<[f64; 2]>) -> Result<Self> {
        let n = points.len();
        if n < 3 {
            return Err(Error::invalid(format!("instance needs at least 3 vertices, got {n}")));
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = euclid(points[i], points[j]);
                if !(d >= MIN_SEPARATION) {
                    return Err(Error::invalid(format!("points {i} and {j} are closer than {MIN_SEPARATION}")));
                }
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Ok(Self { seed, region, points, dist })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn region(&self) -> RegionSpec {
        self.region
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n() + j]
    }

    /// Row `i` of the distance table.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n();
        &self.dist[i * n..(i + 1) * n]
    }

    /// Key identifying a generated instance for caching.
    pub fn cache_key(&self) -> String {
        format!("{}:{}:{}", self.seed, self.n(), self.region)
    }

    /// Same instance with every coordinate multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::invalid("scale factor must be positive"));
        }
        let points = self.points.iter().map(|&[x, y]| [c * x, c * y]).collect();
        Self::build(self.seed, self.region, points)
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile { seed: self.seed, n: self.n(), region: self.region, points: self.points.clone() }
    }

    pub fn from_file(file: InstanceFile) -> Result<Self> {
        if file.points.len() != file.n {
            return Err(Error::invalid(format!("instance file declares n={} but has {} points", file.n, file.points.len())));
        }
        Self::build(file.seed, file.region, file.points)
    }
}

#[inline]
fn euclid(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}
