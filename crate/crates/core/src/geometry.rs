//! Scatterer shapes, contrast maps, sampling grids and the measurement circle.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of segments in the polyline used for kite membership and distance.
pub const KITE_SEGMENTS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x1: 0.0, x2: 0.0 };

    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2
    }

    pub fn norm(self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn dist(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn scale(self, s: f64) -> Point2 {
        Point2::new(s * self.x1, s * self.x2)
    }

    /// Counter-clockwise rotation about the origin.
    pub fn rotate(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x1 - s * self.x2, s * self.x1 + c * self.x2)
    }
}

impl std::ops::Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x1 - o.x1, self.x2 - o.x2)
    }
}

impl std::ops::Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x1 + o.x1, self.x2 + o.x2)
    }
}

impl std::ops::Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x1, -self.x2)
    }
}

/// A unit vector in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction2(Point2);

impl Direction2 {
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Direction2(Point2::new(c, s))
    }

    /// Normalizes `v`; fails for the zero vector.
    pub fn new(v: Point2) -> Result<Self> {
        let n = v.norm();
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::Domain("cannot normalize a zero or non-finite vector".into()));
        }
        Ok(Direction2(v.scale(1.0 / n)))
    }

    pub fn as_point(self) -> Point2 {
        self.0
    }

    pub fn x1(self) -> f64 {
        self.0.x1
    }

    pub fn x2(self) -> f64 {
        self.0.x2
    }

    pub fn angle(self) -> f64 {
        self.0.x2.atan2(self.0.x1)
    }

    pub fn dot(self, p: Point2) -> f64 {
        self.0.dot(p)
    }
}

impl std::ops::Neg for Direction2 {
    type Output = Direction2;
    fn neg(self) -> Direction2 {
        Direction2(-self.0)
    }
}

/// Point on the kite boundary for parameter `t`.
pub fn kite_boundary(t: f64) -> Point2 {
    Point2::new(
        ((t.cos() + 0.65 * (2.0 * t).cos()) - 0.65) / 2.0,
        1.5 * t.sin() / 2.5,
    )
}

/// Closed polygon given by its vertices (last vertex connects to the first).
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    vertices: Arc<Vec<Point2>>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point2>) -> Self {
        Self { vertices: Arc::new(vertices) }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let v = &self.vertices;
        (0..v.len()).map(move |i| (v[i], v[(i + 1) % v.len()]))
    }

    /// Winding-number membership test.
    pub fn contains(&self, p: Point2) -> bool {
        let mut winding = 0i32;
        for (a, b) in self.edges() {
            let cross = (b.x1 - a.x1) * (p.x2 - a.x2) - (p.x1 - a.x1) * (b.x2 - a.x2);
            if a.x2 <= p.x2 {
                if b.x2 > p.x2 && cross > 0.0 {
                    winding += 1;
                }
            } else if b.x2 <= p.x2 && cross < 0.0 {
                winding -= 1;
            }
        }
        winding != 0
    }

    pub fn boundary_distance(&self, p: Point2) -> f64 {
        self.edges()
            .map(|(a, b)| segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }
}

fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 > 0.0 { ((p - a).dot(ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    p.dist(a + ab.scale(t))
}

/// Scatterer geometry. Disks and rectangles are open sets.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Kite(Polygon),
    Disk { center: Point2, radius: f64 },
    Rectangle { center: Point2, half_widths: (f64, f64) },
    /// Open square `|x1|, |x2| < half_width` minus the closed disk of `cavity_radius`.
    SquareWithCavity { half_width: f64, cavity_radius: f64 },
    Union(Vec<Shape>),
    /// Points in the first shape but not in the closure of the second.
    Difference(Box<Shape>, Box<Shape>),
}

impl Shape {
    pub fn kite() -> Shape {
        let verts = (0..KITE_SEGMENTS)
            .map(|i| kite_boundary(TAU * i as f64 / KITE_SEGMENTS as f64))
            .collect();
        Shape::Kite(Polygon::new(verts))
    }

    pub fn disk(center: Point2, radius: f64) -> Shape {
        Shape::Disk { center, radius }
    }

    pub fn rectangle(center: Point2, half_widths: (f64, f64)) -> Shape {
        Shape::Rectangle { center, half_widths }
    }

    pub fn contains(&self, p: Point2) -> bool {
        match self {
            Shape::Kite(poly) => poly.contains(p),
            Shape::Disk { center, radius } => p.dist(*center) < *radius,
            Shape::Rectangle { center, half_widths } => {
                (p.x1 - center.x1).abs() < half_widths.0 && (p.x2 - center.x2).abs() < half_widths.1
            }
            Shape::SquareWithCavity { half_width, cavity_radius } => {
                p.x1.abs() < *half_width && p.x2.abs() < *half_width && p.norm() > *cavity_radius
            }
            Shape::Union(parts) => parts.iter().any(|s| s.contains(p)),
            Shape::Difference(a, b) => a.contains(p) && !b.contains_closure(p),
        }
    }

    fn contains_closure(&self, p: Point2) -> bool {
        match self {
            Shape::Disk { center, radius } => p.dist(*center) <= *radius,
            Shape::Rectangle { center, half_widths } => {
                (p.x1 - center.x1).abs() <= half_widths.0 && (p.x2 - center.x2).abs() <= half_widths.1
            }
            Shape::Union(parts) => parts.iter().any(|s| s.contains_closure(p)),
            other => other.contains(p) || other.distance(p) == 0.0,
        }
    }

    /// Euclidean distance from `p` to the shape; zero inside.
    pub fn distance(&self, p: Point2) -> f64 {
        match self {
            Shape::Kite(poly) => {
                if poly.contains(p) {
                    0.0
                } else {
                    poly.boundary_distance(p)
                }
            }
            Shape::Disk { center, radius } => (p.dist(*center) - radius).max(0.0),
            Shape::Rectangle { center, half_widths } => {
                let dx = ((p.x1 - center.x1).abs() - half_widths.0).max(0.0);
                let dy = ((p.x2 - center.x2).abs() - half_widths.1).max(0.0);
                dx.hypot(dy)
            }
            Shape::SquareWithCavity { half_width, cavity_radius } => {
                let outer = Shape::rectangle(Point2::ORIGIN, (*half_width, *half_width));
                let r = p.norm();
                if r <= *cavity_radius {
                    cavity_radius - r
                } else {
                    outer.distance(p)
                }
            }
            Shape::Union(parts) => parts.iter().map(|s| s.distance(p)).fold(f64::INFINITY, f64::min),
            Shape::Difference(a, b) => {
                if b.contains_closure(p) {
                    match b.as_ref() {
                        Shape::Disk { center, radius } => radius - p.dist(*center),
                        other => other.distance_to_boundary_from_inside(p),
                    }
                } else {
                    a.distance(p)
                }
            }
        }
    }

    fn distance_to_boundary_from_inside(&self, p: Point2) -> f64 {
        match self {
            Shape::Kite(poly) => poly.boundary_distance(p),
            Shape::Disk { center, radius } => (radius - p.dist(*center)).max(0.0),
            Shape::Rectangle { center, half_widths } => {
                let dx = half_widths.0 - (p.x1 - center.x1).abs();
                let dy = half_widths.1 - (p.x2 - center.x2).abs();
                dx.min(dy).max(0.0)
            }
            _ => 0.0,
        }
    }

    pub fn rotated(&self, angle: f64) -> Shape {
        match self {
            Shape::Kite(poly) => {
                Shape::Kite(Polygon::new(poly.vertices().iter().map(|v| v.rotate(angle)).collect()))
            }
            Shape::Disk { center, radius } => Shape::disk(center.rotate(angle), *radius),
            Shape::Rectangle { center, half_widths } => {
                // Only quarter turns keep a rectangle axis-aligned.
                let quarter = (angle / (PI / 2.0)).round();
                if (angle - quarter * PI / 2.0).abs() < 1e-12 {
                    let hw = if (quarter as i64).rem_euclid(2) == 1 {
                        (half_widths.1, half_widths.0)
                    } else {
                        *half_widths
                    };
                    Shape::rectangle(center.rotate(angle), hw)
                } else {
                    let (a, b) = *half_widths;
                    let corners = [(-a, -b), (a, -b), (a, b), (-a, b)]
                        .iter()
                        .map(|&(u, v)| (*center + Point2::new(u, v)).rotate(angle))
                        .collect();
                    Shape::Kite(Polygon::new(corners))
                }
            }
            Shape::SquareWithCavity { half_width, cavity_radius } => {
                let sq = Shape::rectangle(Point2::ORIGIN, (*half_width, *half_width));
                let cav = Shape::disk(Point2::ORIGIN, *cavity_radius);
                Shape::Difference(Box::new(sq.rotated(angle)), Box::new(cav))
            }
            Shape::Union(parts) => Shape::Union(parts.iter().map(|s| s.rotated(angle)).collect()),
            Shape::Difference(a, b) => Shape::Difference(Box::new(a.rotated(angle)), Box::new(b.rotated(angle))),
        }
    }

    pub fn translated(&self, offset: Point2) -> Shape {
        match self {
            Shape::Kite(poly) => Shape::Kite(Polygon::new(poly.vertices().iter().map(|v| *v + offset).collect())),
            Shape::Disk { center, radius } => Shape::disk(*center + offset, *radius),
            Shape::Rectangle { center, half_widths } => Shape::rectangle(*center + offset, *half_widths),
            Shape::SquareWithCavity { half_width, cavity_radius } => Shape::Difference(
                Box::new(Shape::rectangle(offset, (*half_width, *half_width))),
                Box::new(Shape::disk(offset, *cavity_radius)),
            ),
            Shape::Union(parts) => Shape::Union(parts.iter().map(|s| s.translated(offset)).collect()),
            Shape::Difference(a, b) => {
                Shape::Difference(Box::new(a.translated(offset)), Box::new(b.translated(offset)))
            }
        }
    }

    /// Radius of the smallest origin-centered disk containing the shape.
    pub fn extent(&self) -> f64 {
        match self {
            Shape::Kite(poly) => poly.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max),
            Shape::Disk { center, radius } => center.norm() + radius,
            Shape::Rectangle { center, half_widths } => {
                (center.x1.abs() + half_widths.0).hypot(center.x2.abs() + half_widths.1)
            }
            Shape::SquareWithCavity { half_width, .. } => half_width * std::f64::consts::SQRT_2,
            Shape::Union(parts) => parts.iter().map(Shape::extent).fold(0.0, f64::max),
            Shape::Difference(a, _) => a.extent(),
        }
    }
}

/// Axis-aligned box `[x1lo, x1hi] x [x2lo, x2hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub x1: (f64, f64),
    pub x2: (f64, f64),
}

impl BoundingBox {
    pub const fn square(half: f64) -> Self {
        Self { x1: (-half, half), x2: (-half, half) }
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x1 >= self.x1.0 && p.x1 <= self.x1.1 && p.x2 >= self.x2.0 && p.x2 <= self.x2.1
    }
}

/// Default solver box for every catalogue scatterer.
pub const DEFAULT_BOX: BoundingBox = BoundingBox::square(1.2);

/// Piecewise-constant contrast `eta`, zero outside all pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastMap {
    pieces: Vec<(Shape, Complex64)>,
    bbox: BoundingBox,
}

impl ContrastMap {
    pub fn new(pieces: Vec<(Shape, Complex64)>, bbox: BoundingBox) -> Result<Self> {
        for (i, (shape, eta)) in pieces.iter().enumerate() {
            if !(eta.re.is_finite() && eta.im.is_finite()) {
                return Err(Error::config(format!("pieces[{i}].eta"), "contrast must be finite"));
            }
            if eta.im < 0.0 {
                return Err(Error::config(
                    format!("pieces[{i}].eta"),
                    format!("imaginary part must be >= 0, got {}", eta.im),
                ));
            }
            let fits = shape_corners_inside(shape, &bbox);
            if !fits {
                return Err(Error::config(
                    format!("pieces[{i}]"),
                    "shape is not contained in the declared bounding box",
                ));
            }
        }
        Ok(Self { pieces, bbox })
    }

    /// Contrast that vanishes everywhere.
    pub fn empty() -> Self {
        Self { pieces: Vec::new(), bbox: DEFAULT_BOX }
    }

    pub fn homogeneous(shape: Shape, eta: Complex64) -> Result<Self> {
        Self::new(vec![(shape, eta)], DEFAULT_BOX)
    }

    pub fn kite() -> Self {
        Self::homogeneous(Shape::kite(), Complex64::new(0.5, 0.1)).expect("catalogue kite")
    }

    pub fn disk_rectangle() -> Self {
        let shape = Shape::Union(vec![
            Shape::disk(Point2::new(-0.6, 0.6), 0.4),
            Shape::rectangle(Point2::new(0.6, -0.6), (0.45, 0.25)),
        ]);
        Self::homogeneous(shape, Complex64::new(0.5, 0.0)).expect("catalogue disk_rectangle")
    }

    pub fn square_cavity() -> Self {
        let shape = Shape::SquareWithCavity { half_width: 0.5, cavity_radius: 0.3 };
        Self::homogeneous(shape, Complex64::new(1.0, 0.0)).expect("catalogue square_cavity")
    }

    /// Homogeneous disk, the medium with a closed-form scattering solution.
    pub fn disk(center: Point2, radius: f64, eta: Complex64) -> Result<Self> {
        Self::homogeneous(Shape::disk(center, radius), eta)
    }

    /// Looks up a catalogue medium by name.
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "kite" => Ok(Self::kite()),
            "disk_rectangle" => Ok(Self::disk_rectangle()),
            "square_cavity" => Ok(Self::square_cavity()),
            other => Err(Error::config(
                "medium",
                format!("unknown medium `{other}` (expected kite, disk_rectangle, square_cavity or disk)"),
            )),
        }
    }

    pub fn pieces(&self) -> &[(Shape, Complex64)] {
        &self.pieces
    }

    pub fn bbox(&self) -> BoundingBox {
        self.bbox
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.iter().all(|(_, eta)| *eta == Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, p: Point2) -> Complex64 {
        self.pieces
            .iter()
            .find(|(s, _)| s.contains(p))
            .map(|(_, eta)| *eta)
            .unwrap_or_default()
    }

    /// Whether `p` lies in the support of the contrast.
    pub fn support_contains(&self, p: Point2) -> bool {
        self.pieces.iter().any(|(s, eta)| *eta != Complex64::new(0.0, 0.0) && s.contains(p))
    }

    /// Distance from `p` to the support; zero inside.
    pub fn support_distance(&self, p: Point2) -> f64 {
        self.pieces
            .iter()
            .filter(|(_, eta)| *eta != Complex64::new(0.0, 0.0))
            .map(|(s, _)| s.distance(p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn support_radius(&self) -> f64 {
        self.pieces.iter().map(|(s, _)| s.extent()).fold(0.0, f64::max)
    }

    pub fn rotated(&self, angle: f64) -> Result<Self> {
        let pieces = self.pieces.iter().map(|(s, e)| (s.rotated(angle), *e)).collect();
        Self::new(pieces, self.bbox)
    }

    pub fn translated(&self, offset: Point2) -> Result<Self> {
        let pieces = self.pieces.iter().map(|(s, e)| (s.translated(offset), *e)).collect();
        Self::new(pieces, self.bbox)
    }

    pub fn scaled_contrast(&self, factor: f64) -> Self {
        Self {
            pieces: self.pieces.iter().map(|(s, e)| (s.clone(), e * factor)).collect(),
            bbox: self.bbox,
        }
    }
}

fn shape_corners_inside(shape: &Shape, bbox: &BoundingBox) -> bool {
    match shape {
        Shape::Kite(poly) => poly.vertices().iter().all(|v| bbox.contains(*v)),
        Shape::Rectangle { center, half_widths } => {
            bbox.contains(*center + Point2::new(half_widths.0, half_widths.1))
                && bbox.contains(*center - Point2::new(half_widths.0, half_widths.1))
        }
        Shape::Disk { center, radius } => {
            bbox.contains(*center + Point2::new(*radius, *radius))
                && bbox.contains(*center - Point2::new(*radius, *radius))
        }
        Shape::SquareWithCavity { half_width, .. } => {
            bbox.contains(Point2::new(*half_width, *half_width))
                && bbox.contains(Point2::new(-half_width, -half_width))
        }
        Shape::Union(parts) => parts.iter().all(|s| shape_corners_inside(s, bbox)),
        Shape::Difference(a, _) => shape_corners_inside(a, bbox),
    }
}

/// Rectangular grid of sampling points, endpoints included.
///
/// Points are ordered with `x1` varying fastest: index `i2 * n1 + i1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingGrid {
    pub x1: (f64, f64),
    pub x2: (f64, f64),
    pub n1: usize,
    pub n2: usize,
}

impl SamplingGrid {
    pub fn new(x1: (f64, f64), x2: (f64, f64), n1: usize, n2: usize) -> Result<Self> {
        if n1 < 2 || n2 < 2 {
            return Err(Error::config("grid", "sampling grid needs at least 2 points per axis"));
        }
        if !(x1.0 < x1.1 && x2.0 < x2.1) {
            return Err(Error::config("grid", "sampling ranges must be non-empty"));
        }
        Ok(Self { x1, x2, n1, n2 })
    }

    /// `(-2, 2)^2` with `n` points per axis.
    pub fn square(half: f64, n: usize) -> Result<Self> {
        Self::new((-half, half), (-half, half), n, n)
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coord1(&self, i1: usize) -> f64 {
        lerp(self.x1, i1, self.n1)
    }

    pub fn coord2(&self, i2: usize) -> f64 {
        lerp(self.x2, i2, self.n2)
    }

    pub fn point(&self, index: usize) -> Point2 {
        Point2::new(self.coord1(index % self.n1), self.coord2(index / self.n1))
    }

    pub fn points(&self) -> Vec<Point2> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    pub fn spacing(&self) -> (f64, f64) {
        (
            (self.x1.1 - self.x1.0) / (self.n1 - 1) as f64,
            (self.x2.1 - self.x2.0) / (self.n2 - 1) as f64,
        )
    }
}

fn lerp(range: (f64, f64), i: usize, n: usize) -> f64 {
    if i + 1 == n {
        range.1
    } else {
        range.0 + (range.1 - range.0) * i as f64 / (n - 1) as f64
    }
}

/// Angular interval `[lo, hi]`. A span of `2 pi` is the full circle and is
/// sampled half-open; anything shorter is sampled with both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aperture {
    pub lo: f64,
    pub hi: f64,
}

impl Aperture {
    pub const FULL: Aperture = Aperture { lo: 0.0, hi: TAU };
    /// Bottom half of the circle.
    pub const LOWER_HALF: Aperture = Aperture { lo: PI, hi: TAU };

    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo || hi - lo > TAU + 1e-12 {
            return Err(Error::config("aperture", format!("invalid angular interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_full(&self) -> bool {
        (self.length() - TAU).abs() < 1e-12
    }

    pub fn angles(&self, n: usize) -> Vec<f64> {
        if self.is_full() {
            (0..n).map(|j| self.lo + TAU * j as f64 / n as f64).collect()
        } else if n == 1 {
            vec![0.5 * (self.lo + self.hi)]
        } else {
            (0..n)
                .map(|j| {
                    if j + 1 == n {
                        self.hi
                    } else {
                        self.lo + self.length() * j as f64 / (n - 1) as f64
                    }
                })
                .collect()
        }
    }

    /// Uniform quadrature weight for `n` nodes on the unit circle.
    pub fn weight(&self, n: usize) -> f64 {
        self.length() / n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementCircle {
    pub radius: f64,
    pub n_receivers: usize,
    pub aperture: Aperture,
}

impl MeasurementCircle {
    pub fn new(radius: f64, n_receivers: usize, aperture: Aperture) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::config("radius", "measurement radius must be positive"));
        }
        if n_receivers == 0 {
            return Err(Error::config("n_receivers", "need at least one receiver"));
        }
        Ok(Self { radius, n_receivers, aperture })
    }

    pub fn full(radius: f64, n_receivers: usize) -> Result<Self> {
        Self::new(radius, n_receivers, Aperture::FULL)
    }

    /// Receiver positions with outward unit normals.
    pub fn receivers(&self) -> Vec<(Point2, Direction2)> {
        self.aperture
            .angles(self.n_receivers)
            .into_iter()
            .map(|t| {
                let nu = Direction2::from_angle(t);
                (nu.as_point().scale(self.radius), nu)
            })
            .collect()
    }

    /// Arc-length quadrature weight per receiver.
    pub fn weight(&self) -> f64 {
        self.radius * self.aperture.weight(self.n_receivers)
    }
}

pub fn incident_directions(n: usize, aperture: Aperture) -> Vec<Direction2> {
    aperture.angles(n).into_iter().map(Direction2::from_angle).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent polyline built directly from the parametrization.
    fn kite_polyline_oracle(p: Point2) -> bool {
        let n = 4096;
        let pts: Vec<Point2> = (0..n)
            .map(|i| {
                let t = TAU * i as f64 / n as f64;
                Point2::new((t.cos() + 0.65 * (2.0 * t).cos() - 0.65) / 2.0, 0.6 * t.sin())
            })
            .collect();
        // even-odd ray casting
        let mut inside = false;
        for i in 0..n {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            if (a.x2 > p.x2) != (b.x2 > p.x2) {
                let x = a.x1 + (p.x2 - a.x2) * (b.x1 - a.x1) / (b.x2 - a.x2);
                if p.x1 < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    #[test]
    fn kite_boundary_points() {
        let p = kite_boundary(0.0);
        assert!((p.x1 - 0.5).abs() < 1e-15 && p.x2.abs() < 1e-15);
        // cos(pi) = -1, cos(2 pi) = 1: (-1 + 0.65 - 0.65) / 2 = -0.5
        let p = kite_boundary(PI);
        assert!((p.x1 + 0.5).abs() < 1e-15 && p.x2.abs() < 1e-12);
        let p = kite_boundary(PI / 2.0);
        assert!((p.x1 + 0.65).abs() < 1e-15 && (p.x2 - 0.6).abs() < 1e-15);
        let (a, b) = (kite_boundary(0.0), kite_boundary(TAU));
        assert!(a.dist(b) < 1e-12);
    }

    #[test]
    fn contrast_eval_catalogue() {
        let kite = ContrastMap::kite();
        assert_eq!(kite.eval(Point2::new(5.0, 5.0)), Complex64::new(0.0, 0.0));
        assert!(kite_polyline_oracle(Point2::new(-0.3, 0.0)));
        assert_eq!(kite.eval(Point2::new(-0.3, 0.0)), Complex64::new(0.5, 0.1));
        let sq = ContrastMap::square_cavity();
        assert_eq!(sq.eval(Point2::ORIGIN), Complex64::new(0.0, 0.0));
        assert_eq!(sq.eval(Point2::new(0.4, 0.4)), Complex64::new(1.0, 0.0));
        assert_eq!(sq.eval(Point2::new(0.3, 0.0)), Complex64::new(0.0, 0.0));
        let dr = ContrastMap::disk_rectangle();
        assert_eq!(dr.eval(Point2::new(-0.6, 0.6)), Complex64::new(0.5, 0.0));
        assert_eq!(dr.eval(Point2::new(0.6, -0.6)), Complex64::new(0.5, 0.0));
        assert_eq!(dr.eval(Point2::ORIGIN), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn negative_imaginary_contrast_rejected() {
        let r = ContrastMap::disk(Point2::ORIGIN, 0.3, Complex64::new(0.5, -0.1));
        assert!(matches!(r, Err(Error::Config { .. })));
        let r = ContrastMap::disk(Point2::ORIGIN, 2.0, Complex64::new(0.5, 0.0));
        assert!(r.is_err());
    }

    #[test]
    fn receivers_full_circle() {
        let c = MeasurementCircle::full(3.0, 4).unwrap();
        let rx = c.receivers();
        let want = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
        for ((p, nu), t) in rx.iter().zip(want) {
            assert!((p.x1 - 3.0 * t.cos()).abs() < 1e-15);
            assert!((p.x2 - 3.0 * t.sin()).abs() < 1e-15);
            assert!((nu.x1() - p.x1 / 3.0).abs() < 1e-15 && (nu.x2() - p.x2 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn receivers_lower_half() {
        let c = MeasurementCircle::new(3.0, 32, Aperture::LOWER_HALF).unwrap();
        let rx = c.receivers();
        assert_eq!(rx.len(), 32);
        assert!(rx.iter().all(|(p, _)| p.x2 <= 1e-12));
        assert!((rx[0].0.x1 + 3.0).abs() < 1e-12);
        assert!((rx[31].0.x1 - 3.0).abs() < 1e-12);
        for (p, nu) in &rx {
            assert!((nu.as_point().norm() - 1.0).abs() < 1e-12);
            assert!((nu.dot(*p) - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn incident_directions_match_receivers() {
        let d = incident_directions(4, Aperture::FULL);
        assert!((d[1].x2() - 1.0).abs() < 1e-15);
        let d = incident_directions(32, Aperture::LOWER_HALF);
        assert!(d.iter().all(|v| v.x2() <= 1e-12));
        assert!(d.iter().all(|v| (v.as_point().norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn sampling_grid_layout() {
        let g = SamplingGrid::square(2.0, 96).unwrap();
        assert_eq!(g.len(), 9216);
        assert_eq!(g.point(0), Point2::new(-2.0, -2.0));
        assert_eq!(g.point(95), Point2::new(2.0, -2.0));
        assert_eq!(g.point(9215), Point2::new(2.0, 2.0));
        assert!(SamplingGrid::square(2.0, 1).is_err());
    }

    #[test]
    fn support_vanishes_on_box_boundary() {
        for map in [ContrastMap::kite(), ContrastMap::disk_rectangle(), ContrastMap::square_cavity()] {
            let b = map.bbox();
            for i in 0..=200 {
                let t = b.x1.0 + (b.x1.1 - b.x1.0) * i as f64 / 200.0;
                for p in [
                    Point2::new(t, b.x2.0),
                    Point2::new(t, b.x2.1),
                    Point2::new(b.x1.0, t),
                    Point2::new(b.x1.1, t),
                ] {
                    assert_eq!(map.eval(p), Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn distances() {
        let sq = Shape::SquareWithCavity { half_width: 0.5, cavity_radius: 0.3 };
        assert!((sq.distance(Point2::new(1.0, 0.0)) - 0.5).abs() < 1e-15);
        assert!((sq.distance(Point2::new(0.1, 0.0)) - 0.2).abs() < 1e-15);
        assert_eq!(sq.distance(Point2::new(0.4, 0.0)), 0.0);
        let k = Shape::kite();
        assert!((k.distance(Point2::new(1.5, 0.0)) - 1.0).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn difference_semantics(x in -1.2f64..1.2, y in -1.2f64..1.2) {
            let a = Shape::rectangle(Point2::ORIGIN, (0.7, 0.5));
            let b = Shape::disk(Point2::new(0.2, 0.1), 0.35);
            let d = Shape::Difference(Box::new(a.clone()), Box::new(b.clone()));
            let p = Point2::new(x, y);
            let in_b_closure = p.dist(Point2::new(0.2, 0.1)) <= 0.35;
            prop_assert_eq!(d.contains(p), a.contains(p) && !in_b_closure);
        }

        #[test]
        fn kite_membership_matches_ray_casting(x in -1.2f64..0.8, y in -0.8f64..0.8) {
            let p = Point2::new(x, y);
            let k = Shape::kite();
            // skip points within a hair of the polyline
            prop_assume!(k.distance(p) > 1e-9 || k.contains(p));
            prop_assert_eq!(k.contains(p), kite_polyline_oracle(p));
        }
    }
}
