//! Planar vectors and sets of headings on the circle.
//!
//! Heading sets are stored as sorted, disjoint closed intervals of
//! `[-π, π]`. An arc that crosses the `±π` seam is held as two pieces
//! internally and reported as a single wrap arc by [`AngularIntervalSet::arcs`],
//! so two sets covering the same headings always compare equal.

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Pieces closer than this are merged; pieces narrower than this are dropped.
pub const MERGE_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector pointing along `angle`.
    pub fn from_angle(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { x: c, y: s }
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    /// Angle of this vector, in `(-π, π]`.
    pub fn angle(self) -> f64 {
        normalize_angle(self.y.atan2(self.x))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Maps any finite angle into `(-π, π]`.
pub fn normalize_angle(angle: f64) -> f64 {
    let r = angle.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Signed shortest rotation from `from` to `to`, in `(-π, π]`.
pub fn angle_diff(to: f64, from: f64) -> f64 {
    normalize_angle(to - from)
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Vec2,
    pub max: Vec2,
}

impl Rect {
    pub fn new(min: Vec2, max: Vec2) -> Self {
        Self { min, max }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.width() > 0.0 && self.height() > 0.0)
    }

    /// True when the closed disc lies entirely inside the rectangle.
    pub fn contains_disc(&self, center: Vec2, radius: f64) -> bool {
        center.x - radius >= self.min.x
            && center.x + radius <= self.max.x
            && center.y - radius >= self.min.y
            && center.y + radius <= self.max.y
    }

    /// The four boundary edges, counter-clockwise from the bottom edge.
    pub fn edges(&self) -> [(Vec2, Vec2); 4] {
        let a = self.min;
        let b = Vec2::new(self.max.x, self.min.y);
        let c = self.max;
        let d = Vec2::new(self.min.x, self.max.y);
        [(a, b), (b, c), (c, d), (d, a)]
    }
}

/// A contiguous run of headings starting at `start` and sweeping
/// counter-clockwise through `width` radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: f64,
    pub width: f64,
}

impl Arc {
    /// Builds an arc, normalizing `start` into `(-π, π]` and clamping
    /// `width` to `[0, 2π]`.
    pub fn new(start: f64, width: f64) -> Self {
        Self {
            start: normalize_angle(start),
            width: width.clamp(0.0, TAU),
        }
    }

    pub fn centered(center: f64, half_width: f64) -> Self {
        Self::new(center - half_width, 2.0 * half_width)
    }

    pub fn full() -> Self {
        Self { start: PI, width: TAU }
    }

    pub fn end(&self) -> f64 {
        self.start + self.width
    }

    pub fn center(&self) -> f64 {
        normalize_angle(self.start + 0.5 * self.width)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.width
    }

    pub fn contains(&self, angle: f64, tol: f64) -> bool {
        if self.width >= TAU - tol {
            return true;
        }
        let offset = (angle - self.start).rem_euclid(TAU);
        offset <= self.width + tol || offset >= TAU - tol
    }
}

/// Union of disjoint arcs on the circle.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AngularIntervalSet {
    // Sorted, disjoint, non-touching pieces of [-π, π].
    pieces: Vec<(f64, f64)>,
}

impl AngularIntervalSet {
    pub fn empty() -> Self {
        Self { pieces: Vec::new() }
    }

    pub fn full() -> Self {
        Self {
            pieces: vec![(-PI, PI)],
        }
    }

    pub fn from_arc(arc: Arc) -> Self {
        let mut pieces = Vec::with_capacity(2);
        push_arc_pieces(&mut pieces, arc);
        Self::from_pieces(pieces)
    }

    pub fn from_arcs<I: IntoIterator<Item = Arc>>(arcs: I) -> Self {
        let mut pieces = Vec::new();
        for arc in arcs {
            push_arc_pieces(&mut pieces, arc);
        }
        Self::from_pieces(pieces)
    }

    fn from_pieces(mut pieces: Vec<(f64, f64)>) -> Self {
        pieces.retain(|&(lo, hi)| hi - lo > MERGE_EPS);
        pieces.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
        for (lo, hi) in pieces {
            match merged.last_mut() {
                Some(last) if lo <= last.1 + MERGE_EPS => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        Self { pieces: merged }
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.measure() >= TAU - 2.0 * MERGE_EPS
    }

    /// Total angular measure in radians.
    pub fn measure(&self) -> f64 {
        self.pieces.iter().map(|(lo, hi)| hi - lo).sum()
    }

    /// Canonical arc list: ordered by start angle, at most one arc crossing
    /// the `±π` seam.
    pub fn arcs(&self) -> Vec<Arc> {
        let n = self.pieces.len();
        if n == 0 {
            return Vec::new();
        }
        if self.is_full() {
            return vec![Arc::full()];
        }
        let first = self.pieces[0];
        let last = self.pieces[n - 1];
        let wraps = n >= 2 && first.0 <= -PI + MERGE_EPS && last.1 >= PI - MERGE_EPS;
        let mut arcs = Vec::with_capacity(n);
        let inner = if wraps {
            &self.pieces[1..n - 1]
        } else {
            &self.pieces[..]
        };
        arcs.extend(inner.iter().map(|&(lo, hi)| Arc::new(lo, hi - lo)));
        if wraps {
            arcs.push(Arc::new(last.0, (PI - last.0) + (first.1 + PI)));
        }
        arcs.sort_by(|a, b| a.start.total_cmp(&b.start));
        arcs
    }

    /// Membership with an angular tolerance on the piece boundaries.
    pub fn contains(&self, angle: f64, tol: f64) -> bool {
        let a = normalize_angle(angle);
        self.pieces.iter().any(|&(lo, hi)| {
            [a, a - TAU, a + TAU]
                .iter()
                .any(|&x| x >= lo - tol && x <= hi + tol)
        })
    }

    /// Angular distance from `angle` to the nearest boundary of the set.
    /// Infinite for the empty and the full set.
    pub fn distance_to_boundary(&self, angle: f64) -> f64 {
        self.arcs()
            .iter()
            .filter(|arc| arc.width < TAU)
            .flat_map(|arc| [arc.start, arc.end()])
            .map(|b| angle_diff(angle, b).abs())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut pieces = self.pieces.clone();
        pieces.extend_from_slice(&other.pieces);
        Self::from_pieces(pieces)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.pieces.len() && j < other.pieces.len() {
            let (a_lo, a_hi) = self.pieces[i];
            let (b_lo, b_hi) = other.pieces[j];
            let lo = a_lo.max(b_lo);
            let hi = a_hi.min(b_hi);
            if hi > lo {
                out.push((lo, hi));
            }
            if a_hi < b_hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_pieces(out)
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.pieces.len() + 1);
        let mut cursor = -PI;
        for &(lo, hi) in &self.pieces {
            if lo > cursor {
                out.push((cursor, lo));
            }
            cursor = cursor.max(hi);
        }
        if cursor < PI {
            out.push((cursor, PI));
        }
        Self::from_pieces(out)
    }

    /// `self \ other`.
    pub fn difference(&self, other: &Self) -> Self {
        if other.is_empty() || self.is_empty() {
            return self.clone();
        }
        self.intersection(&other.complement())
    }

    pub fn subtract_arc(&self, arc: Arc) -> Self {
        self.difference(&Self::from_arc(arc))
    }

    /// Draws a heading uniformly (by measure) from the set.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<f64> {
        let total = self.measure();
        if total <= 0.0 {
            return None;
        }
        let mut u = rng.gen::<f64>() * total;
        for &(lo, hi) in &self.pieces {
            let w = hi - lo;
            if u < w {
                return Some(normalize_angle(lo + u));
            }
            u -= w;
        }
        self.pieces.last().map(|&(_, hi)| normalize_angle(hi))
    }
}

fn push_arc_pieces(out: &mut Vec<(f64, f64)>, arc: Arc) {
    if arc.width >= TAU {
        out.push((-PI, PI));
        return;
    }
    let start = normalize_angle(arc.start);
    let end = start + arc.width;
    if end <= PI {
        out.push((start, end));
    } else {
        out.push((start, PI));
        out.push((-PI, end - TAU));
    }
}
