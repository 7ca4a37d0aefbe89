//! Points and distances on the square torus `[0, L)²`.

/// A point in the plane, metres.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Reduces `v` into `[0, side)`.
pub fn wrap(v: f64, side: f64) -> f64 {
    let w = v.rem_euclid(side);
    // rem_euclid can round up to exactly `side` for tiny negative inputs
    if w >= side {
        0.0
    } else {
        w
    }
}

/// Shortest signed displacement along one axis of a circle of length `side`.
#[inline]
pub fn axis_delta(a: f64, b: f64, side: f64) -> f64 {
    let mut d = (b - a).abs();
    if d > 0.5 * side {
        d = side - d;
    }
    d
}

/// Signed shortest displacement from `a` to `b` along one axis, in
/// `[-side/2, side/2]`.
#[inline]
pub fn signed_delta(a: f64, b: f64, side: f64) -> f64 {
    let d = b - a;
    d - side * (d / side).round()
}

/// Squared wrap-around distance.
#[inline]
pub fn torus_dist2(a: Point, b: Point, side: f64) -> f64 {
    let dx = axis_delta(a.x, b.x, side);
    let dy = axis_delta(a.y, b.y, side);
    dx * dx + dy * dy
}

/// Wrap-around (toroidal) Euclidean distance.
#[inline]
pub fn torus_dist(a: Point, b: Point, side: f64) -> f64 {
    torus_dist2(a, b, side).sqrt()
}
