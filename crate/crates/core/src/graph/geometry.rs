//! Plane geometry for drawn interaction graphs.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, o: Point) -> f64 {
        ((self.x - o.x).powi(2) + (self.y - o.y).powi(2)).sqrt()
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        Point::new(self.x + (o.x - self.x) * t, self.y + (o.y - self.y) * t)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn as_int(self) -> Option<(i64, i64)> {
        const LIM: f64 = (1u64 << 40) as f64;
        let ok = |v: f64| v.fract() == 0.0 && v.abs() < LIM;
        (ok(self.x) && ok(self.y)).then(|| (self.x as i64, self.y as i64))
    }
}

/// Sign of the orientation of `(a, b, c)`: positive for counter-clockwise.
/// Exact when all coordinates are integers.
pub fn orient(a: Point, b: Point, c: Point) -> i8 {
    if let (Some(a), Some(b), Some(c)) = (a.as_int(), b.as_int(), c.as_int()) {
        let v = (b.0 - a.0) as i128 * (c.1 - a.1) as i128 - (b.1 - a.1) as i128 * (c.0 - a.0) as i128;
        return v.signum() as i8;
    }
    let v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    let scale = (b.x - a.x).abs().max((b.y - a.y).abs()) * (c.x - a.x).abs().max((c.y - a.y).abs());
    if v.abs() <= 1e-12 * scale {
        0
    } else if v > 0.0 {
        1
    } else {
        -1
    }
}

fn on_segment(p: Point, a: Point, b: Point) -> bool {
    orient(a, b, p) == 0
        && p.x >= a.x.min(b.x)
        && p.x <= a.x.max(b.x)
        && p.y >= a.y.min(b.y)
        && p.y <= a.y.max(b.y)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Intersection {
    /// Single shared point.
    Point(Point),
    /// Collinear overlap; carries the midpoint of the shared stretch.
    Overlap(Point),
}

impl Intersection {
    pub fn point(self) -> Point {
        match self {
            Intersection::Point(p) | Intersection::Overlap(p) => p,
        }
    }
}

/// Intersection of closed segments `ab` and `cd`.
pub fn segment_intersection(a: Point, b: Point, c: Point, d: Point) -> Option<Intersection> {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    if o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0 {
        // Collinear: project on the dominant axis.
        let key = |p: Point| if (b.x - a.x).abs() >= (b.y - a.y).abs() { p.x } else { p.y };
        let (mut s1, mut s2) = ((key(a), a), (key(b), b));
        if s1.0 > s2.0 {
            std::mem::swap(&mut s1, &mut s2);
        }
        let (mut t1, mut t2) = ((key(c), c), (key(d), d));
        if t1.0 > t2.0 {
            std::mem::swap(&mut t1, &mut t2);
        }
        let lo = if s1.0 >= t1.0 { s1 } else { t1 };
        let hi = if s2.0 <= t2.0 { s2 } else { t2 };
        return match lo.0.partial_cmp(&hi.0)? {
            std::cmp::Ordering::Greater => None,
            std::cmp::Ordering::Equal => Some(Intersection::Point(lo.1)),
            std::cmp::Ordering::Less => Some(Intersection::Overlap(lo.1.lerp(hi.1, 0.5))),
        };
    }
    let proper = o1 * o2 < 0 && o3 * o4 < 0;
    let touching = (o1 == 0 && on_segment(c, a, b))
        || (o2 == 0 && on_segment(d, a, b))
        || (o3 == 0 && on_segment(a, c, d))
        || (o4 == 0 && on_segment(b, c, d));
    if !proper && !touching {
        return None;
    }
    let den = (b.x - a.x) * (d.y - c.y) - (b.y - a.y) * (d.x - c.x);
    let t = ((c.x - a.x) * (d.y - c.y) - (c.y - a.y) * (d.x - c.x)) / den;
    Some(Intersection::Point(a.lerp(b, t.clamp(0.0, 1.0))))
}

/// Convex hull in counter-clockwise order (collinear points dropped).
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut p: Vec<Point> = points.to_vec();
    p.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
    p.dedup();
    if p.len() <= 2 {
        return p;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> =
            if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for &q in iter {
            while hull.len() >= start + 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    if hull.len() < 2 {
        // All points collinear: keep the extremes.
        return vec![p[0], p[p.len() - 1]];
    }
    hull
}

/// Shoelace area of a simple polygon.
pub fn polygon_area(poly: &[Point]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        s += a.x * b.y - b.x * a.y;
    }
    s.abs() / 2.0
}

fn edges(poly: &[Point]) -> Vec<(Point, Point)> {
    match poly.len() {
        0 | 1 => Vec::new(),
        2 => vec![(poly[0], poly[1])],
        n => (0..n).map(|i| (poly[i], poly[(i + 1) % n])).collect(),
    }
}

/// Point inside or on the boundary of a convex hull.
pub fn in_convex(poly: &[Point], p: Point) -> bool {
    match poly.len() {
        0 => false,
        1 => poly[0] == p,
        2 => on_segment(p, poly[0], poly[1]),
        n => (0..n).all(|i| orient(poly[i], poly[(i + 1) % n], p) >= 0),
    }
}

/// Whether two convex hulls share at least one point.
pub fn hulls_intersect(a: &[Point], b: &[Point]) -> bool {
    let (ea, eb) = (edges(a), edges(b));
    if ea.iter().any(|&(p, q)| eb.iter().any(|&(r, s)| segment_intersection(p, q, r, s).is_some())) {
        return true;
    }
    a.iter().any(|&p| in_convex(b, p)) || b.iter().any(|&p| in_convex(a, p))
}

/// Largest pairwise distance.
pub fn diameter(points: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max(p.dist(*q));
        }
    }
    d
}

/// Distance from `p` to segment `ab`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.dist(a.lerp(b, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn diagonal_cross() {
        let i = segment_intersection(pt(0., 0.), pt(1., 1.), pt(0., 1.), pt(1., 0.)).unwrap();
        assert_eq!(i, Intersection::Point(pt(0.5, 0.5)));
        // Order of the segments does not matter.
        let j = segment_intersection(pt(1., 0.), pt(0., 1.), pt(1., 1.), pt(0., 0.)).unwrap();
        assert_eq!(j.point(), pt(0.5, 0.5));
    }

    #[test]
    fn collinear_cases() {
        assert_eq!(
            segment_intersection(pt(0., 0.), pt(2., 0.), pt(1., 0.), pt(3., 0.)),
            Some(Intersection::Overlap(pt(1.5, 0.)))
        );
        assert_eq!(segment_intersection(pt(0., 0.), pt(1., 0.), pt(2., 0.), pt(3., 0.)), None);
        assert!(segment_intersection(pt(0., 0.), pt(1., 0.), pt(0., 1.), pt(1., 1.)).is_none());
    }

    #[test]
    fn hull_and_area() {
        let h = convex_hull(&[pt(0., 0.), pt(2., 0.), pt(1., 1.), pt(2., 2.), pt(0., 2.), pt(1., 0.)]);
        assert_eq!(h.len(), 4);
        assert_eq!(polygon_area(&h), 4.0);
        let line = convex_hull(&[pt(0., 0.), pt(1., 1.), pt(2., 2.)]);
        assert_eq!(line, vec![pt(0., 0.), pt(2., 2.)]);
        assert!(hulls_intersect(&h, &line));
        assert!(!hulls_intersect(&h, &[pt(3., 3.), pt(4., 3.)]));
        assert!(hulls_intersect(&h, &[pt(1., 1.)]));
    }
}
