//! Building footprints and their uniform-grid spatial indexes.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

fn geometry_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Geometry(msg.into()))
}

/// Planar point in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn of(points: impl IntoIterator<Item = Point>) -> Option<Self> {
        points.into_iter().fold(None, |acc, p| {
            Some(match acc {
                None => Self { min: p, max: p },
                Some(b) => {
                    Self { min: Point::new(b.min.x.min(p.x), b.min.y.min(p.y)), max: Point::new(b.max.x.max(p.x), b.max.y.max(p.y)) }
                }
            })
        })
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    fn union(&self, other: &Self) -> Self {
        Self {
            min: Point::new(self.min.x.min(other.min.x), self.min.y.min(other.min.y)),
            max: Point::new(self.max.x.max(other.max.x), self.max.y.max(other.max.y)),
        }
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn on_segment_box(p: Point, a: Point, b: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection; touching and collinear overlap count.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = cross(q1, q2, p1);
    let d2 = cross(q1, q2, p2);
    let d3 = cross(p1, p2, q1);
    let d4 = cross(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment_box(p1, q1, q2))
        || (d2 == 0.0 && on_segment_box(p2, q1, q2))
        || (d3 == 0.0 && on_segment_box(q1, p1, p2))
        || (d4 == 0.0 && on_segment_box(q2, p1, p2))
}

/// Simple polygon stored as a closed ring (first vertex repeated last).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    ring: Vec<Point>,
    bbox: BoundingBox,
}

impl Polygon {
    /// Validates closure, vertex count and simplicity.
    pub fn new(ring: Vec<Point>) -> Result<Self> {
        if ring.len() < 4 {
            return geometry_err(format!("ring needs at least 3 distinct vertices, got {} points", ring.len()));
        }
        if ring.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return geometry_err("ring has non-finite coordinates");
        }
        if ring.first() != ring.last() {
            return geometry_err("ring is not closed");
        }
        let n = ring.len() - 1;
        for i in 0..n {
            for j in i + 1..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                let (a, b, c, d) = (ring[i], ring[i + 1], ring[j], ring[j + 1]);
                let crosses = if adjacent {
                    // Adjacent edges may only share their common vertex.
                    let shared = if j == i + 1 { b } else { a };
                    let (u, v) = if j == i + 1 { (a, d) } else { (b, c) };
                    cross(shared, u, v) == 0.0 && (u.x - shared.x) * (v.x - shared.x) + (u.y - shared.y) * (v.y - shared.y) > 0.0
                } else {
                    segments_intersect(a, b, c, d)
                };
                if crosses {
                    return geometry_err(format!("ring self-intersects at edges {i} and {j}"));
                }
            }
        }
        let bbox = BoundingBox::of(ring.iter().copied()).expect("nonempty ring");
        Ok(Self { ring, bbox })
    }

    /// Axis-aligned rectangle as a polygon.
    pub fn rectangle(min: Point, max: Point) -> Result<Self> {
        Self::new(vec![min, Point::new(max.x, min.y), max, Point::new(min.x, max.y), min])
    }

    /// Regular `n`-gon inscribed in a circle.
    pub fn regular(center: Point, radius: f64, n: usize) -> Result<Self> {
        let mut ring: Vec<Point> = (0..n)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                Point::new(center.x + radius * t.cos(), center.y + radius * t.sin())
            })
            .collect();
        ring.push(ring[0]);
        Self::new(ring)
    }

    pub fn ring(&self) -> &[Point] {
        &self.ring
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.ring.windows(2).map(|w| (w[0], w[1]))
    }

    /// Crossing-number test; boundary points may go either way.
    pub fn contains(&self, p: Point) -> bool {
        if !self.bbox.contains(p) {
            return false;
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn area(&self) -> f64 {
        0.5 * self.edges().map(|(a, b)| a.x * b.y - b.x * a.y).sum::<f64>().abs()
    }
}

/// Uniform grid mapping cells to item ids.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Grid {
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    cells: Vec<Vec<u32>>,
}

impl Grid {
    pub(crate) fn new(bbox: &BoundingBox, cell: f64) -> Self {
        let nx = ((bbox.width() / cell).floor() as usize + 1).max(1);
        let ny = ((bbox.height() / cell).floor() as usize + 1).max(1);
        Self { origin: bbox.min, cell, nx, ny, cells: vec![Vec::new(); nx * ny] }
    }

    fn col(&self, x: f64) -> isize {
        ((x - self.origin.x) / self.cell).floor() as isize
    }

    fn row(&self, y: f64) -> isize {
        ((y - self.origin.y) / self.cell).floor() as isize
    }

    fn clamp_cols(&self, lo: isize, hi: isize) -> Option<(usize, usize)> {
        let lo = lo.max(0);
        let hi = hi.min(self.nx as isize - 1);
        (lo <= hi).then_some((lo as usize, hi as usize))
    }

    /// Cells a segment may touch (conservative by one cell per side).
    pub(crate) fn segment_cells(&self, a: Point, b: Point, mut visit: impl FnMut(usize)) {
        let (ylo, yhi) = (a.y.min(b.y), a.y.max(b.y));
        let r0 = (self.row(ylo) - 1).max(0);
        let r1 = (self.row(yhi) + 1).min(self.ny as isize - 1);
        for r in r0..=r1 {
            let band_lo = (self.origin.y + r as f64 * self.cell).max(ylo);
            let band_hi = (self.origin.y + (r + 1) as f64 * self.cell).min(yhi);
            let (xa, xb) = if a.y == b.y || band_lo > band_hi {
                (a.x.min(b.x), a.x.max(b.x))
            } else {
                let x_at = |y: f64| a.x + (y - a.y) / (b.y - a.y) * (b.x - a.x);
                let (u, v) = (x_at(band_lo), x_at(band_hi));
                (u.min(v), u.max(v))
            };
            if let Some((c0, c1)) = self.clamp_cols(self.col(xa) - 1, self.col(xb) + 1) {
                for c in c0..=c1 {
                    visit(r as usize * self.nx + c);
                }
            }
        }
    }

    pub(crate) fn box_cells(&self, b: &BoundingBox, mut visit: impl FnMut(usize)) {
        let r0 = self.row(b.min.y).max(0);
        let r1 = self.row(b.max.y).min(self.ny as isize - 1);
        if let Some((c0, c1)) = self.clamp_cols(self.col(b.min.x), self.col(b.max.x)) {
            for r in r0..=r1 {
                for c in c0..=c1 {
                    visit(r as usize * self.nx + c);
                }
            }
        }
    }

    pub(crate) fn cell_of(&self, p: Point) -> Option<usize> {
        let (c, r) = (self.col(p.x), self.row(p.y));
        (c >= 0 && r >= 0 && (c as usize) < self.nx && (r as usize) < self.ny).then(|| r as usize * self.nx + c as usize)
    }

    pub(crate) fn insert(&mut self, cell: usize, id: u32) {
        let v = &mut self.cells[cell];
        if v.last() != Some(&id) {
            v.push(id);
        }
    }

    pub(crate) fn items(&self, cell: usize) -> &[u32] {
        &self.cells[cell]
    }
}

/// Immutable set of building footprints with edge and polygon indexes.
#[derive(Debug, Clone)]
pub struct BuildingSet {
    polygons: Vec<Polygon>,
    bbox: Option<BoundingBox>,
    edges: Vec<(Point, Point)>,
    edge_grid: Option<Grid>,
    polygon_grid: Option<Grid>,
}

impl BuildingSet {
    pub fn empty() -> Self {
        Self { polygons: Vec::new(), bbox: None, edges: Vec::new(), edge_grid: None, polygon_grid: None }
    }

    pub fn new(polygons: Vec<Polygon>) -> Self {
        let Some(bbox) = polygons.iter().map(|p| *p.bbox()).reduce(|a, b| a.union(&b)) else {
            return Self::empty();
        };
        let edges: Vec<(Point, Point)> = polygons.iter().flat_map(|p| p.edges()).collect();
        let extent = bbox.width().max(bbox.height()).max(1e-9);
        let area = (bbox.width() * bbox.height()).max(extent * extent * 1e-6);
        let cell = (2.0 * (area / edges.len() as f64).sqrt()).clamp(extent / 4096.0, extent);
        let mut edge_grid = Grid::new(&bbox, cell);
        for (id, &(a, b)) in edges.iter().enumerate() {
            let mut cells = Vec::new();
            edge_grid.segment_cells(a, b, |c| cells.push(c));
            for c in cells {
                edge_grid.insert(c, id as u32);
            }
        }
        let mut polygon_grid = Grid::new(&bbox, cell);
        for (id, p) in polygons.iter().enumerate() {
            let mut cells = Vec::new();
            polygon_grid.box_cells(p.bbox(), |c| cells.push(c));
            for c in cells {
                polygon_grid.insert(c, id as u32);
            }
        }
        Self { polygons, bbox: Some(bbox), edges, edge_grid: Some(edge_grid), polygon_grid: Some(polygon_grid) }
    }

    pub fn polygons(&self) -> &[Polygon] {
        &self.polygons
    }

    pub fn bbox(&self) -> Option<&BoundingBox> {
        self.bbox.as_ref()
    }

    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty()
    }

    pub fn len(&self) -> usize {
        self.polygons.len()
    }

    pub(crate) fn edges(&self) -> &[(Point, Point)] {
        &self.edges
    }

    pub(crate) fn edge_grid(&self) -> Option<&Grid> {
        self.edge_grid.as_ref()
    }

    /// Whether `p` lies inside some building.
    pub fn contains(&self, p: Point) -> bool {
        let Some(grid) = &self.polygon_grid else { return false };
        grid.cell_of(p).is_some_and(|c| grid.items(c).iter().any(|&i| self.polygons[i as usize].contains(p)))
    }

    /// Loads a GeoJSON feature collection of Polygon/MultiPolygon features
    /// in planar meters. Only exterior rings are kept.
    ///
    /// Coordinates that all fit in longitude/latitude ranges are rejected
    /// unless a projected `crs` is declared; a geographic `crs` is always
    /// rejected.
    pub fn from_geojson(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::Geometry(format!("invalid JSON: {e}")))?;
        if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
            return geometry_err("expected a FeatureCollection");
        }
        let crs = doc.pointer("/crs/properties/name").and_then(Value::as_str);
        if let Some(name) = crs {
            let n = name.to_ascii_uppercase();
            if n.contains("4326") || n.contains("CRS84") {
                return geometry_err(format!("geographic CRS {name}; project coordinates to meters first"));
            }
        }
        let features = doc.get("features").and_then(Value::as_array).ok_or_else(|| Error::Geometry("missing features array".into()))?;
        let mut polygons = Vec::new();
        for (k, f) in features.iter().enumerate() {
            let g = f.get("geometry").ok_or_else(|| Error::Geometry(format!("feature {k} has no geometry")))?;
            let coords = g.get("coordinates").ok_or_else(|| Error::Geometry(format!("feature {k} has no coordinates")))?;
            let exteriors: Vec<&Value> = match g.get("type").and_then(Value::as_str) {
                Some("Polygon") => coords.get(0).into_iter().collect(),
                Some("MultiPolygon") => coords.as_array().into_iter().flatten().filter_map(|p| p.get(0)).collect(),
                other => return geometry_err(format!("feature {k}: unsupported geometry type {other:?}")),
            };
            for ring in exteriors {
                let pts = parse_ring(ring).map_err(|e| Error::Geometry(format!("feature {k}: {e}")))?;
                polygons.push(Polygon::new(pts).map_err(|e| Error::Geometry(format!("feature {k}: {e}")))?);
            }
        }
        if crs.is_none() && !polygons.is_empty() {
            let looks_geographic = polygons.iter().flat_map(|p| p.ring()).all(|p| p.x.abs() <= 180.0 && p.y.abs() <= 90.0);
            if looks_geographic {
                return geometry_err("coordinates look like longitude/latitude; declare a projected crs or project to meters");
            }
        }
        Ok(Self::new(polygons))
    }
}

fn parse_ring(v: &Value) -> std::result::Result<Vec<Point>, String> {
    v.as_array()
        .ok_or("ring is not an array")?
        .iter()
        .map(|c| match (c.get(0).and_then(Value::as_f64), c.get(1).and_then(Value::as_f64)) {
            (Some(x), Some(y)) => Ok(Point::new(x, y)),
            _ => Err("coordinate is not a number pair".to_string()),
        })
        .collect()
}
