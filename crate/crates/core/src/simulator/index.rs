//! Uniform-grid index for ring-by-ring nearest searches.

use super::window::Window;
use crate::geometry::Point;

#[derive(Debug, Clone)]
pub(crate) struct PointIndex {
    origin: Point,
    cell_x: f64,
    cell_y: f64,
    nx: usize,
    ny: usize,
    wrap: bool,
    cells: Vec<Vec<u32>>,
    len: usize,
}

impl PointIndex {
    /// Indexes `points` (all inside the window's transmitter region) with
    /// cells of roughly `cell` meters.
    pub(crate) fn new<'a>(points: impl IntoIterator<Item = (u32, &'a Point)>, window: &Window, cell: f64) -> Self {
        let region = window.tx_region();
        let nx = ((region.width() / cell).round() as usize).clamp(1, 4096);
        let ny = ((region.height() / cell).round() as usize).clamp(1, 4096);
        let mut idx = Self {
            origin: region.min,
            cell_x: region.width() / nx as f64,
            cell_y: region.height() / ny as f64,
            nx,
            ny,
            wrap: window.wraps(),
            cells: vec![Vec::new(); nx * ny],
            len: 0,
        };
        for (id, p) in points {
            let (cx, cy) = idx.cell_of(*p);
            idx.cells[cy * nx + cx].push(id);
            idx.len += 1;
        }
        idx
    }

    fn cell_of(&self, p: Point) -> (usize, usize) {
        let cx = ((p.x - self.origin.x) / self.cell_x).floor().clamp(0.0, (self.nx - 1) as f64) as usize;
        let cy = ((p.y - self.origin.y) / self.cell_y).floor().clamp(0.0, (self.ny - 1) as f64) as usize;
        (cx, cy)
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Visits indexed ids ring by ring around `p`. Before ring `k >= 1`,
    /// `stop(d)` is asked whether every remaining point, all at distance at
    /// least `d`, can be skipped.
    pub(crate) fn search(&self, p: Point, mut visit: impl FnMut(u32), mut stop: impl FnMut(f64) -> bool) {
        let (cx, cy) = self.cell_of(p);
        let cell = self.cell_x.min(self.cell_y);
        let kmax = self.nx.max(self.ny);
        for k in 0..=kmax {
            if k >= 1 && stop((k - 1) as f64 * cell) {
                return;
            }
            if self.wrap && 2 * k + 1 > self.nx.min(self.ny) {
                self.cells.iter().flatten().for_each(|&id| visit(id));
                return;
            }
            let k = k as isize;
            for dy in -k..=k {
                let step = if dy.abs() == k { 1 } else { (2 * k) as usize };
                let mut dx = -k;
                while dx <= k {
                    if let Some(c) = self.wrapped(cx as isize + dx, cy as isize + dy) {
                        self.cells[c].iter().for_each(|&id| visit(id));
                    }
                    if k == 0 {
                        break;
                    }
                    dx += step as isize;
                }
            }
        }
    }

    fn wrapped(&self, x: isize, y: isize) -> Option<usize> {
        let (nx, ny) = (self.nx as isize, self.ny as isize);
        if self.wrap {
            Some((y.rem_euclid(ny) * nx + x.rem_euclid(nx)) as usize)
        } else if (0..nx).contains(&x) && (0..ny).contains(&y) {
            Some((y * nx + x) as usize)
        } else {
            None
        }
    }
}
