//! Line-of-sight tests against building footprints.

use super::buildings::{segments_intersect, BuildingSet, Point};

fn candidate_edges(set: &BuildingSet, a: Point, b: Point) -> Vec<u32> {
    let Some(grid) = set.edge_grid() else { return Vec::new() };
    let mut ids = Vec::new();
    grid.segment_cells(a, b, |c| ids.extend_from_slice(grid.items(c)));
    ids.sort_unstable();
    ids.dedup();
    ids
}

/// True iff segment `ab` touches no building edge and neither endpoint is
/// inside a building. An endpoint on an edge counts as blocked.
pub fn los_test(a: Point, b: Point, set: &BuildingSet) -> bool {
    if set.is_empty() {
        return true;
    }
    let edges = set.edges();
    if candidate_edges(set, a, b).into_iter().any(|i| {
        let (p, q) = edges[i as usize];
        segments_intersect(a, b, p, q)
    }) {
        return false;
    }
    !set.contains(a) && !set.contains(b)
}

/// [`los_test`] without the spatial index.
pub fn los_test_brute_force(a: Point, b: Point, set: &BuildingSet) -> bool {
    if set.edges().iter().any(|&(p, q)| segments_intersect(a, b, p, q)) {
        return false;
    }
    !set.polygons().iter().any(|poly| poly.contains(a) || poly.contains(b))
}

/// Distance from `origin` along unit direction `dir` to the first building
/// edge, or `f64::INFINITY` if none lies within `max_dist`.
///
/// For an outdoor origin, `los_test(origin, origin + r dir)` holds iff
/// `r < blocking_distance(..)`.
pub fn blocking_distance(origin: Point, dir: (f64, f64), max_dist: f64, set: &BuildingSet) -> f64 {
    let end = Point::new(origin.x + dir.0 * max_dist, origin.y + dir.1 * max_dist);
    let edges = set.edges();
    let mut best = f64::INFINITY;
    for i in candidate_edges(set, origin, end) {
        let (p, q) = edges[i as usize];
        if !segments_intersect(origin, end, p, q) {
            continue;
        }
        let e = (q.x - p.x, q.y - p.y);
        let w = (p.x - origin.x, p.y - origin.y);
        let denom = dir.0 * e.1 - dir.1 * e.0;
        let t = if denom != 0.0 {
            (w.0 * e.1 - w.1 * e.0) / denom
        } else {
            // Collinear overlap: nearest edge endpoint ahead, or the origin itself.
            let tp = w.0 * dir.0 + w.1 * dir.1;
            let tq = (q.x - origin.x) * dir.0 + (q.y - origin.y) * dir.1;
            if tp.min(tq) <= 0.0 {
                0.0
            } else {
                tp.min(tq)
            }
        };
        best = best.min(t.max(0.0));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::buildings::Polygon;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn city(rng: &mut ChaCha8Rng) -> BuildingSet {
        let mut polys = Vec::new();
        for i in 0..15 {
            for j in 0..15 {
                if rng.gen_bool(0.7) {
                    let x = 100.0 * i as f64 + rng.gen_range(0.0..20.0);
                    let y = 100.0 * j as f64 + rng.gen_range(0.0..20.0);
                    let (w, h) = (rng.gen_range(20.0..75.0), rng.gen_range(20.0..75.0));
                    polys.push(Polygon::rectangle(Point::new(x, y), Point::new(x + w, y + h)).unwrap());
                } else {
                    let c = Point::new(100.0 * i as f64 + 50.0, 100.0 * j as f64 + 50.0);
                    polys.push(Polygon::regular(c, rng.gen_range(10.0..40.0), rng.gen_range(3..12)).unwrap());
                }
            }
        }
        BuildingSet::new(polys)
    }

    #[test]
    fn empty_set_never_blocks() {
        let s = BuildingSet::empty();
        assert!(los_test(Point::new(-5.0, 3.0), Point::new(100.0, -7.0), &s));
    }

    #[test]
    fn unit_square_blocks_crossing() {
        let s = BuildingSet::new(vec![Polygon::rectangle(Point::new(0.0, 0.0), Point::new(1.0, 1.0)).unwrap()]);
        assert!(!los_test(Point::new(-1.0, 0.5), Point::new(2.0, 0.5), &s));
        assert!(los_test(Point::new(-1.0, 1.5), Point::new(2.0, 1.5), &s));
        assert!(!los_test(Point::new(0.5, 0.5), Point::new(0.6, 0.6), &s));
        assert!(!los_test(Point::new(-1.0, 0.5), Point::new(0.0, 0.5), &s));
    }

    #[test]
    fn grid_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = city(&mut rng);
        let mut blocked = 0;
        for _ in 0..10_000 {
            let a = Point::new(rng.gen_range(-100.0..1600.0), rng.gen_range(-100.0..1600.0));
            let len = rng.gen_range(0.0..400.0);
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let b = Point::new(a.x + len * t.cos(), a.y + len * t.sin());
            let fast = los_test(a, b, &s);
            assert_eq!(fast, los_test_brute_force(a, b, &s), "{a:?} -> {b:?}");
            assert_eq!(fast, los_test(b, a, &s));
            blocked += usize::from(!fast);
        }
        assert!(blocked > 1000 && blocked < 9000);
    }

    #[test]
    fn blocking_distance_agrees_with_los() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = city(&mut rng);
        let mut checked = 0;
        while checked < 2000 {
            let o = Point::new(rng.gen_range(0.0..1500.0), rng.gen_range(0.0..1500.0));
            if s.contains(o) {
                continue;
            }
            let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let dir = (t.cos(), t.sin());
            let hit = blocking_distance(o, dir, 300.0, &s);
            for r in [1.0, 10.0, 50.0, 120.0, 299.0] {
                let los = los_test(o, Point::new(o.x + r * dir.0, o.y + r * dir.1), &s);
                if (r - hit).abs() > 1e-6 {
                    assert_eq!(los, r < hit, "o={o:?} t={t} r={r} hit={hit}");
                }
            }
            checked += 1;
        }
    }
}
