use model_core::{causal_leq, make_lattice_field, make_poisson_cloud, Cell, LatticeField, Law, OrderedQuad, Region, SpaceTimePoint};
use passage_engine::{lattice as lat, poisson as poi, Side};
use proptest::prelude::*;

fn field(seed: u64, rows: usize, cols: usize) -> LatticeField {
    make_lattice_field(seed, rows, cols, Law::Geometric { p: 0.5 }).unwrap()
}

fn cell_in(rows: usize, cols: usize, r: usize, c: usize) -> Cell {
    Cell::new(r % rows, c % cols)
}

fn ordered(a: Cell, b: Cell) -> (Cell, Cell) {
    let lo = Cell::new(a.row.min(b.row), a.col.min(b.col));
    let hi = Cell::new(a.row.max(b.row), a.col.max(b.col));
    (lo, hi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lattice_reverse_triangle(seed in 0u64..10_000, r in prop::array::uniform6(0usize..9)) {
        let f = field(seed, 9, 9);
        let cells = [Cell::new(r[0], r[1]), Cell::new(r[2], r[3]), Cell::new(r[4], r[5])];
        let mut cs = cells.to_vec();
        cs.sort_by_key(|c| (c.row, c.col));
        let (u, v, w) = (cs[0], cs[1], cs[2]);
        prop_assume!(u.col <= v.col && v.col <= w.col);
        let uw = lat::passage_value(&f, u, w).unwrap();
        let uv = lat::passage_value(&f, u, v).unwrap();
        let vw = lat::passage_value(&f, v, w).unwrap();
        prop_assert!(uw >= uv + vw - f.weight(v));
    }

    #[test]
    fn lattice_metric_composition(seed in 0u64..10_000, mid in 1usize..15) {
        let f = field(seed, 9, 9);
        let (a, b) = (Cell::new(0, 0), Cell::new(8, 8));
        let total = lat::passage_value(&f, a, b).unwrap();
        let (lo, hi) = f.columns_at(mid).unwrap();
        let best = (lo..=hi)
            .filter_map(|j| Cell::at(mid, j))
            .map(|c| lat::passage_value(&f, a, c).unwrap() + lat::passage_value(&f, c, b).unwrap() - f.weight(c))
            .fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(best, total);
    }

    #[test]
    fn lattice_superadditivity_and_gap(seed in 0u64..10_000, r in 0usize..8, c in 0usize..8) {
        let f = field(seed, 8, 8);
        let (a, b) = ordered(Cell::new(0, 0), cell_in(8, 8, r, c));
        prop_assume!(a != b);
        let l = lat::passage_value(&f, a, b).unwrap();
        if let Some(l2) = lat::disjoint2_value(&f, (a, a), (b, b)).unwrap() {
            prop_assert!(l2 <= 2.0 * l);
            prop_assert_eq!(lat::gap(&f, a, b).unwrap(), Some(2.0 * l - l2));
        }
    }

    #[test]
    fn lattice_geodesic_ordering(seed in 0u64..10_000) {
        let f = field(seed, 8, 8);
        let (a, b) = (Cell::new(0, 0), Cell::new(7, 7));
        let net = lat::network(&f, a, b).unwrap();
        let left = lat::geodesic(&f, a, b, Side::Left).unwrap();
        let right = lat::geodesic(&f, a, b, Side::Right).unwrap();
        prop_assert_eq!(&left.nodes, &net.leftmost.nodes);
        for t in 0..=14 {
            let (lo, hi) = f.columns_at(t).unwrap();
            for j in lo..=hi {
                let c = Cell::at(t, j).unwrap();
                if lat::on_optimal(&f, a, b, c).unwrap() {
                    prop_assert!(left.position_at(t as f64).unwrap() <= c.point().x);
                    prop_assert!(c.point().x <= right.position_at(t as f64).unwrap());
                }
            }
        }
    }

    #[test]
    fn lattice_rightmost_monotone_in_endpoints(seed in 0u64..10_000, d in 1usize..4) {
        let f = field(seed, 10, 10);
        let b = Cell::new(9, 9);
        let g0 = lat::geodesic(&f, Cell::new(d, 0), b, Side::Right).unwrap();
        let g1 = lat::geodesic(&f, Cell::new(d - 1, 1), b, Side::Right).unwrap();
        let e0 = lat::geodesic(&f, Cell::new(0, 0), Cell::new(9, 9 - d), Side::Right).unwrap();
        let e1 = lat::geodesic(&f, Cell::new(0, 0), Cell::new(9 - d + 1, 9), Side::Right).unwrap();
        for t in d..=18 {
            prop_assert!(g0.position_at(t as f64).unwrap() <= g1.position_at(t as f64).unwrap());
        }
        for t in 0..=(18 - d) {
            prop_assert!(e0.position_at(t as f64).unwrap() <= e1.position_at(t as f64).unwrap());
        }
    }

    #[test]
    fn lattice_flip(seed in 0u64..10_000, r in prop::array::uniform4(0usize..7)) {
        let (a, b) = ordered(Cell::new(r[0], r[1]), Cell::new(r[2], r[3]));
        let f = field(seed, 7, 7);
        let g = f.reflect();
        let v = lat::passage_value(&f, a, b).unwrap();
        prop_assert_eq!(v, lat::passage_value(&g, g.reflect_cell(b), g.reflect_cell(a)).unwrap());
        // Real weights are summed in the opposite order after reflection.
        let f = make_lattice_field(seed, 7, 7, Law::Exponential).unwrap();
        let g = f.reflect();
        let v = lat::passage_value(&f, a, b).unwrap();
        let w = lat::passage_value(&g, g.reflect_cell(b), g.reflect_cell(a)).unwrap();
        prop_assert!(passage_engine::same_value(v, w, false));
    }

    #[test]
    fn poisson_flip_and_greene(seed in 0u64..10_000) {
        let c = make_poisson_cloud(seed, 2.0 * 36.0, Region::new(-3.0, 3.0, 0.0, 6.0)).unwrap();
        let q = OrderedQuad::new(SpaceTimePoint::new(-0.5, 0.3), SpaceTimePoint::new(0.7, 5.6)).unwrap();
        let v = poi::passage_value(&c, &q).unwrap();
        prop_assert_eq!(poi::passage_value(&c.reflect(), &q.mirrored()).unwrap(), v);
        let g = poi::greene_values(&c, &q, 2).unwrap();
        prop_assert_eq!(g[0], v);
        let l2 = poi::disjoint2_value(&c, &(q.start, q.start), &(q.end, q.end)).unwrap();
        prop_assert_eq!(l2, Some(g[1]));
        let pair = poi::optimizer2(&c, &(q.start, q.start), &(q.end, q.end), Side::Left).unwrap().unwrap();
        prop_assert_eq!(pair.value, g[1]);
        prop_assert_eq!(pair.left.value + pair.right.value, g[1]);
        for k in 0..=20 {
            let t = q.start.t + (q.end.t - q.start.t) * k as f64 / 20.0;
            prop_assert!(pair.left.position_at(t).unwrap() <= pair.right.position_at(t).unwrap());
        }
    }

    #[test]
    fn poisson_reverse_triangle_and_composition(seed in 0u64..10_000, y in -1.5f64..1.5) {
        let c = make_poisson_cloud(seed, 2.0 * 36.0, Region::new(-3.0, 3.0, 0.0, 6.0)).unwrap();
        let a = SpaceTimePoint::new(0.0, 0.0);
        let b = SpaceTimePoint::new(0.0, 6.0);
        let m = SpaceTimePoint::new(y, 3.0);
        let total = poi::passage_value(&c, &OrderedQuad::new(a, b).unwrap()).unwrap();
        let left = poi::passage_value(&c, &OrderedQuad::new(a, m).unwrap()).unwrap();
        let right = poi::passage_value(&c, &OrderedQuad::new(m, b).unwrap()).unwrap();
        prop_assert!(total >= left + right);
        // The optimum is attained where a geodesic crosses the intermediate time.
        let g = poi::geodesic(&c, &OrderedQuad::new(a, b).unwrap(), Side::Left).unwrap();
        let cross = SpaceTimePoint::new(g.position_at(3.0).unwrap(), 3.0);
        let through = poi::passage_value(&c, &OrderedQuad::new(a, cross).unwrap()).unwrap()
            + poi::passage_value(&c, &OrderedQuad::new(cross, b).unwrap()).unwrap();
        prop_assert_eq!(through, total);
    }

    #[test]
    fn poisson_geodesic_ordering(seed in 0u64..10_000) {
        let c = make_poisson_cloud(seed, 2.0 * 25.0, Region::new(-2.5, 2.5, 0.0, 5.0)).unwrap();
        let q = OrderedQuad::new(SpaceTimePoint::new(0.0, 0.0), SpaceTimePoint::new(0.0, 5.0)).unwrap();
        let left = poi::geodesic(&c, &q, Side::Left).unwrap();
        let right = poi::geodesic(&c, &q, Side::Right).unwrap();
        for p in &c.points {
            if causal_leq(&q.start, p) && causal_leq(p, &q.end) && poi::on_optimal(&c, &q, p).unwrap() {
                prop_assert!(left.position_at(p.t).unwrap() <= p.x && p.x <= right.position_at(p.t).unwrap());
            }
        }
        let net = poi::network(&c, &q).unwrap();
        prop_assert_eq!(net.value, left.value);
    }
}

#[test]
fn rescaled_mean_at_n40() {
    let n = 40.0;
    let frame = model_core::ScalingFrame::new(n).unwrap();
    let seeds = 60;
    let mut sum = 0.0;
    for seed in 0..seeds {
        let c = make_poisson_cloud(seed, 2.0, Region::new(-n / 2.0, n / 2.0, 0.0, n)).unwrap();
        let q = OrderedQuad::new(SpaceTimePoint::new(0.0, 0.0), SpaceTimePoint::new(0.0, n)).unwrap();
        let scaled = OrderedQuad::new(frame.point(&q.start), frame.point(&q.end)).unwrap();
        sum += frame.value(poi::passage_value(&c, &q).unwrap(), &scaled);
    }
    let mean = sum / seeds as f64;
    eprintln!("rescaled mean at n=40: {mean}");
    assert!((-3.0..=0.0).contains(&mean), "rescaled mean {mean}");
}
