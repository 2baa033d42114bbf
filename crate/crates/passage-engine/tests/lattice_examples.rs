use model_core::{make_lattice_field, Cell, LatticeField, Law};
use passage_engine::lattice::{
    disjoint2_value, gap, geodesic, network, on_optimal, optimizer2, passage_profile, passage_value,
};
use passage_engine::{overlap, PassageError, Side};

fn small() -> LatticeField {
    LatticeField::explicit(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap()
}

fn c(r: usize, k: usize) -> Cell {
    Cell::new(r, k)
}

#[test]
fn two_by_two_values() {
    let f = small();
    assert_eq!(passage_value(&f, c(0, 0), c(1, 1)).unwrap(), 8.0);
    assert_eq!(disjoint2_value(&f, (c(0, 0), c(0, 0)), (c(1, 1), c(1, 1))).unwrap(), Some(15.0));
    assert_eq!(gap(&f, c(0, 0), c(1, 1)).unwrap(), Some(1.0));
    let ones = LatticeField::constant(2, 2, 1.0);
    assert_eq!(disjoint2_value(&ones, (c(0, 0), c(0, 0)), (c(1, 1), c(1, 1))).unwrap(), Some(6.0));
    assert_eq!(gap(&ones, c(0, 0), c(1, 1)).unwrap(), Some(0.0));
}

#[test]
fn optimizer_pair_on_two_by_two() {
    let f = small();
    for side in [Side::Left, Side::Right] {
        let pair = optimizer2(&f, (c(0, 0), c(0, 0)), (c(1, 1), c(1, 1)), side).unwrap().unwrap();
        assert_eq!(pair.value, 15.0);
        assert_eq!(pair.left.nodes[1], c(1, 0).point());
        assert_eq!(pair.right.nodes[1], c(0, 1).point());
        assert_eq!(pair.left.value, 8.0);
        assert_eq!(pair.right.value, 7.0);
    }
}

#[test]
fn one_column_is_infeasible() {
    let f = LatticeField::constant(4, 1, 1.0);
    assert_eq!(disjoint2_value(&f, (c(0, 0), c(0, 0)), (c(3, 0), c(3, 0))).unwrap(), None);
    assert_eq!(gap(&f, c(0, 0), c(3, 0)).unwrap(), None);
}

#[test]
fn outside_and_unreachable() {
    let f = small();
    assert!(matches!(passage_value(&f, c(0, 0), c(2, 0)), Err(PassageError::Outside(_))));
    assert!(matches!(passage_value(&f, c(0, 1), c(1, 0)), Err(PassageError::NotConnectable { .. })));
}

#[test]
fn profile_on_a_row_is_cumulative() {
    let f = LatticeField::explicit(vec![vec![3.0, 1.0, 4.0, 1.0, 5.0]]).unwrap();
    for t in 0..5 {
        let p = passage_profile(&f, c(0, 0), t).unwrap();
        assert_eq!(p.values, vec![[3.0, 4.0, 8.0, 9.0, 14.0][t]]);
    }
    let z = LatticeField::constant(4, 4, 0.0);
    let p = passage_profile(&z, c(0, 0), 3).unwrap();
    assert_eq!(p.values, vec![0.0; 4]);
}

#[test]
fn profile_matches_pointwise() {
    let f = make_lattice_field(5, 12, 12, Law::Geometric { p: 0.5 }).unwrap();
    let src = c(2, 1);
    for t in src.time()..=f.max_time() {
        let p = passage_profile(&f, src, t).unwrap();
        for (k, v) in p.values.iter().enumerate() {
            let cell = Cell::at(t, p.first_col + k).unwrap();
            assert_eq!(*v, passage_value(&f, src, cell).unwrap());
        }
    }
}

#[test]
fn all_ones_geodesics_split() {
    let ones = LatticeField::constant(2, 2, 1.0);
    let l = geodesic(&ones, c(0, 0), c(1, 1), Side::Left).unwrap();
    let r = geodesic(&ones, c(0, 0), c(1, 1), Side::Right).unwrap();
    assert_eq!(l.nodes[1], c(1, 0).point());
    assert_eq!(r.nodes[1], c(0, 1).point());
    let net = network(&ones, c(0, 0), c(1, 1)).unwrap();
    assert_eq!(net.vertices.len(), 2);
    assert_eq!(net.edges.len(), 2);
    assert!(net.edges.iter().all(|e| e.from == 0 && e.to == 1));
    assert!(!net.bridges.left_to_right && !net.bridges.right_to_left);
}

#[test]
fn unique_geodesic_network() {
    let f = LatticeField::explicit(vec![vec![0.5, 0.25, 0.0], vec![0.125, 2.0, 0.0], vec![0.0, 1.0, 3.0]]).unwrap();
    let l = geodesic(&f, c(0, 0), c(2, 2), Side::Left).unwrap();
    let r = geodesic(&f, c(0, 0), c(2, 2), Side::Right).unwrap();
    assert_eq!(l, r);
    let net = network(&f, c(0, 0), c(2, 2)).unwrap();
    assert_eq!(net.vertices.len(), 2);
    assert_eq!(net.edges.len(), 1);
    assert_eq!(overlap(&l, &r).intervals, vec![(0.0, 4.0)]);
}

#[test]
fn on_optimal_examples() {
    let f = small();
    assert!(on_optimal(&f, c(0, 0), c(1, 1), c(0, 0)).unwrap());
    assert!(on_optimal(&f, c(0, 0), c(1, 1), c(1, 0)).unwrap());
    assert!(!on_optimal(&f, c(0, 0), c(1, 1), c(0, 1)).unwrap());
    let g = LatticeField::constant(3, 3, 1.0);
    assert!(!on_optimal(&g, c(1, 1), c(2, 2), c(0, 2)).unwrap());
}

#[test]
fn distinct_endpoint_pairs() {
    let f = LatticeField::explicit(vec![vec![1.0, 1.0, 1.0], vec![1.0, 5.0, 1.0], vec![1.0, 1.0, 1.0]]).unwrap();
    // From (1,0),(0,1) to (2,1),(1,2): the pair may not both use the 5.
    let v = disjoint2_value(&f, (c(1, 0), c(0, 1)), (c(2, 1), c(1, 2))).unwrap();
    assert_eq!(v, Some(10.0));
    // Doubled start, distinct ends one step later.
    let v = disjoint2_value(&f, (c(0, 0), c(0, 0)), (c(1, 0), c(0, 1))).unwrap();
    assert_eq!(v, Some(4.0));
    // Doubled start and end one step apart have no interior: infeasible.
    let v = disjoint2_value(&f, (c(0, 0), c(0, 0)), (c(0, 1), c(0, 1))).unwrap();
    assert_eq!(v, None);
}
