use std::time::Instant;

use model_core::{Cell, LatticeField, OrderedQuad, PoissonCloud, Region, SpaceTimePoint};
use oracle::{
    enumerate_disjoint_pairs, enumerate_paths, random_cloud_instance, random_lattice_instance, verify_engine,
    weak_pair_value, weak_probe, BatchSpec, EngineUnderTest, ExactEngine, Instance, OracleError,
};
use passage_engine::{Chain, DisjointPair, PassageError, Side};

fn corners(m: Vec<Vec<f64>>) -> Instance {
    let f = LatticeField::explicit(m).unwrap();
    let b = Cell::new(f.rows - 1, f.cols - 1);
    Instance::lattice_doubled(f, Cell::new(0, 0), b)
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn path_counts_are_binomial() {
    assert_eq!(enumerate_paths(&corners(vec![vec![1.0; 2]; 2])).unwrap().chains.len(), 2);
    assert_eq!(enumerate_paths(&corners(vec![vec![1.0; 3]; 3])).unwrap().chains.len(), 6);
    for r in 1..=5 {
        for c in 1..=5 {
            let n = enumerate_paths(&corners(vec![vec![0.0; c]; r])).unwrap().chains.len();
            assert_eq!(n, binom(r + c - 2, r - 1));
        }
    }
}

#[test]
fn empty_cloud_has_one_empty_chain() {
    let c = PoissonCloud::from_points(Region::unit_square(), vec![]);
    let q = OrderedQuad::new(SpaceTimePoint::new(0.5, 0.0), SpaceTimePoint::new(0.5, 1.0)).unwrap();
    let r = enumerate_paths(&Instance::cloud_doubled(c, q)).unwrap();
    assert_eq!(r.chains.len(), 1);
    assert_eq!(r.optimum, 0.0);
}

#[test]
fn hand_pair_examples() {
    let r = enumerate_disjoint_pairs(&corners(vec![vec![1.0, 2.0], vec![3.0, 4.0]])).unwrap();
    assert_eq!(r.pair_optimum, Some(15.0));
    assert_eq!(r.optimal_pairs.len(), 1);
    let ones = corners(vec![vec![1.0; 2]; 2]);
    let r = enumerate_disjoint_pairs(&ones).unwrap();
    assert_eq!(r.pair_optimum, Some(6.0));
    assert_eq!(r.optimal_pairs.len(), 1);
    assert_eq!(weak_pair_value(&ones).unwrap(), Some(6.0));
}

#[test]
fn weak_value_on_a_unique_geodesic() {
    // The geodesic runs down the left column; the best weak partner may reuse its cells.
    let inst = corners(vec![vec![1.0, 0.0, 0.0], vec![5.0, 0.0, 0.0], vec![5.0, 5.0, 1.0]]);
    let r = enumerate_disjoint_pairs(&inst).unwrap();
    assert_eq!(r.optimum, 17.0);
    // Disjoint partner must leave through (0,1) and cannot use the heavy cells.
    assert_eq!(r.pair_optimum, Some(17.0 + 2.0));
    // A weak partner can share (1,0), (2,0), (2,1) and only pays the anchors twice.
    assert_eq!(weak_pair_value(&inst).unwrap(), Some(17.0 + 2.0));
}

#[test]
fn size_caps_are_enforced() {
    let big = corners(vec![vec![1.0; 6]; 2]);
    assert!(matches!(enumerate_paths(&big), Err(OracleError::TooLarge { .. })));
    let pts = (0..13).map(|k| SpaceTimePoint::new(0.0, 0.05 * (k + 1) as f64)).collect();
    let c = PoissonCloud::from_points(Region::unit_square(), pts);
    let q = OrderedQuad::new(SpaceTimePoint::new(0.0, 0.0), SpaceTimePoint::new(0.0, 1.0)).unwrap();
    assert!(matches!(enumerate_paths(&Instance::cloud_doubled(c, q)), Err(OracleError::TooLarge { .. })));
}

#[test]
fn pair_enumeration_commutes_with_reflection() {
    for i in 0..100 {
        for inst in [random_lattice_instance(9, i, 5), random_cloud_instance(9, i, 12)] {
            let a = enumerate_disjoint_pairs(&inst).unwrap();
            let b = enumerate_disjoint_pairs(&inst.reflect()).unwrap();
            assert_eq!(a.pair_optimum, b.pair_optimum, "{}", inst.to_json());
            assert_eq!(a.optimal_pairs.len(), b.optimal_pairs.len(), "{}", inst.to_json());
            if inst.is_doubled() {
                assert_eq!(a.optimum, b.optimum);
            }
        }
    }
}

#[test]
fn default_batch_passes() {
    let t = Instant::now();
    let r = verify_engine(&ExactEngine, &BatchSpec::default());
    assert!(r.passed, "{}", r.to_json());
    assert_eq!(r.instances, 400);
    assert!(t.elapsed().as_secs() < 30);
}

#[test]
fn larger_instances_pass() {
    let spec = BatchSpec { seed: 77, lattice: 150, cloud: 150, max_side: 5, max_points: 12 };
    let r = verify_engine(&ExactEngine, &spec);
    assert!(r.passed, "{}", r.to_json());
}

#[test]
fn empty_batch_is_vacuous() {
    let r = verify_engine(&ExactEngine, &BatchSpec { lattice: 0, cloud: 0, ..BatchSpec::default() });
    assert!(r.passed);
    assert_eq!(r.checks, 0);
    assert_eq!(r.warnings.len(), 1);
}

/// Drops the weight of the final cell, as a dynamic program that stops one step early would.
struct OffByOne;

impl EngineUnderTest for OffByOne {
    fn passage_value(&self, inst: &Instance) -> Result<f64, PassageError> {
        let v = ExactEngine.passage_value(inst)?;
        Ok(match inst {
            Instance::Lattice { field, end, .. } => v - field.weight(end.0),
            Instance::Cloud { .. } => v,
        })
    }
    fn geodesic(&self, inst: &Instance, side: Side) -> Result<Chain, PassageError> {
        ExactEngine.geodesic(inst, side)
    }
    fn network_vertices(&self, inst: &Instance) -> Result<Vec<SpaceTimePoint>, PassageError> {
        ExactEngine.network_vertices(inst)
    }
    fn disjoint2_value(&self, inst: &Instance) -> Result<Option<f64>, PassageError> {
        ExactEngine.disjoint2_value(inst)
    }
    fn optimizer2(&self, inst: &Instance, side: Side) -> Result<Option<DisjointPair>, PassageError> {
        ExactEngine.optimizer2(inst, side)
    }
    fn gap(&self, inst: &Instance) -> Result<Option<f64>, PassageError> {
        ExactEngine.gap(inst)
    }
    fn greene2(&self, inst: &Instance) -> Result<Option<[f64; 2]>, PassageError> {
        ExactEngine.greene2(inst)
    }
}

#[test]
fn injected_fault_yields_replayable_counterexample() {
    let r = verify_engine(&OffByOne, &BatchSpec::default());
    assert!(!r.passed);
    let cx = r.counterexample.expect("counterexample");
    assert_eq!(cx.check, "passage_value");
    let json = serde_json::to_string(&cx).unwrap();
    let back: oracle::Counterexample = serde_json::from_str(&json).unwrap();
    assert_eq!(back.instance, cx.instance);
    let replay = verify_engine(&ExactEngine, &BatchSpec { lattice: 0, cloud: 0, ..BatchSpec::default() });
    assert!(replay.passed);
    // The exact engine agrees with the oracle on the recorded instance.
    let truth = enumerate_paths(&back.instance).unwrap().optimum;
    assert_eq!(ExactEngine.passage_value(&back.instance).unwrap(), truth);
    assert_ne!(OffByOne.passage_value(&back.instance).unwrap(), truth);
}

#[test]
fn weak_versus_disjoint_frequencies() {
    let r = weak_probe(&BatchSpec { seed: 3, lattice: 250, cloud: 250, max_side: 4, max_points: 10 });
    eprintln!("weak probe: {r:?}");
    assert_eq!(r.instances, r.equal + r.weak_larger + r.disjoint_infeasible);
    assert!(r.instances > 0);
}

#[test]
fn batch_exercises_every_check() {
    let r = verify_engine(&ExactEngine, &BatchSpec::default());
    eprintln!("checks: {}", r.checks);
    let mut with_pairs = 0;
    let mut distinct = 0;
    let mut max_points = 0;
    for inst in BatchSpec::default().instances() {
        if let Instance::Cloud { cloud, .. } = &inst {
            max_points = max_points.max(cloud.len());
        }
        if !inst.is_doubled() {
            distinct += 1;
        }
        if enumerate_disjoint_pairs(&inst).unwrap().pair_optimum.is_some() {
            with_pairs += 1;
        }
    }
    eprintln!("with pairs {with_pairs}, distinct anchors {distinct}, largest cloud {max_points}");
    assert!(with_pairs > 250 && distinct > 50 && max_points == 10);
    assert!(r.checks > 400 * 8);
}

/// Greedy lexicographic walk: step left whenever some geodesic still continues that way.
fn lexicographic_geodesic(f: &LatticeField, a: Cell, b: Cell, side: Side) -> Vec<SpaceTimePoint> {
    use passage_engine::lattice::passage_value;
    let total = passage_value(f, a, b).unwrap();
    let mut cur = a;
    let mut acc = f.weight(a);
    let mut out = vec![a.point()];
    while cur != b {
        let down = Cell::new(cur.row + 1, cur.col);
        let right = Cell::new(cur.row, cur.col + 1);
        let order = match side {
            Side::Left => [down, right],
            Side::Right => [right, down],
        };
        let next = order
            .into_iter()
            .find(|c| c.row <= b.row && c.col <= b.col && acc + passage_value(f, *c, b).unwrap() == total)
            .unwrap();
        acc += f.weight(next);
        cur = next;
        out.push(cur.point());
    }
    out
}

#[test]
fn extremal_geodesics_are_lexicographic_on_8x8() {
    for seed in 0..200 {
        let f = model_core::make_lattice_field(seed, 8, 8, model_core::Law::Geometric { p: 0.5 }).unwrap();
        let (a, b) = (Cell::new(0, 0), Cell::new(7, 7));
        for side in [Side::Left, Side::Right] {
            let g = passage_engine::lattice::geodesic(&f, a, b, side).unwrap();
            assert_eq!(g.nodes, lexicographic_geodesic(&f, a, b, side), "seed {seed}");
        }
    }
}
