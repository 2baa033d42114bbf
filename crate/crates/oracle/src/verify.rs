use model_core::SpaceTimePoint;
use passage_engine::{lattice, poisson, Chain, DisjointPair, PassageError, Side};
use serde::{Deserialize, Serialize};

use crate::enumerate::{enumerate_disjoint_pairs, network_vertices, weak_pair_value, weakly_left};
use crate::{random_cloud_instance, random_lattice_instance, Instance};

/// The engine operations checked against enumeration.
pub trait EngineUnderTest {
    fn passage_value(&self, inst: &Instance) -> Result<f64, PassageError>;
    fn geodesic(&self, inst: &Instance, side: Side) -> Result<Chain, PassageError>;
    fn network_vertices(&self, inst: &Instance) -> Result<Vec<SpaceTimePoint>, PassageError>;
    fn disjoint2_value(&self, inst: &Instance) -> Result<Option<f64>, PassageError>;
    fn optimizer2(&self, inst: &Instance, side: Side) -> Result<Option<DisjointPair>, PassageError>;
    /// Gap between doubled anchors.
    fn gap(&self, inst: &Instance) -> Result<Option<f64>, PassageError>;
    /// First two Greene partial sums; `None` for lattices.
    fn greene2(&self, inst: &Instance) -> Result<Option<[f64; 2]>, PassageError>;
}

/// The production engine.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactEngine;

impl EngineUnderTest for ExactEngine {
    fn passage_value(&self, inst: &Instance) -> Result<f64, PassageError> {
        match inst {
            Instance::Lattice { field, start, end } => lattice::passage_value(field, start.0, end.0),
            Instance::Cloud { cloud, .. } => poisson::passage_value(cloud, &inst.quad()),
        }
    }

    fn geodesic(&self, inst: &Instance, side: Side) -> Result<Chain, PassageError> {
        match inst {
            Instance::Lattice { field, start, end } => lattice::geodesic(field, start.0, end.0, side),
            Instance::Cloud { cloud, .. } => poisson::geodesic(cloud, &inst.quad(), side),
        }
    }

    fn network_vertices(&self, inst: &Instance) -> Result<Vec<SpaceTimePoint>, PassageError> {
        let net = match inst {
            Instance::Lattice { field, start, end } => lattice::network(field, start.0, end.0)?,
            Instance::Cloud { cloud, .. } => poisson::network(cloud, &inst.quad())?,
        };
        Ok(net.vertices)
    }

    fn disjoint2_value(&self, inst: &Instance) -> Result<Option<f64>, PassageError> {
        match inst {
            Instance::Lattice { field, start, end } => lattice::disjoint2_value(field, *start, *end),
            Instance::Cloud { cloud, start, end } => poisson::disjoint2_value(cloud, start, end),
        }
    }

    fn optimizer2(&self, inst: &Instance, side: Side) -> Result<Option<DisjointPair>, PassageError> {
        match inst {
            Instance::Lattice { field, start, end } => lattice::optimizer2(field, *start, *end, side),
            Instance::Cloud { cloud, start, end } => poisson::optimizer2(cloud, start, end, side),
        }
    }

    fn gap(&self, inst: &Instance) -> Result<Option<f64>, PassageError> {
        match inst {
            Instance::Lattice { field, start, end } => lattice::gap(field, start.0, end.0),
            Instance::Cloud { cloud, .. } => poisson::gap(cloud, &inst.quad()).map(Some),
        }
    }

    fn greene2(&self, inst: &Instance) -> Result<Option<[f64; 2]>, PassageError> {
        match inst {
            Instance::Lattice { .. } => Ok(None),
            Instance::Cloud { cloud, .. } => {
                let g = poisson::greene_values(cloud, &inst.quad(), 2)?;
                Ok(Some([g[0], g[1]]))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSpec {
    pub seed: u64,
    pub lattice: usize,
    pub cloud: usize,
    pub max_side: usize,
    pub max_points: usize,
}

impl Default for BatchSpec {
    fn default() -> Self {
        Self { seed: 1, lattice: 200, cloud: 200, max_side: 4, max_points: 10 }
    }
}

impl BatchSpec {
    pub fn instances(&self) -> impl Iterator<Item = Instance> + '_ {
        let l = (0..self.lattice as u64).map(|i| random_lattice_instance(self.seed, i, self.max_side));
        let c = (0..self.cloud as u64).map(|i| random_cloud_instance(self.seed, i, self.max_points));
        l.chain(c)
    }
}

/// A failed check, replayable from the serialized instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub check: String,
    pub instance: Instance,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub instances: usize,
    pub checks: usize,
    pub passed: bool,
    pub warnings: Vec<String>,
    pub counterexample: Option<Counterexample>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Checker<'a> {
    inst: &'a Instance,
    checks: usize,
}

impl Checker<'_> {
    fn eq<T: PartialEq + std::fmt::Debug>(&mut self, check: &str, expected: T, actual: T) -> Result<(), Counterexample> {
        self.checks += 1;
        if expected == actual {
            Ok(())
        } else {
            Err(self.fail(check, format!("{expected:?}"), format!("{actual:?}")))
        }
    }

    fn holds(&mut self, check: &str, ok: bool, detail: impl FnOnce() -> String) -> Result<(), Counterexample> {
        self.checks += 1;
        if ok {
            Ok(())
        } else {
            Err(self.fail(check, "property holds".into(), detail()))
        }
    }

    fn fail(&self, check: &str, expected: String, actual: String) -> Counterexample {
        Counterexample { check: check.into(), instance: self.inst.clone(), expected, actual }
    }

    fn engine<T>(&self, check: &str, r: Result<T, PassageError>) -> Result<T, Counterexample> {
        r.map_err(|e| self.fail(check, "a result".into(), format!("error: {e}")))
    }
}

fn sorted_points(mut v: Vec<SpaceTimePoint>) -> Vec<SpaceTimePoint> {
    v.sort_by(|p, q| p.t.total_cmp(&q.t).then(p.x.total_cmp(&q.x)));
    v
}

fn pair_is_valid(p: &DisjointPair, is_lattice: bool, doubled: bool) -> bool {
    let interior = |c: &Chain| -> Vec<SpaceTimePoint> {
        if is_lattice && doubled && c.nodes.len() >= 2 {
            c.nodes[1..c.nodes.len() - 1].to_vec()
        } else {
            c.nodes.clone()
        }
    };
    let (l, r) = (interior(&p.left), interior(&p.right));
    let disjoint = l.iter().all(|q| !r.contains(q));
    let distinct = !is_lattice || p.left.nodes != p.right.nodes;
    disjoint && distinct && weakly_left(&p.left, &p.right) && p.left.value + p.right.value == p.value
}

fn check_instance(engine: &dyn EngineUnderTest, inst: &Instance) -> Result<usize, Counterexample> {
    let mut ck = Checker { inst, checks: 0 };
    let is_lattice = matches!(inst, Instance::Lattice { .. });
    let quad = inst.quad();
    let pairs = enumerate_disjoint_pairs(inst).map_err(|e| ck.fail("oracle", "enumeration".into(), e.to_string()))?;
    if pairs.chains.is_empty() {
        return Ok(0);
    }

    let v = ck.engine("passage_value", engine.passage_value(inst))?;
    ck.eq("passage_value", pairs.optimum, v)?;

    let optimal: Vec<&Chain> = pairs.chains.iter().filter(|c| c.value == pairs.optimum).collect();
    for side in [Side::Left, Side::Right] {
        let g = ck.engine("geodesic", engine.geodesic(inst, side))?;
        ck.eq("geodesic value", pairs.optimum, g.value)?;
        let extremal = optimal.iter().all(|o| match side {
            Side::Left => weakly_left(&g, o),
            Side::Right => weakly_left(o, &g),
        });
        ck.holds("geodesic extremality", extremal, || format!("{side:?} geodesic {:?}", g.nodes))?;
        ck.holds("geodesic is a listed optimum", optimal.iter().any(|o| o.nodes == g.nodes), || {
            format!("{:?}", g.nodes)
        })?;
    }

    if quad.start != quad.end {
        let got = ck.engine("network", engine.network_vertices(inst))?;
        let want = network_vertices(inst).map_err(|e| ck.fail("oracle", "network".into(), e.to_string()))?;
        ck.eq("network vertex set", sorted_points(want), sorted_points(got))?;
    }

    if quad.start.t == quad.end.t {
        return Ok(ck.checks);
    }
    let d2 = ck.engine("disjoint2_value", engine.disjoint2_value(inst))?;
    ck.eq("disjoint2_value", pairs.pair_optimum, d2)?;

    let doubled = inst.is_doubled();
    for side in [Side::Left, Side::Right] {
        let p = ck.engine("optimizer2", engine.optimizer2(inst, side))?;
        ck.eq("optimizer2 value", pairs.pair_optimum, p.as_ref().map(|p| p.value))?;
        if let Some(p) = p {
            ck.holds("optimizer2 pair is ordered and disjoint", pair_is_valid(&p, is_lattice, doubled), || {
                format!("{p:?}")
            })?;
            if is_lattice {
                let extremal = pairs.optimal_pairs.iter().all(|o| match side {
                    Side::Left => weakly_left(&p.left, &o.left) && weakly_left(&p.right, &o.right),
                    Side::Right => weakly_left(&o.left, &p.left) && weakly_left(&o.right, &p.right),
                });
                ck.holds("optimizer2 extremality", extremal, || format!("{side:?} pair {p:?}"))?;
            }
        }
    }

    if doubled {
        let g = ck.engine("gap", engine.gap(inst))?;
        ck.eq("gap", pairs.pair_optimum.map(|l2| 2.0 * pairs.optimum - l2), g)?;
        if let Some(gr) = ck.engine("greene", engine.greene2(inst))? {
            ck.eq("greene partial sums", Some([pairs.optimum, pairs.pair_optimum.unwrap_or(f64::NAN)]), Some(gr))?;
        }
    }
    Ok(ck.checks)
}

/// Check every engine answer in the batch against enumeration, stopping at the first mismatch.
pub fn verify_engine(engine: &dyn EngineUnderTest, batch: &BatchSpec) -> VerifyReport {
    let mut report = VerifyReport { instances: 0, checks: 0, passed: true, warnings: Vec::new(), counterexample: None };
    if batch.lattice + batch.cloud == 0 {
        report.warnings.push("empty batch: nothing was checked".into());
        return report;
    }
    for inst in batch.instances() {
        report.instances += 1;
        match check_instance(engine, &inst) {
            Ok(n) => report.checks += n,
            Err(cx) => {
                report.passed = false;
                report.counterexample = Some(cx);
                break;
            }
        }
    }
    report
}

/// Tally of weak pair values against disjoint pair values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WeakProbeReport {
    pub instances: usize,
    pub equal: usize,
    pub weak_larger: usize,
    /// Instances with a weak pair but no disjoint pair.
    pub disjoint_infeasible: usize,
}

pub fn weak_probe(batch: &BatchSpec) -> WeakProbeReport {
    let mut r = WeakProbeReport::default();
    for inst in batch.instances() {
        if !inst.is_doubled() || inst.quad().start.t == inst.quad().end.t {
            continue;
        }
        let (Ok(Some(w)), Ok(pairs)) = (weak_pair_value(&inst), enumerate_disjoint_pairs(&inst)) else {
            continue;
        };
        r.instances += 1;
        match pairs.pair_optimum {
            None => r.disjoint_infeasible += 1,
            Some(d) if d == w => r.equal += 1,
            Some(_) => r.weak_larger += 1,
        }
    }
    r
}
