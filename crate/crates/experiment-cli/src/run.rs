use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use busemann_lab::{
    busemann_gap, classify_semi_infinite, exceptional_scan, horizon_identity_residual, reflected_walk_diag,
    stationary_horizon_tests, BusemannGapProfile, ExceptionalDirection, Horizons, ScanSpec,
};
use gap_lab::export::{to_binary, write_csv};
use gap_lab::{gap_sheet_lattice, zero_set, GapSheet, LatticeGrid};
use model_core::{
    make_lattice_field, make_poisson_cloud, Cell, EnvironmentDescriptor, LatticeField, OrderedQuad, PoissonCloud, Region,
    SpaceTimePoint,
};
use network_classifier::agreement::records_csv;
use network_classifier::{agreement_matrix, AgreementSpec, Model, NetworkType};
use oracle::{verify_engine, BatchSpec, ExactEngine};
use passage_engine::{lattice, poisson};
use rayon::prelude::*;

use crate::analysis::{pooled_brownianity, zero_set_dimension};
use crate::config::{replicate_seed, Command, ExperimentConfig, ModelSpec};
use crate::manifest::{write_artifact, write_manifest, Manifest};
use crate::svg::{render_svg, Layer, SvgInput, SvgStyle};
use crate::CliError;

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub manifest: Manifest,
    /// Result of the acceptance checks of `verify`; true for other commands.
    pub passed: bool,
}

struct Run<'a> {
    cfg: &'a ExperimentConfig,
    dir: &'a Path,
    manifest: Manifest,
    passed: bool,
}

impl Run<'_> {
    fn write(&mut self, path: &str, schema: &str, bytes: &[u8]) -> Result<(), CliError> {
        write_artifact(self.dir, &mut self.manifest, path, schema, bytes)
    }

    fn summary(&mut self, key: &str, v: f64) {
        self.manifest.summaries.insert(key.to_string(), v.is_finite().then_some(v));
    }

    fn seeds(&self) -> Vec<u64> {
        (0..self.cfg.experiment.replicates).map(|r| replicate_seed(self.cfg.experiment.seed, r)).collect()
    }
}

/// Runs the configured command, writing artifacts and `manifest.json` into `out`.
pub fn run_experiment(cfg: &ExperimentConfig, out: &Path) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    let start = Instant::now();
    let body = || -> Result<(Manifest, bool), CliError> {
        let mut run = Run { cfg, dir: out, manifest: Manifest::new(Some(cfg.clone())), passed: true };
        match cfg.command() {
            Command::Sample => sample(&mut run)?,
            Command::Gap => gap(&mut run)?,
            Command::Classify => classify(&mut run)?,
            Command::Busemann => busemann(&mut run)?,
            Command::Dim => dim(&mut run)?,
            Command::Verify => verify(&mut run)?,
        }
        Ok((run.manifest, run.passed))
    };
    let (mut manifest, passed) = match cfg.experiment.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Pool(e.to_string()))?
            .install(body)?,
        None => body()?,
    };
    manifest.artifacts.sort_by(|a, b| a.path.cmp(&b.path));
    manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
    write_manifest(out, &manifest)?;
    Ok(RunOutcome { dir: out.to_path_buf(), manifest, passed })
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        f64::NAN
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or("NA".to_string(), |v| v.to_string())
}

fn sample(run: &mut Run<'_>) -> Result<(), CliError> {
    let p = run.cfg.sample();
    let tmax = p.times.iter().copied().fold(0.0, f64::max);
    let seeds = run.seeds();
    let rows: Result<Vec<(EnvironmentDescriptor, Vec<f64>)>, CliError> = seeds
        .par_iter()
        .map(|&seed| match &p.model {
            ModelSpec::Poisson { rate } => {
                let region = Region::new(-tmax / 2.0, tmax / 2.0, 0.0, tmax);
                let c = make_poisson_cloud(seed, *rate, region).map_err(|e| CliError::engine(format!("seed {seed}"), e))?;
                let vals = p
                    .times
                    .iter()
                    .map(|&t| {
                        let q = OrderedQuad::new(SpaceTimePoint::new(0.0, 0.0), SpaceTimePoint::new(0.0, t)).unwrap();
                        poisson::passage_value(&c, &q).map_err(|e| CliError::engine(format!("seed {seed}, t {t}"), e))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((EnvironmentDescriptor::from(&c), vals))
            }
            ModelSpec::Lattice { law } => {
                let side = (tmax / 2.0) as usize + 1;
                let f = make_lattice_field(seed, side, side, law.clone()).map_err(|e| CliError::engine(format!("seed {seed}"), e))?;
                let vals = p
                    .times
                    .iter()
                    .map(|&t| {
                        let k = (t / 2.0) as usize;
                        lattice::passage_value(&f, Cell::new(0, 0), Cell::new(k, k))
                            .map_err(|e| CliError::engine(format!("seed {seed}, t {t}"), e))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Ok((EnvironmentDescriptor::from(&f), vals))
            }
        })
        .collect();
    let rows = rows?;
    let mut csv = String::from("replicate,seed,t,value,ratio\n");
    for (r, ((_, vals), seed)) in rows.iter().zip(&seeds).enumerate() {
        for (&t, &v) in p.times.iter().zip(vals) {
            writeln!(csv, "{r},{seed},{t},{v},{}", v / (2.0 * t)).unwrap();
        }
    }
    run.write("passage.csv", "passage-csv/1", csv.as_bytes())?;
    for (k, &t) in p.times.iter().enumerate() {
        let ratios: Vec<f64> = rows.iter().map(|(_, v)| v[k] / (2.0 * t)).collect();
        run.summary(&format!("mean_ratio_t{t}"), mean(&ratios));
    }
    run.manifest.environments = rows.into_iter().map(|(d, _)| d).collect();
    Ok(())
}

fn lattice_sheet(run: &Run<'_>, seed: u64, law: &model_core::Law, width: usize, horizon: usize) -> Result<(LatticeField, GapSheet), CliError> {
    let _ = run;
    let grid = LatticeGrid::centered(width, horizon);
    let side = grid.field_side();
    let f = make_lattice_field(seed, side, side, law.clone()).map_err(|e| CliError::engine(format!("seed {seed}"), e))?;
    let sheet = gap_sheet_lattice(&f, &grid).map_err(|e| CliError::engine(format!("gap sheet, seed {seed}"), e))?;
    Ok((f, sheet))
}

fn sheet_rows(sheet: &GapSheet) -> Vec<Vec<Option<f64>>> {
    (0..sheet.xs.len()).map(|i| sheet.row(i)).collect()
}

fn gap(run: &mut Run<'_>) -> Result<(), CliError> {
    let p = run.cfg.gap();
    let seeds = run.seeds();
    let sheets: Result<Vec<_>, CliError> =
        seeds.par_iter().map(|&s| lattice_sheet(run, s, &p.law, p.width, p.horizon())).collect();
    let sheets = sheets?;
    let mut zeros = Vec::new();
    for (r, (f, sheet)) in sheets.iter().enumerate() {
        let mut csv = Vec::new();
        write_csv(sheet, &mut csv).map_err(|e| CliError::io(run.dir, e))?;
        run.write(&format!("gap_r{r}.csv"), "gap-sheet-csv/1", &csv)?;
        let (header, bytes) = to_binary(sheet);
        run.write(&format!("gap_r{r}.bin"), "gap-sheet/1", &bytes)?;
        run.write(&format!("gap_r{r}.bin.json"), "gap-sheet-header/1", header.as_bytes())?;
        let style = SvgStyle { title: Some(format!("gap sheet, replicate {r}")), ..SvgStyle::default() };
        run.write(&format!("gap_r{r}.svg"), "svg", render_svg(SvgInput::Heatmap(&sheet_rows(sheet)), &style).as_bytes())?;
        let z = zero_set(sheet);
        let layers = [Layer { color: "#c00000".into(), cells: z.cells.clone() }];
        let (nx, ny) = sheet.shape();
        let svg = render_svg(SvgInput::Overlay { rows: nx, cols: ny, layers: &layers }, &SvgStyle::default());
        run.write(&format!("zeros_r{r}.svg"), "svg", svg.as_bytes())?;
        zeros.push(z.len() as f64);
        run.manifest.environments.push(EnvironmentDescriptor::from(f));
    }
    run.summary("zero_count_mean", mean(&zeros));
    Ok(())
}

fn classify(run: &mut Run<'_>) -> Result<(), CliError> {
    let p = run.cfg.classify();
    let spec = AgreementSpec {
        seed: run.cfg.experiment.seed,
        law: p.law.clone(),
        horizon: p.horizon.unwrap_or(2 * p.width),
        width: p.width,
        fields: run.cfg.experiment.replicates,
        points: p.points * run.cfg.experiment.replicates,
        radii: p.radii.clone(),
        coarse_fraction: p.coarse_fraction,
    };
    let (m, records) = agreement_matrix(&spec).map_err(|e| CliError::engine("agreement matrix", e))?;
    run.write("agreement.csv", "agreement-matrix-csv/1", m.to_csv().as_bytes())?;
    run.write("agreement_coarse.csv", "agreement-matrix-csv/1", m.coarse_to_csv().as_bytes())?;
    run.write("agreement.json", "agreement-matrix/1", m.to_json().as_bytes())?;
    run.write("records.csv", "classification-records-csv/1", records_csv(&records).as_bytes())?;
    run.summary("samples", m.samples as f64);
    run.summary("zero_split_rate", m.zero_split_rate());
    run.summary("disjoint_split_rate", m.disjoint_split_rate());
    if let Some(a) = m.agreement_on(&NetworkType::MINIMUM_TYPES) {
        run.summary("minimum_type_agreement", a);
    }
    if let Some(a) = m.coarse_agreement_on(&NetworkType::MINIMUM_TYPES) {
        run.summary("coarse_minimum_type_agreement", a);
    }
    Ok(())
}

enum Env {
    Lattice(LatticeField),
    Poisson(PoissonCloud),
}

impl Env {
    fn model(&self) -> Model<'_> {
        match self {
            Env::Lattice(f) => Model::Lattice(f),
            Env::Poisson(c) => Model::Poisson(c),
        }
    }

    fn descriptor(&self) -> EnvironmentDescriptor {
        match self {
            Env::Lattice(f) => f.into(),
            Env::Poisson(c) => c.into(),
        }
    }
}

#[derive(serde::Serialize)]
struct BusemannSummary<'a> {
    stationary: &'a busemann_lab::StationaryReport,
    exceptional: Vec<(f64, f64, f64, bool, f64)>,
    reflected: Vec<busemann_lab::ReflectedWalkReport>,
}

fn busemann(run: &mut Run<'_>) -> Result<(), CliError> {
    let p = run.cfg.busemann();
    let h = p.horizon;
    let hz = Horizons::doubling(p.base, h);
    let max_theta = p
        .thetas
        .iter()
        .map(|t| t.abs() + p.delta.abs())
        .chain(p.scan.window.iter().map(|t| t.abs() + p.delta.abs().max(1e-6)))
        .fold(0.0, f64::max);
    let steps = (2.0 * p.reach / p.step).round() as usize;
    let xs: Vec<f64> = (0..=steps).map(|k| -p.reach + k as f64 * p.step).collect();
    let mut cert_fracs = Vec::new();
    let mut violations = 0usize;
    let mut checked = 0usize;
    let mut n_exc = 0usize;
    let mut g_cert = 0usize;
    let mut g_total = 0usize;
    let mut dims = Vec::new();
    let mut r2s = Vec::new();
    for (r, seed) in run.seeds().into_iter().enumerate() {
        let far = p.base + 2.0 * h;
        let env = match &p.model {
            ModelSpec::Lattice { law } => {
                let side = ((far + (2.0 * h * max_theta).max(p.reach)) / 2.0).ceil() as usize + 2;
                Env::Lattice(make_lattice_field(seed, side, side, law.clone()).map_err(|e| CliError::engine(format!("seed {seed}"), e))?)
            }
            ModelSpec::Poisson { rate } => {
                let w = p.reach + 2.0 * h;
                let c = make_poisson_cloud(seed, *rate, Region::new(-w, w, p.base, far))
                    .map_err(|e| CliError::engine(format!("seed {seed}"), e))?;
                Env::Poisson(c)
            }
        };
        let model = env.model();
        let ctx = |what: &str| format!("{what}, replicate {r} (seed {seed})");
        let mut report = stationary_horizon_tests(model, &p.thetas, p.side, &xs, &hz, p.delta)
            .map_err(|e| CliError::engine(ctx("stationary horizon"), e))?;
        let mut csv = String::from("theta,x,value,certified,coalescence_time\n");
        for prof in &report.profiles {
            csv.push_str(prof.to_csv().split_once('\n').map_or("", |(_, rest)| rest));
        }
        run.write(&format!("busemann_r{r}.csv"), "busemann-profile-csv/1", csv.as_bytes())?;
        cert_fracs.extend(report.directions.iter().map(|d| d.certified_fraction));
        checked += report.quadrangle_checked;
        violations += report.quadrangle_violations.len();
        report.profiles.clear();

        let mut spec = ScanSpec::new((p.scan.window[0], p.scan.window[1]), p.scan.steps, p.base, h);
        spec.threshold = p.scan.threshold;
        let mut found = exceptional_scan(model, &spec).map_err(|e| CliError::engine(ctx("exceptional scan"), e))?;
        found.sort_by(|a, b| b.separation.total_cmp(&a.separation).then(a.theta.total_cmp(&b.theta)));
        found.truncate(p.scan.keep);
        found.sort_by(|a, b| a.theta.total_cmp(&b.theta));
        n_exc += found.len();
        let profiles: Result<Vec<BusemannGapProfile>, CliError> = found
            .iter()
            .map(|e| busemann_gap(model, e, &xs, &hz).map_err(|err| CliError::engine(ctx(&format!("busemann gap at {}", e.theta)), err)))
            .collect();
        let profiles = profiles?;
        let mut gcsv = String::from("direction,theta,x,value,certified\n");
        let mut semi = String::from("direction,theta,x,dictionary,geometric,pattern\n");
        let mut ident = String::from("direction,theta,theta1,theta2,x,residual_first,residual_second,provisional\n");
        let mut reflected = Vec::new();
        for (k, (e, prof)) in found.iter().zip(&profiles).enumerate() {
            for ((x, v), c) in prof.xs.iter().zip(&prof.values).zip(&prof.certified) {
                writeln!(gcsv, "{k},{},{x},{},{c}", e.theta, opt(v[0])).unwrap();
                g_total += 1;
                g_cert += usize::from(*c);
            }
            for i in 1..prof.xs.len().saturating_sub(1) {
                let s = classify_semi_infinite(model, e, prof, i, &p.radii).map_err(|err| CliError::engine(ctx("semi-infinite type"), err))?;
                writeln!(semi, "{k},{},{},{},{},{}", e.theta, prof.xs[i], s.dictionary.label(), s.geometric.label(), s.pattern).unwrap();
            }
            let (t1, t2) = (e.theta_below - p.delta.abs().max(1e-6), e.theta_above + p.delta.abs().max(1e-6));
            if !e.is_tie() && t1 > -1.0 && t2 < 1.0 {
                for x in xs.iter().step_by(4) {
                    let id = horizon_identity_residual(model, e, t1, t2, *x, &hz).map_err(|err| CliError::engine(ctx("identity residual"), err))?;
                    writeln!(ident, "{k},{},{t1},{t2},{x},{},{},{}", e.theta, opt(id.residuals[0]), opt(id.residuals[1]), id.provisional).unwrap();
                }
            }
            let d = reflected_walk_diag(prof);
            if let Some(est) = &d.dimension {
                dims.push(est.dimension);
            }
            if d.lags.len() >= 2 {
                r2s.push(d.r2);
            }
            reflected.push(d);
        }
        run.write(&format!("gtheta_r{r}.csv"), "busemann-gap-csv/1", gcsv.as_bytes())?;
        run.write(&format!("semi_infinite_r{r}.csv"), "semi-infinite-types-csv/1", semi.as_bytes())?;
        run.write(&format!("identity_r{r}.csv"), "identity-residual-csv/1", ident.as_bytes())?;
        let summary = BusemannSummary {
            stationary: &report,
            exceptional: found.iter().map(|e: &ExceptionalDirection| (e.theta, e.theta_below, e.theta_above, e.is_tie(), e.separation)).collect(),
            reflected,
        };
        let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
        run.write(&format!("busemann_r{r}.json"), "busemann-report/1", json.as_bytes())?;
        run.manifest.environments.push(env.descriptor());
    }
    run.summary("certified_fraction_mean", mean(&cert_fracs));
    run.summary("quadrangle_checked", checked as f64);
    run.summary("quadrangle_violations", violations as f64);
    run.summary("exceptional_directions", n_exc as f64);
    run.summary("gap_certified_fraction", if g_total == 0 { 0.0 } else { g_cert as f64 / g_total as f64 });
    if !dims.is_empty() {
        run.summary("reflected_dimension_mean", mean(&dims));
    }
    if !r2s.is_empty() {
        run.summary("reflected_r2_mean", mean(&r2s));
    }
    Ok(())
}

fn dim(run: &mut Run<'_>) -> Result<(), CliError> {
    let p = run.cfg.dim();
    let horizon = p.horizon.unwrap_or(2 * p.width);
    let seeds = run.seeds();
    let rows: Result<Vec<_>, CliError> = seeds
        .par_iter()
        .map(|&s| {
            let (f, sheet) = lattice_sheet(run, s, &p.law, p.width, horizon)?;
            Ok((EnvironmentDescriptor::from(&f), zero_set(&sheet).len(), zero_set_dimension(&sheet), pooled_brownianity(&sheet)))
        })
        .collect();
    let rows = rows?;
    let mut csv = String::from("replicate,seed,zeros,dimension,dimension_r2,brownian_slope,brownian_r2\n");
    let (mut dims, mut dr2, mut br2) = (Vec::new(), Vec::new(), Vec::new());
    for (r, ((_, zeros, d, b), seed)) in rows.iter().zip(&seeds).enumerate() {
        let (dv, dr) = d.as_ref().map_or((None, None), |d| (Some(d.dimension), Some(d.r2)));
        writeln!(csv, "{r},{seed},{zeros},{},{},{},{}", opt(dv), opt(dr), b.slope, b.r2).unwrap();
        dims.extend(dv);
        dr2.extend(dr);
        br2.push(b.r2);
    }
    run.write("dim.csv", "dimension-csv/1", csv.as_bytes())?;
    run.summary("dimension_mean", mean(&dims));
    run.summary("dimension_r2_mean", mean(&dr2));
    run.summary("brownian_r2_mean", mean(&br2));
    run.manifest.environments = rows.into_iter().map(|r| r.0).collect();
    Ok(())
}

fn verify(run: &mut Run<'_>) -> Result<(), CliError> {
    let p = run.cfg.verify();
    let batch = BatchSpec {
        seed: run.cfg.experiment.seed,
        lattice: p.lattice,
        cloud: p.cloud,
        max_side: p.max_side,
        max_points: p.max_points,
    };
    let report = verify_engine(&ExactEngine, &batch);
    run.write("verify.json", "verify-report/1", report.to_json().as_bytes())?;
    run.summary("instances", report.instances as f64);
    run.summary("checks", report.checks as f64);
    run.passed = report.passed;
    Ok(())
}
