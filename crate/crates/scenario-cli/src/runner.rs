//! Executes a parsed scenario against the library modules and renders the
//! report in human-readable or machine-readable (one record per task) form.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use opalg::cmat::{c, CMat};
use opalg::spacetime::{
    boost_flow, ds_tangency_residual, isometry_algebra_dim, killing_residual, sample_hyperboloid,
    timelike_character, wedge_classify, AffineKillingField, Causality, FlatSpace, WedgeLabel,
};
use opalg::{
    boost_comparison, classical_equivalence_check, classical_posterior, generate_algebra,
    kms_residual, modified_bayes_demo, nc_bayes_update, takesaki_check, AlgState, AlgebraBasis,
    FiniteProbabilitySpace, HarmonicChain, InferenceProblem, PriorPolicy,
};

use crate::expr::eval_matrix_expr;
use crate::scenario::{MatrixDecl, Scenario, Task};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Infeasible,
    Error,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Infeasible => "infeasible",
            Status::Error => "error",
        }
    }
}

/// Per-site profile emitted by `chain_run`.
#[derive(Debug, Clone)]
pub struct ProfileTable {
    /// File stem for CSV emission.
    pub name: String,
    /// (site_index, h_E_weight, bw_weight, rel_dev)
    pub rows: Vec<(usize, f64, f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct TaskRecord {
    pub index: usize,
    pub kind: String,
    pub status: Status,
    /// Ordered key-value details, rendered verbatim in both formats.
    pub details: Vec<(String, String)>,
    /// Whether a non-pass status should fail the run (infeasible results
    /// may be expected and asserted as such in the scenario).
    pub asserted: bool,
    pub table: Option<ProfileTable>,
}

#[derive(Debug)]
pub struct Report {
    pub scenario_name: String,
    pub seed: u64,
    pub tol: f64,
    pub records: Vec<TaskRecord>,
}

impl Report {
    pub fn count(&self, status: Status) -> usize {
        self.records.iter().filter(|r| r.status == status).count()
    }

    /// 0 all-pass, 1 failed assertion or infeasible-when-asserted-feasible,
    /// 2 runtime error in some task.
    pub fn exit_code(&self) -> i32 {
        if self.records.iter().any(|r| r.status == Status::Error) {
            2
        } else if self.records.iter().any(|r| {
            r.status == Status::Fail || (r.status == Status::Infeasible && r.asserted)
        }) {
            1
        } else {
            0
        }
    }
}

fn fnum(v: f64) -> String {
    format!("{v:.12e}")
}

/// Builds the matrix environment; returns per-name errors without aborting.
fn build_env(
    decls: &[MatrixDecl],
) -> (BTreeMap<String, CMat>, BTreeMap<String, String>) {
    let mut env = BTreeMap::new();
    let mut errors = BTreeMap::new();
    for d in decls {
        let built = match (&d.expr, &d.re) {
            (Some(expr), None) => eval_matrix_expr(expr, &env).map_err(|e| e.to_string()),
            (None, Some(re)) => literal_matrix(re, d.im.as_deref()),
            _ => Err("matrix must declare exactly one of `expr` or `re`".to_string()),
        };
        match built {
            Ok(m) => {
                env.insert(d.name.clone(), m);
            }
            Err(e) => {
                errors.insert(d.name.clone(), e);
            }
        }
    }
    (env, errors)
}

fn literal_matrix(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<CMat, String> {
    let rows = re.len();
    if rows == 0 {
        return Err("empty matrix literal".to_string());
    }
    let cols = re[0].len();
    if rows != cols {
        return Err(format!("matrix literal must be square, got {rows}x{cols}"));
    }
    if re.iter().any(|r| r.len() != cols) {
        return Err("ragged matrix literal".to_string());
    }
    if let Some(im) = im {
        if im.len() != rows || im.iter().any(|r| r.len() != cols) {
            return Err("imaginary part shape differs from real part".to_string());
        }
    }
    Ok(CMat::from_fn(rows, cols, |i, j| {
        c(re[i][j], im.map(|m| m[i][j]).unwrap_or(0.0))
    }))
}

fn gather<'a>(
    names: &[String],
    env: &'a BTreeMap<String, CMat>,
    errors: &BTreeMap<String, String>,
) -> Result<Vec<&'a CMat>, String> {
    let mut out = Vec::with_capacity(names.len());
    for n in names {
        if let Some(e) = errors.get(n) {
            return Err(format!("matrix {n:?} failed to build: {e}"));
        }
        out.push(
            env.get(n)
                .ok_or_else(|| format!("matrix {n:?} is not declared"))?,
        );
    }
    Ok(out)
}

fn common_dim(mats: &[&CMat]) -> Result<usize, String> {
    let n = mats.first().ok_or("no matrices given")?.nrows();
    if mats.iter().any(|m| m.nrows() != n || m.ncols() != n) {
        return Err("matrices have mismatched dimensions".to_string());
    }
    Ok(n)
}

fn full_state(rho: &CMat) -> Result<AlgState, String> {
    AlgState::new(AlgebraBasis::full(rho.nrows()), rho.clone()).map_err(|e| e.to_string())
}

pub fn run_scenario(s: &Scenario) -> Report {
    let (env, mat_errors) = build_env(&s.matrices);
    let records = s
        .tasks
        .iter()
        .enumerate()
        .map(|(index, task)| run_task(index, task, s, &env, &mat_errors))
        .collect();
    Report {
        scenario_name: s.name.clone(),
        seed: s.seed,
        tol: s.tol,
        records,
    }
}

fn run_task(
    index: usize,
    task: &Task,
    s: &Scenario,
    env: &BTreeMap<String, CMat>,
    mat_errors: &BTreeMap<String, String>,
) -> TaskRecord {
    let mut record = TaskRecord {
        index,
        kind: task.kind().to_string(),
        status: Status::Pass,
        details: Vec::new(),
        asserted: true,
        table: None,
    };
    if let Err(e) = exec_task(task, s, env, mat_errors, &mut record) {
        record.status = Status::Error;
        record.details.push(("error".to_string(), e));
    }
    record
}

fn exec_task(
    task: &Task,
    s: &Scenario,
    env: &BTreeMap<String, CMat>,
    mat_errors: &BTreeMap<String, String>,
    rec: &mut TaskRecord,
) -> Result<(), String> {
    let tol = s.tol;
    let put = |rec: &mut TaskRecord, k: &str, v: String| {
        rec.details.push((k.to_string(), v));
    };
    match task {
        Task::GenerateAlgebra {
            generators,
            expect_dim,
        } => {
            let gens = gather(generators, env, mat_errors)?;
            let n = common_dim(&gens)?;
            let owned: Vec<CMat> = gens.into_iter().cloned().collect();
            let alg = generate_algebra(n, &owned).map_err(|e| e.to_string())?;
            put(rec, "ambient", n.to_string());
            put(rec, "dim", alg.dim().to_string());
            if let Some(expected) = expect_dim {
                put(rec, "expect_dim", expected.to_string());
                if alg.dim() != *expected {
                    rec.status = Status::Fail;
                }
            }
        }
        Task::BayesUpdate {
            true_state,
            accessible_generators,
            prior,
            assert_feasible,
        } => {
            rec.asserted = *assert_feasible;
            let rho = gather(std::slice::from_ref(true_state), env, mat_errors)?[0].clone();
            let gens = gather(accessible_generators, env, mat_errors)?;
            let n = common_dim(&gens)?;
            if rho.nrows() != n {
                return Err("true state dimension differs from generators".to_string());
            }
            let owned: Vec<CMat> = gens.into_iter().cloned().collect();
            let accessible = generate_algebra(n, &owned).map_err(|e| e.to_string())?;
            let prior_policy = match prior {
                Some(p) => PriorPolicy::Supplied(
                    gather(std::slice::from_ref(p), env, mat_errors)?[0].clone(),
                ),
                None => PriorPolicy::Tracial,
            };
            let problem = InferenceProblem {
                total: AlgebraBasis::full(n),
                accessible,
                true_density: rho,
                prior_policy,
            };
            let result = nc_bayes_update(&problem, tol).map_err(|e| e.to_string())?;
            put(rec, "feasible", result.feasible.to_string());
            put(rec, "takesaki_residual", fnum(result.takesaki_residual));
            if let Some(d) = &result.ce_diagnostics {
                put(rec, "ce_worst", fnum(d.worst()));
            }
            if result.conditioning_warning {
                put(rec, "conditioning_warning", "true".to_string());
            }
            if !result.feasible {
                rec.status = Status::Infeasible;
            }
        }
        Task::ClassicalPosterior {
            probs,
            event_b,
            event_a,
        } => {
            let space = FiniteProbabilitySpace::new(probs.clone()).map_err(|e| e.to_string())?;
            let p = classical_posterior(&space, event_b, event_a).map_err(|e| e.to_string())?;
            put(rec, "posterior", fnum(p));
        }
        Task::ClassicalEquivalence {
            probs,
            event_b,
            event_a,
        } => {
            let space = FiniteProbabilitySpace::new(probs.clone()).map_err(|e| e.to_string())?;
            let residual = classical_equivalence_check(&space, event_b, event_a, tol)
                .map_err(|e| e.to_string())?;
            put(rec, "residual", fnum(residual));
            if residual > tol {
                rec.status = Status::Fail;
            }
        }
        Task::Takesaki {
            state,
            sub_generators,
            assert_feasible,
        } => {
            rec.asserted = *assert_feasible;
            let rho = gather(std::slice::from_ref(state), env, mat_errors)?[0].clone();
            let gens = gather(sub_generators, env, mat_errors)?;
            let n = common_dim(&gens)?;
            if rho.nrows() != n {
                return Err("state dimension differs from generators".to_string());
            }
            let owned: Vec<CMat> = gens.into_iter().cloned().collect();
            let sub = generate_algebra(n, &owned).map_err(|e| e.to_string())?;
            let st = full_state(&rho)?;
            let residual = takesaki_check(&st, &sub).map_err(|e| e.to_string())?;
            put(rec, "residual", fnum(residual));
            if residual > tol {
                rec.status = Status::Infeasible;
            }
        }
        Task::Kms {
            state,
            hamiltonian,
            beta,
        } => {
            let rho = gather(std::slice::from_ref(state), env, mat_errors)?[0].clone();
            let h = gather(std::slice::from_ref(hamiltonian), env, mat_errors)?[0].clone();
            if rho.nrows() != h.nrows() {
                return Err("state and Hamiltonian dimensions differ".to_string());
            }
            let st = full_state(&rho)?;
            let residual = kms_residual(&st, &h, *beta).map_err(|e| e.to_string())?;
            put(rec, "beta", fnum(*beta));
            put(rec, "residual", fnum(residual));
            if residual > tol {
                rec.status = Status::Fail;
            }
        }
        Task::WedgeClassify { dim, point } => {
            let space = FlatSpace::new(*dim).map_err(|e| e.to_string())?;
            if point.len() != *dim {
                return Err(format!(
                    "point has {} coordinates, expected {dim}",
                    point.len()
                ));
            }
            let x = DVector::from_vec(point.clone());
            let label = wedge_classify(space, &x, 1e-12);
            put(rec, "label", label.as_str().to_string());
        }
        Task::KillingAudit { dim } => {
            let space = FlatSpace::new(*dim).map_err(|e| e.to_string())?;
            let gens = AffineKillingField::standard_generators(space);
            let max_residual = gens
                .iter()
                .map(|(_, g)| killing_residual(g))
                .fold(0.0f64, f64::max);
            let iso_dim = isometry_algebra_dim(space);
            let expected = dim * (dim + 1) / 2;
            put(rec, "fields", gens.len().to_string());
            put(rec, "max_killing_residual", fnum(max_residual));
            put(rec, "isometry_dim", iso_dim.to_string());
            if max_residual != 0.0 || iso_dim != expected {
                rec.status = Status::Fail;
            }

            // Wedge/timelike audit: on a seeded sample the boost field must
            // be timelike exactly in the side wedges W3/W4 and spacelike in
            // the cones labeled W1/W2 — the regions the wedge labels call
            // W1/W2 are, by the printed inequalities they transcribe, not
            // the timelike ones. The mismatch is surfaced, not relabeled.
            let boost = AffineKillingField::lorentz(space, 0, 1).map_err(|e| e.to_string())?;
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            let mut consistent = true;
            let mut audited = 0usize;
            for _ in 0..200 {
                let x = DVector::from_iterator(*dim, (0..*dim).map(|_| {
                    use rand::Rng;
                    rng.random_range(-3.0..3.0)
                }));
                let before = wedge_classify(space, &x, 1e-12);
                let t = {
                    use rand::Rng;
                    rng.random_range(-5.0..5.0)
                };
                let after = wedge_classify(space, &boost_flow(space, &x, t), 1e-9);
                let stable = match before {
                    WedgeLabel::HorizonA | WedgeLabel::HorizonB | WedgeLabel::S => matches!(
                        after,
                        WedgeLabel::HorizonA | WedgeLabel::HorizonB | WedgeLabel::S
                    ),
                    _ => before == after,
                };
                let causal = match before {
                    WedgeLabel::W3 | WedgeLabel::W4 => {
                        audited += 1;
                        timelike_character(&boost, &x, 1e-12) == Causality::Timelike
                    }
                    WedgeLabel::W1 | WedgeLabel::W2 => {
                        audited += 1;
                        timelike_character(&boost, &x, 1e-12) == Causality::Spacelike
                    }
                    _ => true,
                };
                consistent &= stable && causal;
            }
            put(rec, "audit_points", audited.to_string());
            put(
                rec,
                "boost_character",
                "timelike_in_W3_W4_spacelike_in_W1_W2".to_string(),
            );
            put(
                rec,
                "label_note",
                "source_text_calls_the_timelike_wedges_W1_W2".to_string(),
            );
            if !consistent {
                rec.status = Status::Fail;
            }
        }
        Task::DsTangency { samples, tau_max } => {
            let space = FlatSpace::new(5).map_err(|e| e.to_string())?;
            let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
            let points = sample_hyperboloid(space, &mut rng, *samples, *tau_max);
            let gens = AffineKillingField::standard_generators(space);
            let mut worst_lorentz: f64 = 0.0;
            let mut min_fail_rate: f64 = 1.0;
            for (name, g) in &gens {
                if name.starts_with('L') {
                    for p in &points {
                        worst_lorentz = worst_lorentz.max(ds_tangency_residual(g, p));
                    }
                } else {
                    let fails = points
                        .iter()
                        .filter(|p| ds_tangency_residual(g, p) > tol)
                        .count();
                    min_fail_rate = min_fail_rate.min(fails as f64 / points.len().max(1) as f64);
                }
            }
            put(rec, "samples", samples.to_string());
            put(rec, "worst_lorentz_residual", fnum(worst_lorentz));
            put(rec, "min_translation_nontangency", fnum(min_fail_rate));
            if worst_lorentz > tol || min_fail_rate < 0.99 {
                rec.status = Status::Fail;
            }
        }
        Task::TfdDemo { levels, beta } => {
            let demo = modified_bayes_demo(*levels, *beta, tol).map_err(|e| e.to_string())?;
            put(rec, "levels", levels.to_string());
            put(rec, "beta", fnum(*beta));
            put(rec, "kms_residual", fnum(demo.kms_residual));
            put(rec, "feasible", demo.result.feasible.to_string());
            if demo.kms_residual > tol || !demo.result.feasible {
                rec.status = Status::Fail;
            }
        }
        Task::ChainRun {
            sites,
            mass,
            coupling,
            profile,
        } => {
            let chain =
                HarmonicChain::new(*sites, *mass, *coupling).map_err(|e| e.to_string())?;
            let cmp = boost_comparison(&chain).map_err(|e| e.to_string())?;
            put(rec, "sites", sites.to_string());
            put(rec, "summary_deviation", fnum(cmp.summary_deviation));
            let name = profile
                .clone()
                .unwrap_or_else(|| format!("chain_{sites}_profile"));
            rec.table = Some(ProfileTable {
                name,
                rows: cmp
                    .rows
                    .iter()
                    .map(|r| (r.site, r.eh_weight, r.bw_weight, r.rel_dev))
                    .collect(),
            });
            if !cmp.summary_deviation.is_finite() {
                rec.status = Status::Fail;
            }
        }
    }
    Ok(())
}

/// Line-oriented machine output: one record per task plus a summary line.
/// Deterministic given (scenario, seed).
pub fn render_records(report: &Report) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "scenario name={} seed={} tol={}",
        report.scenario_name,
        report.seed,
        fnum(report.tol)
    )
    .unwrap();
    for r in &report.records {
        write!(
            out,
            "record index={} kind={} status={}",
            r.index,
            r.kind,
            r.status.as_str()
        )
        .unwrap();
        for (k, v) in &r.details {
            write!(out, " {k}={v}").unwrap();
        }
        writeln!(out).unwrap();
    }
    writeln!(
        out,
        "summary tasks={} pass={} fail={} infeasible={} error={}",
        report.records.len(),
        report.count(Status::Pass),
        report.count(Status::Fail),
        report.count(Status::Infeasible),
        report.count(Status::Error)
    )
    .unwrap();
    out
}

pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "scenario {:?} (seed {}, tol {:.1e})",
        report.scenario_name, report.seed, report.tol
    )
    .unwrap();
    for r in &report.records {
        writeln!(
            out,
            "  [{}] {:<22} {}",
            r.status.as_str(),
            r.kind,
            r.details
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join("  ")
        )
        .unwrap();
        if let Some(t) = &r.table {
            writeln!(out, "         profile {:?}: {} sites", t.name, t.rows.len()).unwrap();
        }
    }
    writeln!(
        out,
        "{} tasks: {} pass, {} fail, {} infeasible, {} error -> exit {}",
        report.records.len(),
        report.count(Status::Pass),
        report.count(Status::Fail),
        report.count(Status::Infeasible),
        report.count(Status::Error),
        report.exit_code()
    )
    .unwrap();
    out
}

/// Renders one profile table as CSV.
pub fn render_csv(table: &ProfileTable) -> String {
    let mut out = String::from("site_index,h_E_weight,bw_weight,rel_dev\n");
    for (site, eh, bw, dev) in &table.rows {
        writeln!(out, "{site},{},{},{}", fnum(*eh), fnum(*bw), fnum(*dev)).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;

    #[test]
    fn empty_scenario_yields_empty_report() {
        let s = parse_scenario("name = \"empty\"").unwrap();
        let report = run_scenario(&s);
        assert!(report.records.is_empty());
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn takesaki_failure_case_is_infeasible_not_error() {
        let text = r#"
name = "tk"
[[matrices]]
name = "rho"
expr = "diag(0.9, 0.1)"
[[matrices]]
name = "sx"
expr = "pauli_x"
[[tasks]]
kind = "takesaki"
state = "rho"
sub_generators = ["sx"]
assert_feasible = false
"#;
        let s = parse_scenario(text).unwrap();
        let report = run_scenario(&s);
        assert_eq!(report.records[0].status, Status::Infeasible);
        assert_eq!(report.exit_code(), 0); // not asserted feasible

        let asserted = text.replace("assert_feasible = false", "assert_feasible = true");
        let s = parse_scenario(&asserted).unwrap();
        assert_eq!(run_scenario(&s).exit_code(), 1);
    }

    #[test]
    fn failing_matrix_poisons_only_referencing_tasks() {
        let text = r#"
name = "iso"
[[matrices]]
name = "bad"
expr = "gibbs(nothing, 1.0)"
[[tasks]]
kind = "kms"
state = "bad"
hamiltonian = "bad"
beta = 1.0
[[tasks]]
kind = "wedge_classify"
point = [0.0, 2.0, 0.0, 0.0]
"#;
        let s = parse_scenario(text).unwrap();
        let report = run_scenario(&s);
        assert_eq!(report.records[0].status, Status::Error);
        assert_eq!(report.records[1].status, Status::Pass);
        assert_eq!(report.records[1].details[0], ("label".into(), "W3".into()));
        assert_eq!(report.exit_code(), 2);
    }

    #[test]
    fn records_are_deterministic() {
        let text = r#"
name = "det"
seed = 5
[[tasks]]
kind = "ds_tangency"
samples = 50
[[tasks]]
kind = "chain_run"
sites = 20
mass = 1e-3
coupling = 1.0
"#;
        let s = parse_scenario(text).unwrap();
        let a = render_records(&run_scenario(&s));
        let b = render_records(&run_scenario(&s));
        assert_eq!(a, b);
        assert!(a.contains("summary tasks=2 pass=2 fail=0 infeasible=0 error=0"));
    }

    #[test]
    fn kms_task_passes_on_gibbs_state() {
        let text = r#"
name = "kms"
[[matrices]]
name = "h"
expr = "diag(0.0, 1.0, 2.0)"
[[matrices]]
name = "rho"
expr = "gibbs(h, 2.0)"
[[tasks]]
kind = "kms"
state = "rho"
hamiltonian = "h"
beta = 2.0
"#;
        let s = parse_scenario(text).unwrap();
        let report = run_scenario(&s);
        assert_eq!(report.records[0].status, Status::Pass);
    }

    #[test]
    fn csv_profile_has_header_and_rows() {
        let table = ProfileTable {
            name: "t".into(),
            rows: vec![(0, 1.0, 2.0, 0.5)],
        };
        let csv = render_csv(&table);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "site_index,h_E_weight,bw_weight,rel_dev"
        );
        assert!(lines.next().unwrap().starts_with("0,1.0"));
    }
}
