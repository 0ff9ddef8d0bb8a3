use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use fim_core::estimators::{default_n_grid, run_mse_experiment, EstimatorId, ExperimentModel, MseRow};
use fim_core::fisher::{ar1_autocovariances, sample_mean_fisher, DerivativeScheme, FisherMatrix, Xi};
use fim_core::process::{
    entropy_report, measure_order_from_windows, verify_markov_order, windows_up_to, FiniteMarkovModel, ModelSpec,
};
use fim_core::sampling::GaussianMarkovModel;
use fim_core::spinchain::{
    ising_grid, marginal, nnn_panel, scan_maps, thermal_scheme, thermometry_report, verify_chain_markov_order,
    zero_derivative_curve, SpinChainModel,
};

use crate::args::*;
use crate::config;
use crate::output::{emit, Format, Table};
use crate::CliError;

type Res<T> = Result<T, CliError>;

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

pub fn run(cli: Cli) -> Res<()> {
    let Cli { global, command } = cli;
    match command {
        Command::Fisher(a) => dispatch(global, a, fisher),
        Command::Mse(a) => dispatch(global, a, mse),
        Command::Gaussian(a) => dispatch(global, a, gaussian),
        Command::Ising(a) => dispatch(global, a, ising),
        Command::Nnn(a) => dispatch(global, a, nnn),
        Command::MarkovOrder(a) => dispatch(global, a, markov_order),
        Command::Entropy(a) => dispatch(global, a, entropy),
    }
}

/// Merge the config file, set up threads, run, and write the output only
/// once everything has succeeded.
fn dispatch<A, F>(global: Global, args: A, body: F) -> Res<()>
where
    A: Serialize + DeserializeOwned + Default,
    F: FnOnce(&A, u64) -> Res<Rendered>,
{
    let mut allowed = config::keys::<Global>();
    allowed.extend(config::keys::<A>());
    let file = config::load(global.config.as_ref(), &allowed)?;
    let g: Global = config::merge(&global, &file)?;
    let args: A = config::merge(&args, &file)?;
    if let Some(n) = g.threads {
        if n == 0 {
            return Err(invalid("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Numeric(format!("thread pool: {e}")))?;
    }
    let rendered = body(&args, g.seed.unwrap_or(DEFAULT_SEED))?;
    let bytes = rendered(g.format.unwrap_or_default())?;
    emit(&bytes, g.out.as_deref())
}

type Rendered = Box<dyn FnOnce(Format) -> Res<Vec<u8>>>;

fn rendered<R: Serialize + 'static>(table: Table<R>) -> Res<Rendered> {
    Ok(Box::new(move |f| table.render(f)))
}

fn looks_like_path(s: &str) -> bool {
    s.ends_with(".json") || s.contains('/') || s.contains(std::path::MAIN_SEPARATOR)
}

fn load_model(m: &ModelArgs) -> Res<FiniteMarkovModel> {
    let name = m.model.as_deref().ok_or_else(|| invalid("--model is required"))?;
    let model = if looks_like_path(name) {
        let text = config::read(Path::new(name))?;
        ModelSpec::from_json(&text)?.build()?
    } else {
        let theta = m.theta.as_ref().ok_or_else(|| invalid("--theta is required for builtin models"))?;
        return Ok(FiniteMarkovModel::builtin(name, theta)?);
    };
    match &m.theta {
        Some(theta) => Ok(model.with_theta(theta)?),
        None => Ok(model),
    }
}

/// Shortest round-trip text of a float.
fn fmt_f64(v: f64) -> String {
    serde_json::Number::from_f64(v).map_or_else(|| v.to_string(), |n| n.to_string())
}

/// A scalar as a number, a matrix as its row-major entries separated by spaces.
fn fmt_matrix(m: &FisherMatrix) -> String {
    match m.value() {
        Some(v) => fmt_f64(v),
        None => m.entries().iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(" "),
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|&x| fmt_f64(x)).collect::<Vec<_>>().join(",")
}

fn xi_value(xi: Option<Xi>) -> f64 {
    match xi {
        Some(Xi::Finite(x)) => x,
        Some(Xi::Diverged) => f64::INFINITY,
        None => f64::NAN,
    }
}

#[derive(Serialize)]
struct FisherRow {
    k: usize,
    #[serde(rename = "F_joint")]
    joint: String,
    #[serde(rename = "F_conditional")]
    conditional: String,
    /// `F_{1:M} + (k - M) f`, from `k = M` on.
    #[serde(rename = "F_markov")]
    markov: Option<String>,
}

fn fisher(a: &FisherArgs, _seed: u64) -> Res<Rendered> {
    let model = load_model(&a.model)?;
    let scheme = match a.scheme.unwrap_or(SchemeName::Central) {
        SchemeName::Analytic => {
            if a.step.is_some() || a.richardson.is_some() {
                return Err(invalid("--step and --richardson apply to the central scheme only"));
            }
            DerivativeScheme::Analytic
        }
        SchemeName::Central => DerivativeScheme::CentralDifference {
            step: a.step,
            richardson: a.richardson.unwrap_or(false),
        },
    };
    let n = a.n.unwrap_or(8);
    let report = fim_core::fisher::markov_decomposition(&model, n, scheme)?;
    let rows = (1..=n)
        .map(|k| FisherRow {
            k,
            joint: fmt_matrix(report.joint_at(k).expect("k <= n")),
            conditional: fmt_matrix(if k == 1 { &report.f1 } else { &report.conditional_terms[k - 2] }),
            markov: (k >= report.order).then(|| fmt_matrix(&report.predicted(k))),
        })
        .collect();
    let table = Table::new("fisher", rows)
        .meta("model", &report.model_id)
        .meta("theta", &report.theta)
        .meta("order", report.order)
        .meta("n", n)
        .meta("scheme", report.scheme)
        .meta("F1", fmt_matrix(&report.f1))
        .meta("rate", fmt_matrix(&report.rate))
        .meta("excess", fmt_matrix(&report.excess))
        .meta("xi", report.xi)
        .meta("residual", report.residual)
        .meta("tolerance", report.tolerance)
        .document(&report);
    rendered(table)
}

fn mse(a: &MseArgs, seed: u64) -> Res<Rendered> {
    let model = load_model(&a.model)?;
    let estimators: Vec<EstimatorId> = a
        .estimator
        .clone()
        .unwrap_or_else(|| vec!["mle".into()])
        .iter()
        .map(|s| s.parse().map_err(|_| invalid(format!("unknown estimator `{s}`"))))
        .collect::<Res<_>>()?;
    if estimators.is_empty() {
        return Err(invalid("no estimator given"));
    }
    let n_grid = a.n_grid.clone().unwrap_or_else(default_n_grid);
    let replicas = a.replicas.unwrap_or(50);
    let exp = ExperimentModel::Finite(model);
    let mut rows: Vec<MseRow> = Vec::new();
    for e in estimators {
        rows.extend(run_mse_experiment(&exp, e, &n_grid, replicas, seed)?.rows());
    }
    rendered(Table::new("mse", rows).meta("seed", seed))
}

#[derive(Serialize)]
struct GaussianRow {
    #[serde(rename = "N")]
    n: usize,
    rho: f64,
    mse: f64,
    mse_stderr: f64,
    /// Inverse exact Fisher information of the sample mean.
    inv_fisher_sample_mean: f64,
    crb_markov: f64,
    crb_iid: f64,
    replicas: usize,
}

fn gaussian(a: &GaussianArgs, seed: u64) -> Res<Rendered> {
    let rhos = a.rho.clone().unwrap_or_else(|| vec![-0.9, 0.0, 0.9]);
    let (mu, gamma0) = (a.mu.unwrap_or(1.0), a.gamma0.unwrap_or(1.0));
    let n_grid = a.n_grid.clone().unwrap_or_else(default_n_grid);
    let replicas = a.replicas.unwrap_or(1000);
    let mut rows = Vec::new();
    for &rho in &rhos {
        let g = GaussianMarkovModel::new(mu, gamma0, rho)?;
        let run = run_mse_experiment(&ExperimentModel::Gaussian(g), EstimatorId::SampleMean, &n_grid, replicas, seed)?;
        for (i, &n) in n_grid.iter().enumerate() {
            let fy = sample_mean_fisher(gamma0, &ar1_autocovariances(gamma0, rho, n), 1.0, n)?;
            rows.push(GaussianRow {
                n,
                rho,
                mse: run.mse[i],
                mse_stderr: run.mse_stderr[i],
                inv_fisher_sample_mean: 1.0 / fy.exact_fisher,
                crb_markov: run.crb_markov[i],
                crb_iid: run.crb_iid[i],
                replicas,
            });
        }
    }
    rendered(
        Table::new("gaussian", rows)
            .meta("mu", mu)
            .meta("gamma0", gamma0)
            .meta("seed", seed),
    )
}

fn temperatures(t: &TempArgs) -> Res<Vec<f64>> {
    if let Some(list) = &t.temps {
        if list.is_empty() || list.iter().any(|&x| !(x > 0.0)) {
            return Err(invalid("temperatures must be positive"));
        }
        return Ok(list.clone());
    }
    let (lo, hi, n) = (t.t_min.unwrap_or(0.05), t.t_max.unwrap_or(10.0), t.t_points.unwrap_or(100));
    if !(lo > 0.0 && hi >= lo) || n == 0 {
        return Err(invalid(format!("bad temperature grid [{lo}, {hi}] with {n} points")));
    }
    if n == 1 {
        return Ok(vec![lo]);
    }
    let span = (hi / lo).ln();
    Ok((0..n).map(|i| lo * (span * i as f64 / (n - 1) as f64).exp()).collect())
}

fn steps(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| lo + step * i as f64).collect()
}

fn non_empty(v: &[f64], what: &str) -> Res<()> {
    if v.is_empty() {
        Err(invalid(format!("{what} must not be empty")))
    } else {
        Ok(())
    }
}

#[derive(Serialize)]
struct CurveRow {
    #[serde(rename = "T")]
    t: f64,
    #[serde(rename = "B")]
    b: f64,
    #[serde(rename = "J")]
    j: f64,
    p_up: f64,
    p_up_up: f64,
    p_up_down: f64,
    p_down_down: f64,
    #[serde(rename = "F1")]
    f1: f64,
    #[serde(rename = "F12")]
    f12: f64,
    f: f64,
    xi: f64,
    #[serde(rename = "delta_F")]
    delta_f: f64,
    c: f64,
}

#[derive(Serialize)]
struct ZeroRow {
    b_over_j: f64,
    #[serde(rename = "T_star")]
    t_star: f64,
    flags: &'static str,
}

fn ising(a: &IsingArgs, _seed: u64) -> Res<Rendered> {
    let mode = a.mode.unwrap_or(IsingMode::Map);
    let ratios = a.b_over_j.clone().unwrap_or_else(|| steps(-3.0, 3.0, 0.25));
    match mode {
        IsingMode::Map => {
            let j = a.j.unwrap_or(1.0);
            non_empty(&ratios, "--b-over-j")?;
            let rows = scan_maps(&ising_grid(j, &ratios, &temperatures(&a.temps)?), thermal_scheme())?;
            rendered(Table::new("ising", rows).meta("mode", "map"))
        }
        IsingMode::Curve => {
            let (b, j) = (a.b.unwrap_or(0.5), a.j.unwrap_or(1.0));
            let rows = temperatures(&a.temps)?
                .into_iter()
                .map(|t| {
                    let m = SpinChainModel::nearest(b, j, t)?;
                    let p = marginal(&m, 2)?;
                    let r = thermometry_report(&m, thermal_scheme())?;
                    let pr = p.probs();
                    Ok(CurveRow {
                        t,
                        b,
                        j,
                        p_up: pr[0] + pr[1],
                        p_up_up: pr[0],
                        p_up_down: pr[1],
                        p_down_down: pr[3],
                        f1: r.f1,
                        f12: r.f12,
                        f: r.f,
                        xi: xi_value(r.xi),
                        delta_f: r.delta_f,
                        c: r.c,
                    })
                })
                .collect::<Res<Vec<_>>>()?;
            rendered(Table::new("ising", rows).meta("mode", "curve"))
        }
        IsingMode::ZeroDerivative => {
            let j = a.j.unwrap_or(-1.0);
            non_empty(&ratios, "--b-over-j")?;
            let (lo, hi) = (a.temps.t_min.unwrap_or(0.05), a.temps.t_max.unwrap_or(5.0));
            let scan = zero_derivative_curve(&ratios, j, lo, hi)?;
            let mut rows: Vec<ZeroRow> = ratios
                .iter()
                .flat_map(|&r| {
                    let found: Vec<ZeroRow> = scan
                        .roots
                        .iter()
                        .filter(|(x, _)| *x == r)
                        .map(|&(x, t)| ZeroRow {
                            b_over_j: x,
                            t_star: t,
                            flags: "",
                        })
                        .collect();
                    let flag = if scan.degenerate.contains(&r) { "degenerate" } else { "no_root" };
                    if found.is_empty() {
                        vec![ZeroRow {
                            b_over_j: r,
                            t_star: f64::NAN,
                            flags: flag,
                        }]
                    } else {
                        found
                    }
                })
                .collect();
            rows.dedup_by(|x, y| x.b_over_j == y.b_over_j && x.t_star == y.t_star);
            rendered(
                Table::new("ising", rows)
                    .meta("mode", "zero-derivative")
                    .meta("J", j)
                    .meta("T_range", format!("{lo},{hi}")),
            )
        }
    }
}

fn nnn(a: &NnnArgs, _seed: u64) -> Res<Rendered> {
    let b = a.b.unwrap_or(1.0);
    let panels = a.j_over_b.clone().unwrap_or_else(|| vec![2.0, -2.0, 0.1, -0.1]);
    let alphas = a.alpha.clone().unwrap_or_else(|| steps(0.0, 1.0, 0.1));
    non_empty(&panels, "--j-over-b")?;
    non_empty(&alphas, "--alpha")?;
    let temps = temperatures(&a.temps)?;
    let points: Vec<_> = panels.iter().flat_map(|&p| nnn_panel(b, p, &alphas, &temps)).collect();
    rendered(Table::new("nnn", scan_maps(&points, thermal_scheme())?))
}

#[derive(Serialize)]
struct OrderRow {
    system: String,
    claimed: Option<usize>,
    measured: Option<usize>,
    max_deviation: f64,
    lower_order_deviation: Option<f64>,
    verified: bool,
    factorization_defect: Option<f64>,
}

fn markov_order(a: &MarkovOrderArgs, _seed: u64) -> Res<Rendered> {
    let tol = a.tol.unwrap_or(1e-10);
    let row = if let Some(couplings) = &a.couplings {
        if a.model.model.is_some() {
            return Err(invalid("give either --model or --couplings, not both"));
        }
        let m = SpinChainModel::new(a.b.unwrap_or(0.0), couplings, a.t.unwrap_or(1.0))?;
        let c = verify_chain_markov_order(&m, tol)?;
        OrderRow {
            system: format!("ising B={} J={} T={}", m.b(), fmt_list(m.couplings()), m.t()),
            claimed: Some(c.expected),
            measured: c.measured,
            max_deviation: c.deviation_at_range,
            lower_order_deviation: None,
            verified: c.verified(),
            factorization_defect: Some(c.factorization_defect),
        }
    } else {
        let model = load_model(&a.model)?;
        let claimed = a.claimed.unwrap_or(model.order());
        let probe = a.probe_depth.unwrap_or(claimed + 2);
        let check = verify_markov_order(&model, claimed, probe, tol)?;
        let measured = measure_order_from_windows(&windows_up_to(&model, probe + 1)?, probe, probe, tol);
        OrderRow {
            system: model.id().to_string(),
            claimed: Some(claimed),
            measured,
            max_deviation: check.max_deviation,
            lower_order_deviation: check.lower_order_deviation,
            verified: check.verified(),
            factorization_defect: None,
        }
    };
    rendered(Table::new("markov-order", vec![row]).meta("tol", tol))
}

#[derive(Serialize)]
struct EntropyRow {
    n: usize,
    #[serde(rename = "H")]
    h_block: f64,
    /// `n h + E`.
    linear: f64,
}

fn entropy(a: &EntropyArgs, _seed: u64) -> Res<Rendered> {
    let model = load_model(&a.model)?;
    let n_max = a.n_max.unwrap_or(8);
    let r = entropy_report(&model, n_max)?;
    let rows = (1..=n_max)
        .map(|n| EntropyRow {
            n,
            h_block: r.block_entropy(n),
            linear: n as f64 * r.h + r.excess,
        })
        .collect();
    rendered(
        Table::new("entropy", rows)
            .meta("model", model.id())
            .meta("h", r.h)
            .meta("excess", r.excess)
            .meta("residual", r.residual),
    )
}
