mod parse;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use carnot_iso::geodesics::verify_assumption_c;
use carnot_iso::isodiametric::{analytic_c_upper, apex_reach, cdc_upper_bound, maximize_bump, sigma_bounds};
use carnot_iso::measures::{cc_unit_ball_volume, mc_measure, unit_ball_volume};
use carnot_iso::metrics::{CcConfig, Metric};
use carnot_iso::{Distance, Estimate, Method, QuadratureConfig, SampledSet, Spec};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

const SYNTAX_HELP: &str = "\
Groups:  h<N> (Heisenberg H^N), htype-h<N> (H^N as an H-type group),
         quaternionic, a JSON document such as {\"kind\":\"heisenberg\",\"n\":2}
         or {\"kind\":\"htype\",\"m\":2,\"k\":1,\"J\":[[0,-1,1,0]]}, or @file.json.
Metrics: dinf (with --c1, --c2), gauge, cc, or JSON such as {\"metric\":\"gauge\"}.
Points:  [x1,...,x2n;t] for Heisenberg groups, (X1,...,Xm|Z1,...,Zk) for H-type.
Exit codes: 0 success, 2 input error, 3 numerical non-convergence.
CARNOT_ISO_THREADS caps worker threads; results do not depend on it.";

#[derive(Parser)]
#[command(name = "carnot-iso", version, about = "Distances, ball volumes and isodiametric bounds on Heisenberg and H-type groups", after_help = SYNTAX_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Group; defaults to h<n>.
    #[arg(long, global = true)]
    group: Option<String>,
    #[arg(long, global = true)]
    metric: Option<String>,
    /// Heisenberg dimension used when --group is absent.
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true, default_value_t = 1.0)]
    c1: f64,
    #[arg(long, global = true, default_value_t = 1.0)]
    c2: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo draws.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    budget: u64,
    /// Quadrature absolute tolerance, and root tolerance of the cc distance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two points.
    Distance { p: String, q: String },
    /// Lebesgue measure of the closed unit ball.
    BallVolume {
        /// Add a Monte Carlo estimate of the same ball.
        #[arg(long)]
        mc: bool,
    },
    /// Upper bounds on the isodiametric constant of the cc distance for a range of n.
    CdcTable {
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 9)]
        n_max: usize,
    },
    /// Checks the reach bound behind a non-isodiametric ball.
    Verify {
        #[arg(value_enum)]
        counterexample: Counterexample,
    },
    /// Searches the bump radius maximizing the isodiametric ratio of ball plus bump.
    BumpSearch {
        #[arg(long)]
        rho_min: Option<f64>,
        #[arg(long)]
        rho_max: Option<f64>,
        /// Draws used to sample the apex reach.
        #[arg(long, default_value_t = 200_000)]
        reach_budget: u64,
        /// Also write a gnuplot script plotting the CSV given by --output.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Interval for the Besicovitch density constant sigma = 1/C_d.
    Sigma {
        /// Lower bound on C_d; found by a bump search when absent.
        #[arg(long)]
        c_lower: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        c_lower_error: f64,
        /// Upper bound on C_d; the analytic bound when absent.
        #[arg(long)]
        c_upper: Option<f64>,
        #[arg(long, default_value_t = 200_000)]
        reach_budget: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Counterexample {
    Dinf,
    Gauge,
    Cc,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<carnot_iso::Error> for Failure {
    fn from(e: carnot_iso::Error) -> Self {
        Self {
            code: if e.is_numerical() { 3 } else { 2 },
            message: e.to_string(),
        }
    }
}

fn input(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

struct Report {
    json: Value,
    csv: String,
}

impl Cli {
    fn spec(&self, fallback: &str) -> Result<Spec, Failure> {
        match (&self.group, self.n) {
            (Some(g), _) => parse::group(g).map_err(input),
            (None, Some(n)) => parse::group(&format!("h{n}")).map_err(input),
            (None, None) => parse::group(fallback).map_err(input),
        }
    }

    fn distance(&self) -> Result<Distance, Failure> {
        let name = self.metric.as_deref().ok_or_else(|| input("--metric is required"))?;
        parse::metric(name, self.c1, self.c2, self.tol).map_err(input)
    }

    fn quad(&self) -> Result<QuadratureConfig, Failure> {
        let q = match self.tol {
            Some(t) => QuadratureConfig::with_tol(t),
            None => QuadratureConfig::default(),
        };
        q.validate()?;
        Ok(q)
    }

    fn run(&self, command: &str) -> Value {
        json!({
            "command": command,
            "seed": self.seed,
            "budget": self.budget,
        })
    }
}

fn group_label(spec: &Spec) -> String {
    match spec {
        Spec::Heisenberg { n } => format!("h{n}"),
        Spec::HType(h) => format!("htype-m{}-k{}", h.m(), h.k()),
    }
}

fn sampled(value: f64, samples: u64, seed: u64) -> Estimate {
    Estimate {
        value,
        error: 0.0,
        method: Method::SampledExtremum,
        samples,
        seed: Some(seed),
    }
}

fn solved(value: f64, config: &CcConfig) -> Estimate {
    Estimate {
        value,
        error: config.root_tolerance.max(f64::EPSILON) * value.max(1.0),
        method: Method::RootFinding,
        samples: 0,
        seed: None,
    }
}

fn method_name(m: Method) -> String {
    serde_json::to_value(m).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

fn csv_estimate(e: &Estimate) -> String {
    format!(
        "{},{},{},{},{}",
        e.value,
        e.error,
        method_name(e.method),
        e.samples,
        e.seed.map_or(String::new(), |s| s.to_string())
    )
}

fn cmd_distance(cli: &Cli, p: &str, q: &str) -> Result<Report, Failure> {
    let spec = cli.spec("h1")?;
    let metric = cli.distance()?;
    let p = parse::point(p).map_err(input)?;
    let q = parse::point(q).map_err(input)?;
    let d = metric.dist(&spec, &p, &q)?;
    let estimate = match &metric {
        Metric::Cc(config) => solved(d, config),
        _ => Estimate::closed_form(d),
    };
    Ok(Report {
        json: json!({
            "run": cli.run("distance"),
            "group": spec,
            "metric": metric,
            "p": p,
            "q": q,
            "distance": estimate,
        }),
        csv: format!("value,error,method,samples,seed\n{}\n", csv_estimate(&estimate)),
    })
}

fn cmd_ball_volume(cli: &Cli, with_mc: bool) -> Result<Report, Failure> {
    let spec = cli.spec("h1")?;
    let metric = cli.distance()?;
    let volume = unit_ball_volume(&spec, &metric, &cli.quad()?)?;
    let mut rows = vec![volume];
    let mut json = json!({
        "run": cli.run("ball-volume"),
        "group": spec,
        "metric": metric,
        "volume": volume,
    });
    if with_mc {
        let ball = SampledSet::ball(&spec, &metric, &spec.identity(), 1.0)?;
        let mc = mc_measure(&ball, cli.budget, cli.seed)?;
        let combined = (mc.error.powi(2) + volume.error.powi(2)).sqrt();
        json["monte_carlo"] = json!(mc);
        json["agrees_within_3_sigma"] = json!((mc.value - volume.value).abs() <= 3.0 * combined);
        rows.push(mc);
    }
    let mut csv = String::from("group,metric,value,error,method,samples,seed\n");
    for r in &rows {
        csv += &format!("{},{},{}\n", group_label(&spec), metric.name(), csv_estimate(r));
    }
    Ok(Report { json, csv })
}

fn cmd_cdc_table(cli: &Cli, n_min: usize, n_max: usize) -> Result<Report, Failure> {
    if n_min == 0 {
        return Err(input("--n-min must be >= 1"));
    }
    let quad = cli.quad()?;
    let mut rows = Vec::new();
    let mut csv = String::from("n,cc_ball_volume,cdc_upper_bound,cc_ball_volume_error,cdc_upper_bound_error,method\n");
    for n in n_min..=n_max {
        let volume = cc_unit_ball_volume::<f64>(n, &quad)?;
        let bound = cdc_upper_bound(n, &quad)?;
        csv += &format!(
            "{n},{},{},{},{},{}\n",
            volume.value,
            bound.value,
            volume.error,
            bound.error,
            method_name(bound.method)
        );
        rows.push(json!({"n": n, "cc_ball_volume": volume, "cdc_upper_bound": bound}));
    }
    Ok(Report {
        json: json!({
            "run": cli.run("cdc-table"),
            "abs_tol": quad.abs_tol,
            "rows": rows,
        }),
        csv,
    })
}

fn rows_csv(rows: &[(&str, Estimate)]) -> String {
    let mut csv = String::from("quantity,value,error,method,samples,seed\n");
    for (name, e) in rows {
        csv += &format!("{name},{}\n", csv_estimate(e));
    }
    csv
}

fn cmd_verify(cli: &Cli, which: Counterexample) -> Result<Report, Failure> {
    match which {
        Counterexample::Dinf | Counterexample::Gauge => {
            let (fallback, metric) = match which {
                Counterexample::Dinf => ("h1", Distance::dinf(cli.c1, cli.c2)?),
                _ => ("htype-h1", Distance::Gauge),
            };
            let spec = cli.spec(fallback)?;
            let reach = apex_reach(&spec, &metric, cli.budget, cli.seed)?;
            let bound = reach.analytic_bound.expect("analytic bound for dinf and gauge");
            let sup = reach.sampled_sup;
            let margin = sampled(2.0 - sup.value, sup.samples, cli.seed);
            let holds = sup.value <= bound.value + 1e-9;
            Ok(Report {
                json: json!({
                    "run": cli.run("verify"),
                    "counterexample": metric.name(),
                    "group": spec,
                    "metric": metric,
                    "apex": reach.apex,
                    "analytic_bound": bound,
                    "sampled_sup": sup,
                    "argmax": reach.argmax,
                    "margin_to_diameter": margin,
                    "bound_holds": holds,
                }),
                csv: rows_csv(&[("analytic_bound", bound), ("sampled_sup", sup), ("margin_to_diameter", margin)]),
            })
        }
        Counterexample::Cc => {
            let spec = cli.spec("h1")?;
            let config = match parse::metric("cc", 1.0, 1.0, cli.tol).map_err(input)? {
                Metric::Cc(c) => c,
                _ => unreachable!(),
            };
            let r = verify_assumption_c(&spec, cli.budget, cli.seed, &config)?;
            let max = sampled(r.sampled_max_roundtrip, r.samples, r.seed);
            let margin = sampled(r.margin, r.samples, r.seed);
            let from_origin = solved(r.continuation_distance_from_origin, &config);
            let from_cut = solved(r.continuation_distance_from_cut_point, &config);
            Ok(Report {
                json: json!({
                    "run": cli.run("verify"),
                    "counterexample": "cc",
                    "group": spec,
                    "cut_point": r.cut_point,
                    "sampled_max_roundtrip": max,
                    "margin": margin,
                    "argmax": r.argmax,
                    "continuation_point": r.continuation_point,
                    "continuation_distance_from_origin": from_origin,
                    "continuation_distance_from_cut_point": from_cut,
                    "excluded_samples": r.excluded_samples,
                    "exclusion_radius": Estimate::closed_form(r.exclusion_radius),
                    "margin_positive": r.margin > 0.0,
                }),
                csv: rows_csv(&[
                    ("sampled_max_roundtrip", max),
                    ("margin", margin),
                    ("continuation_distance_from_origin", from_origin),
                    ("continuation_distance_from_cut_point", from_cut),
                ]),
            })
        }
    }
}

fn cmd_bump_search(
    cli: &Cli,
    rho_min: Option<f64>,
    rho_max: Option<f64>,
    reach_budget: u64,
    plot: Option<&PathBuf>,
) -> Result<Report, Failure> {
    let spec = cli.spec("h1")?;
    let metric = cli.distance()?;
    if plot.is_some() && (cli.format != Format::Csv || cli.output.is_none()) {
        return Err(input("--plot needs --format csv and --output for the data file"));
    }
    let range = match (rho_min, rho_max) {
        (None, None) => None,
        (Some(lo), Some(hi)) => Some([lo, hi]),
        _ => return Err(input("give both --rho-min and --rho-max, or neither")),
    };
    let search = maximize_bump(&spec, &metric, range, reach_budget, cli.budget, cli.seed, &cli.quad()?)?;
    let mut trace = search.trace.clone();
    trace.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut csv = String::from("rho,ratio,error,method,samples,seed\n");
    for (rho, e) in &trace {
        csv += &format!("{rho},{}\n", csv_estimate(e));
    }
    if let (Some(script), Some(data)) = (plot, &cli.output) {
        let text = format!(
            "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'rho'\nset ylabel 'isodiametric ratio'\nplot '{}' using 1:2:3 with yerrorbars\n",
            data.display()
        );
        std::fs::write(script, text).map_err(|e| input(format!("cannot write {}: {e}", script.display())))?;
    }
    Ok(Report {
        json: json!({
            "run": cli.run("bump-search"),
            "group": spec,
            "metric": metric,
            "search": search,
        }),
        csv,
    })
}

fn cmd_sigma(
    cli: &Cli,
    c_lower: Option<f64>,
    c_lower_error: f64,
    c_upper: Option<f64>,
    reach_budget: u64,
) -> Result<Report, Failure> {
    let spec = cli.spec("h1")?;
    let metric = cli.distance()?;
    let quad = cli.quad()?;
    let lower = match c_lower {
        Some(v) => {
            if c_lower_error.is_nan() || c_lower_error < 0.0 {
                return Err(input("--c-lower-error must be >= 0"));
            }
            Estimate {
                value: v,
                error: c_lower_error,
                method: Method::ClosedForm,
                samples: 0,
                seed: None,
            }
        }
        None => maximize_bump(&spec, &metric, None, reach_budget, cli.budget, cli.seed, &quad)?.best.ratio,
    };
    let upper = match c_upper {
        Some(v) => Estimate::closed_form(v),
        None => analytic_c_upper(&spec, &metric, &quad)?,
    };
    let bounds = sigma_bounds(lower, upper)?;
    let csv = format!(
        "c_lower,c_upper,sigma_min,sigma_max\n{},{},{},{}\n",
        bounds.c_lower, bounds.c_upper, bounds.sigma_interval[0], bounds.sigma_interval[1]
    );
    Ok(Report {
        json: json!({
            "run": cli.run("sigma"),
            "group": spec,
            "metric": metric,
            "bounds": bounds,
        }),
        csv,
    })
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("CARNOT_ISO_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| input(format!("CARNOT_ISO_THREADS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| input(e.to_string()))
}

fn execute(cli: &Cli) -> Result<Report, Failure> {
    configure_threads()?;
    match &cli.command {
        Command::Distance { p, q } => cmd_distance(cli, p, q),
        Command::BallVolume { mc } => cmd_ball_volume(cli, *mc),
        Command::CdcTable { n_min, n_max } => cmd_cdc_table(cli, *n_min, *n_max),
        Command::Verify { counterexample } => cmd_verify(cli, *counterexample),
        Command::BumpSearch {
            rho_min,
            rho_max,
            reach_budget,
            plot,
        } => cmd_bump_search(cli, *rho_min, *rho_max, *reach_budget, plot.as_ref()),
        Command::Sigma {
            c_lower,
            c_lower_error,
            c_upper,
            reach_budget,
        } => cmd_sigma(cli, *c_lower, *c_lower_error, *c_upper, *reach_budget),
    }
}

fn emit(cli: &Cli, report: &Report) -> Result<(), Failure> {
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report.json).map_err(|e| input(e.to_string()))? + "\n",
        Format::Csv => report.csv.clone(),
    };
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| input(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| input(e.to_string())),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli).and_then(|report| emit(&cli, &report)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("carnot-iso: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
