use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use exppoly::expr::{parse_as, parse_rational_as, Coeff, GaussRational};
use exppoly::factor::{divide, dth_roots, ritt_factorization};
use exppoly::hullgeo::summarize;
use exppoly::nevan::{characteristic_grid, deficiency, geometric_grid, linear_grid, Target};
use exppoly::odelab::{
    annihilator, duality_classify, indicator_dominance, perimeter_condition, possible_orders, verify_report,
    zero_free_base_a, EquationTree,
};
use exppoly::strips::{critical_strips, strip_density, to_normalized_sum, zero_free_regions};
use exppoly::zerolab::{count_report, isolate_zeros, Contour};
use exppoly::zetalab::{axis_zero_check, partial_sum, pi24, thinned_axis_zeros, thinned_product, ThinnedSpec};
use exppoly::ExpPoly;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "exppoly", version, about = "Zeros, growth and equations of exponential polynomials")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Opts {
    /// Work over the Gaussian rationals instead of floating point.
    #[arg(long, global = true)]
    exact: bool,
    /// Numeric tolerance.
    #[arg(long, global = true, value_parser = positive)]
    tol: Option<f64>,
    /// Radial grid `a:b:n`, or `a:b:n:geo` for geometric spacing.
    #[arg(long, global = true, value_parser = parse_grid)]
    grid: Option<Grid>,
    /// JSON output (the default).
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// CSV output.
    #[arg(long, global = true)]
    csv: bool,
    /// Write the report to a file instead of standard output.
    #[arg(long, global = true)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical form of an expression.
    Parse { expr: String },
    /// Frequency hulls, circumferences and critical rays.
    Hull { expr: String },
    /// Zero-free regions and critical strips of an exponential sum.
    Strips { expr: String },
    /// Isolate zeros in a rectangle or disc.
    Zeros {
        expr: String,
        #[arg(long, num_args = 4, value_names = ["X1", "X2", "Y1", "Y2"], allow_negative_numbers = true)]
        rect: Option<Vec<f64>>,
        #[arg(long, conflicts_with = "rect")]
        disc: Option<f64>,
    },
    /// Counting functions n(r), N(r) against the hull prediction.
    Count { expr: String },
    /// Nevanlinna characteristic on a radial grid.
    Nevanlinna { expr: String },
    /// Deficiency estimate of a value (`inf` for infinity).
    Deficiency {
        expr: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        value: String,
    },
    /// Ritt factorization.
    Factor { expr: String },
    /// Exact division f / g.
    Divide { f: String, g: String },
    /// d-th roots.
    Root {
        expr: String,
        #[arg(long, default_value_t = 2)]
        degree: u32,
    },
    /// Annihilating linear ODE with polynomial coefficients.
    Annihilate { expr: String },
    /// Residual of an equation at a candidate solution.
    Verify {
        #[arg(long)]
        eq: String,
        #[arg(long)]
        sol: String,
    },
    /// Duality classification of two exponential polynomials.
    Duality { f: String, g: String },
    /// Oscillation predicates for f'' + A f = 0.
    Oscillation {
        a: String,
        /// Compare indicators with the coefficient B of f'' + A f' + B f = 0.
        #[arg(long)]
        b: Option<String>,
        /// Zero-free base: the coefficient A built from φ.
        #[arg(long)]
        phi: Option<String>,
        #[arg(long, default_value_t = 720)]
        points: usize,
    },
    /// Axis test for partial and thinned zeta sums.
    Zeta {
        /// Comma-separated primes of a thinned product.
        #[arg(long, value_delimiter = ',')]
        primes: Vec<u64>,
        /// Comma-separated exponent caps, one per prime.
        #[arg(long, value_delimiter = ',')]
        caps: Vec<u32>,
        /// The eleven-term 3-smooth sum up to 24.
        #[arg(long)]
        pi24: bool,
        /// Partial sum Σ_{n≤m} n^{z/2}.
        #[arg(long)]
        partial: Option<u64>,
        #[arg(long, default_value_t = 50.0)]
        ymax: f64,
    },
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

#[derive(Clone)]
struct Grid(Vec<f64>);

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err("grid must be a:b:n or a:b:n:geo".into());
    }
    let a: f64 = parts[0].parse().map_err(|_| format!("bad grid start `{}`", parts[0]))?;
    let b: f64 = parts[1].parse().map_err(|_| format!("bad grid stop `{}`", parts[1]))?;
    let n: usize = parts[2].parse().map_err(|_| format!("bad grid count `{}`", parts[2]))?;
    let geo = match parts.get(3) {
        None | Some(&"lin") => false,
        Some(&"geo") => true,
        Some(other) => return Err(format!("unknown spacing `{other}`")),
    };
    if n == 0 || !(a > 0.0) || !(b > a) && n > 1 || !b.is_finite() {
        return Err("grid needs 0 < a < b and n ≥ 1".into());
    }
    Ok(Grid(if geo { geometric_grid(a, b, n) } else { linear_grid(a, b, n) }))
}

/// A finished report: JSON body plus an optional table for CSV.
struct Report {
    body: Value,
    table: Option<(Vec<&'static str>, Vec<Vec<String>>)>,
}

impl Report {
    fn new(body: impl Serialize) -> Self {
        Report { body: serde_json::to_value(body).expect("reports serialize"), table: None }
    }

    fn with_table(mut self, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        self.table = Some((header, rows));
        self
    }
}

struct Failure {
    op: &'static str,
    msg: String,
}

type Outcome = Result<Report, Failure>;

fn fail<E: std::fmt::Display>(op: &'static str) -> impl Fn(E) -> Failure {
    move |e| Failure { op, msg: e.to_string() }
}

fn expr_of<C: Coeff>(text: &str) -> Result<ExpPoly<C>, Failure> {
    parse_as::<C>(text).map_err(fail("parse"))
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn exec<C: Coeff>(cmd: &Command, opts: &Opts) -> Outcome {
    let grid = || opts.grid.clone().map(|g| g.0).unwrap_or_else(|| geometric_grid(10.0, 60.0, 8));
    match cmd {
        Command::Parse { expr } => {
            let f = expr_of::<C>(expr)?;
            Ok(Report::new(json!({
                "expr": f.to_expr_string(),
                "order": f.order(),
                "terms": f.len(),
                "constant_multipliers": f.has_constant_multipliers(),
                "exact": C::EXACT,
            })))
        }
        Command::Hull { expr } => {
            let s = summarize(&expr_of::<C>(expr)?).map_err(fail("hull"))?;
            let rays: Vec<Vec<String>> = s.critical_rays.iter().map(|t| vec![num(*t)]).collect();
            Ok(Report::new(&s).with_table(vec!["critical_ray"], rays))
        }
        Command::Strips { expr } => {
            let n = to_normalized_sum(&expr_of::<C>(expr)?).map_err(fail("strips"))?;
            let strips = critical_strips(&n.ns);
            let unit = ExpPoly::from_terms(vec![n.unit.clone()]).map_err(fail("strips"))?;
            let rows = strips
                .iter()
                .map(|s| {
                    vec![num(s.lo), num(s.hi), s.left_index.to_string(), s.right_index.to_string(), num(strip_density(s, &n.ns))]
                })
                .collect();
            let dens: Vec<f64> = strips.iter().map(|s| strip_density(s, &n.ns)).collect();
            Ok(Report::new(json!({
                "unit": unit.to_expr_string(),
                "rotation": n.rotation,
                "normalized": n.ns,
                "zero_free_regions": zero_free_regions(&n.ns),
                "critical_strips": strips,
                "densities": dens,
            }))
            .with_table(vec!["lo", "hi", "left_index", "right_index", "density"], rows))
        }
        Command::Zeros { expr, rect, disc } => {
            let f = expr_of::<C>(expr)?;
            let contour = match (rect, disc) {
                (Some(r), _) => Contour::rectangle(r[0], r[1], r[2], r[3]),
                (None, Some(r)) => Contour::circle(*r),
                (None, None) => return Err(Failure { op: "zeros", msg: "give --rect or --disc".into() }),
            }
            .map_err(fail("zeros"))?;
            let zl = isolate_zeros(&f, &contour, opts.tol.unwrap_or(1e-10)).map_err(fail("zeros"))?;
            let rows = zl.zeros.iter().map(|z| vec![num(z.re), num(z.im), z.multiplicity.to_string()]).collect();
            let total = zl.total();
            let mut r = Report::new(&zl).with_table(vec!["re", "im", "multiplicity"], rows);
            r.body["total"] = json!(total);
            Ok(r)
        }
        Command::Count { expr } => {
            let rep = count_report(&expr_of::<C>(expr)?, &grid()).map_err(fail("count"))?;
            let rows = (0..rep.r_grid.len())
                .map(|k| {
                    vec![num(rep.r_grid[k]), rep.counts[k].to_string(), num(rep.integrated[k]), num(rep.predicted[k]), num(rep.residuals[k])]
                })
                .collect();
            Ok(Report::new(&rep).with_table(vec!["r", "n", "N", "predicted", "residual"], rows))
        }
        Command::Nevanlinna { expr } => {
            let f = expr_of::<C>(expr)?;
            let q = f.order() as i32;
            let rep = characteristic_grid(&f, &grid()).map_err(fail("nevanlinna"))?;
            let rows = (0..rep.r_grid.len())
                .map(|k| {
                    let pred = rep.predicted_leading * rep.r_grid[k].powi(q);
                    vec![num(rep.r_grid[k]), num(rep.m_values[k]), num(rep.n_values[k]), num(rep.t_values[k]), num(rep.zero_counting[k]), num(pred)]
                })
                .collect();
            Ok(Report::new(&rep).with_table(vec!["r", "m", "N", "T", "N_zeros", "predicted"], rows))
        }
        Command::Deficiency { expr, value } => {
            let target = if value.eq_ignore_ascii_case("inf") || value == "∞" {
                Target::Infinity
            } else {
                let a = expr_of::<Complex64>(value)?
                    .as_constant()
                    .ok_or_else(|| Failure { op: "deficiency", msg: format!("`{value}` is not a constant") })?;
                Target::Finite(a)
            };
            let d = deficiency(&expr_of::<C>(expr)?, target, &grid()).map_err(fail("deficiency"))?;
            Ok(Report::new(&d))
        }
        Command::Factor { expr } => {
            let fz = ritt_factorization(&expr_of::<C>(expr)?).map_err(fail("factor"))?;
            let mut factors = vec![fz.unit.to_exppoly().to_expr_string()];
            factors.extend(fz.simple.iter().map(|s| s.to_exppoly().to_expr_string()));
            factors.extend(fz.irreducible.iter().map(|p| p.to_expr_string()));
            let rows = factors.iter().map(|f| vec![f.clone()]).collect();
            let mut r = Report::new(&fz).with_table(vec!["factor"], rows);
            r.body["factors"] = json!(factors);
            r.body["expanded"] = json!(fz.expand().to_expr_string());
            Ok(r)
        }
        Command::Divide { f, g } => {
            let out = divide(&expr_of::<C>(f)?, &expr_of::<C>(g)?).map_err(fail("divide"))?;
            Ok(Report::new(&out))
        }
        Command::Root { expr, degree } => {
            let roots = dth_roots(&expr_of::<C>(expr)?, *degree).map_err(fail("root"))?;
            let strs: Vec<String> = roots.iter().map(|r| r.to_expr_string()).collect();
            let rows = strs.iter().map(|s| vec![s.clone()]).collect();
            Ok(Report::new(json!({ "degree": degree, "exists": !strs.is_empty(), "roots": strs }))
                .with_table(vec!["root"], rows))
        }
        Command::Annihilate { expr } => {
            let a = annihilator(&expr_of::<C>(expr)?).map_err(fail("annihilate"))?;
            let orders = possible_orders(&a.ode).map_err(fail("annihilate"))?;
            let coeffs: Vec<String> = a.ode.coefficients.iter().map(|c| c.to_expr_string()).collect();
            Ok(Report::new(json!({
                "equation": a.ode.to_expr_string(),
                "order": a.ode.order,
                "coefficients": coeffs,
                "order_bound": a.order_bound,
                "exact": a.exact,
                "residual_ratio": a.residual_ratio,
                "possible_orders": orders.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            })))
        }
        Command::Verify { eq, sol } => {
            let t = EquationTree::<C>::parse(eq).map_err(fail("parse"))?;
            let f = parse_rational_as::<C>(sol).map_err(fail("parse"))?;
            Ok(Report::new(verify_report(&t, &f).map_err(fail("verify"))?))
        }
        Command::Duality { f, g } => {
            let rep = duality_classify(&expr_of::<C>(f)?, &expr_of::<C>(g)?).map_err(fail("duality"))?;
            Ok(Report::new(&rep))
        }
        Command::Oscillation { a, b, phi, points } => {
            let a = expr_of::<C>(a)?;
            let mut body = Map::new();
            match perimeter_condition(&a) {
                Ok(p) => body.insert("perimeter".into(), serde_json::to_value(p).expect("serializes")),
                Err(e) => body.insert("perimeter".into(), json!({ "unavailable": e.to_string() })),
            };
            if let Some(b) = b {
                let (holds, witness) = indicator_dominance(&a, &expr_of::<C>(b)?, *points).map_err(fail("oscillation"))?;
                body.insert("indicator_dominance".into(), json!({ "holds": holds, "witness": witness }));
            }
            if let Some(phi) = phi {
                let base = zero_free_base_a(&expr_of::<C>(phi)?).map_err(fail("oscillation"))?;
                body.insert("zero_free_base".into(), json!(base.to_expr_string()));
            }
            Ok(Report::new(Value::Object(body)))
        }
        Command::Zeta { primes, caps, pi24: use_pi24, partial, ymax } => {
            let tol = opts.tol.unwrap_or(1e-8);
            let (label, f, oracle) = if *use_pi24 {
                ("pi24".to_string(), pi24().map_err(fail("zeta"))?, None)
            } else if let Some(m) = partial {
                (format!("partial({m})"), partial_sum(*m).map_err(fail("zeta"))?, None)
            } else {
                let spec = ThinnedSpec::new(primes.clone(), caps.clone()).map_err(fail("zeta"))?;
                let oracle = thinned_axis_zeros(&spec, *ymax);
                (format!("thinned({primes:?},{caps:?})"), thinned_product(&spec).map_err(fail("zeta"))?, Some(oracle))
            };
            let rep = axis_zero_check(&f, *ymax, tol).map_err(fail("zeta"))?;
            let rows = rep.zeros.zeros.iter().map(|z| vec![num(z.re), num(z.im), z.multiplicity.to_string()]).collect();
            let mut r = Report::new(&rep).with_table(vec!["re", "im", "multiplicity"], rows);
            r.body["sum"] = json!(label);
            r.body["expr"] = json!(f.to_expr_string());
            r.body["off_axis_count"] = json!(rep.off_axis.len());
            if let Some(o) = oracle {
                r.body["predicted_axis_zeros"] = json!(o.len());
            }
            Ok(r)
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(_) | Value::Bool(_) | Value::Null => Some(v.to_string()),
        _ => None,
    }
}

fn emit(report: Report, command: &str, csv: bool) -> String {
    if csv {
        let (header, rows) = report.table.unwrap_or_else(|| {
            let rows = report
                .body
                .as_object()
                .map(|m| m.iter().filter_map(|(k, v)| scalar(v).map(|s| vec![k.clone(), s])).collect())
                .unwrap_or_default();
            (vec!["key", "value"], rows)
        });
        let mut out = header.join(",");
        out.push('\n');
        for row in rows {
            out.push_str(&row.iter().map(|c| csv_escape(c)).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    } else {
        let mut body = match report.body {
            Value::Object(m) => m,
            other => {
                let mut m = Map::new();
                m.insert("result".into(), other);
                m
            }
        };
        body.insert("schema".into(), json!(SCHEMA));
        body.insert("command".into(), json!(command));
        let mut s = serde_json::to_string_pretty(&Value::Object(body)).expect("json");
        s.push('\n');
        s
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Parse { .. } => "parse",
        Command::Hull { .. } => "hull",
        Command::Strips { .. } => "strips",
        Command::Zeros { .. } => "zeros",
        Command::Count { .. } => "count",
        Command::Nevanlinna { .. } => "nevanlinna",
        Command::Deficiency { .. } => "deficiency",
        Command::Factor { .. } => "factor",
        Command::Divide { .. } => "divide",
        Command::Root { .. } => "root",
        Command::Annihilate { .. } => "annihilate",
        Command::Verify { .. } => "verify",
        Command::Duality { .. } => "duality",
        Command::Oscillation { .. } => "oscillation",
        Command::Zeta { .. } => "zeta",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = command_name(&cli.command);
    let outcome = if cli.opts.exact {
        exec::<GaussRational>(&cli.command, &cli.opts)
    } else {
        exec::<Complex64>(&cli.command, &cli.opts)
    };
    match outcome {
        Ok(report) => {
            let text = emit(report, name, cli.opts.csv);
            let written = match &cli.opts.out {
                Some(path) => fs::write(path, text),
                None => std::io::stdout().write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                eprintln!("error: output: {e}");
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}: {}", f.op, f.msg);
            // an unreadable expression is a usage error
            ExitCode::from(if f.op == "parse" { 2 } else { 1 })
        }
    }
}
