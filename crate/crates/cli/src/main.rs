mod report;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use norm1::equidist::{build_sample, sample_star_discrepancy, truncated_series_check, weyl_sums, SampleOrdering};
use norm1::selftest::{decay_golden, run_selftest};
use norm1::units::unit_fractional_parts;
use norm1::{make_context, FieldContext, UnitGroupInfo, MIN_PRECISION_BITS};

use report::{Cell, Report};

/// Largest |d| accepted without `--allow-large-d`.
const DEFAULT_MAX_ABS_D: u64 = 1_000_000_000_000;

#[derive(Parser, Debug)]
#[command(
    name = "norm1",
    version,
    about = "Norm-one elements of quadratic fields and their equidistribution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the sample: preimage, ordering key and circle coordinate.
    Enumerate(Opts),
    /// Weyl sums |S_m| for m = 0..=m-max.
    Weyl(Opts),
    /// Star discrepancy and counts along a threshold grid.
    Discrepancy(Opts),
    /// Distance to the nearest integer of unit powers (real fields).
    Units(Opts),
    /// Truncated Dirichlet series identity (imaginary fields).
    SeriesCheck(Opts),
    /// Quick property checks; with --regen, writes the decay golden file.
    Selftest(Opts),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum OrderingArg {
    Height,
    Norm,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct Opts {
    /// Square-free integer d defining Q(sqrt d).
    #[arg(long, allow_negative_numbers = true)]
    d: Option<i64>,
    #[arg(long, value_enum, default_value = "norm")]
    ordering: OrderingArg,
    /// Threshold t (H <= t for heights, key <= t for norms).
    #[arg(long, default_value_t = 1000)]
    bound: u64,
    /// Comma-separated increasing thresholds.
    #[arg(long, value_delimiter = ',')]
    t_grid: Option<Vec<u64>>,
    #[arg(long, default_value_t = 8)]
    m_max: u32,
    #[arg(long, default_value_t = 128)]
    precision: u32,
    #[arg(long, default_value_t = 10)]
    n_max: u32,
    /// Exponent s of the series check.
    #[arg(long, default_value_t = 2.0)]
    s: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Recompute the decay golden file instead of running the checks.
    #[arg(long)]
    regen: bool,
    /// Accept |d| above 10^12.
    #[arg(long)]
    allow_large_d: bool,
}

/// Failure modes mapped to exit codes.
enum Failure {
    Usage(String),
    Internal(String),
}

impl From<norm1::Error> for Failure {
    fn from(e: norm1::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return ExitCode::from(1);
    }
    let stdout = io::stdout();
    let code = execute(std::env::args_os(), &mut stdout.lock(), &mut io::stderr());
    ExitCode::from(code)
}

/// Parses `args`, runs the command and returns the process exit code:
/// 0 on success, 1 for invalid input, 2 for internal failures.
fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli, out))) {
        Ok(Ok(())) => 0,
        Ok(Err(Failure::Usage(msg))) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Ok(Err(Failure::Internal(msg))) => {
            let _ = writeln!(err, "internal error: {msg}");
            2
        }
        Err(_) => 2,
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("NORM1_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("NORM1_THREADS={v:?} is not a positive integer"))?;
    if n == 0 {
        return Err("NORM1_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let o = match &cli.command {
        Command::Enumerate(o)
        | Command::Weyl(o)
        | Command::Discrepancy(o)
        | Command::Units(o)
        | Command::SeriesCheck(o)
        | Command::Selftest(o) => o,
    };
    if o.precision < MIN_PRECISION_BITS {
        return Err(Failure::Usage(format!(
            "--precision {}: at least {MIN_PRECISION_BITS} bits required",
            o.precision
        )));
    }
    match cli.command {
        Command::Enumerate(o) => emit(&o, enumerate(&o)?, out),
        Command::Weyl(o) => emit(&o, weyl(&o)?, out),
        Command::Discrepancy(o) => emit(&o, discrepancy(&o)?, out),
        Command::Units(o) => emit(&o, units(&o)?, out),
        Command::SeriesCheck(o) => emit(&o, series(&o)?, out),
        Command::Selftest(o) => selftest(&o, out),
    }
}

fn context(o: &Opts) -> Result<FieldContext, Failure> {
    let d = o.d.ok_or_else(|| Failure::Usage("--d is required".into()))?;
    if d.unsigned_abs() > DEFAULT_MAX_ABS_D && !o.allow_large_d {
        return Err(Failure::Usage(format!(
            "--d {d}: |d| exceeds 10^12 (pass --allow-large-d to override)"
        )));
    }
    make_context(d).map_err(|e| Failure::Usage(format!("--d {d}: {e}")))
}

fn ordering(o: &Opts, ctx: &FieldContext) -> Result<SampleOrdering, Failure> {
    match o.ordering {
        OrderingArg::Height if ctx.is_real() => Err(Failure::Usage(format!(
            "--ordering height requires d < 0, got --d {}",
            ctx.d()
        ))),
        OrderingArg::Height => Ok(SampleOrdering::Height),
        OrderingArg::Norm => Ok(SampleOrdering::norm_for(ctx)),
    }
}

fn unit_info(ctx: &FieldContext, prec: u32) -> Result<Option<UnitGroupInfo>, Failure> {
    if ctx.is_real() {
        Ok(Some(norm1::units::fundamental_unit_with_precision(ctx, prec)?))
    } else {
        Ok(None)
    }
}

fn header(ctx: &FieldContext, command: &str, o: &Opts, columns: &[&str]) -> Report {
    Report::new(ctx.d(), command, o.precision, columns)
}

fn ordering_label(o: &Opts) -> String {
    match o.ordering {
        OrderingArg::Height => "height".into(),
        OrderingArg::Norm => "norm".into(),
    }
}

fn enumerate(o: &Opts) -> Result<Report, Failure> {
    let ctx = context(o)?;
    let ord = ordering(o, &ctx)?;
    let info = unit_info(&ctx, o.precision)?;
    let sample = build_sample(&ctx, ord, o.bound, info.as_ref(), o.precision)?;
    let mut r = header(&ctx, "enumerate", o, &["a", "b", "norm", "key", "x", "error_bound"]);
    r.ordering = Some(ordering_label(o));
    r.bound = Some(o.bound.to_string());
    for p in sample.points() {
        r.push(vec![
            Cell::int(&p.alpha.a),
            Cell::int(&p.alpha.b),
            Cell::int(p.alpha.norm()),
            Cell::int(&p.key),
            Cell::Num(p.x),
            Cell::Num(p.error_bound),
        ]);
    }
    Ok(r)
}

fn weyl(o: &Opts) -> Result<Report, Failure> {
    let ctx = context(o)?;
    let ord = ordering(o, &ctx)?;
    let info = unit_info(&ctx, o.precision)?;
    let sample = build_sample(&ctx, ord, o.bound, info.as_ref(), o.precision)?;
    let mut r = header(&ctx, "weyl", o, &["m", "abs_weyl_sum", "error_bound"]);
    r.ordering = Some(ordering_label(o));
    r.bound = Some(o.bound.to_string());
    for w in weyl_sums(&sample, o.m_max)? {
        r.push(vec![Cell::int(w.m), Cell::Num(w.abs), Cell::Num(w.error_bound)]);
    }
    Ok(r)
}

fn discrepancy(o: &Opts) -> Result<Report, Failure> {
    let ctx = context(o)?;
    let ord = ordering(o, &ctx)?;
    let grid = o.t_grid.clone().unwrap_or_else(|| vec![o.bound]);
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::Usage("--t-grid must be strictly increasing".into()));
    }
    let info = unit_info(&ctx, o.precision)?;
    let top = *grid.last().expect("nonempty");
    let full = build_sample(&ctx, ord, top, info.as_ref(), o.precision)?;
    let mut r = header(
        &ctx,
        "discrepancy",
        o,
        &["t", "count", "count_over_t", "star_discrepancy", "error_bound"],
    );
    r.ordering = Some(ordering_label(o));
    r.bound = Some(top.to_string());
    for t in grid {
        let kb = if ord == SampleOrdering::Height { t * t } else { t };
        let s = full.prefix(kb);
        let ratio = if t == 0 { 0.0 } else { s.len() as f64 / t as f64 };
        let (dstar, err) = if s.is_empty() {
            (f64::NAN, f64::NAN)
        } else {
            sample_star_discrepancy(&s)?
        };
        r.push(vec![
            Cell::int(t),
            Cell::int(s.len()),
            Cell::Num(ratio),
            Cell::Num(dstar),
            Cell::Num(err),
        ]);
    }
    Ok(r)
}

fn units(o: &Opts) -> Result<Report, Failure> {
    let ctx = context(o)?;
    if ctx.is_imaginary() {
        return Err(Failure::Usage(format!(
            "--d {}: units needs a real field (d > 1)",
            ctx.d()
        )));
    }
    if o.n_max == 0 {
        return Err(Failure::Usage("--n-max must be at least 1".into()));
    }
    let info = norm1::units::fundamental_unit_with_precision(&ctx, o.precision)?;
    let mut r = header(&ctx, "units", o, &["family", "n", "distance_to_integer", "error_bound"]);
    for row in unit_fractional_parts(&info, o.n_max, o.precision)? {
        let (v, e) = row.distance.to_f64_with_error();
        r.push(vec![
            Cell::Str(row.family.label().into()),
            Cell::int(row.n),
            Cell::Num(v),
            Cell::Num(e),
        ]);
    }
    Ok(r)
}

fn series(o: &Opts) -> Result<Report, Failure> {
    let ctx = context(o)?;
    if ctx.is_real() {
        return Err(Failure::Usage(format!(
            "--d {}: series-check needs an imaginary field (d < 0)",
            ctx.d()
        )));
    }
    if !(o.s > 1.0 && o.s.is_finite()) {
        return Err(Failure::Usage(format!("--s {}: must be a finite number above 1", o.s)));
    }
    let c = truncated_series_check(&ctx, o.s, o.bound, o.precision)?;
    let (lhs, lhs_err) = c.lhs.to_f64_with_error();
    let (rhs, rhs_err) = c.rhs.to_f64_with_error();
    let mut r = header(
        &ctx,
        "series-check",
        o,
        &[
            "s",
            "bound",
            "lhs",
            "lhs_error",
            "rhs",
            "rhs_error",
            "gap_bound",
            "holds",
        ],
    );
    r.bound = Some(o.bound.to_string());
    r.push(vec![
        Cell::Num(o.s),
        Cell::int(o.bound),
        Cell::Num(lhs),
        Cell::Num(lhs_err),
        Cell::Num(rhs),
        Cell::Num(rhs_err),
        Cell::Num(c.gap_bound),
        Cell::Bool(c.holds()),
    ]);
    Ok(r)
}

fn selftest(o: &Opts, out: &mut dyn Write) -> Result<(), Failure> {
    if o.regen {
        let golden = decay_golden(o.precision)?;
        let text = serde_json::to_string_pretty(&golden).map_err(|e| Failure::Internal(e.to_string()))? + "\n";
        return write_bytes(o, text.as_bytes(), out);
    }
    let ctx = context(o)?;
    let results = run_selftest(&ctx, o.precision)?;
    let mut r = header(&ctx, "selftest", o, &["check", "passed", "detail"]);
    for c in &results {
        r.push(vec![
            Cell::Str(c.name.clone()),
            Cell::Bool(c.passed),
            Cell::Str(c.detail.clone()),
        ]);
    }
    emit(o, r, out)?;
    let failed: Vec<&str> = results.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Internal(format!("self-checks failed: {}", failed.join("; "))))
    }
}

fn emit(o: &Opts, r: Report, out: &mut dyn Write) -> Result<(), Failure> {
    let mut buf = Vec::new();
    match o.format {
        Format::Csv => r.write_csv(&mut buf).map_err(|e| Failure::Internal(e.to_string()))?,
        Format::Json => r.write_json(&mut buf).map_err(|e| Failure::Internal(e.to_string()))?,
    }
    write_bytes(o, &buf, out)
}

fn write_bytes(o: &Opts, bytes: &[u8], out: &mut dyn Write) -> Result<(), Failure> {
    match &o.out {
        Some(path) => {
            let f = File::create(path).map_err(|e| Failure::Usage(format!("--out {}: {e}", path.display())))?;
            let mut w = BufWriter::new(f);
            w.write_all(bytes)
                .and_then(|_| w.flush())
                .map_err(|e| Failure::Usage(format!("--out {}: {e}", path.display())))
        }
        None => out
            .write_all(bytes)
            .and_then(|_| out.flush())
            .map_err(|e| Failure::Internal(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    fn call(args: &[&str]) -> (u8, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let argv = std::iter::once("norm1").chain(args.iter().copied());
        let code = execute(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn scratch(name: &str) -> PathBuf {
        std::env::temp_dir().join(format!("norm1-{}-{name}", std::process::id()))
    }

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn defaults() {
        let cli = Cli::try_parse_from(["norm1", "weyl", "--d", "-1"]).unwrap();
        let Command::Weyl(o) = cli.command else {
            panic!("wrong subcommand")
        };
        assert_eq!(o.d, Some(-1));
        assert_eq!(o.ordering, OrderingArg::Norm);
        assert_eq!((o.bound, o.m_max, o.precision, o.format), (1000, 8, 128, Format::Csv));
    }

    #[test]
    fn help_and_version_exit_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("series-check"));
        assert_eq!(call(&["--version"]).0, 0);
    }

    #[test]
    fn weyl_csv_schema() {
        let (code, out, _) = call(&[
            "weyl",
            "--d",
            "-1",
            "--ordering",
            "norm",
            "--bound",
            "1000",
            "--m-max",
            "8",
        ]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "m,abs_weyl_sum,error_bound");
        assert_eq!(lines.len(), 10);
        assert_eq!(lines[1], "0,1.0,0.0");
        for (m, line) in lines[1..].iter().enumerate() {
            let f: Vec<&str> = line.split(',').collect();
            assert_eq!(f[0], m.to_string());
            assert!(f[1].parse::<f64>().unwrap() >= 0.0 && f[2].parse::<f64>().unwrap() >= 0.0);
        }
    }

    #[test]
    fn json_report_schema() {
        let (code, out, _) = call(&["weyl", "--d", "-2", "--bound", "50", "--format", "json"]);
        assert_eq!(code, 0);
        assert!(out.starts_with(r#"{"schema_version":1,"d":"-2","command":"weyl""#));
        let r: Report = serde_json::from_str(&out).unwrap();
        assert_eq!(r.rows.len(), 9);
        assert_eq!(r.ordering.as_deref(), Some("norm"));
    }

    #[test]
    fn enumerate_lists_the_smallest_sample() {
        let (code, out, _) = call(&["enumerate", "--d", "-1", "--bound", "1"]);
        assert_eq!(code, 0);
        assert_eq!(out, "a,b,norm,key,x,error_bound\n0,1,1,1,0.5,0.0\n1,0,1,1,0.0,0.0\n");
    }

    #[test]
    fn units_table() {
        let (code, out, _) = call(&["units", "--d", "2", "--n-max", "10"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "family,n,distance_to_integer,error_bound");
        assert_eq!(lines.len(), 41);
        assert!(lines[1].starts_with("eps^n,1,0.414213562373095"));
    }

    #[test]
    fn discrepancy_grid() {
        let (code, out, _) = call(&["discrepancy", "--d", "-1", "--t-grid", "0,10,100"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "t,count,count_over_t,star_discrepancy,error_bound");
        assert!(lines[1].starts_with("0,0,0.0,"));
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn series_check_reports_agreement() {
        let (code, out, _) = call(&["series-check", "--d", "-3", "--bound", "500"]);
        assert_eq!(code, 0);
        assert!(out.lines().nth(1).unwrap().ends_with(",true"));
        let (code, out, _) = call(&["series-check", "--d", "-1", "--bound", "0"]);
        assert_eq!(code, 0);
        assert!(out.contains(",0.0,0.0,0.0,0.0,inf,true"));
    }

    #[test]
    fn usage_errors_name_the_flag() {
        let cases: [(&[&str], &str); 10] = [
            (&["weyl"], "--d"),
            (&["weyl", "--d", "4"], "--d 4"),
            (&["weyl", "--d", "1"], "--d 1"),
            (&["weyl", "--d", "2", "--ordering", "height"], "--ordering"),
            (&["weyl", "--d", "-1", "--precision", "8"], "--precision"),
            (&["weyl", "--d", "-1", "--format", "xml"], "--format"),
            (&["discrepancy", "--d", "-1", "--t-grid", "100,10"], "--t-grid"),
            (&["units", "--d", "-1"], "--d -1"),
            (&["series-check", "--d", "-1", "--s", "1"], "--s"),
            (&["weyl", "--d", "-1000000000001"], "--allow-large-d"),
        ];
        for (args, flag) in cases {
            let (code, out, err) = call(args);
            assert_eq!(code, 1, "{args:?}");
            assert!(out.is_empty(), "{args:?}");
            assert!(err.contains(flag), "{args:?}: {err}");
        }
    }

    #[test]
    fn large_d_accepted_on_request() {
        let (code, out, _) = call(&["enumerate", "--d", "-1000000000001", "--bound", "1", "--allow-large-d"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 2);
    }

    #[test]
    fn selftest_exit_codes() {
        let (code, out, _) = call(&["selftest", "--d", "-1"]);
        assert_eq!(code, 0);
        assert!(out.lines().skip(1).all(|l| l.contains(",true,")), "{out}");
        // the Moebius expansion of eta_r breaks for the non-square-free modulus 12
        let (code, out, err) = call(&["selftest", "--d", "-6"]);
        assert_eq!(code, 2);
        assert!(out.contains("Moebius expansion of eta_r,false,"));
        assert!(err.contains("Moebius"));
    }

    #[test]
    fn out_flag_writes_the_file() {
        let path = scratch("units.csv");
        let p = path.to_str().unwrap();
        let (code, out, _) = call(&["units", "--d", "5", "--n-max", "2", "--out", p]);
        assert_eq!(code, 0);
        assert!(out.is_empty());
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 9);
        std::fs::remove_file(&path).unwrap();
        let missing = scratch("no-such-dir").join("x.csv");
        let (code, _, err) = call(&["units", "--d", "5", "--out", missing.to_str().unwrap()]);
        assert_eq!(code, 1);
        assert!(err.contains("no-such-dir"));
    }

    #[test]
    fn decay_golden_is_reproducible() {
        let path = scratch("decay.json");
        let (code, _, _) = call(&["selftest", "--regen", "--out", path.to_str().unwrap()]);
        assert_eq!(code, 0);
        let fresh = std::fs::read_to_string(&path).unwrap();
        std::fs::remove_file(&path).unwrap();
        let committed = include_str!("../tests/golden/equidist_decay.json");
        assert_eq!(fresh, committed);
    }
}
