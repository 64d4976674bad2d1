//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 verification failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::contact::{check_linear_homotopy_s3, verify_named_homotopy, HomotopyFamily, NamedHomotopy};
use crate::manifold::FdOptions;
use crate::nodal::{search_contractible, seeded_s2};
use crate::openbook::{
    binding_positivity, page_area_positivity, pi_tilde_rate_check, theta_consistency, OpenBook, OpenBookKind,
};
use crate::report::{sphere_eig_residual, sphere_report, to_json_string, torus_eig_residual, torus_report, ReportOptions};
use crate::sphere_fields::{builtin_example, s1_invariant_field, AxisymmetricField, KlField, SphereField};
use crate::torus_fields::{build_from_t2_eigenfunction, build_vk, parse_rational, standard_form, TorusField, WaveSpec};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Parser)]
#[command(name = "beltrami-lab", version, about = "Curl eigenfields on S^3 and T^3 and their contact structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tight/overtwisted verdict with certificates, as a JSON report.
    Classify(RunConfig),
    /// Finite-difference eigen-equation residuals.
    Verify(RunConfig),
    /// Contact homotopy margins.
    Homotopy(RunConfig),
    /// CSV samples of a field.
    Sample(RunConfig),
    /// Search for a T^2 eigenfunction with a contractible nodal component.
    Nodal(RunConfig),
    /// Page and binding positivity of an open book.
    Openbook(RunConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum BookArg {
    PiMinus,
    PiTilde,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Field on the 3-sphere.
    #[arg(long, conflicts_with = "torus")]
    pub sphere: bool,
    /// Field on the 3-torus.
    #[arg(long)]
    pub torus: bool,
    /// Axisymmetric eigenfield V_m, |m| >= 2.
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<i32>,
    /// Built-in sphere field: hopf, antihopf, v2, v3, nonaxisymmetric.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Nonconstant-factor sphere field with parameters `k,l`.
    #[arg(long, allow_hyphen_values = true)]
    pub kl: Option<String>,
    /// Circle-invariant sphere field from a random degree-K harmonic.
    #[arg(long)]
    pub s1: Option<u32>,
    /// Torus wave vector `a,b,c`.
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    /// Torus amplitude `p,q,r` (rationals allowed, e.g. `1/2`).
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    /// Standard torus form with wave number ETA.
    #[arg(long)]
    pub eta: Option<i64>,
    /// Torus field from a searched T^2 eigenfunction with this eigenvalue.
    #[arg(long)]
    pub nodal_search: Option<u32>,
    /// Eigenvalue for the `nodal` command.
    #[arg(long)]
    pub lambda: Option<u32>,
    /// Search trials.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Points per axis for residual grids and samples.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Alias for `--grid` used by `sample`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Marching-squares resolution.
    #[arg(long, default_value_t = 256)]
    pub nodal_grid: usize,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-3)]
    pub h: f64,
    /// Residual tolerance for `verify`.
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    /// Named homotopy: t3_sqrt2_class, s3_kl_family(k,l), shear_profile.
    #[arg(long)]
    pub named: Option<String>,
    /// Built-in target for a linear homotopy from the selected field.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long, value_enum)]
    pub book: Option<BookArg>,
    /// Write JSON here instead of stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

impl RunConfig {
    fn grid_or(&self, default: usize) -> usize {
        self.grid.or(self.n).unwrap_or(default)
    }

    fn report_options(&self) -> ReportOptions {
        ReportOptions {
            grid: self.grid_or(16),
            h: self.h,
            nodal_grid: self.nodal_grid,
        }
    }

    fn check_tolerances(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tol)));
        }
        self.report_options().validate()
    }
}

enum Selected {
    Sphere(String, SphereField),
    Torus(String, TorusField),
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad {what} entry `{p}`")))
        })
        .collect()
}

fn select_sphere(c: &RunConfig) -> Result<(String, SphereField)> {
    let chosen = [c.m.is_some(), c.builtin.is_some(), c.kl.is_some(), c.s1.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if chosen != 1 {
        return Err(Error::InvalidArgument(
            "select exactly one of --m, --builtin, --kl, --s1 for a sphere field".into(),
        ));
    }
    if let Some(m) = c.m {
        return Ok((format!("V_{m}"), SphereField::Axisymmetric(AxisymmetricField::build_vm(m)?)));
    }
    if let Some(name) = &c.builtin {
        return Ok((name.clone(), builtin_example(name)?));
    }
    if let Some(kl) = &c.kl {
        let v: Vec<f64> = parse_list(kl, "--kl")?;
        let [k, l] = v[..] else {
            return Err(Error::InvalidArgument("--kl takes two numbers `k,l`".into()));
        };
        return Ok((format!("kl({k},{l})"), SphereField::Kl(KlField::new(k, l)?)));
    }
    let k = c.s1.expect("counted above");
    let f = seeded_s2(k, c.seed)?;
    Ok((
        format!("s1_invariant(k={k},seed={})", c.seed),
        SphereField::S1Invariant(s1_invariant_field(&f, k)?),
    ))
}

fn select_torus(c: &RunConfig) -> Result<(String, TorusField)> {
    let chosen = [c.k.is_some() || c.b.is_some(), c.eta.is_some(), c.nodal_search.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if chosen != 1 {
        return Err(Error::InvalidArgument(
            "select exactly one of --k/--b, --eta, --nodal-search for a torus field".into(),
        ));
    }
    if let Some(eta) = c.eta {
        return Ok((format!("eta_{eta}"), standard_form(eta)?));
    }
    if let Some(lambda) = c.nodal_search {
        let cert = search_contractible(lambda, c.trials, c.seed, c.nodal_grid)?;
        return Ok((
            format!("ansatz(lambda={lambda},seed={},trial={})", c.seed, cert.trial),
            build_from_t2_eigenfunction(&cert.eigenfunction),
        ));
    }
    let (Some(k), Some(b)) = (&c.k, &c.b) else {
        return Err(Error::InvalidArgument("--k and --b must be given together".into()));
    };
    let kv: Vec<i64> = parse_list(k, "--k")?;
    let bv = b.split(',').map(|p| parse_rational(p.trim())).collect::<Result<Vec<_>>>()?;
    let (Ok(kk), Ok(bb)) = (<[i64; 3]>::try_from(kv), <[_; 3]>::try_from(bv)) else {
        return Err(Error::InvalidArgument("--k and --b take three components each".into()));
    };
    let spec = WaveSpec::new(kk, bb)?;
    Ok((format!("wave(k={k},b={b})"), build_vk(&spec)))
}

fn select(c: &RunConfig) -> Result<Selected> {
    match (c.sphere, c.torus) {
        (true, false) => select_sphere(c).map(|(n, v)| Selected::Sphere(n, v)),
        (false, true) => select_torus(c).map(|(n, v)| Selected::Torus(n, v)),
        _ => Err(Error::InvalidArgument("choose --sphere or --torus".into())),
    }
}

/// Failure raised when a computed check does not hold.
fn failed(msg: String) -> Error {
    Error::Consistency(msg)
}

fn emit_json<T: Serialize>(value: &T, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let text = to_json_string(value)?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => writeln!(out, "{text}")?,
    }
    Ok(())
}

fn cmd_classify(c: &RunConfig, out: &mut dyn Write) -> Result<()> {
    c.check_tolerances()?;
    let opts = c.report_options();
    let report = match select(c)? {
        Selected::Sphere(name, v) => sphere_report(&name, &v, &opts)?.0,
        Selected::Torus(name, v) => torus_report(&name, &v, &opts)?.0,
    };
    emit_json(&report, c.json.as_deref(), out)
}

fn cmd_verify(c: &RunConfig, out: &mut dyn Write) -> Result<()> {
    c.check_tolerances()?;
    let grid = c.grid_or(16);
    let (name, residual, central, central_half, exact) = match select(c)? {
        Selected::Sphere(name, v) => {
            let r = sphere_eig_residual(&v, grid, FdOptions::richardson(c.h))?;
            let a = sphere_eig_residual(&v, grid, FdOptions::central(c.h))?;
            let b = sphere_eig_residual(&v, grid, FdOptions::central(c.h / 2.0))?;
            let exact = v.as_axisymmetric().map(AxisymmetricField::is_exact_eigenfield);
            (name, r, a, b, exact)
        }
        Selected::Torus(name, v) => {
            let r = torus_eig_residual(&v, grid, FdOptions::richardson(c.h))?;
            let a = torus_eig_residual(&v, grid, FdOptions::central(c.h))?;
            let b = torus_eig_residual(&v, grid, FdOptions::central(c.h / 2.0))?;
            let exact = v.eigen_coefficient_residual().map(|e| e < 1e-12);
            (name, r, a, b, exact)
        }
    };
    let order = (central / central_half).log2();
    emit_json(
        &json!({
            "field": name,
            "h": c.h,
            "grid": grid,
            "eig_residual": residual,
            "central_residual_h": central,
            "central_residual_half_h": central_half,
            "observed_order": order,
            "exact_identity": exact,
        }),
        c.json.as_deref(),
        out,
    )?;
    if residual > c.tol || exact == Some(false) {
        return Err(failed(format!("eigen residual {residual:e} exceeds {:e}", c.tol)));
    }
    Ok(())
}

fn cmd_homotopy(c: &RunConfig, out: &mut dyn Write) -> Result<()> {
    c.check_tolerances()?;
    if let Some(name) = &c.named {
        let h = NamedHomotopy::parse(name)?;
        let r = verify_named_homotopy(&h, c.grid_or(16), 21)?;
        emit_json(&r, c.json.as_deref(), out)?;
        if r.margin <= 0.0 {
            return Err(failed(format!("homotopy {name} degenerates (margin {:e})", r.margin)));
        }
        return Ok(());
    }
    let Some(target) = &c.target else {
        return Err(Error::InvalidArgument("homotopy needs --named NAME or a field with --target".into()));
    };
    let (name, v) = select_sphere(c)?;
    let w = builtin_example(target)?;
    let (lv, lw) = match (v.lambda(), w.lambda()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Inapplicable("linear homotopy needs two curl eigenfields".into())),
    };
    let cert = check_linear_homotopy_s3(&v, lv, &w, lw, c.grid_or(32), HomotopyFamily::Linear)?;
    emit_json(
        &json!({ "field": name, "target": target, "certificate": cert }),
        c.json.as_deref(),
        out,
    )?;
    if cert.margin <= 0.0 {
        return Err(failed(format!("linear homotopy degenerates (margin {:e})", cert.margin)));
    }
    Ok(())
}

fn cmd_sample(c: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let n = c.grid_or(16);
    if n < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples per axis, got {n}")));
    }
    let mut buf: Box<dyn Write + '_> = match &c.csv {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(out)),
    };
    match select(c)? {
        Selected::Sphere(_, v) => crate::sphere_fields::write_samples_csv(&v, n, &mut buf)?,
        Selected::Torus(_, v) => v.write_samples_csv(n, &mut buf)?,
    }
    buf.flush()?;
    Ok(())
}

fn cmd_nodal(c: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let lambda = c
        .lambda
        .or(c.nodal_search)
        .ok_or_else(|| Error::InvalidArgument("nodal needs --lambda".into()))?;
    let cert = search_contractible(lambda, c.trials, c.seed, c.nodal_grid)?;
    emit_json(&cert, c.json.as_deref(), out)
}

fn cmd_openbook(c: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let Some(book) = c.book else {
        return Err(Error::InvalidArgument("openbook needs --book pi-minus|pi-tilde".into()));
    };
    let kind = match book {
        BookArg::PiMinus => OpenBookKind::PiMinus,
        BookArg::PiTilde => OpenBookKind::PiTilde,
    };
    let ob = OpenBook::new(kind);
    let v = ob.supported_field();
    let n = c.grid_or(32);
    let page = page_area_positivity(&ob, &v, n);
    let binding = binding_positivity(&ob, &v);
    let theta = theta_consistency(&ob, n);
    let rate = (kind == OpenBookKind::PiTilde).then(|| pi_tilde_rate_check(n, n));
    emit_json(
        &json!({
            "book": kind.name(),
            "page": page,
            "binding": binding,
            "theta_consistency": theta,
            "rate_check": rate,
        }),
        c.json.as_deref(),
        out,
    )?;
    if page.min_margin <= 0.0 || binding.iter().any(|b| b.pairing <= 0.0) || theta > 1e-10 {
        return Err(failed("open book positivity failed".into()));
    }
    if rate.is_some_and(|r| r.min_rate <= 0.0 || r.max_error > 1e-10) {
        return Err(failed("page-angle rate check failed".into()));
    }
    Ok(())
}

/// Exit code for an error: usage problems are 1, failed checks 2.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_)
        | Error::UnknownName(_)
        | Error::NotPerpendicular { .. }
        | Error::NotEigenfunction(_)
        | Error::Inapplicable(_)
        | Error::Io(_) => EXIT_USAGE,
        _ => EXIT_VERIFICATION,
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Classify(c) => cmd_classify(c, out),
        Command::Verify(c) => cmd_verify(c, out),
        Command::Homotopy(c) => cmd_homotopy(c, out),
        Command::Sample(c) => cmd_sample(c, out),
        Command::Nodal(c) => cmd_nodal(c, out),
        Command::Openbook(c) => cmd_openbook(c, out),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => EXIT_OK,
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("beltrami-lab").chain(args.iter().copied())).unwrap()
    }

    fn run_to_string(args: &[&str]) -> Result<String> {
        let cli = parse(args);
        let mut out = Vec::new();
        execute(&cli, &mut out)?;
        Ok(String::from_utf8(out).unwrap())
    }

    #[test]
    fn negative_m_parses() {
        let Command::Classify(c) = parse(&["classify", "--sphere", "--m", "-3"]).command else {
            panic!()
        };
        assert_eq!(c.m, Some(-3));
    }

    #[test]
    fn sphere_and_torus_conflict() {
        assert!(Cli::try_parse_from(["beltrami-lab", "classify", "--sphere", "--torus"]).is_err());
    }

    #[test]
    fn selection_errors_are_usage() {
        let e = run_to_string(&["classify", "--sphere"]).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_USAGE);
        let e = run_to_string(&["classify", "--torus", "--k", "1,0,0", "--b", "1,0,0"]).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_USAGE);
        let e = run_to_string(&["classify", "--sphere", "--builtin", "nope"]).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_USAGE);
    }

    #[test]
    fn rational_amplitude() {
        let s = run_to_string(&["classify", "--torus", "--k", "0,0,2", "--b", "1/2,1/3,0", "--grid", "4"]).unwrap();
        assert!(s.contains("\"Tight\""));
    }

    #[test]
    fn openbook_pi_minus() {
        let s = run_to_string(&["openbook", "--book", "pi-minus", "--grid", "8"]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert!(v["page"]["min_margin"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn tiny_h_rejected() {
        let e = run_to_string(&["verify", "--sphere", "--m", "2", "--h", "0"]).unwrap_err();
        assert_eq!(exit_code(&e), EXIT_USAGE);
    }
}
