mod report;
mod suites;

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hopf_dse::rational::format as fmt_q;
use hopf_dse::solver::{check_hopf, extract_lambda, solve, HopfVerdict};
use hopf_dse::sysfile::{parse_document, serialize};
use hopf_dse::systems::{classify_sdse, Classification};
use hopf_dse::{Mode, Sdse};

use report::{Format, Report, Status};
use suites::{Outcome, Settings};

const DEFAULT_SEED: u64 = 0x5eed_2024;

#[derive(Parser)]
#[command(name = "hopf-dse", version, about = "Exact computations for combinatorial Dyson-Schwinger systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the solution components x_i(n) for n <= N.
    Solve(Common),
    /// Decide whether the solution components span a Hopf subalgebra up to N.
    CheckHopf(Common),
    /// Classify a single equation.
    Classify(Common),
    /// Extract the structure constants and their affine fits.
    Lambda(Common),
    /// Run the pre-Lie and duality suites.
    PrelieVerify(Suite),
    /// Expand a family header into an ordinary system file.
    Build(Common),
    /// Run every invariant suite.
    Selftest(Suite),
}

#[derive(Args)]
struct Output {
    /// Degree bound.
    #[arg(short = 'N', default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    bound: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the output to a file instead of stdout.
    #[arg(short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    /// System file, or `-` for stdin.
    input: Option<PathBuf>,
    /// Inline system text, lines separated by `;`.
    #[arg(long, conflicts_with = "input")]
    family: Option<String>,
    /// Reject systems failing the necessary Hopf conditions (default).
    #[arg(long, conflicts_with = "permissive")]
    strict: bool,
    /// Keep such systems so that check-hopf can refute them.
    #[arg(long)]
    permissive: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct Suite {
    /// Seed for the sampled checks.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Number of sampled cases per degree above the exhaustive range.
    #[arg(long, default_value_t = 25)]
    samples: usize,
    #[command(flatten)]
    out: Output,
}

impl Common {
    fn mode(&self) -> Mode {
        if self.permissive {
            Mode::Permissive
        } else {
            Mode::Strict
        }
    }

    fn text(&self) -> Result<String, String> {
        if let Some(f) = &self.family {
            return Ok(f.split(';').map(str::trim).collect::<Vec<_>>().join("\n"));
        }
        match &self.input {
            None => Err("no input: give a system file, `-`, or --family".into()),
            Some(p) if p.as_os_str() == "-" => {
                let mut s = String::new();
                std::io::stdin()
                    .read_to_string(&mut s)
                    .map_err(|e| format!("reading stdin: {}", e))?;
                Ok(s)
            }
            Some(p) => fs::read_to_string(p).map_err(|e| format!("reading {}: {}", p.display(), e)),
        }
    }

    fn raw_system(&self) -> Result<Sdse, String> {
        let text = self.text()?;
        parse_document(&text)
            .and_then(|d| d.into_system())
            .map_err(|e| e.to_string())
    }

    /// The normalized system, recording normalization notes in the report.
    fn system(&self, report: &mut Report) -> Result<Sdse, String> {
        let raw = self.raw_system()?;
        let (sys, notes) = raw.normalize(self.mode()).map_err(|e| e.to_string())?;
        report.field("equations", sys.nvars);
        for n in notes {
            report.field("note", n);
        }
        Ok(sys)
    }
}

fn run_solve(c: &Common, r: &mut Report) -> Result<(), String> {
    let sys = c.system(r)?;
    let n = c.out.bound;
    r.field("bound", n);
    let sol = solve(&sys, n).map_err(|e| e.to_string())?;
    for i in 1..=sys.nvars {
        for k in 1..=n {
            let x = sol.component(i, k);
            r.line("component", format!("{} {} {}", i, k, x), format!("x{}({}) = {}", i, k, x));
        }
    }
    Ok(())
}

fn run_check_hopf(c: &Common, r: &mut Report) -> Result<(), String> {
    let sys = c.system(r)?;
    let n = c.out.bound;
    r.field("bound", n);
    let sol = solve(&sys, n).map_err(|e| e.to_string())?;
    match check_hopf(&sol) {
        HopfVerdict::HopfUpTo(k) => {
            r.line("verdict", format!("hopf {}", k), format!("Hopf up to degree {}", k));
        }
        HopfVerdict::Counterexample(cert) => {
            r.line("verdict", "not-hopf", "not Hopf");
            r.line("certificate", &cert, format!("certificate: {}", cert));
            let ok = cert.verify(&sol);
            r.line("certificate-verified", ok, format!("certificate verified: {}", ok));
            r.require(false);
        }
    }
    Ok(())
}

fn run_classify(c: &Common, r: &mut Report) -> Result<(), String> {
    let sys = c.system(r)?;
    let verdict = classify_sdse(&sys, c.out.bound).map_err(|e| e.to_string())?;
    let line = match &verdict {
        Classification::Case1 { lambda, mu } => format!("case1 lambda={} mu={}", fmt_q(lambda), fmt_q(mu)),
        Classification::Case2 { m, alpha } => format!("case2 m={} alpha={}", m, fmt_q(alpha)),
        Classification::Both { lambda, mu, m, alpha } => format!(
            "both lambda={} mu={} m={} alpha={}",
            fmt_q(lambda),
            fmt_q(mu),
            m,
            fmt_q(alpha)
        ),
        Classification::Unclassifiable { reason } => format!("unclassifiable {}", reason),
    };
    r.line("classification", &line, &verdict);
    r.require(verdict.is_hopf());
    Ok(())
}

fn run_lambda(c: &Common, r: &mut Report) -> Result<(), String> {
    let sys = c.system(r)?;
    let n = c.out.bound;
    r.field("bound", n);
    let sol = solve(&sys, n).map_err(|e| e.to_string())?;
    let table = extract_lambda(&sys, &sol);
    for ((i, d, k), e) in &table.entries {
        r.line("lambda", format!("{} {} {} {}", i, d, k, e), format!("lambda[{}; {}; n={}] = {}", i, d, k, e));
    }
    for (i, d) in table.keys() {
        let Some(fit) = table.fit(i, d) else { continue };
        let ab = match fit.alpha_beta() {
            Some((a, b)) => format!(" alpha={} beta={}", fmt_q(&a), fmt_q(&b)),
            None => String::new(),
        };
        r.line(
            "fit",
            format!(
                "{} {} first={} slope={} exact={} points={}{}",
                i,
                d,
                fmt_q(&fit.first),
                fmt_q(&fit.slope),
                fit.exact,
                fit.points,
                ab
            ),
            format!(
                "fit[{}; {}]: lambda_n = {} + {}*(n-1){} over {} points{}",
                i,
                d,
                fmt_q(&fit.first),
                fmt_q(&fit.slope),
                if fit.exact { "" } else { " (not affine)" },
                fit.points,
                ab
            ),
        );
    }
    r.require(table.is_consistent());
    Ok(())
}

fn run_build(c: &Common, r: &mut Report) -> Result<String, String> {
    let sys = c.raw_system()?;
    sys.normalize(c.mode()).map_err(|e| e.to_string())?;
    r.field("equations", sys.nvars);
    Ok(serialize(&sys))
}

fn report_suites(r: &mut Report, outcomes: Vec<Outcome>) {
    for o in outcomes {
        let word = if o.passed { "pass" } else { "FAIL" };
        r.line(
            "check",
            format!("{} {} {}", o.passed, o.name.replace(' ', "-"), o.detail),
            format!("{:<5}{}: {}", word, o.name, o.detail),
        );
        r.require(o.passed);
    }
}

fn settings(s: &Suite) -> Settings {
    Settings {
        bound: s.out.bound,
        seed: s.seed,
        samples: s.samples,
    }
}

fn emit(out: &Output, text: &str) -> Result<(), String> {
    match &out.output {
        Some(p) => fs::write(p, text).map_err(|e| format!("writing {}: {}", p.display(), e)),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, out) = match &cli.command {
        Command::Solve(c) => ("solve", &c.out),
        Command::CheckHopf(c) => ("check-hopf", &c.out),
        Command::Classify(c) => ("classify", &c.out),
        Command::Lambda(c) => ("lambda", &c.out),
        Command::Build(c) => ("build", &c.out),
        Command::PrelieVerify(s) => ("prelie-verify", &s.out),
        Command::Selftest(s) => ("selftest", &s.out),
    };
    let mut r = Report::new(name);
    let result = match &cli.command {
        Command::Solve(c) => run_solve(c, &mut r),
        Command::CheckHopf(c) => run_check_hopf(c, &mut r),
        Command::Classify(c) => run_classify(c, &mut r),
        Command::Lambda(c) => run_lambda(c, &mut r),
        Command::Build(c) => match run_build(c, &mut r) {
            Ok(text) if out.format == Format::Text => {
                return match emit(out, &text) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => fail(&e),
                };
            }
            Ok(text) => {
                r.field("system", text.trim_end().replace('\n', "; "));
                Ok(())
            }
            Err(e) => Err(e),
        },
        Command::PrelieVerify(s) => {
            report_suites(&mut r, suites::prelie_suites(&settings(s)));
            Ok(())
        }
        Command::Selftest(s) => {
            report_suites(&mut r, suites::all(&settings(s)));
            Ok(())
        }
    };
    if let Err(e) = result {
        if out.format == Format::Structured {
            let mut er = Report::new(name);
            er.field("error", &e);
            er.set_status(Status::Error);
            print!("{}", er.render(Format::Structured));
        }
        return fail(&e);
    }
    if let Err(e) = emit(out, &r.render(out.format)) {
        return fail(&e);
    }
    ExitCode::from(r.status().code() as u8)
}

fn fail(message: &str) -> ExitCode {
    eprintln!("hopf-dse: {}", message);
    ExitCode::from(Status::Error.code() as u8)
}
