//! `hyperlab` command line. Exit codes: 0 when every check meets its
//! expectation, 1 when at least one does not, 2 for usage or configuration
//! errors.
//!
//! Tolerance precedence: `--tolerance`, then `tolerance` in the config file,
//! then `HYPERLAB_TOL`, then `1e-9`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::catalog::{ModelSpec, RICCATI_STEP};
use crate::config::ConfigFile;
use crate::error::{GeometryError, Result};
use crate::lemma::LocalJet;
use crate::report::Report;
use crate::runner::{
    self, Check, Property, RandomOptions, RiccatiQuery, RiccatiStart, VerifyOptions,
    DEFAULT_SAMPLES, DEFAULT_TOL,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const TOL_ENV: &str = "HYPERLAB_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Markdown,
}

#[derive(Debug, Parser)]
#[command(
    name = "hyperlab",
    version,
    about = "Checks curvature identities of real hypersurfaces in CP^n and CH^n"
)]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Omit the timestamp so identical runs give identical bytes.
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Flat key-value file with optional [model], [run] and [jet] sections.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tolerance: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the model catalog with oracle-checked spectral tables.
    Catalog,
    /// Instantiate a model and run hypothesis checks on it.
    Verify(VerifyArgs),
    /// Sweep an identity over random pointwise structures.
    Random(RandomArgs),
    /// Query an independent oracle.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Scalar relations at non-Hopf points.
    #[command(subcommand)]
    Lemma(LemmaCommand),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub ambient: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub flip_normal: bool,
    /// `all` or a comma-separated list of check names.
    #[arg(long)]
    pub checks: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RandomArgs {
    #[arg(long, default_value_t = 5)]
    pub dim: usize,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `all` or a comma-separated list of property names.
    #[arg(long, default_value = "all")]
    pub property: String,
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Integrate `lambda' = -(lambda^2 + kappa)`; focal start unless
    /// `--lambda0` is given.
    Riccati {
        #[arg(long, allow_hyphen_values = true)]
        kappa: f64,
        #[arg(long)]
        r: f64,
        #[arg(long, default_value_t = 0.0)]
        r0: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda0: Option<f64>,
        #[arg(long, default_value_t = RICCATI_STEP)]
        step: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum LemmaCommand {
    /// `alpha = 0` configuration: norm of `phi l - l phi` on `span{U, phiU}`.
    Pointwise {
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long)]
        beta: f64,
    },
    /// Shape and connection rows on `span{xi, U, phiU}`.
    Rows {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
    },
    /// Residuals of a jet given in the `[jet]` config section and/or flags.
    Jet {
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        kappa3: Option<f64>,
        /// Start from the jet that satisfies every relation.
        #[arg(long)]
        consistent: bool,
    },
    /// Arithmetic certificate excluding non-Hopf points.
    Certificate {
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long)]
        w1_norm_sq: Option<f64>,
    },
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.trim()
        .parse()
        .map_err(|_| GeometryError::InvalidSpec(format!("cannot parse {key} = {v:?}")))
}

fn resolve_tolerance(cli: &Cli, cfg: &ConfigFile) -> Result<f64> {
    if let Some(t) = cli.tolerance {
        return Ok(t);
    }
    if let Some(t) = cfg.get("run", "tolerance") {
        return parse_num("tolerance", t);
    }
    match std::env::var(TOL_ENV) {
        Ok(v) => parse_num(TOL_ENV, &v),
        Err(_) => Ok(DEFAULT_TOL),
    }
}

fn run_u64(cfg: &ConfigFile, key: &str, flag: Option<u64>, default: u64) -> Result<u64> {
    match (flag, cfg.get("run", key)) {
        (Some(v), _) => Ok(v),
        (None, Some(v)) => parse_num(key, v),
        (None, None) => Ok(default),
    }
}

/// Build the report for a parsed command line.
pub fn execute(cli: &Cli) -> Result<Report> {
    let cfg = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let tol = resolve_tolerance(cli, &cfg)?;
    let report = match &cli.command {
        Command::Catalog => runner::catalog()?,
        Command::Verify(args) => {
            let mut pairs: BTreeMap<String, String> = cfg.section("model");
            let mut put = |k: &str, v: Option<String>| {
                if let Some(v) = v {
                    pairs.insert(k.to_string(), v);
                }
            };
            put("ambient", args.ambient.clone());
            put("n", args.n.map(|v| v.to_string()));
            put("c", args.c.map(|v| v.to_string()));
            put("family", args.family.clone());
            put("radius", args.radius.map(|v| v.to_string()));
            put("k", args.k.map(|v| v.to_string()));
            if args.flip_normal {
                put("flip_normal", Some("true".into()));
            }
            let spec = ModelSpec::from_pairs(&pairs)?;
            let checks = match (&args.checks, cfg.get("run", "checks")) {
                (Some(s), _) => Check::parse_list(s)?,
                (None, Some(s)) => Check::parse_list(s)?,
                (None, None) => Check::ALL.to_vec(),
            };
            runner::verify(&VerifyOptions {
                spec,
                seed: run_u64(&cfg, "seed", args.seed, 0)?,
                checks,
                tolerance: tol,
            })?
        }
        Command::Random(args) => runner::random(&RandomOptions {
            dim: args.dim,
            samples: run_u64(
                &cfg,
                "samples",
                args.samples.map(|s| s as u64),
                DEFAULT_SAMPLES as u64,
            )? as usize,
            seed: run_u64(&cfg, "seed", args.seed, 0)?,
            properties: Property::parse_list(&args.property)?,
            tolerance: tol,
        })?,
        Command::Oracle(OracleCommand::Riccati {
            kappa,
            r,
            r0,
            lambda0,
            step,
        }) => runner::riccati_oracle(&RiccatiQuery {
            kappa: *kappa,
            r: *r,
            start: match lambda0 {
                Some(l) => RiccatiStart::Value {
                    r0: *r0,
                    lambda0: *l,
                },
                None => RiccatiStart::Focal,
            },
            step: *step,
        })?,
        Command::Lemma(cmd) => match cmd {
            LemmaCommand::Pointwise { c, beta } => runner::lemma_pointwise(*c, *beta, tol)?,
            LemmaCommand::Rows { alpha, beta, c } => runner::lemma_rows(*alpha, *beta, *c)?,
            LemmaCommand::Jet {
                alpha,
                beta,
                c,
                kappa3,
                consistent,
            } => {
                let mut pairs = cfg.section("jet");
                for (k, v) in [
                    ("alpha", alpha),
                    ("beta", beta),
                    ("c", c),
                    ("kappa3", kappa3),
                ] {
                    if let Some(v) = v {
                        pairs.insert(k.into(), v.to_string());
                    }
                }
                if *consistent {
                    pairs.insert("consistent".into(), "true".into());
                }
                runner::lemma_jet(&LocalJet::from_pairs(&pairs)?, tol)?
            }
            LemmaCommand::Certificate {
                c,
                alpha,
                beta,
                w1_norm_sq,
            } => runner::lemma_certificate(*c, *alpha, *beta, *w1_norm_sq)?,
        },
    };
    Ok(if cli.deterministic {
        report
    } else {
        report.stamped()
    })
}

pub fn render(cli: &Cli, report: &Report) -> String {
    let mut s = match cli.format {
        Format::Json => report.to_json(),
        Format::Markdown => report.to_markdown(),
    };
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

/// Parse, run, emit; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    let report = match execute(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let text = render(&cli, &report);
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text.as_bytes()),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return EXIT_USAGE;
    }
    if report.all_pass {
        EXIT_PASS
    } else {
        for row in report.failures() {
            eprintln!(
                "check {} on {} failed: residual {:e} > {:e}",
                row.check, row.subspace, row.residual, row.tolerance
            );
        }
        EXIT_FAIL
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("hyperlab").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn verify_flags_build_spec() {
        let cli = parse(&[
            "verify",
            "--ambient",
            "CH",
            "--n",
            "3",
            "--c",
            "-1",
            "--family",
            "A2",
            "--radius",
            "0.5",
            "--k",
            "1",
            "--checks",
            "hopf",
            "--deterministic",
        ]);
        let rep = execute(&cli).unwrap();
        assert!(rep.all_pass);
        assert_eq!(rep.config["spec"]["c"], -1.0);
        assert!(rep.timestamp.is_none());
    }

    #[test]
    fn invalid_specs_are_errors() {
        let cli = parse(&["verify", "--ambient", "CP", "--n", "2", "--family", "A0"]);
        assert!(matches!(execute(&cli), Err(GeometryError::InvalidSpec(_))));
        let cli = parse(&["random", "--samples", "0"]);
        assert!(execute(&cli).is_err());
        let cli = parse(&[
            "--tolerance",
            "-1",
            "lemma",
            "pointwise",
            "--c",
            "4",
            "--beta",
            "1",
        ]);
        assert!(execute(&cli).is_err());
    }

    #[test]
    fn usage_errors_map_to_exit_two() {
        assert_eq!(main_with(["hyperlab", "frobnicate"]), EXIT_USAGE);
        assert_eq!(
            main_with([
                "hyperlab",
                "verify",
                "--ambient",
                "CQ",
                "--n",
                "2",
                "--family",
                "A1"
            ]),
            EXIT_USAGE
        );
    }

    #[test]
    fn riccati_flags() {
        let rep = execute(&parse(&[
            "oracle",
            "riccati",
            "--kappa",
            "-4",
            "--r",
            "1.5",
            "--lambda0",
            "2",
        ]))
        .unwrap();
        assert_eq!(rep.data["value"].as_f64(), Some(2.0));
    }
}
