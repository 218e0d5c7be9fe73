use crate::config::Config;
use crate::job::{self, Format, InsetJob, JobSpec, View};
use clap::{Args, Parser, Subcommand};
use dform_core::fields::{Axis, Grid2, Kind, ObjectSpec};
use dform_core::render::PlotStyle;
use dform_core::Error;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "dform",
    version,
    about = "Differential forms on the plane: compute and plot"
)]
pub struct Cli {
    /// TOML configuration file (default: $DFORM_CONFIG, else built-in values)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plot an object, optionally after a chain of operations
    Plot {
        #[command(flatten)]
        job: JobArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Apply a chain of operations and write the result
    Op {
        #[command(flatten)]
        job: JobArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Plot with a zoom (or derivative) inset
    Zoom {
        #[command(flatten)]
        job: JobArgs,
        #[command(flatten)]
        zoom: ZoomArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Type-check the chain without computing anything
    Check {
        #[command(flatten)]
        job: JobArgs,
    },
    /// Run the HTTP service
    Serve {
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        bind: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct JobArgs {
    /// Job JSON file; the object flags are then ignored
    #[arg(long)]
    pub job: Option<PathBuf>,
    #[arg(long)]
    pub kind: Option<Kind>,
    /// Component equation, once per component
    #[arg(long = "comp", allow_hyphen_values = true)]
    pub comps: Vec<String>,
    /// Range of both axes, as a:b
    #[arg(long, allow_hyphen_values = true, default_value = "-5:5")]
    pub range: String,
    #[arg(long, allow_hyphen_values = true)]
    pub xrange: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub yrange: Option<String>,
    /// Grid points per axis
    #[arg(long, default_value_t = 31)]
    pub n: usize,
    /// Operations, e.g. ext_d,hodge or interior_d:u=0:v=1
    #[arg(long, allow_hyphen_values = true)]
    pub chain: Option<String>,
    /// Plot style JSON file
    #[arg(long)]
    pub style: Option<PathBuf>,
    #[arg(long)]
    pub max_sheets: Option<usize>,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output file, or - for stdout
    #[arg(long, default_value = "-")]
    pub out: String,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct ZoomArgs {
    /// Target point as x,y
    #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
    pub target: String,
    #[arg(long, default_value_t = 2.0)]
    pub mag: f64,
    #[arg(long, default_value_t = 9)]
    pub dpd: usize,
    #[arg(long, default_value_t = 0.3)]
    pub insize: f64,
    #[arg(long, value_enum, default_value_t = View::Zoom)]
    pub view: View,
}

/// A failure with its exit code: 1 for the caller's mistakes, 2 for ours.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure {
            code: if e.is_user_error() { 1 } else { 2 },
            message: e.to_string(),
        }
    }
}

fn user(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| user(format!("cannot read {}: {e}", path.display())))
}

fn range(s: &str, n: usize) -> Result<Axis, Failure> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| user(format!("range '{s}' should look like a:b")))?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| user(format!("range '{s}': '{t}' is not a number")))
    };
    Ok(Axis::new(num(a)?, num(b)?, n)?)
}

impl JobArgs {
    pub fn build(&self) -> Result<JobSpec, Failure> {
        let mut job = match &self.job {
            Some(path) => serde_json::from_str::<JobSpec>(&read(path)?)
                .map_err(|e| user(format!("{}: {e}", path.display())))?,
            None => {
                let kind = self.kind.ok_or_else(|| user("give --kind (or --job)"))?;
                let x = range(self.xrange.as_deref().unwrap_or(&self.range), self.n)?;
                let y = range(self.yrange.as_deref().unwrap_or(&self.range), self.n)?;
                let comps: Vec<&str> = self.comps.iter().map(String::as_str).collect();
                JobSpec::new(ObjectSpec::from_exprs(kind, Grid2::new(x, y)?, &comps))
            }
        };
        if let Some(chain) = &self.chain {
            job.ops.extend(job::parse_chain(chain)?);
        }
        if let Some(path) = &self.style {
            job.style = serde_json::from_str::<PlotStyle>(&read(path)?)
                .map_err(|e| user(format!("{}: {e}", path.display())))?;
        }
        if let Some(m) = self.max_sheets {
            job.style.max_sheets = m;
        }
        Ok(job)
    }
}

fn emit(job: &JobSpec, out: &OutArgs, default: Format, config: &Config) -> Result<(), Failure> {
    let format = out.format.or(job.format).unwrap_or(default);
    let result = job::evaluate(job, config)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }
    let text = result.write(format, config)?;
    if out.out == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(text.as_bytes())
            .and_then(|_| {
                if text.ends_with('\n') {
                    Ok(())
                } else {
                    stdout.write_all(b"\n")
                }
            })
            .map_err(|e| Failure {
                code: 2,
                message: format!("cannot write output: {e}"),
            })
    } else {
        std::fs::write(&out.out, text).map_err(|e| user(format!("cannot write {}: {e}", out.out)))
    }
}

fn target(s: &str) -> Result<[f64; 2], Failure> {
    let bad = || user(format!("target '{s}' should look like x,y"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok([
        a.trim().parse().map_err(|_| bad())?,
        b.trim().parse().map_err(|_| bad())?,
    ])
}

pub fn execute(cli: Cli) -> Result<(), Failure> {
    let config = Config::load(cli.config.as_deref()).map_err(user)?;
    match cli.command {
        Command::Plot { job, out } => emit(&job.build()?, &out, Format::Svg, &config),
        Command::Op { job, out } => {
            if job.chain.is_none() && job.job.is_none() {
                return Err(user("op needs --chain"));
            }
            emit(&job.build()?, &out, Format::ValuesJson, &config)
        }
        Command::Zoom { job, zoom, out } => {
            let mut spec = job.build()?;
            spec.zoom.push(InsetJob {
                target: target(&zoom.target)?,
                mag: zoom.mag,
                dpd: zoom.dpd,
                insize: zoom.insize,
                view: zoom.view,
            });
            emit(&spec, &out, Format::Svg, &config)
        }
        Command::Check { job } => {
            let spec = job.build()?;
            let shapes = job::check(&spec, &config)?;
            let names: Vec<String> = shapes.iter().map(|s| s.describe()).collect();
            println!("ok: {}", names.join(" -> "));
            Ok(())
        }
        Command::Serve { port, bind } => {
            let mut config = config;
            if let Some(p) = port {
                config.port = p;
            }
            if let Some(b) = bind {
                config.bind = b;
            }
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure {
                code: 2,
                message: format!("cannot start runtime: {e}"),
            })?;
            rt.block_on(crate::server::serve(config))
                .map_err(|e| Failure {
                    code: 2,
                    message: e.to_string(),
                })
        }
    }
}

/// Parses `args` and runs the command, printing errors to stderr.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
