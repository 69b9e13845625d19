//! The `nbe` command-line driver.
//!
//! Exit codes: 0 success, 1 parse/scope/type or input error, 2 fuel
//! exhausted, 64 bad usage. Normal forms go to stdout and diagnostics to
//! stderr, never the other way around.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::delay::DEFAULT_FUEL;
use crate::frontend::{elaborate, parse_ty, print_de_bruijn, print_nf};
use crate::nbe::{normalize, NormalizeReport};
use crate::syntax::{embed_nf, Checked, Ty};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FUEL: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Print the normal form.
    Normalize,
    /// Print the type only.
    Check,
    /// Print the step report only.
    Steps,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSource {
    Stdin,
    Path(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliConfig {
    pub command: Command,
    pub input: InputSource,
    /// Free variables, outermost first.
    pub free: Vec<(String, Ty)>,
    pub fuel: u64,
    pub format: OutputFormat,
    pub show_steps: bool,
    pub show_de_bruijn: bool,
}

#[derive(Debug, Parser)]
#[command(
    name = "nbe",
    version,
    about = "Normalize simply-typed lambda terms by evaluation in the delay monad"
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Debug, Subcommand)]
enum CliCommand {
    /// Normalize a term and print its βη-long normal form
    Normalize(CliOptions),
    /// Type check a term and print its type
    Check(CliOptions),
    /// Normalize a term and print only the delay-step report
    Steps(CliOptions),
}

#[derive(Debug, Args)]
struct CliOptions {
    /// Source file; reads stdin when absent or `-`
    input: Option<PathBuf>,
    /// Declare a free variable, outermost first (repeatable)
    #[arg(long = "free", value_name = "NAME:TYPE", value_parser = parse_free_decl)]
    free: Vec<(String, Ty)>,
    /// Maximum number of delay steps to unfold
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    /// Also print the delay-step report
    #[arg(long)]
    show_steps: bool,
    /// Also print the de Bruijn form
    #[arg(long)]
    show_de_bruijn: bool,
}

fn parse_free_decl(decl: &str) -> Result<(String, Ty), String> {
    let (name, ty) = decl
        .split_once(':')
        .ok_or_else(|| format!("expected NAME:TYPE, got `{decl}`"))?;
    let name = name.trim();
    let mut chars = name.chars();
    let valid_name = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
    if !valid_name {
        return Err(format!("`{name}` is not an identifier"));
    }
    let ty = parse_ty(ty).map_err(|e| e.to_string())?;
    Ok((name.to_owned(), ty))
}

impl From<Cli> for CliConfig {
    fn from(cli: Cli) -> CliConfig {
        let (command, options) = match cli.command {
            CliCommand::Normalize(o) => (Command::Normalize, o),
            CliCommand::Check(o) => (Command::Check, o),
            CliCommand::Steps(o) => (Command::Steps, o),
        };
        let input = match options.input {
            Some(path) if path.as_os_str() != "-" => InputSource::Path(path),
            _ => InputSource::Stdin,
        };
        CliConfig {
            command,
            input,
            free: options.free,
            fuel: options.fuel,
            format: options.format,
            show_steps: options.show_steps,
            show_de_bruijn: options.show_de_bruijn,
        }
    }
}

/// Parse `args` (including the program name) into a configuration.
pub fn parse_args<I, T>(args: I) -> Result<CliConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    Cli::try_parse_from(args).map(CliConfig::from)
}

/// Parse arguments and run, returning the process exit code.
pub fn main_with_args<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(args) {
        Ok(config) => run(&config, stdin, stdout, stderr),
        Err(err) => {
            let (sink, code): (&mut dyn Write, i32) = if err.use_stderr() {
                (stderr, EXIT_USAGE)
            } else {
                (stdout, EXIT_OK)
            };
            let _ = write!(sink, "{}", err.render());
            code
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct JsonReport<'a> {
    normal: &'a str,
    #[serde(rename = "type")]
    ty: String,
    eval_steps: u64,
    readback_steps: u64,
    total_steps: u64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct JsonSteps {
    eval_steps: u64,
    readback_steps: u64,
    total_steps: u64,
}

#[derive(Serialize)]
struct JsonType {
    #[serde(rename = "type")]
    ty: String,
}

fn steps_line(report: &NormalizeReport) -> String {
    format!(
        "steps: eval={} readback={} total={}",
        report.eval_steps, report.readback_steps, report.total_steps
    )
}

fn read_input(input: &InputSource, stdin: &mut dyn Read) -> Result<String, String> {
    let mut source = String::new();
    match input {
        InputSource::Stdin => stdin
            .read_to_string(&mut source)
            .map_err(|e| format!("cannot read standard input: {e}"))?,
        InputSource::Path(path) => {
            source = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            0
        }
    };
    Ok(source)
}

/// Execute a parsed configuration, returning the process exit code.
pub fn run(
    config: &CliConfig,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let source = match read_input(&config.input, stdin) {
        Ok(source) => source,
        Err(message) => {
            let _ = writeln!(stderr, "error: {message}");
            return EXIT_INPUT;
        }
    };
    let checked = match elaborate(&config.free, &source) {
        Ok(checked) => checked,
        Err(err) => {
            let _ = writeln!(stderr, "error: {err}");
            return EXIT_INPUT;
        }
    };
    let result = match config.command {
        Command::Check => write_check(config, &checked, stdout),
        Command::Normalize | Command::Steps => match normalize(&checked, config.fuel) {
            Ok(report) => write_report(config, &checked, &report, stdout),
            Err(exhausted) => {
                let _ = writeln!(stderr, "error: {exhausted}");
                return EXIT_FUEL;
            }
        },
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(err) => {
            let _ = writeln!(stderr, "error: cannot write output: {err}");
            EXIT_INPUT
        }
    }
}

fn write_check(config: &CliConfig, checked: &Checked, out: &mut dyn Write) -> std::io::Result<()> {
    match config.format {
        OutputFormat::Json => {
            let json = JsonType {
                ty: checked.ty().to_string(),
            };
            writeln!(out, "{}", serde_json::to_string(&json)?)
        }
        OutputFormat::Text => {
            writeln!(out, "{}", checked.ty())?;
            if config.show_de_bruijn {
                writeln!(out, "de Bruijn: {}", print_de_bruijn(checked.term()))?;
            }
            Ok(())
        }
    }
}

fn write_report(
    config: &CliConfig,
    checked: &Checked,
    report: &NormalizeReport,
    out: &mut dyn Write,
) -> std::io::Result<()> {
    let normal = print_nf(&config.free, checked.ty(), &report.normal)
        .expect("normal forms produced by the engine are well typed");
    match (config.command, config.format) {
        (Command::Steps, OutputFormat::Json) => {
            let json = JsonSteps {
                eval_steps: report.eval_steps,
                readback_steps: report.readback_steps,
                total_steps: report.total_steps,
            };
            writeln!(out, "{}", serde_json::to_string(&json)?)
        }
        (Command::Steps, OutputFormat::Text) => writeln!(out, "{}", steps_line(report)),
        (_, OutputFormat::Json) => {
            let json = JsonReport {
                normal: &normal,
                ty: checked.ty().to_string(),
                eval_steps: report.eval_steps,
                readback_steps: report.readback_steps,
                total_steps: report.total_steps,
            };
            writeln!(out, "{}", serde_json::to_string(&json)?)
        }
        (_, OutputFormat::Text) => {
            writeln!(out, "{normal}")?;
            if config.show_de_bruijn {
                let ctx = checked.ctx();
                let term = embed_nf(ctx, checked.ty(), &report.normal)
                    .expect("normal forms produced by the engine are well typed");
                writeln!(out, "de Bruijn: {}", print_de_bruijn(&term))?;
            }
            if config.show_steps {
                writeln!(out, "{}", steps_line(report))?;
            }
            Ok(())
        }
    }
}
