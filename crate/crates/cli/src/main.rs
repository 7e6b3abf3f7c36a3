use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use depthzero::dossier::{
    build_dossier, export_points, fan_document, pretty_report, specialize_batch, DossierOptions, GroupSpec,
    VectorFile,
};
use depthzero::finite_linear::DEFAULT_GROUP_BUDGET;
use depthzero::Error;

#[derive(Parser)]
#[command(name = "depthzero", version, about = "Depth-zero Lubin-Tate and Deligne-Lusztig dossiers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the full pipeline on a group spec.
    Dossier {
        #[arg(long)]
        spec: PathBuf,
        /// Count Y(w) points for m = 1..=K; budget overruns become errors.
        #[arg(long)]
        count_max_m: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_GROUP_BUDGET)]
        budget: u128,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Append the human-readable report.
        #[arg(long)]
        pretty: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Specialize the level vectors of a vector file.
    Specialize {
        vector_file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Export the fan KGL_n.
    Fan {
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Canonical representatives of Y(w) over F_{q^m}.
    Points {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = DEFAULT_GROUP_BUDGET)]
        budget: u128,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse(_) => 2,
        Error::Size { .. } => 3,
        Error::InvariantViolation { .. } => 4,
        _ => 1,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::domain(format!("{}: {e}", p.display()))),
        None => {
            // a closed pipe downstream is not an error
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::domain(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.cmd {
        Cmd::Dossier {
            spec,
            count_max_m,
            budget,
            seed,
            pretty,
            out,
        } => {
            let spec = GroupSpec::parse(&read(&spec)?)?;
            let opts = DossierOptions {
                count_max_m,
                budget,
                seed,
            };
            let d = build_dossier(&spec, &opts)?;
            let mut text = d.to_json();
            text.push('\n');
            if pretty {
                text.push('\n');
                text.push_str(&pretty_report(&d));
            }
            emit(out.as_deref(), &text)?;
            if d.all_pass() {
                Ok(0)
            } else {
                eprintln!("falsified checks: {}", d.failures().join(", "));
                Ok(4)
            }
        }
        Cmd::Specialize { vector_file, seed, out } => {
            let file = VectorFile::parse(&read(&vector_file)?)?;
            let batch = specialize_batch(&file, seed)?;
            let mut text = batch.to_json();
            text.push('\n');
            emit(out.as_deref(), &text)?;
            eprintln!("{} agreements, {} failures", batch.agreements, batch.failures);
            Ok(if batch.all_agree() { 0 } else { 1 })
        }
        Cmd::Fan { n, out } => {
            let mut text = fan_document(n)?;
            text.push('\n');
            emit(out.as_deref(), &text)?;
            Ok(0)
        }
        Cmd::Points { spec, m, budget, out } => {
            let spec = GroupSpec::parse(&read(&spec)?)?;
            let mut text = export_points(&spec, m, budget)?.join("\n");
            text.push('\n');
            emit(out.as_deref(), &text)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
