use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use hofer_meander::certificate::render as render_certificate;
use hofer_meander::format::{parse, serialize};
use hofer_meander::maslov::shape_indices;
use hofer_meander::shape::{enumerate_shapes_with_limit, max_n_from_env};
use hofer_meander::svg::render_svg;
use hofer_meander::verify::{run_verify, VerifyConfig};
use hofer_meander::{untangle, Error, Meander, Side, Verdict};

const INVALID: u8 = 1;
const ASSERTION: u8 = 2;
const IO: u8 = 3;

#[derive(Parser)]
#[command(name = "meander", version, about = "Open meanders, Maslov indices and certified untangling")]
struct Cli {
    /// Append a generation timestamp as a trailing comment line.
    #[arg(long, global = true)]
    stamp: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a meander file against every invariant.
    Validate { file: PathBuf },
    /// Print the Maslov index of every crossing and the index gap.
    Index { file: PathBuf },
    /// List faces with side, depth, position relative to L and area.
    Faces { file: PathBuf },
    /// Run the untangling induction and print its certificate.
    Untangle {
        file: PathBuf,
        /// Write the input, the normalized meander and every intermediate state here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// List every shape with the given crossing count and first side.
    Enumerate {
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_side)]
        s0: Side,
    },
    /// Run the exhaustive property suite and print a summary table.
    Verify {
        #[arg(long)]
        max_n: usize,
        #[arg(long, default_value_t = 3)]
        areas_per_shape: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Draw a meander as an SVG diagram.
    Render {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_side(text: &str) -> Result<Side, String> {
    match text {
        "+" | "up" | "Up" => Ok(Side::Up),
        "-" | "down" | "Down" => Ok(Side::Down),
        _ => Err(format!("expected + or -, got `{text}`")),
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = if e.is_assertion() { ASSERTION } else { INVALID };
        Failure::new(code, e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(IO, format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::new(IO, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Meander, Failure> {
    let text = read(path)?;
    parse(&text).map_err(|e| Failure::new(INVALID, format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<String, Failure> {
    match command {
        Command::Validate { file } => {
            let m = load(&file)?;
            Ok(format!("ok {} crossings {} faces\n", m.n(), m.areas().len()))
        }
        Command::Index { file } => {
            let m = load(&file)?;
            let t = shape_indices(m.shape());
            let mu: Vec<String> = t.mu.iter().map(|v| v.to_string()).collect();
            Ok(format!("mu {}\nmax {}\nmin {}\ngap {}\n", mu.join(" "), t.mu_max, t.mu_min, t.gap))
        }
        Command::Faces { file } => {
            let m = load(&file)?;
            let faces = m.faces();
            let mut out = String::new();
            for (face, area) in m.areas() {
                out.push_str(&format!(
                    "{face} side {} depth {} below-L {} area {}\n",
                    faces.side(*face).symbol(),
                    faces.depth(*face),
                    if faces.below_l(*face) { "yes" } else { "no" },
                    hofer_meander::rational::format_rational(area)
                ));
            }
            Ok(out)
        }
        Command::Untangle { file, trace } => {
            let m = load(&file)?;
            let cert = untangle(&m);
            let text = render_certificate(&cert);
            if let Some(dir) = trace {
                fs::create_dir_all(&dir).map_err(|e| Failure::new(IO, format!("{}: {e}", dir.display())))?;
                write(&dir.join("input.meander"), &serialize(&cert.input))?;
                write(&dir.join("normalized.meander"), &serialize(&cert.normalized))?;
                for (i, step) in cert.trace.iter().enumerate() {
                    write(&dir.join(format!("step_{i:03}.meander")), step)?;
                }
                write(&dir.join("certificate.txt"), &text)?;
            }
            if cert.verdict == Verdict::Fail {
                print!("{text}");
                return Err(Failure::new(ASSERTION, cert.note.unwrap_or_else(|| "verdict fail".into())));
            }
            Ok(text)
        }
        Command::Enumerate { n, s0 } => {
            let shapes = enumerate_shapes_with_limit(n, s0, max_n_from_env())?;
            let mut out = String::new();
            for s in shapes {
                let perm: Vec<String> = s.perm.iter().map(|p| p.to_string()).collect();
                out.push_str(&format!("{} {}\n", perm.join(" "), s.s0.symbol()));
            }
            Ok(out)
        }
        Command::Verify { max_n, areas_per_shape, seed } => {
            let cfg = VerifyConfig { max_n, areas_per_shape, seed, limit: max_n_from_env() };
            let report = run_verify(&cfg)?;
            let text = report.to_string();
            if report.failures() > 0 {
                print!("{text}");
                return Err(Failure::new(ASSERTION, format!("{} failures", report.failures())));
            }
            Ok(text)
        }
        Command::Render { file, out } => {
            let m = load(&file)?;
            write(&out, &render_svg(&m))?;
            Ok(String::new())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(INVALID),
            };
        }
    };
    let stamp = cli.stamp;
    match run(cli.command) {
        Ok(text) => {
            print!("{text}");
            if stamp {
                let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
                println!("# generated at unix time {secs}");
            }
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
