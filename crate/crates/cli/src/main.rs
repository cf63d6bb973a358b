use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use apgen_cli::commands::{self, Context};
use apgen_cli::config::{check_bound, parse_count, parse_grid, selector, Format, RunConfig};
use apgen_cli::{report, AppError};
use apgen_core::par;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "apgen", version, about = "Reducible Hecke eigenvalue primes of newform orbits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Cache directory (overrides APGEN_CACHE_DIR; caching is off when neither is set).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Worker threads (1 runs sequentially).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct Space {
    #[arg(long)]
    level: u64,
    #[arg(long, default_value_t = 2)]
    weight: u32,
}

#[derive(Args)]
struct Form {
    #[command(flatten)]
    space: Space,
    /// Orbit label such as 389.2.3 (default: every orbit).
    #[arg(long, conflicts_with = "orbit_degree")]
    orbit: Option<String>,
    /// First orbit of this degree.
    #[arg(long)]
    orbit_degree: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// List the Galois orbits of newforms.
    Orbits(Space),
    /// Reducible primes p <= bound.
    Census {
        #[command(flatten)]
        form: Form,
        #[arg(long, default_value = "1000", value_parser = parse_count)]
        bound: u64,
    },
    /// CM and inner twists with predicted densities.
    Twists {
        #[command(flatten)]
        form: Form,
        /// Starting prime bound of the twist search.
        #[arg(long, default_value = "1000", value_parser = parse_count)]
        bound: u64,
    },
    /// Predicted vs observed densities for primes p <= bound.
    Density {
        #[command(flatten)]
        form: Form,
        #[arg(long, default_value = "10000", value_parser = parse_count)]
        bound: u64,
    },
    /// N(x) = #{reducible p < x} on a grid.
    Count {
        #[command(flatten)]
        form: Form,
        /// Comma separated ascending values, e.g. 1e5,2e5,3e5.
        #[arg(long)]
        grid: String,
    },
    /// Conjugacy class and subgroup checks for GL2 over small fields.
    Gl2 {
        /// Only this base field.
        #[arg(long, value_parser = parse_count)]
        q: Option<u64>,
        /// All fields q^r up to this size (default 16).
        #[arg(long, value_parser = parse_count)]
        grid_max: Option<u64>,
    },
}

/// Report text, human notes for stderr, and whether all checks passed.
fn run(cli: Cli) -> Result<(String, Vec<String>, bool), AppError> {
    let config = RunConfig::resolve(cli.cache_dir, cli.format, cli.workers)?;
    let fmt = config.format;
    let workers = config.workers;
    let ctx = Context::new(config)?;
    par::with_workers(workers, move || match cli.command {
        Command::Orbits(s) => {
            let rows = commands::orbits(s.level, s.weight)?;
            Ok((report::orbits(&rows, fmt), vec![format!("{} orbit(s)", rows.len())], true))
        }
        Command::Census { form, bound } => {
            let sel = selector(form.orbit, form.orbit_degree);
            let rs = commands::census(&ctx, form.space.level, form.space.weight, &sel, check_bound(bound)?)?;
            let notes = rs
                .iter()
                .map(|r| {
                    let mut s = format!("{}: {} reducible primes <= {}: {:?}", r.orbit, r.count, r.bound, r.reducible);
                    if !r.square_level_primes.is_empty() {
                        s.push_str(&format!(" (p^2 | N: {:?})", r.square_level_primes));
                    }
                    s
                })
                .collect();
            Ok((report::census(&rs, fmt), notes, true))
        }
        Command::Twists { form, bound } => {
            let sel = selector(form.orbit, form.orbit_degree);
            let rs = commands::twists(&ctx, form.space.level, form.space.weight, &sel, check_bound(bound)?)?;
            let notes = rs
                .iter()
                .map(|r| match r.cm_discriminant {
                    Some(d) => format!("{}: CM by discriminant {d}", r.orbit),
                    None => format!("{}: inner twists {:?}, |Gamma| = {}", r.orbit, r.inner_twists, r.gamma_order),
                })
                .collect();
            Ok((report::twists(&rs, fmt), notes, true))
        }
        Command::Density { form, bound } => {
            let sel = selector(form.orbit, form.orbit_degree);
            let rs = commands::density(&ctx, form.space.level, form.space.weight, &sel, check_bound(bound)?)?;
            Ok((report::density(&rs, fmt), Vec::new(), true))
        }
        Command::Count { form, grid } => {
            let sel = selector(form.orbit, form.orbit_degree);
            let rows = commands::count(&ctx, form.space.level, form.space.weight, &sel, &parse_grid(&grid)?)?;
            Ok((report::count(&rows, fmt), Vec::new(), true))
        }
        Command::Gl2 { q, grid_max } => {
            let out = commands::gl2(&ctx, q, grid_max)?;
            let mut notes: Vec<String> = out
                .kinds
                .iter()
                .map(|l| {
                    format!(
                        "GL2(F_{}): order {}, {} classes, kind counts {:?}, sizes {:?}: {}",
                        l.q,
                        l.order,
                        l.class_count,
                        l.kind_counts,
                        l.kind_sizes,
                        if l.holds { "ok" } else { "FAILED" }
                    )
                })
                .collect();
            let failed = out.points.iter().filter(|p| !p.passes).count();
            let worst = out.points.iter().map(|p| p.max_ratio).fold(0.0, f64::max);
            notes.push(format!("{} parameter points, {failed} failed, max ratio {worst:.6}", out.points.len()));
            let ok = out.passes();
            Ok((report::gl2(&out, fmt), notes, ok))
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output.clone();
    let start = Instant::now();
    match run(cli) {
        Ok((body, notes, ok)) => {
            let written = match &output {
                Some(path) => std::fs::write(path, &body).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => {
                    print!("{body}");
                    Ok(())
                }
            };
            for n in notes {
                eprintln!("{n}");
            }
            eprintln!("elapsed {:.2?}", start.elapsed());
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
