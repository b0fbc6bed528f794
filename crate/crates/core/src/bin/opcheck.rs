use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use opcheck::cm_operad::{CMObject, Color, Variant};
use opcheck::envelope::{EnvObject, FPlusObject, DEFAULT_CEILING};
use opcheck::fincat::{to_dot, OperadCheckOptions, Scope};
use opcheck::finset::PointedMap;
use opcheck::report::{self, CategoryKind, FunctorCheck, Run};
use opcheck::semantics::{bundled_algebra, parse_algebra};
use opcheck::Error;

#[derive(Parser)]
#[command(name = "opcheck", version)]
#[command(about = "Exhaustive checks for the operad CM, its envelope and module semantics")]
struct Cli {
    #[command(flatten)]
    output: OutputArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, global = true, default_value = "json")]
    format: Format,

    /// Write the category the command built as a DOT digraph
    #[arg(long, global = true)]
    dot: Option<PathBuf>,

    /// Compare the JSON report with this file (OPCHECK_BLESS=1 rewrites it)
    #[arg(long, global = true)]
    golden: Option<PathBuf>,

    /// Include wall-clock time in the report (breaks byte-for-byte determinism)
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verifier
    #[command(subcommand)]
    Verify(Verify),

    /// Multimorphisms with the given input colors and output color
    Mul {
        /// Comma-separated colors, e.g. `a,m` (empty for no inputs)
        #[arg(long, default_value = "", value_parser = parse_colors)]
        inputs: Colors,
        #[arg(long)]
        output: Color,
        #[arg(long, default_value = "strengthened")]
        variant: Variant,
    },

    /// Check the functor A_{E,M} built from an algebra file or bundled name
    Functor {
        /// Path to an algebra JSON file, or `z2_additive` / `max_monoid`
        #[arg(long)]
        algebra: String,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        /// Comma-separated: functoriality, cardinality, cube
        #[arg(long, value_delimiter = ',', default_value = "functoriality,cardinality,cube")]
        check: Vec<FunctorCheck>,
    },

    /// List all pointed maps <m> -> <n> with their inert/active flags
    Maps {
        #[arg(long)]
        source: usize,
        #[arg(long)]
        target: usize,
    },

    /// Inert-active factorization of a pointed map such as `3->2:1,0,2`
    Factorize { map: PointedMap },

    /// The inert cube of <n>
    Cube {
        #[arg(long)]
        arity: usize,
    },

    /// Whether a pointed map underlies a CM morphism, e.g. `--source "(2|1)" --target "(1|1)" 2->1:1,1`
    CmMorphism {
        map: PointedMap,
        #[arg(long)]
        source: CMObject,
        #[arg(long)]
        target: CMObject,
        #[arg(long, default_value = "strengthened")]
        variant: Variant,
    },

    /// Whether a map of carriers restricts to a bijection on marks
    FplusMorphism {
        /// Comma-separated images, e.g. `1,1`
        #[arg(value_delimiter = ',')]
        map: Vec<usize>,
        #[arg(long)]
        source: FPlusObject,
        #[arg(long)]
        target: FPlusObject,
    },

    /// Image of an envelope object such as `(2|1)@2:1,2` in tuples of F+
    Compare { object: EnvObject },

    /// Build a truncated category and check the category axioms
    Build {
        #[arg(value_parser = parse_kind)]
        category: CategoryKind,
        #[arg(long, default_value_t = 2)]
        max_size: usize,
        #[arg(long, default_value_t = 2)]
        shape: usize,
        #[arg(long, default_value = "strengthened")]
        variant: Variant,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// Closure under composition and the three operad conditions
    Operad {
        #[arg(long, default_value = "strengthened")]
        variant: Variant,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        /// Check hom decomposition only over inert base maps
        #[arg(long)]
        inert_only: bool,
        /// Accept an equivalence of fibers in the Segal condition
        #[arg(long)]
        up_to_equivalence: bool,
    },
    /// Comparison between the envelope and tuples of F+
    Envelope {
        #[arg(long, default_value = "strengthened")]
        variant: Variant,
        #[arg(long, default_value_t = 2)]
        max_size: usize,
        #[arg(long, default_value_t = 2)]
        shape: usize,
    },
    /// Full faithfulness of phi onto the objects with at most one mark
    Phi {
        #[arg(long, default_value = "strengthened")]
        variant: Variant,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
    },
    /// Segal comparison for the fiber over <n>
    Segal {
        #[arg(long, default_value = "strengthened")]
        variant: Variant,
        #[arg(long, default_value_t = 2)]
        arity: usize,
    },
    /// Identities and closure of the morphism predicate under composition
    Closure {
        #[arg(long, default_value = "strengthened")]
        variant: Variant,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
    },
}

#[derive(Clone)]
struct Colors(Vec<Color>);

fn parse_colors(s: &str) -> Result<Colors, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|c| !c.is_empty())
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map(Colors)
}

fn parse_kind(s: &str) -> Result<CategoryKind, Error> {
    s.parse()
}

fn ceiling() -> Result<usize, Error> {
    match std::env::var("OPCHECK_CEILING") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("OPCHECK_CEILING must be a natural number, got `{s}`"))),
        Err(_) => Ok(DEFAULT_CEILING),
    }
}

fn load_algebra(spec: &str) -> Result<(opcheck::semantics::ModuleData, String), Error> {
    let path = Path::new(spec);
    if path.exists() {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| spec.to_string());
        return Ok((parse_algebra(&fs::read_to_string(path)?)?, name));
    }
    let name = spec.strip_suffix(".json").unwrap_or(spec);
    bundled_algebra(name)
        .map(|m| (m, name.to_string()))
        .ok_or_else(|| Error::Parse(format!("no algebra file or bundled algebra named `{spec}`")))
}

fn dispatch(command: Command) -> Result<Run, Error> {
    let ceiling = ceiling()?;
    match command {
        Command::Verify(v) => match v {
            Verify::Operad {
                variant,
                max_size,
                inert_only,
                up_to_equivalence,
            } => {
                let opts = OperadCheckOptions {
                    scope: if inert_only { Scope::InertOnly } else { Scope::Full },
                    up_to_equivalence,
                };
                report::cmd_verify_operad(max_size, variant, opts, ceiling)
            }
            Verify::Envelope {
                variant,
                max_size,
                shape,
            } => report::cmd_verify_envelope(max_size, shape, variant, ceiling),
            Verify::Phi { variant, max_size } => report::cmd_verify_phi(max_size, variant, ceiling),
            Verify::Segal { variant, arity } => report::cmd_verify_segal(arity, variant, ceiling),
            Verify::Closure { variant, max_size } => report::cmd_verify_closure(max_size, variant, ceiling),
        },
        Command::Mul {
            inputs,
            output,
            variant,
        } => report::cmd_mul(&inputs.0, output, variant),
        Command::Functor {
            algebra,
            max_size,
            check,
        } => {
            let (m, name) = load_algebra(&algebra)?;
            report::cmd_functor(&m, &name, max_size, &check, ceiling)
        }
        Command::Maps { source, target } => report::cmd_maps(source, target),
        Command::Factorize { map } => report::cmd_factorize(&map),
        Command::Cube { arity } => report::cmd_cube(arity),
        Command::CmMorphism {
            map,
            source,
            target,
            variant,
        } => report::cmd_cm_morphism(&map, &source, &target, variant),
        Command::FplusMorphism { map, source, target } => report::cmd_fplus_morphism(&map, &source, &target),
        Command::Compare { object } => report::cmd_compare(&object),
        Command::Build {
            category,
            max_size,
            shape,
            variant,
        } => report::cmd_build(category, max_size, shape, variant, ceiling),
    }
}

fn run(cli: Cli) -> Result<i32, Error> {
    let start = Instant::now();
    let Run { mut report, category } = dispatch(cli.command)?;
    if cli.output.timing {
        report.wall_time_ms = Some(start.elapsed().as_millis());
    }
    if let Some(path) = &cli.output.dot {
        let c = category.ok_or_else(|| Error::Parse("this command builds no category to export".into()))?;
        fs::write(path, to_dot(&c, &report.command))?;
    }
    let json = report.to_json();
    if let Some(path) = &cli.output.golden {
        if std::env::var_os("OPCHECK_BLESS").is_some() {
            fs::write(path, &json)?;
        } else {
            let expected = fs::read_to_string(path)?;
            if expected != json {
                return Err(Error::Mismatch(format!("report differs from golden file {}", path.display())));
            }
        }
    }
    match cli.output.format {
        Format::Json => print!("{json}"),
        Format::Text => print!("{}", report.to_text()),
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
