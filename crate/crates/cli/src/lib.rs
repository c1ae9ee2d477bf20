//! Command line front end: argument parsing, input loading and report rendering.
//!
//! Every subcommand writes one JSON document (or DOT text) to stdout or `--out` and a
//! one-line summary to stderr. Exit codes: 0 success, 1 failed, 2 inconclusive, 3 usage or input error.

mod commands;
mod input;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use traintrack::pnp::ExtensionRule;

pub use commands::Outcome;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "traintrack",
    version,
    about = "Train track maps, fold decompositions and ltt automata"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether a map is a train track map.
    VerifyTt(MapCmd),
    /// Gates, illegal turns, taken turns and the transition matrix.
    Gates(MapCmd),
    /// The lamination train track structure of a PNP-free train track map.
    Ltt(LttCmd),
    /// Search for periodic Nielsen paths along a fold decomposition.
    PnpCheck(PnpCmd),
    /// Replay a PNP certificate.
    VerifyCertificate(VerifyCmd),
    /// Full irreducibility criterion.
    Fic(PnpCmd),
    /// Proper full fold decomposition of a train track map.
    Factor(MapCmd),
    /// Compose a fold chain and report its turn data.
    Compose(ComposeCmd),
    /// Build an ltt automaton for an ideal Whitehead graph.
    BuildAutomaton(BuildCmd),
    /// The automaton loop traced by a fold decomposition.
    TraceLoop(TraceCmd),
    /// Seeded random loops in an automaton.
    SampleLoops(SampleCmd),
    /// Decide whether an automaton loop realizes a fully irreducible map.
    CertifyLoop(CertifyCmd),
    /// A smooth loop covering every colored edge of an ltt structure.
    WitnessLoop(LttCmd),
    /// Graphviz rendering of an automaton or an ltt structure.
    ExportDot(DotCmd),
}

#[derive(Args, Debug, Clone, Default)]
pub struct MapInput {
    /// Map in the edge-image language, e.g. `a->cbca;b->cbc;c->ac`.
    #[arg(long)]
    pub map: Option<String>,
    /// File holding the map text.
    #[arg(long, value_name = "FILE")]
    pub map_file: Option<PathBuf>,
    /// Carrier graph as JSON; the rose on the listed edges by default.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ChainInput {
    /// Fold chain, e.g. `fold a over b; fold c over a; perm b->B`.
    #[arg(long)]
    pub chain: Option<String>,
    /// File holding the chain text.
    #[arg(long, value_name = "FILE")]
    pub chain_file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Output {
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MapCmd {
    #[command(flatten)]
    pub input: MapInput,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Extension {
    Taken,
    Legal,
}

impl From<Extension> for ExtensionRule {
    fn from(e: Extension) -> Self {
        match e {
            Extension::Taken => ExtensionRule::Taken,
            Extension::Legal => ExtensionRule::Legal,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct SearchArgs {
    /// Stage limit of the Nielsen path search; four chain periods by default.
    #[arg(long)]
    pub max_stages: Option<usize>,
    /// Node limit of the Nielsen path search.
    #[arg(long, default_value_t = 1_000_000)]
    pub node_budget: usize,
    /// Turns allowed when a leg is extended.
    #[arg(long, value_enum, default_value = "taken")]
    pub extension: Extension,
}

#[derive(Args, Debug)]
pub struct PnpCmd {
    #[command(flatten)]
    pub input: MapInput,
    #[command(flatten)]
    pub chain: ChainInput,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct LttCmd {
    #[command(flatten)]
    pub input: MapInput,
    #[command(flatten)]
    pub chain: ChainInput,
    /// Read the structure from an ltt JSON file instead of computing it from a map.
    #[arg(long, value_name = "FILE")]
    pub ltt: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct VerifyCmd {
    /// A PNP certificate, or a report embedding one under `pnp_certificate`.
    #[arg(long, value_name = "FILE")]
    pub certificate: PathBuf,
    /// Also require the certified chain to compose to this map.
    #[command(flatten)]
    pub input: MapInput,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct ComposeCmd {
    #[command(flatten)]
    pub chain: ChainInput,
    /// Carrier graph as JSON; the rose on the letters of the chain by default.
    #[arg(long, value_name = "FILE")]
    pub graph: Option<PathBuf>,
    /// Include the per-step table of new turns and pushed turns.
    #[arg(long)]
    pub tables: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct BuildCmd {
    /// Ideal Whitehead graph spec as JSON (`rank` and `graph`).
    #[arg(long, value_name = "FILE")]
    pub iwg: Option<PathBuf>,
    /// Rank; overrides the spec file.
    #[arg(long)]
    pub rank: Option<i64>,
    #[arg(long, conflicts_with = "fully_singular")]
    pub lone_axis: bool,
    #[arg(long)]
    pub fully_singular: bool,
    /// Seed with the structure of a certified map; the spec defaults to its ideal Whitehead graph.
    #[command(flatten)]
    pub input: MapInput,
    #[command(flatten)]
    pub chain: ChainInput,
    /// Also generate every admissible structure on the rose (rank 3).
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, default_value_t = 100_000)]
    pub max_vertices: usize,
    /// Remove components carrying an invariant proper subgraph.
    #[arg(long)]
    pub drop_invariant: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct TraceCmd {
    #[arg(long, value_name = "FILE")]
    pub automaton: PathBuf,
    #[command(flatten)]
    pub input: MapInput,
    #[command(flatten)]
    pub chain: ChainInput,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct SampleCmd {
    #[arg(long, value_name = "FILE")]
    pub automaton: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
    /// Longest random walk before closing the loop.
    #[arg(long, default_value_t = 6)]
    pub max_walk: usize,
    #[arg(long, default_value_t = 20240917)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct CertifyCmd {
    #[arg(long, value_name = "FILE")]
    pub automaton: PathBuf,
    /// Loop JSON with `start` and `edges`.
    #[arg(long = "loop", value_name = "FILE")]
    pub loop_file: Option<PathBuf>,
    /// Loop start vertex, with `--edges`.
    #[arg(long)]
    pub start: Option<usize>,
    /// Comma separated edge ids.
    #[arg(long, value_delimiter = ',')]
    pub edges: Option<Vec<usize>>,
    #[command(flatten)]
    pub search: SearchArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct DotCmd {
    #[arg(long, value_name = "FILE", conflicts_with = "ltt")]
    pub automaton: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub ltt: Option<PathBuf>,
    #[command(flatten)]
    pub input: MapInput,
    #[command(flatten)]
    pub chain: ChainInput,
    #[command(flatten)]
    pub output: Output,
}

/// Parse arguments, run the command and return the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match commands::execute(&cli.command) {
        Ok(out) => {
            let text = out.body;
            let written = match commands::output_of(&cli.command).out.as_ref() {
                Some(p) => std::fs::write(p, &text)
                    .map_err(|e| format!("cannot write {}: {e}", p.display())),
                None => stdout.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                let _ = writeln!(stderr, "error: {e}");
                return EXIT_USAGE;
            }
            let _ = writeln!(stderr, "{}", out.summary);
            out.outcome.code()
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}
