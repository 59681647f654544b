use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use toastflow::commands::{self, RenderInputs};

#[derive(Parser)]
#[command(
    name = "toastflow",
    about = "Rounding rational graph flows to integral flows along nested \
             tile decompositions, and torus equidecompositions driven by \
             bounded flows",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TorusArgs {
    /// Torus dimensions: width height
    #[arg(long, num_args = 2, value_names = ["W", "H"])]
    torus: Vec<u32>,
}

impl TorusArgs {
    fn dims(&self) -> (u32, u32) {
        (self.torus[0], self.torus[1])
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a nested tile decomposition of a torus
    ToastGen {
        #[command(flatten)]
        torus: TorusArgs,
        /// Top-level cell pitch (torus side = base * factor^depth)
        #[arg(long)]
        base: u32,
        /// Branching factor per level
        #[arg(long)]
        factor: u32,
        /// Separation margin between sibling tiles
        #[arg(long, default_value_t = 3)]
        margin: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate a toast file against a graph
    ToastCheck {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        toast: PathBuf,
        /// Additionally require the k-toast separation property
        #[arg(long)]
        k: Option<u32>,
    },
    /// Round a rational f-flow to an integral one along a toast
    Round {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        toast: PathBuf,
        #[arg(long)]
        flow: PathBuf,
        #[arg(long)]
        demand: PathBuf,
        /// Write the cycle-addition trace here
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check that a flow file is an f-flow for a demand (and capacity)
    CheckFlow {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        flow: PathBuf,
        #[arg(long)]
        demand: PathBuf,
        #[arg(long)]
        capacity: Option<PathBuf>,
    },
    /// Integral-flow feasibility, lex-least flow, and enumeration
    Oracle {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        demand: PathBuf,
        #[arg(long)]
        capacity: PathBuf,
        /// Also count all integral flows with |value| <= N
        #[arg(long, value_name = "N")]
        enumerate: Option<i64>,
    },
    /// Generate a seeded random rounding instance (graph, toast, flow,
    /// demand, witness)
    GenInstance {
        #[command(flatten)]
        torus: TorusArgs,
        #[arg(long)]
        base: u32,
        #[arg(long)]
        factor: u32,
        #[arg(long, default_value_t = 3)]
        margin: u32,
        /// Number of rational perturbation circuits
        #[arg(long, default_value_t = 20)]
        circuits: u32,
        /// Circuit denominators (comma separated)
        #[arg(long, value_delimiter = ',', default_value = "3,5,7")]
        denominators: Vec<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Equidecompose vertex set A onto B over a square Følner tiling
    Equidecomp {
        #[command(flatten)]
        torus: TorusArgs,
        #[arg(long)]
        set_a: PathBuf,
        #[arg(long)]
        set_b: PathBuf,
        /// Følner parameter for the tiling, as a fraction p/q
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify that a pieces file maps A onto B
    VerifyPieces {
        #[command(flatten)]
        torus: TorusArgs,
        #[arg(long)]
        set_a: PathBuf,
        #[arg(long)]
        set_b: PathBuf,
        #[arg(long)]
        pieces: PathBuf,
    },
    /// Render pieces or graphs to SVG/DOT
    Render {
        #[arg(long)]
        pieces: Option<PathBuf>,
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        toast: Option<PathBuf>,
        /// Torus dimensions (needed with --pieces)
        #[arg(long, num_args = 2, value_names = ["W", "H"])]
        torus: Option<Vec<u32>>,
        #[arg(long, default_value = "svg", value_parser = ["svg", "dot"])]
        format: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> commands::CmdResult {
    match cli.command {
        Command::ToastGen { torus, base, factor, margin, seed, out } => {
            let (w, h) = torus.dims();
            commands::toast_gen(w, h, base, factor, margin, seed, &out)
        }
        Command::ToastCheck { graph, toast, k } => commands::toast_check(&graph, &toast, k),
        Command::Round { graph, toast, flow, demand, trace, out } => {
            commands::round(&graph, &toast, &flow, &demand, trace.as_deref(), &out)
        }
        Command::CheckFlow { graph, flow, demand, capacity } => {
            commands::check_flow(&graph, &flow, &demand, capacity.as_deref())
        }
        Command::Oracle { graph, demand, capacity, enumerate } => {
            commands::oracle(&graph, &demand, &capacity, enumerate)
        }
        Command::GenInstance {
            torus,
            base,
            factor,
            margin,
            circuits,
            denominators,
            seed,
            out_dir,
        } => {
            let (w, h) = torus.dims();
            commands::gen_instance(
                w, h, base, factor, margin, circuits, &denominators, seed, &out_dir,
            )
        }
        Command::Equidecomp { torus, set_a, set_b, epsilon, out } => {
            let (w, h) = torus.dims();
            commands::equidecomp(w, h, &set_a, &set_b, epsilon.as_deref(), &out)
        }
        Command::VerifyPieces { torus, set_a, set_b, pieces } => {
            let (w, h) = torus.dims();
            commands::verify_pieces(w, h, &set_a, &set_b, &pieces)
        }
        Command::Render { pieces, graph, toast, torus, format, out } => {
            let dims = torus.map(|t| (t[0], t[1]));
            commands::render_cmd(
                &RenderInputs {
                    pieces: pieces.as_deref(),
                    graph: graph.as_deref(),
                    toast: toast.as_deref(),
                    torus: dims,
                    format: &format,
                },
                &out,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
