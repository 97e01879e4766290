use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ednce::pipeline::{
    self, CliqueSolver, HittingSolver, InstructionPolicy, RunConfig, SampleOptions,
};
use ednce::Result;

#[derive(Parser)]
#[command(
    name = "ednce",
    version,
    about = "Induce, parse and sample unambiguous edNCE graph grammars over labeled DAGs"
)]
struct Cli {
    /// Worker threads for the parallel sections (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Induce a grammar and one parse per graph from a dataset.
    Induce {
        dataset: PathBuf,
        #[arg(short, long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Find the derivations of each dataset graph under a grammar.
    Parse {
        grammar: PathBuf,
        dataset: PathBuf,
        #[arg(short, long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Replay parses into a dataset file.
    Derive {
        grammar: PathBuf,
        parses: PathBuf,
        #[arg(short, long, default_value = "derived.json")]
        out: PathBuf,
    },
    /// Draw random derivations from a grammar.
    Sample {
        grammar: PathBuf,
        #[arg(short, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reject expansions that push the graph above this many nodes.
        #[arg(long)]
        node_budget: Option<usize>,
        #[arg(long, default_value_t = 100)]
        retries: usize,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
        #[arg(short, long, default_value = "out")]
        out: PathBuf,
    },
    /// Rule-token frequencies and the parse-length histogram.
    Stats {
        parses: PathBuf,
        #[arg(short, long, default_value = "out")]
        out: PathBuf,
    },
    /// Check replay validity and unambiguity of a grammar over a dataset.
    Check {
        grammar: PathBuf,
        dataset: PathBuf,
        #[arg(long)]
        parses: Option<PathBuf>,
        #[arg(short, long, default_value = "out")]
        out: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct Opts {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Patterns kept per level of motif mining.
    #[arg(long)]
    beam_width: Option<usize>,
    #[arg(long)]
    max_motif_size: Option<usize>,
    #[arg(long)]
    top_n: Option<usize>,
    #[arg(long, value_enum, default_value_t = CliqueSolver::Exact)]
    clique_solver: CliqueSolver,
    #[arg(long)]
    k_restarts: Option<usize>,
    /// Compatibility graphs above this size use the approximate solver.
    #[arg(long)]
    exact_clique_cap: Option<usize>,
    #[arg(long)]
    redirection_cap: Option<usize>,
    #[arg(long, value_enum, default_value_t = InstructionPolicy::Minimal)]
    instruction_policy: InstructionPolicy,
    #[arg(long, value_enum, default_value_t = HittingSolver::Exact)]
    hitting_set: HittingSolver,
    /// Beam width of the hitting-set search.
    #[arg(long)]
    hitting_beam_width: Option<usize>,
    #[arg(long)]
    max_derivations_per_graph: Option<usize>,
    #[arg(long)]
    max_enumeration_states: Option<usize>,
    /// Seconds of derivation enumeration per graph.
    #[arg(long)]
    enum_timeout: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    skip_disambiguation: bool,
    /// Induce separately on consecutive chunks of this many graphs.
    #[arg(long)]
    partition_by: Option<usize>,
}

impl Opts {
    fn config(self, jobs: Option<usize>) -> RunConfig {
        let d = RunConfig::default();
        RunConfig {
            seed: self.seed,
            beam_width: self.beam_width.unwrap_or(d.beam_width),
            max_motif_size: self.max_motif_size.unwrap_or(d.max_motif_size),
            top_n: self.top_n.unwrap_or(d.top_n),
            clique_solver: self.clique_solver,
            k_restarts: self.k_restarts.unwrap_or(d.k_restarts),
            exact_clique_cap: self.exact_clique_cap.unwrap_or(d.exact_clique_cap),
            redirection_cap: self.redirection_cap.unwrap_or(d.redirection_cap),
            instruction_policy: self.instruction_policy,
            hitting_set: self.hitting_set,
            hitting_beam_width: self.hitting_beam_width.unwrap_or(d.hitting_beam_width),
            max_derivations_per_graph: self
                .max_derivations_per_graph
                .unwrap_or(d.max_derivations_per_graph),
            max_enumeration_states: self
                .max_enumeration_states
                .unwrap_or(d.max_enumeration_states),
            enum_timeout: self.enum_timeout,
            max_iters: self.max_iters.unwrap_or(d.max_iters),
            skip_disambiguation: self.skip_disambiguation,
            partition_by: self.partition_by,
            jobs,
            dataset: None,
            out_dir: None,
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let jobs = cli.jobs;
    match cli.command {
        Command::Induce { dataset, out, opts } => {
            let s = pipeline::cmd_induce(&dataset, &out, &opts.config(jobs))?;
            println!(
                "{} graphs, {} rules, {} lost; |H| {} -> {} -> {}",
                s.graphs,
                s.rules,
                s.lost,
                s.compression.initial,
                s.compression.pre_termination,
                s.compression.post_termination
            );
        }
        Command::Parse {
            grammar,
            dataset,
            out,
            opts,
        } => {
            for (i, o) in pipeline::cmd_parse(&grammar, &dataset, &out, &opts.config(jobs))?
                .iter()
                .enumerate()
            {
                println!("{i}\t{}", o.status());
            }
        }
        Command::Derive {
            grammar,
            parses,
            out,
        } => {
            let d = pipeline::cmd_derive(&grammar, &parses, &out)?;
            println!("{} graphs written to {}", d.len(), out.display());
        }
        Command::Sample {
            grammar,
            n,
            seed,
            node_budget,
            retries,
            max_steps,
            out,
        } => {
            let opts = SampleOptions {
                n,
                seed,
                node_budget,
                retries,
                max_steps,
            };
            let r = pipeline::cmd_sample(&grammar, &out, &opts)?;
            println!("{} samples written to {}", r.produced, out.display());
        }
        Command::Stats { parses, out } => {
            let (freq, hist) = pipeline::cmd_stats(&parses, &out)?;
            println!(
                "{} distinct rules, {} parse lengths",
                freq.len(),
                hist.len()
            );
        }
        Command::Check {
            grammar,
            dataset,
            parses,
            out,
            opts,
        } => {
            let results = pipeline::cmd_check(
                &grammar,
                &dataset,
                parses.as_deref(),
                &out,
                &opts.config(jobs),
            )?;
            println!("{} checks passed", results.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("ednce: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ednce: {e}");
            let mut src = std::error::Error::source(&e);
            while let Some(s) = src {
                eprintln!("  caused by: {s}");
                src = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
