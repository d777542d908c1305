use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use domainvec::model::AssemblyMode;
use domainvec::pipeline::{run_pipeline, run_stage, FeatureKind, PipelineConfig, Stage, StageOutput};
use domainvec::synth::{generate, SynthConfig};
use domainvec::{Error, Result};

#[derive(Parser)]
#[command(name = "domainvec", version, about = "User embedding from URL-domain co-occurrence networks", args_override_self = true)]
struct Cli {
    /// Log progress (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and normalize the raw tweets and URL expansion map.
    Ingest(Common),
    /// Build the network named by --kind (retweet, domain or hashtag).
    Graph(Common),
    /// Cluster the retweet network and write binary reference labels.
    Louvain(Common),
    /// Embed the feature network with node2vec.
    Embed(Common),
    /// Assemble user vectors, split them and train the classifier.
    Train(Common),
    /// Score the classifier on the validation and test splits.
    Eval(Common),
    /// Write a t-SNE projection of the user vectors.
    Project(Common),
    /// Run every stage in order.
    Run(Common),
    /// Write a synthetic two-community corpus.
    Synth(SynthArgs),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML configuration; flags below override it.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tweets: Option<PathBuf>,
    #[arg(long)]
    url_expansion: Option<PathBuf>,
    /// Output directory holding every artifact.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Feature network: domain, hashtag or retweet.
    #[arg(long, value_parser = parse_kind)]
    kind: Option<FeatureKind>,
    /// mean, concat_topk or concat_topk:K.
    #[arg(long, value_parser = parse_assembly)]
    assembly: Option<AssemblyMode>,
    /// Seed for every random component.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Single-threaded training and timing-free reports.
    #[arg(long)]
    deterministic: bool,
    /// Skip the t-SNE projection in `run`.
    #[arg(long)]
    no_project: bool,
}

#[derive(Args)]
struct SynthArgs {
    /// Directory for tweets.jsonl and url_expansion.tsv.
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 300)]
    users_per_community: usize,
    #[arg(long, default_value_t = 0.0)]
    hashtag_rate: f64,
    #[arg(long, default_value_t = 0)]
    noise_retweets: usize,
}

fn parse_kind(s: &str) -> std::result::Result<FeatureKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_assembly(s: &str) -> std::result::Result<AssemblyMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Common {
    fn config(&self) -> Result<PipelineConfig> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(v) = &self.tweets {
            cfg.tweets = v.clone();
        }
        if let Some(v) = &self.url_expansion {
            cfg.url_expansion = Some(v.clone());
        }
        if let Some(v) = &self.out {
            cfg.output_dir = v.clone();
        }
        if let Some(v) = self.kind {
            cfg.kind = v;
        }
        if let Some(v) = self.assembly {
            cfg.assembly = v;
        }
        if let Some(seed) = self.seed {
            cfg.split_seed = seed;
            cfg.louvain_seed = seed;
            cfg.node2vec.seed = seed;
            cfg.mlp.seed = seed;
            cfg.tsne.seed = seed;
        }
        if let Some(v) = self.dim {
            cfg.node2vec.dim = v;
        }
        if let Some(v) = self.epochs {
            cfg.mlp.epochs = v;
        }
        cfg.deterministic |= self.deterministic;
        if self.no_project {
            cfg.project = false;
        }
        Ok(cfg)
    }
}

fn report(output: StageOutput) {
    match output {
        StageOutput::Ingested { records, skipped } => println!("ingested {records} records ({skipped} malformed lines skipped)"),
        StageOutput::Graph { kind, nodes, edges } => println!("{kind} network: {nodes} nodes, {edges} edges"),
        StageOutput::Labels { communities, modularity, labelled, dropped } => println!(
            "{communities} communities, modularity {modularity:.4}; {labelled} users labelled, {dropped} outside the two largest"
        ),
        StageOutput::Embedded { nodes, dim } => println!("embedded {nodes} nodes in {dim} dimensions"),
        StageOutput::Trained { users, excluded, unlabelled, best_epoch } => println!(
            "trained on {users} users ({excluded} without items, {unlabelled} unlabelled); best epoch {best_epoch}"
        ),
        StageOutput::Evaluated { val, test } => println!(
            "val_acc={:.4} test_acc={:.4} val_macro_f1={:.4} test_macro_f1={:.4}",
            val.accuracy, test.accuracy, val.macro_f1, test.macro_f1
        ),
        StageOutput::Projected { points, kl_initial, kl_final } => {
            println!("projected {points} users; KL {kl_initial:.4} -> {kl_final:.4}")
        }
    }
}

fn stage(common: &Common, stage: Stage) -> Result<()> {
    report(run_stage(&common.config()?, stage)?);
    Ok(())
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Ingest(c) => stage(&c, Stage::Ingest),
        Command::Graph(c) => {
            let cfg = c.config()?;
            let which = if cfg.kind == FeatureKind::Retweet {
                Stage::RetweetGraph
            } else {
                Stage::FeatureGraph
            };
            report(run_stage(&cfg, which)?);
            Ok(())
        }
        Command::Louvain(c) => stage(&c, Stage::Louvain),
        Command::Embed(c) => stage(&c, Stage::Embed),
        Command::Train(c) => stage(&c, Stage::Train),
        Command::Eval(c) => stage(&c, Stage::Eval),
        Command::Project(c) => stage(&c, Stage::Project),
        Command::Run(c) => {
            let summary = run_pipeline(&c.config()?)?;
            println!("{}", summary.table_row());
            Ok(())
        }
        Command::Synth(a) => {
            let cfg = SynthConfig {
                seed: a.seed,
                users_per_community: a.users_per_community,
                hashtag_rate: a.hashtag_rate,
                noise_retweets_per_user: a.noise_retweets,
                ..Default::default()
            };
            let corpus = generate(&cfg)?;
            std::fs::create_dir_all(&a.out)?;
            corpus.write_files(
                BufWriter::new(File::create(a.out.join("tweets.jsonl"))?),
                BufWriter::new(File::create(a.out.join("url_expansion.tsv"))?),
            )?;
            println!("wrote {} tweets to {}", corpus.records.len(), a.out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
