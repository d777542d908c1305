//! Generate a planted-partition corpus and run the full pipeline on it.
//!
//! cargo run --release -p domainvec --example planted -- [kind] [seed] [hashtag_rate] [noise_retweets]

use std::fs::File;

use domainvec::pipeline::{run_pipeline, FeatureKind, PipelineConfig};
use domainvec::synth::{generate, SynthConfig};

fn main() -> domainvec::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let kind: FeatureKind = args.first().map_or(Ok(FeatureKind::Domain), |s| s.parse())?;
    let seed: u64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let synth = SynthConfig {
        seed,
        hashtag_rate: args.get(2).and_then(|s| s.parse().ok()).unwrap_or(0.0),
        noise_retweets_per_user: args.get(3).and_then(|s| s.parse().ok()).unwrap_or(0),
        peripheral_accounts: args.get(5).and_then(|s| s.parse().ok()).unwrap_or(300),
        domain_zipf: args.get(4).and_then(|s| s.parse().ok()).unwrap_or(1.0),
        ..Default::default()
    };
    let dir = std::env::temp_dir().join(format!("domainvec-planted-{kind}-{seed}"));
    std::fs::create_dir_all(&dir)?;
    let corpus = generate(&synth)?;
    corpus.write_files(File::create(dir.join("raw.jsonl"))?, File::create(dir.join("raw_map.tsv"))?)?;
    let mut cfg = PipelineConfig {
        tweets: dir.join("raw.jsonl"),
        url_expansion: Some(dir.join("raw_map.tsv")),
        output_dir: dir.join("out"),
        kind,
        deterministic: true,
        ..Default::default()
    };
    cfg.node2vec.seed = seed;
    cfg.mlp.seed = seed;
    cfg.split_seed = seed;
    let summary = run_pipeline(&cfg)?;
    println!("{}", summary.table_row());
    println!("users {} total {:.2}s {:?}", summary.users, summary.total_seconds, summary.timings);
    Ok(())
}
