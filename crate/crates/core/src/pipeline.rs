//! End-to-end experiment: ingest, retweet network, Louvain labels, feature
//! network, node2vec, classifier, evaluation and projection.
//!
//! Every stage reads its inputs from and writes its outputs to one output
//! directory, so a run can be resumed stage by stage and the staged run
//! produces the same files as [`run_pipeline`].

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::community::{default_class_names, louvain_cluster, to_binary_labels, BinaryLabels};
use crate::error::{Error, Result};
use crate::eval::{evaluate, tsne_project, EvalReport, TsneParams};
use crate::graph::{
    build_domain_cooccurrence, build_hashtag_cooccurrence, build_retweet_network, BuildOptions, Graph, UserItemMap,
};
use crate::ingest::{parse_tweets, preprocess_text, write_tweets, UrlExpansionMap};
use crate::model::{
    assemble_user_vectors, attach_labels, split_dataset, train_classifier, AssemblyMode, LabeledDataset, MlpModel,
    MlpParams, Split,
};
use crate::node2vec::{embed, EmbeddingMatrix, Node2vecParams, TrainingMode};

pub const TWEETS: &str = "tweets.jsonl";
pub const EXPANSION: &str = "url_expansion.tsv";
pub const PARTITION: &str = "partition.tsv";
pub const LABELS: &str = "labels.tsv";
pub const EMBEDDINGS: &str = "embeddings.txt";
pub const DATASET: &str = "dataset.tsv";
pub const MODEL: &str = "model.bin";
pub const LEARNING_CURVE: &str = "learning_curve.csv";
pub const EVAL_VAL: &str = "eval_val.json";
pub const EVAL_TEST: &str = "eval_test.json";
pub const PROJECTION: &str = "projection.tsv";
pub const MANIFEST: &str = "MANIFEST.json";
pub const CONFIG: &str = "config.toml";

/// Which network the user features come from.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    #[default]
    Domain,
    Hashtag,
    Retweet,
}

impl FeatureKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FeatureKind::Domain => "domain",
            FeatureKind::Hashtag => "hashtag",
            FeatureKind::Retweet => "retweet",
        }
    }

    pub fn edges_file(self) -> String {
        format!("graph_{}.edges", self.as_str())
    }

    pub fn users_file(self) -> String {
        format!("graph_{}.users.tsv", self.as_str())
    }

    fn producer(self) -> &'static str {
        match self {
            FeatureKind::Domain => "graph --kind domain",
            FeatureKind::Hashtag => "graph --kind hashtag",
            FeatureKind::Retweet => "graph --kind retweet",
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "domain" => Ok(FeatureKind::Domain),
            "hashtag" => Ok(FeatureKind::Hashtag),
            "retweet" => Ok(FeatureKind::Retweet),
            _ => Err(Error::Config(format!(
                "unknown feature kind {s:?} (expected domain, hashtag or retweet)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Newline-delimited JSON tweet records.
    pub tweets: PathBuf,
    /// Optional `short<TAB>expanded` URL map.
    pub url_expansion: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub kind: FeatureKind,
    /// Ignored for `retweet`, where each user's vector is their own node
    /// vector.
    pub assembly: AssemblyMode,
    pub split_seed: u64,
    pub louvain_seed: u64,
    pub louvain_resolution: f64,
    pub max_items_per_user: Option<usize>,
    /// Force single-threaded training and keep timings out of the
    /// evaluation reports so repeated runs are byte-identical.
    pub deterministic: bool,
    /// Write the t-SNE projection during `run_pipeline`.
    pub project: bool,
    pub node2vec: Node2vecParams,
    pub mlp: MlpParams,
    pub tsne: TsneParams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            tweets: PathBuf::from("tweets.jsonl"),
            url_expansion: None,
            output_dir: PathBuf::from("out"),
            kind: FeatureKind::Domain,
            assembly: AssemblyMode::default(),
            split_seed: 1,
            louvain_seed: 1,
            louvain_resolution: 1.0,
            max_items_per_user: None,
            deterministic: false,
            project: true,
            node2vec: Node2vecParams::default(),
            mlp: MlpParams::default(),
            tsne: TsneParams::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let as_config = |e: Error| match e {
            Error::InvalidParameter(m) => Error::Config(m),
            e => e,
        };
        self.node2vec.validate().map_err(as_config)?;
        self.mlp.validate().map_err(as_config)?;
        if !(self.louvain_resolution > 0.0) {
            return Err(Error::Config("louvain_resolution must be positive".into()));
        }
        if !(self.tsne.perplexity > 0.0 && self.tsne.learning_rate > 0.0) {
            return Err(Error::Config("tsne perplexity and learning_rate must be positive".into()));
        }
        if self.max_items_per_user == Some(0) {
            return Err(Error::Config("max_items_per_user must be at least 1".into()));
        }
        Ok(())
    }

    /// Check that the raw inputs exist.
    pub fn validate_inputs(&self) -> Result<()> {
        if !self.tweets.is_file() {
            return Err(Error::Config(format!("tweets file {} does not exist", self.tweets.display())));
        }
        if let Some(p) = &self.url_expansion {
            if !p.is_file() {
                return Err(Error::Config(format!("URL expansion file {} does not exist", p.display())));
            }
        }
        Ok(())
    }

    /// Node2vec settings actually used.
    pub fn effective_node2vec(&self) -> Node2vecParams {
        let mut p = self.node2vec.clone();
        if self.deterministic {
            p.mode = TrainingMode::Deterministic;
        }
        p
    }

    pub fn effective_assembly(&self) -> AssemblyMode {
        match self.kind {
            FeatureKind::Retweet => AssemblyMode::Mean,
            _ => self.assembly,
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.output_dir.join(name)
    }
}

/// Pipeline steps. `FeatureGraph` builds the network named by the
/// configured kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    RetweetGraph,
    Louvain,
    FeatureGraph,
    Embed,
    Train,
    Eval,
    Project,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::RetweetGraph => "retweet_graph",
            Stage::Louvain => "louvain",
            Stage::FeatureGraph => "feature_graph",
            Stage::Embed => "embed",
            Stage::Train => "train",
            Stage::Eval => "eval",
            Stage::Project => "project",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub seconds: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub config_hash: String,
    pub config_file: String,
    pub kind: FeatureKind,
    pub seeds: BTreeMap<String, u64>,
    pub deterministic: bool,
    pub threads: usize,
    /// `running`, `complete` or `failed`.
    pub state: String,
    pub stages: Vec<StageRecord>,
    pub total_seconds: Option<f64>,
    pub error: Option<String>,
    pub notes: Vec<String>,
}

impl Manifest {
    fn new(cfg: &PipelineConfig) -> Self {
        let seeds = BTreeMap::from([
            ("split".to_string(), cfg.split_seed),
            ("louvain".to_string(), cfg.louvain_seed),
            ("node2vec".to_string(), cfg.node2vec.seed),
            ("mlp".to_string(), cfg.mlp.seed),
            ("tsne".to_string(), cfg.tsne.seed),
        ]);
        Manifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: cfg.hash(),
            config_file: CONFIG.to_string(),
            kind: cfg.kind,
            seeds,
            deterministic: cfg.deterministic,
            threads: if cfg.deterministic { 1 } else { rayon::current_num_threads() },
            state: "running".into(),
            stages: Vec::new(),
            total_seconds: None,
            error: None,
            notes: Vec::new(),
        }
    }

    /// The manifest in `cfg.output_dir`, or a fresh one if there is none or
    /// it belongs to a different configuration.
    pub fn load_or_new(cfg: &PipelineConfig) -> Self {
        let fresh = Manifest::new(cfg);
        fs::read_to_string(cfg.path(MANIFEST))
            .ok()
            .and_then(|s| serde_json::from_str::<Manifest>(&s).ok())
            .filter(|m| m.config_hash == fresh.config_hash)
            .unwrap_or(fresh)
    }

    pub fn save(&self, cfg: &PipelineConfig) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        fs::write(cfg.path(MANIFEST), text)?;
        Ok(())
    }

    fn record(&mut self, stage: Stage, seconds: f64, ok: bool) {
        self.stages.retain(|r| r.stage != stage.name());
        self.stages.push(StageRecord {
            stage: stage.name().to_string(),
            seconds,
            ok,
        });
    }

    pub fn timings(&self) -> BTreeMap<String, f64> {
        self.stages.iter().filter(|r| r.ok).map(|r| (r.stage.clone(), r.seconds)).collect()
    }
}

fn open(path: &Path, producer: &'static str) -> Result<BufReader<File>> {
    match File::open(path) {
        Ok(f) => Ok(BufReader::new(f)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(Error::MissingArtifact {
            path: path.to_path_buf(),
            producer,
        }),
        Err(e) => Err(e.into()),
    }
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    f(&mut out)?;
    out.flush()?;
    Ok(())
}

fn load_records(cfg: &PipelineConfig) -> Result<Vec<crate::ingest::TweetRecord>> {
    Ok(parse_tweets(open(&cfg.path(TWEETS), "ingest")?)?.records)
}

fn load_graph(cfg: &PipelineConfig, kind: FeatureKind) -> Result<Graph> {
    let graph = Graph::read_edge_list(open(&cfg.path(&kind.edges_file()), kind.producer())?)?;
    let users = UserItemMap::read_tsv(open(&cfg.path(&kind.users_file()), kind.producer())?, &graph)?;
    graph.with_user_items(users)
}

fn load_labels(cfg: &PipelineConfig) -> Result<BinaryLabels> {
    BinaryLabels::read_tsv(open(&cfg.path(LABELS), "louvain")?)
}

fn load_dataset(cfg: &PipelineConfig) -> Result<LabeledDataset> {
    LabeledDataset::read_tsv(open(&cfg.path(DATASET), "train")?)
}

fn save_graph(cfg: &PipelineConfig, kind: FeatureKind, graph: &Graph, users: &UserItemMap) -> Result<()> {
    write_file(&cfg.path(&kind.edges_file()), |o| graph.write_edge_list(o))?;
    write_file(&cfg.path(&kind.users_file()), |o| users.write_tsv(graph, o))
}

/// What a stage produced, for reporting.
#[derive(Debug, Clone)]
pub enum StageOutput {
    Ingested { records: usize, skipped: usize },
    Graph { kind: FeatureKind, nodes: usize, edges: usize },
    Labels { communities: usize, modularity: f64, labelled: usize, dropped: usize },
    Embedded { nodes: usize, dim: usize },
    Trained { users: usize, excluded: usize, unlabelled: usize, best_epoch: usize },
    Evaluated { val: Box<EvalReport>, test: Box<EvalReport> },
    Projected { points: usize, kl_initial: f64, kl_final: f64 },
}

fn ingest(cfg: &PipelineConfig) -> Result<StageOutput> {
    cfg.validate_inputs()?;
    let mut parsed = parse_tweets(BufReader::new(File::open(&cfg.tweets)?))?;
    for r in &mut parsed.records {
        r.text = preprocess_text(&r.text);
    }
    let expansion = match &cfg.url_expansion {
        Some(p) => UrlExpansionMap::read_tsv(BufReader::new(File::open(p)?))?,
        None => UrlExpansionMap::new(),
    };
    write_file(&cfg.path(TWEETS), |o| write_tweets(&parsed.records, o))?;
    write_file(&cfg.path(EXPANSION), |o| expansion.write_tsv(o))?;
    Ok(StageOutput::Ingested {
        records: parsed.records.len(),
        skipped: parsed.skipped,
    })
}

fn build_graph(cfg: &PipelineConfig, kind: FeatureKind) -> Result<StageOutput> {
    let records = load_records(cfg)?;
    let opts = BuildOptions {
        max_items_per_user: cfg.max_items_per_user,
    };
    let graph = match kind {
        FeatureKind::Retweet => {
            let g = build_retweet_network(&records)?;
            let users = g.self_item_map();
            g.with_user_items(users)?
        }
        FeatureKind::Domain => {
            let expansion = UrlExpansionMap::read_tsv(open(&cfg.path(EXPANSION), "ingest")?)?;
            build_domain_cooccurrence(&records, &expansion, opts)?
        }
        FeatureKind::Hashtag => build_hashtag_cooccurrence(&records, opts)?,
    };
    let users = graph.user_items().cloned().unwrap_or_default();
    save_graph(cfg, kind, &graph, &users)?;
    Ok(StageOutput::Graph {
        kind,
        nodes: graph.node_count(),
        edges: graph.edge_count(),
    })
}

fn louvain(cfg: &PipelineConfig) -> Result<StageOutput> {
    let kind = FeatureKind::Retweet;
    let graph = Graph::read_edge_list(open(&cfg.path(&kind.edges_file()), kind.producer())?)?;
    let partition = louvain_cluster(&graph, cfg.louvain_seed, cfg.louvain_resolution)?;
    let labels = to_binary_labels(&partition, &graph, default_class_names())?;
    write_file(&cfg.path(PARTITION), |o| partition.write_tsv(&graph, o))?;
    write_file(&cfg.path(LABELS), |o| labels.write_tsv(o))?;
    Ok(StageOutput::Labels {
        communities: partition.num_communities(),
        modularity: partition.modularity(),
        labelled: labels.len(),
        dropped: labels.dropped,
    })
}

fn embed_stage(cfg: &PipelineConfig) -> Result<StageOutput> {
    let graph = load_graph(cfg, cfg.kind)?;
    let emb = embed(&graph, &cfg.effective_node2vec())?;
    write_file(&cfg.path(EMBEDDINGS), |o| emb.write_word2vec(o))?;
    Ok(StageOutput::Embedded {
        nodes: emb.len(),
        dim: emb.dim(),
    })
}

fn train(cfg: &PipelineConfig) -> Result<StageOutput> {
    let graph = load_graph(cfg, cfg.kind)?;
    let emb = EmbeddingMatrix::read_word2vec(open(&cfg.path(EMBEDDINGS), "embed")?)?;
    if emb.vocab() != graph.vocab() {
        return Err(Error::Consistency(format!(
            "{} does not match the {} network; rerun `embed`",
            EMBEDDINGS, cfg.kind
        )));
    }
    let labels = load_labels(cfg)?;
    let users = graph.user_items().expect("loaded with user items");
    let assembled = assemble_user_vectors(&emb, users, cfg.effective_assembly())?;
    let (vectors, ys, unlabelled) = attach_labels(assembled.vectors, &labels);
    let dataset = split_dataset(vectors, ys, cfg.split_seed)?;
    write_file(&cfg.path(DATASET), |o| dataset.write_tsv(o))?;
    let trained = train_classifier(&dataset, &cfg.mlp)?;
    write_file(&cfg.path(MODEL), |o| trained.model.write_checkpoint(o))?;
    write_file(&cfg.path(LEARNING_CURVE), |o| {
        writeln!(o, "epoch,train_loss,val_loss")?;
        for e in &trained.curve {
            writeln!(o, "{},{},{}", e.epoch, e.train_loss, e.val_loss)?;
        }
        Ok(())
    })?;
    Ok(StageOutput::Trained {
        users: dataset.len(),
        excluded: assembled.excluded,
        unlabelled,
        best_epoch: trained.best_epoch,
    })
}

fn eval_stage(cfg: &PipelineConfig, manifest: &Manifest) -> Result<StageOutput> {
    let model = MlpModel::read_checkpoint(open(&cfg.path(MODEL), "train")?)?;
    let dataset = load_dataset(cfg)?;
    if model.input_dim() != dataset.input_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.input_dim(),
            got: dataset.input_dim(),
        });
    }
    let mut val = evaluate(&model, &dataset, Split::Val)?;
    let mut test = evaluate(&model, &dataset, Split::Test)?;
    if !cfg.deterministic {
        val.timings_seconds = manifest.timings();
        test.timings_seconds = manifest.timings();
    }
    fs::write(cfg.path(EVAL_VAL), val.to_json())?;
    fs::write(cfg.path(EVAL_TEST), test.to_json())?;
    Ok(StageOutput::Evaluated {
        val: Box::new(val),
        test: Box::new(test),
    })
}

fn project(cfg: &PipelineConfig) -> Result<StageOutput> {
    let dataset = load_dataset(cfg)?;
    let result = tsne_project(&dataset.vectors, &dataset.labels, &cfg.tsne)?;
    write_file(&cfg.path(PROJECTION), |o| result.projection.write_tsv(o))?;
    Ok(StageOutput::Projected {
        points: dataset.len(),
        kl_initial: result.kl_initial,
        kl_final: result.kl_final,
    })
}

/// Run one stage against `cfg.output_dir`, recording its timing and
/// outcome in the manifest. Errors carry the stage name.
pub fn run_stage(cfg: &PipelineConfig, stage: Stage) -> Result<StageOutput> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.output_dir)?;
    let mut manifest = Manifest::load_or_new(cfg);
    let start = Instant::now();
    let result = match stage {
        Stage::Ingest => ingest(cfg),
        Stage::RetweetGraph => build_graph(cfg, FeatureKind::Retweet),
        Stage::Louvain => louvain(cfg),
        Stage::FeatureGraph => build_graph(cfg, cfg.kind),
        Stage::Embed => embed_stage(cfg),
        Stage::Train => train(cfg),
        Stage::Eval => eval_stage(cfg, &manifest),
        Stage::Project => project(cfg),
    };
    let seconds = start.elapsed().as_secs_f64();
    manifest.record(stage, seconds, result.is_ok());
    match &result {
        Ok(_) => log::info!("stage {} finished in {seconds:.2}s", stage.name()),
        Err(e) => {
            manifest.state = "failed".into();
            manifest.error = Some(format!("{}: {e}", stage.name()));
        }
    }
    manifest.save(cfg)?;
    result.map_err(|e| e.in_stage(stage.name()))
}

#[derive(Debug, Clone)]
pub struct PipelineSummary {
    pub kind: FeatureKind,
    pub val: EvalReport,
    pub test: EvalReport,
    pub users: usize,
    pub timings: BTreeMap<String, f64>,
    pub total_seconds: f64,
    pub projected: bool,
}

impl PipelineSummary {
    /// One row in the layout of a results table: kind, validation and test
    /// accuracy, validation and test macro-F1.
    pub fn table_row(&self) -> String {
        format!(
            "{:<8} val_acc={:.4} test_acc={:.4} val_macro_f1={:.4} test_macro_f1={:.4}",
            self.kind.as_str(),
            self.val.accuracy,
            self.test.accuracy,
            self.val.macro_f1,
            self.test.macro_f1
        )
    }
}

/// Run every stage in order. The resolved configuration is saved as
/// `config.toml` next to the artifacts.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineSummary> {
    cfg.validate()?;
    cfg.validate_inputs()?;
    let start = Instant::now();
    fs::create_dir_all(&cfg.output_dir)?;
    fs::write(cfg.path(CONFIG), cfg.to_toml())?;
    let fresh = Manifest::new(cfg);
    fresh.save(cfg)?;

    let mut stages = vec![Stage::Ingest, Stage::RetweetGraph, Stage::Louvain];
    if cfg.kind != FeatureKind::Retweet {
        stages.push(Stage::FeatureGraph);
    }
    stages.extend([Stage::Embed, Stage::Train, Stage::Eval]);

    let mut reports = None;
    let mut users = 0;
    for stage in stages {
        match run_stage(cfg, stage)? {
            StageOutput::Evaluated { val, test } => reports = Some((*val, *test)),
            StageOutput::Trained { users: n, .. } => users = n,
            _ => {}
        }
    }

    let mut projected = false;
    let mut note = None;
    if cfg.project {
        if (users as f64) < 3.0 * cfg.tsne.perplexity {
            let msg = format!(
                "projection skipped: {users} users is fewer than 3 x perplexity {}",
                cfg.tsne.perplexity
            );
            log::warn!("{msg}");
            note = Some(msg);
        } else {
            run_stage(cfg, Stage::Project)?;
            projected = true;
        }
    }

    let mut manifest = Manifest::load_or_new(cfg);
    let total_seconds = start.elapsed().as_secs_f64();
    manifest.state = "complete".into();
    manifest.total_seconds = Some(total_seconds);
    manifest.notes.extend(note);
    manifest.save(cfg)?;
    let (val, test) = reports.expect("eval stage ran");
    Ok(PipelineSummary {
        kind: cfg.kind,
        val,
        test,
        users,
        timings: manifest.timings(),
        total_seconds,
        projected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_through_toml() {
        let mut cfg = PipelineConfig::default();
        cfg.kind = FeatureKind::Hashtag;
        cfg.assembly = AssemblyMode::Mean;
        cfg.url_expansion = Some("map.tsv".into());
        cfg.node2vec.dim = 16;
        let back = PipelineConfig::from_toml_str(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.hash(), cfg.hash());
        assert_eq!(cfg.hash().len(), 64);
    }

    #[test]
    fn partial_toml_uses_defaults() {
        let cfg = PipelineConfig::from_toml_str(
            "tweets = \"t.jsonl\"\nkind = \"retweet\"\nassembly = \"concat_topk:3\"\n[node2vec]\ndim = 8\n",
        )
        .unwrap();
        assert_eq!(cfg.kind, FeatureKind::Retweet);
        assert_eq!(cfg.assembly, AssemblyMode::ConcatTopK(3));
        assert_eq!(cfg.effective_assembly(), AssemblyMode::Mean);
        assert_eq!(cfg.node2vec.dim, 8);
        assert_eq!(cfg.node2vec.walk_length, 80);
        assert_eq!(cfg.mlp, MlpParams::default());
    }

    #[test]
    fn config_errors_map_to_exit_code_two() {
        for bad in ["kind = \"words\"", "unknown_key = 1", "[mlp]\ndropout_rate = 1.5", "[node2vec]\np = 0.0"] {
            let err = PipelineConfig::from_toml_str(bad).and_then(|c| c.validate()).unwrap_err();
            assert_eq!(err.exit_code(), 2, "{bad}: {err}");
        }
        let cfg = PipelineConfig {
            tweets: "/nonexistent/tweets.jsonl".into(),
            ..Default::default()
        };
        assert_eq!(cfg.validate_inputs().unwrap_err().exit_code(), 2);
    }

    #[test]
    fn missing_artifact_names_producer() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PipelineConfig {
            output_dir: dir.path().to_path_buf(),
            ..Default::default()
        };
        let err = run_stage(&cfg, Stage::Embed).unwrap_err();
        match err.root() {
            Error::MissingArtifact { producer, .. } => assert_eq!(*producer, "graph --kind domain"),
            e => panic!("{e}"),
        }
        assert!(err.to_string().contains("graph --kind domain"));
        let manifest: Manifest = serde_json::from_str(&fs::read_to_string(dir.path().join(MANIFEST)).unwrap()).unwrap();
        assert_eq!(manifest.state, "failed");
    }

    #[test]
    fn feature_kind_strings() {
        for k in [FeatureKind::Domain, FeatureKind::Hashtag, FeatureKind::Retweet] {
            assert_eq!(k.as_str().parse::<FeatureKind>().unwrap(), k);
        }
        assert!("likes".parse::<FeatureKind>().is_err());
    }
}
