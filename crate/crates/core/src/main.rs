//! Command-line surface for the MS-RCGR pipeline: dataset generation,
//! encode/decode round-trips, feature export, training, evaluation, and
//! plot-data export.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use mscgr::alphabet::{Alphabet, BaseAlphabet, CornerTable, DEFAULT_ALPHABET_LIMIT};
use mscgr::cgr::{
    check_precision_bound, decode, encode_scale, kmer_stream, TrajectoryJson,
};
use mscgr::classify::{
    evaluate, fuse, train_pipeline, trimer_features, EmbeddingTable, FeatureBlock, Metrics,
    ModelFile, TrainOptions, Vocabulary,
};
use mscgr::dataset::{
    generate_dataset, read_fasta, stratified_split, write_fasta, DatasetManifest, SequenceRecord,
};
use mscgr::error::{Error, Result};
use mscgr::features::{cgr_feature_names, cgr_feature_vector, CgrFeaturizer};
use mscgr::io::{read_feature_csv, write_feature_csv};
use mscgr::FORMAT_VERSION;

#[derive(Parser)]
#[command(name = "mscgr", version, about = "Multi-scale reversible chaos game representation pipeline")]
struct Cli {
    /// Key=value config file; command-line flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the 7-class synthetic benchmark and its stratified split
    Gen(GenArgs),
    /// Encode and decode every record at every scale; report pass/fail
    Roundtrip(RoundtripArgs),
    /// Export a feature CSV for the chosen feature set
    Featurize(FeaturizeArgs),
    /// Fit z-scoring and logistic regression on a feature CSV
    Train(TrainArgs),
    /// Evaluate a trained model on a feature CSV
    Eval(EvalArgs),
    /// Export per-scale trajectory data for plotting
    Plotdata(PlotdataArgs),
    /// Generate random embeddings (a signal-free stand-in for pLM output)
    RandEmbed(RandEmbedArgs),
    /// Chain gen -> featurize -> train -> eval in one invocation
    Repro(ReproArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "per-class")]
    per_class: Option<usize>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RoundtripArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Comma-separated scale list, e.g. 1,2,3,4
    #[arg(long)]
    scales: Option<String>,
    #[arg(long = "override-large-alphabet", default_value_t = false)]
    override_large_alphabet: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FeaturizeArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    /// Feature set: kmer, cgr, embed, embed+cgr, kmer+cgr
    #[arg(long)]
    set: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Vocabulary JSON; reused when it exists, written when it does not
    #[arg(long)]
    vocab: Option<PathBuf>,
    #[arg(long = "override-large-alphabet", default_value_t = false)]
    override_large_alphabet: bool,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotdataArgs {
    #[arg(long)]
    sequence: Option<String>,
    /// dna or protein
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    scales: Option<String>,
    #[arg(long = "override-large-alphabet", default_value_t = false)]
    override_large_alphabet: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RandEmbedArgs {
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproArgs {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "per-class")]
    per_class: Option<usize>,
    #[arg(long)]
    set: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Key=value config file contents, consulted when a flag is absent.
struct Config(BTreeMap<String, String>);

impl Config {
    fn load(path: Option<&Path>) -> Result<Self> {
        let mut map = BTreeMap::new();
        if let Some(path) = path {
            for (lineno, line) in fs::read_to_string(path)?.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected key=value, got {line:?}"),
                })?;
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(Config(map))
    }

    fn resolve<T: FromStr>(
        &self,
        key: &str,
        flag: Option<T>,
        default: T,
    ) -> Result<T> {
        Ok(self.resolve_opt(key, flag)?.unwrap_or(default))
    }

    fn resolve_opt<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.0.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::InvalidArgument(format!("config key {key}: bad value {raw:?}"))),
            None => Ok(None),
        }
    }
}

fn parse_scales(spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad scale {s:?}")))
        })
        .collect()
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)?)?;
    Ok(())
}

fn echo(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn sorted_records(path: &Path) -> Result<Vec<SequenceRecord>> {
    let mut records = read_fasta(path)?;
    records.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(records)
}

fn cmd_gen(cfg: &Config, args: GenArgs) -> Result<()> {
    let seed = cfg.resolve("seed", args.seed, 42)?;
    let per_class = cfg.resolve("per_class", args.per_class, 1000)?;
    let ratio = cfg.resolve("ratio", args.ratio, 0.8)?;
    let out = cfg.resolve("out", args.out, PathBuf::from("."))?;
    fs::create_dir_all(&out)?;
    let records = generate_dataset(seed, per_class);
    let split = stratified_split(records, ratio, seed)?;
    write_fasta(&split.train, &out.join("train.fasta"))?;
    write_fasta(&split.test, &out.join("test.fasta"))?;
    let mut counts = BTreeMap::new();
    for r in split.train.iter().chain(&split.test) {
        *counts.entry(r.label.to_string()).or_insert(0usize) += 1;
    }
    let manifest = DatasetManifest {
        format_version: FORMAT_VERSION.to_string(),
        seed,
        per_class,
        counts,
        config: echo(&[
            ("seed", seed.to_string()),
            ("per_class", per_class.to_string()),
            ("ratio", ratio.to_string()),
        ]),
    };
    write_json(&manifest, &out.join("manifest.json"))?;
    println!(
        "wrote {} train and {} test records to {}",
        split.train.len(),
        split.test.len(),
        out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct ScaleRoundtripReport {
    kind: String,
    scale: usize,
    passed: usize,
    failed: usize,
    max_denominator_bits: u64,
    bound_satisfied: bool,
    failures: Vec<String>,
}

#[derive(Serialize)]
struct RoundtripReport {
    format_version: String,
    config: BTreeMap<String, String>,
    scales: Vec<ScaleRoundtripReport>,
    all_passed: bool,
}

fn cmd_roundtrip(cfg: &Config, args: RoundtripArgs) -> Result<()> {
    let input = cfg
        .resolve_opt("input", args.input)?
        .ok_or_else(|| Error::InvalidArgument("roundtrip requires --input".into()))?;
    let scales = parse_scales(&cfg.resolve("scales", args.scales, "1,2,3,4".to_string())?)?;
    let limit = if args.override_large_alphabet {
        usize::MAX
    } else {
        DEFAULT_ALPHABET_LIMIT
    };
    let records = sorted_records(&input)?;
    let mut report = RoundtripReport {
        format_version: FORMAT_VERSION.to_string(),
        config: echo(&[
            ("input", input.display().to_string()),
            ("scales", scales.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")),
            ("override_large_alphabet", args.override_large_alphabet.to_string()),
        ]),
        scales: Vec::new(),
        all_passed: true,
    };
    for kind in [BaseAlphabet::Dna, BaseAlphabet::Protein] {
        let subset: Vec<&SequenceRecord> = records.iter().filter(|r| r.kind() == kind).collect();
        if subset.is_empty() {
            continue;
        }
        for &k in &scales {
            let table = CornerTable::build(Alphabet::with_limit(kind, k, limit)?)?;
            let mut entry = ScaleRoundtripReport {
                kind: kind.as_str().to_string(),
                scale: k,
                passed: 0,
                failed: 0,
                max_denominator_bits: 0,
                bound_satisfied: true,
                failures: Vec::new(),
            };
            for record in &subset {
                match encode_scale(&record.residues, &table).and_then(|t| {
                    let audit = check_precision_bound(&t, table.q());
                    entry.max_denominator_bits =
                        entry.max_denominator_bits.max(audit.max_denominator.bits());
                    entry.bound_satisfied &= audit.satisfied;
                    decode(&t, &table)
                }) {
                    Ok(back) if back == record.residues => entry.passed += 1,
                    Ok(_) => {
                        entry.failed += 1;
                        entry.failures.push(format!("{} scale {k}: decoded mismatch", record.id));
                    }
                    Err(e) => {
                        entry.failed += 1;
                        entry.failures.push(format!("{} scale {k}: {e}", record.id));
                    }
                }
            }
            println!(
                "{} scale {k}: {}/{} pass, max denominator {} bits, bound {}",
                kind.as_str(),
                entry.passed,
                entry.passed + entry.failed,
                entry.max_denominator_bits,
                if entry.bound_satisfied { "ok" } else { "VIOLATED" }
            );
            report.all_passed &= entry.failed == 0 && entry.bound_satisfied;
            report.scales.push(entry);
        }
    }
    if let Some(out) = cfg.resolve_opt("out", args.out)? {
        write_json(&report, &out)?;
    }
    if !report.all_passed {
        for entry in &report.scales {
            for f in &entry.failures {
                eprintln!("failure: {f}");
            }
        }
        std::process::exit(1);
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq)]
enum FeatureSet {
    Kmer,
    Cgr,
    Embed,
    EmbedCgr,
    KmerCgr,
}

impl FeatureSet {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "kmer" => Ok(FeatureSet::Kmer),
            "cgr" => Ok(FeatureSet::Cgr),
            "embed" => Ok(FeatureSet::Embed),
            "embed+cgr" => Ok(FeatureSet::EmbedCgr),
            "kmer+cgr" => Ok(FeatureSet::KmerCgr),
            other => Err(Error::InvalidArgument(format!(
                "unknown feature set {other:?} (expected kmer, cgr, embed, embed+cgr, kmer+cgr)"
            ))),
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            FeatureSet::Kmer => "kmer",
            FeatureSet::Cgr => "cgr",
            FeatureSet::Embed => "embed",
            FeatureSet::EmbedCgr => "embed+cgr",
            FeatureSet::KmerCgr => "kmer+cgr",
        }
    }

    fn needs_kmer(self) -> bool {
        matches!(self, FeatureSet::Kmer | FeatureSet::KmerCgr)
    }

    fn needs_cgr(self) -> bool {
        matches!(self, FeatureSet::Cgr | FeatureSet::EmbedCgr | FeatureSet::KmerCgr)
    }

    fn needs_embed(self) -> bool {
        matches!(self, FeatureSet::Embed | FeatureSet::EmbedCgr)
    }
}

fn kmer_block(records: &[SequenceRecord], vocab_path: &Path) -> Result<FeatureBlock> {
    let sequences: Vec<(String, String)> = records
        .iter()
        .map(|r| (r.id.clone(), r.residues.clone()))
        .collect();
    let existing = if vocab_path.exists() {
        let mut v: Vocabulary = serde_json::from_str(&fs::read_to_string(vocab_path)?)?;
        v.rebuild_index();
        Some(v)
    } else {
        None
    };
    let (matrix, vocab) = trimer_features(&sequences, existing.as_ref());
    if existing.is_none() {
        fs::write(vocab_path, serde_json::to_string(&vocab)?)?;
    }
    Ok(FeatureBlock {
        ids: records.iter().map(|r| r.id.clone()).collect(),
        labels: records.iter().map(|r| r.label.to_string()).collect(),
        columns: vocab.tokens().iter().map(|t| format!("t_{t}")).collect(),
        matrix,
    })
}

fn cgr_block(records: &[SequenceRecord], allow_large: bool) -> Result<FeatureBlock> {
    let mut featurizer = CgrFeaturizer::<f64>::new(allow_large);
    let mut matrix = ndarray::Array2::zeros((records.len(), 24));
    for (row, record) in records.iter().enumerate() {
        let v = featurizer.features(&record.residues, record.kind())?;
        for (col, value) in v.0.iter().enumerate() {
            matrix[[row, col]] = *value;
        }
    }
    Ok(FeatureBlock {
        ids: records.iter().map(|r| r.id.clone()).collect(),
        labels: records.iter().map(|r| r.label.to_string()).collect(),
        columns: cgr_feature_names(),
        matrix,
    })
}

fn embed_block(records: &[SequenceRecord], path: &Path) -> Result<FeatureBlock> {
    let table = EmbeddingTable::read_csv(path)?;
    let ids: Vec<String> = records.iter().map(|r| r.id.clone()).collect();
    let matrix = table.matrix_for(&ids)?;
    Ok(FeatureBlock {
        ids,
        labels: records.iter().map(|r| r.label.to_string()).collect(),
        columns: (1..=table.dim).map(|i| format!("e{i}")).collect(),
        matrix,
    })
}

fn build_feature_block(
    records: &[SequenceRecord],
    set: FeatureSet,
    vocab_path: &Path,
    embeddings: Option<&Path>,
    allow_large: bool,
) -> Result<FeatureBlock> {
    let mut blocks = Vec::new();
    if set.needs_embed() {
        let path = embeddings.ok_or_else(|| {
            Error::InvalidArgument(format!("feature set {} requires --embeddings", set.as_str()))
        })?;
        blocks.push(embed_block(records, path)?);
    }
    if set.needs_kmer() {
        blocks.push(kmer_block(records, vocab_path)?);
    }
    if set.needs_cgr() {
        blocks.push(cgr_block(records, allow_large)?);
    }
    fuse(&blocks)
}

fn cmd_featurize(cfg: &Config, args: FeaturizeArgs) -> Result<()> {
    let input = cfg
        .resolve_opt("input", args.input)?
        .ok_or_else(|| Error::InvalidArgument("featurize requires --input".into()))?;
    let set = FeatureSet::parse(&cfg.resolve("set", args.set, "cgr".to_string())?)?;
    let out = cfg
        .resolve_opt("out", args.out)?
        .ok_or_else(|| Error::InvalidArgument("featurize requires --out".into()))?;
    let embeddings = cfg.resolve_opt("embeddings", args.embeddings)?;
    let vocab_path = cfg
        .resolve_opt("vocab", args.vocab)?
        .unwrap_or_else(|| out.with_extension("vocab.json"));
    let records = sorted_records(&input)?;
    let block = build_feature_block(
        &records,
        set,
        &vocab_path,
        embeddings.as_deref(),
        args.override_large_alphabet,
    )?;
    let config = echo(&[
        ("input", input.display().to_string()),
        ("set", set.as_str().to_string()),
        ("override_large_alphabet", args.override_large_alphabet.to_string()),
    ]);
    write_feature_csv(&block, &config, &out)?;
    println!(
        "wrote {} rows x {} feature columns to {}",
        block.ids.len(),
        block.matrix.ncols(),
        out.display()
    );
    Ok(())
}

fn cmd_train(cfg: &Config, args: TrainArgs) -> Result<()> {
    let features = cfg
        .resolve_opt("features", args.features)?
        .ok_or_else(|| Error::InvalidArgument("train requires --features".into()))?;
    let lambda = cfg.resolve("lambda", args.lambda, 1.0)?;
    let max_iter = cfg.resolve("max_iter", args.max_iter, 500)?;
    let out = cfg.resolve("out", args.out, PathBuf::from("model.json"))?;
    let block = read_feature_csv(&features)?;
    let options = TrainOptions {
        lambda,
        max_iter,
        ..Default::default()
    };
    let model = train_pipeline(&block, &options)?;
    let config = echo(&[
        ("features", features.display().to_string()),
        ("lambda", lambda.to_string()),
        ("max_iter", max_iter.to_string()),
    ]);
    write_json(&ModelFile::from_model(&model, config), &out)?;
    println!(
        "trained on {} rows x {} features: loss {:.6} after {} iterations",
        block.ids.len(),
        block.matrix.ncols(),
        model.final_loss,
        model.iterations
    );
    Ok(())
}

#[derive(Serialize)]
struct MetricsFile {
    format_version: String,
    config: BTreeMap<String, String>,
    #[serde(flatten)]
    metrics: Metrics,
}

fn cmd_eval(cfg: &Config, args: EvalArgs) -> Result<()> {
    let features = cfg
        .resolve_opt("features", args.features)?
        .ok_or_else(|| Error::InvalidArgument("eval requires --features".into()))?;
    let model_path = cfg.resolve("model", args.model, PathBuf::from("model.json"))?;
    let out = cfg.resolve("out", args.out, PathBuf::from("metrics.json"))?;
    let block = read_feature_csv(&features)?;
    let file: ModelFile = serde_json::from_str(&fs::read_to_string(&model_path)?)?;
    let model = file.into_model()?;
    let metrics = evaluate(&model, &block.matrix, &block.labels)?;
    println!(
        "accuracy {:.4} precision {:.4} recall {:.4} f1 {:.4}",
        metrics.accuracy,
        metrics.weighted_precision,
        metrics.weighted_recall,
        metrics.weighted_f1
    );
    let config = echo(&[
        ("features", features.display().to_string()),
        ("model", model_path.display().to_string()),
    ]);
    write_json(
        &MetricsFile {
            format_version: FORMAT_VERSION.to_string(),
            config,
            metrics,
        },
        &out,
    )?;
    Ok(())
}

#[derive(Serialize)]
struct PlotScale {
    #[serde(flatten)]
    exact: TrajectoryJson,
    points_float: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct PlotData {
    format_version: String,
    config: BTreeMap<String, String>,
    sequence: String,
    kind: String,
    scales: Vec<PlotScale>,
    feature_vector: Option<Vec<f64>>,
}

fn cmd_plotdata(cfg: &Config, args: PlotdataArgs) -> Result<()> {
    let sequence = cfg
        .resolve_opt("sequence", args.sequence)?
        .ok_or_else(|| Error::InvalidArgument("plotdata requires --sequence".into()))?
        .to_ascii_uppercase();
    let kind = BaseAlphabet::parse(&cfg.resolve("kind", args.kind, "dna".to_string())?)?;
    let scales = parse_scales(&cfg.resolve("scales", args.scales, "1,2,3,4".to_string())?)?;
    let out = cfg.resolve("out", args.out, PathBuf::from("plotdata.json"))?;
    let limit = if args.override_large_alphabet {
        usize::MAX
    } else {
        DEFAULT_ALPHABET_LIMIT
    };
    let mut plot_scales = Vec::new();
    for &k in &scales {
        let table = CornerTable::build(Alphabet::with_limit(kind, k, limit)?)?;
        let trajectory = encode_scale(&sequence, &table)?;
        let points_float = trajectory.points().iter().map(|p| {
            let (x, y) = p.to_f64();
            [x, y]
        });
        plot_scales.push(PlotScale {
            points_float: points_float.collect(),
            exact: TrajectoryJson::new(&trajectory, kmer_stream(&sequence, k)?),
        });
    }
    let feature_vector = if sequence.len() >= 4 {
        cgr_feature_vector(&sequence, kind, args.override_large_alphabet)
            .ok()
            .map(|v| v.0.to_vec())
    } else {
        None
    };
    let data = PlotData {
        format_version: FORMAT_VERSION.to_string(),
        config: echo(&[
            ("sequence", sequence.clone()),
            ("kind", kind.as_str().to_string()),
            ("scales", scales.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")),
        ]),
        sequence,
        kind: kind.as_str().to_string(),
        scales: plot_scales,
        feature_vector,
    };
    write_json(&data, &out)?;
    println!("wrote plot data for {} scales to {}", scales.len(), out.display());
    Ok(())
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn write_random_embeddings(
    records: &[SequenceRecord],
    dim: usize,
    seed: u64,
    out: &Path,
) -> Result<()> {
    use std::io::Write as _;
    let mut w = std::io::BufWriter::new(fs::File::create(out)?);
    writeln!(
        w,
        "# {} config: dim={dim} seed={seed} producer=rand-embed",
        FORMAT_VERSION
    )?;
    let header: Vec<String> = (1..=dim).map(|i| format!("e{i}")).collect();
    writeln!(w, "id,{}", header.join(","))?;
    for record in records {
        let tag = record
            .id
            .bytes()
            .fold(0u64, |acc, b| acc.wrapping_mul(131).wrapping_add(b as u64));
        let mut rng = ChaCha12Rng::seed_from_u64(splitmix64(seed ^ tag));
        write!(w, "{}", record.id)?;
        for _ in 0..dim {
            write!(w, ",{:.11e}", rng.random_range(-1.0..1.0))?;
        }
        writeln!(w)?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_rand_embed(cfg: &Config, args: RandEmbedArgs) -> Result<()> {
    let input = cfg
        .resolve_opt("input", args.input)?
        .ok_or_else(|| Error::InvalidArgument("rand-embed requires --input".into()))?;
    let dim = cfg.resolve("dim", args.dim, 16)?;
    let seed = cfg.resolve("seed", args.seed, 42)?;
    let out = cfg.resolve("out", args.out, PathBuf::from("embeddings.csv"))?;
    let records = sorted_records(&input)?;
    write_random_embeddings(&records, dim, seed, &out)?;
    println!("wrote {}-dim embeddings for {} records to {}", dim, records.len(), out.display());
    Ok(())
}

fn cmd_repro(cfg: &Config, args: ReproArgs) -> Result<()> {
    let seed = cfg.resolve("seed", args.seed, 42)?;
    let per_class = cfg.resolve("per_class", args.per_class, 1000)?;
    let set = FeatureSet::parse(&cfg.resolve("set", args.set, "kmer".to_string())?)?;
    let lambda = cfg.resolve("lambda", args.lambda, 1.0)?;
    let max_iter = cfg.resolve("max_iter", args.max_iter, 500)?;
    let out = cfg.resolve("out", args.out, PathBuf::from("repro"))?;
    fs::create_dir_all(&out)?;

    cmd_gen(
        cfg,
        GenArgs {
            seed: Some(seed),
            per_class: Some(per_class),
            ratio: Some(0.8),
            out: Some(out.clone()),
        },
    )?;
    let train_records = sorted_records(&out.join("train.fasta"))?;
    let test_records = sorted_records(&out.join("test.fasta"))?;

    let embeddings_path = out.join("embeddings.csv");
    if set.needs_embed() {
        let mut all: Vec<SequenceRecord> = train_records.iter().chain(&test_records).cloned().collect();
        all.sort_by(|a, b| a.id.cmp(&b.id));
        write_random_embeddings(&all, 16, seed, &embeddings_path)?;
    }
    let vocab_path = out.join("vocab.json");
    // protein sequences need scale-4 corners, which exceed the default cap
    let allow_large = set.needs_cgr();
    let train_block = build_feature_block(
        &train_records,
        set,
        &vocab_path,
        Some(&embeddings_path),
        allow_large,
    )?;
    let test_block = build_feature_block(
        &test_records,
        set,
        &vocab_path,
        Some(&embeddings_path),
        allow_large,
    )?;
    let config = echo(&[
        ("seed", seed.to_string()),
        ("per_class", per_class.to_string()),
        ("set", set.as_str().to_string()),
        ("lambda", lambda.to_string()),
        ("max_iter", max_iter.to_string()),
    ]);
    write_feature_csv(&train_block, &config, &out.join("train_features.csv"))?;
    write_feature_csv(&test_block, &config, &out.join("test_features.csv"))?;

    let model = train_pipeline(
        &train_block,
        &TrainOptions {
            lambda,
            max_iter,
            ..Default::default()
        },
    )?;
    write_json(&ModelFile::from_model(&model, config.clone()), &out.join("model.json"))?;
    let metrics = evaluate(&model, &test_block.matrix, &test_block.labels)?;
    println!(
        "{}: accuracy {:.4} precision {:.4} recall {:.4} f1 {:.4}",
        set.as_str(),
        metrics.accuracy,
        metrics.weighted_precision,
        metrics.weighted_recall,
        metrics.weighted_f1
    );
    write_json(
        &MetricsFile {
            format_version: FORMAT_VERSION.to_string(),
            config,
            metrics,
        },
        &out.join("metrics.json"),
    )?;
    Ok(())
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    let cfg = Config::load(cli.config.as_deref())?;
    match cli.command {
        Command::Gen(args) => cmd_gen(&cfg, args),
        Command::Roundtrip(args) => cmd_roundtrip(&cfg, args),
        Command::Featurize(args) => cmd_featurize(&cfg, args),
        Command::Train(args) => cmd_train(&cfg, args),
        Command::Eval(args) => cmd_eval(&cfg, args),
        Command::Plotdata(args) => cmd_plotdata(&cfg, args),
        Command::RandEmbed(args) => cmd_rand_embed(&cfg, args),
        Command::Repro(args) => cmd_repro(&cfg, args),
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
