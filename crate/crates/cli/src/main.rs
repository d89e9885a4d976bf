use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rice_marlin::bench::{bench_speed, rows_to_csv, run_study, synthetic_corpus, StudyConfig};
use rice_marlin::dictionary::THRESHOLD_GRID;
use rice_marlin::{build_dictionary_set, load_dictset, save_dictset, Codec, Family, SetConfig, DEFAULT_BLOCK_SIZE};

const EXIT_OTHER: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CORRUPT: u8 = 3;

#[derive(Parser)]
#[command(name = "rmarlin", version, about = "Rice-Marlin block codec and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a dictionary set from a grid of synthetic sources.
    BuildDictset(BuildArgs),
    /// Compress a file (or a binary PGM with --image) into a container.
    Compress(CompressArgs),
    /// Restore the original file from a container.
    Decompress(DecompressArgs),
    /// Efficiency study on synthetic sources, written as CSV.
    BenchSynthetic(SyntheticArgs),
    /// Compression ratio and throughput on a corpus.
    BenchSpeed(SpeedArgs),
}

#[derive(Args)]
struct BuildArgs {
    /// TOML file with k, o, block_size and grid entries; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(short = 'k', long)]
    k: Option<u8>,
    #[arg(short = 'o', long)]
    o: Option<u8>,
    #[arg(long)]
    block_size: Option<usize>,
    #[arg(long, default_value = "dictset.rmd")]
    out: PathBuf,
}

#[derive(Args)]
struct CompressArgs {
    input: PathBuf,
    output: PathBuf,
    #[arg(long)]
    set: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE)]
    block_size: usize,
    /// Treat the input as an 8-bit binary PGM and code residual tiles.
    #[arg(long)]
    image: bool,
    /// Use a single thread.
    #[arg(long)]
    serial: bool,
}

#[derive(Args)]
struct DecompressArgs {
    input: PathBuf,
    output: PathBuf,
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    serial: bool,
}

#[derive(Args)]
struct SyntheticArgs {
    /// TOML study description; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    families: Option<Vec<Family>>,
    #[arg(long, value_delimiter = ',')]
    fractions: Option<Vec<f64>>,
    /// Dictionary sizes as K (2^K words per chapter).
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<u8>>,
    #[arg(short = 'o', long)]
    overlap: Option<u8>,
    /// Fixed shifts, one row each.
    #[arg(long, value_delimiter = ',', conflicts_with = "search")]
    shifts: Option<Vec<u8>>,
    /// Search shift and exclusion threshold instead of fixing the shift.
    #[arg(long)]
    search: bool,
    #[arg(long)]
    sample_len: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct SpeedArgs {
    /// Dictionary set; the default set is built when omitted.
    #[arg(long)]
    set: Option<PathBuf>,
    /// Corpus file; a synthetic corpus is drawn when omitted.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Synthetic source as family:fraction.
    #[arg(long, default_value = "laplacian:0.5")]
    synthetic: String,
    #[arg(long, default_value_t = 64)]
    size_mib: usize,
    #[arg(long, default_value_t = 5)]
    runs: usize,
    #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE)]
    block_size: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, data: &[u8]) -> Result<()> {
    fs::write(path, data).with_context(|| format!("writing {}", path.display()))
}

fn load_codec(path: &Path) -> Result<Codec> {
    let set = load_dictset(&read(path)?).with_context(|| format!("loading {}", path.display()))?;
    Ok(Codec::new(set))
}

fn build(args: BuildArgs) -> Result<()> {
    let mut config = match &args.config {
        Some(p) => toml::from_str(&fs::read_to_string(p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => SetConfig::default(),
    };
    config.k = args.k.unwrap_or(config.k);
    config.o = args.o.unwrap_or(config.o);
    config.block_size = args.block_size.unwrap_or(config.block_size);
    config.params()?;
    let t = Instant::now();
    let set = build_dictionary_set(&config)?;
    write(&args.out, &save_dictset(&set))?;
    println!("index,source,shift,threshold,quotients,abr,eta");
    for (i, d) in set.dictionaries().iter().enumerate() {
        let entropy = source_entropy(d.source_id());
        println!(
            "{i},{},{},{:e},{},{:.4},{:.4}",
            d.source_id(),
            d.shift(),
            d.threshold(),
            d.alphabet().len(),
            d.abr_estimate(),
            entropy / d.abr_estimate()
        );
    }
    eprintln!(
        "built {} dictionaries (K={}, O={}) in {:.1?} -> {}",
        set.len(),
        config.k,
        config.o,
        t.elapsed(),
        args.out.display()
    );
    Ok(())
}

/// Entropy of the training source named by a dictionary's source id.
fn source_entropy(id: &str) -> f64 {
    let Some((family, fraction)) = id.split_once('@') else {
        return f64::NAN;
    };
    match (family.parse::<Family>(), fraction.parse::<f64>()) {
        (Ok(f), Ok(x)) => rice_marlin::make_distribution(rice_marlin::SyntheticFamily::new(f, x))
            .map(|d| d.entropy())
            .unwrap_or(f64::NAN),
        _ => f64::NAN,
    }
}

fn compress(args: CompressArgs) -> Result<()> {
    let codec = load_codec(&args.set)?;
    let data = read(&args.input)?;
    let t = Instant::now();
    let out = if args.image {
        codec.compress_image(&data, !args.serial)?
    } else {
        codec.compress(&data, args.block_size, !args.serial)?
    };
    write(&args.output, &out)?;
    eprintln!(
        "{} -> {} bytes (ratio {:.4}) in {:.2?}",
        data.len(),
        out.len(),
        data.len() as f64 / out.len().max(1) as f64,
        t.elapsed()
    );
    Ok(())
}

fn decompress(args: DecompressArgs) -> Result<()> {
    let codec = load_codec(&args.set)?;
    let data = read(&args.input)?;
    let out = codec.decompress(&data, !args.serial)?;
    write(&args.output, &out)
}

fn bench_synthetic(args: SyntheticArgs) -> Result<()> {
    let mut cfg: StudyConfig = match &args.config {
        Some(p) => toml::from_str(&fs::read_to_string(p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => StudyConfig::default(),
    };
    if let Some(v) = args.families {
        cfg.families = v;
    }
    if let Some(v) = args.fractions {
        cfg.fractions = v;
    }
    if let Some(v) = args.sizes {
        cfg.sizes = v;
    }
    if let Some(v) = args.overlap {
        cfg.overlap = v;
    }
    if args.search {
        cfg.shifts = None;
        cfg.thresholds = THRESHOLD_GRID.to_vec();
    } else if let Some(v) = args.shifts {
        cfg.shifts = Some(v);
    }
    if let Some(v) = args.sample_len {
        cfg.sample_len = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    let csv = rows_to_csv(&run_study(&cfg)?);
    match &args.csv {
        Some(p) => write(p, csv.as_bytes()),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn bench_speed_cmd(args: SpeedArgs) -> Result<()> {
    let codec = match &args.set {
        Some(p) => load_codec(p)?,
        None => Codec::new(build_dictionary_set(&SetConfig::default())?),
    };
    let corpus = match &args.corpus {
        Some(p) => read(p)?,
        None => {
            let Some((family, fraction)) = args.synthetic.split_once(':') else {
                bail!("--synthetic expects family:fraction");
            };
            let family: Family = family.parse()?;
            synthetic_corpus(family, fraction.parse()?, args.size_mib << 20, args.seed)?
        }
    };
    let r = bench_speed(&codec, &corpus, args.block_size, args.runs, true)?;
    println!("bytes,compressed,ratio,runs,threads,encode_mibs_1t,decode_mibs_1t,encode_mibs_mt,decode_mibs_mt");
    println!(
        "{},{},{:.4},{},{},{:.2},{:.2},{:.2},{:.2}",
        r.bytes,
        r.compressed,
        r.ratio,
        r.runs,
        r.threads,
        r.encode_single_mibs,
        r.decode_single_mibs,
        r.encode_multi_mibs,
        r.decode_multi_mibs
    );
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<rice_marlin::Error>() {
        Some(e) if e.is_corrupt_input() => EXIT_CORRUPT,
        Some(rice_marlin::Error::InvalidParameters(_)) => EXIT_USAGE,
        _ => EXIT_OTHER,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::BuildDictset(a) => build(a),
        Command::Compress(a) => compress(a),
        Command::Decompress(a) => decompress(a),
        Command::BenchSynthetic(a) => bench_synthetic(a),
        Command::BenchSpeed(a) => bench_speed_cmd(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
