use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::json;

use roman::bench::{
    compare_ensembles, read_predictions, read_records, run_grid, summarize_against_scales, write_ensemble_csv,
    write_jsonl_rows, write_predictions, write_records, write_summary_csv, BenchDataset, GridConfig, GridOptions,
    RecordFormat,
};
use roman::io::{load_dataset, preprocess, save_tensor, write_ts, TensorHeader, TENSOR_FORMAT_VERSION};
use roman::probes::{FlattenProbeConfig, PooledConvProbeConfig, ProbeConfig, MODEL_FORMAT_VERSION};
use roman::synth::{generate, Family, SynthTaskSpec};
use roman::{route_batch, Error, Result, RomanConfig};

use crate::{BenchArgs, EnsembleArgs, Format, ProbeKind, SummarizeArgs, SynthArgs, TransformArgs};

/// `--out` file, or stdout when absent.
fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn record_format(f: Format) -> RecordFormat {
    match f {
        Format::Csv => RecordFormat::Csv,
        Format::Jsonl => RecordFormat::Jsonl,
    }
}

fn probe_name(kind: ProbeKind) -> &'static str {
    match kind {
        ProbeKind::Pooled => "pooled",
        ProbeKind::Flatten => "flatten",
    }
}

pub fn transform(a: TransformArgs) -> Result<()> {
    let config = match (a.depth.scales, a.depth.min_base) {
        (Some(s), _) => RomanConfig::with_depth(s, a.alpha)?,
        (None, Some(m)) => RomanConfig::with_min_base(m, a.alpha)?,
        (None, None) => unreachable!("clap requires one depth option"),
    };
    let ds = preprocess(load_dataset(&a.input)?);
    let (batch, plan) = route_batch(ds.view(), &config)?;
    fs::create_dir_all(&a.out)?;
    let view = batch.view();
    let mut files = Vec::with_capacity(view.n_instances());
    for i in 0..view.n_instances() {
        let name = format!("instance_{i:06}.f64");
        let header = TensorHeader::new(vec![view.channels(), view.series_len()]).with_routing(config, plan.clone());
        save_tensor(a.out.join(&name), header, view.instance(i))?;
        files.push(name);
    }
    let manifest = json!({
        "dataset": ds.id,
        "input": a.input,
        "n_instances": view.n_instances(),
        "dims": [view.channels(), view.series_len()],
        "labels": ds.labels(),
        "class_names": ds.class_names(),
        "provenance": ds.provenance,
        "config": config,
        "plan": plan,
        "files": files,
        "crate_version": roman::VERSION,
    });
    fs::write(a.out.join("manifest.json"), serde_json::to_vec_pretty(&manifest)?)?;
    log::info!("wrote {} routed tensors of {}x{}", view.n_instances(), view.channels(), view.series_len());
    Ok(())
}

pub fn synth(a: SynthArgs) -> Result<()> {
    let family: Family = a.family.parse()?;
    let spec = SynthTaskSpec::new(family, a.seed).with_sizes(a.n_train, a.n_test);
    let task = generate(&spec)?;
    fs::create_dir_all(&a.out)?;
    write_ts(&task.train.dataset, a.out.join(format!("{family}_TRAIN.ts")))?;
    write_ts(&task.test.dataset, a.out.join(format!("{family}_TEST.ts")))?;
    let meta = json!({
        "spec": task.spec,
        "task": task.task,
        "train": task.train.meta,
        "test": task.test.meta,
        "crate_version": roman::VERSION,
    });
    fs::write(a.out.join("metadata.json"), serde_json::to_vec_pretty(&meta)?)?;
    Ok(())
}

/// `0-3,7` -> `[0, 1, 2, 3, 7]`.
fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = || Error::InvalidConfig(format!("cannot read seed list {text:?}"));
    let mut seeds = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((lo, hi)) => {
                let (lo, hi): (u64, u64) = (lo.parse().map_err(|_| bad())?, hi.parse().map_err(|_| bad())?);
                if hi < lo {
                    return Err(bad());
                }
                seeds.extend(lo..=hi);
            }
            None => seeds.push(part.parse().map_err(|_| bad())?),
        }
    }
    if seeds.is_empty() {
        return Err(bad());
    }
    Ok(seeds)
}

/// Loads `P_TRAIN` / `P_TEST` (`.ts`, then `.tsv`) for a prefix `P`, or
/// `D/<name>_TRAIN...` when `P` is a directory named `<name>`.
fn load_split_pair(prefix: &Path) -> Result<BenchDataset> {
    let base: PathBuf = if prefix.is_dir() {
        let name = prefix.file_name().map(|n| n.to_owned()).unwrap_or_default();
        prefix.join(name)
    } else {
        prefix.to_path_buf()
    };
    let find = |split: &str| -> Result<PathBuf> {
        for ext in ["ts", "tsv"] {
            let mut p = base.clone().into_os_string();
            p.push(format!("_{split}.{ext}"));
            let p = PathBuf::from(p);
            if p.is_file() {
                return Ok(p);
            }
        }
        Err(Error::Io(io::Error::new(
            io::ErrorKind::NotFound,
            format!("no {}_{split}.ts or .tsv", base.display()),
        )))
    };
    let id = base.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    BenchDataset::new(id, load_dataset(find("TRAIN")?)?, load_dataset(find("TEST")?)?)
}

pub fn bench(a: BenchArgs) -> Result<()> {
    let mut datasets = Vec::new();
    for p in &a.datasets {
        datasets.push(load_split_pair(p)?);
    }
    for f in &a.synth {
        let family: Family = f.parse()?;
        let task = generate(&SynthTaskSpec::new(family, a.seed))?;
        datasets.push(BenchDataset::new(family.name(), task.train.dataset, task.test.dataset)?);
    }
    if datasets.is_empty() {
        return Err(Error::InvalidConfig("no datasets given (use --dataset or --synth)".into()));
    }
    let probe = match a.probe {
        ProbeKind::Pooled => ProbeConfig::Pooled(PooledConvProbeConfig {
            n_kernels: a.kernels,
            ..Default::default()
        }),
        ProbeKind::Flatten => ProbeConfig::Flatten(FlattenProbeConfig {
            n_filters: a.filters,
            ..Default::default()
        }),
    };
    let configs: Vec<GridConfig> = a.scales.iter().map(|&s| GridConfig::new(s, a.alpha, probe.clone())).collect();
    let seeds = parse_seeds(&a.seeds)?;
    let out = run_grid(&datasets, &configs, &seeds, GridOptions { pin_single_thread: !a.untimed })?;
    let failed = out.records.iter().filter(|r| !r.is_ok()).count();
    if failed > 0 {
        eprintln!("roman: {failed} of {} cells failed; see the error column", out.records.len());
    }
    let mut w = output(a.out.as_deref())?;
    write_records(&mut w, &out.records, record_format(a.format))?;
    w.flush()?;
    if let Some(p) = &a.predictions {
        let mut w = BufWriter::new(File::create(p)?);
        write_predictions(&mut w, &out.predictions)?;
        w.flush()?;
    }
    Ok(())
}

pub fn summarize(a: SummarizeArgs) -> Result<()> {
    let format = match a.records.extension().and_then(|e| e.to_str()) {
        Some("jsonl") => RecordFormat::Jsonl,
        _ => RecordFormat::Csv,
    };
    let records = read_records(BufReader::new(File::open(&a.records)?), format)?;
    let rows = summarize_against_scales(&records, a.baseline_scales, a.baseline_alpha)?;
    let mut w = output(a.out.as_deref())?;
    match a.format {
        Format::Csv => write_summary_csv(&mut w, &rows)?,
        Format::Jsonl => write_jsonl_rows(&mut w, &rows)?,
    }
    w.flush()?;
    Ok(())
}

pub fn ensemble(a: EnsembleArgs) -> Result<()> {
    let predictions = read_predictions(BufReader::new(File::open(&a.predictions)?))?;
    let outcome = compare_ensembles(&predictions, probe_name(a.probe), a.alpha)?;
    let mut w = output(a.out.as_deref())?;
    match a.format {
        Format::Csv => write_ensemble_csv(&mut w, &outcome.comparisons)?,
        Format::Jsonl => write_jsonl_rows(&mut w, &outcome.comparisons)?,
    }
    w.flush()?;
    eprintln!(
        "mixed-scale vs baseline-only: {} wins, {} ties, {} losses",
        outcome.wins, outcome.ties, outcome.losses
    );
    Ok(())
}

pub fn version() -> Result<()> {
    let info = json!({
        "name": "roman",
        "version": roman::VERSION,
        "tensor_format": TENSOR_FORMAT_VERSION,
        "model_format": MODEL_FORMAT_VERSION,
    });
    println!("{info}");
    Ok(())
}
