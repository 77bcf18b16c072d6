use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::Context;
use log::{info, warn};

use coughgate::classifiers::{train, ClassifierSpec, Family};
use coughgate::corpus::{load_corpus, synth_corpus, write_manifest, write_wav, CorpusKind, LoadOptions, ManifestEntry, WavEncoding};
use coughgate::eval::{loocv, write_table3_csv, EvalReport};
use coughgate::mfcc::{extract_features, FeatureSet, MfccConfig, Segments};
use coughgate::search::{reproduce_study, write_bundle, FeatureStore, StudyOptions, SweepAxis};
use coughgate::{ClipSetF64, Error, Label};

use crate::args::{ClassifierArgs, EvaluateArgs, ExtractArgs, GridArgs, InputArgs, MfccArgs, ReproduceArgs, SfsArgs, SynthArgs};

pub const CACHE_ENV: &str = "COUGHGATE_CACHE_DIR";

fn cache_dir(out: &Path) -> PathBuf {
    std::env::var_os(CACHE_ENV).map_or_else(|| out.join("cache"), PathBuf::from)
}

fn mfcc_config(a: &MfccArgs) -> Result<MfccConfig, Error> {
    let config = MfccConfig {
        frame_length: a.frame_length,
        n_mfcc: a.n_mfcc,
        n_segments: a.segments.parse::<Segments>()?,
        n_mel_filters: a.n_filters,
        include_c0: !a.no_c0,
        ..MfccConfig::default()
    };
    config.validate()?;
    Ok(config)
}

fn log_counts(what: &str, covid: usize, non_covid: usize) {
    info!("{what}: {} covid, {} non_covid", covid, non_covid);
}

fn load_clips(input: &InputArgs) -> anyhow::Result<ClipSetF64> {
    let clips = if let Some(manifest) = &input.source.manifest {
        load_corpus::<f64>(manifest, LoadOptions { peak_normalize: input.peak_normalize, ..LoadOptions::default() })?
    } else {
        if input.per_class == 0 {
            return Err(Error::Config("--per-class must be at least 1".into()).into());
        }
        let clips = synth_corpus::<f64>(input.seed, input.per_class);
        if input.peak_normalize { clips.peak_normalized() } else { clips }
    };
    log_counts("clips", clips.count(Label::Covid), clips.count(Label::NonCovid));
    Ok(clips)
}

/// Opens the requested input as a feature store and returns the MFCC
/// configuration to evaluate at (the file's own settings for a feature file).
fn open_store(input: &InputArgs, config: MfccConfig, out: &Path) -> anyhow::Result<(FeatureStore<f64>, MfccConfig)> {
    if let Some(path) = &input.source.features {
        let file = fs::File::open(path).map_err(|e| Error::Validation(format!("cannot open {}: {e}", path.display())))?;
        let features = FeatureSet::<f64>::read_json(std::io::BufReader::new(file))?;
        log_counts("features", features.count(Label::Covid), features.count(Label::NonCovid));
        let config = features.config().copied().unwrap_or(config);
        return Ok((FeatureStore::from_features(features), config));
    }
    let clips = load_clips(input)?;
    Ok((FeatureStore::from_clips(clips).with_disk_cache(cache_dir(out)), config))
}

fn hyperparameter(a: &ClassifierArgs, family: Family) -> f64 {
    let value = match family {
        Family::PolySvm => a.order.map(f64::from),
        Family::RbfSvm => a.sigma,
        Family::LinearLda => a.gamma,
        Family::QuadraticLda => a.qda_gamma.or(a.gamma),
        Family::KnnEuclidean | Family::KnnChebyshev => a.k.map(|k| k as f64),
        Family::Plsr => a.components.map(|c| c as f64),
    };
    value.unwrap_or_else(|| family.tuned_hyperparameter())
}

fn spec_for(a: &ClassifierArgs, family: Family) -> Result<ClassifierSpec, Error> {
    let spec = ClassifierSpec {
        svm_cost: a.cost,
        standardize: a.standardize,
        ..ClassifierSpec::tuned(family)
    };
    spec.with_hyperparameter(hyperparameter(a, family))
}

/// Families selected by `--classifier` / `--all-classifiers`, or `default` when neither is given.
fn families(a: &ClassifierArgs, default: Option<&[Family]>) -> Result<Vec<Family>, Error> {
    if a.all_classifiers {
        return Ok(Family::ALL.to_vec());
    }
    match (&a.classifier, default) {
        (Some(name), _) => Ok(vec![name.parse()?]),
        (None, Some(d)) => Ok(d.to_vec()),
        (None, None) => Err(Error::Config("pass --classifier NAME or --all-classifiers".into())),
    }
}

fn specs(a: &ClassifierArgs, default: Option<&[Family]>) -> Result<Vec<ClassifierSpec>, Error> {
    families(a, default)?.into_iter().map(|f| spec_for(a, f)).collect()
}

fn create(path: &Path) -> anyhow::Result<BufWriter<fs::File>> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let file = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn finish(mut w: BufWriter<fs::File>) -> anyhow::Result<()> {
    use std::io::Write;
    w.flush()?;
    Ok(())
}

pub fn extract(a: ExtractArgs) -> anyhow::Result<()> {
    let config = mfcc_config(&a.mfcc)?;
    if a.input.source.features.is_some() {
        return Err(Error::Config("extract needs --manifest or --synthetic".into()).into());
    }
    let clips = load_clips(&a.input)?;
    let (features, warnings) = extract_features(&clips, &config)?;
    for w in &warnings {
        warn!("{w}");
    }
    let json = a.out.join("features.json");
    let mut w = create(&json)?;
    features.write_json(&mut w)?;
    finish(w)?;
    let csv = a.out.join("features.csv");
    let mut w = create(&csv)?;
    features.write_csv(&mut w)?;
    finish(w)?;
    info!("{} rows x {} features -> {}", features.len(), features.dim(), json.display());
    Ok(())
}

pub fn evaluate(a: EvaluateArgs) -> anyhow::Result<()> {
    let specs = specs(&a.classifier, None)?;
    let config = mfcc_config(&a.mfcc)?;
    let (store, config) = open_store(&a.input, config, &a.out)?;
    let data = store.features(&config)?;
    let mut reports: Vec<EvalReport> = Vec::with_capacity(specs.len());
    for spec in &specs {
        let report = loocv(data.as_ref(), spec)?;
        for w in &report.warnings {
            warn!("{}: {w}", spec.family);
        }
        info!(
            "{spec}: acc {:.4} sen_nc {:.4} sen_c {:.4} F {:.4} auc {:.4}",
            report.accuracy, report.sensitivity_non_covid, report.sensitivity_covid, report.f_measure, report.paper_auc
        );
        reports.push(report);
    }
    for r in &reports {
        let mut w = create(&a.out.join("reports").join(format!("{}.json", r.spec.family.name())))?;
        r.write_json(&mut w)?;
        finish(w)?;
    }
    let mut w = create(&a.out.join("table3.csv"))?;
    write_table3_csv(&mut w, &reports)?;
    finish(w)?;
    if a.save_models {
        let (x, y) = (data.matrix(), data.labels());
        for spec in &specs {
            let model = train(spec, &x, &y)?;
            let mut w = create(&a.out.join("models").join(format!("{}.json", spec.family.name())))?;
            model.save_json(&mut w)?;
            finish(w)?;
        }
    }
    Ok(())
}

pub fn grid(a: GridArgs) -> anyhow::Result<()> {
    let axis: SweepAxis = a.axis.parse()?;
    let specs = if axis.is_feature_axis() {
        specs(&a.classifier, Some(&Family::FRAME_TABLE_ORDER))?
    } else {
        let specs = specs(&a.classifier, Some(axis.families()))?;
        if let Some(s) = specs.iter().find(|s| !axis.families().contains(&s.family)) {
            return Err(Error::Config(format!("axis {axis} does not apply to classifier {}", s.family)).into());
        }
        specs
    };
    let config = mfcc_config(&a.mfcc)?;
    if axis.is_feature_axis() && a.input.source.features.is_some() {
        return Err(Error::Config(format!("sweeping {axis} needs --manifest or --synthetic")).into());
    }
    let (store, config) = open_store(&a.input, config, &a.out)?;
    info!("sweeping {axis} over {} values", axis.grid().len());
    let result = coughgate::search::sweep(axis, &store, &config, &specs)?;
    for b in &result.best {
        info!("{}: best {}={} at {:.4}", b.family, axis, axis.format_value(b.value), b.accuracy);
    }
    let path = a.out.join("sweeps").join(format!("{}.csv", axis.name()));
    let mut w = create(&path)?;
    result.write_csv(&mut w)?;
    finish(w)?;
    Ok(())
}

pub fn sfs(a: SfsArgs) -> anyhow::Result<()> {
    let specs = specs(&a.classifier, None)?;
    let config = mfcc_config(&a.mfcc)?;
    let (store, config) = open_store(&a.input, config, &a.out)?;
    let data = store.features(&config)?;
    for spec in &specs {
        info!("forward selection for {spec}");
        let spec = coughgate::search::fit_spec_to_data(spec, data.len(), data.dim());
        let result = coughgate::search::sfs(data.as_ref(), &spec)?;
        info!(
            "{}: {} features at {:.4} (all features {:.4})",
            spec.family, result.chosen_prefix_size, result.final_accuracy, result.full_set_accuracy
        );
        let mut w = create(&a.out.join("sfs").join(format!("{}.json", spec.family.name())))?;
        serde_json::to_writer_pretty(&mut w, &result)?;
        finish(w)?;
    }
    Ok(())
}

pub fn reproduce(a: ReproduceArgs) -> anyhow::Result<()> {
    let options = StudyOptions {
        mfcc: MfccConfig { n_mel_filters: a.n_filters, include_c0: !a.no_c0, ..MfccConfig::default() },
        svm_cost: a.cost,
        standardize: a.standardize,
    };
    options.mfcc.validate()?;
    if !(a.cost > 0.0 && a.cost.is_finite()) {
        return Err(Error::Config(format!("--cost must be positive, got {}", a.cost)).into());
    }
    if a.input.source.features.is_some() {
        return Err(Error::Config("reproduce re-extracts features; pass --manifest or --synthetic".into()).into());
    }
    let (store, _) = open_store(&a.input, options.mfcc, &a.out)?;
    let bundle = reproduce_study(&store, &options)?;
    fs::create_dir_all(&a.out).with_context(|| format!("creating {}", a.out.display()))?;
    let manifest = write_bundle(&bundle, &a.out)?;
    let w = manifest.winners;
    info!(
        "selected frame length {}, {} coefficients, {} segments; {} files in {}",
        w.frame_length,
        w.n_mfcc,
        w.n_segments,
        manifest.files.len() + 1,
        a.out.display()
    );
    Ok(())
}

pub fn synth(a: SynthArgs) -> anyhow::Result<()> {
    if a.per_class == 0 {
        return Err(Error::Config("--per-class must be at least 1".into()).into());
    }
    let clips = synth_corpus::<f64>(a.seed, a.per_class);
    let wav_dir = a.out.join("wav");
    fs::create_dir_all(&wav_dir).with_context(|| format!("creating {}", wav_dir.display()))?;
    let mut entries = Vec::with_capacity(clips.len());
    for row in clips.rows() {
        let rel = format!("wav/{}.wav", row.clip.source_id());
        write_wav(&a.out.join(&rel), &row.clip, WavEncoding::Float32)?;
        entries.push(ManifestEntry {
            path: rel,
            label: row.label,
            dataset: CorpusKind::Synthetic,
            excluded: false,
            note: format!("seed={}", a.seed),
        });
    }
    let path = a.out.join("manifest.csv");
    let mut w = create(&path)?;
    write_manifest(&mut w, &entries)?;
    finish(w)?;
    info!("{} clips -> {}", entries.len(), path.display());
    Ok(())
}
