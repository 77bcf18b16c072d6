use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{StageWinners, StudyBundle, StudyOptions, SweepResult};
use crate::classifiers::ClassifierSpec;
use crate::eval::write_table3_csv;
use crate::mfcc::MfccConfig;
use crate::{Error, Result};

pub const BUNDLE_FORMAT_VERSION: u32 = 1;

/// Contents of `bundle.json`: study settings, stage winners and the SHA-256
/// of every other file in the bundle keyed by relative path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleManifest {
    pub format_version: u32,
    pub corpus_hash: String,
    pub options: StudyOptions,
    pub winners: StageWinners,
    pub mfcc: MfccConfig,
    pub tuned: Vec<ClassifierSpec>,
    pub files: BTreeMap<String, String>,
}

struct Files<'a> {
    root: &'a Path,
    hashes: BTreeMap<String, String>,
}

impl Files<'_> {
    fn put(&mut self, rel: &str, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
        self.hashes.insert(rel.to_string(), hex::encode(Sha256::digest(bytes)));
        Ok(())
    }
}

fn sweep_csv(s: &SweepResult) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    s.write_csv(&mut buf)?;
    Ok(buf)
}

fn pretty<S: Serialize>(v: &S) -> Result<Vec<u8>> {
    let mut buf = serde_json::to_vec_pretty(v)?;
    buf.push(b'\n');
    Ok(buf)
}

/// Writes the study to `dir`: `sweeps/<axis>.csv`, `table3.csv`,
/// `table4.csv`, `reports/<classifier>.json`, `sfs/<classifier>.json`,
/// `tables.md` and finally `bundle.json`. Output depends only on the bundle.
pub fn write_bundle(bundle: &StudyBundle, dir: &Path) -> Result<BundleManifest> {
    let mut files = Files { root: dir, hashes: BTreeMap::new() };
    for s in bundle.sweeps() {
        files.put(&format!("sweeps/{}.csv", s.axis.name()), &sweep_csv(s)?)?;
    }
    let mut t3 = Vec::new();
    write_table3_csv(&mut t3, &bundle.reports)?;
    files.put("table3.csv", &t3)?;
    files.put("table4.csv", &table4_csv(bundle)?)?;
    for r in &bundle.reports {
        files.put(&format!("reports/{}.json", r.spec.family.name()), &pretty(r)?)?;
    }
    for s in &bundle.sfs {
        files.put(&format!("sfs/{}.json", s.classifier.family.name()), &pretty(s)?)?;
    }
    files.put("tables.md", render_tables(bundle).as_bytes())?;

    let manifest = BundleManifest {
        format_version: BUNDLE_FORMAT_VERSION,
        corpus_hash: bundle.corpus_hash.clone(),
        options: bundle.options,
        winners: bundle.winners,
        mfcc: bundle.mfcc,
        tuned: bundle.tuned.clone(),
        files: files.hashes.clone(),
    };
    let path = dir.join("bundle.json");
    fs::write(&path, pretty(&manifest)?).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

fn before_sfs(bundle: &StudyBundle, i: usize) -> f64 {
    let family = bundle.sfs[i].classifier.family;
    bundle
        .reports
        .iter()
        .find(|r| r.spec.family == family)
        .map_or(f64::NAN, |r| r.accuracy)
}

fn table4_csv(bundle: &StudyBundle) -> Result<Vec<u8>> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["classifier", "used_features", "acc_after_sfs", "acc_before_sfs"])?;
    for (i, s) in bundle.sfs.iter().enumerate() {
        wtr.write_record([
            s.classifier.family.display_name().to_string(),
            s.chosen_prefix_size.to_string(),
            format!("{:?}", s.final_accuracy),
            format!("{:?}", before_sfs(bundle, i)),
        ])?;
    }
    wtr.into_inner().map_err(|e| Error::io("<table4 csv>", e.into_error()))
}

fn md_row(out: &mut String, cells: &[String]) {
    let _ = writeln!(out, "| {} |", cells.join(" | "));
}

fn md_header(out: &mut String, cells: &[String]) {
    md_row(out, cells);
    md_row(out, &vec!["---".to_string(); cells.len()]);
}

/// Markdown rendering of the frame-length table, the tuned results table and
/// the forward-selection table, to four decimals.
pub fn render_tables(bundle: &StudyBundle) -> String {
    let mut out = String::new();
    let f = &bundle.frame_length;
    let _ = writeln!(out, "## Accuracy by frame length\n");
    let mut header = vec!["Frame length (samples)".to_string()];
    header.extend(f.classifiers.iter().map(|s| format!("{} {}", s.family.display_name(), s.describe())));
    md_header(&mut out, &header);
    for p in &f.points {
        let mut row = vec![f.axis.format_value(p.value)];
        row.extend(p.accuracies.iter().map(|a| format!("{a:.4}")));
        md_row(&mut out, &row);
    }
    let w = bundle.winners;
    let _ = writeln!(
        out,
        "\nSelected: frame length {}, {} coefficients, {} segments.\n",
        w.frame_length, w.n_mfcc, w.n_segments
    );

    let _ = writeln!(out, "## Tuned classifiers\n");
    md_header(
        &mut out,
        &["Classifier", "Hyperparameter", "ACC", "Sen. non-COVID", "Sen. COVID", "F-measure", "AUC"].map(String::from),
    );
    for r in &bundle.reports {
        md_row(
            &mut out,
            &[
                r.spec.family.display_name().to_string(),
                r.spec.describe(),
                format!("{:.4}", r.accuracy),
                format!("{:.4}", r.sensitivity_non_covid),
                format!("{:.4}", r.sensitivity_covid),
                format!("{:.4}", r.f_measure),
                format!("{:.4}", r.paper_auc),
            ],
        );
    }

    let _ = writeln!(out, "\n## Forward selection\n");
    md_header(&mut out, &["Classifier", "Used features", "ACC (after)", "ACC (before)"].map(String::from));
    for (i, s) in bundle.sfs.iter().enumerate() {
        md_row(
            &mut out,
            &[
                s.classifier.family.display_name().to_string(),
                s.chosen_prefix_size.to_string(),
                format!("{:.4}", s.final_accuracy),
                format!("{:.4}", before_sfs(bundle, i)),
            ],
        );
    }
    out
}
