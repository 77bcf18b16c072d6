use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, Output};

fn coughgate(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coughgate"))
        .args(args)
        .env("COUGHGATE_CACHE_DIR", cache)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in std::fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                files.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    files
}

#[test]
fn synthetic_extract_has_one_row_per_clip() {
    let t = tempfile::tempdir().unwrap();
    let out = t.path().join("e");
    ok(&coughgate(
        &["extract", "--synthetic", "--seed", "7", "--per-class", "10", "--out", s(&out)],
        &t.path().join("cache"),
    ));
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("features.json")).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 20);
    let csv = std::fs::read_to_string(out.join("features.csv")).unwrap();
    assert_eq!(csv.lines().count(), 21);
}

#[test]
fn manifest_round_trip_and_missing_wav() {
    let t = tempfile::tempdir().unwrap();
    let cache = t.path().join("cache");
    let corpus = t.path().join("corpus");
    ok(&coughgate(&["synth", "--per-class", "3", "--out", s(&corpus)], &cache));
    let manifest = corpus.join("manifest.csv");
    let out = t.path().join("e");
    ok(&coughgate(&["extract", "--manifest", s(&manifest), "--out", s(&out)], &cache));
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("features.json")).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 6);

    let missing = corpus.join("wav").join("synth-covid-001.wav");
    std::fs::remove_file(&missing).unwrap();
    let res = coughgate(&["extract", "--manifest", s(&manifest), "--out", s(&out)], &cache);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("synth-covid-001.wav"));
}

#[test]
fn unknown_classifier_lists_valid_names() {
    let t = tempfile::tempdir().unwrap();
    let res = coughgate(
        &["evaluate", "--synthetic", "--per-class", "3", "--classifier", "svm", "--out", s(t.path())],
        &t.path().join("cache"),
    );
    assert_eq!(res.status.code(), Some(2));
    let err = String::from_utf8_lossy(&res.stderr);
    for name in ["poly-svm", "rbf-svm", "linear-lda", "quadratic-lda", "knn-euclidean", "knn-chebyshev", "plsr"] {
        assert!(err.contains(name), "{err}");
    }
}

#[test]
fn mismatched_axis_is_rejected() {
    let t = tempfile::tempdir().unwrap();
    let res = coughgate(
        &["grid", "--synthetic", "--axis", "sigma", "--classifier", "plsr", "--out", s(t.path())],
        &t.path().join("cache"),
    );
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn evaluate_all_classifiers_is_repeatable() {
    let t = tempfile::tempdir().unwrap();
    let cache = t.path().join("cache");
    let feats = t.path().join("f");
    ok(&coughgate(&["extract", "--synthetic", "--per-class", "6", "--out", s(&feats)], &cache));
    let features = feats.join("features.json");
    let run = |dir: &Path| {
        ok(&coughgate(&["evaluate", "--features", s(&features), "--all-classifiers", "--out", s(dir)], &cache));
        snapshot(dir)
    };
    let a = run(&t.path().join("a"));
    let b = run(&t.path().join("b"));
    assert_eq!(a, b);
    assert_eq!(a.keys().filter(|k| k.starts_with("reports")).count(), 7);
    let table = String::from_utf8(a["table3.csv"].clone()).unwrap();
    assert_eq!(table.lines().count(), 8);
    assert!(table.starts_with("classifier,hyperparameter,acc,sen_non_covid,sen_covid,f_measure,auc"));

    let single = t.path().join("one");
    ok(&coughgate(
        &["evaluate", "--features", s(&features), "--classifier", "knn-euclidean", "--k", "1", "--save-models", "--out", s(&single)],
        &cache,
    ));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(single.join("reports/knn-euclidean.json")).unwrap()).unwrap();
    for key in ["accuracy", "sensitivity_non_covid", "sensitivity_covid", "f_measure", "paper_auc", "roc_auc"] {
        assert!(report[key].is_number(), "{key}");
    }
    assert!(single.join("models/knn-euclidean.json").exists());
}

#[test]
fn frame_length_grid_has_four_rows() {
    let t = tempfile::tempdir().unwrap();
    let out = t.path().join("g");
    ok(&coughgate(&["grid", "--synthetic", "--per-class", "4", "--axis", "frame-length", "--out", s(&out)], &t.path().join("cache")));
    let csv = std::fs::read_to_string(out.join("sweeps/frame_length.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(t.path().join("cache").read_dir().unwrap().count() >= 4);
    assert!(!out.join("cache").exists());
}

#[test]
fn sfs_writes_one_result() {
    let t = tempfile::tempdir().unwrap();
    let out = t.path().join("s");
    ok(&coughgate(
        &["sfs", "--synthetic", "--per-class", "5", "--n-mfcc", "6", "--classifier", "rbf-svm", "--sigma", "1.3", "--out", s(&out)],
        &t.path().join("cache"),
    ));
    let doc: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("sfs/rbf-svm.json")).unwrap()).unwrap();
    assert_eq!(doc["selection_order"].as_array().unwrap().len(), 6);
    assert_eq!(doc["classifier"]["hyperparameter"], 1.3);
}

#[test]
fn reproduce_is_identical_across_thread_counts() {
    let t = tempfile::tempdir().unwrap();
    let run = |dir: &Path, threads: &str| {
        ok(&coughgate(
            &["--threads", threads, "reproduce", "--synthetic", "--per-class", "4", "--out", s(dir)],
            &t.path().join(format!("cache-{threads}")),
        ));
        snapshot(dir)
    };
    let a = run(&t.path().join("a"), "1");
    let b = run(&t.path().join("b"), "3");
    assert_eq!(a, b);
    assert!(a.contains_key("bundle.json"));
    assert_eq!(a.keys().filter(|k| k.starts_with("sweeps")).count(), 9);
    assert_eq!(a.keys().filter(|k| k.starts_with("sfs")).count(), 7);
}
