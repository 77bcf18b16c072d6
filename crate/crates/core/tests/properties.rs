use coughgate::classifiers::{pls1_nipals, train, ClassifierSpec, Family, FittedState, TrainedModel};
use coughgate::eval::{loocv, metrics, ConfusionMatrix};
use coughgate::mfcc::{frame_count, segment_average, FeatureSet, MfccConfig, MfccMatrix, Segments};
use coughgate::search::sfs;
use coughgate::Label;
use proptest::prelude::*;

fn labels(n_each: usize) -> Vec<Label> {
    (0..2 * n_each).map(|i| if i % 2 == 0 { Label::Covid } else { Label::NonCovid }).collect()
}

/// Rows drawn from a continuous range so exact distance ties are vanishingly unlikely.
fn matrix(n: usize, m: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-5.0f64..5.0, m), n)
}

fn shifted(x: Vec<Vec<f64>>, y: &[Label], by: f64) -> Vec<Vec<f64>> {
    x.into_iter()
        .zip(y)
        .map(|(r, l)| r.into_iter().map(|v| v + by * l.sign()).collect())
        .collect()
}

fn predict_all(model: &TrainedModel<f64>, x: &[Vec<f64>]) -> Vec<Label> {
    x.iter().map(|r| model.predict(r).unwrap().label).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn confusion_identities(tp_nc in 0usize..60, fn_nc in 0usize..60, tp_c in 0usize..60, fn_c in 0usize..60) {
        prop_assume!(tp_nc + fn_nc > 0 && tp_c + fn_c > 0);
        let cm = ConfusionMatrix::new(tp_nc, fn_nc, tp_c, fn_c);
        let m = metrics(&cm).unwrap();
        let total = cm.total() as f64;
        prop_assert!((m.accuracy - (1.0 - (fn_nc + fn_c) as f64 / total)).abs() < 1e-15);
        prop_assert_eq!(m.paper_auc, (m.sensitivity_covid + m.sensitivity_non_covid) / 2.0);
        for v in [m.accuracy, m.sensitivity_covid, m.sensitivity_non_covid, m.f_measure, m.paper_auc] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn frame_count_formula(len in 0usize..20_000, pow in 6u32..13) {
        let frame = 1usize << pow;
        let expected = if len < frame { 0 } else { (len - frame) / (frame / 2) + 1 };
        prop_assert_eq!(frame_count(len, frame, frame / 2), expected);
    }

    #[test]
    fn segment_average_means_leading_columns(rows in matrix(3, 12), s in 1usize..20) {
        let m = MfccMatrix::from_rows(rows.clone(), MfccConfig::default()).unwrap();
        let (v, short) = segment_average(&m, Segments::Count(s));
        let used = s.min(12);
        prop_assert_eq!(short, s > 12);
        for (row, got) in rows.iter().zip(v) {
            let want = row[..used].iter().sum::<f64>() / used as f64;
            prop_assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn lda_labels_invariant_under_affine_maps(
        x in matrix(20, 3),
        probes in matrix(10, 3),
        a in prop::collection::vec(-2.0f64..2.0, 9),
        b in prop::collection::vec(-3.0f64..3.0, 3),
    ) {
        let det = a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) + a[2] * (a[3] * a[7] - a[4] * a[6]);
        prop_assume!(det.abs() > 0.2);
        let y = labels(10);
        let x = shifted(x, &y, 1.0);
        let map = |r: &Vec<f64>| -> Vec<f64> { (0..3).map(|i| (0..3).map(|j| a[3 * i + j] * r[j]).sum::<f64>() + b[i]).collect() };
        let spec = ClassifierSpec::new(Family::LinearLda, 0.0).unwrap();
        let before = train(&spec, &x, &y).unwrap();
        let tx: Vec<Vec<f64>> = x.iter().map(map).collect();
        let after = train(&spec, &tx, &y).unwrap();
        let scores: Vec<f64> = probes.iter().map(|p| before.predict(p).unwrap().score).collect();
        prop_assume!(scores.iter().all(|s| s.abs() > 1e-6));
        let tp: Vec<Vec<f64>> = probes.iter().map(map).collect();
        prop_assert_eq!(predict_all(&before, &probes), predict_all(&after, &tp));
    }

    #[test]
    fn knn_invariant_under_training_permutation(
        x in matrix(16, 4),
        probes in matrix(6, 4),
        perm_seed in any::<u64>(),
        k in 1usize..6,
    ) {
        let y = labels(8);
        let mut order: Vec<usize> = (0..16).collect();
        let mut s = perm_seed;
        for i in (1..16).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let px: Vec<Vec<f64>> = order.iter().map(|&i| x[i].clone()).collect();
        let py: Vec<Label> = order.iter().map(|&i| y[i]).collect();
        for family in [Family::KnnEuclidean, Family::KnnChebyshev] {
            let spec = ClassifierSpec::new(family, k as f64).unwrap();
            let a = train(&spec, &x, &y).unwrap();
            let b = train(&spec, &px, &py).unwrap();
            for p in &probes {
                prop_assert_eq!(a.predict(p).unwrap(), b.predict(p).unwrap());
            }
        }
    }

    #[test]
    fn loocv_confusion_invariant_under_row_order(x in matrix(14, 3), rotate in 1usize..14) {
        let y = labels(7);
        let x = shifted(x, &y, 0.8);
        let mut rx = x.clone();
        let mut ry = y.clone();
        rx.rotate_left(rotate);
        ry.rotate_left(rotate);
        for spec in [ClassifierSpec::tuned(Family::KnnEuclidean), ClassifierSpec::tuned(Family::LinearLda)] {
            let a = loocv(&FeatureSet::from_matrix(&x, &y).unwrap(), &spec).unwrap();
            let b = loocv(&FeatureSet::from_matrix(&rx, &ry).unwrap(), &spec).unwrap();
            prop_assert_eq!(a.confusion, b.confusion);
            prop_assert_eq!(a.predictions.len(), 14);
        }
    }

    #[test]
    fn svm_solution_satisfies_kkt(x in matrix(12, 2), sigma in 0.3f64..3.0, order in 1u32..4) {
        let y = labels(6);
        let x = shifted(x, &y, 0.5);
        for spec in [ClassifierSpec::new(Family::RbfSvm, sigma).unwrap(), ClassifierSpec::new(Family::PolySvm, f64::from(order)).unwrap()] {
            let model = train(&spec, &x, &y).unwrap();
            let FittedState::Svm(svm) = &model.state else { unreachable!() };
            let balance: f64 = svm.alphas.iter().zip(&y).map(|(a, l)| a * l.sign()).sum();
            prop_assert!(balance.abs() < 1e-6);
            for ((a, r), l) in svm.alphas.iter().zip(&x).zip(&y) {
                let margin = l.sign() * svm.decision(r);
                prop_assert!((0.0..=spec.svm_cost).contains(a));
                if *a == 0.0 {
                    prop_assert!(margin >= 1.0 - 1e-3, "margin {}", margin);
                } else if *a == spec.svm_cost {
                    prop_assert!(margin <= 1.0 + 1e-3, "margin {}", margin);
                } else {
                    prop_assert!((margin - 1.0).abs() <= 1e-3, "margin {}", margin);
                }
            }
        }
    }

    #[test]
    fn pls_scores_are_orthogonal(x in matrix(15, 4), comps in 1usize..5) {
        let y: Vec<f64> = (0..15).map(|i| if i % 2 == 0 { 1.0 } else { 0.0 }).collect();
        let fit = pls1_nipals(&x, &y, comps).unwrap();
        for a in 0..fit.scores.len() {
            for b in 0..a {
                let dot: f64 = fit.scores[a].iter().zip(&fit.scores[b]).map(|(u, v)| u * v).sum();
                let na = fit.scores[a].iter().map(|u| u * u).sum::<f64>().sqrt();
                let nb = fit.scores[b].iter().map(|u| u * u).sum::<f64>().sqrt();
                prop_assert!(dot.abs() <= 1e-8 * na * nb);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn sfs_result_invariants(x in matrix(16, 4)) {
        let y = labels(8);
        let x: Vec<Vec<f64>> = x.into_iter().zip(&y).map(|(mut r, l)| { r[1] += 0.7 * l.sign(); r }).collect();
        let data = FeatureSet::from_matrix(&x, &y).unwrap();
        let r = sfs(&data, &ClassifierSpec::tuned(Family::KnnEuclidean)).unwrap();
        let mut seen = r.selection_order.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, vec![0, 1, 2, 3]);
        let best = r.accuracy_path.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(r.final_accuracy, best);
        prop_assert_eq!(r.accuracy_path[r.chosen_prefix_size - 1], best);
        prop_assert!(r.accuracy_path[..r.chosen_prefix_size - 1].iter().all(|&a| a < best));
        prop_assert!(r.final_accuracy >= r.full_set_accuracy);
        let full = loocv(&data, &ClassifierSpec::tuned(Family::KnnEuclidean)).unwrap().accuracy;
        prop_assert_eq!(r.full_set_accuracy, full);
    }
}
