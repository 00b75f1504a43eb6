use proptest::prelude::*;
use qembed::classify::{argmax, binary_objective, fit_binary, predict_batch, train_ovr_logreg, Hyperparams};
use qembed::evaluate::{classification_report, classification_report_indices, f1_score, macro_average, weighted_average};
use qembed::numerics::Matrix;
use qembed::Exec;
use qembed_oracles::{confusion_report, numeric_gradient};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Three Gaussian blobs in `d` dimensions with centers `spread` apart along
/// separate axes.
fn blobs(per_class: usize, d: usize, spread: f64, sigma: f64, seed: u64) -> (Matrix, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).unwrap();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for c in 0..3 {
        for _ in 0..per_class {
            let row: Vec<f64> = (0..d)
                .map(|j| if j == c { spread } else { 0.0 } + noise.sample(&mut rng))
                .collect();
            rows.push(row);
            labels.push(format!("C{c}"));
        }
    }
    (Matrix::from_rows(&rows).unwrap(), labels)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn gradient_matches_finite_differences(n in 2usize..15, d in 1usize..6, seed: u64, l2 in 0.0f64..0.5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = Matrix::from_fn(n, d, |_, _| rng.random_range(-2.0..2.0));
        let targets: Vec<f64> = (0..n).map(|i| (i % 2) as f64).collect();
        let params: Vec<f64> = (0..=d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (_, grad) = binary_objective(&x, &targets, &params, l2);
        let numeric = numeric_gradient(|p| binary_objective(&x, &targets, p, l2).0, &params, 1e-5);
        for (a, b) in grad.iter().zip(&numeric) {
            let scale = a.abs().max(b.abs()).max(1e-8);
            prop_assert!((a - b).abs() / scale < 1e-4 || (a - b).abs() < 1e-9, "{} vs {}", a, b);
        }
    }

    #[test]
    fn argmax_ignores_increasing_transforms(scores in prop::collection::vec(-10.0f64..10.0, 1..10)) {
        let transformed: Vec<f64> = scores.iter().map(|s| 2.0 * s + 1.0).collect();
        prop_assert_eq!(argmax(&scores), argmax(&transformed));
        let cubed: Vec<f64> = scores.iter().map(|s| s.powi(3)).collect();
        prop_assert_eq!(argmax(&scores), argmax(&cubed));
    }

    #[test]
    fn report_matches_confusion_oracle(
        classes in 1usize..=8,
        pairs in prop::collection::vec((0usize..8, 0usize..8), 1..=200),
    ) {
        let y_true: Vec<usize> = pairs.iter().map(|p| p.0 % classes).collect();
        let y_pred: Vec<usize> = pairs.iter().map(|p| p.1 % classes).collect();
        let names: Vec<String> = (0..classes).map(|c| format!("L{c}")).collect();
        let report = classification_report_indices(&y_true, &y_pred, &names).unwrap();
        let oracle = confusion_report(&y_true, &y_pred, classes);
        for (m, o) in report.classes.iter().zip(&oracle.classes) {
            prop_assert_eq!((m.precision, m.recall, m.f1, m.support), *o);
            prop_assert!(m.precision.min(m.recall) - 1e-15 <= m.f1 && m.f1 <= m.precision.max(m.recall) + 1e-15);
        }
        prop_assert_eq!(report.macro_f1, oracle.macro_f1);
        prop_assert_eq!(report.weighted_f1, oracle.weighted_f1);

        let by_name_true: Vec<&str> = y_true.iter().map(|&i| names[i].as_str()).collect();
        let by_name_pred: Vec<&str> = y_pred.iter().map(|&i| names[i].as_str()).collect();
        prop_assert_eq!(classification_report(&by_name_true, &by_name_pred, &names).unwrap(), report);
    }

    #[test]
    fn f1_lies_between_precision_and_recall(p in 0.0f64..=1.0, r in 0.0f64..=1.0) {
        let f = f1_score(p, r).unwrap();
        prop_assert!(p.min(r) - 1e-15 <= f && f <= p.max(r) + 1e-15);
    }
}

#[test]
fn blobs_are_fit_perfectly() {
    let (x, labels) = blobs(20, 5, 4.0, 0.5, 1);
    let model = train_ovr_logreg(&x, &labels, &Hyperparams::default()).unwrap();
    let predicted = predict_batch(&model, &x, Exec::Parallel).unwrap();
    let truth: Vec<usize> = labels.iter().map(|l| model.classes().iter().position(|c| c == l).unwrap()).collect();
    assert_eq!(predicted, truth);
}

#[test]
fn seeds_converge_to_the_same_weights() {
    let (x, labels) = blobs(10, 3, 1.0, 1.0, 5);
    let targets: Vec<f64> = labels.iter().map(|l| f64::from(u8::from(l == "C0"))).collect();
    let hp = Hyperparams {
        l2: 0.1,
        max_epochs: 20_000,
        tol: 1e-10,
        init_scale: 1.0,
        ..Hyperparams::default()
    };
    let a = fit_binary(&x, &targets, &hp, 1).unwrap();
    let b = fit_binary(&x, &targets, &hp, 2).unwrap();
    assert_ne!(a.losses[0], b.losses[0], "different seeds must start apart");
    for (p, q) in a.params.iter().zip(&b.params) {
        assert!((p - q).abs() < 1e-4, "{p} vs {q}");
    }
    assert!(a.losses.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn reported_tfidf_column_macro_and_weighting() {
    let f1 = [0.77, 0.62, 0.73, 0.24, 0.74, 0.91];
    assert!((macro_average(&f1) - 0.668).abs() <= 0.001);
    // Supports skewed toward the stronger classes lift the weighted mean above the macro mean.
    let supports = [300, 150, 250, 40, 260, 300];
    assert!(weighted_average(&f1, &supports) > macro_average(&f1));
    assert_eq!(weighted_average(&f1, &[1; 6]), macro_average(&f1));
}
