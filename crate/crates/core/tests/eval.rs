mod common;

use common::*;
use mergeprompt_core::eval::*;
use mergeprompt_core::model::EvalRecord;
use mergeprompt_core::prompt::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn record(id: usize, outcomes: Vec<bool>) -> EvalRecord {
    let n = outcomes.len();
    EvalRecord::new(id.to_string(), outcomes, vec![String::new(); n]).unwrap()
}

// Recount from scratch for every k.
fn naive_curve(outcomes: &[Vec<bool>], k_max: usize) -> Vec<f64> {
    (1..=k_max)
        .map(|k| outcomes.iter().filter(|o| o[..k].iter().any(|&x| x)).count() as f64 / outcomes.len() as f64)
        .collect()
}

proptest! {
    #[test]
    fn curve_matches_naive_count_and_never_decreases(
        outcomes in prop::collection::vec(prop::collection::vec(any::<bool>(), 10), 1..40),
        k in 1usize..=10,
    ) {
        let records: Vec<_> = outcomes.iter().cloned().enumerate().map(|(i, o)| record(i, o)).collect();
        let curve = accuracy_curve(&records, k).unwrap();
        prop_assert_eq!(curve.acc(), naive_curve(&outcomes, k));
        for w in curve.acc().windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        prop_assert!(curve.acc().iter().all(|a| (0.0..=1.0).contains(a)));
    }

    #[test]
    fn expected_accuracy_never_decreases(weights in prop::collection::vec(0.0f64..1.0, 2..12)) {
        let sum: f64 = weights.iter().sum();
        prop_assume!(sum > 1e-6);
        let model = DensityModel::on_grid(weights.iter().map(|w| w / sum).collect());
        let values: Vec<f64> = (1..=15).map(|k| expected_accuracy(&model, k)).collect();
        for w in values.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-12);
        }
    }

    #[test]
    fn identical_text_is_correct(x in "[ -~]{0,20}[!-~][ -~]{0,20}(\n[ -~]{0,10}){0,2}") {
        prop_assert!(is_correct(&x, &x, EvalMode::PrefixFirstLine));
        prop_assert!(is_correct(&x, &x, EvalMode::ExactMultiline));
    }

    #[test]
    fn more_prompt_never_creates_oov(prompt in "[a-zA-Z_ ;:()]{0,40}", extra in "[a-zA-Z_ ;:()]{0,40}") {
        let d = camera_query();
        let before = classify_oov(&d, &prompt, false).unwrap().oov_required;
        let after = classify_oov(&d, &format!("{prompt}\n{extra}"), false).unwrap().oov_required;
        prop_assert!(before || !after);
    }
}

#[test]
fn fit_weights_stay_on_simplex() {
    let opts = FitOptions { iterations: 2_000, ..Default::default() };
    for curve in [vec![0.2, 0.3, 0.35, 0.4], vec![0.0, 0.5, 1.0], vec![0.7; 5]] {
        let fit = fit_density(&curve, &opts).unwrap();
        assert!(fit.model.weights.iter().all(|w| *w >= 0.0));
        assert!((fit.model.weights.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert_eq!(fit.model.grid.len(), 51);
    }
}

#[test]
fn monte_carlo_curve_tracks_closed_form() {
    // Per-example solve probabilities from a two-bump density; 100 examples
    // and a 3-sigma band from the binomial variance at each k.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p: Vec<f64> = (0..100)
        .map(|_| if rng.random_bool(0.5) { rng.random_range(0.0..0.1) } else { rng.random_range(0.6..1.0) })
        .collect();
    let outcomes: Vec<Vec<bool>> = p.iter().map(|&pi| (0..10).map(|_| rng.random_bool(pi)).collect()).collect();
    let records: Vec<_> = outcomes.into_iter().enumerate().map(|(i, o)| record(i, o)).collect();
    let curve = accuracy_curve(&records, 10).unwrap();
    for k in 1..=10 {
        let per: Vec<f64> = p.iter().map(|pi| 1.0 - (1.0 - pi).powi(k as i32)).collect();
        let mean = per.iter().sum::<f64>() / 100.0;
        let sigma = (per.iter().map(|q| q * (1.0 - q)).sum::<f64>()).sqrt() / 100.0;
        assert!((curve.at(k) - mean).abs() <= 3.0 * sigma + 1e-9, "k={k}: {} vs {mean}", curve.at(k));
    }
}

#[test]
fn two_mass_density_is_recovered() {
    let truth = DensityModel { grid: vec![0.0, 1.0], weights: vec![0.6, 0.4] };
    let observed: Vec<f64> = (1..=20).map(|k| expected_accuracy(&truth, k)).collect();
    let fit = fit_density(&observed, &FitOptions::default()).unwrap();
    assert!((fit.mass_near_zero - 0.6).abs() <= 0.05, "{}", fit.mass_near_zero);
    assert!((fit.mass_near_one - 0.4).abs() <= 0.05, "{}", fit.mass_near_one);
    assert!(fit.loss < 1e-4, "{}", fit.loss);
}

#[test]
fn exact_mode_accepts_the_include_resolution() {
    let truth = build_config_conflict().resolution.join("\n");
    let completion = "#include \"build/build_config.h\"\n#include \"media/media_buildflags.h\"";
    assert!(is_correct(completion, &truth, EvalMode::ExactMultiline));
}

#[test]
fn camera_fix_needs_an_unseen_token() {
    let shot = render_shot(PromptFormat::SemanticDiff, &Example::Semantic(&app_url_shot())).unwrap();
    let d = camera_query();
    let prompt = assemble(&[shot], &d, PromptFormat::SemanticDiff, SelectionStrategy::MaximalPlain, DEFAULT_BUDGET, &TokenEstimator::default())
        .unwrap();
    assert!(classify_oov(&d, &prompt.text, true).unwrap().oov_required);
    let extended = format!("{}kCameraPanTiltZoom\n", prompt.text);
    assert!(!classify_oov(&d, &extended, true).unwrap().oov_required);
}
