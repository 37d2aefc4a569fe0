mod common;

use std::collections::BTreeMap;

use metaxfer::arff::{parse_arff_str, ArffRelation, Attribute, AttributeType, Value};
use metaxfer::aslib::{AslibScenario, RunRecord, RunStatus};
use metaxfer::dataset::{
    anova_f, apply_preprocessor, derive_labels, fit_preprocessor, stratified_split,
    stratum_test_count,
};
use metaxfer::matrix::Matrix;
use metaxfer::nn::softmax;
use metaxfer::seed::rng_from_seed;
use proptest::prelude::*;
use proptest::sample::SizeRange;

/// Labels over `classes` where each present class has at least two members.
fn labels(len: impl Into<SizeRange>, classes: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..classes, len)
        .prop_map(move |mut y| {
            for c in 0..classes {
                if y.iter().filter(|&&v| v == c).count() == 1 {
                    let i = y.iter().position(|&v| v == c).unwrap();
                    y[i] = (c + 1) % classes;
                }
            }
            y
        })
        .prop_filter("two classes with two members", |y| {
            let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
            for &c in y {
                *seen.entry(c).or_default() += 1;
            }
            seen.len() >= 2 && seen.values().all(|&n| n >= 2)
        })
}

fn table(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<Option<f64>>>> {
    let cell = prop_oneof![9 => (-1e3..1e3f64).prop_map(Some), 1 => Just(None)];
    prop::collection::vec(prop::collection::vec(cell, cols), rows)
}

fn text_value() -> impl Strategy<Value = Value> {
    "[a-zA-Z0-9 _,'%{}\\\\.-]{1,12}".prop_map(Value::Text)
}

fn relations() -> impl Strategy<Value = ArffRelation> {
    (1usize..5, 0usize..8)
        .prop_flat_map(|(cols, rows)| {
            let kinds = prop::collection::vec(0u8..3, cols);
            (kinds, Just(rows))
        })
        .prop_flat_map(|(kinds, rows)| {
            let row = kinds
                .iter()
                .map(|&k| match k {
                    0 => prop_oneof![(-1e6..1e6f64).prop_map(Value::Number), Just(Value::Missing)]
                        .boxed(),
                    1 => prop_oneof![text_value(), Just(Value::Missing)].boxed(),
                    _ => prop_oneof![
                        Just(Value::Text("ok".into())),
                        Just(Value::Text("time out".into())),
                        Just(Value::Missing)
                    ]
                    .boxed(),
                })
                .collect::<Vec<_>>();
            (Just(kinds), prop::collection::vec(row, rows))
        })
        .prop_map(|(kinds, rows)| ArffRelation {
            name: "generated relation".into(),
            attributes: kinds
                .iter()
                .enumerate()
                .map(|(j, &k)| Attribute {
                    name: format!("attr {j}"),
                    kind: match k {
                        0 => AttributeType::Numeric,
                        1 => AttributeType::String,
                        _ => AttributeType::Nominal(vec!["ok".into(), "time out".into()]),
                    },
                })
                .collect(),
            rows,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn arff_write_parse_roundtrip(rel in relations()) {
        let text = rel.to_string();
        let back = parse_arff_str(&text).unwrap();
        prop_assert_eq!(back, rel);
    }

    #[test]
    fn anova_matches_oracle(y in labels(4..60, 4), seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = rng_from_seed(seed);
        let col: Vec<f64> = y.iter().map(|_| rng.random_range(-10.0..10.0)).collect();
        let f = anova_f(&col, &y).unwrap();
        let o = common::oracles::anova_f(&col, &y);
        prop_assert!((f - o).abs() <= 1e-9 * o.abs().max(1e-300), "{} vs {}", f, o);
    }

    #[test]
    fn split_partitions_and_respects_shares(y in labels(4..200, 5), seed in any::<u64>()) {
        let split = stratified_split(&y, 0.2, &mut rng_from_seed(seed)).unwrap();
        let mut all: Vec<usize> = split.train_rows.iter().chain(&split.test_rows).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..y.len()).collect::<Vec<_>>());
        for c in 0..5 {
            let n = y.iter().filter(|&&v| v == c).count();
            if n == 0 { continue; }
            let t = split.test_rows.iter().filter(|&&i| y[i] == c).count();
            prop_assert_eq!(t, stratum_test_count(n, 0.2));
            prop_assert!((t as f64 / n as f64 - 0.2).abs() <= 1.0 / n as f64 + 1e-12);
            prop_assert!(t >= 1 && t < n);
        }
    }

    #[test]
    fn split_is_seed_deterministic(y in labels(4..80, 3), seed in any::<u64>()) {
        let a = stratified_split(&y, 0.2, &mut rng_from_seed(seed)).unwrap();
        let b = stratified_split(&y, 0.2, &mut rng_from_seed(seed)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn preprocessing_output_in_unit_interval(
        (train, test) in (1usize..6).prop_flat_map(|d| (table(12, d), table(6, d))),
        k_frac in 0.0..1.0f64,
    ) {
        let y: Vec<usize> = (0..train.len()).map(|i| i % 3).collect();
        let d = train[0].len();
        let k = 1 + ((d - 1) as f64 * k_frac) as usize;
        let pre = fit_preprocessor(&train, &y, k).unwrap();
        prop_assert_eq!(pre.k(), k);
        prop_assert!(pre.selected_indices.windows(2).all(|w| w[0] < w[1]));
        for m in [apply_preprocessor(&pre, &train).unwrap(), apply_preprocessor(&pre, &test).unwrap()] {
            prop_assert_eq!(m.cols(), k);
            prop_assert!(m.as_slice().iter().all(|v| (0.0..=1.0).contains(v)));
        }
    }

    #[test]
    fn select_k_invariant_to_row_order(train in (2usize..6).prop_flat_map(|d| table(15, d)), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let y: Vec<usize> = (0..train.len()).map(|i| i % 3).collect();
        let k = train[0].len() / 2 + 1;
        let a = fit_preprocessor(&train, &y, k).unwrap();
        let mut perm: Vec<usize> = (0..train.len()).collect();
        perm.shuffle(&mut rng_from_seed(seed));
        let px: Vec<_> = perm.iter().map(|&i| train[i].clone()).collect();
        let py: Vec<_> = perm.iter().map(|&i| y[i]).collect();
        let b = fit_preprocessor(&px, &py, k).unwrap();
        prop_assert_eq!(a.selected_indices, b.selected_indices);
        prop_assert_eq!(a.min, b.min);
        prop_assert_eq!(a.max, b.max);
        prop_assert_eq!(a.median, b.median);
        for (fa, fb) in a.f_scores.iter().zip(&b.f_scores) {
            prop_assert!((fa - fb).abs() <= 1e-9 * fa.abs().max(1.0));
        }
    }

    #[test]
    fn softmax_shift_invariant(
        rows in prop::collection::vec(prop::collection::vec(-50.0..50.0f64, 3), 1..6),
        shift in -1e3..1e3f64,
    ) {
        let base = softmax(Matrix::from_rows(&rows).unwrap());
        let shifted: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| v + shift).collect()).collect();
        let moved = softmax(Matrix::from_rows(&shifted).unwrap());
        for i in 0..base.rows() {
            prop_assert!((base.row(i).iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for (a, b) in base.row(i).iter().zip(moved.row(i)) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn labels_independent_of_instance_order(perf in prop::collection::vec(prop::collection::vec(0.0..100.0f64, 3), 12..20), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let build = |order: &[usize]| {
            let instances: Vec<String> = order.iter().map(|i| format!("i{i:03}")).collect();
            let mut runs = BTreeMap::new();
            for (&i, name) in order.iter().zip(&instances) {
                let mut by_alg = BTreeMap::new();
                for (a, &p) in perf[i].iter().enumerate() {
                    let status = if p > 90.0 { RunStatus::Timeout } else { RunStatus::Ok };
                    by_alg.insert(format!("a{a}"), RunRecord { performance: p, runstatus: status });
                }
                runs.insert(name.clone(), by_alg);
            }
            AslibScenario {
                scenario_id: "prop".into(),
                feature_values: order.iter().map(|&i| vec![Some(i as f64)]).collect(),
                instances,
                feature_names: vec!["f".into()],
                algorithms: vec!["a0".into(), "a1".into(), "a2".into()],
                runs,
                performance_measure_name: "runtime".into(),
                maximize: false,
                cutoff_time: Some(90.0),
                performance_type: Some("runtime".into()),
            }
        };
        let order: Vec<usize> = (0..perf.len()).collect();
        let mut shuffled = order.clone();
        shuffled.shuffle(&mut rng_from_seed(seed));
        let (a, b) = (derive_labels(&build(&order)), derive_labels(&build(&shuffled)));
        match (a, b) {
            (Ok(a), Ok(b)) => {
                let label = |d: &metaxfer::dataset::RawMetaDataset| -> BTreeMap<String, String> {
                    d.instances.iter().zip(&d.y).map(|(i, &c)| (i.clone(), d.class_names[c].clone())).collect()
                };
                prop_assert_eq!(&a.class_names, &b.class_names);
                prop_assert_eq!(label(&a), label(&b));
            }
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "order changed the outcome: {:?} / {:?}", a.is_ok(), b.is_ok()),
        }
    }
}
