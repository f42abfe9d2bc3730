mod common;

use std::collections::{BTreeSet, HashSet};

use ckm::frontend::{dump_model_file, load_model_file};
use ckm::metrics::{analyze_corpus, connectivity_from, lcom_ck, nlcom_from, pair_count, AnalysisOptions};
use ckm::model::{build_corpus, AttributeModel, ClassModel, Invocation, MethodModel, MethodPolicy};
use ckm::stats::{classify_cohesion, correlation, descriptive_stats, suggest_split, Cohesion};
use common::naive_lcom;
use proptest::prelude::*;

const POOL: usize = 8;

/// Each mask selects attributes `a0..a7` for one method.
fn class_from_masks(masks: &[u8]) -> ClassModel {
    let mut class = ClassModel::new("P").with_attributes((0..POOL).map(|i| format!("a{i}")));
    for (k, mask) in masks.iter().enumerate() {
        let refs = (0..POOL).filter(|b| mask & (1 << b) != 0).map(|b| format!("a{b}"));
        class = class.with_method(MethodModel::new(format!("m{k}"), 0).public().with_refs(refs));
    }
    class
}

fn sets_from_masks(masks: &[u8]) -> Vec<HashSet<String>> {
    masks
        .iter()
        .map(|m| (0..POOL).filter(|b| m & (1 << b) != 0).map(|b| format!("a{b}")).collect())
        .collect()
}

fn masks() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(any::<u8>(), 0..=12)
}

fn ident() -> impl Strategy<Value = String> {
    "[a-z][a-zA-Z0-9_]{0,6}"
}

fn arb_method() -> impl Strategy<Value = MethodModel> {
    (
        ident(),
        0usize..4,
        any::<(bool, bool, bool)>(),
        prop::collection::btree_set(ident(), 0..4),
        prop::collection::vec((prop::sample::select(vec!["this", "super", "unknown", "T"]), ident(), 0usize..3), 0..3),
        any::<bool>(),
    )
        .prop_map(|(name, arity, (public, is_static, ctor), refs, calls, typed)| MethodModel {
            name,
            arity,
            is_public: public,
            is_static,
            is_constructor: ctor,
            referenced_attributes: refs,
            invoked: calls.into_iter().map(|(r, n, a)| Invocation::new(r, n, a)).collect(),
            param_types: typed.then(|| vec!["int".to_string(); arity]),
        })
}

fn arb_class(name: String) -> impl Strategy<Value = ClassModel> {
    (
        prop::collection::btree_set(ident(), 0..5),
        prop::collection::vec(arb_method(), 0..5),
        any::<(bool, bool)>(),
        prop::option::of(prop::sample::select(vec!["Base", "java.lang.Object"])),
    )
        .prop_map(move |(attrs, methods, (st, pb), sup)| {
            let mut seen = BTreeSet::new();
            ClassModel {
                name: name.clone(),
                superclass_name: sup.map(str::to_string).filter(|s| *s != name),
                attributes: attrs
                    .into_iter()
                    .map(|a| AttributeModel { is_static: st, is_public: pb, ..AttributeModel::new(a) })
                    .collect(),
                methods: methods.into_iter().filter(|m| seen.insert(m.signature_key())).collect(),
            }
        })
}

fn arb_corpus() -> impl Strategy<Value = Vec<ClassModel>> {
    prop::collection::btree_set("[A-Z][a-z]{0,4}", 0..6).prop_flat_map(|names| {
        names
            .into_iter()
            .map(|n| arb_class(n).boxed())
            .collect::<Vec<_>>()
    })
}

proptest! {
    #[test]
    fn lcom_matches_naive_oracle(masks in masks()) {
        let (lcom, ev) = lcom_ck(&class_from_masks(&masks), &MethodPolicy::default());
        let (want, p, q) = naive_lcom(&sets_from_masks(&masks));
        prop_assert_eq!(lcom, want);
        prop_assert_eq!(ev.disjoint_pairs.len() as u64, p);
        prop_assert_eq!(ev.sharing_pairs.len() as u64, q);
    }

    #[test]
    fn pairs_partition_unless_vacuous(masks in masks()) {
        let (_, ev) = lcom_ck(&class_from_masks(&masks), &MethodPolicy::default());
        let total = (ev.disjoint_pairs.len() + ev.sharing_pairs.len()) as u64;
        if masks.iter().all(|m| *m == 0) {
            prop_assert_eq!(total, 0);
        } else {
            prop_assert_eq!(total, pair_count(masks.len()));
        }
    }

    #[test]
    fn normalized_metrics_in_unit_interval(masks in masks()) {
        let (_, ev) = lcom_ck(&class_from_masks(&masks), &MethodPolicy::default());
        prop_assert!((0.0..=1.0).contains(&nlcom_from(&ev)));
        prop_assert!((0.0..=1.0).contains(&connectivity_from(&ev)));
    }

    #[test]
    fn adding_an_isolated_method_never_lowers_lcom(masks in masks()) {
        let p = MethodPolicy::default();
        let before = lcom_ck(&class_from_masks(&masks), &p).0;
        let grown = class_from_masks(&masks)
            .with_attributes(["fresh"])
            .with_method(MethodModel::new("isolated", 0).with_refs(["fresh"]));
        prop_assert!(lcom_ck(&grown, &p).0 >= before);
    }

    #[test]
    fn cohesive_at_zero_stays_cohesive_at_one(masks in masks()) {
        let corpus = build_corpus(vec![class_from_masks(&masks)]).unwrap();
        let record = &analyze_corpus(&corpus, &AnalysisOptions::default())[0];
        if classify_cohesion(record, 0) == Cohesion::Cohesive {
            prop_assert_eq!(classify_cohesion(record, 1), Cohesion::Cohesive);
        }
    }

    #[test]
    fn split_groups_partition_methods(masks in masks()) {
        let class = class_from_masks(&masks);
        let s = suggest_split(&class, &MethodPolicy::default());
        let flat: Vec<String> = s.groups.iter().flatten().cloned().collect();
        let unique: BTreeSet<&String> = flat.iter().collect();
        prop_assert_eq!(flat.len(), unique.len());
        prop_assert_eq!(flat.len(), masks.len());
        // Methods in different groups never share an attribute.
        let sets = sets_from_masks(&masks);
        let group_of = |sig: &str| s.groups.iter().position(|g| g.iter().any(|m| m == sig)).unwrap();
        for i in 0..masks.len() {
            for j in i + 1..masks.len() {
                if group_of(&format!("m{i}/0")) != group_of(&format!("m{j}/0")) {
                    prop_assert!(sets[i].is_disjoint(&sets[j]));
                }
            }
        }
        if s.groups.len() < 2 {
            prop_assert!(!s.recommended);
        }
    }

    #[test]
    fn model_file_round_trips(classes in arb_corpus()) {
        let once = dump_model_file(&classes);
        let loaded = load_model_file(&once).unwrap();
        prop_assert_eq!(dump_model_file(&loaded), once);
        let mut sorted = classes.clone();
        sorted.sort_by(|a, b| a.name.cmp(&b.name));
        prop_assert_eq!(loaded, sorted);
    }

    #[test]
    fn corpus_inheritance_invariants(classes in arb_corpus()) {
        let corpus = build_corpus(classes).unwrap();
        let records = analyze_corpus(&corpus, &AnalysisOptions::default());
        prop_assert_eq!(records.len(), corpus.len());
        let noc_total: u64 = records.iter().map(|r| r.noc).sum();
        prop_assert_eq!(noc_total, corpus.parents.len() as u64);
        for r in &records {
            prop_assert_eq!(r.dit, 1 + corpus.ancestors(&r.class_name).len() as u64);
            if let Some(p) = corpus.parents.get(&r.class_name) {
                prop_assert!(corpus.children[p].contains(&r.class_name));
            }
            let c = corpus.class(&r.class_name).unwrap();
            prop_assert_eq!(r.wmc, c.methods.len() as u64);
            prop_assert!(r.npm <= r.wmc);
            prop_assert!(r.rfc >= r.wmc);
        }
    }

    #[test]
    fn descriptive_stats_are_ordered(values in prop::collection::vec(-1e6f64..1e6, 1..100)) {
        let s = descriptive_stats(&values).unwrap();
        prop_assert!(s.min <= s.median && s.median <= s.max);
        prop_assert!(s.min <= s.mean + 1e-6 && s.mean <= s.max + 1e-6);
        prop_assert!(s.std_dev >= 0.0);
        prop_assert_eq!(s.n, values.len());
    }

    #[test]
    fn correlation_is_bounded_and_symmetric(pairs in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 2..50)) {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        if let (Ok(a), Ok(b)) = (correlation(&xs, &ys), correlation(&ys, &xs)) {
            prop_assert!((-1.0..=1.0).contains(&a));
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
