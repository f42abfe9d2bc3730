//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use ckm::model::{ClassModel, MethodModel};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn corpus_dir() -> PathBuf {
    fixtures().join("corpus")
}

pub fn method(name: &str, refs: &[&str]) -> MethodModel {
    MethodModel::new(name, 0).public().with_refs(refs.iter().copied())
}

/// The three-method example: {a,b,c,d,e}, {a,b,e}, {x,y,z}.
pub fn three_method_example() -> ClassModel {
    ClassModel::new("C")
        .with_attributes(["a", "b", "c", "d", "e", "x", "y", "z"])
        .with_method(method("M1", &["a", "b", "c", "d", "e"]))
        .with_method(method("M2", &["a", "b", "e"]))
        .with_method(method("M3", &["x", "y", "z"]))
}

/// Class x: only g and h share E.
pub fn class_x() -> ClassModel {
    ClassModel::new("x")
        .with_attributes(["A", "B", "C", "D", "E"])
        .with_method(method("f", &["A", "B"]))
        .with_method(method("g", &["C", "E"]))
        .with_method(method("h", &["D", "E"]))
}

/// Random class with up to `max_methods` methods drawing from up to
/// `max_attrs` attributes. Method names are unique.
pub fn random_class(rng: &mut ChaCha8Rng, name: &str, max_methods: usize, max_attrs: usize) -> ClassModel {
    let n_attrs = rng.gen_range(0..=max_attrs);
    let n_methods = rng.gen_range(0..=max_methods);
    let attrs: Vec<String> = (0..n_attrs).map(|i| format!("f{i}")).collect();
    let mut class = ClassModel::new(name).with_attributes(attrs.iter().cloned());
    for i in 0..n_methods {
        let refs: Vec<&str> = attrs
            .iter()
            .filter(|_| rng.gen_bool(0.3))
            .map(String::as_str)
            .collect();
        class = class.with_method(method(&format!("m{i}"), &refs));
    }
    class
}

/// Naive LCOM: every unordered pair, intersect with HashSets, apply the
/// all-empty clause, clamp at zero. Returns (lcom, |P|, |Q|).
pub fn naive_lcom(sets: &[HashSet<String>]) -> (u64, u64, u64) {
    if sets.iter().all(HashSet::is_empty) {
        return (0, 0, 0);
    }
    let (mut p, mut q) = (0u64, 0u64);
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            if sets[i].intersection(&sets[j]).next().is_none() {
                p += 1;
            } else {
                q += 1;
            }
        }
    }
    (p.saturating_sub(q), p, q)
}

pub fn reference_sets(class: &ClassModel, keep: impl Fn(&str) -> bool) -> Vec<HashSet<String>> {
    class
        .methods
        .iter()
        .map(|m| {
            m.referenced_attributes
                .iter()
                .filter(|r| keep(r))
                .cloned()
                .collect()
        })
        .collect()
}

/// Mean, median, sample standard deviation via the textbook two-pass
/// formulas on a sorted copy.
pub fn two_pass(values: &[f64]) -> (f64, f64, f64, f64, f64) {
    let n = values.len() as f64;
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let mid = sorted.len() / 2;
    let median = if sorted.len().is_multiple_of(2) {
        (sorted[mid - 1] + sorted[mid]) / 2.0
    } else {
        sorted[mid]
    };
    (sorted[0], sorted[sorted.len() - 1], mean, median, var.sqrt())
}


/// 60 classes whose methods all share one attribute and 40 whose methods
/// fall into 2..=4 disjoint groups with at least five public methods.
/// Returns the classes and the designed-uncohesive names.
pub fn labeled_corpus(rng: &mut ChaCha8Rng) -> (Vec<ClassModel>, HashSet<String>) {
    let mut classes = Vec::new();
    let mut uncohesive = HashSet::new();
    for i in 0..60 {
        let n = rng.gen_range(1..=8);
        let mut c = ClassModel::new(format!("Cohesive{i:02}")).with_attributes(["core", "extra"]);
        for k in 0..n {
            let refs: &[&str] = if rng.gen_bool(0.5) { &["core", "extra"] } else { &["core"] };
            c = c.with_method(method(&format!("m{k}"), refs));
        }
        classes.push(c);
    }
    for i in 0..40 {
        let groups = rng.gen_range(2..=4);
        let per_group = rng.gen_range(3..=4);
        let name = format!("Uncohesive{i:02}");
        let mut c = ClassModel::new(name.clone())
            .with_attributes((0..groups).map(|g| format!("g{g}")));
        for g in 0..groups {
            for k in 0..per_group {
                let attr = format!("g{g}");
                c = c.with_method(method(&format!("m{g}_{k}"), &[attr.as_str()]));
            }
        }
        uncohesive.insert(name);
        classes.push(c);
    }
    (classes, uncohesive)
}

/// A parent declaring `p*` attributes and a child declaring `c*` attributes
/// whose methods reference attributes from both.
pub fn random_family(rng: &mut ChaCha8Rng, max_methods: usize, max_attrs: usize) -> (ClassModel, ClassModel) {
    let n_parent = rng.gen_range(0..=max_attrs / 2);
    let n_own = rng.gen_range(0..=max_attrs - n_parent);
    let parent_attrs: Vec<String> = (0..n_parent).map(|i| format!("p{i}")).collect();
    let own_attrs: Vec<String> = (0..n_own).map(|i| format!("c{i}")).collect();
    let parent = ClassModel::new("Parent")
        .with_attributes(parent_attrs.iter().cloned())
        .with_method(method("inherited", &[]));
    let mut child = ClassModel::new("Child")
        .extends("Parent")
        .with_attributes(own_attrs.iter().cloned());
    let pool: Vec<&String> = parent_attrs.iter().chain(&own_attrs).collect();
    for i in 0..rng.gen_range(0..=max_methods) {
        let refs: Vec<&str> = pool
            .iter()
            .filter(|_| rng.gen_bool(0.3))
            .map(|s| s.as_str())
            .collect();
        child = child.with_method(method(&format!("m{i}"), &refs));
    }
    (parent, child)
}
