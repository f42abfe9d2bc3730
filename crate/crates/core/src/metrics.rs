//! Chidamber-Kemerer metrics for a single class.
//!
//! The cohesion family (LCOM, LCOM2, normalized LCOM, connectivity) all sit on
//! one primitive: classify every unordered pair of counted methods by whether
//! their attribute-reference sets intersect. Pairs that share nothing form
//! the set P, pairs that share at least one attribute form Q, and
//! LCOM = max(|P| - |Q|, 0).

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::model::{counted_methods, ClassModel, CorpusModel, MethodModel, MethodPolicy, MethodRef, ModelError};

/// Unordered method pair, stored with the earlier-declared method first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MethodPair(pub String, pub String);

/// The P/Q partition behind an LCOM value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEvidence {
    /// Signature keys of the counted methods, in declaration order.
    pub methods: Vec<String>,
    /// P: pairs whose attribute sets are disjoint.
    pub disjoint_pairs: Vec<MethodPair>,
    /// Q: pairs sharing at least one attribute.
    pub sharing_pairs: Vec<MethodPair>,
}

impl PairEvidence {
    pub fn method_count(&self) -> usize {
        self.methods.len()
    }

    /// True when no counted method references any attribute. P is then empty
    /// by definition and Q is empty because nothing can be shared.
    pub fn is_vacuous(&self) -> bool {
        self.methods.len() >= 2 && self.disjoint_pairs.is_empty() && self.sharing_pairs.is_empty()
    }

    pub fn lcom(&self) -> u64 {
        (self.disjoint_pairs.len() as u64).saturating_sub(self.sharing_pairs.len() as u64)
    }
}

/// n choose 2.
pub fn pair_count(n: usize) -> u64 {
    let n = n as u64;
    n * n.saturating_sub(1) / 2
}

/// Index-level P/Q partition over reference sets.
struct PairSplit {
    disjoint: Vec<(usize, usize)>,
    sharing: Vec<(usize, usize)>,
}

fn split_pairs(refs: &[BTreeSet<&str>]) -> PairSplit {
    let mut split = PairSplit {
        disjoint: Vec::new(),
        sharing: Vec::new(),
    };
    let all_empty = refs.iter().all(BTreeSet::is_empty);
    for i in 0..refs.len() {
        for j in i + 1..refs.len() {
            if refs[i].is_disjoint(&refs[j]) {
                if !all_empty {
                    split.disjoint.push((i, j));
                }
            } else {
                split.sharing.push((i, j));
            }
        }
    }
    split
}

fn evidence_from(methods: &[&MethodModel], refs: &[BTreeSet<&str>]) -> PairEvidence {
    let keys: Vec<String> = methods.iter().map(|m| m.signature_key()).collect();
    let split = split_pairs(refs);
    let pair = |&(i, j): &(usize, usize)| MethodPair(keys[i].clone(), keys[j].clone());
    PairEvidence {
        disjoint_pairs: split.disjoint.iter().map(pair).collect(),
        sharing_pairs: split.sharing.iter().map(pair).collect(),
        methods: keys,
    }
}

/// Attribute-reference sets (I_i) of the counted methods as used by LCOM.
/// Undeclared names are kept; static attributes are dropped only when the
/// policy excludes them.
fn ck_reference_sets<'a>(
    class: &'a ClassModel,
    methods: &[&'a MethodModel],
    policy: &MethodPolicy,
) -> Vec<BTreeSet<&'a str>> {
    methods
        .iter()
        .map(|m| {
            m.referenced_attributes
                .iter()
                .map(String::as_str)
                .filter(|r| {
                    policy.include_static_attributes
                        || !class.attribute(r).is_some_and(|a| a.is_static)
                })
                .collect()
        })
        .collect()
}

/// LCOM over every counted method of the class.
pub fn lcom_ck(class: &ClassModel, policy: &MethodPolicy) -> (u64, PairEvidence) {
    let methods = counted_methods(class, policy);
    let refs = ck_reference_sets(class, &methods, policy);
    let evidence = evidence_from(&methods, &refs);
    (evidence.lcom(), evidence)
}

/// LCOM2: only methods implemented in the class, and only references to
/// attributes the class itself declares.
pub fn lcom2(
    class: &ClassModel,
    corpus: &CorpusModel,
    policy: &MethodPolicy,
) -> Result<(u64, PairEvidence), ModelError> {
    let own = corpus.class(&class.name)?;
    let methods: Vec<&MethodModel> = counted_methods(class, policy)
        .into_iter()
        .filter(|m| own.method(&m.signature_key()).is_some())
        .collect();
    let declared: BTreeSet<&str> = own
        .attributes
        .iter()
        .filter(|a| policy.include_static_attributes || !a.is_static)
        .map(|a| a.name.as_str())
        .collect();
    let refs: Vec<BTreeSet<&str>> = methods
        .iter()
        .map(|m| {
            m.referenced_attributes
                .iter()
                .map(String::as_str)
                .filter(|r| declared.contains(r))
                .collect()
        })
        .collect();
    let evidence = evidence_from(&methods, &refs);
    Ok((evidence.lcom(), evidence))
}

/// Share of counted-method pairs that are disjoint: |P| / C(n,2), 0 below two
/// methods.
pub fn nlcom(class: &ClassModel, policy: &MethodPolicy) -> f64 {
    nlcom_from(&lcom_ck(class, policy).1)
}

pub fn nlcom_from(evidence: &PairEvidence) -> f64 {
    let pairs = pair_count(evidence.method_count());
    if pairs == 0 {
        return 0.0;
    }
    evidence.disjoint_pairs.len() as f64 / pairs as f64
}

/// Connectivity of the sharing graph: 2(e - (n-1)) / ((n-1)(n-2)), clamped to
/// [0, 1]; 0 for two methods or fewer.
pub fn connectivity(class: &ClassModel, policy: &MethodPolicy) -> f64 {
    connectivity_from(&lcom_ck(class, policy).1)
}

pub fn connectivity_from(evidence: &PairEvidence) -> f64 {
    let n = evidence.method_count();
    if n <= 2 {
        return 0.0;
    }
    let e = evidence.sharing_pairs.len() as f64;
    let n = n as f64;
    let value = 2.0 * (e - (n - 1.0)) / ((n - 1.0) * (n - 2.0));
    value.clamp(0.0, 1.0)
}

/// Closed-form LCOM of an n-method chain where consecutive methods share
/// exactly one variable: max(C(n,2) - 2(n-1), 0).
pub fn chain_lcom(n: usize) -> u64 {
    pair_count(n).saturating_sub(2 * n.saturating_sub(1) as u64)
}

/// Generates the n-chain class: `m1..mn`, with `m_i` and `m_{i+1}` sharing
/// `v_i` and nothing else.
pub fn chain_class(n: usize) -> ClassModel {
    let mut class = ClassModel::new(format!("Chain{n}"))
        .with_attributes((1..n).map(|i| format!("v{i}")));
    for i in 1..=n {
        let mut refs = Vec::new();
        if i > 1 {
            refs.push(format!("v{}", i - 1));
        }
        if i < n {
            refs.push(format!("v{i}"));
        }
        class = class.with_method(MethodModel::new(format!("m{i}"), 0).with_refs(refs));
    }
    class
}

/// WMC with unit weights, and NPM. Every declared method counts, constructors
/// included.
pub fn size_metrics(class: &ClassModel) -> (u64, u64) {
    let wmc = class.methods.len() as u64;
    let npm = class.methods.iter().filter(|m| m.is_public).count() as u64;
    (wmc, npm)
}

/// DIT (root = 1) and NOC.
pub fn inheritance_metrics(class: &ClassModel, corpus: &CorpusModel) -> Result<(u64, u64), ModelError> {
    corpus.class(&class.name)?;
    let dit = 1 + corpus.ancestors(&class.name).len() as u64;
    let noc = corpus.children.get(&class.name).map_or(0, |c| c.len()) as u64;
    Ok((dit, noc))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingOptions {
    /// Follow resolved calls transitively when building the response set.
    pub rfc_transitive: bool,
    /// Count types outside the corpus towards CBO.
    pub include_external: bool,
}

/// CBO, RFC and CA.
pub fn coupling_metrics(
    class: &ClassModel,
    corpus: &CorpusModel,
    options: CouplingOptions,
) -> Result<(u64, u64, u64), ModelError> {
    let own = corpus.class(&class.name)?;
    let refs = &corpus.references[&own.name];
    let mut cbo = refs.internal.len();
    if options.include_external {
        cbo += refs.external.len();
    }
    let rfc = response_set(own, corpus, options.rfc_transitive).len();
    let ca = corpus.afferent.get(&own.name).map_or(0, |s| s.len());
    Ok((cbo as u64, rfc as u64, ca as u64))
}

/// Own methods plus every method they invoke. Calls that do not resolve in
/// the corpus are keyed by their receiver hint.
pub fn response_set(class: &ClassModel, corpus: &CorpusModel, transitive: bool) -> BTreeSet<MethodRef> {
    let mut set: BTreeSet<MethodRef> = class
        .methods
        .iter()
        .map(|m| MethodRef::new(class.name.clone(), m.signature_key()))
        .collect();
    let mut queue: VecDeque<MethodRef> = set.iter().cloned().collect();
    let mut expanded = BTreeSet::new();
    while let Some(caller) = queue.pop_front() {
        if !expanded.insert(caller.clone()) {
            continue;
        }
        let Some(method) = corpus
            .classes
            .get(&caller.class)
            .and_then(|c| c.method(&caller.signature))
        else {
            continue;
        };
        for call in &method.invoked {
            match corpus.resolve_call(&caller.class, call) {
                Some(target) => {
                    set.insert(target.clone());
                    if transitive {
                        queue.push_back(target);
                    }
                }
                None => {
                    set.insert(MethodRef::new(format!("?{}", call.receiver), call.signature_key()));
                }
            }
        }
    }
    set
}

/// All metric values for one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub class_name: String,
    pub lcom: u64,
    pub lcom2: u64,
    #[serde(serialize_with = "crate::round4")]
    pub nlcom: f64,
    #[serde(serialize_with = "crate::round4")]
    pub connectivity: f64,
    pub wmc: u64,
    pub dit: u64,
    pub noc: u64,
    pub cbo: u64,
    pub rfc: u64,
    pub npm: u64,
    pub ca: u64,
    pub evidence: PairEvidence,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub policy: MethodPolicy,
    pub coupling: CouplingOptions,
}

pub fn analyze_class(
    class: &ClassModel,
    corpus: &CorpusModel,
    options: &AnalysisOptions,
) -> Result<MetricsRecord, ModelError> {
    let (dit, noc) = inheritance_metrics(class, corpus)?;
    let (cbo, rfc, ca) = coupling_metrics(class, corpus, options.coupling)?;
    let (lcom2, _) = lcom2(class, corpus, &options.policy)?;
    let (lcom, evidence) = lcom_ck(class, &options.policy);
    let (wmc, npm) = size_metrics(class);
    Ok(MetricsRecord {
        class_name: class.name.clone(),
        lcom,
        lcom2,
        nlcom: nlcom_from(&evidence),
        connectivity: connectivity_from(&evidence),
        wmc,
        dit,
        noc,
        cbo,
        rfc,
        npm,
        ca,
        evidence,
    })
}

/// Records for every class in the corpus, ordered by class name.
pub fn analyze_corpus(corpus: &CorpusModel, options: &AnalysisOptions) -> Vec<MetricsRecord> {
    corpus
        .classes
        .values()
        .map(|c| analyze_class(c, corpus, options).expect("class is resident in its own corpus"))
        .collect()
}
