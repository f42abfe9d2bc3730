//! In-memory class corpus: the vocabulary every metric consumes.
//!
//! A [`ClassModel`] describes one class as declared in source (its own
//! attributes and methods only). [`build_corpus`] links a set of classes
//! together: superclass resolution, the inverse children relation, call
//! resolution and the type references used by the coupling metrics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Receiver hint for calls made on the current object (`m()`, `this.m()`).
pub const RECV_THIS: &str = "this";
/// Receiver hint for calls dispatched to the superclass (`super.m()`).
pub const RECV_SUPER: &str = "super";
/// Receiver hint when the receiver's type could not be determined.
pub const RECV_UNKNOWN: &str = "unknown";

const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void", "var",
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("duplicate class name `{0}`")]
    DuplicateClassName(String),
    #[error("inheritance cycle: {}", .0.join(" -> "))]
    InheritanceCycle(Vec<String>),
    #[error("unknown class `{0}`")]
    UnknownClass(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AttributeModel {
    pub name: String,
    pub is_static: bool,
    pub is_public: bool,
    /// Declared type token, when known (e.g. `List<Order>`).
    pub type_token: Option<String>,
}

impl AttributeModel {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            is_static: false,
            is_public: false,
            type_token: None,
        }
    }
}

/// One call site inside a method body.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Invocation {
    /// `this`, `super`, `unknown`, or the receiver's declared type token.
    pub receiver: String,
    pub name: String,
    pub arity: usize,
}

impl Invocation {
    pub fn new(receiver: impl Into<String>, name: impl Into<String>, arity: usize) -> Self {
        Self {
            receiver: receiver.into(),
            name: name.into(),
            arity,
        }
    }

    pub fn signature_key(&self) -> String {
        signature_key(&self.name, self.arity)
    }
}

/// Overload-disambiguating key: method name plus arity.
pub fn signature_key(name: &str, arity: usize) -> String {
    format!("{name}/{arity}")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodModel {
    pub name: String,
    pub arity: usize,
    pub is_public: bool,
    pub is_static: bool,
    pub is_constructor: bool,
    /// Names of the attributes this method reads or writes (the set I_i).
    pub referenced_attributes: BTreeSet<String>,
    pub invoked: Vec<Invocation>,
    /// Declared parameter type tokens, when known. Length equals `arity`.
    pub param_types: Option<Vec<String>>,
}

impl MethodModel {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Self {
            name: name.into(),
            arity,
            is_public: false,
            is_static: false,
            is_constructor: false,
            referenced_attributes: BTreeSet::new(),
            invoked: Vec::new(),
            param_types: None,
        }
    }

    pub fn signature_key(&self) -> String {
        signature_key(&self.name, self.arity)
    }

    pub fn public(mut self) -> Self {
        self.is_public = true;
        self
    }

    pub fn with_refs<I, S>(mut self, refs: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.referenced_attributes
            .extend(refs.into_iter().map(Into::into));
        self
    }

    pub fn with_call(mut self, call: Invocation) -> Self {
        self.invoked.push(call);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassModel {
    pub name: String,
    pub superclass_name: Option<String>,
    pub attributes: Vec<AttributeModel>,
    pub methods: Vec<MethodModel>,
}

impl ClassModel {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            superclass_name: None,
            attributes: Vec::new(),
            methods: Vec::new(),
        }
    }

    pub fn extends(mut self, superclass: impl Into<String>) -> Self {
        self.superclass_name = Some(superclass.into());
        self
    }

    pub fn with_attributes<I, S>(mut self, names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.attributes
            .extend(names.into_iter().map(AttributeModel::new));
        self
    }

    pub fn with_method(mut self, method: MethodModel) -> Self {
        self.methods.push(method);
        self
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeModel> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn method(&self, signature: &str) -> Option<&MethodModel> {
        self.methods.iter().find(|m| m.signature_key() == signature)
    }

    /// Unqualified name (the part after the last `.`).
    pub fn simple_name(&self) -> &str {
        simple_name(&self.name)
    }

    /// Package prefix of the qualified name, if any.
    pub fn package(&self) -> Option<&str> {
        self.name.rsplit_once('.').map(|(pkg, _)| pkg)
    }

    /// Attribute references that name no attribute declared in this class.
    /// They still count for LCOM but are dropped by LCOM2.
    pub fn unresolved_references(&self) -> BTreeSet<(String, String)> {
        let declared: BTreeSet<&str> = self.attributes.iter().map(|a| a.name.as_str()).collect();
        let mut out = BTreeSet::new();
        for m in &self.methods {
            for r in &m.referenced_attributes {
                if !declared.contains(r.as_str()) {
                    out.insert((m.signature_key(), r.clone()));
                }
            }
        }
        out
    }

    /// Checks the per-class invariants: non-empty name, distinct attribute
    /// names, distinct signature keys, no self-inheritance.
    pub fn validate(&self) -> Result<(), String> {
        if self.name.is_empty() {
            return Err("class name is empty".into());
        }
        if self.superclass_name.as_deref() == Some(self.name.as_str()) {
            return Err(format!("class `{}` extends itself", self.name));
        }
        let mut seen = BTreeSet::new();
        for a in &self.attributes {
            if a.name.is_empty() {
                return Err(format!("class `{}` has an attribute with an empty name", self.name));
            }
            if !seen.insert(a.name.as_str()) {
                return Err(format!("duplicate attribute `{}` in `{}`", a.name, self.name));
            }
        }
        let mut seen = BTreeSet::new();
        for m in &self.methods {
            if m.name.is_empty() {
                return Err(format!("class `{}` has a method with an empty name", self.name));
            }
            let key = m.signature_key();
            if !seen.insert(key.clone()) {
                return Err(format!("duplicate method signature `{key}` in `{}`", self.name));
            }
            if let Some(pts) = &m.param_types {
                if pts.len() != m.arity {
                    return Err(format!(
                        "method `{key}` in `{}` lists {} parameter types for arity {}",
                        self.name,
                        pts.len(),
                        m.arity
                    ));
                }
            }
        }
        Ok(())
    }
}

pub fn simple_name(name: &str) -> &str {
    name.rsplit('.').next().unwrap_or(name)
}

/// Which methods and attributes take part in the cohesion computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodPolicy {
    pub include_constructors: bool,
    pub include_static_methods: bool,
    pub include_static_attributes: bool,
}

impl Default for MethodPolicy {
    fn default() -> Self {
        Self {
            include_constructors: false,
            include_static_methods: true,
            include_static_attributes: true,
        }
    }
}

impl MethodPolicy {
    /// Only instance methods and instance variables.
    pub fn strict_instance() -> Self {
        Self {
            include_static_methods: false,
            include_static_attributes: false,
            ..Self::default()
        }
    }

    pub fn counts(&self, method: &MethodModel) -> bool {
        (self.include_constructors || !method.is_constructor)
            && (self.include_static_methods || !method.is_static)
    }
}

/// Methods of `class` that take part in cohesion metrics under `policy`,
/// in declaration order.
pub fn counted_methods<'a>(class: &'a ClassModel, policy: &MethodPolicy) -> Vec<&'a MethodModel> {
    class.methods.iter().filter(|m| policy.counts(m)).collect()
}

/// A method identified by its owning class and signature key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MethodRef {
    pub class: String,
    pub signature: String,
}

impl MethodRef {
    pub fn new(class: impl Into<String>, signature: impl Into<String>) -> Self {
        Self {
            class: class.into(),
            signature: signature.into(),
        }
    }
}

impl fmt::Display for MethodRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}::{}", self.class, self.signature)
    }
}

/// Other classes a class refers to, split by whether they live in the corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeReferences {
    pub internal: BTreeSet<String>,
    pub external: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusModel {
    pub classes: BTreeMap<String, ClassModel>,
    /// Resolved in-corpus superclass per class.
    pub parents: BTreeMap<String, String>,
    /// Superclass names that do not resolve inside the corpus.
    pub external_superclasses: BTreeMap<String, String>,
    pub children: BTreeMap<String, BTreeSet<String>>,
    pub resolved_calls: BTreeMap<MethodRef, BTreeSet<MethodRef>>,
    pub references: BTreeMap<String, TypeReferences>,
    pub afferent: BTreeMap<String, BTreeSet<String>>,
}

impl CorpusModel {
    pub fn class(&self, name: &str) -> Result<&ClassModel, ModelError> {
        self.classes
            .get(name)
            .ok_or_else(|| ModelError::UnknownClass(name.to_string()))
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Ancestors of `name` inside the corpus, nearest first.
    pub fn ancestors(&self, name: &str) -> Vec<&str> {
        let mut out = Vec::new();
        let mut cur = name;
        while let Some(p) = self.parents.get(cur) {
            out.push(p.as_str());
            cur = p;
        }
        out
    }

    /// Resolves a type token written inside `context` to a corpus class.
    pub fn resolve_type(&self, token: &str, context: &str) -> Option<&str> {
        resolve_type_in(&self.classes, token, context)
    }

    /// Finds the class that implements `signature` starting at `start` and
    /// walking up the in-corpus hierarchy.
    pub fn lookup_method(&self, start: &str, signature: &str) -> Option<MethodRef> {
        std::iter::once(start)
            .chain(self.ancestors(start))
            .find(|c| {
                self.classes
                    .get(*c)
                    .is_some_and(|cls| cls.method(signature).is_some())
            })
            .map(|c| MethodRef::new(c, signature))
    }

    /// Target of `call` made from inside `from`, if it lands in the corpus.
    pub fn resolve_call(&self, from: &str, call: &Invocation) -> Option<MethodRef> {
        let start = match call.receiver.as_str() {
            RECV_THIS => from,
            RECV_SUPER => self.parents.get(from)?.as_str(),
            RECV_UNKNOWN => return None,
            token => self.resolve_type(token, from)?,
        };
        self.lookup_method(start, &call.signature_key())
    }

    /// The class with every in-corpus ancestor's attributes and non-overridden
    /// methods merged in.
    pub fn flattened(&self, name: &str) -> Result<ClassModel, ModelError> {
        let mut flat = self.class(name)?.clone();
        for anc in self.ancestors(name) {
            let anc = &self.classes[anc];
            for a in &anc.attributes {
                if flat.attribute(&a.name).is_none() {
                    flat.attributes.push(a.clone());
                }
            }
            for m in &anc.methods {
                if !m.is_constructor && flat.method(&m.signature_key()).is_none() {
                    flat.methods.push(m.clone());
                }
            }
        }
        Ok(flat)
    }
}

fn strip_type_token(token: &str) -> &str {
    let base = token.split('<').next().unwrap_or(token);
    base.trim_end_matches("...")
        .trim_end_matches("[]")
        .trim()
}

fn resolve_type_in<'a>(
    classes: &'a BTreeMap<String, ClassModel>,
    token: &str,
    context: &str,
) -> Option<&'a str> {
    let base = strip_type_token(token);
    if base.is_empty() {
        return None;
    }
    if let Some((k, _)) = classes.get_key_value(base) {
        return Some(k.as_str());
    }
    if let Some((pkg, _)) = context.rsplit_once('.') {
        let qualified = format!("{pkg}.{base}");
        if let Some((k, _)) = classes.get_key_value(qualified.as_str()) {
            return Some(k.as_str());
        }
    }
    let wanted = simple_name(base);
    let mut hits = classes.keys().filter(|k| simple_name(k) == wanted);
    match (hits.next(), hits.next()) {
        (Some(k), None) => Some(k.as_str()),
        _ => None,
    }
}

fn is_primitive(token: &str) -> bool {
    PRIMITIVES.contains(&strip_type_token(token))
}

/// Links a list of classes into a corpus.
pub fn build_corpus(classes: Vec<ClassModel>) -> Result<CorpusModel, ModelError> {
    let mut map = BTreeMap::new();
    for c in classes {
        if map.contains_key(&c.name) {
            return Err(ModelError::DuplicateClassName(c.name));
        }
        map.insert(c.name.clone(), c);
    }

    let mut parents = BTreeMap::new();
    let mut external_superclasses = BTreeMap::new();
    for (name, c) in &map {
        let Some(sup) = &c.superclass_name else { continue };
        match resolve_type_in(&map, sup, name) {
            Some(p) if p != name => {
                parents.insert(name.clone(), p.to_string());
            }
            Some(_) => return Err(ModelError::InheritanceCycle(vec![name.clone(), name.clone()])),
            None => {
                external_superclasses.insert(name.clone(), sup.clone());
            }
        }
    }

    for start in map.keys() {
        let mut path = vec![start.clone()];
        let mut cur = start;
        while let Some(p) = parents.get(cur) {
            if let Some(pos) = path.iter().position(|x| x == p) {
                let mut cycle = path[pos..].to_vec();
                cycle.push(p.clone());
                return Err(ModelError::InheritanceCycle(cycle));
            }
            path.push(p.clone());
            cur = p;
        }
    }

    let mut children: BTreeMap<String, BTreeSet<String>> =
        map.keys().map(|k| (k.clone(), BTreeSet::new())).collect();
    for (child, parent) in &parents {
        children.entry(parent.clone()).or_default().insert(child.clone());
    }

    let mut corpus = CorpusModel {
        classes: map,
        parents,
        external_superclasses,
        children,
        resolved_calls: BTreeMap::new(),
        references: BTreeMap::new(),
        afferent: BTreeMap::new(),
    };
    corpus.resolved_calls = resolve_calls(&corpus);
    corpus.references = collect_references(&corpus);
    let mut afferent: BTreeMap<String, BTreeSet<String>> = corpus
        .classes
        .keys()
        .map(|k| (k.clone(), BTreeSet::new()))
        .collect();
    for (from, refs) in &corpus.references {
        for to in &refs.internal {
            afferent.entry(to.clone()).or_default().insert(from.clone());
        }
    }
    corpus.afferent = afferent;
    Ok(corpus)
}

fn resolve_calls(corpus: &CorpusModel) -> BTreeMap<MethodRef, BTreeSet<MethodRef>> {
    let mut out = BTreeMap::new();
    for (name, class) in &corpus.classes {
        for m in &class.methods {
            let targets: BTreeSet<MethodRef> = m
                .invoked
                .iter()
                .filter_map(|call| corpus.resolve_call(name, call))
                .collect();
            out.insert(MethodRef::new(name.clone(), m.signature_key()), targets);
        }
    }
    out
}

fn collect_references(corpus: &CorpusModel) -> BTreeMap<String, TypeReferences> {
    let mut out = BTreeMap::new();
    for (name, class) in &corpus.classes {
        let mut refs = TypeReferences::default();
        let note = |token: &str, refs: &mut TypeReferences| {
            if is_primitive(token) || token == RECV_UNKNOWN {
                return;
            }
            match corpus.resolve_type(token, name) {
                Some(c) if c != name => {
                    refs.internal.insert(c.to_string());
                }
                Some(_) => {}
                None => {
                    refs.external.insert(strip_type_token(token).to_string());
                }
            }
        };
        if let Some(p) = corpus.parents.get(name) {
            refs.internal.insert(p.clone());
        }
        if let Some(ext) = corpus.external_superclasses.get(name) {
            refs.external.insert(strip_type_token(ext).to_string());
        }
        for a in &class.attributes {
            if let Some(t) = &a.type_token {
                note(t, &mut refs);
            }
        }
        for m in &class.methods {
            for t in m.param_types.iter().flatten() {
                note(t, &mut refs);
            }
            for call in &m.invoked {
                if call.receiver != RECV_THIS && call.receiver != RECV_SUPER {
                    note(&call.receiver, &mut refs);
                }
            }
            let key = MethodRef::new(name.clone(), m.signature_key());
            for target in corpus.resolved_calls.get(&key).into_iter().flatten() {
                if &target.class != name {
                    refs.internal.insert(target.class.clone());
                }
            }
        }
        out.insert(name.clone(), refs);
    }
    out
}
