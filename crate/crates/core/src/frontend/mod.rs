//! Turns input files into [`ClassModel`]s: a recursive-descent parser for a
//! Java-like source subset, and the JSON class-model document format.

mod body;
mod lexer;
mod model_file;
mod parser;

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::model::ClassModel;

pub use model_file::{dump_model_file, load_model_file, SchemaError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceUnit {
    pub path: PathBuf,
    pub text: String,
}

impl SourceUnit {
    pub fn new(path: impl Into<PathBuf>, text: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    pub path: String,
    pub line: usize,
    pub column: usize,
    pub severity: Severity,
    pub message: String,
}

impl ParseDiagnostic {
    pub fn new(
        path: impl Into<String>,
        line: usize,
        column: usize,
        severity: Severity,
        message: impl Into<String>,
    ) -> Self {
        Self {
            path: path.into(),
            line,
            column,
            severity,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}:{}: {sev}: {}", self.path, self.line, self.column, self.message)
    }
}

/// Parses one source file. Never fails: problems are reported as
/// diagnostics, and a unit whose tokens or braces are broken yields no
/// classes at all.
pub fn parse_source(unit: &SourceUnit) -> (Vec<ClassModel>, Vec<ParseDiagnostic>) {
    parser::parse(unit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RECV_THIS;

    fn parse(text: &str) -> (Vec<ClassModel>, Vec<ParseDiagnostic>) {
        parse_source(&SourceUnit::new("T.java", text))
    }

    #[test]
    fn single_field_reference() {
        let (cs, ds) = parse("class A { int a; void m(){ a = 1; } }");
        assert!(ds.is_empty(), "{ds:?}");
        assert_eq!(cs.len(), 1);
        let a = &cs[0];
        assert_eq!(a.name, "A");
        assert_eq!(a.attributes[0].name, "a");
        assert_eq!(a.methods[0].referenced_attributes.iter().collect::<Vec<_>>(), ["a"]);
    }

    #[test]
    fn parameter_shadowing() {
        let (cs, _) = parse("class A { int a; void m(int a){ a = 1; } }");
        assert!(cs[0].methods[0].referenced_attributes.is_empty());
        assert_eq!(cs[0].methods[0].arity, 1);
    }

    #[test]
    fn extends_and_self_call() {
        let (cs, ds) = parse("class B extends A { void g(){ this.h(); } void h(){} }");
        assert!(ds.is_empty(), "{ds:?}");
        let b = &cs[0];
        assert_eq!(b.superclass_name.as_deref(), Some("A"));
        let g = b.method("g/0").unwrap();
        assert_eq!(g.invoked.len(), 1);
        assert_eq!((g.invoked[0].receiver.as_str(), g.invoked[0].name.as_str()), (RECV_THIS, "h"));
    }

    #[test]
    fn package_qualifies_names() {
        let (cs, _) = parse("package app.core;\nimport java.util.List;\npublic class Svc extends Base<String> implements Runnable { }");
        assert_eq!(cs[0].name, "app.core.Svc");
        assert_eq!(cs[0].superclass_name.as_deref(), Some("Base"));
    }

    #[test]
    fn modifiers_and_constructors() {
        let src = r#"
            public class Account {
                private static int count;
                public final String id, owner;
                @Deprecated public Account(String id) { this.id = id; count++; }
                public static int total() { return count; }
                protected <T> List<T> wrap(T... xs) { return null; }
                abstract void hook();
            }"#;
        let (cs, ds) = parse(src);
        assert!(ds.is_empty(), "{ds:?}");
        let c = &cs[0];
        let names: Vec<_> = c.attributes.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, ["count", "id", "owner"]);
        assert!(c.attributes[0].is_static && !c.attributes[0].is_public);
        assert!(c.attributes[1].is_public);
        let ctor = c.method("Account/1").unwrap();
        assert!(ctor.is_constructor && ctor.is_public);
        assert_eq!(ctor.referenced_attributes.iter().collect::<Vec<_>>(), ["count", "id"]);
        let total = c.method("total/0").unwrap();
        assert!(total.is_static && total.is_public);
        assert_eq!(c.method("wrap/1").unwrap().param_types.as_deref(), Some(&["T...".to_string()][..]));
        assert!(c.method("hook/0").is_some());
    }

    #[test]
    fn comments_and_strings_are_ignored() {
        let (cs, _) = parse("class A { int a; int b; void m() { /* a */ String s = \"b\"; // b\n } }");
        assert!(cs[0].methods[0].referenced_attributes.is_empty());
    }

    #[test]
    fn nested_class_warns_and_is_skipped() {
        let (cs, ds) = parse("class A { int a; class Inner { void x() { a++; } } void m() { a++; } }");
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].methods.len(), 1);
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].severity, Severity::Warning);
    }

    #[test]
    fn bad_member_is_skipped() {
        let (cs, ds) = parse("class A { int a; void m(int) { } void n() { a++; } }");
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].methods.len(), 1);
        assert!(ds.iter().any(ParseDiagnostic::is_error));
    }

    #[test]
    fn bad_class_header_drops_only_that_class() {
        let (cs, ds) = parse("class Broken extends { void m() {} }\nclass Good { void n() {} }");
        assert_eq!(cs.iter().map(|c| c.name.as_str()).collect::<Vec<_>>(), ["Good"]);
        assert_eq!(ds.len(), 1);
        assert_eq!((ds[0].line, ds[0].severity), (1, Severity::Error));
    }

    #[test]
    fn unbalanced_unit_is_fatal() {
        let (cs, ds) = parse("class A { void m() { }");
        assert!(cs.is_empty());
        assert_eq!(ds.len(), 1);
        assert!(ds[0].is_error());
        let (cs, ds) = parse("class A { String s = \"oops; }");
        assert!(cs.is_empty());
        assert!(ds[0].is_error());
    }

    #[test]
    fn interface_is_skipped_with_warning() {
        let (cs, ds) = parse("interface I { void m(); } class C { }");
        assert_eq!(cs.len(), 1);
        assert_eq!(ds[0].severity, Severity::Warning);
    }

    #[test]
    fn same_arity_overloads_merge() {
        let (cs, ds) = parse("class A { int a; int b; void m(int x) { a++; } void m(String s) { b++; } }");
        assert_eq!(cs[0].methods.len(), 1);
        assert_eq!(cs[0].methods[0].referenced_attributes.len(), 2);
        assert_eq!(ds.len(), 1);
        let (cs, _) = parse("class A { void m() {} void m(int x) {} }");
        assert_eq!(cs[0].methods.len(), 2);
    }

    #[test]
    fn references_only_name_declared_fields() {
        let (cs, _) = parse("class A extends B { int own; void m() { own++; inherited++; this.other = 1; } }");
        let refs: Vec<_> = cs[0].methods[0].referenced_attributes.iter().collect();
        assert_eq!(refs, ["own"]);
    }

    #[test]
    fn diagnostic_display() {
        let d = ParseDiagnostic::new("a/B.java", 3, 7, Severity::Error, "boom");
        assert_eq!(d.to_string(), "a/B.java:3:7: error: boom");
    }

    #[test]
    fn parsing_is_deterministic() {
        let src = "class A { int a; int b; void m() { a++; b(); } void b() { } }";
        assert_eq!(parse(src), parse(src));
    }
}
