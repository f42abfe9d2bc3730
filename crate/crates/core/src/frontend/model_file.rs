//! The class-model document: a JSON format that carries exactly what the
//! metrics need.
//!
//! ```json
//! {
//!   "classes": [
//!     {
//!       "name": "A",
//!       "superclass": "B",
//!       "attributes": [{ "name": "a", "static": false, "public": false }],
//!       "methods": [{
//!         "name": "m", "arity": 0, "public": true, "static": false,
//!         "constructor": false, "refs": ["a"],
//!         "calls": [{ "recv": "this", "name": "n", "arity": 0 }]
//!       }]
//!     }
//!   ]
//! }
//! ```
//!
//! `superclass`, attribute `type` and method `param_types` are optional.
//! Unknown keys are rejected.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{AttributeModel, ClassModel, Invocation, MethodModel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("schema error at {path}: {message}")]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

impl SchemaError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    classes: Vec<ClassDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassDoc {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    superclass: Option<String>,
    attributes: Vec<AttributeDoc>,
    methods: Vec<MethodDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AttributeDoc {
    name: String,
    #[serde(rename = "static")]
    is_static: bool,
    #[serde(rename = "public")]
    is_public: bool,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    type_token: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MethodDoc {
    name: String,
    arity: usize,
    #[serde(rename = "public")]
    is_public: bool,
    #[serde(rename = "static")]
    is_static: bool,
    #[serde(rename = "constructor")]
    is_constructor: bool,
    refs: Vec<String>,
    calls: Vec<CallDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    param_types: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CallDoc {
    recv: String,
    name: String,
    arity: usize,
}

pub fn load_model_file(document: &str) -> Result<Vec<ClassModel>, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(document);
    let doc: Document = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        SchemaError::new(path, e.into_inner().to_string())
    })?;

    let mut names = BTreeSet::new();
    let mut out = Vec::with_capacity(doc.classes.len());
    for (ci, c) in doc.classes.into_iter().enumerate() {
        let cpath = format!("classes[{ci}]");
        if !names.insert(c.name.clone()) {
            return Err(SchemaError::new(cpath, format!("duplicate class `{}`", c.name)));
        }
        let mut methods = Vec::with_capacity(c.methods.len());
        for (mi, m) in c.methods.into_iter().enumerate() {
            let refs: BTreeSet<String> = m.refs.iter().cloned().collect();
            if refs.len() != m.refs.len() {
                return Err(SchemaError::new(
                    format!("{cpath}.methods[{mi}].refs"),
                    "duplicate attribute reference",
                ));
            }
            methods.push(MethodModel {
                name: m.name,
                arity: m.arity,
                is_public: m.is_public,
                is_static: m.is_static,
                is_constructor: m.is_constructor,
                referenced_attributes: refs,
                invoked: m
                    .calls
                    .into_iter()
                    .map(|c| Invocation::new(c.recv, c.name, c.arity))
                    .collect(),
                param_types: m.param_types,
            });
        }
        let class = ClassModel {
            name: c.name,
            superclass_name: c.superclass,
            attributes: c
                .attributes
                .into_iter()
                .map(|a| AttributeModel {
                    name: a.name,
                    is_static: a.is_static,
                    is_public: a.is_public,
                    type_token: a.type_token,
                })
                .collect(),
            methods,
        };
        class.validate().map_err(|msg| SchemaError::new(cpath, msg))?;
        out.push(class);
    }
    Ok(out)
}

/// Canonical document: classes sorted by name, members in declaration
/// order, references sorted. Ends with a newline.
pub fn dump_model_file(classes: &[ClassModel]) -> String {
    let mut sorted: Vec<&ClassModel> = classes.iter().collect();
    sorted.sort_by(|a, b| a.name.cmp(&b.name));
    let doc = Document {
        classes: sorted
            .into_iter()
            .map(|c| ClassDoc {
                name: c.name.clone(),
                superclass: c.superclass_name.clone(),
                attributes: c
                    .attributes
                    .iter()
                    .map(|a| AttributeDoc {
                        name: a.name.clone(),
                        is_static: a.is_static,
                        is_public: a.is_public,
                        type_token: a.type_token.clone(),
                    })
                    .collect(),
                methods: c
                    .methods
                    .iter()
                    .map(|m| MethodDoc {
                        name: m.name.clone(),
                        arity: m.arity,
                        is_public: m.is_public,
                        is_static: m.is_static,
                        is_constructor: m.is_constructor,
                        refs: m.referenced_attributes.iter().cloned().collect(),
                        calls: m
                            .invoked
                            .iter()
                            .map(|c| CallDoc {
                                recv: c.receiver.clone(),
                                name: c.name.clone(),
                                arity: c.arity,
                            })
                            .collect(),
                        param_types: m.param_types.clone(),
                    })
                    .collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("document serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
  "classes": [
    {
      "name": "A",
      "attributes": [{"name": "a", "static": false, "public": false}],
      "methods": [
        {"name": "m", "arity": 0, "public": true, "static": false, "constructor": false,
         "refs": ["a"], "calls": [{"recv": "this", "name": "n", "arity": 1}]}
      ]
    }
  ]
}"#;

    #[test]
    fn loads_minimal_document() {
        let cs = load_model_file(MINIMAL).unwrap();
        assert_eq!(cs.len(), 1);
        let m = &cs[0].methods[0];
        assert_eq!(m.signature_key(), "m/0");
        assert!(m.referenced_attributes.contains("a"));
        assert_eq!(m.invoked, vec![Invocation::new("this", "n", 1)]);
    }

    #[test]
    fn empty_corpus() {
        assert_eq!(dump_model_file(&[]), "{\n  \"classes\": []\n}\n");
        assert!(load_model_file(&dump_model_file(&[])).unwrap().is_empty());
    }

    #[test]
    fn duplicate_signature_rejected() {
        let doc = r#"{"classes": [{"name": "A", "attributes": [], "methods": [
            {"name": "m", "arity": 1, "public": true, "static": false, "constructor": false, "refs": [], "calls": []},
            {"name": "m", "arity": 1, "public": false, "static": false, "constructor": false, "refs": [], "calls": []}
        ]}]}"#;
        let err = load_model_file(doc).unwrap_err();
        assert_eq!(err.path, "classes[0]");
        assert!(err.message.contains("m/1"));
    }

    #[test]
    fn unknown_key_rejected_with_path() {
        let doc = r#"{"classes": [{"name": "A", "attributes": [], "methods": [], "extra": 1}]}"#;
        let err = load_model_file(doc).unwrap_err();
        assert!(err.path.starts_with("classes[0]"), "{}", err.path);
        assert!(err.message.contains("extra"));
    }

    #[test]
    fn missing_key_rejected() {
        let err = load_model_file(r#"{"classes": [{"name": "A", "methods": []}]}"#).unwrap_err();
        assert!(err.message.contains("attributes"));
    }

    #[test]
    fn dump_normalizes() {
        let doc = r#"{"classes": [
            {"name": "Z", "attributes": [], "methods": [
                {"name": "m", "arity": 0, "public": true, "static": false, "constructor": false, "refs": ["b", "a"], "calls": []}]},
            {"name": "B", "superclass": "Z", "attributes": [{"name": "x", "static": true, "public": false, "type": "int"}], "methods": []}
        ]}"#;
        let once = dump_model_file(&load_model_file(doc).unwrap());
        let names: Vec<_> = load_model_file(&once).unwrap().into_iter().map(|c| c.name).collect();
        assert_eq!(names, ["B", "Z"]);
        assert!(once.find("\"a\"").unwrap() < once.find("\"b\"").unwrap());
        assert_eq!(dump_model_file(&load_model_file(&once).unwrap()), once);
    }
}
