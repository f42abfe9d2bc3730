//! Recursive-descent parser for class declarations and their members.
//!
//! The grammar is deliberately narrow: package and import lines, top-level
//! `class` declarations with optional `extends`, field declarations, and
//! constructors/methods with bodies. Method bodies are handed to
//! [`super::body`] for reference extraction.

use std::collections::BTreeMap;

use super::body::{analyze_body, BodyContext, FieldInfo};
use super::lexer::{tokenize, Token};
use super::{ParseDiagnostic, Severity, SourceUnit};
use crate::model::{AttributeModel, ClassModel, MethodModel};

const MODIFIERS: &[&str] = &[
    "public", "protected", "private", "static", "final", "abstract", "native", "synchronized",
    "transient", "volatile", "strictfp", "default", "sealed", "non",
];

const OTHER_TYPE_DECLS: &[&str] = &["interface", "enum", "record"];

#[derive(Debug)]
struct Failure {
    at: usize,
    message: String,
}

type PResult<T> = Result<T, Failure>;

#[derive(Debug, Default, Clone, Copy)]
struct Modifiers {
    public: bool,
    is_static: bool,
}

struct MethodDecl {
    model: MethodModel,
    params: Vec<(String, String)>,
    body: Option<(usize, usize)>,
}

pub(crate) struct Parser<'a> {
    path: &'a str,
    toks: Vec<Token>,
    pos: usize,
    package: Option<String>,
    pub(crate) diagnostics: Vec<ParseDiagnostic>,
    eof_position: (usize, usize),
}

pub(crate) fn parse(unit: &SourceUnit) -> (Vec<ClassModel>, Vec<ParseDiagnostic>) {
    let path = unit.path.display().to_string();
    let toks = match tokenize(&unit.text) {
        Ok(t) => t,
        Err(e) => {
            let d = ParseDiagnostic::new(&path, e.line, e.column, Severity::Error, e.message);
            return (Vec::new(), vec![d]);
        }
    };
    let eof_position = last_position(&unit.text);
    if let Some((line, column, message)) = unbalanced(&toks) {
        let d = ParseDiagnostic::new(&path, line, column, Severity::Error, message);
        return (Vec::new(), vec![d]);
    }
    let mut parser = Parser {
        path: &path,
        toks,
        pos: 0,
        package: None,
        diagnostics: Vec::new(),
        eof_position,
    };
    let classes = parser.compilation_unit();
    (classes, parser.diagnostics)
}

/// Position of the last character of the text (1-based).
fn last_position(text: &str) -> (usize, usize) {
    let mut line = 1;
    let mut column = 0;
    for c in text.chars() {
        if c == '\n' {
            line += 1;
            column = 0;
        } else {
            column += 1;
        }
    }
    if column == 0 && line > 1 {
        let prev = text.trim_end_matches('\n');
        let prev_line = prev.lines().last().map_or(0, |l| l.chars().count());
        return (prev.lines().count().max(1), prev_line.max(1));
    }
    (line, column.max(1))
}

fn unbalanced(toks: &[Token]) -> Option<(usize, usize, String)> {
    let mut stack: Vec<&Token> = Vec::new();
    for t in toks {
        if t.is("{") || t.is("(") || t.is("[") {
            stack.push(t);
        } else if t.is("}") || t.is(")") || t.is("]") {
            let want = match t.text() {
                "}" => "{",
                ")" => "(",
                _ => "[",
            };
            match stack.pop() {
                Some(open) if open.is(want) => {}
                Some(open) => {
                    return Some((t.line, t.column, format!("`{}` does not close `{}` opened at {}:{}", t.text(), open.text(), open.line, open.column)))
                }
                None => return Some((t.line, t.column, format!("unmatched `{}`", t.text()))),
            }
        }
    }
    stack
        .pop()
        .map(|open| (open.line, open.column, format!("`{}` is never closed", open.text())))
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, ahead: usize) -> Option<&Token> {
        self.toks.get(self.pos + ahead)
    }

    fn at(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is(p))
    }

    fn at_word(&self, w: &str) -> bool {
        self.peek().is_some_and(|t| t.is_word(w))
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.at(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn fail<T>(&self, message: impl Into<String>) -> PResult<T> {
        Err(Failure {
            at: self.pos,
            message: message.into(),
        })
    }

    fn expect(&mut self, p: &str) -> PResult<()> {
        if self.eat(p) {
            Ok(())
        } else {
            let found = self.peek().map_or("end of file".to_string(), |t| format!("`{}`", t.text()));
            self.fail(format!("expected `{p}`, found {found}"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().and_then(Token::ident) {
            Some(w) if !is_reserved(w) => {
                let w = w.to_string();
                self.pos += 1;
                Ok(w)
            }
            _ => {
                let found = self.peek().map_or("end of file".to_string(), |t| format!("`{}`", t.text()));
                self.fail(format!("expected identifier, found {found}"))
            }
        }
    }

    fn position(&self, at: usize) -> (usize, usize) {
        self.toks
            .get(at)
            .map_or(self.eof_position, |t| (t.line, t.column))
    }

    fn diag(&mut self, at: usize, severity: Severity, message: impl Into<String>) {
        let (line, column) = self.position(at);
        self.diagnostics
            .push(ParseDiagnostic::new(self.path, line, column, severity, message));
    }

    /// Index of the token closing the group opened at `open`.
    fn matching(&self, open: usize) -> usize {
        let (o, c) = match self.toks[open].text() {
            "{" => ("{", "}"),
            "(" => ("(", ")"),
            "[" => ("[", "]"),
            _ => ("<", ">"),
        };
        let mut depth = 0usize;
        for (i, t) in self.toks.iter().enumerate().skip(open) {
            if t.is(o) {
                depth += 1;
            } else if t.is(c) {
                depth -= 1;
                if depth == 0 {
                    return i;
                }
            }
        }
        self.toks.len()
    }

    fn skip_group(&mut self) {
        self.pos = self.matching(self.pos) + 1;
    }

    /// Skips forward past the next `;` or brace group at the current level,
    /// stopping before an unmatched `}`.
    fn recover(&mut self) {
        while let Some(t) = self.peek() {
            if t.is(";") {
                self.pos += 1;
                return;
            }
            if t.is("}") {
                return;
            }
            if t.is("{") {
                self.skip_group();
                return;
            }
            if t.is("(") || t.is("[") {
                self.skip_group();
                continue;
            }
            self.pos += 1;
        }
    }

    fn compilation_unit(&mut self) -> Vec<ClassModel> {
        let mut classes = Vec::new();
        while self.peek().is_some() {
            let start = self.pos;
            if self.eat(";") {
                continue;
            }
            if self.at_word("package") {
                self.pos += 1;
                match self.qualified_name() {
                    Ok(name) => {
                        self.package = Some(name);
                        if let Err(f) = self.expect(";") {
                            self.report(f);
                            self.recover();
                        }
                    }
                    Err(f) => {
                        self.report(f);
                        self.recover();
                    }
                }
                continue;
            }
            if self.at_word("import") {
                while self.peek().is_some() && !self.eat(";") {
                    self.pos += 1;
                }
                continue;
            }
            self.modifiers();
            if self.at_word("class") {
                match self.class_declaration() {
                    Ok(Some(c)) => classes.push(c),
                    Ok(None) => {}
                    Err(f) => {
                        self.report(f);
                        self.skip_declaration();
                    }
                }
            } else if self.peek().is_some_and(|t| OTHER_TYPE_DECLS.iter().any(|w| t.is_word(w)))
                || self.at("@")
            {
                let kind = self.peek().map(|t| t.text().to_string()).unwrap_or_default();
                self.diag(self.pos, Severity::Warning, format!("`{kind}` declarations are not analyzed; skipped"));
                self.skip_declaration();
            } else {
                let found = self.peek().map_or(String::new(), |t| t.text().to_string());
                self.diag(start.max(self.pos), Severity::Error, format!("expected a class declaration, found `{found}`"));
                self.recover();
                if self.at("}") {
                    self.pos += 1;
                }
            }
        }
        classes
    }

    fn report(&mut self, f: Failure) {
        self.diag(f.at, Severity::Error, f.message);
    }

    /// Skips to the end of the next brace group (or `;`) from here.
    fn skip_declaration(&mut self) {
        while let Some(t) = self.peek() {
            if t.is("{") {
                self.skip_group();
                return;
            }
            if t.is(";") {
                self.pos += 1;
                return;
            }
            self.pos += 1;
        }
    }

    fn qualified_name(&mut self) -> PResult<String> {
        let mut name = self.ident()?;
        while self.at(".") && self.peek_at(1).and_then(Token::ident).is_some() {
            self.pos += 1;
            name.push('.');
            name.push_str(&self.ident()?);
        }
        Ok(name)
    }

    fn annotation(&mut self) -> PResult<()> {
        self.expect("@")?;
        self.qualified_name()?;
        if self.at("(") {
            self.skip_group();
        }
        Ok(())
    }

    fn modifiers(&mut self) -> Modifiers {
        let mut m = Modifiers::default();
        loop {
            if self.at("@") && !self.peek_at(1).is_some_and(|t| t.is_word("interface")) {
                if self.annotation().is_err() {
                    return m;
                }
                continue;
            }
            let Some(word) = self.peek().and_then(Token::ident) else {
                return m;
            };
            if !MODIFIERS.contains(&word) {
                return m;
            }
            if word == "non" {
                // non-sealed
                if self.peek_at(1).is_some_and(|t| t.is("-")) && self.peek_at(2).is_some_and(|t| t.is_word("sealed")) {
                    self.pos += 3;
                    continue;
                }
                return m;
            }
            match word {
                "public" => m.public = true,
                "static" => m.is_static = true,
                _ => {}
            }
            self.pos += 1;
        }
    }

    /// A type token: qualified name, optional type arguments, array dims.
    fn type_token(&mut self) -> PResult<String> {
        let mut text = match self.peek().and_then(Token::ident) {
            Some(w) if !is_reserved(w) || is_primitive(w) => w.to_string(),
            _ => return self.fail("expected a type"),
        };
        self.pos += 1;
        while self.at(".") && self.peek_at(1).and_then(Token::ident).is_some() {
            self.pos += 1;
            text.push('.');
            text.push_str(self.peek().and_then(Token::ident).unwrap_or_default());
            self.pos += 1;
        }
        if self.at("<") {
            let close = self.matching(self.pos);
            if close >= self.toks.len() {
                return self.fail("unclosed type arguments");
            }
            text.push_str(&join_tokens(&self.toks[self.pos..=close]));
            self.pos = close + 1;
        }
        while self.at("[") && self.peek_at(1).is_some_and(|t| t.is("]")) {
            self.pos += 2;
            text.push_str("[]");
        }
        Ok(text)
    }

    fn class_declaration(&mut self) -> PResult<Option<ClassModel>> {
        self.pos += 1; // `class`
        let simple = self.ident()?;
        if self.at("<") {
            self.skip_group();
        }
        let mut superclass = None;
        if self.at_word("extends") {
            self.pos += 1;
            let t = self.type_token()?;
            superclass = Some(t.split('<').next().unwrap_or(&t).to_string());
        }
        if self.at_word("implements") {
            self.pos += 1;
            self.type_token()?;
            while self.eat(",") {
                self.type_token()?;
            }
        }
        if self.at_word("permits") {
            self.pos += 1;
            self.type_token()?;
            while self.eat(",") {
                self.type_token()?;
            }
        }
        if !self.at("{") {
            return self.fail(format!("malformed header for class `{simple}`: expected `{{`"));
        }
        let close = self.matching(self.pos);
        self.pos += 1;

        let name = match &self.package {
            Some(p) => format!("{p}.{simple}"),
            None => simple.clone(),
        };
        let mut class = ClassModel::new(name);
        class.superclass_name = superclass;
        let mut decls: Vec<(MethodDecl, usize)> = Vec::new();

        while self.pos < close {
            let start = self.pos;
            match self.member(&simple, &mut class, &mut decls) {
                Ok(()) => {}
                Err(f) => {
                    self.report(f);
                    self.pos = start;
                    self.recover();
                    if self.pos == start {
                        self.pos += 1;
                    }
                }
            }
        }
        self.pos = close + 1;

        let fields: BTreeMap<String, FieldInfo> = class
            .attributes
            .iter()
            .map(|a| {
                (
                    a.name.clone(),
                    FieldInfo {
                        type_token: a.type_token.clone(),
                    },
                )
            })
            .collect();
        for (mut decl, at) in decls {
            if let Some((open, close)) = decl.body {
                let ctx = BodyContext {
                    class_simple_name: &simple,
                    fields: &fields,
                    params: &decl.params,
                };
                let analysis = analyze_body(&self.toks[open + 1..close], &ctx);
                for w in analysis.warnings {
                    self.diag(open + 1 + w.at, Severity::Warning, w.message);
                }
                decl.model.referenced_attributes = analysis.references;
                decl.model.invoked = analysis.invocations;
            }
            let key = decl.model.signature_key();
            if let Some(existing) = class.methods.iter_mut().find(|m| m.signature_key() == key) {
                self.diag(
                    at,
                    Severity::Warning,
                    format!("overloads of `{key}` share an arity; merged into one method"),
                );
                existing.referenced_attributes.extend(decl.model.referenced_attributes);
                for call in decl.model.invoked {
                    if !existing.invoked.contains(&call) {
                        existing.invoked.push(call);
                    }
                }
                existing.param_types = None;
            } else {
                class.methods.push(decl.model);
            }
        }
        Ok(Some(class))
    }

    fn member(
        &mut self,
        simple: &str,
        class: &mut ClassModel,
        decls: &mut Vec<(MethodDecl, usize)>,
    ) -> PResult<()> {
        if self.eat(";") {
            return Ok(());
        }
        let start = self.pos;
        let mods = self.modifiers();
        if self.at("{") {
            // initializer block
            self.skip_group();
            return Ok(());
        }
        if self.peek().is_some_and(|t| t.is_word("class") || OTHER_TYPE_DECLS.iter().any(|w| t.is_word(w)))
            || self.at("@")
        {
            self.diag(self.pos, Severity::Warning, "nested type declaration skipped");
            self.skip_declaration();
            return Ok(());
        }
        if self.at("<") {
            self.skip_group();
        }
        let is_ctor = self.peek().is_some_and(|t| t.is_word(simple)) && self.peek_at(1).is_some_and(|t| t.is("("));
        if is_ctor {
            self.pos += 1;
            let decl = self.method_rest(simple.to_string(), mods, true)?;
            decls.push((decl, start));
            return Ok(());
        }
        let ty = self.type_token()?;
        let name = self.ident()?;
        if self.at("(") {
            let decl = self.method_rest(name, mods, false)?;
            decls.push((decl, start));
            return Ok(());
        }
        self.field_declarators(class, mods, &ty, name, start)
    }

    fn field_declarators(
        &mut self,
        class: &mut ClassModel,
        mods: Modifiers,
        ty: &str,
        first: String,
        start: usize,
    ) -> PResult<()> {
        let mut name = first;
        loop {
            let mut this_ty = ty.to_string();
            while self.at("[") && self.peek_at(1).is_some_and(|t| t.is("]")) {
                self.pos += 2;
                this_ty.push_str("[]");
            }
            if self.eat("=") {
                self.skip_initializer();
            }
            if class.attribute(&name).is_some() {
                self.diag(start, Severity::Warning, format!("duplicate field `{name}` ignored"));
            } else {
                class.attributes.push(AttributeModel {
                    name: name.clone(),
                    is_static: mods.is_static,
                    is_public: mods.public,
                    type_token: Some(this_ty),
                });
            }
            if self.eat(",") {
                name = self.ident()?;
                continue;
            }
            return self.expect(";");
        }
    }

    fn skip_initializer(&mut self) {
        while let Some(t) = self.peek() {
            if t.is(",") || t.is(";") || t.is("}") {
                return;
            }
            if t.is("(") || t.is("{") || t.is("[") {
                self.skip_group();
            } else {
                self.pos += 1;
            }
        }
    }

    fn method_rest(&mut self, name: String, mods: Modifiers, is_ctor: bool) -> PResult<MethodDecl> {
        self.expect("(")?;
        let mut params = Vec::new();
        if !self.eat(")") {
            loop {
                self.modifiers();
                let mut ty = self.type_token()?;
                if self.eat("...") {
                    ty.push_str("...");
                }
                let pname = if self.at_word("this") {
                    self.pos += 1;
                    "this".to_string()
                } else {
                    self.ident()?
                };
                while self.at("[") && self.peek_at(1).is_some_and(|t| t.is("]")) {
                    self.pos += 2;
                    ty.push_str("[]");
                }
                if pname != "this" {
                    params.push((pname, ty));
                }
                if self.eat(",") {
                    continue;
                }
                self.expect(")")?;
                break;
            }
        }
        while self.at("[") && self.peek_at(1).is_some_and(|t| t.is("]")) {
            self.pos += 2;
        }
        if self.at_word("throws") {
            self.pos += 1;
            self.type_token()?;
            while self.eat(",") {
                self.type_token()?;
            }
        }
        let body = if self.at("{") {
            let open = self.pos;
            let close = self.matching(open);
            self.pos = close + 1;
            Some((open, close))
        } else if self.at_word("default") {
            self.pos += 1;
            self.skip_initializer();
            self.expect(";")?;
            None
        } else {
            self.expect(";")?;
            None
        };
        let mut model = MethodModel::new(name, params.len());
        model.is_public = mods.public;
        model.is_static = mods.is_static;
        model.is_constructor = is_ctor;
        model.param_types = Some(params.iter().map(|(_, t)| t.clone()).collect());
        Ok(MethodDecl { model, params, body })
    }
}

pub(crate) fn is_primitive(w: &str) -> bool {
    matches!(
        w,
        "boolean" | "byte" | "char" | "short" | "int" | "long" | "float" | "double" | "void"
    )
}

pub(crate) fn is_reserved(w: &str) -> bool {
    matches!(
        w,
        "abstract" | "assert" | "boolean" | "break" | "byte" | "case" | "catch" | "char" | "class"
            | "const" | "continue" | "default" | "do" | "double" | "else" | "enum" | "extends"
            | "final" | "finally" | "float" | "for" | "goto" | "if" | "implements" | "import"
            | "instanceof" | "int" | "interface" | "long" | "native" | "new" | "package"
            | "private" | "protected" | "public" | "return" | "short" | "static" | "strictfp"
            | "super" | "switch" | "synchronized" | "this" | "throw" | "throws" | "transient"
            | "try" | "void" | "volatile" | "while" | "true" | "false" | "null" | "yield"
    )
}

/// Concatenates token text, keeping a space between adjacent words.
pub(crate) fn join_tokens(toks: &[Token]) -> String {
    let mut out = String::new();
    let mut prev_word = false;
    for t in toks {
        let word = t.ident().is_some();
        if word && prev_word {
            out.push(' ');
        }
        out.push_str(t.text());
        prev_word = word;
    }
    out
}
