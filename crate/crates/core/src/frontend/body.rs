//! Attribute-reference and call extraction from a method body.
//!
//! A bare identifier counts as an attribute reference when it names a field
//! of the enclosing class and no parameter or local declared so far in an
//! enclosing scope shadows it. `this.x` and `Owner.x` always count.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::lexer::Token;
use super::parser::{is_primitive, is_reserved, join_tokens};
use crate::model::{Invocation, RECV_SUPER, RECV_THIS, RECV_UNKNOWN};

pub(crate) struct FieldInfo {
    pub type_token: Option<String>,
}

pub(crate) struct BodyContext<'a> {
    pub class_simple_name: &'a str,
    pub fields: &'a BTreeMap<String, FieldInfo>,
    pub params: &'a [(String, String)],
}

pub(crate) struct BodyWarning {
    /// Token index relative to the analyzed slice.
    pub at: usize,
    pub message: String,
}

#[derive(Default)]
pub(crate) struct BodyAnalysis {
    pub references: BTreeSet<String>,
    pub invocations: Vec<Invocation>,
    pub warnings: Vec<BodyWarning>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Close {
    /// Popped by its matching `}`.
    Brace,
    /// `for`/`catch`/`try` header, still inside its parentheses.
    Header { paren: usize },
    /// Header or lambda waiting to see whether a block follows.
    AwaitBody { lambda: bool },
    /// Popped together with the block that follows it.
    WithBlock,
    /// Popped at the end of the single statement that follows.
    Statement { paren: usize },
    /// Expression-bodied lambda.
    Expression { paren: usize },
}

struct Scope {
    vars: HashMap<String, Option<String>>,
    close: Close,
    brace: usize,
}

struct Analyzer<'t, 'c> {
    toks: &'t [Token],
    ctx: &'c BodyContext<'c>,
    scopes: Vec<Scope>,
    brace: usize,
    paren: usize,
    /// Token indices that declare a name rather than use one.
    declaring: BTreeSet<usize>,
    /// Active multi-declarator statement: (brace depth, paren depth, type).
    declarators: Option<(usize, usize, String)>,
    out: BodyAnalysis,
}

pub(crate) fn analyze_body(toks: &[Token], ctx: &BodyContext<'_>) -> BodyAnalysis {
    let params = ctx
        .params
        .iter()
        .map(|(n, t)| (n.clone(), Some(t.clone())))
        .collect();
    let mut a = Analyzer {
        toks,
        ctx,
        scopes: vec![Scope {
            vars: params,
            close: Close::Brace,
            brace: 0,
        }],
        brace: 0,
        paren: 0,
        declaring: lambda_parameters(toks),
        declarators: None,
        out: BodyAnalysis::default(),
    };
    a.run();
    a.out
}

fn word(t: Option<&Token>) -> Option<&str> {
    t.and_then(Token::ident)
}

fn is_name(t: Option<&Token>) -> bool {
    word(t).is_some_and(|w| !is_reserved(w))
}

/// Index of the token closing the group opened at `open`, if any.
fn matching(toks: &[Token], open: usize) -> Option<usize> {
    let (o, c) = match toks[open].text() {
        "{" => ("{", "}"),
        "(" => ("(", ")"),
        "[" => ("[", "]"),
        "<" => ("<", ">"),
        _ => return None,
    };
    let mut depth = 0usize;
    for (i, t) in toks.iter().enumerate().skip(open) {
        if t.is(o) {
            depth += 1;
        } else if t.is(c) {
            depth -= 1;
            if depth == 0 {
                return Some(i);
            }
        }
    }
    None
}

/// Index of the token opening the group closed at `close`.
fn matching_back(toks: &[Token], close: usize) -> Option<usize> {
    let (o, c) = match toks[close].text() {
        "}" => ("{", "}"),
        ")" => ("(", ")"),
        ">" => ("<", ">"),
        _ => return None,
    };
    let mut depth = 0usize;
    for i in (0..=close).rev() {
        if toks[i].is(c) {
            depth += 1;
        } else if toks[i].is(o) {
            depth -= 1;
            if depth == 0 {
                return Some(i);
            }
        }
    }
    None
}

/// Parameter-name tokens of every lambda in the body.
fn lambda_parameters(toks: &[Token]) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for (k, t) in toks.iter().enumerate() {
        if !t.is("->") || k == 0 {
            continue;
        }
        let prev = k - 1;
        if is_name(toks.get(prev)) {
            // `case X ->` is a switch arm, not a lambda
            if prev > 0 && toks[prev - 1].is_word("case") || prev > 0 && toks[prev - 1].is(",") {
                continue;
            }
            out.insert(prev);
        } else if toks[prev].is(")") {
            let Some(open) = matching_back(toks, prev) else { continue };
            for i in open + 1..prev {
                if is_name(toks.get(i)) && (toks[i + 1].is(",") || toks[i + 1].is(")")) {
                    out.insert(i);
                }
            }
        }
    }
    out
}

/// Tokens allowed inside type arguments.
fn type_argument_token(t: &Token) -> bool {
    t.ident().is_some_and(|w| !is_reserved(w) || is_primitive(w) || w == "extends" || w == "super")
        || [".", ",", "?", "[", "]", "<", ">", "&"].iter().any(|p| t.is(p))
}

impl<'t, 'c> Analyzer<'t, 'c> {
    fn tok(&self, i: usize) -> Option<&'t Token> {
        self.toks.get(i)
    }

    fn lookup(&self, name: &str) -> Option<&Option<String>> {
        self.scopes.iter().rev().find_map(|s| s.vars.get(name))
    }

    fn declare(&mut self, name: &str, ty: Option<String>) {
        if let Some(s) = self.scopes.last_mut() {
            s.vars.insert(name.to_string(), ty);
        }
    }

    fn is_field(&self, name: &str) -> bool {
        self.ctx.fields.contains_key(name)
    }

    fn warn(&mut self, at: usize, message: impl Into<String>) {
        self.out.warnings.push(BodyWarning {
            at,
            message: message.into(),
        });
    }

    /// Parses a type starting at `i`; returns the index after it and its text.
    fn type_at(&self, i: usize) -> Option<(usize, String)> {
        let first = word(self.tok(i))?;
        if is_reserved(first) && !is_primitive(first) {
            return None;
        }
        let mut j = i + 1;
        while self.tok(j).is_some_and(|t| t.is(".")) && is_name(self.tok(j + 1)) {
            j += 2;
        }
        if self.tok(j).is_some_and(|t| t.is("<")) {
            let mut depth = 0usize;
            loop {
                let t = self.tok(j)?;
                if !type_argument_token(t) {
                    return None;
                }
                if t.is("<") {
                    depth += 1;
                } else if t.is(">") {
                    depth -= 1;
                    if depth == 0 {
                        j += 1;
                        break;
                    }
                }
                j += 1;
            }
        }
        while self.tok(j).is_some_and(|t| t.is("[")) && self.tok(j + 1).is_some_and(|t| t.is("]")) {
            j += 2;
        }
        if self.tok(j).is_some_and(|t| t.is("...")) {
            j += 1;
        }
        Some((j, join_tokens(&self.toks[i..j])))
    }

    /// Recognizes `Type name` followed by `=`, `;`, `,`, `:`, `)` or `[`.
    fn local_declaration(&self, i: usize) -> Option<(usize, String)> {
        if i > 0 {
            let prev = &self.toks[i - 1];
            if prev.is(".") || prev.is("::") || prev.is_word("new") || is_name(Some(prev)) {
                return None;
            }
        }
        let (end, ty) = self.type_at(i)?;
        if !is_name(self.tok(end)) {
            return None;
        }
        let follow = self.tok(end + 1)?;
        ["=", ";", ",", ":", ")", "["]
            .iter()
            .any(|p| follow.is(p))
            .then_some((end, ty))
    }

    fn arity(&self, open: usize) -> usize {
        let Some(close) = matching(self.toks, open) else { return 0 };
        if close == open + 1 {
            return 0;
        }
        let mut depth = 0usize;
        let mut commas = 0;
        for t in &self.toks[open + 1..close] {
            if t.is("(") || t.is("{") || t.is("[") {
                depth += 1;
            } else if t.is(")") || t.is("}") || t.is("]") {
                depth -= 1;
            } else if t.is(",") && depth == 0 {
                commas += 1;
            }
        }
        commas + 1
    }

    /// Start of a dotted name chain ending at `i`.
    fn chain_start(&self, mut i: usize) -> usize {
        while i >= 2 && self.toks[i - 1].is(".") && is_name(self.tok(i - 2)) {
            i -= 2;
        }
        i
    }

    fn receiver_hint(&self, name_at: usize) -> String {
        if name_at == 0 || !self.toks[name_at - 1].is(".") {
            return RECV_THIS.to_string();
        }
        if name_at < 2 {
            return RECV_UNKNOWN.to_string();
        }
        let recv = &self.toks[name_at - 2];
        let qualified = name_at >= 3 && self.toks[name_at - 3].is(".");
        if qualified {
            // this.field.m()
            let via_this = name_at >= 4
                && self.toks[name_at - 4].is_word("this")
                && !(name_at >= 5 && self.toks[name_at - 5].is("."));
            return recv
                .ident()
                .filter(|_| via_this)
                .and_then(|f| self.ctx.fields.get(f))
                .and_then(|f| f.type_token.clone())
                .unwrap_or_else(|| RECV_UNKNOWN.to_string());
        }
        match recv.ident() {
            Some("this") => RECV_THIS.to_string(),
            Some("super") => RECV_SUPER.to_string(),
            Some(r) if !is_reserved(r) => {
                if let Some(ty) = self.lookup(r) {
                    return ty
                        .clone()
                        .filter(|t| t != "var")
                        .unwrap_or_else(|| RECV_UNKNOWN.to_string());
                }
                if let Some(f) = self.ctx.fields.get(r) {
                    return f.type_token.clone().unwrap_or_else(|| RECV_UNKNOWN.to_string());
                }
                if r == self.ctx.class_simple_name {
                    return RECV_THIS.to_string();
                }
                if r.starts_with(|c: char| c.is_uppercase()) {
                    return r.to_string();
                }
                RECV_UNKNOWN.to_string()
            }
            _ => RECV_UNKNOWN.to_string(),
        }
    }

    /// `{` that opens an anonymous class body: `new T(...) {`.
    fn anonymous_body(&self, i: usize) -> bool {
        if i == 0 || !self.toks[i - 1].is(")") {
            return false;
        }
        let Some(open) = matching_back(self.toks, i - 1) else { return false };
        if open == 0 {
            return false;
        }
        let mut k = open - 1;
        if self.toks[k].is(">") {
            match matching_back(self.toks, k) {
                Some(o) if o > 0 => k = o - 1,
                _ => return false,
            }
        }
        if !is_name(self.tok(k)) {
            return false;
        }
        let start = self.chain_start(k);
        start > 0 && self.toks[start - 1].is_word("new")
    }

    fn push(&mut self, close: Close) {
        self.scopes.push(Scope {
            vars: HashMap::new(),
            close,
            brace: self.brace,
        });
    }

    fn top_close(&self) -> Option<Close> {
        self.scopes.last().map(|s| s.close)
    }

    fn pop_statement_scopes(&mut self, at_semicolon: bool) {
        while let Some(s) = self.scopes.last() {
            let done = match s.close {
                Close::Statement { paren } => at_semicolon && s.brace == self.brace && paren == self.paren,
                Close::Expression { paren } => s.brace == self.brace && paren == self.paren,
                _ => false,
            };
            if !done {
                break;
            }
            self.scopes.pop();
        }
    }

    fn run(&mut self) {
        let mut i = 0;
        while i < self.toks.len() {
            let t = &self.toks[i];

            if let Some(Close::AwaitBody { lambda }) = self.top_close() {
                let s = self.scopes.last_mut().expect("scope present");
                s.close = if t.is("{") {
                    Close::WithBlock
                } else if lambda {
                    Close::Expression { paren: self.paren }
                } else {
                    Close::Statement { paren: self.paren }
                };
            }

            if t.is("{") {
                if self.anonymous_body(i) {
                    self.warn(i, "anonymous class body skipped");
                    i = matching(self.toks, i).map_or(self.toks.len(), |c| c + 1);
                    continue;
                }
                self.brace += 1;
                self.push(Close::Brace);
            } else if t.is("}") {
                while self
                    .scopes
                    .last()
                    .is_some_and(|s| !matches!(s.close, Close::Brace))
                {
                    self.scopes.pop();
                }
                if self.scopes.len() > 1 {
                    self.scopes.pop();
                }
                self.brace = self.brace.saturating_sub(1);
                if matches!(self.top_close(), Some(Close::WithBlock)) {
                    self.scopes.pop();
                }
                self.declarators = None;
            } else if t.is("(") {
                self.paren += 1;
            } else if t.is(")") {
                self.paren = self.paren.saturating_sub(1);
                if let Some(Close::Header { paren }) = self.top_close() {
                    if paren == self.paren {
                        self.scopes.last_mut().expect("scope present").close =
                            Close::AwaitBody { lambda: false };
                    }
                }
                if self.declarators.as_ref().is_some_and(|d| self.paren < d.1) {
                    self.declarators = None;
                }
                while let Some(Close::Expression { paren }) = self.top_close() {
                    if self.paren < paren {
                        self.scopes.pop();
                    } else {
                        break;
                    }
                }
            } else if t.is(";") {
                self.declarators = None;
                self.pop_statement_scopes(true);
            } else if t.is(",") {
                self.pop_statement_scopes(false);
                if let Some((b, p, ty)) = self.declarators.clone() {
                    if b == self.brace && p == self.paren && is_name(self.tok(i + 1)) {
                        let follow = self.tok(i + 2);
                        if follow.is_some_and(|f| ["=", ",", ";", "["].iter().any(|p| f.is(p))) {
                            let name = word(self.tok(i + 1)).unwrap_or_default().to_string();
                            self.declare(&name, Some(ty));
                            self.declaring.insert(i + 1);
                        }
                    }
                }
            } else if t.is("->") {
                let params = match i.checked_sub(1) {
                    Some(p) if self.toks[p].is(")") => {
                        matching_back(self.toks, p).map_or(p..p, |open| open + 1..p)
                    }
                    Some(p) => p..i,
                    None => 0..0,
                };
                let names: Vec<String> = self
                    .declaring
                    .range(params)
                    .filter_map(|&k| word(self.tok(k)).map(str::to_string))
                    .collect();
                self.push(Close::AwaitBody { lambda: true });
                for n in names {
                    self.declare(&n, None);
                }
            } else if let Some(w) = t.ident() {
                if matches!(w, "for" | "catch" | "try") && self.tok(i + 1).is_some_and(|n| n.is("(")) {
                    self.push(Close::Header { paren: self.paren });
                } else if w == "class" && !(i > 0 && self.toks[i - 1].is(".")) {
                    self.warn(i, "local class declaration skipped");
                    let mut j = i;
                    while j < self.toks.len() && !self.toks[j].is("{") {
                        j += 1;
                    }
                    i = if j < self.toks.len() {
                        matching(self.toks, j).map_or(self.toks.len(), |c| c + 1)
                    } else {
                        j
                    };
                    continue;
                } else if let Some(next) = self.identifier(i) {
                    i = next;
                    continue;
                }
            }
            i += 1;
        }
    }

    /// Handles an identifier at `i`; returns the index to resume at when it
    /// consumed more than one token.
    fn identifier(&mut self, i: usize) -> Option<usize> {
        let w = word(self.tok(i))?;
        if self.declaring.contains(&i) {
            return None;
        }
        if let Some((end, ty)) = self.local_declaration(i) {
            let name = word(self.tok(end)).unwrap_or_default().to_string();
            self.declare(&name, Some(ty.clone()));
            self.declaring.insert(end);
            self.declarators = Some((self.brace, self.paren, ty));
            return Some(end + 1);
        }
        if is_reserved(w) {
            return None;
        }
        let prev = if i > 0 { self.tok(i - 1) } else { None };
        if prev.is_some_and(|p| p.is("::")) {
            return None;
        }
        if self.tok(i + 1).is_some_and(|n| n.is("(")) {
            let chained_new = {
                let s = self.chain_start(i);
                s > 0 && self.toks[s - 1].is_word("new")
            };
            if !chained_new {
                let call = Invocation::new(self.receiver_hint(i), w, self.arity(i + 1));
                if !self.out.invocations.contains(&call) {
                    self.out.invocations.push(call);
                }
            }
            return None;
        }
        let after_dot = prev.is_some_and(|p| p.is("."));
        if after_dot {
            let owner = if i >= 2 { self.tok(i - 2) } else { None };
            let outer_qualified = i >= 3 && self.toks[i - 3].is(".");
            let own = owner.is_some_and(|o| o.is_word("this") || o.is_word(self.ctx.class_simple_name));
            if own && !outer_qualified && self.is_field(w) {
                self.out.references.insert(w.to_string());
            }
            return None;
        }
        if self.is_field(w) && self.lookup(w).is_none() {
            self.out.references.insert(w.to_string());
        }
        None
    }
}
