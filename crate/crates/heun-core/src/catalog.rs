//! The transformation catalog: a plain-text store of two-term identities
//! `Target(x) = theta(x) * Source(phi(x))` between hypergeometric and Heun
//! functions, together with signature-only entries for polynomial-argument
//! families that carry no prefactor.
//!
//! File format: records are blank-line-separated blocks of `key: value`
//! lines in a fixed key order.  Values are kept verbatim as written, so
//! parsing followed by serialization reproduces the input byte for byte.
//! Polynomials and parameters are expression strings in `x` and the free
//! symbols `a`, `b`, `c`, `s`, `q`; `w` denotes a primitive cube root of
//! unity in records whose `field` is `q-omega`.

use crate::expr::Expr;
use crate::sample;
use crate::scalar::Scalar;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// Fixed serialization order; parsing enforces that keys appear in this
/// relative order so the shipped file stays canonical.
const KEY_ORDER: &[&str] = &[
    "id",
    "kind",
    "field",
    "degree",
    "steps",
    "phi-num",
    "phi-den",
    "theta",
    "target-arg",
    "target-t",
    "target-q",
    "target-a",
    "target-b",
    "target-c",
    "target-d",
    "source-t",
    "source-q",
    "source-a",
    "source-b",
    "source-c",
    "source-d",
    "signature-source",
    "signature-target",
    "alpha",
    "beta",
    "note",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordKind {
    HpgToHpg,
    HpgToHeun,
    HeunToHeun,
    SignatureOnly,
}

impl RecordKind {
    fn parse(s: &str) -> Option<RecordKind> {
        match s {
            "hpg-to-hpg" => Some(RecordKind::HpgToHpg),
            "hpg-to-heun" => Some(RecordKind::HpgToHeun),
            "heun-to-heun" => Some(RecordKind::HeunToHeun),
            "signature-only" => Some(RecordKind::SignatureOnly),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            RecordKind::HpgToHpg => "hpg-to-hpg",
            RecordKind::HpgToHeun => "hpg-to-heun",
            RecordKind::HeunToHeun => "heun-to-heun",
            RecordKind::SignatureOnly => "signature-only",
        }
    }
}

/// Coefficient field of a record; `QOmega` triggers evaluation over the
/// quadratic extension containing a primitive cube root of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldTag {
    Q,
    QOmega,
}

impl FieldTag {
    fn parse(s: &str) -> Option<FieldTag> {
        match s {
            "q" => Some(FieldTag::Q),
            "q-omega" => Some(FieldTag::QOmega),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            FieldTag::Q => "q",
            FieldTag::QOmega => "q-omega",
        }
    }
}

/// Parameter slots of one side of an identity, as unevaluated expressions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamExprs {
    Gauss {
        a: Expr,
        b: Expr,
        c: Expr,
    },
    Heun {
        t: Expr,
        q: Expr,
        a: Expr,
        b: Expr,
        c: Expr,
        d: Expr,
    },
}

impl ParamExprs {
    pub fn is_heun(&self) -> bool {
        matches!(self, ParamExprs::Heun { .. })
    }

    /// Slot names and expressions in serialization order.
    pub fn slots(&self) -> Vec<(&'static str, &Expr)> {
        match self {
            ParamExprs::Gauss { a, b, c } => vec![("a", a), ("b", b), ("c", c)],
            ParamExprs::Heun { t, q, a, b, c, d } => {
                vec![("t", t), ("q", q), ("a", a), ("b", b), ("c", c), ("d", d)]
            }
        }
    }

    pub fn substitute(&self, map: &std::collections::BTreeMap<String, Expr>) -> ParamExprs {
        match self {
            ParamExprs::Gauss { a, b, c } => ParamExprs::Gauss {
                a: a.substitute(map),
                b: b.substitute(map),
                c: c.substitute(map),
            },
            ParamExprs::Heun { t, q, a, b, c, d } => ParamExprs::Heun {
                t: t.substitute(map),
                q: q.substitute(map),
                a: a.substitute(map),
                b: b.substitute(map),
                c: c.substitute(map),
                d: d.substitute(map),
            },
        }
    }
}

#[derive(Debug, Clone)]
pub struct TransformationRecord {
    pub id: String,
    pub kind: RecordKind,
    pub field: FieldTag,
    pub degree: usize,
    pub steps: Option<Vec<usize>>,
    pub phi_num: Option<Expr>,
    pub phi_den: Option<Expr>,
    pub theta: Option<Expr>,
    /// Argument of the target function when it is not plain `x` (two-term
    /// identities whose left side is itself a pulled-back function).
    pub target_arg: Option<Expr>,
    pub target: Option<ParamExprs>,
    pub source: Option<ParamExprs>,
    pub signature_source: Vec<Expr>,
    pub signature_target: Vec<Expr>,
    pub alpha: Option<Expr>,
    pub beta: Option<Expr>,
    pub note: Option<String>,
    /// Verbatim `(key, value)` lines for byte-exact serialization.
    raw: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("line {line}: expected `key: value`, got `{text}`")]
    MalformedLine { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` out of canonical order")]
    KeyOrder { line: usize, key: String },
    #[error("record `{id}`: duplicate key `{key}`")]
    DuplicateKey { id: String, key: String },
    #[error("record `{id}`: missing key `{key}`")]
    MissingKey { id: String, key: String },
    #[error("record `{id}`: bad value for `{key}`: {message}")]
    BadValue {
        id: String,
        key: String,
        message: String,
    },
    #[error("duplicate record id `{0}`")]
    DuplicateId(String),
    #[error("catalog is empty")]
    Empty,
}

/// A parsed block before typing: ordered `(key, value)` pairs.
fn split_blocks(text: &str) -> Result<Vec<Vec<(String, String, usize)>>, CatalogError> {
    let mut blocks = Vec::new();
    let mut current: Vec<(String, String, usize)> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.is_empty() {
            if !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
            continue;
        }
        let Some((key, value)) = line.split_once(": ") else {
            return Err(CatalogError::MalformedLine {
                line: lineno,
                text: line.to_string(),
            });
        };
        if key.is_empty()
            || value.is_empty()
            || key != key.trim()
            || value != value.trim()
        {
            return Err(CatalogError::MalformedLine {
                line: lineno,
                text: line.to_string(),
            });
        }
        current.push((key.to_string(), value.to_string(), lineno));
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    if blocks.is_empty() {
        return Err(CatalogError::Empty);
    }
    Ok(blocks)
}

fn key_rank(key: &str) -> Option<usize> {
    KEY_ORDER.iter().position(|k| *k == key)
}

fn parse_expr_field(id: &str, key: &str, value: &str) -> Result<Expr, CatalogError> {
    Expr::parse(value).map_err(|e| CatalogError::BadValue {
        id: id.to_string(),
        key: key.to_string(),
        message: e.to_string(),
    })
}

fn parse_signature(id: &str, key: &str, value: &str) -> Result<Vec<Expr>, CatalogError> {
    value
        .split(',')
        .map(|part| parse_expr_field(id, key, part.trim()))
        .collect()
}

fn build_record(block: Vec<(String, String, usize)>) -> Result<TransformationRecord, CatalogError> {
    // Validate keys, order, and uniqueness first.
    let mut last_rank = 0usize;
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let id_hint = block
        .iter()
        .find(|(k, _, _)| k == "id")
        .map(|(_, v, _)| v.clone())
        .unwrap_or_else(|| "<unnamed>".to_string());
    for (key, _, lineno) in &block {
        let Some(rank) = key_rank(key) else {
            return Err(CatalogError::UnknownKey {
                line: *lineno,
                key: key.clone(),
            });
        };
        if !seen.insert(key.clone()) {
            return Err(CatalogError::DuplicateKey {
                id: id_hint.clone(),
                key: key.clone(),
            });
        }
        if rank < last_rank {
            return Err(CatalogError::KeyOrder {
                line: *lineno,
                key: key.clone(),
            });
        }
        last_rank = rank;
    }

    let get = |key: &str| -> Option<&str> {
        block
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, _)| v.as_str())
    };
    let require = |key: &str| -> Result<&str, CatalogError> {
        get(key).ok_or_else(|| CatalogError::MissingKey {
            id: id_hint.clone(),
            key: key.to_string(),
        })
    };

    let id = require("id")?.to_string();
    let kind_str = require("kind")?;
    let kind = RecordKind::parse(kind_str).ok_or_else(|| CatalogError::BadValue {
        id: id.clone(),
        key: "kind".to_string(),
        message: format!("unknown kind `{kind_str}`"),
    })?;
    let field_str = require("field")?;
    let field = FieldTag::parse(field_str).ok_or_else(|| CatalogError::BadValue {
        id: id.clone(),
        key: "field".to_string(),
        message: format!("unknown field `{field_str}`"),
    })?;
    let degree: usize = require("degree")?
        .parse()
        .map_err(|_| CatalogError::BadValue {
            id: id.clone(),
            key: "degree".to_string(),
            message: "not a positive integer".to_string(),
        })?;
    let steps = match get("steps") {
        None => None,
        Some(v) => {
            let parsed: Result<Vec<usize>, _> =
                v.split(',').map(|p| p.trim().parse::<usize>()).collect();
            Some(parsed.map_err(|_| CatalogError::BadValue {
                id: id.clone(),
                key: "steps".to_string(),
                message: "expected a comma-separated list of integers".to_string(),
            })?)
        }
    };

    let expr_opt = |key: &str| -> Result<Option<Expr>, CatalogError> {
        get(key).map(|v| parse_expr_field(&id, key, v)).transpose()
    };

    let phi_num = expr_opt("phi-num")?;
    let phi_den = expr_opt("phi-den")?;
    let theta = expr_opt("theta")?;
    let target_arg = expr_opt("target-arg")?;

    let side = |prefix: &str| -> Result<Option<ParamExprs>, CatalogError> {
        let slot = |name: &str| -> Result<Option<Expr>, CatalogError> {
            expr_opt(&format!("{prefix}-{name}"))
        };
        let t = slot("t")?;
        let q = slot("q")?;
        let a = slot("a")?;
        let b = slot("b")?;
        let c = slot("c")?;
        let d = slot("d")?;
        match (t, q, a, b, c, d) {
            (None, None, None, None, None, None) => Ok(None),
            (Some(t), Some(q), Some(a), Some(b), Some(c), Some(d)) => {
                Ok(Some(ParamExprs::Heun { t, q, a, b, c, d }))
            }
            (None, None, Some(a), Some(b), Some(c), None) => {
                Ok(Some(ParamExprs::Gauss { a, b, c }))
            }
            _ => Err(CatalogError::BadValue {
                id: id.clone(),
                key: prefix.to_string(),
                message: "parameter slots form neither a Gauss nor a Heun tuple".to_string(),
            }),
        }
    };
    let target = side("target")?;
    let source = side("source")?;

    let signature_source = parse_signature(&id, "signature-source", require("signature-source")?)?;
    let signature_target = parse_signature(&id, "signature-target", require("signature-target")?)?;
    let alpha = expr_opt("alpha")?;
    let beta = expr_opt("beta")?;
    let note = get("note").map(|s| s.to_string());

    // Structural checks per kind.
    let verifiable = kind != RecordKind::SignatureOnly;
    if verifiable {
        for key in ["phi-num", "phi-den", "theta"] {
            if get(key).is_none() {
                return Err(CatalogError::MissingKey {
                    id: id.clone(),
                    key: key.to_string(),
                });
            }
        }
        let shapes_ok = match kind {
            RecordKind::HpgToHpg => {
                matches!(&target, Some(p) if !p.is_heun())
                    && matches!(&source, Some(p) if !p.is_heun())
            }
            RecordKind::HpgToHeun => {
                matches!(&target, Some(p) if p.is_heun())
                    && matches!(&source, Some(p) if !p.is_heun())
            }
            RecordKind::HeunToHeun => {
                matches!(&target, Some(p) if p.is_heun())
                    && matches!(&source, Some(p) if p.is_heun())
            }
            RecordKind::SignatureOnly => true,
        };
        if !shapes_ok {
            return Err(CatalogError::BadValue {
                id: id.clone(),
                key: "kind".to_string(),
                message: "parameter tuples do not match the declared kind".to_string(),
            });
        }
    }

    let raw = block
        .into_iter()
        .map(|(k, v, _)| (k, v))
        .collect::<Vec<_>>();

    Ok(TransformationRecord {
        id,
        kind,
        field,
        degree,
        steps,
        phi_num,
        phi_den,
        theta,
        target_arg,
        target,
        source,
        signature_source,
        signature_target,
        alpha,
        beta,
        note,
        raw,
    })
}

pub fn parse_catalog(text: &str) -> Result<Vec<TransformationRecord>, CatalogError> {
    let blocks = split_blocks(text)?;
    let mut records = Vec::with_capacity(blocks.len());
    let mut ids = BTreeSet::new();
    for block in blocks {
        let rec = build_record(block)?;
        if !ids.insert(rec.id.clone()) {
            return Err(CatalogError::DuplicateId(rec.id.clone()));
        }
        records.push(rec);
    }
    Ok(records)
}

/// Serialize records back to the file format.  For records parsed from a
/// file this reproduces the input bytes exactly.
pub fn serialize_catalog(records: &[TransformationRecord]) -> String {
    let mut out = String::new();
    for (i, rec) in records.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for (key, value) in &rec.raw {
            out.push_str(key);
            out.push_str(": ");
            out.push_str(value);
            out.push('\n');
        }
    }
    out
}

pub fn builtin_catalog_text() -> &'static str {
    include_str!("../data/catalog.txt")
}

pub fn builtin_catalog() -> Vec<TransformationRecord> {
    parse_catalog(builtin_catalog_text()).expect("shipped catalog parses")
}

pub fn find_record<'a>(
    records: &'a [TransformationRecord],
    id: &str,
) -> Option<&'a TransformationRecord> {
    records.iter().find(|r| r.id == id)
}

impl TransformationRecord {
    pub fn is_verifiable(&self) -> bool {
        self.kind != RecordKind::SignatureOnly
    }

    /// Free symbols to sample: everything mentioned anywhere except the
    /// variable `x` and the field constant `w`.
    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut take = |e: &Expr| out.extend(e.free_symbols());
        for e in [&self.phi_num, &self.phi_den, &self.theta, &self.target_arg]
            .into_iter()
            .flatten()
        {
            take(e);
        }
        for side in [&self.target, &self.source].into_iter().flatten() {
            for (_, e) in side.slots() {
                take(e);
            }
        }
        for e in self.signature_source.iter().chain(&self.signature_target) {
            take(e);
        }
        // Signatures may reference the record-local abbreviations `alpha`
        // and `beta`; expand those through their definitions.
        for e in [&self.alpha, &self.beta].into_iter().flatten() {
            take(e);
        }
        out.remove("alpha");
        out.remove("beta");
        out.remove("x");
        out.remove("w");
        out
    }

    /// `phi` as a single expression `phi-num / phi-den`.
    pub fn phi_expr(&self) -> Option<Expr> {
        let num = self.phi_num.clone()?;
        let den = self.phi_den.clone()?;
        Some(if den == Expr::num_i64(1) {
            num
        } else {
            num.div(den)
        })
    }

    /// Build a derived record directly from typed fields.
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        id: String,
        kind: RecordKind,
        field: FieldTag,
        degree: usize,
        steps: Option<Vec<usize>>,
        phi_num: Option<Expr>,
        phi_den: Option<Expr>,
        theta: Option<Expr>,
        target_arg: Option<Expr>,
        target: Option<ParamExprs>,
        source: Option<ParamExprs>,
        signature_source: Vec<Expr>,
        signature_target: Vec<Expr>,
        note: Option<String>,
    ) -> TransformationRecord {
        let mut rec = TransformationRecord {
            id,
            kind,
            field,
            degree,
            steps,
            phi_num,
            phi_den,
            theta,
            target_arg,
            target,
            source,
            signature_source,
            signature_target,
            alpha: None,
            beta: None,
            note,
            raw: Vec::new(),
        };
        rec.synthesize_raw();
        rec
    }

    /// The record with a substitution applied to every expression field.
    pub fn substituted(&self, map: &std::collections::BTreeMap<String, Expr>) -> Self {
        let sub = |e: &Expr| e.substitute(map);
        let sub_opt = |e: &Option<Expr>| e.as_ref().map(&sub);
        let mut rec = TransformationRecord {
            id: self.id.clone(),
            kind: self.kind,
            field: self.field,
            degree: self.degree,
            steps: self.steps.clone(),
            phi_num: sub_opt(&self.phi_num),
            phi_den: sub_opt(&self.phi_den),
            theta: sub_opt(&self.theta),
            target_arg: sub_opt(&self.target_arg),
            target: self.target.as_ref().map(|p| p.substitute(map)),
            source: self.source.as_ref().map(|p| p.substitute(map)),
            signature_source: self.signature_source.iter().map(&sub).collect(),
            signature_target: self.signature_target.iter().map(&sub).collect(),
            alpha: sub_opt(&self.alpha),
            beta: sub_opt(&self.beta),
            note: self.note.clone(),
            raw: Vec::new(),
        };
        rec.synthesize_raw();
        rec
    }

    /// Rebuild the verbatim lines from the typed fields (used for derived
    /// records that were never parsed from a file).
    fn synthesize_raw(&mut self) {
        let mut raw: Vec<(String, String)> = Vec::new();
        raw.push(("id".into(), self.id.clone()));
        raw.push(("kind".into(), self.kind.as_str().into()));
        raw.push(("field".into(), self.field.as_str().into()));
        raw.push(("degree".into(), self.degree.to_string()));
        if let Some(steps) = &self.steps {
            let text = steps
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            raw.push(("steps".into(), text));
        }
        if let Some(e) = &self.phi_num {
            raw.push(("phi-num".into(), e.to_string()));
        }
        if let Some(e) = &self.phi_den {
            raw.push(("phi-den".into(), e.to_string()));
        }
        if let Some(e) = &self.theta {
            raw.push(("theta".into(), e.to_string()));
        }
        if let Some(e) = &self.target_arg {
            raw.push(("target-arg".into(), e.to_string()));
        }
        for (side, prefix) in [(&self.target, "target"), (&self.source, "source")] {
            if let Some(params) = side {
                for (name, e) in params.slots() {
                    raw.push((format!("{prefix}-{name}"), e.to_string()));
                }
            }
        }
        let sig = |v: &[Expr]| {
            v.iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        raw.push(("signature-source".into(), sig(&self.signature_source)));
        raw.push(("signature-target".into(), sig(&self.signature_target)));
        if let Some(e) = &self.alpha {
            raw.push(("alpha".into(), e.to_string()));
        }
        if let Some(e) = &self.beta {
            raw.push(("beta".into(), e.to_string()));
        }
        if let Some(n) = &self.note {
            raw.push(("note".into(), n.clone()));
        }
        self.raw = raw;
    }
}

impl fmt::Display for TransformationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({}, degree {})",
            self.id,
            self.kind.as_str(),
            self.degree
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("record `{0}` has no transformation data to compose")]
    SignatureOnly(String),
    #[error("outer source and inner target families differ: {outer} vs {inner}")]
    FamilyMismatch { outer: String, inner: String },
    #[error("parameter constraint fails at outer-target/inner-source slot `{slot}`")]
    ParameterMismatch { slot: String },
    #[error("inner map does not fix the origin, so prefactor normalization fails")]
    OriginNotFixed,
}

/// Glue two records into one: with `Outer: T_o = th_o * S_o(phi_o)` and
/// `Inner: T_i = th_i * S_i(phi_i)`, and `S_i = T_o` after applying the
/// respective bindings, the composite is
/// `T_i = th_i * (th_o o phi_i) * S_o(phi_o o phi_i)`.
///
/// The parameter constraint `inner.source == outer.target` is checked by
/// exact evaluation at deterministic random samples of the joint symbols.
pub fn compose_records(
    outer: &TransformationRecord,
    inner: &TransformationRecord,
    outer_bindings: &std::collections::BTreeMap<String, Expr>,
    inner_bindings: &std::collections::BTreeMap<String, Expr>,
    id: &str,
) -> Result<TransformationRecord, ComposeError> {
    for rec in [outer, inner] {
        if !rec.is_verifiable() {
            return Err(ComposeError::SignatureOnly(rec.id.clone()));
        }
    }
    let outer_target = outer
        .target
        .as_ref()
        .expect("verifiable record has target")
        .substitute(outer_bindings);
    let outer_source = outer
        .source
        .as_ref()
        .expect("verifiable record has source")
        .substitute(outer_bindings);
    let inner_target = inner
        .target
        .as_ref()
        .expect("verifiable record has target")
        .substitute(inner_bindings);
    let inner_source = inner
        .source
        .as_ref()
        .expect("verifiable record has source")
        .substitute(inner_bindings);

    if outer_target.is_heun() != inner_source.is_heun() {
        return Err(ComposeError::FamilyMismatch {
            outer: if outer_target.is_heun() { "heun" } else { "gauss" }.to_string(),
            inner: if inner_source.is_heun() { "heun" } else { "gauss" }.to_string(),
        });
    }

    // Exact polynomial-identity test on each slot at deterministic samples.
    let mut symbols: BTreeSet<String> = BTreeSet::new();
    for side in [&outer_target, &inner_source] {
        for (_, e) in side.slots() {
            symbols.extend(e.free_symbols());
        }
    }
    symbols.remove("w");
    let symbols: Vec<String> = symbols.into_iter().collect();
    let slots_a = outer_target.slots();
    let slots_b = inner_source.slots();
    for ((name, ea), (_, eb)) in slots_a.iter().zip(slots_b.iter()) {
        let mut rng = sample::rng_for(sample::DEFAULT_SEED, 0x517e);
        let mut agreed = 0;
        let mut attempts = 0;
        while agreed < 8 && attempts < 200 {
            attempts += 1;
            let assign: Vec<crate::scalar::Rational> = symbols
                .iter()
                .map(|_| sample::rational(&mut rng, 50))
                .collect();
            let env = |s: &str| -> Option<crate::scalar::OmegaRational> {
                if s == "w" {
                    return crate::scalar::OmegaRational::cube_root_of_unity();
                }
                symbols
                    .iter()
                    .position(|name| name == s)
                    .map(|i| sample::lift(&assign[i]))
            };
            match (ea.eval_scalar(&env), eb.eval_scalar(&env)) {
                (Ok(va), Ok(vb)) => {
                    if va != vb {
                        return Err(ComposeError::ParameterMismatch {
                            slot: name.to_string(),
                        });
                    }
                    agreed += 1;
                }
                // A pole of some parameter expression: resample.
                _ => continue,
            }
        }
    }

    let inner_phi = inner.phi_expr().expect("verifiable record has phi");
    let inner_phi = inner_phi.substitute(inner_bindings);
    let mut into_inner = std::collections::BTreeMap::new();
    into_inner.insert("x".to_string(), inner_phi.clone());

    let outer_phi = outer
        .phi_expr()
        .expect("verifiable record has phi")
        .substitute(outer_bindings);
    let composed_phi = outer_phi.substitute(&into_inner);

    let theta_inner = inner
        .theta
        .clone()
        .expect("verifiable record has theta")
        .substitute(inner_bindings);
    let theta_outer = outer
        .theta
        .clone()
        .expect("verifiable record has theta")
        .substitute(outer_bindings)
        .substitute(&into_inner);
    let composed_theta = if theta_inner == Expr::num_i64(1) {
        theta_outer
    } else if theta_outer == Expr::num_i64(1) {
        theta_inner
    } else {
        theta_inner.mul(theta_outer)
    };

    let field = if outer.field == FieldTag::QOmega || inner.field == FieldTag::QOmega {
        FieldTag::QOmega
    } else {
        FieldTag::Q
    };
    let kind = match (inner_target.is_heun(), outer_source.is_heun()) {
        (true, true) => RecordKind::HeunToHeun,
        (true, false) => RecordKind::HpgToHeun,
        (false, false) => RecordKind::HpgToHpg,
        (false, true) => {
            return Err(ComposeError::FamilyMismatch {
                outer: "heun".to_string(),
                inner: "gauss".to_string(),
            })
        }
    };

    let mut rec = TransformationRecord {
        id: id.to_string(),
        kind,
        field,
        degree: outer.degree * inner.degree,
        steps: Some(vec![inner.degree, outer.degree]),
        phi_num: Some(composed_phi),
        phi_den: Some(Expr::num_i64(1)),
        theta: Some(composed_theta),
        target_arg: inner.target_arg.clone().map(|e| e.substitute(inner_bindings)),
        target: Some(inner_target),
        source: Some(outer_source),
        signature_source: outer
            .signature_source
            .iter()
            .map(|e| e.substitute(outer_bindings))
            .collect(),
        signature_target: inner
            .signature_target
            .iter()
            .map(|e| e.substitute(inner_bindings))
            .collect(),
        alpha: None,
        beta: None,
        note: Some(format!("composition of {} after {}", outer.id, inner.id)),
        raw: Vec::new(),
    };
    rec.synthesize_raw();
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_parses_with_expected_partition() {
        let records = builtin_catalog();
        assert_eq!(records.len(), 35);
        let count = |k: RecordKind| records.iter().filter(|r| r.kind == k).count();
        assert_eq!(count(RecordKind::HpgToHpg), 6);
        assert_eq!(count(RecordKind::HpgToHeun), 18);
        assert_eq!(count(RecordKind::HeunToHeun), 4);
        assert_eq!(count(RecordKind::SignatureOnly), 7);
        assert_eq!(records.iter().filter(|r| r.is_verifiable()).count(), 28);
        let omega = records
            .iter()
            .filter(|r| r.field == FieldTag::QOmega)
            .map(|r| r.id.clone())
            .collect::<Vec<_>>();
        assert_eq!(omega, ["cubic-111-3-3-a", "cubic-111-3-3-b"]);
    }

    #[test]
    fn two_parameter_pullbacks_onto_heun() {
        // Families with two continuous parameters: Heun targets pulled back
        // from a Gauss source whose symbols are exactly {a, b}.
        let records = builtin_catalog();
        let two_param: Vec<&TransformationRecord> = records
            .iter()
            .filter(|r| r.kind == RecordKind::HpgToHeun)
            .filter(|r| {
                let syms = r.free_symbols();
                syms.len() == 2 && syms.contains("a") && syms.contains("b")
            })
            .collect();
        assert_eq!(two_param.len(), 15);
    }

    #[test]
    fn round_trip_is_byte_exact() {
        let text = builtin_catalog_text();
        let records = parse_catalog(text).unwrap();
        assert_eq!(serialize_catalog(&records), text);
    }

    #[test]
    fn lookup_and_fields() {
        let records = builtin_catalog();
        let rec = find_record(&records, "quad-symmetric").unwrap();
        assert_eq!(rec.kind, RecordKind::HpgToHeun);
        assert_eq!(rec.degree, 2);
        assert!(rec.target.as_ref().unwrap().is_heun());
        assert!(!rec.source.as_ref().unwrap().is_heun());
        assert!(rec.phi_expr().is_some());
        assert!(find_record(&records, "no-such-id").is_none());
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(matches!(
            parse_catalog("id: x\nbogus-key: 1\n"),
            Err(CatalogError::UnknownKey { .. })
        ));
        assert!(matches!(
            parse_catalog("kind: hpg-to-hpg\nid: x\n"),
            Err(CatalogError::KeyOrder { .. })
        ));
        assert!(matches!(
            parse_catalog("id x\n"),
            Err(CatalogError::MalformedLine { .. })
        ));
        let dup = "id: x\nkind: signature-only\nfield: q\ndegree: 2\nsignature-source: 1\nsignature-target: 1\n\nid: x\nkind: signature-only\nfield: q\ndegree: 2\nsignature-source: 1\nsignature-target: 1\n";
        assert!(matches!(
            parse_catalog(dup),
            Err(CatalogError::DuplicateId(_))
        ));
    }

    #[test]
    fn signature_only_records_skip_transformation_fields() {
        let records = builtin_catalog();
        for rec in records.iter().filter(|r| !r.is_verifiable()) {
            assert!(rec.phi_num.is_none());
            assert!(rec.theta.is_none());
            assert!(!rec.signature_source.is_empty());
            assert!(!rec.signature_target.is_empty());
        }
    }
}
