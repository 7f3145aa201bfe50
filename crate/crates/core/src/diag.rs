//! Source spans and diagnostics shared by the front end and the translator.

use std::fmt;

use serde::Serialize;

/// A byte range in a source file together with its 1-based line/column start.
///
/// Spans never participate in structural equality of syntax trees: two spans
/// always compare equal, so parse/print round trips can be checked with `==`.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    #[serde(rename = "column")]
    pub col: u32,
}

impl Span {
    pub fn new(start: usize, end: usize, line: u32, col: u32) -> Span {
        debug_assert!(start <= end);
        Span {
            start,
            end,
            line,
            col,
        }
    }

    /// Smallest span covering both `self` and `other`.
    pub fn to(self, other: Span) -> Span {
        if other.end <= self.start {
            return self;
        }
        Span {
            start: self.start,
            end: other.end.max(self.end),
            line: self.line,
            col: self.col,
        }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl std::hash::Hash for Span {
    fn hash<H: std::hash::Hasher>(&self, _: &mut H) {}
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

/// Stable diagnostic codes. The string form is what tooling matches on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Code {
    Lex,
    Syntax,
    /// Extension syntax used while loading in core mode.
    ExtensionSyntax,
    RecursiveStruct,
    DuplicateField,
    DuplicateSpec,
    DuplicateMethod,
    DuplicateType,
    DuplicateParam,
    UnknownType,
    ReservedName,
    ReceiverNotStruct,
    UnknownVar,
    UnknownField,
    UnknownMethod,
    ArityMismatch,
    NotASubtype,
    AssertOnNonInterface,
    ImpossibleAssert,
    SelectOnNonStruct,
    PrimitiveOp,
    EmptyDestructor,
    Tl,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::Lex => "lex",
            Code::Syntax => "syntax",
            Code::ExtensionSyntax => "extension-syntax",
            Code::RecursiveStruct => "FG1",
            Code::DuplicateField => "FG2",
            Code::DuplicateSpec => "FG3",
            Code::DuplicateMethod => "FG4",
            Code::DuplicateType => "duplicate-type",
            Code::DuplicateParam => "duplicate-param",
            Code::UnknownType => "unknown-type",
            Code::ReservedName => "reserved-name",
            Code::ReceiverNotStruct => "receiver-not-struct",
            Code::UnknownVar => "unknown-var",
            Code::UnknownField => "unknown-field",
            Code::UnknownMethod => "unknown-method",
            Code::ArityMismatch => "arity-mismatch",
            Code::NotASubtype => "not-a-subtype",
            Code::AssertOnNonInterface => "assert-on-non-interface",
            Code::ImpossibleAssert => "impossible-assert",
            Code::SelectOnNonStruct => "select-on-non-struct",
            Code::PrimitiveOp => "primitive-op",
            Code::EmptyDestructor => "empty-destructor",
            Code::Tl => "tl",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub fn error(code: Code, span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            code,
            severity: Severity::Error,
            message: message.into(),
            span,
        }
    }

    pub fn warning(code: Code, span: Span, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            code,
            severity: Severity::Warning,
            message: message.into(),
            span,
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `file:line:col: error[code]: message`
    pub fn render(&self, file: &str) -> String {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        format!(
            "{}:{}:{}: {}[{}]: {}",
            file, self.span.line, self.span.col, sev, self.code, self.message
        )
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}: [{}] {}",
            self.span.line, self.span.col, self.code, self.message
        )
    }
}

/// Versioned JSON document for a batch of diagnostics.
pub fn diagnostics_json(file: &str, diags: &[Diagnostic]) -> serde_json::Value {
    let items: Vec<_> = diags
        .iter()
        .map(|d| {
            serde_json::json!({
                "code": d.code,
                "severity": d.severity,
                "message": d.message,
                "span": {
                    "file": file,
                    "start": d.span.start,
                    "end": d.span.end,
                    "line": d.span.line,
                    "column": d.span.col,
                },
            })
        })
        .collect();
    serde_json::json!({ "v": 1, "diagnostics": items })
}
