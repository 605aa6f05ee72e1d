//! The `key=value` model description.
//!
//! ```text
//! # two-level system, one accessor qubit
//! N=2
//! M=1
//! E=[1, -1]
//! omega=[1]
//! d=[1]
//! coupling { j=1 k=1 alpha="Y" g=1 }
//! coupling { j=1 k=2 alpha="X" g=1 }
//! task { initial_system=[1, 0] target_system=[0, 1] T=20 segments=200 }
//! ```
//!
//! Numbers are exact: integers, decimals, scientific notation and `p/q`
//! fractions all parse to rationals. Complex entries are written `a+bi`
//! without spaces. `#` starts a comment.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::algebra::{rational_to_f64, PauliString};
use crate::error::{Error, Result};
use crate::model::ControlModel;
use crate::pulse::{SynthesisOptions, TransferTask};

#[derive(Clone, Debug)]
pub struct TaskConfig {
    pub task: TransferTask,
    pub options: SynthesisOptions,
}

#[derive(Clone, Debug)]
pub struct Config {
    pub model: ControlModel,
    pub task: Option<TaskConfig>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Word(String),
    Str(String),
    Eq,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut chars = raw.chars().peekable();
        while let Some(&ch) = chars.peek() {
            match ch {
                '#' => break,
                c if c.is_whitespace() => {
                    chars.next();
                }
                '=' | '[' | ']' | '{' | '}' | ',' => {
                    chars.next();
                    out.push((
                        line,
                        match ch {
                            '=' => Tok::Eq,
                            '[' => Tok::LBracket,
                            ']' => Tok::RBracket,
                            '{' => Tok::LBrace,
                            '}' => Tok::RBrace,
                            _ => Tok::Comma,
                        },
                    ));
                }
                '"' => {
                    chars.next();
                    let mut s = String::new();
                    loop {
                        match chars.next() {
                            Some('"') => break,
                            Some(c) => s.push(c),
                            None => {
                                return Err(Error::Parse {
                                    line,
                                    key: String::new(),
                                    message: "unterminated string".into(),
                                })
                            }
                        }
                    }
                    out.push((line, Tok::Str(s)));
                }
                _ => {
                    let mut w = String::new();
                    while let Some(&c) = chars.peek() {
                        if c.is_whitespace() || "=[]{},\"#".contains(c) {
                            break;
                        }
                        w.push(c);
                        chars.next();
                    }
                    out.push((line, Tok::Word(w)));
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum Value {
    Scalar(String),
    Str(String),
    List(Vec<String>),
}

#[derive(Clone, Debug)]
struct Entry {
    line: usize,
    value: Value,
}

#[derive(Clone, Debug)]
struct Block {
    line: usize,
    entries: BTreeMap<String, Entry>,
}

#[derive(Default)]
struct Document {
    top: BTreeMap<String, Entry>,
    couplings: Vec<Block>,
    extra_controls: Vec<(usize, String)>,
    task: Option<Block>,
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn last_line(&self) -> usize {
        self.toks.last().map_or(1, |t| t.0)
    }

    fn err<T>(line: usize, key: &str, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            line,
            key: key.to_string(),
            message: message.into(),
        })
    }

    fn value(&mut self, key: &str, line: usize) -> Result<Value> {
        match self.next() {
            Some((_, Tok::Word(w))) => Ok(Value::Scalar(w)),
            Some((_, Tok::Str(s))) => Ok(Value::Str(s)),
            Some((_, Tok::LBracket)) => {
                let mut items = Vec::new();
                loop {
                    match self.next() {
                        Some((_, Tok::RBracket)) => break,
                        Some((_, Tok::Word(w))) => {
                            items.push(w);
                            match self.next() {
                                Some((_, Tok::Comma)) => continue,
                                Some((_, Tok::RBracket)) => break,
                                Some((l, _)) => return Self::err(l, key, "expected ',' or ']' in list"),
                                None => return Self::err(self.last_line(), key, "unterminated list"),
                            }
                        }
                        Some((l, _)) => return Self::err(l, key, "expected a number in list"),
                        None => return Self::err(self.last_line(), key, "unterminated list"),
                    }
                }
                Ok(Value::List(items))
            }
            Some((l, _)) => Self::err(l, key, "expected a value"),
            None => Self::err(line, key, "missing value"),
        }
    }

    fn assignment(&mut self) -> Result<(String, Entry)> {
        let (line, key) = match self.next() {
            Some((l, Tok::Word(w))) => (l, w),
            Some((l, _)) => return Self::err(l, "", "expected a key"),
            None => unreachable!("caller checks for more tokens"),
        };
        match self.next() {
            Some((_, Tok::Eq)) => {}
            Some((l, _)) => return Self::err(l, &key, "expected '='"),
            None => return Self::err(line, &key, "expected '='"),
        }
        let value = self.value(&key, line)?;
        Ok((key, Entry { line, value }))
    }

    fn block(&mut self, name: &str, line: usize) -> Result<Block> {
        match self.next() {
            Some((_, Tok::LBrace)) => {}
            _ => return Self::err(line, name, "expected '{'"),
        }
        let mut entries = BTreeMap::new();
        loop {
            match self.peek() {
                Some((_, Tok::RBrace)) => {
                    self.pos += 1;
                    break;
                }
                Some(_) => {
                    let (k, e) = self.assignment()?;
                    if entries.contains_key(&k) {
                        return Self::err(e.line, &k, format!("duplicate key in {name} block"));
                    }
                    entries.insert(k, e);
                }
                None => return Self::err(self.last_line(), name, "unterminated block"),
            }
        }
        Ok(Block { line, entries })
    }

    fn document(&mut self) -> Result<Document> {
        let mut doc = Document::default();
        while let Some((line, tok)) = self.peek().cloned() {
            match tok {
                Tok::Word(w) if w == "coupling" || w == "task" => {
                    self.pos += 1;
                    let b = self.block(&w, line)?;
                    if w == "coupling" {
                        doc.couplings.push(b);
                    } else if doc.task.replace(b).is_some() {
                        return Self::err(line, "task", "more than one task block");
                    }
                }
                Tok::Word(_) => {
                    let (k, e) = self.assignment()?;
                    if k == "extra_control" {
                        match e.value {
                            Value::Str(s) => doc.extra_controls.push((e.line, s)),
                            _ => return Self::err(e.line, &k, "expected a quoted Pauli string"),
                        }
                        continue;
                    }
                    if !TOP_KEYS.contains(&k.as_str()) {
                        return Self::err(e.line, &k, "unknown key");
                    }
                    if doc.top.contains_key(&k) {
                        return Self::err(e.line, &k, "duplicate key");
                    }
                    doc.top.insert(k, e);
                }
                _ => return Self::err(line, "", "expected a key"),
            }
        }
        Ok(doc)
    }
}

const TOP_KEYS: &[&str] = &["N", "M", "E", "omega", "c", "d"];
const COUPLING_KEYS: &[&str] = &["j", "k", "alpha", "g"];
const TASK_KEYS: &[&str] = &[
    "initial_system",
    "initial_accessor",
    "target_system",
    "T",
    "segments",
    "max_iters",
    "target_fidelity",
    "amplitude_cap",
];

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

/// Exact value of a real literal: `3`, `-0.25`, `1e-3`, `2.5E2`, `1/3`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_rational(p)?;
        let q = parse_rational(q)?;
        return (!q.is_zero()).then(|| p / q);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{int}{frac}").parse().ok().unwrap_or_else(BigInt::zero);
    let scale = exp - frac.len() as i32;
    let mut r = BigRational::from_integer(all);
    if scale >= 0 {
        r *= BigRational::from_integer(pow10(scale as u32));
    } else {
        r /= BigRational::from_integer(pow10((-scale) as u32));
    }
    Some(if neg { -r } else { r })
}

/// `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`.
pub fn parse_complex(s: &str) -> Option<(BigRational, BigRational)> {
    let Some(body) = s.strip_suffix('i') else {
        return Some((parse_rational(s)?, BigRational::zero()));
    };
    // Split at the last sign that is not leading and not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (parse_rational(&body[..i])?, &body[i..]),
        None => (BigRational::zero(), body),
    };
    let im = match im {
        "" | "+" => BigRational::one(),
        "-" => -BigRational::one(),
        t => parse_rational(t)?,
    };
    Some((re, im))
}

fn scalar<'a>(key: &str, e: &'a Entry) -> Result<&'a str> {
    match &e.value {
        Value::Scalar(s) => Ok(s),
        _ => Parser::err(e.line, key, "expected a number"),
    }
}

fn rational_entry(key: &str, e: &Entry) -> Result<BigRational> {
    let s = scalar(key, e)?;
    parse_rational(s).map_or_else(|| Parser::err(e.line, key, format!("`{s}` is not a real number")), Ok)
}

fn integer_entry(key: &str, e: &Entry) -> Result<usize> {
    let s = scalar(key, e)?;
    s.parse::<usize>()
        .map_or_else(|_| Parser::err(e.line, key, format!("`{s}` is not a non-negative integer")), Ok)
}

fn list_entry(key: &str, e: &Entry) -> Result<Vec<BigRational>> {
    match &e.value {
        Value::List(items) => items
            .iter()
            .map(|s| parse_rational(s).map_or_else(|| Parser::err(e.line, key, format!("`{s}` is not a real number")), Ok))
            .collect(),
        _ => Parser::err(e.line, key, "expected a list [..]"),
    }
}

fn complex_list_entry(key: &str, e: &Entry) -> Result<Vec<Complex64>> {
    match &e.value {
        Value::List(items) => items
            .iter()
            .map(|s| match parse_complex(s) {
                Some((re, im)) => Ok(Complex64::new(rational_to_f64(&re), rational_to_f64(&im))),
                None => Parser::err(e.line, key, format!("`{s}` is not a complex number")),
            })
            .collect(),
        _ => Parser::err(e.line, key, "expected a list [..]"),
    }
}

fn required<'a>(map: &'a BTreeMap<String, Entry>, key: &str, line: usize) -> Result<&'a Entry> {
    map.get(key)
        .map_or_else(|| Parser::err(line, key, "missing required key"), Ok)
}

fn check_len(key: &str, e: &Entry, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Parser::err(e.line, key, format!("{key} length {got}, expected {want}"));
    }
    Ok(())
}

/// Normalizes a complex vector to unit norm.
fn unit(v: Vec<Complex64>, key: &str, line: usize) -> Result<Vec<Complex64>> {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Parser::err(line, key, "state vector has zero norm");
    }
    Ok(v.into_iter().map(|z| z / norm).collect())
}

fn build(doc: Document) -> Result<Config> {
    let top = &doc.top;
    let end = 1;
    let n_e = required(top, "N", end)?;
    let n = integer_entry("N", n_e)?;
    let m_e = required(top, "M", end)?;
    let m = integer_entry("M", m_e)?;
    if n < 2 {
        return Parser::err(n_e.line, "N", "N must be at least 2");
    }
    if !(1..=crate::algebra::MAX_QUBITS).contains(&m) {
        return Parser::err(m_e.line, "M", format!("M must be in 1..={}", crate::algebra::MAX_QUBITS));
    }
    let e_e = required(top, "E", end)?;
    let energies = list_entry("E", e_e)?;
    check_len("E", e_e, energies.len(), n)?;
    let o_e = required(top, "omega", end)?;
    let omega = list_entry("omega", o_e)?;
    check_len("omega", o_e, omega.len(), m)?;
    let chain = match top.get("c") {
        Some(c_e) => {
            let c = list_entry("c", c_e)?;
            check_len("c", c_e, c.len(), m - 1)?;
            c
        }
        None if m == 1 => Vec::new(),
        None => return Parser::err(end, "c", "missing required key"),
    };
    let d_e = required(top, "d", end)?;
    let d = list_entry("d", d_e)?;
    check_len("d", d_e, d.len(), n - 1)?;

    let mut model = ControlModel::new(n, m, energies, omega, chain, d).map_err(|err| Error::Parse {
        line: n_e.line,
        key: "N".into(),
        message: err.to_string(),
    })?;

    for b in &doc.couplings {
        if let Some((k, e)) = b.entries.iter().find(|(k, _)| !COUPLING_KEYS.contains(&k.as_str())) {
            return Parser::err(e.line, k, "unknown key in coupling block");
        }
        let j = integer_entry("j", required(&b.entries, "j", b.line)?)?;
        let k_e = required(&b.entries, "k", b.line)?;
        let k = integer_entry("k", k_e)?;
        if k != 1 && k != 2 {
            return Parser::err(k_e.line, "k", "k must be 1 or 2");
        }
        let a_e = required(&b.entries, "alpha", b.line)?;
        let alpha_s = match &a_e.value {
            Value::Str(s) => s.clone(),
            Value::Scalar(s) => s.clone(),
            _ => return Parser::err(a_e.line, "alpha", "expected a quoted string"),
        };
        if alpha_s.chars().any(|c| c != 'X' && c != 'Y') {
            return Parser::err(a_e.line, "alpha", format!("alpha \"{alpha_s}\" has labels outside {{X, Y}}"));
        }
        let alpha: PauliString = alpha_s
            .parse()
            .map_err(|_| Error::Parse {
                line: a_e.line,
                key: "alpha".into(),
                message: format!("bad Pauli string \"{alpha_s}\""),
            })?;
        let g = rational_entry("g", required(&b.entries, "g", b.line)?)?;
        model.add_coupling(j, k as u8, alpha, g).map_err(|err| Error::Parse {
            line: b.line,
            key: "coupling".into(),
            message: err.to_string(),
        })?;
    }

    for (line, s) in &doc.extra_controls {
        let p: PauliString = s.parse().map_err(|_| Error::Parse {
            line: *line,
            key: "extra_control".into(),
            message: format!("bad Pauli string \"{s}\""),
        })?;
        model.add_extra_control(p).map_err(|err| Error::Parse {
            line: *line,
            key: "extra_control".into(),
            message: err.to_string(),
        })?;
    }

    let task = match &doc.task {
        None => None,
        Some(b) => {
            if let Some((k, e)) = b.entries.iter().find(|(k, _)| !TASK_KEYS.contains(&k.as_str())) {
                return Parser::err(e.line, k, "unknown key in task block");
            }
            let get = |k: &str| required(&b.entries, k, b.line);
            let init_e = get("initial_system")?;
            let init = complex_list_entry("initial_system", init_e)?;
            check_len("initial_system", init_e, init.len(), n)?;
            let tgt_e = get("target_system")?;
            let target = complex_list_entry("target_system", tgt_e)?;
            check_len("target_system", tgt_e, target.len(), n)?;
            let t_e = get("T")?;
            let horizon = rational_to_f64(&rational_entry("T", t_e)?);
            if horizon <= 0.0 {
                return Parser::err(t_e.line, "T", "T must be positive");
            }
            let seg_e = get("segments")?;
            let segments = integer_entry("segments", seg_e)?;
            if segments == 0 {
                return Parser::err(seg_e.line, "segments", "segments must be at least 1");
            }
            let mut task = TransferTask::new(
                unit(init, "initial_system", init_e.line)?,
                unit(target, "target_system", tgt_e.line)?,
                horizon,
                m,
            );
            if let Some(e) = b.entries.get("initial_accessor") {
                let acc = complex_list_entry("initial_accessor", e)?;
                check_len("initial_accessor", e, acc.len(), 1 << m)?;
                task.initial_accessor = unit(acc, "initial_accessor", e.line)?;
            }
            let mut options = SynthesisOptions {
                segments,
                ..Default::default()
            };
            if let Some(e) = b.entries.get("max_iters") {
                options.max_iters = integer_entry("max_iters", e)?;
            }
            if let Some(e) = b.entries.get("target_fidelity") {
                options.target_fidelity = rational_to_f64(&rational_entry("target_fidelity", e)?);
            }
            if let Some(e) = b.entries.get("amplitude_cap") {
                options.amplitude_cap = rational_to_f64(&rational_entry("amplitude_cap", e)?);
                if options.amplitude_cap <= 0.0 {
                    return Parser::err(e.line, "amplitude_cap", "amplitude_cap must be positive");
                }
            }
            Some(TaskConfig { task, options })
        }
    };

    Ok(Config { model, task })
}

pub fn parse_config(text: &str) -> Result<Config> {
    let toks = tokenize(text)?;
    let doc = Parser { toks, pos: 0 }.document()?;
    build(doc)
}

pub fn load_config(path: &std::path::Path) -> Result<Config> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    parse_config(&text)
}
