//! De Bruijn terms and their binary code.
//!
//! A term is an index `n` (written as the bit string `1^n 0`), an
//! abstraction `λM` (`00 M`), or an application `M N` (`01 M N`). The size
//! of a term is the length of its code: `|n| = n + 1`, `|λM| = |M| + 2`,
//! `|M N| = |M| + |N| + 2`. Indices are 1-based.
//!
//! Every traversal in this module (size, free indices, encode, decode,
//! printing, parsing, clone, equality, drop) uses an explicit worklist, so
//! terms with millions of nodes are safe regardless of machine stack size.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::mem;
use std::str::FromStr;

use thiserror::Error;

/// A de Bruijn term. Structural equality is term equality.
#[derive(Debug)]
pub enum Term {
    /// A de Bruijn index, at least 1.
    Index(u64),
    /// An abstraction.
    Abs(Box<Term>),
    /// An application.
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn abs(body: Term) -> Term {
        Term::Abs(Box::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    /// Length of the binary code of the term.
    pub fn size(&self) -> u64 {
        let mut total = 0u64;
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Term::Index(i) => total += i + 1,
                Term::Abs(body) => {
                    total += 2;
                    stack.push(body);
                }
                Term::App(fun, arg) => {
                    total += 2;
                    stack.push(fun);
                    stack.push(arg);
                }
            }
        }
        total
    }

    /// Smallest `m` such that the term has at most `m` distinct free
    /// indices: the maximum over free occurrences of the index value minus
    /// the number of enclosing lambdas, or 0 if every occurrence is bound.
    pub fn free_bound(&self) -> u64 {
        let mut best = 0u64;
        let mut stack = vec![(self, 0u64)];
        while let Some((t, depth)) = stack.pop() {
            match t {
                Term::Index(i) => {
                    if *i > depth {
                        best = best.max(i - depth);
                    }
                }
                Term::Abs(body) => stack.push((body, depth + 1)),
                Term::App(fun, arg) => {
                    stack.push((fun, depth));
                    stack.push((arg, depth));
                }
            }
        }
        best
    }

    /// True iff the term has no free index occurrence.
    pub fn is_closed(&self) -> bool {
        self.free_bound() == 0
    }

    /// The binary code of the term. Its length equals `self.size()`.
    pub fn encode(&self) -> BitString {
        let mut out = String::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Term::Index(i) => {
                    for _ in 0..*i {
                        out.push('1');
                    }
                    out.push('0');
                }
                Term::Abs(body) => {
                    out.push_str("00");
                    stack.push(body);
                }
                Term::App(fun, arg) => {
                    out.push_str("01");
                    stack.push(arg);
                    stack.push(fun);
                }
            }
        }
        BitString(out)
    }
}

// Frames shared by the tree-building loops in `decode` and the samplers:
// an abstraction waiting for its body, an application waiting for its
// function, and an application that has its function and waits for the
// argument.
pub(crate) enum BuildFrame {
    Abs,
    AppFun,
    AppArg(Term),
}

/// Folds a completed subterm into the pending frames. Returns the finished
/// term once no frame is left, or `None` when the next subterm must still
/// be produced.
pub(crate) fn fold_complete(frames: &mut Vec<BuildFrame>, mut t: Term) -> Option<Term> {
    loop {
        match frames.pop() {
            None => return Some(t),
            Some(BuildFrame::Abs) => t = Term::abs(t),
            Some(BuildFrame::AppFun) => {
                frames.push(BuildFrame::AppArg(t));
                return None;
            }
            Some(BuildFrame::AppArg(fun)) => t = Term::app(fun, t),
        }
    }
}

impl Clone for Term {
    fn clone(&self) -> Term {
        let mut frames: Vec<BuildFrame> = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            let leaf = match t {
                Term::Index(i) => Term::Index(*i),
                Term::Abs(body) => {
                    frames.push(BuildFrame::Abs);
                    stack.push(body);
                    continue;
                }
                Term::App(fun, arg) => {
                    frames.push(BuildFrame::AppFun);
                    stack.push(arg);
                    stack.push(fun);
                    continue;
                }
            };
            if let Some(done) = fold_complete(&mut frames, leaf) {
                return done;
            }
        }
        unreachable!("clone walk ended with pending frames")
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        let mut stack = vec![(self, other)];
        while let Some(pair) = stack.pop() {
            match pair {
                (Term::Index(i), Term::Index(j)) => {
                    if i != j {
                        return false;
                    }
                }
                (Term::Abs(a), Term::Abs(b)) => stack.push((a, b)),
                (Term::App(f1, a1), Term::App(f2, a2)) => {
                    stack.push((f1, f2));
                    stack.push((a1, a2));
                }
                _ => return false,
            }
        }
        true
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        // Preorder tag stream; fixed arities make it injective.
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Term::Index(i) => {
                    state.write_u8(0);
                    state.write_u64(*i);
                }
                Term::Abs(body) => {
                    state.write_u8(1);
                    stack.push(body);
                }
                Term::App(fun, arg) => {
                    state.write_u8(2);
                    stack.push(arg);
                    stack.push(fun);
                }
            }
        }
    }
}

impl Drop for Term {
    fn drop(&mut self) {
        fn detach_children(t: &mut Term, stack: &mut Vec<Term>) {
            match t {
                Term::Index(_) => {}
                Term::Abs(body) => {
                    let child = mem::replace(body.as_mut(), Term::Index(1));
                    if !matches!(child, Term::Index(_)) {
                        stack.push(child);
                    }
                }
                Term::App(fun, arg) => {
                    for slot in [fun, arg] {
                        let child = mem::replace(slot.as_mut(), Term::Index(1));
                        if !matches!(child, Term::Index(_)) {
                            stack.push(child);
                        }
                    }
                }
            }
        }

        if matches!(self, Term::Index(_)) {
            return;
        }
        let mut stack = Vec::new();
        detach_children(self, &mut stack);
        while let Some(mut t) = stack.pop() {
            detach_children(&mut t, &mut stack);
            // t now has only leaf children, so its own drop stays shallow
        }
    }
}

/// The concrete syntax: `\` for lambda, decimal de Bruijn indices,
/// parentheses; application associates to the left and an abstraction body
/// extends as far right as possible.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        #[derive(Clone, Copy, PartialEq)]
        enum Ctx {
            Top,
            Fun,
            Arg,
        }
        enum Item<'a> {
            T(&'a Term, Ctx),
            Lit(&'static str),
        }

        let mut stack = vec![Item::T(self, Ctx::Top)];
        while let Some(item) = stack.pop() {
            match item {
                Item::Lit(s) => f.write_str(s)?,
                Item::T(Term::Index(i), _) => write!(f, "{}", i)?,
                Item::T(t @ Term::Abs(body), ctx) => {
                    if ctx == Ctx::Top {
                        f.write_str("\\ ")?;
                        stack.push(Item::T(body, Ctx::Top));
                    } else {
                        stack.push(Item::Lit(")"));
                        stack.push(Item::T(t, Ctx::Top));
                        stack.push(Item::Lit("("));
                    }
                }
                Item::T(t @ Term::App(fun, arg), ctx) => {
                    if ctx == Ctx::Arg {
                        stack.push(Item::Lit(")"));
                        stack.push(Item::T(t, Ctx::Top));
                        stack.push(Item::Lit("("));
                    } else {
                        stack.push(Item::T(arg, Ctx::Arg));
                        stack.push(Item::Lit(" "));
                        stack.push(Item::T(fun, Ctx::Fun));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum SyntaxErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("expected a term")]
    ExpectedTerm,
    #[error("unmatched ')'")]
    UnmatchedParen,
    #[error("unclosed '('")]
    UnclosedParen,
    #[error("de Bruijn indices start at 1")]
    ZeroIndex,
    #[error("index literal does not fit in 64 bits")]
    IndexOverflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("syntax error at byte {position}: {kind}")]
pub struct SyntaxError {
    pub position: usize,
    pub kind: SyntaxErrorKind,
}

impl SyntaxError {
    fn new(position: usize, kind: SyntaxErrorKind) -> Self {
        SyntaxError { position, kind }
    }
}

impl FromStr for Term {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Term, SyntaxError> {
        enum Kind {
            Root,
            Paren { open: usize },
            Lambda,
        }
        struct Seq {
            kind: Kind,
            items: Vec<Term>,
        }
        fn fold(items: Vec<Term>, pos: usize) -> Result<Term, SyntaxError> {
            items
                .into_iter()
                .reduce(Term::app)
                .ok_or_else(|| SyntaxError::new(pos, SyntaxErrorKind::ExpectedTerm))
        }

        let bytes = s.as_bytes();
        let mut stack = vec![Seq { kind: Kind::Root, items: Vec::new() }];
        let mut pos = 0;
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos == bytes.len() {
                // Fold lambdas down to the root sequence.
                loop {
                    let seq = stack.pop().expect("root frame present");
                    let t = fold(seq.items, pos)?;
                    match seq.kind {
                        Kind::Root => return Ok(t),
                        Kind::Lambda => stack
                            .last_mut()
                            .expect("lambda has a parent frame")
                            .items
                            .push(Term::abs(t)),
                        Kind::Paren { open } => {
                            return Err(SyntaxError::new(open, SyntaxErrorKind::UnclosedParen))
                        }
                    }
                }
            }
            match bytes[pos] {
                b'\\' => {
                    stack.push(Seq { kind: Kind::Lambda, items: Vec::new() });
                    pos += 1;
                }
                b'(' => {
                    stack.push(Seq { kind: Kind::Paren { open: pos }, items: Vec::new() });
                    pos += 1;
                }
                b')' => {
                    loop {
                        if matches!(stack.last().expect("nonempty").kind, Kind::Root) {
                            return Err(SyntaxError::new(pos, SyntaxErrorKind::UnmatchedParen));
                        }
                        let seq = stack.pop().expect("nonempty");
                        let t = fold(seq.items, pos)?;
                        let parent = stack.last_mut().expect("frame below non-root");
                        match seq.kind {
                            Kind::Lambda => parent.items.push(Term::abs(t)),
                            Kind::Paren { .. } => {
                                parent.items.push(t);
                                break;
                            }
                            Kind::Root => unreachable!(),
                        }
                    }
                    pos += 1;
                }
                b'0'..=b'9' => {
                    let start = pos;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                    let digits = &s[start..pos];
                    let value: u64 = digits
                        .parse()
                        .map_err(|_| SyntaxError::new(start, SyntaxErrorKind::IndexOverflow))?;
                    if value == 0 {
                        return Err(SyntaxError::new(start, SyntaxErrorKind::ZeroIndex));
                    }
                    stack.last_mut().expect("nonempty").items.push(Term::Index(value));
                }
                other => {
                    let ch = s[pos..].chars().next().unwrap_or(other as char);
                    return Err(SyntaxError::new(pos, SyntaxErrorKind::UnexpectedChar(ch)));
                }
            }
        }
    }
}

/// A finite sequence of bits, externally an ASCII string of '0'/'1'.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitString(String);

impl BitString {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses the code of exactly one term.
    pub fn decode(&self) -> Result<Term, DecodeError> {
        let bytes = self.0.as_bytes();
        let mut frames: Vec<BuildFrame> = Vec::new();
        let mut pos = 0;
        loop {
            if pos == bytes.len() {
                return Err(DecodeError::MalformedCode { position: pos });
            }
            let leaf = if bytes[pos] == b'0' {
                if pos + 1 == bytes.len() {
                    return Err(DecodeError::MalformedCode { position: pos + 1 });
                }
                frames.push(if bytes[pos + 1] == b'0' {
                    BuildFrame::Abs
                } else {
                    BuildFrame::AppFun
                });
                pos += 2;
                continue;
            } else {
                let start = pos;
                while pos < bytes.len() && bytes[pos] == b'1' {
                    pos += 1;
                }
                if pos == bytes.len() {
                    // a run of 1s with no terminating 0
                    return Err(DecodeError::MalformedCode { position: pos });
                }
                let index = (pos - start) as u64;
                pos += 1;
                Term::Index(index)
            };
            if let Some(done) = fold_complete(&mut frames, leaf) {
                return if pos == bytes.len() {
                    Ok(done)
                } else {
                    Err(DecodeError::TrailingBits { consumed: pos, total: bytes.len() })
                };
            }
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("invalid bit character {found:?} at position {position}")]
pub struct BitParseError {
    pub position: usize,
    pub found: char,
}

impl FromStr for BitString {
    type Err = BitParseError;

    fn from_str(s: &str) -> Result<BitString, BitParseError> {
        for (position, ch) in s.char_indices() {
            if ch != '0' && ch != '1' {
                return Err(BitParseError { position, found: ch });
            }
        }
        Ok(BitString(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DecodeError {
    /// The input ends before one complete term was read.
    #[error("malformed code: input is not a complete term (at bit {position})")]
    MalformedCode { position: usize },
    /// A complete term was read but bits remain.
    #[error("trailing bits: a term ends at bit {consumed} of {total}")]
    TrailingBits { consumed: usize, total: usize },
}
