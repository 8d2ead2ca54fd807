//! A small regular-expression engine for solution patterns.
//!
//! Supported syntax:
//!
//! - literals, and `\` escapes of any ASCII punctuation
//! - `.` (any character except `\n`)
//! - classes `[abc]`, `[^a-z]`, with `\d \w \s` and their negations inside
//! - `\d \D \w \W \s \S` (ASCII definitions), `\n \t \r`
//! - anchors `^` and `$` (start and end of the whole text)
//! - `*`, `+`, `?`, `{n}`, `{n,}`, `{n,m}`, each optionally followed by `?`
//! - alternation `|`, groups `( )` and `(?: )`
//!
//! Backreferences, lookaround, word boundaries and inline flags are not
//! supported and fail to compile. Matching is an unanchored search run on a
//! Pike VM, so it takes `O(text × program)` time with no backtracking.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Largest count accepted in `{n,m}`.
pub const MAX_REPEAT: u32 = 1000;
/// Largest compiled program, in instructions.
pub const MAX_PROGRAM: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegexError {
    /// Byte offset into the pattern.
    pub offset: usize,
    pub kind: RegexErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegexErrorKind {
    UnclosedGroup,
    UnopenedGroup,
    UnclosedClass,
    EmptyClass,
    BadRange,
    DanglingEscape,
    UnsupportedEscape(char),
    UnsupportedGroup,
    MissingRepeatOperand,
    BadRepeat,
    RepeatTooLarge,
    ProgramTooLarge,
}

impl fmt::Display for RegexError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use RegexErrorKind::*;
        let what = match &self.kind {
            UnclosedGroup => "unclosed group",
            UnopenedGroup => "unopened group",
            UnclosedClass => "unclosed character class",
            EmptyClass => "empty character class",
            BadRange => "invalid class range",
            DanglingEscape => "incomplete escape",
            UnsupportedEscape(c) => return write!(f, "unsupported escape \\{c} at offset {}", self.offset),
            UnsupportedGroup => "unsupported group syntax",
            MissingRepeatOperand => "repetition operator missing expression",
            BadRepeat => "malformed counted repetition",
            RepeatTooLarge => "repetition count too large",
            ProgramTooLarge => "pattern too large",
        };
        write!(f, "{what} at offset {}", self.offset)
    }
}

impl core::error::Error for RegexError {}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Class {
    ranges: Vec<(char, char)>,
    negated: bool,
}

impl Class {
    fn contains(&self, c: char) -> bool {
        self.ranges.iter().any(|&(lo, hi)| lo <= c && c <= hi) != self.negated
    }
}

const DIGIT: &[(char, char)] = &[('0', '9')];
const WORD: &[(char, char)] = &[('0', '9'), ('A', 'Z'), ('_', '_'), ('a', 'z')];
const SPACE: &[(char, char)] = &[('\t', '\r'), (' ', ' ')];

/// Complement of sorted ranges over all of `char`.
fn complement(ranges: &[(char, char)]) -> Vec<(char, char)> {
    let mut out = Vec::new();
    let mut next = Some('\0');
    for &(lo, hi) in ranges {
        if let Some(start) = next {
            if start < lo {
                out.push((start, prev_char(lo)));
            }
        }
        next = next_char(hi);
    }
    if let Some(start) = next {
        out.push((start, char::MAX));
    }
    out
}

fn next_char(c: char) -> Option<char> {
    match c {
        char::MAX => None,
        '\u{D7FF}' => Some('\u{E000}'),
        _ => char::from_u32(c as u32 + 1),
    }
}

fn prev_char(c: char) -> char {
    match c {
        '\u{E000}' => '\u{D7FF}',
        _ => char::from_u32(c as u32 - 1).expect("caller ensures c > '\\0'"),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Empty,
    Char(char),
    Any,
    Class(Class),
    Start,
    End,
    Concat(Vec<Node>),
    Alt(Vec<Node>),
    Repeat {
        node: Box<Node>,
        min: u32,
        max: Option<u32>,
    },
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, kind: RegexErrorKind) -> RegexError {
        RegexError { offset: self.pos, kind }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn parse(mut self) -> Result<Node, RegexError> {
        let node = self.alternation(0)?;
        if self.pos < self.src.len() {
            // only a stray ')' stops the top-level alternation early
            return Err(self.err(RegexErrorKind::UnopenedGroup));
        }
        Ok(node)
    }

    fn alternation(&mut self, depth: usize) -> Result<Node, RegexError> {
        let mut branches = vec![self.concat(depth)?];
        while self.eat('|') {
            branches.push(self.concat(depth)?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().unwrap()
        } else {
            Node::Alt(branches)
        })
    }

    fn concat(&mut self, depth: usize) -> Result<Node, RegexError> {
        let mut items = Vec::new();
        loop {
            match self.peek() {
                None | Some('|') => break,
                Some(')') if depth > 0 => break,
                Some(')') => return Err(self.err(RegexErrorKind::UnopenedGroup)),
                Some('*' | '+' | '?') => return Err(self.err(RegexErrorKind::MissingRepeatOperand)),
                Some('{') => return Err(self.err(RegexErrorKind::MissingRepeatOperand)),
                Some(_) => {
                    let atom = self.atom(depth)?;
                    let atom = self.quantifiers(atom)?;
                    items.push(atom);
                }
            }
        }
        Ok(match items.len() {
            0 => Node::Empty,
            1 => items.pop().unwrap(),
            _ => Node::Concat(items),
        })
    }

    fn quantifiers(&mut self, atom: Node) -> Result<Node, RegexError> {
        let (min, max) = match self.peek() {
            Some('*') => {
                self.bump();
                (0, None)
            }
            Some('+') => {
                self.bump();
                (1, None)
            }
            Some('?') => {
                self.bump();
                (0, Some(1))
            }
            Some('{') => self.counted()?,
            _ => return Ok(atom),
        };
        // laziness does not change whether a match exists
        self.eat('?');
        if matches!(self.peek(), Some('*' | '+' | '?' | '{')) {
            return Err(self.err(RegexErrorKind::BadRepeat));
        }
        Ok(Node::Repeat {
            node: Box::new(atom),
            min,
            max,
        })
    }

    fn counted(&mut self) -> Result<(u32, Option<u32>), RegexError> {
        let open = self.pos;
        self.bump();
        let min = self.number().ok_or(RegexError {
            offset: open,
            kind: RegexErrorKind::BadRepeat,
        })?;
        let max = if self.eat(',') {
            if self.peek() == Some('}') {
                None
            } else {
                Some(self.number().ok_or_else(|| self.err(RegexErrorKind::BadRepeat))?)
            }
        } else {
            Some(min)
        };
        if !self.eat('}') {
            return Err(self.err(RegexErrorKind::BadRepeat));
        }
        if min > MAX_REPEAT || max.is_some_and(|m| m > MAX_REPEAT) {
            return Err(RegexError {
                offset: open,
                kind: RegexErrorKind::RepeatTooLarge,
            });
        }
        if max.is_some_and(|m| m < min) {
            return Err(RegexError {
                offset: open,
                kind: RegexErrorKind::BadRepeat,
            });
        }
        Ok((min, max))
    }

    fn number(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return None;
        }
        // saturate so oversized counts report RepeatTooLarge
        Some(self.src[start..self.pos].parse().unwrap_or(u32::MAX))
    }

    fn atom(&mut self, depth: usize) -> Result<Node, RegexError> {
        let start = self.pos;
        let c = self.bump().expect("caller checked peek");
        Ok(match c {
            '(' => {
                if self.eat('?') && !self.eat(':') {
                    return Err(RegexError {
                        offset: start,
                        kind: RegexErrorKind::UnsupportedGroup,
                    });
                }
                let inner = self.alternation(depth + 1)?;
                if !self.eat(')') {
                    return Err(RegexError {
                        offset: start,
                        kind: RegexErrorKind::UnclosedGroup,
                    });
                }
                inner
            }
            '[' => Node::Class(self.class(start)?),
            '.' => Node::Any,
            '^' => Node::Start,
            '$' => Node::End,
            '\\' => match self.escape(start)? {
                Escaped::Char(c) => Node::Char(c),
                Escaped::Class(class) => Node::Class(class),
            },
            c => Node::Char(c),
        })
    }

    fn escape(&mut self, start: usize) -> Result<Escaped, RegexError> {
        let c = self.bump().ok_or(RegexError {
            offset: start,
            kind: RegexErrorKind::DanglingEscape,
        })?;
        let class = |ranges: &[(char, char)], negated| {
            Escaped::Class(Class {
                ranges: ranges.to_vec(),
                negated,
            })
        };
        Ok(match c {
            'd' => class(DIGIT, false),
            'D' => class(DIGIT, true),
            'w' => class(WORD, false),
            'W' => class(WORD, true),
            's' => class(SPACE, false),
            'S' => class(SPACE, true),
            'n' => Escaped::Char('\n'),
            't' => Escaped::Char('\t'),
            'r' => Escaped::Char('\r'),
            c if c.is_ascii_punctuation() => Escaped::Char(c),
            c => {
                return Err(RegexError {
                    offset: start,
                    kind: RegexErrorKind::UnsupportedEscape(c),
                })
            }
        })
    }

    fn class(&mut self, start: usize) -> Result<Class, RegexError> {
        let unclosed = RegexError {
            offset: start,
            kind: RegexErrorKind::UnclosedClass,
        };
        let negated = self.eat('^');
        let mut ranges: Vec<(char, char)> = Vec::new();
        let mut first = true;
        loop {
            let item_start = self.pos;
            let c = self.bump().ok_or_else(|| unclosed.clone())?;
            let lo = match c {
                ']' if !first => break,
                '[' => {
                    return Err(RegexError {
                        offset: item_start,
                        kind: RegexErrorKind::UnsupportedGroup,
                    })
                }
                '\\' => match self.escape(item_start)? {
                    Escaped::Char(c) => c,
                    Escaped::Class(cls) => {
                        let rs = if cls.negated {
                            complement(&cls.ranges)
                        } else {
                            cls.ranges
                        };
                        ranges.extend(rs);
                        first = false;
                        continue;
                    }
                },
                c => c,
            };
            first = false;
            // a '-' before ']' is literal
            let is_range =
                self.peek() == Some('-') && self.src[self.pos + 1..].chars().next().is_some_and(|n| n != ']');
            if is_range {
                self.bump();
                let hi_start = self.pos;
                let hi = match self.bump().ok_or_else(|| unclosed.clone())? {
                    '\\' => match self.escape(hi_start)? {
                        Escaped::Char(c) => c,
                        Escaped::Class(_) => {
                            return Err(RegexError {
                                offset: hi_start,
                                kind: RegexErrorKind::BadRange,
                            })
                        }
                    },
                    '[' => {
                        return Err(RegexError {
                            offset: hi_start,
                            kind: RegexErrorKind::UnsupportedGroup,
                        })
                    }
                    c => c,
                };
                if hi < lo {
                    return Err(RegexError {
                        offset: item_start,
                        kind: RegexErrorKind::BadRange,
                    });
                }
                ranges.push((lo, hi));
            } else {
                ranges.push((lo, lo));
            }
        }
        ranges.sort_unstable();
        let mut merged: Vec<(char, char)> = Vec::with_capacity(ranges.len());
        for (lo, hi) in ranges {
            match merged.last_mut() {
                Some(last) if next_char(last.1).is_none_or(|n| n >= lo) => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        let class = Class {
            ranges: merged,
            negated,
        };
        let matches_nothing = if negated {
            class.ranges == [('\0', char::MAX)]
        } else {
            class.ranges.is_empty()
        };
        if matches_nothing {
            return Err(RegexError {
                offset: start,
                kind: RegexErrorKind::EmptyClass,
            });
        }
        Ok(class)
    }
}

enum Escaped {
    Char(char),
    Class(Class),
}

#[derive(Clone, Debug, PartialEq)]
enum Inst {
    Char(char),
    Any,
    Class(usize),
    Start,
    End,
    Split(usize, usize),
    Jump(usize),
    Match,
}

struct Compiler {
    prog: Vec<Inst>,
    classes: Vec<Class>,
}

impl Compiler {
    fn emit(&mut self, inst: Inst) -> Result<usize, RegexErrorKind> {
        if self.prog.len() >= MAX_PROGRAM {
            return Err(RegexErrorKind::ProgramTooLarge);
        }
        self.prog.push(inst);
        Ok(self.prog.len() - 1)
    }

    fn compile(&mut self, node: &Node) -> Result<(), RegexErrorKind> {
        match node {
            Node::Empty => {}
            Node::Char(c) => {
                self.emit(Inst::Char(*c))?;
            }
            Node::Any => {
                self.emit(Inst::Any)?;
            }
            Node::Class(c) => {
                self.classes.push(c.clone());
                self.emit(Inst::Class(self.classes.len() - 1))?;
            }
            Node::Start => {
                self.emit(Inst::Start)?;
            }
            Node::End => {
                self.emit(Inst::End)?;
            }
            Node::Concat(items) => {
                for n in items {
                    self.compile(n)?;
                }
            }
            Node::Alt(branches) => {
                let mut exits = Vec::new();
                for (i, b) in branches.iter().enumerate() {
                    if i + 1 < branches.len() {
                        let split = self.emit(Inst::Split(0, 0))?;
                        self.compile(b)?;
                        exits.push(self.emit(Inst::Jump(0))?);
                        let next = self.prog.len();
                        self.prog[split] = Inst::Split(split + 1, next);
                    } else {
                        self.compile(b)?;
                    }
                }
                let end = self.prog.len();
                for j in exits {
                    self.prog[j] = Inst::Jump(end);
                }
            }
            Node::Repeat { node, min, max } => {
                for _ in 0..*min {
                    self.compile(node)?;
                }
                match max {
                    None => {
                        let split = self.emit(Inst::Split(0, 0))?;
                        self.compile(node)?;
                        self.emit(Inst::Jump(split))?;
                        let exit = self.prog.len();
                        self.prog[split] = Inst::Split(split + 1, exit);
                    }
                    Some(max) => {
                        let mut splits = Vec::new();
                        for _ in *min..*max {
                            splits.push(self.emit(Inst::Split(0, 0))?);
                            self.compile(node)?;
                        }
                        let exit = self.prog.len();
                        for s in splits {
                            self.prog[s] = Inst::Split(s + 1, exit);
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A compiled pattern.
#[derive(Clone, Debug)]
pub struct Regex {
    pattern: alloc::string::String,
    prog: Vec<Inst>,
    classes: Vec<Class>,
}

impl PartialEq for Regex {
    fn eq(&self, other: &Self) -> bool {
        self.pattern == other.pattern
    }
}

impl Regex {
    pub fn new(pattern: &str) -> Result<Self, RegexError> {
        let ast = Parser { src: pattern, pos: 0 }.parse()?;
        let mut c = Compiler {
            prog: Vec::new(),
            classes: Vec::new(),
        };
        let too_large = |kind| RegexError { offset: 0, kind };
        c.compile(&ast).map_err(too_large)?;
        c.emit(Inst::Match).map_err(too_large)?;
        Ok(Self {
            pattern: pattern.into(),
            prog: c.prog,
            classes: c.classes,
        })
    }

    pub fn as_str(&self) -> &str {
        &self.pattern
    }

    /// Whether the pattern matches anywhere in `text`.
    pub fn is_match(&self, text: &str) -> bool {
        let chars: Vec<char> = text.chars().collect();
        let n = self.prog.len();
        let mut current = Threads::new(n);
        let mut next = Threads::new(n);
        let mut stack = Vec::new();
        for pos in 0..=chars.len() {
            // unanchored: a new thread may start at every position
            if self.add(&mut current, &mut stack, 0, pos, chars.len()) {
                return true;
            }
            let Some(&c) = chars.get(pos) else { break };
            next.clear();
            for i in 0..current.len() {
                let pc = current.dense[i];
                let step = match self.prog[pc] {
                    Inst::Char(x) => x == c,
                    Inst::Any => c != '\n',
                    Inst::Class(k) => self.classes[k].contains(c),
                    _ => false,
                };
                if step && self.add(&mut next, &mut stack, pc + 1, pos + 1, chars.len()) {
                    return true;
                }
            }
            core::mem::swap(&mut current, &mut next);
        }
        false
    }

    /// Follows empty transitions from `pc` at `pos`; returns `true` on reaching `Match`.
    fn add(&self, list: &mut Threads, stack: &mut Vec<usize>, pc: usize, pos: usize, len: usize) -> bool {
        stack.clear();
        stack.push(pc);
        while let Some(pc) = stack.pop() {
            if !list.insert(pc) {
                continue;
            }
            match self.prog[pc] {
                Inst::Match => return true,
                Inst::Jump(t) => stack.push(t),
                Inst::Split(a, b) => {
                    stack.push(b);
                    stack.push(a);
                }
                Inst::Start if pos == 0 => stack.push(pc + 1),
                Inst::End if pos == len => stack.push(pc + 1),
                _ => {}
            }
        }
        false
    }
}

/// Sparse set of program counters.
struct Threads {
    dense: Vec<usize>,
    sparse: Vec<usize>,
}

impl Threads {
    fn new(n: usize) -> Self {
        Self {
            dense: Vec::with_capacity(n),
            sparse: vec![0; n],
        }
    }

    fn len(&self) -> usize {
        self.dense.len()
    }

    fn insert(&mut self, pc: usize) -> bool {
        let i = self.sparse[pc];
        if i < self.dense.len() && self.dense[i] == pc {
            return false;
        }
        self.sparse[pc] = self.dense.len();
        self.dense.push(pc);
        true
    }

    fn clear(&mut self) {
        self.dense.clear();
    }
}
