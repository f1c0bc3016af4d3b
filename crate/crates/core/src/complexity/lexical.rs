//! Token-level decision-point counter.
//!
//! Used when the grammar-backed parse reports errors. It recognises the same
//! constructs as the tree walk, but by keyword and operator matching after
//! stripping comments and string/char literals. Known blind spots: branches
//! inside Ruby string interpolation, `%w`/regex literals containing keywords,
//! and pattern-matching guards.

use crate::corpus::Language;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Word(&'a str),
    Punct(&'a str),
}

const MULTI_OPS: [&str; 6] = ["&&=", "||=", "&&", "||", "::", "->"];

fn is_word_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_' || c == b'$' || c == b'@' || c >= 0x80
}

fn is_word_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'$' || c >= 0x80
}

/// Skips a quoted literal starting at `i` (which holds the quote). Returns
/// the index after the closing quote.
fn skip_quoted(b: &[u8], i: usize, quote: u8) -> usize {
    let mut j = i + 1;
    while j < b.len() {
        match b[j] {
            b'\\' => j += 2,
            c if c == quote => return j + 1,
            _ => j += 1,
        }
    }
    b.len()
}

fn tokenize_java(src: &str) -> Vec<Tok<'_>> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if b[i..].starts_with(b"//") {
            i = memchr_or_end(b, i, b'\n');
        } else if b[i..].starts_with(b"/*") {
            i = find_or_end(b, i + 2, b"*/");
        } else if b[i..].starts_with(b"\"\"\"") {
            i = find_or_end(b, i + 3, b"\"\"\"");
        } else if c == b'"' || c == b'\'' {
            i = skip_quoted(b, i, c);
        } else if is_word_start(c) {
            let start = i;
            while i < b.len() && is_word_char(b[i]) {
                i += 1;
            }
            out.push(Tok::Word(&src[start..i]));
        } else if c.is_ascii_digit() {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'.' || b[i] == b'_') {
                i += 1;
            }
        } else {
            let op = MULTI_OPS.iter().find(|op| b[i..].starts_with(op.as_bytes()));
            let len = op.map_or(1, |op| op.len());
            out.push(Tok::Punct(&src[i..i + len]));
            i += len;
        }
    }
    out
}

fn tokenize_ruby(src: &str) -> Vec<Tok<'_>> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line_start = true;
    while i < b.len() {
        let c = b[i];
        if line_start && b[i..].starts_with(b"=begin") {
            i = find_or_end(b, i, b"\n=end");
            i = memchr_or_end(b, i, b'\n');
            continue;
        }
        if line_start && b[i..].starts_with(b"__END__") {
            break;
        }
        line_start = false;
        if c == b'\n' {
            line_start = true;
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'#' {
            i = memchr_or_end(b, i, b'\n');
        } else if c == b'"' || c == b'\'' || c == b'`' {
            i = skip_quoted(b, i, c);
        } else if c == b'?' {
            // `?` + space is a ternary; `?x` is a character literal.
            if b.get(i + 1).is_none_or(|n| n.is_ascii_whitespace()) {
                out.push(Tok::Punct("?"));
                i += 1;
            } else {
                i += if b.get(i + 1) == Some(&b'\\') { 3 } else { 2 };
            }
        } else if is_word_start(c) {
            let start = i;
            while i < b.len() && is_word_char(b[i]) {
                i += 1;
            }
            // Predicate/bang method names such as `even?` or `map!`, but not
            // `!=` and not the `?` of a ternary written without spaces.
            if i < b.len() && (b[i] == b'?' || b[i] == b'!') && b.get(i + 1) != Some(&b'=') {
                let next = b.get(i + 1).copied();
                if b[i] == b'!' || !next.is_some_and(|n| n == b':' || is_word_char(n)) {
                    i += 1;
                }
            }
            out.push(Tok::Word(&src[start..i]));
        } else if c.is_ascii_digit() {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || (b[i] == b'.' && b.get(i + 1).is_some_and(|d| d.is_ascii_digit()))) {
                i += 1;
            }
        } else {
            let op = MULTI_OPS.iter().find(|op| b[i..].starts_with(op.as_bytes()));
            let len = op.map_or(1, |op| op.len());
            out.push(Tok::Punct(&src[i..i + len]));
            i += len;
        }
    }
    out
}

fn memchr_or_end(b: &[u8], from: usize, needle: u8) -> usize {
    b[from.min(b.len())..]
        .iter()
        .position(|&c| c == needle)
        .map_or(b.len(), |p| from + p)
}

fn find_or_end(b: &[u8], from: usize, needle: &[u8]) -> usize {
    if from >= b.len() {
        return b.len();
    }
    b[from..]
        .windows(needle.len())
        .position(|w| w == needle)
        .map_or(b.len(), |p| from + p + needle.len())
}

const JAVA_KEYWORDS: [&str; 5] = ["if", "for", "while", "case", "catch"];
const RUBY_KEYWORDS: [&str; 10] = ["if", "elsif", "unless", "while", "until", "for", "when", "rescue", "and", "or"];

fn count_java(src: &str) -> u32 {
    let toks = tokenize_java(src);
    let mut n = 0;
    for (i, t) in toks.iter().enumerate() {
        match t {
            Tok::Word(w) if JAVA_KEYWORDS.contains(w) => {
                // `x.for` style member names are not statements.
                if !matches!(i.checked_sub(1).map(|j| &toks[j]), Some(Tok::Punct("."))) {
                    n += 1;
                }
            }
            Tok::Punct("&&") | Tok::Punct("||") => n += 1,
            Tok::Punct("?") => {
                let wildcard = matches!(
                    toks.get(i + 1),
                    Some(Tok::Word("extends" | "super")) | Some(Tok::Punct(">" | ","))
                );
                if !wildcard {
                    n += 1;
                }
            }
            _ => {}
        }
    }
    n
}

fn count_ruby(src: &str) -> u32 {
    let toks = tokenize_ruby(src);
    let mut n = 0;
    for (i, t) in toks.iter().enumerate() {
        match t {
            Tok::Word(w) if RUBY_KEYWORDS.contains(w) => {
                let prev = i.checked_sub(1).map(|j| &toks[j]);
                let next = toks.get(i + 1);
                let member = matches!(prev, Some(Tok::Punct("." | ":")) | Some(Tok::Word("def")));
                let hash_key = matches!(next, Some(Tok::Punct(":")));
                if !member && !hash_key {
                    n += 1;
                }
            }
            Tok::Punct("&&") | Tok::Punct("||") | Tok::Punct("?") => n += 1,
            _ => {}
        }
    }
    n
}

/// Decision points by lexical matching; `None` for languages without a
/// construct table.
pub fn count_decision_points(source: &str, language: &Language) -> Option<u32> {
    match language {
        Language::Java => Some(count_java(source)),
        Language::Ruby => Some(count_ruby(source)),
        Language::Other(_) => None,
    }
}
