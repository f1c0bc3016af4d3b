//! Decision-point counting over tree-sitter syntax trees.

use tree_sitter::{Node, Parser, Tree};

use crate::corpus::Language;

pub(crate) struct Grammars {
    java: Parser,
    ruby: Parser,
}

impl Grammars {
    pub(crate) fn new() -> Self {
        let mut java = Parser::new();
        java.set_language(&tree_sitter_java::LANGUAGE.into())
            .expect("java grammar ABI matches tree-sitter");
        let mut ruby = Parser::new();
        ruby.set_language(&tree_sitter_ruby::LANGUAGE.into())
            .expect("ruby grammar ABI matches tree-sitter");
        Grammars { java, ruby }
    }

    pub(crate) fn parse(&mut self, source: &str, language: &Language) -> Option<Tree> {
        let parser = match language {
            Language::Java => &mut self.java,
            Language::Ruby => &mut self.ruby,
            Language::Other(_) => return None,
        };
        parser.parse(source, None)
    }
}

fn operator_of<'a>(node: &Node, src: &'a [u8]) -> &'a str {
    node.child_by_field_name("operator")
        .and_then(|op| op.utf8_text(src).ok())
        .unwrap_or("")
}

fn java_decision(node: &Node, src: &[u8]) -> bool {
    match node.kind() {
        "if_statement" | "for_statement" | "enhanced_for_statement" | "while_statement" | "do_statement"
        | "catch_clause" | "ternary_expression" => true,
        // `default` labels are not branches of their own.
        "switch_label" => node.child(0).is_some_and(|c| c.kind() == "case"),
        "binary_expression" => matches!(operator_of(node, src), "&&" | "||"),
        _ => false,
    }
}

fn ruby_decision(node: &Node, src: &[u8]) -> bool {
    match node.kind() {
        "if" | "elsif" | "unless" | "if_modifier" | "unless_modifier" | "while" | "until" | "while_modifier"
        | "until_modifier" | "for" | "when" | "rescue" | "rescue_modifier" | "conditional" => true,
        "binary" => matches!(operator_of(node, src), "&&" | "||" | "and" | "or"),
        _ => false,
    }
}

/// Counts decision nodes and collects syntax-error locations.
pub(crate) fn count(tree: &Tree, source: &str, language: &Language) -> (u32, Vec<String>) {
    let src = source.as_bytes();
    let is_decision: fn(&Node, &[u8]) -> bool = match language {
        Language::Java => java_decision,
        _ => ruby_decision,
    };
    let mut points = 0;
    let mut diagnostics = Vec::new();
    let mut cursor = tree.walk();
    'walk: loop {
        let node = cursor.node();
        if node.is_error() || node.is_missing() {
            let pos = node.start_position();
            let what = if node.is_missing() { "missing" } else { "unexpected" };
            diagnostics.push(format!("{}:{}: {what} {}", pos.row + 1, pos.column + 1, node.kind()));
        } else if node.is_named() && is_decision(&node, src) {
            points += 1;
        }
        if cursor.goto_first_child() {
            continue;
        }
        while !cursor.goto_next_sibling() {
            if !cursor.goto_parent() {
                break 'walk;
            }
        }
    }
    (points, diagnostics)
}
