//! Source rewrites for the metamorphic complexity properties. They assume
//! the line layout produced by `synth`.

use rand::Rng;

fn java_slots(lines: &[&str]) -> Vec<usize> {
    let start = lines.iter().position(|l| l.contains("int acc = 0;")).unwrap();
    let end = lines.iter().position(|l| l.contains("System.out.println(acc);")).unwrap();
    (start..end)
        .filter(|&i| {
            let t = lines[i].trim_end();
            t.ends_with(';') || t.ends_with('{') || t.ends_with('}')
        })
        .filter(|&i| !lines[i + 1].trim_start().starts_with("else"))
        .collect()
}

fn splice(lines: &[&str], after: usize, insert: &str) -> String {
    let mut out = String::new();
    for (i, l) in lines.iter().enumerate() {
        out.push_str(l);
        out.push('\n');
        if i == after {
            out.push_str(insert);
            out.push('\n');
        }
    }
    out
}

/// Adds exactly one `if` at a random statement position.
pub fn insert_if(src: &str, lang: &str, rng: &mut impl Rng) -> String {
    let lines: Vec<&str> = src.lines().collect();
    let c = rng.gen_range(1..100);
    if lang == "java" {
        let slots = java_slots(&lines);
        let at = slots[rng.gen_range(0..slots.len())];
        let stmt = match rng.gen_range(0..3) {
            0 => format!("        if (acc > {c}) {{ acc = {c}; }}"),
            1 => format!("        if (n == {c}) acc++;"),
            _ => format!("        if (n != {c}) {{\n            acc += n;\n        }} else {{\n            acc -= n;\n        }}"),
        };
        splice(&lines, at, &stmt)
    } else {
        let at = rng.gen_range(1..lines.len() - 1);
        let stmt = match rng.gen_range(0..3) {
            0 => format!("if acc > {c}\n  acc = {c}\nend"),
            1 => format!("acc = {c} if n == {c}"),
            _ => format!("if n > {c} then acc -= 1 else acc += 1 end"),
        };
        splice(&lines, at, &stmt)
    }
}

/// Comment lines full of decision keywords, blank lines, and re-indentation.
pub fn add_noise(src: &str, lang: &str, rng: &mut impl Rng) -> String {
    let lines: Vec<&str> = src.lines().collect();
    let mut out = String::new();
    let slots: Vec<usize> = if lang == "java" { java_slots(&lines) } else { (1..lines.len() - 1).collect() };
    for (i, l) in lines.iter().enumerate() {
        let indent = " ".repeat(rng.gen_range(0..4));
        out.push_str(&indent);
        out.push_str(l);
        if lang == "java" && l.trim_end().ends_with(';') && rng.gen_bool(0.3) {
            out.push_str(" // if (a && b) ? c : d; while case");
        }
        out.push('\n');
        if rng.gen_bool(0.3) {
            out.push('\n');
        }
        if slots.contains(&i) && rng.gen_bool(0.4) {
            if lang == "java" {
                out.push_str(match rng.gen_range(0..2) {
                    0 => "    // for each if, else if, while || catch\n",
                    _ => "    /* if (x) { while (y && z) {} }\n       case 1: ? : */\n",
                });
            } else {
                out.push_str(match rng.gen_range(0..2) {
                    0 => "# if x && y then unless z or w while ? when rescue\n",
                    _ => "=begin\nif a\n  b unless c\nend\n=end\n",
                });
            }
        }
    }
    out
}
