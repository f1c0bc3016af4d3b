//! Deterministic synthetic CodeNet-style corpus.
//!
//! Every generated Java/Ruby source has a known cyclomatic complexity, and
//! every problem has known submission and acceptance counts, so tests can
//! check the loader and the analyzer against the generator's own record.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const N_PROBLEMS: usize = 150;

#[derive(Clone, Debug)]
pub struct SynthSubmission {
    pub submission_id: String,
    pub language: &'static str,
    pub cc: u32,
}

#[derive(Clone, Debug)]
pub struct SynthProblem {
    pub problem_id: String,
    /// Accepted Java/Ruby submissions whose files exist and are non-empty.
    pub retained: Vec<SynthSubmission>,
    pub total_rows: u64,
    pub accepted_rows: u64,
    pub other_status_rows: u64,
    pub missing: Vec<String>,
    pub empty: Vec<String>,
    pub non_utf8: Vec<String>,
}

pub struct SynthCorpus {
    _dir: tempfile::TempDir,
    pub root: PathBuf,
    pub problems: BTreeMap<String, SynthProblem>,
}

impl SynthCorpus {
    pub fn expected_cc(&self) -> BTreeMap<(String, String), u32> {
        self.problems
            .values()
            .flat_map(|p| {
                p.retained
                    .iter()
                    .map(move |s| ((p.problem_id.clone(), s.submission_id.clone()), s.cc))
            })
            .collect()
    }
}

/// One decision-bearing statement: (java, ruby, decision points).
fn block(rng: &mut ChaCha8Rng, k: usize) -> (String, String, u32) {
    let c = rng.gen_range(1..50);
    match rng.gen_range(0..6) {
        0 => (
            format!("        if (n > {c}) {{\n            acc += {c};\n        }}\n"),
            format!("if n > {c}\n  acc += {c}\nend\n"),
            1,
        ),
        1 => (
            format!("        for (int i{k} = 0; i{k} < n; i{k}++) {{\n            acc += i{k} % {c};\n        }}\n"),
            format!("for i{k} in 0...n\n  acc += i{k} % {c}\nend\n"),
            1,
        ),
        2 => (
            format!("        while (acc > {c} && n > 0) {{\n            acc -= n;\n            n--;\n        }}\n"),
            format!("while acc > {c} && n > 0\n  acc -= n\n  n -= 1\nend\n"),
            2,
        ),
        3 => (
            format!("        acc = n % 2 == 0 ? acc + {c} : acc;\n"),
            format!("acc = n.even? ? acc + {c} : acc\n"),
            1,
        ),
        4 => (
            format!(
                "        if (n < {c} || acc == 0) {{\n            acc++;\n        }} else if (n == {c}) {{\n            acc--;\n        }}\n"
            ),
            format!("if n < {c} || acc == 0\n  acc += 1\nelsif n == {c}\n  acc -= 1\nend\n"),
            3,
        ),
        _ => (
            format!("        // if this were {c} we would stop; while loops for nothing\n        acc += {c};\n"),
            format!("# if this were {c} we would stop\nacc += {c} unless n.zero?\n"),
            0,
        ),
    }
}

/// Ruby's `unless` modifier in the comment-ish block adds a decision point
/// that Java's counterpart does not have.
fn ruby_extra(ruby: &str) -> u32 {
    ruby.matches(" unless ").count() as u32
}

fn java_source(class_tag: usize, blocks: &[(String, String, u32)]) -> String {
    let mut s = String::from("import java.util.*;\n\npublic class Main {\n");
    let _ = writeln!(s, "    static final int TAG = {class_tag};\n");
    s.push_str("    public static void main(String[] args) {\n");
    s.push_str("        Scanner sc = new Scanner(System.in);\n        int n = sc.nextInt();\n        int acc = 0;\n");
    for (j, _, _) in blocks {
        s.push_str(j);
    }
    s.push_str("        System.out.println(acc);\n    }\n}\n");
    s
}

fn ruby_source(tag: usize, blocks: &[(String, String, u32)]) -> String {
    let mut s = format!("# tag {tag}\nn = gets.to_i\nacc = 0\n");
    for (_, r, _) in blocks {
        s.push_str(r);
    }
    s.push_str("puts acc\n");
    s
}

pub fn problem_id(i: usize) -> String {
    format!("p{:05}", i)
}

/// Writes the corpus into a fresh temporary directory.
pub fn build(seed: u64) -> SynthCorpus {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path().to_path_buf();
    let problems = write_corpus(&root, seed);
    SynthCorpus {
        _dir: dir,
        root,
        problems,
    }
}

pub fn write_corpus(root: &Path, seed: u64) -> BTreeMap<String, SynthProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fs::create_dir_all(root.join("metadata")).unwrap();
    let mut list = String::from("id,name\n");
    let mut out = BTreeMap::new();
    let mut sid_counter = 0u64;

    for i in 0..N_PROBLEMS {
        let pid = problem_id(i);
        let _ = writeln!(list, "{pid},Problem {i}");
        let mut meta = String::from("submission_id,problem_id,user_id,date,language,original_language,filename_ext,status\n");
        let mut p = SynthProblem {
            problem_id: pid.clone(),
            retained: Vec::new(),
            total_rows: 0,
            accepted_rows: 0,
            other_status_rows: 0,
            missing: Vec::new(),
            empty: Vec::new(),
            non_utf8: Vec::new(),
        };
        let n_java = 5 + rng.gen_range(0..3);
        let n_ruby = 2 + rng.gen_range(0..3);
        let n_rejected = rng.gen_range(0..6);

        let mut rows: Vec<(&'static str, &'static str, &'static str)> = Vec::new();
        rows.extend(std::iter::repeat_n(("Java", "java", "Accepted"), n_java));
        rows.extend(std::iter::repeat_n(("Ruby", "rb", "Accepted"), n_ruby));
        rows.extend(std::iter::repeat_n(("Java", "java", "Wrong Answer"), n_rejected));
        rows.push(("C++", "cpp", "Accepted"));
        if i % 10 == 3 {
            rows.push(("Ruby", "rb", "Judge Not Available"));
        }
        if i % 25 == 7 {
            rows.push(("Java", "java", "Time Limit Exceeded"));
        }

        for (k, (lang, ext, status)) in rows.into_iter().enumerate() {
            sid_counter += 1;
            let sid = format!("s{:09}", sid_counter * 7 + (i as u64 % 7));
            let _ = writeln!(meta, "{sid},{pid},u{k},1500000000,{lang},{lang} (x),{ext},{status}");
            p.total_rows += 1;
            match status {
                "Accepted" => p.accepted_rows += 1,
                "Judge Not Available" => p.other_status_rows += 1,
                _ => {}
            }
            let dir = root.join("data").join(&pid).join(lang);
            fs::create_dir_all(&dir).unwrap();
            let path = dir.join(format!("{sid}.{ext}"));

            let n_blocks = rng.gen_range(0..6);
            let blocks: Vec<_> = (0..n_blocks).map(|b| block(&mut rng, b)).collect();
            let points: u32 = blocks.iter().map(|b| b.2).sum();
            let retained_lang = matches!(lang, "Java" | "Ruby") && status == "Accepted";

            // A few deliberate defects among accepted Java/Ruby rows.
            if retained_lang && k == 1 && i % 50 == 11 {
                p.missing.push(sid);
                continue;
            }
            if retained_lang && k == 2 && i % 50 == 12 {
                fs::write(&path, b"").unwrap();
                p.empty.push(sid);
                continue;
            }

            let (text, cc) = match lang {
                "Java" => (java_source(i * 100 + k, &blocks), points + 1),
                "Ruby" => {
                    let src = ruby_source(i * 100 + k, &blocks);
                    let cc = points + ruby_extra(&src) + 1;
                    (src, cc)
                }
                _ => ("#include <cstdio>\nint main() { if (1) return 0; }\n".to_string(), 0),
            };
            let mut bytes = text.into_bytes();
            if retained_lang && lang == "Java" && k == 0 && i % 40 == 5 {
                bytes.extend_from_slice(b"// caf\xe9\n");
                p.non_utf8.push(sid.clone());
            }
            fs::write(&path, bytes).unwrap();
            if retained_lang {
                p.retained.push(SynthSubmission {
                    submission_id: sid,
                    language: if lang == "Java" { "java" } else { "ruby" },
                    cc,
                });
            }
        }
        fs::write(root.join("metadata").join(format!("{pid}.csv")), meta).unwrap();
        p.retained.sort_by(|a, b| a.submission_id.cmp(&b.submission_id));
        out.insert(pid, p);
    }
    fs::write(root.join("problem_list.csv"), list).unwrap();
    out
}
