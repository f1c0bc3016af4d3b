//! Brute-force dataset checker that only reads raw files.
//!
//! It deliberately avoids the crate's own types: rows are parsed as generic
//! JSON and checked against the corpus metadata re-read line by line.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use serde_json::Value;

pub struct Expect<'a> {
    pub lang_a: &'a str,
    pub lang_b: &'a str,
    pub n_problems: usize,
    pub n_positive: usize,
    pub n_negative: usize,
}

/// `(problem, submission) -> (language, status, ext)` from every metadata file.
fn metadata(corpus: &Path) -> BTreeMap<(String, String), (String, String, String)> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(corpus.join("metadata")).unwrap() {
        let text = fs::read_to_string(entry.unwrap().path()).unwrap();
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().unwrap().split(',').collect();
        let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
        let (sid, pid, lang, status, ext) = (
            col("submission_id"),
            col("problem_id"),
            col("language"),
            col("status"),
            col("filename_ext"),
        );
        for line in lines.filter(|l| !l.is_empty()) {
            let f: Vec<&str> = line.split(',').collect();
            out.insert(
                (f[pid].to_string(), f[sid].to_string()),
                (f[lang].to_string(), f[status].to_string(), f[ext].to_string()),
            );
        }
    }
    out
}

/// Returns every violated invariant; empty means the file is sound.
pub fn verify_dataset(path: &Path, corpus: &Path, expect: &Expect) -> Vec<String> {
    let mut problems = Vec::new();
    let meta = metadata(corpus);
    let text = fs::read_to_string(path).unwrap();
    let rows: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();

    if rows.len() != expect.n_positive + expect.n_negative {
        problems.push(format!("{} rows, want {}", rows.len(), expect.n_positive + expect.n_negative));
    }
    let positives = rows.iter().filter(|r| r["label"] == 1).count();
    let negatives = rows.iter().filter(|r| r["label"] == 0).count();
    if positives != expect.n_positive || negatives != expect.n_negative {
        problems.push(format!("balance {positives}/{negatives}"));
    }
    if positives + negatives != rows.len() {
        problems.push("label outside {0,1}".into());
    }

    let ids: BTreeSet<u64> = rows.iter().map(|r| r["pair_id"].as_u64().unwrap()).collect();
    if ids != (0..rows.len() as u64).collect() {
        problems.push("pair ids are not 0..n".into());
    }

    let mut touched = BTreeSet::new();
    let mut seen = HashSet::new();
    for r in &rows {
        let id = &r["pair_id"];
        let side = |k: &str| {
            let c = &r[k];
            (
                c["problem_id"].as_str().unwrap().to_string(),
                c["submission_id"].as_str().unwrap().to_string(),
                c["language"].as_str().unwrap().to_string(),
                c["source"].as_str().unwrap().to_string(),
            )
        };
        let (p1, s1, l1, src1) = side("code1");
        let (p2, s2, l2, src2) = side("code2");
        touched.insert(p1.clone());
        touched.insert(p2.clone());

        let same = p1 == p2;
        if (r["label"] == 1) != same {
            problems.push(format!("pair {id}: label disagrees with problem ids {p1}/{p2}"));
        }
        if l1 != expect.lang_a || l2 != expect.lang_b {
            problems.push(format!("pair {id}: languages {l1}/{l2}"));
        }
        if p1 == p2 && s1 == s2 {
            problems.push(format!("pair {id}: submission paired with itself"));
        }
        let key = if expect.lang_a == expect.lang_b {
            let (a, b) = ((p1.clone(), s1.clone()), (p2.clone(), s2.clone()));
            if a <= b {
                (a, b)
            } else {
                (b, a)
            }
        } else {
            ((p1.clone(), s1.clone()), (p2.clone(), s2.clone()))
        };
        if !seen.insert(key) {
            problems.push(format!("pair {id}: duplicate"));
        }

        for (p, s, l, src) in [(&p1, &s1, &l1, &src1), (&p2, &s2, &l2, &src2)] {
            match meta.get(&(p.clone(), s.clone())) {
                None => problems.push(format!("pair {id}: {p}/{s} not in metadata")),
                Some((lang, status, ext)) => {
                    if !lang.eq_ignore_ascii_case(l) {
                        problems.push(format!("pair {id}: {s} is {lang}, row says {l}"));
                    }
                    if status != "Accepted" {
                        problems.push(format!("pair {id}: {s} has status {status}"));
                    }
                    let file = corpus.join("data").join(p).join(lang).join(format!("{s}.{ext}"));
                    let disk = String::from_utf8_lossy(&fs::read(&file).unwrap()).into_owned();
                    if &disk != src {
                        problems.push(format!("pair {id}: source of {s} differs from disk"));
                    }
                }
            }
        }
    }
    if touched.len() > expect.n_problems {
        problems.push(format!("{} problems used, at most {} allowed", touched.len(), expect.n_problems));
    }
    problems
}
