//! Balanced clone / non-clone pair sampling.
//!
//! All randomness comes from a single `ChaCha8Rng` seeded with
//! [`SamplingSpec::seed`] via `seed_from_u64`, consumed in a fixed order:
//! problem selection, positive pairs, negative pairs, final shuffle. The
//! `rand` version is pinned so `gen_range`, `index::sample` and `shuffle`
//! keep their algorithms, which makes a dataset a pure function of the
//! corpus metadata and the sampling spec.

use std::collections::HashSet;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, CorpusError, Language, Problem, Submission, SubmissionKey};
use crate::dataset::{ClonePair, Label, PairCode, PairDataset};

#[derive(Debug, Error)]
pub enum SamplingError {
    #[error("invalid sampling spec: {0}")]
    InvalidSpec(String),
    #[error("only {found} eligible problems, {required} required")]
    InsufficientProblems { found: usize, required: usize },
    #[error("problem {0} lacks enough retained submissions in the requested languages")]
    InsufficientSubmissions(String),
    #[error("cannot draw {requested} distinct {kind} pairs (at most {available} exist)")]
    PairSpaceExhausted {
        kind: &'static str,
        requested: usize,
        available: u128,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub n_problems: usize,
    pub n_positive: usize,
    pub n_negative: usize,
    pub lang_a: Language,
    pub lang_b: Language,
    pub seed: u64,
}

impl SamplingSpec {
    /// 100 problems, 500 positive and 500 negative pairs.
    pub fn full_scale(lang_a: Language, lang_b: Language, seed: u64) -> Self {
        SamplingSpec {
            n_problems: 100,
            n_positive: 500,
            n_negative: 500,
            lang_a,
            lang_b,
            seed,
        }
    }

    pub fn is_cross_lingual(&self) -> bool {
        self.lang_a != self.lang_b
    }

    pub fn validate(&self) -> Result<(), SamplingError> {
        if self.n_positive == 0 || self.n_negative == 0 {
            return Err(SamplingError::InvalidSpec("n_positive and n_negative must be >= 1".into()));
        }
        if self.n_problems < 2 {
            return Err(SamplingError::InvalidSpec("n_problems must be >= 2".into()));
        }
        Ok(())
    }

    fn is_eligible(&self, p: &Problem) -> bool {
        if self.is_cross_lingual() {
            p.count_in(&self.lang_a) >= 1 && p.count_in(&self.lang_b) >= 1
        } else {
            p.count_in(&self.lang_a) >= 2
        }
    }
}

fn rng_for(spec: &SamplingSpec) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(spec.seed)
}

fn choose_problems(corpus: &Corpus, spec: &SamplingSpec, rng: &mut ChaCha8Rng) -> Result<Vec<String>, SamplingError> {
    spec.validate()?;
    let eligible: Vec<&String> = corpus
        .problems()
        .values()
        .filter(|p| spec.is_eligible(p))
        .map(|p| &p.problem_id)
        .collect();
    if eligible.len() < spec.n_problems {
        return Err(SamplingError::InsufficientProblems {
            found: eligible.len(),
            required: spec.n_problems,
        });
    }
    let mut chosen: Vec<String> = index::sample(rng, eligible.len(), spec.n_problems)
        .into_iter()
        .map(|i| eligible[i].clone())
        .collect();
    chosen.sort();
    Ok(chosen)
}

/// Picks `spec.n_problems` eligible problems uniformly at random. Returned
/// ids are sorted.
pub fn select_problems(corpus: &Corpus, spec: &SamplingSpec) -> Result<Vec<String>, SamplingError> {
    choose_problems(corpus, spec, &mut rng_for(spec))
}

/// Samples a dataset over problems chosen by [`select_problems`].
pub fn sample_pairs(corpus: &Corpus, spec: &SamplingSpec) -> Result<PairDataset, SamplingError> {
    let mut rng = rng_for(spec);
    let problems = choose_problems(corpus, spec, &mut rng)?;
    build(corpus, spec, problems, rng)
}

/// Samples a dataset over a caller-supplied problem set, so that several
/// datasets can share exactly the same problems. `spec.n_problems` is
/// ignored in favour of `problem_ids.len()`.
pub fn sample_pairs_with_problems(
    corpus: &Corpus,
    spec: &SamplingSpec,
    problem_ids: &[String],
) -> Result<PairDataset, SamplingError> {
    let mut ids: Vec<String> = problem_ids.to_vec();
    ids.sort();
    ids.dedup();
    let spec = SamplingSpec {
        n_problems: ids.len(),
        ..spec.clone()
    };
    spec.validate()?;
    for id in &ids {
        let p = corpus.problem(id).ok_or_else(|| SamplingError::InsufficientSubmissions(id.clone()))?;
        if !spec.is_eligible(p) {
            return Err(SamplingError::InsufficientSubmissions(id.clone()));
        }
    }
    let rng = rng_for(&spec);
    build(corpus, &spec, ids, rng)
}

struct Pool<'a> {
    id: &'a str,
    a: Vec<&'a Submission>,
    b: Vec<&'a Submission>,
}

type UnorderedPair = (SubmissionKey, SubmissionKey);

fn unordered(x: &Submission, y: &Submission) -> UnorderedPair {
    let (kx, ky) = (x.key(), y.key());
    if kx <= ky {
        (kx, ky)
    } else {
        (ky, kx)
    }
}

fn choose2(n: u128) -> u128 {
    n * n.saturating_sub(1) / 2
}

fn positive_capacity(pools: &[Pool], cross: bool) -> u128 {
    pools
        .iter()
        .map(|p| {
            if cross {
                p.a.len() as u128 * p.b.len() as u128
            } else {
                choose2(p.a.len() as u128)
            }
        })
        .sum()
}

fn negative_capacity(pools: &[Pool], cross: bool) -> u128 {
    let total_a: u128 = pools.iter().map(|p| p.a.len() as u128).sum();
    if cross {
        let total_b: u128 = pools.iter().map(|p| p.b.len() as u128).sum();
        let same: u128 = pools.iter().map(|p| p.a.len() as u128 * p.b.len() as u128).sum();
        total_a * total_b - same
    } else {
        choose2(total_a) - pools.iter().map(|p| choose2(p.a.len() as u128)).sum::<u128>()
    }
}

fn attempt_budget(requested: usize) -> usize {
    requested.saturating_mul(200).saturating_add(100_000)
}

fn build(
    corpus: &Corpus,
    spec: &SamplingSpec,
    problem_ids: Vec<String>,
    mut rng: ChaCha8Rng,
) -> Result<PairDataset, SamplingError> {
    let cross = spec.is_cross_lingual();
    let pools: Vec<Pool> = problem_ids
        .iter()
        .map(|id| {
            let p = corpus.problem(id).expect("selected problem exists");
            Pool {
                id,
                a: p.submissions_in(&spec.lang_a).collect(),
                b: p.submissions_in(&spec.lang_b).collect(),
            }
        })
        .collect();

    for (kind, requested, available) in [
        ("positive", spec.n_positive, positive_capacity(&pools, cross)),
        ("negative", spec.n_negative, negative_capacity(&pools, cross)),
    ] {
        if requested as u128 > available {
            return Err(SamplingError::PairSpaceExhausted {
                kind,
                requested,
                available,
            });
        }
    }

    let mut seen: HashSet<UnorderedPair> = HashSet::new();
    let mut drafts: Vec<(Label, &Submission, &Submission)> = Vec::with_capacity(spec.n_positive + spec.n_negative);

    let mut attempts = 0;
    while drafts.len() < spec.n_positive {
        attempts += 1;
        if attempts > attempt_budget(spec.n_positive) {
            return Err(exhausted("positive", spec.n_positive, &pools, cross));
        }
        let pool = &pools[rng.gen_range(0..pools.len())];
        let (x, y) = if cross {
            (pool.a[rng.gen_range(0..pool.a.len())], pool.b[rng.gen_range(0..pool.b.len())])
        } else {
            let picked = index::sample(&mut rng, pool.a.len(), 2);
            (pool.a[picked.index(0)], pool.a[picked.index(1)])
        };
        if seen.insert(unordered(x, y)) {
            drafts.push((Label::Clone, x, y));
        }
    }

    let mut attempts = 0;
    while drafts.len() < spec.n_positive + spec.n_negative {
        attempts += 1;
        if attempts > attempt_budget(spec.n_negative) {
            return Err(exhausted("negative", spec.n_negative, &pools, cross));
        }
        let i = rng.gen_range(0..pools.len());
        let j = rng.gen_range(0..pools.len());
        if i == j {
            continue;
        }
        let (p, q) = (&pools[i], &pools[j]);
        let x = p.a[rng.gen_range(0..p.a.len())];
        let y = if cross {
            q.b[rng.gen_range(0..q.b.len())]
        } else {
            q.a[rng.gen_range(0..q.a.len())]
        };
        if seen.insert(unordered(x, y)) {
            drafts.push((Label::NonClone, x, y));
        }
    }
    log::debug!("sampled {} pairs over problems {:?}", drafts.len(), pools.iter().map(|p| p.id).collect::<Vec<_>>());

    drafts.shuffle(&mut rng);

    let mut lossy = Vec::new();
    let mut materialize = |s: &Submission| -> Result<PairCode, SamplingError> {
        let decoded = s.read_source()?;
        if decoded.lossy {
            lossy.push(s.key());
        }
        Ok(PairCode {
            problem_id: s.problem_id.clone(),
            submission_id: s.submission_id.clone(),
            language: s.language.clone(),
            source: decoded.text,
        })
    };
    let mut pairs = Vec::with_capacity(drafts.len());
    for (pair_id, (label, x, y)) in drafts.into_iter().enumerate() {
        pairs.push(ClonePair {
            pair_id: pair_id as u64,
            label,
            code1: materialize(x)?,
            code2: materialize(y)?,
        });
    }
    lossy.sort();
    lossy.dedup();

    Ok(PairDataset {
        spec: spec.clone(),
        problem_ids,
        pairs,
        lossy_sources: lossy,
    })
}

fn exhausted(kind: &'static str, requested: usize, pools: &[Pool], cross: bool) -> SamplingError {
    let available = if kind == "positive" {
        positive_capacity(pools, cross)
    } else {
        negative_capacity(pools, cross)
    };
    SamplingError::PairSpaceExhausted {
        kind,
        requested,
        available,
    }
}
