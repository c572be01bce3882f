//! Linear hash functions over GF(q) blocks and empirical collision censuses
//! against the two-universal baseline.
//!
//! A census records, for every nonzero difference `d`, the ensemble
//! probability that a random matrix maps `d` to zero. For linear ensembles
//! the collision probability of a pair `(z, z')` depends only on `z - z'`,
//! so the census captures the full pair statistics.

use super::gf;
use super::CodecError;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Ensemble shape of a hash matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HashMode {
    /// Every entry uniform over GF(q).
    Dense,
    /// Exactly `degree` nonzero entries per column, positions and values uniform.
    Sparse { degree: usize },
}

/// Column degree for sparse mode: `max(1, ceil(c * log2 n))`.
pub fn sparse_degree(n: usize, c: f64) -> usize {
    ((n as f64).log2() * c).ceil().max(1.0) as usize
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RowsJson {
    Bitmask(Vec<u64>),
    Dense(Vec<Vec<u8>>),
}

#[derive(Serialize, Deserialize)]
struct LinearHashJson {
    n: usize,
    l: usize,
    q: u8,
    mode: HashMode,
    rows: RowsJson,
}

/// An `l x n` matrix over GF(q) applied to blocks of length `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LinearHashJson", into = "LinearHashJson")]
pub struct LinearHash {
    n: usize,
    l: usize,
    q: u8,
    mode: HashMode,
    rows: Vec<Vec<u8>>,
}

impl TryFrom<LinearHashJson> for LinearHash {
    type Error = String;
    fn try_from(j: LinearHashJson) -> Result<Self, String> {
        let rows = match j.rows {
            RowsJson::Dense(rows) => rows,
            RowsJson::Bitmask(masks) => {
                if j.q != 2 {
                    return Err("bitmask rows require q = 2".into());
                }
                masks
                    .iter()
                    .map(|m| (0..j.n).map(|k| ((m >> k) & 1) as u8).collect())
                    .collect()
            }
        };
        LinearHash::from_rows(j.n, j.l, j.q, j.mode, rows).map_err(|e| e.to_string())
    }
}

impl From<LinearHash> for LinearHashJson {
    fn from(h: LinearHash) -> LinearHashJson {
        let rows = if h.q == 2 && h.n <= 64 {
            RowsJson::Bitmask(
                h.rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .fold(0u64, |m, (k, &v)| m | ((v as u64) << k))
                    })
                    .collect(),
            )
        } else {
            RowsJson::Dense(h.rows.clone())
        };
        LinearHashJson {
            n: h.n,
            l: h.l,
            q: h.q,
            mode: h.mode,
            rows,
        }
    }
}

impl LinearHash {
    pub fn from_rows(
        n: usize,
        l: usize,
        q: u8,
        mode: HashMode,
        rows: Vec<Vec<u8>>,
    ) -> Result<Self, CodecError> {
        if !gf::is_prime(q) {
            return Err(CodecError::Invalid(format!("field order {q} is not prime")));
        }
        if rows.len() != l || rows.iter().any(|r| r.len() != n) {
            return Err(CodecError::Invalid(format!(
                "matrix shape mismatch: expected {l} rows of length {n}"
            )));
        }
        if rows.iter().flatten().any(|&v| v >= q) {
            return Err(CodecError::Invalid("matrix entry outside GF(q)".into()));
        }
        Ok(LinearHash { n, l, q, mode, rows })
    }

    /// Uniformly random dense matrix.
    pub fn dense_random<R: Rng>(n: usize, l: usize, q: u8, rng: &mut R) -> Self {
        let rows = (0..l)
            .map(|_| (0..n).map(|_| rng.gen_range(0..q)).collect())
            .collect();
        LinearHash::from_rows(n, l, q, HashMode::Dense, rows).expect("valid random matrix")
    }

    /// Random matrix with exactly `degree` nonzeros per column (clamped to `l`).
    pub fn sparse_random<R: Rng>(n: usize, l: usize, q: u8, degree: usize, rng: &mut R) -> Self {
        let d = degree.min(l);
        let mut rows = vec![vec![0u8; n]; l];
        for col in 0..n {
            let mut positions: Vec<usize> = (0..l).collect();
            for k in 0..d {
                let pick = rng.gen_range(k..l);
                positions.swap(k, pick);
            }
            for &r in positions.iter().take(d) {
                rows[r][col] = if q == 2 { 1 } else { rng.gen_range(1..q) };
            }
        }
        LinearHash::from_rows(n, l, q, HashMode::Sparse { degree: d }, rows)
            .expect("valid sparse matrix")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn mode(&self) -> HashMode {
        self.mode
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// Coding rate `l * log2(q) / n` of the image alphabet.
    pub fn rate(&self) -> f64 {
        self.l as f64 * (self.q as f64).log2() / self.n as f64
    }

    pub fn apply(&self, z: &[u8]) -> Vec<u8> {
        debug_assert_eq!(z.len(), self.n);
        self.rows
            .iter()
            .map(|row| {
                row.iter()
                    .zip(z)
                    .fold(0u16, |acc, (&a, &b)| (acc + a as u16 * b as u16) % self.q as u16)
                    as u8
            })
            .collect()
    }
}

/// Per-difference collision probabilities of an ensemble.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CollisionCensus {
    pub n: usize,
    pub l: usize,
    pub q: u8,
    pub mode: HashMode,
    /// `probs[k]` is the collision probability of difference index `k + 1`
    /// (differences enumerate `GF(q)^n` without the zero vector).
    pub probs: Vec<f64>,
    pub method: String,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

/// The `(alpha, beta)` summary of a census: `alpha_hat` is the worst-pair
/// ratio of collision probability to `q^{-l}`, and `beta_hat` is the total
/// collision mass strictly above that two-universal baseline.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HashProfile {
    pub n: usize,
    pub l: usize,
    pub q: u8,
    pub mode: HashMode,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub method: String,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

fn diff_from_index(mut idx: usize, n: usize, q: u8) -> Vec<u8> {
    let mut d = vec![0u8; n];
    for slot in d.iter_mut().rev() {
        *slot = (idx % q as usize) as u8;
        idx /= q as usize;
    }
    d
}

fn num_diffs(n: usize, q: u8) -> Result<usize, CodecError> {
    let total = (q as u128).pow(n as u32);
    if total > 1 << 16 {
        return Err(CodecError::SupportTooLarge {
            states: total,
            cap: 1 << 16,
        });
    }
    Ok(total as usize - 1)
}

/// All matrices of the ensemble, for small exhaustive censuses.
fn enumerate_ensemble(mode: HashMode, n: usize, l: usize, q: u8) -> Result<Vec<LinearHash>, CodecError> {
    let cap: u128 = 1 << 20;
    match mode {
        HashMode::Dense => {
            let count = (q as u128).checked_pow((l * n) as u32).unwrap_or(u128::MAX);
            if count > cap {
                return Err(CodecError::SupportTooLarge { states: count, cap });
            }
            let mut out = Vec::with_capacity(count as usize);
            let mut digits = vec![0u8; l * n];
            loop {
                let rows: Vec<Vec<u8>> = (0..l)
                    .map(|r| digits[r * n..(r + 1) * n].to_vec())
                    .collect();
                out.push(LinearHash::from_rows(n, l, q, mode, rows)?);
                let mut k = digits.len();
                loop {
                    if k == 0 {
                        return Ok(out);
                    }
                    k -= 1;
                    digits[k] += 1;
                    if digits[k] < q {
                        break;
                    }
                    digits[k] = 0;
                }
            }
        }
        HashMode::Sparse { degree } => {
            let d = degree.min(l);
            // Column patterns: choose d of l positions, each value in 1..q.
            let mut patterns: Vec<Vec<u8>> = Vec::new();
            let mut choose = vec![0usize; d];
            fn rec(
                start: usize,
                slot: usize,
                l: usize,
                d: usize,
                q: u8,
                choose: &mut Vec<usize>,
                patterns: &mut Vec<Vec<u8>>,
            ) {
                if slot == d {
                    let mut vals = vec![1u8; d];
                    loop {
                        let mut col = vec![0u8; l];
                        for (k, &pos) in choose.iter().enumerate() {
                            col[pos] = vals[k];
                        }
                        patterns.push(col);
                        let mut k = d;
                        loop {
                            if k == 0 {
                                return;
                            }
                            k -= 1;
                            vals[k] += 1;
                            if vals[k] < q {
                                break;
                            }
                            vals[k] = 1;
                        }
                    }
                }
                for pos in start..l {
                    choose[slot] = pos;
                    rec(pos + 1, slot + 1, l, d, q, choose, patterns);
                }
            }
            rec(0, 0, l, d, q, &mut choose, &mut patterns);
            let count = (patterns.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
            if count > cap {
                return Err(CodecError::SupportTooLarge { states: count, cap });
            }
            let mut out = Vec::with_capacity(count as usize);
            let mut pick = vec![0usize; n];
            loop {
                let mut rows = vec![vec![0u8; n]; l];
                for (col, &p) in pick.iter().enumerate() {
                    for (r, row) in rows.iter_mut().enumerate() {
                        row[col] = patterns[p][r];
                    }
                }
                out.push(LinearHash::from_rows(n, l, q, mode, rows)?);
                let mut k = n;
                loop {
                    if k == 0 {
                        return Ok(out);
                    }
                    k -= 1;
                    pick[k] += 1;
                    if pick[k] < patterns.len() {
                        break;
                    }
                    pick[k] = 0;
                }
            }
        }
    }
}

/// Exhaustive census over every matrix in the ensemble.
pub fn census_exact(mode: HashMode, n: usize, l: usize, q: u8) -> Result<CollisionCensus, CodecError> {
    let ndiffs = num_diffs(n, q)?;
    let matrices = enumerate_ensemble(mode, n, l, q)?;
    let mut counts = vec![0u64; ndiffs];
    for m in &matrices {
        for (k, count) in counts.iter_mut().enumerate() {
            let d = diff_from_index(k + 1, n, q);
            if m.apply(&d).iter().all(|&v| v == 0) {
                *count += 1;
            }
        }
    }
    let total = matrices.len() as f64;
    Ok(CollisionCensus {
        n,
        l,
        q,
        mode,
        probs: counts.iter().map(|&c| c as f64 / total).collect(),
        method: "exhaustive".into(),
        samples: None,
        seed: None,
    })
}

/// Monte Carlo census over `samples` matrices drawn from the ensemble.
pub fn census_sampled(
    mode: HashMode,
    n: usize,
    l: usize,
    q: u8,
    samples: usize,
    seed: u64,
) -> Result<CollisionCensus, CodecError> {
    let ndiffs = num_diffs(n, q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; ndiffs];
    for _ in 0..samples {
        let m = draw(mode, n, l, q, &mut rng);
        for (k, count) in counts.iter_mut().enumerate() {
            let d = diff_from_index(k + 1, n, q);
            if m.apply(&d).iter().all(|&v| v == 0) {
                *count += 1;
            }
        }
    }
    Ok(CollisionCensus {
        n,
        l,
        q,
        mode,
        probs: counts.iter().map(|&c| c as f64 / samples as f64).collect(),
        method: "sampled".into(),
        samples: Some(samples),
        seed: Some(seed),
    })
}

fn draw<R: Rng>(mode: HashMode, n: usize, l: usize, q: u8, rng: &mut R) -> LinearHash {
    match mode {
        HashMode::Dense => LinearHash::dense_random(n, l, q, rng),
        HashMode::Sparse { degree } => LinearHash::sparse_random(n, l, q, degree, rng),
    }
}

impl CollisionCensus {
    /// Collapses the census to the `(alpha_hat, beta_hat)` profile.
    pub fn profile(&self) -> HashProfile {
        let baseline = (self.q as f64).powi(-(self.l as i32));
        let alpha_hat = self
            .probs
            .iter()
            .fold(0.0f64, |m, &p| m.max(p / baseline));
        let beta_hat: f64 = self
            .probs
            .iter()
            .filter(|&&p| p > baseline * (1.0 + 1e-9))
            .sum::<f64>()
            .max(0.0);
        HashProfile {
            n: self.n,
            l: self.l,
            q: self.q,
            mode: self.mode,
            alpha_hat,
            beta_hat,
            method: self.method.clone(),
            samples: self.samples,
            seed: self.seed,
        }
    }
}

/// Result of the joint-ensemble composition check: for independent ensembles,
/// the worst-pair ratio of the stacked `(f, g)` matches the product of the
/// individual ratios.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompositionReport {
    pub n: usize,
    pub l_f: usize,
    pub l_g: usize,
    pub q: u8,
    pub samples: usize,
    pub seed: u64,
    pub alpha_f: f64,
    pub alpha_g: f64,
    pub alpha_fg: f64,
}

impl CompositionReport {
    pub fn product_gap(&self) -> f64 {
        let product = self.alpha_f * self.alpha_g;
        if product == 0.0 {
            return f64::INFINITY;
        }
        (self.alpha_fg / product - 1.0).abs()
    }
}

/// Samples paired `(f, g)` draws and compares collision ratios.
pub fn composition_sampled(
    mode: HashMode,
    n: usize,
    l_f: usize,
    l_g: usize,
    q: u8,
    samples: usize,
    seed: u64,
) -> Result<CompositionReport, CodecError> {
    let ndiffs = num_diffs(n, q)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let diffs: Vec<Vec<u8>> = (0..ndiffs).map(|k| diff_from_index(k + 1, n, q)).collect();
    let mut f_counts = vec![0u64; ndiffs];
    let mut g_counts = vec![0u64; ndiffs];
    let mut fg_counts = vec![0u64; ndiffs];
    for _ in 0..samples {
        let f = draw(mode, n, l_f, q, &mut rng);
        let g = draw(mode, n, l_g, q, &mut rng);
        for (k, d) in diffs.iter().enumerate() {
            let fc = f.apply(d).iter().all(|&v| v == 0);
            let gc = g.apply(d).iter().all(|&v| v == 0);
            if fc {
                f_counts[k] += 1;
            }
            if gc {
                g_counts[k] += 1;
            }
            if fc && gc {
                fg_counts[k] += 1;
            }
        }
    }
    let ratio = |counts: &[u64], l: usize| -> f64 {
        let baseline = (q as f64).powi(-(l as i32));
        counts
            .iter()
            .fold(0.0f64, |m, &c| m.max(c as f64 / samples as f64 / baseline))
    };
    Ok(CompositionReport {
        n,
        l_f,
        l_g,
        q,
        samples,
        seed,
        alpha_f: ratio(&f_counts, l_f),
        alpha_g: ratio(&g_counts, l_g),
        alpha_fg: ratio(&fg_counts, l_f + l_g),
    })
}
