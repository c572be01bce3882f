//! The code construction: per-message linear hash pairs `(f_s, g_s)` with
//! coset labels `c_s`, constrained-random-number-generator encoders and
//! decoders, exact error computation and Monte Carlo simulation.
//!
//! Every message alphabet is one GF(q) symbol per letter, so hashes act on
//! blocks in `GF(q)^n`. Encoders draw the shared layer once and hand it to
//! both branches; decoders sample the exact posterior restricted to the
//! received coset labels.

mod gf;
pub mod hash;

pub use hash::{
    census_exact, census_sampled, composition_sampled, sparse_degree, CollisionCensus,
    CompositionReport, HashMode, HashProfile, LinearHash,
};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Joint enumeration cap for decoder posteriors and CRNG supports.
pub const ENUM_CAP: usize = 1 << 24;

/// Weighted-state cap for exact error computation.
pub const EXACT_CAP: u128 = 1 << 26;

#[derive(Debug, thiserror::Error)]
pub enum CodecError {
    #[error("invalid code instance: {0}")]
    Invalid(String),
    #[error("constrained coset has zero probability mass")]
    CosetEmpty,
    #[error("encoder error at stage {stage}: empty coset")]
    EncoderError { stage: String },
    #[error("decoder {j} coset has zero posterior mass")]
    DecoderCosetEmpty { j: usize },
    #[error("support of {states} states exceeds the cap of {cap}")]
    SupportTooLarge { states: u128, cap: u128 },
}

pub type MsgId = String;

/// Every member of a constrained coset paired with its probability; blocks
/// are listed one per message layer of the group.
pub type WeightedBlocks = Vec<(Vec<Vec<u8>>, f64)>;

/// Hash pair and coset label attached to one message index.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MsgCode {
    pub f: LinearHash,
    pub g: LinearHash,
    pub c: Vec<u8>,
}

/// One encoder: its private message group, the conditional letter law of the
/// group given the shared layer, and the channel-input law.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EncoderDef {
    pub msgs: Vec<MsgId>,
    /// `cond[s0_cell * group_cells + cell]` = P(group letter | shared letter).
    pub cond: Vec<f64>,
    pub x_size: usize,
    /// `x_cond[(s0_cell * group_cells + cell) * x_size + x]`.
    pub x_cond: Vec<f64>,
}

/// One decoder: which messages it reproduces.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecoderDef {
    pub msgs: Vec<MsgId>,
}

/// A concrete draw of the code construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CodeInstance {
    pub n: usize,
    pub q: u8,
    /// Message indices shared by all encoders (may be empty).
    pub s0: Vec<MsgId>,
    /// Letter distribution of the shared group (length `q^|s0|`).
    pub base_s0: Vec<f64>,
    pub encoders: Vec<EncoderDef>,
    pub decoders: Vec<DecoderDef>,
    pub y_sizes: Vec<usize>,
    /// Channel letter law `w[x_joint * y_cells + y_joint]`.
    pub w: Vec<f64>,
    pub codes: BTreeMap<MsgId, MsgCode>,
}

/// Result of a Monte Carlo run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimResult {
    pub trials: u64,
    pub errors: u64,
    pub encoder_errors: u64,
    pub error_rate: f64,
    /// Normal-approximation 95% half width of the error-rate estimate.
    pub ci_half_width: f64,
    pub seed: u64,
}

/// Exact error probability split into its encoder-abort component.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExactError {
    pub error_prob: f64,
    pub encoder_error_prob: f64,
}

fn pow_usize(q: u8, e: usize) -> usize {
    (q as usize).pow(e as u32)
}

fn row_ok(row: &[f64]) -> bool {
    row.iter().all(|&p| p >= 0.0) && (row.iter().sum::<f64>() - 1.0).abs() <= 1e-12
}

impl CodeInstance {
    pub fn validate(&self) -> Result<(), CodecError> {
        if !gf::is_prime(self.q) {
            return Err(CodecError::Invalid(format!("q = {} is not prime", self.q)));
        }
        let mut all: Vec<&MsgId> = self.s0.iter().collect();
        for e in &self.encoders {
            all.extend(e.msgs.iter());
        }
        let mut seen = std::collections::BTreeSet::new();
        for m in &all {
            if !seen.insert(m.as_str()) {
                return Err(CodecError::Invalid(format!("duplicate message `{m}`")));
            }
        }
        for (id, code) in &self.codes {
            if code.f.n() != self.n || code.g.n() != self.n {
                return Err(CodecError::Invalid(format!(
                    "hash block length mismatch for `{id}`"
                )));
            }
            if code.f.q() != self.q || code.g.q() != self.q {
                return Err(CodecError::Invalid(format!("field mismatch for `{id}`")));
            }
            if code.c.len() != code.f.l() {
                return Err(CodecError::Invalid(format!(
                    "coset label length mismatch for `{id}`"
                )));
            }
        }
        for m in &all {
            if !self.codes.contains_key(*m) {
                return Err(CodecError::Invalid(format!("missing hash pair for `{m}`")));
            }
        }
        let s0_cells = pow_usize(self.q, self.s0.len());
        if self.base_s0.len() != s0_cells || !row_ok(&self.base_s0) {
            return Err(CodecError::Invalid("bad shared-layer distribution".into()));
        }
        for (i, e) in self.encoders.iter().enumerate() {
            let cells = pow_usize(self.q, e.msgs.len());
            if e.cond.len() != s0_cells * cells {
                return Err(CodecError::Invalid(format!("encoder {i} cond shape")));
            }
            for s0 in 0..s0_cells {
                if !row_ok(&e.cond[s0 * cells..(s0 + 1) * cells]) {
                    return Err(CodecError::Invalid(format!("encoder {i} cond row {s0}")));
                }
            }
            if e.x_cond.len() != s0_cells * cells * e.x_size {
                return Err(CodecError::Invalid(format!("encoder {i} x_cond shape")));
            }
            for r in 0..s0_cells * cells {
                if !row_ok(&e.x_cond[r * e.x_size..(r + 1) * e.x_size]) {
                    return Err(CodecError::Invalid(format!("encoder {i} x_cond row {r}")));
                }
            }
        }
        let x_cells: usize = self.encoders.iter().map(|e| e.x_size).product();
        let y_cells: usize = self.y_sizes.iter().product();
        if self.w.len() != x_cells * y_cells {
            return Err(CodecError::Invalid("channel shape".into()));
        }
        for r in 0..x_cells {
            if !row_ok(&self.w[r * y_cells..(r + 1) * y_cells]) {
                return Err(CodecError::Invalid(format!("channel row {r}")));
            }
        }
        for (j, d) in self.decoders.iter().enumerate() {
            if d.msgs.iter().any(|m| !seen.contains(m.as_str())) {
                return Err(CodecError::Invalid(format!("decoder {j} references unknown message")));
            }
            if pow_usize(self.q, d.msgs.len())
                .checked_pow(self.n as u32)
                .is_none_or(|v| v > ENUM_CAP)
            {
                return Err(CodecError::SupportTooLarge {
                    states: (pow_usize(self.q, d.msgs.len()) as u128).pow(self.n as u32),
                    cap: ENUM_CAP as u128,
                });
            }
        }
        Ok(())
    }

    /// Binning rate `r_s` and message rate `R_s` of every message index.
    pub fn rates(&self) -> BTreeMap<MsgId, (f64, f64)> {
        self.codes
            .iter()
            .map(|(id, c)| (id.clone(), (c.f.rate(), c.g.rate())))
            .collect()
    }

    /// Canonical message order: shared group then each encoder's group.
    pub fn all_msgs(&self) -> Vec<MsgId> {
        let mut out = self.s0.clone();
        for e in &self.encoders {
            out.extend(e.msgs.iter().cloned());
        }
        out
    }

    pub fn prepare(&self) -> Result<PreparedCode, CodecError> {
        self.validate()?;
        PreparedCode::new(self.clone())
    }
}

/// Per-letter group state helpers: a group of k messages has `q^k` letter
/// cells, message-major (first message = most significant digit).
fn letter_cell(q: u8, blocks: &[Vec<u8>], t: usize) -> usize {
    blocks
        .iter()
        .fold(0usize, |acc, b| acc * q as usize + b[t] as usize)
}

/// A code instance plus derived single-letter tables.
pub struct PreparedCode {
    pub code: CodeInstance,
    z_cells: usize,
    y_cells: usize,
    /// Idealized letter law of all message layers jointly.
    z_prior: Vec<f64>,
    /// `k_y[z_cell * y_cells + y]`: channel letter kernel given all layers.
    k_y: Vec<f64>,
    /// Per decoder: `nu[zd_cell * |Y_j| + y_j]`, joint letter law of the
    /// decoded layers and that decoder's output.
    nu: Vec<Vec<f64>>,
}

impl PreparedCode {
    fn new(code: CodeInstance) -> Result<Self, CodecError> {
        let q = code.q;
        let s0_len = code.s0.len();
        let group_lens: Vec<usize> = code.encoders.iter().map(|e| e.msgs.len()).collect();
        let total_msgs = s0_len + group_lens.iter().sum::<usize>();
        let z_cells = pow_usize(q, total_msgs);
        let y_cells: usize = code.y_sizes.iter().product();
        let x_sizes: Vec<usize> = code.encoders.iter().map(|e| e.x_size).collect();
        let x_cells: usize = x_sizes.iter().product();
        if (z_cells as u128) * (x_cells as u128) * (y_cells as u128) > ENUM_CAP as u128 {
            return Err(CodecError::SupportTooLarge {
                states: (z_cells as u128) * (x_cells as u128) * (y_cells as u128),
                cap: ENUM_CAP as u128,
            });
        }

        let s0_cells = pow_usize(q, s0_len);
        let _ = s0_cells;
        let mut z_prior = vec![0.0; z_cells];
        let mut k_y = vec![0.0; z_cells * y_cells];
        for z in 0..z_cells {
            // Decompose message-major: s0 digits first, then encoder groups.
            let mut rest = z;
            let mut group_cell = vec![0usize; code.encoders.len()];
            for gi in (0..code.encoders.len()).rev() {
                let cells = pow_usize(q, group_lens[gi]);
                group_cell[gi] = rest % cells;
                rest /= cells;
            }
            let s0_cell = rest;
            let mut p = code.base_s0[s0_cell];
            for (gi, e) in code.encoders.iter().enumerate() {
                let cells = pow_usize(q, group_lens[gi]);
                p *= e.cond[s0_cell * cells + group_cell[gi]];
            }
            z_prior[z] = p;
            // Channel kernel: marginalize the per-encoder input draws.
            for xc in 0..x_cells {
                let mut xp = 1.0;
                let mut xrest = xc;
                for gi in (0..code.encoders.len()).rev() {
                    let e = &code.encoders[gi];
                    let x = xrest % e.x_size;
                    xrest /= e.x_size;
                    let cells = pow_usize(q, group_lens[gi]);
                    let row = s0_cell * cells + group_cell[gi];
                    xp *= e.x_cond[row * e.x_size + x];
                }
                if xp > 0.0 {
                    for yv in 0..y_cells {
                        k_y[z * y_cells + yv] += xp * code.w[xc * y_cells + yv];
                    }
                }
            }
        }

        // Decoder letter tables.
        let all: Vec<MsgId> = code.all_msgs();
        let mut nu = Vec::new();
        for (j, d) in code.decoders.iter().enumerate() {
            let positions: Vec<usize> = d
                .msgs
                .iter()
                .map(|m| all.iter().position(|a| a == m).unwrap())
                .collect();
            let zd_cells = pow_usize(q, d.msgs.len());
            let yj = code.y_sizes[j];
            let mut table = vec![0.0; zd_cells * yj];
            for z in 0..z_cells {
                if z_prior[z] == 0.0 {
                    continue;
                }
                // Project the full cell onto the decoded layers.
                let mut digits = vec![0u8; total_msgs];
                let mut rest = z;
                for k in (0..total_msgs).rev() {
                    digits[k] = (rest % q as usize) as u8;
                    rest /= q as usize;
                }
                let zd = positions
                    .iter()
                    .fold(0usize, |acc, &p| acc * q as usize + digits[p] as usize);
                for yv in 0..y_cells {
                    let p = z_prior[z] * k_y[z * y_cells + yv];
                    if p > 0.0 {
                        let yjv = y_component(&code.y_sizes, yv, j);
                        table[zd * yj + yjv] += p;
                    }
                }
            }
            nu.push(table);
        }
        Ok(PreparedCode {
            code,
            z_cells,
            y_cells,
            z_prior,
            k_y,
            nu,
        })
    }

    fn constraints_for(
        &self,
        msgs: &[MsgId],
        messages: Option<&BTreeMap<MsgId, Vec<u8>>>,
    ) -> Result<Vec<(Vec<u8>, u8)>, CodecError> {
        let n = self.code.n;
        let unknowns = msgs.len() * n;
        let mut rows = Vec::new();
        for (k, m) in msgs.iter().enumerate() {
            let code = &self.code.codes[m];
            for (row, &target) in code.f.rows().iter().zip(&code.c) {
                let mut coeffs = vec![0u8; unknowns];
                coeffs[k * n..(k + 1) * n].copy_from_slice(row);
                rows.push((coeffs, target));
            }
            if let Some(messages) = messages {
                let mv = messages
                    .get(m)
                    .ok_or_else(|| CodecError::Invalid(format!("missing message `{m}`")))?;
                if mv.len() != code.g.l() || mv.iter().any(|&v| v >= self.code.q) {
                    return Err(CodecError::Invalid(format!("bad message word for `{m}`")));
                }
                for (row, &target) in code.g.rows().iter().zip(mv) {
                    let mut coeffs = vec![0u8; unknowns];
                    coeffs[k * n..(k + 1) * n].copy_from_slice(row);
                    rows.push((coeffs, target));
                }
            }
        }
        Ok(rows)
    }

    /// Exact constrained distribution over a group's blocks.
    pub fn coset_distribution(
        &self,
        msgs: &[MsgId],
        letter_weights: &[Vec<f64>],
        constraints: &[(Vec<u8>, u8)],
    ) -> Result<WeightedBlocks, CodecError> {
        coset_distribution(self.code.n, self.code.q, msgs.len(), letter_weights, constraints)
    }

    /// Draws one group block from the constrained distribution.
    pub fn crng_sample(
        &self,
        msgs: &[MsgId],
        letter_weights: &[Vec<f64>],
        constraints: &[(Vec<u8>, u8)],
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<Vec<u8>>, CodecError> {
        crng_sample(self.code.n, self.code.q, msgs.len(), letter_weights, constraints, rng)
    }

    fn s0_letter_weights(&self) -> Vec<Vec<f64>> {
        vec![self.code.base_s0.clone(); self.code.n]
    }

    fn encoder_letter_weights(&self, gi: usize, z_s0: &[Vec<u8>]) -> Vec<Vec<f64>> {
        let e = &self.code.encoders[gi];
        let q = self.code.q;
        let cells = pow_usize(q, e.msgs.len());
        (0..self.code.n)
            .map(|t| {
                let s0_cell = letter_cell(q, z_s0, t);
                e.cond[s0_cell * cells..(s0_cell + 1) * cells].to_vec()
            })
            .collect()
    }

    /// Runs both encoder stages and the per-letter channel-input draws.
    pub fn encode(
        &self,
        messages: &BTreeMap<MsgId, Vec<u8>>,
        rng: &mut ChaCha8Rng,
    ) -> Result<EncodeOutput, CodecError> {
        let z_s0 = if self.code.s0.is_empty() {
            Vec::new()
        } else {
            let constraints = self.constraints_for(&self.code.s0, Some(messages))?;
            self.crng_sample(
                &self.code.s0,
                &self.s0_letter_weights(),
                &constraints,
                rng,
            )
            .map_err(|e| match e {
                CodecError::CosetEmpty => CodecError::EncoderError { stage: "S0".into() },
                other => other,
            })?
        };
        let mut z = BTreeMap::new();
        for (m, b) in self.code.s0.iter().zip(&z_s0) {
            z.insert(m.clone(), b.clone());
        }
        let mut x = Vec::new();
        for (gi, e) in self.code.encoders.iter().enumerate() {
            let blocks = if e.msgs.is_empty() {
                Vec::new()
            } else {
                let constraints = self.constraints_for(&e.msgs, Some(messages))?;
                self.crng_sample(
                    &e.msgs,
                    &self.encoder_letter_weights(gi, &z_s0),
                    &constraints,
                    rng,
                )
                .map_err(|err| match err {
                    CodecError::CosetEmpty => CodecError::EncoderError {
                        stage: format!("S{}", gi + 1),
                    },
                    other => other,
                })?
            };
            // Channel input letters.
            let q = self.code.q;
            let cells = pow_usize(q, e.msgs.len());
            let mut xi = Vec::with_capacity(self.code.n);
            for t in 0..self.code.n {
                let s0_cell = letter_cell(q, &z_s0, t);
                let g_cell = letter_cell(q, &blocks, t);
                let row = (s0_cell * cells + g_cell) * e.x_size;
                xi.push(sample_row(&e.x_cond[row..row + e.x_size], rng) as u8);
            }
            for (m, b) in e.msgs.iter().zip(&blocks) {
                z.insert(m.clone(), b.clone());
            }
            x.push(xi);
        }
        Ok(EncodeOutput { x, z })
    }

    /// Sends `x` through the memoryless channel letter by letter.
    pub fn transmit(&self, x: &[Vec<u8>], rng: &mut ChaCha8Rng) -> Vec<Vec<u8>> {
        let y_cells = self.y_cells;
        let mut y: Vec<Vec<u8>> = self
            .code
            .y_sizes
            .iter()
            .map(|_| Vec::with_capacity(self.code.n))
            .collect();
        for t in 0..self.code.n {
            let mut xc = 0usize;
            for (gi, e) in self.code.encoders.iter().enumerate() {
                xc = xc * e.x_size + x[gi][t] as usize;
            }
            let row = &self.code.w[xc * y_cells..(xc + 1) * y_cells];
            let mut yv = sample_row(row, rng);
            for (j, &size) in self.code.y_sizes.iter().enumerate().rev() {
                y[j].push((yv % size) as u8);
                yv /= size;
            }
        }
        for yj in &mut y {
            // Letters were pushed in order; component extraction above walks
            // outputs most-significant-last, so each vector is already aligned.
            debug_assert_eq!(yj.len(), self.code.n);
        }
        y
    }

    /// Decoder `j`: samples the posterior over its layers restricted to the
    /// received coset labels and applies each `g_s`.
    pub fn decode(
        &self,
        j: usize,
        y_j: &[u8],
        rng: &mut ChaCha8Rng,
    ) -> Result<BTreeMap<MsgId, Vec<u8>>, CodecError> {
        let d = &self.code.decoders[j];
        let yj_size = self.code.y_sizes[j];
        let weights: Vec<Vec<f64>> = (0..self.code.n)
            .map(|t| {
                let y = y_j[t] as usize;
                let zd_cells = pow_usize(self.code.q, d.msgs.len());
                (0..zd_cells)
                    .map(|zd| self.nu[j][zd * yj_size + y])
                    .collect()
            })
            .collect();
        let constraints = self.constraints_for(&d.msgs, None)?;
        let blocks = self
            .crng_sample(&d.msgs, &weights, &constraints, rng)
            .map_err(|e| match e {
                CodecError::CosetEmpty => CodecError::DecoderCosetEmpty { j },
                other => other,
            })?;
        Ok(d.msgs
            .iter()
            .zip(&blocks)
            .map(|(m, b)| (m.clone(), self.code.codes[m].g.apply(b)))
            .collect())
    }

    /// Exact total error probability by enumerating messages, coset draws,
    /// channel outputs and decoder posteriors.
    pub fn exact_error(&self) -> Result<ExactError, CodecError> {
        let q = self.code.q;
        let all = self.code.all_msgs();
        let mut budget: u128 = 0;

        // Enumerate message words per index.
        let msg_words: BTreeMap<MsgId, Vec<Vec<u8>>> = all
            .iter()
            .map(|m| {
                let l = self.code.codes[m].g.l();
                (m.clone(), enumerate_words(q, l))
            })
            .collect();
        let m_total: u128 = all
            .iter()
            .map(|m| msg_words[m].len() as u128)
            .product();
        if m_total > 1 << 16 {
            return Err(CodecError::SupportTooLarge {
                states: m_total,
                cap: 1 << 16,
            });
        }

        // Decoder success probability tables, memoized per message word of
        // the decoded layers.
        type PcMemo = BTreeMap<Vec<Vec<u8>>, std::rc::Rc<Vec<f64>>>;
        let mut pc_memo: Vec<PcMemo> = vec![PcMemo::new(); self.code.decoders.len()];

        let mut total_success = 0.0;
        let mut enc_fail = 0.0;
        let mut m_assign: Vec<usize> = vec![0; all.len()];
        let m_counts: Vec<usize> = all.iter().map(|m| msg_words[m].len()).collect();
        let m_space: f64 = m_counts.iter().map(|&c| c as f64).product();
        loop {
            let messages: BTreeMap<MsgId, Vec<u8>> = all
                .iter()
                .zip(&m_assign)
                .map(|(m, &k)| (m.clone(), msg_words[m][k].clone()))
                .collect();
            let p_m = 1.0 / m_space;

            // Success-probability tables of both decoders for this word.
            let mut pcs: Vec<std::rc::Rc<Vec<f64>>> = Vec::new();
            for (j, d) in self.code.decoders.iter().enumerate() {
                let key: Vec<Vec<u8>> = d.msgs.iter().map(|m| messages[m].clone()).collect();
                if !pc_memo[j].contains_key(&key) {
                    let table = self.decoder_success_table(j, &messages)?;
                    pc_memo[j].insert(key.clone(), std::rc::Rc::new(table));
                }
                pcs.push(pc_memo[j][&key].clone());
            }

            let s0_result = if self.code.s0.is_empty() {
                Ok(vec![(Vec::new(), 1.0)])
            } else {
                self.coset_distribution(
                    &self.code.s0,
                    &self.s0_letter_weights(),
                    &self.constraints_for(&self.code.s0, Some(&messages))?,
                )
            };
            match s0_result {
                Err(CodecError::CosetEmpty) => {
                    enc_fail += p_m;
                }
                Err(other) => return Err(other),
                Ok(s0_dist) => {
                    for (z_s0, p0) in &s0_dist {
                        budget += 1;
                        if budget > EXACT_CAP {
                            return Err(CodecError::SupportTooLarge {
                                states: budget,
                                cap: EXACT_CAP,
                            });
                        }
                        // Per-encoder coset draws.
                        let mut group_dists = Vec::new();
                        let mut failed = false;
                        for (gi, e) in self.code.encoders.iter().enumerate() {
                            if e.msgs.is_empty() {
                                group_dists.push(vec![(Vec::new(), 1.0)]);
                                continue;
                            }
                            match self.coset_distribution(
                                &e.msgs,
                                &self.encoder_letter_weights(gi, z_s0),
                                &self.constraints_for(&e.msgs, Some(&messages))?,
                            ) {
                                Ok(d) => group_dists.push(d),
                                Err(CodecError::CosetEmpty) => {
                                    failed = true;
                                    break;
                                }
                                Err(other) => return Err(other),
                            }
                        }
                        if failed {
                            enc_fail += p_m * p0;
                            continue;
                        }
                        total_success += p_m
                            * p0
                            * self.success_over_outputs(z_s0, &group_dists, &pcs, &mut budget)?;
                    }
                }
            }

            // Next message assignment.
            let mut k = all.len();
            loop {
                if k == 0 {
                    let error_prob = (1.0 - total_success).clamp(0.0, 1.0);
                    return Ok(ExactError {
                        error_prob,
                        encoder_error_prob: enc_fail,
                    });
                }
                k -= 1;
                m_assign[k] += 1;
                if m_assign[k] < m_counts[k] {
                    break;
                }
                m_assign[k] = 0;
            }
        }
    }

    /// For decoder `j` and fixed message words: probability of reproducing
    /// every decoded message, per `y_j` block.
    fn decoder_success_table(
        &self,
        j: usize,
        messages: &BTreeMap<MsgId, Vec<u8>>,
    ) -> Result<Vec<f64>, CodecError> {
        let d = &self.code.decoders[j];
        let q = self.code.q;
        let n = self.code.n;
        let yj_size = self.code.y_sizes[j];
        let y_blocks = yj_size.pow(n as u32);
        let constraints = self.constraints_for(&d.msgs, None)?;
        let Some(set) = gf::solve_affine(d.msgs.len() * n, &constraints, q) else {
            return Ok(vec![0.0; y_blocks]);
        };
        let members = set.enumerate(ENUM_CAP)?;
        let mut table = vec![0.0; y_blocks];
        let mut denom = vec![0.0; y_blocks];
        for flat in &members {
            let blocks: Vec<Vec<u8>> = (0..d.msgs.len())
                .map(|k| flat[k * n..(k + 1) * n].to_vec())
                .collect();
            let good = d
                .msgs
                .iter()
                .zip(&blocks)
                .all(|(m, b)| self.code.codes[m].g.apply(b) == messages[m]);
            // Per-letter posterior factors for every y_j block at once.
            let mut weights_per_letter: Vec<Vec<f64>> = Vec::with_capacity(n);
            for t in 0..n {
                let zd = letter_cell(q, &blocks, t);
                weights_per_letter
                    .push(self.nu[j][zd * yj_size..(zd + 1) * yj_size].to_vec());
            }
            let mut y_digits = vec![0usize; n];
            for yb in 0..y_blocks {
                let mut w = 1.0;
                for t in 0..n {
                    w *= weights_per_letter[t][y_digits[t]];
                    if w == 0.0 {
                        break;
                    }
                }
                if w > 0.0 {
                    denom[yb] += w;
                    if good {
                        table[yb] += w;
                    }
                }
                let mut t = n;
                loop {
                    if t == 0 {
                        break;
                    }
                    t -= 1;
                    y_digits[t] += 1;
                    if y_digits[t] < yj_size {
                        break;
                    }
                    y_digits[t] = 0;
                }
            }
        }
        for (v, d) in table.iter_mut().zip(&denom) {
            if *d > 0.0 {
                *v /= d;
            }
        }
        Ok(table)
    }

    /// Sum over joint output blocks of the channel law times both decoders'
    /// success probabilities, averaged over the encoder coset draws.
    fn success_over_outputs(
        &self,
        z_s0: &[Vec<u8>],
        group_dists: &[WeightedBlocks],
        pcs: &[std::rc::Rc<Vec<f64>>],
        budget: &mut u128,
    ) -> Result<f64, CodecError> {
        let n = self.code.n;
        let q = self.code.q;
        let y_cells = self.y_cells;
        let mut success = 0.0;
        let mut combo = vec![0usize; group_dists.len()];
        loop {
            let mut p_groups = 1.0;
            let mut blocks: Vec<&[Vec<u8>]> = Vec::with_capacity(group_dists.len());
            for (gi, dist) in group_dists.iter().enumerate() {
                p_groups *= dist[combo[gi]].1;
                blocks.push(&dist[combo[gi]].0);
            }
            if p_groups > 0.0 {
                // Per-letter channel kernel row for the drawn layers.
                let mut k_rows: Vec<&[f64]> = Vec::with_capacity(n);
                for t in 0..n {
                    let mut cell = 0usize;
                    for b in z_s0 {
                        cell = cell * q as usize + b[t] as usize;
                    }
                    for gb in &blocks {
                        for b in gb.iter() {
                            cell = cell * q as usize + b[t] as usize;
                        }
                    }
                    k_rows.push(&self.k_y[cell * y_cells..(cell + 1) * y_cells]);
                }
                let y_blocks = y_cells.pow(n as u32);
                *budget += y_blocks as u128;
                if *budget > EXACT_CAP {
                    return Err(CodecError::SupportTooLarge {
                        states: *budget,
                        cap: EXACT_CAP,
                    });
                }
                let mut y_digits = vec![0usize; n];
                for _ in 0..y_blocks {
                    let mut p_y = 1.0;
                    for t in 0..n {
                        p_y *= k_rows[t][y_digits[t]];
                        if p_y == 0.0 {
                            break;
                        }
                    }
                    if p_y > 0.0 {
                        let mut pc = 1.0;
                        for (j, pc_table) in pcs.iter().enumerate() {
                            let yj_size = self.code.y_sizes[j];
                            let mut yj_block = 0usize;
                            for t in 0..n {
                                yj_block = yj_block * yj_size
                                    + y_component(&self.code.y_sizes, y_digits[t], j);
                            }
                            pc *= pc_table[yj_block];
                            if pc == 0.0 {
                                break;
                            }
                        }
                        success += p_groups * p_y * pc;
                    }
                    let mut t = n;
                    loop {
                        if t == 0 {
                            break;
                        }
                        t -= 1;
                        y_digits[t] += 1;
                        if y_digits[t] < y_cells {
                            break;
                        }
                        y_digits[t] = 0;
                    }
                }
            }
            let mut gi = group_dists.len();
            loop {
                if gi == 0 {
                    return Ok(success);
                }
                gi -= 1;
                combo[gi] += 1;
                if combo[gi] < group_dists[gi].len() {
                    break;
                }
                combo[gi] = 0;
            }
        }
    }

    /// Monte Carlo over i.i.d. trials with per-trial derived seeds.
    /// Idealized single-letter law of all message layers (message-major cells).
    pub fn z_prior(&self) -> &[f64] {
        debug_assert_eq!(self.z_prior.len(), self.z_cells);
        &self.z_prior
    }

    pub fn simulate(&self, trials: u64, seed: u64) -> SimResult {
        let (errors, encoder_errors) = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, t));
                match self.run_trial(&mut rng) {
                    TrialOutcome::Ok => (0u64, 0u64),
                    TrialOutcome::EncoderError => (1, 1),
                    TrialOutcome::DecodeError => (1, 0),
                }
            })
            .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
        let p = errors as f64 / trials as f64;
        SimResult {
            trials,
            errors,
            encoder_errors,
            error_rate: p,
            ci_half_width: 1.96 * (p * (1.0 - p) / trials as f64).sqrt(),
            seed,
        }
    }

    fn run_trial(&self, rng: &mut ChaCha8Rng) -> TrialOutcome {
        let all = self.code.all_msgs();
        let messages: BTreeMap<MsgId, Vec<u8>> = all
            .iter()
            .map(|m| {
                let l = self.code.codes[m].g.l();
                let word = (0..l).map(|_| rng.gen_range(0..self.code.q)).collect();
                (m.clone(), word)
            })
            .collect();
        let encoded = match self.encode(&messages, rng) {
            Ok(out) => out,
            Err(_) => return TrialOutcome::EncoderError,
        };
        let y = self.transmit(&encoded.x, rng);
        for (j, d) in self.code.decoders.iter().enumerate() {
            match self.decode(j, &y[j], rng) {
                Ok(decoded) => {
                    for m in &d.msgs {
                        if decoded[m] != messages[m] {
                            return TrialOutcome::DecodeError;
                        }
                    }
                }
                Err(_) => return TrialOutcome::DecodeError,
            }
        }
        TrialOutcome::Ok
    }

}

/// Exact constrained distribution over the blocks of a group of `k` message
/// layers: every coset member paired with its normalized probability, in
/// lexicographic order over the concatenated blocks.
///
/// `letter_weights[t]` has one weight per joint letter cell of the group
/// (message-major, `q^k` cells); the distribution is proportional to the
/// product of per-letter weights restricted to the constraint coset.
pub fn coset_distribution(
    n: usize,
    q: u8,
    k: usize,
    letter_weights: &[Vec<f64>],
    constraints: &[(Vec<u8>, u8)],
) -> Result<WeightedBlocks, CodecError> {
    let unknowns = k * n;
    let space = (q as u128).pow(unknowns as u32);
    if space > ENUM_CAP as u128 {
        return Err(CodecError::SupportTooLarge {
            states: space,
            cap: ENUM_CAP as u128,
        });
    }
    let Some(set) = gf::solve_affine(unknowns, constraints, q) else {
        return Err(CodecError::CosetEmpty);
    };
    let members = set.enumerate(ENUM_CAP)?;
    let mut weighted = Vec::with_capacity(members.len());
    let mut total = 0.0;
    for flat in members {
        let blocks: Vec<Vec<u8>> = (0..k).map(|m| flat[m * n..(m + 1) * n].to_vec()).collect();
        let mut w = 1.0;
        for (t, lw) in letter_weights.iter().enumerate() {
            w *= lw[letter_cell(q, &blocks, t)];
            if w == 0.0 {
                break;
            }
        }
        total += w;
        weighted.push((blocks, w));
    }
    if total <= 0.0 {
        return Err(CodecError::CosetEmpty);
    }
    for (_, w) in &mut weighted {
        *w /= total;
    }
    Ok(weighted)
}

/// Draws one group block with probability proportional to the base weights
/// restricted to the constraint coset, by inverse CDF over the
/// lexicographically ordered support.
pub fn crng_sample(
    n: usize,
    q: u8,
    k: usize,
    letter_weights: &[Vec<f64>],
    constraints: &[(Vec<u8>, u8)],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Vec<u8>>, CodecError> {
    let dist = coset_distribution(n, q, k, letter_weights, constraints)?;
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (blocks, w) in &dist {
        acc += w;
        if u < acc {
            return Ok(blocks.clone());
        }
    }
    Ok(dist.last().expect("nonempty coset").0.clone())
}

enum TrialOutcome {
    Ok,
    EncoderError,
    DecodeError,
}

/// Output of one encoder pass.
pub struct EncodeOutput {
    /// One channel-input block per encoder.
    pub x: Vec<Vec<u8>>,
    /// The drawn block of every message layer.
    pub z: BTreeMap<MsgId, Vec<u8>>,
}

fn y_component(y_sizes: &[usize], mut y_joint: usize, j: usize) -> usize {
    let mut out = 0;
    for (k, &size) in y_sizes.iter().enumerate().rev() {
        let digit = y_joint % size;
        y_joint /= size;
        if k == j {
            out = digit;
        }
    }
    out
}

fn enumerate_words(q: u8, l: usize) -> Vec<Vec<u8>> {
    let count = pow_usize(q, l);
    let mut out = Vec::with_capacity(count);
    let mut word = vec![0u8; l];
    for _ in 0..count {
        out.push(word.clone());
        for slot in word.iter_mut().rev() {
            *slot += 1;
            if *slot < q {
                break;
            }
            *slot = 0;
        }
    }
    out
}

fn sample_row(row: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (k, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    row.len() - 1
}

fn mix(seed: u64, t: u64) -> u64 {
    // SplitMix64 finalizer over the pair.
    let mut z = seed ^ t.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Exact error of one decoder in the source-coding setting: the layer blocks
/// are drawn from the idealized prior, labels are `f(z)`, and the decoder
/// either samples the posterior or takes its mode over the coset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeRule {
    Stochastic,
    MapCoset,
}

pub fn source_decode_exact_error(
    prepared: &PreparedCode,
    j: usize,
    rule: DecodeRule,
) -> Result<f64, CodecError> {
    let code = &prepared.code;
    let d = &code.decoders[j];
    let q = code.q;
    let n = code.n;
    let yj_size = code.y_sizes[j];
    let zd_blocks = pow_usize(q, d.msgs.len()).pow(n as u32);
    let y_blocks = yj_size.pow(n as u32);
    if (zd_blocks as u128) * (y_blocks as u128) > ENUM_CAP as u128 {
        return Err(CodecError::SupportTooLarge {
            states: (zd_blocks as u128) * (y_blocks as u128),
            cap: ENUM_CAP as u128,
        });
    }
    // Group blocks by their f-label.
    let all_blocks: Vec<Vec<Vec<u8>>> = enumerate_group_blocks(q, d.msgs.len(), n);
    let mut cosets: BTreeMap<Vec<u8>, Vec<usize>> = BTreeMap::new();
    for (k, blocks) in all_blocks.iter().enumerate() {
        let label: Vec<u8> = d
            .msgs
            .iter()
            .zip(blocks)
            .flat_map(|(m, b)| code.codes[m].f.apply(b))
            .collect();
        cosets.entry(label).or_default().push(k);
    }
    let nu = &prepared.nu[j];
    let weight = |k: usize, y_digits: &[usize]| -> f64 {
        let blocks = &all_blocks[k];
        let mut w = 1.0;
        for (t, &yv) in y_digits.iter().enumerate() {
            let zd = letter_cell(q, blocks, t);
            w *= nu[zd * yj_size + yv];
            if w == 0.0 {
                break;
            }
        }
        w
    };
    let mut error = 0.0;
    for (k, blocks) in all_blocks.iter().enumerate() {
        let label: Vec<u8> = d
            .msgs
            .iter()
            .zip(blocks)
            .flat_map(|(m, b)| code.codes[m].f.apply(b))
            .collect();
        let members = &cosets[&label];
        let mut y_digits = vec![0usize; n];
        for _ in 0..y_blocks {
            let w_true = weight(k, &y_digits);
            if w_true > 0.0 {
                let weights: Vec<f64> = members.iter().map(|&m| weight(m, &y_digits)).collect();
                let total: f64 = weights.iter().sum();
                let p_correct = match rule {
                    DecodeRule::Stochastic => w_true / total,
                    DecodeRule::MapCoset => {
                        // Mode of the posterior; lexicographically first on ties.
                        let mut best = 0usize;
                        for (i, &w) in weights.iter().enumerate() {
                            if w > weights[best] {
                                best = i;
                            }
                        }
                        if members[best] == k {
                            1.0
                        } else {
                            0.0
                        }
                    }
                };
                error += w_true * (1.0 - p_correct);
            }
            let mut t = n;
            loop {
                if t == 0 {
                    break;
                }
                t -= 1;
                y_digits[t] += 1;
                if y_digits[t] < yj_size {
                    break;
                }
                y_digits[t] = 0;
            }
        }
    }
    Ok(error)
}

fn enumerate_group_blocks(q: u8, k: usize, n: usize) -> Vec<Vec<Vec<u8>>> {
    let total = pow_usize(q, k * n);
    let mut out = Vec::with_capacity(total);
    let mut flat = vec![0u8; k * n];
    for _ in 0..total {
        out.push((0..k).map(|m| flat[m * n..(m + 1) * n].to_vec()).collect());
        for slot in flat.iter_mut().rev() {
            *slot += 1;
            if *slot < q {
                break;
            }
            *slot = 0;
        }
    }
    out
}

/// Two parallel point-to-point users over a cross-coupled noisy channel; no
/// shared layer. `p0` is the base flip probability and `p1` the extra flip
/// probability contributed by a nonzero interfering input.
#[allow(clippy::too_many_arguments)]
pub fn toy_interference_code(
    n: usize,
    q: u8,
    l_f: usize,
    l_g: usize,
    p0: f64,
    p1: f64,
    sparse: bool,
    seed: u64,
) -> CodeInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let qs = q as usize;
    let uniform = vec![1.0 / qs as f64; qs];
    let identity: Vec<f64> = (0..qs * qs)
        .map(|k| if k / qs == k % qs { 1.0 } else { 0.0 })
        .collect();
    let mk_encoder = |id: &str| EncoderDef {
        msgs: vec![id.to_string()],
        cond: uniform.clone(),
        x_size: qs,
        x_cond: identity.clone(),
    };
    // w[y | x]: each user sees its own symbol plus additive noise whose level
    // depends on whether the other user transmits a nonzero symbol.
    let mut w = vec![0.0; qs * qs * qs * qs];
    for x1 in 0..qs {
        for x2 in 0..qs {
            let flip1 = p0 + p1 * if x2 != 0 { 1.0 } else { 0.0 };
            let flip2 = p0 + p1 * if x1 != 0 { 1.0 } else { 0.0 };
            for e1 in 0..qs {
                let p_e1 = if e1 == 0 { 1.0 - (qs - 1) as f64 * flip1 } else { flip1 };
                for e2 in 0..qs {
                    let p_e2 = if e2 == 0 { 1.0 - (qs - 1) as f64 * flip2 } else { flip2 };
                    let y1 = (x1 + e1) % qs;
                    let y2 = (x2 + e2) % qs;
                    w[((x1 * qs + x2) * qs + y1) * qs + y2] += p_e1 * p_e2;
                }
            }
        }
    }
    let mut codes = BTreeMap::new();
    for id in ["11", "22"] {
        let (f, g) = if sparse {
            let d = sparse_degree(n, 1.0);
            (
                LinearHash::sparse_random(n, l_f, q, d, &mut rng),
                LinearHash::sparse_random(n, l_g, q, d, &mut rng),
            )
        } else {
            (
                LinearHash::dense_random(n, l_f, q, &mut rng),
                LinearHash::dense_random(n, l_g, q, &mut rng),
            )
        };
        let c = (0..l_f).map(|_| rng.gen_range(0..q)).collect();
        codes.insert(id.to_string(), MsgCode { f, g, c });
    }
    CodeInstance {
        n,
        q,
        s0: vec![],
        base_s0: vec![1.0],
        encoders: vec![mk_encoder("11"), mk_encoder("22")],
        decoders: vec![
            DecoderDef { msgs: vec!["11".into()] },
            DecoderDef { msgs: vec!["22".into()] },
        ],
        y_sizes: vec![qs, qs],
        w,
        codes,
    }
}

/// Noiseless product channel with bijective `(f, g)` stacks: decoding always
/// succeeds.
pub fn noiseless_injective_code(n: usize, seed: u64) -> CodeInstance {
    let mut code = toy_interference_code(n, 2, 0, n, 0.0, 0.0, false, seed);
    // Replace g by the identity so (f, g) is full rank.
    for mc in code.codes.values_mut() {
        let rows: Vec<Vec<u8>> = (0..n)
            .map(|r| (0..n).map(|c| u8::from(c == r)).collect())
            .collect();
        mc.g = LinearHash::from_rows(n, n, 2, HashMode::Dense, rows).unwrap();
        mc.f = LinearHash::from_rows(n, 0, 2, HashMode::Dense, vec![]).unwrap();
        mc.c = vec![];
    }
    code
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn parity_constraint(n: usize) -> Vec<(Vec<u8>, u8)> {
        vec![(vec![1; n], 0)]
    }

    #[test]
    fn parity_coset_is_uniform_over_members() {
        let weights = vec![vec![0.5, 0.5]; 2];
        let dist = coset_distribution(2, 2, 1, &weights, &parity_constraint(2)).unwrap();
        assert_eq!(dist.len(), 2);
        assert_eq!(dist[0].0, vec![vec![0, 0]]);
        assert_eq!(dist[1].0, vec![vec![1, 1]]);
        assert_abs_diff_eq!(dist[0].1, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(dist[1].1, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn full_rank_constraints_give_unique_solution() {
        let weights = vec![vec![0.25, 0.75]; 2];
        let constraints = vec![(vec![1, 0], 1), (vec![0, 1], 0)];
        let dist = coset_distribution(2, 2, 1, &weights, &constraints).unwrap();
        assert_eq!(dist.len(), 1);
        assert_eq!(dist[0].0, vec![vec![1, 0]]);
        assert_abs_diff_eq!(dist[0].1, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn weighted_coset_matches_explicit_renormalization() {
        // Non-uniform letters, parity constraint; oracle enumerates all
        // blocks and renormalizes by hand.
        let letter = vec![vec![0.3, 0.7], vec![0.6, 0.4], vec![0.2, 0.8]];
        let dist = coset_distribution(3, 2, 1, &letter, &parity_constraint(3)).unwrap();
        let mut oracle: Vec<(Vec<u8>, f64)> = Vec::new();
        let mut total = 0.0;
        for idx in 0..8u8 {
            let z = vec![(idx >> 2) & 1, (idx >> 1) & 1, idx & 1];
            if z.iter().fold(0u8, |a, b| a ^ b) == 0 {
                let w: f64 = z
                    .iter()
                    .enumerate()
                    .map(|(t, &v)| letter[t][v as usize])
                    .product();
                total += w;
                oracle.push((z, w));
            }
        }
        assert_eq!(dist.len(), oracle.len());
        for ((blocks, p), (z, w)) in dist.iter().zip(&oracle) {
            assert_eq!(&blocks[0], z);
            assert_abs_diff_eq!(*p, w / total, epsilon = 1e-15);
        }
    }

    #[test]
    fn empty_coset_reported() {
        // Weight mass vanishes on the whole coset.
        let weights = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        // Parity 0 forces 00 or 11, both carrying zero weight.
        assert!(matches!(
            coset_distribution(2, 2, 1, &weights, &parity_constraint(2)),
            Err(CodecError::CosetEmpty)
        ));
        // Inconsistent linear system.
        let constraints = vec![(vec![1, 1], 0), (vec![1, 1], 1)];
        let uniform = vec![vec![0.5, 0.5]; 2];
        assert!(matches!(
            coset_distribution(2, 2, 1, &uniform, &constraints),
            Err(CodecError::CosetEmpty)
        ));
    }

    #[test]
    fn sampler_frequencies_match_distribution() {
        let letter = vec![vec![0.3, 0.7], vec![0.6, 0.4], vec![0.2, 0.8]];
        let dist = coset_distribution(3, 2, 1, &letter, &parity_constraint(3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let trials = 100_000usize;
        let mut counts = BTreeMap::new();
        for _ in 0..trials {
            let z = crng_sample(3, 2, 1, &letter, &parity_constraint(3), &mut rng).unwrap();
            *counts.entry(z[0].clone()).or_insert(0usize) += 1;
        }
        for (blocks, p) in &dist {
            let observed = *counts.get(&blocks[0]).unwrap_or(&0) as f64 / trials as f64;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            assert!(
                (observed - p).abs() <= 3.0 * sigma + 1e-9,
                "p={p}, observed={observed}"
            );
        }
    }

    #[test]
    fn cosets_partition_the_block_space() {
        // Every z lands in exactly one (c, m) coset of the (f, g) stack.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 4;
        let f = LinearHash::dense_random(n, 2, 2, &mut rng);
        let g = LinearHash::dense_random(n, 1, 2, &mut rng);
        let mut seen = BTreeMap::new();
        for idx in 0..16u8 {
            let z: Vec<u8> = (0..n).map(|k| (idx >> (n - 1 - k)) & 1).collect();
            let key = (f.apply(&z), g.apply(&z));
            seen.entry(key).or_insert_with(Vec::new).push(z);
        }
        let total: usize = seen.values().map(|v| v.len()).sum();
        assert_eq!(total, 16);
        // Each member is recovered by the affine enumeration of its coset.
        for ((c, m), members) in seen {
            let mut constraints = Vec::new();
            for (row, &t) in f.rows().iter().zip(&c) {
                constraints.push((row.clone(), t));
            }
            for (row, &t) in g.rows().iter().zip(&m) {
                constraints.push((row.clone(), t));
            }
            let set = gf::solve_affine(n, &constraints, 2).unwrap();
            let mut enumerated = set.enumerate(1 << 10).unwrap();
            enumerated.sort();
            let mut expected = members.clone();
            expected.sort();
            assert_eq!(enumerated, expected);
        }
    }

    #[test]
    fn rate_bookkeeping_is_exact() {
        let code = toy_interference_code(8, 2, 4, 2, 0.03, 0.02, false, 7);
        let rates = code.rates();
        assert_eq!(rates["11"], (0.5, 0.25));
        assert_eq!(rates["22"], (0.5, 0.25));
        let code3 = toy_interference_code(6, 3, 2, 1, 0.03, 0.02, false, 7);
        let (r, rr) = code3.rates()["11"];
        assert_abs_diff_eq!(r, 2.0 * 3f64.log2() / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(rr, 3f64.log2() / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn noiseless_injective_code_never_errs() {
        let code = noiseless_injective_code(4, 3);
        let prepared = code.prepare().unwrap();
        let result = prepared.simulate(1000, 11);
        assert_eq!(result.errors, 0);
        let exact = prepared.exact_error().unwrap();
        assert_abs_diff_eq!(exact.error_prob, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn unconstrained_encoder_is_plain_sampling() {
        // l_f = l_g = 0: the coset distribution equals the base law.
        let letter = vec![vec![0.3, 0.7], vec![0.6, 0.4]];
        let dist = coset_distribution(2, 2, 1, &letter, &[]).unwrap();
        assert_eq!(dist.len(), 4);
        for (blocks, p) in &dist {
            let w: f64 = blocks[0]
                .iter()
                .enumerate()
                .map(|(t, &v)| letter[t][v as usize])
                .product();
            assert_abs_diff_eq!(*p, w, epsilon = 1e-15);
        }
    }

    #[test]
    fn uninformative_channel_with_one_bit_message_errs_half_the_time() {
        // Channel output independent of input, rate-0 binning: the decoder
        // can only guess the one-bit private message.
        let mut code = toy_interference_code(2, 2, 0, 1, 0.25, 0.0, false, 13);
        // p0 = 0.25 with q = 2 means flip probability 1/4; replace the
        // channel with a fully uninformative one instead.
        let cells = 4;
        code.w = vec![1.0 / cells as f64; cells * cells];
        let prepared = code.prepare().unwrap();
        let exact = prepared.exact_error().unwrap();
        assert!(exact.error_prob >= 0.5 - 1e-9, "error {}", exact.error_prob);
    }

    #[test]
    fn exact_error_matches_monte_carlo() {
        let code = toy_interference_code(4, 2, 2, 1, 0.06, 0.03, false, 21);
        let prepared = code.prepare().unwrap();
        let exact = prepared.exact_error().unwrap();
        let trials = 200_000u64;
        let sim = prepared.simulate(trials, 17);
        let sigma = (exact.error_prob * (1.0 - exact.error_prob) / trials as f64).sqrt();
        assert!(
            (sim.error_rate - exact.error_prob).abs() <= 4.0 * sigma + 1e-9,
            "exact {} vs simulated {} (sigma {})",
            exact.error_prob,
            sim.error_rate,
            sigma
        );
    }

    #[test]
    fn stochastic_decoder_at_most_twice_map() {
        for seed in 0..6 {
            let code = toy_interference_code(3, 2, 1, 1, 0.08, 0.04, false, seed);
            let prepared = code.prepare().unwrap();
            for j in 0..2 {
                let stoch = source_decode_exact_error(&prepared, j, DecodeRule::Stochastic).unwrap();
                let map = source_decode_exact_error(&prepared, j, DecodeRule::MapCoset).unwrap();
                assert!(
                    stoch <= 2.0 * map + 1e-12,
                    "seed {seed} decoder {j}: stochastic {stoch} vs map {map}"
                );
            }
        }
    }

    #[test]
    fn decode_recovers_from_full_rank_cosets_alone() {
        // l_f = n: the coset pins the block even with useless output.
        let n = 3;
        let mut code = toy_interference_code(n, 2, n, 0, 0.0, 0.0, false, 31);
        code.w = vec![0.25; 16];
        // Full-rank f: use the identity for determinism.
        for mc in code.codes.values_mut() {
            let rows: Vec<Vec<u8>> = (0..n)
                .map(|r| (0..n).map(|c| u8::from(c == r)).collect())
                .collect();
            mc.f = LinearHash::from_rows(n, n, 2, HashMode::Dense, rows).unwrap();
            mc.c = vec![1, 0, 1];
        }
        let prepared = code.prepare().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let decoded = prepared.decode(0, &[0, 0, 0], &mut rng).unwrap();
        // No g outputs (l_g = 0), but the drawn block must be the coset label.
        assert_eq!(decoded["11"], Vec::<u8>::new());
        let weights = vec![vec![0.5, 0.5]; n];
        let constraints: Vec<(Vec<u8>, u8)> = prepared.code.codes["11"]
            .f
            .rows()
            .iter()
            .cloned()
            .zip(prepared.code.codes["11"].c.iter().copied())
            .collect();
        let dist = coset_distribution(n, 2, 1, &weights, &constraints).unwrap();
        assert_eq!(dist.len(), 1);
        assert_eq!(dist[0].0[0], vec![1, 0, 1]);
    }

    #[test]
    fn simulation_is_reproducible() {
        let code = toy_interference_code(4, 2, 2, 1, 0.05, 0.02, false, 3);
        let prepared = code.prepare().unwrap();
        let a = prepared.simulate(2000, 42);
        let b = prepared.simulate(2000, 42);
        assert_eq!(a.errors, b.errors);
        assert_eq!(a.encoder_errors, b.encoder_errors);
    }

    #[test]
    fn code_instance_json_round_trip() {
        let code = toy_interference_code(4, 3, 2, 1, 0.04, 0.02, true, 9);
        let s = serde_json::to_string(&code).unwrap();
        let back: CodeInstance = serde_json::from_str(&s).unwrap();
        back.validate().unwrap();
        let p1 = code.prepare().unwrap().simulate(500, 1);
        let p2 = back.prepare().unwrap().simulate(500, 1);
        assert_eq!(p1.errors, p2.errors);
    }
}

#[cfg(test)]
mod shared_layer_tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Five-message instance with a genuine shared layer: "00" is drawn once
    /// and handed to both encoders; each decoder reproduces four layers.
    fn shared_layer_code(seed: u64) -> CodeInstance {
        let n = 2;
        let q = 2u8;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // p(z_i0, z_ii | z00): correlated with the shared bit.
        let cond = vec![
            0.4, 0.1, 0.4, 0.1, // z00 = 0
            0.1, 0.4, 0.1, 0.4, // z00 = 1
        ];
        // x_i = z_i0 xor z_ii, deterministic.
        let mut x_cond = vec![0.0; 2 * 4 * 2];
        for s0 in 0..2usize {
            for cell in 0..4usize {
                let x = (cell >> 1) ^ (cell & 1);
                x_cond[(s0 * 4 + cell) * 2 + x] = 1.0;
            }
        }
        let encoder = |msgs: [&str; 2]| EncoderDef {
            msgs: msgs.iter().map(|m| m.to_string()).collect(),
            cond: cond.clone(),
            x_size: 2,
            x_cond: x_cond.clone(),
        };
        // Independent binary symmetric links.
        let (e1, e2) = (0.05, 0.1);
        let mut w = vec![0.0; 16];
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                for y1 in 0..2usize {
                    for y2 in 0..2usize {
                        let p1 = if y1 == x1 { 1.0 - e1 } else { e1 };
                        let p2 = if y2 == x2 { 1.0 - e2 } else { e2 };
                        w[((x1 * 2 + x2) * 2 + y1) * 2 + y2] = p1 * p2;
                    }
                }
            }
        }
        let mut codes = BTreeMap::new();
        // Shared layer: parity bin without a message hash, so its coset has
        // two members and the constrained draw is nontrivial. Private layers
        // get full-rank (f, g) stacks, so their cosets never come up empty.
        let f00 = LinearHash::from_rows(n, 1, q, HashMode::Dense, vec![vec![1, 1]]).unwrap();
        let g00 = LinearHash::from_rows(n, 0, q, HashMode::Dense, vec![]).unwrap();
        codes.insert(
            "00".to_string(),
            MsgCode {
                f: f00,
                g: g00,
                c: vec![rng.gen_range(0..q)],
            },
        );
        let stacks: [([u8; 2], [u8; 2]); 4] =
            [([1, 0], [0, 1]), ([1, 1], [1, 0]), ([0, 1], [1, 1]), ([1, 0], [1, 1])];
        for (k, id) in ["10", "11", "20", "22"].iter().enumerate() {
            let (fr, gr) = stacks[k];
            let f = LinearHash::from_rows(n, 1, q, HashMode::Dense, vec![fr.to_vec()]).unwrap();
            let g = LinearHash::from_rows(n, 1, q, HashMode::Dense, vec![gr.to_vec()]).unwrap();
            let c = vec![rng.gen_range(0..q)];
            codes.insert(id.to_string(), MsgCode { f, g, c });
        }
        CodeInstance {
            n,
            q,
            s0: vec!["00".into()],
            base_s0: vec![0.5, 0.5],
            encoders: vec![encoder(["10", "11"]), encoder(["20", "22"])],
            decoders: vec![
                DecoderDef {
                    msgs: vec!["00".into(), "10".into(), "20".into(), "11".into()],
                },
                DecoderDef {
                    msgs: vec!["00".into(), "10".into(), "20".into(), "22".into()],
                },
            ],
            y_sizes: vec![2, 2],
            w,
            codes,
        }
    }

    #[test]
    fn encoded_blocks_satisfy_every_constraint() {
        let code = shared_layer_code(1);
        let prepared = code.prepare().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut encoded_once = false;
        for _ in 0..50 {
            let messages: BTreeMap<MsgId, Vec<u8>> = code
                .all_msgs()
                .into_iter()
                .map(|m| {
                    let l = code.codes[&m].g.l();
                    let word = (0..l).map(|_| rng.gen_range(0..2u8)).collect();
                    (m, word)
                })
                .collect();
            let out = match prepared.encode(&messages, &mut rng) {
                Ok(out) => out,
                Err(CodecError::EncoderError { .. }) => continue,
                Err(other) => panic!("{other}"),
            };
            encoded_once = true;
            for (m, block) in &out.z {
                let mc = &code.codes[m];
                assert_eq!(mc.f.apply(block), mc.c, "f constraint for {m}");
                assert_eq!(mc.g.apply(block), messages[m], "g constraint for {m}");
            }
            // Deterministic channel-input maps x_i = z_i0 xor z_ii.
            for t in 0..code.n {
                assert_eq!(out.x[0][t], out.z["10"][t] ^ out.z["11"][t]);
                assert_eq!(out.x[1][t], out.z["20"][t] ^ out.z["22"][t]);
            }
        }
        assert!(encoded_once);
    }

    #[test]
    fn exact_error_matches_simulation_with_shared_layer() {
        let code = shared_layer_code(3);
        let prepared = code.prepare().unwrap();
        let exact = prepared.exact_error().unwrap();
        assert!(exact.error_prob > 0.0 && exact.error_prob < 1.0);
        let trials = 150_000u64;
        let sim = prepared.simulate(trials, 5);
        let sigma = (exact.error_prob * (1.0 - exact.error_prob) / trials as f64).sqrt();
        assert!(
            (sim.error_rate - exact.error_prob).abs() <= 4.0 * sigma + 1e-9,
            "exact {} vs simulated {} (sigma {})",
            exact.error_prob,
            sim.error_rate,
            sigma
        );
    }

    #[test]
    fn shared_draw_is_common_to_both_encoders() {
        // The shared block appears once in the output and feeds both x maps;
        // its conditional law matches the constrained distribution.
        let code = shared_layer_code(7);
        let prepared = code.prepare().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let messages: BTreeMap<MsgId, Vec<u8>> = code
            .all_msgs()
            .into_iter()
            .map(|m| {
                let l = code.codes[&m].g.l();
                (m, vec![0u8; l])
            })
            .collect();
        let constraints = prepared
            .constraints_for(&code.s0, Some(&messages))
            .unwrap();
        let weights = vec![code.base_s0.clone(); code.n];
        let dist = match coset_distribution(code.n, code.q, 1, &weights, &constraints) {
            Ok(d) => d,
            Err(CodecError::CosetEmpty) => return, // nothing to check for this draw
            Err(other) => panic!("{other}"),
        };
        let trials = 20_000usize;
        let mut counts: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
        for _ in 0..trials {
            if let Ok(out) = prepared.encode(&messages, &mut rng) {
                *counts.entry(out.z["00"].clone()).or_default() += 1;
            }
        }
        let total: usize = counts.values().sum();
        assert!(total > 0);
        for (blocks, p) in &dist {
            let observed = *counts.get(&blocks[0]).unwrap_or(&0) as f64 / total as f64;
            let sigma = (p * (1.0 - p) / total as f64).sqrt();
            assert_abs_diff_eq!(observed, p, epsilon = 4.0 * sigma + 1e-9);
        }
    }
}
