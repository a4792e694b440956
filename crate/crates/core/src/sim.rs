//! Random-codebook achievability simulator.
//!
//! Each trial draws a fresh codebook of `ceil(2^(L*R))` words i.i.d. from
//! the output distribution of a chosen reconstruction channel, draws a
//! source string, encodes by picking the codeword whose pair-empirical
//! distribution with the observed string deviates least from the target
//! joint, and measures the distortion and Bhattacharyya overlap of the
//! (state, codeword) pair.
//!
//! Codebooks that fit the memory budget are materialized and searched
//! literally. Above the budget the codebook is never instantiated: the
//! encoder's choice depends on a codeword only through its joint type with
//! the observed string, the type counts of independent letters follow
//! per-class multinomials, and the probability that the best present type
//! has a given deviation rank is a product of survival terms. Sampling the
//! chosen type from those closed-form probabilities and then arranging its
//! letters uniformly within each observation class reproduces the exact
//! distribution of every reported statistic, at any codebook size.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distortion::{overlap_squared, string_distortion, DistortionMeasure};
use crate::model::{CdoSource, Mode};
use crate::prob::{compose, empirical_joint, Channel, JointPmf, Pmf};
use crate::{Error, Result};

/// Largest number of letters (`K * L`) a materialized codebook may hold.
pub const MEMORY_BUDGET_LETTERS: u64 = 1 << 26;

/// Largest joint-type table the closed-form encoder may enumerate per trial.
const TYPE_TABLE_BUDGET: u64 = 1 << 22;

/// A drawn random codebook: `num_words` words of `block_len` letters.
#[derive(Debug, Clone)]
pub struct Codebook {
    pub block_len: usize,
    pub num_words: usize,
    pub words: Vec<Vec<u8>>,
}

/// Aggregated statistics of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub trials: usize,
    pub mean_distortion: f64,
    /// Fraction of trials whose squared overlap fell below `1 - epsilon`.
    pub overlap_fail_rate: f64,
    pub rate_bits: f64,
    pub epsilon: f64,
    pub block_len: usize,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Inverse-CDF draw from a pmf given a uniform in `[0, 1)`.
fn draw_letter(p: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        acc += pi;
        if u < acc {
            return i;
        }
    }
    p.len() - 1
}

/// Draw a source realization: the state string and what the encoder sees
/// (the states themselves in visible mode, measurement outcomes in hidden
/// mode).
pub fn sample_source(s: &CdoSource, block_len: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    assert!(block_len >= 1, "block length must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let prior = s.prior().as_slice();
    let mut x_str = Vec::with_capacity(block_len);
    let mut v_str = Vec::with_capacity(block_len);
    for _ in 0..block_len {
        let x = draw_letter(prior, rng.gen::<f64>());
        x_str.push(x);
        let v = match s.mode() {
            Mode::Visible => x,
            Mode::Hidden => draw_letter(s.measurement().row(x), rng.gen::<f64>()),
        };
        v_str.push(v);
    }
    (x_str, v_str)
}

/// The number of codewords for a block length and rate: `ceil(2^(L*R))`.
///
/// Returned as a float because the count can exceed any integer type; the
/// caller decides whether it is materializable.
pub fn num_codewords(block_len: usize, rate: f64) -> f64 {
    libm::ceil(libm::exp2(block_len as f64 * rate))
}

/// Draw `ceil(2^(L*R))` words of `L` i.i.d. letters from `py`.
pub fn generate_codebook(py: &Pmf, block_len: usize, rate: f64, seed: u64) -> Result<Codebook> {
    if rate < 0.0 || !rate.is_finite() {
        return Err(Error::OutOfRange {
            what: "rate",
            value: rate,
        });
    }
    if block_len == 0 {
        return Err(Error::OutOfRange {
            what: "block_len",
            value: 0.0,
        });
    }
    if py.len() > 256 {
        return Err(Error::AlphabetTooLarge {
            what: "codeword",
            size: py.len(),
            max: 256,
        });
    }
    let k_f = num_codewords(block_len, rate);
    let letters = k_f * block_len as f64;
    if !(letters <= MEMORY_BUDGET_LETTERS as f64) {
        return Err(Error::MemoryBudget {
            required: letters,
            budget: MEMORY_BUDGET_LETTERS,
        });
    }
    let k = k_f as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probs = py.as_slice();
    let mut words = Vec::with_capacity(k);
    for _ in 0..k {
        let mut w = Vec::with_capacity(block_len);
        for _ in 0..block_len {
            w.push(draw_letter(probs, rng.gen::<f64>()) as u8);
        }
        words.push(w);
    }
    Ok(Codebook {
        block_len,
        num_words: k,
        words,
    })
}

/// Index of the codeword whose pair-empirical distribution with `v_str`
/// deviates least (in max norm) from the target joint; ties go to the
/// lowest index.
pub fn encode(v_str: &[usize], cb: &Codebook, target_pvy: &JointPmf) -> usize {
    let n_v = target_pvy.rows();
    let n_y = target_pvy.cols();
    let len = v_str.len() as f64;
    let mut best_idx = 0;
    let mut best_dev = f64::INFINITY;
    let mut counts = vec![0u32; n_v * n_y];
    for (k, word) in cb.words.iter().enumerate() {
        counts.iter_mut().for_each(|c| *c = 0);
        for (&v, &y) in v_str.iter().zip(word.iter()) {
            counts[v * n_y + y as usize] += 1;
        }
        let mut dev: f64 = 0.0;
        for v in 0..n_v {
            for y in 0..n_y {
                let e = counts[v * n_y + y] as f64 / len;
                dev = dev.max((e - target_pvy.prob(v, y)).abs());
            }
        }
        if dev < best_dev {
            best_dev = dev;
            best_idx = k;
        }
    }
    best_idx
}

// ---------------------------------------------------------------------------
// Closed-form sampling of the encoder's chosen word
// ---------------------------------------------------------------------------

mod typeclass {
    use super::*;

    /// All ways to split `n` letters among `k` output letters.
    fn compositions(n: usize, k: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; k];
        fn rec(rem: usize, part: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if part == cur.len() - 1 {
                cur[part] = rem as u32;
                out.push(cur.clone());
                return;
            }
            for take in 0..=rem {
                cur[part] = take as u32;
                rec(rem - take, part + 1, cur, out);
            }
        }
        rec(n, 0, &mut cur, &mut out);
        out
    }

    /// Number of joint types: the product over observation classes of the
    /// per-class composition counts.
    pub fn table_size(class_counts: &[usize], n_y: usize) -> f64 {
        let mut total = 1.0f64;
        for &n in class_counts {
            // C(n + n_y - 1, n_y - 1)
            let mut c = 1.0f64;
            for i in 0..(n_y - 1) {
                c = c * (n + i + 1) as f64 / (i + 1) as f64;
            }
            total *= c;
        }
        total
    }

    struct ClassTypes {
        /// Each composition of the class size over the output alphabet.
        comps: Vec<Vec<u32>>,
        /// Log-probability of each composition under i.i.d. `py` letters.
        ln_p: Vec<f64>,
        /// Per-class contribution to the max-norm deviation.
        dev: Vec<f64>,
    }

    fn class_types(
        n: usize,
        py: &[f64],
        target_row: &[f64],
        block_len: usize,
        ln_fact: &[f64],
    ) -> ClassTypes {
        let comps = compositions(n, py.len());
        let mut ln_p = Vec::with_capacity(comps.len());
        let mut dev = Vec::with_capacity(comps.len());
        for comp in &comps {
            let mut lp = ln_fact[n];
            let mut d: f64 = 0.0;
            for (b, &c) in comp.iter().enumerate() {
                let c = c as usize;
                if c > 0 {
                    if py[b] <= 0.0 {
                        lp = f64::NEG_INFINITY;
                    } else {
                        lp += c as f64 * libm::log(py[b]) - ln_fact[c];
                    }
                }
                d = d.max((c as f64 / block_len as f64 - target_row[b]).abs());
            }
            ln_p.push(lp);
            dev.push(d);
        }
        ClassTypes { comps, ln_p, dev }
    }

    /// Sample the joint type of the codeword the encoder would select out
    /// of `k_words` i.i.d. words, then realize a concrete word by placing
    /// the letters uniformly at random within each observation class.
    ///
    /// `class_positions[a]` lists the positions of `v_str` holding letter
    /// `a`. Exact for every codebook size, including counts far beyond
    /// anything materializable.
    pub fn sample_chosen_word(
        class_positions: &[Vec<usize>],
        py: &Pmf,
        target: &JointPmf,
        k_words: f64,
        block_len: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<usize>> {
        let n_v = class_positions.len();
        let n_y = py.len();
        let class_counts: Vec<usize> = class_positions.iter().map(|p| p.len()).collect();
        let table = table_size(&class_counts, n_y);
        if !(table <= TYPE_TABLE_BUDGET as f64) {
            return Err(Error::MemoryBudget {
                required: table,
                budget: TYPE_TABLE_BUDGET,
            });
        }

        let mut ln_fact = vec![0.0f64; block_len + 1];
        for i in 1..=block_len {
            ln_fact[i] = ln_fact[i - 1] + libm::log(i as f64);
        }

        let classes: Vec<ClassTypes> = (0..n_v)
            .map(|a| {
                let row: Vec<f64> = (0..n_y).map(|b| target.prob(a, b)).collect();
                class_types(class_counts[a], py.as_slice(), &row, block_len, &ln_fact)
            })
            .collect();

        // Flatten the product space: (deviation, probability, flat index).
        let total = classes.iter().map(|c| c.comps.len()).fold(1usize, |a, b| a * b);
        let mut entries: Vec<(f64, f64, usize)> = Vec::with_capacity(total);
        let mut idx = vec![0usize; n_v];
        for flat in 0..total {
            let mut rem = flat;
            let mut dev: f64 = 0.0;
            let mut lp = 0.0;
            for (a, class) in classes.iter().enumerate() {
                let i = rem % class.comps.len();
                rem /= class.comps.len();
                idx[a] = i;
                dev = dev.max(class.dev[i]);
                lp += class.ln_p[i];
            }
            entries.push((dev, libm::exp(lp), flat));
        }
        // Deviation groups must match the literal encoder's tie handling,
        // so order by the exact float value with the index as tie-breaker.
        entries.sort_by(|a, b| {
            a.0.partial_cmp(&b.0)
                .unwrap_or(core::cmp::Ordering::Equal)
                .then(a.2.cmp(&b.2))
        });

        // Walk deviation groups in order; the chosen group is the first one
        // any of the k words lands in: P[group <= j] = 1 - (1 - Q_j)^k.
        let u: f64 = rng.gen();
        let mut q_before = 0.0f64;
        let mut chosen_flat = entries.last().map(|e| e.2).unwrap_or(0);
        let mut i = 0;
        while i < entries.len() {
            let dev = entries[i].0;
            let mut j = i;
            let mut group_p = 0.0;
            while j < entries.len() && entries[j].0 == dev {
                group_p += entries[j].1;
                j += 1;
            }
            let q_after = q_before + group_p;
            let survive = if q_after >= 1.0 {
                0.0
            } else {
                libm::exp(k_words * libm::log1p(-q_after))
            };
            if 1.0 - survive > u || j >= entries.len() {
                // Pick the type within the group proportionally to its
                // probability of being the first matching word.
                let u2: f64 = rng.gen::<f64>() * group_p;
                let mut acc = 0.0;
                chosen_flat = entries[i].2;
                for e in &entries[i..j] {
                    acc += e.1;
                    if u2 < acc {
                        chosen_flat = e.2;
                        break;
                    }
                    chosen_flat = e.2;
                }
                break;
            }
            q_before = q_after;
            i = j;
        }

        // Decode the flat index back into per-class compositions and place
        // letters uniformly within each class.
        let mut word = vec![0usize; block_len];
        let mut rem = chosen_flat;
        for (a, class) in classes.iter().enumerate() {
            let i = rem % class.comps.len();
            rem /= class.comps.len();
            let comp = &class.comps[i];
            let mut letters: Vec<usize> = Vec::with_capacity(class_counts[a]);
            for (b, &c) in comp.iter().enumerate() {
                for _ in 0..c {
                    letters.push(b);
                }
            }
            // Fisher-Yates.
            for t in (1..letters.len()).rev() {
                let r = rng.gen_range(0..=t);
                letters.swap(t, r);
            }
            for (pos, letter) in class_positions[a].iter().zip(letters) {
                word[*pos] = letter;
            }
        }
        Ok(word)
    }
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

/// Run the random-coding experiment and aggregate the results.
///
/// Per trial (seeded independently, so results do not depend on execution
/// order): draw a source string, draw a fresh codebook from the output
/// distribution of `channel`, encode, and record the distortion between the
/// state string and the chosen word together with the squared overlap of
/// their empirical joint against the model joint.
#[allow(clippy::too_many_arguments)]
pub fn simulate(
    s: &CdoSource,
    m: &DistortionMeasure,
    channel: &Channel,
    block_len: usize,
    rate: f64,
    trials: usize,
    epsilon: f64,
    seed: u64,
) -> Result<SimReport> {
    if block_len == 0 || trials == 0 {
        return Err(Error::OutOfRange {
            what: "block_len/trials",
            value: 0.0,
        });
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::OutOfRange {
            what: "epsilon",
            value: epsilon,
        });
    }
    if rate < 0.0 || !rate.is_finite() {
        return Err(Error::OutOfRange {
            what: "rate",
            value: rate,
        });
    }
    let n_y = m.output_size(s);
    if n_y != s.num_outcomes() || channel.num_outputs() != n_y {
        return Err(Error::ShapeMismatch {
            expected: (s.view().v_size, s.num_outcomes()),
            got: (channel.num_inputs(), channel.num_outputs()),
        });
    }
    let (target_pvy, _) = crate::solver::induced_joints(s, channel)?;
    let py = target_pvy.col_marginal();
    let p_xz = s.joint_xz();

    let k_f = num_codewords(block_len, rate);
    let materialize = k_f * block_len as f64 <= MEMORY_BUDGET_LETTERS as f64;

    let mut sum_dist = 0.0;
    let mut fails = 0usize;
    for trial in 0..trials {
        let t0 = splitmix64(seed ^ trial as u64);
        let src_seed = splitmix64(t0 ^ 1);
        let cb_seed = splitmix64(t0 ^ 2);

        let (x_str, v_str) = sample_source(s, block_len, src_seed);
        let word: Vec<usize> = if materialize {
            let cb = generate_codebook(&py, block_len, rate, cb_seed)?;
            let k = encode(&v_str, &cb, &target_pvy);
            cb.words[k].iter().map(|&b| b as usize).collect()
        } else {
            let mut class_positions = vec![Vec::new(); target_pvy.rows()];
            for (pos, &v) in v_str.iter().enumerate() {
                class_positions[v].push(pos);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(cb_seed);
            typeclass::sample_chosen_word(
                &class_positions,
                &py,
                &target_pvy,
                k_f,
                block_len,
                &mut rng,
            )?
        };

        sum_dist += string_distortion(m, s, &x_str, &word)?;
        let emp = empirical_joint(
            &x_str
                .iter()
                .copied()
                .zip(word.iter().copied())
                .collect::<Vec<_>>(),
            s.num_states(),
            n_y,
        )?;
        if overlap_squared(&emp, &p_xz)? < 1.0 - epsilon {
            fails += 1;
        }
    }

    Ok(SimReport {
        trials,
        mean_distortion: sum_dist / trials as f64,
        overlap_fail_rate: fails as f64 / trials as f64,
        rate_bits: rate,
        epsilon,
        block_len,
    })
}
