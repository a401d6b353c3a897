use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use super::counting::{log2_big, weighted_ball_count};
use crate::wave_lab::{l1_distance, GridFunction, Lab, WaveCode};

/// `(Lh/n)·Hamming(a, b)`.
pub fn code_distance(a: &WaveCode, b: &WaveCode, l: f64, h: f64) -> Result<f64> {
    Ok(l * h / a.n as f64 * a.hamming(b)? as f64)
}

/// Codes of `N` families with `n` teeth each, packed as `⌈nN/64⌉` words per code.
///
/// Bit `i·n + ℓ` holds tooth `ℓ` of family `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSet {
    pub n: usize,
    pub families: usize,
    stride: usize,
    words: Vec<u64>,
}

impl CodeSet {
    fn empty(n: usize, families: usize) -> Self {
        CodeSet { n, families, stride: (n * families).div_ceil(64).max(1), words: Vec::new() }
    }

    pub fn bits(&self) -> usize {
        self.n * self.families
    }

    pub fn len(&self) -> usize {
        self.words.len() / self.stride
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self, idx: usize) -> &[u64] {
        &self.words[idx * self.stride..(idx + 1) * self.stride]
    }

    fn push_words(&mut self, w: &[u64]) {
        self.words.extend_from_slice(w);
    }

    pub fn from_codes(codes: &[WaveCode]) -> Result<Self> {
        let first = codes.first().ok_or_else(|| Error::InvalidCode("empty code list".into()))?;
        let mut set = CodeSet::empty(first.n, first.families());
        let mut buf = vec![0u64; set.stride];
        for c in codes {
            if c.n != set.n || c.families() != set.families {
                return Err(Error::ShapeMismatch(format!(
                    "code of shape {}x{} in a {}x{} set",
                    c.families(),
                    c.n,
                    set.families,
                    set.n
                )));
            }
            buf.iter_mut().for_each(|w| *w = 0);
            for (p, bit) in c.bits().enumerate() {
                if bit {
                    buf[p / 64] |= 1 << (p % 64);
                }
            }
            set.push_words(&buf);
        }
        Ok(set)
    }

    /// All `2^{nN}` codes in increasing order of their integer value.
    pub fn full_cube(n: usize, families: usize) -> Result<Self> {
        let d = n * families;
        if d == 0 || d > 24 {
            return Err(Error::ParameterViolation(format!("full cube enumeration needs 1 <= nN <= 24, got {d}")));
        }
        let mut set = CodeSet::empty(n, families);
        set.words = (0..1u64 << d).collect();
        Ok(set)
    }

    /// `count` uniform codes (seeded), deduplicated and sorted lexicographically.
    pub fn sample(n: usize, families: usize, count: usize, seed: u64) -> Self {
        let mut set = CodeSet::empty(n, families);
        let d = set.bits();
        let stride = set.stride;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut codes: Vec<Vec<u64>> = (0..count)
            .map(|_| {
                let mut w: Vec<u64> = (0..stride).map(|_| rng.gen()).collect();
                if d % 64 != 0 {
                    w[stride - 1] &= (1u64 << (d % 64)) - 1;
                }
                w
            })
            .collect();
        // Lexicographic order on the bit sequence read from tooth 0 onward.
        let key = |w: &Vec<u64>| -> Vec<u64> { w.iter().map(|x| x.reverse_bits()).collect() };
        codes.sort_by_cached_key(key);
        codes.dedup();
        for w in &codes {
            set.push_words(w);
        }
        set
    }

    pub fn code(&self, idx: usize) -> WaveCode {
        let w = self.words(idx);
        let codes = (0..self.families)
            .map(|i| (0..self.n).map(|l| (w[(i * self.n + l) / 64] >> ((i * self.n + l) % 64)) & 1 == 1).collect())
            .collect();
        WaveCode { n: self.n, codes }
    }

    pub fn hamming(&self, a: usize, b: usize) -> usize {
        self.words(a).iter().zip(self.words(b)).map(|(x, y)| (x ^ y).count_ones() as usize).sum()
    }
}

/// Per-family bit masks over the packed words.
fn family_masks(n: usize, families: usize, stride: usize) -> Vec<Vec<u64>> {
    (0..families)
        .map(|i| {
            let mut m = vec![0u64; stride];
            for p in i * n..(i + 1) * n {
                m[p / 64] |= 1 << (p % 64);
            }
            m
        })
        .collect()
}

/// A finite set of functions on which packings and coverings are measured.
#[derive(Debug, Clone)]
pub enum FunctionEnsemble {
    /// Explicit grid functions sharing one grid.
    Grid(Vec<GridFunction>),
    /// Sawtooth codes whose realized distance is `Σ_i δ_i·(teeth of family i that differ)`.
    Codes { set: CodeSet, tooth_distance: Vec<f64> },
}

impl FunctionEnsemble {
    pub fn grid(items: Vec<GridFunction>) -> Result<Self> {
        if let Some(first) = items.first() {
            if let Some(bad) = items.iter().find(|g| !first.same_grid(g)) {
                return Err(Error::GridMismatch(format!(
                    "[{}, {}] with {} cells vs [{}, {}] with {} cells",
                    first.x_min(),
                    first.x_max(),
                    first.cells(),
                    bad.x_min(),
                    bad.x_max(),
                    bad.cells()
                )));
            }
        }
        Ok(FunctionEnsemble::Grid(items))
    }

    /// Sawtooth family `F_{n,h}` on an interval of length `L`, where every differing tooth costs `Lh/n`.
    pub fn sawtooth(set: CodeSet, l: f64, h: f64) -> Self {
        let delta = l * h / set.n as f64;
        let tooth_distance = vec![delta; set.families];
        FunctionEnsemble::Codes { set, tooth_distance }
    }

    /// Codes with an explicit per-family tooth distance.
    pub fn weighted(set: CodeSet, tooth_distance: Vec<f64>) -> Result<Self> {
        if tooth_distance.len() != set.families {
            return Err(Error::ShapeMismatch(format!(
                "{} tooth distances for {} families",
                tooth_distance.len(),
                set.families
            )));
        }
        Ok(FunctionEnsemble::Codes { set, tooth_distance })
    }

    pub fn len(&self) -> usize {
        match self {
            FunctionEnsemble::Grid(v) => v.len(),
            FunctionEnsemble::Codes { set, .. } => set.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Distance between items `a` and `b`.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        match self {
            FunctionEnsemble::Grid(v) => l1_distance(&v[a], &v[b]).expect("ensemble shares one grid"),
            FunctionEnsemble::Codes { set, tooth_distance } => {
                if tooth_distance.windows(2).all(|w| w[0] == w[1]) {
                    return tooth_distance[0] * set.hamming(a, b) as f64;
                }
                let masks = family_masks(set.n, set.families, set.stride);
                weighted_distance(set.words(a), set.words(b), &masks, tooth_distance)
            }
        }
    }
}

fn weighted_distance(a: &[u64], b: &[u64], masks: &[Vec<u64>], weights: &[f64]) -> f64 {
    masks
        .iter()
        .zip(weights)
        .map(|(m, w)| {
            let d: u32 = a.iter().zip(b).zip(m).map(|((x, y), mm)| ((x ^ y) & mm).count_ones()).sum();
            w * d as f64
        })
        .sum()
}

/// Greedy maximal packing: indices of a set with pairwise distance `> radius`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packing {
    pub count: usize,
    pub witnesses: Vec<usize>,
}

/// Scans the ensemble in index order, keeping every item farther than `radius` from all kept ones.
pub fn greedy_packing(ensemble: &FunctionEnsemble, radius: f64) -> Packing {
    let witnesses = match ensemble {
        FunctionEnsemble::Grid(items) => {
            let mut kept: Vec<usize> = Vec::new();
            for j in 0..items.len() {
                let clash = kept.par_iter().any(|&i| l1_distance(&items[i], &items[j]).expect("shared grid") <= radius);
                if !clash {
                    kept.push(j);
                }
            }
            kept
        }
        FunctionEnsemble::Codes { set, tooth_distance } => pack_codes(set, tooth_distance, radius),
    };
    Packing { count: witnesses.len(), witnesses }
}

/// Keys of the `parts` contiguous bit blocks of a code.
fn block_keys(w: &[u64], d: usize, parts: usize, out: &mut Vec<u64>) {
    out.clear();
    for p in 0..parts {
        let (s, e) = (p * d / parts, (p + 1) * d / parts);
        let mut h: u64 = 0x9e37_79b9_7f4a_7c15 ^ (p as u64).wrapping_mul(0xff51_afd7_ed55_8ccd);
        let mut pos = s;
        while pos < e {
            let (wi, off) = (pos / 64, pos % 64);
            let take = (64 - off).min(e - pos);
            let mask = if take == 64 { u64::MAX } else { (1u64 << take) - 1 };
            let chunk = (w[wi] >> off) & mask;
            h = (h ^ chunk).wrapping_mul(0x1000_0000_01b3).rotate_left(29);
            pos += take;
        }
        out.push(h);
    }
}

fn pack_codes(set: &CodeSet, tooth_distance: &[f64], radius: f64) -> Vec<usize> {
    let masks = family_masks(set.n, set.families, set.stride);
    let uniform = tooth_distance.windows(2).all(|w| w[0] == w[1]);
    let clash = |a: &[u64], b: &[u64]| -> bool {
        if uniform {
            let d: u32 = a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones()).sum();
            tooth_distance[0] * d as f64 <= radius
        } else {
            weighted_distance(a, b, &masks, tooth_distance) <= radius
        }
    };
    let d = set.bits();
    let delta_min = tooth_distance.iter().copied().fold(f64::INFINITY, f64::min);
    // Any clash has Hamming distance ≤ k, so some of k + 1 blocks agree exactly.
    let k = if delta_min > 0.0 { (radius / delta_min * (1.0 + 1e-12)).floor() } else { f64::INFINITY };
    let parts = if k.is_finite() { k as usize + 1 } else { usize::MAX };
    let mut kept: Vec<usize> = Vec::new();
    if parts > d / 4 {
        for j in 0..set.len() {
            let wj = set.words(j);
            if !kept.iter().any(|&i| clash(set.words(i), wj)) {
                kept.push(j);
            }
        }
        return kept;
    }
    let mut index: HashMap<u64, Vec<u32>> = HashMap::new();
    let mut keys = Vec::with_capacity(parts);
    let mut stamp = vec![u32::MAX; set.len()];
    for j in 0..set.len() {
        let wj = set.words(j);
        block_keys(wj, d, parts, &mut keys);
        let mut ok = true;
        'scan: for key in &keys {
            if let Some(list) = index.get(key) {
                for &i in list {
                    if stamp[i as usize] == j as u32 {
                        continue;
                    }
                    stamp[i as usize] = j as u32;
                    if clash(set.words(i as usize), wj) {
                        ok = false;
                        break 'scan;
                    }
                }
            }
        }
        if ok {
            for &key in &keys {
                index.entry(key).or_default().push(j as u32);
            }
            kept.push(j);
        }
    }
    kept
}

/// Greedy set cover by balls of `radius` centered at ensemble items; ties go to the lowest index.
pub fn greedy_covering(ensemble: &FunctionEnsemble, radius: f64) -> usize {
    let m = ensemble.len();
    if m == 0 {
        return 0;
    }
    let balls: Vec<Vec<usize>> =
        (0..m).into_par_iter().map(|i| (0..m).filter(|&j| i == j || ensemble.distance(i, j) <= radius).collect()).collect();
    let mut covered = vec![false; m];
    let mut left = m;
    let mut count = 0;
    while left > 0 {
        let (best, gain) = balls
            .iter()
            .enumerate()
            .map(|(i, b)| (i, b.iter().filter(|&&j| !covered[j]).count()))
            .fold((0, 0), |acc, (i, g)| if g > acc.1 { (i, g) } else { acc });
        for &j in &balls[best] {
            if !covered[j] {
                covered[j] = true;
            }
        }
        left -= gain;
        count += 1;
    }
    count
}

/// Size of the lexicographic code in `{0,1}^d` with pairwise Hamming distance `> k`.
///
/// Scans the cube in increasing integer order, marking the radius-`k` ball of each accepted word.
pub fn cube_lexicode_packing(d: usize, k: usize) -> Result<usize> {
    if d == 0 || d > 24 {
        return Err(Error::ParameterViolation(format!("cube packing needs 1 <= d <= 24, got {d}")));
    }
    let k = k.min(d);
    let mut offsets: Vec<u32> = Vec::new();
    for w in 0..=k {
        if w == 0 {
            offsets.push(0);
            continue;
        }
        // Gosper's hack over all weight-w masks.
        let mut x: u64 = (1 << w) - 1;
        while x < 1 << d {
            offsets.push(x as u32);
            let c = x & x.wrapping_neg();
            let r = x + c;
            x = (((r ^ x) >> 2) / c) | r;
        }
    }
    let size = 1usize << d;
    let mut marked = vec![0u64; size.div_ceil(64)];
    let mut count = 0;
    for w in 0..size {
        if marked[w / 64] >> (w % 64) & 1 == 1 {
            continue;
        }
        count += 1;
        for &o in &offsets {
            let v = w ^ o as usize;
            marked[v / 64] |= 1 << (v % 64);
        }
    }
    Ok(count)
}

/// Realized `L¹` cost `δ_i` of flipping one tooth of family `i` in a sawtooth of `n` teeth,
/// height `h` and base length `L̃`: `δ_i = (L̃/(nh)) ∫₀^h |φ_i(s) − φ_i(−s)| ds`.
pub fn tooth_distances(lab: &Lab, n: usize, h: f64, l_tilde: f64) -> Vec<f64> {
    let steps = 512;
    let ds = h / steps as f64;
    let dim = lab.dim();
    let (mut up, mut down) = (vec![0.0; dim], vec![0.0; dim]);
    (0..dim)
        .map(|i| {
            let mut f = |s: f64| {
                lab.wave_state_into(i, s, &mut up);
                lab.wave_state_into(i, -s, &mut down);
                up.iter().zip(&down).map(|(a, b)| (a - b).abs()).sum::<f64>()
            };
            // Composite Simpson rule.
            let mut acc = f(0.0) + f(h);
            for k in 1..steps {
                acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * ds);
            }
            l_tilde / (n as f64 * h) * acc * ds / 3.0
        })
        .collect()
}

/// `log₂(2^{nN}/B)` where `B` counts codes within weighted distance `radius` of a fixed code.
///
/// Every maximal packing with separation `> radius` has at least `2^{nN}/B` elements.
pub fn certified_packing_bits(n: usize, tooth_distance: &[f64], radius: f64) -> f64 {
    let ball = weighted_ball_count(n, tooth_distance, radius);
    (n * tooth_distance.len()) as f64 - log2_big(&ball)
}
