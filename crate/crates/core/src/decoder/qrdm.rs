//! Breadth-first M-algorithm over the QR factor of the equivalent channel.

use std::cmp::Ordering;

use super::{DecodeOutcome, DecoderConfig, SurvivorSets};
use crate::error::{Error, Result};
use crate::linalg::RealMatrix;
use crate::structure::{qr_decompose, BlockProfile};

/// Channel factorization and rotated observation shared by all decoders.
#[derive(Debug, Clone)]
pub struct Prepared {
    r: RealMatrix,
    z: Vec<f64>,
}

impl Prepared {
    /// QR of `sqrt(rho) H` and `z = Q^T y`.
    pub fn new(h: &RealMatrix, y: &[f64], rho: f64) -> Result<Self> {
        if y.len() != h.nrows() {
            return Err(Error::LengthMismatch {
                expected: h.nrows(),
                actual: y.len(),
            });
        }
        let (q, r) = qr_decompose(&(h * rho.sqrt()))?;
        let z = (0..q.ncols())
            .map(|c| q.column(c).iter().zip(y).map(|(a, b)| a * b).sum())
            .collect();
        Ok(Self { r, z })
    }

    pub fn l(&self) -> usize {
        self.z.len()
    }

    pub fn r(&self) -> &RealMatrix {
        &self.r
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    /// Search without structure sharing.
    pub fn traditional(&self, cfg: &DecoderConfig) -> Result<DecodeOutcome> {
        self.search(cfg, false)
    }

    /// Search sharing metric increments across survivors with a common
    /// block-boundary prefix. Requires `cfg.profile`.
    pub fn simplified(&self, cfg: &DecoderConfig) -> Result<DecodeOutcome> {
        if cfg.profile.is_none() {
            return Err(Error::ProfileMismatch("simplified decoding needs a block profile".into()));
        }
        self.search(cfg, true)
    }

    fn search(&self, cfg: &DecoderConfig, share: bool) -> Result<DecodeOutcome> {
        let l = self.l();
        let profile = match cfg.profile {
            Some(p) if p.l() != l => {
                return Err(Error::ProfileMismatch(format!(
                    "profile {p} covers {} symbols, channel has {l}",
                    p.l()
                )))
            }
            Some(p) => p,
            None => BlockProfile::unstructured(l),
        };
        if cfg.survivors == 0 {
            return Err(Error::InvalidParameter("survivor budget must be at least 1".into()));
        }
        Search::new(self, cfg, profile)?.run(share, cfg.record_survivors)
    }
}

/// Working state of one search.
struct Search<'a> {
    r: &'a RealMatrix,
    z: &'a [f64],
    profile: BlockProfile,
    gamma: usize,
    alphabet: usize,
    /// Symbol values of each unit candidate, `alphabet x gamma`.
    candidates: Vec<f64>,
    /// Level indices of each unit candidate, `alphabet x gamma`.
    candidate_indices: Vec<usize>,
    budget: usize,
}

#[derive(Clone, Copy)]
struct Candidate {
    metric: f64,
    parent: u32,
    choice: u32,
}

fn candidate_order(a: &Candidate, b: &Candidate) -> Ordering {
    a.metric
        .total_cmp(&b.metric)
        .then(a.parent.cmp(&b.parent))
        .then(a.choice.cmp(&b.choice))
}

impl<'a> Search<'a> {
    fn new(prep: &'a Prepared, cfg: &DecoderConfig, profile: BlockProfile) -> Result<Self> {
        let gamma = profile.unit_size;
        let m = cfg.constellation.order();
        let alphabet = m
            .checked_pow(gamma as u32)
            .filter(|&a| a <= 1 << 20)
            .ok_or_else(|| Error::InvalidParameter(format!("unit alphabet {m}^{gamma} is too large")))?;
        let mut candidates = Vec::with_capacity(alphabet * gamma);
        let mut candidate_indices = Vec::with_capacity(alphabet * gamma);
        for c in 0..alphabet {
            // Digit t (most significant first) is the level of symbol t in the unit.
            for t in 0..gamma {
                let idx = (c / m.pow((gamma - 1 - t) as u32)) % m;
                candidate_indices.push(idx);
                candidates.push(cfg.constellation.level(idx));
            }
        }
        Ok(Self {
            r: &prep.r,
            z: &prep.z,
            profile,
            gamma,
            alphabet,
            candidates,
            candidate_indices,
            budget: cfg.survivors,
        })
    }

    /// Branch metric increments of every candidate for the unit starting at
    /// row `a`, given decided values for columns `from..`.
    fn increments(&self, a: usize, from: usize, values: &[f64], out: &mut [f64], resid: &mut [f64]) {
        let g = self.gamma;
        for (t, res) in resid.iter_mut().enumerate() {
            let row = a + t;
            let mut acc = self.z[row];
            for j in from..values.len() {
                acc -= self.r[(row, j)] * values[j];
            }
            *res = acc;
        }
        for (c, slot) in out.iter_mut().enumerate() {
            let vals = &self.candidates[c * g..(c + 1) * g];
            let mut metric = 0.0;
            for t in 0..g {
                let row = a + t;
                let mut e = resid[t];
                for u in t..g {
                    e -= self.r[(row, a + u)] * vals[u];
                }
                metric += e * e;
            }
            *slot = metric;
        }
    }

    fn run(&self, share: bool, record: bool) -> Result<DecodeOutcome> {
        let l = self.z.len();
        let g = self.gamma;
        let units = self.profile.unit_count();
        let k = self.profile.units;
        let last_block = self.profile.blocks - 1;
        let a_size = self.alphabet;

        // Survivors, kept in lexicographic order of their choice sequences.
        let mut n = 1usize;
        let mut paths: Vec<u32> = Vec::new();
        let mut values: Vec<f64> = vec![0.0; l];
        let mut metrics: Vec<f64> = vec![0.0];
        let mut prefixes: Vec<u32> = vec![0];

        let mut metric_evals: u64 = 0;
        let mut raw_evals: u64 = 0;
        let mut mceq_per_stage = Vec::with_capacity(units);
        let mut survivors_per_stage = Vec::with_capacity(units);
        let mut survivor_sets: SurvivorSets = Vec::new();

        let mut inc = vec![0.0; a_size];
        let mut resid = vec![0.0; g];
        let mut cands: Vec<Candidate> = Vec::new();

        for stage in 0..units {
            let unit = units - 1 - stage;
            let a = unit * g;
            let block = unit / k;
            let block_first = unit % k == k - 1;
            let sharing = share && block < last_block && !block_first;

            cands.clear();
            cands.reserve(n * a_size);
            let mceq;
            if sharing {
                // Decided symbols of earlier-decoded blocks start here.
                let from = (block + 1) * k * g;
                let mut slot_of: Vec<u32> = vec![u32::MAX; prefixes.iter().max().map_or(0, |&p| p as usize + 1)];
                let mut table: Vec<f64> = Vec::new();
                let mut distinct = 0usize;
                for p in 0..n {
                    let id = prefixes[p] as usize;
                    if slot_of[id] == u32::MAX {
                        slot_of[id] = distinct as u32;
                        self.increments(a, from, &values[p * l..(p + 1) * l], &mut inc, &mut resid);
                        table.extend_from_slice(&inc);
                        distinct += 1;
                    }
                    let row = &table[slot_of[id] as usize * a_size..][..a_size];
                    for (c, &d) in row.iter().enumerate() {
                        cands.push(Candidate {
                            metric: metrics[p] + d,
                            parent: p as u32,
                            choice: c as u32,
                        });
                    }
                }
                mceq = distinct;
            } else {
                for p in 0..n {
                    self.increments(a, a + g, &values[p * l..(p + 1) * l], &mut inc, &mut resid);
                    for (c, &d) in inc.iter().enumerate() {
                        cands.push(Candidate {
                            metric: metrics[p] + d,
                            parent: p as u32,
                            choice: c as u32,
                        });
                    }
                }
                mceq = n;
            }

            let expanded = n * a_size;
            raw_evals += (a_size * mceq) as u64;
            if expanded > self.budget || stage + 1 == units {
                let parents = if n >= self.budget { mceq } else { n };
                metric_evals += (a_size * parents) as u64;
            }
            mceq_per_stage.push(mceq);

            if cands.len() > self.budget {
                cands.select_nth_unstable_by(self.budget - 1, candidate_order);
                cands.truncate(self.budget);
                cands.sort_unstable_by(|x, y| x.parent.cmp(&y.parent).then(x.choice.cmp(&y.choice)));
            }

            let next_n = cands.len();
            let depth = stage + 1;
            let mut next_paths = Vec::with_capacity(next_n * depth);
            let mut next_values = Vec::with_capacity(next_n * l);
            let mut next_metrics = Vec::with_capacity(next_n);
            let mut next_prefixes = Vec::with_capacity(next_n);
            for cand in &cands {
                let p = cand.parent as usize;
                next_paths.extend_from_slice(&paths[p * stage..(p + 1) * stage]);
                next_paths.push(cand.choice);
                let base = next_values.len();
                next_values.extend_from_slice(&values[p * l..(p + 1) * l]);
                let c = cand.choice as usize;
                next_values[base + a..base + a + g].copy_from_slice(&self.candidates[c * g..(c + 1) * g]);
                next_metrics.push(cand.metric);
                next_prefixes.push(if block_first { cand.parent } else { prefixes[p] });
            }
            n = next_n;
            paths = next_paths;
            values = next_values;
            metrics = next_metrics;
            prefixes = next_prefixes;
            survivors_per_stage.push(n);
            if record {
                survivor_sets.push(paths.chunks(depth).map(<[u32]>::to_vec).collect());
            }
        }

        let best = (0..n)
            .min_by(|&x, &y| metrics[x].total_cmp(&metrics[y]).then(x.cmp(&y)))
            .expect("at least one survivor");
        let mut indices = vec![0usize; l];
        for (stage, &c) in paths[best * units..(best + 1) * units].iter().enumerate() {
            let unit = units - 1 - stage;
            let c = c as usize;
            indices[unit * g..(unit + 1) * g].copy_from_slice(&self.candidate_indices[c * g..(c + 1) * g]);
        }
        Ok(DecodeOutcome {
            indices,
            symbols: values[best * l..(best + 1) * l].to_vec(),
            metric: metrics[best],
            metric_evals,
            raw_evals,
            mceq_per_stage,
            survivors_per_stage,
            survivor_sets: record.then_some(survivor_sets),
        })
    }
}
