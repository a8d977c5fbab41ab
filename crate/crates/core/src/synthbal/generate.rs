use std::collections::{BTreeMap, HashMap};

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cadlang::CadProgram;
use crate::geom::quick_valid;
use crate::par::{self, Exec};

use super::augment::{arc_augment, noise_augment, re_extrude, replace_extrude, replace_sketch, rre};
use super::manifest::{Dataset, DatasetManifest, ManifestEntry, Provenance, Split};
use super::policy::{chain_label, AugmentOp, AugmentationPolicy};
use super::SynthError;

/// Invalid or incompatible draws allowed per synthetic slot.
pub const RETRY_BUDGET: usize = 10_000;
/// Partner redraws allowed for a single replace step.
pub const PARTNER_DRAWS: usize = 32;

const REAL_STREAM: u64 = u64::MAX;

#[derive(Clone, Debug)]
pub struct SynthBalConfig {
    pub real_ratio: f64,
    pub target: usize,
    pub policy: AugmentationPolicy,
    pub validate: bool,
    pub seed: u64,
    pub retry_budget: usize,
}

impl SynthBalConfig {
    /// Validation follows the policy default.
    pub fn new(real_ratio: f64, target: usize, policy: AugmentationPolicy, seed: u64) -> SynthBalConfig {
        let validate = !policy.skips_validation;
        SynthBalConfig { real_ratio, target, policy, validate, seed, retry_budget: RETRY_BUDGET }
    }
}

/// Outcome for one `(split, len)` bin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BinReport {
    pub split: Split,
    pub len: usize,
    pub quota: usize,
    pub available: usize,
    pub real: usize,
    pub synthetic: usize,
    /// Slots left empty after the retry budget ran out.
    pub unfilled: usize,
    pub attempts: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GenerationReport {
    pub split_targets: BTreeMap<Split, usize>,
    pub bins: Vec<BinReport>,
}

impl GenerationReport {
    /// Bins whose quota could not be met.
    pub fn unmeetable(&self) -> impl Iterator<Item = &BinReport> {
        self.bins.iter().filter(|b| b.unfilled > 0)
    }

    pub fn total(&self) -> usize {
        self.bins.iter().map(|b| b.real + b.synthetic).sum()
    }
}

/// Splits `total` over `weights` proportionally, handing leftover units to
/// the largest fractional parts (earlier index on ties).
pub fn largest_remainder(total: usize, weights: &[usize]) -> Vec<usize> {
    let sum: usize = weights.iter().sum();
    if sum == 0 {
        return vec![0; weights.len()];
    }
    let mut out: Vec<usize> = weights.iter().map(|&w| (total as u128 * w as u128 / sum as u128) as usize).collect();
    let mut order: Vec<(u128, usize)> =
        weights.iter().enumerate().map(|(i, &w)| (total as u128 * w as u128 % sum as u128, i)).collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let left = total - out.iter().sum::<usize>();
    for &(_, i) in order.iter().take(left) {
        out[i] += 1;
    }
    out
}

/// Equal per-length quotas summing to `total`; the remainder goes to the
/// smallest lengths. `lengths` must be ascending.
pub fn length_quotas(total: usize, lengths: &[usize]) -> Vec<(usize, usize)> {
    if lengths.is_empty() {
        return Vec::new();
    }
    let (q, rem) = (total / lengths.len(), total % lengths.len());
    lengths.iter().enumerate().map(|(i, &l)| (l, q + usize::from(i < rem))).collect()
}

struct Slot {
    split: Split,
    len: usize,
    index: usize,
}

struct SlotOutcome {
    program: Option<(CadProgram, String)>,
    attempts: usize,
}

fn draw_partner<'a>(bin: &[&'a CadProgram], own: usize, rng: &mut ChaCha8Rng) -> &'a CadProgram {
    if bin.len() < 2 {
        return bin[own];
    }
    let j = rng.random_range(0..bin.len() - 1);
    bin[if j >= own { j + 1 } else { j }]
}

fn id_of(p: &CadProgram) -> &str {
    p.source_id.as_deref().unwrap_or("?")
}

/// Applies `chain` to `bin[own]`. Returns `None` when a replace step finds
/// no compatible partner.
fn apply_chain(
    bin: &[&CadProgram],
    own: usize,
    chain: &[AugmentOp],
    rng: &mut ChaCha8Rng,
) -> Option<(CadProgram, Vec<String>)> {
    let mut cur = bin[own].clone();
    let mut refs = Vec::new();
    for &op in chain {
        cur = match op {
            AugmentOp::Noise { m, p } => noise_augment(&cur, m, p, rng),
            AugmentOp::ReExtrude => re_extrude(&cur, rng),
            AugmentOp::ArcAugment => arc_augment(&cur, rng),
            _ => {
                let mut done = None;
                for _ in 0..PARTNER_DRAWS {
                    let c2 = draw_partner(bin, own, rng);
                    let r = match op {
                        AugmentOp::ReplaceSketch => replace_sketch(&cur, c2, rng).ok(),
                        AugmentOp::ReplaceExtrude => replace_extrude(&cur, c2, rng).ok(),
                        _ => Some(rre(&cur, c2, rng)),
                    };
                    if let Some(out) = r {
                        refs.push(id_of(c2).to_owned());
                        done = Some(out);
                        break;
                    }
                }
                done?
            }
        };
    }
    Some((cur, refs))
}

fn fill_slot(bin: &[&CadProgram], slot: &Slot, cfg: &SynthBalConfig) -> SlotOutcome {
    let mut rng = par::rng_from(cfg.seed, &[slot.split.index(), slot.len as u64, slot.index as u64]);
    for attempt in 1..=cfg.retry_budget {
        let own = rng.random_range(0..bin.len());
        let chain = cfg.policy.pick(rng.random());
        let Some((program, refs)) = apply_chain(bin, own, chain, &mut rng) else { continue };
        debug_assert_eq!(program.len(), slot.len);
        if cfg.validate && !quick_valid(&program) {
            continue;
        }
        let mut trace = format!("chain={};src={}", chain_label(chain), id_of(bin[own]));
        if !refs.is_empty() {
            trace.push_str(";ref=");
            trace.push_str(&refs.join(","));
        }
        return SlotOutcome { program: Some((program, trace)), attempts: attempt };
    }
    SlotOutcome { program: None, attempts: cfg.retry_budget }
}

/// Source ids named in a synthetic entry's trace.
pub fn trace_sources(trace: &str) -> Vec<&str> {
    trace
        .split(';')
        .filter_map(|kv| kv.strip_prefix("src=").or_else(|| kv.strip_prefix("ref=")))
        .flat_map(|v| v.split(','))
        .collect()
}

/// Checks that every synthetic entry of `out` was built only from programs of
/// its own split in `source`.
pub fn check_no_leakage(out: &DatasetManifest, source: &DatasetManifest) -> Result<(), SynthError> {
    let split_of: HashMap<&str, Split> = source.entries().iter().map(|e| (e.id.as_str(), e.split)).collect();
    for e in out.entries().iter().filter(|e| e.prov == Provenance::Synthetic) {
        let trace = e.trace.as_deref().unwrap_or("");
        let sources = trace_sources(trace);
        if sources.is_empty() {
            return Err(SynthError::Leakage(format!("{} has no source in its trace", e.id)));
        }
        for s in sources {
            if split_of.get(s) != Some(&e.split) {
                return Err(SynthError::Leakage(format!("{} ({}) draws on {s}", e.id, e.split)));
            }
        }
    }
    Ok(())
}

/// Builds a dataset with equal counts per sequence length in every split: a
/// capped share of real programs plus validated synthetic ones.
pub fn generate_synthbal(
    data: &Dataset,
    cfg: &SynthBalConfig,
    exec: Exec,
) -> Result<(Dataset, GenerationReport), SynthError> {
    if !(0.0..=1.0).contains(&cfg.real_ratio) {
        return Err(SynthError::BadRatio(cfg.real_ratio));
    }
    let manifest = &data.manifest;
    let all_lengths: std::collections::BTreeSet<usize> = manifest.index().keys().map(|&(_, l)| l).collect();
    if all_lengths.is_empty() {
        return Err(SynthError::EmptyDataset);
    }
    if cfg.target < all_lengths.len() {
        return Err(SynthError::TargetTooSmall { target: cfg.target, lengths: all_lengths.len() });
    }
    let sizes: Vec<usize> = Split::ALL.iter().map(|&s| manifest.split_size(s)).collect();
    let targets = largest_remainder(cfg.target, &sizes);

    let mut bins: BTreeMap<(Split, usize), Vec<&CadProgram>> = BTreeMap::new();
    for (&key, idx) in manifest.index() {
        let progs = idx
            .iter()
            .map(|&i| {
                let id = &manifest.entries()[i].id;
                data.programs.get(id).ok_or_else(|| SynthError::MissingProgram(id.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        bins.insert(key, progs);
    }

    let mut report = GenerationReport::default();
    let mut real_picks: Vec<Vec<usize>> = Vec::new();
    let mut slots = Vec::new();
    for (k, &split) in Split::ALL.iter().enumerate() {
        report.split_targets.insert(split, targets[k]);
        for (len, quota) in length_quotas(targets[k], &manifest.lengths(split)) {
            let available = bins[&(split, len)].len();
            let real = ((cfg.real_ratio * quota as f64).floor() as usize).min(available);
            let mut rng = par::rng_from(cfg.seed, &[split.index(), len as u64, REAL_STREAM]);
            let mut pick = sample(&mut rng, available, real).into_vec();
            pick.sort_unstable();
            real_picks.push(pick);
            slots.extend((0..quota - real).map(|index| Slot { split, len, index }));
            report.bins.push(BinReport { split, len, quota, available, real, synthetic: 0, unfilled: 0, attempts: 0 });
        }
    }

    let outcomes = par::map_slice(exec, &slots, |s| fill_slot(&bins[&(s.split, s.len)], s, cfg));

    let mut entries = Vec::with_capacity(cfg.target);
    let mut programs = HashMap::with_capacity(cfg.target);
    let mut next = 0;
    for (b, pick) in report.bins.iter_mut().zip(&real_picks) {
        let bin = &bins[&(b.split, b.len)];
        for &i in pick {
            let id = id_of(bin[i]).to_owned();
            entries.push(ManifestEntry { id: id.clone(), len: b.len, split: b.split, prov: Provenance::Real, trace: None });
            programs.insert(id, bin[i].clone());
        }
        for _ in 0..b.quota - b.real {
            let (slot, out) = (&slots[next], &outcomes[next]);
            next += 1;
            b.attempts += out.attempts;
            let Some((program, trace)) = &out.program else {
                b.unfilled += 1;
                continue;
            };
            b.synthetic += 1;
            let id = format!("syn-{}-{}-{}", slot.split, slot.len, slot.index);
            entries.push(ManifestEntry {
                id: id.clone(),
                len: program.len(),
                split: slot.split,
                prov: Provenance::Synthetic,
                trace: Some(trace.clone()),
            });
            programs.insert(id.clone(), program.clone().with_id(id));
        }
    }
    Ok((Dataset { manifest: DatasetManifest::new(entries)?, programs }, report))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Shortfall {
    pub len: usize,
    pub available: usize,
    pub missing: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionReport {
    pub quota: usize,
    pub lengths: usize,
    pub shortfalls: Vec<Shortfall>,
}

/// Down-samples every over-represented length to a common quota, using only
/// real entries. Entries keep their split.
pub fn reduction_balance(
    manifest: &DatasetManifest,
    target: usize,
    seed: u64,
) -> Result<(DatasetManifest, ReductionReport), SynthError> {
    let mut by_len: BTreeMap<usize, Vec<&ManifestEntry>> = BTreeMap::new();
    for e in manifest.entries().iter().filter(|e| e.prov == Provenance::Real) {
        by_len.entry(e.len).or_default().push(e);
    }
    let total: usize = by_len.values().map(Vec::len).sum();
    if by_len.is_empty() {
        return Err(SynthError::EmptyDataset);
    }
    if target > total {
        return Err(SynthError::TargetTooLarge { target, available: total });
    }
    let quota = target / by_len.len();
    let mut kept = Vec::with_capacity(target);
    let mut shortfalls = Vec::new();
    for (&len, items) in &by_len {
        if items.len() < quota {
            shortfalls.push(Shortfall { len, available: items.len(), missing: quota - items.len() });
            kept.extend(items.iter().map(|&e| e.clone()));
            continue;
        }
        let mut rng = par::rng_from(seed, &[len as u64]);
        let mut pick = sample(&mut rng, items.len(), quota).into_vec();
        pick.sort_unstable();
        kept.extend(pick.into_iter().map(|i| items[i].clone()));
    }
    let report = ReductionReport { quota, lengths: by_len.len(), shortfalls };
    Ok((DatasetManifest::new(kept)?, report))
}
