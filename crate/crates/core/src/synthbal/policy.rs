use std::fmt;
use std::str::FromStr;

use serde::Serialize;

/// One augmentation step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum AugmentOp {
    Noise { m: f64, p: f64 },
    ReplaceSketch,
    ReplaceExtrude,
    ReExtrude,
    ArcAugment,
    Rre,
}

impl AugmentOp {
    /// Whether the step needs a second program from the same bin.
    pub fn needs_partner(self) -> bool {
        matches!(self, AugmentOp::ReplaceSketch | AugmentOp::ReplaceExtrude | AugmentOp::Rre)
    }
}

impl fmt::Display for AugmentOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AugmentOp::Noise { m, p } => write!(f, "noise({m},{p})"),
            AugmentOp::ReplaceSketch => f.write_str("replace_sketch"),
            AugmentOp::ReplaceExtrude => f.write_str("replace_extrude"),
            AugmentOp::ReExtrude => f.write_str("re_extrude"),
            AugmentOp::ArcAugment => f.write_str("arc_augment"),
            AugmentOp::Rre => f.write_str("rre"),
        }
    }
}

pub const LARGE_NOISE: AugmentOp = AugmentOp::Noise { m: 0.07, p: 0.6 };
pub const SMALL_NOISE: AugmentOp = AugmentOp::Noise { m: 0.02, p: 0.8 };

/// Weighted operator chains. Weights are normalized on construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AugmentationPolicy {
    pub name: String,
    pub choices: Vec<(f64, Vec<AugmentOp>)>,
    /// Generation skips validity checks for this policy unless asked.
    pub skips_validation: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolicyKind {
    Default,
    NoiseOnly,
    Noiseless,
    NoPureNoise,
    ReducedNoise,
    ReplaceExtrude,
    ReExtrude,
    ArcAugment,
    NoisyRre,
    Rre,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 10] = [
        PolicyKind::Default,
        PolicyKind::NoiseOnly,
        PolicyKind::Noiseless,
        PolicyKind::NoPureNoise,
        PolicyKind::ReducedNoise,
        PolicyKind::ReplaceExtrude,
        PolicyKind::ReExtrude,
        PolicyKind::ArcAugment,
        PolicyKind::NoisyRre,
        PolicyKind::Rre,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Default => "default",
            PolicyKind::NoiseOnly => "noise-only",
            PolicyKind::Noiseless => "noiseless",
            PolicyKind::NoPureNoise => "no-pure-noise",
            PolicyKind::ReducedNoise => "reduced-noise",
            PolicyKind::ReplaceExtrude => "replace-extrude",
            PolicyKind::ReExtrude => "re-extrude",
            PolicyKind::ArcAugment => "arc-augment",
            PolicyKind::NoisyRre => "noisy-rre",
            PolicyKind::Rre => "rre",
        }
    }
}

impl FromStr for PolicyKind {
    type Err = String;
    fn from_str(s: &str) -> Result<PolicyKind, String> {
        PolicyKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown policy {s}"))
    }
}

impl AugmentationPolicy {
    /// # Panics
    /// If `choices` is empty or a weight is not positive and finite.
    pub fn new(name: impl Into<String>, choices: Vec<(f64, Vec<AugmentOp>)>) -> AugmentationPolicy {
        assert!(!choices.is_empty(), "policy needs at least one chain");
        assert!(choices.iter().all(|(w, _)| w.is_finite() && *w > 0.0), "weights must be positive");
        let total: f64 = choices.iter().map(|(w, _)| w).sum();
        let choices = choices.into_iter().map(|(w, c)| (w / total, c)).collect();
        AugmentationPolicy { name: name.into(), choices, skips_validation: false }
    }

    pub fn named(kind: PolicyKind) -> AugmentationPolicy {
        use AugmentOp::*;
        let noisy = |op: AugmentOp| vec![(0.4, vec![LARGE_NOISE]), (0.6, vec![SMALL_NOISE, op])];
        let choices = match kind {
            PolicyKind::Default => noisy(ReplaceSketch),
            PolicyKind::NoiseOnly => vec![(1.0, vec![SMALL_NOISE])],
            PolicyKind::Noiseless => vec![(1.0, vec![ReplaceSketch])],
            PolicyKind::NoPureNoise => vec![(1.0, vec![SMALL_NOISE, ReplaceSketch])],
            PolicyKind::ReducedNoise => vec![(0.4, vec![SMALL_NOISE]), (0.6, vec![SMALL_NOISE, ReplaceSketch])],
            PolicyKind::ReplaceExtrude => noisy(ReplaceExtrude),
            PolicyKind::ReExtrude => noisy(ReExtrude),
            PolicyKind::ArcAugment => noisy(ArcAugment),
            PolicyKind::NoisyRre => noisy(Rre),
            PolicyKind::Rre => vec![(1.0, vec![Rre])],
        };
        let mut p = AugmentationPolicy::new(kind.name(), choices);
        p.skips_validation = matches!(kind, PolicyKind::NoisyRre | PolicyKind::Rre);
        p
    }

    /// Chain selected by a uniform draw `u` in `[0, 1)`.
    pub fn pick(&self, u: f64) -> &[AugmentOp] {
        let mut acc = 0.0;
        for (w, chain) in &self.choices {
            acc += w;
            if u < acc {
                return chain;
            }
        }
        &self.choices.last().expect("non-empty").1
    }
}

/// `noise(0.02,0.8)+replace_sketch`.
pub fn chain_label(chain: &[AugmentOp]) -> String {
    chain.iter().map(|op| op.to_string()).collect::<Vec<_>>().join("+")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_policies_are_normalized() {
        for k in PolicyKind::ALL {
            let p = AugmentationPolicy::named(k);
            let total: f64 = p.choices.iter().map(|(w, _)| w).sum();
            assert!((total - 1.0).abs() < 1e-12, "{}", p.name);
            assert_eq!(k.name().parse::<PolicyKind>().unwrap(), k);
        }
    }

    #[test]
    fn default_split_is_forty_sixty() {
        let p = AugmentationPolicy::named(PolicyKind::Default);
        assert_eq!(p.pick(0.39), &[LARGE_NOISE]);
        assert_eq!(p.pick(0.41), &[SMALL_NOISE, AugmentOp::ReplaceSketch]);
        assert_eq!(chain_label(p.pick(0.9)), "noise(0.02,0.8)+replace_sketch");
    }

    #[test]
    fn weights_are_rescaled() {
        let p = AugmentationPolicy::new("x", vec![(2.0, vec![]), (6.0, vec![AugmentOp::ReExtrude])]);
        assert_eq!(p.choices[0].0, 0.25);
    }
}
