//! Program-level augmentation operators. All of them preserve the sequence
//! length and never touch the command column.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::cadlang::{CadProgram, Command, CommandKind, Group};

use super::SynthError;

fn groups(c: &CadProgram) -> Vec<Group> {
    c.groups().expect("augmentation input must be well formed")
}

/// Offsets each perturbable slot with probability `p` by a rounded draw from
/// `[-m*256, m*256]`, clipping to `[1, 255]`.
pub fn noise_augment(c: &CadProgram, m: f64, p: f64, rng: &mut ChaCha8Rng) -> CadProgram {
    let half = m * 256.0;
    let commands = c
        .commands
        .iter()
        .map(|cmd| {
            cmd.map_slots(cmd.kind().perturbable_slots(), |_, v| {
                if rng.random::<f64>() >= p {
                    return v;
                }
                let off = rng.random_range(-half..=half).round() as i32;
                (i32::from(v) + off).clamp(1, 255) as u8
            })
        })
        .collect();
    CadProgram { commands, source_id: c.source_id.clone() }
}

/// Picks a non-empty subset of `compatible` (each kept with probability 0.5,
/// one forced if none was kept).
fn choose_half(compatible: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut chosen: Vec<usize> = compatible.iter().copied().filter(|_| rng.random_bool(0.5)).collect();
    if chosen.is_empty() {
        chosen.push(compatible[rng.random_range(0..compatible.len())]);
    }
    chosen
}

/// Swaps index-aligned ranges of equal size from `c2` into `c1`.
fn swap_ranges<F>(c1: &CadProgram, c2: &CadProgram, rng: &mut ChaCha8Rng, range: F) -> Option<CadProgram>
where
    F: Fn(&Group) -> std::ops::Range<usize>,
{
    let (g1, g2) = (groups(c1), groups(c2));
    let compatible: Vec<usize> =
        (0..g1.len().min(g2.len())).filter(|&i| range(&g1[i]).len() == range(&g2[i]).len()).collect();
    if compatible.is_empty() {
        return None;
    }
    let mut out = c1.clone();
    for i in choose_half(&compatible, rng) {
        let (r1, r2) = (range(&g1[i]), range(&g2[i]));
        out.splice(r1, &c2.commands[r2]);
    }
    Some(out)
}

/// Replaces some of `c1`'s sketches with the equally sized sketch at the same
/// position in `c2`. Extrudes are kept.
pub fn replace_sketch(c1: &CadProgram, c2: &CadProgram, rng: &mut ChaCha8Rng) -> Result<CadProgram, SynthError> {
    swap_ranges(c1, c2, rng, |g| g.sketch.clone()).ok_or(SynthError::NoCompatibleSketch)
}

/// Replaces some of `c1`'s (sketch, Extrude) groups with the equally sized
/// group at the same position in `c2`.
pub fn replace_extrude(c1: &CadProgram, c2: &CadProgram, rng: &mut ChaCha8Rng) -> Result<CadProgram, SynthError> {
    swap_ranges(c1, c2, rng, Group::span).ok_or(SynthError::NoCompatibleGroup)
}

fn redraw(c: &CadProgram, kind: CommandKind, rng: &mut ChaCha8Rng) -> CadProgram {
    let commands = c
        .commands
        .iter()
        .map(|cmd| if cmd.kind() == kind { cmd.map_slots(kind.perturbable_slots(), |_, _| rng.random_range(1..=255)) } else { *cmd })
        .collect();
    CadProgram { commands, source_id: c.source_id.clone() }
}

/// Redraws the continuous parameters of every Extrude uniformly in `[1, 255]`.
pub fn re_extrude(c: &CadProgram, rng: &mut ChaCha8Rng) -> CadProgram {
    redraw(c, CommandKind::Extrude, rng)
}

/// Redraws the continuous parameters of every Arc uniformly in `[1, 255]`.
pub fn arc_augment(c: &CadProgram, rng: &mut ChaCha8Rng) -> CadProgram {
    redraw(c, CommandKind::Arc, rng)
}

/// Replace-extrude, re-extrude and arc-augment in series. The group swap is
/// skipped when `c2` has no compatible group.
pub fn rre(c1: &CadProgram, c2: &CadProgram, rng: &mut ChaCha8Rng) -> CadProgram {
    let swapped = replace_extrude(c1, c2, rng).unwrap_or_else(|_| c1.clone());
    arc_augment(&re_extrude(&swapped, rng), rng)
}

/// Whether `c` contains at least one Arc.
pub fn has_arc(c: &CadProgram) -> bool {
    c.commands.iter().any(|cmd| matches!(cmd, Command::Arc { .. }))
}
