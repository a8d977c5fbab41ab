use std::ops::Range;

use super::{CadError, Command, CommandKind};

/// Largest sequence length that fits the 60-row matrix with its EOS row.
pub const MAX_SEQUENCE_LENGTH: usize = 59;

/// A decoded CAD program. `commands` holds everything before the
/// terminating EOS; the terminator itself is implicit.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct CadProgram {
    pub commands: Vec<Command>,
    pub source_id: Option<String>,
}

/// One loop: a SOL marker followed by its curve commands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoopSpan {
    pub sol: usize,
    pub curves: Range<usize>,
}

/// One (sketch, Extrude) group. `sketch` covers the SOL and curve commands,
/// `extrude` is the index of the closing Extrude.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    pub sketch: Range<usize>,
    pub extrude: usize,
    pub loops: Vec<LoopSpan>,
}

impl Group {
    pub fn span(&self) -> Range<usize> {
        self.sketch.start..self.extrude + 1
    }
}

impl CadProgram {
    pub fn new(commands: Vec<Command>) -> Self {
        CadProgram { commands, source_id: None }
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.source_id = Some(id.into());
        self
    }

    /// Sequence length (SOL rows included, EOS excluded).
    pub fn len(&self) -> usize {
        self.commands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commands.is_empty()
    }

    /// Splits the program into (sketch, Extrude) groups, checking the
    /// grammar on the way: one or more groups, each sketch one or more
    /// loops, each loop SOL followed by at least one curve.
    pub fn groups(&self) -> Result<Vec<Group>, CadError> {
        let grammar = |index: usize, reason: &str| CadError::Grammar { index, reason: reason.into() };
        if self.commands.is_empty() {
            return Err(grammar(0, "empty program"));
        }
        let mut groups = Vec::new();
        let mut loops: Vec<LoopSpan> = Vec::new();
        let mut sketch_start = 0;
        for (i, c) in self.commands.iter().enumerate() {
            match c.kind() {
                CommandKind::Sol => {
                    if let Some(l) = loops.last() {
                        if l.curves.is_empty() {
                            return Err(grammar(i, "loop has no curves"));
                        }
                    }
                    loops.push(LoopSpan { sol: i, curves: i + 1..i + 1 });
                }
                k if k.is_curve() => match loops.last_mut() {
                    Some(l) if l.curves.end == i => l.curves.end = i + 1,
                    _ => return Err(grammar(i, "curve command outside a loop (missing SOL)")),
                },
                CommandKind::Extrude => {
                    match loops.last() {
                        None => return Err(grammar(i, "extrude without a sketch")),
                        Some(l) if l.curves.is_empty() => {
                            return Err(grammar(i, "loop has no curves"))
                        }
                        _ => {}
                    }
                    groups.push(Group {
                        sketch: sketch_start..i,
                        extrude: i,
                        loops: std::mem::take(&mut loops),
                    });
                    sketch_start = i + 1;
                }
                CommandKind::Eos => return Err(grammar(i, "EOS inside the command body")),
                _ => unreachable!(),
            }
        }
        if !loops.is_empty() {
            return Err(grammar(self.commands.len() - 1, "sketch is not followed by an extrude"));
        }
        Ok(groups)
    }

    pub fn check_grammar(&self) -> Result<(), CadError> {
        self.groups().map(|_| ())
    }

    pub fn is_well_formed(&self) -> bool {
        self.check_grammar().is_ok()
    }

    /// Replaces the commands in `range` with `with`.
    pub(crate) fn splice(&mut self, range: Range<usize>, with: &[Command]) {
        self.commands.splice(range, with.iter().copied());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cadlang::{BoolOp, Extent, ExtrudeParams};

    fn ext() -> Command {
        Command::Extrude(ExtrudeParams {
            theta: 128,
            phi: 128,
            gamma: 128,
            px: 128,
            py: 128,
            pz: 128,
            scale: 128,
            e1: 192,
            e2: 128,
            op: BoolOp::NewBody,
            extent: Extent::OneSided,
        })
    }

    #[test]
    fn groups_of_two_sketch_program() {
        let c = Command::Circle { x: 128, y: 128, r: 10 };
        let l = Command::Line { x: 1, y: 1 };
        let p = CadProgram::new(vec![
            Command::Sol, l, l, l, Command::Sol, c, ext(), Command::Sol, c, ext(),
        ]);
        let g = p.groups().unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[0].loops.len(), 2);
        assert_eq!(g[0].loops[0].curves, 1..4);
        assert_eq!(g[0].span(), 0..7);
        assert_eq!(g[1].sketch, 7..9);
    }

    #[test]
    fn grammar_violations() {
        let l = Command::Line { x: 1, y: 1 };
        let bad = [
            vec![l, ext()],
            vec![Command::Sol, ext()],
            vec![Command::Sol, l],
            vec![ext()],
            vec![Command::Sol, Command::Sol, l, ext()],
            vec![],
        ];
        for b in bad {
            assert!(!CadProgram::new(b.clone()).is_well_formed(), "{b:?}");
        }
    }
}
