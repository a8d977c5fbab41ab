use super::{CadError, CadProgram, Command, CommandKind, MAX_SEQUENCE_LENGTH, N_SLOTS, UNUSED};

pub const N_ROWS: usize = 60;
pub const N_COLS: usize = 17;

/// Fixed 60x17 encoding. Column 0 is the command index, columns 1..=16 the
/// parameter slots. Rows after the program body are EOS rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuantizedMatrix {
    cells: Box<[[i16; N_COLS]; N_ROWS]>,
}

impl std::fmt::Debug for QuantizedMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let content = self.content_rows();
        f.debug_struct("QuantizedMatrix").field("content_rows", &&self.cells[..content]).finish()
    }
}

fn eos_row() -> [i16; N_COLS] {
    let mut r = [UNUSED; N_COLS];
    r[0] = CommandKind::Eos.index();
    r
}

impl Default for QuantizedMatrix {
    /// The all-EOS matrix.
    fn default() -> Self {
        QuantizedMatrix { cells: Box::new([eos_row(); N_ROWS]) }
    }
}

impl QuantizedMatrix {
    /// Builds a matrix from raw cells without interpreting them.
    pub fn from_cells(cells: [[i16; N_COLS]; N_ROWS]) -> Self {
        QuantizedMatrix { cells: Box::new(cells) }
    }

    pub fn rows(&self) -> &[[i16; N_COLS]; N_ROWS] {
        &self.cells
    }

    pub fn row(&self, i: usize) -> &[i16; N_COLS] {
        &self.cells[i]
    }

    pub fn get(&self, row: usize, col: usize) -> i16 {
        self.cells[row][col]
    }

    pub fn set(&mut self, row: usize, col: usize, v: i16) {
        self.cells[row][col] = v;
    }

    /// Index of the first EOS row (or 60 when none).
    pub fn content_rows(&self) -> usize {
        self.cells
            .iter()
            .position(|r| r[0] == CommandKind::Eos.index())
            .unwrap_or(N_ROWS)
    }

    /// Every cell is either the sentinel or an 8-bit value.
    pub fn cells_in_range(&self) -> bool {
        self.cells.iter().flatten().all(|&v| v == UNUSED || (0..=255).contains(&v))
    }
}

/// Encodes a program: row i holds command i, the remaining rows are EOS.
pub fn to_matrix(p: &CadProgram) -> Result<QuantizedMatrix, CadError> {
    if p.len() > MAX_SEQUENCE_LENGTH {
        return Err(CadError::Overflow(p.len()));
    }
    let mut m = QuantizedMatrix::default();
    for (i, c) in p.commands.iter().enumerate() {
        let row = &mut m.cells[i];
        row[0] = c.kind().index();
        row[1..].copy_from_slice(&c.slots());
    }
    Ok(m)
}

/// Decodes a matrix. Trailing EOS rows collapse into the implicit
/// terminator; a non-EOS row after the first EOS is a decode error. The
/// result is not grammar-checked (an all-EOS matrix decodes to the empty,
/// not-well-formed program).
pub fn from_matrix(m: &QuantizedMatrix) -> Result<CadProgram, CadError> {
    let mut commands = Vec::new();
    let mut ended = false;
    for (row_idx, row) in m.cells.iter().enumerate() {
        let decode = |reason: String| CadError::Decode { row: row_idx, reason };
        let kind = CommandKind::from_index(row[0].into())
            .ok_or_else(|| decode(format!("unknown command index {}", row[0])))?;
        let mut slots = [0i16; N_SLOTS];
        slots.copy_from_slice(&row[1..]);
        let cmd = Command::from_slots(kind, &slots).map_err(decode)?;
        if ended {
            if kind != CommandKind::Eos {
                return Err(decode(format!("{kind:?} after EOS")));
            }
            continue;
        }
        if kind == CommandKind::Eos {
            ended = true;
        } else {
            commands.push(cmd);
        }
    }
    Ok(CadProgram::new(commands))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cadlang::parse_program;

    fn minimal() -> CadProgram {
        parse_program(
            br#"{"commands":[{"type":"SOL"},{"type":"Circle","x":128,"y":128,"r":64},
            {"type":"Extrude","theta":128,"phi":128,"gamma":128,"px":128,"py":128,"pz":128,
             "s":128,"e1":192,"e2":128,"bool":"new","extent":"one"},{"type":"EOS"}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn pads_with_eos() {
        let m = to_matrix(&minimal()).unwrap();
        assert_eq!(m.content_rows(), 3);
        for r in 3..N_ROWS {
            assert_eq!(m.row(r), &eos_row());
        }
        assert_eq!(m.row(1)[0], CommandKind::Circle.index());
        assert_eq!(&m.row(1)[1..6], &[128, 128, -1, -1, 64]);
        assert!(m.cells_in_range());
        assert_eq!(from_matrix(&m).unwrap(), CadProgram::new(minimal().commands));
    }

    #[test]
    fn overflow() {
        let mut cmds = minimal().commands;
        while cmds.len() < 60 {
            cmds.push(Command::Sol);
        }
        assert_eq!(to_matrix(&CadProgram::new(cmds)), Err(CadError::Overflow(60)));
    }

    #[test]
    fn all_eos_is_empty_program() {
        let p = from_matrix(&QuantizedMatrix::default()).unwrap();
        assert_eq!(p.len(), 0);
        assert!(!p.is_well_formed());
    }

    #[test]
    fn unknown_command_index() {
        let mut m = to_matrix(&minimal()).unwrap();
        m.set(0, 0, 9);
        assert!(matches!(from_matrix(&m), Err(CadError::Decode { row: 0, .. })));
    }

    #[test]
    fn missing_required_slot() {
        let mut m = to_matrix(&minimal()).unwrap();
        m.set(1, 5, UNUSED);
        assert!(matches!(from_matrix(&m), Err(CadError::Decode { row: 1, .. })));
    }

    #[test]
    fn content_after_eos() {
        let mut m = to_matrix(&minimal()).unwrap();
        m.set(10, 0, CommandKind::Sol.index());
        assert!(from_matrix(&m).is_err());
    }

    #[test]
    fn hand_built_line_arc_sketch() {
        // SOL, Line(200,128), Arc(128,128, sweep 128 = pi, ccw), Extrude
        let mut cells = [eos_row(); N_ROWS];
        let mut row = |i: usize, kind: CommandKind, vals: &[(usize, i16)]| {
            cells[i] = [UNUSED; N_COLS];
            cells[i][0] = kind.index();
            for &(slot, v) in vals {
                cells[i][1 + slot] = v;
            }
        };
        row(0, CommandKind::Sol, &[]);
        row(1, CommandKind::Line, &[(0, 200), (1, 128)]);
        row(2, CommandKind::Arc, &[(0, 128), (1, 128), (2, 128), (3, 1)]);
        row(
            3,
            CommandKind::Extrude,
            &[(5, 128), (6, 128), (7, 128), (8, 128), (9, 128), (10, 128), (11, 128), (12, 160), (13, 128), (14, 0), (15, 0)],
        );
        let m = QuantizedMatrix::from_cells(cells);
        let p = from_matrix(&m).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.commands[1], Command::Line { x: 200, y: 128 });
        assert_eq!(p.commands[2], Command::Arc { x: 128, y: 128, sweep: 128, ccw: true });
        assert!(p.is_well_formed());
        assert_eq!(to_matrix(&p).unwrap(), m);
    }
}
