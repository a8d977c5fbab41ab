use super::CadError;

/// Parameter slots per matrix row (columns 1..=16).
pub const N_SLOTS: usize = 16;
/// Sentinel for a slot the command variant does not use.
pub const UNUSED: i16 = -1;

pub const SLOT_X: usize = 0;
pub const SLOT_Y: usize = 1;
pub const SLOT_ARC_SWEEP: usize = 2;
pub const SLOT_CCW: usize = 3;
pub const SLOT_R: usize = 4;
pub const SLOT_THETA: usize = 5;
pub const SLOT_PHI: usize = 6;
pub const SLOT_GAMMA: usize = 7;
pub const SLOT_PX: usize = 8;
pub const SLOT_PY: usize = 9;
pub const SLOT_PZ: usize = 10;
pub const SLOT_SCALE: usize = 11;
pub const SLOT_E1: usize = 12;
pub const SLOT_E2: usize = 13;
pub const SLOT_BOOL: usize = 14;
pub const SLOT_EXTENT: usize = 15;

/// Command type index stored in column 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CommandKind {
    Line = 0,
    Arc = 1,
    Circle = 2,
    Eos = 3,
    Sol = 4,
    Extrude = 5,
}

impl CommandKind {
    pub const ALL: [CommandKind; 6] = [
        CommandKind::Line,
        CommandKind::Arc,
        CommandKind::Circle,
        CommandKind::Eos,
        CommandKind::Sol,
        CommandKind::Extrude,
    ];

    pub fn from_index(i: i64) -> Option<Self> {
        Self::ALL.get(usize::try_from(i).ok()?).copied()
    }

    pub fn index(self) -> i16 {
        self as i16
    }

    /// Slots this variant uses; every other slot holds [`UNUSED`].
    pub fn used_slots(self) -> &'static [usize] {
        match self {
            CommandKind::Line => &[SLOT_X, SLOT_Y],
            CommandKind::Arc => &[SLOT_X, SLOT_Y, SLOT_ARC_SWEEP, SLOT_CCW],
            CommandKind::Circle => &[SLOT_X, SLOT_Y, SLOT_R],
            CommandKind::Eos | CommandKind::Sol => &[],
            CommandKind::Extrude => &[
                SLOT_THETA, SLOT_PHI, SLOT_GAMMA, SLOT_PX, SLOT_PY, SLOT_PZ, SLOT_SCALE, SLOT_E1,
                SLOT_E2, SLOT_BOOL, SLOT_EXTENT,
            ],
        }
    }

    /// Continuous slots a noise perturbation may touch. Orientation angles,
    /// the arc direction flag, boolean op and extent type are discrete or
    /// near-discrete and never appear here.
    pub fn perturbable_slots(self) -> &'static [usize] {
        match self {
            CommandKind::Line => &[SLOT_X, SLOT_Y],
            CommandKind::Arc => &[SLOT_X, SLOT_Y, SLOT_ARC_SWEEP],
            CommandKind::Circle => &[SLOT_X, SLOT_Y, SLOT_R],
            CommandKind::Extrude => &[SLOT_PX, SLOT_PY, SLOT_PZ, SLOT_SCALE, SLOT_E1, SLOT_E2],
            CommandKind::Eos | CommandKind::Sol => &[],
        }
    }

    pub fn is_curve(self) -> bool {
        matches!(self, CommandKind::Line | CommandKind::Arc | CommandKind::Circle)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoolOp {
    NewBody = 0,
    Join = 1,
    Cut = 2,
    Intersect = 3,
}

impl BoolOp {
    pub fn from_index(v: i64) -> Option<Self> {
        Some(match v {
            0 => BoolOp::NewBody,
            1 => BoolOp::Join,
            2 => BoolOp::Cut,
            3 => BoolOp::Intersect,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            BoolOp::NewBody => "new",
            BoolOp::Join => "join",
            BoolOp::Cut => "cut",
            BoolOp::Intersect => "intersect",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "new" => BoolOp::NewBody,
            "join" => BoolOp::Join,
            "cut" => BoolOp::Cut,
            "intersect" => BoolOp::Intersect,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Extent {
    OneSided = 0,
    Symmetric = 1,
    TwoSided = 2,
}

impl Extent {
    pub fn from_index(v: i64) -> Option<Self> {
        Some(match v {
            0 => Extent::OneSided,
            1 => Extent::Symmetric,
            2 => Extent::TwoSided,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Extent::OneSided => "one",
            Extent::Symmetric => "sym",
            Extent::TwoSided => "two",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Some(match s {
            "one" => Extent::OneSided,
            "sym" => Extent::Symmetric,
            "two" => Extent::TwoSided,
            _ => return None,
        })
    }
}

/// Quantized extrude parameters. Angles, plane origin, scale and distances
/// are all 8-bit grid values; see [`super::quant`] for their real meaning.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ExtrudeParams {
    pub theta: u8,
    pub phi: u8,
    pub gamma: u8,
    pub px: u8,
    pub py: u8,
    pub pz: u8,
    pub scale: u8,
    pub e1: u8,
    pub e2: u8,
    pub op: BoolOp,
    pub extent: Extent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Command {
    Sol,
    Line { x: u8, y: u8 },
    Arc { x: u8, y: u8, sweep: u8, ccw: bool },
    Circle { x: u8, y: u8, r: u8 },
    Extrude(ExtrudeParams),
    Eos,
}

impl Command {
    pub fn kind(&self) -> CommandKind {
        match self {
            Command::Sol => CommandKind::Sol,
            Command::Line { .. } => CommandKind::Line,
            Command::Arc { .. } => CommandKind::Arc,
            Command::Circle { .. } => CommandKind::Circle,
            Command::Extrude(_) => CommandKind::Extrude,
            Command::Eos => CommandKind::Eos,
        }
    }

    /// The 16 parameter slots of this command's matrix row.
    pub fn slots(&self) -> [i16; N_SLOTS] {
        let mut s = [UNUSED; N_SLOTS];
        match *self {
            Command::Sol | Command::Eos => {}
            Command::Line { x, y } => {
                s[SLOT_X] = x.into();
                s[SLOT_Y] = y.into();
            }
            Command::Arc { x, y, sweep, ccw } => {
                s[SLOT_X] = x.into();
                s[SLOT_Y] = y.into();
                s[SLOT_ARC_SWEEP] = sweep.into();
                s[SLOT_CCW] = ccw as i16;
            }
            Command::Circle { x, y, r } => {
                s[SLOT_X] = x.into();
                s[SLOT_Y] = y.into();
                s[SLOT_R] = r.into();
            }
            Command::Extrude(e) => {
                s[SLOT_THETA] = e.theta.into();
                s[SLOT_PHI] = e.phi.into();
                s[SLOT_GAMMA] = e.gamma.into();
                s[SLOT_PX] = e.px.into();
                s[SLOT_PY] = e.py.into();
                s[SLOT_PZ] = e.pz.into();
                s[SLOT_SCALE] = e.scale.into();
                s[SLOT_E1] = e.e1.into();
                s[SLOT_E2] = e.e2.into();
                s[SLOT_BOOL] = e.op as i16;
                s[SLOT_EXTENT] = e.extent as i16;
            }
        }
        s
    }

    /// Rebuilds a command from its kind and slot row. Unused slots must be
    /// [`UNUSED`], used slots must be in range for their meaning.
    pub fn from_slots(kind: CommandKind, s: &[i16; N_SLOTS]) -> Result<Command, String> {
        let used = kind.used_slots();
        for (i, &v) in s.iter().enumerate() {
            if used.contains(&i) {
                if !(0..=255).contains(&v) {
                    return Err(format!("slot {i} of {kind:?} holds {v}, expected 0..=255"));
                }
            } else if v != UNUSED {
                return Err(format!("slot {i} is unused by {kind:?} but holds {v}"));
            }
        }
        let q = |i: usize| s[i] as u8;
        Ok(match kind {
            CommandKind::Sol => Command::Sol,
            CommandKind::Eos => Command::Eos,
            CommandKind::Line => Command::Line { x: q(SLOT_X), y: q(SLOT_Y) },
            CommandKind::Arc => Command::Arc {
                x: q(SLOT_X),
                y: q(SLOT_Y),
                sweep: q(SLOT_ARC_SWEEP),
                ccw: match s[SLOT_CCW] {
                    0 => false,
                    1 => true,
                    v => return Err(format!("arc direction flag must be 0 or 1, got {v}")),
                },
            },
            CommandKind::Circle => Command::Circle { x: q(SLOT_X), y: q(SLOT_Y), r: q(SLOT_R) },
            CommandKind::Extrude => Command::Extrude(ExtrudeParams {
                theta: q(SLOT_THETA),
                phi: q(SLOT_PHI),
                gamma: q(SLOT_GAMMA),
                px: q(SLOT_PX),
                py: q(SLOT_PY),
                pz: q(SLOT_PZ),
                scale: q(SLOT_SCALE),
                e1: q(SLOT_E1),
                e2: q(SLOT_E2),
                op: BoolOp::from_index(s[SLOT_BOOL].into())
                    .ok_or_else(|| format!("unknown boolean op {}", s[SLOT_BOOL]))?,
                extent: Extent::from_index(s[SLOT_EXTENT].into())
                    .ok_or_else(|| format!("unknown extent type {}", s[SLOT_EXTENT]))?,
            }),
        })
    }

    /// Applies `f` to each perturbable slot value and rebuilds the command.
    pub(crate) fn map_slots(&self, slots: &[usize], mut f: impl FnMut(usize, u8) -> u8) -> Command {
        let mut s = self.slots();
        for &i in slots {
            if s[i] != UNUSED {
                s[i] = f(i, s[i] as u8).into();
            }
        }
        Command::from_slots(self.kind(), &s).expect("slot rewrite keeps values in range")
    }
}

pub(crate) fn range_check(field: &str, v: i64) -> Result<u8, CadError> {
    u8::try_from(v).map_err(|_| CadError::Range { field: field.to_string(), value: v })
}
