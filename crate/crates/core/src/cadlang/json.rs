//! Program JSON schema:
//!
//! ```json
//! {"commands":[{"type":"SOL"},{"type":"Line","x":0,"y":0},
//!   {"type":"Arc","x":0,"y":0,"sweep":64,"ccw":1},
//!   {"type":"Circle","x":128,"y":128,"r":64},
//!   {"type":"Extrude","theta":128,"phi":128,"gamma":128,"px":128,"py":128,"pz":128,
//!    "s":128,"e1":192,"e2":128,"bool":"new","extent":"one"},
//!   {"type":"EOS"}]}
//! ```
//!
//! Numeric fields are quantized integers. The trailing EOS is optional on
//! input and always written on output.

use serde_json::{Map, Value};

use super::command::range_check;
use super::{BoolOp, CadError, CadProgram, Command, Extent, ExtrudeParams};

fn syntax(msg: impl Into<String>) -> CadError {
    CadError::Syntax(msg.into())
}

fn int_field(obj: &Map<String, Value>, idx: usize, name: &str) -> Result<i64, CadError> {
    obj.get(name)
        .ok_or_else(|| syntax(format!("command {idx}: missing field `{name}`")))?
        .as_i64()
        .ok_or_else(|| syntax(format!("command {idx}: field `{name}` is not an integer")))
}

fn q_field(obj: &Map<String, Value>, idx: usize, name: &str) -> Result<u8, CadError> {
    range_check(name, int_field(obj, idx, name)?)
}

fn str_field<'a>(obj: &'a Map<String, Value>, idx: usize, name: &str) -> Result<&'a str, CadError> {
    obj.get(name)
        .ok_or_else(|| syntax(format!("command {idx}: missing field `{name}`")))?
        .as_str()
        .ok_or_else(|| syntax(format!("command {idx}: field `{name}` is not a string")))
}

fn parse_command(idx: usize, v: &Value) -> Result<Command, CadError> {
    let obj = v.as_object().ok_or_else(|| syntax(format!("command {idx} is not an object")))?;
    let ty = str_field(obj, idx, "type")?;
    Ok(match ty {
        "SOL" => Command::Sol,
        "EOS" => Command::Eos,
        "Line" => Command::Line { x: q_field(obj, idx, "x")?, y: q_field(obj, idx, "y")? },
        "Arc" => Command::Arc {
            x: q_field(obj, idx, "x")?,
            y: q_field(obj, idx, "y")?,
            sweep: q_field(obj, idx, "sweep")?,
            ccw: match int_field(obj, idx, "ccw")? {
                0 => false,
                1 => true,
                v => return Err(CadError::Range { field: "ccw".into(), value: v }),
            },
        },
        "Circle" => Command::Circle {
            x: q_field(obj, idx, "x")?,
            y: q_field(obj, idx, "y")?,
            r: q_field(obj, idx, "r")?,
        },
        "Extrude" => {
            let op = str_field(obj, idx, "bool")?;
            let extent = str_field(obj, idx, "extent")?;
            Command::Extrude(ExtrudeParams {
                theta: q_field(obj, idx, "theta")?,
                phi: q_field(obj, idx, "phi")?,
                gamma: q_field(obj, idx, "gamma")?,
                px: q_field(obj, idx, "px")?,
                py: q_field(obj, idx, "py")?,
                pz: q_field(obj, idx, "pz")?,
                scale: q_field(obj, idx, "s")?,
                e1: q_field(obj, idx, "e1")?,
                e2: q_field(obj, idx, "e2")?,
                op: BoolOp::from_name(op)
                    .ok_or_else(|| syntax(format!("command {idx}: unknown bool `{op}`")))?,
                extent: Extent::from_name(extent)
                    .ok_or_else(|| syntax(format!("command {idx}: unknown extent `{extent}`")))?,
            })
        }
        other => return Err(syntax(format!("command {idx}: unknown type `{other}`"))),
    })
}

/// Parses and grammar-checks a program file.
pub fn parse_program(bytes: &[u8]) -> Result<CadProgram, CadError> {
    let text = std::str::from_utf8(bytes).map_err(|e| syntax(format!("invalid UTF-8: {e}")))?;
    let doc: Value = serde_json::from_str(text).map_err(|e| syntax(e.to_string()))?;
    let list = doc
        .get("commands")
        .and_then(Value::as_array)
        .ok_or_else(|| syntax("missing `commands` array"))?;
    let mut commands = Vec::with_capacity(list.len());
    let mut eos_at = None;
    for (i, v) in list.iter().enumerate() {
        let c = parse_command(i, v)?;
        match (c, eos_at) {
            (Command::Eos, None) => eos_at = Some(i),
            (Command::Eos, Some(_)) => {}
            (_, Some(_)) => {
                return Err(CadError::Grammar { index: i, reason: "command after EOS".into() })
            }
            (c, None) => commands.push(c),
        }
    }
    let p = CadProgram::new(commands);
    p.check_grammar()?;
    Ok(p)
}

/// Canonical compact JSON for a program, EOS terminator included.
pub fn program_to_json(p: &CadProgram) -> String {
    let mut parts: Vec<String> = p
        .commands
        .iter()
        .map(|c| match *c {
            Command::Sol => r#"{"type":"SOL"}"#.to_string(),
            Command::Eos => r#"{"type":"EOS"}"#.to_string(),
            Command::Line { x, y } => format!(r#"{{"type":"Line","x":{x},"y":{y}}}"#),
            Command::Arc { x, y, sweep, ccw } => format!(
                r#"{{"type":"Arc","x":{x},"y":{y},"sweep":{sweep},"ccw":{}}}"#,
                ccw as u8
            ),
            Command::Circle { x, y, r } => {
                format!(r#"{{"type":"Circle","x":{x},"y":{y},"r":{r}}}"#)
            }
            Command::Extrude(e) => format!(
                r#"{{"type":"Extrude","theta":{},"phi":{},"gamma":{},"px":{},"py":{},"pz":{},"s":{},"e1":{},"e2":{},"bool":"{}","extent":"{}"}}"#,
                e.theta,
                e.phi,
                e.gamma,
                e.px,
                e.py,
                e.pz,
                e.scale,
                e.e1,
                e.e2,
                e.op.name(),
                e.extent.name()
            ),
        })
        .collect();
    parts.push(r#"{"type":"EOS"}"#.to_string());
    format!(r#"{{"commands":[{}]}}"#, parts.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cadlang::sequence_length;

    const EXT: &str = r#"{"type":"Extrude","theta":128,"phi":128,"gamma":128,"px":128,"py":128,"pz":128,"s":128,"e1":192,"e2":128,"bool":"new","extent":"one"}"#;

    fn doc(cmds: &[&str]) -> Vec<u8> {
        format!(r#"{{"commands":[{}]}}"#, cmds.join(",")).into_bytes()
    }

    #[test]
    fn minimal_program() {
        let p = parse_program(&doc(&[
            r#"{"type":"SOL"}"#,
            r#"{"type":"Circle","x":128,"y":128,"r":64}"#,
            EXT,
            r#"{"type":"EOS"}"#,
        ]))
        .unwrap();
        assert_eq!(sequence_length(&p), 3);
        assert_eq!(p.commands[1], Command::Circle { x: 128, y: 128, r: 64 });
    }

    #[test]
    fn line_before_sol_is_grammar_error() {
        let e = parse_program(&doc(&[r#"{"type":"Line","x":1,"y":1}"#, EXT])).unwrap_err();
        assert!(matches!(e, CadError::Grammar { index: 0, .. }), "{e:?}");
    }

    #[test]
    fn radius_out_of_range() {
        let e = parse_program(&doc(&[
            r#"{"type":"SOL"}"#,
            r#"{"type":"Circle","x":128,"y":128,"r":300}"#,
            EXT,
        ]))
        .unwrap_err();
        assert!(matches!(e, CadError::Range { value: 300, .. }), "{e:?}");
    }

    #[test]
    fn syntax_errors() {
        for bad in [
            &b"not json"[..],
            br#"{"cmds":[]}"#,
            br#"{"commands":[{"type":"Spline"}]}"#,
            br#"{"commands":[{"type":"Line","x":1}]}"#,
            br#"{"commands":[{"type":"Line","x":1.5,"y":2}]}"#,
        ] {
            assert!(matches!(parse_program(bad), Err(CadError::Syntax(_))));
        }
    }

    #[test]
    fn canonical_roundtrip() {
        let text = doc(&[
            r#"{"type":"SOL"}"#,
            r#"{"type":"Line","x":1,"y":2}"#,
            r#"{"type":"Arc","x":3,"y":4,"sweep":64,"ccw":1}"#,
            EXT,
            r#"{"type":"EOS"}"#,
        ]);
        let p = parse_program(&text).unwrap();
        assert_eq!(program_to_json(&p).as_bytes(), &text[..]);
    }
}
