use serde::Serialize;

use crate::cadlang::CadProgram;

use super::{check_self_intersection, compile, sample_surface};

pub const VALIDITY_SAMPLES: usize = 2000;
pub const VALIDITY_SEED: u64 = 0x5eed_cad0;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidityReport {
    pub compiles: bool,
    pub self_intersection_free: bool,
    pub samplable: bool,
    pub failure_detail: String,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.compiles && self.self_intersection_free && self.samplable
    }
}

/// Runs every check and records the first failure in `failure_detail`.
pub fn is_valid(p: &CadProgram) -> ValidityReport {
    check(p, false)
}

/// Like [`is_valid`] but stops at the first failing check; later flags are
/// left false.
pub fn quick_valid(p: &CadProgram) -> bool {
    check(p, true).is_valid()
}

fn check(p: &CadProgram, short_circuit: bool) -> ValidityReport {
    let mut r = ValidityReport::default();
    let solid = match compile(p) {
        Ok(s) => s,
        Err(e) => {
            r.failure_detail = format!("compile: {e}");
            return r;
        }
    };
    r.compiles = true;
    let crossing = solid.terms.iter().position(|t| check_self_intersection(&t.solid.profile));
    r.self_intersection_free = crossing.is_none();
    if let Some(i) = crossing {
        r.failure_detail =
            format!("self-intersection in sketch of extrude at command {}", solid.terms[i].solid.command);
        if short_circuit {
            return r;
        }
    }
    match sample_surface(&solid, VALIDITY_SAMPLES, VALIDITY_SEED) {
        Ok(_) => r.samplable = true,
        Err(e) if r.failure_detail.is_empty() => r.failure_detail = format!("sampling: {e}"),
        Err(_) => {}
    }
    r
}
