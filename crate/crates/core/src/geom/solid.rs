//! Compilation of programs into CSG expressions over extruded profiles, and
//! the point-membership oracle.

use crate::cadlang::quant::{dequantize_u8, orientation_sincos, ParamKind};
use crate::cadlang::{BoolOp, CadProgram, Command, Extent, ExtrudeParams};

use super::profile::{build_loop, Profile, TOL};
use super::CompileError;

pub type P3 = [f64; 3];

#[inline]
pub(crate) fn dot3(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
#[inline]
pub(crate) fn add3(a: P3, b: P3) -> P3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}
#[inline]
pub(crate) fn sub3(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
#[inline]
pub(crate) fn scale3(a: P3, s: f64) -> P3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Axis-aligned box; empty when any `min > max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: P3,
    pub max: P3,
}

impl Aabb {
    pub const EMPTY: Aabb = Aabb { min: [f64::INFINITY; 3], max: [f64::NEG_INFINITY; 3] };

    pub fn from_points<'a>(pts: impl IntoIterator<Item = &'a P3>) -> Aabb {
        pts.into_iter().fold(Aabb::EMPTY, |b, p| b.grow(*p))
    }

    pub fn grow(self, p: P3) -> Aabb {
        Aabb {
            min: [self.min[0].min(p[0]), self.min[1].min(p[1]), self.min[2].min(p[2])],
            max: [self.max[0].max(p[0]), self.max[1].max(p[1]), self.max[2].max(p[2])],
        }
    }

    pub fn union(self, o: Aabb) -> Aabb {
        if o.is_empty() {
            return self;
        }
        if self.is_empty() {
            return o;
        }
        self.grow(o.min).grow(o.max)
    }

    pub fn intersection(self, o: Aabb) -> Aabb {
        Aabb {
            min: [self.min[0].max(o.min[0]), self.min[1].max(o.min[1]), self.min[2].max(o.min[2])],
            max: [self.max[0].min(o.max[0]), self.max[1].min(o.max[1]), self.max[2].min(o.max[2])],
        }
    }

    pub fn is_empty(&self) -> bool {
        (0..3).any(|i| self.min[i] > self.max[i])
    }

    pub fn extent(&self) -> P3 {
        if self.is_empty() {
            return [0.0; 3];
        }
        sub3(self.max, self.min)
    }

    pub fn volume(&self) -> f64 {
        let e = self.extent();
        e[0] * e[1] * e[2]
    }

    pub fn diagonal(&self) -> f64 {
        dot3(self.extent(), self.extent()).sqrt()
    }

    pub fn center(&self) -> P3 {
        scale3(add3(self.min, self.max), 0.5)
    }

    #[inline]
    pub fn contains(&self, p: P3, tol: f64) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] - tol && p[i] <= self.max[i] + tol)
    }
}

/// Sketch-plane frame: origin plus orthonormal in-plane axes and normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub origin: P3,
    pub x_axis: P3,
    pub y_axis: P3,
    pub normal: P3,
}

impl Frame {
    /// Rotation `Rz(theta) * Ry(phi) * Rx(gamma)`; its columns are the x
    /// axis, y axis and normal.
    pub fn from_quantized(e: &ExtrudeParams) -> Frame {
        let (st, ct) = orientation_sincos(e.theta);
        let (sp, cp) = orientation_sincos(e.phi);
        let (sg, cg) = orientation_sincos(e.gamma);
        let coord = |v| dequantize_u8(v, ParamKind::Coordinate);
        Frame {
            origin: [coord(e.px), coord(e.py), coord(e.pz)],
            x_axis: [ct * cp, st * cp, -sp],
            y_axis: [ct * sp * sg - st * cg, st * sp * sg + ct * cg, cp * sg],
            normal: [ct * sp * cg + st * sg, st * sp * cg - ct * sg, cp * cg],
        }
    }

    pub fn is_orthonormal(&self) -> bool {
        let axes = [self.x_axis, self.y_axis, self.normal];
        axes.iter().all(|a| (dot3(*a, *a) - 1.0).abs() < 1e-9)
            && dot3(axes[0], axes[1]).abs() < 1e-9
            && dot3(axes[0], axes[2]).abs() < 1e-9
            && dot3(axes[1], axes[2]).abs() < 1e-9
    }

    /// World point from sketch coordinates (already scaled) and height.
    #[inline]
    pub fn to_world(&self, u: f64, v: f64, h: f64) -> P3 {
        [
            self.origin[0] + u * self.x_axis[0] + v * self.y_axis[0] + h * self.normal[0],
            self.origin[1] + u * self.x_axis[1] + v * self.y_axis[1] + h * self.normal[1],
            self.origin[2] + u * self.x_axis[2] + v * self.y_axis[2] + h * self.normal[2],
        ]
    }

    #[inline]
    pub fn to_local(&self, q: P3) -> P3 {
        let d = sub3(q, self.origin);
        [dot3(d, self.x_axis), dot3(d, self.y_axis), dot3(d, self.normal)]
    }
}

/// A profile swept along its sketch-plane normal over heights `[lo, hi]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtrudedSolid {
    pub profile: Profile,
    pub frame: Frame,
    pub scale: f64,
    pub lo: f64,
    pub hi: f64,
    /// Index of the Extrude command in the source program.
    pub command: usize,
    bbox: Aabb,
}

impl ExtrudedSolid {
    pub fn new(profile: Profile, frame: Frame, scale: f64, lo: f64, hi: f64, command: usize) -> Self {
        let [plo, phi] = profile.bbox();
        let mut bbox = Aabb::EMPTY;
        for &u in &[plo[0], phi[0]] {
            for &v in &[plo[1], phi[1]] {
                for &h in &[lo, hi] {
                    bbox = bbox.grow(frame.to_world(u * scale, v * scale, h));
                }
            }
        }
        ExtrudedSolid { profile, frame, scale, lo, hi, command, bbox }
    }

    pub fn thickness(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn bbox(&self) -> Aabb {
        self.bbox
    }

    /// Membership; points within [`TOL`] of the boundary count as inside.
    #[inline]
    pub fn contains(&self, q: P3) -> bool {
        if !self.bbox.contains(q, TOL) {
            return false;
        }
        let [u, v, h] = self.frame.to_local(q);
        if h < self.lo - TOL || h > self.hi + TOL {
            return false;
        }
        self.profile.contains([u / self.scale, v / self.scale], TOL / self.scale)
    }

    /// Lower bound on the distance from `q` to this solid's boundary.
    pub fn boundary_margin(&self, q: P3) -> f64 {
        let [u, v, h] = self.frame.to_local(q);
        let wall = self.profile.boundary_distance([u / self.scale, v / self.scale]) * self.scale;
        (h - self.lo).abs().min((h - self.hi).abs()).min(wall)
    }

    /// Volume `area * scale^2 * thickness`.
    pub fn volume(&self) -> f64 {
        self.profile.area() * self.scale * self.scale * self.thickness()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub solid: ExtrudedSolid,
    /// Effective operation: the first term is always `NewBody`, later
    /// `NewBody` terms act as `Join`.
    pub op: BoolOp,
}

/// Left-to-right CSG expression over extruded solids.
#[derive(Clone, Debug, PartialEq)]
pub struct SolidModel {
    pub terms: Vec<Term>,
    pub bbox: Aabb,
}

impl SolidModel {
    pub fn new(solids: Vec<(ExtrudedSolid, BoolOp)>) -> SolidModel {
        let mut bbox = Aabb::EMPTY;
        let mut terms = Vec::with_capacity(solids.len());
        for (i, (solid, op)) in solids.into_iter().enumerate() {
            let op = match (i, op) {
                (0, _) => BoolOp::NewBody,
                (_, BoolOp::NewBody) => BoolOp::Join,
                (_, op) => op,
            };
            bbox = match op {
                BoolOp::NewBody | BoolOp::Join => bbox.union(solid.bbox()),
                BoolOp::Intersect => bbox.intersection(solid.bbox()),
                BoolOp::Cut => bbox,
            };
            terms.push(Term { solid, op });
        }
        SolidModel { terms, bbox }
    }

    #[inline]
    pub fn contains(&self, q: P3) -> bool {
        if !self.bbox.contains(q, TOL) {
            return false;
        }
        let mut inside = false;
        for t in &self.terms {
            match t.op {
                BoolOp::NewBody | BoolOp::Join => {
                    if !inside {
                        inside = t.solid.contains(q);
                    }
                }
                BoolOp::Cut => {
                    if inside && t.solid.contains(q) {
                        inside = false;
                    }
                }
                BoolOp::Intersect => {
                    if inside && !t.solid.contains(q) {
                        inside = false;
                    }
                }
            }
        }
        inside
    }
}

/// Resolves the extent type into the height interval `[lo, hi]` along the
/// sketch normal: one-sided `(e1, 0)`, symmetric `(e1/2, e1/2)`, two-sided
/// `(e1, e2)`, where the pair extends forward and backward respectively.
pub fn extent_interval(e: &ExtrudeParams) -> (f64, f64) {
    let e1 = dequantize_u8(e.e1, ParamKind::Distance);
    let e2 = dequantize_u8(e.e2, ParamKind::Distance);
    let (fwd, back) = match e.extent {
        Extent::OneSided => (e1, 0.0),
        Extent::Symmetric => (e1 / 2.0, e1 / 2.0),
        Extent::TwoSided => (e1, e2),
    };
    let (a, b) = (fwd, -back);
    (a.min(b), a.max(b))
}

/// Compiles a well-formed program into its CSG expression.
pub fn compile(p: &CadProgram) -> Result<SolidModel, CompileError> {
    let groups = p.groups().map_err(CompileError::Grammar)?;
    let mut solids = Vec::with_capacity(groups.len());
    for g in &groups {
        let loops = g.loops.iter().map(|span| build_loop(p, span)).collect::<Result<Vec<_>, _>>()?;
        let Command::Extrude(e) = p.commands[g.extrude] else {
            unreachable!("group ends with an extrude")
        };
        let frame = Frame::from_quantized(&e);
        if !frame.is_orthonormal() {
            return Err(CompileError::BadPlane { index: g.extrude });
        }
        let scale = dequantize_u8(e.scale, ParamKind::Scale);
        if scale <= TOL {
            return Err(CompileError::ZeroScale { index: g.extrude });
        }
        let (lo, hi) = extent_interval(&e);
        if hi - lo <= TOL {
            return Err(CompileError::ZeroThickness { index: g.extrude });
        }
        solids.push((ExtrudedSolid::new(Profile::new(loops), frame, scale, lo, hi, g.extrude), e.op));
    }
    Ok(SolidModel::new(solids))
}
