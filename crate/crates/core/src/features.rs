//! Per-frame feature primitives and the closed predicate vocabulary that
//! word recognizers emit over.
//!
//! All geometric predicates work on box centers in image coordinates
//! (y down); flow is stored in math convention (y up), so the forward
//! projection negates the flow's y component when displacing a box.

use crate::clip::{BBox, Detection};
use crate::math;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

/// Tunable thresholds. Field names in config files match the notation the
/// thresholds are usually written with; ASCII aliases are accepted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Constants {
    #[serde(rename = "xBoundary", alias = "x_boundary")]
    pub x_boundary: f64,
    #[serde(rename = "nextTo", alias = "next_to")]
    pub next_to: f64,
    #[serde(rename = "Δstatic", alias = "delta_static")]
    pub delta_static: f64,
    #[serde(rename = "Δjump", alias = "delta_jump")]
    pub delta_jump: f64,
    #[serde(rename = "Δquick", alias = "delta_quick")]
    pub delta_quick: f64,
    #[serde(rename = "Δslow", alias = "delta_slow")]
    pub delta_slow: f64,
    #[serde(rename = "Δclosing", alias = "delta_closing")]
    pub delta_closing: f64,
    #[serde(rename = "Δdirection", alias = "delta_direction")]
    pub delta_direction: f64,
    #[serde(rename = "Δhue", alias = "delta_hue")]
    pub delta_hue: f64,
    /// When set, `carrying` tests horizontal instead of vertical motion.
    pub carry_horizontal: bool,
}

impl Default for Constants {
    fn default() -> Self {
        Constants {
            x_boundary: 300.0,
            next_to: 50.0,
            delta_static: 6.0,
            delta_jump: 30.0,
            delta_quick: 80.0,
            delta_slow: 30.0,
            delta_closing: 10.0,
            delta_direction: 30.0,
            delta_hue: 30.0,
            carry_horizontal: false,
        }
    }
}

pub const HUE_BLUE: f64 = 225.0;
pub const HUE_RED: f64 = 0.0;

pub const CLASS_PERSON: &str = "person";
pub const CLASS_BACKPACK: &str = "backpack";
pub const CLASS_CHAIR: &str = "chair";
pub const CLASS_TRASHCAN: &str = "trashcan";

// ---------------------------------------------------------------------------
// Primitives

/// Box center x.
pub fn center_x(d: &Detection) -> f64 {
    d.bbox.center().0
}

/// Box displaced one frame forward by its flow. Flow is math-convention,
/// boxes are image-convention, so y moves opposite to the flow's y.
pub fn fwd_proj(d: &Detection) -> BBox {
    let [fx, fy] = d.flow;
    let b = &d.bbox.0;
    BBox::new(b[0] + fx, b[1] - fy, b[2] + fx, b[3] - fy)
}

/// Flow magnitude.
pub fn flow_norm(d: &Detection) -> f64 {
    math::hypot(d.flow[0], d.flow[1])
}

/// Direction of a math-convention vector, degrees.
pub fn angle_of(v: [f64; 2]) -> f64 {
    math::atan2_deg(v[1], v[0])
}

/// 90° counterclockwise normal.
pub fn normal(v: [f64; 2]) -> [f64; 2] {
    [-v[1], v[0]]
}

/// Value of a named primitive, for diagnostics and the `oracle-check`
/// style tooling.
#[derive(Debug, Clone, PartialEq)]
pub enum PrimitiveValue {
    Scalar(f64),
    Vector([f64; 2]),
    Class(String),
    Box(BBox),
}

/// Dynamic primitive dispatch by name.
pub fn primitive(name: &str, d: &Detection) -> Result<PrimitiveValue, FeatureError> {
    match name {
        "x" | "centerX" => Ok(PrimitiveValue::Scalar(center_x(d))),
        "model" | "class" => Ok(PrimitiveValue::Class(d.class.clone())),
        "hue" => Ok(PrimitiveValue::Scalar(d.hue)),
        "avgFlow" | "flow" => Ok(PrimitiveValue::Vector(d.flow)),
        "flowNorm" => Ok(PrimitiveValue::Scalar(flow_norm(d))),
        "fwdProj" => Ok(PrimitiveValue::Box(fwd_proj(d))),
        _ => Err(FeatureError::UnknownPrimitive {
            name: name.to_string(),
        }),
    }
}

// ---------------------------------------------------------------------------
// Atoms

/// One output symbol of a word recognizer: a predicate over the detections
/// bound to the word's arguments, evaluated per frame.
#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    /// Vacuously true at any arity; the noise symbol.
    True,
    Person,
    Backpack,
    Chair,
    Trashcan,
    Blue,
    Red,
    HasColor(f64),
    Stationary,
    Quick,
    Slow,
    NoJitter([f64; 2]),
    InAngle([f64; 2]),
    InDirection([f64; 2]),
    Alike,
    Close,
    Far,
    Left,
    Right,
    StationaryClose,
    StationaryFar,
    Closer,
    Farther,
    MoveCloser,
    MoveFarther,
    Approaching,
    Departing,
    Carry([f64; 2]),
    Carrying,
    PickingUp,
    PuttingDown,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FeatureError {
    #[error("atom {atom} takes {expected} argument(s), got {got}")]
    Arity {
        atom: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown atom `{name}`")]
    UnknownAtom { name: String },
    #[error("atom `{name}` takes {expected} parameter(s), got {got}")]
    Parameters {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("unknown primitive `{name}`")]
    UnknownPrimitive { name: String },
}

impl Atom {
    /// Argument count, or `None` for TRUE which fits any arity.
    pub fn arity(&self) -> Option<usize> {
        use Atom::*;
        match self {
            True => None,
            Person | Backpack | Chair | Trashcan | Blue | Red | HasColor(_) | Stationary
            | Quick | Slow | NoJitter(_) | InAngle(_) | InDirection(_) => Some(1),
            Alike | Close | Far | Left | Right | StationaryClose | StationaryFar | Closer
            | Farther | MoveCloser | MoveFarther | Approaching | Departing | Carry(_)
            | Carrying | PickingUp | PuttingDown => Some(2),
        }
    }

    /// Resolve a (case-insensitive) name plus numeric parameters.
    pub fn parse(name: &str, params: &[f64]) -> Result<Atom, FeatureError> {
        let upper = name.to_uppercase();
        let want = |n: usize| -> Result<(), FeatureError> {
            if params.len() == n {
                Ok(())
            } else {
                Err(FeatureError::Parameters {
                    name: upper.clone(),
                    expected: n,
                    got: params.len(),
                })
            }
        };
        let atom = match upper.as_str() {
            "TRUE" => Atom::True,
            "PERSON" => Atom::Person,
            "BACKPACK" => Atom::Backpack,
            "CHAIR" => Atom::Chair,
            "TRASHCAN" => Atom::Trashcan,
            "BLUE" => Atom::Blue,
            "RED" => Atom::Red,
            "HASCOLOR" => {
                want(1)?;
                Atom::HasColor(params[0])
            }
            "STATIONARY" => Atom::Stationary,
            "QUICK" => Atom::Quick,
            "SLOW" => Atom::Slow,
            "NOJITTER" => {
                want(2)?;
                Atom::NoJitter([params[0], params[1]])
            }
            "INANGLE" => {
                want(2)?;
                Atom::InAngle([params[0], params[1]])
            }
            "INDIRECTION" => {
                want(2)?;
                Atom::InDirection([params[0], params[1]])
            }
            "ALIKE" => Atom::Alike,
            "CLOSE" => Atom::Close,
            "FAR" => Atom::Far,
            "LEFT" => Atom::Left,
            "RIGHT" => Atom::Right,
            "STATIONARYCLOSE" => Atom::StationaryClose,
            "STATIONARYFAR" => Atom::StationaryFar,
            "CLOSER" => Atom::Closer,
            "FARTHER" => Atom::Farther,
            "MOVECLOSER" => Atom::MoveCloser,
            "MOVEFARTHER" => Atom::MoveFarther,
            "APPROACHING" => Atom::Approaching,
            "DEPARTING" => Atom::Departing,
            "CARRY" => {
                want(2)?;
                Atom::Carry([params[0], params[1]])
            }
            "CARRYING" => Atom::Carrying,
            "PICKINGUP" => Atom::PickingUp,
            "PUTTINGDOWN" => Atom::PuttingDown,
            _ => {
                return Err(FeatureError::UnknownAtom {
                    name: name.to_string(),
                })
            }
        };
        if !matches!(
            atom,
            Atom::HasColor(_) | Atom::NoJitter(_) | Atom::InAngle(_) | Atom::InDirection(_) | Atom::Carry(_)
        ) && !params.is_empty()
        {
            return Err(FeatureError::Parameters {
                name: upper,
                expected: 0,
                got: params.len(),
            });
        }
        Ok(atom)
    }

    pub fn name(&self) -> &'static str {
        use Atom::*;
        match self {
            True => "TRUE",
            Person => "PERSON",
            Backpack => "BACKPACK",
            Chair => "CHAIR",
            Trashcan => "TRASHCAN",
            Blue => "BLUE",
            Red => "RED",
            HasColor(_) => "HASCOLOR",
            Stationary => "STATIONARY",
            Quick => "QUICK",
            Slow => "SLOW",
            NoJitter(_) => "NOJITTER",
            InAngle(_) => "INANGLE",
            InDirection(_) => "INDIRECTION",
            Alike => "ALIKE",
            Close => "CLOSE",
            Far => "FAR",
            Left => "LEFT",
            Right => "RIGHT",
            StationaryClose => "STATIONARYCLOSE",
            StationaryFar => "STATIONARYFAR",
            Closer => "CLOSER",
            Farther => "FARTHER",
            MoveCloser => "MOVECLOSER",
            MoveFarther => "MOVEFARTHER",
            Approaching => "APPROACHING",
            Departing => "DEPARTING",
            Carry(_) => "CARRY",
            Carrying => "CARRYING",
            PickingUp => "PICKINGUP",
            PuttingDown => "PUTTINGDOWN",
        }
    }
}

impl core::fmt::Display for Atom {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Atom::HasColor(h) => write!(f, "HASCOLOR({h})"),
            Atom::NoJitter(v) => write!(f, "NOJITTER({},{})", v[0], v[1]),
            Atom::InAngle(v) => write!(f, "INANGLE({},{})", v[0], v[1]),
            Atom::InDirection(v) => write!(f, "INDIRECTION({},{})", v[0], v[1]),
            Atom::Carry(v) => write!(f, "CARRY({},{})", v[0], v[1]),
            other => f.write_str(other.name()),
        }
    }
}

// ---------------------------------------------------------------------------
// Predicate definitions

fn no_jitter(d: &Detection, v: [f64; 2], c: &Constants) -> bool {
    math::abs(d.flow[0] * v[0] + d.flow[1] * v[1]) <= c.delta_jump
}

fn alike(a: &Detection, b: &Detection) -> bool {
    a.class == b.class
}

fn x_gap(a: &Detection, b: &Detection) -> f64 {
    math::abs(center_x(a) - center_x(b))
}

fn close(a: &Detection, b: &Detection, c: &Constants) -> bool {
    x_gap(a, b) < c.x_boundary
}

fn far(a: &Detection, b: &Detection, c: &Constants) -> bool {
    x_gap(a, b) >= c.x_boundary
}

fn left(a: &Detection, b: &Detection, c: &Constants) -> bool {
    let d = center_x(b) - center_x(a);
    0.0 < d && d <= c.next_to
}

fn right(a: &Detection, b: &Detection, c: &Constants) -> bool {
    let d = center_x(a) - center_x(b);
    0.0 < d && d <= c.next_to
}

fn has_color(d: &Detection, hue: f64, c: &Constants) -> bool {
    math::angle_sep_deg(d.hue, hue) <= c.delta_hue
}

fn stationary(d: &Detection, c: &Constants) -> bool {
    flow_norm(d) <= c.delta_static
}

fn quick(d: &Detection, c: &Constants) -> bool {
    flow_norm(d) >= c.delta_quick
}

fn slow(d: &Detection, c: &Constants) -> bool {
    flow_norm(d) <= c.delta_slow
}

fn stationary_pair(a: &Detection, b: &Detection, c: &Constants) -> bool {
    stationary(a, c) && stationary(b, c) && !alike(a, b)
}

/// The projected gap shrinks by more than Δclosing.
fn closer(a: &Detection, b: &Detection, c: &Constants) -> bool {
    let proj = fwd_proj(a);
    x_gap(a, b) > math::abs(proj.center().0 - center_x(b)) + c.delta_closing
}

/// Kept in its stated form (`<` against the projected gap *plus* Δclosing),
/// which admits slow drift toward the reference as well.
fn farther(a: &Detection, b: &Detection, c: &Constants) -> bool {
    let proj = fwd_proj(a);
    x_gap(a, b) < math::abs(proj.center().0 - center_x(b)) + c.delta_closing
}

fn move_closer(a: &Detection, b: &Detection, c: &Constants) -> bool {
    no_jitter(a, [0.0, 1.0], c) && no_jitter(b, [0.0, 1.0], c) && closer(a, b, c)
}

fn move_farther(a: &Detection, b: &Detection, c: &Constants) -> bool {
    no_jitter(a, [0.0, 1.0], c) && no_jitter(b, [0.0, 1.0], c) && farther(a, b, c)
}

fn in_angle(d: &Detection, v: [f64; 2], c: &Constants) -> bool {
    math::angle_sep_deg(angle_of(d.flow), angle_of(v)) < c.delta_direction
}

fn in_direction(d: &Detection, v: [f64; 2], c: &Constants) -> bool {
    no_jitter(d, normal(v), c) && !stationary(d, c) && in_angle(d, v, c)
}

fn approaching(a: &Detection, b: &Detection, c: &Constants) -> bool {
    !alike(a, b) && stationary(b, c) && move_closer(a, b, c)
}

fn departing(a: &Detection, b: &Detection, c: &Constants) -> bool {
    !alike(a, b) && stationary(b, c) && move_farther(a, b, c)
}

fn carry(a: &Detection, b: &Detection, v: [f64; 2], c: &Constants) -> bool {
    a.class == CLASS_PERSON && !alike(a, b) && in_direction(a, v, c) && in_direction(b, v, c)
}

fn carrying(a: &Detection, b: &Detection, c: &Constants) -> bool {
    if c.carry_horizontal {
        carry(a, b, [1.0, 0.0], c) || carry(a, b, [-1.0, 0.0], c)
    } else {
        carry(a, b, [0.0, 1.0], c) || carry(a, b, [0.0, -1.0], c)
    }
}

fn picking_up(a: &Detection, b: &Detection, c: &Constants) -> bool {
    a.class == CLASS_PERSON && !alike(a, b) && stationary(a, c) && in_direction(b, [0.0, 1.0], c)
}

fn putting_down(a: &Detection, b: &Detection, c: &Constants) -> bool {
    a.class == CLASS_PERSON && !alike(a, b) && stationary(a, c) && in_direction(b, [0.0, -1.0], c)
}

/// Evaluate an atom on the detections bound to a word's arguments.
pub fn eval_atom(atom: &Atom, args: &[&Detection], c: &Constants) -> Result<bool, FeatureError> {
    if let Some(n) = atom.arity() {
        if args.len() != n {
            return Err(FeatureError::Arity {
                atom: atom.name().to_string(),
                expected: n,
                got: args.len(),
            });
        }
    } else if args.is_empty() {
        return Err(FeatureError::Arity {
            atom: "TRUE".to_string(),
            expected: 1,
            got: 0,
        });
    }
    let a = args[0];
    Ok(match atom {
        Atom::True => true,
        Atom::Person => a.class == CLASS_PERSON,
        Atom::Backpack => a.class == CLASS_BACKPACK,
        Atom::Chair => a.class == CLASS_CHAIR,
        Atom::Trashcan => a.class == CLASS_TRASHCAN,
        Atom::Blue => has_color(a, HUE_BLUE, c),
        Atom::Red => has_color(a, HUE_RED, c),
        Atom::HasColor(h) => has_color(a, *h, c),
        Atom::Stationary => stationary(a, c),
        Atom::Quick => quick(a, c),
        Atom::Slow => slow(a, c),
        Atom::NoJitter(v) => no_jitter(a, *v, c),
        Atom::InAngle(v) => in_angle(a, *v, c),
        Atom::InDirection(v) => in_direction(a, *v, c),
        Atom::Alike => alike(a, args[1]),
        Atom::Close => close(a, args[1], c),
        Atom::Far => far(a, args[1], c),
        Atom::Left => left(a, args[1], c),
        Atom::Right => right(a, args[1], c),
        Atom::StationaryClose => stationary_pair(a, args[1], c) && close(a, args[1], c),
        Atom::StationaryFar => stationary_pair(a, args[1], c) && far(a, args[1], c),
        Atom::Closer => closer(a, args[1], c),
        Atom::Farther => farther(a, args[1], c),
        Atom::MoveCloser => move_closer(a, args[1], c),
        Atom::MoveFarther => move_farther(a, args[1], c),
        Atom::Approaching => approaching(a, args[1], c),
        Atom::Departing => departing(a, args[1], c),
        Atom::Carry(v) => carry(a, args[1], *v, c),
        Atom::Carrying => carrying(a, args[1], c),
        Atom::PickingUp => picking_up(a, args[1], c),
        Atom::PuttingDown => putting_down(a, args[1], c),
    })
}

/// Every parameterless atom name, for DSL diagnostics and enumeration in
/// tests. Parameterized atoms (HASCOLOR, NOJITTER, INANGLE, INDIRECTION,
/// CARRY) are additional.
pub fn atom_names() -> Vec<&'static str> {
    alloc::vec![
        "TRUE",
        "PERSON",
        "BACKPACK",
        "CHAIR",
        "TRASHCAN",
        "BLUE",
        "RED",
        "STATIONARY",
        "QUICK",
        "SLOW",
        "ALIKE",
        "CLOSE",
        "FAR",
        "LEFT",
        "RIGHT",
        "STATIONARYCLOSE",
        "STATIONARYFAR",
        "CLOSER",
        "FARTHER",
        "MOVECLOSER",
        "MOVEFARTHER",
        "APPROACHING",
        "DEPARTING",
        "CARRYING",
        "PICKINGUP",
        "PUTTINGDOWN",
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn det_at(x: f64, class: &str, flow: [f64; 2]) -> Detection {
        Detection {
            bbox: BBox::new(x - 10.0, 0.0, x + 10.0, 20.0),
            score: 1.0,
            class: class.into(),
            flow,
            hue: 120.0,
        }
    }

    fn c() -> Constants {
        Constants::default()
    }

    #[test]
    fn fwd_proj_negates_flow_y() {
        let mut d = det_at(5.0, "person", [3.0, 4.0]);
        d.bbox = BBox::new(0.0, 0.0, 10.0, 10.0);
        assert_eq!(fwd_proj(&d), BBox::new(3.0, -4.0, 13.0, 6.0));
    }

    #[test]
    fn close_far_left_right() {
        let a = det_at(100.0, "person", [0.0, 0.0]);
        let b = det_at(250.0, "trashcan", [0.0, 0.0]);
        assert!(eval_atom(&Atom::Close, &[&a, &b], &c()).unwrap()); // 150 < 300
        assert!(!eval_atom(&Atom::Far, &[&a, &b], &c()).unwrap());

        let near = det_at(130.0, "trashcan", [0.0, 0.0]);
        assert!(eval_atom(&Atom::Left, &[&a, &near], &c()).unwrap()); // 30 ≤ 50
        assert!(!eval_atom(&Atom::Right, &[&a, &near], &c()).unwrap());
        let wide = det_at(160.0, "trashcan", [0.0, 0.0]);
        assert!(!eval_atom(&Atom::Left, &[&a, &wide], &c()).unwrap()); // 60 > 50
        // Ordered: an object is not to the left of itself.
        assert!(!eval_atom(&Atom::Left, &[&near, &a], &c()).unwrap());
        assert!(eval_atom(&Atom::Right, &[&near, &a], &c()).unwrap());
    }

    #[test]
    fn motion_predicates() {
        let still = det_at(0.0, "chair", [1.0, 1.7]);
        assert!(eval_atom(&Atom::Stationary, &[&still], &c()).unwrap()); // ‖·‖≈2
        let fast = det_at(0.0, "person", [90.0, 0.0]);
        assert!(eval_atom(&Atom::Quick, &[&fast], &c()).unwrap());
        assert!(!eval_atom(&Atom::Slow, &[&fast], &c()).unwrap());
        let gentle = det_at(0.0, "person", [20.0, 0.0]);
        assert!(eval_atom(&Atom::Slow, &[&gentle], &c()).unwrap());
        assert!(!eval_atom(&Atom::Quick, &[&gentle], &c()).unwrap());
    }

    #[test]
    fn hue_predicates_wrap() {
        let mut d = det_at(0.0, "backpack", [0.0, 0.0]);
        d.hue = 240.0;
        assert!(eval_atom(&Atom::Blue, &[&d], &c()).unwrap()); // sep 15 ≤ 30
        d.hue = 340.0;
        assert!(eval_atom(&Atom::Red, &[&d], &c()).unwrap()); // wraps to sep 20
        d.hue = 120.0;
        assert!(!eval_atom(&Atom::Blue, &[&d], &c()).unwrap());
        assert!(!eval_atom(&Atom::Red, &[&d], &c()).unwrap());
    }

    #[test]
    fn move_closer_requires_projection_gain_beyond_delta() {
        // Mover at 200 heading left 15 px/frame toward reference at 100:
        // gap 100 vs projected 85 + Δclosing 10 → closer.
        let mover = det_at(200.0, "backpack", [-15.0, 0.0]);
        let reference = det_at(100.0, "trashcan", [0.0, 0.0]);
        assert!(eval_atom(&Atom::MoveCloser, &[&mover, &reference], &c()).unwrap());
        // 10 px/frame is not beyond Δclosing.
        let slowpoke = det_at(200.0, "backpack", [-10.0, 0.0]);
        assert!(!eval_atom(&Atom::MoveCloser, &[&slowpoke, &reference], &c()).unwrap());
        // Vertical jitter above Δjump defeats it.
        let jumpy = det_at(200.0, "backpack", [-15.0, 35.0]);
        assert!(!eval_atom(&Atom::MoveCloser, &[&jumpy, &reference], &c()).unwrap());
    }

    #[test]
    fn approaching_needs_distinct_classes_and_still_reference() {
        let mover = det_at(400.0, "backpack", [-15.0, 0.0]);
        let still = det_at(100.0, "trashcan", [0.0, 0.0]);
        assert!(eval_atom(&Atom::Approaching, &[&mover, &still], &c()).unwrap());
        let same = det_at(100.0, "backpack", [0.0, 0.0]);
        assert!(!eval_atom(&Atom::Approaching, &[&mover, &same], &c()).unwrap());
        let drifting = det_at(100.0, "trashcan", [8.0, 0.0]);
        assert!(!eval_atom(&Atom::Approaching, &[&mover, &drifting], &c()).unwrap());
    }

    #[test]
    fn vertical_manipulation_predicates() {
        let person = det_at(100.0, "person", [0.0, 0.0]);
        let lifted = det_at(130.0, "backpack", [0.0, 25.0]);
        let lowered = det_at(130.0, "backpack", [0.0, -25.0]);
        assert!(eval_atom(&Atom::PickingUp, &[&person, &lifted], &c()).unwrap());
        assert!(!eval_atom(&Atom::PickingUp, &[&person, &lowered], &c()).unwrap());
        assert!(eval_atom(&Atom::PuttingDown, &[&person, &lowered], &c()).unwrap());
        // A moving person is neither picking up nor putting down.
        let walking = det_at(100.0, "person", [20.0, 0.0]);
        assert!(!eval_atom(&Atom::PickingUp, &[&walking, &lifted], &c()).unwrap());
    }

    #[test]
    fn carrying_accepts_up_or_down_dominated_motion() {
        let person = det_at(100.0, "person", [12.0, 25.0]);
        let load = det_at(130.0, "backpack", [12.0, 25.0]);
        assert!(eval_atom(&Atom::Carrying, &[&person, &load], &c()).unwrap());
        let person_down = det_at(100.0, "person", [12.0, -25.0]);
        let load_down = det_at(130.0, "backpack", [12.0, -25.0]);
        assert!(eval_atom(&Atom::Carrying, &[&person_down, &load_down], &c()).unwrap());
        // Purely horizontal motion fails the vertical carry, and vice versa.
        let slide = det_at(100.0, "person", [25.0, 0.0]);
        let slid = det_at(130.0, "backpack", [25.0, 0.0]);
        assert!(!eval_atom(&Atom::Carrying, &[&slide, &slid], &c()).unwrap());
        let mut horiz = c();
        horiz.carry_horizontal = true;
        assert!(eval_atom(&Atom::Carrying, &[&slide, &slid], &horiz).unwrap());
        // Only a person can carry.
        let cart = det_at(100.0, "chair", [12.0, 25.0]);
        assert!(!eval_atom(&Atom::Carrying, &[&cart, &load], &c()).unwrap());
    }

    #[test]
    fn arity_is_enforced() {
        let a = det_at(0.0, "person", [0.0, 0.0]);
        assert!(matches!(
            eval_atom(&Atom::Close, &[&a], &c()),
            Err(FeatureError::Arity { expected: 2, got: 1, .. })
        ));
        assert!(matches!(
            eval_atom(&Atom::Person, &[&a, &a], &c()),
            Err(FeatureError::Arity { expected: 1, got: 2, .. })
        ));
        assert!(eval_atom(&Atom::True, &[&a, &a], &c()).unwrap());
    }

    #[test]
    fn atom_parsing_round_trips() {
        assert_eq!(Atom::parse("person", &[]).unwrap(), Atom::Person);
        assert_eq!(Atom::parse("StationaryFar", &[]).unwrap(), Atom::StationaryFar);
        assert_eq!(Atom::parse("HASCOLOR", &[225.0]).unwrap(), Atom::HasColor(225.0));
        assert_eq!(
            Atom::parse("CARRY", &[0.0, -1.0]).unwrap(),
            Atom::Carry([0.0, -1.0])
        );
        assert!(matches!(
            Atom::parse("FOO", &[]),
            Err(FeatureError::UnknownAtom { .. })
        ));
        assert!(matches!(
            Atom::parse("HASCOLOR", &[]),
            Err(FeatureError::Parameters { .. })
        ));
        assert!(matches!(
            Atom::parse("PERSON", &[1.0]),
            Err(FeatureError::Parameters { .. })
        ));
        for name in atom_names() {
            assert!(Atom::parse(name, &[]).is_ok(), "{name}");
        }
    }

    #[test]
    fn constants_deserialize_with_table_names_and_aliases() {
        let c: Constants = serde_json::from_str(r#"{"xBoundary": 200.0, "Δquick": 70.0}"#).unwrap();
        assert_eq!(c.x_boundary, 200.0);
        assert_eq!(c.delta_quick, 70.0);
        assert_eq!(c.next_to, 50.0);
        let c: Constants = serde_json::from_str(r#"{"delta_hue": 15.0}"#).unwrap();
        assert_eq!(c.delta_hue, 15.0);
    }
}
