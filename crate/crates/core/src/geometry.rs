//! Ruler-and-compass construction of the complex quotient
//! `(u₁ - i·v₁) / (u₂ - i·v₂)`.
//!
//! The four counts are laid end to end along the positive real axis as
//! colored segments `AB`, `BC`, `CD`, `DE`. Rotating `BC` clockwise about
//! `B` gives `C′` with `AC′ = z₁`; copying `CD` and `DE` to the origin and
//! rotating the second copy gives `E′` with `AE′ = z₂`. Turning `AE′` down
//! onto the axis (`E″`, at distance `|z₂|`) and turning `AC′` by the same
//! angle (`C″ = z₁·conj(z₂)/|z₂|`) reduces the division to scaling by
//! `1/|z₂|`, done with the unit point `U` and a parallel to `E″C″`: the
//! parallel through `U` meets the line `AC″` at `R = z₁/z₂`.
//!
//! When the quotient is real, `C″` lies on the axis and the parallel would
//! run along `AC″`; the unit and `|z₂|` are then erected on the
//! perpendicular at `A` instead.
//!
//! Steps are macro operations, each with a classical expansion:
//! a segment transfer is one compass setting, a right-angle rotation is a
//! perpendicular plus a circle, a rotation onto a ray is a circle about the
//! pivot, a rotation by a given angle copies the angle with two circles, and
//! a parallel through a point copies an angle.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("denominator (u2, v2) is zero")]
    ZeroDenominator,
    #[error("malformed trace at step {step}: {msg}")]
    MalformedTrace { step: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StepKind {
    PlacePoint,
    DrawSegment,
    TransferDistance,
    ErectPerpendicular,
    #[serde(rename = "ROTATE_SEGMENT_CLOCKWISE_90")]
    RotateSegmentClockwise90,
    RotateSegmentToRay,
    ParallelThroughPoint,
    MarkIntersection,
    MarkUnit,
}

/// One construction step.
///
/// Input conventions (`OX` is the positive real axis through the origin):
///
/// | kind | inputs | output |
/// |---|---|---|
/// | `PLACE_POINT` | none | point at the origin |
/// | `DRAW_SEGMENT` with `length` | `[P]` | point `P + length` along `OX` |
/// | `DRAW_SEGMENT` without `length` | `[P, Q]` | segment `PQ` |
/// | `TRANSFER_DISTANCE` | `[P, Q, S]` | point `S + (Q - P)` |
/// | `ERECT_PERPENDICULAR` | `[P, Q]` | `Q` turned 90° counterclockwise about `P` |
/// | `ROTATE_SEGMENT_CLOCKWISE_90` | `[P, Q]` | `Q` turned 90° clockwise about `P` |
/// | `ROTATE_SEGMENT_TO_RAY` | `[P, Q]` | `Q` turned about `P` onto `OX` |
/// | `ROTATE_SEGMENT_TO_RAY` | `[P, Q, S, T]` | `Q` turned about `P` by the angle from ray `PS` to ray `PT` |
/// | `PARALLEL_THROUGH_POINT` | `[P, Q, S]` | line through `S` parallel to `PQ` |
/// | `MARK_INTERSECTION` | `[l, P, Q]` | meet of line `l` with line `PQ` |
/// | `MARK_UNIT` | `[P]` | `P + 1` along `OX` |
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionStep {
    pub kind: StepKind,
    pub inputs: Vec<String>,
    pub output: String,
    /// Pencil color `1..=4` for the laid-out count segments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<u8>,
    /// Signed length in units for segments laid along the axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<i64>,
}

impl ConstructionStep {
    fn new(kind: StepKind, inputs: &[&str], output: &str) -> Self {
        ConstructionStep {
            kind,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            output: output.to_string(),
            color: None,
            length: None,
        }
    }

    fn lay(from: &str, to: &str, length: i64, color: u8) -> Self {
        ConstructionStep { color: Some(color), length: Some(length), ..Self::new(StepKind::DrawSegment, &[from], to) }
    }

    fn join(p: &str, q: &str) -> Self {
        Self::new(StepKind::DrawSegment, &[p, q], &format!("{p}{q}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionTrace {
    pub steps: Vec<ConstructionStep>,
    pub result_label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub label: String,
}

/// Evaluated object bound to a label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Object {
    Point([f64; 2]),
    Segment([f64; 2], [f64; 2]),
    Line { through: [f64; 2], dir: [f64; 2] },
}

/// Plans the construction of `(u1 - i·v1) / (u2 - i·v2)`.
pub fn plan_quotient_construction(u1: i64, v1: i64, u2: i64, v2: i64) -> Result<ConstructionTrace, GeometryError> {
    use StepKind::*;
    if u2 == 0 && v2 == 0 {
        return Err(GeometryError::ZeroDenominator);
    }
    let mut steps = vec![
        ConstructionStep::new(PlacePoint, &[], "A"),
        ConstructionStep::lay("A", "B", u1, 1),
        ConstructionStep::lay("B", "C", v1, 2),
        ConstructionStep::lay("C", "D", u2, 3),
        ConstructionStep::lay("D", "E", v2, 4),
        ConstructionStep::new(RotateSegmentClockwise90, &["B", "C"], "C′"),
        ConstructionStep::join("A", "C′"),
        ConstructionStep::new(TransferDistance, &["C", "D", "A"], "D′"),
        ConstructionStep::new(TransferDistance, &["D", "E", "D′"], "F"),
        ConstructionStep::new(RotateSegmentClockwise90, &["D′", "F"], "E′"),
        ConstructionStep::join("A", "E′"),
        ConstructionStep::new(RotateSegmentToRay, &["A", "E′"], "E″"),
        ConstructionStep::new(RotateSegmentToRay, &["A", "C′", "E′", "E″"], "C″"),
        ConstructionStep::new(MarkUnit, &["A"], "U"),
    ];
    // Im(z1·conj(z2)) = u1·v2 - v1·u2 vanishes exactly when the quotient is real.
    let real_quotient = (u1 as i128) * (v2 as i128) == (v1 as i128) * (u2 as i128);
    let (far, unit) = if real_quotient {
        steps.push(ConstructionStep::new(ErectPerpendicular, &["A", "E″"], "E‴"));
        steps.push(ConstructionStep::new(ErectPerpendicular, &["A", "U"], "U′"));
        ("E‴", "U′")
    } else {
        ("E″", "U")
    };
    steps.push(ConstructionStep::join(far, "C″"));
    steps.push(ConstructionStep::new(ParallelThroughPoint, &[far, "C″", unit], "l"));
    steps.push(ConstructionStep::new(MarkIntersection, &["l", "A", "C″"], "R"));
    Ok(ConstructionTrace { steps, result_label: "R".to_string() })
}

fn sub(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn add(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] + b[0], a[1] + b[1]]
}

fn scale(a: [f64; 2], k: f64) -> [f64; 2] {
    [a[0] * k, a[1] * k]
}

fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

fn rotate_cw(a: [f64; 2]) -> [f64; 2] {
    [a[1], -a[0]]
}

fn rotate_ccw(a: [f64; 2]) -> [f64; 2] {
    [-a[1], a[0]]
}

/// Rotates `v` by the angle taking direction `from` to direction `to`.
fn rotate_between(v: [f64; 2], from: [f64; 2], to: [f64; 2]) -> [f64; 2] {
    let (nf, nt) = (norm(from), norm(to));
    let c = dot(from, to) / (nf * nt);
    let s = cross(from, to) / (nf * nt);
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

const EPS: f64 = 1e-12;

/// Evaluates every step, returning the labeled objects in step order.
pub fn evaluate_objects(t: &ConstructionTrace) -> Result<Vec<(String, Object)>, GeometryError> {
    let mut env: HashMap<&str, Object> = HashMap::new();
    let mut out = Vec::with_capacity(t.steps.len());
    for (idx, step) in t.steps.iter().enumerate() {
        let bad = |msg: String| GeometryError::MalformedTrace { step: idx, msg };
        let point = |label: &str| -> Result<[f64; 2], GeometryError> {
            match env.get(label) {
                Some(Object::Point(p)) => Ok(*p),
                Some(_) => Err(bad(format!("'{label}' is not a point"))),
                None => Err(bad(format!("'{label}' is not defined by an earlier step"))),
            }
        };
        let arity = |n: usize| -> Result<(), GeometryError> {
            if step.inputs.len() == n {
                Ok(())
            } else {
                Err(bad(format!("{:?} takes {n} inputs, got {}", step.kind, step.inputs.len())))
            }
        };
        let ins = &step.inputs;
        let obj = match step.kind {
            StepKind::PlacePoint => {
                arity(0)?;
                Object::Point([0.0, 0.0])
            }
            StepKind::DrawSegment => match step.length {
                Some(len) => {
                    arity(1)?;
                    Object::Point(add(point(&ins[0])?, [len as f64, 0.0]))
                }
                None => {
                    arity(2)?;
                    Object::Segment(point(&ins[0])?, point(&ins[1])?)
                }
            },
            StepKind::TransferDistance => {
                arity(3)?;
                Object::Point(add(point(&ins[2])?, sub(point(&ins[1])?, point(&ins[0])?)))
            }
            StepKind::ErectPerpendicular => {
                arity(2)?;
                let p = point(&ins[0])?;
                Object::Point(add(p, rotate_ccw(sub(point(&ins[1])?, p))))
            }
            StepKind::RotateSegmentClockwise90 => {
                arity(2)?;
                let p = point(&ins[0])?;
                Object::Point(add(p, rotate_cw(sub(point(&ins[1])?, p))))
            }
            StepKind::RotateSegmentToRay => {
                let p = point(ins.first().ok_or_else(|| bad("missing pivot".into()))?)?;
                match ins.len() {
                    2 => Object::Point(add(p, [norm(sub(point(&ins[1])?, p)), 0.0])),
                    4 => {
                        let from = sub(point(&ins[2])?, p);
                        let to = sub(point(&ins[3])?, p);
                        if norm(from) <= EPS || norm(to) <= EPS {
                            return Err(bad("angle rays must have nonzero length".into()));
                        }
                        Object::Point(add(p, rotate_between(sub(point(&ins[1])?, p), from, to)))
                    }
                    n => return Err(bad(format!("ROTATE_SEGMENT_TO_RAY takes 2 or 4 inputs, got {n}"))),
                }
            }
            StepKind::ParallelThroughPoint => {
                arity(3)?;
                let dir = sub(point(&ins[1])?, point(&ins[0])?);
                if norm(dir) <= EPS {
                    return Err(bad("reference segment has zero length".into()));
                }
                Object::Line { through: point(&ins[2])?, dir }
            }
            StepKind::MarkIntersection => {
                arity(3)?;
                let (through, dir) = match env.get(ins[0].as_str()) {
                    Some(Object::Line { through, dir }) => (*through, *dir),
                    Some(Object::Segment(a, b)) => (*a, sub(*b, *a)),
                    _ => return Err(bad(format!("'{}' is not a line", ins[0]))),
                };
                let a = point(&ins[1])?;
                let b = point(&ins[2])?;
                let ab = sub(b, a);
                let scale_ab = norm(ab);
                if scale_ab <= EPS * (1.0 + norm(a)) {
                    // second line collapsed to a point: it is the meet iff it lies on the first
                    let off = cross(dir, sub(a, through)).abs() / norm(dir);
                    if off <= 1e-9 * (1.0 + norm(a)) {
                        Object::Point(a)
                    } else {
                        return Err(bad("degenerate line does not meet".into()));
                    }
                } else {
                    let denom = cross(dir, ab);
                    if denom.abs() <= EPS * norm(dir) * scale_ab {
                        return Err(bad("lines are parallel".into()));
                    }
                    let s = cross(dir, sub(through, a)) / denom;
                    Object::Point(add(a, scale(ab, s)))
                }
            }
            StepKind::MarkUnit => {
                arity(1)?;
                Object::Point(add(point(&ins[0])?, [1.0, 0.0]))
            }
        };
        if env.contains_key(step.output.as_str()) {
            return Err(bad(format!("label '{}' defined twice", step.output)));
        }
        env.insert(step.output.as_str(), obj);
        out.push((step.output.clone(), obj));
    }
    Ok(out)
}

/// Coordinates of the trace's result point.
pub fn evaluate_trace(t: &ConstructionTrace) -> Result<Point, GeometryError> {
    let objects = evaluate_objects(t)?;
    let last = t.steps.last().ok_or(GeometryError::MalformedTrace { step: 0, msg: "empty trace".into() })?;
    if last.output != t.result_label || last.kind != StepKind::MarkIntersection {
        return Err(GeometryError::MalformedTrace {
            step: t.steps.len() - 1,
            msg: "result must come from the final MARK_INTERSECTION".into(),
        });
    }
    match objects.last() {
        Some((label, Object::Point([x, y]))) if x.is_finite() && y.is_finite() => {
            Ok(Point { x: *x, y: *y, label: label.clone() })
        }
        _ => Err(GeometryError::MalformedTrace { step: t.steps.len() - 1, msg: "result is not a finite point".into() }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvgOptions {
    /// Side of the square viewport in pixels.
    pub size: f64,
    pub margin: f64,
    pub title: Option<String>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { size: 1000.0, margin: 60.0, title: None }
    }
}

const PENCILS: [&str; 4] = ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e"];
const AUX: &str = "#999999";

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Frame {
    min: [f64; 2],
    scale: f64,
    size: f64,
    margin: f64,
}

impl Frame {
    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        let x = self.margin + (p[0] - self.min[0]) * self.scale;
        let y = self.size - self.margin - (p[1] - self.min[1]) * self.scale;
        (x, y)
    }
}

/// Renders a trace as a standalone SVG 1.1 document, one `<g>` layer per
/// step. Output depends only on the inputs.
pub fn render_svg(t: &ConstructionTrace, options: &SvgOptions) -> Result<String, GeometryError> {
    let objects = evaluate_objects(t)?;
    let points: HashMap<&str, [f64; 2]> = objects
        .iter()
        .filter_map(|(l, o)| match o {
            Object::Point(p) => Some((l.as_str(), *p)),
            _ => None,
        })
        .collect();

    let mut min = [f64::INFINITY; 2];
    let mut max = [f64::NEG_INFINITY; 2];
    let mut extend = |p: [f64; 2]| {
        for i in 0..2 {
            min[i] = min[i].min(p[i]);
            max[i] = max[i].max(p[i]);
        }
    };
    for p in points.values() {
        extend(*p);
    }
    // rotation circles must fit as well
    for step in &t.steps {
        if matches!(step.kind, StepKind::RotateSegmentClockwise90 | StepKind::RotateSegmentToRay) {
            let c = points[step.inputs[0].as_str()];
            let r = norm(sub(points[step.inputs[1].as_str()], c));
            extend([c[0] - r, c[1] - r]);
            extend([c[0] + r, c[1] + r]);
        }
    }
    let span = (max[0] - min[0]).max(max[1] - min[1]).max(1e-9);
    let scale = (options.size - 2.0 * options.margin) / span;
    let frame = Frame { min, scale, size: options.size, margin: options.margin };
    let px = |p: [f64; 2]| frame.map(p);

    let mut svg = String::new();
    let s = options.size;
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#
    );
    if let Some(title) = &options.title {
        let _ = writeln!(svg, "  <title>{}</title>", xml_escape(title));
    }
    let _ = writeln!(svg, r#"  <rect x="0" y="0" width="{s}" height="{s}" fill="white"/>"#);
    let (ax0, ay) = px([min[0], 0.0]);
    let (ax1, _) = px([max[0], 0.0]);
    let _ = writeln!(
        svg,
        r#"  <line id="axis" x1="{:.3}" y1="{ay:.3}" x2="{:.3}" y2="{ay:.3}" stroke="{AUX}" stroke-width="1" stroke-dasharray="2,4"/>"#,
        ax0 - 20.0,
        ax1 + 20.0
    );

    let line = |svg: &mut String, a: [f64; 2], b: [f64; 2], stroke: &str, width: f64, dash: Option<&str>| {
        let (x1, y1) = px(a);
        let (x2, y2) = px(b);
        let dash = dash.map(|d| format!(r#" stroke-dasharray="{d}""#)).unwrap_or_default();
        let _ = writeln!(
            svg,
            r#"    <line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{stroke}" stroke-width="{width}"{dash}/>"#
        );
    };
    let circle = |svg: &mut String, c: [f64; 2], r: f64| {
        let (cx, cy) = px(c);
        let _ = writeln!(
            svg,
            r#"    <circle cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="none" stroke="{AUX}" stroke-width="0.8" stroke-dasharray="4,4"/>"#,
            r * scale
        );
    };

    for (idx, (step, (label, obj))) in t.steps.iter().zip(&objects).enumerate() {
        let kind = serde_json::to_value(step.kind).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        let _ = writeln!(
            svg,
            r#"  <g id="step-{idx}" class="{}" data-output="{}">"#,
            kind.to_lowercase(),
            xml_escape(label)
        );
        let p = |name: &str| points[name];
        match step.kind {
            StepKind::DrawSegment => match (step.length, obj) {
                (Some(_), Object::Point(end)) => {
                    // each pencil gets its own lane under the axis so overlapping
                    // signed segments stay distinguishable
                    let lane = step.color.map_or(0, |c| c as usize % 5);
                    let color = step.color.map_or(AUX, |c| PENCILS[(c as usize + 3) % 4]);
                    let (x1, y1) = px(p(&step.inputs[0]));
                    let (x2, _) = px(*end);
                    let y = y1 + 6.0 * lane as f64;
                    let _ = writeln!(
                        svg,
                        r#"    <line x1="{x1:.3}" y1="{y:.3}" x2="{x2:.3}" y2="{y:.3}" stroke="{color}" stroke-width="5"/>"#
                    );
                }
                (_, Object::Segment(a, b)) => line(&mut svg, *a, *b, "#444444", 1.5, None),
                _ => {}
            },
            StepKind::TransferDistance => {
                let r = norm(sub(p(&step.inputs[1]), p(&step.inputs[0])));
                circle(&mut svg, p(&step.inputs[2]), r);
            }
            StepKind::RotateSegmentClockwise90 | StepKind::RotateSegmentToRay | StepKind::ErectPerpendicular => {
                let c = p(&step.inputs[0]);
                if let Object::Point(end) = obj {
                    circle(&mut svg, c, norm(sub(*end, c)));
                    line(&mut svg, c, *end, "#444444", 1.5, None);
                }
            }
            StepKind::ParallelThroughPoint => {
                if let Object::Line { through, dir } = obj {
                    let d = scale_to(*dir, 2.0 * span);
                    line(&mut svg, sub(*through, d), add(*through, d), "#8c564b", 1.2, Some("8,3"));
                }
            }
            _ => {}
        }
        if let Object::Point(at) = obj {
            let (x, y) = px(*at);
            let is_result = *label == t.result_label;
            let (r, fill) = if is_result { (7.0, "#e6007e") } else { (3.5, "black") };
            let _ = writeln!(svg, r#"    <circle cx="{x:.3}" cy="{y:.3}" r="{r}" fill="{fill}"/>"#);
            let weight = if is_result { r#" font-weight="bold""# } else { "" };
            let _ = writeln!(
                svg,
                r#"    <text x="{:.3}" y="{:.3}" font-family="sans-serif" font-size="18"{weight}>{}</text>"#,
                x + 6.0,
                y - 6.0,
                xml_escape(label)
            );
        }
        let _ = writeln!(svg, "  </g>");
    }

    // legend
    let _ = writeln!(svg, r#"  <g id="legend" font-family="sans-serif" font-size="14">"#);
    let names = ["c1: u1", "c2: v1", "c3: u2", "c4: v2"];
    for (i, name) in names.iter().enumerate() {
        let y = 20.0 + 20.0 * i as f64;
        let len = t
            .steps
            .iter()
            .find(|st| st.color == Some(i as u8 + 1))
            .and_then(|st| st.length)
            .map(|l| format!(" = {l}"))
            .unwrap_or_default();
        let _ = writeln!(
            svg,
            r#"    <line x1="10" y1="{y}" x2="40" y2="{y}" stroke="{}" stroke-width="5"/><text x="48" y="{:.1}">{name}{len}</text>"#,
            PENCILS[i],
            y + 5.0
        );
    }
    let _ = writeln!(svg, r#"    <text x="10" y="105">unit = {scale:.3} px</text>"#);
    let _ = writeln!(svg, "  </g>");
    let _ = writeln!(svg, "</svg>");
    Ok(svg)
}

fn scale_to(v: [f64; 2], len: f64) -> [f64; 2] {
    scale(v, len / norm(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn result(u1: i64, v1: i64, u2: i64, v2: i64) -> (f64, f64) {
        let p = evaluate_trace(&plan_quotient_construction(u1, v1, u2, v2).unwrap()).unwrap();
        (p.x, p.y)
    }

    fn close(a: (f64, f64), b: (f64, f64)) -> bool {
        (a.0 - b.0).abs() <= 1e-9 && (a.1 - b.1).abs() <= 1e-9
    }

    #[test]
    fn named_cases() {
        assert!(close(result(0, -1, 1, 0), (0.0, 1.0)));
        assert!(close(result(1, 0, 1, 0), (1.0, 0.0)));
        assert!(close(result(8, 0, 0, 8), (0.0, 1.0)));
        assert!(close(result(-1, -1, 0, -2), (0.5, 0.5)));
    }

    #[test]
    fn degenerate_numerators_and_real_quotients() {
        assert!(close(result(0, 0, 3, -4), (0.0, 0.0)));
        assert!(close(result(6, 0, 3, 0), (2.0, 0.0)));
        assert!(close(result(-6, 2, 3, -1), (-2.0, 0.0)));
    }

    #[test]
    fn zero_denominator() {
        assert_eq!(plan_quotient_construction(1, 2, 0, 0), Err(GeometryError::ZeroDenominator));
    }

    #[test]
    fn trace_is_topologically_ordered() {
        let t = plan_quotient_construction(3, -2, 5, 7).unwrap();
        let mut seen = std::collections::HashSet::new();
        for step in &t.steps {
            for input in &step.inputs {
                assert!(seen.contains(input.as_str()), "{input} used before definition");
            }
            assert!(seen.insert(step.output.as_str()));
        }
        assert_eq!(t.steps.last().unwrap().output, t.result_label);
        let colors: Vec<u8> = t.steps.iter().filter_map(|s| s.color).collect();
        assert_eq!(colors, [1, 2, 3, 4]);
    }

    #[test]
    fn malformed_traces() {
        let mut t = plan_quotient_construction(1, 2, 3, 4).unwrap();
        t.steps[5].inputs[0] = "Z".into();
        assert!(matches!(evaluate_trace(&t), Err(GeometryError::MalformedTrace { step: 5, .. })));

        let parallel = ConstructionTrace {
            steps: vec![
                ConstructionStep::new(StepKind::PlacePoint, &[], "A"),
                ConstructionStep::new(StepKind::MarkUnit, &["A"], "U"),
                ConstructionStep::lay("U", "V", 2, 1),
                ConstructionStep::new(StepKind::ParallelThroughPoint, &["A", "U", "U"], "l"),
                ConstructionStep::new(StepKind::MarkIntersection, &["l", "A", "V"], "R"),
            ],
            result_label: "R".into(),
        };
        assert!(matches!(evaluate_trace(&parallel), Err(GeometryError::MalformedTrace { step: 4, .. })));

        let mut dup = plan_quotient_construction(1, 2, 3, 4).unwrap();
        dup.steps[2].output = "A".into();
        assert!(evaluate_trace(&dup).is_err());
    }

    #[test]
    fn trace_json_round_trip() {
        let t = plan_quotient_construction(-4, 7, 2, -9).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains(r#""kind":"ROTATE_SEGMENT_CLOCKWISE_90""#));
        let back: ConstructionTrace = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn svg_is_well_formed_and_labeled() {
        let t = plan_quotient_construction(0, -1, 1, 0).unwrap();
        let svg = render_svg(&t, &SvgOptions::default()).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let labels: Vec<&str> = doc.descendants().filter(|n| n.has_tag_name("text")).filter_map(|n| n.text()).collect();
        for want in ["A", "B", "C′", "E″", "U", "R"] {
            assert!(labels.contains(&want), "missing {want}");
        }
        let layers = doc.descendants().filter(|n| n.attribute("id").is_some_and(|id| id.starts_with("step-"))).count();
        assert_eq!(layers, t.steps.len());
        assert_eq!(svg, render_svg(&t, &SvgOptions::default()).unwrap());
    }

    #[test]
    fn rotation_macros_are_sound() {
        let t = plan_quotient_construction(5, -3, -2, 7).unwrap();
        let objs: HashMap<String, Object> = evaluate_objects(&t).unwrap().into_iter().collect();
        let pt = |l: &str| match objs[l] {
            Object::Point(p) => p,
            _ => panic!(),
        };
        let before = norm(sub(pt("C"), pt("B")));
        let after = norm(sub(pt("C′"), pt("B")));
        assert!((before - after).abs() <= 1e-12 * before.max(1.0));
        assert!(dot(sub(pt("C′"), pt("B")), sub(pt("C"), pt("B"))).abs() <= 1e-12);
        let Object::Line { dir, .. } = objs["l"] else { panic!() };
        let reference = sub(pt("C″"), pt("E″"));
        let angle = cross(dir, reference) / (norm(dir) * norm(reference));
        assert!(angle.abs() <= 1e-12);
    }

    proptest! {
        #[test]
        fn geometry_matches_algebra(u1 in -60i64..60, v1 in -60i64..60, u2 in -60i64..60, v2 in -60i64..60) {
            prop_assume!(u2 != 0 || v2 != 0);
            let q = crate::numeric::gauss_divide(
                &crate::numeric::GaussInt::new(u1, -v1),
                &crate::numeric::GaussInt::new(u2, -v2),
            ).unwrap().to_float();
            let (x, y) = result(u1, v1, u2, v2);
            let tol = 1e-9 * q.norm().max(1.0);
            prop_assert!((x - q.re).hypot(y - q.im) <= tol, "({x}, {y}) vs {q}");
        }

        #[test]
        fn scaling_inputs_leaves_result(u1 in -30i64..30, v1 in -30i64..30, u2 in -30i64..30, v2 in -30i64..30, k in 2i64..20) {
            prop_assume!(u2 != 0 || v2 != 0);
            let a = result(u1, v1, u2, v2);
            let b = result(k * u1, k * v1, k * u2, k * v2);
            let tol = 1e-9 * a.0.hypot(a.1).max(1.0);
            prop_assert!((a.0 - b.0).hypot(a.1 - b.1) <= tol);
        }
    }
}
