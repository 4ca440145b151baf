//! Exact integrals of P0/P1 fields over the domain and over axis-aligned
//! squares.

use super::{check_cells, check_nodes, FieldKind, Result, StructuredMesh};

type Point = [f64; 2];

/// Clips a convex polygon against the half-plane `f(p) ≥ 0` where f is affine.
fn clip(poly: &[Point], f: impl Fn(Point) -> f64) -> Vec<Point> {
    let mut out = Vec::with_capacity(poly.len() + 2);
    for k in 0..poly.len() {
        let (a, b) = (poly[k], poly[(k + 1) % poly.len()]);
        let (fa, fb) = (f(a), f(b));
        if fa >= 0.0 {
            out.push(a);
        }
        if (fa >= 0.0) != (fb >= 0.0) {
            let t = fa / (fa - fb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Area and centroid of a simple polygon.
fn area_centroid(poly: &[Point]) -> (f64, Point) {
    if poly.len() < 3 {
        return (0.0, [0.0, 0.0]);
    }
    let (mut a, mut cx, mut cy) = (0.0, 0.0, 0.0);
    for k in 0..poly.len() {
        let (p, q) = (poly[k], poly[(k + 1) % poly.len()]);
        let cr = p[0] * q[1] - q[0] * p[1];
        a += cr;
        cx += (p[0] + q[0]) * cr;
        cy += (p[1] + q[1]) * cr;
    }
    if a == 0.0 {
        return (0.0, [0.0, 0.0]);
    }
    (0.5 * a, [cx / (3.0 * a), cy / (3.0 * a)])
}

/// Value at `p` of the affine function with vertex values `vals` on `tri`.
fn affine_at(tri: &[Point; 3], vals: [f64; 3], p: Point) -> f64 {
    let det = (tri[1][0] - tri[0][0]) * (tri[2][1] - tri[0][1]) - (tri[2][0] - tri[0][0]) * (tri[1][1] - tri[0][1]);
    let l1 = ((p[0] - tri[0][0]) * (tri[2][1] - tri[0][1]) - (tri[2][0] - tri[0][0]) * (p[1] - tri[0][1])) / det;
    let l2 = ((tri[1][0] - tri[0][0]) * (p[1] - tri[0][1]) - (p[0] - tri[0][0]) * (tri[1][1] - tri[0][1])) / det;
    (1.0 - l1 - l2) * vals[0] + l1 * vals[1] + l2 * vals[2]
}

fn clip_to_square(tri: &[Point; 3], center: Point, half: f64) -> Vec<Point> {
    let mut poly = tri.to_vec();
    poly = clip(&poly, |p| p[0] - (center[0] - half));
    poly = clip(&poly, |p| (center[0] + half) - p[0]);
    poly = clip(&poly, |p| p[1] - (center[1] - half));
    clip(&poly, |p| (center[1] + half) - p[1])
}

/// Area-weighted mean of a field over the axis-aligned square of side
/// `width` centred at `center`. If the field takes a single value on every
/// triangle meeting the square, that value is returned exactly.
pub fn square_mean(mesh: &StructuredMesh, kind: FieldKind, field: &[f64], center: Point, width: f64) -> Result<f64> {
    match kind {
        FieldKind::P0 => check_cells(mesh, field)?,
        FieldKind::P1 => check_nodes(mesh, field)?,
    }
    let half = 0.5 * width;
    let mut total = 0.0;
    let mut area = 0.0;
    let mut common: Option<f64> = None;
    let mut uniform = true;
    for t in 0..mesh.num_cells() {
        let tri = mesh.vertices(t);
        let xmin = tri.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let xmax = tri.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        let ymin = tri.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
        let ymax = tri.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
        if xmax <= center[0] - half || xmin >= center[0] + half || ymax <= center[1] - half || ymin >= center[1] + half
        {
            continue;
        }
        let poly = clip_to_square(&tri, center, half);
        let (a, c) = area_centroid(&poly);
        if a <= 0.0 {
            continue;
        }
        let (value, vals) = match kind {
            FieldKind::P0 => (field[t], [field[t]; 3]),
            FieldKind::P1 => {
                let ids = mesh.triangle(t);
                let vals = [field[ids[0]], field[ids[1]], field[ids[2]]];
                (affine_at(&tri, vals, c), vals)
            }
        };
        for v in vals {
            match common {
                None => common = Some(v),
                Some(cv) if cv != v => uniform = false,
                _ => {}
            }
        }
        total += a * value;
        area += a;
    }
    if uniform {
        if let Some(v) = common {
            return Ok(v);
        }
    }
    Ok(if area > 0.0 { total / area } else { 0.0 })
}

/// ∫_Ω |f| dx, exact for P0 and P1 fields.
pub fn l1_norm(mesh: &StructuredMesh, kind: FieldKind, field: &[f64]) -> Result<f64> {
    match kind {
        FieldKind::P0 => {
            check_cells(mesh, field)?;
            Ok(field.iter().map(|v| v.abs()).sum::<f64>() * mesh.cell_area())
        }
        FieldKind::P1 => {
            check_nodes(mesh, field)?;
            let mut total = 0.0;
            for t in 0..mesh.num_cells() {
                let ids = mesh.triangle(t);
                let vals = [field[ids[0]], field[ids[1]], field[ids[2]]];
                total += abs_integral_affine(&mesh.vertices(t), vals, mesh.cell_area());
            }
            Ok(total)
        }
    }
}

/// ∫_T |f| for affine f, splitting T along the zero level line.
fn abs_integral_affine(tri: &[Point; 3], vals: [f64; 3], area: f64) -> f64 {
    if vals.iter().all(|&v| v >= 0.0) || vals.iter().all(|&v| v <= 0.0) {
        return area * (vals[0] + vals[1] + vals[2]).abs() / 3.0;
    }
    let f = |p: Point| affine_at(tri, vals, p);
    let mut total = 0.0;
    for sign in [1.0, -1.0] {
        let poly = clip(tri, |p| sign * f(p));
        let (a, c) = area_centroid(&poly);
        total += a * (sign * f(c)).max(0.0);
    }
    total
}
