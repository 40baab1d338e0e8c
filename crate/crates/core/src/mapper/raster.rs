//! Software rasterizer for spatial structures.
//!
//! Each primitive is projected through a pinhole camera to a flat
//! silhouette and filled with one colour. Primitives are painted back to
//! front. All projected coordinates are rounded half away from zero to whole
//! pixels before any coverage test, and coverage itself is integer
//! arithmetic, so output bytes are stable.

use super::color::hsv_to_rgb;
use super::{Camera, MapError, Primitive, Shape, SpatialStructure};
use crate::config::MappingConfig;
use crate::image::{blend_over, vertical_gradient, RgbaImage};

type Vec3 = [f64; 3];

/// Points closer than this along the view axis are culled.
const NEAR_PLANE: f64 = 0.05;
const RIBBON_SEGMENTS: usize = 4;
/// Vertical wave offsets of the ribbon spine, in half-thickness units.
const RIBBON_WAVE: [i64; RIBBON_SEGMENTS + 1] = [0, -2, 0, 2, 0];

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(a: Vec3) -> Option<Vec3> {
    let len = dot(a, a).sqrt();
    (len > 1e-12).then(|| [a[0] / len, a[1] / len, a[2] / len])
}

fn round_px(v: f64) -> i64 {
    // f64::round is half away from zero.
    v.round() as i64
}

/// Fill colour of a primitive.
pub fn primitive_rgb(p: &Primitive) -> [u8; 3] {
    hsv_to_rgb(p.hue_deg, 0.55, 0.85)
}

/// 8-bit alpha of a primitive.
pub fn primitive_alpha(p: &Primitive) -> u8 {
    (p.alpha.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Camera basis and screen mapping for one canvas size.
#[derive(Debug, Clone, Copy)]
pub struct Projector {
    eye: Vec3,
    right: Vec3,
    up: Vec3,
    forward: Vec3,
    focal: f64,
    half_w: f64,
    half_h: f64,
}

impl Projector {
    pub fn new(camera: &Camera, width: u32, height: u32) -> Result<Self, MapError> {
        let forward = normalize(sub(camera.look_at, camera.eye)).ok_or(MapError::DegenerateCamera)?;
        let right = normalize(cross([0.0, 1.0, 0.0], forward))
            .or_else(|| normalize(cross([0.0, 0.0, 1.0], forward)))
            .ok_or(MapError::DegenerateCamera)?;
        let up = cross(forward, right);
        let half_h = f64::from(height) / 2.0;
        let half_fov = camera.vertical_fov_deg.to_radians() / 2.0;
        Ok(Projector {
            eye: camera.eye,
            right,
            up,
            forward,
            focal: half_h / half_fov.tan(),
            half_w: f64::from(width) / 2.0,
            half_h,
        })
    }

    /// Screen position and view depth of a world point.
    fn project(&self, p: Vec3) -> Option<(f64, f64, f64)> {
        let d = sub(p, self.eye);
        let depth = dot(d, self.forward);
        if depth < NEAR_PLANE {
            return None;
        }
        let sx = self.half_w + self.focal * dot(d, self.right) / depth;
        let sy = self.half_h - self.focal * dot(d, self.up) / depth;
        Some((sx, sy, depth))
    }

    /// Flat silhouette of a primitive, or `None` when it is behind the camera.
    pub fn silhouette(&self, p: &Primitive) -> Option<Silhouette> {
        let (sx, sy, depth) = self.project(p.center)?;
        let hw = self.focal * p.scale[0] / 2.0 / depth;
        let hh = self.focal * p.scale[1] / 2.0 / depth;
        let cx = round_px(sx);
        let cy = round_px(sy);
        Some(match p.shape {
            Shape::Slab | Shape::Column => {
                let x0 = round_px(sx - hw);
                let y0 = round_px(sy - hh);
                Silhouette::Rect {
                    x0,
                    y0,
                    x1: round_px(sx + hw).max(x0 + 1),
                    y1: round_px(sy + hh).max(y0 + 1),
                }
            }
            Shape::Sphere => Silhouette::Ellipse {
                cx,
                cy,
                rx: round_px(hw).max(1),
                ry: round_px(hh).max(1),
            },
            Shape::Ribbon => {
                let half_t = round_px(hh).max(1);
                let left = round_px(sx - hw);
                let right = round_px(sx + hw).max(left + RIBBON_SEGMENTS as i64);
                let spine: Vec<(i64, i64)> = (0..=RIBBON_SEGMENTS)
                    .map(|i| {
                        let x = left + (right - left) * i as i64 / RIBBON_SEGMENTS as i64;
                        (x, cy + RIBBON_WAVE[i] * half_t)
                    })
                    .collect();
                let quads = spine
                    .windows(2)
                    .map(|w| {
                        let ((xa, ya), (xb, yb)) = (w[0], w[1]);
                        [(xa, ya - half_t), (xb, yb - half_t), (xb, yb + half_t), (xa, ya + half_t)]
                    })
                    .collect();
                Silhouette::Strip { quads }
            }
        })
    }
}

/// Projected 2D outline in pixel coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Silhouette {
    /// Half-open: covers `x0 <= x < x1`, `y0 <= y < y1`.
    Rect { x0: i64, y0: i64, x1: i64, y1: i64 },
    Ellipse { cx: i64, cy: i64, rx: i64, ry: i64 },
    /// Convex quads, clockwise on screen.
    Strip { quads: Vec<[(i64, i64); 4]> },
}

fn in_convex_quad(q: &[(i64, i64); 4], x: i64, y: i64) -> bool {
    let mut sign = 0i64;
    for i in 0..4 {
        let (ax, ay) = q[i];
        let (bx, by) = q[(i + 1) % 4];
        let c = (bx - ax) * (y - ay) - (by - ay) * (x - ax);
        if c != 0 {
            if sign != 0 && c.signum() != sign {
                return false;
            }
            sign = c.signum();
        }
    }
    true
}

impl Silhouette {
    pub fn covers(&self, x: i64, y: i64) -> bool {
        match self {
            Silhouette::Rect { x0, y0, x1, y1 } => (*x0..*x1).contains(&x) && (*y0..*y1).contains(&y),
            Silhouette::Ellipse { cx, cy, rx, ry } => {
                let (dx, dy) = (i128::from(x - cx), i128::from(y - cy));
                let (rx, ry) = (i128::from(*rx), i128::from(*ry));
                dx * dx * ry * ry + dy * dy * rx * rx <= rx * rx * ry * ry
            }
            Silhouette::Strip { quads } => quads.iter().any(|q| in_convex_quad(q, x, y)),
        }
    }

    /// Inclusive bounding box `(x0, y0, x1, y1)`.
    pub fn bounds(&self) -> (i64, i64, i64, i64) {
        match self {
            Silhouette::Rect { x0, y0, x1, y1 } => (*x0, *y0, x1 - 1, y1 - 1),
            Silhouette::Ellipse { cx, cy, rx, ry } => (cx - rx, cy - ry, cx + rx, cy + ry),
            Silhouette::Strip { quads } => quads.iter().flatten().fold(
                (i64::MAX, i64::MAX, i64::MIN, i64::MIN),
                |(a, b, c, d), &(x, y)| (a.min(x), b.min(y), c.max(x), d.max(y)),
            ),
        }
    }
}

/// Two-stop vertical gradient from the palette seed.
pub(crate) fn background(palette_seed: u64, width: u32, height: u32) -> RgbaImage {
    let hue = (palette_seed % 360) as f64;
    let top = hsv_to_rgb(hue, 0.10, 0.96);
    let bottom = hsv_to_rgb((hue + 40.0) % 360.0, 0.22, 0.80);
    vertical_gradient(top, bottom, width, height)
}

fn distance(a: Vec3, b: Vec3) -> f64 {
    let d = sub(a, b);
    dot(d, d).sqrt()
}

/// Painter's order: farthest first, equal distances by ascending token index.
pub(crate) fn paint_order(structure: &SpatialStructure) -> Vec<&Primitive> {
    let eye = structure.camera.eye;
    let mut order: Vec<&Primitive> = structure.primitives.iter().collect();
    order.sort_by(|a, b| {
        distance(b.center, eye)
            .total_cmp(&distance(a.center, eye))
            .then(a.source_token_index.cmp(&b.source_token_index))
    });
    order
}

/// Render a structure at the configured panel size.
pub fn rasterize(structure: &SpatialStructure, config: &MappingConfig) -> Result<RgbaImage, MapError> {
    let (w, h) = (config.panel_width_px, config.panel_height_px);
    let projector = Projector::new(&structure.camera, w, h)?;
    let mut img = background(structure.palette_seed, w, h);
    for prim in paint_order(structure) {
        let Some(sil) = projector.silhouette(prim) else {
            continue;
        };
        let rgb = primitive_rgb(prim);
        let alpha = primitive_alpha(prim);
        let (bx0, by0, bx1, by1) = sil.bounds();
        let x_lo = bx0.max(0);
        let y_lo = by0.max(0);
        let x_hi = bx1.min(i64::from(w) - 1);
        let y_hi = by1.min(i64::from(h) - 1);
        for y in y_lo..=y_hi {
            for x in x_lo..=x_hi {
                if sil.covers(x, y) {
                    let (ux, uy) = (x as u32, y as u32);
                    img.put(ux, uy, blend_over(img.get(ux, uy), rgb, alpha));
                }
            }
        }
    }
    Ok(img)
}
