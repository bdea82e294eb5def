//! Procedural renderer for the synthetic shape dataset: flat-shaded 3-D
//! primitives rasterized with the painter's algorithm, camera orbiting a
//! single centered, stationary object.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::encoder::GrayFrame;
use crate::error::{Error, Result};
use crate::seed::mix_seeds;

/// The six object classes of the synthetic dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeClass {
    Cone,
    Cube,
    Cylinder,
    Sphere,
    Torus,
    Cross,
}

impl ShapeClass {
    pub const ALL: [ShapeClass; 6] = [
        ShapeClass::Cone,
        ShapeClass::Cube,
        ShapeClass::Cylinder,
        ShapeClass::Sphere,
        ShapeClass::Torus,
        ShapeClass::Cross,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ShapeClass::Cone => "cone",
            ShapeClass::Cube => "cube",
            ShapeClass::Cylinder => "cylinder",
            ShapeClass::Sphere => "sphere",
            ShapeClass::Torus => "torus",
            ShapeClass::Cross => "cross",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::input(format!("unknown shape class '{name}'")))
    }

    fn index(&self) -> u64 {
        Self::ALL.iter().position(|c| c == self).unwrap() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Vec3 {
    x: f64,
    y: f64,
    z: f64,
}

fn v(x: f64, y: f64, z: f64) -> Vec3 {
    Vec3 { x, y, z }
}

impl Vec3 {
    fn add(self, o: Vec3) -> Vec3 {
        v(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    fn sub(self, o: Vec3) -> Vec3 {
        v(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    fn scale(self, s: f64) -> Vec3 {
        v(self.x * s, self.y * s, self.z * s)
    }

    fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    fn cross(self, o: Vec3) -> Vec3 {
        v(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    fn normalize(self) -> Vec3 {
        let len = self.dot(self).sqrt();
        self.scale(1.0 / len)
    }
}

type Triangle = [Vec3; 3];

const SEGMENTS: usize = 36;
const STACKS: usize = 18;

/// Triangle mesh of a primitive, centered at the origin and sized so that
/// every class projects to a comparable silhouette.
fn shape_mesh(class: ShapeClass) -> Vec<Triangle> {
    match class {
        ShapeClass::Cone => cone_mesh(0.85, 1.7, SEGMENTS),
        ShapeClass::Cube => box_mesh(v(0.0, 0.0, 0.0), v(0.65, 0.65, 0.65)),
        ShapeClass::Cylinder => cylinder_mesh(0.6, 1.5, SEGMENTS),
        ShapeClass::Sphere => sphere_mesh(0.95, SEGMENTS, STACKS),
        ShapeClass::Torus => torus_mesh(0.72, 0.34, SEGMENTS, STACKS),
        ShapeClass::Cross => cross_mesh(0.8, 0.22),
    }
}

fn box_mesh(center: Vec3, half: Vec3) -> Vec<Triangle> {
    let corner = |sx: f64, sy: f64, sz: f64| {
        v(
            center.x + sx * half.x,
            center.y + sy * half.y,
            center.z + sz * half.z,
        )
    };
    // 8 corners, bit i: (x, y, z) sign
    let c: Vec<Vec3> = (0..8)
        .map(|i| {
            corner(
                if i & 1 == 0 { -1.0 } else { 1.0 },
                if i & 2 == 0 { -1.0 } else { 1.0 },
                if i & 4 == 0 { -1.0 } else { 1.0 },
            )
        })
        .collect();
    let quads = [
        [0, 2, 3, 1], // z-
        [4, 5, 7, 6], // z+
        [0, 1, 5, 4], // y-
        [2, 6, 7, 3], // y+
        [0, 4, 6, 2], // x-
        [1, 3, 7, 5], // x+
    ];
    let mut tris = Vec::with_capacity(12);
    for q in quads {
        tris.push([c[q[0]], c[q[1]], c[q[2]]]);
        tris.push([c[q[0]], c[q[2]], c[q[3]]]);
    }
    tris
}

fn ring_point(radius: f64, angle: f64, z: f64) -> Vec3 {
    v(radius * angle.cos(), radius * angle.sin(), z)
}

fn cone_mesh(radius: f64, height: f64, segments: usize) -> Vec<Triangle> {
    let apex = v(0.0, 0.0, height / 2.0);
    let base_z = -height / 2.0;
    let base_center = v(0.0, 0.0, base_z);
    let step = std::f64::consts::TAU / segments as f64;
    let mut tris = Vec::with_capacity(segments * 2);
    for i in 0..segments {
        let a0 = ring_point(radius, i as f64 * step, base_z);
        let a1 = ring_point(radius, (i + 1) as f64 * step, base_z);
        tris.push([apex, a0, a1]);
        tris.push([base_center, a1, a0]);
    }
    tris
}

fn cylinder_mesh(radius: f64, height: f64, segments: usize) -> Vec<Triangle> {
    let (top, bottom) = (height / 2.0, -height / 2.0);
    let step = std::f64::consts::TAU / segments as f64;
    let mut tris = Vec::with_capacity(segments * 4);
    for i in 0..segments {
        let (ang0, ang1) = (i as f64 * step, (i + 1) as f64 * step);
        let b0 = ring_point(radius, ang0, bottom);
        let b1 = ring_point(radius, ang1, bottom);
        let t0 = ring_point(radius, ang0, top);
        let t1 = ring_point(radius, ang1, top);
        tris.push([b0, b1, t1]);
        tris.push([b0, t1, t0]);
        tris.push([v(0.0, 0.0, top), t0, t1]);
        tris.push([v(0.0, 0.0, bottom), b1, b0]);
    }
    tris
}

fn sphere_mesh(radius: f64, slices: usize, stacks: usize) -> Vec<Triangle> {
    let point = |slice: usize, stack: usize| {
        let theta = std::f64::consts::PI * stack as f64 / stacks as f64; // 0..pi from +z
        let phi = std::f64::consts::TAU * slice as f64 / slices as f64;
        v(
            radius * theta.sin() * phi.cos(),
            radius * theta.sin() * phi.sin(),
            radius * theta.cos(),
        )
    };
    let mut tris = Vec::new();
    for stack in 0..stacks {
        for slice in 0..slices {
            let p00 = point(slice, stack);
            let p01 = point(slice, stack + 1);
            let p10 = point(slice + 1, stack);
            let p11 = point(slice + 1, stack + 1);
            if stack > 0 {
                tris.push([p00, p01, p11]);
            }
            if stack + 1 < stacks {
                tris.push([p00, p11, p10]);
            }
        }
    }
    tris
}

fn torus_mesh(major: f64, minor: f64, slices: usize, rings: usize) -> Vec<Triangle> {
    let point = |slice: usize, ring: usize| {
        let phi = std::f64::consts::TAU * slice as f64 / slices as f64;
        let theta = std::f64::consts::TAU * ring as f64 / rings as f64;
        let r = major + minor * theta.cos();
        v(r * phi.cos(), r * phi.sin(), minor * theta.sin())
    };
    let mut tris = Vec::with_capacity(slices * rings * 2);
    for slice in 0..slices {
        for ring in 0..rings {
            let p00 = point(slice, ring);
            let p01 = point(slice, ring + 1);
            let p10 = point(slice + 1, ring);
            let p11 = point(slice + 1, ring + 1);
            tris.push([p00, p01, p11]);
            tris.push([p00, p11, p10]);
        }
    }
    tris
}

/// Three orthogonal boxes; silhouette complexity comparable to an organic
/// mesh while staying dependency-free.
fn cross_mesh(arm_half_length: f64, arm_half_thickness: f64) -> Vec<Triangle> {
    let l = arm_half_length;
    let t = arm_half_thickness;
    let mut tris = box_mesh(v(0.0, 0.0, 0.0), v(l, t, t));
    tris.extend(box_mesh(v(0.0, 0.0, 0.0), v(t, l, t)));
    tris.extend(box_mesh(v(0.0, 0.0, 0.0), v(t, t, l)));
    tris
}

const CAMERA_DISTANCE: f64 = 3.2;
const VERTICAL_FOV_DEG: f64 = 40.0;
const AMBIENT: f64 = 0.25;
const LIGHT_DIR: Vec3 = Vec3 {
    x: 0.35,
    y: -0.5,
    z: 0.75,
};

/// Renders one frame of `class` from the given camera pose.
///
/// `azimuth_deg` orbits around the vertical axis, `elevation_deg` is the
/// camera height angle above the horizontal plane, `scale` multiplies the
/// mesh. Flat shading, one directional light, painter's-algorithm hidden
/// surface removal, dark background.
pub fn render_shape_frame(
    class: ShapeClass,
    azimuth_deg: f64,
    elevation_deg: f64,
    scale: f64,
    width: usize,
    height: usize,
) -> GrayFrame {
    let mesh: Vec<Triangle> = shape_mesh(class)
        .into_iter()
        .map(|t| [t[0].scale(scale), t[1].scale(scale), t[2].scale(scale)])
        .collect();

    let az = azimuth_deg.to_radians();
    let el = elevation_deg.to_radians();
    let cam = v(
        CAMERA_DISTANCE * el.cos() * az.cos(),
        CAMERA_DISTANCE * el.cos() * az.sin(),
        CAMERA_DISTANCE * el.sin(),
    );
    let forward = cam.scale(-1.0).normalize();
    let right = forward.cross(v(0.0, 0.0, 1.0)).normalize();
    let up = right.cross(forward);
    let focal = (height as f64 / 2.0) / (VERTICAL_FOV_DEG / 2.0).to_radians().tan();
    let light = LIGHT_DIR.normalize();

    // Project, shade and depth-sort (far first).
    struct Projected {
        depth: f64,
        screen: [(f64, f64); 3],
        shade: u8,
    }
    let mut projected: Vec<Projected> = Vec::with_capacity(mesh.len());
    for tri in &mesh {
        let centroid = tri[0].add(tri[1]).add(tri[2]).scale(1.0 / 3.0);
        let mut normal = tri[1].sub(tri[0]).cross(tri[2].sub(tri[0]));
        if normal.dot(normal) < 1e-18 {
            continue;
        }
        normal = normal.normalize();
        if normal.dot(cam.sub(centroid)) < 0.0 {
            normal = normal.scale(-1.0);
        }
        let shade_f = AMBIENT + (1.0 - AMBIENT) * normal.dot(light).max(0.0);
        let shade = (shade_f * 255.0).round().clamp(0.0, 255.0) as u8;

        let mut screen = [(0.0, 0.0); 3];
        let mut behind = false;
        for (i, p) in tri.iter().enumerate() {
            let rel = p.sub(cam);
            let depth = rel.dot(forward);
            if depth < 0.1 {
                behind = true;
                break;
            }
            screen[i] = (
                width as f64 / 2.0 + focal * rel.dot(right) / depth,
                height as f64 / 2.0 - focal * rel.dot(up) / depth,
            );
        }
        if behind {
            continue;
        }
        projected.push(Projected {
            depth: centroid.sub(cam).dot(forward),
            screen,
            shade,
        });
    }
    projected.sort_by(|a, b| b.depth.partial_cmp(&a.depth).unwrap());

    let mut frame = GrayFrame::filled(width, height, 0);
    for tri in &projected {
        fill_triangle(&mut frame, &tri.screen, tri.shade);
    }
    frame
}

fn fill_triangle(frame: &mut GrayFrame, screen: &[(f64, f64); 3], shade: u8) {
    let [(x0, y0), (mut x1, mut y1), (mut x2, mut y2)] = *screen;
    let mut area = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
    if area.abs() < 1e-12 {
        return;
    }
    if area < 0.0 {
        std::mem::swap(&mut x1, &mut x2);
        std::mem::swap(&mut y1, &mut y2);
        area = -area;
    }
    let _ = area;
    let min_x = x0.min(x1).min(x2).floor().max(0.0) as usize;
    let max_x = (x0.max(x1).max(x2).ceil() as isize).min(frame.width() as isize - 1);
    let min_y = y0.min(y1).min(y2).floor().max(0.0) as usize;
    let max_y = (y0.max(y1).max(y2).ceil() as isize).min(frame.height() as isize - 1);
    if max_x < min_x as isize || max_y < min_y as isize {
        return;
    }
    let edge = |ax: f64, ay: f64, bx: f64, by: f64, px: f64, py: f64| {
        (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    };
    for py in min_y..=max_y as usize {
        let cy = py as f64 + 0.5;
        for px in min_x..=max_x as usize {
            let cx = px as f64 + 0.5;
            if edge(x0, y0, x1, y1, cx, cy) >= 0.0
                && edge(x1, y1, x2, y2, cx, cy) >= 0.0
                && edge(x2, y2, x0, y0, cx, cy) >= 0.0
            {
                frame.set(px, py, shade);
            }
        }
    }
}

/// Per-instance camera-path jitter ranges.
const BASE_ELEVATION_DEG: f64 = 20.0;
const ELEVATION_JITTER_DEG: f64 = 15.0;
const SCALE_JITTER: f64 = 0.1;

/// Renders a full video: `frames_per_video` frames with the camera azimuth
/// advancing `360 / frames_per_video` degrees per frame at a fixed,
/// per-instance jittered elevation, scale and start azimuth. Deterministic
/// in `(class, instance_seed)`.
pub fn render_video(
    class: ShapeClass,
    instance_seed: u64,
    frames_per_video: usize,
    width: usize,
    height: usize,
) -> Vec<GrayFrame> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seeds(instance_seed, class.index()));
    let elevation =
        BASE_ELEVATION_DEG + rng.gen_range(-ELEVATION_JITTER_DEG..=ELEVATION_JITTER_DEG);
    let scale = 1.0 + rng.gen_range(-SCALE_JITTER..=SCALE_JITTER);
    let start_azimuth = rng.gen_range(0.0..360.0);
    let step = 360.0 / frames_per_video as f64;
    (0..frames_per_video)
        .map(|f| {
            let azimuth = start_azimuth + f as f64 * step;
            render_shape_frame(class, azimuth, elevation, scale, width, height)
        })
        .collect()
}
