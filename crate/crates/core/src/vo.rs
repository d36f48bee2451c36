//! Velocity-obstacle kernel: worst-case collision cones and the set of safe
//! headings a robot may take for one time step.
//!
//! The robot is assumed to travel at its top speed for the whole step and
//! every obstacle is inflated by how far it could move at its own top speed,
//! so the kernel needs obstacle positions only. Pruning is done on headings;
//! when no heading survives the only command left is to stop.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    angle_diff, normalize_angle, point_segment_distance, Arc, AngularIntervalSet, Vec2,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VoError {
    #[error("point lies inside the ball (distance {distance} <= radius {radius})")]
    InsideBall { distance: f64, radius: f64 },
    #[error("wall segment endpoints coincide")]
    DegenerateWall,
}

/// How a blocking obstacle's cone is shaped.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConeMode {
    /// Block the full tangent cone whenever the reach ball touches the
    /// inflated obstacle.
    Tangent,
    /// Block only headings whose top-speed path actually enters the inflated
    /// obstacle within one step. Never larger than `Tangent`.
    #[default]
    ReachLimited,
}

/// What the robot may do once it is already inside an obstacle's extended
/// ball.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InsideMode {
    /// Only the stationary set.
    Stop,
    /// Top-speed headings that outrun every such obstacle: the gap to it
    /// stays at least `r_i + r_R + v_i·t` for the whole step. Stops when
    /// none exist.
    #[default]
    Escape,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VoParams {
    pub cone: ConeMode,
    pub inside: InsideMode,
    /// Added to every obstacle's extended radius.
    pub safety_margin: f64,
    /// Clearance kept from wall segments; `None` uses the robot radius.
    pub wall_inflation: Option<f64>,
}

impl Default for VoParams {
    fn default() -> Self {
        Self {
            cone: ConeMode::default(),
            inside: InsideMode::default(),
            safety_margin: 0.0,
            wall_inflation: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VoRobot {
    pub position: Vec2,
    pub heading: f64,
    pub radius: f64,
    pub v_max: f64,
    pub omega_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VoObstacle {
    pub position: Vec2,
    pub radius: f64,
    pub v_max: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WallSegment {
    pub a: Vec2,
    pub b: Vec2,
}

impl WallSegment {
    pub fn new(a: Vec2, b: Vec2) -> Result<Self, VoError> {
        if a == b {
            return Err(VoError::DegenerateWall);
        }
        Ok(Self { a, b })
    }
}

/// Safe commands for one step: any heading in `headings` at any speed in
/// `speed_range`. Empty headings always pair with the range `[0, 0]`; a
/// `[0, 0]` range with headings means "stop, turning toward these".
#[derive(Clone, Debug, PartialEq)]
pub struct SafeVelocitySet {
    pub headings: AngularIntervalSet,
    pub speed_range: (f64, f64),
}

impl SafeVelocitySet {
    pub fn stationary() -> Self {
        Self {
            headings: AngularIntervalSet::empty(),
            speed_range: (0.0, 0.0),
        }
    }

    pub fn is_stationary(&self) -> bool {
        self.headings.is_empty()
    }

    /// Headings the robot may actually travel along.
    pub fn moving_headings(&self) -> AngularIntervalSet {
        if self.speed_range.1 > 0.0 {
            self.headings.clone()
        } else {
            AngularIntervalSet::empty()
        }
    }

    pub fn admits_speed(&self, speed: f64) -> bool {
        speed >= self.speed_range.0 - 1e-12 && speed <= self.speed_range.1 + 1e-12
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Blocking {
    NoBlock,
    Blocked(Arc),
    Inside,
}

/// Reach of the robot in one step and the obstacle radius grown by both
/// bodies and the obstacle's worst-case travel.
pub fn extended_radii(
    robot_vmax: f64,
    obstacle_radius: f64,
    robot_radius: f64,
    obstacle_vmax: f64,
    t_s: f64,
) -> (f64, f64) {
    (
        robot_vmax * t_s,
        obstacle_radius + robot_radius + obstacle_vmax * t_s,
    )
}

/// Headings from `from` whose rays hit the open ball around `center`.
pub fn tangent_arc(from: Vec2, center: Vec2, radius: f64) -> Result<Arc, VoError> {
    let offset = center - from;
    let distance = offset.norm();
    if distance <= radius {
        return Err(VoError::InsideBall { distance, radius });
    }
    let half_width = (radius / distance).clamp(0.0, 1.0).asin();
    Ok(Arc::centered(offset.angle(), half_width))
}

/// Headings from the robot's current kinematic window: `heading ± ω·t_s`.
pub fn kinematic_arc(heading: f64, omega_max: f64, t_s: f64) -> Arc {
    let half = omega_max * t_s;
    if 2.0 * half >= std::f64::consts::TAU {
        Arc::full()
    } else {
        Arc::centered(heading, half)
    }
}

/// Headings along which a robot moving at `robot_speed` keeps
/// `|p(t) - o| >= clearance + obstacle_speed·t` for all `t` in `[0, t_s]`
/// against an obstacle at `obstacle`. The binding time is
/// `sqrt((d² - c²) / (v² - w²))` clipped to the step, or the step end when
/// the obstacle is at least as fast.
pub fn escape_headings(
    robot: Vec2,
    obstacle: Vec2,
    clearance: f64,
    obstacle_speed: f64,
    robot_speed: f64,
    t_s: f64,
) -> AngularIntervalSet {
    let away = robot - obstacle;
    let d = away.norm();
    let (v, w, c) = (robot_speed, obstacle_speed, clearance);
    if d < c || d == 0.0 || v <= 0.0 {
        return AngularIntervalSet::empty();
    }
    let slack = d * d - c * c;
    let speed_gap = v * v - w * w;
    let t = if speed_gap > 0.0 { (slack / speed_gap).sqrt().min(t_s) } else { t_s };
    // Least admissible projection of the unit heading on `away`, times d.
    let min_proj = if t > 0.0 {
        -slack / (2.0 * v * t) + c * w / v - speed_gap * t / (2.0 * v)
    } else {
        c * w / v
    };
    if min_proj > d {
        AngularIntervalSet::empty()
    } else if min_proj <= -d {
        AngularIntervalSet::full()
    } else {
        AngularIntervalSet::from_arc(Arc::centered(away.angle(), (min_proj / d).acos()))
    }
}

pub fn blocked_arc_obstacle(
    robot: Vec2,
    obstacle: Vec2,
    r1: f64,
    r2: f64,
    mode: ConeMode,
) -> Blocking {
    let distance = robot.distance(obstacle);
    if distance <= r2 {
        return Blocking::Inside;
    }
    if distance > r1 + r2 {
        return Blocking::NoBlock;
    }
    match mode {
        ConeMode::Tangent => match tangent_arc(robot, obstacle, r2) {
            Ok(arc) => Blocking::Blocked(arc),
            Err(_) => Blocking::Inside,
        },
        ConeMode::ReachLimited => reachable_capsule_arc(robot, obstacle, obstacle, r2, r1)
            .map_or(Blocking::NoBlock, Blocking::Blocked),
    }
}

/// Cone of a wall segment kept at `inflate` clearance. `reach` covers the
/// robot's travel plus the clearance, so the robot path checked is
/// `reach - inflate` long.
pub fn blocked_arc_wall(
    robot: Vec2,
    wall: &WallSegment,
    reach: f64,
    inflate: f64,
    mode: ConeMode,
) -> Result<Blocking, VoError> {
    if wall.a == wall.b {
        return Err(VoError::DegenerateWall);
    }
    let distance = point_segment_distance(robot, wall.a, wall.b);
    if distance <= inflate {
        return Ok(Blocking::Blocked(Arc::full()));
    }
    if distance > reach {
        return Ok(Blocking::NoBlock);
    }
    let arc = match mode {
        ConeMode::Tangent => Some(capsule_hull_arc(robot, wall.a, wall.b, inflate, distance)),
        ConeMode::ReachLimited => {
            reachable_capsule_arc(robot, wall.a, wall.b, inflate, (reach - inflate).max(0.0))
        }
    };
    Ok(arc.map_or(Blocking::NoBlock, Blocking::Blocked))
}

/// Bearings from `p` to every point of the capsule `[a, b] ⊕ radius`,
/// ignoring how far away the points are.
fn capsule_hull_arc(p: Vec2, a: Vec2, b: Vec2, radius: f64, seg_distance: f64) -> Arc {
    let margin = (radius / seg_distance).clamp(0.0, 1.0).asin();
    let reference = (closest_point(p, a, b) - p).angle();
    let ra = angle_diff((a - p).angle(), reference);
    let rb = angle_diff((b - p).angle(), reference);
    let lo = ra.min(rb) - margin;
    let hi = ra.max(rb) + margin;
    Arc::new(reference + lo, hi - lo)
}

fn closest_point(p: Vec2, a: Vec2, b: Vec2) -> Vec2 {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return a;
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    a + ab * t
}

/// Exact bearing interval of `capsule([a, b], radius) ∩ ball(p, len)`, i.e.
/// the headings whose path of length `len` from `p` meets the capsule.
/// `p` must lie outside the capsule. Returns `None` when the path cannot
/// reach it.
fn reachable_capsule_arc(p: Vec2, a: Vec2, b: Vec2, radius: f64, len: f64) -> Option<Arc> {
    let closest = closest_point(p, a, b);
    let seg_distance = p.distance(closest);
    if seg_distance - radius >= len || seg_distance <= radius {
        return None;
    }
    let reference = (closest - p).angle();
    let len_sq = len * len;
    let mut lo = 0.0_f64;
    let mut hi = 0.0_f64;
    let mut consider = |q: Vec2| {
        let rel = angle_diff((q - p).angle(), reference);
        lo = lo.min(rel);
        hi = hi.max(rel);
    };

    // End caps: tangent points within reach and crossings with the reach circle.
    for c in [a, b] {
        let dc = p.distance(c);
        let tangent_len_sq = dc * dc - radius * radius;
        if tangent_len_sq <= len_sq {
            let bearing = (c - p).angle();
            let half = (radius / dc).clamp(0.0, 1.0).asin();
            let t = tangent_len_sq.max(0.0).sqrt();
            consider(p + Vec2::from_angle(bearing - half) * t);
            consider(p + Vec2::from_angle(bearing + half) * t);
        }
        for q in circle_circle(p, len, c, radius) {
            consider(q);
        }
    }

    // Straight sides and their crossings with the reach circle.
    let ab = b - a;
    let ab_len = ab.norm();
    if ab_len > 0.0 {
        let normal = Vec2::new(-ab.y, ab.x) * (1.0 / ab_len);
        for side in [normal * radius, normal * -radius] {
            let (sa, sb) = (a + side, b + side);
            for q in [sa, sb] {
                if p.distance(q) <= len {
                    consider(q);
                }
            }
            for q in circle_segment(p, len, sa, sb) {
                consider(q);
            }
        }
    }

    Some(Arc::new(reference + lo, hi - lo))
}

fn circle_circle(c0: Vec2, r0: f64, c1: Vec2, r1: f64) -> Vec<Vec2> {
    let d = c0.distance(c1);
    if r1 <= 0.0 || d == 0.0 || d > r0 + r1 || d < (r0 - r1).abs() {
        return Vec::new();
    }
    let along = (d * d + r0 * r0 - r1 * r1) / (2.0 * d);
    let h = (r0 * r0 - along * along).max(0.0).sqrt();
    let dir = (c1 - c0) * (1.0 / d);
    let base = c0 + dir * along;
    let perp = Vec2::new(-dir.y, dir.x);
    vec![base + perp * h, base - perp * h]
}

fn circle_segment(center: Vec2, r: f64, a: Vec2, b: Vec2) -> Vec<Vec2> {
    let d = b - a;
    let f = a - center;
    let qa = d.norm_sq();
    if qa == 0.0 {
        return Vec::new();
    }
    let qb = 2.0 * f.dot(d);
    let qc = f.norm_sq() - r * r;
    let disc = qb * qb - 4.0 * qa * qc;
    if disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    [(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)]
        .into_iter()
        .filter(|t| (0.0..=1.0).contains(t))
        .map(|t| a + d * t)
        .collect()
}

/// Safe heading/speed set for the next step.
///
/// Starts from the kinematic window and removes every obstacle and wall
/// cone. If the robot already sits inside some obstacle's extended ball the
/// result depends on [`InsideMode`]; when escaping, every obstacle within
/// reach is held to the time-dependent clearance of [`escape_headings`]
/// instead of its cone.
pub fn compute_safe_velocities<I>(
    robot: &VoRobot,
    obstacles: I,
    walls: &[WallSegment],
    t_s: f64,
    params: &VoParams,
) -> SafeVelocitySet
where
    I: IntoIterator<Item = VoObstacle>,
{
    let kinematic = AngularIntervalSet::from_arc(kinematic_arc(robot.heading, robot.omega_max, t_s));
    let mut blocked = Vec::new();
    let mut nearby = Vec::new();
    let mut inside = false;
    for obstacle in obstacles {
        let (r1, r2) = extended_radii(robot.v_max, obstacle.radius, robot.radius, obstacle.v_max, t_s);
        match blocked_arc_obstacle(
            robot.position,
            obstacle.position,
            r1,
            r2 + params.safety_margin,
            params.cone,
        ) {
            Blocking::Inside => {
                if params.inside == InsideMode::Stop {
                    return SafeVelocitySet::stationary();
                }
                inside = true;
                nearby.push(obstacle);
            }
            Blocking::Blocked(arc) => {
                blocked.push(arc);
                nearby.push(obstacle);
            }
            Blocking::NoBlock => {}
        }
    }
    let inflate = params.wall_inflation.unwrap_or(robot.radius);
    let reach = robot.v_max * t_s + inflate;
    let mut wall_arcs = Vec::new();
    for wall in walls {
        if let Ok(Blocking::Blocked(arc)) =
            blocked_arc_wall(robot.position, wall, reach, inflate, params.cone)
        {
            wall_arcs.push(arc);
        }
    }
    let wall_blocked = AngularIntervalSet::from_arcs(wall_arcs);
    let walls_free = kinematic.difference(&wall_blocked);
    if !inside {
        let headings = walls_free.difference(&AngularIntervalSet::from_arcs(blocked));
        return if headings.is_empty() {
            SafeVelocitySet::stationary()
        } else {
            SafeVelocitySet {
                headings,
                speed_range: (0.0, robot.v_max),
            }
        };
    }
    let mut away = wall_blocked.complement();
    for obstacle in nearby {
        if away.is_empty() {
            return SafeVelocitySet::stationary();
        }
        away = away.intersection(&escape_headings(
            robot.position,
            obstacle.position,
            obstacle.radius + robot.radius + params.safety_margin,
            obstacle.v_max,
            robot.v_max,
            t_s,
        ));
    }
    let headings = away.intersection(&kinematic);
    if !headings.is_empty() {
        return SafeVelocitySet {
            headings,
            speed_range: (robot.v_max, robot.v_max),
        };
    }
    match nearest_in(&away, robot.heading) {
        // Escape lies outside the turn window: stop and turn toward it.
        Some(target) => {
            let turn = robot.omega_max * t_s;
            let side = angle_diff(target, robot.heading).signum();
            SafeVelocitySet {
                headings: AngularIntervalSet::from_arc(Arc::new(
                    robot.heading + if side > 0.0 { 0.5 * turn } else { -turn },
                    0.5 * turn,
                )),
                speed_range: (0.0, 0.0),
            }
        }
        None => SafeVelocitySet::stationary(),
    }
}

/// Point of `set` closest to `angle`.
fn nearest_in(set: &AngularIntervalSet, angle: f64) -> Option<f64> {
    if set.contains(angle, 0.0) {
        return Some(angle);
    }
    set.arcs()
        .iter()
        .flat_map(|arc| [arc.start, arc.end()])
        .min_by(|a, b| angle_diff(*a, angle).abs().total_cmp(&angle_diff(*b, angle).abs()))
}

/// Sampling oracle for the safe heading set.
///
/// Every sampled heading is walked at top speed over `[0, t_s]` in
/// `time_resolution` increments; it is unsafe if any sample falls strictly
/// inside an extended obstacle ball or within the wall clearance. Safe
/// samples become intervals of one sample spacing, clipped to the
/// kinematic window.
pub fn brute_force_safe_headings(
    robot: &VoRobot,
    obstacles: &[VoObstacle],
    walls: &[WallSegment],
    t_s: f64,
    params: &VoParams,
    angular_resolution: f64,
    time_resolution: f64,
) -> AngularIntervalSet {
    let window = kinematic_arc(robot.heading, robot.omega_max, t_s);
    let kinematic = AngularIntervalSet::from_arc(window);
    let radii: Vec<f64> = obstacles
        .iter()
        .map(|o| o.radius + robot.radius + o.v_max * t_s + params.safety_margin)
        .collect();
    let inflate = params.wall_inflation.unwrap_or(robot.radius);

    let inside: Vec<bool> = obstacles
        .iter()
        .zip(&radii)
        .map(|(o, &r2)| robot.position.distance(o.position) <= r2)
        .collect();
    if walls
        .iter()
        .any(|w| point_segment_distance(robot.position, w.a, w.b) <= inflate)
    {
        return AngularIntervalSet::empty();
    }
    let escaping = inside.iter().any(|&i| i);
    if escaping && params.inside == InsideMode::Stop {
        return AngularIntervalSet::empty();
    }
    let unsafe_at = |point: Vec2, t: f64| {
        obstacles.iter().zip(&radii).any(|(o, &r2)| {
            if escaping {
                let clearance = o.radius + robot.radius + params.safety_margin;
                point.distance(o.position) < clearance + o.v_max * t
            } else {
                point.distance(o.position) < r2
            }
        }) || walls
            .iter()
            .any(|w| point_segment_distance(point, w.a, w.b) < inflate)
    };

    let n_angles = (window.width / angular_resolution).ceil().max(1.0) as usize;
    let spacing = window.width / n_angles as f64;
    let n_times = (t_s / time_resolution).ceil().max(1.0) as usize;
    let mut safe = Vec::new();
    for k in 0..=n_angles {
        let heading = window.start + k as f64 * spacing;
        let dir = Vec2::from_angle(heading);
        let hit = (0..=n_times).any(|j| {
            let t = t_s * j as f64 / n_times as f64;
            unsafe_at(robot.position + dir * (robot.v_max * t), t)
        });
        if !hit {
            safe.push(Arc::centered(normalize_angle(heading), 0.5 * spacing));
        }
    }
    AngularIntervalSet::from_arcs(safe).intersection(&kinematic)
}
