//! Randomized cross-check of the analytic safe-heading kernel against the
//! sampling oracle.
//!
//! *Soundness*: every heading the kernel admits must keep the robot's
//! full-speed path clear of every extended obstacle disc and inflated wall.
//! This is checked with exact segment distances, the continuous limit of
//! dense time sampling. When the robot already overlaps some obstacle's
//! reach, paths are instead sampled densely in time against every
//! obstacle's growing reach.
//!
//! *Completeness*: on a heading grid, kernel and oracle must agree except
//! within two grid spacings of a boundary of either set.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{point_segment_distance, AngularIntervalSet, Vec2};
use crate::vo::{brute_force_safe_headings, compute_safe_velocities, InsideMode, VoObstacle, VoParams, VoRobot, WallSegment};

/// Slack for tangent headings that graze a disc or wall exactly.
const GRAZE_TOL: f64 = 1e-9;
const ESCAPE_SAMPLES: usize = 1000;

#[derive(Clone, Debug, PartialEq)]
pub struct OracleScene {
    pub robot: VoRobot,
    pub obstacles: Vec<VoObstacle>,
    pub walls: Vec<WallSegment>,
    pub t_s: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub scenes: usize,
    pub inside_scenes: usize,
    pub headings_checked: usize,
    pub soundness_violations: usize,
    pub completeness_mismatches: usize,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.soundness_violations == 0 && self.completeness_mismatches == 0
    }
}

/// Scene with 0 to 10 obstacles and 0 to 3 walls scattered around the robot.
pub fn random_scene<R: Rng + ?Sized>(rng: &mut R) -> OracleScene {
    let robot = VoRobot {
        position: Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        heading: rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
        radius: rng.gen_range(0.1..0.5),
        v_max: rng.gen_range(0.1..1.0),
        omega_max: rng.gen_range(0.2..4.0),
    };
    let near = |rng: &mut R, spread: f64| {
        let angle = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        robot.position + Vec2::from_angle(angle) * rng.gen_range(0.0..spread)
    };
    let n_obstacles = rng.gen_range(0..=10);
    let obstacles = (0..n_obstacles)
        .map(|_| VoObstacle {
            position: near(rng, 2.5),
            radius: rng.gen_range(0.05..0.5),
            v_max: rng.gen_range(0.0..0.5),
        })
        .collect();
    let n_walls = rng.gen_range(0..=3);
    let walls = (0..n_walls)
        .filter_map(|_| {
            let a = near(rng, 2.5);
            let b = a + Vec2::from_angle(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)) * rng.gen_range(0.1..3.0);
            WallSegment::new(a, b).ok()
        })
        .collect();
    OracleScene { robot, obstacles, walls, t_s: 1.0 }
}

fn segments_intersect(p: Vec2, q: Vec2, a: Vec2, b: Vec2) -> bool {
    let d1 = (q - p).cross(a - p);
    let d2 = (q - p).cross(b - p);
    let d3 = (b - a).cross(p - a);
    let d4 = (b - a).cross(q - a);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn segment_distance(p: Vec2, q: Vec2, a: Vec2, b: Vec2) -> f64 {
    if segments_intersect(p, q, a, b) {
        return 0.0;
    }
    point_segment_distance(p, a, b)
        .min(point_segment_distance(q, a, b))
        .min(point_segment_distance(a, p, q))
        .min(point_segment_distance(b, p, q))
}

/// Whether the full-speed path along `heading` stays clear for the whole step.
pub fn path_is_clear(scene: &OracleScene, heading: f64, params: &VoParams) -> bool {
    let robot = &scene.robot;
    let start = robot.position;
    let end = start + Vec2::from_angle(heading) * (robot.v_max * scene.t_s);
    let inflate = params.wall_inflation.unwrap_or(robot.radius);
    let clearance = |o: &VoObstacle| o.radius + robot.radius + params.safety_margin;
    let escaping = scene
        .obstacles
        .iter()
        .any(|o| start.distance(o.position) <= clearance(o) + o.v_max * scene.t_s);
    if escaping && params.inside == InsideMode::Stop {
        return false;
    }
    scene.obstacles.iter().all(|o| {
        let c = clearance(o);
        if !escaping {
            let r2 = c + o.v_max * scene.t_s;
            return point_segment_distance(o.position, start, end) >= r2 - GRAZE_TOL;
        }
        // The gap must outgrow the obstacle's reach at every instant.
        (0..=ESCAPE_SAMPLES).all(|j| {
            let t = scene.t_s * j as f64 / ESCAPE_SAMPLES as f64;
            let p = start + (end - start) * (t / scene.t_s);
            p.distance(o.position) >= c + o.v_max * t - GRAZE_TOL
        })
    }) && scene
        .walls
        .iter()
        .all(|w| segment_distance(start, end, w.a, w.b) >= inflate - GRAZE_TOL)
}

/// Headings spaced at most `step` apart covering every arc of `set`,
/// endpoints included.
fn sample_headings(set: &AngularIntervalSet, step: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for arc in set.arcs() {
        let n = (arc.width / step).ceil().max(1.0) as usize;
        out.extend((0..=n).map(|k| arc.start + arc.width * k as f64 / n as f64));
    }
    out
}

/// Checks one scene; adds its counts to `report`.
pub fn check_scene(scene: &OracleScene, params: &VoParams, angular_resolution: f64, report: &mut OracleReport) {
    let kernel = compute_safe_velocities(&scene.robot, scene.obstacles.iter().copied(), &scene.walls, scene.t_s, params)
        .moving_headings();
    let oracle = brute_force_safe_headings(
        &scene.robot,
        &scene.obstacles,
        &scene.walls,
        scene.t_s,
        params,
        angular_resolution,
        scene.t_s / 200.0,
    );
    report.scenes += 1;
    if kernel.is_empty() && oracle.is_empty() {
        report.inside_scenes += 1;
    }

    for heading in sample_headings(&kernel, angular_resolution) {
        report.headings_checked += 1;
        if !path_is_clear(scene, heading, params) {
            report.soundness_violations += 1;
        }
    }

    let window = crate::vo::kinematic_arc(scene.robot.heading, scene.robot.omega_max, scene.t_s);
    let n = (window.width / angular_resolution).ceil().max(1.0) as usize;
    let slack = 2.0 * angular_resolution;
    for k in 0..=n {
        let heading = window.start + window.width * k as f64 / n as f64;
        let in_kernel = kernel.contains(heading, 0.0);
        if in_kernel == oracle.contains(heading, 0.0) {
            continue;
        }
        if kernel.distance_to_boundary(heading) > slack && oracle.distance_to_boundary(heading) > slack {
            report.completeness_mismatches += 1;
        }
    }
}

/// Runs `samples` random scenes from `seed` at the given grid spacing.
pub fn oracle_check(samples: usize, seed: u64, angular_resolution: f64, params: &VoParams) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = OracleReport::default();
    for _ in 0..samples {
        let scene = random_scene(&mut rng);
        check_scene(&scene, params, angular_resolution, &mut report);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crossing_segments_have_zero_distance() {
        let d = segment_distance(Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, -1.0), Vec2::new(0.0, 1.0));
        assert_eq!(d, 0.0);
        let d = segment_distance(Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 2.0), Vec2::new(1.0, 2.0));
        assert!((d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn small_run_passes() {
        let report = oracle_check(50, 1, 0.01, &VoParams::default());
        assert_eq!(report.scenes, 50);
        assert!(report.passed(), "{report:?}");
    }
}
