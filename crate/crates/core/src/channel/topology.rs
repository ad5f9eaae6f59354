//! Cell layout: the BS at the origin, users scattered over a disc and
//! surfaces evenly spaced on a concentric ring.

use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::SystemConfig;

/// Planar position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn from_polar(r: f64, angle: f64) -> Self {
        Point {
            x: r * angle.cos(),
            y: r * angle.sin(),
        }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> f64 {
        self.distance(&Point::ORIGIN)
    }
}

/// Positions of users and surfaces; the BS sits at [`Point::ORIGIN`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub users: Vec<Point>,
    pub surfaces: Vec<Point>,
}

/// Surface `s` of `S` sits at angle `2πs/S` on the ring.
pub fn surface_positions(surfaces: usize, ring_radius: f64) -> Vec<Point> {
    (0..surfaces)
        .map(|s| Point::from_polar(ring_radius, TAU * s as f64 / surfaces as f64))
        .collect()
}

/// Draws users uniformly over the cell disc.
///
/// A user landing within 1 m of the BS or of any surface is re-drawn so
/// every link stays beyond the path-loss reference distance.
pub fn draw_topology<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Geometry {
    let surfaces = surface_positions(cfg.surfaces, cfg.ris_ring_radius_m);
    let users = (0..cfg.users)
        .map(|_| loop {
            let r = cfg.cell_radius_m * rng.random::<f64>().sqrt();
            let p = Point::from_polar(r, TAU * rng.random::<f64>());
            if p.norm() >= 1.0 && surfaces.iter().all(|s| s.distance(&p) >= 1.0) {
                break p;
            }
        })
        .collect();
    Geometry { users, surfaces }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    #[test]
    fn four_surfaces_on_the_axes() {
        let s = surface_positions(4, 90.0);
        let expect = [(90.0, 0.0), (0.0, 90.0), (-90.0, 0.0), (0.0, -90.0)];
        for (p, (x, y)) in s.iter().zip(expect) {
            assert!((p.x - x).abs() < 1e-12 && (p.y - y).abs() < 1e-12, "{p:?}");
            assert!((p.norm() - 90.0).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_disc_second_moment() {
        let cfg = SystemConfig {
            users: 1,
            ..SystemConfig::desk()
        };
        let mut rng = RngStream::new(3, 0);
        let n = 10_000;
        let ms: f64 = (0..n)
            .map(|_| draw_topology(&cfg, &mut rng).users[0].norm().powi(2))
            .sum::<f64>()
            / n as f64;
        let expect = cfg.cell_radius_m.powi(2) / 2.0;
        assert!((ms / expect - 1.0).abs() < 0.02, "{ms} vs {expect}");
    }

    #[test]
    fn users_inside_cell_and_deterministic() {
        let cfg = SystemConfig::desk();
        let a = draw_topology(&cfg, &mut RngStream::new(8, 1));
        let b = draw_topology(&cfg, &mut RngStream::new(8, 1));
        assert_eq!(a, b);
        assert_eq!(a.users.len(), cfg.users);
        assert!(a
            .users
            .iter()
            .all(|u| u.norm() <= cfg.cell_radius_m && u.norm() >= 1.0));
    }
}
