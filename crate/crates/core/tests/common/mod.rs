//! Oracles, checks and generators shared by the integration tests.
#![allow(dead_code)]

pub mod frames;
pub mod oracle;
pub mod properties;

use proptest::prelude::*;

use trefftz_fem::geometry::QuadCorners;

/// Convex, counter-clockwise quadrilaterals: a unit square with perturbed
/// corners, then scaled, rotated and shifted.
pub fn convex_quad() -> impl Strategy<Value = QuadCorners> {
    (
        prop::array::uniform8(-0.25f64..0.25),
        0.3f64..3.0,
        0.0f64..std::f64::consts::TAU,
        -5.0f64..5.0,
        -5.0f64..5.0,
    )
        .prop_filter_map("convex", |(d, s, a, tx, ty)| {
            let base = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
            let (sn, cs) = a.sin_cos();
            let xy = std::array::from_fn(|k| {
                let x = s * (base[k][0] + d[2 * k]);
                let y = s * (base[k][1] + d[2 * k + 1]);
                [cs * x - sn * y + tx, sn * x + cs * y + ty]
            });
            QuadCorners::from_xy(xy).ok().filter(|q| q.is_convex())
        })
}
