//! Constructive packing and covering of large squares, rectangles and
//! trapezoids by unit squares, with independent geometric verification.

// `!(a < b)` is used on purpose so NaN inputs fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod construct;
pub mod coverer;
pub mod geometry;
pub mod packer;
pub mod plan;
pub mod render;
pub mod series;
pub mod tilt;
pub mod verifier;

pub use config::PackConfig;
pub use construct::{band_heights, cover_base, pack_base, type3_top, BuildError};
pub use coverer::{
    cover_base_grid, cover_partition, cover_square, cover_strip, cover_type1, cover_type2, cover_type3, CoverPartition,
};
pub use geometry::{Frame, Pose, Quad, Region, RegionKind, UnitSquarePlacement, Vec2};
pub use packer::{
    max_slant, pack_base_grid, pack_square, pack_strip, pack_type1, pack_type2, pack_type3, partition_type1,
    type3_partition, BandInfo, Type1Partition, Type1Spec, Type2Spec, Type3Partition, Type3Spec,
};
pub use plan::{account, check_bound, enumerate_placements, Mode, Plan, PlanError, PlanNode, RegionType, WasteReport};
pub use render::{render_svg, RenderOptions};
pub use series::{build_plan, fit_slope, run_series, series_row, to_csv, SeriesError, SeriesRow, SlopeFit, Verified};
pub use tilt::{solve_cover_tilt, solve_pack_tilt, solve_stack_tilt, StripTilt, TiltKind};
pub use verifier::{verify, verify_covering, verify_packing, VerifyReport};
