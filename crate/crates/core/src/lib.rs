//! Model a four-cable suspended robot end to end: exact kinematics,
//! synthetic motor-rotation datasets, a small from-scratch regression
//! network, 8-bit post-training weight quantization, and an embedded-style
//! inference path.
//!
//! The pipeline mirrors how such a model reaches a microcontroller:
//!
//! 1. [`kinematics`]: closed-form inverse and forward kinematics for the
//!    rig, for both a point robot and a box-shaped robot.
//! 2. [`datagen`]: deterministic grid enumeration of (target position, rig
//!    parameters) -> four motor rotations, with CSV persistence and
//!    distribution statistics.
//! 3. [`model`]: a fully-connected network trained with Adam on
//!    standardized features/targets, a closed-form linear-regression
//!    baseline, and regression metrics.
//! 4. [`quant`]: symmetric per-tensor 8-bit weight quantization, a compact
//!    binary model container, a dequantize-at-inference interpreter, and
//!    C-source byte-array emission.
//! 5. [`eval`]: side-by-side model comparison and residual-distribution
//!    reports.
//!
//! The `cablekin` binary (see [`cli`]) wires these together as subcommands:
//! `generate`, `stats`, `train`, `eval`, `quantize`, `emit-c`, `infer`,
//! `roundtrip`.

pub mod cli;
pub mod datagen;
pub mod eval;
pub mod kinematics;
pub mod model;
pub mod quant;

pub use kinematics::{Point3, Rig, RobotBox, Rotations, StringLengths};
