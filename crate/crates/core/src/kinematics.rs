//! Closed-form kinematics for a four-cable suspended robot.
//!
//! The rig is a rectangular perimeter of breadth `B`, depth `D` and height
//! `H` with one pulley on top of each corner pole:
//!
//! ```text
//! P1 = (0, 0, H)    P2 = (0, D, H)    P3 = (B, D, H)    P4 = (B, 0, H)
//! ```
//!
//! Each pulley is driven by a motor with winch radius `r_i`, so cable length
//! and motor rotation are linked by `L_i = L_i0 + r_i * dtheta_i` (rotations
//! in radians, positive = cable payout).
//!
//! Two end-effector geometries are supported:
//!
//! - the *point* robot: all four cables attach to a single point;
//! - the *box* robot: a `2b x 2d x h` box whose cables attach to the corners
//!   of the top face while positions refer to the bottom-face centroid.
//!
//! Inverse kinematics (position -> lengths -> rotations) is exact. Forward
//! kinematics recovers `(x, y)` from length differences and `z` from the
//! remaining radical, always on the hanging branch (`z <= H`), and verifies
//! all four length equations against a residual tolerance.
//!
//! All operations are pure functions of immutable inputs and safe to call
//! concurrently.

use thiserror::Error;

/// Default relative tolerance on squared-length residuals in forward
/// kinematics.
pub const DEFAULT_FK_TOL: f64 = 1e-6;

/// Errors produced by kinematics operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    /// Rig dimensions or radii violate their invariants.
    #[error("invalid rig: {0}")]
    InvalidRig(String),
    /// A cable length is negative or non-finite.
    #[error("invalid string lengths: {0}")]
    InvalidLengths(String),
    /// A rotation is non-finite.
    #[error("invalid rotations: {0}")]
    InvalidRotations(String),
    /// Box dimensions violate their invariants.
    #[error("invalid robot box: {0}")]
    InvalidBox(String),
    /// A target position lies outside the reachable workspace.
    #[error("point ({x}, {y}, {z}) outside workspace: {detail}")]
    OutOfWorkspace { x: f64, y: f64, z: f64, detail: String },
    /// A requested rotation would drive a cable length negative.
    #[error("infeasible rotation: cable {cable} length would become {length}")]
    InfeasibleRotation { cable: usize, length: f64 },
    /// Cable lengths do not satisfy the rig's length equations.
    #[error("lengths inconsistent with rig geometry: {0}")]
    InconsistentLengths(String),
    /// Forward kinematics is undefined for this box geometry.
    #[error("singular geometry: {0}")]
    SingularGeometry(String),
}

/// A position in rig coordinates (meters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

/// The four cable lengths in pulley order, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StringLengths([f64; 4]);

impl StringLengths {
    /// Validates that every length is finite and non-negative.
    pub fn new(lengths: [f64; 4]) -> Result<Self, KinematicsError> {
        for (i, &l) in lengths.iter().enumerate() {
            if !l.is_finite() || l < 0.0 {
                return Err(KinematicsError::InvalidLengths(format!(
                    "L{i} = {l} (must be finite and >= 0)"
                )));
            }
        }
        Ok(Self(lengths))
    }

    pub fn values(&self) -> [f64; 4] {
        self.0
    }
}

/// The four motor rotations in pulley order, radians.
/// Positive rotation pays cable out (lengthens it).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotations([f64; 4]);

impl Rotations {
    /// Validates that every rotation is finite.
    pub fn new(dtheta: [f64; 4]) -> Result<Self, KinematicsError> {
        for (i, &t) in dtheta.iter().enumerate() {
            if !t.is_finite() {
                return Err(KinematicsError::InvalidRotations(format!(
                    "dtheta{i} = {t} (must be finite)"
                )));
            }
        }
        Ok(Self(dtheta))
    }

    pub fn values(&self) -> [f64; 4] {
        self.0
    }
}

/// Box end effector: dimensions `2b x 2d x h` with cables attached to the
/// top-face corners. Positions refer to the bottom-face centroid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotBox {
    half_breadth: f64,
    half_depth: f64,
    height: f64,
}

impl RobotBox {
    pub fn new(half_breadth: f64, half_depth: f64, height: f64) -> Result<Self, KinematicsError> {
        for (name, v) in [
            ("half_breadth", half_breadth),
            ("half_depth", half_depth),
            ("height", height),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(KinematicsError::InvalidBox(format!(
                    "{name} = {v} (must be finite and >= 0)"
                )));
            }
        }
        Ok(Self {
            half_breadth,
            half_depth,
            height,
        })
    }

    /// The degenerate box that reduces every box operation to the point form.
    pub fn point() -> Self {
        Self {
            half_breadth: 0.0,
            half_depth: 0.0,
            height: 0.0,
        }
    }

    pub fn half_breadth(&self) -> f64 {
        self.half_breadth
    }

    pub fn half_depth(&self) -> f64 {
        self.half_depth
    }

    pub fn height(&self) -> f64 {
        self.height
    }
}

/// Rig geometry: perimeter dimensions plus per-pulley winch radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rig {
    breadth: f64,
    depth: f64,
    height: f64,
    radii: [f64; 4],
}

impl Rig {
    /// Builds a rig, validating that all dimensions and radii are positive
    /// and finite.
    pub fn new(breadth: f64, depth: f64, height: f64, radii: [f64; 4]) -> Result<Self, KinematicsError> {
        for (name, v) in [("breadth", breadth), ("depth", depth), ("height", height)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(KinematicsError::InvalidRig(format!(
                    "{name} = {v} (must be finite and > 0)"
                )));
            }
        }
        for (i, &r) in radii.iter().enumerate() {
            if !r.is_finite() || r <= 0.0 {
                return Err(KinematicsError::InvalidRig(format!(
                    "radius r{i} = {r} (must be finite and > 0)"
                )));
            }
        }
        Ok(Self {
            breadth,
            depth,
            height,
            radii,
        })
    }

    /// Builds a rig whose four winches share one radius.
    pub fn with_uniform_radius(
        breadth: f64,
        depth: f64,
        height: f64,
        radius: f64,
    ) -> Result<Self, KinematicsError> {
        Self::new(breadth, depth, height, [radius; 4])
    }

    pub fn breadth(&self) -> f64 {
        self.breadth
    }

    pub fn depth(&self) -> f64 {
        self.depth
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn radii(&self) -> [f64; 4] {
        self.radii
    }

    /// Rest pose at the top center of the perimeter, `(B/2, D/2, H)`.
    pub fn base_point(&self) -> Point3 {
        Point3::new(self.breadth / 2.0, self.depth / 2.0, self.height)
    }

    /// Pulley coordinates in fixed order `P1..P4`.
    pub fn pulley_positions(&self) -> [Point3; 4] {
        let (b, d, h) = (self.breadth, self.depth, self.height);
        [
            Point3::new(0.0, 0.0, h),
            Point3::new(0.0, d, h),
            Point3::new(b, d, h),
            Point3::new(b, 0.0, h),
        ]
    }

    fn check_workspace(&self, p: Point3) -> Result<(), KinematicsError> {
        let inside = (0.0..=self.breadth).contains(&p.x)
            && (0.0..=self.depth).contains(&p.y)
            && (0.0..=self.height).contains(&p.z);
        if inside {
            Ok(())
        } else {
            Err(KinematicsError::OutOfWorkspace {
                x: p.x,
                y: p.y,
                z: p.z,
                detail: format!(
                    "workspace is [0, {}] x [0, {}] x [0, {}]",
                    self.breadth, self.depth, self.height
                ),
            })
        }
    }

    /// Cable lengths for a point robot at `p`: the Euclidean distances from
    /// `p` to the four pulleys.
    pub fn inverse_lengths(&self, p: Point3) -> Result<StringLengths, KinematicsError> {
        self.check_workspace(p)?;
        let pulleys = self.pulley_positions();
        let mut lengths = [0.0; 4];
        for (l, q) in lengths.iter_mut().zip(pulleys.iter()) {
            let dx = p.x - q.x;
            let dy = p.y - q.y;
            let dz = p.z - q.z;
            *l = (dx * dx + dy * dy + dz * dz).sqrt();
        }
        Ok(StringLengths(lengths))
    }

    /// Motor rotations that change cable lengths from `initial` to `current`:
    /// `dtheta_i = (L_i - L_i0) / r_i`.
    pub fn lengths_to_rotations(&self, initial: StringLengths, current: StringLengths) -> Rotations {
        let mut dtheta = [0.0; 4];
        for i in 0..4 {
            dtheta[i] = (current.0[i] - initial.0[i]) / self.radii[i];
        }
        Rotations(dtheta)
    }

    /// Cable lengths after applying `rot` from `initial`:
    /// `L_i = L_i0 + r_i * dtheta_i`. Fails if any resulting length is
    /// negative.
    pub fn rotations_to_lengths(
        &self,
        initial: StringLengths,
        rot: Rotations,
    ) -> Result<StringLengths, KinematicsError> {
        let mut lengths = [0.0; 4];
        for i in 0..4 {
            lengths[i] = initial.0[i] + self.radii[i] * rot.0[i];
            if lengths[i] < 0.0 {
                return Err(KinematicsError::InfeasibleRotation {
                    cable: i,
                    length: lengths[i],
                });
            }
        }
        Ok(StringLengths(lengths))
    }

    /// Rotations that move the point robot from the base pose `(B/2, D/2, H)`
    /// to `target`.
    pub fn target_to_rotations(&self, target: Point3) -> Result<Rotations, KinematicsError> {
        let initial = self.inverse_lengths(self.base_point())?;
        let current = self.inverse_lengths(target)?;
        Ok(self.lengths_to_rotations(initial, current))
    }

    /// Horizontal position of a point robot from cable lengths:
    /// `y = (L1^2 - L2^2 + D^2) / (2D)`, `x = (L2^2 - L3^2 + B^2) / (2B)`.
    pub fn forward_xy(&self, lengths: StringLengths) -> (f64, f64) {
        let sq = [
            lengths.0[0] * lengths.0[0],
            lengths.0[1] * lengths.0[1],
            lengths.0[2] * lengths.0[2],
        ];
        let y = (sq[0] - sq[1] + self.depth * self.depth) / (2.0 * self.depth);
        let x = (sq[1] - sq[2] + self.breadth * self.breadth) / (2.0 * self.breadth);
        (x, y)
    }

    /// Full position of a point robot from cable lengths, on the hanging
    /// branch `z <= H`. All four length equations must hold within `tol`
    /// (relative, on squared lengths).
    pub fn forward_position(
        &self,
        lengths: StringLengths,
        tol: f64,
    ) -> Result<Point3, KinematicsError> {
        let (x, y) = self.forward_xy(lengths);
        let l1_sq = lengths.0[0] * lengths.0[0];
        let z = recover_z(l1_sq, x * x + y * y, self.height, tol)?;
        let p = Point3::new(x, y, z);
        let pulleys = self.pulley_positions();
        for i in 0..4 {
            let dx = p.x - pulleys[i].x;
            let dy = p.y - pulleys[i].y;
            let dz = p.z - pulleys[i].z;
            check_residual(lengths.0[i], dx * dx + dy * dy + dz * dz, tol, i)?;
        }
        Ok(p)
    }

    /// Cable lengths for a box robot whose bottom-face centroid sits at `p`.
    /// The attachment corners must stay inside the workspace:
    /// `b <= x <= B-b`, `d <= y <= D-d`, `0 <= z <= H-h`.
    pub fn box_inverse_lengths(
        &self,
        bx: &RobotBox,
        p: Point3,
    ) -> Result<StringLengths, KinematicsError> {
        let (b, d, h) = (bx.half_breadth, bx.half_depth, bx.height);
        let inside = (b..=self.breadth - b).contains(&p.x)
            && (d..=self.depth - d).contains(&p.y)
            && (0.0..=self.height - h).contains(&p.z);
        if !inside {
            return Err(KinematicsError::OutOfWorkspace {
                x: p.x,
                y: p.y,
                z: p.z,
                detail: format!(
                    "box workspace is [{}, {}] x [{}, {}] x [0, {}]",
                    b,
                    self.breadth - b,
                    d,
                    self.depth - d,
                    self.height - h
                ),
            });
        }
        let mut lengths = [0.0; 4];
        for (i, corner) in self.box_corners(bx, p).iter().enumerate() {
            lengths[i] = corner.sqrt();
        }
        Ok(StringLengths(lengths))
    }

    /// Full position of a box robot from cable lengths, on the hanging
    /// branch `z <= H-h`. Requires `B != 2b` and `D != 2d`.
    pub fn box_forward_position(
        &self,
        bx: &RobotBox,
        lengths: StringLengths,
        tol: f64,
    ) -> Result<Point3, KinematicsError> {
        let (b, d, h) = (bx.half_breadth, bx.half_depth, bx.height);
        let denom_y = self.depth - 2.0 * d;
        let denom_x = self.breadth - 2.0 * b;
        if denom_y == 0.0 || denom_x == 0.0 {
            return Err(KinematicsError::SingularGeometry(format!(
                "B - 2b = {denom_x}, D - 2d = {denom_y} (both must be nonzero)"
            )));
        }
        let sq = [
            lengths.0[0] * lengths.0[0],
            lengths.0[1] * lengths.0[1],
            lengths.0[2] * lengths.0[2],
        ];
        let y = 0.5 * ((sq[0] - sq[1]) / denom_y + self.depth);
        let x = 0.5 * ((sq[1] - sq[2]) / denom_x + self.breadth);
        let dx1 = x - b;
        let dy1 = y - d;
        let z = recover_z(sq[0], dx1 * dx1 + dy1 * dy1, self.height - h, tol)?;
        let p = Point3::new(x, y, z);
        for (i, expected_sq) in self.box_corners(bx, p).iter().enumerate() {
            check_residual(lengths.0[i], *expected_sq, tol, i)?;
        }
        Ok(p)
    }

    /// Squared distances from each top-face attachment corner to its pulley,
    /// for the box at bottom-centroid `p`.
    fn box_corners(&self, bx: &RobotBox, p: Point3) -> [f64; 4] {
        let (b, d, h) = (bx.half_breadth, bx.half_depth, bx.height);
        let near_x = p.x - b;
        let far_x = self.breadth - b - p.x;
        let near_y = p.y - d;
        let far_y = self.depth - d - p.y;
        let dz = self.height - h - p.z;
        let dz_sq = dz * dz;
        [
            near_x * near_x + near_y * near_y + dz_sq,
            near_x * near_x + far_y * far_y + dz_sq,
            far_x * far_x + far_y * far_y + dz_sq,
            far_x * far_x + near_y * near_y + dz_sq,
        ]
    }
}

/// Recovers the vertical drop below `top` from `L1^2 - (horizontal dist)^2`.
/// Tiny negative radicands (within `tol` of zero, relative to `L1^2`) are
/// treated as the robot sitting exactly at the top plane.
fn recover_z(l1_sq: f64, horiz_sq: f64, top: f64, tol: f64) -> Result<f64, KinematicsError> {
    let radicand = l1_sq - horiz_sq;
    if radicand < 0.0 {
        if radicand >= -tol * l1_sq.max(1.0) {
            return Ok(top);
        }
        return Err(KinematicsError::InconsistentLengths(format!(
            "negative radicand {radicand} recovering z (L1^2 = {l1_sq})"
        )));
    }
    Ok(top - radicand.sqrt())
}

fn check_residual(length: f64, expected_sq: f64, tol: f64, cable: usize) -> Result<(), KinematicsError> {
    let l_sq = length * length;
    let residual = (l_sq - expected_sq).abs();
    if residual > tol * l_sq.max(1.0) {
        return Err(KinematicsError::InconsistentLengths(format!(
            "cable {cable}: L^2 = {l_sq} but geometry requires {expected_sq} (residual {residual})"
        )));
    }
    Ok(())
}
