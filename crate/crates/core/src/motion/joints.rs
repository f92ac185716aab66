//! Canonical G1 29-DoF joint index table.
//!
//! | idx | joint                 | idx | joint                  |
//! |-----|-----------------------|-----|------------------------|
//! | 0   | left_hip_pitch        | 15  | left_shoulder_pitch    |
//! | 1   | left_hip_roll         | 16  | left_shoulder_roll     |
//! | 2   | left_hip_yaw          | 17  | left_shoulder_yaw      |
//! | 3   | left_knee             | 18  | left_elbow             |
//! | 4   | left_ankle_pitch      | 19  | left_wrist_roll        |
//! | 5   | left_ankle_roll       | 20  | left_wrist_pitch       |
//! | 6   | right_hip_pitch       | 21  | left_wrist_yaw         |
//! | 7   | right_hip_roll        | 22  | right_shoulder_pitch   |
//! | 8   | right_hip_yaw         | 23  | right_shoulder_roll    |
//! | 9   | right_knee            | 24  | right_shoulder_yaw     |
//! | 10  | right_ankle_pitch     | 25  | right_elbow            |
//! | 11  | right_ankle_roll      | 26  | right_wrist_roll       |
//! | 12  | waist_yaw             | 27  | right_wrist_pitch      |
//! | 13  | waist_roll            | 28  | right_wrist_yaw        |
//! | 14  | waist_pitch           |     |                        |

use super::{MotionError, Result, NUM_JOINTS};

pub const JOINT_NAMES: [&str; NUM_JOINTS] = [
    "left_hip_pitch_joint",
    "left_hip_roll_joint",
    "left_hip_yaw_joint",
    "left_knee_joint",
    "left_ankle_pitch_joint",
    "left_ankle_roll_joint",
    "right_hip_pitch_joint",
    "right_hip_roll_joint",
    "right_hip_yaw_joint",
    "right_knee_joint",
    "right_ankle_pitch_joint",
    "right_ankle_roll_joint",
    "waist_yaw_joint",
    "waist_roll_joint",
    "waist_pitch_joint",
    "left_shoulder_pitch_joint",
    "left_shoulder_roll_joint",
    "left_shoulder_yaw_joint",
    "left_elbow_joint",
    "left_wrist_roll_joint",
    "left_wrist_pitch_joint",
    "left_wrist_yaw_joint",
    "right_shoulder_pitch_joint",
    "right_shoulder_roll_joint",
    "right_shoulder_yaw_joint",
    "right_elbow_joint",
    "right_wrist_roll_joint",
    "right_wrist_pitch_joint",
    "right_wrist_yaw_joint",
];

/// Default G1 position limits (`name, lower, upper` per line).
pub const G1_LIMITS: &str = include_str!("../../data/g1_29dof.limits");
/// Default G1 action mirror map (`index, mirrored_index, sign` per line).
pub const G1_MIRROR: &str = include_str!("../../data/g1_29dof.mirror");

pub fn joint_index(name: &str) -> Option<usize> {
    JOINT_NAMES.iter().position(|n| *n == name)
}

/// One joint's position range in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct JointRange {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

/// Splits a config line on commas and/or whitespace, ignoring `#` comments.
pub(crate) fn config_fields(line: &str) -> Option<Vec<&str>> {
    let line = line.split('#').next().unwrap_or("").trim();
    if line.is_empty() {
        return None;
    }
    Some(
        line.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect(),
    )
}

/// Parses a joint limit table. Exactly 29 rows are required, in index order.
pub fn parse_joint_limits(text: &str) -> Result<Vec<JointRange>> {
    let mut out = Vec::with_capacity(NUM_JOINTS);
    for (lineno, line) in text.lines().enumerate() {
        let Some(fields) = config_fields(line) else {
            continue;
        };
        let bad = |what: &str| MotionError::Format(format!("limits line {}: {what}", lineno + 1));
        if fields.len() != 3 {
            return Err(bad("expected `name, lower, upper`"));
        }
        let lower: f64 = fields[1].parse().map_err(|_| bad("bad lower bound"))?;
        let upper: f64 = fields[2].parse().map_err(|_| bad("bad upper bound"))?;
        if !(lower.is_finite() && upper.is_finite()) || lower >= upper {
            return Err(bad("need finite lower < upper"));
        }
        out.push(JointRange {
            name: fields[0].to_string(),
            lower,
            upper,
        });
    }
    if out.len() != NUM_JOINTS {
        return Err(MotionError::LengthMismatch {
            expected: NUM_JOINTS,
            actual: out.len(),
        });
    }
    Ok(out)
}

pub fn g1_joint_limits() -> Vec<JointRange> {
    parse_joint_limits(G1_LIMITS).expect("bundled G1 limit table is valid")
}
