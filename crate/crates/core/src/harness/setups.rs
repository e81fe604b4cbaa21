use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::env::BanditEnv;
use crate::error::{Error, Result};

/// Mean of the best arm in every benchmark setup.
pub const BEST_MEAN: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetupKind {
    /// One group of suboptimal arms at 0.6.
    Setup1,
    /// Two groups: `m - 1` arms at `0.7 - 2/K`, the rest at 0.4.
    Setup2,
    /// Three groups: `0.7 - 2/K`, `0.7 - 4/K`, then 0.4.
    Setup3,
    /// Arithmetic gaps `0.6 (i-1)/(K-1)`.
    Setup4,
    /// Geometric gaps `0.01 (1 + 4/K)^(i-2)`.
    Setup5,
    /// One real competitor at `0.7 - 1/(2K)`, the rest at 0.2.
    Setup6,
    /// Seven arms with gaps `0.6^(8-i)`.
    Geo7,
}

impl SetupKind {
    pub const ALL: [SetupKind; 7] = [
        Self::Setup1,
        Self::Setup2,
        Self::Setup3,
        Self::Setup4,
        Self::Setup5,
        Self::Setup6,
        Self::Geo7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Setup1 => "setup1",
            Self::Setup2 => "setup2",
            Self::Setup3 => "setup3",
            Self::Setup4 => "setup4",
            Self::Setup5 => "setup5",
            Self::Setup6 => "setup6",
            Self::Geo7 => "geo7",
        }
    }

    /// Arm counts the setup is defined for.
    pub fn allowed_arms(self) -> &'static [usize] {
        match self {
            Self::Geo7 => &[7],
            _ => &[40, 120],
        }
    }
}

impl fmt::Display for SetupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SetupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        let s = s.strip_prefix("setup").unwrap_or(&s);
        Ok(match s {
            "1" => Self::Setup1,
            "2" => Self::Setup2,
            "3" => Self::Setup3,
            "4" => Self::Setup4,
            "5" => Self::Setup5,
            "6" => Self::Setup6,
            "geo7" | "7" => Self::Geo7,
            _ => return Err(Error::Unknown(format!("setup {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SetupId {
    pub kind: SetupKind,
    pub num_arms: usize,
}

impl SetupId {
    pub fn new(kind: SetupKind, num_arms: usize) -> Result<Self> {
        if !kind.allowed_arms().contains(&num_arms) {
            return Err(Error::OutOfRange(format!("K = {num_arms} for {kind}")));
        }
        Ok(Self { kind, num_arms })
    }

    pub fn geo7() -> Self {
        Self {
            kind: SetupKind::Geo7,
            num_arms: 7,
        }
    }
}

impl fmt::Display for SetupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)
    }
}

/// Group size parameter `m = ceil(ln(K/2) + 1)` of setups 2 and 3.
pub fn group_size(num_arms: usize) -> usize {
    ((num_arms as f64 / 2.0).ln() + 1.0).ceil() as usize
}

/// Mean vector of a benchmark setup, best arm first.
pub fn setup_means(id: SetupId) -> Result<Vec<f64>> {
    let SetupId { kind, num_arms: k } = SetupId::new(id.kind, id.num_arms)?;
    let kf = k as f64;
    let mu = BEST_MEAN;
    // `i` below is the 1-based arm rank.
    let means = (1..=k).map(|i| {
        if i == 1 {
            return mu;
        }
        match kind {
            SetupKind::Setup1 => 0.6,
            SetupKind::Setup2 => {
                if i <= group_size(k) {
                    mu - 2.0 / kf
                } else {
                    0.4
                }
            }
            SetupKind::Setup3 => {
                let m = group_size(k);
                if i <= m {
                    mu - 2.0 / kf
                } else if i <= 2 * m {
                    mu - 4.0 / kf
                } else {
                    0.4
                }
            }
            SetupKind::Setup4 => mu - 0.6 * (i - 1) as f64 / (kf - 1.0),
            SetupKind::Setup5 => mu - 0.01 * (1.0 + 4.0 / kf).powi(i as i32 - 2),
            SetupKind::Setup6 => {
                if i == 2 {
                    mu - 1.0 / (2.0 * kf)
                } else {
                    0.2
                }
            }
            SetupKind::Geo7 => mu - 0.6f64.powi(8 - i as i32),
        }
    });
    Ok(means.collect())
}

pub fn make_setup(id: SetupId) -> Result<BanditEnv> {
    BanditEnv::bernoulli(setup_means(id)?)
}
