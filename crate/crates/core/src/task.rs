use std::fmt;
use std::str::FromStr;

/// Acceptability decision problems handled by the solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Task {
    DcCo,
    DcSt,
    DsPr,
    DsSt,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unsupported task `{0}` (expected one of DC-CO, DC-ST, DS-PR, DS-ST)")]
pub struct UnknownTask(pub String);

impl Task {
    pub const ALL: [Task; 4] = [Task::DcCo, Task::DcSt, Task::DsPr, Task::DsSt];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::DcCo => "DC-CO",
            Task::DcSt => "DC-ST",
            Task::DsPr => "DS-PR",
            Task::DsSt => "DS-ST",
        }
    }

    pub fn is_credulous(self) -> bool {
        matches!(self, Task::DcCo | Task::DcSt)
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            Task::DcCo => 0,
            Task::DcSt => 1,
            Task::DsPr => 2,
            Task::DsSt => 3,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        Task::ALL.get(code as usize).copied()
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Task {
    type Err = UnknownTask;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownTask(s.to_string()))
    }
}

/// Yes/no answer to an acceptability query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decision {
    Yes,
    No,
}

impl Decision {
    pub fn from_bool(accepted: bool) -> Self {
        if accepted {
            Decision::Yes
        } else {
            Decision::No
        }
    }

    pub fn is_yes(self) -> bool {
        self == Decision::Yes
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::Yes => "YES",
            Decision::No => "NO",
        })
    }
}
