//! Per-command parameter tables.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CommandKind {
    BsClosed,
    BsSpectral,
    Opo,
    Undepleted,
    PositiveP,
    Intracavity,
}

pub struct ParamSpec {
    pub key: &'static str,
    pub default: f64,
    pub help: &'static str,
}

const fn p(key: &'static str, default: f64, help: &'static str) -> ParamSpec {
    ParamSpec { key, default, help }
}

const TWO_THIRDS: f64 = 2.0 / 3.0;

const BS_CLOSED: &[ParamSpec] = &[
    p("r", 1.0, "squeezing parameter of each input"),
    p("mu", TWO_THIRDS, "reflectivity of the first splitter"),
    p("nu", 0.5, "reflectivity of the second splitter"),
];

const BS_SPECTRAL: &[ParamSpec] = &[
    p("gamma-a", 1.0, "OPO signal damping"),
    p("gamma-b", 1.0, "OPO pump damping"),
    p("kappa", 1e-2, "OPO nonlinearity"),
    p("pump-ratio", 0.5, "pump amplitude over its critical value"),
    p("mu", TWO_THIRDS, "reflectivity of the first splitter"),
    p("nu", 0.5, "reflectivity of the second splitter"),
];

const OPO: &[ParamSpec] = &[
    p("gamma-a", 1.0, "signal damping"),
    p("gamma-b", 1.0, "pump damping"),
    p("kappa", 1e-2, "nonlinearity"),
    p("pump-ratio", 0.5, "pump amplitude over its critical value"),
];

const UNDEPLETED: &[ParamSpec] = &[p("tau", 1.0, "scaled interaction time")];

const POSITIVE_P: &[ParamSpec] = &[
    p("chi", 1e-2, "nonlinearity"),
    p("beta0", 1e3, "initial real pump amplitude"),
    p("alpha0", 0.0, "initial real signal amplitude"),
    p("traj", 1e4, "number of trajectories"),
    p("dt", 1e-4, "step in scaled time"),
    p("zeta-max", 0.5, "end of the scaled-time window"),
    p("batches", 32.0, "batches for standard errors"),
    p("intervals", 25.0, "output intervals on the time grid"),
    p("divergence-factor", 1e6, "divergence cut in units of beta0"),
];

const INTRACAVITY: &[ParamSpec] = &[
    p("gamma", 10.0, "pump-mode cavity damping"),
    p("kappa", 1.0, "signal-mode cavity damping"),
    p("chi", 1e-2, "nonlinearity"),
    p("pump-ratio", 0.5, "pump amplitude over threshold"),
];

impl CommandKind {
    pub const ALL: [CommandKind; 6] = [
        CommandKind::BsClosed,
        CommandKind::BsSpectral,
        CommandKind::Opo,
        CommandKind::Undepleted,
        CommandKind::PositiveP,
        CommandKind::Intracavity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CommandKind::BsClosed => "bs-closed",
            CommandKind::BsSpectral => "bs-spectral",
            CommandKind::Opo => "opo",
            CommandKind::Undepleted => "undepleted",
            CommandKind::PositiveP => "positive-p",
            CommandKind::Intracavity => "intracavity",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn about(self) -> &'static str {
        match self {
            CommandKind::BsClosed => "Three squeezed inputs through the two-splitter network",
            CommandKind::BsSpectral => "Three OPO outputs through the network, per frequency",
            CommandKind::Opo => "Output quadrature spectra of a single OPO",
            CommandKind::Undepleted => "Concurrent down-conversion with undepleted pumps",
            CommandKind::PositiveP => "Positive-P ensemble with pump depletion",
            CommandKind::Intracavity => "Linearized output spectra of the pumped cavity",
        }
    }

    pub fn params(self) -> &'static [ParamSpec] {
        match self {
            CommandKind::BsClosed => BS_CLOSED,
            CommandKind::BsSpectral => BS_SPECTRAL,
            CommandKind::Opo => OPO,
            CommandKind::Undepleted => UNDEPLETED,
            CommandKind::PositiveP => POSITIVE_P,
            CommandKind::Intracavity => INTRACAVITY,
        }
    }

    /// Default frequency grid `(start, stop, points)` for spectral commands.
    pub fn default_omega_grid(self) -> Option<(f64, f64, usize)> {
        match self {
            CommandKind::BsSpectral | CommandKind::Opo => Some((0.0, 5.0, 101)),
            CommandKind::Intracavity => Some((0.0, 20.0, 401)),
            _ => None,
        }
    }

    pub fn sweepable(self) -> bool {
        self != CommandKind::PositiveP
    }

    pub fn uses_seed(self) -> bool {
        self == CommandKind::PositiveP
    }
}

impl fmt::Display for CommandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
