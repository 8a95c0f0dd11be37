// Copyright 2026 The ddgrape Authors
// SPDX-License-Identifier: Apache-2.0

//! Dynamical-decoupling schemes and their placement inside a pulse.
//!
//! A scheme is written `<phases>:<flip_deg>:<spacing>`, e.g. `xy:90:1000`
//! places alternating `(π/2)_x`, `(π/2)_y` pulses in the middle of every
//! block of 1000 segments. Each DD pulse occupies exactly one segment of
//! amplitude `β/Δt` and acts on both spins at once.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{collective_operator, trace, Axis, Mat4, Spectral, Unitary};
use crate::nmr::{ControlSegment, PulseSequence};

/// Rotation axis of a DD pulse in the rotating frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    X,
    Y,
}

impl Phase {
    fn as_char(self) -> char {
        match self {
            Phase::X => 'x',
            Phase::Y => 'y',
        }
    }

    fn axis(self) -> Axis {
        match self {
            Phase::X => Axis::X,
            Phase::Y => Axis::Y,
        }
    }
}

/// DD flip angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FlipAngle {
    Deg90,
    Deg180,
}

impl FlipAngle {
    pub fn degrees(self) -> u32 {
        match self {
            FlipAngle::Deg90 => 90,
            FlipAngle::Deg180 => 180,
        }
    }

    pub fn radians(self) -> f64 {
        match self {
            FlipAngle::Deg90 => PI / 2.0,
            FlipAngle::Deg180 => PI,
        }
    }

    pub fn from_degrees(deg: u32) -> Result<Self> {
        match deg {
            90 => Ok(FlipAngle::Deg90),
            180 => Ok(FlipAngle::Deg180),
            other => Err(Error::Config(format!(
                "DD flip angle must be 90 or 180 degrees, got {other}"
            ))),
        }
    }
}

/// Where the pulse sits inside its block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Placement {
    #[default]
    Middle,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DDScheme {
    pub flip: FlipAngle,
    /// Cyclic phase pattern, non-empty.
    pub phases: Vec<Phase>,
    /// Segments per block, at least 1.
    pub spacing: usize,
    pub placement: Placement,
}

impl DDScheme {
    pub fn new(flip: FlipAngle, phases: Vec<Phase>, spacing: usize) -> Result<Self> {
        if phases.is_empty() {
            return Err(Error::Config("DD phase pattern is empty".into()));
        }
        if spacing == 0 {
            return Err(Error::Config("DD spacing must be >= 1".into()));
        }
        Ok(DDScheme {
            flip,
            phases,
            spacing,
            placement: Placement::Middle,
        })
    }
}

impl fmt::Display for DDScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.phases {
            write!(f, "{}", p.as_char())?;
        }
        write!(f, ":{}:{}", self.flip.degrees(), self.spacing)
    }
}

impl FromStr for DDScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Config(format!("bad DD scheme `{s}`: {msg}"));
        let mut parts = s.trim().split(':');
        let (Some(phases), Some(flip), Some(spacing), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad("expected <phases>:<flip_deg>:<spacing>"));
        };
        let phases = phases
            .chars()
            .map(|c| match c {
                'x' | 'X' => Ok(Phase::X),
                'y' | 'Y' => Ok(Phase::Y),
                _ => Err(bad("phases must be made of x and y")),
            })
            .collect::<Result<Vec<_>>>()?;
        let flip: u32 = flip
            .parse()
            .map_err(|_| bad("flip angle is not an integer"))?;
        let spacing: usize = spacing
            .parse()
            .map_err(|_| bad("spacing is not an integer"))?;
        DDScheme::new(FlipAngle::from_degrees(flip)?, phases, spacing)
    }
}

/// A protection choice: no DD at all, or a DD scheme.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SchemeSpec {
    Unprotected,
    Protected(DDScheme),
}

impl SchemeSpec {
    /// File-name friendly form: `none`, `xy-90-100`.
    pub fn slug(&self) -> String {
        self.to_string().replace(':', "-")
    }

    pub fn scheme(&self) -> Option<&DDScheme> {
        match self {
            SchemeSpec::Unprotected => None,
            SchemeSpec::Protected(s) => Some(s),
        }
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeSpec::Unprotected => f.write_str("none"),
            SchemeSpec::Protected(s) => s.fmt(f),
        }
    }
}

impl FromStr for SchemeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "none" {
            Ok(SchemeSpec::Unprotected)
        } else {
            s.parse().map(SchemeSpec::Protected)
        }
    }
}

impl serde::Serialize for SchemeSpec {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for SchemeSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DDPulse {
    /// 0-based segment index.
    pub index: usize,
    pub flip: FlipAngle,
    pub phase: Phase,
}

/// Positions and rotations of the `M` DD pulses of a gate.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DDPlacement {
    pub pulses: Vec<DDPulse>,
}

impl DDPlacement {
    pub fn indices(&self) -> Vec<usize> {
        self.pulses.iter().map(|p| p.index).collect()
    }

    pub fn len(&self) -> usize {
        self.pulses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pulses.is_empty()
    }

    /// Ideal propagators `P_1 .. P_M`.
    pub fn ideal_propagators(&self) -> Vec<Unitary> {
        self.pulses
            .iter()
            .map(|p| ideal_dd_propagator(p.flip, p.phase))
            .collect()
    }

    /// True when `P_M ... P_1` is the identity up to a global phase.
    pub fn is_cyclic(&self) -> bool {
        let net = self
            .ideal_propagators()
            .iter()
            .fold(Mat4::identity(), |acc, p| p.matrix() * acc);
        (trace(&net).norm() - 4.0).abs() < 1e-10
    }
}

/// One pulse in the middle of every complete block of `spacing` segments;
/// phases cycle through the pattern. A trailing partial block gets none.
pub fn place_dd(n_segments: usize, scheme: &DDScheme) -> Result<DDPlacement> {
    if n_segments < scheme.spacing {
        return Err(Error::Config(format!(
            "{n_segments} segments cannot host DD spacing {}",
            scheme.spacing
        )));
    }
    let blocks = n_segments / scheme.spacing;
    let offset = match scheme.placement {
        Placement::Middle => scheme.spacing / 2,
    };
    let pulses = (0..blocks)
        .map(|b| DDPulse {
            index: b * scheme.spacing + offset,
            flip: scheme.flip,
            phase: scheme.phases[b % scheme.phases.len()],
        })
        .collect();
    Ok(DDPlacement { pulses })
}

/// Collective rotation `exp(-i β (I_1α + I_2α))`.
pub fn ideal_dd_propagator(flip: FlipAngle, phase: Phase) -> Unitary {
    let generator = collective_operator(phase.axis());
    Unitary::from_matrix_unchecked(Spectral::new(&generator).exp(flip.radians()))
}

/// Freezes the placed segments at amplitude `β/Δt` along their phase axis.
///
/// Fails when a DD pulse would need more than `omega_max`.
pub fn freeze_into(pulse: &PulseSequence, placement: &DDPlacement) -> Result<PulseSequence> {
    let mut out = pulse.clone();
    for p in &placement.pulses {
        let amplitude = p.flip.radians() / pulse.dt;
        if amplitude > pulse.omega_max * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "DD pulse of {} deg needs {amplitude:.6e} rad/s > omega_max {:.6e}",
                p.flip.degrees(),
                pulse.omega_max
            )));
        }
        let seg = out.segments.get_mut(p.index).ok_or_else(|| {
            Error::Config(format!(
                "DD index {} outside pulse of {} segments",
                p.index,
                pulse.len()
            ))
        })?;
        *seg = match p.phase {
            Phase::X => ControlSegment {
                omega_x: amplitude,
                omega_y: 0.0,
                frozen: true,
            },
            Phase::Y => ControlSegment {
                omega_x: 0.0,
                omega_y: amplitude,
                frozen: true,
            },
        };
    }
    Ok(out)
}

/// Result of comparing the interleaved and toggling-frame products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TogglingReport {
    /// Max entrywise deviation between `U_{M+1} P_M U_M ... P_1 U_1` and
    /// `T_{M+1} ∏_{j=1}^{M+1} T_j^† U_j T_j`, after global-phase alignment.
    pub deviation: f64,
    /// Comparison against `U_{M+1} ∏_{j=1}^{M} T_j^† U_j T_j`, which only
    /// holds for cyclic schemes.
    pub deviation_without_net_rotation: f64,
    /// Whether `T_{M+1}` is the identity up to a phase.
    pub cyclic: bool,
}

/// Evaluates the protected propagator both as the interleaved product and in
/// the toggling frame, for ideal instantaneous DD pulses.
///
/// `unitaries` holds `U_1 .. U_{M+1}` and must have one more element than the
/// placement has pulses.
pub fn toggling_check(unitaries: &[Unitary], placement: &DDPlacement) -> Result<TogglingReport> {
    let m = placement.len();
    if unitaries.len() != m + 1 {
        return Err(Error::LengthMismatch {
            left: unitaries.len(),
            right: m + 1,
        });
    }
    let props = placement.ideal_propagators();

    let mut interleaved = *unitaries[0].matrix();
    for (p, u) in props.iter().zip(&unitaries[1..]) {
        interleaved = u.matrix() * p.matrix() * interleaved;
    }

    // T_1 = 1, T_{j+1} = P_j T_j
    let mut frame = Mat4::identity();
    let mut toggled = Mat4::identity();
    for (j, u) in unitaries[..m].iter().enumerate() {
        toggled = frame.adjoint() * u.matrix() * frame * toggled;
        frame = props[j].matrix() * frame;
    }
    let net = frame;
    let last = unitaries[m].matrix();
    let with_net = net * (net.adjoint() * last * net) * toggled;
    let without_net = last * toggled;

    let reference = Unitary::from_matrix_unchecked(interleaved);
    Ok(TogglingReport {
        deviation: reference.phase_aligned_distance(&Unitary::from_matrix_unchecked(with_net)),
        deviation_without_net_rotation: reference
            .phase_aligned_distance(&Unitary::from_matrix_unchecked(without_net)),
        cyclic: (trace(&net).norm() - 4.0).abs() < 1e-10,
    })
}
