//! NACA 4-digit airfoil coordinates and spin-assignment decoding.
//!
//! Camber line: parabolic arcs with maximum A/100 at B/10 chord. Thickness:
//! the standard five-coefficient polynomial scaled by T/100, applied
//! perpendicular to the camber line. The closed trailing edge variant swaps
//! the final coefficient -0.1015 for -0.1036.

use crate::error::{Error, Result};
use crate::pbool::{encode_value, SpinRole, VariableRegistry};
use crate::surrogate::DesignSpace;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Fraction of split copies allowed to disagree before decoding refuses.
const CONSENSUS_ERROR_THRESHOLD: f64 = 0.25;

/// NACA 4-digit parameters in the conventional percent units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AirfoilParams {
    /// Maximum camber A, percent of chord (first digit).
    pub max_camber: f64,
    /// Location of maximum camber B, tenths of chord (second digit).
    pub camber_location: f64,
    /// Maximum thickness T, percent of chord (last two digits).
    pub max_thickness: f64,
    pub chord: f64,
}

impl AirfoilParams {
    pub fn new(max_camber: f64, camber_location: f64, max_thickness: f64) -> Self {
        Self {
            max_camber,
            camber_location,
            max_thickness,
            chord: 1.0,
        }
    }

    /// Hard geometry errors only; range advisories come from
    /// [`AirfoilParams::range_warnings`].
    pub fn validate(&self) -> Result<()> {
        if self.max_thickness < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "negative thickness {}",
                self.max_thickness
            )));
        }
        if self.chord <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "chord must be positive, got {}",
                self.chord
            )));
        }
        if self.max_camber > 0.0 && !(self.camber_location > 0.0 && self.camber_location < 10.0) {
            return Err(Error::InvalidParameter(format!(
                "camber location {} incompatible with nonzero camber",
                self.camber_location
            )));
        }
        Ok(())
    }

    /// Advisories when parameters leave the series' usual design box
    /// (A in [0,6], B in [2,5], T in [6,20]).
    pub fn range_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        if !(0.0..=6.0).contains(&self.max_camber) {
            warnings.push(format!("camber A = {} outside [0, 6]", self.max_camber));
        }
        if self.max_camber > 0.0 && !(2.0..=5.0).contains(&self.camber_location) {
            warnings.push(format!(
                "camber location B = {} outside [2, 5]",
                self.camber_location
            ));
        }
        if !(6.0..=20.0).contains(&self.max_thickness) {
            warnings.push(format!(
                "thickness T = {} outside [6, 20]",
                self.max_thickness
            ));
        }
        warnings
    }

    /// Conventional 4-digit designation, e.g. 2412.
    pub fn designation(&self) -> String {
        format!(
            "{}{}{:02}",
            self.max_camber.round() as i64,
            self.camber_location.round() as i64,
            self.max_thickness.round() as i64
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrailingEdge {
    Closed,
    Open,
}

/// Upper and lower surfaces, each ordered leading edge to trailing edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AirfoilCoordinates {
    pub name: String,
    pub upper: Vec<(f64, f64)>,
    pub lower: Vec<(f64, f64)>,
    pub closed_te: bool,
}

impl AirfoilCoordinates {
    /// Selig-format coordinate text: name header, then points running
    /// trailing edge -> leading edge -> trailing edge.
    pub fn to_selig(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.name);
        for (x, y) in self.upper.iter().rev() {
            let _ = writeln!(out, "{x:.6} {y:.6}");
        }
        for (x, y) in self.lower.iter().skip(1) {
            let _ = writeln!(out, "{x:.6} {y:.6}");
        }
        out
    }
}

/// Cosine-spaced NACA 4-digit surface coordinates (closed trailing edge).
pub fn naca4_coordinates(p: &AirfoilParams, points_per_surface: usize) -> Result<AirfoilCoordinates> {
    naca4_coordinates_with(p, points_per_surface, TrailingEdge::Closed)
}

pub fn naca4_coordinates_with(
    p: &AirfoilParams,
    points_per_surface: usize,
    te: TrailingEdge,
) -> Result<AirfoilCoordinates> {
    p.validate()?;
    if points_per_surface < 10 {
        return Err(Error::InvalidParameter(format!(
            "need at least 10 points per surface, got {points_per_surface}"
        )));
    }
    let m = p.max_camber / 100.0;
    let loc = p.camber_location / 10.0;
    let t = p.max_thickness / 100.0;
    let last_coeff = match te {
        TrailingEdge::Closed => -0.1036,
        TrailingEdge::Open => -0.1015,
    };

    let mut upper = Vec::with_capacity(points_per_surface);
    let mut lower = Vec::with_capacity(points_per_surface);
    for k in 0..points_per_surface {
        let theta = std::f64::consts::PI * k as f64 / (points_per_surface - 1) as f64;
        let x = 0.5 * (1.0 - theta.cos());
        let yt = 5.0
            * t
            * (0.2969 * x.sqrt() - 0.1260 * x - 0.3516 * x * x + 0.2843 * x * x * x
                + last_coeff * x * x * x * x);
        let (yc, dyc) = if m == 0.0 {
            (0.0, 0.0)
        } else if x <= loc {
            (
                m / (loc * loc) * (2.0 * loc * x - x * x),
                2.0 * m / (loc * loc) * (loc - x),
            )
        } else {
            let d = 1.0 - loc;
            (
                m / (d * d) * ((1.0 - 2.0 * loc) + 2.0 * loc * x - x * x),
                2.0 * m / (d * d) * (loc - x),
            )
        };
        let angle = dyc.atan();
        let (sin_a, cos_a) = angle.sin_cos();
        upper.push((
            p.chord * (x - yt * sin_a),
            p.chord * (yc + yt * cos_a),
        ));
        lower.push((
            p.chord * (x + yt * sin_a),
            p.chord * (yc - yt * cos_a),
        ));
    }

    Ok(AirfoilCoordinates {
        name: format!("NACA {}", p.designation()),
        upper,
        lower,
        closed_te: te == TrailingEdge::Closed,
    })
}

/// Design point recovered from a spin assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodedDesign {
    /// (variable name, decoded value) in design-space order.
    pub values: Vec<(String, f64)>,
    pub warnings: Vec<String>,
}

impl DecodedDesign {
    pub fn point(&self) -> Vec<f64> {
        self.values.iter().map(|(_, v)| *v).collect()
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| *v)
    }
}

/// Applies the fixed-point decode per variable. Auxiliary and copy spins are
/// ignored for the value, but split copies are validated for consensus first:
/// disagreements warn, and past a 25% disagreement fraction decoding refuses.
pub fn decode_design(
    assignment: &[u8],
    registry: &VariableRegistry,
    space: &DesignSpace,
) -> Result<DecodedDesign> {
    if assignment.len() != registry.len() {
        return Err(Error::DimensionMismatch {
            expected: registry.len(),
            got: assignment.len(),
        });
    }

    let mut warnings = Vec::new();
    let mut copies = 0usize;
    let mut violated = 0usize;
    for e in registry.entries() {
        if let SpinRole::SplitCopy { parent, copy } = e.role {
            copies += 1;
            if assignment[e.spin] != assignment[parent] {
                violated += 1;
                warnings.push(format!(
                    "split copy {} of spin {parent} (spin {}) disagrees with its parent",
                    copy, e.spin
                ));
            }
        }
    }
    if copies > 0 && violated as f64 > CONSENSUS_ERROR_THRESHOLD * copies as f64 {
        return Err(Error::CopyConsensus {
            violated,
            total: copies,
        });
    }

    let mut values = Vec::with_capacity(space.len());
    for (i, v) in space.variables().iter().enumerate() {
        let spins = registry.design_bits(&v.name);
        if spins.len() != v.bits as usize {
            return Err(Error::RegistryMismatch(format!(
                "variable '{}' has {} design bits in the registry, expected {}",
                v.name,
                spins.len(),
                v.bits
            )));
        }
        let bits: Vec<u8> = spins.iter().map(|&s| assignment[s]).collect();
        values.push((v.name.clone(), encode_value(space, i, &bits)?));
    }
    Ok(DecodedDesign { values, warnings })
}
