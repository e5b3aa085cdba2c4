//! Magnetic lattices satisfying the rationality condition.
//!
//! In the dimensionless magnetic units used throughout, the unit cell of the
//! lattice must enclose area 2*pi (one flux quantum) so that the two magnetic
//! translations commute. That fixes the spacing: a^2 = 4*pi/sqrt(3) for the
//! triangular lattice and a^2 = 2*pi for the square one.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeShape {
    Triangular,
    Square,
}

impl fmt::Display for LatticeShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeShape::Triangular => write!(f, "triangular"),
            LatticeShape::Square => write!(f, "square"),
        }
    }
}

impl FromStr for LatticeShape {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "triangular" | "tri" => Ok(LatticeShape::Triangular),
            "square" | "sq" => Ok(LatticeShape::Square),
            other => Err(format!("unknown lattice shape `{other}`")),
        }
    }
}

/// Which primitive direction the occupied sublattice decimates by d.
///
/// `AlongA2` is the (Z, dZ) pattern: every site along a_1, one in d along
/// a_2. The mirrored choice is mathematically equivalent but can differ
/// numerically in energy sums, so it stays selectable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecimationPattern {
    AlongA2,
    AlongA1,
}

impl fmt::Display for DecimationPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecimationPattern::AlongA2 => write!(f, "along_a2"),
            DecimationPattern::AlongA1 => write!(f, "along_a1"),
        }
    }
}

impl FromStr for DecimationPattern {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "along_a2" | "a2" => Ok(DecimationPattern::AlongA2),
            "along_a1" | "a1" => Ok(DecimationPattern::AlongA1),
            other => Err(format!("unknown decimation pattern `{other}`")),
        }
    }
}

/// Lattice geometry plus the occupied-sublattice period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub shape: LatticeShape,
    /// Spacing fixed by the rationality condition.
    pub a: f64,
    /// Primitive vectors a_1, a_2.
    pub basis: [[f64; 2]; 2],
    /// Sublattice period (filling factor 1/d).
    pub d: u32,
    pub pattern: DecimationPattern,
}

/// Powers (n, m) of the magnetic translations T_1, T_2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SiteIndex {
    pub n: i64,
    pub m: i64,
}

impl SiteIndex {
    pub fn new(n: i64, m: i64) -> Self {
        SiteIndex { n, m }
    }
}

impl fmt::Display for SiteIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n, self.m)
    }
}

/// Build a lattice with spacing from the shape's rationality condition.
pub fn make_lattice(shape: LatticeShape, d: u32, pattern: DecimationPattern) -> LatticeSpec {
    assert!(d >= 1, "sublattice period must be >= 1");
    match shape {
        LatticeShape::Triangular => {
            let a = (4.0 * PI / 3.0f64.sqrt()).sqrt();
            LatticeSpec {
                shape,
                a,
                basis: [[a, 0.0], [a / 2.0, a * 3.0f64.sqrt() / 2.0]],
                d,
                pattern,
            }
        }
        LatticeShape::Square => {
            let a = (2.0 * PI).sqrt();
            LatticeSpec {
                shape,
                a,
                basis: [[a, 0.0], [0.0, a]],
                d,
                pattern,
            }
        }
    }
}

impl LatticeSpec {
    /// a1_x a2_y - a1_y a2_x; equals 2*pi by construction.
    pub fn cell_area(&self) -> f64 {
        self.basis[0][0] * self.basis[1][1] - self.basis[0][1] * self.basis[1][0]
    }

    /// The reciprocal period 2*pi/a that appears in every phase factor.
    pub fn k_unit(&self) -> f64 {
        2.0 * PI / self.a
    }

    /// Filling factor carried by the sublattice.
    pub fn filling(&self) -> f64 {
        1.0 / self.d as f64
    }
}

/// Localization center of T_1^n T_2^m applied to a function centered at the
/// origin.
pub fn site_position(lat: &LatticeSpec, s: SiteIndex) -> [f64; 2] {
    let (n, m) = (s.n as f64, s.m as f64);
    match lat.shape {
        LatticeShape::Triangular => [-lat.a * (n + m / 2.0), -m * lat.k_unit()],
        LatticeShape::Square => [-lat.a * n, -lat.a * m],
    }
}

pub fn site_distance(lat: &LatticeSpec, s: SiteIndex) -> f64 {
    let [x, y] = site_position(lat, s);
    x.hypot(y)
}

/// All occupied sublattice sites within `radius` of the origin, origin
/// excluded, ordered by distance then lexicographically by (n, m).
pub fn sublattice_sites(lat: &LatticeSpec, radius: f64) -> Vec<SiteIndex> {
    assert!(radius > 0.0, "radius must be positive");
    let d = lat.d as i64;
    // conservative index bounds: |X| and |Y| grow linearly in |n|, |m|
    let n_bound = (radius / lat.a).ceil() as i64 + (2.0 * radius / lat.a).ceil() as i64 + 2;
    let m_bound = (radius / (lat.k_unit().min(lat.a))).ceil() as i64 + 2;
    let mut sites = Vec::new();
    for n_raw in -n_bound..=n_bound {
        for m_raw in -m_bound..=m_bound {
            let (n, m) = match lat.pattern {
                DecimationPattern::AlongA2 => (n_raw, d * m_raw),
                DecimationPattern::AlongA1 => (d * n_raw, m_raw),
            };
            if n == 0 && m == 0 {
                continue;
            }
            let s = SiteIndex::new(n, m);
            if site_distance(lat, s) <= radius {
                sites.push(s);
            }
        }
    }
    sites.sort_by(|p, q| {
        let (dp, dq) = (site_distance(lat, *p), site_distance(lat, *q));
        dp.partial_cmp(&dq)
            .unwrap()
            .then(p.n.cmp(&q.n))
            .then(p.m.cmp(&q.m))
    });
    sites
}
