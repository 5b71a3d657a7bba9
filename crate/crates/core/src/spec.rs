//! JSON input formats for bodies, ribbons, profiles and rods, shared by the
//! command line tool and tests.

use std::io::BufRead;
use std::path::Path;

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::frames::{frenet_ribbon, perpendicular_unit, Frame, Ribbon, SampledRibbon};
use crate::rod::{profile_moments, Profile, ProfileShape, RodSpec};

/// Body description:
/// `{"type":"ball","center":[..],"radius":r}`,
/// `{"type":"ellipsoid","semi_axes":[a,b,c],"center":[..]}`, or
/// `{"type":"superquadric","semi_axes":[..],"exponents":[..],"center":[..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BodySpec {
    Ball {
        #[serde(default)]
        center: [f64; 3],
        radius: f64,
    },
    Ellipsoid {
        semi_axes: [f64; 3],
        #[serde(default)]
        center: [f64; 3],
    },
    Superquadric {
        semi_axes: [f64; 3],
        exponents: [f64; 3],
        #[serde(default)]
        center: [f64; 3],
    },
}

impl BodySpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn build(&self) -> Result<ConvexBody> {
        match *self {
            Self::Ball { center, radius } => ConvexBody::ball(Point3::from(center), radius),
            Self::Ellipsoid { semi_axes, center } => {
                ConvexBody::ellipsoid(Point3::from(center), semi_axes)
            }
            Self::Superquadric {
                semi_axes,
                exponents,
                center,
            } => ConvexBody::superquadric(Point3::from(center), semi_axes, exponents),
        }
    }
}

/// Ribbon description. `csv` points at a full ribbon table (frames and
/// curvatures); `points` at an `s,x,y,z` arc-length sample table that gets
/// the curvature-adapted framing.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RibbonSpec {
    Line {
        #[serde(default)]
        origin: [f64; 3],
        direction: [f64; 3],
        #[serde(default)]
        normal: Option<[f64; 3]>,
        length: f64,
    },
    CircularArc {
        #[serde(default)]
        center: [f64; 3],
        radius: f64,
        /// Swept angle in radians; 2*pi closes the circle.
        angle: f64,
        #[serde(default)]
        e1: Option<[f64; 3]>,
        #[serde(default)]
        e2: Option<[f64; 3]>,
    },
    Helix {
        kappa: f64,
        tau: f64,
        length: f64,
    },
    Csv {
        path: String,
    },
    Points {
        path: String,
    },
}

impl RibbonSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn build(&self) -> Result<Ribbon> {
        match self {
            Self::Line {
                origin,
                direction,
                normal,
                length,
            } => {
                let dir = Vector3::from(*direction);
                if dir.norm() < 1e-300 {
                    return Err(Error::InvalidInput("line direction is zero".into()));
                }
                let t = dir.normalize();
                let n = match normal {
                    Some(n) => {
                        let n = Vector3::from(*n);
                        let n = n - t * t.dot(&n);
                        if n.norm() < 1e-10 {
                            return Err(Error::InvalidInput(
                                "line normal is parallel to the direction".into(),
                            ));
                        }
                        n.normalize()
                    }
                    None => perpendicular_unit(&t),
                };
                Ribbon::line(Point3::from(*origin), Frame::new(t, n)?, *length)
            }
            Self::CircularArc {
                center,
                radius,
                angle,
                e1,
                e2,
            } => {
                let (e1, e2) = match (e1, e2) {
                    (Some(a), Some(b)) => (Vector3::from(*a), Vector3::from(*b)),
                    (None, None) => (Vector3::x(), Vector3::y()),
                    _ => {
                        return Err(Error::InvalidInput(
                            "circular arc needs both in-plane axes or neither".into(),
                        ))
                    }
                };
                Ribbon::circular_arc(Point3::from(*center), e1, e2, *radius, *angle)
            }
            Self::Helix { kappa, tau, length } => Ribbon::helix(*kappa, *tau, *length),
            Self::Csv { path } => {
                let file = std::fs::File::open(path)?;
                Ok(Ribbon::Sampled(SampledRibbon::read_csv(
                    std::io::BufReader::new(file),
                )?))
            }
            Self::Points { path } => {
                let file = std::fs::File::open(path)?;
                let (s, pts) = read_points_csv(std::io::BufReader::new(file))?;
                frenet_ribbon(&s, &pts)
            }
        }
    }
}

/// Parse an `s,x,y,z` table.
pub fn read_points_csv<R: BufRead>(input: R) -> Result<(Vec<f64>, Vec<Point3<f64>>)> {
    let mut s = Vec::new();
    let mut pts = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('s') {
            continue;
        }
        let cols = crate::frames::parse_f64_row(line, 4, lineno + 1)?;
        s.push(cols[0]);
        pts.push(Point3::new(cols[1], cols[2], cols[3]));
    }
    Ok((s, pts))
}

/// Profile description, matching the rod input schema:
/// `{"type":"disk","r":..}`, `{"type":"rectangle","w":..,"h":..}`,
/// `{"type":"ellipse","a":..,"b":..}`, or
/// `{"type":"polygon","vertices":[[u,v],..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProfileSpec {
    Disk { r: f64 },
    Rectangle { w: f64, h: f64 },
    Ellipse { a: f64, b: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

impl ProfileSpec {
    pub fn build(&self) -> Result<Profile> {
        let shape = match self {
            Self::Disk { r } => ProfileShape::Disk { radius: *r },
            Self::Rectangle { w, h } => ProfileShape::Rectangle {
                width: *w,
                height: *h,
            },
            Self::Ellipse { a, b } => ProfileShape::Ellipse { a: *a, b: *b },
            Self::Polygon { vertices } => ProfileShape::Polygon {
                vertices: vertices.iter().map(|v| (v[0], v[1])).collect(),
            },
        };
        profile_moments(shape)
    }
}

/// Rod input: `{"curve": {..ribbon..}, "profile": {..}, "one_sided_kappa": b}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RodFileSpec {
    pub curve: RibbonSpec,
    pub profile: ProfileSpec,
    #[serde(default)]
    pub one_sided_kappa: bool,
}

impl RodFileSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn build(&self) -> Result<RodSpec> {
        RodSpec::new(
            self.curve.build()?,
            self.profile.build()?,
            self.one_sided_kappa,
        )
    }
}

/// Rod result schema: `{volume, centroid: [x,y,z], conditions: {a,b,c}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RodResult {
    pub volume: f64,
    pub centroid: [f64; 3],
    pub conditions: RodConditions,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RodConditions {
    pub a: bool,
    pub b: bool,
    pub c: bool,
}
