//! Built-in surfaces.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    /// geodesic fan shot over an explicit graph z = f(x, y)
    Graph,
    /// closed-form or ODE-built profile of a surface of revolution
    Profile,
    /// surface of revolution built from its meridian curvature
    Meridian,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Parameter {
    pub name: &'static str,
    pub default: f64,
    pub description: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub construction: Construction,
    /// defining formula of the surface
    pub provenance: &'static str,
    pub parameters: Vec<Parameter>,
    /// chart radius
    pub s_max: f64,
    /// geodesics in the initial fan (graph entries only)
    pub theta_samples: Option<usize>,
    pub half_width: f64,
    /// plateau radius for the Goldstone–Jaffe search, when it should differ from the chart radius
    pub certify_s0: Option<f64>,
    pub notes: &'static str,
}

impl CatalogEntry {
    pub fn computable(&self) -> bool {
        self.construction != Construction::None
    }

    pub fn parameter(&self, name: &str) -> Option<&Parameter> {
        self.parameters.iter().find(|p| p.name == name)
    }
}

pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "hyperbolic-paraboloid",
            construction: Construction::Graph,
            provenance: "z = x^2 - y^2",
            parameters: vec![],
            s_max: 1024.0,
            theta_samples: Some(64),
            half_width: 0.1,
            certify_s0: Some(64.0),
            notes: "total Gauss curvature -2π",
        },
        CatalogEntry {
            name: "monkey-saddle",
            construction: Construction::Graph,
            provenance: "z = x^3 - 3xy^2",
            parameters: vec![],
            s_max: 1024.0,
            theta_samples: Some(64),
            half_width: 0.1,
            certify_s0: Some(64.0),
            notes: "total Gauss curvature -4π",
        },
        CatalogEntry {
            name: "elliptic-paraboloid",
            construction: Construction::Graph,
            provenance: "z = (x/x0)^2 + (y/y0)^2",
            parameters: vec![
                Parameter { name: "x0", default: 1.0, description: "x semi-axis" },
                Parameter { name: "y0", default: 1.0, description: "y semi-axis" },
            ],
            s_max: 400.0,
            theta_samples: Some(64),
            half_width: 0.05,
            certify_s0: None,
            notes: "total Gauss curvature +2π; mean curvature not square integrable",
        },
        CatalogEntry {
            name: "hyperboloid",
            construction: Construction::Profile,
            provenance: "(z/z0)^2 - x^2 - y^2 = 1, upper sheet z > 0",
            parameters: vec![Parameter { name: "z0", default: 1.0, description: "vertical scale" }],
            s_max: 2.1e9,
            theta_samples: None,
            half_width: 0.3,
            certify_s0: None,
            notes: "upper sheet z = z0 sqrt(1 + x^2 + y^2)",
        },
        CatalogEntry {
            name: "ex-m",
            construction: Construction::Meridian,
            provenance: "k_s(s) = s^-2 sin(s^2)",
            parameters: vec![],
            s_max: 64.0,
            theta_samples: None,
            half_width: 0.2,
            certify_s0: None,
            notes: "total Gauss curvature 2π(1 - cos sqrt(π/2)); gradient of the mean curvature not square integrable",
        },
        CatalogEntry {
            name: "capped-cylinder",
            construction: Construction::Profile,
            provenance: "hemisphere of radius R continued by the half-cylinder of radius R",
            parameters: vec![Parameter { name: "radius", default: 1.0, description: "cylinder radius R" }],
            s_max: 40.0,
            theta_samples: None,
            half_width: 0.3,
            certify_s0: None,
            notes: "not asymptotically planar; no spectrum below the cylinder threshold",
        },
        CatalogEntry {
            name: "ex-pole",
            construction: Construction::None,
            provenance: "surface without poles",
            parameters: vec![],
            s_max: 0.0,
            theta_samples: None,
            half_width: 0.0,
            certify_s0: None,
            notes: "documentation only: no point has a global geodesic polar chart, so nothing is computed",
        },
    ]
}

/// The flat plane: a reference surface for sanity runs, kept out of the catalog listing.
pub fn plane() -> CatalogEntry {
    CatalogEntry {
        name: "plane",
        construction: Construction::Profile,
        provenance: "z = 0",
        parameters: vec![],
        s_max: 1e4,
        theta_samples: None,
        half_width: 0.3,
        certify_s0: None,
        notes: "reference surface; no curvature and no bound states",
    }
}

/// Catalog entry or the reference plane.
pub fn lookup(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name == name).or_else(|| (name == "plane").then(plane))
}
