use serde::Serialize;

/// How a measured value is compared with its expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// `|measured − expected| ≤ tolerance`
    Eq,
    /// `measured ≥ expected − tolerance`
    Ge,
    /// `measured ≤ expected + tolerance`
    Le,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// One named numeric check in a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub relation: Relation,
}

impl Check {
    pub fn new(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64, relation: Relation) -> Self {
        let ok = match relation {
            Relation::Eq => (measured - expected).abs() <= tolerance,
            Relation::Ge => measured >= expected - tolerance,
            Relation::Le => measured <= expected + tolerance,
        };
        Self {
            name: name.into(),
            status: if ok && measured.is_finite() { Status::Pass } else { Status::Fail },
            measured,
            expected,
            tolerance,
            relation,
        }
    }

    pub fn eq(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        Self::new(name, measured, expected, tolerance, Relation::Eq)
    }

    /// A deviation that must stay within `tolerance` of zero.
    pub fn deviation(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self::new(name, measured, 0.0, tolerance, Relation::Le)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}
