use gevreykit::sector::{
    a_delta_condition, carleman_loglog, criticality, ADeltaProfile, Criticality, LogLogVerdict,
    MDeltaProfile, Sector,
};
use gevreykit::Result;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Unique {
    Yes,
    No,
    Unknown,
}

#[derive(Debug, Serialize)]
pub struct UniquenessVerdict {
    pub alpha: f64,
    pub beta: f64,
    pub k: f64,
    pub opening: f64,
    pub criticality: Criticality,
    pub loglog: LogLogVerdict,
    /// `a(delta)/delta -> inf`; `None` when no profile was given (constant `a`).
    pub a_condition: Option<bool>,
    pub unique: Unique,
    pub reason: String,
}

pub fn classify(
    sector: &Sector,
    k: f64,
    m: &MDeltaProfile,
    a: Option<&ADeltaProfile>,
) -> Result<UniquenessVerdict> {
    let class = criticality(sector, k)?;
    let loglog = carleman_loglog(m)?;
    let a_condition = a.map(a_delta_condition).transpose()?;
    let (unique, reason) = match class {
        Criticality::Subcritical => (
            Unique::No,
            "opening below pi/k: the family phi(z) e^{-z} / z shares the null expansion".to_string(),
        ),
        Criticality::Supercritical => (
            Unique::Yes,
            "opening above pi/k: Watson's theorem applies".to_string(),
        ),
        Criticality::Critical => match (loglog.finite, a_condition) {
            (_, Some(false)) => (
                Unique::Unknown,
                "a(delta)/delta does not tend to infinity: the loglog criterion does not apply".to_string(),
            ),
            (true, _) => (
                Unique::Yes,
                "critical opening with integrable log log M(delta)".to_string(),
            ),
            (false, _) => (
                Unique::Unknown,
                "critical opening but the log log M(delta) integral diverges".to_string(),
            ),
        },
    };
    Ok(UniquenessVerdict {
        alpha: sector.alpha,
        beta: sector.beta,
        k,
        opening: sector.opening(),
        criticality: class,
        loglog,
        a_condition,
        unique,
        reason,
    })
}
