//! Pass/fail records produced by the identity checks.

use alloc::string::String;

use crate::Mat3;

/// Outcome of a single identity check.
///
/// `pass` holds exactly when the residual (left minus right hand side) is
/// zero; the residual is kept so a failure can be inspected.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub id: String,
    pub subject: String,
    pub pass: bool,
    pub residual: Option<Mat3>,
    pub detail: String,
}

impl IdentityReport {
    pub fn matrices(id: &str, subject: String, lhs: &Mat3, rhs: &Mat3) -> Self {
        let residual = lhs.sub(rhs);
        let pass = residual.is_zero();
        IdentityReport {
            id: String::from(id),
            subject,
            pass,
            residual: Some(residual),
            detail: String::new(),
        }
    }

    pub fn flag(id: &str, subject: String, pass: bool, detail: String) -> Self {
        IdentityReport {
            id: String::from(id),
            subject,
            pass,
            residual: None,
            detail,
        }
    }
}
