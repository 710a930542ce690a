use thiserror::Error;

use crate::contract::ContractViolation;
use crate::lambda_fn::LambdaViolation;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{name} = {value} is outside the domain {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid lambda function: {0}")]
    InvalidLambda(#[from] LambdaViolation),
    #[error("inadmissible indemnity: {0}")]
    InvalidContract(#[from] ContractViolation),
    #[error("premium is infinite for this contract")]
    InfinitePremium,
    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_domain(
    name: &'static str,
    value: f64,
    ok: bool,
    expected: &'static str,
) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            expected,
        })
    }
}
