//! Named test functions and inline expressions.

use chebnet_core::train::{test_function, TestFunction};

use crate::error::CliError;
use crate::expr::Expr;

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Named(TestFunction),
    Inline { source: String, expr: Expr },
}

impl Target {
    /// `f1`, `f2`, or an expression in `x`. A bare unknown name is reported
    /// as an unknown function rather than a parse error.
    pub fn parse(spec: &str) -> Result<Target, CliError> {
        if let Ok(f) = test_function(spec) {
            return Ok(Target::Named(f));
        }
        let trimmed = spec.trim();
        let bare_name = trimmed.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            && trimmed.chars().next().is_some_and(|c| c.is_ascii_alphabetic());
        match Expr::parse(trimmed) {
            Ok(expr) => Ok(Target::Inline { source: trimmed.to_string(), expr }),
            Err(_) if bare_name => Err(CliError::Invalid(format!("unknown function `{trimmed}`"))),
            Err(e) => Err(e.into()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Target::Named(f) => f.eval(x),
            Target::Inline { expr, .. } => expr.eval(x),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Target::Named(f) => f.name(),
            Target::Inline { source, .. } => source,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_and_expressions() {
        assert_eq!(Target::parse("f1").unwrap(), Target::Named(TestFunction::F1));
        assert_eq!(Target::parse("x^2").unwrap().eval(3.0), 9.0);
        let err = Target::parse("f3").unwrap_err();
        assert!(err.to_string().contains("unknown function"), "{err}");
        assert_eq!(err.exit_code(), 1);
    }
}
