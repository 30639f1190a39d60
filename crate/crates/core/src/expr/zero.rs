use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{EvalContext, EvalError, Expr, Tape};

/// Where and by how much a sampled zero test failed.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub point: Vec<(String, f64)>,
    pub value: f64,
    pub scale: f64,
    /// Index of the offending expression (or tensor component).
    pub component: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ZeroVerdict {
    /// Canonical form is the literal 0.
    ProvablyZero,
    /// Vanished at every sample point within tolerance.
    ProbablyZero,
    NonZero(Witness),
}

impl ZeroVerdict {
    pub fn is_zero(&self) -> bool {
        !matches!(self, ZeroVerdict::NonZero(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            ZeroVerdict::NonZero(w) => Some(w),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ZeroVerdict::ProvablyZero => "ProvablyZero",
            ZeroVerdict::ProbablyZero => "ProbablyZero",
            ZeroVerdict::NonZero(_) => "NonZero",
        }
    }
}

pub fn is_zero(e: &Expr, ctx: &EvalContext) -> Result<ZeroVerdict, EvalError> {
    zero_test(std::slice::from_ref(e), ctx)
}

/// Joint test that every expression vanishes. Literal zeros are skipped; the
/// rest share one tape and one stream of sample points. A point where the
/// tape hits a singularity is redrawn, up to `ctx.max_retries` times in total.
pub fn zero_test(exprs: &[Expr], ctx: &EvalContext) -> Result<ZeroVerdict, EvalError> {
    ctx.validate()?;
    let live: Vec<usize> = (0..exprs.len()).filter(|i| !exprs[*i].is_zero()).collect();
    if live.is_empty() {
        return Ok(ZeroVerdict::ProvablyZero);
    }
    let batch: Vec<Expr> = live.iter().map(|i| exprs[*i].clone()).collect();
    let tape = Tape::compile(&batch, ctx)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut vals = Vec::new();
    let mut mags = Vec::new();
    let mut retries = 0;
    let mut accepted = 0;
    while accepted < ctx.samples {
        let point = ctx.sample_point(&mut rng);
        if tape.run(&point, &mut vals, &mut mags).is_err() {
            retries += 1;
            if retries > ctx.max_retries {
                return Err(EvalError::Singular(retries));
            }
            continue;
        }
        accepted += 1;
        for (k, i) in live.iter().enumerate() {
            let s = tape.output_slot(k);
            let (v, scale) = (vals[s], mags[s]);
            if v.abs() > ctx.tolerance * (1.0 + scale) {
                return Ok(ZeroVerdict::NonZero(Witness {
                    point: ctx.coordinates().map(String::from).zip(point).collect(),
                    value: v,
                    scale,
                    component: vec![*i],
                }));
            }
        }
    }
    Ok(ZeroVerdict::ProbablyZero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> EvalContext {
        EvalContext::new(&[("x", (-2.0, 2.0)), ("r", (0.5, 2.0))])
    }

    #[test]
    fn structural_cancellation_is_provable() {
        let x = Expr::coord("x");
        assert_eq!(is_zero(&(&x - &x), &ctx()).unwrap(), ZeroVerdict::ProvablyZero);
    }

    #[test]
    fn pythagoras_is_probable() {
        let x = Expr::coord("x");
        let e = x.sin().powi(2) + x.cos().powi(2) - 1;
        assert_eq!(is_zero(&e, &ctx()).unwrap(), ZeroVerdict::ProbablyZero);
    }

    #[test]
    fn nonzero_reports_a_reproducible_witness() {
        // Psi * Phi_r - Psi_r * Phi with Psi = r, Phi = r^2 is -r^2
        let r = Expr::coord("r");
        let (psi, phi) = (r.clone(), r.powi(2));
        let e = &psi * phi.diff("r") - psi.diff("r") * &phi;
        let v = is_zero(&e, &ctx()).unwrap();
        let w = v.witness().expect("nonzero");
        let rv = w.point[1].1;
        assert!((w.value - rv * rv).abs() < 1e-12);
        assert_eq!(is_zero(&e, &ctx()).unwrap(), v);
    }

    #[test]
    fn singular_everywhere_fails_after_retries() {
        let e = (Expr::coord("r") * -1).log();
        assert!(matches!(is_zero(&e, &ctx()), Err(EvalError::Singular(_))));
    }

    #[test]
    fn invalid_settings_rejected() {
        let e = Expr::coord("x");
        assert!(is_zero(&e, &ctx().with_samples(0)).is_err());
        assert!(is_zero(&e, &ctx().with_tolerance(0.0)).is_err());
    }
}
