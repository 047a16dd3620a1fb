//! Text report for the `certify` subcommand.

use std::fmt::Write as _;

use anyhow::{bail, Result};
use vfog_core::certify::{suggest_rho, verify_cohypo_linear};
use vfog_core::linalg;
use vfog_core::Error;

use crate::presets::Experiment;

/// Checks the requested `(ρ_n, ρ_c)` pairs (Example 1 defaults to
/// `(1.2, 0.1)` and `(0, 0)`) and the suggested pair on the first seed.
pub fn certify_report(exp: &Experiment, pairs: &[(f64, f64)]) -> Result<String> {
    let seed = exp.seeds[0];
    let Some(lp) = exp.problem.linear(seed) else {
        bail!("certificates need a linear preset (linear-exam1, linear-random, linear-identity)");
    };
    let phi = lp.phi();
    let sym = (&phi + phi.transpose()) * 0.5;
    let (sym_lo, _) = linalg::sym_eig_extremes(&sym);
    let mut s = String::new();
    let _ = writeln!(s, "instance {} (seed {seed}): p = {}, n = {}", exp.name, phi.nrows(), lp.components.len());
    let _ = writeln!(s, "lambda_min(sym(Phi)) = {sym_lo:.6e}");
    if sym_lo >= -1e-12 * phi.norm().max(1.0) {
        let _ = writeln!(s, "monotone: rho_n = 0 suffices");
    }
    let default_pairs = [(1.2, 0.1), (0.0, 0.0)];
    let pairs = if pairs.is_empty() && exp.problem == crate::presets::ProblemSpec::LinearExam1 {
        &default_pairs[..]
    } else {
        pairs
    };
    for &(rn, rc) in pairs {
        let c = verify_cohypo_linear(&lp, rn, rc)?;
        let verdict = if c.holds { "holds" } else { "fails" };
        let _ = writeln!(s, "(rho_n, rho_c) = ({rn}, {rc}): {verdict} (min eig {:.6e})", c.min_eig);
    }
    match suggest_rho(&lp) {
        Ok((rn, rc)) => {
            let c = verify_cohypo_linear(&lp, rn, rc)?;
            let verdict = if c.holds { "verified" } else { "NOT verified" };
            let _ = writeln!(s, "suggested (rho_n, rho_c) = ({rn:.6e}, {rc:.6e}): {verdict} (min eig {:.6e})", c.min_eig);
        }
        Err(Error::Infeasible(msg)) => {
            let _ = writeln!(s, "no suggestion: {msg}");
        }
        Err(e) => return Err(e.into()),
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::presets::resolve;

    #[test]
    fn example1_report() {
        let exp = resolve(&Config::from_preset("linear-exam1"), 0).unwrap();
        let r = certify_report(&exp, &[]).unwrap();
        assert!(r.contains("(1.2, 0.1): holds"), "{r}");
        assert!(r.contains("(0, 0): fails"), "{r}");
        assert!(r.contains(": verified"), "{r}");
    }

    #[test]
    fn identity_is_monotone() {
        let exp = resolve(&Config::from_preset("linear-identity"), 0).unwrap();
        let r = certify_report(&exp, &[]).unwrap();
        assert!(r.contains("monotone"), "{r}");
    }

    #[test]
    fn random_round_trip() {
        let exp = resolve(&Config::from_preset("linear-random"), 3).unwrap();
        let r = certify_report(&exp, &[]).unwrap();
        assert!(r.contains(": verified"), "{r}");
        assert!(certify_report(&resolve(&Config::from_preset("game-exp1"), 0).unwrap(), &[]).is_err());
    }
}
