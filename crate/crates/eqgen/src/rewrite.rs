//! Oriented rewrite rules with innermost normalization.

use crate::error::{Error, Result};
use crate::term::{apply_subst, match_syntactic, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteRule {
    pub lhs: Term,
    pub rhs: Term,
}

impl RewriteRule {
    pub fn new(lhs: Term, rhs: Term) -> Result<Self> {
        if lhs.is_var() {
            return Err(Error::Theory(format!(
                "rule `{lhs} -> {rhs}` has a variable left-hand side"
            )));
        }
        let lv = lhs.vars();
        if !rhs.vars().is_subset(&lv) {
            return Err(Error::Theory(format!(
                "rule `{lhs} -> {rhs}` introduces variables on the right"
            )));
        }
        Ok(RewriteRule { lhs, rhs })
    }

    pub fn is_left_linear(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.lhs
            .subterms()
            .into_iter()
            .filter_map(|t| match t {
                Term::Var(x) => Some(*x),
                _ => None,
            })
            .all(|x| seen.insert(x))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RewriteSystem {
    pub rules: Vec<RewriteRule>,
}

impl RewriteSystem {
    pub fn new(rules: Vec<RewriteRule>) -> Self {
        RewriteSystem { rules }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn is_left_linear(&self) -> bool {
        self.rules.iter().all(RewriteRule::is_left_linear)
    }

    /// Rewrites at the root with the first applicable rule.
    pub fn rewrite_root(&self, t: &Term) -> Option<Term> {
        self.rules
            .iter()
            .find_map(|r| match_syntactic(&r.lhs, t).map(|s| apply_subst(&r.rhs, &s)))
    }

    /// Whether any subterm is an instance of a left-hand side.
    pub fn has_redex(&self, t: &Term) -> bool {
        t.subterms().into_iter().any(|s| {
            self.rules
                .iter()
                .any(|r| match_syntactic(&r.lhs, s).is_some())
        })
    }

    /// Innermost normal form; fails after `step_limit` rewrite steps.
    pub fn normalize(&self, t: &Term, step_limit: usize) -> Result<Term> {
        let mut steps = 0;
        self.normalize_rec(t, &mut steps, step_limit)
    }

    fn normalize_rec(&self, t: &Term, steps: &mut usize, limit: usize) -> Result<Term> {
        let mut cur = match t {
            Term::Var(_) => return Ok(t.clone()),
            Term::App(f, args) => Term::App(
                *f,
                args.iter()
                    .map(|a| self.normalize_rec(a, steps, limit))
                    .collect::<Result<_>>()?,
            ),
        };
        while let Some(next) = self.rewrite_root(&cur) {
            *steps += 1;
            if *steps > limit {
                return Err(Error::Budget(format!(
                    "rewriting did not terminate within {limit} steps"
                )));
            }
            cur = self.normalize_rec(&next, steps, limit)?;
        }
        Ok(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn peano() -> RewriteSystem {
        RewriteSystem::new(vec![
            RewriteRule::new(t("vx+0"), t("vx")).unwrap(),
            RewriteRule::new(t("vx+s(vy)"), t("s(vx+vy)")).unwrap(),
            RewriteRule::new(t("vx*0"), t("0")).unwrap(),
            RewriteRule::new(t("vx*s(vy)"), t("vx*vy+vx")).unwrap(),
        ])
    }

    #[test]
    fn normalizes_arithmetic() {
        let rs = peano();
        assert_eq!(rs.normalize(&t("2*3+1"), 1000).unwrap(), Term::numeral(7));
        assert!(rs.has_redex(&t("0+0")));
        assert!(!rs.has_redex(&t("s(0)")));
    }

    #[test]
    fn step_limit_is_enforced() {
        let rs = RewriteSystem::new(vec![RewriteRule::new(t("f(vx)"), t("f(f(vx))")).unwrap()]);
        assert!(matches!(
            rs.normalize(&t("f(0)"), 50),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn rejects_bad_rules() {
        assert!(RewriteRule::new(t("vx"), t("0")).is_err());
        assert!(RewriteRule::new(t("f(vx)"), t("vy")).is_err());
        assert!(!RewriteRule::new(t("f(vx,vx)"), t("vx"))
            .unwrap()
            .is_left_linear());
    }
}
