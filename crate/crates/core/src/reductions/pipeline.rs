//! Composite chains of stages.

use std::str::FromStr;

use super::{
    arity_pad, const_elim, embed, eq_elim, fun_elim, membership_to_fun, monadic_fun_elim, nary_to_membership,
    rel_merge, sig_gc, zero_arity_lift, EmbedTarget, ReductionError, ReductionResult,
};
use crate::bpcp::{self, BpcpInstance};
use crate::syntax::{Formula, RelId, Signature};

/// A stage name as accepted by [`run_chain`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stage {
    /// Equality by name, or the one left by the previous stage.
    EqElim(Option<String>),
    SigGc,
    FunElim,
    /// Target arity, or the largest relation arity present.
    ArityPad(Option<usize>),
    RelMerge,
    ConstElim,
    ToMembership,
    ToFun(usize),
    Embed,
    MonadicFunElim,
    ZeroLift,
    DiscreteToBinary,
}

impl FromStr for Stage {
    type Err = ReductionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let num = |a: Option<&str>| -> Result<Option<usize>, ReductionError> {
            a.map(|a| a.parse().map_err(|_| ReductionError::UnknownStage(s.to_string())))
                .transpose()
        };
        let no_arg = |st: Stage| match arg {
            None => Ok(st),
            Some(_) => Err(ReductionError::UnknownStage(s.to_string())),
        };
        match name {
            "eq-elim" => Ok(Stage::EqElim(arg.map(str::to_string))),
            "sig-gc" => no_arg(Stage::SigGc),
            "fun-elim" => no_arg(Stage::FunElim),
            "arity-pad" => Ok(Stage::ArityPad(num(arg)?)),
            "rel-merge" => no_arg(Stage::RelMerge),
            "const-elim" => no_arg(Stage::ConstElim),
            "to-membership" => no_arg(Stage::ToMembership),
            "to-fun" => num(arg)?.map(Stage::ToFun).ok_or_else(|| ReductionError::UnknownStage(s.to_string())),
            "embed" => no_arg(Stage::Embed),
            "monadic-fun-elim" => no_arg(Stage::MonadicFunElim),
            "zero-lift" => no_arg(Stage::ZeroLift),
            "discrete-to-binary" => no_arg(Stage::DiscreteToBinary),
            _ => Err(ReductionError::UnknownStage(s.to_string())),
        }
    }
}

fn equality_for(acc: &ReductionResult, name: Option<&str>) -> Result<RelId, ReductionError> {
    match name {
        Some(n) => acc
            .sig
            .find_rel(n)
            .ok_or_else(|| ReductionError::Precondition(format!("no relation named `{n}`"))),
        None => acc
            .equality
            .ok_or_else(|| ReductionError::Precondition("no equality symbol: name one with `eq-elim:<name>`".into())),
    }
}

/// Applies `stages` in order; `target` is needed only by `embed`.
pub fn run_chain(
    sig: &Signature,
    phi: &Formula,
    stages: &[Stage],
    target: Option<&Signature>,
) -> Result<ReductionResult, ReductionError> {
    let mut acc = ReductionResult::identity(sig, phi);
    for stage in stages {
        acc = match stage {
            Stage::EqElim(name) => {
                let eq = equality_for(&acc, name.as_deref())?;
                acc.then(|s, f| eq_elim(s, f, eq))?
            }
            Stage::SigGc => acc.then(sig_gc)?,
            Stage::FunElim => acc.then(fun_elim)?,
            Stage::ArityPad(n) => {
                let n = n.unwrap_or_else(|| acc.sig.max_rel_arity());
                acc.then(|s, f| arity_pad(s, f, n))?
            }
            Stage::RelMerge => acc.then(rel_merge)?,
            Stage::ConstElim => acc.then(const_elim)?,
            Stage::ToMembership => acc.then(nary_to_membership)?,
            Stage::ToFun(n) => acc.then(|s, f| membership_to_fun(s, f, *n))?,
            Stage::Embed => {
                let target = target.ok_or_else(|| ReductionError::Precondition("embed needs a target signature".into()))?;
                let choice = EmbedTarget::pick(target)?;
                acc.then(|s, f| embed(s, f, target, choice))?
            }
            Stage::MonadicFunElim => acc.then(monadic_fun_elim)?,
            Stage::ZeroLift => acc.then(zero_arity_lift)?,
            Stage::DiscreteToBinary => acc.then(discrete_to_binary)?,
        };
    }
    Ok(acc)
}

/// Any formula to one over a single binary relation, in seven stages.
pub fn discrete_to_binary(sig: &Signature, phi: &Formula) -> Result<ReductionResult, ReductionError> {
    let acc = ReductionResult::identity(sig, phi).then(sig_gc)?.then(fun_elim)?;
    let eq = acc.equality.expect("function elimination yields an equality symbol");
    let acc = acc.then(|s, f| eq_elim(s, f, eq))?;
    let n = acc.sig.max_rel_arity();
    acc.then(|s, f| arity_pad(s, f, n))?
        .then(rel_merge)?
        .then(const_elim)?
        .then(nary_to_membership)
}

/// The instance's encoding carried all the way into `target`.
pub fn full_trakhtenbrot(r: &BpcpInstance, target: &Signature) -> Result<ReductionResult, ReductionError> {
    let choice = EmbedTarget::pick(target)?;
    let (sig, phi) = bpcp::encode(r);
    let acc = ReductionResult::identity(&sig, &phi)
        .then(|s, f| eq_elim(s, f, bpcp::EQ))?
        .then(discrete_to_binary)?;
    match choice {
        EmbedTarget::Relation(_) => acc.then(|s, f| embed(s, f, target, choice)),
        EmbedTarget::Function { func, .. } => {
            let n = target.func(func).arity;
            acc.then(|s, f| membership_to_fun(s, f, n))?
                .then(|s, f| embed(s, f, target, choice))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{fsat_on_domain, SearchConfig};
    use crate::text::parse_formula;

    #[test]
    fn stage_names_parse() {
        assert_eq!("arity-pad:3".parse::<Stage>().unwrap(), Stage::ArityPad(Some(3)));
        assert_eq!("eq-elim:eq".parse::<Stage>().unwrap(), Stage::EqElim(Some("eq".into())));
        assert_eq!("to-fun:2".parse::<Stage>().unwrap(), Stage::ToFun(2));
        assert!("to-fun".parse::<Stage>().is_err());
        assert!("sig-gc:1".parse::<Stage>().is_err());
        assert!("bogus".parse::<Stage>().is_err());
    }

    #[test]
    fn binary_chain_has_seven_stages() {
        let s = Signature::from_symbols::<&str>(&[], &[("P", 2)]).unwrap();
        let phi = parse_formula("(ex (ex (and (rel P (var 1) (var 0)) (impl (rel P (var 0) (var 1)) bot))))", &s).unwrap();
        let r = discrete_to_binary(&s, &phi).unwrap();
        assert_eq!(r.trace.len(), 7);
        assert_eq!(r.sig.rels().len(), 1);
        assert_eq!(r.sig.rels()[0].arity, 2);
        assert!(r.sig.funcs().is_empty());
    }

    #[test]
    fn bot_stays_unsatisfiable() {
        let s = Signature::from_symbols::<&str>(&[], &[("P", 2)]).unwrap();
        let r = discrete_to_binary(&s, &Formula::Bot).unwrap();
        for k in 1..=2 {
            assert!(!fsat_on_domain(&r.sig, &r.formula, k, &SearchConfig::default()).unwrap().is_sat());
        }
    }

    #[test]
    fn full_chain_rejects_weak_targets() {
        let r = BpcpInstance::new(vec![]);
        let weak = Signature::from_symbols::<&str>(&[], &[("P", 1)]).unwrap();
        assert_eq!(full_trakhtenbrot(&r, &weak).unwrap_err(), ReductionError::NoTarget);
    }
}
