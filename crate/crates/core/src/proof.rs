//! Rule schemata, proof trees and a proof checker.
//!
//! Leaves are closed by hypotheses, by axioms of the system (rules without
//! premises) or by the semantic oracle, which decides `Γ ⊨_A φ` for
//! modality-free formulas by enumerating every assignment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::algebra::{FiniteAlgebra, TruthValue};
use crate::error::BlowUp;
use crate::limits::Limits;
use crate::semantics::{eval0, SemanticsError};
use crate::syntax::{Flavor, Formula, Modality, Rank, Signature, SyntaxError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("rule `{rule}` has {expected} premise(s), node has {found} child(ren)")]
    Arity { rule: String, expected: usize, found: usize },
    #[error("node is not an instance of `{rule}`")]
    NoMatch { rule: String },
    #[error("the given substitution does not instantiate `{rule}` to this node")]
    SubstitutionMismatch { rule: String },
    #[error("`{0}` is not a hypothesis")]
    NotHypothesis(String),
    #[error("`{0}` is not a consequence in the algebra")]
    OracleRejected(String),
    #[error("the semantic oracle covers modality-free formulas only; got `{0}`")]
    NotRank0(String),
    #[error("leaf justification `{tag}` cannot have children")]
    LeafWithChildren { tag: String },
    #[error("duplicate rule `{0}`")]
    DuplicateRule(String),
    #[error("at node {path} (`{formula}`): {cause}")]
    AtNode { path: NodePath, formula: String, cause: Box<ProofError> },
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    CapExceeded(#[from] BlowUp),
}

impl ProofError {
    /// The innermost cause, skipping node locations.
    pub fn root_cause(&self) -> &ProofError {
        match self {
            ProofError::AtNode { cause, .. } => cause.root_cause(),
            other => other,
        }
    }

    pub fn blow_up(&self) -> Option<&BlowUp> {
        match self.root_cause() {
            ProofError::CapExceeded(b) | ProofError::Semantics(SemanticsError::CapExceeded(b)) => Some(b),
            _ => None,
        }
    }

    /// Stable short name of the root cause, used in machine-readable output.
    pub fn code(&self) -> &'static str {
        match self.root_cause() {
            ProofError::UnknownRule(_) => "unknown-rule",
            ProofError::Arity { .. } => "arity",
            ProofError::NoMatch { .. } => "head-mismatch",
            ProofError::SubstitutionMismatch { .. } => "substitution-mismatch",
            ProofError::NotHypothesis(_) => "not-hypothesis",
            ProofError::OracleRejected(_) => "oracle-rejected",
            ProofError::NotRank0(_) => "not-rank-0",
            ProofError::LeafWithChildren { .. } => "leaf-with-children",
            ProofError::DuplicateRule(_) => "duplicate-rule",
            ProofError::Syntax(_) => "syntax",
            ProofError::Semantics(_) => "semantics",
            ProofError::CapExceeded(_) => "cap-exceeded",
            ProofError::AtNode { .. } => unreachable!(),
        }
    }

    pub fn path(&self) -> Option<&NodePath> {
        match self {
            ProofError::AtNode { path, .. } => Some(path),
            _ => None,
        }
    }
}

/// Child indices from the root to a node.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct NodePath(pub Vec<usize>);

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("root")?;
        for i in &self.0 {
            write!(f, ".{i}")?;
        }
        Ok(())
    }
}

/// A rule `⟨Γ, γ⟩` whose atoms are metavariables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    NonModal,
    OneStep,
    Other,
}

impl Rule {
    pub fn new(name: impl Into<String>, premises: Vec<Formula>, conclusion: Formula) -> Self {
        Self { name: name.into(), premises, conclusion }
    }

    pub fn metavariables(&self) -> BTreeSet<String> {
        let mut out = self.conclusion.atoms();
        for p in &self.premises {
            out.extend(p.atoms());
        }
        out
    }

    pub fn kind(&self) -> RuleKind {
        let premises0 = self.premises.iter().all(Formula::is_modal_free);
        match self.conclusion.rank() {
            Rank::Zero if premises0 => RuleKind::NonModal,
            Rank::One if premises0 => RuleKind::OneStep,
            _ => RuleKind::Other,
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let premises: Vec<String> = self.premises.iter().map(Formula::to_string).collect();
        write!(f, "{}: {{{}}} / {}", self.name, premises.join(", "), self.conclusion)
    }
}

fn metavariables(arity: usize) -> (Vec<Formula>, Vec<Formula>) {
    if arity == 1 {
        (vec![Formula::atom("p")], vec![Formula::atom("q")])
    } else {
        (
            (0..arity).map(|i| Formula::atom(format!("p{i}"))).collect(),
            (0..arity).map(|i| Formula::atom(format!("q{i}"))).collect(),
        )
    }
}

fn modal_rule(
    sig: &Signature,
    modality: &Modality,
    prefix: &str,
    connective: fn(Formula, Formula) -> Formula,
) -> Result<Rule, ProofError> {
    let decl = sig.get(&modality.name).ok_or_else(|| SyntaxError::UnknownLifting(modality.name.clone()))?;
    sig.check_modality(modality, decl.arity)?;
    let (ps, qs) = metavariables(decl.arity);
    let premises = ps.iter().zip(&qs).map(|(p, q)| connective(p.clone(), q.clone())).collect();
    let conclusion = connective(Formula::modal(modality.clone(), ps), Formula::modal(modality.clone(), qs));
    Ok(Rule::new(format!("{prefix}_{modality}"), premises, conclusion))
}

/// `C_λ`: from `p_i <-> q_i` infer `λ(p..) <-> λ(q..)`.
pub fn congruence_rule(sig: &Signature, modality: &Modality) -> Result<Rule, ProofError> {
    modal_rule(sig, modality, "C", Formula::iff)
}

/// `M_λ`: from `p_i -> q_i` infer `λ(p..) -> λ(q..)`.
pub fn monotonicity_rule(sig: &Signature, modality: &Modality) -> Result<Rule, ProofError> {
    modal_rule(sig, modality, "M", Formula::imp)
}

fn match_into(pattern: &Formula, term: &Formula, rho: &mut BTreeMap<String, Formula>) -> bool {
    use Formula::*;
    match (pattern, term) {
        (Atom(x), t) => match rho.get(x) {
            Some(bound) => bound == t,
            None => {
                rho.insert(x.clone(), t.clone());
                true
            }
        },
        (Const(a), Const(b)) => a == b,
        (And(a, b), And(c, d)) | (Or(a, b), Or(c, d)) | (Fuse(a, b), Fuse(c, d)) | (Imp(a, b), Imp(c, d)) => {
            match_into(a, c, rho) && match_into(b, d, rho)
        }
        (Delta(a), Delta(b)) => match_into(a, b, rho),
        (Tau(c, a), Tau(d, b)) | (Upsilon(c, a), Upsilon(d, b)) => c == d && match_into(a, b, rho),
        (Modal(m, xs), Modal(n, ys)) => {
            m == n && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| match_into(x, y, rho))
        }
        _ => false,
    }
}

/// The substitution instantiating `rule` to the given premises (in order)
/// and conclusion, found by one-way structural matching.
pub fn match_instance(rule: &Rule, premises: &[&Formula], conclusion: &Formula) -> Option<BTreeMap<String, Formula>> {
    if premises.len() != rule.premises.len() {
        return None;
    }
    let mut rho = BTreeMap::new();
    for (pattern, term) in rule.premises.iter().zip(premises) {
        if !match_into(pattern, term, &mut rho) {
            return None;
        }
    }
    match_into(&rule.conclusion, conclusion, &mut rho).then_some(rho)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Justification {
    /// An instance of a named rule, optionally with the substitution spelled out.
    Rule {
        name: String,
        substitution: Option<BTreeMap<String, Formula>>,
    },
    /// An instance of a premise-free rule of the system.
    Axiom(String),
    Hypothesis,
    /// Discharged by the semantic oracle with no hypotheses.
    Semantic,
}

impl Justification {
    pub fn from_tag(tag: &str) -> Self {
        match tag {
            "hyp" => Justification::Hypothesis,
            "taut" => Justification::Semantic,
            _ => match tag.strip_prefix("axiom:") {
                Some(name) => Justification::Axiom(name.to_string()),
                None => Justification::Rule { name: tag.to_string(), substitution: None },
            },
        }
    }

    pub fn tag(&self) -> String {
        match self {
            Justification::Rule { name, .. } => name.clone(),
            Justification::Axiom(name) => format!("axiom:{name}"),
            Justification::Hypothesis => "hyp".into(),
            Justification::Semantic => "taut".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofTree {
    pub formula: Formula,
    pub justification: Justification,
    pub children: Vec<ProofTree>,
}

impl ProofTree {
    pub fn leaf(formula: Formula, justification: Justification) -> Self {
        Self { formula, justification, children: Vec::new() }
    }

    pub fn node(formula: Formula, rule: &str, children: Vec<ProofTree>) -> Self {
        Self { formula, justification: Justification::Rule { name: rule.into(), substitution: None }, children }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ProofTree::size).sum::<usize>()
    }

    /// The node at `path`, if any.
    pub fn get(&self, path: &NodePath) -> Option<&ProofTree> {
        path.0.iter().try_fold(self, |node, &i| node.children.get(i))
    }

    pub fn get_mut(&mut self, path: &NodePath) -> Option<&mut ProofTree> {
        path.0.iter().try_fold(self, |node, &i| node.children.get_mut(i))
    }
}

/// A flavor together with named rules (axioms are premise-free rules).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationSystem {
    flavor: Flavor,
    rules: BTreeMap<String, Rule>,
}

impl DerivationSystem {
    pub fn new(flavor: Flavor) -> Self {
        Self { flavor, rules: BTreeMap::new() }
    }

    /// Congruence rules for every parameterless lifting of `sig`, plus
    /// monotonicity rules when `monotone` is set.
    pub fn standard(flavor: Flavor, sig: &Signature, monotone: bool) -> Result<Self, ProofError> {
        let mut system = Self::new(flavor);
        for (name, decl) in sig.iter() {
            if decl.parameterized {
                continue;
            }
            let m = Modality::new(name);
            system.add_rule(congruence_rule(sig, &m)?)?;
            if monotone {
                system.add_rule(monotonicity_rule(sig, &m)?)?;
            }
        }
        Ok(system)
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn add_rule(&mut self, rule: Rule) -> Result<(), ProofError> {
        if self.rules.contains_key(&rule.name) {
            return Err(ProofError::DuplicateRule(rule.name));
        }
        self.rules.insert(rule.name.clone(), rule);
        Ok(())
    }

    pub fn rule(&self, name: &str) -> Option<&Rule> {
        self.rules.get(name)
    }

    pub fn rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.values()
    }
}

/// Outcome of a successful check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProofCheck {
    pub nodes: usize,
    pub oracle_leaves: usize,
}

/// Checks a proof tree depth-first (node before children, children left to
/// right) and reports the first failing node.
pub fn check_proof(
    system: &DerivationSystem,
    hypotheses: &[Formula],
    tree: &ProofTree,
    alg: &FiniteAlgebra,
    limits: &Limits,
) -> Result<ProofCheck, ProofError> {
    let mut stats = ProofCheck { nodes: 0, oracle_leaves: 0 };
    let mut path = Vec::new();
    check_node(system, hypotheses, tree, alg, limits, &mut path, &mut stats)?;
    Ok(stats)
}

fn check_node(
    system: &DerivationSystem,
    hypotheses: &[Formula],
    node: &ProofTree,
    alg: &FiniteAlgebra,
    limits: &Limits,
    path: &mut Vec<usize>,
    stats: &mut ProofCheck,
) -> Result<(), ProofError> {
    stats.nodes += 1;
    check_local(system, hypotheses, node, alg, limits, stats).map_err(|cause| ProofError::AtNode {
        path: NodePath(path.clone()),
        formula: node.formula.to_string(),
        cause: Box::new(cause),
    })?;
    for (i, child) in node.children.iter().enumerate() {
        path.push(i);
        check_node(system, hypotheses, child, alg, limits, path, stats)?;
        path.pop();
    }
    Ok(())
}

fn check_local(
    system: &DerivationSystem,
    hypotheses: &[Formula],
    node: &ProofTree,
    alg: &FiniteAlgebra,
    limits: &Limits,
    stats: &mut ProofCheck,
) -> Result<(), ProofError> {
    system.flavor.check(&node.formula, alg)?;
    let leaf_only = |tag: String| {
        if node.children.is_empty() {
            Ok(())
        } else {
            Err(ProofError::LeafWithChildren { tag })
        }
    };
    match &node.justification {
        Justification::Hypothesis => {
            leaf_only(node.justification.tag())?;
            if !hypotheses.contains(&node.formula) {
                return Err(ProofError::NotHypothesis(node.formula.to_string()));
            }
        }
        Justification::Semantic => {
            leaf_only(node.justification.tag())?;
            stats.oracle_leaves += 1;
            if !semantic_axiom_oracle(alg, &[], &node.formula, system.flavor, limits)? {
                return Err(ProofError::OracleRejected(node.formula.to_string()));
            }
        }
        Justification::Axiom(name) => {
            leaf_only(node.justification.tag())?;
            let rule = system.rule(name).ok_or_else(|| ProofError::UnknownRule(name.clone()))?;
            if !rule.premises.is_empty() {
                return Err(ProofError::Arity { rule: name.clone(), expected: rule.premises.len(), found: 0 });
            }
            if match_instance(rule, &[], &node.formula).is_none() {
                return Err(ProofError::NoMatch { rule: name.clone() });
            }
        }
        Justification::Rule { name, substitution } => {
            let rule = system.rule(name).ok_or_else(|| ProofError::UnknownRule(name.clone()))?;
            if rule.premises.len() != node.children.len() {
                return Err(ProofError::Arity {
                    rule: name.clone(),
                    expected: rule.premises.len(),
                    found: node.children.len(),
                });
            }
            let labels: Vec<&Formula> = node.children.iter().map(|c| &c.formula).collect();
            match substitution {
                Some(rho) => {
                    let fits = rule.premises.iter().zip(&labels).all(|(p, l)| p.substitute(rho) == **l)
                        && rule.conclusion.substitute(rho) == node.formula;
                    if !fits {
                        return Err(ProofError::SubstitutionMismatch { rule: name.clone() });
                    }
                }
                None => {
                    if match_instance(rule, &labels, &node.formula).is_none() {
                        return Err(ProofError::NoMatch { rule: name.clone() });
                    }
                }
            }
        }
    }
    Ok(())
}

/// The least assignment (atoms sorted, first atom varying slowest) that
/// makes every formula of `gamma` 1 and `phi` less than 1.
pub fn consequence_counterexample(
    alg: &FiniteAlgebra,
    gamma: &[Formula],
    phi: &Formula,
    flavor: Flavor,
    limits: &Limits,
) -> Result<Option<BTreeMap<String, TruthValue>>, ProofError> {
    let mut atoms = phi.atoms();
    for g in gamma.iter().chain([phi]) {
        if !g.is_modal_free() {
            return Err(ProofError::NotRank0(g.to_string()));
        }
        flavor.check(g, alg)?;
        atoms.extend(g.atoms());
    }
    let k = alg.size();
    let m = atoms.len();
    let projected = BigUint::from(k).pow(m as u32);
    BlowUp::check(format!("{k}^{m} assignments"), &projected, limits.max_evaluations)?;
    // Each assignment is one point of a coloring over k^m points.
    let points = k.pow(m as u32);
    let coloring: BTreeMap<String, Vec<TruthValue>> = atoms
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let stride = k.pow((m - 1 - i) as u32);
            (p.clone(), (0..points).map(|j| TruthValue::new(((j / stride) % k) as u32)).collect())
        })
        .collect();
    let one = alg.one();
    let mut admissible = vec![true; points];
    for g in gamma {
        for (j, v) in eval0(alg, &coloring, points, g)?.into_iter().enumerate() {
            admissible[j] &= v == one;
        }
    }
    let values = eval0(alg, &coloring, points, phi)?;
    Ok((0..points)
        .find(|&j| admissible[j] && values[j] != one)
        .map(|j| coloring.iter().map(|(p, col)| (p.clone(), col[j])).collect()))
}

/// `Γ ⊨_A φ` for modality-free formulas.
pub fn semantic_axiom_oracle(
    alg: &FiniteAlgebra,
    gamma: &[Formula],
    phi: &Formula,
    flavor: Flavor,
    limits: &Limits,
) -> Result<bool, ProofError> {
    Ok(consequence_counterexample(alg, gamma, phi, flavor, limits)?.is_none())
}
