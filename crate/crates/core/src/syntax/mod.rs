//! Formulas of the modal languages and their syntactic operations.

mod parser;
mod print;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, Constant, FiniteAlgebra, Rational};
use crate::semantics::FunctorKind;

pub use parser::{parse, parse_any};

/// A modal operator occurrence: the lifting name and its optional rational
/// parameter (only `M[r]` carries one among the built-ins).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Modality {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<Rational>,
}

impl Modality {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), param: None }
    }

    pub fn with_param(name: impl Into<String>, param: Rational) -> Self {
        Self { name: name.into(), param: Some(param) }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.param {
            Some(r) => write!(f, "{}[{}]", self.name, r),
            None => f.write_str(&self.name),
        }
    }
}

/// Abstract syntax. Negation and the biconditional are derived connectives
/// and are expanded by the parser and the helper constructors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Formula {
    Atom(String),
    Const(Constant),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Fuse(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Delta(Box<Formula>),
    Tau(Constant, Box<Formula>),
    Upsilon(Constant, Box<Formula>),
    Modal(Modality, Vec<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn fuse(a: Formula, b: Formula) -> Self {
        Formula::Fuse(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    /// `a <-> b`, i.e. `(a -> b) * (b -> a)`.
    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::fuse(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }

    pub fn delta(a: Formula) -> Self {
        Formula::Delta(Box::new(a))
    }

    pub fn modal(modality: Modality, args: Vec<Formula>) -> Self {
        Formula::Modal(modality, args)
    }

    /// Shorthand for a parameterless modality.
    pub fn lift(name: &str, args: Vec<Formula>) -> Self {
        Formula::Modal(Modality::new(name), args)
    }

    pub fn top(alg: &FiniteAlgebra) -> Self {
        Formula::Const(alg.constant(alg.one()))
    }

    pub fn bottom(alg: &FiniteAlgebra) -> Self {
        Formula::Const(alg.constant(alg.zero()))
    }

    /// `!a`, i.e. `a -> 0`.
    pub fn neg(a: Formula, alg: &FiniteAlgebra) -> Self {
        Formula::imp(a, Formula::bottom(alg))
    }

    /// Direct subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) | Formula::Const(_) => vec![],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Fuse(a, b) | Formula::Imp(a, b) => {
                vec![a, b]
            }
            Formula::Delta(a) | Formula::Tau(_, a) | Formula::Upsilon(_, a) => vec![a],
            Formula::Modal(_, args) => args.iter().collect(),
        }
    }

    /// Number of AST nodes; this is the formula size used for the finite
    /// model bound.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// Height of the AST; leaves have depth 0.
    pub fn depth(&self) -> usize {
        self.children().into_iter().map(|c| 1 + c.depth()).max().unwrap_or(0)
    }

    /// Every subformula including the formula itself, duplicates merged.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut BTreeSet<Formula>) {
        if out.insert(self.clone()) {
            for c in self.children() {
                c.collect_subformulas(out);
            }
        }
    }

    /// Atom names occurring anywhere in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    pub fn is_modal_free(&self) -> bool {
        let mut free = true;
        self.visit(&mut |f| free &= !matches!(f, Formula::Modal(..)));
        free
    }

    /// Simultaneous uniform replacement of atoms; atoms outside `rho` stay.
    pub fn substitute(&self, rho: &BTreeMap<String, Formula>) -> Formula {
        let sub = |f: &Formula| Box::new(f.substitute(rho));
        match self {
            Formula::Atom(p) => rho.get(p).cloned().unwrap_or_else(|| self.clone()),
            Formula::Const(_) => self.clone(),
            Formula::And(a, b) => Formula::And(sub(a), sub(b)),
            Formula::Or(a, b) => Formula::Or(sub(a), sub(b)),
            Formula::Fuse(a, b) => Formula::Fuse(sub(a), sub(b)),
            Formula::Imp(a, b) => Formula::Imp(sub(a), sub(b)),
            Formula::Delta(a) => Formula::Delta(sub(a)),
            Formula::Tau(c, a) => Formula::Tau(c.clone(), sub(a)),
            Formula::Upsilon(c, a) => Formula::Upsilon(c.clone(), sub(a)),
            Formula::Modal(m, args) => Formula::Modal(m.clone(), args.iter().map(|a| a.substitute(rho)).collect()),
        }
    }

    /// Substitution whose result must stay inside `flavor`.
    pub fn substitute_checked(
        &self,
        rho: &BTreeMap<String, Formula>,
        flavor: Flavor,
        alg: &FiniteAlgebra,
    ) -> Result<Formula, SyntaxError> {
        let out = self.substitute(rho);
        flavor.check(&out, alg)?;
        Ok(out)
    }

    /// Classifies the formula into the rank-0 / rank-1 fragments.
    pub fn rank(&self) -> Rank {
        if self.is_modal_free() {
            Rank::Zero
        } else if self.is_rank1_shape() {
            Rank::One
        } else {
            Rank::Other
        }
    }

    /// True for propositional combinations (without bare atoms) of modal
    /// atoms whose arguments are modality-free. Constant-only formulas
    /// qualify as well.
    pub fn is_rank1_shape(&self) -> bool {
        match self {
            Formula::Atom(_) => false,
            Formula::Const(_) => true,
            Formula::Modal(_, args) => args.iter().all(Formula::is_modal_free),
            _ => self.children().into_iter().all(Formula::is_rank1_shape),
        }
    }
}

impl FromStr for Formula {
    type Err = SyntaxError;

    /// Parses over the built-in signature without a flavor or algebra;
    /// constants are read as rationals.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parser::parse_loose(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rank {
    Zero,
    One,
    Other,
}

/// The three many-valued base languages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    /// Constants 0 and 1 and the four binary connectives only.
    Basic,
    /// Adds the Baaz Delta and a canonical constant for every element.
    Delta,
    /// Adds `tau_c` and `upsilon_c`; constants stay 0 and 1.
    TauUpsilon,
}

impl Flavor {
    pub const ALL: [Flavor; 3] = [Flavor::Basic, Flavor::Delta, Flavor::TauUpsilon];

    /// The first node of `f` that is illegal in this flavor.
    pub fn check(self, f: &Formula, alg: &FiniteAlgebra) -> Result<(), SyntaxError> {
        let mut err = None;
        f.visit(&mut |node| {
            if err.is_some() {
                return;
            }
            err = self.check_node(node, alg).err();
        });
        err.map_or(Ok(()), Err)
    }

    fn check_node(self, node: &Formula, alg: &FiniteAlgebra) -> Result<(), SyntaxError> {
        let violation = |what: String| SyntaxError::Flavor { flavor: self, what };
        let crisp_const = |c: &Constant| -> Result<(), SyntaxError> {
            let v = alg.resolve(c)?;
            if self != Flavor::Delta && v != alg.zero() && v != alg.one() {
                return Err(violation(format!("constant c({c})")));
            }
            Ok(())
        };
        match node {
            Formula::Const(c) => crisp_const(c),
            Formula::Delta(_) if self != Flavor::Delta => Err(violation("D".into())),
            Formula::Tau(c, _) | Formula::Upsilon(c, _) => {
                if self != Flavor::TauUpsilon {
                    let op = if matches!(node, Formula::Tau(..)) { "tau" } else { "up" };
                    return Err(violation(format!("{op}[{c}]")));
                }
                alg.resolve(c)?;
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn accepts(self, f: &Formula, alg: &FiniteAlgebra) -> bool {
        self.check(f, alg).is_ok()
    }

    /// The narrowest flavor accepting `f`, if any.
    pub fn infer(f: &Formula, alg: &FiniteAlgebra) -> Option<Flavor> {
        Flavor::ALL.into_iter().find(|fl| fl.accepts(f, alg))
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Basic => "basic",
            Flavor::Delta => "delta",
            Flavor::TauUpsilon => "tau-upsilon",
        })
    }
}

impl FromStr for Flavor {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "basic" | "lukasiewicz" => Ok(Flavor::Basic),
            "delta" => Ok(Flavor::Delta),
            "tau-upsilon" | "tauupsilon" | "tu" => Ok(Flavor::TauUpsilon),
            other => Err(SyntaxError::UnknownFlavor(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LiftingDecl {
    pub arity: usize,
    pub functor: FunctorKind,
    pub parameterized: bool,
}

/// The modal signature: lifting names with their arity and functor.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Signature {
    decls: BTreeMap<String, LiftingDecl>,
}

impl Signature {
    pub fn empty() -> Self {
        Self::default()
    }

    /// All built-in liftings across the five functor kinds.
    pub fn builtin() -> Self {
        let mut sig = Self::empty();
        for (name, arity, functor, parameterized) in [
            ("box", 1, FunctorKind::Powerset, false),
            ("dia", 1, FunctorKind::Powerset, false),
            ("fbox", 1, FunctorKind::Fuzzy, false),
            ("fdia", 1, FunctorKind::Fuzzy, false),
            ("nbox", 1, FunctorKind::Neighborhood, false),
            ("cond", 2, FunctorKind::Selection, false),
            ("prob", 1, FunctorKind::Distribution, false),
            ("M", 1, FunctorKind::Distribution, true),
        ] {
            sig.declare(name, LiftingDecl { arity, functor, parameterized }).expect("built-in names are unique");
        }
        sig
    }

    /// The built-in liftings of one functor kind.
    pub fn for_functor(kind: FunctorKind) -> Self {
        let decls = Self::builtin().decls.into_iter().filter(|(_, d)| d.functor == kind).collect();
        Self { decls }
    }

    pub fn declare(&mut self, name: &str, decl: LiftingDecl) -> Result<(), SyntaxError> {
        if decl.arity == 0 {
            return Err(SyntaxError::BadDeclaration(format!("lifting `{name}` must have arity >= 1")));
        }
        if self.decls.contains_key(name) {
            return Err(SyntaxError::BadDeclaration(format!("lifting `{name}` declared twice")));
        }
        self.decls.insert(name.to_string(), decl);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&LiftingDecl> {
        self.decls.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &LiftingDecl)> {
        self.decls.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Checks names, arities and parameter slots of every modal node.
    pub fn check(&self, f: &Formula) -> Result<(), SyntaxError> {
        let mut err = None;
        f.visit(&mut |node| {
            if err.is_some() {
                return;
            }
            if let Formula::Modal(m, args) = node {
                err = self.check_modality(m, args.len()).err();
            }
        });
        err.map_or(Ok(()), Err)
    }

    pub(crate) fn check_modality(&self, m: &Modality, arity: usize) -> Result<(), SyntaxError> {
        let decl = self.get(&m.name).ok_or_else(|| SyntaxError::UnknownLifting(m.name.clone()))?;
        if decl.arity != arity {
            return Err(SyntaxError::Arity { lifting: m.name.clone(), expected: decl.arity, found: arity });
        }
        if decl.parameterized != m.param.is_some() {
            let detail = if decl.parameterized { "requires a parameter" } else { "takes no parameter" };
            return Err(SyntaxError::BadDeclaration(format!("lifting `{}` {detail}", m.name)));
        }
        Ok(())
    }
}

/// The closure of a formula set: subformulas, 0 and 1, and in the delta
/// flavor every canonical constant. Ordered canonically.
pub fn closure<'a>(
    formulas: impl IntoIterator<Item = &'a Formula>,
    flavor: Flavor,
    alg: &FiniteAlgebra,
) -> Vec<Formula> {
    let mut out = BTreeSet::new();
    for f in formulas {
        f.collect_subformulas(&mut out);
    }
    out.insert(Formula::top(alg));
    out.insert(Formula::bottom(alg));
    if flavor == Flavor::Delta {
        out.extend(alg.elements().map(|a| Formula::Const(alg.constant(a))));
    }
    out.into_iter().collect()
}

/// A finite formula set that equals its own closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedSet {
    formulas: Vec<Formula>,
    flavor: Flavor,
}

impl ClosedSet {
    /// The closure of `formulas`.
    pub fn closure_of<'a>(
        formulas: impl IntoIterator<Item = &'a Formula>,
        flavor: Flavor,
        alg: &FiniteAlgebra,
    ) -> Self {
        Self { formulas: closure(formulas, flavor, alg), flavor }
    }

    /// Accepts `formulas` only if it is already closed.
    pub fn new(formulas: Vec<Formula>, flavor: Flavor, alg: &FiniteAlgebra) -> Result<Self, SyntaxError> {
        let given: BTreeSet<Formula> = formulas.into_iter().collect();
        let closed = closure(&given, flavor, alg);
        if closed.len() != given.len() {
            let missing = closed.iter().find(|f| !given.contains(*f)).expect("closure is a superset");
            return Err(SyntaxError::NotClosed(missing.to_string()));
        }
        Ok(Self { formulas: closed, flavor })
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn len(&self) -> usize {
        self.formulas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.formulas.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("syntax error at {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("unknown lifting `{0}`")]
    UnknownLifting(String),
    #[error("lifting `{lifting}` expects {expected} argument(s), found {found}")]
    Arity { lifting: String, expected: usize, found: usize },
    #[error("{what} is not allowed in the {flavor} language")]
    Flavor { flavor: Flavor, what: String },
    #[error("unknown language flavor `{0}`")]
    UnknownFlavor(String),
    #[error("{0}")]
    BadDeclaration(String),
    #[error("formula set is not closed: missing {0}")]
    NotClosed(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}
