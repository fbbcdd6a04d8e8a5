//! Finite FL_ew algebras.
//!
//! An algebra is stored as four total `k × k` operation tables over element
//! indices `0..k`. Łukasiewicz chains additionally decorate each index `m`
//! with the exact rational `m/(n-1)`. The Baaz Delta and the valuation
//! operations `tau_c`/`upsilon_c` are computed from the lattice order, so
//! every algebra supports all three language flavors.

use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rationals used for truth values, distributions and parameters.
pub type Rational = Ratio<i64>;

/// An element of a finite algebra, identified by its index in `0..k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TruthValue(u32);

impl TruthValue {
    pub const fn new(index: u32) -> Self {
        Self(index)
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AlgebraKind {
    Lukasiewicz { n: u32 },
    Table,
}

/// The algebraic laws checked by [`FiniteAlgebra::validate`], in checking order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    MeetIdempotence,
    JoinIdempotence,
    MeetCommutativity,
    JoinCommutativity,
    MeetAssociativity,
    JoinAssociativity,
    Absorption,
    OrderConsistency,
    Bounds,
    ProdCommutativity,
    ProdAssociativity,
    ProdIdentity,
    Residuation,
}

impl Law {
    pub const ALL: [Law; 13] = [
        Law::MeetIdempotence,
        Law::JoinIdempotence,
        Law::MeetCommutativity,
        Law::JoinCommutativity,
        Law::MeetAssociativity,
        Law::JoinAssociativity,
        Law::Absorption,
        Law::OrderConsistency,
        Law::Bounds,
        Law::ProdCommutativity,
        Law::ProdAssociativity,
        Law::ProdIdentity,
        Law::Residuation,
    ];
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Law::MeetIdempotence => "meet idempotence",
            Law::JoinIdempotence => "join idempotence",
            Law::MeetCommutativity => "meet commutativity",
            Law::JoinCommutativity => "join commutativity",
            Law::MeetAssociativity => "meet associativity",
            Law::JoinAssociativity => "join associativity",
            Law::Absorption => "absorption",
            Law::OrderConsistency => "order consistency (a&b=a iff a|b=b)",
            Law::Bounds => "bounds (0 <= a <= 1)",
            Law::ProdCommutativity => "prod commutativity",
            Law::ProdAssociativity => "prod associativity",
            Law::ProdIdentity => "prod identity (1*a = a)",
            Law::Residuation => "residuation (a*b <= c iff b <= a->c)",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawCheck {
    pub law: Law,
    /// Element indices witnessing a failure; `None` when the law holds.
    pub witness: Option<Vec<usize>>,
}

impl LawCheck {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlgebraReport {
    pub checks: Vec<LawCheck>,
}

impl AlgebraReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(LawCheck::passed)
    }

    pub fn first_failure(&self) -> Option<&LawCheck> {
        self.checks.iter().find(|c| !c.passed())
    }

    pub fn check(&self, law: Law) -> Option<&LawCheck> {
        self.checks.iter().find(|c| c.law == law)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("table `{table}` is not total: {detail}")]
    NonTotalTable { table: &'static str, detail: String },
    #[error("{law} violated at {witness:?}")]
    LawViolation { law: Law, witness: Vec<usize> },
    #[error("truth value index {index} is not in an algebra of size {size}")]
    DomainMismatch { index: usize, size: usize },
    #[error("cannot read truth value `{0}`")]
    BadValue(String),
    #[error("constant {0} is not an element of the algebra")]
    ForeignConstant(String),
}

/// A canonical constant as written in formulas: an exact rational for
/// Łukasiewicz chains, an element index for table algebras.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Constant {
    Ratio(Rational),
    Index(u32),
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Ratio(r) => write!(f, "{r}"),
            Constant::Index(i) => write!(f, "{i}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    k: usize,
    kind: AlgebraKind,
    meet: Vec<TruthValue>,
    join: Vec<TruthValue>,
    prod: Vec<TruthValue>,
    imp: Vec<TruthValue>,
    zero: TruthValue,
    one: TruthValue,
    leq: Vec<bool>,
}

impl FiniteAlgebra {
    /// The `n`-valued Łukasiewicz chain on `{m/(n-1) | 0 <= m < n}`.
    pub fn lukasiewicz(n: u32) -> Result<Self, AlgebraError> {
        if n < 2 {
            return Err(AlgebraError::InvalidParameter(format!("Łukasiewicz chain needs n >= 2, got {n}")));
        }
        let k = n as usize;
        let top = Rational::from_integer(i64::from(n - 1));
        let value = |m: usize| Rational::new(m as i64, i64::from(n - 1));
        // Index m is the value m/(n-1); convert an exact result back to its index.
        let index = |r: Rational| {
            let m = r * top;
            debug_assert!(m.is_integer());
            TruthValue::new(m.to_integer() as u32)
        };
        let mut meet = Vec::with_capacity(k * k);
        let mut join = Vec::with_capacity(k * k);
        let mut prod = Vec::with_capacity(k * k);
        let mut imp = Vec::with_capacity(k * k);
        for a in 0..k {
            for b in 0..k {
                let (x, y) = (value(a), value(b));
                meet.push(index(x.min(y)));
                join.push(index(x.max(y)));
                prod.push(index((x + y - Rational::one()).max(Rational::zero())));
                imp.push(index((Rational::one() - x + y).min(Rational::one())));
            }
        }
        let alg = Self::assemble(
            k,
            AlgebraKind::Lukasiewicz { n },
            meet,
            join,
            prod,
            imp,
            TruthValue::new(0),
            TruthValue::new(n - 1),
        );
        debug_assert!(alg.validate().passed());
        Ok(alg)
    }

    /// Builds an algebra from explicit tables, accepting it only if every
    /// FL_ew law holds. The error names the first violated law.
    pub fn from_tables(
        k: usize,
        meet: &[Vec<usize>],
        join: &[Vec<usize>],
        prod: &[Vec<usize>],
        imp: &[Vec<usize>],
        zero: usize,
        one: usize,
    ) -> Result<Self, AlgebraError> {
        if k < 2 {
            return Err(AlgebraError::InvalidParameter(format!("algebra size must be >= 2, got {k}")));
        }
        if zero >= k || one >= k {
            return Err(AlgebraError::InvalidParameter(format!(
                "designated elements zero={zero}, one={one} must be below {k}"
            )));
        }
        let alg = Self::assemble(
            k,
            AlgebraKind::Table,
            flatten("meet", k, meet)?,
            flatten("join", k, join)?,
            flatten("prod", k, prod)?,
            flatten("impl", k, imp)?,
            TruthValue::new(zero as u32),
            TruthValue::new(one as u32),
        );
        match alg.validate().first_failure() {
            Some(check) => {
                Err(AlgebraError::LawViolation { law: check.law, witness: check.witness.clone().unwrap_or_default() })
            }
            None => Ok(alg),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        k: usize,
        kind: AlgebraKind,
        meet: Vec<TruthValue>,
        join: Vec<TruthValue>,
        prod: Vec<TruthValue>,
        imp: Vec<TruthValue>,
        zero: TruthValue,
        one: TruthValue,
    ) -> Self {
        let leq = (0..k * k).map(|i| meet[i].index() == i / k).collect();
        Self { k, kind, meet, join, prod, imp, zero, one, leq }
    }

    pub fn size(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> AlgebraKind {
        self.kind
    }

    pub fn is_lukasiewicz(&self) -> bool {
        matches!(self.kind, AlgebraKind::Lukasiewicz { .. })
    }

    pub fn zero(&self) -> TruthValue {
        self.zero
    }

    pub fn one(&self) -> TruthValue {
        self.one
    }

    pub fn elements(&self) -> impl Iterator<Item = TruthValue> + '_ {
        (0..self.k as u32).map(TruthValue::new)
    }

    /// Validates an externally supplied index.
    pub fn element(&self, index: usize) -> Result<TruthValue, AlgebraError> {
        if index < self.k {
            Ok(TruthValue::new(index as u32))
        } else {
            Err(AlgebraError::DomainMismatch { index, size: self.k })
        }
    }

    /// Returns `a` if it belongs to this algebra.
    pub fn check(&self, a: TruthValue) -> Result<TruthValue, AlgebraError> {
        self.element(a.index())
    }

    // The table operations below assume their arguments come from this
    // algebra (see `check`); foreign indices panic on lookup.

    #[inline]
    fn at(&self, table: &[TruthValue], a: TruthValue, b: TruthValue) -> TruthValue {
        table[a.index() * self.k + b.index()]
    }

    #[inline]
    pub fn meet(&self, a: TruthValue, b: TruthValue) -> TruthValue {
        self.at(&self.meet, a, b)
    }

    #[inline]
    pub fn join(&self, a: TruthValue, b: TruthValue) -> TruthValue {
        self.at(&self.join, a, b)
    }

    #[inline]
    pub fn prod(&self, a: TruthValue, b: TruthValue) -> TruthValue {
        self.at(&self.prod, a, b)
    }

    #[inline]
    pub fn imp(&self, a: TruthValue, b: TruthValue) -> TruthValue {
        self.at(&self.imp, a, b)
    }

    /// `a <= b` iff `a ∧ b = a`.
    #[inline]
    pub fn leq(&self, a: TruthValue, b: TruthValue) -> bool {
        self.leq[a.index() * self.k + b.index()]
    }

    /// Meet of a collection; the empty meet is 1.
    pub fn big_meet(&self, values: impl IntoIterator<Item = TruthValue>) -> TruthValue {
        values.into_iter().fold(self.one, |acc, v| self.meet(acc, v))
    }

    /// Join of a collection; the empty join is 0.
    pub fn big_join(&self, values: impl IntoIterator<Item = TruthValue>) -> TruthValue {
        values.into_iter().fold(self.zero, |acc, v| self.join(acc, v))
    }

    fn crisp(&self, b: bool) -> TruthValue {
        if b {
            self.one
        } else {
            self.zero
        }
    }

    /// Baaz Delta: 1 exactly at 1.
    pub fn delta(&self, a: TruthValue) -> TruthValue {
        self.crisp(a == self.one)
    }

    /// `tau_c(a)`: 1 iff `a = c`.
    pub fn tau(&self, c: TruthValue, a: TruthValue) -> TruthValue {
        self.crisp(a == c)
    }

    /// `upsilon_c(a)`: 1 iff `a >= c`.
    pub fn upsilon(&self, c: TruthValue, a: TruthValue) -> TruthValue {
        self.crisp(self.leq(c, a))
    }

    pub fn neg(&self, a: TruthValue) -> TruthValue {
        self.imp(a, self.zero)
    }

    pub fn iff(&self, a: TruthValue, b: TruthValue) -> TruthValue {
        self.prod(self.imp(a, b), self.imp(b, a))
    }

    /// Exhaustively checks every FL_ew law; the witness of each failure is
    /// the lexicographically least violating tuple.
    pub fn validate(&self) -> AlgebraReport {
        let els: Vec<TruthValue> = self.elements().collect();
        let pairs = || els.iter().flat_map(|&a| els.iter().map(move |&b| (a, b)));
        let triples = || pairs().flat_map(|(a, b)| els.iter().map(move |&c| (a, b, c)));
        let one = |f: &dyn Fn(TruthValue) -> bool| els.iter().find(|&&a| !f(a)).map(|a| vec![a.index()]);
        let two = |f: &dyn Fn(TruthValue, TruthValue) -> bool| {
            pairs().find(|&(a, b)| !f(a, b)).map(|(a, b)| vec![a.index(), b.index()])
        };
        let three = |f: &dyn Fn(TruthValue, TruthValue, TruthValue) -> bool| {
            triples().find(|&(a, b, c)| !f(a, b, c)).map(|(a, b, c)| vec![a.index(), b.index(), c.index()])
        };

        let checks = Law::ALL
            .iter()
            .map(|&law| {
                let witness = match law {
                    Law::MeetIdempotence => one(&|a| self.meet(a, a) == a),
                    Law::JoinIdempotence => one(&|a| self.join(a, a) == a),
                    Law::MeetCommutativity => two(&|a, b| self.meet(a, b) == self.meet(b, a)),
                    Law::JoinCommutativity => two(&|a, b| self.join(a, b) == self.join(b, a)),
                    Law::MeetAssociativity => {
                        three(&|a, b, c| self.meet(self.meet(a, b), c) == self.meet(a, self.meet(b, c)))
                    }
                    Law::JoinAssociativity => {
                        three(&|a, b, c| self.join(self.join(a, b), c) == self.join(a, self.join(b, c)))
                    }
                    Law::Absorption => {
                        two(&|a, b| self.meet(a, self.join(a, b)) == a && self.join(a, self.meet(a, b)) == a)
                    }
                    Law::OrderConsistency => two(&|a, b| (self.meet(a, b) == a) == (self.join(a, b) == b)),
                    Law::Bounds => one(&|a| self.leq(self.zero, a) && self.leq(a, self.one)),
                    Law::ProdCommutativity => two(&|a, b| self.prod(a, b) == self.prod(b, a)),
                    Law::ProdAssociativity => {
                        three(&|a, b, c| self.prod(self.prod(a, b), c) == self.prod(a, self.prod(b, c)))
                    }
                    Law::ProdIdentity => one(&|a| self.prod(self.one, a) == a),
                    Law::Residuation => three(&|a, b, c| self.leq(self.prod(a, b), c) == self.leq(b, self.imp(a, c))),
                };
                LawCheck { law, witness }
            })
            .collect();
        AlgebraReport { checks }
    }

    /// The exact rational decorating `a` in a Łukasiewicz chain.
    pub fn rational(&self, a: TruthValue) -> Option<Rational> {
        match self.kind {
            AlgebraKind::Lukasiewicz { n } => Some(Rational::new(a.index() as i64, i64::from(n - 1))),
            AlgebraKind::Table => None,
        }
    }

    /// The element with exact rational value `r`, if the chain contains it.
    pub fn from_rational(&self, r: Rational) -> Option<TruthValue> {
        match self.kind {
            AlgebraKind::Lukasiewicz { n } => {
                let m = r * Rational::from_integer(i64::from(n - 1));
                (m.is_integer() && m >= Rational::zero() && m.to_integer() < i64::from(n))
                    .then(|| TruthValue::new(m.to_integer() as u32))
            }
            AlgebraKind::Table => None,
        }
    }

    /// The canonical formula constant for `a`.
    pub fn constant(&self, a: TruthValue) -> Constant {
        match self.rational(a) {
            Some(r) => Constant::Ratio(r),
            None => Constant::Index(a.index() as u32),
        }
    }

    /// Resolves a formula constant to an element.
    pub fn resolve(&self, c: &Constant) -> Result<TruthValue, AlgebraError> {
        match (c, self.kind) {
            (Constant::Ratio(r), AlgebraKind::Lukasiewicz { .. }) => {
                self.from_rational(*r).ok_or_else(|| AlgebraError::ForeignConstant(c.to_string()))
            }
            (Constant::Index(i), AlgebraKind::Table) => {
                self.element(*i as usize).map_err(|_| AlgebraError::ForeignConstant(c.to_string()))
            }
            _ => Err(AlgebraError::ForeignConstant(c.to_string())),
        }
    }

    /// Renders a value the way model files write it: a reduced rational for
    /// Łukasiewicz chains, the index for table algebras.
    pub fn format_value(&self, a: TruthValue) -> String {
        match self.rational(a) {
            Some(r) => r.to_string(),
            None => a.index().to_string(),
        }
    }

    /// Inverse of [`format_value`](Self::format_value).
    pub fn parse_value(&self, text: &str) -> Result<TruthValue, AlgebraError> {
        let text = text.trim();
        match self.kind {
            AlgebraKind::Lukasiewicz { .. } => {
                let r = parse_rational(text).ok_or_else(|| AlgebraError::BadValue(text.into()))?;
                self.from_rational(r).ok_or_else(|| AlgebraError::ForeignConstant(text.into()))
            }
            AlgebraKind::Table => {
                let i: usize = text.parse().map_err(|_| AlgebraError::BadValue(text.into()))?;
                self.element(i)
            }
        }
    }
}

fn flatten(table: &'static str, k: usize, rows: &[Vec<usize>]) -> Result<Vec<TruthValue>, AlgebraError> {
    if rows.len() != k {
        return Err(AlgebraError::NonTotalTable { table, detail: format!("expected {k} rows, found {}", rows.len()) });
    }
    let mut out = Vec::with_capacity(k * k);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != k {
            return Err(AlgebraError::NonTotalTable {
                table,
                detail: format!("row {i} has {} entries, expected {k}", row.len()),
            });
        }
        for (j, &v) in row.iter().enumerate() {
            if v >= k {
                return Err(AlgebraError::NonTotalTable {
                    table,
                    detail: format!("entry ({i},{j}) = {v} is outside 0..{k}"),
                });
            }
            out.push(TruthValue::new(v as u32));
        }
    }
    Ok(out)
}

/// Parses `m`, `m/d` (or `-m/d`) into a reduced rational.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim().parse::<i64>().ok()?, d.trim().parse::<i64>().ok()?),
        None => (text.parse::<i64>().ok()?, 1),
    };
    (den != 0).then(|| Rational::new(num, den))
}
