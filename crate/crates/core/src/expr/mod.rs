//! Analytic expressions of one complex variable.
//!
//! An [`AnalyticExpr`] is an immutable tree over constants, the free
//! variable (`s` for symbols, `t` for forcing terms and test functions),
//! named real parameters, the four arithmetic operations, integer powers
//! and the functions `exp`, `sin`, `cos`, `sqrt`, `log`. Branch functions
//! use the principal branch.

mod diff;
mod eval;
mod parse;
mod print;
mod region;
mod roots;
mod taylor;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

pub use diff::diff_expr;
pub use eval::EvalError;
pub use parse::{parse_expr, parse_expr_in, ParseError};
pub use region::{GammaRegion, RegionError, Symbol};
pub use roots::{find_zero, RootError};
pub use taylor::{
    taylor_coeffs, taylor_coeffs_cauchy, taylor_coeffs_symbolic, TaylorCoeffs, TaylorMethod,
    SYMBOLIC_NODE_BUDGET,
};

/// Elementary functions understood by the parser.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Sqrt,
    Log,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
            Func::Log => "log",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "log" => Func::Log,
            _ => return None,
        })
    }
}

/// Expression tree node. Children are reference counted so derivative
/// trees can share subtrees.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Const(Complex64),
    Var,
    Param(String),
    Neg(Arc<Node>),
    Add(Arc<Node>, Arc<Node>),
    Sub(Arc<Node>, Arc<Node>),
    Mul(Arc<Node>, Arc<Node>),
    Div(Arc<Node>, Arc<Node>),
    Pow(Arc<Node>, i32),
    Call(Func, Arc<Node>),
}

impl Node {
    pub fn constant(&self) -> Option<Complex64> {
        match self {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Node::Const(c) if *c == Complex64::new(0.0, 0.0))
    }

    fn is_one(&self) -> bool {
        matches!(self, Node::Const(c) if *c == Complex64::new(1.0, 0.0))
    }

    /// Number of nodes counted as a tree (shared subtrees count once per use).
    /// Counting stops early once `limit` is exceeded.
    pub fn size_up_to(&self, limit: usize) -> usize {
        fn walk(n: &Node, acc: &mut usize, limit: usize) {
            *acc += 1;
            if *acc > limit {
                return;
            }
            match n {
                Node::Const(_) | Node::Var | Node::Param(_) => {}
                Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => walk(a, acc, limit),
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    walk(a, acc, limit);
                    walk(b, acc, limit);
                }
            }
        }
        let mut acc = 0;
        walk(self, &mut acc, limit);
        acc
    }

    /// Number of distinct nodes, shared subtrees counted once. Counting
    /// stops early once `limit` is exceeded.
    pub fn dag_size_up_to(self: &Arc<Node>, limit: usize) -> usize {
        fn walk(n: &Arc<Node>, seen: &mut HashSet<*const Node>, limit: usize) {
            if seen.len() > limit || !seen.insert(Arc::as_ptr(n)) {
                return;
            }
            match &**n {
                Node::Const(_) | Node::Var | Node::Param(_) => {}
                Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => walk(a, seen, limit),
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    walk(a, seen, limit);
                    walk(b, seen, limit);
                }
            }
        }
        let mut seen = HashSet::new();
        walk(self, &mut seen, limit);
        seen.len()
    }

    /// True when the variable does not occur in the subtree.
    pub fn is_free_of_var(&self) -> bool {
        match self {
            Node::Var => false,
            Node::Const(_) | Node::Param(_) => true,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.is_free_of_var(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.is_free_of_var() && b.is_free_of_var()
            }
        }
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Node::Param(p) => {
                out.insert(p.clone());
            }
            Node::Const(_) | Node::Var => {}
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.collect_params(out),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
        }
    }
}

// Simplifying constructors. They only fold what is exactly foldable
// (identities with 0 and 1 and constant arithmetic).

pub(crate) fn cnst(c: Complex64) -> Arc<Node> {
    Arc::new(Node::Const(c))
}

pub(crate) fn real(x: f64) -> Arc<Node> {
    cnst(Complex64::new(x, 0.0))
}

pub(crate) fn neg(a: Arc<Node>) -> Arc<Node> {
    match &*a {
        Node::Const(c) => cnst(-*c),
        Node::Neg(inner) => inner.clone(),
        _ => Arc::new(Node::Neg(a)),
    }
}

pub(crate) fn add(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
    if a.is_zero() {
        return b;
    }
    if b.is_zero() {
        return a;
    }
    match (a.constant(), b.constant()) {
        (Some(x), Some(y)) => cnst(x + y),
        _ => Arc::new(Node::Add(a, b)),
    }
}

pub(crate) fn sub(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
    if b.is_zero() {
        return a;
    }
    if a.is_zero() {
        return neg(b);
    }
    match (a.constant(), b.constant()) {
        (Some(x), Some(y)) => cnst(x - y),
        _ => Arc::new(Node::Sub(a, b)),
    }
}

pub(crate) fn mul(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
    if a.is_zero() || b.is_zero() {
        return real(0.0);
    }
    if a.is_one() {
        return b;
    }
    if b.is_one() {
        return a;
    }
    match (a.constant(), b.constant()) {
        (Some(x), Some(y)) => cnst(x * y),
        (None, Some(_)) => mul(b, a),
        (Some(x), None) => match &*b {
            Node::Mul(l, r) if l.constant().is_some() => {
                mul(cnst(x * l.constant().unwrap()), r.clone())
            }
            Node::Neg(inner) => mul(cnst(-x), inner.clone()),
            _ => Arc::new(Node::Mul(a, b)),
        },
        (None, None) => Arc::new(Node::Mul(a, b)),
    }
}

pub(crate) fn div(a: Arc<Node>, b: Arc<Node>) -> Arc<Node> {
    if a.is_zero() {
        return real(0.0);
    }
    if b.is_one() {
        return a;
    }
    match (a.constant(), b.constant()) {
        (Some(x), Some(y)) if y != Complex64::new(0.0, 0.0) => cnst(x / y),
        (None, Some(y)) if y != Complex64::new(0.0, 0.0) => mul(cnst(y.inv()), a),
        _ => Arc::new(Node::Div(a, b)),
    }
}

pub(crate) fn pow(b: Arc<Node>, n: i32) -> Arc<Node> {
    match n {
        0 => real(1.0),
        1 => b,
        _ => match b.constant() {
            Some(c) if n > 0 || c != Complex64::new(0.0, 0.0) => cnst(c.powi(n)),
            _ => Arc::new(Node::Pow(b, n)),
        },
    }
}

pub(crate) fn call(f: Func, a: Arc<Node>) -> Arc<Node> {
    Arc::new(Node::Call(f, a))
}

/// A parsed analytic expression together with its parameter bindings.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalyticExpr {
    root: Arc<Node>,
    var: String,
    params: BTreeMap<String, f64>,
}

impl AnalyticExpr {
    pub fn from_node(root: Arc<Node>, var: impl Into<String>) -> Self {
        AnalyticExpr {
            root,
            var: var.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn constant(c: Complex64, var: impl Into<String>) -> Self {
        Self::from_node(cnst(c), var)
    }

    pub fn root(&self) -> &Arc<Node> {
        &self.root
    }

    /// Name of the free variable (`s` or `t`).
    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    pub fn with_param(mut self, name: impl Into<String>, value: f64) -> Self {
        self.params.insert(name.into(), value);
        self
    }

    pub fn with_params<I, K>(mut self, params: I) -> Self
    where
        I: IntoIterator<Item = (K, f64)>,
        K: Into<String>,
    {
        for (k, v) in params {
            self.params.insert(k.into(), v);
        }
        self
    }

    /// Parameter names that occur in the tree.
    pub fn param_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.root.collect_params(&mut out);
        out
    }

    /// Parameter names that occur in the tree but have no value yet.
    pub fn unbound(&self) -> BTreeSet<String> {
        self.param_names()
            .into_iter()
            .filter(|p| !self.params.contains_key(p))
            .collect()
    }

    /// Replaces bound parameters by constants and re-simplifies.
    pub fn inline_params(&self) -> AnalyticExpr {
        fn walk(n: &Arc<Node>, params: &BTreeMap<String, f64>) -> Arc<Node> {
            match &**n {
                Node::Param(p) => match params.get(p) {
                    Some(v) => real(*v),
                    None => n.clone(),
                },
                Node::Const(_) | Node::Var => n.clone(),
                Node::Neg(a) => neg(walk(a, params)),
                Node::Add(a, b) => add(walk(a, params), walk(b, params)),
                Node::Sub(a, b) => sub(walk(a, params), walk(b, params)),
                Node::Mul(a, b) => mul(walk(a, params), walk(b, params)),
                Node::Div(a, b) => div(walk(a, params), walk(b, params)),
                Node::Pow(a, k) => pow(walk(a, params), *k),
                Node::Call(f, a) => call(*f, walk(a, params)),
            }
        }
        self.with_root(walk(&self.root, &self.params))
    }

    pub fn size(&self) -> usize {
        self.root.size_up_to(usize::MAX)
    }

    pub fn is_constant(&self) -> bool {
        self.root.is_free_of_var()
    }

    /// Same bindings and variable, different tree.
    pub(crate) fn with_root(&self, root: Arc<Node>) -> Self {
        AnalyticExpr {
            root,
            var: self.var.clone(),
            params: self.params.clone(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64, EvalError> {
        eval::eval_node(&self.root, z, &self.params)
    }

    /// Evaluation that visits each shared subtree once.
    pub fn eval_shared(&self, z: Complex64) -> Result<Complex64, EvalError> {
        eval::eval_shared(&self.root, z, &self.params)
    }

    pub fn eval_real(&self, x: f64) -> Result<Complex64, EvalError> {
        self.eval(Complex64::new(x, 0.0))
    }

    /// Pointwise combinations. Parameter maps are merged, right side wins.
    pub fn add(&self, other: &AnalyticExpr) -> AnalyticExpr {
        self.combine(other, add)
    }

    pub fn sub(&self, other: &AnalyticExpr) -> AnalyticExpr {
        self.combine(other, sub)
    }

    pub fn mul(&self, other: &AnalyticExpr) -> AnalyticExpr {
        self.combine(other, mul)
    }

    pub fn div(&self, other: &AnalyticExpr) -> AnalyticExpr {
        self.combine(other, div)
    }

    pub fn scale(&self, c: Complex64) -> AnalyticExpr {
        self.with_root(mul(cnst(c), self.root.clone()))
    }

    fn combine(
        &self,
        other: &AnalyticExpr,
        op: fn(Arc<Node>, Arc<Node>) -> Arc<Node>,
    ) -> AnalyticExpr {
        let mut params = self.params.clone();
        params.extend(other.params.iter().map(|(k, v)| (k.clone(), *v)));
        AnalyticExpr {
            root: op(self.root.clone(), other.root.clone()),
            var: self.var.clone(),
            params,
        }
    }
}

/// Unparses to text the parser reads back into the same tree.
impl fmt::Display for AnalyticExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_node(f, &self.root, &self.var, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_fold_identities() {
        let x = Arc::new(Node::Var);
        assert_eq!(add(real(0.0), x.clone()), x);
        assert_eq!(mul(real(1.0), x.clone()), x);
        assert!(mul(real(0.0), x.clone()).is_zero());
        assert_eq!(mul(real(2.0), mul(real(3.0), x.clone())), mul(real(6.0), x.clone()));
        assert_eq!(neg(neg(x.clone())), x);
        assert_eq!(pow(x.clone(), 1), x);
        assert!(pow(x, 0).is_one());
    }

    #[test]
    fn unbound_parameters_are_recorded() {
        let e = parse_expr("1 + exp(a*s) + b").unwrap().with_param("a", 1.0);
        let unbound: Vec<_> = e.unbound().into_iter().collect();
        assert_eq!(unbound, vec!["b".to_string()]);
    }
}
