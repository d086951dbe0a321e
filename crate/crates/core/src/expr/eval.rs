use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use super::{Func, Node};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("parameter `{0}` has no value")]
    UnboundParameter(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("{0} overflowed to a non-finite value")]
    Overflow(&'static str),
    #[error("{0} evaluated at a singular point")]
    Singular(&'static str),
}

fn finite(z: Complex64, op: &'static str) -> Result<Complex64, EvalError> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(EvalError::Overflow(op))
    }
}

pub(crate) fn eval_node(
    node: &Node,
    z: Complex64,
    params: &BTreeMap<String, f64>,
) -> Result<Complex64, EvalError> {
    match node {
        Node::Const(c) => Ok(*c),
        Node::Var => Ok(z),
        Node::Param(name) => param(name, params),
        Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => {
            unary(node, eval_node(a, z, params)?)
        }
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            binary(node, eval_node(a, z, params)?, eval_node(b, z, params)?)
        }
    }
}

/// Like [`eval_node`] but evaluates every shared subtree once. Worth it for
/// derivative trees, whose tree size is far larger than their node count.
pub(crate) fn eval_shared(
    node: &Arc<Node>,
    z: Complex64,
    params: &BTreeMap<String, f64>,
) -> Result<Complex64, EvalError> {
    fn go(
        node: &Arc<Node>,
        z: Complex64,
        params: &BTreeMap<String, f64>,
        memo: &mut HashMap<*const Node, Complex64>,
    ) -> Result<Complex64, EvalError> {
        let key = Arc::as_ptr(node);
        if let Some(v) = memo.get(&key) {
            return Ok(*v);
        }
        let v = match &**node {
            Node::Const(c) => *c,
            Node::Var => z,
            Node::Param(name) => param(name, params)?,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => {
                unary(node, go(a, z, params, memo)?)?
            }
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                let x = go(a, z, params, memo)?;
                binary(node, x, go(b, z, params, memo)?)?
            }
        };
        memo.insert(key, v);
        Ok(v)
    }
    go(node, z, params, &mut HashMap::new())
}

fn param(name: &str, params: &BTreeMap<String, f64>) -> Result<Complex64, EvalError> {
    params
        .get(name)
        .map(|v| Complex64::new(*v, 0.0))
        .ok_or_else(|| EvalError::UnboundParameter(name.to_string()))
}

fn unary(node: &Node, arg: Complex64) -> Result<Complex64, EvalError> {
    let zero = Complex64::new(0.0, 0.0);
    match node {
        Node::Neg(_) => Ok(-arg),
        Node::Pow(_, n) => {
            if *n < 0 && arg == zero {
                return Err(EvalError::DivisionByZero);
            }
            finite(arg.powi(*n), "power")
        }
        Node::Call(f, _) => match f {
            Func::Exp => finite(arg.exp(), "exp"),
            Func::Sin => finite(arg.sin(), "sin"),
            Func::Cos => finite(arg.cos(), "cos"),
            Func::Sqrt => finite(arg.sqrt(), "sqrt"),
            Func::Log => {
                if arg == zero {
                    Err(EvalError::Singular("log"))
                } else {
                    finite(arg.ln(), "log")
                }
            }
        },
        _ => unreachable!("not a unary node"),
    }
}

fn binary(node: &Node, x: Complex64, y: Complex64) -> Result<Complex64, EvalError> {
    match node {
        Node::Add(..) => finite(x + y, "sum"),
        Node::Sub(..) => finite(x - y, "difference"),
        Node::Mul(..) => finite(x * y, "product"),
        Node::Div(..) => {
            if y == Complex64::new(0.0, 0.0) {
                return Err(EvalError::DivisionByZero);
            }
            finite(x / y, "quotient")
        }
        _ => unreachable!("not a binary node"),
    }
}
