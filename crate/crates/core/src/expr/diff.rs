use std::collections::HashMap;
use std::sync::Arc;

use super::{add, call, div, mul, neg, pow, real, sub, AnalyticExpr, Func, Node};

type Memo = HashMap<*const Node, Arc<Node>>;

// Memoized on node identity so a subtree shared n times is differentiated
// once and its derivative is shared as well.
fn derive(node: &Arc<Node>, memo: &mut Memo) -> Arc<Node> {
    let key = Arc::as_ptr(node);
    if let Some(d) = memo.get(&key) {
        return d.clone();
    }
    let d = derive_uncached(node, memo);
    memo.insert(key, d.clone());
    d
}

fn derive_uncached(node: &Arc<Node>, memo: &mut Memo) -> Arc<Node> {
    let mut derive = |n: &Arc<Node>| derive(n, memo);
    match &**node {
        Node::Const(_) | Node::Param(_) => real(0.0),
        Node::Var => real(1.0),
        Node::Neg(a) => neg(derive(a)),
        Node::Add(a, b) => add(derive(a), derive(b)),
        Node::Sub(a, b) => sub(derive(a), derive(b)),
        Node::Mul(a, b) => add(mul(derive(a), b.clone()), mul(a.clone(), derive(b))),
        Node::Div(a, b) => {
            let da = derive(a);
            let db = derive(b);
            if db.constant().is_some_and(|c| c.norm() == 0.0) {
                div(da, b.clone())
            } else {
                div(sub(mul(da, b.clone()), mul(a.clone(), db)), pow(b.clone(), 2))
            }
        }
        Node::Pow(b, n) => mul(
            mul(real(*n as f64), pow(b.clone(), n - 1)),
            derive(b),
        ),
        Node::Call(f, a) => {
            let da = derive(a);
            let outer = match f {
                Func::Exp => node.clone(),
                Func::Sin => call(Func::Cos, a.clone()),
                Func::Cos => neg(call(Func::Sin, a.clone())),
                Func::Sqrt => div(real(0.5), node.clone()),
                Func::Log => div(real(1.0), a.clone()),
            };
            mul(outer, da)
        }
    }
}

/// Exact symbolic derivative of the given order with respect to the
/// expression's variable. Order 0 returns a copy of `e`.
pub fn diff_expr(e: &AnalyticExpr, order: usize) -> AnalyticExpr {
    let mut root = e.root().clone();
    for _ in 0..order {
        root = derive(&root, &mut Memo::new());
    }
    e.with_root(root)
}
