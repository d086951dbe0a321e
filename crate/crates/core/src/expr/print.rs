use std::fmt::{self, Write};

use num_complex::Complex64;

use super::Node;

const ADD: u8 = 1;
const MUL: u8 = 2;
const UNARY: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

fn precedence(node: &Node) -> u8 {
    match node {
        Node::Add(..) | Node::Sub(..) => ADD,
        Node::Mul(..) | Node::Div(..) => MUL,
        Node::Neg(_) => UNARY,
        Node::Pow(..) => POW,
        Node::Const(_) | Node::Var | Node::Param(_) | Node::Call(..) => ATOM,
    }
}

fn write_const(out: &mut dyn Write, c: Complex64) -> fmt::Result {
    if c.im == 0.0 {
        if c.re.is_sign_negative() {
            write!(out, "(-{})", -c.re)
        } else {
            write!(out, "{}", c.re)
        }
    } else if c.re == 0.0 && c.im == 1.0 {
        write!(out, "I")
    } else {
        let sign = if c.im < 0.0 { '-' } else { '+' };
        if c.re == 0.0 {
            if c.im < 0.0 {
                write!(out, "(-{}*I)", -c.im)
            } else {
                write!(out, "({}*I)", c.im)
            }
        } else if c.re < 0.0 {
            write!(out, "(-{} {} {}*I)", -c.re, sign, c.im.abs())
        } else {
            write!(out, "({} {} {}*I)", c.re, sign, c.im.abs())
        }
    }
}

pub(super) fn write_node(out: &mut dyn Write, node: &Node, var: &str, min_prec: u8) -> fmt::Result {
    let prec = precedence(node);
    let paren = prec < min_prec;
    if paren {
        out.write_char('(')?;
    }
    match node {
        Node::Const(c) => write_const(out, *c)?,
        Node::Var => out.write_str(var)?,
        Node::Param(p) => out.write_str(p)?,
        Node::Neg(a) => {
            out.write_char('-')?;
            write_node(out, a, var, UNARY)?;
        }
        Node::Add(a, b) | Node::Sub(a, b) => {
            write_node(out, a, var, ADD)?;
            out.write_str(if matches!(node, Node::Add(..)) { " + " } else { " - " })?;
            write_node(out, b, var, ADD + 1)?;
        }
        Node::Mul(a, b) | Node::Div(a, b) => {
            write_node(out, a, var, MUL)?;
            out.write_str(if matches!(node, Node::Mul(..)) { "*" } else { "/" })?;
            write_node(out, b, var, MUL + 1)?;
        }
        Node::Pow(b, n) => {
            write_node(out, b, var, ATOM)?;
            if *n < 0 {
                write!(out, "^(-{})", -(*n as i64))?;
            } else {
                write!(out, "^{n}")?;
            }
        }
        Node::Call(f, a) => {
            write!(out, "{}(", f.name())?;
            write_node(out, a, var, 0)?;
            out.write_char(')')?;
        }
    }
    if paren {
        out.write_char(')')?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{parse_expr, AnalyticExpr};
    use super::*;

    fn roundtrip(text: &str) {
        let first = parse_expr(text).unwrap();
        let printed = first.to_string();
        let second = parse_expr(&printed)
            .unwrap_or_else(|e| panic!("{text:?} printed as {printed:?} failed to parse: {e}"));
        assert_eq!(first.root(), second.root(), "{text:?} -> {printed:?}");
    }

    #[test]
    fn minimal_parentheses() {
        let e = parse_expr("(a + b) - (c - d)").unwrap();
        assert_eq!(e.to_string(), "a + b - (c - d)");
        let e = parse_expr("-(s*2)").unwrap();
        assert_eq!(e.to_string(), "-(s*2)");
        let e = parse_expr("(s^2)^3").unwrap();
        assert_eq!(e.to_string(), "(s^2)^3");
    }

    #[test]
    fn corpus_roundtrips() {
        for text in ["s^2 + 1", "1 + exp(a*s)", "exp(2*(s^2 + b*s))*(s^2 + b*s - 1) + 2"] {
            roundtrip(text);
        }
    }

    #[test]
    fn complex_constants_reparse_to_the_same_value() {
        use std::sync::Arc;
        for c in [
            Complex64::new(0.5, -2.0),
            Complex64::new(-1.25, 3.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-7.0, 0.0),
        ] {
            let e = AnalyticExpr::from_node(Arc::new(Node::Const(c)), "s");
            let back = parse_expr(&e.to_string()).unwrap();
            assert_eq!(back.eval_real(0.0).unwrap(), c, "{}", e);
        }
    }
}
