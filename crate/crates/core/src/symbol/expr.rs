use std::fmt;

use crate::error::{guard, Error, Result, MAX_ORDER};

use super::jet::{compose_jets, cos_jet, exp_jet, log_jet, powi_jet, sin_jet, tanh_jet, Jet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Tanh,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tanh => "tanh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }

    fn apply(self, t: f64) -> Result<f64> {
        match self {
            Func::Exp => guard(t.exp()),
            Func::Log if t <= 0.0 => Err(Error::Domain(format!("log of non-positive value {t}"))),
            Func::Log => Ok(t.ln()),
            Func::Sin => Ok(t.sin()),
            Func::Cos => Ok(t.cos()),
            Func::Tanh => Ok(t.tanh()),
        }
    }

    fn jet(self, t: f64, m: usize) -> Result<Jet> {
        match self {
            Func::Exp => exp_jet(t, m),
            Func::Log => log_jet(t, m),
            Func::Sin => Ok(sin_jet(t, m)),
            Func::Cos => Ok(cos_jet(t, m)),
            Func::Tanh => Ok(tanh_jet(t, m)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
    Call(Func, Box<Node>),
    /// `outer` evaluated at `inner`.
    Compose(Box<Node>, Box<Node>),
}

impl Node {
    fn eval(&self, x: f64) -> Result<f64> {
        let v = match self {
            Node::Const(c) => *c,
            Node::Var => x,
            Node::Neg(a) => -a.eval(x)?,
            Node::Add(a, b) => a.eval(x)? + b.eval(x)?,
            Node::Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Node::Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Node::Div(a, b) => {
                let d = b.eval(x)?;
                if d == 0.0 {
                    return Err(Error::Domain("division by zero".into()));
                }
                a.eval(x)? / d
            }
            Node::Pow(a, k) => {
                let base = a.eval(x)?;
                if base == 0.0 && *k < 0 {
                    return Err(Error::Domain("zero raised to a negative power".into()));
                }
                base.powi(*k)
            }
            Node::Call(f, a) => f.apply(a.eval(x)?)?,
            Node::Compose(outer, inner) => outer.eval(inner.eval(x)?)?,
        };
        guard(v)
    }

    fn jet(&self, x: f64, m: usize) -> Result<Jet> {
        match self {
            Node::Const(c) => Ok(Jet::constant(x, *c, m)),
            Node::Var => Ok(Jet::variable(x, m)),
            Node::Neg(a) => Ok(a.jet(x, m)?.neg()),
            Node::Add(a, b) => a.jet(x, m)?.add(&b.jet(x, m)?),
            Node::Sub(a, b) => a.jet(x, m)?.sub(&b.jet(x, m)?),
            Node::Mul(a, b) => a.jet(x, m)?.mul(&b.jet(x, m)?),
            Node::Div(a, b) => a.jet(x, m)?.div(&b.jet(x, m)?),
            Node::Pow(a, k) => {
                let inner = a.jet(x, m)?;
                compose_jets(&powi_jet(inner.value(), *k, m)?, &inner)
            }
            Node::Call(f, a) => {
                let inner = a.jet(x, m)?;
                compose_jets(&f.jet(inner.value(), m)?, &inner)
            }
            Node::Compose(outer, inner) => {
                let inner = inner.jet(x, m)?;
                compose_jets(&outer.jet(inner.value(), m)?, &inner)
            }
        }
    }

    pub fn contains_var(&self) -> bool {
        match self {
            Node::Const(_) => false,
            Node::Var => true,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.contains_var(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.contains_var() || b.contains_var()
            }
            Node::Compose(outer, inner) => outer.contains_var() && inner.contains_var(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Node::Add(..) | Node::Sub(..) => 1,
            Node::Mul(..) | Node::Div(..) => 2,
            Node::Neg(_) => 3,
            Node::Pow(..) => 4,
            Node::Const(c) if *c < 0.0 => 3,
            _ => 5,
        }
    }

    /// Writes the node with every occurrence of `x` replaced by `var`.
    fn write(&self, f: &mut fmt::Formatter<'_>, var: Option<&Node>) -> fmt::Result {
        let child = |f: &mut fmt::Formatter<'_>, n: &Node, min_prec: u8| -> fmt::Result {
            if n.precedence() < min_prec {
                write!(f, "(")?;
                n.write(f, var)?;
                write!(f, ")")
            } else {
                n.write(f, var)
            }
        };
        match self {
            Node::Const(c) => write!(f, "{c}"),
            Node::Var => match var {
                Some(v) => {
                    write!(f, "(")?;
                    v.write(f, None)?;
                    write!(f, ")")
                }
                None => write!(f, "x"),
            },
            Node::Neg(a) => {
                write!(f, "-")?;
                child(f, a, 4)
            }
            Node::Add(a, b) => {
                child(f, a, 1)?;
                write!(f, "+")?;
                child(f, b, 2)
            }
            Node::Sub(a, b) => {
                child(f, a, 1)?;
                write!(f, "-")?;
                child(f, b, 2)
            }
            Node::Mul(a, b) => {
                child(f, a, 2)?;
                write!(f, "*")?;
                child(f, b, 4)
            }
            Node::Div(a, b) => {
                child(f, a, 2)?;
                write!(f, "/")?;
                child(f, b, 4)
            }
            Node::Pow(a, k) => {
                child(f, a, 5)?;
                if *k < 0 {
                    write!(f, "^({k})")
                } else {
                    write!(f, "^{k}")
                }
            }
            Node::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write(f, var)?;
                write!(f, ")")
            }
            Node::Compose(outer, inner) => {
                // Substitute the (already substituted) inner expression.
                match var {
                    None => outer.write(f, Some(inner)),
                    Some(v) => {
                        let substituted = Node::Compose(inner.clone(), Box::new(v.clone()));
                        outer.write(f, Some(&substituted))
                    }
                }
            }
        }
    }
}

/// A real function of one variable `x`, used both for symbols φ and for
/// test functions f.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolExpr {
    root: Node,
}

impl SymbolExpr {
    pub fn new(root: Node) -> Self {
        SymbolExpr { root }
    }

    pub fn parse(text: &str) -> Result<Self> {
        super::parse::parse(text)
    }

    pub fn identity() -> Self {
        SymbolExpr { root: Node::Var }
    }

    pub fn constant(c: f64) -> Self {
        SymbolExpr { root: Node::Const(c) }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.root.eval(x)
    }

    /// Raw derivatives `f(x), f'(x), ..., f^(m)(x)`.
    pub fn jet(&self, x: f64, m: usize) -> Result<Jet> {
        if m > MAX_ORDER {
            return Err(Error::OrderTooHigh(m));
        }
        self.root.jet(x, m)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SymbolExpr) -> SymbolExpr {
        SymbolExpr { root: Node::Compose(Box::new(self.root.clone()), Box::new(inner.root.clone())) }
    }

    /// Second iterate `φ ∘ φ`.
    pub fn square(&self) -> SymbolExpr {
        self.compose(self)
    }

    pub fn shifted(&self, c: f64) -> SymbolExpr {
        SymbolExpr { root: Node::Add(Box::new(self.root.clone()), Box::new(Node::Const(c))) }
    }

    pub fn scaled(&self, c: f64) -> SymbolExpr {
        SymbolExpr { root: Node::Mul(Box::new(Node::Const(c)), Box::new(self.root.clone())) }
    }

    pub fn plus(&self, other: &SymbolExpr) -> SymbolExpr {
        SymbolExpr { root: Node::Add(Box::new(self.root.clone()), Box::new(other.root.clone())) }
    }
}

/// Plain evaluation as a convenience for callers that only hold the tree.
pub fn eval_jet(f: &SymbolExpr, x: f64, m: usize) -> Result<Jet> {
    f.jet(x, m)
}

impl fmt::Display for SymbolExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.write(f, None)
    }
}
