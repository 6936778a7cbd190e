//! Test-only oracles and random generators, independent of the library's
//! own differentiation and residual code.
#![allow(dead_code)]

use std::collections::HashMap;
use std::rc::Rc;

use dalembert_core::{Expr, Field, MultiIndex};
use rand::Rng;

/// A separate symbolic differentiator over a private tree type.
#[derive(Debug)]
pub enum Sym {
    C(f64),
    V(usize),
    Neg(Rc<Sym>),
    Add(Rc<Sym>, Rc<Sym>),
    Sub(Rc<Sym>, Rc<Sym>),
    Mul(Rc<Sym>, Rc<Sym>),
    Div(Rc<Sym>, Rc<Sym>),
    PowC(Rc<Sym>, f64),
    Pow(Rc<Sym>, Rc<Sym>),
    Exp(Rc<Sym>),
    Log(Rc<Sym>),
    Sin(Rc<Sym>),
    Cos(Rc<Sym>),
}

type R = Rc<Sym>;

fn is_zero(e: &R) -> bool {
    matches!(**e, Sym::C(c) if c == 0.0)
}

fn c(v: f64) -> R {
    Rc::new(Sym::C(v))
}

fn add(a: R, b: R) -> R {
    if is_zero(&a) {
        b
    } else if is_zero(&b) {
        a
    } else {
        Rc::new(Sym::Add(a, b))
    }
}

fn sub(a: R, b: R) -> R {
    if is_zero(&b) {
        a
    } else if is_zero(&a) {
        Rc::new(Sym::Neg(b))
    } else {
        Rc::new(Sym::Sub(a, b))
    }
}

fn mul(a: R, b: R) -> R {
    if is_zero(&a) || is_zero(&b) {
        c(0.0)
    } else {
        Rc::new(Sym::Mul(a, b))
    }
}

fn div(a: R, b: R) -> R {
    if is_zero(&a) {
        c(0.0)
    } else {
        Rc::new(Sym::Div(a, b))
    }
}

impl Sym {
    pub fn from_expr(e: &Expr) -> R {
        let f = Sym::from_expr;
        Rc::new(match e {
            Expr::Const(v) => Sym::C(*v),
            Expr::Var(i) => Sym::V(*i),
            Expr::Neg(a) => Sym::Neg(f(a)),
            Expr::Add(a, b) => Sym::Add(f(a), f(b)),
            Expr::Sub(a, b) => Sym::Sub(f(a), f(b)),
            Expr::Mul(a, b) => Sym::Mul(f(a), f(b)),
            Expr::Div(a, b) => Sym::Div(f(a), f(b)),
            Expr::Pow(a, b) => match &**b {
                Expr::Const(k) => Sym::PowC(f(a), *k),
                _ => Sym::Pow(f(a), f(b)),
            },
            Expr::Exp(a) => Sym::Exp(f(a)),
            Expr::Log(a) => Sym::Log(f(a)),
            Expr::Sin(a) => Sym::Sin(f(a)),
            Expr::Cos(a) => Sym::Cos(f(a)),
        })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Sym::C(v) => *v,
            Sym::V(i) => x[*i],
            Sym::Neg(a) => -a.eval(x),
            Sym::Add(a, b) => a.eval(x) + b.eval(x),
            Sym::Sub(a, b) => a.eval(x) - b.eval(x),
            Sym::Mul(a, b) => a.eval(x) * b.eval(x),
            Sym::Div(a, b) => a.eval(x) / b.eval(x),
            Sym::PowC(a, k) => a.eval(x).powf(*k),
            Sym::Pow(a, b) => a.eval(x).powf(b.eval(x)),
            Sym::Exp(a) => a.eval(x).exp(),
            Sym::Log(a) => a.eval(x).ln(),
            Sym::Sin(a) => a.eval(x).sin(),
            Sym::Cos(a) => a.eval(x).cos(),
        }
    }
}

pub fn diff(e: &R, v: usize) -> R {
    match &**e {
        Sym::C(_) => c(0.0),
        Sym::V(i) => c(if *i == v { 1.0 } else { 0.0 }),
        Sym::Neg(a) => {
            let d = diff(a, v);
            if is_zero(&d) {
                d
            } else {
                Rc::new(Sym::Neg(d))
            }
        }
        Sym::Add(a, b) => add(diff(a, v), diff(b, v)),
        Sym::Sub(a, b) => sub(diff(a, v), diff(b, v)),
        Sym::Mul(a, b) => add(mul(diff(a, v), b.clone()), mul(a.clone(), diff(b, v))),
        Sym::Div(a, b) => div(
            sub(mul(diff(a, v), b.clone()), mul(a.clone(), diff(b, v))),
            mul(b.clone(), b.clone()),
        ),
        Sym::PowC(a, k) => mul(
            mul(c(*k), Rc::new(Sym::PowC(a.clone(), k - 1.0))),
            diff(a, v),
        ),
        Sym::Pow(a, b) => mul(
            e.clone(),
            add(
                mul(diff(b, v), Rc::new(Sym::Log(a.clone()))),
                div(mul(b.clone(), diff(a, v)), a.clone()),
            ),
        ),
        Sym::Exp(a) => mul(e.clone(), diff(a, v)),
        Sym::Log(a) => div(diff(a, v), a.clone()),
        Sym::Sin(a) => mul(Rc::new(Sym::Cos(a.clone())), diff(a, v)),
        Sym::Cos(a) => mul(Rc::new(Sym::Neg(Rc::new(Sym::Sin(a.clone())))), diff(a, v)),
    }
}

/// All partial derivatives `∂^α e` with `|α| ≤ order`, memoized by `α`.
pub fn all_derivatives(e: &Expr, n: usize, order: usize) -> HashMap<Vec<u32>, R> {
    let mut out: HashMap<Vec<u32>, R> = HashMap::new();
    out.insert(vec![0; n], Sym::from_expr(e));
    let mut frontier = vec![vec![0u32; n]];
    for _ in 0..order {
        let mut next = Vec::new();
        for a in &frontier {
            // extend only with directions ≥ the last nonzero one, so each α is
            // reached once
            let start = a.iter().rposition(|&k| k > 0).unwrap_or(0);
            for v in start..n {
                let mut b = a.clone();
                b[v] += 1;
                let d = diff(&out[a], v);
                out.insert(b.clone(), d);
                next.push(b);
            }
        }
        frontier = next;
    }
    out
}

pub fn factorial(alpha: &[u32]) -> f64 {
    alpha
        .iter()
        .map(|&k| (1..=k).map(f64::from).product::<f64>())
        .product()
}

pub fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= abs + rel * a.abs().max(b.abs())
}

/// Random expression trees over `n` variables that stay finite on `[−1, 1]ⁿ`.
pub fn random_safe_expr<G: Rng>(rng: &mut G, depth: usize, vars: &[usize]) -> Expr {
    use Expr as E;
    let b = Box::new;
    if depth == 0 || rng.random_bool(0.2) {
        return if rng.random_bool(0.7) {
            E::Var(vars[rng.random_range(0..vars.len())])
        } else {
            E::Const((rng.random_range(-2.0..2.0) * 100.0f64).round() / 100.0)
        };
    }
    let sub = |rng: &mut G| random_safe_expr(rng, depth - 1, vars);
    match rng.random_range(0..11) {
        0 => E::Add(b(sub(rng)), b(sub(rng))),
        1 => E::Sub(b(sub(rng)), b(sub(rng))),
        2 | 3 => E::Mul(b(sub(rng)), b(sub(rng))),
        4 => E::Div(b(sub(rng)), b(E::Add(b(E::Const(2.0)), b(E::Cos(b(sub(rng))))))),
        5 => E::Sin(b(sub(rng))),
        6 => E::Cos(b(sub(rng))),
        7 => E::Exp(b(E::Sin(b(sub(rng))))),
        8 => E::Log(b(E::Add(b(E::Const(1.5)), b(E::Sin(b(sub(rng))))))),
        9 => E::Pow(b(E::Sin(b(sub(rng)))), b(E::Const(rng.random_range(2..4) as f64))),
        _ => E::Pow(b(E::Add(b(E::Const(2.0)), b(E::Cos(b(sub(rng)))))), b(E::Const(0.5))),
    }
}

/// A positive factor that does not depend on `skip`.
pub fn random_positive_factor<G: Rng>(rng: &mut G, n: usize, skip: usize, depth: usize) -> Expr {
    use Expr as E;
    let vars: Vec<usize> = (0..n).filter(|&j| j != skip).collect();
    let g = random_safe_expr(rng, depth, &vars);
    let b = Box::new;
    match rng.random_range(0..3) {
        0 => E::Exp(b(E::Mul(b(E::Const(0.5)), b(E::Sin(b(g)))))),
        1 => E::Add(b(E::Const(2.0)), b(E::Sin(b(g)))),
        _ => E::Add(b(E::Const(1.0)), b(E::Pow(b(g), b(E::Const(2.0))))),
    }
}

pub fn random_product_factors<G: Rng>(rng: &mut G, n: usize, depth: usize) -> Vec<Field<f64>> {
    (0..n)
        .map(|i| Field::expression(random_positive_factor(rng, n, i, depth), n).unwrap())
        .collect()
}

pub fn random_point<G: Rng>(rng: &mut G, n: usize, half_width: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-half_width..half_width)).collect()
}

/// All set partitions of `{0, …, n−1}`, as lists of bit masks.
pub fn set_partitions(n: usize) -> Vec<Vec<u32>> {
    fn go(i: usize, n: usize, blocks: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for k in 0..blocks.len() {
            blocks[k] |= 1 << i;
            go(i + 1, n, blocks, out);
            blocks[k] &= !(1 << i);
        }
        blocks.push(1 << i);
        go(i + 1, n, blocks, out);
        blocks.pop();
    }
    let mut out = Vec::new();
    go(0, n, &mut Vec::new(), &mut out);
    out
}

pub fn mask_index(n: usize, mask: u32) -> MultiIndex {
    MultiIndex::new((0..n).map(|j| (mask >> j) & 1).collect()).unwrap()
}

/// `uⁿ·∂₁⋯∂ₙ log u = Σ_π (−1)^{|π|−1}(|π|−1)! u^{n−|π|} Π_{B∈π} u_B`, given a
/// lookup of the square-free mixed partials `u_B`.
pub fn set_partition_residual<T>(n: usize, u: &T, u_b: impl Fn(u32) -> T) -> T
where
    T: Clone + num_traits::Num + num_traits::FromPrimitive,
{
    let mut total = T::zero();
    for p in set_partitions(n) {
        let k = p.len();
        let fact = (1..k).product::<usize>();
        let mut term = T::from_usize(fact).unwrap();
        if k % 2 == 0 {
            term = T::zero() - term;
        }
        for _ in 0..(n - k) {
            term = term * u.clone();
        }
        for &b in &p {
            term = term * u_b(b);
        }
        total = total + term;
    }
    total
}
