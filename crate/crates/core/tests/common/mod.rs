//! Oracles shared by the integration suites. Everything here is rebuilt from
//! the defining formulas rather than through the library's tensor pipeline.

#![allow(dead_code)]

use biconformal::biconformal::BiconformalData;
use biconformal::expr::{eval, EvalContext, Expr};
use biconformal::fixtures::{adapted, Adapted, AdaptedSpec, Dependence};
use rand::Rng;

/// `Ξ₁(x) G_αβ(x^γ) dx^α dx^β + Ξ₂(x) G_AB(x^C) dx^A dx^B` on four
/// coordinates split two and two.
pub fn two_by_two_separable(seed: u64) -> Adapted {
    let spec = AdaptedSpec {
        n: 4,
        p: 2,
        first: Dependence::All,
        second: Dependence::All,
        shared_factor: false,
        flat_leaves: false,
        tilted_first_leaf: false,
    };
    adapted(&spec, seed).unwrap()
}

fn inverse2(g: &[Vec<Expr>]) -> [[Expr; 2]; 2] {
    let det = &g[0][0] * &g[1][1] - &g[0][1] * &g[1][0];
    let r = det.recip();
    [
        [&g[1][1] * &r, -(&g[0][1] * &r)],
        [-(&g[1][0] * &r), &g[0][0] * &r],
    ]
}

fn det2(g: &[Vec<Expr>]) -> Expr {
    &g[0][0] * &g[1][1] - &g[0][1] * &g[1][0]
}

/// Christoffel symbols of a 2×2 metric living on coordinates `off, off+1`.
fn christoffel2(g: &[Vec<Expr>], off: usize) -> Vec<Vec<Vec<Expr>>> {
    let names = ["x1", "x2", "x3", "x4"];
    let d = |e: &Expr, i: usize| e.diff(names[off + i]);
    let inv = inverse2(g);
    (0..2)
        .map(|a| {
            (0..2)
                .map(|b| {
                    (0..2)
                        .map(|c| {
                            Expr::sum((0..2).map(|r| {
                                Expr::rational(1, 2)
                                    * &inv[a][r]
                                    * (d(&g[r][c], b) + d(&g[r][b], c) - d(&g[b][c], r))
                            }))
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Named residual lists whose vanishing is the closed-form description of
/// `M`, `E`, `W` and the adapted connection for [`two_by_two_separable`].
pub fn separable_residuals(a: &Adapted, d: &BiconformalData) -> Vec<(String, Vec<Expr>)> {
    let names = ["x1", "x2", "x3", "x4"];
    let leaf = |i: usize| if i < 2 { 0 } else { 1 };
    let (xi, g) = ([&a.xi1, &a.xi2], [&a.g1, &a.g2]);
    let h = |i: usize, j: usize| -> Expr {
        match (leaf(i), leaf(j)) {
            (0, 0) => &a.xi1 * &a.g1[i][j],
            (1, 1) => &a.xi2 * &a.g2[i - 2][j - 2],
            _ => Expr::zero(),
        }
    };

    let mut m = Vec::new();
    for x in 0..4 {
        for y in 0..4 {
            for z in 0..4 {
                let expected = match (leaf(x), leaf(y), leaf(z)) {
                    (0, 1, 1) => h(y, z).diff(names[x]),
                    (1, 0, 0) => -h(y, z).diff(names[x]),
                    _ => Expr::zero(),
                };
                m.push(d.m_tensor().get(&[x, y, z]) - expected);
            }
        }
    }

    let mut e = Vec::new();
    let mut w = Vec::new();
    let log_det = |k: usize| (xi[k].powi(2) * det2(g[k])).abs().log();
    for x in 0..4 {
        let e_expected = if leaf(x) == 1 { -log_det(0).diff(names[x]) } else { Expr::zero() };
        let w_expected = if leaf(x) == 0 { -log_det(1).diff(names[x]) } else { Expr::zero() };
        e.push(d.e().get(&[x]) - e_expected);
        w.push(d.w().get(&[x]) - w_expected);
    }

    let gbar = d.gbar();
    let mut mixed = Vec::new();
    for x in 0..4 {
        for y in 0..4 {
            for z in 0..4 {
                if leaf(x) == leaf(y) && leaf(y) != leaf(z) {
                    mixed.push(gbar.coeff(x, y, z).clone());
                    mixed.push(gbar.coeff(x, z, y).clone());
                }
            }
        }
    }

    let mut within = Vec::new();
    for k in 0..2 {
        let off = 2 * k;
        let inv = inverse2(g[k]);
        let gamma = christoffel2(g[k], off);
        let f = xi[k];
        let df = |i: usize| f.diff(names[off + i]);
        let delta = |i: usize, j: usize| Expr::int((i == j) as i64);
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    let raised = Expr::sum((0..2).map(|r| &inv[x][r] * df(r)));
                    let expected = (delta(x, y) * df(z) + delta(x, z) * df(y) - &g[k][y][z] * raised)
                        / (Expr::int(2) * f)
                        + &gamma[x][y][z];
                    within.push(gbar.coeff(off + x, off + y, off + z) - expected);
                }
            }
        }
    }

    vec![
        ("M".into(), m),
        ("E".into(), e),
        ("W".into(), w),
        ("mixed-connection".into(), mixed),
        ("leaf-connection".into(), within),
    ]
}

/// Random expression in `vars` whose values stay moderate on `[0.5, 1.5]^n`.
pub fn random_expr(rng: &mut impl Rng, vars: &[&str], depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.75) {
            Expr::coord(vars[rng.gen_range(0..vars.len())])
        } else {
            Expr::rational(rng.gen_range(-5..=5), rng.gen_range(1..=4))
        };
    }
    let sub = |rng: &mut _| random_expr(rng, vars, depth - 1);
    match rng.gen_range(0..9) {
        0 => sub(rng) + sub(rng),
        1 => sub(rng) - sub(rng),
        2 => sub(rng) * sub(rng),
        3 => sub(rng) / (Expr::one() + sub(rng).powi(2)),
        4 => sub(rng).sin(),
        5 => sub(rng).cos(),
        6 => sub(rng).sin().exp(),
        7 => (Expr::rational(1, 2) + sub(rng).powi(2)).log(),
        _ => (Expr::one() + sub(rng).powi(2)).sqrt() * sub(rng).powi(rng.gen_range(1..=3)),
    }
}

/// Central difference of `e` in coordinate `i` at `x`.
pub fn central_difference(e: &Expr, ctx: &EvalContext, x: &[f64], i: usize, h: f64) -> f64 {
    let mut xp = x.to_vec();
    let mut xm = x.to_vec();
    xp[i] += h;
    xm[i] -= h;
    (eval(e, ctx, &xp).unwrap() - eval(e, ctx, &xm).unwrap()) / (2.0 * h)
}
