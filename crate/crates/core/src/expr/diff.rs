use std::collections::HashMap;

use super::{rat, Elementary, Expr, Kind};

/// Memo table for partial derivatives, keyed by node identity. The source
/// node is stored next to its derivative so the pointer key cannot be reused
/// by a different allocation while the entry is alive.
#[derive(Default)]
pub struct DiffCache {
    by_coord: HashMap<String, HashMap<usize, (Expr, Expr)>>,
}

impl DiffCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.by_coord.values().map(HashMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&mut self) {
        self.by_coord.clear();
    }

    pub fn diff(&mut self, e: &Expr, coord: &str) -> Expr {
        if !self.by_coord.contains_key(coord) {
            self.by_coord.insert(coord.to_string(), HashMap::new());
        }
        self.diff_inner(e, coord)
    }

    fn diff_inner(&mut self, e: &Expr, coord: &str) -> Expr {
        match e.kind() {
            Kind::Num(_) | Kind::Param(_) => return Expr::zero(),
            Kind::Coord(c) => return Expr::int((&**c == coord) as i64),
            _ => {}
        }
        if let Some((_, d)) = self.by_coord[coord].get(&e.ptr_id()) {
            return d.clone();
        }
        let d = match e.kind() {
            Kind::Opaque(call) => Expr::sum(
                call.args
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| &***a == coord)
                    .map(|(i, _)| {
                        let mut c = call.clone();
                        c.derivs.push(i as u8);
                        Expr::opaque_call(c)
                    }),
            ),
            Kind::Apply(f, u) => {
                let du = self.diff_inner(u, coord);
                if du.is_zero() {
                    Expr::zero()
                } else {
                    let outer = match f {
                        Elementary::Sin => u.cos(),
                        Elementary::Cos => -u.sin(),
                        Elementary::Exp => e.clone(),
                        Elementary::Log => u.recip(),
                        Elementary::Abs => u.sign(),
                        Elementary::Sign => Expr::zero(),
                    };
                    outer * du
                }
            }
            Kind::Pow(b, k) => {
                let db = self.diff_inner(b, coord);
                if db.is_zero() {
                    Expr::zero()
                } else {
                    Expr::product([
                        Expr::num(k.clone()),
                        Expr::pow(b, k - rat(1, 1)),
                        db,
                    ])
                }
            }
            Kind::Mul(fs) => {
                let mut terms = Vec::new();
                for (i, f) in fs.iter().enumerate() {
                    let df = self.diff_inner(f, coord);
                    if df.is_zero() {
                        continue;
                    }
                    let others = fs
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, g)| g.clone());
                    terms.push(Expr::product(others.chain(std::iter::once(df))));
                }
                Expr::sum(terms)
            }
            Kind::Add(ts) => {
                let parts: Vec<Expr> = ts.iter().map(|t| self.diff_inner(t, coord)).collect();
                Expr::sum(parts)
            }
            Kind::Num(_) | Kind::Param(_) | Kind::Coord(_) => unreachable!(),
        };
        self.by_coord
            .get_mut(coord)
            .expect("coordinate table created on entry")
            .insert(e.ptr_id(), (e.clone(), d.clone()));
        d
    }
}

impl Expr {
    /// Partial derivative with a throwaway memo table.
    pub fn diff(&self, coord: &str) -> Expr {
        DiffCache::new().diff(self, coord)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_rule_with_sine_factor() {
        let (x, y) = (Expr::coord("x"), Expr::coord("y"));
        let e = x.powi(2) * y.sin();
        assert_eq!(e.diff("x"), Expr::int(2) * &x * y.sin());
    }

    #[test]
    fn constants_have_zero_derivative() {
        assert!(Expr::rational(3, 5).diff("x").is_zero());
        assert!(Expr::param("c").diff("x").is_zero());
    }

    #[test]
    fn opaque_functions_track_derivatives() {
        let f = Expr::opaque("F", &["x", "y"]);
        let fx = f.diff("x");
        match fx.kind() {
            Kind::Opaque(c) => assert_eq!(c.derivs, vec![0]),
            other => panic!("unexpected {other:?}"),
        }
        assert!(f.diff("z").is_zero());
        // mixed partials commute structurally
        assert_eq!(fx.diff("y"), f.diff("y").diff("x"));
    }

    #[test]
    fn quotient_and_chain_rules() {
        let x = Expr::coord("x");
        let e = x.sin() / &x;
        let expected = x.cos() / &x - x.sin() / x.powi(2);
        assert_eq!(e.diff("x"), expected);
        let l = x.powi(2).abs().log();
        assert_eq!(l.diff("x"), Expr::int(2) / &x);
    }
}
