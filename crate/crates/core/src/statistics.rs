//! Statistics on signed sets and compatibility checking.

use crate::elem::Elem;
use crate::error::{Error, Result};
use crate::sijection::PAR_CHUNK;
use crate::sijection::{all_elements, Side, Sijection};
use rayon::prelude::*;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StatValue {
    Int(i64),
    Seq(Vec<i64>),
    /// Sequence of multisets, each stored sorted.
    MultiSeq(Vec<Vec<i64>>),
    Tuple(Vec<StatValue>),
}

impl StatValue {
    pub fn multiseq(rows: Vec<Vec<i64>>) -> StatValue {
        StatValue::MultiSeq(
            rows.into_iter()
                .map(|mut r| {
                    r.sort_unstable();
                    r
                })
                .collect(),
        )
    }

    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::Value;
        match self {
            StatValue::Int(x) => Value::from(*x),
            StatValue::Seq(v) => Value::from(v.clone()),
            StatValue::MultiSeq(v) => Value::from(v.clone()),
            StatValue::Tuple(v) => Value::Array(v.iter().map(StatValue::to_json).collect()),
        }
    }
}

impl fmt::Display for StatValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json())
    }
}

type StatFn = dyn Fn(Side, &Elem) -> Result<StatValue> + Send + Sync;

/// A named statistic; it may depend on which side an element lives on.
#[derive(Clone)]
pub struct Statistic {
    pub name: String,
    f: Arc<StatFn>,
}

impl Statistic {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(Side, &Elem) -> Result<StatValue> + Send + Sync + 'static,
    ) -> Statistic {
        Statistic {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// The same function on both sides.
    pub fn uniform(
        name: impl Into<String>,
        f: impl Fn(&Elem) -> Result<StatValue> + Send + Sync + 'static,
    ) -> Statistic {
        Statistic::new(name, move |_, e| f(e))
    }

    /// Separate functions for the domain and the codomain.
    pub fn sided(
        name: impl Into<String>,
        dom: impl Fn(&Elem) -> Result<StatValue> + Send + Sync + 'static,
        cod: impl Fn(&Elem) -> Result<StatValue> + Send + Sync + 'static,
    ) -> Statistic {
        Statistic::new(name, move |s, e| match s {
            Side::Dom => dom(e),
            Side::Cod => cod(e),
        })
    }

    pub fn eval(&self, side: Side, e: &Elem) -> Result<StatValue> {
        (self.f)(side, e)
    }

    pub fn constant(name: impl Into<String>, v: StatValue) -> Statistic {
        Statistic::uniform(name, move |_| Ok(v.clone()))
    }
}

/// η1 × η2 on a product: Tuple[a, b] ↦ (η1(a), η2(b)).
pub fn product_statistic(parts: Vec<Statistic>) -> Statistic {
    let name = parts
        .iter()
        .map(|p| p.name.as_str())
        .collect::<Vec<_>>()
        .join("×");
    Statistic::new(name, move |side, e| {
        let items = e.items();
        if items.len() != parts.len() {
            return Err(Error::Interface("product statistic arity mismatch".into()));
        }
        Ok(StatValue::Tuple(
            parts
                .iter()
                .zip(items)
                .map(|(p, x)| p.eval(side, x))
                .collect::<Result<_>>()?,
        ))
    })
}

/// η1 ⊔ η2 on a disjoint union: Tagged(i, s) ↦ η_i(s).
pub fn union_statistic(parts: Vec<Statistic>) -> Statistic {
    let name = parts
        .iter()
        .map(|p| p.name.as_str())
        .collect::<Vec<_>>()
        .join("⊔");
    Statistic::new(name, move |side, e| {
        let (i, x) = e.tagged();
        parts
            .get(i as usize)
            .ok_or_else(|| Error::Interface(format!("tag {i} out of range")))?
            .eval(side, x)
    })
}

/// Several statistics at once: e ↦ (η1(e), η2(e), ...).
pub fn pair_statistic(parts: Vec<Statistic>) -> Statistic {
    let name = parts
        .iter()
        .map(|p| p.name.as_str())
        .collect::<Vec<_>>()
        .join(",");
    Statistic::new(name, move |side, e| {
        Ok(StatValue::Tuple(
            parts
                .iter()
                .map(|p| p.eval(side, e))
                .collect::<Result<_>>()?,
        ))
    })
}

/// Provenance of a normal signed set: how it was built from intervals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Interval,
    Union(Vec<Shape>),
    /// Union of one repeated shape, each part tagged.
    UnionOf(Box<Shape>),
    Product(Vec<Shape>),
    /// Product of `n` intervals.
    Box(usize),
    /// Indexed union Tuple[s, t]; the value comes from s only.
    Fiber(Box<Shape>),
}

fn normal_value(shape: &Shape, e: &Elem) -> Result<StatValue> {
    let bad = || Error::Interface(format!("element {e} does not match a normal shape"));
    match (shape, e) {
        (Shape::Interval, Elem::Atom(v)) => Ok(StatValue::Int(*v)),
        (Shape::Union(parts), Elem::Tagged(i, x)) => {
            normal_value(parts.get(*i as usize).ok_or_else(bad)?, x)
        }
        (Shape::UnionOf(inner), Elem::Tagged(_, x)) => normal_value(inner, x),
        (Shape::Product(parts), Elem::Tuple(v)) if v.len() == parts.len() => Ok(StatValue::Tuple(
            parts
                .iter()
                .zip(v.iter())
                .map(|(p, x)| normal_value(p, x))
                .collect::<Result<_>>()?,
        )),
        (Shape::Box(n), Elem::Tuple(v)) if v.len() == *n => Ok(StatValue::Tuple(
            v.iter()
                .map(|x| normal_value(&Shape::Interval, x))
                .collect::<Result<_>>()?,
        )),
        (Shape::Box(0), Elem::Unit) => Ok(StatValue::Tuple(vec![])),
        (Shape::Fiber(inner), Elem::Tuple(v)) if v.len() == 2 => normal_value(inner, &v[0]),
        _ => Err(bad()),
    }
}

/// The normal statistic of a set with the given provenance on each side.
pub fn normal_statistic(dom: Shape, cod: Shape) -> Statistic {
    Statistic::sided(
        "normal",
        move |e| normal_value(&dom, e),
        move |e| normal_value(&cod, e),
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompatReport {
    pub statistic: String,
    pub checked: usize,
    pub witness: Option<String>,
}

impl CompatReport {
    pub fn compatible(&self) -> bool {
        self.witness.is_none()
    }
}

impl fmt::Display for CompatReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(
                f,
                "compatible with {} ({} elements)",
                self.statistic, self.checked
            ),
            Some(w) => write!(f, "not compatible with {}: {w}", self.statistic),
        }
    }
}

/// Checks η(φ(s)) = η(s) for every support element s on both sides.
pub fn check_compatibility(phi: &Sijection, eta: &Statistic) -> CompatReport {
    let elems = all_elements(phi);
    let witness = elems
        .par_iter()
        .with_min_len(PAR_CHUNK)
        .filter_map(|(side, e)| {
            let run = || -> Result<Option<String>> {
                let (s2, y) = phi.apply(*side, e)?;
                let a = eta.eval(*side, e)?;
                let b = eta.eval(s2, &y)?;
                Ok((a != b).then(|| {
                    format!(
                        "{} {e} has {a}, its image {} {y} has {b}",
                        side.name(),
                        s2.name()
                    )
                }))
            };
            match run() {
                Ok(w) => w,
                Err(err) => Some(format!("{} {e}: {err}", side.name())),
            }
        })
        .find_first(|_| true);
    CompatReport {
        statistic: eta.name.clone(),
        checked: elems.len(),
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signed::interval;
    use crate::sijection::{compose, identity, interval_split, product, union};

    #[test]
    fn identity_is_compatible_with_anything() {
        let s = Arc::new(interval(0, 5).unwrap());
        let eta = Statistic::uniform("parity", |e| Ok(StatValue::Int(e.atom() % 2)));
        assert!(check_compatibility(&identity(s), &eta).compatible());
    }

    #[test]
    fn split_is_normal_compatible() {
        let eta = normal_statistic(
            Shape::Interval,
            Shape::Union(vec![Shape::Interval, Shape::Interval]),
        );
        for (a, b, c) in [(1, 3, 2), (3, 1, 5), (0, 4, 4), (2, 0, 1)] {
            let f = interval_split(a, b, c).unwrap();
            assert!(check_compatibility(&f, &eta).compatible());
        }
    }

    #[test]
    fn compatibility_survives_combinators() {
        let f = interval_split(0, 3, 1).unwrap();
        let g = interval_split(2, 0, 4).unwrap();
        let leaf = normal_statistic(
            Shape::Interval,
            Shape::Union(vec![Shape::Interval, Shape::Interval]),
        );
        let p = product(&[f.clone(), g.clone()]).unwrap();
        let pe = product_statistic(vec![leaf.clone(), leaf.clone()]);
        assert!(check_compatibility(&p, &pe).compatible());
        let u = union(&[f.clone(), g]).unwrap();
        let ue = union_statistic(vec![leaf.clone(), leaf.clone()]);
        assert!(check_compatibility(&u, &ue).compatible());
        let c = compose(&f, &identity(f.cod().clone())).unwrap();
        assert!(check_compatibility(&c, &leaf).compatible());
    }

    #[test]
    fn incompatibility_has_witness() {
        let f = interval_split(0, 3, 1).unwrap();
        let eta = Statistic::sided(
            "tagged",
            |_| Ok(StatValue::Int(0)),
            |e| Ok(StatValue::Int(e.tagged().0 as i64)),
        );
        let r = check_compatibility(&f, &eta);
        assert!(!r.compatible());
        assert!(r.witness.is_some());
    }

    #[test]
    fn normal_box_and_fiber() {
        let e = Elem::pair(Elem::atoms(&[1, 5]), Elem::atoms(&[9]));
        assert_eq!(
            normal_value(&Shape::Fiber(Box::new(Shape::Box(2))), &e).unwrap(),
            StatValue::Tuple(vec![StatValue::Int(1), StatValue::Int(5)])
        );
        assert!(normal_value(&Shape::Interval, &e).is_err());
    }

    #[test]
    fn multiseq_sorted() {
        assert_eq!(
            StatValue::multiseq(vec![vec![5, 2]]),
            StatValue::MultiSeq(vec![vec![2, 5]])
        );
        assert_eq!(StatValue::Seq(vec![1, 2]).to_string(), "[1,2]");
    }
}
