use std::collections::{BTreeMap, BTreeSet};

use crate::poset::PosetDescriptor;

use super::{intersection, mismatch, parallel, series, trace, union, DesignProblem, DpError, TraceSpec};

/// Design problems bound to the named slots of a [`Diagram`].
pub type Bindings = BTreeMap<String, DesignProblem>;

/// A co-design diagram as a composition expression. Leaves are fixed design
/// problems or named slots filled in at solve time; a slot may appear more
/// than once and is bound to the same design problem everywhere.
#[derive(Clone, Debug)]
pub enum Diagram {
    Leaf(DesignProblem),
    Slot { name: String, fun: PosetDescriptor, res: PosetDescriptor },
    Series(Box<Diagram>, Box<Diagram>),
    Parallel(Box<Diagram>, Box<Diagram>),
    Union(Box<Diagram>, Box<Diagram>),
    Intersection(Box<Diagram>, Box<Diagram>),
    Trace(Box<Diagram>, TraceSpec),
}

impl Diagram {
    pub fn leaf(dp: DesignProblem) -> Self {
        Diagram::Leaf(dp)
    }

    pub fn slot(name: impl Into<String>, fun: PosetDescriptor, res: PosetDescriptor) -> Self {
        Diagram::Slot { name: name.into(), fun, res }
    }

    pub fn then(self, next: Diagram) -> Self {
        Diagram::Series(Box::new(self), Box::new(next))
    }

    pub fn beside(self, other: Diagram) -> Self {
        Diagram::Parallel(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Diagram) -> Self {
        Diagram::Union(Box::new(self), Box::new(other))
    }

    pub fn and(self, other: Diagram) -> Self {
        Diagram::Intersection(Box::new(self), Box::new(other))
    }

    pub fn traced(self, spec: TraceSpec) -> Self {
        Diagram::Trace(Box::new(self), spec)
    }

    /// Series composition of a nonempty list, left to right.
    pub fn chain(parts: impl IntoIterator<Item = Diagram>) -> Option<Self> {
        parts.into_iter().reduce(Diagram::then)
    }

    pub fn union_all(parts: impl IntoIterator<Item = Diagram>) -> Option<Self> {
        parts.into_iter().reduce(Diagram::or)
    }

    /// Interface of the composite, checking every connection on the way.
    pub fn interface(&self) -> Result<(PosetDescriptor, PosetDescriptor), DpError> {
        match self {
            Diagram::Leaf(dp) => Ok((dp.fun().clone(), dp.res().clone())),
            Diagram::Slot { fun, res, .. } => Ok((fun.clone(), res.clone())),
            Diagram::Series(a, b) => {
                let (fa, ra) = a.interface()?;
                let (fb, rb) = b.interface()?;
                if !ra.compatible(&fb) {
                    return Err(DpError::IllTyped(mismatch("series", &ra, &fb).to_string()));
                }
                Ok((fa, rb))
            }
            Diagram::Parallel(a, b) => {
                let (fa, ra) = a.interface()?;
                let (fb, rb) = b.interface()?;
                Ok((fa.product(&fb), ra.product(&rb)))
            }
            Diagram::Union(a, b) | Diagram::Intersection(a, b) => {
                let (fa, ra) = a.interface()?;
                let (fb, rb) = b.interface()?;
                if !fa.compatible(&fb) || !ra.compatible(&rb) {
                    return Err(DpError::IllTyped(format!("choice between {fa:?}→{ra:?} and {fb:?}→{rb:?}")));
                }
                Ok((fa, ra))
            }
            Diagram::Trace(body, spec) => {
                let (f, r) = body.interface()?;
                if spec.fun_coord >= f.dim() || spec.res_coord >= r.dim() {
                    return Err(DpError::IllTyped(format!("feedback {spec:?} outside {f:?}→{r:?}")));
                }
                Ok((f.without(spec.fun_coord), r.without(spec.res_coord)))
            }
        }
    }

    pub fn slots(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_slots(&mut out);
        out
    }

    fn collect_slots(&self, out: &mut BTreeSet<String>) {
        match self {
            Diagram::Leaf(_) => {}
            Diagram::Slot { name, .. } => {
                out.insert(name.clone());
            }
            Diagram::Series(a, b) | Diagram::Parallel(a, b) | Diagram::Union(a, b) | Diagram::Intersection(a, b) => {
                a.collect_slots(out);
                b.collect_slots(out);
            }
            Diagram::Trace(body, _) => body.collect_slots(out),
        }
    }

    /// Composite design problem with every slot filled from `bindings`.
    pub fn solve(&self, bindings: &Bindings) -> Result<DesignProblem, DpError> {
        self.interface()?;
        self.build(bindings)
    }

    fn build(&self, bindings: &Bindings) -> Result<DesignProblem, DpError> {
        match self {
            Diagram::Leaf(dp) => Ok(dp.clone()),
            Diagram::Slot { name, fun, res } => {
                let dp = bindings.get(name).ok_or_else(|| DpError::UnboundSlot(name.clone()))?;
                if !dp.fun().compatible(fun) || !dp.res().compatible(res) {
                    return Err(DpError::IllTyped(format!(
                        "slot `{name}` expects {fun:?}→{res:?}, bound to {:?}→{:?}",
                        dp.fun(),
                        dp.res()
                    )));
                }
                Ok(dp.clone())
            }
            Diagram::Series(a, b) => series(&a.build(bindings)?, &b.build(bindings)?),
            Diagram::Parallel(a, b) => parallel(&a.build(bindings)?, &b.build(bindings)?),
            Diagram::Union(a, b) => union(&a.build(bindings)?, &b.build(bindings)?),
            Diagram::Intersection(a, b) => intersection(&a.build(bindings)?, &b.build(bindings)?),
            Diagram::Trace(body, spec) => trace(&body.build(bindings)?, *spec),
        }
    }
}

/// Solves a diagram without free slots.
pub fn solve_diagram(d: &Diagram) -> Result<DesignProblem, DpError> {
    d.solve(&Bindings::new())
}
