use crate::poset::{Antichain, Direction, Point};

use super::{DesignProblem, DpError};

/// Which resource coordinate feeds which functionality coordinate, and how
/// the least fixpoint is searched for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSpec {
    pub fun_coord: usize,
    pub res_coord: usize,
    /// Relative step size at which the iteration is considered converged.
    pub tol: f64,
    pub max_iter: usize,
    /// Loop values above this are treated as divergence.
    pub ceiling: f64,
}

impl TraceSpec {
    pub fn new(fun_coord: usize, res_coord: usize) -> Self {
        Self { fun_coord, res_coord, tol: 1e-9, max_iter: 200, ceiling: 1e9 }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_ceiling(mut self, ceiling: f64) -> Self {
        self.ceiling = ceiling;
        self
    }
}

#[derive(Debug, Clone)]
pub struct KleeneOutcome {
    /// Resources of the loop body at the fixpoint, loop coordinate included.
    /// Empty when the iteration diverged or did not converge.
    pub fixpoint: Antichain,
    pub iterations: usize,
    pub converged: bool,
    /// Largest relative change of any coordinate in the final step.
    pub residual: f64,
}

fn validate(body: &DesignProblem, spec: &TraceSpec) -> Result<(), DpError> {
    let TraceSpec { fun_coord, res_coord, tol, max_iter, ceiling } = *spec;
    if fun_coord >= body.fun().dim() || res_coord >= body.res().dim() {
        return Err(DpError::InvalidTrace(format!("loop coordinates ({fun_coord}, {res_coord}) out of range")));
    }
    if body.fun().direction(fun_coord) != Direction::Increasing
        || body.res().direction(res_coord) != Direction::Increasing
    {
        return Err(DpError::InvalidTrace("loop coordinates must be increasing chains with bottom 0".into()));
    }
    if !(tol > 0.0) || max_iter == 0 || !(ceiling > 0.0) {
        return Err(DpError::InvalidTrace(format!("bad iteration settings {spec:?}")));
    }
    Ok(())
}

fn rel_step(a: &Point, b: &Point) -> f64 {
    a.coords()
        .iter()
        .zip(b.coords())
        .map(|(&x, &y)| if x == y { 0.0 } else { (x - y).abs() / x.abs().max(y.abs()).max(1.0) })
        .fold(0.0, f64::max)
}

fn max_rel_step(next: &Antichain, prev: &Antichain) -> f64 {
    next.points()
        .iter()
        .map(|p| prev.points().iter().map(|q| rel_step(p, q)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Kleene iteration from the bottom of the loop chain.
///
/// Each candidate `s` (a lower bound on the body's resources, loop value
/// included) is fed back as the loop functionality; the next candidates are
/// the joins of `s` with the resulting requirements. For a single-valued
/// body this is `x_{k+1} = h(x_k)` with `x_0 = 0`.
pub fn kleene(body: &DesignProblem, spec: &TraceSpec, f: &Point) -> Result<KleeneOutcome, DpError> {
    validate(body, spec)?;
    let res = body.res();
    let (fc, rc) = (spec.fun_coord, spec.res_coord);
    let mut current: Option<Antichain> = None;
    let mut prev_floor: Option<f64> = None;

    for k in 0..spec.max_iter {
        let seeds: Vec<Point> = match &current {
            None => vec![res.bottom()],
            Some(s) => s.points().to_vec(),
        };
        let mut next = Antichain::empty(res.clone());
        let mut floor = f64::INFINITY;
        for s in &seeds {
            let x = s.get(rc);
            let reqs = body.eval(&f.with_inserted(fc, x))?;
            floor = floor.min(reqs.min_coord(rc));
            for t in reqs.points() {
                let j = res.join(s, t);
                if j.get(rc) <= spec.ceiling {
                    next.insert_unchecked(j);
                }
            }
        }
        if let Some(before) = prev_floor {
            if floor < before - spec.tol * before.abs().max(1.0) {
                return Err(DpError::NonMonotoneLoop { iteration: k, before, after: floor });
            }
        }
        prev_floor = Some(floor);

        if next.is_empty() {
            return Ok(KleeneOutcome { fixpoint: next, iterations: k + 1, converged: false, residual: f64::INFINITY });
        }
        if let Some(prev) = &current {
            let residual = max_rel_step(&next, prev);
            if next.len() == prev.len() && residual <= spec.tol {
                return Ok(KleeneOutcome { fixpoint: next, iterations: k + 1, converged: true, residual });
            }
        }
        current = Some(next);
    }
    Ok(KleeneOutcome {
        fixpoint: Antichain::empty(res.clone()),
        iterations: spec.max_iter,
        converged: false,
        residual: f64::INFINITY,
    })
}

/// Feeds resource `spec.res_coord` of `body` back into functionality
/// `spec.fun_coord`. Both coordinates disappear from the interface.
pub fn trace(body: &DesignProblem, spec: TraceSpec) -> Result<DesignProblem, DpError> {
    validate(body, &spec)?;
    let fun = body.fun().without(spec.fun_coord);
    let res = body.res().without(spec.res_coord);
    let body = body.clone();
    let out = res.clone();
    let label = format!("trace({})", body.label());
    Ok(DesignProblem::new(label, fun, res, move |f| {
        let outcome = kleene(&body, &spec, f)?;
        Ok(outcome.fixpoint.map_points(out.clone(), |p| p.without(spec.res_coord)))
    }))
}
