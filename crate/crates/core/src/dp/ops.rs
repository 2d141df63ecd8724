use crate::poset::Antichain;

use super::{mismatch, DesignProblem, DpError};

/// `a` then `b`: the resources of `a` are the functionalities of `b`.
pub fn series(a: &DesignProblem, b: &DesignProblem) -> Result<DesignProblem, DpError> {
    if !a.res().compatible(b.fun()) {
        return Err(mismatch("series", a.res(), b.fun()));
    }
    let (a2, b2) = (a.clone(), b.clone());
    let label = format!("({} ; {})", a.label(), b.label());
    Ok(DesignProblem::new(label, a.fun().clone(), b.res().clone(), move |f| {
        let mut out = Antichain::empty(b2.res().clone());
        for q in a2.eval(f)?.points() {
            for r in b2.eval(q)?.into_points() {
                out.insert_unchecked(r);
            }
        }
        Ok(out)
    }))
}

/// Side by side: functionalities and resources are concatenated.
pub fn parallel(a: &DesignProblem, b: &DesignProblem) -> Result<DesignProblem, DpError> {
    let (a2, b2) = (a.clone(), b.clone());
    let split = a.fun().dim();
    let res = a.res().product(b.res());
    let out_desc = res.clone();
    let label = format!("({} ⊗ {})", a.label(), b.label());
    Ok(DesignProblem::new(label, a.fun().product(b.fun()), res, move |f| {
        let (fa, fb) = f.split_at(split);
        let ra = a2.eval(&fa)?;
        let mut out = Antichain::empty(out_desc.clone());
        if ra.is_empty() {
            return Ok(out);
        }
        let rb = b2.eval(&fb)?;
        for p in ra.points() {
            for q in rb.points() {
                out.insert_unchecked(p.concat(q));
            }
        }
        Ok(out)
    }))
}

fn same_interface(op: &'static str, a: &DesignProblem, b: &DesignProblem) -> Result<(), DpError> {
    if !a.fun().compatible(b.fun()) {
        return Err(mismatch(op, a.fun(), b.fun()));
    }
    if !a.res().compatible(b.res()) {
        return Err(mismatch(op, a.res(), b.res()));
    }
    Ok(())
}

/// Free choice between `a` and `b`.
pub fn union(a: &DesignProblem, b: &DesignProblem) -> Result<DesignProblem, DpError> {
    same_interface("union", a, b)?;
    let (a2, b2) = (a.clone(), b.clone());
    let label = format!("({} ∨ {})", a.label(), b.label());
    Ok(DesignProblem::new(label, a.fun().clone(), a.res().clone(), move |f| {
        Ok(a2.eval(f)?.union(&b2.eval(f)?)?)
    }))
}

/// Both `a` and `b` must be satisfied.
pub fn intersection(a: &DesignProblem, b: &DesignProblem) -> Result<DesignProblem, DpError> {
    same_interface("intersection", a, b)?;
    let (a2, b2) = (a.clone(), b.clone());
    let label = format!("({} ∧ {})", a.label(), b.label());
    Ok(DesignProblem::new(label, a.fun().clone(), a.res().clone(), move |f| {
        let ra = a2.eval(f)?;
        if ra.is_empty() {
            return Ok(ra);
        }
        Ok(ra.intersection(&b2.eval(f)?)?)
    }))
}
