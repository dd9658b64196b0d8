use std::collections::BTreeSet;

use mono_spectrum::code::is_decreasing;
use mono_spectrum::enumerate::{self, count_disjoint_k_sum, count_nested_degree_drop, TupleMode};
use mono_spectrum::lta::{self, orbit_size_exponent};
use mono_spectrum::oracle::{classify_weight_class, full_weight_distribution};
use mono_spectrum::templates::factor_head_kernel;
use mono_spectrum::{dyadic_of, CodeSpec, DecreasingSet, Dyadic, DyadicWeight, Error, Monomial, Poly, ResidualFamily};
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};

use crate::caps::Caps;
use crate::input::{self, Labels};
use crate::output::{opt, Reply, Status};
use crate::CliError;

/// Settings shared by every command.
pub struct Ctx {
    pub caps: Caps,
    pub verify: bool,
    pub auto_close: bool,
    pub labels: Labels,
}

impl Ctx {
    fn code(&self, arg: &str) -> Result<DecreasingSet, CliError> {
        Ok(input::code_spec(arg)?.build(self.auto_close)?)
    }

    fn evaluable(&self, m: usize) -> bool {
        self.verify && m <= self.caps.eval_m
    }
}

#[derive(Serialize)]
struct WeightReport {
    poly: Poly,
    m: usize,
    head: Monomial,
    kernel: Poly,
    r: u32,
    sigma: Dyadic,
    dyadic: DyadicWeight,
    dyadic_terms: String,
    formula_weight: String,
    evaluated_weight: Option<String>,
    matches: Option<bool>,
}

pub fn weight(ctx: &Ctx, text: &str, m: usize) -> Result<Reply, CliError> {
    let p = ctx.labels.poly(text, m)?;
    let evaluated = if ctx.evaluable(m) { Some(p.weight()?) } else { None };
    let (head, kernel, fam) = if p.is_zero() {
        (Monomial::ONE, p.clone(), None)
    } else {
        let (h, q) = factor_head_kernel(&p)?;
        let fam = ResidualFamily::from_kernel(h, &q);
        (h, q, Some(fam))
    };
    let (formula, sigma, dyadic, r) = match &fam {
        Some(f) => (f.general_weight(m)?, f.sigma()?, f.dyadic_weight()?, f.r()),
        None => (BigUint::from(0u8), Dyadic::zero(), DyadicWeight::from_parts(BigUint::from(0u8), 0), 0),
    };
    let matches = evaluated.map(|e| BigUint::from(e) == formula);
    let report = WeightReport {
        poly: p,
        m,
        head,
        kernel,
        r,
        sigma,
        dyadic_terms: dyadic.to_string(),
        dyadic,
        formula_weight: formula.to_string(),
        evaluated_weight: evaluated.map(|e| e.to_string()),
        matches,
    };
    let row = vec![
        report.poly.to_string(),
        m.to_string(),
        report.formula_weight.clone(),
        opt(&report.evaluated_weight),
        report.sigma.to_string(),
        report.dyadic_terms.clone(),
    ];
    let status = Status::from_ok(matches != Some(false));
    Ok(Reply::new(&report, vec!["poly", "m", "formula_weight", "evaluated_weight", "sigma", "dyadic"], vec![row])
        .with_status(status))
}

pub fn dyadic(ctx: &Ctx, poly: Option<&str>, m: Option<usize>, sigma: Option<&str>) -> Result<Reply, CliError> {
    let (value, d) = match (poly, sigma) {
        (Some(text), None) => {
            let m = m.ok_or_else(|| CliError::Usage("a polynomial needs --m".into()))?;
            let p = ctx.labels.poly(text, m)?;
            let (h, q) = factor_head_kernel(&p)?;
            let fam = ResidualFamily::from_kernel(h, &q);
            (fam.sigma()?, fam.dyadic_weight()?)
        }
        (None, Some(s)) => {
            let v: Dyadic = s.parse()?;
            let d = dyadic_of(&v)?;
            (v, d)
        }
        _ => return Err(CliError::Usage("give either a polynomial (with --m) or --sigma".into())),
    };
    let round_trip = d.reconstruct() == value;
    let rows = d.digits.iter().map(|&(j, b)| vec![j.to_string(), b.to_string()]).collect();
    let out = json!({
        "sigma": value,
        "dyadic": d,
        "terms": d.to_string(),
        "reduced": d.reduced(),
        "round_trip": round_trip,
    });
    Ok(Reply::new(&out, vec!["j", "b"], rows).with_status(Status::from_ok(round_trip)))
}

pub fn template(ctx: &Ctx, spec: &str) -> Result<Reply, CliError> {
    let t = input::template_spec(spec)?.build()?;
    let check = if ctx.evaluable(t.m) { t.check()? } else { None };
    let ok = check.as_ref().is_none_or(|c| c.matches);
    let row = vec![
        t.kind.name().to_string(),
        t.m.to_string(),
        t.r.to_string(),
        t.poly.to_string(),
        t.predicted_sigma.to_string(),
        t.predicted_weight.to_string(),
        check.as_ref().map(|c| c.evaluated.to_string()).unwrap_or_default(),
    ];
    let out = json!({ "instance": t, "check": check });
    Ok(Reply::new(
        &out,
        vec!["kind", "m", "r", "poly", "predicted_sigma", "predicted_weight", "evaluated_weight"],
        vec![row],
    )
    .with_status(Status::from_ok(ok)))
}

fn code_summary(code: &DecreasingSet) -> Value {
    json!({
        "m": code.m(),
        "dimension": code.dimension(),
        "r_plus": code.r_plus(),
        "d_min": code.d_min_log2().map(|e| (BigUint::from(1u8) << e).to_string()),
        "monomials": code.sorted_monomials(),
    })
}

pub fn code_validate(_ctx: &Ctx, arg: &str) -> Result<Reply, CliError> {
    let spec = input::code_spec(arg)?;
    let (m, set) = match &spec {
        CodeSpec::ReedMuller { .. } => {
            let code = spec.build(false)?;
            (code.m(), code.monomials().clone())
        }
        CodeSpec::Explicit { m, monomials } => {
            let set = monomials.iter().map(|s| s.parse()).collect::<Result<BTreeSet<Monomial>, _>>()?;
            (*m, set)
        }
    };
    let valid = is_decreasing(&set);
    let closed = DecreasingSet::closure(m, set.iter().copied())?;
    let missing: Vec<Monomial> = closed.sorted_monomials().into_iter().filter(|f| !set.contains(f)).collect();
    let mut out = code_summary(&closed);
    out["valid"] = json!(valid);
    out["missing"] = json!(missing);
    if !valid {
        out["dimension"] = json!(set.len());
        out["monomials"] = json!(set);
    }
    let row = vec![valid.to_string(), m.to_string(), set.len().to_string(), missing.len().to_string()];
    Ok(Reply::new(&out, vec!["valid", "m", "dimension", "missing"], vec![row]).with_status(Status::from_ok(valid)))
}

pub fn code_closure(_ctx: &Ctx, arg: &str) -> Result<Reply, CliError> {
    let code = input::code_spec(arg)?.build(true)?;
    let rows = code.sorted_monomials().iter().map(|f| vec![f.to_string(), f.degree().to_string()]).collect();
    Ok(Reply::new(&code_summary(&code), vec!["monomial", "degree"], rows))
}

pub fn code_matrix(ctx: &Ctx, arg: &str) -> Result<Reply, CliError> {
    let code = ctx.code(arg)?;
    if code.m() > ctx.caps.eval_m {
        return Err(Error::CapExceeded {
            what: "m",
            value: code.m() as u64,
            cap: ctx.caps.eval_m as u64,
            hint: "generator rows are full truth tables",
        }
        .into());
    }
    let g = code.generator_matrix()?;
    let rows: Vec<Vec<String>> = code
        .sorted_monomials()
        .iter()
        .zip(g.to_hex_rows())
        .map(|(f, hex)| vec![f.to_string(), hex])
        .collect();
    let out = json!({
        "m": code.m(),
        "ncols": g.ncols(),
        "rank": g.rank(),
        "rows": rows.iter().map(|r| json!({"monomial": r[0], "hex": r[1]})).collect::<Vec<_>>(),
    });
    Ok(Reply::new(&out, vec!["monomial", "hex"], rows).with_status(Status::from_ok(g.rank() == code.dimension())))
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum EnumTemplate {
    DisjointKSum,
    NestedDegreeDrop,
}

pub struct EnumArgs {
    pub template: EnumTemplate,
    pub r: Option<u32>,
    pub k: usize,
    pub ordered: bool,
}

pub fn enumerate(ctx: &Ctx, arg: &str, a: EnumArgs) -> Result<Reply, CliError> {
    let code = ctx.code(arg)?;
    if ctx.verify && code.dimension() > ctx.caps.dim {
        return Err(CliError::Usage(format!(
            "verification needs 2^{} codewords, above the dimension cap {}; pass --no-verify or raise --cap-dim",
            code.dimension(),
            ctx.caps.dim
        )));
    }
    let mut rep = match a.template {
        EnumTemplate::DisjointKSum => {
            let r = match a.r {
                Some(r) => r,
                None => code.r_plus().ok_or_else(|| CliError::Usage("empty code".into()))?,
            };
            let mode = if a.ordered { TupleMode::Ordered } else { TupleMode::Unordered };
            count_disjoint_k_sum(&code, r, a.k, mode)?
        }
        EnumTemplate::NestedDegreeDrop => count_nested_degree_drop(&code, ctx.caps.orbit_m)?,
    };
    if ctx.verify && !rep.incomplete {
        enumerate::verify(&mut rep, &code, ctx.caps.dim, ctx.caps.orbit_m)?;
    }
    let status = if rep.incomplete {
        Status::Incomplete
    } else {
        Status::from_ok(rep.verified.as_ref().is_none_or(|v| v.ok))
    };
    let rows = vec![vec![rep.weight.to_string(), rep.count.to_string()]];
    Ok(Reply::new(&rep, vec!["weight", "count"], rows).with_status(status))
}

pub fn spectrum(ctx: &Ctx, arg: &str, classify: Option<u64>) -> Result<Reply, CliError> {
    let code = ctx.code(arg)?;
    if let Some(w) = classify {
        let rep = classify_weight_class(&code, w, ctx.caps.dim, ctx.caps.orbit_m)?;
        let mut rows: Vec<Vec<String>> =
            rep.by_kind.iter().map(|(k, c)| vec![k.clone(), c.to_string()]).collect();
        rows.push(vec!["unexplained".into(), rep.unexplained.to_string()]);
        let mut out = serde_json::to_value(&rep).expect("report serializes");
        out["coverage"] = json!(rep.coverage_string());
        return Ok(Reply::new(&out, vec!["kind", "count"], rows));
    }
    let dist = full_weight_distribution(&code, ctx.caps.dim)?;
    let mut out = serde_json::to_value(&dist).expect("distribution serializes");
    let mut ok = true;
    // The minimum-weight enumerator must reproduce A_{d_min}; it needs
    // terms of degree at least 1.
    if ctx.verify && code.r_plus().is_some_and(|r| r >= 1) {
        let total_ok = dist.total() == 1u128 << code.dimension();
        let min = enumerate::minimum_weight_count(&code)?;
        let d_min: u64 = min.weight.clone().try_into().map_err(|_| CliError::Usage("weight beyond u64".into()))?;
        let agrees = min.count == BigUint::from(dist.count(d_min));
        ok = total_ok && agrees;
        out["checks"] = json!({
            "total_is_2^dimension": total_ok,
            "d_min": d_min.to_string(),
            "minimum_weight_formula": min.count.to_string(),
            "matches": agrees,
        });
    }
    let rows = dist.entries.iter().map(|(w, c)| vec![w.to_string(), c.to_string()]).collect();
    Ok(Reply::new(&out, vec!["weight", "count"], rows).with_status(Status::from_ok(ok)))
}

pub struct OrbitArgs<'a> {
    pub poly: &'a str,
    pub m: usize,
    pub fix_head: Option<&'a str>,
    pub elements: bool,
    pub master: bool,
}

pub fn orbit(ctx: &Ctx, a: OrbitArgs) -> Result<Reply, CliError> {
    let p = ctx.labels.poly(a.poly, a.m)?;
    let fix = a.fix_head.map(|h| ctx.labels.monomial(h, a.m)).transpose()?;
    if a.master {
        let (h, q) = match fix {
            Some(h) => {
                if !p.terms().all(|t| h.divides(t)) {
                    return Err(CliError::Usage(format!("{h} does not divide every term of {p}")));
                }
                (h, Poly::from_terms(a.m, p.terms().map(|t| t.without(h)))?)
            }
            None => factor_head_kernel(&p)?,
        };
        let rep = lta::master_orbit(h, &q, ctx.caps.orbit_m)?;
        let status = if rep.alpha.is_none() {
            Status::Incomplete
        } else {
            Status::from_ok(rep.matches_stabilizer_orbit())
        };
        let row = vec![
            h.to_string(),
            q.to_string(),
            opt(&rep.exponent),
            rep.stabilizer_orbit_size.to_string(),
            rep.full_orbit_size.to_string(),
        ];
        return Ok(Reply::new(&rep, vec!["head", "kernel", "exponent", "stabilizer_orbit", "full_orbit"], vec![row])
            .with_status(status));
    }
    let mut summary = lta::orbit(&p, fix, ctx.caps.orbit_m)?;
    if !a.elements {
        summary.elements = None;
    }
    // Single monomials under the full group have a closed form.
    let terms: Vec<Monomial> = p.terms().collect();
    let predicted = match (terms.as_slice(), fix) {
        (&[f], None) => Some(BigUint::from(1u8) << orbit_size_exponent(f)),
        _ => None,
    };
    let ok = predicted.as_ref().is_none_or(|n| *n == summary.size);
    let mut out = serde_json::to_value(&summary).expect("orbit serializes");
    out["predicted_size"] = json!(predicted.as_ref().map(ToString::to_string));
    let row = vec![p.to_string(), summary.size.to_string(), opt(&predicted)];
    Ok(Reply::new(&out, vec!["poly", "size", "predicted_size"], vec![row]).with_status(Status::from_ok(ok)))
}
