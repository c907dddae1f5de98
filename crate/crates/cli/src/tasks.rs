//! Task bodies. Each turns a resolved job into records, violations and side files.

use std::collections::BTreeMap;

use cyclic_bench::algebra::{AlgebraElement, Chain, SeminormKind};
use cyclic_bench::analysis::{
    boundedness_check, cocycle_defect, growth_fit, BoundedOp, EtaParams, GrowthOptions,
};
use cyclic_bench::complexes::{
    build_truncated, connes_b, cyclic_tau, hochschild_b, split_preservation_check, Convention,
    Variant,
};
use cyclic_bench::groups::Group;
use cyclic_bench::pairing::{
    b_annihilation_check, cyclic_cocycle_for, homogeneous_factoring_check, verify_pairing_bound,
    BoundConstant, Verdict,
};
use cyclic_bench::sample::{
    random_algebra_element, random_homogeneous_chain, random_nonzero_chain, ChainShape,
};
use cyclic_bench::scalar::{parse_rational, Scalar};
use cyclic_bench::Error;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{
    parse_seminorm, BoundParams, ChainInput, ConstantMode, GrowthParams, HomologyParams,
    IdentityParams, JobConfig, NormsParams, PairingParams, RandomChains, SeminormParams,
    TaskParams,
};

/// What a task produced.
#[derive(Clone, Debug, Default, PartialEq, Serialize, serde::Deserialize)]
pub struct TaskOutput {
    pub records: Value,
    pub violations: Vec<Value>,
    /// Extra files written next to the records, by name.
    pub files: BTreeMap<String, String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("records serialize")
}

/// `{degree, terms: [[coeff, [g₀, …]]]}`.
pub fn chain_json(group: &Group, x: &Chain) -> Value {
    let terms: Vec<Value> = x
        .terms()
        .map(|(t, c)| json!([c.to_string(), group.format_tuple(t)]))
        .collect();
    json!({ "degree": x.degree(), "terms": terms })
}

pub fn element_json(group: &Group, x: &AlgebraElement) -> Value {
    let terms: Vec<Value> = x
        .terms()
        .map(|(g, c)| json!([c.to_string(), group.format_element(g)]))
        .collect();
    json!({ "terms": terms })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rationals(values: &[String]) -> Result<Vec<BigRational>, Error> {
    values.iter().map(|v| parse_rational(v)).collect()
}

/// Listed chains followed by seeded random ones, each with an id.
fn gather_chains(
    group: &Group,
    listed: &[ChainInput],
    random: Option<&RandomChains>,
    seed: u64,
) -> Result<Vec<(String, Chain)>, Error> {
    let mut out = Vec::new();
    for (i, c) in listed.iter().enumerate() {
        let x = c
            .build(group)
            .map_err(|e| Error::InvalidParameter(format!("chains[{i}]: {e}")))?;
        out.push((c.id.clone().unwrap_or_else(|| format!("chain{i}")), x));
    }
    if let Some(r) = random {
        let mut rng = rng(seed);
        let mut shape = ChainShape::new(r.degree, r.terms, r.max_length);
        shape.gaussian = r.gaussian;
        for i in 0..r.count {
            let x = if r.homogeneous {
                random_homogeneous_chain(group, &mut rng, &shape)
            } else {
                random_nonzero_chain(group, &mut rng, &shape)
            };
            out.push((format!("random{i}"), x));
        }
    }
    Ok(out)
}

pub fn run(job: &JobConfig, group: &Group) -> Result<TaskOutput, Error> {
    match &job.params {
        TaskParams::Homology(p) => homology(job, group, p),
        TaskParams::Growth(p) => growth(job, group, p),
        TaskParams::Seminorm(p) => seminorm(job, group, p),
        TaskParams::Pairing(p) => pairing(job, group, p),
        TaskParams::Bound(p) => bound(job, group, p),
        TaskParams::Norms(p) => norms(job, group, p),
        TaskParams::IdentitySuite(p) => identity_suite(job, group, p),
    }
}

fn homology(job: &JobConfig, group: &Group, p: &HomologyParams) -> Result<TaskOutput, Error> {
    let variant: Variant = p.variant.parse()?;
    let top = p.degrees.iter().copied().max().unwrap_or(0);
    let n_max = p.n_max.unwrap_or(top + 1);
    let cx = build_truncated(group, n_max, p.radius, variant, job.convention, job.cap)?;
    let mut out = TaskOutput::default();
    let mut results = Vec::new();
    for &d in &p.degrees {
        match cx.homology(d) {
            Ok(h) => results.push(to_value(&h)),
            Err(Error::NotAComplex(why)) => {
                out.violations
                    .push(json!({ "check": "complex", "degree": d, "detail": why }));
            }
            Err(e) => return Err(e),
        }
    }
    if p.export {
        for d in 0..=n_max {
            if cx.dim(d) > 0 {
                out.files.insert(
                    format!("basis_{d}.txt"),
                    cx.export_basis(d).join("\n") + "\n",
                );
            }
            if let Some(m) = cx.export_matrix(d) {
                out.files.insert(format!("matrix_{d}.txt"), m.to_text());
            }
        }
    }
    out.records = json!({
        "group": group.label(),
        "variant": variant.to_string(),
        "R": p.radius,
        "n_max": n_max,
        "dims": (0..=n_max).map(|d| cx.dim(d)).collect::<Vec<_>>(),
        "is_complex": cx.is_complex(),
        "descends": cx.descends(),
        "homology": results,
    });
    Ok(out)
}

fn growth(job: &JobConfig, group: &Group, p: &GrowthParams) -> Result<TaskOutput, Error> {
    let phi = p.cochain.build(group)?;
    let mut opts = GrowthOptions {
        cap: job.cap,
        ..GrowthOptions::default()
    };
    if let Some(l) = &p.lambdas {
        opts.lambdas = rationals(l)?;
    }
    if let Some(r) = &p.radii {
        opts.radii = r.clone();
    }
    let report = growth_fit(group, &phi, &opts)?;
    let mut out = TaskOutput::default();
    if let Some(b) = phi.declared_bound() {
        let declared = cyclic_bench::scalar::Magnitude::exact(b.constant.clone());
        for row in report.rows.iter().filter(|r| r.lambda == b.lambda) {
            if row.constant.certain_le(&declared) != Some(true) {
                out.violations.push(json!({
                    "check": "declared-bound",
                    "lambda": row.lambda.to_string(),
                    "R": row.radius,
                    "fitted": row.constant,
                    "declared": b.constant.to_string(),
                }));
            }
        }
    }
    out.files.insert("growth.csv".into(), report.to_csv());
    out.records = to_value(&report);
    Ok(out)
}

fn seminorm(job: &JobConfig, group: &Group, p: &SeminormParams) -> Result<TaskOutput, Error> {
    let chains = gather_chains(group, &p.chains, p.random.as_ref(), job.seed)?;
    let mut by_degree: BTreeMap<usize, Vec<Chain>> = BTreeMap::new();
    for (_, x) in chains.into_iter().filter(|(_, x)| !x.is_zero()) {
        by_degree.entry(x.degree()).or_default().push(x);
    }
    let mut out = TaskOutput::default();
    let mut reports = Vec::new();
    for &op in &p.ops {
        for n in rationals(&p.n)? {
            for &m in &p.m {
                for lambda in rationals(&p.lambda)? {
                    let params = EtaParams::new(n.clone(), m, lambda)?;
                    for samples in by_degree.values() {
                        if op == BoundedOp::Hochschild && samples[0].degree() == 0 {
                            continue;
                        }
                        let rep = boundedness_check(group, op, &params, samples, job.convention)?;
                        if !rep.finite {
                            out.violations
                                .push(json!({ "check": "finite", "report": rep }));
                        }
                        reports.push(to_value(&rep));
                    }
                }
            }
        }
    }
    out.records = json!({ "group": group.label(), "reports": reports });
    Ok(out)
}

fn pairing(job: &JobConfig, group: &Group, p: &PairingParams) -> Result<TaskOutput, Error> {
    let c = p.cochain.build(group)?;
    let n = c.arity();
    let tc = cyclic_cocycle_for(group, &c, job.convention, p.scan_radius, job.cap)?;
    let defect = cocycle_defect(group, &c, p.scan_radius, job.cap)?;
    let mut out = TaskOutput::default();

    // homogeneous support on the exhaustive scan
    let mut support_checked = 0usize;
    for (t, _) in group.tuples_within(n + 1, p.scan_radius, job.cap)? {
        if !group.is_identity(&group.product(&t)) {
            support_checked += 1;
            let v = tc.evaluate(&t)?;
            if !v.is_zero() {
                out.violations.push(
                    json!({ "check": "support", "tuple": group.format_tuple(&t), "value": v }),
                );
            }
        }
    }

    let chains = gather_chains(group, &p.chains, p.random.as_ref(), job.seed)?;
    let mut pairings = Vec::new();
    for (id, x) in &chains {
        if x.degree() != n {
            return Err(Error::DegreeMismatch {
                expected: n,
                found: x.degree(),
            });
        }
        let f = homogeneous_factoring_check(group, &tc, x)?;
        if !f.equal {
            out.violations
                .push(json!({ "check": "factoring", "chain": id, "report": f }));
        }
        pairings.push(json!({ "chain": id, "value": f.full, "homogeneous": f.homogeneous }));
    }

    let mut r = rng(job.seed ^ 0x9e37_79b9_7f4a_7c15);
    let shape = ChainShape::new(n + 1, 4, 2);
    let ys: Vec<Chain> = (0..p.annihilation_samples)
        .map(|_| random_homogeneous_chain(group, &mut r, &shape))
        .collect();
    let annihilation = b_annihilation_check(group, &tc, &ys)?;
    // a defect is only a violation when the input is a cocycle on the scan
    if defect.is_none() && !annihilation.passed() {
        out.violations
            .push(json!({ "check": "b-annihilation", "report": annihilation }));
    }

    out.records = json!({
        "group": group.label(),
        "cochain": c.name(),
        "degree": n,
        "scan_radius": p.scan_radius,
        "cocycle": defect.as_ref().map_or(json!({ "status": "no-defect-on-scan" }), |(t, v)| {
            json!({ "status": "defect", "tuple": group.format_tuple(t), "value": v })
        }),
        "extension": { "name": tc.name(), "construction": tc.construction(), "cyclicity": tc.cyclicity() },
        "support_checked": support_checked,
        "pairings": pairings,
        "annihilation": annihilation,
    });
    Ok(out)
}

fn bound(job: &JobConfig, group: &Group, p: &BoundParams) -> Result<TaskOutput, Error> {
    let c = p.cochain.build(group)?;
    let chains = gather_chains(group, &p.chains, p.random.as_ref(), job.seed)?;
    let mut out = TaskOutput::default();
    let mut certs = Vec::new();
    for (id, x) in &chains {
        let cover = p.cover_radius.unwrap_or_else(|| x.max_total_length(group));
        let constant = match p.constant {
            ConstantMode::Fit => BoundConstant::Fit {
                cover_radius: cover,
            },
            ConstantMode::Declared => BoundConstant::Declared {
                cover_radius: cover,
            },
        };
        for n in rationals(&p.n)? {
            for &m in &p.m {
                for lambda in rationals(&p.lambda)? {
                    let params = EtaParams::new(n.clone(), m, lambda)?;
                    let cert = verify_pairing_bound(group, &c, x, id, &params, &constant, job.cap)?;
                    if cert.verdict != Verdict::Pass {
                        out.violations
                            .push(json!({ "check": "bound", "certificate": cert }));
                    }
                    certs.push(to_value(&cert));
                }
            }
        }
    }
    out.records = json!({ "group": group.label(), "certificates": certs });
    Ok(out)
}

/// `2x` plus fresh terms: coefficientwise at least as large as `x`.
fn dominating(
    group: &Group,
    x: &AlgebraElement,
    rng: &mut ChaCha8Rng,
    max_length: u64,
) -> AlgebraElement {
    let extra = random_algebra_element(group, rng, 2, max_length, false);
    let fresh = AlgebraElement::from_terms(
        extra
            .terms()
            .filter(|(g, _)| x.coefficient(g).is_zero())
            .map(|(g, c)| (g.clone(), c.clone())),
    );
    x.scaled(&Scalar::from_int(2)).plus(&fresh)
}

fn norms(job: &JobConfig, group: &Group, p: &NormsParams) -> Result<TaskOutput, Error> {
    let mut elements = Vec::new();
    for (i, e) in p.elements.iter().enumerate() {
        let x = e
            .build(group)
            .map_err(|err| Error::InvalidParameter(format!("elements[{i}]: {err}")))?;
        elements.push((e.id.clone().unwrap_or_else(|| format!("element{i}")), x));
    }
    let mut r = rng(job.seed);
    let max_length = p.random.as_ref().map_or(2, |s| s.max_length);
    if let Some(s) = &p.random {
        for i in 0..s.count {
            elements.push((
                format!("random{i}"),
                random_algebra_element(group, &mut r, s.terms, s.max_length, s.gaussian),
            ));
        }
    }
    let kinds: Vec<SeminormKind> = p
        .seminorms
        .iter()
        .map(|s| parse_seminorm(s, p.resolution).map_err(Error::InvalidParameter))
        .collect::<Result<_, _>>()?;

    let mut out = TaskOutput::default();
    let mut csv = String::from("element,seminorm,value,lo,hi\n");
    let mut values = Vec::new();
    for (id, x) in &elements {
        let mut row = serde_json::Map::new();
        for k in &kinds {
            let v = k.evaluate(group, x)?;
            csv.push_str(&format!("{id},{},{},{},{}\n", k.name(), v, v.lo(), v.hi()));
            row.insert(k.name(), to_value(&v));
        }
        values.push(json!({ "element": id, "value": element_json(group, x), "norms": row }));
    }

    let mut checks = Vec::new();
    if p.unconditional {
        let pairs: Vec<(AlgebraElement, AlgebraElement)> = elements
            .iter()
            .map(|(_, x)| (x.clone(), dominating(group, x, &mut r, max_length)))
            .collect();
        for k in &kinds {
            let rep = cyclic_bench::algebra::check_unconditional(group, k, &pairs)?;
            // the reduced norm is the control case and is expected to fail
            let control = matches!(k, SeminormKind::Reduced { .. });
            if !control && !rep.passed() {
                out.violations
                    .push(json!({ "check": "unconditional", "report": rep }));
            }
            checks.push(json!({ "control": control, "report": rep }));
        }
    }
    out.files.insert("norms.csv".into(), csv);
    out.records = json!({ "group": group.label(), "values": values, "unconditional": checks });
    Ok(out)
}

#[derive(Default, Serialize)]
struct IdentityTally {
    checked: usize,
    violations: usize,
}

fn identity_suite(job: &JobConfig, group: &Group, p: &IdentityParams) -> Result<TaskOutput, Error> {
    let conv = job.convention;
    let mut r = rng(job.seed);
    let samples: Vec<Chain> = (0..p.samples)
        .map(|i| {
            random_nonzero_chain(
                group,
                &mut r,
                &ChainShape::new(i % (p.max_degree + 1), p.terms, p.max_length),
            )
        })
        .collect();
    let mut tally: BTreeMap<&'static str, IdentityTally> = BTreeMap::new();
    let mut out = TaskOutput::default();
    let mut record = |name: &'static str, i: usize, ok: bool, out: &mut TaskOutput| {
        let t = tally.entry(name).or_default();
        t.checked += 1;
        if !ok {
            t.violations += 1;
            out.violations.push(
                json!({ "check": name, "sample": i, "chain": chain_json(group, &samples[i]) }),
            );
        }
    };
    for (i, x) in samples.iter().enumerate() {
        let n = x.degree();
        let bx = if n > 0 {
            Some(hochschild_b(group, x)?)
        } else {
            None
        };
        let big_b = connes_b(group, x, conv);
        if let Some(bx) = &bx {
            if n >= 2 {
                record("bb", i, hochschild_b(group, bx)?.is_zero(), &mut out);
            }
        }
        record("BB", i, connes_b(group, &big_b, conv).is_zero(), &mut out);
        let anti = match &bx {
            Some(bx) => hochschild_b(group, &big_b)?.plus(&connes_b(group, bx, conv))?,
            None => hochschild_b(group, &big_b)?,
        };
        record("bB+Bb", i, anti.is_zero(), &mut out);

        let r = x.max_total_length(group);
        let closed = bx.as_ref().is_none_or(|y| y.max_total_length(group) <= r)
            && big_b.max_total_length(group) <= r
            && cyclic_tau(x, conv).max_total_length(group) <= r;
        record("filtration", i, closed, &mut out);

        let mut y = x.clone();
        for _ in 0..=n {
            y = cyclic_tau(&y, conv);
        }
        let sign = match conv {
            Convention::Standard => 1,
            Convention::Paper => conv.tau_sign(n).pow(n as u32 + 1),
        };
        record(
            "tau-order",
            i,
            y == x.scaled(&Scalar::from_int(sign)),
            &mut out,
        );
    }
    let split = split_preservation_check(group, &samples, conv)?;
    for v in &split.violations {
        out.violations
            .push(json!({ "check": "split", "violation": v }));
    }
    out.records = json!({
        "group": group.label(),
        "samples": samples.len(),
        "identities": tally,
        "split": { "checks": split.checks, "violations": split.violations.len() },
    });
    Ok(out)
}
