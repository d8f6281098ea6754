use birthday_core::bounds::{
    bound_report, hardcore_certificate, leech_gap_hp, sphere24_certificate, square_certificate,
    BoundModel, Certificate,
};
use birthday_core::geometry::{convert_params, Given, Metric, ModelParams};
use birthday_core::graphs::{
    conjecture2_compare_tables, count_by_size, CountTable, ExactCheck, GraphSpec, Mode,
    RegularGraph,
};
use birthday_core::samplers::{
    estimate_prob_empty, exact_prob_empty, repulsion_gap, sample_ek, Backend, Estimate,
    EstimateMethod, SamplerOptions, CONFIDENCE_RADIUS,
};
use num_traits::Zero;
use serde_json::{json, Value};

use crate::emit::{
    fmt_f64, fmt_opt, int, num, rational, rational_f64, rational_string, to_json, Table,
};
use crate::{CliError, Command, Manifest, Outcome, Status};

const DEFAULT_REPLICAS: usize = 10_000;
const DEFAULT_POINTS: usize = 100;
const DEFAULT_T: f64 = 0.79;

pub fn execute(command: Command, m: &Manifest) -> Result<Outcome, CliError> {
    match command {
        Command::Params => params(m),
        Command::Simulate => simulate(m),
        Command::Enumerate => enumerate(m),
        Command::Check => check(m),
        Command::Bounds => bounds(m),
        Command::Certify => certify(m),
    }
}

fn model_params(m: &Manifest, command: Command) -> Result<ModelParams, CliError> {
    let n = Manifest::require(m.n, "n", command)?;
    let d = Manifest::require(m.d, "d", command)?;
    let metric =
        Manifest::parse_field::<Metric>(m.metric.as_deref(), "metric")?.unwrap_or(Metric::L2);
    let given = match (m.r, m.p, m.alpha) {
        (Some(r), None, None) => Given::Radius(r),
        (None, Some(p), None) => Given::Collision(p),
        (None, None, Some(a)) => Given::Density(a),
        (None, None, None) => {
            return Err(CliError::field(
                "r",
                format!("`{command}` needs one of r, p, alpha"),
            ))
        }
        _ => return Err(CliError::field("r", "give only one of r, p, alpha")),
    };
    Ok(convert_params(n, d, metric, given)?)
}

fn params_cells(p: &ModelParams) -> Vec<String> {
    vec![
        p.n.to_string(),
        p.d.to_string(),
        p.metric.to_string(),
        fmt_f64(p.r),
        fmt_f64(p.p),
        fmt_f64(p.alpha),
    ]
}

const PARAM_COLUMNS: [&str; 6] = ["n", "d", "metric", "r", "p", "alpha"];

fn with_params(head: &[&str], tail: &[&str]) -> Table {
    let cols: Vec<&str> = head
        .iter()
        .chain(PARAM_COLUMNS.iter())
        .chain(tail.iter())
        .copied()
        .collect();
    Table::new(&cols)
}

fn params(m: &Manifest) -> Result<Outcome, CliError> {
    let p = model_params(m, Command::Params)?;
    let mut table = with_params(&["operation"], &[]);
    let mut row = vec!["params".to_string()];
    row.extend(params_cells(&p));
    table.push(row);
    Ok(Outcome::ok(to_json(&p), table))
}

fn model_name(p: &ModelParams) -> &'static str {
    match p.metric {
        Metric::L2 => "hard-sphere",
        Metric::Linf => "hard-square",
    }
}

fn estimate_json(p: &ModelParams, e: &Estimate) -> Value {
    json!({
        "model": model_name(p),
        "params": to_json(p),
        "method": e.method.to_string(),
        "backend": e.backend.map(|b| b.to_string()),
        "mean": num(e.mean),
        "stderr": num(e.stderr),
        "samples": e.samples,
        "seed": int(&e.seed),
    })
}

fn sampler_options(m: &Manifest) -> Result<SamplerOptions, CliError> {
    let mut opts = SamplerOptions::default();
    if let Some(b) = Manifest::parse_field::<Backend>(m.backend.as_deref(), "backend")? {
        opts.backend = b;
    }
    if let Some(probes) = m.probes {
        opts.probes = probes;
    }
    Ok(opts)
}

fn simulate(m: &Manifest) -> Result<Outcome, CliError> {
    let p = model_params(m, Command::Simulate)?;
    let seed = m.seed();
    let replicas = m.replicas.unwrap_or(DEFAULT_REPLICAS);
    let opts = sampler_options(m)?;

    if m.sample {
        let k = m.k.unwrap_or(p.n);
        let (config, backend) = sample_ek(&p, k, seed, &opts)?;
        let header: Vec<String> = (1..=p.d).map(|i| format!("x_{i}")).collect();
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut table = Table::new(&header);
        let mut points = Vec::new();
        for x in config.points() {
            table.push(x.iter().map(|&c| fmt_f64(c)).collect());
            points.push(Value::Array(x.iter().map(|&c| num(c)).collect()));
        }
        let results = json!({
            "operation": "sample",
            "model": model_name(&p),
            "params": to_json(&p),
            "k": k,
            "backend": backend.to_string(),
            "points": points,
        });
        return Ok(Outcome::ok(results, table));
    }

    if let Some(k) = m.k {
        let g = repulsion_gap(k, &p, replicas, seed, &opts)?;
        let holds = g.holds();
        let results = json!({
            "operation": "repulsion-gap",
            "k": k,
            "conditional": estimate_json(&p, &g.conditional),
            "unconditional": num(g.unconditional),
            "gap": num(g.gap.mean),
            "gap_stderr": num(g.gap.stderr),
            "sphere_est_rhs": g.sphere_est_rhs.map(num),
            "confidence_radius": num(CONFIDENCE_RADIUS),
            "holds": holds,
        });
        let mut table = with_params(
            &["operation"],
            &[
                "k",
                "backend",
                "replicas",
                "seed",
                "conditional",
                "stderr",
                "unconditional",
                "gap",
                "sphere_est_rhs",
                "holds",
            ],
        );
        let mut row = vec!["repulsion-gap".to_string()];
        row.extend(params_cells(&p));
        row.extend([
            k.to_string(),
            g.conditional
                .backend
                .map(|b| b.to_string())
                .unwrap_or_default(),
            replicas.to_string(),
            seed.to_string(),
            fmt_f64(g.conditional.mean),
            fmt_f64(g.conditional.stderr),
            fmt_f64(g.unconditional),
            fmt_f64(g.gap.mean),
            fmt_opt(g.sphere_est_rhs),
            holds.to_string(),
        ]);
        table.push(row);
        return Ok(Outcome::new(results, table, Status::from_holds(holds)));
    }

    let method = Manifest::parse_field::<EstimateMethod>(m.method.as_deref(), "method")?
        .unwrap_or(EstimateMethod::Telescoping);
    let e = estimate_prob_empty(&p, replicas, seed, method, &opts)?;
    let exact = exact_prob_empty(&p);
    let pairs = (p.n * p.n.saturating_sub(1) / 2) as f64;
    let birthday_rhs = (pairs * (-p.p).ln_1p()).exp();
    let holds = e.mean - CONFIDENCE_RADIUS * e.stderr <= birthday_rhs;
    let results = json!({
        "operation": "prob-empty",
        "estimate": estimate_json(&p, &e),
        "exact": exact.map(num),
        "birthday_rhs": num(birthday_rhs),
        "confidence_radius": num(CONFIDENCE_RADIUS),
        "holds": holds,
    });
    let mut table = with_params(
        &["operation"],
        &[
            "method",
            "backend",
            "replicas",
            "seed",
            "mean",
            "stderr",
            "samples",
            "exact",
            "birthday_rhs",
            "holds",
        ],
    );
    let mut row = vec!["prob-empty".to_string()];
    row.extend(params_cells(&p));
    row.extend([
        e.method.to_string(),
        e.backend.map(|b| b.to_string()).unwrap_or_default(),
        replicas.to_string(),
        seed.to_string(),
        fmt_f64(e.mean),
        fmt_f64(e.stderr),
        e.samples.to_string(),
        fmt_opt(exact),
        fmt_f64(birthday_rhs),
        holds.to_string(),
    ]);
    table.push(row);
    Ok(Outcome::new(results, table, Status::from_holds(holds)))
}

fn graph(m: &Manifest, command: Command) -> Result<RegularGraph, CliError> {
    match (&m.graph, &m.edge_list) {
        (Some(_), Some(_)) => Err(CliError::field(
            "graph",
            "give only one of graph, edge_list",
        )),
        (Some(spec), None) => {
            let spec: GraphSpec = spec
                .parse()
                .map_err(|e: birthday_core::Error| CliError::field("graph", e))?;
            Ok(spec.build()?)
        }
        (None, Some(path)) => Ok(RegularGraph::from_edge_list_file(path)?),
        (None, None) => Err(CliError::field(
            "graph",
            format!("`{command}` needs graph or edge_list"),
        )),
    }
}

fn mode(m: &Manifest) -> Result<Mode, CliError> {
    Ok(Manifest::parse_field::<Mode>(m.mode.as_deref(), "mode")?.unwrap_or(Mode::IndependentSets))
}

fn enumerate(m: &Manifest) -> Result<Outcome, CliError> {
    let g = graph(m, Command::Enumerate)?;
    let mode = mode(m)?;
    let t = count_by_size(&g, mode)?;
    let mut table = Table::new(&[
        "operation",
        "graph",
        "mode",
        "k",
        "count",
        "coverage_sum",
        "conditional_coverage",
        "conditional_coverage_decimal",
    ]);
    let mut rows = Vec::new();
    for k in 0..=t.max_size() {
        let cov = t.conditional_coverage(k).ok();
        rows.push(json!({
            "k": k,
            "count": int(&t.count(k)),
            "coverage_sum": int(&t.coverage_sum(k)),
            "conditional_coverage": cov.as_ref().map(rational),
        }));
        table.push(vec![
            "enumerate".into(),
            g.label().to_string(),
            mode.to_string(),
            k.to_string(),
            t.count(k).to_string(),
            t.coverage_sum(k).to_string(),
            cov.as_ref().map(rational_string).unwrap_or_default(),
            cov.as_ref()
                .map(|q| fmt_f64(rational_f64(q)))
                .unwrap_or_default(),
        ]);
    }
    let results = json!({
        "operation": "enumerate",
        "graph": g.label(),
        "n": g.n(),
        "d": g.degree(),
        "mode": mode.to_string(),
        "universe": t.universe(),
        "p": rational(&t.p()),
        "total": int(&t.total()),
        "sizes": rows,
    });
    Ok(Outcome::ok(results, table))
}

const CHECK_COLUMNS: [&str; 11] = [
    "operation",
    "graph",
    "mode",
    "check",
    "k",
    "count",
    "lhs",
    "lhs_decimal",
    "rhs",
    "rhs_decimal",
    "holds",
];

struct CheckRow {
    check: String,
    k: usize,
    count: String,
    lhs: num_rational::BigRational,
    rhs: num_rational::BigRational,
    holds: bool,
    slack: f64,
}

impl CheckRow {
    fn exact(c: &ExactCheck, t: &CountTable) -> Self {
        CheckRow {
            check: c.kind.to_string(),
            k: c.k,
            count: t.count(c.k).to_string(),
            lhs: c.lhs.clone(),
            rhs: c.rhs.clone(),
            holds: c.holds,
            slack: c.slack,
        }
    }

    fn json(&self) -> Value {
        json!({
            "check": self.check,
            "k": self.k,
            "count": int(&self.count),
            "lhs": rational(&self.lhs),
            "rhs": rational(&self.rhs),
            "holds": self.holds,
            "slack": num(self.slack),
        })
    }
}

fn check(m: &Manifest) -> Result<Outcome, CliError> {
    let g = graph(m, Command::Check)?;
    let mode = mode(m)?;
    let t = count_by_size(&g, mode)?;
    let ks: Vec<usize> = if m.all_k {
        (0..=t.max_size()).collect()
    } else {
        vec![Manifest::require(m.k, "k", Command::Check)?]
    };

    let mut rows = Vec::new();
    for &k in &ks {
        rows.push(CheckRow::exact(&t.birthday_check(k), &t));
        if k == 0 || t.count(k).is_zero() {
            continue;
        }
        rows.push(CheckRow::exact(&t.repulsion_check(k)?, &t));
        if mode == Mode::IndependentSets {
            match t.bipest_check(k) {
                Ok(c) => rows.push(CheckRow::exact(&c, &t)),
                Err(birthday_core::Error::Inapplicable { .. }) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }

    if m.conjecture {
        if mode != Mode::IndependentSets {
            return Err(CliError::field(
                "mode",
                "the comparison graph is defined for independent sets",
            ));
        }
        let (n, d) = (g.n(), g.degree());
        if d == 0 || n % (2 * d) != 0 {
            return Err(birthday_core::Error::NoExtremalGraph { two_d: 2 * d, n }.into());
        }
        let h = RegularGraph::disjoint_kdd(d, n / (2 * d))?;
        let th = count_by_size(&h, Mode::IndependentSets)?;
        for &k in &ks {
            if k == 0 || t.count(k).is_zero() || th.count(k).is_zero() {
                continue;
            }
            let c = conjecture2_compare_tables(&t, &th, k)?;
            let slack = rational_f64(&(&c.value_g - &c.value_h));
            rows.push(CheckRow {
                check: "conjecture".into(),
                k,
                count: t.count(k).to_string(),
                lhs: c.value_g,
                rhs: c.value_h,
                holds: c.consistent,
                slack,
            });
        }
    }

    let mut table = Table::new(&CHECK_COLUMNS);
    for r in &rows {
        table.push(vec![
            "check".into(),
            g.label().to_string(),
            mode.to_string(),
            r.check.clone(),
            r.k.to_string(),
            r.count.clone(),
            rational_string(&r.lhs),
            fmt_f64(rational_f64(&r.lhs)),
            rational_string(&r.rhs),
            fmt_f64(rational_f64(&r.rhs)),
            r.holds.to_string(),
        ]);
    }
    let all_hold = rows.iter().all(|r| r.holds);
    let results = json!({
        "operation": "check",
        "graph": g.label(),
        "n": g.n(),
        "d": g.degree(),
        "mode": mode.to_string(),
        "p": rational(&t.p()),
        "checks": rows.iter().map(CheckRow::json).collect::<Vec<_>>(),
        "all_hold": all_hold,
    });
    Ok(Outcome::new(results, table, Status::from_holds(all_hold)))
}

fn bound_model(m: &Manifest, command: Command) -> Result<(BoundModel, bool), CliError> {
    let name = m
        .model
        .as_deref()
        .ok_or_else(|| CliError::field("model", format!("required by `{command}`")))?;
    let model = name
        .parse::<BoundModel>()
        .map_err(|e: birthday_core::Error| CliError::field("model", e))?;
    Ok((model, name == "sphere24"))
}

fn bounds(m: &Manifest) -> Result<Outcome, CliError> {
    let (model, leech) = bound_model(m, Command::Bounds)?;
    let d = if leech {
        m.d.unwrap_or(24)
    } else {
        Manifest::require(m.d, "d", Command::Bounds)?
    };
    let points = m.points.unwrap_or(DEFAULT_POINTS);
    let report = bound_report(model, d, m.rho, points)?;
    let mut table = Table::new(&[
        "operation",
        "model",
        "d",
        "rho",
        "alpha",
        "birthday",
        "comparison",
        "gap",
    ]);
    for pt in &report.points {
        table.push(vec![
            "bounds".into(),
            model.to_string(),
            d.to_string(),
            fmt_opt(report.rho),
            fmt_f64(pt.alpha),
            fmt_f64(pt.birthday),
            fmt_f64(pt.comparison),
            fmt_f64(pt.gap),
        ]);
    }
    Ok(Outcome::ok(to_json(&report), table))
}

fn certify(m: &Manifest) -> Result<Outcome, CliError> {
    let (model, _) = bound_model(m, Command::Certify)?;
    let mut extra = None;
    let cert: Certificate = match model {
        BoundModel::Sphere => {
            if m.d.is_some_and(|d| d != 24) {
                return Err(CliError::field("d", "the sphere certificate is for d = 24"));
            }
            let t = m.t.unwrap_or(DEFAULT_T);
            extra = Some(leech_gap_hp(t)?);
            sphere24_certificate(t)?
        }
        BoundModel::Square => square_certificate(Manifest::require(m.d, "d", Command::Certify)?)?,
        BoundModel::Hardcore => hardcore_certificate(
            Manifest::require(m.d, "d", Command::Certify)?,
            m.points.unwrap_or(DEFAULT_POINTS),
        )?,
        BoundModel::Matching => {
            return Err(CliError::field(
                "model",
                "certify supports sphere24, square and hardcore",
            ))
        }
    };
    let mut results = to_json(&cert);
    if let (Some(v), Value::Object(o)) = (extra, &mut results) {
        o.insert("leech_gap_precise".into(), num(v));
    }
    let mut table = Table::new(&[
        "operation",
        "model",
        "d",
        "t",
        "alpha",
        "birthday",
        "comparison",
        "gap",
        "certified",
    ]);
    for w in &cert.witnesses {
        table.push(vec![
            "certify".into(),
            model.to_string(),
            cert.d.to_string(),
            fmt_opt(cert.t),
            fmt_f64(w.alpha),
            fmt_f64(w.birthday),
            fmt_f64(w.comparison),
            fmt_f64(w.birthday - w.comparison),
            cert.certified.to_string(),
        ]);
    }
    // a certified failure of the birthday bound is the violation being sought
    Ok(Outcome::new(
        results,
        table,
        Status::from_holds(!cert.certified),
    ))
}
