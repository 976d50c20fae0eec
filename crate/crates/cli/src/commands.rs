use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use pfcme::decomposition::SamplerState;
use pfcme::nilt::{catalog, invert, lookup, pole_residue, RationalTransform, TransformFunction};
use pfcme::{verify_all, PfCme64, PfCmeError};

use crate::args::{BoundsArgs, Cli, DensityArgs, Format, InvertArgs, SampleArgs};
use crate::output::{Cell, Table};

/// Failure classes with distinct exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    BoundFailure(Vec<usize>),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 3,
            CliError::BoundFailure(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "usage error: {s}"),
            CliError::Numeric(s) => write!(f, "numeric error: {s}"),
            CliError::BoundFailure(ms) => write!(f, "bound verification failed for m = {ms:?}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<PfCmeError> for CliError {
    fn from(e: PfCmeError) -> Self {
        match e {
            PfCmeError::Domain(s) => CliError::Usage(s),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub struct Ctx<'a> {
    pub cli: &'a Cli,
}

impl Ctx<'_> {
    fn check_m(&self, m: usize) -> CliResult<()> {
        if m < 3 {
            return Err(CliError::Usage(format!("m must be at least 3, got {m}")));
        }
        if m > self.cli.max_m && !self.cli.allow_large_m {
            return Err(CliError::Usage(format!(
                "m = {m} exceeds the guardrail {}; pass --allow-large-m to proceed",
                self.cli.max_m
            )));
        }
        Ok(())
    }

    fn check_list(&self, ms: &[usize]) -> CliResult<()> {
        if ms.is_empty() {
            return Err(CliError::Usage("empty m list".into()));
        }
        ms.iter().try_for_each(|&m| self.check_m(m))
    }

    fn build(&self, m: usize) -> CliResult<PfCme64> {
        self.check_m(m)?;
        let start = Instant::now();
        let d = PfCme64::new(m)?;
        self.log(format_args!("built m={m} in {:.3}s", start.elapsed().as_secs_f64()));
        Ok(d)
    }

    fn log(&self, msg: std::fmt::Arguments<'_>) {
        if self.cli.verbose {
            eprintln!("pfcme: {msg}");
        }
    }

    fn build_all(&self, ms: &[usize]) -> CliResult<Vec<PfCme64>> {
        self.check_list(ms)?;
        // collect keeps input order
        ms.par_iter().map(|&m| self.build(m)).collect()
    }
}

fn real(v: f64) -> Cell {
    Cell::Real(v)
}

fn int(v: usize) -> Cell {
    Cell::Int(v as u64)
}

pub fn table(ctx: &Ctx, ms: &[usize], out: &mut impl Write) -> CliResult<()> {
    let dists = ctx.build_all(ms)?;
    let mut t = Table::new(
        "table",
        vec!["m", "r", "n", "scv", "scv_times_n", "m2_over_log_m_scv", "n2_over_log3_n_scv"],
    );
    t.meta("m", ms);
    for d in &dists {
        let p = d.params();
        let g = d.diagnostics();
        t.rows.push(vec![
            int(p.m),
            int(p.r as usize),
            int(p.order),
            real(d.scv()),
            real(g.scv_times_n),
            real(g.m2_over_logm_scv),
            real(g.n2_over_log3n_scv),
        ]);
    }
    t.write(out, ctx.cli.format)?;
    Ok(())
}

pub fn moments(ctx: &Ctx, ms: &[usize], out: &mut impl Write) -> CliResult<()> {
    let dists = ctx.build_all(ms)?;
    let mut t = Table::new(
        "moments",
        vec!["m", "m0", "m1", "m2", "norm", "mean", "second_moment", "variance", "scv"],
    );
    t.meta("m", ms);
    for d in &dists {
        let s = d.moments();
        t.rows.push(vec![
            int(d.params().m),
            real(s.m0),
            real(s.m1),
            real(s.m2),
            real(d.norm()),
            real(s.mean),
            real(s.second_moment),
            real(s.variance),
            real(s.scv),
        ]);
    }
    t.write(out, ctx.cli.format)?;
    Ok(())
}

/// Grid size for `start..=stop` by `step`; the slack absorbs representation
/// error in the quotient so that an exact multiple includes `stop`.
pub fn grid_len(start: f64, stop: f64, step: f64) -> usize {
    ((stop - start) / step + 1e-9).floor() as usize + 1
}

const MAX_ROWS: usize = 100_000_000;

pub fn density(ctx: &Ctx, a: &DensityArgs, out: &mut impl Write) -> CliResult<()> {
    let DensityArgs { m, start, stop, step } = *a;
    if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
        return Err(CliError::Usage("range bounds must be finite".into()));
    }
    if step <= 0.0 {
        return Err(CliError::Usage(format!("step must be positive, got {step}")));
    }
    if start < 0.0 {
        return Err(CliError::Usage(format!("density is defined for t >= 0, got start {start}")));
    }
    if stop < start {
        return Err(CliError::Usage(format!("stop {stop} is below start {start}")));
    }
    let rows = grid_len(start, stop, step);
    if rows > MAX_ROWS {
        return Err(CliError::Usage(format!("{rows} grid points exceed the limit {MAX_ROWS}")));
    }
    let d = ctx.build(m)?;
    let mut t = Table::new("density", vec!["t", "density"]);
    t.meta("params", d.params());
    t.meta("range", json!({"start": start, "stop": stop, "step": step}));
    t.rows.reserve(rows);
    for i in 0..rows {
        let x = start + i as f64 * step;
        t.rows.push(vec![real(x), real(d.density(x)?)]);
    }
    t.write(out, ctx.cli.format)?;
    Ok(())
}

pub fn sample(ctx: &Ctx, a: &SampleArgs, out: &mut impl Write) -> CliResult<()> {
    if a.count == 0 {
        return Err(CliError::Usage("count must be at least 1".into()));
    }
    let d = ctx.build(a.m)?;
    let mut state = SamplerState::new(a.seed);
    let start = Instant::now();
    let xs = pfcme::sample(&d, &mut state, a.count)?;
    ctx.log(format_args!("{} draws in {:.3}s", a.count, start.elapsed().as_secs_f64()));
    let mut t = Table::new("sample", vec!["x"]);
    t.meta("params", d.params());
    t.meta("seed", a.seed);
    t.meta("generator", SamplerState::GENERATOR);
    t.meta("count", a.count);
    t.rows = xs.into_iter().map(|x| vec![real(x)]).collect();
    t.write(out, ctx.cli.format)?;
    Ok(())
}

fn resolve_transform(a: &InvertArgs) -> CliResult<(String, TransformFunction<f64>)> {
    if let Some(text) = &a.rational {
        let r: RationalTransform<f64> = text
            .parse()
            .map_err(|e: PfCmeError| CliError::Usage(format!("bad rational transform {text:?}: {e}")))?;
        return Ok((format!("rational({r})"), r.into_transform()));
    }
    let name = a.transform.as_deref().unwrap_or_default();
    match lookup::<f64>(name) {
        Some(f) => Ok((name.to_string(), f)),
        None => {
            let names: Vec<String> = catalog::<f64>()
                .into_iter()
                .map(|f| format!("  {:<6} {}", f.name, f.description))
                .collect();
            Err(CliError::Usage(format!(
                "unknown transform {name:?}; available:\n{}",
                names.join("\n")
            )))
        }
    }
}

pub fn invert_cmd(ctx: &Ctx, a: &InvertArgs, out: &mut impl Write) -> CliResult<()> {
    let (label, f) = resolve_transform(a)?;
    if let Some(&bad) = a.t.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(CliError::Usage(format!("evaluation points must be positive, got {bad}")));
    }
    if let Some(rel) = a.truncate {
        if !(0.0..1.0).contains(&rel) {
            return Err(CliError::Usage(format!("truncation must lie in [0, 1), got {rel}")));
        }
    }
    let d = ctx.build(a.m)?;
    let mut form = pole_residue(&d);
    if let Some(rel) = a.truncate {
        form = form.truncated(rel);
    }
    let mut t = Table::new("invert", vec!["T", "value", "known_inverse", "abs_error"]);
    t.meta("params", d.params());
    t.meta("transform", &label);
    t.meta("terms", form.nodes.len());
    for &x in &a.t {
        let v = invert(&form, &f, x)?;
        let (known, err) = match f.known_inverse(x) {
            Some(k) => (real(k), real((v - k).abs())),
            None => (Cell::Empty, Cell::Empty),
        };
        t.rows.push(vec![real(x), real(v), known, err]);
    }
    t.write(out, ctx.cli.format)?;
    Ok(())
}

pub fn verify_bounds(ctx: &Ctx, a: &BoundsArgs, out: &mut impl Write) -> CliResult<()> {
    let ms = &a.list.m;
    if ms.is_empty() {
        return Err(CliError::Usage("empty m list".into()));
    }
    if let Some(&m) = ms.iter().find(|&&m| m < 3) {
        return Err(CliError::Usage(format!("m must be at least 3, got {m}")));
    }
    if !(a.a1 > 0.0 && a.a1 < a.a2 && a.a2.is_finite()) {
        return Err(CliError::Usage(format!("need 0 < a1 < a2, got a1 = {}, a2 = {}", a.a1, a.a2)));
    }
    if a.grid_points == 0 {
        return Err(CliError::Usage("grid needs at least one point".into()));
    }
    if ctx.cli.format == Format::Csv {
        ctx.log(format_args!("bound reports are always JSON"));
    }
    let reports: Vec<_> = ms.par_iter().map(|&m| verify_all::<f64>(m, a.a1, a.a2, a.grid_points)).collect();
    let failed: Vec<usize> = reports
        .iter()
        .filter(|r| !r.ok() && !r.below_recommended_range)
        .map(|r| r.m)
        .collect();
    for r in reports.iter().filter(|r| r.below_recommended_range) {
        eprintln!("pfcme: m = {} is below the recommended range; failures there are not fatal", r.m);
    }
    let doc = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": "verify-bounds",
        "a1": a.a1,
        "a2": a.a2,
        "grid_points": a.grid_points,
        "ok": failed.is_empty(),
        "reports": reports,
    });
    serde_json::to_writer_pretty(&mut *out, &doc).map_err(std::io::Error::from)?;
    writeln!(out)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::BoundFailure(failed))
    }
}
