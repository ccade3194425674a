use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use localizer_lab::config::{write_sites_csv, GammaFile, LoadedModel, ModelSpec, RepChoice};
use localizer_lab::sampling::random_unit_vector;
use localizer_lab::spectrum::{
    component_count, ray_crossings, scan as run_scan, scan_streaming, spectral_flow, write_csv_header, write_csv_rows,
    RayResult, ScanGrid,
};
use localizer_lab::verify::{dense_memory_estimate, run_suite};
use localizer_lab::{build_rep, gamma5_explicit, CliffordRep, Localizer, LocalizerConfig, ProbePoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::manifest::{sha256_hex, ManifestBuilder};
use crate::{BuildArgs, ComponentsArgs, FlowArgs, GammaArgs, ModelArgs, ProbeArgs, RaysArgs, ScanArgs, VerifyArgs};

struct ModelInput {
    model: LoadedModel,
    hash: Option<String>,
}

fn load_model(source: &str) -> CliResult<ModelInput> {
    if source.starts_with("builtin:") {
        let spec = ModelSpec::builtin(source)?;
        let hash = sha256_hex(serde_json::to_string(&spec)?.as_bytes());
        return Ok(ModelInput { model: spec.build()?, hash: Some(hash) });
    }
    let bytes = std::fs::read(source).map_err(|e| CliError::user(format!("cannot read model '{source}': {e}")))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::user(format!("model '{source}' is not UTF-8")))?;
    Ok(ModelInput { model: LoadedModel::from_json(&text)?, hash: Some(sha256_hex(&bytes)) })
}

fn parse_vector(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::user(format!("cannot parse {what} component '{}'", x.trim())))
        })
        .collect()
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::user(format!("cannot create '{}': {e}", path.display())))
}

fn emit_json(value: &impl Serialize, out: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::user(format!("cannot write '{}': {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

struct Prepared {
    input: ModelInput,
    rep: CliffordRep,
    config: LocalizerConfig,
}

impl Prepared {
    fn new(args: &ModelArgs) -> CliResult<Self> {
        let input = load_model(&args.model)?;
        let choice: RepChoice = args.rep.parse()?;
        let rep = input.model.rep(choice)?;
        let mut config = LocalizerConfig::default();
        if let Some(t) = args.dense_threshold {
            config.dense_threshold = t;
        }
        Ok(Self { input, rep, config })
    }

    fn localizer(&self) -> CliResult<Localizer<'_>> {
        Ok(Localizer::with_config(&self.input.model.tuple, &self.rep, self.config.clone())?)
    }

    fn lambda(&self, coords: Vec<f64>, physical: bool) -> CliResult<ProbePoint> {
        if physical {
            if self.input.model.kappas.is_none() {
                return Err(CliError::user("--physical needs a lattice model"));
            }
            Ok(self.input.model.lambda_from_physical(&coords)?)
        } else {
            let p = ProbePoint::new(coords);
            p.check_dim(self.input.model.d())?;
            Ok(p)
        }
    }
}

pub fn gamma(args: &GammaArgs) -> CliResult<()> {
    let rep = if args.explicit_5 {
        if args.d != 5 {
            return Err(CliError::user("--explicit-5 requires --d 5"));
        }
        gamma5_explicit()
    } else {
        build_rep(args.d)?
    };
    let manifest = ManifestBuilder::new("gamma", args);
    emit_json(&GammaFile::from_rep(&rep), args.out.as_deref())?;
    if let Some(out) = &args.out {
        manifest.write(&[out])?;
    }
    Ok(())
}

pub fn build(args: &BuildArgs) -> CliResult<()> {
    let input = load_model(&args.config)?;
    let manifest = ManifestBuilder::new("build", args).config_hash(input.hash.clone());
    emit_json(&input.model.to_sparse_file(), Some(&args.out))?;
    let mut outputs: Vec<PathBuf> = vec![args.out.clone()];
    if let Some(lattice) = &input.model.lattice {
        let path = args.sites.clone().unwrap_or_else(|| {
            let mut s = args.out.as_os_str().to_owned();
            s.push(".sites.csv");
            PathBuf::from(s)
        });
        let mut w = create(&path)?;
        write_sites_csv(&mut w, lattice.sites())?;
        w.flush()?;
        outputs.push(path);
    } else if args.sites.is_some() {
        return Err(CliError::user("--sites applies to lattice models only"));
    }
    let refs: Vec<&Path> = outputs.iter().map(|p| p.as_path()).collect();
    manifest.write(&refs)?;
    Ok(())
}

pub fn probe(args: &ProbeArgs) -> CliResult<()> {
    let prep = Prepared::new(&args.model)?;
    let lambda = prep.lambda(parse_vector(&args.lambda, "lambda")?, args.model.physical)?;
    let report = prep.localizer()?.report(&lambda, args.k)?;
    emit_json(&report, None)
}

pub fn scan(args: &ScanArgs) -> CliResult<()> {
    let prep = Prepared::new(&args.model)?;
    let d = prep.input.model.d();
    let mut grid = ScanGrid::parse(d, &args.grid, &args.fixed)?;
    if args.model.physical {
        let kappas = prep
            .input
            .model
            .kappas
            .clone()
            .ok_or_else(|| CliError::user("--physical needs a lattice model"))?;
        for axis in &mut grid.axes {
            axis.min *= kappas[axis.index];
            axis.max *= kappas[axis.index];
        }
        for (v, k) in grid.fixed.iter_mut().zip(&kappas) {
            *v *= k;
        }
    }
    let loc = prep.localizer()?;
    let manifest = ManifestBuilder::new("scan", args).config_hash(prep.input.hash.clone());
    let energy_last = prep.input.model.energy_last();
    let mut w = create(&args.out)?;
    write_csv_header(&mut w, d, energy_last)?;
    let failures = if grid.axes.len() >= 3 {
        scan_streaming(&loc, &grid, args.index, None, |points| {
            write_csv_rows(&mut w, points).map_err(|e| localizer_lab::Error::InvalidArgument(format!("i/o: {e}")))
        })?
    } else {
        let result = run_scan(&loc, &grid, args.index, None)?;
        write_csv_rows(&mut w, &result.points())?;
        for (p, msg) in &result.failures {
            eprintln!("point {p}: {msg}");
        }
        result.failures.len()
    };
    w.flush()?;
    manifest.write(&[&args.out])?;
    if failures > 0 {
        eprintln!("{failures} of {} points failed (gap written as NaN)", grid.len());
    }
    Ok(())
}

#[derive(Serialize)]
struct ComponentsOutput {
    count: usize,
    sizes: Vec<usize>,
    eps: f64,
    radius: f64,
    zero_points: usize,
    failed_points: usize,
    varying_columns: Vec<String>,
}

pub fn components(args: &ComponentsArgs) -> CliResult<()> {
    let mut reader = csv::Reader::from_path(&args.input)
        .map_err(|e| CliError::user(format!("cannot read '{}': {e}", args.input.display())))?;
    let headers = reader.headers()?.clone();
    let gap_col = headers
        .iter()
        .position(|h| h == "gap")
        .ok_or_else(|| CliError::user("scan CSV has no 'gap' column"))?;
    let mut coords: Vec<Vec<f64>> = Vec::new();
    let mut gaps = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| CliError::user(format!("row {}: cannot parse '{s}'", line + 2)))
        };
        let row = (0..gap_col).map(|j| parse(&record[j])).collect::<CliResult<Vec<_>>>()?;
        gaps.push(parse(&record[gap_col])?);
        coords.push(row);
    }
    // Varying columns and their spacing are inferred from the distinct values.
    let mut varying = Vec::new();
    let mut step: f64 = 0.0;
    for j in 0..gap_col {
        let values: BTreeSet<u64> = coords.iter().map(|r| r[j].to_bits()).collect();
        if values.len() < 2 {
            continue;
        }
        let mut sorted: Vec<f64> = values.into_iter().map(f64::from_bits).collect();
        sorted.sort_by(f64::total_cmp);
        let h = sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        step = step.max(h);
        varying.push(j);
    }
    if varying.is_empty() {
        return Err(CliError::user("scan CSV has no varying coordinate"));
    }
    let eps = args.eps.unwrap_or(1.5 * step);
    let radius = args.radius.unwrap_or(2.0 * step * (varying.len() as f64).sqrt());
    if !(eps > 0.0) || !(radius > 0.0) {
        return Err(CliError::user("eps and radius must be positive"));
    }
    let points: Vec<Vec<f64>> = coords
        .iter()
        .zip(&gaps)
        .filter(|(_, g)| **g <= eps)
        .map(|(r, _)| varying.iter().map(|&j| r[j]).collect())
        .collect();
    let comps = component_count(&points, radius)?;
    emit_json(
        &ComponentsOutput {
            count: comps.count,
            sizes: comps.sizes,
            eps,
            radius,
            zero_points: points.len(),
            failed_points: gaps.iter().filter(|g| g.is_nan()).count(),
            varying_columns: varying.iter().map(|&j| headers[j].to_string()).collect(),
        },
        None,
    )
}

#[derive(Serialize)]
struct RaysOutput {
    t_max: f64,
    step: f64,
    eps: f64,
    origin: Vec<f64>,
    crossings: Vec<usize>,
    rays: Vec<RayResult>,
}

pub fn rays(args: &RaysArgs) -> CliResult<()> {
    let prep = Prepared::new(&args.model)?;
    let d = prep.input.model.d();
    let axes: Vec<usize> = match &args.axes {
        Some(s) => s
            .split(',')
            .map(|a| {
                a.trim()
                    .parse::<usize>()
                    .ok()
                    .filter(|&j| (1..=d).contains(&j))
                    .map(|j| j - 1)
                    .ok_or_else(|| CliError::user(format!("bad axis '{}' (expected 1..{d})", a.trim())))
            })
            .collect::<CliResult<_>>()?,
        None if prep.input.model.energy_last() => (0..d - 1).collect(),
        None => (0..d).collect(),
    };
    if axes.is_empty() {
        return Err(CliError::user("no ray axes"));
    }
    let origin = match &args.origin {
        Some(s) => prep.lambda(parse_vector(s, "origin")?, args.model.physical)?,
        None => ProbePoint::origin(d),
    };
    let t_max = args.t_max.unwrap_or_else(|| prep.input.model.tuple.norms().iter().sum::<f64>());
    let step = args.step.unwrap_or(t_max / 400.0);
    let eps = args.eps.unwrap_or(1.5 * step);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let directions: Vec<Vec<f64>> = (0..args.n)
        .map(|_| {
            let u = random_unit_vector(axes.len(), &mut rng);
            let mut dir = vec![0.0; d];
            for (&a, v) in axes.iter().zip(u) {
                dir[a] = v;
            }
            dir
        })
        .collect();
    let loc = prep.localizer()?;
    let manifest = ManifestBuilder::new("rays", args).seed(args.seed).config_hash(prep.input.hash.clone());
    let rays = directions
        .par_iter()
        .map(|dir| ray_crossings(&loc, &origin, dir, t_max, step, eps))
        .collect::<Result<Vec<_>, _>>()?;
    let out = RaysOutput {
        t_max,
        step,
        eps,
        origin: origin.coords().to_vec(),
        crossings: rays.iter().map(|r| r.crossings).collect(),
        rays,
    };
    emit_json(&out, args.out.as_deref())?;
    if let Some(p) = &args.out {
        manifest.write(&[p])?;
    }
    Ok(())
}

pub fn verify(args: &VerifyArgs) -> CliResult<()> {
    if args.d_max < 2 {
        return Err(CliError::user("--d-max must be at least 2"));
    }
    if args.d_max > 11 {
        let bytes = dense_memory_estimate(args.d_max);
        eprintln!(
            "d = {} needs about {:.1} MiB per dense localizer",
            args.d_max,
            bytes as f64 / (1024.0 * 1024.0)
        );
        if !args.allow_large {
            return Err(CliError::user("--d-max above 11 requires --allow-large"));
        }
    }
    let manifest = ManifestBuilder::new("verify", args).seed(args.seed);
    let reports = run_suite(args.d_max, args.seed)?;
    for r in &reports {
        let d = r.d.map_or(String::new(), |d| format!(" d={d}"));
        println!("{} {}{} ({:.2}s)", if r.pass { "PASS" } else { "FAIL" }, r.theorem, d, r.seconds);
        for c in r.checks.iter().filter(|c| !c.pass) {
            println!("    {}: measured {:e}, expected {:e}", c.id, c.measured, c.expected);
        }
    }
    if let Some(path) = &args.json {
        emit_json(&reports, Some(path))?;
        manifest.write(&[path])?;
    }
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(CliError::Numerical("some checks failed".into()))
    }
}

pub fn flow(args: &FlowArgs) -> CliResult<()> {
    let prep = Prepared::new(&args.model)?;
    let start = prep.lambda(parse_vector(&args.from, "from")?, args.model.physical)?;
    let end = prep.lambda(parse_vector(&args.to, "to")?, args.model.physical)?;
    let loc = prep.localizer()?;
    let k = args.k.min(loc.dim());
    let manifest = ManifestBuilder::new("flow", args).config_hash(prep.input.hash.clone());
    let steps = spectral_flow(&loc, &start, &end, args.steps, k, None)?;
    let d = prep.input.model.d();
    let energy_last = prep.input.model.energy_last();
    let mut w = create(&args.out)?;
    let names: Vec<String> = (0..d).map(|j| localizer_lab::spectrum::axis_name(j, d, energy_last)).collect();
    let eig_names: Vec<String> = (1..=k).map(|i| format!("e{i}")).collect();
    writeln!(w, "t,{},{}", names.join(","), eig_names.join(","))?;
    let mut failures = 0;
    for s in &steps {
        write!(w, "{}", s.t)?;
        for v in &s.lambda {
            write!(w, ",{v}")?;
        }
        if let Some(e) = &s.error {
            failures += 1;
            eprintln!("t = {}: {e}", s.t);
            for _ in 0..k {
                write!(w, ",NaN")?;
            }
        } else {
            for v in &s.eigs {
                write!(w, ",{v}")?;
            }
        }
        writeln!(w)?;
    }
    w.flush()?;
    manifest.write(&[&args.out])?;
    if failures > 0 {
        eprintln!("{failures} of {} steps failed", steps.len());
    }
    Ok(())
}
