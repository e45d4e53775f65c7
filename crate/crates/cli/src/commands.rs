//! Subcommand implementations.

use crate::report::*;
use crate::*;
use anyhow::{bail, Context, Result};
use primedir::arith::sieve::load_or_build;
use primedir::arith::PrimeTable;
use primedir::directions::{self, construct_directions, DirectionSet, DirectionSpec};
use primedir::incidence::{self, ScanConfig, Variant};
use primedir::multiplier::{error_profile, write_error_csv, ErrorProfileConfig};
use primedir::operator::{
    self, delta_spread_value, maximal_op_with, DirectionSource, Evaluation, GridFunction, OperatorConfig, Preset,
    TestFamily,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

/// A bad flag combination or value, reported with exit status 3.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    match e.downcast_ref::<primedir::Error>() {
        Some(primedir::Error::InvalidArgument(_)) => EXIT_USAGE,
        Some(
            primedir::Error::Construction { .. } | primedir::Error::Format(_) | primedir::Error::Parse { .. },
        ) => EXIT_VALIDATION,
        _ => EXIT_RUNTIME,
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn table(cache: &Path, limit: u64) -> Result<Arc<PrimeTable>> {
    let (t, fresh) = load_or_build(cache, limit)?;
    if fresh {
        eprintln!("built prime table to {limit} in {}", cache.display());
    }
    Ok(Arc::new(t))
}

pub fn sieve(limit: u64, cache: &Path) -> Result<()> {
    let t = table(cache, limit)?;
    println!("{} primes up to {}", t.len(), t.limit());
    Ok(())
}

pub fn construct(a: &ConstructArgs) -> Result<()> {
    let mut spec = match a.mode {
        ModeArg::Toy => DirectionSpec::toy(a.n, a.eps, a.seed),
        ModeArg::Strict => DirectionSpec::strict(a.n, a.eps, a.m, a.seed),
    };
    spec.c0 = a.c0;
    if let Some(b) = a.window_base {
        spec.window_base = b;
    }
    spec.window_size = a.window_size;
    spec.kappa = a.kappa;
    spec.check()?;
    let ds = construct_directions(&spec)?;
    let report = directions::validate(&ds)?;
    let text = directions::serialize(&ds);
    std::fs::write(&a.out, &text).with_context(|| format!("writing {}", a.out.display()))?;
    let hash = directions::content_hash(&ds);
    let summary = ConstructFile {
        schema: CONSTRUCT_SCHEMA,
        status: "VALID",
        content_hash: &hash,
        rules: &report.rules,
        kappa: ds.kappa,
        a: ds.a.to_string(),
        a_tilde: ds.a_tilde.to_string(),
    };
    println!("VALID {hash}");
    eprintln!("{}", serde_json::to_string(&summary)?);
    Ok(())
}

pub fn validate(file: &Path) -> Result<()> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let ds = directions::deserialize(&text)?;
    let report = directions::validate(&ds)?;
    println!("VALID {}", directions::content_hash(&ds));
    eprintln!(
        "{} vectors, {} pairs, rules: {}",
        report.vectors,
        report.pairs_checked,
        report.rules.join(", ")
    );
    Ok(())
}

pub fn mult_error(a: &MultErrorArgs, cache: &Path) -> Result<()> {
    if a.arc_d <= 16.0 {
        return Err(usage(format!(
            "--arc-d {} is too small: the major-arc approximation needs D > 2^4 = 16",
            a.arc_d
        )));
    }
    if a.k.is_empty() || a.k.iter().any(|&k| k == 0 || k > 30) {
        return Err(usage("--k values must lie in 1..=30"));
    }
    if a.grid == 0 {
        return Err(usage("--grid must be positive"));
    }
    let kmax = *a.k.iter().max().unwrap();
    let t = table(cache, 1 << (kmax + 1))?;
    let mut cfg = ErrorProfileConfig::new(a.k.clone(), a.arc_d);
    cfg.grid_size = a.grid;
    cfg.fraction_level = a.fraction_level;
    let rows: Vec<_> = error_profile(&cfg, &t)?.into_iter().map(|(r, _)| r).collect();
    let mut buf = Vec::new();
    write_error_csv(&rows, &mut buf)?;
    write_output(a.out.as_deref(), &String::from_utf8(buf)?)
}

fn load_directions(src: &SourceArgs) -> Result<(DirectionSet, Option<Preset>)> {
    match (&src.directions, &src.profile) {
        (Some(p), _) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok((directions::deserialize(&text)?, None))
        }
        (None, name) => {
            let preset = Preset::by_name(name.as_deref().unwrap_or("desk-small"))?;
            Ok((construct_directions(&preset.spec())?, Some(preset)))
        }
    }
}

pub fn incidence(a: &IncidenceArgs) -> Result<()> {
    let (ds, _) = load_directions(&a.source)?;
    if a.s == 0 || a.s > 40 {
        return Err(usage("--s must lie in 1..=40"));
    }
    let c1 = a.c1.or(ds.spec.c1).unwrap_or_else(|| incidence::default_c1(&ds.a));
    let variant = match a.variant {
        VariantArg::K => Variant::K,
        VariantArg::Ktilde => Variant::Ktilde,
    };
    let n = ds.integer_vectors.len();
    let cfg = ScanConfig::default();

    let mut assignments = vec![vec![1u64 << a.s; n]];
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    for _ in 0..a.random_r {
        assignments.push((0..n).map(|_| rng.gen_range(1u64 << a.s..1u64 << (a.s + 1))).collect());
    }
    let mut best: Option<(incidence::OverlapReport, Vec<u64>)> = None;
    for rs in &assignments {
        let rep = incidence::scan_direction_set(&ds, variant, a.s, c1, rs, None, &cfg)?;
        if best.as_ref().is_none_or(|(b, _)| rep.max_overlap > b.max_overlap) {
            best = Some((rep, rs.clone()));
        }
    }
    let (rep, rs) = best.expect("at least one assignment");
    let replayed = if a.replay {
        let fams = incidence::families(&ds, a.s, c1, &rs)?;
        Some(incidence::replay_witness(&rep, &fams))
    } else {
        None
    };
    let baseline = match a.baseline {
        Some(BaselineArg::Parallel) => {
            let b = incidence::parallel_baseline(&ds, variant, a.s, c1, None, &cfg)?;
            let fams = vec![incidence::TubeFamily::new(ds.integer_vectors[0].clone(), 1 << a.s, a.s, c1)?; n];
            let replayed = a.replay.then(|| incidence::replay_witness(&b, &fams));
            Some(ScanRecord::new(&b, vec![1 << a.s; n], replayed))
        }
        None => None,
    };
    let file = OverlapFile {
        schema: OVERLAP_SCHEMA,
        directions_hash: directions::content_hash(&ds),
        variant,
        s: a.s,
        c1,
        families: n,
        assignments_scanned: assignments.len(),
        constructed: ScanRecord::new(&rep, rs, replayed),
        baseline,
    };
    eprintln!(
        "max overlap {}{}",
        file.constructed.max_overlap,
        file.baseline
            .as_ref()
            .map(|b| format!(" (baseline {})", b.max_overlap))
            .unwrap_or_default()
    );
    write_output(a.out.as_deref(), &(serde_json::to_string_pretty(&file)? + "\n"))?;
    if replayed == Some(false) {
        bail!("witness replay failed");
    }
    Ok(())
}

struct OperatorSetup {
    cfg: OperatorConfig,
    side: usize,
}

fn operator_setup(a: &OperatorArgs, cache: &Path, min_directions: usize) -> Result<OperatorSetup> {
    let (ds, preset) = match (&a.source.directions, &a.source.profile) {
        (None, name) if min_directions > 0 => {
            // Grow the preset's set so nested prefixes exist.
            let mut p = Preset::by_name(name.as_deref().unwrap_or("desk-small"))?;
            p.n = p.n.max(min_directions as u64);
            (construct_directions(&p.spec())?, Some(p))
        }
        _ => load_directions(&a.source)?,
    };
    let base = preset.unwrap_or_else(Preset::desk_small);
    let k_min = a.k_min.unwrap_or(base.k_min);
    let k_max = a.k_max.unwrap_or(base.k_max).max(k_min);
    let side = a.side.unwrap_or(base.side);
    if side < 2 || !side.is_power_of_two() {
        return Err(usage(format!("--side {side} must be a power of two")));
    }
    if k_max > 30 {
        return Err(usage("--k-max must be at most 30"));
    }
    let t = table(cache, 1 << (k_max + 1))?;
    let source = match a.vectors {
        SourceKind::Primitive => DirectionSource::Primitive,
        SourceKind::Rescaled => DirectionSource::Rescaled,
    };
    let cfg = OperatorConfig::from_direction_set(&ds, source, k_min, k_max, t)?;
    Ok(OperatorSetup { cfg, side })
}

pub fn apply(a: &ApplyArgs, cache: &Path) -> Result<()> {
    if a.input.is_none() && !a.delta {
        return Err(usage("give --input FILE or --delta"));
    }
    let mut setup = operator_setup(&a.op, cache, 0)?;
    let f = match &a.input {
        Some(p) => {
            let f = GridFunction::read(p)?;
            setup.side = f.side();
            f
        }
        None => GridFunction::delta(setup.side, 0, 0)?,
    };
    let eval = if a.spectral { Evaluation::Spectral } else { Evaluation::Spatial };
    let g = maximal_op_with(&f, &setup.cfg, eval)?;
    let (identity, err) = if a.delta {
        let v = delta_spread_value(&setup.cfg, setup.side)?;
        let err = v.map(|v| (g.norm_squared() - v).abs() / v);
        (v, err)
    } else {
        (None, None)
    };
    if let Some(p) = &a.out {
        g.write(p)?;
    }
    if let Some(p) = &a.csv {
        g.write_real_csv(p)?;
    }
    let file = ApplyFile {
        schema: APPLY_SCHEMA,
        side: setup.side,
        directions: setup.cfg.directions().len(),
        k_min: setup.cfg.k_min,
        k_max: setup.cfg.k_max,
        input: a
            .input
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "delta".into()),
        evaluation: if a.spectral { "spectral" } else { "spatial" },
        input_norm: f.norm(),
        output_norm: g.norm(),
        ratio: g.norm() / f.norm(),
        delta_identity: identity,
        delta_relative_error: err,
    };
    println!("{}", serde_json::to_string_pretty(&file)?);
    if a.delta && identity.is_none() {
        eprintln!("note: p v mod L collide on this grid; the point-mass identity does not apply");
    }
    Ok(())
}

pub fn norm_sweep(a: &NormSweepArgs, cache: &Path) -> Result<()> {
    let families = a
        .families
        .iter()
        .map(|s| TestFamily::parse(s))
        .collect::<primedir::Result<Vec<_>>>()?;
    let largest = *a.n_list.iter().max().ok_or_else(|| usage("--n-list is empty"))?;
    if a.n_list.contains(&0) {
        return Err(usage("--n-list entries must be positive"));
    }
    let setup = operator_setup(&a.op, cache, largest)?;
    let rows = operator::norm_sweep(&setup.cfg, &a.n_list, setup.side, &families, a.trials, a.seed)?;
    let mut out = String::from("n,family,max_ratio,argmax,delta_norm_squared\n");
    for r in &rows {
        out += &format!(
            "{},{},{:.12e},{},{:.12e}\n",
            r.n,
            r.family.name(),
            r.max_ratio,
            r.argmax,
            r.delta_norm_squared
        );
    }
    write_output(a.out.as_deref(), &out)
}
