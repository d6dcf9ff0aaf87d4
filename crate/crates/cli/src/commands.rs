use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use qclassical_core::observables::{half_decay_kt, mean_y_point};
use qclassical_core::presets::{bundled, Preset};
use qclassical_core::spectra::{discrepancy_note, BoxWell, Harmonic, Hydrogenoid, Morse, Quartic};
use qclassical_core::{
    criterion_point, distribution, energy, fidelity_audit, fidelity_overlap, period, purity,
    survival, threshold_scan, AuditVerdict, DiffusiveConfig, Error as CoreError, KtGrid,
    ModelParams, SeriesTolerance, UnitSystem, YMeanPoint, HALF_HBAR,
};
use rayon::prelude::*;

use crate::error::CliError;
use crate::output::{
    emit, fmt_f64, sidecar_path, write_file, write_sidecar, Cell, Format, Manifest, Table,
};
use crate::svg::{Plot, Series};
use crate::{BathArgs, Command, ModelArgs, ModelKind};

const SCAN_DEFAULT_MAX: u32 = 50;

pub fn run(cmd: Command) -> Result<ExitCode, CliError> {
    match cmd {
        Command::Criterion {
            model,
            n,
            format,
            out,
        } => criterion(&model, n, format, out.as_deref()),
        Command::Scan {
            model,
            n_min,
            n_max,
            format,
            out,
        } => scan(&model, n_min, n_max, format, out.as_deref()),
        Command::Evolve {
            bath,
            b,
            include_zero,
            n_max,
            format,
            out,
        } => evolve(&bath, b, include_zero, n_max, format, out.as_deref()),
        Command::Fidelity {
            bath,
            b,
            audit,
            format,
            out,
        } => fidelity(&bath, b, audit, format, out.as_deref()),
        Command::Ymean {
            bath,
            b,
            format,
            out,
        } => ymean(&bath, b, format, out.as_deref()),
        Command::Figures {
            which,
            out,
            grid,
            kappa,
            lambda,
            b,
            eps,
            format,
        } => {
            let tol = tolerance(eps)?;
            let figs: Vec<u8> = which.map_or_else(|| vec![1, 2, 3, 4], |w| vec![w]);
            fs::create_dir_all(&out).map_err(|e| CliError::io(&out, e))?;
            for fig in figs {
                let spec = FigureSpec {
                    which: fig,
                    grid,
                    kappa,
                    lambda,
                    b: b.clone(),
                    tol,
                };
                figure(&spec, &out, format)?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn tolerance(eps: Option<f64>) -> Result<SeriesTolerance, CliError> {
    let tol = SeriesTolerance::default();
    Ok(match eps {
        Some(e) => tol.with_rel_eps(e)?,
        None => tol,
    })
}

fn reject_table(format: Format) -> Result<(), CliError> {
    if format == Format::Table {
        return Err(CliError::Usage(
            "--format table is only available for criterion".into(),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Models

fn load_preset(name: &str) -> Result<Preset, CliError> {
    if bundled(name).is_some() {
        return Ok(Preset::load(name)?);
    }
    let path = Path::new(name);
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(text.parse()?)
}

fn require(v: Option<f64>, flag: &str, model: &str) -> Result<f64, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --model {model}")))
}

/// Model, its unit system, and the preset name if any.
fn resolve_model(args: &ModelArgs) -> Result<(ModelParams, UnitSystem, Option<String>), CliError> {
    if let Some(p) = &args.preset {
        let given = [
            args.mass,
            args.omega,
            args.width,
            args.charge,
            args.lambda,
            args.depth,
            args.alpha,
            args.zeta,
            args.ro,
        ];
        if given.iter().any(Option::is_some) || args.z.is_some() {
            return Err(CliError::Usage(
                "model flags cannot be combined with --preset".into(),
            ));
        }
        let preset = load_preset(p)?;
        let name = preset.name.clone().unwrap_or_else(|| p.clone());
        return Ok((preset.model, preset.units, Some(name)));
    }
    let kind = args.model.expect("clap enforces --model or --preset");
    let mass = args.mass.unwrap_or(1.0);
    let model = match kind {
        ModelKind::Harmonic => ModelParams::Harmonic(Harmonic {
            mass,
            omega: args.omega.unwrap_or(1.0),
        }),
        ModelKind::Box => ModelParams::Box(BoxWell {
            mass,
            width: args.width.unwrap_or(1.0),
        }),
        ModelKind::Hydrogenoid => ModelParams::Hydrogenoid(Hydrogenoid {
            reduced_mass: mass,
            z: args.z.unwrap_or(1),
            charge: args.charge.unwrap_or(1.0),
        }),
        ModelKind::Morse => ModelParams::Morse(Morse {
            depth: require(args.depth, "depth", "morse")?,
            alpha: require(args.alpha, "alpha", "morse")?,
            anharmonicity: require(args.zeta, "zeta", "morse")?,
            mass,
            ro: args.ro.unwrap_or(1.0),
            omega: require(args.omega, "omega", "morse")?,
        }),
        ModelKind::Quartic => ModelParams::Quartic(Quartic {
            omega: args.omega.unwrap_or(1.0),
            lambda: args.lambda.unwrap_or(1.0),
        }),
    };
    model.validate()?;
    Ok((model, UnitSystem::Natural, None))
}

fn model_manifest(
    command: &str,
    model: &ModelParams,
    units: UnitSystem,
    preset: &Option<String>,
) -> Manifest {
    let mut m = Manifest::new(command, SeriesTolerance::default());
    if let Some(p) = preset {
        m = m.param("preset", p);
    }
    m = m.param("units", units);
    // serde_json maps are key-sorted, which keeps the order stable.
    if let serde_json::Value::Object(fields) =
        serde_json::to_value(model).expect("model serializes")
    {
        for (k, v) in fields {
            let v = match v {
                serde_json::Value::String(s) => s,
                serde_json::Value::Number(n) => n.as_f64().map_or_else(|| n.to_string(), fmt_f64),
                other => other.to_string(),
            };
            m = m.param(&k, v);
        }
    }
    m.unit("energy", units.energy_unit())
        .unit("period", units.time_unit())
        .unit("delta_e", units.energy_unit())
        .unit("delta_tau", units.time_unit())
        .unit("y", "hbar")
}

const CRITERION_COLUMNS: [&str; 8] = [
    "n",
    "energy",
    "period",
    "delta_e",
    "delta_tau",
    "y",
    "resolvable",
    "verdict",
];

fn criterion_row(p: &qclassical_core::CriterionPoint) -> Vec<Cell> {
    vec![
        p.n.into(),
        p.energy.into(),
        p.period.into(),
        p.delta_e.into(),
        p.delta_tau.into(),
        p.y.into(),
        Cell::Text(p.resolvable.to_string()),
        p.verdict().as_str().into(),
    ]
}

fn criterion(
    args: &ModelArgs,
    n: u32,
    format: Format,
    out: Option<&Path>,
) -> Result<ExitCode, CliError> {
    let (model, units, preset) = resolve_model(args)?;
    let manifest = model_manifest("criterion", &model, units, &preset).param("n", n);
    let mut table = Table::new(manifest, &CRITERION_COLUMNS);
    match criterion_point(&model, n) {
        Ok(p) => {
            table.push(criterion_row(&p));
            emit(&table, format, out)?;
            Ok(ExitCode::SUCCESS)
        }
        Err(err @ CoreError::DegeneratePeriod { .. }) => {
            // Still show the level, with the verdict that explains why there
            // is no criterion value.
            let e = energy(&model, n)?;
            let tau = period(&model, n)?;
            let blank = if n > model.min_level() {
                let gap = 0.5 * (e - energy(&model, n - 1)?);
                Cell::Num(gap)
            } else {
                Cell::Num(f64::NAN)
            };
            table.push(vec![
                n.into(),
                e.into(),
                tau.into(),
                blank,
                0.0.into(),
                0.0.into(),
                "false".into(),
                "period-blind".into(),
            ]);
            table.notes.push(err.to_string());
            emit(&table, format, out)?;
            Err(err.into())
        }
        Err(e) => Err(e.into()),
    }
}

fn scan(
    args: &ModelArgs,
    n_min: Option<u32>,
    n_max: Option<u32>,
    format: Format,
    out: Option<&Path>,
) -> Result<ExitCode, CliError> {
    reject_table(format)?;
    let (model, units, preset) = resolve_model(args)?;
    let n_min = n_min.unwrap_or(model.min_level() + 1);
    let n_max = match (n_max, model.max_level()) {
        (Some(n), _) => n,
        (None, Some(top)) => top,
        (None, None) => SCAN_DEFAULT_MAX.max(n_min),
    };
    let result = threshold_scan(&model, n_min, n_max)?;
    let manifest = model_manifest("scan", &model, units, &preset)
        .param("n_min", n_min)
        .param("n_max", n_max);
    let mut table = Table::new(manifest, &CRITERION_COLUMNS);
    for p in &result.points {
        table.push(criterion_row(p));
    }
    let unresolvable = result.points.iter().filter(|p| !p.resolvable).count();
    table.footer.push((
        "first_unresolvable".into(),
        result
            .first_unresolvable
            .map_or("none".into(), |n| n.to_string()),
    ));
    table.footer.push((
        "crossings".into(),
        result
            .crossings
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join(";"),
    ));
    table.footer.push((
        "unresolvable_rows".into(),
        format!("{unresolvable}/{}", result.points.len()),
    ));
    if let Some(note) = discrepancy_note(&model, &result) {
        table.notes.push(note);
    }
    emit(&table, format, out)?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// Diffusive evolution

fn bath_config(args: &BathArgs, b: usize) -> Result<DiffusiveConfig, CliError> {
    Ok(
        DiffusiveConfig::new(b, args.kappa, args.omega, args.lambda)?
            .with_tolerance(tolerance(args.eps)?)?,
    )
}

fn bath_manifest(command: &str, cfg: &DiffusiveConfig, grid: &KtGrid) -> Manifest {
    Manifest::new(command, cfg.tol)
        .param("b", cfg.b)
        .param("kappa", fmt_f64(cfg.kappa))
        .param("omega", fmt_f64(cfg.omega))
        .param("lambda", fmt_f64(cfg.lambda))
        .param("grid", grid)
        .unit("kt", "dimensionless")
        .unit("t", "1/kappa")
        .unit("energy", "hbar*omega-units")
        .unit("probability", "1")
}

fn evolve(
    args: &BathArgs,
    b: usize,
    include_zero: bool,
    n_max: Option<usize>,
    format: Format,
    out: Option<&Path>,
) -> Result<ExitCode, CliError> {
    reject_table(format)?;
    let cfg = bath_config(args, b)?;
    let mut kts = args.grid.values();
    if include_zero {
        kts.insert(0, 0.0);
    }
    let snapshots = kts
        .par_iter()
        .map(|&kt| distribution(&cfg, cfg.time_at(kt)).map(|d| (kt, d)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut manifest =
        bath_manifest("evolve", &cfg, &args.grid).param("include_zero", include_zero);
    if let Some(n) = n_max {
        manifest = manifest.param("n_max", n);
    }
    let mut table = Table::new(
        manifest,
        &[
            "kt",
            "t",
            "n",
            "probability",
            "trace",
            "tail_bound",
            "n_cut",
        ],
    );
    let mut worst = 0.0f64;
    for (kt, d) in &snapshots {
        let trace = d.trace();
        worst = worst.max((trace - 1.0).abs());
        let last = n_max.map_or(d.n_cut, |m| m.min(d.n_cut));
        for n in 0..=last {
            table.push(vec![
                (*kt).into(),
                d.t.into(),
                n.into(),
                d.weight(n).into(),
                trace.into(),
                d.tail_bound.into(),
                d.n_cut.into(),
            ]);
        }
    }
    table
        .footer
        .push(("max_trace_error".into(), fmt_f64(worst)));
    emit(&table, format, out)?;
    Ok(ExitCode::SUCCESS)
}

fn fidelity(
    args: &BathArgs,
    b: usize,
    audit: bool,
    format: Format,
    out: Option<&Path>,
) -> Result<ExitCode, CliError> {
    reject_table(format)?;
    let cfg = bath_config(args, b)?;
    let lower = cfg.lower_neighbor()?;
    let kts = args.grid.values();
    let rows = kts
        .par_iter()
        .map(|&kt| -> Result<Vec<Cell>, CoreError> {
            let t = cfg.time_at(kt);
            let mut row: Vec<Cell> = vec![
                kt.into(),
                fidelity_overlap(&cfg, &lower, t)?.into(),
                survival(&cfg, t)?.into(),
                survival(&lower, t)?.into(),
                purity(&cfg, t)?.into(),
                purity(&lower, t)?.into(),
            ];
            if audit {
                let a = fidelity_audit(&cfg, t)?;
                row.extend([
                    a.closed_form.into(),
                    a.abs_diff.into(),
                    verdict_name(a.verdict).into(),
                ]);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut columns = vec![
        "kt",
        "fidelity",
        "survival_b",
        "survival_bm1",
        "purity_b",
        "purity_bm1",
    ];
    if audit {
        columns.extend(["closed_form", "abs_diff", "audit"]);
    }
    let manifest = bath_manifest("fidelity", &cfg, &args.grid).param("audit", audit);
    let mut table = Table::new(manifest, &columns);
    for row in rows {
        table.push(row);
    }
    if audit {
        let typos = table
            .rows
            .iter()
            .filter(|r| r.last() == Some(&Cell::Text("typo-finding".into())))
            .count();
        let verdict = if typos == 0 {
            "matches"
        } else {
            "typo-finding"
        };
        table.footer.push(("audit".into(), verdict.into()));
        if typos > 0 {
            table.notes.push(format!(
                "closed-form triple sum disagrees with the population overlap at {typos} grid points; the overlap is authoritative"
            ));
        }
    }
    emit(&table, format, out)?;
    Ok(ExitCode::SUCCESS)
}

fn verdict_name(v: AuditVerdict) -> &'static str {
    match v {
        AuditVerdict::Matches => "matches",
        AuditVerdict::TypoFinding => "typo-finding",
    }
}

fn ymean_series(cfg: &DiffusiveConfig, grid: &KtGrid) -> Result<Vec<YMeanPoint>, CoreError> {
    if cfg.b == 0 {
        return Err(CoreError::InvalidParameter(
            "the averaged criterion needs b >= 1".into(),
        ));
    }
    grid.values()
        .par_iter()
        .map(|&kt| mean_y_point(cfg, kt))
        .collect()
}

fn ymean(
    args: &BathArgs,
    b: usize,
    format: Format,
    out: Option<&Path>,
) -> Result<ExitCode, CliError> {
    reject_table(format)?;
    let cfg = bath_config(args, b)?;
    let series = ymean_series(&cfg, &args.grid)?;
    let manifest = bath_manifest("ymean", &cfg, &args.grid)
        .unit("delta_e", "hbar*omega-units")
        .unit("y", "hbar");
    let mut table = Table::new(
        manifest,
        &[
            "kt",
            "mean_n_b",
            "mean_n_bm1",
            "mean_h0_b",
            "mean_h0_bm1",
            "mean_tau_b",
            "mean_tau_bm1",
            "tau_closed_b",
            "tau_closed_bm1",
            "delta_e",
            "delta_tau",
            "y_mean",
            "y_signed",
        ],
    );
    // Closed-system period 2π/(ω + 2λn), next to the moment ratio 2π⟨N⟩/⟨Ĥ0⟩.
    let tau_closed = |n: usize| TAU / (cfg.omega + 2.0 * cfg.lambda * n as f64);
    for p in &series {
        table.push(vec![
            p.kt.into(),
            p.mean_n_b.into(),
            p.mean_n_bm1.into(),
            p.mean_h0_b.into(),
            p.mean_h0_bm1.into(),
            p.mean_tau_b.into(),
            p.mean_tau_bm1.into(),
            tau_closed(b).into(),
            tau_closed(b - 1).into(),
            p.delta_e.into(),
            p.delta_tau.into(),
            p.y_mean.into(),
            p.y_signed.into(),
        ]);
    }
    table.footer.push((
        "half_decay_kt".into(),
        half_decay_kt(&series).map_or("none".into(), fmt_f64),
    ));
    let positive = series.iter().filter(|p| p.y_signed > 0.0).count();
    table.footer.push((
        "positive_signed_points".into(),
        format!("{positive}/{}", series.len()),
    ));
    emit(&table, format, out)?;
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// Figures

struct FigureSpec {
    which: u8,
    grid: KtGrid,
    kappa: f64,
    lambda: f64,
    b: Vec<usize>,
    tol: SeriesTolerance,
}

impl FigureSpec {
    fn b_values(&self) -> Vec<usize> {
        match (self.b.is_empty(), self.which) {
            (false, _) => self.b.clone(),
            (true, 1 | 2) => vec![1, 5, 10, 15],
            (true, _) => vec![2, 5, 10, 15],
        }
    }

    /// `ω/λ` of the Hamiltonian; the first two figures do not depend on it.
    fn ratio(&self) -> f64 {
        match self.which {
            3 => 0.1,
            4 => 10.0,
            _ => 1.0,
        }
    }

    fn title(&self) -> String {
        match self.which {
            1 => "Neighbor fidelity F(b,t)".into(),
            2 => "Survival P_b(b,t)".into(),
            _ => format!("Averaged criterion <y(b)>, omega/lambda = {}", self.ratio()),
        }
    }

    fn quantity(&self) -> &'static str {
        match self.which {
            1 => "fidelity",
            2 => "survival",
            _ => "y_mean",
        }
    }
}

fn figure(spec: &FigureSpec, dir: &Path, format: Format) -> Result<(), CliError> {
    reject_table(format)?;
    let bs = spec.b_values();
    let kts = spec.grid.values();
    let omega = spec.ratio() * spec.lambda;
    let configs = bs
        .iter()
        .map(|&b| DiffusiveConfig::new(b, spec.kappa, omega, spec.lambda)?.with_tolerance(spec.tol))
        .collect::<Result<Vec<_>, CoreError>>()?;

    let mut half_decay = Vec::new();
    let columns: Vec<Vec<f64>> = match spec.which {
        1 | 2 => configs
            .iter()
            .map(|cfg| {
                let lower = if spec.which == 1 {
                    Some(cfg.lower_neighbor()?)
                } else {
                    None
                };
                kts.par_iter()
                    .map(|&kt| {
                        let t = cfg.time_at(kt);
                        match &lower {
                            Some(l) => fidelity_overlap(cfg, l, t),
                            None => survival(cfg, t),
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<_, _>>()?,
        _ => configs
            .iter()
            .map(|cfg| {
                let s = ymean_series(cfg, &spec.grid)?;
                half_decay.push((cfg.b, half_decay_kt(&s)));
                Ok(s.iter().map(|p| p.y_mean).collect())
            })
            .collect::<Result<_, CoreError>>()?,
    };

    let mut manifest = Manifest::new("figures", spec.tol)
        .param("figure", spec.which)
        .param(
            "b",
            bs.iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(";"),
        )
        .param("kappa", fmt_f64(spec.kappa))
        .param("lambda", fmt_f64(spec.lambda))
        .param("grid", spec.grid)
        .unit("kt", "dimensionless");
    if spec.which >= 3 {
        manifest = manifest.param("omega", fmt_f64(omega)).unit("y", "hbar");
    } else {
        manifest = manifest.unit(spec.quantity(), "probability");
    }
    let headers: Vec<String> = std::iter::once("kt".to_string())
        .chain(bs.iter().map(|b| format!("{}_b{b}", spec.quantity())))
        .collect();
    let header_refs: Vec<&str> = headers.iter().map(String::as_str).collect();
    let mut table = Table::new(manifest, &header_refs);
    for (i, &kt) in kts.iter().enumerate() {
        let mut row = vec![Cell::Num(kt)];
        row.extend(columns.iter().map(|c| Cell::Num(c[i])));
        table.push(row);
    }
    for (b, kt) in &half_decay {
        table.footer.push((
            format!("half_decay_kt_b{b}"),
            kt.map_or("none".into(), fmt_f64),
        ));
    }

    let plot = Plot {
        title: spec.title(),
        x_label: "κt".into(),
        y_label: match spec.which {
            1 => "F(b,t)".into(),
            2 => "P_b(b,t)".into(),
            _ => "<y(b)> / ħ".into(),
        },
        series: bs
            .iter()
            .zip(&columns)
            .map(|(b, c)| Series {
                label: format!("b={b}"),
                points: kts.iter().copied().zip(c.iter().copied()).collect(),
            })
            .collect(),
        hline: (spec.which >= 3).then(|| (HALF_HBAR, "ħ/2".to_string())),
    };

    let ext = if format == Format::Json {
        "json"
    } else {
        "csv"
    };
    let data_path: PathBuf = dir.join(format!("fig{}.{ext}", spec.which));
    let svg_path: PathBuf = dir.join(format!("fig{}.svg", spec.which));
    write_file(&data_path, &table.render(format))?;
    write_file(&svg_path, &plot.render())?;
    write_sidecar(
        &table.manifest,
        &[&data_path, &svg_path],
        &sidecar_path(&data_path),
    )
}
