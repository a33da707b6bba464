use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use classdist::baselines::{fit_baseline, BaselineConfig, BaselineFit, BaselineMethod};
use classdist::dataset::{dataset_paths, Dataset};
use classdist::significance::{p_value, SignificanceReport};
use classdist::studies::{
    comparison_table, random_data_study, ComparisonOptions, ComparisonTable, Failure, RandomStudyConfig,
    StudyDataset, COLUMNS,
};
use classdist::{fit as fit_model, Error, FitConfig, FitResult, ModelParams, Result};

use crate::format::{opt_sig, sig, table};

fn io_err(context: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io(format!("{}: {e}", context.display()))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Error::Io(e.to_string()))
}

fn config_line(cfg: &FitConfig) -> String {
    format!(
        "z_min={} z_max={} z_step={} n0_max={} accuracy_n0={} refine_rounds={} refine_shrink={}",
        cfg.z_min, cfg.z_max, cfg.z_step, cfg.n0_max, cfg.accuracy_n0, cfg.refine_rounds, cfg.refine_shrink
    )
}

fn baseline_line(cfg: &BaselineConfig) -> String {
    format!(
        "zipf_s=[{}, {}] step {}; exp_a=[{}, {}] {} log-spaced points",
        cfg.zipf_s_min, cfg.zipf_s_max, cfg.zipf_s_step, cfg.exp_a_min, cfg.exp_a_max, cfg.exp_points
    )
}

fn params_block(out: &mut String, p: &ModelParams, error: f64) {
    let _ = writeln!(out, "n0          {}", p.n0());
    let _ = writeln!(out, "gamma       {}", sig(p.gamma()));
    let _ = writeln!(out, "z           {}", sig(p.z()));
    let _ = writeln!(out, "nbar        {}", sig(p.nbar()));
    let _ = writeln!(out, "error       {}", sig(error));
}

#[derive(Serialize)]
struct ClassRow<'a> {
    rank: usize,
    label: &'a str,
    observed: f64,
    fitted: f64,
}

#[derive(Serialize)]
struct FitReport<'a> {
    dataset: &'a str,
    m: usize,
    elements: Option<u64>,
    config: &'a FitConfig,
    params: &'a ModelParams,
    error: f64,
    classes: Vec<ClassRow<'a>>,
}

fn write_curves(dir: &Path, name: &str, res: &FitResult) -> Result<[String; 2]> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let z_path = dir.join(format!("{name}_error_vs_z.csv"));
    let n0_path = dir.join(format!("{name}_error_vs_n0.csv"));

    let mut w = csv::Writer::from_path(&z_path).map_err(|e| io_err(&z_path, e))?;
    w.write_record(["z", "n0", "error"]).map_err(|e| io_err(&z_path, e))?;
    for p in &res.error_vs_z {
        w.write_record([p.z.to_string(), p.n0.to_string(), p.error.to_string()])
            .map_err(|e| io_err(&z_path, e))?;
    }
    w.flush().map_err(|e| io_err(&z_path, e))?;

    let mut w = csv::Writer::from_path(&n0_path).map_err(|e| io_err(&n0_path, e))?;
    w.write_record(["n0", "error"]).map_err(|e| io_err(&n0_path, e))?;
    for p in &res.error_vs_n0 {
        w.write_record([p.n0.to_string(), p.error.to_string()])
            .map_err(|e| io_err(&n0_path, e))?;
    }
    w.flush().map_err(|e| io_err(&n0_path, e))?;

    Ok([z_path.display().to_string(), n0_path.display().to_string()])
}

pub fn fit(input: &Path, cfg: &FitConfig, json: bool, curves: Option<&Path>) -> Result<String> {
    let ds = Dataset::load(input)?;
    let d = ds.distribution()?;
    let res = fit_model(&d, cfg)?;
    let written = curves.map(|dir| write_curves(dir, &ds.name, &res)).transpose()?;

    let labels = d.labels().unwrap_or_default();
    let classes: Vec<ClassRow> = labels
        .iter()
        .zip(d.values().iter().zip(&res.fitted))
        .enumerate()
        .map(|(i, (label, (&observed, &fitted)))| ClassRow {
            rank: i + 1,
            label,
            observed,
            fitted,
        })
        .collect();

    if json {
        return to_json(&FitReport {
            dataset: &ds.name,
            m: d.m(),
            elements: d.total_elements(),
            config: cfg,
            params: &res.params,
            error: res.error,
            classes,
        });
    }

    let mut out = String::new();
    let _ = writeln!(out, "dataset     {}", ds.name);
    let _ = writeln!(out, "classes     {}", d.m());
    let _ = writeln!(out, "elements    {}", d.total_elements().map_or("-".into(), |n| n.to_string()));
    let _ = writeln!(out, "config      {}", config_line(cfg));
    out.push('\n');
    params_block(&mut out, &res.params, res.error);
    out.push('\n');
    let rows: Vec<Vec<String>> = classes
        .iter()
        .map(|c| vec![c.rank.to_string(), c.label.to_string(), sig(c.observed), sig(c.fitted)])
        .collect();
    out.push_str(&table(&["rank", "label", "observed", "fitted"], &rows));
    if let Some([z, n0]) = written {
        let _ = writeln!(out, "\ncurves      {z}\n            {n0}");
    }
    Ok(out)
}

#[derive(Serialize)]
struct MainFit<'a> {
    params: &'a ModelParams,
    error: f64,
}

#[derive(Serialize)]
struct BaselineSummary {
    method: BaselineMethod,
    parameter: Option<f64>,
    error: f64,
}

#[derive(Serialize)]
struct CompareReport<'a> {
    dataset: &'a str,
    m: usize,
    elements: Option<u64>,
    config: &'a FitConfig,
    baseline_config: &'a BaselineConfig,
    main: MainFit<'a>,
    baselines: Vec<BaselineSummary>,
    significance: Option<SignificanceReport>,
}

fn parameter_text(method: BaselineMethod, value: Option<f64>) -> String {
    match (method, value) {
        (BaselineMethod::Zipf, Some(s)) => format!("s={}", sig(s)),
        (BaselineMethod::Exponential, Some(a)) => format!("a={}", sig(a)),
        (BaselineMethod::Legacy, Some(g)) => format!("gamma={}", sig(g)),
        _ => "-".into(),
    }
}

pub fn compare_file(input: &Path, cfg: &FitConfig, trials: Option<usize>, seed: u64, json: bool) -> Result<String> {
    let ds = Dataset::load(input)?;
    let d = ds.distribution()?;
    let bcfg = BaselineConfig::from_fit(cfg);
    let main = fit_model(&d, cfg)?;
    let baselines = BaselineMethod::ALL
        .into_iter()
        .map(|m| fit_baseline(&d, m, &bcfg))
        .collect::<Result<Vec<BaselineFit>>>()?;
    let significance = match (trials, d.total_elements()) {
        (Some(t), Some(_)) => Some(p_value(&d, &main.fitted, t, seed)?),
        _ => None,
    };
    let summaries: Vec<BaselineSummary> = baselines
        .iter()
        .map(|b| BaselineSummary {
            method: b.method,
            parameter: b.parameter,
            error: b.error,
        })
        .collect();

    if json {
        return to_json(&CompareReport {
            dataset: &ds.name,
            m: d.m(),
            elements: d.total_elements(),
            config: cfg,
            baseline_config: &bcfg,
            main: MainFit {
                params: &main.params,
                error: main.error,
            },
            baselines: summaries,
            significance,
        });
    }

    let mut out = String::new();
    let _ = writeln!(out, "dataset     {}", ds.name);
    let _ = writeln!(out, "classes     {}", d.m());
    let _ = writeln!(out, "elements    {}", d.total_elements().map_or("-".into(), |n| n.to_string()));
    let _ = writeln!(out, "config      {}", config_line(cfg));
    let _ = writeln!(out, "baselines   {}", baseline_line(&bcfg));
    out.push('\n');
    let mut rows = vec![vec![
        "main".to_string(),
        format!("n0={}, gamma={}", main.params.n0(), sig(main.params.gamma())),
        sig(main.error),
    ]];
    for b in &summaries {
        rows.push(vec![b.method.to_string(), parameter_text(b.method, b.parameter), sig(b.error)]);
    }
    out.push_str(&table(&["method", "parameter", "error"], &rows));
    if let Some(s) = significance {
        let _ = writeln!(
            out,
            "\np-value     {} ({} of {} trials, seed {})",
            sig(s.p_value),
            s.exceed_count,
            s.trials,
            s.seed
        );
    }
    Ok(out)
}

#[derive(Serialize)]
struct CorpusReport<'a> {
    directory: String,
    config: &'a FitConfig,
    baseline_config: &'a BaselineConfig,
    trials: Option<usize>,
    seed: u64,
    #[serde(flatten)]
    table: &'a ComparisonTable,
}

pub fn compare_dir(dir: &Path, cfg: &FitConfig, trials: Option<usize>, seed: u64, json: bool) -> Result<String> {
    let mut datasets = Vec::new();
    let mut load_failures = Vec::new();
    for path in dataset_paths(dir)? {
        let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        match Dataset::load(&path).and_then(Dataset::into_study) {
            Ok(ds) => datasets.push(ds),
            Err(e) => load_failures.push(Failure {
                id: name,
                error: e.to_string(),
            }),
        }
    }
    let opts = ComparisonOptions {
        fit: *cfg,
        baselines: BaselineConfig::from_fit(cfg),
        trials,
        seed,
    };
    let mut t = if datasets.is_empty() {
        return Err(Error::EmptyInput);
    } else {
        comparison_table(&datasets, &opts)?
    };
    t.failures.extend(load_failures);
    t.failures.sort_by(|a, b| a.id.cmp(&b.id));

    if json {
        return to_json(&CorpusReport {
            directory: dir.display().to_string(),
            config: cfg,
            baseline_config: &opts.baselines,
            trials,
            seed,
            table: &t,
        });
    }
    Ok(corpus_text(dir, &opts, &datasets, &t))
}

fn corpus_text(dir: &Path, opts: &ComparisonOptions, datasets: &[StudyDataset], t: &ComparisonTable) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "directory   {}", dir.display());
    let _ = writeln!(out, "datasets    {} loaded, {} counted in summaries", datasets.len(), t.counted);
    let _ = writeln!(out, "config      {}", config_line(&opts.fit));
    let _ = writeln!(out, "baselines   {}", baseline_line(&opts.baselines));
    match opts.trials {
        Some(n) => {
            let _ = writeln!(out, "p-values    {n} trials, seed {}", opts.seed);
        }
        None => {
            let _ = writeln!(out, "p-values    off");
        }
    }

    out.push_str("\nPer dataset\n");
    let rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| {
            let mut id = r.id.clone();
            if !r.in_summary {
                id.push_str(" *");
            }
            vec![
                id,
                r.m.to_string(),
                r.elements.map_or("-".into(), |n| n.to_string()),
                r.n0.to_string(),
                sig(r.gamma),
                sig(r.error_main),
                sig(r.error_zipf),
                sig(r.error_exp),
                sig(r.error_zipf_s1),
                sig(r.error_legacy),
                opt_sig(r.p_value),
            ]
        })
        .collect();
    out.push_str(&table(
        &["dataset", "m", "|M|", "n0", "gamma", "main", "zipf", "exponential", "zipf_s1", "legacy", "p"],
        &rows,
    ));
    if t.rows.iter().any(|r| !r.in_summary) {
        out.push_str("(* not counted in summaries)\n");
    }

    out.push_str("\nSummary\n");
    let rows: Vec<Vec<String>> = ["average", "median"]
        .iter()
        .enumerate()
        .map(|(k, name)| {
            let mut row = vec![name.to_string()];
            row.extend(t.summary.iter().map(|s| sig(if k == 0 { s.average } else { s.median })));
            row
        })
        .collect();
    let mut header = vec![""];
    header.extend(COLUMNS);
    out.push_str(&table(&header, &rows));

    out.push_str("\nPearson correlations\n");
    let rows: Vec<Vec<String>> = t
        .correlations
        .iter()
        .map(|c| vec![c.x.to_string(), c.y.to_string(), opt_sig(c.r)])
        .collect();
    out.push_str(&table(&["x", "y", "r"], &rows));

    if !t.failures.is_empty() {
        out.push_str("\nFailures\n");
        for f in &t.failures {
            let _ = writeln!(out, "{}: {}", f.id, f.error);
        }
    }
    out
}

#[derive(Serialize)]
struct PvalueReport<'a> {
    dataset: &'a str,
    m: usize,
    config: &'a FitConfig,
    params: &'a ModelParams,
    #[serde(flatten)]
    significance: &'a SignificanceReport,
}

pub fn pvalue(input: &Path, cfg: &FitConfig, trials: usize, seed: u64, json: bool) -> Result<String> {
    let ds = Dataset::load(input)?;
    let d = ds.distribution()?;
    if d.total_elements().is_none() {
        return Err(Error::MissingElementCount);
    }
    let res = fit_model(&d, cfg)?;
    let s = p_value(&d, &res.fitted, trials, seed)?;
    if json {
        return to_json(&PvalueReport {
            dataset: &ds.name,
            m: d.m(),
            config: cfg,
            params: &res.params,
            significance: &s,
        });
    }
    let mut out = String::new();
    let _ = writeln!(out, "dataset     {}", ds.name);
    let _ = writeln!(out, "classes     {}", d.m());
    let _ = writeln!(out, "elements    {}", s.m_elements);
    let _ = writeln!(out, "config      {}", config_line(cfg));
    out.push('\n');
    params_block(&mut out, &res.params, res.error);
    out.push('\n');
    let _ = writeln!(out, "trials      {}", s.trials);
    let _ = writeln!(out, "seed        {}", s.seed);
    let _ = writeln!(out, "exceeding   {}", s.exceed_count);
    let _ = writeln!(out, "p-value     {}", sig(s.p_value));
    Ok(out)
}

pub fn random_study(
    m_min: usize,
    m_max: usize,
    ensembles: usize,
    elements: Option<u64>,
    seed: u64,
    cfg: &FitConfig,
    json: bool,
) -> Result<String> {
    if m_min < 2 || m_max < m_min {
        return Err(Error::InvalidParameter(format!(
            "class count range must satisfy 2 <= m_min <= m_max, got {m_min}..{m_max}"
        )));
    }
    let config = RandomStudyConfig {
        class_counts: (m_min..=m_max).collect(),
        ensembles,
        elements_per_sample: elements,
        seed,
        fit: *cfg,
    };
    let study = random_data_study(&config)?;
    if json {
        return to_json(&study);
    }
    let mut out = String::new();
    let _ = writeln!(out, "class counts {m_min}..{m_max}");
    let _ = writeln!(out, "ensembles    {ensembles}");
    let _ = writeln!(
        out,
        "samples      {}",
        elements.map_or("uniform weights".into(), |n| format!("{n} elements each"))
    );
    let _ = writeln!(out, "seed         {seed}");
    let _ = writeln!(out, "config       {}", config_line(cfg));
    out.push('\n');
    let rows: Vec<Vec<String>> = study
        .rows
        .iter()
        .map(|r| {
            vec![
                r.m.to_string(),
                sig(r.mean),
                sig(r.median),
                sig(r.min),
                sig(r.p05),
                sig(r.p25),
                sig(r.p75),
                sig(r.p95),
                sig(r.max),
            ]
        })
        .collect();
    out.push_str(&table(&["m", "mean", "median", "min", "p05", "p25", "p75", "p95", "max"], &rows));
    Ok(out)
}
