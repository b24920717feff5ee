use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use weakcomm::decision::{
    ball_sizes, growth_classifier, growth_report, symmetrize, FiniteOracle, FreeAbelianOracle, FreeOracle, Growth,
    Verdict, WPOracle, WpBudget, XgSolver,
};
use weakcomm::enumerator::{enumerate, EnumerationConfig};
use weakcomm::isoperimetry::{
    c_n_word, central_transform, check_certificate, distortion_bracket, free_abelian_rank_two, grid_certificate,
    heisenberg, minimal_area_search, AreaSearch,
};
use weakcomm::presentations::{sidki_double, sidki_double_default, Presentation, WitnessPolicy};
use weakcomm::sidki::{self, BuildConfig, CheckResult};
use weakcomm::words::{Alphabet, Word};
use weakcomm::zqmodules;
use weakcomm::Error;

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "weakcomm", version, about = "Compute with the weak commutativity group X(G)")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
struct Opts {
    /// Inline presentation, e.g. "<a, b | a^2, b^3, (a b)^5>".
    #[arg(short = 'p', long, global = true)]
    presentation: Option<String>,
    /// Presentation file: `< ... | ... >` text or presentation JSON.
    #[arg(long, global = true)]
    file: Option<PathBuf>,
    /// Work with the Sidki double of the presentation.
    #[arg(long, global = true)]
    #[serde(default)]
    double: bool,
    /// Witness policy for the double: `all` or `len:k`.
    #[arg(long, global = true)]
    witness: Option<WitnessPolicy>,
    /// Coset table size limit for enumeration
    #[arg(long, global = true)]
    max_cosets: Option<usize>,
    /// Refuse element-set computations above this group order.
    #[arg(long, global = true)]
    guard: Option<usize>,
    /// Word problem laps, or the maximal area for `area`.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Ball radius for `growth`, or the maximal conjugator length for `area`
    #[arg(long, global = true)]
    radius: Option<usize>,
    /// Write the JSON report here; `-` for standard output.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    /// TOML file whose keys are flag names; flags given on the command line win.
    #[arg(long, global = true)]
    #[serde(skip)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and normalize a presentation.
    Parse,
    /// Build the Sidki double presentation.
    Double,
    /// Coset-enumerate the group (or its double) over the trivial subgroup.
    Realize,
    /// Realize X(G) and run every structural check.
    Verify,
    /// Compute n, d, s and test the Engel bound m = n + d + s + 3 on X(G).
    Engel {
        /// Also compute the least Engel degree of X(G) up to m.
        #[arg(long)]
        minimal: bool,
    },
    /// L/L' against Aug/I2, augmentation powers, W and the module M.
    Modules,
    /// Decide words over X ∪ X̄ in X(G).
    Wp {
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Ball sizes and growth classification.
    Growth {
        /// Comma-separated generating words; defaults to the generators and their inverses.
        #[arg(long)]
        generators: Option<String>,
    },
    /// Area certificates: a word over the presentation, `--grid n`, or `--cn n`.
    Area {
        word: Option<String>,
        /// Certificate for [a^n, b^n] over <a, b | [a, b]>.
        #[arg(long)]
        grid: Option<usize>,
        /// Lift the grid certificate to a central extension: `heisenberg` or a presentation JSON with lifting data.
        #[arg(long, requires = "grid")]
        extension: Option<String>,
        /// c_n words and the distortion bracket for n = 1..=N.
        #[arg(long)]
        cn: Option<usize>,
    },
}

/// Settings after merging the config file; embedded in every report.
#[derive(Serialize)]
struct RunConfig {
    presentation: Option<String>,
    double: bool,
    witness: Option<String>,
    max_cosets: usize,
    guard: usize,
    budget: Option<usize>,
    radius: Option<usize>,
    schema_version: u32,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Budget(String),
    Assertion(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Overflow { .. } | Error::Guard { .. } | Error::PartialResult(_) => Failure::Budget(e.to_string()),
            Error::CheckFailed { .. } | Error::NotEngel(_) | Error::NotHomomorphism(_) => {
                Failure::Assertion(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<Report, Failure>;

struct Report {
    summary: Vec<String>,
    result: Value,
    /// 0 ok, 1 assertion failed, 2 budget exhausted.
    status: u8,
}

impl Report {
    fn ok(summary: Vec<String>, result: Value) -> Self {
        Report { summary, result, status: 0 }
    }
}

fn status_name(code: u8) -> &'static str {
    match code {
        0 => "ok",
        1 => "assertion_failed",
        2 => "budget_exhausted",
        _ => "usage_error",
    }
}

struct Ctx {
    opts: Opts,
}

impl Ctx {
    fn enumeration(&self) -> EnumerationConfig {
        EnumerationConfig::with_max_cosets(self.opts.max_cosets.unwrap_or(EnumerationConfig::default().max_cosets))
    }

    fn build(&self) -> BuildConfig {
        BuildConfig { enumeration: self.enumeration(), guard: self.opts.guard.unwrap_or(BuildConfig::default().guard) }
    }

    fn presentation(&self) -> Result<Presentation, Failure> {
        let text = match (&self.opts.presentation, &self.opts.file) {
            (Some(p), None) => p.clone(),
            (None, Some(f)) => std::fs::read_to_string(f).map_err(|e| Failure::Usage(format!("{}: {e}", f.display())))?,
            (Some(_), Some(_)) => return Err(Failure::Usage("give either --presentation or --file, not both".into())),
            (None, None) => return Err(Failure::Usage("a presentation is required (-p or --file)".into())),
        };
        let text = text.trim();
        Ok(if text.starts_with('{') { Presentation::from_json(text)? } else { Presentation::parse(text)? })
    }

    fn double_of(&self, p: &Presentation) -> Result<Presentation, Failure> {
        Ok(match self.opts.witness {
            Some(policy) => sidki_double(p, policy, &self.enumeration())?,
            None if base_kind(p) != BaseKind::Other => sidki_double(p, WitnessPolicy::LengthBound(2), &self.enumeration())?,
            None => sidki_double_default(p, &self.enumeration())?,
        })
    }

    fn run_config(&self, p: Option<&Presentation>) -> RunConfig {
        RunConfig {
            presentation: p.map(|p| p.to_string()),
            double: self.opts.double,
            witness: self.opts.witness.map(|w| w.to_string()),
            max_cosets: self.enumeration().max_cosets,
            guard: self.build().guard,
            budget: self.opts.budget,
            radius: self.opts.radius,
            schema_version: SCHEMA_VERSION,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum BaseKind {
    Free,
    FreeAbelian,
    Other,
}

/// Groups with a normal form: no relators, or exactly the commutators of all generator pairs.
fn base_kind(p: &Presentation) -> BaseKind {
    let k = p.generators().len();
    if p.relators().is_empty() {
        return BaseKind::Free;
    }
    let mut pairs = std::collections::BTreeSet::new();
    for r in p.relators() {
        let Ok(sums) = r.exponent_sums(p.alphabet()) else { return BaseKind::Other };
        let support = r.support();
        if r.len() != 4 || support.len() != 2 || sums.iter().any(|&e| e != 0) {
            return BaseKind::Other;
        }
        let (i, j) = (p.alphabet().index_of(&support[0]), p.alphabet().index_of(&support[1]));
        if let (Some(i), Some(j)) = (i, j) {
            pairs.insert((i.min(j), i.max(j)));
        }
    }
    if pairs.len() == k * (k - 1) / 2 && p.relators().len() == pairs.len() {
        BaseKind::FreeAbelian
    } else {
        BaseKind::Other
    }
}

fn checks_summary(checks: &[CheckResult]) -> Vec<String> {
    checks
        .iter()
        .map(|c| {
            let mut s = format!("{} {}", if c.pass { "PASS" } else { "FAIL" }, c.name);
            if let Some(w) = &c.witness {
                s += &format!(" ({w})");
            }
            s
        })
        .collect()
}

fn status_of(checks: &[CheckResult]) -> u8 {
    if checks.iter().all(|c| c.pass) {
        0
    } else {
        1
    }
}

fn cmd_parse(ctx: &Ctx) -> Outcome {
    let p = ctx.presentation()?;
    let p = if ctx.opts.double { ctx.double_of(&p)? } else { p };
    let ab = p.abelianization();
    let summary = vec![
        p.to_string(),
        format!("{} generators, {} relators, abelianization {ab}", p.generators().len(), p.relators().len()),
    ];
    Ok(Report::ok(summary, json!({ "presentation": p.to_json(), "abelianization": ab.to_string() })))
}

fn cmd_double(ctx: &Ctx) -> Outcome {
    let p = ctx.presentation()?;
    let d = ctx.double_of(&p)?;
    let mut summary = vec![d.to_string()];
    if d.meta.proper_preimage_possible {
        summary.push("note: finite witness set, this may present a proper preimage of X(G)".into());
    }
    Ok(Report::ok(summary, json!({ "double": d.to_json() })))
}

fn cmd_realize(ctx: &Ctx) -> Outcome {
    let p = ctx.presentation()?;
    let p = if ctx.opts.double { ctx.double_of(&p)? } else { p };
    let t = enumerate(&p, &[], &ctx.enumeration())?;
    let summary = vec![format!("order {}", t.n_cosets())];
    Ok(Report::ok(summary, json!({ "order": t.n_cosets(), "table": t.to_json() })))
}

fn cmd_verify(ctx: &Ctx) -> Outcome {
    let p = ctx.presentation()?;
    let xr = sidki::assemble(&p, &ctx.build())?;
    let checks = sidki::run_checks(&xr)?;
    let classes = sidki::nilpotence_report(&xr)?;
    let o = sidki::orders(&xr);
    let mut summary = vec![format!(
        "|G| = {}, |X(G)| = {}, |D| = {}, |L| = {}, |W| = {}, |im rho| = {}",
        o.g, o.x, o.d, o.l, o.w, o.im_rho
    )];
    summary.extend(checks_summary(&checks));
    let status = status_of(&checks);
    let result = sidki::verification_report(&xr, &checks, None, Some(&classes), None);
    Ok(Report { summary, result, status })
}

fn cmd_engel(ctx: &Ctx, minimal: bool) -> Outcome {
    let p = ctx.presentation()?;
    let xr = sidki::assemble(&p, &ctx.build())?;
    let e = sidki::engel_certificate(&xr, minimal)?;
    let mut summary = vec![format!("n = {}, d = {}, s = {}, m = {}: X(G) is {}-Engel: {}", e.n, e.d, e.s, e.m, e.m, e.verdict)];
    if let Some(k) = e.minimal_class_x {
        summary.push(format!("least Engel degree of X(G): {k}"));
    }
    let status = if e.verdict { 0 } else { 1 };
    Ok(Report { summary, result: serde_json::to_value(&e).expect("serializable"), status })
}

fn cmd_modules(ctx: &Ctx) -> Outcome {
    let p = ctx.presentation()?;
    let xr = sidki::assemble(&p, &ctx.build())?;
    let v = zqmodules::aug_mod_i2(&xr.g)?;
    let mut checks = vec![zqmodules::compare_l_abelianization(&xr)?];
    checks.extend(zqmodules::aug_power_checks(&v)?);
    let ws = zqmodules::w_structure_checks(&xr)?;
    checks.extend(ws.checks.iter().cloned());
    let s = v.action_nilpotency_class(v.default_cap()).class();
    let mut summary = vec![
        format!("Aug/I2 = {}, action class {}", v.underlying(), s.map_or("none".into(), |s| s.to_string())),
        format!("W = {}, M = {}, A = G'/G'' = {}", ws.w, ws.m, ws.a),
    ];
    summary.extend(checks_summary(&checks));
    let status = status_of(&checks);
    let result = json!({
        "aug_mod_i2": v.to_json(),
        "w_structure": ws,
        "checks": checks,
    });
    Ok(Report { summary, result, status })
}

/// A word-problem oracle for the base group, chosen by normal form when
/// available and by enumeration otherwise.
fn base_oracle(ctx: &Ctx, p: &Presentation) -> Result<Arc<dyn WPOracle>, Failure> {
    Ok(match base_kind(p) {
        BaseKind::Free => Arc::new(FreeOracle::new(p.alphabet().clone())),
        BaseKind::FreeAbelian => Arc::new(FreeAbelianOracle::new(p.alphabet().clone())),
        BaseKind::Other => Arc::new(FiniteOracle::new(p, &ctx.enumeration())?),
    })
}

fn solver(ctx: &Ctx, p: &Presentation) -> Result<XgSolver, Failure> {
    if base_kind(p) == BaseKind::Other {
        Ok(XgSolver::finite(p, &ctx.enumeration())?)
    } else {
        Ok(XgSolver::new(p.clone(), base_oracle(ctx, p)?, ctx.double_of(p)?)?)
    }
}

fn budget(ctx: &Ctx) -> WpBudget {
    ctx.opts.budget.map_or_else(WpBudget::default, WpBudget::laps)
}

fn cmd_wp(ctx: &Ctx, words: &[String]) -> Outcome {
    let p = ctx.presentation()?;
    let s = solver(ctx, &p)?;
    let alpha = s.double().alphabet().clone();
    let mut summary = Vec::new();
    let mut results = Vec::new();
    let mut status = 0;
    for text in words {
        let w = weakcomm::parse::parse_word(text, &alpha)?;
        let v = s.decide(&w, budget(ctx))?;
        let label = match &v {
            Verdict::Trivial(_) => "trivial",
            Verdict::Nontrivial(_) => "nontrivial",
            Verdict::Unknown(_) => {
                status = 2;
                "unknown"
            }
        };
        summary.push(format!("{w}: {label}"));
        results.push(json!({ "word": w, "verdict": label, "evidence": v }));
    }
    Ok(Report { summary, result: json!({ "words": results }), status })
}

fn cmd_growth(ctx: &Ctx, generators: Option<&str>) -> Outcome {
    let p = ctx.presentation()?;
    let radius = ctx.opts.radius.unwrap_or(6);
    let alpha: Alphabet = if ctx.opts.double { p.alphabet().doubled() } else { p.alphabet().clone() };
    let gens: Vec<Word> = match generators {
        Some(g) => g
            .split(',')
            .map(|w| weakcomm::parse::parse_word(w.trim(), &alpha))
            .collect::<Result<_, _>>()?,
        None => symmetrize(&alpha.generators().iter().map(Word::gen).collect::<Vec<_>>()),
    };
    let sizes = if !ctx.opts.double {
        let o = base_oracle(ctx, &p)?;
        ball_sizes(&gens, |u, v| o.equal(u, v).map(Some), radius)?
    } else if p.generators().len() == 1 && base_kind(&p) != BaseKind::Other {
        // X(Z) = Z^2 on a, a~
        let o = FreeAbelianOracle::new(alpha.clone());
        ball_sizes(&gens, |u, v| o.equal(u, v).map(Some), radius)?
    } else {
        let s = solver(ctx, &p)?;
        let b = budget(ctx);
        ball_sizes(&gens, |u, v| s.decide(&u.mul(&v.inverse()), b).map(|v| v.is_trivial()), radius)?
    };
    let (report, class) = if sizes.len() < 4 {
        let report = json!({
            "generators": gens.iter().map(|g| g.to_string()).collect::<Vec<_>>(),
            "radii": (0..sizes.len()).collect::<Vec<_>>(),
            "sizes": sizes,
            "classification": null,
            "heuristic_flag": true,
        });
        (report, "not classified (needs radius ≥ 3)".to_string())
    } else {
        let class = match growth_classifier(&sizes)?.growth {
            Growth::PolynomialDegree(d) => format!("polynomial of degree {d}"),
            Growth::ExponentialRate(x) => format!("exponential with rate {x:.3}"),
            Growth::Inconclusive => "inconclusive".into(),
        };
        (growth_report(&gens, &sizes)?, class)
    };
    let sizes_txt: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
    let summary = vec![format!("ball sizes: {}", sizes_txt.join(", ")), format!("growth (finite-data heuristic): {class}")];
    Ok(Report::ok(summary, report))
}

fn cmd_area(ctx: &Ctx, word: Option<&str>, grid: Option<usize>, extension: Option<&str>, cn: Option<usize>) -> Outcome {
    match (word, grid, cn) {
        (Some(w), None, None) => {
            let p = ctx.presentation()?;
            let w = p.parse_word(w)?;
            let (max_area, max_radius) = (ctx.opts.budget.unwrap_or(4), ctx.opts.radius.unwrap_or(4));
            match minimal_area_search(&p, &w, max_area, max_radius)? {
                AreaSearch::Minimum { area, certificate } => Ok(Report::ok(
                    vec![format!("minimal area {area} (radius ≤ {max_radius})")],
                    json!({ "minimum": area, "certificate": certificate.to_json() }),
                )),
                AreaSearch::Unknown { reason } => Ok(Report {
                    summary: vec![format!("unknown: {reason}")],
                    result: json!({ "minimum": null, "reason": reason }),
                    status: 2,
                }),
            }
        }
        (None, Some(n), None) => {
            let c = grid_certificate(n)?;
            let z2 = free_abelian_rank_two();
            let valid = check_certificate(&z2, &c)?;
            let mut summary = vec![format!("[a^{n}, b^{n}]: area {}, radius {}, valid {valid}", c.area(), c.radius())];
            let mut result = json!({ "certificate": c.to_json(), "valid": valid });
            let mut ok = valid;
            if let Some(ext) = extension {
                let (total, lifting) = if ext == "heisenberg" {
                    heisenberg()
                } else {
                    let text = std::fs::read_to_string(ext).map_err(|e| Failure::Usage(format!("{ext}: {e}")))?;
                    let p = Presentation::from_json(&text)?;
                    let l = p.meta.lifting.clone().ok_or_else(|| Failure::Usage(format!("{ext} has no lifting data")))?;
                    (p, l)
                };
                let t = central_transform(&z2, &total, &lifting, &c, None)?;
                let lifted_ok = check_certificate(&total, &t.certificate)?;
                let within = (t.cost.total as u128) <= t.cost.bound;
                ok &= lifted_ok && within;
                summary.push(format!(
                    "lifted: area {}, central part {}, cost {} ≤ bound {}: {within}, valid {lifted_ok}",
                    t.certificate.area(),
                    t.central_part,
                    t.cost.total,
                    t.cost.bound
                ));
                result["lifted"] = json!({
                    "certificate": t.certificate.to_json(),
                    "central_part": t.central_part,
                    "cost": t.cost,
                    "valid": lifted_ok,
                });
            }
            Ok(Report { summary, result, status: if ok { 0 } else { 1 } })
        }
        (None, None, Some(n)) => {
            let mut rows = Vec::new();
            let mut summary = Vec::new();
            let mut ok = true;
            for k in 1..=n {
                let c = c_n_word(k)?;
                let [x, y, z] = c.expand().rho();
                let a = Word::gen(&weakcomm::words::Generator::new("a").expect("valid"));
                let b = Word::gen(&weakcomm::words::Generator::new("b").expect("valid"));
                let rho_ok = x == Word::commutator(&a.pow(k as i64), &b.pow(k as i64)) && y.is_identity() && z.is_identity();
                ok &= rho_ok && c.len() == 6 * k;
                let br = distortion_bracket(k)?;
                summary.push(format!(
                    "c_{k}: length {}, reduced {}, rho = ([a^{k},b^{k}],1,1): {rho_ok}, d_L(1,c_{k}) ≥ {}",
                    c.len(),
                    c.reduced().len(),
                    br.lower
                ));
                rows.push(json!({ "n": k, "word": c.reduced(), "length": c.len(), "rho_ok": rho_ok, "distortion": br }));
            }
            Ok(Report { summary, result: json!({ "c_n": rows }), status: if ok { 0 } else { 1 } })
        }
        _ => Err(Failure::Usage("area needs exactly one of WORD, --grid N or --cn N".into())),
    }
}

fn merge_config(mut opts: Opts) -> Result<Opts, Failure> {
    let Some(path) = opts.config.clone() else { return Ok(opts) };
    let text = std::fs::read_to_string(&path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let file: Opts = toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    opts.presentation = opts.presentation.or(file.presentation);
    opts.file = opts.file.or(file.file);
    opts.double |= file.double;
    opts.witness = opts.witness.or(file.witness);
    opts.max_cosets = opts.max_cosets.or(file.max_cosets);
    opts.guard = opts.guard.or(file.guard);
    opts.budget = opts.budget.or(file.budget);
    opts.radius = opts.radius.or(file.radius);
    opts.json = opts.json.or(file.json);
    Ok(opts)
}

fn run(cli: Cli) -> u8 {
    let opts = match merge_config(cli.opts) {
        Ok(o) => o,
        Err(f) => return report_failure(f),
    };
    if opts.max_cosets == Some(0) || opts.guard == Some(0) || opts.budget == Some(0) {
        return report_failure(Failure::Usage("budgets must be positive".into()));
    }
    let ctx = Ctx { opts };
    let outcome = match &cli.command {
        Command::Parse => cmd_parse(&ctx),
        Command::Double => cmd_double(&ctx),
        Command::Realize => cmd_realize(&ctx),
        Command::Verify => cmd_verify(&ctx),
        Command::Engel { minimal } => cmd_engel(&ctx, *minimal),
        Command::Modules => cmd_modules(&ctx),
        Command::Wp { words } => cmd_wp(&ctx, words),
        Command::Growth { generators } => cmd_growth(&ctx, generators.as_deref()),
        Command::Area { word, grid, extension, cn } => {
            cmd_area(&ctx, word.as_deref(), *grid, extension.as_deref(), *cn)
        }
    };
    let report = match outcome {
        Ok(r) => r,
        Err(f) => return report_failure(f),
    };
    let to_stdout = ctx.opts.json.as_deref().is_some_and(|p| p.as_os_str() == "-");
    for line in &report.summary {
        if to_stdout {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    }
    if let Some(path) = &ctx.opts.json {
        let presentation = ctx.presentation().ok();
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "command": command_name(&cli.command),
            "status": status_name(report.status),
            "config": ctx.run_config(presentation.as_ref()),
            "result": report.result,
        });
        let text = serde_json::to_string_pretty(&doc).expect("serializable") + "\n";
        if to_stdout {
            print!("{text}");
        } else if let Err(e) = std::fs::write(path, text) {
            return report_failure(Failure::Usage(format!("{}: {e}", path.display())));
        }
    }
    report.status
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Parse => "parse",
        Command::Double => "double",
        Command::Realize => "realize",
        Command::Verify => "verify",
        Command::Engel { .. } => "engel",
        Command::Modules => "modules",
        Command::Wp { .. } => "wp",
        Command::Growth { .. } => "growth",
        Command::Area { .. } => "area",
    }
}

fn report_failure(f: Failure) -> u8 {
    let (code, msg) = match f {
        Failure::Assertion(m) => (1, m),
        Failure::Budget(m) => (2, m),
        Failure::Usage(m) => (3, m),
    };
    eprintln!("error: {msg}");
    code
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(cli))
}
