//! Command-line front end for the propagation toolkit.
//!
//! Exit codes: 0 success, 1 domain error, 2 usage error, 3 I/O error.
//! Machine-readable output goes to stdout, diagnostics to stderr, and every
//! command is deterministic given its flags (and seed where applicable).

use clap::{Args, Parser, Subcommand, ValueEnum};
use mmwprop::dataset::{load_reference, validate_sweep_file};
use mmwprop::geometry::{canopy_path_length, CanopySpan, LinkGeometry, RayPath};
use mmwprop::pdp::{omni_path_loss, omni_received_power, Polarization};
use mmwprop::propagation::{
    fit_attenuation_from_excess, friis_received_power, is_near_field, LinkBudgetParams,
};
use mmwprop::reflection::{
    fresnel_curve, fresnel_parallel, recover_reflection_coefficient, FresnelForm, GroundMaterial,
};
use mmwprop::scene::read_scene;
use mmwprop::sounder::{synthesize_sweep, SounderConfig};
use mmwprop::sweepfile::{self, ParseOutcome};
use mmwprop::units::milliwatts_to_dbm;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mmwprop",
    version,
    about = "Millimeter-wave foliage and ground-reflection propagation toolkit"
)]
struct Cli {
    /// Output format for tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Suppress informational notes on standard error.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolArg {
    Vv,
    Vh,
}

impl From<PolArg> for Polarization {
    fn from(p: PolArg) -> Self {
        match p {
            PolArg::Vv => Polarization::Vv,
            PolArg::Vh => Polarization::Vh,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormulaArg {
    /// Conventional permittivity-weighted parallel coefficient.
    #[value(alias = "textbook")]
    Standard,
    /// Refraction-cosine form; collapses to the normal-incidence value.
    #[value(alias = "paper")]
    Simplified,
}

impl From<FormulaArg> for FresnelForm {
    fn from(f: FormulaArg) -> Self {
        match f {
            FormulaArg::Standard => FresnelForm::Standard,
            FormulaArg::Simplified => FresnelForm::Simplified,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fit the foliage attenuation rate from paired path-loss observations.
    FitFoliage(FitFoliageArgs),
    /// Recover ground-reflection coefficients from measured powers.
    RecoverGamma(RecoverGammaArgs),
    /// Tabulate parallel Fresnel coefficient magnitudes.
    FresnelCurves(FresnelCurvesArgs),
    /// Two-path link budget for a scene.
    LinkBudget(LinkBudgetArgs),
    /// Synthesize a directional sweep with the channel-sounder simulator.
    SimulateSounder(SimulateSounderArgs),
    /// Omnidirectional received power and path loss of a sweep file.
    SynthOmni(SynthOmniArgs),
}

#[derive(Args)]
struct FitFoliageArgs {
    /// Use the bundled reference campaign tables.
    #[arg(long, conflicts_with = "input")]
    paper: bool,
    /// Polarization to fit; file rows without a polarization column always fit.
    #[arg(long, value_enum, default_value_t = PolArg::Vv)]
    pol: PolArg,
    /// Observation file: whitespace-delimited
    /// `distance_m pl_fs_db pl_foliage_db [polarization]` lines.
    #[arg(long, required_unless_present = "paper")]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct RecoverGammaArgs {
    /// Use the bundled reference campaign tables.
    #[arg(
        long,
        conflicts_with_all = ["d_i", "d_tot", "d_fol", "pr_fs", "pr_fol"]
    )]
    paper: bool,
    #[arg(long, required_unless_present = "paper")]
    d_i: Option<f64>,
    #[arg(long, required_unless_present = "paper")]
    d_tot: Option<f64>,
    /// Canopy length along the reflected ray, metres.
    #[arg(long, required_unless_present = "paper")]
    d_fol: Option<f64>,
    /// Attenuation rate for manual inputs, dB per metre (the bundled mode
    /// uses the campaign rate).
    #[arg(long, default_value_t = 0.4)]
    alpha: f64,
    #[arg(long, required_unless_present = "paper", allow_negative_numbers = true)]
    pr_fs: Option<f64>,
    #[arg(long, required_unless_present = "paper", allow_negative_numbers = true)]
    pr_fol: Option<f64>,
    #[arg(long, value_enum, default_value_t = PolArg::Vv)]
    pol: PolArg,
    /// Cross-polarization correction added to the power ratio, dB.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    xpd_correction: f64,
}

#[derive(Args)]
struct FresnelCurvesArgs {
    /// Relative permittivities, comma separated.
    #[arg(long, default_value = "1,3,5,7,9")]
    eps: String,
    /// Incident-angle grid `start:end[:step]` in degrees, end exclusive.
    #[arg(long, default_value = "0:90:0.5")]
    theta: String,
    #[arg(long, value_enum, default_value_t = FormulaArg::Standard)]
    formula: FormulaArg,
}

#[derive(Args)]
struct LinkBudgetArgs {
    #[arg(long, default_value_t = 4.06)]
    tx_height: f64,
    #[arg(long, default_value_t = 2.0)]
    rx_height: f64,
    #[arg(long)]
    distance: f64,
    /// Ground relative permittivity.
    #[arg(long, default_value_t = 4.0)]
    eps: f64,
    /// Foliage attenuation rate, dB per metre.
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Canopy spans along the ground track, `start:end[,start:end...]` metres.
    #[arg(long)]
    canopy: Option<String>,
    #[arg(long, value_enum, default_value_t = FormulaArg::Standard)]
    formula: FormulaArg,
    #[arg(long, default_value_t = -7.9, allow_negative_numbers = true)]
    tx_power: f64,
    #[arg(long, default_value_t = 27.0)]
    tx_gain: f64,
    #[arg(long, default_value_t = 27.0)]
    rx_gain: f64,
    #[arg(long, default_value_t = 73.5e9)]
    frequency: f64,
}

#[derive(Args)]
struct SimulateSounderArgs {
    /// Scene definition file.
    #[arg(long)]
    scene: PathBuf,
    /// Output sweep file.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Excess-delay span of each profile, chips.
    #[arg(long)]
    span_chips: Option<usize>,
}

#[derive(Args)]
struct SynthOmniArgs {
    /// Sweep file to reduce.
    #[arg(long)]
    input: PathBuf,
    /// Detection threshold above the noise floor, dB.
    #[arg(long, default_value_t = 5.0)]
    threshold: f64,
}

enum CliError {
    Usage(String),
    Tool(mmwprop::Error),
}

impl From<mmwprop::Error> for CliError {
    fn from(e: mmwprop::Error) -> Self {
        CliError::Tool(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Tool(mmwprop::Error::Io(_)) => 3,
            CliError::Tool(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => format!("usage error: {m}"),
            CliError::Tool(e) => format!("error: {e}"),
        }
    }
}

struct Table {
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(headers: &[&str]) -> Self {
        Self {
            headers: headers.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = self.headers.join(",");
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
                out
            }
            Format::Table => {
                let mut widths: Vec<usize> =
                    self.headers.iter().map(|h| h.len()).collect();
                for row in &self.rows {
                    for (i, cell) in row.iter().enumerate() {
                        widths[i] = widths[i].max(cell.len());
                    }
                }
                let mut out = String::new();
                let fmt_row = |cells: &[String], widths: &[usize]| -> String {
                    cells
                        .iter()
                        .enumerate()
                        .map(|(i, c)| format!("{:>w$}", c, w = widths[i]))
                        .collect::<Vec<_>>()
                        .join("  ")
                };
                out.push_str(&fmt_row(&self.headers, &widths));
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&fmt_row(row, &widths));
                    out.push('\n');
                }
                out
            }
        }
    }
}

/// Four significant figures for display; computations stay full precision.
fn sig4(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (3 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::FitFoliage(args) => fit_foliage(&cli, args),
        Command::RecoverGamma(args) => recover_gamma(&cli, args),
        Command::FresnelCurves(args) => fresnel_curves(&cli, args),
        Command::LinkBudget(args) => link_budget(&cli, args),
        Command::SimulateSounder(args) => simulate_sounder(&cli, args),
        Command::SynthOmni(args) => synth_omni(&cli, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn note(cli: &Cli, message: &str) {
    if !cli.quiet {
        eprintln!("note: {message}");
    }
}

fn fit_foliage(cli: &Cli, args: &FitFoliageArgs) -> Result<(), CliError> {
    let samples: Vec<(f64, f64)> = if args.paper {
        let tables = load_reference()?;
        tables.foliage_excess_samples(args.pol.into())
    } else {
        let path = args.input.as_ref().expect("clap enforces input");
        let text = std::fs::read_to_string(path).map_err(mmwprop::Error::Io)?;
        let mut samples = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() < 3 {
                return Err(mmwprop::Error::parse(
                    i + 1,
                    "expected `distance_m pl_fs_db pl_foliage_db`",
                )
                .into());
            }
            let parse = |s: &str| -> Result<f64, CliError> {
                s.parse()
                    .map_err(|_| mmwprop::Error::parse(i + 1, format!("bad number {s:?}")).into())
            };
            let (d, fs, fol) = (parse(cols[0])?, parse(cols[1])?, parse(cols[2])?);
            if let Some(col) = cols.get(3) {
                let pol: Polarization = col
                    .parse()
                    .map_err(|_| mmwprop::Error::parse(i + 1, format!("bad polarization {col:?}")))?;
                if pol != args.pol.into() {
                    continue;
                }
            }
            samples.push((d, fol - fs));
        }
        samples
    };

    let fit = fit_attenuation_from_excess(&samples)?;
    let mut table = Table::new(&["distance_m", "excess_db", "model_db", "residual_db"]);
    for (i, &(d, e)) in samples.iter().enumerate() {
        table.row(vec![
            sig4(d),
            sig4(e),
            sig4(fit.alpha_db_per_m * d),
            sig4(fit.residuals_db[i]),
        ]);
    }
    print!("{}", table.render(cli.format));
    println!();
    println!("alpha_db_per_m = {}", sig4(fit.alpha_db_per_m));
    println!("residual_rms_db = {}", sig4(fit.residual_rms_db()));
    if fit.negative_excess {
        note(cli, "some excess losses are negative (foliage below free space)");
    }
    Ok(())
}

fn recover_gamma(cli: &Cli, args: &RecoverGammaArgs) -> Result<(), CliError> {
    struct Input {
        d_i: f64,
        d_tot: f64,
        d_fol: f64,
        alpha: f64,
        pr_fs: f64,
        pr_fol: f64,
        pol: Polarization,
    }
    let mut inputs = Vec::new();
    if args.paper {
        let tables = load_reference()?;
        let alpha = tables.scenario.foliage_alpha_db_per_m;
        for pol in [Polarization::Vv, Polarization::Vh] {
            for row in &tables.bounce {
                if let Some((fs, fol)) = row.powers(pol) {
                    inputs.push(Input {
                        d_i: row.d_i_m,
                        d_tot: row.d_tot_m,
                        d_fol: row.d_foliage_m,
                        alpha,
                        pr_fs: fs,
                        pr_fol: fol,
                        pol,
                    });
                }
            }
        }
    } else {
        inputs.push(Input {
            d_i: args.d_i.expect("clap enforces d_i"),
            d_tot: args.d_tot.expect("clap enforces d_tot"),
            d_fol: args.d_fol.expect("clap enforces d_fol"),
            alpha: args.alpha,
            pr_fs: args.pr_fs.expect("clap enforces pr_fs"),
            pr_fol: args.pr_fol.expect("clap enforces pr_fol"),
            pol: args.pol.into(),
        });
    }
    if inputs.is_empty() {
        return Err(mmwprop::Error::Domain("no rows computable".into()).into());
    }

    let mut table = Table::new(&[
        "d_i_m",
        "pol",
        "incident_deg",
        "gamma_mag",
        "reflection_loss_db",
    ]);
    let mut flagged = false;
    for input in &inputs {
        let est = recover_reflection_coefficient(
            input.d_i,
            input.d_tot,
            input.d_fol,
            input.alpha,
            input.pr_fs,
            input.pr_fol,
            args.xpd_correction,
            input.pol,
        )?;
        flagged |= est.non_physical;
        table.row(vec![
            sig4(input.d_i),
            est.polarization.to_string(),
            sig4(est.incident_deg),
            sig4(est.gamma_mag),
            sig4(est.reflection_loss_db),
        ]);
    }
    print!("{}", table.render(cli.format));
    if flagged {
        note(cli, "some recovered magnitudes exceed 1 (non-physical inputs)");
    }
    Ok(())
}

fn parse_theta_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return Err(CliError::Usage(format!(
            "theta grid must be start:end[:step], got {spec:?}"
        )));
    }
    let num = |s: &str| -> Result<f64, CliError> {
        s.parse()
            .map_err(|_| CliError::Usage(format!("bad angle {s:?}")))
    };
    let start = num(parts[0])?;
    let end = num(parts[1])?;
    let step = if parts.len() == 3 { num(parts[2])? } else { 0.5 };
    if step <= 0.0 || end <= start || start < 0.0 || end > 90.0 {
        return Err(CliError::Usage(format!(
            "theta grid must satisfy 0 <= start < end <= 90 with positive step, got {spec:?}"
        )));
    }
    let mut grid = Vec::new();
    let mut k = 0usize;
    loop {
        let theta = start + k as f64 * step;
        if theta >= end || theta >= 90.0 {
            break;
        }
        grid.push(theta);
        k += 1;
    }
    if grid.is_empty() {
        return Err(CliError::Usage("theta grid is empty".into()));
    }
    Ok(grid)
}

fn fresnel_curves(cli: &Cli, args: &FresnelCurvesArgs) -> Result<(), CliError> {
    let mut materials = Vec::new();
    for part in args.eps.split(',') {
        let eps: f64 = part
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad permittivity {part:?}")))?;
        materials.push(GroundMaterial::new(eps)?);
    }
    let grid = parse_theta_grid(&args.theta)?;
    let points = fresnel_curve(&materials, &grid, args.formula.into())?;

    let mut table = Table::new(&["eps_r", "theta_deg", "gamma_mag"]);
    for p in &points {
        table.row(vec![
            format!("{}", p.relative_permittivity),
            format!("{}", p.incident_deg),
            format!("{:.6}", p.gamma_mag),
        ]);
    }
    print!("{}", table.render(cli.format));
    Ok(())
}

fn link_budget(cli: &Cli, args: &LinkBudgetArgs) -> Result<(), CliError> {
    let geom = LinkGeometry::new(args.tx_height, args.rx_height, args.distance)?;
    let material = GroundMaterial::new(args.eps)?;
    let link = LinkBudgetParams::new(args.tx_power, args.tx_gain, args.rx_gain, args.frequency)?;
    let canopy: Vec<CanopySpan> = match &args.canopy {
        None => Vec::new(),
        Some(spec) => {
            let mut spans = Vec::new();
            for part in spec.split(',') {
                let Some((a, b)) = part.trim().split_once(':') else {
                    return Err(CliError::Usage(format!(
                        "canopy span must be start:end, got {part:?}"
                    )));
                };
                let lo: f64 = a
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad canopy start {a:?}")))?;
                let hi: f64 = b
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad canopy end {b:?}")))?;
                spans.push(CanopySpan::new(lo, hi)?);
            }
            spans
        }
    };

    if is_near_field(args.distance) {
        note(cli, "distance below 1 m violates the far-field assumption");
    }

    let gb = geom.ground_bounce();
    let mut geo = Table::new(&["quantity", "value"]);
    geo.row(vec!["separation_m".into(), sig4(geom.separation_m)]);
    geo.row(vec!["d_tot_m".into(), sig4(gb.d_tot_m)]);
    geo.row(vec!["grazing_deg".into(), sig4(gb.grazing_deg)]);
    geo.row(vec!["incident_deg".into(), sig4(gb.incident_deg)]);
    geo.row(vec!["specular_x_m".into(), sig4(gb.specular_x_m)]);
    geo.row(vec!["downtilt_deg".into(), sig4(gb.tx_downtilt_deg)]);
    print!("{}", geo.render(cli.format));
    println!();

    let mut paths = Table::new(&[
        "path",
        "length_m",
        "friis_dbm",
        "foliage_db",
        "reflection_db",
        "received_dbm",
    ]);
    let d_fol_direct = canopy_path_length(&canopy, &geom, RayPath::Direct)?;
    let friis_direct = friis_received_power(&link, geom.separation_m)?;
    let foliage_direct = args.alpha * geom.separation_m;
    paths.row(vec![
        "direct".into(),
        sig4(geom.direct_path_m()),
        sig4(friis_direct),
        sig4(foliage_direct),
        "0".into(),
        sig4(friis_direct - foliage_direct),
    ]);

    let gamma = fresnel_parallel(&material, gb.incident_deg, args.formula.into())?.abs();
    if gamma > 0.0 {
        let d_fol_bounce = canopy_path_length(&canopy, &geom, RayPath::GroundBounce)?;
        let friis_bounce = friis_received_power(&link, gb.d_tot_m)?;
        let foliage_bounce = args.alpha * d_fol_bounce;
        let refl_db = -20.0 * gamma.log10();
        paths.row(vec![
            "ground_bounce".into(),
            sig4(gb.d_tot_m),
            sig4(friis_bounce),
            sig4(foliage_bounce),
            sig4(refl_db),
            sig4(friis_bounce - foliage_bounce - refl_db),
        ]);
    } else {
        note(cli, "reflection coefficient is zero; ground-bounce path omitted");
    }
    if d_fol_direct > 0.0 {
        note(
            cli,
            &format!(
                "canopy crosses the direct ray over {} m (rate model uses the full separation)",
                sig4(d_fol_direct)
            ),
        );
    }
    print!("{}", paths.render(cli.format));
    Ok(())
}

fn simulate_sounder(cli: &Cli, args: &SimulateSounderArgs) -> Result<(), CliError> {
    let scene = read_scene(&args.scene)?;
    let config = SounderConfig {
        rng_seed: args.seed,
        pdp_span_chips: args.span_chips,
        ..SounderConfig::default()
    };
    let set = synthesize_sweep(&scene.into_synthesis(), &config)?;
    sweepfile::write_file(&set, &args.out)?;
    note(
        cli,
        &format!(
            "wrote {} records to {}",
            set.records.len(),
            args.out.display()
        ),
    );
    Ok(())
}

fn synth_omni(cli: &Cli, args: &SynthOmniArgs) -> Result<(), CliError> {
    let set = match validate_sweep_file(&args.input)? {
        ParseOutcome::Valid(set) => set,
        ParseOutcome::Invalid(diags) => {
            for d in &diags {
                eprintln!("{}: {d}", args.input.display());
            }
            return Err(mmwprop::Error::InvalidData(format!(
                "{} format violations",
                diags.len()
            ))
            .into());
        }
    };
    let pr_omni = omni_received_power(&set, args.threshold)?;
    let pl = omni_path_loss(set.tx_power_dbm, pr_omni)?;
    if cli.format == Format::Csv {
        println!("metric,value");
        println!("pr_omni_dbm,{}", sig4(milliwatts_to_dbm(pr_omni)));
        println!("pl_omni_db,{}", sig4(pl));
    } else {
        println!("pr_omni_dbm = {}", sig4(milliwatts_to_dbm(pr_omni)));
        println!("pl_omni_db = {}", sig4(pl));
    }
    Ok(())
}
