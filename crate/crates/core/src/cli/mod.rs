//! The `ff` command line front end.

mod reproduce;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::duality::{alternate_dual_to_q_dual, canonical_dual, is_q_dual, riesz_dual_containment_check, QDualPair};
use crate::erasures::{
    error_vector, local_error_vector, local_mse_optimal_system, local_worst_case_optimal_system, mse_optimal_dual,
    worst_case_optimal_dual, ErasureReport, PNorm, SolverConfig,
};
use crate::error::{Error, Result};
use crate::frames::dual_residual;
use crate::fusion::FusionFrame;
use crate::io::InputSpec;
use crate::report::{Bounds, ErrorTable, Report, EXIT_CERTIFICATION, EXIT_INPUT, EXIT_NONCONVERGENCE};
use crate::systems::{dual_system_iff_dual_frames, is_dual_system};

pub use reproduce::{reproduce, ExampleId};

/// Example inputs shipped with the binary, keyed by file name.
pub mod fixtures {
    pub const EXAMPLE_6_2: &str = include_str!("../../fixtures/example_6_2.json");
    pub const EXAMPLE_6_3: &str = include_str!("../../fixtures/example_6_3.json");
    pub const EXAMPLE_6_4: &str = include_str!("../../fixtures/example_6_4.json");
    pub const ORTHONORMAL_BASIS: &str = include_str!("../../fixtures/orthonormal_basis.json");
    pub const OFFDIAG_Q: &str = include_str!("../../fixtures/offdiag_q.json");

    pub const ALL: [(&str, &str); 5] = [
        ("example_6_2.json", EXAMPLE_6_2),
        ("example_6_3.json", EXAMPLE_6_3),
        ("example_6_4.json", EXAMPLE_6_4),
        ("orthonormal_basis.json", ORTHONORMAL_BASIS),
        ("offdiag_q.json", OFFDIAG_Q),
    ];
}

#[derive(Debug, Parser)]
#[command(
    name = "ff",
    version,
    about = "Fusion frames, their duals, and optimal duals under erasures"
)]
pub struct Cli {
    /// Tolerance for certification checks.
    #[arg(long, global = true, env = "FF_TOL", default_value_t = 1e-9)]
    pub tol: f64,

    /// Also write the machine-readable report to this file ("-" for stdout).
    #[arg(long, global = true, value_name = "OUT")]
    pub json: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a fusion frame and compute its bounds.
    Analyze { file: PathBuf },
    /// Build and certify the canonical dual.
    CanonicalDual {
        file: PathBuf,
        /// Dual weights, comma separated.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
    },
    /// Check the dual given in the input file.
    VerifyDual { file: PathBuf },
    /// Optimal dual under subspace erasures.
    Optimal(OptimalArgs),
    /// Optimal dual system under erasures of local frame vectors.
    LocalOptimal(OptimalArgs),
    /// Recompute one of the worked examples.
    Reproduce { id: ExampleId },
}

#[derive(Debug, Args)]
pub struct OptimalArgs {
    pub file: PathBuf,
    #[arg(long, value_enum)]
    pub p: PArg,
    /// Largest number of erasures reported.
    #[arg(long, default_value_t = 1)]
    pub r: usize,
    /// Dual weights, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub weights: Option<Vec<f64>>,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PArg {
    #[value(name = "2")]
    Two,
    Inf,
}

impl From<PArg> for PNorm {
    fn from(p: PArg) -> Self {
        match p {
            PArg::Two => PNorm::Two,
            PArg::Inf => PNorm::Inf,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = SolverConfig::default().max_iters)]
    pub max_iters: usize,
    #[arg(long, default_value_t = SolverConfig::default().step_scale)]
    pub step_scale: f64,
    /// Relative improvement threshold for convergence.
    #[arg(long, default_value_t = SolverConfig::default().tol)]
    pub solver_tol: f64,
    #[arg(long, default_value_t = SolverConfig::default().patience)]
    pub patience: usize,
    /// Skip the barrier-Newton refinement.
    #[arg(long)]
    pub no_polish: bool,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        SolverConfig {
            max_iters: self.max_iters,
            step_scale: self.step_scale,
            tol: self.solver_tol,
            patience: self.patience,
            polish: !self.no_polish,
        }
    }
}

/// Exit status for a failed command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::InvalidSpec(_) => EXIT_INPUT,
        Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        _ => EXIT_CERTIFICATION,
    }
}

fn load(path: &Path) -> Result<(InputSpec, Vec<u8>)> {
    let bytes = std::fs::read(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Ok((InputSpec::from_json(text)?, bytes))
}

pub fn run(cli: &Cli) -> Result<Report> {
    let tol = cli.tol;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidSpec(format!("tolerance {tol} must be a positive number")));
    }
    match &cli.command {
        Command::Analyze { file } => {
            let (spec, bytes) = load(file)?;
            analyze(&spec, tol).map(|r| r.with_input(&bytes))
        }
        Command::CanonicalDual { file, weights } => {
            let (spec, bytes) = load(file)?;
            canonical(&spec, weights.as_deref(), tol).map(|r| r.with_input(&bytes))
        }
        Command::VerifyDual { file } => {
            let (spec, bytes) = load(file)?;
            verify_dual(&spec, tol).map(|r| r.with_input(&bytes))
        }
        Command::Optimal(args) => {
            let (spec, bytes) = load(&args.file)?;
            optimal(&spec, args, tol).map(|r| r.with_input(&bytes))
        }
        Command::LocalOptimal(args) => {
            let (spec, bytes) = load(&args.file)?;
            local_optimal(&spec, args, tol).map(|r| r.with_input(&bytes))
        }
        Command::Reproduce { id } => reproduce(*id, tol),
    }
}

/// Parses the process arguments, runs the command, prints the reports and
/// returns the exit status.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.summary());
            if let Some(out) = &cli.json {
                let json = report.to_json();
                if out.as_os_str() == "-" {
                    print!("{json}");
                } else if let Err(e) = std::fs::write(out, json) {
                    eprintln!("error: cannot write {}: {e}", out.display());
                    return EXIT_INPUT;
                }
            }
            if let Some(c) = report.first_failure() {
                eprintln!("first failing certificate: {}", c.name);
            }
            report.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dual_weights(spec: &InputSpec, ff: &FusionFrame, explicit: Option<&[f64]>) -> Vec<f64> {
    explicit
        .or(spec.dual_weights())
        .map_or_else(|| ff.weights().to_vec(), <[f64]>::to_vec)
}

pub fn analyze(spec: &InputSpec, tol: f64) -> Result<Report> {
    let ff = spec.fusion_frame()?;
    let mut report = Report::new("analyze", tol);
    let class = ff.classify();
    if let Some((lower, upper)) = class.bounds {
        report.bounds = Some(Bounds { lower, upper, tol });
    } else {
        report.note(format!(
            "the subspaces span a space of dimension {} < {}",
            class.rank, class.ambient_dim
        ));
    }
    report.classification = Some(class);
    if let Some(ws) = spec.system()? {
        let frame = ws.weighted_frame();
        report.note(format!("local frame sizes: {:?}", ws.local_sizes()));
        if let Ok((a, b)) = frame.frame_bounds() {
            report.note(format!("frame bounds of the weighted local frames: [{a:.12}, {b:.12}]"));
        }
    }
    Ok(report)
}

fn push_pair(report: &mut Report, pair: &QDualPair, tol: f64) -> Result<()> {
    report.check_at_most("duality residual", pair.residual, tol);
    report.q_class = Some(pair.q_class(tol));
    report.note(format!("dual subspace dimensions: {:?}", pair.dual.dims()));
    let errors = error_vector(pair, 1)?;
    report
        .error_tables
        .push(ErrorTable::new("dual", PNorm::Two, 1, &errors, tol));
    Ok(())
}

pub fn canonical(spec: &InputSpec, weights: Option<&[f64]>, tol: f64) -> Result<Report> {
    let ff = spec.fusion_frame()?;
    let v = dual_weights(spec, &ff, weights);
    let pair = canonical_dual(&ff, &v)?;
    let mut report = Report::new("canonical-dual", tol);
    report.classification = Some(ff.classify());
    push_pair(&mut report, &pair, tol)?;
    let moved: Vec<String> = ff
        .subspaces()
        .iter()
        .zip(pair.dual.subspaces())
        .map(|(a, b)| format!("{:.3e}", a.distance(b)))
        .collect();
    report.note(format!("distance from W_i to S^-1 W_i: {}", moved.join(", ")));
    Ok(report)
}

pub fn verify_dual(spec: &InputSpec, tol: f64) -> Result<Report> {
    let ff = spec.fusion_frame()?;
    let dual = spec
        .dual
        .as_ref()
        .ok_or_else(|| Error::InvalidSpec("verify-dual needs a dual section".into()))?;
    let mut report = Report::new("verify-dual", tol);
    report.classification = Some(ff.classify());

    let pair = if dual.q_blocks.is_some() {
        let v = spec.dual_fusion_frame()?.expect("q_blocks come with dual subspaces");
        let q = spec.dual_q(&ff, &v)?.expect("checked above");
        report.note("dual given by subspaces and Q");
        is_q_dual(&ff, &v, &q, f64::INFINITY)?
    } else if let Some(vs) = spec.dual_system()? {
        let ws = spec
            .system()?
            .ok_or_else(|| Error::InvalidSpec("dual local frames need local frames".into()))?;
        report.note("dual given by local frames, Q = C_G C_F^*");
        let (frames, system) = dual_system_iff_dual_frames(&ws, &vs, tol)?;
        report.check_flag("dual frames iff dual systems", frames == system);
        report.note(format!(
            "weighted global frames dual residual: {:.3e}",
            dual_residual(&ws.weighted_frame(), &vs.weighted_frame())?
        ));
        is_dual_system(&ws, &vs, f64::INFINITY)?
    } else if let Some(v) = spec.dual_fusion_frame()? {
        report.note("dual given by subspaces only; checked as an alternate dual");
        match alternate_dual_to_q_dual(&ff, &v, tol) {
            Ok(pair) => pair,
            Err(Error::NotAlternateDual { residual, .. }) => {
                report.check_at_most("alternate dual residual", residual, tol);
                return Ok(report);
            }
            Err(e) => return Err(e),
        }
    } else {
        return Err(Error::InvalidSpec(
            "the dual section needs q_blocks, local_frames or subspaces".into(),
        ));
    };
    push_pair(&mut report, &pair, tol)?;
    if ff.is_riesz() && pair.q.is_block_diagonal(tol) {
        report.check_flag(
            "S^-1 W_i contained in V_i",
            riesz_dual_containment_check(&ff, &pair, 1e-8)?,
        );
    }
    Ok(report)
}

fn check_r(r: usize, max: usize) -> Result<()> {
    if r == 0 || r > max {
        return Err(Error::BadR { r, max });
    }
    Ok(())
}

fn erasure_report(report: &mut Report, rep: &ErasureReport, subject: &str) {
    let tol = rep.optimal_dual.tol;
    for level in &rep.levels {
        report
            .error_tables
            .push(ErrorTable::from_level(subject, rep.p, level, tol));
    }
    report.certificates.extend(rep.certificate.iter().cloned());
    report.solver = rep.solver.clone();
    report.q_class = Some(rep.optimal_dual.q_class(report.tol));
    report.note(format!("dual subspace dimensions: {:?}", rep.optimal_dual.dual.dims()));
    report.note(format!(
        "distance to the canonical reconstruction: {:.6e}",
        rep.canonical_gap
    ));
}

pub fn optimal(spec: &InputSpec, args: &OptimalArgs, tol: f64) -> Result<Report> {
    let ff = spec.fusion_frame()?;
    check_r(args.r, ff.len())?;
    let v = dual_weights(spec, &ff, args.weights.as_deref());
    let p = PNorm::from(args.p);
    let mut report = Report::new("optimal", tol);
    report.classification = Some(ff.classify());
    let rep = match p {
        PNorm::Two => mse_optimal_dual(&ff, &v, args.r)?,
        PNorm::Inf => worst_case_optimal_dual(&ff, &v, &args.solver.config())?,
    };
    report.check_at_most("duality residual within --tol", rep.optimal_dual.residual, tol);
    erasure_report(&mut report, &rep, "optimal dual");
    if p == PNorm::Inf && args.r > 1 {
        report.note("levels above r = 1 evaluate the single-erasure minimizer");
        for r in 2..=args.r {
            let errors = error_vector(&rep.optimal_dual, r)?;
            report
                .error_tables
                .push(ErrorTable::new("optimal dual", p, r, &errors, rep.optimal_dual.tol));
        }
    }
    Ok(report)
}

pub fn local_optimal(spec: &InputSpec, args: &OptimalArgs, tol: f64) -> Result<Report> {
    let ws = spec
        .system()?
        .ok_or_else(|| Error::InvalidSpec("local-optimal needs local_frames".into()))?;
    check_r(args.r, ws.total_vectors())?;
    let v = dual_weights(spec, ws.fusion_frame(), args.weights.as_deref());
    let p = PNorm::from(args.p);
    let mut report = Report::new("local-optimal", tol);
    report.classification = Some(ws.fusion_frame().classify());
    let rep = match p {
        PNorm::Two => local_mse_optimal_system(&ws, &v, args.r)?,
        PNorm::Inf => local_worst_case_optimal_system(&ws, &v, &args.solver.config())?,
    };
    report.check_at_most("duality residual within --tol", rep.optimal_dual.residual, tol);
    erasure_report(&mut report, &rep, "optimal dual system");
    let vs = rep
        .optimal_system
        .as_ref()
        .expect("local reports carry the dual system");
    for (i, g) in vs.local_frames().iter().enumerate() {
        for (l, col) in g.vectors().column_iter().enumerate() {
            let entries: Vec<String> = col.iter().map(|z| format_scalar(*z)).collect();
            report.note(format!("g_{}^{} = ({})", i + 1, l + 1, entries.join(", ")));
        }
    }
    if p == PNorm::Inf && args.r > 1 {
        report.note("levels above r = 1 evaluate the single-erasure minimizer");
        for r in 2..=args.r {
            let errors = local_error_vector(&ws, vs, r)?;
            report.error_tables.push(ErrorTable::new(
                "optimal dual system",
                p,
                r,
                &errors,
                rep.optimal_dual.tol,
            ));
        }
    }
    Ok(report)
}

fn format_scalar(z: crate::linalg::C64) -> String {
    if z.im == 0.0 {
        format!("{:.12}", z.re)
    } else {
        format!("{:.12}{:+.12}i", z.re, z.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::QClass;

    fn spec(text: &str) -> InputSpec {
        InputSpec::from_json(text).unwrap()
    }

    #[test]
    fn fixtures_parse() {
        for (name, text) in fixtures::ALL {
            InputSpec::from_json(text).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn analyze_example_6_3_is_overcomplete_with_diagonal_bounds() {
        let r = analyze(&spec(fixtures::EXAMPLE_6_3), 1e-9).unwrap();
        let c = r.classification.as_ref().unwrap();
        assert!(c.is_overcomplete);
        let b = r.bounds.as_ref().unwrap();
        assert!((b.lower - 1.0).abs() < 1e-12 && (b.upper - 5.0).abs() < 1e-12);
    }

    #[test]
    fn analyze_example_6_2_is_riesz() {
        let r = analyze(&spec(fixtures::EXAMPLE_6_2), 1e-9).unwrap();
        assert!(r.classification.unwrap().is_riesz);
    }

    #[test]
    fn orthonormal_basis_is_parseval() {
        let r = analyze(&spec(fixtures::ORTHONORMAL_BASIS), 1e-9).unwrap();
        let c = r.classification.unwrap();
        assert!(c.is_parseval && c.is_orthonormal_basis);
    }

    #[test]
    fn offdiagonal_q_verifies_as_general() {
        let r = verify_dual(&spec(fixtures::OFFDIAG_Q), 1e-9).unwrap();
        assert_eq!(r.exit_code(), 0);
        assert_eq!(r.q_class, Some(QClass::General));
    }

    #[test]
    fn example_6_2_dual_system_verifies() {
        let r = verify_dual(&spec(fixtures::EXAMPLE_6_2), 1e-10).unwrap();
        assert_eq!(r.exit_code(), 0, "{}", r.summary());
        assert_eq!(r.q_class, Some(QClass::BlockDiagonal));
    }

    #[test]
    fn broken_q_fails_certification() {
        let text = fixtures::OFFDIAG_Q.replacen("0.5", "0.6", 1);
        let r = verify_dual(&spec(&text), 1e-9).unwrap();
        assert_eq!(r.exit_code(), EXIT_CERTIFICATION);
        assert_eq!(r.first_failure().unwrap().name, "duality residual");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Parse("x".into())), 2);
        assert_eq!(
            exit_code(&Error::NonConvergence {
                iterations: 1,
                improvement: 1.0
            }),
            4
        );
        assert_eq!(exit_code(&Error::NotRiesz), 3);
    }
}
