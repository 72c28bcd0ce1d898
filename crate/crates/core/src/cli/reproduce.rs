use clap::ValueEnum;

use super::fixtures;
use crate::duality::{
    alternate_dual_to_q_dual, canonical_dual, left_inverses_parametrization, riesz_dual_containment_check, QClass,
};
use crate::erasures::{
    local_error_vector, local_mse_optimal_system, local_worst_case_optimal_system, mse_optimal_dual,
    worst_case_optimal_dual, SolverConfig,
};
use crate::error::{Error, Result};
use crate::fusion::{BlockVector, FusionFrame};
use crate::io::InputSpec;
use crate::linalg::{frobenius_norm, hstack, re, real_columns, real_matrix, real_vector, span, Mat, RANK_TOL};
use crate::report::{ErrorTable, Report};
use crate::systems::{is_dual_system, ProjectiveRS, ReconstructionSystem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ExampleId {
    #[value(name = "6.1")]
    AlternateDual,
    #[value(name = "6.2a")]
    RieszSystem,
    #[value(name = "6.2b")]
    RieszReconstruction,
    #[value(name = "6.3a")]
    LeftInverses,
    #[value(name = "6.3b")]
    OptimalDuals,
    #[value(name = "6.3c")]
    LocalOptimal,
    #[value(name = "6.3d")]
    Reconstruction,
    #[value(name = "6.4")]
    WorstCaseSystem,
}

impl ExampleId {
    pub fn name(self) -> &'static str {
        match self {
            ExampleId::AlternateDual => "6.1",
            ExampleId::RieszSystem => "6.2a",
            ExampleId::RieszReconstruction => "6.2b",
            ExampleId::LeftInverses => "6.3a",
            ExampleId::OptimalDuals => "6.3b",
            ExampleId::LocalOptimal => "6.3c",
            ExampleId::Reconstruction => "6.3d",
            ExampleId::WorstCaseSystem => "6.4",
        }
    }
}

fn load(text: &str) -> Result<InputSpec> {
    InputSpec::from_json(text)
}

/// `[A_1 B_1^* | … | A_m B_m^*]`: a map out of the direct sum written on
/// ambient copies of each subspace.
fn ambient(w: &FusionFrame, a: &Mat) -> Mat {
    let parts: Vec<Mat> = w
        .offsets()
        .into_iter()
        .zip(w.subspaces())
        .map(|(o, s)| a.columns(o, s.dim()) * s.basis().adjoint())
        .collect();
    hstack(w.ambient_dim(), &parts.iter().collect::<Vec<_>>())
}

/// The two-plane fusion frame in three dimensions, with weights `(w1, w2)`.
fn planes(w1: f64, w2: f64) -> Result<FusionFrame> {
    load(fixtures::EXAMPLE_6_3)?.fusion_frame()?.with_weights(&[w1, w2])
}

pub fn reproduce(id: ExampleId, tol: f64) -> Result<Report> {
    let mut report = Report::new(format!("reproduce {}", id.name()), tol);
    match id {
        ExampleId::AlternateDual => alternate(&mut report, tol)?,
        ExampleId::RieszSystem => riesz_system(&mut report, tol)?,
        ExampleId::RieszReconstruction => riesz_reconstruction(&mut report, tol)?,
        ExampleId::LeftInverses => left_inverses(&mut report, tol)?,
        ExampleId::OptimalDuals => optimal_duals(&mut report, tol)?,
        ExampleId::LocalOptimal => local_optimal(&mut report, tol)?,
        ExampleId::Reconstruction => reconstruction(&mut report, tol)?,
        ExampleId::WorstCaseSystem => worst_case_system(&mut report, tol)?,
    }
    let fixture = match id {
        ExampleId::RieszSystem | ExampleId::RieszReconstruction => fixtures::EXAMPLE_6_2,
        ExampleId::WorstCaseSystem => fixtures::EXAMPLE_6_4,
        _ => fixtures::EXAMPLE_6_3,
    };
    Ok(report.with_input(fixture.as_bytes()))
}

fn alternate(report: &mut Report, tol: f64) -> Result<()> {
    let w = load(fixtures::EXAMPLE_6_3)?.fusion_frame()?;
    let v = w.clone();
    report.note(format!(
        "W with weights {:?}; alternate dual V = W with the same weights",
        w.weights()
    ));
    let d = w.ambient_dim();
    let s_inv = w.fusion_operator_inverse()?;
    let mut sum = -Mat::identity(d, d);
    for i in 0..w.len() {
        let c = w.weights()[i] * v.weights()[i];
        sum += v.subspace(i).projector() * &s_inv * w.subspace(i).projector() * re(c);
    }
    report.check_at_most("alternate dual reconstruction residual", frobenius_norm(&sum), tol);
    let pair = alternate_dual_to_q_dual(&w, &v, tol)?;
    report.check_at_most("duality residual", pair.residual, tol);
    report.q_class = Some(pair.q_class(tol));
    report.check_flag(
        "Q is component preserving",
        pair.q_class(tol) == QClass::ComponentPreserving,
    );
    for i in 0..w.len() {
        let expected = span(&(v.subspace(i).projector() * &s_inv * w.subspace(i).basis()), RANK_TOL);
        report.check_at_most(
            &format!("V~_{} = pi_V S^-1 W_{}", i + 1, i + 1),
            pair.dual.subspace(i).distance(&expected),
            1e-10,
        );
    }
    Ok(())
}

fn riesz_system(report: &mut Report, tol: f64) -> Result<()> {
    let spec = load(fixtures::EXAMPLE_6_2)?;
    let ws = spec.system()?.expect("fixture has local frames");
    let vs = spec.dual_system()?.expect("fixture has a dual system");
    let w = ws.fusion_frame();
    report.classification = Some(w.classify());
    report.check_flag("(W, 1) is a Riesz fusion basis", w.is_riesz());
    let pair = is_dual_system(&ws, &vs, f64::INFINITY)?;
    report.check_at_most("dual system residual", pair.residual, 1e-10);
    let class = pair.q_class(tol);
    report.q_class = Some(class);
    report.check_flag(
        "C_G C_F^* is block-diagonal but not component preserving",
        class == QClass::BlockDiagonal,
    );
    report.check_flag("dim V_i = 3", pair.dual.dims() == [3, 3]);
    report.check_flag("(V, 1) is not a Riesz fusion basis", !pair.dual.is_riesz());
    report.check_flag(
        "S^-1 W_i contained in V_i",
        riesz_dual_containment_check(w, &pair, 1e-8)?,
    );

    // ((x1, x2, 0, 0), (0, y2, y3, -y2)) ↦ ((x1, x2, 0, x2), (0, 0, y3, -2 y2))
    let (x1, x2, y2, y3) = (0.3, -1.1, 0.7, 2.0);
    let input = BlockVector {
        blocks: vec![
            w.subspace(0).basis().adjoint() * real_vector(&[x1, x2, 0.0, 0.0]),
            w.subspace(1).basis().adjoint() * real_vector(&[0.0, y2, y3, -y2]),
        ],
    };
    let out = BlockVector::from_flat(&(pair.q.matrix() * input.to_flat()), &pair.dual.dims())?;
    let got0 = pair.dual.subspace(0).basis() * &out.blocks[0];
    let got1 = pair.dual.subspace(1).basis() * &out.blocks[1];
    let deviation =
        (got0 - real_vector(&[x1, x2, 0.0, x2])).norm() + (got1 - real_vector(&[0.0, 0.0, y3, -2.0 * y2])).norm();
    report.check_at_most("C_G C_F^* acts as displayed", deviation, 1e-12);
    Ok(())
}

fn riesz_reconstruction(report: &mut Report, tol: f64) -> Result<()> {
    let h = 1.0 / 2f64.sqrt();
    let t1 = real_matrix(4, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    let t2 = real_matrix(4, 2, &[0.0, 0.0, 0.0, h, 1.0, 0.0, 0.0, -h]);
    reconstruction_common(report, vec![t1, t2], fixtures::EXAMPLE_6_2, tol)
}

fn reconstruction(report: &mut Report, tol: f64) -> Result<()> {
    let t1 = real_matrix(3, 2, &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
    let t2 = real_matrix(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    reconstruction_common(report, vec![t1, t2], fixtures::EXAMPLE_6_3, tol)?;
    report.note("existence of projective duals over C and their absence over R are not checked");
    Ok(())
}

fn reconstruction_common(report: &mut Report, ops: Vec<Mat>, fixture: &str, tol: f64) -> Result<()> {
    let w = load(fixture)?.fusion_frame()?;
    let projective = ProjectiveRS::new(ops.clone());
    report.check_flag("(T_1, T_2) is projective", projective.is_ok());
    if let Ok(p) = &projective {
        report.note(format!("projective weights: {:?}", p.weights()));
    }
    for (i, t) in ops.iter().enumerate() {
        report.check_at_most(
            &format!("range of T_{} equals W_{}", i + 1, i + 1),
            span(t, RANK_TOL).distance(w.subspace(i)),
            1e-12,
        );
    }
    let rs = ReconstructionSystem::new(ops)?;
    let dual = rs.canonical_dual()?;
    report.check_at_most(
        "canonical dual residual",
        crate::systems::reconstruction_dual_residual(&rs, &dual)?,
        tol,
    );
    let deviation = dual.projectivity().iter().map(|p| p.1).fold(0.0, f64::max);
    report.note(format!(
        "largest projectivity deviation of the canonical dual: {deviation:.6e}"
    ));
    report.check_flag(
        "canonical dual is not projective",
        matches!(dual.into_projective(), Err(Error::NotProjective { .. })),
    );
    Ok(())
}

fn left_inverses(report: &mut Report, tol: f64) -> Result<()> {
    for (w1, w2) in [(1.0, 1.0), (1.0, 2.0), (3.0, 0.5)] {
        let w = planes(w1, w2)?;
        let tag = format!("(w1, w2) = ({w1}, {w2})");
        let expected = Mat::from_diagonal(&real_vector(&[
            1.0 / (w2 * w2),
            1.0 / (w1 * w1),
            1.0 / (w1 * w1 + w2 * w2),
        ]));
        report.check_at_most(
            &format!("S^-1 diagonal, {tag}"),
            frobenius_norm(&(w.fusion_operator_inverse()? - expected)),
            1e-12,
        );

        let fam = left_inverses_parametrization(&w)?;
        report.check_flag(&format!("one free direction, {tag}"), fam.kernel_dim() == 1);
        // coordinates (x2, x3 | y1, y3); the free direction pairs x3 with y3
        let k = fam.kernel.column(0);
        report.check_at_most(
            &format!("r_i1 w1 + r_i2 w2 = 0, {tag}"),
            k[0].norm() + k[2].norm() + (k[1] * re(w1) + k[3] * re(w2)).norm(),
            1e-12,
        );

        let amb = ambient(&w, &fam.a0);
        let s = w1 * w1 + w2 * w2;
        let mut display = Mat::zeros(3, 6);
        display[(1, 1)] = re(1.0 / w1);
        display[(2, 2)] = re(w1 / s);
        display[(0, 3)] = re(1.0 / w2);
        display[(2, 5)] = re(w2 / s);
        report.check_at_most(
            &format!("S^-1 T acts as displayed, {tag}"),
            frobenius_norm(&(amb - display)),
            1e-12,
        );

        let pair = canonical_dual(&w, &[1.0, 1.0])?;
        let moved = pair
            .dual
            .subspaces()
            .iter()
            .zip(w.subspaces())
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max);
        report.check_at_most(&format!("S^-1 W_i = W_i, {tag}"), moved, 1e-10);
        report.check_flag(&format!("not Parseval, {tag}"), !w.classify().is_parseval);
    }
    report.q_class = Some(canonical_dual(&planes(1.0, 2.0)?, &[1.0, 1.0])?.q_class(tol));
    Ok(())
}

fn optimal_duals(report: &mut Report, tol: f64) -> Result<()> {
    let spec = load(fixtures::EXAMPLE_6_3)?;
    let w = spec.fusion_frame()?;
    let (w1, w2) = (w.weights()[0], w.weights()[1]);
    let v = spec.dual_weights().expect("fixture has dual weights").to_vec();
    report.note(format!("w = {:?}, v = {v:?}", w.weights()));

    let mse = mse_optimal_dual(&w, &v, 2)?;
    let moved = mse
        .optimal_dual
        .dual
        .subspaces()
        .iter()
        .zip(w.subspaces())
        .map(|(a, b)| a.distance(b))
        .fold(0.0, f64::max);
    report.check_at_most("S_D^-1 W = W", moved, 1e-10);
    let amb = ambient(&w, &mse.optimal_dual.left_inverse());
    let mut display = Mat::zeros(3, 6);
    display[(1, 1)] = re(1.0 / w1);
    display[(2, 2)] = re(0.5 / w1);
    display[(0, 3)] = re(1.0 / w2);
    display[(2, 5)] = re(0.5 / w2);
    report.check_at_most(
        "T_{W,v} Q_D halves the third coordinate",
        frobenius_norm(&(&amb - &display)),
        1e-12,
    );
    for level in &mse.levels {
        report
            .error_tables
            .push(ErrorTable::from_level("mse optimal dual", mse.p, level, tol));
    }
    report.certificates.extend(mse.certificate.iter().cloned());

    let worst = worst_case_optimal_dual(&w, &v, &SolverConfig::default())?;
    let amb = ambient(&w, &worst.optimal_dual.left_inverse());
    let entrywise = (&amb - &display).iter().map(|z| z.norm()).fold(0.0, f64::max);
    report.check_at_most("worst-case minimizer matches the unique A", entrywise, 1e-4);
    let moved = worst
        .optimal_dual
        .dual
        .subspaces()
        .iter()
        .zip(w.subspaces())
        .map(|(a, b)| a.distance(b))
        .fold(0.0, f64::max);
    report.check_at_most("worst-case dual has V_i = W_i", moved, 1e-6);
    report.q_class = Some(worst.optimal_dual.q_class(tol));
    for level in &worst.levels {
        report
            .error_tables
            .push(ErrorTable::from_level("worst-case optimal dual", worst.p, level, tol));
    }
    report.certificates.extend(worst.certificate.iter().cloned());
    report.solver = worst.solver.clone();
    Ok(())
}

fn local_optimal(report: &mut Report, tol: f64) -> Result<()> {
    let spec = load(fixtures::EXAMPLE_6_3)?;
    let ws = spec.system()?.expect("fixture has local frames");
    let v = spec.dual_weights().expect("fixture has dual weights").to_vec();
    let w = ws.weights().to_vec();
    report.note(format!("(w1, v1, w2, v2) = ({}, {}, {}, {})", w[0], v[0], w[1], v[1]));
    report.check_at_most(
        "S_F = diag(3/2, 3/2, 3)",
        frobenius_norm(&(ws.global_frame().frame_operator() - Mat::from_diagonal(&real_vector(&[1.5, 1.5, 3.0])))),
        1e-12,
    );

    let rep = local_mse_optimal_system(&ws, &v, 1)?;
    let vs = rep.optimal_system.as_ref().expect("local reports carry the system");
    let s3 = 3f64.sqrt() / 3.0;
    let listed = [
        real_columns(
            3,
            &[
                vec![0.0, 0.0, 1.0 / 3.0],
                vec![0.0, s3, -1.0 / 6.0],
                vec![0.0, -s3, -1.0 / 6.0],
            ],
        ),
        real_columns(
            3,
            &[
                vec![0.0, 0.0, 1.0 / 3.0],
                vec![s3, 0.0, -1.0 / 6.0],
                vec![-s3, 0.0, -1.0 / 6.0],
            ],
        ),
    ];
    for (i, (g, expected)) in vs.local_frames().iter().zip(listed).enumerate() {
        let scaled = expected * re(1.0 / (w[i] * v[i]));
        let worst = (g.vectors() - scaled).iter().map(|z| z.norm()).fold(0.0, f64::max);
        report.check_at_most(&format!("g_{}^l as listed", i + 1), worst, 1e-12);
    }
    let mse = mse_optimal_dual(ws.fusion_frame(), &v, 1)?;
    report.check_at_most(
        "C_Gc C_F^* = Q",
        frobenius_norm(&(rep.optimal_dual.left_inverse() - mse.optimal_dual.left_inverse())),
        1e-12,
    );
    if w[0] != w[1] {
        report.check_at_least(
            "T_{W,v} Q differs from the canonical reconstruction",
            rep.canonical_gap,
            1e-3,
        );
    }
    report.q_class = Some(rep.optimal_dual.q_class(tol));
    for level in &rep.levels {
        report
            .error_tables
            .push(ErrorTable::from_level("mse optimal dual system", rep.p, level, tol));
    }
    report.certificates.extend(rep.certificate.iter().cloned());
    Ok(())
}

fn worst_case_system(report: &mut Report, tol: f64) -> Result<()> {
    let spec = load(fixtures::EXAMPLE_6_4)?;
    let ws = spec.system()?.expect("fixture has local frames");
    let listed = spec.dual_system()?.expect("fixture has the listed dual system");
    let w = ws.fusion_frame();
    report.classification = Some(w.classify());
    let listed_pair = is_dual_system(&ws, &listed, f64::INFINITY)?;
    report.check_at_most("listed G is a dual system", listed_pair.residual, tol);

    let rep = local_worst_case_optimal_system(&ws, &[1.0, 1.0], &SolverConfig::default())?;
    let vs = rep.optimal_system.as_ref().expect("local reports carry the system");
    let s_inv = w.fusion_operator_inverse()?;
    let canonical_v: Vec<_> = w.subspaces().iter().map(|s| s.image(&s_inv, RANK_TOL)).collect();
    let v = vs.fusion_frame();
    report.check_at_most("V_1 = S^-1 W_1", v.subspace(0).distance(&canonical_v[0]), 1e-3);
    report.check_at_least(
        "V_2 differs from S^-1 W_2",
        v.subspace(1).distance(&canonical_v[1]),
        0.1,
    );
    report.check_at_most(
        "V_2 = span G_2",
        v.subspace(1).distance(listed.fusion_frame().subspace(1)),
        1e-3,
    );

    let phi = rep.levels[0].aggregate;
    let listed_phi = local_error_vector(&ws, &listed, 1)?
        .iter()
        .map(|e| e.1)
        .fold(0.0, f64::max);
    report.note(format!(
        "worst single-vector error: solver {phi:.12}, listed system {listed_phi:.12}"
    ));
    report.check_at_most(
        "worst-case error matches the listed system",
        (phi - listed_phi).abs(),
        1e-6,
    );
    report.q_class = Some(rep.optimal_dual.q_class(tol));
    for level in &rep.levels {
        report.error_tables.push(ErrorTable::from_level(
            "worst-case optimal dual system",
            rep.p,
            level,
            tol,
        ));
    }
    report.certificates.extend(rep.certificate.iter().cloned());
    report.solver = rep.solver.clone();
    Ok(())
}
