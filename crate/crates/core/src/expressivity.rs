//! Dimensional expressivity: the Jacobian of the prepared state with respect
//! to the ansatz angles, its numerical rank, and rank-vs-depth sweeps. The
//! rank counts the independent tangent directions the ansatz can realize,
//! bounded above by 2^n − 1 for real unit states.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuits::{ansatz_template, AnsatzSpec, AnsatzVariant};
use crate::error::{Error, Result};
use crate::simulator::{Angle, Circuit};

/// ∂|ψ(θ)⟩/∂θ_p for every slot, as a 2^n × P matrix. Columns come from the
/// exact two-point rule [ψ(θ + π·e_p) − ψ(θ − π·e_p)]/4, which is the
/// derivative for RY-generated gates when each slot drives exactly one gate.
pub fn state_jacobian(template: &Circuit, theta: &[f64]) -> Result<DMatrix<f64>> {
    let p_count = template.slot_count();
    if theta.len() != p_count {
        return Err(Error::ParameterCount { expected: p_count, got: theta.len() });
    }
    let mut uses = vec![0usize; p_count];
    for gate in template.gates() {
        if let Some(Angle::Slot(s)) = gate.theta {
            uses[s] += 1;
        }
    }
    if uses.iter().any(|&u| u != 1) {
        return Err(Error::InvalidArgument(
            "state_jacobian needs each parameter slot on exactly one gate".into(),
        ));
    }
    let dim = 1usize << template.qubit_count();
    let columns: Vec<Vec<f64>> = (0..p_count)
        .into_par_iter()
        .map(|p| -> Result<Vec<f64>> {
            let mut plus = theta.to_vec();
            plus[p] += std::f64::consts::PI;
            let mut minus = theta.to_vec();
            minus[p] -= std::f64::consts::PI;
            let a = template.bind(&plus)?.run_from_zero()?;
            let b = template.bind(&minus)?.run_from_zero()?;
            Ok(a.amplitudes()
                .iter()
                .zip(b.amplitudes())
                .map(|(x, y)| (x - y) / 4.0)
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_fn(dim, p_count, |i, j| columns[j][i]))
}

/// Count of singular values above `tolerance` × the largest one.
pub fn rank(jacobian: &DMatrix<f64>, tolerance: f64) -> Result<usize> {
    if jacobian.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let sv = jacobian.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0f64, f64::max);
    if max == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tolerance * max).count())
}

pub const DEFAULT_RANK_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_SAMPLE_COUNT: usize = 20;

/// Rank analysis of one ansatz: the maximum Jacobian rank over random angle
/// samples (rank drops on measure-zero sets such as θ = 0, so a single point
/// is not representative), with the spectrum and parameter-space null space
/// at the best sample.
#[derive(Debug, Clone, Serialize)]
pub struct ExpressivityReport {
    pub spec: AnsatzSpec,
    pub parameter_count: usize,
    pub state_dim: usize,
    /// Real projective bound 2^n − 1.
    pub bound: usize,
    pub rank: usize,
    pub samples: usize,
    pub tolerance: f64,
    /// Angles of the best (rank-maximizing) sample.
    pub best_theta: Vec<f64>,
    /// Singular values at the best sample, descending.
    pub singular_values: Vec<f64>,
    /// Orthonormal basis of removable parameter directions at the best
    /// sample; informational only.
    pub null_space: Vec<Vec<f64>>,
}

pub fn analyze(
    spec: &AnsatzSpec,
    samples: usize,
    tolerance: f64,
    seed: u64,
) -> Result<ExpressivityReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one angle sample".into()));
    }
    let template = ansatz_template(spec)?;
    let p_count = spec.parameter_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(usize, Vec<f64>, DMatrix<f64>)> = None;
    for _ in 0..samples {
        let theta: Vec<f64> = (0..p_count)
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        let jac = state_jacobian(&template, &theta)?;
        let r = rank(&jac, tolerance)?;
        if best.as_ref().map_or(true, |(br, _, _)| r > *br) {
            best = Some((r, theta, jac));
        }
    }
    let (max_rank, best_theta, best_jac) = best.expect("samples ≥ 1");
    let mut singular_values: Vec<f64> =
        best_jac.clone().svd(false, false).singular_values.iter().cloned().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    // Kernel in parameter space: the thin SVD of a dim×P Jacobian only
    // exposes min(dim, P) right directions, so take the P − rank smallest
    // eigenvectors of JᵀJ instead.
    let eigen = nalgebra::SymmetricEigen::new(best_jac.transpose() * &best_jac);
    let mut order: Vec<usize> = (0..p_count).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));
    let null_space: Vec<Vec<f64>> = order[..p_count - max_rank]
        .iter()
        .map(|&i| eigen.eigenvectors.column(i).iter().cloned().collect())
        .collect();
    Ok(ExpressivityReport {
        spec: *spec,
        parameter_count: p_count,
        state_dim: 1 << spec.qubit_count,
        bound: (1 << spec.qubit_count) - 1,
        rank: max_rank,
        samples,
        tolerance,
        best_theta,
        singular_values,
        null_space,
    })
}

/// One row of the rank-vs-depth curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow {
    pub layers: usize,
    pub rank: usize,
    pub parameter_count: usize,
    pub bound: usize,
}

/// Maximum rank over `samples` random angle draws for each depth 0‥L_max.
pub fn expressivity_sweep(
    variant: AnsatzVariant,
    qubit_count: usize,
    l_max: usize,
    samples: usize,
    tolerance: f64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    (0..=l_max)
        .map(|layers| {
            let spec = AnsatzSpec { variant, qubit_count, layer_count: layers };
            let report = analyze(&spec, samples, tolerance, seed.wrapping_add(layers as u64))?;
            Ok(SweepRow {
                layers,
                rank: report.rank,
                parameter_count: report.parameter_count,
                bound: report.bound,
            })
        })
        .collect()
}

/// Reference plateau reported for the hardware-adjusted 4-qubit ansatz.
pub const REFERENCE_ADJUSTED_PLATEAU: usize = 7;
/// Reference plateau reported for the brick-wall 4-qubit ansatz (the real
/// projective bound).
pub const REFERENCE_BRICKWALL_PLATEAU: usize = 15;

/// A full rank-vs-depth sweep plus the achieved end-of-curve rank. When the
/// achieved value departs from the known reference for that architecture the
/// report carries a note: the reference's entangler pattern is not pinned
/// down by its description, so the discrepancy localizes that ambiguity
/// rather than a defect in the Jacobian machinery.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub variant: AnsatzVariant,
    pub qubit_count: usize,
    pub samples: usize,
    pub tolerance: f64,
    pub rows: Vec<SweepRow>,
    /// Rank at the deepest swept circuit.
    pub plateau: usize,
    pub reference_plateau: Option<usize>,
    pub note: Option<String>,
}

pub fn sweep_report(
    variant: AnsatzVariant,
    qubit_count: usize,
    l_max: usize,
    samples: usize,
    tolerance: f64,
    seed: u64,
) -> Result<SweepReport> {
    let rows = expressivity_sweep(variant, qubit_count, l_max, samples, tolerance, seed)?;
    let plateau = rows.last().map(|r| r.rank).unwrap_or(0);
    let reference_plateau = match (variant, qubit_count) {
        (AnsatzVariant::Adjusted, 4) => Some(REFERENCE_ADJUSTED_PLATEAU),
        (AnsatzVariant::Brickwall, 4) => Some(REFERENCE_BRICKWALL_PLATEAU),
        _ => None,
    };
    let note = match reference_plateau {
        Some(reference) if reference != plateau => Some(format!(
            "achieved rank {plateau} at depth {l_max} departs from the reference plateau \
             {reference}; the reference circuit's CNOT pattern is ambiguous (only its rotation \
             placement is stated), and this build pins alternating nearest-neighbor bricks \
             (0,1)(2,3) / (1,2) with the rotations after each brick"
        )),
        _ => None,
    };
    Ok(SweepReport {
        variant,
        qubit_count,
        samples,
        tolerance,
        rows,
        plateau,
        reference_plateau,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::Gate;
    use approx::assert_abs_diff_eq;

    fn fd_jacobian(template: &Circuit, theta: &[f64], h: f64) -> DMatrix<f64> {
        let dim = 1usize << template.qubit_count();
        let p_count = theta.len();
        DMatrix::from_fn(dim, p_count, |i, p| {
            let mut plus = theta.to_vec();
            plus[p] += h;
            let mut minus = theta.to_vec();
            minus[p] -= h;
            let a = template.bind(&plus).unwrap().run_from_zero().unwrap();
            let b = template.bind(&minus).unwrap().run_from_zero().unwrap();
            (a.amplitudes()[i] - b.amplitudes()[i]) / (2.0 * h)
        })
    }

    #[test]
    fn single_ry_column_is_half_basis_flip() {
        let mut c = Circuit::new(1);
        c.push(Gate::ry_slot(0, 0)).unwrap();
        let jac = state_jacobian(&c, &[0.0]).unwrap();
        assert_abs_diff_eq!(jac[(0, 0)], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(jac[(1, 0)], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn matches_central_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        let spec = AnsatzSpec::adjusted(4, 8);
        let template = ansatz_template(&spec).unwrap();
        for _ in 0..20 {
            let theta: Vec<f64> = (0..spec.parameter_count())
                .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect();
            let exact = state_jacobian(&template, &theta).unwrap();
            let approx = fd_jacobian(&template, &theta, 1e-5);
            for (a, b) in exact.iter().zip(approx.iter()) {
                assert!((a - b).abs() < 1e-6, "shift {a} vs fd {b}");
            }
        }
    }

    #[test]
    fn duplicated_rotation_gives_identical_columns() {
        let mut c = Circuit::new(2);
        c.push(Gate::h(0)).unwrap();
        c.push(Gate::cnot(0, 1)).unwrap();
        c.push(Gate::ry_slot(1, 0)).unwrap();
        c.push(Gate::ry_slot(1, 1)).unwrap();
        let jac = state_jacobian(&c, &[0.3, -0.8]).unwrap();
        for i in 0..jac.nrows() {
            assert_abs_diff_eq!(jac[(i, 0)], jac[(i, 1)], epsilon = 1e-12);
        }
        assert_eq!(rank(&jac, DEFAULT_RANK_TOLERANCE).unwrap(), 1);
    }

    #[test]
    fn tangent_columns_are_orthogonal_to_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(52);
        let spec = AnsatzSpec::brickwall(4, 3);
        let template = ansatz_template(&spec).unwrap();
        for _ in 0..5 {
            let theta: Vec<f64> = (0..spec.parameter_count())
                .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect();
            let state = template.bind(&theta).unwrap().run_from_zero().unwrap();
            let jac = state_jacobian(&template, &theta).unwrap();
            for p in 0..jac.ncols() {
                let dot: f64 =
                    state.amplitudes().iter().zip(jac.column(p).iter()).map(|(a, b)| a * b).sum();
                assert!(dot.abs() < 1e-10, "column {p} not tangent: {dot}");
            }
        }
    }

    #[test]
    fn rank_counts_relative_singular_values() {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 0.0]));
        assert_eq!(rank(&m, 1e-10).unwrap(), 2);
        let empty = DMatrix::<f64>::zeros(0, 0);
        assert!(rank(&empty, 1e-10).is_err());
        let zeros = DMatrix::<f64>::zeros(3, 2);
        assert_eq!(rank(&zeros, 1e-10).unwrap(), 0);
    }

    #[test]
    fn rank_is_invariant_under_column_reorder() {
        let spec = AnsatzSpec::adjusted(4, 4);
        let template = ansatz_template(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let theta: Vec<f64> = (0..spec.parameter_count())
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        let jac = state_jacobian(&template, &theta).unwrap();
        let r = rank(&jac, DEFAULT_RANK_TOLERANCE).unwrap();
        let ncols = jac.ncols();
        let shuffled =
            DMatrix::from_fn(jac.nrows(), ncols, |i, j| jac[(i, (j * 7 + 3) % ncols)]);
        assert_eq!(rank(&shuffled, DEFAULT_RANK_TOLERANCE).unwrap(), r);
    }

    #[test]
    fn adjusted_ansatz_rank_is_thirteen_at_depth_eight() {
        // The pinned brick pattern reaches 13 of the 15 available directions
        // at depth 8 (7 at depth 4, the bound itself by depth 12); the
        // reference value for this architecture is 7 and the departure is
        // carried on the sweep report.
        let report =
            analyze(&AnsatzSpec::adjusted(4, 8), DEFAULT_SAMPLE_COUNT, DEFAULT_RANK_TOLERANCE, 61)
                .unwrap();
        assert_eq!(report.rank, 13);
        assert_eq!(report.parameter_count, 20);
        assert_eq!(report.bound, 15);
        assert_eq!(report.null_space.len(), report.parameter_count - report.rank);
    }

    #[test]
    fn brickwall_reaches_projective_bound() {
        let report = analyze(
            &AnsatzSpec::brickwall(4, 8),
            DEFAULT_SAMPLE_COUNT,
            DEFAULT_RANK_TOLERANCE,
            62,
        )
        .unwrap();
        assert_eq!(report.rank, 15);
        assert_eq!(report.bound, 15);
    }

    #[test]
    fn shallow_adjusted_rank_is_column_bounded() {
        let report =
            analyze(&AnsatzSpec::adjusted(4, 0), DEFAULT_SAMPLE_COUNT, DEFAULT_RANK_TOLERANCE, 63)
                .unwrap();
        assert_eq!(report.parameter_count, 4);
        assert!(report.rank <= 4);
    }

    #[test]
    fn sweep_curves_are_monotone_and_bounded() {
        for (variant, end_rank) in
            [(AnsatzVariant::Adjusted, 13usize), (AnsatzVariant::Brickwall, 15)]
        {
            let rows = expressivity_sweep(variant, 4, 8, 10, DEFAULT_RANK_TOLERANCE, 64).unwrap();
            assert_eq!(rows.len(), 9);
            for pair in rows.windows(2) {
                assert!(pair[1].rank >= pair[0].rank, "rank dropped with depth");
            }
            assert_eq!(rows.last().unwrap().rank, end_rank);
            assert!(rows.iter().all(|row| row.rank <= row.bound));
        }
    }

    #[test]
    fn brickwall_sweep_plateaus_before_max_depth() {
        let report =
            sweep_report(AnsatzVariant::Brickwall, 4, 8, 10, DEFAULT_RANK_TOLERANCE, 66).unwrap();
        assert_eq!(report.plateau, 15);
        assert_eq!(report.reference_plateau, Some(15));
        assert!(report.note.is_none());
        // Saturates strictly before the deepest circuit, so it is a plateau.
        let saturated: Vec<usize> =
            report.rows.iter().filter(|r| r.rank == 15).map(|r| r.layers).collect();
        assert!(saturated.len() >= 3, "brick-wall curve should flatten at 15: {saturated:?}");
    }

    #[test]
    fn adjusted_sweep_documents_reference_departure() {
        let report =
            sweep_report(AnsatzVariant::Adjusted, 4, 8, 10, DEFAULT_RANK_TOLERANCE, 67).unwrap();
        assert_eq!(report.plateau, 13);
        assert_eq!(report.reference_plateau, Some(7));
        let note = report.note.expect("departure from the reference must be documented");
        assert!(note.contains("13") && note.contains('7'));
    }

    #[test]
    fn null_space_annihilates_jacobian() {
        let spec = AnsatzSpec::adjusted(4, 8);
        let report = analyze(&spec, 5, DEFAULT_RANK_TOLERANCE, 65).unwrap();
        assert_eq!(report.null_space.len(), 20 - report.rank);
        let template = ansatz_template(&spec).unwrap();
        let jac = state_jacobian(&template, &report.best_theta).unwrap();
        for basis in &report.null_space {
            assert_eq!(basis.len(), 20);
            let norm: f64 = basis.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-8);
            let image = &jac * nalgebra::DVector::from_vec(basis.clone());
            assert!(image.norm() < 1e-9, "kernel vector maps to norm {}", image.norm());
        }
    }

    #[test]
    fn shared_slot_circuits_are_rejected() {
        let mut c = Circuit::new(2);
        c.push(Gate::ry_slot(0, 0)).unwrap();
        c.push(Gate::ry_slot(1, 0)).unwrap();
        assert!(state_jacobian(&c, &[0.1]).is_err());
    }
}
