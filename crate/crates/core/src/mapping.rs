//! Per-problem constant linear systems and their non-negative crossbar form.
//!
//! A crossbar cell can only hold a conductance in `[0, g_max]`, so a coefficient matrix `K`
//! with negative entries is rewritten before programming. For every column `j` that holds a
//! negative entry an auxiliary unknown `z_j` is added together with the row `x_j + z_j = 0`;
//! each negative `K[i][j]` is then moved to `(i, aux(j))` as `|K[i][j]|`. The augmented system
//! `M·[s; z] = [r; 0]` has `M ≥ 0` and the same `s` as `K·s = r`.

use crate::crossbar::CrossbarArray;
use crate::linalg::Matrix;
use crate::problems::{QcqpProblem, SocpProblem};
use crate::qcqp::{lift_constraints, ConeLift};
use crate::scalar::Scalar;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentKind {
    /// Recomputed every iteration.
    Varying,
    /// Fixed for the whole solve.
    Constant,
    /// Auxiliary rows; always zero.
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub len: usize,
    pub kind: SegmentKind,
}

/// Right-hand-side layout as contiguous segments.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RhsLayout {
    pub segments: Vec<Segment>,
}

impl RhsLayout {
    pub fn push(&mut self, len: usize, kind: SegmentKind) {
        if len == 0 {
            return;
        }
        let start = self.len();
        match self.segments.last_mut() {
            Some(last) if last.kind == kind => last.len += len,
            _ => self.segments.push(Segment { start, len, kind }),
        }
    }

    /// Layout from a per-row "constant" flag.
    pub fn from_constant_mask(mask: &[bool]) -> Self {
        let mut layout = Self::default();
        for &constant in mask {
            layout.push(1, if constant { SegmentKind::Constant } else { SegmentKind::Varying });
        }
        layout
    }

    /// Every row iteration-varying.
    pub fn varying(len: usize) -> Self {
        let mut layout = Self::default();
        layout.push(len, SegmentKind::Varying);
        layout
    }

    pub fn len(&self) -> usize {
        self.segments.last().map_or(0, |s| s.start + s.len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind_of(&self, row: usize) -> Option<SegmentKind> {
        self.segments.iter().find(|s| (s.start..s.start + s.len).contains(&row)).map(|s| s.kind)
    }
}

/// `[[I, Aᵀ], [A, 0]]` with layout `[u (varying, n); b (constant, m)]`.
pub fn build_socp_kkt<T: Scalar>(problem: &SocpProblem<T>) -> Result<(Matrix<T>, RhsLayout)> {
    problem.validate().into_result()?;
    let (n, m) = (problem.n, problem.m);
    let mut k = Matrix::zeros(n + m, n + m);
    for i in 0..n {
        k[(i, i)] = T::one();
    }
    for (i, j, v) in problem.a.triplets() {
        k[(n + i, j)] = v;
        k[(j, n + i)] = v;
    }
    let mut layout = RhsLayout::default();
    layout.push(n, SegmentKind::Varying);
    layout.push(m, SegmentKind::Constant);
    Ok((k, layout))
}

/// Non-negative augmented form of a square system.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedSystem<T> {
    matrix: Matrix<T>,
    beta: T,
    aux_map: Vec<usize>,
    rhs_layout: RhsLayout,
    n_core: usize,
}

/// Replaces every negative coefficient by an auxiliary column, one per affected column.
pub fn eliminate_negatives<T: Scalar>(k: &Matrix<T>, constant_rhs_mask: &[bool]) -> Result<AugmentedSystem<T>> {
    if !k.is_square() {
        return Err(Error::Dimension(format!("expected a square matrix, got {}x{}", k.rows(), k.cols())));
    }
    let n = k.rows();
    if constant_rhs_mask.len() != n {
        return Err(Error::Dimension(format!("rhs mask has {} rows, matrix has {n}", constant_rhs_mask.len())));
    }
    if !k.all_finite() {
        return Err(Error::Dimension("matrix has non-finite entries".into()));
    }
    let aux_map: Vec<usize> = (0..n).filter(|&j| (0..n).any(|i| k[(i, j)] < T::zero())).collect();
    let size = n + aux_map.len();
    let mut m = Matrix::zeros(size, size);
    for i in 0..n {
        for j in 0..n {
            let v = k[(i, j)];
            if v >= T::zero() {
                m[(i, j)] = v;
            }
        }
    }
    for (a, &j) in aux_map.iter().enumerate() {
        let col = n + a;
        for i in 0..n {
            let v = k[(i, j)];
            if v < T::zero() {
                m[(i, col)] = -v;
            }
        }
        m[(col, j)] = T::one();
        m[(col, col)] = T::one();
    }
    let beta = m.max_entry().unwrap_or_else(T::zero);
    let mut rhs_layout = RhsLayout::from_constant_mask(constant_rhs_mask);
    rhs_layout.push(aux_map.len(), SegmentKind::Zero);
    Ok(AugmentedSystem { matrix: m, beta, aux_map, rhs_layout, n_core: n })
}

impl<T: Scalar> AugmentedSystem<T> {
    /// The non-negative matrix `M`.
    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    /// `M / beta`, entries in `[0, 1]`. A zero matrix is returned unchanged.
    pub fn normalized(&self) -> Matrix<T> {
        if self.beta > T::zero() {
            let inv = T::one() / self.beta;
            self.matrix.map(|v| (v * inv).min(T::one()))
        } else {
            self.matrix.clone()
        }
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// Original column compensated by each auxiliary unknown, in auxiliary order.
    pub fn aux_map(&self) -> &[usize] {
        &self.aux_map
    }

    pub fn rhs_layout(&self) -> &RhsLayout {
        &self.rhs_layout
    }

    pub fn n_core(&self) -> usize {
        self.n_core
    }

    pub fn k_aux(&self) -> usize {
        self.aux_map.len()
    }

    pub fn size(&self) -> usize {
        self.n_core + self.aux_map.len()
    }

    /// Pads a core right-hand side with the zero auxiliary rows.
    pub fn extend_rhs(&self, core: &[T]) -> Vec<T> {
        let mut rhs = core.to_vec();
        rhs.resize(self.size(), T::zero());
        rhs
    }
}

/// Program-side readout: reverse-solves `array` with `V_out = rhs` and rescales the word-line
/// voltages by `g_max / (g_s·beta)`. Returns only the core unknowns.
pub fn crossbar_solve<T: Scalar>(system: &AugmentedSystem<T>, rhs: &[T], array: &CrossbarArray<T>) -> Result<Vec<T>> {
    if rhs.len() != system.size() || array.size() != system.size() {
        return Err(Error::Dimension(format!(
            "rhs length {} / array size {} do not match augmented size {}",
            rhs.len(),
            array.size(),
            system.size()
        )));
    }
    if let Some((row, &value)) = rhs.iter().enumerate().skip(system.n_core).find(|(_, v)| **v != T::zero()) {
        return Err(Error::Layout { row, value: value.as_f64() });
    }
    let v_in = array.reverse_solve(rhs)?;
    let params = array.params();
    let gain = params.g_max / (params.g_s * system.beta);
    Ok(v_in[..system.n_core].iter().map(|&v| v * gain).collect())
}

/// Per-iteration right-hand side of the QCQP normal equations.
#[derive(Clone, Debug)]
pub struct NormalRhs<T> {
    pub lift: ConeLift<T>,
    /// `Cᵢᵀ`, one `n×(n+1)` matrix per constraint.
    pub c_t: Vec<Matrix<T>>,
    /// `Aᵀ`, `n×m`.
    pub a_t: Matrix<T>,
    pub rho: T,
}

impl<T: Scalar> NormalRhs<T> {
    /// `ρ Σ Cᵢᵀ gᵢ + ρ Aᵀ h` with `gᵢ = zᵢ − dᵢ + uᵢ/ρ` and `h = b − v/ρ`.
    pub fn assemble(&self, z: &[Vec<T>], u: &[Vec<T>], v: &[T], b: &[T]) -> Vec<T> {
        let rho = self.rho;
        let inv = T::one() / rho;
        let h: Vec<T> = b.iter().zip(v).map(|(&bi, &vi)| bi - inv * vi).collect();
        let mut rhs = self.a_t.mul_vec(&h);
        for ((ct, d), (zi, ui)) in self.c_t.iter().zip(&self.lift.d).zip(z.iter().zip(u)) {
            let g: Vec<T> = zi.iter().zip(d).zip(ui).map(|((&zk, &dk), &uk)| zk - dk + inv * uk).collect();
            for (r, p) in rhs.iter_mut().zip(ct.mul_vec(&g)) {
                *r += p;
            }
        }
        rhs.iter_mut().for_each(|r| *r *= rho);
        rhs
    }
}

/// Left matrix `2P₀ + ρΣPᵢ + ρAᵀA` (using `CᵢᵀCᵢ = Pᵢ`) and the right-hand-side recipe.
pub fn build_qcqp_normal<T: Scalar>(problem: &QcqpProblem<T>, rho: T) -> Result<(Matrix<T>, NormalRhs<T>)> {
    problem.validate().into_result()?;
    if !(rho > T::zero()) {
        return Err(Error::InvalidConfig(format!("rho must be positive, got {rho}")));
    }
    let lift = lift_constraints(problem)?;
    let mut left = problem.p0.scale(T::lit(2.0));
    for con in &problem.constraints {
        left.add_scaled(rho, &con.p);
    }
    left.add_scaled(rho, &problem.a.gram());
    let c_t = lift.c.iter().map(Matrix::transpose).collect();
    let recipe = NormalRhs { lift, c_t, a_t: problem.a.transpose(), rho };
    Ok((left, recipe))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossbar::{program, DeviceParams, VariationModel};
    use crate::linalg::Lu;
    use crate::problems::QuadConstraint;

    fn socp(a: Matrix<f64>) -> SocpProblem<f64> {
        let (m, n) = (a.rows(), a.cols());
        SocpProblem::new(vec![0.0; n], a, vec![0.0; m])
    }

    #[test]
    fn kkt_block_placement() {
        let (k, layout) = build_socp_kkt(&socp(Matrix::from_f64_rows(&[[1.0, 0.0]]))).unwrap();
        assert_eq!(k, Matrix::from_f64_rows(&[[1.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]]));
        assert_eq!(layout.kind_of(1), Some(SegmentKind::Varying));
        assert_eq!(layout.kind_of(2), Some(SegmentKind::Constant));
        assert_eq!(layout.len(), 3);
    }

    #[test]
    fn kkt_with_zero_constraints() {
        let (k, _) = build_socp_kkt(&socp(Matrix::zeros(2, 3))).unwrap();
        let mut want = Matrix::zeros(5, 5);
        for i in 0..3 {
            want[(i, i)] = 1.0;
        }
        assert_eq!(k, want);
    }

    #[test]
    fn kkt_is_symmetric() {
        let p = crate::problems::generate_socp::<f64>(12, 6, 0.4, 3).unwrap();
        let (k, _) = build_socp_kkt(&p).unwrap();
        assert_eq!(k, k.transpose());
    }

    #[test]
    fn eliminate_single_negative() {
        let k = Matrix::from_f64_rows(&[[1.0, -2.0], [3.0, 4.0]]);
        let sys = eliminate_negatives(&k, &[false, false]).unwrap();
        assert_eq!(sys.matrix(), &Matrix::from_f64_rows(&[[1.0, 0.0, 2.0], [3.0, 4.0, 0.0], [0.0, 1.0, 1.0]]));
        assert_eq!(sys.aux_map(), &[1]);
        assert_eq!(sys.beta(), 4.0);
        assert_eq!(sys.rhs_layout().kind_of(2), Some(SegmentKind::Zero));

        let direct: Vec<f64> = Lu::factor(&k).unwrap().solve(&[1.0, 1.0]);
        let aug: Vec<f64> = Lu::factor(sys.matrix()).unwrap().solve(&[1.0, 1.0, 0.0]);
        for i in 0..2 {
            assert!((direct[i] - aug[i]).abs() < 1e-14);
        }
        assert!((aug[2] + aug[1]).abs() < 1e-14);
        assert!((direct[0] - 0.6).abs() < 1e-14 && (direct[1] + 0.2).abs() < 1e-14);
    }

    #[test]
    fn eliminate_nothing_when_nonnegative() {
        let k: Matrix<f64> = Matrix::from_f64_rows(&[[1.0, 2.0], [0.0, 4.0]]);
        let sys = eliminate_negatives(&k, &[true, false]).unwrap();
        assert_eq!(sys.matrix(), &k);
        assert_eq!(sys.k_aux(), 0);
    }

    #[test]
    fn negatives_in_one_column_share_an_auxiliary() {
        let k = Matrix::from_f64_rows(&[[-1.0, 0.0], [-2.0, 1.0]]);
        let sys = eliminate_negatives(&k, &[false, false]).unwrap();
        assert_eq!(sys.k_aux(), 1);
        let m = sys.matrix();
        assert_eq!((m[(0, 2)], m[(1, 2)]), (1.0, 2.0));
        assert_eq!(m.row(2), &[1.0, 0.0, 1.0]);
        let rhs = [0.5, -1.5];
        let direct: Vec<f64> = Lu::factor(&k).unwrap().solve(&rhs);
        let aug: Vec<f64> = Lu::factor(m).unwrap().solve(&sys.extend_rhs(&rhs));
        for i in 0..2 {
            assert!((direct[i] - aug[i]).abs() < 1e-14);
        }
        assert!((aug[2] + aug[0]).abs() < 1e-14);
    }

    #[test]
    fn eliminate_rejects_bad_shapes() {
        assert!(eliminate_negatives(&Matrix::<f64>::zeros(2, 3), &[false, false]).is_err());
        assert!(eliminate_negatives(&Matrix::<f64>::identity(2), &[false]).is_err());
    }

    fn ideal_array(sys: &AugmentedSystem<f64>, g_max: f64, g_s: f64) -> CrossbarArray<f64> {
        program(&sys.normalized(), DeviceParams { g_max, g_s, on_off_ratio: None }, VariationModel::ideal()).unwrap()
    }

    #[test]
    fn crossbar_scalar_solve() {
        let sys = eliminate_negatives(&Matrix::from_f64_rows(&[[2.0]]), &[false]).unwrap();
        let array = ideal_array(&sys, 1e-3, 1e-3);
        let s = crossbar_solve(&sys, &[4.0], &array).unwrap();
        assert!((s[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn crossbar_solve_matches_dense_and_is_scale_invariant() {
        let k = Matrix::from_f64_rows(&[[1.0, -2.0], [3.0, 4.0]]);
        let sys = eliminate_negatives(&k, &[false, false]).unwrap();
        let direct: Vec<f64> = Lu::factor(&k).unwrap().solve(&[1.0, 1.0]);
        for (g_max, g_s) in [(1e-3, 1e-3), (5e-5, 2e-2), (1.0, 1e-6)] {
            let array = ideal_array(&sys, g_max, g_s);
            let s = crossbar_solve(&sys, &sys.extend_rhs(&[1.0, 1.0]), &array).unwrap();
            for i in 0..2 {
                assert!((s[i] - direct[i]).abs() <= 1e-10 * direct[i].abs().max(1.0));
            }
        }
    }

    #[test]
    fn crossbar_solve_rejects_nonzero_aux_rhs() {
        let k = Matrix::from_f64_rows(&[[1.0, -2.0], [3.0, 4.0]]);
        let sys = eliminate_negatives(&k, &[false, false]).unwrap();
        let array = ideal_array(&sys, 1e-3, 1e-3);
        assert!(matches!(crossbar_solve(&sys, &[1.0, 1.0, 0.5], &array), Err(Error::Layout { row: 2, .. })));
        assert!(matches!(crossbar_solve(&sys, &[1.0, 1.0], &array), Err(Error::Dimension(_))));
    }

    fn hand_qcqp() -> QcqpProblem<f64> {
        QcqpProblem::new(
            Matrix::identity(2),
            vec![QuadConstraint { p: Matrix::identity(2), r: 4.0 }],
            Matrix::from_f64_rows(&[[1.0, 1.0]]),
            vec![2.0],
        )
    }

    #[test]
    fn qcqp_normal_matrix_hand_case() {
        let (left, recipe) = build_qcqp_normal(&hand_qcqp(), 1.0).unwrap();
        assert!((left.as_slice().iter().zip([4.0, 1.0, 1.0, 4.0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)) < 1e-12);
        assert_eq!(recipe.c_t.len(), 1);
        assert_eq!((recipe.c_t[0].rows(), recipe.c_t[0].cols()), (2, 3));
    }

    #[test]
    fn qcqp_normal_without_constraints() {
        let p0 = Matrix::from_f64_rows(&[[2.0, 0.5], [0.5, 1.0]]);
        let p = QcqpProblem::new(p0.clone(), vec![], Matrix::zeros(1, 2), vec![0.0]);
        let (left, _) = build_qcqp_normal(&p, 3.0).unwrap();
        assert_eq!(left, p0.scale(2.0));
    }

    #[test]
    fn qcqp_normal_rejects_bad_rho() {
        assert!(matches!(build_qcqp_normal(&hand_qcqp(), 0.0), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn qcqp_rhs_assembly_matches_formula() {
        let p = hand_qcqp();
        let (_, recipe) = build_qcqp_normal(&p, 2.0).unwrap();
        let z = vec![vec![0.1, -0.2, 1.5]];
        let u = vec![vec![0.4, 0.0, -1.0]];
        let v = vec![0.6];
        let rhs = recipe.assemble(&z, &u, &v, &p.b);
        // Explicit: ρ Cᵀ(z − d + u/ρ) + ρ Aᵀ(b − v/ρ).
        let c = &recipe.lift.c[0];
        let d = &recipe.lift.d[0];
        let g: Vec<f64> = (0..3).map(|k| z[0][k] - d[k] + u[0][k] / 2.0).collect();
        let h = p.b[0] - v[0] / 2.0;
        for j in 0..2 {
            let mut want = 2.0 * h * p.a[(0, j)];
            for k in 0..3 {
                want += 2.0 * c[(k, j)] * g[k];
            }
            assert!((rhs[j] - want).abs() < 1e-12);
        }
    }
}
