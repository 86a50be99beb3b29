//! Steady states of weakly driven models whose undriven Liouvillian conserves
//! the excitation difference k = N_x − N_y of each coherence |x⟩⟨y|.
//!
//! Without the probe, L splits into independent blocks L_k. In the frame
//! rotating at ω_d every block only moves by a scalar shift,
//! L_k(ω_d) = B_k + i(ω_d − ω_ref)·k, so each B_k (k ≥ 1) is reduced once to
//! Hessenberg form B_k = Q H Q† and every probe frequency costs one O(s²)
//! Hessenberg factorization per block. The probe couples neighbouring blocks
//! and is handled by block Gauss–Seidel sweeps started from the undriven
//! state. Blocks with k < 0 are the adjoints of those with k > 0 and are
//! never formed.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::{Col, Conj, Mat, Par};
use log::warn;
use num_complex::Complex64 as C64;

use super::{liouvillian, steady_state, Collapse, SolveMethod, SteadyState};
use crate::error::{Error, Result};
use crate::hamiltonian::excitation_numbers;
use crate::opalg::{HilbertLayout, QuantumOperator};
use crate::units::Tolerances;

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);
const MAX_SWEEPS: usize = 400;
const SWEEP_TOLERANCE: f64 = 1e-13;

/// Nonzero entries of an operator grouped by column: `cols[j] = [(i, A_ij)]`.
#[derive(Debug, Clone)]
struct Columns {
    cols: Vec<Vec<(usize, C64)>>,
}

impl Columns {
    fn from_operator(op: &QuantumOperator) -> Self {
        let n = op.dim();
        let cols = (0..n)
            .map(|j| {
                (0..n)
                    .filter_map(|i| {
                        let v = op.get(i, j);
                        (v != ZERO).then_some((i, v))
                    })
                    .collect()
            })
            .collect();
        Self { cols }
    }

    fn rows(&self) -> Vec<Vec<(usize, C64)>> {
        let mut rows = vec![Vec::new(); self.cols.len()];
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                rows[i].push((j, v));
            }
        }
        rows
    }

    /// `out += alpha·A·x`.
    fn left_acc(&self, alpha: C64, x: &Mat<C64>, out: &mut Mat<C64>) {
        for (k, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                let f = alpha * v;
                for j in 0..x.ncols() {
                    out[(i, j)] += f * x[(k, j)];
                }
            }
        }
    }

    /// `out += alpha·x·A†`.
    fn right_adjoint_acc(&self, alpha: C64, x: &Mat<C64>, out: &mut Mat<C64>) {
        for (k, col) in self.cols.iter().enumerate() {
            for &(j, v) in col {
                let f = alpha * v.conj();
                for i in 0..x.nrows() {
                    out[(i, j)] += f * x[(i, k)];
                }
            }
        }
    }
}

/// B_k = Q·H·Q† with H upper Hessenberg, stored row-major.
#[derive(Debug, Clone)]
struct HessenbergBlock {
    size: usize,
    q: Mat<C64>,
    h_rows: Vec<C64>,
}

impl HessenbergBlock {
    fn reduce(mut b: Mat<C64>) -> Self {
        let n = b.nrows();
        let mut q = Mat::<C64>::identity(n, n);
        if n > 2 {
            let bs = faer::linalg::qr::no_pivoting::factor::recommended_block_size::<C64>(n - 1, n - 1);
            let mut hh = Mat::<C64>::zeros(bs, n - 1);
            let req = faer::linalg::evd::hessenberg::hessenberg_in_place_scratch::<C64>(n, bs, Par::Seq, Default::default())
                .or(faer::linalg::householder::apply_block_householder_sequence_on_the_right_in_place_scratch::<C64>(
                    n - 1,
                    bs,
                    n - 1,
                ));
            let mut mem = MemBuffer::new(req);
            faer::linalg::evd::hessenberg::hessenberg_in_place(
                b.as_mut(),
                hh.as_mut(),
                Par::Seq,
                MemStack::new(&mut mem),
                Default::default(),
            );
            faer::linalg::householder::apply_block_householder_sequence_on_the_right_in_place_with_conj(
                b.as_ref().submatrix(1, 0, n - 1, n - 1),
                hh.as_ref(),
                Conj::No,
                q.as_mut().submatrix_mut(1, 1, n - 1, n - 1),
                Par::Seq,
                MemStack::new(&mut mem),
            );
        }
        let mut h_rows = vec![ZERO; n * n];
        for i in 0..n {
            for j in i.saturating_sub(1)..n {
                h_rows[i * n + j] = b[(i, j)];
            }
        }
        Self { size: n, q, h_rows }
    }

    /// LU with adjacent-row pivoting of H + shift·I.
    fn factor(&self, shift: C64) -> Result<HessenbergLu> {
        let s = self.size;
        let mut u = self.h_rows.clone();
        for i in 0..s {
            u[i * s + i] += shift;
        }
        let mut mult = vec![ZERO; s.saturating_sub(1)];
        let mut swap = vec![false; s.saturating_sub(1)];
        for j in 0..s.saturating_sub(1) {
            let (top, rest) = u.split_at_mut((j + 1) * s);
            let r0 = &mut top[j * s..];
            let r1 = &mut rest[..s];
            if r1[j].norm_sqr() > r0[j].norm_sqr() {
                r0[j..].swap_with_slice(&mut r1[j..]);
                swap[j] = true;
            }
            if r0[j] == ZERO {
                return Err(Error::DegenerateSteadyState { residual: f64::INFINITY });
            }
            let m = r1[j] / r0[j];
            mult[j] = m;
            r1[j] = ZERO;
            for (a, &b) in r1[j + 1..].iter_mut().zip(&r0[j + 1..]) {
                *a -= m * b;
            }
        }
        if s > 0 && u[s * s - 1] == ZERO {
            return Err(Error::DegenerateSteadyState { residual: f64::INFINITY });
        }
        Ok(HessenbergLu { s, u, mult, swap })
    }
}

#[derive(Debug)]
struct HessenbergLu {
    s: usize,
    u: Vec<C64>,
    mult: Vec<C64>,
    swap: Vec<bool>,
}

impl HessenbergLu {
    fn solve_in_place(&self, y: &mut [C64]) {
        let s = self.s;
        for j in 0..s.saturating_sub(1) {
            if self.swap[j] {
                y.swap(j, j + 1);
            }
            y[j + 1] -= self.mult[j] * y[j];
        }
        for i in (0..s).rev() {
            let row = &self.u[i * s..(i + 1) * s];
            let mut acc = y[i];
            for (&a, &b) in row[i + 1..].iter().zip(&y[i + 1..]) {
                acc -= a * b;
            }
            y[i] = acc / row[i];
        }
    }
}

/// Per-block norms needed to evaluate ‖L‖_F at any probe frequency.
#[derive(Debug, Clone, Copy)]
struct BlockNorm {
    frobenius_sq: f64,
    imag_trace: f64,
    size: usize,
}

/// Excitation-sector steady-state solver for a fixed undriven model.
#[derive(Debug)]
pub struct SectorSolver {
    layout: HilbertLayout,
    dim: usize,
    reference_freq: f64,
    h0: QuantumOperator,
    drive_operator: QuantumOperator,
    collapses: Vec<Collapse>,
    k_eff: Columns,
    jumps: Vec<(f64, Columns)>,
    drive_cols: Vec<Vec<(usize, C64)>>,
    drive_rows: Vec<Vec<(usize, C64)>>,
    drive_norm_sq: f64,
    /// Coherences (x, y) of sector k ≥ 0.
    pairs: Vec<Vec<(usize, usize)>>,
    trace_row: usize,
    ground_lu: PartialPivLu<C64>,
    blocks: Vec<HessenbergBlock>,
    norms: Vec<BlockNorm>,
}

impl SectorSolver {
    /// Prepares the solver.
    ///
    /// `h0` is the undriven Hamiltonian in the frame rotating at
    /// `reference_freq` and must conserve the excitation number; every
    /// collapse operator must shift it by a fixed amount and
    /// `drive_operator` (typically a + a†) by ±1.
    pub fn new(
        h0: &QuantumOperator,
        collapses: &[Collapse],
        drive_operator: &QuantumOperator,
        reference_freq: f64,
    ) -> Result<Self> {
        let tol = Tolerances::default();
        h0.require_hermitian(tol.hermiticity)?;
        let layout = h0.layout().clone();
        let d = layout.total_dim();
        let n = excitation_numbers(&layout);

        let h_scale = h0.frobenius_norm().max(f64::MIN_POSITIVE);
        for i in 0..d {
            for j in 0..d {
                if n[i] != n[j] && h0.get(i, j).norm() > 1e-12 * h_scale {
                    return Err(Error::param("hamiltonian", "does not conserve the excitation number"));
                }
            }
        }
        let shift_of = |op: &QuantumOperator| -> Option<i64> {
            let mut shift = None;
            for i in 0..d {
                for j in 0..d {
                    if op.get(i, j) != ZERO {
                        let s = n[i] - n[j];
                        if *shift.get_or_insert(s) != s {
                            return None;
                        }
                    }
                }
            }
            Some(shift.unwrap_or(0))
        };
        for c in collapses {
            if c.operator.layout() != &layout {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: c.operator.dim(),
                });
            }
            if shift_of(&c.operator).is_none() {
                return Err(Error::param(c.name, "mixes different excitation-number changes"));
            }
        }
        for i in 0..d {
            for j in 0..d {
                if drive_operator.get(i, j) != ZERO && (n[i] - n[j]).abs() != 1 {
                    return Err(Error::param("drive_operator", "must change the excitation number by one"));
                }
            }
        }

        // K = H0 − (i/2)·Σ γ A†A
        let mut k_op = h0.clone();
        let mut jumps = Vec::new();
        for c in collapses.iter().filter(|c| c.rate > 0.0) {
            let m = &c.operator.adjoint() * &c.operator;
            k_op = &k_op - &m.scale(C64::new(0.0, 0.5 * c.rate));
            jumps.push((c.rate, Columns::from_operator(&c.operator)));
        }
        let k_eff = Columns::from_operator(&k_op);

        let kmax = (n.iter().max().unwrap() - n.iter().min().unwrap()) as usize;
        let mut pairs = vec![Vec::new(); kmax + 1];
        let mut slot = vec![usize::MAX; d * d];
        for y in 0..d {
            for x in 0..d {
                let k = n[x] - n[y];
                if k >= 0 {
                    let list = &mut pairs[k as usize];
                    slot[x + d * y] = list.len();
                    list.push((x, y));
                }
            }
        }

        let build_block = |k: usize| -> Mat<C64> {
            let list = &pairs[k];
            let s = list.len();
            let mut b = Mat::<C64>::zeros(s, s);
            for (c, &(x, y)) in list.iter().enumerate() {
                for &(xp, v) in &k_eff.cols[x] {
                    b[(slot[xp + d * y], c)] += -I * v;
                }
                for &(yp, v) in &k_eff.cols[y] {
                    b[(slot[x + d * yp], c)] += I * v.conj();
                }
                for (rate, a) in &jumps {
                    for &(xp, ax) in &a.cols[x] {
                        for &(yp, ay) in &a.cols[y] {
                            b[(slot[xp + d * yp], c)] += *rate * ax * ay.conj();
                        }
                    }
                }
            }
            b
        };
        let norm_of = |b: &Mat<C64>| BlockNorm {
            frobenius_sq: b.norm_l2().powi(2),
            imag_trace: (0..b.nrows()).map(|i| b[(i, i)].im).sum(),
            size: b.nrows(),
        };

        let mut b0 = build_block(0);
        let mut norms = vec![norm_of(&b0)];
        let trace_row = slot[0];
        for j in 0..b0.ncols() {
            b0[(trace_row, j)] = ZERO;
        }
        for x in 0..d {
            b0[(trace_row, slot[x + d * x])] = C64::new(1.0, 0.0);
        }
        let ground_lu = b0.partial_piv_lu();

        let mut blocks = Vec::with_capacity(kmax);
        for k in 1..=kmax {
            let b = build_block(k);
            norms.push(norm_of(&b));
            blocks.push(HessenbergBlock::reduce(b));
        }

        let drive = Columns::from_operator(drive_operator);
        let drive_rows = drive.rows();
        let drive_trace: C64 = (0..d).map(|i| drive_operator.get(i, i)).sum();
        let drive_norm_sq = 2.0 * d as f64 * drive_operator.frobenius_norm().powi(2) - 2.0 * drive_trace.norm_sqr();

        Ok(Self {
            layout,
            dim: d,
            reference_freq,
            h0: h0.clone(),
            drive_operator: drive_operator.clone(),
            collapses: collapses.to_vec(),
            k_eff,
            jumps,
            drive_cols: drive.cols,
            drive_rows,
            drive_norm_sq,
            pairs,
            trace_row,
            ground_lu,
            blocks,
            norms,
        })
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn reference_freq(&self) -> f64 {
        self.reference_freq
    }

    /// Sizes of the sectors k = 0, 1, ….
    pub fn sector_sizes(&self) -> Vec<usize> {
        self.pairs.iter().map(Vec::len).collect()
    }

    /// Drive-frame Hamiltonian at the given probe.
    pub fn hamiltonian(&self, drive_freq: f64, amplitude: f64) -> QuantumOperator {
        let n = excitation_numbers(&self.layout);
        let delta = drive_freq - self.reference_freq;
        let mut h = &self.h0 + &self.drive_operator.scale_real(amplitude);
        for (i, &ni) in n.iter().enumerate() {
            let v = h.get(i, i) - C64::new(delta * ni as f64, 0.0);
            h.set(i, i, v);
        }
        h
    }

    /// Steady state by assembling and factoring the full Liouvillian.
    pub fn dense_steady_state(&self, drive_freq: f64, amplitude: f64) -> Result<SteadyState> {
        let l = liouvillian(&self.hamiltonian(drive_freq, amplitude), &self.collapses)?;
        steady_state(&l)
    }

    /// Steady state at one probe frequency and amplitude (rad/s).
    ///
    /// Falls back to the dense solve if the sweeps stall or the residual
    /// misses the tolerance.
    pub fn solve(&self, drive_freq: f64, amplitude: f64) -> Result<SteadyState> {
        match self.solve_sectors(drive_freq, amplitude) {
            Ok(ss) => Ok(ss),
            Err(e) => {
                warn!("sector iteration failed ({e}); using the dense solver");
                self.dense_steady_state(drive_freq, amplitude)
            }
        }
    }

    /// Sector iteration only, without fallback.
    pub fn solve_sectors(&self, drive_freq: f64, amplitude: f64) -> Result<SteadyState> {
        let d = self.dim;
        let delta = drive_freq - self.reference_freq;
        let factors = self
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| b.factor(C64::new(0.0, delta * (i + 1) as f64)))
            .collect::<Result<Vec<_>>>()?;

        let mut rho = Mat::<C64>::zeros(d, d);
        let mut rhs0 = Col::<C64>::zeros(self.pairs[0].len());
        rhs0[self.trace_row] = C64::new(1.0, 0.0);
        let x0 = self.ground_lu.solve(&rhs0);
        for (idx, &(x, y)) in self.pairs[0].iter().enumerate() {
            rho[(x, y)] = x0[idx];
        }

        let mut sweeps = 0;
        if amplitude != 0.0 {
            let drive = I * amplitude;
            loop {
                sweeps += 1;
                let mut change = 0.0;
                let mut total = 0.0;
                for (k, list) in self.pairs.iter().enumerate() {
                    let mut rhs: Vec<C64> = list
                        .iter()
                        .map(|&(x, y)| {
                            let mut acc = ZERO;
                            for &(z, v) in &self.drive_rows[x] {
                                acc += v * rho[(z, y)];
                            }
                            for &(z, v) in &self.drive_cols[y] {
                                acc -= rho[(x, z)] * v;
                            }
                            drive * acc
                        })
                        .collect();
                    let sol: Vec<C64> = if k == 0 {
                        rhs[self.trace_row] = C64::new(1.0, 0.0);
                        let b = Col::<C64>::from_fn(rhs.len(), |i| rhs[i]);
                        let x = self.ground_lu.solve(&b);
                        (0..x.nrows()).map(|i| x[i]).collect()
                    } else {
                        let block = &self.blocks[k - 1];
                        let b = Col::<C64>::from_fn(rhs.len(), |i| rhs[i]);
                        let qb = block.q.adjoint() * &b;
                        let mut y: Vec<C64> = (0..qb.nrows()).map(|i| qb[i]).collect();
                        factors[k - 1].solve_in_place(&mut y);
                        let yc = Col::<C64>::from_fn(y.len(), |i| y[i]);
                        let x = &block.q * &yc;
                        (0..x.nrows()).map(|i| x[i]).collect()
                    };
                    for (idx, &(x, y)) in list.iter().enumerate() {
                        let v = sol[idx];
                        change += (v - rho[(x, y)]).norm_sqr();
                        total += v.norm_sqr();
                        rho[(x, y)] = v;
                        if k > 0 {
                            rho[(y, x)] = v.conj();
                        }
                    }
                }
                if change.sqrt() <= SWEEP_TOLERANCE * total.sqrt() {
                    break;
                }
                if sweeps >= MAX_SWEEPS || !change.is_finite() {
                    return Err(Error::SteadyStateNoConvergence {
                        iterations: sweeps,
                        change: (change / total).sqrt(),
                    });
                }
            }
        }

        let rho = QuantumOperator::new(rho, self.layout.clone())?.hermitian_part();
        let residual = self.residual(&rho, drive_freq, amplitude);
        let l_norm = self.liouvillian_norm(drive_freq, amplitude);
        let ss = SteadyState::new(rho, residual, l_norm, SolveMethod::Sectors { sweeps });
        if !(ss.relative_residual <= Tolerances::default().steady_state_residual) {
            return Err(Error::SteadyStateNoConvergence {
                iterations: sweeps,
                change: ss.relative_residual,
            });
        }
        Ok(ss)
    }

    /// ‖L(ρ)‖_F evaluated directly from the sparse operators.
    pub fn residual(&self, rho: &QuantumOperator, drive_freq: f64, amplitude: f64) -> f64 {
        let d = self.dim;
        let r = rho.matrix();
        let mut out = Mat::<C64>::zeros(d, d);
        self.k_eff.left_acc(-I, r, &mut out);
        self.k_eff.right_adjoint_acc(I, r, &mut out);
        for (rate, a) in &self.jumps {
            let mut tmp = Mat::<C64>::zeros(d, d);
            a.left_acc(C64::new(*rate, 0.0), r, &mut tmp);
            a.right_adjoint_acc(C64::new(1.0, 0.0), &tmp, &mut out);
        }
        let n = excitation_numbers(&self.layout);
        let delta = drive_freq - self.reference_freq;
        for y in 0..d {
            for x in 0..d {
                out[(x, y)] += I * delta * (n[x] - n[y]) as f64 * r[(x, y)];
                let mut acc = ZERO;
                for &(z, v) in &self.drive_rows[x] {
                    acc += v * r[(z, y)];
                }
                for &(z, v) in &self.drive_cols[y] {
                    acc -= r[(x, z)] * v;
                }
                out[(x, y)] += -I * amplitude * acc;
            }
        }
        out.norm_l2()
    }

    /// Exact ‖L‖_F of the full Liouvillian at the given probe.
    pub fn liouvillian_norm(&self, drive_freq: f64, amplitude: f64) -> f64 {
        let delta = drive_freq - self.reference_freq;
        let mut sum = amplitude * amplitude * self.drive_norm_sq;
        for (k, b) in self.norms.iter().enumerate() {
            let c = delta * k as f64;
            let block = b.frobenius_sq + 2.0 * c * b.imag_trace + c * c * b.size as f64;
            sum += if k == 0 { block } else { 2.0 * block };
        }
        sum.sqrt()
    }
}
