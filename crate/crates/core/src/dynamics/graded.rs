//! Block propagation for models with a conserved charge.
//!
//! When the Hamiltonian commutes with a charge operator and every collapse
//! operator shifts that charge by a fixed amount, a state that starts
//! block-diagonal in the charge eigenbasis stays block-diagonal forever.
//! Storing and evolving only the blocks replaces one dim^2 matrix by a
//! family of much smaller ones, which is what makes large Fock truncations
//! affordable.

use num_complex::Complex;

use crate::algebra::density::EIG_FLOOR;
use crate::algebra::eig::{cholesky_psd_ok, min_eigenvalue};
use crate::algebra::{ComplexMatrix, DensityMatrix, SparseOperator, SubsystemLabel, SystemLayout};
use crate::dynamics::engine::{DENSE_CAP, EXACT_EIG_CHECK, HEALTH_CHECKPOINTS};
use crate::dynamics::spec::{EvolutionSpec, HealthReport, Observer, TimeSeries};
use crate::error::{CoreError, Result};
use crate::model::HamiltonianSet;
use crate::observables::{concurrence, transfer_fidelity};
use crate::scalar::{c_re, c_zero, real, Scalar};

/// Partition of the global basis by charge value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Grading {
    /// Charge of each global basis index.
    pub table: Vec<i64>,
    /// Distinct charge values, ascending; one block per value.
    pub charges: Vec<i64>,
    /// Global indices of each block, ascending.
    pub indices: Vec<Vec<u32>>,
    /// (block, local index) for each global index.
    pub slot: Vec<(u32, u32)>,
}

impl Grading {
    pub(crate) fn new(table: &[i64]) -> Self {
        let mut charges = table.to_vec();
        charges.sort_unstable();
        charges.dedup();
        let mut indices: Vec<Vec<u32>> = vec![Vec::new(); charges.len()];
        let mut slot = vec![(0u32, 0u32); table.len()];
        for (g, &q) in table.iter().enumerate() {
            let b = charges.binary_search(&q).expect("charge came from the table");
            slot[g] = (b as u32, indices[b].len() as u32);
            indices[b].push(g as u32);
        }
        Self { table: table.to_vec(), charges, indices, slot }
    }

    fn block_of_charge(&self, q: i64) -> Option<usize> {
        self.charges.binary_search(&q).ok()
    }
}

/// True when every matrix element connecting different charge values is
/// exactly zero. This is an exact test, not a tolerance test: states built
/// from charge eigenstates have hard zeros there.
pub(crate) fn is_block_diagonal<T: Scalar>(m: &ComplexMatrix<T>, table: &[i64]) -> bool {
    let n = table.len();
    if m.rows() != n || m.cols() != n {
        return false;
    }
    for r in 0..n {
        for c in 0..n {
            if table[r] != table[c] {
                let v = m[(r, c)];
                if v.re != T::zero() || v.im != T::zero() {
                    return false;
                }
            }
        }
    }
    true
}

/// Density matrix stored as one dense block per charge value.
#[derive(Clone, Debug)]
pub struct BlockDensity<T: Scalar> {
    layout: SystemLayout,
    grading: Grading,
    blocks: Vec<ComplexMatrix<T>>,
}

impl<T: Scalar> BlockDensity<T> {
    /// Every subsystem in its ground level, as a single one-entry block.
    pub fn all_ground(layout: SystemLayout, table: Vec<i64>) -> Result<Self> {
        check_table(&layout, &table)?;
        let grading = Grading::new(&table);
        let mut blocks = zero_blocks(&grading);
        let (b, l) = grading.slot[0];
        blocks[b as usize][(l as usize, l as usize)] = Complex::new(T::one(), T::zero());
        Ok(Self { layout, grading, blocks })
    }

    /// Pure state whose support lies in a single charge sector. Returns
    /// `Ok(None)` when the amplitudes straddle sectors; such states have
    /// no block form and must be propagated densely.
    pub fn from_pure_graded(
        layout: SystemLayout,
        table: Vec<i64>,
        amps: &[Complex<T>],
    ) -> Result<Option<Self>> {
        check_table(&layout, &table)?;
        if amps.len() != layout.total_dim() {
            return Err(CoreError::DimensionMismatch(format!(
                "{} amplitudes for dimension {}",
                amps.len(),
                layout.total_dim()
            )));
        }
        let mut norm_sq = T::zero();
        for a in amps {
            norm_sq += a.norm_sqr();
        }
        if (norm_sq - T::one()).abs() > real::<T>(1e-10) {
            return Err(CoreError::InvalidArgument(format!(
                "amplitudes have norm^2 {norm_sq:?}, expected 1"
            )));
        }
        let mut sector: Option<i64> = None;
        let mut support = Vec::new();
        for (g, a) in amps.iter().enumerate() {
            if a.re == T::zero() && a.im == T::zero() {
                continue;
            }
            match sector {
                None => sector = Some(table[g]),
                Some(q) if q != table[g] => return Ok(None),
                _ => {}
            }
            support.push(g);
        }
        let grading = Grading::new(&table);
        let mut blocks = zero_blocks(&grading);
        for &gi in &support {
            let (b, li) = grading.slot[gi];
            for &gj in &support {
                let (_, lj) = grading.slot[gj];
                blocks[b as usize][(li as usize, lj as usize)] =
                    amps[gi] * amps[gj].conj() / norm_sq;
            }
        }
        Ok(Some(Self { layout, grading, blocks }))
    }

    /// Splits a dense state along the grading. Fails when any off-block
    /// element is nonzero.
    pub fn from_density(rho: &DensityMatrix<T>, table: Vec<i64>) -> Result<Self> {
        check_table(rho.layout(), &table)?;
        if !is_block_diagonal(rho.matrix(), &table) {
            return Err(CoreError::InvalidArgument(
                "state has coherences across charge sectors".into(),
            ));
        }
        let grading = Grading::new(&table);
        let mut blocks = zero_blocks(&grading);
        let m = rho.matrix();
        for (r, &(br, lr)) in grading.slot.iter().enumerate() {
            for (c, &(bc, lc)) in grading.slot.iter().enumerate() {
                if br == bc {
                    blocks[br as usize][(lr as usize, lc as usize)] = m[(r, c)];
                }
            }
        }
        Ok(Self { layout: rho.layout().clone(), grading, blocks })
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.grading.table.len()
    }

    /// Charge of each global basis index.
    pub fn table(&self) -> &[i64] {
        &self.grading.table
    }

    /// Distinct charge values, one per block, ascending.
    pub fn block_charges(&self) -> &[i64] {
        &self.grading.charges
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.grading.indices.iter().map(Vec::len).collect()
    }

    pub fn trace(&self) -> T {
        let mut tr = T::zero();
        for block in &self.blocks {
            for k in 0..block.rows() {
                tr += block[(k, k)].re;
            }
        }
        tr
    }

    pub fn purity(&self) -> T {
        let mut p = T::zero();
        for block in &self.blocks {
            let f = block.frobenius_norm();
            p += f * f;
        }
        p
    }

    /// Scatters the blocks back into a full matrix. Refused above the
    /// dense cap, which is the whole reason the block form exists.
    pub fn to_dense(&self) -> Result<DensityMatrix<T>> {
        let dim = self.dim();
        if dim > DENSE_CAP {
            return Err(CoreError::InvalidArgument(format!(
                "dimension {dim} exceeds the dense cap {DENSE_CAP}"
            )));
        }
        let mut m = ComplexMatrix::zeros(dim, dim);
        for (b, idx) in self.grading.indices.iter().enumerate() {
            let block = &self.blocks[b];
            for (lr, &gr) in idx.iter().enumerate() {
                for (lc, &gc) in idx.iter().enumerate() {
                    m[(gr as usize, gc as usize)] = block[(lr, lc)];
                }
            }
        }
        Ok(DensityMatrix::new_unchecked(self.layout.clone(), m))
    }
}

fn check_table(layout: &SystemLayout, table: &[i64]) -> Result<()> {
    if table.len() != layout.total_dim() {
        return Err(CoreError::DimensionMismatch(format!(
            "charge table has {} entries for dimension {}",
            table.len(),
            layout.total_dim()
        )));
    }
    Ok(())
}

fn zero_blocks<T: Scalar>(grading: &Grading) -> Vec<ComplexMatrix<T>> {
    grading.indices.iter().map(|idx| ComplexMatrix::zeros(idx.len(), idx.len())).collect()
}

/// Stage buffers for the active sectors only; unreachable sectors get
/// zero-size placeholders since every access is gated on `active`.
fn stage_blocks<T: Scalar>(grading: &Grading, active: &[bool]) -> Vec<ComplexMatrix<T>> {
    grading
        .indices
        .iter()
        .zip(active)
        .map(|(idx, live)| {
            let n = if *live { idx.len() } else { 0 };
            ComplexMatrix::zeros(n, n)
        })
        .collect()
}

/// A global sparse operator restricted to the grading: per source block,
/// the local triplets mapping it into its (unique) target block.
struct LocalBlocks<T: Scalar> {
    per_source: Vec<Vec<(u32, u32, Complex<T>)>>,
    target_of: Vec<Option<u32>>,
}

fn localize<T: Scalar>(
    op: &SparseOperator<T>,
    grading: &Grading,
    shift: i64,
) -> Result<LocalBlocks<T>> {
    let nb = grading.indices.len();
    let mut per_source: Vec<Vec<(u32, u32, Complex<T>)>> = vec![Vec::new(); nb];
    let mut target_of: Vec<Option<u32>> = vec![None; nb];
    for (sb, &q) in grading.charges.iter().enumerate() {
        target_of[sb] = grading.block_of_charge(q + shift).map(|b| b as u32);
    }
    for &(r, c, v) in op.entries() {
        let (tb, tl) = grading.slot[r as usize];
        let (sb, sl) = grading.slot[c as usize];
        if target_of[sb as usize] != Some(tb) {
            return Err(CoreError::InvalidArgument(
                "operator entry violates its declared charge shift".into(),
            ));
        }
        per_source[sb as usize].push((tl, sl, v));
    }
    for list in &mut per_source {
        list.sort_unstable_by_key(|&(r, c, _)| (r, c));
    }
    Ok(LocalBlocks { per_source, target_of })
}

/// Occupation bookkeeping for one bosonic mode.
struct ModeInfo {
    dim: usize,
    /// Fock level of each local diagonal entry, per block.
    levels: Vec<Vec<u32>>,
}

/// Precomputed index plans for evaluating observers on blocks.
struct ObsPlan {
    /// Layout of the two-qubit reduction, in global part order.
    pair_layout: Option<SystemLayout>,
    /// Per block: (local row, local col, reduced row, reduced col).
    pair_gather: Option<Vec<Vec<(u32, u32, u8, u8)>>>,
    opt: Option<ModeInfo>,
    mw: Option<ModeInfo>,
}

fn mode_info(layout: &SystemLayout, grading: &Grading, label: SubsystemLabel) -> Option<ModeInfo> {
    let pos = layout.position(label)?;
    let dim = layout.dim_of(label).expect("position implies dim");
    let levels = grading
        .indices
        .iter()
        .map(|idx| idx.iter().map(|&g| layout.level_of(g as usize, pos) as u32).collect())
        .collect();
    Some(ModeInfo { dim, levels })
}

fn build_plan<T: Scalar>(
    layout: &SystemLayout,
    grading: &Grading,
    observers: &[Observer<T>],
) -> Result<ObsPlan> {
    let need_pair = observers
        .iter()
        .any(|o| matches!(o, Observer::Fidelity(_) | Observer::Concurrence));
    for o in observers {
        let missing = match o {
            Observer::NOpt => !layout.has(SubsystemLabel::Opt),
            Observer::NMw => !layout.has(SubsystemLabel::Mw),
            _ => false,
        };
        if missing {
            return Err(CoreError::Layout(format!(
                "observer {} needs a subsystem the layout lacks",
                o.name()
            )));
        }
    }

    let (pair_layout, pair_gather) = if need_pair {
        let qubit_parts: Vec<(SubsystemLabel, usize)> = layout
            .parts()
            .iter()
            .copied()
            .filter(|&(l, _)| matches!(l, SubsystemLabel::Nv | SubsystemLabel::Sc))
            .collect();
        if qubit_parts.len() != 2 || qubit_parts.iter().any(|&(_, d)| d != 2) {
            return Err(CoreError::Layout(
                "fidelity and concurrence need both two-level qubits present".into(),
            ));
        }
        let strides = layout.strides();
        let p1 = layout.position(qubit_parts[0].0).expect("part exists");
        let p2 = layout.position(qubit_parts[1].0).expect("part exists");
        let mut gather: Vec<Vec<(u32, u32, u8, u8)>> = Vec::with_capacity(grading.indices.len());
        for idx in &grading.indices {
            // key = global index with both qubit levels stripped; matching
            // keys share the same environment configuration
            let mut keyed: Vec<(usize, u32, u8)> = idx
                .iter()
                .enumerate()
                .map(|(local, &g)| {
                    let g = g as usize;
                    let l1 = layout.level_of(g, p1);
                    let l2 = layout.level_of(g, p2);
                    let key = g - l1 * strides[p1] - l2 * strides[p2];
                    (key, local as u32, (l1 * 2 + l2) as u8)
                })
                .collect();
            keyed.sort_unstable();
            let mut pairs = Vec::new();
            let mut start = 0;
            while start < keyed.len() {
                let mut end = start + 1;
                while end < keyed.len() && keyed[end].0 == keyed[start].0 {
                    end += 1;
                }
                for &(_, la, ta) in &keyed[start..end] {
                    for &(_, lb, tb) in &keyed[start..end] {
                        pairs.push((la, lb, ta, tb));
                    }
                }
                start = end;
            }
            gather.push(pairs);
        }
        let pair_layout = SystemLayout::new(qubit_parts)?;
        (Some(pair_layout), Some(gather))
    } else {
        (None, None)
    };

    Ok(ObsPlan {
        pair_layout,
        pair_gather,
        opt: mode_info(layout, grading, SubsystemLabel::Opt),
        mw: mode_info(layout, grading, SubsystemLabel::Mw),
    })
}

fn assemble_pair<T: Scalar>(
    blocks: &[ComplexMatrix<T>],
    active: &[bool],
    gather: &[Vec<(u32, u32, u8, u8)>],
    pair_layout: &SystemLayout,
) -> DensityMatrix<T> {
    let mut p = ComplexMatrix::zeros(4, 4);
    for (b, pairs) in gather.iter().enumerate() {
        if !active[b] {
            continue;
        }
        for &(l1, l2, t1, t2) in pairs {
            let v = blocks[b][(l1 as usize, l2 as usize)];
            p[(t1 as usize, t2 as usize)] += v;
        }
    }
    DensityMatrix::new_unchecked(pair_layout.clone(), p)
}

/// (mean occupation, population of the top Fock level)
fn mode_stats<T: Scalar>(
    blocks: &[ComplexMatrix<T>],
    active: &[bool],
    info: &ModeInfo,
) -> (T, T) {
    let top_level = (info.dim - 1) as u32;
    let mut mean = T::zero();
    let mut top = T::zero();
    for (b, block) in blocks.iter().enumerate() {
        if !active[b] {
            continue;
        }
        for (k, &lv) in info.levels[b].iter().enumerate() {
            let p = block[(k, k)].re;
            mean += real::<T>(lv as f64) * p;
            if lv == top_level {
                top += p;
            }
        }
    }
    (mean, top)
}

fn trace_blocks<T: Scalar>(blocks: &[ComplexMatrix<T>], active: &[bool]) -> T {
    let mut tr = T::zero();
    for (b, block) in blocks.iter().enumerate() {
        if !active[b] {
            continue;
        }
        for k in 0..block.rows() {
            tr += block[(k, k)].re;
        }
    }
    tr
}

fn purity_blocks<T: Scalar>(blocks: &[ComplexMatrix<T>], active: &[bool]) -> T {
    let mut p = T::zero();
    for (b, block) in blocks.iter().enumerate() {
        if !active[b] {
            continue;
        }
        let f = block.frobenius_norm();
        p += f * f;
    }
    p
}

/// One Lindblad right-hand side over the blocks.
///
/// Uses the effective-Hamiltonian split: with Heff = H - (i/2) sum r o'o,
/// the full generator is -i(Heff rho - rho Heff') plus the jump terms
/// r (o rho o'). The anticommutator part never leaves a block; each jump
/// maps a whole block into the block shifted by its charge.
fn rhs_blocks<T: Scalar>(
    heff: &LocalBlocks<T>,
    jumps: &[(LocalBlocks<T>, T)],
    dims: &[usize],
    active: &[bool],
    rho: &[ComplexMatrix<T>],
    scratch: &mut [Complex<T>],
    out: &mut [ComplexMatrix<T>],
) {
    let minus_i = Complex::new(T::zero(), -T::one());
    for b in 0..rho.len() {
        if !active[b] {
            continue;
        }
        let n = dims[b];
        let a = &mut scratch[..n * n];
        a.fill(c_zero());
        for &(r, c, v) in &heff.per_source[b] {
            let src = rho[b].row(c as usize);
            let dst = &mut a[r as usize * n..r as usize * n + n];
            for j in 0..n {
                dst[j] += v * src[j];
            }
        }
        // -i (A - A'), written entrywise so the result is exactly Hermitian
        let ob = &mut out[b];
        for r in 0..n {
            for c in 0..n {
                let diff = a[r * n + c] - a[c * n + r].conj();
                ob[(r, c)] = minus_i * diff;
            }
        }
    }
    for (loc, rate) in jumps {
        let rate_c = c_re(*rate);
        for sb in 0..rho.len() {
            if !active[sb] {
                continue;
            }
            let entries = &loc.per_source[sb];
            if entries.is_empty() {
                continue;
            }
            let tb = loc.target_of[sb].expect("entries imply a target") as usize;
            let sn = dims[sb];
            let tn = dims[tb];
            let tmp = &mut scratch[..tn * sn];
            tmp.fill(c_zero());
            for &(r, c, v) in entries {
                let src = rho[sb].row(c as usize);
                let dst = &mut tmp[r as usize * sn..r as usize * sn + sn];
                for j in 0..sn {
                    dst[j] += v * src[j];
                }
            }
            let ot = &mut out[tb];
            for &(jrow, k, v) in entries {
                let w = v.conj() * rate_c;
                for r in 0..tn {
                    ot[(r, jrow as usize)] += w * tmp[r * sn + k as usize];
                }
            }
        }
    }
}

fn copy_blocks<T: Scalar>(dst: &mut [ComplexMatrix<T>], src: &[ComplexMatrix<T>], active: &[bool]) {
    for b in 0..dst.len() {
        if active[b] {
            dst[b].copy_from(&src[b]);
        }
    }
}

fn axpy_blocks<T: Scalar>(
    dst: &mut [ComplexMatrix<T>],
    k: Complex<T>,
    src: &[ComplexMatrix<T>],
    active: &[bool],
) {
    for b in 0..dst.len() {
        if active[b] {
            dst[b].axpy(k, &src[b]);
        }
    }
}

/// Splits a dense block-diagonal state and propagates it blockwise.
pub fn propagate_rk4_graded<T: Scalar>(
    rho0: &DensityMatrix<T>,
    h: &HamiltonianSet<T>,
    spec: &EvolutionSpec<T>,
    observers: &[Observer<T>],
) -> Result<TimeSeries<T>> {
    let table = h
        .charges
        .clone()
        .ok_or_else(|| CoreError::InvalidArgument("model carries no conserved charge".into()))?;
    let state = BlockDensity::from_density(rho0, table)?;
    propagate_blocks(state, h, spec, observers)
}

/// Propagates a block state with the same stepping, sampling, and health
/// bookkeeping as the dense backend.
pub fn propagate_blocks<T: Scalar>(
    mut state: BlockDensity<T>,
    h: &HamiltonianSet<T>,
    spec: &EvolutionSpec<T>,
    observers: &[Observer<T>],
) -> Result<TimeSeries<T>> {
    spec.validate()?;
    let table = h
        .charges
        .as_ref()
        .ok_or_else(|| CoreError::InvalidArgument("model carries no conserved charge".into()))?;
    if state.layout != h.layout {
        return Err(CoreError::Layout("state and model layouts disagree".into()));
    }
    if &state.grading.table != table {
        return Err(CoreError::InvalidArgument(
            "state grading differs from the model grading".into(),
        ));
    }

    let grading = state.grading.clone();
    let nb = grading.indices.len();
    let dims: Vec<usize> = grading.indices.iter().map(Vec::len).collect();
    let max_dim = *dims.iter().max().expect("layouts are nonempty");

    // Heff = H - (i/2) sum rate o'o; zero-rate channels contribute nothing
    let half = real::<T>(0.5);
    let mut heff_global = h.hamiltonian.clone();
    let mut jump_ops = Vec::new();
    for (op, rate) in &h.collapse_ops {
        if *rate == T::zero() {
            continue;
        }
        let osq = op.adjoint().mul(op);
        heff_global = heff_global.add(&osq.scaled(Complex::new(T::zero(), -*rate * half)));
        let shift = op.charge_shift(table).expect("validated at construction");
        jump_ops.push((op, *rate, shift));
    }
    let heff = localize(&heff_global, &grading, 0)?;
    let mut jumps = Vec::with_capacity(jump_ops.len());
    for (op, rate, shift) in jump_ops {
        jumps.push((localize(op, &grading, shift)?, rate));
    }

    // blocks never reached from the initial support stay exactly zero and
    // are skipped everywhere
    let mut active = vec![false; nb];
    for (b, block) in state.blocks.iter().enumerate() {
        if block.max_abs() > T::zero() {
            active[b] = true;
        }
    }
    loop {
        let mut grew = false;
        for (loc, _) in &jumps {
            for sb in 0..nb {
                if !active[sb] || loc.per_source[sb].is_empty() {
                    continue;
                }
                let tb = loc.target_of[sb].expect("entries imply a target") as usize;
                if !active[tb] {
                    active[tb] = true;
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    let active = active;

    let plan = build_plan(&h.layout, &grading, observers)?;

    let (n_steps, remainder) = spec.step_plan();
    let planned_samples = n_steps / spec.record_stride + 2;
    let health_stride = (planned_samples / HEALTH_CHECKPOINTS).max(1);

    let mut k1 = stage_blocks::<T>(&grading, &active);
    let mut k2 = stage_blocks::<T>(&grading, &active);
    let mut k3 = stage_blocks::<T>(&grading, &active);
    let mut k4 = stage_blocks::<T>(&grading, &active);
    let mut stage = stage_blocks::<T>(&grading, &active);
    let mut scratch = vec![c_zero::<T>(); max_dim * max_dim];

    let mut series = TimeSeries::new(observers.iter().map(|o| o.name()).collect());
    let mut health = HealthReport::default();
    let mut row = vec![T::zero(); observers.len()];
    let mut sample_idx = 0usize;

    let sample = |blocks: &[ComplexMatrix<T>],
                      t: T,
                      sample_idx: &mut usize,
                      series: &mut TimeSeries<T>,
                      health: &mut HealthReport<T>,
                      row: &mut [T],
                      is_final: bool|
     -> Result<()> {
        let opt_stats = plan.opt.as_ref().map(|info| mode_stats(blocks, &active, info));
        let mw_stats = plan.mw.as_ref().map(|info| mode_stats(blocks, &active, info));
        let labeled = [(SubsystemLabel::Opt, &opt_stats), (SubsystemLabel::Mw, &mw_stats)];
        for (label, stats) in labeled {
            let Some(&(_, top)) = stats.as_ref() else { continue };
            if top > health.top_fock_max {
                health.top_fock_max = top;
            }
            match health.top_fock_modes.iter_mut().find(|(l, _)| *l == label) {
                Some(slot) if top > slot.1 => slot.1 = top,
                Some(_) => {}
                None => health.top_fock_modes.push((label, top)),
            }
        }
        let pair = plan.pair_gather.as_ref().map(|gather| {
            let layout = plan.pair_layout.as_ref().expect("built together");
            assemble_pair(blocks, &active, gather, layout)
        });
        for (slot, obs) in row.iter_mut().zip(observers) {
            *slot = match obs {
                Observer::Fidelity(target) => {
                    transfer_fidelity(pair.as_ref().expect("plan built for it"), target)?
                }
                Observer::Concurrence => concurrence(pair.as_ref().expect("plan built for it"))?,
                Observer::NOpt => opt_stats.expect("plan checked the layout").0,
                Observer::NMw => mw_stats.expect("plan checked the layout").0,
                Observer::Trace => trace_blocks(blocks, &active),
                Observer::Purity => purity_blocks(blocks, &active),
                Observer::NvLevel(_) => {
                    return Err(CoreError::InvalidArgument(
                        "the graded models carry a two-level NV; level populations \
                         apply to the three-level study only"
                            .into(),
                    ))
                }
            };
        }
        series.push_row(t, row);
        if *sample_idx % health_stride == 0 || is_final {
            for (b, block) in blocks.iter().enumerate() {
                if !active[b] {
                    continue;
                }
                if dims[b] <= EXACT_EIG_CHECK {
                    let me = min_eigenvalue(block)?;
                    health.min_eigenvalue = Some(match health.min_eigenvalue {
                        Some(prev) if prev < me => prev,
                        _ => me,
                    });
                    if me < real::<T>(EIG_FLOOR) {
                        health.positivity_certified = false;
                    }
                } else if !cholesky_psd_ok(block, real::<T>(-EIG_FLOOR)) {
                    health.positivity_certified = false;
                }
            }
        }
        *sample_idx += 1;
        Ok(())
    };

    sample(&state.blocks, T::zero(), &mut sample_idx, &mut series, &mut health, &mut row, false)?;

    let sixth = T::one() / real::<T>(6.0);
    let third = T::one() / real::<T>(3.0);
    let total_steps = n_steps + usize::from(remainder.is_some());

    for step in 0..total_steps {
        let dt = match remainder {
            Some(rem) if step == n_steps => rem,
            _ => spec.dt,
        };

        rhs_blocks(&heff, &jumps, &dims, &active, &state.blocks, &mut scratch, &mut k1);
        copy_blocks(&mut stage, &state.blocks, &active);
        axpy_blocks(&mut stage, c_re(half * dt), &k1, &active);
        rhs_blocks(&heff, &jumps, &dims, &active, &stage, &mut scratch, &mut k2);
        copy_blocks(&mut stage, &state.blocks, &active);
        axpy_blocks(&mut stage, c_re(half * dt), &k2, &active);
        rhs_blocks(&heff, &jumps, &dims, &active, &stage, &mut scratch, &mut k3);
        copy_blocks(&mut stage, &state.blocks, &active);
        axpy_blocks(&mut stage, c_re(dt), &k3, &active);
        rhs_blocks(&heff, &jumps, &dims, &active, &stage, &mut scratch, &mut k4);
        axpy_blocks(&mut state.blocks, c_re(dt * sixth), &k1, &active);
        axpy_blocks(&mut state.blocks, c_re(dt * third), &k2, &active);
        axpy_blocks(&mut state.blocks, c_re(dt * third), &k3, &active);
        axpy_blocks(&mut state.blocks, c_re(dt * sixth), &k4, &active);

        let is_last = step + 1 == total_steps;
        let t_next = if is_last && remainder.is_some() {
            spec.t_final
        } else {
            spec.dt * real::<T>((step + 1) as f64)
        };
        let will_sample = (step + 1) % spec.record_stride == 0 || is_last;

        if will_sample {
            let mut dev = T::zero();
            for (b, block) in state.blocks.iter().enumerate() {
                if active[b] {
                    let d = block.hermitian_deviation();
                    if d > dev {
                        dev = d;
                    }
                }
            }
            if dev > health.herm_dev_max {
                health.herm_dev_max = dev;
            }
        }
        for (b, block) in state.blocks.iter_mut().enumerate() {
            if active[b] {
                block.symmetrize();
            }
        }

        let drift = (trace_blocks(&state.blocks, &active) - T::one()).abs();
        if drift > health.trace_drift_max {
            health.trace_drift_max = drift;
        }
        if drift > spec.tolerance_trace {
            return Err(CoreError::TraceDrift {
                drift: drift.to_f64().unwrap_or(f64::NAN),
                tol: spec.tolerance_trace.to_f64().unwrap_or(f64::NAN),
                t: t_next.to_f64().unwrap_or(f64::NAN),
            });
        }

        if will_sample {
            sample(&state.blocks, t_next, &mut sample_idx, &mut series, &mut health, &mut row, is_last)?;
        }
    }

    series.health = health;
    if state.dim() <= DENSE_CAP {
        series.final_state = Some(state.to_dense()?);
    }
    series.final_blocks = Some(state);
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{h_entangle, h_transfer, ModelParams};
    use crate::scalar::cplx;
    use approx::assert_abs_diff_eq;

    fn small_params() -> ModelParams<f64> {
        ModelParams { n_a: 3, n_b: 3, ..ModelParams::default() }
    }

    fn small_layout() -> SystemLayout {
        SystemLayout::canonical(3, 3).unwrap()
    }

    #[test]
    fn grading_partitions_every_index() {
        let table = vec![0, 1, -1, 0, 1, 2];
        let g = Grading::new(&table);
        assert_eq!(g.charges, vec![-1, 0, 1, 2]);
        let mut seen = vec![false; table.len()];
        for (b, idx) in g.indices.iter().enumerate() {
            for &gi in idx {
                assert!(!seen[gi as usize]);
                seen[gi as usize] = true;
                assert_eq!(table[gi as usize], g.charges[b]);
                let (sb, sl) = g.slot[gi as usize];
                assert_eq!(sb as usize, b);
                assert_eq!(g.indices[b][sl as usize], gi);
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn off_block_element_is_detected() {
        let table = vec![0, 1];
        let mut m = ComplexMatrix::<f64>::identity(2).scaled(cplx(0.5, 0.0));
        assert!(is_block_diagonal(&m, &table));
        m[(0, 1)] = cplx(1e-300, 0.0);
        assert!(!is_block_diagonal(&m, &table));
    }

    #[test]
    fn all_ground_round_trips_dense() {
        let set = h_transfer(&small_params(), &small_layout()).unwrap();
        let table = set.charges.clone().unwrap();
        let blocks = BlockDensity::<f64>::all_ground(set.layout.clone(), table).unwrap();
        assert_abs_diff_eq!(blocks.trace(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(blocks.purity(), 1.0, epsilon = 1e-15);
        let dense = blocks.to_dense().unwrap();
        let expect = DensityMatrix::all_ground(set.layout.clone());
        assert_eq!(dense.matrix().max_diff(expect.matrix()), 0.0);
    }

    #[test]
    fn pure_state_across_sectors_has_no_block_form() {
        let set = h_transfer(&small_params(), &small_layout()).unwrap();
        let table = set.charges.clone().unwrap();
        let dim = set.dim();
        let r = 1.0 / 2.0f64.sqrt();
        // ground + one-excitation superposition straddles charge sectors
        let mut amps = vec![cplx::<f64>(0.0, 0.0); dim];
        amps[0] = cplx(r, 0.0);
        amps[1] = cplx(0.0, r);
        let out = BlockDensity::from_pure_graded(set.layout.clone(), table, &amps).unwrap();
        assert!(out.is_none());
    }

    #[test]
    fn single_sector_pure_state_round_trips() {
        let set = h_entangle(&small_params(), &small_layout()).unwrap();
        let table = set.charges.clone().unwrap();
        let dim = set.dim();
        let r = 1.0 / 2.0f64.sqrt();
        let layout = set.layout.clone();
        // two basis states of equal charge
        let ga = 0usize;
        let gb = table.iter().enumerate().skip(1).find(|&(_, &q)| q == table[0]).unwrap().0;
        let mut amps = vec![cplx::<f64>(0.0, 0.0); dim];
        amps[ga] = cplx(r, 0.0);
        amps[gb] = cplx(0.0, -r);
        let blocks = BlockDensity::from_pure_graded(layout.clone(), table, &amps)
            .unwrap()
            .expect("single sector");
        let dense = blocks.to_dense().unwrap();
        let expect = DensityMatrix::pure(layout, &amps).unwrap();
        assert!(dense.matrix().max_diff(expect.matrix()) <= 1e-15);
    }

    #[test]
    fn localized_jumps_target_shifted_blocks() {
        let set = h_entangle(&small_params(), &small_layout()).unwrap();
        let table = set.charges.clone().unwrap();
        let g = Grading::new(&table);
        for (op, _) in &set.collapse_ops {
            let shift = op.charge_shift(&table).unwrap();
            let loc = localize(op, &g, shift).unwrap();
            for sb in 0..g.charges.len() {
                if let Some(tb) = loc.target_of[sb] {
                    assert_eq!(g.charges[tb as usize], g.charges[sb] + shift);
                } else {
                    assert!(loc.per_source[sb].is_empty());
                }
            }
        }
    }

    #[test]
    fn from_density_rejects_cross_sector_coherence() {
        let set = h_transfer(&small_params(), &small_layout()).unwrap();
        let table = set.charges.clone().unwrap();
        let dim = set.dim();
        let r = 1.0 / 2.0f64.sqrt();
        let mut amps = vec![cplx::<f64>(0.0, 0.0); dim];
        amps[0] = cplx(r, 0.0);
        amps[1] = cplx(r, 0.0);
        let rho = DensityMatrix::pure(set.layout.clone(), &amps).unwrap();
        assert!(BlockDensity::from_density(&rho, table).is_err());
    }
}
