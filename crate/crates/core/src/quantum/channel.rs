//! Channels in Kraus form, their Stinespring dilations and subspace-defined
//! channels.
//!
//! Dilations use the environment ⊗ output ordering: the isometry is
//! `U = Σ_i |i>_env ⊗ A_i`, i.e. the Kraus operators stacked as row blocks,
//! and the channel is recovered by tracing out factor 0.

use num_complex::Complex;
use num_traits::Zero;

use super::state::{DensityMatrix, PureState, STATE_TOL};
use crate::error::{shape, validation, Result};
use crate::linalg::{eigvalsh, inner, kron, partial_trace, Factorization};
use crate::{CMatrix, C64};

/// Kraus operators with operator norm below this are dropped before dilation.
pub const KRAUS_DROP_NORM: f64 = 1e-12;

/// Completely positive trace-preserving map `ρ ↦ Σ A_i ρ A_i†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    kraus_ops: Vec<CMatrix>,
    in_dim: usize,
    out_dim: usize,
}

impl KrausChannel {
    pub fn new(kraus_ops: Vec<CMatrix>) -> Result<Self> {
        let first = kraus_ops
            .first()
            .ok_or_else(|| validation("channel needs at least one Kraus operator"))?;
        let (out_dim, in_dim) = (first.rows(), first.cols());
        if out_dim == 0 || in_dim == 0 {
            return Err(shape("empty Kraus operator"));
        }
        if kraus_ops
            .iter()
            .any(|a| a.rows() != out_dim || a.cols() != in_dim)
        {
            return Err(shape("Kraus operators of differing shapes"));
        }
        let channel = Self {
            kraus_ops,
            in_dim,
            out_dim,
        };
        let defect = channel.trace_preservation_defect();
        if defect > STATE_TOL {
            return Err(validation(format!(
                "Kraus operators are not trace preserving (defect {defect:e})"
            )));
        }
        Ok(channel)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            kraus_ops: vec![CMatrix::identity(d)],
            in_dim: d,
            out_dim: d,
        }
    }

    /// Replacement channel `ρ ↦ Tr(ρ) σ`.
    pub fn constant(in_dim: usize, sigma: &DensityMatrix) -> Result<Self> {
        let e = sigma.eigen()?;
        let d_out = sigma.dim();
        let mut ops = Vec::new();
        for (k, &l) in e.eigenvalues.iter().enumerate() {
            if l <= 0.0 {
                continue;
            }
            let v = e.eigenvector(k);
            for j in 0..in_dim {
                ops.push(CMatrix::from_fn(d_out, in_dim, |r, c| {
                    if c == j {
                        v[r] * l.sqrt()
                    } else {
                        C64::zero()
                    }
                }));
            }
        }
        Self::new(ops)
    }

    pub fn kraus_ops(&self) -> &[CMatrix] {
        &self.kraus_ops
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// `max |Σ A_i† A_i − I|`.
    pub fn trace_preservation_defect(&self) -> f64 {
        let mut s = CMatrix::zeros(self.in_dim, self.in_dim);
        for a in &self.kraus_ops {
            let g = a.adjoint_mul(a).expect("square Gram");
            s.add_scaled(1.0, &g);
        }
        s.max_abs_diff(&CMatrix::identity(self.in_dim))
    }

    /// Applies the map to an arbitrary operator on the input space.
    pub fn apply_op(&self, rho: &CMatrix) -> Result<CMatrix> {
        if rho.rows() != self.in_dim || rho.cols() != self.in_dim {
            return Err(shape(format!(
                "channel input dimension {} but operator is {}x{}",
                self.in_dim,
                rho.rows(),
                rho.cols()
            )));
        }
        let mut out = CMatrix::zeros(self.out_dim, self.out_dim);
        for a in &self.kraus_ops {
            out.add_scaled(1.0, &a.conjugate_by(rho)?);
        }
        Ok(out)
    }

    /// Output on a pure input, `Σ (A_i ψ)(A_i ψ)†`.
    pub fn apply_pure(&self, psi: &[C64]) -> Result<CMatrix> {
        let mut out = CMatrix::zeros(self.out_dim, self.out_dim);
        for a in &self.kraus_ops {
            let v = a.mul_vec(psi)?;
            out.add_scaled(1.0, &CMatrix::outer(&v));
        }
        Ok(out)
    }

    /// Heisenberg-picture adjoint `X ↦ Σ A_i† X A_i`.
    pub fn apply_adjoint(&self, x: &CMatrix) -> Result<CMatrix> {
        let mut out = CMatrix::zeros(self.in_dim, self.in_dim);
        for a in &self.kraus_ops {
            out.add_scaled(1.0, &a.adjoint_mul(&x.matmul(a)?)?);
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.apply_op(rho.op())?;
        Ok(DensityMatrix::new_unchecked(
            out,
            Factorization::single(self.out_dim),
        ))
    }

    /// `T ⊗ T'`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut ops = Vec::with_capacity(self.kraus_ops.len() * other.kraus_ops.len());
        for a in &self.kraus_ops {
            for b in &other.kraus_ops {
                ops.push(kron(a, b)?);
            }
        }
        Ok(Self {
            kraus_ops: ops,
            in_dim: self.in_dim * other.in_dim,
            out_dim: self.out_dim * other.out_dim,
        })
    }

    /// Normalised Choi state `(I ⊗ T)|Φ><Φ|` on input ⊗ output.
    pub fn choi_matrix(&self) -> Result<DensityMatrix> {
        let d = self.in_dim;
        let o = self.out_dim;
        let mut choi = CMatrix::zeros(d * o, d * o);
        for i in 0..d {
            for j in 0..d {
                let eij = CMatrix::from_fn(d, d, |r, c| {
                    if r == i && c == j {
                        Complex::new(1.0, 0.0)
                    } else {
                        C64::zero()
                    }
                });
                let t = self.apply_op(&eij)?;
                for r in 0..o {
                    for c in 0..o {
                        choi[(i * o + r, j * o + c)] = t[(r, c)] / d as f64;
                    }
                }
            }
        }
        Ok(DensityMatrix::new_unchecked(
            choi,
            Factorization::bipartite(d, o),
        ))
    }

    /// Stinespring isometry built by stacking the Kraus operators.
    pub fn stinespring(&self) -> Result<StinespringDilation> {
        let defect = self.trace_preservation_defect();
        if defect > STATE_TOL {
            return Err(validation(format!(
                "trace preservation violated (defect {defect:e})"
            )));
        }
        let mut kept = Vec::new();
        for a in &self.kraus_ops {
            let g = a.adjoint_mul(a)?;
            let top = eigvalsh(&g)?.last().copied().unwrap_or(0.0).max(0.0).sqrt();
            if top >= KRAUS_DROP_NORM {
                kept.push(a);
            }
        }
        let env = kept.len();
        let (o, d) = (self.out_dim, self.in_dim);
        let iso = CMatrix::from_fn(env * o, d, |r, c| kept[r / o][(r % o, c)]);
        let image_basis = SubspaceBasis::new(iso.clone(), Factorization::bipartite(env, o))?;
        Ok(StinespringDilation {
            isometry: iso,
            env_dim: env,
            out_dim: o,
            in_dim: d,
            image_basis,
        })
    }
}

/// Free function form of [`KrausChannel::apply`].
pub fn apply_channel(t: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    t.apply(rho)
}

/// Free function form of [`KrausChannel::stinespring`].
pub fn stinespring_from_kraus(t: &KrausChannel) -> Result<StinespringDilation> {
    t.stinespring()
}

/// Orthonormal basis (as matrix columns) of a subspace of a bipartite space.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    columns: CMatrix,
    fact: Factorization,
}

impl SubspaceBasis {
    pub fn new(columns: CMatrix, fact: Factorization) -> Result<Self> {
        if columns.rows() != fact.total() {
            return Err(shape(format!(
                "basis vectors have length {} but ambient dimension is {}",
                columns.rows(),
                fact.total()
            )));
        }
        if columns.cols() == 0 || columns.cols() > columns.rows() {
            return Err(validation(format!(
                "{} basis vectors in ambient dimension {}",
                columns.cols(),
                columns.rows()
            )));
        }
        let gram = columns.adjoint_mul(&columns)?;
        let defect = gram.max_abs_diff(&CMatrix::identity(columns.cols()));
        if defect > STATE_TOL {
            return Err(validation(format!(
                "basis is not orthonormal (defect {defect:e})"
            )));
        }
        Ok(Self { columns, fact })
    }

    pub fn from_vectors(vectors: &[Vec<C64>], fact: Factorization) -> Result<Self> {
        Self::new(CMatrix::from_columns(vectors)?, fact)
    }

    pub fn columns(&self) -> &CMatrix {
        &self.columns
    }

    pub fn fact(&self) -> &Factorization {
        &self.fact
    }

    pub fn dim(&self) -> usize {
        self.columns.cols()
    }

    pub fn vector(&self, j: usize) -> Vec<C64> {
        self.columns.column(j)
    }

    /// State `Σ_j c_j |b_j>` for coordinates `c` (normalised).
    pub fn embed(&self, coords: &[C64]) -> Result<PureState> {
        PureState::normalized(self.columns.mul_vec(coords)?, self.fact.clone())
    }

    /// Maximally mixed state `P / Tr P` on the subspace.
    pub fn maximally_mixed(&self) -> Result<DensityMatrix> {
        DensityMatrix::normalized_projector(&self.columns, self.fact.clone())
    }

    /// Same subspace with the two tensor factors exchanged.
    pub fn swapped(&self) -> Result<Self> {
        if self.fact.len() != 2 {
            return Err(shape("swap needs a bipartite ambient space"));
        }
        let cols: Vec<Vec<C64>> = (0..self.dim())
            .map(|j| {
                crate::linalg::permute_vector(&self.vector(j), &self.fact, &[1, 0]).map(|(v, _)| v)
            })
            .collect::<Result<_>>()?;
        let d = self.fact.dims();
        Self::from_vectors(&cols, Factorization::bipartite(d[1], d[0]))
    }

    /// Channel `ρ ↦ Tr_traced(V ρ V†)` where `V` maps the coordinate basis onto
    /// the subspace basis.
    pub fn channel(&self, traced: usize) -> Result<KrausChannel> {
        channel_from_subspace(self, traced)
    }
}

/// Channel induced by a subspace of a bipartite space, tracing out one factor.
pub fn channel_from_subspace(k: &SubspaceBasis, traced: usize) -> Result<KrausChannel> {
    let dims = k.fact.dims();
    if dims.len() != 2 {
        return Err(shape("subspace channel needs a bipartite ambient space"));
    }
    if traced > 1 {
        return Err(shape(format!("traced factor {traced} out of range")));
    }
    let (d1, d2) = (dims[0], dims[1]);
    let n = k.dim();
    let v = &k.columns;
    let mut ops = Vec::new();
    if traced == 0 {
        for i in 0..d1 {
            ops.push(CMatrix::from_fn(d2, n, |o, c| v[(i * d2 + o, c)]));
        }
    } else {
        for j in 0..d2 {
            ops.push(CMatrix::from_fn(d1, n, |o, c| v[(o * d2 + j, c)]));
        }
    }
    ops.retain(|a| a.max_abs() > 0.0);
    KrausChannel::new(ops)
}

/// Isometric embedding of the input into environment ⊗ output.
#[derive(Debug, Clone, PartialEq)]
pub struct StinespringDilation {
    pub isometry: CMatrix,
    pub env_dim: usize,
    pub out_dim: usize,
    pub in_dim: usize,
    pub image_basis: SubspaceBasis,
}

impl StinespringDilation {
    pub fn ambient(&self) -> Factorization {
        Factorization::bipartite(self.env_dim, self.out_dim)
    }

    /// `U ρ U†` on environment ⊗ output.
    pub fn dilate(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.in_dim {
            return Err(shape("input state dimension mismatch"));
        }
        Ok(DensityMatrix::new_unchecked(
            self.isometry.conjugate_by(rho.op())?,
            self.ambient(),
        ))
    }

    pub fn dilate_pure(&self, psi: &PureState) -> Result<PureState> {
        PureState::normalized(self.isometry.mul_vec(psi.amplitudes())?, self.ambient())
    }

    /// Channel output recovered as `Tr_env(U ρ U†)`.
    pub fn output(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let big = self.dilate(rho)?;
        let (op, fact) = partial_trace(big.op(), big.fact(), &[0])?;
        Ok(DensityMatrix::new_unchecked(op, fact))
    }

    /// `max |U†U − I|`.
    pub fn isometry_defect(&self) -> f64 {
        self.isometry
            .adjoint_mul(&self.isometry)
            .expect("square Gram")
            .max_abs_diff(&CMatrix::identity(self.in_dim))
    }

    /// Image basis in the output ⊗ environment ordering.
    pub fn swapped_image(&self) -> Result<SubspaceBasis> {
        self.image_basis.swapped()
    }
}

/// Overlap `<a|b>` of two pure states on the same space.
pub fn overlap(a: &PureState, b: &PureState) -> Result<C64> {
    if a.fact() != b.fact() {
        return Err(shape("overlap of states on different spaces"));
    }
    Ok(inner(a.amplitudes(), b.amplitudes()))
}
