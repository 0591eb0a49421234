use crate::error::{Error, Result};
use crate::qcore::linalg::{self, c64, CMatrix};
use crate::qcore::DensityMatrix;

/// Tolerance on `sum_i K_i^dagger K_i = I`.
pub const TP_TOL: f64 = 1e-9;
/// Tolerance on the smallest Choi eigenvalue.
pub const CP_TOL: f64 = 1e-9;
/// Choi eigenvalues below this are dropped when rebuilding a Kraus set.
const KRAUS_CUTOFF: f64 = 1e-14;

fn check_kraus_shapes(kraus: &[CMatrix]) -> Result<(usize, usize)> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::invalid("kraus operators", "at least one operator required"))?;
    let (dim_out, dim_in) = first.shape();
    if dim_in == 0 || dim_out == 0 {
        return Err(Error::invalid("kraus operators", "empty operator"));
    }
    for (k, op) in kraus.iter().enumerate() {
        if op.shape() != (dim_out, dim_in) {
            return Err(Error::invalid(
                "kraus operators",
                format!(
                    "operator {k} is {}x{}, expected {dim_out}x{dim_in}",
                    op.nrows(),
                    op.ncols()
                ),
            ));
        }
        if op.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid(
                "kraus operators",
                format!("operator {k} has non-finite entries"),
            ));
        }
    }
    Ok((dim_in, dim_out))
}

fn kraus_sum(kraus: &[CMatrix], dim_in: usize) -> CMatrix {
    kraus
        .iter()
        .fold(CMatrix::zeros(dim_in, dim_in), |acc, k| acc + k.adjoint() * k)
}

fn apply_kraus(kraus: &[CMatrix], x: &CMatrix) -> CMatrix {
    let (dim_out, _) = kraus[0].shape();
    kraus
        .iter()
        .fold(CMatrix::zeros(dim_out, dim_out), |acc, k| acc + k * x * k.adjoint())
}

/// `J = sum_ij |i><j| ⊗ C(|i><j|)`, of size `dim_in * dim_out`.
pub(crate) fn choi_of(kraus: &[CMatrix], dim_in: usize, dim_out: usize) -> CMatrix {
    let n = dim_in * dim_out;
    let mut j = CMatrix::zeros(n, n);
    for k in kraus {
        // v[(i, a)] = K[a, i]
        let v = CMatrix::from_fn(n, 1, |r, _| k[(r % dim_out, r / dim_out)]);
        j += &v * v.adjoint();
    }
    j
}

/// Completely positive map in Kraus form that may decrease the trace.
#[derive(Debug, Clone)]
pub struct CpMap {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
}

impl CpMap {
    /// Accepts any Kraus set with `sum K^dagger K <= I` (within [`TP_TOL`]).
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let (dim_in, dim_out) = check_kraus_shapes(&kraus)?;
        let slack = linalg::identity(dim_in) - kraus_sum(&kraus, dim_in);
        let min = linalg::eigvalsh(&slack)?[0];
        if min < -TP_TOL {
            return Err(Error::invalid(
                "cp map",
                format!("sum of K^dagger K exceeds the identity (min slack eigenvalue {min:.3e})"),
            ));
        }
        Ok(Self { dim_in, dim_out, kraus })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn apply_operator(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                found: x.nrows(),
            });
        }
        Ok(apply_kraus(&self.kraus, x))
    }

    /// The same map with every Kraus operator scaled by `sqrt(p)`.
    pub fn scaled(&self, p: f64) -> Self {
        let s = c64(p.max(0.0).sqrt(), 0.0);
        Self {
            dim_in: self.dim_in,
            dim_out: self.dim_out,
            kraus: self.kraus.iter().map(|k| k * s).collect(),
        }
    }
}

/// Completely positive trace-preserving map stored as Kraus operators with
/// its Choi matrix cached; the Choi matrix decides channel equality.
#[derive(Debug, Clone)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
    choi: CMatrix,
}

impl QuantumChannel {
    pub fn new(kraus: Vec<CMatrix>) -> Result<Self> {
        let (dim_in, dim_out) = check_kraus_shapes(&kraus)?;
        let tp = linalg::max_abs(&(kraus_sum(&kraus, dim_in) - linalg::identity(dim_in)));
        if !(tp <= TP_TOL) {
            return Err(Error::invalid(
                "channel",
                format!("not trace preserving (|sum K^dagger K - I| = {tp:.3e})"),
            ));
        }
        let choi = choi_of(&kraus, dim_in, dim_out);
        let min = linalg::eigvalsh(&choi)?[0];
        if min < -CP_TOL {
            return Err(Error::invalid(
                "channel",
                format!("Choi matrix not PSD (min eigenvalue {min:.3e})"),
            ));
        }
        Ok(Self {
            dim_in,
            dim_out,
            kraus,
            choi,
        })
    }

    /// Rebuilds a channel from a Choi matrix via its eigendecomposition.
    pub fn from_choi(choi: &CMatrix, dim_in: usize, dim_out: usize) -> Result<Self> {
        let n = dim_in * dim_out;
        if choi.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: choi.nrows(),
            });
        }
        let (vals, vecs) = linalg::eigh(choi)?;
        if vals[0] < -CP_TOL {
            return Err(Error::invalid(
                "choi matrix",
                format!("not PSD (min eigenvalue {:.3e})", vals[0]),
            ));
        }
        let kraus: Vec<CMatrix> = vals
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &l)| l > KRAUS_CUTOFF)
            .map(|(k, &l)| {
                let s = l.sqrt();
                CMatrix::from_fn(dim_out, dim_in, |a, i| vecs[(i * dim_out + a, k)] * s)
            })
            .collect();
        Self::new(kraus)
    }

    pub fn identity(d: usize) -> Self {
        Self::new(vec![linalg::identity(d)]).expect("identity is a channel")
    }

    /// `rho -> V rho V^dagger`.
    pub fn unitary(v: CMatrix) -> Result<Self> {
        let res = linalg::unitarity_residual(&v);
        if !(res <= TP_TOL) {
            return Err(Error::invalid("unitary", format!("not unitary (residual {res:.3e})")));
        }
        Self::new(vec![v])
    }

    /// `rho -> sigma tr(rho)` on a `dim_in`-dimensional input.
    pub fn replace(sigma: &DensityMatrix, dim_in: usize) -> Result<Self> {
        let (vals, vecs) = linalg::eigh(sigma.matrix())?;
        let mut kraus = Vec::new();
        for (k, &l) in vals.iter().enumerate() {
            if l <= KRAUS_CUTOFF {
                continue;
            }
            let v = vecs.column(k) * c64(l.sqrt(), 0.0);
            for i in 0..dim_in {
                let mut op = CMatrix::zeros(sigma.dim(), dim_in);
                op.set_column(i, &v);
                kraus.push(op);
            }
        }
        Self::new(kraus)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn choi(&self) -> &CMatrix {
        &self.choi
    }

    pub fn is_square(&self) -> bool {
        self.dim_in == self.dim_out
    }

    /// `sum_i K_i x K_i^dagger` for an arbitrary operator `x`.
    pub fn apply_operator(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.shape() != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                found: x.nrows(),
            });
        }
        Ok(apply_kraus(&self.kraus, x))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::from_output(self.apply_operator(rho.matrix())?)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &QuantumChannel) -> Result<Self> {
        if next.dim_in != self.dim_out {
            return Err(Error::DimensionMismatch {
                expected: self.dim_out,
                found: next.dim_in,
            });
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * next.kraus.len());
        for l in &next.kraus {
            for k in &self.kraus {
                kraus.push(l * k);
            }
        }
        Self::new(kraus)?.compressed()
    }

    /// `lambda self + (1 - lambda) other`.
    pub fn mix(&self, other: &QuantumChannel, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::invalid("mixing weight", format!("{lambda} outside [0, 1]")));
        }
        if (self.dim_in, self.dim_out) != (other.dim_in, other.dim_out) {
            return Err(Error::DimensionMismatch {
                expected: self.dim_in,
                found: other.dim_in,
            });
        }
        let a = c64(lambda.sqrt(), 0.0);
        let b = c64((1.0 - lambda).sqrt(), 0.0);
        let kraus = self
            .kraus
            .iter()
            .map(|k| k * a)
            .chain(other.kraus.iter().map(|k| k * b))
            .filter(|k| linalg::max_abs(k) > 0.0)
            .collect();
        Self::new(kraus)?.compressed()
    }

    /// Minimal Kraus set from the Choi matrix when the current set is larger
    /// than `dim_in * dim_out`.
    pub fn compressed(self) -> Result<Self> {
        if self.kraus.len() <= self.dim_in * self.dim_out {
            return Ok(self);
        }
        Self::from_choi(&self.choi, self.dim_in, self.dim_out)
    }

    /// Entrywise distance between Choi matrices.
    pub fn choi_distance(&self, other: &QuantumChannel) -> f64 {
        if self.choi.shape() != other.choi.shape() {
            return f64::INFINITY;
        }
        linalg::max_abs(&(&self.choi - &other.choi))
    }

    /// Partial trace of the Choi matrix over the output factor.
    pub fn choi_input_marginal(&self) -> CMatrix {
        let (di, d_o) = (self.dim_in, self.dim_out);
        CMatrix::from_fn(di, di, |i, j| {
            (0..d_o).map(|a| self.choi[(i * d_o + a, j * d_o + a)]).sum()
        })
    }
}
