//! Dense complex matrix helpers shared by the Fock-space and spin-bath code.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Largest elementwise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = CMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Trace over the second factor of a `(dim_a·dim_b)`-dimensional operator.
pub fn partial_trace_second(m: &CMatrix, dim_a: usize, dim_b: usize) -> CMatrix {
    assert_eq!(m.shape(), (dim_a * dim_b, dim_a * dim_b), "shape mismatch");
    CMatrix::from_fn(dim_a, dim_a, |i, j| {
        (0..dim_b)
            .map(|k| m[(i * dim_b + k, j * dim_b + k)])
            .sum()
    })
}

/// Spectral decomposition of a Hermitian matrix, kept for repeated
/// exponentiation `exp(-i H t)` at many times.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(h: &CMatrix) -> Self {
        // symmetrise to keep the solver on exactly Hermitian input
        let sym = (h + h.adjoint()).scale(0.5);
        let eig = sym.symmetric_eigen();
        Self {
            values: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        }
    }

    /// `V f(λ) V†` for a complex function of the eigenvalues.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let fj = f(lambda);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= fj;
            }
        }
        scaled * self.vectors.adjoint()
    }

    /// `exp(-i H t)`.
    pub fn propagator(&self, t: f64) -> CMatrix {
        self.map(|lambda| Complex64::from_polar(1.0, -lambda * t))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn unitary_propagator(h: &CMatrix, t: f64) -> CMatrix {
    HermitianEigen::new(h).propagator(t)
}

/// `exp(G)` for anti-Hermitian `G`, via the Hermitian matrix `iG`.
pub fn expm_anti_hermitian(g: &CMatrix) -> CMatrix {
    let h = g * c(0.0, 1.0);
    unitary_propagator(&h, 1.0)
}
