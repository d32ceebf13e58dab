//! Lie-Poisson dynamics of the geodesic flow: equilibria, coadjoint orbits,
//! the closed-form flow, group reconstruction and conservation diagnostics.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::algebra::{ad_transpose, AlgebraVector, Splitting, StepTwoAlgebra};
use crate::error::{Error, Result};
use crate::expm::{expm, expm_affine};
use crate::jmap::{j_from_center_coords, j_operator};
use crate::linalg;

/// A general left-invariant metric written in blocks against the reference
/// scalar product, all matrices over the splitting bases.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricBlocks {
    pub g11: DMatrix<f64>,
    pub g12: DMatrix<f64>,
    pub g21: DMatrix<f64>,
    pub g22: DMatrix<f64>,
}

impl MetricBlocks {
    /// Check shapes and the adjointness relations with respect to
    /// `gram_v` and `gram_z`.
    pub fn new(
        split: &Splitting,
        g11: DMatrix<f64>,
        g12: DMatrix<f64>,
        g21: DMatrix<f64>,
        g22: DMatrix<f64>,
    ) -> Result<Self> {
        let (m, n) = (split.dim_v(), split.dim_z());
        let shapes = [
            ("g11", g11.shape(), (m, m)),
            ("g12", g12.shape(), (m, n)),
            ("g21", g21.shape(), (n, m)),
            ("g22", g22.shape(), (n, n)),
        ];
        for (name, got, want) in shapes {
            if got != want {
                return Err(Error::Blocks(format!(
                    "{name} has shape {got:?}, expected {want:?}"
                )));
            }
        }
        let (gv, gz) = (split.gram_v(), split.gram_z());
        let tol = split.tol().num;
        let s11 = gv * &g11;
        let s22 = gz * &g22;
        let r11 = (&s11 - s11.transpose()).amax();
        let r22 = (&s22 - s22.transpose()).amax();
        let r12 = (gv * &g12 - (gz * &g21).transpose()).amax();
        let scale = [&g11, &g12, &g21, &g22]
            .iter()
            .map(|g| g.amax())
            .fold(1.0, f64::max)
            * split.scale();
        for (name, r) in [("g11", r11), ("g22", r22), ("g12/g21", r12)] {
            if r > tol * scale {
                return Err(Error::Blocks(format!(
                    "{name} is not self-adjoint (residual {r:e})"
                )));
            }
        }
        Ok(Self { g11, g12, g21, g22 })
    }

    /// Blocks of the reference product itself.
    pub fn identity(split: &Splitting) -> Self {
        let (m, n) = (split.dim_v(), split.dim_z());
        Self {
            g11: DMatrix::identity(m, m),
            g12: DMatrix::zeros(m, n),
            g21: DMatrix::zeros(n, m),
            g22: DMatrix::identity(n, n),
        }
    }
}

/// `1/2 <Y, Y>`, or the blocks Hamiltonian `H^g` when blocks are given.
pub fn hamiltonian(split: &Splitting, blocks: Option<&MetricBlocks>, y: &DVector<f64>) -> f64 {
    match blocks {
        None => 0.5 * split.product().inner(y, y),
        Some(g) => {
            let (a, b) = split.split(y);
            let wv = &g.g11 * &a + &g.g12 * &b;
            let wz = &g.g21 * &a + &g.g22 * &b;
            0.5 * ((a.transpose() * split.gram_v() * wv)[(0, 0)]
                + (b.transpose() * split.gram_z() * wz)[(0, 0)])
        }
    }
}

/// Magnitude at which the quadratic form is evaluated at `y`; the natural
/// scale for relative energy errors of an indefinite form.
pub fn hamiltonian_scale(split: &Splitting, y: &DVector<f64>) -> f64 {
    (0.5 * y.norm_squared() * split.scale()).max(1.0)
}

/// Group element `q = exp_G(u)` stored by its exponential coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub expcoord: DVector<f64>,
}

impl GroupElement {
    pub fn identity(dim: usize) -> Self {
        Self {
            expcoord: DVector::zeros(dim),
        }
    }

    pub fn exp(u: DVector<f64>) -> Self {
        Self { expcoord: u }
    }

    /// `exp(u) exp(w) = exp(u + w + [u, w] / 2)`.
    pub fn mul(&self, other: &GroupElement, alg: &StepTwoAlgebra) -> GroupElement {
        let u = &self.expcoord;
        let w = &other.expcoord;
        let br = alg.ad(u) * w;
        GroupElement {
            expcoord: u + w + br * 0.5,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement {
            expcoord: -&self.expcoord,
        }
    }
}

/// `J(q, Y) = (Ad_{q^{-1}})^T Y = Y + (ad_{-u})^T Y` for `q = exp_G(u)`.
pub fn momentum_map(split: &Splitting, q: &GroupElement, y: &DVector<f64>) -> Result<DVector<f64>> {
    let m = ad_transpose(split, &AlgebraVector::new(-&q.expcoord))?;
    Ok(y + m * y)
}

/// Basis of `ker j(Z)` in ambient coordinates, Euclidean-orthonormal.
pub fn equilibria(split: &Splitting, z: &AlgebraVector) -> Result<DMatrix<f64>> {
    let j = j_operator(split, z)?;
    let kernel = linalg::null_space(j.matrix(), split.tol().rank);
    let ambient = split.complement_basis() * kernel;
    Ok(linalg::orthonormalize_columns(&ambient, split.tol().rank))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Orbit {
    pub base_point: DVector<f64>,
    /// Euclidean-orthonormal columns spanning `Im j(Y_z)` (ambient coordinates).
    pub tangent_basis: DMatrix<f64>,
    pub dim: usize,
}

impl Orbit {
    /// Euclidean distance from `y - base_point` to the tangent space.
    pub fn residual(&self, y: &DVector<f64>) -> f64 {
        let d = y - &self.base_point;
        let q = &self.tangent_basis;
        (&d - q * (q.transpose() * &d)).norm()
    }
}

/// The coadjoint orbit `Y + Im j(Y_z)`.
pub fn coadjoint_orbit(split: &Splitting, y: &AlgebraVector) -> Result<Orbit> {
    split.algebra().check_dim(y)?;
    let j = j_operator(split, &AlgebraVector::new(split.z_part(y)))?;
    let image = split.complement_basis() * j.matrix();
    let tangent_basis = linalg::column_space(&image, split.tol().rank);
    Ok(Orbit {
        base_point: y.coords().clone(),
        dim: tangent_basis.ncols(),
        tangent_basis,
    })
}

/// `omega_Y((ad_U)^T Y, (ad_U')^T Y) = -<Y_z, [U_v, U'_v]>`.
pub fn orbit_symplectic(
    split: &Splitting,
    y: &AlgebraVector,
    u: &AlgebraVector,
    u2: &AlgebraVector,
) -> Result<f64> {
    let alg = split.algebra();
    alg.check_dim(y)?;
    let uv = AlgebraVector::new(split.v_part(u));
    let u2v = AlgebraVector::new(split.v_part(u2));
    let br = alg.bracket(&uv, &u2v)?;
    Ok(-split.product().inner(&split.z_part(y), &br))
}

/// Largest rank of `j(Z)` over the center basis and `samples` seeded random Z.
pub fn generic_rank(split: &Splitting, samples: usize, seed: u64) -> Result<usize> {
    let n = split.dim_z();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0;
    let mut probe = |b: &DVector<f64>| -> Result<()> {
        let j = j_from_center_coords(split, b)?;
        best = best.max(linalg::rank(j.matrix(), split.tol().rank));
        Ok(())
    };
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        probe(&e)?;
    }
    for _ in 0..samples {
        let b = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
        probe(&b)?;
    }
    Ok(best)
}

/// Solution of the Lie-Poisson equation from `Y0`, evaluated in closed form.
#[derive(Debug, Clone)]
pub struct ClosedFormFlow<'a> {
    split: &'a Splitting,
    blocks: Option<MetricBlocks>,
    a0: DVector<f64>,
    b0: DVector<f64>,
    generator: DMatrix<f64>,
    forcing: DVector<f64>,
}

impl<'a> ClosedFormFlow<'a> {
    pub fn new(
        split: &'a Splitting,
        blocks: Option<&MetricBlocks>,
        y0: &AlgebraVector,
    ) -> Result<Self> {
        split.algebra().check_dim(y0)?;
        let (a0, b0) = split.split(y0);
        let j = j_from_center_coords(split, &b0)?.into_matrix();
        let (generator, forcing) = match blocks {
            None => (j, DVector::zeros(a0.len())),
            Some(g) => (&j * &g.g11, &j * (&g.g12 * &b0)),
        };
        Ok(Self {
            split,
            blocks: blocks.cloned(),
            a0,
            b0,
            generator,
            forcing,
        })
    }

    /// Complement coordinates `Y_v(t)`.
    pub fn v_coords(&self, t: f64) -> DVector<f64> {
        match self.blocks {
            None => expm(&(&self.generator * t)) * &self.a0,
            Some(_) => {
                let (e, f) = expm_affine(&self.generator, &self.forcing, t);
                e * &self.a0 + f
            }
        }
    }

    /// `Y(t)` in ambient coordinates.
    pub fn state(&self, t: f64) -> DVector<f64> {
        self.split.from_v_coords(&self.v_coords(t)) + self.split.from_z_coords(&self.b0)
    }

    /// The Hamiltonian gradient `V(t)`, ambient coordinates.
    pub fn velocity(&self, t: f64) -> DVector<f64> {
        match &self.blocks {
            None => self.state(t),
            Some(g) => {
                let a = self.v_coords(t);
                let wv = &g.g11 * &a + &g.g12 * &self.b0;
                let wz = &g.g21 * &a + &g.g22 * &self.b0;
                self.split.from_v_coords(&wv) + self.split.from_z_coords(&wz)
            }
        }
    }

    pub fn center_coords(&self) -> &DVector<f64> {
        &self.b0
    }

    pub fn blocks(&self) -> Option<&MetricBlocks> {
        self.blocks.as_ref()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub hamiltonian: Vec<f64>,
    /// `H(t) - H(0)`.
    pub energy_drift: Vec<f64>,
    /// `|J(t) - J(0)|`, present with group states.
    pub momentum_drift: Option<Vec<f64>>,
    pub center_drift: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub group_states: Option<Vec<GroupElement>>,
    pub diagnostics: Diagnostics,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn max_energy_drift(&self) -> f64 {
        self.diagnostics
            .energy_drift
            .iter()
            .fold(0.0, |a, x| a.max(x.abs()))
    }

    pub fn max_momentum_drift(&self) -> Option<f64> {
        self.diagnostics
            .momentum_drift
            .as_ref()
            .map(|v| v.iter().fold(0.0_f64, |a, x| a.max(*x)))
    }

    /// Write the trajectory as CSV with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let d = self.states.first().map_or(0, |s| s.len());
        let mut header = vec!["t".to_string()];
        header.extend((1..=d).map(|i| format!("Y_{i}")));
        if self.group_states.is_some() {
            header.extend((1..=d).map(|i| format!("q_{i}")));
        }
        header.extend(["H", "dH", "dJ"].map(String::from));
        writeln!(w, "{}", header.join(","))?;
        for k in 0..self.len() {
            let mut row = vec![self.times[k]];
            row.extend(self.states[k].iter());
            if let Some(g) = &self.group_states {
                row.extend(g[k].expcoord.iter());
            }
            row.push(self.diagnostics.hamiltonian[k]);
            row.push(self.diagnostics.energy_drift[k]);
            row.push(
                self.diagnostics
                    .momentum_drift
                    .as_ref()
                    .map_or(f64::NAN, |m| m[k]),
            );
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }
}

fn check_monotone(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Times);
    }
    let inc = times.windows(2).all(|w| w[1] > w[0]);
    let dec = times.windows(2).all(|w| w[1] < w[0]);
    if inc || dec {
        Ok(())
    } else {
        Err(Error::Times)
    }
}

fn diagnostics_for(
    split: &Splitting,
    blocks: Option<&MetricBlocks>,
    states: &[DVector<f64>],
    momentum: Option<Vec<f64>>,
) -> Diagnostics {
    let hamiltonian: Vec<f64> = states.iter().map(|y| hamiltonian(split, blocks, y)).collect();
    let h0 = hamiltonian.first().copied().unwrap_or(0.0);
    let z0 = states.first().map(|y| split.z_coords(y));
    Diagnostics {
        energy_drift: hamiltonian.iter().map(|h| h - h0).collect(),
        hamiltonian,
        momentum_drift: momentum,
        center_drift: states
            .iter()
            .map(|y| (split.z_coords(y) - z0.as_ref().expect("non-empty")).norm())
            .collect(),
    }
}

/// Evaluate the closed-form Lie-Poisson flow at the given strictly monotone times.
pub fn flow_exact(
    split: &Splitting,
    blocks: Option<&MetricBlocks>,
    y0: &AlgebraVector,
    times: &[f64],
) -> Result<Trajectory> {
    check_monotone(times)?;
    let flow = ClosedFormFlow::new(split, blocks, y0)?;
    let states: Vec<DVector<f64>> = times.iter().map(|&t| flow.state(t)).collect();
    let diagnostics = diagnostics_for(split, blocks, &states, None);
    Ok(Trajectory {
        times: times.to_vec(),
        states,
        group_states: None,
        diagnostics,
    })
}

/// Integrate `dq/dt = q V(t)` from `q0` over `[0, T]` in `steps` midpoint steps,
/// using the exact step-two group law.
pub fn reconstruct_group(
    split: &Splitting,
    flow: &ClosedFormFlow<'_>,
    q0: &GroupElement,
    t_end: f64,
    steps: usize,
) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::Steps);
    }
    if !t_end.is_finite() {
        return Err(Error::Times);
    }
    let alg = split.algebra();
    let dt = t_end / steps as f64;
    let mut q = q0.clone();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut group = Vec::with_capacity(steps + 1);
    let mut momentum = Vec::with_capacity(steps + 1);
    let y0 = flow.state(0.0);
    let j0 = momentum_map(split, q0, &y0)?;
    for k in 0..=steps {
        let t = k as f64 * dt;
        let y = flow.state(t);
        momentum.push((momentum_map(split, &q, &y)? - &j0).norm());
        times.push(t);
        states.push(y);
        group.push(q.clone());
        if k < steps {
            let v = flow.velocity(t + 0.5 * dt);
            q = q.mul(&GroupElement::exp(v * dt), alg);
        }
    }
    let diagnostics = diagnostics_for(split, flow.blocks(), &states, Some(momentum));
    Ok(Trajectory {
        times,
        states,
        group_states: Some(group),
        diagnostics,
    })
}

/// Right-hand side `(ad_Y)^T Y` of the ambient Lie-Poisson equation.
pub fn lie_poisson_rhs(alg: &StepTwoAlgebra, gram: &DMatrix<f64>, gram_inv: &DMatrix<f64>, y: &DVector<f64>) -> DVector<f64> {
    let d = alg.dim();
    let gy = gram * y;
    // r_j = <Y, [Y, e_j]>
    let r = DVector::from_fn(d, |j, _| {
        let mut s = 0.0;
        for i in 0..d {
            if y[i] == 0.0 {
                continue;
            }
            for k in 0..d {
                s += y[i] * alg.structure_constant(i, j, k) * gy[k];
            }
        }
        s
    });
    gram_inv * r
}

/// Classical RK4 on the ambient equation, for cross-checking [`flow_exact`].
/// Returns the states at `t = 0, dt, ..., steps * dt`, keeping every `stride`-th.
pub fn rk4_reference(
    split: &Splitting,
    y0: &DVector<f64>,
    dt: f64,
    steps: usize,
    stride: usize,
) -> Result<Vec<(f64, DVector<f64>)>> {
    if steps == 0 || stride == 0 {
        return Err(Error::Steps);
    }
    let alg = split.algebra();
    let g = split.product().gram();
    let ginv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("gram not invertible".into()))?;
    let f = |y: &DVector<f64>| lie_poisson_rhs(alg, g, &ginv, y);
    let mut y = y0.clone();
    let mut out = vec![(0.0, y.clone())];
    for k in 1..=steps {
        let k1 = f(&y);
        let k2 = f(&(&y + &k1 * (0.5 * dt)));
        let k3 = f(&(&y + &k2 * (0.5 * dt)));
        let k4 = f(&(&y + &k3 * dt));
        y += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        if k % stride == 0 {
            out.push((k as f64 * dt, y.clone()));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    /// `max_t |Y(t) - Y*| / eps` over all samples.
    pub max_relative_deviation: f64,
    /// Largest least-squares slope of `log |Y(t) - Y*|` over the second half
    /// of the window.
    pub growth_rate: f64,
    pub orbit_dim: usize,
}

/// Flow seeded random orbit-tangent perturbations of an equilibrium and
/// measure how far they travel.
pub fn perturbation_probe(
    split: &Splitting,
    ystar: &AlgebraVector,
    eps: f64,
    t_end: f64,
    samples: usize,
    seed: u64,
) -> Result<ProbeReport> {
    if !(eps > 0.0) || !(t_end > 0.0) {
        return Err(Error::Times);
    }
    split.algebra().check_dim(ystar)?;
    let (a, b) = split.split(ystar);
    let j = j_from_center_coords(split, &b)?.into_matrix();
    let res = (&j * &a).norm();
    if res > split.tol().num * ystar.norm().max(1.0) {
        return Err(Error::NotEquilibrium(res));
    }
    let orbit = coadjoint_orbit(split, ystar)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = 200;
    let times: Vec<f64> = (0..=grid).map(|k| t_end * k as f64 / grid as f64).collect();
    let mut max_dev = 0.0_f64;
    let mut growth = f64::NEG_INFINITY;
    if orbit.dim == 0 {
        return Ok(ProbeReport {
            max_relative_deviation: 0.0,
            growth_rate: 0.0,
            orbit_dim: 0,
        });
    }
    for _ in 0..samples {
        let c = DVector::from_fn(orbit.dim, |_, _| StandardNormal.sample(&mut rng));
        let mut delta = &orbit.tangent_basis * c;
        delta *= eps / delta.norm();
        let y0 = AlgebraVector::new(ystar.coords() + &delta);
        let traj = flow_exact(split, None, &y0, &times)?;
        let devs: Vec<f64> = traj
            .states
            .iter()
            .map(|y| (y - ystar.coords()).norm())
            .collect();
        max_dev = devs.iter().fold(max_dev, |m, d| m.max(d / eps));
        let half = grid / 2;
        let pts: Vec<(f64, f64)> = (half..=grid)
            .filter(|&k| devs[k] > 0.0)
            .map(|k| (times[k], devs[k].ln()))
            .collect();
        if pts.len() >= 2 {
            let n = pts.len() as f64;
            let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let ml = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let num: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - ml)).sum();
            let den: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
            growth = growth.max(num / den);
        }
    }
    Ok(ProbeReport {
        max_relative_deviation: max_dev,
        growth_rate: if growth.is_finite() { growth } else { 0.0 },
        orbit_dim: orbit.dim,
    })
}
