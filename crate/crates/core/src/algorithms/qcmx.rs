//! Moment-based ground-state estimates: connected moments expansion (CMX),
//! the Peeters-Devreese-Soldatov functional (PDS) and the Knowles
//! generalized Pade approximant.

use std::sync::Arc;

use num_complex::Complex64;

use super::estimator::Estimator;
use super::{accelerator, concrete_ansatz, count_option, hermitian_observable, invalid, Algorithm, AlgorithmError};
use crate::ansatz::binomial;
use crate::backend::{Accelerator, AcceleratorBuffer};
use crate::ir::CompositeInstruction;
use crate::linalg::{hermitian_eig, inner, poly_roots, solve_linear, solve_regularized_lsq, DenseMatrix, MAX_POLY_DEGREE};
use crate::pauli::PauliOperator;
use crate::registry::HeterogeneousMap;

/// Relative eigenvalue cutoff for the moment matrices.
const RANK_TOL: f64 = 1e-10;
/// Relative variance below which the state is treated as an eigenstate.
const EIGENSTATE_TOL: f64 = 1e-12;

/// Raw moments `<H^k>` and connected moments `I_k`, both for `k = 1..`,
/// stored at index `k - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    pub raw_moments: Vec<f64>,
    pub connected_moments: Vec<f64>,
}

impl MomentTable {
    /// Builds the table from raw moments `<H^1>, <H^2>, ...`.
    pub fn from_raw(raw_moments: Vec<f64>) -> Self {
        // I_{k+1} = mu_{k+1} - sum_{i<k} C(k, i) I_{i+1} mu_{k-i}
        let mu = |k: usize| if k == 0 { 1.0 } else { raw_moments[k - 1] };
        let mut connected: Vec<f64> = Vec::with_capacity(raw_moments.len());
        for k in 0..raw_moments.len() {
            let mut v = mu(k + 1);
            for i in 0..k {
                v -= binomial(k, i) as f64 * connected[i] * mu(k - i);
            }
            connected.push(v);
        }
        MomentTable {
            raw_moments,
            connected_moments: connected,
        }
    }

    pub fn mean(&self) -> f64 {
        self.raw_moments[0]
    }

    pub fn variance(&self) -> f64 {
        self.connected_moments.get(1).copied().unwrap_or(0.0)
    }

    fn is_eigenstate(&self) -> bool {
        self.variance().abs() <= EIGENSTATE_TOL * self.mean().abs().max(1.0).powi(2)
    }

    /// Moments of `(H - <H>) / sqrt(var)` for `k = 0..=len`.
    fn standardized(&self) -> Vec<f64> {
        let (m, s) = (self.mean(), self.variance().sqrt());
        let mu = |k: usize| if k == 0 { 1.0 } else { self.raw_moments[k - 1] };
        (0..=self.raw_moments.len())
            .map(|k| {
                let centred: f64 = (0..=k)
                    .map(|j| binomial(k, j) as f64 * mu(j) * (-m).powi((k - j) as i32))
                    .sum();
                centred / s.powi(k as i32)
            })
            .collect()
    }
}

/// Raw moments `<psi|H^k|psi>` for `k = 1..=max_power` at the state
/// prepared by `circuit`.
///
/// With exact statevector access `H` is applied repeatedly to the state;
/// otherwise each power `H^k` is expanded as a Pauli sum and measured.
pub fn moment_table(
    observable: &PauliOperator,
    circuit: &CompositeInstruction,
    accelerator: &dyn Accelerator,
    max_power: usize,
) -> Result<MomentTable, AlgorithmError> {
    if !observable.is_hermitian() {
        return Err(AlgorithmError::NotHermitian);
    }
    let n = observable.n_qubits().max(circuit.n_qubits()).max(1);
    let est = Estimator::new(accelerator, n);
    let prepared = est.prepare(circuit)?;
    let mut raw = Vec::with_capacity(max_power);
    match prepared.state() {
        Some(psi) => {
            // mu_{2j} = <phi_j|phi_j>, mu_{2j+1} = <phi_j|H|phi_j> with phi_j = H^j psi.
            let mut phi = psi.to_vec();
            let mut h_phi = observable.apply(&phi, n)?;
            for k in 1..=max_power {
                if k % 2 == 1 {
                    raw.push(inner(&phi, &h_phi).re);
                } else {
                    raw.push(inner(&h_phi, &h_phi).re);
                    phi = std::mem::take(&mut h_phi);
                    h_phi = observable.apply(&phi, n)?;
                }
            }
        }
        None => {
            let mut power = observable.clone();
            for k in 1..=max_power {
                if k > 1 {
                    power = &power * observable;
                }
                raw.push(est.expect(&prepared, &power)?.re);
            }
        }
    }
    Ok(MomentTable::from_raw(raw))
}

fn eigen_of_real(rows: usize, f: impl Fn(usize, usize) -> f64) -> Result<(Vec<f64>, DenseMatrix), AlgorithmError> {
    let m = DenseMatrix::from_fn(rows, rows, |i, j| Complex64::new(f(i, j), 0.0));
    let e = hermitian_eig(&m)?;
    Ok((e.values, e.vectors))
}

/// CMX estimate of order `m >= 2`: `I_1 - v^T K^+ v` with `v_i = I_{i+2}`
/// and `K_ij = I_{i+j+3}` for `i, j < m - 1`. Needs `I_1..I_{2m-1}`.
pub fn cmx_estimate(t: &MomentTable, m: usize) -> Result<f64, AlgorithmError> {
    check_order(t, m)?;
    let i = &t.connected_moments;
    if t.is_eigenstate() {
        return Ok(i[0]);
    }
    let d = m - 1;
    let (values, vectors) = eigen_of_real(d, |a, b| i[a + b + 2])?;
    let scale = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let mut correction = 0.0;
    for (k, &lambda) in values.iter().enumerate() {
        if lambda.abs() <= RANK_TOL * scale || scale == 0.0 {
            continue;
        }
        let proj: f64 = (0..d).map(|a| vectors[(a, k)].re * i[a + 1]).sum();
        correction += proj * proj / lambda;
    }
    Ok(i[0] - correction)
}

/// PDS estimate of order `m >= 1`, computed on standardized moments.
///
/// Solves the Hankel system `sum_{j<K} a_j nu_{i+j} = -nu_{i+K}`
/// (`i < K`) and returns the smallest real root of
/// `x^K + sum_j a_j x^j`, mapped back to energy units. When the Hankel
/// matrix is rank deficient (the state lies in a Krylov space of dimension
/// below `m`) the order is reduced to the rank, where the estimate is
/// already exact. Needs `<H^1>..<H^{2m-1}>`.
pub fn pds_estimate(t: &MomentTable, m: usize) -> Result<f64, AlgorithmError> {
    check_order(t, m.max(1))?;
    if m > MAX_POLY_DEGREE {
        return Err(invalid("cmx-order", format!("PDS degree {m} exceeds {MAX_POLY_DEGREE}")));
    }
    if t.is_eigenstate() {
        return Ok(t.mean());
    }
    let nu = t.standardized();
    let mut k = m;
    while k > 1 {
        let (values, _) = eigen_of_real(k, |a, b| nu[a + b])?;
        let max = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if values[0] > RANK_TOL * max {
            break;
        }
        k -= 1;
    }
    if k == 1 {
        // x + a_0 with a_0 = -nu_1 = 0.
        return Ok(t.mean());
    }
    let a = DenseMatrix::from_fn(k, k, |i, j| nu[i + j].into());
    let rhs: Vec<Complex64> = (0..k).map(|i| (-nu[i + k]).into()).collect();
    let sol = solve_regularized_lsq(&a, &rhs, 0.0)?;
    let mut coeffs: Vec<f64> = sol.iter().map(|c| c.re).collect();
    coeffs.push(1.0);
    let roots = poly_roots(&coeffs)?;
    let real = |r: &&Complex64| r.im.abs() <= 1e-6 * (1.0 + r.re.abs());
    let root = roots
        .iter()
        .filter(real)
        .map(|r| r.re)
        .reduce(f64::min)
        .unwrap_or_else(|| roots.iter().map(|r| r.re).fold(f64::INFINITY, f64::min));
    Ok(t.mean() + t.variance().sqrt() * root)
}

/// Knowles estimate of order `m >= 2`: the `t -> infinity` limit of the
/// `[n/n]` Pade approximant (`n = m - 1`) to
/// `E(t) = sum_k (-1)^k I_{k+1} t^k / k!`. Falls back to lower `n` when
/// the denominator system is singular. Needs `I_1..I_{2m-1}`.
pub fn knowles_estimate(t: &MomentTable, m: usize) -> Result<f64, AlgorithmError> {
    check_order(t, m)?;
    let i = &t.connected_moments;
    if t.is_eigenstate() {
        return Ok(i[0]);
    }
    let mut fact = 1.0;
    let c: Vec<f64> = (0..2 * m - 1)
        .map(|k| {
            if k > 0 {
                fact *= k as f64;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sign * i[k] / fact
        })
        .collect();
    let mut n = m - 1;
    while n >= 1 {
        // sum_{j=1..n} q_j c_{k-j} = -c_k for k = n+1..2n.
        let a = DenseMatrix::from_fn(n, n, |r, col| c[n + 1 + r - (col + 1)].into());
        let rhs: Vec<Complex64> = (0..n).map(|r| (-c[n + 1 + r]).into()).collect();
        if let Ok(q) = solve_linear(&a, &rhs) {
            let mut q: Vec<f64> = q.iter().map(|v| v.re).collect();
            q.insert(0, 1.0);
            let p_n: f64 = (0..=n).map(|j| q[j] * c[n - j]).sum();
            let q_n = q[n];
            let value = p_n / q_n;
            if q_n.abs() > 1e-300 && value.is_finite() {
                return Ok(value);
            }
        }
        n -= 1;
    }
    Ok(i[0])
}

fn check_order(t: &MomentTable, m: usize) -> Result<(), AlgorithmError> {
    if m < 1 || t.raw_moments.len() < 2 * m - 1 {
        return Err(invalid(
            "cmx-order",
            format!("order {m} needs {} moments, have {}", 2 * m - 1, t.raw_moments.len()),
        ));
    }
    Ok(())
}

struct Config {
    observable: Arc<PauliOperator>,
    accelerator: Arc<dyn Accelerator>,
    ansatz: CompositeInstruction,
    order: usize,
}

/// Options: `ansatz` (bound with `ansatz-parameters` if symbolic),
/// `accelerator`, `observable`, `cmx-order` (`K >= 2`).
///
/// Writes `cmx-energies`, `pds-energies` and `knowles-energies`, one entry
/// per order `2..=K`, and `opt-val` (the order-`K` PDS estimate).
#[derive(Default)]
pub struct Qcmx {
    config: Option<Config>,
}

impl Algorithm for Qcmx {
    fn name(&self) -> &str {
        "qcmx"
    }

    fn initialize(&mut self, options: HeterogeneousMap) -> Result<(), AlgorithmError> {
        let order = count_option(&options, "cmx-order")?.ok_or_else(|| invalid("cmx-order", "required"))?;
        if order < 2 {
            return Err(invalid("cmx-order", format!("must be at least 2, got {order}")));
        }
        if order > MAX_POLY_DEGREE {
            return Err(invalid(
                "cmx-order",
                format!("must be at most {MAX_POLY_DEGREE} (root-finder degree cap), got {order}"),
            ));
        }
        self.config = Some(Config {
            observable: hermitian_observable(&options)?,
            accelerator: accelerator(&options)?,
            ansatz: concrete_ansatz(&options)?,
            order,
        });
        Ok(())
    }

    fn execute(&self, buffer: &mut AcceleratorBuffer) -> Result<(), AlgorithmError> {
        let c = self.config.as_ref().ok_or(AlgorithmError::NotInitialized("qcmx"))?;
        super::register_size(buffer, &c.observable, &c.ansatz)?;
        let table = moment_table(&c.observable, &c.ansatz, c.accelerator.as_ref(), 2 * c.order - 1)?;
        let mut cmx = Vec::new();
        let mut pds = Vec::new();
        let mut knowles = Vec::new();
        for m in 2..=c.order {
            cmx.push(cmx_estimate(&table, m)?);
            pds.push(pds_estimate(&table, m)?);
            knowles.push(knowles_estimate(&table, m)?);
        }
        buffer.set("opt-val", *pds.last().expect("order >= 2"));
        buffer.set("cmx-energies", cmx);
        buffer.set("pds-energies", pds);
        buffer.set("knowles-energies", knowles);
        Ok(())
    }
}
