//! Reconstruct the group curve `q(t)` on the Heisenberg group and watch the
//! second-order convergence and momentum conservation.
//!
//! ```text
//! cargo run --example group_reconstruction
//! ```

use nalgebra::DVector;
use nilflow::algebra::orthogonal_split;
use nilflow::constructors::builtin;
use nilflow::dynamics::{reconstruct_group, ClosedFormFlow, GroupElement};
use nilflow::{AlgebraVector, Tolerances};

fn main() -> nilflow::Result<()> {
    let tol = Tolerances::default();
    let (alg, product) = builtin("heisenberg3")?;
    let split = orthogonal_split(&alg, &product, &tol)?;
    let y0 = AlgebraVector::from(vec![1.0, 0.0, 1.0]);
    let flow = ClosedFormFlow::new(&split, None, &y0)?;
    let t = 10.0_f64;
    // Exponential coordinates of the exact solution for this initial value.
    let exact = DVector::from_vec(vec![t.sin(), 1.0 - t.cos(), t + 0.5 * (t - t.sin())]);
    let mut previous: Option<f64> = None;
    for k in 6..=12 {
        let steps = 1usize << k;
        let traj = reconstruct_group(&split, &flow, &GroupElement::identity(3), t, steps)?;
        let q = &traj.group_states.as_ref().expect("group states").last().expect("non-empty").expcoord;
        let err = (q - &exact).norm();
        let ratio = previous.map_or(String::from("-"), |p| format!("{:.3}", p / err));
        println!(
            "steps {steps:5}: error {err:.3e}, ratio {ratio}, momentum drift {:.2e}",
            traj.max_momentum_drift().unwrap_or(0.0)
        );
        previous = Some(err);
    }
    Ok(())
}
