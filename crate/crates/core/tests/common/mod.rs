#![allow(dead_code)]

use localadaseg::problems::BilinearProblem;
use localadaseg::simulator::{Topology, Trajectory};
use localadaseg::space::Iterate;

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("no NaN"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Noise-free objective evaluated directly from the matrix entries.
pub fn objective(p: &BilinearProblem, x: &[f64], y: &[f64]) -> f64 {
    let n = p.n();
    let mut f = 0.0;
    for i in 0..n {
        for (j, yj) in y.iter().enumerate() {
            f += x[i] * p.a_at(i, j) * yj;
        }
        f += p.b()[i] * x[i] + p.c()[i] * y[i];
    }
    f
}

fn vertex(n: usize, mask: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if mask >> i & 1 == 1 { 1.0 } else { -1.0 })
        .collect()
}

/// Duality gap on the unit box by enumerating all `2^n` vertices of each block.
/// Linear objectives attain their extrema at vertices.
pub fn brute_force_gap(p: &BilinearProblem, z: &Iterate) -> f64 {
    let n = p.n();
    let (x, y) = (z.x(), z.y());
    let mut best_y = f64::NEG_INFINITY;
    let mut best_x = f64::INFINITY;
    for mask in 0..1usize << n {
        let v = vertex(n, mask);
        best_y = best_y.max(objective(p, x, &v));
        best_x = best_x.min(objective(p, &v, y));
    }
    best_y - best_x
}

/// `sup_z Σ_t ⟨z_t − z, G(z_t)⟩` over the box, with `G` assembled from the
/// matrix entries.
pub fn regret_sup(p: &BilinearProblem, iterates: &[Iterate]) -> f64 {
    let n = p.n();
    let mut inner = 0.0;
    let mut sum = vec![0.0; 2 * n];
    for z in iterates {
        for i in 0..n {
            let mut gx = p.b()[i];
            let mut gy = -p.c()[i];
            for j in 0..n {
                gx += p.a_at(i, j) * z.y()[j];
                gy -= p.a_at(j, i) * z.x()[j];
            }
            inner += z.x()[i] * gx + z.y()[i] * gy;
            sum[i] += gx;
            sum[n + i] += gy;
        }
    }
    inner + sum.iter().map(|s| s.abs()).sum::<f64>()
}

/// Checks every recorded step and communication of a traced run. Returns one
/// message per violated invariant.
pub fn check_invariants(topology: &Topology, traj: &Trajectory) -> Vec<String> {
    let mut bad = Vec::new();
    let trace = traj.trace.as_ref().expect("run must be traced");
    let adaptive = topology.solver.is_adaptive();
    for (m, steps) in trace.steps.iter().enumerate() {
        for (i, s) in steps.iter().enumerate() {
            if s.violation > 1e-12 {
                bad.push(format!(
                    "worker {m} step {}: infeasible by {:e}",
                    s.step, s.violation
                ));
            }
            if s.next_eta > s.eta {
                bad.push(format!("worker {m} step {}: step size grew", s.step));
            }
            if let Some(next) = steps.get(i + 1) {
                if next.eta != s.next_eta {
                    bad.push(format!(
                        "worker {m} step {}: step size changed outside an update",
                        s.step
                    ));
                }
            }
            if s.half_anchor_dist > s.eta * s.probe_norm * (1.0 + 1e-12) + 1e-15 {
                bad.push(format!(
                    "worker {m} step {}: half step {:e} exceeds eta*|M| {:e}",
                    s.step,
                    s.half_anchor_dist,
                    s.eta * s.probe_norm
                ));
            }
            if adaptive {
                let lhs = s.next_eta * (topology.g0 * topology.g0 + s.accumulator).sqrt();
                if (lhs - s.d_alpha).abs() > 1e-12 {
                    bad.push(format!(
                        "worker {m} step {}: eta*sqrt(G0^2+acc) = {lhs} != {}",
                        s.step, s.d_alpha
                    ));
                }
                if i == 0 && (s.eta * topology.g0 - s.d_alpha).abs() > 1e-12 {
                    bad.push(format!("worker {m}: first step size is not D*alpha/G0"));
                }
            }
        }
    }
    for comm in &trace.communications {
        let total: f64 = comm.weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            bad.push(format!("round {}: weights sum to {total}", comm.round));
        }
        let first: Vec<u64> = comm.anchors[0]
            .as_slice()
            .iter()
            .map(|v| v.to_bits())
            .collect();
        for (m, a) in comm.anchors.iter().enumerate() {
            let bits: Vec<u64> = a.as_slice().iter().map(|v| v.to_bits()).collect();
            if bits != first {
                bad.push(format!(
                    "round {}: worker {m} anchor differs after broadcast",
                    comm.round
                ));
            }
        }
    }
    if trace.communications.len() != topology.rounds + 1 {
        bad.push(format!(
            "{} communications for {} rounds",
            trace.communications.len(),
            topology.rounds
        ));
    }
    if traj.total_samples != topology.expected_oracle_calls() {
        bad.push(format!(
            "{} oracle calls, expected {}",
            traj.total_samples,
            topology.expected_oracle_calls()
        ));
    }
    if traj
        .final_output
        .as_slice()
        .iter()
        .any(|v| v.abs() > 1.0 + 1e-12)
    {
        bad.push("output average left the box".into());
    }
    bad
}
