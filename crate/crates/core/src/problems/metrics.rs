use super::{BilinearProblem, SaddleProblem};
use crate::error::{Error, Result};
use crate::space::{Iterate, FEASIBILITY_TOL};

/// KKT residual of the box-constrained bilinear game:
///
/// `sqrt(‖x − Π(x − (Ay + b))‖² + ‖y − Π(y + (Aᵀx + c))‖²)`.
///
/// Defined for any point of matching dimension, feasible or not.
pub fn kkt_residual(p: &BilinearProblem, z: &Iterate) -> f64 {
    let gx = p.x_gradient(z.y());
    let gy = p.y_gradient(z.x());
    let x_part: f64 = z
        .x()
        .iter()
        .zip(&gx)
        .map(|(x, g)| {
            let d = x - (x - g).clamp(-1.0, 1.0);
            d * d
        })
        .sum();
    let y_part: f64 = z
        .y()
        .iter()
        .zip(&gy)
        .map(|(y, g)| {
            let d = y - (y + g).clamp(-1.0, 1.0);
            d * d
        })
        .sum();
    (x_part + y_part).sqrt()
}

/// Closed-form duality gap of the expected objective over the box:
///
/// `max_y' F(x, y') − min_x' F(x', y) = bᵀx + ‖Aᵀx + c‖₁ − cᵀy + ‖Ay + b‖₁`.
pub fn duality_gap(p: &BilinearProblem, z: &Iterate) -> Result<f64> {
    check_point(p, z)?;
    let set = p.feasible_set();
    let excess = set.violation(z.as_slice());
    if excess > FEASIBILITY_TOL {
        return Err(Error::Domain(format!(
            "duality gap needs a feasible point; point lies {excess:e} outside the box"
        )));
    }
    let bx: f64 = p.b().iter().zip(z.x()).map(|(b, x)| b * x).sum();
    let cy: f64 = p.c().iter().zip(z.y()).map(|(c, y)| c * y).sum();
    let best_y: f64 = p.y_gradient(z.x()).iter().map(|v| v.abs()).sum();
    let best_x: f64 = p.x_gradient(z.y()).iter().map(|v| v.abs()).sum();
    Ok(bx + best_y - cy + best_x)
}

/// Both sides of the gap-versus-regret inequality for a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretCheck {
    /// `T · DualGap(z̄)` with `z̄` the mean iterate.
    pub gap: f64,
    /// `sup_{z ∈ box} Σ_t ⟨z_t − z, G(z_t)⟩ = Σ_t ⟨z_t, G(z_t)⟩ + ‖Σ_t G(z_t)‖₁`.
    pub regret_sup: f64,
}

impl RegretCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.gap <= self.regret_sup + tol
    }
}

pub fn regret_bound_check(p: &BilinearProblem, iterates: &[Iterate]) -> Result<RegretCheck> {
    let first = iterates
        .first()
        .ok_or_else(|| Error::Usage("regret check needs at least one iterate".into()))?;
    check_point(p, first)?;
    let mut mean = Iterate::zeros(p.n(), p.n());
    let mut grad_sum = Iterate::zeros(p.n(), p.n());
    let mut inner = 0.0;
    for z in iterates {
        check_point(p, z)?;
        let g = p.operator(z);
        inner += z.dot(&g);
        grad_sum.axpy(1.0, &g);
        mean.axpy(1.0, z);
    }
    let t = iterates.len() as f64;
    mean.scale(1.0 / t);
    Ok(RegretCheck {
        gap: t * duality_gap(p, &mean)?,
        regret_sup: inner + grad_sum.norm_l1(),
    })
}

fn check_point(p: &BilinearProblem, z: &Iterate) -> Result<()> {
    if z.x_dim() != p.n() {
        return Err(Error::Dimension {
            expected: p.n(),
            got: z.x_dim(),
        });
    }
    if z.y_dim() != p.n() {
        return Err(Error::Dimension {
            expected: p.n(),
            got: z.y_dim(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::RngStream;
    use proptest::prelude::*;

    fn xy_game() -> BilinearProblem {
        BilinearProblem::new(vec![1.0], vec![0.0], vec![0.0], 0.0).unwrap()
    }

    fn pt(x: f64, y: f64) -> Iterate {
        Iterate::new(vec![x], vec![y])
    }

    /// Gap by enumerating the 2ⁿ vertices of each block; `F` is linear in each
    /// block so the extrema sit at vertices.
    fn brute_force_gap(p: &BilinearProblem, z: &Iterate) -> f64 {
        let n = p.n();
        let vertex = |mask: u32| -> Vec<f64> {
            (0..n)
                .map(|k| if mask >> k & 1 == 1 { 1.0 } else { -1.0 })
                .collect()
        };
        let mut best_y = f64::NEG_INFINITY;
        let mut best_x = f64::INFINITY;
        for mask in 0..(1u32 << n) {
            let v = vertex(mask);
            best_y = best_y.max(p.objective(&Iterate::new(z.x().to_vec(), v.clone())));
            best_x = best_x.min(p.objective(&Iterate::new(v, z.y().to_vec())));
        }
        best_y - best_x
    }

    #[test]
    fn residual_examples() {
        let p = xy_game();
        assert_eq!(kkt_residual(&p, &pt(0.0, 0.0)), 0.0);
        assert_eq!(kkt_residual(&p, &pt(1.0, 1.0)), 1.0);
    }

    #[test]
    fn gap_examples() {
        let p = xy_game();
        assert_eq!(duality_gap(&p, &pt(0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(duality_gap(&p, &pt(1.0, 1.0)).unwrap(), 2.0);
    }

    #[test]
    fn gap_rejects_infeasible_points() {
        let p = xy_game();
        assert!(matches!(
            duality_gap(&p, &pt(1.5, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            duality_gap(&p, &Iterate::new(vec![0.0, 0.0], vec![0.0])),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn regret_examples() {
        let p = xy_game();
        let at_saddle = regret_bound_check(&p, &[pt(0.0, 0.0)]).unwrap();
        assert_eq!(at_saddle.gap, 0.0);
        assert!(at_saddle.holds(0.0));

        let corner = regret_bound_check(&p, &[pt(1.0, 1.0)]).unwrap();
        assert_eq!(corner.gap, 2.0);
        assert_eq!(corner.regret_sup, 2.0);
        assert!(corner.holds(0.0));

        assert!(matches!(regret_bound_check(&p, &[]), Err(Error::Usage(_))));
    }

    #[test]
    fn closed_form_gap_matches_vertex_enumeration() {
        for seed in 0..50u64 {
            let n = 1 + (seed % 4) as usize;
            let p = BilinearProblem::generate_seeded(n, 0.0, seed).unwrap();
            let mut s = RngStream::new(seed, 0);
            let z = Iterate::from_flat(s.uniform_draw(2 * n, -1.0, 1.0), n).unwrap();
            let closed = duality_gap(&p, &z).unwrap();
            let brute = brute_force_gap(&p, &z);
            assert!(
                (closed - brute).abs() < 1e-10,
                "seed {seed}: {closed} vs {brute}"
            );
        }
    }

    #[test]
    fn residual_zero_iff_gap_zero_on_grid() {
        // xy over the square has the unique saddle (0, 0).
        let p = xy_game();
        let steps = 40;
        for i in 0..=steps {
            for j in 0..=steps {
                let z = pt(
                    -1.0 + 2.0 * i as f64 / steps as f64,
                    -1.0 + 2.0 * j as f64 / steps as f64,
                );
                let res_zero = kkt_residual(&p, &z) == 0.0;
                let gap_zero = duality_gap(&p, &z).unwrap() == 0.0;
                assert_eq!(res_zero, gap_zero, "at {z:?}");
            }
        }
    }

    proptest! {
        #[test]
        fn gap_and_residual_nonnegative(seed in 0u64..1000, n in 1usize..6, coords in prop::collection::vec(-1.0f64..=1.0, 10)) {
            let p = BilinearProblem::generate_seeded(n, 0.1, seed).unwrap();
            let z = Iterate::from_flat(coords[..2 * n].to_vec(), n).unwrap();
            prop_assert!(duality_gap(&p, &z).unwrap() >= 0.0);
            prop_assert!(kkt_residual(&p, &z) >= 0.0);
        }

        #[test]
        fn regret_dominates_gap(seed in 0u64..1000, len in 1usize..20) {
            let n = 3;
            let p = BilinearProblem::generate_seeded(n, 0.1, seed).unwrap();
            let mut s = RngStream::new(seed, 1);
            let iterates: Vec<Iterate> = (0..len)
                .map(|_| Iterate::from_flat(s.uniform_draw(2 * n, -1.0, 1.0), n).unwrap())
                .collect();
            let check = regret_bound_check(&p, &iterates).unwrap();
            prop_assert!(check.holds(1e-9), "{check:?}");
        }
    }
}
