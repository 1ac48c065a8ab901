use crate::error::{Error, Result};
use crate::space::Iterate;

/// Server-side average of worker iterates together with the weights used.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub iterate: Iterate,
    pub weights: Vec<f64>,
}

/// Inverse-step-size weighted average: `w_m = η_m⁻¹ / Σ η_m'⁻¹`.
///
/// Reports are reduced in the order given.
pub fn server_aggregate(reports: &[(f64, &Iterate)]) -> Result<Aggregate> {
    let (_, first) = reports
        .first()
        .ok_or_else(|| Error::Protocol("server received no reports".into()))?;
    for (m, (eta, z)) in reports.iter().enumerate() {
        if !(eta.is_finite() && *eta > 0.0) {
            return Err(Error::Protocol(format!(
                "worker {m} reported step size {eta}"
            )));
        }
        first.check_shape(z)?;
    }
    let inv_total: f64 = reports.iter().map(|(eta, _)| 1.0 / eta).sum();
    let weights: Vec<f64> = reports
        .iter()
        .map(|(eta, _)| (1.0 / eta) / inv_total)
        .collect();
    Ok(Aggregate {
        iterate: weighted_sum(reports.iter().map(|(_, z)| *z), &weights, first),
        weights,
    })
}

/// Unweighted mean, the communication rule of the fixed-step baselines.
pub fn plain_average(iterates: &[&Iterate]) -> Result<Aggregate> {
    let first = iterates
        .first()
        .ok_or_else(|| Error::Protocol("server received no reports".into()))?;
    for z in iterates {
        first.check_shape(z)?;
    }
    let weights = vec![1.0 / iterates.len() as f64; iterates.len()];
    Ok(Aggregate {
        iterate: weighted_sum(iterates.iter().copied(), &weights, first),
        weights,
    })
}

fn weighted_sum<'a>(
    iterates: impl Iterator<Item = &'a Iterate>,
    weights: &[f64],
    like: &Iterate,
) -> Iterate {
    if weights.len() == 1 {
        return like.clone();
    }
    let mut out = Iterate::zeros(like.x_dim(), like.y_dim());
    for (z, w) in iterates.zip(weights) {
        out.axpy(*w, z);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> Iterate {
        Iterate::new(vec![v], vec![])
    }

    #[test]
    fn equal_etas_give_plain_mean() {
        let zs: Vec<Iterate> = (0..4).map(|i| scalar(i as f64)).collect();
        let reports: Vec<(f64, &Iterate)> = zs.iter().map(|z| (0.7, z)).collect();
        let agg = server_aggregate(&reports).unwrap();
        assert_eq!(agg.weights, vec![0.25; 4]);
        assert_eq!(agg.iterate, scalar(1.5));
    }

    #[test]
    fn inverse_eta_weighting() {
        let (a, b) = (scalar(0.0), scalar(3.0));
        let agg = server_aggregate(&[(1.0, &a), (2.0, &b)]).unwrap();
        assert!((agg.weights[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((agg.weights[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((agg.iterate.as_slice()[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_report_passes_through() {
        let z = Iterate::new(vec![0.1, 0.2], vec![-0.3]);
        let agg = server_aggregate(&[(0.4, &z)]).unwrap();
        assert_eq!(agg.iterate, z);
        assert_eq!(agg.weights, vec![1.0]);
    }

    #[test]
    fn protocol_errors() {
        assert!(matches!(server_aggregate(&[]), Err(Error::Protocol(_))));
        let z = scalar(1.0);
        assert!(matches!(
            server_aggregate(&[(0.0, &z)]),
            Err(Error::Protocol(_))
        ));
        assert!(matches!(
            server_aggregate(&[(f64::NAN, &z)]),
            Err(Error::Protocol(_))
        ));
        let w = Iterate::new(vec![1.0, 2.0], vec![]);
        assert!(matches!(
            server_aggregate(&[(1.0, &z), (1.0, &w)]),
            Err(Error::Dimension { .. })
        ));
        assert!(plain_average(&[]).is_err());
    }

    #[test]
    fn weights_normalized() {
        let zs: Vec<Iterate> = (0..7).map(|i| scalar(i as f64)).collect();
        let etas = [0.1, 0.33, 1.7, 2.0, 1e-3, 0.9, 5.5];
        let reports: Vec<(f64, &Iterate)> = etas.iter().copied().zip(zs.iter()).collect();
        let agg = server_aggregate(&reports).unwrap();
        let total: f64 = agg.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(agg.weights.iter().all(|w| *w > 0.0));
        let v = agg.iterate.as_slice()[0];
        assert!((0.0..=6.0).contains(&v));
    }
}
