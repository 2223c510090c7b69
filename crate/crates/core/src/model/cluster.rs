use super::{ParametricCtmc, RetainedSet, Valuation};
use crate::scalar::rational_to_f64;
use std::sync::Arc;

pub const DEFAULT_CLUSTER_RADIUS: f64 = 0.5;

/// Group of valuations sharing the retained state set of a partial model.
#[derive(Debug, Clone)]
pub struct ValuationCluster {
    /// Index of the representative in the input list.
    pub representative: usize,
    /// Indices of all members, representative included, ascending.
    pub members: Vec<usize>,
    pub retained_state_set: Option<Arc<RetainedSet>>,
}

/// Greedy leader clustering in standardised coordinates: each valuation joins
/// the first cluster whose representative lies within `radius`, otherwise it
/// opens a new cluster.
pub fn cluster_valuations(
    m: &ParametricCtmc,
    us: &[Valuation],
    radius: f64,
) -> Vec<ValuationCluster> {
    let scales: Vec<f64> = m
        .parameters
        .iter()
        .map(|p| p.distribution.scale())
        .collect();
    cluster_points(
        &us.iter()
            .map(|u| {
                u.iter()
                    .zip(&scales)
                    .map(|(x, s)| rational_to_f64(x) / s)
                    .collect()
            })
            .collect::<Vec<Vec<f64>>>(),
        radius,
    )
}

/// Leader clustering of points that are already standardised.
pub fn cluster_points(points: &[Vec<f64>], radius: f64) -> Vec<ValuationCluster> {
    let mut clusters: Vec<ValuationCluster> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let home = clusters.iter_mut().find(|c| {
            let r = &points[c.representative];
            let d2: f64 = r.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
            d2.sqrt() <= radius
        });
        match home {
            Some(c) => c.members.push(i),
            None => clusters.push(ValuationCluster {
                representative: i,
                members: vec![i],
                retained_state_set: None,
            }),
        }
    }
    clusters
}
