//! Station placement: macro cells on a line, small cells by hard-core
//! rejection sampling inside their parent's disc.

use rand::Rng;

use super::EnvError;
use crate::config::ScenarioConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    pub mbs_positions: Vec<Point>,
    pub sbs_positions: Vec<Point>,
    /// Index into `mbs_positions` of the macro cell covering each small cell.
    pub sbs_parent: Vec<usize>,
}

impl Topology {
    pub fn n_sbs(&self) -> usize {
        self.sbs_positions.len()
    }

    pub fn n_mbs(&self) -> usize {
        self.mbs_positions.len()
    }

    /// A topology with every small cell at the origin under macro cell 0.
    /// Useful where geometry is irrelevant (the cost model only reads parents).
    pub fn star(n_sbs: usize) -> Self {
        Self {
            mbs_positions: vec![Point { x: 0.0, y: 0.0 }],
            sbs_positions: vec![Point { x: 0.0, y: 0.0 }; n_sbs],
            sbs_parent: vec![0; n_sbs],
        }
    }

    /// Smallest pairwise small-cell distance, `inf` for fewer than two cells.
    pub fn min_sbs_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.sbs_positions.iter().enumerate() {
            for b in &self.sbs_positions[i + 1..] {
                best = best.min(a.distance(b));
            }
        }
        best
    }
}

/// Places the stations of `config`.
///
/// Macro cells sit on the x-axis, one diameter apart, the first at the origin.
/// Each small cell picks a parent uniformly, then draws positions uniformly in
/// the parent's disc until one keeps `sbs_min_dist_m` from every cell placed so
/// far. A cell that exhausts `placement_retries` draws fails the whole request.
pub fn generate_topology<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<Topology, EnvError> {
    let radius = config.mbs_radius_m;
    let mbs_positions: Vec<Point> = (0..config.n_mbs)
        .map(|m| Point {
            x: 2.0 * radius * m as f64,
            y: 0.0,
        })
        .collect();

    let mut sbs_positions: Vec<Point> = Vec::with_capacity(config.n_sbs);
    let mut sbs_parent = Vec::with_capacity(config.n_sbs);
    for index in 0..config.n_sbs {
        let parent = rng.random_range(0..config.n_mbs);
        let center = mbs_positions[parent];
        let mut placed = None;
        for _ in 0..config.placement_retries.max(1) {
            let r = radius * rng.random::<f64>().sqrt();
            let angle = std::f64::consts::TAU * rng.random::<f64>();
            let candidate = Point {
                x: center.x + r * angle.cos(),
                y: center.y + r * angle.sin(),
            };
            if sbs_positions
                .iter()
                .all(|p| p.distance(&candidate) >= config.sbs_min_dist_m)
            {
                placed = Some(candidate);
                break;
            }
        }
        match placed {
            Some(p) => {
                sbs_positions.push(p);
                sbs_parent.push(parent);
            }
            None => {
                return Err(EnvError::PlacementFailed {
                    placed: index,
                    requested: config.n_sbs,
                })
            }
        }
    }

    Ok(Topology {
        mbs_positions,
        sbs_positions,
        sbs_parent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check_invariants(topo: &Topology, config: &ScenarioConfig) {
        for (i, a) in topo.sbs_positions.iter().enumerate() {
            let parent = topo.mbs_positions[topo.sbs_parent[i]];
            assert!(a.distance(&parent) <= config.mbs_radius_m);
            for b in &topo.sbs_positions[i + 1..] {
                assert!(a.distance(b) >= config.sbs_min_dist_m);
            }
        }
    }

    #[test]
    fn single_cell_lies_in_macro_disc() {
        let config = ScenarioConfig {
            n_sbs: 1,
            ..Default::default()
        };
        for seed in 0..20 {
            let topo = generate_topology(&config, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(topo.n_sbs(), 1);
            assert!(topo.sbs_positions[0].distance(&topo.mbs_positions[0]) <= 1000.0);
        }
    }

    #[test]
    fn ten_cells_keep_minimum_distance() {
        let config = ScenarioConfig::default();
        let topo = generate_topology(&config, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(topo.n_sbs(), 10);
        assert!(topo.min_sbs_separation() >= 200.0);
        check_invariants(&topo, &config);
    }

    #[test]
    fn seeds_give_distinct_valid_layouts() {
        let config = ScenarioConfig::default();
        let a = generate_topology(&config, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let b = generate_topology(&config, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let again = generate_topology(&config, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_ne!(a.sbs_positions, b.sbs_positions);
        assert_eq!(a, again);
        check_invariants(&a, &config);
        check_invariants(&b, &config);
    }

    #[test]
    fn several_macro_cells() {
        let config = ScenarioConfig {
            n_mbs: 3,
            n_sbs: 20,
            ..Default::default()
        };
        let topo = generate_topology(&config, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        check_invariants(&topo, &config);
    }

    #[test]
    fn over_dense_request_fails() {
        // a 1000 m disc cannot hold 200 points 200 m apart
        let config = ScenarioConfig {
            n_sbs: 200,
            placement_retries: 200,
            ..Default::default()
        };
        let err = generate_topology(&config, &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(matches!(err, EnvError::PlacementFailed { requested: 200, .. }));
    }
}
