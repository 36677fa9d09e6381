//! File formats and report types for the `cyclecut` CLI: JSON
//! serialization of ear scripts and decomposition reports, plus the
//! instance generator shared by `bench` and the acceptance suite.

use cyclecut_core::{EarScript, Multigraph, ScriptStep};
use serde::{Deserialize, Serialize};

/// JSON form of one script step: `{"subdivide": i}` or `{"ear": [..]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StepJson {
    Subdivide { subdivide: u32 },
    Ear { ear: Vec<u32> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialJson {
    pub nodes: usize,
    pub cycle: Vec<(u32, u32)>,
}

/// JSON form of an [`EarScript`]; `seed` is carried only for generated
/// instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptJson {
    pub initial: InitialJson,
    pub steps: Vec<StepJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub expected_c: usize,
}

impl ScriptJson {
    pub fn from_script(s: &EarScript, seed: Option<u64>) -> Self {
        ScriptJson {
            initial: InitialJson { nodes: s.initial_nodes, cycle: s.initial_cycle.clone() },
            steps: s
                .steps
                .iter()
                .map(|st| match st {
                    ScriptStep::Subdivide { edge } => StepJson::Subdivide { subdivide: *edge },
                    ScriptStep::Ear { path } => StepJson::Ear { ear: path.clone() },
                })
                .collect(),
            seed,
            expected_c: s.expected_c(),
        }
    }

    pub fn into_script(self) -> EarScript {
        EarScript {
            initial_nodes: self.initial.nodes,
            initial_cycle: self.initial.cycle,
            steps: self
                .steps
                .into_iter()
                .map(|st| match st {
                    StepJson::Subdivide { subdivide } => ScriptStep::Subdivide { edge: subdivide },
                    StepJson::Ear { ear } => ScriptStep::Ear { path: ear },
                })
                .collect(),
        }
    }
}

/// Top-level CLI report, stable for scripting (see docs/report.schema.json).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<usize>,
    /// One edge-id list per cycle, over the whole input graph.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycles: Option<Vec<Vec<u32>>>,
    /// One recovered construction script per connected component.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ears: Option<Vec<ScriptJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Report {
    pub fn error(reason: String) -> Self {
        Report {
            status: "error".into(),
            c: None,
            cycles: None,
            ears: None,
            reason: Some(reason),
        }
    }
}

/// Deterministic instance with exactly `edges` edges, used by `bench`
/// and the scaling acceptance test. A base script supplies the ears;
/// extra subdivisions (one new edge each) pad to the exact size.
pub fn bench_instance(seed: u64, edges: usize) -> Multigraph {
    use rand::{Rng, SeedableRng};
    let ears = edges / 8;
    let mut script = cyclecut_core::random_script(seed, ears, edges / 8);
    let (base, _) = cyclecut_core::apply_script(&script).expect("generated script replays");
    assert!(base.edge_count() <= edges, "base instance overshot the target size");
    // pad with subdivisions (one new edge each) up to the exact size
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    for m in base.edge_count()..edges {
        script.steps.push(ScriptStep::Subdivide { edge: rng.random_range(0..m as u32) });
    }
    let (g, _) = cyclecut_core::apply_script(&script).expect("padded script replays");
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use cyclecut_core::random_script;

    #[test]
    fn script_json_round_trip() {
        let s = random_script(3, 4, 2);
        let j = ScriptJson::from_script(&s, Some(3));
        let text = serde_json::to_string(&j).unwrap();
        let back: ScriptJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, j);
        assert_eq!(back.into_script(), s);
    }

    #[test]
    fn step_json_shapes() {
        let text = r#"[{"subdivide":3},{"ear":[0,1,2]}]"#;
        let steps: Vec<StepJson> = serde_json::from_str(text).unwrap();
        assert_eq!(
            steps,
            vec![StepJson::Subdivide { subdivide: 3 }, StepJson::Ear { ear: vec![0, 1, 2] }]
        );
        assert_eq!(serde_json::to_string(&steps).unwrap(), text);
    }

    #[test]
    fn bench_instance_is_exact_and_deterministic() {
        let g = bench_instance(5, 400);
        assert_eq!(g.edge_count(), 400);
        assert_eq!(bench_instance(5, 400), g);
        assert_eq!(cyclecut_core::run(&g).cycle_count(), Some(400 / 8 + 1));
    }
}
