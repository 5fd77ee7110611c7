use websurf_core::experiments::{read_records, run_webgraph_bound_experiment, summarize, ExperimentSpec};
use websurf_core::{SeedSpec, Variant};

#[test]
fn webgraph_experiment_outputs_reproduce() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = ExperimentSpec::new("pipeline", Variant::PageRankSelection, SeedSpec::new(11, 0));
    spec.n = vec![300];
    spec.d = vec![1, 3];
    spec.p = vec![0.4];
    spec.beta = vec![0.0, 0.5];
    spec.trials = 5;
    spec.out = Some(dir.path().join("a.csv"));
    let first = run_webgraph_bound_experiment(&spec).unwrap();
    assert!(first.passed());
    assert!(first.check("diameter-decreases-with-d").unwrap().soft);

    let records = read_records(&dir.path().join("a.csv")).unwrap();
    assert_eq!(records.len(), 2 * 2 * 5);
    let again = summarize(&records);
    for (a, b) in first.groups.iter().zip(&again) {
        assert!((a.mean_height_ratio - b.mean_height_ratio).abs() <= 1e-12);
        assert!((a.mean_diameter_ratio - b.mean_diameter_ratio).abs() <= 1e-12);
        assert_eq!(a.max_diameter, b.max_diameter);
    }

    spec.out = Some(dir.path().join("b.csv"));
    run_webgraph_bound_experiment(&spec).unwrap();
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
    let sidecar: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a.json")).unwrap()).unwrap();
    assert_eq!(sidecar["spec"]["name"], "pipeline");
    assert!(sidecar["summary"]["note"].as_str().unwrap().contains("asymptotically"));
}
