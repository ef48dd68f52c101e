use opcone::algebra::{FDAlgebra, FDAlgebraFile};
use opcone::domar::GridFunction;
use opcone::examples::{ExampleName, ExampleSpec};
use opcone::matrix::{dist, identity, matrix_from_json, matrix_to_json};
use opcone::ocpmap::{MatrixMap, MatrixMapFile};
use opcone::sample::{random_matrix, rng_from_seed};
use opcone::Tolerances;

fn through_file<T: serde::Serialize + serde::de::DeserializeOwned>(value: &T) -> T {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("x.json");
    std::fs::write(&p, serde_json::to_string_pretty(value).unwrap()).unwrap();
    serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap()
}

#[test]
fn matrices_round_trip_exactly() {
    let mut rng = rng_from_seed(4);
    let x = random_matrix(&mut rng, 5);
    let back = matrix_from_json(&matrix_to_json(&x).to_string()).unwrap();
    assert_eq!(back, x);
    assert!(matrix_from_json(r#"{"dim": 2, "entries": [[1, 0]]}"#).is_err());
}

#[test]
fn algebras_round_trip() {
    let t = Tolerances::default();
    let a = FDAlgebra::upper_triangular(3, &t).unwrap();
    let f: FDAlgebraFile = through_file(&a.to_file());
    let b = FDAlgebra::from_file(&f, &t).unwrap();
    assert!(b.space().equals(a.space()));
    assert!(dist(b.unit().unwrap(), &identity(3)) < 1e-10);

    let mut bad = a.to_file();
    bad.unital = false;
    assert!(FDAlgebra::from_file(&bad, &t).is_err());
}

#[test]
fn non_closed_spans_are_rejected() {
    let t = Tolerances::default();
    let json = r#"{"ambient_dim": 2, "basis": [{"dim": 2, "entries": [[0,0],[1,0],[0,0],[0,0]]}], "unital": false}"#;
    // E12 alone is closed (E12² = 0); add E21 and closure fails
    assert!(FDAlgebra::from_json(json, &t).is_ok());
    let json = r#"{"ambient_dim": 2, "basis": [{"dim": 2, "entries": [[0,0],[1,0],[0,0],[0,0]]}, {"dim": 2, "entries": [[0,0],[0,0],[1,0],[0,0]]}], "unital": false}"#;
    assert!(FDAlgebra::from_json(json, &t).is_err());
}

#[test]
fn maps_round_trip() {
    let t = MatrixMap::transpose(3).unwrap();
    let f: MatrixMapFile = through_file(&t.to_file());
    let back = MatrixMap::from_file(&f).unwrap();
    let mut rng = rng_from_seed(8);
    let x = random_matrix(&mut rng, 3);
    assert!(dist(&back.apply(&x).unwrap(), &x.transpose()) < 1e-15);
}

#[test]
fn grid_functions_parse() {
    let f = GridFunction::from_json(r#"{"h": 0.5, "coeffs": [[0, 0], [1, 0], [0, 2]]}"#).unwrap();
    assert_eq!(f.len(), 3);
    assert!(GridFunction::from_json(r#"{"h": -1, "coeffs": [[1, 0]]}"#).is_err());
}

#[test]
fn examples_serialize() {
    let t = Tolerances::default();
    let v = ExampleSpec::new(ExampleName::Rdr, 4).unwrap().build_json(&t).unwrap();
    let alg = FDAlgebra::from_json(&v["algebra"].to_string(), &t).unwrap();
    assert_eq!(alg.dim(), 4);
    assert!(ExampleSpec::new(ExampleName::Volterra, 1).is_err());
}
