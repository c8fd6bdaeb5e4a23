//! File formats: scenario configs and CSV output.

use std::path::PathBuf;

use sublab::lab::{CollapseRecord, CollapseRun, ScenarioConfig, ScenarioId, WarpKind, CSV_HEADER};
use sublab::metric_space::FiniteMetricSpace;

fn configs() -> Vec<PathBuf> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    out.sort();
    out
}

#[test]
fn shipped_configs_parse_and_validate() {
    let all = configs();
    assert_eq!(all.len(), 4);
    for path in all {
        let cfg = ScenarioConfig::load(&path).unwrap();
        assert_eq!(cfg.scenario_id, ScenarioId::ProductTorus);
        assert_eq!(cfg.n_list, vec![1, 2, 4, 8, 16]);
        let fam = cfg.warp_family().unwrap();
        for &n in &cfg.n_list {
            assert!(fam.member(n).validate(&sublab::geom::catalog::circle(1.0)).is_ok());
        }
        assert_eq!(
            cfg.out_path.to_str().unwrap(),
            path.with_extension("csv").file_name().unwrap().to_str().unwrap()
        );
    }
}

#[test]
fn config_fields_map_one_to_one() {
    let cfg = ScenarioConfig::from_toml_str(
        "scenario_id = \"product-sphere-circle\"\nbase_resolution = 6\nfiber_resolution = 5\n\
         sphere_fiber_resolution = 7\np = 0.5\nq = 2.0\nwarp_kind = \"separable\"\n\
         warp_params = [0.3, 0.5, -0.2]\nn_list = [3, 9]\nseed = 42\nout_path = \"x/y.csv\"\n",
    )
    .unwrap();
    assert_eq!(cfg.scenario_id, ScenarioId::ProductSphereCircle);
    assert_eq!((cfg.base_resolution, cfg.fiber_resolution, cfg.sphere_fiber_resolution), (6, 5, 7));
    assert_eq!((cfg.p, cfg.q), (0.5, 2.0));
    assert_eq!(cfg.warp_kind, WarpKind::Separable);
    assert_eq!(cfg.seed, 42);
    let s = cfg.scenario().unwrap();
    assert_eq!(s.total_resolution, vec![6, 6, 5]);
    assert_eq!(s.sphere_resolution, 7);
}

#[test]
fn collapse_csv_layout() {
    let run = CollapseRun {
        records: vec![
            CollapseRecord { n: 1, sup_f: 1.0, gh_total_base: 0.5, gh_bundle_sm: 0.25, criterion_eps: 1.5 },
            CollapseRecord { n: 2, sup_f: 0.5, gh_total_base: 0.125, gh_bundle_sm: 1e-3, criterion_eps: f64::INFINITY },
        ],
        eps_grid: vec![0.1, 1.0],
        mesh: 0.1,
    };
    let mut buf = Vec::new();
    run.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text, "n,sup_f,gh_total_base,gh_bundle_sm,criterion_eps\n1,1,0.5,0.25,1.5\n2,0.5,0.125,0.001,inf\n");
    assert_eq!(CSV_HEADER.join(","), text.lines().next().unwrap());

    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    for rec in rdr.records() {
        for field in rec.unwrap().iter() {
            field.parse::<f64>().unwrap();
        }
    }
}

#[test]
fn metric_space_csv_accepts_infinite_distances() {
    let text = "a,b\n0,inf\ninf,0\n";
    let x = FiniteMetricSpace::read_csv(text.as_bytes()).unwrap();
    assert_eq!(x.d(0, 1), f64::INFINITY);
    let mut buf = Vec::new();
    x.write_csv(&mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), text);
    assert!(FiniteMetricSpace::read_csv("a,b\n0,1\n2,0\n".as_bytes()).is_err());
    assert!(FiniteMetricSpace::read_csv("a,b\n0,x\n1,0\n".as_bytes()).is_err());
}
