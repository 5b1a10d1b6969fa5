use hho::driver::{aitken_extrapolate, benchmark, read_csv, run_afem, write_csv, AfemConfig, BenchmarkId};
use hho::mesh::{domains, refine_nvb, uniform_refine};

#[test]
fn optimal_design_square_extrapolates_to_reference() {
    let bench = benchmark(BenchmarkId::OdpSquare);
    let config = AfemConfig { k: 2, theta: 1.0, max_ndof: 30_000, ..Default::default() };
    let run = run_afem(&bench, &config).unwrap();
    let eh: Vec<f64> = run.records.iter().map(|r| r.eh).collect();
    let x = aitken_extrapolate(&eh).unwrap();
    assert!(!x.degenerate);
    assert!((x.value + 0.011181337).abs() < 1e-6, "{}", x.value);
}

/// Triangles as sorted vertex coordinates, in a canonical order.
fn shape(mesh: &hho::mesh::Mesh) -> Vec<[[u64; 2]; 3]> {
    let v = mesh.vertices();
    let mut tris: Vec<[[u64; 2]; 3]> = mesh
        .triangles()
        .iter()
        .map(|t| {
            let mut c = t.map(|i| [v[i][0].to_bits(), v[i][1].to_bits()]);
            c.sort_unstable();
            c
        })
        .collect();
    tris.sort_unstable();
    tris
}

#[test]
fn two_bisections_of_everything_are_uniform_refinement() {
    for mesh in [domains::unit_square(), domains::lshape()] {
        let mut a = mesh.clone();
        let mut b = mesh;
        for _ in 0..3 {
            for _ in 0..2 {
                let all: Vec<usize> = (0..a.n_triangles()).collect();
                a = refine_nvb(&a, &all).mesh;
            }
            b = uniform_refine(&b).mesh;
            assert_eq!(shape(&a), shape(&b));
        }
    }
}

#[test]
fn history_is_reproducible_and_survives_csv() {
    let bench = benchmark(BenchmarkId::PLaplaceLShape);
    let config = AfemConfig { k: 1, theta: 0.5, max_ndof: 3_000, ..Default::default() };
    let first = run_afem(&bench, &config).unwrap().records;
    let second = run_afem(&bench, &config).unwrap().records;
    assert!(first.len() >= 3);
    for (a, b) in first.iter().zip(&second) {
        let mut b = b.clone();
        b.seconds = a.seconds;
        assert_eq!(a, &b);
    }
    let mut buf = Vec::new();
    write_csv(&mut buf, &first).unwrap();
    assert_eq!(read_csv(buf.as_slice()).unwrap(), first);
    assert!(first.windows(2).all(|w| w[0].ndof < w[1].ndof));
}
