mod common;

use common::{all_indices, at, rng};
use kronten::hypergraph::{self, kron_adjacency, kron_hypergraph, kron_isomorphism_witness, kron_support_matches};
use kronten::spectral::{EigenKind, SolverOptions};
use kronten::tensor::kron_vec;
use kronten::Hypergraph;
use nalgebra::DMatrix;

fn complete(k: usize, n: usize) -> Hypergraph {
    use itertools::Itertools;
    Hypergraph::new(k, n, (0..n).combinations(k)).unwrap()
}

fn path() -> Hypergraph {
    Hypergraph::new(3, 4, [vec![0, 1, 2], vec![1, 2, 3]]).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn regular_hypergraph_has_uniform_centrality() {
    let h = complete(3, 4);
    assert!(h.is_regular());
    for kind in [EigenKind::Z, EigenKind::H] {
        let c = h.centrality(kind, &SolverOptions::default()).unwrap();
        assert!(max_diff(&c, &[0.5; 4]) <= 1e-8, "{kind}: {c:?}");
    }
}

#[test]
fn path_centrality_matches_hand_solution() {
    // By symmetry x = (a, b, b, a). Z: b² = λa and 2ab = λb, so b² = 2a² and
    // a = 1/√6. H: b² = λa² and 2ab = λb², so b = 2^{1/3} a.
    let h = path();
    let z = h.centrality(EigenKind::Z, &SolverOptions::default()).unwrap();
    let (a, b) = (1.0 / 6f64.sqrt(), 1.0 / 3f64.sqrt());
    assert!(max_diff(&z, &[a, b, b, a]) <= 1e-8, "{z:?}");

    let hc = h.centrality(EigenKind::H, &SolverOptions::default()).unwrap();
    let r = 2f64.cbrt();
    let a = 1.0 / (2.0 + 2.0 * r * r).sqrt();
    assert!(max_diff(&hc, &[a, r * a, r * a, a]) <= 1e-8, "{hc:?}");
}

#[test]
fn kron_centrality_is_the_product_of_centralities() {
    let (h1, h2) = (complete(3, 4), path());
    let opts = SolverOptions::default();
    let want = kron_vec(
        &h1.centrality(EigenKind::H, &opts).unwrap(),
        &h2.centrality(EigenKind::H, &opts).unwrap(),
    );
    let a = kron_adjacency(&h1, &h2).unwrap();
    let got = hypergraph::tensor_centrality(&a, EigenKind::H, &opts).unwrap();
    assert!(max_diff(&got, &want) <= 1e-6, "{got:?}");
}

#[test]
fn single_edge_clique_expansion() {
    let h = Hypergraph::new(3, 3, [vec![2, 0, 1]]).unwrap();
    let c = h.clique_expansion().unwrap();
    let ones = DMatrix::from_element(3, 3, 1.0) - DMatrix::identity(3, 3);
    assert_eq!(c.counts, ones);
    assert_eq!(c.tensor_view, ones / 2.0);
    assert_eq!(h.edge_degrees(), vec![1, 1, 1]);
}

#[test]
fn clique_tensor_view_of_a_product() {
    let (h1, h2) = (complete(3, 4), path());
    let got = hypergraph::tensor_clique(&kron_adjacency(&h1, &h2).unwrap()).unwrap();
    let want = h1.clique_expansion().unwrap().tensor_view.kronecker(&h2.clique_expansion().unwrap().tensor_view);
    assert!((got - want).abs().max() <= 1e-14);
}

#[test]
fn product_of_two_and_three_edges() {
    let h1 = Hypergraph::new(3, 4, [vec![0, 1, 2], vec![0, 2, 3]]).unwrap();
    let h2 = Hypergraph::new(3, 5, [vec![0, 1, 2], vec![1, 3, 4], vec![0, 2, 4]]).unwrap();
    let p = kron_hypergraph(&h1, &h2).unwrap();
    assert_eq!((p.n(), p.num_edges()), (20, 36));
    assert!(kron_support_matches(&h1, &h2, &p).unwrap());

    // an index of A(H₁)⊗A(H₂) is nonzero exactly when the pair of projected
    // tuples are edges of the factors
    let a = kron_adjacency(&h1, &h2).unwrap();
    for ix in all_indices(a.dims()) {
        let mut u: Vec<usize> = ix.iter().map(|i| i / 5).collect();
        let mut v: Vec<usize> = ix.iter().map(|i| i % 5).collect();
        u.sort_unstable();
        v.sort_unstable();
        let expect = h1.edges().contains(&u) && h2.edges().contains(&v);
        assert_eq!(at(&a, &ix) != 0.0, expect, "{ix:?}");
    }
}

#[test]
fn swapping_factors_is_an_isomorphism() {
    let mut r = rng(31);
    let cases = [
        (Hypergraph::new(3, 3, [vec![0, 1, 2]]).unwrap(), Hypergraph::new(3, 4, [vec![0, 1, 3]]).unwrap()),
        (path(), Hypergraph::random(3, 5, 3, &mut r).unwrap()),
    ];
    for (h1, h2) in cases {
        let w = kron_isomorphism_witness(&h1, &h2).unwrap();
        let p12 = kron_hypergraph(&h1, &h2).unwrap();
        assert_eq!(p12.relabel(&w).unwrap(), kron_hypergraph(&h2, &h1).unwrap());
    }
    let h = path();
    let p = kron_hypergraph(&h, &h).unwrap();
    let w = kron_isomorphism_witness(&h, &h).unwrap();
    assert!(w.iter().enumerate().any(|(i, &j)| i != j));
    assert_eq!(p.relabel(&w).unwrap(), p);
}

#[test]
fn mismatched_uniformity_is_rejected() {
    let h2 = Hypergraph::new(2, 3, [vec![0, 1]]).unwrap();
    assert!(kron_hypergraph(&path(), &h2).is_err());
    assert!(kron_isomorphism_witness(&path(), &h2).is_err());
    assert!(Hypergraph::new(3, 3, [vec![0, 0, 1]]).is_err());
}

#[test]
fn centrality_needs_a_positive_vector() {
    // isolated vertex 3: no strictly positive eigenvector exists
    let h = Hypergraph::new(3, 4, [vec![0, 1, 2]]).unwrap();
    assert!(h.centrality(EigenKind::H, &SolverOptions::default()).is_err());
    assert!(h.centrality(EigenKind::M, &SolverOptions::default()).is_err());
}

#[test]
fn multilinear_ranks_of_adjacency_products_multiply() {
    let mut r = rng(32);
    let rank = |t: &kronten::DenseTensor| t.unfold(0).unwrap().rank(1e-10);
    for _ in 0..3 {
        let h1 = Hypergraph::random(3, 4, 2, &mut r).unwrap();
        let h2 = Hypergraph::random(3, 3, 1, &mut r).unwrap();
        let (a1, a2) = (h1.adjacency_tensor().unwrap(), h2.adjacency_tensor().unwrap());
        let h = kronten::decomp::hosvd(&kron_adjacency(&h1, &h2).unwrap()).unwrap();
        // supersymmetry makes every mode rank equal to the mode-0 rank
        for f in &h.factors {
            assert_eq!(f.ncols(), rank(&a1) * rank(&a2));
        }
    }
}
