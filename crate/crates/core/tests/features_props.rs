use proptest::prelude::*;
use vindex_core::features::{aggregate_layers, avg_pool_2x2, deinterleave, interleave, nested_sequence, LayerStack};
use vindex_core::{FeatureGrid, RandomStream, Seed};

fn grid(h: usize, w: usize, d: usize, seed: u64) -> FeatureGrid {
    FeatureGrid::new(h, w, d, RandomStream::new(Seed(seed)).normals(h * w * d)).unwrap()
}

proptest! {
    #[test]
    fn pooling_is_linear(k in 1usize..4, d in 1usize..4, s in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let (x, y) = (grid(2 * k, 2 * k, d, s), grid(2 * k, 2 * k, d, s ^ 1));
        let mix: Vec<f64> = x.data().iter().zip(y.data()).map(|(p, q)| a * p + b * q).collect();
        let lhs = avg_pool_2x2(&FeatureGrid::new(2 * k, 2 * k, d, mix).unwrap()).unwrap();
        let (px, py) = (avg_pool_2x2(&x).unwrap(), avg_pool_2x2(&y).unwrap());
        for ((l, p), q) in lhs.data().iter().zip(px.data()).zip(py.data()) {
            prop_assert!((l - (a * p + b * q)).abs() < 1e-12);
        }
    }

    #[test]
    fn nested_levels_conserve_grand_mean(e in 0u32..4, three in any::<bool>(), d in 1usize..4, s in any::<u64>()) {
        let side = if three { 3 << e } else { 1 << (e + 1) };
        let g = grid(side, side, d, s);
        let nf = nested_sequence(&g).unwrap();
        let counts = nf.token_counts();
        prop_assert_eq!(counts[0], side * side);
        prop_assert_eq!(*counts.last().unwrap(), 1);
        for level in nf.levels() {
            prop_assert!((level.mean() - g.mean()).abs() < 1e-12);
        }
    }

    #[test]
    fn interleave_round_trips(n in 1usize..20, d in 1usize..5, s in any::<u64>()) {
        let (a, b) = (grid(1, n, d, s), grid(1, n, d, s ^ 7));
        let seq = interleave(&a, &b).unwrap();
        prop_assert_eq!((seq.height(), seq.width()), (1, 2 * n));
        let (a2, b2) = deinterleave(&seq).unwrap();
        prop_assert_eq!(a2.data(), a.data());
        prop_assert_eq!(b2.data(), b.data());
    }
}

#[test]
fn aggregate_matches_explicit_group_means() {
    // 5 non-final layers in 2 groups: layers 0..3 and 3..5
    let layers: Vec<FeatureGrid> = (0..6).map(|k| grid(2, 3, 2, k)).collect();
    let af = aggregate_layers(&LayerStack::new(layers.clone()).unwrap(), 2).unwrap();
    assert_eq!((af.n_tokens(), af.dim()), (6, 6));
    for t in 0..6 {
        for c in 0..2 {
            let g0 = (0..3).map(|k| layers[k].token(t)[c]).sum::<f64>() / 3.0;
            let g1 = (3..5).map(|k| layers[k].token(t)[c]).sum::<f64>() / 2.0;
            assert!((af.token(t)[c] - g0).abs() < 1e-12);
            assert!((af.token(t)[2 + c] - g1).abs() < 1e-12);
            assert_eq!(af.token(t)[4 + c], layers[5].token(t)[c]);
        }
    }
}
