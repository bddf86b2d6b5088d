//! Larger-degree coverage: a structural spot check at m = 10 runs by
//! default; the quadratic-oracle equivalence at m = 11 and 12 sits behind
//! `--ignored` (several seconds of Horner evaluation per vector).

use cfft::engine::{naive_dft, CfftEngine};
use cfft::gf2m::{FieldElement, FieldSpec};
use cfft::planner::{build_block_form, build_plan};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Spot check of the circulant/block-cyclic structure at m = 10, sampling
/// every block but only a stripe of each (the full quadratic sweep lives in
/// the acceptance suite for m <= 8).
#[test]
fn structural_spot_m10() {
    let f = FieldSpec::new(10, None).unwrap();
    let plan = build_plan(&f, 1023).unwrap();
    let form = build_block_form(&plan).unwrap();
    let ap = |r: usize, c: usize| plan.recombine.get(form.row_perm[r], c);
    let (k, m) = (form.k, form.m);
    for i in 0..k {
        for j in 0..k {
            let (di, dj) = (form.sizes[i], form.sizes[j]);
            let (oi, oj) = (form.offsets[i], form.offsets[j]);
            for t in 0..di {
                assert_eq!(
                    ap(oi + (t + 1) % di, oj + (t + 1) % dj),
                    ap(oi + t, oj + t % dj),
                    "block ({i},{j}) diagonal stripe not cyclic"
                );
                assert_eq!(
                    ap(oi + (t + 1) % di, oj),
                    ap(oi + t, oj + dj - 1),
                    "block ({i},{j}) wrap column not cyclic"
                );
            }
        }
    }
    // Block-cyclicity along the first block column against the first row.
    for i2 in 0..m {
        let c = &form.first_block_row[(m - i2) % m];
        for i1 in 0..k {
            for j1 in 0..k {
                let tiled = ap(
                    form.offsets[i1] + i2 % form.sizes[i1],
                    form.offsets[j1],
                );
                assert_eq!(tiled, c.get(i1, j1), "block ({i2},0)");
            }
        }
    }
}

#[test]
#[ignore = "slow tier: quadratic oracle at n = 2047 and n = 4095"]
fn oracle_equivalence_m11_m12() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x510);
    for m in [11usize, 12] {
        let f = FieldSpec::new(m, None).unwrap();
        let n = f.group_order();
        let engine = CfftEngine::new(build_plan(&f, n).unwrap()).unwrap();
        for trial in 0..3 {
            let input: Vec<FieldElement> = (0..n).map(|_| f.random_element(&mut rng)).collect();
            let expected = naive_dft(&f, &input).unwrap();
            assert_eq!(
                engine.transform(&input, true).unwrap().output,
                expected,
                "m={m} trial={trial} network"
            );
            assert_eq!(
                engine.transform(&input, false).unwrap().output,
                expected,
                "m={m} trial={trial} direct"
            );
        }
        println!("[PASS] slow-tier oracle equivalence: m={m} n={n}");
    }
}
