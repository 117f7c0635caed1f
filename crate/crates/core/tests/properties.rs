mod common;

use common::{random_signs, random_triangulation};
use num_traits::Signed;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tropical_quartics::bitangents::{evaluate_condition, shape_c_lifts, SignCondition};
use tropical_quartics::curvegeom::{check_duality, embed_curve, find_motif_c, mu_functionals, IndexSource, MotifC};
use tropical_quartics::heights::{
    induced_subdivision, is_regular, rat, secondary_cone, Convention, HeightVector,
};
use tropical_quartics::lattice::S3Element;
use tropical_quartics::patchwork::{count_ovals, real_part};
use tropical_quartics::survey::sweep;
use tropical_quartics::triangulation::{enumerate_unimodular, Triangulation};
use tropical_quartics::twist::{is_admissible, is_dividing, relabel_edges, twisted_edges, TwistTable};

/// A height vector deep inside the secondary cone, perturbed at random.
fn random_cone_point<R: Rng>(rng: &mut R, t: &Triangulation) -> Option<HeightVector> {
    let base = is_regular(t)?;
    let cone = secondary_cone(t, Convention::Min);
    loop {
        let scale = rng.gen_range(20..60);
        let h = HeightVector(base.0.iter().map(|v| v * rat(scale) + rat(rng.gen_range(-5..=5))).collect());
        if cone.iter().all(|f| f.eval(&h).is_positive()) {
            return Some(h);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn twisted_edges_are_admissible_and_sign_invariant(seed: u64, degree in 2u32..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triangulation(&mut rng, degree, 50);
        let d = random_signs(&mut rng, t.num_points());
        let tw = twisted_edges(&t, &d);
        prop_assert!(is_admissible(&t, &tw));
        prop_assert_eq!(&twisted_edges(&t, &d.negated()), &tw);
        prop_assert_eq!(is_dividing(&t, &d.negated()), is_dividing(&t, &d));
        prop_assert_eq!(count_ovals(&t, &d.negated()), count_ovals(&t, &d));
    }

    #[test]
    fn twisting_and_topology_are_s3_equivariant(seed: u64, g in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triangulation(&mut rng, 4, 50);
        let d = random_signs(&mut rng, 15);
        let g = S3Element::from_code(g).unwrap();
        let perm = t.lattice().permutation(g).to_vec();
        let (t2, d2) = (t.relabel(g), d.permuted(&perm));
        prop_assert_eq!(twisted_edges(&t2, &d2).edges, relabel_edges(&twisted_edges(&t, &d).edges, &perm));
        prop_assert_eq!(count_ovals(&t2, &d2), count_ovals(&t, &d));
        prop_assert_eq!(is_dividing(&t2, &d2), is_dividing(&t, &d));
    }

    #[test]
    fn real_part_is_a_union_of_cycles(seed: u64, degree in 1u32..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triangulation(&mut rng, degree, 80);
        let d = random_signs(&mut rng, t.num_points());
        let g = real_part(&t, &d);
        prop_assert!(g.degrees().iter().all(|&k| k == 2));
        if degree == 4 {
            let ovals = g.num_components();
            let dividing = is_dividing(&t, &d);
            prop_assert!((1..=4).contains(&ovals));
            prop_assert!(!dividing || ovals.is_multiple_of(2));
            prop_assert!(ovals != 4 || dividing);
        }
    }

    #[test]
    fn dividing_does_not_depend_on_the_cycle_basis(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triangulation(&mut rng, 4, 50);
        let graph = t.curve_graph();
        let mut order: Vec<usize> = (0..graph.bounded_edges.len()).collect();
        order.shuffle(&mut rng);
        let root = rng.gen_range(0..graph.nodes);
        let other = TwistTable::with_cycles(&t, graph.cycle_basis_with(root, &order));
        let default = TwistTable::new(&t);
        for _ in 0..64 {
            let bits = rng.gen::<u32>() & 0x7fff;
            prop_assert_eq!(other.is_dividing(bits), default.is_dividing(bits));
        }
    }

    #[test]
    fn regularity_round_trip(seed: u64, degree in 1u32..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triangulation(&mut rng, degree, 60);
        if let Some(h) = is_regular(&t) {
            prop_assert_eq!(&induced_subdivision(degree, &h, Convention::Min).unwrap(), &t);
            prop_assert_eq!(&induced_subdivision(degree, &-&h, Convention::Max).unwrap(), &t);
        } else {
            prop_assert_eq!(degree, 4);
        }
    }

    #[test]
    fn embedded_curves_are_balanced_with_positive_lengths(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_triangulation(&mut rng, 4, 60);
        if let Some(h) = random_cone_point(&mut rng, &t) {
            let curve = embed_curve(&t, &h, Convention::Min).unwrap();
            prop_assert!(check_duality(&t, &curve));
            prop_assert!(curve.bounded.iter().all(|e| e.length.is_positive()));
            let max = embed_curve(&t, &-&h, Convention::Max).unwrap();
            prop_assert!(check_duality(&t, &max));
        }
    }

    #[test]
    fn mu_functionals_agree_with_embedded_lengths(seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = (0..200)
            .map(|_| random_triangulation(&mut rng, 4, 40))
            .find(|t| !find_motif_c(t).is_empty())
            .expect("motif reached");
        let h = random_cone_point(&mut rng, &t).unwrap();
        let curve = embed_curve(&t, &h, Convention::Min).unwrap();
        let table = t.edge_table();
        for m in find_motif_c(&t) {
            let mu = mu_functionals(&t, &m, Convention::Min).unwrap();
            for (f, e) in mu.iter().zip(m.edges()) {
                let id = table.interior_index(e).unwrap();
                prop_assert_eq!(f.eval(&h), curve.bounded[id].length.clone());
                prop_assert!(f.eval(&h).is_positive());
            }
        }
    }

    #[test]
    fn sign_formulas_ignore_global_negation(seed: u64, g in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_signs(&mut rng, 15);
        let orientation = S3Element::rotations()[g];
        for i in 0..=4 {
            for j in 0..=4 {
                for k in 0..=4 {
                    let m = MotifC { orientation, i, j, k, source: IndexSource::Explicit };
                    prop_assert_eq!(shape_c_lifts(&d, &m), shape_c_lifts(&d.negated(), &m));
                }
            }
        }
        let sets: Vec<Vec<usize>> = (0..3).map(|_| {
            let a = rng.gen_range(0..15);
            let b = rng.gen_range(0..15);
            vec![a, b]
        }).collect();
        let c = SignCondition::new(sets).unwrap();
        prop_assert_eq!(evaluate_condition(&c, &d), evaluate_condition(&c, &d.negated()));
    }
}

#[test]
fn conic_triangulations_are_all_regular() {
    for c in enumerate_unimodular(2) {
        assert!(is_regular(&c.triangulation).is_some());
    }
}

#[test]
fn sweeps_are_invariant_under_symmetry() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let t = random_triangulation(&mut rng, 4, 60);
        let reference = sweep(&t).unwrap();
        let g = *S3Element::all().choose(&mut rng).unwrap();
        let image = sweep(&t.relabel(g)).unwrap();
        assert_eq!(image.counts, reference.counts);
        assert_eq!(image.orbit_size, reference.orbit_size);
        // determinism
        assert_eq!(sweep(&t).unwrap(), reference);
    }
}
