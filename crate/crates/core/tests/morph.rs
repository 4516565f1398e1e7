mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{crop, oracle_dilate, oracle_erode, random_mask, random_se};
use flora_core::footprint::{Footprint, Shape};
use flora_core::morph::{close, dilate, erode, open};
use flora_core::segment::BinaryMask;

#[test]
fn agrees_with_definitional_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let m = random_mask(&mut rng, 32);
        let se = random_se(&mut rng);
        assert_eq!(erode(&m, &se), oracle_erode(&m, &se), "erode\n{se:?}");
        assert_eq!(dilate(&m, &se), oracle_dilate(&m, &se), "dilate\n{se:?}");
    }
}

#[test]
fn lattice_properties_on_random_masks() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..500 {
        let m = random_mask(&mut rng, 32);
        let se = random_se(&mut rng);
        let o = open(&m, &se);
        let c = close(&m, &se);
        assert!(o.is_subset_of(&m));
        assert!(m.is_subset_of(&c));
        assert_eq!(open(&o, &se), o);
        assert_eq!(close(&c, &se), c);
        // the anchor is always active, so erosion shrinks and dilation grows
        assert!(erode(&m, &se).is_subset_of(&m));
        assert!(m.is_subset_of(&dilate(&m, &se)));
    }
}

#[test]
fn padded_duality() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..500 {
        let m = random_mask(&mut rng, 32);
        let se = random_se(&mut rng);
        let (rx, ry) = (se.radius_x(), se.radius_y());
        let p = m.padded(rx, ry);
        let dual = erode(&p.complement(), &se.reflect()).complement();
        assert_eq!(dilate(&p, &se), dual);
        assert_eq!(erode(&p, &se), dilate(&p.complement(), &se.reflect()).complement());
        assert_eq!(crop(&dilate(&p, &se), rx, ry, m.width(), m.height()), dilate(&m, &se));
        // duality also holds without padding under the ignore-outside rule
        assert_eq!(dilate(&m, &se), erode(&m.complement(), &se.reflect()).complement());
    }
}

#[test]
fn transpose_commutes_with_symmetric_square() {
    let se = Footprint::from_shape(Shape::Rect(3, 3)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..100 {
        let m = random_mask(&mut rng, 20);
        assert_eq!(erode(&m.transposed(), &se), erode(&m, &se).transposed());
    }
}

#[test]
fn closing_fills_pinhole_and_opening_removes_speckle() {
    let se = Footprint::from_shape(Shape::Rect(3, 3)).unwrap();
    let mut m = BinaryMask::from_fn(13, 13, |x, y| (2..11).contains(&x) && (2..11).contains(&y));
    m.set(6, 6, false);
    m.set(0, 12, true);
    let cleaned = close(&open(&m, &se), &se);
    assert!(cleaned.get(6, 6));
    assert!(!cleaned.get(0, 12));
}

fn arb_mask() -> impl Strategy<Value = BinaryMask> {
    (1usize..=16, 1usize..=16).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<bool>(), w * h).prop_map(move |bits| BinaryMask::from_bits(w, h, bits))
    })
}

fn arb_se() -> impl Strategy<Value = Footprint> {
    (0usize..3, 0usize..3)
        .prop_flat_map(|(a, b)| {
            let (w, h) = (2 * a + 1, 2 * b + 1);
            proptest::collection::vec(any::<bool>(), w * h).prop_map(move |mut g| {
                g[(h / 2) * w + w / 2] = true;
                Footprint::from_grid(w, h, g).unwrap()
            })
        })
}

proptest! {
    #[test]
    fn erosion_and_dilation_are_monotone(a in arb_mask(), flips in proptest::collection::vec(any::<bool>(), 256), se in arb_se()) {
        // b is a superset of a
        let b = BinaryMask::from_fn(a.width(), a.height(), |x, y| a.get(x, y) || flips[(y * a.width() + x) % flips.len()]);
        prop_assert!(erode(&a, &se).is_subset_of(&erode(&b, &se)));
        prop_assert!(dilate(&a, &se).is_subset_of(&dilate(&b, &se)));
    }

    #[test]
    fn open_close_idempotent(m in arb_mask(), se in arb_se()) {
        let o = open(&m, &se);
        let c = close(&m, &se);
        prop_assert_eq!(open(&o, &se), o);
        prop_assert_eq!(close(&c, &se), c);
    }
}
