use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ecbin::bincoder::{decode_plane, encode_plane};
use ecbin::bits::BitPlane;
use ecbin::entropy::binary_entropy;

const LEN: usize = 1_000_000;

#[test]
fn adaptive_coder_stays_near_entropy_on_bernoulli_sources() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [0.0, 0.01, 0.2, 0.5, 0.8, 0.99, 1.0] {
        let plane: BitPlane = (0..LEN).map(|_| rng.gen_bool(p)).collect();
        let empirical = plane.count_ones() as f64 / LEN as f64;
        let ideal = LEN as f64 * binary_entropy(empirical).unwrap();
        let payload = encode_plane(&plane);
        let bits = payload.len() as f64 * 8.0;
        assert!(
            bits <= ideal + 0.01 * LEN as f64 + 512.0,
            "p={p}: {bits} bits vs entropy {ideal:.0}"
        );
        assert_eq!(decode_plane(&payload, LEN as u64).unwrap(), plane);
    }
}
