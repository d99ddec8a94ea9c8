use std::sync::Arc;

use weil_core::spgroup::SymplecticSpace;
use weil_core::weil::{verify_identities, VerifyOptions};
use weil_core::zmod::AdditiveCharacter;

fn run(m: u64, ds: &[u64], seed: u64, samples: usize) {
    let space = Arc::new(SymplecticSpace::hyperbolic(m, ds).unwrap());
    let lambda = AdditiveCharacter::standard(space.ring());
    let report = verify_identities(&space, lambda, &VerifyOptions { seed, samples, oracle: true }).unwrap();
    let failed: Vec<_> = report.iter().filter(|c| !c.pass).collect();
    for f in &failed {
        eprintln!("{}", serde_json::to_string(f).unwrap());
    }
    assert!(failed.is_empty(), "{} of {} checks failed on m={m} {ds:?}", failed.len(), report.len());
}

#[test]
fn battery_z3_plane() {
    run(3, &[3], 42, 30);
}

#[test]
fn battery_z5_plane() {
    run(5, &[5], 1, 20);
}

#[test]
fn battery_z9_plane() {
    run(9, &[9], 3, 20);
}

#[test]
fn battery_mixed_h39() {
    run(9, &[3, 9], 7, 10);
}

#[test]
fn battery_z15_plane() {
    run(15, &[15], 5, 10);
}

#[test]
fn battery_two_planes() {
    run(3, &[3, 3], 11, 10);
}

