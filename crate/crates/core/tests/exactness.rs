mod common;

use std::time::Instant;

use common::all_fixtures;
use common::checks::*;

#[test]
fn every_differential_squares_to_zero() {
    let start = Instant::now();
    for f in all_fixtures() {
        assert!(simplicial_square_zero(&f), "{}: simplicial", f.name);
        assert!(twisted_square_zero(&f), "{}: twisted", f.name);
        assert!(mw_square_zero(&f), "{}: mathai-wu", f.name);
        assert!(dupont_square_zero(&f, 2), "{}: dupont", f.name);
    }
    assert!(start.elapsed().as_secs() < 60);
}
