mod support;

use std::time::Instant;

use kgforge::embed::Technique;
use support::gradcheck::{check_technique, SAMPLES, TOLERANCE};

#[test]
fn analytic_gradients_match_finite_differences() {
    let start = Instant::now();
    for technique in Technique::ALL {
        let r = check_technique(technique, 1234);
        assert!(r.score_error <= TOLERANCE, "{technique}: score gradient relative error {:e}", r.score_error);
        assert!(r.loss_error <= TOLERANCE, "{technique}: loss gradient relative error {:e}", r.loss_error);
        assert!(r.active >= SAMPLES / 4, "{technique}: only {} samples with an active loss", r.active);
    }
    assert!(start.elapsed().as_secs_f64() < 30.0);
}
