use gcrf::catalog::{get, list};
use gcrf::report::RunOptions;

#[test]
fn every_fixture_reproduces_its_verdicts() {
    let opts = RunOptions { samples: 40, timing: false, ..Default::default() };
    let mut bad = vec![];
    for name in list() {
        let fx = get(name).unwrap();
        for (check, expected) in &fx.expected {
            let t = std::time::Instant::now();
            let (got, rep) = fx.run(check, &opts).unwrap_or_else(|e| panic!("{name}/{check}: {e}"));
            eprintln!("{name:28} {check:20} expected {expected:8} got {got:8} {:>6} ms {}", t.elapsed().as_millis(), rep.map(|r| format!("{:.2e}", r.residual)).unwrap_or_default());
            if got != *expected {
                bad.push(format!("{name}/{check}"));
            }
        }
    }
    assert!(bad.is_empty(), "{bad:?}");
}
