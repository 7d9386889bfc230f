//! Full acceptance suite: one PASS/FAIL line per criterion.

use std::io::Write;

use krf::acceptance::{run_level, Level};

#[test]
fn acceptance_full() {
    let outcomes = run_level(Level::Full);
    // Written to the process stdout so the lines show without --nocapture.
    let mut out = std::io::stdout().lock();
    writeln!(out).unwrap();
    for o in &outcomes {
        writeln!(out, "{o}").unwrap();
    }
    out.flush().unwrap();
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.pass).map(|o| o.id).collect();
    assert_eq!(outcomes.len(), 14);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
