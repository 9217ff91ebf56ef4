//! Runs every acceptance criterion and prints one PASS/FAIL line each.

use guesswork_core::checks::CRITERIA;

#[test]
fn acceptance_criteria() {
    let reports: Vec<_> = CRITERIA.iter().map(|c| c.run()).collect();
    println!();
    for r in &reports {
        println!("{}", r.line());
    }
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| format!("C{:02}", r.id))
        .collect();
    println!(
        "acceptance: {}/{} criteria pass",
        reports.len() - failed.len(),
        reports.len()
    );
    assert!(failed.is_empty(), "failing criteria: {}", failed.join(", "));
}
