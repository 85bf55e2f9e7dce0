use lcrit::acceptance::{run_all, Context};
use lcrit::config::Config;

#[test]
fn acceptance_criteria() {
    let ctx = Context::new(Config::default());
    let results = run_all(&ctx);
    for r in &results {
        println!("{}", r.line());
    }
    let failed: Vec<usize> = results.iter().filter(|r| !r.passed).map(|r| r.index).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
