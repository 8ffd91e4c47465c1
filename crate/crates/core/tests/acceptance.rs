use std::io::Write;
use waldspurger::suite::criteria;

#[test]
fn acceptance() {
    let mut lines = Vec::new();
    let mut failed = Vec::new();
    for c in criteria().iter() {
        let o = c.run();
        let line = o.line();
        writeln!(std::io::stderr(), "{line}").unwrap();
        for f in o.failures.iter().take(5) {
            writeln!(std::io::stderr(), "    {f}").unwrap();
        }
        if !o.pass {
            failed.push(o.id);
        }
        lines.push(line);
    }
    assert_eq!(lines.len(), 9);
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
