use cliffordcs::selftest::{run_criterion, CRITERIA};

fn main() {
    let mut failed = 0;
    for id in 1..=CRITERIA.len() {
        let r = run_criterion(id);
        println!("{r}");
        failed += usize::from(!r.passed);
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        CRITERIA.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
