// Load a scenario from TOML text and render the target-detection sweep as
// CSV, the same path the `sqprobe fig1` command takes.

use sqprobe::cli::{fig1, render};
use sqprobe::scenario::{Format, Scenario};

const SCENARIO: &str = r#"
schema = 1

[probe]
n_s = 0.1

[channels]
eta0 = 0.0
eta1 = 0.2

[background]
n_b = 0.058

[test]
m_grid = [1, 10, 100, 1000]
"#;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = Scenario::parse(SCENARIO, "inline")?;
    print!("{}", render(&fig1(&scenario, None)?, Format::Csv));

    let broken = SCENARIO.replace("eta1 = 0.2", "eta1 = 1.2");
    if let Err(e) = Scenario::parse(&broken, "inline") {
        println!("rejected: {e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
