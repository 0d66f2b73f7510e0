// Driving the `dbnet` command line in-process.

use dbnet::cli;

pub fn run_example() -> dbnet::Result<()> {
    let file = concat!(env!("CARGO_MANIFEST_DIR"), "/data/remark5.json");
    for args in [
        vec!["dbnet", "validate", file],
        vec!["dbnet", "--exact", "analyze", file, "--pair", "1", "2"],
        vec!["dbnet", "response", file, "--pair", "1", "2", "--times", "0,1,2"],
        vec!["dbnet", "dims", "--L", "3"],
    ] {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = cli::run(&args, &mut out, &mut err);
        println!("$ {} -> exit {code}", args[1..].join(" "));
        let text = String::from_utf8_lossy(&out);
        for line in text.lines().take(12) {
            println!("  {line}");
        }
        assert_eq!(code, 0);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> dbnet::Result<()> {
    run_example()
}
