//! Drive the command-line front end in-process.

use diffbisim::cli;
use diffbisim::modelio::fixtures;

fn main() {
    let dir = std::env::temp_dir().join("diffbisim-example");
    std::fs::create_dir_all(&dir).unwrap();
    let model = dir.join("binding.crn");
    std::fs::write(&model, fixtures::BINDING_CRN).unwrap();
    let model = model.display().to_string();
    for args in [
        vec!["bdb", &model, "--query", "A01,A10", "--upto", "equiv", "--stats"],
        vec!["check-bde", &model, "--query", "A01,A10"],
        vec!["reduce-fde", &model, "--query", "A01,A10"],
        vec!["bdb", &model, "--query", "A00,A11", "--format", "json"],
    ] {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = cli::run(std::iter::once("diffbisim").chain(args.iter().copied()), &mut out, &mut err);
        println!("$ diffbisim {}", args.join(" "));
        print!("{}{}", String::from_utf8_lossy(&out), String::from_utf8_lossy(&err));
        println!("exit {code}\n");
    }
}
