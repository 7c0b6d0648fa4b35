//! Driving the command-line front end from code.
//!
//!     cargo run --example report
//!
//! `tetrakit::cli::run` is what the `tetrakit` binary calls; it writes one
//! JSON record per line and returns the process exit code.

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("tetrakit").chain(args.iter().copied()).map(std::ffi::OsString::from);
    let code = tetrakit::cli::run(argv, &mut out, &mut err);
    let text = if code == 0 { out } else { err };
    (code, String::from_utf8(text).unwrap())
}

fn main() {
    for args in [
        &["report", "--modulus", "1541", "--base-max", "40"][..],
        &["factor", "60507095029"],
        &["--format", "text", "orders", "--base", "2", "--modulus", "100"],
        &["omega", "--mode", "bound", "23", "67"],
        &["tetrate", "--base", "3", "--height", "4", "--modulus", "0"],
    ] {
        let (code, text) = run(args);
        println!("$ tetrakit {}\n[exit {code}]\n{}", args.join(" "), text.trim_end());
    }
}
