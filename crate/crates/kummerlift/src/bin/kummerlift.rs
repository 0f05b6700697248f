//! Thin command-line front end over the library's document runner.
//!
//! ```text
//! kummerlift run <document.json> [--parallel N] [--witness-only] [--canonical]
//! kummerlift demo <output-dir>
//! ```
//!
//! Exit codes: 0 all tasks pass, 1 some task fails or is obstructed,
//! 2 parse/validation/usage error.

use std::process::ExitCode;

use kummerlift::cli::{
    parse_document, render_canonical, render_trailer, run_document, write_demo_corpus, RunOptions,
};

fn usage() -> ExitCode {
    eprintln!(
        "usage:\n  kummerlift run <document.json> [--parallel N] [--witness-only] [--canonical]\n  kummerlift demo <output-dir>"
    );
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match args.first().map(String::as_str) {
        Some("run") => run_cmd(&args[1..]),
        Some("demo") => demo_cmd(&args[1..]),
        _ => usage(),
    }
}

fn run_cmd(args: &[String]) -> ExitCode {
    let mut path = None;
    let mut opts = RunOptions::default();
    let mut canonical = false;
    let mut i = 0;
    while i < args.len() {
        match args[i].as_str() {
            "--parallel" => {
                i += 1;
                let Some(n) = args.get(i).and_then(|s| s.parse::<usize>().ok()) else {
                    return usage();
                };
                opts.parallel = n.max(1);
            }
            "--witness-only" => opts.witness_only = true,
            "--canonical" => canonical = true,
            other if path.is_none() && !other.starts_with("--") => path = Some(other.to_string()),
            _ => return usage(),
        }
        i += 1;
    }
    let Some(path) = path else { return usage() };
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {path}: {e}");
            return ExitCode::from(2);
        }
    };
    let doc = match parse_document(&text) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match run_document(&doc, &opts) {
        Ok((verdicts, timings)) => {
            print!("{}", render_canonical(&verdicts));
            if !canonical {
                print!("{}", render_trailer(&timings));
            }
            ExitCode::from(verdicts.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn demo_cmd(args: &[String]) -> ExitCode {
    let Some(dir) = args.first() else { return usage() };
    match write_demo_corpus(std::path::Path::new(dir)) {
        Ok(files) => {
            for (problem, expected) in files {
                println!("{}", problem.display());
                println!("{}", expected.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
