//! Parse a model, print its canonical form and the validation report.
//!
//! cargo run --example parse_validate [-- path/to/model.cdpta]

use cdpta::dsl::{format_errors, parse, render};
use cdpta::model::{check_initialised, validate, Initialisation};

fn main() {
    let path = std::env::args().nth(1);
    let text = match &path {
        Some(p) => std::fs::read_to_string(p).expect("readable model file"),
        None => include_str!("../fixtures/notinit.cdpta").to_string(),
    };
    let model = match parse(&text) {
        Ok(m) => m,
        Err(errors) => {
            eprint!("{}", format_errors(&text, &errors));
            std::process::exit(2);
        }
    };
    println!("{}", render(&model));
    print!("validation: {}", validate(&model));
    match check_initialised(&model) {
        Initialisation::Ok => println!("initialised"),
        Initialisation::Violated(fragment) => println!("not initialised along {}", fragment.join(" -> ")),
    }
}
