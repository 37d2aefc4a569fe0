//! Parses an ARFF document and writes it back out.
//!
//!     cargo run --example parse_arff -- [FILE]

use metaxfer::arff::{parse_arff, parse_arff_str, Value};

const SAMPLE: &str = "\
% ASlib-style feature table
@RELATION demo
@ATTRIBUTE instance_id STRING
@ATTRIBUTE repetition NUMERIC
@ATTRIBUTE vars NUMERIC
@ATTRIBUTE kind {sat, unsat}
@DATA
'inst 1',1,120,sat
inst_2,1,?,unsat
";

fn main() -> metaxfer::Result<()> {
    let relation = match std::env::args().nth(1) {
        Some(path) => {
            let file = std::fs::File::open(&path).expect("cannot open input");
            parse_arff(std::io::BufReader::new(file))?
        }
        None => parse_arff_str(SAMPLE)?,
    };
    println!(
        "relation {} with {} rows",
        relation.name,
        relation.rows.len()
    );
    for (j, attr) in relation.attributes.iter().enumerate() {
        let missing = relation
            .rows
            .iter()
            .filter(|r| matches!(r[j], Value::Missing))
            .count();
        println!("  {:<24} {:?} ({missing} missing)", attr.name, attr.kind);
    }
    print!("\n{relation}");
    Ok(())
}
