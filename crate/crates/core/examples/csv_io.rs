// Write a synthetic dataset to CSV, read it back with a column schema, and
// show the validation errors for malformed input.

use regbridge::dataset::{read_csv, sample_h0, write_csv_to, Schema};
use regbridge::fixtures;

pub fn run_example() -> regbridge::Result<usize> {
    let data = sample_h0(&fixtures::two_uniform(1.0), 5, 1)?;
    let mut buf = Vec::new();
    write_csv_to(&data, &mut buf)?;
    print!("{}", String::from_utf8_lossy(&buf));

    let schema = Schema::new("y", &["x1", "x2"], Some("const"));
    let back = read_csv(buf.as_slice(), &schema)?;
    println!("round trip identical: {}", back == data);

    for bad in ["x,const,y\n0.5,0.99,1\n", "x,const,y\n", "x,const,y\n0.5,1,abc\n"] {
        let err = read_csv(bad.as_bytes(), &Schema::new("y", &["x"], Some("const"))).unwrap_err();
        println!("rejected: {err}");
    }
    Ok(back.n())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
