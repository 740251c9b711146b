//! Priorities and consistency of single pairwise-comparison matrices.
//!
//! ```text
//! cargo run --example evaluate_matrix
//! ```

use gridobs::ahp::{
    consistency, derive_priorities, derive_priorities_eigenvector, ComparisonMatrix, Judgment,
};

fn show(title: &str, matrix: &ComparisonMatrix) -> gridobs::Result<()> {
    let gm = derive_priorities(matrix);
    let ev = derive_priorities_eigenvector(matrix);
    let report = consistency(matrix, &gm)?;
    println!("{title}");
    println!("  {:<8} {:>10} {:>12}", "item", "geo-mean", "eigenvector");
    for (k, item) in gm.items.iter().enumerate() {
        println!("  {:<8} {:>10.3} {:>12.3}", item, gm.weights[k], ev.weights[k]);
    }
    println!(
        "  lambda_max {:.4}  CI {:.4}  CR {:.4}  {}",
        report.lambda_max,
        report.consistency_index,
        report.consistency_ratio,
        if report.acceptable { "acceptable" } else { "revise" }
    );
    for j in matrix.off_scale_judgments() {
        println!("  note: {} vs {} = {} is off the 1..9 scale", matrix.items()[j.row], matrix.items()[j.col], j.value);
    }
    println!();
    Ok(())
}

fn main() -> gridobs::Result<()> {
    let items = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();

    // An expert who thinks MW matters twice as much as MVAR, and MVAR twice as much as STATUS.
    let consistent = ComparisonMatrix::from_judgments(
        items(&["MW", "MVAR", "STATUS"]),
        &[
            Judgment { row: 0, col: 1, value: 2.0 },
            Judgment { row: 0, col: 2, value: 4.0 },
            Judgment { row: 1, col: 2, value: 2.0 },
        ],
    )?;
    show("consistent 3x3", &consistent)?;

    let typical = ComparisonMatrix::from_judgments(
        items(&["MW", "MVAR", "TAP", "STATUS"]),
        &[
            Judgment { row: 0, col: 1, value: 3.0 },
            Judgment { row: 0, col: 2, value: 7.0 },
            Judgment { row: 0, col: 3, value: 3.0 },
            Judgment { row: 1, col: 2, value: 3.0 },
            Judgment { row: 1, col: 3, value: 1.0 },
            Judgment { row: 2, col: 3, value: 1.0 / 5.0 },
        ],
    )?;
    show("slightly inconsistent 4x4", &typical)?;

    // a > b, b > c, c > a: the worst kind of contradiction
    let cyclic = ComparisonMatrix::from_judgments(
        items(&["a", "b", "c"]),
        &[
            Judgment { row: 0, col: 1, value: 9.0 },
            Judgment { row: 0, col: 2, value: 1.0 / 9.0 },
            Judgment { row: 1, col: 2, value: 9.0 },
        ],
    )?;
    show("cyclic 3x3", &cyclic)?;

    // a missing pair is reported rather than guessed
    match ComparisonMatrix::from_judgments(items(&["a", "b", "c"]), &[Judgment { row: 0, col: 1, value: 2.0 }]) {
        Ok(_) => unreachable!(),
        Err(e) => println!("incomplete input: {e}"),
    }
    Ok(())
}
