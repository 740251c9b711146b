// Rank every (component, quantity) pair by its M x N weight under the
// bundled reference tables.
//
//     cargo run --example signal_weights

use gridobs::ahp::{signal_weight, WeightTables};
use gridobs::taxonomy::{ComponentKind, QuantityKind, SignalDescriptor};

fn main() -> gridobs::Result<()> {
    let tables = WeightTables::reference();
    let mut pairs = tables.pair_weights();
    pairs.sort_by(|a, b| b.2.total_cmp(&a.2));

    for (rank, (c, q, w)) in pairs.iter().enumerate() {
        let m = tables.m(*c, *q)?;
        let n = tables.n(*q, *c)?;
        println!("{:>2}. {:<25} {:<6} {:>6.2} x {:>6.2} = {:>9.4}", rank + 1, c.to_string(), q.to_string(), m, n, w);
    }

    let line_kv = SignalDescriptor::new("L7-KV", "J", "J-S03", ComponentKind::TransmissionLine, QuantityKind::Kv)?;
    let w = signal_weight(&line_kv, &tables)?;
    println!("\n{} carries weight {w:.2}; named in an operating instruction it counts {:.2}", line_kv.signal_id, 2.0 * w);
    Ok(())
}
