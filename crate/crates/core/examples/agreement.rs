//! Fleiss' kappa for a few rating tables (rows: items, columns: categories).

use evograd::eval::fleiss_kappa;

fn main() {
    let tables: [(&str, Vec<Vec<u64>>); 3] = [
        ("unanimous", vec![vec![3, 0], vec![0, 3], vec![3, 0]]),
        ("mostly agree", vec![vec![3, 0], vec![0, 3], vec![2, 1], vec![1, 2]]),
        ("always split", vec![vec![1, 1], vec![1, 1], vec![1, 1]]),
    ];
    for (name, table) in tables {
        match fleiss_kappa(&table) {
            Ok(k) => println!("{name:>14}: {k:.4}"),
            Err(e) => println!("{name:>14}: {e}"),
        }
    }
}
