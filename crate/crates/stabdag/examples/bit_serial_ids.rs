//! Bit-serial identifier comparison: nodes never exchange whole identifiers,
//! only the position of one bit at a time. `bit_index(id, i)` is the position
//! (counted from the right, 1-based) of the i-th one-bit counted from the
//! left, or -1 once the bits are exhausted. Two identifiers order themselves
//! by the first level at which those positions differ.

use stabdag::ident::{bit_index, dif, Identifier};

fn main() {
    for raw in [10u64, 6, 37, 1] {
        let id = Identifier::new(raw);
        print!("id {raw:3} = {raw:b}₂  bit positions:");
        let mut i = 1;
        loop {
            let b = bit_index(id, i);
            print!(" Bit({i})={b}");
            if b == -1 {
                break;
            }
            i += 1;
        }
        println!();
    }

    println!();
    for (a, b) in [(10u64, 6u64), (37, 36), (8, 12)] {
        let (ia, ib) = (Identifier::new(a), Identifier::new(b));
        let level = dif(ia, ib);
        let greater = bit_index(ia, level) > bit_index(ib, level);
        println!(
            "dif({a}, {b}) = {level}: Bit_{a}({level})={} vs Bit_{b}({level})={} → {} > {}",
            bit_index(ia, level),
            bit_index(ib, level),
            if greater { a } else { b },
            if greater { b } else { a },
        );
    }
}
