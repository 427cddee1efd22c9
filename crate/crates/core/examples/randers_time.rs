//! Travel time across one displacement for weak, critical and strong wind.

use zermelo::geometry::{randers_time, TangentData};

fn main() {
    println!("{:>6} {:>8} {:>14}", "|w|", "angle", "time");
    for w in [0.0, 0.5, 0.9, 1.0, 1.5] {
        for angle in [0.0_f64, 0.5, 1.0, 1.5, 2.5] {
            // Unit displacement at `angle` from the wind.
            let td = TangentData::new(w * w, 1.0, w * angle.cos()).expect("Cauchy-Schwarz holds");
            match randers_time(&td) {
                Ok(t) => println!("{w:>6.2} {angle:>8.2} {t:>14.8}"),
                Err(e) => println!("{w:>6.2} {angle:>8.2} {:>14}  ({e})", "-"),
            }
        }
    }
}
