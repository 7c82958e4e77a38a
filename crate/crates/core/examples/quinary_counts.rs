//! Times exact counts of the quinary quadric at P = 20, 40, 80.

use circle_core::counting::*;
use circle_core::polycore::PolySystem;
fn main() {
    let s = PolySystem::from_json(r#"{"n":5,"R":1,"polys":[[{"e":[2,0,0,0,0],"c":"1"},{"e":[0,2,0,0,0],"c":"1"},{"e":[0,0,2,0,0],"c":"1"},{"e":[0,0,0,2,0],"c":"1"},{"e":[0,0,0,0,2],"c":"-1"}]]}"#).unwrap();
    for p in [20.0, 40.0, 80.0] {
        let r = count_box(&s, &CountQuery::symmetric(5, p, vec![0]), &CountOptions::default()).unwrap();
        println!("{p} {} {:.2}s", r.count, r.elapsed_secs);
    }
}
