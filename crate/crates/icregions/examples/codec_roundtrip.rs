//! One full pass through a code instance: draw messages, encode through the
//! constrained samplers, transmit, and decode at both receivers.

use icregions::codec::toy_interference_code;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

fn main() {
    let code = toy_interference_code(8, 2, 4, 2, 0.03, 0.02, false, 42);
    let prepared = code.prepare().unwrap();
    println!("rates per message (binning r, message R):");
    for (id, (r, rr)) in prepared.code.rates() {
        println!("  {id}: r = {r:.3}, R = {rr:.3}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    // A coset can come up empty for an unlucky message word (the encoder
    // then claims an error); draw message words until one encodes.
    let (messages, out) = loop {
        let messages: BTreeMap<String, Vec<u8>> = prepared
            .code
            .all_msgs()
            .into_iter()
            .map(|m| {
                let l = prepared.code.codes[&m].g.l();
                let word: Vec<u8> = (0..l).map(|_| rng.gen_range(0..2)).collect();
                (m, word)
            })
            .collect();
        match prepared.encode(&messages, &mut rng) {
            Ok(out) => break (messages, out),
            Err(e) => println!("encoder claimed an error ({e}) for {messages:?}"),
        }
    };
    println!("messages: {messages:?}");
    println!("x1 = {:?}", out.x[0]);
    println!("x2 = {:?}", out.x[1]);

    let y = prepared.transmit(&out.x, &mut rng);
    println!("y1 = {:?}", y[0]);
    println!("y2 = {:?}", y[1]);

    for j in 0..2 {
        let decoded = prepared.decode(j, &y[j], &mut rng).unwrap();
        for (m, word) in decoded {
            let ok = word == messages[&m];
            println!("decoder {j}: {m} -> {word:?} ({})", if ok { "ok" } else { "WRONG" });
        }
    }
}
