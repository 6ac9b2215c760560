//! Scrambled generalized Faure points and their map onto the Bloore cube.
//!
//! cargo run --example faure_points

use sepvol::qmc::{generate, map_to_bloore, FaureGenerator, SequenceSpec};
use sepvol::Case;

fn main() -> sepvol::Result<()> {
    let spec = SequenceSpec::for_case(Case::Real, Some(1), 0, 7u64.pow(3));
    println!("{}", spec.describe());
    let pts = generate(&spec)?;
    for p in &pts[..4] {
        println!("{p:.6?}");
    }

    // Every elementary interval [k/49, (k+1)/49) of a coordinate receives
    // exactly 7 of the first 7³ points.
    let mut counts = [0u32; 49];
    for p in &pts {
        counts[((p[2] * 49.0) + 1e-9) as usize] += 1;
    }
    println!(
        "coordinate 2, counts per 1/49 bin: min {} max {}",
        counts.iter().min().unwrap(),
        counts.iter().max().unwrap()
    );

    // Restarting anywhere in the stream reproduces the same points.
    let gen = FaureGenerator::new(&spec)?;
    let mut cur = gen.cursor(100);
    let mut u = [0.0; 6];
    cur.next_into(&mut u);
    assert_eq!(u.to_vec(), pts[100]);

    let z = map_to_bloore(&pts[1], Case::Real)?;
    println!("point 1 in z-space: {z:?}");

    let complex = SequenceSpec::for_case(Case::Complex, Some(1), 0, 3);
    for p in generate(&complex)? {
        println!("complex point: {:?}", map_to_bloore(&p, Case::Complex)?);
    }
    Ok(())
}
