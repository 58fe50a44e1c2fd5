//! Walk through the full pipeline once, printing intermediate objects:
//! pick a post-critically finite parameter, build a labeled preimage
//! tree over an extension of F_p, canonicalize the labels against the
//! 2-power roots of unity, extract the Frobenius automorphism, and
//! check its node residues against the cyclotomic prediction.
//!
//! Run with: cargo run --example frobenius_walkthrough

use arboreal::preimage::{
    build_preimage_tree, find_pcf_parameters, smallest_base_point, PcfParameter,
};

fn main() -> arboreal::Result<()> {
    // z^2 + c over F_5 with a 2-periodic critical point: c = 4, since
    // 0 -> 4 -> 0 under z -> z^2 + 4 (mod 5).
    let c = find_pcf_parameters(5, 2)?
        .into_iter()
        .next()
        .expect("F_5 has a 2-periodic quadratic parameter");
    let param = PcfParameter::new(5, c, 2)?;
    println!(
        "parameter: z^2 + {} mod {}, period {}",
        param.c(),
        param.p(),
        param.r()
    );

    let x0 = smallest_base_point(&param).expect("base point off the critical orbit");
    println!("base point x0 = {x0}");

    let depth = 5;
    let mut tree = build_preimage_tree(&param, x0, depth, 17)?;
    println!(
        "tree: depth {}, field F_{}^{}, {} labeled nodes",
        depth,
        param.p(),
        tree.ctx().k(),
        (1u64 << (depth + 1)) - 1
    );

    tree.canonicalize_labels()?;
    let ratios = tree.verify_ratio_identity()?;
    println!(
        "canonical labels: {} layer ratios checked, {} failures",
        ratios.checked,
        ratios.failures.len()
    );

    let chain = tree.verify_unity_chain()?;
    println!(
        "root-of-unity chain of height {}: consistent = {}",
        chain.height, chain.ok
    );

    let frobenius = tree.frobenius_automorphism()?;
    println!("frobenius parity bits: {}", frobenius.to_hex());

    let report = tree.verify_cyclotomic_action(&frobenius)?;
    println!(
        "cyclotomic action: {} node residues checked, {} mismatches, root unit {} mod 2^{} (expected {})",
        report.checked,
        report.mismatches.len(),
        report.root_unit.value,
        report.root_unit.exponent,
        report.expected_root
    );

    assert!(report.residue_consistent && report.mismatches.is_empty());
    println!("verdict: PASS");
    Ok(())
}
