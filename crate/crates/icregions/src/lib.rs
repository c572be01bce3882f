//! Achievable rate regions for two-user interference channels, and the
//! sparse-hash / constrained-random-number-generator codes that attain them.
//!
//! The crate has four layers:
//!
//! - [`prob`] — joint distributions over named finite variables, entropy and
//!   mutual information in bits.
//! - [`channel`] — interference-channel laws, auxiliary-input factorizations
//!   per region family, and their composition into one joint distribution.
//! - [`regions`] + [`polytope`] — the inequality systems of the
//!   Han-Kobayashi, Chong-Motani-Garg, Jiang-Xin-Garg and CRNG region
//!   families; LP membership, support functions, Fourier-Motzkin projection
//!   and region comparison.
//! - [`codec`] — concrete code instances (linear hash pairs plus coset
//!   labels), exact error computation and seeded Monte Carlo simulation.
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --example entropy_basics        # joint distributions, H and I
//! cargo run --example build_regions         # all region variants and sizes
//! cargo run --example membership_support    # point membership, support LPs
//! cargo run --example region_sweep          # 2-D boundary sweep as CSV
//! cargo run --example fourier_motzkin       # eliminate binning rates, check vs LP
//! cargo run --example slice_vs_eliminated   # sliced subset system vs closed form
//! cargo run --example lift_time_sharing     # aggregate point -> lifted input
//! cargo run --example embeddings            # JXG -> CRNG and base -> full
//! cargo run --example codec_roundtrip       # encode / transmit / decode once
//! cargo run --example codec_error_rates     # error trends vs block length
//! cargo run --example hash_profiles         # collision censuses and composition
//! ```
//!
//! The `icr` binary exposes the same operations in batch form; see the
//! repository README.

pub mod channel;
pub mod cli;
pub mod codec;
pub mod polytope;
pub mod prob;
pub mod regions;
