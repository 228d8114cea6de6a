//! States, channels and dilations.

pub mod channel;
pub mod random;
pub mod state;

pub use channel::{
    apply_channel, channel_from_subspace, overlap, stinespring_from_kraus, KrausChannel,
    StinespringDilation, SubspaceBasis,
};
pub use random::{
    derive_seed, haar_isometry, haar_random_pure, haar_unitary, haar_vector, random_density,
    random_density_with, rng_from_seed,
};
pub use state::{DensityMatrix, PureEnsemble, PureState};
