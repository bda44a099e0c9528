//! Run orchestration: configuration, artifact persistence, and the command
//! functions the CLI binary dispatches to.

pub mod artifacts;
pub mod commands;
pub mod config;

pub use artifacts::{Layout, OutputLock};
pub use commands::{
    cmd_embed, cmd_evaluate, cmd_gen_synthetic, cmd_gradcheck, cmd_grid, cmd_ingest,
    cmd_recommend, cmd_train, degree_product_auc, EmbedOutcome, IngestStats, RecommendationRow,
    SyntheticKind, SyntheticOutcome, SyntheticSpec, TrainOutcome,
};
pub use config::{ArticleMethod, RunConfig};
