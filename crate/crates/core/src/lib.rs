pub mod bench;
pub mod classifiers;
pub mod corpus;
pub mod ensemble;
pub mod error;
pub mod features;
pub mod metrics;
pub mod oracle;
pub mod selection;
