//! Classical tree baselines.

pub mod forest;
pub mod tree;

pub use forest::{predict_forest, train_forest, ForestConfig, ForestModel};
pub use tree::{gini_impurity, predict_tree, train_tree, Criterion, TreeConfig, TreeNode};
