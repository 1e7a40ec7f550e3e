//! A sparse network of Winnow-trained separators with winner-take-all
//! prediction.
//!
//! The network keeps one target node per class. Each node is an autonomous
//! Winnow learner linked only to the features the allocation policy has
//! granted it: under the default [`AllocationPolicy::OnPositiveExample`] a
//! node links a feature the first time it is active in an example labeled
//! with the node's class, so a node never carries weights for features it
//! has no positive evidence for.
//!
//! Training is one-vs-all and online: each labeled example is positive for
//! its own class node, negative for every other node, used once by all of
//! them and then discarded. Prediction propagates the example through every
//! node and takes the class whose node produces the highest activation.
//! Even with two classes this winner-take-all rule behaves differently from
//! a single Winnow discriminator: a node can win with an activation below
//! its own threshold.

use std::io::{self, BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use thiserror::Error;

use crate::feature_space::{ClassId, Example, TaskDef};
use crate::lin_sep::{LinSepError, Prediction};
use crate::winnow::{LinkPolicy, WinnowConfig, WinnowError, WinnowLearner};

#[derive(Debug, Error)]
pub enum SnowError {
    #[error("example has label {label}, but the task has {classes} classes")]
    UnknownClass { label: ClassId, classes: usize },
    #[error("training example has no label")]
    Unlabeled,
    #[error("network is frozen; training is not allowed")]
    Frozen,
    #[error(transparent)]
    Winnow(#[from] WinnowError),
    #[error(transparent)]
    Model(#[from] LinSepError),
    #[error("task definition error: {0}")]
    Task(#[from] crate::feature_space::FeatureError),
}

/// When a target node is granted a link to a feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AllocationPolicy {
    /// Link on first occurrence in an example labeled with the node's own
    /// class. Strictly sparser than co-occurrence allocation.
    #[default]
    OnPositiveExample,
    /// Link on first occurrence in any training example the node sees,
    /// whatever its label.
    OnAnyCooccurrence,
}

/// How node activations are compared at prediction time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WtaPolicy {
    /// Compare raw activations.
    #[default]
    RawActivation,
    /// Compare activation minus the node's own threshold.
    ThetaNormalized,
}

#[derive(Debug, Clone, Default)]
pub struct SnowConfig {
    pub winnow: WinnowConfig,
    pub allocation: AllocationPolicy,
    pub wta: WtaPolicy,
}

/// One per-class subnetwork: a Winnow learner over the node's link set.
#[derive(Debug, Clone)]
pub struct TargetNode {
    class: ClassId,
    learner: WinnowLearner,
}

impl TargetNode {
    pub fn class(&self) -> ClassId {
        self.class
    }

    pub fn learner(&self) -> &WinnowLearner {
        &self.learner
    }
}

/// The network: one target node per class of the task.
#[derive(Debug, Clone)]
pub struct SnowNetwork {
    task: TaskDef,
    nodes: Vec<TargetNode>,
    config: SnowConfig,
    frozen: bool,
}

impl SnowNetwork {
    pub fn new(task: TaskDef, config: SnowConfig) -> Result<Self, SnowError> {
        let nodes = task
            .class_ids()
            .map(|class| {
                Ok(TargetNode {
                    class,
                    learner: WinnowLearner::new(config.winnow, LinkPolicy::LinkedOnly)?,
                })
            })
            .collect::<Result<Vec<_>, WinnowError>>()?;
        Ok(SnowNetwork {
            task,
            nodes,
            config,
            frozen: false,
        })
    }

    pub fn task(&self) -> &TaskDef {
        &self.task
    }

    pub fn config(&self) -> &SnowConfig {
        &self.config
    }

    pub fn nodes(&self) -> &[TargetNode] {
        &self.nodes
    }

    pub fn node(&self, class: ClassId) -> Option<&TargetNode> {
        self.nodes.get(class.0 as usize)
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    /// Makes the network immutable: further training calls error out and
    /// predictions are pure.
    pub fn freeze(&mut self) {
        self.frozen = true;
    }

    /// One online step: allocate links per policy, then update every node
    /// one-vs-all (positive for the gold node, negative for the rest).
    pub fn train_example(&mut self, e: &Example) -> Result<(), SnowError> {
        if self.frozen {
            return Err(SnowError::Frozen);
        }
        let gold = e.label().ok_or(SnowError::Unlabeled)?;
        if gold.0 as usize >= self.nodes.len() {
            return Err(SnowError::UnknownClass {
                label: gold,
                classes: self.nodes.len(),
            });
        }
        match self.config.allocation {
            AllocationPolicy::OnPositiveExample => {
                let node = &mut self.nodes[gold.0 as usize];
                for &id in e.active() {
                    node.learner.link(id);
                }
            }
            AllocationPolicy::OnAnyCooccurrence => {
                for node in &mut self.nodes {
                    for &id in e.active() {
                        node.learner.link(id);
                    }
                }
            }
        }
        for node in &mut self.nodes {
            node.learner.update(e, node.class == gold);
        }
        Ok(())
    }

    /// Sequential training pass(es) over the corpus. With a shuffle seed the
    /// example order is re-drawn per epoch from a deterministic stream;
    /// without one, corpus order is kept. Returns the per-node mistake
    /// counts incurred by this call.
    pub fn train_corpus(
        &mut self,
        corpus: &[Example],
        epochs: usize,
        shuffle_seed: Option<u64>,
    ) -> Result<Vec<u64>, SnowError> {
        let before: Vec<u64> = self.nodes.iter().map(|n| n.learner.mistakes()).collect();
        let mut order: Vec<usize> = (0..corpus.len()).collect();
        let mut rng = shuffle_seed.map(ChaCha8Rng::seed_from_u64);
        for _ in 0..epochs {
            if let Some(rng) = rng.as_mut() {
                order.shuffle(rng);
            }
            for &i in &order {
                self.train_example(&corpus[i])?;
            }
        }
        Ok(self
            .nodes
            .iter()
            .zip(before)
            .map(|(n, b)| n.learner.mistakes() - b)
            .collect())
    }

    /// Winner-take-all: the class of the node with the highest activation,
    /// ties broken by the lowest class id. No node is updated.
    pub fn predict(&self, e: &Example) -> Prediction {
        debug_assert!(!self.nodes.is_empty());
        let mut best = Prediction {
            label: self.nodes[0].class,
            score: f64::NEG_INFINITY,
        };
        for node in &self.nodes {
            let mut score = node.learner.activation(e);
            if self.config.wta == WtaPolicy::ThetaNormalized {
                score -= node.learner.config().theta;
            }
            if score > best.score {
                best = Prediction {
                    label: node.class,
                    score,
                };
            }
        }
        best
    }

    /// Writes `snow <num_classes>`, then per node a `node <class-id>` line
    /// followed by the node's winnow block.
    pub fn write_model<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "snow {}", self.nodes.len())?;
        for node in &self.nodes {
            writeln!(w, "node {}", node.class)?;
            node.learner.write_model(&mut w)?;
        }
        Ok(())
    }

    /// Reads a network written by [`write_model`](Self::write_model). The
    /// result is frozen: loaded networks are evaluation-time hypotheses.
    /// Class names are not part of the format, so they come back as the
    /// class-id digits.
    pub fn read_model<R: BufRead>(r: R) -> Result<Self, SnowError> {
        let parse = |line: usize, msg: &str| -> SnowError {
            LinSepError::ModelParse {
                line,
                msg: msg.to_string(),
            }
            .into()
        };
        let mut lines = Vec::new();
        for line in r.lines() {
            lines.push(line.map_err(LinSepError::from)?);
        }
        let header = lines.first().ok_or_else(|| parse(1, "empty model file"))?;
        let num_classes: usize = header
            .strip_prefix("snow ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| parse(1, "expected `snow <num_classes>` header"))?;
        if num_classes < 2 {
            return Err(parse(1, "a network needs at least two classes"));
        }
        let task = TaskDef::new(
            "loaded",
            (0..num_classes).map(|i| i.to_string()).collect(),
        )?;
        let mut net = SnowNetwork::new(task, SnowConfig::default())?;

        let mut i = 1;
        let mut seen = 0usize;
        while i < lines.len() {
            if lines[i].is_empty() {
                i += 1;
                continue;
            }
            let class: u32 = lines[i]
                .strip_prefix("node ")
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| parse(i + 1, "expected `node <class-id>`"))?;
            if class as usize >= num_classes {
                return Err(parse(i + 1, "node class-id out of range"));
            }
            let mut block = String::new();
            i += 1;
            while i < lines.len() && !lines[i].starts_with("node ") {
                block.push_str(&lines[i]);
                block.push('\n');
                i += 1;
            }
            let learner = WinnowLearner::read_model(block.as_bytes())?;
            net.nodes[class as usize].learner = learner;
            seen += 1;
        }
        if seen != num_classes {
            return Err(parse(lines.len(), "missing node blocks"));
        }
        net.freeze();
        Ok(net)
    }
}
