//! Runtime registries for the interchangeable strategies: instance
//! generators and network trainers. Each variant sits behind a common
//! trait and is selected by name from config or CLI flags.

use std::sync::OnceLock;

use crate::discrete_prob::SampleSet;
use crate::equivalence_lab::{
    generate_equiv_instance, generate_violating_instance, Instance, ViolationKind,
};
use crate::recursive_net::{train_backprop, train_coordinate, LayerStack, NetTrainConfig, TrainRun};
use crate::{Error, Result};

/// Generator inputs shared by all instance generators; generators that
/// fix their own shape (the violating ones) ignore what they must.
#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    pub n_features: usize,
    pub y_size: usize,
}

pub trait InstanceGenerator: Sync + Send {
    fn name(&self) -> &'static str;
    fn generate(&self, seed: u64, params: &GenParams) -> Result<Instance>;
}

struct EquivGenerator;

impl InstanceGenerator for EquivGenerator {
    fn name(&self) -> &'static str {
        "equiv"
    }

    fn generate(&self, seed: u64, params: &GenParams) -> Result<Instance> {
        generate_equiv_instance(seed, params.n_features, params.y_size)
    }
}

struct ViolatingGenerator {
    kind: ViolationKind,
}

impl InstanceGenerator for ViolatingGenerator {
    fn name(&self) -> &'static str {
        match self.kind {
            ViolationKind::ViolateC1 => "violate_c1",
            ViolationKind::ViolateC2 => "violate_c2",
        }
    }

    fn generate(&self, seed: u64, _params: &GenParams) -> Result<Instance> {
        generate_violating_instance(seed, self.kind)
    }
}

fn generators() -> &'static [Box<dyn InstanceGenerator>] {
    static REGISTRY: OnceLock<Vec<Box<dyn InstanceGenerator>>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        vec![
            Box::new(EquivGenerator),
            Box::new(ViolatingGenerator { kind: ViolationKind::ViolateC1 }),
            Box::new(ViolatingGenerator { kind: ViolationKind::ViolateC2 }),
        ]
    })
}

pub fn generator_names() -> Vec<&'static str> {
    generators().iter().map(|g| g.name()).collect()
}

pub fn lookup_generator(name: &str) -> Result<&'static dyn InstanceGenerator> {
    generators()
        .iter()
        .find(|g| g.name() == name)
        .map(|g| g.as_ref())
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown generator `{name}`; available: {}",
                generator_names().join(", ")
            ))
        })
}

pub trait NetTrainer: Sync + Send {
    fn name(&self) -> &'static str;
    fn train(&self, net: &LayerStack, data: &SampleSet, cfg: &NetTrainConfig) -> Result<TrainRun>;
}

struct BackpropTrainer;

impl NetTrainer for BackpropTrainer {
    fn name(&self) -> &'static str {
        "backprop"
    }

    fn train(&self, net: &LayerStack, data: &SampleSet, cfg: &NetTrainConfig) -> Result<TrainRun> {
        train_backprop(net, data, cfg)
    }
}

struct CoordinateTrainer;

impl NetTrainer for CoordinateTrainer {
    fn name(&self) -> &'static str {
        "coordinate"
    }

    fn train(&self, net: &LayerStack, data: &SampleSet, cfg: &NetTrainConfig) -> Result<TrainRun> {
        train_coordinate(net, data, cfg)
    }
}

fn trainers() -> &'static [Box<dyn NetTrainer>] {
    static REGISTRY: OnceLock<Vec<Box<dyn NetTrainer>>> = OnceLock::new();
    REGISTRY.get_or_init(|| vec![Box::new(BackpropTrainer), Box::new(CoordinateTrainer)])
}

pub fn trainer_names() -> Vec<&'static str> {
    trainers().iter().map(|t| t.name()).collect()
}

pub fn lookup_trainer(name: &str) -> Result<&'static dyn NetTrainer> {
    trainers().iter().find(|t| t.name() == name).map(|t| t.as_ref()).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "unknown trainer `{name}`; available: {}",
            trainer_names().join(", ")
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recursive_net::{init_stack, xor_dataset, TrainMode};

    #[test]
    fn registries_list_expected_strategies() {
        assert_eq!(generator_names(), vec!["equiv", "violate_c1", "violate_c2"]);
        assert_eq!(trainer_names(), vec!["backprop", "coordinate"]);
    }

    #[test]
    fn lookup_rejects_unknown_names() {
        assert!(lookup_generator("nope").is_err());
        assert!(lookup_trainer("sgd").is_err());
    }

    #[test]
    fn generator_dispatch_matches_direct_call() {
        let params = GenParams { n_features: 3, y_size: 2 };
        let via_registry = lookup_generator("equiv").unwrap().generate(9, &params).unwrap();
        let direct = crate::equivalence_lab::generate_equiv_instance(9, 3, 2).unwrap();
        assert_eq!(via_registry, direct);
    }

    #[test]
    fn trainer_dispatch_respects_mode() {
        let data = xor_dataset();
        let net = init_stack(2, &[2], 2, 0);
        let cfg = NetTrainConfig {
            mode: TrainMode::Coordinate,
            sweeps: 1,
            inner_iters: 0,
            ..Default::default()
        };
        let run = lookup_trainer("coordinate").unwrap().train(&net, &data, &cfg).unwrap();
        assert_eq!(run.stack, net);
    }
}
