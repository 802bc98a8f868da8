//! Policy checkpoints: an MLP shape header plus the flat parameter vector,
//! with an optional observation scale for policies that rescale inputs.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::gep::GepPolicy;
use crate::net::{
    read_param_vector, write_param_vector, HiddenActivation, MlpSpec, OutputActivation,
};

const MAGIC: &[u8; 4] = b"GPCK";
const VERSION: u32 = 1;

/// A self-contained policy loaded from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointPolicy {
    pub spec: MlpSpec,
    pub params: Vec<f64>,
    /// Per-dimension divisor applied to observations before the forward
    /// pass, for policies trained on rescaled inputs.
    pub obs_scale: Option<Vec<f64>>,
}

impl CheckpointPolicy {
    pub fn raw(spec: MlpSpec, params: Vec<f64>) -> Self {
        CheckpointPolicy { spec, params, obs_scale: None }
    }

    pub fn scaled(policy: &GepPolicy, params: Vec<f64>) -> Self {
        CheckpointPolicy {
            spec: policy.spec().clone(),
            params,
            obs_scale: Some(policy.obs_scale().to_vec()),
        }
    }

    pub fn act(&self, obs: &[f64]) -> Result<Vec<f64>> {
        match &self.obs_scale {
            None => self.spec.forward(&self.params, obs),
            Some(scale) => {
                let scaled: Vec<f64> = obs.iter().zip(scale).map(|(o, s)| o / s).collect();
                self.spec.forward(&self.params, &scaled)
            }
        }
    }
}

pub fn save_checkpoint(path: &Path, policy: &CheckpointPolicy) -> Result<()> {
    if policy.params.len() != policy.spec.param_count() {
        return Err(Error::invalid_input("checkpoint params do not match the spec"));
    }
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[policy.obs_scale.is_some() as u8])?;
    w.write_all(&[match policy.spec.hidden {
        HiddenActivation::Relu => 0u8,
        HiddenActivation::Tanh => 1u8,
    }])?;
    w.write_all(&[match policy.spec.output {
        OutputActivation::Tanh => 0u8,
        OutputActivation::Linear => 1u8,
    }])?;
    w.write_all(&[policy.spec.bias as u8])?;
    w.write_all(&(policy.spec.layer_sizes.len() as u32).to_le_bytes())?;
    for &s in &policy.spec.layer_sizes {
        w.write_all(&(s as u32).to_le_bytes())?;
    }
    if let Some(scale) = &policy.obs_scale {
        for &s in scale {
            w.write_all(&s.to_le_bytes())?;
        }
    }
    write_param_vector(&mut w, &policy.params)?;
    w.flush()?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<CheckpointPolicy> {
    let mut r = BufReader::new(File::open(path).map_err(|e| {
        Error::invalid_state(format!("missing checkpoint {}: {e}", path.display()))
    })?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("{} is not a checkpoint file", path.display())));
    }
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let version = u32::from_le_bytes(u32buf);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported checkpoint version {version}")));
    }
    let mut flags = [0u8; 4];
    r.read_exact(&mut flags)?;
    let scaled = flags[0] != 0;
    let hidden = match flags[1] {
        0 => HiddenActivation::Relu,
        1 => HiddenActivation::Tanh,
        v => return Err(Error::Format(format!("bad hidden activation tag {v}"))),
    };
    let output = match flags[2] {
        0 => OutputActivation::Tanh,
        1 => OutputActivation::Linear,
        v => return Err(Error::Format(format!("bad output activation tag {v}"))),
    };
    let bias = flags[3] != 0;
    r.read_exact(&mut u32buf)?;
    let n_sizes = u32::from_le_bytes(u32buf) as usize;
    if !(2..=64).contains(&n_sizes) {
        return Err(Error::Format(format!("implausible layer count {n_sizes}")));
    }
    let mut sizes = Vec::with_capacity(n_sizes);
    for _ in 0..n_sizes {
        r.read_exact(&mut u32buf)?;
        sizes.push(u32::from_le_bytes(u32buf) as usize);
    }
    let obs_scale = if scaled {
        let mut scale = Vec::with_capacity(sizes[0]);
        let mut f64buf = [0u8; 8];
        for _ in 0..sizes[0] {
            r.read_exact(&mut f64buf)?;
            scale.push(f64::from_le_bytes(f64buf));
        }
        Some(scale)
    } else {
        None
    };
    let spec = MlpSpec::new(sizes, hidden, output, bias)
        .map_err(|e| Error::Format(format!("bad checkpoint spec: {e}")))?;
    let params = read_param_vector(&mut r)?;
    if params.len() != spec.param_count() {
        return Err(Error::Format("checkpoint parameter count does not match its spec".into()));
    }
    Ok(CheckpointPolicy { spec, params, obs_scale })
}
