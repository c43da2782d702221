use serde::{Deserialize, Serialize};

use super::build::build;
use super::census::census;
use super::netlist::Netlist;
use super::{decode, Census, CmKind, ConfigMode, ControlWord, FunctionSpec, POOL_CAPACITY};
use crate::error::{Error, Result};

/// The fixed set of CMs. At most one configuration holds modules at a time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CmPool {
    capacity: Census,
    used: Census,
    active: Option<ConfigMode>,
}

impl Default for CmPool {
    fn default() -> Self {
        Self::new()
    }
}

impl CmPool {
    pub fn new() -> Self {
        Self::with_capacity(POOL_CAPACITY)
    }

    pub fn with_capacity(capacity: Census) -> Self {
        Self {
            capacity,
            used: Census::default(),
            active: None,
        }
    }

    pub fn capacity(&self) -> Census {
        self.capacity
    }

    pub fn used(&self) -> Census {
        self.used
    }

    pub fn free(&self) -> Census {
        let mut free = Census::default();
        for kind in CmKind::ALL {
            *free.get_mut(kind) = self.capacity.get(kind) - self.used.get(kind);
        }
        free
    }

    pub fn active(&self) -> Option<ConfigMode> {
        self.active
    }

    pub fn control_word(&self) -> ControlWord {
        self.active.map_or(ControlWord::idle(), decode)
    }

    /// Builds the mode's netlist and claims its modules. Nothing changes
    /// on failure.
    pub fn configure(&mut self, spec: &FunctionSpec) -> Result<Netlist> {
        if self.active.is_some() {
            return Err(Error::AlreadyConfigured);
        }
        let netlist = build(spec)?;
        let need = census(&netlist);
        let free = self.free();
        if let Some(kind) = CmKind::ALL.iter().copied().find(|&k| need.get(k) > free.get(k)) {
            return Err(Error::PoolExhausted {
                kind,
                needed: need.get(kind),
                available: free.get(kind),
            });
        }
        self.used = need;
        self.active = Some(spec.mode());
        log::debug!("configured {} using {:?}", spec.mode(), need);
        Ok(netlist)
    }

    pub fn release(&mut self) -> Result<()> {
        if self.active.take().is_none() {
            return Err(Error::NotConfigured);
        }
        self.used = Census::default();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::FirSpec;

    #[test]
    fn single_configuration_rule() {
        let mut pool = CmPool::new();
        assert_eq!(pool.release(), Err(Error::NotConfigured));
        let fir = FunctionSpec::Fir(FirSpec::from_values(&[0.25; 16]).unwrap());
        pool.configure(&fir).unwrap();
        assert_eq!(pool.control_word().to_string(), "10000");
        assert_eq!(pool.configure(&fir).unwrap_err(), Error::AlreadyConfigured);
        pool.release().unwrap();
        pool.configure(&FunctionSpec::Dct).unwrap();
        assert_eq!(pool.used().subtractor, 36);
    }

    #[test]
    fn exhaustion_is_atomic() {
        let mut small = POOL_CAPACITY;
        small.multiplier = 10;
        let mut pool = CmPool::with_capacity(small);
        let err = pool.configure(&FunctionSpec::Fft(Default::default())).unwrap_err();
        assert_eq!(
            err,
            Error::PoolExhausted {
                kind: CmKind::Multiplier,
                needed: 24,
                available: 10
            }
        );
        assert_eq!(pool.used(), Census::default());
        assert!(pool.active().is_none());
    }
}
