from ising_fluct.chains.free_fermion import (
    Branch,
    Coupling,
    FermionSpectrum,
    Phase,
    fermion_spectrum,
    level_spacing,
)
from ising_fluct.chains.dimer import dimer_concurrence, dimer_stats
from ising_fluct.chains.finite_chain import ChainSpec, chain_stats, ground_state
