"""Classical epsilon-machines and their quantum counterparts."""
from .errors import (ConvergenceError, EnumerationBudgetExceeded, MachineValidationError,
                     NumericalError, QEMError)
from .info import (ExcessEntropyEstimate, binary_entropy, conditional_initial_state_entropy,
                   excess_entropy)
from .irreversibility import (Configuration, IrreversibilityWitness, emission_configurations,
                              find_witness, transition_function)
from .machine import (EpsilonMachine, SymbolSequence, load_machine, next_symbol_distribution,
                      save_machine, simulate, stationary_distribution, statistical_complexity,
                      validate)
from .processes import alternating_switches, coin_lattice, iid_coin, perturbed_coin
from .quantum import build_quantum_states, gram_matrix, quantum_complexity, theorem_check

__version__ = "0.1.0"
