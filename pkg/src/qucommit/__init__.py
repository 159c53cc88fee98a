"""Unit commitment via spin encodings and simulated variational circuits."""

from .ansatz import AnsatzCircuit, Gate, bind, build_hea, build_pcqnn, draw
from .encoding import (
    Aggregates,
    IsingModel,
    QuboPolynomial,
    aggregates,
    build_qubo,
    encode,
    index_to_bitstring,
    ising_energy,
    to_ising,
    write_coefficients,
)
from .errors import (
    CapacityError,
    ConfigurationError,
    InstanceFormatError,
    PartitionError,
    QucommitError,
    ValidationError,
)
from .model import (
    PenaltyConfig,
    UCInstance,
    UnitSpec,
    bundled_instance_path,
    load_instance,
    save_instance,
    unit_cost,
)
from .oracle import OracleResult, exact_qubo_min, exact_uc
from .simulator import (
    PartitionedState,
    StateVector,
    expectation,
    init_zero,
    run_circuit,
    run_partitioned,
    sample,
    simulate,
)
from .training import (
    DepthScanReport,
    TrainConfig,
    TrainResult,
    depth_scan,
    gradient,
    objective,
    train,
)

__version__ = "0.1.0"
