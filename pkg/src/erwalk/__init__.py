"""Random-walk hitting times on Erdos-Renyi graphs.

Spectral formulas for hitting, target, starting and commute times, checked
against a first-passage linear solve and Monte-Carlo walks, plus finite-n
scaling experiments on G(n, p).
"""
__version__ = "0.1.0"

from erwalk.graph import (  # noqa: E402
    Graph,
    GnpParams,
    complete_graph,
    cycle_graph,
    is_connected,
    path_graph,
    read_edge_list,
    sample_gnp,
    stationary_distribution,
    write_edge_list,
)
from erwalk.hitting import (  # noqa: E402
    HittingReport,
    commute_time,
    commute_time_bounds,
    hitting_report,
    hitting_time_matrix,
    hitting_time_spectral,
    random_start_time,
    random_target_time,
    random_target_times,
    target_time_bounds,
)
from erwalk.kernels import BACKEND  # noqa: E402
from erwalk.oracle import (  # noqa: E402
    WalkEstimate,
    hitting_times_linear,
    random_target_time_oracle,
    simulate_walk,
)
from erwalk.spectral import (  # noqa: E402
    SpectralDecomposition,
    build_normalized_adjacency,
    decompose,
    eigendecompose,
    lambda2_relation,
    spectral_gap,
)
