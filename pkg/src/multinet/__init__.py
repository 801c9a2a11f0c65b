"""Multilayer network analysis with third-order tensors."""
from .netcore import (
    InputError,
    LayerGraph,
    MultiNet,
    SccPartition,
    degree,
    intersection_network,
    read_edge_list,
    read_roster,
    restrict,
    strongly_connected_components,
    union_network,
)
from .tensor import (
    Tensor3,
    contract1,
    contract2,
    contract12,
    from_multinet,
    frobenius_norm,
    frontal_slice,
    mode_unfold,
    outer3,
    read_tensor,
    write_tensor,
)
from .spectral import CentralityResult, HitsResult, eigencentrality, hits, rank1_svd
from .decomp import (
    CpModel,
    Triplet,
    TuckerModel,
    corcondia,
    cp_als,
    fit_sweep,
    subgroup,
    tophits_rank1,
    triplets,
    tucker,
)
from .pipeline import PipelineConfig, assemble, load_directory

__version__ = "0.1.0"

__all__ = [
    "InputError",
    "LayerGraph",
    "MultiNet",
    "SccPartition",
    "degree",
    "intersection_network",
    "read_edge_list",
    "read_roster",
    "restrict",
    "strongly_connected_components",
    "union_network",
    "Tensor3",
    "contract1",
    "contract2",
    "contract12",
    "from_multinet",
    "frobenius_norm",
    "frontal_slice",
    "mode_unfold",
    "outer3",
    "read_tensor",
    "write_tensor",
    "CpModel",
    "Triplet",
    "TuckerModel",
    "corcondia",
    "cp_als",
    "fit_sweep",
    "subgroup",
    "tophits_rank1",
    "triplets",
    "tucker",
    "CentralityResult",
    "HitsResult",
    "eigencentrality",
    "hits",
    "rank1_svd",
    "PipelineConfig",
    "assemble",
    "load_directory",
]
