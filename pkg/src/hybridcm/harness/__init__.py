from ..rngstreams import rng_streams
from .exports import (
    export_constellation,
    read_constellation_csv,
    read_results_csv,
    write_results_csv,
    write_run_record,
)
from .gmi import GmiEstimate, estimate_gmi
from .link import SimConfig, SimResult, run_coded_link, run_uncoded_baseline
from .svgplot import emit_plot

__all__ = [
    "rng_streams",
    "export_constellation", "read_constellation_csv", "read_results_csv",
    "write_results_csv", "write_run_record",
    "GmiEstimate", "estimate_gmi",
    "SimConfig", "SimResult", "run_coded_link", "run_uncoded_baseline",
    "emit_plot",
]
