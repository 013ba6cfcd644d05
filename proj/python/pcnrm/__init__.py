"""Network revenue management under ranking-based customer choice."""

from ._pcnrm import (
    Instance,
    PcnrmError,
    bus_line,
    dp_value,
    load_instance,
    make_instance,
    od_policy_size,
    pcp_revenue,
    random_instance,
    running_example,
    simulate,
    solve,
)

__all__ = [
    "Instance",
    "PcnrmError",
    "bus_line",
    "dp_value",
    "load_instance",
    "make_instance",
    "od_policy_size",
    "pcp_revenue",
    "random_instance",
    "running_example",
    "simulate",
    "solve",
]
