"""Two scales realized volatility under rounding and other non-additive noise."""

__version__ = "0.1.0"

from .errors import (
    CapacityError,
    ConfigError,
    DataError,
    GridError,
    ModelError,
    TsrvLabError,
    UnsupportedKernelError,
)
from .simulate import (
    MasterPath,
    ProcessModel,
    SamplingGrid,
    coarsen,
    generate_master_path,
    observation_values,
    refine_for_gamma,
    subsample_nested,
)
from .contaminate import (
    AdditiveGaussian,
    NoiseThenRound,
    ObservedSeries,
    PureRounding,
    contaminate_series,
    kernel_from_dict,
    observe_one,
    round_price,
    round_ticks,
)
from .moments import (
    BandDecomposition,
    MomentProfile,
    avar_thm1,
    band_probabilities,
    f_bar,
    f_prime,
    g_var,
    moment_profile,
    qv_target,
    thm1_quantities,
    xi_squared,
)
from .estimators import (
    SubgridAllocation,
    TsrvResult,
    grid_qv,
    regular_allocation,
    rv_all,
    rv_avg,
    select_K,
    tsrv,
)
from .localtime import (
    LocalTimeProfile,
    bridge_local_time,
    crossing_statistic,
    local_time_profile,
    rounding_levels,
    tanaka_local_time,
    thm2_limit,
    thm3_limit,
)
from .experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    ExperimentReport,
    default_config,
    emit_fig2,
    run_eq29_relation,
    run_experiment,
    run_fig3_sweep,
    run_thm1_clt,
    run_thm2_sweep,
    run_thm3_scaling,
)
from .io import (
    TickSeries,
    format_config,
    ingest_ticks,
    parse_config,
    read_report_csv,
    read_report_json,
    write_report,
    write_ticks,
)
