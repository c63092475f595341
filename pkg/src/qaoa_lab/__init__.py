"""qaoa_lab: a statevector laboratory for QAOA on MaxCut.

Modules
-------
graphs       problem instances, exact MaxCut oracles, bandwidth reduction
statevector  circuit simulation, gradients, sampling, parity-sector reduction
optimizer    local ascent plus the INTERP and FOURIER[q,R] level strategies
annealer     Schrodinger evolution, spectral gaps, diabatic diagnostics
tts          time-to-solution metrics, scaling fits, ensemble correlation
shot_noise   measurement-projection-noise Monte Carlo
harness      experiment plans, run records, verification
"""

from .graphs import (
    Graph,
    CutResult,
    VertexNumbering,
    generate_random_regular,
    assign_random_weights,
    complete_graph,
    cut_value,
    brute_force_maxcut,
    bandwidth,
    cuthill_mckee,
    apply_numbering,
    save_graph,
    load_graph,
)
from .statevector import (
    QaoaParams,
    DiagonalCost,
    StateVector,
    build_diagonal_cost,
    init_plus_state,
    qaoa_state,
    expectation,
    expectation_and_variance,
    gradient,
    value_and_gradient,
    ground_state_population,
    sample_measurements,
)
from .optimizer import (
    FourierParams,
    StrategyConfig,
    LevelResult,
    local_optimize,
    random_init,
    interp_step,
    fourier_to_direct,
    direct_to_fourier,
    fourier_gradient,
    run_ri_strategy,
    run_interp_strategy,
    run_fourier_strategy,
    run_strategy,
    runs_to_match,
)
from .annealer import (
    AnnealSchedule,
    SpectrumSlice,
    linear_ramp,
    qaoa_to_schedule,
    evolve,
    spectrum,
    min_gap,
    instantaneous_populations,
    adiabaticity_measure,
    lz_fit,
    lz_curve,
)
# NB: the tts() formula itself stays under qaoa_lab.tts.tts so the submodule
# name is not shadowed by the function
from .tts import (
    TtsRecord,
    ScalingFit,
    qa_tts_curve,
    qaoa_tts_curve,
    opt_tts,
    opt_tts_qa,
    opt_tts_qaoa,
    fit_scaling,
    log_correlation,
)
from .shot_noise import (
    NoiseConfig,
    NoisyEstimate,
    MeasurementLedger,
    estimate_objective,
    noisy_local_optimize,
    run_noisy_experiment,
    qa_baseline_ledger,
)
from .harness import ExperimentPlan, builtin_plan, run_plan, verify_records

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
