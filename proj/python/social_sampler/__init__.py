"""Social-sampling decision models: choice kernels, idealized agent
simulations, maximum-likelihood fitting, model comparison, and trade-log
ingestion. The heavy lifting lives in the compiled _core extension."""

from social_sampler._core import (  # noqa: F401
    Additive,
    FullRegression,
    PanelDataset,
    PanelDay,
    Performance,
    PerformanceRegression,
    Popularity,
    PosteriorState,
    SimulationConfig,
    SimulationResult,
    SocialSampling,
    __version__,
    binarize_signal,
    cross_validate,
    decision_probabilities,
    error_metrics,
    expected_new_mimickers,
    fit,
    format_date,
    gamma_profile,
    generalized_commit_probability,
    load_panel,
    log_likelihood,
    parse_date,
    posterior_init,
    posterior_update,
    relative_error,
    run_cli,
    run_simulation,
    run_unfollow_simulation,
    save_panel,
    skill_credible_interval,
    smoothing,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
