"""Touch trace smoothing filters, pipelines and the synthetic drag benchmark."""

from ._touchsmooth import (
    Error,
    add_noise,
    bench,
    calibrate_noise,
    diffuse_step,
    emission_view,
    estimate_noise_sd,
    filter,
    generate_truth,
    kde_smooth,
    max_error,
    measure1,
    preset_names,
    preset_text,
    savitzky_golay_coefficients,
)

__all__ = [
    "Error",
    "add_noise",
    "bench",
    "calibrate_noise",
    "diffuse_step",
    "emission_view",
    "estimate_noise_sd",
    "filter",
    "generate_truth",
    "kde_smooth",
    "max_error",
    "measure1",
    "preset_names",
    "preset_text",
    "savitzky_golay_coefficients",
]
