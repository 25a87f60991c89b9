# package wide constants and defaults

from scipy import constants

speed_of_light = constants.c

# bisection/brentq residual on delta k (rad/m) and iteration cap
solver_tolerance = 1e-6
solver_max_iterations = 200

# transform limited gaussian pulse
time_bandwidth_product = 0.441

# physical band for any principal index inside its fitted range
index_band = (1.0, 3.5)

default_temperature = 25.0
default_xi_target = 0.02

# conditional-mean wavelength shift allowed inside the plateau, as a
# fraction of the FWHM of the collinear phasematching spectrum.
# calibrated on KNbO3 532 -> 810 + 1550 nm: 0.03 gives a 0.21 deg signal
# plateau, 0.05 gives 0.27 deg
default_plateau_tolerance = 0.03

# purity knee of a collection scan: first angle where the purity drops
# below this fraction of its maximum
default_knee_fraction = 0.998

default_grid_size = 256
default_window_factor = 3.0
default_pump_samples = 31

# toy model grid
default_toy_samples = 4096
default_toy_span = 8.0

# a measured efficiency above this points to a calibration problem
efficiency_warning_threshold = 1.05
coupling_floor = 1e-12
min_lens_overlap = 0.5

schema_version = 1
format_version = 1

__all__ = [
    "speed_of_light",
    "solver_tolerance",
    "solver_max_iterations",
    "time_bandwidth_product",
    "index_band",
    "default_temperature",
    "default_xi_target",
    "default_plateau_tolerance",
    "default_knee_fraction",
    "default_grid_size",
    "default_window_factor",
    "default_pump_samples",
    "default_toy_samples",
    "default_toy_span",
    "efficiency_warning_threshold",
    "coupling_floor",
    "min_lens_overlap",
    "schema_version",
    "format_version",
]
