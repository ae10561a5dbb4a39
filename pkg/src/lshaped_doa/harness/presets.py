"""Default experiment settings behind each CLI subcommand."""

from .config import ExperimentConfig

THREE_TARGETS = dict(azimuth_deg=(10.0, 20.0, 30.0), elevation_deg=(45.0, 40.0, 35.0))
ORDERING_TARGETS = dict(azimuth_deg=(15.0, 25.0, 35.0), elevation_deg=(50.0, 40.0, 30.0))
CLOSE_PAIR = dict(azimuth_deg=(15.0, 16.0), elevation_deg=(30.0, 31.0))
GRID = dict(azimuth_deg=(10.0, 20.0, 30.0, 40.0, 50.0, 60.0),
            elevation_deg=(5.0, 15.0, 25.0, 35.0, 45.0, 55.0), grid=True)

PRESETS = {
    "sweep-iterations": ExperimentConfig(
        name="iterations", **THREE_TARGETS, sweep="max_iter",
        sweep_values=tuple(range(1, 21)), snr_db=0.0, trials=100),
    "sweep-mu": ExperimentConfig(
        name="mu_sweep", **THREE_TARGETS, sweep="mu",
        sweep_values=tuple(round(0.05 * i, 2) for i in range(21)), snr_db=0.0, trials=200),
    "grid-dof": ExperimentConfig(
        name="grid_dof", **GRID, sweep="snr_db", sweep_values=(13.0,), trials=100,
        methods=("proposed", "ss")),
    "sweep-snr": ExperimentConfig(
        name="rmse_vs_snr", **ORDERING_TARGETS, sweep="snr_db",
        sweep_values=(-5.0, 0.0, 5.0, 10.0, 15.0, 20.0), trials=200,
        methods=("proposed", "ss", "als")),
    "resolution": ExperimentConfig(
        name="resolution", **CLOSE_PAIR, sweep="snr_db",
        sweep_values=(0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0), trials=100,
        methods=("proposed", "ss", "als")),
    "crb": ExperimentConfig(
        name="crb", **ORDERING_TARGETS, sweep="snr_db",
        sweep_values=(-5.0, 0.0, 5.0, 10.0, 15.0, 20.0), trials=1),
}
PRESETS["estimate"] = PRESETS["sweep-snr"].replace(name="estimate", sweep_values=(10.0,),
                                                   trials=1, methods=("proposed",))
PRESETS["simulate"] = PRESETS["estimate"].replace(name="simulate")
