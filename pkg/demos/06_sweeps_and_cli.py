# # Parameter sweeps and the command line
#
# Sweeps are described by a JSON-serializable config and written as CSV with
# a commented JSON header, so every file records how it was produced.

# In[1]:

from rydberg_w.experiments import ExperimentConfig, GridAxis, format_csv, run_custom

config = ExperimentConfig(
    "custom",
    params={"omega": 0.05, "omega_r": 1.0, "gamma": 0.002, "gamma_e": 0.1},
    grid=(GridAxis("delta", 30.0, 50.0, 3),),
)
print(config.to_json())
result = run_custom(config, workers=3)
print(format_csv(result).splitlines()[-4:])

# The same run from a shell:
#
#     rydberg-w custom --config sweep.json --out sweep.csv --workers 3
#     rydberg-w expt-table --out table.csv
#     rydberg-w urp-sweep --workers 8
#
# Exit status is 0 on success, 2 for a bad config and 3 for a solver failure.
