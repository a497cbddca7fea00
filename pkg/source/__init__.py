# Experiment orchestration, closed-form theory and Haar oracles
