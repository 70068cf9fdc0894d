"""
Vibro-tactile material sensing toolkit.

Main entry points: synth_dataset(), extract_features(), fit(), predict()
"""

from wavetouch.classify import export_map, fit, predict
from wavetouch.features import extract_features, extract_features_batch
from wavetouch.material_sim import builtin_materials, simulate_trial, synth_dataset
from wavetouch.signals import dft_magnitude, generate_chirp, uniform_filter

__all__ = [
    'generate_chirp', 'dft_magnitude', 'uniform_filter',
    'builtin_materials', 'simulate_trial', 'synth_dataset',
    'extract_features', 'extract_features_batch',
    'fit', 'predict', 'export_map',
]
