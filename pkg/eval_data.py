evaluation_experiments = [
    # --- Stiffness study: six solid cubes, 50 trials each at 20 dB ---
    {"name": "stiffness", "kind": "classify", "materials": "stiffness", "bands": "stiffness",
     "sweep": "100-800", "snr_db": 20.0, "num_trials": 50, "test_fraction": 0.2, "seed": 0},
    {"name": "stiffness-10db", "kind": "classify", "materials": "stiffness", "bands": "stiffness",
     "sweep": "100-800", "snr_db": 10.0, "num_trials": 50, "test_fraction": 0.2, "seed": 0},
    {"name": "stiffness-peak-mag", "kind": "classify", "materials": "stiffness", "bands": "stiffness",
     "sweep": "100-800", "snr_db": 20.0, "num_trials": 50, "test_fraction": 0.2, "seed": 0,
     "features": ["peak_freq", "peak_mag"]},

    # --- Infill study: PLA printed at 0..100% infill, high band 450-600 Hz ---
    {"name": "infill", "kind": "classify", "materials": "infill", "bands": "infill",
     "sweep": "100-800", "snr_db": 20.0, "num_trials": 50, "test_fraction": 0.2, "seed": 0},

    # --- Preliminary soft vs rigid sweeps (energy ratios only, bands clipped to each sweep) ---
    {"name": "sweep-100-400", "kind": "energy", "materials": "Silicone12,PLA", "bands": "preliminary",
     "sweep": "100-400", "snr_db": None},
    {"name": "sweep-100-600", "kind": "energy", "materials": "Silicone12,PLA", "bands": "preliminary",
     "sweep": "100-600", "snr_db": None},
    {"name": "sweep-100-800", "kind": "energy", "materials": "Silicone12,PLA", "bands": "preliminary",
     "sweep": "100-800", "snr_db": None},
]
