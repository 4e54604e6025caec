"""
Configuration settings for the collapse simulator
Reads tunable defaults from environment variables
"""

import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


class Config:
    """Simulator configuration"""

    # Ensemble execution
    CSL_WORKERS = int(os.getenv('CSL_WORKERS', '1'))

    # Numerical tolerances
    CSL_DEGENERACY_RTOL = float(os.getenv('CSL_DEGENERACY_RTOL', '1e-9'))
    CSL_COLLAPSE_THRESHOLD = float(os.getenv('CSL_COLLAPSE_THRESHOLD', '1e-6'))
    CSL_SDE_STEP_WARN = float(os.getenv('CSL_SDE_STEP_WARN', '0.1'))
    CSL_ADMISSIBILITY_TOL = float(os.getenv('CSL_ADMISSIBILITY_TOL', '1e-10'))

    # Largest register the environment scenario builds qubit by qubit
    CSL_MAX_EXPLICIT_QUBITS = int(os.getenv('CSL_MAX_EXPLICIT_QUBITS', '6'))

    # Output and diagnostics
    CSL_LOG_LEVEL = os.getenv('CSL_LOG_LEVEL', 'INFO').upper()
    CSL_OUTPUT_DIR = os.getenv('CSL_OUTPUT_DIR', 'results')

    @classmethod
    def validate(cls):
        """Validate configuration values"""
        errors = []

        if cls.CSL_WORKERS < 1:
            errors.append("CSL_WORKERS must be at least 1")
        if not 0 < cls.CSL_DEGENERACY_RTOL < 1e-3:
            errors.append("CSL_DEGENERACY_RTOL must lie in (0, 1e-3)")
        if not 0 < cls.CSL_COLLAPSE_THRESHOLD < 0.5:
            errors.append("CSL_COLLAPSE_THRESHOLD must lie in (0, 0.5)")
        if cls.CSL_SDE_STEP_WARN <= 0:
            errors.append("CSL_SDE_STEP_WARN must be positive")
        if not 0 < cls.CSL_ADMISSIBILITY_TOL < 1:
            errors.append("CSL_ADMISSIBILITY_TOL must lie in (0, 1)")
        if cls.CSL_MAX_EXPLICIT_QUBITS < 2:
            errors.append("CSL_MAX_EXPLICIT_QUBITS must be at least 2")
        if cls.CSL_LOG_LEVEL not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            errors.append(f"CSL_LOG_LEVEL '{cls.CSL_LOG_LEVEL}' is not a logging level")

        if errors:
            print("Configuration errors:")
            for error in errors:
                print(f"  - {error}")
            return False

        return True
