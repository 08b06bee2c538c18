"""
Centralized configuration management for the signed consensus analysis toolkit.
"""
import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Base directory
BASE_DIR = Path(__file__).parent.absolute()


def _env_bool(name, default):
    return os.getenv(name, default).lower() == 'true'


# Application Configuration
class AppConfig:
    NAME = 'signed-consensus'
    VERSION = '1.0.0'


# Numerical tolerances
class AnalysisConfig:
    RANK_TOL = float(os.getenv('RANK_TOL', 1e-12))
    EIG_TOL = float(os.getenv('EIG_TOL', 1e-9))
    PAIRING_TOL = float(os.getenv('PAIRING_TOL', 1e-8))
    RESIDUAL_TOL = float(os.getenv('RESIDUAL_TOL', 1e-9))
    ORTHONORMAL_TOL = float(os.getenv('ORTHONORMAL_TOL', 1e-12))
    # singular values within this factor above the rank cutoff are flagged
    AMBIGUITY_FACTOR = float(os.getenv('AMBIGUITY_FACTOR', 1e3))
    # rational Kalman ranks above this size fall back to singular values
    EXACT_RANK_NODES = int(os.getenv('EXACT_RANK_NODES', 30))
    # sign pattern sweeps enumerate 2^m patterns
    MAX_SWEEP_EDGES = int(os.getenv('MAX_SWEEP_EDGES', 16))

    @classmethod
    def as_dict(cls):
        """Snapshot of the tolerances in effect (report provenance)"""
        return {
            'rank_tol': cls.RANK_TOL,
            'eig_tol': cls.EIG_TOL,
            'pairing_tol': cls.PAIRING_TOL,
            'residual_tol': cls.RESIDUAL_TOL,
            'orthonormal_tol': cls.ORTHONORMAL_TOL,
        }


# Search caps
class SymmetryConfig:
    MAX_AUTOMORPHISM_NODES = int(os.getenv('MAX_AUTOMORPHISM_NODES', 16))
    MAX_AUTOMORPHISMS = int(os.getenv('MAX_AUTOMORPHISMS', 100000))
    MAX_COMMUTANT_NODES = int(os.getenv('MAX_COMMUTANT_NODES', 12))
    NEP_ENUMERATION_NODES = int(os.getenv('NEP_ENUMERATION_NODES', 10))


# Integrator Configuration
class SimulationConfig:
    MAX_STEP = float(os.getenv('MAX_STEP', 0.01))
    STEP_SCALE = float(os.getenv('STEP_SCALE', 0.1))
    HORIZON_SCALE = float(os.getenv('HORIZON_SCALE', 50))
    LOCAL_ERROR_TOL = float(os.getenv('LOCAL_ERROR_TOL', 1e-8))
    MAX_HALVINGS = int(os.getenv('MAX_HALVINGS', 10))
    RK4_STABILITY_LIMIT = 2.785  # real-axis stability bound of classical RK4
    STEER_TOL = float(os.getenv('STEER_TOL', 1e-6))
    STEER_RCOND = float(os.getenv('STEER_RCOND', 1e-10))


# Logging Configuration
class LoggingConfig:
    LOG_LEVEL = os.getenv('LOG_LEVEL', 'INFO').upper()
    LOG_TO_FILE = _env_bool('LOG_TO_FILE', 'True')


# Path Configuration
class PathConfig:
    LOG_FOLDER = BASE_DIR / os.getenv('LOG_FOLDER', 'logs')

    @classmethod
    def ensure_directories(cls):
        """Create necessary directories if they don't exist"""
        if LoggingConfig.LOG_TO_FILE:
            cls.LOG_FOLDER.mkdir(parents=True, exist_ok=True)


# Initialize directories on import
PathConfig.ensure_directories()
