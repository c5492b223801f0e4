# symchain/config.py
import os
from dotenv import load_dotenv

# load .env file automatically
load_dotenv()

ROW_SUM_TOL = float(os.getenv("SYMCHAIN_ROW_SUM_TOL", "1e-12"))
UNIFORMIZATION_TOL = float(os.getenv("SYMCHAIN_UNIFORMIZATION_TOL", "1e-12"))
UNIFORMIZATION_HEADROOM = float(os.getenv("SYMCHAIN_UNIFORMIZATION_HEADROOM", "1.05"))
SYMMETRY_TOL = float(os.getenv("SYMCHAIN_SYMMETRY_TOL", "1e-9"))
STRUCTURAL_ZERO = float(os.getenv("SYMCHAIN_STRUCTURAL_ZERO", "1e-14"))
QUAD_TOL = float(os.getenv("SYMCHAIN_QUAD_TOL", "1e-10"))
SERIES_TOL = float(os.getenv("SYMCHAIN_SERIES_TOL", "1e-12"))
HARMONIC_TOL = float(os.getenv("SYMCHAIN_HARMONIC_TOL", "1e-10"))
FORMS_TOL = float(os.getenv("SYMCHAIN_FORMS_TOL", "1e-10"))
MC_N_JOBS = int(os.getenv("SYMCHAIN_MC_N_JOBS", "1"))
LOG_LEVEL = os.getenv("SYMCHAIN_LOG_LEVEL", "INFO")
