import os
import logging
from dotenv import load_dotenv

from errors import ConfigError

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)


class Config:
    # Logging
    LOG_LEVEL = os.getenv('SUPERHEDGE_LOG_LEVEL', 'INFO').upper()

    # Numerical tolerances
    PORTFOLIO_TOLERANCE = float(os.getenv('PORTFOLIO_TOLERANCE', '1e-9'))  # renormalize band for weights
    BEST_CRP_TOLERANCE = float(os.getenv('BEST_CRP_TOLERANCE', '1e-12'))  # relative optimality gap
    BEST_CRP_MAX_ITER = int(os.getenv('BEST_CRP_MAX_ITER', '10000'))

    # Enumeration budgets
    DENSE_TUPLE_BUDGET = int(os.getenv('DENSE_TUPLE_BUDGET', '10000000'))  # m^T tuples
    TYPE_CLASS_BUDGET = int(os.getenv('TYPE_CLASS_BUDGET', '10000000'))  # C(T+m-1, m-1) types
    SYMMETRIC_MAX_ASSETS = int(os.getenv('SYMMETRIC_MAX_ASSETS', '6'))
    LOG_SPACE_HORIZON = int(os.getenv('LOG_SPACE_HORIZON', '30'))  # products in log space above this T

    # Horizon solvers
    EXACT_SCAN_MAX_HORIZON = int(os.getenv('EXACT_SCAN_MAX_HORIZON', '20000'))
    RECURRENCE_MAX_HORIZON = int(os.getenv('RECURRENCE_MAX_HORIZON', '20000'))  # O(m T^2) table
    FIXED_POINT_CAP = float(os.getenv('FIXED_POINT_CAP', '1e8'))

    # Output
    FIGURES_OUTPUT_DIR = os.getenv('FIGURES_OUTPUT_DIR', './figures_out')
    FIGURE_WORKERS = int(os.getenv('FIGURE_WORKERS', '4'))
    OUTPUT_DIGITS = int(os.getenv('OUTPUT_DIGITS', '12'))

    @classmethod
    def validate(cls):
        """Check ranges; raise ConfigError on unusable values"""
        if cls.LOG_LEVEL not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            raise ConfigError(f"SUPERHEDGE_LOG_LEVEL={cls.LOG_LEVEL!r} is not a logging level")
        for name in ('PORTFOLIO_TOLERANCE', 'BEST_CRP_TOLERANCE'):
            if getattr(cls, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        for name in ('BEST_CRP_MAX_ITER', 'DENSE_TUPLE_BUDGET', 'TYPE_CLASS_BUDGET',
                     'EXACT_SCAN_MAX_HORIZON', 'RECURRENCE_MAX_HORIZON', 'FIGURE_WORKERS', 'OUTPUT_DIGITS'):
            if getattr(cls, name) < 1:
                raise ConfigError(f"{name} must be at least 1")
        if not 1 <= cls.SYMMETRIC_MAX_ASSETS <= 6:
            raise ConfigError("SYMMETRIC_MAX_ASSETS must lie in 1..6")

        if cls.PORTFOLIO_TOLERANCE > 1e-6:
            logger.warning("⚠️  PORTFOLIO_TOLERANCE above 1e-6 may hide weight bugs")
        if cls.OUTPUT_DIGITS > 17:
            logger.warning("⚠️  OUTPUT_DIGITS above 17 exceeds double precision")
