import logging

solver_logger = logging.getLogger("born_series_lab.scattering")
