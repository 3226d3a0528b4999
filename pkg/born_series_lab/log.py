from tornado.log import app_log, enable_pretty_logging
from tornado.options import options

from born_series_lab.scattering.log import solver_logger


def setup_logging(level: str):
    options.logging = level.lower()

    # pretty logging for the lab layer and the numerical library
    enable_pretty_logging(options, logger=app_log)
    enable_pretty_logging(options, logger=solver_logger)
    app_log.debug("Logging pretty enabled, log level: %s", level)
