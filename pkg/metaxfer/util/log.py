import logging
import logging.config
import os

LEVEL_ENV = 'METAXFER_LOG_LEVEL'


def default_setup(level=None):
    """Install the package wide handler on stderr. Level: argument, then $METAXFER_LOG_LEVEL, then INFO."""
    level = (level or os.environ.get(LEVEL_ENV) or 'INFO').upper()
    logging.config.dictConfig({
        'version': 1,
        'disable_existing_loggers': False,  # modules grab their loggers at import time
        'formatters': {
            'standard': {'format': '%(asctime)s [%(levelname)s] %(name)s: %(message)s'},
        },
        'handlers': {
            'default': {
                'level': level,
                'class': 'logging.StreamHandler',
                'stream': 'ext://sys.stderr',
                'formatter': 'standard'
            },
        },
        'loggers': {
            'metaxfer': {
                'handlers': ['default'],
                'level': level,
                'propagate': False
            }
        }
    })


def get_logger(name, level=None):
    logger = logging.getLogger(name)
    level is not None and logger.setLevel(level)
    return logger


def instance_logger(name, instance, level=None):
    lname = "%s.%s.%s" % (instance.__class__.__module__, instance.__class__.__name__, name)
    return get_logger(lname, level)
