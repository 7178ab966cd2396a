"""
Django settings for spd_project project.

The project has no web surface: Django provides settings, logging
configuration and the `manage.py` command runner for the `classifier` app.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Load environment variables: development defaults first, then production, then a root .env
env_dir = BASE_DIR / 'env'
dev_env_file = env_dir / '.env.dev'
prod_env_file = env_dir / '.env.prod'

if dev_env_file.exists():
    load_dotenv(dev_env_file)
elif prod_env_file.exists():
    load_dotenv(prod_env_file)
else:
    legacy_env = BASE_DIR / '.env'
    if legacy_env.exists():
        load_dotenv(legacy_env)


SECRET_KEY = os.getenv('SECRET_KEY', 'spd-project-local-only')

DEBUG = os.getenv('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'classifier',
]

USE_TZ = True
TIME_ZONE = 'UTC'

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Run defaults for the classifier commands; every one can be overridden by
# a --config file or a command-line flag.

def _optional_float(name):
    value = os.getenv(name, '')
    return float(value) if value else None


SPD_SEED = int(os.getenv('SPD_SEED', '0'))
SPD_THREADS = int(os.getenv('SPD_THREADS', '1'))
SPD_RIDGE = _optional_float('SPD_RIDGE')
SPD_LOG_LEVEL = os.getenv('SPD_LOG_LEVEL', 'INFO')


# Logging configuration
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{levelname} {asctime} {module} {process:d} {thread:d} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        'spdkit': {
            'handlers': ['console'],
            'level': SPD_LOG_LEVEL,
            'propagate': False,
        },
        'classifier': {
            'handlers': ['console'],
            'level': SPD_LOG_LEVEL,
            'propagate': False,
        },
    },
}
